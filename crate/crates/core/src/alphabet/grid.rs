use std::fmt;

use super::glyphs::{GlyphSet, Letter, GRID, TILE};
use crate::image::GrayImage;
use crate::rng::RngStream;

/// 8×8 letter layout, `cells[row][col]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LetterGrid {
    pub cells: [[Letter; GRID]; GRID],
}

impl LetterGrid {
    pub fn get(&self, row: usize, col: usize) -> Letter {
        self.cells[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, letter: Letter) {
        self.cells[row][col] = letter;
    }

    /// Letter histogram indexed like [`Letter::ALL`].
    pub fn counts(&self) -> [usize; 8] {
        let mut out = [0; 8];
        for row in &self.cells {
            for l in row {
                out[l.index()] += 1;
            }
        }
        out
    }

    pub fn render(&self, glyphs: &GlyphSet) -> GrayImage {
        let mut img = GrayImage::new(GRID * TILE, GRID * TILE);
        for r in 0..GRID {
            for c in 0..GRID {
                img.put_block(r * TILE, c * TILE, TILE, glyphs.template(self.cells[r][c]));
            }
        }
        img
    }

    /// Parses eight lines of eight letters.
    pub fn parse(text: &str) -> Option<LetterGrid> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        if rows.len() != GRID {
            return None;
        }
        let mut cells = [[Letter::H; GRID]; GRID];
        for (r, row) in rows.iter().enumerate() {
            let letters: Vec<Letter> = row.chars().filter_map(Letter::from_char).collect();
            if letters.len() != GRID {
                return None;
            }
            cells[r].copy_from_slice(&letters);
        }
        Some(LetterGrid { cells })
    }
}

impl fmt::Display for LetterGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.cells {
            let line: String = row.iter().map(|l| l.as_char()).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Domino {
    first: Letter,
    second: Letter,
    vertical: bool,
}

fn place(
    cells: &mut [[Option<Letter>; GRID]; GRID],
    dominoes: &[Domino],
    rng: &mut RngStream,
) -> bool {
    let Some((d, rest)) = dominoes.split_first() else {
        return true;
    };
    let (rows, cols) = if d.vertical {
        (GRID - 1, GRID)
    } else {
        (GRID, GRID - 1)
    };
    let mut anchors: Vec<(usize, usize)> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .collect();
    rng.shuffle(&mut anchors);
    for (r, c) in anchors {
        let (r2, c2) = if d.vertical { (r + 1, c) } else { (r, c + 1) };
        if cells[r][c].is_some() || cells[r2][c2].is_some() {
            continue;
        }
        cells[r][c] = Some(d.first);
        cells[r2][c2] = Some(d.second);
        if place(cells, rest, rng) {
            return true;
        }
        cells[r][c] = None;
        cells[r2][c2] = None;
    }
    false
}

/// Random layout with the prescribed letter multiset and letter pairs.
///
/// The four vertical Z-{K,K,V,W} dominoes go down first, then the eight
/// horizontal X-Y dominoes, each at a uniformly shuffled free anchor with
/// backtracking; the 40 remaining cells take a shuffled 24 H + 16 L.
pub fn random_grid(rng: &mut RngStream) -> LetterGrid {
    let mut dominoes = Vec::with_capacity(12);
    for below in [Letter::K, Letter::K, Letter::V, Letter::W] {
        dominoes.push(Domino {
            first: Letter::Z,
            second: below,
            vertical: true,
        });
    }
    for _ in 0..8 {
        dominoes.push(Domino {
            first: Letter::X,
            second: Letter::Y,
            vertical: false,
        });
    }
    let mut cells = [[None; GRID]; GRID];
    let placed = place(&mut cells, &dominoes, rng);
    assert!(placed, "domino placement on an 8x8 board cannot fail");

    let mut singles: Vec<Letter> = std::iter::repeat_n(Letter::H, 24)
        .chain(std::iter::repeat_n(Letter::L, 16))
        .collect();
    rng.shuffle(&mut singles);
    let mut singles = singles.into_iter();
    let mut grid = [[Letter::H; GRID]; GRID];
    for r in 0..GRID {
        for c in 0..GRID {
            grid[r][c] = match cells[r][c] {
                Some(l) => l,
                None => singles.next().expect("40 free cells"),
            };
        }
    }
    LetterGrid { cells: grid }
}
