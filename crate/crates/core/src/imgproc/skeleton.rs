//! Zhang-Suen thinning followed by a topology-preserving cleanup that strips
//! the staircase pixels Zhang-Suen leaves on diagonal strokes, so the result
//! is 8-connected and one pixel wide.

use super::{BinaryMask, RING};

fn ring(mask: &BinaryMask, r: usize, c: usize) -> [bool; 8] {
    let mut out = [false; 8];
    for (k, (dr, dc)) in RING.iter().enumerate() {
        out[k] = mask.get_signed(r as isize + dr, c as isize + dc);
    }
    out
}

/// Number of 0→1 transitions walking the ring N, NE, …, NW, N.
fn transitions(p: &[bool; 8]) -> usize {
    (0..8).filter(|&k| !p[k] && p[(k + 1) % 8]).count()
}

fn zhang_suen_pass(mask: &mut BinaryMask, second: bool) -> bool {
    let (w, h) = (mask.width(), mask.height());
    let mut doomed = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if !mask.get(r, c) {
                continue;
            }
            let p = ring(mask, r, c);
            let b = p.iter().filter(|&&x| x).count();
            if !(2..=6).contains(&b) || transitions(&p) != 1 {
                continue;
            }
            // p[0]=N, p[2]=E, p[4]=S, p[6]=W
            let (n, e, s, wst) = (p[0], p[2], p[4], p[6]);
            let ok = if second {
                !(n && e && wst) && !(n && s && wst)
            } else {
                !(n && e && s) && !(e && s && wst)
            };
            if ok {
                doomed.push((r, c));
            }
        }
    }
    // Parallel deletion can erase whole 2x2 blocks or split 2-px diagonals;
    // re-checking simplicity against the live mask keeps the topology.
    let mut changed = false;
    for &(r, c) in &doomed {
        let p = ring(mask, r, c);
        let b = p.iter().filter(|&&x| x).count();
        if (2..=6).contains(&b) && transitions(&p) == 1 {
            mask.set(r, c, false);
            changed = true;
        }
    }
    changed
}

/// Number of 8-connected groups among the set ring neighbors.
fn neighbor_groups(p: &[bool; 8]) -> usize {
    let mut parent: [usize; 8] = [0, 1, 2, 3, 4, 5, 6, 7];
    fn find(parent: &mut [usize; 8], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut union = |a: usize, b: usize| {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    };
    for k in 0..8 {
        let next = (k + 1) % 8;
        if p[k] && p[next] {
            union(k, next);
        }
        // edge neighbors two steps apart (N-E, E-S, S-W, W-N) touch diagonally
        if k % 2 == 0 {
            let skip = (k + 2) % 8;
            if p[k] && p[skip] {
                union(k, skip);
            }
        }
    }
    let mut roots: Vec<usize> = (0..8)
        .filter(|&k| p[k])
        .map(|k| find(&mut parent, k))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

fn staircase_pass(mask: &mut BinaryMask) -> bool {
    let (w, h) = (mask.width(), mask.height());
    let mut changed = false;
    for r in 0..h {
        for c in 0..w {
            if !mask.get(r, c) {
                continue;
            }
            let p = ring(mask, r, c);
            let b = p.iter().filter(|&&x| x).count();
            let open_side = !p[0] || !p[2] || !p[4] || !p[6];
            if b >= 2 && open_side && neighbor_groups(&p) == 1 {
                mask.set(r, c, false);
                changed = true;
            }
        }
    }
    changed
}

/// Thins foreground to a one-pixel-wide, 8-connected skeleton.
///
/// Iterates to a fixed point, so the operation is idempotent.
pub fn skeletonize(mask: &BinaryMask) -> BinaryMask {
    let mut out = mask.clone();
    loop {
        let mut changed = false;
        loop {
            let a = zhang_suen_pass(&mut out, false);
            let b = zhang_suen_pass(&mut out, true);
            if !(a || b) {
                break;
            }
            changed = true;
        }
        changed |= staircase_pass(&mut out);
        if !changed {
            return out;
        }
    }
}
