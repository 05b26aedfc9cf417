use std::collections::VecDeque;

use super::BinaryMask;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(-1, 0), (0, -1), (0, 1), (1, 0)],
            Connectivity::Eight => &super::RING,
        }
    }
}

/// Region labels: 0 is background, foreground regions are 1..=count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: usize,
}

impl LabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    /// Pixel count per label; index 0 holds label 1.
    pub fn areas(&self) -> Vec<usize> {
        let mut areas = vec![0; self.count];
        for &l in &self.labels {
            if l > 0 {
                areas[l as usize - 1] += 1;
            }
        }
        areas
    }

    /// Drops regions smaller than `min_area` pixels (they become background)
    /// and renumbers the rest, keeping their order.
    pub fn without_smaller_than(&self, min_area: usize) -> LabelMap {
        let areas = self.areas();
        let mut remap = vec![0u32; self.count + 1];
        let mut next = 0;
        for (i, &a) in areas.iter().enumerate() {
            if a >= min_area {
                next += 1;
                remap[i + 1] = next;
            }
        }
        LabelMap {
            width: self.width,
            height: self.height,
            labels: self.labels.iter().map(|&l| remap[l as usize]).collect(),
            count: next as usize,
        }
    }

    /// Pixel coordinates of each region, in raster order.
    pub fn regions(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.count];
        for (i, &l) in self.labels.iter().enumerate() {
            if l > 0 {
                out[l as usize - 1].push((i / self.width, i % self.width));
            }
        }
        out
    }
}

/// Labels maximal connected foreground regions in raster-scan discovery order.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> LabelMap {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![0u32; w * h];
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !mask.bits()[start] || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (r, c) = ((i / w) as isize, (i % w) as isize);
            for &(dr, dc) in connectivity.offsets() {
                let (rr, cc) = (r + dr, c + dc);
                if mask.get_signed(rr, cc) {
                    let j = rr as usize * w + cc as usize;
                    if labels[j] == 0 {
                        labels[j] = count;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    LabelMap {
        width: w,
        height: h,
        labels,
        count: count as usize,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_background() {
        assert_eq!(
            connected_components(&BinaryMask::new(5, 5), Connectivity::Four).count(),
            0
        );
    }

    #[test]
    fn two_squares() {
        let m = BinaryMask::from_fn(10, 10, |r, c| {
            (r < 3 && c < 3) || ((5..9).contains(&r) && (5..9).contains(&c))
        });
        let l = connected_components(&m, Connectivity::Four);
        assert_eq!(l.count(), 2);
        assert_eq!(l.areas(), vec![9, 16]);
    }

    #[test]
    fn diagonal_touch() {
        let m = BinaryMask::from_rows(&[
            "##..", //
            "##..", //
            "..##", //
            "..##",
        ]);
        assert_eq!(connected_components(&m, Connectivity::Four).count(), 2);
        assert_eq!(connected_components(&m, Connectivity::Eight).count(), 1);
    }

    proptest! {
        #[test]
        fn labels_partition_foreground(bits in proptest::collection::vec(any::<bool>(), 15 * 11)) {
            let m = BinaryMask::from_fn(15, 11, |r, c| bits[r * 15 + c]);
            for conn in [Connectivity::Four, Connectivity::Eight] {
                let l = connected_components(&m, conn);
                prop_assert_eq!(l.areas().iter().sum::<usize>(), m.count());
                prop_assert!(l.areas().iter().all(|&a| a > 0));
                for (i, &lab) in l.labels().iter().enumerate() {
                    prop_assert_eq!(lab > 0, m.bits()[i]);
                }
            }
        }
    }
}
