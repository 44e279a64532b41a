use crate::error::{Error, Result};
use crate::fault::CellFaultMask;

/// Circular shift amount of one synapse, the content of its 3-bit
/// `shuffle` register.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rotation(u8);

impl Rotation {
    pub const IDENTITY: Rotation = Rotation(0);

    pub fn new(r: u8) -> Result<Self> {
        if r > 7 {
            return Err(Error::invalid(format!("rotation {r} outside 0..=7")));
        }
        Ok(Rotation(r))
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CleanRun {
    pub start: u8,
    pub len: u8,
}

/// Longest circular run of non-stuck cells, including runs that wrap from
/// cell 7 to cell 0. Ties go to the smallest start cell.
pub fn longest_clean_run(mask: CellFaultMask) -> CleanRun {
    let faulty = mask.faulty();
    if faulty == 0 {
        return CleanRun { start: 0, len: 8 };
    }
    let mut best = CleanRun { start: 0, len: 0 };
    for start in 0..8u8 {
        let prev = (start + 7) % 8;
        // a maximal run starts on a clean cell right after a stuck one
        if faulty >> start & 1 == 1 || faulty >> prev & 1 == 0 {
            continue;
        }
        let len = (0..8u8)
            .take_while(|k| faulty >> ((start + k) % 8) & 1 == 0)
            .count() as u8;
        if len > best.len {
            best = CleanRun { start, len };
        }
    }
    best
}

/// Significance landing on stuck cells under rotation `r`: the sum of `2^j`
/// over weight bits `j` whose cell `(j + r) mod 8` is stuck.
#[inline]
pub fn corruption_cost(mask: CellFaultMask, r: Rotation) -> u32 {
    // cell c holds bit (c - r) mod 8, i.e. rotate the cell mask back by r
    mask.faulty().rotate_right(r.0 as u32) as u32
}

/// Rotation with the least significance on stuck cells; ties go to the
/// smallest shift.
pub fn compute_rotation(mask: CellFaultMask) -> Rotation {
    if mask.is_clean() {
        return Rotation::IDENTITY;
    }
    (0..8u8)
        .map(Rotation)
        .min_by_key(|&r| (corruption_cost(mask, r), r.0))
        .expect("eight candidates")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells(list: &[u8]) -> CellFaultMask {
        let bits = list.iter().fold(0u8, |m, &c| m | 1 << c);
        CellFaultMask::new(0, bits).unwrap()
    }

    /// Oracle: every circular window, checked cell by cell.
    fn run_oracle(mask: CellFaultMask) -> CleanRun {
        let f = mask.faulty();
        for len in (1..=8u8).rev() {
            for start in 0..8u8 {
                if (0..len).all(|k| f >> ((start + k) % 8) & 1 == 0) {
                    return CleanRun { start, len };
                }
            }
        }
        CleanRun { start: 0, len: 0 }
    }

    /// Oracle: place each bit explicitly and sum the significance it loses.
    fn cost_oracle(mask: CellFaultMask, r: u8) -> u32 {
        (0..8u8)
            .filter(|j| mask.faulty() >> ((j + r) % 8) & 1 == 1)
            .map(|j| 1u32 << j)
            .sum()
    }

    #[test]
    fn clean_run_examples() {
        assert_eq!(longest_clean_run(CellFaultMask::CLEAN), CleanRun { start: 0, len: 8 });
        assert_eq!(longest_clean_run(cells(&[3])), CleanRun { start: 4, len: 7 });
        assert_eq!(longest_clean_run(cells(&[0, 7])), CleanRun { start: 1, len: 6 });
        assert_eq!(longest_clean_run(cells(&[0, 1, 2, 3, 4, 5, 6, 7])).len, 0);
    }

    #[test]
    fn clean_run_matches_oracle_exhaustively() {
        for bits in 0..=255u8 {
            let m = CellFaultMask::new(bits, 0).unwrap();
            let got = longest_clean_run(m);
            let want = run_oracle(m);
            assert_eq!(got.len, want.len, "mask {bits:#010b}");
            if want.len > 0 {
                assert_eq!(got, want, "mask {bits:#010b}");
            }
        }
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(compute_rotation(CellFaultMask::CLEAN), Rotation::IDENTITY);
        assert_eq!(compute_rotation(cells(&[7])).get(), 7);
        let m = cells(&[0, 1]);
        let oracle = (0..8u8).min_by_key(|&r| (cost_oracle(m, r), r)).unwrap();
        assert_eq!(compute_rotation(m).get(), oracle);
    }

    #[test]
    fn cost_matches_oracle_exhaustively() {
        for bits in 0..=255u8 {
            let m = CellFaultMask::new(0, bits).unwrap();
            for r in 0..8u8 {
                assert_eq!(corruption_cost(m, Rotation(r)), cost_oracle(m, r));
            }
            let best = (0..8u8).map(|r| cost_oracle(m, r)).min().unwrap();
            let chosen = compute_rotation(m);
            assert_eq!(corruption_cost(m, chosen), best);
            assert!(corruption_cost(m, chosen) <= corruption_cost(m, Rotation::IDENTITY));
        }
    }

    #[test]
    fn rotation_bounds() {
        assert!(Rotation::new(8).is_err());
        assert_eq!(Rotation::new(7).unwrap().get(), 7);
    }
}
