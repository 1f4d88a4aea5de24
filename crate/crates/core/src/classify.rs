//! Fundamental regions of coupling space and the number of stationary states
//! in each of their subregions.
//!
//! Regions follow the shapes of the two level curves. Within a region the
//! count is predicted from the signs of `β⁰` and the position of `K₁`
//! relative to the boundary set in `K₁` (in `K₂` for the mirrored regions),
//! then compared against direct enumeration.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boundaries::{beta_zero, solve_boundary_set_with, BoundaryOptions, DEFAULT_SEARCH_BOX};
use crate::error::{domain, Error, Result};
use crate::model::{solve_all, Coupling, Param, Psi};

/// Relative distance to a boundary below which an input counts as lying on it.
pub const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
}

impl Region {
    pub const ALL: [Region; 10] = [
        Region::R1,
        Region::R2,
        Region::R3,
        Region::R4,
        Region::R5,
        Region::R6,
        Region::R7,
        Region::R8,
        Region::R9,
        Region::R10,
    ];

    /// Largest possible number of stationary states on the `ψ = 0` branch,
    /// the unsynchronized state included.
    pub fn max_solutions(self) -> usize {
        match self {
            Region::R1 => 1,
            Region::R2 | Region::R3 | Region::R4 | Region::R5 => 2,
            Region::R6 | Region::R7 | Region::R8 | Region::R9 => 3,
            Region::R10 => 4,
        }
    }

    /// Whether the region is the mirror image of another under exchanging
    /// the two communities.
    fn mirrored_twin(self) -> Option<Region> {
        match self {
            Region::R7 => Some(Region::R6),
            Region::R9 => Some(Region::R8),
            _ => None,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BifurcationType {
    Zero,
    Psync,
    Sync,
}

/// Region of a coupling. Both external strengths must be nonzero.
///
/// An internal strength of exactly 2 counts with the `≤ 2` rows; with a
/// negative external strength its level curve is the origin alone, so such
/// couplings fall in `R1`.
pub fn region(c: &Coupling) -> Result<Region> {
    c.validate()?;
    if c.l1 == 0.0 || c.l2 == 0.0 {
        return domain(format!("regions need nonzero external strengths, got {c}"));
    }
    let low1 = c.k1 <= 2.0;
    let low2 = c.k2 <= 2.0;
    let (neg1, neg2) = (c.l1 < 0.0, c.l2 < 0.0);
    if (low1 && neg1) || (low2 && neg2) {
        return Ok(Region::R1);
    }
    Ok(match (neg1, neg2) {
        (false, false) => match (low1, low2) {
            (true, true) => Region::R2,
            (false, false) => Region::R3,
            (true, false) => Region::R4,
            (false, true) => Region::R5,
        },
        (true, false) => if low2 { Region::R8 } else { Region::R6 },
        (false, true) => if low1 { Region::R9 } else { Region::R7 },
        (true, true) => Region::R10,
    })
}

/// Bifurcation types that occur somewhere in the region.
pub fn bifurcation_types(r: Region) -> Vec<BifurcationType> {
    use BifurcationType::*;
    match r {
        Region::R1 => vec![],
        Region::R2 => vec![Zero],
        Region::R3 | Region::R4 | Region::R5 => vec![Psync],
        Region::R6 | Region::R7 => vec![Psync, Sync],
        Region::R8 | Region::R9 | Region::R10 => vec![Zero, Psync, Sync],
    }
}

/// Region, predicted count and enumerated count of one coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub region: Region,
    pub max_solutions: usize,
    pub bifurcation_types: Vec<BifurcationType>,
    /// Number of stationary states on the `ψ = 0` branch.
    pub exact_count: usize,
    /// e.g. `1 unsync + 2 sync`.
    pub label: String,
    /// The coupling lies on a boundary; the table row for the boundary was
    /// used and the cross-check was skipped.
    pub degenerate: bool,
}

/// `1 unsync` or `1 unsync + n sync`.
pub fn count_label(count: usize) -> String {
    match count {
        0 | 1 => "1 unsync".to_string(),
        n => format!("1 unsync + {} sync", n - 1),
    }
}

struct Prediction {
    count: usize,
    degenerate: bool,
}

/// Region, table prediction and enumeration, which must agree.
pub fn subclassify(c: &Coupling) -> Result<RegionReport> {
    let r = region(c)?;
    let found = solve_all(c, Psi::Zero)?.len();
    let pred = predict(c, r)?;
    if !pred.degenerate && pred.count != found {
        return Err(Error::ClassificationInconsistency { region: r.to_string(), predicted: pred.count, found });
    }
    Ok(RegionReport {
        region: r,
        max_solutions: r.max_solutions(),
        bifurcation_types: bifurcation_types(r),
        exact_count: found,
        label: count_label(found),
        degenerate: pred.degenerate,
    })
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEGENERATE_TOL * a.abs().max(b.abs()).max(1.0)
}

fn predict(c: &Coupling, r: Region) -> Result<Prediction> {
    // mirrored regions are read along K₂ by exchanging the communities
    if let Some(twin) = r.mirrored_twin() {
        return predict(&c.swapped(), twin);
    }
    let b0 = beta_zero(c).closed_form;
    let on_zero = b0.abs() <= DEGENERATE_TOL;
    let plain = |count| Ok(Prediction { count, degenerate: false });
    match r {
        Region::R1 => plain(1),
        Region::R2 => Ok(Prediction { count: if b0 >= 0.0 { 1 } else { 2 }, degenerate: on_zero }),
        Region::R3 | Region::R4 | Region::R5 => plain(2),
        Region::R6 => {
            let (below, tangent) = boundary_position(c)?;
            if tangent > 0 {
                Ok(Prediction { count: 2, degenerate: true })
            } else {
                plain(1 + 2 * below.min(1))
            }
        }
        Region::R8 => {
            if on_zero {
                return Ok(Prediction { count: 1, degenerate: true });
            }
            if b0 < 0.0 {
                return plain(2);
            }
            let (below, tangent) = boundary_position(c)?;
            if tangent > 0 {
                Ok(Prediction { count: 2, degenerate: true })
            } else {
                plain(if below == 1 { 3 } else { 1 })
            }
        }
        Region::R10 => {
            if b0 <= 0.0 {
                return Ok(Prediction { count: 1, degenerate: on_zero });
            }
            let (below, tangent) = boundary_position(c)?;
            match tangent {
                0 => plain(if below % 2 == 1 { 4 } else { 2 }),
                1 => Ok(Prediction { count: 3, degenerate: true }),
                _ => Ok(Prediction { count: 2, degenerate: true }),
            }
        }
        Region::R7 | Region::R9 => unreachable!("mirrored regions are handled above"),
    }
}

/// Number of boundary-set elements in `K₁` strictly below `c.k1`, and the
/// number that coincide with it.
fn boundary_position(c: &Coupling) -> Result<(usize, usize)> {
    let (lo, hi) = DEFAULT_SEARCH_BOX;
    let opts = BoundaryOptions { search_box: (lo.min(c.k1 - 1.0), hi.max(c.k1 + 1.0)) };
    let set = solve_boundary_set_with(c, Param::K1, &opts)?;
    let tangent = set.values.iter().filter(|&&v| near(v, c.k1)).count();
    let below = set.values.iter().filter(|&&v| v < c.k1 && !near(v, c.k1)).count();
    Ok((below, tangent))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_regions() {
        let cases = [
            ((1.0, 1.0, -1.0, 3.0), Region::R1, 1),
            ((3.0, 3.0, -2.0, -3.0), Region::R10, 4),
            ((2.0, 2.0, 1.0, 1.0), Region::R2, 2),
            ((3.0, 3.0, 1.0, 1.0), Region::R3, 2),
            ((1.0, 3.0, 1.0, 1.0), Region::R4, 2),
            ((3.0, 1.0, 1.0, 1.0), Region::R5, 2),
            ((3.0, 3.0, -1.0, 1.0), Region::R6, 3),
            ((3.0, 3.0, 1.0, -1.0), Region::R7, 3),
            ((3.0, 1.0, -1.0, 1.0), Region::R8, 3),
            ((1.0, 3.0, 1.0, -1.0), Region::R9, 3),
        ];
        for ((k1, k2, l1, l2), r, max) in cases {
            let got = region(&Coupling::new(k1, k2, l1, l2)).unwrap();
            assert_eq!(got, r);
            assert_eq!(got.max_solutions(), max);
        }
        assert!(region(&Coupling::new(1.0, 1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn bifurcation_type_table() {
        use BifurcationType::*;
        assert_eq!(bifurcation_types(Region::R2), vec![Zero]);
        assert_eq!(bifurcation_types(Region::R3), vec![Psync]);
        assert_eq!(bifurcation_types(Region::R7), vec![Psync, Sync]);
        assert_eq!(bifurcation_types(Region::R10), vec![Zero, Psync, Sync]);
        assert!(bifurcation_types(Region::R1).is_empty());
    }

    #[test]
    fn subclassify_examples() {
        let r = subclassify(&Coupling::new(1.0, 1.0, 3.0, 2.0)).unwrap();
        assert_eq!((r.exact_count, r.label.as_str()), (2, "1 unsync + 1 sync"));
        let r = subclassify(&Coupling::new(5.5, 6.5, -2.0, -3.0)).unwrap();
        assert_eq!((r.region, r.exact_count, r.label.as_str()), (Region::R10, 4, "1 unsync + 3 sync"));
        let r = subclassify(&Coupling::new(3.0, -1.0, -2.0, 2.0)).unwrap();
        assert_eq!((r.region, r.exact_count, r.label.as_str()), (Region::R8, 1, "1 unsync"));
    }

    #[test]
    fn subclassify_along_regression_sweeps() {
        // R10 sweep in k1 at (6.5, -2, -3): 1, 2, 4, 2 solutions
        for (k1, n) in [(3.0, 1), (4.5, 2), (5.6, 4), (7.0, 2)] {
            let r = subclassify(&Coupling::new(k1, 6.5, -2.0, -3.0)).unwrap();
            assert_eq!(r.exact_count, n, "k1={k1}");
        }
        // R6 sweep at (2.5, -2, 1)
        for (k1, n) in [(4.0, 1), (6.0, 3)] {
            assert_eq!(subclassify(&Coupling::new(k1, 2.5, -2.0, 1.0)).unwrap().exact_count, n);
        }
        // mirrored R7
        assert_eq!(subclassify(&Coupling::new(2.5, 6.0, 1.0, -2.0)).unwrap().exact_count, 3);
    }

    #[test]
    fn labels() {
        assert_eq!(count_label(1), "1 unsync");
        assert_eq!(count_label(4), "1 unsync + 3 sync");
    }
}
