//! Routing of collision-free input patterns onto the canonical input
//! `|1, ..., 1, 0, ..., 0>` with adjacent-mode swap gadgets.
//!
//! A swap gadget is a beam splitter with `theta = pi/2`, `phi = 0`, followed by
//! a phase shifter `gamma = -pi/2` on both modes. The shifters cancel the
//! factor `i` picked up on transmission, so the gadget is the exact
//! permutation `[[0, 1], [1, 0]]`.
//!
//! Mode indices in this module are 1-based, matching the `route` command and
//! its JSON output. A gadget on `i` acts on modes `i` and `i + 1`.
//!
//! ```
//! use pqf::linalg::FockPattern;
//! use pqf::routing::{plan_routing, routing_unitary};
//!
//! let pattern = FockPattern::new(vec![0, 0, 1, 1, 1]);
//! let plan = plan_routing(&pattern).unwrap();
//! assert_eq!(plan.gadgets.len(), 6);
//! assert_eq!(plan.apply(&pattern).unwrap(), FockPattern::canonical(5, 3).unwrap());
//! let u = routing_unitary(&plan).unwrap();
//! assert_eq!(u.matrix()[(0, 2)].re, 1.0);
//! ```

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, FockPattern, Unitary};

/// Two-mode element on modes `(i, i + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapGadget {
    pub i: usize,
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
}

impl SwapGadget {
    pub fn new(i: usize) -> Self {
        Self {
            i,
            theta: FRAC_PI_2,
            phi: 0.0,
            gamma: -FRAC_PI_2,
        }
    }

    pub fn is_exact_swap(&self) -> bool {
        self.theta == FRAC_PI_2 && self.phi == 0.0 && self.gamma == -FRAC_PI_2
    }

    /// The 2x2 block acting on modes `(i, i + 1)`.
    pub fn block(&self) -> [[Complex64; 2]; 2] {
        if self.is_exact_swap() {
            let (zero, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
            return [[zero, one], [one, zero]];
        }
        two_mode_block(self.theta, self.phi, self.gamma)
    }
}

/// Beam splitter `(theta, phi)` followed by phase `e^{i gamma}` on both modes.
pub fn two_mode_block(theta: f64, phi: f64, gamma: f64) -> [[Complex64; 2]; 2] {
    let bs = Unitary::beam_splitter(theta, phi);
    let shift = Complex64::from_polar(1.0, gamma);
    let b = bs.matrix();
    [
        [shift * b[(0, 0)], shift * b[(0, 1)]],
        [shift * b[(1, 0)], shift * b[(1, 1)]],
    ]
}

fn embed(m: usize, i: usize, block: [[Complex64; 2]; 2]) -> Result<ComplexMatrix> {
    if i == 0 || i >= m {
        return Err(Error::InvalidInput(format!(
            "gadget on modes ({i}, {}) outside 1..={m}",
            i + 1
        )));
    }
    let mut out = ComplexMatrix::identity(m);
    let a = i - 1;
    for (r, row) in block.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            out[(a + r, a + c)] = v;
        }
    }
    Ok(out)
}

/// `m x m` identity with the swap gadget on modes `(i, i + 1)`.
pub fn gadget_unitary(m: usize, i: usize) -> Result<Unitary> {
    Unitary::new(embed(m, i, SwapGadget::new(i).block())?)
}

/// Gadgets in the order photons meet them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingPlan {
    pub m: usize,
    pub gadgets: Vec<SwapGadget>,
}

impl RoutingPlan {
    /// Move photons through the gadgets.
    pub fn apply(&self, pattern: &FockPattern) -> Result<FockPattern> {
        if pattern.modes() != self.m {
            return Err(Error::Shape(format!(
                "pattern has {} modes, plan {}",
                pattern.modes(),
                self.m
            )));
        }
        let mut occ = pattern.occupations().to_vec();
        for g in &self.gadgets {
            if g.i == 0 || g.i >= self.m {
                return Err(Error::InvalidInput(format!(
                    "gadget on mode {} outside 1..{}",
                    g.i, self.m
                )));
            }
            if !g.is_exact_swap() {
                return Err(Error::Unsupported(
                    "only exact swap gadgets move photons deterministically".into(),
                ));
            }
            occ.swap(g.i - 1, g.i);
        }
        Ok(FockPattern::new(occ))
    }
}

/// Greedy plan: for each target position in turn, bring the nearest occupied
/// mode at or after it down one step at a time.
pub fn plan_routing(pattern: &FockPattern) -> Result<RoutingPlan> {
    if !pattern.is_collision_free() {
        return Err(Error::Unsupported(format!("pattern {pattern:?} has collisions")));
    }
    let mut gadgets = Vec::new();
    for (target, source) in pattern.photon_modes().into_iter().enumerate() {
        // 1-based gadget `j` swaps 0-based modes `j - 1` and `j`.
        gadgets.extend((target + 1..=source).rev().map(SwapGadget::new));
    }
    Ok(RoutingPlan {
        m: pattern.modes(),
        gadgets,
    })
}

/// `G_last ... G_first`, the interferometer realising the plan.
pub fn routing_unitary(plan: &RoutingPlan) -> Result<Unitary> {
    let mut total = ComplexMatrix::identity(plan.m);
    for g in &plan.gadgets {
        total = embed(plan.m, g.i, g.block())?.matmul(&total)?;
    }
    Unitary::new(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gadget_is_exact_swap() {
        let u = gadget_unitary(2, 1).unwrap();
        let x = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(u.matrix(), &x);
        assert!(gadget_unitary(2, 2).is_err());
        assert!(gadget_unitary(3, 0).is_err());
    }

    #[test]
    fn gadget_is_involution() {
        let g = gadget_unitary(4, 2).unwrap();
        let sq = &g * &g;
        assert!(sq.matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn formula_matches_exact_block() {
        let b = two_mode_block(FRAC_PI_2, 0.0, -FRAC_PI_2);
        let exact = SwapGadget::new(1).block();
        for r in 0..2 {
            for c in 0..2 {
                assert!((b[r][c] - exact[r][c]).norm() < 1e-15);
            }
        }
        let bare = Unitary::beam_splitter(FRAC_PI_2, 0.0);
        assert!((bare.matrix()[(0, 1)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((bare.matrix()[(1, 0)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn small_plans() {
        let canon = FockPattern::canonical(4, 2).unwrap();
        assert!(plan_routing(&canon).unwrap().gadgets.is_empty());
        let p = plan_routing(&FockPattern::new(vec![0, 1])).unwrap();
        assert_eq!(p.gadgets, vec![SwapGadget::new(1)]);
        let u = routing_unitary(&p).unwrap();
        assert_eq!(u.matrix(), gadget_unitary(2, 1).unwrap().matrix());
        let empty = RoutingPlan { m: 3, gadgets: vec![] };
        assert_eq!(routing_unitary(&empty).unwrap().matrix(), &ComplexMatrix::identity(3));
    }

    #[test]
    fn three_photon_example() {
        let pattern = FockPattern::new(vec![0, 0, 1, 1, 1]);
        let plan = plan_routing(&pattern).unwrap();
        let modes: Vec<usize> = plan.gadgets.iter().map(|g| g.i).collect();
        assert_eq!(modes, vec![2, 1, 3, 2, 4, 3]);
        let u = routing_unitary(&plan).unwrap();
        for (src, dst) in [(2, 0), (3, 1), (4, 2)] {
            assert_eq!(u.matrix()[(dst, src)], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn collisions_rejected() {
        assert!(matches!(
            plan_routing(&FockPattern::new(vec![2, 0, 1])),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn gadget_json_fields() {
        let json = serde_json::to_value(SwapGadget::new(3)).unwrap();
        assert_eq!(json["i"], 3);
        assert_eq!(json["phi"], 0.0);
        assert_eq!(json["gamma"], -FRAC_PI_2);
    }
}
