//! Online Frank-Wolfe algorithms.
//!
//! * [`mono_fw_run`]: full-information setting, one stochastic gradient per
//!   round, blocks of `K` rounds with a random assignment of inner steps.
//! * [`bandit_fw_run`]: value feedback only; each block of `L` rounds spends
//!   `K` randomly placed rounds probing one-point gradients on a δ-interior.
//! * [`responsive_fw_run`]: the bandit skeleton on multilinear extensions,
//!   probing with independent rounding and exploiting with pipage rounding.
//! * [`offline_fw`]: the classical offline baseline started from the origin.

mod bandit;
mod env;
mod mono;
mod trace;

pub use bandit::{bandit_fw_run, responsive_fw_run};
pub use env::{AdversaryEnv, GradientFeedback, ObjectiveSequence, Objectives, SetFeedback};
pub use mono::mono_fw_run;
pub use trace::{compute_regret, BlockPlan, Phase, Played, RegretCurve, RegretTrace, RoundRecord, DISCOUNT};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{shrink_interior, ConstraintSet, InteriorSet};
use crate::point::Point;

/// Optional replacements for the derived schedule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(default)]
    pub delta: Option<f64>,
    /// `K`.
    #[serde(default)]
    pub k: Option<usize>,
    /// `L`.
    #[serde(default)]
    pub l: Option<usize>,
}

/// `⌊t^exponent⌋`, nudged so exact powers (e.g. `(10^5)^{3/5} = 10^3`) are
/// not lost to rounding.
fn floor_pow(t: usize, exponent: f64) -> usize {
    let v = (t as f64).powf(exponent);
    (v * (1.0 + 1e-12)).floor() as usize
}

/// Full-information schedule: `K = ⌊T^{3/5}⌋` rounded down to even,
/// `Q = ⌊T/K⌋`, `η = 1/K`.
pub fn derive_params_mono(horizon: usize) -> Result<BlockPlan> {
    derive_params_mono_with(horizon, &ParamOverrides::default())
}

pub fn derive_params_mono_with(horizon: usize, overrides: &ParamOverrides) -> Result<BlockPlan> {
    if overrides.delta.is_some() || overrides.l.is_some() {
        return Err(Error::InvalidParameter("mono_fw accepts only a K override".into()));
    }
    let steps = match overrides.k {
        Some(k) if k < 2 || k % 2 == 1 => {
            return Err(Error::InvalidParameter(format!("K override must be even and ≥ 2, got {k}")))
        }
        Some(k) => k,
        None => {
            let k = floor_pow(horizon, 0.6);
            k - k % 2
        }
    };
    if steps < 2 || steps > horizon {
        return Err(Error::HorizonTooSmall(format!("T = {horizon} gives K = {steps}; need 2 ≤ K ≤ T")));
    }
    let blocks = horizon / steps;
    Ok(BlockPlan {
        horizon,
        t_effective: blocks * steps,
        blocks,
        steps,
        block_len: steps,
        eta: 1.0 / steps as f64,
        delta: None,
        alpha: None,
    })
}

/// Bandit schedule on the shrink-and-translate interior of `set`:
/// `L = ⌊T^{7/9}⌋`, `K = min(⌊T^{2/3}⌋, L)`, `Q = ⌊T/L⌋`,
/// `δ = r/(√d + 2)·(QL)^{−1/9}`.
pub fn derive_params_bandit(horizon: usize, set: &ConstraintSet) -> Result<(BlockPlan, InteriorSet)> {
    derive_params_bandit_with(horizon, set, &ParamOverrides::default())
}

pub fn derive_params_bandit_with(
    horizon: usize,
    set: &ConstraintSet,
    overrides: &ParamOverrides,
) -> Result<(BlockPlan, InteriorSet)> {
    if horizon == 0 {
        return Err(Error::HorizonTooSmall("T must be ≥ 1".into()));
    }
    let block_len = overrides.l.unwrap_or_else(|| floor_pow(horizon, 7.0 / 9.0));
    let steps = overrides.k.unwrap_or_else(|| floor_pow(horizon, 2.0 / 3.0).min(block_len));
    if block_len == 0 || block_len > horizon {
        return Err(Error::HorizonTooSmall(format!("block length L = {block_len} must lie in 1..={horizon}")));
    }
    if steps == 0 || steps > block_len {
        return Err(Error::InvalidParameter(format!("need 1 ≤ K ≤ L, got K = {steps}, L = {block_len}")));
    }
    let blocks = horizon / block_len;
    let t_effective = blocks * block_len;
    let d = set.dim() as f64;
    let delta = overrides
        .delta
        .unwrap_or_else(|| set.inscribed_orthant_radius() / (d.sqrt() + 2.0) * (t_effective as f64).powf(-1.0 / 9.0));
    let interior = shrink_interior(set, delta)?;
    let plan = BlockPlan {
        horizon,
        t_effective,
        blocks,
        steps,
        block_len,
        eta: 1.0 / steps as f64,
        delta: Some(delta),
        alpha: Some(interior.alpha()),
    };
    Ok((plan, interior))
}

/// Offline Frank-Wolfe from `x = 0`: `x ← x + lmo(∇F(x))/iters`, `iters`
/// times. The output is a convex combination of vertices and hence in `set`.
pub fn offline_fw<G>(mut grad: G, set: &ConstraintSet, iters: usize) -> Result<Point>
where
    G: FnMut(&[f64]) -> Result<Point>,
{
    if iters == 0 {
        return Err(Error::InvalidParameter("offline Frank-Wolfe needs ≥ 1 iteration".into()));
    }
    let step = 1.0 / iters as f64;
    let mut x = Point::zeros(set.dim());
    for _ in 0..iters {
        let v = set.lmo(&grad(&x)?)?;
        x.axpy(step, &v);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{ContinuousObjective, QuadraticDR};

    #[test]
    fn mono_params_examples() {
        let p = derive_params_mono(100_000).unwrap();
        assert_eq!((p.steps, p.blocks, p.t_effective), (1000, 100, 100_000));
        assert_eq!(p.eta, 1e-3);
        let p = derive_params_mono(1025).unwrap();
        assert_eq!((p.steps, p.blocks, p.t_effective), (64, 16, 1024));
        let p = derive_params_mono(10).unwrap();
        assert_eq!((p.steps, p.blocks, p.t_effective), (2, 5, 10));
        assert!(matches!(derive_params_mono(3), Err(Error::HorizonTooSmall(_))));
        assert!(derive_params_mono_with(100, &ParamOverrides { k: Some(7), ..Default::default() }).is_err());
        let p = derive_params_mono_with(100, &ParamOverrides { k: Some(10), ..Default::default() }).unwrap();
        assert_eq!((p.steps, p.blocks), (10, 10));
    }

    #[test]
    fn bandit_params_examples() {
        let set = ConstraintSet::unit_box(2).unwrap();
        let (p, interior) = derive_params_bandit(1_000_000_000, &set).unwrap();
        assert_eq!((p.block_len, p.steps, p.blocks), (10_000_000, 1_000_000, 100));
        let delta = p.delta.unwrap();
        assert!((delta - 0.1 / (2f64.sqrt() + 2.0)).abs() < 1e-12);
        assert!((delta - 0.029289).abs() < 1e-6);
        assert!((interior.alpha() - 0.070711).abs() < 1e-6);
        assert!(interior.alpha() < 1.0);
    }

    #[test]
    fn bandit_params_gate_invalid_interiors() {
        let tiny = ConstraintSet::unit_box_with([1e-3, 1.0]).unwrap();
        let err = derive_params_bandit_with(1000, &tiny, &ParamOverrides { delta: Some(0.01), ..Default::default() })
            .unwrap_err();
        assert!(matches!(err, Error::DeltaTooLarge { .. }));
        assert!(derive_params_bandit(0, &tiny).is_err());
        let over = ParamOverrides { k: Some(50), l: Some(10), ..Default::default() };
        assert!(derive_params_bandit_with(1000, &tiny, &over).is_err());
    }

    #[test]
    fn offline_fw_on_linear_returns_lmo_vertex() {
        let set = ConstraintSet::uniform_matroid(2, 4).unwrap();
        let c = Point::from([0.3, 0.1, 0.9, 0.5]);
        let x = offline_fw(|_| Ok(c.clone()), &set, 37).unwrap();
        let v = set.lmo(&c).unwrap();
        for i in 0..4 {
            assert!((x[i] - v[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn offline_fw_on_box_quadratic_approaches_clipped_maximum() {
        let q = QuadraticDR::new(Point::from([2.0, 2.0]), vec![-1.0, 0.0, 0.0, -1.0], Point::from([1.0, 1.0]), 0.0)
            .unwrap();
        let set = ConstraintSet::unit_box(2).unwrap();
        let x = offline_fw(|x| q.grad(x), &set, 1000).unwrap();
        // grid oracle over the box
        let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
        for i in 0..=200 {
            for j in 0..=200 {
                let p = [i as f64 / 200.0, j as f64 / 200.0];
                let v = q.value(&p).unwrap();
                if v > best.0 {
                    best = (v, p);
                }
            }
        }
        assert_eq!(best.1, [1.0, 1.0]);
        assert!((x[0] - 1.0).abs() < 1e-2 && (x[1] - 1.0).abs() < 1e-2);
    }
}
