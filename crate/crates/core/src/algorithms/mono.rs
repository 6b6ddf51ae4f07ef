use rand::seq::SliceRandom;

use super::env::AdversaryEnv;
use super::trace::{BlockPlan, Phase, Played, RegretTrace, RoundRecord};
use crate::error::{Error, Result};
use crate::estimators::{momentum_update, rho_schedule_mono, MomentumEstimate};
use crate::geometry::{ConstraintSet, DEFAULT_TOL};
use crate::oracles::OracleBank;
use crate::point::Point;
use crate::rng::{Purpose, SeedTree};

/// Full-information online Frank-Wolfe with one stochastic gradient per round.
///
/// In block `q` the `K` oracle predictions build `x^{(k+1)} = x^{(k)} + v^{(k)}/K`
/// from `x^{(1)} = 0`, and `x_q = x^{(K+1)}` is played for all `K` rounds. A
/// uniform permutation assigns round slot `j` the inner index `perm[j]`, and
/// that round's single gradient query is made at `x^{(perm[j])}`. After the
/// block the momentum estimates `d^{(k)}` are formed in inner-index order and
/// fed to oracle `k`.
pub fn mono_fw_run(
    env: &mut AdversaryEnv,
    set: &ConstraintSet,
    bank: &mut OracleBank,
    plan: &BlockPlan,
    seeds: &SeedTree,
) -> Result<RegretTrace> {
    let k_steps = plan.steps;
    if bank.len() != k_steps {
        return Err(Error::InvalidParameter(format!("bank has {} oracles, plan needs K = {k_steps}", bank.len())));
    }
    if plan.block_len != k_steps {
        return Err(Error::InvalidParameter("mono_fw needs L = K".into()));
    }
    let d = set.dim();
    let eta = plan.eta;
    let mut records = Vec::with_capacity(plan.t_effective);
    let mut truncated = false;

    'blocks: for q in 0..plan.blocks {
        let mut iterates = Vec::with_capacity(k_steps + 1);
        let mut x = Point::zeros(d);
        let mut vertices = Vec::with_capacity(k_steps);
        for k in 0..k_steps {
            iterates.push(x.clone());
            let v = bank.predict(k)?;
            x.axpy(eta, &v);
            vertices.push(v);
        }
        let played = x;
        let feasible = set.contains(&played, DEFAULT_TOL)?;

        let mut perm: Vec<usize> = (0..k_steps).collect();
        perm.shuffle(&mut seeds.stream(Purpose::Permutation, q as u64, 0));

        let mut grads: Vec<Option<Point>> = vec![None; k_steps];
        for (slot, &k) in perm.iter().enumerate() {
            let fb = match env.play_gradient(&played, &iterates[k]) {
                Ok(fb) => fb,
                Err(Error::EnvExhausted { .. }) => {
                    truncated = true;
                    break 'blocks;
                }
                Err(e) => return Err(e),
            };
            records.push(RoundRecord {
                t: q * k_steps + slot + 1,
                block: q + 1,
                inner: k + 1,
                phase: Phase::Exploit,
                played: Played::Point(played.clone()),
                reward: fb.reward,
                feasible,
            });
            grads[k] = Some(fb.gradient);
        }

        let mut momentum = MomentumEstimate::zero(d);
        for (k, g) in grads.iter().enumerate() {
            let g = g.as_ref().expect("each inner index is consumed once per block");
            momentum = momentum_update(&momentum, g, rho_schedule_mono(k + 1, k_steps)?)?;
            bank.feed(k, &momentum.d_vec)?;
        }
    }

    Ok(RegretTrace { algorithm: "mono_fw", records, plan: *plan, truncated, queries: env.queries() })
}
