//! The biphasic (explore/exploit) skeleton shared by the continuous bandit and
//! the responsive set algorithms.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::env::AdversaryEnv;
use super::trace::{BlockPlan, Phase, Played, RegretTrace, RoundRecord};
use crate::error::{check_dim, Error, Result};
use crate::estimators::{momentum_update, one_point_grad, rho_schedule_bandit, MomentumEstimate, SmoothingSpec};
use crate::geometry::{InteriorSet, DEFAULT_TOL};
use crate::oracles::OracleBank;
use crate::point::Point;
use crate::rng::{Purpose, SeedTree};
use crate::rounding::{pipage_round, random_round, Matroid};

struct Outcome {
    played: Played,
    reward: f64,
    feasible: bool,
}

/// How a round turns a fractional point into a play.
trait Player {
    /// Probe `x + δu`; returns the gradient sample and the round outcome.
    fn explore(
        &mut self,
        env: &mut AdversaryEnv,
        x: &Point,
        spec: SmoothingSpec,
        sphere: &mut ChaCha8Rng,
        rounding: &mut ChaCha8Rng,
    ) -> Result<(Point, Outcome)>;

    fn exploit(&mut self, env: &mut AdversaryEnv, x: &Point, rounding: &mut ChaCha8Rng) -> Result<Outcome>;
}

struct ContinuousPlayer<'a> {
    interior: &'a InteriorSet,
}

impl Player for ContinuousPlayer<'_> {
    fn explore(
        &mut self,
        env: &mut AdversaryEnv,
        x: &Point,
        spec: SmoothingSpec,
        sphere: &mut ChaCha8Rng,
        _rounding: &mut ChaCha8Rng,
    ) -> Result<(Point, Outcome)> {
        let est = one_point_grad(|y| env.play_value(y), x, spec, sphere)?;
        let feasible = self.interior.base().contains(&est.probe, DEFAULT_TOL)?;
        let outcome = Outcome { reward: est.observed, played: Played::Point(est.probe), feasible };
        Ok((est.grad, outcome))
    }

    fn exploit(&mut self, env: &mut AdversaryEnv, x: &Point, _rounding: &mut ChaCha8Rng) -> Result<Outcome> {
        let reward = env.play_value(x)?;
        let feasible = self.interior.base().contains(x, DEFAULT_TOL)?;
        Ok(Outcome { played: Played::Point(x.clone()), reward, feasible })
    }
}

struct ResponsivePlayer<'a> {
    matroid: &'a Matroid,
}

impl Player for ResponsivePlayer<'_> {
    fn explore(
        &mut self,
        env: &mut AdversaryEnv,
        x: &Point,
        spec: SmoothingSpec,
        sphere: &mut ChaCha8Rng,
        rounding: &mut ChaCha8Rng,
    ) -> Result<(Point, Outcome)> {
        let mut outcome = None;
        let est = one_point_grad(
            |y| {
                let set = random_round(y, rounding)?;
                let fb = env.play_set(&set, self.matroid)?;
                outcome = Some(Outcome { played: Played::Set(set), reward: fb.reward, feasible: fb.independent });
                Ok(fb.observed)
            },
            x,
            spec,
            sphere,
        )?;
        Ok((est.grad, outcome.expect("probe callback ran once")))
    }

    fn exploit(&mut self, env: &mut AdversaryEnv, x: &Point, rounding: &mut ChaCha8Rng) -> Result<Outcome> {
        let set = pipage_round(x, self.matroid, rounding)?;
        let fb = env.play_set(&set, self.matroid)?;
        Ok(Outcome { played: Played::Set(set), reward: fb.reward, feasible: fb.independent })
    }
}

fn biphasic_run<P: Player>(
    name: &'static str,
    env: &mut AdversaryEnv,
    interior: &InteriorSet,
    bank: &mut OracleBank,
    plan: &BlockPlan,
    seeds: &SeedTree,
    player: &mut P,
) -> Result<RegretTrace> {
    let (k_steps, block_len) = (plan.steps, plan.block_len);
    if bank.len() != k_steps {
        return Err(Error::InvalidParameter(format!("bank has {} oracles, plan needs K = {k_steps}", bank.len())));
    }
    if k_steps == 0 || k_steps > block_len {
        return Err(Error::InvalidParameter("need 1 ≤ K ≤ L".into()));
    }
    if plan.delta.is_some_and(|delta| (delta - interior.delta()).abs() > 1e-15 * delta.max(1.0)) {
        return Err(Error::InvalidParameter("plan and interior disagree on delta".into()));
    }
    let d = interior.dim();
    let spec = SmoothingSpec::new(interior.delta(), d)?;
    let lower = interior.lower_bound().clone();
    let mut records = Vec::with_capacity(plan.t_effective);
    let mut truncated = false;

    'blocks: for q in 0..plan.blocks {
        // x^{(k+1)} = x^{(k)} + η (v^{(k)} − u̲), x^{(1)} = u̲
        let mut iterates = Vec::with_capacity(k_steps);
        let mut x = lower.clone();
        for k in 0..k_steps {
            iterates.push(x.clone());
            let v = bank.predict(k)?;
            check_dim(d, v.dim())?;
            for i in 0..d {
                x[i] += plan.eta * (v[i] - lower[i]);
            }
        }
        let exploit_point = x;

        // First K entries of a uniform permutation of the L slots explore,
        // the entry at position k carrying inner index k + 1.
        let mut perm: Vec<usize> = (0..block_len).collect();
        perm.shuffle(&mut seeds.stream(Purpose::Permutation, q as u64, 0));
        let mut role: Vec<Option<usize>> = vec![None; block_len];
        for (k, &slot) in perm.iter().take(k_steps).enumerate() {
            role[slot] = Some(k);
        }

        let mut grads: Vec<Option<Point>> = vec![None; k_steps];
        for (slot, assigned) in role.iter().enumerate() {
            let mut rounding = seeds.stream(Purpose::Rounding, q as u64, slot as u64);
            let result = match assigned {
                Some(k) => {
                    let mut sphere = seeds.stream(Purpose::Sphere, q as u64, *k as u64);
                    player.explore(env, &iterates[*k], spec, &mut sphere, &mut rounding).map(|(g, out)| {
                        grads[*k] = Some(g);
                        (Phase::Explore, k + 1, out)
                    })
                }
                None => player.exploit(env, &exploit_point, &mut rounding).map(|out| (Phase::Exploit, 0, out)),
            };
            let (phase, inner, out) = match result {
                Ok(r) => r,
                Err(Error::EnvExhausted { .. }) => {
                    truncated = true;
                    break 'blocks;
                }
                Err(e) => return Err(e),
            };
            records.push(RoundRecord {
                t: q * block_len + slot + 1,
                block: q + 1,
                inner,
                phase,
                played: out.played,
                reward: out.reward,
                feasible: out.feasible,
            });
        }

        let mut momentum = MomentumEstimate::zero(d);
        for (k, g) in grads.iter().enumerate() {
            let g = g.as_ref().expect("each inner index explores once per block");
            momentum = momentum_update(&momentum, g, rho_schedule_bandit(k + 1)?)?;
            bank.feed(k, &momentum.d_vec)?;
        }
    }

    Ok(RegretTrace { algorithm: name, records, plan: *plan, truncated, queries: env.queries() })
}

/// Bandit Frank-Wolfe on the δ-interior `interior` of a continuous
/// constraint set; the environment answers only `F_t(y_t)`.
pub fn bandit_fw_run(
    env: &mut AdversaryEnv,
    interior: &InteriorSet,
    bank: &mut OracleBank,
    plan: &BlockPlan,
    seeds: &SeedTree,
) -> Result<RegretTrace> {
    biphasic_run("bandit_fw", env, interior, bank, plan, seeds, &mut ContinuousPlayer { interior })
}

/// Responsive bandit Frank-Wolfe for monotone submodular set functions under
/// `matroid`; `interior` must be a δ-interior of the matroid polytope.
pub fn responsive_fw_run(
    env: &mut AdversaryEnv,
    interior: &InteriorSet,
    bank: &mut OracleBank,
    plan: &BlockPlan,
    matroid: &Matroid,
    seeds: &SeedTree,
) -> Result<RegretTrace> {
    if &matroid.polytope() != interior.base() {
        return Err(Error::InvalidParameter("interior is not built on the matroid polytope".into()));
    }
    biphasic_run("responsive_fw", env, interior, bank, plan, seeds, &mut ResponsivePlayer { matroid })
}
