//! The adversary as seen by an online algorithm.
//!
//! Each round is a single call that plays a decision and returns the one
//! piece of feedback the setting permits, so the feedback budget of one query
//! per round holds by construction and is audited by a counter.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::objectives::{ContinuousObjective, QuadraticDR, SetFunction, SetObjective};
use crate::point::Point;
use crate::rng::{Purpose, SeedTree};
use crate::rounding::{is_independent, Matroid};

type Generator<T> = Arc<dyn Fn(usize) -> T + Send + Sync>;

/// A horizon-length sequence of objectives, indexed by 0-based round.
#[derive(Clone)]
pub struct ObjectiveSequence<T> {
    horizon: usize,
    source: Source<T>,
}

#[derive(Clone)]
enum Source<T> {
    Fixed(T),
    /// Switches to the next pool entry every `period` rounds.
    Cycle {
        pool: Vec<T>,
        period: usize,
    },
    Explicit(Vec<T>),
    Generated(Generator<T>),
}

impl<T: Clone> ObjectiveSequence<T> {
    pub fn fixed(objective: T, horizon: usize) -> Self {
        ObjectiveSequence { horizon, source: Source::Fixed(objective) }
    }

    pub fn shifting(pool: Vec<T>, period: usize, horizon: usize) -> Result<Self> {
        if pool.is_empty() || period == 0 {
            return Err(Error::InvalidParameter("shifting needs a non-empty pool and period ≥ 1".into()));
        }
        Ok(ObjectiveSequence { horizon, source: Source::Cycle { pool, period } })
    }

    pub fn explicit(objectives: Vec<T>) -> Self {
        ObjectiveSequence { horizon: objectives.len(), source: Source::Explicit(objectives) }
    }

    /// Objective of round `t` is `generator(t)`; must be deterministic.
    pub fn generated<G>(generator: G, horizon: usize) -> Self
    where
        G: Fn(usize) -> T + Send + Sync + 'static,
    {
        ObjectiveSequence { horizon, source: Source::Generated(Arc::new(generator)) }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Objective of 0-based round `t`.
    pub fn at(&self, t: usize) -> T {
        match &self.source {
            Source::Fixed(f) => f.clone(),
            Source::Cycle { pool, period } => pool[(t / period) % pool.len()].clone(),
            Source::Explicit(v) => v[t].clone(),
            Source::Generated(g) => g(t),
        }
    }

    /// The sequence restricted to its first `horizon` rounds.
    pub fn truncated(&self, horizon: usize) -> Self {
        ObjectiveSequence { horizon: horizon.min(self.horizon), source: self.source.clone() }
    }

    /// The distinct objectives when the sequence is fixed or cyclic, with
    /// their multiplicities over the horizon.
    pub fn distinct_with_counts(&self) -> Option<Vec<(T, usize)>> {
        match &self.source {
            Source::Fixed(f) => Some(vec![(f.clone(), self.horizon)]),
            Source::Cycle { pool, period } => {
                let mut counts = vec![0usize; pool.len()];
                for (chunk, c) in (0..self.horizon).step_by(*period).zip((0..pool.len()).cycle()) {
                    counts[c] += (*period).min(self.horizon - chunk);
                }
                Some(pool.iter().cloned().zip(counts).filter(|(_, c)| *c > 0).collect())
            }
            _ => None,
        }
    }
}

/// Objectives of either setting.
#[derive(Clone)]
pub enum Objectives {
    Continuous(ObjectiveSequence<QuadraticDR>),
    Set(ObjectiveSequence<SetFunction>),
}

impl Objectives {
    pub fn horizon(&self) -> usize {
        match self {
            Objectives::Continuous(s) => s.horizon(),
            Objectives::Set(s) => s.horizon(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientFeedback {
    pub reward: f64,
    pub gradient: Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetFeedback {
    /// `f_t(Y)`, observed even when `Y` is not independent.
    pub observed: f64,
    /// `f_t(Y)` if `Y` is independent, else 0.
    pub reward: f64,
    pub independent: bool,
}

/// Online environment: reveals one objective per round, exactly one feedback
/// query per round.
#[derive(Clone)]
pub struct AdversaryEnv {
    objectives: Objectives,
    seeds: SeedTree,
    round: usize,
    queries: usize,
}

impl AdversaryEnv {
    /// `seeds` drives the stochastic-gradient noise.
    pub fn new(objectives: Objectives, seeds: SeedTree) -> Self {
        AdversaryEnv { objectives, seeds, round: 0, queries: 0 }
    }

    pub fn continuous(sequence: ObjectiveSequence<QuadraticDR>, seeds: SeedTree) -> Self {
        Self::new(Objectives::Continuous(sequence), seeds)
    }

    pub fn set(sequence: ObjectiveSequence<SetFunction>, seeds: SeedTree) -> Self {
        Self::new(Objectives::Set(sequence), seeds)
    }

    pub fn horizon(&self) -> usize {
        self.objectives.horizon()
    }

    /// Rounds played so far.
    pub fn rounds_played(&self) -> usize {
        self.round
    }

    /// Feedback queries answered so far.
    pub fn queries(&self) -> usize {
        self.queries
    }

    /// Full offline view of the sequence; benchmark computation only.
    pub fn objectives(&self) -> &Objectives {
        &self.objectives
    }

    fn begin_round(&mut self) -> Result<usize> {
        if self.round >= self.horizon() {
            return Err(Error::EnvExhausted { rounds: self.round });
        }
        if self.queries != self.round {
            return Err(Error::BudgetExceeded { round: self.round });
        }
        let t = self.round;
        self.round += 1;
        self.queries += 1;
        Ok(t)
    }

    fn continuous_at(&self, t: usize) -> Result<QuadraticDR> {
        match &self.objectives {
            Objectives::Continuous(s) => Ok(s.at(t)),
            Objectives::Set(_) => Err(Error::Unsupported("continuous feedback from a set-function adversary".into())),
        }
    }

    /// Plays `played`, earns `F_t(played)` and observes one stochastic
    /// gradient at `probe`.
    pub fn play_gradient(&mut self, played: &[f64], probe: &[f64]) -> Result<GradientFeedback> {
        let t = self.begin_round()?;
        let f = self.continuous_at(t)?;
        let reward = f.value(played)?;
        let mut rng = self.seeds.stream(Purpose::GradientNoise, t as u64, 0);
        let gradient = f.stoch_grad(probe, &mut rng)?;
        Ok(GradientFeedback { reward, gradient })
    }

    /// Plays `played` and observes (and earns) `F_t(played)`.
    pub fn play_value(&mut self, played: &[f64]) -> Result<f64> {
        let t = self.begin_round()?;
        self.continuous_at(t)?.value(played)
    }

    /// Responsive set play: `f_t(Y)` is always observed; the reward is zero
    /// when `Y` is not independent in `matroid`.
    pub fn play_set(&mut self, played: &[bool], matroid: &Matroid) -> Result<SetFeedback> {
        let t = self.begin_round()?;
        let f = match &self.objectives {
            Objectives::Set(s) => s.at(t),
            Objectives::Continuous(_) => {
                return Err(Error::Unsupported("set feedback from a continuous adversary".into()))
            }
        };
        crate::error::check_dim(f.ground_size(), played.len())?;
        let observed = f.value(played);
        let independent = is_independent(matroid, played);
        Ok(SetFeedback { observed, reward: if independent { observed } else { 0.0 }, independent })
    }
}
