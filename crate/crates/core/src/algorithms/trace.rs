use serde::Serialize;

use crate::point::Point;

/// `1 − 1/e`.
pub const DISCOUNT: f64 = 1.0 - 0.367_879_441_171_442_33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Exploit,
    Explore,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Exploit => "exploit",
            Phase::Explore => "explore",
        }
    }
}

/// What was played in a round.
#[derive(Debug, Clone, PartialEq)]
pub enum Played {
    Point(Point),
    Set(Vec<bool>),
}

/// One round of an online run.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based round index.
    pub t: usize,
    /// 1-based block index.
    pub block: usize,
    /// Inner index `k'` consumed by this round; 0 for pure exploitation.
    pub inner: usize,
    pub phase: Phase,
    pub played: Played,
    pub reward: f64,
    pub feasible: bool,
}

/// Parameters actually used by a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockPlan {
    /// Requested horizon `T`.
    pub horizon: usize,
    /// `Q·K` (full-information) or `Q·L` (bandit); rounds actually played.
    pub t_effective: usize,
    /// `Q`.
    pub blocks: usize,
    /// `K`: Frank-Wolfe steps per block.
    pub steps: usize,
    /// `L`: rounds per block (`= K` for the full-information algorithm).
    pub block_len: usize,
    /// `η = 1/K`.
    pub eta: f64,
    /// Smoothing radius (bandit algorithms only).
    pub delta: Option<f64>,
    /// Interior shrink factor (bandit algorithms only).
    pub alpha: Option<f64>,
}

/// Per-round record of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub algorithm: &'static str,
    pub records: Vec<RoundRecord>,
    pub plan: BlockPlan,
    /// The environment ran out before `t_effective` rounds.
    pub truncated: bool,
    /// Feedback queries answered by the environment during the run.
    pub queries: usize,
}

impl RegretTrace {
    pub fn cumulative_reward(&self) -> f64 {
        self.records.iter().map(|r| r.reward).sum()
    }

    pub fn all_feasible(&self) -> bool {
        self.records.iter().all(|r| r.feasible)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Cumulative `(1 − 1/e)`-regret.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretCurve {
    /// `R_s = (1 − 1/e)·benchmark·s/T − Σ_{t≤s} reward_t`.
    pub prefix: Vec<f64>,
    /// `(1 − 1/e)·benchmark − Σ reward`.
    pub final_regret: f64,
}

/// Regret of `trace` against `benchmark = max_x Σ_t F_t(x)` over the
/// trace's rounds.
pub fn compute_regret(trace: &RegretTrace, benchmark: f64) -> RegretCurve {
    regret_from_rewards(trace.records.iter().map(|r| r.reward), trace.len(), benchmark)
}

pub(crate) fn regret_from_rewards<I: Iterator<Item = f64>>(rewards: I, horizon: usize, benchmark: f64) -> RegretCurve {
    let target = DISCOUNT * benchmark;
    let mut cum = 0.0;
    let prefix: Vec<f64> = rewards
        .enumerate()
        .map(|(s, r)| {
            cum += r;
            target * (s + 1) as f64 / horizon as f64 - cum
        })
        .collect();
    RegretCurve { prefix, final_regret: target - cum }
}
