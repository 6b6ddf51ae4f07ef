//! Offline benchmark `max_{x∈K} Σ_t F_t(x)` (or `max_{S∈I} Σ_t f_t(S)`).
//!
//! Set functions on at most 16 elements are maximized exhaustively. For
//! continuous objectives the summed objective is again a quadratic; it is
//! grid-searched for `d ≤ 3`, solved to a certified gap when concave, and
//! otherwise bounded from below by offline Frank-Wolfe.

use serde::Serialize;

use crate::algorithms::{offline_fw, ObjectiveSequence, Objectives};
use crate::error::{Error, Result};
use crate::geometry::ConstraintSet;
use crate::objectives::{mask_to_set, ContinuousObjective, QuadraticDR, SetFunction, SetObjective};
use crate::point::Point;
use crate::rounding::{is_independent, Matroid};

pub const EXHAUSTIVE_MAX_DIM: usize = 16;
pub const GRID_MAX_DIM: usize = 3;
pub const FW_BENCHMARK_ITERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkMode {
    Exhaustive,
    Grid,
    ConcaveQp,
    FwLowerBound,
}

impl BenchmarkMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BenchmarkMode::Exhaustive => "exhaustive",
            BenchmarkMode::Grid => "grid",
            BenchmarkMode::ConcaveQp => "concave_qp",
            BenchmarkMode::FwLowerBound => "fw_lower_bound",
        }
    }

    /// Whether the value is (up to numerical tolerance) the true maximum.
    pub fn is_exact(&self) -> bool {
        !matches!(self, BenchmarkMode::FwLowerBound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Benchmark {
    pub value: f64,
    pub mode: BenchmarkMode,
    /// Maximizer found (membership mask as 0/1 for set functions).
    pub maximizer: Vec<f64>,
    /// Certified `max − value` upper bound, when available.
    pub gap: Option<f64>,
    /// Regret computed against a lower-bound benchmark is understated.
    pub conservative: bool,
}

pub fn compute_benchmark(objectives: &Objectives, constraint: &ConstraintSet) -> Result<Benchmark> {
    match objectives {
        Objectives::Set(seq) => exhaustive_benchmark(seq, &Matroid::from_polytope(constraint)?),
        Objectives::Continuous(seq) => continuous_benchmark(&summed_quadratic(seq)?, constraint),
    }
}

/// `Σ_t F_t` as a single quadratic.
pub fn summed_quadratic(seq: &ObjectiveSequence<QuadraticDR>) -> Result<QuadraticDR> {
    if seq.horizon() == 0 {
        return Err(Error::InvalidParameter("empty objective sequence".into()));
    }
    let first = seq.at(0);
    let d = first.dim();
    let mut total = QuadraticDR::new(Point::zeros(d), vec![0.0; d * d], first.upper().clone(), 0.0)?;
    match seq.distinct_with_counts() {
        Some(items) => {
            for (f, count) in items {
                total.accumulate_scaled(&f, count as f64)?;
            }
        }
        None => {
            for t in 0..seq.horizon() {
                total.accumulate(&seq.at(t))?;
            }
        }
    }
    Ok(total)
}

pub fn exhaustive_benchmark(seq: &ObjectiveSequence<SetFunction>, matroid: &Matroid) -> Result<Benchmark> {
    let d = matroid.dim();
    if d > EXHAUSTIVE_MAX_DIM {
        return Err(Error::Unsupported(format!(
            "exhaustive benchmark needs ground set ≤ {EXHAUSTIVE_MAX_DIM}, got {d}"
        )));
    }
    let independent: Vec<(usize, Vec<bool>)> =
        (0..1usize << d).map(|mask| (mask, mask_to_set(mask, d))).filter(|(_, s)| is_independent(matroid, s)).collect();
    let mut totals = vec![0.0; independent.len()];
    let mut add = |f: &SetFunction, weight: f64| -> Result<()> {
        crate::error::check_dim(d, f.ground_size())?;
        for (acc, (_, s)) in totals.iter_mut().zip(&independent) {
            *acc += weight * f.value(s);
        }
        Ok(())
    };
    match seq.distinct_with_counts() {
        Some(items) => {
            for (f, count) in items {
                add(&f, count as f64)?;
            }
        }
        None => {
            for t in 0..seq.horizon() {
                add(&seq.at(t), 1.0)?;
            }
        }
    }
    // first maximal mask wins ties
    let mut best = 0;
    for (i, v) in totals.iter().enumerate() {
        if *v > totals[best] {
            best = i;
        }
    }
    Ok(Benchmark {
        value: totals[best],
        mode: BenchmarkMode::Exhaustive,
        maximizer: independent[best].1.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        gap: Some(0.0),
        conservative: false,
    })
}

pub fn continuous_benchmark(total: &QuadraticDR, constraint: &ConstraintSet) -> Result<Benchmark> {
    let d = constraint.dim();
    crate::error::check_dim(d, total.dim())?;
    let concave = is_negative_semidefinite(total.hessian(), d);
    let qp = if concave { Some(concave_qp(total, constraint)?) } else { None };
    if d <= GRID_MAX_DIM {
        let (x, v) = grid_search(total, constraint)?;
        // the grid can sit slightly below a certified solution; keep the better one
        let (x, v, gap) = match qp {
            Some((qx, qv, gap)) if qv > v => (qx, qv, Some(gap)),
            Some((_, _, gap)) => (x, v, Some(gap)),
            None => (x, v, None),
        };
        return Ok(Benchmark {
            value: v,
            mode: BenchmarkMode::Grid,
            maximizer: x.into_inner(),
            gap,
            conservative: false,
        });
    }
    if let Some((x, v, gap)) = qp {
        return Ok(Benchmark {
            value: v,
            mode: BenchmarkMode::ConcaveQp,
            maximizer: x.into_inner(),
            gap: Some(gap),
            conservative: false,
        });
    }
    let x = offline_fw(|x| total.grad(x), constraint, FW_BENCHMARK_ITERS)?;
    let v = total.value(&x)?;
    Ok(Benchmark {
        value: v,
        mode: BenchmarkMode::FwLowerBound,
        maximizer: x.into_inner(),
        gap: None,
        conservative: true,
    })
}

fn is_negative_semidefinite(h: &[f64], d: usize) -> bool {
    // Cholesky of −H + εI
    let trace: f64 = (0..d).map(|i| -h[i * d + i]).sum();
    let eps = 1e-12 * (trace.abs() + 1.0);
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = -h[i * d + j] + if i == j { eps } else { 0.0 };
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    true
}

/// `max_v ⟨∇Q(x), v − x⟩`; for concave `Q` this bounds `Q* − Q(x)`.
fn fw_gap(q: &QuadraticDR, set: &ConstraintSet, x: &[f64]) -> Result<f64> {
    let g = q.grad_unchecked(x);
    let v = set.lmo(&g)?;
    Ok((g.dot(&v) - g.dot(x)).max(0.0))
}

/// Accelerated projected gradient ascent with adaptive restart; returns the
/// iterate, its value and its Frank-Wolfe gap.
fn concave_qp(q: &QuadraticDR, set: &ConstraintSet) -> Result<(Point, f64, f64)> {
    let d = set.dim();
    let lip = q.hessian().iter().map(|h| h * h).sum::<f64>().sqrt();
    if lip <= f64::MIN_POSITIVE {
        let x = set.lmo(q.linear_term())?;
        let v = q.value(&x)?;
        return Ok((x, v, 0.0));
    }
    let step = 1.0 / lip;
    let scale = q.linear_term().norm().max(lip).max(1.0);
    let mut x = set.lmo(q.linear_term())?;
    let mut y = x.clone();
    let mut momentum = 1.0f64;
    let mut best = (x.clone(), q.value_unchecked(&x));
    for iter in 0..200_000 {
        let mut z = y.clone();
        z.axpy(step, &q.grad_unchecked(&y));
        let next = set.project(&z)?;
        let next_momentum = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let value = q.value_unchecked(&next);
        if value < q.value_unchecked(&x) {
            // restart
            momentum = 1.0;
            y = x.clone();
            continue;
        }
        let beta = (momentum - 1.0) / next_momentum;
        y = next.clone();
        for i in 0..d {
            y[i] += beta * (next[i] - x[i]);
        }
        x = next;
        momentum = next_momentum;
        if value > best.1 {
            best = (x.clone(), value);
        }
        if iter % 50 == 0 && fw_gap(q, set, &best.0)? <= 1e-11 * scale {
            break;
        }
    }
    let gap = fw_gap(q, set, &best.0)?;
    let value = q.value(&best.0)?;
    Ok((best.0, value, gap))
}

/// Grid search at resolution 1/50 of each coordinate cap, then a pattern
/// search along `±e_i` and `±(e_i − e_j)` refined to step `1e−4`.
fn grid_search(q: &QuadraticDR, set: &ConstraintSet) -> Result<(Point, f64)> {
    const COARSE: usize = 50;
    let d = set.dim();
    let caps = set.coordinate_caps();
    let mut best: Option<(Point, f64)> = None;
    let total = (COARSE + 1).pow(d as u32);
    for idx in 0..total {
        let mut rest = idx;
        let mut x = Point::zeros(d);
        for i in 0..d {
            x[i] = caps[i] * (rest % (COARSE + 1)) as f64 / COARSE as f64;
            rest /= COARSE + 1;
        }
        if !set.contains(&x, 0.0)? {
            continue;
        }
        let v = q.value_unchecked(&x);
        if best.as_ref().is_none_or(|b| v > b.1) {
            best = Some((x, v));
        }
    }
    let (mut x, mut v) = best.expect("the origin is always on the grid");
    let mut directions = Vec::new();
    for i in 0..d {
        directions.push(Point::basis(d, i));
        directions.push(Point::basis(d, i).scaled(-1.0));
        for j in 0..d {
            if i != j {
                let mut e = Point::basis(d, i);
                e[j] = -1.0;
                directions.push(e);
            }
        }
    }
    let mut step = caps.iter().cloned().fold(0.0, f64::max) / COARSE as f64;
    while step >= 1e-4 {
        let mut improved = true;
        while improved {
            improved = false;
            for e in &directions {
                let mut y = x.clone();
                y.axpy(step, e);
                if set.contains(&y, 0.0)? {
                    let w = q.value_unchecked(&y);
                    if w > v {
                        x = y;
                        v = w;
                        improved = true;
                    }
                }
            }
        }
        step *= 0.5;
    }
    Ok((x, v))
}
