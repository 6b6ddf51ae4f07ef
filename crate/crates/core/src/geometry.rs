//! Down-closed constraint sets, their linear maximization oracles, and the
//! shrink-and-translate δ-interior construction.
//!
//! Every family shipped here has closed-form membership, a greedy LMO, an
//! exact inscribed orthant radius `r` (largest `r` with `r·B^d_{≥0} ⊆ K`), and
//! a closed-form Euclidean projection used by the online gradient oracle.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::point::{distance, Point};

/// Default absolute tolerance for each defining inequality.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A down-closed convex body containing the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConstraintSet", into = "RawConstraintSet")]
pub enum ConstraintSet {
    /// `{0 ≤ x ≤ upper}`.
    Box { upper: Point },
    /// `{x ≥ 0, Σx ≤ budget}`.
    ScaledSimplex { budget: f64, dim: usize },
    /// `{0 ≤ x ≤ 1, Σx ≤ rank}`: polytope of the uniform matroid.
    UniformMatroid { rank: usize, dim: usize },
    /// `{0 ≤ x ≤ 1, Σ_{i∈P} x_i ≤ cap(P)}` for every part `P`.
    PartitionMatroid { parts: Vec<Vec<usize>>, caps: Vec<usize>, dim: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum RawConstraintSet {
    Box { upper: Vec<f64> },
    Simplex { budget: f64, dim: usize },
    UniformMatroid { rank: usize, dim: usize },
    PartitionMatroid { parts: Vec<Vec<usize>>, caps: Vec<usize> },
}

impl TryFrom<RawConstraintSet> for ConstraintSet {
    type Error = Error;

    fn try_from(raw: RawConstraintSet) -> Result<Self> {
        match raw {
            RawConstraintSet::Box { upper } => ConstraintSet::unit_box_with(upper),
            RawConstraintSet::Simplex { budget, dim } => ConstraintSet::simplex(budget, dim),
            RawConstraintSet::UniformMatroid { rank, dim } => ConstraintSet::uniform_matroid(rank, dim),
            RawConstraintSet::PartitionMatroid { parts, caps } => ConstraintSet::partition_matroid(parts, caps),
        }
    }
}

impl From<ConstraintSet> for RawConstraintSet {
    fn from(set: ConstraintSet) -> Self {
        match set {
            ConstraintSet::Box { upper } => RawConstraintSet::Box { upper: upper.into_inner() },
            ConstraintSet::ScaledSimplex { budget, dim } => RawConstraintSet::Simplex { budget, dim },
            ConstraintSet::UniformMatroid { rank, dim } => RawConstraintSet::UniformMatroid { rank, dim },
            ConstraintSet::PartitionMatroid { parts, caps, .. } => RawConstraintSet::PartitionMatroid { parts, caps },
        }
    }
}

/// Diameter, radius and lower bound of a set.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub diameter: f64,
    pub radius: f64,
    pub lower_bound: Point,
}

impl ConstraintSet {
    /// Box `[0, upper]`; every upper bound must be positive and finite.
    pub fn unit_box_with(upper: impl Into<Point>) -> Result<Self> {
        let upper = upper.into();
        if upper.dim() == 0 {
            return Err(Error::InvalidParameter("box must have dimension ≥ 1".into()));
        }
        if upper.iter().any(|u| !(u.is_finite() && *u > 0.0)) {
            return Err(Error::InvalidParameter("box upper bounds must be positive and finite".into()));
        }
        Ok(ConstraintSet::Box { upper })
    }

    /// The unit cube `[0, 1]^dim`.
    pub fn unit_box(dim: usize) -> Result<Self> {
        Self::unit_box_with(Point::filled(dim, 1.0))
    }

    pub fn simplex(budget: f64, dim: usize) -> Result<Self> {
        if dim == 0 || !(budget.is_finite() && budget > 0.0) {
            return Err(Error::InvalidParameter("simplex needs dim ≥ 1 and a positive budget".into()));
        }
        Ok(ConstraintSet::ScaledSimplex { budget, dim })
    }

    pub fn uniform_matroid(rank: usize, dim: usize) -> Result<Self> {
        if dim == 0 || rank == 0 {
            return Err(Error::InvalidParameter("uniform matroid needs rank ≥ 1 and dim ≥ 1".into()));
        }
        Ok(ConstraintSet::UniformMatroid { rank, dim })
    }

    /// Partition matroid polytope; `parts` must partition `0..dim` and every
    /// cap must be at least one.
    pub fn partition_matroid(parts: Vec<Vec<usize>>, caps: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.len() != caps.len() {
            return Err(Error::InvalidParameter("partition needs one cap per non-empty part list".into()));
        }
        let dim: usize = parts.iter().map(Vec::len).sum();
        let mut seen = vec![false; dim];
        for part in &parts {
            if part.is_empty() {
                return Err(Error::InvalidParameter("partition parts must be non-empty".into()));
            }
            for &i in part {
                if i >= dim || seen[i] {
                    return Err(Error::InvalidParameter(format!(
                        "parts must partition 0..{dim}; element {i} is out of range or repeated"
                    )));
                }
                seen[i] = true;
            }
        }
        if caps.contains(&0) {
            return Err(Error::InvalidParameter("partition caps must be ≥ 1".into()));
        }
        Ok(ConstraintSet::PartitionMatroid { parts, caps, dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConstraintSet::Box { upper } => upper.dim(),
            ConstraintSet::ScaledSimplex { dim, .. }
            | ConstraintSet::UniformMatroid { dim, .. }
            | ConstraintSet::PartitionMatroid { dim, .. } => *dim,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            ConstraintSet::Box { .. } => "box",
            ConstraintSet::ScaledSimplex { .. } => "simplex",
            ConstraintSet::UniformMatroid { .. } => "uniform_matroid",
            ConstraintSet::PartitionMatroid { .. } => "partition_matroid",
        }
    }

    /// Componentwise upper bound of the set (its bounding box).
    pub fn coordinate_caps(&self) -> Point {
        match self {
            ConstraintSet::Box { upper } => upper.clone(),
            ConstraintSet::ScaledSimplex { budget, dim } => Point::filled(*dim, *budget),
            ConstraintSet::UniformMatroid { dim, .. } | ConstraintSet::PartitionMatroid { dim, .. } => {
                Point::filled(*dim, 1.0)
            }
        }
    }

    /// Linear maximization oracle: a vertex maximizing `⟨v, direction⟩`.
    pub fn lmo(&self, direction: &[f64]) -> Result<Point> {
        check_dim(self.dim(), direction.len())?;
        let d = self.dim();
        let mut v = Point::zeros(d);
        match self {
            ConstraintSet::Box { upper } => {
                for i in 0..d {
                    if direction[i] > 0.0 {
                        v[i] = upper[i];
                    }
                }
            }
            ConstraintSet::ScaledSimplex { budget, .. } => {
                if let Some(best) = argmax(direction) {
                    if direction[best] > 0.0 {
                        v[best] = *budget;
                    }
                }
            }
            ConstraintSet::UniformMatroid { rank, .. } => {
                let all: Vec<usize> = (0..d).collect();
                for i in top_positive(&all, direction, *rank) {
                    v[i] = 1.0;
                }
            }
            ConstraintSet::PartitionMatroid { parts, caps, .. } => {
                for (part, &cap) in parts.iter().zip(caps) {
                    for i in top_positive(part, direction, cap) {
                        v[i] = 1.0;
                    }
                }
            }
        }
        Ok(v)
    }

    /// Exact closed-form membership with absolute tolerance `tol` on each
    /// defining inequality.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        if x.iter().any(|v| !v.is_finite() || *v < -tol) {
            return Ok(false);
        }
        let ok = match self {
            ConstraintSet::Box { upper } => x.iter().zip(upper.iter()).all(|(a, u)| *a <= u + tol),
            ConstraintSet::ScaledSimplex { budget, .. } => x.iter().sum::<f64>() <= budget + tol,
            ConstraintSet::UniformMatroid { rank, .. } => {
                x.iter().all(|a| *a <= 1.0 + tol) && x.iter().sum::<f64>() <= *rank as f64 + tol
            }
            ConstraintSet::PartitionMatroid { parts, caps, .. } => {
                x.iter().all(|a| *a <= 1.0 + tol)
                    && parts.iter().zip(caps).all(|(p, &c)| p.iter().map(|&i| x[i]).sum::<f64>() <= c as f64 + tol)
            }
        };
        Ok(ok)
    }

    /// Largest `r` with `r·B^d_{≥0} ⊆ K`, in closed form per family.
    pub fn inscribed_orthant_radius(&self) -> f64 {
        match self {
            ConstraintSet::Box { upper } => upper.iter().cloned().fold(f64::INFINITY, f64::min),
            ConstraintSet::ScaledSimplex { budget, dim } => budget / (*dim as f64).sqrt(),
            ConstraintSet::UniformMatroid { rank, dim } => capped_radius(*rank, *dim),
            ConstraintSet::PartitionMatroid { parts, caps, .. } => {
                parts.iter().zip(caps).map(|(p, &c)| capped_radius(c, p.len())).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Nonnegative unit vector along which the inscribed radius is attained;
    /// scaling it by anything above `r` leaves the set.
    pub fn worst_orthant_direction(&self) -> Point {
        let d = self.dim();
        match self {
            ConstraintSet::Box { upper } => {
                let i = argmin(upper).unwrap_or(0);
                Point::basis(d, i)
            }
            ConstraintSet::ScaledSimplex { .. } => Point::filled(d, 1.0 / (d as f64).sqrt()),
            ConstraintSet::UniformMatroid { rank, dim } => {
                if (*rank as f64) < (*dim as f64).sqrt() {
                    Point::filled(d, 1.0 / (d as f64).sqrt())
                } else {
                    Point::basis(d, 0)
                }
            }
            ConstraintSet::PartitionMatroid { parts, caps, .. } => {
                let (part, cap) = parts
                    .iter()
                    .zip(caps)
                    .min_by(|a, b| {
                        capped_radius(*a.1, a.0.len())
                            .partial_cmp(&capped_radius(*b.1, b.0.len()))
                            .unwrap_or(Ordering::Equal)
                    })
                    .expect("partition has at least one part");
                let mut u = Point::zeros(d);
                if (*cap as f64) < (part.len() as f64).sqrt() {
                    let w = 1.0 / (part.len() as f64).sqrt();
                    for &i in part {
                        u[i] = w;
                    }
                } else {
                    u[part[0]] = 1.0;
                }
                u
            }
        }
    }

    /// Closed-form diameter `D = sup‖x − y‖`, radius `R = sup‖x‖` and the
    /// lower bound (the origin).
    pub fn bounds(&self) -> Bounds {
        let d = self.dim();
        let (diameter, radius) = match self {
            ConstraintSet::Box { upper } => (upper.norm(), upper.norm()),
            ConstraintSet::ScaledSimplex { budget, dim } => {
                let diam = if *dim >= 2 { budget * 2f64.sqrt() } else { *budget };
                (diam, *budget)
            }
            ConstraintSet::UniformMatroid { rank, dim } => {
                let (sq_diam, sq_rad) = matroid_block_extent(*rank, *dim);
                (sq_diam.sqrt(), sq_rad.sqrt())
            }
            ConstraintSet::PartitionMatroid { parts, caps, .. } => {
                let (sq_diam, sq_rad) = parts
                    .iter()
                    .zip(caps)
                    .map(|(p, &c)| matroid_block_extent(c, p.len()))
                    .fold((0.0, 0.0), |acc, e| (acc.0 + e.0, acc.1 + e.1));
                (sq_diam.sqrt(), sq_rad.sqrt())
            }
        };
        Bounds { diameter, radius, lower_bound: Point::zeros(d) }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, y: &[f64]) -> Result<Point> {
        check_dim(self.dim(), y.len())?;
        let out = match self {
            ConstraintSet::Box { upper } => {
                Point::new(y.iter().zip(upper.iter()).map(|(v, u)| v.clamp(0.0, *u)).collect())
            }
            ConstraintSet::ScaledSimplex { budget, .. } => Point::new(project_capped(y, f64::INFINITY, *budget)),
            ConstraintSet::UniformMatroid { rank, .. } => Point::new(project_capped(y, 1.0, *rank as f64)),
            ConstraintSet::PartitionMatroid { parts, caps, dim } => {
                let mut out = Point::zeros(*dim);
                for (part, &cap) in parts.iter().zip(caps) {
                    let sub: Vec<f64> = part.iter().map(|&i| y[i]).collect();
                    for (&i, v) in part.iter().zip(project_capped(&sub, 1.0, cap as f64)) {
                        out[i] = v;
                    }
                }
                out
            }
        };
        Ok(out)
    }
}

fn capped_radius(cap: usize, size: usize) -> f64 {
    (cap as f64 / (size as f64).sqrt()).min(1.0)
}

/// Squared diameter and squared radius of `{0 ≤ x ≤ 1, Σx ≤ cap}` in `size`
/// coordinates: the extreme points are indicators of sets of size ≤ cap.
fn matroid_block_extent(cap: usize, size: usize) -> (f64, f64) {
    let first = cap.min(size);
    let second = cap.min(size - first);
    ((first + second) as f64, first as f64)
}

fn argmax(v: &[f64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &x)| match best {
            Some((_, b)) if b >= x => best,
            _ => Some((i, x)),
        })
        .map(|(i, _)| i)
}

fn argmin(v: &[f64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &x)| match best {
            Some((_, b)) if b <= x => best,
            _ => Some((i, x)),
        })
        .map(|(i, _)| i)
}

/// Up to `count` indices of `candidates` with the largest strictly positive
/// directions; ties broken by index.
fn top_positive(candidates: &[usize], direction: &[f64], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = candidates.iter().copied().filter(|&i| direction[i] > 0.0).collect();
    idx.sort_by(|&a, &b| direction[b].partial_cmp(&direction[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    idx.truncate(count);
    idx
}

/// Projection onto `{0 ≤ x ≤ cap, Σx ≤ budget}` by bisection on the shift
/// `λ` in `clip(y − λ, 0, cap)`.
fn project_capped(y: &[f64], cap: f64, budget: f64) -> Vec<f64> {
    let clipped = |lambda: f64| -> Vec<f64> { y.iter().map(|v| (v - lambda).clamp(0.0, cap)).collect() };
    let base = clipped(0.0);
    if base.iter().sum::<f64>() <= budget {
        return base;
    }
    let mut lo = 0.0;
    let mut hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if clipped(mid).iter().sum::<f64>() > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    clipped(hi)
}

/// `K' = (1 − α)K + δ𝟏` with `α = (√d + 1)δ / r`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorSet {
    base: ConstraintSet,
    delta: f64,
    alpha: f64,
    inscribed_radius: f64,
    lower_bound: Point,
}

/// Builds the shrink-and-translate δ-interior of `set`.
pub fn shrink_interior(set: &ConstraintSet, delta: f64) -> Result<InteriorSet> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let d = set.dim() as f64;
    let r = set.inscribed_orthant_radius();
    let alpha = (d.sqrt() + 1.0) * delta / r;
    if alpha.is_nan() || alpha >= 1.0 {
        return Err(Error::DeltaTooLarge { alpha });
    }
    Ok(InteriorSet {
        base: set.clone(),
        delta,
        alpha,
        inscribed_radius: r,
        lower_bound: Point::filled(set.dim(), delta),
    })
}

impl InteriorSet {
    pub fn base(&self) -> &ConstraintSet {
        &self.base
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn lower_bound(&self) -> &Point {
        &self.lower_bound
    }

    /// Maps a point of the base set into the interior.
    pub fn embed(&self, x: &[f64]) -> Point {
        Point::new(x.iter().map(|v| (1.0 - self.alpha) * v + self.delta).collect())
    }

    fn pull_back(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| (v - self.delta) / (1.0 - self.alpha)).collect()
    }

    pub fn lmo(&self, direction: &[f64]) -> Result<Point> {
        Ok(self.embed(&self.base.lmo(direction)?))
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        self.base.contains(&self.pull_back(x), tol)
    }

    /// Bounds of the base set are valid upper bounds for `D` and `R`; the
    /// lower bound is `δ𝟏`.
    pub fn bounds(&self) -> Bounds {
        let b = self.base.bounds();
        Bounds { diameter: b.diameter, radius: b.radius, lower_bound: self.lower_bound.clone() }
    }

    /// Upper bound `[√d(R/r + 1) + R/r]·δ` on `sup_{x∈K} d(x, K')`.
    pub fn discrepancy_bound(&self) -> f64 {
        let d = self.dim() as f64;
        let ratio = self.base.bounds().radius / self.inscribed_radius;
        (d.sqrt() * (ratio + 1.0) + ratio) * self.delta
    }

    pub fn project(&self, y: &[f64]) -> Result<Point> {
        check_dim(self.dim(), y.len())?;
        Ok(self.embed(&self.base.project(&self.pull_back(y))?))
    }
}

/// A feasible region an online oracle can live on.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Base(ConstraintSet),
    Interior(InteriorSet),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Base(s) => s.dim(),
            Region::Interior(s) => s.dim(),
        }
    }

    pub fn lmo(&self, direction: &[f64]) -> Result<Point> {
        match self {
            Region::Base(s) => s.lmo(direction),
            Region::Interior(s) => s.lmo(direction),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        match self {
            Region::Base(s) => s.contains(x, tol),
            Region::Interior(s) => s.contains(x, tol),
        }
    }

    pub fn bounds(&self) -> Bounds {
        match self {
            Region::Base(s) => s.bounds(),
            Region::Interior(s) => s.bounds(),
        }
    }

    pub fn project(&self, y: &[f64]) -> Result<Point> {
        match self {
            Region::Base(s) => s.project(y),
            Region::Interior(s) => s.project(y),
        }
    }

    pub fn lower_bound(&self) -> Point {
        match self {
            Region::Base(s) => Point::zeros(s.dim()),
            Region::Interior(s) => s.lower_bound().clone(),
        }
    }
}

impl From<ConstraintSet> for Region {
    fn from(s: ConstraintSet) -> Self {
        Region::Base(s)
    }
}

impl From<InteriorSet> for Region {
    fn from(s: InteriorSet) -> Self {
        Region::Interior(s)
    }
}

/// Random member of `region`: a random convex combination of LMO outputs for
/// `vertices` Gaussian-ish random directions (some all-negative, yielding the
/// lower bound).
pub fn sample_member<R: Rng + ?Sized>(region: &Region, vertices: usize, rng: &mut R) -> Result<Point> {
    let d = region.dim();
    let mut weights: Vec<f64> = (0..vertices.max(1)).map(|_| -rng.random::<f64>().ln()).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut x = Point::zeros(d);
    for w in weights {
        let dir: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        x.axpy(w, &region.lmo(&dir)?);
    }
    Ok(x)
}

/// Distance from `x ∈ K` to its image `(1 − α)x + δ𝟏 ∈ K'`.
pub fn embedding_displacement(interior: &InteriorSet, x: &[f64]) -> f64 {
    distance(x, &interior.embed(x))
}
