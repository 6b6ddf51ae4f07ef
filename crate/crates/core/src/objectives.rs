//! Monotone DR-submodular objectives.
//!
//! Two continuous families are shipped: [`QuadraticDR`] (concave quadratics
//! with nonpositive Hessian entries, monotone on their domain box) and the
//! [`MultilinearExtension`] of a monotone submodular [`SetFunction`].

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::estimators::ball_sample;
use crate::point::Point;

/// Exact enumeration is used for the multilinear extension up to this many
/// ground elements; above it the extension is estimated by sampling.
pub const EXACT_ENUMERATION_MAX_DIM: usize = 20;

const DOMAIN_TOL: f64 = 1e-9;

/// Regularity constants of a continuous objective on its domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConstants {
    /// `L1`: bound on `‖∇F‖`.
    pub lipschitz: f64,
    /// `L2`: Lipschitz constant of `∇F`.
    pub smoothness: f64,
    /// `M1`: bound on `|F|`.
    pub value_bound: f64,
    /// `M0`: bound on the norm of a stochastic gradient.
    pub grad_norm_bound: f64,
    /// `σ0²`: bound on `E‖∇̃F − ∇F‖²`.
    pub grad_variance: f64,
}

/// A monotone continuous DR-submodular function with exact and stochastic
/// first-order access.
pub trait ContinuousObjective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn grad(&self, x: &[f64]) -> Result<Point>;
    /// Unbiased gradient estimate with norm at most `constants().grad_norm_bound`.
    fn stoch_grad(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<Point>;
    fn constants(&self) -> ObjectiveConstants;
}

fn check_in_box(x: &[f64], upper: &[f64]) -> Result<()> {
    check_dim(upper.len(), x.len())?;
    for (i, (v, u)) in x.iter().zip(upper).enumerate() {
        if !v.is_finite() || *v < -DOMAIN_TOL || *v > u + DOMAIN_TOL {
            return Err(Error::OutsideDomain(format!("coordinate {i} = {v} not in [0, {u}]")));
        }
    }
    Ok(())
}

/// `F(x) = hᵀx + ½xᵀHx` on the box `[0, upper]`, with every `H_ij ≤ 0` and
/// `h + H·upper ≥ 0` so that `F` is monotone and DR-submodular on the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticDR {
    linear: Point,
    /// Row-major `d × d`.
    hessian: Vec<f64>,
    upper: Point,
    /// Target `σ0` of the additive gradient noise.
    noise: f64,
}

impl QuadraticDR {
    pub fn new(linear: Point, hessian: Vec<f64>, upper: Point, noise: f64) -> Result<Self> {
        let d = linear.dim();
        check_dim(d, upper.dim())?;
        check_dim(d * d, hessian.len())?;
        if hessian.iter().any(|h| !h.is_finite() || *h > 0.0) {
            return Err(Error::InvalidParameter("Hessian entries must be finite and ≤ 0".into()));
        }
        for i in 0..d {
            for j in 0..i {
                if hessian[i * d + j] != hessian[j * d + i] {
                    return Err(Error::InvalidParameter("Hessian must be symmetric".into()));
                }
            }
        }
        if upper.iter().any(|u| !(u.is_finite() && *u > 0.0)) {
            return Err(Error::InvalidParameter("domain box must have positive bounds".into()));
        }
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(Error::InvalidParameter("noise level must be ≥ 0".into()));
        }
        let q = QuadraticDR { linear, hessian, upper, noise };
        let floor = q.monotone_floor();
        for i in 0..d {
            if q.linear[i] < floor[i] - 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "h[{i}] = {} is below the monotonicity floor {}",
                    q.linear[i], floor[i]
                )));
            }
        }
        Ok(q)
    }

    /// Linear objective `cᵀx` (`c ≥ 0`) on `[0, upper]`.
    pub fn linear(c: Point, upper: Point) -> Result<Self> {
        let d = c.dim();
        QuadraticDR::new(c, vec![0.0; d * d], upper, 0.0)
    }

    /// Random instance: `H = −AᵀA/d` with `A ∈ [0,1]^{d×d}` (nonpositive
    /// entries, negative semidefinite) and `h` set to the monotonicity floor
    /// plus a uniform `[0.1, 1.1)` margin.
    pub fn random<R: Rng + ?Sized>(upper: Point, noise: f64, rng: &mut R) -> Result<Self> {
        let d = upper.dim();
        let a: Vec<f64> = (0..d * d).map(|_| rng.random::<f64>()).collect();
        let mut hessian = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let s: f64 = (0..d).map(|k| a[k * d + i] * a[k * d + j]).sum();
                hessian[i * d + j] = -s / d as f64;
            }
        }
        let linear = Point::new(
            (0..d)
                .map(|i| {
                    let floor: f64 = (0..d).map(|j| -hessian[i * d + j] * upper[j]).sum();
                    floor + 0.1 + rng.random::<f64>()
                })
                .collect(),
        );
        QuadraticDR::new(linear, hessian, upper, noise)
    }

    /// `−H·upper`, the smallest `h` keeping `∇F ≥ 0` on the box.
    pub fn monotone_floor(&self) -> Point {
        let d = self.dim();
        Point::new((0..d).map(|i| (0..d).map(|j| -self.hessian[i * d + j] * self.upper[j]).sum()).collect())
    }

    pub fn linear_term(&self) -> &Point {
        &self.linear
    }

    pub fn hessian(&self) -> &[f64] {
        &self.hessian
    }

    pub fn upper(&self) -> &Point {
        &self.upper
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Radius of the uniform-ball noise giving `E‖ε‖² = σ0²`.
    pub fn noise_radius(&self) -> f64 {
        let d = self.dim() as f64;
        self.noise * ((d + 2.0) / d).sqrt()
    }

    /// Sum of quadratics sharing a domain: again a quadratic.
    pub fn accumulate(&mut self, other: &QuadraticDR) -> Result<()> {
        self.accumulate_scaled(other, 1.0)
    }

    /// `self += weight·other`, `weight ≥ 0`.
    pub fn accumulate_scaled(&mut self, other: &QuadraticDR, weight: f64) -> Result<()> {
        check_dim(self.dim(), other.dim())?;
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::InvalidParameter(format!("weight must be ≥ 0, got {weight}")));
        }
        if self.upper != other.upper {
            return Err(Error::InvalidParameter("cannot add quadratics on different boxes".into()));
        }
        self.linear.axpy(weight, &other.linear);
        for (a, b) in self.hessian.iter_mut().zip(&other.hessian) {
            *a += weight * b;
        }
        Ok(())
    }

    fn hess_times(&self, x: &[f64]) -> Point {
        let d = self.dim();
        Point::new((0..d).map(|i| (0..d).map(|j| self.hessian[i * d + j] * x[j]).sum()).collect())
    }

    /// Evaluation without the domain check, for callers that already validated.
    pub fn value_unchecked(&self, x: &[f64]) -> f64 {
        let hx = self.hess_times(x);
        self.linear.dot(x) + 0.5 * hx.dot(x)
    }

    pub fn grad_unchecked(&self, x: &[f64]) -> Point {
        self.linear.add(&self.hess_times(x))
    }
}

impl ContinuousObjective for QuadraticDR {
    fn dim(&self) -> usize {
        self.linear.dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_in_box(x, &self.upper)?;
        Ok(self.value_unchecked(x))
    }

    fn grad(&self, x: &[f64]) -> Result<Point> {
        check_in_box(x, &self.upper)?;
        Ok(self.grad_unchecked(x))
    }

    fn stoch_grad(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<Point> {
        let mut g = self.grad(x)?;
        if self.noise > 0.0 {
            let eps = ball_sample(rng, self.dim());
            g.axpy(self.noise_radius(), &eps);
        }
        Ok(g)
    }

    fn constants(&self) -> ObjectiveConstants {
        // 0 ≤ ∇F ≤ h on the box, so ‖∇F‖ ≤ ‖h‖; ‖H‖_2 ≤ ‖H‖_F.
        let lipschitz = self.linear.norm();
        let smoothness = self.hessian.iter().map(|h| h * h).sum::<f64>().sqrt();
        ObjectiveConstants {
            lipschitz,
            smoothness,
            value_bound: self.value_unchecked(&self.upper),
            grad_norm_bound: lipschitz + self.noise_radius(),
            grad_variance: self.noise * self.noise,
        }
    }
}

/// Set functions over the ground set `0..ground_size()`; subsets are passed
/// as membership masks.
pub trait SetObjective: Send + Sync {
    fn ground_size(&self) -> usize;
    fn value(&self, set: &[bool]) -> f64;

    /// `M1 = sup |f|`; for monotone nonnegative functions this is `f(Ω)`.
    fn value_bound(&self) -> f64 {
        self.value(&vec![true; self.ground_size()])
    }
}

/// Weighted coverage: item `i` covers `covers[i]` ⊆ universe, and
/// `f(S) = Σ_{e covered by S} w_e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    covers: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl Coverage {
    pub fn new(covers: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("coverage weights must be ≥ 0".into()));
        }
        if covers.iter().flatten().any(|&e| e >= weights.len()) {
            return Err(Error::InvalidParameter("covered element outside the universe".into()));
        }
        Ok(Coverage { covers, weights })
    }
}

impl SetObjective for Coverage {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, set: &[bool]) -> f64 {
        let mut covered = vec![false; self.weights.len()];
        for (i, items) in self.covers.iter().enumerate() {
            if set[i] {
                for &e in items {
                    covered[e] = true;
                }
            }
        }
        covered.iter().zip(&self.weights).filter(|(c, _)| **c).map(|(_, w)| w).sum()
    }
}

/// Facility location: `f(S) = Σ_j max_{i∈S} benefit[j][i]`, zero for `∅`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacilityLocation {
    /// `benefit[client][item]`, all ≥ 0.
    benefit: Vec<Vec<f64>>,
    items: usize,
}

impl FacilityLocation {
    pub fn new(benefit: Vec<Vec<f64>>) -> Result<Self> {
        let items = benefit.first().map_or(0, Vec::len);
        if benefit.iter().any(|row| row.len() != items) {
            return Err(Error::InvalidParameter("facility benefit rows must have equal length".into()));
        }
        if benefit.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter("facility benefits must be ≥ 0".into()));
        }
        Ok(FacilityLocation { benefit, items })
    }
}

impl SetObjective for FacilityLocation {
    fn ground_size(&self) -> usize {
        self.items
    }

    fn value(&self, set: &[bool]) -> f64 {
        self.benefit
            .iter()
            .map(|row| row.iter().zip(set).filter(|(_, s)| **s).map(|(v, _)| *v).fold(0.0, f64::max))
            .sum()
    }
}

/// `f(S) = Σ_{i∈S} w_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Modular {
    weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("modular weights must be ≥ 0".into()));
        }
        Ok(Modular { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetObjective for Modular {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, set: &[bool]) -> f64 {
        self.weights.iter().zip(set).filter(|(_, s)| **s).map(|(w, _)| w).sum()
    }
}

/// Explicit value table indexed by subset bitmask (bit `i` ↔ element `i`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableFunction {
    values: Vec<f64>,
    ground: usize,
}

impl TableFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n == 0 || !n.is_power_of_two() || n > 1 << EXACT_ENUMERATION_MAX_DIM {
            return Err(Error::InvalidParameter("table length must be 2^d with d ≤ 20".into()));
        }
        Ok(TableFunction { values, ground: n.trailing_zeros() as usize })
    }
}

impl SetObjective for TableFunction {
    fn ground_size(&self) -> usize {
        self.ground
    }

    fn value(&self, set: &[bool]) -> f64 {
        self.values[set_to_mask(set)]
    }
}

/// The shipped set-function families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetFunction {
    Coverage(Coverage),
    FacilityLocation(FacilityLocation),
    Modular(Modular),
    Table(TableFunction),
}

impl SetObjective for SetFunction {
    fn ground_size(&self) -> usize {
        match self {
            SetFunction::Coverage(f) => f.ground_size(),
            SetFunction::FacilityLocation(f) => f.ground_size(),
            SetFunction::Modular(f) => f.ground_size(),
            SetFunction::Table(f) => f.ground_size(),
        }
    }

    fn value(&self, set: &[bool]) -> f64 {
        match self {
            SetFunction::Coverage(f) => f.value(set),
            SetFunction::FacilityLocation(f) => f.value(set),
            SetFunction::Modular(f) => f.value(set),
            SetFunction::Table(f) => f.value(set),
        }
    }
}

impl From<Coverage> for SetFunction {
    fn from(f: Coverage) -> Self {
        SetFunction::Coverage(f)
    }
}

impl From<FacilityLocation> for SetFunction {
    fn from(f: FacilityLocation) -> Self {
        SetFunction::FacilityLocation(f)
    }
}

impl From<Modular> for SetFunction {
    fn from(f: Modular) -> Self {
        SetFunction::Modular(f)
    }
}

impl From<TableFunction> for SetFunction {
    fn from(f: TableFunction) -> Self {
        SetFunction::Table(f)
    }
}

pub fn set_to_mask(set: &[bool]) -> usize {
    set.iter().enumerate().filter(|(_, s)| **s).fold(0, |m, (i, _)| m | (1 << i))
}

pub fn mask_to_set(mask: usize, dim: usize) -> Vec<bool> {
    (0..dim).map(|i| (mask >> i) & 1 == 1).collect()
}

/// Kinds accepted by [`make_random_set_objective`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetFamilyKind {
    Coverage,
    FacilityLocation,
}

/// Generator parameters: ground set size, coverage universe size, number of
/// facility-location clients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetFamilyParams {
    pub ground: usize,
    pub universe: usize,
    pub clients: usize,
}

/// Random monotone submodular function of the requested family. Coverage
/// items cover each universe element independently with probability
/// `min(1, 2/ground)`; weights and benefits are uniform on `[0, 1)`.
pub fn make_random_set_objective<R: Rng + ?Sized>(
    kind: SetFamilyKind,
    params: SetFamilyParams,
    rng: &mut R,
) -> Result<SetFunction> {
    if params.ground == 0 {
        return Err(Error::InvalidParameter("ground set must be non-empty".into()));
    }
    match kind {
        SetFamilyKind::Coverage => {
            if params.universe == 0 {
                return Err(Error::InvalidParameter("coverage universe must be non-empty".into()));
            }
            let p = (2.0 / params.ground as f64).min(1.0);
            let covers = (0..params.ground)
                .map(|_| (0..params.universe).filter(|_| rng.random::<f64>() < p).collect())
                .collect();
            let weights = (0..params.universe).map(|_| rng.random::<f64>()).collect();
            Ok(Coverage::new(covers, weights)?.into())
        }
        SetFamilyKind::FacilityLocation => {
            if params.clients == 0 {
                return Err(Error::InvalidParameter("facility location needs ≥ 1 client".into()));
            }
            let benefit =
                (0..params.clients).map(|_| (0..params.ground).map(|_| rng.random::<f64>()).collect()).collect();
            Ok(FacilityLocation::new(benefit)?.into())
        }
    }
}

/// `(L1, L2) = (2M√d, 4M√(d(d−1)))` for the multilinear extension of `f`.
pub fn lipschitz_smoothness_of_extension<F: SetObjective + ?Sized>(f: &F) -> (f64, f64) {
    let m = f.value_bound().abs();
    let d = f.ground_size() as f64;
    (2.0 * m * d.sqrt(), 4.0 * m * (d * (d - 1.0)).sqrt())
}

/// How the multilinear extension is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionMode {
    Exact,
    /// Sample mean over `samples` draws `S ∼ x` from a fixed seed.
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

/// `F(x) = E_{S∼x}[f(S)]`, each `i ∈ S` independently with probability `x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearExtension<F: SetObjective = SetFunction> {
    base: F,
    mode: ExtensionMode,
}

impl<F: SetObjective> MultilinearExtension<F> {
    /// Exact enumeration when `d ≤ 20`, otherwise 10⁴-sample Monte Carlo.
    pub fn new(base: F) -> Self {
        let mode = if base.ground_size() <= EXACT_ENUMERATION_MAX_DIM {
            ExtensionMode::Exact
        } else {
            ExtensionMode::MonteCarlo { samples: 10_000, seed: 0 }
        };
        MultilinearExtension { base, mode }
    }

    pub fn with_mode(base: F, mode: ExtensionMode) -> Result<Self> {
        match mode {
            ExtensionMode::Exact if base.ground_size() > EXACT_ENUMERATION_MAX_DIM => {
                Err(Error::InvalidParameter(format!("exact mode needs d ≤ {EXACT_ENUMERATION_MAX_DIM}")))
            }
            ExtensionMode::MonteCarlo { samples: 0, .. } => {
                Err(Error::InvalidParameter("Monte-Carlo mode needs ≥ 1 sample".into()))
            }
            _ => Ok(MultilinearExtension { base, mode }),
        }
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn mode(&self) -> ExtensionMode {
        self.mode
    }

    fn check_cube(&self, x: &[f64]) -> Result<()> {
        check_in_box(x, &vec![1.0; self.base.ground_size()])
    }

    fn exact(&self, x: &[f64]) -> f64 {
        let d = x.len();
        let mut total = 0.0;
        let mut set = vec![false; d];
        for mask in 0..1usize << d {
            let mut p = 1.0;
            for (i, s) in set.iter_mut().enumerate() {
                *s = (mask >> i) & 1 == 1;
                p *= if *s { x[i] } else { 1.0 - x[i] };
            }
            if p != 0.0 {
                total += p * self.base.value(&set);
            }
        }
        total
    }

    fn sampled(&self, x: &[f64], samples: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..samples {
            let v = self.base.value(&sample_set(x, &mut rng));
            sum += v;
            sq += v * v;
        }
        let n = samples as f64;
        let mean = sum / n;
        let var = if samples > 1 { ((sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        (mean, (var / n).sqrt())
    }

    /// Value and its standard error (zero in exact mode).
    pub fn value_with_error(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.check_cube(x)?;
        Ok(match self.mode {
            ExtensionMode::Exact => (self.exact(x), 0.0),
            ExtensionMode::MonteCarlo { samples, seed } => self.sampled(x, samples, seed),
        })
    }

    pub fn multilinear_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value_with_error(x)?.0)
    }

    /// `∂F/∂x_i = F(x; x_i ← 1) − F(x; x_i ← 0)`. Monte-Carlo mode shares one
    /// batch of samples across all components.
    pub fn multilinear_grad(&self, x: &[f64]) -> Result<Point> {
        self.check_cube(x)?;
        let d = x.len();
        match self.mode {
            ExtensionMode::Exact => {
                let mut pinned = x.to_vec();
                let mut g = Point::zeros(d);
                for i in 0..d {
                    pinned[i] = 1.0;
                    let hi = self.exact(&pinned);
                    pinned[i] = 0.0;
                    let lo = self.exact(&pinned);
                    pinned[i] = x[i];
                    g[i] = hi - lo;
                }
                Ok(g)
            }
            ExtensionMode::MonteCarlo { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut g = Point::zeros(d);
                for _ in 0..samples {
                    let s = sample_set(x, &mut rng);
                    g.axpy(1.0 / samples as f64, &marginals(&self.base, s));
                }
                Ok(g)
            }
        }
    }

    /// One draw `S ∼ x`; component `i` is `f(S ∪ {i}) − f(S ∖ {i})`.
    pub fn multilinear_stoch_grad(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<Point> {
        self.check_cube(x)?;
        Ok(marginals(&self.base, sample_set(x, rng)))
    }
}

fn sample_set<R: Rng + ?Sized>(x: &[f64], rng: &mut R) -> Vec<bool> {
    x.iter().map(|p| rng.random::<f64>() < *p).collect()
}

fn marginals<F: SetObjective + ?Sized>(f: &F, mut set: Vec<bool>) -> Point {
    let d = set.len();
    let mut g = Point::zeros(d);
    for i in 0..d {
        let was = set[i];
        set[i] = true;
        let hi = f.value(&set);
        set[i] = false;
        let lo = f.value(&set);
        set[i] = was;
        g[i] = hi - lo;
    }
    g
}

impl<F: SetObjective> ContinuousObjective for MultilinearExtension<F> {
    fn dim(&self) -> usize {
        self.base.ground_size()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.multilinear_value(x)
    }

    fn grad(&self, x: &[f64]) -> Result<Point> {
        self.multilinear_grad(x)
    }

    fn stoch_grad(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<Point> {
        self.multilinear_stoch_grad(x, rng)
    }

    fn constants(&self) -> ObjectiveConstants {
        let (l1, l2) = lipschitz_smoothness_of_extension(&self.base);
        let m = self.base.value_bound().abs();
        let m0 = 2.0 * m * (self.dim() as f64).sqrt();
        ObjectiveConstants {
            lipschitz: l1,
            smoothness: l2,
            value_bound: m,
            grad_norm_bound: m0,
            grad_variance: m0 * m0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn appendix_table(a: f64, b: f64) -> TableFunction {
        // masks: ∅, {1}, {2}, {1,2}
        TableFunction::new(vec![0.0, a, b, b]).unwrap()
    }

    /// Independent brute force: enumerate subsets as index lists.
    fn brute_extension(f: &dyn SetObjective, x: &[f64]) -> f64 {
        let d = x.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << d) {
            let members: Vec<bool> = (0..d).map(|i| mask & (1 << i) != 0).collect();
            let p: f64 = (0..d).map(|i| if members[i] { x[i] } else { 1.0 - x[i] }).product();
            total += p * f.value(&members);
        }
        total
    }

    #[test]
    fn appendix_extension_formula() {
        let ext = MultilinearExtension::new(appendix_table(1.0, 2.0));
        assert!((ext.multilinear_value(&[0.5, 0.5]).unwrap() - 1.25).abs() < 1e-15);
        for &(x1, x2) in &[(0.1, 0.7), (0.9, 0.2), (0.33, 0.66)] {
            let expect = x1 + 2.0 * x2 - x1 * x2;
            assert!((ext.multilinear_value(&[x1, x2]).unwrap() - expect).abs() < 1e-14);
            let g = ext.multilinear_grad(&[x1, x2]).unwrap();
            assert!((g[0] - (1.0 - x2)).abs() < 1e-14);
            assert!((g[1] - (2.0 - x1)).abs() < 1e-14);
        }
    }

    #[test]
    fn indicator_points_recover_set_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = make_random_set_objective(
            SetFamilyKind::Coverage,
            SetFamilyParams { ground: 6, universe: 20, clients: 0 },
            &mut rng,
        )
        .unwrap();
        let ext = MultilinearExtension::new(f.clone());
        for mask in 0..64 {
            let set = mask_to_set(mask, 6);
            let x: Vec<f64> = set.iter().map(|s| if *s { 1.0 } else { 0.0 }).collect();
            assert_eq!(ext.multilinear_value(&x).unwrap(), f.value(&set));
        }
    }

    #[test]
    fn exact_value_matches_enumeration_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = make_random_set_objective(
            SetFamilyKind::Coverage,
            SetFamilyParams { ground: 8, universe: 32, clients: 0 },
            &mut rng,
        )
        .unwrap();
        let ext = MultilinearExtension::new(f.clone());
        for _ in 0..10 {
            let x: Vec<f64> = (0..8).map(|_| rng.random()).collect();
            let got = ext.multilinear_value(&x).unwrap();
            assert!((got - brute_extension(&f, &x)).abs() < 1e-12);
        }
    }

    #[test]
    fn modular_extension_is_linear() {
        let w = vec![0.5, 1.5, 2.0];
        let ext = MultilinearExtension::new(SetFunction::from(Modular::new(w.clone()).unwrap()));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let x: Vec<f64> = (0..3).map(|_| rng.random()).collect();
            let g = ext.multilinear_grad(&x).unwrap();
            let sg = ext.multilinear_stoch_grad(&x, &mut rng).unwrap();
            for i in 0..3 {
                assert!((g[i] - w[i]).abs() < 1e-14);
                assert!((sg[i] - w[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn grad_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = make_random_set_objective(
            SetFamilyKind::FacilityLocation,
            SetFamilyParams { ground: 8, universe: 0, clients: 5 },
            &mut rng,
        )
        .unwrap();
        let ext = MultilinearExtension::new(f);
        let h = 1e-5;
        for _ in 0..5 {
            let x: Vec<f64> = (0..8).map(|_| 0.05 + 0.9 * rng.random::<f64>()).collect();
            let g = ext.multilinear_grad(&x).unwrap();
            for i in 0..8 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (ext.multilinear_value(&xp).unwrap() - ext.multilinear_value(&xm).unwrap()) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn stoch_grad_on_appendix_table_draw() {
        // x = (0, 1) forces S = {2}.
        let ext = MultilinearExtension::new(appendix_table(1.0, 2.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = ext.multilinear_stoch_grad(&[0.0, 1.0], &mut rng).unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 2.0);
    }

    #[test]
    fn extension_rejects_points_outside_cube() {
        let ext = MultilinearExtension::new(appendix_table(1.0, 2.0));
        assert!(matches!(ext.multilinear_value(&[1.2, 0.0]), Err(Error::OutsideDomain(_))));
        assert!(ext.multilinear_grad(&[-0.1, 0.0]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(ext.multilinear_stoch_grad(&[0.5, 1.5], &mut rng).is_err());
    }

    #[test]
    fn monte_carlo_mode_reports_standard_error() {
        let ext = MultilinearExtension::with_mode(
            SetFunction::from(appendix_table(1.0, 2.0)),
            ExtensionMode::MonteCarlo { samples: 20_000, seed: 4 },
        )
        .unwrap();
        let (v, se) = ext.value_with_error(&[0.5, 0.5]).unwrap();
        assert!(se > 0.0);
        assert!((v - 1.25).abs() < 4.0 * se);
        let g = ext.multilinear_grad(&[0.5, 0.5]).unwrap();
        assert!((g[0] - 0.5).abs() < 0.05 && (g[1] - 1.5).abs() < 0.05);
    }

    #[test]
    fn quadratic_examples() {
        let q = QuadraticDR::new(Point::from([2.0, 2.0]), vec![-1.0, -1.0, -1.0, -1.0], Point::from([1.0, 1.0]), 0.0)
            .unwrap();
        assert_eq!(q.value(&[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(q.grad(&[1.0, 1.0]).unwrap(), Point::from([0.0, 0.0]));
        let g0 = q.grad(&[0.0, 0.0]).unwrap();
        assert_eq!(g0, Point::from([2.0, 2.0]));
        assert!(g0.iter().zip(q.grad(&[1.0, 1.0]).unwrap().iter()).all(|(a, b)| a >= b));

        let lin = QuadraticDR::linear(Point::from([1.0, 3.0]), Point::from([1.0, 1.0])).unwrap();
        assert_eq!(lin.value(&[0.5, 0.5]).unwrap(), 2.0);
        assert_eq!(lin.grad(&[0.2, 0.9]).unwrap(), Point::from([1.0, 3.0]));
        assert!(matches!(lin.value(&[1.5, 0.0]), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn quadratic_rejects_non_monotone_or_positive_hessian() {
        let up = Point::from([1.0, 1.0]);
        assert!(QuadraticDR::new(Point::from([1.0, 1.0]), vec![-1.0, -1.0, -1.0, -1.0], up.clone(), 0.0).is_err());
        assert!(QuadraticDR::new(Point::from([5.0, 5.0]), vec![0.5, 0.0, 0.0, 0.0], up.clone(), 0.0).is_err());
        assert!(QuadraticDR::new(Point::from([5.0, 5.0]), vec![-1.0, -0.5, -0.2, -1.0], up, 0.0).is_err());
    }

    #[test]
    fn quadratic_stoch_grad_respects_norm_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q = QuadraticDR::random(Point::filled(4, 1.0), 0.5, &mut rng).unwrap();
        let c = q.constants();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..4).map(|_| rng.random()).collect();
            let g = q.stoch_grad(&x, &mut rng).unwrap();
            assert!(g.norm() <= c.grad_norm_bound + 1e-12);
            assert!(q.grad(&x).unwrap().norm() <= c.lipschitz + 1e-12);
            assert!(q.value(&x).unwrap().abs() <= c.value_bound + 1e-12);
        }
    }

    #[test]
    fn extension_constants_follow_closed_form() {
        let f =
            TableFunction::new(vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
                .unwrap();
        let (l1, l2) = lipschitz_smoothness_of_extension(&f);
        assert!((l1 - 4.0).abs() < 1e-12);
        assert!((l2 - 4.0 * 12f64.sqrt()).abs() < 1e-12);
        assert!((l2 - 13.856).abs() < 1e-3);

        let zero = Modular::new(vec![0.0; 3]).unwrap();
        assert_eq!(lipschitz_smoothness_of_extension(&zero), (0.0, 0.0));

        let two = TableFunction::new(vec![0.0, 2.0, 2.0, 2.0]).unwrap();
        let (l1, l2) = lipschitz_smoothness_of_extension(&two);
        assert!((l1 - 5.657).abs() < 1e-3);
        assert!((l2 - 11.314).abs() < 1e-3);
    }

    #[test]
    fn generator_examples() {
        let whole = Coverage::new(vec![vec![0, 1, 2], vec![], vec![1]], vec![0.5, 1.0, 2.0]).unwrap();
        // the first item covers the whole universe
        for mask in 0..8 {
            let set = mask_to_set(mask, 3);
            if set[0] {
                assert_eq!(whole.value(&set), 3.5);
            }
        }
        let fl = FacilityLocation::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(fl.value(&[true, true, false]), 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(make_random_set_objective(
            SetFamilyKind::Coverage,
            SetFamilyParams { ground: 4, universe: 0, clients: 0 },
            &mut rng
        )
        .is_err());
        assert!(Coverage::new(vec![vec![3]], vec![1.0]).is_err());
        assert!(Modular::new(vec![-1.0]).is_err());
    }

    #[test]
    fn generated_functions_pass_exhaustive_property_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in [SetFamilyKind::Coverage, SetFamilyKind::FacilityLocation] {
            let f = make_random_set_objective(kind, SetFamilyParams { ground: 8, universe: 24, clients: 6 }, &mut rng)
                .unwrap();
            let vals: Vec<f64> = (0..256).map(|m| f.value(&mask_to_set(m, 8))).collect();
            for a in 0..256usize {
                for b in 0..256usize {
                    if a & b != a {
                        continue;
                    }
                    assert!(vals[a] <= vals[b] + 1e-12);
                    for x in 0..8 {
                        if b & (1 << x) == 0 {
                            let ga = vals[a | 1 << x] - vals[a];
                            let gb = vals[b | 1 << x] - vals[b];
                            assert!(ga >= gb - 1e-12);
                        }
                    }
                }
            }
        }
    }
}
