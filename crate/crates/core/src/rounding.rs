//! Rounding fractional points of a matroid polytope to sets.
//!
//! Subsets of the ground set `0..d` are membership masks (`Vec<bool>`).

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConstraintSet, DEFAULT_TOL};
use crate::objectives::{MultilinearExtension, TableFunction};

const INTEGRAL_EPS: f64 = 1e-12;

/// Uniform or partition matroid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Matroid {
    Uniform { rank: usize, dim: usize },
    Partition { parts: Vec<Vec<usize>>, caps: Vec<usize>, dim: usize },
}

impl Matroid {
    /// The matroid whose polytope is `set`.
    pub fn from_polytope(set: &ConstraintSet) -> Result<Self> {
        match set {
            ConstraintSet::UniformMatroid { rank, dim } => Ok(Matroid::Uniform { rank: *rank, dim: *dim }),
            ConstraintSet::PartitionMatroid { parts, caps, dim } => {
                Ok(Matroid::Partition { parts: parts.clone(), caps: caps.clone(), dim: *dim })
            }
            other => Err(Error::Unsupported(format!("{} is not a matroid polytope", other.family_name()))),
        }
    }

    pub fn polytope(&self) -> ConstraintSet {
        match self {
            Matroid::Uniform { rank, dim } => ConstraintSet::UniformMatroid { rank: *rank, dim: *dim },
            Matroid::Partition { parts, caps, dim } => {
                ConstraintSet::PartitionMatroid { parts: parts.clone(), caps: caps.clone(), dim: *dim }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Matroid::Uniform { dim, .. } | Matroid::Partition { dim, .. } => *dim,
        }
    }

    /// Groups of coordinates with a shared cardinality cap.
    fn groups(&self) -> Vec<(Vec<usize>, usize)> {
        match self {
            Matroid::Uniform { rank, dim } => vec![((0..*dim).collect(), *rank)],
            Matroid::Partition { parts, caps, .. } => parts.iter().cloned().zip(caps.iter().copied()).collect(),
        }
    }

    /// Rank function `r(S)`.
    pub fn rank_of(&self, set: &[bool]) -> usize {
        self.groups().iter().map(|(g, cap)| g.iter().filter(|&&i| set[i]).count().min(*cap)).sum()
    }
}

/// Uniform: `|S| ≤ m`; partition: `|S ∩ P| ≤ cap(P)` for every part.
pub fn is_independent(matroid: &Matroid, set: &[bool]) -> bool {
    set.len() == matroid.dim() && matroid.groups().iter().all(|(g, cap)| g.iter().filter(|&&i| set[i]).count() <= *cap)
}

fn check_cube(x: &[f64]) -> Result<()> {
    for (i, v) in x.iter().enumerate() {
        if !v.is_finite() || *v < -DEFAULT_TOL || *v > 1.0 + DEFAULT_TOL {
            return Err(Error::OutsideDomain(format!("coordinate {i} = {v} not in [0, 1]")));
        }
    }
    Ok(())
}

/// Includes each `i` independently with probability `x_i`.
pub fn random_round<R: Rng + ?Sized>(x: &[f64], rng: &mut R) -> Result<Vec<bool>> {
    check_cube(x)?;
    Ok(x.iter().map(|p| rng.random::<f64>() < *p).collect())
}

/// Randomized pipage rounding: output is always independent and
/// `E[f(output)] ≥ F(x)` for monotone submodular `f`.
///
/// Pairs of fractional coordinates in the same group are moved along
/// `e_i − e_j` to one of the two endpoints with expectation-preserving
/// probabilities; a single leftover fractional coordinate is rounded up with
/// probability equal to its value.
pub fn pipage_round<R: Rng + ?Sized>(x: &[f64], matroid: &Matroid, rng: &mut R) -> Result<Vec<bool>> {
    check_dim(matroid.dim(), x.len())?;
    if !matroid.polytope().contains(x, DEFAULT_TOL)? {
        return Err(Error::OutsideDomain("point is not in the matroid polytope".into()));
    }
    let mut y: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let snap = |v: &mut f64| {
        if *v < INTEGRAL_EPS {
            *v = 0.0;
        } else if *v > 1.0 - INTEGRAL_EPS {
            *v = 1.0;
        }
    };
    for (group, cap) in matroid.groups() {
        loop {
            for &i in &group {
                snap(&mut y[i]);
            }
            let frac: Vec<usize> = group.iter().copied().filter(|&i| y[i] > 0.0 && y[i] < 1.0).collect();
            match frac.as_slice() {
                [] => break,
                [i] => {
                    let ones = group.iter().filter(|&&j| y[j] == 1.0).count();
                    y[*i] = if ones < cap && rng.random::<f64>() < y[*i] { 1.0 } else { 0.0 };
                }
                [i, j, ..] => {
                    let (i, j) = (*i, *j);
                    let up = (1.0 - y[i]).min(y[j]);
                    let down = y[i].min(1.0 - y[j]);
                    if rng.random::<f64>() * (up + down) < down {
                        y[i] += up;
                        y[j] -= up;
                    } else {
                        y[i] -= down;
                        y[j] += down;
                    }
                }
            }
        }
    }
    let out: Vec<bool> = y.iter().map(|v| *v == 1.0).collect();
    debug_assert!(is_independent(matroid, &out));
    Ok(out)
}

/// One of the two set functions on `Ω = {1, 2}` used to show that no
/// function-independent unbiased rounding into `{∅, {1}, {2}}` exists. Values
/// are linear forms in two positive parameters `(a, b)`.
#[derive(Debug, Clone, Serialize)]
pub struct DemoFamily {
    pub name: &'static str,
    pub ordering: &'static str,
    /// `(coef of a, coef of b)` for `∅, {1}, {2}, {1,2}`.
    pub table: [(f64, f64); 4],
}

impl DemoFamily {
    fn numeric(&self, a: f64, b: f64) -> TableFunction {
        TableFunction::new(self.table.iter().map(|(ca, cb)| ca * a + cb * b).collect()).expect("four-entry table")
    }

    /// Draws `(a, b)` satisfying the family's ordering.
    fn sample_params<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let lo = 0.1 + rng.random::<f64>();
        let hi = lo + 0.1 + rng.random::<f64>();
        if self.ordering == "b > a > 0" {
            (lo, hi)
        } else {
            (hi, lo)
        }
    }

    /// Probabilities `(p1, p2)` of returning `{1}` and `{2}` forced by
    /// `p1·f({1}) + p2·f({2}) = F(x)` holding for every admissible `(a, b)`.
    /// `F` is linear in `(a, b)`, so the coefficients of `a` and `b` in `F(x)`
    /// must match those on the left, where `f({1})` and `f({2})` are pure `a`
    /// and pure `b` respectively.
    pub fn solve(&self, x: [f64; 2]) -> (f64, f64) {
        let coef = |unit_a: f64, unit_b: f64| {
            MultilinearExtension::new(self.numeric(unit_a, unit_b)).multilinear_value(&x).expect("x in the unit square")
        };
        (coef(1.0, 0.0), coef(0.0, 1.0))
    }
}

/// The two families: `f({1}) = a, f({2}) = f({1,2}) = b` with `b > a`, and
/// `f({2}) = b, f({1}) = f({1,2}) = a` with `a > b`.
pub fn demo_families() -> [DemoFamily; 2] {
    [
        DemoFamily {
            name: "f({1})=a, f({2})=f({1,2})=b",
            ordering: "b > a > 0",
            table: [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, 1.0)],
        },
        DemoFamily {
            name: "f({2})=b, f({1})=f({1,2})=a",
            ordering: "a > b > 0",
            table: [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 0.0)],
        },
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoSample {
    pub x: [f64; 2],
    /// `(p1, p2)` per family.
    pub solutions: [(f64, f64); 2],
    /// Largest `|p1·a + p2·b − F(x)|` over both families at this `x`.
    pub unbiasedness_residual: f64,
    /// Largest deviation from the closed forms `(x1 − x1x2, x2)` and
    /// `(x1, x2 − x1x2)`.
    pub closed_form_residual: f64,
    /// `|p1 − p1'|` between the families.
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImpossibilityReport {
    pub ground_set: [usize; 2],
    pub independent_sets: Vec<Vec<usize>>,
    pub families: [DemoFamily; 2],
    pub samples: Vec<DemoSample>,
    pub max_unbiasedness_residual: f64,
    pub max_closed_form_residual: f64,
    /// Smallest gap between the two solutions over interior samples.
    pub min_interior_gap: f64,
}

impl ImpossibilityReport {
    /// Both solutions are unbiased for their own family and they disagree at
    /// every sampled interior point.
    pub fn demonstrates_impossibility(&self) -> bool {
        self.max_unbiasedness_residual < 1e-12 && self.max_closed_form_residual < 1e-12 && self.min_interior_gap > 0.0
    }
}

/// Solves the unbiasedness constraints for both families at 100 sampled
/// points of the open unit square and reports the disagreement.
pub fn impossibility_demo() -> ImpossibilityReport {
    let families = demo_families();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e55);
    let mut samples = Vec::with_capacity(100);
    for _ in 0..100 {
        let x = [0.01 + 0.98 * rng.random::<f64>(), 0.01 + 0.98 * rng.random::<f64>()];
        let solutions = [families[0].solve(x), families[1].solve(x)];
        let mut unbiased: f64 = 0.0;
        for (fam, (p1, p2)) in families.iter().zip(solutions) {
            let (a, b) = fam.sample_params(&mut rng);
            let f_x = MultilinearExtension::new(fam.numeric(a, b)).multilinear_value(&x).expect("x in the unit square");
            unbiased = unbiased.max((p1 * a + p2 * b - f_x).abs());
        }
        let [x1, x2] = x;
        let closed = [(x1 - x1 * x2, x2), (x1, x2 - x1 * x2)];
        let closed_res = solutions
            .iter()
            .zip(closed)
            .map(|((p1, p2), (c1, c2))| (p1 - c1).abs().max((p2 - c2).abs()))
            .fold(0.0, f64::max);
        samples.push(DemoSample {
            x,
            solutions,
            unbiasedness_residual: unbiased,
            closed_form_residual: closed_res,
            gap: (solutions[0].0 - solutions[1].0).abs(),
        });
    }
    let max_unbiasedness_residual = samples.iter().map(|s| s.unbiasedness_residual).fold(0.0, f64::max);
    let max_closed_form_residual = samples.iter().map(|s| s.closed_form_residual).fold(0.0, f64::max);
    let min_interior_gap = samples.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min);
    ImpossibilityReport {
        ground_set: [1, 2],
        independent_sets: vec![vec![], vec![1], vec![2]],
        families,
        samples,
        max_unbiasedness_residual,
        max_closed_form_residual,
        min_interior_gap,
    }
}

impl fmt::Display for ImpossibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ground set {{1, 2}}, independent sets {{∅, {{1}}, {{2}}}}")?;
        for fam in &self.families {
            writeln!(f, "family {} ({})", fam.name, fam.ordering)?;
        }
        writeln!(f, "unbiased rounding must return {{1}} w.p. p1 and {{2}} w.p. p2:")?;
        writeln!(f, "  family 1: (p1, p2) = (x1 - x1*x2, x2)")?;
        writeln!(f, "  family 2: (p1, p2) = (x1, x2 - x1*x2)")?;
        let s = &self.samples[0];
        writeln!(
            f,
            "  e.g. x = ({:.4}, {:.4}): family 1 -> ({:.4}, {:.4}), family 2 -> ({:.4}, {:.4})",
            s.x[0], s.x[1], s.solutions[0].0, s.solutions[0].1, s.solutions[1].0, s.solutions[1].1
        )?;
        writeln!(f, "samples: {}", self.samples.len())?;
        writeln!(f, "max unbiasedness residual: {:.3e}", self.max_unbiasedness_residual)?;
        writeln!(f, "max closed-form residual:  {:.3e}", self.max_closed_form_residual)?;
        writeln!(f, "min interior gap |p1 - p1'| = min x1*x2: {:.4e}", self.min_interior_gap)?;
        write!(f, "no function-independent unbiased rounding exists: {}", self.demonstrates_impossibility())
    }
}
