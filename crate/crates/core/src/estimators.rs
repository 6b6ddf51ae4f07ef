//! Ball/sphere sampling, δ-smoothing, the one-point gradient estimator, and
//! the momentum-averaged gradient estimate with its two step schedules.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::objectives::ContinuousObjective;
use crate::point::Point;

/// Uniform draw from the unit sphere `S^{d−1}` (normalized Gaussian).
pub fn sphere_sample<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Point {
    loop {
        let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = crate::point::norm(&g);
        if n > 1e-300 {
            return Point::new(g.into_iter().map(|v| v / n).collect());
        }
    }
}

/// Uniform draw from the unit ball `B^d`: a sphere direction scaled by `U^{1/d}`.
pub fn ball_sample<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Point {
    let dir = sphere_sample(rng, d);
    let radius = rng.random::<f64>().powf(1.0 / d as f64);
    dir.scaled(radius)
}

/// Smoothing radius paired with the ambient dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingSpec {
    delta: f64,
    dim: usize,
}

impl SmoothingSpec {
    pub fn new(delta: f64, dim: usize) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) || dim == 0 {
            return Err(Error::InvalidParameter("smoothing needs delta > 0 and dim ≥ 1".into()));
        }
        Ok(SmoothingSpec { delta, dim })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Monte-Carlo estimate of `F̂_δ(x) = E_{v∼B^d}[F(x + δv)]` with its
/// standard error.
pub fn smoothed_value_with_error<F, R>(
    f: &F,
    x: &[f64],
    spec: SmoothingSpec,
    n: usize,
    rng: &mut R,
) -> Result<(f64, f64)>
where
    F: ContinuousObjective + ?Sized,
    R: Rng + ?Sized,
{
    check_dim(spec.dim, x.len())?;
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let (mut sum, mut sq) = (0.0, 0.0);
    let mut probe = Point::zeros(spec.dim);
    for _ in 0..n {
        let v = ball_sample(rng, spec.dim);
        for i in 0..spec.dim {
            probe[i] = x[i] + spec.delta * v[i];
        }
        let val = f.value(&probe)?;
        sum += val;
        sq += val * val;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 { ((sq - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
    Ok((mean, (var / nf).sqrt()))
}

pub fn smoothed_value<F, R>(f: &F, x: &[f64], spec: SmoothingSpec, n: usize, rng: &mut R) -> Result<f64>
where
    F: ContinuousObjective + ?Sized,
    R: Rng + ?Sized,
{
    Ok(smoothed_value_with_error(f, x, spec, n, rng)?.0)
}

/// Output of [`one_point_grad`]: the estimate and the exact point that was
/// probed (and must be the point played).
#[derive(Debug, Clone, PartialEq)]
pub struct OnePointEstimate {
    pub grad: Point,
    pub probe: Point,
    pub direction: Point,
    pub observed: f64,
}

/// Draws `u ∼ S^{d−1}`, queries `value_at(x + δu)` once and returns
/// `(d/δ)·F(x + δu)·u`.
pub fn one_point_grad<V, R>(mut value_at: V, x: &[f64], spec: SmoothingSpec, rng: &mut R) -> Result<OnePointEstimate>
where
    V: FnMut(&[f64]) -> Result<f64>,
    R: Rng + ?Sized,
{
    check_dim(spec.dim, x.len())?;
    let u = sphere_sample(rng, spec.dim);
    let mut probe = Point::from(x);
    probe.axpy(spec.delta, &u);
    let observed = value_at(&probe)?;
    let grad = u.scaled(spec.dim as f64 / spec.delta * observed);
    Ok(OnePointEstimate { grad, probe, direction: u, observed })
}

/// Running gradient estimate `d^{(k)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumEstimate {
    pub d_vec: Point,
    pub k: usize,
}

impl MomentumEstimate {
    /// `d^{(0)} = 0`.
    pub fn zero(dim: usize) -> Self {
        MomentumEstimate { d_vec: Point::zeros(dim), k: 0 }
    }
}

/// `d_new = (1 − ρ)·prev + ρ·g`.
pub fn momentum_update(prev: &MomentumEstimate, g: &[f64], rho: f64) -> Result<MomentumEstimate> {
    check_dim(prev.d_vec.dim(), g.len())?;
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!("rho must lie in (0, 1], got {rho}")));
    }
    let d_vec = Point::new(prev.d_vec.iter().zip(g).map(|(p, gi)| (1.0 - rho) * p + rho * gi).collect());
    Ok(MomentumEstimate { d_vec, k: prev.k + 1 })
}

/// Step `ρ_k` for the full-information algorithm: `2/(k+3)^{2/3}` for
/// `k ≤ K/2 + 1`, then `1.5/(K−k+2)^{2/3}`. `K` must be even.
pub fn rho_schedule_mono(k: usize, big_k: usize) -> Result<f64> {
    if big_k == 0 || big_k % 2 == 1 {
        return Err(Error::InvalidParameter(format!("K must be even and positive, got {big_k}")));
    }
    if k == 0 || k > big_k {
        return Err(Error::InvalidParameter(format!("k must lie in 1..={big_k}, got {k}")));
    }
    Ok(if k <= big_k / 2 + 1 {
        2.0 / ((k + 3) as f64).powf(2.0 / 3.0)
    } else {
        1.5 / ((big_k - k + 2) as f64).powf(2.0 / 3.0)
    })
}

/// Step `ρ_k = 2/(k+2)^{2/3}` for the bandit algorithms.
pub fn rho_schedule_bandit(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be ≥ 1".into()));
    }
    Ok(2.0 / ((k + 2) as f64).powf(2.0 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::QuadraticDR;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_samples_are_unit_and_balanced_in_one_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s7 = sphere_sample(&mut rng, 7);
        assert!((s7.norm() - 1.0).abs() < 1e-12);
        let n = 10_000;
        let plus = (0..n)
            .filter(|_| {
                let s = sphere_sample(&mut rng, 1);
                assert!(s[0] == 1.0 || s[0] == -1.0);
                s[0] > 0.0
            })
            .count();
        assert!((plus as f64 / n as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn ball_samples_are_centered_and_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let d = 3;
        let mut sum = [0.0; 3];
        let mut sq = [0.0; 3];
        for _ in 0..n {
            let b = ball_sample(&mut rng, d);
            assert!(b.norm() <= 1.0 + 1e-12);
            for i in 0..d {
                sum[i] += b[i];
                sq[i] += b[i] * b[i];
            }
        }
        for i in 0..d {
            let mean = sum[i] / n as f64;
            let sd = (sq[i] / n as f64 - mean * mean).sqrt();
            assert!(mean.abs() <= 4.0 * sd / (n as f64).sqrt());
        }
    }

    #[test]
    fn smoothing_is_exact_for_linear_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = QuadraticDR::linear(Point::from([1.0, 2.0]), Point::from([1.0, 1.0])).unwrap();
        let spec = SmoothingSpec::new(0.1, 2).unwrap();
        let (m, se) = smoothed_value_with_error(&f, &[0.5, 0.5], spec, 20_000, &mut rng).unwrap();
        assert!((m - 1.5).abs() <= 4.0 * se + 1e-12);

        let tiny = SmoothingSpec::new(1e-8, 2).unwrap();
        let v = smoothed_value(&f, &[0.3, 0.4], tiny, 10, &mut rng).unwrap();
        assert!((v - 1.1).abs() < 1e-6);
    }

    #[test]
    fn smoothing_rejects_probes_outside_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = QuadraticDR::linear(Point::from([1.0, 2.0]), Point::from([1.0, 1.0])).unwrap();
        let spec = SmoothingSpec::new(0.5, 2).unwrap();
        assert!(smoothed_value(&f, &[0.0, 0.0], spec, 100, &mut rng).is_err());
    }

    #[test]
    fn one_point_estimate_returns_probe_and_scaled_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = SmoothingSpec::new(0.2, 3).unwrap();
        let x = [0.5, 0.5, 0.5];
        let est = one_point_grad(|p| Ok(p.iter().sum()), &x, spec, &mut rng).unwrap();
        let expected_probe = Point::from(&x[..]).add(&est.direction.scaled(0.2));
        assert_eq!(est.probe, expected_probe);
        assert_eq!(est.observed, expected_probe.iter().sum::<f64>());
        let want = est.direction.scaled(3.0 / 0.2 * est.observed);
        assert_eq!(est.grad, want);
        let failing = one_point_grad(|_| Err(Error::OutsideDomain("probe".into())), &x, spec, &mut rng);
        assert!(failing.is_err());
    }

    #[test]
    fn one_point_estimate_is_unbiased_for_linear_and_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 3;
        let spec = SmoothingSpec::new(0.25, d).unwrap();
        let c = [1.0, -0.5, 2.0];
        let x = [0.5, 0.5, 0.5];
        let n = 100_000;
        for constant in [true, false] {
            let mut sum = vec![0.0; d];
            let mut sq = vec![0.0; d];
            for _ in 0..n {
                let est =
                    one_point_grad(|p| Ok(if constant { 3.0 } else { crate::point::dot(&c, p) }), &x, spec, &mut rng)
                        .unwrap();
                for i in 0..d {
                    sum[i] += est.grad[i];
                    sq[i] += est.grad[i] * est.grad[i];
                }
            }
            for i in 0..d {
                let mean = sum[i] / n as f64;
                let sd = (sq[i] / n as f64 - mean * mean).sqrt();
                let target = if constant { 0.0 } else { c[i] };
                assert!((mean - target).abs() <= 4.0 * sd / (n as f64).sqrt(), "coord {i}");
            }
        }
    }

    #[test]
    fn momentum_examples() {
        let prev = MomentumEstimate { d_vec: Point::from([1.0, 0.0]), k: 0 };
        let full = momentum_update(&prev, &[0.3, 0.7], 1.0).unwrap();
        assert_eq!(full.d_vec, Point::from([0.3, 0.7]));
        let half = momentum_update(&prev, &[0.0, 1.0], 0.5).unwrap();
        assert_eq!(half.d_vec, Point::from([0.5, 0.5]));
        assert_eq!(half.k, 1);
        assert!(momentum_update(&prev, &[0.0, 1.0], 0.0).is_err());
        assert!(momentum_update(&prev, &[0.0, 1.0], 1.5).is_err());
        assert!(momentum_update(&prev, &[0.0], 0.5).is_err());

        // d_k = (1 − (1−ρ)^k)·g for constant g and ρ
        let g = [2.0, -1.0];
        let rho = 0.3;
        let mut m = MomentumEstimate::zero(2);
        for k in 1..=20 {
            m = momentum_update(&m, &g, rho).unwrap();
            let factor = 1.0 - (1.0 - rho).powi(k);
            for (di, gi) in m.d_vec.iter().zip(g) {
                assert!((di - factor * gi).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mono_schedule_examples() {
        assert!((rho_schedule_mono(1, 10).unwrap() - 0.79370).abs() < 1e-5);
        assert!((rho_schedule_mono(1, 1000).unwrap() - 2.0 / 4f64.powf(2.0 / 3.0)).abs() < 1e-15);
        assert!((rho_schedule_mono(8, 10).unwrap() - 0.59528).abs() < 1e-5);
        assert!((rho_schedule_mono(6, 10).unwrap() - 0.46224).abs() < 1e-5);
        assert!(rho_schedule_mono(1, 9).is_err());
        assert!(rho_schedule_mono(0, 10).is_err());
        assert!(rho_schedule_mono(11, 10).is_err());
    }

    #[test]
    fn bandit_schedule_examples() {
        assert!((rho_schedule_bandit(1).unwrap() - 0.96150).abs() < 1e-5);
        assert!((rho_schedule_bandit(6).unwrap() - 0.5).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for k in 1..2000 {
            let r = rho_schedule_bandit(k).unwrap();
            assert!(r > 0.0 && r <= 1.0 && r < prev);
            prev = r;
        }
        assert!(rho_schedule_bandit(0).is_err());
    }

    #[test]
    fn mono_schedule_has_inverted_bell_shape() {
        for big_k in [2, 4, 10, 64, 1000] {
            let rho: Vec<f64> = (1..=big_k).map(|k| rho_schedule_mono(k, big_k).unwrap()).collect();
            assert!(rho.iter().all(|r| *r > 0.0 && *r <= 1.0));
            let mid = big_k / 2 + 1;
            for k in 1..mid.min(big_k) {
                assert!(rho[k] < rho[k - 1]);
            }
            for k in (mid + 1)..big_k {
                assert!(rho[k] > rho[k - 1]);
            }
        }
    }
}
