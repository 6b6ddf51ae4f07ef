//! Brute-force reference computations shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submax::objectives::{mask_to_set, SetObjective};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Σ_S f(S) Π_{i∈S} x_i Π_{i∉S} (1 − x_i)` by enumerating all `2^d` sets.
pub fn enumerate_multilinear<F: SetObjective + ?Sized>(f: &F, x: &[f64]) -> f64 {
    let d = x.len();
    (0..1usize << d)
        .map(|mask| {
            let s = mask_to_set(mask, d);
            let p: f64 = s.iter().zip(x).map(|(&b, &xi)| if b { xi } else { 1.0 - xi }).product();
            p * f.value(&s)
        })
        .sum()
}

/// Central differences with step `h`.
pub fn central_diff<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut hi = x.to_vec();
            let mut lo = x.to_vec();
            hi[i] += h;
            lo[i] -= h;
            (f(&hi) - f(&lo)) / (2.0 * h)
        })
        .collect()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Per-coordinate sample mean and standard deviation.
pub fn mean_and_sd(samples: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let d = samples[0].len();
    let n = samples.len() as f64;
    let mut mean = vec![0.0; d];
    for s in samples {
        for i in 0..d {
            mean[i] += s[i] / n;
        }
    }
    let mut var = vec![0.0; d];
    for s in samples {
        for i in 0..d {
            var[i] += (s[i] - mean[i]).powi(2) / (n - 1.0);
        }
    }
    (mean, var.into_iter().map(f64::sqrt).collect())
}

pub fn uniform_point<R: Rng>(rng: &mut R, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
}

/// Replays a fixed list of `u64` words; with words `j << 62` the standard
/// `f64` sample is exactly `j/4`.
pub struct ScriptedRng {
    words: Vec<u64>,
    pos: usize,
}

impl ScriptedRng {
    pub fn new(words: Vec<u64>) -> Self {
        ScriptedRng { words, pos: 0 }
    }
}

impl RngCore for ScriptedRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let w = self.words[self.pos];
        self.pos += 1;
        w
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let w = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&w[..chunk.len()]);
        }
    }
}
