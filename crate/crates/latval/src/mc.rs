//! Seeded, deterministic Monte Carlo plumbing.
//!
//! Work is split into fixed-size batches; batch `i` draws from a ChaCha
//! stream derived from `(seed, i)`, and per-batch tallies are integers (or
//! are reduced in batch order), so results are bit-identical for a given
//! `(seed, samples)` regardless of thread count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Spec default: enough for stderr around 1e-3 on probability estimates.
pub const DEFAULT_SAMPLES: u64 = 200_000;

const BATCH_SIZE: u64 = 8_192;
/// Redraw budget per sample before a draw is dropped as degenerate.
const MAX_RETRIES: u32 = 64;

#[derive(Debug, Clone, Copy)]
pub struct McParams {
    pub samples: u64,
    pub seed: u64,
}

impl McParams {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed }
    }

    /// Derive an independent parameter set for a sub-experiment. Streams are
    /// separated by hashing the label into the seed.
    pub fn derive(&self, label: u64) -> Self {
        // SplitMix64 step keeps derived seeds well separated.
        let mut z = self.seed.wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(label + 1));
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        McParams {
            samples: self.samples,
            seed: z ^ (z >> 31),
        }
    }
}

pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch + 1);
    rng
}

#[derive(Debug, Clone, Copy)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub dropped: u64,
}

impl Proportion {
    pub fn value(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.hits as f64 / self.trials as f64
        }
    }

    /// Binomial standard error of the estimated proportion.
    pub fn stderr(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let p = self.value();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Estimates `P[event]` with per-sample rejection: the closure may return
/// `None` (degenerate draw, e.g. an LP margin hit), in which case the draw
/// is retried with fresh randomness and eventually dropped.
pub fn estimate_proportion<F>(params: McParams, event: F) -> Proportion
where
    F: Fn(&mut ChaCha8Rng) -> Option<bool> + Sync,
{
    let batches = params.samples.div_ceil(BATCH_SIZE);
    let tallies: Vec<(u64, u64, u64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(params.seed, b);
            let in_batch = BATCH_SIZE.min(params.samples - b * BATCH_SIZE);
            let mut hits = 0u64;
            let mut trials = 0u64;
            let mut dropped = 0u64;
            for _ in 0..in_batch {
                let mut retry = 0;
                loop {
                    match event(&mut rng) {
                        Some(true) => {
                            hits += 1;
                            trials += 1;
                            break;
                        }
                        Some(false) => {
                            trials += 1;
                            break;
                        }
                        None => {
                            retry += 1;
                            if retry > MAX_RETRIES {
                                dropped += 1;
                                break;
                            }
                        }
                    }
                }
            }
            (hits, trials, dropped)
        })
        .collect();
    let mut total = (0u64, 0u64, 0u64);
    for (h, t, d) in tallies {
        total.0 += h;
        total.1 += t;
        total.2 += d;
    }
    Proportion {
        hits: total.0,
        trials: total.1,
        dropped: total.2,
    }
}

#[derive(Debug, Clone)]
pub struct BucketCounts {
    pub counts: Vec<u64>,
    pub trials: u64,
    pub dropped: u64,
}

impl BucketCounts {
    pub fn proportion(&self, k: usize) -> Proportion {
        Proportion {
            hits: self.counts[k],
            trials: self.trials,
            dropped: self.dropped,
        }
    }
}

/// Multinomial analogue of [`estimate_proportion`]: the closure assigns each
/// accepted draw to one of `n_buckets`.
pub fn estimate_buckets<F>(params: McParams, n_buckets: usize, event: F) -> BucketCounts
where
    F: Fn(&mut ChaCha8Rng) -> Option<usize> + Sync,
{
    let batches = params.samples.div_ceil(BATCH_SIZE);
    let tallies: Vec<(Vec<u64>, u64, u64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(params.seed, b);
            let in_batch = BATCH_SIZE.min(params.samples - b * BATCH_SIZE);
            let mut counts = vec![0u64; n_buckets];
            let mut trials = 0u64;
            let mut dropped = 0u64;
            for _ in 0..in_batch {
                let mut retry = 0;
                loop {
                    match event(&mut rng) {
                        Some(k) => {
                            counts[k] += 1;
                            trials += 1;
                            break;
                        }
                        None => {
                            retry += 1;
                            if retry > MAX_RETRIES {
                                dropped += 1;
                                break;
                            }
                        }
                    }
                }
            }
            (counts, trials, dropped)
        })
        .collect();
    let mut counts = vec![0u64; n_buckets];
    let mut trials = 0u64;
    let mut dropped = 0u64;
    for (c, t, d) in tallies {
        for (acc, x) in counts.iter_mut().zip(c) {
            *acc += x;
        }
        trials += t;
        dropped += d;
    }
    BucketCounts {
        counts,
        trials,
        dropped,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Mean of a bounded statistic; reduction runs in fixed batch order.
pub fn estimate_mean<F>(params: McParams, stat: F) -> MeanEstimate
where
    F: Fn(&mut ChaCha8Rng) -> Option<f64> + Sync,
{
    let batches = params.samples.div_ceil(BATCH_SIZE);
    let tallies: Vec<(f64, f64, u64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(params.seed, b);
            let in_batch = BATCH_SIZE.min(params.samples - b * BATCH_SIZE);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            let mut trials = 0u64;
            for _ in 0..in_batch {
                let mut retry = 0;
                loop {
                    match stat(&mut rng) {
                        Some(v) => {
                            sum += v;
                            sum_sq += v * v;
                            trials += 1;
                            break;
                        }
                        None => {
                            retry += 1;
                            if retry > MAX_RETRIES {
                                break;
                            }
                        }
                    }
                }
            }
            (sum, sum_sq, trials)
        })
        .collect();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut trials = 0u64;
    for (s, s2, t) in tallies {
        sum += s;
        sum_sq += s2;
        trials += t;
    }
    let mean = if trials == 0 { 0.0 } else { sum / trials as f64 };
    let var = if trials < 2 {
        0.0
    } else {
        ((sum_sq - sum * sum / trials as f64) / (trials as f64 - 1.0)).max(0.0)
    };
    MeanEstimate {
        mean,
        stderr: (var / trials.max(1) as f64).sqrt(),
        trials,
    }
}

/// Standard normal draw (Box-Muller; one value per call keeps streams simple).
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        if u > f64::MIN_POSITIVE {
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

/// Uniform direction on the unit sphere of R^dim.
pub fn sphere_sample(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
        let n = crate::linalg::norm_f64(&v);
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// `rows x cols` matrix of independent standard Gaussians, row-major.
pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| standard_normal(rng)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportion_estimate_is_deterministic_and_sane() {
        let params = McParams::new(50_000, 42);
        let run = || {
            estimate_proportion(params, |rng| {
                let x: f64 = rng.gen();
                Some(x < 0.25)
            })
        };
        let a = run();
        let b = run();
        assert_eq!(a.hits, b.hits);
        assert!((a.value() - 0.25).abs() < 4.0 * a.stderr() + 1e-3);
    }

    #[test]
    fn sphere_samples_are_unit_and_balanced() {
        let mut rng = batch_rng(7, 0);
        let mut mean = vec![0.0; 3];
        let n = 20_000;
        for _ in 0..n {
            let v = sphere_sample(&mut rng, 3);
            assert!((crate::linalg::norm_f64(&v) - 1.0).abs() < 1e-9);
            for (m, x) in mean.iter_mut().zip(&v) {
                *m += x;
            }
        }
        for m in mean {
            assert!((m / n as f64).abs() < 0.02);
        }
    }

    #[test]
    fn normal_moments() {
        let mut rng = batch_rng(3, 0);
        let n = 100_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = standard_normal(&mut rng);
            s += x;
            s2 += x * x;
        }
        assert!((s / n as f64).abs() < 0.02);
        assert!((s2 / n as f64 - 1.0).abs() < 0.03);
    }

    #[test]
    fn derived_seeds_differ() {
        let p = McParams::new(100, 5);
        assert_ne!(p.derive(0).seed, p.derive(1).seed);
        assert_ne!(p.derive(0).seed, p.seed);
    }
}
