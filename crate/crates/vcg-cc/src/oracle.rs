//! Monte Carlo simulation of the actual mechanisms (value draws,
//! allocations, payments), independent of the quadrature path.
//!
//! Batches use counter-based per-block RNG streams keyed by (seed, block
//! index) and are reduced in block order, so estimates are bit-identical
//! for any thread count.

use crate::dist::{Example11Curve, TruncatedGpd};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Trial count, seed, and accumulation block size.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub batch: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            seed: 0,
            batch: 1 << 14,
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// A value distribution the simulator can draw from.
pub trait ValueDist: Sync {
    /// Inverse-transform draw from a uniform `u` in `[0,1)`.
    fn draw(&self, u: f64) -> f64;
    fn monopoly_reserve(&self) -> f64;
}

impl ValueDist for TruncatedGpd {
    fn draw(&self, u: f64) -> f64 {
        self.sample(u)
    }
    fn monopoly_reserve(&self) -> f64 {
        TruncatedGpd::monopoly_reserve(self)
    }
}

impl ValueDist for Example11Curve {
    fn draw(&self, u: f64) -> f64 {
        self.sample(u)
    }
    fn monopoly_reserve(&self) -> f64 {
        Example11Curve::monopoly_reserve(self)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(block)))
}

/// Run `cfg.trials` trials of `per_trial`, batched and reduced in block
/// order. `per_trial` maps a block RNG to one sample.
fn run<F>(cfg: &McConfig, per_trial: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    assert!(cfg.trials >= 1 && cfg.batch >= 1);
    let blocks = cfg.trials.div_ceil(cfg.batch);
    let partials: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(cfg.seed, b);
            let count = cfg.batch.min(cfg.trials - b * cfg.batch);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..count {
                let x = per_trial(&mut rng);
                sum += x;
                sumsq += x * x;
            }
            (sum, sumsq)
        })
        .collect();
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for (s, s2) in partials {
        sum += s;
        sumsq += s2;
    }
    let t = cfg.trials as f64;
    let mean = sum / t;
    let var = if cfg.trials > 1 {
        ((sumsq - t * mean * mean) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    McEstimate {
        mean,
        stderr: (var / t).sqrt(),
        trials: cfg.trials,
    }
}

/// Price the VCG auction charges: the (m+1)-th highest of the drawn values,
/// with the convention that the (m+1)-th highest of exactly m values is 0.
fn vcg_price(values: &mut [f64], m: usize) -> f64 {
    if m >= values.len() {
        return 0.0;
    }
    // (m+1)-th highest = element at descending index m
    let (_, price, _) = values.select_nth_unstable_by(m, |a, b| b.partial_cmp(a).unwrap());
    *price
}

/// Monte Carlo VCG revenue: m units, `buyers` i.i.d. draws, revenue
/// `m * (m+1)-th highest value` per trial.
pub fn mc_rev_vcg<D: ValueDist>(d: &D, m: u64, buyers: u64, cfg: &McConfig) -> McEstimate {
    run(cfg, |rng| {
        let mut values: Vec<f64> = (0..buyers).map(|_| d.draw(rng.gen::<f64>())).collect();
        m as f64 * vcg_price(&mut values, m as usize)
    })
}

fn opt_trial(values: &mut [f64], m: usize, reserve: f64) -> f64 {
    values.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let floor_price = if m < values.len() { values[m] } else { 0.0 };
    let price = reserve.max(floor_price);
    let winners = values[..m.min(values.len())]
        .iter()
        .filter(|&&v| v >= reserve)
        .count();
    winners as f64 * price
}

/// Monte Carlo Bayesian-optimal revenue: among the m highest of n draws,
/// those with value at least the monopoly reserve win and pay
/// `max(reserve, (m+1)-th highest value)`.
pub fn mc_rev_opt<D: ValueDist>(d: &D, m: u64, n: u64, cfg: &McConfig) -> McEstimate {
    let reserve = d.monopoly_reserve();
    run(cfg, |rng| {
        let mut values: Vec<f64> = (0..n).map(|_| d.draw(rng.gen::<f64>())).collect();
        opt_trial(&mut values, m as usize, reserve)
    })
}

/// Paired estimate of `RevVCG_{m:n+k} - gamma * RevOPT_{m:n}` with common
/// random draws: the n original values are shared, the k extra draws are
/// appended for the VCG leg only.
pub fn mc_gap<D: ValueDist>(
    d: &D,
    m: u64,
    n: u64,
    k: u64,
    gamma: f64,
    cfg: &McConfig,
) -> McEstimate {
    let reserve = d.monopoly_reserve();
    run(cfg, |rng| {
        let mut values: Vec<f64> = (0..n + k).map(|_| d.draw(rng.gen::<f64>())).collect();
        let mut vcg_values = values.clone();
        let rev_vcg = m as f64 * vcg_price(&mut vcg_values, m as usize);
        values.truncate(n as usize);
        let rev_opt = opt_trial(&mut values, m as usize, reserve);
        rev_vcg - gamma * rev_opt
    })
}
