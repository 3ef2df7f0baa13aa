//! Order-statistic densities of uniform samples, the special functions they
//! need, and adaptive quadrature of revenue curves against those densities.

use crate::error::{Error, Result};
use std::cell::Cell;

/// Density of the m-th smallest of n i.i.d. uniform draws.
///
/// Degenerate (point mass at 1) when `m > n`; callers branch on that case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderStatDensity {
    pub m: u64,
    pub n: u64,
}

impl OrderStatDensity {
    pub fn is_degenerate(&self) -> bool {
        self.m > self.n
    }
}

/// Tolerances and recursion limit for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_depth: 60,
        }
    }
}

impl QuadratureConfig {
    pub fn validated(self) -> Result<Self> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be > 0".into()));
        }
        if self.max_depth < 10 {
            return Err(Error::InvalidParameter("max_depth must be >= 10".into()));
        }
        Ok(self)
    }
}

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// Natural log of the gamma function (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// ln of the binomial coefficient C(n, k).
pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// ln of the Beta function B(a, b).
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Log-density of the m-th smallest of n uniform draws at quantile `q`.
///
/// `ln η_{m:n}(q) = ln n + ln C(n-1, m-1) + (n-m) ln(1-q) + (m-1) ln q`,
/// computed via log-gamma so n near 10^3 does not overflow.
pub fn log_density(m: u64, n: u64, q: f64) -> Result<f64> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "order index m = {m} must satisfy 1 <= m <= n = {n} (m > n is the degenerate case)"
        )));
    }
    debug_assert!(q > 0.0 && q < 1.0);
    let mut acc = (n as f64).ln() + ln_choose(n - 1, m - 1);
    if n > m {
        acc += (n - m) as f64 * (1.0 - q).ln();
    }
    if m > 1 {
        acc += (m - 1) as f64 * q.ln();
    }
    Ok(acc)
}

/// Regularized incomplete beta function I_x(a, b).
///
/// Continued fraction (modified Lentz) with the symmetry switch at
/// x = (a+1)/(a+b+2).
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta parameters must be positive, got a = {a}, b = {b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "beta argument must lie in [0,1], got {x}"
        )));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(x);
    }
    let front = (a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_cont_frac(a, b, x) / a)
    } else {
        Ok(1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b)
    }
}

fn beta_cont_frac(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=1000u32 {
        let m = m as f64;
        let m2 = 2.0 * m;
        // even step
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        // odd step
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// H_{n+t} - H_n = sum_{j=n+1}^{n+t} 1/j, accumulated from the smallest terms.
pub fn harmonic_diff(n: u64, t: u64) -> f64 {
    let mut acc = 0.0;
    for j in (n + 1..=n + t).rev() {
        acc += 1.0 / j as f64;
    }
    acc
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One G7-K15 panel: returns (kronrod estimate, error estimate).
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    let mut resabs = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (flo, fhi) = if x == 0.0 {
            let v = f(center);
            (v, 0.0)
        } else {
            (f(center - half * x), f(center + half * x))
        };
        let fsum = if x == 0.0 { flo } else { flo + fhi };
        kronrod += wk * fsum;
        resabs += wk * (flo.abs() + fhi.abs());
        // odd Kronrod indices are the embedded Gauss nodes
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        } else if x == 0.0 {
            gauss += WG[3] * fsum;
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    let raw = (kronrod - gauss).abs();
    // sharpen the raw difference the way QUADPACK does
    let resabs = resabs * half.abs();
    let err = if resabs > 0.0 && raw > 0.0 {
        raw.min(resabs * (200.0 * raw / resabs).powf(1.5).min(1.0))
    } else {
        raw
    };
    (kronrod, err)
}

/// Adaptively integrate `f` over `[a, b]`, bisecting until the local error
/// clears the panel budget or `max_depth` is reached.
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    depth: u32,
) -> (f64, f64) {
    let (val, err) = gk15(f, a, b);
    if err <= abs_tol.max(rel_tol * val.abs()) || depth == 0 {
        return (val, err);
    }
    let mid = 0.5 * (a + b);
    let (lv, le) = adaptive(f, a, mid, 0.5 * abs_tol, rel_tol, depth - 1);
    let (rv, re) = adaptive(f, mid, b, 0.5 * abs_tol, rel_tol, depth - 1);
    (lv + rv, le + re)
}

/// Integrate `f` over `[lo, hi]` splitting at the given interior breakpoints.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&q| q > lo && q < hi)
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let segments = edges.len() - 1;
    let mut total = 0.0;
    let mut err = 0.0;
    for w in edges.windows(2) {
        let (v, e) = adaptive(
            &f,
            w[0],
            w[1],
            cfg.abs_tol / segments as f64,
            cfg.rel_tol,
            cfg.max_depth,
        );
        total += v;
        err += e;
    }
    if err > cfg.abs_tol.max(cfg.rel_tol * total.abs()) * 10.0 {
        return Err(Error::QuadratureNonConvergence {
            estimate: total,
            error_bound: err,
        });
    }
    Ok(total)
}

/// Expectation of `f(q)` under the order-statistic density η_{m:n}.
///
/// Splits at every supplied breakpoint (revenue-curve kinks). For `m > n`
/// the density is a point mass at 1 and the result is `f(1)` exactly.
/// Negative values of `f` are rejected.
pub fn expect_under(
    m: u64,
    n: u64,
    f: impl Fn(f64) -> f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("order index m must be >= 1".into()));
    }
    if m > n {
        let v = f(1.0);
        if v < 0.0 {
            return Err(Error::InvalidParameter("integrand must be nonnegative".into()));
        }
        return Ok(v);
    }
    let negative_seen = Cell::new(false);
    let integrand = |q: f64| {
        let v = f(q);
        if v < -1e-12 {
            negative_seen.set(true);
        }
        v * log_density(m, n, q).expect("1 <= m <= n checked").exp()
    };
    // The density concentrates around its mean m/(n+1); add it and the
    // +/- 6 sigma window as split points so the first panels see the peak.
    let mean = m as f64 / (n + 1) as f64;
    let sd = (mean * (1.0 - mean) / (n as f64 + 2.0)).sqrt();
    let mut cuts: Vec<f64> = breakpoints.to_vec();
    cuts.push(mean);
    cuts.push((mean - 6.0 * sd).max(0.0));
    cuts.push((mean + 6.0 * sd).min(1.0));
    let result = integrate(integrand, 0.0, 1.0, &cuts, cfg)?;
    if negative_seen.get() {
        return Err(Error::InvalidParameter("integrand must be nonnegative".into()));
    }
    Ok(result)
}
