//! Competition complexity: certified finite-market search over the
//! worst-case truncated generalized Pareto family, plus closed-form
//! asymptotics and the finite-market sandwich bounds.

use crate::dist::r_max;
use crate::error::{Error, Result};
use crate::revenue::{rev_opt_tgpd_closed, rev_vcg_tgpd_closed};
use rayon::prelude::*;
use serde::Serialize;

/// Mechanism whose competition complexity is being searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mechanism {
    Vcg,
    SlVcg,
}

/// One competition-complexity query.
#[derive(Debug, Clone, Copy)]
pub struct CcQuery {
    pub lambda: f64,
    pub m: u64,
    pub n: u64,
    pub gamma: f64,
    pub mechanism: Mechanism,
    /// Grid points over the truncation range; 172 gives step ~ 0.01 on [1, e].
    pub grid_points: usize,
    /// Truncation cap used when the legal range is unbounded (lambda = 1).
    pub r_cap: f64,
    /// Safety factor on the empirical slope bound.
    pub safety: f64,
    /// Abort threshold for the k-ascent (defaults to 4n when `None`).
    pub k_ceiling: Option<u64>,
}

impl CcQuery {
    pub fn new(lambda: f64, m: u64, n: u64, gamma: f64, mechanism: Mechanism) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [0,1], got {lambda}"
            )));
        }
        if m == 0 || m > n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= m <= n, got m = {m}, n = {n}"
            )));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0,1], got {gamma}"
            )));
        }
        Ok(Self {
            lambda,
            m,
            n,
            gamma,
            mechanism,
            grid_points: 172,
            r_cap: 1e3,
            safety: 2.0,
            k_ceiling: None,
        })
    }

    fn ceiling(&self) -> u64 {
        self.k_ceiling.unwrap_or(4 * self.n)
    }

    fn r_hi(&self) -> f64 {
        r_max(self.lambda).min(self.r_cap)
    }
}

/// Outcome of a competition-complexity search.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CcResult {
    /// Smallest certified number of additional buyers.
    pub k: u64,
    /// Truncation attaining the minimum margin at that k.
    pub worst_r: f64,
    /// min over r of RevVCG - gamma * RevOPT at k.
    pub margin: f64,
    pub certified: bool,
    /// Certifying supply (supply-limiting mechanism only).
    pub supply: Option<u64>,
    /// True when the answer was returned from a closed form rather than
    /// grid certification (lambda = 1, gamma = 1).
    pub analytic: bool,
    /// True when some examined k had a minimum margin inside (-1e-9, 0),
    /// i.e. the certificate refused to decide on noise and k was bumped.
    pub boundary: bool,
}

/// Outcome of one worst-case scan over the truncation grid.
#[derive(Debug, Clone, Copy)]
pub struct WorstGap {
    pub min_margin: f64,
    pub argmin_r: f64,
    pub certified: bool,
}

/// VCG revenue over the parametric family, covering the degenerate
/// balanced case m = N (point-mass order statistic at quantile 1).
fn rev_vcg_family(lambda: f64, r: f64, m: u64, buyers: u64) -> Result<f64> {
    if m < buyers {
        if r == 1.0 {
            // point mass at value 1: every unit sells at price 1
            return Ok(m as f64);
        }
        rev_vcg_tgpd_closed(lambda, r, m, buyers)
    } else if m == buyers {
        // eta_{m:m-1} is a point mass at 1; R(1) = 1 iff r = 1, else 0.
        Ok(if r == 1.0 { buyers as f64 } else { 0.0 })
    } else {
        Err(Error::InvalidParameter(format!(
            "m = {m} exceeds buyer count {buyers}"
        )))
    }
}

fn rev_opt_family(lambda: f64, r: f64, m: u64, n: u64) -> Result<f64> {
    if r == 1.0 {
        return Ok(m as f64);
    }
    rev_opt_tgpd_closed(lambda, r, m, n)
}

// Refinement controls for the Lipschitz certificate.
const WIDTH_FLOOR: f64 = 1e-7;
const NOISE_BAND: f64 = 1e-9;
const REFINE_EVAL_BUDGET: usize = 50_000;

/// Minimum of `RevVCG_{s:n+k} - gamma * RevOPT_{m:n}` over the truncation
/// grid, with Lipschitz-guided interval refinement.
///
/// `supply` is the number of units the augmented VCG run sells (equal to `m`
/// for the plain mechanism). Intervals whose endpoint margins do not clear
/// the slope bound `L*h/2` are bisected until they do, a negative witness is
/// found, or the interval is narrower than the resolution floor.
pub fn worst_gap(q: &CcQuery, k: u64, supply: u64) -> Result<WorstGap> {
    let r_lo = 1.0;
    let r_hi = q.r_hi();
    let grid = q.grid_points.max(10);

    let margin = |r: f64| -> Result<f64> {
        let vcg = rev_vcg_family(q.lambda, r, supply, q.n + k)?;
        let opt = rev_opt_family(q.lambda, r, q.m, q.n)?;
        Ok(vcg - q.gamma * opt)
    };

    // grid pass, data-parallel, reduced in index order
    let rs: Vec<f64> = (0..grid)
        .map(|i| r_lo + (r_hi - r_lo) * i as f64 / (grid - 1) as f64)
        .collect();
    let gs: Vec<f64> = rs
        .par_iter()
        .map(|&r| margin(r))
        .collect::<Result<Vec<_>>>()?;

    fn note(min_margin: &mut f64, argmin_r: &mut f64, r: f64, g: f64) {
        if g < *min_margin {
            *min_margin = g;
            *argmin_r = r;
        }
    }
    let mut min_margin = f64::INFINITY;
    let mut argmin_r = r_lo;
    for (&r, &g) in rs.iter().zip(gs.iter()) {
        note(&mut min_margin, &mut argmin_r, r, g);
    }

    // empirical slope bound with safety factor
    let mut slope: f64 = 0.0;
    for i in 1..grid {
        let s = ((gs[i] - gs[i - 1]) / (rs[i] - rs[i - 1])).abs();
        slope = slope.max(s);
    }
    let lipschitz = q.safety * slope.max(1e-12);

    // interval refinement
    let mut stack: Vec<(f64, f64, f64, f64)> = (1..grid)
        .map(|i| (rs[i - 1], gs[i - 1], rs[i], gs[i]))
        .collect();
    // examine leftmost intervals first so argmin ties resolve toward small r
    stack.reverse();
    let mut evals = 0usize;
    let mut certified = true;
    while let Some((r0, g0, r1, g1)) = stack.pop() {
        if min_margin < -NOISE_BAND {
            // negative witness already in hand; no need to keep refining
            return Ok(WorstGap {
                min_margin,
                argmin_r,
                certified: true,
            });
        }
        let h = r1 - r0;
        let endpoint_min = g0.min(g1);
        if endpoint_min >= lipschitz * h / 2.0 {
            continue; // cannot dip below zero inside
        }
        if h < WIDTH_FLOOR {
            // resolution floor: accept unless an endpoint is already negative
            if endpoint_min < -NOISE_BAND {
                return Ok(WorstGap {
                    min_margin,
                    argmin_r,
                    certified: true,
                });
            }
            continue;
        }
        if evals >= REFINE_EVAL_BUDGET {
            certified = false;
            break;
        }
        let rm = 0.5 * (r0 + r1);
        let gm = margin(rm)?;
        evals += 1;
        note(&mut min_margin, &mut argmin_r, rm, gm);
        // push right half first so the left half is examined next
        stack.push((rm, gm, r1, g1));
        stack.push((r0, g0, rm, gm));
    }

    Ok(WorstGap {
        min_margin,
        argmin_r,
        certified,
    })
}

/// Whether `k` additional buyers certify the target at some supply, and the
/// certifying data. For the plain VCG mechanism the supply is fixed at `m`.
fn try_k(q: &CcQuery, k: u64) -> Result<(bool, WorstGap, Option<u64>, bool)> {
    let supplies: Vec<u64> = match q.mechanism {
        Mechanism::Vcg => vec![q.m],
        Mechanism::SlVcg => {
            // seed at ceil(gamma * m), expand outward
            let s0 = ((q.gamma * q.m as f64).ceil() as u64).clamp(1, q.m);
            let mut order = vec![s0];
            let mut delta = 1u64;
            loop {
                let mut grew = false;
                if s0 + delta <= q.m {
                    order.push(s0 + delta);
                    grew = true;
                }
                if s0 > delta {
                    order.push(s0 - delta);
                    grew = true;
                }
                if !grew {
                    break;
                }
                delta += 1;
            }
            order
        }
    };

    let mut best: Option<WorstGap> = None;
    let mut boundary = false;
    for s in supplies {
        let gap = worst_gap(q, k, s)?;
        if gap.min_margin > -NOISE_BAND && gap.min_margin < 0.0 {
            boundary = true;
        }
        if gap.certified && gap.min_margin >= 0.0 {
            return Ok((true, gap, Some(s), boundary));
        }
        let better = match best {
            None => true,
            Some(b) => gap.min_margin > b.min_margin,
        };
        if better {
            best = Some(gap);
        }
    }
    Ok((false, best.unwrap(), None, boundary))
}

fn search(q: &CcQuery) -> Result<CcResult> {
    let ceiling = q.ceiling();
    let start = if q.lambda == 0.0 && q.m == q.n && q.gamma == 1.0 && q.mechanism == Mechanism::Vcg
    {
        thm32_bounds(q.n).0.floor() as u64
    } else {
        0
    };

    let mut boundary_seen = false;
    let mut check = |k: u64| -> Result<(bool, WorstGap, Option<u64>)> {
        let (pass, gap, s, boundary) = try_k(q, k)?;
        boundary_seen |= boundary;
        Ok((pass, gap, s))
    };

    // exponential ascent to bracket the answer
    let mut lo_fail: Option<u64> = None; // largest known failing k
    let mut k = start;
    let mut step = 1u64;
    let (mut pass, mut gap, mut supply) = check(k)?;
    while !pass {
        lo_fail = Some(k);
        if k >= ceiling {
            return Err(Error::KCeiling { ceiling });
        }
        k = (k + step).min(ceiling);
        step *= 2;
        let r = check(k)?;
        pass = r.0;
        gap = r.1;
        supply = r.2;
    }

    // binary search between the bracketing pair
    let mut hi_pass = k;
    let mut hi_gap = gap;
    let mut hi_supply = supply;
    let mut lo = match lo_fail {
        Some(l) => l,
        None => {
            // passed immediately at the start point; nothing below start can
            // pass when start came from the theorem lower bound, and start=0
            // is already minimal otherwise
            return Ok(CcResult {
                k: hi_pass,
                worst_r: hi_gap.argmin_r,
                margin: hi_gap.min_margin,
                certified: hi_gap.certified,
                supply: if q.mechanism == Mechanism::SlVcg {
                    hi_supply
                } else {
                    None
                },
                analytic: false,
                boundary: boundary_seen,
            });
        }
    };
    while hi_pass - lo > 1 {
        let mid = lo + (hi_pass - lo) / 2;
        let (p, g, s) = check(mid)?;
        if p {
            hi_pass = mid;
            hi_gap = g;
            hi_supply = s;
        } else {
            lo = mid;
        }
    }

    Ok(CcResult {
        k: hi_pass,
        worst_r: hi_gap.argmin_r,
        margin: hi_gap.min_margin,
        certified: hi_gap.certified,
        supply: if q.mechanism == Mechanism::SlVcg {
            hi_supply
        } else {
            None
        },
        analytic: false,
        boundary: boundary_seen,
    })
}

/// Exact competition complexity of the VCG auction over the lambda-regular
/// class, by certified search over the worst-case parametric family.
///
/// For lambda = 1 at gamma = 1 the answer k = m is returned directly: the
/// legal truncation range is unbounded and no finite cap certifies it.
pub fn cc_exact(q: &CcQuery) -> Result<CcResult> {
    if q.mechanism != Mechanism::Vcg {
        return Err(Error::InvalidParameter(
            "cc_exact expects the plain VCG mechanism".into(),
        ));
    }
    if q.lambda == 1.0 && q.gamma == 1.0 {
        return Ok(CcResult {
            k: q.m,
            worst_r: f64::INFINITY,
            margin: 0.0,
            certified: true,
            supply: None,
            analytic: true,
            boundary: false,
        });
    }
    search(q)
}

/// Exact competition complexity of the supply-limiting VCG auction: the
/// smallest k for which some supply s in [1, m] certifies the target.
pub fn cc_sl_exact(q: &CcQuery) -> Result<CcResult> {
    if q.mechanism != Mechanism::SlVcg {
        return Err(Error::InvalidParameter(
            "cc_sl_exact expects the supply-limiting mechanism".into(),
        ));
    }
    if q.lambda == 1.0 && q.gamma == 1.0 {
        // supply limiting offers no advantage at gamma = 1; s = m is forced
        // by the point mass at value 1
        return Ok(CcResult {
            k: q.m,
            worst_r: f64::INFINITY,
            margin: 0.0,
            certified: true,
            supply: Some(q.m),
            analytic: true,
            boundary: false,
        });
    }
    search(q)
}

/// Asymptotic competition complexity of the VCG auction as a fraction of n.
pub fn cc_asymptotic(lambda: f64, alpha: f64, gamma: f64) -> f64 {
    assert!((0.0..=1.0).contains(&lambda));
    assert!(alpha > 0.0 && alpha <= 1.0);
    assert!(gamma > 0.0 && gamma < 1.0);
    let gate_threshold = if lambda == 0.0 {
        (-1.0f64).exp()
    } else {
        (1.0 - lambda).powf(1.0 / lambda)
    };
    if alpha < gate_threshold {
        return 0.0;
    }
    let raw = if lambda == 0.0 {
        alpha * (gamma / (std::f64::consts::E * alpha)).exp() - 1.0
    } else if lambda == 1.0 {
        gamma + alpha - 1.0
    } else {
        let shape = (1.0 - lambda).powf((1.0 - lambda) / lambda);
        alpha * (lambda * gamma / alpha * shape + 1.0).powf(1.0 / lambda) - 1.0
    };
    raw.max(0.0)
}

/// Asymptotic competition complexity of the supply-limiting VCG auction,
/// achieved by supply s = ceil(gamma * m).
pub fn cc_sl_asymptotic(lambda: f64, alpha: f64, gamma: f64) -> f64 {
    assert!((0.0..=1.0).contains(&lambda));
    assert!(alpha > 0.0 && alpha <= 1.0);
    assert!(gamma > 0.0 && gamma < 1.0);
    let gate_threshold = if lambda == 0.0 {
        (-1.0f64).exp()
    } else {
        (1.0 - lambda).powf(1.0 / lambda)
    };
    if alpha < gate_threshold {
        return 0.0;
    }
    let raw = if lambda == 0.0 {
        alpha * gamma * (1.0 / (std::f64::consts::E * alpha)).exp() - 1.0
    } else if lambda == 1.0 {
        alpha * gamma + gamma - 1.0
    } else {
        let shape = (1.0 - lambda).powf((1.0 - lambda) / lambda);
        alpha * gamma * (lambda / alpha * shape + 1.0).powf(1.0 / lambda) - 1.0
    };
    raw.max(0.0)
}

/// Finite-market sandwich for balanced MHR markets:
/// `(e^(1/e)-1) n <= CC(n) <= ceil((e^(1/e)-1) n + 1.05 ln n)`.
pub fn thm32_bounds(n: u64) -> (f64, u64) {
    assert!(n >= 1);
    let base = ((1.0f64 / std::f64::consts::E).exp() - 1.0) * n as f64;
    let upper = (base + 1.05 * (n as f64).ln()).ceil() as u64;
    (base, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn balanced_mhr(n: u64) -> CcQuery {
        CcQuery::new(0.0, n, n, 1.0, Mechanism::Vcg).unwrap()
    }

    #[test]
    fn table_first_rows() {
        for &(n, t) in &[(1u64, 1u64), (2, 2), (3, 2), (10, 5)] {
            let res = cc_exact(&balanced_mhr(n)).unwrap();
            assert_eq!(res.k, t, "n={n}");
            assert!(res.certified);
            assert!(res.margin >= 0.0);
        }
    }

    #[test]
    fn worst_gap_table_minimality_at_10() {
        let q = balanced_mhr(10);
        let pass = worst_gap(&q, 5, 10).unwrap();
        assert!(pass.min_margin >= 0.0 && pass.certified);
        let fail = worst_gap(&q, 4, 10).unwrap();
        assert!(fail.min_margin < 0.0, "margin {}", fail.min_margin);
    }

    #[test]
    fn bk_full_competition_any_lambda() {
        // k = n restores full optimality for regular families
        for &lambda in &[0.0, 0.5] {
            let mut q = CcQuery::new(lambda, 3, 3, 1.0, Mechanism::Vcg).unwrap();
            q.r_cap = 50.0;
            let gap = worst_gap(&q, 3, 3).unwrap();
            assert!(gap.min_margin >= -1e-9, "lambda={lambda}: {}", gap.min_margin);
        }
    }

    #[test]
    fn lambda_one_analytic() {
        let q = CcQuery::new(1.0, 4, 7, 1.0, Mechanism::Vcg).unwrap();
        let res = cc_exact(&q).unwrap();
        assert_eq!(res.k, 4);
        assert!(res.analytic);
        // witness: k = m - 1 fails at large truncation
        let gap = worst_gap(&q, 3, 4).unwrap();
        assert!(gap.min_margin < 0.0);
    }

    #[test]
    fn sl_dominance_and_gamma_one() {
        let q_vcg = CcQuery::new(0.0, 5, 5, 0.9, Mechanism::Vcg).unwrap();
        let q_sl = CcQuery::new(0.0, 5, 5, 0.9, Mechanism::SlVcg).unwrap();
        let k_vcg = cc_exact(&q_vcg).unwrap().k;
        let k_sl = cc_sl_exact(&q_sl).unwrap().k;
        assert!(k_sl <= k_vcg);

        // gamma = 1 forces s = m against the point mass at r = 1
        let q1 = CcQuery::new(0.0, 4, 4, 1.0, Mechanism::SlVcg).unwrap();
        let res = cc_sl_exact(&q1).unwrap();
        assert_eq!(res.supply, Some(4));
        assert_eq!(res.k, cc_exact(&CcQuery::new(0.0, 4, 4, 1.0, Mechanism::Vcg).unwrap()).unwrap().k);
    }

    #[test]
    fn asymptotic_golden_values() {
        assert!((cc_asymptotic(0.0, 1.0, 0.9999) - 0.4447).abs() < 5e-4);
        assert!((cc_asymptotic(0.0, 0.5, 0.9999) - 0.0435).abs() < 5e-4);
        assert!((cc_asymptotic(0.5, 1.0, 0.9999) - 0.5625).abs() < 5e-4);
        assert!((cc_asymptotic(0.5, 0.5, 0.9999) - 0.125).abs() < 5e-4);
        assert!((cc_asymptotic(1.0, 0.5, 0.7) - 0.2).abs() < 1e-12);
        assert_eq!(cc_asymptotic(0.0, 0.3, 0.9), 0.0); // below the 1/e gate
    }

    #[test]
    fn sl_asymptotic_golden_values() {
        let e = std::f64::consts::E;
        assert!((cc_sl_asymptotic(0.0, 1.0, 0.8) - (0.8 * (1.0 / e).exp() - 1.0)).abs() < 1e-12);
        assert!((cc_sl_asymptotic(0.0, 1.0, 0.8) - 0.1558).abs() < 5e-4);
        assert!((cc_sl_asymptotic(0.5, 1.0, 0.8) - 0.25).abs() < 1e-12);
        assert!((cc_sl_asymptotic(1.0, 1.0, 0.8) - 0.6).abs() < 1e-12);
        assert!((cc_sl_asymptotic(1.0, 1.0, 0.6) - 0.2).abs() < 1e-12);
        // SL converges to the plain VCG complexity as gamma -> 1
        let g = 1.0 - 1e-9;
        assert!(
            (cc_sl_asymptotic(0.0, 1.0, g) - cc_asymptotic(0.0, 1.0, g)).abs() < 1e-6
        );
    }

    #[test]
    fn sandwich_bounds() {
        let (lo, hi) = thm32_bounds(10);
        assert!((lo - 4.44668).abs() < 1e-4);
        assert_eq!(hi, 7);
        let (lo, hi) = thm32_bounds(593);
        assert!((lo - 263.688).abs() < 1e-2);
        assert_eq!(hi, 271);
        let (lo, hi) = thm32_bounds(1);
        assert!((lo - 0.444668).abs() < 1e-5);
        assert_eq!(hi, 1);
    }

    #[test]
    fn monotone_in_gamma() {
        let mut prev = 0;
        for &g in &[0.5, 0.8, 0.95, 1.0] {
            let q = CcQuery::new(0.0, 6, 6, g, Mechanism::Vcg).unwrap();
            let k = cc_exact(&q).unwrap().k;
            assert!(k >= prev, "gamma={g}");
            prev = k;
        }
    }

    #[test]
    fn k_ceiling_aborts() {
        let mut q = CcQuery::new(0.0, 10, 10, 1.0, Mechanism::Vcg).unwrap();
        q.k_ceiling = Some(2);
        assert!(matches!(cc_exact(&q), Err(Error::KCeiling { .. })));
    }
}
