//! Expected revenue of the VCG auction, the Bayesian-optimal mechanism, and
//! the supply-limiting VCG variant, plus closed forms for the truncated
//! generalized Pareto family and the balanced-market log-derivative
//! diagnostic.

use crate::dist::{RevenueCurve, TruncatedGpd};
use crate::error::{Error, Result};
use crate::orderstat::{
    expect_under, integrate, ln_beta, ln_choose, log_density, reg_inc_beta, QuadratureConfig,
};

/// One mechanism evaluation: `m` units, `n` original buyers, `k` added
/// buyers, optional supply cap `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarketSpec {
    pub m: u64,
    pub n: u64,
    pub k: u64,
    pub s: Option<u64>,
}

impl MarketSpec {
    pub fn new(m: u64, n: u64, k: u64, s: Option<u64>) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= m <= n, got m = {m}, n = {n}"
            )));
        }
        if let Some(s) = s {
            if s == 0 || s > m {
                return Err(Error::InvalidParameter(format!(
                    "supply must satisfy 1 <= s <= m, got s = {s}, m = {m}"
                )));
            }
        }
        Ok(Self { m, n, k, s })
    }
}

/// Tail statistics of X ~ Beta(n+1, t): `p_plus = P(X >= q*)` and
/// `h = E[(-ln X) 1{X >= q*}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaTailStats {
    pub p_plus: f64,
    pub h: f64,
}

/// Expected VCG revenue: `N * E[R(q)]` under the order-statistic density
/// η_{m:N-1} of uniform quantiles.
pub fn rev_vcg(curve: &RevenueCurve, m: u64, buyers: u64, cfg: &QuadratureConfig) -> Result<f64> {
    if m == 0 || buyers == 0 {
        return Err(Error::InvalidParameter(
            "need m >= 1 and at least one buyer".into(),
        ));
    }
    let kinks = curve.kinks();
    let v = expect_under(m, buyers - 1, |q| curve.eval(q), &kinks, cfg)?;
    Ok(buyers as f64 * v)
}

/// Expected revenue of the Bayesian-optimal mechanism:
/// `n * E[R(min(q, q*))]` under η_{m:n-1}.
pub fn rev_opt(curve: &RevenueCurve, m: u64, n: u64, cfg: &QuadratureConfig) -> Result<f64> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    let qstar = curve.monopoly_quantile();
    let kinks: Vec<f64> = curve
        .kinks()
        .into_iter()
        .filter(|&q| q <= qstar)
        .chain(std::iter::once(qstar))
        .collect();
    let v = expect_under(m, n - 1, |q| curve.eval(q.min(qstar)), &kinks, cfg)?;
    Ok(n as f64 * v)
}

/// Supply-limiting VCG: sell `s <= m` units to `N` buyers.
pub fn rev_sl_vcg(curve: &RevenueCurve, s: u64, buyers: u64, cfg: &QuadratureConfig) -> Result<f64> {
    rev_vcg(curve, s, buyers, cfg)
}

/// Closed-form VCG revenue for a truncated generalized Pareto curve.
///
/// Decomposes `N * E[R(q)]` at the kink `q* = 1/r`: the head is an
/// incomplete-beta moment at integer parameters; the tail uses the shifted
/// parameter `m + 1 - λ` for λ > 0, and one adaptive quadrature of the
/// logarithmic term at λ = 0.
pub fn rev_vcg_tgpd_closed(lambda: f64, r: f64, m: u64, buyers: u64) -> Result<f64> {
    let d = TruncatedGpd::new(lambda, r)?;
    let nn = buyers;
    if m == 0 || m + 1 > nn {
        return Err(Error::InvalidParameter(format!(
            "closed form needs 1 <= m <= N-1, got m = {m}, N = {nn}"
        )));
    }
    let nu = nn - 1; // density parameter: order statistics of N-1 uniforms
    let qstar = d.monopoly_quantile();
    let mf = m as f64;
    let nf = nn as f64;

    if r == 1.0 {
        // q* = 1 and R(q) = q: every unit sells at price 1.
        return Ok(mf);
    }
    // head: r * Integral_0^{q*} q eta_{m:nu}(q) dq = r * (m/N) * I_{q*}(m+1, N-m)
    let head = r * (mf / nf) * reg_inc_beta(mf + 1.0, (nn - m) as f64, qstar)?;

    let tail = if lambda == 0.0 {
        // (r/ln r) * (m/N) * Integral_{q*}^1 (-ln q) eta_{m+1:N}(q) dq
        let cfg = QuadratureConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_depth: 60,
        };
        let integrand =
            |q: f64| (-q.ln()) * log_density(m + 1, nn, q).expect("m+1 <= N").exp();
        let mode = mf / (nf - 1.0).max(1.0);
        let t = integrate(integrand, qstar, 1.0, &[mode], &cfg)?;
        r / r.ln() * (mf / nf) * t
    } else {
        // r/(r^l - 1) * Integral_{q*}^1 (q^(1-l) - q) eta_{m:nu}(q) dq
        let a_shift = mf + 1.0 - lambda;
        let b = (nu - m + 1) as f64;
        let ln_coeff = (nu as f64).ln() + ln_choose(nu - 1, m - 1) + ln_beta(a_shift, b);
        let term1 = ln_coeff.exp() * (1.0 - reg_inc_beta(a_shift, b, qstar)?);
        let term2 = (mf / nf) * (1.0 - reg_inc_beta(mf + 1.0, (nn - m) as f64, qstar)?);
        r / (r.powf(lambda) - 1.0) * (term1 - term2)
    };
    Ok(nf * (head + tail))
}

/// Closed-form Bayesian-optimal revenue for a truncated generalized Pareto
/// curve; the integrand is constant at the monopoly revenue above `q*`.
pub fn rev_opt_tgpd_closed(lambda: f64, r: f64, m: u64, n: u64) -> Result<f64> {
    let d = TruncatedGpd::new(lambda, r)?;
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    if m == n {
        // degenerate density: point mass at 1, integrand R(min(1, q*)) = 1
        return Ok(n as f64);
    }
    let qstar = d.monopoly_quantile();
    let mf = m as f64;
    let nf = n as f64;
    let head = r * (mf / nf) * reg_inc_beta(mf + 1.0, (n - m) as f64, qstar)?;
    let tail = 1.0 - reg_inc_beta(mf, (n - m) as f64, qstar)?;
    Ok(nf * (head + tail))
}

/// Tail statistics of X ~ Beta(n+1, t) at threshold `q*`.
///
/// `h` is integrated adaptively in log space with a split at the Beta mode,
/// where the density peaks sharply for large `n`.
pub fn beta_tail_stats(n: u64, t: u64, qstar: f64) -> Result<BetaTailStats> {
    if t == 0 {
        return Err(Error::InvalidParameter("need t >= 1".into()));
    }
    if !(qstar > 0.0 && qstar < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "q* must lie in (0,1), got {qstar}"
        )));
    }
    let a = n as f64 + 1.0;
    let b = t as f64;
    let p_plus = 1.0 - reg_inc_beta(a, b, qstar)?;
    let lnb = ln_beta(a, b);
    let density = move |x: f64| {
        let mut ln_p = -lnb + n as f64 * x.ln();
        if t > 1 {
            ln_p += (t - 1) as f64 * (1.0 - x).ln();
        }
        ln_p.exp()
    };
    let cfg = QuadratureConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_depth: 60,
    };
    let mode = if n + t >= 2 {
        n as f64 / (n + t - 1) as f64
    } else {
        0.5
    };
    let upper = 1.0 - 1e-16;
    let h = if qstar >= upper {
        0.0
    } else {
        integrate(|x| (-x.ln()) * density(x), qstar, upper, &[mode], &cfg)?
    };
    Ok(BetaTailStats { p_plus, h })
}

/// Log-derivative of balanced VCG revenue with respect to the monopoly
/// quantile, for the truncated exponential family (r = 1/q*):
///
/// `-1/q* + (1/q*) * h / [ (ln q*)^2 (1 - p_plus - h/ln q*) ]`.
pub fn dlog_rev_vcg_dqstar(n: u64, t: u64, qstar: f64) -> Result<f64> {
    let stats = beta_tail_stats(n, t, qstar)?;
    let lnq = qstar.ln();
    let denom = lnq * lnq * (1.0 - stats.p_plus - stats.h / lnq);
    if denom.abs() < 1e-14 {
        return Err(Error::SingularDenominator { qstar });
    }
    Ok(-1.0 / qstar + stats.h / (qstar * denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Example11Curve, PiecewiseCurve};

    fn curve_c1_f1() -> RevenueCurve {
        RevenueCurve::Piecewise(
            PiecewiseCurve::new(vec![(0.0, 0.0), (7.0 / 8.0, 1.0), (1.0, 1.0)]).unwrap(),
        )
    }

    fn curve_c1_f2() -> RevenueCurve {
        RevenueCurve::Piecewise(
            PiecewiseCurve::new(vec![(0.0, 0.0), (0.75, 6.0 / 7.0), (1.0, 1.0)]).unwrap(),
        )
    }

    #[test]
    fn vcg_point_mass_family() {
        let cfg = QuadratureConfig::default();
        let c = RevenueCurve::Tgpd(TruncatedGpd::new(0.4, 1.0).unwrap());
        for &(n, k) in &[(3u64, 2u64), (10, 5)] {
            let v = rev_vcg(&c, n, n + k, &cfg).unwrap();
            assert!((v - n as f64).abs() < 1e-9, "n={n} k={k}: {v}");
        }
        // R(q) = q sells every unit at price 1
        let v = rev_vcg(&c, 4, 9, &cfg).unwrap();
        assert!((v - 4.0).abs() < 1e-9);
    }

    #[test]
    fn golden_example_c1() {
        let cfg = QuadratureConfig::default();
        let f1 = curve_c1_f1();
        let f2 = curve_c1_f2();
        let vcg1 = rev_vcg(&f1, 2, 4, &cfg).unwrap();
        let vcg2 = rev_vcg(&f2, 2, 4, &cfg).unwrap();
        let opt1 = rev_opt(&f1, 2, 3, &cfg).unwrap();
        let opt2 = rev_opt(&f2, 2, 3, &cfg).unwrap();
        assert!((vcg1 - 2.27734375).abs() < 1e-8);
        assert!((vcg2 - 2.25446428571).abs() < 1e-8);
        assert!((opt1 - 2.234375).abs() < 1e-8);
        assert!((opt2 - 2.1875).abs() < 1e-8);
        // multiplicative-gap non-monotonicity despite FOSD ordering
        let ratio1 = vcg1 / opt1;
        let ratio2 = vcg2 / opt2;
        assert!(ratio1 < ratio2);
        assert!((ratio1 - 1.0192).abs() < 5e-4);
        assert!((ratio2 - 1.0306).abs() < 5e-4);
    }

    #[test]
    fn balanced_opt_identity() {
        let cfg = QuadratureConfig::default();
        for &lambda in &[0.0, 0.3, 0.7, 1.0] {
            for &r in &[1.0, 1.5, 2.0] {
                let c = RevenueCurve::Tgpd(TruncatedGpd::new(lambda, r).unwrap());
                for &n in &[1u64, 4, 12] {
                    let v = rev_opt(&c, n, n, &cfg).unwrap();
                    assert!((v - n as f64).abs() < 1e-9, "l={lambda} r={r} n={n}");
                    let closed = rev_opt_tgpd_closed(lambda, r, n, n).unwrap();
                    assert!((closed - n as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn example11_opt() {
        let cfg = QuadratureConfig::default();
        let c = RevenueCurve::Example11(Example11Curve::new(3).unwrap());
        let v = rev_opt(&c, 3, 3, &cfg).unwrap();
        assert!((v - 8.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_depth: 60,
        };
        for &lambda in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let cap = if lambda < 1.0 {
                crate::dist::r_max(lambda)
            } else {
                8.0
            };
            for &rfrac in &[0.0, 0.33, 0.8, 1.0] {
                let r = 1.0 + (cap - 1.0) * rfrac;
                let d = TruncatedGpd::new(lambda, r).unwrap();
                let c = RevenueCurve::Tgpd(d);
                for &(m, nn) in &[(1u64, 2u64), (2, 5), (5, 8), (10, 15), (13, 14)] {
                    let quad = rev_vcg(&c, m, nn, &cfg).unwrap();
                    let closed = rev_vcg_tgpd_closed(lambda, r, m, nn).unwrap();
                    assert!(
                        (closed - quad).abs() <= 1e-9 * quad.abs().max(1e-9),
                        "l={lambda} r={r} m={m} N={nn}: closed={closed} quad={quad}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_lambda_one_small_market() {
        // oracle: quadrature at tight tolerance
        let cfg = QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_depth: 60,
        };
        let c = RevenueCurve::Tgpd(TruncatedGpd::new(1.0, 4.0).unwrap());
        let quad = rev_vcg(&c, 1, 2, &cfg).unwrap();
        let closed = rev_vcg_tgpd_closed(1.0, 4.0, 1, 2).unwrap();
        assert!((closed - quad).abs() < 1e-10, "{closed} vs {quad}");
    }

    #[test]
    fn closed_form_harmonic_lower_bound() {
        // e-truncated exponential, balanced: N * harmonic-sum lower bound
        let n = 40u64;
        let t = 19u64;
        let v = rev_vcg_tgpd_closed(0.0, std::f64::consts::E, n, n + t).unwrap();
        let bound = std::f64::consts::E
            * (1.0 - (-(n as f64).sqrt()).exp())
            * n as f64
            * crate::orderstat::harmonic_diff(n, t);
        assert!(v >= bound, "{v} < {bound}");
    }

    #[test]
    fn supply_limit_definitional_and_high_tail() {
        let cfg = QuadratureConfig::default();
        let c = RevenueCurve::Tgpd(TruncatedGpd::new(0.0, 2.0).unwrap());
        let a = rev_sl_vcg(&c, 3, 8, &cfg).unwrap();
        let b = rev_vcg(&c, 3, 8, &cfg).unwrap();
        assert_eq!(a, b);
        // On the e-truncated curve at m = n = 40, N = 54, selling fewer units
        // raises revenue.
        let c = RevenueCurve::Tgpd(TruncatedGpd::new(0.0, std::f64::consts::E).unwrap());
        let full = rev_sl_vcg(&c, 40, 54, &cfg).unwrap();
        let limited = rev_sl_vcg(&c, 32, 54, &cfg).unwrap();
        assert!(limited > full, "limited={limited} full={full}");
    }

    #[test]
    fn beta_tail_limits() {
        let s = beta_tail_stats(10, 5, 1.0 - 1e-12).unwrap();
        assert!(s.p_plus < 1e-9 && s.h < 1e-9);
        let s = beta_tail_stats(10, 5, 1e-12).unwrap();
        assert!((s.p_plus - 1.0).abs() < 1e-9);
        // invariant: 0 <= h <= -ln(q*) p_plus + E[-ln X]
        let q = 0.4;
        let s = beta_tail_stats(12, 7, q).unwrap();
        assert!(s.h >= 0.0);
        let full = beta_tail_stats(12, 7, 1e-14).unwrap().h; // E[-ln X]
        assert!(s.h <= -q.ln() * s.p_plus + full + 1e-9);
    }

    #[test]
    fn beta_tail_paper_scale_bound() {
        let n = 594u64;
        let t = 271u64;
        let s = beta_tail_stats(n, t, 1.0 / std::f64::consts::E).unwrap();
        let bound = 0.22 * (1.0 - 2.0 * (-0.01 * (n + t + 1) as f64).exp());
        assert!(s.h >= bound, "h={} bound={bound}", s.h);
    }

    #[test]
    fn dlog_nonpositive_at_inv_e() {
        for &(n, t) in &[(10u64, 5u64), (50, 23), (100, 45)] {
            let d = dlog_rev_vcg_dqstar(n, t, 1.0 / std::f64::consts::E).unwrap();
            assert!(d <= 0.0, "n={n} t={t}: {d}");
        }
    }

    #[test]
    fn dlog_matches_finite_differences() {
        // central differences of ln RevVCG over the 1/q*-truncated
        // exponential family, balanced market
        let fd = |n: u64, t: u64, q: f64| {
            let dq = 1e-6;
            let hi = rev_vcg_tgpd_closed(0.0, 1.0 / (q + dq), n, n + t).unwrap().ln();
            let lo = rev_vcg_tgpd_closed(0.0, 1.0 / (q - dq), n, n + t).unwrap().ln();
            (hi - lo) / (2.0 * dq)
        };
        let q = 0.95;
        let analytic = dlog_rev_vcg_dqstar(10, 5, q).unwrap();
        let numeric = fd(10, 5, q);
        assert!(
            (analytic - numeric).abs() <= 1e-4 * numeric.abs(),
            "{analytic} vs {numeric}"
        );
    }

    #[test]
    fn opt_dominates_vcg_for_concave_curves() {
        let cfg = QuadratureConfig::default();
        for &lambda in &[0.0, 0.5, 1.0] {
            let c = RevenueCurve::Tgpd(TruncatedGpd::new(lambda, 2.0).unwrap());
            for &(m, n) in &[(1u64, 3u64), (2, 4), (3, 5)] {
                let opt = rev_opt(&c, m, n, &cfg).unwrap();
                let vcg = rev_vcg(&c, m, n, &cfg).unwrap();
                assert!(opt >= vcg - 1e-9, "l={lambda} m={m} n={n}");
            }
        }
    }
}
