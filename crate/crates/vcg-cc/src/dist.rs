//! Distribution families and revenue curves.
//!
//! The central family is the `r`-truncated λ-generalized Pareto distribution:
//! the FOSD-minimal λ-regular distribution with monopoly reserve `r`, monopoly
//! quantile `1/r`, and monopoly revenue normalized to one. λ = 0 is the
//! truncated exponential (MHR) case, λ = 1 the regular case.

use crate::error::{Error, Result};

/// Largest admissible truncation for regularity level `lambda`.
///
/// `(1-λ)^(-1/λ)` for λ in (0,1); `e` at λ = 0; unbounded at λ = 1.
pub fn r_max(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        std::f64::consts::E
    } else if lambda >= 1.0 {
        f64::INFINITY
    } else {
        (1.0 - lambda).powf(-1.0 / lambda)
    }
}

/// The `r`-truncated λ-generalized Pareto distribution.
///
/// Support is `[0, r]` with an atom of mass `1/r` at `r`. Immutable after
/// construction; all operations are pure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGpd {
    lambda: f64,
    r: f64,
}

impl TruncatedGpd {
    pub fn new(lambda: f64, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [0,1], got {lambda}"
            )));
        }
        if !r.is_finite() || r < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "truncation r must be finite and >= 1, got {r}"
            )));
        }
        // For lambda < 1 the admissible range is bounded; allow a small slack
        // for values computed as r_max(lambda) itself.
        let cap = r_max(lambda);
        if lambda < 1.0 && r > cap * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "truncation r = {r} exceeds r_max({lambda}) = {cap}"
            )));
        }
        Ok(Self { lambda, r })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Monopoly quantile `q* = 1/r`.
    pub fn monopoly_quantile(&self) -> f64 {
        1.0 / self.r
    }

    /// Monopoly reserve, equal to the truncation point.
    pub fn monopoly_reserve(&self) -> f64 {
        self.r
    }

    /// CDF at `v`, left-continuous at the atom: `cdf(r) = 1 - 1/r`.
    pub fn cdf(&self, v: f64) -> f64 {
        debug_assert!(v >= 0.0);
        if v > self.r {
            return 1.0;
        }
        if self.r == 1.0 {
            // Point mass at 1; no continuous part below.
            return 0.0;
        }
        if self.lambda == 0.0 {
            // 1 - r^(-v/r), evaluated as exp(-(v/r) ln r).
            1.0 - (-(v / self.r) * self.r.ln()).exp()
        } else {
            1.0 - ((self.r.powf(self.lambda) - 1.0) / self.r * v + 1.0).powf(-1.0 / self.lambda)
        }
    }

    /// Value at survival quantile `q`: the `v` with `1 - F(v) = q`.
    ///
    /// The atom maps the whole interval `q <= 1/r` to `r`.
    pub fn quantile_value(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "quantile must lie in (0,1], got {q}"
            )));
        }
        if q <= 1.0 / self.r {
            return Ok(self.r);
        }
        if self.lambda == 0.0 {
            Ok(self.r / self.r.ln() * (1.0 / q).ln())
        } else {
            Ok(self.r / (self.r.powf(self.lambda) - 1.0) * (q.powf(-self.lambda) - 1.0))
        }
    }

    /// Revenue curve `R(q) = q * F^{-1}(1-q)` in closed form.
    ///
    /// `R(q) = r q` below the monopoly quantile, and on `[1/r, 1]` equals
    /// `r/(r^λ-1) (q^(1-λ) - q)` for λ in (0,1], or `(r/ln r) q ln(1/q)` at λ = 0.
    pub fn revenue(&self, q: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&q));
        if self.r == 1.0 {
            return q;
        }
        if q <= 1.0 / self.r {
            return self.r * q;
        }
        if self.lambda == 0.0 {
            self.r / self.r.ln() * q * (1.0 / q).ln()
        } else {
            self.r / (self.r.powf(self.lambda) - 1.0) * (q.powf(1.0 - self.lambda) - q)
        }
    }

    /// Inverse-transform sampling from a uniform draw `u` in `[0,1)`.
    ///
    /// The top `1/r` of the uniform mass maps to the atom at `r`.
    pub fn sample(&self, u: f64) -> f64 {
        debug_assert!((0.0..1.0).contains(&u));
        if u >= 1.0 - 1.0 / self.r {
            self.r
        } else {
            // 1 - u > 1/r here, so the continuous branch applies.
            self.quantile_value(1.0 - u).expect("1-u lies in (1/r, 1]")
        }
    }
}

/// The regular lower-bound instance: atom of mass `1/(H+1)` at `H = 3n-1`,
/// continuous part `F(v) = 1 - 1/(v+1)` below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example11Curve {
    n: u64,
    h: f64,
}

impl Example11Curve {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("market size n must be >= 1".into()));
        }
        Ok(Self {
            n,
            h: (3 * n - 1) as f64,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Top value `H = 3n - 1`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// `R(q) = H q` below the atom quantile `1/(H+1)`, `1 - q` above.
    pub fn revenue(&self, q: f64) -> f64 {
        if q <= 1.0 / (self.h + 1.0) {
            self.h * q
        } else {
            1.0 - q
        }
    }

    pub fn monopoly_quantile(&self) -> f64 {
        1.0 / (self.h + 1.0)
    }

    pub fn monopoly_revenue(&self) -> f64 {
        self.h / (self.h + 1.0)
    }

    pub fn monopoly_reserve(&self) -> f64 {
        self.h
    }

    /// Inverse-transform sampling; top `1/(H+1)` of the uniform mass is the atom.
    pub fn sample(&self, u: f64) -> f64 {
        debug_assert!((0.0..1.0).contains(&u));
        let q = 1.0 - u; // survival quantile
        if q <= 1.0 / (self.h + 1.0) {
            self.h
        } else {
            1.0 / q - 1.0
        }
    }
}

/// A piecewise-linear revenue curve on `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCurve {
    points: Vec<(f64, f64)>,
    monopoly_quantile: f64,
    monopoly_revenue: f64,
    regular: bool,
}

impl PiecewiseCurve {
    /// Build from breakpoints sorted by `q`, covering `[0,1]`, with `R >= 0`.
    ///
    /// The `regular` flag is set iff chord slopes are nonincreasing (weak
    /// concavity). Monopoly point ties break toward the smallest quantile.
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::CurveFormat("need at least two breakpoints".into()));
        }
        if breakpoints.first().unwrap().0 != 0.0 || breakpoints.last().unwrap().0 != 1.0 {
            return Err(Error::CurveFormat(
                "breakpoints must cover [0,1] (first q = 0, last q = 1)".into(),
            ));
        }
        for w in breakpoints.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::CurveFormat(format!(
                    "breakpoints must be strictly increasing in q (got {} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if breakpoints.iter().any(|&(_, r)| !(r >= 0.0) || !r.is_finite()) {
            return Err(Error::CurveFormat("revenue values must be finite and >= 0".into()));
        }

        let mut regular = true;
        let mut prev_slope = f64::INFINITY;
        for w in breakpoints.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            if slope > prev_slope + 1e-12 {
                regular = false;
            }
            prev_slope = slope;
        }

        let (mq, mr) = breakpoints
            .iter()
            .fold((0.0f64, f64::NEG_INFINITY), |(bq, br), &(q, r)| {
                if r > br {
                    (q, r)
                } else {
                    (bq, br)
                }
            });

        Ok(Self {
            points: breakpoints,
            monopoly_quantile: mq,
            monopoly_revenue: mr,
            regular,
        })
    }

    pub fn eval(&self, q: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&q));
        let idx = self
            .points
            .partition_point(|&(bq, _)| bq < q)
            .clamp(1, self.points.len() - 1);
        let (q0, r0) = self.points[idx - 1];
        let (q1, r1) = self.points[idx];
        r0 + (r1 - r0) * (q - q0) / (q1 - q0)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn regular(&self) -> bool {
        self.regular
    }

    pub fn monopoly_quantile(&self) -> f64 {
        self.monopoly_quantile
    }

    pub fn monopoly_revenue(&self) -> f64 {
        self.monopoly_revenue
    }

    /// Load from CSV text with header `q,R`. Fractions `a/b` are accepted in
    /// either column.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::CurveFormat("empty curve file".into()))?;
        let normalized: String = header.chars().filter(|c| !c.is_whitespace()).collect();
        if !normalized.eq_ignore_ascii_case("q,R") {
            return Err(Error::CurveFormat(format!(
                "expected header `q,R`, got `{header}`"
            )));
        }
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut cols = line.split(',');
            let q = parse_number(cols.next().unwrap_or("").trim())
                .ok_or_else(|| Error::CurveFormat(format!("bad q on data row {}", i + 1)))?;
            let r = parse_number(cols.next().unwrap_or("").trim())
                .ok_or_else(|| Error::CurveFormat(format!("bad R on data row {}", i + 1)))?;
            if cols.next().is_some() {
                return Err(Error::CurveFormat(format!(
                    "row {} has more than two columns",
                    i + 1
                )));
            }
            points.push((q, r));
        }
        Self::new(points)
    }
}

/// Parse a decimal number or an exact fraction `a/b`.
fn parse_number(s: &str) -> Option<f64> {
    if let Some((num, den)) = s.split_once('/') {
        let a: f64 = num.trim().parse().ok()?;
        let b: f64 = den.trim().parse().ok()?;
        if b == 0.0 {
            return None;
        }
        Some(a / b)
    } else {
        s.parse().ok()
    }
}

/// A quantile-space revenue curve with a declared monopoly point.
#[derive(Debug, Clone, PartialEq)]
pub enum RevenueCurve {
    Tgpd(TruncatedGpd),
    Piecewise(PiecewiseCurve),
    Example11(Example11Curve),
}

impl RevenueCurve {
    pub fn eval(&self, q: f64) -> f64 {
        match self {
            RevenueCurve::Tgpd(d) => d.revenue(q),
            RevenueCurve::Piecewise(c) => c.eval(q),
            RevenueCurve::Example11(c) => c.revenue(q),
        }
    }

    pub fn monopoly_quantile(&self) -> f64 {
        match self {
            RevenueCurve::Tgpd(d) => d.monopoly_quantile(),
            RevenueCurve::Piecewise(c) => c.monopoly_quantile(),
            RevenueCurve::Example11(c) => c.monopoly_quantile(),
        }
    }

    pub fn monopoly_revenue(&self) -> f64 {
        match self {
            RevenueCurve::Tgpd(_) => 1.0,
            RevenueCurve::Piecewise(c) => c.monopoly_revenue(),
            RevenueCurve::Example11(c) => c.monopoly_revenue(),
        }
    }

    /// Interior kinks of the curve, used as quadrature breakpoints.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            RevenueCurve::Tgpd(d) => vec![d.monopoly_quantile()],
            RevenueCurve::Piecewise(c) => c
                .points
                .iter()
                .map(|&(q, _)| q)
                .filter(|&q| q > 0.0 && q < 1.0)
                .collect(),
            RevenueCurve::Example11(c) => vec![c.monopoly_quantile()],
        }
    }
}

/// Pointwise revenue-curve dominance: `A(q) <= B(q)` on a uniform quantile
/// grid plus all breakpoints of both curves, up to absolute tolerance 1e-12.
///
/// Equivalent to `A` first-order stochastically dominated by `B`.
pub fn fosd_by_curves(a: &RevenueCurve, b: &RevenueCurve, grid: usize) -> bool {
    assert!(grid >= 2, "grid must have at least 2 points");
    const TOL: f64 = 1e-12;
    let mut qs: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
    qs.extend(a.kinks());
    qs.extend(b.kinks());
    qs.iter().all(|&q| a.eval(q) <= b.eval(q) + TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_left_limit_at_atom() {
        let d = TruncatedGpd::new(0.0, std::f64::consts::E).unwrap();
        let v = std::f64::consts::E;
        assert!((d.cdf(v) - (1.0 - 1.0 / std::f64::consts::E)).abs() < 1e-15);
        assert_eq!(d.cdf(v + 1e-9), 1.0);
    }

    #[test]
    fn cdf_at_zero() {
        let d = TruncatedGpd::new(1.0, 2.0).unwrap();
        assert_eq!(d.cdf(0.0), 0.0);
    }

    #[test]
    fn cdf_half_lambda() {
        // direct formula at (lambda=0.5, r=2, v=1)
        let d = TruncatedGpd::new(0.5, 2.0).unwrap();
        let expected = 1.0 - ((2f64.sqrt() - 1.0) / 2.0 + 1.0).powi(-2);
        assert!((d.cdf(1.0) - expected).abs() < 1e-15);
        assert!((expected - 0.31371).abs() < 1e-5);
    }

    #[test]
    fn quantile_atom_and_floor() {
        let d = TruncatedGpd::new(0.0, std::f64::consts::E).unwrap();
        assert_eq!(
            d.quantile_value(1.0 / std::f64::consts::E).unwrap(),
            std::f64::consts::E
        );
        let d = TruncatedGpd::new(0.3, 2.0).unwrap();
        assert!(d.quantile_value(1.0).unwrap().abs() < 1e-15);
        assert!(d.quantile_value(0.0).is_err());
    }

    #[test]
    fn quantile_lambda_one() {
        let d = TruncatedGpd::new(1.0, 4.0).unwrap();
        assert!((d.quantile_value(0.5).unwrap() - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn revenue_monopoly_normalization() {
        for &lambda in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let cap = if lambda < 1.0 { r_max(lambda) } else { 50.0 };
            for i in 0..20 {
                let r = 1.0 + (cap - 1.0) * i as f64 / 19.0;
                let d = TruncatedGpd::new(lambda, r).unwrap();
                assert!(
                    (d.revenue(1.0 / r) - 1.0).abs() <= 1e-12,
                    "lambda={lambda} r={r}"
                );
            }
        }
    }

    #[test]
    fn revenue_point_mass() {
        let d = TruncatedGpd::new(0.7, 1.0).unwrap();
        for i in 0..=10 {
            let q = i as f64 / 10.0;
            assert_eq!(d.revenue(q), q);
        }
    }

    #[test]
    fn revenue_exponential_branch() {
        let d = TruncatedGpd::new(0.0, 2.0).unwrap();
        let expected = 2.0 / 2f64.ln() * 0.7 * (1.0 / 0.7f64).ln();
        assert!((d.revenue(0.7) - expected).abs() < 1e-15);
        assert!((expected - 0.7204024).abs() < 1e-6);
        // cross-check R(q) = q * quantile_value(q)
        let q = 0.7;
        assert!((d.revenue(q) - q * d.quantile_value(q).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn sample_atom_convention() {
        let d = TruncatedGpd::new(0.0, std::f64::consts::E).unwrap();
        assert_eq!(d.sample(0.99), std::f64::consts::E);
        let d = TruncatedGpd::new(1.0, 4.0).unwrap();
        assert!((d.sample(0.5) - 4.0 / 3.0).abs() < 1e-14);
        let d = TruncatedGpd::new(0.5, 1.0).unwrap();
        assert_eq!(d.sample(0.123), 1.0);
    }

    #[test]
    fn lambda_zero_matches_small_lambda_limit() {
        // The lambda = 0 branch agrees with lambda = 1e-6 within 1e-4 relative.
        for &r in &[1.3, 2.0, std::f64::consts::E] {
            let d0 = TruncatedGpd::new(0.0, r).unwrap();
            let d1 = TruncatedGpd::new(1e-6, r).unwrap();
            for i in 1..20 {
                let v = r * i as f64 / 20.0;
                let (c0, c1) = (d0.cdf(v), d1.cdf(v));
                if c0 > 1e-6 {
                    assert!((c0 - c1).abs() / c0 < 1e-4, "cdf r={r} v={v}");
                }
                let q = i as f64 / 20.0;
                let (r0, r1) = (d0.revenue(q), d1.revenue(q));
                assert!((r0 - r1).abs() / r0.max(1e-12) < 1e-4, "rev r={r} q={q}");
            }
        }
    }

    #[test]
    fn piecewise_example_c1() {
        let c = PiecewiseCurve::new(vec![(0.0, 0.0), (7.0 / 8.0, 1.0), (1.0, 1.0)]).unwrap();
        assert!(c.regular());
        assert_eq!(c.monopoly_quantile(), 7.0 / 8.0);
        assert_eq!(c.monopoly_revenue(), 1.0);
        assert!((c.eval(0.5) - 8.0 / 7.0 * 0.5).abs() < 1e-15);
    }

    #[test]
    fn piecewise_linear_identity() {
        let c = PiecewiseCurve::new(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_eq!(c.monopoly_quantile(), 1.0);
        assert!((c.eval(0.37) - 0.37).abs() < 1e-15);
    }

    #[test]
    fn piecewise_convex_kink_flagged() {
        let c = PiecewiseCurve::new(vec![(0.0, 0.0), (0.5, 0.4), (1.0, 1.0)]).unwrap();
        assert!(!c.regular());
    }

    #[test]
    fn piecewise_rejects_bad_input() {
        assert!(PiecewiseCurve::new(vec![(0.1, 0.0), (1.0, 1.0)]).is_err());
        assert!(PiecewiseCurve::new(vec![(0.0, 0.0), (0.5, 1.0), (0.4, 1.0), (1.0, 1.0)]).is_err());
        assert!(PiecewiseCurve::new(vec![(0.0, -0.1), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn csv_fractions() {
        let c = PiecewiseCurve::from_csv("q,R\n0,0\n7/8,1\n1,1\n").unwrap();
        assert_eq!(c.monopoly_quantile(), 0.875);
        assert!(PiecewiseCurve::from_csv("x,y\n0,0\n1,1\n").is_err());
        assert!(PiecewiseCurve::from_csv("q,R\n0,1/0\n1,1\n").is_err());
    }

    #[test]
    fn fosd_example_c1_and_reflexivity() {
        let r1 = RevenueCurve::Piecewise(
            PiecewiseCurve::new(vec![(0.0, 0.0), (7.0 / 8.0, 1.0), (1.0, 1.0)]).unwrap(),
        );
        let r2 = RevenueCurve::Piecewise(
            PiecewiseCurve::new(vec![(0.0, 0.0), (0.75, 6.0 / 7.0), (1.0, 1.0)]).unwrap(),
        );
        assert!(fosd_by_curves(&r2, &r1, 1000));
        assert!(!fosd_by_curves(&r1, &r2, 1000));
        assert!(fosd_by_curves(&r1, &r1, 100));
    }

    #[test]
    fn fosd_tgpd_minimal_under_piecewise_hull() {
        let t = RevenueCurve::Tgpd(TruncatedGpd::new(0.0, std::f64::consts::E).unwrap());
        let p = RevenueCurve::Piecewise(
            PiecewiseCurve::new(vec![(0.0, 0.0), (1.0 / std::f64::consts::E, 1.0), (1.0, 1.0)])
                .unwrap(),
        );
        assert!(fosd_by_curves(&t, &p, 10_000));
    }

    #[test]
    fn example11_shape() {
        let c = Example11Curve::new(3).unwrap();
        assert_eq!(c.h(), 8.0);
        assert!((c.revenue(1.0 / 9.0) - 8.0 / 9.0).abs() < 1e-15);
        // R(q) <= 1 - q on (0, 1]
        for i in 1..=100 {
            let q = i as f64 / 100.0;
            assert!(c.revenue(q) <= 1.0 - q + 1e-15);
        }
        assert_eq!(c.sample(0.95), 8.0);
        assert!((c.sample(0.5) - 1.0).abs() < 1e-12);
    }
}
