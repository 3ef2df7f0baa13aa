//! Expected revenue of VCG and the optimal mechanism, computed two ways:
//! adaptive quadrature against the order-statistic density, and the
//! incomplete-beta closed form for the Pareto family.

use vcg_cc::orderstat::QuadratureConfig;
use vcg_cc::revenue::{rev_opt, rev_opt_tgpd_closed, rev_vcg, rev_vcg_tgpd_closed};
use vcg_cc::{PiecewiseCurve, RevenueCurve, TruncatedGpd};

fn main() -> vcg_cc::Result<()> {
    let cfg = QuadratureConfig::default();

    println!("truncated exponential (lambda = 0, r = e), m = 3 units:");
    let d = TruncatedGpd::new(0.0, std::f64::consts::E)?;
    let c = RevenueCurve::Tgpd(d);
    for n in [3u64, 4, 6, 9] {
        let quad = rev_vcg(&c, 3, n + 2, &cfg)?;
        let closed = rev_vcg_tgpd_closed(0.0, std::f64::consts::E, 3, n + 2)?;
        let opt = rev_opt_tgpd_closed(0.0, std::f64::consts::E, 3, n)?;
        println!(
            "  n = {n}: RevVCG(3:{}) quad {quad:.12} / closed {closed:.12}, RevOPT(3:{n}) = {opt:.12}",
            n + 2
        );
    }

    // curves can also come from CSV text; exact fractions are accepted
    let csv = "q,R\n0,0\n7/8,1\n1,1\n";
    let piece = RevenueCurve::Piecewise(PiecewiseCurve::from_csv(csv)?);
    println!("\npiecewise curve with monopoly point (7/8, 1):");
    println!("  RevVCG(2:4) = {:.10}", rev_vcg(&piece, 2, 4, &cfg)?);
    println!("  RevOPT(2:3) = {:.10}", rev_opt(&piece, 2, 3, &cfg)?);
    Ok(())
}
