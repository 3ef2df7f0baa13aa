//! Plot-ready revenue curves R(q) = q F^{-1}(1-q) of the truncated
//! generalized Pareto family across regularity levels.
//!
//! Every curve is normalized to monopoly revenue 1 at quantile 1/r; below
//! 1/r it is the straight line r*q through the atom.

use vcg_cc::{r_max, TruncatedGpd};

fn main() -> vcg_cc::Result<()> {
    for &lambda in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        let cap = r_max(lambda);
        let r = if cap.is_finite() { cap } else { 4.0 };
        let d = TruncatedGpd::new(lambda, r)?;
        println!("# lambda = {lambda}, r = {r:.6} (r_max = {cap:.6})");
        println!("q,R");
        for i in 0..=40 {
            let q = i as f64 / 40.0;
            println!("{q:.4},{:.10}", d.revenue(q));
        }
        println!(
            "# monopoly point: ({:.6}, {:.6})\n",
            d.monopoly_quantile(),
            d.revenue(d.monopoly_quantile())
        );
    }
    Ok(())
}
