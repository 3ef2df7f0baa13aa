//! Log-derivative of balanced VCG revenue with respect to the monopoly
//! quantile over the truncated exponential family (r = 1/q*).
//!
//! Nonpositive at q* = 1/e for the tabulated (n, t) pairs: pushing the
//! truncation to its extreme never helps the seller there.

use vcg_cc::revenue::{dlog_rev_vcg_dqstar, rev_vcg_tgpd_closed};

fn main() -> vcg_cc::Result<()> {
    let (n, t) = (50u64, 23u64);
    println!("n = {n}, t = {t}");
    println!("{:>8} {:>14} {:>14}", "q*", "analytic", "finite diff");
    for i in 0..=10 {
        let q = 0.38 + 0.06 * i as f64;
        let a = dlog_rev_vcg_dqstar(n, t, q)?;
        let dq = 1e-6;
        let hi = rev_vcg_tgpd_closed(0.0, 1.0 / (q + dq), n, n + t)?.ln();
        let lo = rev_vcg_tgpd_closed(0.0, 1.0 / (q - dq), n, n + t)?.ln();
        let fd = (hi - lo) / (2.0 * dq);
        println!("{q:>8.3} {a:>14.8} {fd:>14.8}");
    }
    let at_gate = dlog_rev_vcg_dqstar(n, t, 1.0 / std::f64::consts::E)?;
    println!("\nat q* = 1/e: {at_gate:.8} (expected <= 0)");
    assert!(at_gate <= 0.0);
    Ok(())
}
