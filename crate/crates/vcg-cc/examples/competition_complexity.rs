//! Exact competition complexity: the smallest number of added buyers after
//! which VCG earns at least a gamma fraction of the optimal revenue against
//! every distribution in the regularity class.
//!
//! The search scans the worst-case truncation family on a grid and refuses
//! to answer without a Lipschitz certificate on the margin.

use vcg_cc::{cc_exact, CcQuery, Mechanism};

fn main() -> vcg_cc::Result<()> {
    for &(lambda, n, gamma) in &[
        (0.0, 5u64, 1.0),
        (0.0, 10, 1.0),
        (0.0, 10, 0.9),
        (0.5, 10, 1.0),
        (1.0, 10, 1.0), // regular class: k = n, returned analytically
    ] {
        let q = CcQuery::new(lambda, n, n, gamma, Mechanism::Vcg)?;
        let res = cc_exact(&q)?;
        println!(
            "lambda = {lambda}, n = {n}, gamma = {gamma}: k = {} \
             (worst r = {:.6}, margin = {:+.3e}, certified = {}{})",
            res.k,
            res.worst_r,
            res.margin,
            res.certified,
            if res.analytic { ", analytic" } else { "" }
        );
    }
    Ok(())
}
