//! Selling fewer units on purpose: when the target is a gamma < 1 fraction
//! of optimal revenue, withholding supply lets the auctioneer reach it with
//! fewer added buyers than plain VCG.

use vcg_cc::{cc_exact, cc_sl_exact, CcQuery, Mechanism};

fn main() -> vcg_cc::Result<()> {
    println!("{:>7} {:>4} {:>8} {:>8} {:>8}", "gamma", "n", "k (vcg)", "k (sl)", "supply");
    for &gamma in &[1.0, 0.95, 0.9, 0.8, 0.7] {
        let n = 8u64;
        let plain = cc_exact(&CcQuery::new(0.0, n, n, gamma, Mechanism::Vcg)?)?;
        let sl = cc_sl_exact(&CcQuery::new(0.0, n, n, gamma, Mechanism::SlVcg)?)?;
        println!(
            "{gamma:>7.2} {n:>4} {:>8} {:>8} {:>8}",
            plain.k,
            sl.k,
            sl.supply.map_or("-".into(), |s| s.to_string())
        );
        assert!(sl.k <= plain.k);
    }
    Ok(())
}
