//! The competition-complexity table for balanced MHR markets (m = n,
//! gamma = 1), together with the finite-market sandwich
//! (e^(1/e)-1) n <= t_n <= ceil((e^(1/e)-1) n + 1.05 ln n).

use vcg_cc::{cc_exact, thm32_bounds, CcQuery, Mechanism};

fn main() -> vcg_cc::Result<()> {
    println!("{:>4} {:>10} {:>5} {:>6}", "n", "lower", "t_n", "upper");
    for n in 1..=30u64 {
        let q = CcQuery::new(0.0, n, n, 1.0, Mechanism::Vcg)?;
        let t = cc_exact(&q)?.k;
        let (lo, hi) = thm32_bounds(n);
        println!("{n:>4} {lo:>10.4} {t:>5} {hi:>6}");
        assert!(lo <= t as f64 && t <= hi);
    }
    Ok(())
}
