//! Large-market limits: competition complexity per original buyer as a
//! function of the unit density alpha = m/n, for plain VCG and the
//! supply-limiting variant.
//!
//! Below the participation gate ((1-lambda)^(1/lambda), or 1/e at lambda=0)
//! no added buyers are needed at all.

use vcg_cc::{cc_asymptotic, cc_sl_asymptotic};

fn main() {
    let gamma = 0.9;
    println!("gamma = {gamma}");
    println!("{:>6} {:>12} {:>12} {:>12}", "alpha", "lambda=0", "lambda=0.5", "lambda=1");
    for i in 1..=20 {
        let alpha = i as f64 / 20.0;
        println!(
            "{alpha:>6.2} {:>12.6} {:>12.6} {:>12.6}",
            cc_asymptotic(0.0, alpha, gamma),
            cc_asymptotic(0.5, alpha, gamma),
            cc_asymptotic(1.0, alpha, gamma),
        );
    }
    println!("\nsupply-limiting variant:");
    println!("{:>6} {:>12} {:>12} {:>12}", "alpha", "lambda=0", "lambda=0.5", "lambda=1");
    for i in 1..=20 {
        let alpha = i as f64 / 20.0;
        println!(
            "{alpha:>6.2} {:>12.6} {:>12.6} {:>12.6}",
            cc_sl_asymptotic(0.0, alpha, gamma),
            cc_sl_asymptotic(0.5, alpha, gamma),
            cc_sl_asymptotic(1.0, alpha, gamma),
        );
    }
}
