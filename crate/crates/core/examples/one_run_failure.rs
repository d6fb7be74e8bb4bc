// Runs of a single letter: lengths that are powers of two certify, the
// others carry an eigenvalue 2 and a measurable linear drift.

use subword_sums::certify::{check_one_run, OneRunVerdict};

fn run() -> subword_sums::Result<()> {
    for len in 2..=9 {
        match check_one_run(1, len)? {
            OneRunVerdict::ProvedP { certificate } => {
                println!("1^{len}: sublinear, certificate rep={}", certificate.cycle_rep);
            }
            OneRunVerdict::ProvedNotP { obstruction } => {
                let (lo, hi) = obstruction
                    .ratios
                    .iter()
                    .fold((f64::INFINITY, 0f64), |(lo, hi), r| (lo.min(r.1), hi.max(r.1)));
                println!(
                    "1^{len}: linear, <x, v(1)> = {}, |S_(2^n-1)|/2^n in [{lo:.4}, {hi:.4}]",
                    obstruction.inner_product
                );
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
