// Partial sums of `(-1)^{s_w(n)}` with the logarithmic-time evaluator,
// normalised by `sqrt(N)` for a bounded-ratio word and by `N` for `111`.

use subword_sums::dynamics::OrbitTable;
use subword_sums::linrep::LinearRepresentation;
use subword_sums::BinaryWord;

fn representation(word: &str) -> subword_sums::Result<LinearRepresentation> {
    let w: BinaryWord = word.parse()?;
    let u = BinaryWord::last_unit(w.len())?;
    Ok(LinearRepresentation::new(OrbitTable::build(&w, &u)?))
}

fn run() -> subword_sums::Result<()> {
    let square_root = representation("011")?;
    let linear = representation("111")?;
    println!("{:>4} {:>12} {:>10} {:>12} {:>8}", "m", "S_N(011)", "/sqrt(N)", "S_N(111)", "/N");
    for m in (4..=40).step_by(4) {
        let n = (1u64 << m) - 1;
        let a = square_root.partial_sum_fast(n)?.head();
        let b = linear.partial_sum_fast(n)?.head();
        let nf = (n + 1) as f64;
        println!("{m:>4} {a:>12} {:>10.4} {b:>12} {:>8.4}", a as f64 / nf.sqrt(), b as f64 / nf);
    }
    // the slow definition agrees on a short range
    for n in [0, 1, 100, 4095] {
        assert_eq!(square_root.partial_sum_fast(n)?, square_root.partial_sum_direct(n, u64::MAX)?);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
