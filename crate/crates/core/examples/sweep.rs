// Exhaustive classification of every word up to a length, with the verdict
// tally and the cross-check count.

use subword_sums::cli::{sweep, RunConfig};

fn run() -> subword_sums::Result<()> {
    let maxlen = match std::env::args().nth(1) {
        Some(a) if !cfg!(test) => a.parse().map_err(|_| subword_sums::Error::Parse(format!("bad length {a:?}")))?,
        _ => 6,
    };
    let mut sink = Vec::new();
    let summary = sweep(maxlen, &RunConfig::default(), &mut sink)?;
    for (verdict, count) in &summary.counts {
        println!("{:<22} {count}", verdict.as_str());
    }
    println!("total {} with {} consistency violations", summary.total, summary.consistency_violations);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
