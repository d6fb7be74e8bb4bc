// Classify one word and print the full report.
//
// `cargo run --example analyze_word -- 0110`

use subword_sums::certify::{classify, AnalysisConfig};
use subword_sums::BinaryWord;

fn run() -> subword_sums::Result<()> {
    // test-harness arguments are not words
    let arg = match std::env::args().nth(1) {
        Some(a) if !cfg!(test) => a,
        _ => "011".into(),
    };
    let w: BinaryWord = arg.parse()?;
    let report = classify(&w, None, &AnalysisConfig::default())?;
    print!("{}", report.to_text());
    println!("{}", report.to_json());
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
