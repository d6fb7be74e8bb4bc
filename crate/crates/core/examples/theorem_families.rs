// Certificates produced by the closed-form families, each replayed
// against the word maps.

use subword_sums::certify::{
    check_long_prefix, check_long_prefix_canonical, check_simple_family, check_two_runs, Certificate,
};
use subword_sums::BinaryWord;

fn show(label: &str, c: &Certificate) -> subword_sums::Result<()> {
    c.replay()?;
    println!("{label:<28} w={} u={} a={} b={} rep={}", c.word, c.u, c.a, c.b, c.cycle_rep);
    Ok(())
}

fn run() -> subword_sums::Result<()> {
    let w: BinaryWord = "10".parse()?;
    show("simple a=1 k=4 j=3", &check_simple_family(1, &w, 4, 3)?)?;
    show("two runs a=0 j=3 k=2", &check_two_runs(0, 3, 2, &"10".parse()?)?)?;
    show("long prefix canonical", &check_long_prefix_canonical(1, 2, &"0101".parse()?)?)?;
    show("long prefix general", &check_long_prefix(0, 4, &"1101".parse()?, 0, &"1100".parse()?)?)?;
    // a violated hypothesis is reported by name
    match check_long_prefix(0, 3, &"1101".parse()?, 0, &"1100".parse()?) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("k = 3 is not a power of two"),
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
