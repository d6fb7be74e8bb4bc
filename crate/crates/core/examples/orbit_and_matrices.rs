// Orbit of `u` under the two digit maps and the signed permutation
// matrices built from it.

use subword_sums::dynamics::{orbit, step};
use subword_sums::linrep::{format_grid, LinearRepresentation};
use subword_sums::BinaryWord;

fn run() -> subword_sums::Result<()> {
    let w: BinaryWord = "011".parse()?;
    let u: BinaryWord = "001".parse()?;
    for a in 0..2 {
        let r = step(&w, a, &u)?;
        println!("S_{a}({u}) = {} with sign bit {}", r.next, r.sign_bit);
    }
    let table = orbit(&w, &u)?;
    print!("{}", table.dump());
    for a in 0..2 {
        println!("cycle lengths of S_{a}: {:?}", table.cycle_lengths(a));
    }
    let rep = LinearRepresentation::new(table);
    println!("M0\n{}", format_grid(&rep.matrix(0).to_dense()));
    println!("M1\n{}", format_grid(&rep.matrix(1).to_dense()));
    println!("M\n{}", format_grid(&rep.dense_m()));
    println!("c = {}", rep.constant_c());
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
