// The three independent tests for an eigenvalue of modulus 2, run side by
// side: certificate search, phase propagation and `det(2I - M)`.

use subword_sums::certify::find_certificate;
use subword_sums::dynamics::OrbitTable;
use subword_sums::linrep::LinearRepresentation;
use subword_sums::spectra::{
    detect_modulus_two, eigenvalue_two_by_determinant, spectral_radius_estimate, to_dense_f64,
};
use subword_sums::BinaryWord;

fn run() -> subword_sums::Result<()> {
    println!("{:<10} {:>5} {:>12} {:>8} {:>14} {:>8}", "word", "size", "certificate", "phases", "det(2I-M)", "radius");
    for word in ["011", "111", "0110", "11011", "000", "0100100", "10011001"] {
        let w: BinaryWord = word.parse()?;
        let u = BinaryWord::last_unit(w.len())?;
        let rep = LinearRepresentation::new(OrbitTable::build(&w, &u)?);
        let cert = find_certificate(&w, &u)?;
        let phases = detect_modulus_two(rep.matrix(0), rep.matrix(1))?;
        let (det, _) = eigenvalue_two_by_determinant(&rep.dense_m(), usize::MAX)?;
        let radius = spectral_radius_estimate(&to_dense_f64(&rep.dense_m()), 1e-6);
        println!(
            "{word:<10} {:>5} {:>12} {:>8} {:>14} {:>8.4}",
            rep.size(),
            cert.is_some(),
            format!("{:?}", phases.phases),
            det.to_string(),
            radius.estimate
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
