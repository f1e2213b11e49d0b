//! Lyapunov exponents of a generated cocycle and of its linearization.

use subresonant::cocycle::{
    forward_regularity, generate_sequence, linearized_spectrum, lyapunov_weight, qr_exponents, LyapunovSpectrum,
    Mode,
};
use subresonant::WeightSpec;

fn main() -> subresonant::Result<()> {
    let ws = WeightSpec::from_ints(&[-2, -1])?;
    let seq = generate_sequence(&ws, Mode::Perturbed, 0.1, 3, 2000)?;
    println!("QR exponents: {:?}", qr_exponents(seq.matrices())?);
    for v in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
        println!("weight of {v:?}: {:.4}", lyapunov_weight(&seq, &v)?.rate);
    }
    println!("regularity defect: {:.2e}", forward_regularity(&seq, &LyapunovSpectrum::from_spec(&ws))?);

    let poly = generate_sequence(&ws, Mode::DiagonalModel, 0.01, 3, 2000)?;
    let rep = linearized_spectrum(&poly, 0.05)?;
    println!("linearized exponents: {:?}", rep.exponents);
    println!("predicted combinations: {:?}", rep.combinations);
    println!("max distance {:.4}, zero multiplicity {}", rep.max_distance(), rep.zero_multiplicity);
    Ok(())
}
