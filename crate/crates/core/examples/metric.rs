//! One-sided Lyapunov metric for a perturbed cocycle.

use subresonant::cocycle::{check_metric, generate_sequence, lyapunov_metric, Mode};
use subresonant::WeightSpec;

fn main() -> subresonant::Result<()> {
    let ws = WeightSpec::from_ints(&[-3, -2, -1])?;
    let seq = generate_sequence(&ws, Mode::Perturbed, 0.1, 5, 1000)?;
    let metric = lyapunov_metric(&seq, 0.1)?;
    println!("series terms at steps 0..5: {:?}", &metric.terms[..5]);
    for k in [0, 10, 500] {
        let v = [0.0, 1.0, 0.0];
        println!("|e_2|'_{k} = {:.4}", metric.norm(k, &v).expect("stored step"));
    }
    let report = check_metric(&seq, &metric, 4, 5)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    println!("passed: {}", report.passed(1e-9));
    Ok(())
}
