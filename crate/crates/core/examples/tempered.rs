//! Temperedness of scalar orbit series.

use subresonant::tempered::{bounded_return_series, c_epsilon, exp_growth_check, OrbitSeries};

fn main() -> subresonant::Result<()> {
    let s = bounded_return_series(10_000, 2.0, 50)?;
    let r = exp_growth_check(&s, 2.0)?;
    println!("bounded return: rate {:.4}, tempered {}", r.rate.rate, r.rate.tempered);
    for eps in [0.5, 0.1, 0.01] {
        println!("  C_{eps} = {:.4e}", c_epsilon(&s, eps)?);
    }

    let control = OrbitSeries::from_logs((0..=10_000).map(|n| 0.5 * n as f64).collect())?;
    let r = exp_growth_check(&control, 2.0)?;
    println!("e^(n/2): rate {:.4}, tempered {}", r.rate.rate, r.rate.tempered);
    println!("step bound 1.5 rejected: {}", exp_growth_check(&control, 1.5).is_err());
    Ok(())
}
