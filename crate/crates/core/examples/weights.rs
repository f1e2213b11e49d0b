//! Weights of vectors and linear maps on a weighted space.

use nalgebra::DMatrix;
use subresonant::weighted_algebra::{dual_weight, flag_of, linear_map_weight, weight_of_vector};
use subresonant::WeightSpec;

fn main() -> subresonant::Result<()> {
    let ws = WeightSpec::from_ints(&[-3, -2, -2, -1])?;
    println!("spec {ws}");
    for v in [[1.0, 0.0, 0.0, 0.0], [1.0, 5.0, 0.0, 0.0], [0.0, 0.0, 0.0, 2.0], [0.0; 4]] {
        println!("  weight of {v:?} = {}", weight_of_vector(&ws, &v, 1e-12)?);
    }
    for level in flag_of(&ws).levels {
        println!("  flag level: weight {} spans first {} coordinates", level.weight, level.prefix_len);
    }
    println!("dual spec {}", dual_weight(&ws).spec);

    // sends e_0 to e_0 + e_3, raising its weight from -3 to -1
    let mut t = DMatrix::<f64>::identity(4, 4);
    t[(3, 0)] = 1.0;
    println!("weight of the shear: {}", linear_map_weight(&ws, &ws, &t, 1e-12)?);
    Ok(())
}
