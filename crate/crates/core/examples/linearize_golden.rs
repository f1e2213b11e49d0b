//! Linearization of the general subresonant map on weights (-3, -2, -1).

use subresonant::linearizer::{check_structure, embed, golden, linearize};

fn main() -> subresonant::Result<()> {
    let a = [1.0, 2.0, -1.0, 0.5, 0.0, 3.0, -0.25];
    let b = [0.5, 2.0, -1.0, 1.5];
    let c = [1.0, 2.0];
    let f = golden::general_form(&a, &b, &c);
    let l = linearize(&f)?;
    println!("basis:");
    for alpha in l.basis_src.entries() {
        println!("  {:?}", alpha.0);
    }
    println!("Lf =\n{:.3}", l.matrix);

    let report = golden::check(&f, 1e-12)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    println!("block triangular: {}", check_structure(&l).is_block_triangular());

    let v = [0.5, -1.0, 2.0];
    let lhs = embed(&l.basis_tgt, &f.evaluate(&v)?)?;
    let rhs = &l.matrix * embed(&l.basis_src, &v)?;
    println!("|embed(f(v)) - Lf embed(v)| = {:.2e}", (lhs - rhs).amax());
    Ok(())
}
