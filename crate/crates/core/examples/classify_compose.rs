//! Classification, composition and translation of polynomial maps.

use subresonant::srpoly::{classify, compose, max_degree, translate, PolyMap};
use subresonant::{Rational, WeightSpec};

fn main() -> subresonant::Result<()> {
    let ws = WeightSpec::from_ints(&[-2, -1])?;
    println!("max degree of a subresonant map: {}", max_degree(&ws, &ws, Rational::from_integer(0))?);

    // x -> 2x + y^2, y -> y: the y^2 term is exactly resonant
    let f = PolyMap::from_terms(&ws, &ws, [(0, vec![1, 0], 2.0), (0, vec![0, 2], 1.0), (1, vec![0, 1], 1.0)])?;
    // x -> x + y^2 / 2, y -> y: identity plus a resonant correction
    let g = PolyMap::from_terms(&ws, &ws, [(0, vec![1, 0], 1.0), (0, vec![0, 2], 0.5), (1, vec![0, 1], 1.0)])?;
    for (name, m) in [("f", &f), ("g", &g)] {
        let c = classify(m);
        println!("{name}: class {}, weight {}", c.class, c.weight);
    }
    let h = compose(&g, &f)?;
    println!("g o f has {} terms, class {}", h.terms().count(), classify(&h).class);
    println!("g o f at (1, 1) = {:?}", h.evaluate(&[1.0, 1.0])?);

    let t = translate(&f, &[0.0, 1.0])?;
    println!("f translated by (0, 1): f(0) = {:?}, class {}", t.evaluate(&[0.0, 0.0])?, classify(&t).class);

    let bad = PolyMap::from_terms(&ws, &ws, [(1, vec![2, 0], 1.0)])?;
    println!("y -> x^2: class {}, weight {}", classify(&bad).class, classify(&bad).weight);
    Ok(())
}
