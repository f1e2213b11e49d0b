//! Transporting a conjugacy along a cocycle.

use subresonant::cocycle::{equivariance_transport, generate_sequence, Mode};
use subresonant::srpoly::{MultiIndex, PolyMap};
use subresonant::WeightSpec;

fn main() -> subresonant::Result<()> {
    let ws = WeightSpec::from_ints(&[-2, -1])?;
    let seq = generate_sequence(&ws, Mode::DiagonalModel, 0.0, 2, 200)?;

    let h0 = PolyMap::from_terms(&ws, &ws, [(0, vec![1, 0], 1.0), (1, vec![0, 1], 1.0), (0, vec![0, 2], 0.7)])?;
    let r = equivariance_transport(&seq, &seq, &h0, 200)?;
    println!("subresonant h0: class {}, sup ratio {:.4}", r.class.class, r.sup_ratio);

    let mut marker = PolyMap::identity(&ws);
    marker.add_term(1, MultiIndex(vec![2, 0]), 1.0)?;
    let r = equivariance_transport(&seq, &seq, &marker, 200)?;
    println!("marker y += x^2: class {}, log growth rate {:.4}", r.class.class, r.rate);
    Ok(())
}
