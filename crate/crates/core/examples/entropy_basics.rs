//! Entropies of a few textbook states: a Bell pair, a GHZ state and a
//! classical-quantum state.
//!
//! ```bash
//! cargo run --example entropy_basics
//! ```

use qrelay::entropy::{
    coherent_information, conditional_entropy, conditional_mutual_information, mutual_information, von_neumann_entropy,
    InfoQuery, Quantity,
};
use qrelay::qlin::{c, CVector, DensityOperator, Subsystem};

fn q(name: &str) -> Subsystem {
    Subsystem::quantum(name, 2)
}

fn main() -> qrelay::Result<()> {
    let s = 0.5f64.sqrt();
    let bell = DensityOperator::pure(vec![q("A"), q("B")], &CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]))?;
    println!("Bell pair");
    println!("  H(AB)    = {:.6}", von_neumann_entropy(&bell)?);
    println!("  H(A)     = {:.6}", von_neumann_entropy(&bell.partial_trace(&["A"])?)?);
    println!("  H(A|B)   = {:.6}", conditional_entropy(&bell, &["A"], &["B"])?);
    println!("  I(A;B)   = {:.6}", mutual_information(&bell, &["A"], &["B"])?);
    println!("  I(A>B)   = {:.6}", coherent_information(&bell, &["A"], &["B"])?);

    let mut ghz = CVector::zeros(8);
    ghz[0] = c(s, 0.0);
    ghz[7] = c(s, 0.0);
    let ghz = DensityOperator::pure(vec![q("A"), q("B"), q("C")], &ghz)?;
    println!("GHZ state");
    println!("  I(A;B)   = {:.6}", mutual_information(&ghz, &["A"], &["B"])?);
    println!("  I(A;B|C) = {:.6}", conditional_mutual_information(&ghz, &["A"], &["B"], &["C"])?);

    // X uniform over {|0⟩, |+⟩}; the Holevo information is h(cos²(π/8))
    let plus = CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]);
    let states = [DensityOperator::basis(q("B"), 0)?, DensityOperator::pure(vec![q("B")], &plus)?];
    let x = Subsystem::classical("X", 2);
    let cq = DensityOperator::classical_quantum(&[x], &[q("B")], |d| Ok(Some((0.5, states[d].matrix().clone()))))?;
    let holevo = InfoQuery::new(Quantity::Mutual, &[&["X"], &["B"]]);
    println!("c-q state");
    println!("  I(X;B)   = {:.6}", holevo.evaluate(&cq)?);
    Ok(())
}
