use hadamard_core::abp::{Abp, LinearForm};
use hadamard_core::products::hadamard_abp;
use hadamard_core::scalar::{Field, Scalar};
use hadamard_core::Caps;

fn main() -> Result<(), hadamard_core::Error> {
    let q = Field::Rationals;
    let mut p = Abp::new(2, q.clone(), vec![1, 1, 1])?;
    p.add_edge(
        0,
        0,
        0,
        LinearForm::new(q.zero(), [(0, Scalar::integer(1)), (1, Scalar::integer(2))]),
    )?;
    p.add_edge(1, 0, 0, LinearForm::var(1, q.one()))?;
    let h = hadamard_abp(&p, &p)?;
    println!("{:?}", h.abp.expand(&Caps::default())?.terms());
    Ok(())
}
