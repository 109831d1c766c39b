// Skew informations of small states, with the trace formulas as a cross-check.

use skew_info::qmat::CVector;
use skew_info::skew::{variance, wy_direct, wyd_direct};
use skew_info::{skew_info, DensityMatrix, MonotoneFunction, Observable, C64};

pub fn run_example() -> skew_info::Result<()> {
    let h = Observable::number(2);
    let s = 0.5f64.sqrt();
    let plus = DensityMatrix::pure(&CVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]))?;

    let wy = MonotoneFunction::wigner_yanase();
    let value = skew_info(&plus, &h, &wy)?.value;
    println!("I^WY(|+>, diag(0,1))     = {value:.12}");
    println!("Var(H) on |+>            = {:.12}", variance(&plus, &h)?);

    let mixed = DensityMatrix::maximally_mixed(2)?;
    println!("I^WY(I/2)                = {:.12}", skew_info(&mixed, &h, &wy)?.value);

    // a full-rank qubit: the members of the family now disagree
    let rho = DensityMatrix::new(skew_info::CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.7, 0.0),
            C64::new(0.2, 0.1),
            C64::new(0.2, -0.1),
            C64::new(0.3, 0.0),
        ],
    ))?;
    for f in [
        MonotoneFunction::sld(),
        wy.clone(),
        MonotoneFunction::wyd(0.25)?,
        MonotoneFunction::wyd(0.1)?,
    ] {
        println!("{:>10}: {:.12}", f.id(), skew_info(&rho, &h, &f)?.value);
    }
    println!("WY trace formula       : {:.12}", wy_direct(&rho, &h)?);
    println!("WYD(0.25) trace formula: {:.12}", wyd_direct(&rho, &h, 0.25)?);

    assert!((value - 0.25).abs() < 1e-12);
    Ok(())
}

fn main() -> skew_info::Result<()> {
    run_example()
}
