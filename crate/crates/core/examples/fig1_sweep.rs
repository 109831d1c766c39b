// Superadditivity gap of the two-qubit protocol output against the ladder width.

use skew_info::aberg::{fig1_sweep, strongest_violation};
use skew_info::io::write_fig1_csv;
use skew_info::MonotoneFunction;

pub fn run_example() -> skew_info::Result<()> {
    let f = MonotoneFunction::wigner_yanase();
    let rows = fig1_sweep(1..=50, &f)?;
    let mut csv = Vec::new();
    write_fig1_csv(&mut csv, &rows[..8])?;
    print!("{}", String::from_utf8_lossy(&csv));
    println!("...");

    let worst = strongest_violation(&rows).expect("violations exist");
    println!("strongest violation at M = {} with gap {:.12}", worst.m, worst.gap);
    let far = fig1_sweep(200..=200, &f)?[0];
    println!("M = 200: gap {:.12}", far.gap);

    for f in [MonotoneFunction::sld(), MonotoneFunction::wyd(0.2)?] {
        let worst = strongest_violation(&fig1_sweep(1..=50, &f)?).expect("violations exist");
        println!("{}: strongest violation at M = {} ({:.6})", f.id(), worst.m, worst.gap);
    }
    Ok(())
}

fn main() -> skew_info::Result<()> {
    run_example()
}
