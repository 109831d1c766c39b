// Built-in standard monotone functions and user-supplied tables.

use skew_info::monotone::{builtin, log_grid, validate_standard, TableFunction, TableSpec};
use skew_info::{Error, MonotoneFunction};

pub fn run_example() -> skew_info::Result<()> {
    let grid = log_grid(1e-6, 1e6, 241);
    for f in [builtin("WY", None)?, builtin("SLD", None)?, builtin("WYD", Some(0.3))?] {
        let report = f.validate(&grid);
        println!(
            "{:>9}: f(0) = {:.4}, w(1, 1/4) = {:.6}, axioms pass: {}",
            f.id(),
            f.f_at_zero(),
            f.weight(1.0, 0.25)?,
            report.passed
        );
    }

    // x^2 is neither symmetric nor operator monotone
    let square = validate_standard(|x| x * x, &grid);
    println!("x^2 symmetry error {:e}, passes: {}", square.symmetry_error, square.passed);

    // the Wigner-Yanase function sampled on [0, 1]
    let samples: Vec<[f64; 2]> = (0..=64)
        .map(|i| {
            let x = i as f64 / 64.0;
            let s = (1.0 + x.sqrt()) / 2.0;
            [x, s * s]
        })
        .collect();
    let spec = TableSpec {
        name: "wy-table".into(),
        f0: 0.25,
        samples,
    };
    let table = MonotoneFunction::from_table(TableFunction::new(spec)?)?;
    let wy = MonotoneFunction::wigner_yanase();
    for x in [0.05, 0.5, 3.0] {
        println!("x = {x}: table {:.6}, exact {:.6}", table.eval(x), wy.eval(x));
    }

    // the right logarithmic derivative has f(0) = 0 and is refused
    let rld = TableSpec {
        name: "rld".into(),
        f0: 0.0,
        samples: vec![[0.5, 2.0 * 0.5 / 1.5], [1.0, 1.0]],
    };
    match MonotoneFunction::from_table(TableFunction::new(rld)?) {
        Err(Error::NonRegular { id, .. }) => println!("{id}: rejected, not regular"),
        other => panic!("expected a regularity error, got {other:?}"),
    }
    Ok(())
}

fn main() -> skew_info::Result<()> {
    run_example()
}
