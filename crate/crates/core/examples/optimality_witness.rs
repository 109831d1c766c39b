// Nested block splits of one protocol output: the sum over the finest
// level overtakes the global value, so no constant above `1/k` is safe.

use skew_info::aberg::{hadamard, optimality_witness};
use skew_info::MonotoneFunction;

pub fn run_example() -> skew_info::Result<()> {
    let f = MonotoneFunction::wigner_yanase();
    for depth in [2, 3, 4, 5] {
        let r = optimality_witness(&hadamard(), 2, depth, 8, &f)?;
        println!(
            "N = {:>2}: global {:.6}, unit sum {:.6}, ratio to global {:.3}, ratio to ancilla {:.3}",
            r.n, r.global, r.unit_sum, r.ratio_to_global, r.ratio_to_ancilla
        );
        for level in &r.levels {
            println!(
                "    {:>2} blocks of {:>2}: each {:.6}, weak bound holds: {}",
                level.blocks, level.block_size, level.block_value, level.weak_bound_holds
            );
        }
    }
    Ok(())
}

fn main() -> skew_info::Result<()> {
    run_example()
}
