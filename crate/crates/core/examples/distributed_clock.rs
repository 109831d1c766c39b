// Parties report local skew informations; the requester decides whether the
// shared state is worth a clock request.

use skew_info::clocknet::{
    aberg_two_qubit_scenario, evaluate_decision, random_scenario, run_reporting, scaled_rule_witness, Rule,
};
use skew_info::{random, MonotoneFunction};

pub fn run_example() -> skew_info::Result<()> {
    let f = MonotoneFunction::wigner_yanase();
    let scenario = aberg_two_qubit_scenario(4, 0.15, f.clone())?;
    for p in run_reporting(&scenario)? {
        println!("party {} reports {:.12}", p.id, p.reported_value);
    }
    for rule in [Rule::Naive, Rule::Conservative] {
        let rec = evaluate_decision(&scenario, rule)?;
        println!(
            "{rule:>12}: request {}, global {:.12}, sound {}",
            rec.decision, rec.actual_global, rec.sound
        );
    }

    let mut rng = random::rng(9);
    let mut unsound = 0;
    for i in 0..200 {
        let s = random_scenario(&mut rng, 2 + i % 3, f.clone())?;
        if !evaluate_decision(&s, Rule::Conservative)?.sound {
            unsound += 1;
        }
    }
    println!("conservative rule on 200 random scenarios: {unsound} unsound");

    for c in [1.2, 2.0] {
        if let Some(w) = scaled_rule_witness(c, 2, &[2, 4, 8], 16, &f)? {
            println!(
                "c = {c}: M = {}, blocks of {}, threshold {:.6} > global {:.6}",
                w.m, w.block_size, w.threshold, w.record.actual_global
            );
        }
    }
    Ok(())
}

fn main() -> skew_info::Result<()> {
    run_example()
}
