// Covariant channels and commuting instruments never increase skew information.

use skew_info::covariant::{is_covariant, selective_monotonicity_check, QuantumChannel};
use skew_info::random::{self, EnergyFrame};
use skew_info::{skew_info, MonotoneFunction, Observable};

pub fn run_example() -> skew_info::Result<()> {
    let f = MonotoneFunction::wigner_yanase();
    let mut rng = random::rng(42);

    let input = EnergyFrame::random(&mut rng, 4);
    let output = EnergyFrame::random(&mut rng, 3);
    let channel = random::covariant_channel(&mut rng, &input, &output);
    let (h_in, h_out) = (input.observable(), output.observable());
    let cov = is_covariant(&channel, &h_in, &h_out)?;
    println!(
        "random 4 -> 3 channel: {} Kraus operators, covariance deviation {:e}",
        channel.kraus().len(),
        cov.max_deviation
    );
    let rho = random::density(&mut rng, 4);
    let before = skew_info(&rho, &h_in, &f)?.value;
    let after = skew_info(&channel.apply(&rho)?, &h_out, &f)?.value;
    println!("I before {before:.6}, after {after:.6}");
    assert!(after <= before + 1e-9);

    let frame = EnergyFrame::random(&mut rng, 4);
    let h = frame.observable();
    let instrument = random::commuting_instrument(&mut rng, &frame, 3)?;
    let rho = random::density(&mut rng, 4);
    let check = selective_monotonicity_check(&instrument, &rho, &h, &f)?;
    println!(
        "instrument with 3 outcomes: I = {:.6}, average after = {:.6}",
        check.before, check.after_avg
    );

    // dephasing in the energy basis removes all skew information
    let dephased = QuantumChannel::dephasing(&h)?.apply(&rho)?;
    println!("after dephasing: {:.3e}", skew_info(&dephased, &h, &f)?.value);

    let hadamard = QuantumChannel::unitary(skew_info::aberg::hadamard())?;
    let n = Observable::number(2);
    println!("Hadamard covariant: {}", is_covariant(&hadamard, &n, &n)?.covariant);
    Ok(())
}

fn main() -> skew_info::Result<()> {
    run_example()
}
