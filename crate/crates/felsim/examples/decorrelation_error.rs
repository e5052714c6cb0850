//! Relative error of the atom-field decorrelation as a function of the
//! driving strength, for Gaussian and exponentially correlated noise.
//!
//! ```bash
//! cargo run --release -p felsim --example decorrelation_error
//! ```

use felsim::decorr::{decorrelation_error_curve, LambdaOptions};
use felsim::noise::{PowerSpectralDensity, PsdFamily};
use felsim::pulse::Envelope;
use felsim::tls::AtomParams;

fn main() -> felsim::Result<()> {
    let env = Envelope::gaussian(3.0)?; // Gamma2 tau = 3
    let params = AtomParams::new(1.0);
    let rabi = [1e-3, 1e-2, 0.1, 0.3, 1.0];
    let n_traj = 2000;

    for gamma in [6.67, 1.11] {
        println!("bandwidth gamma = {gamma} Gamma2, {n_traj} pulses, t = t0, on resonance");
        println!(
            "{:>12} {:>22} {:>22}",
            "rabi/Gamma2", "error% (exponential)", "error% (gaussian)"
        );
        let mut curves = Vec::new();
        for family in [PsdFamily::Lorentzian, PsdFamily::Gaussian] {
            let psd = PowerSpectralDensity::from_bandwidth(family, gamma)?;
            curves.push(decorrelation_error_curve(
                &env,
                &psd,
                &params,
                &rabi,
                n_traj,
                17,
                LambdaOptions::default(),
            )?);
        }
        for (k, &r) in rabi.iter().enumerate() {
            println!(
                "{r:12.3} {:22.3} {:22.3}",
                curves[0][k].rel_error_percent, curves[1][k].rel_error_percent
            );
        }
        println!();
    }
    println!("the factorization degrades as the drive strengthens and as the");
    println!("bandwidth narrows toward the atomic scales");
    Ok(())
}
