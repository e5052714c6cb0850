//! Reproduction of the Kr 3d -> 5p frequency-response measurement: a weak
//! Gaussian-noise ensemble (gamma = 0.72 Gamma2, Gamma2 tau = 20) whose scan
//! FWHM lands near 1.38 Gamma2, with a Voigt fit of the lineshape.
//!
//! ```bash
//! cargo run --release -p felsim --example kr_experiment
//! ```

use felsim::lineshape::{fit_voigt, voigt_width};
use felsim::noise::{PowerSpectralDensity, PsdFamily};
use felsim::pulse::{combined_bandwidth, Envelope};
use felsim::tls::{detuning_scan, AtomParams};
use felsim::units;

fn main() -> felsim::Result<()> {
    let gamma = 0.72;
    let tau = 20.0;
    let env = Envelope::gaussian(tau)?;
    let params = AtomParams::new(1.0).with_rabi_peak(1e-2);
    let psd = PowerSpectralDensity::from_bandwidth(PsdFamily::Gaussian, gamma)?;
    let detunings: Vec<f64> = (0..=24).map(|i| i as f64 * 0.05).collect();
    let n_traj = 800; // the full run uses 2000

    println!("Kr 3d -> 5p: Gamma2 = {} meV, lifetime {:.2} fs", units::KR_GAMMA2_MEV, units::KR_LIFETIME_FS);
    println!("pulse: Gamma2 tau = {tau} ({:.0} fs), gamma = {gamma} Gamma2", tau * units::KR_LIFETIME_FS);

    let scan = detuning_scan(&env, &psd, &params, &detunings, n_traj, 2026)?;
    println!("\n{:>10} {:>14} {:>10}", "detuning", "<Q2>", "stderr");
    for i in (0..detunings.len()).step_by(2) {
        println!(
            "{:10.2} {:14.6e} {:10.2e}",
            detunings[i], scan.yields[i], scan.stderrs[i]
        );
    }

    let fwhm = scan.fwhm()?.width;
    let dw = combined_bandwidth(tau, gamma);
    println!("\nscan FWHM       = {fwhm:.3} Gamma2 (experiment: about 1.38)");
    println!("combined dw_s   = {dw:.4} Gamma2");
    println!("Voigt-law width = {:.3} Gamma2", voigt_width(1.0, dw));

    let fit = fit_voigt(&scan, 1.0)?;
    println!(
        "Voigt fit: Gaussian component {:.3}, total width {:.3} Gamma2 ({} iterations, converged = {})",
        fit.fwhm_gauss, fit.gamma_voigt, fit.iterations, fit.converged
    );
    Ok(())
}
