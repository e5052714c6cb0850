//! Lineshape of the mean resonant-Auger yield for exponentially correlated
//! noise, against the phase-diffusion model (G21 -> G21 + gamma).
//!
//! ```bash
//! cargo run --release -p felsim --example lineshape_scan
//! ```

use felsim::decorr::pdm_scan;
use felsim::noise::{PowerSpectralDensity, PsdFamily};
use felsim::pulse::Envelope;
use felsim::tls::{detuning_scan, AtomParams};

fn main() -> felsim::Result<()> {
    let env = Envelope::gaussian(3.0)?; // Gamma2 tau = 3
    let params = AtomParams::new(1.0).with_rabi_peak(1e-2);
    let gamma = 3.33;
    let psd = PowerSpectralDensity::from_bandwidth(PsdFamily::Lorentzian, gamma)?;
    let detunings: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();

    let n_traj = 800;
    println!("exponentially correlated noise, gamma = {gamma} Gamma2, {n_traj} pulses");
    let scan = detuning_scan(&env, &psd, &params, &detunings, n_traj, 9)?;
    let pdm = pdm_scan(&env, &params, gamma, &detunings)?;

    println!(
        "\n{:>10} {:>14} {:>12} {:>14} {:>8}",
        "detuning", "<Q2> ensemble", "stderr", "PDM", "pull"
    );
    for (i, &delta) in detunings.iter().enumerate() {
        let pull = (scan.yields[i] - pdm.yields[i]) / scan.stderrs[i].max(1e-300);
        println!(
            "{delta:10.2} {:14.6e} {:12.2e} {:14.6e} {pull:8.2}",
            scan.yields[i], scan.stderrs[i], pdm.yields[i]
        );
    }
    println!(
        "\nscan FWHM = {:.3} Gamma2, PDM FWHM = {:.3} Gamma2 (both half-scans, mirrored)",
        scan.fwhm()?.width,
        pdm.fwhm()?.width
    );
    println!(
        "max conservation drift over the ensemble: {:.2e}",
        scan.metadata.max_conservation_drift
    );
    Ok(())
}
