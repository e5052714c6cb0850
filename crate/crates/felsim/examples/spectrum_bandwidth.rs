//! Energy spectral density of the pulse ensemble and the quadrature
//! bandwidth law `dw = sqrt(dw_min^2 + gamma^2)`.
//!
//! ```bash
//! cargo run --release -p felsim --example spectrum_bandwidth
//! ```

use felsim::noise::{FrequencyGrid, PowerSpectralDensity, PsdFamily};
use felsim::pulse::{combined_bandwidth, fourier_limited_bandwidth, Envelope};
use felsim::runner::collect_field_stats;
use felsim::stats::StatsConfig;

fn main() -> felsim::Result<()> {
    let tau = 10.0;
    let env = Envelope::gaussian(tau)?;
    let flb = fourier_limited_bandwidth(tau);
    println!("Fourier-limited bandwidth for tau = {tau} fs: {flb:.4} rad/fs");
    println!(
        "\n{:>12} {:>12} {:>12} {:>12}",
        "gamma/dw_min", "gamma", "measured", "combined law"
    );
    for ratio in [0.2, 1.0, 5.0] {
        let gamma = ratio * flb;
        let psd = PowerSpectralDensity::from_bandwidth(PsdFamily::Gaussian, gamma)?;
        let grid = FrequencyGrid::sized_for(&psd, 20.0 * tau, tau / 20.0)?;
        let acc = collect_field_stats(&psd, &env, grid, &StatsConfig::default(), 500, 3)?;
        let spec = acc.energy_spectral_density()?;
        let measured = spec.fwhm()?;
        let expected = combined_bandwidth(tau, gamma);
        println!(
            "{ratio:12.2} {gamma:12.4} {measured:12.4} {expected:12.4}   ({:+.2}%)",
            100.0 * (measured - expected) / expected
        );
    }
    Ok(())
}
