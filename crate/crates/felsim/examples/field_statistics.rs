//! Chaotic-light checks on the generated pulses: exponential intensity
//! distribution, Gamma-distributed pulse energies, and the Wick second
//! moment.
//!
//! ```bash
//! cargo run --release -p felsim --example field_statistics
//! ```

use felsim::ensemble::trajectory_seed;
use felsim::noise::{FrequencyGrid, NoiseSynthesizer, PowerSpectralDensity};
use felsim::pulse::{make_pulse, Envelope};
use felsim::stats::{DistModel, EnsembleAccumulator, StatsConfig};

fn main() -> felsim::Result<()> {
    let psd = PowerSpectralDensity::gaussian(0.25)?;
    let tau = 10.0;
    let env = Envelope::gaussian(tau)?;
    let grid = FrequencyGrid::sized_for(&psd, 100.0, 0.5)?;
    let synth = NoiseSynthesizer::new(psd, grid)?;
    let probe = env.center() + tau / 2.0;

    let mut acc = EnsembleAccumulator::new(
        grid.time_grid(),
        StatsConfig {
            probe_times: vec![probe],
            collect_spectrum: false,
            ..Default::default()
        },
    );
    let n_traj = 1000;
    for i in 0..n_traj {
        let pulse = make_pulse(&synth.generate(trajectory_seed(7, i)), &env)?;
        acc.accumulate(&pulse, None)?;
    }

    let int_fit = acc.fit_intensity_distribution(0)?;
    println!("instantaneous intensity at t - t0 = tau/2 ({n_traj} samples):");
    println!(
        "  exponential fit: chi2/dof = {:.3} over {} dof (ok = {})",
        int_fit.chi2_per_dof, int_fit.dof, int_fit.fit_ok
    );
    let samples = acc.intensity_samples(0);
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let m2 = samples.iter().map(|x| (x / mean).powi(2)).sum::<f64>() / samples.len() as f64;
    println!("  Wick second moment <(I/<I>)^2> = {m2:.3} (chaotic light: 2)");

    let en_fit = acc.fit_energy_distribution()?;
    let m = match en_fit.model {
        DistModel::Gamma { shape } => shape,
        DistModel::NegativeExponential => 1.0,
    };
    println!("\npulse energy over {n_traj} pulses:");
    println!(
        "  Gamma fit: M = {m:.3} (moment formula), chi2/dof = {:.3} (ok = {})",
        en_fit.chi2_per_dof, en_fit.fit_ok
    );
    println!(
        "  closed form for this Gaussian/Gaussian case: M = {:.3}",
        (1.0 + 2.0 * (0.25f64 * tau).powi(2)).sqrt()
    );

    println!("\nnormalized energy histogram (density vs Gamma pdf):");
    println!("{:>10} {:>10} {:>10}", "W/<W>", "density", "gamma_pdf");
    let density = en_fit.histogram.density();
    for (edge, d) in en_fit.histogram.edges.windows(2).zip(density).step_by(2) {
        let center = 0.5 * (edge[0] + edge[1]);
        println!("{center:10.3} {d:10.4} {:10.4}", en_fit.model.pdf(center));
    }
    Ok(())
}
