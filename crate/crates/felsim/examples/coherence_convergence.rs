//! Convergence of the estimated degree of first-order coherence to the
//! analytic Gaussian correlation as the ensemble grows.
//!
//! ```bash
//! cargo run --release -p felsim --example coherence_convergence
//! ```

use felsim::ensemble::trajectory_seed;
use felsim::noise::{FrequencyGrid, NoiseSynthesizer, PowerSpectralDensity};
use felsim::pulse::{make_pulse, Envelope};
use felsim::stats::{EnsembleAccumulator, StatsConfig};

fn main() -> felsim::Result<()> {
    let psd = PowerSpectralDensity::gaussian(0.25)?;
    let env = Envelope::gaussian(10.0)?;
    let grid = FrequencyGrid::sized_for(&psd, 100.0, 0.5)?;
    let synth = NoiseSynthesizer::new(psd, grid)?;
    let cfg = StatsConfig { collect_spectrum: false, ..Default::default() };

    let mut curves = Vec::new();
    for n_traj in [30u64, 100, 1000] {
        let mut acc = EnsembleAccumulator::new(grid.time_grid(), cfg.clone());
        for i in 0..n_traj {
            let pulse = make_pulse(&synth.generate(trajectory_seed(11, i)), &env)?;
            acc.accumulate(&pulse, None)?;
        }
        curves.push((n_traj, acc.g1_vs_lag()?));
    }

    println!("|g1| vs delay (Gaussian PSD, sigma = 0.25 rad/fs):");
    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>10}",
        "dt", "n=30", "n=100", "n=1000", "analytic"
    );
    let len = curves[0].1.len();
    for k in 0..len {
        let dt = curves[0].1[k].0;
        if dt > 12.0 {
            break;
        }
        println!(
            "{dt:8.3} {:10.4} {:10.4} {:10.4} {:10.4}",
            curves[0].1[k].1,
            curves[1].1[k].1,
            curves[2].1[k].1,
            psd.g1(dt)
        );
    }
    for (n, curve) in &curves {
        let max_dev = curve
            .iter()
            .filter(|(dt, _)| *dt <= 8.0)
            .map(|&(dt, g)| (g - psd.g1(dt)).abs())
            .fold(0.0f64, f64::max);
        println!("n = {n:5}: max deviation from analytic = {max_dev:.4}");
    }
    Ok(())
}
