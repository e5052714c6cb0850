//! Synthesize spiky stochastic pulses and verify that the ensemble mean
//! intensity recovers the deterministic envelope.
//!
//! ```bash
//! cargo run --release -p felsim --example generate_pulses
//! ```

use felsim::ensemble::trajectory_seed;
use felsim::noise::{FrequencyGrid, NoiseSynthesizer, PowerSpectralDensity};
use felsim::pulse::{make_pulse, pulse_energy, Envelope};

fn main() -> felsim::Result<()> {
    // Gaussian-correlated noise, sigma = 0.14 rad/fs, on a 10 fs pulse
    let psd = PowerSpectralDensity::gaussian(0.14)?;
    let env = Envelope::gaussian(10.0)?;
    let grid = FrequencyGrid::sized_for(&psd, 100.0, 0.5)?;
    let synth = NoiseSynthesizer::new(psd, grid)?;

    println!(
        "grid: {} points, dt = {:.4} fs, window = {:.1} fs",
        grid.n_points,
        grid.time_grid().dt,
        grid.time_grid().window()
    );
    println!(
        "noise: T_c = {:.2} fs, bandwidth = {:.4} rad/fs, captured mass = {:.6}",
        psd.coherence_time(),
        psd.bandwidth(),
        grid.captured_mass(&psd)
    );

    // one spiky realization
    let pulse = make_pulse(&synth.generate(1), &env)?;
    println!("\nsingle realization (every 16th sample):");
    println!("{:>8} {:>12} {:>12} {:>12}", "t", "Re E", "Im E", "I");
    for (j, t) in pulse.grid.times().enumerate().step_by(16) {
        if env.eval(t) > 1e-3 {
            let e = pulse.field[j];
            println!("{t:8.2} {:12.5} {:12.5} {:12.5}", e.re, e.im, e.norm_sqr());
        }
    }
    println!("pulse energy W = {:.4}", pulse_energy(&pulse));

    // ensemble mean intensity vs envelope
    let n_traj = 1000;
    let tg = grid.time_grid();
    let mut mean = vec![0.0; tg.n];
    for i in 0..n_traj {
        let p = make_pulse(&synth.generate(trajectory_seed(42, i)), &env)?;
        for (m, w) in mean.iter_mut().zip(p.intensities()) {
            *m += w;
        }
    }
    println!("\nmean intensity over {n_traj} pulses vs envelope:");
    println!("{:>8} {:>12} {:>12}", "t", "<I>", "f(t)");
    let mut max_dev: f64 = 0.0;
    for (j, t) in tg.times().enumerate().step_by(32) {
        let avg = mean[j] / n_traj as f64;
        max_dev = max_dev.max((avg - env.eval(t)).abs());
        if env.eval(t) > 1e-3 {
            println!("{t:8.2} {avg:12.5} {:12.5}", env.eval(t));
        }
    }
    println!("max |<I> - f| = {max_dev:.4}");
    Ok(())
}
