//! Phase-diffusion-model solver and the decorrelation-error diagnostic.
//!
//! The decorrelation approximation factorizes the atom-field correlator,
//!
//! ```text
//! <conj(W)(t) W(t') n(t')>  ~  <conj(W)(t) W(t')> <n(t')>,
//! ```
//!
//! which for exponentially correlated noise reduces the averaged dynamics to
//! the deterministic equations with `G21 -> G21 + gamma` (the PDM). The error
//! metric compares the Monte Carlo estimate of
//!
//! ```text
//! lambda(t) = integral_0^t dt' exp(alpha (t - t')) <conj(W)(t) W(t') n(t')>
//! ```
//!
//! against its factorized counterpart, as a relative percentage.

use num_complex::Complex64;

use crate::ensemble::{chunked_map_reduce, trajectory_seed, Merge, RunningScalar, RunningSeries};
use crate::error::{Error, Result};
use crate::lineshape::{LineshapeScan, ScanMetadata};
use crate::noise::{NoiseSynthesizer, NoiseTrajectory, PowerSpectralDensity, TimeGrid};
use crate::pulse::{make_pulse, Envelope};
use crate::tls::{propagate_trajectory, propagate_yield, rabi_series, simulation_grid, AtomParams};

/// Time grid for the deterministic (noise-free) PDM equations. No spectral
/// sampling is involved, so only the dynamical rates set the step.
pub fn pdm_grid(
    env: &Envelope,
    params: &AtomParams,
    gamma: f64,
    max_abs_detuning: f64,
) -> TimeGrid {
    let tau = env.nominal_duration();
    let window = (env.center() + 5.0 * tau).max(10.0 / params.gamma2);
    let mut step = (1.0 / params.gamma2)
        .min(tau)
        .min(1.0 / (params.gamma21 + gamma));
    if max_abs_detuning > 0.0 {
        step = step.min(1.0 / max_abs_detuning);
    }
    step /= 20.0;
    TimeGrid { n: (window / step).ceil() as usize + 1, dt: step }
}

/// Deterministic phase-diffusion-model yield: the Fourier-limited pulse of
/// the same average intensity, propagated with `G21 -> G21 + gamma`.
pub fn pdm_yield(env: &Envelope, params: &AtomParams, gamma: f64) -> Result<f64> {
    if gamma < 0.0 {
        return Err(Error::Config {
            field: "gamma".into(),
            message: "bandwidth must be nonnegative".into(),
        });
    }
    let grid = pdm_grid(env, params, gamma, params.detuning.abs());
    let pulse = make_pulse(&NoiseTrajectory::constant(grid), env)?;
    let pdm_params = params.with_gamma21(params.gamma21 + gamma);
    Ok(propagate_yield(&pulse, &pdm_params)?.q2_infinity)
}

/// PDM lineshape over a detuning grid (no ensemble, stderrs are zero).
pub fn pdm_scan(
    env: &Envelope,
    params: &AtomParams,
    gamma: f64,
    detunings: &[f64],
) -> Result<LineshapeScan> {
    if detunings.is_empty() {
        return Err(Error::Config {
            field: "detunings".into(),
            message: "must be nonempty".into(),
        });
    }
    let max_abs = detunings.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let grid = pdm_grid(env, params, gamma, max_abs);
    let pulse = make_pulse(&NoiseTrajectory::constant(grid), env)?;
    let pdm_params = params.with_gamma21(params.gamma21 + gamma);
    let mut yields = Vec::with_capacity(detunings.len());
    let mut max_drift: f64 = 0.0;
    for &delta in detunings {
        let out = propagate_yield(&pulse, &pdm_params.with_detuning(delta))?;
        yields.push(out.q2_infinity);
        max_drift = max_drift.max(out.max_conservation_drift);
    }
    Ok(LineshapeScan {
        detunings: detunings.to_vec(),
        yields,
        stderrs: vec![0.0; detunings.len()],
        metadata: ScanMetadata {
            n_traj: 1,
            master_seed: 0,
            half_scan: detunings[0] >= 0.0,
            common_random_numbers: false,
            max_conservation_drift: max_drift,
            params: format!(
                "PDM gamma={} gamma2={} gamma21={} rabi_peak={}",
                gamma, params.gamma2, params.gamma21, params.rabi_peak
            ),
        },
    })
}

/// Options for the lambda estimators.
#[derive(Debug, Clone, Copy)]
pub struct LambdaOptions {
    /// Use the ensemble-estimated field correlator in the factorized side
    /// instead of the analytic `g1` (methodology comparison).
    pub use_empirical_g1: bool,
    /// Test hook: freeze the population difference at `n = -1`, which makes
    /// the factorization exact in expectation.
    pub frozen_population: bool,
    /// Subtract the frozen-population estimator per trajectory and add back
    /// its exact expectation (the grid autocorrelation). Removes most of the
    /// Monte Carlo noise floor in the weak-field regime without biasing the
    /// estimate.
    pub use_control_variate: bool,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        Self {
            use_empirical_g1: false,
            frozen_population: false,
            use_control_variate: true,
        }
    }
}

/// Monte Carlo and factorized atom-field correlation integrals at one time.
#[derive(Debug, Clone, Copy)]
pub struct LambdaEstimate {
    pub t: f64,
    pub rabi_peak: f64,
    pub lambda_full: Complex64,
    pub lambda_full_stderr: f64,
    pub lambda_decorrelated: Complex64,
    /// Conservative bound from the pointwise standard error of `<n>`.
    pub lambda_decorrelated_stderr: f64,
    pub rel_error_percent: f64,
}

struct LambdaAcc {
    lam_re: RunningScalar,
    lam_im: RunningScalar,
    n_mean: RunningSeries,
    row: Vec<Complex64>,
    err: Option<Error>,
}

impl Merge for LambdaAcc {
    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.row.iter_mut().zip(other.row) {
            *a += b;
        }
        Self {
            lam_re: self.lam_re.merge(other.lam_re),
            lam_im: self.lam_im.merge(other.lam_im),
            n_mean: self.n_mean.merge(other.n_mean),
            row: self.row,
            err: self.err.or(other.err),
        }
    }
}

/// Estimates `lambda(t_probe)` from an ensemble and compares it with the
/// decorrelated form built from `<n>` and the field autocorrelation.
pub fn estimate_lambda(
    env: &Envelope,
    psd: &PowerSpectralDensity,
    params: &AtomParams,
    t_probe: f64,
    n_traj: u64,
    master_seed: u64,
    options: LambdaOptions,
) -> Result<LambdaEstimate> {
    params.validate()?;
    let grid = simulation_grid(env, psd, params, params.detuning.abs())?;
    let tg = grid.time_grid();
    if t_probe < 0.0 || t_probe > tg.window() {
        return Err(Error::Config {
            field: "t_probe".into(),
            message: format!("outside the integration window [0, {:.4}]", tg.window()),
        });
    }
    let probe = tg.nearest_index(t_probe);
    let alpha = Complex64::new(-params.gamma21 / 2.0, params.detuning);
    let synth = NoiseSynthesizer::new(*psd, grid)?;
    // kernel e^{alpha (t_probe - t_j)} with trapezoid weights over [0, t_probe]
    let kernel: Vec<Complex64> = (0..=probe)
        .map(|j| {
            let w = if j == 0 || j == probe { 0.5 } else { 1.0 };
            w * tg.dt * (alpha * (tg.time(probe) - tg.time(j))).exp()
        })
        .collect();
    // exact expectation of the frozen-population (n = -1) estimator:
    // <conj(W)(tp) W(tj)> = rabi^2 sqrt(f_p f_j) conj(G(tp - tj)) on the grid
    let rabi_sq = params.rabi_peak * params.rabi_peak;
    let f_probe = env.eval(tg.time(probe)).sqrt();
    let grid_corr = crate::noise::grid_autocorrelation(psd, &grid);
    let lambda_frozen_exact: Complex64 = kernel
        .iter()
        .enumerate()
        .map(|(j, k)| {
            -k * rabi_sq
                * f_probe
                * env.eval(tg.time(j)).sqrt()
                * grid_corr[probe - j].conj()
        })
        .sum();

    let subtract_frozen = options.use_control_variate;
    let acc = chunked_map_reduce(
        n_traj,
        || LambdaAcc {
            lam_re: RunningScalar::new(),
            lam_im: RunningScalar::new(),
            n_mean: RunningSeries::new(probe + 1),
            row: vec![Complex64::default(); probe + 1],
            err: None,
        },
        |acc, i| {
            if acc.err.is_some() {
                return;
            }
            let run = make_pulse(&synth.generate(trajectory_seed(master_seed, i)), env)
                .and_then(|pulse| {
                    let omega = rabi_series(&pulse, params);
                    let traj = propagate_trajectory(&pulse, params)?;
                    Ok((omega, traj))
                });
            match run {
                Ok((omega, traj)) => {
                    let w_probe_conj = omega[probe].conj();
                    let mut inner = Complex64::default();
                    for (j, k) in kernel.iter().enumerate() {
                        let n_j = if options.frozen_population {
                            -1.0
                        } else {
                            traj.population_difference(j)
                        };
                        let base = if subtract_frozen { n_j + 1.0 } else { n_j };
                        inner += k * omega[j] * base;
                    }
                    let lam = w_probe_conj * inner;
                    acc.lam_re.push(lam.re);
                    acc.lam_im.push(lam.im);
                    acc.n_mean.push((0..=probe).map(|j| {
                        if options.frozen_population {
                            -1.0
                        } else {
                            traj.population_difference(j)
                        }
                    }));
                    for (r, w) in acc.row.iter_mut().zip(&omega[..=probe]) {
                        *r += w_probe_conj * w;
                    }
                }
                Err(e) => acc.err = Some(e),
            }
        },
    );
    if let Some(e) = acc.err {
        return Err(e);
    }
    let n = acc.lam_re.count();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, have: n as usize });
    }
    let mut lambda_full = Complex64::new(acc.lam_re.mean(), acc.lam_im.mean());
    if subtract_frozen {
        lambda_full += lambda_frozen_exact;
    }
    let lambda_full_stderr =
        (acc.lam_re.std_err().powi(2) + acc.lam_im.std_err().powi(2)).sqrt();

    let mut lambda_decorrelated = Complex64::default();
    let mut decorr_err_bound = 0.0;
    for (j, k) in kernel.iter().enumerate() {
        let corr = if options.use_empirical_g1 {
            acc.row[j] / n as f64
        } else {
            Complex64::from(
                rabi_sq * f_probe * env.eval(tg.time(j)).sqrt()
                    * psd.g1(tg.time(probe) - tg.time(j)),
            )
        };
        lambda_decorrelated += k * corr * acc.n_mean.mean()[j];
        decorr_err_bound += (k * corr).norm() * acc.n_mean.std_err_at(j);
    }
    if lambda_full.norm() < 1e-300 || lambda_full.norm().is_nan() {
        return Err(Error::BelowFloor(format!(
            "|lambda| = {:.3e} at t = {t_probe}",
            lambda_full.norm()
        )));
    }
    Ok(LambdaEstimate {
        t: tg.time(probe),
        rabi_peak: params.rabi_peak,
        lambda_full,
        lambda_full_stderr,
        lambda_decorrelated,
        lambda_decorrelated_stderr: decorr_err_bound,
        rel_error_percent: (lambda_full - lambda_decorrelated).norm() / lambda_full.norm()
            * 100.0,
    })
}

/// Decorrelation error for a sweep of peak Rabi frequencies, reusing one
/// pulse set (common random numbers) across the sweep.
pub fn decorrelation_error_curve(
    env: &Envelope,
    psd: &PowerSpectralDensity,
    params_base: &AtomParams,
    rabi_values: &[f64],
    n_traj: u64,
    master_seed: u64,
    options: LambdaOptions,
) -> Result<Vec<LambdaEstimate>> {
    if rabi_values.is_empty() || rabi_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config {
            field: "rabi_values".into(),
            message: "must be nonempty, positive, strictly increasing".into(),
        });
    }
    if rabi_values[0] <= 0.0 {
        return Err(Error::Config {
            field: "rabi_values".into(),
            message: "must be positive".into(),
        });
    }
    let t0 = env.center();
    rabi_values
        .iter()
        .map(|&rabi| {
            let params = params_base.with_rabi_peak(rabi);
            estimate_lambda(env, psd, &params, t0, n_traj, master_seed, options)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lineshape::{fwhm, ScanSymmetry};
    use crate::noise::PsdFamily;

    #[test]
    fn pdm_with_zero_gamma_is_fourier_limited() {
        let env = Envelope::gaussian(5.0).unwrap();
        let params = AtomParams::new(1.0).with_rabi_peak(0.05).with_detuning(0.5);
        let grid = pdm_grid(&env, &params, 0.0, 0.5);
        let pulse = make_pulse(&NoiseTrajectory::constant(grid), &env).unwrap();
        let direct = propagate_yield(&pulse, &params).unwrap().q2_infinity;
        let pdm = pdm_yield(&env, &params, 0.0).unwrap();
        assert!((pdm - direct).abs() < 1e-12, "{pdm} vs {direct}");
    }

    #[test]
    fn pdm_rejects_negative_gamma() {
        let env = Envelope::gaussian(5.0).unwrap();
        let params = AtomParams::new(1.0).with_rabi_peak(0.05);
        assert!(pdm_yield(&env, &params, -1.0).is_err());
    }

    #[test]
    fn pdm_fwhm_grows_linearly_with_gamma() {
        let env = Envelope::gaussian(3.0).unwrap();
        let params = AtomParams::new(1.0).with_rabi_peak(1e-2);
        let gammas = [1.0, 4.0, 7.0, 10.0, 13.0];
        let mut widths = Vec::new();
        for &g in &gammas {
            let w_pred = 1.0 + g;
            let detunings: Vec<f64> =
                (0..=24).map(|i| 1.2 * w_pred * i as f64 / 24.0).collect();
            let scan = pdm_scan(&env, &params, g, &detunings).unwrap();
            widths.push(scan.fwhm().unwrap().width);
        }
        // least-squares line through (gamma, width)
        let n = gammas.len() as f64;
        let sx: f64 = gammas.iter().sum();
        let sy: f64 = widths.iter().sum();
        let sxx: f64 = gammas.iter().map(|x| x * x).sum();
        let sxy: f64 = gammas.iter().zip(&widths).map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        for (&g, &w) in gammas.iter().zip(&widths) {
            let fit = slope * g + intercept;
            assert!(
                ((w - fit) / w).abs() < 0.02,
                "gamma {g}: width {w} vs linear fit {fit}"
            );
        }
        assert!((slope - 1.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn pdm_matches_exponentially_correlated_ensemble() {
        // light version of the lineshape comparison: a few detunings
        let env = Envelope::gaussian(3.0).unwrap();
        let params = AtomParams::new(1.0).with_rabi_peak(1e-2);
        let gamma = 3.33;
        let psd = PowerSpectralDensity::from_bandwidth(PsdFamily::Lorentzian, gamma).unwrap();
        let detunings = [0.0, 1.0, 2.0, 4.0];
        for &delta in &detunings {
            let stoch = crate::tls::ensemble_yield(
                &env,
                &psd,
                &params.with_detuning(delta),
                600,
                11,
            )
            .unwrap();
            let pdm = pdm_yield(&env, &params.with_detuning(delta), gamma).unwrap();
            assert!(
                (stoch.mean - pdm).abs() <= 2.5 * stoch.std_err,
                "delta {delta}: ensemble {} +- {} vs PDM {pdm}",
                stoch.mean,
                stoch.std_err
            );
        }
    }

    #[test]
    fn absorbed_bandwidth_identity() {
        // integrating the factorized kernel with the exponential g1 equals
        // shifting alpha by -gamma/2 (identical quadratures to rounding)
        let env = Envelope::gaussian(3.0).unwrap();
        let gamma: f64 = 4.0;
        let sigma = gamma / 2.0;
        let psd = PowerSpectralDensity::lorentzian(sigma).unwrap();
        let tg = TimeGrid { n: 2000, dt: 0.015 };
        let t_probe = env.center();
        let probe = tg.nearest_index(t_probe);
        let alpha = Complex64::new(-0.5, 1.3);
        let alpha_tilde = alpha - gamma / 2.0;
        let n_bar = |t: f64| -1.0 + 0.3 * (0.7 * t).sin(); // synthetic smooth <n>
        let mut with_g1 = Complex64::default();
        let mut with_shift = Complex64::default();
        for j in 0..=probe {
            let w = if j == 0 || j == probe { 0.5 } else { 1.0 };
            let dt = tg.time(probe) - tg.time(j);
            let envs = (env.eval(tg.time(probe)) * env.eval(tg.time(j))).sqrt();
            with_g1 += w * tg.dt * (alpha * dt).exp() * psd.g1(dt) * envs * n_bar(tg.time(j));
            with_shift += w * tg.dt * (alpha_tilde * dt).exp() * envs * n_bar(tg.time(j));
        }
        assert!(
            (with_g1 - with_shift).norm() <= 1e-8 * with_g1.norm(),
            "{with_g1} vs {with_shift}"
        );
    }

    #[test]
    fn frozen_population_makes_factorization_exact() {
        let env = Envelope::gaussian(3.0).unwrap();
        let psd = PowerSpectralDensity::from_bandwidth(PsdFamily::Lorentzian, 6.67).unwrap();
        let params = AtomParams::new(1.0).with_rabi_peak(0.05);
        let est = estimate_lambda(
            &env,
            &psd,
            &params,
            env.center(),
            2000,
            13,
            LambdaOptions { frozen_population: true, ..Default::default() },
        )
        .unwrap();
        // only Monte Carlo noise of the correlator remains
        let noise_pct = 100.0 * 3.0 * est.lambda_full_stderr / est.lambda_full.norm();
        assert!(
            est.rel_error_percent <= noise_pct.max(3.0),
            "error {}% vs noise scale {}%",
            est.rel_error_percent,
            noise_pct
        );
    }

    #[test]
    fn error_grows_with_rabi_and_shrinks_with_bandwidth() {
        let env = Envelope::gaussian(3.0).unwrap();
        let params = AtomParams::new(1.0);
        let wide = PowerSpectralDensity::from_bandwidth(PsdFamily::Lorentzian, 6.67).unwrap();
        let narrow = PowerSpectralDensity::from_bandwidth(PsdFamily::Lorentzian, 1.11).unwrap();
        let curve = decorrelation_error_curve(
            &env,
            &wide,
            &params,
            &[1e-3, 1.0],
            1500,
            17,
            LambdaOptions::default(),
        )
        .unwrap();
        assert_eq!(curve.len(), 2);
        assert!(curve.iter().all(|e| e.rel_error_percent >= 0.0));
        assert!(
            curve[0].rel_error_percent < curve[1].rel_error_percent,
            "weak {}% vs strong {}%",
            curve[0].rel_error_percent,
            curve[1].rel_error_percent
        );
        let mid = AtomParams::new(1.0).with_rabi_peak(0.3);
        let e_wide =
            estimate_lambda(&env, &wide, &mid, env.center(), 1500, 17, LambdaOptions::default())
                .unwrap();
        let e_narrow = estimate_lambda(
            &env,
            &narrow,
            &mid,
            env.center(),
            1500,
            17,
            LambdaOptions::default(),
        )
        .unwrap();
        assert!(
            e_narrow.rel_error_percent > e_wide.rel_error_percent,
            "narrow {}% vs wide {}%",
            e_narrow.rel_error_percent,
            e_wide.rel_error_percent
        );
    }

    #[test]
    fn both_families_supported_and_empirical_g1_close_to_analytic() {
        let env = Envelope::gaussian(3.0).unwrap();
        let params = AtomParams::new(1.0).with_rabi_peak(0.01);
        for family in [PsdFamily::Gaussian, PsdFamily::Lorentzian] {
            let psd = PowerSpectralDensity::from_bandwidth(family, 6.67).unwrap();
            let analytic = estimate_lambda(
                &env,
                &psd,
                &params,
                env.center(),
                800,
                23,
                LambdaOptions::default(),
            )
            .unwrap();
            let empirical = estimate_lambda(
                &env,
                &psd,
                &params,
                env.center(),
                800,
                23,
                LambdaOptions { use_empirical_g1: true, ..Default::default() },
            )
            .unwrap();
            assert!(analytic.rel_error_percent < 25.0);
            let diff = (analytic.lambda_decorrelated - empirical.lambda_decorrelated).norm()
                / analytic.lambda_decorrelated.norm();
            assert!(diff < 0.2, "{family:?}: empirical vs analytic g1 differ by {diff}");
        }
    }

    #[test]
    fn pdm_lineshape_vs_ensemble_fwhm_sanity() {
        // deterministic PDM scan covers the half maximum and extracts cleanly
        let env = Envelope::gaussian(3.0).unwrap();
        let params = AtomParams::new(1.0).with_rabi_peak(1e-2);
        let detunings: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let scan = pdm_scan(&env, &params, 3.33, &detunings).unwrap();
        let r = fwhm(&scan.detunings, &scan.yields, ScanSymmetry::HalfScan).unwrap();
        assert!((r.width - 4.33).abs() / 4.33 < 0.15, "width {}", r.width);
    }
}
