//! Experiment configuration, named reproductions, and data export.
//!
//! Every command writes CSV files with `#`-prefixed metadata headers (full
//! config, master seed, version) so each artifact carries its provenance.
//! Data payloads are deterministic for a fixed config and master seed,
//! independent of the worker count; only the timestamp header line varies
//! between runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decorr::{self, LambdaOptions};
use crate::ensemble::{chunked_map_reduce, trajectory_seed, Merge};
use crate::error::{Error, Result};
use crate::lineshape::{self, LineshapeScan, VoigtFit};
use crate::noise::{FrequencyGrid, NoiseSynthesizer, PowerSpectralDensity, PsdFamily};
use crate::pulse::{combined_bandwidth, make_pulse, Envelope};
use crate::stats::{DistModel, EnsembleAccumulator, StatsConfig};
use crate::tls::{detuning_scan, AtomParams};
use crate::units;

/// How the config's numbers are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UnitsMode {
    /// Rates in units of `gamma2`, times in `1/gamma2`.
    #[default]
    DimensionlessGamma2,
    /// Times in fs, angular frequencies in rad/fs; `gamma2` is the Kr
    /// 3d -> 5p linewidth. Detunings stay in units of `gamma2`.
    PhysicalKr,
}

/// Envelope selector for the flat config format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    #[default]
    Gaussian,
    FlatTop,
}

/// Flat experiment configuration (JSON, see `docs/config.schema.json`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub psd_family: PsdFamily,
    /// PSD width parameter; exactly one of `sigma_omega` / `bandwidth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_omega: Option<f64>,
    /// PSD FWHM; exactly one of `sigma_omega` / `bandwidth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(default)]
    pub envelope: EnvelopeKind,
    /// Gaussian pulse duration (or flat-top half total length).
    pub tau: f64,
    /// Envelope center; defaults to `5 tau`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse_center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fall: Option<f64>,
    #[serde(default = "one")]
    pub peak_intensity: f64,
    #[serde(default = "one")]
    pub gamma2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma21: Option<f64>,
    #[serde(default)]
    pub rabi_peak: f64,
    /// Detuning grid in units of `gamma2` (used by scan-style commands).
    #[serde(default)]
    pub detuning_min: f64,
    #[serde(default)]
    pub detuning_max: f64,
    #[serde(default)]
    pub detuning_step: f64,
    pub n_traj: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub units_mode: UnitsMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            psd_family: PsdFamily::Gaussian,
            sigma_omega: None,
            bandwidth: Some(1.0),
            envelope: EnvelopeKind::Gaussian,
            tau: 3.0,
            pulse_center: None,
            rise: None,
            flat: None,
            fall: None,
            peak_intensity: 1.0,
            gamma2: 1.0,
            gamma21: None,
            rabi_peak: 0.01,
            detuning_min: 0.0,
            detuning_max: 5.0,
            detuning_step: 0.25,
            n_traj: 500,
            master_seed: 1,
            units_mode: UnitsMode::DimensionlessGamma2,
            output_dir: None,
        }
    }
}

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

impl SimulationConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: SimulationConfig =
            serde_json::from_str(&text).map_err(|e| config_err("<file>", e.to_string()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.sigma_omega, self.bandwidth) {
            (None, None) => {
                return Err(config_err("sigma_omega", "one of sigma_omega/bandwidth required"))
            }
            (Some(_), Some(_)) => {
                return Err(config_err("bandwidth", "give only one of sigma_omega/bandwidth"))
            }
            (Some(s), None) if s.is_nan() || s <= 0.0 => {
                return Err(config_err("sigma_omega", "must be positive"))
            }
            (None, Some(b)) if b.is_nan() || b <= 0.0 => {
                return Err(config_err("bandwidth", "must be positive"))
            }
            _ => {}
        }
        if self.tau.is_nan() || self.tau <= 0.0 {
            return Err(config_err("tau", "must be positive"));
        }
        if self.envelope == EnvelopeKind::FlatTop
            && (self.rise.is_none() || self.flat.is_none() || self.fall.is_none())
        {
            return Err(config_err("rise", "flat_top envelope needs rise, flat, fall"));
        }
        if self.peak_intensity.is_nan() || self.peak_intensity <= 0.0 {
            return Err(config_err("peak_intensity", "must be positive"));
        }
        if self.gamma2.is_nan() || self.gamma2 <= 0.0 {
            return Err(config_err("gamma2", "must be positive"));
        }
        if self.units_mode == UnitsMode::PhysicalKr && self.gamma2 != 1.0 {
            return Err(config_err(
                "gamma2",
                "fixed to the Kr 3d->5p linewidth in physical mode; leave at 1.0",
            ));
        }
        if let Some(g21) = self.gamma21 {
            if g21 < self.gamma2 {
                return Err(config_err("gamma21", "must be >= gamma2"));
            }
        }
        if self.rabi_peak < 0.0 {
            return Err(config_err("rabi_peak", "must be nonnegative"));
        }
        if self.n_traj == 0 {
            return Err(config_err("n_traj", "must be at least 1"));
        }
        Ok(())
    }

    fn validate_scan_grid(&self) -> Result<()> {
        if self.detuning_step.is_nan() || self.detuning_step <= 0.0 || self.detuning_max < self.detuning_min {
            return Err(config_err(
                "detuning_step",
                "scan needs detuning_min <= detuning_max and detuning_step > 0",
            ));
        }
        Ok(())
    }

    /// Rewrites a physical-units config into dimensionless form (rates over
    /// `gamma2`, times times `gamma2`). Detunings are already dimensionless.
    pub fn convert_units(&self) -> SimulationConfig {
        match self.units_mode {
            UnitsMode::DimensionlessGamma2 => self.clone(),
            UnitsMode::PhysicalKr => {
                let g = units::KR_GAMMA2_RAD_PER_FS;
                let mut out = self.clone();
                out.sigma_omega = self.sigma_omega.map(|s| s / g);
                out.bandwidth = self.bandwidth.map(|b| b / g);
                out.tau = self.tau * g;
                out.pulse_center = self.pulse_center.map(|t| t * g);
                out.rise = self.rise.map(|t| t * g);
                out.flat = self.flat.map(|t| t * g);
                out.fall = self.fall.map(|t| t * g);
                out.rabi_peak = self.rabi_peak / g;
                out.gamma2 = 1.0;
                out.gamma21 = self.gamma21.map(|x| x / g);
                out.units_mode = UnitsMode::DimensionlessGamma2;
                out
            }
        }
    }

    pub fn psd(&self) -> Result<PowerSpectralDensity> {
        match (self.sigma_omega, self.bandwidth) {
            (Some(s), None) => PowerSpectralDensity::new(self.psd_family, s),
            (None, Some(b)) => PowerSpectralDensity::from_bandwidth(self.psd_family, b),
            _ => Err(config_err("sigma_omega", "one of sigma_omega/bandwidth required")),
        }
    }

    pub fn envelope(&self) -> Result<Envelope> {
        let env = match self.envelope {
            EnvelopeKind::Gaussian => match self.pulse_center {
                Some(t0) => Envelope::gaussian_at(self.tau, t0)?,
                None => Envelope::gaussian(self.tau)?,
            },
            EnvelopeKind::FlatTop => Envelope::flat_top(
                self.rise.ok_or_else(|| config_err("rise", "required for flat_top"))?,
                self.flat.ok_or_else(|| config_err("flat", "required for flat_top"))?,
                self.fall.ok_or_else(|| config_err("fall", "required for flat_top"))?,
            )?,
        };
        Ok(env.with_peak_intensity(self.peak_intensity))
    }

    pub fn atom_params(&self) -> AtomParams {
        AtomParams {
            gamma2: self.gamma2,
            gamma21: self.gamma21.unwrap_or(self.gamma2),
            rabi_peak: self.rabi_peak,
            detuning: 0.0,
        }
    }

    pub fn detunings(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut d = self.detuning_min;
        while d <= self.detuning_max + 1e-12 * self.detuning_step {
            out.push(d * self.gamma2);
            d += self.detuning_step;
        }
        out
    }
}

/// Files written by a command plus scalar results for inspection.
#[derive(Debug, Default)]
pub struct RunArtifacts {
    pub files: Vec<PathBuf>,
    pub summary: BTreeMap<String, f64>,
}

/// Output directory resolution: explicit config value, else `FELSIM_OUT`,
/// else `./felsim_out`.
pub fn output_dir(cfg: &SimulationConfig) -> PathBuf {
    cfg.output_dir
        .clone()
        .or_else(|| std::env::var_os("FELSIM_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("felsim_out"))
}

fn meta_lines(cfg: &SimulationConfig, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# felsim_version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        "# config = {}",
        serde_json::to_string(cfg).unwrap_or_else(|_| "{}".into())
    );
    let _ = writeln!(s, "# master_seed = {}", cfg.master_seed);
    for (k, v) in extra {
        let _ = writeln!(s, "# {k} = {v}");
    }
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let _ = writeln!(s, "# generated_at = {stamp}");
    s
}

fn write_csv(
    dir: &Path,
    name: &str,
    cfg: &SimulationConfig,
    extra: &[(&str, String)],
    columns: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut body = meta_lines(cfg, extra);
    let _ = writeln!(body, "{}", columns.join(","));
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(body, "{}", line.join(","));
    }
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(path)
}

fn scan_csv(
    dir: &Path,
    name: &str,
    cfg: &SimulationConfig,
    scan: &LineshapeScan,
    extra: &[(&str, String)],
) -> Result<PathBuf> {
    let mut meta = vec![("scan_params", scan.metadata.params.clone())];
    meta.extend(extra.iter().map(|(k, v)| (*k, v.clone())));
    write_csv(
        dir,
        name,
        cfg,
        &meta,
        &["detuning_over_gamma2", "mean_yield", "stderr"],
        scan
            .detunings
            .iter()
            .zip(&scan.yields)
            .zip(&scan.stderrs)
            .map(|((&d, &y), &s)| vec![d / cfg.gamma2.max(f64::MIN_POSITIVE), y, s]),
    )
}

struct StatsAcc {
    acc: EnsembleAccumulator,
    err: Option<Error>,
}

impl Merge for StatsAcc {
    fn merge(self, other: Self) -> Self {
        Self {
            acc: self.acc.merge(other.acc),
            err: self.err.or(other.err),
        }
    }
}

/// Runs the pulse ensemble and reduces all field statistics.
pub fn collect_field_stats(
    psd: &PowerSpectralDensity,
    env: &Envelope,
    grid: FrequencyGrid,
    stats_cfg: &StatsConfig,
    n_traj: u64,
    master_seed: u64,
) -> Result<EnsembleAccumulator> {
    let synth = NoiseSynthesizer::new(*psd, grid)?;
    // fail early on envelope/grid mismatches
    make_pulse(&synth.generate(trajectory_seed(master_seed, 0)), env)?;
    let out = chunked_map_reduce(
        n_traj,
        || StatsAcc {
            acc: EnsembleAccumulator::new(grid.time_grid(), stats_cfg.clone()),
            err: None,
        },
        |acc, i| {
            if acc.err.is_some() {
                return;
            }
            let run = make_pulse(&synth.generate(trajectory_seed(master_seed, i)), env)
                .and_then(|pulse| acc.acc.accumulate(&pulse, None));
            if let Err(e) = run {
                acc.err = Some(e);
            }
        },
    );
    match out.err {
        Some(e) => Err(e),
        None => Ok(out.acc),
    }
}

fn field_grid(psd: &PowerSpectralDensity, env: &Envelope) -> Result<FrequencyGrid> {
    let tau = env.nominal_duration();
    let window = (env.center() + 5.0 * tau).max(10.0 * tau);
    FrequencyGrid::sized_for(psd, window, tau / 20.0)
}

/// `gen-pulses`: sample pulse realizations plus the ensemble mean intensity.
pub fn run_gen_pulses(cfg: &SimulationConfig, n_dump: usize) -> Result<RunArtifacts> {
    cfg.validate()?;
    let dir = output_dir(cfg);
    let psd = cfg.psd()?;
    let env = cfg.envelope()?;
    let grid = field_grid(&psd, &env)?;
    let synth = NoiseSynthesizer::new(psd, grid)?;
    let mut artifacts = RunArtifacts::default();
    for k in 0..n_dump.max(1) {
        let pulse = make_pulse(&synth.generate(trajectory_seed(cfg.master_seed, k as u64)), &env)?;
        let path = write_csv(
            &dir,
            &format!("pulse_{k}.csv"),
            cfg,
            &[("trajectory", k.to_string())],
            &["t", "re_field", "im_field", "intensity"],
            pulse
                .grid
                .times()
                .zip(&pulse.field)
                .map(|(t, e)| vec![t, e.re, e.im, e.norm_sqr()]),
        )?;
        artifacts.files.push(path);
    }
    let acc = collect_field_stats(
        &psd,
        &env,
        grid,
        &StatsConfig { collect_spectrum: false, ..Default::default() },
        cfg.n_traj,
        cfg.master_seed,
    )?;
    let tg = grid.time_grid();
    let path = write_csv(
        &dir,
        "mean_intensity.csv",
        cfg,
        &[],
        &["t", "mean_intensity", "stderr", "envelope"],
        (0..tg.n).map(|j| {
            vec![
                tg.time(j),
                acc.mean_intensity()[j],
                acc.mean_intensity_std_err(j),
                env.peak_intensity * env.eval(tg.time(j)),
            ]
        }),
    )?;
    artifacts.files.push(path);
    artifacts.summary.insert("n_traj".into(), cfg.n_traj as f64);
    Ok(artifacts)
}

fn histogram_rows(fit: &crate::stats::DistributionFit) -> Vec<Vec<f64>> {
    let density = fit.histogram.density();
    fit.histogram
        .edges
        .windows(2)
        .zip(density)
        .map(|(e, d)| {
            let center = 0.5 * (e[0] + e[1]);
            vec![center, d, fit.model.pdf(center)]
        })
        .collect()
}

/// `field-stats`: coherence, histograms with fitted overlays, and spectrum.
pub fn run_field_stats(cfg: &SimulationConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    let dir = output_dir(cfg);
    let psd = cfg.psd()?;
    let env = cfg.envelope()?;
    let grid = field_grid(&psd, &env)?;
    let probe = env.center() + env.nominal_duration() / 2.0;
    let acc = collect_field_stats(
        &psd,
        &env,
        grid,
        &StatsConfig { probe_times: vec![probe], ..Default::default() },
        cfg.n_traj,
        cfg.master_seed,
    )?;
    let mut artifacts = RunArtifacts::default();
    let mass = ("captured_mass", format!("{:.6}", grid.captured_mass(&psd)));
    let tg = grid.time_grid();
    artifacts.files.push(write_csv(
        &dir,
        "mean_intensity.csv",
        cfg,
        std::slice::from_ref(&mass),
        &["t", "mean_intensity", "stderr"],
        (0..tg.n).map(|j| vec![tg.time(j), acc.mean_intensity()[j], acc.mean_intensity_std_err(j)]),
    )?);
    let lags = acc.g1_vs_lag()?;
    artifacts.files.push(write_csv(
        &dir,
        "g1_vs_lag.csv",
        cfg,
        &[],
        &["lag", "abs_g1", "analytic_g1"],
        lags.iter().map(|&(dt, g)| vec![dt, g, psd.g1(dt)]),
    )?);
    let int_fit = acc.fit_intensity_distribution(0)?;
    artifacts.files.push(write_csv(
        &dir,
        "intensity_hist.csv",
        cfg,
        &[
            ("probe_time", format!("{probe}")),
            ("chi2_per_dof", format!("{}", int_fit.chi2_per_dof)),
            ("fit_ok", format!("{}", int_fit.fit_ok)),
        ],
        &["normalized_intensity", "density", "exponential_pdf"],
        histogram_rows(&int_fit).into_iter(),
    )?);
    artifacts
        .summary
        .insert("intensity_chi2_per_dof".into(), int_fit.chi2_per_dof);
    let en_fit = acc.fit_energy_distribution()?;
    let m = match en_fit.model {
        DistModel::Gamma { shape } => shape,
        DistModel::NegativeExponential => 1.0,
    };
    artifacts.files.push(write_csv(
        &dir,
        "energy_hist.csv",
        cfg,
        &[
            ("gamma_shape_m", format!("{m}")),
            ("chi2_per_dof", format!("{}", en_fit.chi2_per_dof)),
            ("fit_ok", format!("{}", en_fit.fit_ok)),
        ],
        &["normalized_energy", "density", "gamma_pdf"],
        histogram_rows(&en_fit).into_iter(),
    )?);
    artifacts.summary.insert("energy_chi2_per_dof".into(), en_fit.chi2_per_dof);
    artifacts.summary.insert("energy_gamma_m".into(), m);
    let spec = acc.energy_spectral_density()?;
    let fwhm = spec.fwhm()?;
    artifacts.files.push(write_csv(
        &dir,
        "spectrum.csv",
        cfg,
        &[("spectrum_fwhm", format!("{fwhm}")), mass],
        &["omega", "normalized_spectral_density"],
        spec.omegas.iter().zip(&spec.values).map(|(&w, &v)| vec![w, v]),
    )?);
    artifacts.summary.insert("spectrum_fwhm".into(), fwhm);
    artifacts.summary.insert(
        "combined_bandwidth".into(),
        combined_bandwidth(env.nominal_duration(), psd.bandwidth()),
    );
    Ok(artifacts)
}

/// `scan`: ensemble lineshape over the configured detuning grid, with FWHM
/// and a Voigt fit.
pub fn run_scan(cfg: &SimulationConfig) -> Result<RunArtifacts> {
    run_scan_with_dumps(cfg, 0)
}

/// `scan` with the first `dump_trajectories` per-pulse solutions written out
/// (at the first detuning) for debugging.
pub fn run_scan_with_dumps(cfg: &SimulationConfig, dump_trajectories: usize) -> Result<RunArtifacts> {
    cfg.validate()?;
    cfg.validate_scan_grid()?;
    let cfg_dim = cfg.convert_units();
    let dir = output_dir(cfg);
    let psd = cfg_dim.psd()?;
    let env = cfg_dim.envelope()?;
    let params = cfg_dim.atom_params();
    let detunings = cfg_dim.detunings();
    let mut dump_files = Vec::new();
    if dump_trajectories > 0 {
        let grid = crate::tls::simulation_grid(
            &env,
            &psd,
            &params,
            detunings.iter().fold(0.0f64, |m, d| m.max(d.abs())),
        )?;
        let synth = NoiseSynthesizer::new(psd, grid)?;
        let p = params.with_detuning(detunings[0]);
        for k in 0..dump_trajectories {
            let pulse =
                make_pulse(&synth.generate(trajectory_seed(cfg_dim.master_seed, k as u64)), &env)?;
            let traj = crate::tls::propagate_trajectory(&pulse, &p)?;
            dump_files.push(write_csv(
                &dir,
                &format!("trajectory_{k}.csv"),
                cfg,
                &[("detuning", format!("{}", detunings[0]))],
                &["t", "sigma11", "sigma22", "re_sigma12", "im_sigma12", "q2"],
                (0..traj.grid.n).map(|j| {
                    vec![
                        traj.grid.time(j),
                        traj.sigma11[j],
                        traj.sigma22[j],
                        traj.sigma12[j].re,
                        traj.sigma12[j].im,
                        traj.q2[j],
                    ]
                }),
            )?);
        }
    }
    let scan = detuning_scan(&env, &psd, &params, &detunings, cfg_dim.n_traj, cfg_dim.master_seed)?;
    let mut artifacts = RunArtifacts::default();
    let mut extra = Vec::new();
    let fwhm = scan.fwhm().map(|r| r.width).unwrap_or(f64::NAN);
    extra.push(("scan_fwhm", format!("{fwhm}")));
    artifacts.files.push(scan_csv(&dir, "scan.csv", cfg, &scan, &extra)?);
    artifacts.summary.insert("scan_fwhm".into(), fwhm);
    if let Ok(fit) = lineshape::fit_voigt(&scan, params.gamma2) {
        artifacts.files.push(write_fit_report(&dir, "voigt_fit.json", &fit)?);
        artifacts.summary.insert("voigt_fit_gamma_voigt".into(), fit.gamma_voigt);
    }
    artifacts
        .summary
        .insert("max_conservation_drift".into(), scan.metadata.max_conservation_drift);
    artifacts.files.extend(dump_files);
    Ok(artifacts)
}

/// `pdm-scan`: deterministic phase-diffusion-model lineshape.
pub fn run_pdm_scan(cfg: &SimulationConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    cfg.validate_scan_grid()?;
    let cfg_dim = cfg.convert_units();
    let dir = output_dir(cfg);
    let env = cfg_dim.envelope()?;
    let params = cfg_dim.atom_params();
    let gamma = cfg_dim.psd()?.bandwidth();
    let detunings = cfg_dim.detunings();
    let scan = decorr::pdm_scan(&env, &params, gamma, &detunings)?;
    let fwhm = scan.fwhm().map(|r| r.width).unwrap_or(f64::NAN);
    let mut artifacts = RunArtifacts::default();
    artifacts.files.push(scan_csv(
        &dir,
        "pdm_scan.csv",
        cfg,
        &scan,
        &[("scan_fwhm", format!("{fwhm}"))],
    )?);
    artifacts.summary.insert("pdm_fwhm".into(), fwhm);
    Ok(artifacts)
}

/// `decorr-error`: relative decorrelation error vs peak Rabi frequency for
/// both PSD families at the configured bandwidth.
pub fn run_decorr_error(cfg: &SimulationConfig, rabi_values: &[f64]) -> Result<RunArtifacts> {
    cfg.validate()?;
    let cfg_dim = cfg.convert_units();
    let dir = output_dir(cfg);
    let env = cfg_dim.envelope()?;
    let params = cfg_dim.atom_params();
    let gamma = cfg_dim.psd()?.bandwidth();
    let mut artifacts = RunArtifacts::default();
    for family in [PsdFamily::Lorentzian, PsdFamily::Gaussian] {
        let psd = PowerSpectralDensity::from_bandwidth(family, gamma)?;
        let curve = decorr::decorrelation_error_curve(
            &env,
            &psd,
            &params,
            rabi_values,
            cfg_dim.n_traj,
            cfg_dim.master_seed,
            LambdaOptions::default(),
        )?;
        let name = match family {
            PsdFamily::Lorentzian => "decorr_error_exponential.csv",
            PsdFamily::Gaussian => "decorr_error_gaussian.csv",
        };
        artifacts.files.push(write_csv(
            &dir,
            name,
            cfg,
            &[("bandwidth_gamma", format!("{gamma}"))],
            &[
                "rabi_over_gamma2",
                "error_percent",
                "abs_lambda_full",
                "lambda_full_stderr",
                "abs_lambda_decorrelated",
            ],
            curve.iter().map(|e| {
                vec![
                    e.rabi_peak / cfg_dim.gamma2,
                    e.rel_error_percent,
                    e.lambda_full.norm(),
                    e.lambda_full_stderr,
                    e.lambda_decorrelated.norm(),
                ]
            }),
        )?);
        for e in &curve {
            artifacts.summary.insert(
                format!("error_pct_{:?}_rabi_{}", family, e.rabi_peak),
                e.rel_error_percent,
            );
        }
    }
    Ok(artifacts)
}

/// Detuning grid reaching past the half maximum of an expected width.
pub fn detuning_grid_for_width(expected_width: f64, points: usize) -> Vec<f64> {
    let n = points.max(8);
    let hi = 0.85 * expected_width;
    (0..=n).map(|i| hi * i as f64 / n as f64).collect()
}

/// One FWHM comparison point of the `fwhm-curve` command.
#[derive(Debug, Clone, Copy)]
pub struct FwhmPoint {
    pub tau: f64,
    pub gamma: f64,
    pub combined: f64,
    pub fwhm_pdm: f64,
    pub fwhm_gaussian_noise: f64,
    pub voigt: f64,
}

/// FWHM of the PDM and Gaussian-noise lineshapes across bandwidths and pulse
/// durations (the Voigt-law comparison).
pub fn fwhm_curve(
    cfg: &SimulationConfig,
    taus: &[f64],
    gammas: &[f64],
) -> Result<Vec<FwhmPoint>> {
    let cfg_dim = cfg.convert_units();
    let params = cfg_dim.atom_params();
    let mut out = Vec::new();
    for &tau in taus {
        let env = Envelope::gaussian(tau)?.with_peak_intensity(cfg_dim.peak_intensity);
        for &gamma in gammas {
            let dw = combined_bandwidth(tau, gamma);
            let expect = lineshape::voigt_width(params.gamma2, dw);
            let detunings = detuning_grid_for_width(expect, 16);
            let pdm = decorr::pdm_scan(&env, &params, gamma, &detunings)?;
            let fwhm_pdm = lineshape::fwhm(
                &pdm.detunings,
                &pdm.yields,
                lineshape::ScanSymmetry::HalfScan,
            );
            let fwhm_pdm = match fwhm_pdm {
                Ok(r) => r.width,
                Err(_) => {
                    // PDM lineshapes are wider; rescan with a wider grid
                    let wide = detuning_grid_for_width(params.gamma2 + gamma + expect, 20);
                    decorr::pdm_scan(&env, &params, gamma, &wide)?.fwhm()?.width
                }
            };
            let psd = PowerSpectralDensity::from_bandwidth(PsdFamily::Gaussian, gamma)?;
            let scan = detuning_scan(
                &env,
                &psd,
                &params,
                &detunings,
                cfg_dim.n_traj,
                cfg_dim.master_seed,
            )?;
            out.push(FwhmPoint {
                tau,
                gamma,
                combined: dw,
                fwhm_pdm,
                fwhm_gaussian_noise: scan.fwhm()?.width,
                voigt: expect,
            });
        }
    }
    Ok(out)
}

/// `fwhm-curve`: writes the FWHM-vs-bandwidth table for both models.
pub fn run_fwhm_curve(cfg: &SimulationConfig, taus: &[f64], gammas: &[f64]) -> Result<RunArtifacts> {
    cfg.validate()?;
    let dir = output_dir(cfg);
    let points = fwhm_curve(cfg, taus, gammas)?;
    let mut artifacts = RunArtifacts::default();
    artifacts.files.push(write_csv(
        &dir,
        "fwhm_curve.csv",
        cfg,
        &[],
        &[
            "tau",
            "gamma",
            "combined_bandwidth",
            "fwhm_pdm",
            "fwhm_gaussian_noise",
            "voigt_width",
        ],
        points.iter().map(|p| {
            vec![p.tau, p.gamma, p.combined, p.fwhm_pdm, p.fwhm_gaussian_noise, p.voigt]
        }),
    )?);
    for p in &points {
        artifacts.summary.insert(
            format!("fwhm_noise_tau{}_gamma{}", p.tau, p.gamma),
            p.fwhm_gaussian_noise,
        );
    }
    Ok(artifacts)
}

fn write_fit_report(dir: &Path, name: &str, fit: &VoigtFit) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(fit)?)?;
    Ok(path)
}

/// Named figure reproductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig3,
    Fig4,
    Decor,
    Line1,
    Line2,
    Fw,
    Exp,
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Self::Fig1),
            "fig3" => Ok(Self::Fig3),
            "fig4" => Ok(Self::Fig4),
            "decor" => Ok(Self::Decor),
            "line1" => Ok(Self::Line1),
            "line2" => Ok(Self::Line2),
            "fw" => Ok(Self::Fw),
            "exp" => Ok(Self::Exp),
            other => Err(config_err(
                "figure",
                format!("unknown figure `{other}` (expected fig1, fig3, fig4, decor, line1, line2, fw, exp)"),
            )),
        }
    }
}

/// Preset configuration for a figure reproduction.
pub fn preset(figure: FigureId) -> SimulationConfig {
    let base = SimulationConfig::default();
    match figure {
        // Gaussian-correlated noise, sigma = 0.14 rad/fs, tau = 10 fs,
        // 1000 pulses (physical fs units; no atom involved)
        FigureId::Fig1 => SimulationConfig {
            psd_family: PsdFamily::Gaussian,
            sigma_omega: Some(0.14),
            bandwidth: None,
            tau: 10.0,
            n_traj: 1000,
            master_seed: 101,
            units_mode: UnitsMode::PhysicalKr,
            ..base
        },
        // intensity/energy distributions: tau = 10 fs, sigma = 0.25 rad/fs,
        // 1000 trajectories
        FigureId::Fig3 => SimulationConfig {
            psd_family: PsdFamily::Gaussian,
            sigma_omega: Some(0.25),
            bandwidth: None,
            tau: 10.0,
            n_traj: 1000,
            master_seed: 103,
            units_mode: UnitsMode::PhysicalKr,
            ..base
        },
        // |g1| convergence: same field parameters as fig3
        FigureId::Fig4 => SimulationConfig {
            psd_family: PsdFamily::Gaussian,
            sigma_omega: Some(0.25),
            bandwidth: None,
            tau: 10.0,
            n_traj: 1000,
            master_seed: 104,
            units_mode: UnitsMode::PhysicalKr,
            ..base
        },
        // decorrelation errors: Gamma2 tau = 3, 5000 pulses, on resonance
        FigureId::Decor => SimulationConfig {
            bandwidth: Some(6.67),
            tau: 3.0,
            n_traj: 5000,
            master_seed: 105,
            rabi_peak: 0.01,
            ..base
        },
        // exponential correlations vs PDM: Gamma2 tau = 3, 2000 pulses
        FigureId::Line1 => SimulationConfig {
            psd_family: PsdFamily::Lorentzian,
            bandwidth: Some(3.33),
            tau: 3.0,
            n_traj: 2000,
            master_seed: 106,
            rabi_peak: 0.01,
            detuning_min: 0.0,
            detuning_max: 10.0,
            detuning_step: 0.5,
            ..base
        },
        // Gaussian correlations vs PDM
        FigureId::Line2 => SimulationConfig {
            psd_family: PsdFamily::Gaussian,
            bandwidth: Some(3.92),
            tau: 3.0,
            n_traj: 2000,
            master_seed: 107,
            rabi_peak: 0.01,
            detuning_min: 0.0,
            detuning_max: 10.0,
            detuning_step: 0.5,
            ..base
        },
        // FWHM vs bandwidth: weak field, 2000 pulses
        FigureId::Fw => SimulationConfig {
            psd_family: PsdFamily::Gaussian,
            bandwidth: Some(1.0),
            tau: 3.0,
            n_traj: 2000,
            master_seed: 108,
            rabi_peak: 0.01,
            ..base
        },
        // Kr experiment: gamma = 0.72 Gamma2, Gamma2 tau = 20, rabi 1e-2,
        // 2000 pulses
        FigureId::Exp => SimulationConfig {
            psd_family: PsdFamily::Gaussian,
            bandwidth: Some(0.72),
            tau: 20.0,
            n_traj: 2000,
            master_seed: 109,
            rabi_peak: 0.01,
            detuning_min: 0.0,
            detuning_max: 1.2,
            detuning_step: 0.05,
            ..base
        },
    }
}

/// Bandwidth sets of the lineshape panel figures.
pub fn line1_gammas() -> Vec<f64> {
    vec![13.33, 6.67, 3.33, 1.67, 1.11, 0.83]
}

pub fn line2_gammas() -> Vec<f64> {
    vec![15.70, 7.85, 3.92, 1.96, 1.31, 0.98]
}

/// `reproduce <figure>`: runs a named preset. `overrides` is applied on top
/// of the preset (sample sizes can be reduced for quick runs).
pub fn run_reproduce(
    figure: FigureId,
    overrides: impl FnOnce(&mut SimulationConfig),
) -> Result<RunArtifacts> {
    let mut cfg = preset(figure);
    overrides(&mut cfg);
    cfg.validate()?;
    match figure {
        FigureId::Fig1 => {
            // panel (a,b): Gaussian envelope; (c,d): flat-top
            let mut artifacts = run_gen_pulses(&cfg, 2)?;
            let mut flat = cfg.clone();
            flat.envelope = EnvelopeKind::FlatTop;
            flat.rise = Some(5.0);
            flat.flat = Some(15.0);
            flat.fall = Some(5.0);
            flat.output_dir = Some(output_dir(&cfg).join("flat_top"));
            let more = run_gen_pulses(&flat, 2)?;
            artifacts.files.extend(more.files);
            Ok(artifacts)
        }
        FigureId::Fig3 => run_field_stats(&cfg),
        FigureId::Fig4 => {
            // convergence of |g1| with the ensemble size
            let dir = output_dir(&cfg);
            let psd = cfg.psd()?;
            let env = cfg.envelope()?;
            let grid = field_grid(&psd, &env)?;
            let stats_cfg = StatsConfig { collect_spectrum: false, ..Default::default() };
            let mut artifacts = RunArtifacts::default();
            let mut columns: Vec<(u64, Vec<(f64, f64)>)> = Vec::new();
            for n in [30u64, cfg.n_traj] {
                let acc =
                    collect_field_stats(&psd, &env, grid, &stats_cfg, n, cfg.master_seed)?;
                columns.push((n, acc.g1_vs_lag()?));
            }
            let (n_small, small) = &columns[0];
            let (n_big, big) = &columns[1];
            let rows: Vec<Vec<f64>> = small
                .iter()
                .zip(big)
                .map(|(&(dt, g_s), &(_, g_b))| vec![dt, g_s, g_b, psd.g1(dt)])
                .collect();
            let small_name = format!("abs_g1_n{n_small}");
            let big_name = format!("abs_g1_n{n_big}");
            artifacts.files.push(write_csv(
                &dir,
                "g1_convergence.csv",
                &cfg,
                &[],
                &["lag", &small_name, &big_name, "analytic_g1"],
                rows.into_iter(),
            )?);
            let max_dev = big
                .iter()
                .filter(|(dt, _)| *dt <= 8.0)
                .map(|&(dt, g)| (g - psd.g1(dt)).abs())
                .fold(0.0f64, f64::max);
            artifacts.summary.insert("g1_max_abs_dev".into(), max_dev);
            Ok(artifacts)
        }
        FigureId::Decor => {
            let rabi = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 0.3, 1.0];
            let mut artifacts = RunArtifacts::default();
            for gamma in [6.67, 3.33, 1.67, 1.11] {
                let mut panel = cfg.clone();
                panel.bandwidth = Some(gamma);
                panel.output_dir = Some(output_dir(&cfg).join(format!("gamma_{gamma}")));
                let got = run_decorr_error(&panel, &rabi)?;
                artifacts.files.extend(got.files);
                artifacts.summary.extend(got.summary);
            }
            Ok(artifacts)
        }
        FigureId::Line1 | FigureId::Line2 => {
            let gammas = if figure == FigureId::Line1 { line1_gammas() } else { line2_gammas() };
            let mut artifacts = RunArtifacts::default();
            // panels plot three driving strengths; artifact defaults
            for rabi in [0.01, 0.1, 1.0] {
                for &gamma in &gammas {
                    let mut panel = cfg.clone();
                    panel.rabi_peak = rabi;
                    panel.bandwidth = Some(gamma);
                    panel.detuning_max = (1.2 * (cfg.gamma2 + gamma)).max(5.0);
                    panel.detuning_step = panel.detuning_max / 20.0;
                    panel.output_dir =
                        Some(output_dir(&cfg).join(format!("rabi_{rabi}_gamma_{gamma}")));
                    let stoch = run_scan(&panel)?;
                    artifacts.files.extend(stoch.files);
                    let pdm = run_pdm_scan(&panel)?;
                    artifacts.files.extend(pdm.files);
                }
            }
            Ok(artifacts)
        }
        FigureId::Fw => {
            let taus = [3.0, 20.0];
            let gammas = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
            run_fwhm_curve(&cfg, &taus, &gammas)
        }
        FigureId::Exp => {
            let got = run_scan(&cfg)?;
            Ok(got)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "felsim_test_{tag}_{}",
            std::process::id()
        ));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn config_validation_messages() {
        let mut cfg = SimulationConfig::default();
        cfg.validate().unwrap();
        cfg.bandwidth = None;
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "sigma_omega"));
        cfg.bandwidth = Some(1.0);
        cfg.sigma_omega = Some(1.0);
        assert!(cfg.validate().is_err());
        cfg.sigma_omega = None;
        cfg.tau = -1.0;
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "tau"));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = preset(FigureId::Exp);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: SimulationConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.bandwidth, cfg.bandwidth);
        assert_eq!(back.n_traj, cfg.n_traj);
        // unknown fields are rejected
        let bad = r#"{"psd_family":"gaussian","tau":1.0,"n_traj":1,"master_seed":1,"bandwith":2.0}"#;
        assert!(serde_json::from_str::<SimulationConfig>(bad).is_err());
    }

    #[test]
    fn unit_conversion_examples() {
        let mut cfg = preset(FigureId::Fig3);
        cfg.rabi_peak = units::KR_GAMMA2_RAD_PER_FS; // one Gamma2, in rad/fs
        let dim = cfg.convert_units();
        assert!((dim.rabi_peak - 1.0).abs() < 1e-12);
        assert!((dim.sigma_omega.unwrap() - 1.98).abs() < 0.01);
        assert!((dim.tau - 1.261).abs() < 0.001);
        assert_eq!(dim.units_mode, UnitsMode::DimensionlessGamma2);
    }

    #[test]
    fn presets_match_reported_parameters() {
        let fig3 = preset(FigureId::Fig3);
        assert_eq!(fig3.sigma_omega, Some(0.25));
        assert_eq!(fig3.tau, 10.0);
        assert_eq!(fig3.n_traj, 1000);
        let exp = preset(FigureId::Exp);
        assert_eq!(exp.bandwidth, Some(0.72));
        assert_eq!(exp.tau, 20.0);
        assert_eq!(exp.rabi_peak, 0.01);
        assert_eq!(exp.n_traj, 2000);
        let decor = preset(FigureId::Decor);
        assert_eq!(decor.tau, 3.0);
        assert_eq!(decor.n_traj, 5000);
        let line1 = preset(FigureId::Line1);
        assert_eq!(line1.tau, 3.0);
        assert_eq!(line1.n_traj, 2000);
        assert_eq!(line1_gammas(), vec![13.33, 6.67, 3.33, 1.67, 1.11, 0.83]);
        assert_eq!(line2_gammas(), vec![15.70, 7.85, 3.92, 1.96, 1.31, 0.98]);
        assert!("nothing".parse::<FigureId>().is_err());
        assert_eq!("exp".parse::<FigureId>().unwrap(), FigureId::Exp);
    }

    #[test]
    fn gen_pulses_writes_artifacts() {
        let dir = temp_dir("gen");
        let mut cfg = preset(FigureId::Fig1);
        cfg.n_traj = 50;
        cfg.output_dir = Some(dir.clone());
        let artifacts = run_gen_pulses(&cfg, 2).unwrap();
        assert_eq!(artifacts.files.len(), 3);
        for f in &artifacts.files {
            let body = fs::read_to_string(f).unwrap();
            assert!(body.starts_with("# felsim_version"));
            assert!(body.contains("# master_seed = 101"));
        }
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn scan_and_pdm_commands_run() {
        let dir = temp_dir("scan");
        let mut cfg = SimulationConfig {
            psd_family: PsdFamily::Lorentzian,
            bandwidth: Some(3.33),
            sigma_omega: None,
            tau: 3.0,
            rabi_peak: 0.01,
            detuning_min: 0.0,
            detuning_max: 6.0,
            detuning_step: 0.5,
            n_traj: 60,
            master_seed: 2,
            output_dir: Some(dir.clone()),
            ..SimulationConfig::default()
        };
        let scan = run_scan(&cfg).unwrap();
        assert!(scan.summary.contains_key("scan_fwhm"));
        assert!(scan.summary["max_conservation_drift"] <= 1e-8);
        cfg.master_seed = 3;
        let pdm = run_pdm_scan(&cfg).unwrap();
        assert!(pdm.summary["pdm_fwhm"] > 0.0);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn reproduce_presets_write_artifacts() {
        let dir = temp_dir("rep3");
        let art = run_reproduce(FigureId::Fig3, |cfg| {
            cfg.n_traj = 600; // fits need >= 500 samples
            cfg.output_dir = Some(dir.clone());
        })
        .unwrap();
        for name in ["intensity_hist.csv", "energy_hist.csv", "spectrum.csv"] {
            assert!(art.files.iter().any(|f| f.ends_with(name)), "missing {name}");
        }
        assert!(art.summary["intensity_chi2_per_dof"].is_finite());
        let _ = fs::remove_dir_all(&dir);

        let dir = temp_dir("rep4");
        let art = run_reproduce(FigureId::Fig4, |cfg| {
            cfg.n_traj = 200;
            cfg.output_dir = Some(dir.clone());
        })
        .unwrap();
        assert!(art.files.iter().any(|f| f.ends_with("g1_convergence.csv")));
        assert!(art.summary["g1_max_abs_dev"] < 0.1);
        let _ = fs::remove_dir_all(&dir);

        let dir = temp_dir("rep1");
        let art = run_reproduce(FigureId::Fig1, |cfg| {
            cfg.n_traj = 60;
            cfg.output_dir = Some(dir.clone());
        })
        .unwrap();
        // Gaussian panel plus the flat-top stand-in
        assert!(art.files.iter().any(|f| f.to_string_lossy().contains("flat_top")));
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn same_config_runs_are_byte_identical_modulo_timestamp() {
        let strip = |p: &Path| -> String {
            fs::read_to_string(p)
                .unwrap()
                .lines()
                .filter(|l| !l.starts_with("# generated_at"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let dir_a = temp_dir("det_a");
        let dir_b = temp_dir("det_b");
        let mut cfg = SimulationConfig {
            detuning_max: 3.0,
            detuning_step: 0.5,
            n_traj: 40,
            ..SimulationConfig::default()
        };
        cfg.output_dir = Some(dir_a.clone());
        let a = run_scan(&cfg).unwrap();
        cfg.output_dir = Some(dir_b.clone());
        let b = run_scan(&cfg).unwrap();
        // config differs in output_dir only; compare payloads after the config line
        let trim = |s: String| -> String {
            s.lines()
                .filter(|l| !l.starts_with("# config"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(
            trim(strip(&a.files[0])),
            trim(strip(&b.files[0]))
        );
        let _ = fs::remove_dir_all(&dir_a);
        let _ = fs::remove_dir_all(&dir_b);
    }
}
