//! Ensemble estimators for chaotic-light statistics: mean intensity,
//! two-time coherence, intensity/energy distributions, and the energy
//! spectral density.
//!
//! Accumulators update in one pass per trajectory with Welford-style moment
//! updates, and merge associatively so ensembles can be reduced over a fixed
//! chunk tree (see [`crate::ensemble`]).

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::ensemble::{Merge, RunningScalar, RunningSeries};
use crate::error::{Error, Result};
use crate::lineshape::{self, ScanSymmetry};
use crate::noise::TimeGrid;
use crate::pulse::{pulse_energy, PulseRealization};
use crate::tls::TlsTrajectory;

/// Mean intensities below this fraction of the peak mean intensity are
/// treated as outside the pulse; normalized quantities there are undefined.
const INTENSITY_FLOOR: f64 = 1e-12;

/// What the accumulator collects, fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsConfig {
    /// Times at which instantaneous-intensity samples are kept.
    pub probe_times: Vec<f64>,
    /// Anchor-point budget for the two-time correlator (grid is decimated).
    pub g1_max_anchors: usize,
    /// Optional full-resolution correlator row `<E(t_row) E*(t_j)>`.
    pub g1_fixed_row: Option<f64>,
    pub collect_spectrum: bool,
    /// Per-probe and energy sample caps (first-come, deterministic).
    pub sample_cap: usize,
}

impl Default for StatsConfig {
    fn default() -> Self {
        Self {
            probe_times: Vec::new(),
            g1_max_anchors: 128,
            g1_fixed_row: None,
            collect_spectrum: true,
            sample_cap: 1 << 20,
        }
    }
}

/// Streaming ensemble statistics over pulse realizations.
pub struct EnsembleAccumulator {
    grid: TimeGrid,
    cfg: StatsConfig,
    probe_indices: Vec<usize>,
    anchor_indices: Vec<usize>,
    n_traj: u64,
    mean_intensity: RunningSeries,
    g1_sum: Vec<Complex64>,
    row_sum: Option<(usize, Vec<Complex64>)>,
    intensity_samples: Vec<Vec<f64>>,
    energy_samples: Vec<f64>,
    spectrum_sum: Option<RunningSeries>,
    yield_stats: RunningScalar,
    fft: Option<Arc<dyn Fft<f64>>>,
}

impl EnsembleAccumulator {
    pub fn new(grid: TimeGrid, cfg: StatsConfig) -> Self {
        let probe_indices: Vec<usize> =
            cfg.probe_times.iter().map(|&t| grid.nearest_index(t)).collect();
        let stride = grid.n.div_ceil(cfg.g1_max_anchors.max(2));
        let anchor_indices: Vec<usize> = (0..grid.n).step_by(stride.max(1)).collect();
        let n_anchor = anchor_indices.len();
        let row_sum = cfg
            .g1_fixed_row
            .map(|t| (grid.nearest_index(t), vec![Complex64::default(); grid.n]));
        let (spectrum_sum, fft) = if cfg.collect_spectrum {
            (
                Some(RunningSeries::new(grid.n)),
                Some(FftPlanner::new().plan_fft(grid.n, FftDirection::Forward)),
            )
        } else {
            (None, None)
        };
        let n_probe = probe_indices.len();
        Self {
            grid,
            cfg,
            probe_indices,
            anchor_indices,
            n_traj: 0,
            mean_intensity: RunningSeries::new(grid.n),
            g1_sum: vec![Complex64::default(); n_anchor * n_anchor],
            row_sum,
            intensity_samples: vec![Vec::new(); n_probe],
            energy_samples: Vec::new(),
            spectrum_sum,
            yield_stats: RunningScalar::new(),
            fft,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn n_traj(&self) -> u64 {
        self.n_traj
    }

    /// Folds one pulse (and optionally its two-level solution) into every
    /// collected statistic.
    pub fn accumulate(&mut self, p: &PulseRealization, tls: Option<&TlsTrajectory>) -> Result<()> {
        if p.grid != self.grid {
            return Err(Error::InvalidGrid(
                "pulse grid does not match the accumulator grid".into(),
            ));
        }
        self.n_traj += 1;
        self.mean_intensity.push(p.intensities());

        let n_anchor = self.anchor_indices.len();
        for (a, &ia) in self.anchor_indices.iter().enumerate() {
            let ea = p.field[ia];
            for (b, &ib) in self.anchor_indices.iter().enumerate() {
                self.g1_sum[a * n_anchor + b] += ea * p.field[ib].conj();
            }
        }
        if let Some((row, sums)) = &mut self.row_sum {
            let er = p.field[*row];
            for (s, e) in sums.iter_mut().zip(&p.field) {
                *s += er * e.conj();
            }
        }
        for (samples, &idx) in self.intensity_samples.iter_mut().zip(&self.probe_indices) {
            if samples.len() < self.cfg.sample_cap {
                samples.push(p.intensity(idx));
            }
        }
        if self.energy_samples.len() < self.cfg.sample_cap {
            self.energy_samples.push(pulse_energy(p));
        }
        if let (Some(spec), Some(fft)) = (&mut self.spectrum_sum, &self.fft) {
            let mut buf = p.field.clone();
            fft.process(&mut buf);
            let dt2 = self.grid.dt * self.grid.dt;
            spec.push(buf.iter().map(|z| z.norm_sqr() * dt2));
        }
        if let Some(t) = tls {
            self.yield_stats.push(t.final_yield);
        }
        Ok(())
    }

    pub fn mean_intensity(&self) -> &[f64] {
        self.mean_intensity.mean()
    }

    pub fn mean_intensity_std_err(&self, j: usize) -> f64 {
        self.mean_intensity.std_err_at(j)
    }

    pub fn energy_samples(&self) -> &[f64] {
        &self.energy_samples
    }

    pub fn intensity_samples(&self, probe: usize) -> &[f64] {
        &self.intensity_samples[probe]
    }

    pub fn yield_stats(&self) -> &RunningScalar {
        &self.yield_stats
    }

    fn intensity_floor(&self) -> f64 {
        let peak = self
            .mean_intensity
            .mean()
            .iter()
            .cloned()
            .fold(0.0f64, f64::max);
        INTENSITY_FLOOR * peak
    }

    /// Normalized two-time coherence `|G(t,t')| / sqrt(<I(t)><I(t')>)` on the
    /// anchor grid. Entries where the mean intensity is below floor are NaN
    /// (undefined outside the pulse).
    pub fn degree_of_coherence(&self) -> Result<CoherenceSurface> {
        if self.n_traj < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                have: self.n_traj as usize,
            });
        }
        let floor = self.intensity_floor();
        let mi = self.mean_intensity.mean();
        let n_anchor = self.anchor_indices.len();
        let inv_n = 1.0 / self.n_traj as f64;
        let mut g1 = vec![f64::NAN; n_anchor * n_anchor];
        for (a, &ia) in self.anchor_indices.iter().enumerate() {
            for (b, &ib) in self.anchor_indices.iter().enumerate() {
                if mi[ia] > floor && mi[ib] > floor {
                    let g = self.g1_sum[a * n_anchor + b] * inv_n;
                    g1[a * n_anchor + b] = g.norm() / (mi[ia] * mi[ib]).sqrt();
                }
            }
        }
        Ok(CoherenceSurface {
            times: self.anchor_indices.iter().map(|&i| self.grid.time(i)).collect(),
            values: g1,
        })
    }

    /// `|g1|` as a function of delay, averaged coherently over all anchor
    /// pairs with that delay that lie inside the pulse.
    pub fn g1_vs_lag(&self) -> Result<Vec<(f64, f64)>> {
        if self.n_traj < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                have: self.n_traj as usize,
            });
        }
        let floor = self.intensity_floor();
        let mi = self.mean_intensity.mean();
        let n_anchor = self.anchor_indices.len();
        let inv_n = 1.0 / self.n_traj as f64;
        let mut out = Vec::new();
        for lag in 0..n_anchor {
            let mut sum = Complex64::default();
            let mut count = 0usize;
            for a in 0..n_anchor - lag {
                let (ia, ib) = (self.anchor_indices[a], self.anchor_indices[a + lag]);
                if mi[ia] > floor && mi[ib] > floor {
                    let g = self.g1_sum[(a + lag) * n_anchor + a] * inv_n;
                    sum += g / (mi[ia] * mi[ib]).sqrt();
                    count += 1;
                }
            }
            if count > 0 {
                let dt = (self.anchor_indices[lag] - self.anchor_indices[0]) as f64 * self.grid.dt;
                out.push((dt, (sum / count as f64).norm()));
            }
        }
        Ok(out)
    }

    /// Full-resolution normalized coherence row, if configured.
    pub fn g1_row(&self) -> Option<Vec<(f64, f64)>> {
        let (row, sums) = self.row_sum.as_ref()?;
        let floor = self.intensity_floor();
        let mi = self.mean_intensity.mean();
        let inv_n = 1.0 / self.n_traj.max(1) as f64;
        Some(
            (0..self.grid.n)
                .filter(|&j| mi[*row] > floor && mi[j] > floor)
                .map(|j| {
                    let g = sums[j] * inv_n;
                    (self.grid.time(j), g.norm() / (mi[*row] * mi[j]).sqrt())
                })
                .collect(),
        )
    }

    /// Histogram + goodness of fit of the normalized instantaneous intensity
    /// at probe index `probe` against the unit-mean negative exponential.
    pub fn fit_intensity_distribution(&self, probe: usize) -> Result<DistributionFit> {
        let samples = self
            .intensity_samples
            .get(probe)
            .ok_or_else(|| Error::Config {
                field: "probe".into(),
                message: format!("no probe {probe} configured"),
            })?;
        if samples.len() < 500 {
            return Err(Error::InsufficientSamples {
                needed: 500,
                have: samples.len(),
            });
        }
        fit_distribution(samples, DistModel::NegativeExponential)
    }

    /// Histogram + Gamma-PDF fit of the normalized pulse energy, with the
    /// shape parameter from the moment formula `M = <W>^2 / var(W)`.
    pub fn fit_energy_distribution(&self) -> Result<DistributionFit> {
        if self.energy_samples.len() < 500 {
            return Err(Error::InsufficientSamples {
                needed: 500,
                have: self.energy_samples.len(),
            });
        }
        let n = self.energy_samples.len() as f64;
        let mean = self.energy_samples.iter().sum::<f64>() / n;
        let var = self
            .energy_samples
            .iter()
            .map(|w| (w - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        // identical energies leave only rounding residue in the variance
        if var.sqrt() <= 1e-12 * mean {
            return Err(Error::BelowFloor("zero energy variance".into()));
        }
        fit_distribution(&self.energy_samples, DistModel::Gamma { shape: mean * mean / var })
    }

    /// Mean periodogram over trajectories, normalized to unit area, with the
    /// frequency axis in ascending order centered on zero.
    pub fn energy_spectral_density(&self) -> Result<Spectrum> {
        let spec = self.spectrum_sum.as_ref().ok_or_else(|| Error::Config {
            field: "collect_spectrum".into(),
            message: "spectrum collection disabled".into(),
        })?;
        if self.n_traj < 100 {
            return Err(Error::InsufficientSamples {
                needed: 100,
                have: self.n_traj as usize,
            });
        }
        let n = self.grid.n;
        let d_omega = std::f64::consts::TAU / self.grid.window();
        // fftshift: negative frequencies first
        let mut omegas = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for k in 0..n {
            let src = (k + n / 2) % n;
            let m = src as isize - if src >= n / 2 { n as isize } else { 0 };
            omegas.push(m as f64 * d_omega);
            values.push(spec.mean()[src]);
        }
        let area: f64 = values.iter().sum::<f64>() * d_omega;
        if area <= 0.0 {
            return Err(Error::BelowFloor("zero spectral mass".into()));
        }
        for v in &mut values {
            *v /= area;
        }
        Ok(Spectrum { omegas, values, delta_omega: d_omega })
    }
}

impl Merge for EnsembleAccumulator {
    fn merge(mut self, other: Self) -> Self {
        assert_eq!(self.grid, other.grid, "accumulator grids differ");
        assert_eq!(self.cfg, other.cfg, "accumulator configs differ");
        self.n_traj += other.n_traj;
        self.mean_intensity = self.mean_intensity.merge(other.mean_intensity);
        for (a, b) in self.g1_sum.iter_mut().zip(other.g1_sum) {
            *a += b;
        }
        if let (Some((_, a)), Some((_, b))) = (&mut self.row_sum, other.row_sum) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, mut b) in self.intensity_samples.iter_mut().zip(other.intensity_samples) {
            let room = self.cfg.sample_cap.saturating_sub(a.len());
            b.truncate(room);
            a.append(&mut b);
        }
        let room = self.cfg.sample_cap.saturating_sub(self.energy_samples.len());
        let mut e = other.energy_samples;
        e.truncate(room);
        self.energy_samples.append(&mut e);
        self.spectrum_sum = match (self.spectrum_sum, other.spectrum_sum) {
            (Some(a), Some(b)) => Some(a.merge(b)),
            (a, b) => a.or(b),
        };
        self.yield_stats = self.yield_stats.merge(other.yield_stats);
        self
    }
}

/// Two-time coherence on the anchor grid; NaN marks undefined entries.
pub struct CoherenceSurface {
    pub times: Vec<f64>,
    /// Row-major `|g1|(t_a, t_b)`, length `times.len()^2`.
    pub values: Vec<f64>,
}

impl CoherenceSurface {
    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.times.len() + b]
    }
}

/// Ensemble-mean energy spectral density (unit area).
pub struct Spectrum {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    pub delta_omega: f64,
}

impl Spectrum {
    /// Integral of the normalized spectrum (should be 1 by construction).
    pub fn area(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.delta_omega
    }

    /// Sums adjacent bins in groups of `factor` (noise reduction before
    /// width extraction).
    pub fn rebinned(&self, factor: usize) -> Spectrum {
        if factor <= 1 {
            return Spectrum {
                omegas: self.omegas.clone(),
                values: self.values.clone(),
                delta_omega: self.delta_omega,
            };
        }
        let n = self.omegas.len() / factor;
        let mut omegas = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for g in 0..n {
            let lo = g * factor;
            omegas.push(self.omegas[lo..lo + factor].iter().sum::<f64>() / factor as f64);
            values.push(self.values[lo..lo + factor].iter().sum::<f64>() / factor as f64);
        }
        Spectrum { omegas, values, delta_omega: self.delta_omega * factor as f64 }
    }

    /// FWHM of the spectrum.
    ///
    /// Taking the raw maximum of a speckle-noisy periodogram overestimates
    /// the peak (max-of-noise pile-up) and so biases the width low. The peak
    /// level is instead taken from a least-squares parabola through the top
    /// of the curve, and the half-maximum crossings are interpolated on a
    /// periodogram rebinned to at most ~32 bins across the width.
    pub fn fwhm(&self) -> Result<f64> {
        let raw = lineshape::fwhm(&self.omegas, &self.values, ScanSymmetry::Full)?;
        let bins_across = raw.width / self.delta_omega;
        let factor = ((bins_across / 32.0).floor() as usize).max(1);
        let smooth = self.rebinned(factor);
        let peak = parabolic_peak(&smooth.omegas, &smooth.values);
        Ok(lineshape::half_level_width(&smooth.omegas, &smooth.values, peak / 2.0)?.width)
    }
}

/// Peak level of a noisy symmetric curve from a least-squares parabola over
/// the samples above 60% of the raw maximum. Falls back to the raw maximum
/// when the top region is too narrow or the fit curves the wrong way.
fn parabolic_peak(xs: &[f64], ys: &[f64]) -> f64 {
    let (i_max, &y_max) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let mut lo = i_max;
    while lo > 0 && ys[lo - 1] >= 0.6 * y_max {
        lo -= 1;
    }
    let mut hi = i_max;
    while hi + 1 < ys.len() && ys[hi + 1] >= 0.6 * y_max {
        hi += 1;
    }
    if hi - lo + 1 < 5 {
        return y_max;
    }
    // normal equations for y = c0 + c1 x + c2 x^2, x centered on the max
    let x0 = xs[i_max];
    let mut s = [0.0f64; 5];
    let mut b = [0.0f64; 3];
    for i in lo..=hi {
        let x = xs[i] - x0;
        let mut xp = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += xp;
            if k < 3 {
                b[k] += ys[i] * xp;
            }
            xp *= x;
        }
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let det = |a: &[[f64; 3]; 3]| -> f64 {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-300 {
        return y_max;
    }
    let mut mc = m;
    for (row, &bv) in mc.iter_mut().zip(&b) {
        row[0] = bv;
    }
    let c0 = det(&mc) / d;
    let mut mc = m;
    for (row, &bv) in mc.iter_mut().zip(&b) {
        row[1] = bv;
    }
    let c1 = det(&mc) / d;
    let mut mc = m;
    for (row, &bv) in mc.iter_mut().zip(&b) {
        row[2] = bv;
    }
    let c2 = det(&mc) / d;
    if c2 >= 0.0 {
        return y_max;
    }
    let peak = c0 - c1 * c1 / (4.0 * c2);
    // sanity clamp against a runaway fit
    peak.clamp(0.7 * y_max, 1.2 * y_max)
}

/// Model family a histogram is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistModel {
    /// Unit-mean exponential for the normalized instantaneous intensity.
    NegativeExponential,
    /// Gamma PDF for the normalized pulse energy.
    Gamma { shape: f64 },
}

impl DistModel {
    /// PDF of the normalized variable.
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            DistModel::NegativeExponential => (-x).exp(),
            DistModel::Gamma { shape: m } => {
                // M^M x^(M-1) e^(-M x) / Gamma(M)
                (m * m.ln() + (m - 1.0) * x.ln() - m * x - ln_gamma(m)).exp()
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            DistModel::NegativeExponential => 1.0 - (-x).exp(),
            DistModel::Gamma { shape: m } => gamma_lr(m, m * x),
        }
    }

    fn n_params(&self) -> usize {
        match self {
            DistModel::NegativeExponential => 1, // the mean
            DistModel::Gamma { .. } => 2,        // mean and shape
        }
    }
}

/// Binned counts of the normalized samples.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Freedman-Diaconis binning with a floor of 20 bins. A degenerate
    /// (zero-spread) sample produces a single bin.
    pub fn freedman_diaconis(samples: &[f64]) -> Histogram {
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
        let range = max - min;
        if range <= 0.0 {
            return Histogram {
                edges: vec![min, min],
                counts: vec![samples.len() as u64],
            };
        }
        let q = |p: f64| -> f64 {
            let pos = p * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let frac = pos - lo as f64;
            if lo + 1 < sorted.len() {
                sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
            } else {
                sorted[lo]
            }
        };
        let iqr = q(0.75) - q(0.25);
        let fd_width = 2.0 * iqr / (samples.len() as f64).cbrt();
        let n_bins = if fd_width > 0.0 {
            ((range / fd_width).ceil() as usize).max(20)
        } else {
            20
        };
        let width = range / n_bins as f64;
        let edges: Vec<f64> = (0..=n_bins).map(|i| min + i as f64 * width).collect();
        let mut counts = vec![0u64; n_bins];
        for &x in samples {
            let mut bin = ((x - min) / width) as usize;
            if bin >= n_bins {
                bin = n_bins - 1;
            }
            counts[bin] += 1;
        }
        Histogram { edges, counts }
    }

    /// Bin density (counts normalized to unit area).
    pub fn density(&self) -> Vec<f64> {
        let total: u64 = self.counts.iter().sum();
        self.counts
            .iter()
            .zip(self.edges.windows(2))
            .map(|(&c, e)| {
                let w = e[1] - e[0];
                if w > 0.0 {
                    c as f64 / (total as f64 * w)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Histogram of a sample set with a model overlay and Pearson goodness.
#[derive(Debug, Clone)]
pub struct DistributionFit {
    pub histogram: Histogram,
    pub model: DistModel,
    pub chi2_per_dof: f64,
    pub dof: usize,
    /// False when the sample is degenerate or too few usable bins remain.
    pub fit_ok: bool,
    pub n_samples: usize,
    /// Mean of the raw (unnormalized) samples.
    pub sample_mean: f64,
}

fn fit_distribution(raw: &[f64], model: DistModel) -> Result<DistributionFit> {
    let n = raw.len();
    let sample_mean = raw.iter().sum::<f64>() / n as f64;
    if sample_mean.is_nan() || sample_mean <= 0.0 {
        return Err(Error::BelowFloor("non-positive sample mean".into()));
    }
    let normalized: Vec<f64> = raw.iter().map(|&x| x / sample_mean).collect();
    let histogram = Histogram::freedman_diaconis(&normalized);
    if histogram.counts.len() < 2 {
        return Ok(DistributionFit {
            histogram,
            model,
            chi2_per_dof: f64::INFINITY,
            dof: 0,
            fit_ok: false,
            n_samples: n,
            sample_mean,
        });
    }
    // Pearson chi-square over bins merged left-to-right until each merged
    // bin expects at least 5 counts; the first bin absorbs mass down to 0,
    // the last up to infinity, and a trailing partial merges backwards.
    let mut merged: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut obs_acc = 0.0;
    let mut exp_acc = 0.0;
    let mut cdf_lo = 0.0;
    for (i, &count) in histogram.counts.iter().enumerate() {
        let hi = if i + 1 == histogram.counts.len() {
            1.0
        } else {
            model.cdf(histogram.edges[i + 1])
        };
        obs_acc += count as f64;
        exp_acc += n as f64 * (hi - cdf_lo);
        cdf_lo = hi;
        if exp_acc >= 5.0 {
            merged.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    if exp_acc > 0.0 || obs_acc > 0.0 {
        if let Some(last) = merged.last_mut() {
            last.0 += obs_acc;
            last.1 += exp_acc;
        } else {
            merged.push((obs_acc, exp_acc));
        }
    }
    let chi2: f64 = merged
        .iter()
        .map(|&(obs, exp)| (obs - exp).powi(2) / exp.max(1e-12))
        .sum();
    let params = model.n_params();
    let fit_ok = merged.len() > params + 1;
    let dof = merged.len().saturating_sub(1 + params).max(1);
    Ok(DistributionFit {
        histogram,
        model,
        chi2_per_dof: chi2 / dof as f64,
        dof,
        fit_ok,
        n_samples: n,
        sample_mean,
    })
}
