//! Stationary complex Gaussian colored noise from a prescribed power
//! spectral density.
//!
//! An independent circularly-symmetric Gaussian amplitude is drawn for every
//! point of a symmetric frequency grid, weighted by the PSD, and transformed
//! to the time domain with an (unnormalized) inverse DFT:
//!
//! ```text
//! zeta(t_j) = sum_k xi_k exp(i omega_k t_j),   <xi_k xi_l*> = d_omega P(omega_k) delta_kl
//! ```
//!
//! Both supported PSD families are unit-normalized, so `<|zeta|^2> = 1` up to
//! the spectral mass lost to grid truncation (tracked per grid).

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};

const TWO_PI: f64 = std::f64::consts::TAU;

/// Noise correlation family, named by the shape of the PSD.
///
/// Gaussian PSD gives Gaussian correlations `exp(-sigma^2 dt^2 / 2)`;
/// Lorentzian PSD gives exponential correlations `exp(-gamma |dt| / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdFamily {
    Gaussian,
    Lorentzian,
}

/// Unit-normalized power spectral density of the stationary noise.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PowerSpectralDensity {
    pub family: PsdFamily,
    /// Width parameter, in angular frequency units (rad per time unit).
    pub sigma_omega: f64,
}

impl PowerSpectralDensity {
    pub fn new(family: PsdFamily, sigma_omega: f64) -> Result<Self> {
        if !sigma_omega.is_finite() || sigma_omega <= 0.0 {
            return Err(Error::Config {
                field: "sigma_omega".into(),
                message: format!("must be positive and finite, got {sigma_omega}"),
            });
        }
        Ok(Self { family, sigma_omega })
    }

    pub fn gaussian(sigma_omega: f64) -> Result<Self> {
        Self::new(PsdFamily::Gaussian, sigma_omega)
    }

    pub fn lorentzian(sigma_omega: f64) -> Result<Self> {
        Self::new(PsdFamily::Lorentzian, sigma_omega)
    }

    /// Builds the PSD whose FWHM equals `bandwidth`.
    pub fn from_bandwidth(family: PsdFamily, bandwidth: f64) -> Result<Self> {
        let sigma = match family {
            PsdFamily::Gaussian => bandwidth / (2.0 * (2.0 * (2.0f64).ln()).sqrt()),
            PsdFamily::Lorentzian => bandwidth / 2.0,
        };
        Self::new(family, sigma)
    }

    /// Spectral density at angular frequency `omega`.
    pub fn eval(&self, omega: f64) -> f64 {
        let s = self.sigma_omega;
        match self.family {
            PsdFamily::Gaussian => {
                (-omega * omega / (2.0 * s * s)).exp() / (s * (TWO_PI).sqrt())
            }
            PsdFamily::Lorentzian => {
                let w = omega / s;
                1.0 / (s * std::f64::consts::PI * (w * w + 1.0))
            }
        }
    }

    /// FWHM of the PSD (the field bandwidth `gamma`).
    pub fn bandwidth(&self) -> f64 {
        match self.family {
            PsdFamily::Gaussian => 2.0 * self.sigma_omega * (2.0 * (2.0f64).ln()).sqrt(),
            PsdFamily::Lorentzian => 2.0 * self.sigma_omega,
        }
    }

    /// Coherence time `T_c = integral |g1(v)|^2 dv`.
    pub fn coherence_time(&self) -> f64 {
        match self.family {
            PsdFamily::Gaussian => std::f64::consts::PI.sqrt() / self.sigma_omega,
            PsdFamily::Lorentzian => 1.0 / self.sigma_omega,
        }
    }

    /// Analytic degree of first-order coherence at delay `dt`.
    ///
    /// This is the Fourier transform of the PSD; real-valued because both
    /// families are symmetric about zero.
    pub fn g1(&self, dt: f64) -> f64 {
        let s = self.sigma_omega;
        match self.family {
            PsdFamily::Gaussian => (-0.5 * s * s * dt * dt).exp(),
            // bandwidth gamma = 2 sigma, so exp(-gamma |dt| / 2) = exp(-sigma |dt|)
            PsdFamily::Lorentzian => (-s * dt.abs()).exp(),
        }
    }
}

/// Uniform time grid `t_j = j * dt`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub n: usize,
    pub dt: f64,
}

impl TimeGrid {
    pub fn window(&self) -> f64 {
        self.n as f64 * self.dt
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.time(j))
    }

    /// Index of the grid point nearest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        ((t / self.dt).round() as isize).clamp(0, self.n as isize - 1) as usize
    }
}

/// Symmetric frequency grid for spectral sampling.
///
/// Stores points in standard DFT order: index `k < n/2` holds `omega = k d_omega`,
/// index `k >= n/2` holds `omega = (k - n) d_omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub n_points: usize,
    pub delta_omega: f64,
}

impl FrequencyGrid {
    pub fn new(n_points: usize, delta_omega: f64) -> Result<Self> {
        let grid = Self { n_points, delta_omega };
        grid.validate_basic()?;
        Ok(grid)
    }

    fn validate_basic(&self) -> Result<()> {
        if !self.delta_omega.is_finite() || self.delta_omega <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "delta_omega must be positive, got {}",
                self.delta_omega
            )));
        }
        if self.n_points < 256 || !self.n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_points must be even and >= 256, got {}",
                self.n_points
            )));
        }
        Ok(())
    }

    /// Checks grid validity against a PSD: span at least 8x the PSD FWHM.
    pub fn validate_for(&self, psd: &PowerSpectralDensity) -> Result<()> {
        self.validate_basic()?;
        let span = self.n_points as f64 * self.delta_omega;
        if span < 8.0 * psd.bandwidth() {
            return Err(Error::InvalidGrid(format!(
                "span {:.4} < 8 x PSD FWHM {:.4}",
                span,
                psd.bandwidth()
            )));
        }
        Ok(())
    }

    /// Angular frequency of storage index `k` (DFT layout).
    pub fn omega(&self, k: usize) -> f64 {
        let m = if k < self.n_points / 2 {
            k as isize
        } else {
            k as isize - self.n_points as isize
        };
        m as f64 * self.delta_omega
    }

    /// Induced time grid: `n` points with step `2 pi / (n d_omega)`.
    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid {
            n: self.n_points,
            dt: TWO_PI / (self.n_points as f64 * self.delta_omega),
        }
    }

    /// Total spectral window `n d_omega`.
    pub fn span(&self) -> f64 {
        self.n_points as f64 * self.delta_omega
    }

    /// Spectral mass `sum_k d_omega P(omega_k)` captured by this grid.
    pub fn captured_mass(&self, psd: &PowerSpectralDensity) -> f64 {
        (0..self.n_points)
            .map(|k| self.delta_omega * psd.eval(self.omega(k)))
            .sum()
    }

    /// Sizes a grid for the given PSD and simulation scales.
    ///
    /// The window covers `max(min_window, 20 T_c)` and the step resolves
    /// `min(max_step, T_c / 20)`; the point count is rounded up to a power of
    /// two and grown further until at least 99% of the spectral mass falls
    /// inside the span (the Lorentzian tails are slow).
    pub fn sized_for(psd: &PowerSpectralDensity, min_window: f64, max_step: f64) -> Result<Self> {
        if min_window.is_nan() || min_window <= 0.0 || max_step.is_nan() || max_step <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "window and step bounds must be positive (window {min_window}, step {max_step})"
            )));
        }
        let t_c = psd.coherence_time();
        let window = min_window.max(20.0 * t_c);
        let step = max_step.min(t_c / 20.0);
        let mut n = ((window / step).ceil() as usize).next_power_of_two().max(256);
        loop {
            let grid = Self {
                n_points: n,
                delta_omega: TWO_PI / window,
            };
            if grid.captured_mass(psd) >= 0.99 {
                grid.validate_for(psd)?;
                return Ok(grid);
            }
            n *= 2;
            if n > 1 << 24 {
                return Err(Error::InvalidGrid(
                    "cannot capture 99% of the PSD mass within 2^24 points".into(),
                ));
            }
        }
    }
}

/// One realization of the stationary colored noise.
#[derive(Debug, Clone)]
pub struct NoiseTrajectory {
    pub grid: TimeGrid,
    pub values: Vec<Complex64>,
    pub seed: u64,
    /// Absent for the degenerate deterministic trajectory (`zeta = 1`).
    pub psd: Option<PowerSpectralDensity>,
}

impl NoiseTrajectory {
    /// Degenerate noiseless trajectory `zeta(t) = 1`, for Fourier-limited
    /// pulses and tests.
    pub fn constant(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(1.0, 0.0); grid.n],
            seed: 0,
            psd: None,
        }
    }
}

/// Draws the spectral amplitudes `xi_k` for one noise realization.
///
/// Each amplitude is `sqrt(d_omega P(omega_k) / 2) (a_k + i b_k)` with
/// independent standard normal `a_k`, `b_k`, giving
/// `<xi_k> = <xi_k^2> = 0` and `<xi_k xi_l*> = d_omega P(omega_k) delta_kl`.
pub fn sample_spectral_amplitudes(
    psd: &PowerSpectralDensity,
    grid: &FrequencyGrid,
    rng_seed: u64,
) -> Result<Vec<Complex64>> {
    grid.validate_for(psd)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let normal = StandardNormal;
    let mut out = Vec::with_capacity(grid.n_points);
    for k in 0..grid.n_points {
        let scale = (grid.delta_omega * psd.eval(grid.omega(k)) / 2.0).sqrt();
        let a: f64 = normal.sample(&mut rng);
        let b: f64 = normal.sample(&mut rng);
        out.push(Complex64::new(scale * a, scale * b));
    }
    Ok(out)
}

/// Transforms spectral amplitudes to the time domain:
/// `zeta(t_j) = sum_k xi_k exp(i omega_k t_j)`.
pub fn synthesize_noise(
    amplitudes: &[Complex64],
    grid: &FrequencyGrid,
) -> Result<NoiseTrajectory> {
    grid.validate_basic()?;
    if amplitudes.len() != grid.n_points {
        return Err(Error::LengthMismatch {
            expected: grid.n_points,
            got: amplitudes.len(),
        });
    }
    let mut buf = amplitudes.to_vec();
    // Unnormalized inverse FFT: exactly the synthesis sum above.
    FftPlanner::new()
        .plan_fft(grid.n_points, FftDirection::Inverse)
        .process(&mut buf);
    Ok(NoiseTrajectory {
        grid: grid.time_grid(),
        values: buf,
        seed: 0,
        psd: None,
    })
}

/// Exact autocorrelation of the synthesized process on its own grid:
/// `G(t_j) = sum_k d_omega P(omega_k) exp(i omega_k t_j)`, for lags
/// `j = 0..n`. Converges to the analytic `g1` as the grid refines; the
/// difference is the truncation loss.
pub fn grid_autocorrelation(psd: &PowerSpectralDensity, grid: &FrequencyGrid) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = (0..grid.n_points)
        .map(|k| Complex64::new(grid.delta_omega * psd.eval(grid.omega(k)), 0.0))
        .collect();
    FftPlanner::new()
        .plan_fft(grid.n_points, FftDirection::Inverse)
        .process(&mut buf);
    buf
}

/// Reusable generator: caches the FFT plan and the per-bin amplitude scales.
pub struct NoiseSynthesizer {
    psd: PowerSpectralDensity,
    grid: FrequencyGrid,
    scales: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl NoiseSynthesizer {
    pub fn new(psd: PowerSpectralDensity, grid: FrequencyGrid) -> Result<Self> {
        grid.validate_for(&psd)?;
        let scales = (0..grid.n_points)
            .map(|k| (grid.delta_omega * psd.eval(grid.omega(k)) / 2.0).sqrt())
            .collect();
        let fft = FftPlanner::new().plan_fft(grid.n_points, FftDirection::Inverse);
        Ok(Self { psd, grid, scales, fft })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn psd(&self) -> &PowerSpectralDensity {
        &self.psd
    }

    /// Generates the trajectory for `seed`; bit-identical for equal seeds.
    pub fn generate(&self, seed: u64) -> NoiseTrajectory {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = StandardNormal;
        let mut buf: Vec<Complex64> = self
            .scales
            .iter()
            .map(|&s| {
                let a: f64 = normal.sample(&mut rng);
                let b: f64 = normal.sample(&mut rng);
                Complex64::new(s * a, s * b)
            })
            .collect();
        self.fft.process(&mut buf);
        NoiseTrajectory {
            grid: self.grid.time_grid(),
            values: buf,
            seed,
            psd: Some(self.psd),
        }
    }
}
