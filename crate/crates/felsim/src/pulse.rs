//! Stochastic pulses: stationary noise on a deterministic Fourier-limited
//! envelope, plus envelope/bandwidth analytics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::noise::{NoiseTrajectory, PowerSpectralDensity, TimeGrid};

/// Deterministic intensity profile `f_s(t)`, normalized to peak 1.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum EnvelopeShape {
    /// `f(t) = exp(-(t - t0)^2 / tau^2)`.
    Gaussian { tau: f64, t0: f64 },
    /// Half-cosine rise and fall around a flat region centered at `t0`.
    FlatTop { rise: f64, flat: f64, fall: f64, t0: f64 },
}

/// Envelope with its peak intensity `I0` (arbitrary units).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Envelope {
    pub shape: EnvelopeShape,
    pub peak_intensity: f64,
}

impl Envelope {
    /// Gaussian envelope of duration `tau` centered at `t0 = 5 tau`, which
    /// keeps the truncated intensity at the grid origin below 1e-10 of peak.
    pub fn gaussian(tau: f64) -> Result<Self> {
        Self::gaussian_at(tau, 5.0 * tau)
    }

    pub fn gaussian_at(tau: f64, t0: f64) -> Result<Self> {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::Config {
                field: "tau".into(),
                message: format!("must be positive and finite, got {tau}"),
            });
        }
        Ok(Self {
            shape: EnvelopeShape::Gaussian { tau, t0 },
            peak_intensity: 1.0,
        })
    }

    /// Flat-top envelope; the flat region is centered at `t0 = rise + flat / 2 + rise`,
    /// leaving one full ramp of slack before the support begins.
    pub fn flat_top(rise: f64, flat: f64, fall: f64) -> Result<Self> {
        for (name, v) in [("rise", rise), ("flat", flat), ("fall", fall)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config {
                    field: name.into(),
                    message: format!("must be positive and finite, got {v}"),
                });
            }
        }
        let t0 = 2.0 * rise + flat / 2.0;
        Ok(Self {
            shape: EnvelopeShape::FlatTop { rise, flat, fall, t0 },
            peak_intensity: 1.0,
        })
    }

    pub fn with_peak_intensity(mut self, peak: f64) -> Self {
        self.peak_intensity = peak;
        self
    }

    /// `f_s(t)` in `[0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        match self.shape {
            EnvelopeShape::Gaussian { tau, t0 } => {
                let x = (t - t0) / tau;
                (-x * x).exp()
            }
            EnvelopeShape::FlatTop { rise, flat, fall, t0 } => {
                let start = t0 - flat / 2.0 - rise;
                if t < start || t > t0 + flat / 2.0 + fall {
                    0.0
                } else if t < start + rise {
                    let x = (t - start) / rise;
                    0.5 * (1.0 - (std::f64::consts::PI * x).cos())
                } else if t <= t0 + flat / 2.0 {
                    1.0
                } else {
                    let x = (t - t0 - flat / 2.0) / fall;
                    0.5 * (1.0 + (std::f64::consts::PI * x).cos())
                }
            }
        }
    }

    pub fn center(&self) -> f64 {
        match self.shape {
            EnvelopeShape::Gaussian { t0, .. } => t0,
            EnvelopeShape::FlatTop { t0, .. } => t0,
        }
    }

    /// Duration scale used for grid sizing: `tau` for the Gaussian, half the
    /// total ramp+flat length for the flat-top.
    pub fn nominal_duration(&self) -> f64 {
        match self.shape {
            EnvelopeShape::Gaussian { tau, .. } => tau,
            EnvelopeShape::FlatTop { rise, flat, fall, .. } => (rise + flat + fall) / 2.0,
        }
    }

    /// Interval outside of which `f_s(t) <= eps`.
    pub fn support(&self, eps: f64) -> (f64, f64) {
        match self.shape {
            EnvelopeShape::Gaussian { tau, t0 } => {
                let half = tau * (1.0 / eps).ln().sqrt();
                (t0 - half, t0 + half)
            }
            EnvelopeShape::FlatTop { rise, flat, fall, t0 } => {
                (t0 - flat / 2.0 - rise, t0 + flat / 2.0 + fall)
            }
        }
    }
}

/// One stochastic pulse realization `E_s(t) = zeta(t) sqrt(I0 f_s(t))`.
#[derive(Debug, Clone)]
pub struct PulseRealization {
    pub grid: TimeGrid,
    pub field: Vec<Complex64>,
    pub envelope: Envelope,
    pub psd: Option<PowerSpectralDensity>,
    pub seed: u64,
}

impl PulseRealization {
    pub fn intensity(&self, j: usize) -> f64 {
        self.field[j].norm_sqr()
    }

    pub fn intensities(&self) -> impl Iterator<Item = f64> + '_ {
        self.field.iter().map(|z| z.norm_sqr())
    }
}

/// Imprints the envelope on a noise trajectory.
///
/// Fails if the grid does not contain the envelope support (the truncated
/// envelope must stay below 1e-10 of peak outside the grid).
pub fn make_pulse(noise: &NoiseTrajectory, env: &Envelope) -> Result<PulseRealization> {
    let (lo, hi) = env.support(1e-10);
    let t_end = noise.grid.time(noise.grid.n - 1);
    if lo < 0.0 || hi > t_end {
        return Err(Error::GridCoverage(format!(
            "support [{lo:.4}, {hi:.4}] vs grid [0, {t_end:.4}]"
        )));
    }
    let i0 = env.peak_intensity;
    let field = noise
        .values
        .iter()
        .zip(noise.grid.times())
        .map(|(z, t)| z * (i0 * env.eval(t)).sqrt())
        .collect();
    Ok(PulseRealization {
        grid: noise.grid,
        field,
        envelope: *env,
        psd: noise.psd,
        seed: noise.seed,
    })
}

/// Pulse energy `W_s = integral I_s(t) dt` (trapezoid, proportionality 1).
pub fn pulse_energy(p: &PulseRealization) -> f64 {
    let n = p.field.len();
    if n < 2 {
        return 0.0;
    }
    let sum: f64 = p.intensities().sum();
    let ends = 0.5 * (p.intensity(0) + p.intensity(n - 1));
    (sum - ends) * p.grid.dt
}

/// Transform-limited bandwidth (FWHM) of a Gaussian pulse of duration `tau`:
/// `2 sqrt(ln 2) / tau`.
pub fn fourier_limited_bandwidth(tau: f64) -> f64 {
    2.0 * (2.0f64).ln().sqrt() / tau
}

/// Combined spectral FWHM of envelope and noise:
/// `sqrt(fourier_limited^2 + gamma^2)`.
pub fn combined_bandwidth(tau: f64, gamma: f64) -> f64 {
    let flb = fourier_limited_bandwidth(tau);
    (flb * flb + gamma * gamma).sqrt()
}
