//! Two-level system with Auger decay driven by one pulse realization, and
//! ensemble detuning scans.
//!
//! Rotating-frame equations of motion (carrier eliminated exactly; Stark
//! shifts neglected):
//!
//! ```text
//! d(s11)/dt =  2 Im[conj(W) s12]
//! d(s22)/dt = -G2 s22 - 2 Im[conj(W) s12]
//! d(s12)/dt = (i D - G21/2) s12 + i W (s22 - s11)
//! d(Q2)/dt  =  G2 s22
//! ```
//!
//! with `W(t) = rabi_peak sqrt(f(t)) zeta(t)`. The populations and yield obey
//! `s11 + s22 + Q2 = 1` exactly; the integrator tracks the numerical drift of
//! that sum and aborts above 1e-6.

use num_complex::Complex64;

use crate::ensemble::{chunked_map_reduce, trajectory_seed, Merge, RunningScalar};
use crate::error::{Error, Result};
use crate::lineshape::{LineshapeScan, ScanMetadata};
use crate::noise::{FrequencyGrid, NoiseSynthesizer, PowerSpectralDensity, TimeGrid};
use crate::pulse::{make_pulse, Envelope, PulseRealization};

/// Atomic and driving parameters, in consistent rate units.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AtomParams {
    /// Excited-state decay rate (natural linewidth).
    pub gamma2: f64,
    /// Coherence decay rate; `gamma2` absent extra broadening.
    pub gamma21: f64,
    /// Peak Rabi frequency.
    pub rabi_peak: f64,
    /// Detuning of the carrier from resonance.
    pub detuning: f64,
}

impl AtomParams {
    pub fn new(gamma2: f64) -> Self {
        Self { gamma2, gamma21: gamma2, rabi_peak: 0.0, detuning: 0.0 }
    }

    pub fn with_rabi_peak(mut self, rabi: f64) -> Self {
        self.rabi_peak = rabi;
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn with_gamma21(mut self, gamma21: f64) -> Self {
        self.gamma21 = gamma21;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma2.is_nan() || self.gamma2 <= 0.0 {
            return Err(Error::Config {
                field: "gamma2".into(),
                message: format!("must be positive, got {}", self.gamma2),
            });
        }
        if self.gamma21 < self.gamma2 {
            return Err(Error::Config {
                field: "gamma21".into(),
                message: "must be >= gamma2 (no sub-natural coherence decay)".into(),
            });
        }
        if self.rabi_peak < 0.0 {
            return Err(Error::Config {
                field: "rabi_peak".into(),
                message: "must be nonnegative".into(),
            });
        }
        Ok(())
    }
}

/// Per-pulse solution of the equations of motion.
#[derive(Debug, Clone)]
pub struct TlsTrajectory {
    pub grid: TimeGrid,
    pub sigma11: Vec<f64>,
    pub sigma22: Vec<f64>,
    pub sigma12: Vec<Complex64>,
    pub q2: Vec<f64>,
    /// `Q2(T) + s22(T)`: the remaining excited population decays after the
    /// pulse is over.
    pub final_yield: f64,
    /// Largest observed `|s11 + s22 + Q2 - 1|` over the trajectory.
    pub max_conservation_drift: f64,
}

impl TlsTrajectory {
    /// Population difference `n(t) = s22 - s11`.
    pub fn population_difference(&self, j: usize) -> f64 {
        self.sigma22[j] - self.sigma11[j]
    }
}

#[derive(Clone, Copy)]
struct State {
    s11: f64,
    s22: f64,
    s12: Complex64,
    q2: f64,
}

impl State {
    fn initial() -> Self {
        Self { s11: 1.0, s22: 0.0, s12: Complex64::default(), q2: 0.0 }
    }

    fn drift(&self) -> f64 {
        (self.s11 + self.s22 + self.q2 - 1.0).abs()
    }
}

#[inline]
fn deriv(s: &State, omega: Complex64, p: &AtomParams) -> State {
    let pump = 2.0 * (omega.conj() * s.s12).im;
    State {
        s11: pump,
        s22: -p.gamma2 * s.s22 - pump,
        s12: Complex64::new(-p.gamma21 / 2.0, p.detuning) * s.s12
            + Complex64::i() * omega * (s.s22 - s.s11),
        q2: p.gamma2 * s.s22,
    }
}

#[inline]
fn add_scaled(s: &State, d: &State, h: f64) -> State {
    State {
        s11: s.s11 + h * d.s11,
        s22: s.s22 + h * d.s22,
        s12: s.s12 + h * d.s12,
        q2: s.q2 + h * d.q2,
    }
}

/// Classical fixed-step RK4 over the pulse grid. Field values between grid
/// points (the two midpoint stages) use linear interpolation, which is
/// consistent with the band-limited noise. `scale` maps the stored field to
/// the Rabi frequency.
fn integrate(
    field: &[Complex64],
    grid: TimeGrid,
    params: &AtomParams,
    scale: f64,
    mut record: impl FnMut(usize, &State),
) -> Result<(State, f64)> {
    let h = grid.dt;
    let mut state = State::initial();
    let mut max_drift: f64 = 0.0;
    record(0, &state);
    for j in 0..grid.n - 1 {
        let w0 = field[j] * scale;
        let w1 = field[j + 1] * scale;
        let wm = 0.5 * (w0 + w1);
        let k1 = deriv(&state, w0, params);
        let k2 = deriv(&add_scaled(&state, &k1, h / 2.0), wm, params);
        let k3 = deriv(&add_scaled(&state, &k2, h / 2.0), wm, params);
        let k4 = deriv(&add_scaled(&state, &k3, h), w1, params);
        state = State {
            s11: state.s11 + h / 6.0 * (k1.s11 + 2.0 * k2.s11 + 2.0 * k3.s11 + k4.s11),
            s22: state.s22 + h / 6.0 * (k1.s22 + 2.0 * k2.s22 + 2.0 * k3.s22 + k4.s22),
            s12: state.s12 + h / 6.0 * (k1.s12 + 2.0 * k2.s12 + 2.0 * k3.s12 + k4.s12),
            q2: state.q2 + h / 6.0 * (k1.q2 + 2.0 * k2.q2 + 2.0 * k3.q2 + k4.q2),
        };
        let drift = state.drift();
        max_drift = max_drift.max(drift);
        if drift > 1e-6 {
            return Err(Error::ConservationViolation { drift, time: grid.time(j + 1) });
        }
        record(j + 1, &state);
    }
    Ok((state, max_drift))
}

fn rabi_scale(p: &PulseRealization, params: &AtomParams) -> f64 {
    params.rabi_peak / p.envelope.peak_intensity.sqrt()
}

/// Stochastic Rabi-frequency series `W(t) = rabi_peak sqrt(f(t)) zeta(t)`.
pub fn rabi_series(p: &PulseRealization, params: &AtomParams) -> Vec<Complex64> {
    let scale = rabi_scale(p, params);
    p.field.iter().map(|&e| e * scale).collect()
}

/// Integrates one pulse and records the full solution.
pub fn propagate_trajectory(p: &PulseRealization, params: &AtomParams) -> Result<TlsTrajectory> {
    params.validate()?;
    let n = p.grid.n;
    let mut sigma11 = Vec::with_capacity(n);
    let mut sigma22 = Vec::with_capacity(n);
    let mut sigma12 = Vec::with_capacity(n);
    let mut q2 = Vec::with_capacity(n);
    let (end, max_drift) = integrate(
        &p.field,
        p.grid,
        params,
        rabi_scale(p, params),
        |_, s| {
            sigma11.push(s.s11);
            sigma22.push(s.s22);
            sigma12.push(s.s12);
            q2.push(s.q2);
        },
    )?;
    Ok(TlsTrajectory {
        grid: p.grid,
        sigma11,
        sigma22,
        sigma12,
        q2,
        final_yield: end.q2 + end.s22,
        max_conservation_drift: max_drift,
    })
}

/// Outcome of a yield-only propagation.
#[derive(Debug, Clone, Copy)]
pub struct YieldOutcome {
    pub q2_infinity: f64,
    pub max_conservation_drift: f64,
}

/// Integrates one pulse keeping only the final yield.
pub fn propagate_yield(p: &PulseRealization, params: &AtomParams) -> Result<YieldOutcome> {
    params.validate()?;
    let (end, max_drift) = integrate(&p.field, p.grid, params, rabi_scale(p, params), |_, _| {})?;
    Ok(YieldOutcome { q2_infinity: end.q2 + end.s22, max_conservation_drift: max_drift })
}

/// Frequency grid sized for an atom + noise simulation: the window covers the
/// pulse and the atomic decay, the step resolves the coherence time, the
/// decay, the envelope, and the largest scanned detuning.
pub fn simulation_grid(
    env: &Envelope,
    psd: &PowerSpectralDensity,
    params: &AtomParams,
    max_abs_detuning: f64,
) -> Result<FrequencyGrid> {
    let tau = env.nominal_duration();
    let window = (env.center() + 5.0 * tau).max(10.0 * tau).max(10.0 / params.gamma2);
    let mut step = (1.0 / params.gamma2).min(tau) / 20.0;
    if max_abs_detuning > 0.0 {
        step = step.min(1.0 / (20.0 * max_abs_detuning));
    }
    FrequencyGrid::sized_for(psd, window, step)
}

/// Mean final yield over an ensemble.
#[derive(Debug, Clone, Copy)]
pub struct YieldStats {
    pub mean: f64,
    pub std_err: f64,
    pub n_traj: u64,
    pub max_conservation_drift: f64,
}

struct YieldAcc {
    stats: RunningScalar,
    max_drift: f64,
    err: Option<Error>,
}

impl Merge for YieldAcc {
    fn merge(self, other: Self) -> Self {
        Self {
            stats: self.stats.merge(other.stats),
            max_drift: self.max_drift.max(other.max_drift),
            err: self.err.or(other.err),
        }
    }
}

/// Averages the final yield over `n_traj` stochastic pulses.
pub fn ensemble_yield(
    env: &Envelope,
    psd: &PowerSpectralDensity,
    params: &AtomParams,
    n_traj: u64,
    master_seed: u64,
) -> Result<YieldStats> {
    params.validate()?;
    let grid = simulation_grid(env, psd, params, params.detuning.abs())?;
    let synth = NoiseSynthesizer::new(*psd, grid)?;
    let acc = chunked_map_reduce(
        n_traj,
        || YieldAcc { stats: RunningScalar::new(), max_drift: 0.0, err: None },
        |acc, i| {
            if acc.err.is_some() {
                return;
            }
            let run = make_pulse(&synth.generate(trajectory_seed(master_seed, i)), env)
                .and_then(|pulse| propagate_yield(&pulse, params));
            match run {
                Ok(out) => {
                    acc.stats.push(out.q2_infinity);
                    acc.max_drift = acc.max_drift.max(out.max_conservation_drift);
                }
                Err(e) => acc.err = Some(e),
            }
        },
    );
    if let Some(e) = acc.err {
        return Err(e);
    }
    Ok(YieldStats {
        mean: acc.stats.mean(),
        std_err: acc.stats.std_err(),
        n_traj: acc.stats.count(),
        max_conservation_drift: acc.max_drift,
    })
}

/// Test hook: averages over an explicit list of trajectory seeds.
pub fn ensemble_yield_seeded(
    env: &Envelope,
    psd: &PowerSpectralDensity,
    params: &AtomParams,
    seeds: &[u64],
) -> Result<YieldStats> {
    params.validate()?;
    let grid = simulation_grid(env, psd, params, params.detuning.abs())?;
    let synth = NoiseSynthesizer::new(*psd, grid)?;
    let mut stats = RunningScalar::new();
    let mut max_drift: f64 = 0.0;
    for &seed in seeds {
        let pulse = make_pulse(&synth.generate(seed), env)?;
        let out = propagate_yield(&pulse, params)?;
        stats.push(out.q2_infinity);
        max_drift = max_drift.max(out.max_conservation_drift);
    }
    Ok(YieldStats {
        mean: stats.mean(),
        std_err: stats.std_err(),
        n_traj: stats.count(),
        max_conservation_drift: max_drift,
    })
}

struct ScanAcc {
    per_detuning: Vec<RunningScalar>,
    max_drift: f64,
    err: Option<Error>,
}

impl Merge for ScanAcc {
    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.per_detuning.iter_mut().zip(other.per_detuning) {
            let merged = std::mem::take(a).merge(b);
            *a = merged;
        }
        Self {
            per_detuning: self.per_detuning,
            max_drift: self.max_drift.max(other.max_drift),
            err: self.err.or(other.err),
        }
    }
}

/// Ensemble detuning scan with common random numbers: each trajectory's
/// pulse is synthesized once and propagated at every detuning, so scan noise
/// is strongly correlated across points.
pub fn detuning_scan(
    env: &Envelope,
    psd: &PowerSpectralDensity,
    params: &AtomParams,
    detunings: &[f64],
    n_traj: u64,
    master_seed: u64,
) -> Result<LineshapeScan> {
    params.validate()?;
    if detunings.is_empty() {
        return Err(Error::Config {
            field: "detunings".into(),
            message: "must be nonempty".into(),
        });
    }
    if detunings.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config {
            field: "detunings".into(),
            message: "must be strictly increasing".into(),
        });
    }
    let max_abs = detunings.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let grid = simulation_grid(env, psd, params, max_abs)?;
    let synth = NoiseSynthesizer::new(*psd, grid)?;
    let acc = chunked_map_reduce(
        n_traj,
        || ScanAcc {
            per_detuning: vec![RunningScalar::new(); detunings.len()],
            max_drift: 0.0,
            err: None,
        },
        |acc, i| {
            if acc.err.is_some() {
                return;
            }
            let pulse = match make_pulse(&synth.generate(trajectory_seed(master_seed, i)), env) {
                Ok(p) => p,
                Err(e) => {
                    acc.err = Some(e);
                    return;
                }
            };
            for (stats, &delta) in acc.per_detuning.iter_mut().zip(detunings) {
                let p = params.with_detuning(delta);
                match propagate_yield(&pulse, &p) {
                    Ok(out) => {
                        stats.push(out.q2_infinity);
                        acc.max_drift = acc.max_drift.max(out.max_conservation_drift);
                    }
                    Err(e) => {
                        acc.err = Some(e);
                        return;
                    }
                }
            }
        },
    );
    if let Some(e) = acc.err {
        return Err(e);
    }
    let half_scan = detunings[0] >= 0.0;
    Ok(LineshapeScan {
        detunings: detunings.to_vec(),
        yields: acc.per_detuning.iter().map(|s| s.mean()).collect(),
        stderrs: acc.per_detuning.iter().map(|s| s.std_err()).collect(),
        metadata: ScanMetadata {
            n_traj,
            master_seed,
            half_scan,
            common_random_numbers: true,
            max_conservation_drift: acc.max_drift,
            params: format!(
                "gamma2={} gamma21={} rabi_peak={} psd={:?} sigma_omega={} captured_mass={:.6}",
                params.gamma2,
                params.gamma21,
                params.rabi_peak,
                psd.family,
                psd.sigma_omega,
                grid.captured_mass(psd)
            ),
        },
    })
}
