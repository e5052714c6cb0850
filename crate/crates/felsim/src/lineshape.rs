//! Width extraction from sampled symmetric curves, the Voigt-width law, and
//! Voigt-profile fits to lineshape scans.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Detuning scan of the mean resonant-Auger yield.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineshapeScan {
    /// Detunings, sorted ascending (units of `Gamma2`).
    pub detunings: Vec<f64>,
    pub yields: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub metadata: ScanMetadata,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub n_traj: u64,
    pub master_seed: u64,
    /// True when only `detuning >= 0` was scanned and symmetry is assumed.
    pub half_scan: bool,
    /// Pulse reuse across detunings (variance reduction), always on.
    pub common_random_numbers: bool,
    pub max_conservation_drift: f64,
    pub params: String,
}

impl LineshapeScan {
    pub fn validate(&self) -> Result<()> {
        if self.detunings.len() != self.yields.len() || self.yields.len() != self.stderrs.len() {
            return Err(Error::LengthMismatch {
                expected: self.detunings.len(),
                got: self.yields.len().min(self.stderrs.len()),
            });
        }
        if self.detunings.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config {
                field: "detunings".into(),
                message: "must be strictly increasing".into(),
            });
        }
        if self.yields.iter().any(|&y| y < 0.0) {
            return Err(Error::Config {
                field: "yields".into(),
                message: "must be nonnegative".into(),
            });
        }
        Ok(())
    }

    pub fn symmetry(&self) -> ScanSymmetry {
        if self.metadata.half_scan {
            ScanSymmetry::HalfScan
        } else {
            ScanSymmetry::Full
        }
    }

    pub fn fwhm(&self) -> Result<FwhmResult> {
        fwhm(&self.detunings, &self.yields, self.symmetry())
    }

    /// Mirrors a half scan into a full symmetric scan (stderrs copied).
    pub fn mirrored(&self) -> LineshapeScan {
        if !self.metadata.half_scan {
            return self.clone();
        }
        let mut detunings = Vec::new();
        let mut yields = Vec::new();
        let mut stderrs = Vec::new();
        for i in (0..self.detunings.len()).rev() {
            if self.detunings[i] > 0.0 {
                detunings.push(-self.detunings[i]);
                yields.push(self.yields[i]);
                stderrs.push(self.stderrs[i]);
            }
        }
        detunings.extend_from_slice(&self.detunings);
        yields.extend_from_slice(&self.yields);
        stderrs.extend_from_slice(&self.stderrs);
        let mut metadata = self.metadata.clone();
        metadata.half_scan = false;
        LineshapeScan { detunings, yields, stderrs, metadata }
    }
}

/// How a sampled curve covers the peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanSymmetry {
    /// The whole peak is sampled.
    Full,
    /// Only `x >= 0` is sampled and the curve is symmetric about 0.
    HalfScan,
}

#[derive(Debug, Clone, Copy)]
pub struct FwhmResult {
    pub width: f64,
    pub left_crossing: f64,
    pub right_crossing: f64,
    /// Noise produced more than one half-max crossing per side; the
    /// outermost ones were used.
    pub multiple_crossings: bool,
}

/// FWHM of a sampled curve by linear interpolation of the half-maximum
/// crossings.
///
/// For half scans the peak must sit at the first sample and the width is
/// twice the right crossing.
pub fn fwhm(xs: &[f64], ys: &[f64], symmetry: ScanSymmetry) -> Result<FwhmResult> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 3 {
        return Err(Error::RangeTooNarrow("need at least 3 samples".into()));
    }
    let (peak_idx, &peak) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    if peak <= 0.0 {
        return Err(Error::NoInteriorMaximum);
    }
    match symmetry {
        ScanSymmetry::Full => {
            if peak_idx == 0 || peak_idx == ys.len() - 1 {
                return Err(Error::NoInteriorMaximum);
            }
        }
        ScanSymmetry::HalfScan => {
            // symmetric peak at x = 0; tolerate the maximum landing a few
            // noisy samples in
            if peak_idx > ys.len() / 4 {
                return Err(Error::NoInteriorMaximum);
            }
        }
    }
    width_at_level(xs, ys, peak_idx, peak / 2.0, symmetry)
}

/// Width of the curve at an externally supplied level (e.g. half of a peak
/// estimated by a method more robust than the raw maximum).
pub fn half_level_width(xs: &[f64], ys: &[f64], level: f64) -> Result<FwhmResult> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    let (peak_idx, _) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::RangeTooNarrow("empty curve".into()))?;
    width_at_level(xs, ys, peak_idx, level, ScanSymmetry::Full)
}

fn width_at_level(
    xs: &[f64],
    ys: &[f64],
    peak_idx: usize,
    half: f64,
    symmetry: ScanSymmetry,
) -> Result<FwhmResult> {
    let cross_at = |i: usize| -> f64 {
        // linear interpolation of the half-max crossing in [x_i, x_{i+1}]
        let (x0, x1, y0, y1) = (xs[i], xs[i + 1], ys[i], ys[i + 1]);
        if (y1 - y0).abs() < f64::MIN_POSITIVE {
            0.5 * (x0 + x1)
        } else {
            x0 + (half - y0) * (x1 - x0) / (y1 - y0)
        }
    };
    // outermost falling crossing on the right of the peak
    let mut right = None;
    let mut right_count = 0usize;
    for i in peak_idx..xs.len() - 1 {
        if ys[i] >= half && ys[i + 1] < half {
            right = Some(cross_at(i));
            right_count += 1;
        }
    }
    let Some(right_crossing) = right else {
        return Err(Error::RangeTooNarrow(format!(
            "right half-max not crossed below x = {:.4}",
            xs[xs.len() - 1]
        )));
    };
    let (left_crossing, left_count) = match symmetry {
        ScanSymmetry::HalfScan => (-right_crossing, 1),
        ScanSymmetry::Full => {
            let mut left = None;
            let mut count = 0usize;
            for i in (0..peak_idx).rev() {
                if ys[i + 1] >= half && ys[i] < half {
                    left = Some(cross_at(i));
                    count += 1;
                }
            }
            match left {
                Some(x) => (x, count),
                None => {
                    return Err(Error::RangeTooNarrow(format!(
                        "left half-max not crossed above x = {:.4}",
                        xs[0]
                    )))
                }
            }
        }
    };
    Ok(FwhmResult {
        width: right_crossing - left_crossing,
        left_crossing,
        right_crossing,
        multiple_crossings: right_count > 1 || left_count > 1,
    })
}

/// Approximate FWHM of a Voigt profile combining a Lorentzian of FWHM
/// `gamma2` with a Gaussian of FWHM `delta_omega_s`:
/// `gamma2 (0.5346 + sqrt(0.2166 + (delta_omega_s/gamma2)^2))`.
pub fn voigt_width(gamma2: f64, delta_omega_s: f64) -> f64 {
    let r = delta_omega_s / gamma2;
    gamma2 * (0.5346 + (0.2166 + r * r).sqrt())
}

fn lorentzian_pdf(x: f64, fwhm: f64) -> f64 {
    let hwhm = fwhm / 2.0;
    hwhm / (std::f64::consts::PI * (x * x + hwhm * hwhm))
}

fn gaussian_pdf(x: f64, fwhm: f64) -> f64 {
    let sigma = fwhm / (2.0 * (2.0 * (2.0f64).ln()).sqrt());
    (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (std::f64::consts::TAU).sqrt())
}

/// Unit-area Voigt profile by direct numerical convolution of a unit-area
/// Lorentzian (FWHM `gamma_lorentz`) with a unit-area Gaussian (FWHM
/// `fwhm_gauss`), evaluated at each point of `delta`.
///
/// Degenerate width ratios beyond 1e3 collapse to the pure component (the
/// other factor acts as a delta function at that scale).
pub fn voigt_profile(gamma_lorentz: f64, fwhm_gauss: f64, delta: &[f64]) -> Result<Vec<f64>> {
    if gamma_lorentz.is_nan() || gamma_lorentz <= 0.0 || fwhm_gauss.is_nan() || fwhm_gauss < 0.0 {
        return Err(Error::Config {
            field: "widths".into(),
            message: format!("need gamma_lorentz > 0 and fwhm_gauss >= 0, got {gamma_lorentz}, {fwhm_gauss}"),
        });
    }
    if fwhm_gauss < 1e-3 * gamma_lorentz {
        return Ok(delta.iter().map(|&x| lorentzian_pdf(x, gamma_lorentz)).collect());
    }
    if gamma_lorentz < 1e-3 * fwhm_gauss {
        return Ok(delta.iter().map(|&x| gaussian_pdf(x, fwhm_gauss)).collect());
    }
    // convolution grid 20x finer than the smaller width
    let step = gamma_lorentz.min(fwhm_gauss) / 20.0;
    if let Some(spacing) = min_spacing(delta) {
        // the caller's grid must resolve the narrower component
        let limit = gamma_lorentz.min(fwhm_gauss) * 10.0;
        if spacing > limit {
            return Err(Error::GridTooCoarse { spacing, limit });
        }
    }
    let sigma_equivalent = fwhm_gauss / (2.0 * (2.0 * (2.0f64).ln()).sqrt());
    let half_range = 8.0 * sigma_equivalent;
    let n = (2.0 * half_range / step).ceil() as usize;
    let out = delta
        .iter()
        .map(|&x| {
            let mut sum = 0.0;
            for j in 0..=n {
                let u = -half_range + j as f64 * (2.0 * half_range) / n as f64;
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                sum += w * lorentzian_pdf(x - u, gamma_lorentz) * gaussian_pdf(u, fwhm_gauss);
            }
            sum * (2.0 * half_range) / n as f64
        })
        .collect();
    Ok(out)
}

fn min_spacing(xs: &[f64]) -> Option<f64> {
    xs.windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .filter(|&d| d > 0.0)
        .min_by(f64::total_cmp)
}

/// Result of a Voigt fit to a lineshape scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VoigtFit {
    /// Fixed Lorentzian component (the natural linewidth).
    pub gamma_lorentz: f64,
    /// Fitted Gaussian FWHM.
    pub fwhm_gauss: f64,
    /// Total Voigt FWHM of the fit.
    pub gamma_voigt: f64,
    pub amplitude: f64,
    /// Weighted sum of squared residuals at the optimum.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Weighted least-squares fit of `amplitude * voigt(gamma2, fwhm_gauss)` to a
/// scan, with the Lorentzian component fixed at `gamma2` and the Gaussian
/// component free. Weights are `1/stderr^2` where stderrs are available.
pub fn fit_voigt(scan: &LineshapeScan, gamma2: f64) -> Result<VoigtFit> {
    scan.validate()?;
    let full = scan.mirrored();
    if full.detunings.len() < 8 {
        return Err(Error::InsufficientSamples {
            needed: 8,
            have: full.detunings.len(),
        });
    }
    let weights: Vec<f64> = full
        .stderrs
        .iter()
        .map(|&s| if s > 0.0 { 1.0 / (s * s) } else { 1.0 })
        .collect();
    let xs = full.detunings.clone();
    let ys = full.yields.clone();

    // initial Gaussian width from the observed FWHM via the inverted width law
    let observed = fwhm(&xs, &ys, ScanSymmetry::Full)?;
    let w = observed.width / gamma2;
    let g0 = ((w - 0.5346).powi(2) - 0.2166).max(1e-4).sqrt() * gamma2;

    let objective = |p: &[f64]| -> f64 {
        let (amp, fg) = (p[0], p[1]);
        if amp <= 0.0 || fg < 0.0 {
            return f64::INFINITY;
        }
        let model = match voigt_profile(gamma2, fg, &xs) {
            Ok(m) => m,
            Err(_) => return f64::INFINITY,
        };
        model
            .iter()
            .zip(&ys)
            .zip(&weights)
            .map(|((m, y), w)| w * (amp * m - y).powi(2))
            .sum()
    };
    let peak = ys.iter().cloned().fold(0.0f64, f64::max);
    let amp0 = peak / lorentzian_pdf(0.0, voigt_width(gamma2, g0));
    let (best, residual, iterations, converged) =
        nelder_mead(&objective, &[amp0, g0], &[0.3 * amp0, 0.5 * g0.max(0.05 * gamma2)], 400, 1e-10);
    if !converged && residual.is_infinite() {
        return Err(Error::FitNonConvergence { iterations, residual });
    }
    let fwhm_gauss = best[1].max(0.0);
    Ok(VoigtFit {
        gamma_lorentz: gamma2,
        fwhm_gauss,
        gamma_voigt: voigt_width(gamma2, fwhm_gauss),
        amplitude: best[0],
        residual,
        iterations,
        converged,
    })
}

/// Plain Nelder-Mead over `f`, returning (best point, best value,
/// iterations, converged).
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    spread: &[f64],
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64, usize, bool) {
    let dim = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), f(start)));
    for d in 0..dim {
        let mut p = start.to_vec();
        p[d] += spread[d];
        let v = f(&p);
        simplex.push((p, v));
    }
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= tol * (best.abs() + tol) {
            return (simplex[0].0.clone(), best, iterations, true);
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|d| simplex[..dim].iter().map(|(p, _)| p[d]).sum::<f64>() / dim as f64)
            .collect();
        let point = |coef: f64| -> Vec<f64> {
            (0..dim)
                .map(|d| centroid[d] + coef * (centroid[d] - simplex[dim].0[d]))
                .collect()
        };
        let refl = point(1.0);
        let f_refl = f(&refl);
        if f_refl < simplex[0].1 {
            let exp = point(2.0);
            let f_exp = f(&exp);
            simplex[dim] = if f_exp < f_refl { (exp, f_exp) } else { (refl, f_refl) };
        } else if f_refl < simplex[dim - 1].1 {
            simplex[dim] = (refl, f_refl);
        } else {
            let con = point(-0.5);
            let f_con = f(&con);
            if f_con < simplex[dim].1 {
                simplex[dim] = (con, f_con);
            } else {
                // shrink toward the best vertex
                let best_p = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (x, &b) in entry.0.iter_mut().zip(&best_p) {
                        *x = b + 0.5 * (*x - b);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0.clone(), simplex[0].1, iterations, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let xs: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        (xs, ys)
    }

    #[test]
    fn fwhm_of_exact_lorentzian() {
        let gamma = 1.03;
        // odd count keeps the true peak on a sample, isolating the
        // crossing-interpolation error
        for points_per_unit in [50usize, 10] {
            let n = 16 * points_per_unit + 1;
            let (xs, ys) = sample(|x| lorentzian_pdf(x, gamma), -8.0, 8.0, n);
            let r = fwhm(&xs, &ys, ScanSymmetry::Full).unwrap();
            assert!(
                (r.width - gamma).abs() / gamma < 0.005,
                "{points_per_unit} pts: width {} vs {gamma}",
                r.width
            );
            assert!(!r.multiple_crossings);
        }
    }

    #[test]
    fn fwhm_of_exact_gaussian() {
        let (xs, ys) = sample(|x| gaussian_pdf(x, 2.0), -6.0, 6.0, 240);
        let r = fwhm(&xs, &ys, ScanSymmetry::Full).unwrap();
        assert!((r.width - 2.0).abs() / 2.0 < 0.005, "width {}", r.width);
    }

    #[test]
    fn fwhm_half_scan_doubles_right_crossing() {
        let (xs, ys) = sample(|x| lorentzian_pdf(x, 2.0), 0.0, 8.0, 200);
        let r = fwhm(&xs, &ys, ScanSymmetry::HalfScan).unwrap();
        assert_relative_eq!(r.width, 2.0, max_relative = 0.005);
        assert_relative_eq!(r.left_crossing, -r.right_crossing);
    }

    #[test]
    fn fwhm_scale_invariance() {
        let (xs, ys) = sample(|x| gaussian_pdf(x, 1.7), -5.0, 5.0, 101);
        let scaled: Vec<f64> = ys.iter().map(|y| 137.0 * y).collect();
        let a = fwhm(&xs, &ys, ScanSymmetry::Full).unwrap().width;
        let b = fwhm(&xs, &scaled, ScanSymmetry::Full).unwrap().width;
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn fwhm_errors() {
        // range too narrow: no half-max crossing
        let (xs, ys) = sample(|x| lorentzian_pdf(x, 10.0), -2.0, 2.0, 41);
        assert!(matches!(
            fwhm(&xs, &ys, ScanSymmetry::Full),
            Err(Error::RangeTooNarrow(_))
        ));
        // monotone curve: maximum at the edge
        let (xs, ys) = sample(|x| x, 0.0, 1.0, 20);
        assert!(matches!(
            fwhm(&xs, &ys, ScanSymmetry::Full),
            Err(Error::NoInteriorMaximum)
        ));
    }

    #[test]
    fn fwhm_flags_noise_crossings() {
        let (xs, mut ys) = sample(|x| gaussian_pdf(x, 2.0), -6.0, 6.0, 120);
        // dip one sample well inside the half-max region below half
        let peak = ys.iter().cloned().fold(0.0f64, f64::max);
        let idx = xs.iter().position(|&x| x > 0.45).unwrap();
        ys[idx] = 0.49 * peak;
        let r = fwhm(&xs, &ys, ScanSymmetry::Full).unwrap();
        assert!(r.multiple_crossings);
        // outermost crossings are used: width matches the clean curve
        assert!((r.width - 2.0).abs() / 2.0 < 0.02, "width {}", r.width);
    }

    #[test]
    fn voigt_width_reference_values() {
        assert!((voigt_width(1.0, 0.0) - 1.0).abs() < 1e-4);
        assert_relative_eq!(voigt_width(1.0, 0.7248), 1.39596, max_relative = 1e-4);
        assert_relative_eq!(voigt_width(1.0, 100.0), 100.0, max_relative = 0.01);
        // monotone in both arguments
        assert!(voigt_width(1.0, 2.0) < voigt_width(1.0, 2.5));
        assert!(voigt_width(1.0, 2.0) < voigt_width(1.2, 2.0));
    }

    #[test]
    fn voigt_profile_limits() {
        let xs: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.1).collect();
        let narrow_gauss = voigt_profile(1.0, 1e-6, &xs).unwrap();
        for (v, &x) in narrow_gauss.iter().zip(&xs) {
            assert!((v - lorentzian_pdf(x, 1.0)).abs() < 1e-3);
        }
        let narrow_lorentz = voigt_profile(1e-6, 1.0, &xs).unwrap();
        for (v, &x) in narrow_lorentz.iter().zip(&xs) {
            assert!((v - gaussian_pdf(x, 1.0)).abs() < 1e-3);
        }
    }

    #[test]
    fn voigt_profile_width_matches_formula() {
        for ratio in [0.1, 0.3, 1.0, 3.0, 10.0] {
            let expected = voigt_width(1.0, ratio);
            let half_range = 4.0 * expected;
            let n = 1601;
            let xs: Vec<f64> = (0..n)
                .map(|i| -half_range + 2.0 * half_range * i as f64 / (n - 1) as f64)
                .collect();
            let ys = voigt_profile(1.0, ratio, &xs).unwrap();
            let measured = fwhm(&xs, &ys, ScanSymmetry::Full).unwrap().width;
            assert!(
                (measured - expected).abs() / expected < 0.02,
                "ratio {ratio}: {measured} vs {expected}"
            );
        }
    }

    #[test]
    fn voigt_profile_rejects_coarse_grid() {
        let xs = [-30.0, 0.0, 30.0];
        assert!(matches!(
            voigt_profile(1.0, 1.0, &xs),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    fn synthetic_scan(gamma2: f64, fwhm_gauss: f64, amp: f64, noise: f64) -> LineshapeScan {
        let w = voigt_width(gamma2, fwhm_gauss);
        let n = 25;
        let detunings: Vec<f64> = (0..n).map(|i| 1.6 * w * i as f64 / (n - 1) as f64).collect();
        let profile = voigt_profile(gamma2, fwhm_gauss, &detunings).unwrap();
        // deterministic low-amplitude perturbation standing in for noise
        let yields: Vec<f64> = profile
            .iter()
            .enumerate()
            .map(|(i, &p)| amp * p * (1.0 + noise * ((i * 37 % 11) as f64 / 11.0 - 0.5)))
            .collect();
        let stderrs = vec![amp * profile[0] * noise.max(1e-4); n];
        LineshapeScan {
            detunings,
            yields,
            stderrs,
            metadata: ScanMetadata { half_scan: true, ..Default::default() },
        }
    }

    #[test]
    fn fit_voigt_recovers_exact_widths() {
        let scan = synthetic_scan(1.0, 0.8, 2.5, 0.0);
        let fit = fit_voigt(&scan, 1.0).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.fwhm_gauss, 0.8, max_relative = 0.01);
        assert_relative_eq!(fit.amplitude, 2.5, max_relative = 0.01);
        assert_relative_eq!(fit.gamma_voigt, voigt_width(1.0, 0.8), max_relative = 0.01);
    }

    #[test]
    fn fit_voigt_on_pure_lorentzian_drives_gauss_to_zero() {
        let n = 31;
        let detunings: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 / (n - 1) as f64).collect();
        let yields: Vec<f64> = detunings.iter().map(|&x| lorentzian_pdf(x, 1.0)).collect();
        let scan = LineshapeScan {
            detunings,
            stderrs: vec![1e-4; n],
            yields,
            metadata: ScanMetadata { half_scan: true, ..Default::default() },
        };
        let fit = fit_voigt(&scan, 1.0).unwrap();
        assert!(fit.fwhm_gauss < 0.05, "gauss component {}", fit.fwhm_gauss);
        assert!((fit.gamma_voigt - 1.0).abs() < 0.02);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn fwhm_is_scale_invariant(scale in 1e-6f64..1e6, width in 0.2f64..5.0) {
            let (xs, ys) = sample(|x| gaussian_pdf(x, width), -4.0 * width, 4.0 * width, 101);
            let scaled: Vec<f64> = ys.iter().map(|y| scale * y).collect();
            let a = fwhm(&xs, &ys, ScanSymmetry::Full).unwrap().width;
            let b = fwhm(&xs, &scaled, ScanSymmetry::Full).unwrap().width;
            proptest::prop_assert!((a - b).abs() <= 1e-9 * a);
        }

        #[test]
        fn voigt_width_is_monotone(
            g2 in 0.1f64..5.0,
            dw in 0.0f64..20.0,
            bump in 1e-3f64..2.0,
        ) {
            proptest::prop_assert!(voigt_width(g2, dw + bump) > voigt_width(g2, dw));
            proptest::prop_assert!(voigt_width(g2 + bump, dw) > voigt_width(g2, dw));
        }
    }

    #[test]
    fn scan_validation() {
        let mut scan = synthetic_scan(1.0, 0.5, 1.0, 0.0);
        scan.validate().unwrap();
        scan.yields[3] = -1e-3;
        assert!(scan.validate().is_err());
        let mirrored = synthetic_scan(1.0, 0.5, 1.0, 0.0).mirrored();
        mirrored.validate().unwrap();
        assert_eq!(mirrored.detunings.len(), 2 * scan.detunings.len() - 1);
    }
}
