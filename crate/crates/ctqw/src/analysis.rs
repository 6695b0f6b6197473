//! Transfer probability, displacement-aligned fidelity, transfer times,
//! long-time peak envelopes, dispersion growth, and power-law fits.
//!
//! Fidelity against a displaced copy of the initial state reduces to a
//! weighted phase sum over the cycle's Fourier modes,
//!
//! ```text
//!     F(t, s) = | Σ_j |c_j|^2 e^{-i(θ_j s + λ_j t)} |^2,    c = F ψ_0,
//! ```
//!
//! so after one transform of the initial state every (t, shift) evaluation
//! costs O(n). Sweeps over thousands of sample times stay cheap, which is
//! what the long-horizon peak tracking and the scaling fits rely on.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{CycleSpec, SpectralBasis, WalkState};
use crate::states::{profile_moments, DistributionSpec};

/// Smallest peak value accepted by the transfer-time scan. Filters the
/// numerically tiny pre-arrival wiggles of the antipodal probability without
/// touching any physical maximum (the smallest first-transfer peak in the
/// supported size range is above 1e-2).
const PEAK_FLOOR: f64 = 1e-4;

/// Default sample count for the delta-state scan over (0, n].
const DELTA_SCAN_SAMPLES: usize = 800;

/// Default sample count for the distributed-state scan over (0, 0.2 n^2].
const DISTRIBUTED_SCAN_SAMPLES: usize = 2000;

/// Relative time accuracy of refined extrema.
const REFINE_REL_TOL: f64 = 1e-9;

/// Precomputed fidelity evaluator for one (cycle, initial state) pair.
pub struct FidelityEvaluator {
    n: usize,
    eigenvalues: Vec<f64>,
    coefficients: Vec<Complex64>,
    weights: Vec<f64>,
}

impl FidelityEvaluator {
    pub fn new(spec: &CycleSpec, initial: &WalkState) -> Result<Self> {
        let basis = spec.basis();
        Self::with_basis(&basis, initial)
    }

    pub fn with_basis(basis: &SpectralBasis, initial: &WalkState) -> Result<Self> {
        if initial.n() != basis.n() {
            return Err(Error::InvalidInput(format!(
                "state has {} amplitudes but the cycle has {} vertices",
                initial.n(),
                basis.n()
            )));
        }
        let coefficients = basis.to_fourier(initial.amplitudes());
        let weights = coefficients.iter().map(|c| c.norm_sqr()).collect();
        Ok(Self {
            n: basis.n(),
            eigenvalues: basis.eigenvalues().to_vec(),
            coefficients,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `F(t, shift) = |<D_shift psi_0 | psi_t>|^2`.
    pub fn fidelity(&self, t: f64, shift: i64) -> f64 {
        let n = self.n as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, (&w, &lambda)) in self.weights.iter().zip(&self.eigenvalues).enumerate() {
            let phase = -(TAU * j as f64 / n * shift as f64 + lambda * t);
            let (s, c) = phase.sin_cos();
            re += w * c;
            im += w * s;
        }
        re * re + im * im
    }

    /// Fidelity on the uniform grid `t = t0 + k dt`, `k = 0..count`, via
    /// per-mode phase stepping (one trig evaluation per mode, not per
    /// sample).
    pub fn fidelity_grid(&self, t0: f64, dt: f64, count: usize, shift: i64) -> Vec<f64> {
        let n = self.n as f64;
        let mut phases: Vec<Complex64> = Vec::with_capacity(self.n);
        let mut steps: Vec<Complex64> = Vec::with_capacity(self.n);
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let start = -(TAU * j as f64 / n * shift as f64 + lambda * t0);
            phases.push(Complex64::from_polar(1.0, start));
            steps.push(Complex64::from_polar(1.0, -lambda * dt));
        }
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut acc = Complex64::ZERO;
            for (phase, &w) in phases.iter().zip(&self.weights) {
                acc += phase * w;
            }
            out.push(acc.norm_sqr());
            for (phase, step) in phases.iter_mut().zip(&steps) {
                *phase *= step;
            }
        }
        out
    }

    /// Amplitude `<vertex|psi_t>` reconstructed from the Fourier
    /// coefficients of the initial state.
    pub fn amplitude_at(&self, vertex: usize, t: f64) -> Result<Complex64> {
        if vertex >= self.n {
            return Err(Error::InvalidInput(format!(
                "vertex {vertex} out of range for n = {}",
                self.n
            )));
        }
        let n = self.n as f64;
        let mut acc = Complex64::ZERO;
        for (j, (&lambda, c)) in self.eigenvalues.iter().zip(&self.coefficients).enumerate() {
            let phase = -(TAU * j as f64 / n * vertex as f64 + lambda * t);
            acc += c * Complex64::from_polar(1.0, phase);
        }
        Ok(acc / n.sqrt())
    }
}

/// Probability at the vertex antipodal to `center` after elapsed time `t`.
pub fn antipodal_probability(
    spec: &CycleSpec,
    initial: &WalkState,
    center: usize,
    t: f64,
) -> Result<f64> {
    let evaluator = FidelityEvaluator::new(spec, initial)?;
    let b = spec.antipodal(center);
    Ok(evaluator.amplitude_at(b, t)?.norm_sqr())
}

/// Fidelity of the evolved state against the initial state displaced by
/// `shift` vertices (mod n).
pub fn fidelity(spec: &CycleSpec, initial: &WalkState, t: f64, shift: i64) -> Result<f64> {
    Ok(FidelityEvaluator::new(spec, initial)?.fidelity(t, shift))
}

/// Displacement from `center` to its antipodal vertex, as a shift argument.
pub fn antipodal_shift(spec: &CycleSpec, center: usize) -> i64 {
    let b = spec.antipodal(center);
    ((b + spec.n() - center) % spec.n()) as i64
}

/// First-transfer peak: time and metric value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferTime {
    pub tau: f64,
    pub value: f64,
}

fn is_one_vertex(state: &WalkState) -> bool {
    state
        .amplitudes()
        .iter()
        .filter(|a| a.norm_sqr() > 1e-24)
        .count()
        == 1
}

/// Locate the transfer time of `initial` (centered at `center`) on the cycle.
///
/// For one-vertex states the metric is the antipodal probability and the
/// result is its first local maximum on `(0, n/γ]`. For distributed states
/// the metric is the fidelity with the antipodal shift and the result is the
/// principal revival peak on `(0, 0.2 n²/γ]` (the window's highest local
/// maximum; interference ripples en route are not transfer events). Peak
/// times are refined to a relative accuracy of 1e-6 or better.
pub fn find_transfer_time(
    spec: &CycleSpec,
    initial: &WalkState,
    center: usize,
) -> Result<TransferTime> {
    find_transfer_time_with(spec, initial, center, None)
}

/// As [`find_transfer_time`] with an explicit coarse-scan sample count.
pub fn find_transfer_time_with(
    spec: &CycleSpec,
    initial: &WalkState,
    center: usize,
    samples: Option<usize>,
) -> Result<TransferTime> {
    if center >= spec.n() {
        return Err(Error::InvalidInput(format!(
            "center {center} out of range for n = {}",
            spec.n()
        )));
    }
    let evaluator = FidelityEvaluator::new(spec, initial)?;
    let shift = antipodal_shift(spec, center);
    let n = spec.n() as f64;
    let metric = |t: f64| evaluator.fidelity(t, shift);
    if is_one_vertex(initial) {
        let horizon = n / spec.gamma();
        let count = samples.unwrap_or(DELTA_SCAN_SAMPLES);
        first_local_max(&evaluator, shift, horizon, count)
            .map(|(lo, hi)| refine_to_peak(&metric, lo, hi))
            .ok_or_else(|| {
                Error::SearchHorizonExceeded(format!(
                    "no local maximum of the antipodal probability on (0, {horizon}]"
                ))
            })
    } else {
        let horizon = 0.2 * n * n / spec.gamma();
        let count = samples.unwrap_or(DISTRIBUTED_SCAN_SAMPLES);
        principal_peak(&evaluator, shift, 0.0, horizon, count)
            .map(|(lo, hi)| refine_to_peak(&metric, lo, hi))
            .ok_or_else(|| {
                Error::SearchHorizonExceeded(format!(
                    "no fidelity peak above {PEAK_FLOOR} on (0, {horizon}]"
                ))
            })
    }
}

/// Scan for the first interior sample that beats both neighbors, returning a
/// bracketing interval.
fn first_local_max(
    evaluator: &FidelityEvaluator,
    shift: i64,
    horizon: f64,
    count: usize,
) -> Option<(f64, f64)> {
    let dt = horizon / count as f64;
    let values = evaluator.fidelity_grid(dt, dt, count, shift);
    for i in 1..count - 1 {
        if values[i] >= values[i - 1] && values[i] >= values[i + 1] && values[i] > PEAK_FLOOR {
            return Some((i as f64 * dt, (i + 2) as f64 * dt));
        }
    }
    None
}

/// Locate the window's dominant peak: coarse scan for the global maximum,
/// dense local rescan, then return a tight bracket around the best sample.
fn principal_peak(
    evaluator: &FidelityEvaluator,
    shift: i64,
    t_lo: f64,
    t_hi: f64,
    count: usize,
) -> Option<(f64, f64)> {
    let dt = (t_hi - t_lo) / count as f64;
    let start = t_lo + dt;
    let values = evaluator.fidelity_grid(start, dt, count, shift);
    let (best, &best_val) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    if best_val <= PEAK_FLOOR {
        return None;
    }
    let t_best = start + best as f64 * dt;
    // dense second pass: the coarse grid may straddle a narrow revival
    let lo = (t_best - 2.0 * dt).max(t_lo + dt * 1e-3);
    let hi = (t_best + 2.0 * dt).min(t_hi);
    let fine = 400usize;
    let fdt = (hi - lo) / fine as f64;
    let fvalues = evaluator.fidelity_grid(lo, fdt, fine + 1, shift);
    let (fb, _) = fvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    let b_lo = lo + fdt * fb.saturating_sub(1) as f64;
    let b_hi = lo + fdt * (fb + 1).min(fine) as f64;
    Some((b_lo, b_hi))
}

/// Golden-section ascent on `[lo, hi]`, finished with one parabolic
/// interpolation through the final three samples.
fn refine_to_peak(metric: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> TransferTime {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = metric(c);
    let mut fd = metric(d);
    for _ in 0..200 {
        if hi - lo < REFINE_REL_TOL * hi.abs().max(1.0) {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = metric(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = metric(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = metric(mid);
    // parabola through (lo, f_lo), (mid, fm), (hi, f_hi)
    let (flo, fhi) = (metric(lo), metric(hi));
    let denom = (lo - mid) * (flo - fhi) - (lo - hi) * (flo - fm);
    let tau = if denom.abs() > 1e-300 {
        let top = (lo - mid).powi(2) * (flo - fhi) - (lo - hi).powi(2) * (flo - fm);
        let cand = lo - 0.5 * top / denom;
        if cand.is_finite() && cand > lo.min(mid) && cand < hi.max(mid) {
            cand
        } else {
            mid
        }
    } else {
        mid
    };
    let ft = metric(tau);
    if ft >= fm {
        TransferTime { tau, value: ft }
    } else {
        TransferTime {
            tau: mid,
            value: fm,
        }
    }
}

/// One refined fidelity maximum found near a multiple of the transfer time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakRecord {
    /// Multiple `m` of tau this window is centered on.
    pub index: usize,
    /// Refined peak time.
    pub time: f64,
    /// Refined peak fidelity.
    pub value: f64,
    /// Searched window `(t_lo, t_hi)`.
    pub window: (f64, f64),
}

/// Track the fidelity peak in each window `[mτ − τ/2, mτ + τ/2]` for
/// `m = 2..=max_multiple`, alternating the displacement: even multiples
/// compare against the state back at the start vertex (shift 0), odd
/// multiples against the antipodal displacement.
///
/// Windows that contain no interior local maximum yield `None`.
pub fn track_peaks(
    spec: &CycleSpec,
    initial: &WalkState,
    center: usize,
    tau: f64,
    max_multiple: usize,
) -> Result<Vec<Option<PeakRecord>>> {
    track_peaks_with(spec, initial, center, tau, max_multiple, 200)
}

/// As [`track_peaks`] with an explicit per-window sample count.
pub fn track_peaks_with(
    spec: &CycleSpec,
    initial: &WalkState,
    center: usize,
    tau: f64,
    max_multiple: usize,
    samples_per_window: usize,
) -> Result<Vec<Option<PeakRecord>>> {
    if max_multiple < 2 {
        return Err(Error::InvalidInput(format!(
            "max_multiple must be at least 2, got {max_multiple}"
        )));
    }
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "tau must be positive, got {tau}"
        )));
    }
    let evaluator = FidelityEvaluator::new(spec, initial)?;
    let shift_odd = antipodal_shift(spec, center);
    let count = samples_per_window.max(8);
    let mut records = Vec::with_capacity(max_multiple - 1);
    for m in 2..=max_multiple {
        let shift = if m % 2 == 0 { 0 } else { shift_odd };
        let t_mid = m as f64 * tau;
        let lo = t_mid - tau / 2.0;
        let hi = t_mid + tau / 2.0;
        let dt = (hi - lo) / count as f64;
        let values = evaluator.fidelity_grid(lo, dt, count + 1, shift);
        // highest interior sample that beats both neighbors
        let mut best: Option<(usize, f64)> = None;
        for i in 1..count {
            if values[i] >= values[i - 1]
                && values[i] >= values[i + 1]
                && best.is_none_or(|(_, v)| values[i] > v)
            {
                best = Some((i, values[i]));
            }
        }
        let record = best.map(|(i, _)| {
            let metric = |t: f64| evaluator.fidelity(t, shift);
            let peak = refine_to_peak(&metric, lo + (i - 1) as f64 * dt, lo + (i + 1) as f64 * dt);
            PeakRecord {
                index: m,
                time: peak.tau,
                value: peak.value,
                window: (lo, hi),
            }
        });
        records.push(record);
    }
    Ok(records)
}

/// Even/odd/all filter for scaling fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    All,
}

impl Parity {
    fn accepts(&self, n: f64) -> bool {
        let k = n.round() as i64;
        match self {
            Parity::Even => k % 2 == 0,
            Parity::Odd => k % 2 != 0,
            Parity::All => true,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::All => "all",
        }
    }
}

/// Least-squares fit of `log y` against `log n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// Sign convention `y ∝ n^{-exponent}`: positive for decaying data.
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub n_range: (f64, f64),
    pub parity: Parity,
}

/// Fit `y = prefactor * n^{-exponent}` by least squares on the log-log
/// points, after filtering by parity of `n`. Needs at least 5 points.
pub fn fit_power_law(points: &[(f64, f64)], parity: Parity) -> Result<PowerLawFit> {
    let filtered: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(n, _)| parity.accepts(n))
        .collect();
    if filtered.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs at least 5 points, got {} after parity filtering",
            filtered.len()
        )));
    }
    if let Some(&(n, y)) = filtered.iter().find(|&&(_, y)| y.is_nan() || y <= 0.0) {
        return Err(Error::InvalidInput(format!(
            "non-positive value y = {y} at n = {n}"
        )));
    }
    let logs: Vec<(f64, f64)> = filtered.iter().map(|&(n, y)| (n.ln(), y.ln())).collect();
    let fit = linear_fit(&logs)?;
    let n_min = filtered.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let n_max = filtered
        .iter()
        .map(|p| p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(PowerLawFit {
        exponent: -fit.slope,
        prefactor: fit.intercept.exp(),
        r_squared: fit.r_squared,
        n_range: (n_min, n_max),
        parity,
    })
}

/// Ordinary least-squares line fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "linear fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::InsufficientData(
            "degenerate abscissae in linear fit".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Sampled fidelity series with its provenance.
#[derive(Debug, Clone)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: TraceMeta,
}

#[derive(Debug, Clone)]
pub struct TraceMeta {
    pub n: usize,
    pub shift: i64,
    pub initial: Option<DistributionSpec>,
}

/// Evaluate the fidelity at strictly increasing sample times.
pub fn fidelity_trace(
    spec: &CycleSpec,
    initial: &WalkState,
    shift: i64,
    times: &[f64],
    initial_spec: Option<&DistributionSpec>,
) -> Result<FidelityTrace> {
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "trace times must be strictly increasing".into(),
        ));
    }
    let evaluator = FidelityEvaluator::new(spec, initial)?;
    let values: Vec<f64> = times
        .iter()
        .map(|&t| evaluator.fidelity(t, shift))
        .collect();
    debug_assert!(values.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
    Ok(FidelityTrace {
        times: times.to_vec(),
        values,
        meta: TraceMeta {
            n: spec.n(),
            shift,
            initial: initial_spec.cloned(),
        },
    })
}

/// Dispersion sample; `sigma` is `None` outside the pre-wrap window or when
/// the profile fails the localization check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSample {
    pub t: f64,
    pub sigma: Option<f64>,
}

/// Unwrapped standard deviation of the evolving profile on a time grid.
///
/// Dispersion is only defined while the packet is clear of the wrap-around:
/// a sample at time `t` requires `sigma_0 + 2 gamma t < n/4`.
pub fn dispersion_growth(
    spec: &CycleSpec,
    initial: &WalkState,
    t_grid: &[f64],
) -> Result<Vec<DispersionSample>> {
    let sigma0 = profile_moments(initial)?.std_dev;
    let basis = spec.basis();
    let bound = spec.n() as f64 / 4.0;
    t_grid
        .iter()
        .map(|&t| {
            if t < 0.0 {
                return Err(Error::InvalidInput(format!("negative sample time {t}")));
            }
            if sigma0 + 2.0 * spec.gamma() * t >= bound {
                return Ok(DispersionSample { t, sigma: None });
            }
            let evolved = basis.evolve(initial, t)?;
            Ok(DispersionSample {
                t,
                sigma: profile_moments(&evolved).ok().map(|m| m.std_dev),
            })
        })
        .collect()
}

/// L1 distance between the half-period probability profile and the balanced
/// mixture of the initial profile at the start vertex and its antipodal
/// displacement.
pub fn half_period_profile_check(
    spec: &CycleSpec,
    initial: &WalkState,
    center: usize,
    tau: f64,
) -> Result<f64> {
    let n = spec.n();
    if center >= n {
        return Err(Error::InvalidInput(format!(
            "center {center} out of range for n = {n}"
        )));
    }
    let shift = antipodal_shift(spec, center) as usize;
    let half = spec.basis().evolve(initial, tau / 2.0)?;
    let p_half = half.probability_profile();
    let p0 = initial.probability_profile();
    let l1 = (0..n)
        .map(|k| {
            let mixture = 0.5 * (p0[k] + p0[(k + n - shift) % n]);
            (p_half[k] - mixture).abs()
        })
        .sum();
    Ok(l1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_state, Family};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn c4_transfer_time_is_half_pi() {
        let spec = CycleSpec::new(4).unwrap();
        let state = WalkState::delta(4, 0).unwrap();
        let found = find_transfer_time(&spec, &state, 0).unwrap();
        assert_abs_diff_eq!(found.tau, FRAC_PI_2, epsilon = 1e-7);
        assert_abs_diff_eq!(found.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn fidelity_is_one_at_zero_time_zero_shift() {
        let spec = CycleSpec::new(30).unwrap();
        let dist = DistributionSpec::new(Family::Gaussian, 30, 5, 2.0).unwrap();
        let state = make_state(&dist);
        assert_abs_diff_eq!(
            fidelity(&spec, &state, 0.0, 0).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn delta_fidelity_reduces_to_antipodal_probability() {
        let spec = CycleSpec::new(9).unwrap();
        let state = WalkState::delta(9, 2).unwrap();
        let shift = antipodal_shift(&spec, 2);
        for i in 0..40 {
            let t = 0.25 * i as f64;
            let f = fidelity(&spec, &state, t, shift).unwrap();
            let p = antipodal_probability(&spec, &state, 2, t).unwrap();
            assert_abs_diff_eq!(f, p, epsilon = 1e-12);
        }
    }

    #[test]
    fn antipodal_probability_starts_at_zero() {
        for n in [3usize, 6, 11] {
            let spec = CycleSpec::new(n).unwrap();
            let state = WalkState::delta(n, 0).unwrap();
            let p = antipodal_probability(&spec, &state, 0, 0.0).unwrap();
            assert_abs_diff_eq!(p, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let spec = CycleSpec::new(60).unwrap();
        let dist = DistributionSpec::new(Family::Gaussian, 60, 0, 3.0).unwrap();
        let evaluator = FidelityEvaluator::new(&spec, &make_state(&dist)).unwrap();
        let grid = evaluator.fidelity_grid(0.5, 0.7, 300, 30);
        for (k, &g) in grid.iter().enumerate() {
            let direct = evaluator.fidelity(0.5 + 0.7 * k as f64, 30);
            assert_abs_diff_eq!(g, direct, epsilon = 1e-11);
        }
    }

    #[test]
    fn c4_peaks_repeat_at_odd_half_pi_multiples() {
        let spec = CycleSpec::new(4).unwrap();
        let state = WalkState::delta(4, 0).unwrap();
        let tau = FRAC_PI_2;
        let records = track_peaks(&spec, &state, 0, tau, 7).unwrap();
        assert_eq!(records.len(), 6);
        let times: Vec<f64> = records.iter().map(|r| r.unwrap().time).collect();
        for r in records.iter().flatten() {
            assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
            assert!(r.window.0 <= r.time && r.time <= r.window.1);
        }
        // odd multiples land on the antipodal returns at 3pi/2, 5pi/2, 7pi/2
        assert_abs_diff_eq!(times[1], 3.0 * FRAC_PI_2, epsilon = 1e-6);
        assert_abs_diff_eq!(times[3], 5.0 * FRAC_PI_2, epsilon = 1e-6);
        assert_abs_diff_eq!(times[5], 7.0 * FRAC_PI_2, epsilon = 1e-6);
        // even multiples land on full periods
        assert_abs_diff_eq!(times[0], PI, epsilon = 1e-6);
        assert_abs_diff_eq!(times[2], 2.0 * PI, epsilon = 1e-6);
    }

    #[test]
    fn power_law_fit_recovers_synthetic_exponent() {
        let points: Vec<(f64, f64)> = (4..40).map(|n| (n as f64, (n as f64).powf(-0.5))).collect();
        let fit = fit_power_law(&points, Parity::All).unwrap();
        assert_abs_diff_eq!(fit.exponent, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.prefactor, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        assert_eq!(fit.n_range, (4.0, 39.0));
    }

    #[test]
    fn power_law_fit_reports_growing_data_with_sign() {
        let points: Vec<(f64, f64)> = (10..20)
            .map(|n| (n as f64, 0.08 * (n as f64).powi(2)))
            .collect();
        let fit = fit_power_law(&points, Parity::All).unwrap();
        assert_abs_diff_eq!(fit.exponent, -2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.prefactor, 0.08, epsilon = 1e-10);
    }

    #[test]
    fn power_law_fit_needs_five_points() {
        let points = vec![(4.0, 1.0), (6.0, 0.5), (8.0, 0.25), (10.0, 0.125)];
        assert!(matches!(
            fit_power_law(&points, Parity::All),
            Err(Error::InsufficientData(_))
        ));
        // parity filtering can push a big set under the limit
        let evens: Vec<(f64, f64)> = (1..20).map(|n| (2.0 * n as f64, 1.0 / n as f64)).collect();
        assert!(matches!(
            fit_power_law(&evens, Parity::Odd),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn linear_fit_is_exact_on_a_line() {
        let points: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 + 0.25 * i as f64)).collect();
        let fit = linear_fit(&points).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dispersion_starts_at_sigma0_and_respects_prewrap() {
        let spec = CycleSpec::new(200).unwrap();
        let dist = DistributionSpec::new(Family::Gaussian, 200, 0, 5.0).unwrap();
        let state = make_state(&dist);
        let samples = dispersion_growth(&spec, &state, &[0.0, 4.0, 1000.0]).unwrap();
        assert_abs_diff_eq!(samples[0].sigma.unwrap(), 5.0, epsilon = 0.05);
        assert!(samples[1].sigma.is_some());
        assert_eq!(samples[2].sigma, None); // far past the pre-wrap bound
    }

    #[test]
    fn trace_requires_increasing_times() {
        let spec = CycleSpec::new(12).unwrap();
        let state = WalkState::delta(12, 0).unwrap();
        assert!(fidelity_trace(&spec, &state, 6, &[0.0, 1.0, 1.0], None).is_err());
        let trace = fidelity_trace(&spec, &state, 6, &[0.0, 0.5, 1.0], None).unwrap();
        assert_eq!(trace.values.len(), 3);
        assert_eq!(trace.meta.n, 12);
    }

    #[test]
    fn full_period_peak_is_high_for_wide_gaussian() {
        // wide packets refocus at the start vertex after a full period
        let spec = CycleSpec::new(200).unwrap();
        let dist = DistributionSpec::new(Family::Gaussian, 200, 0, 10.0).unwrap();
        let state = make_state(&dist);
        let tau = find_transfer_time(&spec, &state, 0).unwrap().tau;
        let second = track_peaks(&spec, &state, 0, tau, 2).unwrap()[0].unwrap();
        assert!(second.value > 0.95, "peak at 2 tau = {}", second.value);
        assert!((second.time - 2.0 * tau).abs() < tau / 2.0);
    }

    #[test]
    fn track_peaks_validates_arguments() {
        let spec = CycleSpec::new(8).unwrap();
        let state = WalkState::delta(8, 0).unwrap();
        assert!(track_peaks(&spec, &state, 0, 1.0, 1).is_err());
        assert!(track_peaks(&spec, &state, 0, 0.0, 4).is_err());
    }
}
