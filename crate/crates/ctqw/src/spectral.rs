//! Exact spectral time evolution on the cycle graph `C_n`.
//!
//! The adjacency matrix of a cycle is circulant, so it is diagonalized by the
//! discrete Fourier basis `F_jk = ω^{jk}/√n` with `ω = e^{2πi/n}` and has
//! eigenvalues `λ_j = 2γ cos(2πj/n)`. Evolution for an arbitrary elapsed time
//! is a single phase rotation in Fourier space,
//!
//! ```text
//!     ψ_t = F† · diag(e^{-iλ_j t}) · F · ψ_0,
//! ```
//!
//! which is exact in `t`: there is no step-integration error to accumulate
//! over long sweeps. Transforms go through an FFT plan; a direct O(n²)
//! matrix transform is kept as an internal cross-check.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Norm defect tolerated when accepting externally supplied amplitudes.
const NORM_TOL: f64 = 1e-9;

/// Cycle graph parameters: vertex count and hopping rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSpec {
    n: usize,
    gamma: f64,
}

impl CycleSpec {
    /// Cycle with `n >= 3` vertices and unit hopping rate.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_gamma(n, 1.0)
    }

    /// Cycle with an explicit hopping rate `gamma > 0`.
    pub fn with_gamma(n: usize, gamma: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!("cycle needs n >= 3, got {n}")));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "hopping rate must be positive, got {gamma}"
            )));
        }
        Ok(Self { n, gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Vertex farthest along the cycle from `a`: `(a + (n - n mod 2)/2) mod n`.
    pub fn antipodal(&self, a: usize) -> usize {
        (a + (self.n - self.n % 2) / 2) % self.n
    }

    /// Build the Fourier basis and eigenvalue table for this cycle.
    pub fn basis(&self) -> SpectralBasis {
        SpectralBasis::new(self)
    }
}

/// Position-space amplitudes of a walker at a given time.
///
/// Index `k` labels a vertex in `{0, .., n-1}`; vertex arithmetic is mod `n`.
/// The amplitude vector is unit norm (enforced on construction, preserved by
/// evolution).
#[derive(Debug, Clone)]
pub struct WalkState {
    amplitudes: Vec<Complex64>,
    time: f64,
}

impl WalkState {
    /// Wrap an amplitude vector, checking normalization.
    pub fn new(amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "state needs at least 3 amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "amplitudes not normalized: |psi|^2 = {norm_sq}"
            )));
        }
        Ok(Self { amplitudes, time })
    }

    /// One-vertex basis state `|vertex>` at time 0.
    pub fn delta(n: usize, vertex: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!("cycle needs n >= 3, got {n}")));
        }
        if vertex >= n {
            return Err(Error::InvalidInput(format!(
                "vertex {vertex} out of range for n = {n}"
            )));
        }
        let mut amplitudes = vec![Complex64::ZERO; n];
        amplitudes[vertex] = Complex64::ONE;
        Ok(Self {
            amplitudes,
            time: 0.0,
        })
    }

    pub(crate) fn from_parts(amplitudes: Vec<Complex64>, time: f64) -> Self {
        Self { amplitudes, time }
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude `<vertex|psi>`; errors on an out-of-range vertex.
    pub fn amplitude_at(&self, vertex: usize) -> Result<Complex64> {
        self.amplitudes.get(vertex).copied().ok_or_else(|| {
            Error::InvalidInput(format!("vertex {vertex} out of range for n = {}", self.n()))
        })
    }

    /// Per-vertex probabilities `|psi_k|^2`.
    pub fn probability_profile(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// l2 norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Fourier eigenbasis of the cycle adjacency matrix.
///
/// Holds the eigenvalue table `λ_j = 2γ cos(2πj/n)` and FFT plans for the
/// forward (`F`) and inverse (`F†`) transforms in the `ω^{+jk}/√n` convention.
pub struct SpectralBasis {
    n: usize,
    gamma: f64,
    eigenvalues: Vec<f64>,
    plan_fwd: Arc<dyn Fft<f64>>,
    plan_inv: Arc<dyn Fft<f64>>,
}

impl SpectralBasis {
    pub fn new(spec: &CycleSpec) -> Self {
        let n = spec.n;
        let eigenvalues = (0..n)
            .map(|j| 2.0 * spec.gamma * (TAU * j as f64 / n as f64).cos())
            .collect();
        let mut planner = FftPlanner::new();
        // F uses ω^{+jk}, which is the *inverse* plan in FFT sign convention.
        let plan_fwd = planner.plan_fft_inverse(n);
        let plan_inv = planner.plan_fft_forward(n);
        Self {
            n,
            gamma: spec.gamma,
            eigenvalues,
            plan_fwd,
            plan_inv,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Eigenvalues `λ_j = 2γ cos(2πj/n)`, `j = 0..n-1`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Forward transform: `c_j = (1/√n) Σ_k ω^{jk} ψ_k`.
    pub fn to_fourier(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        let mut buf = amplitudes.to_vec();
        self.plan_fwd.process(&mut buf);
        let scale = 1.0 / (self.n as f64).sqrt();
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Inverse transform: `ψ_k = (1/√n) Σ_j ω^{-jk} c_j`.
    pub fn from_fourier(&self, coefficients: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coefficients.to_vec();
        self.plan_inv.process(&mut buf);
        let scale = 1.0 / (self.n as f64).sqrt();
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Apply `F† diag(e^{-iλ_j t}) F` to the state. Exact for any `t`;
    /// negative `t` evolves backwards.
    pub fn evolve(&self, state: &WalkState, t: f64) -> Result<WalkState> {
        if state.n() != self.n {
            return Err(Error::InvalidInput(format!(
                "state has {} amplitudes but the cycle has {} vertices",
                state.n(),
                self.n
            )));
        }
        let mut coeffs = self.to_fourier(state.amplitudes());
        for (c, &lambda) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -lambda * t);
        }
        let amplitudes = self.from_fourier(&coeffs);
        Ok(WalkState::from_parts(amplitudes, state.time + t))
    }

    /// Direct O(n²) forward transform; cross-checks the FFT path.
    #[cfg(test)]
    pub(crate) fn to_fourier_direct(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let scale = 1.0 / (n as f64).sqrt();
        (0..n)
            .map(|j| {
                let mut acc = Complex64::ZERO;
                for (k, amp) in amplitudes.iter().enumerate() {
                    let phase = TAU * ((j * k) % n) as f64 / n as f64;
                    acc += amp * Complex64::from_polar(1.0, phase);
                }
                acc * scale
            })
            .collect()
    }
}

/// Evolve `initial` on the cycle for an elapsed time `t`.
pub fn evolve_cycle(spec: &CycleSpec, initial: &WalkState, t: f64) -> Result<WalkState> {
    spec.basis().evolve(initial, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn antipodal_prob(n: usize, t: f64) -> f64 {
        let spec = CycleSpec::new(n).unwrap();
        let state = WalkState::delta(n, 0).unwrap();
        let evolved = evolve_cycle(&spec, &state, t).unwrap();
        evolved.amplitude_at(spec.antipodal(0)).unwrap().norm_sqr()
    }

    #[test]
    fn antipodal_map_matches_small_cycles() {
        // b = (n - n mod 2)/2 for a = 0
        for (n, b) in [(4, 2), (5, 2), (6, 3), (7, 3), (8, 4), (9, 4)] {
            assert_eq!(CycleSpec::new(n).unwrap().antipodal(0), b);
        }
        assert_eq!(CycleSpec::new(6).unwrap().antipodal(4), 1);
    }

    #[test]
    fn c4_closed_form() {
        for i in 0..1000 {
            let t = 10.0 * i as f64 / 999.0;
            assert_abs_diff_eq!(antipodal_prob(4, t), t.sin().powi(4), epsilon = 1e-9);
        }
    }

    #[test]
    fn c6_closed_form() {
        for i in 0..1000 {
            let t = 10.0 * i as f64 / 999.0;
            let expect = 16.0 / 9.0 * (t / 2.0).sin().powi(4) * t.sin().powi(2);
            assert_abs_diff_eq!(antipodal_prob(6, t), expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn c8_closed_form() {
        for i in 0..1000 {
            let t = 10.0 * i as f64 / 999.0;
            let expect = (1.0 + (2.0 * t).cos() - 2.0 * (2f64.sqrt() * t).cos()).powi(2) / 16.0;
            assert_abs_diff_eq!(antipodal_prob(8, t), expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn c6_value_at_unit_time() {
        // (16/9) sin^4(1/2) sin^2(1)
        assert_abs_diff_eq!(
            antipodal_prob(6, 1.0),
            0.066502875398768_92,
            epsilon = 1e-12
        );
    }

    #[test]
    fn c4_perfect_transfer_at_half_pi() {
        let p = antipodal_prob(4, std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn c4_quarter_pi_probability() {
        // P_2(t) = sin^4 t, so at t = pi/4 the value is 1/4.
        let p = antipodal_prob(4, std::f64::consts::FRAC_PI_4);
        assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn zero_time_is_identity() {
        let spec = CycleSpec::new(11).unwrap();
        let state = WalkState::delta(11, 4).unwrap();
        let evolved = evolve_cycle(&spec, &state, 0.0).unwrap();
        for (a, b) in evolved.amplitudes().iter().zip(state.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn gamma_rescales_time() {
        let fast = CycleSpec::with_gamma(10, 2.0).unwrap();
        let slow = CycleSpec::new(10).unwrap();
        let state = WalkState::delta(10, 0).unwrap();
        let a = evolve_cycle(&fast, &state, 0.7).unwrap();
        let b = evolve_cycle(&slow, &state, 1.4).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn evolution_composes_and_reverses() {
        let spec = CycleSpec::new(17).unwrap();
        let state = WalkState::delta(17, 3).unwrap();
        let one = evolve_cycle(&spec, &evolve_cycle(&spec, &state, 1.3).unwrap(), 2.4).unwrap();
        let two = evolve_cycle(&spec, &state, 3.7).unwrap();
        for (x, y) in one.amplitudes().iter().zip(two.amplitudes()) {
            assert!((x - y).norm() < 1e-10);
        }
        let back = evolve_cycle(&spec, &two, -3.7).unwrap();
        for (x, y) in back.amplitudes().iter().zip(state.amplitudes()) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn spectrum_is_symmetric() {
        for n in [5, 8, 13, 200] {
            let basis = CycleSpec::new(n).unwrap().basis();
            let lambda = basis.eigenvalues();
            for j in 1..n {
                assert_abs_diff_eq!(lambda[j], lambda[n - j], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn fft_agrees_with_direct_transform() {
        for n in [7, 16, 23, 125] {
            let basis = CycleSpec::new(n).unwrap().basis();
            let amps: Vec<Complex64> = {
                let raw: Vec<Complex64> = (0..n)
                    .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
                    .collect();
                let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                raw.into_iter().map(|a| a / norm).collect()
            };
            let fast = basis.to_fourier(&amps);
            let direct = basis.to_fourier_direct(&amps);
            for (a, b) in fast.iter().zip(&direct) {
                assert!((a - b).norm() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn round_trip_transform_is_identity() {
        let basis = CycleSpec::new(31).unwrap().basis();
        let state = WalkState::delta(31, 12).unwrap();
        let back = basis.from_fourier(&basis.to_fourier(state.amplitudes()));
        for (a, b) in back.iter().zip(state.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let spec = CycleSpec::new(8).unwrap();
        let state = WalkState::delta(9, 0).unwrap();
        assert!(matches!(
            evolve_cycle(&spec, &state, 1.0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CycleSpec::new(2).is_err());
        assert!(CycleSpec::with_gamma(5, 0.0).is_err());
        assert!(CycleSpec::with_gamma(5, -1.0).is_err());
        assert!(WalkState::delta(5, 5).is_err());
        assert!(WalkState::new(vec![Complex64::ONE; 4], 0.0).is_err());
    }

    #[test]
    fn amplitude_out_of_range_errors() {
        let state = WalkState::delta(6, 0).unwrap();
        assert!(state.amplitude_at(6).is_err());
        assert_eq!(state.amplitude_at(0).unwrap(), Complex64::ONE);
        assert_eq!(state.amplitude_at(1).unwrap(), Complex64::ZERO);
    }
}
