//! The acceptance checklist: twelve numbered checks covering closed-form
//! oracles, scaling fits, transfer quality, long-horizon storage, the
//! independent fidelity oracle, dispersion, the switching protocol, and
//! cross-backend agreement.
//!
//! Each check returns a [`CriterionReport`] instead of panicking, so the
//! same code backs both the `acceptance` integration-test target and the
//! CLI `verify` subcommand.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::analysis::{
    antipodal_shift, dispersion_growth, fidelity, find_transfer_time, half_period_profile_check,
    linear_fit, FidelityEvaluator,
};
use crate::error::Result;
use crate::experiments::{
    fig2_sweep, fig4a_peaks, fig4b_sweep, fig5_compare, quadratic_prefactor, Fig5Row,
};
use crate::graph::{evolve_general, GraphTopology};
use crate::spectral::{evolve_cycle, CycleSpec, WalkState};
use crate::states::{make_state, DistributionSpec, Family};
use crate::switching::plan_fig6_protocol;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CriterionReport {
    /// One-line `PASS`/`FAIL` summary.
    pub fn summary(&self) -> String {
        format!(
            "{} {:2} {} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.details
        )
    }
}

struct Checks {
    passed: bool,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            passed: true,
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        if !ok {
            self.passed = false;
            self.notes.push(format!("FAILED: {note}"));
        } else {
            self.notes.push(note);
        }
    }

    fn finish(self, id: usize, name: &'static str) -> CriterionReport {
        CriterionReport {
            id,
            name,
            passed: self.passed,
            details: self.notes.join("; "),
        }
    }
}

fn guard(id: usize, name: &'static str, body: impl FnOnce() -> Result<Checks>) -> CriterionReport {
    match body() {
        Ok(checks) => checks.finish(id, name),
        Err(e) => CriterionReport {
            id,
            name,
            passed: false,
            details: format!("errored: {e}"),
        },
    }
}

type ClosedForm = fn(f64) -> f64;

/// Closed-form antipodal probabilities on the three smallest even cycles.
pub fn criterion_1() -> CriterionReport {
    guard(
        1,
        "closed-form antipodal probabilities (C4, C6, C8)",
        || {
            let cases: [(usize, ClosedForm); 3] = [
                (4, |t| t.sin().powi(4)),
                (6, |t| {
                    16.0 / 9.0 * (t / 2.0).sin().powi(4) * t.sin().powi(2)
                }),
                (8, |t| {
                    (1.0 + (2.0 * t).cos() - 2.0 * (2f64.sqrt() * t).cos()).powi(2) / 16.0
                }),
            ];
            let mut checks = Checks::new();
            for (n, formula) in cases {
                let spec = CycleSpec::new(n)?;
                let state = WalkState::delta(n, 0)?;
                let evaluator = FidelityEvaluator::new(&spec, &state)?;
                let b = spec.antipodal(0);
                let mut worst = 0.0f64;
                for i in 0..1000 {
                    let t = 10.0 * i as f64 / 999.0;
                    let p = evaluator.amplitude_at(b, t)?.norm_sqr();
                    worst = worst.max((p - formula(t)).abs());
                }
                checks.require(
                    worst < 1e-9,
                    format!("C{n} max deviation {worst:.2e} < 1e-9"),
                );
            }
            Ok(checks)
        },
    )
}

/// Perfect transfer on C4 and its odd-half-period recurrences.
pub fn criterion_2() -> CriterionReport {
    guard(2, "perfect transfer on C4", || {
        let spec = CycleSpec::new(4)?;
        let state = WalkState::delta(4, 0)?;
        let found = find_transfer_time(&spec, &state, 0)?;
        let mut checks = Checks::new();
        checks.require(
            (found.tau - FRAC_PI_2).abs() < 1e-6,
            format!(
                "tau = {:.9} vs pi/2 (err {:.2e})",
                found.tau,
                (found.tau - FRAC_PI_2).abs()
            ),
        );
        checks.require(
            (found.value - 1.0).abs() < 1e-10,
            format!("F(tau) = {:.12}", found.value),
        );
        let shift = antipodal_shift(&spec, 0);
        let mut worst = 0.0f64;
        for l in 0..=5 {
            let t = (2 * l + 1) as f64 * FRAC_PI_2;
            worst = worst.max((fidelity(&spec, &state, t, shift)? - 1.0).abs());
        }
        checks.require(
            worst < 1e-10,
            format!("recurrence deviation {worst:.2e} for l <= 5"),
        );
        Ok(checks)
    })
}

/// Power-law exponents of the one-vertex transfer and the linear growth of
/// its transfer time.
pub fn criterion_3() -> CriterionReport {
    guard(3, "one-vertex transfer power laws", || {
        let data = fig2_sweep((4, 200), (5, 199))?;
        let mut checks = Checks::new();
        checks.require(
            (data.fit_even.exponent - 0.652).abs() <= 0.03,
            format!(
                "alpha_even = {:.4} in 0.652 +/- 0.03",
                data.fit_even.exponent
            ),
        );
        checks.require(
            (data.fit_odd.exponent - 0.634).abs() <= 0.03,
            format!("alpha_odd = {:.4} in 0.634 +/- 0.03", data.fit_odd.exponent),
        );
        checks.require(
            (data.tau_fit.slope - 0.25).abs() <= 0.03,
            format!(
                "tau-vs-n slope = {:.4} in 0.25 +/- 0.03",
                data.tau_fit.slope
            ),
        );
        Ok(checks)
    })
}

/// Gaussian transfer quality on C200 for wide and narrow packets.
pub fn criterion_4() -> CriterionReport {
    guard(4, "gaussian transfer on C200", || {
        let spec = CycleSpec::new(200)?;
        let shift = antipodal_shift(&spec, 0);
        let wide = make_state(&DistributionSpec::new(Family::Gaussian, 200, 0, 10.0)?);
        let wide_peak = find_transfer_time(&spec, &wide, 0)?;
        let narrow = make_state(&DistributionSpec::new(Family::Gaussian, 200, 0, 1.0)?);
        let narrow_peak = find_transfer_time(&spec, &narrow, 0)?;
        let half = fidelity(&spec, &wide, wide_peak.tau / 2.0, shift)?;
        let mut checks = Checks::new();
        checks.require(
            wide_peak.value >= 0.99,
            format!("sigma0=10: F(tau) = {:.6} >= 0.99", wide_peak.value),
        );
        checks.require(
            (narrow_peak.value - 0.30).abs() <= 0.05,
            format!(
                "sigma0=1: F(tau) = {:.4} in 0.30 +/- 0.05",
                narrow_peak.value
            ),
        );
        checks.require(
            (half - 0.50).abs() <= 0.02,
            format!("sigma0=10: F(tau/2) = {:.4} in 0.50 +/- 0.02", half),
        );
        Ok(checks)
    })
}

/// Half-period profile is the balanced two-packet mixture.
pub fn criterion_5() -> CriterionReport {
    guard(5, "half-period balanced superposition", || {
        let spec = CycleSpec::new(200)?;
        let state = make_state(&DistributionSpec::new(Family::Gaussian, 200, 0, 10.0)?);
        let tau = find_transfer_time(&spec, &state, 0)?.tau;
        let l1 = half_period_profile_check(&spec, &state, 0, tau)?;
        let mut checks = Checks::new();
        checks.require(l1 < 0.05, format!("L1 distance at tau/2 = {l1:.5} < 0.05"));
        Ok(checks)
    })
}

/// Long-horizon storage: peak floor and width ordering of the envelopes.
///
/// The peak-floor clause is stricter than the dynamics allow: the envelope
/// of the tracked maxima beats quasi-periodically and its lower edge dips
/// to about 0.98 within the default horizon, so that clause fails by
/// construction while the ordering clause holds. See the acceptance test
/// output for the measured minimum.
pub fn criterion_6(full_horizon: bool) -> CriterionReport {
    guard(6, "long-time storage peaks on C100", || {
        let max_multiple = if full_horizon { 10_000 } else { 100 };
        let series = fig4a_peaks(100, &[5.0, 10.0], max_multiple, 200)?;
        let (five, ten) = (&series[0], &series[1]);
        let mut checks = Checks::new();

        let mut min_peak = f64::INFINITY;
        let mut first_below: Option<usize> = None;
        let mut missing = 0usize;
        for peak in &ten.peaks {
            match peak {
                Some(p) => {
                    if p.value < min_peak {
                        min_peak = p.value;
                    }
                    if p.value < 0.99 && first_below.is_none() {
                        first_below = Some(p.index);
                    }
                }
                None => missing += 1,
            }
        }
        checks.require(
            missing == 0 && min_peak >= 0.99,
            format!(
                "sigma0=10: all {} tracked peaks >= 0.99 (measured min {:.4}{})",
                ten.peaks.len(),
                min_peak,
                first_below.map_or(String::new(), |m| format!(", first below at multiple {m}")),
            ),
        );

        let mut dominated = true;
        let mut worst_gap = 0.0f64;
        for (hi, lo) in ten.peaks.iter().zip(&five.peaks) {
            if let (Some(hi), Some(lo)) = (hi, lo) {
                if hi.value < lo.value {
                    dominated = false;
                    worst_gap = worst_gap.max(lo.value - hi.value);
                }
            }
        }
        checks.require(
            dominated,
            format!("sigma0=10 envelope dominates sigma0=5 at every ordinal (worst gap {worst_gap:.1e})"),
        );
        Ok(checks)
    })
}

/// Quadratic growth of the distributed transfer time.
pub fn criterion_7() -> CriterionReport {
    guard(7, "transfer-time scaling tau = 0.08 n^2", || {
        let data = fig4b_sweep(&[20], &[5, 6, 7, 8, 9, 10])?;
        let points: Vec<(f64, f64)> = data.rows.iter().map(|r| (r.n as f64, r.tau)).collect();
        let c = quadratic_prefactor(&points)?;
        let mut checks = Checks::new();
        checks.require(
            (c - 0.08).abs() <= 0.01,
            format!(
                "prefactor = {:.5} in 0.08 +/- 0.01 over n in [100, 200] (log-log exponent {:.3})",
                c, -data.tau_power_fit.exponent
            ),
        );
        Ok(checks)
    })
}

/// Distributed-family comparison at the first transfer and the full period.
pub fn criterion_8() -> CriterionReport {
    guard(8, "distribution comparison on C200", || {
        let rows = fig5_compare(200, 10.0)?;
        let by = |family: Family| -> &Fig5Row { rows.iter().find(|r| r.family == family).unwrap() };
        let uniform = by(Family::Uniform);
        let mut checks = Checks::new();
        checks.require(
            (uniform.fidelity_at_tau - 0.90).abs() <= 0.03,
            format!(
                "uniform F(tau) = {:.4} in 0.90 +/- 0.03",
                uniform.fidelity_at_tau
            ),
        );
        checks.require(
            (uniform.fidelity_at_2tau - 0.88).abs() <= 0.03,
            format!(
                "uniform F(2tau) = {:.4} in 0.88 +/- 0.03",
                uniform.fidelity_at_2tau
            ),
        );
        let (g, l) = (
            by(Family::Gaussian).fidelity_at_tau,
            by(Family::Logistic).fidelity_at_tau,
        );
        checks.require(g >= l - 1e-9, format!("gaussian {g:.4} >= logistic {l:.4}"));
        let (gum, lor) = (
            by(Family::Gumbel).fidelity_at_tau,
            by(Family::Lorentz).fidelity_at_tau,
        );
        // 0.05 slack on the gumbel comparison: its centering is ambiguous
        checks.require(
            gum >= lor - 0.05,
            format!("gumbel {gum:.4} >= lorentz {lor:.4} - 0.05"),
        );
        let u = uniform.fidelity_at_tau;
        checks.require(
            lor >= u - 1e-9,
            format!("lorentz {lor:.4} >= uniform {u:.4}"),
        );
        Ok(checks)
    })
}

/// Direct evaluation of the displaced-overlap fidelity as a literal triple
/// sum over vertex pairs and Fourier modes. Reference oracle; kept free of
/// the transform-based production path.
pub fn triple_sum_fidelity(profile_amplitudes: &[f64], shift: usize, t: f64) -> f64 {
    let n = profile_amplitudes.len();
    let mut re = 0.0;
    let mut im = 0.0;
    for k in 0..n {
        for k2 in 0..n {
            for j in 0..n {
                let theta = TAU * j as f64 / n as f64;
                let phase = -2.0 * theta.cos() * t + theta * (k as f64 - k2 as f64 + shift as f64);
                let w = profile_amplitudes[k] * profile_amplitudes[k2];
                re += w * phase.cos();
                im += w * phase.sin();
            }
        }
    }
    (re * re + im * im) / (n * n) as f64
}

/// Transform-path fidelity equals the direct triple-sum formula.
pub fn criterion_9() -> CriterionReport {
    guard(9, "triple-sum fidelity oracle up to n = 32", || {
        use rayon::prelude::*;
        let mut checks = Checks::new();
        let cases: Vec<(usize, Family)> = (3..=32usize)
            .flat_map(|n| Family::ALL.into_iter().map(move |f| (n, f)))
            .collect();
        let worst = cases
            .par_iter()
            .map(|&(n, family)| {
                let sigma0 = (n as f64 / 10.0).max(1.0);
                let dist = DistributionSpec::new(family, n, 0, sigma0)?;
                let state = make_state(&dist);
                let spec = CycleSpec::new(n)?;
                let evaluator = FidelityEvaluator::new(&spec, &state)?;
                let shift = spec.antipodal(0);
                let f: Vec<f64> = state.amplitudes().iter().map(|a| a.re).collect();
                let mut worst = 0.0f64;
                for i in 0..50 {
                    let t = (i + 1) as f64 * n as f64 / 25.0;
                    let via_engine = evaluator.fidelity(t, shift as i64);
                    let via_sum = triple_sum_fidelity(&f, shift, t);
                    worst = worst.max((via_engine - via_sum).abs());
                }
                Ok(worst)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0f64, f64::max);
        checks.require(
            worst < 1e-10,
            format!(
                "max |engine - triple sum| = {worst:.2e} over n in 3..=32, all families, 50 times"
            ),
        );
        Ok(checks)
    })
}

/// Ballistic spreading rates before wrap-around.
pub fn criterion_10() -> CriterionReport {
    guard(10, "ballistic dispersion slopes on C400", || {
        let spec = CycleSpec::new(400)?;
        let grid: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let slope_of = |state: &WalkState| -> Result<f64> {
            let samples = dispersion_growth(&spec, state, &grid)?;
            let points: Vec<(f64, f64)> = samples
                .iter()
                .filter_map(|s| s.sigma.map(|sigma| (s.t, sigma)))
                .collect();
            Ok(linear_fit(&points)?.slope)
        };
        let delta_slope = slope_of(&WalkState::delta(400, 0)?)?;
        let gauss_slope = slope_of(&make_state(&DistributionSpec::new(
            Family::Gaussian,
            400,
            0,
            10.0,
        )?))?;
        let mut checks = Checks::new();
        let root2 = 2f64.sqrt();
        checks.require(
            (delta_slope - root2).abs() <= 0.03,
            format!("delta slope = {delta_slope:.4} in sqrt(2) +/- 0.03"),
        );
        checks.require(
            gauss_slope < delta_slope,
            format!("gaussian sigma0=10 slope = {gauss_slope:.4} < delta slope"),
        );
        Ok(checks)
    })
}

/// Switching-protocol conservation, confinement, and width monotonicity.
pub fn criterion_11() -> CriterionReport {
    guard(11, "railroad-switch protocol properties", || {
        let (small_n, outer_n) = (20, 60);
        let widths = [0.5, 1.0, 2.0]; // small_n/40, small_n/20, small_n/10
        let mut checks = Checks::new();
        let mut final_fidelities = Vec::new();
        for &sigma0 in &widths {
            let plan = plan_fig6_protocol(small_n, outer_n, sigma0, 0, 1.0)?;
            let t_end = plan.t2 + 2.0 * plan.tau_s;
            let probes = [
                0.0,
                plan.t1 / 2.0,
                plan.t1,
                (plan.t1 + plan.t2) / 2.0,
                plan.t2,
                t_end,
            ];
            let sampled = plan.schedule.run(&plan.initial, &probes)?;

            let worst_norm = sampled
                .iter()
                .map(|(_, s)| (s.norm() - 1.0).abs())
                .fold(0.0f64, f64::max);
            checks.require(
                worst_norm < 1e-11,
                format!("sigma0={sigma0}: norm drift {worst_norm:.1e} < 1e-11"),
            );

            // stage 1: everything off the left ring started at exactly zero
            // and must stay there
            let left: Vec<usize> = plan.geometry.left_ring_order();
            let leak1: f64 = sampled[1]
                .1
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(v, _)| !left.contains(v))
                .map(|(_, a)| a.norm_sqr())
                .sum();
            checks.require(
                leak1 < 1e-14,
                format!("sigma0={sigma0}: stage-1 leakage {leak1:.1e} < 1e-14"),
            );

            // component masses are frozen between switches
            let comp2 = plan.geometry.stage2.connected_components();
            let masses = |state: &WalkState| {
                let count = comp2.iter().copied().max().unwrap() + 1;
                let mut m = vec![0.0; count];
                for (v, a) in state.amplitudes().iter().enumerate() {
                    m[comp2[v]] += a.norm_sqr();
                }
                m
            };
            let drift = masses(&sampled[2].1)
                .iter()
                .zip(masses(&sampled[4].1))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            checks.require(
                drift < 1e-12,
                format!("sigma0={sigma0}: stage-2 component-mass drift {drift:.1e} < 1e-12"),
            );

            // after the capture, the right ring holds its probability
            let right = plan.geometry.right_ring_order();
            let right_mass = |state: &WalkState| -> f64 {
                right
                    .iter()
                    .map(|&v| state.amplitudes()[v].norm_sqr())
                    .sum()
            };
            let captured = right_mass(&sampled[4].1);
            let held = right_mass(&sampled[5].1);
            checks.require(
                (captured - held).abs() < 1e-11,
                format!("sigma0={sigma0}: right-ring mass {captured:.4} held within 1e-11 through stage 3"),
            );

            final_fidelities.push(plan.goal_fidelity(&sampled[4].1));
        }
        let monotone = final_fidelities.windows(2).all(|w| w[1] >= w[0]);
        checks.require(
            monotone,
            format!(
                "final fidelity non-decreasing in sigma0: {:.4} <= {:.4} <= {:.4}",
                final_fidelities[0], final_fidelities[1], final_fidelities[2]
            ),
        );
        Ok(checks)
    })
}

/// Spectral and dense-graph backends agree on cycle probabilities.
pub fn criterion_12() -> CriterionReport {
    guard(12, "cross-backend agreement on cycles", || {
        let mut checks = Checks::new();
        let mut worst = 0.0f64;
        for n in [5usize, 8, 13, 32] {
            let spec = CycleSpec::new(n)?;
            let topo = GraphTopology::cycle(n)?;
            let states = [
                WalkState::delta(n, 0)?,
                make_state(&DistributionSpec::new(
                    Family::Gaussian,
                    n,
                    0,
                    (n as f64 / 10.0).max(0.5),
                )?),
            ];
            for state in &states {
                for t in [0.7, 1.3, 5.0] {
                    let a = evolve_cycle(&spec, state, t)?.probability_profile();
                    let b = evolve_general(&topo, state, t)?.probability_profile();
                    for (x, y) in a.iter().zip(&b) {
                        worst = worst.max((x - y).abs());
                    }
                }
            }
        }
        checks.require(
            worst < 1e-10,
            format!("max probability deviation {worst:.2e} over n in (5, 8, 13, 32)"),
        );
        Ok(checks)
    })
}

/// Run every criterion in order. `full_horizon` extends the long-time
/// storage check from 100 to 10,000 transfer periods.
pub fn run_all(full_horizon: bool) -> Vec<CriterionReport> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(full_horizon),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(),
    ]
}
