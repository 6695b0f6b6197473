//! Deterministic dataset builders behind the command-line experiments.
//!
//! Each builder returns plain data that the CLI renders as CSV and the
//! acceptance checks consume directly. Sweeps fan out over rayon but always
//! collect in input order, so repeated runs produce identical output.

use rayon::prelude::*;

use crate::analysis::{
    antipodal_shift, find_transfer_time, fit_power_law, linear_fit, track_peaks_with,
    FidelityEvaluator, LinearFit, Parity, PeakRecord, PowerLawFit, TransferTime,
};
use crate::error::{Error, Result};
use crate::spectral::{CycleSpec, WalkState};
use crate::states::{make_state, moments_of_profile, DistributionSpec, Family};
use crate::switching::{plan_fig6_protocol, Fig6Protocol};

/// Antipodal transfer data for one cycle size.
#[derive(Debug, Clone, Copy)]
pub struct Fig2Row {
    pub n: usize,
    pub tau: f64,
    pub p_b_tau: f64,
}

/// One-vertex transfer sweep with its scaling fits.
#[derive(Debug, Clone)]
pub struct Fig2Data {
    pub rows: Vec<Fig2Row>,
    pub fit_even: PowerLawFit,
    pub fit_odd: PowerLawFit,
    /// Linear fit of tau against n over all rows.
    pub tau_fit: LinearFit,
}

/// Sweep the one-vertex walk over even sizes in `even` and odd sizes in
/// `odd` (inclusive bounds), fitting the antipodal-probability power laws
/// per parity and the linear growth of the transfer time.
pub fn fig2_sweep(even: (usize, usize), odd: (usize, usize)) -> Result<Fig2Data> {
    let mut sizes: Vec<usize> = (even.0..=even.1).filter(|n| n % 2 == 0).collect();
    sizes.extend((odd.0..=odd.1).filter(|n| n % 2 == 1));
    sizes.sort_unstable();
    let rows: Vec<Fig2Row> = sizes
        .par_iter()
        .map(|&n| {
            let spec = CycleSpec::new(n)?;
            let state = WalkState::delta(n, 0)?;
            let TransferTime { tau, value } = find_transfer_time(&spec, &state, 0)?;
            Ok(Fig2Row {
                n,
                tau,
                p_b_tau: value,
            })
        })
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.p_b_tau)).collect();
    let fit_even = fit_power_law(&points, Parity::Even)?;
    let fit_odd = fit_power_law(&points, Parity::Odd)?;
    let tau_points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.tau)).collect();
    let tau_fit = linear_fit(&tau_points)?;
    Ok(Fig2Data {
        rows,
        fit_even,
        fit_odd,
        tau_fit,
    })
}

/// Fidelity-over-time traces for several gaussian widths on one cycle.
#[derive(Debug, Clone)]
pub struct Fig3Data {
    pub n: usize,
    pub sigma0s: Vec<f64>,
    /// Measured transfer time per width.
    pub taus: Vec<f64>,
    pub times: Vec<f64>,
    /// `values[s][t]` is the fidelity of width `sigma0s[s]` at `times[t]`.
    pub values: Vec<Vec<f64>>,
}

pub fn fig3_traces(n: usize, sigma0s: &[f64], points: usize) -> Result<Fig3Data> {
    if sigma0s.is_empty() || points < 2 {
        return Err(Error::InvalidInput(
            "need at least one width and two sample points".into(),
        ));
    }
    let spec = CycleSpec::new(n)?;
    let center = 0;
    let shift = antipodal_shift(&spec, center);
    let runs: Vec<(f64, FidelityEvaluator)> = sigma0s
        .par_iter()
        .map(|&sigma0| {
            let state = make_state(&DistributionSpec::new(Family::Gaussian, n, center, sigma0)?);
            let tau = find_transfer_time(&spec, &state, center)?.tau;
            Ok((tau, FidelityEvaluator::new(&spec, &state)?))
        })
        .collect::<Result<_>>()?;
    let t_max = 1.2 * runs.iter().map(|r| r.0).fold(0.0, f64::max);
    let dt = t_max / (points - 1) as f64;
    let times: Vec<f64> = (0..points).map(|i| i as f64 * dt).collect();
    let values = runs
        .iter()
        .map(|(_, ev)| ev.fidelity_grid(0.0, dt, points, shift))
        .collect();
    Ok(Fig3Data {
        n,
        sigma0s: sigma0s.to_vec(),
        taus: runs.iter().map(|r| r.0).collect(),
        times,
        values,
    })
}

/// Peak envelope of one gaussian width.
#[derive(Debug, Clone)]
pub struct Fig4aSeries {
    pub sigma0: f64,
    pub tau: f64,
    pub peaks: Vec<Option<PeakRecord>>,
}

/// Track fidelity peaks out to `max_multiple` transfer times for each width.
pub fn fig4a_peaks(
    n: usize,
    sigma0s: &[f64],
    max_multiple: usize,
    samples_per_window: usize,
) -> Result<Vec<Fig4aSeries>> {
    let spec = CycleSpec::new(n)?;
    sigma0s
        .par_iter()
        .map(|&sigma0| {
            let state = make_state(&DistributionSpec::new(Family::Gaussian, n, 0, sigma0)?);
            let tau = find_transfer_time(&spec, &state, 0)?.tau;
            let peaks = track_peaks_with(&spec, &state, 0, tau, max_multiple, samples_per_window)?;
            Ok(Fig4aSeries { sigma0, tau, peaks })
        })
        .collect()
}

/// First-transfer quality at one (n/sigma0, sigma0) grid point.
#[derive(Debug, Clone, Copy)]
pub struct Fig4bRow {
    pub ratio: usize,
    pub sigma0: usize,
    pub n: usize,
    pub tau: f64,
    pub fidelity_at_tau: f64,
}

#[derive(Debug, Clone)]
pub struct Fig4bData {
    pub rows: Vec<Fig4bRow>,
    /// Power-law fit of tau against n over all rows.
    pub tau_power_fit: PowerLawFit,
}

/// Sweep gaussian walks over integer `n/sigma0` ratios and integer widths;
/// `n = ratio * sigma0`.
pub fn fig4b_sweep(ratios: &[usize], sigma0s: &[usize]) -> Result<Fig4bData> {
    let grid: Vec<(usize, usize)> = ratios
        .iter()
        .flat_map(|&r| sigma0s.iter().map(move |&s| (r, s)))
        .collect();
    let rows: Vec<Fig4bRow> = grid
        .par_iter()
        .map(|&(ratio, sigma0)| {
            let n = ratio * sigma0;
            let spec = CycleSpec::new(n)?;
            let state = make_state(&DistributionSpec::new(
                Family::Gaussian,
                n,
                0,
                sigma0 as f64,
            )?);
            let TransferTime { tau, value } = find_transfer_time(&spec, &state, 0)?;
            Ok(Fig4bRow {
                ratio,
                sigma0,
                n,
                tau,
                fidelity_at_tau: value,
            })
        })
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.tau)).collect();
    let tau_power_fit = fit_power_law(&points, Parity::All)?;
    Ok(Fig4bData {
        rows,
        tau_power_fit,
    })
}

/// Constrained least-squares coefficient of `tau = c n^2` over `(n, tau)`
/// points (used for the transfer-time scaling check).
pub fn quadratic_prefactor(points: &[(f64, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InsufficientData(
            "no points for the quadratic fit".into(),
        ));
    }
    let num: f64 = points.iter().map(|(n, tau)| n * n * tau).sum();
    let den: f64 = points.iter().map(|(n, _)| n.powi(4)).sum();
    Ok(num / den)
}

/// First- and second-transfer fidelity for one distribution family.
#[derive(Debug, Clone, Copy)]
pub struct Fig5Row {
    pub family: Family,
    pub tau: f64,
    pub fidelity_at_tau: f64,
    pub second_peak_time: f64,
    pub fidelity_at_2tau: f64,
}

/// Families compared by the distributed-state experiment, widest-tail last.
pub const FIG5_FAMILIES: [Family; 5] = [
    Family::Gaussian,
    Family::Logistic,
    Family::Gumbel,
    Family::Lorentz,
    Family::Uniform,
];

/// Fidelity maxima at the first transfer (antipodal shift) and the full
/// period (shift zero, window around 2 tau) for every distributed family.
pub fn fig5_compare(n: usize, sigma0: f64) -> Result<Vec<Fig5Row>> {
    let spec = CycleSpec::new(n)?;
    FIG5_FAMILIES
        .par_iter()
        .map(|&family| {
            let state = make_state(&DistributionSpec::new(family, n, 0, sigma0)?);
            let TransferTime { tau, value } = find_transfer_time(&spec, &state, 0)?;
            let second = track_peaks_with(&spec, &state, 0, tau, 2, 400)?
                .pop()
                .flatten()
                .ok_or_else(|| {
                    Error::SearchHorizonExceeded(format!(
                        "no period peak near 2 tau for the {family} family"
                    ))
                })?;
            Ok(Fig5Row {
                family,
                tau,
                fidelity_at_tau: value,
                second_peak_time: second.time,
                fidelity_at_2tau: second.value,
            })
        })
        .collect()
}

/// Probability profile at one probe time.
#[derive(Debug, Clone)]
pub struct ProfileBlock {
    pub time: f64,
    pub profile: Vec<f64>,
}

/// Evolve the state described by `dist` and record the probability profile
/// at each probe time.
pub fn evolve_profiles(dist: &DistributionSpec, times: &[f64]) -> Result<Vec<ProfileBlock>> {
    let spec = CycleSpec::new(dist.n())?;
    let state = make_state(dist);
    let basis = spec.basis();
    times
        .iter()
        .map(|&t| {
            let evolved = basis.evolve(&state, t)?;
            Ok(ProfileBlock {
                time: t,
                profile: evolved.probability_profile(),
            })
        })
        .collect()
}

/// Default probe times `{0, tau/2, tau}` for the state described by `dist`.
pub fn transfer_probe_times(dist: &DistributionSpec) -> Result<Vec<f64>> {
    let spec = CycleSpec::new(dist.n())?;
    let state = make_state(dist);
    let tau = find_transfer_time(&spec, &state, dist.center())?.tau;
    Ok(vec![0.0, tau / 2.0, tau])
}

/// One probe row of a switching-protocol run.
#[derive(Debug, Clone)]
pub struct DynamicRow {
    pub time: f64,
    /// Vertex nearest the packet's circular mean on the dominant ring.
    pub center_vertex: usize,
    /// Role label of the component holding the most probability.
    pub component: &'static str,
    /// Probability carried by that component.
    pub component_mass: f64,
    pub total_probability: f64,
    /// Squared overlap with the initial profile re-centered at the handover
    /// vertex `c`.
    pub goal_fidelity: f64,
}

/// Full trace of one railroad-switch protocol run.
pub struct DynamicData {
    pub protocol: Fig6Protocol,
    pub rows: Vec<DynamicRow>,
    /// Goal fidelity at the moment the state is captured in the right ring.
    pub final_fidelity: f64,
}

/// Run the protocol for a gaussian of width `sigma0`, probing each stage at
/// `probes_per_stage` evenly spaced times (plus the stage boundaries).
pub fn dynamic_trace(
    small_n: usize,
    outer_n: usize,
    sigma0: f64,
    extra_periods: usize,
    probes_per_stage: usize,
) -> Result<DynamicData> {
    let protocol = plan_fig6_protocol(small_n, outer_n, sigma0, extra_periods, 1.0)?;
    let k = probes_per_stage.max(1);
    let mut probes = Vec::new();
    let t_end = protocol.t2 + 2.0 * protocol.tau_s;
    for (lo, hi) in [
        (0.0, protocol.t1),
        (protocol.t1, protocol.t2),
        (protocol.t2, t_end),
    ] {
        for i in 0..k {
            probes.push(lo + (hi - lo) * i as f64 / k as f64);
        }
    }
    probes.push(t_end);

    let sampled = protocol.schedule.run(&protocol.initial, &probes)?;
    let geom = &protocol.geometry;
    let rings: [(&'static str, Vec<usize>); 3] = [
        ("left_ring", geom.left_ring_order()),
        ("major_cycle", geom.major_cycle_order()),
        ("right_ring", geom.right_ring_order()),
    ];

    let rows: Vec<DynamicRow> = sampled
        .iter()
        .map(|(t, state)| {
            let stage_idx = protocol.schedule.stage_at(*t);
            let topology = &protocol.schedule.stages()[stage_idx].topology;
            let comp = topology.connected_components();
            let count = comp.iter().copied().max().map_or(1, |m| m + 1);
            let mut masses = vec![0.0; count];
            for (v, a) in state.amplitudes().iter().enumerate() {
                masses[comp[v]] += a.norm_sqr();
            }
            let (dominant, &component_mass) = masses
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .expect("nonempty graph");
            let labelled = rings.iter().find(|(_, order)| {
                comp[order[0]] == dominant && order.iter().all(|&v| comp[v] == dominant)
            });
            let profile = state.probability_profile();
            let (component, center_vertex) = match labelled {
                Some((name, order)) => {
                    let mut ring_profile: Vec<f64> = order.iter().map(|&v| profile[v]).collect();
                    let on_ring: f64 = ring_profile.iter().sum();
                    for p in &mut ring_profile {
                        *p /= on_ring;
                    }
                    // a packet in mid-transit is legitimately delocalized;
                    // fall back to the likeliest vertex there
                    let center = match moments_of_profile(&ring_profile) {
                        Ok(m) => order[(m.mean_vertex.round() as usize) % order.len()],
                        Err(_) => arg_max_vertex(&profile),
                    };
                    (*name, center)
                }
                None => ("other", arg_max_vertex(&profile)),
            };
            DynamicRow {
                time: *t,
                center_vertex,
                component,
                component_mass,
                total_probability: profile.iter().sum(),
                goal_fidelity: protocol.goal_fidelity(state),
            }
        })
        .collect();

    let captured = protocol.schedule.run(&protocol.initial, &[protocol.t2])?;
    let final_fidelity = protocol.goal_fidelity(&captured[0].1);
    Ok(DynamicData {
        protocol,
        rows,
        final_fidelity,
    })
}

fn arg_max_vertex(profile: &[f64]) -> usize {
    profile
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(v, _)| v)
        .unwrap_or(0)
}
