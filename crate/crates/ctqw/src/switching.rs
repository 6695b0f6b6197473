//! Piecewise-constant topology evolution and the railroad-switch geometry
//! for confining and relaying a distributed state between sub-cycles.
//!
//! The composite graph consists of a small left ring and a small right ring
//! bridged by top and bottom branches. Each ring meets the bridges at a pair
//! of junction vertices placed a quarter-turn from its poles, so each switch
//! event exchanges exactly two edges per junction pair:
//!
//! * stage 1 - the left ring is closed; the state oscillates between its
//!   poles `a` and `b`;
//! * stage 2 - at `t1` the left junctions drop the arc through `b` and pick
//!   up the bridges, leaving one large cycle through `a` and `c` on which
//!   the poles are exactly antipodal;
//! * stage 3 - at `t2` the right junctions drop the bridges and close the
//!   right ring, confining the state between `c` and `d`.
//!
//! Arcs that are switched out keep their interior edges and simply float as
//! disconnected components.

use crate::analysis::find_transfer_time;
use crate::error::{Error, Result};
use crate::graph::{GraphPropagator, GraphTopology, HamiltonianKind};
use crate::spectral::{CycleSpec, WalkState};
use crate::states::{make_state, DistributionSpec, Family};

use num_complex::Complex64;

/// One stage of a switching schedule. `until` is the absolute switch time;
/// the final stage is open-ended (`None`).
#[derive(Debug, Clone)]
pub struct Stage {
    pub topology: GraphTopology,
    pub until: Option<f64>,
}

/// Ordered list of topologies with switch times, evolved with a fixed
/// Hamiltonian convention and hopping rate.
pub struct SwitchSchedule {
    stages: Vec<Stage>,
    gamma: f64,
    kind: HamiltonianKind,
}

impl SwitchSchedule {
    pub fn new(stages: Vec<Stage>, gamma: f64, kind: HamiltonianKind) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidInput(
                "schedule needs at least one stage".into(),
            ));
        }
        let n = stages[0].topology.vertex_count();
        if stages.iter().any(|s| s.topology.vertex_count() != n) {
            return Err(Error::InvalidInput(
                "all stages must share the vertex set".into(),
            ));
        }
        let mut last = 0.0;
        for (i, stage) in stages.iter().enumerate() {
            match stage.until {
                Some(t) => {
                    if i + 1 == stages.len() {
                        return Err(Error::InvalidInput("final stage must be open-ended".into()));
                    }
                    if t <= last {
                        return Err(Error::InvalidInput(format!(
                            "switch times must be strictly increasing, got {t} after {last}"
                        )));
                    }
                    last = t;
                }
                None => {
                    if i + 1 != stages.len() {
                        return Err(Error::InvalidInput(
                            "only the final stage may be open-ended".into(),
                        ));
                    }
                }
            }
        }
        Ok(Self {
            stages,
            gamma,
            kind,
        })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Switch times `t1, t2, ..` in order.
    pub fn switch_times(&self) -> Vec<f64> {
        self.stages.iter().filter_map(|s| s.until).collect()
    }

    /// Index of the stage active at time `t` (switches belong to the
    /// following stage).
    pub fn stage_at(&self, t: f64) -> usize {
        self.stages
            .iter()
            .position(|s| s.until.is_none_or(|u| t < u))
            .unwrap_or(self.stages.len() - 1)
    }

    /// Evolve `initial` through the schedule, carrying the state
    /// continuously across switch times, and return it at each probe time.
    ///
    /// Probe times must be non-negative and non-decreasing. The initial
    /// state must live on a single connected component of the stage-1
    /// topology (up to mass 1e-9).
    pub fn run(&self, initial: &WalkState, probes: &[f64]) -> Result<Vec<(f64, WalkState)>> {
        if initial.n() != self.stages[0].topology.vertex_count() {
            return Err(Error::InvalidInput(format!(
                "state has {} amplitudes but the graph has {} vertices",
                initial.n(),
                self.stages[0].topology.vertex_count()
            )));
        }
        if let Some(&bad) = probes.iter().find(|&&t| t < 0.0) {
            return Err(Error::InvalidInput(format!(
                "probe time {bad} is before the walk starts"
            )));
        }
        if probes.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput(
                "probe times must be non-decreasing".into(),
            ));
        }
        self.check_initial_support(initial)?;

        let propagators: Vec<GraphPropagator> = self
            .stages
            .iter()
            .map(|s| GraphPropagator::new(&s.topology, self.gamma, self.kind))
            .collect::<Result<_>>()?;

        let mut current = initial.clone();
        let mut now = 0.0;
        let mut stage = 0;
        let mut out = Vec::with_capacity(probes.len());
        for &tp in probes {
            while let Some(until) = self.stages[stage].until {
                if until > tp {
                    break;
                }
                current = propagators[stage].evolve(&current, until - now)?;
                now = until;
                stage += 1;
            }
            current = propagators[stage].evolve(&current, tp - now)?;
            now = tp;
            out.push((tp, current.clone()));
        }
        Ok(out)
    }

    fn check_initial_support(&self, initial: &WalkState) -> Result<()> {
        let component = self.stages[0].topology.connected_components();
        let home = initial
            .probability_profile()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(v, _)| component[v])
            .expect("nonempty state");
        let stray: f64 = initial
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(v, _)| component[*v] != home)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if stray > 1e-9 {
            return Err(Error::InconsistentInitialState(format!(
                "{stray:.3e} of the initial probability sits outside the stage-1 active component"
            )));
        }
        Ok(())
    }
}

/// Evolve `initial` through `schedule`, sampling at `probes`.
pub fn run_switch_protocol(
    schedule: &SwitchSchedule,
    initial: &WalkState,
    probes: &[f64],
) -> Result<Vec<(f64, WalkState)>> {
    schedule.run(initial, probes)
}

/// Named vertices of the composite geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fig6Labels {
    /// Pole of the left ring on the major cycle (start vertex).
    pub a: usize,
    /// Opposite pole of the left ring.
    pub b: usize,
    /// Pole of the right ring on the major cycle (handover vertex).
    pub c: usize,
    /// Opposite pole of the right ring.
    pub d: usize,
    /// Left ring junctions (meet the bridges).
    pub north_left: usize,
    pub south_left: usize,
    /// Right ring junctions.
    pub north_right: usize,
    pub south_right: usize,
}

/// The three stage topologies of the railroad-switch protocol plus vertex
/// roles and ring traversal orders.
#[derive(Debug, Clone)]
pub struct Fig6Geometry {
    pub small_n: usize,
    pub outer_n: usize,
    pub stage1: GraphTopology,
    pub stage2: GraphTopology,
    pub stage3: GraphTopology,
    pub labels: Fig6Labels,
}

impl Fig6Geometry {
    pub fn vertex_count(&self) -> usize {
        2 * self.small_n + self.outer_n
    }

    /// Length of the stage-2 active cycle.
    pub fn major_cycle_len(&self) -> usize {
        self.small_n + self.outer_n + 2
    }

    /// Left ring vertices in cycle order starting at `a`.
    pub fn left_ring_order(&self) -> Vec<usize> {
        (0..self.small_n).collect()
    }

    /// Right ring vertices in cycle order starting at `c`.
    pub fn right_ring_order(&self) -> Vec<usize> {
        (self.small_n..2 * self.small_n).collect()
    }

    /// Stage-2 active cycle in order starting at `a`; `c` sits exactly
    /// halfway around.
    pub fn major_cycle_order(&self) -> Vec<usize> {
        let q = self.small_n / 4;
        let half = self.outer_n / 2;
        let top_start = 2 * self.small_n;
        let bottom_start = top_start + half;
        let r = |i: usize| self.small_n + i;
        let mut order = Vec::with_capacity(self.major_cycle_len());
        order.extend(0..=q); // a up to the north-left junction
        order.extend(top_start..top_start + half); // top bridge
                                                   // north-right junction, down through c, to the south-right junction
        order.extend((0..=q).rev().map(r));
        order.extend((3 * q..self.small_n).rev().map(r));
        order.extend((bottom_start..bottom_start + half).rev()); // bottom bridge
        order.extend(3 * q..self.small_n); // south-left junction back toward a
        order
    }

    /// Lay a cycle state out along `ring_order`, zero elsewhere. The state's
    /// vertex `i` goes to graph vertex `ring_order[i]`.
    pub fn embed_on_ring(&self, ring_order: &[usize], state: &WalkState) -> Result<WalkState> {
        if state.n() != ring_order.len() {
            return Err(Error::InvalidInput(format!(
                "state has {} amplitudes but the ring has {} vertices",
                state.n(),
                ring_order.len()
            )));
        }
        let mut amplitudes = vec![Complex64::ZERO; self.vertex_count()];
        for (i, &v) in ring_order.iter().enumerate() {
            amplitudes[v] = state.amplitudes()[i];
        }
        Ok(WalkState::from_parts(amplitudes, state.time()))
    }
}

/// Build the three-stage switch geometry.
///
/// `small_n` is the size of each small ring and must be a multiple of 4 so
/// that the poles sit exactly between the junctions; `outer_n` is the total
/// number of interior bridge vertices, split evenly between the top and
/// bottom branches, and must be even. The smallest instance is (4, 4).
pub fn build_fig6_geometry(small_n: usize, outer_n: usize) -> Result<Fig6Geometry> {
    if small_n < 4 || !small_n.is_multiple_of(4) {
        return Err(Error::InvalidInput(format!(
            "small ring size must be a positive multiple of 4, got {small_n}"
        )));
    }
    if outer_n < 4 || !outer_n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "bridge vertex count must be even and at least 4, got {outer_n}"
        )));
    }
    let q = small_n / 4;
    let half = outer_n / 2;
    let total = 2 * small_n + outer_n;
    let r = |i: usize| small_n + i;
    let top: Vec<usize> = (2 * small_n..2 * small_n + half).collect();
    let bottom: Vec<usize> = (2 * small_n + half..total).collect();

    let labels = Fig6Labels {
        a: 0,
        b: 2 * q,
        c: r(0),
        d: r(2 * q),
        north_left: q,
        south_left: 3 * q,
        north_right: r(q),
        south_right: r(3 * q),
    };

    // ring edges split into the pole arc (through a resp. c, always present)
    // and the far arc (through b resp. d) whose junction edges switch
    let ring_edge = |base: usize, i: usize| (base + i, base + (i + 1) % small_n);
    let pole_arc = |base: usize| -> Vec<(usize, usize)> {
        (0..q)
            .map(|i| ring_edge(base, i))
            .chain((3 * q..small_n).map(|i| ring_edge(base, i)))
            .collect()
    };
    let far_arc_inner = |base: usize| -> Vec<(usize, usize)> {
        (q + 1..3 * q - 1).map(|i| ring_edge(base, i)).collect()
    };
    let far_arc_junction = |base: usize| -> Vec<(usize, usize)> {
        vec![ring_edge(base, q), ring_edge(base, 3 * q - 1)]
    };

    let path =
        |vs: &[usize]| -> Vec<(usize, usize)> { vs.windows(2).map(|w| (w[0], w[1])).collect() };
    let bridges_inner: Vec<(usize, usize)> = path(&top).into_iter().chain(path(&bottom)).collect();
    let bridges_at_left = vec![(labels.north_left, top[0]), (labels.south_left, bottom[0])];
    let bridges_at_right = vec![
        (*top.last().unwrap(), labels.north_right),
        (*bottom.last().unwrap(), labels.south_right),
    ];

    let collect = |parts: Vec<Vec<(usize, usize)>>| -> Result<GraphTopology> {
        GraphTopology::new(total, parts.into_iter().flatten())
    };
    let mut stage1 = collect(vec![
        pole_arc(0),
        far_arc_inner(0),
        far_arc_junction(0),
        bridges_inner.clone(),
        bridges_at_right.clone(),
        pole_arc(small_n),
        far_arc_inner(small_n),
    ])?;
    let mut stage2 = collect(vec![
        pole_arc(0),
        far_arc_inner(0),
        bridges_at_left.clone(),
        bridges_inner.clone(),
        bridges_at_right,
        pole_arc(small_n),
        far_arc_inner(small_n),
    ])?;
    let mut stage3 = collect(vec![
        pole_arc(0),
        far_arc_inner(0),
        bridges_at_left,
        bridges_inner,
        pole_arc(small_n),
        far_arc_inner(small_n),
        far_arc_junction(small_n),
    ])?;

    for topo in [&mut stage1, &mut stage2, &mut stage3] {
        for (name, vertex) in [
            ("a", labels.a),
            ("b", labels.b),
            ("c", labels.c),
            ("d", labels.d),
            ("switch_nl", labels.north_left),
            ("switch_sl", labels.south_left),
            ("switch_nr", labels.north_right),
            ("switch_sr", labels.south_right),
        ] {
            topo.set_label(name, vertex)?;
        }
    }

    Ok(Fig6Geometry {
        small_n,
        outer_n,
        stage1,
        stage2,
        stage3,
        labels,
    })
}

/// A fully planned protocol run: geometry, measured transfer times, switch
/// schedule, the embedded initial state, and the goal state at `c`.
pub struct Fig6Protocol {
    pub geometry: Fig6Geometry,
    pub sigma0: f64,
    /// Extra confinement periods before the first switch (the `l` in
    /// `t1 = 2(l+1) tau_s`).
    pub extra_periods: usize,
    /// Transfer time of the small ring for this state width.
    pub tau_s: f64,
    /// Transfer time a -> c of the stage-2 cycle.
    pub tau_e: f64,
    pub t1: f64,
    pub t2: f64,
    pub schedule: SwitchSchedule,
    pub initial: WalkState,
    /// The initial profile re-centered at `c` on the right ring.
    pub goal: WalkState,
}

impl Fig6Protocol {
    /// Squared overlap of `state` with the goal state at `c`.
    pub fn goal_fidelity(&self, state: &WalkState) -> f64 {
        overlap_fidelity(&self.goal, state)
    }
}

/// `|<reference|state>|^2`.
pub fn overlap_fidelity(reference: &WalkState, state: &WalkState) -> f64 {
    reference
        .amplitudes()
        .iter()
        .zip(state.amplitudes())
        .map(|(r, s)| r.conj() * s)
        .sum::<Complex64>()
        .norm_sqr()
}

/// Measure the transfer times, derive `t1 = 2(l+1) tau_s` and
/// `t2 = t1 + tau_e`, and assemble the schedule for a gaussian state of
/// width `sigma0` started at `a`.
pub fn plan_fig6_protocol(
    small_n: usize,
    outer_n: usize,
    sigma0: f64,
    extra_periods: usize,
    gamma: f64,
) -> Result<Fig6Protocol> {
    let geometry = build_fig6_geometry(small_n, outer_n)?;

    let small_cycle = CycleSpec::with_gamma(small_n, gamma)?;
    let small_state = make_state(&DistributionSpec::new(
        Family::Gaussian,
        small_n,
        0,
        sigma0,
    )?);
    let tau_s = find_transfer_time(&small_cycle, &small_state, 0)?.tau;

    let major_n = geometry.major_cycle_len();
    let major_cycle = CycleSpec::with_gamma(major_n, gamma)?;
    let major_state = make_state(&DistributionSpec::new(
        Family::Gaussian,
        major_n,
        0,
        sigma0,
    )?);
    let tau_e = find_transfer_time(&major_cycle, &major_state, 0)?.tau;

    let t1 = 2.0 * (extra_periods as f64 + 1.0) * tau_s;
    let t2 = t1 + tau_e;

    let initial = geometry.embed_on_ring(&geometry.left_ring_order(), &small_state)?;
    let goal = geometry.embed_on_ring(&geometry.right_ring_order(), &small_state)?;

    let schedule = SwitchSchedule::new(
        vec![
            Stage {
                topology: geometry.stage1.clone(),
                until: Some(t1),
            },
            Stage {
                topology: geometry.stage2.clone(),
                until: Some(t2),
            },
            Stage {
                topology: geometry.stage3.clone(),
                until: None,
            },
        ],
        gamma,
        HamiltonianKind::Laplacian,
    )?;

    Ok(Fig6Protocol {
        geometry,
        sigma0,
        extra_periods,
        tau_s,
        tau_e,
        t1,
        t2,
        schedule,
        initial,
        goal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn component_vertices(topo: &GraphTopology, member: usize) -> Vec<usize> {
        let comp = topo.connected_components();
        let id = comp[member];
        (0..topo.vertex_count())
            .filter(|&v| comp[v] == id)
            .collect()
    }

    #[test]
    fn smallest_instance_builds() {
        let geom = build_fig6_geometry(4, 12).unwrap();
        assert_eq!(geom.vertex_count(), 20);
        let left = component_vertices(&geom.stage1, geom.labels.a);
        assert_eq!(left.len(), 4);
        assert!(left.contains(&geom.labels.b));
        let right = component_vertices(&geom.stage3, geom.labels.c);
        assert_eq!(right.len(), 4);
        assert!(right.contains(&geom.labels.d));
    }

    #[test]
    fn stage2_is_one_large_cycle_with_antipodal_poles() {
        let geom = build_fig6_geometry(20, 60).unwrap();
        let active = component_vertices(&geom.stage2, geom.labels.a);
        assert_eq!(active.len(), geom.major_cycle_len());
        assert!(active.contains(&geom.labels.c));
        assert!(!active.contains(&geom.labels.b));
        assert!(!active.contains(&geom.labels.d));
        for &v in &active {
            assert_eq!(
                geom.stage2.degree(v),
                2,
                "vertex {v} is not on a plain cycle"
            );
        }
        let order = geom.major_cycle_order();
        assert_eq!(order.len(), geom.major_cycle_len());
        assert_eq!(order[0], geom.labels.a);
        assert_eq!(order[geom.major_cycle_len() / 2], geom.labels.c);
        // order really is a cycle of stage2
        for w in order.windows(2) {
            assert!(geom.stage2.has_edge(w[0], w[1]));
        }
        assert!(geom.stage2.has_edge(*order.last().unwrap(), order[0]));
    }

    #[test]
    fn stages_share_the_vertex_set_and_flip_two_edge_pairs() {
        let geom = build_fig6_geometry(8, 6).unwrap();
        assert_eq!(geom.stage1.vertex_count(), geom.stage2.vertex_count());
        assert_eq!(geom.stage2.vertex_count(), geom.stage3.vertex_count());
        // each switch removes two edges and adds two
        let s1: Vec<_> = geom.stage1.edges().collect();
        let s2: Vec<_> = geom.stage2.edges().collect();
        let removed = s1.iter().filter(|e| !s2.contains(e)).count();
        let added = s2.iter().filter(|e| !s1.contains(e)).count();
        assert_eq!((removed, added), (2, 2));
    }

    #[test]
    fn geometry_validates_sizes() {
        assert!(build_fig6_geometry(6, 8).is_err());
        assert!(build_fig6_geometry(8, 7).is_err());
        assert!(build_fig6_geometry(0, 8).is_err());
        assert!(build_fig6_geometry(8, 2).is_err());
    }

    #[test]
    fn probe_at_zero_returns_initial_state() {
        let plan = plan_fig6_protocol(8, 6, 1.0, 0, 1.0).unwrap();
        let out = plan.schedule.run(&plan.initial, &[0.0]).unwrap();
        for (a, b) in out[0].1.amplitudes().iter().zip(plan.initial.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn schedule_validation() {
        let topo = GraphTopology::cycle(4).unwrap();
        let stage = |until| Stage {
            topology: topo.clone(),
            until,
        };
        assert!(SwitchSchedule::new(vec![], 1.0, HamiltonianKind::Laplacian).is_err());
        assert!(
            SwitchSchedule::new(vec![stage(Some(1.0))], 1.0, HamiltonianKind::Laplacian).is_err()
        );
        assert!(SwitchSchedule::new(
            vec![stage(Some(2.0)), stage(Some(1.0)), stage(None)],
            1.0,
            HamiltonianKind::Laplacian
        )
        .is_err());
        let ok = SwitchSchedule::new(
            vec![stage(Some(1.0)), stage(Some(2.0)), stage(None)],
            1.0,
            HamiltonianKind::Laplacian,
        )
        .unwrap();
        assert_eq!(ok.switch_times(), vec![1.0, 2.0]);
        assert_eq!(ok.stage_at(0.5), 0);
        assert_eq!(ok.stage_at(1.0), 1);
        assert_eq!(ok.stage_at(7.0), 2);
    }

    #[test]
    fn negative_probe_is_rejected() {
        let plan = plan_fig6_protocol(8, 6, 1.0, 0, 1.0).unwrap();
        assert!(matches!(
            plan.schedule.run(&plan.initial, &[-1.0]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn stray_initial_mass_is_rejected() {
        let plan = plan_fig6_protocol(8, 6, 1.0, 0, 1.0).unwrap();
        let n = plan.geometry.vertex_count();
        let mut amps = vec![Complex64::ZERO; n];
        let x = (0.5f64).sqrt();
        amps[plan.geometry.labels.a] = Complex64::new(x, 0.0);
        amps[plan.geometry.labels.c] = Complex64::new(x, 0.0);
        let split = WalkState::new(amps, 0.0).unwrap();
        assert!(matches!(
            plan.schedule.run(&split, &[1.0]),
            Err(Error::InconsistentInitialState(_))
        ));
    }

    #[test]
    fn norm_survives_both_switches() {
        let plan = plan_fig6_protocol(8, 6, 0.8, 0, 1.0).unwrap();
        let t_end = plan.t2 + 2.0 * plan.tau_s;
        let out = plan
            .schedule
            .run(&plan.initial, &[plan.t1, plan.t2, t_end])
            .unwrap();
        for (_, state) in &out {
            assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn state_is_centered_at_a_when_the_first_switch_fires() {
        let plan = plan_fig6_protocol(20, 60, 2.0, 0, 1.0).unwrap();
        let out = plan.schedule.run(&plan.initial, &[plan.t1]).unwrap();
        let profile = out[0].1.probability_profile();
        let left: Vec<f64> = plan
            .geometry
            .left_ring_order()
            .iter()
            .map(|&v| profile[v])
            .collect();
        let m = crate::states::moments_of_profile(&left).unwrap();
        let dist = (m.mean_vertex).min(20.0 - m.mean_vertex);
        assert!(
            dist < plan.sigma0 / 2.0,
            "center {} drifted from a",
            m.mean_vertex
        );
    }
}
