//! CTQW on arbitrary finite graphs via dense Hermitian eigendecomposition.
//!
//! The Hamiltonian follows the Laplacian convention: `H_aa = γ d_a` on the
//! diagonal and `H_ab = -γ` across each edge. Evolution is computed per
//! connected component, so amplitude can never cross between disconnected
//! pieces of the graph — components the state does not touch keep exact
//! zeros. On a pure cycle the probabilities agree with the spectral backend
//! (amplitudes differ by a global phase because the cycle code drops the
//! constant diagonal).

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, Write};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::WalkState;

/// Finite undirected graph with optional role labels on vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTopology {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
    labels: BTreeMap<String, usize>,
}

impl GraphTopology {
    /// Build a topology from an edge list. Self-loops and out-of-range
    /// endpoints are rejected; duplicate edges collapse.
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self {
            vertex_count,
            edges: set,
            labels: BTreeMap::new(),
        })
    }

    /// Cycle graph on `n` vertices in index order.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!("cycle needs n >= 3, got {n}")));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Attach a role tag (e.g. "a", "switch") to a vertex.
    pub fn set_label(&mut self, name: impl Into<String>, vertex: usize) -> Result<()> {
        let name = name.into();
        if vertex >= self.vertex_count {
            return Err(Error::InvalidInput(format!(
                "label '{name}' points at vertex {vertex}, out of range"
            )));
        }
        self.labels.insert(name, vertex);
        Ok(())
    }

    pub fn label(&self, name: &str) -> Option<usize> {
        self.labels.get(name).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.labels.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Component id per vertex, numbered in order of first appearance.
    pub fn connected_components(&self) -> Vec<usize> {
        let adjacency = self.adjacency_lists();
        let mut component = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for start in 0..self.vertex_count {
            if component[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            component[start] = next;
            while let Some(u) = stack.pop() {
                for &v in &adjacency[u] {
                    if component[v] == usize::MAX {
                        component[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        component
    }

    fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adjacency = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        adjacency
    }

    /// Write the plain-text interchange format: a `vertices N` header
    /// followed by one `u v` pair per line.
    pub fn write_edge_list(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "vertices {}", self.vertex_count)?;
        for &(u, v) in &self.edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    /// Parse the interchange format produced by [`Self::write_edge_list`].
    pub fn read_edge_list(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty edge-list file".into()))?
            .map_err(|e| Error::InvalidInput(format!("unreadable edge list: {e}")))?;
        let vertex_count = header
            .strip_prefix("vertices ")
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| {
                Error::InvalidInput(format!("bad header line '{header}', expected 'vertices N'"))
            })?;
        let mut edges = Vec::new();
        for line in lines {
            let line =
                line.map_err(|e| Error::InvalidInput(format!("unreadable edge list: {e}")))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |token: Option<&str>| {
                token
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("bad edge line '{line}'")))
            };
            let u = parse(parts.next())?;
            let v = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::InvalidInput(format!("bad edge line '{line}'")));
            }
            edges.push((u, v));
        }
        Self::new(vertex_count, edges)
    }
}

/// Which Hamiltonian the propagator exponentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HamiltonianKind {
    /// Degree diagonal minus adjacency, scaled by gamma (the full definition;
    /// this is the one that matters on non-regular switch graphs).
    #[default]
    Laplacian,
    /// Bare adjacency scaled by gamma, matching the cycle backend's phases.
    /// On regular graphs it differs from the Laplacian only by a global
    /// phase; exposed for comparison on non-regular stages.
    Adjacency,
}

/// Dense Hamiltonian matrix for the topology: `H_aa = γ d_a`,
/// `H_ab = -γ` for edges, 0 otherwise.
pub fn hamiltonian(topology: &GraphTopology, gamma: f64) -> DMatrix<f64> {
    hamiltonian_with(topology, gamma, HamiltonianKind::Laplacian)
}

pub fn hamiltonian_with(
    topology: &GraphTopology,
    gamma: f64,
    kind: HamiltonianKind,
) -> DMatrix<f64> {
    let n = topology.vertex_count();
    let mut h = DMatrix::zeros(n, n);
    for (u, v) in topology.edges() {
        match kind {
            HamiltonianKind::Laplacian => {
                h[(u, v)] = -gamma;
                h[(v, u)] = -gamma;
                h[(u, u)] += gamma;
                h[(v, v)] += gamma;
            }
            HamiltonianKind::Adjacency => {
                h[(u, v)] = gamma;
                h[(v, u)] = gamma;
            }
        }
    }
    h
}

struct ComponentEigen {
    vertices: Vec<usize>,
    eigenvalues: Vec<f64>,
    /// Column k is the k-th orthonormal eigenvector over `vertices`.
    eigenvectors: DMatrix<f64>,
}

/// Exact propagator for a fixed topology, decomposed per connected component.
pub struct GraphPropagator {
    vertex_count: usize,
    component_of: Vec<usize>,
    components: Vec<ComponentEigen>,
}

impl GraphPropagator {
    pub fn new(topology: &GraphTopology, gamma: f64, kind: HamiltonianKind) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "hopping rate must be positive, got {gamma}"
            )));
        }
        let component_of = topology.connected_components();
        let component_count = component_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); component_count];
        for (v, &c) in component_of.iter().enumerate() {
            members[c].push(v);
        }
        let full = hamiltonian_with(topology, gamma, kind);
        let components = members
            .into_iter()
            .map(|vertices| {
                let m = vertices.len();
                let mut sub = DMatrix::zeros(m, m);
                for (i, &vi) in vertices.iter().enumerate() {
                    for (j, &vj) in vertices.iter().enumerate() {
                        sub[(i, j)] = full[(vi, vj)];
                    }
                }
                let eigen = SymmetricEigen::new(sub);
                ComponentEigen {
                    vertices,
                    eigenvalues: eigen.eigenvalues.iter().copied().collect(),
                    eigenvectors: eigen.eigenvectors,
                }
            })
            .collect();
        Ok(Self {
            vertex_count: topology.vertex_count(),
            component_of,
            components,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn component_of(&self) -> &[usize] {
        &self.component_of
    }

    /// Apply `e^{-iHt}` to the state. Components carrying no amplitude are
    /// skipped, so their zeros are preserved bit for bit.
    pub fn evolve(&self, state: &WalkState, t: f64) -> Result<WalkState> {
        if state.n() != self.vertex_count {
            return Err(Error::InvalidInput(format!(
                "state has {} amplitudes but the graph has {} vertices",
                state.n(),
                self.vertex_count
            )));
        }
        let mut out = state.amplitudes().to_vec();
        for comp in &self.components {
            let m = comp.vertices.len();
            if comp.vertices.iter().all(|&v| out[v] == Complex64::ZERO) {
                continue;
            }
            // c = V^T psi, then psi' = V (e^{-i lambda t} .* c)
            let mut coeff = vec![Complex64::ZERO; m];
            for (k, c) in coeff.iter_mut().enumerate() {
                let mut acc = Complex64::ZERO;
                for (i, &v) in comp.vertices.iter().enumerate() {
                    acc += comp.eigenvectors[(i, k)] * out[v];
                }
                *c = acc * Complex64::from_polar(1.0, -comp.eigenvalues[k] * t);
            }
            for (i, &v) in comp.vertices.iter().enumerate() {
                let mut acc = Complex64::ZERO;
                for (k, &ck) in coeff.iter().enumerate() {
                    acc += comp.eigenvectors[(i, k)] * ck;
                }
                out[v] = acc;
            }
        }
        Ok(WalkState::from_parts(out, state.time() + t))
    }
}

/// One-shot evolution under the Laplacian Hamiltonian of `topology`.
pub fn evolve_general(topology: &GraphTopology, initial: &WalkState, t: f64) -> Result<WalkState> {
    GraphPropagator::new(topology, 1.0, HamiltonianKind::Laplacian)?.evolve(initial, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{evolve_cycle, CycleSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn path_graph_hamiltonian() {
        let topo = GraphTopology::new(2, [(0, 1)]).unwrap();
        let h = hamiltonian(&topo, 1.5);
        assert_eq!(h[(0, 0)], 1.5);
        assert_eq!(h[(1, 1)], 1.5);
        assert_eq!(h[(0, 1)], -1.5);
        assert_eq!(h[(1, 0)], -1.5);
    }

    #[test]
    fn empty_graph_hamiltonian_is_zero() {
        let topo = GraphTopology::new(3, []).unwrap();
        assert_eq!(hamiltonian(&topo, 1.0), DMatrix::zeros(3, 3));
    }

    #[test]
    fn c4_laplacian_spectrum() {
        let topo = GraphTopology::cycle(4).unwrap();
        let h = hamiltonian(&topo, 1.0);
        for i in 0..4 {
            assert_eq!(h[(i, i)], 2.0);
        }
        let mut eigs: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // 2 gamma - lambda_j(A) over the cycle spectrum {2, 0, -2, 0}
        for (got, want) in eigs.iter().zip([0.0, 2.0, 2.0, 4.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let topo = GraphTopology::cycle(7).unwrap();
        let state = WalkState::delta(7, 3).unwrap();
        let evolved = evolve_general(&topo, &state, 0.0).unwrap();
        for (a, b) in evolved.amplitudes().iter().zip(state.amplitudes()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn cycle_probabilities_match_spectral_backend() {
        for n in [5usize, 8, 13] {
            let topo = GraphTopology::cycle(n).unwrap();
            let spec = CycleSpec::new(n).unwrap();
            let state = WalkState::delta(n, 0).unwrap();
            for t in [0.4, 1.3, 5.7] {
                let via_graph = evolve_general(&topo, &state, t)
                    .unwrap()
                    .probability_profile();
                let via_spectral = evolve_cycle(&spec, &state, t)
                    .unwrap()
                    .probability_profile();
                for (a, b) in via_graph.iter().zip(&via_spectral) {
                    assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn adjacency_kind_matches_spectral_amplitudes() {
        let n = 9;
        let topo = GraphTopology::cycle(n).unwrap();
        let spec = CycleSpec::new(n).unwrap();
        let state = WalkState::delta(n, 2).unwrap();
        let prop = GraphPropagator::new(&topo, 1.0, HamiltonianKind::Adjacency).unwrap();
        let a = prop.evolve(&state, 2.1).unwrap();
        let b = evolve_cycle(&spec, &state, 2.1).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-11);
        }
    }

    #[test]
    fn disconnected_component_keeps_exact_zeros() {
        // two triangles, state on the first
        let topo = GraphTopology::new(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let state = WalkState::delta(6, 1).unwrap();
        let evolved = evolve_general(&topo, &state, 13.7).unwrap();
        for v in 3..6 {
            assert_eq!(evolved.amplitudes()[v], Complex64::ZERO);
        }
        let on_first: f64 = (0..3).map(|v| evolved.amplitudes()[v].norm_sqr()).sum();
        assert_abs_diff_eq!(on_first, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn norm_is_preserved() {
        let topo = GraphTopology::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let state = WalkState::delta(5, 0).unwrap();
        let evolved = evolve_general(&topo, &state, 8.3).unwrap();
        assert_abs_diff_eq!(evolved.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn components_are_identified() {
        let topo = GraphTopology::new(5, [(0, 1), (3, 4)]).unwrap();
        let comp = topo.connected_components();
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[3], comp[4]);
        assert_ne!(comp[0], comp[2]);
        assert_ne!(comp[0], comp[3]);
    }

    #[test]
    fn topology_validation() {
        assert!(GraphTopology::new(3, [(0, 0)]).is_err());
        assert!(GraphTopology::new(3, [(0, 3)]).is_err());
        let dup = GraphTopology::new(3, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(dup.edge_count(), 1);
        assert!(dup.has_edge(1, 0));
    }

    #[test]
    fn edge_list_round_trip() {
        let mut topo = GraphTopology::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        topo.set_label("a", 0).unwrap();
        let mut buf = Vec::new();
        topo.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("vertices 4\n"));
        let parsed = GraphTopology::read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(parsed.vertex_count(), 4);
        assert_eq!(parsed.edge_count(), 3);
        assert!(parsed.has_edge(1, 2));
    }

    #[test]
    fn edge_list_rejects_garbage() {
        assert!(GraphTopology::read_edge_list("nonsense\n".as_bytes()).is_err());
        assert!(GraphTopology::read_edge_list("vertices 3\n0 1 2\n".as_bytes()).is_err());
        assert!(GraphTopology::read_edge_list("vertices 3\n0 x\n".as_bytes()).is_err());
    }
}
