//! The orbit hypergraph `Γ_X`.
//!
//! Vertices are orbits, labelled by their length `l_σ` and an Ω-color. For
//! every vertex `v` and generator `s` the graph stores the target `s×v`, the
//! hyperedge containing both, and the transition kind, which fixes the
//! structure constant of `T_s` at `v`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coxeter::{AffinePermutation, CoxeterData, CoxeterError};
use crate::hecke_module::ModuleVector;
use crate::ring::{rat, LaurentPoly};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {0} is on the truncation boundary")]
    BoundaryVertex(VertexId),
    #[error("vertex {vertex} has no transition for generator s{generator}")]
    MissingTransition { vertex: VertexId, generator: usize },
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("orbit action reached boundary vertex {partial} with letters left")]
    HitBoundary { partial: VertexId },
    #[error("inconsistent lengths at vertex {vertex}: {first} vs {second}")]
    InconsistentLengths { vertex: VertexId, first: i64, second: i64 },
    #[error("vertex {0} is not reachable from the seeds")]
    UnreachableVertex(VertexId),
    #[error("unknown omega element {0}")]
    UnknownOmega(usize),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("malformed graph: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub l_sigma: u32,
    /// Index of the Ω element coloring this vertex.
    pub color: usize,
    pub label: String,
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransitionKind {
    SimpleUp,
    SimpleDown,
    EdgeMediated,
}

impl TransitionKind {
    fn reversed(self) -> Self {
        match self {
            Self::SimpleUp => Self::SimpleDown,
            Self::SimpleDown => Self::SimpleUp,
            Self::EdgeMediated => Self::EdgeMediated,
        }
    }

    fn length_step(self) -> i64 {
        match self {
            Self::SimpleUp => 2,
            Self::SimpleDown => -2,
            Self::EdgeMediated => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub kind: TransitionKind,
    pub target: VertexId,
    pub edge: EdgeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperEdge {
    pub id: EdgeId,
    pub members: Vec<VertexId>,
}

/// Length statistics of a hyperedge relative to one of its members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeStats {
    pub l_max: u32,
    pub l_min: u32,
    pub n_max: usize,
    pub n_min: usize,
    pub delta_max: bool,
    pub delta_min: bool,
}

impl EdgeStats {
    /// `(t−1)/n_max·δ_max + 2/n_min·δ_min`.
    pub fn gamma(&self) -> LaurentPoly {
        let mut g = LaurentPoly::zero();
        if self.delta_max {
            let tm1 = &LaurentPoly::t() - &LaurentPoly::one();
            g += tm1.scale(&rat(1, self.n_max as i64));
        }
        if self.delta_min {
            g += LaurentPoly::constant(rat(2, self.n_min as i64));
        }
        g
    }
}

/// One rule violation found by [`og_validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub vertex: Option<VertexId>,
    pub edge: Option<EdgeId>,
    pub generator: Option<usize>,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.rule)?;
        if let Some(v) = self.vertex {
            write!(f, " vertex={v}")?;
        }
        if let Some(e) = self.edge {
            write!(f, " edge={e}")?;
        }
        if let Some(s) = self.generator {
            write!(f, " gen=s{s}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitGraph {
    coxeter: CoxeterData,
    vertices: Vec<Vertex>,
    edges: Vec<HyperEdge>,
    transitions: Vec<Vec<Option<Transition>>>,
    /// `omega_action[o][v] = o×v`.
    omega_action: Vec<Vec<VertexId>>,
    labels: HashMap<String, VertexId>,
}

impl OrbitGraph {
    pub fn new(coxeter: CoxeterData) -> Self {
        let n_omega = coxeter.omega().len();
        Self {
            coxeter,
            vertices: Vec::new(),
            edges: Vec::new(),
            transitions: Vec::new(),
            omega_action: vec![Vec::new(); n_omega],
            labels: HashMap::new(),
        }
    }

    pub fn coxeter(&self) -> &CoxeterData {
        &self.coxeter
    }

    pub fn rank(&self) -> usize {
        self.coxeter.rank()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[HyperEdge] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edge(&self, e: EdgeId) -> Result<&HyperEdge, GraphError> {
        self.edges.get(e).ok_or(GraphError::UnknownEdge(e))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        !self.vertices[v].boundary
    }

    pub fn l_sigma(&self, v: VertexId) -> u32 {
        self.vertices[v].l_sigma
    }

    /// Looks a vertex up by label or numeric id.
    pub fn find(&self, key: &str) -> Option<VertexId> {
        if let Some(&v) = self.labels.get(key) {
            return Some(v);
        }
        key.parse::<usize>().ok().filter(|&v| v < self.vertices.len())
    }

    pub fn add_vertex(&mut self, label: impl Into<String>, l_sigma: u32, boundary: bool) -> VertexId {
        let id = self.vertices.len();
        let label = label.into();
        self.labels.insert(label.clone(), id);
        self.vertices.push(Vertex {
            id,
            l_sigma,
            color: 0,
            label,
            boundary,
        });
        self.transitions.push(vec![None; self.rank()]);
        for act in &mut self.omega_action {
            act.push(id);
        }
        id
    }

    pub fn set_color(&mut self, v: VertexId, color: usize) {
        self.vertices[v].color = color;
    }

    pub fn set_l_sigma(&mut self, v: VertexId, l: u32) {
        self.vertices[v].l_sigma = l;
    }

    pub fn add_edge(&mut self, members: Vec<VertexId>) -> EdgeId {
        let id = self.edges.len();
        self.edges.push(HyperEdge { id, members });
        id
    }

    pub fn set_transition(&mut self, v: VertexId, s: usize, t: Transition) {
        self.transitions[v][s] = Some(t);
    }

    pub fn transition(&self, v: VertexId, s: usize) -> Option<&Transition> {
        self.transitions.get(v)?.get(s)?.as_ref()
    }

    pub fn set_omega_action(&mut self, o: usize, v: VertexId, target: VertexId) -> Result<(), GraphError> {
        let act = self.omega_action.get_mut(o).ok_or(GraphError::UnknownOmega(o))?;
        act[v] = target;
        Ok(())
    }

    pub fn omega_act(&self, o: usize, v: VertexId) -> Result<VertexId, GraphError> {
        Ok(self.omega_action.get(o).ok_or(GraphError::UnknownOmega(o))?[v])
    }

    /// Interior vertex ids, ascending.
    pub fn interior(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).filter(|&v| self.is_interior(v))
    }

    /// Smallest `l_σ` carried by a boundary vertex.
    pub fn min_boundary_length(&self) -> Option<u32> {
        self.vertices.iter().filter(|v| v.boundary).map(|v| v.l_sigma).min()
    }

    pub fn edge_stats(&self, e: EdgeId, v: VertexId) -> Result<EdgeStats, GraphError> {
        let edge = self.edge(e)?;
        let lens: Vec<u32> = edge.members.iter().map(|&m| self.l_sigma(m)).collect();
        let l_max = *lens.iter().max().ok_or(GraphError::UnknownEdge(e))?;
        let l_min = *lens.iter().min().expect("nonempty");
        let lv = self.l_sigma(v);
        Ok(EdgeStats {
            l_max,
            l_min,
            n_max: lens.iter().filter(|&&l| l == l_max).count(),
            n_min: lens.iter().filter(|&&l| l == l_min).count(),
            delta_max: lv == l_max,
            delta_min: lv == l_min,
        })
    }

    /// Connected components under transitions, edges and Ω, each sorted.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut adj: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); self.len()];
        for (v, row) in self.transitions.iter().enumerate() {
            for t in row.iter().flatten() {
                adj[v].insert(t.target);
                adj[t.target].insert(v);
            }
        }
        for e in &self.edges {
            for &a in &e.members {
                for &b in &e.members {
                    adj[a].insert(b);
                }
            }
        }
        for act in &self.omega_action {
            for (v, &w) in act.iter().enumerate() {
                adj[v].insert(w);
                adj[w].insert(v);
            }
        }
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Vertex and edge counts per `l_σ` layer (an edge is counted at the
    /// smallest length among its members).
    pub fn layer_counts(&self) -> BTreeMap<u32, (usize, usize)> {
        let mut out: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
        for v in &self.vertices {
            out.entry(v.l_sigma).or_default().0 += 1;
        }
        for e in &self.edges {
            if let Some(l) = e.members.iter().map(|&m| self.l_sigma(m)).min() {
                out.entry(l).or_default().1 += 1;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = GraphJson {
            rank: self.rank(),
            omega: self
                .coxeter
                .omega()
                .iter()
                .enumerate()
                .map(|(o, perm)| OmegaJson {
                    id: o,
                    generator_perm: perm.clone(),
                    action: self.omega_action[o]
                        .iter()
                        .enumerate()
                        .filter(|(v, w)| v != *w)
                        .map(|(v, &w)| OmegaMoveJson { vertex: v, target: w })
                        .collect(),
                })
                .collect(),
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            transitions: self
                .transitions
                .iter()
                .enumerate()
                .flat_map(|(v, row)| {
                    row.iter().enumerate().filter_map(move |(s, t)| {
                        t.map(|t| TransitionJson {
                            vertex: v,
                            gen: s,
                            kind: t.kind,
                            target: t.target,
                            edge: t.edge,
                        })
                    })
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        let perms: Vec<Vec<usize>> = if doc.omega.is_empty() {
            vec![(0..doc.rank).collect()]
        } else {
            for (k, o) in doc.omega.iter().enumerate() {
                if o.id != k {
                    return Err(GraphError::Malformed(format!("omega ids must be 0..k in order, found {}", o.id)));
                }
            }
            doc.omega.iter().map(|o| o.generator_perm.clone()).collect()
        };
        let coxeter = CoxeterData::with_omega(doc.rank, perms)?;
        let mut g = OrbitGraph::new(coxeter);
        for (k, v) in doc.vertices.iter().enumerate() {
            if v.id != k {
                return Err(GraphError::Malformed(format!("vertex ids must be 0..n in order, found {} at {k}", v.id)));
            }
            if g.labels.contains_key(&v.label) {
                return Err(GraphError::Malformed(format!("duplicate vertex label {:?}", v.label)));
            }
            if v.color >= g.coxeter.omega().len() {
                return Err(GraphError::Malformed(format!("vertex {k} has unknown color {}", v.color)));
            }
            let id = g.add_vertex(v.label.clone(), v.l_sigma, v.boundary);
            g.set_color(id, v.color);
        }
        let nv = g.len();
        for (k, e) in doc.edges.iter().enumerate() {
            if e.id != k {
                return Err(GraphError::Malformed(format!("edge ids must be 0..m in order, found {} at {k}", e.id)));
            }
            if let Some(&bad) = e.members.iter().find(|&&m| m >= nv) {
                return Err(GraphError::Malformed(format!("edge {k} references unknown vertex {bad}")));
            }
            g.add_edge(e.members.clone());
        }
        for t in &doc.transitions {
            if t.vertex >= nv || t.target >= nv {
                return Err(GraphError::Malformed(format!("transition references unknown vertex ({} -> {})", t.vertex, t.target)));
            }
            if t.gen >= g.rank() {
                return Err(GraphError::Malformed(format!("transition generator s{} out of range", t.gen)));
            }
            if t.edge >= g.edges.len() {
                return Err(GraphError::Malformed(format!("transition references unknown edge {}", t.edge)));
            }
            if g.transitions[t.vertex][t.gen].is_some() {
                return Err(GraphError::Malformed(format!("duplicate transition ({}, s{})", t.vertex, t.gen)));
            }
            g.set_transition(t.vertex, t.gen, Transition { kind: t.kind, target: t.target, edge: t.edge });
        }
        for o in &doc.omega {
            for m in &o.action {
                if m.vertex >= nv || m.target >= nv {
                    return Err(GraphError::Malformed("omega action references unknown vertex".into()));
                }
                g.set_omega_action(o.id, m.vertex, m.target)?;
            }
        }
        Ok(g)
    }

    /// Graphviz rendering. Pair edges are plain undirected edges, larger
    /// hyperedges dashed cliques, singletons dotted self-loops; every drawn
    /// edge carries its hyperedge id as tooltip.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph gamma_x {\n  node [shape=box];\n");
        for v in &self.vertices {
            let style = if v.boundary { ", style=dashed" } else { "" };
            let _ = writeln!(
                out,
                "  v{} [label=\"{} (ℓ={})\"{style}];",
                v.id,
                v.label.replace('"', "\\\""),
                v.l_sigma
            );
        }
        for e in &self.edges {
            let m = &e.members;
            match m.len() {
                1 => {
                    let _ = writeln!(out, "  v{0} -- v{0} [style=dotted, tooltip=\"e{1}\"];", m[0], e.id);
                }
                2 => {
                    let _ = writeln!(out, "  v{} -- v{} [tooltip=\"e{}\"];", m[0], m[1], e.id);
                }
                _ => {
                    for i in 0..m.len() {
                        for j in (i + 1)..m.len() {
                            let _ = writeln!(out, "  v{} -- v{} [style=dashed, tooltip=\"e{}\"];", m[i], m[j], e.id);
                        }
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    rank: usize,
    #[serde(default)]
    omega: Vec<OmegaJson>,
    vertices: Vec<Vertex>,
    edges: Vec<HyperEdge>,
    transitions: Vec<TransitionJson>,
}

#[derive(Serialize, Deserialize)]
struct OmegaJson {
    id: usize,
    generator_perm: Vec<usize>,
    #[serde(default)]
    action: Vec<OmegaMoveJson>,
}

#[derive(Serialize, Deserialize)]
struct OmegaMoveJson {
    vertex: VertexId,
    target: VertexId,
}

#[derive(Serialize, Deserialize)]
struct TransitionJson {
    vertex: VertexId,
    gen: usize,
    kind: TransitionKind,
    target: VertexId,
    edge: EdgeId,
}

fn interior_transition(g: &OrbitGraph, v: VertexId, s: usize) -> Result<&Transition, GraphError> {
    if v >= g.len() {
        return Err(GraphError::UnknownVertex(v.to_string()));
    }
    if s >= g.rank() {
        return Err(CoxeterError::IndexOutOfRange { index: s, rank: g.rank() }.into());
    }
    if !g.is_interior(v) {
        return Err(GraphError::BoundaryVertex(v));
    }
    g.transition(v, s).ok_or(GraphError::MissingTransition { vertex: v, generator: s })
}

/// Structure constant of `T_s` at `v`: `(T_s + 1)·v = γ · (sum of the edge)`.
pub fn og_gamma(g: &OrbitGraph, v: VertexId, s: usize) -> Result<LaurentPoly, GraphError> {
    let tr = interior_transition(g, v, s)?;
    Ok(match tr.kind {
        TransitionKind::SimpleUp => LaurentPoly::one(),
        TransitionKind::SimpleDown => LaurentPoly::t(),
        TransitionKind::EdgeMediated => g.edge_stats(tr.edge, v)?.gamma(),
    })
}

/// Transition used at `(v, s)`; errors like [`og_gamma`].
pub fn og_lookup(g: &OrbitGraph, v: VertexId, s: usize) -> Result<Transition, GraphError> {
    interior_transition(g, v, s).copied()
}

/// Sum of the characteristic vectors of the members of `e`.
pub fn og_edge_sum(g: &OrbitGraph, e: EdgeId) -> Result<ModuleVector, GraphError> {
    let edge = g.edge(e)?;
    let mut out = ModuleVector::zero();
    for &m in &edge.members {
        out.add_term(m, LaurentPoly::one());
    }
    Ok(out)
}

/// Checks every structural invariant of the hypergraph. Returns an empty
/// list iff the graph is well formed.
pub fn og_validate(g: &OrbitGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |rule, vertex, edge, generator, detail: String| {
        out.push(Violation { rule, vertex, edge, generator, detail });
    };

    for e in g.edges() {
        let size = e.members.len();
        if !(1..=4).contains(&size) {
            push("edge-size", None, Some(e.id), None, format!("{size} members, expected 1..=4"));
        }
        let distinct: BTreeSet<_> = e.members.iter().collect();
        if distinct.len() != size {
            push("edge-distinct", None, Some(e.id), None, "repeated member".into());
        }
        let lens: BTreeSet<u32> = e.members.iter().map(|&m| g.l_sigma(m)).collect();
        if lens.len() > 2 {
            push("edge-lengths", None, Some(e.id), None, format!("member lengths {lens:?} take more than 2 values"));
        }
        if let (Some(lo), Some(hi)) = (lens.first(), lens.last()) {
            if hi - lo > 2 {
                push("edge-lengths", None, Some(e.id), None, format!("member lengths differ by {}", hi - lo));
            }
        }
    }

    for v in 0..g.len() {
        for s in 0..g.rank() {
            let Some(tr) = g.transition(v, s) else {
                if g.is_interior(v) {
                    push("interior-transition", Some(v), None, Some(s), "interior vertex lacks a transition".into());
                }
                continue;
            };
            let Ok(edge) = g.edge(tr.edge) else {
                push("transition-edge", Some(v), Some(tr.edge), Some(s), "unknown edge".into());
                continue;
            };
            if !edge.members.contains(&v) || !edge.members.contains(&tr.target) {
                push("transition-edge", Some(v), Some(tr.edge), Some(s), "edge does not contain v and s×v".into());
            }
            let dl = g.l_sigma(tr.target) as i64 - g.l_sigma(v) as i64;
            if dl != tr.kind.length_step() {
                push(
                    "transition-length",
                    Some(v),
                    Some(tr.edge),
                    Some(s),
                    format!("{:?} with l_σ change {dl}", tr.kind),
                );
            }
            match tr.kind {
                TransitionKind::SimpleUp | TransitionKind::SimpleDown => {
                    let pair: BTreeSet<_> = [v, tr.target].into_iter().collect();
                    let members: BTreeSet<_> = edge.members.iter().copied().collect();
                    if pair != members || tr.target == v {
                        push("simple-edge", Some(v), Some(tr.edge), Some(s), "simple transition edge must be {v, s×v}".into());
                    }
                }
                TransitionKind::EdgeMediated => {
                    let stats = g.edge_stats(tr.edge, v).expect("edge exists");
                    if stats.l_max - stats.l_min > 1 {
                        push("edge-mediated-spread", Some(v), Some(tr.edge), Some(s), "member lengths differ by more than 1".into());
                    }
                    if !(1..=2).contains(&stats.n_max) || !(1..=2).contains(&stats.n_min) {
                        push(
                            "edge-mediated-counts",
                            Some(v),
                            Some(tr.edge),
                            Some(s),
                            format!("n_max={} n_min={}", stats.n_max, stats.n_min),
                        );
                    }
                    for &m in &edge.members {
                        if !g.is_interior(m) {
                            continue;
                        }
                        match g.transition(m, s) {
                            Some(mt) if mt.edge == tr.edge && mt.kind == TransitionKind::EdgeMediated => {}
                            _ => push(
                                "edge-members",
                                Some(m),
                                Some(tr.edge),
                                Some(s),
                                "edge member does not use the same edge-mediated transition".into(),
                            ),
                        }
                    }
                }
            }
            // involution
            match g.transition(tr.target, s) {
                Some(back) => {
                    if back.target != v || back.edge != tr.edge || back.kind != tr.kind.reversed() {
                        push("involution", Some(v), Some(tr.edge), Some(s), "s×(s×v) ≠ v or edge/kind mismatch".into());
                    }
                }
                None if g.is_interior(tr.target) => {
                    push("involution", Some(v), Some(tr.edge), Some(s), "target lacks the reverse transition".into());
                }
                None => {}
            }
        }
    }

    let omega = g.coxeter().omega();
    for (o, act) in g.omega_action.iter().enumerate() {
        let image: BTreeSet<_> = act.iter().collect();
        if image.len() != g.len() {
            push("omega-bijective", None, None, None, format!("Ω element {o} does not permute the vertices"));
            continue;
        }
        for (v, &w) in act.iter().enumerate() {
            if g.l_sigma(v) != g.l_sigma(w) {
                push("omega-length", Some(v), None, None, format!("Ω element {o} changes l_σ"));
            }
        }
    }
    for (a, pa) in omega.iter().enumerate() {
        for (b, pb) in omega.iter().enumerate() {
            let composed: Vec<usize> = (0..g.rank()).map(|i| pa[pb[i]]).collect();
            let Some(c) = omega.iter().position(|p| *p == composed) else { continue };
            for v in 0..g.len() {
                if g.omega_action[a][g.omega_action[b][v]] != g.omega_action[c][v] {
                    push("omega-action", Some(v), None, None, format!("Ω elements {a}·{b} do not act as {c}"));
                    break;
                }
            }
        }
    }
    out
}

/// `w×v`, applying the letters of the reduced word of `w` right to left.
pub fn og_orbit_act(g: &OrbitGraph, w: &AffinePermutation, v: VertexId) -> Result<VertexId, GraphError> {
    if w.rank() != g.rank() {
        return Err(CoxeterError::RankMismatch(g.rank(), w.rank()).into());
    }
    if v >= g.len() {
        return Err(GraphError::UnknownVertex(v.to_string()));
    }
    let mut cur = v;
    for &s in w.reduced_word().iter().rev() {
        if !g.is_interior(cur) {
            return Err(GraphError::HitBoundary { partial: cur });
        }
        cur = og_lookup(g, cur, s)?.target;
    }
    Ok(cur)
}

/// Fills `l_σ` by propagating from the seeds: SimpleUp adds 2, SimpleDown
/// subtracts 2, EdgeMediated and Ω preserve the length. Unseen members of a
/// 4-edge are placed one above the pair they are reached from.
pub fn og_derive_lengths(g: &OrbitGraph, seeds: &BTreeMap<VertexId, u32>) -> Result<OrbitGraph, GraphError> {
    let mut lens: Vec<Option<i64>> = vec![None; g.len()];
    let mut queue = VecDeque::new();
    for (&v, &l) in seeds {
        if v >= g.len() {
            return Err(GraphError::UnknownVertex(v.to_string()));
        }
        lens[v] = Some(l as i64);
        queue.push_back(v);
    }
    let assign = |lens: &mut Vec<Option<i64>>, queue: &mut VecDeque<VertexId>, w: VertexId, val: i64| match lens[w] {
        None => {
            lens[w] = Some(val);
            queue.push_back(w);
            Ok(())
        }
        Some(old) if old != val => Err(GraphError::InconsistentLengths { vertex: w, first: old, second: val }),
        Some(_) => Ok(()),
    };
    while let Some(v) = queue.pop_front() {
        let lv = lens[v].expect("queued vertices have lengths");
        for s in 0..g.rank() {
            let Some(tr) = g.transition(v, s) else { continue };
            assign(&mut lens, &mut queue, tr.target, lv + tr.kind.length_step())?;
            // A 4-edge splits into two length classes of two members each,
            // one layer apart; the class not yet seen sits above.
            if tr.kind == TransitionKind::EdgeMediated {
                let edge = g.edge(tr.edge)?;
                if edge.members.len() == 4 {
                    for &m in &edge.members {
                        if m != v && m != tr.target && lens[m].is_none() {
                            assign(&mut lens, &mut queue, m, lv + 1)?;
                        }
                    }
                }
            }
        }
        for act in &g.omega_action {
            assign(&mut lens, &mut queue, act[v], lv)?;
        }
    }
    let mut out = g.clone();
    for (v, l) in lens.into_iter().enumerate() {
        let l = l.ok_or(GraphError::UnreachableVertex(v))?;
        if l < 0 {
            return Err(GraphError::InconsistentLengths { vertex: v, first: l, second: 0 });
        }
        out.set_l_sigma(v, l as u32);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A tiny fixture: one 4-edge with lengths {0,0,1,1} under s0, pair
    /// edges under s1.
    fn four_edge_fixture() -> OrbitGraph {
        let mut g = OrbitGraph::new(CoxeterData::new(2).unwrap());
        let z0 = g.add_vertex("z0", 0, false);
        let z1 = g.add_vertex("z1", 0, false);
        let a = g.add_vertex("a", 1, false);
        let b = g.add_vertex("b", 1, false);
        let a_up = g.add_vertex("a+", 3, true);
        let b_up = g.add_vertex("b+", 3, true);
        let e = g.add_edge(vec![z0, z1, a, b]);
        g.set_transition(z0, 0, Transition { kind: TransitionKind::EdgeMediated, target: z1, edge: e });
        g.set_transition(z1, 0, Transition { kind: TransitionKind::EdgeMediated, target: z0, edge: e });
        g.set_transition(a, 0, Transition { kind: TransitionKind::EdgeMediated, target: b, edge: e });
        g.set_transition(b, 0, Transition { kind: TransitionKind::EdgeMediated, target: a, edge: e });
        let ez = g.add_edge(vec![z0]);
        g.set_transition(z0, 1, Transition { kind: TransitionKind::EdgeMediated, target: z0, edge: ez });
        let ez1 = g.add_edge(vec![z1]);
        g.set_transition(z1, 1, Transition { kind: TransitionKind::EdgeMediated, target: z1, edge: ez1 });
        for (lo, hi) in [(a, a_up), (b, b_up)] {
            let pe = g.add_edge(vec![lo, hi]);
            g.set_transition(lo, 1, Transition { kind: TransitionKind::SimpleUp, target: hi, edge: pe });
            g.set_transition(hi, 1, Transition { kind: TransitionKind::SimpleDown, target: lo, edge: pe });
        }
        g
    }

    #[test]
    fn fixture_is_valid() {
        let g = four_edge_fixture();
        let v = og_validate(&g);
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn gamma_examples() {
        let g = four_edge_fixture();
        assert_eq!(og_gamma(&g, 0, 0).unwrap(), LaurentPoly::one());
        let half = (&LaurentPoly::t() - &LaurentPoly::one()).scale(&rat(1, 2));
        assert_eq!(og_gamma(&g, 2, 0).unwrap(), half);
        // singleton edge: (t-1) + 2
        assert_eq!(og_gamma(&g, 0, 1).unwrap(), &LaurentPoly::t() + &LaurentPoly::one());
        assert_eq!(og_gamma(&g, 2, 1).unwrap(), LaurentPoly::one());
        assert_eq!(og_gamma(&g, 4, 1), Err(GraphError::BoundaryVertex(4)));
    }

    #[test]
    fn gamma_missing_transition() {
        let mut g = OrbitGraph::new(CoxeterData::new(2).unwrap());
        g.add_vertex("lonely", 0, false);
        assert_eq!(og_gamma(&g, 0, 1), Err(GraphError::MissingTransition { vertex: 0, generator: 1 }));
    }

    #[test]
    fn edge_sum_examples() {
        let g = four_edge_fixture();
        let single = og_edge_sum(&g, 1).unwrap();
        assert_eq!(single, ModuleVector::basis(0));
        let pair = og_edge_sum(&g, 3).unwrap();
        assert_eq!(pair, &ModuleVector::basis(2) + &ModuleVector::basis(4));
        let four = og_edge_sum(&g, 0).unwrap();
        assert_eq!(four.terms().len(), 4);
        assert!(four.terms().values().all(|c| c.is_one()));
        assert_eq!(og_edge_sum(&g, 99), Err(GraphError::UnknownEdge(99)));
    }

    #[test]
    fn validate_negative_cases() {
        let mut g = OrbitGraph::new(CoxeterData::new(2).unwrap());
        let a = g.add_vertex("a", 0, true);
        let b = g.add_vertex("b", 3, true);
        let e = g.add_edge(vec![a, b]);
        g.set_transition(a, 0, Transition { kind: TransitionKind::SimpleUp, target: b, edge: e });
        g.set_transition(b, 0, Transition { kind: TransitionKind::SimpleDown, target: a, edge: e });
        let v = og_validate(&g);
        assert_eq!(v.iter().filter(|x| x.rule == "edge-lengths").count(), 1, "{v:?}");

        let mut g = OrbitGraph::new(CoxeterData::new(2).unwrap());
        let ids: Vec<_> = (0..5).map(|k| g.add_vertex(format!("v{k}"), 0, true)).collect();
        g.add_edge(ids);
        let v = og_validate(&g);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, "edge-size");
    }

    #[test]
    fn orbit_act_examples() {
        let g = four_edge_fixture();
        let id = AffinePermutation::identity(2);
        assert_eq!(og_orbit_act(&g, &id, 2).unwrap(), 2);
        let s0 = AffinePermutation::generator(2, 0).unwrap();
        let once = og_orbit_act(&g, &s0, 2).unwrap();
        assert_eq!(once, 3);
        assert_eq!(og_orbit_act(&g, &s0, once).unwrap(), 2);
        // s0·s1 × a: s1 first (a → a+), then s0 from a boundary vertex
        let w = AffinePermutation::from_word(2, &[0, 1]).unwrap();
        assert_eq!(og_orbit_act(&g, &w, 2), Err(GraphError::HitBoundary { partial: 4 }));
    }

    #[test]
    fn derive_lengths_examples() {
        let mut g = four_edge_fixture();
        for v in 0..g.len() {
            g.set_l_sigma(v, 0);
        }
        let seeds = BTreeMap::from([(0, 0), (2, 1)]);
        let d = og_derive_lengths(&g, &seeds).unwrap();
        let lens: Vec<u32> = d.vertices().iter().map(|v| v.l_sigma).collect();
        assert_eq!(lens, vec![0, 0, 1, 1, 3, 3]);

        let mut single = OrbitGraph::new(CoxeterData::new(2).unwrap());
        single.add_vertex("only", 7, false);
        let d = og_derive_lengths(&single, &BTreeMap::from([(0, 0)])).unwrap();
        assert_eq!(d.l_sigma(0), 0);

        let bad = og_derive_lengths(&g, &BTreeMap::from([(0, 0), (1, 2)]));
        assert!(matches!(bad, Err(GraphError::InconsistentLengths { .. })));
        // x-type members of the 4-edge are reached only through the edge
        let d = og_derive_lengths(&g, &BTreeMap::from([(0, 0)])).unwrap();
        let lens: Vec<u32> = d.vertices().iter().map(|v| v.l_sigma).collect();
        assert_eq!(lens, vec![0, 0, 1, 1, 3, 3]);
        let mut g2 = g.clone();
        g2.add_vertex("island", 0, false);
        assert!(matches!(
            og_derive_lengths(&g2, &BTreeMap::from([(0, 0), (2, 1)])),
            Err(GraphError::UnreachableVertex(6))
        ));
    }

    #[test]
    fn json_roundtrip_and_rejects() {
        let g = four_edge_fixture();
        let text = g.to_json();
        let back = OrbitGraph::from_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), text);
        // key order is fixed
        let keys: Vec<usize> = ["\"rank\"", "\"omega\"", "\"vertices\"", "\"edges\"", "\"transitions\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(OrbitGraph::from_json("{").is_err());
        let broken = text.replacen("\"id\": 1,", "\"id\": 7,", 1);
        assert!(OrbitGraph::from_json(&broken).is_err());
    }

    #[test]
    fn dot_export() {
        let g = four_edge_fixture();
        let dot = g.to_dot();
        assert!(dot.starts_with("graph gamma_x {"));
        assert!(dot.contains("v0 [label=\"z0 (ℓ=0)\"]"));
        assert_eq!(dot.matches("style=dashed, tooltip=\"e0\"").count(), 6);
        assert!(dot.contains("v2 -- v4 [tooltip=\"e3\"]"));
        assert_eq!(dot, g.to_dot());
    }

    #[test]
    fn omega_action_checks() {
        // Ω of order 2 swapping s0 and s1
        let cox = CoxeterData::with_omega(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let mut g = OrbitGraph::new(cox);
        let a = g.add_vertex("a", 0, true);
        let b = g.add_vertex("b", 0, true);
        g.set_omega_action(1, a, b).unwrap();
        g.set_omega_action(1, b, a).unwrap();
        assert!(og_validate(&g).is_empty());
        assert_eq!(g.omega_act(1, a).unwrap(), b);
        g.set_l_sigma(b, 2);
        assert!(og_validate(&g).iter().any(|v| v.rule == "omega-length"));
        assert!(matches!(g.omega_act(5, a), Err(GraphError::UnknownOmega(5))));
    }
}
