//! The generic module `M_t(Γ_X)`: free over `ℚ[t, t⁻¹]` on the vertices of
//! the orbit hypergraph, with
//!
//! ```text
//! T_s v = −v + γ_{v,s×v}(t) · Σ_{v' ∈ e} v'
//! T_o v = o×v
//! ```

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::{Add, Sub};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::coxeter::{format_word, AffinePermutation};
use crate::hecke::HeckeElement;
use crate::orbit_graph::{og_edge_sum, og_gamma, og_lookup, og_orbit_act, GraphError, OrbitGraph, TransitionKind, VertexId};
use crate::ring::{LaurentPoly, Rational, RingError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModuleError {
    #[error("support touches boundary vertex {0}")]
    BoundaryTouched(VertexId),
    #[error("orbit path hit boundary vertex {partial}")]
    HitBoundary { partial: VertexId },
    #[error("length condition fails: l_σ(w×x) = {actual}, 2·l(w)+l_σ(x) = {expected}")]
    PreconditionFailed { expected: u32, actual: u32 },
    #[error(
        "insufficient margin: boundary starts at l_σ = {boundary}, depth {depth} needs {required} layers of room"
    )]
    InsufficientMargin { boundary: u32, depth: u32, required: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

fn lift(e: GraphError) -> ModuleError {
    match e {
        GraphError::BoundaryVertex(v) => ModuleError::BoundaryTouched(v),
        GraphError::HitBoundary { partial } => ModuleError::HitBoundary { partial },
        other => ModuleError::Graph(other),
    }
}

/// `Σ c_v · 1_v`. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModuleVector {
    terms: BTreeMap<VertexId, LaurentPoly>,
}

impl ModuleVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `1_v`.
    pub fn basis(v: VertexId) -> Self {
        let mut out = Self::zero();
        out.add_term(v, LaurentPoly::one());
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (VertexId, LaurentPoly)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (v, c) in iter {
            out.add_term(v, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<VertexId, LaurentPoly> {
        &self.terms
    }

    pub fn coeff(&self, v: VertexId) -> LaurentPoly {
        self.terms.get(&v).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> BTreeSet<VertexId> {
        self.terms.keys().copied().collect()
    }

    pub fn add_term(&mut self, v: VertexId, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(v) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &ModuleVector, c: &LaurentPoly) {
        for (&v, d) in &other.terms {
            self.add_term(v, c * d);
        }
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    /// Renders as `1*[x[]] + (t-1)/2*[z0]` in vertex-id order.
    pub fn render(&self, g: &OrbitGraph) -> String {
        render_terms(self.terms.iter().map(|(&v, c)| (g.vertex(v).label.as_str(), c.clone())))
    }
}

fn render_terms<'a>(terms: impl Iterator<Item = (&'a str, LaurentPoly)>) -> String {
    let mut out = String::new();
    for (k, (label, c)) in terms.enumerate() {
        let neg = c.is_negative_leading();
        let shown = if neg { -c } else { c };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let _ = write!(out, "{}*[{label}]", shown.render_coefficient());
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Renders a specialized vector like [`ModuleVector::render`].
pub fn render_specialized(g: &OrbitGraph, vec: &BTreeMap<VertexId, Rational>) -> String {
    render_terms(vec.iter().map(|(&v, c)| (g.vertex(v).label.as_str(), LaurentPoly::constant(c.clone()))))
}

impl Add<&ModuleVector> for &ModuleVector {
    type Output = ModuleVector;
    fn add(self, rhs: &ModuleVector) -> ModuleVector {
        let mut out = self.clone();
        out.add_scaled(rhs, &LaurentPoly::one());
        out
    }
}

impl Sub<&ModuleVector> for &ModuleVector {
    type Output = ModuleVector;
    fn sub(self, rhs: &ModuleVector) -> ModuleVector {
        let mut out = self.clone();
        out.add_scaled(rhs, &LaurentPoly::from_int(-1));
        out
    }
}

/// `T_s · vec`.
pub fn m_act_gen(g: &OrbitGraph, s: usize, vec: &ModuleVector) -> Result<ModuleVector, ModuleError> {
    let mut out = ModuleVector::zero();
    for (&v, c) in vec.terms() {
        let gamma = og_gamma(g, v, s).map_err(lift)?;
        let edge = og_lookup(g, v, s).map_err(lift)?.edge;
        out.add_term(v, -c);
        out.add_scaled(&og_edge_sum(g, edge).map_err(lift)?, &(c * &gamma));
    }
    Ok(out)
}

/// `T_o · vec` for the Ω element with index `o`.
pub fn m_act_omega(g: &OrbitGraph, o: usize, vec: &ModuleVector) -> Result<ModuleVector, ModuleError> {
    let mut out = ModuleVector::zero();
    for (&v, c) in vec.terms() {
        out.add_term(g.omega_act(o, v)?, c.clone());
    }
    Ok(out)
}

/// Applies `T_{s_1} ⋯ T_{s_k}` for the word `[s_1, …, s_k]`, rightmost first.
pub fn m_act_word(g: &OrbitGraph, word: &[usize], vec: &ModuleVector) -> Result<ModuleVector, ModuleError> {
    let mut cur = vec.clone();
    for &s in word.iter().rev() {
        cur = m_act_gen(g, s, &cur)?;
    }
    Ok(cur)
}

/// `h · vec`, each `T_w` factored along its reduced word.
pub fn m_act(g: &OrbitGraph, h: &HeckeElement, vec: &ModuleVector) -> Result<ModuleVector, ModuleError> {
    if h.rank() != g.rank() {
        return Err(GraphError::Coxeter(crate::coxeter::CoxeterError::RankMismatch(g.rank(), h.rank())).into());
    }
    let mut out = ModuleVector::zero();
    for (w, c) in h.terms() {
        let part = m_act_word(g, &w.reduced_word(), vec)?;
        out.add_scaled(&part, c);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Quadratic,
    Braid,
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub check: CheckKind,
    pub vertex: String,
    pub generator: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationReport {
    pub records: Vec<CheckRecord>,
}

impl RelationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status != CheckStatus::Pass)
    }

    pub fn is_clean(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn count(&self, kind: CheckKind) -> usize {
        self.records.iter().filter(|r| r.check == kind).count()
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

/// Longest word occurring in a defining relation.
fn longest_relation(g: &OrbitGraph) -> u32 {
    g.coxeter().finite_bonds().iter().map(|b| b.2).max().unwrap_or(0).max(2)
}

/// Checks the quadratic, braid and Ω relations on `1_v` for every interior
/// vertex with `l_σ ≤ depth`.
pub fn m_verify_relations(g: &OrbitGraph, depth: u32) -> Result<RelationReport, ModuleError> {
    let required = 2 * longest_relation(g);
    if let Some(boundary) = g.min_boundary_length() {
        if boundary < depth + required {
            return Err(ModuleError::InsufficientMargin { boundary, depth, required });
        }
    }
    let targets: Vec<VertexId> = g.interior().filter(|&v| g.l_sigma(v) <= depth).collect();
    let per_vertex: Vec<Vec<CheckRecord>> = targets.par_iter().map(|&v| vertex_checks(g, v)).collect();
    Ok(RelationReport { records: per_vertex.into_iter().flatten().collect() })
}

fn record(g: &OrbitGraph, check: CheckKind, v: VertexId, generator: String, outcome: Result<bool, ModuleError>) -> CheckRecord {
    let (status, detail) = match outcome {
        Ok(true) => (CheckStatus::Pass, None),
        Ok(false) => (CheckStatus::Fail, None),
        Err(e) => (CheckStatus::Error, Some(e.to_string())),
    };
    CheckRecord { check, vertex: g.vertex(v).label.clone(), generator, status, detail }
}

fn vertex_checks(g: &OrbitGraph, v: VertexId) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let basis = ModuleVector::basis(v);
    let t = LaurentPoly::t();
    for s in 0..g.rank() {
        // (T_s + 1)(T_s − t) 1_v = T_s² v + (1 − t) T_s v − t v
        let outcome = (|| {
            let once = m_act_gen(g, s, &basis)?;
            let twice = m_act_gen(g, s, &once)?;
            let mut acc = twice;
            acc.add_scaled(&once, &(&LaurentPoly::one() - &t));
            acc.add_scaled(&basis, &-&t);
            Ok(acc.is_zero())
        })();
        out.push(record(g, CheckKind::Quadratic, v, format!("s{s}"), outcome));
    }
    for (i, j, m) in g.coxeter().finite_bonds() {
        let outcome = (|| {
            let word = |a: usize, b: usize| -> Vec<usize> { (0..m).map(|k| if k % 2 == 0 { a } else { b }).collect() };
            Ok(m_act_word(g, &word(i, j), &basis)? == m_act_word(g, &word(j, i), &basis)?)
        })();
        out.push(record(g, CheckKind::Braid, v, format!("s{i},s{j}"), outcome));
    }
    let omega = g.coxeter().omega();
    for (o, perm) in omega.iter().enumerate() {
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            continue;
        }
        for s in 0..g.rank() {
            let outcome = (|| {
                let lhs = m_act_omega(g, o, &m_act_gen(g, s, &basis)?)?;
                let rhs = m_act_gen(g, perm[s], &m_act_omega(g, o, &basis)?)?;
                Ok(lhs == rhs)
            })();
            out.push(record(g, CheckKind::Omega, v, format!("o{o},s{s}"), outcome));
        }
    }
    out
}

/// Whether `T_w 1_x = 1_{w×x}` under the length condition
/// `l_σ(w×x) = 2·l(w) + l_σ(x)`.
pub fn m_check_tw_formula(g: &OrbitGraph, w: &AffinePermutation, x: VertexId) -> Result<bool, ModuleError> {
    let target = og_orbit_act(g, w, x).map_err(lift)?;
    let expected = 2 * w.length() as u32 + g.l_sigma(x);
    let actual = g.l_sigma(target);
    if actual != expected {
        return Err(ModuleError::PreconditionFailed { expected, actual });
    }
    let image = m_act_word(g, &w.reduced_word(), &ModuleVector::basis(x)).map_err(|e| match e {
        ModuleError::BoundaryTouched(v) => ModuleError::HitBoundary { partial: v },
        other => other,
    })?;
    Ok(image == ModuleVector::basis(target))
}

/// Coefficientwise specialization `t ↦ q`.
pub fn m_specialize(vec: &ModuleVector, q: &Rational) -> Result<BTreeMap<VertexId, Rational>, ModuleError> {
    if q.is_zero() {
        return Err(RingError::EvalAtZero.into());
    }
    let mut out = BTreeMap::new();
    for (&v, c) in vec.terms() {
        let value = c.eval(q)?;
        if !value.is_zero() {
            out.insert(v, value);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationException {
    pub vertex: VertexId,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenerationReport {
    /// Interior vertices without a descent.
    pub minimal: Vec<VertexId>,
    pub exceptions: Vec<GenerationException>,
    /// Number of non-minimal vertices certified as `T_w 1_x`.
    pub certified: usize,
}

impl GenerationReport {
    pub fn is_clean(&self) -> bool {
        self.exceptions.is_empty()
    }
}

/// Certifies that every interior vertex up to `depth` is reached from a
/// descent-free vertex `x` as `1_v = T_w 1_x` with `l_σ(v) = 2·l(w) + l_σ(x)`.
pub fn m_generation_check(g: &OrbitGraph, depth: u32) -> GenerationReport {
    let mut report = GenerationReport::default();
    for v in g.interior().filter(|&v| g.l_sigma(v) <= depth) {
        let descent = |u: VertexId| {
            (0..g.rank()).find(|&s| g.transition(u, s).is_some_and(|t| t.kind == TransitionKind::SimpleDown))
        };
        if descent(v).is_none() {
            report.minimal.push(v);
            continue;
        }
        let mut word = Vec::new();
        let mut cur = v;
        let mut failure = None;
        while let Some(s) = descent(cur) {
            word.push(s);
            cur = g.transition(cur, s).expect("descent exists").target;
            if !g.is_interior(cur) {
                failure = Some(format!("descent chain leaves the interior at {}", g.vertex(cur).label));
                break;
            }
        }
        let reason = failure.or_else(|| certify(g, v, cur, &word).err());
        match reason {
            Some(reason) => report.exceptions.push(GenerationException { vertex: v, reason }),
            None => report.certified += 1,
        }
    }
    report
}

fn certify(g: &OrbitGraph, v: VertexId, x: VertexId, word: &[usize]) -> Result<(), String> {
    let w = AffinePermutation::from_word(g.rank(), word).map_err(|e| e.to_string())?;
    if w.length() != word.len() {
        return Err(format!("descent word {} is not reduced", format_word(word)));
    }
    let expected = 2 * word.len() as u32 + g.l_sigma(x);
    if g.l_sigma(v) != expected {
        return Err(format!("l_σ = {} but 2·l(w)+l_σ(x) = {expected}", g.l_sigma(v)));
    }
    match og_orbit_act(g, &w, x) {
        Ok(target) if target == v => {}
        Ok(target) => return Err(format!("w×x = {} instead of the vertex itself", g.vertex(target).label)),
        Err(e) => return Err(e.to_string()),
    }
    match m_check_tw_formula(g, &w, x) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("T_w 1_x ≠ 1_v for w = {}", format_word(word))),
        Err(e) => Err(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterData;
    use crate::orbit_graph::Transition;
    use crate::ring::{int, rat};

    /// Infinite-dihedral "regular" module truncated at length 6: vertices
    /// are group elements, every transition pure.
    fn regular_dihedral(max: usize) -> OrbitGraph {
        let mut g = OrbitGraph::new(CoxeterData::new(2).unwrap());
        let mut elems = vec![AffinePermutation::identity(2)];
        let mut k = 0;
        while k < elems.len() {
            let w = elems[k].clone();
            for s in 0..2 {
                let sw = w.left_mul_gen(s).unwrap();
                if sw.length() <= max && !elems.contains(&sw) {
                    elems.push(sw);
                }
            }
            k += 1;
        }
        for w in &elems {
            let l = w.length();
            g.add_vertex(format!("[{}]", format_word(&w.reduced_word())), 2 * l as u32, l + 1 >= max);
        }
        for (a, w) in elems.iter().enumerate() {
            for s in 0..2 {
                let sw = w.left_mul_gen(s).unwrap();
                let Some(b) = elems.iter().position(|u| *u == sw) else { continue };
                if a < b {
                    let e = g.add_edge(vec![a, b]);
                    g.set_transition(a, s, Transition { kind: TransitionKind::SimpleUp, target: b, edge: e });
                    g.set_transition(b, s, Transition { kind: TransitionKind::SimpleDown, target: a, edge: e });
                }
            }
        }
        g
    }

    #[test]
    fn regular_module_is_valid_and_satisfies_relations() {
        let g = regular_dihedral(8);
        assert!(crate::orbit_graph::og_validate(&g).is_empty());
        let report = m_verify_relations(&g, 6).unwrap();
        assert!(report.is_clean(), "{}", report.to_json_lines());
        assert_eq!(report.count(CheckKind::Quadratic), 2 * g.interior().filter(|&v| g.l_sigma(v) <= 6).count());
    }

    #[test]
    fn simple_formulas() {
        let g = regular_dihedral(6);
        let up = m_act_gen(&g, 1, &ModuleVector::basis(0)).unwrap();
        let target = g.transition(0, 1).unwrap().target;
        assert_eq!(up, ModuleVector::basis(target));
        // SimpleDown: t·1_{s×x} + (t−1)·1_x
        let down = m_act_gen(&g, 1, &ModuleVector::basis(target)).unwrap();
        let expected = ModuleVector::from_terms([
            (0, LaurentPoly::t()),
            (target, &LaurentPoly::t() - &LaurentPoly::one()),
        ]);
        assert_eq!(down, expected);
    }

    #[test]
    fn corrupted_gamma_is_caught() {
        let mut g = regular_dihedral(8);
        // turn one up/down pair into an edge-mediated one
        let tr = *g.transition(0, 0).unwrap();
        g.set_transition(0, 0, Transition { kind: TransitionKind::EdgeMediated, ..tr });
        let report = m_verify_relations(&g, 6).unwrap();
        let bad: Vec<_> = report.failures().collect();
        assert!(bad.iter().any(|r| r.vertex == g.vertex(0).label && r.check == CheckKind::Quadratic));
    }

    #[test]
    fn margin_is_enforced() {
        let g = regular_dihedral(8);
        assert!(matches!(m_verify_relations(&g, 12), Err(ModuleError::InsufficientMargin { .. })));
    }

    #[test]
    fn boundary_contact_errors() {
        let g = regular_dihedral(4);
        let top = g.vertices().iter().position(|v| v.boundary).unwrap();
        assert_eq!(m_act_gen(&g, 0, &ModuleVector::basis(top)), Err(ModuleError::BoundaryTouched(top)));
    }

    #[test]
    fn act_is_compatible_with_products() {
        let g = regular_dihedral(12);
        let h1 = &HeckeElement::generator(2, 0).unwrap() + &HeckeElement::scalar(2, LaurentPoly::t());
        let h2 = &HeckeElement::generator(2, 1).unwrap() - &HeckeElement::basis(AffinePermutation::from_word(2, &[0, 1]).unwrap());
        for v in g.interior().filter(|&v| g.l_sigma(v) <= 4) {
            let b = ModuleVector::basis(v);
            let lhs = m_act(&g, &h1.mul(&h2).unwrap(), &b).unwrap();
            let rhs = m_act(&g, &h1, &m_act(&g, &h2, &b).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
        let id = HeckeElement::one(2);
        assert_eq!(m_act(&g, &id, &ModuleVector::basis(3)).unwrap(), ModuleVector::basis(3));
    }

    #[test]
    fn tw_formula_on_regular_module() {
        let g = regular_dihedral(10);
        let w = AffinePermutation::from_word(2, &[0, 1, 0]).unwrap();
        assert!(m_check_tw_formula(&g, &w, 0).unwrap());
        assert!(m_check_tw_formula(&g, &AffinePermutation::identity(2), 4).unwrap());
        let back = AffinePermutation::from_word(2, &[1]).unwrap();
        let x = og_orbit_act(&g, &AffinePermutation::from_word(2, &[1]).unwrap(), 0).unwrap();
        assert!(matches!(m_check_tw_formula(&g, &back, x), Err(ModuleError::PreconditionFailed { .. })));
    }

    #[test]
    fn specialize_examples() {
        let half = (&LaurentPoly::t() - &LaurentPoly::one()).scale(&rat(1, 2));
        let v = ModuleVector::from_terms([(0, half)]);
        assert_eq!(m_specialize(&v, &int(7)).unwrap(), BTreeMap::from([(0, int(3))]));
        let z = ModuleVector::from_terms([(1, &LaurentPoly::t() - &LaurentPoly::t())]);
        assert!(m_specialize(&z, &int(5)).unwrap().is_empty());
        assert_eq!(m_specialize(&v, &int(0)), Err(ModuleError::Ring(RingError::EvalAtZero)));
    }

    #[test]
    fn rendering() {
        let g = regular_dihedral(4);
        let half = (&LaurentPoly::t() - &LaurentPoly::one()).scale(&rat(1, 2));
        let v = ModuleVector::from_terms([(0, LaurentPoly::one()), (1, half), (2, LaurentPoly::from_int(-2))]);
        let labels: Vec<_> = (0..3).map(|k| g.vertex(k).label.clone()).collect();
        assert_eq!(
            v.render(&g),
            format!("1*[{}] + (t-1)/2*[{}] - 2*[{}]", labels[0], labels[1], labels[2])
        );
        assert_eq!(ModuleVector::zero().render(&g), "0");
    }

    #[test]
    fn generation_on_regular_module() {
        let g = regular_dihedral(10);
        let report = m_generation_check(&g, 14);
        assert_eq!(report.minimal, vec![0]);
        assert!(report.is_clean(), "{:?}", report.exceptions);
        let mut single = OrbitGraph::new(CoxeterData::new(2).unwrap());
        single.add_vertex("only", 0, false);
        assert_eq!(m_generation_check(&single, 0).minimal, vec![0]);
    }

    #[test]
    fn report_json_lines() {
        let g = regular_dihedral(8);
        let report = m_verify_relations(&g, 0).unwrap();
        let lines = report.to_json_lines();
        assert_eq!(
            lines.lines().next().unwrap(),
            "{\"check\":\"quadratic\",\"vertex\":\"[]\",\"generator\":\"s0\",\"status\":\"pass\"}"
        );
    }
}
