//! Brute-force orbits of the symmetric subgroups of `PGL₂(F_q)` on `P¹(F_q)`.
//!
//! Each of the twelve subgroup rows is materialized as an explicit element
//! set, checked for closure, and its orbits on the `q + 1` points computed
//! by union-find. The orbit sizes are compared against the symbolic table
//! and against the structure-constant formula
//! `γ = (t−1)/n_max·δ_max + 2/n_min·δ_min`.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::ring::{int, rat, LaurentPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{0} is not a prime")]
    NotAPrime(u64),
    #[error("q = {0} is even")]
    EvenQ(u64),
    #[error("{epsilon} is not a quadratic non-residue mod {q}")]
    NotANonResidue { epsilon: u64, q: u64 },
    #[error("subgroup {0} is not closed under multiplication")]
    NotClosed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self, OracleError> {
        if q % 2 == 0 {
            return Err(OracleError::EvenQ(q));
        }
        if q < 3 || (3..).step_by(2).take_while(|d| d * d <= q).any(|d| q % d == 0) {
            return Err(OracleError::NotAPrime(q));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b) % self.q
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.q - a) % self.q
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        a %= self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Panics on zero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.q != 0, "zero has no inverse");
        self.pow(a, self.q - 2)
    }

    /// Nonzero squares, by Euler's criterion.
    pub fn is_square(&self, a: u64) -> bool {
        a % self.q != 0 && self.pow(a, (self.q - 1) / 2) == 1
    }

    pub fn smallest_non_residue(&self) -> u64 {
        (2..self.q).find(|&a| !self.is_square(a)).expect("odd prime fields have non-residues")
    }

    pub fn nonzero(&self) -> impl Iterator<Item = u64> {
        1..self.q
    }
}

/// A point of `P¹(F_q)`: index `y` for `(1 : y)`, index `q` for `(0 : 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint(pub u64);

impl ProjPoint {
    pub fn from_coords(f: &PrimeField, x: u64, y: u64) -> Self {
        let (x, y) = (x % f.q, y % f.q);
        assert!(x != 0 || y != 0, "(0 : 0) is not a point");
        if x == 0 {
            ProjPoint(f.q)
        } else {
            ProjPoint(f.mul(y, f.inv(x)))
        }
    }

    pub fn coords(&self, f: &PrimeField) -> (u64, u64) {
        if self.0 == f.q {
            (0, 1)
        } else {
            (1, self.0)
        }
    }

    pub fn all(f: &PrimeField) -> impl Iterator<Item = ProjPoint> {
        (0..=f.q).map(ProjPoint)
    }
}

/// An element of `PGL₂(F_q)`, stored as `[a, b, c, d]` for `[[a, b], [c, d]]`
/// with the first nonzero entry scaled to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pgl2Elem([u64; 4]);

impl Pgl2Elem {
    /// `None` when the determinant vanishes.
    pub fn new(f: &PrimeField, m: [u64; 4]) -> Option<Self> {
        let m = m.map(|x| x % f.q);
        let det = f.sub(f.mul(m[0], m[3]), f.mul(m[1], m[2]));
        if det == 0 {
            return None;
        }
        let lead = *m.iter().find(|&&x| x != 0).expect("nonzero determinant");
        let s = f.inv(lead);
        Some(Self(m.map(|x| f.mul(x, s))))
    }

    pub fn identity() -> Self {
        Self([1, 0, 0, 1])
    }

    pub fn entries(&self) -> [u64; 4] {
        self.0
    }

    pub fn mul(&self, f: &PrimeField, o: &Self) -> Self {
        let [a, b, c, d] = self.0;
        let [e, g, h, k] = o.0;
        Self::new(
            f,
            [
                f.add(f.mul(a, e), f.mul(b, h)),
                f.add(f.mul(a, g), f.mul(b, k)),
                f.add(f.mul(c, e), f.mul(d, h)),
                f.add(f.mul(c, g), f.mul(d, k)),
            ],
        )
        .expect("product of invertible matrices")
    }

    pub fn det(&self, f: &PrimeField) -> u64 {
        let [a, b, c, d] = self.0;
        f.sub(f.mul(a, d), f.mul(b, c))
    }

    pub fn act(&self, f: &PrimeField, p: ProjPoint) -> ProjPoint {
        let [a, b, c, d] = self.0;
        let (x, y) = p.coords(f);
        ProjPoint::from_coords(f, f.add(f.mul(a, x), f.mul(b, y)), f.add(f.mul(c, x), f.mul(d, y)))
    }
}

impl fmt::Display for Pgl2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// The twelve rows of the rank-one table. `w` is the antidiagonal
/// involution normalizing the split torus, `w~ = diag(1, −1)` the one
/// normalizing the nonsplit torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubgroupRow {
    Psl2,
    Pgl2,
    Ts,
    Ts2,
    TsWTs,
    WTs2Ts2,
    WTsTs2,
    Tn,
    Tn2,
    TnWTn,
    WTn2Tn2,
    WTnTn2,
}

impl SubgroupRow {
    pub const ALL: [SubgroupRow; 12] = [
        Self::Psl2,
        Self::Pgl2,
        Self::Ts,
        Self::Ts2,
        Self::TsWTs,
        Self::WTs2Ts2,
        Self::WTsTs2,
        Self::Tn,
        Self::Tn2,
        Self::TnWTn,
        Self::WTn2Tn2,
        Self::WTnTn2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Psl2 => "PSL2",
            Self::Pgl2 => "PGL2",
            Self::Ts => "Ts",
            Self::Ts2 => "Ts2",
            Self::TsWTs => "Ts∪wTs",
            Self::WTs2Ts2 => "wTs2∪Ts2",
            Self::WTsTs2 => "wTs∪Ts2",
            Self::Tn => "Tn",
            Self::Tn2 => "Tn2",
            Self::TnWTn => "Tn∪w~Tn",
            Self::WTn2Tn2 => "w~Tn2∪Tn2",
            Self::WTnTn2 => "w~Tn∪Tn2",
        }
    }

    pub fn is_nonsplit(&self) -> bool {
        matches!(self, Self::Tn | Self::Tn2 | Self::TnWTn | Self::WTn2Tn2 | Self::WTnTn2)
    }

    /// Orbit sizes as printed, as polynomials in `t = q`.
    pub fn symbolic_sizes(&self) -> Vec<LaurentPoly> {
        let t = LaurentPoly::t;
        let c = |k: i64| LaurentPoly::from_int(k);
        let qm1 = || &t() - &c(1);
        let qp1 = || &t() + &c(1);
        let half = |p: LaurentPoly| p.scale(&rat(1, 2));
        match self {
            Self::Psl2 | Self::Pgl2 | Self::Tn | Self::TnWTn | Self::WTnTn2 => vec![qp1()],
            Self::Ts => vec![c(1), c(1), qm1()],
            Self::Ts2 => vec![c(1), c(1), half(qm1()), half(qm1())],
            Self::TsWTs | Self::WTsTs2 => vec![c(2), qm1()],
            Self::WTs2Ts2 => vec![c(2), half(qm1()), half(qm1())],
            Self::Tn2 | Self::WTn2Tn2 => vec![half(qp1()), half(qp1())],
        }
    }

    /// Closed form for the subgroup order.
    pub fn expected_order(&self, q: u64) -> u64 {
        match self {
            Self::Psl2 => (q * q * q - q) / 2,
            Self::Pgl2 => q * q * q - q,
            Self::Ts => q - 1,
            Self::Ts2 => (q - 1) / 2,
            Self::TsWTs => 2 * (q - 1),
            Self::WTs2Ts2 | Self::WTsTs2 => q - 1,
            Self::Tn => q + 1,
            Self::Tn2 => (q + 1) / 2,
            Self::TnWTn => 2 * (q + 1),
            Self::WTn2Tn2 | Self::WTnTn2 => q + 1,
        }
    }
}

impl fmt::Display for SubgroupRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubgroupCase {
    pub row: SubgroupRow,
    /// Non-residue for the nonsplit torus `[[a, εb], [b, a]]`.
    pub epsilon: Option<u64>,
}

impl SubgroupCase {
    /// Uses the smallest non-residue for nonsplit rows.
    pub fn standard(f: &PrimeField, row: SubgroupRow) -> Self {
        Self { row, epsilon: row.is_nonsplit().then(|| f.smallest_non_residue()) }
    }
}

/// A subgroup as a sorted element list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub elements: Vec<Pgl2Elem>,
}

impl Subgroup {
    fn from_set(set: HashSet<Pgl2Elem>) -> Self {
        let mut elements: Vec<_> = set.into_iter().collect();
        elements.sort_unstable();
        Self { elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

fn diag(f: &PrimeField, a: u64, d: u64) -> Pgl2Elem {
    Pgl2Elem::new(f, [a, 0, 0, d]).expect("invertible")
}

pub fn fo_build_subgroup(f: &PrimeField, case: &SubgroupCase) -> Result<Subgroup, OracleError> {
    let q = f.q();
    let w = Pgl2Elem::new(f, [0, 1, 1, 0]).expect("invertible");
    let w_tilde = diag(f, 1, f.neg(1));
    let split: Vec<Pgl2Elem> = f.nonzero().map(|a| diag(f, a, 1)).collect();
    let nonsplit = || -> Result<Vec<Pgl2Elem>, OracleError> {
        let eps = case.epsilon.unwrap_or_else(|| f.smallest_non_residue());
        if eps % q == 0 || f.is_square(eps) {
            return Err(OracleError::NotANonResidue { epsilon: eps, q });
        }
        let mut out = Vec::new();
        for a in 0..q {
            for b in 0..q {
                if let Some(m) = Pgl2Elem::new(f, [a, f.mul(eps, b), b, a]) {
                    out.push(m);
                }
            }
        }
        Ok(out)
    };
    let squares = |t: &[Pgl2Elem]| -> HashSet<Pgl2Elem> { t.iter().map(|x| x.mul(f, x)).collect() };
    let times = |g: &Pgl2Elem, s: &mut dyn Iterator<Item = Pgl2Elem>| -> Vec<Pgl2Elem> { s.map(|x| g.mul(f, &x)).collect() };
    // T² ∪ g·T, T² ∪ g·T², T² ∪ g·(T ∖ T²)
    let with_coset = |t: &[Pgl2Elem], g: &Pgl2Elem, which: u8| -> HashSet<Pgl2Elem> {
        let sq = squares(t);
        let mut out: HashSet<Pgl2Elem> = match which {
            0 => t.iter().copied().collect(),
            _ => sq.clone(),
        };
        let coset = match which {
            0 => times(g, &mut t.iter().copied()),
            1 => times(g, &mut sq.iter().copied()),
            _ => times(g, &mut t.iter().copied().filter(|x| !sq.contains(x))),
        };
        out.extend(coset);
        out
    };
    let set: HashSet<Pgl2Elem> = match case.row {
        SubgroupRow::Pgl2 | SubgroupRow::Psl2 => {
            let mut out = HashSet::new();
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        out.extend(Pgl2Elem::new(f, [1, b, c, d]));
                    }
                    out.extend(Pgl2Elem::new(f, [0, 1, b, c]));
                }
            }
            if case.row == SubgroupRow::Psl2 {
                out.retain(|m| f.is_square(m.det(f)));
            }
            out
        }
        SubgroupRow::Ts => split.iter().copied().collect(),
        SubgroupRow::Ts2 => squares(&split),
        SubgroupRow::TsWTs => with_coset(&split, &w, 0),
        SubgroupRow::WTs2Ts2 => with_coset(&split, &w, 1),
        SubgroupRow::WTsTs2 => with_coset(&split, &w, 2),
        SubgroupRow::Tn => nonsplit()?.into_iter().collect(),
        SubgroupRow::Tn2 => squares(&nonsplit()?),
        SubgroupRow::TnWTn => with_coset(&nonsplit()?, &w_tilde, 0),
        SubgroupRow::WTn2Tn2 => with_coset(&nonsplit()?, &w_tilde, 1),
        SubgroupRow::WTnTn2 => with_coset(&nonsplit()?, &w_tilde, 2),
    };
    Ok(Subgroup::from_set(set))
}

/// Verifies closure by picking generators greedily and checking that the
/// group they generate is exactly the given set.
pub fn fo_check_closed(f: &PrimeField, s: &Subgroup) -> Result<Vec<Pgl2Elem>, OracleError> {
    let members: HashSet<Pgl2Elem> = s.elements.iter().copied().collect();
    let not_closed = || OracleError::NotClosed(format!("{} elements", s.order()));
    if !members.contains(&Pgl2Elem::identity()) {
        return Err(not_closed());
    }
    let mut gens: Vec<Pgl2Elem> = Vec::new();
    let mut closure: HashSet<Pgl2Elem> = HashSet::from([Pgl2Elem::identity()]);
    for x in &s.elements {
        if closure.contains(x) {
            continue;
        }
        gens.push(*x);
        let mut queue: VecDeque<Pgl2Elem> = closure.iter().copied().collect();
        while let Some(y) = queue.pop_front() {
            for g in &gens {
                let z = y.mul(f, g);
                if closure.insert(z) {
                    if !members.contains(&z) {
                        return Err(not_closed());
                    }
                    queue.push_back(z);
                }
            }
        }
    }
    Ok(gens)
}

/// Sorted orbit sizes of the subgroup on `P¹(F_q)`.
pub fn fo_orbit_sizes(f: &PrimeField, s: &Subgroup) -> Result<Vec<usize>, OracleError> {
    fo_check_closed(f, s)?;
    let n = f.q() as usize + 1;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in &s.elements {
        for p in ProjPoint::all(f) {
            let a = find(&mut parent, p.0 as usize);
            let b = find(&mut parent, g.act(f, p).0 as usize);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut sizes = vec![0usize; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        sizes[r] += 1;
    }
    let mut out: Vec<usize> = sizes.into_iter().filter(|&k| k > 0).collect();
    out.sort_unstable();
    Ok(out)
}

fn eval_size(p: &LaurentPoly, q: u64) -> usize {
    let v = p.eval(&int(q as i64)).expect("polynomial");
    assert!(v.is_integer(), "size {p} is not integral at q = {q}");
    v.to_integer().try_into().expect("nonnegative size")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub row: SubgroupRow,
    pub q: u64,
    pub order: usize,
    pub expected: Vec<usize>,
    pub computed: Vec<usize>,
}

impl TableRow {
    pub fn pass(&self) -> bool {
        self.expected == self.computed && self.order as u64 == self.row.expected_order(self.q)
    }
}

pub fn fo_verify_table(q: u64) -> Result<Vec<TableRow>, OracleError> {
    let f = PrimeField::new(q)?;
    SubgroupRow::ALL
        .iter()
        .map(|&row| {
            let s = fo_build_subgroup(&f, &SubgroupCase::standard(&f, row))?;
            let computed = fo_orbit_sizes(&f, &s)?;
            let mut expected: Vec<usize> = row.symbolic_sizes().iter().map(|p| eval_size(p, q)).collect();
            expected.sort_unstable();
            Ok(TableRow { row, q, order: s.order(), expected, computed })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckRow {
    pub row: SubgroupRow,
    pub q: u64,
    /// `γ` per orbit, in the order of [`SubgroupRow::symbolic_sizes`].
    pub gammas: Vec<LaurentPoly>,
    /// Whether each `γ` equals the printed size as a polynomial.
    pub symbolic_match: bool,
    pub n_max: usize,
    pub n_min: usize,
    pub computed: Vec<usize>,
}

impl CrosscheckRow {
    pub fn gamma_values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.gammas.iter().map(|g| eval_size(g, self.q)).collect();
        v.sort_unstable();
        v
    }

    pub fn pass(&self) -> bool {
        self.symbolic_match
            && (1..=2).contains(&self.n_max)
            && (1..=2).contains(&self.n_min)
            && self.gamma_values() == self.computed
    }
}

/// Orders size polynomials by their growth in `q`.
fn growth_cmp(a: &LaurentPoly, b: &LaurentPoly) -> Ordering {
    let diff = a - b;
    if diff.is_zero() {
        Ordering::Equal
    } else if diff.is_negative_leading() {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Assigns lengths from the printed orbit sizes (the smaller size class is
/// the minimal length, a single class means equal lengths), evaluates the
/// structure-constant formula per orbit and compares with brute force.
pub fn fo_gamma_crosscheck(q: u64) -> Result<Vec<CrosscheckRow>, OracleError> {
    let f = PrimeField::new(q)?;
    SubgroupRow::ALL
        .iter()
        .map(|&row| {
            let sizes = row.symbolic_sizes();
            let min = sizes.iter().min_by(|a, b| growth_cmp(a, b)).expect("nonempty").clone();
            let max = sizes.iter().max_by(|a, b| growth_cmp(a, b)).expect("nonempty").clone();
            let n_min = sizes.iter().filter(|s| growth_cmp(s, &min) == Ordering::Equal).count();
            let n_max = sizes.iter().filter(|s| growth_cmp(s, &max) == Ordering::Equal).count();
            let tm1 = &LaurentPoly::t() - &LaurentPoly::one();
            let gammas: Vec<LaurentPoly> = sizes
                .iter()
                .map(|s| {
                    let mut g = LaurentPoly::zero();
                    if growth_cmp(s, &max) == Ordering::Equal {
                        g += tm1.scale(&rat(1, n_max as i64));
                    }
                    if growth_cmp(s, &min) == Ordering::Equal {
                        g += LaurentPoly::constant(rat(2, n_min as i64));
                    }
                    g
                })
                .collect();
            let symbolic_match = gammas.iter().zip(&sizes).all(|(g, s)| g == s);
            let s = fo_build_subgroup(&f, &SubgroupCase::standard(&f, row))?;
            let computed = fo_orbit_sizes(&f, &s)?;
            Ok(CrosscheckRow { row, q, gammas, symbolic_match, n_max, n_min, computed })
        })
        .collect()
}

pub fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    (3..=bound).filter(|&q| PrimeField::new(q).is_ok()).collect()
}
