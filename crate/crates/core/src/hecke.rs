//! The generic Iwahori–Hecke algebra `H_t` of Ã_{n-1} in the basis `{T_w}`.
//!
//! Multiplication follows the Iwahori–Matsumoto rules with the generic
//! parameter `t`: `T_u T_s = T_{us}` when `l(us) > l(u)`, and
//! `T_u T_s = (t − 1) T_u + t T_{us}` otherwise.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::coxeter::{format_word, AffinePermutation, CoxeterData, CoxeterError};
use crate::ring::{LaurentPoly, Rational};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HeckeError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("braid relation not applicable: m({0},{1}) is infinite")]
    NotApplicable(usize, usize),
}

/// A finite linear combination `Σ c_w T_w` with Laurent-polynomial
/// coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct HeckeElement {
    rank: usize,
    terms: BTreeMap<AffinePermutation, LaurentPoly>,
}

impl HeckeElement {
    pub fn zero(rank: usize) -> Self {
        Self {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize) -> Self {
        Self::basis(AffinePermutation::identity(rank))
    }

    /// `T_w`.
    pub fn basis(w: AffinePermutation) -> Self {
        let rank = w.rank();
        let mut terms = BTreeMap::new();
        terms.insert(w, LaurentPoly::one());
        Self { rank, terms }
    }

    pub fn generator(rank: usize, i: usize) -> Result<Self, HeckeError> {
        Ok(Self::basis(AffinePermutation::generator(rank, i)?))
    }

    /// `c · T_e`.
    pub fn scalar(rank: usize, c: LaurentPoly) -> Self {
        let mut out = Self::zero(rank);
        out.add_term(AffinePermutation::identity(rank), c);
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<AffinePermutation, LaurentPoly> {
        &self.terms
    }

    pub fn coeff(&self, w: &AffinePermutation) -> LaurentPoly {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: AffinePermutation, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(w.rank(), self.rank);
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        let mut out = Self::zero(self.rank);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    /// Right multiplication by `T_{s_i}`.
    pub fn mul_gen_right(&self, i: usize) -> Result<Self, HeckeError> {
        let mut out = Self::zero(self.rank);
        let t = LaurentPoly::t();
        let t_minus_1 = &t - &LaurentPoly::one();
        for (u, c) in &self.terms {
            let us = u.right_mul_gen(i)?;
            if us.length() > u.length() {
                out.add_term(us, c.clone());
            } else {
                out.add_term(u.clone(), c * &t_minus_1);
                out.add_term(us, c * &t);
            }
        }
        Ok(out)
    }

    /// Product in `H_t`. Each basis factor `T_w` on the right is expanded
    /// along the reduced word of `w`, peeling letters from the right.
    pub fn mul(&self, other: &Self) -> Result<Self, HeckeError> {
        if self.rank != other.rank {
            return Err(HeckeError::RankMismatch(self.rank, other.rank));
        }
        let mut out = Self::zero(self.rank);
        for (w, c) in &other.terms {
            let mut acc = self.clone();
            for &i in &w.reduced_word() {
                acc = acc.mul_gen_right(i)?;
            }
            for (u, d) in acc.terms {
                out.add_term(u, &d * c);
            }
        }
        Ok(out)
    }

    /// Specialization `t ↦ q`, as a map from group elements to rationals.
    pub fn specialize(&self, q: &Rational) -> Result<BTreeMap<AffinePermutation, Rational>, crate::ring::RingError> {
        let mut out = BTreeMap::new();
        for (w, c) in &self.terms {
            let v = c.eval(q)?;
            if !v.is_zero() {
                out.insert(w.clone(), v);
            }
        }
        Ok(out)
    }

    /// Terms in display order: by length, then window.
    pub fn sorted_terms(&self) -> Vec<(&AffinePermutation, &LaurentPoly)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| (a.0.length(), a.0).cmp(&(b.0.length(), b.0)));
        v
    }
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative_leading();
            let shown = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let basis = format!("T[{}]", format_word(&w.reduced_word()));
            if shown.is_one() {
                f.write_str(&basis)?;
            } else {
                write!(f, "{}*{basis}", shown.render_coefficient())?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HeckeElement({self})")
    }
}

impl Add<&HeckeElement> for &HeckeElement {
    type Output = HeckeElement;
    fn add(self, rhs: &HeckeElement) -> HeckeElement {
        assert_eq!(self.rank, rhs.rank, "rank mismatch");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub<&HeckeElement> for &HeckeElement {
    type Output = HeckeElement;
    fn sub(self, rhs: &HeckeElement) -> HeckeElement {
        assert_eq!(self.rank, rhs.rank, "rank mismatch");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Mul<&HeckeElement> for &HeckeElement {
    type Output = HeckeElement;
    /// Panics on rank mismatch; use [`HeckeElement::mul`] for a fallible product.
    fn mul(self, rhs: &HeckeElement) -> HeckeElement {
        HeckeElement::mul(self, rhs).expect("rank mismatch")
    }
}

pub fn h_basis(w: &AffinePermutation) -> HeckeElement {
    HeckeElement::basis(w.clone())
}

pub fn h_mul(a: &HeckeElement, b: &HeckeElement) -> Result<HeckeElement, HeckeError> {
    a.mul(b)
}

/// `(T_{s_i} + 1)(T_{s_i} − t) = 0`.
pub fn h_check_quadratic(n: usize, i: usize) -> Result<bool, HeckeError> {
    let ts = HeckeElement::generator(n, i)?;
    let one = HeckeElement::one(n);
    let t = HeckeElement::scalar(n, LaurentPoly::t());
    let product = (&ts + &one).mul(&(&ts - &t))?;
    Ok(product.is_zero())
}

/// Alternating products of length `m_ij` agree.
pub fn h_check_braid(n: usize, i: usize, j: usize) -> Result<bool, HeckeError> {
    let data = CoxeterData::new(n)?;
    for k in [i, j] {
        if k >= n {
            return Err(CoxeterError::IndexOutOfRange { index: k, rank: n }.into());
        }
    }
    let m = data.bond(i, j).ok_or(HeckeError::NotApplicable(i, j))?;
    let ti = HeckeElement::generator(n, i)?;
    let tj = HeckeElement::generator(n, j)?;
    let mut lhs = HeckeElement::one(n);
    let mut rhs = HeckeElement::one(n);
    for k in 0..m {
        let (a, b) = if k % 2 == 0 { (&ti, &tj) } else { (&tj, &ti) };
        lhs = lhs.mul(a)?;
        rhs = rhs.mul(b)?;
    }
    Ok(lhs == rhs)
}
