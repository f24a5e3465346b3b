//! Normal ordering of products and linear substitutions of ladder operators.
//!
//! Products are built by multiplying a Wick-ordered polynomial by one linear
//! combination of ladder operators at a time. Each elementary step moves the
//! new operator to its ordered position using
//! `a_i a*_j = ± a*_j a_i + δ_ij` (`+` for bosons, `-` for fermions), so the
//! running product is always normal ordered. Fermionic signs are applied as
//! exact negations.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::wick_poly::{canonicalize_unchecked, Statistics, TermKey, WickPolynomial, MAX_DEGREE};
use crate::{CVector, C64};

/// `Σ u_i b*_i + Σ v_i b_i + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    /// Coefficients `u` of the creation operators.
    pub creation: CVector,
    /// Coefficients `v` of the annihilation operators.
    pub annihilation: CVector,
    pub constant: C64,
}

impl LinearOperator {
    pub fn new(creation: CVector, annihilation: CVector, constant: C64) -> Result<Self> {
        if creation.len() != annihilation.len() {
            return Err(Error::DimensionMismatch {
                expected: creation.len(),
                found: annihilation.len(),
            });
        }
        Ok(LinearOperator {
            creation,
            annihilation,
            constant,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.creation.len()
    }

    /// The single operator `b*_i`.
    pub fn creation_mode(n_modes: usize, i: usize) -> Self {
        let mut u = CVector::zeros(n_modes);
        u[i] = C64::new(1.0, 0.0);
        LinearOperator {
            creation: u,
            annihilation: CVector::zeros(n_modes),
            constant: C64::new(0.0, 0.0),
        }
    }

    /// The single operator `b_i`.
    pub fn annihilation_mode(n_modes: usize, i: usize) -> Self {
        let mut v = CVector::zeros(n_modes);
        v[i] = C64::new(1.0, 0.0);
        LinearOperator {
            creation: CVector::zeros(n_modes),
            annihilation: v,
            constant: C64::new(0.0, 0.0),
        }
    }

    /// Hermitian conjugate: `Σ v̄_i b*_i + Σ ū_i b_i + w̄`.
    pub fn adjoint(&self) -> Self {
        LinearOperator {
            creation: self.annihilation.map(|z| z.conj()),
            annihilation: self.creation.map(|z| z.conj()),
            constant: self.constant.conj(),
        }
    }

    fn is_scalar(&self) -> bool {
        self.creation.iter().chain(self.annihilation.iter()).all(|z| *z == C64::new(0.0, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

type Acc = BTreeMap<TermKey, C64>;

fn accumulate(acc: &mut Acc, key: TermKey, c: C64) {
    if c == C64::new(0.0, 0.0) {
        return;
    }
    *acc.entry(key).or_insert(C64::new(0.0, 0.0)) += c;
}

fn signed(c: C64, negate: bool) -> C64 {
    if negate {
        -c
    } else {
        c
    }
}

fn without(list: &[usize], k: usize) -> Vec<usize> {
    list.iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &x)| x)
        .collect()
}

/// `(c · a*_α a_β) · a*_j`, normal ordered.
fn right_times_creation(stats: Statistics, key: &TermKey, c: C64, j: usize, acc: &mut Acc) {
    let fermi = stats == Statistics::Fermi;
    let beta = key.annihilation();
    let l = beta.len();
    for (k, &bk) in beta.iter().enumerate() {
        if bk == j {
            let negate = fermi && (l - 1 - k) % 2 == 1;
            let key = TermKey::from_sorted(key.creation().to_vec(), without(beta, k));
            accumulate(acc, key, signed(c, negate));
        }
    }
    let mut creation = key.creation().to_vec();
    creation.push(j);
    let (k2, c2) = canonicalize_unchecked(stats, creation, beta.to_vec(), signed(c, fermi && l % 2 == 1));
    accumulate(acc, k2, c2);
}

/// `(c · a*_α a_β) · a_j`.
fn right_times_annihilation(stats: Statistics, key: &TermKey, c: C64, j: usize, acc: &mut Acc) {
    let mut annihilation = key.annihilation().to_vec();
    annihilation.push(j);
    let (k2, c2) = canonicalize_unchecked(stats, key.creation().to_vec(), annihilation, c);
    accumulate(acc, k2, c2);
}

/// `a*_j · (c · a*_α a_β)`.
fn left_times_creation(stats: Statistics, key: &TermKey, c: C64, j: usize, acc: &mut Acc) {
    let mut creation = Vec::with_capacity(key.creation().len() + 1);
    creation.push(j);
    creation.extend_from_slice(key.creation());
    let (k2, c2) = canonicalize_unchecked(stats, creation, key.annihilation().to_vec(), c);
    accumulate(acc, k2, c2);
}

/// `a_j · (c · a*_α a_β)`, normal ordered.
fn left_times_annihilation(stats: Statistics, key: &TermKey, c: C64, j: usize, acc: &mut Acc) {
    let fermi = stats == Statistics::Fermi;
    let alpha = key.creation();
    let m = alpha.len();
    for (k, &ak) in alpha.iter().enumerate() {
        if ak == j {
            let negate = fermi && k % 2 == 1;
            let key = TermKey::from_sorted(without(alpha, k), key.annihilation().to_vec());
            accumulate(acc, key, signed(c, negate));
        }
    }
    let mut annihilation = Vec::with_capacity(key.annihilation().len() + 1);
    annihilation.push(j);
    annihilation.extend_from_slice(key.annihilation());
    let (k2, c2) = canonicalize_unchecked(stats, alpha.to_vec(), annihilation, signed(c, fermi && m % 2 == 1));
    accumulate(acc, k2, c2);
}

fn multiply_map(stats: Statistics, terms: &Acc, op: &LinearOperator, side: Side) -> Acc {
    let mut acc = Acc::new();
    for (key, &c) in terms {
        if op.constant != C64::new(0.0, 0.0) {
            accumulate(&mut acc, key.clone(), c * op.constant);
        }
        for (i, &u) in op.creation.iter().enumerate() {
            if u != C64::new(0.0, 0.0) {
                match side {
                    Side::Right => right_times_creation(stats, key, c * u, i, &mut acc),
                    Side::Left => left_times_creation(stats, key, c * u, i, &mut acc),
                }
            }
        }
        for (i, &v) in op.annihilation.iter().enumerate() {
            if v != C64::new(0.0, 0.0) {
                match side {
                    Side::Right => right_times_annihilation(stats, key, c * v, i, &mut acc),
                    Side::Left => left_times_annihilation(stats, key, c * v, i, &mut acc),
                }
            }
        }
    }
    acc
}

/// Normal-ordered `op · poly` (`Side::Left`) or `poly · op` (`Side::Right`).
pub fn multiply_linear(poly: &WickPolynomial, op: &LinearOperator, side: Side) -> Result<WickPolynomial> {
    if op.n_modes() != poly.n_modes() {
        return Err(Error::ModeMismatch {
            expected: poly.n_modes(),
            found: op.n_modes(),
        });
    }
    if !op.is_scalar() && poly.degree() + 1 > MAX_DEGREE {
        return Err(Error::DegreeCap {
            degree: poly.degree() + 1,
            cap: MAX_DEGREE,
        });
    }
    let terms: Acc = poly.terms().map(|(k, v)| (k.clone(), *v)).collect();
    let out = multiply_map(poly.stats(), &terms, op, side);
    Ok(WickPolynomial::from_map(poly.n_modes(), poly.stats(), out))
}

/// Replaces every `a*_i` by `subst_creation[i]` and every `a_i` by
/// `subst_annihilation[i]` and normal orders the result.
///
/// The output lives on as many modes as the substituted operators have.
pub fn substitute_linear(
    poly: &WickPolynomial,
    subst_creation: &[LinearOperator],
    subst_annihilation: &[LinearOperator],
) -> Result<WickPolynomial> {
    substitute_up_to(poly, subst_creation, subst_annihilation, usize::MAX)
}

/// Like [`substitute_linear`] but keeps only output terms of degree at most
/// `max_degree`. Partial products that can no longer contract down to that
/// degree are dropped early, so this is much cheaper for low `max_degree`.
pub fn substitute_linear_truncated(
    poly: &WickPolynomial,
    subst_creation: &[LinearOperator],
    subst_annihilation: &[LinearOperator],
    max_degree: usize,
) -> Result<WickPolynomial> {
    substitute_up_to(poly, subst_creation, subst_annihilation, max_degree)
}

fn substitute_up_to(
    poly: &WickPolynomial,
    subst_creation: &[LinearOperator],
    subst_annihilation: &[LinearOperator],
    max_degree: usize,
) -> Result<WickPolynomial> {
    let n = poly.n_modes();
    for list in [subst_creation, subst_annihilation] {
        if list.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: list.len(),
            });
        }
    }
    let out_modes = subst_creation[0].n_modes();
    if let Some(bad) = subst_creation
        .iter()
        .chain(subst_annihilation.iter())
        .find(|op| op.n_modes() != out_modes || op.annihilation.len() != out_modes)
    {
        return Err(Error::ModeMismatch {
            expected: out_modes,
            found: bad.n_modes(),
        });
    }
    if poly.degree() > MAX_DEGREE {
        return Err(Error::DegreeCap {
            degree: poly.degree(),
            cap: MAX_DEGREE,
        });
    }

    let stats = poly.stats();
    let mut total = Acc::new();
    for (key, &c) in poly.terms() {
        let mut acc = Acc::new();
        acc.insert(TermKey::empty(), c);
        let factors = key
            .creation()
            .iter()
            .map(|&i| &subst_creation[i])
            .chain(key.annihilation().iter().map(|&j| &subst_annihilation[j]));
        let mut remaining = key.degree();
        for op in factors {
            acc = multiply_map(stats, &acc, op, Side::Right);
            remaining -= 1;
            if max_degree != usize::MAX {
                acc.retain(|k, _| k.degree() <= max_degree + remaining);
            }
        }
        for (k, v) in acc {
            if k.degree() <= max_degree {
                accumulate(&mut total, k, v);
            }
        }
    }
    Ok(WickPolynomial::from_map(out_modes, stats, total))
}

/// Vacuum expectation of a normal-ordered polynomial: its constant term.
pub fn vacuum_expectation(poly: &WickPolynomial) -> C64 {
    poly.constant_term()
}

/// Normal-ordered product of two polynomials.
pub fn multiply(lhs: &WickPolynomial, rhs: &WickPolynomial) -> Result<WickPolynomial> {
    if lhs.stats() != rhs.stats() {
        return Err(Error::StatisticsMismatch {
            expected: lhs.stats(),
            found: rhs.stats(),
        });
    }
    if lhs.n_modes() != rhs.n_modes() {
        return Err(Error::ModeMismatch {
            expected: lhs.n_modes(),
            found: rhs.n_modes(),
        });
    }
    let degree = lhs.degree() + rhs.degree();
    if degree > MAX_DEGREE {
        return Err(Error::DegreeCap {
            degree,
            cap: MAX_DEGREE,
        });
    }
    let n = lhs.n_modes();
    let stats = lhs.stats();
    let mut total = Acc::new();
    let lhs_terms: Acc = lhs.terms().map(|(k, v)| (k.clone(), *v)).collect();
    for (key, &c) in rhs.terms() {
        let mut acc = lhs_terms.clone();
        for &i in key.creation() {
            acc = multiply_map(stats, &acc, &LinearOperator::creation_mode(n, i), Side::Right);
        }
        for &j in key.annihilation() {
            acc = multiply_map(stats, &acc, &LinearOperator::annihilation_mode(n, j), Side::Right);
        }
        for (k, v) in acc {
            accumulate(&mut total, k, v * c);
        }
    }
    Ok(WickPolynomial::from_map(n, stats, total))
}
