//! Wick-ordered polynomials in creation/annihilation operators.
//!
//! A term `c · a*_{i1} … a*_{ik} a_{j1} … a_{jl}` is stored under a canonical
//! [`TermKey`]: both index lists sorted (non-decreasing for bosons, strictly
//! increasing for fermions). Fermionic reordering contributes the sign of the
//! sorting permutation; a repeated fermionic index kills the term.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg;
use crate::{CMatrix, CVector, C64};

/// Coefficients of smaller magnitude are dropped on insertion.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Largest supported total degree of a term.
pub const MAX_DEGREE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistics {
    Bose,
    Fermi,
}

impl Statistics {
    /// `+1` for commutators, `-1` for anticommutators.
    pub fn exchange_sign(self) -> i32 {
        match self {
            Statistics::Bose => 1,
            Statistics::Fermi => -1,
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Bose => f.write_str("bose"),
            Statistics::Fermi => f.write_str("fermi"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Canonical multi-index pair `(creation, annihilation)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    creation: Vec<usize>,
    annihilation: Vec<usize>,
}

impl TermKey {
    pub fn empty() -> Self {
        TermKey {
            creation: Vec::new(),
            annihilation: Vec::new(),
        }
    }

    pub fn creation(&self) -> &[usize] {
        &self.creation
    }

    pub fn annihilation(&self) -> &[usize] {
        &self.annihilation
    }

    pub fn degree(&self) -> usize {
        self.creation.len() + self.annihilation.len()
    }

    pub(crate) fn from_sorted(creation: Vec<usize>, annihilation: Vec<usize>) -> Self {
        TermKey {
            creation,
            annihilation,
        }
    }
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return f.write_str("1");
        }
        let mut first = true;
        for i in &self.creation {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "a*{}", i)?;
            first = false;
        }
        for j in &self.annihilation {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "a{}", j)?;
            first = false;
        }
        Ok(())
    }
}

/// Sorts `list` in place. Returns `Some(odd)` with the parity of the sorting
/// permutation, or `None` if an index repeats and `strict` is set.
pub(crate) fn sort_with_parity(list: &mut [usize], strict: bool) -> Option<bool> {
    let mut odd = false;
    for i in 1..list.len() {
        let mut j = i;
        while j > 0 && list[j - 1] > list[j] {
            list.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if strict && list.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(odd)
}

/// Puts a term into canonical order.
///
/// Returns the sorted key and the coefficient adjusted by the permutation sign
/// (fermions) or unchanged (bosons). A fermionic list with a repeated index
/// yields a zero coefficient.
pub fn canonicalize_term(
    stats: Statistics,
    n_modes: usize,
    creation: &[usize],
    annihilation: &[usize],
    coeff: C64,
) -> Result<(TermKey, C64)> {
    if let Some(&index) = creation
        .iter()
        .chain(annihilation.iter())
        .find(|&&i| i >= n_modes)
    {
        return Err(Error::IndexOutOfRange { index, n_modes });
    }
    Ok(canonicalize_unchecked(stats, creation.to_vec(), annihilation.to_vec(), coeff))
}

pub(crate) fn canonicalize_unchecked(
    stats: Statistics,
    mut creation: Vec<usize>,
    mut annihilation: Vec<usize>,
    coeff: C64,
) -> (TermKey, C64) {
    let strict = stats == Statistics::Fermi;
    let c = sort_with_parity(&mut creation, strict);
    let a = sort_with_parity(&mut annihilation, strict);
    let coeff = match (c, a) {
        (Some(x), Some(y)) => {
            if strict && (x ^ y) {
                -coeff
            } else {
                coeff
            }
        }
        _ => C64::new(0.0, 0.0),
    };
    (
        TermKey {
            creation,
            annihilation,
        },
        coeff,
    )
}

/// `Σ h_{α,β} (a*)^α a^β` with canonical keys.
#[derive(Debug, Clone, PartialEq)]
pub struct WickPolynomial {
    n_modes: usize,
    stats: Statistics,
    terms: BTreeMap<TermKey, C64>,
}

impl WickPolynomial {
    pub fn new(n_modes: usize, stats: Statistics) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("n_modes must be positive".into()));
        }
        Ok(WickPolynomial {
            n_modes,
            stats,
            terms: BTreeMap::new(),
        })
    }

    pub(crate) fn empty_like(&self) -> Self {
        WickPolynomial {
            n_modes: self.n_modes,
            stats: self.stats,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_modes: usize, stats: Statistics, value: C64) -> Result<Self> {
        let mut p = Self::new(n_modes, stats)?;
        p.add_canonical(TermKey::empty(), value);
        Ok(p)
    }

    /// `N = Σ a*_i a_i`.
    pub fn number_operator(n_modes: usize, stats: Statistics) -> Result<Self> {
        let mut p = Self::new(n_modes, stats)?;
        for i in 0..n_modes {
            p.add_term(&[i], &[i], C64::new(1.0, 0.0))?;
        }
        Ok(p)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &C64)> {
        self.terms.iter()
    }

    /// Highest total degree present (0 for the empty polynomial).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(TermKey::degree).max().unwrap_or(0)
    }

    /// Accumulates `coeff · a*_{creation} a_{annihilation}` (operators in the
    /// given order) into its canonical slot.
    pub fn add_term(&mut self, creation: &[usize], annihilation: &[usize], coeff: C64) -> Result<()> {
        let degree = creation.len() + annihilation.len();
        if degree > MAX_DEGREE {
            return Err(Error::DegreeCap {
                degree,
                cap: MAX_DEGREE,
            });
        }
        let (key, c) = canonicalize_term(self.stats, self.n_modes, creation, annihilation, coeff)?;
        self.add_canonical(key, c);
        Ok(())
    }

    pub fn with_term(mut self, creation: &[usize], annihilation: &[usize], coeff: C64) -> Result<Self> {
        self.add_term(creation, annihilation, coeff)?;
        Ok(self)
    }

    pub(crate) fn add_canonical(&mut self, key: TermKey, coeff: C64) {
        match self.terms.entry(key) {
            Entry::Vacant(slot) => {
                if coeff.norm() >= PRUNE_THRESHOLD {
                    slot.insert(coeff);
                }
            }
            Entry::Occupied(mut slot) => {
                let v = *slot.get() + coeff;
                if v.norm() < PRUNE_THRESHOLD {
                    slot.remove();
                } else {
                    *slot.get_mut() = v;
                }
            }
        }
    }

    pub(crate) fn from_map(n_modes: usize, stats: Statistics, map: BTreeMap<TermKey, C64>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(_, v)| v.norm() >= PRUNE_THRESHOLD)
            .collect();
        WickPolynomial {
            n_modes,
            stats,
            terms,
        }
    }

    pub fn coefficient(&self, key: &TermKey) -> C64 {
        self.terms.get(key).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Coefficient multiplying the operator product written in the given order.
    pub fn coeff(&self, creation: &[usize], annihilation: &[usize]) -> Result<C64> {
        let (key, sign) = canonicalize_term(
            self.stats,
            self.n_modes,
            creation,
            annihilation,
            C64::new(1.0, 0.0),
        )?;
        Ok(self.coefficient(&key) * sign)
    }

    pub fn constant_term(&self) -> C64 {
        self.coefficient(&TermKey::empty())
    }

    pub fn parity(&self) -> Parity {
        let even = self.terms.keys().any(|k| k.degree() % 2 == 0);
        let odd = self.terms.keys().any(|k| k.degree() % 2 == 1);
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    /// Hermitian conjugate, re-canonicalized.
    pub fn adjoint(&self) -> Self {
        let mut out = self.empty_like();
        for (key, c) in &self.terms {
            let creation: Vec<usize> = key.annihilation.iter().rev().copied().collect();
            let annihilation: Vec<usize> = key.creation.iter().rev().copied().collect();
            let (k, v) = canonicalize_unchecked(self.stats, creation, annihilation, c.conj());
            out.add_canonical(k, v);
        }
        out
    }

    /// Largest coefficientwise deviation from the adjoint.
    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Adds the adjoint of every term whose adjoint slot is empty.
    pub fn hermitian_completion(&self) -> Self {
        let adj = self.adjoint();
        let mut out = self.clone();
        for (key, c) in adj.terms() {
            if !self.terms.contains_key(key) {
                out.add_canonical(key.clone(), *c);
            }
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.stats != other.stats {
            return Err(Error::StatisticsMismatch {
                expected: self.stats,
                found: other.stats,
            });
        }
        if self.n_modes != other.n_modes {
            return Err(Error::ModeMismatch {
                expected: self.n_modes,
                found: other.n_modes,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, v) in other.terms() {
            out.add_canonical(k.clone(), *v);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let map = self.terms.iter().map(|(k, v)| (k.clone(), v * factor)).collect();
        Self::from_map(self.n_modes, self.stats, map)
    }

    /// Maximum coefficientwise absolute difference (union of keys).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (k, v) in &self.terms {
            m = m.max((v - other.coefficient(k)).norm());
        }
        for (k, v) in &other.terms {
            if !self.terms.contains_key(k) {
                m = m.max(v.norm());
            }
        }
        m
    }

    /// Terms of degree 1, or of degree 2 that are not of the `a* a` form.
    pub fn max_non_number_conserving_low_order(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| {
                k.degree() == 1
                    || (k.degree() == 2 && k.creation.len() != 1)
            })
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Splits the polynomial into constant, linear, anomalous quadratic,
    /// number-conserving quadratic and higher-order parts.
    ///
    /// The anomalous creation block `O` is normalized so that
    /// `Σ_ij O_ij b*_j b*_i` equals the stored degree-(2,0) part with `O`
    /// symmetric (bosons) or antisymmetric (fermions); the annihilation block
    /// satisfies `Σ_ij o_annihilation_ij b_i b_j` = degree-(0,2) part with the
    /// same symmetry. For Hermitian input `o_annihilation = conj(O)` and
    /// `k_annihilation = conj(K)`.
    pub fn extract_blocks(&self) -> TransformedBlocks {
        let n = self.n_modes;
        let mut b = C64::new(0.0, 0.0);
        let mut k = CVector::zeros(n);
        let mut k_ann = CVector::zeros(n);
        let mut o = linalg::zeros(n, n);
        let mut o_ann = linalg::zeros(n, n);
        let mut d = linalg::zeros(n, n);
        let mut remainder = self.empty_like();
        let fermi = self.stats == Statistics::Fermi;
        let half = C64::new(0.5, 0.0);

        for (key, &c) in &self.terms {
            match (key.creation.as_slice(), key.annihilation.as_slice()) {
                ([], []) => b = c,
                ([i], []) => k[*i] = c,
                ([], [j]) => k_ann[*j] = c,
                ([i], [j]) => d[(*i, *j)] = c,
                ([i, j], []) => {
                    if i == j {
                        o[(*i, *j)] = c;
                    } else if fermi {
                        // b*_j b*_i = -b*_i b*_j
                        o[(*i, *j)] = -c * half;
                        o[(*j, *i)] = c * half;
                    } else {
                        o[(*i, *j)] = c * half;
                        o[(*j, *i)] = c * half;
                    }
                }
                ([], [i, j]) => {
                    if i == j {
                        o_ann[(*i, *j)] = c;
                    } else if fermi {
                        o_ann[(*i, *j)] = c * half;
                        o_ann[(*j, *i)] = -c * half;
                    } else {
                        o_ann[(*i, *j)] = c * half;
                        o_ann[(*j, *i)] = c * half;
                    }
                }
                _ => remainder.add_canonical(key.clone(), c),
            }
        }

        TransformedBlocks {
            n_modes: n,
            stats: self.stats,
            b,
            k,
            k_annihilation: k_ann,
            o,
            o_annihilation: o_ann,
            d,
            remainder,
        }
    }
}

impl fmt::Display for WickPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (k, v)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i) {}", v.re, v.im, k)?;
        }
        Ok(())
    }
}

/// Block decomposition
/// `B + Σ K_i b*_i + Σ k_annihilation_i b_i + Σ O_ij b*_j b*_i
///  + Σ o_annihilation_ij b_i b_j + Σ D_ij b*_i b_j + remainder`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedBlocks {
    pub n_modes: usize,
    pub stats: Statistics,
    pub b: C64,
    pub k: CVector,
    pub k_annihilation: CVector,
    pub o: CMatrix,
    pub o_annihilation: CMatrix,
    pub d: CMatrix,
    /// Terms of total degree three and higher.
    pub remainder: WickPolynomial,
}

impl TransformedBlocks {
    pub fn energy(&self) -> f64 {
        self.b.re
    }

    pub fn k_norm(&self) -> f64 {
        linalg::vec_norm(&self.k)
    }

    pub fn o_norm(&self) -> f64 {
        linalg::frobenius(&self.o)
    }

    /// `‖K‖₂ + ‖O‖_F`.
    pub fn residual(&self) -> f64 {
        self.k_norm() + self.o_norm()
    }

    /// Eigenvalues of the Hermitian part of `D`, ascending.
    pub fn d_spectrum(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.d)
    }

    pub fn d_hermitian_defect(&self) -> f64 {
        linalg::frobenius(&(&self.d - self.d.adjoint()))
    }

    /// Rebuilds the polynomial from the blocks.
    pub fn reassemble(&self) -> WickPolynomial {
        let n = self.n_modes;
        let mut p = self.remainder.clone();
        p.add_canonical(TermKey::empty(), self.b);
        for i in 0..n {
            let (k1, c1) = canonicalize_unchecked(self.stats, vec![i], vec![], self.k[i]);
            p.add_canonical(k1, c1);
            let (k2, c2) = canonicalize_unchecked(self.stats, vec![], vec![i], self.k_annihilation[i]);
            p.add_canonical(k2, c2);
            for j in 0..n {
                let (k3, c3) = canonicalize_unchecked(self.stats, vec![j, i], vec![], self.o[(i, j)]);
                p.add_canonical(k3, c3);
                let (k4, c4) =
                    canonicalize_unchecked(self.stats, vec![], vec![i, j], self.o_annihilation[(i, j)]);
                p.add_canonical(k4, c4);
                let (k5, c5) = canonicalize_unchecked(self.stats, vec![i], vec![j], self.d[(i, j)]);
                p.add_canonical(k5, c5);
            }
        }
        p
    }
}
