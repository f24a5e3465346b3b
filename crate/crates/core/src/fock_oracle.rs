//! Dense truncated Fock spaces used as a brute-force reference.
//!
//! Basis vectors are occupation tuples; the flat index is
//! `Σ_i occ_i · (cutoff + 1)^i`, so mode 0 varies fastest. Fermionic ladder
//! operators carry the sign `(-1)^{Σ_{j<i} occ_j}`.
//!
//! Wick-ordered operators act by applying annihilators first and creators
//! last. Occupations along the way never exceed the larger of the initial and
//! final occupations, so the truncated matrix of a Wick-ordered polynomial is
//! exactly its compression onto the retained subspace.

use crate::bogoliubov::{BogoliubovMap, Generator, ThoulessChart};
use crate::error::{Error, Result};
use crate::linalg;
use crate::normal_order::substitute_linear;
use crate::wick_poly::{Statistics, WickPolynomial};
use crate::{CMatrix, CVector, C64};

pub const DEFAULT_DIM_CAP: usize = 4096;
pub const DEFAULT_CUTOFF: usize = 10;
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    stats: Statistics,
    n_modes: usize,
    cutoff: usize,
    dim: usize,
}

impl FockBasis {
    /// Basis with the default dimension cap. `cutoff` is the maximal
    /// occupation per mode and is ignored (fixed to 1) for fermions.
    pub fn new(stats: Statistics, n_modes: usize, cutoff: usize) -> Result<Self> {
        Self::with_cap(stats, n_modes, cutoff, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(stats: Statistics, n_modes: usize, cutoff: usize, cap: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("n_modes must be positive".into()));
        }
        let cutoff = match stats {
            Statistics::Bose => cutoff,
            Statistics::Fermi => 1,
        };
        let mut dim: usize = 1;
        for _ in 0..n_modes {
            dim = dim.saturating_mul(cutoff + 1);
        }
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        Ok(FockBasis {
            stats,
            n_modes,
            cutoff,
            dim,
        })
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let base = self.cutoff + 1;
        (0..self.n_modes)
            .map(|_| {
                let o = index % base;
                index /= base;
                o
            })
            .collect()
    }

    pub fn index_of(&self, occupations: &[usize]) -> usize {
        let base = self.cutoff + 1;
        occupations.iter().rev().fold(0, |acc, &o| acc * base + o)
    }

    fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow(mode as u32)
    }

    fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % (self.cutoff + 1)
    }

    fn jordan_wigner_negative(&self, index: usize, mode: usize) -> bool {
        self.stats == Statistics::Fermi && (0..mode).filter(|&j| self.occupation(index, j) == 1).count() % 2 == 1
    }

    /// `a_mode |index⟩ = amp |new⟩`.
    fn lower(&self, mode: usize, index: usize) -> Option<(usize, f64)> {
        let occ = self.occupation(index, mode);
        if occ == 0 {
            return None;
        }
        let mut amp = (occ as f64).sqrt();
        if self.jordan_wigner_negative(index, mode) {
            amp = -amp;
        }
        Some((index - self.stride(mode), amp))
    }

    /// `a*_mode |index⟩ = amp |new⟩`, `None` above the cutoff.
    fn raise(&self, mode: usize, index: usize) -> Option<(usize, f64)> {
        let occ = self.occupation(index, mode);
        if occ >= self.cutoff {
            return None;
        }
        let mut amp = ((occ + 1) as f64).sqrt();
        if self.jordan_wigner_negative(index, mode) {
            amp = -amp;
        }
        Some((index + self.stride(mode), amp))
    }

    fn check_poly(&self, poly: &WickPolynomial) -> Result<()> {
        if poly.stats() != self.stats {
            return Err(Error::StatisticsMismatch {
                expected: self.stats,
                found: poly.stats(),
            });
        }
        if poly.n_modes() != self.n_modes {
            return Err(Error::ModeMismatch {
                expected: self.n_modes,
                found: poly.n_modes(),
            });
        }
        Ok(())
    }
}

/// Column-compressed operator on a Fock basis.
#[derive(Debug, Clone)]
pub struct FockOperator {
    dim: usize,
    columns: Vec<Vec<(usize, C64)>>,
}

impl FockOperator {
    pub fn from_polynomial(poly: &WickPolynomial, basis: &FockBasis) -> Result<Self> {
        basis.check_poly(poly)?;
        let mut columns = Vec::with_capacity(basis.dim);
        let mut scratch = vec![C64::new(0.0, 0.0); basis.dim];
        let mut touched: Vec<usize> = Vec::new();
        for col in 0..basis.dim {
            'terms: for (key, &coeff) in poly.terms() {
                let mut idx = col;
                let mut amp = coeff;
                for &j in key.annihilation().iter().rev() {
                    match basis.lower(j, idx) {
                        Some((next, f)) => {
                            idx = next;
                            amp *= f;
                        }
                        None => continue 'terms,
                    }
                }
                for &i in key.creation().iter().rev() {
                    match basis.raise(i, idx) {
                        Some((next, f)) => {
                            idx = next;
                            amp *= f;
                        }
                        None => continue 'terms,
                    }
                }
                if scratch[idx] == C64::new(0.0, 0.0) {
                    touched.push(idx);
                }
                scratch[idx] += amp;
            }
            touched.sort_unstable();
            touched.dedup();
            let column = touched
                .iter()
                .map(|&r| (r, std::mem::replace(&mut scratch[r], C64::new(0.0, 0.0))))
                .filter(|(_, v)| *v != C64::new(0.0, 0.0))
                .collect();
            touched.clear();
            columns.push(column);
        }
        Ok(FockOperator {
            dim: basis.dim,
            columns,
        })
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for (col, entries) in self.columns.iter().enumerate() {
            let x = v[col];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for &(row, val) in entries {
                out[row] += val * x;
            }
        }
        out
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = linalg::zeros(self.dim, self.dim);
        for (col, entries) in self.columns.iter().enumerate() {
            for &(row, val) in entries {
                m[(row, col)] = val;
            }
        }
        m
    }

    fn norm_one(&self) -> f64 {
        self.columns
            .iter()
            .map(|c| c.iter().map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `exp(i·self) v` by Taylor steps on `v`, with enough sub-steps that each
    /// step's generator has 1-norm at most 1/2.
    pub fn exp_i_apply(&self, v: &CVector) -> CVector {
        let norm = self.norm_one();
        let steps = ((norm / 0.5).ceil() as usize).max(1);
        let factor = C64::new(0.0, 1.0 / steps as f64);
        let mut out = v.clone();
        for _ in 0..steps {
            let mut term = out.clone();
            let mut sum = out.clone();
            for k in 1..80 {
                term = self.apply(&term) * (factor / k as f64);
                sum += &term;
                if linalg::vec_norm(&term) <= 1e-17 * linalg::vec_norm(&sum) {
                    break;
                }
            }
            out = sum;
        }
        out
    }
}

/// Ladder matrices `(a_i, a*_i)` for every mode.
pub fn build_ladders(basis: &FockBasis) -> Result<Vec<(CMatrix, CMatrix)>> {
    (0..basis.n_modes)
        .map(|i| {
            let a = WickPolynomial::new(basis.n_modes, basis.stats)?.with_term(&[], &[i], C64::new(1.0, 0.0))?;
            let ad = WickPolynomial::new(basis.n_modes, basis.stats)?.with_term(&[i], &[], C64::new(1.0, 0.0))?;
            Ok((
                FockOperator::from_polynomial(&a, basis)?.to_dense(),
                FockOperator::from_polynomial(&ad, basis)?.to_dense(),
            ))
        })
        .collect()
}

/// Dense matrix of `Σ h_{α,β} (a*)^α a^β` on the truncated basis.
pub fn quantize(poly: &WickPolynomial, basis: &FockBasis) -> Result<CMatrix> {
    Ok(FockOperator::from_polynomial(poly, basis)?.to_dense())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub basis: FockBasis,
    pub amplitudes: CVector,
}

impl FockVector {
    pub fn vacuum(basis: &FockBasis) -> Self {
        let mut amplitudes = CVector::zeros(basis.dim);
        amplitudes[0] = C64::new(1.0, 0.0);
        FockVector {
            basis: basis.clone(),
            amplitudes,
        }
    }

    pub fn norm(&self) -> f64 {
        linalg::vec_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &FockVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    fn normalized(mut self) -> Self {
        let n = self.norm();
        self.amplitudes /= C64::new(n, 0.0);
        self
    }
}

/// A Gaussian vector together with the probability weight lost to
/// truncation (`1 − ‖v‖²` before normalization).
#[derive(Debug, Clone)]
pub struct GaussianVector {
    pub vector: FockVector,
    pub tail: f64,
}

/// Vector of the chart `(c, y)`:
/// `e^{iφ(y)} det(1−c*c)^{1/4} e^{½c a*a*}Ω` (bosons) or
/// `det(1+c*c)^{−1/4} e^{½c a*a*}Ω` (fermions).
///
/// The displaced bosonic state is generated as
/// `N e^{½c a*a* + d·a*}Ω` with `α = iy`, `d = α − cᾱ`. Only raising
/// operators appear, so the retained amplitudes are exact and the missing
/// norm is the exact tail weight.
pub fn gaussian_vector(chart: &ThoulessChart, basis: &FockBasis, tail_tol: f64) -> Result<GaussianVector> {
    let n = chart.n_modes();
    if chart.stats != basis.stats {
        return Err(Error::StatisticsMismatch {
            expected: basis.stats,
            found: chart.stats,
        });
    }
    if n != basis.n_modes {
        return Err(Error::ModeMismatch {
            expected: basis.n_modes,
            found: n,
        });
    }
    let cc = chart.c.adjoint() * &chart.c;
    let id = linalg::identity(n);
    let (log_norm, d) = match chart.stats {
        Statistics::Bose => {
            let cn = linalg::op_norm(&chart.c);
            if cn >= 1.0 {
                return Err(Error::InvalidArgument(format!("bosonic chart requires ‖c‖ < 1 (got {cn})")));
            }
            let det = (id - cc).determinant();
            let alpha = &chart.y * C64::new(0.0, 1.0);
            let alpha_bar = alpha.map(|z| z.conj());
            let d = &alpha - &chart.c * &alpha_bar;
            let quad = (alpha_bar.transpose() * &chart.c * &alpha_bar)[(0, 0)];
            let log_norm = det.ln() * 0.25 - C64::new(alpha.norm_squared() * 0.5, 0.0) + quad * 0.5;
            (log_norm, d)
        }
        Statistics::Fermi => {
            let det = (id + cc).determinant();
            (det.ln() * -0.25, CVector::zeros(n))
        }
    };

    let mut raising = WickPolynomial::new(n, chart.stats)?;
    for i in 0..n {
        for j in 0..n {
            raising.add_term(&[i, j], &[], chart.c[(i, j)] * 0.5)?;
        }
        raising.add_term(&[i], &[], d[i])?;
    }
    let op = FockOperator::from_polynomial(&raising, basis)?;
    let mut term = FockVector::vacuum(basis).amplitudes;
    let mut sum = term.clone();
    let max_level = basis.n_modes * basis.cutoff + 1;
    for k in 1..=max_level {
        term = op.apply(&term) / C64::new(k as f64, 0.0);
        if term.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            break;
        }
        sum += &term;
    }
    let amplitudes = sum * log_norm.exp();
    let raw = FockVector {
        basis: basis.clone(),
        amplitudes,
    };
    let tail = (1.0 - raw.norm().powi(2)).max(0.0);
    if tail > tail_tol {
        return Err(Error::TruncationTail { tail, tol: tail_tol });
    }
    Ok(GaussianVector {
        vector: raw.normalized(),
        tail,
    })
}

/// `e^{iA(θ,y)} v` with the generator quantized on the truncated basis.
pub fn exp_generator(g: &Generator, basis: &FockBasis, v: &FockVector) -> Result<FockVector> {
    if v.basis != *basis {
        return Err(Error::DimensionMismatch {
            expected: basis.dim,
            found: v.basis.dim,
        });
    }
    let a = g.as_polynomial()?;
    let op = FockOperator::from_polynomial(&a, basis)?;
    Ok(FockVector {
        basis: basis.clone(),
        amplitudes: op.exp_i_apply(&v.amplitudes),
    })
}

/// `⟨v|Mv⟩`.
pub fn expectation(v: &FockVector, m: &CMatrix) -> Result<C64> {
    if m.nrows() != v.amplitudes.len() || m.ncols() != v.amplitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: v.amplitudes.len(),
            found: m.nrows(),
        });
    }
    Ok(v.amplitudes.dotc(&(m * &v.amplitudes)))
}

/// `⟨v|h(a*,a)v⟩` without forming the dense matrix.
pub fn expectation_poly(v: &FockVector, h: &WickPolynomial) -> Result<C64> {
    let op = FockOperator::from_polynomial(h, &v.basis)?;
    Ok(v.amplitudes.dotc(&op.apply(&v.amplitudes)))
}

/// Lowest eigenpair of the truncated Hamiltonian.
pub fn ground_state(h: &WickPolynomial, basis: &FockBasis) -> Result<(f64, FockVector)> {
    let m = quantize(h, basis)?;
    let (values, vectors) = linalg::hermitian_eigen(&m);
    Ok((
        values[0],
        FockVector {
            basis: basis.clone(),
            amplitudes: vectors.column(0).into_owned(),
        },
    ))
}

/// Vector representing `UΩ`.
///
/// Bosonic states go through the Thouless chart. Fermionic states (including
/// odd and vacuum-orthogonal ones) are the kernel of the quantized
/// quasiparticle number `Σ b*_i b_i`.
pub fn state_vector(map: &BogoliubovMap, basis: &FockBasis, tail_tol: f64) -> Result<GaussianVector> {
    match map.stats() {
        Statistics::Bose => gaussian_vector(&map.chart()?, basis, tail_tol),
        Statistics::Fermi => {
            let n = map.n_modes();
            let number = WickPolynomial::number_operator(n, Statistics::Fermi)?;
            let (creation, annihilation) = map.quasiparticle_operators();
            let nb = substitute_linear(&number, &creation, &annihilation)?;
            let (lowest, vector) = ground_state(&nb, basis)?;
            if lowest.abs() > 1e-8 {
                return Err(Error::InvalidMap { residual: lowest.abs() });
            }
            Ok(GaussianVector { vector, tail: 0.0 })
        }
    }
}

/// Smallest cutoff at or above `start_cutoff` whose bosonic state vector has
/// tail weight below `tail_tol`.
pub fn adaptive_state_vector(
    map: &BogoliubovMap,
    start_cutoff: usize,
    tail_tol: f64,
    cap: usize,
) -> Result<GaussianVector> {
    let mut cutoff = start_cutoff.max(1);
    loop {
        let basis = FockBasis::with_cap(map.stats(), map.n_modes(), cutoff, cap)?;
        match state_vector(map, &basis, tail_tol) {
            Err(Error::TruncationTail { .. }) if map.stats() == Statistics::Bose => cutoff += 2,
            other => return other,
        }
    }
}
