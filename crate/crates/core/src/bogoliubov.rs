//! Bogoliubov transformations and the Thouless chart of pure Gaussian states.
//!
//! A map `M = (p, q, ξ)` stands for the unitary `U` with
//! `U a_i U* = p_ij a_j + q_ij a*_j + ξ_i`. On the doubled vector
//! `(a, a*)` it acts by `T = [[p, q], [q̄, p̄]]` plus the shift `(ξ, ξ̄)`.
//! Bosonic maps are affine symplectic, fermionic maps are orthogonal and
//! carry a `Pin` parity flag.
//!
//! Generators are `A(θ, y) = ½(θ_ij a*_i a*_j + θ̄_ij a_j a_i) + y_i a*_i + ȳ_i a_i`
//! and [`BogoliubovMap::from_generator`] returns the map of `e^{iA}`. With this
//! normalization the vacuum image `e^{iA}Ω` has Thouless matrix
//! `c = i tanh(√(θθ*))/√(θθ*) θ` (bosons) or `c = i tan(√(θθ*))/√(θθ*) θ`
//! (fermions).

use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, scalar};
use crate::normal_order::{substitute_linear_truncated, LinearOperator};
use crate::wick_poly::{Statistics, WickPolynomial};
use crate::{CMatrix, CVector, C64};

/// Form residual accepted for a valid map.
pub const FORM_TOL: f64 = 1e-10;

/// Relative singular-value threshold below which a fermionic `p` is singular.
pub const RANK_TOL: f64 = 1e-10;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapParity {
    Even,
    Odd,
}

impl MapParity {
    fn combine(self, other: MapParity) -> MapParity {
        if self == other {
            MapParity::Even
        } else {
            MapParity::Odd
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovMap {
    stats: Statistics,
    p: CMatrix,
    q: CMatrix,
    xi: CVector,
    parity: MapParity,
}

impl BogoliubovMap {
    pub fn identity(n: usize, stats: Statistics) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n_modes must be positive".into()));
        }
        Ok(BogoliubovMap {
            stats,
            p: linalg::identity(n),
            q: linalg::zeros(n, n),
            xi: CVector::zeros(n),
            parity: MapParity::Even,
        })
    }

    /// Validated constructor.
    pub fn new(stats: Statistics, p: CMatrix, q: CMatrix, xi: CVector, parity: MapParity) -> Result<Self> {
        let n = p.nrows();
        for (found, what) in [(p.ncols(), "p"), (q.nrows(), "q"), (q.ncols(), "q"), (xi.len(), "xi")] {
            if found != n {
                return Err(Error::InvalidArgument(format!("{what} has inconsistent shape")));
            }
        }
        if stats == Statistics::Fermi && xi.iter().any(|z| *z != C64::new(0.0, 0.0)) {
            return Err(Error::InvalidArgument("fermionic maps carry no shift".into()));
        }
        if stats == Statistics::Bose && parity == MapParity::Odd {
            return Err(Error::InvalidArgument("bosonic maps are always even".into()));
        }
        let map = BogoliubovMap {
            stats,
            p,
            q,
            xi,
            parity,
        };
        let residual = map.form_residual();
        if residual.is_nan() || residual >= FORM_TOL {
            return Err(Error::InvalidMap { residual });
        }
        Ok(map)
    }

    pub fn n_modes(&self) -> usize {
        self.p.nrows()
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    pub fn q(&self) -> &CMatrix {
        &self.q
    }

    pub fn xi(&self) -> &CVector {
        &self.xi
    }

    pub fn parity(&self) -> MapParity {
        self.parity
    }

    /// The two residuals `‖pp† ∓ qq† − I‖_F` and `‖pqᵀ ∓ qpᵀ‖_F`
    /// (`−` for bosons, `+` for fermions).
    pub fn form_residuals(&self) -> (f64, f64) {
        let n = self.n_modes();
        let pp = &self.p * self.p.adjoint();
        let qq = &self.q * self.q.adjoint();
        let pq = &self.p * self.q.transpose();
        let qp = &self.q * self.p.transpose();
        match self.stats {
            Statistics::Bose => (
                linalg::frobenius(&(pp - qq - linalg::identity(n))),
                linalg::frobenius(&(pq - qp)),
            ),
            Statistics::Fermi => (
                linalg::frobenius(&(pp + qq - linalg::identity(n))),
                linalg::frobenius(&(pq + qp)),
            ),
        }
    }

    pub fn form_residual(&self) -> f64 {
        let (a, b) = self.form_residuals();
        a.max(b)
    }

    /// `T = [[p, q], [q̄, p̄]]`.
    pub fn doubled(&self) -> CMatrix {
        let n = self.n_modes();
        let mut t = linalg::zeros(2 * n, 2 * n);
        t.view_mut((0, 0), (n, n)).copy_from(&self.p);
        t.view_mut((0, n), (n, n)).copy_from(&self.q);
        t.view_mut((n, 0), (n, n)).copy_from(&self.q.map(|z| z.conj()));
        t.view_mut((n, n), (n, n)).copy_from(&self.p.map(|z| z.conj()));
        t
    }

    /// Largest change of the classical form (`Im(z|z′)` for bosons,
    /// `Re(z|z′)` for fermions) under the linear part `z ↦ pz + qz̄`, over
    /// `samples` random vector pairs.
    pub fn sampled_form_defect<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> f64 {
        let n = self.n_modes();
        let form = |z: &CVector, w: &CVector| {
            let s = z.dotc(w);
            match self.stats {
                Statistics::Bose => s.im,
                Statistics::Fermi => s.re,
            }
        };
        let act = |z: &CVector| &self.p * z + &self.q * z.map(|x| x.conj());
        (0..samples)
            .map(|_| {
                let z = linalg::random_vector(rng, n);
                let w = linalg::random_vector(rng, n);
                (form(&act(&z), &act(&w)) - form(&z, &w)).abs()
            })
            .fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.stats != other.stats {
            return Err(Error::StatisticsMismatch {
                expected: self.stats,
                found: other.stats,
            });
        }
        if self.n_modes() != other.n_modes() {
            return Err(Error::ModeMismatch {
                expected: self.n_modes(),
                found: other.n_modes(),
            });
        }
        Ok(())
    }

    /// Map of the product `U₁U₂` (`self` = `U₁`): conjugation by `U₂` first,
    /// then by `U₁`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (p1, q1, x1) = (&self.p, &self.q, &self.xi);
        let (p2, q2, x2) = (&other.p, &other.q, &other.xi);
        let q1c = q1.map(|z| z.conj());
        let p1c = p1.map(|z| z.conj());
        let x1c = x1.map(|z| z.conj());
        Ok(BogoliubovMap {
            stats: self.stats,
            p: p2 * p1 + q2 * q1c,
            q: p2 * q1 + q2 * p1c,
            xi: p2 * x1 + q2 * x1c + x2,
            parity: self.parity.combine(other.parity),
        })
    }

    pub fn inverse(&self) -> Self {
        let p = self.p.adjoint();
        let q = match self.stats {
            Statistics::Bose => -self.q.transpose(),
            Statistics::Fermi => self.q.transpose(),
        };
        let xi = -(&p * &self.xi + &q * self.xi.map(|z| z.conj()));
        BogoliubovMap {
            stats: self.stats,
            p,
            q,
            xi,
            parity: self.parity,
        }
    }

    /// Map of `e^{iA(θ, y)}`, from the exponential of the doubled adjoint
    /// action `[iA, a] = −iθa* − iy`, `[iA, a*] = iθ̄a + iȳ`.
    pub fn from_generator(g: &Generator) -> Result<Self> {
        let n = g.n_modes();
        let has_shift = g.y.iter().any(|z| *z != C64::new(0.0, 0.0));
        let dim = if has_shift { 2 * n + 1 } else { 2 * n };
        let mut gen = linalg::zeros(dim, dim);
        gen.view_mut((0, n), (n, n)).copy_from(&(&g.theta * -I));
        gen.view_mut((n, 0), (n, n)).copy_from(&(g.theta.map(|z| z.conj()) * I));
        if has_shift {
            for i in 0..n {
                gen[(i, 2 * n)] = -I * g.y[i];
                gen[(n + i, 2 * n)] = I * g.y[i].conj();
            }
        }
        let t = linalg::expm(&gen);
        let p = t.view((0, 0), (n, n)).into_owned();
        let q = t.view((0, n), (n, n)).into_owned();
        let xi = if has_shift {
            t.view((0, 2 * n), (n, 1)).column(0).into_owned()
        } else {
            CVector::zeros(n)
        };
        let map = BogoliubovMap {
            stats: g.stats,
            p,
            q,
            xi,
            parity: MapParity::Even,
        };
        let residual = map.form_residual();
        if residual.is_nan() || residual >= FORM_TOL {
            return Err(Error::InvalidMap { residual });
        }
        Ok(map)
    }

    /// Fermionic reflection by the unitary `y·a* + ȳ·a` with `‖y‖ = 1`:
    /// `p = yȳᵀ − I`, `q = yyᵀ`, odd parity.
    pub fn reflection(y: &CVector) -> Result<Self> {
        let norm = linalg::vec_norm(y);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("reflection vector must be a unit vector (norm {norm})")));
        }
        let n = y.len();
        let p = y * y.adjoint() - linalg::identity(n);
        let q = y * y.transpose();
        Ok(BogoliubovMap {
            stats: Statistics::Fermi,
            p,
            q,
            xi: CVector::zeros(n),
            parity: MapParity::Odd,
        })
    }

    /// Number-conserving map `p = r`, `q = 0` for unitary `r`.
    pub fn number_conserving(stats: Statistics, r: CMatrix) -> Result<Self> {
        let n = r.nrows();
        Self::new(stats, r, linalg::zeros(n, n), CVector::zeros(n), MapParity::Even)
    }

    /// Linear operators expressing `b*_i` and `b_i` (`b = UaU*`) through `a`.
    pub fn quasiparticle_operators(&self) -> (Vec<LinearOperator>, Vec<LinearOperator>) {
        operators_from(&self.p, &self.q, &self.xi)
    }

    /// Rewrites `H = h(a*, a)` as the Wick-ordered polynomial `h̃` with
    /// `H = h̃(b*, b)`, `b_i = U a_i U*`.
    pub fn express_in_quasiparticles(&self, h: &WickPolynomial) -> Result<WickPolynomial> {
        self.express_up_to(h, usize::MAX)
    }

    /// Terms of degree at most `max_degree` of [`Self::express_in_quasiparticles`].
    pub fn express_in_quasiparticles_up_to(&self, h: &WickPolynomial, max_degree: usize) -> Result<WickPolynomial> {
        self.express_up_to(h, max_degree)
    }

    fn express_up_to(&self, h: &WickPolynomial, max_degree: usize) -> Result<WickPolynomial> {
        if h.stats() != self.stats {
            return Err(Error::StatisticsMismatch {
                expected: self.stats,
                found: h.stats(),
            });
        }
        if h.n_modes() != self.n_modes() {
            return Err(Error::ModeMismatch {
                expected: self.n_modes(),
                found: h.n_modes(),
            });
        }
        // a = inverse map applied to b
        let inv = self.inverse();
        let (creation, annihilation) = operators_from(&inv.p, &inv.q, &inv.xi);
        substitute_linear_truncated(h, &creation, &annihilation, max_degree)
    }

    /// Thouless chart `(c, y)` of the state `UΩ`.
    pub fn chart(&self) -> Result<ThoulessChart> {
        let n = self.n_modes();
        if self.stats == Statistics::Fermi {
            let sv = linalg::singular_values(&self.p);
            let top = sv.last().copied().unwrap_or(0.0);
            let threshold = RANK_TOL * top.max(f64::MIN_POSITIVE);
            let deficiency = sv.iter().filter(|&&s| s < threshold).count();
            if deficiency > 0 || self.parity == MapParity::Odd {
                return Err(Error::Degenerate {
                    sigma_min: sv.first().copied().unwrap_or(0.0),
                    threshold,
                    deficiency: deficiency.max(1),
                });
            }
        }
        let lu = self.p.clone().lu();
        let solved = lu
            .solve(&self.q)
            .ok_or(Error::InvalidArgument("p-block is singular".into()))?;
        let c = match self.stats {
            Statistics::Bose => linalg::symmetric_part(&(-solved)),
            Statistics::Fermi => linalg::antisymmetric_part(&(-solved)),
        };
        let y = match self.stats {
            Statistics::Bose => {
                // state = e^{iφ(y)} e^{½ c a*a*}Ω with displacement α = iy = ξ of U*.
                let alpha = self.inverse().xi;
                alpha * -I
            }
            Statistics::Fermi => CVector::zeros(n),
        };
        Ok(ThoulessChart {
            stats: self.stats,
            c,
            y,
        })
    }
}

fn operators_from(p: &CMatrix, q: &CMatrix, xi: &CVector) -> (Vec<LinearOperator>, Vec<LinearOperator>) {
    let n = p.nrows();
    let annihilation: Vec<LinearOperator> = (0..n)
        .map(|i| LinearOperator {
            creation: q.row(i).transpose(),
            annihilation: p.row(i).transpose(),
            constant: xi[i],
        })
        .collect();
    let creation = annihilation.iter().map(LinearOperator::adjoint).collect();
    (creation, annihilation)
}

/// Lie-algebra element `i(½(θ a*a* + θ̄ aa) + y·a* + ȳ·a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub stats: Statistics,
    pub theta: CMatrix,
    pub y: CVector,
}

impl Generator {
    pub fn new(stats: Statistics, theta: CMatrix, y: CVector) -> Result<Self> {
        let n = theta.nrows();
        if theta.ncols() != n || y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if theta.ncols() != n { theta.ncols() } else { y.len() },
            });
        }
        let scale = 1.0f64.max(linalg::frobenius(&theta));
        let (defect, theta) = match stats {
            Statistics::Bose => (
                linalg::frobenius(&(&theta - theta.transpose())),
                linalg::symmetric_part(&theta),
            ),
            Statistics::Fermi => (
                linalg::frobenius(&(&theta + theta.transpose())),
                linalg::antisymmetric_part(&theta),
            ),
        };
        if defect > 1e-12 * scale {
            let kind = match stats {
                Statistics::Bose => "symmetric",
                Statistics::Fermi => "antisymmetric",
            };
            return Err(Error::InvalidSymmetry(format!("theta must be {kind} (defect {defect:e})")));
        }
        if stats == Statistics::Fermi && y.iter().any(|z| *z != C64::new(0.0, 0.0)) {
            return Err(Error::InvalidArgument("fermionic generators have no linear part".into()));
        }
        Ok(Generator { stats, theta, y })
    }

    pub fn zero(n: usize, stats: Statistics) -> Self {
        Generator {
            stats,
            theta: linalg::zeros(n, n),
            y: CVector::zeros(n),
        }
    }

    /// Random generator with `θ` entries and `y` entries of magnitude up to
    /// the given scales (`y` forced to zero for fermions).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, stats: Statistics, theta_scale: f64, y_scale: f64) -> Self {
        let raw = linalg::random_matrix(rng, n, n) * scalar(theta_scale);
        let theta = match stats {
            Statistics::Bose => linalg::symmetric_part(&raw),
            Statistics::Fermi => linalg::antisymmetric_part(&raw),
        };
        let y = match stats {
            Statistics::Bose => linalg::random_vector(rng, n) * scalar(y_scale),
            Statistics::Fermi => CVector::zeros(n),
        };
        Generator { stats, theta, y }
    }

    pub fn n_modes(&self) -> usize {
        self.theta.nrows()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Generator {
            stats: self.stats,
            theta: &self.theta * scalar(s),
            y: &self.y * scalar(s),
        }
    }

    /// `sqrt(‖θ‖_F² + ‖y‖²)`.
    pub fn norm(&self) -> f64 {
        (linalg::frobenius(&self.theta).powi(2) + linalg::vec_norm(&self.y).powi(2)).sqrt()
    }

    pub fn theta_op_norm(&self) -> f64 {
        linalg::op_norm(&self.theta)
    }

    /// The Hermitian operator `A(θ, y)` as a Wick polynomial.
    pub fn as_polynomial(&self) -> Result<WickPolynomial> {
        let n = self.n_modes();
        let mut a = WickPolynomial::new(n, self.stats)?;
        for i in 0..n {
            for j in 0..n {
                let t = self.theta[(i, j)] * 0.5;
                a.add_term(&[i, j], &[], t)?;
                a.add_term(&[], &[j, i], t.conj())?;
            }
            a.add_term(&[i], &[], self.y[i])?;
            a.add_term(&[], &[i], self.y[i].conj())?;
        }
        Ok(a)
    }
}

/// `(c, y)` with the state `e^{iφ(y)} N e^{½ c_ij a*_i a*_j} Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThoulessChart {
    pub stats: Statistics,
    pub c: CMatrix,
    pub y: CVector,
}

impl ThoulessChart {
    pub fn n_modes(&self) -> usize {
        self.c.nrows()
    }
}

/// Thouless matrix of `e^{iA(θ,y)}Ω` from the analytic tanh / tan relation.
///
/// The displacement part is read off the exponentiated map.
pub fn c_from_theta(g: &Generator) -> Result<ThoulessChart> {
    let n = g.n_modes();
    let gram = &g.theta * g.theta.adjoint();
    let c = match g.stats {
        Statistics::Bose => {
            let f = linalg::hermitian_function(&gram, |lam| ratio(lam, f64::tanh));
            &f * &g.theta * I
        }
        Statistics::Fermi => {
            let norm = g.theta_op_norm();
            if norm >= FRAC_PI_2 {
                return Err(Error::ChartDomain {
                    norm,
                    limit: FRAC_PI_2,
                });
            }
            let f = linalg::hermitian_function(&gram, |lam| ratio(lam, f64::tan));
            linalg::antisymmetric_part(&(&f * &g.theta * I))
        }
    };
    let c = match g.stats {
        Statistics::Bose => linalg::symmetric_part(&c),
        Statistics::Fermi => c,
    };
    let y = if g.y.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        CVector::zeros(n)
    } else {
        BogoliubovMap::from_generator(g)?.chart()?.y
    };
    Ok(ThoulessChart { stats: g.stats, c, y })
}

/// `f(√λ)/√λ`, continuous at 0.
fn ratio(lam: f64, f: fn(f64) -> f64) -> f64 {
    let s = lam.max(0.0).sqrt();
    if s < 1e-8 {
        1.0
    } else {
        f(s) / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        linalg::frobenius(&(a - b)) < tol
    }

    fn random_map(rng: &mut ChaCha8Rng, n: usize, stats: Statistics) -> BogoliubovMap {
        let g = Generator::random(rng, n, stats, 0.6, 0.6);
        BogoliubovMap::from_generator(&g).unwrap()
    }

    fn maps_close(a: &BogoliubovMap, b: &BogoliubovMap, tol: f64) -> bool {
        close(&a.p, &b.p, tol) && close(&a.q, &b.q, tol) && linalg::vec_norm(&(&a.xi - &b.xi)) < tol
    }

    #[test]
    fn identity_is_exact() {
        let m = BogoliubovMap::identity(1, Statistics::Bose).unwrap();
        assert_eq!(m.p[(0, 0)], c(1.0));
        assert_eq!(m.q[(0, 0)], c(0.0));
        assert_eq!(m.form_residuals(), (0.0, 0.0));
        let f = BogoliubovMap::identity(2, Statistics::Fermi).unwrap();
        assert_eq!(f.p, linalg::identity(2));
        assert_eq!(f.form_residual(), 0.0);
    }

    #[test]
    fn group_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for stats in [Statistics::Bose, Statistics::Fermi] {
            let m = random_map(&mut rng, 3, stats);
            let id = BogoliubovMap::identity(3, stats).unwrap();
            assert!(maps_close(&id.compose(&m).unwrap(), &m, 1e-14));
            assert!(maps_close(&m.compose(&m.inverse()).unwrap(), &id, 1e-10));
            assert!(maps_close(&m.inverse().compose(&m).unwrap(), &id, 1e-10));
            assert_eq!(id.inverse(), id);
        }
    }

    #[test]
    fn squeezes_add() {
        let squeeze = |r: f64| {
            let g = Generator::new(Statistics::Bose, CMatrix::from_element(1, 1, I * r), CVector::zeros(1)).unwrap();
            BogoliubovMap::from_generator(&g).unwrap()
        };
        let composed = squeeze(0.3).compose(&squeeze(0.5)).unwrap();
        assert!(maps_close(&composed, &squeeze(0.8), 1e-13));
        assert!(maps_close(&squeeze(0.4).inverse(), &squeeze(-0.4), 1e-13));
    }

    #[test]
    fn bose_scalar_generator_gives_hyperbolic_map() {
        let t = 0.7;
        let g = Generator::new(Statistics::Bose, CMatrix::from_element(1, 1, I * t), CVector::zeros(1)).unwrap();
        let m = BogoliubovMap::from_generator(&g).unwrap();
        assert!((m.p[(0, 0)] - c(t.cosh())).norm() < 1e-14);
        assert!((m.q[(0, 0)] - c(t.sinh())).norm() < 1e-14);
    }

    #[test]
    fn fermi_pair_generator_gives_rotation() {
        let t = 0.6;
        let theta = CMatrix::from_row_slice(2, 2, &[c(0.0), c(t), c(-t), c(0.0)]);
        let g = Generator::new(Statistics::Fermi, theta, CVector::zeros(2)).unwrap();
        let m = BogoliubovMap::from_generator(&g).unwrap();
        assert!(close(&m.p, &(linalg::identity(2) * c(t.cos())), 1e-14));
        assert!((m.q[(0, 1)] - (-I * t.sin())).norm() < 1e-14);
        assert!((m.q[(1, 0)] - (I * t.sin())).norm() < 1e-14);
    }

    #[test]
    fn displacement_inverse() {
        let y = CVector::from_vec(vec![C64::new(0.3, -0.1), C64::new(-0.2, 0.5)]);
        let g = Generator::new(Statistics::Bose, linalg::zeros(2, 2), y.clone()).unwrap();
        let d = BogoliubovMap::from_generator(&g).unwrap();
        assert!(linalg::vec_norm(&(&d.xi + &y * I)) < 1e-15);
        let inv = d.inverse();
        assert!(linalg::vec_norm(&(&inv.xi - &y * I)) < 1e-15);
    }

    #[test]
    fn form_preserved_after_operations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for stats in [Statistics::Bose, Statistics::Fermi] {
            let a = random_map(&mut rng, 3, stats);
            let b = random_map(&mut rng, 3, stats);
            for m in [a.clone(), a.compose(&b).unwrap(), b.inverse()] {
                assert!(m.form_residual() < FORM_TOL);
                assert!(m.sampled_form_defect(&mut rng, 20) < 1e-10);
            }
        }
    }

    #[test]
    fn odd_parity_arithmetic() {
        let y = CVector::from_vec(vec![c(0.6), C64::new(0.0, 0.8)]);
        let r = BogoliubovMap::reflection(&y).unwrap();
        assert_eq!(r.parity(), MapParity::Odd);
        assert!(r.form_residual() < 1e-15);
        let rr = r.compose(&r).unwrap();
        assert_eq!(rr.parity(), MapParity::Even);
        // the reflection squares to the identity up to sign
        assert!(close(&rr.p, &linalg::identity(2), 1e-15));
    }

    #[test]
    fn c_from_theta_scalar_cases() {
        let zero = c_from_theta(&Generator::zero(2, Statistics::Bose)).unwrap();
        assert_eq!(zero.c, linalg::zeros(2, 2));

        let s = 0.8;
        let g = Generator::new(Statistics::Bose, CMatrix::from_element(1, 1, I * (s / 2.0)), CVector::zeros(1)).unwrap();
        let chart = c_from_theta(&g).unwrap();
        // c = i tanh(|θ|) θ/|θ| = i tanh(s/2) i
        assert!((chart.c[(0, 0)] - c(-(s / 2.0).tanh())).norm() < 1e-14);

        let t = 0.5;
        let theta = CMatrix::from_row_slice(2, 2, &[c(0.0), c(t), c(-t), c(0.0)]);
        let g = Generator::new(Statistics::Fermi, theta, CVector::zeros(2)).unwrap();
        let chart = c_from_theta(&g).unwrap();
        assert!((chart.c[(0, 1)] - I * t.tan()).norm() < 1e-14);
    }

    #[test]
    fn analytic_chart_matches_exponentiated_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for stats in [Statistics::Bose, Statistics::Fermi] {
            for _ in 0..5 {
                let g = Generator::random(&mut rng, 3, stats, 0.4, 0.4);
                let analytic = c_from_theta(&g).unwrap();
                let from_map = BogoliubovMap::from_generator(&g).unwrap().chart().unwrap();
                assert!(close(&analytic.c, &from_map.c, 1e-12));
                assert!(linalg::vec_norm(&(&analytic.y - &from_map.y)) < 1e-12);
            }
        }
    }

    #[test]
    fn fermi_chart_domain() {
        let t = 1.6;
        let theta = CMatrix::from_row_slice(2, 2, &[c(0.0), c(t), c(-t), c(0.0)]);
        let g = Generator::new(Statistics::Fermi, theta, CVector::zeros(2)).unwrap();
        assert!(matches!(c_from_theta(&g), Err(Error::ChartDomain { .. })));
        // still a valid group element
        assert!(BogoliubovMap::from_generator(&g).is_ok());
    }

    #[test]
    fn swap_is_degenerate() {
        let swap = BogoliubovMap::reflection(&CVector::from_element(1, c(1.0))).unwrap();
        assert_eq!(swap.p[(0, 0)], c(0.0));
        assert_eq!(swap.q[(0, 0)], c(1.0));
        match swap.chart() {
            Err(Error::Degenerate { deficiency, .. }) => assert_eq!(deficiency, 1),
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn identity_chart_is_zero() {
        let chart = BogoliubovMap::identity(2, Statistics::Bose).unwrap().chart().unwrap();
        assert_eq!(chart.c, linalg::zeros(2, 2));
        assert_eq!(chart.y, CVector::zeros(2));
    }

    #[test]
    fn symmetry_violations_rejected() {
        let bad = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(
            Generator::new(Statistics::Bose, bad.clone(), CVector::zeros(2)),
            Err(Error::InvalidSymmetry(_))
        ));
        assert!(matches!(
            Generator::new(Statistics::Fermi, bad, CVector::zeros(2)),
            Err(Error::InvalidSymmetry(_))
        ));
    }

    #[test]
    fn invalid_map_rejected() {
        let err = BogoliubovMap::new(
            Statistics::Bose,
            CMatrix::from_element(1, 1, c(2.0)),
            CMatrix::from_element(1, 1, c(0.0)),
            CVector::zeros(1),
            MapParity::Even,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidMap { .. }));
    }
}
