#![allow(dead_code)]

use hfb_core::bogoliubov::{BogoliubovMap, Generator};
use hfb_core::linalg;
use hfb_core::normal_order::{multiply, LinearOperator};
use hfb_core::wick_poly::{Statistics, WickPolynomial};
use hfb_core::{CVector, C64};
use rand::Rng;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn random_indices<R: Rng>(rng: &mut R, n: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| rng.gen_range(0..n)).collect()
}

fn distinct_indices<R: Rng>(rng: &mut R, n: usize, len: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, len).into_vec()
}

/// Random fermionic Hamiltonian: number terms with energies in `[0.5, 1.5]`
/// plus a random even part.
pub fn random_fermi<R: Rng>(rng: &mut R, n: usize, n_terms: usize) -> WickPolynomial {
    let mut h = WickPolynomial::new(n, Statistics::Fermi).unwrap();
    for i in 0..n {
        h.add_term(&[i], &[i], c(rng.gen_range(0.5..1.5))).unwrap();
    }
    h.checked_add(&random_hermitian(rng, n, Statistics::Fermi, 4, true, n_terms).scaled(c(0.5)))
        .unwrap()
}

/// `T + T†` for `T` a sum of `n_terms` random monomials of degree at most
/// `max_degree`, restricted to even degrees when `even` is set.
pub fn random_hermitian<R: Rng>(
    rng: &mut R,
    n: usize,
    stats: Statistics,
    max_degree: usize,
    even: bool,
    n_terms: usize,
) -> WickPolynomial {
    let mut t = WickPolynomial::new(n, stats).unwrap();
    for _ in 0..n_terms {
        let degree = loop {
            let d = rng.gen_range(1..=max_degree);
            if !even || d % 2 == 0 {
                break d;
            }
        };
        let k = rng.gen_range(0..=degree);
        let (creation, annihilation) = match stats {
            Statistics::Bose => (random_indices(rng, n, k), random_indices(rng, n, degree - k)),
            // repeated fermionic indices would just vanish
            Statistics::Fermi => {
                if k > n || degree - k > n {
                    continue;
                }
                (distinct_indices(rng, n, k), distinct_indices(rng, n, degree - k))
            }
        };
        t.add_term(&creation, &annihilation, linalg::random_complex(rng)).unwrap();
    }
    t.checked_add(&t.adjoint()).unwrap()
}

/// Random bosonic Hamiltonian whose Gaussian energy is bounded below: a
/// dominant number term, a weak random part of degree ≤ 3 (≤ 2 when even),
/// and positive quartic terms `g (L*L)²`.
pub fn random_bounded_bose<R: Rng>(rng: &mut R, n: usize, even: bool) -> WickPolynomial {
    let mut h = WickPolynomial::new(n, Statistics::Bose).unwrap();
    for i in 0..n {
        h.add_term(&[i], &[i], c(rng.gen_range(1.0..2.0))).unwrap();
    }
    let weak_degree = if even { 2 } else { 3 };
    let weak = random_hermitian(rng, n, Statistics::Bose, weak_degree, even, 3).scaled(c(0.1));
    h = h.checked_add(&weak).unwrap();
    for _ in 0..n.min(2) {
        let ann = LinearOperator::new(CVector::zeros(n), linalg::random_vector(rng, n), c(0.0)).unwrap();
        let l = WickPolynomial::new(n, Statistics::Bose).unwrap();
        let l = (0..n).fold(l, |acc, i| acc.with_term(&[], &[i], ann.annihilation[i]).unwrap());
        let ll = multiply(&l.adjoint(), &l).unwrap();
        let quartic = multiply(&ll, &ll).unwrap().scaled(c(rng.gen_range(0.2..0.5)));
        h = h.checked_add(&quartic).unwrap();
    }
    h
}

/// Random valid map. Fermionic maps are odd (a reflection factor is
/// included) when `odd` is set.
pub fn random_map<R: Rng>(rng: &mut R, n: usize, stats: Statistics, scale: f64, odd: bool) -> BogoliubovMap {
    let y_scale = if stats == Statistics::Bose { scale } else { 0.0 };
    let g = Generator::random(rng, n, stats, scale, y_scale);
    let mut m = BogoliubovMap::from_generator(&g).unwrap();
    let r = linalg::random_unitary(rng, n);
    m = m.compose(&BogoliubovMap::number_conserving(stats, r).unwrap()).unwrap();
    if odd && stats == Statistics::Fermi {
        let y = linalg::random_vector(rng, n);
        let y = &y / c(linalg::vec_norm(&y));
        m = BogoliubovMap::reflection(&y).unwrap().compose(&m).unwrap();
    }
    m
}

pub fn squeezed_oscillator(omega: f64, lambda: f64) -> WickPolynomial {
    WickPolynomial::new(1, Statistics::Bose)
        .unwrap()
        .with_term(&[0], &[0], c(omega))
        .unwrap()
        .with_term(&[0, 0], &[], c(lambda))
        .unwrap()
        .with_term(&[], &[0, 0], c(lambda))
        .unwrap()
}

pub fn bcs(eps: f64, delta: f64) -> WickPolynomial {
    WickPolynomial::new(2, Statistics::Fermi)
        .unwrap()
        .with_term(&[0], &[0], c(eps))
        .unwrap()
        .with_term(&[1], &[1], c(eps))
        .unwrap()
        .with_term(&[0, 1], &[], c(delta))
        .unwrap()
        .with_term(&[], &[1, 0], c(delta))
        .unwrap()
}

pub fn displaced_oscillator(shift: f64) -> WickPolynomial {
    WickPolynomial::number_operator(1, Statistics::Bose)
        .unwrap()
        .with_term(&[0], &[], c(shift))
        .unwrap()
        .with_term(&[], &[0], c(shift))
        .unwrap()
}
