//! Gaussian-state minimization of `⟨Φ|HΦ⟩` and certification of the
//! stationarity conditions at the result.
//!
//! At the current map `U` the Hamiltonian is rewritten in the quasiparticle
//! operators `b = UaU*`; the linear block `K` and the anomalous block `O` are
//! exactly the gradient of the energy in the local generator chart. The
//! optimizer is steepest descent in that chart with an Armijo backtracking
//! line search, recentred at every accepted step.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bogoliubov::{BogoliubovMap, Generator};
use crate::error::{Error, Result};
use crate::fock_oracle::{self, FockBasis};
use crate::linalg;
use crate::wick_poly::{Parity, Statistics, TransformedBlocks, WickPolynomial};
use crate::{CMatrix, CVector, C64};

/// Hermiticity tolerance for admissible Hamiltonians.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    BoseEven,
    BoseFull,
    FermiEven,
    FermiOdd,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::BoseEven, Mode::BoseFull, Mode::FermiEven, Mode::FermiOdd];

    pub fn stats(self) -> Statistics {
        match self {
            Mode::BoseEven | Mode::BoseFull => Statistics::Bose,
            Mode::FermiEven | Mode::FermiOdd => Statistics::Fermi,
        }
    }

    /// Whether the displacement part `y` of the generator is varied.
    pub fn varies_displacement(self) -> bool {
        self == Mode::BoseFull
    }

    pub fn requires_even(self) -> bool {
        self != Mode::BoseFull
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::BoseEven => "bose-even",
            Mode::BoseFull => "bose-full",
            Mode::FermiEven => "fermi-even",
            Mode::FermiOdd => "fermi-odd",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    /// Iteration cap reached, or the line search could not find any
    /// decrease before the step underflowed.
    MaxIterations,
    UnboundedBelow,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIterations => "max_iterations",
            Status::UnboundedBelow => "unbounded_below",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub tol_grad: f64,
    pub max_iterations: usize,
    pub initial_step: f64,
    pub shrink: f64,
    pub armijo: f64,
    pub energy_floor: f64,
    pub q_norm_cap: f64,
    /// Random starts tried in addition to the deterministic ones.
    pub random_starts: usize,
    pub start_scale: f64,
    pub seed: u64,
    /// Reflection vector for odd fermionic starts; coordinate reflections
    /// are used when absent.
    pub odd_reflection: Option<CVector>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol_grad: 1e-8,
            max_iterations: 5000,
            initial_step: 0.5,
            shrink: 0.5,
            armijo: 1e-4,
            energy_floor: -1e6,
            q_norm_cap: 1e4,
            random_starts: 4,
            start_scale: 0.1,
            seed: 0,
            odd_reflection: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizationResult {
    pub map: BogoliubovMap,
    pub blocks: TransformedBlocks,
    pub energy: f64,
    pub d_spectrum: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub status: Status,
    /// Energy after every accepted step, starting with the initial energy.
    pub trace: Vec<f64>,
    /// Index of the start that produced this result.
    pub start: usize,
}

impl MinimizationResult {
    /// Result describing an externally supplied map, e.g. one read back from
    /// a report. Converged exactly when the residual is below `tol_grad`.
    pub fn at(h: &WickPolynomial, map: BogoliubovMap, tol_grad: f64) -> Result<Self> {
        let blocks = residuals(h, &map)?;
        let status = if blocks.residual() < tol_grad {
            Status::Converged
        } else {
            Status::MaxIterations
        };
        Ok(MinimizationResult {
            energy: blocks.energy(),
            d_spectrum: blocks.d_spectrum(),
            residual: blocks.residual(),
            trace: vec![blocks.energy()],
            map,
            blocks,
            iterations: 0,
            status,
            start: 0,
        })
    }
}

/// Rejects Hamiltonians that are non-Hermitian or of the wrong statistics or
/// parity for `mode`.
pub fn check_admissible(h: &WickPolynomial, mode: Mode) -> Result<()> {
    if h.stats() != mode.stats() {
        return Err(Error::StatisticsMismatch {
            expected: mode.stats(),
            found: h.stats(),
        });
    }
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let parity = h.parity();
    if mode.requires_even() && parity != Parity::Even {
        return Err(Error::ParityViolation {
            mode: mode.name().to_string(),
            parity,
        });
    }
    Ok(())
}

/// Blocks of `h̃` with `H = h̃(b*, b)`, `b = UaU*`.
pub fn residuals(h: &WickPolynomial, u: &BogoliubovMap) -> Result<TransformedBlocks> {
    Ok(u.express_in_quasiparticles(h)?.extract_blocks())
}

/// Same as [`residuals`] without the degree ≥ 3 remainder, which the
/// optimizer never needs.
fn low_order_blocks(h: &WickPolynomial, u: &BogoliubovMap) -> Result<TransformedBlocks> {
    Ok(u.express_in_quasiparticles_up_to(h, 2)?.extract_blocks())
}

fn fermi_sign(stats: Statistics) -> f64 {
    match stats {
        Statistics::Bose => 1.0,
        Statistics::Fermi => -1.0,
    }
}

/// First-order change of `⟨UΩ|H UΩ⟩` along `U ↦ U e^{isA(θ,y)}` at `s = 0`.
///
/// For Hermitian `H` this is `2 Im(±Σ θ̄_ij O_ij) + 2 Im(Σ ȳ_i K_i)` with `+`
/// for bosons and `−` for fermions.
pub fn directional_derivative(blocks: &TransformedBlocks, g: &Generator) -> f64 {
    let sign = fermi_sign(blocks.stats);
    let mut creation_side = C64::new(0.0, 0.0);
    let mut annihilation_side = C64::new(0.0, 0.0);
    for i in 0..blocks.n_modes {
        for j in 0..blocks.n_modes {
            creation_side += g.theta[(i, j)].conj() * blocks.o[(i, j)] * sign;
            annihilation_side += g.theta[(i, j)] * blocks.o_annihilation[(i, j)] * sign;
        }
        creation_side += g.y[i].conj() * blocks.k[i];
        annihilation_side += g.y[i] * blocks.k_annihilation[i];
    }
    (C64::new(0.0, 1.0) * (annihilation_side - creation_side)).re
}

/// Steepest-descent generator: slope `−2(‖O‖² + ‖K‖²)` along it.
pub fn descent_direction(blocks: &TransformedBlocks, mode: Mode) -> Generator {
    let i = C64::new(0.0, fermi_sign(blocks.stats));
    let theta = &blocks.o * i;
    let y = if mode.varies_displacement() {
        &blocks.k * C64::new(0.0, 1.0)
    } else {
        CVector::zeros(blocks.n_modes)
    };
    Generator {
        stats: blocks.stats,
        theta,
        y,
    }
}

fn unit_vector(n: usize, k: usize) -> CVector {
    CVector::from_fn(n, |i, _| if i == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

fn starting_maps(n: usize, mode: Mode, opts: &Options) -> Result<Vec<BogoliubovMap>> {
    let stats = mode.stats();
    let base: Vec<BogoliubovMap> = match mode {
        Mode::FermiOdd => match &opts.odd_reflection {
            Some(y) => vec![BogoliubovMap::reflection(y)?],
            None => (0..n)
                .map(|k| BogoliubovMap::reflection(&unit_vector(n, k)))
                .collect::<Result<_>>()?,
        },
        _ => vec![BogoliubovMap::identity(n, stats)?],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = base.clone();
    for r in 0..opts.random_starts {
        let y_scale = if mode.varies_displacement() { opts.start_scale } else { 0.0 };
        let g = Generator::random(&mut rng, n, stats, opts.start_scale, y_scale);
        let anchor = &base[r % base.len()];
        starts.push(anchor.compose(&BogoliubovMap::from_generator(&g)?)?);
    }
    Ok(starts)
}

/// Multistart minimization. Deterministic for a fixed `opts.seed`.
///
/// Any start that runs off to `UnboundedBelow` decides the outcome. Otherwise
/// the lowest converged energy wins, falling back to the lowest energy.
pub fn minimize(h: &WickPolynomial, mode: Mode, opts: &Options) -> Result<MinimizationResult> {
    check_admissible(h, mode)?;
    let mut best: Option<MinimizationResult> = None;
    for (index, start) in starting_maps(h.n_modes(), mode, opts)?.into_iter().enumerate() {
        let mut run = minimize_from(h, mode, start, opts)?;
        run.start = index;
        if run.status == Status::UnboundedBelow {
            return Ok(run);
        }
        let better = match &best {
            None => true,
            Some(b) => {
                let (new_ok, old_ok) = (run.status == Status::Converged, b.status == Status::Converged);
                (new_ok && !old_ok) || (new_ok == old_ok && run.energy < b.energy)
            }
        };
        if better {
            best = Some(run);
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no starting point".into()))
}

/// Single descent run from `start`.
pub fn minimize_from(
    h: &WickPolynomial,
    mode: Mode,
    start: BogoliubovMap,
    opts: &Options,
) -> Result<MinimizationResult> {
    check_admissible(h, mode)?;
    let mut u = start;
    let mut blocks = low_order_blocks(h, &u)?;
    let mut energy = blocks.energy();
    let mut trace = vec![energy];
    let mut status = Status::MaxIterations;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        if blocks.residual() < opts.tol_grad {
            status = Status::Converged;
            break;
        }
        if energy < opts.energy_floor || linalg::frobenius(u.q()) > opts.q_norm_cap {
            status = Status::UnboundedBelow;
            break;
        }
        let direction = descent_direction(&blocks, mode);
        let slope = directional_derivative(&blocks, &direction);
        let noise = 1e-12 * (1.0 + energy.abs());
        let mut step = opts.initial_step;
        let accepted = loop {
            // A step so long that its map cannot be formed accurately is
            // simply too long.
            let candidate = match BogoliubovMap::from_generator(&direction.scaled(step)) {
                Ok(v) => u.compose(&v)?,
                Err(Error::InvalidMap { .. }) => {
                    step *= opts.shrink;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let cand_blocks = low_order_blocks(h, &candidate)?;
            let cand_energy = cand_blocks.energy();
            let sufficient = cand_energy <= energy + opts.armijo * step * slope;
            // Near convergence the predicted decrease drops below roundoff;
            // there a step that does not raise the energy beyond noise and
            // shrinks the gradient is accepted instead.
            let unresolved = (step * slope).abs() < noise
                && cand_energy <= energy + noise
                && cand_blocks.residual() < blocks.residual();
            if sufficient || unresolved {
                break Some((candidate, cand_blocks, cand_energy));
            }
            step *= opts.shrink;
            if step < 1e-16 {
                break None;
            }
        };
        let Some((next_u, next_blocks, next_energy)) = accepted else {
            break;
        };
        u = next_u;
        blocks = next_blocks;
        energy = next_energy;
        trace.push(energy);
        iterations += 1;
    }
    if status == Status::MaxIterations && blocks.residual() < opts.tol_grad {
        status = Status::Converged;
    }

    let blocks = residuals(h, &u)?;
    Ok(MinimizationResult {
        energy: blocks.energy(),
        d_spectrum: blocks.d_spectrum(),
        residual: blocks.residual(),
        map: u,
        blocks,
        iterations,
        status,
        trace,
        start: 0,
    })
}

/// Outcome of a single certification check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub passed: bool,
    /// Largest observed deviation.
    pub max_error: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(max_error: f64, tolerance: f64) -> Self {
        Check {
            passed: max_error <= tolerance,
            max_error,
            tolerance,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Step of the finite-difference and quadratic checks.
    pub fd_step: f64,
    pub directions: usize,
    pub gauge_samples: usize,
    pub gauge_tol: f64,
    /// Relative tolerance of the quadratic-coefficient check.
    pub quadratic_rel_tol: f64,
    /// Starting Bose cutoff; raised until the state's tail is negligible.
    pub cutoff: usize,
    pub dim_cap: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            fd_step: 1e-3,
            directions: 10,
            gauge_samples: 5,
            gauge_tol: 1e-8,
            quadratic_rel_tol: 0.05,
            cutoff: fock_oracle::DEFAULT_CUTOFF,
            dim_cap: fock_oracle::DEFAULT_DIM_CAP,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Certification {
    pub residual_k: f64,
    pub residual_o: f64,
    pub fd_check: Check,
    /// Only for bosonic runs, where displacements are available.
    pub quadratic_check: Option<Check>,
    pub gauge_check: Check,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.fd_check.passed && self.gauge_check.passed && self.quadratic_check.as_ref().is_none_or(|c| c.passed)
    }
}

/// Tail tolerance used when choosing a cutoff for derivative checks; the
/// evaluations themselves accept somewhat larger tails.
const FD_TAIL_SELECT: f64 = 1e-13;
const FD_TAIL_EVAL: f64 = 1e-9;

/// Truncated basis in which the state `UΩ` has a negligible tail.
pub fn oracle_basis(u: &BogoliubovMap, start_cutoff: usize, tail_tol: f64, cap: usize) -> Result<FockBasis> {
    let mut cutoff = start_cutoff.max(1);
    loop {
        let basis = FockBasis::with_cap(u.stats(), u.n_modes(), cutoff, cap)?;
        match fock_oracle::state_vector(u, &basis, tail_tol) {
            Ok(_) => return Ok(basis),
            Err(Error::TruncationTail { .. }) if u.stats() == Statistics::Bose => cutoff += 2,
            Err(e) => return Err(e),
        }
    }
}

/// `⟨UΩ|H UΩ⟩` computed on the truncated Fock space.
pub fn oracle_energy(h: &WickPolynomial, u: &BogoliubovMap, basis: &FockBasis, tail_tol: f64) -> Result<f64> {
    let v = fock_oracle::state_vector(u, basis, tail_tol)?.vector;
    Ok(fock_oracle::expectation_poly(&v, h)?.re)
}

/// Richardson-extrapolated central difference of the oracle energy along
/// `U e^{isA}` at `s = 0`.
pub fn oracle_derivative(
    h: &WickPolynomial,
    u: &BogoliubovMap,
    g: &Generator,
    step: f64,
    basis: &FockBasis,
) -> Result<f64> {
    let energy_at = |s: f64| -> Result<f64> {
        let moved = u.compose(&BogoliubovMap::from_generator(&g.scaled(s))?)?;
        oracle_energy(h, &moved, basis, FD_TAIL_EVAL)
    };
    let central = |s: f64| -> Result<f64> { Ok((energy_at(s)? - energy_at(-s)?) / (2.0 * s)) };
    let coarse = central(step)?;
    let fine = central(step / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn random_unit_generator(rng: &mut ChaCha8Rng, n: usize, mode: Mode) -> Generator {
    let y_scale = if mode.stats() == Statistics::Bose { 1.0 } else { 0.0 };
    let g = Generator::random(rng, n, mode.stats(), 1.0, y_scale);
    let norm = g.norm();
    g.scaled(1.0 / norm)
}

/// Runs the certification battery on a converged result.
pub fn certify(
    result: &MinimizationResult,
    h: &WickPolynomial,
    mode: Mode,
    opts: &CertifyOptions,
) -> Result<Certification> {
    if result.status != Status::Converged {
        return Err(Error::NotConverged);
    }
    check_admissible(h, mode)?;
    let u = &result.map;
    let n = u.n_modes();
    let blocks = residuals(h, u)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let basis = oracle_basis(u, opts.cutoff, FD_TAIL_SELECT, opts.dim_cap)?;

    let mut fd_error: f64 = 0.0;
    let mut fd_tol: f64 = 1e-6;
    for _ in 0..opts.directions {
        let g = random_unit_generator(&mut rng, n, mode);
        let analytic = directional_derivative(&blocks, &g);
        let numeric = oracle_derivative(h, u, &g, opts.fd_step, &basis)?;
        fd_error = fd_error.max((analytic - numeric).abs());
        fd_tol = fd_tol.max(1e-4 * analytic.abs());
    }
    let fd_check = Check::new(fd_error, fd_tol);

    let quadratic_check = if mode.stats() == Statistics::Bose {
        let y = linalg::random_vector(&mut rng, n);
        let y = &y / C64::new(linalg::vec_norm(&y), 0.0);
        let predicted = (y.adjoint() * &blocks.d * &y)[(0, 0)].re;
        let shift = Generator::new(Statistics::Bose, linalg::zeros(n, n), y)?;
        let energy_at = |s: f64| -> Result<f64> {
            let moved = u.compose(&BogoliubovMap::from_generator(&shift.scaled(s))?)?;
            oracle_energy(h, &moved, &basis, FD_TAIL_EVAL)
        };
        let s = opts.fd_step;
        let base = oracle_energy(h, u, &basis, FD_TAIL_EVAL)?;
        let fitted = (energy_at(s)? + energy_at(-s)? - 2.0 * base) / (2.0 * s * s);
        Some(Check::new(
            (fitted - predicted).abs(),
            opts.quadratic_rel_tol * predicted.abs().max(1e-6),
        ))
    } else {
        None
    };

    let reference_spectrum = blocks.d_spectrum();
    let mut gauge_error: f64 = 0.0;
    for _ in 0..opts.gauge_samples {
        let r = linalg::random_unitary(&mut rng, n);
        let rotated = u.compose(&BogoliubovMap::number_conserving(u.stats(), r)?)?;
        let other = low_order_blocks(h, &rotated)?;
        let spectrum = other.d_spectrum();
        let mut err = (other.b - blocks.b)
            .norm()
            .max((other.k_norm() - blocks.k_norm()).abs())
            .max((other.o_norm() - blocks.o_norm()).abs());
        for (a, b) in spectrum.iter().zip(&reference_spectrum) {
            err = err.max((a - b).abs());
        }
        gauge_error = gauge_error.max(err);
    }
    let gauge_check = Check::new(gauge_error, opts.gauge_tol);

    Ok(Certification {
        residual_k: blocks.k_norm(),
        residual_o: blocks.o_norm(),
        fd_check,
        quadratic_check,
        gauge_check,
    })
}

/// Engine energy against the truncated-space expectation and ground energy.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub expectation: f64,
    pub ground_energy: f64,
    /// Gaussian energy minus the truncated ground energy.
    pub gap: f64,
    pub cutoff: usize,
    pub tail: f64,
}

/// Compares `result` with brute force on a truncated basis. The Bose cutoff
/// starts at `cutoff` and is raised until the Gaussian state fits.
pub fn oracle_compare(
    h: &WickPolynomial,
    u: &BogoliubovMap,
    cutoff: usize,
    tail_tol: f64,
    dim_cap: usize,
) -> Result<OracleComparison> {
    let basis = oracle_basis(u, cutoff, tail_tol, dim_cap)?;
    let state = fock_oracle::state_vector(u, &basis, tail_tol)?;
    let expectation = fock_oracle::expectation_poly(&state.vector, h)?.re;
    let (ground_energy, _) = fock_oracle::ground_state(h, &basis)?;
    Ok(OracleComparison {
        expectation,
        ground_energy,
        gap: expectation - ground_energy,
        cutoff: basis.cutoff(),
        tail: state.tail,
    })
}

/// `D` as a dense matrix with its Hermitian part taken.
pub fn hermitian_d(blocks: &TransformedBlocks) -> CMatrix {
    linalg::hermitian_part(&blocks.d)
}
