//! Dense-matrix quantum engine: exact context expectations for arbitrary
//! states, sequential projective measurement with Lueders updates, readout
//! flip noise, and the empirical violation-threshold scan.
//!
//! States are dense on purpose: state-independence has to be checked against
//! arbitrary pure and mixed states, which stabilizer simulators cannot
//! represent. With at most 2^8 dimensions everything stays cheap.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::context::Context;
use crate::inequality::Inequality;
use crate::pauli::PauliString;
use crate::Error;

/// Density matrices are kept to at most 2^8 dimensions.
pub const MAX_MIXED_QUBITS: usize = 8;
/// Pure state vectors to at most 2^10 amplitudes.
pub const MAX_PURE_QUBITS: usize = 10;

/// State validity tolerance (norms, traces, eigenvalues).
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance for exact expectation checks.
pub const EXPECTATION_TOL: f64 = 1e-9;

type CVec = DVector<Complex64>;
type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone)]
pub enum QuantumState {
    Pure { n: usize, amplitudes: CVec },
    Mixed { n: usize, rho: CMat },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
    Basis,
}

impl std::str::FromStr for StateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "pure" => Ok(StateKind::Pure),
            "mixed" => Ok(StateKind::Mixed),
            "basis" => Ok(StateKind::Basis),
            other => Err(Error::Invariant(format!(
                "unknown state kind '{other}' (expected pure, mixed, or basis)"
            ))),
        }
    }
}

impl QuantumState {
    pub fn pure(n: usize, amplitudes: CVec) -> Result<Self, Error> {
        if n == 0 || n > MAX_PURE_QUBITS {
            return Err(Error::Capability {
                operation: "pure state construction",
                n,
                min: 1,
                max: MAX_PURE_QUBITS,
            });
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::Invariant(format!(
                "amplitude vector length {} is not 2^{n}",
                amplitudes.len()
            )));
        }
        let state = QuantumState::Pure { n, amplitudes };
        state.validate()?;
        Ok(state)
    }

    pub fn mixed(n: usize, rho: CMat) -> Result<Self, Error> {
        if n == 0 || n > MAX_MIXED_QUBITS {
            return Err(Error::Capability {
                operation: "density matrix construction",
                n,
                min: 1,
                max: MAX_MIXED_QUBITS,
            });
        }
        if rho.nrows() != 1 << n || rho.ncols() != 1 << n {
            return Err(Error::Invariant(format!(
                "density matrix shape {}x{} is not 2^{n} square",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let state = QuantumState::Mixed { n, rho };
        state.validate()?;
        Ok(state)
    }

    pub fn basis(n: usize) -> Result<Self, Error> {
        let mut amplitudes = CVec::zeros(1 << n);
        amplitudes[0] = Complex64::new(1.0, 0.0);
        QuantumState::pure(n, amplitudes)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self, Error> {
        let dim = 1usize << n;
        let rho = CMat::identity(dim, dim) / Complex64::new(dim as f64, 0.0);
        QuantumState::mixed(n, rho)
    }

    pub fn n(&self) -> usize {
        match self {
            QuantumState::Pure { n, .. } | QuantumState::Mixed { n, .. } => *n,
        }
    }

    /// Unit norm for pure states; Hermitian, unit trace, and positive
    /// semidefinite (within tolerance) for density matrices.
    pub fn validate(&self) -> Result<(), Error> {
        match self {
            QuantumState::Pure { amplitudes, .. } => {
                let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
                if (norm_sq - 1.0).abs() > STATE_TOL {
                    return Err(Error::Invariant(format!(
                        "pure state norm^2 = {norm_sq}, not 1"
                    )));
                }
            }
            QuantumState::Mixed { rho, .. } => {
                let herm_err = (rho - rho.adjoint()).norm();
                if herm_err > STATE_TOL {
                    return Err(Error::Invariant(format!(
                        "density matrix not Hermitian (deviation {herm_err:e})"
                    )));
                }
                let trace = rho.trace();
                if (trace.re - 1.0).abs() > STATE_TOL || trace.im.abs() > STATE_TOL {
                    return Err(Error::Invariant(format!(
                        "density matrix trace {trace}, not 1"
                    )));
                }
                let min_eig = rho
                    .clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .fold(f64::INFINITY, |acc, &e| acc.min(e));
                if min_eig < -STATE_TOL {
                    return Err(Error::Invariant(format!(
                        "density matrix has negative eigenvalue {min_eig:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Density-matrix view (outer product for pure states).
    pub fn density(&self) -> Result<CMat, Error> {
        match self {
            QuantumState::Pure { n, amplitudes } => {
                if *n > MAX_MIXED_QUBITS {
                    return Err(Error::Capability {
                        operation: "density conversion",
                        n: *n,
                        min: 1,
                        max: MAX_MIXED_QUBITS,
                    });
                }
                Ok(amplitudes * amplitudes.adjoint())
            }
            QuantumState::Mixed { rho, .. } => Ok(rho.clone()),
        }
    }
}

/// Deterministic random state: Haar-like pure states from normalized complex
/// Gaussian amplitudes, mixed states as normalized G G-adjoint.
pub fn random_state(n: usize, kind: StateKind, seed: u64) -> Result<QuantumState, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << n;
    match kind {
        StateKind::Basis => QuantumState::basis(n),
        StateKind::Pure => {
            let mut amplitudes = CVec::zeros(dim);
            for a in amplitudes.iter_mut() {
                *a = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
            }
            let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amplitudes /= Complex64::new(norm, 0.0);
            QuantumState::pure(n, amplitudes)
        }
        StateKind::Mixed => {
            let mut g = CMat::zeros(dim, dim);
            for entry in g.iter_mut() {
                *entry = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
            }
            let mut rho = &g * g.adjoint();
            let trace = rho.trace();
            rho /= trace;
            QuantumState::mixed(n, rho)
        }
    }
}

/// Standard normal via Box-Muller.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Dense matrix of a Pauli string: column `b` is `i^{|x&z|} (-1)^{|b&z|}
/// |b xor x>`, from the `Y = iXZ` convention.
pub fn pauli_matrix(p: &PauliString) -> CMat {
    let dim = 1usize << p.n();
    let x = p.x_mask() as usize;
    let z = p.z_mask() as usize;
    let y_count = (p.x_mask() & p.z_mask()).count_ones();
    let global = match y_count % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let mut m = CMat::zeros(dim, dim);
    for b in 0..dim {
        let sign = if (b & z).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        m[(b ^ x, b)] = global * sign;
    }
    m
}

/// Exact `Tr(rho A B C)`. For any valid state this equals the context sign;
/// that equality is the state-independence check.
pub fn expectation_exact(state: &QuantumState, ctx: &Context) -> Result<f64, Error> {
    if state.n() != ctx.n() {
        return Err(Error::DimensionMismatch {
            left: state.n(),
            right: ctx.n(),
        });
    }
    let [a, b, c] = ctx.members();
    let product = pauli_matrix(a) * pauli_matrix(b) * pauli_matrix(c);
    let value = match state {
        QuantumState::Pure { amplitudes, .. } => {
            (amplitudes.adjoint() * &product * amplitudes)[(0, 0)]
        }
        QuantumState::Mixed { rho, .. } => (rho * product).trace(),
    };
    if value.im.abs() > EXPECTATION_TOL {
        return Err(Error::Invariant(format!(
            "expectation has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

fn projector(m: &CMat, outcome: i8) -> CMat {
    let dim = m.nrows();
    let id = CMat::identity(dim, dim);
    let signed = m * Complex64::new(outcome as f64, 0.0);
    (id + signed) * Complex64::new(0.5, 0.0)
}

fn check_probability(p: f64) -> Result<f64, Error> {
    if !(-EXPECTATION_TOL..=1.0 + EXPECTATION_TOL).contains(&p) {
        return Err(Error::StateCorruption { probability: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Measure one observable projectively with the Lueders update.
pub fn measure_observable<R: Rng>(
    state: &QuantumState,
    observable: &PauliString,
    rng: &mut R,
) -> Result<(i8, QuantumState), Error> {
    if state.n() != observable.n() {
        return Err(Error::DimensionMismatch {
            left: state.n(),
            right: observable.n(),
        });
    }
    let rho = state.density()?;
    let m = pauli_matrix(observable);
    let p_plus = projector(&m, 1);
    let prob_plus = check_probability((&p_plus * &rho).trace().re)?;
    let outcome: i8 = if rng.gen_bool(prob_plus) { 1 } else { -1 };
    let p = if outcome == 1 {
        p_plus
    } else {
        projector(&m, -1)
    };
    let prob = if outcome == 1 { prob_plus } else { 1.0 - prob_plus };
    let updated = (&p * rho * &p) / Complex64::new(prob, 0.0);
    Ok((
        outcome,
        QuantumState::Mixed {
            n: state.n(),
            rho: updated,
        },
    ))
}

/// Measure a context's three observables in sequence. The outcome product
/// always equals the context sign; the post-measurement state is returned so
/// repeatability can be checked.
pub fn sequential_measure<R: Rng>(
    state: &QuantumState,
    ctx: &Context,
    rng: &mut R,
) -> Result<([i8; 3], QuantumState), Error> {
    let mut current = state.clone();
    let mut outcomes = [0i8; 3];
    for (slot, member) in ctx.members().iter().enumerate() {
        let (outcome, next) = measure_observable(&current, member, rng)?;
        outcomes[slot] = outcome;
        current = next;
    }
    Ok((outcomes, current))
}

/// Joint distribution of the three outcomes of a context under sequential
/// Lueders measurement, indexed by bits (bit k set = outcome k is -1).
///
/// Computed by walking the eight projection branches exactly, so sampling
/// from it is equivalent to running `sequential_measure` but costs one
/// categorical draw per shot.
pub fn outcome_distribution(state: &QuantumState, ctx: &Context) -> Result<[f64; 8], Error> {
    outcome_distribution_ordered(state, ctx.members())
}

/// Same as [`outcome_distribution`] but measuring in the given order.
pub fn outcome_distribution_ordered(
    state: &QuantumState,
    members: &[PauliString; 3],
) -> Result<[f64; 8], Error> {
    if state.n() != members[0].n() {
        return Err(Error::DimensionMismatch {
            left: state.n(),
            right: members[0].n(),
        });
    }
    let matrices: Vec<CMat> = members.iter().map(pauli_matrix).collect();
    let mut probs = [0.0f64; 8];
    let rho = state.density()?;
    let mut stack: Vec<(usize, usize, CMat, f64)> = vec![(0, 0, rho, 1.0)];
    while let Some((depth, index, rho, weight)) = stack.pop() {
        if weight <= 0.0 {
            continue;
        }
        if depth == 3 {
            probs[index] = weight;
            continue;
        }
        for outcome in [1i8, -1] {
            let p = projector(&matrices[depth], outcome);
            let branch = &p * &rho * &p;
            let branch_weight = check_probability(branch.trace().re)?;
            let bit = if outcome == -1 { 1usize << depth } else { 0 };
            stack.push((depth + 1, index | bit, branch, branch_weight));
        }
    }
    Ok(probs)
}

/// Independent symmetric readout flips: each recorded outcome is negated
/// with probability `flip_p`. The induced per-correlation error is
/// `eps_corr = 1 - (1 - 2 p)^3`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NoiseModel {
    pub flip_p: f64,
}

impl NoiseModel {
    pub fn new(flip_p: f64) -> Result<Self, Error> {
        if !(0.0..=0.5).contains(&flip_p) {
            return Err(Error::Invariant(format!(
                "flip probability {flip_p} outside [0, 0.5]"
            )));
        }
        Ok(NoiseModel { flip_p })
    }

    pub fn damping(&self) -> f64 {
        (1.0 - 2.0 * self.flip_p).powi(3)
    }

    pub fn eps_corr(&self) -> f64 {
        1.0 - self.damping()
    }

    /// Inverse map: the flip probability producing a given per-correlation
    /// error.
    pub fn from_eps_corr(eps: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Invariant(format!(
                "per-correlation error {eps} outside [0, 1]"
            )));
        }
        NoiseModel::new((1.0 - (1.0 - eps).cbrt()) / 2.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContextEstimate {
    pub context: Context,
    pub corr: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub n: usize,
    pub chi: f64,
    pub chi_stderr: f64,
    pub bound: i64,
    pub bound_shift: f64,
    pub bound_used: f64,
    pub violated: bool,
    pub shots: u64,
    pub flip_p: f64,
    pub eps_corr: f64,
    pub per_context: Vec<ContextEstimate>,
    pub seed: u64,
}

/// Estimate every correlation of the inequality from `shots` sequential runs
/// per context, with readout flips, and aggregate chi.
///
/// Context `i` draws from stream `i` of the seeded generator, so per-context
/// results do not depend on evaluation order. `bound_shift` is the aggregate
/// compatibility correction added to the noncontextual bound before the
/// violation verdict.
pub fn run_experiment(
    state: &QuantumState,
    ineq: &Inequality,
    noise: NoiseModel,
    shots: u64,
    seed: u64,
    bound_shift: f64,
) -> Result<ExperimentResult, Error> {
    if shots == 0 {
        return Err(Error::Invariant("shots must be at least 1".into()));
    }
    if state.n() != ineq.n {
        return Err(Error::DimensionMismatch {
            left: state.n(),
            right: ineq.n,
        });
    }
    let mut per_context = Vec::with_capacity(ineq.num_terms());
    let mut chi = 0.0f64;
    let mut chi_var = 0.0f64;
    for (i, term) in ineq.terms.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let dist = outcome_distribution(state, &term.context)?;
        let mut cumulative = [0.0f64; 8];
        let mut acc = 0.0;
        for (slot, p) in dist.iter().enumerate() {
            acc += p;
            cumulative[slot] = acc;
        }
        let mut product_sum = 0i64;
        for _ in 0..shots {
            let u: f64 = rng.gen_range(0.0..acc);
            let triple = cumulative.iter().position(|&c| u < c).unwrap_or(7);
            let mut negations = (triple as u32).count_ones();
            if noise.flip_p > 0.0 {
                for _ in 0..3 {
                    if rng.gen_bool(noise.flip_p) {
                        negations += 1;
                    }
                }
            }
            product_sum += if negations.is_multiple_of(2) { 1 } else { -1 };
        }
        let corr = product_sum as f64 / shots as f64;
        let stderr = ((1.0 - corr * corr).max(0.0) / shots as f64).sqrt();
        chi += term.coeff as f64 * corr;
        chi_var += stderr * stderr;
        per_context.push(ContextEstimate {
            context: term.context,
            corr,
            stderr,
        });
    }
    let bound_used = ineq.bound as f64 + bound_shift;
    Ok(ExperimentResult {
        n: ineq.n,
        chi,
        chi_stderr: chi_var.sqrt(),
        bound: ineq.bound,
        bound_shift,
        bound_used,
        violated: chi > bound_used,
        shots,
        flip_p: noise.flip_p,
        eps_corr: noise.eps_corr(),
        per_context,
        seed,
    })
}

/// Flip-probability grid given as `start:end:step`, inclusive of the end
/// point up to rounding. All points must be valid flip probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlipGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl std::str::FromStr for FlipGrid {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Invariant(format!(
                "grid '{text}' is not of the form start:end:step"
            )));
        }
        let parse = |part: &str| -> Result<f64, Error> {
            part.parse::<f64>()
                .map_err(|_| Error::Invariant(format!("grid component '{part}' is not a number")))
        };
        let (start, end, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if step <= 0.0 || step.is_nan() || !step.is_finite() {
            return Err(Error::Invariant(format!("grid step {step} must be positive")));
        }
        if start > end {
            return Err(Error::Invariant(format!(
                "grid start {start} exceeds end {end}"
            )));
        }
        if !(0.0..=0.5).contains(&start) || !(0.0..=0.5).contains(&end) {
            return Err(Error::Invariant(format!(
                "grid range [{start}, {end}] outside valid flip probabilities [0, 0.5]"
            )));
        }
        Ok(FlipGrid { start, end, step })
    }
}

impl FlipGrid {
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut i = 0u64;
        loop {
            let v = self.start + self.step * i as f64;
            if v > self.end + 1e-12 {
                break;
            }
            out.push(v.min(0.5));
            i += 1;
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub flip_p: f64,
    pub eps_corr: f64,
    pub chi: f64,
    pub chi_stderr: f64,
    pub violated: bool,
}

/// Run the experiment across a grid of flip probabilities.
pub fn threshold_scan(
    state: &QuantumState,
    ineq: &Inequality,
    flip_ps: &[f64],
    shots: u64,
    seed: u64,
) -> Result<Vec<ScanRow>, Error> {
    let mut rows = Vec::with_capacity(flip_ps.len());
    for (i, &flip_p) in flip_ps.iter().enumerate() {
        let noise = NoiseModel::new(flip_p)?;
        let result = run_experiment(state, ineq, noise, shots, seed.wrapping_add(i as u64), 0.0)?;
        rows.push(ScanRow {
            flip_p,
            eps_corr: noise.eps_corr(),
            chi: result.chi,
            chi_stderr: result.chi_stderr,
            violated: result.violated,
        });
    }
    Ok(rows)
}

/// Locate the eps_corr where chi crosses the bound, by linear interpolation
/// between the neighboring scan rows. chi is linear in eps_corr in
/// expectation, so the interpolation is exact up to Monte Carlo error.
pub fn locate_crossing(rows: &[ScanRow], bound: f64) -> Option<f64> {
    let mut sorted: Vec<&ScanRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.eps_corr.total_cmp(&b.eps_corr));
    for pair in sorted.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if lo.chi >= bound && hi.chi < bound {
            let t = (lo.chi - bound) / (lo.chi - hi.chi);
            return Some(lo.eps_corr + t * (hi.eps_corr - lo.eps_corr));
        }
    }
    None
}
