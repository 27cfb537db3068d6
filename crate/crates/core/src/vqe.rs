//! Variational quantum eigensolver driving the UCCD ansatz with the
//! gradient-free COBYLA optimizer.
//!
//! The objective is the energy of the prepared state under a qubit
//! Hamiltonian, evaluated either exactly or through per-term shot sampling.
//! Every evaluation is recorded so the optimization trace can be replayed:
//! [`state_at_iteration`] rebuilds the statevector belonging to any recorded
//! parameter vector.

use crate::ansatz::{ExcitationPool, PreparedCircuit};
use crate::qham::PauliSum;
use crate::scf::AmplitudeVector;
use crate::simstate::{expectation, pauli_term_expectation, sample_ones, Statevector};
use crate::{Error, Result};
use cobyla::{minimize, Func, RhoBeg, StopTols, SuccessStatus};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;
use std::io::{self, Write};

/// Starting point for the parameter vector.
#[derive(Debug, Clone)]
pub enum Guess {
    /// All amplitudes zero: the optimization starts from the reference
    /// determinant.
    Zeros,
    /// Start from precomputed perturbative amplitudes. The labels must match
    /// the excitation pool entry by entry.
    Mp2(AmplitudeVector),
}

/// How the energy objective is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum Objective {
    /// Exact expectation value of the Hamiltonian.
    Exact,
    /// Per-term shot sampling: each non-identity Pauli term is estimated
    /// from a finite number of simulated measurements; the identity term is
    /// added exactly.
    Sampled { shots_per_term: usize },
}

/// Knobs for a VQE run.
#[derive(Debug, Clone)]
pub struct VqeConfig {
    /// Maximum number of objective evaluations (COBYLA `maxeval`). Zero skips
    /// the optimizer entirely and just scores the initial point.
    pub max_iterations: usize,
    /// Initial trust-region radius.
    pub rhobeg: f64,
    /// Final trust-region radius; convergence is declared when the simplex
    /// shrinks below this.
    pub rhoend: f64,
    /// Trotter slices for the product-formula state preparation.
    pub trotter_steps: usize,
    /// Starting parameters.
    pub guess: Guess,
    /// Exact or sampled energies.
    pub objective: Objective,
    /// Seed for the sampled objective's generator (ignored for `Exact`).
    pub seed: u64,
}

impl VqeConfig {
    /// Exact-objective configuration with the default optimizer knobs.
    pub fn exact(guess: Guess, max_iterations: usize) -> Self {
        VqeConfig {
            max_iterations,
            rhobeg: 0.1,
            rhoend: 1e-6,
            trotter_steps: 1,
            guess,
            objective: Objective::Exact,
            seed: 0,
        }
    }
}

/// One objective evaluation as seen by the optimizer.
#[derive(Debug, Clone)]
pub struct EvaluationRecord {
    /// Zero-based evaluation index.
    pub index: usize,
    /// Parameter vector at this evaluation.
    pub theta: Vec<f64>,
    /// Objective value returned to the optimizer.
    pub energy: f64,
}

/// Self-contained record of a VQE run: enough to rebuild any visited state.
#[derive(Debug, Clone)]
pub struct VqeTrace {
    /// Pool the circuit was compiled from.
    pub pool: ExcitationPool,
    /// Trotter slices used during the run.
    pub trotter_steps: usize,
    /// Every objective evaluation, in optimizer order.
    pub evaluations: Vec<EvaluationRecord>,
    /// Parameters of the lowest recorded energy (the initial point if the
    /// optimizer never ran).
    pub best_theta: Vec<f64>,
    /// Lowest recorded energy.
    pub best_energy: f64,
    /// True when COBYLA stopped on its own tolerance rather than the
    /// evaluation budget.
    pub converged: bool,
}

/// Runs VQE for `h` over `pool` and returns the full optimization trace.
pub fn run_vqe(h: &PauliSum, pool: &ExcitationPool, config: &VqeConfig) -> Result<VqeTrace> {
    if h.n_qubits != pool.n_qubits() {
        return Err(Error::InvalidInput(format!(
            "Hamiltonian acts on {} qubits but the pool prepares {}",
            h.n_qubits,
            pool.n_qubits()
        )));
    }
    if let Objective::Sampled { shots_per_term } = config.objective {
        if shots_per_term == 0 {
            return Err(Error::InvalidInput(
                "sampled objective needs at least one shot per term".into(),
            ));
        }
    }
    let theta0 = match &config.guess {
        Guess::Zeros => vec![0.0; pool.len()],
        Guess::Mp2(amps) => {
            if amps.labels != pool.excitations {
                return Err(Error::InvalidInput(
                    "amplitude labels do not match the excitation pool".into(),
                ));
            }
            amps.values.clone()
        }
    };

    let circuit = PreparedCircuit::new(pool, config.trotter_steps)?;
    let reference = pool.reference_state();
    let rng = RefCell::new(ChaCha8Rng::seed_from_u64(config.seed));
    let energy_of = |theta: &[f64]| -> f64 {
        let state = circuit
            .apply(theta, &reference)
            .expect("parameter count was validated against the pool");
        match config.objective {
            Objective::Exact => expectation(&state, h).re,
            Objective::Sampled { shots_per_term } => {
                sampled_energy(&state, h, shots_per_term, &mut *rng.borrow_mut())
            }
        }
    };

    if config.max_iterations == 0 {
        let e0 = energy_of(&theta0);
        return Ok(VqeTrace {
            pool: pool.clone(),
            trotter_steps: config.trotter_steps,
            evaluations: Vec::new(),
            best_theta: theta0,
            best_energy: e0,
            converged: false,
        });
    }

    let outcome = minimize_cobyla(
        energy_of,
        &theta0,
        config.rhobeg,
        config.rhoend,
        config.max_iterations,
    )?;

    let evaluations: Vec<EvaluationRecord> = outcome
        .evaluations
        .into_iter()
        .enumerate()
        .map(|(index, (theta, energy))| EvaluationRecord {
            index,
            theta,
            energy,
        })
        .collect();
    let (best_theta, best_energy) = {
        let best = evaluations
            .iter()
            .min_by(|a, b| a.energy.total_cmp(&b.energy))
            .expect("optimizer performed at least one evaluation");
        (best.theta.clone(), best.energy)
    };

    Ok(VqeTrace {
        pool: pool.clone(),
        trotter_steps: config.trotter_steps,
        evaluations,
        best_theta,
        best_energy,
        converged: outcome.converged,
    })
}

/// Rebuilds the statevector the objective saw at evaluation `k`.
pub fn state_at_iteration(trace: &VqeTrace, k: usize) -> Result<Statevector> {
    let record = trace.evaluations.get(k).ok_or_else(|| {
        Error::InvalidInput(format!(
            "evaluation {k} out of range ({} recorded)",
            trace.evaluations.len()
        ))
    })?;
    let circuit = PreparedCircuit::new(&trace.pool, trace.trotter_steps)?;
    circuit.apply(&record.theta, &trace.pool.reference_state())
}

/// Writes the trace as CSV: `eval,energy,theta_0,...`.
pub fn write_trace_csv<W: Write>(trace: &VqeTrace, mut out: W) -> io::Result<()> {
    write!(out, "eval,energy")?;
    for k in 0..trace.pool.len() {
        write!(out, ",theta_{k}")?;
    }
    writeln!(out)?;
    for record in &trace.evaluations {
        write!(out, "{},{:.12e}", record.index, record.energy)?;
        for t in &record.theta {
            write!(out, ",{t:.12e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Shot-sampled energy: each non-identity term's expectation is replaced by a
/// binomial estimate at the exact outcome probability `(1 + <P>)/2`.
fn sampled_energy<R: rand::Rng>(
    state: &Statevector,
    h: &PauliSum,
    shots_per_term: usize,
    rng: &mut R,
) -> f64 {
    let mut energy = 0.0;
    for (p, coeff) in h.terms() {
        if p.is_identity() {
            energy += coeff.re;
            continue;
        }
        let exact = pauli_term_expectation(state, p).re;
        let p_plus = 0.5 * (1.0 + exact.clamp(-1.0, 1.0));
        let ones = sample_ones(p_plus, shots_per_term, rng);
        let estimate = 2.0 * (ones as f64) / (shots_per_term as f64) - 1.0;
        energy += coeff.re * estimate;
    }
    energy
}

pub(crate) struct MinimizeOutcome {
    /// `(theta, value)` for every objective call, in order.
    pub evaluations: Vec<(Vec<f64>, f64)>,
    /// True when the run ended on a tolerance criterion, false on the
    /// evaluation budget.
    pub converged: bool,
}

/// Thin wrapper around COBYLA: unconstrained, unbounded, records every
/// evaluation, and treats `xtol_abs = rhoend` as the convergence criterion.
pub(crate) fn minimize_cobyla<F: FnMut(&[f64]) -> f64>(
    objective: F,
    x0: &[f64],
    rhobeg: f64,
    rhoend: f64,
    max_evaluations: usize,
) -> Result<MinimizeOutcome> {
    if x0.is_empty() {
        return Err(Error::InvalidInput(
            "optimizer needs at least one parameter".into(),
        ));
    }
    if !(rhobeg > 0.0) || !(rhoend > 0.0) || rhoend > rhobeg {
        return Err(Error::InvalidInput(format!(
            "trust-region radii must satisfy 0 < rhoend <= rhobeg, got {rhobeg} / {rhoend}"
        )));
    }

    // COBYLA's `args` payload is cloned internally, so mutable state (the
    // user closure and the evaluation log) lives in the environment instead.
    let shared = RefCell::new((objective, Vec::<(Vec<f64>, f64)>::new()));
    let wrapped = |x: &[f64], _: &mut ()| -> f64 {
        let mut guard = shared.borrow_mut();
        let (obj, log) = &mut *guard;
        let value = obj(x);
        log.push((x.to_vec(), value));
        value
    };

    let bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); x0.len()];
    let cons: Vec<&dyn Func<()>> = Vec::new();
    let stop = StopTols {
        xtol_abs: vec![rhoend; x0.len()],
        ..StopTols::default()
    };
    let status = match minimize(
        wrapped,
        x0,
        &bounds,
        &cons,
        (),
        max_evaluations,
        RhoBeg::All(rhobeg),
        Some(stop),
    ) {
        Ok((status, _, _)) => status,
        Err((status, x, value)) => {
            return Err(Error::InvalidInput(format!(
                "optimizer failed with {status:?} at f({x:?}) = {value}"
            )))
        }
    };

    let (_, evaluations) = shared.into_inner();
    if evaluations.is_empty() {
        return Err(Error::InvalidInput(
            "optimizer returned without evaluating the objective".into(),
        ));
    }
    Ok(MinimizeOutcome {
        evaluations,
        converged: !matches!(status, SuccessStatus::MaxEvalReached),
    })
}
