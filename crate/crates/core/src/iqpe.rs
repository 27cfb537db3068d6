//! Iterative quantum phase estimation with a single recycled ancilla.
//!
//! Bits of the phase are read least significant first: the round with
//! controlled evolution for time `t * 2^(k-1)` extracts bit `k` of the
//! binary fraction `phi = 0.b1 b2 ... bm`, with a feedback phase on the
//! ancilla canceling the bits already measured. The evolution itself runs
//! through a cached sector eigenbasis, so the only approximations in the
//! whole procedure are the finite bit count and (optionally) shot noise on
//! the ancilla readout.

use crate::simstate::{
    apply_hadamard, apply_phase, attach_ancilla, controlled_evolve, sample_ones, EvolutionCache,
    Statevector,
};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::TAU;

/// Hard cap on requested bits: `2^(k-1)` must stay exactly representable.
pub const MAX_BITS: usize = 52;

/// Affine map between energies and phase fractions in (0, 1).
///
/// The reference shift `e_ref` sits a safety margin below the smallest
/// expected energy so no phase aliases to 0, and `time` compresses the span
/// below a full turn when it would otherwise wrap.
#[derive(Debug, Clone, Copy)]
pub struct PhaseWindow {
    /// Energy mapped to phase fraction zero.
    pub e_ref: f64,
    /// Evolution time per unit power; phase = (E - e_ref) * time / 2 pi.
    pub time: f64,
    /// Smallest energy the window was built for.
    pub e_min: f64,
    /// Largest energy the window was built for.
    pub e_max: f64,
    /// Safety margin between `e_min` and `e_ref`.
    pub margin: f64,
}

/// Builds the standard window for energies in `[e_min, e_max]`: margin
/// `max(5% of the span, 0.1)`, unit time when the shifted span fits inside
/// one turn, otherwise time compressed to `2 pi - 0.1` over the reach.
pub fn build_phase_window(e_min: f64, e_max: f64) -> Result<PhaseWindow> {
    if !e_min.is_finite() || !e_max.is_finite() {
        return Err(Error::InvalidInput(
            "phase window bounds must be finite".into(),
        ));
    }
    if e_min > e_max {
        return Err(Error::InvalidInput(format!(
            "phase window needs e_min <= e_max, got {e_min} > {e_max}"
        )));
    }
    let span = e_max - e_min;
    let margin = (0.05 * span).max(0.1);
    let e_ref = e_min - margin;
    let reach = e_max - e_ref;
    let time = if reach < TAU { 1.0 } else { (TAU - 0.1) / reach };
    Ok(PhaseWindow {
        e_ref,
        time,
        e_min,
        e_max,
        margin,
    })
}

impl PhaseWindow {
    /// Phase fraction an eigenvalue `e` maps to.
    pub fn phase_fraction(&self, e: f64) -> f64 {
        (e - self.e_ref) * self.time / TAU
    }

    /// Energy a phase fraction maps back to.
    pub fn phase_to_energy(&self, fraction: f64) -> f64 {
        self.e_ref + TAU * fraction / self.time
    }

    /// Energy distance corresponding to one unit in the last of `n_bits`.
    pub fn energy_resolution(&self, n_bits: usize) -> f64 {
        TAU * 2f64.powi(-(n_bits as i32)) / self.time
    }
}

/// How each ancilla readout is turned into a bit.
#[derive(Debug, Clone, Copy)]
pub enum BitMode {
    /// Threshold the exact probability: bit = 1 when `p1 >= 1/2`.
    Deterministic,
    /// Draw `shots` Bernoulli samples and take the majority (ties round
    /// to 1, matching the deterministic threshold).
    Sampled { shots: usize },
}

/// One measurement round.
#[derive(Debug, Clone)]
pub struct BitRound {
    /// Bit significance: 1 is the most significant bit of the fraction.
    pub k: usize,
    /// Feedback phase applied to the ancilla before the final Hadamard.
    pub feedback: f64,
    /// Exact ancilla-1 probability before thresholding or sampling.
    pub p_one: f64,
    /// Number of 1 outcomes in sampled mode.
    pub ones: Option<usize>,
    /// The extracted bit.
    pub bit: u8,
}

/// Result of one full phase-estimation run.
#[derive(Debug, Clone)]
pub struct IqpeOutcome {
    /// Rounds in measurement order (least significant bit first).
    pub rounds: Vec<BitRound>,
    /// Bits of the fraction, most significant first: `bits[0]` is b1.
    pub bits: Vec<u8>,
    /// Estimated phase fraction `sum_k bits[k-1] 2^-k`.
    pub phase: f64,
    /// Estimated energy through the window map.
    pub energy: f64,
}

/// Runs `n_bits` rounds of iterative phase estimation on `init` (a state on
/// the cached system register; the ancilla is attached fresh every round).
pub fn run_iqpe<R: Rng>(
    cache: &EvolutionCache,
    window: &PhaseWindow,
    init: &Statevector,
    n_bits: usize,
    mode: BitMode,
    rng: &mut R,
) -> Result<IqpeOutcome> {
    if n_bits == 0 || n_bits > MAX_BITS {
        return Err(Error::InvalidInput(format!(
            "bit count must be in 1..={MAX_BITS}, got {n_bits}"
        )));
    }
    if init.n_qubits != cache.n_system {
        return Err(Error::InvalidInput(format!(
            "initial state has {} qubits, cache system has {}",
            init.n_qubits, cache.n_system
        )));
    }
    if let BitMode::Sampled { shots } = mode {
        if shots == 0 {
            return Err(Error::InvalidInput(
                "sampled readout needs at least one shot".into(),
            ));
        }
    }
    if !(window.time > 0.0) {
        return Err(Error::InvalidInput(
            "phase window time must be positive".into(),
        ));
    }

    let ancilla = cache.n_system;
    let mut bits = vec![0u8; n_bits];
    let mut rounds = Vec::with_capacity(n_bits);

    for k in (1..=n_bits).rev() {
        // Feedback cancels the binary tail already measured below bit k.
        let mut feedback = 0.0;
        for j in (k + 1)..=n_bits {
            if bits[j - 1] == 1 {
                feedback -= TAU * 2f64.powi(k as i32 - 1 - j as i32);
            }
        }

        let mut joint = attach_ancilla(init);
        apply_hadamard(&mut joint, ancilla)?;
        controlled_evolve(
            &mut joint,
            cache,
            window.time * 2f64.powi(k as i32 - 1),
            window.e_ref,
        )?;
        apply_phase(&mut joint, ancilla, feedback)?;
        apply_hadamard(&mut joint, ancilla)?;

        let p_one = joint.probability_of_one(ancilla);
        let (bit, ones) = match mode {
            BitMode::Deterministic => (u8::from(p_one >= 0.5), None),
            BitMode::Sampled { shots } => {
                let ones = sample_ones(p_one, shots, rng);
                (u8::from(2 * ones >= shots), Some(ones))
            }
        };
        bits[k - 1] = bit;
        rounds.push(BitRound {
            k,
            feedback,
            p_one,
            ones,
            bit,
        });
    }

    let phase: f64 = bits
        .iter()
        .enumerate()
        .map(|(j, &b)| f64::from(b) * 2f64.powi(-(j as i32) - 1))
        .sum();
    Ok(IqpeOutcome {
        rounds,
        bits,
        phase,
        energy: window.phase_to_energy(phase),
    })
}

/// Energies from independently seeded repetitions of a sampled run.
#[derive(Debug, Clone, Serialize)]
pub struct ShotStatistics {
    /// One estimated energy per repetition.
    pub energies: Vec<f64>,
    /// The per-repetition generator seeds, drawn from the master seed.
    pub seeds: Vec<u64>,
    /// Shots per bit round.
    pub shots: usize,
    /// Bits per repetition.
    pub n_bits: usize,
}

/// Repeats a sampled run `repetitions` times. Each repetition gets its own
/// generator seeded from a master stream, so any single repetition can be
/// replayed in isolation.
pub fn repeat_experiment(
    cache: &EvolutionCache,
    window: &PhaseWindow,
    init: &Statevector,
    n_bits: usize,
    shots: usize,
    repetitions: usize,
    master_seed: u64,
) -> Result<ShotStatistics> {
    if repetitions == 0 {
        return Err(Error::InvalidInput(
            "need at least one repetition".into(),
        ));
    }
    let mut master = ChaCha8Rng::seed_from_u64(master_seed);
    let seeds: Vec<u64> = (0..repetitions).map(|_| master.gen()).collect();
    let mut energies = Vec::with_capacity(repetitions);
    for &seed in &seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let outcome = run_iqpe(
            cache,
            window,
            init,
            n_bits,
            BitMode::Sampled { shots },
            &mut rng,
        )?;
        energies.push(outcome.energy);
    }
    Ok(ShotStatistics {
        energies,
        seeds,
        shots,
        n_bits,
    })
}
