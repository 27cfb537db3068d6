//! UCCD excitation pools and Trotter-1 state-preparation circuits.
//!
//! Two pool flavors exist: the full UCCD doubles pool (18 operators for
//! H4/STO-3G) and the minimally parametrized active-space pool (a single
//! operator exciting the alpha/beta HOMO pair into the LUMO pair). Singles
//! are deliberately absent: none with the ground state's symmetry exist for
//! this system.

use crate::qham::{map_excitation, pauli_strings_commute, PauliString};
use crate::scf::AmplitudeVector;
use crate::simstate::{apply_exp_pauli, Statevector};
use crate::{Error, Result};
use std::fmt;
use std::io;

/// Which excitation pool a structure was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolFlavor {
    /// All S_z-conserving doubles from the HF-occupied into the virtual
    /// spin orbitals, deduplicated under index antisymmetry.
    FullUccd,
    /// The single active-space double (HOMO pair to LUMO pair).
    Minimal,
}

/// A double excitation: annihilate spin orbitals `(i, j)`, create `(a, b)`.
///
/// Indices are 0-based block-spin spin orbitals (alpha first); both pairs are
/// stored ascending, which fixes the antisymmetry-deduplication convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Excitation {
    pub annihilate: (usize, usize),
    pub create: (usize, usize),
}

impl Excitation {
    fn new(i: usize, j: usize, a: usize, b: usize) -> Self {
        debug_assert!(i < j && a < b);
        Excitation {
            annihilate: (i, j),
            create: (a, b),
        }
    }

    fn alpha_count(pair: (usize, usize), n_spatial: usize) -> usize {
        [pair.0, pair.1].iter().filter(|&&p| p < n_spatial).count()
    }

    /// True when the excitation preserves S_z, i.e. annihilates as many
    /// alpha spin orbitals as it creates.
    pub fn conserves_sz(&self, n_spatial: usize) -> bool {
        Self::alpha_count(self.annihilate, n_spatial) == Self::alpha_count(self.create, n_spatial)
    }

    /// Two-letter spin tag: "aa", "bb", or "ab".
    pub fn spin_tag(&self, n_spatial: usize) -> &'static str {
        match Self::alpha_count(self.annihilate, n_spatial) {
            2 => "aa",
            0 => "bb",
            _ => "ab",
        }
    }
}

impl fmt::Display for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{}->{},{}",
            self.annihilate.0, self.annihilate.1, self.create.0, self.create.1
        )
    }
}

/// An ordered list of double excitations; the order is the parameter order.
#[derive(Debug, Clone)]
pub struct ExcitationPool {
    pub flavor: PoolFlavor,
    pub n_spatial: usize,
    pub n_electrons: usize,
    pub excitations: Vec<Excitation>,
}

impl ExcitationPool {
    pub fn len(&self) -> usize {
        self.excitations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excitations.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_spatial
    }

    /// The closed-shell reference determinant this pool excites out of.
    pub fn reference_state(&self) -> Statevector {
        let nocc = self.n_electrons / 2;
        let mut index = 0usize;
        for k in 0..nocc {
            index |= 1 << k;
            index |= 1 << (self.n_spatial + k);
        }
        let mut amplitudes = vec![num_complex::Complex64::new(0.0, 0.0); 1 << self.n_qubits()];
        amplitudes[index] = num_complex::Complex64::new(1.0, 0.0);
        Statevector::from_amplitudes(self.n_qubits(), amplitudes)
            .expect("dimension fixed by construction")
    }
}

/// Builds the full UCCD doubles pool: every S_z-conserving double from the
/// HF-occupied spin orbitals into the virtuals, each stored once with both
/// index pairs ascending, listed in canonical ascending order.
///
/// For H4/STO-3G (`n_spatial = 4`, `n_electrons = 4`) the pool has exactly
/// 18 entries; spin-complement pairs are kept as independent parameters.
pub fn build_uccd_pool(n_spatial: usize, n_electrons: usize) -> Result<ExcitationPool> {
    if n_electrons % 2 != 0 || n_electrons == 0 || n_electrons / 2 >= n_spatial {
        return Err(Error::InvalidInput(format!(
            "unsupported closed-shell sizes: {n_spatial} spatial orbitals, {n_electrons} electrons"
        )));
    }
    let nocc = n_electrons / 2;
    let occupied: Vec<usize> = (0..nocc).chain(n_spatial..n_spatial + nocc).collect();
    let virtuals: Vec<usize> = (nocc..n_spatial)
        .chain(n_spatial + nocc..2 * n_spatial)
        .collect();
    let mut excitations = Vec::new();
    for (ii, &i) in occupied.iter().enumerate() {
        for &j in &occupied[ii + 1..] {
            for (aa, &a) in virtuals.iter().enumerate() {
                for &b in &virtuals[aa + 1..] {
                    let exc = Excitation::new(i, j, a, b);
                    if exc.conserves_sz(n_spatial) {
                        excitations.push(exc);
                    }
                }
            }
        }
    }
    excitations.sort();
    Ok(ExcitationPool {
        flavor: PoolFlavor::FullUccd,
        n_spatial,
        n_electrons,
        excitations,
    })
}

/// Builds the single-operator active-space pool. The default active space for
/// H4 annihilates spin orbitals {1, 5} and creates {2, 6} (the alpha and beta
/// HOMO electrons moved to the LUMOs).
pub fn build_minimal_pool(
    active_occupied: (usize, usize),
    active_virtual: (usize, usize),
) -> Result<ExcitationPool> {
    let n_spatial = 4;
    let (i, j) = if active_occupied.0 < active_occupied.1 {
        active_occupied
    } else {
        (active_occupied.1, active_occupied.0)
    };
    let (a, b) = if active_virtual.0 < active_virtual.1 {
        active_virtual
    } else {
        (active_virtual.1, active_virtual.0)
    };
    for &p in &[i, j, a, b] {
        if p >= 2 * n_spatial {
            return Err(Error::InvalidInput(format!(
                "active spin orbital {p} out of range"
            )));
        }
    }
    if i == j || a == b {
        return Err(Error::InvalidInput(
            "active pairs must contain distinct spin orbitals".into(),
        ));
    }
    let exc = Excitation::new(i, j, a, b);
    if !exc.conserves_sz(n_spatial) {
        return Err(Error::InvalidInput(format!(
            "active excitation {exc} does not conserve S_z"
        )));
    }
    Ok(ExcitationPool {
        flavor: PoolFlavor::Minimal,
        n_spatial,
        n_electrons: 4,
        excitations: vec![exc],
    })
}

/// One exponentiated generator of the ansatz circuit.
#[derive(Debug, Clone)]
pub struct GeneratorFactor {
    /// Index into the parameter vector.
    pub parameter_slot: usize,
    /// Jordan-Wigner image of `T - T^dagger` as pairs `(P, g)` meaning the
    /// term `i * g * P` (the generator is anti-Hermitian, so all
    /// coefficients are purely imaginary; `g` is the imaginary part).
    pub terms: Vec<(PauliString, f64)>,
    /// Whether all Pauli terms of this generator mutually commute. When they
    /// do (always the case for these doubles), the per-term product of
    /// exponentials equals the exact exponential of the full generator.
    pub terms_commute: bool,
}

/// A synthesized state-preparation circuit: exponentials of the pool
/// generators in canonical pool order, repeated `trotter_steps` times with
/// angles divided accordingly.
#[derive(Debug, Clone)]
pub struct PreparedCircuit {
    pub n_qubits: usize,
    pub trotter_steps: usize,
    pub generators: Vec<GeneratorFactor>,
}

impl PreparedCircuit {
    /// Builds the circuit for a pool. Performs the build-time commutation
    /// check on every generator; a non-commuting generator is still applied
    /// as a per-term product (first-order factorization), which
    /// `trotter_steps` then refines.
    pub fn new(pool: &ExcitationPool, trotter_steps: usize) -> Result<Self> {
        if trotter_steps == 0 {
            return Err(Error::InvalidInput("trotter_steps must be >= 1".into()));
        }
        let n_qubits = 2 * pool.n_spatial;
        let mut generators = Vec::with_capacity(pool.len());
        for (slot, exc) in pool.excitations.iter().enumerate() {
            let image = map_excitation(exc, n_qubits)?;
            let mut terms = Vec::with_capacity(image.len());
            for (p, c) in image {
                debug_assert!(c.re.abs() < 1e-14, "generator must be anti-Hermitian");
                terms.push((p, c.im));
            }
            let mut commute = true;
            'outer: for x in 0..terms.len() {
                for y in (x + 1)..terms.len() {
                    if !pauli_strings_commute(&terms[x].0, &terms[y].0) {
                        commute = false;
                        break 'outer;
                    }
                }
            }
            generators.push(GeneratorFactor {
                parameter_slot: slot,
                terms,
                terms_commute: commute,
            });
        }
        Ok(PreparedCircuit {
            n_qubits,
            trotter_steps,
            generators,
        })
    }

    /// Applies the circuit to `reference` with the given parameters.
    pub fn apply(&self, theta: &[f64], reference: &Statevector) -> Result<Statevector> {
        if theta.len() != self.generators.len() {
            return Err(Error::InvalidInput(format!(
                "{} parameters supplied for {} generators",
                theta.len(),
                self.generators.len()
            )));
        }
        if reference.n_qubits != self.n_qubits {
            return Err(Error::InvalidInput(format!(
                "reference state has {} qubits, circuit needs {}",
                reference.n_qubits, self.n_qubits
            )));
        }
        let mut state = reference.clone();
        let scale = 1.0 / self.trotter_steps as f64;
        for _ in 0..self.trotter_steps {
            for gen in &self.generators {
                let th = theta[gen.parameter_slot] * scale;
                if th == 0.0 {
                    continue;
                }
                for (p, g) in &gen.terms {
                    // exp(i * th * g * P) = exp(-i * (-2 th g) / 2 * P)
                    apply_exp_pauli(&mut state, p, -2.0 * th * g)?;
                }
            }
        }
        Ok(state)
    }
}

/// Synthesizes the circuit and applies it in one call: the prepared state
/// `prod_k exp(theta_k (T_k - T_k^dagger))` acting on `hf`.
pub fn prepare_state(
    pool: &ExcitationPool,
    theta: &AmplitudeVector,
    hf: &Statevector,
    trotter_steps: usize,
) -> Result<Statevector> {
    if theta.values.len() != pool.len() {
        return Err(Error::InvalidInput(format!(
            "amplitude vector length {} does not match pool size {}",
            theta.values.len(),
            pool.len()
        )));
    }
    PreparedCircuit::new(pool, trotter_steps)?.apply(&theta.values, hf)
}

/// Writes the pool as text: one line per operator with parameter slot,
/// indices, and spin tag.
pub fn dump_pool<W: io::Write>(pool: &ExcitationPool, w: &mut W) -> io::Result<()> {
    writeln!(
        w,
        "# pool flavor = {} ({} operators)",
        match pool.flavor {
            PoolFlavor::FullUccd => "full-uccd",
            PoolFlavor::Minimal => "minimal",
        },
        pool.len()
    )?;
    for (slot, exc) in pool.excitations.iter().enumerate() {
        writeln!(w, "slot {:2}  {}  {}", slot, exc, exc.spin_tag(pool.n_spatial))?;
    }
    Ok(())
}
