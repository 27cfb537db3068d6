//! Exact diagonalization (full CI) in a particle-number / spin-projection
//! sector, state labeling by reference overlap, and an independent
//! determinant-basis construction of the Hamiltonian used to cross-check the
//! qubit pipeline.

use crate::linalg::jacobi_eigh;
use crate::qham::PauliSum;
use crate::scf::SpinOrbitalIntegrals;
use crate::simstate::{build_evolution_cache, sector_basis, Statevector};
use crate::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;
use std::io;

/// Default reference-weight threshold for labeling eigenstates.
pub const DEFAULT_REFERENCE_WEIGHT_THRESHOLD: f64 = 0.0025;

/// Full-CI solution of one symmetry sector: all eigenvalues ascending and
/// the real eigenvector matrix over the sector determinants.
#[derive(Debug, Clone)]
pub struct FciSolution {
    pub n_qubits: usize,
    /// Determinant basis indices (ascending).
    pub determinants: Vec<u64>,
    /// Eigenvalues, ascending (hartree).
    pub energies: Vec<f64>,
    /// Column `k` is eigenvector `k`, gauged so its largest-magnitude
    /// component is positive.
    pub coefficients: Array2<f64>,
}

impl FciSolution {
    pub fn dimension(&self) -> usize {
        self.determinants.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Position of a determinant in the sector basis.
    pub fn determinant_position(&self, det: u64) -> Option<usize> {
        self.determinants.binary_search(&det).ok()
    }

    /// CI coefficient of `det` in eigenstate `k`.
    pub fn coefficient(&self, k: usize, det: u64) -> f64 {
        match self.determinant_position(det) {
            Some(row) => self.coefficients[[row, k]],
            None => 0.0,
        }
    }

    /// Embeds eigenstate `k` into a full statevector.
    pub fn state(&self, k: usize) -> Statevector {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << self.n_qubits];
        for (row, &det) in self.determinants.iter().enumerate() {
            amplitudes[det as usize] = Complex64::new(self.coefficients[[row, k]], 0.0);
        }
        Statevector::from_amplitudes(self.n_qubits, amplitudes)
            .expect("dimension fixed by construction")
    }
}

/// Diagonalizes the qubit Hamiltonian exactly in the requested sector.
pub fn fci_solve(h: &PauliSum, n_particles: u32, two_sz: i32) -> Result<FciSolution> {
    let cache = build_evolution_cache(h, n_particles, two_sz)?;
    Ok(FciSolution {
        n_qubits: cache.n_system,
        determinants: cache.sector_states,
        energies: cache.eigenvalues,
        coefficients: cache.eigenvectors,
    })
}

/// One labeled eigenstate: its position in the ascending spectrum, its
/// energy, and its squared overlap with the reference determinant.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LabeledState {
    pub index: usize,
    pub energy: f64,
    pub reference_weight: f64,
}

/// The ground state plus the reference-visible excited states, in ascending
/// energy order.
#[derive(Debug, Clone, Serialize)]
pub struct StateLabels {
    pub ground: LabeledState,
    pub excited: Vec<LabeledState>,
}

/// Labels the ground state and the first `n_excited` excited eigenstates
/// whose squared reference overlap reaches `threshold`. Errors with
/// `MissingLabel` when the spectrum runs out before all labels are placed,
/// or when the ground state itself falls below the threshold.
pub fn identify_states(
    sol: &FciSolution,
    reference: &Statevector,
    n_excited: usize,
    threshold: f64,
) -> Result<StateLabels> {
    let weights = reference_weights(sol, reference);
    if weights[0] < threshold {
        return Err(Error::MissingLabel(format!(
            "ground state carries reference weight {:.2e} < {threshold:.2e}",
            weights[0]
        )));
    }
    let ground = LabeledState {
        index: 0,
        energy: sol.energies[0],
        reference_weight: weights[0],
    };
    let mut excited = Vec::with_capacity(n_excited);
    for k in 1..sol.dimension() {
        if excited.len() == n_excited {
            break;
        }
        if weights[k] >= threshold {
            excited.push(LabeledState {
                index: k,
                energy: sol.energies[k],
                reference_weight: weights[k],
            });
        }
    }
    if excited.len() < n_excited {
        return Err(Error::MissingLabel(format!(
            "ES{} (only {} reference-visible excited states found)",
            excited.len() + 1,
            excited.len()
        )));
    }
    Ok(StateLabels { ground, excited })
}

/// Squared overlaps `|<reference|psi_k>|^2` for every eigenstate.
pub fn reference_weights(sol: &FciSolution, reference: &Statevector) -> Vec<f64> {
    (0..sol.dimension())
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (row, &det) in sol.determinants.iter().enumerate() {
                acc += reference.amplitudes()[det as usize].conj() * sol.coefficients[[row, k]];
            }
            acc.norm_sqr()
        })
        .collect()
}

/// One row of an overlap report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OverlapEntry {
    pub index: usize,
    pub energy: f64,
    pub weight: f64,
}

/// Full overlap spectrum of a reference state against the FCI eigenstates.
pub fn overlap_report(sol: &FciSolution, reference: &Statevector) -> Vec<OverlapEntry> {
    reference_weights(sol, reference)
        .into_iter()
        .enumerate()
        .map(|(index, weight)| OverlapEntry {
            index,
            energy: sol.energies[index],
            weight,
        })
        .collect()
}

/// Writes an overlap report as CSV (`index,energy,weight`).
pub fn write_overlap_csv<W: io::Write>(entries: &[OverlapEntry], w: &mut W) -> io::Result<()> {
    writeln!(w, "index,energy,weight")?;
    for e in entries {
        writeln!(w, "{},{:.12},{:.12}", e.index, e.energy, e.weight)?;
    }
    Ok(())
}

fn sector_broken() -> Error {
    Error::InvalidInput("integrals move determinants out of the requested sector".into())
}

/// Applies `a_p` to determinant `b` with the fermionic sign
/// `(-1)^(occupied below p)`.
fn annihilate(b: u64, p: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << p;
    if b & bit == 0 {
        return None;
    }
    let sign = if (b & (bit - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    Some((b & !bit, sign))
}

/// Applies `a_p^dagger` to determinant `b`.
fn create(b: u64, p: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << p;
    if b & bit != 0 {
        return None;
    }
    let sign = if (b & (bit - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    Some((b | bit, sign))
}

/// Builds the sector Hamiltonian directly in the determinant basis by
/// second-quantized application of
/// `H = E_nuc + sum h_pq a_p^dag a_q + 1/4 sum <pq||rs> a_p^dag a_q^dag a_s a_r`.
///
/// No Pauli algebra is involved, which makes this an independent cross-check
/// of the Jordan-Wigner pipeline: both must be isospectral.
pub fn determinant_hamiltonian(
    so: &SpinOrbitalIntegrals,
    n_particles: u32,
    two_sz: i32,
) -> Result<(Vec<u64>, Array2<f64>)> {
    let m = so.n_spin_orbitals;
    let dets = sector_basis(m, n_particles, two_sz);
    if dets.is_empty() {
        return Err(Error::InvalidInput(format!(
            "empty sector: N={n_particles}, 2Sz={two_sz} on {m} spin orbitals"
        )));
    }
    let position: std::collections::HashMap<u64, usize> =
        dets.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let dim = dets.len();
    let mut matrix = Array2::<f64>::zeros((dim, dim));
    for (col, &b) in dets.iter().enumerate() {
        matrix[[col, col]] += so.e_nuc;
        for p in 0..m {
            for q in 0..m {
                let hpq = so.h1[[p, q]];
                if hpq == 0.0 {
                    continue;
                }
                if let Some((b1, s1)) = annihilate(b, q) {
                    if let Some((b2, s2)) = create(b1, p) {
                        let row = *position.get(&b2).ok_or_else(sector_broken)?;
                        matrix[[row, col]] += hpq * s1 * s2;
                    }
                }
            }
        }
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    for s in 0..m {
                        let v = so.antisymmetrized[[p, q, r, s]];
                        if v == 0.0 {
                            continue;
                        }
                        if let Some((b1, s1)) = annihilate(b, r) {
                            if let Some((b2, s2)) = annihilate(b1, s) {
                                if let Some((b3, s3)) = create(b2, q) {
                                    if let Some((b4, s4)) = create(b3, p) {
                                        let row = *position.get(&b4).ok_or_else(sector_broken)?;
                                        matrix[[row, col]] += 0.25 * v * s1 * s2 * s3 * s4;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((dets, matrix))
}

/// Eigenvalues (ascending) of the determinant-basis sector Hamiltonian.
pub fn determinant_spectrum(
    so: &SpinOrbitalIntegrals,
    n_particles: u32,
    two_sz: i32,
) -> Result<Vec<f64>> {
    let (_, matrix) = determinant_hamiltonian(so, n_particles, two_sz)?;
    let max_asym = {
        let dim = matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max((matrix[[i, j]] - matrix[[j, i]]).abs());
            }
        }
        worst
    };
    if max_asym > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "determinant Hamiltonian asymmetry {max_asym:.3e}"
        )));
    }
    let sym = 0.5 * (&matrix + &matrix.t());
    Ok(jacobi_eigh(&sym).values)
}
