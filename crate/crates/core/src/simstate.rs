//! Dense statevector simulation: basis states, Pauli rotations, expectation
//! values, and cached controlled time evolution in a symmetry sector.
//!
//! Basis indices are little-endian in the qubit index; printed bitstrings
//! put the highest qubit leftmost. The ancilla used by controlled evolution
//! is always the highest qubit of the joint register.

use crate::linalg::jacobi_eigh;
use crate::qham::{PauliString, PauliSum};
use crate::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use std::collections::HashMap;

/// A pure state on `n_qubits` qubits as a dense amplitude vector.
#[derive(Debug, Clone)]
pub struct Statevector {
    pub n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// The all-zeros computational basis state.
    pub fn new_zero_state(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Statevector {
            n_qubits,
            amplitudes,
        }
    }

    /// Wraps an amplitude vector (must have length `2^n_qubits`).
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::InvalidInput(format!(
                "{} amplitudes supplied for {} qubits",
                amplitudes.len(),
                n_qubits
            )));
        }
        Ok(Statevector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Errors with the offending norm when the state has drifted off the
    /// unit sphere by more than 1e-8.
    pub fn assert_normalized(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > 1e-8 {
            return Err(Error::StateCorrupt(n));
        }
        Ok(())
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability of measuring `qubit` as 1.
    pub fn probability_of_one(&self, qubit: usize) -> f64 {
        let mask = 1usize << qubit;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// Builds a computational basis state from a bitstring with the highest
/// qubit leftmost, e.g. `basis_state(8, "00110011")` sets index 0b00110011.
pub fn basis_state(n_qubits: usize, bits: &str) -> Result<Statevector> {
    if bits.len() != n_qubits {
        return Err(Error::InvalidInput(format!(
            "bitstring '{bits}' does not describe {n_qubits} qubits"
        )));
    }
    let mut index = 0usize;
    for ch in bits.chars() {
        index <<= 1;
        match ch {
            '0' => {}
            '1' => index |= 1,
            other => {
                return Err(Error::InvalidInput(format!(
                    "invalid bit character '{other}'"
                )))
            }
        }
    }
    let mut state = Statevector::new_zero_state(n_qubits);
    state.amplitudes[0] = Complex64::new(0.0, 0.0);
    state.amplitudes[index] = Complex64::new(1.0, 0.0);
    Ok(state)
}

/// Renders a basis index as a bitstring, highest qubit leftmost.
pub fn index_to_bits(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .rev()
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Applies the rotation `exp(-i * angle / 2 * P)` in place. Exact (not
/// Trotterized): since `P^2 = I`, the rotation closes in each `(b, b^x)`
/// pair of basis states.
pub fn apply_exp_pauli(state: &mut Statevector, p: &PauliString, angle: f64) -> Result<()> {
    if state.n_qubits < 64 && (p.x_mask | p.z_mask) >> state.n_qubits != 0 {
        return Err(Error::InvalidInput(
            "Pauli string exceeds the register".into(),
        ));
    }
    let half = 0.5 * angle;
    let c = half.cos();
    let s = half.sin();
    if p.x_mask == 0 {
        // Diagonal string: each amplitude picks up exp(-i * half * (+/-1)).
        let plus = Complex64::new(c, -s);
        let minus = Complex64::new(c, s);
        for (idx, amp) in state.amplitudes.iter_mut().enumerate() {
            let parity = (p.z_mask & idx as u64).count_ones() % 2;
            *amp *= if parity == 0 { plus } else { minus };
        }
        return Ok(());
    }
    let x = p.x_mask as usize;
    let mi = Complex64::new(0.0, -1.0);
    for u in 0..state.amplitudes.len() {
        let v = u ^ x;
        if v < u {
            continue; // visit each pair once
        }
        let (_, ph_v) = p.apply_to_basis(v as u64); // P|v> lands on u
        let (_, ph_u) = p.apply_to_basis(u as u64); // P|u> lands on v
        let au = state.amplitudes[u];
        let av = state.amplitudes[v];
        state.amplitudes[u] = c * au + mi * s * ph_v * av;
        state.amplitudes[v] = c * av + mi * s * ph_u * au;
    }
    Ok(())
}

/// Expectation value `<psi|P|psi>` of a single Pauli string (always real;
/// Pauli strings are Hermitian in this convention).
pub fn pauli_term_expectation(state: &Statevector, p: &PauliString) -> Complex64 {
    let mut term = Complex64::new(0.0, 0.0);
    for (b, amp) in state.amplitudes.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let (img, phase) = p.apply_to_basis(b as u64);
        term += state.amplitudes[img as usize].conj() * phase * amp;
    }
    term
}

/// Expectation value `<psi| sum |psi>` (real up to roundoff for Hermitian
/// sums; the full complex value is returned).
pub fn expectation(state: &Statevector, sum: &PauliSum) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, coeff) in sum.terms() {
        acc += coeff * pauli_term_expectation(state, p);
    }
    acc
}

/// Enumerates the basis indices with `n_particles` set bits and spin
/// projection `two_sz = n_alpha - n_beta` (block-spin register split).
pub(crate) fn sector_basis(n_qubits: usize, n_particles: u32, two_sz: i32) -> Vec<u64> {
    let half = n_qubits / 2;
    let alpha_mask: u64 = (1 << half) - 1;
    (0..1u64 << n_qubits)
        .filter(|&b| {
            let na = (b & alpha_mask).count_ones() as i32;
            let nb = (b >> half).count_ones() as i32;
            (na + nb) as u32 == n_particles && na - nb == two_sz
        })
        .collect()
}

/// Builds the dense, real-symmetric matrix of `h` restricted to the listed
/// basis states. Errors when `h` maps the sector outside itself.
///
/// Individual Pauli strings of a particle-conserving operator do not
/// conserve particle number on their own; out-of-sector amplitudes cancel
/// only in the sum over strings. Images are therefore accumulated across all
/// terms per source state before any leakage is judged.
pub(crate) fn dense_sector_matrix(h: &PauliSum, states: &[u64]) -> Result<Array2<f64>> {
    let dim = states.len();
    let position: HashMap<u64, usize> = states.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut matrix = Array2::<f64>::zeros((dim, dim));
    let mut column: HashMap<u64, Complex64> = HashMap::new();
    for (col, &b) in states.iter().enumerate() {
        column.clear();
        for (p, coeff) in h.terms() {
            let (img, phase) = p.apply_to_basis(b);
            *column.entry(img).or_insert(Complex64::new(0.0, 0.0)) += coeff * phase;
        }
        for (&img, &value) in &column {
            match position.get(&img) {
                Some(&row) => {
                    if value.im.abs() > 1e-10 {
                        return Err(Error::InvalidInput(format!(
                            "sector matrix element ({row},{col}) is complex: {value}"
                        )));
                    }
                    matrix[[row, col]] = value.re;
                }
                None => {
                    if value.norm() > 1e-10 {
                        return Err(Error::InvalidInput(
                            "operator does not preserve the requested sector".into(),
                        ));
                    }
                }
            }
        }
    }
    // Enforce exact symmetry before the eigensolve.
    let max_asym = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .map(|(i, j)| (matrix[[i, j]] - matrix[[j, i]]).abs())
        .fold(0.0, f64::max);
    if max_asym > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "sector matrix asymmetry {max_asym:.3e}"
        )));
    }
    let sym = 0.5 * (&matrix + &matrix.t());
    Ok(sym)
}

/// Exact eigendecomposition of a Hamiltonian restricted to one
/// (particle-number, spin-projection) sector, reused for controlled time
/// evolution and as the FCI solver backend.
#[derive(Debug, Clone)]
pub struct EvolutionCache {
    /// Qubits of the system register (the ancilla is not included).
    pub n_system: usize,
    /// Basis indices spanning the sector, ascending.
    pub sector_states: Vec<u64>,
    /// Sector eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the k-th eigenvector in the sector basis, gauged so its
    /// largest-magnitude component is positive.
    pub eigenvectors: Array2<f64>,
    position: HashMap<u64, usize>,
}

impl EvolutionCache {
    /// Assembles a cache from an explicit eigendecomposition.
    ///
    /// Useful for driving the controlled-evolution machinery with synthetic
    /// spectra (e.g. exactly representable phases) without going through a
    /// Pauli-sum diagonalization. `eigenvectors` columns must be orthonormal
    /// in the span of `sector_states`; identity is the common choice.
    pub fn from_parts(
        n_system: usize,
        sector_states: Vec<u64>,
        eigenvalues: Vec<f64>,
        eigenvectors: Array2<f64>,
    ) -> Result<Self> {
        let d = sector_states.len();
        if d == 0 {
            return Err(Error::InvalidInput("empty sector".into()));
        }
        if eigenvalues.len() != d || eigenvectors.dim() != (d, d) {
            return Err(Error::InvalidInput(format!(
                "inconsistent sector dimensions: {} states, {} eigenvalues, {:?} matrix",
                d,
                eigenvalues.len(),
                eigenvectors.dim()
            )));
        }
        if sector_states.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "sector states must be strictly ascending".into(),
            ));
        }
        if sector_states.last().copied().unwrap_or(0) >= (1u64 << n_system) {
            return Err(Error::InvalidInput(
                "sector state outside the system register".into(),
            ));
        }
        let position = sector_states
            .iter()
            .enumerate()
            .map(|(row, &b)| (b, row))
            .collect();
        Ok(EvolutionCache {
            n_system,
            sector_states,
            eigenvalues,
            eigenvectors,
            position,
        })
    }

    /// Smallest and largest eigenvalue of the sector.
    pub fn eigenvalue_range(&self) -> (f64, f64) {
        (
            self.eigenvalues[0],
            *self.eigenvalues.last().expect("sector is nonempty"),
        )
    }

    /// Embeds eigenvector `k` into a full statevector on the system register.
    pub fn eigenstate(&self, k: usize) -> Statevector {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << self.n_system];
        for (row, &b) in self.sector_states.iter().enumerate() {
            amplitudes[b as usize] = Complex64::new(self.eigenvectors[[row, k]], 0.0);
        }
        Statevector {
            n_qubits: self.n_system,
            amplitudes,
        }
    }
}

/// Diagonalizes `h` in the `(n_particles, two_sz)` sector.
pub fn build_evolution_cache(
    h: &PauliSum,
    n_particles: u32,
    two_sz: i32,
) -> Result<EvolutionCache> {
    let n_system = h.n_qubits;
    let sector_states = sector_basis(n_system, n_particles, two_sz);
    if sector_states.is_empty() {
        return Err(Error::InvalidInput(format!(
            "empty sector: N={n_particles}, 2Sz={two_sz} on {n_system} qubits"
        )));
    }
    let matrix = dense_sector_matrix(h, &sector_states)?;
    let eig = jacobi_eigh(&matrix);
    let mut vectors = eig.vectors;
    // Sign gauge: largest-magnitude component of each column positive.
    let dim = sector_states.len();
    for k in 0..dim {
        let mut best = 0;
        for row in 1..dim {
            if vectors[[row, k]].abs() > vectors[[best, k]].abs() {
                best = row;
            }
        }
        if vectors[[best, k]] < 0.0 {
            for row in 0..dim {
                vectors[[row, k]] = -vectors[[row, k]];
            }
        }
    }
    let position = sector_states
        .iter()
        .enumerate()
        .map(|(i, &b)| (b, i))
        .collect();
    Ok(EvolutionCache {
        n_system,
        sector_states,
        eigenvalues: eig.values,
        eigenvectors: vectors,
        position,
    })
}

/// Appends an ancilla (the new highest qubit) in |0>, leaving the system
/// amplitudes in the lower half of the joint register.
pub fn attach_ancilla(system: &Statevector) -> Statevector {
    let mut amplitudes = system.amplitudes.clone();
    amplitudes.resize(2 * amplitudes.len(), Complex64::new(0.0, 0.0));
    Statevector {
        n_qubits: system.n_qubits + 1,
        amplitudes,
    }
}

/// Applies a Hadamard to one qubit.
pub fn apply_hadamard(state: &mut Statevector, qubit: usize) -> Result<()> {
    if qubit >= state.n_qubits {
        return Err(Error::InvalidInput(format!(
            "qubit {qubit} out of range for {} qubits",
            state.n_qubits
        )));
    }
    let mask = 1usize << qubit;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for u in 0..state.amplitudes.len() {
        if u & mask != 0 {
            continue;
        }
        let v = u | mask;
        let a0 = state.amplitudes[u];
        let a1 = state.amplitudes[v];
        state.amplitudes[u] = (a0 + a1) * inv_sqrt2;
        state.amplitudes[v] = (a0 - a1) * inv_sqrt2;
    }
    Ok(())
}

/// Applies the phase gate diag(1, e^{i phi}) to one qubit.
pub fn apply_phase(state: &mut Statevector, qubit: usize, phi: f64) -> Result<()> {
    if qubit >= state.n_qubits {
        return Err(Error::InvalidInput(format!(
            "qubit {qubit} out of range for {} qubits",
            state.n_qubits
        )));
    }
    let mask = 1usize << qubit;
    let factor = Complex64::from_polar(1.0, phi);
    for (idx, amp) in state.amplitudes.iter_mut().enumerate() {
        if idx & mask != 0 {
            *amp *= factor;
        }
    }
    Ok(())
}

/// Controlled evolution on a joint register whose highest qubit is the
/// ancilla: the ancilla-1 branch is multiplied by
/// `exp(+i (H - e_ref) * time)` through the cached eigenbasis; the
/// ancilla-0 branch is untouched (bit-exact). The ancilla-1 branch must lie
/// in the cached sector; norm-squared weight outside it beyond 1e-10 is a
/// `SectorLeak` error.
pub fn controlled_evolve(
    joint: &mut Statevector,
    cache: &EvolutionCache,
    time: f64,
    e_ref: f64,
) -> Result<()> {
    if joint.n_qubits != cache.n_system + 1 {
        return Err(Error::InvalidInput(format!(
            "joint register has {} qubits, cache needs {}",
            joint.n_qubits,
            cache.n_system + 1
        )));
    }
    let offset = 1usize << cache.n_system;
    let dim = cache.sector_states.len();

    let mut in_sector = 0.0;
    let mut total_one = 0.0;
    for b in 0..offset {
        let w = joint.amplitudes[offset + b].norm_sqr();
        total_one += w;
        if cache.position.contains_key(&(b as u64)) {
            in_sector += w;
        }
    }
    let leak = total_one - in_sector;
    if leak > 1e-10 {
        return Err(Error::SectorLeak(leak));
    }

    // Gather the ancilla-1 branch in the sector basis.
    let mut v_re = vec![0.0; dim];
    let mut v_im = vec![0.0; dim];
    for (row, &b) in cache.sector_states.iter().enumerate() {
        let a = joint.amplitudes[offset + b as usize];
        v_re[row] = a.re;
        v_im[row] = a.im;
    }
    // w = V^T v
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..dim {
        let mut re = 0.0;
        let mut im = 0.0;
        for row in 0..dim {
            let vk = cache.eigenvectors[[row, k]];
            re += vk * v_re[row];
            im += vk * v_im[row];
        }
        w[k] = Complex64::new(re, im);
    }
    // Phase rotation per eigenvalue, then back-transform v' = V w.
    for (k, wk) in w.iter_mut().enumerate() {
        *wk *= Complex64::from_polar(1.0, (cache.eigenvalues[k] - e_ref) * time);
    }
    for (row, &b) in cache.sector_states.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, wk) in w.iter().enumerate() {
            acc += cache.eigenvectors[[row, k]] * wk;
        }
        joint.amplitudes[offset + b as usize] = acc;
    }
    Ok(())
}

/// First-order Trotterized controlled evolution: the ancilla-1 branch is
/// multiplied by `prod_j exp(+i c_j P_j dt)` per slice (term order is the
/// canonical sum order) followed by the `e_ref` phase. Converges to
/// `controlled_evolve` as `n_slices` grows; useful as an independent check
/// of the cached eigenbasis path.
pub fn controlled_evolve_trotter(
    joint: &mut Statevector,
    h: &PauliSum,
    time: f64,
    e_ref: f64,
    n_slices: usize,
) -> Result<()> {
    if n_slices == 0 {
        return Err(Error::InvalidInput("n_slices must be >= 1".into()));
    }
    if joint.n_qubits != h.n_qubits + 1 {
        return Err(Error::InvalidInput(format!(
            "joint register has {} qubits, Hamiltonian needs {}",
            joint.n_qubits,
            h.n_qubits + 1
        )));
    }
    let ancilla_mask = 1usize << h.n_qubits;
    let dt = time / n_slices as f64;
    for _ in 0..n_slices {
        for (p, coeff) in h.terms() {
            // exp(+i c P dt) restricted to ancilla-1 indices.
            let angle = -2.0 * coeff.re * dt;
            apply_exp_pauli_controlled(joint, p, angle, ancilla_mask);
        }
    }
    let phase = Complex64::from_polar(1.0, -e_ref * time);
    for (idx, amp) in joint.amplitudes.iter_mut().enumerate() {
        if idx & ancilla_mask != 0 {
            *amp *= phase;
        }
    }
    Ok(())
}

/// `exp(-i angle/2 P)` applied only to basis states with the control bit set.
fn apply_exp_pauli_controlled(
    state: &mut Statevector,
    p: &PauliString,
    angle: f64,
    control_mask: usize,
) {
    let half = 0.5 * angle;
    let c = half.cos();
    let s = half.sin();
    if p.x_mask == 0 {
        let plus = Complex64::new(c, -s);
        let minus = Complex64::new(c, s);
        for (idx, amp) in state.amplitudes.iter_mut().enumerate() {
            if idx & control_mask == 0 {
                continue;
            }
            let parity = (p.z_mask & idx as u64).count_ones() % 2;
            *amp *= if parity == 0 { plus } else { minus };
        }
        return;
    }
    let x = p.x_mask as usize;
    let mi = Complex64::new(0.0, -1.0);
    for u in 0..state.amplitudes.len() {
        if u & control_mask == 0 {
            continue;
        }
        let v = u ^ x;
        if v < u {
            continue;
        }
        let (_, ph_v) = p.apply_to_basis(v as u64);
        let (_, ph_u) = p.apply_to_basis(u as u64);
        let au = state.amplitudes[u];
        let av = state.amplitudes[v];
        state.amplitudes[u] = c * au + mi * s * ph_v * av;
        state.amplitudes[v] = c * av + mi * s * ph_u * au;
    }
}

/// Draws `shots` Bernoulli samples with success probability `p_one` and
/// returns the number of ones.
pub fn sample_ones<R: Rng>(p_one: f64, shots: usize, rng: &mut R) -> usize {
    let p = p_one.clamp(0.0, 1.0);
    (0..shots).filter(|_| rng.gen::<f64>() < p).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molsys::{build_h4_geometry, compute_integrals, load_sto3g_hydrogen};
    use crate::qham::{jordan_wigner, number_operator, sz_operator};
    use crate::scf::{run_rhf, to_mo_basis, to_spin_orbitals, ScfResult};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Mix(u64);
    impl Mix {
        fn next(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }
        fn uniform(&mut self) -> f64 {
            (self.next() >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }
    }

    fn random_state(n_qubits: usize, rng: &mut Mix) -> Statevector {
        let mut amplitudes: Vec<Complex64> = (0..1 << n_qubits)
            .map(|_| Complex64::new(rng.uniform(), rng.uniform()))
            .collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        Statevector::from_amplitudes(n_qubits, amplitudes).unwrap()
    }

    fn h4_problem(beta: f64) -> (PauliSum, ScfResult) {
        let geom = build_h4_geometry(beta, 1.738).unwrap();
        let ints = compute_integrals(&geom, &load_sto3g_hydrogen()).unwrap();
        let scf = run_rhf(&ints, 4).unwrap();
        let h = jordan_wigner(&to_spin_orbitals(&to_mo_basis(&ints, &scf)));
        (h, scf)
    }

    #[test]
    fn basis_state_parses_bitstrings() {
        let hf = basis_state(8, "00110011").unwrap();
        assert_eq!(hf.amplitudes()[0b0011_0011], Complex64::new(1.0, 0.0));
        assert!((hf.norm() - 1.0).abs() < 1e-15);
        assert_eq!(index_to_bits(0b0011_0011, 8), "00110011");
        assert!(basis_state(8, "0011").is_err());
        assert!(basis_state(4, "01x1").is_err());
    }

    /// Oracle: exp(-i a/2 P) = cos(a/2) I - i sin(a/2) P, with P applied
    /// through the independent basis-action rule.
    #[test]
    fn exp_pauli_matches_closed_form() {
        let mut rng = Mix(11);
        for trial in 0..60 {
            let p = PauliString {
                x_mask: rng.next() & 0xf,
                z_mask: rng.next() & 0xf,
            };
            let angle = 3.0 * rng.uniform();
            let state = random_state(4, &mut rng);
            let mut rotated = state.clone();
            apply_exp_pauli(&mut rotated, &p, angle).unwrap();

            let c = (0.5 * angle).cos();
            let s = (0.5 * angle).sin();
            let mut expected = vec![Complex64::new(0.0, 0.0); 16];
            for (b, amp) in state.amplitudes().iter().enumerate() {
                expected[b] += c * amp;
                let (img, phase) = p.apply_to_basis(b as u64);
                expected[img as usize] += Complex64::new(0.0, -s) * phase * amp;
            }
            for (got, want) in rotated.amplitudes().iter().zip(&expected) {
                assert!((got - want).norm() < 1e-13, "trial {trial}");
            }
            assert!((rotated.norm() - 1.0).abs() < 1e-12);

            // inverse rotation restores the state
            apply_exp_pauli(&mut rotated, &p, -angle).unwrap();
            for (got, want) in rotated.amplitudes().iter().zip(state.amplitudes()) {
                assert!((got - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hf_expectation_reproduces_scf_energy() {
        let (h, scf) = h4_problem(80.0);
        let hf = basis_state(8, "00110011").unwrap();
        let e = expectation(&hf, &h);
        assert!(e.im.abs() < 1e-10);
        assert!(
            (e.re - scf.energy).abs() < 1e-9,
            "<HF|H|HF> = {} vs SCF {}",
            e.re,
            scf.energy
        );
        let n = expectation(&hf, &number_operator(8));
        assert!((n.re - 4.0).abs() < 1e-12);
        let sz = expectation(&hf, &sz_operator(8));
        assert!(sz.re.abs() < 1e-12);
    }

    #[test]
    fn sector_has_36_states_and_cache_reconstructs_h() {
        let (h, _) = h4_problem(80.0);
        let states = sector_basis(8, 4, 0);
        assert_eq!(states.len(), 36);
        assert!(states.contains(&0b0011_0011));
        assert!(states.contains(&0b0101_0101));

        let cache = build_evolution_cache(&h, 4, 0).unwrap();
        assert_eq!(cache.sector_states.len(), 36);
        // frozen sector extrema
        let (e_min, e_max) = cache.eigenvalue_range();
        assert!((e_min - (-1.8801654813)).abs() < 1e-6);
        assert!((e_max - (-0.528331)).abs() < 1e-5);

        // reconstruction V diag(E) V^T = H_sector against the dense build
        let dense = dense_sector_matrix(&h, &cache.sector_states).unwrap();
        let dim = 36;
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = 0.0;
                for k in 0..dim {
                    acc += cache.eigenvectors[[i, k]]
                        * cache.eigenvalues[k]
                        * cache.eigenvectors[[j, k]];
                }
                assert!((acc - dense[[i, j]]).abs() < 1e-9);
            }
        }
        // orthonormal eigenbasis
        for a in 0..dim {
            for b in 0..dim {
                let mut dot = 0.0;
                for k in 0..dim {
                    dot += cache.eigenvectors[[k, a]] * cache.eigenvectors[[k, b]];
                }
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn controlled_evolution_phases_eigenstates_and_preserves_branch_zero() {
        let (h, _) = h4_problem(80.0);
        let cache = build_evolution_cache(&h, 4, 0).unwrap();
        let time = 0.7;
        let e_ref = -2.0;
        for k in [0usize, 5, 35] {
            let system = cache.eigenstate(k);
            // independent energy: Rayleigh quotient through `expectation`
            let energy = expectation(&system, &h).re;

            // joint = (|0> |HF> + |1> |eig_k>) / sqrt(2)
            let hf = basis_state(8, "00110011").unwrap();
            let mut joint = attach_ancilla(&hf);
            let offset = 1 << 8;
            for (b, amp) in system.amplitudes().iter().enumerate() {
                joint.amplitudes_mut()[offset + b] = amp * Complex64::new(1.0, 0.0);
            }
            for a in joint.amplitudes_mut() {
                *a *= Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            }
            let before = joint.clone();
            controlled_evolve(&mut joint, &cache, time, e_ref).unwrap();

            let phase = Complex64::from_polar(1.0, (energy - e_ref) * time);
            for b in 0..offset {
                // ancilla-0 branch is bit-exact
                assert_eq!(joint.amplitudes()[b], before.amplitudes()[b]);
                // ancilla-1 branch picked up exactly the eigenphase
                let want = before.amplitudes()[offset + b] * phase;
                assert!((joint.amplitudes()[offset + b] - want).norm() < 1e-9);
            }
            assert!((joint.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn controlled_evolution_composes_in_time() {
        let (h, _) = h4_problem(89.8);
        let cache = build_evolution_cache(&h, 4, 0).unwrap();
        let hf = basis_state(8, "00110011").unwrap();
        let mut joint = attach_ancilla(&hf);
        apply_hadamard(&mut joint, 8).unwrap();

        let mut once = joint.clone();
        controlled_evolve(&mut once, &cache, 1.1, -1.9).unwrap();
        let mut twice = joint.clone();
        controlled_evolve(&mut twice, &cache, 0.4, -1.9).unwrap();
        controlled_evolve(&mut twice, &cache, 0.7, -1.9).unwrap();
        for (a, b) in once.amplitudes().iter().zip(twice.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn sector_leak_is_detected() {
        let (h, _) = h4_problem(80.0);
        let cache = build_evolution_cache(&h, 4, 0).unwrap();
        let hf = basis_state(8, "00110011").unwrap();
        let mut joint = attach_ancilla(&hf);
        apply_hadamard(&mut joint, 8).unwrap();
        // contaminate the ancilla-1 branch with an N=3 determinant
        let offset = 1 << 8;
        joint.amplitudes_mut()[offset + 0b0000_0111] = Complex64::new(1e-3, 0.0);
        match controlled_evolve(&mut joint, &cache, 1.0, -1.9) {
            Err(Error::SectorLeak(leak)) => assert!((leak - 1e-6).abs() < 1e-9),
            other => panic!("expected SectorLeak, got {other:?}"),
        }
    }

    #[test]
    fn trotterized_evolution_converges_to_exact() {
        let (h, _) = h4_problem(80.0);
        let cache = build_evolution_cache(&h, 4, 0).unwrap();
        let hf = basis_state(8, "00110011").unwrap();
        let mut joint = attach_ancilla(&hf);
        apply_hadamard(&mut joint, 8).unwrap();

        let time = 0.2;
        let e_ref = -1.9;
        let mut exact = joint.clone();
        controlled_evolve(&mut exact, &cache, time, e_ref).unwrap();

        let err_at = |slices: usize| -> f64 {
            let mut approx = joint.clone();
            controlled_evolve_trotter(&mut approx, &h, time, e_ref, slices).unwrap();
            approx
                .amplitudes()
                .iter()
                .zip(exact.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        };
        let coarse = err_at(60);
        let fine = err_at(600);
        assert!(fine < 1e-3, "Trotter error at 600 slices: {fine}");
        assert!(fine < 0.2 * coarse, "first-order convergence in slice count");
    }

    #[test]
    fn ancilla_gates_behave() {
        let mut rng = Mix(5);
        let state = random_state(5, &mut rng);
        // Hadamard is an involution
        let mut twice = state.clone();
        apply_hadamard(&mut twice, 4).unwrap();
        apply_hadamard(&mut twice, 4).unwrap();
        for (a, b) in twice.amplitudes().iter().zip(state.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        // phase gate touches only ancilla-1 amplitudes
        let mut phased = state.clone();
        apply_phase(&mut phased, 4, 0.9).unwrap();
        let factor = Complex64::from_polar(1.0, 0.9);
        for (idx, (a, b)) in phased.amplitudes().iter().zip(state.amplitudes()).enumerate() {
            let want = if idx & (1 << 4) != 0 { b * factor } else { *b };
            assert!((a - want).norm() < 1e-15);
        }
        // ancilla probability for |+> ancilla over a normalized system state
        let system = random_state(4, &mut rng);
        let mut joint = attach_ancilla(&system);
        assert!(joint.probability_of_one(4).abs() < 1e-15);
        apply_hadamard(&mut joint, 4).unwrap();
        assert!((joint.probability_of_one(4) - 0.5).abs() < 1e-12);
        joint.assert_normalized().unwrap();
        assert!(matches!(
            Statevector::from_amplitudes(3, vec![Complex64::new(2.0, 0.0); 8])
                .unwrap()
                .assert_normalized(),
            Err(Error::StateCorrupt(_))
        ));
    }

    #[test]
    fn bernoulli_sampler_is_unbiased() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let shots = 10_000;
        let p = 0.3;
        let ones = sample_ones(p, shots, &mut rng);
        let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
        assert!(
            ((ones as f64) - p * shots as f64).abs() < 3.0 * sigma,
            "{ones} ones out of {shots}"
        );
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(sample_ones(1.0, 100, &mut rng2), 100);
        assert_eq!(sample_ones(0.0, 100, &mut rng2), 0);
    }
}
