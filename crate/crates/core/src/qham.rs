//! Pauli-string algebra and the Jordan-Wigner qubit Hamiltonian.
//!
//! A Pauli string is stored as an (x, z) bitmask pair in the symplectic
//! convention: the stored operator is `i^{popcount(x & z)} X^x Z^z`, which
//! makes the single-qubit cases work out to I, X, Z, and Y exactly. Its
//! action on a computational basis state is
//! `P |b> = i^{popcount(x & z)} (-1)^{popcount(z & b)} |b XOR x>`.
//!
//! Qubit `k` hosts spin orbital `k` (block-spin order, alpha first); basis
//! indices are little-endian in the qubit index, and printed labels put
//! qubit `n-1` leftmost.

use crate::ansatz::Excitation;
use crate::scf::SpinOrbitalIntegrals;
use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::io;

/// Coefficients with magnitude below this are dropped when sums are pruned.
pub const COEFFICIENT_DROP_THRESHOLD: f64 = 1e-12;

/// A single Pauli string on up to 64 qubits, identity included.
/// Ordering (for canonical term order) compares `x_mask`, then `z_mask`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x_mask: u64,
    pub z_mask: u64,
}

impl PauliString {
    pub const fn identity() -> Self {
        PauliString {
            x_mask: 0,
            z_mask: 0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    /// Builds a string from a label with qubit `n-1` leftmost, e.g. "IXYZ"
    /// puts Z on qubit 0 and X on qubit 2.
    pub fn from_label(label: &str) -> Result<Self> {
        let n = label.len();
        if n > 64 {
            return Err(Error::InvalidInput("label longer than 64 qubits".into()));
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (pos, ch) in label.chars().enumerate() {
            let qubit = n - 1 - pos;
            match ch {
                'I' => {}
                'X' => x |= 1 << qubit,
                'Y' => {
                    x |= 1 << qubit;
                    z |= 1 << qubit;
                }
                'Z' => z |= 1 << qubit,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "invalid Pauli letter '{other}'"
                    )))
                }
            }
        }
        Ok(PauliString { x_mask: x, z_mask: z })
    }

    /// Renders the string with qubit `n_qubits - 1` leftmost.
    pub fn to_label(&self, n_qubits: usize) -> String {
        let mut out = String::with_capacity(n_qubits);
        for qubit in (0..n_qubits).rev() {
            let x = (self.x_mask >> qubit) & 1 == 1;
            let z = (self.z_mask >> qubit) & 1 == 1;
            out.push(match (x, z) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            });
        }
        out
    }

    /// Applies the string to basis index `b`, returning the image index and
    /// the accumulated phase.
    pub fn apply_to_basis(&self, b: u64) -> (u64, Complex64) {
        let mut phase_quarters = (self.x_mask & self.z_mask).count_ones() as u32;
        phase_quarters += 2 * (self.z_mask & b).count_ones();
        (b ^ self.x_mask, i_power(phase_quarters))
    }
}

/// `i` raised to `k` (k taken mod 4), exactly.
fn i_power(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Multiplies two Pauli strings: `a * b = phase * product`, with the phase
/// one of {1, i, -1, -i}, tracked exactly in integer arithmetic.
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> (Complex64, PauliString) {
    let x3 = a.x_mask ^ b.x_mask;
    let z3 = a.z_mask ^ b.z_mask;
    // Exponent of i: reduce both factors to X^x Z^z form, commute b's X past
    // a's Z (one sign per crossing), then restore the product's own prefactor.
    let g = (a.x_mask & a.z_mask).count_ones() + (b.x_mask & b.z_mask).count_ones()
        + 2 * (a.z_mask & b.x_mask).count_ones()
        + 3 * (x3 & z3).count_ones();
    (
        i_power(g),
        PauliString {
            x_mask: x3,
            z_mask: z3,
        },
    )
}

/// True when the two strings commute (symplectic inner product is even).
pub fn pauli_strings_commute(a: &PauliString, b: &PauliString) -> bool {
    ((a.x_mask & b.z_mask).count_ones() + (a.z_mask & b.x_mask).count_ones()) % 2 == 0
}

/// A linear combination of Pauli strings in canonical order.
#[derive(Debug, Clone)]
pub struct PauliSum {
    pub n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    /// Accumulates `c * P` into the sum.
    pub fn add_term(&mut self, p: PauliString, c: Complex64) {
        debug_assert!(
            self.n_qubits == 64 || (p.x_mask | p.z_mask) < (1u64 << self.n_qubits),
            "Pauli string exceeds the register"
        );
        let entry = self.terms.entry(p).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
    }

    /// Removes terms with coefficient magnitude below the drop threshold.
    pub fn prune(&mut self) {
        self.terms
            .retain(|_, c| c.norm() >= COEFFICIENT_DROP_THRESHOLD);
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Terms in canonical (x_mask, z_mask) order.
    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn scaled(&self, factor: Complex64) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out
    }

    pub fn add(&self, other: &PauliSum) -> PauliSum {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*p, *c);
        }
        out.prune();
        out
    }

    /// Operator product, expanded term by term and pruned.
    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::new(self.n_qubits);
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                let (phase, prod) = pauli_mul(pa, pb);
                out.add_term(prod, ca * cb * phase);
            }
        }
        out.prune();
        out
    }

    /// Commutator `[self, other] = self * other - other * self`.
    pub fn commutator(&self, other: &PauliSum) -> PauliSum {
        self.mul(other).add(&other.mul(self).scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Largest coefficient magnitude (zero for the empty sum).
    pub fn max_coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when every coefficient is real to within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }
}

/// The two-term Pauli expansion of a ladder operator with its Z chain:
/// `a_p^dagger = (X - iY)/2 * Z_{<p}`, `a_p = (X + iY)/2 * Z_{<p}`.
fn ladder_factors(p: usize, creation: bool) -> [(PauliString, Complex64); 2] {
    let x = 1u64 << p;
    let chain = x - 1;
    let x_term = PauliString {
        x_mask: x,
        z_mask: chain,
    };
    let y_term = PauliString {
        x_mask: x,
        z_mask: chain | x,
    };
    let y_coeff = if creation { -0.5 } else { 0.5 };
    [
        (x_term, Complex64::new(0.5, 0.0)),
        (y_term, Complex64::new(0.0, y_coeff)),
    ]
}

/// Expands a product of ladder operators (leftmost first) times `coeff`
/// into Pauli terms.
fn expand_ladder_product(
    ops: &[(usize, bool)],
    coeff: Complex64,
) -> Vec<(PauliString, Complex64)> {
    let mut acc = vec![(PauliString::identity(), coeff)];
    for &(p, creation) in ops {
        let factors = ladder_factors(p, creation);
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (ps, c) in &acc {
            for (f, fc) in &factors {
                let (phase, prod) = pauli_mul(ps, f);
                next.push((prod, c * fc * phase));
            }
        }
        acc = next;
    }
    acc
}

/// Maps the spin-orbital Hamiltonian
/// `H = E_nuc + sum h_pq a_p^dag a_q + 1/4 sum <pq||rs> a_p^dag a_q^dag a_s a_r`
/// to qubits under Jordan-Wigner. The result is Hermitian with all
/// coefficients real; terms below the drop threshold are removed.
pub fn jordan_wigner(so: &SpinOrbitalIntegrals) -> PauliSum {
    let m = so.n_spin_orbitals;
    let mut h = PauliSum::new(m);
    h.add_term(PauliString::identity(), Complex64::new(so.e_nuc, 0.0));
    for p in 0..m {
        for q in 0..m {
            let hpq = so.h1[[p, q]];
            if hpq.abs() < COEFFICIENT_DROP_THRESHOLD {
                continue;
            }
            for (ps, c) in expand_ladder_product(&[(p, true), (q, false)], Complex64::new(hpq, 0.0))
            {
                h.add_term(ps, c);
            }
        }
    }
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let v = so.antisymmetrized[[p, q, r, s]];
                    if v.abs() < COEFFICIENT_DROP_THRESHOLD {
                        continue;
                    }
                    let ops = [(p, true), (q, true), (s, false), (r, false)];
                    for (ps, c) in expand_ladder_product(&ops, Complex64::new(0.25 * v, 0.0)) {
                        h.add_term(ps, c);
                    }
                }
            }
        }
    }
    h.prune();
    h
}

/// Jordan-Wigner image of the anti-Hermitian double-excitation generator
/// `T - T^dagger` with `T = a_a^dag a_b^dag a_j a_i`. Returns the Pauli
/// terms sorted canonically; for a genuine double these are 8 mutually
/// commuting strings with coefficients `+/- i/8` (weight 4 plus any Z-chain
/// remnant between non-adjacent index pairs).
pub fn map_excitation(
    exc: &Excitation,
    n_qubits: usize,
) -> Result<Vec<(PauliString, Complex64)>> {
    let (i, j) = exc.annihilate;
    let (a, b) = exc.create;
    for &p in &[i, j, a, b] {
        if p >= n_qubits {
            return Err(Error::InvalidInput(format!(
                "excitation {exc} touches qubit {p}, register has {n_qubits}"
            )));
        }
    }
    let mut sum = PauliSum::new(n_qubits);
    let forward = [(a, true), (b, true), (j, false), (i, false)];
    for (ps, c) in expand_ladder_product(&forward, Complex64::new(1.0, 0.0)) {
        sum.add_term(ps, c);
    }
    let reverse = [(i, true), (j, true), (b, false), (a, false)];
    for (ps, c) in expand_ladder_product(&reverse, Complex64::new(-1.0, 0.0)) {
        sum.add_term(ps, c);
    }
    sum.prune();
    Ok(sum.terms().map(|(p, c)| (*p, *c)).collect())
}

/// Total particle-number operator `N = sum_p (I - Z_p) / 2`.
pub fn number_operator(n_qubits: usize) -> PauliSum {
    let mut sum = PauliSum::new(n_qubits);
    let half = Complex64::new(0.5, 0.0);
    for p in 0..n_qubits {
        sum.add_term(PauliString::identity(), half);
        sum.add_term(
            PauliString {
                x_mask: 0,
                z_mask: 1 << p,
            },
            -half,
        );
    }
    sum
}

/// Spin projection `S_z = (N_alpha - N_beta) / 2` in block-spin order
/// (first half of the register alpha, second half beta).
pub fn sz_operator(n_qubits: usize) -> PauliSum {
    let half = n_qubits / 2;
    let mut sum = PauliSum::new(n_qubits);
    for p in 0..n_qubits {
        let sign = if p < half { 0.5 } else { -0.5 };
        sum.add_term(PauliString::identity(), Complex64::new(0.5 * sign, 0.0));
        sum.add_term(
            PauliString {
                x_mask: 0,
                z_mask: 1 << p,
            },
            Complex64::new(-0.5 * sign, 0.0),
        );
    }
    sum.prune();
    sum
}

/// Writes a Pauli sum as text: one `coefficient pauli-word` line per term in
/// canonical order (real coefficient; an imaginary part is appended only
/// when present).
pub fn dump_pauli_sum<W: io::Write>(sum: &PauliSum, w: &mut W) -> io::Result<()> {
    writeln!(w, "# {} qubits, {} terms", sum.n_qubits, sum.n_terms())?;
    for (p, c) in sum.terms() {
        if c.im.abs() < COEFFICIENT_DROP_THRESHOLD {
            writeln!(w, "{:+.16e} {}", c.re, p.to_label(sum.n_qubits))?;
        } else {
            writeln!(
                w,
                "{:+.16e}{:+.16e}i {}",
                c.re,
                c.im,
                p.to_label(sum.n_qubits)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::build_uccd_pool;
    use crate::molsys::{build_h4_geometry, compute_integrals, load_sto3g_hydrogen};
    use crate::scf::{run_rhf, to_mo_basis, to_spin_orbitals};
    use ndarray::{Array2, Array4};

    /// Splitmix64 test generator (deterministic, dependency-free).
    struct Mix(u64);
    impl Mix {
        fn next(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }
    }

    fn h4_spin_orbitals(beta: f64) -> crate::scf::SpinOrbitalIntegrals {
        let geom = build_h4_geometry(beta, 1.738).unwrap();
        let ints = compute_integrals(&geom, &load_sto3g_hydrogen()).unwrap();
        let scf = run_rhf(&ints, 4).unwrap();
        to_spin_orbitals(&to_mo_basis(&ints, &scf))
    }

    #[test]
    fn labels_round_trip_and_follow_qubit_order() {
        let p = PauliString::from_label("IXYZ").unwrap();
        assert_eq!(p.x_mask, 0b0110);
        assert_eq!(p.z_mask, 0b0011);
        assert_eq!(p.to_label(4), "IXYZ");
        assert_eq!(PauliString::identity().to_label(3), "III");
        assert!(PauliString::from_label("AXY").is_err());
        let mut rng = Mix(7);
        for _ in 0..50 {
            let x = rng.next() & 0xff;
            let z = rng.next() & 0xff;
            let p = PauliString { x_mask: x, z_mask: z };
            assert_eq!(PauliString::from_label(&p.to_label(8)).unwrap(), p);
        }
    }

    #[test]
    fn single_qubit_action_matches_pauli_matrices() {
        let x = PauliString::from_label("X").unwrap();
        let y = PauliString::from_label("Y").unwrap();
        let z = PauliString::from_label("Z").unwrap();
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(x.apply_to_basis(0), (1, one));
        assert_eq!(x.apply_to_basis(1), (0, one));
        assert_eq!(y.apply_to_basis(0), (1, i));
        assert_eq!(y.apply_to_basis(1), (0, -i));
        assert_eq!(z.apply_to_basis(0), (0, one));
        assert_eq!(z.apply_to_basis(1), (1, -one));
    }

    /// Oracle: applying a*b to a basis state must equal applying b then a.
    #[test]
    fn product_phase_matches_sequential_application() {
        let mut rng = Mix(42);
        for _ in 0..500 {
            let a = PauliString {
                x_mask: rng.next() & 0xf,
                z_mask: rng.next() & 0xf,
            };
            let b = PauliString {
                x_mask: rng.next() & 0xf,
                z_mask: rng.next() & 0xf,
            };
            let (phase, prod) = pauli_mul(&a, &b);
            for basis in 0..16u64 {
                let (mid, ph_b) = b.apply_to_basis(basis);
                let (fin, ph_a) = a.apply_to_basis(mid);
                let (fin2, ph_p) = prod.apply_to_basis(basis);
                assert_eq!(fin, fin2);
                let lhs = ph_a * ph_b;
                let rhs = phase * ph_p;
                assert!((lhs - rhs).norm() < 1e-15, "{a:?} * {b:?}");
            }
        }
    }

    #[test]
    fn commutation_test_agrees_with_multiplication() {
        let xs = PauliString::from_label("XI").unwrap();
        let zs = PauliString::from_label("ZI").unwrap();
        let z0 = PauliString::from_label("IZ").unwrap();
        let xx = PauliString::from_label("XX").unwrap();
        let yy = PauliString::from_label("YY").unwrap();
        assert!(!pauli_strings_commute(&xs, &zs)); // same qubit X vs Z
        assert!(pauli_strings_commute(&xs, &z0)); // different qubits
        assert!(pauli_strings_commute(&xx, &yy)); // two anticommuting slots
        let mut rng = Mix(3);
        for _ in 0..200 {
            let a = PauliString {
                x_mask: rng.next() & 0x3f,
                z_mask: rng.next() & 0x3f,
            };
            let b = PauliString {
                x_mask: rng.next() & 0x3f,
                z_mask: rng.next() & 0x3f,
            };
            let (ph_ab, _) = pauli_mul(&a, &b);
            let (ph_ba, _) = pauli_mul(&b, &a);
            let commute = (ph_ab - ph_ba).norm() < 1e-15;
            assert_eq!(commute, pauli_strings_commute(&a, &b));
        }
    }

    #[test]
    fn hopping_term_maps_to_xx_plus_yy() {
        // h = a_0^dag a_1 + a_1^dag a_0 must map to (X0 X1 + Y0 Y1) / 2.
        let so = crate::scf::SpinOrbitalIntegrals {
            h1: Array2::from_shape_vec((2, 2), vec![0.0, 1.0, 1.0, 0.0]).unwrap(),
            antisymmetrized: Array4::zeros((2, 2, 2, 2)),
            orbital_energies: vec![0.0, 0.0],
            e_nuc: 0.0,
            n_spin_orbitals: 2,
            n_electrons: 0,
        };
        let h = jordan_wigner(&so);
        assert_eq!(h.n_terms(), 2);
        let xx = PauliString::from_label("XX").unwrap();
        let yy = PauliString::from_label("YY").unwrap();
        assert!((h.coefficient(&xx) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((h.coefficient(&yy) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn number_operator_is_projector_sum() {
        // On one qubit: N = (I - Z) / 2.
        let n1 = number_operator(1);
        assert_eq!(n1.n_terms(), 2);
        assert!((n1.coefficient(&PauliString::identity()) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let z = PauliString::from_label("Z").unwrap();
        assert!((n1.coefficient(&z) + Complex64::new(0.5, 0.0)).norm() < 1e-15);
        // On 8 qubits: identity coefficient 4, eight -1/2 Z terms.
        let n8 = number_operator(8);
        assert_eq!(n8.n_terms(), 9);
        assert!(
            (n8.coefficient(&PauliString::identity()) - Complex64::new(4.0, 0.0)).norm() < 1e-15
        );
    }

    #[test]
    fn hamiltonian_is_hermitian_and_commutes_with_symmetries() {
        let so = h4_spin_orbitals(80.0);
        let h = jordan_wigner(&so);
        assert!(h.is_hermitian(1e-12));
        // point-group symmetry zeroes many integrals; 97 strings survive
        assert_eq!(h.n_terms(), 97);
        let n = number_operator(8);
        let sz = sz_operator(8);
        assert!(h.commutator(&n).max_coefficient_norm() < 1e-10);
        assert!(h.commutator(&sz).max_coefficient_norm() < 1e-10);
    }

    #[test]
    fn excitation_generator_has_eight_imaginary_terms() {
        let pool = build_uccd_pool(4, 4).unwrap();
        for exc in &pool.excitations {
            let terms = map_excitation(exc, 8).unwrap();
            assert_eq!(terms.len(), 8, "{exc}");
            for (p, c) in &terms {
                // four X/Y slots plus any Z-chain remnant between the
                // non-adjacent index pairs
                assert!(p.weight() >= 4, "{exc}: {}", p.to_label(8));
                assert_eq!(p.x_mask.count_ones(), 4, "four flipped orbitals");
                assert!(c.re.abs() < 1e-15, "anti-Hermitian generator");
                assert!((c.im.abs() - 0.125).abs() < 1e-15);
            }
            // terms arrive in canonical sorted order
            for w in terms.windows(2) {
                assert!(w[0].0 < w[1].0);
            }
            // all eight mutually commute: sequential exponentials are exact
            for a in 0..terms.len() {
                for b in a + 1..terms.len() {
                    assert!(pauli_strings_commute(&terms[a].0, &terms[b].0));
                }
            }
        }
        // Adjacent index pairs (the minimal-pool operator) leave no Z chain:
        // all eight strings are weight 4.
        let minimal = Excitation {
            annihilate: (1, 5),
            create: (2, 6),
        };
        for (p, _) in map_excitation(&minimal, 8).unwrap() {
            assert_eq!(p.weight(), 4, "{}", p.to_label(8));
        }
        let bad = Excitation {
            annihilate: (1, 5),
            create: (2, 9),
        };
        assert!(map_excitation(&bad, 8).is_err());
    }

    #[test]
    fn dump_is_parseable_and_complete() {
        let so = h4_spin_orbitals(80.0);
        let h = jordan_wigner(&so);
        let mut buf = Vec::new();
        dump_pauli_sum(&h, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut parsed = PauliSum::new(8);
        let mut lines = 0;
        for line in text.lines().skip(1) {
            let (coeff, label) = line.split_once(' ').unwrap();
            parsed.add_term(
                PauliString::from_label(label).unwrap(),
                Complex64::new(coeff.parse().unwrap(), 0.0),
            );
            lines += 1;
        }
        assert_eq!(lines, h.n_terms());
        let diff = h.add(&parsed.scaled(Complex64::new(-1.0, 0.0)));
        assert!(diff.max_coefficient_norm() < 1e-10);
    }
}
