//! Restricted Hartree-Fock with DIIS, integral transforms to the molecular
//! and spin-orbital bases, MP2 amplitudes, and FCIDUMP export.
//!
//! Spin orbitals use the block-spin convention: for `n` spatial orbitals,
//! spin orbital `p < n` is alpha on spatial `p`, and `p >= n` is beta on
//! spatial `p - n`. The HF determinant therefore occupies
//! `{0..nocc} ∪ {n..n+nocc}`.

use crate::ansatz::{Excitation, ExcitationPool};
use crate::linalg::{jacobi_eigh, solve_linear};
use crate::molsys::MolecularIntegrals;
use crate::{Error, Result};
use ndarray::{Array2, Array4};
use std::collections::VecDeque;
use std::io;

const DIIS_DEPTH: usize = 8;
const DENSITY_RMS_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 200;
const DEGENERACY_GAP: f64 = 1e-8;

/// Converged restricted Hartree-Fock solution.
#[derive(Debug, Clone)]
pub struct ScfResult {
    /// Total RHF energy including nuclear repulsion (hartree).
    pub energy: f64,
    /// Canonical orbital energies, ascending (hartree).
    pub orbital_energies: Vec<f64>,
    /// MO coefficients; column `k` is the k-th canonical orbital.
    pub coefficients: Array2<f64>,
    /// Converged AO density matrix (doubly occupied convention).
    pub density: Array2<f64>,
    /// Nuclear repulsion energy (hartree).
    pub e_nuc: f64,
    /// Fock-build iterations performed.
    pub iterations: usize,
    /// Always true on the `Ok` path; serialized into artifacts.
    pub converged: bool,
    /// True when the HOMO-LUMO gap is below 1e-8 hartree.
    pub homo_lumo_degenerate: bool,
    /// Number of doubly occupied orbitals.
    pub n_occupied: usize,
}

/// Runs restricted Hartree-Fock: symmetric orthogonalization, core guess,
/// DIIS-accelerated iterations to a density RMS change below 1e-10.
pub fn run_rhf(ints: &MolecularIntegrals, n_electrons: usize) -> Result<ScfResult> {
    let n = ints.n_functions();
    if n_electrons == 0 || n_electrons % 2 != 0 || n_electrons > 2 * n {
        return Err(Error::InvalidInput(format!(
            "restricted HF needs an even electron count in 1..={}, got {n_electrons}",
            2 * n
        )));
    }
    let nocc = n_electrons / 2;

    // Symmetric (Loewdin) orthogonalization X = S^{-1/2}.
    let s_eig = jacobi_eigh(&ints.s);
    if s_eig.values[0] < 1e-10 {
        return Err(Error::InvalidInput(format!(
            "overlap matrix is near-singular (smallest eigenvalue {:.3e})",
            s_eig.values[0]
        )));
    }
    let mut x = Array2::<f64>::zeros((n, n));
    for p in 0..n {
        for q in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += s_eig.vectors[[p, k]] * s_eig.vectors[[q, k]] / s_eig.values[k].sqrt();
            }
            x[[p, q]] = acc;
        }
    }

    let hcore = &ints.t + &ints.v;
    let mut density = Array2::<f64>::zeros((n, n));
    let mut coefficients = Array2::<f64>::zeros((n, n));
    let mut orbital_energies = vec![0.0; n];
    let mut energy = ints.e_nuc;
    let mut iterations = 0;
    let mut converged = false;
    let mut fock_history: VecDeque<Array2<f64>> = VecDeque::new();
    let mut error_history: VecDeque<Array2<f64>> = VecDeque::new();

    while iterations < MAX_ITERATIONS {
        iterations += 1;

        let fock = build_fock(&hcore, &ints.eri, &density);
        energy = electronic_energy(&density, &hcore, &fock) + ints.e_nuc;

        // DIIS extrapolation on the commutator residual FDS - SDF.
        let fds = fock.dot(&density).dot(&ints.s);
        let residual = &fds - &fds.t();
        fock_history.push_back(fock.clone());
        error_history.push_back(residual);
        if fock_history.len() > DIIS_DEPTH {
            fock_history.pop_front();
            error_history.pop_front();
        }
        let fock_eff = diis_extrapolate(&fock_history, &error_history).unwrap_or(fock);

        // Diagonalize in the orthogonal basis and back-transform.
        let f_prime = x.t().dot(&fock_eff).dot(&x);
        let f_eig = jacobi_eigh(&f_prime);
        let c = x.dot(&f_eig.vectors);
        orbital_energies.copy_from_slice(&f_eig.values);
        coefficients = fix_column_signs(c);

        let mut new_density = Array2::<f64>::zeros((n, n));
        for p in 0..n {
            for q in 0..n {
                let mut acc = 0.0;
                for k in 0..nocc {
                    acc += coefficients[[p, k]] * coefficients[[q, k]];
                }
                new_density[[p, q]] = 2.0 * acc;
            }
        }

        let rms = (&new_density - &density).mapv(|d| d * d).sum().sqrt() / (n as f64);
        density = new_density;
        if rms < DENSITY_RMS_TOL {
            converged = true;
            break;
        }
    }

    if !converged {
        return Err(Error::ScfNotConverged {
            iterations,
            last_energy: energy,
        });
    }

    // Final energy from the converged density.
    let fock = build_fock(&hcore, &ints.eri, &density);
    energy = electronic_energy(&density, &hcore, &fock) + ints.e_nuc;

    let homo_lumo_degenerate =
        nocc < n && (orbital_energies[nocc] - orbital_energies[nocc - 1]).abs() < DEGENERACY_GAP;

    Ok(ScfResult {
        energy,
        orbital_energies,
        coefficients,
        density,
        e_nuc: ints.e_nuc,
        iterations,
        converged,
        homo_lumo_degenerate,
        n_occupied: nocc,
    })
}

fn build_fock(hcore: &Array2<f64>, eri: &Array4<f64>, density: &Array2<f64>) -> Array2<f64> {
    let n = hcore.nrows();
    let mut fock = hcore.clone();
    for p in 0..n {
        for q in 0..n {
            let mut acc = 0.0;
            for r in 0..n {
                for s in 0..n {
                    acc += density[[r, s]] * (eri[[p, q, r, s]] - 0.5 * eri[[p, r, q, s]]);
                }
            }
            fock[[p, q]] += acc;
        }
    }
    fock
}

fn electronic_energy(density: &Array2<f64>, hcore: &Array2<f64>, fock: &Array2<f64>) -> f64 {
    0.5 * (density * &(hcore + fock)).sum()
}

/// Solves the DIIS least-squares system; `None` falls back to the raw Fock
/// matrix (history too short or singular system).
fn diis_extrapolate(
    focks: &VecDeque<Array2<f64>>,
    errors: &VecDeque<Array2<f64>>,
) -> Option<Array2<f64>> {
    let m = focks.len();
    if m < 2 {
        return None;
    }
    let mut b = Array2::<f64>::zeros((m + 1, m + 1));
    for i in 0..m {
        for j in 0..m {
            b[[i, j]] = (&errors[i] * &errors[j]).sum();
        }
        b[[i, m]] = -1.0;
        b[[m, i]] = -1.0;
    }
    let mut rhs = vec![0.0; m + 1];
    rhs[m] = -1.0;
    let coeffs = solve_linear(&b, &rhs)?;
    let mut fock = Array2::<f64>::zeros(focks[0].raw_dim());
    for i in 0..m {
        fock = fock + focks[i].mapv(|v| v * coeffs[i]);
    }
    Some(fock)
}

/// Fixes the orbital-sign gauge: the first coefficient of each column with
/// magnitude above 1e-8 is made positive.
fn fix_column_signs(mut c: Array2<f64>) -> Array2<f64> {
    let (n, m) = c.dim();
    for k in 0..m {
        for p in 0..n {
            let v = c[[p, k]];
            if v.abs() > 1e-8 {
                if v < 0.0 {
                    for q in 0..n {
                        c[[q, k]] = -c[[q, k]];
                    }
                }
                break;
            }
        }
    }
    c
}

/// One- and two-electron integrals in the molecular-orbital basis.
/// `eri` keeps chemists' notation: `eri[[p,q,r,s]] = (pq|rs)`.
#[derive(Debug, Clone)]
pub struct MoIntegrals {
    pub h1: Array2<f64>,
    pub eri: Array4<f64>,
    pub orbital_energies: Vec<f64>,
    pub e_nuc: f64,
    pub n_orbitals: usize,
    pub n_occupied: usize,
}

/// Transforms AO integrals into the converged MO basis.
pub fn to_mo_basis(ints: &MolecularIntegrals, scf: &ScfResult) -> MoIntegrals {
    let n = ints.n_functions();
    let c = &scf.coefficients;
    let hcore = &ints.t + &ints.v;
    let h1 = c.t().dot(&hcore).dot(c);

    // Four quarter transforms, O(n^5).
    let mut t1 = Array4::<f64>::zeros((n, n, n, n));
    for p in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for d in 0..n {
                    let mut acc = 0.0;
                    for a in 0..n {
                        acc += c[[a, p]] * ints.eri[[a, b, cc, d]];
                    }
                    t1[[p, b, cc, d]] = acc;
                }
            }
        }
    }
    let mut t2 = Array4::<f64>::zeros((n, n, n, n));
    for p in 0..n {
        for q in 0..n {
            for cc in 0..n {
                for d in 0..n {
                    let mut acc = 0.0;
                    for b in 0..n {
                        acc += c[[b, q]] * t1[[p, b, cc, d]];
                    }
                    t2[[p, q, cc, d]] = acc;
                }
            }
        }
    }
    let mut t3 = Array4::<f64>::zeros((n, n, n, n));
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for d in 0..n {
                    let mut acc = 0.0;
                    for cc in 0..n {
                        acc += c[[cc, r]] * t2[[p, q, cc, d]];
                    }
                    t3[[p, q, r, d]] = acc;
                }
            }
        }
    }
    let mut eri = Array4::<f64>::zeros((n, n, n, n));
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let mut acc = 0.0;
                    for d in 0..n {
                        acc += c[[d, s]] * t3[[p, q, r, d]];
                    }
                    eri[[p, q, r, s]] = acc;
                }
            }
        }
    }

    MoIntegrals {
        h1,
        eri,
        orbital_energies: scf.orbital_energies.clone(),
        e_nuc: ints.e_nuc,
        n_orbitals: n,
        n_occupied: scf.n_occupied,
    }
}

/// Integrals over block-spin spin orbitals. `antisymmetrized` holds
/// physicists'-notation antisymmetrized elements `<pq||rs>`.
#[derive(Debug, Clone)]
pub struct SpinOrbitalIntegrals {
    pub h1: Array2<f64>,
    pub antisymmetrized: Array4<f64>,
    pub orbital_energies: Vec<f64>,
    pub e_nuc: f64,
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
}

impl SpinOrbitalIntegrals {
    /// Spin orbitals occupied in the HF determinant.
    pub fn occupied(&self) -> Vec<usize> {
        let n = self.n_spin_orbitals / 2;
        let nocc = self.n_electrons / 2;
        (0..nocc).chain(n..n + nocc).collect()
    }

    /// Spin orbitals empty in the HF determinant.
    pub fn virtuals(&self) -> Vec<usize> {
        let n = self.n_spin_orbitals / 2;
        let nocc = self.n_electrons / 2;
        (nocc..n).chain(n + nocc..2 * n).collect()
    }
}

/// Expands MO integrals into the spin-orbital basis:
/// `<pq|rs> = (pr|qs) * delta(sigma_p, sigma_r) * delta(sigma_q, sigma_s)`,
/// then antisymmetrizes `<pq||rs> = <pq|rs> - <pq|sr>`.
pub fn to_spin_orbitals(mo: &MoIntegrals) -> SpinOrbitalIntegrals {
    let n = mo.n_orbitals;
    let m = 2 * n;
    let spatial = |p: usize| if p < n { p } else { p - n };
    let same_spin = |p: usize, q: usize| (p < n) == (q < n);

    let mut h1 = Array2::<f64>::zeros((m, m));
    for p in 0..m {
        for q in 0..m {
            if same_spin(p, q) {
                h1[[p, q]] = mo.h1[[spatial(p), spatial(q)]];
            }
        }
    }

    let mut anti = Array4::<f64>::zeros((m, m, m, m));
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let direct = if same_spin(p, r) && same_spin(q, s) {
                        mo.eri[[spatial(p), spatial(r), spatial(q), spatial(s)]]
                    } else {
                        0.0
                    };
                    let exchange = if same_spin(p, s) && same_spin(q, r) {
                        mo.eri[[spatial(p), spatial(s), spatial(q), spatial(r)]]
                    } else {
                        0.0
                    };
                    anti[[p, q, r, s]] = direct - exchange;
                }
            }
        }
    }

    let mut orbital_energies = Vec::with_capacity(m);
    for p in 0..m {
        orbital_energies.push(mo.orbital_energies[spatial(p)]);
    }

    SpinOrbitalIntegrals {
        h1,
        antisymmetrized: anti,
        orbital_energies,
        e_nuc: mo.e_nuc,
        n_spin_orbitals: m,
        n_electrons: 2 * mo.n_occupied,
    }
}

/// Amplitudes attached to the operators of an excitation pool, in pool order.
#[derive(Debug, Clone)]
pub struct AmplitudeVector {
    pub labels: Vec<Excitation>,
    pub values: Vec<f64>,
    /// Full MP2 correlation energy (independent of the pool restriction).
    pub mp2_correlation_energy: f64,
}

impl AmplitudeVector {
    /// All-zero amplitudes for a pool (the bare HF reference).
    pub fn zeros(pool: &ExcitationPool) -> Self {
        AmplitudeVector {
            labels: pool.excitations.clone(),
            values: vec![0.0; pool.len()],
            mp2_correlation_energy: 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// First-order MP2 doubles amplitudes for each pool operator,
/// `theta_ij^ab = <ij||ab> / (eps_i + eps_j - eps_a - eps_b)`, plus the full
/// MP2 correlation energy. A denominator below 1e-8 in magnitude is refused.
pub fn mp2_amplitudes(
    so: &SpinOrbitalIntegrals,
    pool: &ExcitationPool,
) -> Result<AmplitudeVector> {
    let eps = &so.orbital_energies;
    let mut values = Vec::with_capacity(pool.len());
    for exc in &pool.excitations {
        let (i, j) = exc.annihilate;
        let (a, b) = exc.create;
        let denom = eps[i] + eps[j] - eps[a] - eps[b];
        if denom.abs() < 1e-8 {
            return Err(Error::DegenerateDenominator(format!(
                "excitation {exc}: denominator {denom:.3e}"
            )));
        }
        values.push(so.antisymmetrized[[i, j, a, b]] / denom);
    }

    let mut corr = 0.0;
    for &i in &so.occupied() {
        for &j in &so.occupied() {
            for &a in &so.virtuals() {
                for &b in &so.virtuals() {
                    let num = so.antisymmetrized[[i, j, a, b]];
                    if num != 0.0 {
                        corr += 0.25 * num * num / (eps[i] + eps[j] - eps[a] - eps[b]);
                    }
                }
            }
        }
    }

    Ok(AmplitudeVector {
        labels: pool.excitations.clone(),
        values,
        mp2_correlation_energy: corr,
    })
}

/// Writes the MO integrals in FCIDUMP format: a Fortran-style namelist
/// header, then `value i j k l` lines (1-based, chemists' notation, 8-fold
/// unique), one-electron lines as `value i j 0 0`, and the nuclear repulsion
/// as the all-zero-index line.
pub fn write_fcidump<W: io::Write>(
    mo: &MoIntegrals,
    n_electrons: usize,
    w: &mut W,
) -> io::Result<()> {
    let n = mo.n_orbitals;
    writeln!(w, "&FCI NORB={},NELEC={},MS2=0,", n, n_electrons)?;
    let orbsym: Vec<&str> = (0..n).map(|_| "1").collect();
    writeln!(w, " ORBSYM={},", orbsym.join(","))?;
    writeln!(w, " ISYM=1,")?;
    writeln!(w, "&END")?;
    let mut line = |v: f64, i: usize, j: usize, k: usize, l: usize| -> io::Result<()> {
        writeln!(w, "{:>23.16E} {:>3} {:>3} {:>3} {:>3}", v, i, j, k, l)
    };
    for i in 0..n {
        for j in 0..=i {
            for k in 0..=i {
                let lmax = if k == i { j } else { k };
                for l in 0..=lmax {
                    let v = mo.eri[[i, j, k, l]];
                    if v.abs() >= 1e-12 {
                        line(v, i + 1, j + 1, k + 1, l + 1)?;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = mo.h1[[i, j]];
            if v.abs() >= 1e-12 {
                line(v, i + 1, j + 1, 0, 0)?;
            }
        }
    }
    line(mo.e_nuc, 0, 0, 0, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::build_uccd_pool;
    use crate::molsys::{
        build_h4_geometry, compute_integrals, load_sto3g_hydrogen, BasisSet, ContractedGaussian,
        GeometrySpec, Vec3,
    };

    fn h2_integrals(r_bohr: f64) -> MolecularIntegrals {
        let geom = GeometrySpec {
            beta_deg: 0.0,
            radius_angstrom: 0.0,
            atoms: vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 0.0, r_bohr)],
        };
        let basis = BasisSet {
            per_atom: vec![
                ContractedGaussian::sto3g_hydrogen_1s(),
                ContractedGaussian::sto3g_hydrogen_1s(),
            ],
        };
        compute_integrals(&geom, &basis).unwrap()
    }

    fn h4_pipeline(beta_deg: f64) -> (MolecularIntegrals, ScfResult) {
        let geom = build_h4_geometry(beta_deg, 1.738).unwrap();
        let ints = compute_integrals(&geom, &load_sto3g_hydrogen()).unwrap();
        let scf = run_rhf(&ints, 4).unwrap();
        (ints, scf)
    }

    #[test]
    fn h2_hartree_fock_energy_matches_reference() {
        let ints = h2_integrals(1.4);
        let scf = run_rhf(&ints, 2).unwrap();
        assert!(scf.converged);
        assert!((scf.energy - (-1.11671433)).abs() < 1e-6);
        assert!((scf.e_nuc - 1.0 / 1.4).abs() < 1e-12);
        assert!(!scf.homo_lumo_degenerate);
    }

    #[test]
    fn h4_hartree_fock_energies_match_reference() {
        let (_, scf80) = h4_pipeline(80.0);
        assert!((scf80.energy - (-1.4784603070)).abs() < 1e-8);
        assert!((scf80.e_nuc - 1.1756172279).abs() < 1e-9);
        let expected_eps = [-0.26096808, -0.21658305, 0.05939122, 0.09663397];
        for (got, want) in scf80.orbital_energies.iter().zip(expected_eps) {
            assert!((got - want).abs() < 1e-7, "eps {got} vs {want}");
        }
        assert!(!scf80.homo_lumo_degenerate);

        let (_, scf898) = h4_pipeline(89.8);
        assert!((scf898.energy - (-1.4118091391)).abs() < 1e-8);
        assert!((scf898.e_nuc - 1.1656636208).abs() < 1e-9);
    }

    #[test]
    fn scf_solution_is_orthonormal_and_idempotent() {
        let (ints, scf) = h4_pipeline(80.0);
        let n = ints.n_functions();
        let ctsc = scf.coefficients.t().dot(&ints.s).dot(&scf.coefficients);
        for p in 0..n {
            for q in 0..n {
                let want = if p == q { 1.0 } else { 0.0 };
                assert!((ctsc[[p, q]] - want).abs() < 1e-10);
            }
        }
        // restricted density: D S D = 2 D
        let dsd = scf.density.dot(&ints.s).dot(&scf.density);
        for p in 0..n {
            for q in 0..n {
                assert!((dsd[[p, q]] - 2.0 * scf.density[[p, q]]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_bad_electron_counts() {
        let ints = h2_integrals(1.4);
        assert!(matches!(run_rhf(&ints, 3), Err(Error::InvalidInput(_))));
        assert!(matches!(run_rhf(&ints, 0), Err(Error::InvalidInput(_))));
        assert!(matches!(run_rhf(&ints, 6), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn spin_orbital_energy_identity_reproduces_hf_energy() {
        let (ints, scf) = h4_pipeline(80.0);
        let so = to_spin_orbitals(&to_mo_basis(&ints, &scf));
        let occ = so.occupied();
        assert_eq!(occ, vec![0, 1, 4, 5]);
        let mut e = so.e_nuc;
        for &p in &occ {
            e += so.h1[[p, p]];
        }
        for &p in &occ {
            for &q in &occ {
                e += 0.5 * so.antisymmetrized[[p, q, p, q]];
            }
        }
        assert!(
            (e - scf.energy).abs() < 1e-8,
            "spin-orbital HF energy {e} vs SCF {}",
            scf.energy
        );
        // Koopmans consistency: eps_p = h_pp + sum_occ <pq||pq>
        for &p in &occ {
            let mut eps = so.h1[[p, p]];
            for &q in &occ {
                eps += so.antisymmetrized[[p, q, p, q]];
            }
            assert!((eps - so.orbital_energies[p]).abs() < 1e-8);
        }
    }

    #[test]
    fn antisymmetrized_integrals_have_required_symmetries() {
        let (ints, scf) = h4_pipeline(80.0);
        let so = to_spin_orbitals(&to_mo_basis(&ints, &scf));
        let m = so.n_spin_orbitals;
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    for s in 0..m {
                        let v = so.antisymmetrized[[p, q, r, s]];
                        assert!((v + so.antisymmetrized[[p, q, s, r]]).abs() < 1e-12);
                        assert!((v + so.antisymmetrized[[q, p, r, s]]).abs() < 1e-12);
                        assert!((v - so.antisymmetrized[[r, s, p, q]]).abs() < 1e-12);
                    }
                }
            }
        }
        // alpha-beta one-electron block vanishes identically
        assert_eq!(so.h1[[0, 4]], 0.0);
        assert_eq!(so.h1[[3, 5]], 0.0);
        // spin-forbidden two-electron element is exactly zero
        assert_eq!(so.antisymmetrized[[0, 1, 2, 7]], 0.0);
    }

    #[test]
    fn mp2_matches_reference_for_h2_and_h4() {
        let ints = h2_integrals(1.4);
        let scf = run_rhf(&ints, 2).unwrap();
        let so = to_spin_orbitals(&to_mo_basis(&ints, &scf));
        let pool = build_uccd_pool(2, 2).unwrap();
        let amps = mp2_amplitudes(&so, &pool).unwrap();
        assert_eq!(amps.values.len(), 1);
        assert!((amps.mp2_correlation_energy - (-0.01315787)).abs() < 1e-6);

        let (ints4, scf4) = h4_pipeline(80.0);
        let so4 = to_spin_orbitals(&to_mo_basis(&ints4, &scf4));
        let pool4 = build_uccd_pool(4, 4).unwrap();
        let amps4 = mp2_amplitudes(&so4, &pool4).unwrap();
        assert_eq!(amps4.values.len(), 18);
        assert!((amps4.mp2_correlation_energy - (-0.2363749334)).abs() < 1e-6);
        assert!((amps4.max_abs() - 0.240956).abs() < 1e-4);
        // amplitudes follow their defining ratio
        for (exc, th) in amps4.labels.iter().zip(&amps4.values) {
            let (i, j) = exc.annihilate;
            let (a, b) = exc.create;
            let denom = so4.orbital_energies[i] + so4.orbital_energies[j]
                - so4.orbital_energies[a]
                - so4.orbital_energies[b];
            let want = so4.antisymmetrized[[i, j, a, b]] / denom;
            assert!((th - want).abs() < 1e-14);
        }
    }

    #[test]
    fn mp2_rejects_degenerate_denominators() {
        let (ints, scf) = h4_pipeline(80.0);
        let mut so = to_spin_orbitals(&to_mo_basis(&ints, &scf));
        so.orbital_energies = vec![0.0; so.n_spin_orbitals];
        let pool = build_uccd_pool(4, 4).unwrap();
        assert!(matches!(
            mp2_amplitudes(&so, &pool),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn fcidump_round_trips_all_integrals() {
        let (ints, scf) = h4_pipeline(80.0);
        let mo = to_mo_basis(&ints, &scf);
        let mut buf = Vec::new();
        write_fcidump(&mo, 4, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();

        assert!(text.starts_with("&FCI NORB=4,NELEC=4,MS2=0,"));
        assert!(text.contains("ISYM=1,"));

        let n = mo.n_orbitals;
        let mut h1 = Array2::<f64>::zeros((n, n));
        let mut eri = Array4::<f64>::zeros((n, n, n, n));
        let mut e_nuc = None;
        let mut in_body = false;
        for raw in text.lines() {
            if raw.trim() == "&END" {
                in_body = true;
                continue;
            }
            if !in_body {
                continue;
            }
            let mut parts = raw.split_whitespace();
            let v: f64 = parts.next().unwrap().parse().unwrap();
            let idx: Vec<usize> = parts.map(|t| t.parse().unwrap()).collect();
            let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            if i == 0 {
                e_nuc = Some(v);
            } else if k == 0 {
                h1[[i - 1, j - 1]] = v;
                h1[[j - 1, i - 1]] = v;
            } else {
                for (a, b, c, d) in [
                    (i, j, k, l),
                    (j, i, k, l),
                    (i, j, l, k),
                    (j, i, l, k),
                    (k, l, i, j),
                    (l, k, i, j),
                    (k, l, j, i),
                    (l, k, j, i),
                ] {
                    eri[[a - 1, b - 1, c - 1, d - 1]] = v;
                }
            }
        }
        assert!((e_nuc.unwrap() - mo.e_nuc).abs() < 1e-12);
        for p in 0..n {
            for q in 0..n {
                assert!((h1[[p, q]] - mo.h1[[p, q]]).abs() < 1e-11);
                for r in 0..n {
                    for s in 0..n {
                        assert!((eri[[p, q, r, s]] - mo.eri[[p, q, r, s]]).abs() < 1e-11);
                    }
                }
            }
        }
    }
}
