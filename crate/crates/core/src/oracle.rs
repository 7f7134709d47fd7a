//! Ground-truth engines: dense eigendecomposition, Fock-space matrices
//! built directly from ladder operators, and classical power iteration.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::FermionOperator;
use crate::pauli::PauliSum;
use crate::state::StateVector;

/// Full-space eigendecompositions are limited to this many qubits
/// (a 2^12 complex matrix is already ~270 MB).
pub const DENSE_QUBIT_CAP: usize = 12;

/// Fock-space matrices from ladder operators are limited to this many orbitals.
pub const FOCK_ORBITAL_CAP: usize = 6;

/// Largest symmetry-sector dimension the sector oracle will diagonalize.
pub const SECTOR_DIM_CAP: usize = 5000;

/// Largest out-of-sector amplitude accepted as rounding noise.
const LEAK_TOL: f64 = 1e-10;

/// Eigenvalues in ascending order with matching eigenvectors (columns),
/// expressed over `basis` (computational-basis indices; the full space when
/// the decomposition is unrestricted).
#[derive(Debug, Clone)]
pub struct Spectrum {
    n_qubits: usize,
    basis: Vec<usize>,
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ground_energy(&self) -> f64 {
        self.values[0]
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvector `i` embedded in the full `2^n` space.
    pub fn eigenvector(&self, i: usize) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.n_qubits];
        for (row, &b) in self.basis.iter().enumerate() {
            amps[b] = self.vectors[(row, i)];
        }
        StateVector::from_amplitudes(self.n_qubits, amps).expect("consistent dimensions")
    }

    pub fn ground_state(&self) -> StateVector {
        self.eigenvector(0)
    }

    /// `|⟨ψ_i|state⟩|` for every eigenvector, in spectrum order.
    pub fn overlaps(&self, state: &StateVector) -> Result<Vec<f64>> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                found: state.n_qubits(),
            });
        }
        let amps = state.amplitudes();
        Ok((0..self.dim())
            .map(|i| {
                self.basis
                    .iter()
                    .enumerate()
                    .map(|(row, &b)| self.vectors[(row, i)].conj() * amps[b])
                    .sum::<Complex64>()
                    .norm()
            })
            .collect())
    }
}

fn hermitian_spectrum(n_qubits: usize, basis: Vec<usize>, m: DMatrix<Complex64>) -> Spectrum {
    let is_real = m.iter().all(|z| z.im == 0.0);
    let (values, vectors) = if is_real {
        let eig = SymmetricEigen::new(m.map(|z| z.re));
        (eig.eigenvalues, eig.eigenvectors.map(|v| Complex64::new(v, 0.0)))
    } else {
        let eig = SymmetricEigen::new(m);
        (eig.eigenvalues, eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = DMatrix::from_fn(vectors.nrows(), order.len(), |r, c| vectors[(r, order[c])]);
    Spectrum {
        n_qubits,
        basis,
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

/// Full Hermitian eigendecomposition of `to_matrix(h)`.
pub fn dense_spectrum(h: &PauliSum) -> Result<Spectrum> {
    let m = h.to_matrix_capped(DENSE_QUBIT_CAP)?;
    let basis = (0..m.nrows()).collect();
    Ok(hermitian_spectrum(h.n_qubits(), basis, m))
}

/// Lowest eigenpair of `h`.
pub fn dense_ground(h: &PauliSum) -> Result<(f64, StateVector)> {
    let s = dense_spectrum(h)?;
    Ok((s.ground_energy(), s.ground_state()))
}

/// A set of computational basis states selected by population counts on
/// qubit masks, e.g. particle number, or α and β electron counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    n_qubits: usize,
    constraints: Vec<(u64, u32)>,
}

impl Sector {
    pub fn new(n_qubits: usize, constraints: Vec<(u64, u32)>) -> Self {
        Sector {
            n_qubits,
            constraints,
        }
    }

    /// Fixed total particle number.
    pub fn particle_number(n_qubits: usize, n_particles: u32) -> Self {
        let all = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        Sector::new(n_qubits, vec![(all, n_particles)])
    }

    /// Fixed α and β counts for interleaved spin-orbitals (even qubits α).
    pub fn spin_resolved(n_qubits: usize, n_alpha: u32, n_beta: u32) -> Self {
        let alpha = (0..n_qubits).step_by(2).fold(0u64, |m, q| m | 1 << q);
        let beta = (1..n_qubits).step_by(2).fold(0u64, |m, q| m | 1 << q);
        Sector::new(n_qubits, vec![(alpha, n_alpha), (beta, n_beta)])
    }

    /// The sector containing a given basis state.
    pub fn containing(&self, index: usize) -> bool {
        self.constraints
            .iter()
            .all(|&(mask, count)| (index as u64 & mask).count_ones() == count)
    }

    pub fn basis(&self) -> Vec<usize> {
        (0..1usize << self.n_qubits).filter(|&j| self.containing(j)).collect()
    }
}

/// Eigendecomposition of `h` restricted to a symmetry sector. The caller is
/// responsible for `h` commuting with the sector's constraints; net matrix
/// elements leaking out of the sector are an error.
pub fn sector_spectrum(h: &PauliSum, sector: &Sector) -> Result<Spectrum> {
    if sector.n_qubits != h.n_qubits() {
        return Err(Error::QubitMismatch {
            expected: h.n_qubits(),
            found: sector.n_qubits,
        });
    }
    let basis = sector.basis();
    let dim = basis.len();
    if dim == 0 {
        return Err(Error::Config("empty symmetry sector".into()));
    }
    if dim > SECTOR_DIM_CAP {
        return Err(Error::Config(format!("sector dimension {dim} exceeds {SECTOR_DIM_CAP}")));
    }
    let mut position = vec![usize::MAX; 1 << h.n_qubits()];
    for (row, &b) in basis.iter().enumerate() {
        position[b] = row;
    }
    let mut m = DMatrix::zeros(dim, dim);
    let mut leaked: HashMap<usize, Complex64> = HashMap::new();
    for (col, &b) in basis.iter().enumerate() {
        leaked.clear();
        for &(c, p) in h.iter() {
            let (target, amp) = p.apply_to_basis(b);
            match position[target] {
                usize::MAX => *leaked.entry(target).or_default() += amp * c,
                row => m[(row, col)] += amp * c,
            }
        }
        // individual strings may leave the sector as long as the sum does not
        if let Some((t, v)) = leaked.iter().find(|(_, v)| v.norm() > LEAK_TOL) {
            return Err(Error::Config(format!(
                "operator couples basis state {b} to {t} outside the sector (amplitude {:.3e})",
                v.norm()
            )));
        }
    }
    Ok(hermitian_spectrum(h.n_qubits(), basis, m))
}

/// `2^n × 2^n` occupation-basis matrix of a fermionic operator, built from
/// ladder-operator action with the sign `(−1)^{occupied orbitals below j}`.
pub fn fock_matrix(f: &FermionOperator, n_orbitals: usize) -> Result<DMatrix<Complex64>> {
    if n_orbitals > FOCK_ORBITAL_CAP {
        return Err(Error::TooManyQubits {
            n: n_orbitals,
            cap: FOCK_ORBITAL_CAP,
        });
    }
    if n_orbitals < f.n_orbitals() {
        return Err(Error::Config("operator wider than requested Fock space".into()));
    }
    let dim = 1usize << n_orbitals;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        for (c, ops) in f.terms() {
            // Rightmost operator acts first.
            let mut state = Some((col, 1.0f64));
            for op in ops.iter().rev() {
                state = state.and_then(|(occ, sign)| {
                    let bit = 1usize << op.orbital;
                    let occupied = occ & bit != 0;
                    if occupied == op.dagger {
                        return None;
                    }
                    let parity = (occ & (bit - 1)).count_ones() % 2;
                    let s = if parity == 1 { -sign } else { sign };
                    Some((occ ^ bit, s))
                });
            }
            if let Some((row, sign)) = state {
                m[(row, col)] += Complex64::new(c * sign, 0.0);
            }
        }
    }
    Ok(m)
}

/// Classical power iteration on the dense matrix `I − γH`, returning the
/// energies `⟨x_t|H|x_t⟩` for `t = 0..=k` and the final normalized vector.
pub fn power_iteration(
    h: &PauliSum,
    x0: &StateVector,
    gamma: f64,
    k: usize,
) -> Result<(Vec<f64>, StateVector)> {
    if x0.n_qubits() != h.n_qubits() {
        return Err(Error::QubitMismatch {
            expected: h.n_qubits(),
            found: x0.n_qubits(),
        });
    }
    let hm = h.to_matrix_capped(DENSE_QUBIT_CAP)?;
    let dim = hm.nrows();
    let hg = DMatrix::<Complex64>::identity(dim, dim) - hm.scale(gamma);
    let mut x = DVector::from_column_slice(x0.amplitudes());
    let energy = |x: &DVector<Complex64>| {
        let hx = &hm * x;
        (x.dotc(&hx) / x.dotc(x)).re
    };
    let mut energies = vec![energy(&x)];
    for _ in 0..k {
        x = &hg * &x;
        let norm = x.norm();
        if !(norm > 0.0) {
            return Err(Error::ZeroNorm);
        }
        x.unscale_mut(norm);
        energies.push(energy(&x));
    }
    let state = StateVector::from_amplitudes(h.n_qubits(), x.iter().copied().collect())?;
    Ok((energies, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::Ladder;

    #[test]
    fn ground_of_z() {
        let z = PauliSum::from_labels(&[(1.0, "Z")]).unwrap();
        let (e, psi) = dense_ground(&z).unwrap();
        assert!((e + 1.0).abs() < 1e-14);
        assert!((psi.amplitudes()[1].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn number_operator_fock_matrix() {
        let f = FermionOperator::new(1, vec![(1.0, vec![Ladder::create(0), Ladder::annihilate(0)])]).unwrap();
        let m = fock_matrix(&f, 1).unwrap();
        assert_eq!(m[(0, 0)].re, 0.0);
        assert_eq!(m[(1, 1)].re, 1.0);
    }

    #[test]
    fn canonical_anticommutation() {
        // a a† + a† a = I
        let f = FermionOperator::new(
            2,
            vec![
                (1.0, vec![Ladder::annihilate(0), Ladder::create(0)]),
                (1.0, vec![Ladder::create(0), Ladder::annihilate(0)]),
            ],
        )
        .unwrap();
        let m = fock_matrix(&f, 2).unwrap();
        assert_eq!(m, DMatrix::identity(4, 4));
    }

    #[test]
    fn fock_cap_enforced() {
        let f = FermionOperator::new(7, vec![]).unwrap();
        assert!(matches!(fock_matrix(&f, 7), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn power_iteration_zero_steps_and_fixed_points() {
        let z = PauliSum::from_labels(&[(1.0, "Z")]).unwrap();
        let plus = StateVector::from_real(1, &[0.6, 0.8]).unwrap();
        let (e, _) = power_iteration(&z, &plus, 1.0, 0).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e[0] - (0.36 - 0.64)).abs() < 1e-14);

        let one = StateVector::basis(1, 1).unwrap();
        let (e, _) = power_iteration(&z, &one, 1.0, 5).unwrap();
        assert!(e.iter().all(|&v| (v + 1.0).abs() < 1e-14));
    }

    #[test]
    fn sector_matches_full_spectrum_block() {
        // Number-conserving two-site hopping with on-site energies.
        let h = PauliSum::from_labels(&[(0.5, "XX"), (0.5, "YY"), (0.3, "ZI"), (-0.2, "IZ")]).unwrap();
        let full = dense_spectrum(&h).unwrap();
        let one = sector_spectrum(&h, &Sector::particle_number(2, 1)).unwrap();
        assert_eq!(one.dim(), 2);
        for v in one.values() {
            assert!(full.values().iter().any(|w| (v - w).abs() < 1e-12));
        }
        let leaky = PauliSum::from_labels(&[(1.0, "XI")]).unwrap();
        assert!(sector_spectrum(&leaky, &Sector::particle_number(2, 1)).is_err());
    }
}
