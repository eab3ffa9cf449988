//! Dense matrices of operators on the truncated Fock space.
//!
//! Matrices are taken in the orthonormal basis of normalized symmetrized
//! occupation tuples, so the weighted adjoint is the conjugate transpose.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Result;
use crate::fock::{flat_index, FockSpace, FockVector};

/// Orthonormal basis `e_{n,k}` indexed by sector and sorted tuple.
#[derive(Debug, Clone)]
pub struct SymmetricBasis {
    modes: usize,
    truncation: usize,
    entries: Vec<BasisEntry>,
}

#[derive(Debug, Clone)]
struct BasisEntry {
    sector: usize,
    tuple: Vec<usize>,
    /// amplitude on each permutation of `tuple`
    amplitude: f64,
    /// `(number of distinct permutations) · Π w`
    mass: f64,
}

impl SymmetricBasis {
    pub fn new(space: &FockSpace) -> Self {
        let modes = space.modes();
        let weights = space.grid().weights();
        let mut entries = Vec::new();
        for n in 0..=space.truncation() {
            for tuple in (0..modes).combinations_with_replacement(n) {
                let perms = tuple.iter().copied().permutations(n).unique().count() as f64;
                let weight: f64 = tuple.iter().map(|&k| weights[k]).product();
                let mass = perms * weight;
                entries.push(BasisEntry { sector: n, tuple, amplitude: 1.0 / mass.sqrt(), mass });
            }
        }
        SymmetricBasis { modes, truncation: space.truncation(), entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vector(&self, index: usize) -> FockVector {
        let entry = &self.entries[index];
        let mut out = FockVector::zeros(self.modes, self.truncation);
        let n = entry.sector;
        for perm in entry.tuple.iter().copied().permutations(n).unique() {
            out.sector_mut(n)[flat_index(self.modes, &perm)] = Complex64::new(entry.amplitude, 0.0);
        }
        out
    }

    /// Coordinates `⟨e_a, v⟩` of a symmetric vector.
    pub fn coordinates(&self, v: &FockVector) -> DVector<Complex64> {
        DVector::from_iterator(
            self.entries.len(),
            self.entries
                .iter()
                .map(|e| v.sector(e.sector)[flat_index(self.modes, &e.tuple)] * (e.amplitude * e.mass)),
        )
    }

    /// Inverse of [`Self::coordinates`].
    pub fn from_coordinates(&self, c: &DVector<Complex64>) -> FockVector {
        let mut out = FockVector::zeros(self.modes, self.truncation);
        for (entry, value) in self.entries.iter().zip(c.iter()) {
            let n = entry.sector;
            for perm in entry.tuple.iter().copied().permutations(n).unique() {
                out.sector_mut(n)[flat_index(self.modes, &perm)] = value * entry.amplitude;
            }
        }
        out
    }
}

/// Matrix of a linear map `op` in the basis of [`SymmetricBasis`].
pub fn operator_matrix(
    space: &FockSpace,
    op: impl Fn(&FockVector) -> Result<FockVector>,
) -> Result<DMatrix<Complex64>> {
    let basis = SymmetricBasis::new(space);
    matrix_in_basis(&basis, op)
}

pub fn matrix_in_basis(
    basis: &SymmetricBasis,
    op: impl Fn(&FockVector) -> Result<FockVector>,
) -> Result<DMatrix<Complex64>> {
    let dim = basis.len();
    let mut out = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let image = op(&basis.vector(b))?;
        out.set_column(b, &basis.coordinates(&image));
    }
    Ok(out)
}

/// `max |A_ij − B_ij|`.
pub fn max_abs_deviation(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}
