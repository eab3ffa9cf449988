use num_complex::Complex64;

use crate::error::Result;

/// Dense `rows × cols` table of unimodular two-point factors, e.g. the
/// kernel `R_m(p_a, p_b)` over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTable {
    rows: usize,
    cols: usize,
    values: Vec<Complex64>,
}

impl PairTable {
    pub fn from_fn(
        rows: &[f64],
        cols: &[f64],
        mut f: impl FnMut(f64, f64) -> Result<Complex64>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for &p in rows {
            for &q in cols {
                values.push(f(p, q)?);
            }
        }
        Ok(PairTable { rows: rows.len(), cols: cols.len(), values })
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        PairTable { rows, cols, values: vec![Complex64::new(1.0, 0.0); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.cols + col]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Entrywise combination of two equally shaped tables.
    pub fn zip_with(&self, other: &PairTable, f: impl Fn(Complex64, Complex64) -> Complex64) -> PairTable {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "table shapes differ");
        PairTable {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn product(&self, other: &PairTable) -> PairTable {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> PairTable {
        PairTable { rows: self.rows, cols: self.cols, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn conj(&self) -> PairTable {
        self.map(|v| v.conj())
    }

    /// `max |t(a,b)·t(b,a) - 1|` for square tables.
    pub fn reciprocity_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "reciprocity needs a square table");
        let mut worst: f64 = 0.0;
        for a in 0..self.rows {
            for b in 0..self.cols {
                worst = worst.max((self.get(a, b) * self.get(b, a) - 1.0).norm());
            }
        }
        worst
    }
}
