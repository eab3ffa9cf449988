//! Truncated bosonic Fock space over a [`MomentumGrid`].
//!
//! Sector `n` of a [`FockVector`] is a dense tensor over `{0..M}ⁿ`, stored
//! row-major (first index slowest). All sectors are kept totally symmetric.
//! The inner product weights each index by the grid weight, so it realizes
//! `∫ Π dp_i/ω_m(p_i)`. Operators act exactly like their untruncated
//! counterparts except that creation out of the top sector `N` is dropped.

use std::ops::{Add, Mul, Neg, Sub};

use itertools::Itertools;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::table::PairTable;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Amplitudes `ξ(p_k)` of a one-particle vector on the grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OneParticleVector(Vec<Complex64>);

impl OneParticleVector {
    pub fn new(values: Vec<Complex64>) -> Self {
        OneParticleVector(values)
    }

    pub fn zeros(modes: usize) -> Self {
        OneParticleVector(vec![ZERO; modes])
    }

    pub fn basis(modes: usize, k: usize) -> Self {
        let mut v = OneParticleVector::zeros(modes);
        v.0[k] = ONE;
        v
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conj(&self) -> Self {
        OneParticleVector(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }
}

/// Momentum-space test function data `f⁺(p) = f̃(ω, p)`, `f⁻(p) = f̃(-ω, -p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionData {
    fplus: OneParticleVector,
    fminus: OneParticleVector,
    real: bool,
}

impl TestFunctionData {
    /// Checks the realness claim against `f⁻ = conj f⁺` when `real` is set.
    pub fn new(fplus: OneParticleVector, fminus: OneParticleVector, real: bool) -> Result<Self> {
        if fplus.len() != fminus.len() {
            return Err(Error::InvalidTestFunction("f+ and f- have different lengths".into()));
        }
        if real && fplus.0.iter().zip(&fminus.0).any(|(a, b)| a.conj() != *b) {
            return Err(Error::InvalidTestFunction("real data needs f-(p) = conj f+(p)".into()));
        }
        Ok(TestFunctionData { fplus, fminus, real })
    }

    /// Real test function: `f⁻ = conj f⁺`.
    pub fn real(fplus: OneParticleVector) -> Self {
        let fminus = fplus.conj();
        TestFunctionData { fplus, fminus, real: true }
    }

    pub fn fplus(&self) -> &OneParticleVector {
        &self.fplus
    }

    pub fn fminus(&self) -> &OneParticleVector {
        &self.fminus
    }

    pub fn is_real(&self) -> bool {
        self.real
    }
}

/// A vector in the Fock space truncated at `N` particles.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    modes: usize,
    sectors: Vec<Vec<Complex64>>,
}

impl FockVector {
    pub fn zeros(modes: usize, truncation: usize) -> Self {
        let sectors = (0..=truncation).map(|n| vec![ZERO; modes.pow(n as u32)]).collect();
        FockVector { modes, sectors }
    }

    pub fn vacuum(modes: usize, truncation: usize) -> Self {
        let mut v = FockVector::zeros(modes, truncation);
        v.sectors[0][0] = ONE;
        v
    }

    /// Wraps raw sectors after checking their sizes; sectors are symmetrized.
    pub fn from_sectors(modes: usize, sectors: Vec<Vec<Complex64>>) -> Result<Self> {
        for (n, sector) in sectors.iter().enumerate() {
            if sector.len() != modes.pow(n as u32) {
                return Err(Error::Malformed(format!(
                    "sector {n} has {} entries, expected {}",
                    sector.len(),
                    modes.pow(n as u32)
                )));
            }
        }
        if sectors.is_empty() {
            return Err(Error::Malformed("no sectors".into()));
        }
        let sectors = sectors
            .into_iter()
            .enumerate()
            .map(|(n, s)| symmetrize(modes, n, &s))
            .collect();
        Ok(FockVector { modes, sectors })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn truncation(&self) -> usize {
        self.sectors.len() - 1
    }

    pub fn sector(&self, n: usize) -> &[Complex64] {
        &self.sectors[n]
    }

    pub fn sectors(&self) -> &[Vec<Complex64>] {
        &self.sectors
    }

    pub fn sector_mut(&mut self, n: usize) -> &mut [Complex64] {
        &mut self.sectors[n]
    }

    /// Highest sector holding a nonzero entry.
    pub fn top_sector(&self) -> Option<usize> {
        (0..self.sectors.len()).rev().find(|&n| self.sectors[n].iter().any(|z| *z != ZERO))
    }

    pub fn max_abs(&self) -> f64 {
        self.sectors.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        self.sectors
            .iter()
            .flatten()
            .zip(other.sectors.iter().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn conj(&self) -> FockVector {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> FockVector {
        FockVector {
            modes: self.modes,
            sectors: self.sectors.iter().map(|s| s.iter().map(|&z| f(z)).collect()).collect(),
        }
    }

    /// `max |Ψ_n - Symm_n Ψ_n|` over all sectors.
    pub fn symmetry_defect(&self) -> f64 {
        self.sectors
            .iter()
            .enumerate()
            .map(|(n, s)| {
                let sym = symmetrize(self.modes, n, s);
                s.iter().zip(&sym).fold(0.0, |m: f64, (a, b)| m.max((a - b).norm()))
            })
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &FockVector, f: impl Fn(Complex64, Complex64) -> Complex64) -> FockVector {
        assert_eq!(
            (self.modes, self.sectors.len()),
            (other.modes, other.sectors.len()),
            "Fock vectors live on different spaces"
        );
        FockVector {
            modes: self.modes,
            sectors: self
                .sectors
                .iter()
                .zip(&other.sectors)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
        }
    }
}

impl Add for &FockVector {
    type Output = FockVector;
    fn add(self, rhs: &FockVector) -> FockVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &FockVector {
    type Output = FockVector;
    fn sub(self, rhs: &FockVector) -> FockVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &FockVector {
    type Output = FockVector;
    fn neg(self) -> FockVector {
        self.map(|z| -z)
    }
}

impl Mul<Complex64> for &FockVector {
    type Output = FockVector;
    fn mul(self, rhs: Complex64) -> FockVector {
        self.map(|z| z * rhs)
    }
}

/// Odometer over `{0..modes}ⁿ` in row-major order.
pub(crate) struct Odometer {
    modes: usize,
    digits: Vec<usize>,
    started: bool,
}

impl Odometer {
    pub(crate) fn new(modes: usize, n: usize) -> Self {
        Odometer { modes, digits: vec![0; n], started: false }
    }

    /// Advances to the next multi-index; `false` once exhausted.
    pub(crate) fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return self.modes > 0 || self.digits.is_empty();
        }
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.modes {
                return true;
            }
            *d = 0;
        }
        false
    }

    pub(crate) fn digits(&self) -> &[usize] {
        &self.digits
    }
}

pub(crate) fn flat_index(modes: usize, digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * modes + d)
}

/// Total symmetrization `(1/n!) Σ_π T∘π` of an `n`-index tensor.
pub fn symmetrize(modes: usize, n: usize, tensor: &[Complex64]) -> Vec<Complex64> {
    if n <= 1 {
        return tensor.to_vec();
    }
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let scale = 1.0 / perms.len() as f64;
    let mut out = vec![ZERO; tensor.len()];
    let mut permuted = vec![0; n];
    let mut odo = Odometer::new(modes, n);
    let mut flat = 0;
    while odo.advance() {
        let mut acc = ZERO;
        for perm in &perms {
            for (slot, &src) in permuted.iter_mut().zip(perm) {
                *slot = odo.digits()[src];
            }
            acc += tensor[flat_index(modes, &permuted)];
        }
        out[flat] = acc * scale;
        flat += 1;
    }
    out
}

/// Result of a boost: the moved vector and whether any amplitude left the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Boosted {
    pub vector: FockVector,
    pub truncated: bool,
}

/// Grid plus truncation; owns the per-sector weight products.
#[derive(Debug, Clone)]
pub struct FockSpace {
    grid: MomentumGrid,
    truncation: usize,
    weight_products: Vec<Vec<f64>>,
}

impl FockSpace {
    pub fn new(grid: MomentumGrid, truncation: usize) -> Result<Self> {
        if truncation < 1 {
            return Err(Error::Truncation { required: 1, found: truncation });
        }
        let modes = grid.len();
        let weights = grid.weights().to_vec();
        let weight_products = (0..=truncation)
            .map(|n| {
                let mut out = Vec::with_capacity(modes.pow(n as u32));
                let mut odo = Odometer::new(modes, n);
                while odo.advance() {
                    out.push(odo.digits().iter().map(|&k| weights[k]).product());
                }
                out
            })
            .collect();
        Ok(FockSpace { grid, truncation, weight_products })
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn modes(&self) -> usize {
        self.grid.len()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn vacuum(&self) -> FockVector {
        FockVector::vacuum(self.modes(), self.truncation)
    }

    pub fn zero(&self) -> FockVector {
        FockVector::zeros(self.modes(), self.truncation)
    }

    pub(crate) fn check(&self, v: &FockVector) -> Result<()> {
        if v.modes != self.modes() || v.truncation() != self.truncation {
            return Err(Error::GridMismatch {
                expected: format!("{} modes, N = {}", self.modes(), self.truncation),
                found: format!("{} modes, N = {}", v.modes, v.truncation()),
            });
        }
        Ok(())
    }

    pub(crate) fn check_one(&self, xi: &OneParticleVector) -> Result<()> {
        if xi.len() != self.modes() {
            return Err(Error::GridMismatch {
                expected: self.grid.describe(),
                found: format!("one-particle vector of length {}", xi.len()),
            });
        }
        Ok(())
    }

    /// `⟨ξ, η⟩₁ = Σ_k w_k conj ξ_k η_k`.
    pub fn one_particle_inner(&self, xi: &OneParticleVector, eta: &OneParticleVector) -> Result<Complex64> {
        self.check_one(xi)?;
        self.check_one(eta)?;
        Ok(xi.0.iter().zip(&eta.0).zip(self.grid.weights()).map(|((a, b), w)| a.conj() * b * w).sum())
    }

    pub fn inner(&self, psi: &FockVector, phi: &FockVector) -> Result<Complex64> {
        self.check(psi)?;
        self.check(phi)?;
        let mut acc = ZERO;
        for (n, weights) in self.weight_products.iter().enumerate() {
            for ((a, b), w) in psi.sectors[n].iter().zip(&phi.sectors[n]).zip(weights) {
                acc += a.conj() * b * w;
            }
        }
        Ok(acc)
    }

    pub fn norm(&self, psi: &FockVector) -> Result<f64> {
        Ok(self.inner(psi, psi)?.re.max(0.0).sqrt())
    }

    /// Particle-number cutoff applied to sectors above `max_sector`.
    pub fn cut_above(&self, psi: &FockVector, max_sector: usize) -> FockVector {
        let mut out = psi.clone();
        for sector in out.sectors.iter_mut().skip(max_sector + 1) {
            sector.iter_mut().for_each(|z| *z = ZERO);
        }
        out
    }

    /// `a(ξ)`, antilinear in `ξ`.
    pub fn annihilate(&self, xi: &OneParticleVector, psi: &FockVector) -> Result<FockVector> {
        self.annihilate_with(xi, psi, None)
    }

    /// `a†(ξ) = a(ξ)*`, linear in `ξ`.
    pub fn create(&self, xi: &OneParticleVector, psi: &FockVector) -> Result<FockVector> {
        self.create_with(xi, psi, None)
    }

    /// `[aΨ]_n(k) = √(n+1) Σ_q w_q conj ξ_q Π_i K(q, k_i) Ψ_{n+1}(q, k)`.
    pub(crate) fn annihilate_with(
        &self,
        xi: &OneParticleVector,
        psi: &FockVector,
        kernel: Option<&PairTable>,
    ) -> Result<FockVector> {
        self.check(psi)?;
        self.check_one(xi)?;
        let modes = self.modes();
        let coeffs: Vec<Complex64> =
            xi.0.iter().zip(self.grid.weights()).map(|(x, w)| x.conj() * w).collect();
        let mut out = self.zero();
        for n in 0..self.truncation {
            let upper = &psi.sectors[n + 1];
            let block = modes.pow(n as u32);
            let scale = ((n + 1) as f64).sqrt();
            let mut odo = Odometer::new(modes, n);
            let mut flat = 0;
            while odo.advance() {
                let mut acc = ZERO;
                for (q, c) in coeffs.iter().enumerate() {
                    if *c == ZERO {
                        continue;
                    }
                    let dressing = match kernel {
                        Some(k) => odo.digits().iter().map(|&d| k.get(q, d)).product(),
                        None => ONE,
                    };
                    acc += c * dressing * upper[q * block + flat];
                }
                out.sectors[n][flat] = acc * scale;
                flat += 1;
            }
        }
        Ok(out)
    }

    /// Adjoint of [`Self::annihilate_with`]:
    /// `[a†Ψ]_n(k) = n^{-1/2} Σ_a ξ(k_a) Π_{b≠a} conj K(k_a, k_b) Ψ_{n-1}(k without k_a)`.
    pub(crate) fn create_with(
        &self,
        xi: &OneParticleVector,
        psi: &FockVector,
        kernel: Option<&PairTable>,
    ) -> Result<FockVector> {
        self.check(psi)?;
        self.check_one(xi)?;
        let modes = self.modes();
        let mut out = self.zero();
        let mut rest = Vec::with_capacity(self.truncation);
        for n in 1..=self.truncation {
            let lower = &psi.sectors[n - 1];
            let scale = 1.0 / (n as f64).sqrt();
            let mut odo = Odometer::new(modes, n);
            let mut flat = 0;
            while odo.advance() {
                let digits = odo.digits();
                let mut acc = ZERO;
                for a in 0..n {
                    let amp = xi.0[digits[a]];
                    if amp == ZERO {
                        continue;
                    }
                    rest.clear();
                    rest.extend(digits.iter().enumerate().filter(|(b, _)| *b != a).map(|(_, &d)| d));
                    let dressing: Complex64 = match kernel {
                        Some(k) => rest.iter().map(|&d| k.get(digits[a], d).conj()).product(),
                        None => ONE,
                    };
                    acc += amp * dressing * lower[flat_index(modes, &rest)];
                }
                out.sectors[n][flat] = acc * scale;
                flat += 1;
            }
        }
        Ok(out)
    }

    /// Sharp-momentum annihilator `a(p_s)`: `[aΨ]_n(k) = √(n+1) Π_i K(s, k_i) Ψ_{n+1}(s, k)`.
    pub(crate) fn annihilate_at_with(
        &self,
        s: usize,
        psi: &FockVector,
        kernel: Option<&PairTable>,
    ) -> Result<FockVector> {
        self.check(psi)?;
        if s >= self.modes() {
            return Err(Error::GridMismatch {
                expected: self.grid.describe(),
                found: format!("momentum index {s}"),
            });
        }
        let modes = self.modes();
        let mut out = self.zero();
        for n in 0..self.truncation {
            let block = modes.pow(n as u32);
            let scale = ((n + 1) as f64).sqrt();
            let mut odo = Odometer::new(modes, n);
            let mut flat = 0;
            while odo.advance() {
                let dressing: Complex64 = match kernel {
                    Some(k) => odo.digits().iter().map(|&d| k.get(s, d)).product(),
                    None => ONE,
                };
                out.sectors[n][flat] = scale * dressing * psi.sectors[n + 1][s * block + flat];
                flat += 1;
            }
        }
        Ok(out)
    }

    /// `a(p)` at the grid point with index `s`.
    pub fn annihilate_at(&self, s: usize, psi: &FockVector) -> Result<FockVector> {
        self.annihilate_at_with(s, psi, None)
    }

    /// Multiplies sector `n` by `Π_{a<b} t(k_a, k_b)` (or `Π_{a,b}` over all
    /// ordered pairs including `a = b` when `all_pairs` is set).
    pub(crate) fn multiply_pairs(&self, psi: &FockVector, table: &PairTable, all_pairs: bool) -> Result<FockVector> {
        self.check(psi)?;
        let modes = self.modes();
        let mut out = psi.clone();
        for n in 2..=self.truncation {
            let mut odo = Odometer::new(modes, n);
            let mut flat = 0;
            while odo.advance() {
                let d = odo.digits();
                let mut factor = ONE;
                for a in 0..n {
                    if all_pairs {
                        for b in 0..n {
                            factor *= table.get(d[a], d[b]);
                        }
                    } else {
                        for b in a + 1..n {
                            factor *= table.get(d[a], d[b]);
                        }
                    }
                }
                out.sectors[n][flat] *= factor;
                flat += 1;
            }
        }
        if all_pairs {
            // n = 1 still carries the diagonal factor t(k, k)
            for (k, z) in out.sectors[1].iter_mut().enumerate() {
                *z *= table.get(k, k);
            }
        }
        Ok(out)
    }

    /// Multiplies sector `n` by `Π_i f(k_i)`.
    pub(crate) fn multiply_modes(&self, psi: &FockVector, per_mode: &[Complex64]) -> Result<FockVector> {
        self.check(psi)?;
        let modes = self.modes();
        let mut out = psi.clone();
        for n in 1..=self.truncation {
            let mut odo = Odometer::new(modes, n);
            let mut flat = 0;
            while odo.advance() {
                let factor: Complex64 = odo.digits().iter().map(|&k| per_mode[k]).product();
                out.sectors[n][flat] *= factor;
                flat += 1;
            }
        }
        Ok(out)
    }

    /// `e^ξ = Σ_{n≤N} ξ^{⊗n}/√(n!)`.
    pub fn exponential_vector(&self, xi: &OneParticleVector) -> Result<FockVector> {
        self.check_one(xi)?;
        let mut out = self.vacuum();
        let mut factorial = 1.0;
        for n in 1..=self.truncation {
            factorial *= n as f64;
            let norm = factorial.sqrt();
            let mut odo = Odometer::new(self.modes(), n);
            let mut flat = 0;
            while odo.advance() {
                let prod: Complex64 = odo.digits().iter().map(|&k| xi.0[k]).product();
                out.sectors[n][flat] = prod / norm;
                flat += 1;
            }
        }
        Ok(out)
    }

    /// Second-quantized translation by `x = (x0, x1)`.
    pub fn apply_translation(&self, x: (f64, f64), psi: &FockVector) -> Result<FockVector> {
        let phases: Vec<Complex64> = (0..self.modes())
            .map(|k| Complex64::from_polar(1.0, x.0 * self.grid.omega(k) - x.1 * self.grid.points()[k]))
            .collect();
        self.multiply_modes(psi, &phases)
    }

    /// Second-quantized boost by `shift` grid steps: `Ψ ↦ Ψ(λp_1, ..., λp_n)`.
    pub fn apply_boost(&self, shift: i64, psi: &FockVector) -> Result<Boosted> {
        self.check(psi)?;
        let modes = self.modes();
        let targets = (0..modes)
            .map(|k| self.grid.boost_target(k, shift))
            .collect::<Result<Vec<_>>>()?;
        let mut out = self.zero();
        let mut truncated = false;
        let mut moved = Vec::with_capacity(self.truncation);
        for n in 0..=self.truncation {
            let mut odo = Odometer::new(modes, n);
            let mut flat = 0;
            while odo.advance() {
                let value = psi.sectors[n][flat];
                flat += 1;
                moved.clear();
                moved.extend(odo.digits().iter().map(|&k| targets[k]));
                if moved.iter().all(Option::is_some) {
                    let digits: Vec<usize> = moved.iter().map(|t| t.unwrap()).collect();
                    out.sectors[n][flat_index(modes, &digits)] = value;
                } else if value != ZERO {
                    truncated = true;
                }
            }
        }
        Ok(Boosted { vector: out, truncated })
    }

    /// Antiunitary reflection `J`: complex conjugation of every sector.
    pub fn apply_reflection(&self, psi: &FockVector) -> Result<FockVector> {
        self.check(psi)?;
        Ok(psi.conj())
    }

    /// `φ(f) = a†(f⁺) + a(conj f⁻)`.
    pub fn field(&self, fd: &TestFunctionData, psi: &FockVector) -> Result<FockVector> {
        let created = self.create(fd.fplus(), psi)?;
        let annihilated = self.annihilate(&fd.fminus().conj(), psi)?;
        Ok(&created + &annihilated)
    }

    /// Random symmetric vector with entries uniform in the unit square,
    /// supported on sectors `0..=max_sector`.
    pub fn random_vector<R: Rng + ?Sized>(&self, rng: &mut R, max_sector: usize) -> FockVector {
        random_symmetric(self.modes(), self.truncation, max_sector, rng)
    }
}

pub(crate) fn random_symmetric<R: Rng + ?Sized>(
    modes: usize,
    truncation: usize,
    max_sector: usize,
    rng: &mut R,
) -> FockVector {
    let mut out = FockVector::zeros(modes, truncation);
    for n in 0..=truncation.min(max_sector) {
        let mut odo = Odometer::new(modes, n);
        let mut flat = 0;
        let mut sorted = vec![0; n];
        while odo.advance() {
            let d = odo.digits();
            sorted.copy_from_slice(d);
            sorted.sort_unstable();
            let value = if sorted == d {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                out.sectors[n][flat_index(modes, &sorted)]
            };
            out.sectors[n][flat] = value;
            flat += 1;
        }
    }
    out
}

/// JSON form of a [`FockVector`]: only index-sorted tuples are stored, in
/// lexicographic (row-major) order, as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FockVectorJson {
    pub modes: usize,
    pub truncation: usize,
    pub index_order: String,
    pub sectors: Vec<Vec<[f64; 2]>>,
}

pub const SORTED_INDEX_ORDER: &str = "row-major-sorted";

impl From<&FockVector> for FockVectorJson {
    fn from(v: &FockVector) -> Self {
        let sectors = v
            .sectors
            .iter()
            .enumerate()
            .map(|(n, s)| {
                (0..v.modes)
                    .combinations_with_replacement(n)
                    .map(|idx| {
                        let z = s[flat_index(v.modes, &idx)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        FockVectorJson {
            modes: v.modes,
            truncation: v.truncation(),
            index_order: SORTED_INDEX_ORDER.to_string(),
            sectors,
        }
    }
}

impl TryFrom<&FockVectorJson> for FockVector {
    type Error = Error;

    fn try_from(json: &FockVectorJson) -> Result<Self> {
        if json.index_order != SORTED_INDEX_ORDER {
            return Err(Error::Malformed(format!("unsupported index order {:?}", json.index_order)));
        }
        if json.sectors.len() != json.truncation + 1 {
            return Err(Error::Malformed("sector count does not match truncation".into()));
        }
        let mut out = FockVector::zeros(json.modes, json.truncation);
        for (n, stored) in json.sectors.iter().enumerate() {
            let tuples: Vec<Vec<usize>> = (0..json.modes).combinations_with_replacement(n).collect();
            if tuples.len() != stored.len() {
                return Err(Error::Malformed(format!("sector {n} has {} entries", stored.len())));
            }
            for (idx, &[re, im]) in tuples.iter().zip(stored) {
                for perm in idx.iter().copied().permutations(n).unique() {
                    out.sectors[n][flat_index(json.modes, &perm)] = Complex64::new(re, im);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(n: usize) -> FockSpace {
        FockSpace::new(MomentumGrid::rapidity_range(1.0, -0.9, 0.9, 4).unwrap(), n).unwrap()
    }

    fn random_one(rng: &mut ChaCha8Rng, modes: usize) -> OneParticleVector {
        OneParticleVector::new(
            (0..modes).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        )
    }

    #[test]
    fn vacuum_normalization_and_positivity() {
        let s = space(3);
        let omega = s.vacuum();
        assert_eq!(s.inner(&omega, &omega).unwrap(), ONE);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = s.random_vector(&mut rng, 3);
        let ip = s.inner(&v, &v).unwrap();
        assert!(ip.re > 0.0 && ip.im.abs() < 1e-12);
    }

    #[test]
    fn one_particle_states_pair_by_weighted_inner_product() {
        let s = space(3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let xi = random_one(&mut rng, 4);
        let eta = random_one(&mut rng, 4);
        let a = s.create(&xi, &s.vacuum()).unwrap();
        let b = s.create(&eta, &s.vacuum()).unwrap();
        // sector 1 of a†(ξ)Ω is ξ itself
        assert_eq!(a.sector(1), xi.values());
        let direct: Complex64 = (0..4).map(|k| xi.values()[k].conj() * eta.values()[k] * 0.6).sum();
        assert!((s.inner(&a, &b).unwrap() - direct).norm() < 1e-14);
        let back = s.annihilate(&xi, &b).unwrap();
        assert!((back.sector(0)[0] - direct).norm() < 1e-14);
        assert!(back.sectors()[1..].iter().flatten().all(|z| *z == ZERO));
    }

    #[test]
    fn vacuum_is_annihilated() {
        let s = space(2);
        let xi = OneParticleVector::basis(4, 1);
        assert_eq!(s.annihilate(&xi, &s.vacuum()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn symmetrize_examples() {
        let m = 3;
        let mut t = vec![ZERO; 9];
        t[1] = ONE; // e_0 ⊗ e_1
        let s = symmetrize(m, 2, &t);
        assert_eq!(s[1], Complex64::new(0.5, 0.0));
        assert_eq!(s[3], Complex64::new(0.5, 0.0));
        assert_eq!(s.iter().filter(|z| **z != ZERO).count(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let raw: Vec<Complex64> = (0..27).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let once = symmetrize(m, 3, &raw);
        let twice = symmetrize(m, 3, &once);
        assert!(once.iter().zip(&twice).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn create_matches_literal_symmetrization() {
        let s = space(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let xi = random_one(&mut rng, 4);
        let psi = s.random_vector(&mut rng, 2);
        let created = s.create(&xi, &psi).unwrap();
        for n in 1..=3 {
            let lower = psi.sector(n - 1);
            let mut raw = Vec::with_capacity(4usize.pow(n as u32));
            for &x in xi.values() {
                raw.extend(lower.iter().map(|&z| x * z));
            }
            let expected: Vec<Complex64> =
                symmetrize(4, n, &raw).iter().map(|z| z * (n as f64).sqrt()).collect();
            for (a, b) in created.sector(n).iter().zip(&expected) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn ccr_below_truncation() {
        let s = space(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xi = random_one(&mut rng, 4);
        let eta = random_one(&mut rng, 4);
        let contraction = s.one_particle_inner(&xi, &eta).unwrap();
        // exact up to sector N - 1, not just N - 2
        for top in [2, 3] {
            let psi = s.random_vector(&mut rng, top);
            let ab = s.annihilate(&xi, &s.create(&eta, &psi).unwrap()).unwrap();
            let ba = s.create(&eta, &s.annihilate(&xi, &psi).unwrap()).unwrap();
            let defect = &(&ab - &ba) - &(&psi * contraction);
            assert!(defect.max_abs() < 1e-12, "top = {top}: {}", defect.max_abs());
        }
        // fails in the top sector, where creation overflows
        let psi = s.random_vector(&mut rng, 4);
        let ab = s.annihilate(&xi, &s.create(&eta, &psi).unwrap()).unwrap();
        let ba = s.create(&eta, &s.annihilate(&xi, &psi).unwrap()).unwrap();
        assert!((&(&ab - &ba) - &(&psi * contraction)).max_abs() > 1e-3);
    }

    #[test]
    fn exponential_vectors() {
        let s = space(3);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert_eq!(s.exponential_vector(&OneParticleVector::zeros(4)).unwrap(), s.vacuum());
        let xi = random_one(&mut rng, 4);
        let eta = random_one(&mut rng, 4);
        let e_xi = s.exponential_vector(&xi).unwrap();
        let e_eta = s.exponential_vector(&eta).unwrap();
        let c = s.one_particle_inner(&xi, &eta).unwrap();
        let closed = ONE + c + c * c / 2.0 + c * c * c / 6.0;
        assert!((s.inner(&e_xi, &e_eta).unwrap() - closed).norm() < 1e-12);
        let x = xi.values();
        assert!((e_xi.sector(2)[4 + 2] - x[1] * x[2] / 2f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn translations_and_reflection() {
        let s = space(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let psi = s.random_vector(&mut rng, 3);
        assert_eq!(s.apply_translation((0.0, 0.0), &psi).unwrap(), psi);
        let moved = s.apply_translation((0.7, -1.3), &psi).unwrap();
        assert!((s.norm(&moved).unwrap() - s.norm(&psi).unwrap()).abs() < 1e-12);
        assert_eq!(s.apply_translation((0.7, -1.3), &s.vacuum()).unwrap(), s.vacuum());
        let one = s.create(&OneParticleVector::basis(4, 2), &s.vacuum()).unwrap();
        let shifted = s.apply_translation((0.7, -1.3), &one).unwrap();
        let p = s.grid().points()[2];
        let phase = Complex64::from_polar(1.0, 0.7 * s.grid().omega(2) + 1.3 * p);
        assert!((shifted.sector(1)[2] - phase).norm() < 1e-15);

        let phi = s.random_vector(&mut rng, 3);
        let j_psi = s.apply_reflection(&psi).unwrap();
        let j_phi = s.apply_reflection(&phi).unwrap();
        assert!((s.inner(&j_psi, &j_phi).unwrap() - s.inner(&psi, &phi).unwrap().conj()).norm() < 1e-12);
        assert_eq!(s.apply_reflection(&j_psi).unwrap(), psi);
        let i = Complex64::new(0.0, 1.0);
        let lhs = s.apply_reflection(&(&psi * i)).unwrap();
        assert!(lhs.max_abs_diff(&(&j_psi * (-i))) < 1e-15);
    }

    #[test]
    fn boosts_shift_indices() {
        let grid = MomentumGrid::rapidity_range(1.0, -1.25, 1.25, 6).unwrap();
        let s = FockSpace::new(grid, 3).unwrap();
        let e2 = s.create(&OneParticleVector::basis(6, 2), &s.vacuum()).unwrap();
        let boosted = s.apply_boost(1, &e2).unwrap();
        assert!(!boosted.truncated);
        assert_eq!(boosted.vector.sector(1)[3], ONE);
        assert_eq!(s.apply_boost(0, &e2).unwrap().vector, e2);
        assert_eq!(s.apply_boost(2, &s.vacuum()).unwrap().vector, s.vacuum());
        let e5 = s.create(&OneParticleVector::basis(6, 5), &s.vacuum()).unwrap();
        assert!(s.apply_boost(1, &e5).unwrap().truncated);
        let arbitrary = FockSpace::new(MomentumGrid::arbitrary(1.0, vec![-1.0, 2.0]).unwrap(), 2).unwrap();
        assert!(arbitrary.apply_boost(1, &arbitrary.vacuum()).is_err());
    }

    #[test]
    fn field_on_vacuum_and_zero_data() {
        let s = space(3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_one(&mut rng, 4);
        let fd = TestFunctionData::real(f.clone());
        let out = s.field(&fd, &s.vacuum()).unwrap();
        assert_eq!(out.sector(1), f.values());
        assert_eq!(out.top_sector(), Some(1));
        assert_eq!(out.sector(0)[0], ZERO);
        let zero = TestFunctionData::real(OneParticleVector::zeros(4));
        let psi = s.random_vector(&mut rng, 3);
        assert_eq!(s.field(&zero, &psi).unwrap().max_abs(), 0.0);
        assert!(TestFunctionData::new(f.clone(), f.clone(), true).is_err() || f.conj() == f);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let s = space(3);
        let other = FockVector::vacuum(5, 3);
        assert!(matches!(s.inner(&other, &other), Err(Error::GridMismatch { .. })));
        assert!(s.annihilate(&OneParticleVector::zeros(3), &s.vacuum()).is_err());
    }

    #[test]
    fn sorted_json_roundtrip() {
        let s = space(3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = s.random_vector(&mut rng, 3);
        let json = FockVectorJson::from(&psi);
        assert_eq!(json.sectors[2].len(), 10);
        let text = serde_json::to_string(&json).unwrap();
        let back: FockVectorJson = serde_json::from_str(&text).unwrap();
        assert_eq!(FockVector::try_from(&back).unwrap(), psi);
    }
}
