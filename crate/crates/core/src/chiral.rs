//! Chiral splitting of the massless Fock space.
//!
//! A massless grid splits into its positive and negative halves. Vectors of
//! `𝓗⁺ ⊗ 𝓗⁻` are [`BiFockVector`]s whose component `(n, n')` holds `n`
//! positive and `n'` negative momenta, row-major with the positive indices
//! first. The unitary `V` identifies them with ordinary [`FockVector`]s over
//! the union grid.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::deform::{DeformedFields, KernelSpec};
use crate::dense::{max_abs_deviation, operator_matrix, SymmetricBasis};
use crate::error::{Error, Result};
use crate::fock::{flat_index, symmetrize, FockSpace, FockVector, Odometer, OneParticleVector, TestFunctionData};
use crate::grid::{boost_momentum, Layout, MomentumGrid};
use crate::inner_function::Root;
use crate::table::PairTable;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

/// `R₀⁺(p, q)`: `R(−pq)` for `p > 0 > q`, else `1`.
pub fn kernel_r0_plus(root: &Root, p: f64, q: f64) -> Result<Complex64> {
    if p == 0.0 || q == 0.0 {
        return Err(Error::ZeroArgument);
    }
    if p > 0.0 && q < 0.0 {
        root.eval(-p * q)
    } else {
        Ok(ONE)
    }
}

/// `max |R(−(e^{−λ}p)(e^{λ}q)) − R(−pq)|` over `(p, q, λ)` with `p > 0 > q`.
pub fn twist_boost_deviation(root: &Root, triples: &[(f64, f64, f64)]) -> Result<f64> {
    triples.iter().try_fold(0.0f64, |worst, &(p, q, lambda)| {
        let moved = kernel_r0_plus(root, boost_momentum(0.0, p, lambda), boost_momentum(0.0, q, lambda))?;
        Ok(worst.max((moved - kernel_r0_plus(root, p, q)?).norm()))
    })
}

/// Positive and negative halves of a massless geometric grid.
#[derive(Debug, Clone)]
pub struct ChiralGridPair {
    union: MomentumGrid,
    plus: MomentumGrid,
    minus: MomentumGrid,
    plus_index: Vec<usize>,
    minus_index: Vec<usize>,
}

impl ChiralGridPair {
    pub fn new(union: MomentumGrid) -> Result<Self> {
        if union.mass() != 0.0 || !matches!(union.layout(), Layout::Geometric { .. }) {
            return Err(Error::InvalidGrid("chiral splitting needs a massless geometric grid".into()));
        }
        let split = |positive: bool| -> Vec<usize> {
            (0..union.len()).filter(|&k| (union.points()[k] > 0.0) == positive).collect()
        };
        let (plus_index, minus_index) = (split(true), split(false));
        if plus_index.is_empty() || minus_index.is_empty() {
            return Err(Error::InvalidGrid("chiral splitting needs points of both signs".into()));
        }
        Ok(ChiralGridPair { plus: union.half(true)?, minus: union.half(false)?, union, plus_index, minus_index })
    }

    pub fn union(&self) -> &MomentumGrid {
        &self.union
    }

    pub fn plus(&self) -> &MomentumGrid {
        &self.plus
    }

    pub fn minus(&self) -> &MomentumGrid {
        &self.minus
    }

    pub fn half(&self, side: Side) -> &MomentumGrid {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    /// Union-grid index of each point of one half.
    pub fn embedding(&self, side: Side) -> &[usize] {
        match side {
            Side::Plus => &self.plus_index,
            Side::Minus => &self.minus_index,
        }
    }

    /// The half carrying the support of `v`, `None` for `v = 0`.
    pub fn support(&self, v: &OneParticleVector) -> Result<Option<Side>> {
        let touches = |side: Side| self.embedding(side).iter().any(|&k| v.values()[k] != ZERO);
        match (touches(Side::Plus), touches(Side::Minus)) {
            (true, true) => Err(Error::Support("vector has support on both half-lines".into())),
            (true, false) => Ok(Some(Side::Plus)),
            (false, true) => Ok(Some(Side::Minus)),
            (false, false) => Ok(None),
        }
    }

    /// Restriction of a union-grid vector to one half; fails if it has
    /// support on the other half.
    pub fn restrict(&self, v: &OneParticleVector, side: Side) -> Result<OneParticleVector> {
        if v.len() != self.union.len() {
            return Err(Error::GridMismatch {
                expected: self.union.describe(),
                found: format!("one-particle vector of length {}", v.len()),
            });
        }
        let other = match side {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        };
        if self.embedding(other).iter().any(|&k| v.values()[k] != ZERO) {
            return Err(Error::Support(format!("vector is not supported on the {} half", side.name())));
        }
        Ok(OneParticleVector::new(self.embedding(side).iter().map(|&k| v.values()[k]).collect()))
    }

    /// `ι_±`: extension by zero to the union grid.
    pub fn embed(&self, v: &OneParticleVector, side: Side) -> OneParticleVector {
        let mut out = vec![ZERO; self.union.len()];
        for (&k, &z) in self.embedding(side).iter().zip(v.values()) {
            out[k] = z;
        }
        OneParticleVector::new(out)
    }
}

/// A vector of `𝓗⁺ ⊗ 𝓗⁻` truncated at `n + n' ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiFockVector {
    plus_modes: usize,
    minus_modes: usize,
    truncation: usize,
    /// `components[n][n']` for `n + n' ≤ N`
    components: Vec<Vec<Vec<Complex64>>>,
}

impl BiFockVector {
    pub fn zeros(plus_modes: usize, minus_modes: usize, truncation: usize) -> Self {
        let components = (0..=truncation)
            .map(|n| {
                (0..=truncation - n)
                    .map(|m| vec![ZERO; plus_modes.pow(n as u32) * minus_modes.pow(m as u32)])
                    .collect()
            })
            .collect();
        BiFockVector { plus_modes, minus_modes, truncation, components }
    }

    pub fn plus_modes(&self) -> usize {
        self.plus_modes
    }

    pub fn minus_modes(&self) -> usize {
        self.minus_modes
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn component(&self, n: usize, m: usize) -> &[Complex64] {
        &self.components[n][m]
    }

    pub fn component_mut(&mut self, n: usize, m: usize) -> &mut [Complex64] {
        &mut self.components[n][m]
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().flatten().flatten().fold(0.0, |a, z| a.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &BiFockVector) -> f64 {
        self.components
            .iter()
            .flatten()
            .flatten()
            .zip(other.components.iter().flatten().flatten())
            .fold(0.0, |a, (x, y)| a.max((x - y).norm()))
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> BiFockVector {
        let mut out = self.clone();
        out.components.iter_mut().flatten().flatten().for_each(|z| *z = f(*z));
        out
    }

    pub fn conj(&self) -> BiFockVector {
        self.map(|z| z.conj())
    }

    pub fn scaled(&self, c: Complex64) -> BiFockVector {
        self.map(|z| z * c)
    }

    pub fn add(&self, other: &BiFockVector) -> BiFockVector {
        let mut out = self.clone();
        out.components
            .iter_mut()
            .flatten()
            .flatten()
            .zip(other.components.iter().flatten().flatten())
            .for_each(|(a, b)| *a += b);
        out
    }

    /// Exchanges the two factors (and the index order inside each component).
    fn swapped(&self) -> BiFockVector {
        let mut out = BiFockVector::zeros(self.minus_modes, self.plus_modes, self.truncation);
        for n in 0..=self.truncation {
            for m in 0..=self.truncation - n {
                let stride = self.minus_modes.pow(m as u32);
                let plus_count = self.plus_modes.pow(n as u32);
                for fp in 0..plus_count {
                    for fm in 0..stride {
                        out.components[m][n][fm * plus_count + fp] = self.components[n][m][fp * stride + fm];
                    }
                }
            }
        }
        out
    }
}

/// JSON form of a [`BiFockVector`]: full row-major components keyed `"n,n'"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiFockVectorJson {
    pub plus_modes: usize,
    pub minus_modes: usize,
    pub truncation: usize,
    pub components: BTreeMap<String, Vec<[f64; 2]>>,
}

impl From<&BiFockVector> for BiFockVectorJson {
    fn from(v: &BiFockVector) -> Self {
        let mut components = BTreeMap::new();
        for (n, row) in v.components.iter().enumerate() {
            for (m, comp) in row.iter().enumerate() {
                components.insert(format!("{n},{m}"), comp.iter().map(|z| [z.re, z.im]).collect());
            }
        }
        BiFockVectorJson {
            plus_modes: v.plus_modes,
            minus_modes: v.minus_modes,
            truncation: v.truncation,
            components,
        }
    }
}

impl TryFrom<&BiFockVectorJson> for BiFockVector {
    type Error = Error;

    fn try_from(json: &BiFockVectorJson) -> Result<Self> {
        let mut out = BiFockVector::zeros(json.plus_modes, json.minus_modes, json.truncation);
        for (key, values) in &json.components {
            let parsed: Option<(usize, usize)> = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
            let (n, m) = parsed.ok_or_else(|| Error::Malformed(format!("bad component key {key:?}")))?;
            if n + m > json.truncation || values.len() != out.components[n][m].len() {
                return Err(Error::Malformed(format!("component {key} does not fit")));
            }
            for (slot, &[re, im]) in out.components[n][m].iter_mut().zip(values) {
                *slot = Complex64::new(re, im);
            }
        }
        Ok(out)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Max deviations of an operator identity on random vectors and as dense matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub random: f64,
    pub dense: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        self.random.max(self.dense)
    }
}

/// Checks `lhs = rhs` on `samples` random vectors and on the full basis.
pub fn compare_operators<R: Rng + ?Sized>(
    space: &FockSpace,
    lhs: impl Fn(&FockVector) -> Result<FockVector>,
    rhs: impl Fn(&FockVector) -> Result<FockVector>,
    rng: &mut R,
    samples: usize,
) -> Result<IdentityReport> {
    let mut random: f64 = 0.0;
    for _ in 0..samples {
        let v = space.random_vector(rng, space.truncation());
        random = random.max(lhs(&v)?.max_abs_diff(&rhs(&v)?));
    }
    let dense = max_abs_deviation(&operator_matrix(space, &lhs)?, &operator_matrix(space, &rhs)?);
    Ok(IdentityReport { random, dense })
}

/// Truncated spaces `𝓗`, `𝓗⁺`, `𝓗⁻` over a [`ChiralGridPair`].
#[derive(Debug, Clone)]
pub struct ChiralSpace {
    pair: ChiralGridPair,
    union: FockSpace,
    plus: FockSpace,
    minus: FockSpace,
}

impl ChiralSpace {
    pub fn new(union: MomentumGrid, truncation: usize) -> Result<Self> {
        let pair = ChiralGridPair::new(union)?;
        Ok(ChiralSpace {
            union: FockSpace::new(pair.union().clone(), truncation)?,
            plus: FockSpace::new(pair.plus().clone(), truncation)?,
            minus: FockSpace::new(pair.minus().clone(), truncation)?,
            pair,
        })
    }

    pub fn pair(&self) -> &ChiralGridPair {
        &self.pair
    }

    /// The massless Fock space over the union grid.
    pub fn union(&self) -> &FockSpace {
        &self.union
    }

    pub fn half(&self, side: Side) -> &FockSpace {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    pub fn truncation(&self) -> usize {
        self.union.truncation()
    }

    fn modes(&self) -> (usize, usize) {
        (self.plus.modes(), self.minus.modes())
    }

    pub fn zero_bi(&self) -> BiFockVector {
        BiFockVector::zeros(self.plus.modes(), self.minus.modes(), self.truncation())
    }

    /// `Ω₊ ⊗ Ω₋`.
    pub fn vacuum_bi(&self) -> BiFockVector {
        let mut v = self.zero_bi();
        v.components[0][0][0] = ONE;
        v
    }

    fn check_bi(&self, v: &BiFockVector) -> Result<()> {
        let (mp, mm) = self.modes();
        if (v.plus_modes, v.minus_modes, v.truncation) != (mp, mm, self.truncation()) {
            return Err(Error::GridMismatch {
                expected: format!("{mp}+{mm} modes, N = {}", self.truncation()),
                found: format!("{}+{} modes, N = {}", v.plus_modes, v.minus_modes, v.truncation),
            });
        }
        Ok(())
    }

    /// Calls `f(n, n', plus digits, minus digits, flat)` for every entry.
    fn for_each_entry(&self, mut f: impl FnMut(usize, usize, &[usize], &[usize], usize)) {
        let (mp, mm) = self.modes();
        let top = self.truncation();
        for n in 0..=top {
            for m in 0..=top - n {
                let mut plus = Odometer::new(mp, n);
                let mut flat = 0;
                while plus.advance() {
                    let mut minus = Odometer::new(mm, m);
                    while minus.advance() {
                        f(n, m, plus.digits(), minus.digits(), flat);
                        flat += 1;
                    }
                }
            }
        }
    }

    pub fn inner_bi(&self, a: &BiFockVector, b: &BiFockVector) -> Result<Complex64> {
        self.check_bi(a)?;
        self.check_bi(b)?;
        let (wp, wm) = (self.plus.grid().weights(), self.minus.grid().weights());
        let mut acc = ZERO;
        self.for_each_entry(|n, m, kp, km, flat| {
            let w: f64 = kp.iter().map(|&k| wp[k]).product::<f64>() * km.iter().map(|&k| wm[k]).product::<f64>();
            acc += a.components[n][m][flat].conj() * b.components[n][m][flat] * w;
        });
        Ok(acc)
    }

    /// `ψ ⊗ φ` truncated at total particle number `N`.
    pub fn tensor_product(&self, plus: &FockVector, minus: &FockVector) -> Result<BiFockVector> {
        self.plus.check(plus)?;
        self.minus.check(minus)?;
        let mut out = self.zero_bi();
        let (_, mm) = self.modes();
        self.for_each_entry(|n, m, _, _, flat| {
            let stride = mm.pow(m as u32);
            out.components[n][m][flat] = plus.sector(n)[flat / stride] * minus.sector(m)[flat % stride];
        });
        Ok(out)
    }

    /// `(pq) ↦ R(−pq)` over positive × negative points.
    pub fn twist_table(&self, root: &Root) -> Result<PairTable> {
        self.twist_table_from(|t| root.eval(t))
    }

    /// `(pq) ↦ f(−pq)` over positive × negative points, e.g. `f = φ` for `S_{R²}`.
    pub fn twist_table_from(&self, mut f: impl FnMut(f64) -> Result<Complex64>) -> Result<PairTable> {
        PairTable::from_fn(self.plus.grid().points(), self.minus.grid().points(), |p, q| f(-p * q))
    }

    /// Component `(n, n')` times `Π_{i,j} t(p_i, q_j)`.
    pub fn apply_s_table(&self, table: &PairTable, xi: &BiFockVector) -> Result<BiFockVector> {
        self.check_bi(xi)?;
        let mut out = xi.clone();
        self.for_each_entry(|n, m, kp, km, flat| {
            if n > 0 && m > 0 {
                let factor: Complex64 =
                    kp.iter().flat_map(|&a| km.iter().map(move |&b| (a, b))).map(|(a, b)| table.get(a, b)).product();
                out.components[n][m][flat] *= factor;
            }
        });
        Ok(out)
    }

    /// `S_R`.
    pub fn apply_s(&self, root: &Root, xi: &BiFockVector) -> Result<BiFockVector> {
        self.apply_s_table(&self.twist_table(root)?, xi)
    }

    /// `S_R*`.
    pub fn apply_s_adjoint(&self, root: &Root, xi: &BiFockVector) -> Result<BiFockVector> {
        self.apply_s_table(&self.twist_table(root)?.conj(), xi)
    }

    /// `[VΞ]_n = Σ_k binom(n,k)^{1/2} Symm_n(ι Ξ_{k,n−k})`.
    pub fn apply_v(&self, xi: &BiFockVector) -> Result<FockVector> {
        self.check_bi(xi)?;
        let modes = self.union.modes();
        let (iota_p, iota_m) = (self.pair.embedding(Side::Plus), self.pair.embedding(Side::Minus));
        let mut out = self.union.zero();
        let mut embedded: Vec<Vec<Complex64>> =
            (0..=self.truncation()).map(|n| vec![ZERO; modes.pow(n as u32)]).collect();
        let mut digits = Vec::with_capacity(self.truncation());
        for k in 0..=self.truncation() {
            for tensor in embedded.iter_mut() {
                tensor.iter_mut().for_each(|z| *z = ZERO);
            }
            self.for_each_entry(|n, m, kp, km, flat| {
                if n == k {
                    digits.clear();
                    digits.extend(kp.iter().map(|&d| iota_p[d]));
                    digits.extend(km.iter().map(|&d| iota_m[d]));
                    embedded[n + m][flat_index(modes, &digits)] = xi.components[n][m][flat];
                }
            });
            for (total, tensor) in embedded.iter().enumerate().skip(k) {
                let scale = binomial(total, k).sqrt();
                let sym = symmetrize(modes, total, tensor);
                for (slot, z) in out.sector_mut(total).iter_mut().zip(sym) {
                    *slot += z * scale;
                }
            }
        }
        Ok(out)
    }

    /// `V*`: `Ξ_{c,n−c}(p, q) = binom(n,c)^{1/2} Ψ_n(ι₊p, ι₋q)`.
    pub fn apply_v_inverse(&self, psi: &FockVector) -> Result<BiFockVector> {
        self.union.check(psi)?;
        let modes = self.union.modes();
        let (iota_p, iota_m) = (self.pair.embedding(Side::Plus), self.pair.embedding(Side::Minus));
        let mut out = self.zero_bi();
        let mut digits = Vec::with_capacity(self.truncation());
        self.for_each_entry(|n, m, kp, km, flat| {
            digits.clear();
            digits.extend(kp.iter().map(|&d| iota_p[d]));
            digits.extend(km.iter().map(|&d| iota_m[d]));
            out.components[n][m][flat] = psi.sector(n + m)[flat_index(modes, &digits)] * binomial(n + m, n).sqrt();
        });
        Ok(out)
    }

    /// `R₀⁺` over the union grid.
    pub fn shat_table(&self, root: &Root) -> Result<PairTable> {
        let points = self.union.grid().points();
        PairTable::from_fn(points, points, |p, q| kernel_r0_plus(root, p, q))
    }

    /// `R₀⁺`-shaped table built from `f(−pq)`, e.g. `f = φ` for `Ŝ_{R²}`.
    pub fn shat_table_from(&self, mut f: impl FnMut(f64) -> Result<Complex64>) -> Result<PairTable> {
        let points = self.union.grid().points();
        PairTable::from_fn(points, points, |p, q| if p > 0.0 && q < 0.0 { f(-p * q) } else { Ok(ONE) })
    }

    /// Sector `n` times `Π_{i,j} t(p_{k_i}, p_{k_j})`.
    pub fn apply_shat_table(&self, table: &PairTable, psi: &FockVector) -> Result<FockVector> {
        self.union.multiply_pairs(psi, table, true)
    }

    /// `Ŝ_R`.
    pub fn apply_shat(&self, root: &Root, psi: &FockVector) -> Result<FockVector> {
        self.apply_shat_table(&self.shat_table(root)?, psi)
    }

    /// `Ŝ_R*`.
    pub fn apply_shat_adjoint(&self, root: &Root, psi: &FockVector) -> Result<FockVector> {
        self.apply_shat_table(&self.shat_table(root)?.conj(), psi)
    }

    fn check_half(&self, side: Side, g: &OneParticleVector) -> Result<()> {
        self.half(side).check_one(g)
    }

    /// `a₊(g) ⊗ 1` or `1 ⊗ a₋(g)`, antilinear in `g`.
    pub fn annihilate(&self, side: Side, g: &OneParticleVector, xi: &BiFockVector) -> Result<BiFockVector> {
        self.check_bi(xi)?;
        self.check_half(side, g)?;
        match side {
            Side::Plus => Ok(self.annihilate_plus(g, xi)),
            Side::Minus => Ok(self.annihilate_plus_on(&self.minus, g, &xi.swapped()).swapped()),
        }
    }

    /// `a₊†(g) ⊗ 1` or `1 ⊗ a₋†(g)`.
    pub fn create(&self, side: Side, g: &OneParticleVector, xi: &BiFockVector) -> Result<BiFockVector> {
        self.check_bi(xi)?;
        self.check_half(side, g)?;
        match side {
            Side::Plus => Ok(self.create_plus_on(self.plus.modes(), g, xi)),
            Side::Minus => Ok(self.create_plus_on(self.minus.modes(), g, &xi.swapped()).swapped()),
        }
    }

    fn annihilate_plus(&self, g: &OneParticleVector, xi: &BiFockVector) -> BiFockVector {
        self.annihilate_plus_on(&self.plus, g, xi)
    }

    /// Annihilator on the first factor of `xi`, whose modes are those of `first`.
    fn annihilate_plus_on(&self, first: &FockSpace, g: &OneParticleVector, xi: &BiFockVector) -> BiFockVector {
        let coeffs: Vec<Complex64> =
            g.values().iter().zip(first.grid().weights()).map(|(x, w)| x.conj() * w).collect();
        let (a, b, top) = (xi.plus_modes, xi.minus_modes, xi.truncation);
        let mut out = BiFockVector::zeros(a, b, top);
        for n in 0..top {
            for m in 0..top - n {
                let block = a.pow(n as u32) * b.pow(m as u32);
                let scale = ((n + 1) as f64).sqrt();
                let upper = &xi.components[n + 1][m];
                for (flat, slot) in out.components[n][m].iter_mut().enumerate() {
                    let acc: Complex64 = coeffs.iter().enumerate().map(|(q, c)| c * upper[q * block + flat]).sum();
                    *slot = acc * scale;
                }
            }
        }
        out
    }

    /// Creator on the first factor of `xi` (with `modes` first-factor modes).
    fn create_plus_on(&self, modes: usize, g: &OneParticleVector, xi: &BiFockVector) -> BiFockVector {
        let (a, b, top) = (xi.plus_modes, xi.minus_modes, xi.truncation);
        debug_assert_eq!(a, modes);
        let mut out = BiFockVector::zeros(a, b, top);
        let mut rest = Vec::with_capacity(top);
        for n in 1..=top {
            for m in 0..=top - n {
                let stride = b.pow(m as u32);
                let scale = 1.0 / (n as f64).sqrt();
                let lower = &xi.components[n - 1][m];
                let mut plus = Odometer::new(a, n);
                let mut fp = 0;
                while plus.advance() {
                    let digits = plus.digits();
                    for fm in 0..stride {
                        let mut acc = ZERO;
                        for i in 0..n {
                            rest.clear();
                            rest.extend(digits.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &d)| d));
                            acc += g.values()[digits[i]] * lower[flat_index(a, &rest) * stride + fm];
                        }
                        out.components[n][m][fp * stride + fm] = acc * scale;
                    }
                    fp += 1;
                }
            }
        }
        out
    }

    /// `φ_{0,±}(f) = a†_±(f⁺) + a_±(conj f⁻)` for data on one half-grid.
    pub fn chiral_field(&self, side: Side, fd: &TestFunctionData, xi: &BiFockVector) -> Result<BiFockVector> {
        let created = self.create(side, fd.fplus(), xi)?;
        let annihilated = self.annihilate(side, &fd.fminus().conj(), xi)?;
        Ok(created.add(&annihilated))
    }

    /// Boost by `shift` grid steps applied to both factors.
    pub fn apply_boost_bi(&self, shift: i64, xi: &BiFockVector) -> Result<(BiFockVector, bool)> {
        self.check_bi(xi)?;
        let targets = |space: &FockSpace| -> Result<Vec<Option<usize>>> {
            (0..space.modes()).map(|k| space.grid().boost_target(k, shift)).collect()
        };
        let (tp, tm) = (targets(&self.plus)?, targets(&self.minus)?);
        let (mp, mm) = self.modes();
        let mut out = self.zero_bi();
        let mut truncated = false;
        self.for_each_entry(|n, m, kp, km, flat| {
            let value = xi.components[n][m][flat];
            let moved_p: Option<Vec<usize>> = kp.iter().map(|&k| tp[k]).collect();
            let moved_m: Option<Vec<usize>> = km.iter().map(|&k| tm[k]).collect();
            match (moved_p, moved_m) {
                (Some(p), Some(q)) => {
                    let target = flat_index(mp, &p) * mm.pow(m as u32) + flat_index(mm, &q);
                    out.components[n][m][target] = value;
                }
                _ => truncated |= value != ZERO,
            }
        });
        Ok((out, truncated))
    }

    /// Random vector of `𝓗⁺ ⊗ 𝓗⁻`, symmetric in each factor.
    pub fn random_bi<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BiFockVector> {
        self.apply_v_inverse(&self.union.random_vector(rng, self.truncation()))
    }

    /// Orthonormal basis of the truncated `𝓗⁺ ⊗ 𝓗⁻`.
    pub fn bi_basis(&self) -> Vec<BiFockVector> {
        let (plus, minus) = (SymmetricBasis::new(&self.plus), SymmetricBasis::new(&self.minus));
        let mut out = Vec::new();
        for a in 0..plus.len() {
            let va = plus.vector(a);
            let na = va.top_sector().unwrap_or(0);
            for b in 0..minus.len() {
                let vb = minus.vector(b);
                if na + vb.top_sector().unwrap_or(0) <= self.truncation() {
                    out.push(self.tensor_product(&va, &vb).expect("basis vectors fit the space"));
                }
            }
        }
        out
    }

    /// Deformed operators of the massless kernel with root `R` on the union space.
    pub fn deformed(&self, root: &Root) -> Result<DeformedFields<'_>> {
        DeformedFields::new(&self.union, KernelSpec::new(root.clone(), 0.0)?)
    }

    /// `V S_R* (a₊(ψ)⊗1) S_R V*` or `V S_R (1⊗a₋(ψ)) S_R* V*`, by the side of `ψ`.
    pub fn twisted_annihilate(&self, root: &Root, psi: &OneParticleVector, v: &FockVector) -> Result<FockVector> {
        let side = self.pair.support(psi)?.unwrap_or(Side::Plus);
        let g = self.pair.restrict(psi, side)?;
        let table = self.twist_table(root)?;
        let (before, after) = twist_order(side, &table);
        let xi = self.apply_s_table(&before, &self.apply_v_inverse(v)?)?;
        let moved = self.annihilate(side, &g, &xi)?;
        self.apply_v(&self.apply_s_table(&after, &moved)?)
    }

    /// The chiral field of one-sided data conjugated through `S_R` and `V`.
    pub fn twisted_field(&self, root: &Root, fd: &TestFunctionData, v: &FockVector) -> Result<FockVector> {
        let side = self.field_side(fd)?;
        let half = TestFunctionData::new(
            self.pair.restrict(fd.fplus(), side)?,
            self.pair.restrict(fd.fminus(), side)?,
            fd.is_real(),
        )?;
        let table = self.twist_table(root)?;
        let (before, after) = twist_order(side, &table);
        let xi = self.apply_s_table(&before, &self.apply_v_inverse(v)?)?;
        let moved = self.chiral_field(side, &half, &xi)?;
        self.apply_v(&self.apply_s_table(&after, &moved)?)
    }

    fn field_side(&self, fd: &TestFunctionData) -> Result<Side> {
        if !fd.is_real() {
            return Err(Error::InvalidTestFunction("one-sided field identity needs real data".into()));
        }
        let plus = self.pair.support(fd.fplus())?;
        let minus = self.pair.support(fd.fminus())?;
        match (plus, minus) {
            (Some(a), Some(b)) if a != b => Err(Error::Support("f+ and f- live on different halves".into())),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => Ok(Side::Plus),
        }
    }

    /// `a_R(ψ)` against its chiral form, for `ψ` supported on one half-line.
    pub fn verify_main_relation<R: Rng + ?Sized>(
        &self,
        root: &Root,
        psi: &OneParticleVector,
        rng: &mut R,
        samples: usize,
    ) -> Result<IdentityReport> {
        let deformed = self.deformed(root)?;
        self.pair.support(psi)?;
        compare_operators(
            &self.union,
            |v| deformed.annihilate(psi, v),
            |v| self.twisted_annihilate(root, psi, v),
            rng,
            samples,
        )
    }

    /// `φ_{R,0}(f)` against the twisted chiral field, for one-sided real data.
    pub fn verify_field_equivalence<R: Rng + ?Sized>(
        &self,
        root: &Root,
        fd: &TestFunctionData,
        rng: &mut R,
        samples: usize,
    ) -> Result<IdentityReport> {
        let deformed = self.deformed(root)?;
        self.field_side(fd)?;
        compare_operators(
            &self.union,
            |v| deformed.field(fd, v),
            |v| self.twisted_field(root, fd, v),
            rng,
            samples,
        )
    }
}

/// Twist tables applied before and after the chiral operator.
fn twist_order(side: Side, table: &PairTable) -> (PairTable, PairTable) {
    match side {
        Side::Plus => (table.clone(), table.conj()),
        Side::Minus => (table.conj(), table.clone()),
    }
}
