//! Deformed creation/annihilation operators built from a root `R`.
//!
//! The two-point kernel `R_m(p, q)` dresses the annihilator with one factor
//! per remaining particle. Coincident momenta (a vanishing kernel argument)
//! give the factor `1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector, OneParticleVector, TestFunctionData};
use crate::grid::{omega, MomentumGrid};
use crate::inner_function::{Root, TOLERANCE};
use crate::table::PairTable;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `p ∧_m q = ½(ω_m(q) p − ω_m(p) q)`.
pub fn wedge_invariant(p: f64, q: f64, mass: f64) -> f64 {
    0.5 * (omega(mass, q) * p - omega(mass, p) * q)
}

/// Argument fed to `R` by the kernel, `None` where the kernel is `1`
/// regardless of the root.
pub fn kernel_argument(mass: f64, p: f64, q: f64) -> Result<Option<f64>> {
    if p == 0.0 || q == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let t = if mass > 0.0 {
        wedge_invariant(p, q, mass)
    } else if p > 0.0 && q < 0.0 {
        -p * q
    } else if p < 0.0 && q > 0.0 {
        p * q
    } else {
        0.0
    };
    Ok((t != 0.0).then_some(t))
}

/// Root `R`, mass and, for `m = 0`, the optional same-sign roots `R1`, `R2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub struct KernelSpec {
    root: Root,
    mass: f64,
    r1: Option<Root>,
    r2: Option<Root>,
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    #[serde(rename = "R")]
    root: Root,
    mass: f64,
    #[serde(rename = "R1", default)]
    r1: Option<Root>,
    #[serde(rename = "R2", default)]
    r2: Option<Root>,
}

impl TryFrom<KernelRepr> for KernelSpec {
    type Error = Error;

    fn try_from(repr: KernelRepr) -> Result<Self> {
        KernelSpec::with_extras(repr.root, repr.mass, repr.r1, repr.r2)
    }
}

impl From<KernelSpec> for KernelRepr {
    fn from(spec: KernelSpec) -> Self {
        KernelRepr { root: spec.root, mass: spec.mass, r1: spec.r1, r2: spec.r2 }
    }
}

/// Sample points for the `conj R_k(t) = R_k(1/t)` check.
fn inversion_samples() -> Vec<f64> {
    (-40..=40)
        .filter(|&k| k != 0)
        .flat_map(|k| {
            let t = (k as f64 * 0.11).exp();
            [t, -t]
        })
        .collect()
}

impl KernelSpec {
    pub fn new(root: Root, mass: f64) -> Result<Self> {
        KernelSpec::with_extras(root, mass, None, None)
    }

    pub fn with_extras(root: Root, mass: f64, r1: Option<Root>, r2: Option<Root>) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidKernel(format!("mass must be finite and nonnegative, got {mass}")));
        }
        if mass > 0.0 && (r1.is_some() || r2.is_some()) {
            return Err(Error::InvalidKernel("R1 and R2 are only defined for m = 0".into()));
        }
        for (name, extra) in [("R1", &r1), ("R2", &r2)] {
            if let Some(r) = extra {
                for t in inversion_samples() {
                    let deviation = (r.eval(t)?.conj() - r.eval(1.0 / t)?).norm();
                    if deviation > TOLERANCE {
                        return Err(Error::InvalidKernel(format!(
                            "{name} violates conj R(t) = R(1/t) at t = {t} by {deviation:e}"
                        )));
                    }
                }
            }
        }
        Ok(KernelSpec { root, mass, r1, r2 })
    }

    pub fn root(&self) -> &Root {
        &self.root
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn r1(&self) -> Option<&Root> {
        self.r1.as_ref()
    }

    pub fn r2(&self) -> Option<&Root> {
        self.r2.as_ref()
    }

    pub fn has_extras(&self) -> bool {
        self.r1.is_some() || self.r2.is_some()
    }

    /// `R_m(p, q)`.
    pub fn eval(&self, p: f64, q: f64) -> Result<Complex64> {
        if let Some(t) = kernel_argument(self.mass, p, q)? {
            return self.root.eval(t);
        }
        match (&self.r1, &self.r2) {
            (Some(r1), _) if self.mass == 0.0 && p > 0.0 && q > 0.0 => r1.eval(p / q),
            (_, Some(r2)) if self.mass == 0.0 && p < 0.0 && q < 0.0 => r2.eval(-p / q),
            _ => Ok(ONE),
        }
    }

    /// Kernel evaluated over all ordered pairs of grid points.
    pub fn table(&self, grid: &MomentumGrid) -> Result<PairTable> {
        if grid.mass() != self.mass {
            return Err(Error::GridMismatch {
                expected: format!("mass {}", self.mass),
                found: format!("grid of mass {}", grid.mass()),
            });
        }
        PairTable::from_fn(grid.points(), grid.points(), |p, q| self.eval(p, q))
    }
}

pub fn kernel(spec: &KernelSpec, p: f64, q: f64) -> Result<Complex64> {
    spec.eval(p, q)
}

/// `max |R_m(q,p) R_m(p,q) − 1|` over the sampled pairs.
pub fn kernel_symmetry_check(spec: &KernelSpec, samples: &[(f64, f64)]) -> Result<f64> {
    samples.iter().try_fold(0.0f64, |worst, &(p, q)| {
        Ok(worst.max((spec.eval(q, p)? * spec.eval(p, q)? - 1.0).norm()))
    })
}

/// `max |R_m(Λp, Λq) − R_m(p, q)|` over `(p, q, rapidity)` triples.
pub fn kernel_boost_deviation(spec: &KernelSpec, triples: &[(f64, f64, f64)]) -> Result<f64> {
    let m = spec.mass();
    triples.iter().try_fold(0.0f64, |worst, &(p, q, lambda)| {
        let moved = spec.eval(
            crate::grid::boost_momentum(m, p, lambda),
            crate::grid::boost_momentum(m, q, lambda),
        )?;
        Ok(worst.max((moved - spec.eval(p, q)?).norm()))
    })
}

/// The two realizations of the sharp-momentum twist `Ŝ_{R,m}(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharpTwistVariant {
    /// `Π_{i<j} R(p_i∧p + p_j∧p)`
    #[default]
    PairwiseSum,
    /// `Π_{i<j} R(sgn(max(p_i,p_j) − p)·|p_i∧p_j|)`, `sgn(0) = −1`
    SignSplit,
}

impl SharpTwistVariant {
    pub const ALL: [SharpTwistVariant; 2] = [SharpTwistVariant::PairwiseSum, SharpTwistVariant::SignSplit];

    pub fn name(self) -> &'static str {
        match self {
            SharpTwistVariant::PairwiseSum => "pairwise-sum",
            SharpTwistVariant::SignSplit => "sign-split",
        }
    }
}

fn sgn_zero_negative(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn eval_or_one(root: &Root, t: f64) -> Result<Complex64> {
    if t == 0.0 {
        Ok(ONE)
    } else {
        root.eval(t)
    }
}

/// Pair factor of the sign-split twist; `conjugated` gives the form with the
/// overall complex conjugate, which implements `R̄` instead of `R`.
pub(crate) fn sign_split_factor(root: &Root, mass: f64, a: f64, b: f64, p: f64, conjugated: bool) -> Result<Complex64> {
    let t = sgn_zero_negative(a.max(b) - p) * wedge_invariant(a, b, mass).abs();
    let value = eval_or_one(root, t)?;
    Ok(if conjugated { value.conj() } else { value })
}

/// Deformed operators for one kernel on one Fock space.
#[derive(Debug, Clone)]
pub struct DeformedFields<'a> {
    space: &'a FockSpace,
    spec: KernelSpec,
    table: PairTable,
}

impl<'a> DeformedFields<'a> {
    pub fn new(space: &'a FockSpace, spec: KernelSpec) -> Result<Self> {
        let table = spec.table(space.grid())?;
        Ok(DeformedFields { space, spec, table })
    }

    pub fn space(&self) -> &FockSpace {
        self.space
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn table(&self) -> &PairTable {
        &self.table
    }

    /// `T_{R,m}(p)`: sector `n` times `Π_i R_m(p, p_{k_i})`.
    pub fn apply_t(&self, p: f64, psi: &FockVector) -> Result<FockVector> {
        let factors = self
            .space
            .grid()
            .points()
            .iter()
            .map(|&q| self.spec.eval(p, q))
            .collect::<Result<Vec<_>>>()?;
        self.space.multiply_modes(psi, &factors)
    }

    /// `a_R(ξ)`.
    pub fn annihilate(&self, xi: &OneParticleVector, psi: &FockVector) -> Result<FockVector> {
        self.space.annihilate_with(xi, psi, Some(&self.table))
    }

    /// `a†_R(ξ) = a_R(ξ)*`.
    pub fn create(&self, xi: &OneParticleVector, psi: &FockVector) -> Result<FockVector> {
        self.space.create_with(xi, psi, Some(&self.table))
    }

    /// `φ_{R,m}(f) = a†_R(f⁺) + a_R(conj f⁻)`.
    pub fn field(&self, fd: &TestFunctionData, psi: &FockVector) -> Result<FockVector> {
        let created = self.create(fd.fplus(), psi)?;
        let annihilated = self.annihilate(&fd.fminus().conj(), psi)?;
        Ok(&created + &annihilated)
    }

    /// `a_R(p_s)` at the grid point with index `s`.
    pub fn annihilate_at(&self, s: usize, psi: &FockVector) -> Result<FockVector> {
        self.space.annihilate_at_with(s, psi, Some(&self.table))
    }

    /// Pair table of `Ŝ_{R,m}(p_s)`. Only the root `R` enters.
    pub fn sharp_twist_table(&self, variant: SharpTwistVariant, s: usize) -> Result<PairTable> {
        if self.spec.has_extras() {
            return Err(Error::InvalidKernel("sharp-momentum twists take no R1, R2".into()));
        }
        let grid = self.space.grid();
        let p = *grid.points().get(s).ok_or_else(|| Error::GridMismatch {
            expected: grid.describe(),
            found: format!("momentum index {s}"),
        })?;
        let (root, m) = (self.spec.root(), self.spec.mass());
        PairTable::from_fn(grid.points(), grid.points(), |a, b| match variant {
            SharpTwistVariant::PairwiseSum => {
                eval_or_one(root, wedge_invariant(a, p, m) + wedge_invariant(b, p, m))
            }
            SharpTwistVariant::SignSplit => sign_split_factor(root, m, a, b, p, false),
        })
    }

    pub fn sharp_twist(&self, variant: SharpTwistVariant, s: usize, psi: &FockVector) -> Result<FockVector> {
        self.space.multiply_pairs(psi, &self.sharp_twist_table(variant, s)?, false)
    }

    pub fn sharp_twist_adjoint(&self, variant: SharpTwistVariant, s: usize, psi: &FockVector) -> Result<FockVector> {
        self.space.multiply_pairs(psi, &self.sharp_twist_table(variant, s)?.conj(), false)
    }
}

/// Table of `r_m` over the grid, checked to be `±1`.
pub fn sign_root_table(space: &FockSpace, r: &Root, tol: f64) -> Result<PairTable> {
    let grid = space.grid();
    let m = grid.mass();
    for &p in grid.points() {
        for &q in grid.points() {
            if let Some(t) = kernel_argument(m, p, q)? {
                let deviation = (r.eval(t)?.powi(2) - 1.0).norm();
                if deviation > tol {
                    return Err(Error::NotRootOfUnity { t, deviation });
                }
            }
        }
    }
    KernelSpec::new(r.clone(), m)?.table(grid)
}

/// `Y_r`: sector `n` times `Π_{i<j} r_m(p_{k_i}, p_{k_j})` for a root `r` of `1`.
pub fn apply_y(space: &FockSpace, r: &Root, psi: &FockVector) -> Result<FockVector> {
    let table = sign_root_table(space, r, TOLERANCE)?;
    space.multiply_pairs(psi, &table, false)
}

/// `Y` built from an explicit `±1` pair table.
pub fn apply_y_table(space: &FockSpace, table: &PairTable, psi: &FockVector) -> Result<FockVector> {
    if let Some(bad) = table.values().iter().find(|v| (v.powi(2) - 1.0).norm() > TOLERANCE) {
        return Err(Error::NotRootOfUnity { t: f64::NAN, deviation: (bad.powi(2) - 1.0).norm() });
    }
    space.multiply_pairs(psi, table, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{max_abs_deviation, operator_matrix};
    use crate::inner_function::{make_root, BlaschkeSpec, FlipSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zero_i_root() -> Root {
        make_root(&BlaschkeSpec::new(vec![Complex64::new(0.0, 1.0)], 1.0).unwrap(), FlipSet::empty())
    }

    fn two_pair_root() -> Root {
        let spec = BlaschkeSpec::symmetric(&[Complex64::new(0.7, 1.3), Complex64::new(1.9, 0.4)], -1.0).unwrap();
        make_root(&spec, FlipSet::empty())
    }

    fn massive_space() -> FockSpace {
        FockSpace::new(MomentumGrid::rapidity_range(1.0, -1.25, 1.25, 6).unwrap(), 3).unwrap()
    }

    fn random_one(rng: &mut ChaCha8Rng, modes: usize) -> OneParticleVector {
        OneParticleVector::new(
            (0..modes).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        )
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge_invariant(1.3, 1.3, 1.0), 0.0);
        assert_eq!(wedge_invariant(2.0, -3.0, 0.0), 6.0);
        let (p, q, l) = (0.4, -1.7, 0.9);
        let moved = wedge_invariant(
            crate::grid::boost_momentum(1.0, p, l),
            crate::grid::boost_momentum(1.0, q, l),
            1.0,
        );
        assert!((moved - wedge_invariant(p, q, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn kernel_examples() {
        let r = zero_i_root();
        let massless = KernelSpec::new(r.clone(), 0.0).unwrap();
        assert_eq!(massless.eval(2.0, 3.0).unwrap(), ONE);
        assert_eq!(massless.eval(2.0, -3.0).unwrap(), r.eval(6.0).unwrap());
        assert_eq!(massless.eval(-3.0, 2.0).unwrap(), r.eval(-6.0).unwrap());
        let massive = KernelSpec::new(r.clone(), 1.0).unwrap();
        let expected = r.eval(2f64.sqrt()).unwrap();
        assert!((massive.eval(1.0, -1.0).unwrap() - expected).norm() < 1e-15);
        assert!(massless.eval(0.0, 1.0).is_err());
        let trivial = KernelSpec::new(Root::identity(), 1.0).unwrap();
        assert_eq!(trivial.eval(0.3, -2.0).unwrap(), ONE);
    }

    #[test]
    fn massless_kernel_is_wedge_kernel() {
        let r = two_pair_root();
        let spec = KernelSpec::new(r.clone(), 0.0).unwrap();
        for (p, q) in [(0.5, -2.0), (-1.0, 0.25), (1.5, 3.0), (-2.0, -0.5)] {
            let w = wedge_invariant(p, q, 0.0);
            let via_wedge = if w == 0.0 { ONE } else { r.eval(w).unwrap() };
            assert!((spec.eval(p, q).unwrap() - via_wedge).norm() < 1e-14);
        }
    }

    #[test]
    fn extras_validation() {
        let inverted = FlipSet::mirrored(&[(0.5, 2.0)]).unwrap();
        let r1 = make_root(&BlaschkeSpec::trivial(), inverted);
        let spec = KernelSpec::with_extras(zero_i_root(), 0.0, Some(r1.clone()), None).unwrap();
        assert_eq!(spec.eval(1.0, 1.0).unwrap(), -ONE);
        assert_eq!(spec.eval(1.0, 3.0).unwrap(), ONE);
        assert_eq!(spec.eval(-1.0, -1.0).unwrap(), ONE);
        let samples: Vec<(f64, f64)> = vec![(0.7, 1.1), (-0.3, -2.0), (4.0, -0.2), (1.0, 1.0)];
        assert!(kernel_symmetry_check(&spec, &samples).unwrap() < 1e-14);
        assert!(KernelSpec::with_extras(zero_i_root(), 1.0, Some(r1), None).is_err());
        assert!(KernelSpec::with_extras(zero_i_root(), 0.0, Some(zero_i_root()), None).is_err());
        assert!(KernelSpec::new(zero_i_root(), -1.0).is_err());
    }

    #[test]
    fn kernel_json_shape() {
        let spec = KernelSpec::new(zero_i_root(), 1.0).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"R":{"zeros":[[0.0,1.0]],"sign":1.0,"flips":[]},"mass":1.0,"R1":null,"R2":null}"#);
        let back: KernelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let minimal: KernelSpec = serde_json::from_str(r#"{"R":{"zeros":[]},"mass":0.0}"#).unwrap();
        assert!(minimal.root().is_identity());
        assert!(serde_json::from_str::<KernelSpec>(r#"{"R":{},"mass":2.0,"R1":{}}"#).is_err());
        assert_eq!(serde_json::to_string(&SharpTwistVariant::SignSplit).unwrap(), "\"sign-split\"");
    }

    #[test]
    fn identity_root_reduces_to_free_operators() {
        let space = massive_space();
        let ops = DeformedFields::new(&space, KernelSpec::new(Root::identity(), 1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = space.random_vector(&mut rng, 3);
        let xi = random_one(&mut rng, 6);
        assert_eq!(ops.annihilate(&xi, &psi).unwrap(), space.annihilate(&xi, &psi).unwrap());
        assert_eq!(ops.create(&xi, &psi).unwrap(), space.create(&xi, &psi).unwrap());
        assert_eq!(ops.apply_t(0.4, &psi).unwrap(), psi);
        for variant in SharpTwistVariant::ALL {
            assert_eq!(ops.sharp_twist(variant, 2, &psi).unwrap(), psi);
        }
    }

    #[test]
    fn vacuum_actions() {
        let space = massive_space();
        let ops = DeformedFields::new(&space, KernelSpec::new(two_pair_root(), 1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let xi = random_one(&mut rng, 6);
        let omega = space.vacuum();
        assert_eq!(ops.annihilate(&xi, &omega).unwrap().max_abs(), 0.0);
        assert_eq!(ops.create(&xi, &omega).unwrap().sector(1), xi.values());
        let fd = TestFunctionData::real(xi.clone());
        assert_eq!(ops.field(&fd, &omega).unwrap().sector(1), xi.values());
        assert_eq!(ops.apply_t(0.3, &omega).unwrap(), omega);
    }

    #[test]
    fn apply_t_one_particle_sector() {
        let space = massive_space();
        let spec = KernelSpec::new(two_pair_root(), 1.0).unwrap();
        let ops = DeformedFields::new(&space, spec.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let psi = space.random_vector(&mut rng, 3);
        let out = ops.apply_t(0.8, &psi).unwrap();
        for (k, &q) in space.grid().points().iter().enumerate() {
            assert!((out.sector(1)[k] - psi.sector(1)[k] * spec.eval(0.8, q).unwrap()).norm() < 1e-15);
        }
        assert!((space.norm(&out).unwrap() - space.norm(&psi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn deformed_annihilator_is_sum_over_sharp_momenta() {
        let space = massive_space();
        let ops = DeformedFields::new(&space, KernelSpec::new(two_pair_root(), 1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let xi = random_one(&mut rng, 6);
        let direct = operator_matrix(&space, |v| ops.annihilate(&xi, v)).unwrap();
        let composed = operator_matrix(&space, |v| {
            let mut acc = space.zero();
            for (s, &p) in space.grid().points().iter().enumerate() {
                let c = xi.values()[s].conj() * space.grid().weights()[s];
                let term = space.annihilate_at(s, &ops.apply_t(p, v)?)?;
                acc = &acc + &(&term * c);
            }
            Ok(acc)
        })
        .unwrap();
        assert!(max_abs_deviation(&direct, &composed) < 1e-12);
    }

    #[test]
    fn deformed_creator_is_adjoint() {
        let space = FockSpace::new(MomentumGrid::rapidity_range(1.0, -0.9, 0.9, 4).unwrap(), 3).unwrap();
        let ops = DeformedFields::new(&space, KernelSpec::new(two_pair_root(), 1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let xi = random_one(&mut rng, 4);
        let a = operator_matrix(&space, |v| ops.annihilate(&xi, v)).unwrap();
        let c = operator_matrix(&space, |v| ops.create(&xi, v)).unwrap();
        assert!(max_abs_deviation(&a.adjoint(), &c) < 1e-12);
        let fd = TestFunctionData::real(xi);
        let f = operator_matrix(&space, |v| ops.field(&fd, v)).unwrap();
        assert!(max_abs_deviation(&f.adjoint(), &f) < 1e-12);
    }

    #[test]
    fn y_conjugation_multiplies_roots() {
        let space = massive_space();
        let r2 = two_pair_root();
        let r = make_root(&BlaschkeSpec::trivial(), FlipSet::mirrored(&[(0.3, 0.9)]).unwrap());
        let r1 = r2.times_sign_root(&r).unwrap();
        let ops1 = DeformedFields::new(&space, KernelSpec::new(r1, 1.0).unwrap()).unwrap();
        let ops2 = DeformedFields::new(&space, KernelSpec::new(r2, 1.0).unwrap()).unwrap();
        assert_ne!(ops1.table(), ops2.table());
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let xi = random_one(&mut rng, 6);
        let lhs = operator_matrix(&space, |v| apply_y(&space, &r, &ops2.annihilate(&xi, &apply_y(&space, &r, v)?)?))
            .unwrap();
        let rhs = operator_matrix(&space, |v| ops1.annihilate(&xi, v)).unwrap();
        assert!(max_abs_deviation(&lhs, &rhs) < 1e-12);
        assert_eq!(apply_y(&space, &r, &space.vacuum()).unwrap(), space.vacuum());
        assert!(matches!(apply_y(&space, &two_pair_root(), &space.vacuum()), Err(Error::NotRootOfUnity { .. })));
    }

    fn sharp_conjugation_deviation(ops: &DeformedFields, variant: SharpTwistVariant, s: usize) -> f64 {
        let space = ops.space();
        let lhs = operator_matrix(space, |v| {
            ops.sharp_twist(variant, s, &space.annihilate_at(s, &ops.sharp_twist_adjoint(variant, s, v)?)?)
        })
        .unwrap();
        let rhs = operator_matrix(space, |v| ops.annihilate_at(s, v)).unwrap();
        max_abs_deviation(&lhs, &rhs)
    }

    #[test]
    fn sharp_twists_conjugate_to_deformed_annihilator() {
        for mass in [0.0, 1.0] {
            let grid = if mass > 0.0 {
                MomentumGrid::rapidity_range(1.0, -1.25, 1.25, 6).unwrap()
            } else {
                MomentumGrid::geometric(0.5, 2f64.ln(), 3, 3).unwrap()
            };
            let space = FockSpace::new(grid, 3).unwrap();
            let ops = DeformedFields::new(&space, KernelSpec::new(two_pair_root(), mass).unwrap()).unwrap();
            for variant in SharpTwistVariant::ALL {
                for s in 0..space.modes() {
                    let dev = sharp_conjugation_deviation(&ops, variant, s);
                    assert!(dev < 1e-12, "m = {mass}, {variant:?}, s = {s}: {dev}");
                }
            }
        }
    }

    #[test]
    fn conjugated_sign_split_implements_inverse_root() {
        let space = massive_space();
        let root = two_pair_root();
        let ops = DeformedFields::new(&space, KernelSpec::new(root.clone(), 1.0).unwrap()).unwrap();
        let s = 2;
        let p = space.grid().points()[s];
        let printed = PairTable::from_fn(space.grid().points(), space.grid().points(), |a, b| {
            sign_split_factor(&root, 1.0, a, b, p, true)
        })
        .unwrap();
        let lhs = operator_matrix(&space, |v| {
            let inner = space.multiply_pairs(v, &printed.conj(), false)?;
            space.multiply_pairs(&space.annihilate_at(s, &inner)?, &printed, false)
        })
        .unwrap();
        let deformed = operator_matrix(&space, |v| ops.annihilate_at(s, v)).unwrap();
        assert!(max_abs_deviation(&lhs, &deformed) > 1e-3);
        let conj_table = ops.table().conj();
        let expected = operator_matrix(&space, |v| space.annihilate_at_with(s, v, Some(&conj_table))).unwrap();
        assert!(max_abs_deviation(&lhs, &expected) < 1e-12);
    }

    #[test]
    fn sharp_variants_differ_as_operators() {
        let space = massive_space();
        let ops = DeformedFields::new(&space, KernelSpec::new(two_pair_root(), 1.0).unwrap()).unwrap();
        let a = ops.sharp_twist_table(SharpTwistVariant::PairwiseSum, 1).unwrap();
        let b = ops.sharp_twist_table(SharpTwistVariant::SignSplit, 1).unwrap();
        let diff = a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
        assert!(diff > 1e-3);
    }
}
