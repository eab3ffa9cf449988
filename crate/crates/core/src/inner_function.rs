//! Symmetric inner functions on the upper half-plane, realized as finite
//! Blaschke products, together with their roots and the associated
//! scattering functions on the strip `0 <= Im ζ <= π`.
//!
//! A [`BlaschkeSpec`] evaluates `sign · Π (z - a_k)/(z - conj a_k)`. Its
//! boundary values are symmetric (`conj φ(t) = φ(t)⁻¹ = φ(-t)`) exactly when
//! the zero multiset is closed under `a ↦ -conj a`. A [`Root`] picks the
//! half-phase of `φ` that is continuous on `(0, ∞)`, reflects it to the
//! negative half-line by `R(-t) = conj R(t)` and multiplies by `-1` on a
//! symmetric set of flip intervals.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for identity checks in binary64 arithmetic.
pub const TOLERANCE: f64 = 1e-10;

/// Minimal distance to a pole of a Blaschke factor before evaluation is refused.
pub const POLE_EPSILON: f64 = 1e-8;

/// A finite Blaschke product with a `±1` prefactor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlaschkeRepr", into = "BlaschkeRepr")]
pub struct BlaschkeSpec {
    zeros: Vec<Complex64>,
    sign: f64,
}

#[derive(Serialize, Deserialize)]
struct BlaschkeRepr {
    #[serde(default)]
    zeros: Vec<[f64; 2]>,
    #[serde(default = "positive_sign")]
    sign: f64,
}

fn positive_sign() -> f64 {
    1.0
}

impl TryFrom<BlaschkeRepr> for BlaschkeSpec {
    type Error = Error;

    fn try_from(repr: BlaschkeRepr) -> Result<Self> {
        let zeros = repr
            .zeros
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        BlaschkeSpec::new(zeros, repr.sign)
    }
}

impl From<BlaschkeSpec> for BlaschkeRepr {
    fn from(spec: BlaschkeSpec) -> Self {
        BlaschkeRepr {
            zeros: spec.zeros.iter().map(|z| [z.re, z.im]).collect(),
            sign: spec.sign,
        }
    }
}

impl BlaschkeSpec {
    /// Zeros must lie in the open upper half-plane; the sign must be `±1`.
    ///
    /// The closure of the zero set under `a ↦ -conj a` is *not* enforced here,
    /// so that non-symmetric products can be built and rejected by
    /// [`check_symmetric_inner`].
    pub fn new(zeros: Vec<Complex64>, sign: f64) -> Result<Self> {
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidSign(sign));
        }
        if let Some(&bad) = zeros.iter().find(|z| !(z.im > 0.0) || !z.re.is_finite()) {
            return Err(Error::InvalidZero(bad));
        }
        Ok(BlaschkeSpec { zeros, sign })
    }

    /// The constant function `1`.
    pub fn trivial() -> Self {
        BlaschkeSpec { zeros: Vec::new(), sign: 1.0 }
    }

    /// Builds a symmetric product from one representative per zero pair.
    /// Zeros on the imaginary axis are their own partner and are added once.
    pub fn symmetric(representatives: &[Complex64], sign: f64) -> Result<Self> {
        let mut zeros = Vec::with_capacity(2 * representatives.len());
        for &a in representatives {
            zeros.push(a);
            if a.re != 0.0 {
                zeros.push(Complex64::new(-a.re, a.im));
            }
        }
        BlaschkeSpec::new(zeros, sign)
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn is_trivial(&self) -> bool {
        self.zeros.is_empty() && self.sign == 1.0
    }

    /// Whether the zero multiset is closed under `a ↦ -conj a`.
    pub fn has_symmetric_zeros(&self) -> bool {
        let mut unmatched: Vec<Complex64> = self.zeros.clone();
        while let Some(a) = unmatched.pop() {
            if a.re == 0.0 {
                continue;
            }
            let partner = Complex64::new(-a.re, a.im);
            match unmatched.iter().position(|&b| b == partner) {
                Some(pos) => {
                    unmatched.swap_remove(pos);
                }
                None => return false,
            }
        }
        true
    }

    /// Same inner function, compared as a multiset of zeros plus sign.
    pub fn same_function(&self, other: &BlaschkeSpec) -> bool {
        if self.sign != other.sign || self.zeros.len() != other.zeros.len() {
            return false;
        }
        let mut rest = other.zeros.clone();
        self.zeros.iter().all(|a| match rest.iter().position(|b| b == a) {
            Some(pos) => {
                rest.swap_remove(pos);
                true
            }
            None => false,
        })
    }

    /// `φ(z)` for `Im z >= 0`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        eval_inner(self, z)
    }

    /// Continuous phase `θ(t)` with `φ(t) = exp(iθ(t))` on the real line.
    pub fn boundary_phase(&self, t: f64) -> f64 {
        let mut theta = if self.sign < 0.0 { PI } else { 0.0 };
        for a in &self.zeros {
            // t - a lies in the lower half-plane, t - conj a in the upper one,
            // so both arguments are continuous in t.
            theta += (-a.im).atan2(t - a.re) - a.im.atan2(t - a.re);
        }
        theta
    }
}

/// Evaluates the Blaschke product at `z` in the closed upper half-plane.
pub fn eval_inner(spec: &BlaschkeSpec, z: Complex64) -> Result<Complex64> {
    if z.im < -1e-12 * z.norm().max(1.0) {
        return Err(Error::LowerHalfPlane(z));
    }
    let mut value = Complex64::new(spec.sign, 0.0);
    for &a in &spec.zeros {
        let pole = a.conj();
        let gap = z - pole;
        if gap.norm() < POLE_EPSILON {
            return Err(Error::PoleProximity { z, pole, eps: POLE_EPSILON });
        }
        value *= (z - a) / gap;
    }
    Ok(value)
}

/// Deviations of sampled boundary values from the symmetric-inner relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerReport {
    /// `max |conj φ(t) - φ(t)⁻¹|`
    pub conj_vs_inverse: f64,
    /// `max |φ(t)⁻¹ - φ(-t)|`
    pub inverse_vs_reflection: f64,
    /// `max ||φ(t)| - 1|`
    pub modulus: f64,
    pub pass: bool,
}

impl InnerReport {
    pub fn max_deviation(&self) -> f64 {
        self.conj_vs_inverse.max(self.inverse_vs_reflection).max(self.modulus)
    }
}

pub fn check_symmetric_inner(spec: &BlaschkeSpec, samples: &[f64], tol: f64) -> InnerReport {
    let mut report = InnerReport {
        conj_vs_inverse: 0.0,
        inverse_vs_reflection: 0.0,
        modulus: 0.0,
        pass: false,
    };
    for &t in samples {
        let (Ok(at), Ok(reflected)) = (
            eval_inner(spec, Complex64::new(t, 0.0)),
            eval_inner(spec, Complex64::new(-t, 0.0)),
        ) else {
            report.conj_vs_inverse = f64::INFINITY;
            continue;
        };
        let inverse = at.inv();
        report.conj_vs_inverse = report.conj_vs_inverse.max((at.conj() - inverse).norm());
        report.inverse_vs_reflection = report.inverse_vs_reflection.max((inverse - reflected).norm());
        report.modulus = report.modulus.max((at.norm() - 1.0).abs());
    }
    report.pass = !samples.is_empty() && report.max_deviation() <= tol;
    report
}

/// `S(ζ) = φ(sinh ζ)` on the closed strip.
pub fn scattering_from_inner(spec: &BlaschkeSpec, zeta: Complex64) -> Result<Complex64> {
    if zeta.im < 0.0 || zeta.im > PI {
        return Err(Error::OutsideStrip(zeta));
    }
    eval_inner(spec, zeta.sinh())
}

/// Which of the two continuous half-phases on `(0, ∞)` a root starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Principal,
    Opposite,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Principal => 1.0,
            Branch::Opposite => -1.0,
        }
    }

    fn flipped(self, flip: bool) -> Branch {
        match (self, flip) {
            (b, false) => b,
            (Branch::Principal, true) => Branch::Opposite,
            (Branch::Opposite, true) => Branch::Principal,
        }
    }
}

/// A finite union of open intervals, closed under `t ↦ -t`, normalized to
/// sorted disjoint form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlipSet {
    intervals: Vec<(f64, f64)>,
}

impl FlipSet {
    pub fn empty() -> Self {
        FlipSet::default()
    }

    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if a.is_nan() || b.is_nan() || a >= b {
                return Err(Error::InvalidFlip(format!("interval ({a}, {b}) is empty or malformed")));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for pair in intervals.windows(2) {
            if pair[1].0 < pair[0].1 {
                return Err(Error::InvalidFlip(format!(
                    "intervals ({}, {}) and ({}, {}) overlap",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        let mut mirrored: Vec<(f64, f64)> = intervals.iter().map(|&(a, b)| (-b, -a)).collect();
        mirrored.sort_by(|x, y| x.0.total_cmp(&y.0));
        if mirrored != intervals {
            return Err(Error::InvalidFlip("interval set is not symmetric under t -> -t".into()));
        }
        Ok(FlipSet { intervals })
    }

    /// Builds the symmetric set from intervals on the positive half-line.
    pub fn mirrored(positive: &[(f64, f64)]) -> Result<Self> {
        let mut all = Vec::with_capacity(2 * positive.len());
        for &(a, b) in positive {
            if a < 0.0 {
                return Err(Error::InvalidFlip(format!("({a}, {b}) is not on the positive half-line")));
            }
            all.push((a, b));
            all.push((-b, -a));
        }
        FlipSet::new(all)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a < t && t < b)
    }

    /// Symmetric difference, i.e. the flip set of the pointwise product of
    /// the two sign functions (up to the finitely many interval endpoints).
    pub fn symmetric_difference(&self, other: &FlipSet) -> FlipSet {
        let mut cuts: Vec<f64> = self
            .intervals
            .iter()
            .chain(&other.intervals)
            .flat_map(|&(a, b)| [a, b])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = if a.is_infinite() || b.is_infinite() {
                if a.is_infinite() { b - 1.0 } else { a + 1.0 }
            } else {
                0.5 * (a + b)
            };
            if self.contains(mid) != other.contains(mid) {
                match out.last_mut() {
                    Some(last) if last.1 == a => last.1 = b,
                    _ => out.push((a, b)),
                }
            }
        }
        FlipSet { intervals: out }
    }
}

/// A root `R` of a symmetric inner function: `R² = φ`, `R(-t) = conj R(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RootRepr", into = "RootRepr")]
pub struct Root {
    base: BlaschkeSpec,
    branch: Branch,
    flips: FlipSet,
}

#[derive(Serialize, Deserialize)]
struct RootRepr {
    #[serde(default)]
    zeros: Vec<[f64; 2]>,
    #[serde(default = "positive_sign")]
    sign: f64,
    #[serde(default)]
    flips: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "is_principal")]
    branch: Branch,
}

fn is_principal(branch: &Branch) -> bool {
    *branch == Branch::Principal
}

impl TryFrom<RootRepr> for Root {
    type Error = Error;

    fn try_from(repr: RootRepr) -> Result<Self> {
        let base = BlaschkeSpec::try_from(BlaschkeRepr { zeros: repr.zeros, sign: repr.sign })?;
        let flips = FlipSet::new(repr.flips.iter().map(|&[a, b]| (a, b)).collect())?;
        Ok(Root { base, branch: repr.branch, flips })
    }
}

impl From<Root> for RootRepr {
    fn from(root: Root) -> Self {
        let base = BlaschkeRepr::from(root.base);
        RootRepr {
            zeros: base.zeros,
            sign: base.sign,
            flips: root.flips.intervals.iter().map(|&(a, b)| [a, b]).collect(),
            branch: root.branch,
        }
    }
}

/// Root with the principal branch of `spec` and the given sign flips.
pub fn make_root(spec: &BlaschkeSpec, flips: FlipSet) -> Root {
    Root { base: spec.clone(), branch: Branch::Principal, flips }
}

/// `R(t)` for `t != 0`.
pub fn eval_root(root: &Root, t: f64) -> Result<Complex64> {
    root.eval(t)
}

impl Root {
    /// The constant root `R ≡ 1`.
    pub fn identity() -> Self {
        make_root(&BlaschkeSpec::trivial(), FlipSet::empty())
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn base(&self) -> &BlaschkeSpec {
        &self.base
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn flips(&self) -> &FlipSet {
        &self.flips
    }

    /// True for `R ≡ 1` (trivial base, principal branch, no flips).
    pub fn is_identity(&self) -> bool {
        self.base.is_trivial() && self.branch == Branch::Principal && self.flips.is_empty()
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        if t == 0.0 || t.is_nan() {
            return Err(Error::ZeroArgument);
        }
        let half = Complex64::from_polar(1.0, 0.5 * self.base.boundary_phase(t.abs()));
        let mut value = half * self.branch.sign();
        if self.flips.contains(t) {
            value = -value;
        }
        Ok(if t > 0.0 { value } else { value.conj() })
    }

    /// `r = self / other` as a root of `1`, available when both roots belong
    /// to the same Blaschke product.
    pub fn quotient(&self, other: &Root) -> Option<Root> {
        if !self.base.same_function(&other.base) {
            return None;
        }
        Some(Root {
            base: BlaschkeSpec::trivial(),
            branch: Branch::Principal.flipped(self.branch != other.branch),
            flips: self.flips.symmetric_difference(&other.flips),
        })
    }

    /// `r · self` for a root `r` of the trivial inner function.
    pub fn times_sign_root(&self, r: &Root) -> Option<Root> {
        if !r.base.is_trivial() {
            return None;
        }
        Some(Root {
            base: self.base.clone(),
            branch: self.branch.flipped(r.branch == Branch::Opposite),
            flips: self.flips.symmetric_difference(&r.flips),
        })
    }
}

/// Outcome of comparing two roots samplewise through `r = R1/R2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootRatioReport {
    pub is_root_of_unity: bool,
    /// `max min(|r(t) - 1|, |r(t) + 1|)`
    pub sign_deviation: f64,
    /// `max |r(-t) - r(t)|`
    pub reflection_deviation: f64,
}

pub fn root_ratio(r1: &Root, r2: &Root, samples: &[f64], tol: f64) -> Result<RootRatioReport> {
    let mut sign_deviation: f64 = 0.0;
    let mut reflection_deviation: f64 = 0.0;
    for &t in samples {
        let ratio = |s: f64| -> Result<Complex64> { Ok(r1.eval(s)? * r2.eval(s)?.conj()) };
        let here = ratio(t)?;
        let there = ratio(-t)?;
        let to_sign = (here - 1.0).norm().min((here + 1.0).norm());
        sign_deviation = sign_deviation.max(to_sign);
        reflection_deviation = reflection_deviation.max((there - here).norm());
    }
    Ok(RootRatioReport {
        is_root_of_unity: !samples.is_empty() && sign_deviation <= tol && reflection_deviation <= tol,
        sign_deviation,
        reflection_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_i() -> BlaschkeSpec {
        BlaschkeSpec::new(vec![c(0.0, 1.0)], 1.0).unwrap()
    }

    fn samples() -> Vec<f64> {
        (1..=200).map(|k| 0.05 * k as f64 - 5.025).collect()
    }

    #[test]
    fn eval_inner_examples() {
        let spec = single_i();
        assert!((eval_inner(&spec, c(0.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        // (1 - i)/(1 + i) computed independently
        let expected = c(1.0, -1.0) / c(1.0, 1.0);
        assert!((eval_inner(&spec, c(1.0, 0.0)).unwrap() - expected).norm() < 1e-15);
        assert!((expected - c(0.0, -1.0)).norm() < 1e-15);
        let trivial = BlaschkeSpec::trivial();
        assert_eq!(eval_inner(&trivial, c(3.0, 2.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn pole_proximity_and_half_plane() {
        let spec = single_i();
        assert!(matches!(
            eval_inner(&spec, c(0.0, -1.0)),
            Err(Error::LowerHalfPlane(_))
        ));
        let near = BlaschkeSpec::new(vec![c(0.0, 1e-9)], 1.0).unwrap();
        assert!(matches!(
            eval_inner(&near, c(0.0, 0.0)),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(BlaschkeSpec::new(vec![c(1.0, 0.0)], 1.0).is_err());
        assert!(BlaschkeSpec::new(vec![c(1.0, -1.0)], 1.0).is_err());
        assert!(BlaschkeSpec::new(vec![], 0.5).is_err());
    }

    #[test]
    fn symmetric_inner_checks() {
        let pass = check_symmetric_inner(&single_i(), &samples(), 1e-12);
        assert!(pass.pass, "{pass:?}");

        let lopsided = BlaschkeSpec::new(vec![c(1.0, 1.0)], 1.0).unwrap();
        assert!(!lopsided.has_symmetric_zeros());
        let fail = check_symmetric_inner(&lopsided, &[1.0], 1e-10);
        assert!(!fail.pass);
        // φ(1) = -1, φ(-1) = (3 + 4i)/5
        assert!((fail.inverse_vs_reflection - (c(-1.0, 0.0) - c(0.6, 0.8)).norm()).abs() < 1e-12);

        let minus_one = BlaschkeSpec::new(vec![], -1.0).unwrap();
        assert!(check_symmetric_inner(&minus_one, &samples(), 1e-12).pass);
        assert!(!check_symmetric_inner(&minus_one, &[], 1e-12).pass);
    }

    #[test]
    fn symmetric_constructor_pairs_zeros() {
        let spec = BlaschkeSpec::symmetric(&[c(0.5, 1.0), c(0.0, 2.0)], 1.0).unwrap();
        assert_eq!(spec.zeros().len(), 3);
        assert!(spec.has_symmetric_zeros());
    }

    #[test]
    fn trivial_roots_and_flips() {
        let one = Root::identity();
        assert_eq!(one.eval(3.7).unwrap(), c(1.0, 0.0));
        assert_eq!(one.eval(-3.7).unwrap(), c(1.0, 0.0));

        let flips = FlipSet::new(vec![(-2.0, -1.0), (1.0, 2.0)]).unwrap();
        let r = make_root(&BlaschkeSpec::trivial(), flips);
        assert_eq!(r.eval(1.5).unwrap(), c(-1.0, 0.0));
        assert_eq!(r.eval(-1.5).unwrap(), c(-1.0, 0.0));
        assert_eq!(r.eval(2.5).unwrap(), c(1.0, 0.0));
        assert_eq!(r.eval(0.5).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn invalid_flips() {
        assert!(FlipSet::new(vec![(1.0, 2.0)]).is_err());
        assert!(FlipSet::new(vec![(-2.0, -1.0), (1.0, 2.5)]).is_err());
        assert!(FlipSet::new(vec![(2.0, 1.0), (-1.0, -2.0)]).is_err());
        assert!(FlipSet::new(vec![(-3.0, 3.0), (1.0, 2.0), (-2.0, -1.0)]).is_err());
        assert!(FlipSet::new(vec![(-0.5, 0.5)]).is_ok());
    }

    #[test]
    fn root_of_single_zero_squares_to_phi() {
        let root = make_root(&single_i(), FlipSet::empty());
        let r1 = root.eval(1.0).unwrap();
        assert!((r1 * r1 - c(0.0, -1.0)).norm() < 1e-15);
        assert!((r1 - Complex64::from_polar(1.0, -PI / 4.0)).norm() < 1e-15);
        assert!(matches!(root.eval(0.0), Err(Error::ZeroArgument)));
    }

    #[test]
    fn root_invariants_with_sign_and_flips() {
        let spec = BlaschkeSpec::symmetric(&[c(0.7, 0.4), c(0.0, 1.3)], -1.0).unwrap();
        let flips = FlipSet::mirrored(&[(0.3, 0.9), (2.0, 4.0)]).unwrap();
        for root in [make_root(&spec, FlipSet::empty()), make_root(&spec, flips)] {
            for t in samples() {
                let r = root.eval(t).unwrap();
                let phi = spec.eval(c(t, 0.0)).unwrap();
                assert!((r * r - phi).norm() < 1e-12);
                assert!((root.eval(-t).unwrap() * r - 1.0).norm() < 1e-12);
                assert!((r.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn principal_branch_is_continuous_on_positive_axis() {
        let spec = BlaschkeSpec::symmetric(&[c(0.2, 0.05), c(1.5, 0.1)], 1.0).unwrap();
        let root = make_root(&spec, FlipSet::empty());
        let mut prev = root.eval(1e-3).unwrap();
        for k in 1..20_000 {
            let t = 1e-3 + k as f64 * 5e-4;
            let next = root.eval(t).unwrap();
            assert!((next - prev).norm() < 0.1, "jump at t = {t}");
            prev = next;
        }
    }

    #[test]
    fn scattering_function_boundary() {
        let spec = single_i();
        assert!((scattering_from_inner(&spec, c(0.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        let trivial = BlaschkeSpec::trivial();
        assert_eq!(scattering_from_inner(&trivial, c(0.3, 1.0)).unwrap(), c(1.0, 0.0));
        let sym = BlaschkeSpec::symmetric(&[c(0.4, 0.9)], 1.0).unwrap();
        for k in -20..=20 {
            let theta = 0.17 * k as f64;
            let s = scattering_from_inner(&sym, c(theta, 0.0)).unwrap();
            let crossed = scattering_from_inner(&sym, c(theta, PI)).unwrap();
            let reflected = scattering_from_inner(&sym, c(-theta, 0.0)).unwrap();
            assert!((crossed - reflected).norm() < 1e-12);
            assert!((s.conj() - s.inv()).norm() < 1e-12);
            assert!((s.inv() - reflected).norm() < 1e-12);
        }
        assert!(scattering_from_inner(&sym, c(0.0, 3.5)).is_err());
    }

    #[test]
    fn ratios_of_roots() {
        let spec = single_i();
        let plain = make_root(&spec, FlipSet::empty());
        let flipped = make_root(&spec, FlipSet::mirrored(&[(0.5, 1.5)]).unwrap());
        let t = samples();
        assert!(root_ratio(&plain, &plain, &t, 1e-10).unwrap().is_root_of_unity);
        assert!(root_ratio(&plain, &flipped, &t, 1e-10).unwrap().is_root_of_unity);
        let other = make_root(&BlaschkeSpec::new(vec![c(0.0, 2.0)], 1.0).unwrap(), FlipSet::empty());
        assert!(!root_ratio(&plain, &other, &t, 1e-10).unwrap().is_root_of_unity);
    }

    #[test]
    fn quotient_and_product_agree_pointwise() {
        let spec = BlaschkeSpec::symmetric(&[c(0.3, 0.8)], 1.0).unwrap();
        let a = make_root(&spec, FlipSet::mirrored(&[(0.5, 1.5), (3.0, 4.0)]).unwrap());
        let b = make_root(&spec, FlipSet::mirrored(&[(1.0, 2.0)]).unwrap()).with_branch(Branch::Opposite);
        let r = a.quotient(&b).unwrap();
        let back = b.times_sign_root(&r).unwrap();
        for t in samples() {
            let direct = a.eval(t).unwrap() / b.eval(t).unwrap();
            assert!((r.eval(t).unwrap() - direct).norm() < 1e-12, "t = {t}");
            assert!((back.eval(t).unwrap() - a.eval(t).unwrap()).norm() < 1e-12);
        }
        let other = make_root(&single_i(), FlipSet::empty());
        assert!(a.quotient(&other).is_none());
    }

    #[test]
    fn json_shape() {
        let root: Root = serde_json::from_str(
            r#"{"zeros": [[0.0, 1.0]], "sign": 1, "flips": [[-2.0, -1.0], [1.0, 2.0]]}"#,
        )
        .unwrap();
        assert_eq!(root.base(), &single_i());
        let text = serde_json::to_string(&root).unwrap();
        assert_eq!(text, r#"{"zeros":[[0.0,1.0]],"sign":1.0,"flips":[[-2.0,-1.0],[1.0,2.0]]}"#);
        assert!(serde_json::from_str::<Root>(r#"{"zeros": [], "flips": [[1.0, 2.0]]}"#).is_err());
        assert!(serde_json::from_str::<BlaschkeSpec>(r#"{"zeros": [[1.0, -1.0]]}"#).is_err());
    }
}
