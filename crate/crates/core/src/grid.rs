//! Finite momentum grids with weights approximating `dp/ω_m(p)`.
//!
//! Two layouts are adapted to boosts: rapidity-uniform grids for `m > 0`
//! (`p_k = m sinh(θ_0 + kΔθ)`) and geometric grids for `m = 0`, where `|p|`
//! runs over a geometric progression on each half-line. On both, a boost
//! by a multiple of the step is an index shift. Weights are the parameter
//! spacing times the Jacobian, which makes those shifts exactly unitary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ω_m(p) = (m² + p²)^{1/2}`.
pub fn omega(mass: f64, p: f64) -> f64 {
    mass.hypot(p)
}

/// The exact boost map `λp = -sinh λ · ω_m(p) + cosh λ · p`.
pub fn boost_momentum(mass: f64, p: f64, rapidity: f64) -> f64 {
    -rapidity.sinh() * omega(mass, p) + rapidity.cosh() * p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    /// `p_k = m sinh(theta0 + k·dtheta)`, `m > 0`.
    Rapidity { theta0: f64, dtheta: f64 },
    /// `m = 0`; `negative` points `-p0·e^{ℓ·dlambda}` followed by `positive`
    /// points `p0·e^{ℓ·dlambda}`, both for `ℓ = 0, 1, ...`.
    Geometric { p0: f64, dlambda: f64, negative: usize, positive: usize },
    Arbitrary,
}

impl Layout {
    pub fn tag(&self) -> &'static str {
        match self {
            Layout::Rapidity { .. } => "rapidity-uniform",
            Layout::Geometric { .. } => "geometric-per-halfline",
            Layout::Arbitrary => "arbitrary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct MomentumGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
    mass: f64,
    layout: Layout,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    mass: f64,
    layout: String,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl From<MomentumGrid> for GridRepr {
    fn from(grid: MomentumGrid) -> Self {
        GridRepr {
            mass: grid.mass,
            layout: grid.layout.tag().to_string(),
            points: grid.points,
            weights: grid.weights,
        }
    }
}

impl TryFrom<GridRepr> for MomentumGrid {
    type Error = Error;

    fn try_from(repr: GridRepr) -> Result<Self> {
        let layout = match repr.layout.as_str() {
            "rapidity-uniform" => infer_rapidity(repr.mass, &repr.points)?,
            "geometric-per-halfline" => infer_geometric(repr.mass, &repr.points)?,
            "arbitrary" => Layout::Arbitrary,
            other => return Err(Error::InvalidGrid(format!("unknown layout {other:?}"))),
        };
        MomentumGrid::from_parts(repr.mass, layout, repr.points, repr.weights)
    }
}

fn infer_rapidity(mass: f64, points: &[f64]) -> Result<Layout> {
    if mass <= 0.0 || points.len() < 2 {
        return Err(Error::InvalidGrid("rapidity layout needs m > 0 and two points".into()));
    }
    let thetas: Vec<f64> = points.iter().map(|p| (p / mass).asinh()).collect();
    let dtheta = (thetas[thetas.len() - 1] - thetas[0]) / (thetas.len() - 1) as f64;
    for (k, theta) in thetas.iter().enumerate() {
        if (theta - (thetas[0] + k as f64 * dtheta)).abs() > 1e-9 {
            return Err(Error::InvalidGrid("points are not rapidity-uniform".into()));
        }
    }
    Ok(Layout::Rapidity { theta0: thetas[0], dtheta })
}

fn infer_geometric(mass: f64, points: &[f64]) -> Result<Layout> {
    if mass != 0.0 {
        return Err(Error::InvalidGrid("geometric layout is for m = 0".into()));
    }
    let negative: Vec<f64> = points.iter().filter(|p| **p < 0.0).map(|p| -p).rev().collect();
    let positive: Vec<f64> = points.iter().filter(|p| **p > 0.0).copied().collect();
    let p0 = negative.first().or(positive.first()).copied();
    let (Some(p0), true) = (p0, negative.len() + positive.len() == points.len()) else {
        return Err(Error::InvalidGrid("geometric layout needs nonzero points".into()));
    };
    let longest = if negative.len() >= positive.len() { &negative } else { &positive };
    let dlambda = if longest.len() > 1 { (longest[1] / longest[0]).ln() } else { 1.0 };
    for half in [&negative, &positive] {
        for (level, p) in half.iter().enumerate() {
            let expected = p0 * (level as f64 * dlambda).exp();
            if (p - expected).abs() > 1e-9 * expected {
                return Err(Error::InvalidGrid("points are not geometric per half-line".into()));
            }
        }
    }
    Ok(Layout::Geometric { p0, dlambda, negative: negative.len(), positive: positive.len() })
}

impl MomentumGrid {
    /// `count` points `m sinh(theta0 + k·dtheta)` with weights `dtheta`.
    pub fn rapidity(mass: f64, theta0: f64, dtheta: f64, count: usize) -> Result<Self> {
        if !(mass > 0.0) || !(dtheta > 0.0) {
            return Err(Error::InvalidGrid("rapidity grids need m > 0 and dtheta > 0".into()));
        }
        let points = (0..count)
            .map(|k| mass * (theta0 + k as f64 * dtheta).sinh())
            .collect();
        MomentumGrid::from_parts(mass, Layout::Rapidity { theta0, dtheta }, points, vec![dtheta; count])
    }

    /// Uniform rapidities spread over `[lo, hi]`.
    pub fn rapidity_range(mass: f64, lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 || !(hi > lo) {
            return Err(Error::InvalidGrid("rapidity range needs lo < hi and two points".into()));
        }
        MomentumGrid::rapidity(mass, lo, (hi - lo) / (count - 1) as f64, count)
    }

    /// Massless grid with `|p| = p0·e^{ℓ·dlambda}` on each half-line, weights `dlambda`.
    pub fn geometric(p0: f64, dlambda: f64, negative: usize, positive: usize) -> Result<Self> {
        if !(p0 > 0.0) || !(dlambda > 0.0) {
            return Err(Error::InvalidGrid("geometric grids need p0 > 0 and dlambda > 0".into()));
        }
        let level = |l: usize| p0 * (l as f64 * dlambda).exp();
        let points = (0..negative)
            .rev()
            .map(|l| -level(l))
            .chain((0..positive).map(level))
            .collect();
        let layout = Layout::Geometric { p0, dlambda, negative, positive };
        MomentumGrid::from_parts(0.0, layout, points, vec![dlambda; negative + positive])
    }

    /// Any sorted nonzero points; weights are midpoint cell lengths over `ω_m`.
    pub fn arbitrary(mass: f64, points: Vec<f64>) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::InvalidGrid("need at least two points".into()));
        }
        let weights = (0..n)
            .map(|k| {
                let lo = if k == 0 { points[0] } else { 0.5 * (points[k - 1] + points[k]) };
                let hi = if k + 1 == n { points[n - 1] } else { 0.5 * (points[k] + points[k + 1]) };
                let cell = if k == 0 || k + 1 == n { 2.0 * (hi - lo) } else { hi - lo };
                cell / omega(mass, points[k])
            })
            .collect();
        MomentumGrid::from_parts(mass, Layout::Arbitrary, points, weights)
    }

    pub fn from_parts(mass: f64, layout: Layout, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if !(mass >= 0.0) {
            return Err(Error::InvalidGrid(format!("mass {mass} must be >= 0")));
        }
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidGrid("points and weights must be nonempty and equally long".into()));
        }
        if points.iter().any(|p| *p == 0.0 || !p.is_finite()) {
            return Err(Error::InvalidGrid("grid points must be finite and nonzero".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("grid points must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidGrid("weights must be positive".into()));
        }
        if mass == 0.0 && matches!(layout, Layout::Rapidity { .. }) {
            return Err(Error::InvalidGrid("rapidity layout needs m > 0".into()));
        }
        if mass > 0.0 && matches!(layout, Layout::Geometric { .. }) {
            return Err(Error::InvalidGrid("geometric layout needs m = 0".into()));
        }
        Ok(MomentumGrid { points, weights, mass, layout })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn omega(&self, k: usize) -> f64 {
        omega(self.mass, self.points[k])
    }

    pub fn index_of(&self, p: f64) -> Option<usize> {
        self.points.iter().position(|&q| q == p)
    }

    /// Where the amplitude at index `k` ends up under a boost by `shift`
    /// parameter steps, or `None` if it leaves the grid.
    pub fn boost_target(&self, k: usize, shift: i64) -> Result<Option<usize>> {
        let moved = |index: usize, by: i64, len: usize| -> Option<usize> {
            let target = index as i64 + by;
            (0..len as i64).contains(&target).then_some(target as usize)
        };
        match self.layout {
            Layout::Rapidity { .. } => Ok(moved(k, shift, self.len())),
            Layout::Geometric { negative, positive, .. } => {
                // ψ ↦ ψ(e^{-λ}p) on p > 0 carries level ℓ to ℓ + j; on p < 0
                // the argument is e^{λ}p and level ℓ goes to ℓ - j.
                if k >= negative {
                    Ok(moved(k - negative, shift, positive).map(|l| negative + l))
                } else {
                    let level = negative - 1 - k;
                    Ok(moved(level, -shift, negative).map(|l| negative - 1 - l))
                }
            }
            Layout::Arbitrary => Err(Error::Layout),
        }
    }

    /// Boost rapidity corresponding to `shift` steps.
    pub fn boost_rapidity(&self, shift: i64) -> Result<f64> {
        match self.layout {
            Layout::Rapidity { dtheta, .. } => Ok(shift as f64 * dtheta),
            Layout::Geometric { dlambda, .. } => Ok(shift as f64 * dlambda),
            Layout::Arbitrary => Err(Error::Layout),
        }
    }

    pub(crate) fn describe(&self) -> String {
        format!("{} grid with {} points, m = {}", self.layout.tag(), self.len(), self.mass)
    }

    /// Sub-grid of the points with the given sign, keeping the weights.
    pub fn half(&self, positive: bool) -> Result<MomentumGrid> {
        let (points, weights): (Vec<f64>, Vec<f64>) = self
            .points
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| (**p > 0.0) == positive)
            .map(|(p, w)| (*p, *w))
            .unzip();
        let layout = match self.layout {
            Layout::Geometric { p0, dlambda, negative, positive: pos } => Layout::Geometric {
                p0,
                dlambda,
                negative: if positive { 0 } else { negative },
                positive: if positive { pos } else { 0 },
            },
            _ => Layout::Arbitrary,
        };
        MomentumGrid::from_parts(self.mass, layout, points, weights)
    }
}
