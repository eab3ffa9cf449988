//! Shared fixtures for the operator benchmarks.

use fockdeform::{make_root, BlaschkeSpec, ChiralSpace, Complex64, FlipSet, FockSpace, MomentumGrid, OneParticleVector, Root};

/// Massive space on a uniform rapidity grid.
pub fn massive_space(points: usize, truncation: usize) -> FockSpace {
    let grid = MomentumGrid::rapidity_range(1.0, -1.25, 1.25, points).expect("valid grid");
    FockSpace::new(grid, truncation).expect("valid space")
}

/// Chiral space with `half` geometric points on each half-line.
pub fn chiral_space(half: usize, truncation: usize) -> ChiralSpace {
    let grid = MomentumGrid::geometric(0.5, 2f64.ln(), half, half).expect("valid grid");
    ChiralSpace::new(grid, truncation).expect("valid space")
}

/// Root of the Blaschke product with zeros `±0.8 + 1.1i`.
pub fn sample_root() -> Root {
    let spec = BlaschkeSpec::symmetric(&[Complex64::new(0.8, 1.1)], 1.0).expect("symmetric zeros");
    make_root(&spec, FlipSet::empty())
}

/// Smooth one-particle vector with no vanishing entries.
pub fn smooth_vector(modes: usize) -> OneParticleVector {
    OneParticleVector::new((0..modes).map(|k| Complex64::new((k as f64 * 0.7).cos(), (k as f64 * 0.3).sin())).collect())
}
