use std::time::Instant;

use fockdeform::{
    apply_y, apply_y_table, check_symmetric_inner, compare_operators, eval_inner, kernel_boost_deviation,
    kernel_symmetry_check, make_root, matrix_in_basis, max_abs_deviation, operator_matrix, root_ratio,
    scattering_from_inner, twist_boost_deviation, BlaschkeSpec, Branch, ChiralSpace, Complex64, DeformedFields,
    FlipSet, FockSpace, FockVector, KernelSpec, MomentumGrid, OneParticleVector, PairTable, Root,
    SharpTwistVariant, Side, SymmetricBasis, TestFunctionData,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, SuiteConfig, ALL_SUITES};
use crate::report::{CheckRecord, Relation, SuiteReport};

type Outcome = fockdeform::Result<f64>;

/// Threshold a detection probe must exceed.
pub const DETECTION_THRESHOLD: f64 = 1e-3;
/// Boundary samples for the inner-function checks.
const BOUNDARY_SAMPLES: usize = 1000;
/// Random pairs and triples for the kernel laws.
const KERNEL_SAMPLES: usize = 100;
/// Random vectors for norm-preservation checks.
const UNITARY_SAMPLES: usize = 20;
/// Grid size for the free-field checks.
const FOCK_CORE_POINTS: usize = 4;

struct Context {
    config: SuiteConfig,
    tol: f64,
    massless: MomentumGrid,
    massive: MomentumGrid,
    roots: Vec<(String, Root)>,
    sign_roots: Vec<(String, Root)>,
}

struct Recorder {
    suite: &'static str,
    tol: f64,
    records: Vec<CheckRecord>,
}

impl Recorder {
    fn push(&mut self, check: String, anchor: &str, tol: f64, relation: Relation, outcome: Outcome) {
        let record = match outcome {
            Ok(dev) => CheckRecord::new(self.suite, check, anchor, dev, tol, relation),
            Err(err) => CheckRecord::errored(self.suite, check, anchor, tol, relation, err),
        };
        self.records.push(record);
    }

    /// Identity within the configured tolerance.
    fn identity(&mut self, check: impl Into<String>, anchor: &str, outcome: Outcome) {
        let tol = self.tol;
        self.push(check.into(), anchor, tol, Relation::AtMost, outcome);
    }

    /// Identity with an explicit tolerance (`0` for bitwise equality).
    fn within(&mut self, check: impl Into<String>, anchor: &str, tol: f64, outcome: Outcome) {
        self.push(check.into(), anchor, tol, Relation::AtMost, outcome);
    }

    /// A deviation that must be detectably nonzero.
    fn detects(&mut self, check: impl Into<String>, anchor: &str, outcome: Outcome) {
        self.push(check.into(), anchor, DETECTION_THRESHOLD, Relation::Exceeds, outcome);
    }
}

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_one<R: Rng>(rng: &mut R, modes: usize) -> OneParticleVector {
    OneParticleVector::new((0..modes).map(|_| random_complex(rng)).collect())
}

fn random_root<R: Rng>(rng: &mut R) -> fockdeform::Result<Root> {
    let pairs = rng.gen_range(1..=3);
    let representatives: Vec<Complex64> =
        (0..pairs).map(|_| Complex64::new(rng.gen_range(0.1..2.5), rng.gen_range(0.2..2.0))).collect();
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    Ok(make_root(&BlaschkeSpec::symmetric(&representatives, sign)?, FlipSet::empty()))
}

fn nonzero_momentum<R: Rng>(rng: &mut R) -> f64 {
    let magnitude = rng.gen_range(0.1..5.0);
    if rng.gen_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

fn max_norm_change(space: &FockSpace, vs: &[FockVector], op: impl Fn(&FockVector) -> fockdeform::Result<FockVector>) -> Outcome {
    vs.iter().try_fold(0.0f64, |worst, v| {
        Ok(worst.max((space.norm(&op(v)?)? - space.norm(v)?).abs()))
    })
}

fn dense_deviation(
    space: &FockSpace,
    lhs: impl Fn(&FockVector) -> fockdeform::Result<FockVector>,
    rhs: impl Fn(&FockVector) -> fockdeform::Result<FockVector>,
) -> Outcome {
    Ok(max_abs_deviation(&operator_matrix(space, lhs)?, &operator_matrix(space, rhs)?))
}

impl Context {
    fn new(config: &SuiteConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let massless = config.massless.build()?;
        let massive = config.massive.build()?;
        let mut roots: Vec<(String, Root)> =
            config.roots.iter().enumerate().map(|(i, r)| (format!("root{i}"), r.clone())).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(0);
        for i in 0..config.random_roots {
            roots.push((format!("random{i}"), random_root(&mut rng)?));
        }
        let flips = FlipSet::new(config.flips.iter().map(|&[a, b]| (a, b)).collect())?;
        let flipped = make_root(&BlaschkeSpec::trivial(), flips);
        let sign_roots = vec![
            ("flips".to_string(), flipped.clone()),
            ("minus".to_string(), Root::identity().with_branch(Branch::Opposite)),
            ("minus-flips".to_string(), flipped.with_branch(Branch::Opposite)),
        ];
        Ok(Context { tol: config.tolerance, config: config.clone(), massless, massive, roots, sign_roots })
    }

    fn chiral(&self) -> fockdeform::Result<ChiralSpace> {
        ChiralSpace::new(self.massless.clone(), self.config.truncation)
    }

    fn space(&self, mass_index: usize) -> fockdeform::Result<FockSpace> {
        let grid = if mass_index == 0 { &self.massless } else { &self.massive };
        FockSpace::new(grid.clone(), self.config.truncation)
    }

    fn random_vectors(&self, space: &FockSpace, rng: &mut ChaCha8Rng, count: usize) -> Vec<FockVector> {
        (0..count).map(|_| space.random_vector(rng, space.truncation())).collect()
    }
}

fn mass_label(mass_index: usize) -> &'static str {
    if mass_index == 0 {
        "m=0"
    } else {
        "m>0"
    }
}

fn boundary_samples() -> Vec<f64> {
    (0..BOUNDARY_SAMPLES)
        .map(|k| (-6.0 + 12.0 * k as f64 / (BOUNDARY_SAMPLES - 1) as f64).sinh())
        .collect()
}

fn inner_functions(ctx: &Context, _rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let samples = boundary_samples();
    let all = ctx.roots.iter().chain(&ctx.sign_roots);
    for (label, root) in all {
        let spec = root.base();
        rec.identity(
            format!("axioms[{label}]"),
            "item:SymmetricInnerFunctions",
            Ok(check_symmetric_inner(spec, &samples, ctx.tol).max_deviation()),
        );
        rec.identity(
            format!("root-square[{label}]"),
            "item:Roots",
            samples.iter().try_fold(0.0f64, |worst, &t| {
                let phi = eval_inner(spec, Complex64::new(t, 0.0))?;
                Ok(worst.max((root.eval(t)?.powi(2) - phi).norm()))
            }),
        );
        rec.identity(
            format!("root-reflection[{label}]"),
            "item:Roots",
            samples.iter().try_fold(0.0f64, |worst, &t| {
                let (here, there) = (root.eval(t)?, root.eval(-t)?);
                Ok(worst.max((there - here.conj()).norm()).max((here * there - 1.0).norm()))
            }),
        );
        rec.identity(
            format!("scattering[{label}]"),
            "item:ScatteringFunctions",
            (0..200).try_fold(0.0f64, |worst, k| {
                let theta = -3.0 + 6.0 * k as f64 / 199.0;
                let real = Complex64::new(theta, 0.0);
                let unitarity = (scattering_from_inner(spec, real)? * scattering_from_inner(spec, -real)? - 1.0).norm();
                let zeta = Complex64::new(theta, 0.3 + 2.5 * k as f64 / 199.0);
                let crossed = Complex64::new(-zeta.re, std::f64::consts::PI - zeta.im);
                let crossing = (scattering_from_inner(spec, crossed)? - scattering_from_inner(spec, zeta)?).norm();
                let correspondence = (scattering_from_inner(spec, zeta)? - eval_inner(spec, zeta.sinh())?).norm();
                Ok(worst.max(unitarity).max(crossing).max(correspondence))
            }),
        );
    }
}

fn fock_core(ctx: &Context, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let result = (|| -> fockdeform::Result<()> {
        let [lo, hi] = ctx.config.massive.range;
        let grid = MomentumGrid::rapidity_range(ctx.massive.mass(), lo, hi, FOCK_CORE_POINTS)?;
        let space = FockSpace::new(grid, ctx.config.truncation)?;
        let top = space.truncation();
        let basis = SymmetricBasis::new(&space);
        let adjoint_tol = ctx.tol * 1e-2;
        for rep in 0..ctx.config.repetitions {
            let xi = random_one(rng, space.modes());
            let eta = random_one(rng, space.modes());
            rec.within(
                format!("adjoint[{rep}]"),
                "eq:a_R-explicit",
                adjoint_tol,
                (|| {
                    let a = matrix_in_basis(&basis, |v| space.annihilate(&xi, v))?;
                    let c = matrix_in_basis(&basis, |v| space.create(&xi, v))?;
                    Ok(max_abs_deviation(&a.adjoint(), &c))
                })(),
            );
            let contraction = space.one_particle_inner(&xi, &eta)?;
            rec.identity(
                format!("ccr[{rep}]"),
                "eq:a_R-explicit",
                (0..basis.len()).try_fold(0.0f64, |worst, b| {
                    let v = basis.vector(b);
                    if v.top_sector().unwrap_or(0) + 2 > top {
                        return Ok(worst);
                    }
                    let ab = space.annihilate(&xi, &space.create(&eta, &v)?)?;
                    let ba = space.create(&eta, &space.annihilate(&xi, &v)?)?;
                    let defect = &(&ab - &ba) - &(&v * contraction);
                    Ok(worst.max(defect.max_abs()))
                }),
            );
            let x = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let moved_xi = OneParticleVector::new(
                (0..space.modes())
                    .map(|k| {
                        xi.values()[k]
                            * Complex64::from_polar(1.0, x.0 * space.grid().omega(k) - x.1 * space.grid().points()[k])
                    })
                    .collect(),
            );
            rec.identity(
                format!("translation-covariance[{rep}]"),
                "eq:U1",
                dense_deviation(
                    &space,
                    |v| {
                        let back = space.apply_translation((-x.0, -x.1), v)?;
                        space.apply_translation(x, &space.create(&xi, &back)?)
                    },
                    |v| space.create(&moved_xi, v),
                ),
            );
            rec.identity(
                format!("reflection[{rep}]"),
                "eq:U1",
                (|| {
                    let psi = space.random_vector(rng, top);
                    let phi = space.random_vector(rng, top);
                    let (jpsi, jphi) = (space.apply_reflection(&psi)?, space.apply_reflection(&phi)?);
                    let antiunitary = (space.inner(&jpsi, &jphi)? - space.inner(&psi, &phi)?.conj()).norm();
                    let involution = space.apply_reflection(&jpsi)?.max_abs_diff(&psi);
                    let lhs = space.apply_reflection(&space.create(&xi, &jpsi)?)?;
                    let covariance = lhs.max_abs_diff(&space.create(&xi.conj(), &psi)?);
                    Ok(antiunitary.max(involution).max(covariance))
                })(),
            );
        }
        rec.within(
            "vacuum",
            "eq:a_R-explicit",
            0.0,
            (|| {
                let omega = space.vacuum();
                let xi = random_one(rng, space.modes());
                Ok(space.annihilate(&xi, &omega)?.max_abs() + (space.norm(&omega)? - 1.0).abs())
            })(),
        );
        rec.identity(
            "boost-group",
            "eq:U1",
            (0..basis.len()).try_fold(0.0f64, |worst, b| {
                let v = basis.vector(b);
                let mut dev = worst;
                for shift in [-1i64, 1] {
                    let moved = space.apply_boost(shift, &v)?;
                    if moved.truncated {
                        continue;
                    }
                    dev = dev.max((space.norm(&moved.vector)? - 1.0).abs());
                    let back = space.apply_boost(-shift, &moved.vector)?;
                    dev = dev.max(back.vector.max_abs_diff(&v));
                }
                Ok(dev)
            }),
        );
        Ok(())
    })();
    if let Err(err) = result {
        rec.identity("setup", "eq:a_R-explicit", Err(err));
    }
}

fn kernels(ctx: &Context, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let pairs: Vec<(f64, f64)> = (0..KERNEL_SAMPLES).map(|_| (nonzero_momentum(rng), nonzero_momentum(rng))).collect();
    let triples: Vec<(f64, f64, f64)> = (0..KERNEL_SAMPLES)
        .map(|_| (nonzero_momentum(rng), nonzero_momentum(rng), rng.gen_range(-2.0..2.0)))
        .collect();
    for (label, root) in &ctx.roots {
        for (mass, anchor) in [(0.0, "eq:R0"), (ctx.massive.mass(), "eq:R_m")] {
            let tag = if mass == 0.0 { "m=0" } else { "m>0" };
            match KernelSpec::new(root.clone(), mass) {
                Ok(spec) => {
                    rec.identity(format!("reciprocity[{tag},{label}]"), anchor, kernel_symmetry_check(&spec, &pairs));
                    rec.identity(format!("boost-invariance[{tag},{label}]"), anchor, kernel_boost_deviation(&spec, &triples));
                }
                Err(err) => rec.identity(format!("kernel[{tag},{label}]"), anchor, Err(err)),
            }
        }
    }
    let extras = (|| {
        let r1 = make_root(&BlaschkeSpec::trivial(), FlipSet::mirrored(&[(0.5, 2.0)])?);
        let r2 = Root::identity().with_branch(Branch::Opposite);
        KernelSpec::with_extras(ctx.roots[0].1.clone(), 0.0, Some(r1), Some(r2))
    })();
    match extras {
        Ok(spec) => {
            rec.identity("reciprocity[generalized]", "eq:R0-generalized", kernel_symmetry_check(&spec, &pairs));
            rec.identity("boost-invariance[generalized]", "eq:R0-generalized", kernel_boost_deviation(&spec, &triples));
        }
        Err(err) => rec.identity("generalized", "eq:R0-generalized", Err(err)),
    }
    for mass_index in 0..2 {
        let tag = mass_label(mass_index);
        let outcome = (|| {
            let space = ctx.space(mass_index)?;
            let spec = KernelSpec::new(ctx.roots[0].1.clone(), space.grid().mass())?;
            let ops = DeformedFields::new(&space, spec)?;
            let vs = ctx.random_vectors(&space, rng, UNITARY_SAMPLES);
            let p = space.grid().points()[0] * 0.7;
            let omega = space.vacuum();
            let vacuum = ops.apply_t(p, &omega)?.max_abs_diff(&omega);
            Ok(max_norm_change(&space, &vs, |v| ops.apply_t(p, v))?.max(vacuum))
        })();
        rec.identity(format!("t-unitary[{tag}]"), "eq:a_R-explicit", outcome);
    }
}

fn deformed_fields(ctx: &Context, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    for mass_index in 0..2 {
        let tag = mass_label(mass_index);
        let space = match ctx.space(mass_index) {
            Ok(space) => space,
            Err(err) => {
                rec.identity(format!("space[{tag}]"), "eq:a_R-explicit", Err(err));
                continue;
            }
        };
        let m = space.grid().mass();
        let modes = space.modes();
        rec.within(
            format!("identity-reduction[{tag}]"),
            "eq:a_R-explicit",
            0.0,
            (|| {
                let ops = DeformedFields::new(&space, KernelSpec::new(Root::identity(), m)?)?;
                let xi = random_one(rng, modes);
                let fd = TestFunctionData::new(random_one(rng, modes), random_one(rng, modes), false)?;
                let vs = ctx.random_vectors(&space, rng, ctx.config.repetitions);
                vs.iter().try_fold(0.0f64, |worst, v| {
                    let a = ops.annihilate(&xi, v)?.max_abs_diff(&space.annihilate(&xi, v)?);
                    let c = ops.create(&xi, v)?.max_abs_diff(&space.create(&xi, v)?);
                    let f = ops.field(&fd, v)?.max_abs_diff(&space.field(&fd, v)?);
                    Ok(worst.max(a).max(c).max(f))
                })
            })(),
        );
        for (label, root) in &ctx.roots {
            let ops = match KernelSpec::new(root.clone(), m).and_then(|spec| DeformedFields::new(&space, spec)) {
                Ok(ops) => ops,
                Err(err) => {
                    rec.identity(format!("kernel[{tag},{label}]"), "eq:a_R-explicit", Err(err));
                    continue;
                }
            };
            let xi = random_one(rng, modes);
            rec.identity(
                format!("adjoint[{tag},{label}]"),
                "eq:a_R-explicit",
                (|| {
                    let a = operator_matrix(&space, |v| ops.annihilate(&xi, v))?;
                    let c = operator_matrix(&space, |v| ops.create(&xi, v))?;
                    Ok(max_abs_deviation(&a.adjoint(), &c))
                })(),
            );
            let fd = TestFunctionData::real(random_one(rng, modes));
            rec.identity(
                format!("field-hermitian[{tag},{label}]"),
                "eq:a_R-explicit",
                operator_matrix(&space, |v| ops.field(&fd, v)).map(|f| max_abs_deviation(&f.adjoint(), &f)),
            );
            rec.identity(
                format!("sharp-sum[{tag},{label}]"),
                "eq:a_R-explicit",
                dense_deviation(
                    &space,
                    |v| ops.annihilate(&xi, v),
                    |v| {
                        let mut acc = space.zero();
                        for (s, &p) in space.grid().points().iter().enumerate() {
                            let c = xi.values()[s].conj() * space.grid().weights()[s];
                            acc = &acc + &(&space.annihilate_at(s, &ops.apply_t(p, v)?)? * c);
                        }
                        Ok(acc)
                    },
                ),
            );
            rec.within(
                format!("vacuum[{tag},{label}]"),
                "eq:a_R-explicit",
                0.0,
                (|| {
                    let omega = space.vacuum();
                    let killed = ops.annihilate(&xi, &omega)?.max_abs();
                    let one = ops.field(&fd, &omega)?;
                    let placed = one
                        .sector(1)
                        .iter()
                        .zip(fd.fplus().values())
                        .fold(0.0f64, |w, (a, b)| w.max((a - b).norm()));
                    Ok(killed.max(placed))
                })(),
            );
        }
    }
}

/// `sign(Re(K1/K2))` pair table: the candidate `Y` when the roots may not be related.
fn nearest_sign_table(k1: &PairTable, k2: &PairTable) -> PairTable {
    k1.zip_with(k2, |a, b| {
        if (a * b.conj()).re >= 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    })
}

/// `max |Y φ_{R2}(f) Y − φ_{R1}(f)|` with the nearest-sign candidate `Y`.
fn field_equivalence_deviation(space: &FockSpace, r1: &Root, r2: &Root, fd: &TestFunctionData) -> Outcome {
    let m = space.grid().mass();
    let ops1 = DeformedFields::new(space, KernelSpec::new(r1.clone(), m)?)?;
    let ops2 = DeformedFields::new(space, KernelSpec::new(r2.clone(), m)?)?;
    let y = nearest_sign_table(ops1.table(), ops2.table());
    dense_deviation(
        space,
        |v| apply_y_table(space, &y, &ops2.field(fd, &apply_y_table(space, &y, v)?)?),
        |v| ops1.field(fd, v),
    )
}

fn root_independence(ctx: &Context, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let samples = boundary_samples();
    for mass_index in 0..2 {
        let tag = mass_label(mass_index);
        let space = match ctx.space(mass_index) {
            Ok(space) => space,
            Err(err) => {
                rec.identity(format!("space[{tag}]"), "proposition:ChoiceOfRootDoesntMatter", Err(err));
                continue;
            }
        };
        let m = space.grid().mass();
        let modes = space.modes();
        for (rlabel, r) in &ctx.sign_roots {
            rec.identity(
                format!("y-unitary[{tag},{rlabel}]"),
                "eq:Yr",
                (|| {
                    let vs = ctx.random_vectors(&space, rng, UNITARY_SAMPLES);
                    let norms = max_norm_change(&space, &vs, |v| apply_y(&space, r, v))?;
                    let omega = space.vacuum();
                    let vacuum = apply_y(&space, r, &omega)?.max_abs_diff(&omega);
                    let x = (0.4, -1.1);
                    let commutes = vs.iter().try_fold(0.0f64, |w, v| {
                        let a = apply_y(&space, r, &space.apply_translation(x, v)?)?;
                        let b = space.apply_translation(x, &apply_y(&space, r, v)?)?;
                        Ok::<f64, fockdeform::Error>(w.max(a.max_abs_diff(&b)))
                    })?;
                    Ok(norms.max(vacuum).max(commutes))
                })(),
            );
            for (label, r2) in &ctx.roots {
                let Some(r1) = r2.times_sign_root(r) else { continue };
                let case = format!("{tag},{label},{rlabel}");
                rec.identity(
                    format!("ratio[{case}]"),
                    "proposition:ChoiceOfRootDoesntMatter",
                    root_ratio(&r1, r2, &samples, ctx.tol).map(|rep| rep.sign_deviation.max(rep.reflection_deviation)),
                );
                let xi = random_one(rng, modes);
                rec.identity(
                    format!("annihilator[{case}]"),
                    "lemma:RootEquivalence",
                    (|| {
                        let ops1 = DeformedFields::new(&space, KernelSpec::new(r1.clone(), m)?)?;
                        let ops2 = DeformedFields::new(&space, KernelSpec::new(r2.clone(), m)?)?;
                        dense_deviation(
                            &space,
                            |v| apply_y(&space, r, &ops2.annihilate(&xi, &apply_y(&space, r, v)?)?),
                            |v| ops1.annihilate(&xi, v),
                        )
                    })(),
                );
                rec.identity(
                    format!("field[{case}]"),
                    "eq:UnitaryEquivalenceOfFields",
                    (|| {
                        let ops1 = DeformedFields::new(&space, KernelSpec::new(r1.clone(), m)?)?;
                        let ops2 = DeformedFields::new(&space, KernelSpec::new(r2.clone(), m)?)?;
                        let fd = TestFunctionData::new(random_one(rng, modes), random_one(rng, modes), false)?;
                        dense_deviation(
                            &space,
                            |v| apply_y(&space, r, &ops2.field(&fd, &apply_y(&space, r, v)?)?),
                            |v| ops1.field(&fd, v),
                        )
                    })(),
                );
            }
        }
        if ctx.roots.len() >= 2 {
            let (r1, r2) = (&ctx.roots[1].1, &ctx.roots[0].1);
            let fd = TestFunctionData::real(random_one(rng, modes));
            rec.detects(
                format!("mismatch-ratio[{tag}]"),
                "proposition:ChoiceOfRootDoesntMatter",
                root_ratio(r1, r2, &samples, ctx.tol).map(|rep| rep.sign_deviation),
            );
            rec.detects(
                format!("mismatch-field[{tag}]"),
                "eq:UnitaryEquivalenceOfFields",
                field_equivalence_deviation(&space, r1, r2, &fd),
            );
        }
        for (i, [r1, r2]) in ctx.config.equivalent_root_pairs.iter().enumerate() {
            let fd = TestFunctionData::real(random_one(rng, modes));
            rec.identity(
                format!("declared-pair[{tag},{i}]"),
                "proposition:ChoiceOfRootDoesntMatter",
                (|| {
                    let ratio = root_ratio(r1, r2, &samples, ctx.tol)?;
                    let field = field_equivalence_deviation(&space, r1, r2, &fd)?;
                    Ok(ratio.sign_deviation.max(ratio.reflection_deviation).max(field))
                })(),
            );
        }
    }
}

fn chiral_isomorphism(ctx: &Context, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let cs = match ctx.chiral() {
        Ok(cs) => cs,
        Err(err) => return rec.identity("setup", "eqn_isoexpli", Err(err)),
    };
    let bi = cs.bi_basis();
    let sym = SymmetricBasis::new(cs.union());
    rec.identity(
        "v-unitary",
        "eqn_isoexpli",
        (|| {
            let columns = bi
                .iter()
                .map(|b| Ok(sym.coordinates(&cs.apply_v(b)?)))
                .collect::<fockdeform::Result<Vec<_>>>()?;
            let u = DMatrix::from_columns(&columns);
            if u.nrows() != u.ncols() {
                return Ok(f64::INFINITY);
            }
            Ok(max_abs_deviation(&(u.adjoint() * &u), &DMatrix::identity(u.ncols(), u.ncols())))
        })(),
    );
    rec.identity(
        "v-inverse",
        "eqn_isoexpli",
        (|| {
            let forward = bi.iter().try_fold(0.0f64, |w, b| {
                Ok::<f64, fockdeform::Error>(w.max(cs.apply_v_inverse(&cs.apply_v(b)?)?.max_abs_diff(b)))
            })?;
            let backward = (0..sym.len()).try_fold(0.0f64, |w, a| {
                let v = sym.vector(a);
                Ok::<f64, fockdeform::Error>(w.max(cs.apply_v(&cs.apply_v_inverse(&v)?)?.max_abs_diff(&v)))
            })?;
            Ok(forward.max(backward))
        })(),
    );
    rec.within(
        "v-vacuum",
        "eqn_isoexpo",
        0.0,
        cs.apply_v(&cs.vacuum_bi()).map(|v| v.max_abs_diff(&cs.union().vacuum())),
    );
    rec.identity(
        "v-exponential",
        "eqn_isoexpo",
        (0..ctx.config.repetitions).try_fold(0.0f64, |worst, _| {
            let psi = random_one(rng, cs.half(Side::Plus).modes());
            let phi = random_one(rng, cs.half(Side::Minus).modes());
            let product = cs.tensor_product(
                &cs.half(Side::Plus).exponential_vector(&psi)?,
                &cs.half(Side::Minus).exponential_vector(&phi)?,
            )?;
            let (up, down) = (cs.pair().embed(&psi, Side::Plus), cs.pair().embed(&phi, Side::Minus));
            let sum = OneParticleVector::new(up.values().iter().zip(down.values()).map(|(a, b)| a + b).collect());
            Ok(worst.max(cs.apply_v(&product)?.max_abs_diff(&cs.union().exponential_vector(&sum)?)))
        }),
    );
    rec.identity(
        "v-boost",
        "eqn_isoexpo",
        (0..ctx.config.repetitions).try_fold(0.0f64, |worst, _| {
            let xi = cs.random_bi(rng)?;
            let (moved, _) = cs.apply_boost_bi(1, &xi)?;
            let rhs = cs.union().apply_boost(1, &cs.apply_v(&xi)?)?.vector;
            Ok(worst.max(cs.apply_v(&moved)?.max_abs_diff(&rhs)))
        }),
    );
}

fn shat_lemma(ctx: &Context, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let cs = match ctx.chiral() {
        Ok(cs) => cs,
        Err(err) => return rec.identity("setup", "eq:Shat", Err(err)),
    };
    let basis = SymmetricBasis::new(cs.union());
    for (label, root) in &ctx.roots {
        rec.identity(
            format!("shat[{label}]"),
            "eq:Shat",
            (|| {
                let direct = matrix_in_basis(&basis, |v| cs.apply_shat(root, v))?;
                let composed = matrix_in_basis(&basis, |v| cs.apply_v(&cs.apply_s(root, &cs.apply_v_inverse(v)?)?))?;
                Ok(max_abs_deviation(&direct, &composed))
            })(),
        );
        rec.within(
            format!("low-sectors[{label}]"),
            "eq:Shat",
            0.0,
            (|| {
                let v = cs.union().random_vector(rng, 1);
                Ok(cs.apply_shat(root, &v)?.max_abs_diff(&v))
            })(),
        );
    }
    rec.within(
        "trivial-root",
        "eq:Shat",
        0.0,
        (|| {
            let v = cs.union().random_vector(rng, cs.truncation());
            Ok(cs.apply_shat(&Root::identity(), &v)?.max_abs_diff(&v))
        })(),
    );
}

fn main_relation(ctx: &Context, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let cs = match ctx.chiral() {
        Ok(cs) => cs,
        Err(err) => return rec.identity("setup", "eq:Mainrel", Err(err)),
    };
    for side in [Side::Plus, Side::Minus] {
        let half_modes = cs.half(side).modes();
        for (label, root) in &ctx.roots {
            let psi = cs.pair().embed(&random_one(rng, half_modes), side);
            rec.identity(
                format!("{}[{label}]", side.name()),
                "eq:Mainrel",
                cs.verify_main_relation(root, &psi, rng, ctx.config.repetitions).map(|r| r.max()),
            );
        }
        let g = random_one(rng, half_modes);
        let psi = cs.pair().embed(&g, side);
        rec.within(
            format!("{}[trivial-root]", side.name()),
            "eq:Mainrel",
            0.0,
            (|| {
                let identity = Root::identity();
                let deformed = cs.deformed(&identity)?;
                let lhs = dense_deviation(cs.union(), |v| deformed.annihilate(&psi, v), |v| cs.union().annihilate(&psi, v))?;
                let rhs = dense_deviation(
                    cs.union(),
                    |v| cs.twisted_annihilate(&identity, &psi, v),
                    |v| cs.apply_v(&cs.annihilate(side, &g, &cs.apply_v_inverse(v)?)?),
                )?;
                Ok(lhs.max(rhs))
            })(),
        );
        rec.identity(
            format!("{}[untwisted]", side.name()),
            "eq:Mainrel",
            compare_operators(
                cs.union(),
                |v| cs.union().annihilate(&psi, v),
                |v| cs.apply_v(&cs.annihilate(side, &g, &cs.apply_v_inverse(v)?)?),
                rng,
                ctx.config.repetitions,
            )
            .map(|r| r.max()),
        );
    }
}

fn twist_algebra(ctx: &Context, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let cs = match ctx.chiral() {
        Ok(cs) => cs,
        Err(err) => return rec.identity("setup", "eqn_Saction", Err(err)),
    };
    for (label, root) in &ctx.roots {
        let phi = |t: f64| eval_inner(root.base(), Complex64::new(t, 0.0));
        rec.identity(
            format!("s-square[{label}]"),
            "eqn_Saction",
            (|| {
                let squared = cs.twist_table_from(phi)?;
                (0..ctx.config.repetitions).try_fold(0.0f64, |w, _| {
                    let xi = cs.random_bi(rng)?;
                    let twice = cs.apply_s(root, &cs.apply_s(root, &xi)?)?;
                    Ok(w.max(twice.max_abs_diff(&cs.apply_s_table(&squared, &xi)?)))
                })
            })(),
        );
        rec.identity(
            format!("shat-square[{label}]"),
            "eq:Shat",
            (|| {
                let squared = cs.shat_table_from(phi)?;
                dense_deviation(
                    cs.union(),
                    |v| cs.apply_shat(root, &cs.apply_shat(root, v)?),
                    |v| cs.apply_shat_table(&squared, v),
                )
            })(),
        );
        rec.identity(
            format!("s-unitary[{label}]"),
            "eqn_Saction",
            (|| {
                let vacuum = cs.apply_s(root, &cs.vacuum_bi())?.max_abs_diff(&cs.vacuum_bi());
                (0..UNITARY_SAMPLES).try_fold(vacuum, |w, _| {
                    let xi = cs.random_bi(rng)?;
                    let moved = cs.apply_s(root, &xi)?;
                    let norm_change = (cs.inner_bi(&moved, &moved)?.re.sqrt() - cs.inner_bi(&xi, &xi)?.re.sqrt()).abs();
                    let inverse = cs.apply_s_adjoint(root, &moved)?.max_abs_diff(&xi);
                    Ok(w.max(norm_change).max(inverse))
                })
            })(),
        );
    }
}

fn modular(ctx: &Context, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let cs = match ctx.chiral() {
        Ok(cs) => cs,
        Err(err) => return rec.identity("setup", "eq:Nhat-ModularData", Err(err)),
    };
    let triples: Vec<(f64, f64, f64)> = (0..KERNEL_SAMPLES)
        .map(|_| (rng.gen_range(0.1..5.0), -rng.gen_range(0.1..5.0), rng.gen_range(-2.0..2.0)))
        .collect();
    let union = cs.union();
    for (label, root) in &ctx.roots {
        rec.identity(
            format!("j-flip[{label}]"),
            "eq:Nhat-ModularData",
            dense_deviation(
                union,
                |v| union.apply_reflection(&cs.apply_shat(root, &union.apply_reflection(v)?)?),
                |v| cs.apply_shat_adjoint(root, v),
            ),
        );
        rec.identity(format!("boost-kernel[{label}]"), "theorem:N", twist_boost_deviation(root, &triples));
        rec.identity(
            format!("boost-grid[{label}]"),
            "theorem:N",
            (0..ctx.config.repetitions).try_fold(0.0f64, |w, _| {
                let xi = cs.random_bi(rng)?;
                let mut worst = w;
                for shift in [-1i64, 1] {
                    let (a, _) = cs.apply_boost_bi(shift, &cs.apply_s(root, &xi)?)?;
                    let (moved, _) = cs.apply_boost_bi(shift, &xi)?;
                    worst = worst.max(a.max_abs_diff(&cs.apply_s(root, &moved)?));
                }
                Ok(worst)
            }),
        );
    }
}

fn sharp_momentum(ctx: &Context, _rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let mut differs: f64 = 0.0;
    for mass_index in [1, 0] {
        let tag = mass_label(mass_index);
        let space = match ctx.space(mass_index) {
            Ok(space) => space,
            Err(err) => {
                rec.identity(format!("space[{tag}]"), "section:m>0", Err(err));
                continue;
            }
        };
        let basis = SymmetricBasis::new(&space);
        for (label, root) in &ctx.roots {
            let ops = match KernelSpec::new(root.clone(), space.grid().mass()).and_then(|s| DeformedFields::new(&space, s)) {
                Ok(ops) => ops,
                Err(err) => {
                    rec.identity(format!("kernel[{tag},{label}]"), "section:m>0", Err(err));
                    continue;
                }
            };
            let adjoint_action = |variant: SharpTwistVariant, s: usize| {
                matrix_in_basis(&basis, |v| {
                    ops.sharp_twist(variant, s, &space.annihilate_at(s, &ops.sharp_twist_adjoint(variant, s, v)?)?)
                })
            };
            let mut agree: fockdeform::Result<f64> = Ok(0.0);
            for variant in SharpTwistVariant::ALL {
                rec.identity(
                    format!("conjugation[{tag},{},{label}]", variant.name()),
                    "section:m>0",
                    (0..space.modes()).try_fold(0.0f64, |w, s| {
                        let deformed = matrix_in_basis(&basis, |v| ops.annihilate_at(s, v))?;
                        Ok(w.max(max_abs_deviation(&adjoint_action(variant, s)?, &deformed)))
                    }),
                );
            }
            if let Ok(worst) = agree.as_mut() {
                for s in 0..space.modes() {
                    let pair = adjoint_action(SharpTwistVariant::PairwiseSum, s)
                        .and_then(|a| Ok((a, adjoint_action(SharpTwistVariant::SignSplit, s)?)));
                    match pair {
                        Ok((a, b)) => *worst = worst.max(max_abs_deviation(&a, &b)),
                        Err(err) => {
                            agree = Err(err);
                            break;
                        }
                    }
                }
            }
            rec.identity(format!("variants-agree[{tag},{label}]"), "section:m>0", agree);
            for s in 0..space.modes() {
                let twists = matrix_in_basis(&basis, |v| ops.sharp_twist(SharpTwistVariant::PairwiseSum, s, v))
                    .and_then(|a| Ok((a, matrix_in_basis(&basis, |v| ops.sharp_twist(SharpTwistVariant::SignSplit, s, v))?)));
                if let Ok((a, b)) = twists {
                    differs = differs.max(max_abs_deviation(&a, &b));
                }
            }
        }
    }
    rec.detects("variants-differ", "section:m>0", Ok(differs));
}

fn field_equivalence(ctx: &Context, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let cs = match ctx.chiral() {
        Ok(cs) => cs,
        Err(err) => return rec.identity("setup", "thm:Algeq", Err(err)),
    };
    for side in [Side::Plus, Side::Minus] {
        let half_modes = cs.half(side).modes();
        for (label, root) in &ctx.roots {
            let fd = TestFunctionData::real(cs.pair().embed(&random_one(rng, half_modes), side));
            rec.identity(
                format!("{}[{label}]", side.name()),
                "thm:Algeq",
                cs.verify_field_equivalence(root, &fd, rng, ctx.config.repetitions).map(|r| r.max()),
            );
        }
        let fd = TestFunctionData::real(random_one(rng, half_modes));
        rec.identity(
            format!("chiral-hermitian[{}]", side.name()),
            "eq:fpm",
            (0..ctx.config.repetitions).try_fold(0.0f64, |w, _| {
                let a = cs.random_bi(rng)?;
                let b = cs.random_bi(rng)?;
                let lhs = cs.inner_bi(&a, &cs.chiral_field(side, &fd, &b)?)?;
                let rhs = cs.inner_bi(&cs.chiral_field(side, &fd, &a)?, &b)?;
                Ok(w.max((lhs - rhs).norm()))
            }),
        );
    }
}

type SuiteFn = fn(&Context, &mut ChaCha8Rng, &mut Recorder);

fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "inner-functions" => inner_functions,
        "fock-core" => fock_core,
        "kernels" => kernels,
        "deformed-fields" => deformed_fields,
        "root-independence" => root_independence,
        "chiral-isomorphism" => chiral_isomorphism,
        "shat-lemma" => shat_lemma,
        "main-relation" => main_relation,
        "twist-algebra" => twist_algebra,
        "modular" => modular,
        "sharp-momentum" => sharp_momentum,
        "field-equivalence" => field_equivalence,
        _ => return None,
    })
}

/// Runs the selected suites in parallel; each suite draws from its own
/// stream of the seeded generator, so the records do not depend on scheduling.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, ConfigError> {
    let start = Instant::now();
    let ctx = Context::new(config)?;
    let selected: Vec<(usize, &'static str)> = ALL_SUITES
        .iter()
        .enumerate()
        .filter(|(_, name)| config.suites.iter().any(|s| s == *name))
        .map(|(i, name)| (i, *name))
        .collect();
    let per_suite: Vec<Vec<CheckRecord>> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&(index, name)| {
                let ctx = &ctx;
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed);
                    rng.set_stream(index as u64 + 1);
                    let mut rec = Recorder { suite: name, tol: ctx.tol, records: Vec::new() };
                    suite_fn(name).expect("suite names are validated")(ctx, &mut rng, &mut rec);
                    rec.records
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    let records = per_suite.into_iter().flatten().collect();
    Ok(SuiteReport::new(config.seed, records, Some(start.elapsed().as_secs_f64())))
}
