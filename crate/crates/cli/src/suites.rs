//! Verification suites behind `verify` and `report`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use octavic::clifford::CliffordElement;
use octavic::cusps::{
    build_cusp_matrix, cusp_class_discrepancy, cusp_value_general, enumerate_cusp_r, enumerate_isotropic,
    lift_characteristic, numerator_entry, r_bracket, rg_even, Cyclotomic, RationalHermitian, Section, ZERO_ENTRY,
};
use octavic::embedding::{
    build_generator, classify_level, conjugate_by_scaling, embed_j, even_hom_to_m8, gram_v, in_product_lattice,
    is_hermitian_symplectic, is_spin, octave_space, octave_vector, orth_action, spi_images, Calibration,
    CliffordMatrix4, GeneratorSpec, OrthPoint,
};
use octavic::linalg::RatMatrix;
use octavic::octonion::{
    enumerate_by_norm, gram_s, triple_trace_integral, IntegralOctave, Rational, F_DOUBLED, MUL_TABLE,
};
use octavic::theta::{
    equivariance_residual_with, sample_point, theta_restricted, theta_siegel, GeneratorData, SiegelPoint,
};

use crate::config::Config;
use crate::report::{CheckResult, Status, SuiteReport, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Embedding,
    Cusps,
    All,
}

impl Suite {
    /// Order in which `all` runs the individual suites.
    pub const ORDER: [Suite; 3] = [Suite::Algebra, Suite::Embedding, Suite::Cusps];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Embedding => "embedding",
            Suite::Cusps => "cusps",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "embedding" => Ok(Suite::Embedding),
            "cusps" => Ok(Suite::Cusps),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite '{other}' (expected algebra, embedding, cusps or all)")),
        }
    }
}

struct Failure {
    detail: String,
    counterexample: Option<Value>,
}

impl Failure {
    fn new(detail: impl Into<String>) -> Self {
        Failure { detail: detail.into(), counterexample: None }
    }

    fn with(detail: impl Into<String>, counterexample: Value) -> Self {
        Failure { detail: detail.into(), counterexample: Some(counterexample) }
    }
}

impl<E: fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::new(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn run_check(name: &str, f: impl FnOnce() -> Outcome) -> CheckResult {
    match f() {
        Ok(detail) => CheckResult { name: name.to_string(), status: Status::Pass, detail, counterexample: None },
        Err(e) => CheckResult {
            name: name.to_string(),
            status: Status::Fail,
            detail: e.detail,
            counterexample: e.counterexample,
        },
    }
}

fn ensure(cond: bool, f: impl FnOnce() -> Failure) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(f())
    }
}

/// Independent stream per check so that adding checks does not shift others.
fn rng(cfg: &Config, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

fn octave_json(x: &IntegralOctave) -> Value {
    json!(x.f)
}

fn point_json(z: &OrthPoint) -> Value {
    json!({
        "z1": z.z1.to_string(),
        "z2": z.z2.to_string(),
        "zf": z.zf.e.iter().map(Complex64::to_string).collect::<Vec<_>>().join(","),
    })
}

fn random_octave<R: Rng>(rng: &mut R, r: i64) -> IntegralOctave {
    IntegralOctave::new(std::array::from_fn(|_| rng.gen_range(-r..=r)))
}

fn random_even(rng: &mut ChaCha8Rng, summands: usize, depth: usize) -> CliffordElement {
    let s = octave_space();
    let mut x = CliffordElement::zero(&s);
    for _ in 0..summands {
        let mut t = CliffordElement::from_int(&s, rng.gen_range(-3..=3));
        for _ in 0..rng.gen_range(1..=depth) {
            let a = random_octave(rng, 2).to_octave();
            let b = random_octave(rng, 2).to_octave();
            t = &t * &(&octave_vector(&a) * &octave_vector(&b));
        }
        x = &x + &t;
    }
    x
}

#[allow(clippy::needless_range_loop)]
pub fn algebra(cfg: &Config) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(run_check("octave multiplication table", || {
        for i in 0..8 {
            ensure(MUL_TABLE[0][i] == (1, i as u8) && MUL_TABLE[i][0] == (1, i as u8), || {
                Failure::with("e0 is not a two-sided unit", json!({ "i": i }))
            })?;
            for j in 1..8 {
                let (s, k) = MUL_TABLE[i][j];
                let (s2, k2) = MUL_TABLE[j][i];
                let ok = if i == j { (s, k) == (-1, 0) } else { i == 0 || (k == k2 && s == -s2) };
                ensure(ok, || Failure::with("table law violated", json!({ "i": i, "j": j })))?;
            }
        }
        Ok("e0 is the unit, e_i^2 = -1, distinct units anticommute".into())
    }));
    out.push(run_check("N(xy)=N(x)N(y)", || {
        let mut rng = rng(cfg, 1);
        let n = 20_000;
        for _ in 0..n {
            let x = random_octave(&mut rng, 40);
            let y = random_octave(&mut rng, 40);
            ensure((x * y).norm() == x.norm() * y.norm(), || {
                Failure::with("norm is not multiplicative", json!({ "x": octave_json(&x), "y": octave_json(&y) }))
            })?;
        }
        Ok(format!("{n} random integral pairs"))
    }));
    out.push(run_check("conj(xy)=conj(y)conj(x)", || {
        let mut rng = rng(cfg, 2);
        let n = 2_000;
        for _ in 0..n {
            let x = random_octave(&mut rng, 6);
            let y = random_octave(&mut rng, 6);
            ensure((x * y).conj() == y.conj() * x.conj(), || {
                Failure::with(
                    "conjugation does not reverse the product",
                    json!({ "x": octave_json(&x), "y": octave_json(&y) }),
                )
            })?;
        }
        Ok(format!("{n} random integral pairs"))
    }));
    out.push(run_check("tr((a*b)*c)=tr(a*(b*c))", || {
        let mut rng = rng(cfg, 3);
        let n = 2_000;
        for _ in 0..n {
            let [a, b, c] = std::array::from_fn(|_| random_octave(&mut rng, 5));
            let left = ((a * b) * c).trace();
            let ok =
                left == (a * (b * c)).trace() && triple_trace_integral(&a, &b, &c) == triple_trace_integral(&b, &c, &a);
            ensure(ok, || {
                Failure::with(
                    "triple trace is not associative or not cyclic",
                    json!({ "a": octave_json(&a), "b": octave_json(&b), "c": octave_json(&c) }),
                )
            })?;
        }
        Ok(format!("{n} random integral triples, cyclic shift included"))
    }));
    out.push(run_check("S=2FF' is even unimodular", || {
        let s = RatMatrix::from_ints(gram_s());
        ensure(s.determinant() == Rational::from_integer(BigInt::from(1)), || Failure::new("det S != 1"))?;
        ensure((0..8).all(|i| gram_s()[i][i] % 2 == 0), || Failure::new("S has an odd diagonal entry"))?;
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        let f = RatMatrix::from_ints(&F_DOUBLED).scale(&half);
        let two_ffp = (&f * &f.transpose()).scale(&Rational::from_integer(BigInt::from(2)));
        ensure(two_ffp == s, || Failure::new("S != 2FF'"))?;
        let positive = (1..=8).all(|k| s.block(0, 0, k, k).determinant() > Rational::from_integer(BigInt::from(0)));
        ensure(positive, || Failure::new("S is not positive definite"))?;
        Ok("det 1, even diagonal, leading minors positive".into())
    }));
    out.push(run_check("E8 shells of norm 1 and 2", || {
        for (n, expected) in [(1u64, 240usize), (2, 2160)] {
            let shell = enumerate_by_norm(n);
            ensure(shell.len() == expected, || {
                Failure::new(format!("norm {n}: {} vectors, expected {expected}", shell.len()))
            })?;
            if let Some(x) = shell.iter().find(|x| x.norm() != n as i64) {
                return Err(Failure::with(format!("vector of the wrong norm in shell {n}"), octave_json(x)));
            }
        }
        Ok("240 and 2160 vectors".into())
    }));
    out.push(run_check("Clifford relation v^2=-N(v)", || {
        let mut rng = rng(cfg, 4);
        let s = octave_space();
        let n = 300;
        for _ in 0..n {
            let a = random_octave(&mut rng, 4);
            let v = octave_vector(&a.to_octave());
            ensure(&v * &v == CliffordElement::from_int(&s, -a.norm()), || {
                Failure::with("vector does not square to -N(v)", octave_json(&a))
            })?;
        }
        Ok(format!("{n} random lattice vectors"))
    }));
    out.push(run_check("hom(xy)=hom(x)hom(y) and hom(x')=hom(x)'", || {
        let mut rng = rng(cfg, 5);
        let n = 300;
        for k in 0..n {
            let x = random_even(&mut rng, 2, 1);
            let y = random_even(&mut rng, 2, 1);
            let hx = even_hom_to_m8(&x)?;
            let hy = even_hom_to_m8(&y)?;
            ensure(even_hom_to_m8(&(&x * &y))? == &hx * &hy, || {
                Failure::with("homomorphism is not multiplicative", json!({ "sample": k, "seed": cfg.seed }))
            })?;
            ensure(even_hom_to_m8(&x.involution())? == hx.transpose(), || {
                Failure::with("involution does not map to the transpose", json!({ "sample": k, "seed": cfg.seed }))
            })?;
        }
        Ok(format!("{n} random pairs of even elements"))
    }));
    out.push(run_check("hom image lies in the P(f) product lattice", || {
        let mut rng = rng(cfg, 6);
        let n = 30;
        for k in 0..n {
            let h = even_hom_to_m8(&random_even(&mut rng, 3, 3))?;
            ensure(in_product_lattice(&h), || {
                Failure::with("image outside the lattice", json!({ "sample": k, "seed": cfg.seed }))
            })?;
        }
        let half = RatMatrix::identity(8).scale(&Rational::new(BigInt::from(1), BigInt::from(2)));
        ensure(!in_product_lattice(&half), || Failure::new("membership test accepts I/2"))?;
        Ok(format!("{n} random even elements; I/2 rejected"))
    }));
    out
}

/// Residual of the worst generator at `z`, with that generator.
fn worst_residual(gens: &[GeneratorData], z: &OrthPoint, c: Calibration) -> Result<(f64, usize), Failure> {
    let mut worst = (0.0, 0);
    for (i, g) in gens.iter().enumerate() {
        let r = equivariance_residual_with(g, z, c)?;
        if r > worst.0 {
            worst = (r, i);
        }
    }
    Ok(worst)
}

/// Returns the first calibration that makes every generator equivariant at a
/// few probe points.
fn discover_calibration(gens: &[GeneratorData], cfg: &Config) -> Result<Calibration, Failure> {
    let mut rng = rng(cfg, 20);
    let probes: Vec<OrthPoint> = (0..3).map(|_| sample_point(&mut rng)).collect();
    let mut residuals = Vec::new();
    for c in [Calibration::NegConj, Calibration::Identity] {
        let mut worst: f64 = 0.0;
        for z in &probes {
            worst = worst.max(worst_residual(gens, z, c)?.0);
        }
        if worst < cfg.tolerances.matrix {
            return Ok(c);
        }
        residuals.push(json!({ "calibration": c, "max_residual": worst }));
    }
    Err(Failure::with("no chart calibration is equivariant", Value::Array(residuals)))
}

pub struct EmbeddingOutcome {
    pub checks: Vec<CheckResult>,
    pub calibration: Option<Calibration>,
}

pub fn embedding(cfg: &Config) -> EmbeddingOutcome {
    let mut out = Vec::new();
    let specs = GeneratorSpec::standard_system();
    out.push(run_check("vector images satisfy the Clifford relations", || {
        let imgs = spi_images();
        let g = gram_v();
        for i in 0..12 {
            for j in 0..12 {
                let ac = &(&imgs[i] * &imgs[j]) + &(&imgs[j] * &imgs[i]);
                ensure(ac == CliffordMatrix4::identity().scale(&g[(i, j)]), || {
                    Failure::with("anticommutator differs from the Gram entry", json!({ "i": i, "j": j }))
                })?;
            }
        }
        Ok("all 144 anticommutators".into())
    }));
    out.push(run_check("generators are spin, Hermitian symplectic, det +1", || {
        for g in &specs {
            let m = build_generator(g)?;
            let spin = is_spin(m.inner());
            ensure(spin.is_spin, || Failure::with("is_spin fails", json!(g.to_string())))?;
            ensure(is_hermitian_symplectic(m.inner()), || Failure::with("M*IM != I", json!(g.to_string())))?;
            let o = spin.orthogonal.ok_or_else(|| Failure::with("no orthogonal image", json!(g.to_string())))?;
            ensure(o.determinant() == Rational::from_integer(BigInt::from(1)), || {
                Failure::with("orthogonal image has det != 1", json!(g.to_string()))
            })?;
        }
        Ok(format!("{} generators", specs.len()))
    }));
    out.push(run_check("J(generators) lie in the theta group", || {
        for g in &specs {
            let level = classify_level(&embed_j(&build_generator(g)?)?);
            ensure(level.integral_symplectic && level.theta_group(), || {
                Failure::with("image is not in Gamma[1,2]", json!({ "generator": g.to_string(), "level": level }))
            })?;
        }
        Ok(format!("{} generators in Gamma[1,2]", specs.len()))
    }));
    out.push(run_check("M = 1 mod 2 gives J(M) in the Igusa group", || {
        let mut literal = 0;
        let doubled: Vec<GeneratorSpec> = specs.iter().skip(1).map(|g| g.scaled(2)).collect();
        for g in &doubled {
            let ce = || json!(g.to_string());
            let m = build_generator(g)?;
            ensure(m.inner().is_one_mod2().unwrap_or(false), || Failure::with("not 1 mod 2", ce()))?;
            let c = conjugate_by_scaling(&m)?;
            ensure(is_spin(c.inner()).is_spin, || Failure::with("N^-1 M N is not spin", ce()))?;
            let jc = classify_level(&embed_j(&c)?);
            ensure(jc.theta_group(), || Failure::with("J(N^-1 M N) is not in Gamma[1,2]", ce()))?;
            literal += jc.igusa_24 as usize;
            ensure(classify_level(&embed_j(&m)?).igusa_24, || Failure::with("J(M) is not in Gamma[2,4]", ce()))?;
        }
        Ok(format!("{} doubled generators; J(N^-1 M N) itself in Gamma[2,4] for {literal}", doubled.len()))
    }));

    let gens: Result<Vec<GeneratorData>, _> = specs.iter().copied().map(GeneratorData::new).collect();
    let mut calibration = None;
    out.push(run_check("equivariance j(gZ) = J(g) j(Z)", || {
        let gens = gens.as_ref().map_err(|e| Failure::new(e.to_string()))?;
        let (c, how) = match cfg.calibration {
            Some(c) => (c, "configured"),
            None => (discover_calibration(gens, cfg)?, "discovered"),
        };
        calibration = Some(c);
        let mut rng = rng(cfg, 21);
        let n = 60;
        let mut max: f64 = 0.0;
        for _ in 0..n {
            let z = sample_point(&mut rng);
            let (r, i) = worst_residual(gens, &z, c)?;
            ensure(r < cfg.tolerances.matrix, || {
                Failure::with(
                    format!("residual {r:.3e} exceeds {:.1e}", cfg.tolerances.matrix),
                    json!({
                        "calibration": c,
                        "generator": gens[i].spec.to_string(),
                        "point": point_json(&z),
                        "residual": r,
                    }),
                )
            })?;
            max = max.max(r);
        }
        Ok(format!("{n} points x {} generators, calibration {c} ({how}), max residual {max:.2e}", gens.len()))
    }));
    out.push(run_check("restriction formula", || {
        let mut rng = rng(cfg, 22);
        let n = 8;
        let mut max: f64 = 0.0;
        for _ in 0..n {
            let a: u16 = rng.gen();
            let z = sample_point(&mut rng);
            let r = theta_restricted(a, &z, &cfg.truncation)?;
            let s = theta_siegel(a, &SiegelPoint::from_orth(&z)?, &cfg.truncation);
            let d = (r.value() - s.value()).norm();
            ensure(d < cfg.tolerances.cross_sum, || {
                Failure::with(
                    format!("difference {d:.3e}"),
                    json!({ "characteristic": format!("{a:04x}"), "point": point_json(&z), "difference": d }),
                )
            })?;
            max = max.max(d);
        }
        Ok(format!(
            "{n} characteristic/point pairs at N <= ({}, {}), max difference {max:.2e}",
            cfg.truncation.max_norm1, cfg.truncation.max_norm2
        ))
    }));
    out.push(run_check("automorphy factor is a cocycle", || {
        let gens = gens.as_ref().map_err(|e| Failure::new(e.to_string()))?;
        let mut rng = rng(cfg, 23);
        let n = 30;
        let mut done = 0;
        let mut attempts = 0;
        while done < n && attempts < 50 * n {
            attempts += 1;
            let g1 = &gens[rng.gen_range(0..gens.len())];
            let g2 = &gens[rng.gen_range(0..gens.len())];
            let z = sample_point(&mut rng);
            let Ok((w, t2)) = orth_action(&g2.orthogonal, &z) else { continue };
            let Ok((_, t1)) = orth_action(&g1.orthogonal, &w) else { continue };
            let (_, t12) = orth_action(&(&g1.orthogonal * &g2.orthogonal), &z)?;
            let err = (t12 - t1 * t2).norm() / t12.norm().max(1.0);
            ensure(err < cfg.tolerances.matrix, || {
                Failure::with(
                    format!("relative error {err:.3e}"),
                    json!({ "g1": g1.spec.to_string(), "g2": g2.spec.to_string(), "point": point_json(&z) }),
                )
            })?;
            done += 1;
        }
        ensure(done == n, || Failure::new(format!("only {done} usable samples")))?;
        Ok(format!("{n} generator pairs"))
    }));
    EmbeddingOutcome { checks: out, calibration }
}

pub fn cusps(cfg: &Config) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let rs = enumerate_cusp_r();
    out.push(run_check("2079 non-zero isotropic classes", || {
        let iso = enumerate_isotropic().len();
        ensure(iso == 2079, || Failure::new(format!("{iso} classes")))?;
        Ok(format!("{iso} classes, {} including zero", iso + 1))
    }));
    out.push(run_check("2047 cusp matrices R", || {
        ensure(rs.len() == 2047, || Failure::new(format!("{} matrices", rs.len())))?;
        Ok(format!("2047 matrices; {} isotropic classes have no R representative", cusp_class_discrepancy()))
    }));
    out.push(run_check("entries are independent of the lift", || {
        let mut rng = rng(cfg, 40);
        let n = 5_000;
        for _ in 0..n {
            let r = *rs.choose(&mut rng).expect("non-empty");
            let a: u16 = rng.gen();
            let base = lift_characteristic(a);
            let g = (base.0 + random_octave(&mut rng, 3).scale(2), base.1 + random_octave(&mut rng, 3).scale(2));
            let even = rg_even(&r, &base);
            let ok = even == rg_even(&r, &g)
                && (!even || (r_bracket(&r, &g.0, &g.1) - r_bracket(&r, &base.0, &base.1)).rem_euclid(4) == 0);
            ensure(ok, || {
                Failure::with(
                    "entry depends on the lift",
                    json!({ "r": format!("{r:?}"), "characteristic": format!("{a:04x}"), "h1": octave_json(&g.0), "h2": octave_json(&g.1) }),
                )
            })?;
        }
        Ok(format!("{n} random lifts"))
    }));
    out.push(run_check("Gauss sums match the matrix entries", || {
        let mut rng = rng(cfg, 41);
        let n = 6;
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        for _ in 0..n {
            let r = *rs.choose(&mut rng).expect("non-empty");
            let a: u16 = rng.gen();
            let (h1, h2) = lift_characteristic(a);
            let base: [i64; 16] = std::array::from_fn(|k| if k < 8 { h1.f[k] } else { h2.f[k - 8] });
            let section = Section { base, step: 2, free: (0..16).collect(), count: 2 };
            let v = cusp_value_general(&|_| 1, &half, &RationalHermitian::from(&r), 4, &section, 1 << 16)?;
            let entry = numerator_entry(&r, a);
            let expected = if entry == ZERO_ENTRY {
                Cyclotomic::monomial(4, 0, 0)
            } else {
                Cyclotomic::monomial(4, entry as u64, 1 << 16)
            };
            ensure(v.sum == expected, || {
                Failure::with(
                    "exact sum differs from the entry",
                    json!({ "r": format!("{r:?}"), "characteristic": format!("{a:04x}") }),
                )
            })?;
        }
        Ok(format!("{n} random (R, a) pairs summed exactly"))
    }));
    out.push(run_check("denominators are non-zero powers of two", || {
        let m = build_cusp_matrix();
        ensure(m.rows == 2047 && m.cols == 1 << 16, || Failure::new(format!("matrix is {} x {}", m.rows, m.cols)))?;
        if let Some(i) = m.denominators.iter().position(|d| !d.unsigned_abs().is_power_of_two()) {
            return Err(Failure::with("bad denominator", json!({ "row": i, "value": m.denominators[i] })));
        }
        let min = m.denominators.iter().map(|d| d.unsigned_abs()).min().unwrap_or(0);
        Ok(format!("2047 rows, smallest |denominator| {min}"))
    }));
    out
}

/// Runs one suite, or all of them in [`Suite::ORDER`].
pub fn verify(suite: Suite, cfg: &Config) -> VerifyReport {
    let hash = cfg.hash();
    let suites = match suite {
        Suite::All => Suite::ORDER.to_vec(),
        s => vec![s],
    };
    let reports = suites
        .into_iter()
        .map(|s| match s {
            Suite::Algebra => SuiteReport::new("algebra", &hash, None, algebra(cfg)),
            Suite::Embedding => {
                let o = embedding(cfg);
                SuiteReport::new("embedding", &hash, o.calibration, o.checks)
            }
            Suite::Cusps => SuiteReport::new("cusps", &hash, None, cusps(cfg)),
            Suite::All => unreachable!("expanded above"),
        })
        .collect();
    VerifyReport::new(&hash, reports)
}

/// The calibration the embedding suite settled on, if it ran and passed its
/// equivariance check.
pub fn settled_calibration(report: &VerifyReport) -> Option<Calibration> {
    report
        .suites
        .iter()
        .find(|s| s.suite == "embedding")
        .filter(|s| s.checks.iter().any(|c| c.name.starts_with("equivariance") && c.status == Status::Pass))
        .and_then(|s| s.calibration)
}
