//! The verification suite: set algebra, oracle agreement, convergent
//! determinants, decay sweeps, generator validity and small pipeline runs.

use std::path::Path;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saddlenf_core::lattice::{
    cf_convergents, cf_quotients, cone_member, resonance_frame, theorem2_frame, QuadraticSurd, RatioSpec,
};
use saddlenf_core::normalform::{check_preconditions, decay_sweep, pipeline_theorem1, pipeline_theorem2, ModeData};
use saddlenf_core::{ApproxComplex, ConeTag, Frame, MultiIndex, Rational};
use serde::{Deserialize, Serialize};

use crate::dump::{CONVERGENT_TAGS, RESONANT_TAGS};
use crate::job::{assess_outcome, RatioLiteral, EXIT_CONFIG, EXIT_FINDING, EXIT_OK};
use crate::report::CheckRecord;
use crate::verify::{brute_cone_member, generator_frame, random_resonant_saddle, GeneratorSpec, GeneratorTarget};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteMatrix {
    /// `(p, q, N)` triples.
    pub frames: Vec<[u32; 3]>,
    pub set_algebra_maxdeg: u32,
    pub oracle_maxdeg: u32,
    pub search_bound: i64,
    /// Surds `[a, b, c, d]` for `(a + b√d)/c` with the convergent indices to use.
    pub surds: Vec<[i64; 4]>,
    pub convergent_ks: Vec<u32>,
    /// Random surds for the determinant check, and how many quotients each.
    pub random_surds: usize,
    pub determinant_terms: usize,
    pub decay_maxdeg: u32,
    /// Resonant generator bases `c` tried for every frame.
    pub generator_bases: Vec<String>,
    pub pipelines: Vec<GeneratorSpec>,
}

impl Default for SuiteMatrix {
    fn default() -> Self {
        SuiteMatrix {
            frames: vec![[3, 2, 1], [2, 1, 0], [5, 3, 2], [1, 1, 0]],
            set_algebra_maxdeg: 50,
            oracle_maxdeg: 30,
            search_bound: crate::verify::DEFAULT_SEARCH_BOUND,
            surds: vec![[1, 1, 2, 5], [0, 1, 1, 2], [1, 1, 1, 3]],
            convergent_ks: vec![0, 1, 2],
            random_surds: 50,
            determinant_terms: 25,
            decay_maxdeg: 30,
            generator_bases: vec!["2".into(), "3/2".into(), "5".into()],
            pipelines: vec![
                GeneratorSpec::resonant(1, 3, 2, 1, "2", 8),
                GeneratorSpec::resonant(2, 2, 1, 0, "3", 8),
                GeneratorSpec::resonant(3, 1, 1, 0, "2", 8),
                GeneratorSpec::irrational(4, RatioLiteral::Surd([1, 1, 2, 5]), 1, 1.0, 8),
            ],
        }
    }
}

impl SuiteMatrix {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            format!("matrix schema error at `{path}`: {}", e.into_inner())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_FINDING
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        s
    }
}

fn check(name: String, failures: Vec<String>, total: usize) -> CheckRecord {
    let pass = failures.is_empty();
    let detail = if pass {
        format!("{total} cases")
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        format!("{} of {total} failed, e.g. {}", failures.len(), shown.join("; "))
    };
    CheckRecord { name, pass, detail }
}

fn member(m: MultiIndex, t: ConeTag, f: &Frame) -> bool {
    cone_member(m, t, f).expect("resonant tag on a resonant frame")
}

/// Partition and inclusion identities between the resonant sets on
/// `|m| ≤ maxdeg`.
pub fn set_algebra(p: u32, q: u32, n: u32, maxdeg: u32) -> CheckRecord {
    let name = format!("set_algebra({p},{q},{n})");
    let frame: Frame = match resonance_frame(p, q, n) {
        Ok(f) => f.into(),
        Err(e) => return CheckRecord::new(&name, false, e.to_string()),
    };
    let mut failures = Vec::new();
    let mut total = 0;
    for m in MultiIndex::up_to_degree(maxdeg) {
        total += 1;
        let g0 = member(m, ConeTag::G0, &frame);
        let b0 = member(m, ConeTag::B0, &frame);
        let b1 = member(m, ConeTag::B1, &frame);
        let b2 = member(m, ConeTag::B2, &frame);
        let tb = member(m, ConeTag::TildeB, &frame);
        let hb = member(m, ConeTag::HatB, &frame);
        if g0 == b0 {
            failures.push(format!("{m}: G0/B0 not a partition"));
        }
        if b0 != (b1 || b2) || (b1 && b2) {
            failures.push(format!("{m}: B0 is not B1 ⊎ B2"));
        }
        if b0 && !tb {
            failures.push(format!("{m}: in B0 but not TildeB"));
        }
        if hb && !tb {
            failures.push(format!("{m}: in HatB but not TildeB"));
        }
    }
    check(name, failures, total)
}

/// Closed-form membership against the definition-level search.
pub fn oracle_agreement(frame: &Frame, label: &str, maxdeg: u32, bound: i64) -> CheckRecord {
    let tags: &[ConeTag] = match frame {
        Frame::Resonance(_) => &RESONANT_TAGS,
        Frame::Convergent(_) => &CONVERGENT_TAGS,
    };
    let mut failures = Vec::new();
    let mut total = 0;
    for m in MultiIndex::up_to_degree(maxdeg) {
        for &t in tags {
            total += 1;
            let closed = cone_member(m, t, frame).expect("tags match the frame");
            if closed != brute_cone_member(m, t, frame, bound) {
                failures.push(format!("{m} {}: closed form says {closed}", t.name()));
            }
        }
    }
    check(format!("oracle_agreement({label})"), failures, total)
}

/// `|q_n p_{n−1} − q_{n−1} p_n| = 1` with alternating sign, on `count`
/// seeded random surds.
pub fn convergent_determinants(count: usize, terms: usize, seed: u64) -> CheckRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut made = 0;
    while made < count {
        let (a, b, c, d) = (
            rng.random_range(-20..=20i64),
            rng.random_range(1..=9i64),
            rng.random_range(1..=15i64),
            rng.random_range(2..=99i64),
        );
        let Ok(s) = QuadraticSurd::from_i64(a, b, c, d) else { continue };
        made += 1;
        let Ok(e) = cf_quotients(&RatioSpec::Surd(s.clone()), terms) else {
            failures.push(format!("{s}: expansion failed"));
            continue;
        };
        let conv = cf_convergents(&e.quotients);
        let mut prev_sign: Option<bool> = None;
        for w in conv.windows(2) {
            let ((q0, p0), (q1, p1)) = (&w[0], &w[1]);
            let det: BigInt = q1 * p0 - q0 * p1;
            let unit = det == BigInt::from(1) || det == BigInt::from(-1);
            let sign = det == BigInt::from(1);
            if !unit || prev_sign == Some(sign) {
                failures.push(format!("{s}: determinant {det}"));
                break;
            }
            prev_sign = Some(sign);
        }
    }
    check("convergent_determinants".into(), failures, count)
}

/// Decay inequalities on the stage cones for multipliers `μ₁ = c^{−q}`,
/// `μ₂ = c^p`.
pub fn decay_check(frame: &Frame, label: &str, moduli: [f64; 2], maxdeg: u32) -> CheckRecord {
    let name = format!("decay({label})");
    match decay_sweep(frame, moduli, maxdeg) {
        Ok(s) => {
            let mut detail = format!("{} exponents, worst ratio {:.15}", s.checked, s.worst_ratio);
            if let Some(n) = s.holds_with_n {
                detail.push_str(&format!("; N-exponent variant {}", if n { "holds" } else { "fails" }));
            }
            CheckRecord { name, pass: s.holds, detail }
        }
        Err(e) => CheckRecord::new(&name, false, e.to_string()),
    }
}

/// Generated resonant families pass the exact precondition check.
pub fn generator_validity(frames: &[[u32; 3]], bases: &[String]) -> CheckRecord {
    let mut failures = Vec::new();
    let mut total = 0;
    for &[p, q, n] in frames {
        for (seed, c) in bases.iter().enumerate() {
            total += 1;
            let spec = GeneratorSpec::resonant(seed as u64, p, q, n, c, 4);
            let res = random_resonant_saddle(&spec, &Rational::zero()).and_then(|f| {
                check_preconditions(f.mu(0), f.mu(1), &ModeData::Theorem1 { p, q })
            });
            match res {
                Ok(r) if r.exact => {}
                Ok(_) => failures.push(format!("({p},{q}) c={c}: resonance not exact")),
                Err(e) => failures.push(format!("({p},{q}) c={c}: {e}")),
            }
        }
    }
    check("generator_validity".into(), failures, total)
}

/// Generate, run and assess one pipeline case.
pub fn pipeline_case(spec: &GeneratorSpec) -> CheckRecord {
    let name = format!("pipeline(seed {}, degree {})", spec.seed, spec.degree);
    let target = match generator_frame(spec) {
        Ok(t) => t,
        Err(e) => return CheckRecord::new(&name, false, e.to_string()),
    };
    let failed = |a: crate::job::Assessment| {
        let bad: Vec<String> = a.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
        (bad.is_empty() && a.findings.is_empty(), bad.join("; "))
    };
    let result = match target {
        GeneratorTarget::Resonance(frame) => random_resonant_saddle(spec, &Rational::zero()).and_then(|f| {
            pipeline_theorem1(&f, &frame, spec.degree).map(|o| failed(assess_outcome(&f, &o, true)))
        }),
        GeneratorTarget::Ratio(ratio, k) => {
            let like = ApproxComplex::real(0.0).expect("finite");
            random_resonant_saddle(spec, &like).and_then(|f| {
                pipeline_theorem2(&f, &ratio, k, spec.degree).map(|o| failed(assess_outcome(&f, &o, true)))
            })
        }
    };
    match result {
        Ok((true, _)) => CheckRecord::new(&name, true, "all outcome checks pass".into()),
        Ok((false, why)) => CheckRecord::new(&name, false, why),
        Err(e) => CheckRecord::new(&name, false, e.to_string()),
    }
}

/// Convergent frames of the matrix surds, with the surd's value.
fn surd_frames(m: &SuiteMatrix) -> Vec<(String, saddlenf_core::Result<(Frame, f64)>)> {
    let mut out = Vec::new();
    for &[a, b, c, d] in &m.surds {
        for &k in &m.convergent_ks {
            let label = format!("({a}+{b}√{d})/{c}, k={k}");
            let frame = QuadraticSurd::from_i64(a, b, c, d)
                .and_then(|s| Ok((theorem2_frame(&RatioSpec::Surd(s.clone()), k)?.into(), s.to_f64())));
            out.push((label, frame));
        }
    }
    out
}

/// Run every section of the matrix; sections run on scoped threads.
pub fn verify_suite(m: &SuiteMatrix) -> SuiteReport {
    type Job<'a> = Box<dyn FnOnce() -> Vec<CheckRecord> + Send + 'a>;
    let mut jobs: Vec<Job> = Vec::new();
    for &[p, q, n] in &m.frames {
        jobs.push(Box::new(move || {
            let mut out = vec![set_algebra(p, q, n, m.set_algebra_maxdeg)];
            match resonance_frame(p, q, n) {
                Ok(f) => {
                    let frame: Frame = f.into();
                    let label = format!("{p},{q},{n}");
                    out.push(oracle_agreement(&frame, &label, m.oracle_maxdeg, m.search_bound));
                    let moduli = [2f64.powi(-(q as i32)), 2f64.powi(p as i32)];
                    out.push(decay_check(&frame, &label, moduli, m.decay_maxdeg));
                }
                Err(e) => out.push(CheckRecord::new(&format!("frame({p},{q},{n})"), false, e.to_string())),
            }
            out
        }));
    }
    jobs.push(Box::new(move || {
        let mut out = Vec::new();
        for (label, frame) in surd_frames(m) {
            let (frame, ratio) = match frame {
                Ok(x) => x,
                Err(e) => {
                    out.push(CheckRecord::new(&format!("frame({label})"), false, e.to_string()));
                    continue;
                }
            };
            out.push(oracle_agreement(&frame, &label, m.oracle_maxdeg, m.search_bound));
            let moduli = [(-1f64).exp(), (1.0 / ratio).exp()];
            out.push(decay_check(&frame, &label, moduli, m.decay_maxdeg));
        }
        out.push(convergent_determinants(m.random_surds, m.determinant_terms, 0xc0f));
        out
    }));
    jobs.push(Box::new(move || vec![generator_validity(&m.frames, &m.generator_bases)]));
    for spec in &m.pipelines {
        jobs.push(Box::new(move || vec![pipeline_case(spec)]));
    }
    let checks = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.into_iter().map(|j| s.spawn(j)).collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap_or_else(|_| vec![CheckRecord::new("suite", false, "section panicked".into())]))
            .collect()
    });
    SuiteReport { checks }
}

/// CLI entry: runs the suite and prints one line per check.
pub fn run_suite(matrix: Option<&Path>) -> i32 {
    let m = match matrix {
        Some(p) => match SuiteMatrix::from_file(p) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("error [Config]: {e}");
                return EXIT_CONFIG;
            }
        },
        None => SuiteMatrix::default(),
    };
    let r = verify_suite(&m);
    print!("{}", r.render());
    r.exit_code()
}
