//! Acceptance criteria. Runs as a plain binary so the per-criterion lines
//! always show up in `cargo test` output.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use saddlenf::job::{assess_outcome, EXIT_CONFIG, EXIT_FINDING, EXIT_OK};
use saddlenf::report::{OutcomeRecord, Report};
use saddlenf::suite::{convergent_determinants, oracle_agreement, set_algebra};
use saddlenf::verify::{brute_cone_member, naive_compose, random_resonant_saddle, GeneratorSpec, DEFAULT_SEARCH_BOUND};
use saddlenf::job::RatioLiteral;
use saddlenf_core::lattice::{resonance_frame, theorem2_frame, QuadraticSurd, RatioSpec};
use saddlenf_core::normalform::{
    decay_sweep, extract_structure_t1, extract_structure_t2, pipeline_theorem1, pipeline_theorem2, NormalFormOutcome,
};
use saddlenf_core::series::{map_compose, map_inverse, to_multiplier_view};
use saddlenf_core::{ApproxComplex, ConeTag, Frame, MultiIndex, ParamJet, PlanarMap, Rational, Scalar};
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden() -> RatioSpec {
    RatioSpec::Surd(QuadraticSurd::golden())
}

fn criterion_1() -> Outcome {
    for n in 0..=3 {
        let f = resonance_frame(3, 2, n).map_err(|e| e.to_string())?;
        ensure(f.alpha0() == MultiIndex::new(2, 1) && f.alpha1() == MultiIndex::new(1, 1), || {
            format!("N={n}: alpha0 {} alpha1 {}", f.alpha0(), f.alpha1())
        })?;
    }
    Ok("alpha0 = (2,1), alpha1 = (1,1) for N = 0..3".into())
}

fn criterion_2() -> Outcome {
    let fib = [0u32, 1, 1, 2, 3, 5, 8, 13, 21];
    for k in 0..=2usize {
        let f = theorem2_frame(&golden(), k as u32).map_err(|e| e.to_string())?;
        let u = MultiIndex::new(fib[2 * k + 1], fib[2 * k + 2]);
        let ut = u + MultiIndex::new(fib[2 * k], fib[2 * k + 1]);
        ensure(f.u() == u && f.u_tilde() == ut, || {
            format!("k={k}: u {} u~ {}, expected {u} {ut}", f.u(), f.u_tilde())
        })?;
    }
    let det = convergent_determinants(50, 25, 2);
    ensure(det.pass, || det.detail.clone())?;
    Ok(format!("Fibonacci frames for k = 0,1,2; determinants: {}", det.detail))
}

fn criterion_3() -> Outcome {
    let mut cases = 0;
    for (p, q, n) in [(3, 2, 1), (2, 1, 0), (5, 3, 2), (1, 1, 0)] {
        let c = set_algebra(p, q, n, 50);
        ensure(c.pass, || format!("{}: {}", c.name, c.detail))?;
        let frame: Frame = resonance_frame(p, q, n).map_err(|e| e.to_string())?.into();
        let o = oracle_agreement(&frame, &format!("{p},{q},{n}"), 30, DEFAULT_SEARCH_BOUND);
        ensure(o.pass, || format!("{}: {}", o.name, o.detail))?;
        cases += 1;
    }
    Ok(format!("{cases} frames: partitions, inclusions and oracle agreement hold"))
}

fn survivors_in(g: &PlanarMap<impl Scalar>, frame: &Frame, tag: ConeTag) -> Result<usize, String> {
    let view = to_multiplier_view(g).map_err(|e| e.to_string())?;
    let mut count = 0;
    for i in 0..2 {
        for m in view.exponents(i) {
            count += 1;
            ensure(brute_cone_member(m, tag, frame, DEFAULT_SEARCH_BOUND), || {
                format!("component {} multiplier {m} outside {}", i + 1, tag.name())
            })?;
        }
    }
    Ok(count)
}

fn resonant_map(seed: u64, n: u32, degree: u32) -> Result<PlanarMap<Rational>, String> {
    random_resonant_saddle(&GeneratorSpec::resonant(seed, 3, 2, n, "2", degree), &Rational::zero())
        .map_err(|e| e.to_string())
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    let mut survivors = 0;
    for n in 0..=2 {
        let frame = resonance_frame(3, 2, n).map_err(|e| e.to_string())?;
        for seed in 0..10 {
            let f = resonant_map(seed, n, 12)?;
            let t = Instant::now();
            let o = pipeline_theorem1(&f, &frame, 12).map_err(|e| format!("N={n} seed={seed}: {e}"))?;
            let secs = t.elapsed().as_secs_f64();
            worst = worst.max(secs);
            ensure(secs < 60.0, || format!("N={n} seed={seed}: {secs:.1} s"))?;
            ensure(o.residual.exact_zero, || format!("N={n} seed={seed}: nonzero residual"))?;
            let a = assess_outcome(&f, &o, false);
            ensure(a.checks.iter().all(|c| c.pass), || format!("N={n} seed={seed}: {:?}", a.checks))?;
            survivors += survivors_in(&o.g, &o.frame, ConeTag::HatB)?;
            extract_structure_t1(&o.g, &frame).map_err(|e| format!("N={n} seed={seed}: {e}"))?;
            ensure(o.g.preserves_axes(), || format!("N={n} seed={seed}: axes not invariant"))?;
        }
    }
    Ok(format!("30 maps, {survivors} surviving multipliers all in HatB, slowest {worst:.1} s"))
}

fn criterion_5() -> Outcome {
    let like = ApproxComplex::real(0.0).map_err(|e| e.to_string())?;
    let mut worst_res = 0.0f64;
    let mut slowest = 0.0f64;
    for seed in 0..5 {
        let spec = GeneratorSpec::irrational(seed, RatioLiteral::Surd([1, 1, 2, 5]), 1, 1.0, 12);
        let f = random_resonant_saddle(&spec, &like).map_err(|e| e.to_string())?;
        let t = Instant::now();
        let o = pipeline_theorem2(&f, &golden(), 1, 12).map_err(|e| format!("seed={seed}: {e}"))?;
        slowest = slowest.max(t.elapsed().as_secs_f64());
        let Frame::Convergent(cf) = &o.frame else {
            return Err("expected a convergent frame".into());
        };
        ensure(cf.u() == MultiIndex::new(2, 3) && cf.u_tilde() == MultiIndex::new(3, 5), || {
            format!("frame u {} u~ {}", cf.u(), cf.u_tilde())
        })?;
        ensure(o.residual.relative <= 1e-9, || format!("seed={seed}: relative residual {:e}", o.residual.relative))?;
        worst_res = worst_res.max(o.residual.relative);
        survivors_in(&o.g, &o.frame, ConeTag::IrrFinal)?;
        extract_structure_t2(&o.g, cf).map_err(|e| format!("seed={seed}: {e}"))?;
    }
    ensure(slowest < 60.0, || format!("slowest map {slowest:.1} s"))?;
    Ok(format!("5 maps, worst relative residual {worst_res:e}, slowest {slowest:.1} s"))
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    for n in 0..=2 {
        let frame: Frame = resonance_frame(3, 2, n).map_err(|e| e.to_string())?.into();
        let s = decay_sweep(&frame, [0.25, 8.0], 30).map_err(|e| e.to_string())?;
        ensure(s.holds, || format!("(3,2,{n}): worst ratio {}", s.worst_ratio))?;
        checked += s.checked;
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    for k in 0..=2 {
        let frame: Frame = theorem2_frame(&golden(), k).map_err(|e| e.to_string())?.into();
        let s = decay_sweep(&frame, [(-1f64).exp(), (1.0 / phi).exp()], 30).map_err(|e| e.to_string())?;
        ensure(s.holds, || format!("golden k={k}: worst ratio {}", s.worst_ratio))?;
        checked += s.checked;
    }
    Ok(format!("{checked} cone members within slack 1e-12"))
}

fn criterion_7() -> Outcome {
    let base = resonant_map(0, 1, 10)?;
    let frame = resonance_frame(3, 2, 1).map_err(|e| e.to_string())?;
    let like = ParamJet::constant(Rational::zero(), 3);
    // coefficients c·(1 + λ), μ₁ = 1/4 + λ
    let lift = |c: &Rational| ParamJet::new(vec![c.clone(), c.clone(), Rational::zero(), Rational::zero()]).unwrap();
    let mut jet = base.map_coeffs(lift);
    jet = PlanarMap::new(
        ParamJet::variable(Rational::new(1, 4), 3),
        ParamJet::constant(Rational::from_integer(8), 3),
        jet.nonlinear(0).clone(),
        jet.nonlinear(1).clone(),
    )
    .map_err(|e| e.to_string())?;
    ensure(jet.mu(0).order() == like.order(), || "jet order".into())?;
    let t = Instant::now();
    let o = pipeline_theorem1(&jet, &frame, 10).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    ensure(o.residual.exact_zero, || "jet residual is not the zero jet".into())?;
    let b = pipeline_theorem1(&base, &frame, 10).map_err(|e| e.to_string())?;
    let at0 = |m: &PlanarMap<ParamJet<Rational>>| m.map_coeffs(|c| c.constant_term().clone());
    ensure(at0(&o.g) == b.g, || "g at λ=0 differs from the base ring".into())?;
    ensure(at0(&o.h) == b.h, || "h at λ=0 differs from the base ring".into())?;
    ensure(at0(&o.h_inv) == b.h_inv, || "h⁻¹ at λ=0 differs from the base ring".into())?;
    let moving = o.g.nonlinear(0).terms().chain(o.g.nonlinear(1).terms()).filter(|(_, c)| {
        c.coefficients()[1..].iter().any(|x| !x.is_zero())
    });
    let moving = moving.count();
    ensure(secs < 120.0, || format!("{secs:.1} s"))?;
    Ok(format!("zero jet residual, λ=0 matches base ring; {moving} g coefficients depend on λ; {secs:.1} s"))
}

fn criterion_8() -> Outcome {
    for seed in 0..20 {
        let f = resonant_map(100 + seed, 1, 5)?;
        let g = resonant_map(200 + seed, 0, 5)?;
        let fg = map_compose(&f, &g).map_err(|e| e.to_string())?;
        ensure(fg == naive_compose(&f, &g).map_err(|e| e.to_string())?, || format!("seed {seed}: compose"))?;
        let inv = map_inverse(&f).map_err(|e| e.to_string())?;
        let id = PlanarMap::identity(&Rational::one(), 5);
        ensure(naive_compose(&f, &inv).map_err(|e| e.to_string())? == id, || format!("seed {seed}: F∘F⁻¹"))?;
        ensure(naive_compose(&inv, &f).map_err(|e| e.to_string())? == id, || format!("seed {seed}: F⁻¹∘F"))?;
    }
    let big = resonant_map(7, 1, 12)?;
    let inv = map_inverse(&big).map_err(|e| e.to_string())?;
    let back = map_compose(&big, &inv).map_err(|e| e.to_string())?;
    ensure(back == PlanarMap::identity(&Rational::one(), 12), || "F∘F⁻¹ ≠ id at D=12".into())?;
    Ok("20 maps agree with naive substitution at D=5; F∘F⁻¹ = id at D=12".into())
}

fn jobs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("jobs")
}

fn run_cli(job: &str, out: &std::path::Path) -> Result<(i32, Report, String), String> {
    let res = Command::new(env!("CARGO_BIN_EXE_saddlenf"))
        .arg("run")
        .arg(jobs_dir().join(job))
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    let code = res.status.code().ok_or("killed by signal")?;
    let text = std::fs::read_to_string(out).map_err(|e| e.to_string())?;
    let report = Report::from_json(&text).map_err(|e| e.to_string())?;
    Ok((code, report, String::from_utf8_lossy(&res.stderr).into_owned()))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("report.json");

    let (code, r, _) = run_cli("linear.json", &out)?;
    ensure(code == EXIT_OK && r.exit_code == EXIT_OK, || format!("linear job exit {code}"))?;
    let o = r.outcome.as_ref().ok_or("linear job has no outcome")?;
    let empty = o.structure["components"]
        .as_array()
        .is_some_and(|cs| cs.iter().all(|c| c.as_object().is_some_and(|m| m.values().all(|v| v == &Value::Array(vec![])))));
    ensure(empty && o.g.terms.is_empty() && o.diagnostics.residual_exact_zero, || {
        "linear job: structure or residual not empty".into()
    })?;

    let (code, r, _) = run_cli("resonant_fixture.json", &out)?;
    ensure(code == EXIT_OK, || format!("fixture exit {code}: {:?}", r.checks))?;
    ensure(r.checks.iter().all(|c| c.pass), || format!("fixture checks {:?}", r.checks))?;

    let (code, r, err) = run_cli("precondition_failure.json", &out)?;
    let kind = r.error.as_ref().map(|e| e.kind.clone()).unwrap_or_default();
    ensure(code == EXIT_CONFIG && kind == "PreconditionError" && err.contains("PreconditionError"), || {
        format!("precondition job: exit {code}, kind {kind}")
    })?;

    let (code, r, err) = run_cli("non_coprime.json", &out)?;
    let kind = r.error.as_ref().map(|e| e.kind.clone()).unwrap_or_default();
    ensure(code == EXIT_CONFIG && kind == "NotCoprime" && err.contains("NotCoprime"), || {
        format!("non-coprime job: exit {code}, kind {kind}")
    })?;

    // Inject x₁²·x₁ into g₁, multiplier (2,0) ∉ HatB, into a genuine outcome.
    let f = resonant_map(0, 1, 8)?;
    let frame = resonance_frame(3, 2, 1).map_err(|e| e.to_string())?;
    let mut mocked: NormalFormOutcome<Rational> = pipeline_theorem1(&f, &frame, 8).map_err(|e| e.to_string())?;
    mocked.g.nonlinear_mut(0).add_term(MultiIndex::new(3, 0), Rational::new(1, 5));
    let a = assess_outcome(&f, &mocked, false);
    let report = Report::success(Value::Null, OutcomeRecord::new(&mocked), a, None);
    ensure(report.exit_code == EXIT_FINDING, || format!("mocked outcome exit {}", report.exit_code))?;
    let hit = report
        .findings
        .iter()
        .any(|w| w.component == 1 && w.exponent == [2, 0] && w.exponent_kind == "multiplier");
    ensure(hit, || format!("no witness for (2,0): {:?}", report.findings))?;
    Ok("example jobs exit 0/0/1, non-coprime exits 1 (NotCoprime), mocked HatB violation exits 2 with witness".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Bezout fixture", criterion_1),
        ("Fibonacci fixture", criterion_2),
        ("Set algebra sweep", criterion_3),
        ("Resonant pipeline, exact", criterion_4),
        ("Irrational pipeline, approximate", criterion_5),
        ("Decay estimates", criterion_6),
        ("Jet coherence", criterion_7),
        ("Series kernel oracle", criterion_8),
        ("CLI contract", criterion_9),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS criterion {} ({name}) [{secs:.2} s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) [{secs:.2} s]: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
