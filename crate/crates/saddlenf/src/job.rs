//! Job files and their execution.

use std::path::Path;

use num_bigint::BigInt;
use saddlenf_core::lattice::{resonance_frame, QuadraticSurd, RatioSpec};
use saddlenf_core::normalform::{
    audit_outcome, conjugacy_residual, decay_sweep, pipeline_theorem1, pipeline_theorem2, NormalFormOutcome,
    Orientation,
};
use saddlenf_core::{ApproxComplex, Error, GaussianRational, MultiIndex, ParamJet, PlanarMap, Rational, Scalar};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::literal::{Literal, LiteralError};
use crate::report::{CheckRecord, ErrorRecord, OutcomeRecord, Report, WitnessRecord};
use crate::verify::{conjugacy_oracle, random_resonant_saddle, CoefficientPool, GeneratorFrame, GeneratorSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FINDING: i32 = 2;

/// Relative tolerance of the numerical checks in approximate rings.
pub const CHECK_TOL: f64 = 1e-9;

/// Degree up to which the decay sweep runs.
pub const DECAY_SWEEP_DEGREE: u32 = 30;

pub const ORACLE_SAMPLES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Theorem1,
    Theorem2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseRing {
    Rational,
    Gaussian,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RingSpec {
    Rational,
    Gaussian,
    Complex,
    Jet { order: usize, base: BaseRing },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    /// 1 or 2.
    pub component: u8,
    pub exponent: [u32; 2],
    pub coeff: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Params {
    pub p: u32,
    pub q: u32,
    #[serde(rename = "N")]
    pub n: u32,
}

/// `R` as written in a job: `{"surd": [a, b, c, d]}` for `(a + b√d)/c`,
/// `{"quotients": [..]}`, `{"rational": "a/b"}` or
/// `{"float": {"value": x, "max_terms": n}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RatioLiteral {
    Surd([i64; 4]),
    Quotients(Vec<u64>),
    Rational(String),
    Float { value: f64, max_terms: usize },
}

impl RatioLiteral {
    pub fn to_spec(&self) -> Result<RatioSpec, Error> {
        Ok(match self {
            RatioLiteral::Surd([a, b, c, d]) => RatioSpec::Surd(QuadraticSurd::from_i64(*a, *b, *c, *d)?),
            RatioLiteral::Quotients(qs) => RatioSpec::Quotients(qs.iter().map(|&q| BigInt::from(q)).collect()),
            RatioLiteral::Rational(s) => RatioSpec::Rational(
                crate::literal::parse_rational(s).ok_or_else(|| Error::Config(format!("bad ratio {s}")))?,
            ),
            RatioLiteral::Float { value, max_terms } => RatioSpec::Float {
                value: *value,
                max_terms: *max_terms,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem2Params {
    pub ratio: RatioLiteral,
    pub k: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobOptions {
    #[serde(default)]
    pub emit_lattice: bool,
    #[serde(default)]
    pub verify: bool,
}

/// Seeded random terms added to the explicit term list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomTerms {
    pub seed: u64,
    pub density: f64,
    #[serde(default)]
    pub pool: CoefficientPool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub mode: Mode,
    pub ring: RingSpec,
    pub mu1: Value,
    pub mu2: Value,
    #[serde(default)]
    pub terms: Vec<TermRecord>,
    #[serde(default)]
    pub random: Option<RandomTerms>,
    pub degree: u32,
    #[serde(default)]
    pub theorem1: Option<Theorem1Params>,
    #[serde(default)]
    pub theorem2: Option<Theorem2Params>,
    #[serde(default)]
    pub options: JobOptions,
}

#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error at `{path}` (line {line}, column {column}): {message}")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {source}")]
    Literal { field: String, source: LiteralError },
    #[error("invalid job: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl JobError {
    /// Stable name used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            JobError::Io { .. } => "Io",
            JobError::Syntax { .. } => "Syntax",
            JobError::Schema { .. } => "Schema",
            JobError::Literal { .. } => "Literal",
            JobError::Invalid(_) => "InvalidJob",
            JobError::Core(e) => match e {
                Error::Config(_) => "Config",
                Error::NonInvertible { .. } => "NonInvertible",
                Error::NotCoprime { .. } => "NotCoprime",
                Error::NotIrrational(_) => "NotIrrational",
                Error::Domain(_) => "Domain",
                Error::Precondition(_) => "PreconditionError",
                Error::SmallDivisor { .. } => "SmallDivisor",
                Error::Structure(_) => "StructureError",
                Error::NonFinite(_) => "NonFinite",
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Core(Error::Structure(_)) => EXIT_FINDING,
            _ => EXIT_CONFIG,
        }
    }
}

/// Parse and schema-check a job.
pub fn parse_job(text: &str) -> Result<(Value, JobFile), JobError> {
    let echo: Value = serde_json::from_str(text).map_err(|e| JobError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let job: JobFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        JobError::Schema {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    match (job.mode, &job.theorem1, &job.theorem2) {
        (Mode::Theorem1, Some(_), None) | (Mode::Theorem2, None, Some(_)) => {}
        (Mode::Theorem1, _, _) => return Err(JobError::Invalid("mode theorem1 needs exactly a `theorem1` block".into())),
        (Mode::Theorem2, _, _) => return Err(JobError::Invalid("mode theorem2 needs exactly a `theorem2` block".into())),
    }
    Ok((echo, job))
}

fn literal<S: Literal>(v: &Value, like: &S, field: String) -> Result<S, JobError> {
    S::from_literal(v, like).map_err(|source| JobError::Literal { field, source })
}

/// The input map of a job in the ring of `like`.
pub fn build_map<S: Literal>(job: &JobFile, like: &S) -> Result<PlanarMap<S>, JobError> {
    let mu1 = literal(&job.mu1, like, "mu1".into())?;
    let mu2 = literal(&job.mu2, like, "mu2".into())?;
    let mut terms = Vec::with_capacity(job.terms.len());
    for (n, t) in job.terms.iter().enumerate() {
        if !(1..=2).contains(&t.component) {
            return Err(JobError::Invalid(format!("terms[{n}].component must be 1 or 2")));
        }
        let c = literal(&t.coeff, like, format!("terms[{n}].coeff"))?;
        terms.push((t.component as usize - 1, MultiIndex::new(t.exponent[0], t.exponent[1]), c));
    }
    let base = PlanarMap::from_terms(mu1, mu2, job.degree, terms)?;
    let Some(r) = &job.random else {
        return Ok(base);
    };
    // placeholder frame: only the pool and density matter for the terms
    let spec = GeneratorSpec {
        seed: r.seed,
        frame: GeneratorFrame::Resonant {
            p: 1,
            q: 1,
            n: 0,
            c: "2".into(),
        },
        density: r.density,
        pool: r.pool.clone(),
        degree: job.degree,
    };
    let extra = random_resonant_saddle(&spec, like)?;
    let mut out = base;
    for i in 0..2 {
        for (k, c) in extra.nonlinear(i).terms() {
            out.nonlinear_mut(i).add_term(*k, c.clone());
        }
    }
    Ok(out)
}

/// Run the pipeline selected by the job's mode.
pub fn run_pipeline<S: Literal>(job: &JobFile, f: &PlanarMap<S>) -> Result<NormalFormOutcome<S>, JobError> {
    Ok(match job.mode {
        Mode::Theorem1 => {
            let t = job.theorem1.expect("checked by parse_job");
            pipeline_theorem1(f, &resonance_frame(t.p, t.q, t.n)?, job.degree)?
        }
        Mode::Theorem2 => {
            let t = job.theorem2.as_ref().expect("checked by parse_job");
            pipeline_theorem2(f, &t.ratio.to_spec()?, t.k, job.degree)?
        }
    })
}

/// Checks and findings for an outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub checks: Vec<CheckRecord>,
    pub findings: Vec<WitnessRecord>,
}

impl Assessment {
    pub fn exit_code(&self) -> i32 {
        if self.findings.is_empty() && self.checks.iter().all(|c| c.pass) {
            EXIT_OK
        } else {
            EXIT_FINDING
        }
    }
}

fn map_deviation<S: Scalar>(a: &PlanarMap<S>, b: &PlanarMap<S>) -> (bool, f64) {
    let mut exact_zero = a.mu(0) == b.mu(0) && a.mu(1) == b.mu(1);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        let d = a.nonlinear(i).sub(b.nonlinear(i));
        exact_zero &= d.terms().all(|(_, c)| c.is_zero());
        worst = worst.max(d.max_abs());
    }
    (exact_zero, worst)
}

fn tolerance_check(name: &str, exact: bool, exact_zero: bool, value: f64, scale: f64) -> CheckRecord {
    if exact {
        CheckRecord::new(name, exact_zero, if exact_zero { "exactly zero".into() } else { format!("nonzero, max {value:e}") })
    } else {
        let rel = value / scale.max(1.0);
        CheckRecord::new(name, rel <= CHECK_TOL, format!("relative {rel:e} (tolerance {CHECK_TOL:e})"))
    }
}

/// Re-derive the invariants of an outcome for the input `f`: survivors and
/// shape, axis invariance, the conjugacy identity, and with `verify` also
/// `h∘h⁻¹ = id`, the decay sweep and the orbit oracle.
pub fn assess_outcome<S: Scalar>(f: &PlanarMap<S>, outcome: &NormalFormOutcome<S>, verify: bool) -> Assessment {
    let mut checks = Vec::new();
    let mut findings = Vec::new();
    match audit_outcome(outcome) {
        Ok(_) => checks.push(CheckRecord::new("survivors_and_structure", true, "all survivors in the final set".into())),
        Err(e) => {
            findings.extend(e.witnesses().iter().map(WitnessRecord::from));
            checks.push(CheckRecord::new("survivors_and_structure", false, e.to_string()));
        }
    }
    checks.push(CheckRecord::new(
        "axes_invariant",
        outcome.g.preserves_axes(),
        "every monomial of g_i contains x_i".into(),
    ));
    let d = outcome.degree;
    let f = f.truncate(d);
    match conjugacy_residual(&f, &outcome.g, &outcome.h) {
        Ok(r) => {
            let mut c = tolerance_check("conjugacy_residual", S::EXACT, r.exact_zero, r.max_abs, 1.0);
            if !S::EXACT {
                c.pass = r.relative <= CHECK_TOL;
                c.detail = format!("relative {:e} (tolerance {CHECK_TOL:e})", r.relative);
            }
            checks.push(c);
        }
        Err(e) => checks.push(CheckRecord::new("conjugacy_residual", false, e.to_string())),
    }
    if !verify {
        return Assessment { checks, findings };
    }
    let id = PlanarMap::identity(f.mu(0), d);
    let (zero, dev) = map_deviation(&outcome.h.compose(&outcome.h_inv), &id);
    let scale = outcome.h.max_abs().max(outcome.h_inv.max_abs());
    checks.push(tolerance_check("h_inverse", S::EXACT, zero, dev, scale));
    let moduli = match outcome.orientation {
        Orientation::Normal => outcome.preconditions.moduli,
        Orientation::Swapped => [outcome.preconditions.moduli[1], outcome.preconditions.moduli[0]],
    };
    match decay_sweep(&outcome.frame, moduli, DECAY_SWEEP_DEGREE) {
        Ok(s) => {
            let mut detail = format!("{} exponents, worst ratio {:.15}", s.checked, s.worst_ratio);
            if let Some(n) = s.holds_with_n {
                detail.push_str(&format!("; N-exponent variant {}", if n { "holds" } else { "fails" }));
            }
            checks.push(CheckRecord::new("decay_sweep", s.holds, detail));
        }
        Err(e) => checks.push(CheckRecord::new("decay_sweep", false, e.to_string())),
    }
    match conjugacy_oracle(&f, outcome, ORACLE_SAMPLES) {
        Ok(o) => checks.push(CheckRecord::new(
            "orbit_oracle",
            !o.flagged,
            format!("max deviation {:e}, worst ratio to allowance {:e}", o.max_deviation, o.worst_ratio),
        )),
        Err(e) => checks.push(CheckRecord::new("orbit_oracle", false, e.to_string())),
    }
    Assessment { checks, findings }
}

fn run_typed<S: Literal>(echo: Value, job: &JobFile, like: S) -> Report {
    let f = match build_map(job, &like) {
        Ok(f) => f,
        Err(e) => return Report::failure(echo, &e),
    };
    let outcome = match run_pipeline(job, &f) {
        Ok(o) => o,
        Err(e) => return Report::failure(echo, &e),
    };
    let assessment = assess_outcome(&f, &outcome, job.options.verify);
    let lattice = job
        .options
        .emit_lattice
        .then(|| crate::dump::lattice_rows(&outcome.frame, job.degree));
    Report::success(echo, OutcomeRecord::new(&outcome), assessment, lattice)
}

/// Execute a job given as JSON text.
pub fn execute_job(text: &str) -> Report {
    let (echo, job) = match parse_job(text) {
        Ok(x) => x,
        Err(e) => {
            let echo = serde_json::from_str(text).unwrap_or(Value::Null);
            return Report::failure(echo, &e);
        }
    };
    let q0 = Rational::zero();
    let g0 = GaussianRational::from_real(Rational::zero());
    let c0 = ApproxComplex::real(0.0).expect("zero is finite");
    match job.ring {
        RingSpec::Rational => run_typed(echo, &job, q0),
        RingSpec::Gaussian => run_typed(echo, &job, g0),
        RingSpec::Complex => run_typed(echo, &job, c0),
        RingSpec::Jet { order, base } => match base {
            BaseRing::Rational => run_typed(echo, &job, ParamJet::constant(q0, order)),
            BaseRing::Gaussian => run_typed(echo, &job, ParamJet::constant(g0, order)),
            BaseRing::Complex => run_typed(echo, &job, ParamJet::constant(c0, order)),
        },
    }
}

/// Run the job at `path`, write the report to `out` (stdout when absent)
/// and return the exit code.
pub fn run_job(path: &Path, out: Option<&Path>) -> i32 {
    let report = match std::fs::read_to_string(path) {
        Ok(text) => execute_job(&text),
        Err(source) => Report::failure(
            Value::Null,
            &JobError::Io {
                path: path.display().to_string(),
                source,
            },
        ),
    };
    if let Some(err) = &report.error {
        eprintln!("error [{}]: {}", err.kind, err.message);
    }
    for w in &report.findings {
        eprintln!("finding: {}", w.describe());
    }
    if let Err(e) = report.write(out) {
        eprintln!("error [Io]: cannot write report: {e}");
        return EXIT_CONFIG;
    }
    report.exit_code
}

impl From<&JobError> for ErrorRecord {
    fn from(e: &JobError) -> Self {
        ErrorRecord {
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINEAR: &str = r#"{
        "mode": "theorem1",
        "ring": {"kind": "rational"},
        "mu1": "1/4", "mu2": "8",
        "degree": 6,
        "theorem1": {"p": 3, "q": 2, "N": 1},
        "options": {"verify": true}
    }"#;

    #[test]
    fn linear_job_passes() {
        let r = execute_job(LINEAR);
        assert_eq!(r.exit_code, EXIT_OK, "{r:?}");
        let o = r.outcome.unwrap();
        assert!(o.g.terms.is_empty());
        assert!(o.h.terms.is_empty());
        assert!(r.checks.iter().all(|c| c.pass));
    }

    #[test]
    fn unknown_field_names_its_path() {
        let text = LINEAR.replace("\"verify\": true", "\"verify\": true, \"colour\": 1");
        let r = execute_job(&text);
        assert_eq!(r.exit_code, EXIT_CONFIG);
        let e = r.error.unwrap();
        assert_eq!(e.kind, "Schema");
        assert!(e.message.contains("options") && e.message.contains("colour"), "{}", e.message);
    }

    #[test]
    fn bad_literal_names_field() {
        let text = LINEAR.replace("\"1/4\"", "\"1/four\"");
        let e = execute_job(&text).error.unwrap();
        assert_eq!(e.kind, "Literal");
        assert!(e.message.contains("mu1"));
    }

    #[test]
    fn precondition_and_coprimality_errors() {
        let text = LINEAR.replace("\"1/4\", \"mu2\": \"8\"", "\"1/2\", \"mu2\": \"2\"");
        let r = execute_job(&text);
        assert_eq!((r.exit_code, r.error.unwrap().kind.as_str()), (EXIT_CONFIG, "PreconditionError"));
        let text = LINEAR.replace("\"p\": 3, \"q\": 2", "\"p\": 4, \"q\": 2");
        let r = execute_job(&text);
        assert_eq!((r.exit_code, r.error.unwrap().kind.as_str()), (EXIT_CONFIG, "NotCoprime"));
    }

    #[test]
    fn mode_block_mismatch() {
        let text = LINEAR.replace("\"mode\": \"theorem1\"", "\"mode\": \"theorem2\"");
        assert_eq!(execute_job(&text).error.unwrap().kind, "InvalidJob");
    }

    #[test]
    fn jet_job_with_random_terms() {
        let text = r#"{
            "mode": "theorem1",
            "ring": {"kind": "jet", "order": 1, "base": "rational"},
            "mu1": ["1/4", "1"], "mu2": ["8"],
            "random": {"seed": 5, "density": 0.4},
            "degree": 6,
            "theorem1": {"p": 3, "q": 2, "N": 0}
        }"#;
        let r = execute_job(text);
        assert_eq!(r.exit_code, EXIT_OK, "{:?}", r.error);
        assert!(!r.outcome.unwrap().g.terms.is_empty());
    }
}
