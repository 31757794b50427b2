//! Machine-readable run reports.

use std::io::Write;
use std::path::Path;

use saddlenf_core::lattice::{cf_convergents, ConvergentFrame, ResonanceFrame};
use saddlenf_core::normalform::{NormalFormOutcome, StageDiagnostics, StructuralForm};
use saddlenf_core::{Frame, MultiIndex, PlanarMap, Witness};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dump::LatticeRow;
use crate::job::{Assessment, JobError, TermRecord, EXIT_CONFIG};
use crate::literal::{Literal, LiteralError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckRecord {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        CheckRecord {
            name: name.into(),
            pass,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub context: String,
    pub component: u8,
    pub exponent: [u32; 2],
    /// `"multiplier"` or `"monomial"`.
    pub exponent_kind: String,
    pub reason: String,
}

impl WitnessRecord {
    pub fn describe(&self) -> String {
        format!(
            "[{}] component {} {} exponent ({}, {}): {}",
            self.context, self.component, self.exponent_kind, self.exponent[0], self.exponent[1], self.reason
        )
    }
}

impl From<&Witness> for WitnessRecord {
    fn from(w: &Witness) -> Self {
        WitnessRecord {
            context: w.context.clone(),
            component: w.component,
            exponent: [w.exponent.m1, w.exponent.m2],
            exponent_kind: if w.monomial { "monomial" } else { "multiplier" }.into(),
            reason: w.reason.clone(),
        }
    }
}

/// A planar map as literal coefficient lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapRecord {
    pub bound: u32,
    pub mu1: Value,
    pub mu2: Value,
    pub terms: Vec<TermRecord>,
}

impl MapRecord {
    pub fn new<S: Literal>(f: &PlanarMap<S>) -> Self {
        let mut terms = Vec::new();
        for i in 0..2 {
            for (k, c) in f.nonlinear(i).terms() {
                terms.push(TermRecord {
                    component: i as u8 + 1,
                    exponent: [k.m1, k.m2],
                    coeff: c.to_literal(),
                });
            }
        }
        MapRecord {
            bound: f.bound(),
            mu1: f.mu(0).to_literal(),
            mu2: f.mu(1).to_literal(),
            terms,
        }
    }

    /// Read back in the ring of `like`.
    pub fn to_map<S: Literal>(&self, like: &S) -> Result<PlanarMap<S>, JobError> {
        let lit = |v: &Value, field: String| {
            S::from_literal(v, like).map_err(|source: LiteralError| JobError::Literal { field, source })
        };
        let mut terms = Vec::with_capacity(self.terms.len());
        for (n, t) in self.terms.iter().enumerate() {
            if !(1..=2).contains(&t.component) {
                return Err(JobError::Invalid(format!("terms[{n}].component must be 1 or 2")));
            }
            terms.push((
                t.component as usize - 1,
                MultiIndex::new(t.exponent[0], t.exponent[1]),
                lit(&t.coeff, format!("terms[{n}].coeff"))?,
            ));
        }
        Ok(PlanarMap::from_terms(
            lit(&self.mu1, "mu1".into())?,
            lit(&self.mu2, "mu2".into())?,
            self.bound,
            terms,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FrameRecord {
    Resonance {
        p: u32,
        q: u32,
        #[serde(rename = "N")]
        n: u32,
        alpha0: [u32; 2],
        alpha1: [u32; 2],
    },
    Convergent {
        quotients: Vec<String>,
        /// `(q_n, p_n)` for the listed quotients.
        convergents: Vec<[String; 2]>,
        k: u32,
        u: [u32; 2],
        u_tilde: [u32; 2],
    },
}

impl FrameRecord {
    fn resonance(f: &ResonanceFrame) -> Self {
        FrameRecord::Resonance {
            p: f.p,
            q: f.q,
            n: f.n,
            alpha0: [f.r0, f.s0],
            alpha1: [f.r1, f.s1],
        }
    }

    fn convergent(f: &ConvergentFrame) -> Self {
        FrameRecord::Convergent {
            quotients: f.quotients.iter().map(|a| a.to_string()).collect(),
            convergents: cf_convergents(&f.quotients)
                .iter()
                .map(|(q, p)| [q.to_string(), p.to_string()])
                .collect(),
            k: f.k,
            u: [f.p, f.q],
            u_tilde: [f.p_tilde, f.q_tilde],
        }
    }
}

impl From<&Frame> for FrameRecord {
    fn from(f: &Frame) -> Self {
        match f {
            Frame::Resonance(r) => FrameRecord::resonance(r),
            Frame::Convergent(c) => FrameRecord::convergent(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub eliminated: usize,
    /// Absent when the stage targeted nothing.
    pub min_divisor: Option<f64>,
    pub leftover: f64,
    pub top_degree_max: f64,
}

impl From<&StageDiagnostics> for StageRecord {
    fn from(s: &StageDiagnostics) -> Self {
        StageRecord {
            stage: s.stage.clone(),
            eliminated: s.eliminated,
            min_divisor: s.min_divisor.is_finite().then_some(s.min_divisor),
            leftover: s.leftover,
            top_degree_max: s.top_degree_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub stages: Vec<StageRecord>,
    pub d0: f64,
    pub d1: f64,
    pub d0_with_n: Option<f64>,
    pub d1_with_n: Option<f64>,
    pub measured_ratio: f64,
    pub moduli: [f64; 2],
    pub resonance_exact: bool,
    pub residual_max_abs: f64,
    pub residual_relative: f64,
    pub residual_exact_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub degree: u32,
    pub orientation: String,
    /// Frame in normalized coordinates (`|μ₁| < 1 < |μ₂|`).
    pub frame: FrameRecord,
    pub g: MapRecord,
    pub h: MapRecord,
    pub h_inv: MapRecord,
    /// Coefficient tables of the normalized `g`.
    pub structure: Value,
    pub diagnostics: Diagnostics,
}

fn structure_tables<S: Literal>(s: &StructuralForm<S>) -> Value {
    match s {
        StructuralForm::T1(t) => {
            let comps: Vec<Value> = (0..2)
                .map(|i| {
                    let b0: Vec<Value> = t.b0[i].iter().map(|(j, c)| json!({"j": j, "coeff": c.to_literal()})).collect();
                    let nested = |m: &std::collections::BTreeMap<u32, std::collections::BTreeMap<u32, S>>| -> Vec<Value> {
                        m.iter()
                            .flat_map(|(k, row)| {
                                row.iter().map(move |(j, c)| json!({"k": k, "j": j, "coeff": c.to_literal()}))
                            })
                            .collect()
                    };
                    json!({"b0": b0, "b0k": nested(&t.b0k[i]), "b1k": nested(&t.b1k[i])})
                })
                .collect();
            json!({"kind": "theorem1", "components": comps})
        }
        StructuralForm::T2(t) => {
            let table = |m: &std::collections::BTreeMap<(u32, u32), S>| -> Vec<Value> {
                m.iter().map(|((j, l), c)| json!({"j": j, "l": l, "coeff": c.to_literal()})).collect()
            };
            let comps: Vec<Value> = (0..2).map(|i| json!({"b1": table(&t.b1[i]), "b2": table(&t.b2[i])})).collect();
            json!({"kind": "theorem2", "components": comps})
        }
    }
}

impl OutcomeRecord {
    pub fn new<S: Literal>(o: &NormalFormOutcome<S>) -> Self {
        let pre = &o.preconditions;
        OutcomeRecord {
            degree: o.degree,
            orientation: if o.orientation.is_swapped() { "swapped" } else { "normal" }.into(),
            frame: FrameRecord::from(&o.frame),
            g: MapRecord::new(&o.g),
            h: MapRecord::new(&o.h),
            h_inv: MapRecord::new(&o.h_inv),
            structure: structure_tables(&o.structure),
            diagnostics: Diagnostics {
                stages: o.stages.iter().map(StageRecord::from).collect(),
                d0: o.decay.d0,
                d1: o.decay.d1,
                d0_with_n: o.decay.d0_with_n,
                d1_with_n: o.decay.d1_with_n,
                measured_ratio: pre.measured_ratio,
                moduli: pre.moduli,
                resonance_exact: pre.exact,
                residual_max_abs: o.residual.max_abs,
                residual_relative: o.residual.relative,
                residual_exact_zero: o.residual.exact_zero,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// The job as read.
    pub job: Value,
    pub exit_code: i32,
    /// `"ok"`, `"finding"` or `"error"`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<OutcomeRecord>,
    #[serde(default)]
    pub checks: Vec<CheckRecord>,
    #[serde(default)]
    pub findings: Vec<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<LatticeRow>>,
}

fn status(code: i32) -> String {
    match code {
        0 => "ok",
        2 => "finding",
        _ => "error",
    }
    .into()
}

impl Report {
    pub fn failure(job: Value, e: &JobError) -> Self {
        let code = e.exit_code();
        let findings = match e {
            JobError::Core(c) => c.witnesses().iter().map(WitnessRecord::from).collect(),
            _ => Vec::new(),
        };
        Report {
            job,
            exit_code: code,
            status: status(code),
            error: Some(ErrorRecord::from(e)),
            outcome: None,
            checks: Vec::new(),
            findings,
            lattice: None,
        }
    }

    pub fn success(job: Value, outcome: OutcomeRecord, a: Assessment, lattice: Option<Vec<LatticeRow>>) -> Self {
        let code = a.exit_code();
        Report {
            job,
            exit_code: code,
            status: status(code),
            error: None,
            outcome: Some(outcome),
            checks: a.checks,
            findings: a.findings,
            lattice,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Write to `path`, or stdout when `None`.
    pub fn write(&self, path: Option<&Path>) -> std::io::Result<()> {
        let text = self.to_json();
        match path {
            Some(p) => std::fs::write(p, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }

    pub fn is_config_error(&self) -> bool {
        self.exit_code == EXIT_CONFIG
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use saddlenf_core::lattice::resonance_frame;
    use saddlenf_core::normalform::pipeline_theorem1;
    use saddlenf_core::Rational;

    #[test]
    fn maps_round_trip_through_json() {
        let spec = crate::verify::GeneratorSpec::resonant(11, 3, 2, 1, "2", 6);
        let f = crate::verify::random_resonant_saddle(&spec, &Rational::zero()).unwrap();
        let o = pipeline_theorem1(&f, &resonance_frame(3, 2, 1).unwrap(), 6).unwrap();
        let rec = OutcomeRecord::new(&o);
        let text = serde_json::to_string(&rec).unwrap();
        let back: OutcomeRecord = serde_json::from_str(&text).unwrap();
        let like = Rational::zero();
        assert_eq!(back.g.to_map(&like).unwrap(), o.g);
        assert_eq!(back.h.to_map(&like).unwrap(), o.h);
        assert_eq!(back.h_inv.to_map(&like).unwrap(), o.h_inv);
        assert_eq!(back, rec);
    }
}
