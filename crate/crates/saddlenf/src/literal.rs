//! JSON literals for coefficients.
//!
//! - rational: `"a/b"`, `"a"` or a JSON integer; always written as a string
//! - Gaussian rational: `{"re": <rational>, "im": <rational>}` or a bare rational
//! - complex: `[re, im]` or a bare number
//! - jet: array of base literals, constant term first, zero padded to the order

use std::str::FromStr;

use num_bigint::BigInt;
use saddlenf_core::{ApproxComplex, GaussianRational, ParamJet, Rational, Scalar};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("bad {kind} literal {found}: {reason}")]
pub struct LiteralError {
    pub kind: &'static str,
    pub found: String,
    pub reason: String,
}

impl LiteralError {
    fn new(kind: &'static str, found: &Value, reason: impl Into<String>) -> Self {
        LiteralError {
            kind,
            found: found.to_string(),
            reason: reason.into(),
        }
    }
}

/// Coefficient rings with a lossless (exact rings) JSON form.
pub trait Literal: Scalar {
    const KIND: &'static str;

    fn to_literal(&self) -> Value;

    /// Parse in the ring of `like` (jet order, base ring).
    fn from_literal(v: &Value, like: &Self) -> Result<Self, LiteralError>;
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).ok()?;
    let d = BigInt::from_str(d).ok()?;
    Rational::from_bigints(n, d).ok()
}

impl Literal for Rational {
    const KIND: &'static str = "rational";

    fn to_literal(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_literal(v: &Value, _like: &Self) -> Result<Self, LiteralError> {
        let parsed = match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) if n.is_i64() => n.as_i64().map(Rational::from_integer),
            _ => None,
        };
        parsed.ok_or_else(|| LiteralError::new(Self::KIND, v, "expected \"a/b\" or an integer"))
    }
}

impl Literal for GaussianRational {
    const KIND: &'static str = "gaussian";

    fn to_literal(&self) -> Value {
        json!({ "re": self.re.to_literal(), "im": self.im.to_literal() })
    }

    fn from_literal(v: &Value, _like: &Self) -> Result<Self, LiteralError> {
        let zero = Rational::zero();
        match v {
            Value::Object(map) => {
                if let Some(key) = map.keys().find(|k| *k != "re" && *k != "im") {
                    return Err(LiteralError::new(Self::KIND, v, format!("unknown field `{key}`")));
                }
                let part = |key: &str| match map.get(key) {
                    Some(x) => Rational::from_literal(x, &zero),
                    None => Ok(Rational::zero()),
                };
                Ok(GaussianRational::new(part("re")?, part("im")?))
            }
            _ => Rational::from_literal(v, &zero)
                .map(GaussianRational::from_real)
                .map_err(|_| LiteralError::new(Self::KIND, v, "expected {\"re\", \"im\"} or a rational")),
        }
    }
}

impl Literal for ApproxComplex {
    const KIND: &'static str = "complex";

    fn to_literal(&self) -> Value {
        json!([self.re(), self.im()])
    }

    fn from_literal(v: &Value, _like: &Self) -> Result<Self, LiteralError> {
        let (re, im) = match v {
            Value::Number(n) => (n.as_f64(), Some(0.0)),
            Value::Array(a) if a.len() == 2 => (a[0].as_f64(), a[1].as_f64()),
            _ => (None, None),
        };
        match (re, im) {
            (Some(re), Some(im)) => {
                ApproxComplex::new(re, im).map_err(|e| LiteralError::new(Self::KIND, v, e.to_string()))
            }
            _ => Err(LiteralError::new(Self::KIND, v, "expected [re, im] or a number")),
        }
    }
}

impl<B: Literal> Literal for ParamJet<B> {
    const KIND: &'static str = "jet";

    fn to_literal(&self) -> Value {
        Value::Array(self.coefficients().iter().map(Literal::to_literal).collect())
    }

    fn from_literal(v: &Value, like: &Self) -> Result<Self, LiteralError> {
        let base = like.constant_term();
        let Value::Array(items) = v else {
            return Err(LiteralError::new(Self::KIND, v, "expected an array of coefficients"));
        };
        let order = like.order();
        if items.len() > order + 1 {
            return Err(LiteralError::new(
                Self::KIND,
                v,
                format!("{} coefficients for a jet of order {order}", items.len()),
            ));
        }
        let mut coeffs = items
            .iter()
            .map(|x| B::from_literal(x, base))
            .collect::<Result<Vec<_>, _>>()?;
        coeffs.resize(order + 1, base.zero_like());
        ParamJet::new(coeffs).map_err(|e| LiteralError::new(Self::KIND, v, e.to_string()))
    }
}
