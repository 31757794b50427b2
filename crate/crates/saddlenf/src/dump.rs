//! Lattice set exports and continued fraction tables.

use std::io::Write;

use num_bigint::BigInt;
use saddlenf_core::lattice::{cf_convergents, cf_quotients, cone_member, resonance_frame, RatioSpec};
use saddlenf_core::{ConeTag, Frame, MultiIndex, Result};
use serde::{Deserialize, Serialize};

pub const RESONANT_TAGS: [ConeTag; 7] = [
    ConeTag::G0,
    ConeTag::B0,
    ConeTag::B1,
    ConeTag::B2,
    ConeTag::TildeB,
    ConeTag::G1,
    ConeTag::HatB,
];

pub const CONVERGENT_TAGS: [ConeTag; 3] = [ConeTag::IrrStage1, ConeTag::IrrStage2, ConeTag::IrrFinal];

/// One `(member, set)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRow {
    pub m1: u32,
    pub m2: u32,
    pub set: String,
}

/// Every `(m, tag)` membership with `|m| ≤ maxdeg`, ordered by degree then
/// by `m₂`.
pub fn lattice_rows(frame: &Frame, maxdeg: u32) -> Vec<LatticeRow> {
    let tags: &[ConeTag] = match frame {
        Frame::Resonance(_) => &RESONANT_TAGS,
        Frame::Convergent(_) => &CONVERGENT_TAGS,
    };
    let mut rows = Vec::new();
    for d in 0..=maxdeg {
        for m in MultiIndex::of_degree(d) {
            for &t in tags {
                if cone_member(m, t, frame).expect("tags match the frame") {
                    rows.push(LatticeRow {
                        m1: m.m1,
                        m2: m.m2,
                        set: t.name().into(),
                    });
                }
            }
        }
    }
    rows
}

#[derive(Debug, thiserror::Error)]
pub enum DumpError {
    #[error(transparent)]
    Core(#[from] saddlenf_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub fn write_lattice_csv<W: Write>(rows: &[LatticeRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["m1", "m2", "set"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV dump of the resonant sets of `frame(p, q, N)` up to `maxdeg`.
pub fn lattice_dump<W: Write>(p: u32, q: u32, n: u32, maxdeg: u32, out: W) -> Result<usize, DumpError> {
    let frame: Frame = resonance_frame(p, q, n)?.into();
    let rows = lattice_rows(&frame, maxdeg);
    write_lattice_csv(&rows, out)?;
    Ok(rows.len())
}

/// Quotients `a_n` and convergents `q_n/p_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CfTable {
    pub quotients: Vec<BigInt>,
    pub convergents: Vec<(BigInt, BigInt)>,
    pub terminated: bool,
    pub approximate: bool,
}

pub fn cf_expand(spec: &RatioSpec, n: usize) -> Result<CfTable> {
    let e = cf_quotients(spec, n)?;
    Ok(CfTable {
        convergents: cf_convergents(&e.quotients),
        quotients: e.quotients,
        terminated: e.terminated,
        approximate: e.approximate,
    })
}

impl CfTable {
    /// Whitespace separated table `n a_n q_n p_n`.
    pub fn render(&self) -> String {
        let mut s = String::from("n a_n q_n p_n\n");
        for (i, (a, (q, p))) in self.quotients.iter().zip(&self.convergents).enumerate() {
            s.push_str(&format!("{} {a} {q} {p}\n", i + 1));
        }
        if self.terminated {
            s.push_str("# expansion terminates (rational input)\n");
        }
        if self.approximate {
            s.push_str("# quotients extracted from a double\n");
        }
        s
    }
}
