//! Integer lattice geometry of modulus resonance.
//!
//! Exponents live in `N²`. A [`ResonanceFrame`] fixes a coprime pair `(p, q)`
//! together with the Bezout vectors `α₀ = (r₀, s₀)` and `α₁ = (p, q) − α₀`;
//! both `{α₀, (p,q)}` and `{α₁, (p,q)}` are unimodular bases, and every cone
//! used by the rational-ratio pipeline is a half-plane condition in one of
//! those coordinate systems. The irrational-ratio cones are expressed through
//! consecutive continued-fraction convergents, see [`cfrac`].
//!
//! Membership tests are integer cross-multiplications only.

pub mod cfrac;

use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

pub use cfrac::{
    cf_convergents, cf_quotients, theorem2_frame, CfExpansion, ConvergentFrame, QuadraticSurd,
    RatioSpec,
};

use crate::error::{Error, Result};

/// Exponent pair `(m₁, m₂)`; ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex {
    pub m1: u32,
    pub m2: u32,
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex { m1: 0, m2: 0 };

    pub const fn new(m1: u32, m2: u32) -> Self {
        MultiIndex { m1, m2 }
    }

    /// Unit vector `eᵢ` for component `i ∈ {0, 1}`.
    pub const fn unit(i: usize) -> Self {
        if i == 0 {
            MultiIndex::new(1, 0)
        } else {
            MultiIndex::new(0, 1)
        }
    }

    pub const fn degree(self) -> u32 {
        self.m1 + self.m2
    }

    pub fn get(self, i: usize) -> u32 {
        if i == 0 {
            self.m1
        } else {
            self.m2
        }
    }

    pub fn is_zero(self) -> bool {
        self.m1 == 0 && self.m2 == 0
    }

    pub fn checked_sub(self, rhs: MultiIndex) -> Option<MultiIndex> {
        Some(MultiIndex::new(
            self.m1.checked_sub(rhs.m1)?,
            self.m2.checked_sub(rhs.m2)?,
        ))
    }

    pub fn swap(self) -> MultiIndex {
        MultiIndex::new(self.m2, self.m1)
    }

    /// All indices with `|m| ≤ maxdeg`, lexicographically sorted.
    pub fn up_to_degree(maxdeg: u32) -> impl Iterator<Item = MultiIndex> {
        (0..=maxdeg).flat_map(move |m1| (0..=maxdeg - m1).map(move |m2| MultiIndex::new(m1, m2)))
    }

    /// All indices with `|m| = n`.
    pub fn of_degree(n: u32) -> impl Iterator<Item = MultiIndex> {
        (0..=n).map(move |m1| MultiIndex::new(m1, n - m1))
    }
}

impl core::ops::Add for MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: MultiIndex) -> MultiIndex {
        MultiIndex::new(self.m1 + rhs.m1, self.m2 + rhs.m2)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m1, self.m2)
    }
}

/// Solve `q·r − p·s = 1` inside the box `0 ≤ r ≤ p`, `0 ≤ s ≤ q`.
pub fn bezout_box(p: u64, q: u64) -> Result<(u64, u64)> {
    if p == 0 || q == 0 {
        return Err(Error::Domain("p and q must be positive".into()));
    }
    let (pi, qi) = (p as i128, q as i128);
    let g = pi.extended_gcd(&qi);
    if g.gcd != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    // q·r ≡ 1 (mod p), r taken in 1..=p so that p = 1 gives r = 1.
    let inv = g.y.rem_euclid(pi);
    let r = (inv - 1).rem_euclid(pi) + 1;
    let s = (qi * r - 1) / pi;
    debug_assert_eq!(qi * r - pi * s, 1);
    Ok((r as u64, s as u64))
}

/// `(p, q)`, the Bezout vectors `α₀`, `α₁` and the flatness order `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResonanceFrame {
    pub p: u32,
    pub q: u32,
    pub r0: u32,
    pub s0: u32,
    pub r1: u32,
    pub s1: u32,
    pub n: u32,
}

pub fn resonance_frame(p: u32, q: u32, n: u32) -> Result<ResonanceFrame> {
    let (r0, s0) = bezout_box(p as u64, q as u64)?;
    let (r0, s0) = (r0 as u32, s0 as u32);
    Ok(ResonanceFrame {
        p,
        q,
        r0,
        s0,
        r1: p - r0,
        s1: q - s0,
        n,
    })
}

impl ResonanceFrame {
    pub fn alpha0(&self) -> MultiIndex {
        MultiIndex::new(self.r0, self.s0)
    }

    pub fn alpha1(&self) -> MultiIndex {
        MultiIndex::new(self.r1, self.s1)
    }

    pub fn resonant(&self) -> MultiIndex {
        MultiIndex::new(self.p, self.q)
    }

    /// The same resonance with the coordinate roles exchanged.
    pub fn swapped(&self) -> ResonanceFrame {
        resonance_frame(self.q, self.p, self.n).expect("swapping keeps coprimality")
    }

    /// Lower slope `(s₀ + (N+1)q) / (r₀ + (N+1)p)` as (numerator, denominator).
    pub fn lower_slope(&self) -> (i128, i128) {
        let k = self.n as i128 + 1;
        (
            self.s0 as i128 + k * self.q as i128,
            self.r0 as i128 + k * self.p as i128,
        )
    }

    /// Upper slope `(s₁ + (N+1)q) / (r₁ + (N+1)p)`.
    pub fn upper_slope(&self) -> (i128, i128) {
        let k = self.n as i128 + 1;
        (
            self.s1 as i128 + k * self.q as i128,
            self.r1 as i128 + k * self.p as i128,
        )
    }
}

/// Which unimodular basis `basis_decompose` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `{α₀, (p,q)}`
    Zero,
    /// `{α₁, (p,q)}`
    One,
}

/// Coordinates `(k₁, k₂)` with `m = k₁·α_branch + k₂·(p,q)`.
pub fn basis_decompose(m: MultiIndex, frame: &ResonanceFrame, branch: Branch) -> (i64, i64) {
    let (m1, m2) = (m.m1 as i64, m.m2 as i64);
    let (p, q) = (frame.p as i64, frame.q as i64);
    match branch {
        // inverse of [[r0, p], [s0, q]], determinant +1
        Branch::Zero => (q * m1 - p * m2, -(frame.s0 as i64) * m1 + frame.r0 as i64 * m2),
        // inverse of [[r1, p], [s1, q]], determinant −1
        Branch::One => (p * m2 - q * m1, frame.s1 as i64 * m1 - frame.r1 as i64 * m2),
    }
}

/// Named exponent sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConeTag {
    G0,
    B0,
    B1,
    B2,
    TildeB,
    G1,
    HatB,
    IrrStage1,
    IrrStage2,
    IrrFinal,
}

impl ConeTag {
    pub const RESONANT: [ConeTag; 7] = [
        ConeTag::G0,
        ConeTag::B0,
        ConeTag::B1,
        ConeTag::B2,
        ConeTag::TildeB,
        ConeTag::G1,
        ConeTag::HatB,
    ];

    pub const IRRATIONAL: [ConeTag; 3] = [ConeTag::IrrStage1, ConeTag::IrrStage2, ConeTag::IrrFinal];

    pub fn name(self) -> &'static str {
        match self {
            ConeTag::G0 => "G0",
            ConeTag::B0 => "B0",
            ConeTag::B1 => "B1",
            ConeTag::B2 => "B2",
            ConeTag::TildeB => "TildeB",
            ConeTag::G1 => "G1",
            ConeTag::HatB => "HatB",
            ConeTag::IrrStage1 => "IrrStage1",
            ConeTag::IrrStage2 => "IrrStage2",
            ConeTag::IrrFinal => "IrrFinal",
        }
    }

    pub fn needs_convergents(self) -> bool {
        matches!(self, ConeTag::IrrStage1 | ConeTag::IrrStage2 | ConeTag::IrrFinal)
    }
}

impl fmt::Display for ConeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Arithmetic data parameterizing the cones of one pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    Resonance(ResonanceFrame),
    Convergent(ConvergentFrame),
}

impl From<ResonanceFrame> for Frame {
    fn from(f: ResonanceFrame) -> Self {
        Frame::Resonance(f)
    }
}

impl From<ConvergentFrame> for Frame {
    fn from(f: ConvergentFrame) -> Self {
        Frame::Convergent(f)
    }
}

pub fn cone_member(m: MultiIndex, tag: ConeTag, frame: &Frame) -> Result<bool> {
    match (frame, tag.needs_convergents()) {
        (Frame::Resonance(f), false) => Ok(resonant_member(m, tag, f)),
        (Frame::Convergent(f), true) => Ok(irrational_member(m, tag, f)),
        _ => Err(Error::config("cone tag does not match the frame kind")),
    }
}

pub(crate) fn resonant_member(m: MultiIndex, tag: ConeTag, f: &ResonanceFrame) -> bool {
    let n1 = f.n as i64 + 1;
    let (m1, m2) = (m.m1 as i128, m.m2 as i128);
    match tag {
        ConeTag::G0 => {
            let (k1, k2) = basis_decompose(m, f, Branch::Zero);
            k1 >= 1 && k2 <= n1 * k1
        }
        ConeTag::B0 => !resonant_member(m, ConeTag::G0, f),
        ConeTag::B1 => {
            let (k1, k2) = basis_decompose(m, f, Branch::Zero);
            k1 >= 1 && k2 > n1 * k1
        }
        ConeTag::B2 => basis_decompose(m, f, Branch::Zero).0 <= 0,
        ConeTag::TildeB => {
            let (num, den) = f.lower_slope();
            m2 * den >= m1 * num
        }
        ConeTag::G1 => {
            let (k1, k2) = basis_decompose(m, f, Branch::One);
            k1 >= 1 && k2 <= n1 * k1
        }
        ConeTag::HatB => {
            let (ln, ld) = f.lower_slope();
            let (un, ud) = f.upper_slope();
            !m.is_zero() && m1 * ln <= m2 * ld && m2 * ud <= m1 * un
        }
        _ => unreachable!("irrational tag on a resonance frame"),
    }
}

pub(crate) fn irrational_member(m: MultiIndex, tag: ConeTag, f: &ConvergentFrame) -> bool {
    let (m1, m2) = (m.m1 as i128, m.m2 as i128);
    let (p, q) = (f.p as i128, f.q as i128);
    let (pt, qt) = (f.p_tilde as i128, f.q_tilde as i128);
    match tag {
        ConeTag::IrrStage1 => p * m2 < q * m1,
        ConeTag::IrrStage2 => pt * m2 > qt * m1,
        ConeTag::IrrFinal => {
            let (j, l) = f.coordinates(m);
            j >= 0 && l >= 0 && j + l >= 1
        }
        _ => unreachable!("resonant tag on a convergent frame"),
    }
}

/// Members with `|m| ≤ maxdeg`, lexicographically sorted.
pub fn enumerate_cone(tag: ConeTag, frame: &Frame, maxdeg: u32) -> Result<Vec<MultiIndex>> {
    let mut out = Vec::new();
    for m in MultiIndex::up_to_degree(maxdeg) {
        if cone_member(m, tag, frame)? {
            out.push(m);
        }
    }
    Ok(out)
}
