//! Exact arithmetic for the Hecke congruence subgroups Γ₀(N).
//!
//! This module provides:
//! - [`GroupElement`]: a 2×2 integer matrix of determinant 1, stored modulo ±1
//! - [`CuspData`] / [`GroupData`]: cusps, scaling matrices and generators of a group
//! - [`moebius_apply`]: the Möbius action together with the automorphy factor
//! - [`coset_reps_infinity`] / [`cusp_coset_reps`]: truncated coset enumeration
//! - [`reduce_to_fundamental`] and [`y_gamma`]: orbit height maximisation

use std::fmt;
use std::ops::Mul;
use std::path::Path;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}, expected 1")]
    Determinant { a: i64, b: i64, c: i64, d: i64, det: i128 },
    #[error("point {0} is not in the upper half plane")]
    NotInUpperHalfPlane(Complex64),
    #[error("generator {0} is not in Γ₀({1}): lower-left entry not divisible by the level")]
    NotInLevel(GroupElement, u64),
    #[error("integer overflow while composing group elements")]
    Overflow,
    #[error("invalid group configuration: {0}")]
    Config(String),
    #[error("cusp {0} is not supported for coset enumeration (only ∞ and 0)")]
    UnsupportedCusp(String),
    #[error("reduction did not settle within {0} iterations; check the configured generators")]
    ReductionStalled(usize),
    #[error("io error reading group config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed group config: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GroupError>;

/// An element of PSL₂(ℤ) with canonical sign: `c > 0`, or `c == 0` and `d > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct GroupElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl GroupElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(GroupError::Determinant { a, b, c, d, det });
        }
        Ok(Self::canonical(a, b, c, d))
    }

    fn canonical(a: i64, b: i64, c: i64, d: i64) -> Self {
        if c < 0 || (c == 0 && d < 0) {
            GroupElement { a: -a, b: -b, c: -c, d: -d }
        } else {
            GroupElement { a, b, c, d }
        }
    }

    pub const fn identity() -> Self {
        GroupElement { a: 1, b: 0, c: 0, d: 1 }
    }

    /// Translation z ↦ z + n.
    pub fn translation(n: i64) -> Self {
        GroupElement { a: 1, b: n, c: 0, d: 1 }
    }

    /// The inversion z ↦ −1/z.
    pub fn inversion() -> Self {
        Self::canonical(0, -1, 1, 0)
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn inverse(&self) -> Self {
        Self::canonical(self.d, -self.b, -self.c, self.a)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let m = |x: i64, y: i64, u: i64, v: i64| -> Result<i64> {
            let r = x as i128 * y as i128 + u as i128 * v as i128;
            i64::try_from(r).map_err(|_| GroupError::Overflow)
        };
        Ok(Self::canonical(
            m(self.a, rhs.a, self.b, rhs.c)?,
            m(self.a, rhs.b, self.b, rhs.d)?,
            m(self.c, rhs.a, self.d, rhs.c)?,
            m(self.c, rhs.b, self.d, rhs.d)?,
        ))
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = Self::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc * base;
        }
        acc
    }

    /// Automorphy factor j(γ, z) = cz + d.
    pub fn j(&self, z: Complex64) -> Complex64 {
        z * self.c as f64 + self.d as f64
    }

    /// Möbius action without the upper-half-plane check.
    pub fn act(&self, z: Complex64) -> Complex64 {
        if self.c == 0 {
            return (z * self.a as f64 + self.b as f64) / self.d as f64;
        }
        // a/c − 1/(c(cz+d)) avoids cancellation in the numerator.
        let c = self.c as f64;
        Complex64::new(self.a as f64 / c, 0.0) - (self.j(z) * c).inv()
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix([
            [self.a as f64, self.b as f64],
            [self.c as f64, self.d as f64],
        ])
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.checked_mul(&rhs)
            .expect("group element entries overflowed i64")
    }
}

impl TryFrom<[[i64; 2]; 2]> for GroupElement {
    type Error = GroupError;

    fn try_from(m: [[i64; 2]; 2]) -> Result<Self> {
        GroupElement::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<GroupElement> for [[i64; 2]; 2] {
    fn from(g: GroupElement) -> Self {
        g.entries()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A real 2×2 matrix, used for scaling matrices σ_𝔞 and products σ_𝔞⁻¹γ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealMatrix(pub [[f64; 2]; 2]);

impl RealMatrix {
    pub fn identity() -> Self {
        RealMatrix([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Self {
        let m = &self.0;
        let det = self.det();
        RealMatrix([
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ])
    }

    pub fn mul(&self, rhs: &RealMatrix) -> RealMatrix {
        let (x, y) = (&self.0, &rhs.0);
        RealMatrix([
            [
                x[0][0] * y[0][0] + x[0][1] * y[1][0],
                x[0][0] * y[0][1] + x[0][1] * y[1][1],
            ],
            [
                x[1][0] * y[0][0] + x[1][1] * y[1][0],
                x[1][0] * y[0][1] + x[1][1] * y[1][1],
            ],
        ])
    }

    pub fn j(&self, z: Complex64) -> Complex64 {
        z * self.0[1][0] + self.0[1][1]
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        (z * self.0[0][0] + self.0[0][1]) / self.j(z)
    }

    pub fn lower_left(&self) -> f64 {
        self.0[1][0]
    }
}

/// A cusp as a rational point p/q, or ∞ (stored as 1/0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CuspPoint {
    Infinity,
    Rational(i64, i64),
}

impl CuspPoint {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(CuspPoint::Infinity);
        }
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: i64 = p
            .parse()
            .map_err(|_| GroupError::Config(format!("bad cusp representative {s:?}")))?;
        let q: i64 = q
            .parse()
            .map_err(|_| GroupError::Config(format!("bad cusp representative {s:?}")))?;
        if q == 0 {
            return Ok(CuspPoint::Infinity);
        }
        let g = p.gcd(&q);
        let (p, q) = if q < 0 { (-p / g, -q / g) } else { (p / g, q / g) };
        Ok(CuspPoint::Rational(p, q))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CuspPoint::Infinity)
    }
}

impl fmt::Display for CuspPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CuspPoint::Infinity => write!(f, "inf"),
            CuspPoint::Rational(p, q) => write!(f, "{p}/{q}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CuspData {
    pub label: String,
    pub representative: CuspPoint,
    pub scaling: RealMatrix,
    pub width: f64,
    /// Generator of the stabiliser Γ_𝔞.
    pub parabolic: GroupElement,
}

impl CuspData {
    pub fn new(
        label: impl Into<String>,
        representative: CuspPoint,
        scaling: RealMatrix,
        width: f64,
    ) -> Result<Self> {
        let label = label.into();
        let h = width.round();
        if (width - h).abs() > 1e-9 || h < 1.0 {
            return Err(GroupError::Config(format!(
                "cusp {label}: width {width} is not a positive integer"
            )));
        }
        let h = h as i64;
        let parabolic = match representative {
            CuspPoint::Infinity => GroupElement::translation(h),
            CuspPoint::Rational(p, q) => {
                GroupElement::new(1 - p * q * h, p * p * h, -q * q * h, 1 + p * q * h)?
            }
        };
        let cusp = CuspData { label, representative, scaling, width, parabolic };
        cusp.check()?;
        Ok(cusp)
    }

    /// σ_𝔞 ∞ = 𝔞 and σ_𝔞⁻¹ π_𝔞 σ_𝔞 = ±T.
    pub fn check(&self) -> Result<()> {
        let err = |msg: String| Err(GroupError::Config(format!("cusp {}: {msg}", self.label)));
        if (self.scaling.det() - 1.0).abs() > 1e-9 {
            return err(format!("scaling determinant {} != 1", self.scaling.det()));
        }
        let s = &self.scaling.0;
        match self.representative {
            CuspPoint::Infinity => {
                if s[1][0].abs() > 1e-12 {
                    return err("scaling matrix does not fix ∞".into());
                }
            }
            CuspPoint::Rational(p, q) => {
                if s[1][0].abs() < 1e-12 || (s[0][0] / s[1][0] - p as f64 / q as f64).abs() > 1e-9 {
                    return err("scaling matrix does not map ∞ to the representative".into());
                }
            }
        }
        let conj = self
            .scaling
            .inverse()
            .mul(&self.parabolic.to_real())
            .mul(&self.scaling);
        let m = &conj.0;
        let unit = m[1][0].abs() < 1e-9
            && (m[0][0].abs() - 1.0).abs() < 1e-9
            && (m[1][1] - m[0][0]).abs() < 1e-9
            && (m[0][1].abs() - 1.0).abs() < 1e-9;
        if !unit {
            return err(format!("σ⁻¹πσ = {m:?} is not a unit translation"));
        }
        Ok(())
    }

    /// The shift s = ±1 with σ⁻¹ π σ = T^s.
    pub fn translation_sign(&self) -> f64 {
        let m = self
            .scaling
            .inverse()
            .mul(&self.parabolic.to_real())
            .mul(&self.scaling)
            .0;
        (m[0][1] / m[0][0]).signum()
    }
}

#[derive(Clone, Debug)]
pub struct GroupData {
    pub level: u64,
    pub genus: u32,
    pub volume: f64,
    pub cusps: Vec<CuspData>,
    pub generators: Vec<GroupElement>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CuspConfig {
    label: String,
    representative: String,
    scaling: [[f64; 2]; 2],
    width: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GroupConfig {
    level: u64,
    genus: u32,
    volume: f64,
    cusps: Vec<CuspConfig>,
    generators: Vec<[[i64; 2]; 2]>,
}

impl GroupData {
    /// Validates generators and cusps. `m ≥ 2` is enforced separately by
    /// [`GroupData::require_two_cusps`].
    pub fn new(
        level: u64,
        genus: u32,
        volume: f64,
        cusps: Vec<CuspData>,
        generators: Vec<GroupElement>,
    ) -> Result<Self> {
        if level == 0 {
            return Err(GroupError::Config("level must be positive".into()));
        }
        if !(volume > 0.0) {
            return Err(GroupError::Config("volume must be positive".into()));
        }
        if cusps.is_empty() {
            return Err(GroupError::Config("at least one cusp is required".into()));
        }
        for g in &generators {
            if g.c().rem_euclid(level as i64) != 0 {
                return Err(GroupError::NotInLevel(*g, level));
            }
        }
        for cusp in &cusps {
            if cusp.parabolic.c().rem_euclid(level as i64) != 0 {
                return Err(GroupError::NotInLevel(cusp.parabolic, level));
            }
        }
        Ok(GroupData { level, genus, volume, cusps, generators })
    }

    pub fn require_two_cusps(&self) -> Result<()> {
        if self.cusps.len() < 2 {
            return Err(GroupError::Config(format!(
                "group has {} inequivalent cusp(s); at least 2 are required",
                self.cusps.len()
            )));
        }
        Ok(())
    }

    /// SL₂(ℤ). Has a single cusp, so it is only used for classical reduction checks.
    pub fn modular_group() -> Self {
        let inf = CuspData::new("inf", CuspPoint::Infinity, RealMatrix::identity(), 1.0)
            .expect("cusp at infinity");
        GroupData {
            level: 1,
            genus: 0,
            volume: std::f64::consts::PI / 3.0,
            cusps: vec![inf],
            generators: vec![GroupElement::translation(1), GroupElement::inversion()],
        }
    }

    /// Γ₀(11): genus 1, cusps ∞ (width 1) and 0 (width 11).
    pub fn gamma0_11() -> Self {
        Self::from_json_str(GAMMA0_11_JSON).expect("built-in Γ₀(11) config is valid")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: GroupConfig = serde_json::from_str(s)?;
        let cusps = cfg
            .cusps
            .iter()
            .map(|c| {
                CuspData::new(
                    c.label.clone(),
                    CuspPoint::parse(&c.representative)?,
                    RealMatrix(c.scaling),
                    c.width,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let generators = cfg
            .generators
            .iter()
            .map(|m| GroupElement::try_from(*m))
            .collect::<Result<Vec<_>>>()?;
        let group = GroupData::new(cfg.level, cfg.genus, cfg.volume, cusps, generators)?;
        group.require_two_cusps()?;
        Ok(group)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let cfg = GroupConfig {
            level: self.level,
            genus: self.genus,
            volume: self.volume,
            cusps: self
                .cusps
                .iter()
                .map(|c| CuspConfig {
                    label: c.label.clone(),
                    representative: c.representative.to_string(),
                    scaling: c.scaling.0,
                    width: c.width,
                })
                .collect(),
            generators: self.generators.iter().map(|g| g.entries()).collect(),
        };
        serde_json::to_string_pretty(&cfg).expect("group config serialises")
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.c().rem_euclid(self.level as i64) == 0
    }

    pub fn cusp_index(&self, label: &str) -> Option<usize> {
        self.cusps.iter().position(|c| c.label == label)
    }
}

/// Built-in Γ₀(11) configuration, also shipped as `data/gamma0_11.json`.
pub const GAMMA0_11_JSON: &str = include_str!("../data/gamma0_11.json");

/// Result of the Möbius action: the image point, j(γ, z) and ε(γ, z) = j/|j|.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusImage {
    pub w: Complex64,
    pub j: Complex64,
    pub eps: Complex64,
}

pub fn moebius_apply(g: &GroupElement, z: Complex64) -> Result<MoebiusImage> {
    if !(z.im > 0.0) {
        return Err(GroupError::NotInUpperHalfPlane(z));
    }
    let j = g.j(z);
    let w = g.act(z);
    Ok(MoebiusImage { w, j, eps: j / j.norm() })
}

/// Extended Euclid: returns (g, x, y) with x·a + y·b = g ≥ 0.
pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Completes a coprime bottom row (c, d) to an element of SL₂(ℤ).
pub fn complete_bottom_row(c: i64, d: i64) -> Option<GroupElement> {
    let (g, x, y) = ext_gcd(d, c);
    if g != 1 {
        return None;
    }
    // x·d + y·c = 1, so a = x, b = −y.
    GroupElement::new(x, -y, c, d).ok()
}

/// Completes a coprime top row (a, b) to an element of Γ₀(N).
pub fn complete_top_row(a: i64, b: i64, level: i64) -> Option<GroupElement> {
    // a·d − b·(N c') = 1
    let (g, x, y) = ext_gcd(a, b * level);
    if g != 1 {
        return None;
    }
    GroupElement::new(a, b, -y * level, x).ok()
}

/// Representatives of Γ_∞\Γ₀(N)/Γ_∞ with 0 < c ≤ c_max, preceded by the identity.
///
/// Pairs (c, d) with N | c, gcd(c, d) = 1 and 0 ≤ d < c, ordered by (c, d).
pub fn coset_reps_infinity(group: &GroupData, c_max: u64) -> Vec<GroupElement> {
    let n = group.level as i64;
    let mut reps = vec![GroupElement::identity()];
    let mut c = n;
    while c <= c_max as i64 {
        for d in 0..c {
            if c.gcd(&d) == 1 {
                reps.push(complete_bottom_row(c, d).expect("coprime row"));
            }
        }
        c += n;
    }
    reps
}

/// A double-coset representative for the series attached to a cusp.
#[derive(Clone, Copy, Debug)]
pub struct CosetRep {
    pub gamma: GroupElement,
    /// σ_𝔞⁻¹γ.
    pub scaled: RealMatrix,
    /// Whether the left cosets γTⁿ (n ∈ ℤ) are pairwise distinct and must be summed.
    pub expand: bool,
}

/// Double-coset representatives Γ_𝔞\Γ/Γ_∞ for the cusps ∞ and 0, truncated
/// at |lower-left entry of σ_𝔞⁻¹γ| ≤ c_max.
pub fn cusp_coset_reps(group: &GroupData, cusp: usize, c_max: f64) -> Result<Vec<CosetRep>> {
    let data = &group.cusps[cusp];
    let sigma_inv = data.scaling.inverse();
    let n = group.level as i64;
    let mut reps = Vec::new();
    match data.representative {
        CuspPoint::Infinity => {
            let cm = c_max.floor().max(0.0) as u64;
            for g in coset_reps_infinity(group, cm) {
                let scaled = sigma_inv.mul(&g.to_real());
                reps.push(CosetRep { gamma: g, scaled, expand: g.c() != 0 });
            }
        }
        CuspPoint::Rational(0, 1) => {
            // Bottom row of σ₀⁻¹γ is proportional to the top row (a, b) of γ.
            let scale = sigma_inv.0[1][0].abs();
            let mut a = 1i64;
            while a as f64 * scale <= c_max + 1e-12 {
                if a.gcd(&n) == 1 {
                    for b in 0..a {
                        if a.gcd(&b) == 1 {
                            let g = complete_top_row(a, b, n).expect("coprime top row");
                            let scaled = sigma_inv.mul(&g.to_real());
                            let expand = scaled.lower_left().abs() > 1e-12;
                            reps.push(CosetRep { gamma: g, scaled, expand });
                        }
                    }
                }
                a += 1;
            }
        }
        CuspPoint::Rational(_, _) => return Err(GroupError::UnsupportedCusp(data.label.clone())),
    }
    Ok(reps)
}

/// y_F(z) = max over cusps of Im(σ_𝔞⁻¹ z), with the index of the maximising cusp.
pub fn cusp_height(group: &GroupData, z: Complex64) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, cusp) in group.cusps.iter().enumerate() {
        let h = cusp.scaling.inverse().act(z).im;
        if h > best.0 {
            best = (h, i);
        }
    }
    best
}

const REDUCTION_CAP: usize = 1000;

/// Moves z up its Γ-orbit greedily. Returns (z₀, γ) with z = γ z₀.
///
/// Moves are the generators, the cusp stabilisers, their inverses and all
/// products of two such moves; after each move the point is translated into
/// the unit strip of the cusp where it is highest. A point whose height no
/// move improves is a fixed point, so reduction is idempotent.
pub fn reduce_to_fundamental(
    group: &GroupData,
    z: Complex64,
) -> Result<(Complex64, GroupElement)> {
    if !(z.im > 0.0) {
        return Err(GroupError::NotInUpperHalfPlane(z));
    }
    let mut singles: Vec<GroupElement> = Vec::new();
    for g in group
        .generators
        .iter()
        .chain(group.cusps.iter().map(|c| &c.parabolic))
    {
        for h in [*g, g.inverse()] {
            if !h.is_identity() && !singles.contains(&h) {
                singles.push(h);
            }
        }
    }
    let mut moves = singles.clone();
    for g in &singles {
        for h in &singles {
            let p = *g * *h;
            if !p.is_identity() && !moves.contains(&p) {
                moves.push(p);
            }
        }
    }

    // Invariant: w = acc · z.
    let mut acc = GroupElement::identity();
    let mut w = z;
    let shift = GroupElement::translation(-(z.re + 0.5).floor() as i64);
    acc = shift * acc;
    w = shift.act(w);
    if let Some(m) = coset_jump(group, w) {
        let u = m.act(w);
        if cusp_height(group, u).0 > cusp_height(group, w).0 * (1.0 + 1e-9) {
            acc = m * acc;
            w = u;
        }
    }

    for _ in 0..REDUCTION_CAP {
        let (h, _) = cusp_height(group, w);
        let mut best: Option<(f64, GroupElement)> = None;
        for m in &moves {
            let hm = cusp_height(group, m.act(w)).0;
            if hm > h * (1.0 + 1e-12) && best.map_or(true, |(b, _)| hm > b) {
                best = Some((hm, *m));
            }
        }
        match best {
            Some((_, m)) => {
                acc = m * acc;
                w = m.act(w);
            }
            None => {
                let t = strip_normaliser(group, w);
                acc = t * acc;
                w = t.act(w);
                return Ok((w, acc.inverse()));
            }
        }
        let t = strip_normaliser(group, w);
        acc = t * acc;
        w = t.act(w);
    }
    Err(GroupError::ReductionStalled(REDUCTION_CAP))
}

/// An element of Γ₀(N) moving w to r·w₀, where w₀ is the classical SL₂(ℤ)
/// reduction of w and r = I or [[0, −1], [1, j]] represents its coset.
/// Only prime levels are handled; other levels rely on the local moves.
fn coset_jump(group: &GroupData, w: Complex64) -> Option<GroupElement> {
    let n = group.level as i64;
    // m · w lies in the standard domain.
    let mut m = GroupElement::identity();
    let mut u = w;
    for _ in 0..REDUCTION_CAP {
        let k = (u.re + 0.5).floor() as i64;
        let t = GroupElement::translation(-k);
        m = t * m;
        u = t.act(u);
        if u.norm_sqr() >= 1.0 {
            break;
        }
        m = GroupElement::inversion() * m;
        u = GroupElement::inversion().act(u);
    }
    // w = M u with M = m⁻¹; write M = γ r.
    let big = m.inverse();
    let (c, d) = (big.c().rem_euclid(n), big.d().rem_euclid(n));
    let r = if n == 1 || c == 0 {
        GroupElement::identity()
    } else {
        let (g, inv, _) = ext_gcd(c, n);
        if g != 1 || !is_prime(n) {
            return None;
        }
        GroupElement::new(0, -1, 1, (d * inv).rem_euclid(n)).ok()?
    };
    let gamma = big * r.inverse();
    if gamma.c() % n != 0 {
        return None;
    }
    // r u = γ⁻¹ w.
    Some(gamma.inverse())
}

fn is_prime(n: i64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

/// Power of the stabiliser of the highest cusp that puts Re(σ⁻¹w) into [−½, ½).
fn strip_normaliser(group: &GroupData, w: Complex64) -> GroupElement {
    let (_, idx) = cusp_height(group, w);
    let cusp = &group.cusps[idx];
    let u = cusp.scaling.inverse().act(w);
    let k = (u.re + 0.5).floor() as i64;
    if k == 0 {
        return GroupElement::identity();
    }
    let s = cusp.translation_sign() as i64;
    cusp.parabolic.pow(-k * s)
}

/// y_Γ(z) = max over cusps and enumerated γ of Im(σ_𝔞⁻¹γz).
///
/// For each double-coset representative the best translate γTⁿ is chosen
/// analytically, so the maximum runs over all left cosets whose σ_𝔞⁻¹γ has
/// lower-left entry at most `c_max` in absolute value.
pub fn y_gamma(group: &GroupData, z: Complex64, c_max: u64) -> Result<f64> {
    if !(z.im > 0.0) {
        return Err(GroupError::NotInUpperHalfPlane(z));
    }
    let mut best = 0.0f64;
    for cusp in 0..group.cusps.len() {
        for rep in cusp_coset_reps(group, cusp, c_max as f64)? {
            let m = &rep.scaled.0;
            let h = if rep.expand {
                let c = m[1][0];
                let center = -z.re - m[1][1] / c;
                [center.floor(), center.ceil()]
                    .iter()
                    .map(|&n| rep.scaled.act(z + n).im)
                    .fold(0.0, f64::max)
            } else {
                rep.scaled.act(z).im
            };
            best = best.max(h);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_sign() {
        let g = GroupElement::new(-1, 0, 0, -1).unwrap();
        assert!(g.is_identity());
        let s = GroupElement::new(0, 1, -1, 0).unwrap();
        assert_eq!(s.entries(), [[0, -1], [1, 0]]);
    }

    #[test]
    fn rejects_bad_determinant() {
        assert!(matches!(
            GroupElement::new(2, 0, 0, 1),
            Err(GroupError::Determinant { .. })
        ));
    }

    #[test]
    fn moebius_examples() {
        let id = moebius_apply(&GroupElement::identity(), c(0.0, 1.0)).unwrap();
        assert_eq!((id.w, id.j, id.eps), (c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0)));

        let s = moebius_apply(&GroupElement::inversion(), c(0.0, 1.0)).unwrap();
        assert!((s.w - c(0.0, 1.0)).norm() < 1e-15);
        assert!((s.j - c(0.0, 1.0)).norm() < 1e-15);
        assert!((s.eps - c(0.0, 1.0)).norm() < 1e-15);

        let t = moebius_apply(&GroupElement::translation(1), c(0.3, 0.7)).unwrap();
        assert!((t.w - c(1.3, 0.7)).norm() < 1e-15);
        assert_eq!(t.j, c(1.0, 0.0));
    }

    #[test]
    fn moebius_rejects_lower_half_plane() {
        assert!(moebius_apply(&GroupElement::identity(), c(0.0, 0.0)).is_err());
        assert!(moebius_apply(&GroupElement::identity(), c(1.0, -2.0)).is_err());
    }

    #[test]
    fn imaginary_part_transforms() {
        let g = GroupElement::new(7, -2, 11, -3).unwrap();
        let z = c(0.2, 0.9);
        let m = moebius_apply(&g, z).unwrap();
        let expect = z.im / m.j.norm_sqr();
        assert!((m.w.im - expect).abs() <= 1e-14 * expect);
    }

    /// Brute force over small matrices, deduplicated by the two-sided Γ_∞ action.
    fn brute_force_double_cosets(level: i64, c_max: i64) -> Vec<(i64, i64)> {
        let mut seen = std::collections::BTreeSet::new();
        let r = 12;
        for a in -r..=r {
            for b in -r..=r {
                for cc in -c_max..=c_max {
                    for d in -r..=r {
                        if a * d - b * cc != 1 || cc.rem_euclid(level) != 0 {
                            continue;
                        }
                        let g = GroupElement::new(a, b, cc, d).unwrap();
                        if g.c() == 0 {
                            seen.insert((0, 1));
                        } else {
                            seen.insert((g.c(), g.d().rem_euclid(g.c())));
                        }
                    }
                }
            }
        }
        seen.into_iter().collect()
    }

    #[test]
    fn coset_reps_examples() {
        let sl2 = GroupData::modular_group();
        let reps = coset_reps_infinity(&sl2, 1);
        assert_eq!(reps.len(), 2);
        assert_eq!(brute_force_double_cosets(1, 1).len(), 2);

        let g11 = GroupData::gamma0_11();
        assert_eq!(coset_reps_infinity(&g11, 10), vec![GroupElement::identity()]);
    }

    #[test]
    fn coset_reps_match_brute_force() {
        let sl2 = GroupData::modular_group();
        let reps: Vec<(i64, i64)> = coset_reps_infinity(&sl2, 4)
            .iter()
            .map(|g| if g.c() == 0 { (0, 1) } else { (g.c(), g.d()) })
            .collect();
        assert_eq!(reps, brute_force_double_cosets(1, 4));
    }

    #[test]
    fn coset_counts_are_euler_phi() {
        let sl2 = GroupData::modular_group();
        let phi = |n: i64| (1..=n).filter(|k| k.gcd(&n) == 1).count();
        for c0 in 1..=30i64 {
            let upto = coset_reps_infinity(&sl2, c0 as u64).len();
            let below = coset_reps_infinity(&sl2, (c0 - 1) as u64).len();
            assert_eq!(upto - below, phi(c0), "c = {c0}");
        }
    }

    #[test]
    fn coset_reps_pairwise_inequivalent() {
        let g11 = GroupData::gamma0_11();
        let reps = coset_reps_infinity(&g11, 66);
        for (i, r1) in reps.iter().enumerate() {
            assert!(g11.contains(r1));
            for r2 in &reps[i + 1..] {
                assert_ne!((*r1 * r2.inverse()).c(), 0, "{r1} ~ {r2}");
            }
        }
    }

    #[test]
    fn builtin_gamma0_11_is_consistent() {
        let g = GroupData::gamma0_11();
        assert_eq!(g.level, 11);
        assert_eq!(g.genus, 1);
        assert_eq!(g.cusps.len(), 2);
        for gen in &g.generators {
            assert!(g.contains(gen));
        }
        let round = GroupData::from_json_str(&g.to_json()).unwrap();
        assert_eq!(round.generators, g.generators);
    }

    #[test]
    fn config_loader_rejects_bad_input() {
        let bad_level = GAMMA0_11_JSON.replace("[[7, -2], [11, -3]]", "[[1, 0], [2, 1]]");
        assert!(matches!(
            GroupData::from_json_str(&bad_level),
            Err(GroupError::NotInLevel(..))
        ));
        let bad_det = GAMMA0_11_JSON.replace("[[7, -2], [11, -3]]", "[[7, -2], [11, -2]]");
        assert!(matches!(
            GroupData::from_json_str(&bad_det),
            Err(GroupError::Determinant { .. })
        ));
    }

    #[test]
    fn reduction_classical_oracle() {
        let sl2 = GroupData::modular_group();
        let z = c(0.1, 0.1);
        let (z0, g) = reduce_to_fundamental(&sl2, z).unwrap();
        assert!(z0.im >= 3f64.sqrt() / 2.0 - 1e-12);
        assert!(z0.re.abs() <= 0.5 + 1e-12 && z0.norm() >= 1.0 - 1e-12);
        assert!((g.act(z0) - z).norm() < 1e-12);
    }

    #[test]
    fn reduction_is_idempotent_and_translation_invariant() {
        for group in [GroupData::modular_group(), GroupData::gamma0_11()] {
            for z in [c(0.1, 0.1), c(-3.3, 0.02), c(0.45, 0.8), c(2.0, 5.0)] {
                let (z0, g) = reduce_to_fundamental(&group, z).unwrap();
                assert!((g.act(z0) - z).norm() < 1e-12 * (1.0 + z.norm()));
                let (z1, g1) = reduce_to_fundamental(&group, z0).unwrap();
                assert!(g1.is_identity(), "{z0} moved by {g1}");
                assert!((z1 - z0).norm() < 1e-15);
                let (z2, _) = reduce_to_fundamental(&group, z + 1.0).unwrap();
                assert!((z2 - z0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_height_is_bounded_below() {
        // Γ₀(11) has index 12 with coset reps I and z ↦ −1/(z+j); from the
        // cusp 0 the latter sit at height Im(w)/11 ≥ √3/22.
        let g11 = GroupData::gamma0_11();
        for k in 1..=14 {
            for i in 0..50 {
                let z = c(i as f64 / 50.0 + 0.003, 2f64.powi(-k));
                let (z0, g) = reduce_to_fundamental(&g11, z).unwrap();
                assert!(cusp_height(&g11, z0).0 >= 3f64.sqrt() / 22.0 - 1e-9, "{z} -> {z0}");
                assert!((g.act(z0) - z).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn y_gamma_examples() {
        let g11 = GroupData::gamma0_11();
        assert!(y_gamma(&g11, c(0.0, 10.0), 50).unwrap() >= 10.0);
        let sl2 = GroupData::modular_group();
        assert!((y_gamma(&sl2, c(0.0, 1.0), 50).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn y_gamma_monotone_and_invariant() {
        let g11 = GroupData::gamma0_11();
        let z = c(0.13, 0.05);
        let mut prev = 0.0;
        for cm in [11, 22, 44, 88] {
            let y = y_gamma(&g11, z, cm).unwrap();
            assert!(y >= prev);
            prev = y;
        }
        for gen in &g11.generators {
            let y1 = y_gamma(&g11, z, 400).unwrap();
            let y2 = y_gamma(&g11, gen.act(z), 400).unwrap();
            assert!((y1 - y2).abs() < 1e-9 * y1, "{gen}: {y1} vs {y2}");
        }
    }

    #[test]
    fn cusp_zero_reps_scale_to_unit_translation() {
        let g11 = GroupData::gamma0_11();
        let zero = &g11.cusps[1];
        assert_eq!(zero.parabolic, GroupElement::new(1, 0, -11, 1).unwrap());
        let reps = cusp_coset_reps(&g11, 1, 20.0).unwrap();
        assert!(!reps.is_empty());
        for r in &reps {
            assert!(g11.contains(&r.gamma));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn element() -> impl Strategy<Value = GroupElement> {
            prop::collection::vec(0usize..4, 0..6).prop_map(|letters| {
                let gens = [
                    GroupElement::translation(1),
                    GroupElement::translation(-1),
                    GroupElement::inversion(),
                    GroupElement::new(7, -2, 11, -3).unwrap(),
                ];
                letters.iter().fold(GroupElement::identity(), |acc, &i| acc * gens[i])
            })
        }

        fn point() -> impl Strategy<Value = Complex64> {
            (-2.0f64..2.0, 0.05f64..3.0).prop_map(|(x, y)| Complex64::new(x, y))
        }

        proptest! {
            #[test]
            fn group_axioms(a in element(), b in element(), cc in element()) {
                prop_assert_eq!((a * b) * cc, a * (b * cc));
                prop_assert_eq!(a * GroupElement::identity(), a);
                prop_assert_eq!(GroupElement::identity() * a, a);
                prop_assert!((a * a.inverse()).is_identity());
            }

            #[test]
            fn automorphy_cocycle(g in element(), h in element(), z in point()) {
                let lhs = (g * h).j(z);
                let rhs = g.j(h.act(z)) * h.j(z);
                // PSL2: the cocycle holds up to the sign of the representative.
                let err = (lhs - rhs).norm().min((lhs + rhs).norm());
                prop_assert!(err <= 1e-12 * lhs.norm().max(rhs.norm()));
            }

            #[test]
            fn imaginary_part_law(g in element(), z in point()) {
                let m = moebius_apply(&g, z).unwrap();
                let expect = z.im / m.j.norm_sqr();
                prop_assert!((m.w.im - expect).abs() <= 1e-12 * expect);
            }
        }
    }
}
