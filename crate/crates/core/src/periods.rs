//! Iterated Eichler integrals of the level-11 newform, their periods, and
//! numeric checks of the transformation law, annihilation and growth.
//!
//! All evaluations go through the Fourier expansion at ∞. Points are chosen
//! so that every argument stays above the height where the attached tail
//! bound is negligible; the points never have to be moved by the group.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{BufRead, Write as _};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{cusp_height, reduce_to_fundamental, GroupData, GroupElement, GroupError};
use crate::qseries::{CoeffFile, QSeries, QSeriesError};
use crate::report::VerificationReport;

/// Absolute tail budget used to set evaluation floors.
pub const TAIL_BUDGET: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum PeriodError {
    #[error(transparent)]
    Series(#[from] QSeriesError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("index vector {0:?} needs labels in 1..={1}")]
    BadIndex(Vec<u32>, usize),
    #[error("Im z = {im:.3e} is below the floor {floor:.3e} for F{v:?}")]
    BelowFloor { v: Vec<u32>, im: f64, floor: f64 },
    #[error("no admissible sample found: {0}")]
    NoSample(String),
    #[error("period cache: {0}")]
    Cache(String),
}

type Result<T> = std::result::Result<T, PeriodError>;

/// A value with a bound on its truncation and rounding error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounded {
    pub value: Complex64,
    pub err: f64,
}

impl Bounded {
    fn exact(value: Complex64) -> Self {
        Bounded { value, err: 0.0 }
    }
}

/// Smallest height at which the series tail is within `budget`, by bisection.
pub fn evaluation_floor(s: &QSeries, budget: f64) -> f64 {
    let (mut lo, mut hi) = (1e-6, 10.0 * s.width);
    if s.tail_bound(lo) <= budget {
        return lo;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if s.tail_bound(mid) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// F_v at ∞ with its antiderivative from i∞.
#[derive(Clone, Debug)]
pub struct IteratedForm {
    pub v: Vec<u32>,
    pub series: QSeries,
    pub anti: QSeries,
    pub floor: f64,
    pub log: Vec<String>,
}

impl IteratedForm {
    pub fn order(&self) -> usize {
        self.v.len()
    }

    /// Lowest height at which both the series and its antiderivative have
    /// tails within `budget`.
    pub fn floor_for(&self, budget: f64) -> f64 {
        evaluation_floor(&self.series, budget).max(evaluation_floor(&self.anti, budget))
    }

    fn eval(&self, s: &QSeries, z: Complex64) -> Result<Bounded> {
        self.eval_above(s, z, self.floor)
    }

    fn eval_above(&self, s: &QSeries, z: Complex64, floor: f64) -> Result<Bounded> {
        if !(z.im >= floor) {
            return Err(PeriodError::BelowFloor { v: self.v.clone(), im: z.im, floor });
        }
        let (value, tail) = s.evaluate_with_floor(z, 0.0)?;
        let rounding = 4.0 * f64::EPSILON * (s.coeffs.len() as f64 + 4.0) * abs_sum(s, z.im);
        Ok(Bounded { value, err: tail + rounding })
    }

    pub fn eval_f(&self, z: Complex64) -> Result<Bounded> {
        self.eval(&self.series, z)
    }

    pub fn eval_a(&self, z: Complex64) -> Result<Bounded> {
        self.eval(&self.anti, z)
    }

    /// F_v(z) with an explicit floor, for checks whose tolerance allows a
    /// larger tail than the default budget.
    pub fn eval_f_above(&self, z: Complex64, floor: f64) -> Result<Bounded> {
        self.eval_above(&self.series, z, floor)
    }

    pub fn eval_a_above(&self, z: Complex64, floor: f64) -> Result<Bounded> {
        self.eval_above(&self.anti, z, floor)
    }
}

fn abs_sum(s: &QSeries, y: f64) -> f64 {
    let r = (-2.0 * PI * y / s.width).exp();
    let mut acc = 0.0;
    for c in s.coeffs.iter().rev() {
        acc = acc * r + c.norm();
    }
    acc * r.powi(s.n0 as i32)
}

/// Innermost-out construction f_{v_t} → ∫ → ·f_{v_{t−1}} → ∫ → … → ·f_{v₁}.
pub fn build_iterated(forms: &[QSeries], v: &[u32], n_max: usize) -> Result<IteratedForm> {
    if v.is_empty() || v.iter().any(|&j| j == 0 || j as usize > forms.len()) {
        return Err(PeriodError::BadIndex(v.to_vec(), forms.len()));
    }
    let pick = |j: u32| forms[j as usize - 1].clone();
    let mut log = vec![format!("start f{}", v[v.len() - 1])];
    let mut series = pick(v[v.len() - 1]);
    for &j in v[..v.len() - 1].iter().rev() {
        series = pick(j).multiply(&series.antiderivative()?, n_max)?;
        log.push(format!("f{j} * Int[..], n0 = {}, N = {}", series.n0, series.last_index()));
    }
    let anti = series.antiderivative()?;
    let mut form = IteratedForm { v: v.to_vec(), series, anti, floor: 0.0, log };
    form.floor = form.floor_for(TAIL_BUDGET);
    Ok(form)
}

/// Memoized iterated forms over a fixed set of weight-2 cusp forms.
pub struct Workbench {
    pub group: GroupData,
    pub forms: Vec<QSeries>,
    pub n_max: usize,
    cache: RwLock<HashMap<Vec<u32>, Arc<IteratedForm>>>,
}

impl Workbench {
    pub fn new(group: GroupData, forms: Vec<QSeries>, n_max: usize) -> Self {
        Workbench { group, forms, n_max, cache: RwLock::new(HashMap::new()) }
    }

    /// Γ₀(11) with its newform truncated to `terms` coefficients.
    pub fn level11(terms: usize) -> Self {
        let f = CoeffFile::level11().to_qseries(Some(terms));
        Self::new(GroupData::gamma0_11(), vec![f], terms)
    }

    pub fn terms(&self) -> usize {
        self.forms.iter().map(|f| f.coeffs.len()).max().unwrap_or(0)
    }

    pub fn form(&self, v: &[u32]) -> Result<Arc<IteratedForm>> {
        if let Some(f) = self.cache.read().expect("cache lock").get(v) {
            return Ok(f.clone());
        }
        let built = Arc::new(build_iterated(&self.forms, v, self.n_max)?);
        let mut w = self.cache.write().expect("cache lock");
        Ok(w.entry(v.to_vec()).or_insert(built).clone())
    }

    /// ∫_{z₀}^{γz₀} f_j = A(γz₀) − A(z₀).
    pub fn period(&self, j: u32, g: &GroupElement, z0: Complex64) -> Result<Bounded> {
        let f = self.form(&[j])?;
        let a1 = f.eval_a(g.act(z0))?;
        let a0 = f.eval_a(z0)?;
        Ok(Bounded { value: a1.value - a0.value, err: a1.err + a0.err })
    }

    /// The period with basepoint on the isometric circle of γ at angle θ.
    pub fn period_at(&self, j: u32, g: &GroupElement, theta: f64) -> Result<Bounded> {
        if g.c() == 0 {
            // A translation: the cusp-form period vanishes identically.
            return Ok(Bounded::exact(Complex64::new(0.0, 0.0)));
        }
        self.period(j, g, isometric_point(g, theta))
    }

    /// [`Workbench::period_at`] with an explicit evaluation floor.
    pub fn period_above(&self, j: u32, g: &GroupElement, theta: f64, floor: f64) -> Result<Bounded> {
        if g.c() == 0 {
            return Ok(Bounded::exact(Complex64::new(0.0, 0.0)));
        }
        let f = self.form(&[j])?;
        let z0 = isometric_point(g, theta);
        let a1 = f.eval_a_above(g.act(z0), floor)?;
        let a0 = f.eval_a_above(z0, floor)?;
        Ok(Bounded { value: a1.value - a0.value, err: a1.err + a0.err })
    }

    /// Π_u(γ) = ∫_{i∞}^{γi∞} F_u, from
    /// A_u(γw) − A_u(w) = Π_u(γ) + Σ_{r=1}^{|u|−1} Π_{u[r..]}(γ)·A_{u[..r]}(w).
    pub fn higher_period(&self, u: &[u32], g: &GroupElement, w: Complex64) -> Result<Complex64> {
        let gw = g.act(w);
        let mut val = self.form(u)?.eval_a(gw)?.value - self.form(u)?.eval_a(w)?.value;
        for r in 1..u.len() {
            let pi = self.higher_period(&u[r..], g, w)?;
            val -= pi * self.form(&u[..r])?.eval_a(w)?.value;
        }
        Ok(val)
    }

    /// Π_u(γ) at the top of the isometric circle, with the discrepancy against
    /// a second basepoint at θ = π/3 as a stabilization check.
    pub fn higher_period_checked(&self, u: &[u32], g: &GroupElement) -> Result<(Complex64, f64)> {
        if g.c() == 0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let p1 = self.higher_period(u, g, isometric_point(g, PI / 2.0))?;
        let p2 = self.higher_period(u, g, isometric_point(g, PI / 3.0))?;
        Ok((p1, (p1 - p2).norm()))
    }
}

/// (−d + e^{iθ})/c: |j(γ, z)| = 1, so Im γz = Im z = sin θ / c.
pub fn isometric_point(g: &GroupElement, theta: f64) -> Complex64 {
    let c = g.c() as f64;
    (Complex64::new(-(g.d() as f64), 0.0) + Complex64::from_polar(1.0, theta)) / c
}

fn rel(diff: Complex64, a: Complex64, b: Complex64) -> f64 {
    diff.norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// A random element T^n·γ with γ completing a coprime row (c, d), c ∈ `cs`.
pub fn random_element(rng: &mut ChaCha8Rng, cs: &[i64]) -> GroupElement {
    loop {
        let c = cs[rng.gen_range(0..cs.len())];
        let d = rng.gen_range(0..c);
        if let Some(g) = crate::group::complete_bottom_row(c, d) {
            let n = rng.gen_range(-2..=2);
            return GroupElement::translation(n) * g;
        }
    }
}

/// A random element and a point on its isometric circle above `floor`.
fn sample_pair(rng: &mut ChaCha8Rng, floor: f64) -> Result<(GroupElement, Complex64)> {
    for _ in 0..10_000 {
        let g = random_element(rng, &[11, 22]);
        let theta = rng.gen_range(PI / 4.0..3.0 * PI / 4.0);
        let z = isometric_point(&g, theta);
        if z.im >= floor && g.act(z).im >= floor {
            return Ok((g, z));
        }
    }
    Err(PeriodError::NoSample(format!("no point above {floor:.3e} on small isometric circles")))
}

pub const MODULARITY_ANCHOR: &str = "f(γz)(cz+d)^-2 = f(z) for the level-11 newform";
pub const COCYCLE_ANCHOR: &str = "F_v|(γ-1) = Σ_r F_{v[..r]} · ∫_{i∞}^{γ i∞} F_{v[r..]}";
pub const ANNIHILATION_ANCHOR: &str = "F_v|(γ₁-1)⋯(γ_t-1) = 0";

/// The transformation law of F_{(1,…,1)} at `trials` seeded (γ, z) samples.
/// At t = 1 this is modularity of the newform.
pub fn verify_numeric_cocycle(wb: &Workbench, t: usize, trials: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
    let v = vec![1u32; t.max(1)];
    let anchor = if t <= 1 { MODULARITY_ANCHOR } else { COCYCLE_ANCHOR };
    let mut report = VerificationReport::new("cocycle", anchor)
        .param("level", wb.group.level)
        .param("t", t)
        .param("trials", trials)
        .param("terms", wb.terms())
        .param("seed", seed)
        .param("tol", tol);
    let form = wb.form(&v)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let (g, z) = sample_pair(&mut rng, form.floor)?;
        let j = g.j(z);
        let fz = form.eval_f(z)?.value;
        let fgz = form.eval_f(g.act(z))?.value / (j * j);
        let lhs = fgz - fz;
        let scale = fz.norm().max(fgz.norm()).max(f64::MIN_POSITIVE);
        let mut rhs = Complex64::new(0.0, 0.0);
        for r in 1..v.len() {
            let (pi, drift) = wb.higher_period_checked(&v[r..], &g)?;
            let prefix = wb.form(&v[..r])?.eval_f(z)?.value;
            // Drift between two basepoints, measured by its effect on the identity.
            report.numeric_case(
                format!("trial {trial}: basepoint drift of Pi{:?}", &v[r..]),
                prefix.norm() * drift / scale,
                tol,
                pi,
                drift,
            );
            rhs += prefix * pi;
        }
        let case = format!("trial {trial}: gamma={:?} z={:.6}{:+.6}i", g.entries(), z.re, z.im);
        report.numeric_case(case, rel(lhs - rhs, fgz, fz), tol, lhs, rhs);
    }
    Ok(report)
}

/// A tuple (γ₁, …, γ_t) and z such that every ordered sub-product maps z
/// above `floor`.
#[derive(Clone, Debug)]
pub struct AnnihilationSample {
    pub gammas: Vec<GroupElement>,
    pub z: Complex64,
    pub min_height: f64,
}

fn subproducts(gs: &[GroupElement]) -> Vec<(usize, GroupElement)> {
    (0usize..1 << gs.len())
        .map(|mask| {
            let g = gs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(GroupElement::identity(), |acc, (_, g)| acc * *g);
            (mask.count_ones() as usize, g)
        })
        .collect()
}

/// Seeded search for `count` tuples of level-11 elements with c = 11 and
/// |d| < 11 (left translates by T^{−1}, 1, T for all but the first factor),
/// each paired with the grid point maximizing the lowest sub-product image.
/// Tuples whose best point falls below `floor` are rejected.
pub fn annihilation_samples(
    t: usize,
    floor: f64,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<AnnihilationSample> {
    let base: Vec<GroupElement> =
        (-10..=10).filter(|d| *d != 0).filter_map(|d| crate::group::complete_bottom_row(11, d)).collect();
    let shifted: Vec<GroupElement> = base
        .iter()
        .flat_map(|g| (-1..=1).map(move |n| GroupElement::translation(n) * *g))
        .collect();
    let grid: Vec<Complex64> = (-55..55)
        .flat_map(|i| (4..=20).map(move |k| Complex64::new(i as f64 / 110.0, k as f64 / 200.0)))
        .filter(|z| z.im >= floor)
        .collect();
    let mut out = Vec::new();
    for _ in 0..200_000 {
        if out.len() == count {
            break;
        }
        let mut gammas = vec![base[rng.gen_range(0..base.len())]];
        for _ in 1..t {
            gammas.push(shifted[rng.gen_range(0..shifted.len())]);
        }
        let prods = subproducts(&gammas);
        if prods.iter().any(|(n, g)| *n > 0 && g.is_identity()) {
            continue;
        }
        let mut best: Option<(f64, Complex64)> = None;
        for &z in &grid {
            let bar = best.map_or(floor, |(b, _)| b);
            let mut h = f64::INFINITY;
            for (_, g) in &prods {
                h = h.min(g.act(z).im);
                if h < bar {
                    break;
                }
            }
            if h >= bar {
                best = Some((h, z));
            }
        }
        if let Some((h, z)) = best {
            out.push(AnnihilationSample { gammas, z, min_height: h });
        }
    }
    out
}

/// F_{(1,…,1)}|(γ₁−1)⋯(γ_t−1) at seeded admissible samples, relative to the
/// largest slashed term. Sample heights only need tails below 10⁻³·tol; the
/// propagated tail bound of each sample is itself checked against tol.
pub fn verify_annihilation(wb: &Workbench, t: usize, trials: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
    let v = vec![1u32; t.max(1)];
    let form = wb.form(&v)?;
    let report = VerificationReport::new("annihilation", ANNIHILATION_ANCHOR)
        .param("level", wb.group.level)
        .param("t", t)
        .param("trials", trials)
        .param("terms", wb.terms())
        .param("seed", seed)
        .param("tol", tol);
    let floor = form.floor_for(1e-3 * tol).min(form.floor);
    let mut report = report.param("floor", floor);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = annihilation_samples(v.len(), floor, trials, &mut rng);
    if pool.len() < trials {
        report.error_case(
            "sample search",
            format!("only {} of {trials} {}-tuples keep all sub-products above {floor:.3e}", pool.len(), v.len()),
        );
    }
    for (trial, s) in pool.iter().enumerate() {
        let mut total = Complex64::new(0.0, 0.0);
        let mut scale: f64 = 0.0;
        let mut err = 0.0;
        for (n, g) in subproducts(&s.gammas) {
            let j2 = g.j(s.z).powi(2);
            let b = form.eval_f_above(g.act(s.z), floor)?;
            let term = b.value / j2;
            let sign = if (v.len() - n) % 2 == 0 { 1.0 } else { -1.0 };
            total += term * sign;
            scale = scale.max(term.norm());
            err += b.err / j2.norm();
        }
        let scale = scale.max(f64::MIN_POSITIVE);
        let ents: Vec<_> = s.gammas.iter().map(|g| g.entries()).collect();
        let tag = format!("trial {trial}: gammas={ents:?} z={:.4}{:+.4}i", s.z.re, s.z.im);
        report.numeric_case(format!("{tag} tail bound"), err / scale, tol, err, scale);
        report.numeric_case(tag, total.norm() / scale, tol, total, 0.0);
    }
    Ok(report)
}

pub const PERIOD_ANCHOR: &str = "∫_{z₀}^{γz₀} f is a homomorphism Γ₀(11) → ℂ independent of z₀";

fn random_word(rng: &mut ChaCha8Rng, gens: &[GroupElement], max_len: usize) -> GroupElement {
    let len = rng.gen_range(1..=max_len);
    (0..len).fold(GroupElement::identity(), |acc, _| {
        let g = gens[rng.gen_range(0..gens.len())];
        acc * if rng.gen_bool(0.5) { g } else { g.inverse() }
    })
}

/// Additivity, inverse antisymmetry and basepoint independence of the
/// classical period over `words` seeded pairs of generator words, keeping
/// words whose lower-left entry is at most `c_cap`.
pub fn verify_period_structure(wb: &Workbench, words: usize, seed: u64, tol: f64, c_cap: i64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("periods", PERIOD_ANCHOR)
        .param("level", wb.group.level)
        .param("words", words)
        .param("terms", wb.terms())
        .param("seed", seed)
        .param("tol", tol)
        .param("c_cap", c_cap);
    let floor = wb.form(&[1])?.floor;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = wb.group.generators.clone();
    let id = wb.period_at(1, &GroupElement::identity(), PI / 2.0)?;
    report.numeric_case("identity", id.value.norm(), tol, id.value, 0.0);
    let mut found = 0;
    let mut attempts = 0;
    while found < words {
        attempts += 1;
        if attempts > 100_000 {
            return Err(PeriodError::NoSample(format!("only {found} word pairs under c <= {c_cap}")));
        }
        let g = random_word(&mut rng, &gens, 3);
        let h = random_word(&mut rng, &gens, 3);
        let gh = g * h;
        if [g, h, gh].iter().any(|x| x.c() > c_cap || (x.c() > 0 && 1.0 / (x.c() as f64) < floor)) {
            continue;
        }
        found += 1;
        let pg = wb.period_at(1, &g, PI / 2.0)?;
        let ph = wb.period_at(1, &h, PI / 2.0)?;
        let pgh = wb.period_at(1, &gh, PI / 2.0)?;
        let pinv = wb.period_at(1, &g.inverse(), PI / 2.0)?;
        let tag = format!("{:?}*{:?}", g.entries(), h.entries());
        let add = pgh.value - pg.value - ph.value;
        report.numeric_case(format!("additivity {tag}"), add.norm(), tol, pgh.value, pg.value + ph.value);
        let inv = pg.value + pinv.value;
        report.numeric_case(format!("inverse {:?}", g.entries()), inv.norm(), tol, pg.value, -pinv.value);
        if g.c() > 0 {
            let theta = rng.gen_range(PI / 3.0..2.0 * PI / 3.0);
            let z0 = isometric_point(&g, theta);
            if z0.im >= floor {
                let alt = wb.period(1, &g, z0)?;
                let budget = pg.err + alt.err;
                report.numeric_case(
                    format!("basepoint {:?} theta={theta:.4}", g.entries()),
                    (alt.value - pg.value).norm() / budget.max(f64::MIN_POSITIVE),
                    1.0,
                    alt.value,
                    pg.value,
                );
            }
        }
    }
    Ok(report)
}

/// Least-squares slope and RMS residual of ys against xs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GrowthFit {
    pub degree: f64,
    pub residual: f64,
    pub points: usize,
}

pub fn fit_degree(xs: &[f64], ys: &[f64]) -> GrowthFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    GrowthFit { degree: slope, residual: (rss / n).sqrt(), points: xs.len() }
}

/// Samples along the orbit γ^k z₀ of a hyperbolic γ: (|log Im z_k|, |A_v(z_k)|).
///
/// The antiderivatives of all prefixes of v are transported exactly by
/// A_u(γw) = A_u(w) + Π_u(γ) + Σ_r Π_{u[r..]}(γ)·A_{u[..r]}(w), and log Im is
/// tracked additively so the ladder can run far below double-precision range.
pub fn hyperbolic_ladder(
    wb: &Workbench,
    v: &[u32],
    g: &GroupElement,
    z0: Complex64,
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    let t = v.len();
    let mut pis = Vec::with_capacity(t);
    for r in 0..t {
        pis.push(wb.higher_period_checked(&v[r..], g)?.0);
    }
    // a[r] = A_{v[..r+1]}(w)
    let mut a: Vec<Complex64> = (1..=t)
        .map(|r| wb.form(&v[..r]).and_then(|f| f.eval_a(z0)).map(|b| b.value))
        .collect::<Result<_>>()?;
    let mut w = z0;
    let mut log_y = z0.im.ln();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut next = a.clone();
        for len in 1..=t {
            // u = v[..len]; its suffixes are v[r..len].
            let mut val = a[len - 1];
            if len == t {
                val += pis[0];
            } else {
                val += wb.higher_period_checked(&v[..len], g)?.0;
            }
            for r in 1..len {
                let pi = if len == t { pis[r] } else { wb.higher_period_checked(&v[r..len], g)?.0 };
                val += pi * a[r - 1];
            }
            next[len - 1] = val;
        }
        log_y -= 2.0 * g.j(w).norm().ln();
        w = g.act(w);
        if !(w.im > 0.0) {
            // Keep a representative point once Im underflows; only Re and
            // log Im are used from here on.
            w = Complex64::new(w.re, f64::MIN_POSITIVE);
        }
        a = next;
        out.push((log_y.abs(), a[t - 1].norm()));
    }
    Ok(out)
}

pub const GROWTH_ANCHOR: &str = "|∫_{i∞}^z F_v| ≪ Σ_{j≤t} |log Im z|^j along hyperbolic orbits";
pub const BOUNDED_ANCHOR: &str = "Im(z)|f(z)| ≪ 1 for the level-11 newform";

/// Fitted polylog degree of |A_v| on seeded hyperbolic ladders; passes when
/// the degree is at most t + 0.5. Ladder points with |log y| in [2, 10⁴] are fitted.
pub fn growth_probe(wb: &Workbench, v: &[u32], ladders: usize, seed: u64) -> Result<VerificationReport> {
    let t = v.len();
    let mut report = VerificationReport::new("growth", GROWTH_ANCHOR)
        .param("v", v)
        .param("ladders", ladders)
        .param("seed", seed)
        .param("terms", wb.terms());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hyperbolic: Vec<GroupElement> = wb
        .group
        .generators
        .iter()
        .filter(|g| g.c() > 0)
        .flat_map(|g| [*g, g.inverse()])
        .collect();
    for l in 0..ladders {
        let base = hyperbolic[rng.gen_range(0..hyperbolic.len())];
        let g = GroupElement::translation(rng.gen_range(-1..=1)) * base;
        if g.trace().abs() <= 2 {
            continue;
        }
        let z0 = Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.4..0.8));
        let pts = hyperbolic_ladder(wb, v, &g, z0, 400)?;
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts
            .iter()
            .filter(|(ly, a)| (2.0..=1e4).contains(ly) && *a > 0.0)
            .map(|(ly, a)| (ly.ln(), a.ln()))
            .unzip();
        let fit = fit_degree(&xs, &ys);
        report.numeric_case(
            format!("ladder {l}: gamma={:?} degree={:.3} rms={:.2e} n={}", g.entries(), fit.degree, fit.residual, fit.points),
            fit.degree,
            t as f64 + 0.5,
            fit.degree,
            t as f64 + 0.5,
        );
    }
    Ok(report)
}

/// y·|f(z)|, invariant under Γ₀(11) and, for a newform, under the Fricke
/// involution; evaluated at the reduced point seen from its highest cusp.
pub fn invariant_size(wb: &Workbench, z: Complex64) -> Result<Bounded> {
    let (z0, _) = reduce_to_fundamental(&wb.group, z)?;
    let (_, cusp) = cusp_height(&wb.group, z0);
    let w = wb.group.cusps[cusp].scaling.inverse().act(z0);
    let f = wb.form(&[1])?;
    let b = f.eval_f(w)?;
    Ok(Bounded { value: Complex64::new(w.im * b.value.norm(), 0.0), err: w.im * b.err })
}

/// Boundedness probe at order one: max over an x-grid of y|f| on heights 2^{−k};
/// passes when the fitted polylog degree is at most 0.5 and the values stay
/// below the sup over the first rung times 10.
pub fn boundedness_probe(wb: &Workbench, k_max: u32, seed: u64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("bounded", BOUNDED_ANCHOR)
        .param("k_max", k_max)
        .param("seed", seed)
        .param("terms", wb.terms());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rng.gen_range(0.0..1.0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut first = None;
    // Rungs start at y = 1/8, below the top of the reduced domain; higher
    // rungs only see the cusp at ∞ where y|f| decays.
    for k in 3..=k_max.max(3) {
        let y = 2f64.powi(-(k as i32));
        let mut m: f64 = 0.0;
        for i in 0..64 {
            let x = (i as f64 + offset) / 64.0;
            m = m.max(invariant_size(wb, Complex64::new(x, y))?.value.re);
        }
        let bound = *first.get_or_insert(m) * 10.0;
        report.numeric_case(format!("y=2^-{k} max y|f|={m:.4e}"), m, bound, m, bound);
        xs.push(y.ln().abs().ln());
        ys.push(m.ln());
    }
    let fit = fit_degree(&xs, &ys);
    report.numeric_case(
        format!("fitted degree {:.3} (rms {:.2e})", fit.degree, fit.residual),
        fit.degree,
        0.5,
        fit.degree,
        0.5,
    );
    Ok(report)
}

/// One cached period: the JSON-lines record format of the cache file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub level: u64,
    pub label: String,
    pub gamma: [[i64; 2]; 2],
    pub value: [f64; 2],
    pub y_used: f64,
    pub tol: f64,
}

/// Read-mostly period cache. Readers see either no record or a complete one;
/// `save` writes a temporary file and renames it into place.
pub struct PeriodCache {
    path: Option<PathBuf>,
    records: RwLock<HashMap<(String, [[i64; 2]; 2]), PeriodRecord>>,
}

impl PeriodCache {
    pub fn in_memory() -> Self {
        PeriodCache { path: None, records: RwLock::new(HashMap::new()) }
    }

    /// Opens the cache at `path`, loading existing records if the file exists.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut map = HashMap::new();
        if path.exists() {
            let file = std::fs::File::open(&path).map_err(|e| PeriodError::Cache(e.to_string()))?;
            for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| PeriodError::Cache(e.to_string()))?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: PeriodRecord = serde_json::from_str(&line)
                    .map_err(|e| PeriodError::Cache(format!("line {}: {e}", i + 1)))?;
                map.insert((rec.label.clone(), rec.gamma), rec);
            }
        }
        Ok(PeriodCache { path: Some(path), records: RwLock::new(map) })
    }

    pub fn get(&self, label: &str, g: &GroupElement) -> Option<PeriodRecord> {
        self.records.read().expect("cache lock").get(&(label.to_string(), g.entries())).cloned()
    }

    pub fn insert(&self, rec: PeriodRecord) {
        let key = (rec.label.clone(), rec.gamma);
        self.records.write().expect("cache lock").entry(key).or_insert(rec);
    }

    pub fn len(&self) -> usize {
        self.records.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The period of f₁ along γ, computed at the top of the isometric circle
    /// on a miss.
    pub fn period(&self, wb: &Workbench, label: &str, g: &GroupElement) -> Result<Complex64> {
        if let Some(r) = self.get(label, g) {
            return Ok(Complex64::new(r.value[0], r.value[1]));
        }
        let p = wb.period_at(1, g, PI / 2.0)?;
        Ok(self.record(wb, label, g, p))
    }

    /// Like [`PeriodCache::period`] but evaluating down to `floor`; the
    /// returned error bound is stored with the record.
    pub fn period_above(&self, wb: &Workbench, label: &str, g: &GroupElement, floor: f64) -> Result<Bounded> {
        if let Some(r) = self.get(label, g) {
            return Ok(Bounded { value: Complex64::new(r.value[0], r.value[1]), err: r.tol });
        }
        let p = wb.period_above(1, g, PI / 2.0, floor)?;
        self.record(wb, label, g, p);
        Ok(p)
    }

    fn record(&self, wb: &Workbench, label: &str, g: &GroupElement, p: Bounded) -> Complex64 {
        let y_used = if g.c() == 0 { f64::INFINITY } else { 1.0 / g.c() as f64 };
        self.insert(PeriodRecord {
            level: wb.group.level,
            label: label.to_string(),
            gamma: g.entries(),
            value: [p.value.re, p.value.im],
            y_used: if y_used.is_finite() { y_used } else { 0.0 },
            tol: p.err,
        });
        p.value
    }

    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        let mut recs: Vec<PeriodRecord> = self.records.read().expect("cache lock").values().cloned().collect();
        recs.sort_by(|a, b| (a.label.as_str(), a.gamma).cmp(&(b.label.as_str(), b.gamma)));
        let tmp = path.with_extension("tmp");
        let mut f = std::fs::File::create(&tmp).map_err(|e| PeriodError::Cache(e.to_string()))?;
        for r in recs {
            let line = serde_json::to_string(&r).map_err(|e| PeriodError::Cache(e.to_string()))?;
            writeln!(f, "{line}").map_err(|e| PeriodError::Cache(e.to_string()))?;
        }
        f.sync_all().map_err(|e| PeriodError::Cache(e.to_string()))?;
        std::fs::rename(&tmp, path).map_err(|e| PeriodError::Cache(e.to_string()))?;
        Ok(())
    }
}
