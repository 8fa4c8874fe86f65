//! Truncated Fourier series in q = e(z/width) with explicit tail bounds.
//!
//! Beyond the stored range the coefficients are assumed to satisfy
//! |c(n)| ≤ C·n^p. Every evaluation returns the closed-form bound on the
//! dropped tail alongside the value.

use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// The level-11 newform, 1000 coefficients.
pub const LEVEL11_COEFFS: &str = include_str!("../data/11a.coeffs");

#[derive(Debug, Error)]
pub enum QSeriesError {
    #[error("coefficient file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("widths {0} and {1} differ")]
    WidthMismatch(f64, f64),
    #[error("antiderivative from i∞ needs a cuspidal series (n₀ ≥ 1)")]
    NotCuspidal,
    #[error("Im z = {im} is below the evaluation floor {floor}")]
    BelowFloor { im: f64, floor: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Exact contents of a coefficient file.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffFile {
    pub level: u64,
    pub weight: u32,
    pub label: String,
    pub coeffs: Vec<(u64, BigRational)>,
    pub warnings: Vec<String>,
}

impl FromStr for CoeffFile {
    type Err = QSeriesError;

    fn from_str(s: &str) -> Result<Self, QSeriesError> {
        let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or(QSeriesError::Parse { line: 1, msg: "empty file".into() })?;
        let header = header
            .trim()
            .strip_prefix('#')
            .ok_or(QSeriesError::Parse { line: 1, msg: "missing '#' header".into() })?;
        let (mut level, mut weight, mut label, mut count) = (None, None, None, None);
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or(QSeriesError::Parse { line: 1, msg: format!("bad header field '{field}'") })?;
            let bad = |_| QSeriesError::Parse { line: 1, msg: format!("bad value in '{field}'") };
            match k {
                "level" => level = Some(v.parse::<u64>().map_err(bad)?),
                "weight" => weight = Some(v.parse::<u32>().map_err(bad)?),
                "label" => label = Some(v.to_string()),
                "count" => count = Some(v.parse::<usize>().map_err(bad)?),
                _ => {}
            }
        }
        let missing = |k: &str| QSeriesError::Parse { line: 1, msg: format!("header lacks {k}") };
        let level = level.ok_or_else(|| missing("level"))?;
        let weight = weight.ok_or_else(|| missing("weight"))?;
        let label = label.ok_or_else(|| missing("label"))?;
        let count = count.ok_or_else(|| missing("count"))?;

        let mut coeffs = Vec::with_capacity(count);
        for (i, l) in lines {
            let line = i + 1;
            let mut parts = l.split_whitespace();
            let (Some(n), Some(c), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(QSeriesError::Parse { line, msg: "expected 'n c(n)'".into() });
            };
            let n: u64 = n
                .parse()
                .map_err(|_| QSeriesError::Parse { line, msg: format!("bad index '{n}'") })?;
            let c: BigRational = c
                .parse()
                .map_err(|_| QSeriesError::Parse { line, msg: format!("bad coefficient '{c}'") })?;
            if let Some((prev, _)) = coeffs.last() {
                if n <= *prev {
                    return Err(QSeriesError::Parse { line, msg: "indices must increase".into() });
                }
            }
            coeffs.push((n, c));
        }
        if coeffs.len() != count {
            return Err(QSeriesError::Parse {
                line: 1,
                msg: format!("header declares {count} coefficients, found {}", coeffs.len()),
            });
        }
        let mut warnings = Vec::new();
        let a1 = coeffs.iter().find(|(n, _)| *n == 1).map(|(_, c)| c.clone());
        let all_zero = coeffs.iter().all(|(_, c)| c.is_zero());
        if !all_zero && a1 != Some(BigRational::from_integer(1.into())) {
            warnings.push("a(1) != 1: series is not normalized".into());
        }
        Ok(CoeffFile { level, weight, label, coeffs, warnings })
    }
}

impl CoeffFile {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, QSeriesError> {
        std::fs::read_to_string(path)?.parse()
    }

    /// The level-11 newform file shipped with the crate.
    pub fn level11() -> Self {
        LEVEL11_COEFFS.parse().expect("bundled coefficient file parses")
    }

    /// Weight-2 cusp form data as a series with n₀ = 1, truncated to `terms`
    /// coefficients when given. Growth is C·n with C = max |a(n)|/n, at least 2.
    pub fn to_qseries(&self, terms: Option<usize>) -> QSeries {
        let max_n = self.coeffs.last().map_or(0, |(n, _)| *n) as usize;
        let top = terms.map_or(max_n, |t| t.min(max_n));
        let mut coeffs = vec![Complex64::zero(); top];
        let mut growth: f64 = 2.0;
        for (n, c) in &self.coeffs {
            let n = *n as usize;
            if n == 0 || n > top {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN);
            coeffs[n - 1] = Complex64::new(v, 0.0);
            growth = growth.max(c.abs().to_f64().unwrap_or(f64::INFINITY) / n as f64);
        }
        QSeries { n0: 1, coeffs, width: 1.0, growth_c: growth, growth_p: 1.0 }
    }
}

/// Σ_{n=n₀}^{N} c(n) e(nz/width).
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    pub n0: usize,
    /// c(n₀), …, c(N).
    pub coeffs: Vec<Complex64>,
    pub width: f64,
    /// |c(n)| ≤ growth_c · n^growth_p beyond the stored range.
    pub growth_c: f64,
    pub growth_p: f64,
}

impl QSeries {
    pub fn zero(width: f64) -> Self {
        QSeries { n0: 1, coeffs: Vec::new(), width, growth_c: 0.0, growth_p: 0.0 }
    }

    pub fn from_coeffs(n0: usize, coeffs: Vec<Complex64>, width: f64, growth_c: f64, growth_p: f64) -> Self {
        QSeries { n0, coeffs, width, growth_c, growth_p }
    }

    pub fn is_cuspidal(&self) -> bool {
        self.n0 >= 1
    }

    /// Index of the last stored coefficient.
    pub fn last_index(&self) -> usize {
        (self.n0 + self.coeffs.len()).saturating_sub(1)
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        if n < self.n0 {
            return Complex64::zero();
        }
        self.coeffs.get(n - self.n0).copied().unwrap_or_default()
    }

    /// Cauchy product truncated at index `n_max`, and at the last index
    /// where both inputs are fully known.
    pub fn multiply(&self, other: &QSeries, n_max: usize) -> Result<QSeries, QSeriesError> {
        if (self.width - other.width).abs() > 1e-12 * self.width {
            return Err(QSeriesError::WidthMismatch(self.width, other.width));
        }
        let n0 = self.n0 + other.n0;
        let known = (self.last_index() + other.n0).min(other.last_index() + self.n0);
        let top = n_max.min(known);
        let len = (top + 1).saturating_sub(n0);
        let mut coeffs = vec![Complex64::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Ok(QSeries {
            n0,
            coeffs,
            width: self.width,
            growth_c: self.growth_c * other.growth_c,
            growth_p: self.growth_p + other.growth_p + 1.0,
        })
    }

    /// ∫_{i∞}^z termwise: c(n) ↦ c(n)·width/(2πi n).
    pub fn antiderivative(&self) -> Result<QSeries, QSeriesError> {
        if self.n0 == 0 {
            return Err(QSeriesError::NotCuspidal);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.width / Complex64::new(0.0, 2.0 * PI * (self.n0 + i) as f64))
            .collect();
        Ok(QSeries {
            n0: self.n0,
            coeffs,
            width: self.width,
            growth_c: self.growth_c * self.width / (2.0 * PI),
            growth_p: self.growth_p - 1.0,
        })
    }

    /// d/dz termwise.
    pub fn derivative(&self) -> QSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex64::new(0.0, 2.0 * PI * (self.n0 + i) as f64 / self.width))
            .collect();
        QSeries {
            n0: self.n0,
            coeffs,
            width: self.width,
            growth_c: self.growth_c * 2.0 * PI / self.width,
            growth_p: self.growth_p + 1.0,
        }
    }

    /// Bound on Σ_{n>N} C n^p e^{−2πny/width}: first term over (1 − r), where r
    /// bounds every ratio of consecutive terms.
    pub fn tail_bound(&self, y: f64) -> f64 {
        if self.growth_c == 0.0 {
            return 0.0;
        }
        let n = (self.last_index() + 1) as f64;
        let decay = (-2.0 * PI * y / self.width).exp();
        let r = ((n + 1.0) / n).powf(self.growth_p.max(0.0)) * decay;
        if r >= 1.0 {
            return f64::INFINITY;
        }
        self.growth_c * n.powf(self.growth_p) * decay.powf(n) / (1.0 - r)
    }

    /// Default evaluation floor, 0.2·width.
    pub fn default_floor(&self) -> f64 {
        0.2 * self.width
    }

    /// Horner evaluation with the default floor.
    pub fn evaluate(&self, z: Complex64) -> Result<(Complex64, f64), QSeriesError> {
        self.evaluate_with_floor(z, self.default_floor())
    }

    /// Horner evaluation in q = e(z/width), with the tail bound at Im z.
    pub fn evaluate_with_floor(&self, z: Complex64, floor: f64) -> Result<(Complex64, f64), QSeriesError> {
        if !(z.im >= floor) {
            return Err(QSeriesError::BelowFloor { im: z.im, floor });
        }
        Ok((self.horner(z), self.tail_bound(z.im)))
    }

    fn q(&self, z: Complex64) -> Complex64 {
        (Complex64::new(0.0, 2.0 * PI) * z / self.width).exp()
    }

    fn horner(&self, z: Complex64) -> Complex64 {
        let q = self.q(z);
        let mut acc = Complex64::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c;
        }
        acc * q.powu(self.n0 as u32)
    }

    /// Term-by-term summation with separately computed exponentials; used as
    /// an independent path against Horner.
    pub fn evaluate_direct(&self, z: Complex64) -> Complex64 {
        let w = Complex64::new(0.0, 2.0 * PI) * z / self.width;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * (w * (self.n0 + i) as f64).exp())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn parses_bundled_file() {
        let f = CoeffFile::level11();
        assert_eq!(f.level, 11);
        assert_eq!(f.coeffs.len(), 1000);
        assert!(f.warnings.is_empty());
        let q = f.to_qseries(Some(200));
        assert_eq!(q.coeffs.len(), 200);
        assert_eq!(q.coeff(2), c(-2.0));
        assert_eq!(q.coeff(3), c(-1.0));
    }

    #[test]
    fn rejects_malformed_files() {
        assert!("".parse::<CoeffFile>().is_err());
        assert!("# level=11 weight=2 label=x count=2\n1 1\n".parse::<CoeffFile>().is_err());
        assert!("# level=11 weight=2 label=x count=1\n1 a\n".parse::<CoeffFile>().is_err());
        assert!("level=11\n1 1\n".parse::<CoeffFile>().is_err());
        let ok: CoeffFile = "# level=1 weight=2 label=x count=2\n1 2\n2 1/3\n".parse().unwrap();
        assert_eq!(ok.warnings.len(), 1);
    }

    #[test]
    fn zero_series() {
        let f: CoeffFile = "# level=11 weight=2 label=z count=2\n1 0\n2 0\n".parse().unwrap();
        assert!(f.warnings.is_empty());
        let q = f.to_qseries(None);
        assert!(q.is_cuspidal());
        let (v, _) = q.evaluate(Complex64::new(0.1, 1.0)).unwrap();
        assert_eq!(v, Complex64::zero());
        assert_eq!(QSeries::zero(1.0).evaluate(Complex64::i()).unwrap(), (Complex64::zero(), 0.0));
    }

    #[test]
    fn hand_product() {
        let a = QSeries::from_coeffs(1, vec![c(1.0), c(1.0)], 1.0, 0.0, 0.0);
        let b = QSeries::from_coeffs(1, vec![c(1.0)], 1.0, 0.0, 0.0);
        let p = a.multiply(&b, 10).unwrap();
        // b is only known through q¹, so the q³ coefficient is not determined.
        assert_eq!(p.n0, 2);
        assert_eq!(p.coeffs, vec![c(1.0)]);
        let z = QSeries::zero(1.0);
        assert!(a.multiply(&z, 10).unwrap().coeffs.iter().all(|x| x.is_zero()));
        assert!(a.multiply(&QSeries::zero(2.0), 10).is_err());
    }

    #[test]
    fn antiderivative_round_trip() {
        let f = CoeffFile::level11().to_qseries(Some(50));
        let a = f.antiderivative().unwrap();
        assert!((a.coeff(1) - Complex64::new(0.0, -1.0 / (2.0 * PI))).norm() < 1e-15);
        let back = a.derivative();
        for n in 1..=50 {
            assert!((back.coeff(n) - f.coeff(n)).norm() <= 1e-12 * f.coeff(n).norm().max(1.0));
        }
        let mut constant = f.clone();
        constant.n0 = 0;
        assert!(constant.antiderivative().is_err());
    }

    #[test]
    fn single_term_evaluation() {
        let q = QSeries::from_coeffs(1, vec![c(1.0)], 3.0, 0.0, 0.0);
        let z = Complex64::new(0.4, 0.9);
        let want = (Complex64::new(0.0, 2.0 * PI) * z / 3.0).exp();
        assert!((q.evaluate(z).unwrap().0 - want).norm() < 1e-15);
        assert!(q.evaluate(Complex64::new(0.0, 0.1)).is_err());
    }

    #[test]
    fn horner_matches_direct() {
        let f = CoeffFile::level11().to_qseries(Some(200));
        let z = Complex64::new(0.0, 1.0);
        let (v, tail) = f.evaluate(z).unwrap();
        assert!((v - f.evaluate_direct(z)).norm() <= 1e-13 * v.norm());
        assert!(tail < 1e-200);
    }

    #[test]
    fn antiderivative_is_small_high_up() {
        let a = CoeffFile::level11().to_qseries(Some(200)).antiderivative().unwrap();
        let (v, _) = a.evaluate(Complex64::new(0.0, 2.0)).unwrap();
        assert!(v.norm() <= (-2.0 * PI * 2.0).exp() * 1.01);
    }

    #[test]
    fn tail_bound_dominates_dropped_terms() {
        let full = CoeffFile::level11().to_qseries(None);
        let short = CoeffFile::level11().to_qseries(Some(40));
        for y in [0.05, 0.1, 0.3] {
            let z = Complex64::new(0.17, y);
            let diff = (full.evaluate_direct(z) - short.evaluate_direct(z)).norm();
            assert!(diff <= short.tail_bound(y), "y = {y}");
        }
    }
}
