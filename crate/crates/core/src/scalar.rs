//! Scalar types for the two arithmetic modes.
//!
//! Exact mode works over arbitrary-precision rationals ([`Rational`]); float
//! mode over `f64`. Everything downstream is generic over [`Scalar`] and the
//! mode-specific linear algebra kernels (rank, nullspace, solve) are dispatched
//! through the trait so the discontinuous predicates have an exact referee.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float64,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float64 => f.write_str("float64"),
        }
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn to_f64(&self) -> f64;
    /// Exact rational value (floats convert by their binary expansion).
    fn to_rational(&self) -> Option<Rational>;
    fn from_rational(r: &Rational) -> Self;

    /// Best approximation of `x` whose denominator does not exceed `max_denom`
    /// (the identity in float mode).
    fn approximate(x: f64, max_denom: u64) -> Self;

    fn magnitude(&self) -> Self;

    /// Square root when it exists in the scalar field.
    fn sqrt_exact(&self) -> Option<Self>;

    fn parse_str(s: &str) -> Result<Self>;

    fn to_json(&self) -> serde_json::Value;

    fn rank(m: &Matrix<Self>, tol: f64) -> usize;

    /// Basis of the right nullspace `{v : m v = 0}`.
    fn nullspace(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>>;

    /// Some solution of `m x = rhs`, or `None` when the system is inconsistent.
    fn solve(m: &Matrix<Self>, rhs: &[Self], tol: f64) -> Option<Vec<Self>>;

    /// Exact mode: literal zero test. Float mode: `|x| <= tol * (1 + scale)`.
    fn is_negligible(&self, tol: f64, scale: f64) -> bool {
        match Self::MODE {
            Mode::Exact => self.is_zero(),
            Mode::Float64 => self.to_f64().abs() <= tol * (1.0 + scale),
        }
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => Self::parse_str(s),
            serde_json::Value::Number(n) => Self::parse_str(&n.to_string()),
            other => Err(Error::Parse(format!("expected a scalar, found {other}"))),
        }
    }
}

/// Continued-fraction rational approximation with bounded denominator.
pub fn rationalize(x: f64, max_denom: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut frac = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = frac.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int * p1 + p0;
        let q2 = a_int * q1 + q0;
        if q2 > max_denom as u128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let rem = frac - a;
        if rem < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    if q1 == 0 {
        return None;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if neg { -r } else { r })
}

fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse scalar {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Rational::from_integer(all);
    if shift >= 0 {
        r *= Rational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        r /= Rational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Ok(if neg { -r } else { r })
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn approximate(x: f64, max_denom: u64) -> Self {
        rationalize(x, max_denom)
            .or_else(|| Rational::from_float(x))
            .unwrap_or_else(Rational::zero)
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (&n * &n == *self.numer() && &d * &d == *self.denom()).then(|| Rational::new(n, d))
    }

    fn parse_str(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        })
    }

    fn rank(m: &Matrix<Self>, _tol: f64) -> usize {
        bareiss_rank(m)
    }

    fn nullspace(m: &Matrix<Self>, _tol: f64) -> Vec<Vec<Self>> {
        let (rref, pivots) = rref(m.clone());
        let cols = m.cols();
        let mut basis = Vec::new();
        for free in (0..cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -rref[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    fn solve(m: &Matrix<Self>, rhs: &[Self], _tol: f64) -> Option<Vec<Self>> {
        assert_eq!(m.rows(), rhs.len());
        let cols = m.cols();
        let aug = Matrix::from_fn(m.rows(), cols + 1, |i, j| {
            if j < cols {
                m[(i, j)].clone()
            } else {
                rhs[i].clone()
            }
        });
        let (rref, pivots) = rref(aug);
        if pivots.contains(&cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = rref[(row, cols)].clone();
        }
        Some(x)
    }
}

/// Reduced row echelon form over the rationals; returns the pivot columns.
fn rref(mut m: Matrix<Rational>) -> (Matrix<Rational>, Vec<usize>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = m[(r, c)].recip();
        for j in c..cols {
            let v = &m[(r, j)] * &inv;
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in c..cols {
                let v = &m[(i, j)] - &f * &m[(r, j)];
                m[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Fraction-free (Bareiss) elimination after clearing row denominators.
fn bareiss_rank(m: &Matrix<Rational>) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let lcm = (0..cols).fold(BigInt::one(), |acc, j| acc.lcm(m[(i, j)].denom()));
            (0..cols)
                .map(|j| {
                    let e = &m[(i, j)];
                    e.numer() * (&lcm / e.denom())
                })
                .collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| a[i][c].sign() != Sign::NoSign) else {
            continue;
        };
        a.swap(rank, p);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..cols {
                row[j] = (&pivot_row[c] * &row[j] - &f * &pivot_row[j]) / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

fn to_dmatrix(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Singular values of a float matrix (unordered), padded to `min(rows, cols)`.
pub fn singular_values(m: &Matrix<f64>) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    to_dmatrix(m).singular_values().iter().copied().collect()
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float64;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn approximate(x: f64, _max_denom: u64) -> Self {
        x
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn parse_str(s: &str) -> Result<Self> {
        let r = parse_rational(s)?;
        Ok(ToPrimitive::to_f64(&r).unwrap_or(f64::NAN))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn rank(m: &Matrix<Self>, tol: f64) -> usize {
        let sv = singular_values(m);
        let max = sv.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol * max).count()
    }

    fn nullspace(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>> {
        let cols = m.cols();
        if cols == 0 {
            return Vec::new();
        }
        // Pad short matrices so the SVD yields a full right basis.
        let rows = m.rows().max(cols);
        let d = DMatrix::from_fn(rows, cols, |i, j| if i < m.rows() { m[(i, j)] } else { 0.0 });
        let svd = d.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let cut = if max == 0.0 { f64::INFINITY } else { tol * max };
        svd.singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| max == 0.0 || s <= cut)
            .map(|(k, _)| v_t.row(k).iter().copied().collect())
            .collect()
    }

    fn solve(m: &Matrix<Self>, rhs: &[Self], tol: f64) -> Option<Vec<Self>> {
        assert_eq!(m.rows(), rhs.len());
        if m.cols() == 0 {
            return rhs.iter().all(|v| v.abs() <= tol).then(Vec::new);
        }
        let d = to_dmatrix(m);
        let b = DVector::from_column_slice(rhs);
        let svd = d.clone().svd(true, true);
        let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let x = svd.solve(&b, tol * max.max(f64::MIN_POSITIVE)).ok()?;
        let scale = rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let resid = (&d * &x - &b).amax();
        (resid <= 1e2 * tol * (1.0 + scale)).then(|| x.iter().copied().collect())
    }
}
