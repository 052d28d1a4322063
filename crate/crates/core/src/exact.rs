//! Exact integer and rational arithmetic.
//!
//! Rationals are always kept in lowest terms with a positive denominator
//! (the `num-rational` canonical form). Matrix inversion and determinants
//! run fraction-free elimination over scaled integer rows: every division
//! in the Bareiss recurrence is exact, so no intermediate value is ever
//! rounded or left unreduced. Pivoting takes the first nonzero candidate,
//! which makes results reproducible across runs and thread counts.

use crate::error::Error;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat_int<T: Into<BigInt>>(value: T) -> Rational {
    Rational::from_integer(value.into())
}

/// Shorthand for `num/den`; panics on a zero denominator.
pub fn rat<N: Into<BigInt>, D: Into<BigInt>>(num: N, den: D) -> Rational {
    Rational::new(num.into(), den.into())
}

/// `(-1)^e` for a nonnegative big exponent.
pub fn alternating_sign(e: &BigInt) -> BigInt {
    if e.is_even() {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Binomial coefficient with the convention C(a,b) = 0 outside 0 <= b <= a.
pub fn binomial(a: &BigInt, b: &BigInt) -> BigInt {
    if b.is_negative() || b > a {
        BigInt::zero()
    } else {
        num_integer::binomial(a.clone(), b.clone())
    }
}

/// `base^exp mod modulus` with the result normalized into `[0, modulus)`.
///
/// A negative base is first reduced with a floored remainder, so callers can
/// pass alternating-sign quantities directly. Errors on `modulus < 1` and on
/// negative exponents.
pub fn mod_pow(base: &BigInt, exp: &BigInt, modulus: &BigInt) -> Result<BigInt, Error> {
    if modulus < &BigInt::one() {
        return Err(Error::BadModulus(modulus.to_string()));
    }
    if exp.is_negative() {
        return Err(Error::NegativeExponent(exp.to_string()));
    }
    if modulus.is_one() {
        return Ok(BigInt::zero());
    }
    let normalized = base.mod_floor(modulus);
    Ok(normalized.modpow(exp, modulus))
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, Error> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                left: format!("{rows}x{cols}"),
                right: format!("{} entries", entries.len()),
            });
        }
        Ok(RationalMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch {
                left: format!("{n_cols} columns expected"),
                right: "ragged row".into(),
            });
        }
        Ok(RationalMatrix {
            rows: n_rows,
            cols: n_cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Test and construction helper for integer matrices.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| rat_int(v)))
            .collect();
        RationalMatrix {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = Rational::one();
        }
        RationalMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// True when every entry has denominator 1.
    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    /// True when every entry is a nonnegative integer.
    pub fn is_nonnegative_integral(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.is_integer() && !e.numer().is_negative())
    }

    /// First entry (row, col) that is not a nonnegative integer, if any.
    pub fn first_non_nonnegative_integral(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(|e| !e.is_integer() || e.numer().is_negative())
            .map(|idx| (idx / self.cols, idx % self.cols))
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c).clone())
                    .sum::<Rational>()
            })
            .collect()
    }

    pub fn map<F: Fn(&Rational) -> Rational>(&self, f: F) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        self.map(|e| e * factor)
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.add(&other.scale(&-Rational::one()))
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| self.get(r, c).to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c).to_string())
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..self.cols)
            .map(|c| cells.iter().map(|row| row[c].len()).max().unwrap_or(0))
            .collect();
        for (i, row) in cells.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (c, cell) in row.iter().enumerate() {
                if c > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{cell:>width$}", width = widths[c])?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Serializes a big integer as a decimal string.
pub fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Serializes an optional big integer as a decimal string or null.
pub fn ser_bigint_opt<S: serde::Serializer>(
    v: &Option<BigInt>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

impl serde::Serialize for RationalMatrix {
    /// Rationals serialize as {"num": "...", "den": "..."} decimal strings,
    /// so values outside machine range survive a JSON round trip.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(serde::Serialize)]
        struct Frac {
            num: String,
            den: String,
        }
        let entries: Vec<Vec<Frac>> = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| {
                        let e = self.get(r, c);
                        Frac {
                            num: e.numer().to_string(),
                            den: e.denom().to_string(),
                        }
                    })
                    .collect()
            })
            .collect();
        let mut s = serializer.serialize_struct("RationalMatrix", 3)?;
        s.serialize_field("rows", &self.rows)?;
        s.serialize_field("cols", &self.cols)?;
        s.serialize_field("entries", &entries)?;
        s.end()
    }
}

/// Exact matrix product.
pub fn mat_mul(a: &RationalMatrix, b: &RationalMatrix) -> Result<RationalMatrix, Error> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            left: format!("{}x{}", a.rows, a.cols),
            right: format!("{}x{}", b.rows, b.cols),
        });
    }
    let mut out = RationalMatrix::zero(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if aik.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                let sum = out.get(i, j) + aik * b.get(k, j);
                out.set(i, j, sum);
            }
        }
    }
    Ok(out)
}

/// Scales each row by the lcm of its denominators, returning the integer
/// matrix and the per-row scale factors.
fn clear_denominators(m: &RationalMatrix) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(m.rows);
    let mut scales = Vec::with_capacity(m.rows);
    for r in 0..m.rows {
        let mut lcm = BigInt::one();
        for c in 0..m.cols {
            lcm = lcm.lcm(m.get(r, c).denom());
        }
        let row: Vec<BigInt> = (0..m.cols)
            .map(|c| {
                let e = m.get(r, c);
                e.numer() * (&lcm / e.denom())
            })
            .collect();
        rows.push(row);
        scales.push(lcm);
    }
    (rows, scales)
}

fn exact_div(num: BigInt, den: &BigInt) -> Result<BigInt, Error> {
    let (quot, rem) = num.div_rem(den);
    if !rem.is_zero() {
        return Err(Error::Internal(
            "fraction-free elimination produced an inexact division".into(),
        ));
    }
    Ok(quot)
}

/// Determinant by fraction-free (Bareiss) triangular elimination with
/// first-nonzero pivoting.
pub fn mat_det(m: &RationalMatrix) -> Result<Rational, Error> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Rational::one());
    }
    let (mut a, scales) = clear_denominators(m);
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot_row = (k..n).find(|&r| !a[r][k].is_zero());
        let pivot_row = match pivot_row {
            Some(r) => r,
            None => return Ok(Rational::zero()),
        };
        if pivot_row != k {
            a.swap(k, pivot_row);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = exact_div(num, &prev)?;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let mut det = Rational::from_integer(a[n - 1][n - 1].clone());
    if sign < 0 {
        det = -det;
    }
    let scale: BigInt = scales.into_iter().product();
    Ok(det / Rational::from_integer(scale))
}

/// Inverse by fraction-free Gauss-Jordan elimination on the augmented
/// matrix, first-nonzero pivoting. Errors on non-square or singular input.
pub fn mat_inverse(m: &RationalMatrix) -> Result<RationalMatrix, Error> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(RationalMatrix::zero(0, 0));
    }
    // Augment [A | I] and scale rows integral; row ops preserve E*A = left,
    // E = right, so the final [c*I | R] gives A^{-1} = R / c with the row
    // scales cancelling.
    let (scaled, scales) = clear_denominators(m);
    let width = 2 * n;
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (r, mut row) in scaled.into_iter().enumerate() {
        row.resize(width, BigInt::zero());
        row[n + r] = scales[r].clone();
        a.push(row);
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot_row = (k..n)
            .find(|&r| !a[r][k].is_zero())
            .ok_or(Error::Singular)?;
        if pivot_row != k {
            a.swap(k, pivot_row);
        }
        let pivot = a[k][k].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let factor = a[i][k].clone();
            for j in 0..width {
                let num = &pivot * &a[i][j] - &factor * &a[k][j];
                a[i][j] = exact_div(num, &prev)?;
            }
        }
        prev = pivot;
    }
    // The left block must now be c*I with a single common scalar c.
    let c = a[n - 1][n - 1].clone();
    if c.is_zero() {
        return Err(Error::Singular);
    }
    for (r, row) in a.iter().enumerate() {
        for (j, entry) in row.iter().take(n).enumerate() {
            let expected_zero = r != j;
            if expected_zero && !entry.is_zero() {
                return Err(Error::Internal("gauss-jordan left block not diagonal".into()));
            }
            if !expected_zero && entry != &c {
                return Err(Error::Internal("gauss-jordan pivots disagree".into()));
            }
        }
    }
    let entries = a
        .into_iter()
        .flat_map(|row| {
            row.into_iter()
                .skip(n)
                .map(|v| Rational::new(v, c.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    RationalMatrix::new(n, n, entries)
}
