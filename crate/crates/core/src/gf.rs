//! Finite field arithmetic GF(p^m).
//!
//! Elements are residues of GF(p)[x] modulo a monic irreducible polynomial
//! of degree m. An element's coefficient vector (c_0, ..., c_{m-1}) is
//! identified with the integer label sum c_i * p^i, giving a canonical
//! bijection between field elements and the alphabet {0, ..., q-1}. The
//! default modulus is the monic irreducible of degree m whose coefficient
//! vector has the smallest integer label, so GF(4) uses x^2 + x + 1.

use crate::error::Error;
use std::fmt;

/// A field element is its canonical integer label; context comes from the
/// `FieldSpec` the operations run against. Labels are validated on entry.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn label(self) -> u16 {
        self.0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Field description plus dense multiplication and inverse tables.
/// Supports q up to 4096, which covers every alphabet this crate enumerates.
#[derive(Clone)]
pub struct FieldSpec {
    p: u64,
    m: u32,
    q: u64,
    /// Modulus coefficients, constant term first, length m+1, leading 1.
    modulus: Vec<u16>,
    mul_table: Vec<u16>,
    inv_table: Vec<u16>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FieldSpec(GF({}), modulus {})",
            self.q,
            self.modulus_string()
        )
    }
}

const MAX_FIELD_ORDER: u64 = 4096;

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n % small == 0 {
            return false;
        }
    }
    // Deterministic Miller-Rabin for 64-bit integers.
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Splits q into (p, m) with q = p^m, or errors when q is not a prime power.
pub fn prime_power(q: u64) -> Result<(u64, u32), Error> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = q;
    let mut probe = 2u64;
    while probe * probe <= q {
        if q % probe == 0 {
            p = probe;
            break;
        }
        probe += 1;
    }
    if !is_prime_u64(p) {
        return Err(Error::NotPrimePower(q));
    }
    let mut rest = q;
    let mut m = 0u32;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p, m))
}

/// Polynomial arithmetic over GF(p) on coefficient vectors, constant first.
mod poly {
    pub fn trim(v: &mut Vec<u16>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn rem(mut a: Vec<u16>, b: &[u16], p: u64) -> Vec<u16> {
        // b is monic after normalization by the caller.
        let db = b.len() - 1;
        while a.len() > db {
            let lead = a[a.len() - 1] as u64;
            if lead != 0 {
                let shift = a.len() - 1 - db;
                for (i, &bc) in b.iter().enumerate() {
                    let idx = shift + i;
                    let sub = (lead * bc as u64) % p;
                    let cur = a[idx] as u64;
                    a[idx] = ((cur + p - sub) % p) as u16;
                }
            }
            a.pop();
        }
        trim(&mut a);
        a
    }

    pub fn mul(a: &[u16], b: &[u16], p: u64) -> Vec<u16> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u16; a.len() + b.len() - 1];
        for (i, &ac) in a.iter().enumerate() {
            if ac == 0 {
                continue;
            }
            for (j, &bc) in b.iter().enumerate() {
                let cur = out[i + j] as u64 + (ac as u64 * bc as u64) % p;
                out[i + j] = (cur % p) as u16;
            }
        }
        let mut out = out;
        trim(&mut out);
        out
    }
}

fn label_to_coeffs(label: u64, p: u64, m: u32) -> Vec<u16> {
    let mut coeffs = Vec::with_capacity(m as usize);
    let mut rest = label;
    for _ in 0..m {
        coeffs.push((rest % p) as u16);
        rest /= p;
    }
    coeffs
}

fn coeffs_to_label(coeffs: &[u16], p: u64) -> u64 {
    coeffs
        .iter()
        .rev()
        .fold(0u64, |acc, &c| acc * p + c as u64)
}

/// Monic polynomial of degree m encoded by the label of its lower
/// coefficients: label l gives x^m + sum c_i x^i with (c_i) = digits of l.
fn monic_from_label(label: u64, p: u64, m: u32) -> Vec<u16> {
    let mut coeffs = label_to_coeffs(label, p, m);
    coeffs.push(1);
    coeffs
}

fn is_irreducible(candidate: &[u16], p: u64) -> bool {
    let degree = candidate.len() - 1;
    if degree == 0 {
        return false;
    }
    // Trial division by every monic polynomial of degree 1..=degree/2.
    for d in 1..=degree / 2 {
        let count = p.pow(d as u32);
        for label in 0..count {
            let divisor = monic_from_label(label, p, d as u32);
            if poly::rem(candidate.to_vec(), &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// GF(p^m) with the default modulus.
    pub fn new(p: u64, m: u32) -> Result<Self, Error> {
        Self::with_modulus(p, m, None)
    }

    /// GF(q) for a prime power q, default modulus.
    pub fn for_order(q: u64) -> Result<Self, Error> {
        let (p, m) = prime_power(q)?;
        Self::new(p, m)
    }

    /// GF(p^m) with an explicit modulus given as coefficients constant-term
    /// first. The leading coefficient must be 1 and the polynomial must be
    /// irreducible of degree m. `None` selects the default modulus.
    pub fn with_modulus(p: u64, m: u32, modulus: Option<Vec<u16>>) -> Result<Self, Error> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("field degree m must be >= 1".into()));
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "field order p^m exceeds supported bound {MAX_FIELD_ORDER}"
                ))
            })?;
        let modulus = match modulus {
            Some(coeffs) => {
                let valid_len = coeffs.len() == m as usize + 1;
                let monic = coeffs.last() == Some(&1);
                let in_range = coeffs.iter().all(|&c| (c as u64) < p);
                if !valid_len || !monic || !in_range {
                    return Err(Error::InvalidParameter(format!(
                        "modulus must be monic of degree {m} with coefficients below {p}"
                    )));
                }
                if !is_irreducible(&coeffs, p) {
                    return Err(Error::InvalidParameter(
                        "modulus polynomial is reducible".into(),
                    ));
                }
                coeffs
            }
            None => Self::default_modulus(p, m)?,
        };
        let mut field = FieldSpec {
            p,
            m,
            q,
            modulus,
            mul_table: Vec::new(),
            inv_table: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    /// Monic irreducible of degree m with the smallest coefficient label.
    fn default_modulus(p: u64, m: u32) -> Result<Vec<u16>, Error> {
        let count = p.pow(m);
        for label in 0..count {
            let candidate = monic_from_label(label, p, m);
            if is_irreducible(&candidate, p) {
                return Ok(candidate);
            }
        }
        Err(Error::Internal(format!(
            "no irreducible polynomial of degree {m} over GF({p})"
        )))
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut mul = vec![0u16; q * q];
        for a in 0..q as u64 {
            let pa = label_to_coeffs(a, self.p, self.m);
            for b in a..q as u64 {
                let prod = poly::rem(poly::mul(&pa, &label_to_coeffs(b, self.p, self.m), self.p), &self.modulus, self.p);
                let label = coeffs_to_label(&prod, self.p) as u16;
                mul[a as usize * q + b as usize] = label;
                mul[b as usize * q + a as usize] = label;
            }
        }
        let mut inv = vec![0u16; q];
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u16;
                    break;
                }
            }
        }
        self.mul_table = mul;
        self.inv_table = inv;
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u16] {
        &self.modulus
    }

    /// Human-readable modulus, e.g. "x^2 + x + 1".
    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let term = match (i, c) {
                (0, c) => format!("{c}"),
                (1, 1) => "x".into(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            };
            terms.push(term);
        }
        terms.join(" + ")
    }

    pub fn element(&self, label: u64) -> Result<FieldElement, Error> {
        if label < self.q {
            Ok(FieldElement(label as u16))
        } else {
            Err(Error::InvalidElement { label, q: self.q })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(|l| FieldElement(l as u16))
    }

    fn check(&self, a: FieldElement) -> Result<(), Error> {
        if (a.0 as u64) < self.q {
            Ok(())
        } else {
            Err(Error::InvalidElement {
                label: a.0 as u64,
                q: self.q,
            })
        }
    }

    /// Coefficient vector of an element, constant term first, length m.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u16> {
        label_to_coeffs(a.0 as u64, self.p, self.m)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, Error> {
        self.check(a)?;
        self.check(b)?;
        if self.p == 2 {
            // Coefficientwise sum mod 2 is the label xor.
            return Ok(FieldElement(a.0 ^ b.0));
        }
        let pa = label_to_coeffs(a.0 as u64, self.p, self.m);
        let pb = label_to_coeffs(b.0 as u64, self.p, self.m);
        let sum: Vec<u16> = pa
            .iter()
            .zip(&pb)
            .map(|(&x, &y)| ((x as u64 + y as u64) % self.p) as u16)
            .collect();
        Ok(FieldElement(coeffs_to_label(&sum, self.p) as u16))
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement, Error> {
        self.check(a)?;
        if self.p == 2 {
            return Ok(a);
        }
        let pa = label_to_coeffs(a.0 as u64, self.p, self.m);
        let neg: Vec<u16> = pa
            .iter()
            .map(|&x| ((self.p - x as u64) % self.p) as u16)
            .collect();
        Ok(FieldElement(coeffs_to_label(&neg, self.p) as u16))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, Error> {
        self.add(a, self.neg(b)?)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, Error> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement(
            self.mul_table[a.0 as usize * self.q as usize + b.0 as usize],
        ))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, Error> {
        self.check(a)?;
        if a.0 == 0 {
            return Err(Error::ZeroInverse { q: self.q });
        }
        Ok(FieldElement(self.inv_table[a.0 as usize]))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> Result<FieldElement, Error> {
        self.check(a)?;
        let mut acc = FieldElement::ONE;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base)?;
            }
            base = self.mul(base, base)?;
            e >>= 1;
        }
        Ok(acc)
    }
}

/// Basis of the right null space { v : H v = 0 } of an r x n matrix over the
/// field, found by row reduction to reduced echelon form. The basis vectors
/// are emitted in free-column order and each has a 1 in its free position.
pub fn null_space(h: &[Vec<FieldElement>], field: &FieldSpec) -> Result<Vec<Vec<FieldElement>>, Error> {
    let rows = h.len();
    let cols = h.first().map_or(0, Vec::len);
    if h.iter().any(|row| row.len() != cols) {
        return Err(Error::DimensionMismatch {
            left: format!("{cols} columns expected"),
            right: "ragged row".into(),
        });
    }
    let mut a: Vec<Vec<FieldElement>> = h.to_vec();
    for row in &a {
        for &e in row {
            field.check(e)?;
        }
    }
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let pivot_row = (rank..rows).find(|&r| a[r][col] != FieldElement::ZERO);
        let pivot_row = match pivot_row {
            Some(r) => r,
            None => continue,
        };
        a.swap(rank, pivot_row);
        let inv = field.inv(a[rank][col])?;
        for c in 0..cols {
            a[rank][c] = field.mul(a[rank][c], inv)?;
        }
        for r in 0..rows {
            if r != rank && a[r][col] != FieldElement::ZERO {
                let factor = a[r][col];
                for c in 0..cols {
                    let scaled = field.mul(factor, a[rank][c])?;
                    a[r][c] = field.sub(a[r][c], scaled)?;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![FieldElement::ZERO; cols];
        v[free] = FieldElement::ONE;
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = field.neg(a[row][free])?;
        }
        basis.push(v);
    }
    Ok(basis)
}
