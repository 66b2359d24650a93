//! Exact linear algebra over `Z/p^a` and over the integers.
//!
//! Everything that computes a kernel, an image or a quotient of finite
//! modules ends up here. Matrices act on row vectors (`x · m`) in this
//! module; the module layer translates its column convention on top.

mod howell;
mod smith;
mod subquotient;

use std::fmt;

pub use howell::{howell_form, kernel, rank_mod_p, solve, HowellForm};
pub use smith::{smith_form_integers, smith_local, IntMatrix, LocalSmith, SmithIntegers};
pub use subquotient::Subquotient;

use crate::error::{Error, Result};

/// A prime power modulus `p^a` with the arithmetic the kernels need.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    n: u64,
    p: u64,
    a: u32,
}

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        let (p, a) = prime_power(n).ok_or(Error::NotPrimePower(n))?;
        Ok(Self { n, p, a })
    }

    pub fn from_prime(p: u64, a: u32) -> Result<Self> {
        Self::new(p.checked_pow(a).ok_or(Error::NotPrimePower(0))?)
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn prime(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn exponent(&self) -> u32 {
        self.a
    }

    #[inline]
    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.n as i128) as u64
    }

    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        ((x as u128 + y as u128) % self.n as u128) as u64
    }

    #[inline]
    pub fn sub(&self, x: u64, y: u64) -> u64 {
        ((x as u128 + self.n as u128 - (y % self.n) as u128) % self.n as u128) as u64
    }

    #[inline]
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.n as u128) as u64
    }

    #[inline]
    pub fn neg(&self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.n - x
        }
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.n;
        base %= self.n;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// p-adic valuation of a residue; zero has valuation `a`.
    pub fn valuation(&self, x: u64) -> u32 {
        let mut x = x % self.n;
        if x == 0 {
            return self.a;
        }
        let mut v = 0;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    #[inline]
    pub fn p_pow(&self, v: u32) -> u64 {
        self.p.pow(v)
    }

    /// Inverse of a unit.
    pub fn inverse(&self, u: u64) -> Option<u64> {
        let (g, x, _) = ext_gcd(u as i128, self.n as i128);
        if g != 1 {
            return None;
        }
        Some(self.reduce(x))
    }

    /// Write a nonzero `x` as `unit · p^v` and return `(v, unit^{-1})`.
    pub fn normalizer(&self, x: u64) -> (u32, u64) {
        let v = self.valuation(x);
        let unit = (x / self.p_pow(v)) % self.n;
        let inv = self.inverse(unit).expect("unit part is invertible");
        (v, inv)
    }
}

pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n && !n.is_multiple_of(p) {
        p += 1;
    }
    if !n.is_multiple_of(p) {
        p = n;
    }
    let mut m = n;
    let mut a = 0;
    while m.is_multiple_of(p) {
        m /= p;
        a += 1;
    }
    (m == 1).then_some((p, a))
}

pub fn is_prime(p: u64) -> bool {
    matches!(prime_power(p), Some((q, 1)) if q == p)
}

/// Dense matrix over `Z/N`, `N` a prime power.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixZN {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl MatrixZN {
    pub fn zeros(modulus: Modulus, rows: usize, cols: usize) -> Self {
        Self {
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: Modulus, n: usize) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.set(i, i, 1 % modulus.value());
        }
        m
    }

    pub fn scalar(modulus: Modulus, n: usize, c: u64) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.set(i, i, c % modulus.value());
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing every entry.
    pub fn from_rows(modulus: Modulus, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut m = Self::zeros(modulus, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, modulus.reduce(x as i128));
            }
        }
        Ok(m)
    }

    pub fn from_u64_rows(modulus: Modulus, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(modulus, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x % modulus.value());
            }
        }
        m
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x % self.modulus.value();
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.modulus, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.modulus != other.modulus {
            return Err(Error::DimensionMismatch("moduli differ".into()));
        }
        let n = self.modulus.value() as u128;
        let mut out = Self::zeros(self.modulus, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u128;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = ((out.data[idx] as u128 + a * other.get(k, j) as u128) % n) as u64;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |m, x, y| m.add(x, y))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |m, x, y| m.sub(x, y))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Modulus, u64, u64) -> u64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (o, &y) in out.data.iter_mut().zip(&other.data) {
            *o = f(&self.modulus, *o, y);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = self.modulus.mul(*x, c);
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert_eq!(self.rows, self.cols, "square matrix");
        let mut acc = Self::identity(self.modulus, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("square");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("square");
            }
        }
        acc
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows);
        let n = self.modulus.value() as u128;
        let mut out = vec![0u64; self.cols];
        for (i, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = ((*o as u128 + x as u128 * self.get(i, j) as u128) % n) as u64;
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn right_apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let n = self.modulus.value() as u128;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u128;
                for (j, &x) in v.iter().enumerate() {
                    acc = (acc + self.get(i, j) as u128 * x as u128) % n;
                }
                acc as u64
            })
            .collect()
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack column count".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            modulus: self.modulus,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row count".into()));
        }
        let cols = self.cols + other.cols;
        let mut out = Self::zeros(self.modulus, self.rows, cols);
        for i in 0..self.rows {
            out.data[i * cols..i * cols + self.cols].copy_from_slice(self.row(i));
            out.data[i * cols + self.cols..(i + 1) * cols].copy_from_slice(other.row(i));
        }
        Ok(out)
    }

    /// Copies `block` into position `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(self.modulus, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        out
    }

    /// Entries as signed representatives in `[0, N)`, for serialization.
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.row_vecs()
    }
}

impl fmt::Debug for MatrixZN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixZN(mod {}) {:?}", self.modulus.value(), self.row_vecs())
    }
}

/// Brute force enumeration of the row span, for small oracle checks in tests.
#[doc(hidden)]
pub fn enumerate_row_span(m: &MatrixZN) -> std::collections::BTreeSet<Vec<u64>> {
    let modulus = m.modulus();
    let mut span = std::collections::BTreeSet::new();
    span.insert(vec![0; m.cols()]);
    for i in 0..m.rows() {
        let mut next = span.clone();
        for v in &span {
            let mut w = v.clone();
            for _ in 1..modulus.value() {
                for (j, x) in w.iter_mut().enumerate() {
                    *x = modulus.add(*x, m.get(i, j));
                }
                next.insert(w.clone());
            }
        }
        span = next;
    }
    span
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers_are_recognized() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert!(MatrixZN::from_rows(Modulus::new(8).unwrap(), 1, &[vec![3]]).is_ok());
        assert!(matches!(Modulus::new(6), Err(Error::NotPrimePower(6))));
    }

    #[test]
    fn entries_are_reduced() {
        let m = MatrixZN::from_rows(Modulus::new(8).unwrap(), 2, &[vec![-1, 17]]).unwrap();
        assert_eq!(m.row(0), &[7, 1]);
    }

    #[test]
    fn valuation_and_inverse() {
        let m = Modulus::new(27).unwrap();
        assert_eq!(m.valuation(0), 3);
        assert_eq!(m.valuation(18), 2);
        assert_eq!(m.inverse(2), Some(14));
        assert_eq!(m.inverse(3), None);
        let (v, inv) = m.normalizer(18);
        assert_eq!(v, 2);
        assert_eq!(m.mul(18, inv), 9);
    }
}
