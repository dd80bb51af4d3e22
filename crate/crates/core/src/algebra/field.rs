//! Finite fields `F_{p^m}` of odd characteristic.
//!
//! A [`Field`] is a cheap `Copy` handle to an interned [`FieldContext`]; the
//! context is created once per `(p, m)` pair and lives for the rest of the
//! process. Elements carry the handle, so arithmetic works through ordinary
//! operator overloading.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest supported characteristic.
pub const MAX_CHARACTERISTIC: u32 = 13;
/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 32;

/// Static description of `F_{p^m} = F_p[t]/(modulus)`.
pub struct FieldContext {
    p: u32,
    degree: usize,
    /// Monic modulus, low degree first, length `degree + 1`.
    modulus: Vec<u8>,
    /// Matrix of `a -> a^p` on the power basis (column j = image of t^j).
    frob: Vec<Vec<u8>>,
    /// Inverse of `frob`.
    frob_inv: Vec<Vec<u8>>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.degree, self.modulus)
    }
}

/// Handle to an interned field.
#[derive(Clone, Copy)]
pub struct Field(&'static FieldContext);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}
impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.p, self.0.degree).hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.degree == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.degree)
        }
    }
}

fn registry() -> &'static Mutex<HashMap<(u32, usize), &'static FieldContext>> {
    static REG: OnceLock<Mutex<HashMap<(u32, usize), &'static FieldContext>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl Field {
    /// The field with `p^m` elements, using the lexicographically smallest
    /// monic irreducible modulus of degree `m`.
    pub fn new(p: u32, m: usize) -> Result<Field> {
        if p == 2 || (p.is_multiple_of(2) && p > 0) {
            return Err(Error::BadCharacteristic(p));
        }
        if !is_prime(p) || p > MAX_CHARACTERISTIC {
            return Err(Error::Config(format!(
                "characteristic must be an odd prime <= {MAX_CHARACTERISTIC}, got {p}"
            )));
        }
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::Config(format!(
                "extension degree must lie in 1..={MAX_DEGREE}, got {m}"
            )));
        }
        let mut reg = registry().lock().expect("field registry poisoned");
        if let Some(ctx) = reg.get(&(p, m)) {
            return Ok(Field(ctx));
        }
        let modulus = smallest_irreducible(p, m);
        let ctx = FieldContext::build(p, modulus);
        let leaked: &'static FieldContext = Box::leak(Box::new(ctx));
        reg.insert((p, m), leaked);
        Ok(Field(leaked))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1)
    }

    pub fn characteristic(self) -> u32 {
        self.0.p
    }

    pub fn degree(self) -> usize {
        self.0.degree
    }

    /// Number of elements, `p^m`.
    pub fn order(self) -> u128 {
        (self.0.p as u128).pow(self.0.degree as u32)
    }

    pub fn modulus(self) -> &'static [u8] {
        &self.0.modulus
    }

    pub fn zero(self) -> Fq {
        Fq { field: self, digits: [0; MAX_DEGREE] }
    }

    pub fn one(self) -> Fq {
        self.from_int(1)
    }

    /// Image of an integer under `Z -> F_p -> F_{p^m}`.
    pub fn from_int(self, n: i64) -> Fq {
        let p = self.0.p as i64;
        let mut e = self.zero();
        e.digits[0] = n.rem_euclid(p) as u8;
        e
    }

    /// The class of the generator `t` of the power basis.
    pub fn generator(self) -> Fq {
        if self.0.degree == 1 {
            // t = -modulus[0] for a linear modulus t + c
            return self.from_int(-(self.0.modulus[0] as i64));
        }
        let mut e = self.zero();
        e.digits[1] = 1;
        e
    }

    /// Element with the given power-basis coordinates (reduced mod p).
    pub fn from_digits(self, digits: &[i64]) -> Fq {
        assert!(digits.len() <= self.0.degree, "too many digits for {:?}", self);
        let p = self.0.p as i64;
        let mut e = self.zero();
        for (i, d) in digits.iter().enumerate() {
            e.digits[i] = d.rem_euclid(p) as u8;
        }
        e
    }

    /// The element whose base-p expansion of `index` gives its digits.
    /// Enumerating `0..order()` lists every element exactly once.
    pub fn element(self, mut index: u128) -> Fq {
        let p = self.0.p as u128;
        let mut e = self.zero();
        for i in 0..self.0.degree {
            e.digits[i] = (index % p) as u8;
            index /= p;
        }
        e
    }

    /// Iterator over all field elements in index order.
    pub fn elements(self) -> impl Iterator<Item = Fq> {
        (0..self.order()).map(move |i| self.element(i))
    }
}

impl FieldContext {
    fn build(p: u32, modulus: Vec<u8>) -> FieldContext {
        let degree = modulus.len() - 1;
        let mut ctx = FieldContext {
            p,
            degree,
            modulus,
            frob: Vec::new(),
            frob_inv: Vec::new(),
        };
        if degree > 1 {
            // column j = (t^j)^p computed by slow exponentiation
            let mut cols = Vec::with_capacity(degree);
            for j in 0..degree {
                let mut basis = [0u8; MAX_DEGREE];
                basis[j] = 1;
                let img = slow_pow(&ctx, &basis, p as u128);
                cols.push(img[..degree].to_vec());
            }
            ctx.frob_inv = invert_fp_matrix(p, &cols);
            ctx.frob = cols;
        }
        ctx
    }
}

fn mul_digits(ctx: &FieldContext, a: &[u8; MAX_DEGREE], b: &[u8; MAX_DEGREE]) -> [u8; MAX_DEGREE] {
    let m = ctx.degree;
    let p = ctx.p;
    let mut out = [0u8; MAX_DEGREE];
    if m == 1 {
        out[0] = ((a[0] as u32 * b[0] as u32) % p) as u8;
        return out;
    }
    let mut prod = [0u32; 2 * MAX_DEGREE];
    for i in 0..m {
        if a[i] == 0 {
            continue;
        }
        for j in 0..m {
            prod[i + j] += a[i] as u32 * b[j] as u32;
        }
    }
    for k in 0..2 * m - 1 {
        prod[k] %= p;
    }
    // reduce by the monic modulus from the top
    for k in (m..2 * m - 1).rev() {
        let c = prod[k] % p;
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for i in 0..m {
            let sub = c * ctx.modulus[i] as u32 % p;
            prod[k - m + i] = (prod[k - m + i] + p - sub) % p;
        }
    }
    for i in 0..m {
        out[i] = (prod[i] % p) as u8;
    }
    out
}

fn slow_pow(ctx: &FieldContext, a: &[u8; MAX_DEGREE], mut e: u128) -> [u8; MAX_DEGREE] {
    let mut result = [0u8; MAX_DEGREE];
    result[0] = 1;
    let mut base = *a;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_digits(ctx, &result, &base);
        }
        base = mul_digits(ctx, &base, &base);
        e >>= 1;
    }
    result
}

fn invert_fp_matrix(p: u32, cols: &[Vec<u8>]) -> Vec<Vec<u8>> {
    // cols[j][i] = entry (i, j); returns inverse in the same layout
    let n = cols.len();
    let mut a: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut row: Vec<u32> = (0..n).map(|j| cols[j][i] as u32).collect();
            row.extend((0..n).map(|j| (i == j) as u32));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| a[r][c] != 0).expect("Frobenius is invertible");
        a.swap(c, piv);
        let inv = fp_inv(a[c][c], p);
        for x in a[c].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..n {
            if r != c && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..2 * n {
                    a[r][k] = (a[r][k] + p * p - f * a[c][k]) % p;
                }
            }
        }
    }
    (0..n)
        .map(|j| (0..n).map(|i| a[i][n + j] as u8).collect())
        .collect()
}

pub(crate) fn fp_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u32;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

// ---------------------------------------------------------------------------
// Irreducible moduli over F_p
// ---------------------------------------------------------------------------

/// Dense polynomial over F_p as `u32` coefficients, low degree first.
type FpPoly = Vec<u32>;

fn fp_trim(a: &mut FpPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_rem(a: &FpPoly, m: &FpPoly, p: u32) -> FpPoly {
    let mut r = a.clone();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = fp_inv(m[dm], p);
    while r.len() > dm {
        let d = r.len() - 1;
        let c = r[d] * lead_inv % p;
        for i in 0..=dm {
            r[d - dm + i] = (r[d - dm + i] + p * p - c * m[i]) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_mulmod(a: &FpPoly, b: &FpPoly, m: &FpPoly, p: u32) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    fp_rem(&prod, m, p)
}

fn fp_gcd(a: &FpPoly, b: &FpPoly, p: u32) -> FpPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// `t^(p^k) mod m`.
fn fp_frobenius_power_of_t(m: &FpPoly, p: u32, k: usize) -> FpPoly {
    let mut cur = fp_rem(&vec![0, 1], m, p);
    for _ in 0..k {
        // cur <- cur^p
        let mut acc: FpPoly = vec![1];
        for _ in 0..p {
            acc = fp_mulmod(&acc, &cur, m, p);
        }
        cur = acc;
    }
    cur
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial of degree `m` over F_p.
pub(crate) fn is_irreducible_fp(poly: &[u32], p: u32) -> bool {
    let m = poly.len() - 1;
    if m == 1 {
        return true;
    }
    let modp: FpPoly = poly.to_vec();
    let t: FpPoly = vec![0, 1];
    // t^(p^m) == t mod poly
    if fp_frobenius_power_of_t(&modp, p, m) != fp_rem(&t, &modp, p) {
        return false;
    }
    for r in prime_factors(m) {
        let mut h = fp_frobenius_power_of_t(&modp, p, m / r);
        // h - t
        if h.len() < 2 {
            h.resize(2, 0);
        }
        h[1] = (h[1] + p - 1) % p;
        fp_trim(&mut h);
        let g = fp_gcd(&modp, &h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u32, m: usize) -> Vec<u8> {
    if m == 1 {
        return vec![0, 1];
    }
    // lower coefficients enumerated as the base-p digits of a counter
    let mut counter: u128 = 0;
    loop {
        let mut poly: Vec<u32> = Vec::with_capacity(m + 1);
        let mut c = counter;
        for _ in 0..m {
            poly.push((c % p as u128) as u32);
            c /= p as u128;
        }
        poly.push(1);
        if poly[0] != 0 && is_irreducible_fp(&poly, p) {
            return poly.into_iter().map(|c| c as u8).collect();
        }
        counter += 1;
    }
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// An element of `F_{p^m}` in power-basis coordinates.
#[derive(Clone, Copy)]
pub struct Fq {
    field: Field,
    digits: [u8; MAX_DEGREE],
}

impl Fq {
    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.digits[..self.field.0.degree].iter().all(|&d| d == 0)
    }

    pub fn is_one(&self) -> bool {
        self.digits[0] == 1 && self.digits[1..self.field.0.degree].iter().all(|&d| d == 0)
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits[..self.field.0.degree]
    }

    /// Index of this element in [`Field::element`] enumeration order.
    pub fn index(&self) -> u128 {
        let p = self.field.0.p as u128;
        self.digits().iter().rev().fold(0u128, |acc, &d| acc * p + d as u128)
    }

    /// Signed integer representative when the element lies in F_p:
    /// the residue in `(-p/2, p/2]`.
    pub fn to_prime_int(&self) -> Option<i64> {
        if self.digits[1..self.field.0.degree].iter().any(|&d| d != 0) {
            return None;
        }
        let p = self.field.0.p as i64;
        let d = self.digits[0] as i64;
        Some(if d > p / 2 { d - p } else { d })
    }

    pub fn pow(&self, e: u128) -> Fq {
        Fq {
            field: self.field,
            digits: slow_pow(self.field.0, &self.digits, e),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Fq> {
        if self.is_zero() {
            return None;
        }
        let ctx = self.field.0;
        if ctx.degree == 1 {
            let mut out = self.field.zero();
            out.digits[0] = fp_inv(self.digits[0] as u32, ctx.p) as u8;
            return Some(out);
        }
        Some(self.pow(self.field.order() - 2))
    }

    fn apply_linear(&self, cols: &[Vec<u8>]) -> Fq {
        let ctx = self.field.0;
        let p = ctx.p;
        let mut acc = [0u32; MAX_DEGREE];
        for (j, col) in cols.iter().enumerate() {
            let d = self.digits[j] as u32;
            if d == 0 {
                continue;
            }
            for i in 0..ctx.degree {
                acc[i] += d * col[i] as u32;
            }
        }
        let mut out = self.field.zero();
        for i in 0..ctx.degree {
            out.digits[i] = (acc[i] % p) as u8;
        }
        out
    }

    /// `a^p`.
    pub fn frobenius(&self) -> Fq {
        if self.field.0.degree == 1 {
            *self
        } else {
            self.apply_linear(&self.field.0.frob)
        }
    }

    /// The unique `b` with `b^p = a`.
    pub fn pth_root(&self) -> Fq {
        if self.field.0.degree == 1 {
            *self
        } else {
            self.apply_linear(&self.field.0.frob_inv)
        }
    }

    /// `a^(p^e)` for any integer `e` (negative `e` takes p-th roots).
    pub fn frobenius_pow(&self, e: i64) -> Fq {
        let m = self.field.0.degree as i64;
        let k = e.rem_euclid(m);
        let mut out = *self;
        for _ in 0..k {
            out = out.frobenius();
        }
        out
    }
}

/// p-th root of a field element.
pub fn pth_root(a: Fq) -> Fq {
    a.pth_root()
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        debug_assert!(self.field == other.field, "mixed fields {:?} / {:?}", self.field, other.field);
        self.digits == other.digits
    }
}
impl Eq for Fq {}

impl Hash for Fq {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.digits.hash(state);
    }
}

impl PartialOrd for Fq {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Fq {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.to_prime_int() {
            return write!(f, "{v}");
        }
        let mut first = true;
        for (i, &d) in self.digits().iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{d}")?,
                1 if d == 1 => write!(f, "t")?,
                1 => write!(f, "{d}t")?,
                _ if d == 1 => write!(f, "t^{i}")?,
                _ => write!(f, "{d}t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Prime-field elements serialize as signed integers, others as strings in the
/// power basis.
impl serde::Serialize for Fq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.to_prime_int() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.to_string()),
        }
    }
}

impl Add for Fq {
    type Output = Fq;
    #[inline]
    fn add(mut self, rhs: Fq) -> Fq {
        self += rhs;
        self
    }
}

impl AddAssign for Fq {
    #[inline]
    fn add_assign(&mut self, rhs: Fq) {
        debug_assert!(self.field == rhs.field);
        let ctx = self.field.0;
        let p = ctx.p as u8;
        for i in 0..ctx.degree {
            let s = self.digits[i] + rhs.digits[i];
            self.digits[i] = if s >= p { s - p } else { s };
        }
    }
}

impl Sub for Fq {
    type Output = Fq;
    #[inline]
    fn sub(mut self, rhs: Fq) -> Fq {
        self -= rhs;
        self
    }
}

impl SubAssign for Fq {
    #[inline]
    fn sub_assign(&mut self, rhs: Fq) {
        debug_assert!(self.field == rhs.field);
        let ctx = self.field.0;
        let p = ctx.p as u8;
        for i in 0..ctx.degree {
            let (a, b) = (self.digits[i], rhs.digits[i]);
            self.digits[i] = if a >= b { a - b } else { a + p - b };
        }
    }
}

impl Neg for Fq {
    type Output = Fq;
    #[inline]
    fn neg(self) -> Fq {
        self.field.zero() - self
    }
}

impl Mul for Fq {
    type Output = Fq;
    #[inline]
    fn mul(self, rhs: Fq) -> Fq {
        debug_assert!(self.field == rhs.field);
        Fq {
            field: self.field,
            digits: mul_digits(self.field.0, &self.digits, &rhs.digits),
        }
    }
}

impl MulAssign for Fq {
    #[inline]
    fn mul_assign(&mut self, rhs: Fq) {
        *self = *self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_and_composite_characteristic() {
        assert!(matches!(Field::new(2, 1), Err(Error::BadCharacteristic(2))));
        assert!(matches!(Field::new(9, 1), Err(Error::Config(_))));
        assert!(matches!(Field::new(17, 1), Err(Error::Config(_))));
    }

    #[test]
    fn moduli_are_smallest_irreducible() {
        // x^2 + 1 is the first irreducible monic quadratic over F_3
        assert_eq!(Field::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        // over F_5 the first is x^2 + 2
        assert_eq!(Field::new(5, 2).unwrap().modulus(), &[2, 0, 1]);
        // x^3 + 2x + 1 over F_3
        assert_eq!(Field::new(3, 3).unwrap().modulus(), &[1, 2, 0, 1]);
    }

    #[test]
    fn interning_returns_same_handle() {
        assert_eq!(Field::new(3, 2).unwrap(), Field::new(3, 2).unwrap());
    }

    #[test]
    fn pth_root_examples() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(pth_root(f3.from_int(2)), f3.from_int(2));
        assert_eq!(pth_root(f3.zero()), f3.zero());
        let f9 = Field::new(3, 2).unwrap();
        for a in f9.elements() {
            assert_eq!(pth_root(a), a.pow(3));
        }
    }

    #[test]
    fn field_axioms_exhaustive_f9_f25() {
        for (p, m) in [(3, 2), (5, 2), (3, 3)] {
            let k = Field::new(p, m).unwrap();
            let q = k.order();
            for a in k.elements() {
                assert_eq!(a.pow(q), a);
                if !a.is_zero() {
                    assert!((a * a.inv().unwrap()).is_one());
                }
                assert!((a - a).is_zero());
                assert_eq!(a + (-a), k.zero());
            }
        }
    }

    #[test]
    fn frobenius_is_a_power_map() {
        let k = Field::new(5, 3).unwrap();
        for i in (0..k.order()).step_by(7) {
            let a = k.element(i);
            assert_eq!(a.frobenius(), a.pow(5));
            assert_eq!(a.pth_root().frobenius(), a);
            assert_eq!(a.frobenius_pow(-2).frobenius_pow(2), a);
        }
    }

    #[test]
    fn element_index_roundtrip() {
        let k = Field::new(7, 2).unwrap();
        for i in 0..k.order() {
            assert_eq!(k.element(i).index(), i);
        }
    }

    #[test]
    fn irreducibility_test_small_cases() {
        // x^2 + 1 irreducible mod 3, x^2 - 1 is not
        assert!(is_irreducible_fp(&[1, 0, 1], 3));
        assert!(!is_irreducible_fp(&[2, 0, 1], 3));
        // degree-5 product of irreducible quadratic and cubic over F_3
        // (x^2+1)(x^3+2x+1) = x^5 + 3x^3 + x^3 ... computed explicitly
        let a = [1u32, 0, 1];
        let b = [1u32, 2, 0, 1];
        let mut prod = vec![0u32; 6];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % 3;
            }
        }
        assert!(!is_irreducible_fp(&prod, 3));
    }
}
