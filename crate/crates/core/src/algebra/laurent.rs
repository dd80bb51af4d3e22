//! Laurent polynomials over `F_{p^m}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Field, Fq};
use super::poly::Embedding;

/// A Laurent polynomial `sum c_i x^i`.
///
/// Stored densely from the lowest to the highest nonzero exponent; both end
/// coefficients are nonzero, and the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    field: Field,
    low: i64,
    coeffs: Vec<Fq>,
}

impl LaurentPoly {
    pub fn zero(field: Field) -> Self {
        LaurentPoly { field, low: 0, coeffs: Vec::new() }
    }

    pub fn one(field: Field) -> Self {
        Self::monomial(field.one(), 0)
    }

    /// `c * x^e`.
    pub fn monomial(c: Fq, e: i64) -> Self {
        Self::from_dense(c.field(), e, vec![c])
    }

    /// Polynomial with `coeffs[i]` attached to `x^(low + i)`.
    pub fn from_dense(field: Field, low: i64, coeffs: Vec<Fq>) -> Self {
        let mut out = LaurentPoly { field, low, coeffs };
        out.normalize();
        out
    }

    /// From `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (i64, Fq)>) -> Self {
        let terms: Vec<(i64, Fq)> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero(field);
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![field.zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::from_dense(field, lo, coeffs)
    }

    /// From integer coefficients reduced into the field.
    pub fn from_ints(field: Field, low: i64, coeffs: &[i64]) -> Self {
        Self::from_dense(field, low, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> Fq {
        let i = e - self.low;
        if i < 0 || i >= self.coeffs.len() as i64 {
            self.field.zero()
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Fq)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.low + i as i64, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// All exponents lie in the closed range (empty bounds are open).
    pub fn support_within(&self, lo: Option<i64>, hi: Option<i64>) -> bool {
        match (self.min_exp(), self.max_exp()) {
            (Some(a), Some(b)) => lo.is_none_or(|l| a >= l) && hi.is_none_or(|h| b <= h),
            _ => true,
        }
    }

    /// Terms with exponent in `[lo, hi]`.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        if self.is_zero() || hi < lo {
            return Self::zero(self.field);
        }
        let a = lo.max(self.low);
        let b = hi.min(self.low + self.coeffs.len() as i64 - 1);
        if b < a {
            return Self::zero(self.field);
        }
        Self::from_dense(
            self.field,
            a,
            self.coeffs[(a - self.low) as usize..=(b - self.low) as usize].to_vec(),
        )
    }

    pub fn scale(&self, c: Fq) -> Self {
        if c.is_zero() {
            return Self::zero(self.field);
        }
        LaurentPoly {
            field: self.field,
            low: self.low,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPoly { field: self.field, low: self.low + k, coeffs: self.coeffs.clone() }
    }

    /// Coefficientwise `c -> c^(p^e)`; exponents unchanged.
    pub fn frobenius_twist(&self, e: i64) -> Self {
        if e == 0 || self.field.degree() == 1 {
            return self.clone();
        }
        LaurentPoly {
            field: self.field,
            low: self.low,
            coeffs: self.coeffs.iter().map(|c| c.frobenius_pow(e)).collect(),
        }
    }

    /// Substitution `x -> x^k` for `k >= 1`.
    pub fn inflate(&self, k: i64) -> Self {
        assert!(k >= 1);
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        Self::from_terms(self.field, self.terms().map(|(e, c)| (e * k, c)))
    }

    /// The full p-th power map `q -> q^p` as a function of `x`.
    pub fn pow_p(&self) -> Self {
        self.frobenius_twist(1).inflate(self.field.characteristic() as i64)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(self.field);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn map_field(&self, emb: &Embedding) -> Self {
        LaurentPoly {
            field: emb.target(),
            low: self.low,
            coeffs: self.coeffs.iter().map(|&c| emb.apply(c)).collect(),
        }
    }

    fn add_scaled(&self, other: &Self, sign: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if sign { other.clone() } else { -other };
        }
        let lo = self.low.min(other.low);
        let hi = self.max_exp().unwrap().max(other.max_exp().unwrap());
        let mut coeffs = vec![self.field.zero(); (hi - lo + 1) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - lo) as usize + i] = c;
        }
        let off = (other.low - lo) as usize;
        for (i, &c) in other.coeffs.iter().enumerate() {
            if sign {
                coeffs[off + i] += c;
            } else {
                coeffs[off + i] -= c;
            }
        }
        Self::from_dense(self.field, lo, coeffs)
    }
}

/// Coefficientwise Frobenius twist of a Laurent polynomial.
pub fn frobenius_twist(q: &LaurentPoly, e: i64) -> LaurentPoly {
    q.frobenius_twist(e)
}

/// Product of two Laurent polynomials.
pub fn laurent_mul(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    a * b
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_scaled(rhs, true)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_scaled(rhs, false)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            field: self.field,
            low: self.low,
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero(self.field);
        }
        // Sparse outer loop over the factor with fewer nonzero terms.
        let (outer, inner) = if self.num_terms() <= rhs.num_terms() { (self, rhs) } else { (rhs, self) };
        let inner_terms: Vec<(usize, Fq)> =
            inner.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, &c)| (j, c)).collect();
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in outer.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(j, b) in &inner_terms {
                coeffs[i + j] += a * b;
            }
        }
        LaurentPoly::from_dense(self.field, self.low + rhs.low, coeffs)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = if c.to_prime_int().is_some() { format!("{c}") } else { format!("({c})") };
            match e {
                0 => write!(f, "{cs}")?,
                1 => write!(f, "{cs}*x")?,
                _ => write!(f, "{cs}*x^{e}")?,
            }
        }
        Ok(())
    }
}
