//! Dense univariate polynomials over `F_{p^m}`: gcds, squarefreeness and
//! root finding (used for curve validation and field embeddings).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{Field, Fq};

/// Polynomial with coefficients low degree first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Fq>,
}

impl Poly {
    pub fn new(field: Field, mut coeffs: Vec<Fq>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: Field) -> Poly {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn x(field: Field) -> Poly {
        Poly::new(field, vec![field.zero(), field.one()])
    }

    pub fn constant(c: Fq) -> Poly {
        Poly::new(c.field(), vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(self.field.zero())
    }

    pub fn eval(&self, x: Fq) -> Fq {
        self.coeffs.iter().rev().fold(self.field.zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.field.from_int(i as i64) * c)
            .collect();
        Poly::new(self.field, coeffs)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(self.field, (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(self.field, (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(self.field, out)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let d = divisor.degree().expect("division by zero polynomial");
        let lead_inv = divisor.coeffs[d].inv().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.field.zero(); self.coeffs.len().saturating_sub(d)];
        while rem.len() > d && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = rem[top] * lead_inv;
            if !c.is_zero() {
                quot[top - d] = c;
                for i in 0..=d {
                    let t = c * divisor.coeffs[i];
                    rem[top - d + i] -= t;
                }
            }
            rem.pop();
        }
        (Poly::new(self.field, quot), Poly::new(self.field, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lead) => {
                let inv = lead.inv().unwrap();
                Poly::new(self.field, self.coeffs.iter().map(|&c| c * inv).collect())
            }
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow_mod(&self, mut e: u128, modulus: &Poly) -> Poly {
        let mut result = Poly::constant(self.field.one()).rem(modulus);
        let mut base = self.rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        result
    }

    /// True when the polynomial has no repeated factor.
    pub fn is_squarefree(&self) -> bool {
        let d = self.derivative();
        if d.is_zero() {
            return self.degree().unwrap_or(0) == 0;
        }
        self.gcd(&d).degree() == Some(0)
    }

    /// All roots in the coefficient field, sorted by element index.
    pub fn roots(&self) -> Vec<Fq> {
        let k = self.field;
        if self.is_zero() {
            return Vec::new();
        }
        // split off the product of distinct linear factors: gcd(f, x^q - x)
        let f = self.monic();
        if f.degree() == Some(0) {
            return Vec::new();
        }
        let x = Poly::x(k);
        let xq = frobenius_power_of_x(&f, k.degree(), k);
        let lin = f.gcd(&xq.sub(&x));
        let mut roots = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
        split_linear(&lin, k, &mut rng, &mut roots);
        roots.sort();
        roots.dedup();
        roots
    }
}

/// `x^(p^k) mod f` by repeated p-th powering.
fn frobenius_power_of_x(f: &Poly, k: usize, field: Field) -> Poly {
    let p = field.characteristic() as u128;
    let mut cur = Poly::x(field).rem(f);
    for _ in 0..k {
        cur = cur.pow_mod(p, f);
    }
    cur
}

fn split_linear(f: &Poly, k: Field, rng: &mut ChaCha8Rng, out: &mut Vec<Fq>) {
    match f.degree() {
        None | Some(0) => {}
        Some(1) => {
            let m = f.monic();
            out.push(-m.coeff(0));
        }
        Some(_) => {
            let half = (k.order() - 1) / 2;
            loop {
                let delta = k.element(rng.gen_range(0..k.order()));
                let shifted = Poly::new(k, vec![delta, k.one()]);
                let h = shifted.pow_mod(half, f).sub(&Poly::constant(k.one()));
                let g = f.gcd(&h);
                let dg = g.degree().unwrap_or(0);
                if dg > 0 && Some(dg) < f.degree() {
                    let (q, _) = f.div_rem(&g);
                    split_linear(&g, k, rng, out);
                    split_linear(&q, k, rng, out);
                    return;
                }
            }
        }
    }
}

/// A field homomorphism `F_{p^m} -> F_{p^m'}` with `m | m'`.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: Field,
    target: Field,
    /// Images of the power-basis generators `t^i`.
    powers: Vec<Fq>,
}

impl Embedding {
    /// The embedding sending the generator to the smallest root of the
    /// source modulus in the target (deterministic).
    pub fn new(source: Field, target: Field) -> Option<Embedding> {
        if source.characteristic() != target.characteristic()
            || !target.degree().is_multiple_of(source.degree())
        {
            return None;
        }
        let one = target.one();
        let image_of_t = if source.degree() == 1 {
            // power basis is just {1}
            one
        } else {
            let modulus = Poly::new(
                target,
                source.modulus().iter().map(|&c| target.from_int(c as i64)).collect(),
            );
            *modulus.roots().first()?
        };
        let mut powers = Vec::with_capacity(source.degree());
        let mut cur = one;
        for _ in 0..source.degree() {
            powers.push(cur);
            cur *= image_of_t;
        }
        Some(Embedding { source, target, powers })
    }

    pub fn identity(field: Field) -> Embedding {
        Embedding::new(field, field).expect("identity embedding")
    }

    pub fn source(&self) -> Field {
        self.source
    }

    pub fn target(&self) -> Field {
        self.target
    }

    pub fn apply(&self, a: Fq) -> Fq {
        debug_assert!(a.field() == self.source);
        if self.source == self.target {
            return a;
        }
        let mut acc = self.target.zero();
        for (d, &pw) in a.digits().iter().zip(&self.powers) {
            if *d != 0 {
                acc += self.target.from_int(*d as i64) * pw;
            }
        }
        acc
    }
}
