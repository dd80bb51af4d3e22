//! Residues of `c dx/y` at the Weierstrass points `O = (0,0)` and infinity,
//! computed by expanding in the local uniformizer.

use super::function::{ChartFunction, DifferentialCoeff};
use super::model::CurveModel;
use crate::algebra::{Field, Fq, LaurentPoly};
use crate::error::{Error, Result};

/// Doublings of the precision budget before giving up.
const MAX_RETRIES: usize = 3;

/// Truncated Laurent series `sum_{i >= val} c_i t^i + O(t^prec)`.
#[derive(Clone, Debug)]
struct TSeries {
    field: Field,
    val: i64,
    coeffs: Vec<Fq>,
    prec: i64,
}

impl TSeries {
    fn exact_zero(field: Field, prec: i64) -> Self {
        TSeries { field, val: prec, coeffs: Vec::new(), prec }
    }

    fn from_fn(field: Field, val: i64, prec: i64, mut f: impl FnMut(i64) -> Fq) -> Self {
        let coeffs = (val..prec).map(&mut f).collect();
        TSeries { field, val, coeffs, prec }
    }

    fn coeff(&self, i: i64) -> Fq {
        assert!(i < self.prec, "coefficient t^{i} beyond precision {}", self.prec);
        if i < self.val {
            self.field.zero()
        } else {
            self.coeffs[(i - self.val) as usize]
        }
    }

    /// Strip leading zero coefficients.
    fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..lead);
        self.val += lead as i64;
        self
    }

    fn mul(&self, other: &Self) -> Self {
        let val = self.val + other.val;
        let prec = (self.val + other.prec).min(other.val + self.prec);
        let mut out = vec![self.field.zero(); (prec - val).max(0) as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= out.len() {
                    break;
                }
                out[k] += a * b;
            }
        }
        TSeries { field: self.field, val, coeffs: out, prec }
    }

    fn add(&self, other: &Self) -> Self {
        let val = self.val.min(other.val);
        let prec = self.prec.min(other.prec);
        TSeries::from_fn(self.field, val, prec.max(val), |i| {
            let a = if i >= self.val { self.coeff(i) } else { self.field.zero() };
            let b = if i >= other.val { other.coeff(i) } else { self.field.zero() };
            a + b
        })
    }

    fn scale(&self, c: Fq) -> Self {
        TSeries {
            field: self.field,
            val: self.val,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
            prec: self.prec,
        }
    }

    fn inv(&self) -> Result<Self> {
        let s = self.clone().normalized();
        let rel = s.prec - s.val;
        if rel <= 0 || s.coeffs.is_empty() {
            return Err(Error::PrecisionExhausted(self.coeffs.len()));
        }
        let u0inv = s.coeffs[0].inv().unwrap();
        let n = rel as usize;
        let mut out = vec![self.field.zero(); n];
        out[0] = u0inv;
        for k in 1..n {
            let mut acc = self.field.zero();
            for j in 1..=k.min(s.coeffs.len() - 1) {
                acc += s.coeffs[j] * out[k - j];
            }
            out[k] = -(acc * u0inv);
        }
        Ok(TSeries { field: self.field, val: -s.val, coeffs: out, prec: -s.val + rel })
    }

    fn derivative(&self) -> Self {
        let f = self.field;
        TSeries::from_fn(f, self.val - 1, self.prec - 1, |i| f.from_int(i + 1) * self.coeff(i + 1))
    }

    fn shift(&self, k: i64) -> Self {
        TSeries { field: self.field, val: self.val + k, coeffs: self.coeffs.clone(), prec: self.prec + k }
    }
}

/// Substitute a series into a Laurent polynomial: `q(x(t))`, where `x` has
/// valuation >= 0 and absolute precision `n`.
fn substitute(q: &LaurentPoly, x: &TSeries, xinv: &TSeries, n: i64) -> TSeries {
    let field = x.field;
    let one = TSeries::from_fn(field, 0, n, |i| if i == 0 { field.one() } else { field.zero() });
    // pos[k] = x^k, neg[k] = x^(-k), grown on demand
    let mut pos = vec![one.clone()];
    let mut neg = vec![one];
    let mut acc = TSeries::exact_zero(field, n);
    for (e, c) in q.terms() {
        let (powers, base) = if e >= 0 { (&mut pos, x) } else { (&mut neg, xinv) };
        let k = e.unsigned_abs() as usize;
        while powers.len() <= k {
            let next = powers.last().unwrap().mul(base);
            powers.push(next);
        }
        acc = acc.add(&powers[k].scale(c));
    }
    acc
}

/// Residue at `(0,0)` of `(a(x) + b(x) y) dx/y` on `y^2 = f(x)`, where
/// `f(0) = 0` and `f'(0) != 0`; `precision` is the number of terms of
/// `x(t)` computed in the uniformizer `t = y`.
fn residue_at_origin(f: &LaurentPoly, a: &LaurentPoly, b: &LaurentPoly, precision: usize) -> Result<Fq> {
    let field = f.field();
    let n = precision as i64;
    let a1 = f.coeff(1);
    let a1inv = a1.inv().expect("f'(0) != 0 on a smooth model");
    // x(t) = (t^2 - sum_{i>=2} a_i x^i) / a_1, solved by fixed-point iteration;
    // each pass fixes two more coefficients.
    let t2 = TSeries::from_fn(field, 0, n, |i| if i == 2 { field.one() } else { field.zero() });
    let mut x = t2.scale(a1inv);
    for _ in 0..(n / 2 + 1) {
        let mut rhs = t2.clone();
        let mut xp = x.clone();
        for i in 2..=f.max_exp().unwrap_or(1) {
            xp = xp.mul(&x);
            let c = f.coeff(i);
            if !c.is_zero() {
                rhs = rhs.add(&xp.scale(-c));
            }
        }
        let next = rhs.scale(a1inv);
        x = TSeries::from_fn(field, 0, n, |i| next.coeff(i));
    }
    let xinv = x.inv()?;
    // dx/y = x'(t)/t dt
    let omega = x.derivative().shift(-1);
    let t = TSeries::from_fn(field, 1, n, |i| if i == 1 { field.one() } else { field.zero() });
    let av = substitute(a, &x, &xinv, n);
    let bv = substitute(b, &x, &xinv, n).mul(&t);
    let c = av.add(&bv).mul(&omega);
    if c.prec <= -1 {
        return Err(Error::PrecisionExhausted(precision));
    }
    Ok(c.coeff(-1))
}

fn default_precision(c: &ChartFunction) -> usize {
    let pole = c.min_exp().map_or(0, |e| (-e).max(0)) as usize;
    4 * pole + 10
}

fn with_retries(c: &ChartFunction, mut run: impl FnMut(usize) -> Result<Fq>) -> Result<Fq> {
    let mut prec = default_precision(c);
    let mut last = Error::PrecisionExhausted(prec);
    for _ in 0..=MAX_RETRIES {
        match run(prec) {
            Ok(v) => return Ok(v),
            Err(e @ Error::PrecisionExhausted(_)) => last = e,
            Err(e) => return Err(e),
        }
        prec *= 2;
    }
    Err(last)
}

/// Residue of `c dx/y` at the Weierstrass point `O = (0, 0)`.
pub fn residue_at_o(d: &DifferentialCoeff, curve: &CurveModel) -> Result<Fq> {
    let c = d.coeff();
    with_retries(c, |prec| residue_at_origin(curve.f(), &c.a, &c.b, prec))
}

/// Residue of `c dx/y` at the point at infinity, computed in the chart
/// `(v, w)` where `dx/y = -v^(g-1) dv/w`.
pub fn residue_at_infinity(d: &DifferentialCoeff, curve: &CurveModel) -> Result<Fq> {
    let c = d.coeff();
    let g = curve.genus() as i64;
    let minus_one = -curve.field().one();
    // A(1/v) and B(1/v) v^-(g+1), then multiply by -v^(g-1)
    let flip = |q: &LaurentPoly, extra: i64| {
        LaurentPoly::from_terms(q.field(), q.terms().map(|(e, coef)| (-e + extra, coef * minus_one)))
    };
    let a_v = flip(&c.a, g - 1);
    let b_v = flip(&c.b, -(g + 1) + g - 1);
    let in_v = ChartFunction::new(a_v, b_v);
    let dual = curve.dual_f();
    with_retries(&in_v, |prec| residue_at_origin(&dual, &in_v.a, &in_v.b, prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::model::curve_validate;

    fn curve(p: u32, v: &[i64]) -> CurveModel {
        let k = Field::prime(p).unwrap();
        let c: Vec<Fq> = v.iter().map(|&x| k.from_int(x)).collect();
        curve_validate(k, (v.len() - 1) / 2, &c).unwrap()
    }

    #[test]
    fn residue_examples() {
        for (p, coeffs) in [(3, &[-1, -1, -1, -1, -1][..]), (5, &[1, 0, 2, 0, 3][..]), (3, &[1, 0, 1][..])] {
            let c = curve(p, coeffs);
            let k = c.field();
            // y/x dx/y = dx/x
            let d = DifferentialCoeff::new(ChartFunction::y_x_pow(k.one(), -1));
            assert_eq!(residue_at_o(&d, &c).unwrap(), k.from_int(2));
            let d2 = DifferentialCoeff::new(ChartFunction::y_x_pow(k.one(), -2));
            assert_eq!(residue_at_o(&d2, &c).unwrap(), k.zero());
            let reg = DifferentialCoeff::new(ChartFunction::x_pow(k.one(), 3));
            assert_eq!(residue_at_o(&reg, &c).unwrap(), k.zero());
        }
    }

    #[test]
    fn x_parts_have_no_residue() {
        let c = curve(3, &[1, -1, 1, -1, 1]);
        let k = c.field();
        for e in -6..0 {
            let d = DifferentialCoeff::new(ChartFunction::x_pow(k.one(), e));
            assert_eq!(residue_at_o(&d, &c).unwrap(), k.zero());
        }
    }

    #[test]
    fn residues_at_both_points_cancel() {
        let c = curve(5, &[2, 1, 0, 3, 1]);
        let k = c.field();
        for e in -5..=3 {
            let d = DifferentialCoeff::new(ChartFunction::y_x_pow(k.one(), e));
            let r0 = residue_at_o(&d, &c).unwrap();
            let r1 = residue_at_infinity(&d, &c).unwrap();
            assert!((r0 + r1).is_zero(), "e = {e}: {r0} + {r1}");
        }
    }

    #[test]
    fn residue_is_additive_over_terms() {
        let c = curve(3, &[-1, -1, -1, -1, -1]);
        let k = c.field();
        let q = LaurentPoly::from_ints(k, -4, &[1, 1, 1, 1, 1]);
        let whole = residue_at_o(&DifferentialCoeff::new(ChartFunction::from_y(q.clone())), &c).unwrap();
        let mut parts = k.zero();
        for (e, coef) in q.terms() {
            parts += residue_at_o(&DifferentialCoeff::new(ChartFunction::y_x_pow(coef, e)), &c).unwrap();
        }
        assert_eq!(whole, parts);
        assert_eq!(whole, k.from_int(2));
    }
}
