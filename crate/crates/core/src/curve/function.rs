use std::fmt;

use super::model::CurveModel;
use crate::algebra::{Embedding, Field, Fq, LaurentPoly};

/// Which affine chart of the two-chart cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    U0,
    U1,
}

/// A function `A(x) + B(x) y` on the overlap `U0 ∩ U1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChartFunction {
    pub a: LaurentPoly,
    pub b: LaurentPoly,
}

impl ChartFunction {
    pub fn new(a: LaurentPoly, b: LaurentPoly) -> Self {
        debug_assert!(a.field() == b.field());
        ChartFunction { a, b }
    }

    pub fn zero(field: Field) -> Self {
        Self::new(LaurentPoly::zero(field), LaurentPoly::zero(field))
    }

    pub fn one(field: Field) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: Fq) -> Self {
        Self::new(LaurentPoly::monomial(c, 0), LaurentPoly::zero(c.field()))
    }

    /// `c x^e`.
    pub fn x_pow(c: Fq, e: i64) -> Self {
        Self::new(LaurentPoly::monomial(c, e), LaurentPoly::zero(c.field()))
    }

    /// `c x^e y`.
    pub fn y_x_pow(c: Fq, e: i64) -> Self {
        Self::new(LaurentPoly::zero(c.field()), LaurentPoly::monomial(c, e))
    }

    pub fn from_x(a: LaurentPoly) -> Self {
        let field = a.field();
        Self::new(a, LaurentPoly::zero(field))
    }

    pub fn from_y(b: LaurentPoly) -> Self {
        let field = b.field();
        Self::new(LaurentPoly::zero(field), b)
    }

    pub fn field(&self) -> Field {
        self.a.field()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.a + &other.a, &self.b + &other.b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.a - &other.a, &self.b - &other.b)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b)
    }

    pub fn scale(&self, c: Fq) -> Self {
        Self::new(self.a.scale(c), self.b.scale(c))
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.a.shift(k), self.b.shift(k))
    }

    /// Product, reduced with `y^2 = f(x)`.
    pub fn mul(&self, other: &Self, curve: &CurveModel) -> Self {
        let mut a = &self.a * &other.a;
        if !self.b.is_zero() && !other.b.is_zero() {
            a = &a + &(&(&self.b * &other.b) * curve.f());
        }
        let b = &(&self.a * &other.b) + &(&self.b * &other.a);
        Self::new(a, b)
    }

    pub fn pow(&self, n: u32, curve: &CurveModel) -> Self {
        let mut out = Self::one(self.field());
        for _ in 0..n {
            out = out.mul(self, curve);
        }
        out
    }

    /// `u -> u^p` as a function (absolute Frobenius).
    pub fn frobenius(&self, curve: &CurveModel) -> Self {
        let a = self.a.pow_p();
        let b = if self.b.is_zero() {
            self.b.clone()
        } else {
            &self.b.pow_p() * curve.f_half()
        };
        Self::new(a, b)
    }

    /// `u -> u^(p^k)`.
    pub fn frobenius_iter(&self, k: usize, curve: &CurveModel) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.frobenius(curve))
    }

    pub fn map_field(&self, emb: &Embedding) -> Self {
        Self::new(self.a.map_field(emb), self.b.map_field(emb))
    }

    /// Regularity on a chart, given the genus.
    pub fn in_chart(&self, chart: Chart, genus: usize) -> bool {
        match chart {
            Chart::U0 => self.a.support_within(Some(0), None) && self.b.support_within(Some(0), None),
            Chart::U1 => {
                self.a.support_within(None, Some(0))
                    && self.b.support_within(None, Some(-(genus as i64 + 1)))
            }
        }
    }

    /// Smallest `t` such that `x^(-t) u` is regular on `U1` (may be negative);
    /// `None` for zero.
    pub fn u1_excess(&self, genus: usize) -> Option<i64> {
        let g = genus as i64;
        match (self.a.max_exp(), self.b.max_exp()) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(i64::MIN).max(b.map_or(i64::MIN, |e| e + g + 1))),
        }
    }

    /// Lowest exponent appearing in either part.
    pub fn min_exp(&self) -> Option<i64> {
        match (self.a.min_exp(), self.b.min_exp()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }

    /// Highest exponent appearing in either part.
    pub fn max_exp(&self) -> Option<i64> {
        match (self.a.max_exp(), self.b.max_exp()) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        }
    }

    /// Total number of nonzero coefficients.
    pub fn num_terms(&self) -> usize {
        self.a.num_terms() + self.b.num_terms()
    }
}

/// Product in the function ring of the curve.
pub fn fn_mul(u: &ChartFunction, v: &ChartFunction, curve: &CurveModel) -> ChartFunction {
    u.mul(v, curve)
}

/// Membership of a function in the coordinate ring of a chart.
pub fn chart_membership(u: &ChartFunction, chart: Chart, curve: &CurveModel) -> bool {
    u.in_chart(chart, curve.genus())
}

impl fmt::Debug for ChartFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ChartFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "({})*y", self.b),
            (false, false) => write!(f, "{} + ({})*y", self.a, self.b),
        }
    }
}

/// The differential `c * dx/y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DifferentialCoeff(pub ChartFunction);

impl DifferentialCoeff {
    pub fn new(c: ChartFunction) -> Self {
        DifferentialCoeff(c)
    }

    /// The global form `x^j dx/y`.
    pub fn x_omega(field: Field, j: i64) -> Self {
        DifferentialCoeff(ChartFunction::x_pow(field.one(), j))
    }

    pub fn coeff(&self) -> &ChartFunction {
        &self.0
    }

    /// `dx/y` is a nowhere-vanishing generator on `U0`.
    pub fn regular_on_u0(&self) -> bool {
        self.0.in_chart(Chart::U0, usize::MAX / 4)
    }

    /// On `U1`, `dx/y = -v^(g-1) dv/w`, so `c dx/y` is regular iff
    /// `x^(1-g) c` lies in `O(U1)`.
    pub fn regular_on_u1(&self, genus: usize) -> bool {
        let g = genus as i64;
        self.0.a.support_within(None, Some(g - 1)) && self.0.b.support_within(None, Some(-2))
    }

    pub fn is_global(&self, genus: usize) -> bool {
        self.regular_on_u0() && self.regular_on_u1(genus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::model::curve_validate;

    fn curve(v: &[i64]) -> CurveModel {
        let k = Field::prime(3).unwrap();
        let c: Vec<Fq> = v.iter().map(|&x| k.from_int(x)).collect();
        curve_validate(k, (v.len() - 1) / 2, &c).unwrap()
    }

    #[test]
    fn y_squared_is_f() {
        let c = curve(&[-1, -1, -1, -1, -1]);
        let y = ChartFunction::y_x_pow(c.field().one(), 0);
        assert_eq!(fn_mul(&y, &y, &c), ChartFunction::from_x(c.f().clone()));
        let u = ChartFunction::new(LaurentPoly::from_ints(c.field(), -2, &[1, 0, 2]), LaurentPoly::from_ints(c.field(), 1, &[1]));
        assert_eq!(fn_mul(&u, &ChartFunction::one(c.field()), &c), u);
    }

    #[test]
    fn e01_squared_matches_closed_form() {
        let c = curve(&[-1, -1, -1, -1, -1]);
        let k = c.field();
        // e = (1 + x) x^-2 y
        let e = ChartFunction::from_y(LaurentPoly::from_ints(k, -2, &[1, 1]));
        let sq = fn_mul(&e, &e, &c);
        let lin = LaurentPoly::from_ints(k, 0, &[1, 1]);
        let expected = &(&(&lin * &lin) * c.f()) * &LaurentPoly::from_ints(k, -4, &[1]);
        assert_eq!(sq, ChartFunction::from_x(expected));
    }

    #[test]
    fn membership_examples() {
        let c = curve(&[-1, -1, -1, -1, -1]);
        let k = c.field();
        let y_x4 = ChartFunction::y_x_pow(k.one(), -4);
        assert!(chart_membership(&y_x4, Chart::U1, &c));
        let y_x2 = ChartFunction::y_x_pow(k.one(), -2);
        assert!(!chart_membership(&y_x2, Chart::U0, &c));
        assert!(!chart_membership(&y_x2, Chart::U1, &c));
        let one = ChartFunction::one(k);
        assert!(chart_membership(&one, Chart::U0, &c) && chart_membership(&one, Chart::U1, &c));
    }

    #[test]
    fn global_differentials() {
        for coeffs in [&[-1, -1, -1, -1, -1][..], &[1, 0, 1][..]] {
            let c = curve(coeffs);
            let g = c.genus();
            for j in 0..g as i64 {
                assert!(DifferentialCoeff::x_omega(c.field(), j).is_global(g));
            }
            assert!(!DifferentialCoeff::x_omega(c.field(), g as i64).regular_on_u1(g));
            assert!(!DifferentialCoeff::x_omega(c.field(), -1).regular_on_u0());
        }
    }

    #[test]
    fn frobenius_is_pth_power() {
        let c = curve(&[1, -1, 1, -1, 1]);
        let k = c.field();
        let u = ChartFunction::new(LaurentPoly::from_ints(k, -1, &[1, 2, 1]), LaurentPoly::from_ints(k, -3, &[2, 0, 1]));
        assert_eq!(u.frobenius(&c), u.pow(3, &c));
    }
}
