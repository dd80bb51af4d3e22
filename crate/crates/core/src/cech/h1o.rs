use serde::Serialize;

use crate::algebra::{Fq, LaurentPoly, Matrix};
use crate::curve::{residue_at_o, Chart, ChartFunction, CurveModel, DifferentialCoeff};
use crate::error::Result;

/// A class in `H^1(X, O)`: coordinates `(b_g, ..., b_1)` on the classes of
/// `y x^(-g), ..., y x^(-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CohClassO {
    pub coords: Vec<Fq>,
}

impl CohClassO {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Fq::is_zero)
    }

    /// Canonical representative `sum_j b_j y x^(-j)`.
    pub fn representative(&self) -> ChartFunction {
        let g = self.coords.len() as i64;
        let field = self.coords[0].field();
        let terms = self.coords.iter().enumerate().map(|(i, &c)| (-(g - i as i64), c));
        ChartFunction::from_y(LaurentPoly::from_terms(field, terms))
    }
}

/// Class of `u` in `H^1(X, O)`.
///
/// The `x`-only part always splits between the charts; of the `y` part,
/// exponents `>= 0` are regular on `U0` and exponents `<= -(g+1)` on `U1`.
pub fn h1_normal_form(u: &ChartFunction, curve: &CurveModel) -> CohClassO {
    let g = curve.genus() as i64;
    CohClassO { coords: (1..=g).rev().map(|j| u.b.coeff(-j)).collect() }
}

/// Whether `u = h0 + h1` with `h0` regular on `U0` and `h1` on `U1`; the
/// witness puts every term regular on `U0` into `h0`.
pub fn is_coboundary(u: &ChartFunction, curve: &CurveModel) -> (bool, Option<(ChartFunction, ChartFunction)>) {
    if !h1_normal_form(u, curve).is_zero() {
        return (false, None);
    }
    let (h0, h1) = split(u, curve);
    debug_assert!(h0.in_chart(Chart::U0, curve.genus()) && h1.in_chart(Chart::U1, curve.genus()));
    (true, Some((h0, h1)))
}

/// `u = h0 + rest` with `h0` the part of `u` regular on `U0`.
pub(crate) fn split(u: &ChartFunction, _curve: &CurveModel) -> (ChartFunction, ChartFunction) {
    let field = u.field();
    let pos = |q: &LaurentPoly| LaurentPoly::from_terms(field, q.terms().filter(|&(e, _)| e >= 0));
    let neg = |q: &LaurentPoly| LaurentPoly::from_terms(field, q.terms().filter(|&(e, _)| e < 0));
    (
        ChartFunction::new(pos(&u.a), pos(&u.b)),
        ChartFunction::new(neg(&u.a), neg(&u.b)),
    )
}

/// Frobenius on `H^1(X, O)`: the class of `u^p`.
pub fn frobenius_on_h1_o(c: &CohClassO, curve: &CurveModel) -> CohClassO {
    h1_normal_form(&c.representative().frobenius(curve), curve)
}

/// Matrix of Frobenius on `H^1(X, O)` as a `p`-linear map: column `j` is the
/// image of the `j`-th basis class.
pub fn frobenius_matrix_h1_o(curve: &CurveModel) -> Matrix {
    let g = curve.genus();
    let k = curve.field();
    let cols: Vec<Vec<Fq>> = (0..g)
        .map(|i| {
            let mut coords = vec![k.zero(); g];
            coords[i] = k.one();
            frobenius_on_h1_o(&CohClassO { coords }, curve).coords
        })
        .collect();
    Matrix::from_cols(k, g, &cols)
}

/// The global forms `x^i dx/y`, `0 <= i < g`.
pub fn global_forms(curve: &CurveModel) -> Vec<DifferentialCoeff> {
    (0..curve.genus() as i64).map(|i| DifferentialCoeff::x_omega(curve.field(), i)).collect()
}

/// Residue pairing of a class with a differential.
pub fn serre_pairing(e: &CohClassO, mu: &DifferentialCoeff, curve: &CurveModel) -> Result<Fq> {
    let prod = e.representative().mul(mu.coeff(), curve);
    residue_at_o(&DifferentialCoeff::new(prod), curve)
}

/// `P[j][i] = res_O(y x^(-j) * x^i dx/y)`, rows ordered like class
/// coordinates (`j = g, ..., 1`) and columns like the global forms.
pub fn serre_pairing_matrix(curve: &CurveModel) -> Result<Matrix> {
    let g = curve.genus();
    let k = curve.field();
    let forms = global_forms(curve);
    let mut rows = Vec::with_capacity(g);
    for r in 0..g {
        let mut coords = vec![k.zero(); g];
        coords[r] = k.one();
        let class = CohClassO { coords };
        rows.push(forms.iter().map(|mu| serre_pairing(&class, mu, curve)).collect::<Result<Vec<_>>>()?);
    }
    Ok(Matrix::from_rows(k, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::curve::curve_validate;

    fn curve(v: &[i64]) -> CurveModel {
        let k = Field::prime(3).unwrap();
        let c: Vec<Fq> = v.iter().map(|&x| k.from_int(x)).collect();
        curve_validate(k, (v.len() - 1) / 2, &c).unwrap()
    }

    fn e01(x: &CurveModel, a: i64, b: i64) -> ChartFunction {
        let k = x.field();
        ChartFunction::from_y(LaurentPoly::from_ints(k, -2, &[a, b]))
    }

    #[test]
    fn normal_form_examples() {
        let x = curve(&[-1; 5]);
        let k = x.field();
        let nf = h1_normal_form(&e01(&x, 1, -1), &x);
        assert_eq!(nf.coords, vec![k.one(), -k.one()]);
        assert!(h1_normal_form(&ChartFunction::y_x_pow(k.one(), -4), &x).is_zero());
        assert!(h1_normal_form(&ChartFunction::x_pow(k.one(), -1), &x).is_zero());
    }

    #[test]
    fn cube_minus_identity_is_coboundary_with_printed_witness() {
        let x = curve(&[-1; 5]);
        let k = x.field();
        let e = e01(&x, 1, 1);
        let u = e.pow(3, &x).sub(&e);
        let (ok, w) = is_coboundary(&u, &x);
        assert!(ok);
        let (h0, h1) = w.unwrap();
        assert_eq!(h0.add(&h1), u);
        // b^3 y (a5 x^2 + a4 x + a3) with b = 1
        let printed = ChartFunction::from_y(LaurentPoly::from_ints(k, 0, &[-1, -1, -1]));
        assert_eq!(h0, printed);
        assert!(is_coboundary(&e.pow(2, &x), &x).0);
        assert!(!is_coboundary(&e, &x).0);
    }

    #[test]
    fn frobenius_examples() {
        let x = curve(&[-1; 5]);
        let k = x.field();
        let one = CohClassO { coords: vec![k.one(), k.one()] };
        assert_eq!(frobenius_on_h1_o(&one, &x), one);
        let y1 = CohClassO { coords: vec![k.zero(), k.one()] };
        assert_eq!(frobenius_on_h1_o(&y1, &x).coords, vec![x.a(1), x.a(2)]);
        let m = frobenius_matrix_h1_o(&x);
        assert_eq!(m, Matrix::from_ints(k, &[&[-1, -1], &[-1, -1]]));
    }

    #[test]
    fn pairing_is_antidiagonal_in_genus_two() {
        let x = curve(&[1, -1, 1, -1, 1]);
        let k = x.field();
        assert_eq!(serre_pairing_matrix(&x).unwrap(), Matrix::from_ints(k, &[&[0, 2], &[2, 0]]));
    }
}
