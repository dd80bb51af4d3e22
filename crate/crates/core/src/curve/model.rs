use serde::{Deserialize, Serialize};

use crate::algebra::{Embedding, Field, Fq, LaurentPoly, Poly};
use crate::error::{Error, Result};

/// The two-chart model of `y^2 = f(x)` with `f(0) = 0`.
///
/// Chart `U0` is the affine curve in `(x, y)`; chart `U1` uses
/// `v = 1/x`, `w = y v^(g+1)` and satisfies `w^2 = f~(v)` with
/// `f~(v) = v^(2g+2) f(1/v)`. Both `O = (0, 0)` and the point at infinity are
/// Weierstrass points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveModel {
    field: Field,
    genus: usize,
    coeffs: Vec<Fq>,
    f: LaurentPoly,
    f_half: LaurentPoly,
}

/// Curve description as read from the command line or a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub p: u32,
    #[serde(default = "default_m")]
    pub m: usize,
    pub g: usize,
    /// `a_1, ..., a_(2g+1)`, low degree first.
    pub f: Vec<i64>,
}

fn default_m() -> usize {
    1
}

impl CurveSpec {
    pub fn parse(text: &str) -> Result<CurveSpec> {
        serde_json::from_str(text).map_err(|e| {
            Error::InvalidInput(format!("curve spec at line {} column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn build(&self) -> Result<CurveModel> {
        let field = Field::new(self.p, self.m)?;
        let coeffs: Vec<Fq> = self.f.iter().map(|&c| field.from_int(c)).collect();
        curve_validate(field, self.g, &coeffs)
    }
}

/// Validate and build a curve `y^2 = a_(2g+1) x^(2g+1) + ... + a_1 x`.
pub fn curve_validate(field: Field, genus: usize, coeffs: &[Fq]) -> Result<CurveModel> {
    if field.characteristic().is_multiple_of(2) {
        return Err(Error::BadCharacteristic(field.characteristic()));
    }
    if !(1..=2).contains(&genus) {
        return Err(Error::Config(format!("genus must be 1 or 2, got {genus}")));
    }
    if coeffs.len() != 2 * genus + 1 {
        return Err(Error::InvalidInput(format!(
            "genus {genus} needs {} coefficients, got {}",
            2 * genus + 1,
            coeffs.len()
        )));
    }
    if coeffs.iter().any(|c| c.field() != field) {
        return Err(Error::InvalidInput("coefficients from a different field".into()));
    }
    if coeffs[0].is_zero() {
        return Err(Error::NotSmooth("a_1 = 0, so x = 0 is a repeated root".into()));
    }
    if coeffs[2 * genus].is_zero() {
        return Err(Error::NotSmooth(format!("leading coefficient a_{} vanishes", 2 * genus + 1)));
    }
    let mut dense = vec![field.zero()];
    dense.extend_from_slice(coeffs);
    let fpoly = Poly::new(field, dense.clone());
    if !fpoly.is_squarefree() {
        return Err(Error::NotSmooth("f has a repeated root".into()));
    }
    let f = LaurentPoly::from_dense(field, 0, dense);
    let f_half = f.pow((field.characteristic() - 1) / 2);
    Ok(CurveModel { field, genus, coeffs: coeffs.to_vec(), f, f_half })
}

impl CurveModel {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn p(&self) -> u32 {
        self.field.characteristic()
    }

    /// `a_i` for `1 <= i <= 2g+1`.
    pub fn a(&self, i: usize) -> Fq {
        self.coeffs[i - 1]
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn f(&self) -> &LaurentPoly {
        &self.f
    }

    /// `f^((p-1)/2)`, the factor in `y^p = y f^((p-1)/2)`.
    pub fn f_half(&self) -> &LaurentPoly {
        &self.f_half
    }

    /// The defining polynomial of the chart at infinity, `f~(v)`.
    pub fn dual_f(&self) -> LaurentPoly {
        let top = 2 * self.genus as i64 + 2;
        LaurentPoly::from_terms(self.field, self.f.terms().map(|(e, c)| (top - e, c)))
    }

    /// The same curve with coefficients pushed into a larger field.
    pub fn embed(&self, emb: &Embedding) -> CurveModel {
        CurveModel {
            field: emb.target(),
            genus: self.genus,
            coeffs: self.coeffs.iter().map(|&c| emb.apply(c)).collect(),
            f: self.f.map_field(emb),
            f_half: self.f_half.map_field(emb),
        }
    }

    /// Coefficients as signed integers when the curve is defined over F_p.
    pub fn int_coeffs(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_prime_int()).collect()
    }

    pub fn spec(&self) -> Option<CurveSpec> {
        Some(CurveSpec {
            p: self.p(),
            m: self.field.degree(),
            g: self.genus,
            f: self.int_coeffs()?,
        })
    }
}

/// The quartic discriminant used for genus-2 smoothness in characteristic 3,
/// as a polynomial in `a_1, ..., a_5`.
pub fn genus2_char3_delta(a: &[Fq]) -> Fq {
    let [a1, a2, a3, a4, a5] = [a[0], a[1], a[2], a[3], a[4]];
    let c3 = |x: Fq| x * x * x;
    let c2 = |x: Fq| x * x;
    c3(a5) * c3(a1) + c2(a5) * c2(a3) * c2(a1) + a5 * a4 * c2(a3) * a2 * a1 + a5 * c2(c2(a3)) * a1
        - a5 * c3(a3) * c2(a2)
        - c3(a4) * c3(a2)
        - c2(a4) * c3(a3) * a1
        + c2(a4) * c2(a3) * c2(a2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Field {
        Field::prime(3).unwrap()
    }

    fn ints(k: Field, v: &[i64]) -> Vec<Fq> {
        v.iter().map(|&c| k.from_int(c)).collect()
    }

    #[test]
    fn validation_examples() {
        let k = f3();
        assert!(curve_validate(k, 2, &ints(k, &[-1, -1, -1, -1, -1])).is_ok());
        assert!(curve_validate(k, 2, &ints(k, &[1, 1, 0, 1, -1])).is_ok());
        assert!(matches!(curve_validate(k, 2, &ints(k, &[0, 1, 1, 1, 1])), Err(Error::NotSmooth(_))));
        assert!(matches!(curve_validate(k, 2, &ints(k, &[1, 1, 0, 1, 1])), Err(Error::NotSmooth(_))));
        assert!(matches!(curve_validate(k, 2, &ints(k, &[1, 1])), Err(Error::InvalidInput(_))));
        assert!(matches!(CurveSpec { p: 2, m: 1, g: 1, f: vec![1, 0, 1] }.build(), Err(Error::BadCharacteristic(2))));
    }

    #[test]
    fn delta_of_examples() {
        let k = f3();
        assert!(!genus2_char3_delta(&ints(k, &[-1, -1, -1, -1, -1])).is_zero());
        assert_eq!(genus2_char3_delta(&ints(k, &[1, 1, 0, 1, -1])), k.one());
        assert!(genus2_char3_delta(&ints(k, &[1, 1, 0, 1, 1])).is_zero());
    }

    #[test]
    fn spec_parsing() {
        let s = CurveSpec::parse(r#"{"p":3,"m":1,"g":2,"f":[-1,-1,-1,-1,-1]}"#).unwrap();
        assert_eq!(s.f.len(), 5);
        let c = s.build().unwrap();
        assert_eq!(c.spec().unwrap(), s);
        let no_m = CurveSpec::parse(r#"{"p":3,"g":1,"f":[1,0,1]}"#).unwrap();
        assert_eq!(no_m.m, 1);
        assert!(matches!(CurveSpec::parse("{\"p\":3,"), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn dual_polynomial_reverses_coefficients() {
        let k = f3();
        let c = curve_validate(k, 2, &ints(k, &[1, -1, 0, 1, 1])).unwrap();
        // w^2 = a_1 v^5 + a_2 v^4 + a_3 v^3 + a_4 v^2 + a_5 v
        assert_eq!(c.dual_f(), LaurentPoly::from_ints(k, 1, &[1, 1, 0, -1, 1]));
    }
}
