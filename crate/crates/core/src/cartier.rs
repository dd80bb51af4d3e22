//! The Cartier operator on forms, Hasse-Witt matrices, and the twisted
//! Cartier map on global sections of `Ω ⊗ E`.

use serde::Serialize;

use crate::algebra::{Fq, LaurentPoly, Matrix};
use crate::cech::{coordinates_in, h0_omega_bundle, is_omega_section, BundleCocycle, FnMatrix, FnVector};
use crate::curve::{ChartFunction, CurveModel, DifferentialCoeff};
use crate::error::{Error, Result};
use crate::semilinear::{fitting, SemilinearOp};

/// Cartier operator on `B(x) dx`: `c x^(pj+p-1) dx -> c^(1/p) x^j dx`, all
/// other monomials are exact and die.
pub fn cartier_monomial(b: &LaurentPoly) -> LaurentPoly {
    let p = b.field().characteristic() as i64;
    LaurentPoly::from_terms(
        b.field(),
        b.terms().filter(|&(e, _)| (e + 1).rem_euclid(p) == 0).map(|(e, c)| ((e + 1) / p - 1, c.pth_root())),
    )
}

/// Cartier operator on `c dx/y` with `c = A + B y`:
/// `C(A dx/y) = (1/y) C(A f^((p-1)/2) dx)` and `C(B dx)` monomialwise.
pub fn cartier_chart(d: &DifferentialCoeff, curve: &CurveModel) -> DifferentialCoeff {
    let c = d.coeff();
    let a = if c.a.is_zero() { c.a.clone() } else { cartier_monomial(&(&c.a * curve.f_half())) };
    DifferentialCoeff::new(ChartFunction::new(a, cartier_monomial(&c.b)))
}

/// Componentwise Cartier on a vector of form coefficients.
pub fn cartier_vector(h: &[ChartFunction], curve: &CurveModel) -> FnVector {
    h.iter().map(|u| cartier_chart(&DifferentialCoeff::new(u.clone()), curve).0).collect()
}

/// The Hasse-Witt matrix (action of the Cartier operator on the basis
/// `x^i dx/y`, `0 <= i < g`) and the resulting `p`-rank.
#[derive(Clone, Debug, Serialize)]
pub struct HasseWittData {
    pub matrix: Matrix,
    pub p_rank: usize,
    pub ordinary: bool,
}

pub fn hasse_witt(curve: &CurveModel) -> HasseWittData {
    let g = curve.genus();
    let k = curve.field();
    let cols: Vec<Vec<Fq>> = (0..g as i64)
        .map(|i| {
            let image = cartier_chart(&DifferentialCoeff::x_omega(k, i), curve);
            debug_assert!(image.0.b.is_zero());
            (0..g as i64).map(|j| image.0.a.coeff(j)).collect()
        })
        .collect();
    let matrix = Matrix::from_cols(k, g, &cols);
    let p_rank = fitting(&SemilinearOp::new(matrix.clone(), -1)).ss_rank;
    HasseWittData { matrix, p_rank, ordinary: p_rank == g }
}

/// A basis of `H^0(X, Ω ⊗ E)`.
#[derive(Clone, Debug)]
pub struct OmegaTwistSections {
    pub basis: Vec<FnVector>,
    pub cocycle: BundleCocycle,
}

impl OmegaTwistSections {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coordinates(&self, h: &[ChartFunction]) -> Option<Vec<Fq>> {
        coordinates_in(self.cocycle.field(), &self.basis, h)
    }
}

pub fn omega_twist_sections(cocycle: &BundleCocycle, curve: &CurveModel) -> Result<OmegaTwistSections> {
    Ok(OmegaTwistSections { basis: h0_omega_bundle(cocycle, curve)?, cocycle: cocycle.clone() })
}

/// `C_σ(h) = C(g0^(-1) h)` for a section `h` of `Ω ⊗ E`, with the gluing
/// certificate: the `U1` side, transported through `g1`, must give the same
/// section after applying `A`.
pub fn twisted_cartier_apply(
    h: &[ChartFunction],
    cocycle: &BundleCocycle,
    g0_inv: &FnMatrix,
    g1_inv: &FnMatrix,
    curve: &CurveModel,
) -> Result<FnVector> {
    let t0 = g0_inv.apply(h, curve);
    let out0 = cartier_vector(&t0, curve);
    let t1 = g1_inv.apply(&cocycle.inverse_matrix().apply(h, curve), curve);
    let out1 = cartier_vector(&t1, curve);
    if cocycle.matrix().apply(&out1, curve) != out0 {
        return Err(Error::GluingViolated("C(t0) != A C(t1)".into()));
    }
    if !is_omega_section(&out0, cocycle, curve) {
        return Err(Error::GluingViolated("Cartier image is not a global section".into()));
    }
    Ok(out0)
}

/// Inverses of the two gauge matrices.
pub fn gauge_inverses(cocycle: &BundleCocycle, curve: &CurveModel) -> Result<(FnMatrix, FnMatrix)> {
    let gauge = cocycle.require_gauge()?;
    Ok((gauge.g0.inverse(curve)?, gauge.g1.inverse(curve)?))
}

/// Matrix of the `p^(-1)`-linear map `C_σ` on `H^0(X, Ω ⊗ E)` in the basis of
/// `sections`.
pub fn twisted_cartier_matrix(sections: &OmegaTwistSections, curve: &CurveModel) -> Result<SemilinearOp> {
    let cocycle = &sections.cocycle;
    let (g0_inv, g1_inv) = gauge_inverses(cocycle, curve)?;
    let k = curve.field();
    let cols: Vec<Vec<Fq>> = sections
        .basis
        .iter()
        .map(|h| {
            let img = twisted_cartier_apply(h, cocycle, &g0_inv, &g1_inv, curve)?;
            sections
                .coordinates(&img)
                .ok_or_else(|| Error::GluingViolated("Cartier image outside the section space".into()))
        })
        .collect::<Result<_>>()?;
    Ok(SemilinearOp::new(Matrix::from_cols(k, sections.dim(), &cols), -1))
}

/// The order of Cartier nilpotency, or a lower bound when it exceeds the cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum NilpotencyOrder {
    Exact(usize),
    AtLeast(usize),
}

impl NilpotencyOrder {
    /// The value, or the lower bound.
    pub fn lower_bound(self) -> usize {
        match self {
            NilpotencyOrder::Exact(n) | NilpotencyOrder::AtLeast(n) => n,
        }
    }
}

impl std::fmt::Display for NilpotencyOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NilpotencyOrder::Exact(n) => write!(f, "{n}"),
            NilpotencyOrder::AtLeast(n) => write!(f, ">= {n}"),
        }
    }
}

/// Details of a nilpotency computation.
#[derive(Clone, Debug, Serialize)]
pub struct NilpotencyReport {
    pub order: NilpotencyOrder,
    pub sections_dim: usize,
    pub ss_rank: usize,
    /// Largest `n` for which the composite-chain route was compared.
    pub chain_checked: usize,
}

/// `C^n(Σ_n h)` with `Σ_n = (g0^(p^(n-1)))^(-1) ... (g0^(p))^(-1) g0^(-1)`:
/// first move `h` to a section of `Ω ⊗ (F^n)^* E`, then apply the chain of
/// `n` untwisted Cartier maps.
pub fn cartier_chain_apply(h: &[ChartFunction], g0_inv: &FnMatrix, n: usize, curve: &CurveModel) -> FnVector {
    let mut t = h.to_vec();
    let mut g = g0_inv.clone();
    for i in 0..n {
        if i > 0 {
            g = g.frobenius(curve);
        }
        t = g.apply(&t, curve);
    }
    for _ in 0..n {
        t = cartier_vector(&t, curve);
    }
    t
}

/// Order of Cartier nilpotency: the nilpotency index of `C_σ` on its Fitting
/// nilpotent part. Powers up to the order are also recomputed through the
/// composite chain and compared, up to `chain_cap`.
pub fn nilpotency_order(cocycle: &BundleCocycle, curve: &CurveModel, n_max: usize) -> Result<NilpotencyReport> {
    nilpotency_order_with(cocycle, curve, n_max, usize::MAX)
}

pub fn nilpotency_order_with(
    cocycle: &BundleCocycle,
    curve: &CurveModel,
    n_max: usize,
    chain_cap: usize,
) -> Result<NilpotencyReport> {
    cocycle.require_gauge()?;
    let sections = omega_twist_sections(cocycle, curve)?;
    let op = twisted_cartier_matrix(&sections, curve)?;
    let fit = fitting(&op);
    let order = if fit.nil_index > n_max {
        NilpotencyOrder::AtLeast(n_max)
    } else {
        NilpotencyOrder::Exact(fit.nil_index)
    };
    let depth = fit.nil_index.min(n_max).min(chain_cap);
    let (g0_inv, _) = gauge_inverses(cocycle, curve)?;
    for j in 1..=depth {
        let pj = crate::semilinear::op_iterate(&op, j);
        for (idx, h) in sections.basis.iter().enumerate() {
            let chain = cartier_chain_apply(h, &g0_inv, j, curve);
            let coords = sections
                .coordinates(&chain)
                .ok_or_else(|| Error::Consistency("chain image outside the section space".into()))?;
            let mut e = vec![curve.field().zero(); sections.dim()];
            e[idx] = curve.field().one();
            let direct = pj.mul_vec(&e);
            if coords != direct {
                return Err(Error::Consistency(format!("C_σ^{j} disagrees with the Cartier chain")));
            }
        }
    }
    Ok(NilpotencyReport { order, sections_dim: sections.dim(), ss_rank: fit.ss_rank, chain_checked: depth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::curve::curve_validate;

    fn curve(p: u32, v: &[i64]) -> CurveModel {
        let k = Field::prime(p).unwrap();
        let c: Vec<Fq> = v.iter().map(|&x| k.from_int(x)).collect();
        curve_validate(k, (v.len() - 1) / 2, &c).unwrap()
    }

    #[test]
    fn monomial_rule() {
        let k = Field::new(3, 2).unwrap();
        assert_eq!(cartier_monomial(&LaurentPoly::monomial(k.one(), 2)), LaurentPoly::one(k));
        assert!(cartier_monomial(&LaurentPoly::monomial(k.one(), 1)).is_zero());
        let c = k.generator();
        assert_eq!(cartier_monomial(&LaurentPoly::monomial(c, 5)), LaurentPoly::monomial(c.pth_root(), 1));
        assert_eq!(cartier_monomial(&LaurentPoly::monomial(c, -1)), LaurentPoly::monomial(c.pth_root(), -1));
        assert_eq!(cartier_monomial(&LaurentPoly::monomial(c, -4)), LaurentPoly::monomial(c.pth_root(), -2));
    }

    #[test]
    fn hasse_witt_examples() {
        let x = curve(3, &[-1; 5]);
        let k = x.field();
        let hw = hasse_witt(&x);
        assert_eq!(hw.matrix, Matrix::from_ints(k, &[&[-1, -1], &[-1, -1]]));
        assert_eq!(hw.p_rank, 1);
        let ss = hasse_witt(&curve(3, &[1, 0, 1]));
        assert_eq!((ss.matrix[(0, 0)].is_zero(), ss.p_rank), (true, 0));
        let ord = hasse_witt(&curve(3, &[-1, 1, 1]));
        assert_eq!((ord.matrix[(0, 0)], ord.p_rank, ord.ordinary), (k.one(), 1, true));
    }

    #[test]
    fn kernel_form_dies() {
        // a4 a2 = a5 a1 on the all-(-1) curve
        let x = curve(3, &[-1; 5]);
        let k = x.field();
        let w = ChartFunction::from_x(LaurentPoly::from_terms(k, [(0, x.a(4)), (1, -x.a(5))]));
        assert!(cartier_chart(&DifferentialCoeff::new(w), &x).0.is_zero());
    }

    #[test]
    fn trivial_bundle_twisted_cartier_is_hasse_witt() {
        let x = curve(5, &[2, 1, 0, 3, 1]);
        let e = BundleCocycle::trivial(&x, 1);
        let s = omega_twist_sections(&e, &x).unwrap();
        assert_eq!(s.dim(), 2);
        let t = twisted_cartier_matrix(&s, &x).unwrap();
        let hw = hasse_witt(&x);
        let fit_a = fitting(&t);
        let fit_b = fitting(&SemilinearOp::new(hw.matrix, -1));
        assert_eq!(fit_a.ss_rank, fit_b.ss_rank);
    }

    #[test]
    fn rank_one_curve_has_nilpotency_one() {
        let x = curve(3, &[-1; 5]);
        let e = BundleCocycle::trivial(&x, 1);
        let r = nilpotency_order(&e, &x, 8).unwrap();
        assert_eq!(r.order, NilpotencyOrder::Exact(1));
        assert_eq!(r.chain_checked, 1);
    }
}
