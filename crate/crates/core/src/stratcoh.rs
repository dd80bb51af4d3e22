//! Stratified-cohomology dimensions of Frobenius-invariant bundles, the
//! Weierstrass line bundle, and the tower evidence report.

use serde::Serialize;

use crate::algebra::{Fq, Matrix};
use crate::cartier::{
    cartier_chart, hasse_witt, nilpotency_order, omega_twist_sections, twisted_cartier_matrix, NilpotencyOrder,
};
use crate::cech::{coordinates_in, h0_bundle, h1_bundle_basis, BundleCocycle, FnVector};
use crate::curve::{ChartFunction, CurveModel, DifferentialCoeff};
use crate::error::{Error, Result};
use crate::semilinear::{count_fixed, fitting, prosystem_limits, Limits, ProSystem, SemilinearOp};
use crate::tower::{frobenius_on_h1, ss_transfer_rank, Tower};

/// Stratified cohomology dimensions of a gauged bundle.
#[derive(Clone, Debug, Serialize)]
pub struct StratReport {
    pub h0_str: usize,
    /// From Frobenius on `H^1(E)`.
    pub h1_str: usize,
    /// From the Cartier map on `H^0(Ω ⊗ E^∨)`.
    pub h1_str_dual: usize,
    /// Limits of the constant pro-system on `H^1(E)`.
    pub limits: Limits,
    pub h0: usize,
    pub h1: usize,
}

/// Frobenius on `H^0(E)`: `s1 -> g1 s1^(p)`.
pub fn frobenius_on_h0(cocycle: &BundleCocycle, curve: &CurveModel) -> Result<SemilinearOp> {
    let gauge = cocycle.require_gauge()?;
    let basis = h0_bundle(cocycle, curve)?;
    let k = curve.field();
    let cols: Vec<Vec<Fq>> = basis
        .iter()
        .map(|s1| {
            let fs: FnVector = s1.iter().map(|u| u.frobenius(curve)).collect();
            coordinates_in(k, &basis, &gauge.g1.apply(&fs, curve))
                .ok_or_else(|| Error::Consistency("Frobenius image of a global section is not global".into()))
        })
        .collect::<Result<_>>()?;
    Ok(SemilinearOp::new(Matrix::from_cols(k, basis.len(), &cols), 1))
}

/// `h^0_str` and `h^1_str` as semisimple ranks, with `h^1_str` computed on
/// both sides of Serre duality and compared.
pub fn h_str(cocycle: &BundleCocycle, curve: &CurveModel) -> Result<StratReport> {
    cocycle.require_gauge()?;
    let f0 = frobenius_on_h0(cocycle, curve)?;
    let h1 = h1_bundle_basis(cocycle, curve)?;
    let f1 = frobenius_on_h1(&h1)?;
    let h1_str = fitting(&f1).ss_rank;
    let dual = cocycle.dual(curve)?;
    let dual_sections = omega_twist_sections(&dual, curve)?;
    if dual_sections.dim() != h1.dim() {
        return Err(Error::Consistency(format!(
            "Serre duality: h1(E) = {} but h0(Ω⊗E^∨) = {}",
            h1.dim(),
            dual_sections.dim()
        )));
    }
    let h1_str_dual = fitting(&twisted_cartier_matrix(&dual_sections, curve)?).ss_rank;
    if h1_str != h1_str_dual {
        return Err(Error::Consistency(format!(
            "h1_str from Frobenius ({h1_str}) differs from the Cartier side ({h1_str_dual})"
        )));
    }
    let limits = prosystem_limits(&ProSystem::Constant(f1))?;
    Ok(StratReport {
        h0_str: fitting(&f0).ss_rank,
        h1_str,
        h1_str_dual,
        limits,
        h0: f0.dim(),
        h1: h1.dim(),
    })
}

/// `h^1_str` of `O(∞ - O)` on a genus-2 curve.
///
/// The twisted forms `H^0(Ω(O - ∞))` are the `c dx/y` with `c` of order
/// `>= -1` at `O` and `c dx/y` vanishing at infinity, i.e. `span(dx/y)`; the
/// Frobenius structure comes from `L^2 = O(div x)`, so
/// `C_σ(μ) = C(x^(-(p-1)/2) μ)`.
pub fn h1_str_weierstrass_line_bundle(curve: &CurveModel) -> Result<usize> {
    if curve.genus() != 2 {
        return Err(Error::InvalidInput("the Weierstrass line bundle report needs genus 2".into()));
    }
    let k = curve.field();
    let basis = weierstrass_twisted_forms(curve);
    let half = (curve.p() as i64 - 1) / 2;
    let cols: Vec<Vec<Fq>> = basis
        .iter()
        .map(|mu| {
            let img = cartier_chart(&DifferentialCoeff::new(mu.shift(-half)), curve).0;
            let as_vec: Vec<FnVector> = basis.iter().map(|b| vec![b.clone()]).collect();
            coordinates_in(k, &as_vec, &[img]).ok_or_else(|| Error::Consistency("C_σ left H^0(Ω(O-∞))".into()))
        })
        .collect::<Result<_>>()?;
    let op = SemilinearOp::new(Matrix::from_cols(k, basis.len(), &cols), -1);
    let rank = fitting(&op).ss_rank;
    let closed = !weierstrass_closed_form(curve).is_zero() as usize;
    if rank != closed {
        return Err(Error::Consistency(format!("C_σ rank {rank} disagrees with the closed form {closed}")));
    }
    Ok(rank)
}

/// Coefficient of `x^(3(p-1)/2)` in `f^((p-1)/2)`; `a_3` when `p = 3`.
pub fn weierstrass_closed_form(curve: &CurveModel) -> Fq {
    let half = (curve.p() as i64 - 1) / 2;
    curve.f_half().coeff(3 * half)
}

/// Basis of `H^0(Ω(O - ∞))` from order conditions on monomials. With
/// `ord_O x = 2`, `ord_O y = 1`, `ord_∞ x = -2`, `ord_∞ y = -(2g+1)` and
/// `dx/y` of order `0` at `O` and `2g - 2` at infinity, a monomial form is
/// allowed when its order is `>= -1` at `O` and `>= 1` at infinity. Orders of
/// distinct monomials differ, so the conditions are termwise.
fn weierstrass_twisted_forms(curve: &CurveModel) -> Vec<ChartFunction> {
    let g = curve.genus() as i64;
    let k = curve.field();
    let mut out = Vec::new();
    for y in [false, true] {
        for e in -(2 * g + 2)..=(2 * g + 2) {
            let ord_o = 2 * e + y as i64;
            let ord_inf = -2 * e - if y { 2 * g + 1 } else { 0 } + 2 * g - 2;
            if ord_o >= -1 && ord_inf >= 1 {
                out.push(if y { ChartFunction::y_x_pow(k.one(), e) } else { ChartFunction::x_pow(k.one(), e) });
            }
        }
    }
    out
}

/// `#{c in H^1(E) : F c = c}` against `p^(h^1_str)`.
#[derive(Clone, Debug, Serialize)]
pub struct CountFixedReport {
    pub count: u128,
    pub h1_str: usize,
    pub matches: bool,
}

pub fn count_fixed_comparison(cocycle: &BundleCocycle, curve: &CurveModel) -> Result<CountFixedReport> {
    let h1 = h1_bundle_basis(cocycle, curve)?;
    let f1 = frobenius_on_h1(&h1)?;
    let h1_str = fitting(&f1).ss_rank;
    let count = count_fixed(&f1)?;
    let matches = count == (curve.p() as u128).pow(h1_str as u32);
    Ok(CountFixedReport { count, h1_str, matches })
}

/// One row of the tower evidence table.
#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub h1_ss: usize,
    /// Rank of `H^1(E_n)_ss -> H^1(E_(n+1))`.
    pub transfer_rank: usize,
    pub order: NilpotencyOrder,
    /// `floor((n + 1) / 2)`.
    pub bound: usize,
    pub bound_holds: bool,
}

/// Semisimple dimensions, transfer ranks and nilpotency orders along the
/// tower, `n = 1..=n_max`.
pub fn delta1_gap_report(curve: &CurveModel, n_max: usize) -> Result<Vec<GapRow>> {
    if curve.genus() != 2 {
        return Err(Error::InvalidInput("the tower report needs genus 2".into()));
    }
    if hasse_witt(curve).p_rank == 0 {
        return Err(Error::NoFixedClass("p-rank 0: no tower exists".into()));
    }
    let tower = Tower::build(curve, n_max + 1)?;
    delta1_gap_rows(&tower, n_max)
}

/// As [`delta1_gap_report`] on an already built tower of depth `> n_max`.
pub fn delta1_gap_rows(tower: &Tower, n_max: usize) -> Result<Vec<GapRow>> {
    if tower.depth() <= n_max {
        return Err(Error::Config(format!("tower of depth {} is too short for n_max = {n_max}", tower.depth())));
    }
    let x = tower.curve();
    let mut rows = Vec::with_capacity(n_max);
    let mut next = h1_bundle_basis(&tower.level(1).cocycle, x)?;
    for n in 1..=n_max {
        let cur = next;
        next = h1_bundle_basis(&tower.level(n + 1).cocycle, x)?;
        let h1_ss = fitting(&frobenius_on_h1(&cur)?).ss_rank;
        let transfer_rank = ss_transfer_rank(&cur, &next)?;
        let order = nilpotency_order(&tower.level(n).cocycle, x, n_max.max(n) + 1)?.order;
        let bound = n.div_ceil(2);
        rows.push(GapRow { n, h1_ss, transfer_rank, order, bound, bound_holds: order.lower_bound() >= bound });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::curve::curve_validate;

    fn curve(v: &[i64]) -> Result<CurveModel> {
        let k = Field::prime(3).unwrap();
        let c: Vec<Fq> = v.iter().map(|&x| k.from_int(x)).collect();
        curve_validate(k, (v.len() - 1) / 2, &c)
    }

    #[test]
    fn trivial_bundle_dimensions() {
        let x = curve(&[-1; 5]).unwrap();
        let r = h_str(&BundleCocycle::trivial(&x, 1), &x).unwrap();
        assert_eq!((r.h0_str, r.h1_str, r.h1_str_dual), (1, 1, 1));
        let ss = curve(&[1, 0, 1]).unwrap();
        assert_eq!(h_str(&BundleCocycle::trivial(&ss, 1), &ss).unwrap().h1_str, 0);
        let ord = curve(&[-1, 1, 1]).unwrap();
        assert_eq!(h_str(&BundleCocycle::trivial(&ord, 1), &ord).unwrap().h1_str, 1);
    }

    #[test]
    fn weierstrass_line_bundle_examples() {
        assert_eq!(h1_str_weierstrass_line_bundle(&curve(&[-1; 5]).unwrap()).unwrap(), 1);
        assert_eq!(h1_str_weierstrass_line_bundle(&curve(&[1, 1, 0, 1, -1]).unwrap()).unwrap(), 0);
        assert!(matches!(curve(&[1, 1, 0, 1, 1]), Err(Error::NotSmooth(_))));
    }

    #[test]
    fn weierstrass_twisted_forms_are_dx_over_y() {
        for p in [3, 5, 7] {
            let k = Field::prime(p).unwrap();
            let c: Vec<Fq> = [-1, 0, 0, 0, 1].iter().map(|&v| k.from_int(v)).collect();
            let x = curve_validate(k, 2, &c).unwrap();
            assert_eq!(weierstrass_twisted_forms(&x), vec![ChartFunction::one(k)]);
        }
    }

    #[test]
    fn count_fixed_examples() {
        let x = curve(&[-1; 5]).unwrap();
        let r = count_fixed_comparison(&BundleCocycle::trivial(&x, 1), &x).unwrap();
        assert_eq!((r.count, r.matches), (3, true));
        let ss = curve(&[1, 0, 1]).unwrap();
        assert_eq!(count_fixed_comparison(&BundleCocycle::trivial(&ss, 1), &ss).unwrap().count, 1);
    }

    #[test]
    fn gap_report_small() {
        let x = curve(&[-1; 5]).unwrap();
        let rows = delta1_gap_report(&x, 3).unwrap();
        let orders: Vec<usize> = rows.iter().map(|r| r.order.lower_bound()).collect();
        assert_eq!(orders, vec![1, 1, 2]);
        assert!(rows.iter().all(|r| r.bound_holds && r.h1_ss == 1 && r.transfer_rank == 0));
        let ss = curve(&[1, 0, 1, 0, 1]);
        if let Ok(ss) = ss {
            if hasse_witt(&ss).p_rank == 0 {
                assert!(delta1_gap_report(&ss, 2).is_err());
            }
        }
    }
}
