#![allow(dead_code)]

use frobstrat::algebra::{Field, Fq, LaurentPoly};
use frobstrat::curve::{curve_validate, ChartFunction, CurveModel};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fq(k: Field, rng: &mut impl Rng) -> Fq {
    k.element(rng.gen_range(0..k.order()))
}

pub fn nonzero_fq(k: Field, rng: &mut impl Rng) -> Fq {
    k.element(rng.gen_range(1..k.order()))
}

/// Curve over F_p from integer coefficients `a_1, ..., a_(2g+1)`.
pub fn curve(p: u32, a: &[i64]) -> CurveModel {
    let k = Field::prime(p).unwrap();
    let c: Vec<Fq> = a.iter().map(|&v| k.from_int(v)).collect();
    curve_validate(k, (a.len() - 1) / 2, &c).unwrap()
}

pub fn all_minus_one() -> CurveModel {
    curve(3, &[-1; 5])
}

/// Rejection-sample a smooth curve of genus `g` over `k`.
pub fn random_curve(k: Field, g: usize, rng: &mut impl Rng) -> CurveModel {
    loop {
        let c: Vec<Fq> = (0..2 * g + 1).map(|_| fq(k, rng)).collect();
        if let Ok(x) = curve_validate(k, g, &c) {
            return x;
        }
    }
}

/// Every coefficient vector of F_p^(2g+1) in lexicographic order, with the
/// curve when it is smooth.
pub fn all_points(p: u32, g: usize) -> Vec<(Vec<Fq>, Option<CurveModel>)> {
    let k = Field::prime(p).unwrap();
    let n = 2 * g + 1;
    (0..(p as u64).pow(n as u32))
        .map(|idx| {
            let a: Vec<Fq> = (0..n).map(|i| k.from_int(((idx / (p as u64).pow(i as u32)) % p as u64) as i64)).collect();
            let x = curve_validate(k, g, &a).ok();
            (a, x)
        })
        .collect()
}

pub fn laurent(k: Field, lo: i64, hi: i64, rng: &mut impl Rng) -> LaurentPoly {
    LaurentPoly::from_terms(k, (lo..=hi).map(|e| (e, fq(k, rng))))
}

/// `A + B y` with `A` supported in `[alo, ahi]` and `B` in `[blo, bhi]`.
pub fn chart_fn(k: Field, (alo, ahi): (i64, i64), (blo, bhi): (i64, i64), rng: &mut impl Rng) -> ChartFunction {
    ChartFunction::new(laurent(k, alo, ahi, rng), laurent(k, blo, bhi, rng))
}

pub fn cube(x: Fq) -> Fq {
    x * x * x
}
