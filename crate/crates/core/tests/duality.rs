mod common;

use common::{random_curve, rng};
use frobstrat::algebra::{Field, Fq, Matrix};
use frobstrat::cartier::{cartier_chart, hasse_witt};
use frobstrat::cech::{frobenius_matrix_h1_o, frobenius_on_h1_o, global_forms, serre_pairing, serre_pairing_matrix, CohClassO};
use frobstrat::curve::CurveModel;
use frobstrat::semilinear::{fitting, SemilinearOp};
use rand::Rng;

const SETTINGS: &[(u32, usize)] = &[(3, 1), (3, 2), (5, 1), (5, 2)];

fn random_curves(count: usize, seed: u64) -> Vec<CurveModel> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let (p, m) = SETTINGS[r.gen_range(0..SETTINGS.len())];
            let g = r.gen_range(1..=2);
            random_curve(Field::new(p, m).unwrap(), g, &mut r)
        })
        .collect()
}

fn basis_class(k: Field, g: usize, j: usize) -> CohClassO {
    let mut coords = vec![k.zero(); g];
    coords[j] = k.one();
    CohClassO { coords }
}

/// Manin's description: the coefficient of `x^j dx/y` in `C(x^i dx/y)` is
/// `c_(p(j+1)-i-1)^(1/p)` with `f^((p-1)/2) = sum c_k x^k`.
fn manin_matrix(x: &CurveModel) -> Matrix {
    let k = x.field();
    let p = x.p() as usize;
    let g = x.genus();
    let f: Vec<Fq> = std::iter::once(k.zero()).chain(x.coeffs().iter().copied()).collect();
    let mut h = vec![k.one()];
    for _ in 0..(p - 1) / 2 {
        let mut next = vec![k.zero(); h.len() + f.len() - 1];
        for (i, &a) in h.iter().enumerate() {
            for (j, &b) in f.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        h = next;
    }
    let c = |idx: usize| h.get(idx).copied().unwrap_or(k.zero());
    let rows = (0..g).map(|j| (0..g).map(|i| c(p * (j + 1) - i - 1).pth_root()).collect()).collect();
    Matrix::from_rows(k, rows)
}

#[test]
fn adjointness_and_perfect_pairing() {
    for x in random_curves(100, 7) {
        let k = x.field();
        let g = x.genus();
        let forms = global_forms(&x);
        assert_eq!(forms.len(), g);
        for j in 0..g {
            let e = basis_class(k, g, j);
            let fe = frobenius_on_h1_o(&e, &x);
            for mu in &forms {
                let cmu = cartier_chart(mu, &x);
                assert_eq!(
                    serre_pairing(&fe, mu, &x).unwrap(),
                    serre_pairing(&e, &cmu, &x).unwrap().frobenius(),
                    "{:?}",
                    x.coeffs()
                );
            }
        }
        assert!(!serre_pairing_matrix(&x).unwrap().determinant().is_zero(), "{:?}", x.coeffs());
    }
}

#[test]
fn hasse_witt_matches_manin() {
    for x in random_curves(100, 11) {
        let hw = hasse_witt(&x);
        assert_eq!(hw.matrix, manin_matrix(&x), "{:?}", x.coeffs());
        // Frobenius on H^1(O) and the Cartier operator on forms have the same
        // stable rank.
        let f_ss = fitting(&SemilinearOp::new(frobenius_matrix_h1_o(&x), 1)).ss_rank;
        assert_eq!(f_ss, hw.p_rank);
    }
}

#[test]
fn pairing_on_the_example_curve() {
    let x = common::all_minus_one();
    let k = x.field();
    let m = serre_pairing_matrix(&x).unwrap();
    assert_eq!(m, Matrix::from_ints(k, &[&[0, -1], &[-1, 0]]));
}
