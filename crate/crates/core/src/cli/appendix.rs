//! Reproduction of the worked genus-2, characteristic-3 examples, plus the
//! characteristic-free duality checks.
//!
//! Rows are closures run against a shared lazily built context, so one
//! failing computation only fails its own rows.

use std::cell::OnceCell;

use super::{adjointness_holds, default_curve, hasse_witt_closed_form, Check, Status};
use crate::algebra::{Field, Fq, LaurentPoly, Matrix};
use crate::cartier::{cartier_chart, hasse_witt, nilpotency_order, NilpotencyOrder};
use crate::cech::{
    frobenius_on_h1_o, h1_normal_form, is_coboundary, serre_pairing_matrix, CohClassO, FnMatrix,
};
use crate::curve::{curve_validate, genus2_char3_delta, ChartFunction, CurveModel, DifferentialCoeff};
use crate::error::Result;
use crate::semilinear::{fixed_space, SemilinearOp};
use crate::stratcoh::{delta1_gap_rows, h1_str_weierstrass_line_bundle, h_str, GapRow};
use crate::tower::{block_drop_check, fixed_class_in_h1, solve_fixed_cocycle, Tower};

/// Parameters of a suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub p: u32,
    /// Tower rows are produced for `n = 1..=tower_depth` (at least 3).
    pub tower_depth: usize,
    pub ext_cap: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { p: 3, tower_depth: 3, ext_cap: crate::semilinear::DEFAULT_MAX_EXT }
    }
}

type Outcome = Result<(bool, String)>;

struct Row<'a> {
    id: String,
    run: Box<dyn Fn(&Ctx) -> Outcome + 'a>,
}

fn row<'a>(id: impl Into<String>, run: impl Fn(&Ctx) -> Outcome + 'a) -> Row<'a> {
    Row { id: id.into(), run: Box::new(run) }
}

/// A curve of `F_3^5` with its coefficient tuple.
struct Point {
    a: Vec<Fq>,
    curve: Option<CurveModel>,
}

struct Ctx {
    cfg: SuiteConfig,
    k: Field,
    x: CurveModel,
    tower: OnceCell<Result<Tower>>,
    gap: OnceCell<Result<Vec<GapRow>>>,
    points: OnceCell<Vec<Point>>,
}

impl Ctx {
    fn new(cfg: SuiteConfig) -> Result<Ctx> {
        let k = Field::prime(3)?;
        let x = curve_validate(k, 2, &[-k.one(); 5])?;
        Ok(Ctx { cfg, k, x, tower: OnceCell::new(), gap: OnceCell::new(), points: OnceCell::new() })
    }

    fn depth(&self) -> usize {
        self.cfg.tower_depth.max(3)
    }

    fn tower(&self) -> Result<&Tower> {
        self.tower
            .get_or_init(|| Tower::build_with(&self.x, self.depth() + 1, self.cfg.ext_cap))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn gap(&self) -> Result<&[GapRow]> {
        self.gap
            .get_or_init(|| delta1_gap_rows(self.tower()?, self.depth()))
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    fn gap_row(&self, n: usize) -> Result<&GapRow> {
        Ok(&self.gap()?[n - 1])
    }

    /// All 243 coefficient tuples over F_3, smooth or not.
    fn points(&self) -> &[Point] {
        self.points.get_or_init(|| {
            (0..243u32)
                .map(|idx| {
                    let a: Vec<Fq> = (0..5).map(|i| self.k.from_int(((idx / 3u32.pow(i)) % 3) as i64)).collect();
                    let curve = curve_validate(self.k, 2, &a).ok();
                    Point { a, curve }
                })
                .collect()
        })
    }

    fn smooth(&self) -> impl Iterator<Item = (&[Fq], &CurveModel)> {
        self.points().iter().filter_map(|pt| pt.curve.as_ref().map(|c| (pt.a.as_slice(), c)))
    }

    /// The fixed cocycle `(1 + x) y / x^2` of the example curve.
    fn e01(&self) -> ChartFunction {
        ChartFunction::from_y(LaurentPoly::from_ints(self.k, -2, &[1, 1]))
    }

    /// `f0 = b^3 y (a_5 x^2 + a_4 x + a_3)` and `f1 = a^3 w (a_1 v^2 + a_2 v + a_3)`
    /// for `(a, b) = (1, 1)`, with `w = y x^(-3)`, `v = 1/x`.
    fn witness_pair(&self) -> (ChartFunction, ChartFunction) {
        let x = &self.x;
        let f0 = ChartFunction::from_y(LaurentPoly::from_terms(self.k, [(0, x.a(3)), (1, x.a(4)), (2, x.a(5))]));
        let f1 = ChartFunction::from_y(LaurentPoly::from_terms(self.k, [(-5, x.a(1)), (-4, x.a(2)), (-3, x.a(3))]));
        (f0, f1)
    }
}

fn cube(x: Fq) -> Fq {
    x * x * x
}

/// Expanded leading coefficient of the top component of `C_σ` on `E_3`.
fn leading_expanded(a: &[Fq]) -> Fq {
    let [_, a2, a3, a4, a5] = [a[0], a[1], a[2], a[3], a[4]];
    -cube(a4) * a5 * a5 * a2 + cube(a4) * cube(a4) - a4 * cube(a4) * a5 * a3 - cube(a5) * a2 * a3 * a4
        + a5 * cube(a5) * a2 * a2
}

fn leading_factored(a: &[Fq]) -> Fq {
    let [_, a2, a3, a4, a5] = [a[0], a[1], a[2], a[3], a[4]];
    (a5 * a5 * a2 + cube(a4)) * (a5 * a5 * a2 + cube(a4) - a3 * a4 * a5)
}

/// The three conditions for a smooth curve of Hasse-Witt rank one.
fn rank_one_conditions(a: &[Fq]) -> bool {
    let [a1, a2, a3, a4, a5] = [a[0], a[1], a[2], a[3], a[4]];
    a4 * a2 == a5 * a1
        && !(a1 * a5 * (a2 * cube(a2) + cube(a1) * a5)).is_zero()
        && !(a3 * (a2 * a5 * a5 + cube(a4) - a3 * a4 * a5)).is_zero()
}

fn unit(k: Field, coords: &[i64]) -> Vec<Fq> {
    coords.iter().map(|&c| k.from_int(c)).collect()
}

fn char3_rows<'a>(cfg: &SuiteConfig) -> Vec<Row<'a>> {
    let mut rows = vec![
        row("e01^2 has A-part (a+bx)^2 f/x^4 and no y-part", |c: &Ctx| {
            let e = c.e01();
            let sq = e.mul(&e, &c.x);
            let expect = &(&LaurentPoly::from_ints(c.k, 0, &[1, 1]).pow(2) * c.x.f()).shift(-4);
            Ok((sq.a == *expect && sq.b.is_zero(), format!("A = {}", sq.a)))
        }),
        row("e01 = (a+bx) y/x^2 has normal form (a, b) = (1, 1)", |c: &Ctx| {
            let nf = h1_normal_form(&c.e01(), &c.x);
            Ok((nf.coords == unit(c.k, &[1, 1]), format!("{:?}", nf.coords.iter().map(|v| v.to_string()).collect::<Vec<_>>())))
        }),
        row("e01^3 - e01 is a coboundary, U0 part b^3 y (a5 x^2 + a4 x + a3)", |c: &Ctx| {
            let e = c.e01();
            let u = e.pow(3, &c.x).sub(&e);
            let (ok, w) = is_coboundary(&u, &c.x);
            let (f0, _) = c.witness_pair();
            let h0 = w.map(|(h0, _)| h0);
            Ok((ok && h0.as_ref() == Some(&f0), format!("h0 = {}", h0.map_or("none".into(), |h| h.to_string()))))
        }),
        row("e01^2 is a coboundary", |c: &Ctx| {
            let e = c.e01();
            Ok((is_coboundary(&e.mul(&e, &c.x), &c.x).0, String::new()))
        }),
        row("Frobenius on H^1(O) fixes (1, 1)", |c: &Ctx| {
            let v = CohClassO { coords: unit(c.k, &[1, 1]) };
            let img = frobenius_on_h1_o(&v, &c.x);
            Ok((img == v, String::new()))
        }),
        row("fixed space of [[-1,-1],[-1,-1]] is spanned by (1, 1)", |c: &Ctx| {
            let op = SemilinearOp::new(Matrix::from_ints(c.k, &[&[-1, -1], &[-1, -1]]), 1);
            let fs = fixed_space(&op, c.cfg.ext_cap)?;
            let v = &fs.basis;
            let ok = fs.degree == 1 && v.len() == 1 && (v[0] == unit(c.k, &[1, 1]) || v[0] == unit(c.k, &[-1, -1]));
            Ok((ok, format!("F_3-dimension {}", v.len())))
        }),
        row("Hasse-Witt matrix is [[a2^(1/3), a1^(1/3)], [a5^(1/3), a4^(1/3)]] on every smooth curve", |c: &Ctx| {
            let mut n = 0;
            for (_, x) in c.smooth() {
                n += 1;
                if hasse_witt_closed_form(x) != Some(hasse_witt(x).matrix) {
                    return Ok((false, format!("fails for {:?}", x.int_coeffs())));
                }
            }
            Ok((true, format!("{n} curves")))
        }),
        row("C(a4 ω1 - a5 ω2) = 0 whenever a4 a2 = a5 a1", |c: &Ctx| {
            let mut n = 0;
            for (a, x) in c.smooth().filter(|(a, _)| a[3] * a[1] == a[4] * a[0]) {
                n += 1;
                let omega = ChartFunction::from_x(LaurentPoly::from_terms(c.k, [(0, a[3]), (1, -a[4])]));
                if !cartier_chart(&DifferentialCoeff::new(omega), x).0.is_zero() {
                    return Ok((false, format!("fails for {:?}", x.int_coeffs())));
                }
            }
            Ok((n > 0, format!("{n} curves")))
        }),
        row("smooth with Hasse-Witt rank 1 exactly under the three coefficient conditions", |c: &Ctx| {
            let mut n = 0;
            for pt in c.points() {
                let rank_one = pt.curve.as_ref().is_some_and(|x| hasse_witt(x).p_rank == 1);
                if rank_one != rank_one_conditions(&pt.a) {
                    return Ok((false, format!("fails for {:?}", pt.a.iter().map(Fq::to_string).collect::<Vec<_>>())));
                }
                n += rank_one as usize;
            }
            Ok((true, format!("{n} curves of rank 1 among 243 tuples")))
        }),
        row("Δ ≠ 0 and a1 a5 ≠ 0 exactly for smooth curves", |c: &Ctx| {
            let ok = c.points().iter().all(|pt| {
                let d = !genus2_char3_delta(&pt.a).is_zero() && !(pt.a[0] * pt.a[4]).is_zero();
                d == pt.curve.is_some()
            });
            Ok((ok, "243 tuples".into()))
        }),
        row("trivial bundle on a rank-1 curve has nilpotency order 1", |c: &Ctx| {
            let r = nilpotency_order(&crate::cech::BundleCocycle::trivial(&c.x, 1), &c.x, 4)?;
            Ok((r.order == NilpotencyOrder::Exact(1), format!("order {}", r.order)))
        }),
        row("fixed cocycle of the example curve is (1, 1)", |c: &Ctx| {
            let f = solve_fixed_cocycle(&c.x)?;
            Ok((f.coords == unit(c.k, &[1, 1]) && f.degree == 1, String::new()))
        }),
        row("E1: H^1 semisimple part has dimension 1, fixed class (1, 1)", |c: &Ctx| {
            let r = fixed_class_in_h1(c.tower()?.level(1), &c.x)?;
            Ok((r.ss_dim == 1 && r.class.coords == unit(c.k, &[1, 1]), format!("ss dim {}", r.ss_dim)))
        }),
        row("E2 has cocycle [[1, e01], [0, 1]]", |c: &Ctx| {
            let t = c.tower()?;
            let o = ChartFunction::one(c.k);
            let z = ChartFunction::zero(c.k);
            let expect = FnMatrix::from_rows(c.k, vec![vec![o.clone(), c.e01()], vec![z, o]]);
            Ok((*t.level(2).cocycle.matrix() == expect, String::new()))
        }),
        row("E2 gauge entries are (-f0, f1) with f0 + f1 = e01^3 - e01", |c: &Ctx| {
            let t = c.tower()?;
            let cocycle = &t.level(2).cocycle;
            let g = cocycle.require_gauge()?;
            cocycle.check_gauge(g, &c.x)?;
            let (f0, f1) = c.witness_pair();
            let e = c.e01();
            let sum_ok = f0.add(&f1) == e.pow(3, &c.x).sub(&e);
            let ok = sum_ok && *g.g0.get(0, 1) == f0.neg() && *g.g1.get(0, 1) == f1;
            Ok((ok, format!("g0 entry {}, g1 entry {}", g.g0.get(0, 1), g.g1.get(0, 1))))
        }),
        row("E2: H^1 semisimple part has dimension 1", |c: &Ctx| {
            let r = c.gap_row(2)?;
            Ok((r.h1_ss == 1, format!("{}", r.h1_ss)))
        }),
        row("E3 cocycle is [[1, e01, 0], [0, 1, e01], [0, 0, 1]]", |c: &Ctx| {
            let a = c.tower()?.level(3).cocycle.matrix().clone();
            let e = c.e01();
            let ok = a.is_unipotent() && a.get(0, 2).is_zero() && *a.get(0, 1) == e && *a.get(1, 2) == e;
            Ok((ok, format!("(1,3) entry {}", a.get(0, 2))))
        }),
        row("E2 has nilpotency order 1", |c: &Ctx| {
            let r = c.gap_row(2)?;
            Ok((r.order == NilpotencyOrder::Exact(1), format!("order {}", r.order)))
        }),
        row("E2: the nilpotent section is killed by C_σ", |c: &Ctx| {
            let d = block_drop_check(c.tower()?, 2)?;
            Ok((d.holds, String::new()))
        }),
        row("E3 has nilpotency order at least 2", |c: &Ctx| {
            let r = c.gap_row(3)?;
            Ok((r.order.lower_bound() >= 2, format!("order {}", r.order)))
        }),
        row("E3: C_σ maps the section ending in ω to a nonzero multiple of (ω, 0, 0)", |c: &Ctx| {
            let d = block_drop_check(c.tower()?, 3)?;
            Ok((d.holds, format!("multiple {}", d.lambda)))
        }),
        row("nilpotency orders of E1, E2, E3 are 1, 1, 2", |c: &Ctx| {
            let g = c.gap()?;
            let orders: Vec<String> = g[..3].iter().map(|r| r.order.to_string()).collect();
            let ok = g[..3].iter().map(|r| r.order).eq([1, 1, 2].map(NilpotencyOrder::Exact));
            Ok((ok, orders.join(", ")))
        }),
        row("nilpotency orders of E2, E3 unchanged by F_3^× rescaling of the gauge", |c: &Ctx| {
            let t = c.tower()?;
            let minus = -c.k.one();
            let mut ok = true;
            for n in [2, 3] {
                let cocycle = &t.level(n).cocycle;
                let base = nilpotency_order(cocycle, &c.x, 4)?.order;
                ok &= nilpotency_order(&cocycle.rescale_gauge(minus), &c.x, 4)?.order == base;
            }
            Ok((ok, String::new()))
        }),
    ];
    for n in 1..=cfg.tower_depth.max(3) {
        rows.push(row(format!("E{n}: H^1 semisimple part one-dimensional"), move |c: &Ctx| {
            let r = c.gap_row(n)?;
            Ok((r.h1_ss == 1, format!("{}", r.h1_ss)))
        }));
        rows.push(row(format!("E{n}: semisimple part maps to zero in H^1(E{})", n + 1), move |c: &Ctx| {
            let r = c.gap_row(n)?;
            Ok((r.transfer_rank == 0, format!("rank {}", r.transfer_rank)))
        }));
        rows.push(row(format!("E{n}: nilpotency order at least floor((n+1)/2) = {}", n.div_ceil(2)), move |c: &Ctx| {
            let r = c.gap_row(n)?;
            Ok((r.bound_holds, format!("order {}", r.order)))
        }));
    }
    for n in 4..=cfg.tower_depth {
        rows.push(row(format!("E{n}: C_σ moves the section ending in ω down two steps"), move |c: &Ctx| {
            let d = block_drop_check(c.tower()?, n)?;
            Ok((d.holds, format!("multiple {}", d.lambda)))
        }));
    }
    rows.extend([
        row("genus 1, y^2 = x^3 + x: h^1_str(O) = 0", |c: &Ctx| {
            let x = curve_validate(c.k, 1, &unit(c.k, &[1, 0, 1]))?;
            let r = h_str(&crate::cech::BundleCocycle::trivial(&x, 1), &x)?;
            Ok((r.h1_str == 0, format!("{}", r.h1_str)))
        }),
        row("genus 1, y^2 = x^3 + x^2 - x: h^1_str(O) = 1", |c: &Ctx| {
            let x = curve_validate(c.k, 1, &unit(c.k, &[-1, 1, 1]))?;
            let r = h_str(&crate::cech::BundleCocycle::trivial(&x, 1), &x)?;
            Ok((r.h1_str == 1, format!("{}", r.h1_str)))
        }),
        row("every smooth genus-1 curve: h^1_str(O) equals the p-rank", |c: &Ctx| {
            let mut n = 0;
            for idx in 0..27u32 {
                let a: Vec<Fq> = (0..3).map(|i| c.k.from_int(((idx / 3u32.pow(i)) % 3) as i64)).collect();
                let Ok(x) = curve_validate(c.k, 1, &a) else { continue };
                n += 1;
                let r = h_str(&crate::cech::BundleCocycle::trivial(&x, 1), &x)?;
                if r.h1_str != hasse_witt(&x).p_rank {
                    return Ok((false, format!("fails for {:?}", x.int_coeffs())));
                }
            }
            Ok((true, format!("{n} curves")))
        }),
        row("line bundle O(∞ - O) on the example curve: h^1_str = 1", |c: &Ctx| {
            let h = h1_str_weierstrass_line_bundle(&c.x)?;
            Ok((h == 1, format!("{h}")))
        }),
        row("line bundle O(∞ - O): h^1_str = 0 exactly when a3 = 0", |c: &Ctx| {
            let mut zeros = 0;
            for (a, x) in c.smooth() {
                let h = h1_str_weierstrass_line_bundle(x)?;
                zeros += (h == 0) as usize;
                if (h == 0) != a[2].is_zero() {
                    return Ok((false, format!("fails for {:?}", x.int_coeffs())));
                }
            }
            Ok((true, format!("{zeros} smooth curves with vanishing h^1_str")))
        }),
        row("a3 = 0 and smooth forces ordinary", |c: &Ctx| {
            let bad = c.smooth().filter(|(a, _)| a[2].is_zero()).find(|(_, x)| !hasse_witt(x).ordinary);
            Ok((bad.is_none(), String::new()))
        }),
        row("a3 = 0 reduces Δ to a5^3 a1^3 - a4^3 a2^3", |c: &Ctx| {
            let ok = c.points().iter().filter(|pt| pt.a[2].is_zero()).all(|pt| {
                let a = &pt.a;
                genus2_char3_delta(a) == cube(a[4]) * cube(a[0]) - cube(a[3]) * cube(a[1])
            });
            Ok((ok, String::new()))
        }),
        row("leading coefficient factors as (a5^2 a2 + a4^3)(a5^2 a2 + a4^3 - a3 a4 a5)", |c: &Ctx| {
            Ok((c.points().iter().all(|pt| leading_expanded(&pt.a) == leading_factored(&pt.a)), "243 tuples".into()))
        }),
        row("a1 a5 = a2 a4 gives a2^3 (a5^2 a2 + a4^3) = a5^2 (a2^4 + a1^3 a5)", |c: &Ctx| {
            let ok = c.points().iter().filter(|pt| pt.a[0] * pt.a[4] == pt.a[1] * pt.a[3]).all(|pt| {
                let [a1, a2, _, a4, a5] = [pt.a[0], pt.a[1], pt.a[2], pt.a[3], pt.a[4]];
                cube(a2) * (a5 * a5 * a2 + cube(a4)) == a5 * a5 * (a2 * cube(a2) + cube(a1) * a5)
            });
            Ok((ok, String::new()))
        }),
        row("leading coefficient is nonzero on the rank-1 stratum", |c: &Ctx| {
            let ok = c.smooth().filter(|(_, x)| hasse_witt(x).p_rank == 1).all(|(a, _)| !leading_factored(a).is_zero());
            Ok((ok, String::new()))
        }),
        row("E3 on every rank-1 curve: ω1-component of C_σ(section ending in ω) is nonzero", |c: &Ctx| {
            let mut n = 0;
            let mut ext = 0;
            for (_, x) in c.smooth().filter(|(_, x)| hasse_witt(x).p_rank == 1) {
                n += 1;
                let t = Tower::build_with(x, 3, c.cfg.ext_cap)?;
                ext += (t.curve().field().degree() > 1) as usize;
                let d = block_drop_check(&t, 3)?;
                if !d.holds || d.image[0].a.coeff(0).is_zero() {
                    return Ok((false, format!("fails for {:?}", x.int_coeffs())));
                }
            }
            Ok((n > 0, format!("{n} curves, {ext} needing F_9")))
        }),
    ]);
    rows
}

/// Checks that make sense in every characteristic, run on the default
/// curves for `p`.
fn general_rows(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for g in [1, 2] {
        let x = match default_curve(cfg.p, g) {
            Ok(x) => x,
            Err(e) => {
                out.push(Check::errored(format!("genus {g}: default curve"), &e));
                continue;
            }
        };
        let pairing = serre_pairing_matrix(&x).map(|m| !m.determinant().is_zero());
        out.push(match pairing {
            Ok(ok) => Check::new(format!("genus {g}: residue pairing is perfect"), ok, ""),
            Err(e) => Check::errored(format!("genus {g}: residue pairing is perfect"), &e),
        });
        out.push(match adjointness_holds(&x) {
            Ok(ok) => Check::new(format!("genus {g}: <Fe, μ> = <e, Cμ>^p on basis pairs"), ok, ""),
            Err(e) => Check::errored(format!("genus {g}: <Fe, μ> = <e, Cμ>^p on basis pairs"), &e),
        });
    }
    let levels = if cfg.p == 3 { 3 } else { 2 };
    let x = default_curve(cfg.p, 2);
    let tower = x.and_then(|x| Tower::build_with(&x, levels, cfg.ext_cap));
    for n in 1..=levels {
        let id = format!("E{n}: h^1_str agrees via Frobenius and via the dual Cartier map, lim^1 = 0");
        let report = tower.as_ref().map_err(Clone::clone).and_then(|t| h_str(&t.level(n).cocycle, t.curve()));
        out.push(match report {
            Ok(r) => Check::new(
                id,
                r.h1_str == r.h1_str_dual && r.limits.lim1 == 0,
                format!("h^1_str = {}", r.h1_str),
            ),
            Err(e) => Check::errored(id, &e),
        });
    }
    out
}

fn skipped_rows() -> Vec<Check> {
    vec![
        Check::with_status(
            "E3 degenerate case with the first basis form set to zero",
            Status::Skipped,
            "open question: which datum is set to zero is ambiguous, since the basis form is fixed",
        ),
        Check::with_status(
            "exact value of the nonzero constant in the E3 computation",
            Status::Skipped,
            "open question: the constant is never pinned down; only its nonvanishing is checked",
        ),
    ]
}

/// Every worked-example check as one row each. Characteristic-3 rows are
/// reported as not applicable for other `p`.
pub fn appendix_suite(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = general_rows(cfg);
    let rows = char3_rows(cfg);
    if cfg.p != 3 {
        out.extend(rows.into_iter().map(|r| Check::with_status(r.id, Status::NotApplicable, "characteristic 3 only")));
    } else {
        match Ctx::new(*cfg) {
            Ok(ctx) => out.extend(rows.into_iter().map(|r| match (r.run)(&ctx) {
                Ok((ok, detail)) => Check::new(r.id, ok, detail),
                Err(e) => Check::errored(r.id, &e),
            })),
            Err(e) => out.extend(rows.into_iter().map(|r| Check::errored(r.id, &e))),
        }
    }
    out.extend(skipped_rows());
    out
}
