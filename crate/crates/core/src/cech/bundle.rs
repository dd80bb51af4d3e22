use std::collections::HashMap;

use serde::Serialize;

use super::fnmatrix::{as_unit, FnMatrix, FnVector};
use crate::algebra::{Embedding, Field, Fq, LaurentPoly, Matrix};
use crate::curve::{Chart, ChartFunction, CurveModel};
use crate::error::{Error, Result};

/// Chartwise witness of `F^* E ≅ E`: `g0 A^(p) = A g1` with `g0`, `g1`
/// invertible over `O(U0)`, `O(U1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gauge {
    pub g0: FnMatrix,
    pub g1: FnMatrix,
}

/// A vector bundle on the two-chart cover, given by its transition matrix.
///
/// Sections are pairs `(s0, s1)` with `s0 = A s1`; 1-cocycles are vectors
/// over the overlap, modulo `h0 - A h1`.
#[derive(Clone, Debug)]
pub struct BundleCocycle {
    a: FnMatrix,
    a_inv: FnMatrix,
    det_degree: i64,
    gauge: Option<Gauge>,
}

impl BundleCocycle {
    pub fn new(a: FnMatrix, curve: &CurveModel) -> Result<Self> {
        let det = a.determinant(curve);
        let (_, det_degree) = as_unit(&det).ok_or(Error::NotInvertible)?;
        let a_inv = a.inverse(curve)?;
        Ok(BundleCocycle { a, a_inv, det_degree, gauge: None })
    }

    /// The trivial bundle of rank `n`, with the identity gauge.
    pub fn trivial(curve: &CurveModel, n: usize) -> Self {
        let id = FnMatrix::identity(curve.field(), n);
        BundleCocycle {
            a: id.clone(),
            a_inv: id.clone(),
            det_degree: 0,
            gauge: Some(Gauge { g0: id.clone(), g1: id }),
        }
    }

    /// Attach a gauge after checking it exactly.
    pub fn with_gauge(mut self, gauge: Gauge, curve: &CurveModel) -> Result<Self> {
        self.check_gauge(&gauge, curve)?;
        self.gauge = Some(gauge);
        Ok(self)
    }

    pub fn check_gauge(&self, gauge: &Gauge, curve: &CurveModel) -> Result<()> {
        let g = curve.genus();
        let n = self.rank();
        if gauge.g0.size() != n || gauge.g1.size() != n {
            return Err(Error::GaugeInvalid("gauge has the wrong size".into()));
        }
        if !gauge.g0.in_chart(Chart::U0, g) || !gauge.g1.in_chart(Chart::U1, g) {
            return Err(Error::GaugeInvalid("gauge entries are not chart-regular".into()));
        }
        let lhs = gauge.g0.mul(&self.a.frobenius(curve), curve);
        let rhs = self.a.mul(&gauge.g1, curve);
        if lhs != rhs {
            return Err(Error::GaugeInvalid("g0 A^(p) != A g1".into()));
        }
        let inv0 = gauge.g0.inverse(curve).map_err(|_| Error::GaugeInvalid("g0 is not invertible".into()))?;
        let inv1 = gauge.g1.inverse(curve).map_err(|_| Error::GaugeInvalid("g1 is not invertible".into()))?;
        if !inv0.in_chart(Chart::U0, g) || !inv1.in_chart(Chart::U1, g) {
            return Err(Error::GaugeInvalid("gauge inverse is not chart-regular".into()));
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.a.size()
    }

    pub fn field(&self) -> Field {
        self.a.field()
    }

    pub fn matrix(&self) -> &FnMatrix {
        &self.a
    }

    pub fn inverse_matrix(&self) -> &FnMatrix {
        &self.a_inv
    }

    /// `k` with `det A = c x^k`; the bundle has degree `2k`.
    pub fn det_degree(&self) -> i64 {
        self.det_degree
    }

    pub fn gauge(&self) -> Option<&Gauge> {
        self.gauge.as_ref()
    }

    pub fn require_gauge(&self) -> Result<&Gauge> {
        self.gauge.as_ref().ok_or(Error::GaugeMissing)
    }

    /// Dual bundle: cocycle `A^(-T)`, gauge `(g0^(-T), g1^(-T))`.
    pub fn dual(&self, curve: &CurveModel) -> Result<Self> {
        let gauge = match &self.gauge {
            Some(Gauge { g0, g1 }) => Some(Gauge {
                g0: g0.inverse(curve)?.transpose(),
                g1: g1.inverse(curve)?.transpose(),
            }),
            None => None,
        };
        Ok(BundleCocycle {
            a: self.a_inv.transpose(),
            a_inv: self.a.transpose(),
            det_degree: -self.det_degree,
            gauge,
        })
    }

    /// `F^* E`: cocycle `A^(p)`, gauge `(g0^(p), g1^(p))`.
    pub fn frobenius_pullback(&self, curve: &CurveModel) -> Self {
        BundleCocycle {
            a: self.a.frobenius(curve),
            a_inv: self.a_inv.frobenius(curve),
            det_degree: self.det_degree * curve.p() as i64,
            gauge: self.gauge.as_ref().map(|g| Gauge { g0: g.g0.frobenius(curve), g1: g.g1.frobenius(curve) }),
        }
    }

    /// Replace the gauge by `(c g0, c g1)`; still a gauge for any scalar `c != 0`.
    pub fn rescale_gauge(&self, c: Fq) -> Self {
        let mut out = self.clone();
        if let Some(g) = &mut out.gauge {
            g.g0 = g.g0.scale(c);
            g.g1 = g.g1.scale(c);
        }
        out
    }

    pub fn map_field(&self, emb: &Embedding) -> Self {
        BundleCocycle {
            a: self.a.map_field(emb),
            a_inv: self.a_inv.map_field(emb),
            det_degree: self.det_degree,
            gauge: self.gauge.as_ref().map(|g| Gauge { g0: g.g0.map_field(emb), g1: g.g1.map_field(emb) }),
        }
    }
}

// ---------------------------------------------------------------------------
// Monomial windows
// ---------------------------------------------------------------------------

/// `x^exp e_comp` or `y x^exp e_comp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub comp: usize,
    pub y: bool,
    pub exp: i64,
}

impl Monomial {
    /// Order of vanishing at `O` (`ord x = 2`, `ord y = 1`).
    fn ord_o(&self) -> i64 {
        2 * self.exp + self.y as i64
    }

    fn function(&self, c: Fq) -> ChartFunction {
        if self.y {
            ChartFunction::y_x_pow(c, self.exp)
        } else {
            ChartFunction::x_pow(c, self.exp)
        }
    }

    pub fn vector(&self, field: Field, n: usize) -> FnVector {
        let mut v = vec![ChartFunction::zero(field); n];
        v[self.comp] = self.function(field.one());
        v
    }
}

fn terms_of(v: &[ChartFunction]) -> impl Iterator<Item = (Monomial, Fq)> + '_ {
    v.iter().enumerate().flat_map(|(comp, u)| {
        let a = u.a.terms().map(move |(exp, c)| (Monomial { comp, y: false, exp }, c));
        let b = u.b.terms().map(move |(exp, c)| (Monomial { comp, y: true, exp }, c));
        a.chain(b)
    })
}

fn from_terms(field: Field, n: usize, terms: impl IntoIterator<Item = (Monomial, Fq)>) -> FnVector {
    let mut a: Vec<Vec<(i64, Fq)>> = vec![Vec::new(); n];
    let mut b: Vec<Vec<(i64, Fq)>> = vec![Vec::new(); n];
    for (m, c) in terms {
        let side = if m.y { &mut b } else { &mut a };
        side[m.comp].push((m.exp, c));
    }
    a.into_iter()
        .zip(b)
        .map(|(ta, tb)| ChartFunction::new(LaurentPoly::from_terms(field, ta), LaurentPoly::from_terms(field, tb)))
        .collect()
}

fn vec_add(a: &[ChartFunction], b: &[ChartFunction]) -> FnVector {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn vec_sub(a: &[ChartFunction], b: &[ChartFunction]) -> FnVector {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

fn combine(field: Field, n: usize, coeffs: &[Fq], vectors: &[FnVector]) -> FnVector {
    let mut out = vec![ChartFunction::zero(field); n];
    for (c, v) in coeffs.iter().zip(vectors) {
        if c.is_zero() {
            continue;
        }
        for (o, u) in out.iter_mut().zip(v) {
            *o = o.add(&u.scale(*c));
        }
    }
    out
}

fn max_u1_excess(m: &FnMatrix, genus: usize) -> i64 {
    m.entries().filter_map(|u| u.u1_excess(genus)).max().unwrap_or(0)
}

// ---------------------------------------------------------------------------
// H^1(E)
// ---------------------------------------------------------------------------

/// A class in `H^1(X, E)`, in the coordinates of a [`H1Bundle`] basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CohClassE {
    pub coords: Vec<Fq>,
}

/// `H^1(X, E)` as an explicit quotient of a finite window.
///
/// With `N` large enough that `x^(-N) O(U1)^n ⊂ A O(U1)^n`, the overlap ring
/// splits as `O(U0) ⊕ Q ⊕ x^(-N) O(U1)` per component, and the cohomology is
/// `Q^n` modulo the projections of finitely many `A b`, `b ∈ O(U1)^n`.
#[derive(Clone, Debug)]
pub struct H1Bundle {
    curve: CurveModel,
    cocycle: BundleCocycle,
    cut: i64,
    gens: Vec<FnVector>,
    cols: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    rref: Matrix,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl H1Bundle {
    fn with_cut(cocycle: &BundleCocycle, curve: &CurveModel, cut: i64) -> Self {
        let g = curve.genus() as i64;
        let n = cocycle.rank();
        let field = curve.field();
        let m = cut + max_u1_excess(cocycle.matrix(), curve.genus()).max(0);
        let mut cols: Vec<Monomial> = Vec::new();
        for comp in 0..n {
            cols.extend((1..cut).map(|k| Monomial { comp, y: false, exp: -k }));
            cols.extend((1..cut + g + 1).map(|k| Monomial { comp, y: true, exp: -k }));
        }
        // Most polar first, so pivots absorb deep poles and the basis sits near zero.
        cols.sort_by_key(|m| (m.ord_o(), m.comp));
        let index: HashMap<Monomial, usize> = cols.iter().enumerate().map(|(i, &m)| (m, i)).collect();

        let mut gens = Vec::new();
        for comp in 0..n {
            gens.extend((0..m).map(|k| Monomial { comp, y: false, exp: -k }.vector(field, n)));
            gens.extend((g + 1..m + g + 1).map(|k| Monomial { comp, y: true, exp: -k }.vector(field, n)));
        }
        let rows: Vec<Vec<Fq>> = gens
            .iter()
            .map(|b| project(&index, cols.len(), field, &cocycle.matrix().apply(b, curve)))
            .collect();
        let mat = if rows.is_empty() { Matrix::zeros(field, 0, cols.len()) } else { Matrix::from_rows(field, rows) };
        let e = mat.echelon();
        let rank = e.pivots.len();
        let rref = Matrix::from_rows(field, (0..rank).map(|r| e.rref.row(r).to_vec()).collect::<Vec<_>>());
        let rref = if rank == 0 { Matrix::zeros(field, 0, cols.len()) } else { rref };
        let free = (0..cols.len()).filter(|c| !e.pivots.contains(c)).collect();
        H1Bundle {
            curve: curve.clone(),
            cocycle: cocycle.clone(),
            cut,
            gens,
            cols,
            index,
            rref,
            pivots: e.pivots,
            free,
        }
    }

    /// Compute `H^1(X, E)`; the window is enlarged twice to confirm the
    /// dimension is stable.
    pub fn new(cocycle: &BundleCocycle, curve: &CurveModel) -> Result<Self> {
        let g = curve.genus() as i64;
        let cut = max_u1_excess(cocycle.inverse_matrix(), curve.genus()).max(1);
        let base = Self::with_cut(cocycle, curve, cut);
        for step in 1..=2 {
            let wider = Self::with_cut(cocycle, curve, cut + step * (g + 1)).dim();
            if wider != base.dim() {
                return Err(unstable("H^1(E)", base.dim(), wider));
            }
        }
        Ok(base)
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    pub fn cocycle(&self) -> &BundleCocycle {
        &self.cocycle
    }

    /// Basis monomials of the quotient.
    pub fn basis_monomials(&self) -> Vec<Monomial> {
        self.free.iter().map(|&c| self.cols[c]).collect()
    }

    /// Representative cocycle of the `i`-th basis class.
    pub fn basis_vector(&self, i: usize) -> FnVector {
        self.cols[self.free[i]].vector(self.curve.field(), self.cocycle.rank())
    }

    /// Representative of a class given by coordinates.
    pub fn representative(&self, c: &CohClassE) -> FnVector {
        let field = self.curve.field();
        let n = self.cocycle.rank();
        from_terms(field, n, self.free.iter().zip(&c.coords).map(|(&col, &v)| (self.cols[col], v)).filter(|(_, v)| !v.is_zero()))
    }

    fn reduce_q(&self, mut q: Vec<Fq>) -> Vec<Fq> {
        for (r, &pc) in self.pivots.iter().enumerate() {
            let c = q[pc];
            if c.is_zero() {
                continue;
            }
            for (j, v) in self.rref.row(r).iter().enumerate().skip(pc) {
                if !v.is_zero() {
                    q[j] -= c * *v;
                }
            }
        }
        q
    }

    /// Coordinates of the class of `r`.
    pub fn class_of(&self, r: &[ChartFunction]) -> CohClassE {
        let q = project(&self.index, self.cols.len(), self.curve.field(), r);
        let q = self.reduce_q(q);
        CohClassE { coords: self.free.iter().map(|&c| q[c]).collect() }
    }

    /// `(h0, h1)` with `r = h0 - A h1`, `h0` regular on `U0` and `h1` on
    /// `U1`, if `r` is a coboundary.
    pub fn coboundary_witness(&self, r: &[ChartFunction]) -> Option<(FnVector, FnVector)> {
        let curve = &self.curve;
        let field = curve.field();
        let n = self.cocycle.rank();
        if self.class_of(r).coords.iter().any(|c| !c.is_zero()) {
            return None;
        }
        let q = project(&self.index, self.cols.len(), field, r);
        let images: Vec<FnVector> = self.gens.iter().map(|b| self.cocycle.matrix().apply(b, curve)).collect();
        let cols: Vec<Vec<Fq>> = images.iter().map(|v| project(&self.index, self.cols.len(), field, v)).collect();
        let lambda = if cols.is_empty() {
            Vec::new()
        } else {
            Matrix::from_cols(field, self.cols.len(), &cols).solve(&q)?
        };
        let w = combine(field, n, &lambda, &self.gens);
        let t = vec_sub(r, &self.cocycle.matrix().apply(&w, curve));
        let g = curve.genus();
        let u0: FnVector = t.iter().map(|u| super::h1o::split(u, curve).0).collect();
        let s = vec_sub(&t, &u0);
        let s_pull = self.cocycle.inverse_matrix().apply(&s, curve);
        let h1: FnVector = vec_add(&w, &s_pull).iter().map(ChartFunction::neg).collect();
        debug_assert!(h1.iter().all(|u| u.in_chart(Chart::U1, g)), "witness escaped U1");
        debug_assert!(self.cut >= 1);
        Some((u0, h1))
    }

    /// Matrix (in the quotient basis) of the `p`-linear Frobenius
    /// `[c] -> [g0 c^(p)]`.
    pub fn frobenius_matrix(&self) -> Result<Matrix> {
        let gauge = self.cocycle.require_gauge()?;
        let curve = &self.curve;
        let cols: Vec<Vec<Fq>> = (0..self.dim())
            .map(|i| {
                let c: FnVector = self.basis_vector(i).iter().map(|u| u.frobenius(curve)).collect();
                self.class_of(&gauge.g0.apply(&c, curve)).coords
            })
            .collect();
        Ok(Matrix::from_cols(curve.field(), self.dim(), &cols))
    }
}

fn unstable(what: &str, before: usize, after: usize) -> Error {
    Error::WindowNotStabilized(format!("{what}: dimension {before} became {after} on a wider window"))
}

fn project(index: &HashMap<Monomial, usize>, len: usize, field: Field, v: &[ChartFunction]) -> Vec<Fq> {
    let mut q = vec![field.zero(); len];
    for (m, c) in terms_of(v) {
        if let Some(&i) = index.get(&m) {
            q[i] += c;
        }
    }
    q
}

/// Basis of `H^1(X, E)` (window-solved); see [`H1Bundle`].
pub fn h1_bundle_basis(cocycle: &BundleCocycle, curve: &CurveModel) -> Result<H1Bundle> {
    let h1 = H1Bundle::new(cocycle, curve)?;
    let h0 = h0_bundle(cocycle, curve)?;
    let n = cocycle.rank() as i64;
    let g = curve.genus() as i64;
    let chi = n * (1 - g) + 2 * cocycle.det_degree();
    if h0.len() as i64 - h1.dim() as i64 != chi {
        return Err(Error::Consistency(format!(
            "Riemann-Roch gate: h0 = {}, h1 = {}, expected h0 - h1 = {chi}",
            h0.len(),
            h1.dim()
        )));
    }
    Ok(h1)
}

// ---------------------------------------------------------------------------
// Global sections
// ---------------------------------------------------------------------------

/// Kernel of a linear condition on a finite family of monomial vectors:
/// combinations whose image has no coefficient on a "forbidden" monomial.
fn solve_sections(
    field: Field,
    n: usize,
    unknowns: &[Monomial],
    image: impl Fn(&Monomial) -> FnVector,
    forbidden: impl Fn(&Monomial) -> bool,
) -> Vec<FnVector> {
    let mut rows: HashMap<Monomial, usize> = HashMap::new();
    let mut entries: Vec<(usize, usize, Fq)> = Vec::new();
    for (j, m) in unknowns.iter().enumerate() {
        for (t, c) in terms_of(&image(m)) {
            if forbidden(&t) {
                let next = rows.len();
                let r = *rows.entry(t).or_insert(next);
                entries.push((r, j, c));
            }
        }
    }
    let mut mat = Matrix::zeros(field, rows.len().max(1), unknowns.len());
    for (r, j, c) in entries {
        mat[(r, j)] += c;
    }
    let basis: Vec<FnVector> = mat
        .kernel()
        .into_iter()
        .map(|k| from_terms(field, n, unknowns.iter().zip(k).filter(|(_, c)| !c.is_zero()).map(|(m, c)| (*m, c))))
        .collect();
    basis
}

/// Window `H^0(X, E)` with `s1` poles bounded by `depth`.
fn h0_window(cocycle: &BundleCocycle, curve: &CurveModel, depth: i64) -> Vec<FnVector> {
    let g = curve.genus() as i64;
    let n = cocycle.rank();
    let mut unknowns = Vec::new();
    for comp in 0..n {
        unknowns.extend((0..=depth).map(|k| Monomial { comp, y: false, exp: -k }));
        unknowns.extend((g + 1..=depth.max(g + 1)).map(|k| Monomial { comp, y: true, exp: -k }));
    }
    let field = curve.field();
    solve_sections(
        field,
        n,
        &unknowns,
        |m| cocycle.matrix().apply(&m.vector(field, n), curve),
        |t| t.exp < 0,
    )
}

/// Global sections of `E`, as the `U1` components `s1` (with `s0 = A s1`).
pub fn h0_bundle(cocycle: &BundleCocycle, curve: &CurveModel) -> Result<Vec<FnVector>> {
    let g = curve.genus() as i64;
    let lowest = cocycle.inverse_matrix().entries().filter_map(ChartFunction::min_exp).min().unwrap_or(0).min(0);
    let depth = -lowest + g + 1;
    let base = h0_window(cocycle, curve, depth);
    for step in 1..=2 {
        let wider = h0_window(cocycle, curve, depth + step * (g + 1)).len();
        if wider != base.len() {
            return Err(unstable("H^0(E)", base.len(), wider));
        }
    }
    Ok(base)
}

/// Window `H^0(X, Ω ⊗ E)` with coefficient exponents up to `top`.
fn omega_window(cocycle: &BundleCocycle, curve: &CurveModel, top: i64) -> Vec<FnVector> {
    let g = curve.genus() as i64;
    let n = cocycle.rank();
    let field = curve.field();
    let mut unknowns = Vec::new();
    for comp in 0..n {
        unknowns.extend((0..=top).map(|k| Monomial { comp, y: false, exp: k }));
        unknowns.extend((0..=top).map(|k| Monomial { comp, y: true, exp: k }));
    }
    solve_sections(
        field,
        n,
        &unknowns,
        |m| {
            let v = cocycle.inverse_matrix().apply(&m.vector(field, n), curve);
            v.iter().map(|u| u.shift(1 - g)).collect()
        },
        |t| if t.y { t.exp > -(g + 1) } else { t.exp > 0 },
    )
}

/// Global sections of `Ω ⊗ E` as coefficient vectors `h` (the section is
/// `h dx/y` on `U0` and `A^(-1) h dx/y` on `U1`).
pub fn h0_omega_bundle(cocycle: &BundleCocycle, curve: &CurveModel) -> Result<Vec<FnVector>> {
    let g = curve.genus() as i64;
    let top = cocycle
        .matrix()
        .entries()
        .map(|u| {
            let a = u.a.max_exp().map_or(0, |e| e + g - 1);
            let b = u.b.max_exp().map_or(0, |e| e + 2 * g - 1);
            a.max(b)
        })
        .max()
        .unwrap_or(0)
        .max(g - 1);
    let base = omega_window(cocycle, curve, top);
    for step in 1..=2 {
        let wider = omega_window(cocycle, curve, top + step * (g + 1)).len();
        if wider != base.len() {
            return Err(unstable("H^0(Ω⊗E)", base.len(), wider));
        }
    }
    Ok(base)
}

/// Whether `h` defines a global section of `Ω ⊗ E`.
pub fn is_omega_section(h: &[ChartFunction], cocycle: &BundleCocycle, curve: &CurveModel) -> bool {
    let g = curve.genus();
    let gi = g as i64;
    h.iter().all(|u| u.in_chart(Chart::U0, g))
        && cocycle
            .inverse_matrix()
            .apply(h, curve)
            .iter()
            .all(|u| u.shift(1 - gi).in_chart(Chart::U1, g))
}

/// Coordinates of `v` in the span of `basis`, if it lies there.
pub fn coordinates_in(field: Field, basis: &[FnVector], v: &[ChartFunction]) -> Option<Vec<Fq>> {
    let mut index: HashMap<Monomial, usize> = HashMap::new();
    for b in basis.iter().chain(std::iter::once(&v.to_vec())) {
        for (m, _) in terms_of(b) {
            let next = index.len();
            index.entry(m).or_insert(next);
        }
    }
    if basis.is_empty() {
        return if v.iter().all(ChartFunction::is_zero) { Some(Vec::new()) } else { None };
    }
    let cols: Vec<Vec<Fq>> = basis.iter().map(|b| project(&index, index.len(), field, b)).collect();
    let target = project(&index, index.len(), field, v);
    Matrix::from_cols(field, index.len().max(1), &pad(cols, index.len().max(1), field)).solve(&pad1(target, index.len().max(1), field))
}

fn pad(cols: Vec<Vec<Fq>>, len: usize, field: Field) -> Vec<Vec<Fq>> {
    cols.into_iter().map(|c| pad1(c, len, field)).collect()
}

fn pad1(mut c: Vec<Fq>, len: usize, field: Field) -> Vec<Fq> {
    c.resize(len, field.zero());
    c
}

pub fn fnvec_combine(field: Field, n: usize, coeffs: &[Fq], vectors: &[FnVector]) -> FnVector {
    combine(field, n, coeffs, vectors)
}
