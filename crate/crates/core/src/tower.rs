//! The tower `E_1 ⊂ E_2 ⊂ ...` of Frobenius-invariant unipotent bundles,
//! each an extension of `E_n` by `O` along a Frobenius-fixed class.

use serde::Serialize;

use crate::algebra::{Embedding, Field, Fq, Matrix};
use crate::cech::{
    frobenius_matrix_h1_o, h1_bundle_basis, BundleCocycle, CohClassE, FnMatrix, FnVector, Gauge, H1Bundle,
};
use crate::curve::{ChartFunction, CurveModel};
use crate::error::{Error, Result};
use crate::semilinear::{first_fixed_space, fitting, fixed_space, FixedSpace, SemilinearOp, DEFAULT_MAX_EXT};

/// Cap on the tower depth.
pub const MAX_TOWER_DEPTH: usize = 16;

/// A Frobenius-fixed class of `H^1(X, O)`.
#[derive(Clone, Debug, Serialize)]
pub struct FixedCocycle {
    /// Coordinates `(a, b)` on `(y/x^2, y/x)` (`(b_g, ..., b_1)` in general).
    pub coords: Vec<Fq>,
    /// Degree over F_p of the field the coordinates live in.
    pub degree: usize,
}

/// Deterministic nonzero representative of a fixed space: the
/// lexicographically smallest nonzero F_p-combination of the basis.
fn first_fixed_vector(fs: &FixedSpace) -> Option<Vec<Fq>> {
    let p = fs.field.characteristic() as u64;
    let d = fs.basis.len();
    if d == 0 {
        return None;
    }
    let n = fs.basis[0].len();
    let total = (p as u128).pow(d as u32);
    let key = |v: &[Fq]| v.iter().map(Fq::index).collect::<Vec<_>>();
    let mut best: Option<Vec<Fq>> = None;
    // F_p-dimensions here are tiny (at most g), so enumeration is cheap.
    for idx in 1..total.min(1 << 16) {
        let mut rest = idx;
        let mut v = vec![fs.field.zero(); n];
        for b in &fs.basis {
            let c = fs.field.from_int((rest % p as u128) as i64);
            rest /= p as u128;
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += c * *bi;
            }
        }
        if best.as_ref().is_none_or(|bv| key(&v) < key(bv)) {
            best = Some(v);
        }
    }
    best
}

/// The saturated fixed space when the cap reaches it, otherwise the fixed
/// vectors of the smallest extension that has any.
fn fixed_vectors(op: &SemilinearOp, max_ext: usize) -> Result<FixedSpace> {
    match fixed_space(op, max_ext) {
        Err(Error::FixedSpaceNotSaturated { found, .. }) if found > 0 => first_fixed_space(op, max_ext),
        other => other,
    }
}

/// A nonzero Frobenius-fixed class in `H^1(X, O)`.
pub fn solve_fixed_cocycle(curve: &CurveModel) -> Result<FixedCocycle> {
    let op = SemilinearOp::new(frobenius_matrix_h1_o(curve), 1);
    if fitting(&op).ss_rank == 0 {
        return Err(Error::NoFixedClass("Frobenius on H^1(X, O) is nilpotent".into()));
    }
    let fs = fixed_vectors(&op, DEFAULT_MAX_EXT)?;
    let coords = first_fixed_vector(&fs).ok_or_else(|| Error::NoFixedClass("Frobenius on H^1(X, O) is nilpotent".into()))?;
    Ok(FixedCocycle { coords, degree: fs.degree })
}

/// One level of the tower.
#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub n: usize,
    pub cocycle: BundleCocycle,
    /// Cocycle of the fixed class this level was built from (`None` for `E_1`).
    pub extension_class: Option<FnVector>,
}

/// Frobenius-fixed class data for a level.
#[derive(Clone, Debug)]
pub struct FixedClassReport {
    pub ss_dim: usize,
    pub class: CohClassE,
    pub representative: FnVector,
    /// Degree over F_p needed to see a fixed vector.
    pub degree: usize,
}

/// The `p`-linear Frobenius on `H^1(X, E)` of a gauged bundle.
pub fn frobenius_on_h1(h1: &H1Bundle) -> Result<SemilinearOp> {
    Ok(SemilinearOp::new(h1.frobenius_matrix()?, 1))
}

/// A fixed class in `H^1(E_n)` together with the dimension of the
/// semisimple part.
pub fn fixed_class_in_h1(level: &TowerLevel, curve: &CurveModel) -> Result<FixedClassReport> {
    let h1 = h1_bundle_basis(&level.cocycle, curve)?;
    fixed_class_of(&h1, DEFAULT_MAX_EXT)
}

fn fixed_class_of(h1: &H1Bundle, max_ext: usize) -> Result<FixedClassReport> {
    let op = frobenius_on_h1(h1)?;
    let ss_dim = fitting(&op).ss_rank;
    if ss_dim == 0 {
        return Err(Error::NoFixedClass("Frobenius on H^1(E) is nilpotent".into()));
    }
    let fs = fixed_vectors(&op, max_ext)?;
    let coords = first_fixed_vector(&fs).ok_or_else(|| Error::NoFixedClass("empty fixed space".into()))?;
    let class = CohClassE { coords };
    let representative = if fs.field == h1.curve().field() { h1.representative(&class) } else { Vec::new() };
    Ok(FixedClassReport { ss_dim, class, representative, degree: fs.degree })
}

/// Extend by a Frobenius-fixed cocycle `c`: `A' = [[A, c], [0, 1]]` with
/// gauge `[[g0, -h0], [0, 1]]`, `[[g1, -h1], [0, 1]]` where
/// `g0 c^(p) - c = h0 - A h1`.
pub fn extend(level: &TowerLevel, c: &[ChartFunction], curve: &CurveModel) -> Result<TowerLevel> {
    let h1 = H1Bundle::new(&level.cocycle, curve)?;
    extend_with(level, &h1, c, curve)
}

fn extend_with(level: &TowerLevel, h1: &H1Bundle, c: &[ChartFunction], curve: &CurveModel) -> Result<TowerLevel> {
    let gauge = level.cocycle.require_gauge()?;
    let cp: FnVector = c.iter().map(|u| u.frobenius(curve)).collect();
    let diff: FnVector = gauge.g0.apply(&cp, curve).iter().zip(c).map(|(a, b)| a.sub(b)).collect();
    let (h0, h1w) = h1.coboundary_witness(&diff).ok_or(Error::ClassNotFixed)?;
    let a = level.cocycle.matrix().extend_with_column(c);
    let neg = |v: &FnVector| v.iter().map(ChartFunction::neg).collect::<Vec<_>>();
    let g0 = gauge.g0.extend_with_column(&neg(&h0));
    let g1 = gauge.g1.extend_with_column(&neg(&h1w));
    let cocycle = BundleCocycle::new(a, curve)?
        .with_gauge(Gauge { g0, g1 }, curve)
        .map_err(|e| Error::GaugeUnsolvable(format!("extension gauge rejected: {e}")))?;
    Ok(TowerLevel { n: level.n + 1, cocycle, extension_class: Some(c.to_vec()) })
}

/// Gauge of a unipotent cocycle, solved column by column: the top-left
/// block is gauged recursively, then the last column must be a fixed class
/// of the smaller bundle and its coboundary witness fills the new column.
pub fn solve_gauge(a: &FnMatrix, curve: &CurveModel) -> Result<Gauge> {
    if !a.is_unipotent() {
        return Err(Error::GaugeUnsolvable("cocycle is not unipotent".into()));
    }
    let n = a.size();
    let k = curve.field();
    let mut level = TowerLevel { n: 1, cocycle: BundleCocycle::trivial(curve, 1), extension_class: None };
    for size in 2..=n {
        let col: FnVector = (0..size - 1).map(|i| a.get(i, size - 1).clone()).collect();
        let h1 = H1Bundle::new(&level.cocycle, curve)?;
        level = extend_with(&level, &h1, &col, curve).map_err(|e| match e {
            Error::ClassNotFixed => Error::GaugeUnsolvable(format!("column {size} is not a Frobenius-fixed class")),
            other => other,
        })?;
    }
    if n == 0 {
        return Ok(Gauge { g0: FnMatrix::identity(k, 0), g1: FnMatrix::identity(k, 0) });
    }
    Ok(level.cocycle.gauge().cloned().expect("levels carry gauges"))
}

/// The tower over a (possibly extended) base field.
#[derive(Clone, Debug)]
pub struct Tower {
    curve: CurveModel,
    levels: Vec<TowerLevel>,
    max_ext: usize,
}

impl Tower {
    /// The tower up to rank `depth`.
    pub fn build(curve: &CurveModel, depth: usize) -> Result<Tower> {
        Self::build_with(curve, depth, DEFAULT_MAX_EXT)
    }

    /// As [`Tower::build`], trying field extensions of degree up to `max_ext`
    /// times the base degree when looking for fixed classes.
    pub fn build_with(curve: &CurveModel, depth: usize, max_ext: usize) -> Result<Tower> {
        if depth == 0 || depth > MAX_TOWER_DEPTH {
            return Err(Error::Config(format!("tower depth must be in 1..={MAX_TOWER_DEPTH}, got {depth}")));
        }
        let mut tower = Tower {
            curve: curve.clone(),
            levels: vec![TowerLevel { n: 1, cocycle: BundleCocycle::trivial(curve, 1), extension_class: None }],
            max_ext,
        };
        while tower.levels.len() < depth {
            tower.grow()?;
        }
        Ok(tower)
    }

    fn grow(&mut self) -> Result<()> {
        let top = self.levels.last().unwrap().clone();
        let h1 = h1_bundle_basis(&top.cocycle, &self.curve)?;
        let mut report = fixed_class_of(&h1, self.max_ext)?;
        if report.degree > self.curve.field().degree() {
            self.embed_into(Field::new(self.curve.p(), report.degree)?)?;
            return self.grow();
        }
        if report.representative.is_empty() {
            report.representative = h1.representative(&report.class);
        }
        let next = extend_with(&top, &h1, &report.representative, &self.curve)?;
        self.levels.push(next);
        Ok(())
    }

    fn embed_into(&mut self, field: Field) -> Result<()> {
        let emb = Embedding::new(self.curve.field(), field)
            .ok_or_else(|| Error::Consistency("extension field does not contain the base field".into()))?;
        self.curve = self.curve.embed(&emb);
        for lvl in &mut self.levels {
            lvl.cocycle = lvl.cocycle.map_field(&emb);
            lvl.extension_class = lvl.extension_class.as_ref().map(|c| c.iter().map(|u| u.map_field(&emb)).collect());
        }
        Ok(())
    }

    /// The curve over the field the tower was finally built in.
    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &TowerLevel {
        &self.levels[n - 1]
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Matrix of the map `H^1(E_n) -> H^1(E_(n+1))` induced by the inclusion
/// into the first `n` coordinates.
pub fn inclusion_on_h1(small: &H1Bundle, big: &H1Bundle) -> Matrix {
    let k = small.curve().field();
    let extra = big.cocycle().rank() - small.cocycle().rank();
    let cols: Vec<Vec<Fq>> = (0..small.dim())
        .map(|i| {
            let mut v = small.basis_vector(i);
            v.extend((0..extra).map(|_| ChartFunction::zero(k)));
            big.class_of(&v).coords
        })
        .collect();
    Matrix::from_cols(k, big.dim(), &cols)
}

/// Matrix of `H^1(E) -> H^1(E_q)` induced by projecting onto the last
/// `rank(E_q)` coordinates (`E_q` the quotient bundle).
pub fn projection_on_h1(big: &H1Bundle, quotient: &H1Bundle) -> Matrix {
    let k = big.curve().field();
    let skip = big.cocycle().rank() - quotient.cocycle().rank();
    let cols: Vec<Vec<Fq>> = (0..big.dim())
        .map(|i| quotient.class_of(&big.basis_vector(i)[skip..]).coords)
        .collect();
    Matrix::from_cols(k, quotient.dim(), &cols)
}

/// Bottom-right `m x m` block of a unipotent cocycle, the transition matrix
/// of the quotient bundle.
pub fn quotient_cocycle(a: &FnMatrix, m: usize, curve: &CurveModel) -> Result<BundleCocycle> {
    let n = a.size();
    let rows = (n - m..n).map(|i| (n - m..n).map(|j| a.get(i, j).clone()).collect()).collect();
    BundleCocycle::new(FnMatrix::from_rows(a.field(), rows), curve)
}

/// Rank of the semisimple part of `H^1(E_n)` mapped into `H^1(E_(n+1))`.
pub fn ss_transfer_rank(small: &H1Bundle, big: &H1Bundle) -> Result<usize> {
    let fit = fitting(&frobenius_on_h1(small)?);
    let inc = inclusion_on_h1(small, big);
    let k = small.curve().field();
    if fit.ss_basis.is_empty() {
        return Ok(0);
    }
    let images: Vec<Vec<Fq>> = fit.ss_basis.iter().map(|v| inc.mul_vec(v)).collect();
    Ok(Matrix::from_cols(k, big.dim(), &images).rank())
}

/// Outcome of the "drop by two" check on `C_σ` for one level.
#[derive(Clone, Debug, Serialize)]
pub struct BlockDrop {
    pub n: usize,
    /// `C_σ(s) = λ (0, ..., ω, 0, 0)`, with `ω` in component `n - 2`.
    pub lambda: Fq,
    /// The last two components of `C_σ(s)` vanish and the rest is `λ ω` in
    /// component `n - 2` (for `n = 2`, `C_σ(s) = 0`).
    pub holds: bool,
    /// The image `C_σ(s)`.
    #[serde(skip)]
    pub image: FnVector,
}

/// The form spanning the kernel of the Cartier operator on global forms of a
/// curve of `p`-rank `g - 1`, as a coefficient of `dx/y`.
pub fn cartier_kernel_form(curve: &CurveModel) -> Result<ChartFunction> {
    let hw = crate::cartier::hasse_witt(curve);
    let fit = fitting(&SemilinearOp::new(hw.matrix, -1));
    if fit.nil_basis.len() != 1 {
        return Err(Error::InvalidInput(format!(
            "expected a one-dimensional Cartier-nilpotent part, found dimension {}",
            fit.nil_basis.len()
        )));
    }
    let k = curve.field();
    let v = &fit.nil_basis[0];
    Ok(ChartFunction::from_x(crate::algebra::LaurentPoly::from_terms(
        k,
        v.iter().enumerate().map(|(i, &c)| (i as i64, c)),
    )))
}

/// For `s` in the nilpotent part of `H^0(Ω ⊗ E_n)` with last component `ω`,
/// check that `C_σ(s)` is `λ ω` placed in component `n - 2`.
pub fn block_drop_check(tower: &Tower, n: usize) -> Result<BlockDrop> {
    use crate::cartier::{gauge_inverses, omega_twist_sections, twisted_cartier_apply, twisted_cartier_matrix};
    use crate::cech::coordinates_in;
    if n < 2 {
        return Err(Error::Config("block drop needs n >= 2".into()));
    }
    let curve = tower.curve();
    let k = curve.field();
    let level = tower.level(n);
    let omega = cartier_kernel_form(curve)?;
    let sections = omega_twist_sections(&level.cocycle, curve)?;
    let op = twisted_cartier_matrix(&sections, curve)?;
    let fit = fitting(&op);
    let nil: Vec<FnVector> = fit
        .nil_basis
        .iter()
        .map(|c| crate::cech::bundle::fnvec_combine(k, n, c, &sections.basis))
        .collect();
    let bottoms: Vec<FnVector> = nil.iter().map(|s| vec![s[n - 1].clone()]).collect();
    let lambda_s = coordinates_in(k, &bottoms, std::slice::from_ref(&omega))
        .ok_or_else(|| Error::Consistency(format!("no nilpotent section of Ω⊗E_{n} ends in ω")))?;
    let s = crate::cech::bundle::fnvec_combine(k, n, &lambda_s, &nil);
    let (g0i, g1i) = gauge_inverses(&level.cocycle, curve)?;
    let image = twisted_cartier_apply(&s, &level.cocycle, &g0i, &g1i, curve)?;
    let (lambda, holds) = if n == 2 {
        (k.zero(), image.iter().all(ChartFunction::is_zero))
    } else {
        let comp = &image[n - 3];
        let lambda = coordinates_in(k, &[vec![omega.clone()]], std::slice::from_ref(comp)).map(|c| c[0]);
        let others_zero = image[n - 2..].iter().all(ChartFunction::is_zero);
        match lambda {
            Some(l) => (l, others_zero && !l.is_zero()),
            None => (k.zero(), false),
        }
    };
    Ok(BlockDrop { n, lambda, holds, image })
}
