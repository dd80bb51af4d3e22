//! `p^(±1)`-semilinear operators: twisted iterates, Fitting decomposition,
//! fixed vectors and pro-system limits.

use serde::Serialize;

use crate::algebra::{Embedding, Field, Fq, Matrix};
use crate::error::{Error, Result};

/// Largest F_p-dimension allowed in a linearization.
pub const LINEARIZATION_CAP: usize = 64;

/// Default number of extension degrees tried by [`fixed_space`].
pub const DEFAULT_MAX_EXT: usize = 8;

/// `v -> M v^(p^e)` with `e = twist`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearOp {
    pub m: Matrix,
    pub twist: i64,
}

fn twist_vec(v: &[Fq], e: i64) -> Vec<Fq> {
    v.iter().map(|a| a.frobenius_pow(e)).collect()
}

impl SemilinearOp {
    pub fn new(m: Matrix, twist: i64) -> Self {
        assert!(m.is_square(), "semilinear operator needs a square matrix");
        SemilinearOp { m, twist }
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn field(&self) -> Field {
        self.m.field()
    }

    pub fn apply(&self, v: &[Fq]) -> Vec<Fq> {
        self.m.mul_vec(&twist_vec(v, self.twist))
    }

    /// `T^n(v)` by repeated application.
    pub fn apply_n(&self, v: &[Fq], n: usize) -> Vec<Fq> {
        (0..n).fold(v.to_vec(), |acc, _| self.apply(&acc))
    }

    pub fn map_field(&self, emb: &Embedding) -> Self {
        SemilinearOp { m: self.m.map_field(emb), twist: self.twist }
    }

    /// Restriction to an invariant subspace with the given basis (columns).
    pub fn restrict(&self, basis: &[Vec<Fq>]) -> Result<SemilinearOp> {
        let k = self.field();
        let b = Matrix::from_cols(k, self.dim(), basis);
        let cols: Vec<Vec<Fq>> = basis
            .iter()
            .map(|v| {
                b.solve(&self.apply(v))
                    .ok_or_else(|| Error::Consistency("subspace is not invariant".into()))
            })
            .collect::<Result<_>>()?;
        Ok(SemilinearOp::new(Matrix::from_cols(k, basis.len(), &cols), self.twist))
    }
}

/// Matrix of `T^n`: `M M^(σ^e) ... M^(σ^((n-1)e))`, so that
/// `T^n(v) = P v^(σ^(ne))`.
pub fn op_iterate(t: &SemilinearOp, n: usize) -> Matrix {
    let mut acc = Matrix::identity(t.field(), t.dim());
    let mut twisted = t.m.clone();
    for _ in 0..n {
        acc = acc.mul(&twisted);
        twisted = twisted.twist(t.twist);
    }
    acc
}

/// Fitting decomposition of a semilinear operator.
#[derive(Clone, Debug, Serialize)]
pub struct FittingData {
    pub ss_rank: usize,
    pub nil_index: usize,
    pub ss_basis: Vec<Vec<Fq>>,
    pub nil_basis: Vec<Vec<Fq>>,
}

/// Split the space into the part where `T` is bijective (image of `T^n`) and
/// the part where it is nilpotent (kernel of `T^n`).
pub fn fitting(t: &SemilinearOp) -> FittingData {
    let n = t.dim();
    let p = op_iterate(t, n);
    let ss_basis = p.column_space();
    // T^n(v) = P v^(σ^(ne)) vanishes iff v^(σ^(ne)) ∈ ker P.
    let shift = -(n as i64) * t.twist;
    let nil_basis: Vec<Vec<Fq>> = p.kernel().iter().map(|v| twist_vec(v, shift)).collect();
    let nil_index = if n == 0 || nil_basis.is_empty() {
        0
    } else {
        (1..=n)
            .find(|&j| {
                let pj = op_iterate(t, j);
                nil_basis.iter().all(|v| pj.mul_vec(&twist_vec(v, j as i64 * t.twist)).iter().all(Fq::is_zero))
            })
            .unwrap_or(n)
    };
    FittingData { ss_rank: ss_basis.len(), nil_index, ss_basis, nil_basis }
}

/// Fixed vectors of a `p`-linear operator, over an extension large enough to
/// contain all of them.
#[derive(Clone, Debug)]
pub struct FixedSpace {
    /// Field the basis lives in.
    pub field: Field,
    /// Degree of that field over F_p.
    pub degree: usize,
    /// An F_p-basis of `{v : T v = v}`.
    pub basis: Vec<Vec<Fq>>,
    pub ss_rank: usize,
}

/// F_p-basis of `{v : T v = v}`, searching extensions of degree `m j`,
/// `j = 1..=max_ext`, until the F_p-dimension reaches the semisimple rank.
pub fn fixed_space(t: &SemilinearOp, max_ext: usize) -> Result<FixedSpace> {
    let ss_rank = fitting(t).ss_rank;
    let (best, found) = search_extensions(t, max_ext, |basis| basis.len() == ss_rank)?;
    found.ok_or(Error::FixedSpaceNotSaturated { found: best, expected: ss_rank })
}

/// Fixed vectors over the smallest tried extension where any nonzero one
/// exists, without asking for saturation. Fails when the semisimple part is
/// zero or no tried extension has a nonzero fixed vector.
pub fn first_fixed_space(t: &SemilinearOp, max_ext: usize) -> Result<FixedSpace> {
    let ss_rank = fitting(t).ss_rank;
    if ss_rank == 0 {
        return Err(Error::FixedSpaceNotSaturated { found: 0, expected: 0 });
    }
    let (best, found) = search_extensions(t, max_ext, |basis| !basis.is_empty())?;
    found.ok_or(Error::FixedSpaceNotSaturated { found: best, expected: ss_rank })
}

/// Walk the extensions of degree `m j`, `j = 1..=max_ext`, stopping at the
/// first whose fixed basis satisfies `done`. Returns the largest F_p-dimension
/// seen alongside the hit.
fn search_extensions(
    t: &SemilinearOp,
    max_ext: usize,
    done: impl Fn(&[Vec<Fq>]) -> bool,
) -> Result<(usize, Option<FixedSpace>)> {
    if t.twist != 1 {
        return Err(Error::Config("fixed vectors need a p-linear operator (twist +1)".into()));
    }
    let base = t.field();
    let n = t.dim();
    let ss_rank = fitting(t).ss_rank;
    let m = base.degree();
    if m * n > LINEARIZATION_CAP {
        return Err(Error::Config(format!("linearized dimension {} exceeds cap {LINEARIZATION_CAP}", m * n)));
    }
    let mut best = 0;
    for j in 1..=max_ext.max(1) {
        let degree = m * j;
        if degree * n > LINEARIZATION_CAP {
            break;
        }
        let field = Field::new(base.characteristic(), degree)?;
        let emb = Embedding::new(base, field)
            .ok_or_else(|| Error::Consistency(format!("no embedding of degree {m} into degree {degree}")))?;
        let basis = fixed_basis_linearized(&t.map_field(&emb));
        best = best.max(basis.len());
        if done(&basis) {
            return Ok((best, Some(FixedSpace { field, degree, basis, ss_rank })));
        }
    }
    Ok((best, None))
}

/// Kernel of `T - id` viewed as an F_p-linear map.
fn fixed_basis_linearized(t: &SemilinearOp) -> Vec<Vec<Fq>> {
    let k = t.field();
    let d = k.degree();
    let n = t.dim();
    let fp = Field::prime(k.characteristic()).expect("prime field");
    let dim = n * d;
    let mut lin = Matrix::zeros(fp, dim, dim);
    for i in 0..n {
        for j in 0..d {
            let mut digits = vec![0i64; d];
            digits[j] = 1;
            let mut v = vec![k.zero(); n];
            v[i] = k.from_digits(&digits);
            let img = t.apply(&v);
            for (r, (a, b)) in img.iter().zip(&v).enumerate() {
                let diff = *a - *b;
                for (s, &dg) in diff.digits().iter().enumerate() {
                    lin[(r * d + s, i * d + j)] = fp.from_int(dg as i64);
                }
            }
        }
    }
    lin.kernel()
        .into_iter()
        .map(|kv| {
            (0..n)
                .map(|i| {
                    let digits: Vec<i64> = (0..d).map(|s| kv[i * d + s].to_prime_int().unwrap()).collect();
                    k.from_digits(&digits)
                })
                .collect()
        })
        .collect()
}

/// Number of fixed vectors of a `p`-linear operator over a large enough
/// finite field: `p^(ss_rank)`.
pub fn count_fixed(t: &SemilinearOp) -> Result<u128> {
    let fs = fixed_space(t, DEFAULT_MAX_EXT)?;
    Ok((t.field().characteristic() as u128).pow(fs.basis.len() as u32))
}

/// An inverse system of finite-dimensional spaces.
#[derive(Clone, Debug)]
pub enum ProSystem {
    /// `... -> V -> V -> V` with the same semilinear transfer at every step.
    Constant(SemilinearOp),
    /// `V_0 <- V_1 <- ... <- V_L` with linear transfers `transfers[i]:
    /// V_(i+1) -> V_i`, continued beyond `V_L` by the endomorphism `tail`.
    Explicit { transfers: Vec<Matrix>, tail: Matrix },
}

/// Dimensions of `lim` and `lim^1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub lim: usize,
    pub lim1: usize,
}

/// `lim` is the stable image of the tail; `lim^1` vanishes because every
/// truncation of the difference map `(v_i) -> (v_i - t(v_(i+1)))` is onto,
/// which is checked constructively on a basis of targets.
pub fn prosystem_limits(s: &ProSystem) -> Result<Limits> {
    match s {
        ProSystem::Constant(t) => {
            let lim = fitting(t).ss_rank;
            check_difference_onto(t.field(), &vec![t.dim(); t.dim() + 2], |_, v| t.apply(v))?;
            Ok(Limits { lim, lim1: 0 })
        }
        ProSystem::Explicit { transfers, tail } => {
            let tail_op = SemilinearOp::new(tail.clone(), 0);
            let lim = fitting(&tail_op).ss_rank;
            let mut dims: Vec<usize> = transfers.iter().map(Matrix::rows).collect();
            dims.push(tail.rows());
            dims.push(tail.rows());
            let field = tail.field();
            check_difference_onto(field, &dims, |i, v| {
                if i < transfers.len() {
                    transfers[i].mul_vec(v)
                } else {
                    tail.mul_vec(v)
                }
            })?;
            Ok(Limits { lim, lim1: 0 })
        }
    }
}

/// For levels `0..L` with dimensions `dims`, solve `d(v) = w` for each basis
/// target `w` of `V_0 x ... x V_(L-1)` and verify the solution.
fn check_difference_onto(field: Field, dims: &[usize], transfer: impl Fn(usize, &[Fq]) -> Vec<Fq>) -> Result<()> {
    let levels = dims.len() - 1;
    for lvl in 0..levels {
        for c in 0..dims[lvl] {
            let mut w: Vec<Vec<Fq>> = dims[..levels].iter().map(|&d| vec![field.zero(); d]).collect();
            w[lvl][c] = field.one();
            // v_L = 0, v_i = w_i + t(v_(i+1))
            let mut v: Vec<Vec<Fq>> = dims.iter().map(|&d| vec![field.zero(); d]).collect();
            for i in (0..levels).rev() {
                let t = transfer(i, &v[i + 1]);
                v[i] = w[i].iter().zip(&t).map(|(a, b)| *a + *b).collect();
            }
            for i in 0..levels {
                let t = transfer(i, &v[i + 1]);
                let d: Vec<Fq> = v[i].iter().zip(&t).map(|(a, b)| *a - *b).collect();
                if d != w[i] {
                    return Err(Error::Consistency("difference map of a pro-system is not onto".into()));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(p: u32, rows: &[&[i64]], e: i64) -> SemilinearOp {
        SemilinearOp::new(Matrix::from_ints(Field::prime(p).unwrap(), rows), e)
    }

    #[test]
    fn iterate_examples() {
        let k = Field::prime(3).unwrap();
        assert_eq!(op_iterate(&op(3, &[&[1, 0], &[0, 1]], 1), 5), Matrix::identity(k, 2));
        assert!(op_iterate(&op(3, &[&[0, 1], &[0, 0]], 1), 2).is_zero());
        let m = op(3, &[&[-1, -1], &[-1, -1]], 1);
        assert_eq!(op_iterate(&m, 2), m.m);
    }

    #[test]
    fn fitting_examples() {
        let f = fitting(&op(3, &[&[1, 0], &[0, 0]], 1));
        assert_eq!((f.ss_rank, f.nil_index), (1, 1));
        let f = fitting(&op(5, &[&[1, 2], &[3, 4]], -1));
        assert_eq!((f.ss_rank, f.nil_index), (2, 0));
        let f = fitting(&op(3, &[&[0, 1], &[0, 0]], 1));
        assert_eq!((f.ss_rank, f.nil_index), (0, 2));
        let f = fitting(&op(3, &[&[0, 0], &[0, 0]], 1));
        assert_eq!((f.ss_rank, f.nil_index), (0, 1));
        let empty = SemilinearOp::new(Matrix::zeros(Field::prime(3).unwrap(), 0, 0), 1);
        assert_eq!(fitting(&empty).nil_index, 0);
    }

    #[test]
    fn fixed_space_examples() {
        let k = Field::prime(3).unwrap();
        let fs = fixed_space(&op(3, &[&[1]], 1), 8).unwrap();
        assert_eq!(fs.basis, vec![vec![k.one()]]);
        let fs = fixed_space(&op(3, &[&[-1, -1], &[-1, -1]], 1), 8).unwrap();
        assert_eq!(fs.degree, 1);
        assert_eq!(fs.basis.len(), 1);
        let v = &fs.basis[0];
        assert_eq!(v[0], v[1]);
        assert!(fixed_space(&op(3, &[&[0, 1], &[0, 0]], 1), 8).unwrap().basis.is_empty());
        assert_eq!(count_fixed(&op(3, &[&[1, 0], &[0, 1]], 1)).unwrap(), 9);
        assert_eq!(count_fixed(&op(3, &[&[-1, -1], &[-1, -1]], 1)).unwrap(), 3);
    }

    #[test]
    fn fixed_vectors_may_need_an_extension() {
        // v -> -v^3 on F_3: fixed vectors satisfy v^2 = -1, which needs F_9.
        let fs = fixed_space(&op(3, &[&[-1]], 1), 8).unwrap();
        assert_eq!(fs.degree, 2);
        assert_eq!(fs.basis.len(), 1);
        let v = fs.basis[0][0];
        assert_eq!(-v.frobenius(), v);
    }

    #[test]
    fn limit_examples() {
        let l = prosystem_limits(&ProSystem::Constant(op(3, &[&[0, 1], &[0, 0]], 1))).unwrap();
        assert_eq!(l, Limits { lim: 0, lim1: 0 });
        let l = prosystem_limits(&ProSystem::Constant(op(5, &[&[1, 2], &[3, 4]], 1))).unwrap();
        assert_eq!(l, Limits { lim: 2, lim1: 0 });
        let l = prosystem_limits(&ProSystem::Constant(op(3, &[&[1, 1], &[0, 0]], 1))).unwrap();
        assert_eq!(l, Limits { lim: 1, lim1: 0 });
        let k = Field::prime(3).unwrap();
        let l = prosystem_limits(&ProSystem::Explicit {
            transfers: vec![Matrix::from_ints(k, &[&[1, 0, 0]]), Matrix::from_ints(k, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]])],
            tail: Matrix::from_ints(k, &[&[1, 1, 0], &[0, 0, 1], &[0, 0, 0]]),
        })
        .unwrap();
        assert_eq!(l, Limits { lim: 1, lim1: 0 });
    }
}
