use std::fmt;

use crate::algebra::{Embedding, Field, Fq};
use crate::curve::{Chart, ChartFunction, CurveModel};
use crate::error::{Error, Result};

/// Square matrix with entries in the function ring of the overlap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FnMatrix {
    field: Field,
    n: usize,
    entries: Vec<ChartFunction>,
}

/// A column vector over the overlap ring.
pub type FnVector = Vec<ChartFunction>;

impl FnMatrix {
    pub fn zero(field: Field, n: usize) -> Self {
        FnMatrix { field, n, entries: vec![ChartFunction::zero(field); n * n] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zero(field, n);
        for i in 0..n {
            m.set(i, i, ChartFunction::one(field));
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<ChartFunction>>) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            entries.extend(r);
        }
        FnMatrix { field, n, entries }
    }

    /// The unipotent matrix `[[self, c], [0, 1]]`.
    pub fn extend_with_column(&self, c: &[ChartFunction]) -> Self {
        assert_eq!(c.len(), self.n);
        let n = self.n + 1;
        let mut m = Self::zero(self.field, n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j).clone());
            }
            m.set(i, self.n, c[i].clone());
        }
        m.set(self.n, self.n, ChartFunction::one(self.field));
        m
    }

    /// Top-left `k x k` block.
    pub fn top_left(&self, k: usize) -> Self {
        let rows = (0..k).map(|i| (0..k).map(|j| self.get(i, j).clone()).collect()).collect();
        Self::from_rows(self.field, rows)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &ChartFunction {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ChartFunction) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &ChartFunction> {
        self.entries.iter()
    }

    pub fn col(&self, j: usize) -> FnVector {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &Self, curve: &CurveModel) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.field, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = ChartFunction::zero(self.field);
                for k in 0..self.n {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b, curve));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn apply(&self, v: &[ChartFunction], curve: &CurveModel) -> FnVector {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                let mut acc = ChartFunction::zero(self.field);
                for (k, vk) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !vk.is_zero() {
                        acc = acc.add(&a.mul(vk, curve));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect();
        FnMatrix { field: self.field, n: self.n, entries }
    }

    pub fn scale(&self, c: Fq) -> Self {
        let entries = self.entries.iter().map(|a| a.scale(c)).collect();
        FnMatrix { field: self.field, n: self.n, entries }
    }

    /// Entrywise absolute Frobenius `u -> u^p`.
    pub fn frobenius(&self, curve: &CurveModel) -> Self {
        let entries = self.entries.iter().map(|a| a.frobenius(curve)).collect();
        FnMatrix { field: self.field, n: self.n, entries }
    }

    pub fn frobenius_iter(&self, k: usize, curve: &CurveModel) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.frobenius(curve))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.field, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn map_field(&self, emb: &Embedding) -> Self {
        FnMatrix {
            field: emb.target(),
            n: self.n,
            entries: self.entries.iter().map(|a| a.map_field(emb)).collect(),
        }
    }

    /// Every entry is regular on the given chart.
    pub fn in_chart(&self, chart: Chart, genus: usize) -> bool {
        self.entries.iter().all(|u| u.in_chart(chart, genus))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.transpose().is_upper_triangular()
    }

    /// Upper triangular with ones on the diagonal.
    pub fn is_unipotent(&self) -> bool {
        let one = ChartFunction::one(self.field);
        self.is_upper_triangular() && (0..self.n).all(|i| *self.get(i, i) == one)
    }

    pub fn determinant(&self, curve: &CurveModel) -> ChartFunction {
        if self.is_upper_triangular() || self.is_lower_triangular() {
            return (0..self.n).fold(ChartFunction::one(self.field), |acc, i| acc.mul(self.get(i, i), curve));
        }
        laplace(self, curve)
    }

    /// Inverse over the overlap ring.
    ///
    /// The units of the overlap ring are exactly `c x^k`, so invertibility is
    /// decided by the determinant. Triangular matrices are inverted by
    /// substitution; small general matrices through the adjugate.
    pub fn inverse(&self, curve: &CurveModel) -> Result<Self> {
        let det = self.determinant(curve);
        let Some(det_inv) = unit_inverse(&det) else {
            return Err(Error::NotInvertible);
        };
        if self.is_upper_triangular() {
            return Ok(self.upper_inverse(curve));
        }
        if self.is_lower_triangular() {
            return Ok(self.transpose().upper_inverse(curve).transpose());
        }
        if self.n > 4 {
            return Err(Error::Config(format!("general {0}x{0} function matrix inversion is not supported", self.n)));
        }
        let mut adj = Self::zero(self.field, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let minor = self.minor(j, i);
                let mut c = laplace(&minor, curve);
                if (i + j) % 2 == 1 {
                    c = c.neg();
                }
                adj.set(i, j, c.mul(&det_inv, curve));
            }
        }
        Ok(adj)
    }

    fn upper_inverse(&self, curve: &CurveModel) -> Self {
        let n = self.n;
        let mut inv = Self::zero(self.field, n);
        let diag_inv: Vec<ChartFunction> = (0..n).map(|i| unit_inverse(self.get(i, i)).expect("unit diagonal")).collect();
        // Solve column by column, bottom up.
        for j in 0..n {
            for i in (0..=j).rev() {
                let mut acc = if i == j { ChartFunction::one(self.field) } else { ChartFunction::zero(self.field) };
                for k in i + 1..=j {
                    let (a, b) = (self.get(i, k), inv.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.sub(&a.mul(b, curve));
                    }
                }
                inv.set(i, j, acc.mul(&diag_inv[i], curve));
            }
        }
        inv
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let rows = (0..self.n)
            .filter(|&i| i != row)
            .map(|i| (0..self.n).filter(|&j| j != col).map(|j| self.get(i, j).clone()).collect())
            .collect();
        Self::from_rows(self.field, rows)
    }
}

fn laplace(m: &FnMatrix, curve: &CurveModel) -> ChartFunction {
    match m.n {
        0 => ChartFunction::one(m.field),
        1 => m.get(0, 0).clone(),
        _ => {
            let mut acc = ChartFunction::zero(m.field);
            for j in 0..m.n {
                if m.get(0, j).is_zero() {
                    continue;
                }
                let term = m.get(0, j).mul(&laplace(&m.minor(0, j), curve), curve);
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// `c x^k` if `u` is such a unit.
pub fn as_unit(u: &ChartFunction) -> Option<(Fq, i64)> {
    if !u.b.is_zero() || u.a.num_terms() != 1 {
        return None;
    }
    let (e, c) = u.a.terms().next()?;
    Some((c, e))
}

fn unit_inverse(u: &ChartFunction) -> Option<ChartFunction> {
    let (c, e) = as_unit(u)?;
    Some(ChartFunction::x_pow(c.inv()?, -e))
}

impl fmt::Debug for FnMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_validate;

    fn curve() -> CurveModel {
        let k = Field::prime(3).unwrap();
        let c: Vec<Fq> = [-1i64; 5].iter().map(|&x| k.from_int(x)).collect();
        curve_validate(k, 2, &c).unwrap()
    }

    #[test]
    fn unipotent_inverse() {
        let x = curve();
        let k = x.field();
        let e = ChartFunction::y_x_pow(k.one(), -2).add(&ChartFunction::y_x_pow(k.one(), -1));
        let a = FnMatrix::identity(k, 2).extend_with_column(&[ChartFunction::zero(k), e.clone()]);
        let a = a.extend_with_column(&[ChartFunction::x_pow(k.one(), -3), e, ChartFunction::zero(k)]);
        let inv = a.inverse(&x).unwrap();
        assert_eq!(a.mul(&inv, &x), FnMatrix::identity(k, 4));
        assert_eq!(inv.mul(&a, &x), FnMatrix::identity(k, 4));
    }

    #[test]
    fn general_inverse_via_adjugate() {
        let x = curve();
        let k = x.field();
        let one = ChartFunction::one(k);
        let u = ChartFunction::y_x_pow(k.one(), -1);
        // [[1, u], [0, 1]] * [[1, 0], [u, 1]] has determinant 1 but is not triangular
        let up = FnMatrix::from_rows(k, vec![vec![one.clone(), u.clone()], vec![ChartFunction::zero(k), one.clone()]]);
        let lo = up.transpose();
        let m = up.mul(&lo, &x);
        assert!(!m.is_upper_triangular() && !m.is_lower_triangular());
        let inv = m.inverse(&x).unwrap();
        assert_eq!(m.mul(&inv, &x), FnMatrix::identity(k, 2));
    }

    #[test]
    fn non_unit_determinant_rejected() {
        let x = curve();
        let k = x.field();
        let m = FnMatrix::from_rows(k, vec![vec![ChartFunction::x_pow(k.one(), 1).add(&ChartFunction::one(k))]]);
        assert!(matches!(m.inverse(&x), Err(Error::NotInvertible)));
    }
}
