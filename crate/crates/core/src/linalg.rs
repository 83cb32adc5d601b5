//! Dense exact linear algebra over a [`FiniteField`].
//!
//! Vectors are rows. A [`Subspace`] keeps its basis in reduced row-echelon
//! form, so two subspaces are equal exactly when their bases are equal.

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<Fe>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!("row of length {} in {cols}-column matrix", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Fe>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, f: &FiniteField, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0; self.cols];
        for (r, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let row = self.row(r);
            for (o, &y) in out.iter_mut().zip(row) {
                if y != 0 {
                    *o = f.add(*o, f.mul(x, y));
                }
            }
        }
        out
    }

    pub fn mul(&self, f: &FiniteField, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let v = other.vec_mul(f, self.row(r));
            out.data[r * other.cols..(r + 1) * other.cols].copy_from_slice(&v);
        }
        Ok(out)
    }
}

/// Reduce `m` to reduced row-echelon form in place; returns pivot columns.
/// Zero rows are removed.
pub fn rref(f: &FiniteField, m: &mut Matrix) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| m.get(i, c) != 0) else { continue };
        if piv != r {
            for k in 0..cols {
                m.data.swap(piv * cols + k, r * cols + k);
            }
        }
        let inv = f.inv(m.get(r, c)).expect("pivot nonzero");
        for k in c..cols {
            let v = f.mul(m.get(r, k), inv);
            m.set(r, k, v);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m.get(i, c);
            if factor == 0 {
                continue;
            }
            for k in c..cols {
                let v = f.sub(m.get(i, k), f.mul(factor, m.get(r, k)));
                m.set(i, k, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.data.truncate(r * cols);
    m.rows = r;
    pivots
}

pub fn rank(f: &FiniteField, m: &Matrix) -> usize {
    let mut w = m.clone();
    rref(f, &mut w).len()
}

/// Right kernel {x : M·x = 0} as a subspace of F^cols.
pub fn nullspace(f: &FiniteField, m: &Matrix) -> Subspace {
    let mut w = m.clone();
    let pivots = rref(f, &mut w);
    let cols = m.cols;
    let mut is_piv = vec![false; cols];
    for &p in &pivots {
        is_piv[p] = true;
    }
    let mut basis = vec![];
    for free in (0..cols).filter(|&c| !is_piv[c]) {
        let mut v = vec![0; cols];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(w.get(r, free));
        }
        basis.push(v);
    }
    Subspace::from_vectors(f, cols, &basis)
}

/// One solution of M·x = b, or None if inconsistent.
pub fn solve(f: &FiniteField, m: &Matrix, b: &[Fe]) -> Result<Option<Vec<Fe>>> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch(format!("rhs of length {} for {} rows", b.len(), m.rows)));
    }
    let cols = m.cols;
    let mut aug = Matrix::zeros(m.rows, cols + 1);
    for r in 0..m.rows {
        for c in 0..cols {
            aug.set(r, c, m.get(r, c));
        }
        aug.set(r, cols, b[r]);
    }
    let pivots = rref(f, &mut aug);
    if pivots.last() == Some(&cols) {
        return Ok(None);
    }
    let mut x = vec![0; cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.get(r, cols);
    }
    Ok(Some(x))
}

/// The four modes of a linear solve.
#[derive(Clone, Debug)]
pub enum SolveMode {
    Rank,
    Nullspace,
    Solve(Vec<Fe>),
    Rref,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutput {
    Rank(usize),
    Nullspace(Subspace),
    Solution(Option<Vec<Fe>>),
    Rref(Matrix),
}

pub fn linear_solve(f: &FiniteField, m: &Matrix, mode: SolveMode) -> Result<SolveOutput> {
    Ok(match mode {
        SolveMode::Rank => SolveOutput::Rank(rank(f, m)),
        SolveMode::Nullspace => SolveOutput::Nullspace(nullspace(f, m)),
        SolveMode::Solve(b) => SolveOutput::Solution(solve(f, m, &b)?),
        SolveMode::Rref => {
            let mut w = m.clone();
            rref(f, &mut w);
            SolveOutput::Rref(w)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: Matrix,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(0, ambient), pivots: vec![] }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient), pivots: (0..ambient).collect() }
    }

    pub fn from_vectors(f: &FiniteField, ambient: usize, vs: &[Vec<Fe>]) -> Self {
        let mut m = Matrix::zeros(vs.len(), ambient);
        for (r, v) in vs.iter().enumerate() {
            assert_eq!(v.len(), ambient, "vector length must match ambient dimension");
            m.data[r * ambient..(r + 1) * ambient].copy_from_slice(v);
        }
        let pivots = rref(f, &mut m);
        Subspace { ambient, basis: m, pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn vectors(&self) -> Vec<Vec<Fe>> {
        self.basis.row_vecs()
    }

    /// Reduce `v` modulo the subspace: zero at every pivot column.
    pub fn reduce(&self, f: &FiniteField, v: &[Fe]) -> Vec<Fe> {
        let mut w = v.to_vec();
        for (r, &pc) in self.pivots.iter().enumerate() {
            let c = w[pc];
            if c == 0 {
                continue;
            }
            for (k, &b) in self.basis.row(r).iter().enumerate() {
                if b != 0 {
                    w[k] = f.sub(w[k], f.mul(c, b));
                }
            }
        }
        w
    }

    pub fn contains(&self, f: &FiniteField, v: &[Fe]) -> bool {
        self.reduce(f, v).iter().all(|&x| x == 0)
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the subspace.
    pub fn coordinates(&self, f: &FiniteField, v: &[Fe]) -> Option<Vec<Fe>> {
        let coords: Vec<Fe> = self.pivots.iter().map(|&pc| v[pc]).collect();
        let mut recon = vec![0; self.ambient];
        for (r, &c) in coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (k, &b) in self.basis.row(r).iter().enumerate() {
                recon[k] = f.add(recon[k], f.mul(c, b));
            }
        }
        if recon == v {
            Some(coords)
        } else {
            None
        }
    }

    pub fn combine(&self, f: &FiniteField, coords: &[Fe]) -> Vec<Fe> {
        self.basis.vec_mul(f, coords)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!("ambient {} vs {}", self.ambient, other.ambient)));
        }
        Ok(())
    }

    pub fn sum(&self, f: &FiniteField, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut vs = self.vectors();
        vs.extend(other.vectors());
        Ok(Subspace::from_vectors(f, self.ambient, &vs))
    }

    pub fn intersect(&self, f: &FiniteField, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        // solve a·U = b·V; the kernel of [U; -V]^T gives the pairs (a, b)
        let (du, dv) = (self.dim(), other.dim());
        if du == 0 || dv == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        let mut m = Matrix::zeros(self.ambient, du + dv);
        for k in 0..self.ambient {
            for r in 0..du {
                m.set(k, r, self.basis.get(r, k));
            }
            for r in 0..dv {
                m.set(k, du + r, f.neg(other.basis.get(r, k)));
            }
        }
        let ker = nullspace(f, &m);
        let vs: Vec<Vec<Fe>> = ker.vectors().iter().map(|kv| self.combine(f, &kv[..du])).collect();
        Ok(Subspace::from_vectors(f, self.ambient, &vs))
    }

    pub fn contains_space(&self, f: &FiniteField, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(other.vectors().iter().all(|v| self.contains(f, v)))
    }

    pub fn equals(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(self.basis == other.basis)
    }

    /// Vectors of `self` completing a basis of `sub` (assumed contained in `self`),
    /// reduced modulo `sub`: RREF rows of `self` whose pivots are not pivots of `sub`.
    pub fn complement_reps(&self, f: &FiniteField, sub: &Subspace) -> Vec<Vec<Fe>> {
        let mut reduced: Vec<Vec<Fe>> = self.vectors().iter().map(|v| sub.reduce(f, v)).collect();
        reduced.retain(|v| v.iter().any(|&x| x != 0));
        Subspace::from_vectors(f, self.ambient, &reduced).vectors()
    }
}

/// The four subspace operations.
#[derive(Clone, Debug)]
pub enum SubspaceMode {
    Sum,
    Intersect,
    Contains(Vec<Fe>),
    Equals,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubspaceOutput {
    Space(Subspace),
    Bool(bool),
}

pub fn subspace_ops(f: &FiniteField, u: &Subspace, v: &Subspace, mode: SubspaceMode) -> Result<SubspaceOutput> {
    u.check_ambient(v)?;
    Ok(match mode {
        SubspaceMode::Sum => SubspaceOutput::Space(u.sum(f, v)?),
        SubspaceMode::Intersect => SubspaceOutput::Space(u.intersect(f, v)?),
        SubspaceMode::Contains(x) => {
            if x.len() != u.ambient {
                return Err(Error::DimensionMismatch("vector length".into()));
            }
            SubspaceOutput::Bool(u.contains(f, &x))
        }
        SubspaceMode::Equals => SubspaceOutput::Bool(u.equals(v)?),
    })
}

pub fn axpy(f: &FiniteField, y: &mut [Fe], a: Fe, x: &[Fe]) {
    if a == 0 {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        if xi != 0 {
            *yi = f.add(*yi, f.mul(a, xi));
        }
    }
}

pub fn is_zero(v: &[Fe]) -> bool {
    v.iter().all(|&x| x == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FiniteField {
        FiniteField::new(p, 1).unwrap()
    }

    #[test]
    fn identity_rank() {
        let f = gf(5);
        assert_eq!(rank(&f, &Matrix::identity(3)), 3);
    }

    #[test]
    fn zero_nullspace_is_full() {
        let f = gf(3);
        let ns = nullspace(&f, &Matrix::zeros(2, 2));
        assert_eq!(ns.dim(), 2);
    }

    #[test]
    fn upper_triangular_solve_gf2() {
        let f = gf(2);
        let m = Matrix::from_rows(2, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(solve(&f, &m, &[0, 1]).unwrap(), Some(vec![1, 1]));
    }

    #[test]
    fn inconsistent_solve() {
        let f = gf(3);
        let m = Matrix::from_rows(2, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(solve(&f, &m, &[0, 1]).unwrap(), None);
    }

    #[test]
    fn lattice_basics() {
        let f = gf(7);
        let e1 = Subspace::from_vectors(&f, 2, &[vec![1, 0]]);
        let e2 = Subspace::from_vectors(&f, 2, &[vec![0, 1]]);
        assert_eq!(e1.sum(&f, &e2).unwrap().dim(), 2);
        assert_eq!(e1.intersect(&f, &e2).unwrap().dim(), 0);
        assert!(e1.sum(&f, &e1).unwrap().equals(&e1).unwrap());
        assert!(e1.intersect(&f, &e1).unwrap().equals(&e1).unwrap());
        let diag = Subspace::from_vectors(&f, 2, &[vec![1, 1]]);
        assert!(!diag.contains(&f, &[1, 0]));
    }

    #[test]
    fn ambient_mismatch_errors() {
        let f = gf(2);
        let a = Subspace::full(2);
        let b = Subspace::full(3);
        assert!(a.sum(&f, &b).is_err());
    }
}
