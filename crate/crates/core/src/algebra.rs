//! Finite-dimensional algebras given by structure constants, the group
//! algebra, the Jacobson radical, and primitive idempotent decompositions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Embedding, Fe, FiniteField};
use crate::groups::PermGroup;
use crate::linalg::{self, axpy, is_zero, Matrix, Subspace};
use crate::poly;

pub type Vector = Vec<Fe>;

/// Try this many random elements before giving up on splitting an idempotent.
const SPLIT_TRIES: usize = 200;

#[derive(Clone, Debug)]
pub struct AlgebraContext {
    pub field: FiniteField,
    pub dim: usize,
    pub labels: Vec<String>,
    /// Sparse product of basis elements: entry i·dim + j lists (k, c) with b_i·b_j = Σ c·b_k.
    mult: Vec<Vec<(u32, Fe)>>,
    pub unit: Vector,
}

impl AlgebraContext {
    /// Build from dense structure constants `table[i][j]` = coordinates of b_i·b_j.
    /// Checks associativity and the unit.
    pub fn new(field: FiniteField, labels: Vec<String>, table: Vec<Vec<Vector>>, unit: Vector) -> Result<Self> {
        let dim = labels.len();
        let mut mult = Vec::with_capacity(dim * dim);
        for row in &table {
            for v in row {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch("structure constant length".into()));
                }
                mult.push(v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (k as u32, c)).collect());
            }
        }
        if mult.len() != dim * dim || unit.len() != dim {
            return Err(Error::DimensionMismatch("structure table shape".into()));
        }
        let ctx = AlgebraContext { field, dim, labels, mult, unit };
        ctx.check_axioms()?;
        Ok(ctx)
    }

    fn from_sparse_unchecked(field: FiniteField, labels: Vec<String>, mult: Vec<Vec<(u32, Fe)>>, unit: Vector) -> Self {
        let dim = labels.len();
        AlgebraContext { field, dim, labels, mult, unit }
    }

    /// Associativity on basis triples (all triples up to dimension 30, a
    /// deterministic sample of 4000 above) and the two-sided unit law.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.dim;
        let basis = |i: usize| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        };
        for i in 0..n {
            let b = basis(i);
            if self.mul(&self.unit, &b) != b || self.mul(&b, &self.unit) != b {
                return Err(Error::Internal(format!("unit fails on basis element {i}")));
            }
        }
        let check = |i: usize, j: usize, k: usize| -> Result<()> {
            let (a, b, c) = (basis(i), basis(j), basis(k));
            if self.mul(&self.mul(&a, &b), &c) != self.mul(&a, &self.mul(&b, &c)) {
                return Err(Error::Internal(format!("associativity fails on ({i},{j},{k})")));
            }
            Ok(())
        };
        if n <= 30 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        check(i, j, k)?;
                    }
                }
            }
        } else {
            let mut s: u64 = 0x9e37_79b9;
            for _ in 0..4000 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let i = (s >> 33) as usize % n;
                let j = (s >> 13) as usize % n;
                let k = (s >> 45) as usize % n;
                check(i, j, k)?;
            }
        }
        Ok(())
    }

    pub fn zero(&self) -> Vector {
        vec![0; self.dim]
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = self.zero();
        v[i] = 1;
        v
    }

    pub fn mul(&self, a: &[Fe], b: &[Fe]) -> Vector {
        let f = &self.field;
        let n = self.dim;
        let mut out = vec![0; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let c = f.mul(ai, bj);
                for &(k, s) in &self.mult[i * n + j] {
                    out[k as usize] = f.add(out[k as usize], f.mul(c, s));
                }
            }
        }
        out
    }

    pub fn mul3(&self, a: &[Fe], b: &[Fe], c: &[Fe]) -> Vector {
        self.mul(&self.mul(a, b), c)
    }

    pub fn add(&self, a: &[Fe], b: &[Fe]) -> Vector {
        a.iter().zip(b).map(|(&x, &y)| self.field.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[Fe], b: &[Fe]) -> Vector {
        a.iter().zip(b).map(|(&x, &y)| self.field.sub(x, y)).collect()
    }

    pub fn scale(&self, c: Fe, a: &[Fe]) -> Vector {
        a.iter().map(|&x| self.field.mul(c, x)).collect()
    }

    pub fn is_idempotent(&self, e: &[Fe]) -> bool {
        self.mul(e, e) == e
    }

    /// Rows are x·b_j; then x·y = y (as row vector) · L.
    pub fn left_mul_matrix(&self, x: &[Fe]) -> Matrix {
        let rows: Vec<Vector> = (0..self.dim).map(|j| self.mul(x, &self.basis_vector(j))).collect();
        Matrix::from_rows(self.dim, &rows).expect("square")
    }

    pub fn invert(&self, x: &[Fe]) -> Result<Vector> {
        // solve x·y = 1, i.e. Lᵀ y = 1
        let lt = self.left_mul_matrix(x).transpose();
        let y = linalg::solve(&self.field, &lt, &self.unit)?.ok_or(Error::Singular)?;
        if self.mul(&y, x) != self.unit {
            return Err(Error::Internal("one-sided inverse is not two-sided".into()));
        }
        Ok(y)
    }

    pub fn is_unit(&self, x: &[Fe]) -> bool {
        linalg::rank(&self.field, &self.left_mul_matrix(x)) == self.dim
    }

    /// Inverse of x inside the corner eAe (x ∈ eAe), if it exists.
    pub fn invert_in_corner(&self, e: &[Fe], x: &[Fe]) -> Option<Vector> {
        let corner = self.corner_space(e);
        let basis = corner.vectors();
        // solve x·(Σ c_r b_r) = e
        let cols: Vec<Vector> = basis.iter().map(|b| self.mul(x, b)).collect();
        let m = Matrix::from_rows(self.dim, &cols).ok()?.transpose();
        let c = linalg::solve(&self.field, &m, e).ok()??;
        let y = corner.combine(&self.field, &c);
        if self.mul(&y, x) == e {
            Some(y)
        } else {
            None
        }
    }

    pub fn random_in(&self, space: &Subspace, rng: &mut ChaCha8Rng) -> Vector {
        let q = self.field.order();
        let coords: Vec<Fe> = (0..space.dim()).map(|_| rng.gen_range(0..q)).collect();
        space.combine(&self.field, &coords)
    }

    /// Subspace e·A·f spanned by e·b_i·f.
    pub fn sandwich_space(&self, e: &[Fe], f: &[Fe]) -> Subspace {
        let vs: Vec<Vector> = (0..self.dim).map(|i| self.mul3(e, &self.basis_vector(i), f)).collect();
        Subspace::from_vectors(&self.field, self.dim, &vs)
    }

    pub fn corner_space(&self, e: &[Fe]) -> Subspace {
        self.sandwich_space(e, e)
    }

    /// Span of all products u·v for u ∈ U, v ∈ V.
    pub fn product_span(&self, u: &Subspace, v: &Subspace) -> Subspace {
        let mut vs = vec![];
        for a in u.vectors() {
            for b in v.vectors() {
                vs.push(self.mul(&a, &b));
            }
        }
        Subspace::from_vectors(&self.field, self.dim, &vs)
    }

    /// A subalgebra (containing 1 or not; unit given) as a standalone context
    /// whose basis is the RREF basis of `space`.
    pub fn subalgebra(&self, space: &Subspace, unit: &[Fe]) -> Result<SubAlgebra> {
        let f = &self.field;
        let basis = space.vectors();
        let d = basis.len();
        let mut mult = Vec::with_capacity(d * d);
        for a in &basis {
            for b in &basis {
                let prod = self.mul(a, b);
                let c = space.coordinates(f, &prod).ok_or_else(|| Error::Internal("subspace not closed under multiplication".into()))?;
                mult.push(c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(k, &x)| (k as u32, x)).collect());
            }
        }
        let u = space.coordinates(f, unit).ok_or_else(|| Error::Internal("unit outside subalgebra".into()))?;
        let labels = (0..d).map(|i| format!("s{i}")).collect();
        let ctx = AlgebraContext::from_sparse_unchecked(f.clone(), labels, mult, u);
        Ok(SubAlgebra { ctx, space: space.clone() })
    }

    /// The corner algebra eAe with unit e.
    pub fn corner(&self, e: &[Fe]) -> Result<SubAlgebra> {
        if !self.is_idempotent(e) {
            return Err(Error::NotIdempotent);
        }
        self.subalgebra(&self.corner_space(e), e)
    }

    /// Quotient of the subalgebra `space` by the two-sided ideal `ideal ⊆ space`.
    /// Representatives are the RREF rows of `space` reduced modulo `ideal`.
    pub fn quotient(&self, space: &Subspace, ideal: &Subspace, unit: &[Fe]) -> Result<QuotientAlgebra> {
        let f = &self.field;
        let reps = Subspace::from_vectors(f, self.dim, &space.complement_reps(f, ideal));
        let basis = reps.vectors();
        let d = basis.len();
        let project = |v: &[Fe]| -> Result<Vector> {
            let r = ideal.reduce(f, v);
            reps.coordinates(f, &r).ok_or_else(|| Error::Internal("element outside the quotiented subalgebra".into()))
        };
        let mut mult = Vec::with_capacity(d * d);
        for a in &basis {
            for b in &basis {
                let c = project(&self.mul(a, b))?;
                mult.push(c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(k, &x)| (k as u32, x)).collect());
            }
        }
        let u = if d == 0 { vec![] } else { project(unit)? };
        let labels = (0..d).map(|i| format!("q{i}")).collect();
        let ctx = AlgebraContext::from_sparse_unchecked(f.clone(), labels, mult, u);
        Ok(QuotientAlgebra { ctx, reps, ideal: ideal.clone() })
    }

    pub fn center(&self) -> Subspace {
        let n = self.dim;
        let f = &self.field;
        // rows: for each basis b_i, constraint columns x ↦ x·b_i − b_i·x
        let mut m = Matrix::zeros(n * n, n);
        for i in 0..n {
            let b = self.basis_vector(i);
            for j in 0..n {
                let x = self.basis_vector(j);
                let c = self.sub(&self.mul(&x, &b), &self.mul(&b, &x));
                for k in 0..n {
                    m.set(i * n + k, j, c[k]);
                }
            }
        }
        linalg::nullspace(f, &m)
    }

    /// Replace the coefficient field along an embedding.
    pub fn extend_scalars(&self, emb: &Embedding) -> AlgebraContext {
        let mult = self.mult.iter().map(|l| l.iter().map(|&(k, c)| (k, emb.apply(c))).collect()).collect();
        AlgebraContext::from_sparse_unchecked(emb.big.clone(), self.labels.clone(), mult, emb.apply_vec(&self.unit))
    }

    /// Minimal polynomial of x over the unit `one`, modulo the subspace `modulo`
    /// (use the zero subspace for the honest minimal polynomial).
    pub fn min_poly_mod(&self, x: &[Fe], one: &[Fe], modulo: &Subspace) -> poly::Poly {
        let f = &self.field;
        let mut powers: Vec<Vector> = vec![modulo.reduce(f, one)];
        let mut cur = one.to_vec();
        loop {
            cur = self.mul(&cur, x);
            let red = modulo.reduce(f, &cur);
            // is red a combination of previous reduced powers?
            let k = powers.len();
            let m = Matrix::from_rows(self.dim, &powers).expect("consistent").transpose();
            if let Some(c) = linalg::solve(f, &m, &red).expect("dimensions") {
                let mut pl: poly::Poly = c.iter().map(|&v| f.neg(v)).collect();
                pl.push(1);
                let _ = k;
                return pl;
            }
            powers.push(red);
        }
    }

    /// Evaluate a polynomial at x with `one` as the unit.
    pub fn eval_poly(&self, pl: &[Fe], x: &[Fe], one: &[Fe]) -> Vector {
        let mut acc = self.zero();
        for &c in pl.iter().rev() {
            acc = self.mul(&acc, x);
            axpy(&self.field, &mut acc, c, one);
        }
        acc
    }
}

/// A subalgebra presented in its own basis, with the embedding into the ambient algebra.
#[derive(Clone, Debug)]
pub struct SubAlgebra {
    pub ctx: AlgebraContext,
    /// The subalgebra as a subspace of the ambient algebra; its RREF rows are the basis.
    pub space: Subspace,
}

impl SubAlgebra {
    pub fn to_ambient(&self, v: &[Fe]) -> Vector {
        self.space.combine(&self.ctx.field, v)
    }
    pub fn from_ambient(&self, v: &[Fe]) -> Option<Vector> {
        self.space.coordinates(&self.ctx.field, v)
    }
}

/// A quotient of a subalgebra by an ideal, presented on coset representatives.
#[derive(Clone, Debug)]
pub struct QuotientAlgebra {
    pub ctx: AlgebraContext,
    pub reps: Subspace,
    pub ideal: Subspace,
}

impl QuotientAlgebra {
    /// Coordinates of the class of an ambient element (which must lie in the subalgebra).
    pub fn project(&self, v: &[Fe]) -> Option<Vector> {
        let r = self.ideal.reduce(&self.ctx.field, v);
        self.reps.coordinates(&self.ctx.field, &r)
    }
    /// Canonical lift of a class to the ambient algebra.
    pub fn lift(&self, c: &[Fe]) -> Vector {
        self.reps.combine(&self.ctx.field, c)
    }
}

pub fn group_algebra(g: &PermGroup, field: &FiniteField) -> AlgebraContext {
    let n = g.order();
    let mut mult = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            mult.push(vec![(g.mul(a, b) as u32, 1)]);
        }
    }
    let labels = (0..n).map(|a| g.cycle_string(a)).collect();
    let mut unit = vec![0; n];
    unit[0] = 1;
    AlgebraContext::from_sparse_unchecked(field.clone(), labels, mult, unit)
}

/// Jacobson radical by the iterated trace method for characteristic p:
/// view A over GF(p), lift left multiplication matrices to the integers,
/// and cut down by the functionals z ↦ Tr(L̃_z^(p^i))/p^i mod p.
pub fn radical(a: &AlgebraContext) -> Subspace {
    let f = &a.field;
    let p = f.p();
    let m = f.m() as usize;
    let n = a.dim;
    let big_n = n * m;
    if n == 0 {
        return Subspace::zero(0);
    }
    let fp = FiniteField::prime_field(p).expect("prime");
    // GF(p)-basis of A: ω^k b_j, index j·m + k
    let gen = f.generator();
    let omega_pows: Vec<Fe> = (0..m).map(|k| f.pow(gen, k as u64)).collect();
    let to_fp = |v: &[Fe]| -> Vec<u64> {
        let mut out = Vec::with_capacity(big_n);
        for &c in v {
            out.extend(f.digits(c));
        }
        out
    };
    let from_fp = |w: &[u64]| -> Vector { (0..n).map(|j| f.from_digits(&w[j * m..(j + 1) * m])).collect() };
    let fp_basis: Vec<Vector> = (0..big_n)
        .map(|idx| {
            let mut v = vec![0; n];
            v[idx / m] = omega_pows[idx % m];
            v
        })
        .collect();
    // integer left-multiplication matrix of z over GF(p), rows = images of basis
    let lift_matrix = |z: &[Fe]| -> Vec<u64> {
        let mut mat = vec![0u64; big_n * big_n];
        for (r, b) in fp_basis.iter().enumerate() {
            let img = to_fp(&a.mul(z, b));
            mat[r * big_n..(r + 1) * big_n].copy_from_slice(&img);
        }
        mat
    };
    let mut levels = 0u32;
    while (p as u128).pow(levels + 1) <= big_n as u128 {
        levels += 1;
    }
    // current ideal I as GF(p)-subspace of GF(p)^N
    let mut ideal = Subspace::full(big_n);
    for i in 0..=levels {
        let modulus = (p as u128).pow(i + 1);
        let pi = (p as u128).pow(i);
        let basis = ideal.vectors();
        if basis.is_empty() {
            break;
        }
        // g_i on the basis of I
        let g_vals: Vec<u64> = basis
            .iter()
            .map(|w| {
                let mat = lift_matrix(&from_fp(w));
                let pw = int_matrix_pow(&mat, big_n, pi as u64, modulus);
                let mut tr: u128 = 0;
                for d in 0..big_n {
                    tr = (tr + pw[d * big_n + d] as u128) % modulus;
                }
                ((tr / pi) % p as u128) as u64
            })
            .collect();
        // constraints: for x = Σ c_r w_r, g_i(x·y) = 0 for every y in the GF(p)-basis
        let mut rows = vec![];
        for y in &fp_basis {
            let row: Vec<u64> = basis
                .iter()
                .map(|w| {
                    let prod = to_fp(&a.mul(&from_fp(w), y));
                    let coords = ideal.coordinates(&fp, &prod).expect("I is an ideal");
                    coords.iter().zip(&g_vals).fold(0u64, |acc, (&c, &g)| (acc + c * g) % p)
                })
                .collect();
            rows.push(row);
        }
        let cm = Matrix::from_rows(basis.len(), &rows).expect("shape");
        let ker = linalg::nullspace(&fp, &cm);
        let new_vecs: Vec<Vec<u64>> = ker.vectors().iter().map(|c| ideal.combine(&fp, c)).collect();
        ideal = Subspace::from_vectors(&fp, big_n, &new_vecs);
    }
    // back to GF(p^m): the radical is a GF(p^m)-subspace
    let vs: Vec<Vector> = ideal.vectors().iter().map(|w| from_fp(w)).collect();
    Subspace::from_vectors(f, n, &vs)
}

fn int_matrix_mul(a: &[u64], b: &[u64], n: usize, modulus: u128) -> Vec<u64> {
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            let brow = &b[k * n..(k + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for j in 0..n {
                orow[j] = ((orow[j] as u128 + x as u128 * brow[j] as u128) % modulus) as u64;
            }
        }
    }
    out
}

fn int_matrix_pow(a: &[u64], n: usize, mut e: u64, modulus: u128) -> Vec<u64> {
    let mut acc = vec![0u64; n * n];
    for i in 0..n {
        acc[i * n + i] = 1;
    }
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = int_matrix_mul(&acc, &base, n, modulus);
        }
        e >>= 1;
        if e > 0 {
            base = int_matrix_mul(&base, &base, n, modulus);
        }
    }
    acc
}

/// Radical of the corner eAe, given J(A): J(eAe) = e·J(A)·e.
pub fn corner_radical(a: &AlgebraContext, j: &Subspace, e: &[Fe]) -> Subspace {
    let vs: Vec<Vector> = j.vectors().iter().map(|x| a.mul3(e, x, e)).collect();
    Subspace::from_vectors(&a.field, a.dim, &vs)
}

/// Lift an idempotent modulo a nilpotent ideal by e ← 3e² − 2e³.
pub fn lift_idempotent(a: &AlgebraContext, e0: &[Fe]) -> Result<Vector> {
    let f = &a.field;
    let three = f.from_int(3);
    let two = f.from_int(2);
    let mut e = e0.to_vec();
    let max_steps = (usize::BITS - a.dim.leading_zeros()) as usize + 3;
    for _ in 0..=max_steps {
        let e2 = a.mul(&e, &e);
        if e2 == e {
            return Ok(e);
        }
        let e3 = a.mul(&e2, &e);
        e = a.sub(&a.scale(three, &e2), &a.scale(two, &e3));
    }
    Err(Error::Internal("idempotent lifting did not converge".into()))
}

/// dim(eAe / J(eAe)) == 1, given J(A).
pub fn is_primitive_with(a: &AlgebraContext, j: &Subspace, e: &[Fe]) -> bool {
    if is_zero(e) {
        return false;
    }
    a.corner_space(e).dim() == corner_radical(a, j, e).dim() + 1
}

pub fn is_primitive(a: &AlgebraContext, e: &[Fe]) -> bool {
    is_primitive_with(a, &radical(a), e)
}

/// Decompose the idempotent `e` into pairwise orthogonal primitive idempotents.
pub fn primitive_decomposition(a: &AlgebraContext, e: &[Fe], rng: &mut ChaCha8Rng) -> Result<Vec<Vector>> {
    if !a.is_idempotent(e) {
        return Err(Error::NotIdempotent);
    }
    if is_zero(e) {
        return Ok(vec![]);
    }
    let j = radical(a);
    primitive_decomposition_with(a, &j, e, rng)
}

pub fn primitive_decomposition_with(a: &AlgebraContext, j: &Subspace, e: &[Fe], rng: &mut ChaCha8Rng) -> Result<Vec<Vector>> {
    let mut out = vec![];
    let mut stack = vec![e.to_vec()];
    while let Some(x) = stack.pop() {
        match split_idempotent(a, j, &x, rng)? {
            None => out.push(x),
            Some((u, v)) => {
                stack.push(v);
                stack.push(u);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Split a non-primitive idempotent e into e = u + v (orthogonal, nonzero),
/// or return None if e is primitive.
fn split_idempotent(a: &AlgebraContext, j: &Subspace, e: &[Fe], rng: &mut ChaCha8Rng) -> Result<Option<(Vector, Vector)>> {
    let f = &a.field;
    let c = a.corner_space(e);
    let jc = corner_radical(a, j, e);
    let top = c.dim() - jc.dim();
    if top == 1 {
        return Ok(None);
    }
    let mut saw_nonsplit_field = false;
    for _ in 0..SPLIT_TRIES {
        let x = a.random_in(&c, rng);
        let mu = a.min_poly_mod(&x, e, &jc);
        let fac = poly::factor_poly(f, &mu)?;
        if fac.factors.len() < 2 {
            if fac.factors.len() == 1 && fac.factors[0].0.len() > 2 && fac.factors[0].0.len() - 1 == top {
                saw_nonsplit_field = true;
            }
            continue;
        }
        // CRT idempotent: h ≡ 1 mod g^k, h ≡ 0 mod the rest
        let (g, k) = &fac.factors[0];
        let mut gk: poly::Poly = vec![1];
        for _ in 0..*k {
            gk = poly::mul(f, &gk, g);
        }
        let rest = poly::divrem(f, &mu, &gk).0;
        let (_, s, _) = poly::xgcd(f, &rest, &gk);
        // s·rest ≡ 1 mod g^k and ≡ 0 mod rest
        let h = poly::rem(f, &poly::mul(f, &s, &rest), &mu);
        let e0 = a.eval_poly(&h, &x, e);
        let u = lift_idempotent(a, &e0)?;
        let v = a.sub(e, &u);
        if is_zero(&u) || is_zero(&v) {
            continue;
        }
        if a.mul(&u, e) != u || a.mul(e, &u) != u {
            return Err(Error::Internal("split idempotent escaped its corner".into()));
        }
        return Ok(Some((u, v)));
    }
    if saw_nonsplit_field {
        return Err(Error::FieldTooSmall { p: f.p(), m: f.m() });
    }
    Err(Error::Exhausted(format!("could not split an idempotent with dim(eAe/J) = {top}")))
}

/// Central primitive idempotents of A: decompose 1 inside the center.
pub fn block_idempotents_of(a: &AlgebraContext, rng: &mut ChaCha8Rng) -> Result<Vec<Vector>> {
    let z = a.center();
    let sub = a.subalgebra(&z, &a.unit)?;
    let prims = primitive_decomposition(&sub.ctx, &sub.ctx.unit.clone(), rng)?;
    let mut out: Vec<Vector> = prims.iter().map(|v| sub.to_ambient(v)).collect();
    out.sort();
    Ok(out)
}

/// Blocks of kG, using class sums as a basis of the center.
pub fn block_idempotents(kg: &AlgebraContext, g: &PermGroup, rng: &mut ChaCha8Rng) -> Result<Vec<Vector>> {
    let sums: Vec<Vector> = g
        .conjugacy_classes()
        .iter()
        .map(|cls| {
            let mut v = kg.zero();
            for &x in cls {
                v[x] = 1;
            }
            v
        })
        .collect();
    let z = Subspace::from_vectors(&kg.field, kg.dim, &sums);
    let sub = kg.subalgebra(&z, &kg.unit)?;
    let prims = primitive_decomposition(&sub.ctx, &sub.ctx.unit.clone(), rng)?;
    let mut out: Vec<Vector> = prims.iter().map(|v| sub.to_ambient(v)).collect();
    // principal block first is decided later; here sort canonically
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c2() -> PermGroup {
        PermGroup::from_generators("C2", 2, &[vec![1, 0]], 500).unwrap()
    }

    #[test]
    fn kc2_char2_radical() {
        let f = FiniteField::new(2, 1).unwrap();
        let a = group_algebra(&c2(), &f);
        let j = radical(&a);
        assert_eq!(j.dim(), 1);
        assert!(j.contains(&f, &[1, 1]));
    }

    #[test]
    fn kc2_char3_semisimple() {
        let f = FiniteField::new(3, 1).unwrap();
        let a = group_algebra(&c2(), &f);
        assert_eq!(radical(&a).dim(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = primitive_decomposition(&a, &a.unit.clone(), &mut rng).unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn unit_checks() {
        let f = FiniteField::new(3, 1).unwrap();
        let a = group_algebra(&c2(), &f);
        assert!(!a.is_unit(&[1, 1]));
        assert!(a.is_unit(&[0, 1]));
        assert_eq!(a.invert(&[0, 1]).unwrap(), vec![0, 1]);
        assert!(matches!(a.invert(&[1, 2]), Err(Error::Singular)));
    }
}
