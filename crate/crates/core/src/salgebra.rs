//! Interior D-algebras: twisted fixed points, relative traces, Brauer
//! quotients, points and multiplicities, local invariant decompositions.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, AlgebraContext, QuotientAlgebra, SubAlgebra, Vector};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::groups::{smallest_prime_factor, Injection, PermGroup, Subgroup, TwistedDiagonal};
use crate::linalg::{self, is_zero, Matrix, Subspace};
use crate::poly;

/// Attempts at building the splitting element of a non-local primitive idempotent.
const ORBIT_SPLIT_TRIES: usize = 64;

/// Deterministic 64-bit FNV-1a, used to derive per-task RNG seeds.
pub fn fnv(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for part in parts {
        for &b in *part {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn usize_bytes(v: &[usize]) -> Vec<u8> {
    v.iter().flat_map(|x| (*x as u64).to_le_bytes()).collect()
}

/// Brauer quotient A(Δ) presented by the fixed subspace, the trace subspace,
/// and coset representatives.
#[derive(Clone, Debug)]
pub struct BrauerQuotient {
    pub source: TwistedDiagonal,
    pub fixed: Subspace,
    pub traces: Subspace,
    pub reps: Subspace,
}

impl BrauerQuotient {
    pub fn dim(&self) -> usize {
        self.reps.dim()
    }

    /// br(x) in representative coordinates; None if x is not fixed.
    pub fn project(&self, a: &AlgebraContext, x: &[Fe]) -> Option<Vector> {
        if !self.fixed.contains(&a.field, x) {
            return None;
        }
        let r = self.traces.reduce(&a.field, x);
        self.reps.coordinates(&a.field, &r)
    }

    pub fn lift(&self, a: &AlgebraContext, c: &[Fe]) -> Vector {
        self.reps.combine(&a.field, c)
    }

    pub fn is_zero_image(&self, a: &AlgebraContext, x: &[Fe]) -> bool {
        self.traces.contains(&a.field, x)
    }
}

/// The fixed subalgebra A^P with its radical and a decomposition of 1.
#[derive(Clone, Debug)]
pub struct FixedAlgebra {
    pub sub: SubAlgebra,
    pub radical: Subspace,
}

#[derive(Clone, Debug)]
pub struct PointedGroup {
    pub subgroup: Subgroup,
    /// A primitive idempotent of A^P representing the point (ambient coordinates).
    pub rep: Vector,
    pub local: bool,
    /// Members of the point in the fixed primitive decomposition of 1 in A^P.
    pub multiplicity: usize,
}

/// A primitive decomposition of 1 in A^P and its points.
pub type Points = (Vec<Vector>, Vec<PointedGroup>);

#[derive(Default)]
struct Caches {
    fixed: HashMap<Vec<(usize, usize)>, Subspace>,
    quotients: HashMap<TwistedDiagonal, Arc<BrauerQuotient>>,
    algebras: HashMap<Subgroup, Arc<QuotientAlgebra>>,
    fixed_algebras: HashMap<Subgroup, Arc<FixedAlgebra>>,
    points: HashMap<Subgroup, Arc<Points>>,
    maximal: HashMap<Subgroup, Vec<Subgroup>>,
}

/// An algebra with a group homomorphism D → A^×.
pub struct InteriorAlgebra {
    pub alg: AlgebraContext,
    pub group: Arc<PermGroup>,
    pub d: Subgroup,
    /// Image of each element of D, indexed by position in `d.elems`.
    pub structural: Vec<Vector>,
    left: Vec<Matrix>,
    right: Vec<Matrix>,
    pub seed: u64,
    cache: Mutex<Caches>,
}

impl std::fmt::Debug for InteriorAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InteriorAlgebra").field("dim", &self.alg.dim).field("d", &self.d).finish()
    }
}

impl InteriorAlgebra {
    /// Checks that the structural map is a homomorphism into the units.
    pub fn new(alg: AlgebraContext, group: Arc<PermGroup>, d: Subgroup, structural: Vec<Vector>, seed: u64) -> Result<Self> {
        if structural.len() != d.order() {
            return Err(Error::DimensionMismatch("one structural image per element of D".into()));
        }
        let pos = |g: usize| d.elems.binary_search(&g).expect("closed subgroup");
        if structural[pos(0)] != alg.unit {
            return Err(Error::Internal("structural map does not send 1 to 1".into()));
        }
        for (i, &x) in d.elems.iter().enumerate() {
            for (j, &y) in d.elems.iter().enumerate() {
                let xy = group.mul(x, y);
                if alg.mul(&structural[i], &structural[j]) != structural[pos(xy)] {
                    return Err(Error::Internal("structural map is not multiplicative".into()));
                }
            }
        }
        let mut left = Vec::with_capacity(d.order());
        let mut right = Vec::with_capacity(d.order());
        for &x in &d.elems {
            let sx = &structural[pos(x)];
            let sxi = &structural[pos(group.inv(x))];
            let lrows: Vec<Vector> = (0..alg.dim).map(|j| alg.mul(sx, &alg.basis_vector(j))).collect();
            let rrows: Vec<Vector> = (0..alg.dim).map(|j| alg.mul(&alg.basis_vector(j), sxi)).collect();
            left.push(Matrix::from_rows(alg.dim, &lrows)?);
            right.push(Matrix::from_rows(alg.dim, &rrows)?);
        }
        Ok(InteriorAlgebra { alg, group, d, structural, left, right, seed, cache: Mutex::new(Caches::default()) })
    }

    pub fn dim(&self) -> usize {
        self.alg.dim
    }

    /// The same interior algebra over GF(p^{2m}).
    pub fn extended(&self) -> Result<(InteriorAlgebra, crate::field::Embedding)> {
        let big = self.alg.field.doubled()?;
        let emb = self.alg.field.embedding_into(&big)?;
        let alg = self.alg.extend_scalars(&emb);
        let st = self.structural.iter().map(|v| emb.apply_vec(v)).collect();
        Ok((InteriorAlgebra::new(alg, self.group.clone(), self.d.clone(), st, self.seed)?, emb))
    }

    /// Index of a primitive local idempotent of A^P among `local_points(p)`.
    pub fn local_point_of(&self, p: &Subgroup, i: &[Fe]) -> Result<Option<usize>> {
        let space = self.fixed_points(p);
        Ok(self.local_points(p)?.iter().position(|pt| associate_in(&self.alg, &space, &pt.rep, i)))
    }

    fn pos(&self, g: usize) -> usize {
        self.d.elems.binary_search(&g).expect("element of D")
    }

    pub fn structural_of(&self, g: usize) -> &Vector {
        &self.structural[self.pos(g)]
    }

    pub fn rng_for(&self, tag: &str, key: &[usize]) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(fnv(&[&self.seed.to_le_bytes(), tag.as_bytes(), &usize_bytes(key)]))
    }

    /// (a, b)·x = σ(a)·x·σ(b)⁻¹.
    pub fn biact(&self, a: usize, b: usize, x: &[Fe]) -> Vector {
        let f = &self.alg.field;
        let y = self.left[self.pos(a)].vec_mul(f, x);
        self.right[self.pos(b)].vec_mul(f, &y)
    }

    /// Conjugation by an element of D.
    pub fn conj(&self, g: usize, x: &[Fe]) -> Vector {
        self.biact(g, g, x)
    }

    /// Elements fixed by every pair in `gens` (pairs (a, b) ∈ D×D).
    pub fn fixed_by_pairs(&self, gens: &[(usize, usize)]) -> Subspace {
        let mut key = gens.to_vec();
        key.sort_unstable();
        if let Some(s) = self.cache.lock().unwrap().fixed.get(&key) {
            return s.clone();
        }
        let f = &self.alg.field;
        let n = self.alg.dim;
        let mut k = Matrix::zeros(n * key.len().max(1), n);
        for (gi, &(a, b)) in key.iter().enumerate() {
            let m = self.left[self.pos(a)].mul(f, &self.right[self.pos(b)]).expect("square");
            for col in 0..n {
                for j in 0..n {
                    let mut v = m.get(j, col);
                    if j == col {
                        v = f.sub(v, 1);
                    }
                    k.set(gi * n + col, j, v);
                }
            }
        }
        let s = linalg::nullspace(f, &k);
        self.cache.lock().unwrap().fixed.insert(key, s.clone());
        s
    }

    /// ^φA^P = {a : φ(p)·a·p⁻¹ = a}.
    pub fn fixed_subspace(&self, t: &TwistedDiagonal) -> Subspace {
        let gens = self.group.generating_set(&t.domain_group());
        let pairs: Vec<(usize, usize)> = gens.iter().map(|&p| (t.apply(p).expect("in domain"), p)).collect();
        self.fixed_by_pairs(&pairs)
    }

    /// A^P for the diagonal action.
    pub fn fixed_points(&self, p: &Subgroup) -> Subspace {
        self.fixed_subspace(&Injection::identity(p))
    }

    pub fn maximal_subgroups(&self, p: &Subgroup) -> Vec<Subgroup> {
        if p.order() == 1 {
            return vec![];
        }
        if let Some(v) = self.cache.lock().unwrap().maximal.get(p) {
            return v.clone();
        }
        let prime = smallest_prime_factor(p.order() as u64);
        let target = p.order() / prime as usize;
        let v: Vec<Subgroup> = self.group.p_subgroups_in(p, prime).into_iter().filter(|h| h.order() == target).collect();
        self.cache.lock().unwrap().maximal.insert(p.clone(), v.clone());
        v
    }

    /// Left coset representatives of W in P.
    pub fn coset_reps(&self, p: &Subgroup, w: &Subgroup) -> Vec<usize> {
        let mut seen: HashSet<usize> = HashSet::new();
        let mut reps = vec![];
        for &x in &p.elems {
            if seen.contains(&x) {
                continue;
            }
            reps.push(x);
            for &y in &w.elems {
                seen.insert(self.group.mul(x, y));
            }
        }
        reps
    }

    /// tr from Δ(φ|W, W) up to Δ(φ, P), applied to a ∈ ^φA^W.
    pub fn relative_trace(&self, u: &TwistedDiagonal, w: &Subgroup, a: &[Fe]) -> Result<Vector> {
        let v = u.restrict(w).ok_or_else(|| Error::Input("trace from a non-subgroup".into()))?;
        if !self.fixed_subspace(&v).contains(&self.alg.field, a) {
            return Err(Error::Input("element is not fixed by the smaller twisted diagonal".into()));
        }
        Ok(self.trace_unchecked(u, w, a))
    }

    fn trace_unchecked(&self, u: &TwistedDiagonal, w: &Subgroup, a: &[Fe]) -> Vector {
        let mut acc = self.alg.zero();
        for x in self.coset_reps(&u.domain_group(), w) {
            let y = self.biact(u.apply(x).unwrap(), x, a);
            acc = self.alg.add(&acc, &y);
        }
        acc
    }

    pub fn brauer_quotient(&self, t: &TwistedDiagonal) -> Arc<BrauerQuotient> {
        if let Some(q) = self.cache.lock().unwrap().quotients.get(t) {
            return q.clone();
        }
        let f = &self.alg.field;
        let fixed = self.fixed_subspace(t);
        let p = t.domain_group();
        let mut tr_vecs = vec![];
        for w in self.maximal_subgroups(&p) {
            let sub = t.restrict(&w).unwrap();
            for v in self.fixed_subspace(&sub).vectors() {
                tr_vecs.push(self.trace_unchecked(t, &w, &v));
            }
        }
        let traces = Subspace::from_vectors(f, self.alg.dim, &tr_vecs);
        let reps = Subspace::from_vectors(f, self.alg.dim, &fixed.complement_reps(f, &traces));
        let q = Arc::new(BrauerQuotient { source: t.clone(), fixed, traces, reps });
        self.cache.lock().unwrap().quotients.insert(t.clone(), q.clone());
        q
    }

    pub fn brauer_dim(&self, t: &TwistedDiagonal) -> usize {
        self.brauer_quotient(t).dim()
    }

    /// A(P) as an algebra.
    pub fn brauer_algebra(&self, p: &Subgroup) -> Result<Arc<QuotientAlgebra>> {
        if let Some(q) = self.cache.lock().unwrap().algebras.get(p) {
            return Ok(q.clone());
        }
        let bq = self.brauer_quotient(&Injection::identity(p));
        let q = Arc::new(self.alg.quotient(&bq.fixed, &bq.traces, &self.alg.unit)?);
        self.cache.lock().unwrap().algebras.insert(p.clone(), q.clone());
        Ok(q)
    }

    pub fn br(&self, p: &Subgroup, x: &[Fe]) -> Option<Vector> {
        self.brauer_quotient(&Injection::identity(p)).project(&self.alg, x)
    }

    /// The product A(ψ) × A(φ) → A(ψφ) in representative coordinates.
    pub fn quotient_product(&self, psi: &TwistedDiagonal, u: &[Fe], phi: &TwistedDiagonal, v: &[Fe]) -> Result<Vector> {
        if phi.image_group() != psi.domain_group() {
            return Err(Error::Input("twisted diagonals are not composable".into()));
        }
        let comp = phi.then(psi).expect("composable");
        let (qa, qb, qc) = (self.brauer_quotient(psi), self.brauer_quotient(phi), self.brauer_quotient(&comp));
        let prod = self.alg.mul(&qa.lift(&self.alg, u), &qb.lift(&self.alg, v));
        qc.project(&self.alg, &prod).ok_or_else(|| Error::Internal("product left the composite fixed subspace".into()))
    }

    /// Bifreeness certificate: A(U) = 0 for U = P×1 and 1×P, P of prime order.
    pub fn check_bifree(&self) -> Result<()> {
        let f = &self.alg.field;
        for &x in &self.d.elems {
            let prime = self.group.element_order(x);
            if x == 0 || smallest_prime_factor(prime as u64) as usize != prime {
                continue;
            }
            let mut powers = vec![0usize];
            for _ in 1..prime {
                powers.push(self.group.mul(*powers.last().unwrap(), x));
            }
            for side in 0..2 {
                let pair = |g: usize| if side == 0 { (g, 0) } else { (0, g) };
                let fixed = self.fixed_by_pairs(&[pair(x)]);
                let tr: Vec<Vector> = (0..self.alg.dim)
                    .map(|j| {
                        let b = self.alg.basis_vector(j);
                        let mut acc = self.alg.zero();
                        for &g in &powers {
                            let (a, c) = pair(g);
                            acc = self.alg.add(&acc, &self.biact(a, c, &b));
                        }
                        acc
                    })
                    .collect();
                let traces = Subspace::from_vectors(f, self.alg.dim, &tr);
                if fixed.dim() != traces.dim() {
                    return Err(Error::NotBifree(format!(
                        "nonzero Brauer quotient for <{}> acting on the {} side",
                        self.group.cycle_string(x),
                        if side == 0 { "left" } else { "right" }
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn fixed_algebra(&self, p: &Subgroup) -> Result<Arc<FixedAlgebra>> {
        if let Some(fa) = self.cache.lock().unwrap().fixed_algebras.get(p) {
            return Ok(fa.clone());
        }
        let space = self.fixed_points(p);
        let sub = self.alg.subalgebra(&space, &self.alg.unit)?;
        let radical = algebra::radical(&sub.ctx);
        let fa = Arc::new(FixedAlgebra { sub, radical });
        self.cache.lock().unwrap().fixed_algebras.insert(p.clone(), fa.clone());
        Ok(fa)
    }

    /// Primitive decomposition of an idempotent e ∈ A^P inside A^P.
    pub fn decompose_in(&self, p: &Subgroup, e: &[Fe], rng: &mut ChaCha8Rng) -> Result<Vec<Vector>> {
        let fa = self.fixed_algebra(p)?;
        let es = fa.sub.from_ambient(e).ok_or_else(|| Error::Input("idempotent is not P-fixed".into()))?;
        if !fa.sub.ctx.is_idempotent(&es) {
            return Err(Error::NotIdempotent);
        }
        if is_zero(&es) {
            return Ok(vec![]);
        }
        let parts = algebra::primitive_decomposition_with(&fa.sub.ctx, &fa.radical, &es, rng)?;
        Ok(parts.iter().map(|v| fa.sub.to_ambient(v)).collect())
    }

    pub fn is_primitive_in(&self, p: &Subgroup, e: &[Fe]) -> Result<bool> {
        let fa = self.fixed_algebra(p)?;
        let es = fa.sub.from_ambient(e).ok_or_else(|| Error::Input("idempotent is not P-fixed".into()))?;
        Ok(algebra::is_primitive_with(&fa.sub.ctx, &fa.radical, &es))
    }

    pub fn is_local(&self, p: &Subgroup, e: &[Fe]) -> bool {
        !self.brauer_quotient(&Injection::identity(p)).is_zero_image(&self.alg, e)
    }

    /// Associate test for idempotents of the subalgebra with basis `space`.
    pub fn associate_in(&self, space: &Subspace, i: &[Fe], j: &[Fe]) -> bool {
        associate_in(&self.alg, space, i, j)
    }

    /// Points of A^P: the fixed decomposition of 1 and the grouped points.
    pub fn points(&self, p: &Subgroup) -> Result<Arc<Points>> {
        if let Some(pts) = self.cache.lock().unwrap().points.get(p) {
            return Ok(pts.clone());
        }
        let mut rng = self.rng_for("points", &p.elems);
        let decomp = self.decompose_in(p, &self.alg.unit, &mut rng)?;
        let space = self.fixed_points(p);
        let mut pts: Vec<PointedGroup> = vec![];
        for i in &decomp {
            match pts.iter_mut().find(|pt| associate_in(&self.alg, &space, &pt.rep, i)) {
                Some(pt) => pt.multiplicity += 1,
                None => pts.push(PointedGroup { subgroup: p.clone(), rep: i.clone(), local: self.is_local(p, i), multiplicity: 1 }),
            }
        }
        let out = Arc::new((decomp, pts));
        self.cache.lock().unwrap().points.insert(p.clone(), out.clone());
        Ok(out)
    }

    pub fn local_points(&self, p: &Subgroup) -> Result<Vec<PointedGroup>> {
        Ok(self.points(p)?.1.iter().filter(|pt| pt.local).cloned().collect())
    }

    /// Index (into `points(p)`) of the point containing a primitive idempotent of A^P.
    pub fn point_of(&self, p: &Subgroup, i: &[Fe]) -> Result<Option<usize>> {
        let pts = self.points(p)?;
        let space = self.fixed_points(p);
        Ok(pts.1.iter().position(|pt| associate_in(&self.alg, &space, &pt.rep, i)))
    }

    pub fn multiplicity(&self, pg: &PointedGroup) -> Result<usize> {
        let pts = self.points(&pg.subgroup)?;
        let space = self.fixed_points(&pg.subgroup);
        Ok(pts.0.iter().filter(|i| associate_in(&self.alg, &space, &pg.rep, i)).count())
    }

    /// m(R'_ε', R_ε): members of ε' in a primitive decomposition of an element of ε in A^{R'}.
    pub fn relative_multiplicity(&self, small: &PointedGroup, big: &PointedGroup, rng: &mut ChaCha8Rng) -> Result<usize> {
        if !small.subgroup.is_subset_of(&big.subgroup) {
            return Err(Error::Input("relative multiplicity needs R' ≤ R".into()));
        }
        let parts = self.decompose_in(&small.subgroup, &big.rep, rng)?;
        let space = self.fixed_points(&small.subgroup);
        Ok(parts.iter().filter(|x| associate_in(&self.alg, &space, &small.rep, x)).count())
    }

    /// Q_δ ≤ P_γ.
    pub fn pointed_leq(&self, q: &PointedGroup, p: &PointedGroup, rng: &mut ChaCha8Rng) -> Result<bool> {
        if !q.subgroup.is_subset_of(&p.subgroup) {
            return Err(Error::Input("pointed_leq needs Q ≤ P".into()));
        }
        Ok(self.relative_multiplicity(q, p, rng)? > 0)
    }

    /// A P-stable decomposition of 1 into idempotents, each primitive and
    /// local in the fixed algebra of its stabilizer.
    pub fn local_invariant_decomposition(&self, p: &Subgroup) -> Result<Vec<(Vector, Subgroup)>> {
        let mut rng = self.rng_for("lid", &p.elems);
        let mut out = vec![];
        for j in self.decompose_in(p, &self.alg.unit, &mut rng)? {
            self.lid_primitive(p, &j, &mut rng, &mut out)?;
        }
        Ok(out)
    }

    fn lid_primitive(&self, p: &Subgroup, j: &[Fe], rng: &mut ChaCha8Rng, out: &mut Vec<(Vector, Subgroup)>) -> Result<()> {
        if self.is_local(p, j) {
            out.push((j.to_vec(), p.clone()));
            return Ok(());
        }
        if p.order() == 1 {
            return Err(Error::Internal("a primitive idempotent of A is never non-local".into()));
        }
        for v in self.maximal_subgroups(p) {
            if let Some((i, x)) = self.split_over(p, &v, j, rng)? {
                let mut inner = vec![];
                for part in self.decompose_in(&v, &i, rng)? {
                    self.lid_primitive(&v, &part, rng, &mut inner)?;
                }
                let mut xk = 0usize;
                let prime = p.order() / v.order();
                for _ in 0..prime {
                    for (e, stab) in &inner {
                        let ce = self.conj(xk, e);
                        let cs = self.group.conjugate_subgroup(xk, stab);
                        out.push((ce, cs));
                    }
                    xk = self.group.mul(xk, x);
                }
                return Ok(());
            }
        }
        Err(Error::Internal("non-local primitive idempotent is not a relative trace from a maximal subgroup".into()))
    }

    /// For j primitive in A^P and j ∈ tr_V^P(jA^Vj), find an idempotent i ∈ jA^Vj whose
    /// P/V-conjugates are orthogonal and sum to j. Returns (i, x) with x ∈ P∖V.
    fn split_over(&self, p: &Subgroup, v: &Subgroup, j: &[Fe], rng: &mut ChaCha8Rng) -> Result<Option<(Vector, usize)>> {
        let a = &self.alg;
        let f = &a.field;
        let x = *p.elems.iter().find(|&&g| !v.contains(g)).expect("proper subgroup");
        let prime = p.order() / v.order();
        let c_space = {
            let vs: Vec<Vector> = self.fixed_points(v).vectors().iter().map(|b| a.mul3(j, b, j)).collect();
            Subspace::from_vectors(f, a.dim, &vs)
        };
        let sigma_pow = |y: &[Fe], k: usize| -> Vector {
            let mut cur = y.to_vec();
            for _ in 0..k {
                cur = self.conj(x, &cur);
            }
            cur
        };
        let trace = |y: &[Fe]| -> Vector {
            let mut acc = a.zero();
            for k in 0..prime {
                acc = a.add(&acc, &sigma_pow(y, k));
            }
            acc
        };
        // solve trace(c) = j over c ∈ C
        let basis = c_space.vectors();
        let images: Vec<Vector> = basis.iter().map(|b| trace(b)).collect();
        let m = Matrix::from_rows(a.dim, &images)?.transpose();
        let Some(sol) = linalg::solve(f, &m, j)? else { return Ok(None) };
        let kernel = linalg::nullspace(f, &m);
        let c_fixed = {
            let vs: Vec<Vector> = self.fixed_points(p).vectors().iter().map(|b| a.mul3(j, b, j)).collect();
            Subspace::from_vectors(f, a.dim, &vs)
        };
        let q = f.order();
        for attempt in 0..ORBIT_SPLIT_TRIES {
            let mut coords = sol.clone();
            if attempt > 0 {
                let kc: Vec<Fe> = (0..kernel.dim()).map(|_| rng.gen_range(0..q)).collect();
                let kv = kernel.combine(f, &kc);
                coords = coords.iter().zip(&kv).map(|(&s, &t)| f.add(s, t)).collect();
            }
            let c = c_space.combine(f, &coords);
            // y0 = Σ k·σ^k(c) satisfies σ(y0) = y0 − j
            let mut y = a.zero();
            for k in 1..prime {
                let term = a.scale(f.from_int(k as i64), &sigma_pow(&c, k));
                y = a.add(&y, &term);
            }
            if attempt > 0 {
                let z = a.random_in(&c_fixed, rng);
                y = a.add(&y, &z);
            }
            let mu = a.min_poly_mod(&y, j, &Subspace::zero(a.dim));
            let fac = poly::factor_poly(f, &mu)?;
            for (g, k) in &fac.factors {
                let mut gk: poly::Poly = vec![1];
                for _ in 0..*k {
                    gk = poly::mul(f, &gk, g);
                }
                if gk.len() == mu.len() {
                    continue;
                }
                let rest = poly::divrem(f, &mu, &gk).0;
                let (_, s, _) = poly::xgcd(f, &rest, &gk);
                let h = poly::rem(f, &poly::mul(f, &s, &rest), &mu);
                let e = a.eval_poly(&h, &y, j);
                let orbit: Vec<Vector> = (0..prime).map(|k| sigma_pow(&e, k)).collect();
                let mut ok = a.is_idempotent(&e) && !is_zero(&e);
                for s1 in 0..prime {
                    for s2 in 0..prime {
                        if s1 != s2 && !is_zero(&a.mul(&orbit[s1], &orbit[s2])) {
                            ok = false;
                        }
                    }
                }
                let mut total = a.zero();
                for o in &orbit {
                    total = a.add(&total, o);
                }
                if ok && total == j {
                    return Ok(Some((e, x)));
                }
            }
        }
        Err(Error::FieldTooSmall { p: f.p(), m: f.m() })
    }
}

/// i ~ j in the subalgebra `space` iff i ∈ span{t·s : t ∈ i·C·j, s ∈ j·C·i}.
pub fn associate_in(a: &AlgebraContext, space: &Subspace, i: &[Fe], j: &[Fe]) -> bool {
    if i == j {
        return true;
    }
    let f = &a.field;
    let basis = space.vectors();
    let icj = Subspace::from_vectors(f, a.dim, &basis.iter().map(|c| a.mul3(i, c, j)).collect::<Vec<_>>());
    let jci = Subspace::from_vectors(f, a.dim, &basis.iter().map(|c| a.mul3(j, c, i)).collect::<Vec<_>>());
    if icj.dim() == 0 || jci.dim() == 0 {
        return false;
    }
    a.product_span(&icj, &jci).contains(f, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::group_algebra;
    use crate::field::FiniteField;

    fn kd(p: u64, gens: &[Vec<u32>], degree: usize) -> InteriorAlgebra {
        let g = Arc::new(PermGroup::from_generators("D", degree, gens, 500).unwrap());
        let f = FiniteField::new(p, 1).unwrap();
        let a = group_algebra(&g, &f);
        let d = g.whole();
        let st: Vec<Vector> = d.elems.iter().map(|&x| a.basis_vector(x)).collect();
        InteriorAlgebra::new(a, g, d, st, 7).unwrap()
    }

    #[test]
    fn kc2_quotients() {
        let a = kd(2, &[vec![1, 0]], 2);
        let whole = a.d.clone();
        assert_eq!(a.fixed_points(&whole).dim(), 2);
        assert_eq!(a.brauer_dim(&Injection::identity(&whole)), 2);
        assert_eq!(a.brauer_dim(&Injection::identity(&Subgroup::trivial())), 2);
        let tr = a.relative_trace(&Injection::identity(&whole), &Subgroup::trivial(), &[1, 0]).unwrap();
        assert!(is_zero(&tr));
        // br(g)·br(g) = br(1)
        let id = Injection::identity(&whole);
        let q = a.brauer_quotient(&id);
        let g = q.project(&a.alg, &[0, 1]).unwrap();
        let gg = a.quotient_product(&id, &g, &id, &g).unwrap();
        assert_eq!(gg, q.project(&a.alg, &[1, 0]).unwrap());
        a.check_bifree().unwrap();
    }

    #[test]
    fn kd_single_local_point() {
        let a = kd(2, &[vec![1, 2, 3, 0], vec![3, 2, 1, 0]], 4);
        let pts = a.local_points(&a.d.clone()).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].multiplicity, 1);
        let lid = a.local_invariant_decomposition(&a.d.clone()).unwrap();
        assert_eq!(lid.len(), 1);
        assert_eq!(lid[0].1, a.d);
    }

    fn sub_kg(p: u64, gens: &[Vec<u32>], degree: usize) -> InteriorAlgebra {
        let g = Arc::new(PermGroup::from_generators("G", degree, gens, 500).unwrap());
        let f = FiniteField::new(p, 1).unwrap();
        let a = group_algebra(&g, &f);
        let d = g.sylow_subgroup(p);
        let st: Vec<Vector> = d.elems.iter().map(|&x| a.basis_vector(x)).collect();
        InteriorAlgebra::new(a, g, d, st, 11).unwrap()
    }

    fn check_lid(a: &InteriorAlgebra, p: &Subgroup) {
        let lid = a.local_invariant_decomposition(p).unwrap();
        let mut total = a.alg.zero();
        for (k, (e, stab)) in lid.iter().enumerate() {
            assert!(a.alg.is_idempotent(e));
            assert!(a.fixed_points(stab).contains(&a.alg.field, e));
            assert!(a.is_primitive_in(stab, e).unwrap());
            assert!(a.is_local(stab, e));
            for (l, (e2, _)) in lid.iter().enumerate() {
                if k != l {
                    assert!(is_zero(&a.alg.mul(e, e2)));
                }
            }
            for &x in &p.elems {
                let c = a.conj(x, e);
                assert!(lid.iter().any(|(e2, _)| *e2 == c));
            }
            total = a.alg.add(&total, e);
        }
        assert_eq!(total, a.alg.unit);
    }

    #[test]
    fn ks3_char3_sylow() {
        let a = sub_kg(3, &[vec![1, 2, 0], vec![1, 0, 2]], 3);
        let c3 = a.d.clone();
        assert_eq!(c3.order(), 3);
        assert_eq!(a.fixed_points(&c3).dim(), 4);
        assert_eq!(a.brauer_dim(&Injection::identity(&c3)), 3);
        a.check_bifree().unwrap();
        check_lid(&a, &c3);
    }

    #[test]
    fn ks4_char2_lid() {
        let a = sub_kg(2, &[vec![1, 2, 3, 0], vec![1, 0, 2, 3]], 4);
        assert_eq!(a.d.order(), 8);
        check_lid(&a, &a.d.clone());
        let lid = a.local_invariant_decomposition(&a.d.clone()).unwrap();
        assert_eq!(lid.len(), 1);
    }

    #[test]
    fn ks3_char2_splits_defect_zero() {
        let a = sub_kg(2, &[vec![1, 2, 0], vec![1, 0, 2]], 3);
        check_lid(&a, &a.d.clone());
        let lid = a.local_invariant_decomposition(&a.d.clone()).unwrap();
        let mut orders: Vec<usize> = lid.iter().map(|(_, s)| s.order()).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 1, 2]);
    }
}
