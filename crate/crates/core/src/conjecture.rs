//! Unital invariant bases, twisted units, transfer of local points along
//! fusion isomorphisms, unit lifting, and balance.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraContext, Vector};
use crate::bisets::{self, biact_orbit, InvariantBasis};
use crate::blocks::BlockData;
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::fusion::FusionSystem;
use crate::groups::{Injection, Subgroup, TwistedClasses};
use crate::linalg::{self, Matrix, Subspace};
use crate::salgebra::{associate_in, InteriorAlgebra, PointedGroup};

/// Searches enumerate instead of sampling when the space has at most this many elements.
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 20;
/// Composable pairs sampled for the pairing and closure checks.
pub const PAIR_SAMPLES: usize = 20;

#[derive(Clone, Debug)]
pub struct Options {
    pub samples: usize,
    pub exhaustive: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { samples: 64, exhaustive: false }
    }
}

pub fn tkey(t: &Injection) -> Vec<usize> {
    t.pairs().into_iter().flat_map(|(a, b)| [a, b]).collect()
}

fn space_size(q: u64, dim: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..dim {
        acc = acc.checked_mul(q as u128)?;
        if acc > EXHAUSTIVE_LIMIT {
            return None;
        }
    }
    Some(acc)
}

/// Visit every coordinate vector of a dim-dimensional space over GF(q) until `f` returns Some.
fn enumerate<T>(q: u64, dim: usize, mut f: impl FnMut(&[Fe]) -> Option<T>) -> Option<T> {
    let mut c = vec![0 as Fe; dim];
    loop {
        if let Some(t) = f(&c) {
            return Some(t);
        }
        let mut k = 0;
        loop {
            if k == dim {
                return None;
            }
            c[k] += 1;
            if c[k] < q {
                break;
            }
            c[k] = 0;
            k += 1;
        }
    }
}

fn random_coords(q: u64, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Fe> {
    (0..dim).map(|_| rng.gen_range(0..q)).collect()
}

/// A unit of `alg` inside `space`, by sampling or enumeration: (witness, tries, exhaustive).
pub fn unit_in_space(alg: &AlgebraContext, space: &Subspace, opts: &Options, rng: &mut ChaCha8Rng) -> (Option<Vector>, usize, bool) {
    if space.dim() == 0 {
        return (None, 0, true);
    }
    let q = alg.field.order();
    if opts.exhaustive {
        if let Some(n) = space_size(q, space.dim()) {
            let w = enumerate(q, space.dim(), |c| {
                let v = space.combine(&alg.field, c);
                alg.is_unit(&v).then_some(v)
            });
            return (w, n as usize, true);
        }
    }
    for k in 0..opts.samples {
        let v = alg.random_in(space, rng);
        if alg.is_unit(&v) {
            return (Some(v), k + 1, false);
        }
    }
    (None, opts.samples, false)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitSearch {
    pub found: bool,
    pub samples: usize,
    pub exhaustive: bool,
    /// The witness lives over GF(p^{2m}) rather than the base field.
    pub extended: bool,
    pub witness: Option<Vector>,
}

/// A unit of A inside ^φA^P; one scalar extension if the base field fails.
pub fn unit_in_subspace(a: &InteriorAlgebra, t: &Injection, opts: &Options) -> Result<UnitSearch> {
    let mut rng = a.rng_for("unit", &tkey(t));
    let space = a.fixed_subspace(t);
    let (w, n, exh) = unit_in_space(&a.alg, &space, opts, &mut rng);
    if let Some(w) = w {
        return Ok(UnitSearch { found: true, samples: n, exhaustive: exh, extended: false, witness: Some(w) });
    }
    if space.dim() == 0 {
        return Ok(UnitSearch { found: false, samples: 0, exhaustive: true, extended: false, witness: None });
    }
    let (big, emb) = a.extended()?;
    let bspace = Subspace::from_vectors(&big.alg.field, big.dim(), &space.vectors().iter().map(|v| emb.apply_vec(v)).collect::<Vec<_>>());
    let (w2, n2, exh2) = unit_in_space(&big.alg, &bspace, opts, &mut rng);
    Ok(UnitSearch { found: w2.is_some(), samples: n + n2, exhaustive: exh && exh2, extended: true, witness: w2 })
}

/// u ∈ A(φ) with inverse u† ∈ A(φ⁻¹), both in Brauer-quotient coordinates.
#[derive(Clone, Debug)]
pub struct TwistedUnit {
    pub phi: Injection,
    pub u: Vector,
    pub inv: Vector,
}

pub fn quotient_one(a: &InteriorAlgebra, p: &Subgroup) -> Vector {
    a.br(p, &a.alg.unit).expect("1 is fixed")
}

/// Matrix of v ↦ v·u from A(φ⁻¹) to A(P) (rows are images of basis vectors).
fn right_mult_matrix(a: &InteriorAlgebra, phi: &Injection, u: &[Fe]) -> Result<Matrix> {
    let inv = phi.inverse();
    let n = a.brauer_dim(&inv);
    let dim_p = a.brauer_dim(&Injection::identity(&phi.domain_group()));
    let rows: Vec<Vector> = (0..n)
        .map(|k| {
            let mut e = vec![0; n];
            e[k] = 1;
            a.quotient_product(&inv, &e, phi, u)
        })
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, dim_p));
    }
    Matrix::from_rows(dim_p, &rows)
}

/// If u ∈ A(φ) is a twisted unit, its inverse.
pub fn twisted_inverse(a: &InteriorAlgebra, phi: &Injection, u: &[Fe]) -> Result<Option<Vector>> {
    let p = phi.domain_group();
    let q = phi.image_group();
    let one_p = quotient_one(a, &p);
    let m = right_mult_matrix(a, phi, u)?;
    let f = &a.alg.field;
    if m.rows == 0 || linalg::rank(f, &m) != one_p.len() || m.rows != one_p.len() {
        return Ok(None);
    }
    let Some(v) = linalg::solve(f, &m.transpose(), &one_p)? else { return Ok(None) };
    let uv = a.quotient_product(phi, u, &phi.inverse(), &v)?;
    if uv != quotient_one(a, &q) {
        return Err(Error::Internal("left twisted inverse is not a right inverse".into()));
    }
    Ok(Some(v))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwistedSearch {
    pub found: bool,
    pub samples: usize,
    pub exhaustive: bool,
    pub extended: bool,
    pub dimension_obstruction: bool,
    #[serde(skip)]
    pub unit: Option<TwistedUnit>,
}

fn search_twisted(
    a: &InteriorAlgebra,
    phi: &Injection,
    opts: &Options,
    rng: &mut ChaCha8Rng,
) -> Result<(Option<TwistedUnit>, usize, bool)> {
    let n = a.brauer_dim(phi);
    let q = a.alg.field.order();
    let attempt = |u: &[Fe]| -> Result<Option<TwistedUnit>> {
        Ok(twisted_inverse(a, phi, u)?.map(|inv| TwistedUnit { phi: phi.clone(), u: u.to_vec(), inv }))
    };
    if opts.exhaustive {
        if let Some(total) = space_size(q, n) {
            let mut err = None;
            let found = enumerate(q, n, |c| match attempt(c) {
                Ok(x) => x,
                Err(e) => {
                    err = Some(e);
                    None
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            return Ok((found, total as usize, true));
        }
    }
    for k in 0..opts.samples {
        let u = random_coords(q, n, rng);
        if let Some(tu) = attempt(&u)? {
            return Ok((Some(tu), k + 1, false));
        }
    }
    Ok((None, opts.samples, false))
}

/// A twisted unit of φ: random search, then one scalar extension.
pub fn twisted_unit_exists(a: &InteriorAlgebra, phi: &Injection, opts: &Options) -> Result<TwistedSearch> {
    let p = phi.domain_group();
    let n = a.brauer_dim(phi);
    let dim_p = a.brauer_dim(&Injection::identity(&p));
    if n == 0 || n != dim_p || a.brauer_dim(&phi.inverse()) != dim_p {
        return Ok(TwistedSearch { found: false, samples: 0, exhaustive: true, extended: false, dimension_obstruction: true, unit: None });
    }
    let mut rng = a.rng_for("twisted", &tkey(phi));
    let (tu, k, exh) = search_twisted(a, phi, opts, &mut rng)?;
    if tu.is_some() {
        return Ok(TwistedSearch { found: true, samples: k, exhaustive: exh, extended: false, dimension_obstruction: false, unit: tu });
    }
    let (big, _) = a.extended()?;
    let (tu2, k2, exh2) = search_twisted(&big, phi, opts, &mut rng)?;
    Ok(TwistedSearch {
        found: tu2.is_some(),
        samples: k + k2,
        exhaustive: exh && exh2,
        extended: true,
        dimension_obstruction: false,
        unit: None,
    })
}

/// θ_φ on local points: γ ↦ the local point δ of A^Q with br_Q(j_δ) associate
/// to u·br_P(i_γ)·u† in A(Q). Indices refer to `local_points`.
pub fn theta_map(a: &InteriorAlgebra, tu: &TwistedUnit) -> Result<Vec<Option<usize>>> {
    let phi = &tu.phi;
    let p = phi.domain_group();
    let q = phi.image_group();
    let id_p = Injection::identity(&p);
    let inv = phi.inverse();
    let qa = a.brauer_algebra(&q)?;
    let bq_q = a.brauer_quotient(&Injection::identity(&q));
    let full = Subspace::full(qa.ctx.dim);
    let targets: Vec<Vector> = a.local_points(&q)?.iter().map(|pt| qa.project(&pt.rep).expect("fixed")).collect();
    let mut out = vec![];
    for pt in a.local_points(&p)? {
        let bi = a.br(&p, &pt.rep).expect("fixed");
        let x = a.quotient_product(phi, &tu.u, &id_p, &bi)?;
        let e = a.quotient_product(phi, &x, &inv, &tu.inv)?;
        let e_alg = qa.project(&bq_q.lift(&a.alg, &e)).expect("fixed");
        let hits: Vec<usize> = (0..targets.len()).filter(|&d| associate_in(&qa.ctx, &full, &e_alg, &targets[d])).collect();
        out.push(if hits.len() == 1 { Some(hits[0]) } else { None });
    }
    Ok(out)
}

/// Transporters s ∈ j·^φA^P·i and t ∈ i·^{φ⁻¹}A^Q·j with t·s = i and s·t = j.
#[derive(Clone, Debug)]
pub struct Transporter {
    pub s: Vector,
    pub t: Vector,
}

/// Is φ: P_γ → Q_δ realized inside A (i ∈ γ, j ∈ δ)? Witnesses are verified exactly.
pub fn isofusion(a: &InteriorAlgebra, phi: &Injection, i: &[Fe], j: &[Fe]) -> Result<Option<Transporter>> {
    let alg = &a.alg;
    let f = &alg.field;
    let inv = phi.inverse();
    let u_vecs: Vec<Vector> = a.fixed_subspace(&inv).vectors().iter().map(|x| alg.mul3(i, x, j)).collect();
    let w_vecs: Vec<Vector> = a.fixed_subspace(phi).vectors().iter().map(|x| alg.mul3(j, x, i)).collect();
    let us = Subspace::from_vectors(f, alg.dim, &u_vecs);
    let ws = Subspace::from_vectors(f, alg.dim, &w_vecs);
    if us.dim() == 0 || ws.dim() == 0 || !alg.product_span(&us, &ws).contains(f, i) {
        return Ok(None);
    }
    let (ub, wb) = (us.vectors(), ws.vectors());
    let check = |ua: &[Fe], wb: &[Fe]| -> Option<Transporter> {
        let x = alg.mul(ua, wb);
        let y = alg.invert_in_corner(i, &x)?;
        let t = alg.mul(&y, ua);
        let s = wb.to_vec();
        (alg.mul(&t, &s) == i && alg.mul(&s, &t) == j).then_some(Transporter { s, t })
    };
    for ua in &ub {
        for w in &wb {
            if let Some(tr) = check(ua, w) {
                return Ok(Some(tr));
            }
        }
    }
    let mut rng = a.rng_for("isofusion", &tkey(phi));
    for _ in 0..256 {
        let ua = alg.random_in(&us, &mut rng);
        let w = alg.random_in(&ws, &mut rng);
        if let Some(tr) = check(&ua, &w) {
            return Ok(Some(tr));
        }
    }
    Err(Error::Internal("idempotent lies in the transporter product but no witness was found".into()))
}

/// Local pointed group (R, index into `local_points(R)`).
pub type LocalPointed = (Subgroup, usize);

/// Θ_φ on all local pointed groups R_ε with R ≤ P, using a twisted unit per restriction.
pub struct ThetaTable {
    pub map: BTreeMap<LocalPointed, LocalPointed>,
    pub missing_units: Vec<Subgroup>,
    pub undefined: usize,
}

pub fn theta_table(a: &InteriorAlgebra, phi: &Injection, subgroups: &[Subgroup], opts: &Options) -> Result<ThetaTable> {
    let p = phi.domain_group();
    let mut map = BTreeMap::new();
    let mut missing_units = vec![];
    let mut undefined = 0;
    for r in subgroups.iter().filter(|r| r.is_subset_of(&p)) {
        let res = phi.restrict(r).expect("subgroup of the domain");
        let search = twisted_unit_exists(a, &res, opts)?;
        let Some(tu) = search.unit else {
            missing_units.push(r.clone());
            continue;
        };
        let img = res.image_group();
        for (e, d) in theta_map(a, &tu)?.into_iter().enumerate() {
            match d {
                Some(d) => {
                    map.insert((r.clone(), e), (img.clone(), d));
                }
                None => undefined += 1,
            }
        }
    }
    Ok(ThetaTable { map, missing_units, undefined })
}

fn pointed(a: &InteriorAlgebra, lp: &LocalPointed) -> Result<PointedGroup> {
    Ok(a.local_points(&lp.0)?[lp.1].clone())
}

fn conj_pointed(a: &InteriorAlgebra, x: usize, lp: &LocalPointed) -> Result<LocalPointed> {
    let rep = &a.local_points(&lp.0)?[lp.1].rep;
    let r2 = a.group.conjugate_subgroup(x, &lp.0);
    let idx =
        a.local_point_of(&r2, &a.conj(x, rep))?.ok_or_else(|| Error::Internal("conjugate of a local point is not a local point".into()))?;
    Ok((r2, idx))
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct StructureReport {
    pub twisted_unit: bool,
    pub closure: bool,
    pub pairing_surjective: bool,
    pub inverse_unique: bool,
    pub regular_translations: bool,
    pub conjugation_isomorphism: bool,
    pub theta_independent: bool,
    pub theta_matches_isofusion: bool,
    pub order_preserving: bool,
    pub equivariant: bool,
    pub multiplicity: bool,
    pub relative_multiplicity: bool,
    pub failures: Vec<String>,
}

impl StructureReport {
    pub fn all(&self) -> bool {
        self.twisted_unit
            && self.closure
            && self.pairing_surjective
            && self.inverse_unique
            && self.regular_translations
            && self.conjugation_isomorphism
            && self.theta_independent
            && self.theta_matches_isofusion
            && self.order_preserving
            && self.equivariant
            && self.multiplicity
            && self.relative_multiplicity
    }
}

fn to_alg(a: &InteriorAlgebra, p: &Subgroup, c: &[Fe]) -> Result<Vector> {
    let qa = a.brauer_algebra(p)?;
    let bq = a.brauer_quotient(&Injection::identity(p));
    Ok(qa.project(&bq.lift(&a.alg, c)).expect("fixed"))
}

/// Structural checks on twisted units and on Θ_φ, for one φ.
pub fn theta_structure_report(a: &InteriorAlgebra, fus: &FusionSystem, phi: &Injection, opts: &Options) -> Result<StructureReport> {
    let mut rep = StructureReport::default();
    let f = &a.alg.field;
    let p = phi.domain_group();
    let q = phi.image_group();
    let inv = phi.inverse();
    let id_p = Injection::identity(&p);
    let id_q = Injection::identity(&q);
    let search = twisted_unit_exists(a, phi, opts)?;
    let Some(tu) = search.unit else {
        rep.failures.push("no twisted unit over the base field".into());
        return Ok(rep);
    };
    rep.twisted_unit = true;
    let one_p = quotient_one(a, &p);
    let one_q = quotient_one(a, &q);
    let dim_p = one_p.len();
    let dim_q = one_q.len();
    let mut rng = a.rng_for("structure", &tkey(phi));

    // v ↦ v·u is injective, so the twisted inverse is unique
    let m = right_mult_matrix(a, phi, &tu.u)?;
    rep.inverse_unique = linalg::rank(f, &m) == m.rows;

    // composable pairs: closure of twisted units and surjectivity of the pairing
    let outs: Vec<&Injection> = fus.maps().filter(|m| m.domain == q.elems).collect();
    let mut chosen: Vec<&Injection> = outs.clone();
    chosen.shuffle(&mut rng);
    chosen.truncate(PAIR_SAMPLES);
    rep.closure = true;
    rep.pairing_surjective = true;
    for psi in chosen {
        let comp = phi.then(psi).expect("composable");
        let (da, db, dc) = (a.brauer_dim(psi), a.brauer_dim(phi), a.brauer_dim(&comp));
        let mut prods = vec![];
        for x in 0..da {
            for y in 0..db {
                let (mut ex, mut ey) = (vec![0; da], vec![0; db]);
                ex[x] = 1;
                ey[y] = 1;
                prods.push(a.quotient_product(psi, &ex, phi, &ey)?);
            }
        }
        if Subspace::from_vectors(f, dc, &prods).dim() != dc {
            rep.pairing_surjective = false;
            rep.failures.push("pairing A(psi) x A(phi) -> A(psi phi) is not onto".into());
        }
        let Some(tpsi) = twisted_unit_exists(a, psi, opts)?.unit else { continue };
        let w = a.quotient_product(psi, &tpsi.u, phi, &tu.u)?;
        let w_inv = a.quotient_product(&inv, &tu.inv, &psi.inverse(), &tpsi.inv)?;
        let r = comp.image_group();
        let left = a.quotient_product(&comp.inverse(), &w_inv, &comp, &w)?;
        let right = a.quotient_product(&comp, &w, &comp.inverse(), &w_inv)?;
        if left != one_p || right != quotient_one(a, &r) {
            rep.closure = false;
            rep.failures.push("product of twisted units is not a twisted unit".into());
        }
    }

    // unique regular translations between two twisted units
    let second = {
        let mut found = None;
        for _ in 0..opts.samples {
            let u = random_coords(f.order(), tu.u.len(), &mut rng);
            if let Some(inv2) = twisted_inverse(a, phi, &u)? {
                found = Some(TwistedUnit { phi: phi.clone(), u, inv: inv2 });
                break;
            }
        }
        found.unwrap_or_else(|| tu.clone())
    };
    {
        let xp = a.quotient_product(&inv, &tu.inv, phi, &second.u)?;
        let xq = a.quotient_product(phi, &second.u, &inv, &tu.inv)?;
        let ok_p = a.quotient_product(phi, &tu.u, &id_p, &xp)? == second.u;
        let ok_q = a.quotient_product(&id_q, &xq, phi, &tu.u)? == second.u;
        let qa_p = a.brauer_algebra(&p)?;
        let qa_q = a.brauer_algebra(&q)?;
        let units = qa_p.ctx.is_unit(&to_alg(a, &p, &xp)?) && qa_q.ctx.is_unit(&to_alg(a, &q, &xq)?);
        let basis = |n: usize, k: usize| -> Vector {
            let mut e = vec![0; n];
            e[k] = 1;
            e
        };
        let lrows: Vec<Vector> = (0..dim_p).map(|k| a.quotient_product(phi, &tu.u, &id_p, &basis(dim_p, k))).collect::<Result<_>>()?;
        let rrows: Vec<Vector> = (0..dim_q).map(|k| a.quotient_product(&id_q, &basis(dim_q, k), phi, &tu.u)).collect::<Result<_>>()?;
        let n_phi = tu.u.len();
        let unique = Subspace::from_vectors(f, n_phi, &lrows).dim() == dim_p && Subspace::from_vectors(f, n_phi, &rrows).dim() == dim_q;
        rep.regular_translations = ok_p && ok_q && units && unique;
        if !rep.regular_translations {
            rep.failures.push("regular translation between twisted units failed".into());
        }
    }

    // conjugation by u is an algebra isomorphism A(P) → A(Q)
    {
        let conj = |x: &[Fe]| -> Result<Vector> {
            let y = a.quotient_product(phi, &tu.u, &id_p, x)?;
            a.quotient_product(phi, &y, &inv, &tu.inv)
        };
        let basis: Vec<Vector> = (0..dim_p)
            .map(|k| {
                let mut e = vec![0; dim_p];
                e[k] = 1;
                e
            })
            .collect();
        let images: Vec<Vector> = basis.iter().map(|x| conj(x)).collect::<Result<_>>()?;
        let mut ok = conj(&one_p)? == one_q && Subspace::from_vectors(f, dim_q, &images).dim() == dim_p && dim_p == dim_q;
        'mult: for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let xy = a.quotient_product(&id_p, x, &id_p, y)?;
                let lhs = conj(&xy)?;
                let rhs = a.quotient_product(&id_q, &images[i], &id_q, &images[j])?;
                if lhs != rhs {
                    ok = false;
                    break 'mult;
                }
            }
        }
        rep.conjugation_isomorphism = ok;
        if !ok {
            rep.failures.push("conjugation by a twisted unit is not an algebra isomorphism".into());
        }
    }

    // θ_φ: independence of the unit, agreement with isofusion
    let theta = theta_map(a, &tu)?;
    rep.theta_independent = theta == theta_map(a, &second)? && theta.iter().all(|d| d.is_some());
    if !rep.theta_independent {
        rep.failures.push("theta depends on the twisted unit or is undefined".into());
    }
    let lp = a.local_points(&p)?;
    let lq = a.local_points(&q)?;
    rep.theta_matches_isofusion = true;
    for (g, pg) in lp.iter().enumerate() {
        for (d, qd) in lq.iter().enumerate() {
            let iso = isofusion(a, phi, &pg.rep, &qd.rep)?.is_some();
            if iso != (theta[g] == Some(d)) {
                rep.theta_matches_isofusion = false;
                rep.failures.push(format!("theta and isofusion disagree on points {g} -> {d}"));
            }
        }
    }

    // Θ_φ over the pointed Brown poset of P
    let subs: Vec<Subgroup> = a.group.p_subgroups_in(&p, fus.prime).into_iter().collect();
    let table = theta_table(a, phi, &subs, opts)?;
    let complete = table.missing_units.is_empty() && table.undefined == 0;
    let keys: Vec<LocalPointed> = table.map.keys().cloned().collect();
    rep.multiplicity = complete;
    for k in &keys {
        let img = &table.map[k];
        if pointed(a, k)?.multiplicity != pointed(a, img)?.multiplicity {
            rep.multiplicity = false;
        }
    }
    rep.order_preserving = complete;
    rep.relative_multiplicity = complete;
    for small in &keys {
        for big in &keys {
            if !small.0.is_subset_of(&big.0) {
                continue;
            }
            let (ps, pb) = (pointed(a, small)?, pointed(a, big)?);
            let (ts, tb) = (pointed(a, &table.map[small])?, pointed(a, &table.map[big])?);
            let m1 = a.relative_multiplicity(&ps, &pb, &mut rng)?;
            let m2 = a.relative_multiplicity(&ts, &tb, &mut rng)?;
            if m1 != m2 {
                rep.relative_multiplicity = false;
            }
            if (m1 > 0) != (m2 > 0) {
                rep.order_preserving = false;
            }
        }
    }
    rep.equivariant = complete;
    for x in a.group.generating_set(&p) {
        let fx = phi.apply(x).unwrap();
        for k in &keys {
            let lhs = table.map.get(&conj_pointed(a, x, k)?).cloned();
            let rhs = conj_pointed(a, fx, &table.map[k])?;
            if lhs != Some(rhs) {
                rep.equivariant = false;
            }
        }
    }
    for (flag, name) in [
        (rep.multiplicity, "multiplicity"),
        (rep.order_preserving, "order preservation"),
        (rep.relative_multiplicity, "relative multiplicity"),
        (rep.equivariant, "equivariance"),
    ] {
        if !flag {
            rep.failures.push(format!("Theta fails {name}"));
        }
    }
    Ok(rep)
}

/// Twisted-diagonal class representatives with A(φ) ≠ 0.
pub fn morphism_reps(a: &InteriorAlgebra, classes: &TwistedClasses) -> Vec<Injection> {
    classes.reps.iter().filter(|t| a.brauer_dim(t) > 0).cloned().collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftOutcome {
    pub unit_found: bool,
    pub class_counts_match: bool,
    pub note: Option<String>,
    pub u: Option<Vector>,
    pub v: Option<Vector>,
}

/// Orbits of a local invariant decomposition under the acting group.
fn lid_orbits(a: &InteriorAlgebra, p: &Subgroup, lid: &[(Vector, Subgroup)]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; lid.len()];
    let mut orbits = vec![];
    for k in 0..lid.len() {
        if seen[k] {
            continue;
        }
        let mut orbit = vec![];
        for &x in &p.elems {
            let c = a.conj(x, &lid[k].0);
            if let Some(pos) = lid.iter().position(|(e, _)| *e == c) {
                if !seen[pos] {
                    seen[pos] = true;
                    orbit.push(pos);
                }
            }
        }
        orbits.push(orbit);
    }
    orbits
}

/// Canonical key of a local pointed group up to conjugation by `over`.
fn canonical(a: &InteriorAlgebra, over: &Subgroup, lp: &LocalPointed) -> Result<LocalPointed> {
    let mut best: Option<LocalPointed> = None;
    for &x in &over.elems {
        let c = conj_pointed(a, x, lp)?;
        if best.as_ref().is_none_or(|b| c < *b) {
            best = Some(c);
        }
    }
    Ok(best.expect("nonempty group"))
}

/// Assemble a unit of A inside ^φA^P from orbit transporters between local
/// invariant decompositions for P and for Q = φ(P).
pub fn lift_to_global_unit(a: &InteriorAlgebra, phi: &Injection, prime: u64, opts: &Options) -> Result<LiftOutcome> {
    let fail =
        |note: String, counts: bool| LiftOutcome { unit_found: false, class_counts_match: counts, note: Some(note), u: None, v: None };
    let p = phi.domain_group();
    let q = phi.image_group();
    let inv = phi.inverse();
    let e_lid = a.local_invariant_decomposition(&p)?;
    let f_lid = a.local_invariant_decomposition(&q)?;
    let subs = a.group.p_subgroups_in(&p, prime);
    let table = theta_table(a, phi, &subs, opts)?;
    let key_of = |lid: &[(Vector, Subgroup)], k: usize| -> Result<LocalPointed> {
        let (e, r) = &lid[k];
        let idx = a.local_point_of(r, e)?.ok_or_else(|| Error::Internal("decomposition member is not local".into()))?;
        Ok((r.clone(), idx))
    };
    let e_orbits = lid_orbits(a, &p, &e_lid);
    let f_orbits = lid_orbits(a, &q, &f_lid);
    // class key on the Q side for every E-orbit and F-orbit
    let mut e_classes: BTreeMap<LocalPointed, Vec<usize>> = BTreeMap::new();
    for (o, orbit) in e_orbits.iter().enumerate() {
        let k = key_of(&e_lid, orbit[0])?;
        let Some(img) = table.map.get(&k) else {
            return Ok(fail("Theta undefined on a decomposition member".into(), false));
        };
        e_classes.entry(canonical(a, &q, img)?).or_default().push(o);
    }
    let mut f_classes: BTreeMap<LocalPointed, Vec<usize>> = BTreeMap::new();
    for (o, orbit) in f_orbits.iter().enumerate() {
        let k = key_of(&f_lid, orbit[0])?;
        f_classes.entry(canonical(a, &q, &k)?).or_default().push(o);
    }
    let counts = e_classes.len() == f_classes.len() && e_classes.iter().all(|(k, v)| f_classes.get(k).map(|w| w.len()) == Some(v.len()));
    if !counts {
        return Ok(fail("class sizes of the two decompositions differ".into(), false));
    }
    let mut u = a.alg.zero();
    let mut v = a.alg.zero();
    for (class, eo) in &e_classes {
        for (&e_orbit, &f_orbit) in eo.iter().zip(&f_classes[class]) {
            let k = e_orbits[e_orbit][0];
            let (e, r) = &e_lid[k];
            let res = phi.restrict(r).expect("stabilizer inside P");
            let target = res.image_group();
            let mut found = None;
            for &fk in &f_orbits[f_orbit] {
                let (fv, stab) = &f_lid[fk];
                if *stab != target {
                    continue;
                }
                if let Some(tr) = isofusion(a, &res, e, fv)? {
                    found = Some(tr);
                    break;
                }
            }
            let Some(tr) = found else {
                return Ok(fail("no transporter between matched orbits".into(), true));
            };
            u = a.alg.add(&u, &a.relative_trace(phi, r, &tr.s)?);
            v = a.alg.add(&v, &a.relative_trace(&inv, &target, &tr.t)?);
        }
    }
    let ok = a.alg.mul(&u, &v) == a.alg.unit && a.alg.mul(&v, &u) == a.alg.unit && a.fixed_subspace(phi).contains(&a.alg.field, &u);
    if !ok {
        return Ok(fail("assembled element is not a unit of the twisted fixed points".into(), true));
    }
    Ok(LiftOutcome { unit_found: true, class_counts_match: true, note: None, u: Some(u), v: Some(v) })
}

#[derive(Clone, Debug)]
pub struct UnitalOutcome {
    pub basis: Option<InvariantBasis>,
    /// The algebra the basis lives in (the input, or its scalar extension).
    pub algebra: Option<Arc<InteriorAlgebra>>,
    pub replaced: usize,
    pub extended: bool,
    pub failure: Option<String>,
}

fn unitalize(a: &InteriorAlgebra, basis: &InvariantBasis, opts: &Options) -> Result<std::result::Result<(InvariantBasis, usize), String>> {
    let f = &a.alg.field;
    let mut y = basis.clone();
    let mut replaced = 0;
    let dd = a.d.order() * a.d.order();
    for o in 0..y.orbits.len() {
        let orbit = y.orbits[o].clone();
        let rep = y.vectors[orbit.members[0]].clone();
        if a.alg.is_unit(&rep) {
            continue;
        }
        let mut rng = a.rng_for("unital", &tkey(&orbit.stabilizer));
        let (unit, _, _) = unit_in_space(&a.alg, &a.fixed_subspace(&orbit.stabilizer), opts, &mut rng);
        let Some(unit) = unit else {
            return Ok(Err(format!("no unit fixed by an orbit stabilizer of order {}", orbit.stabilizer.domain.len())));
        };
        let len = dd / orbit.stabilizer.domain.len();
        let mut done = false;
        for lambda in 1..f.order() {
            let cand = a.alg.add(&rep, &a.alg.scale(lambda, &unit));
            if !a.alg.is_unit(&cand) {
                continue;
            }
            let Some(new_orbit) = biact_orbit(a, &cand, len) else { continue };
            let mut trial = y.clone();
            for (slot, vec) in orbit.members.iter().zip(new_orbit) {
                trial.vectors[*slot] = vec;
            }
            if Subspace::from_vectors(f, a.dim(), &trial.vectors).dim() == a.dim() {
                y = trial;
                replaced += 1;
                done = true;
                break;
            }
        }
        if !done {
            return Ok(Err("scalar scan exhausted".into()));
        }
    }
    y.verify(a)?;
    if !y.vectors.iter().all(|v| a.alg.is_unit(v)) {
        return Err(Error::Internal("unital basis contains a non-unit".into()));
    }
    Ok(Ok((y, replaced)))
}

/// Replace non-unit orbits y by y + λu, u a unit with the same stabilizer.
pub fn build_unital_basis(a: &Arc<InteriorAlgebra>, basis: &InvariantBasis, opts: &Options) -> Result<UnitalOutcome> {
    match unitalize(a, basis, opts)? {
        Ok((b, n)) => return Ok(UnitalOutcome { basis: Some(b), algebra: Some(a.clone()), replaced: n, extended: false, failure: None }),
        Err(msg) if !msg.contains("scan") && opts.exhaustive => {
            return Ok(UnitalOutcome { basis: None, algebra: None, replaced: 0, extended: false, failure: Some(msg) })
        }
        Err(_) => {}
    }
    let (big, emb) = a.extended()?;
    let big = Arc::new(big);
    let moved = InvariantBasis { vectors: basis.vectors.iter().map(|v| emb.apply_vec(v)).collect(), orbits: basis.orbits.clone() };
    match unitalize(&big, &moved, opts)? {
        Ok((b, n)) => Ok(UnitalOutcome { basis: Some(b), algebra: Some(big), replaced: n, extended: true, failure: None }),
        Err(msg) => Ok(UnitalOutcome { basis: None, algebra: None, replaced: 0, extended: true, failure: Some(msg) }),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BalanceReport {
    pub intrinsic: bool,
    pub ambient: Option<bool>,
    pub agreement: Option<bool>,
    pub failures: Vec<String>,
}

/// Intrinsic balance: every local point γ of A^P has an isofusion partner δ
/// with the same multiplicity, for every morphism representative φ.
pub fn intrinsic_balance(a: &InteriorAlgebra, reps: &[Injection], failures: &mut Vec<String>) -> Result<bool> {
    let mut ok = true;
    for phi in reps {
        let lp = a.local_points(&phi.domain_group())?;
        let lq = a.local_points(&phi.image_group())?;
        for (g, pg) in lp.iter().enumerate() {
            let mut partner = false;
            for qd in &lq {
                if pg.multiplicity == qd.multiplicity && isofusion(a, phi, &pg.rep, &qd.rep)?.is_some() {
                    partner = true;
                    break;
                }
            }
            if !partner {
                ok = false;
                failures.push(format!("local point {g} of a subgroup of order {} has no balanced partner", lp[g].subgroup.order()));
            }
        }
    }
    Ok(ok)
}

/// Balance in an ambient algebra: relative multiplicities of local points of
/// Â^P in the source idempotent are preserved by θ_φ computed in Â.
pub fn ambient_balance(
    ambient: &InteriorAlgebra,
    source_idempotent: &[Fe],
    reps: &[Injection],
    opts: &Options,
    failures: &mut Vec<String>,
) -> Result<bool> {
    let top = PointedGroup { subgroup: ambient.d.clone(), rep: source_idempotent.to_vec(), local: true, multiplicity: 1 };
    let mut rng = ambient.rng_for("ambient", &[]);
    let mut ok = true;
    for phi in reps {
        let Some(tu) = twisted_unit_exists(ambient, phi, opts)?.unit else {
            failures.push("ambient algebra lacks a twisted unit".into());
            ok = false;
            continue;
        };
        let theta = theta_map(ambient, &tu)?;
        let lp = ambient.local_points(&phi.domain_group())?;
        let lq = ambient.local_points(&phi.image_group())?;
        for (g, pg) in lp.iter().enumerate() {
            let Some(d) = theta[g] else {
                ok = false;
                failures.push("ambient theta undefined".into());
                continue;
            };
            let m1 = ambient.relative_multiplicity(pg, &top, &mut rng)?;
            let m2 = ambient.relative_multiplicity(&lq[d], &top, &mut rng)?;
            if m1 != m2 {
                ok = false;
                failures.push(format!("relative multiplicities {m1} != {m2} across theta"));
            }
        }
    }
    Ok(ok)
}

/// Checks that the group basis of kG is a unital invariant basis for the D-action.
pub fn group_basis_is_unital(kg: &InteriorAlgebra) -> Result<bool> {
    let basis = InvariantBasis { vectors: (0..kg.dim()).map(|i| kg.alg.basis_vector(i)).collect(), orbits: vec![] };
    basis.verify(kg)?;
    Ok(basis.vectors.iter().all(|v| kg.alg.is_unit(v)))
}

/// A failing condition with exact witnesses.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Finding {
    pub condition: String,
    pub morphism: Option<String>,
    pub detail: String,
    pub witnesses: Vec<Vector>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismRecord {
    pub morphism: String,
    pub brauer_dim: usize,
    pub unit: UnitSearch,
    pub twisted: TwistedSearch,
    pub lift: Option<LiftOutcome>,
    pub structure: Option<StructureReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub unital_basis: bool,
    pub unital_replacements: usize,
    pub unital_extended: bool,
    pub twisted_units: bool,
    pub intrinsic_balance: bool,
    pub ambient_balance: Option<bool>,
    pub balance_agreement: Option<bool>,
    pub agree: bool,
    pub stable_shape: Option<bool>,
    pub basis_realizes_fusion: Option<bool>,
    pub unique_local_point: bool,
    pub structure_ok: bool,
    pub lifts_ok: bool,
    pub morphisms: Vec<MorphismRecord>,
    pub findings: Vec<Finding>,
}

/// Run all three conditions on the source algebra of a block and cross-check.
pub fn equivalence_report(bd: &BlockData, prime: u64, opts: &Options, with_lifts: bool) -> Result<EquivalenceReport> {
    let a = &bd.source;
    let g = &a.group;
    let classes = &bd.classes;
    let fus = crate::fusion::fixed_point_presystem(a, classes, prime);
    let reps = morphism_reps(a, classes);
    let mut findings = vec![];

    // (i) unital basis
    let shape = bisets::shape_from_brauer_dims(a, classes.clone())?;
    let mut rng = a.rng_for("basis", &[]);
    let basis = bisets::explicit_invariant_basis(a, &shape, &mut rng)?;
    let unital = build_unital_basis(a, &basis, opts)?;
    let unital_ok = unital.basis.is_some();

    // (ii) twisted units, with the structure suite
    let mut morphisms = vec![];
    let mut twisted_ok = true;
    let mut structure_ok = true;
    let mut lifts_ok = true;
    for phi in &reps {
        let desc = classes.descriptor(g, classes.class_of(phi));
        let unit = unit_in_subspace(a, phi, opts)?;
        let twisted = twisted_unit_exists(a, phi, opts)?;
        twisted_ok &= twisted.found;
        let structure = if let Some(tu) = &twisted.unit {
            let s = theta_structure_report(a, &fus, phi, opts)?;
            if !s.all() {
                structure_ok = false;
                findings.push(Finding {
                    condition: "twisted unit structure".into(),
                    morphism: Some(desc.clone()),
                    detail: s.failures.join("; "),
                    witnesses: vec![tu.u.clone()],
                });
            }
            Some(s)
        } else {
            None
        };
        let lift = if with_lifts && twisted.unit.is_some() {
            let l = lift_to_global_unit(a, phi, prime, opts)?;
            if !l.unit_found {
                lifts_ok = false;
                findings.push(Finding {
                    condition: "unit lift".into(),
                    morphism: Some(desc.clone()),
                    detail: l.note.clone().unwrap_or_default(),
                    witnesses: vec![],
                });
            }
            Some(l)
        } else {
            None
        };
        morphisms.push(MorphismRecord { morphism: desc, brauer_dim: a.brauer_dim(phi), unit, twisted, lift, structure });
    }

    // (iii) balance
    let mut failures = vec![];
    let intrinsic = intrinsic_balance(a, &reps, &mut failures)?;
    let ambient = if group_basis_is_unital(&bd.kg_d)? {
        Some(ambient_balance(&bd.kg_d, bd.source_idempotent(), &reps, opts, &mut failures)?)
    } else {
        None
    };
    let balance_agreement = ambient.map(|x| x == intrinsic);
    if !failures.is_empty() {
        findings.push(Finding { condition: "balance".into(), morphism: None, detail: failures.join("; "), witnesses: vec![] });
    }

    // unique isofusion partner per local point
    let mut unique = true;
    for phi in &reps {
        let lp = a.local_points(&phi.domain_group())?;
        let lq = a.local_points(&phi.image_group())?;
        for pg in &lp {
            let mut hits = 0;
            for qd in &lq {
                if isofusion(a, phi, &pg.rep, &qd.rep)?.is_some() {
                    hits += 1;
                }
            }
            if hits != 1 {
                unique = false;
            }
        }
    }

    // consequences of a unital basis
    let (mut stable_shape, mut realizes) = (None, None);
    if let (Some(y), Some(ya)) = (&unital.basis, &unital.algebra) {
        let yshape = y.shape(classes.clone());
        let yfus = crate::fusion::fixed_point_presystem(ya, classes, prime);
        stable_shape = Some(bisets::characteristic_report(g, &yshape, &yfus)?.all());
        let mut ok = true;
        for phi in &reps {
            let gens = g.generating_set(&phi.domain_group());
            let Some(yv) = y.vectors.iter().find(|v| gens.iter().all(|&p| ya.biact(phi.apply(p).unwrap(), p, v) == **v)) else {
                ok = false;
                continue;
            };
            let yinv = ya.alg.invert(yv)?;
            for pg in ya.local_points(&phi.domain_group())? {
                let j = ya.alg.mul3(yv, &pg.rep, &yinv);
                let q = phi.image_group();
                let good = ya.fixed_points(&q).contains(&ya.alg.field, &j)
                    && ya.is_primitive_in(&q, &j)?
                    && ya.is_local(&q, &j)
                    && isofusion(ya, phi, &pg.rep, &j)?.is_some();
                ok &= good;
            }
        }
        realizes = Some(ok);
    }

    let agree = unital_ok == twisted_ok && twisted_ok == intrinsic && ambient.is_none_or(|x| x == intrinsic);
    if !agree {
        findings.push(Finding {
            condition: "equivalence of unital basis, twisted units and balance".into(),
            morphism: None,
            detail: format!("unital={unital_ok} twisted={twisted_ok} intrinsic={intrinsic} ambient={ambient:?}"),
            witnesses: vec![bd.source_idempotent().clone()],
        });
    }
    if stable_shape == Some(false) || realizes == Some(false) || !unique {
        findings.push(Finding {
            condition: "consequences of a unital basis".into(),
            morphism: None,
            detail: format!("stable={stable_shape:?} realizes={realizes:?} unique={unique}"),
            witnesses: vec![],
        });
    }
    Ok(EquivalenceReport {
        unital_basis: unital_ok,
        unital_replacements: unital.replaced,
        unital_extended: unital.extended,
        twisted_units: twisted_ok,
        intrinsic_balance: intrinsic,
        ambient_balance: ambient,
        balance_agreement,
        agree,
        stable_shape,
        basis_realizes_fusion: realizes,
        unique_local_point: unique,
        structure_ok,
        lifts_ok,
        morphisms,
        findings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::group_algebra;
    use crate::blocks::{analyze_block, GroupContext};
    use crate::field::FiniteField;
    use crate::groups::{twisted_diagonal_classes, PermGroup, Subgroup};

    fn kc2_char3_trivial_d() -> Arc<InteriorAlgebra> {
        let g = Arc::new(PermGroup::from_generators("C2", 2, &[vec![1, 0]], 500).unwrap());
        let f = FiniteField::new(3, 1).unwrap();
        let a = group_algebra(&g, &f);
        let one = a.unit.clone();
        Arc::new(InteriorAlgebra::new(a, g, Subgroup::trivial(), vec![one], 3).unwrap())
    }

    #[test]
    fn idempotent_basis_gets_unitalized() {
        let a = kc2_char3_trivial_d();
        let classes = Arc::new(twisted_diagonal_classes(&a.group, &a.d));
        let shape = bisets::shape_from_brauer_dims(&a, classes).unwrap();
        let mut rng = a.rng_for("t", &[]);
        let mut basis = bisets::explicit_invariant_basis(&a, &shape, &mut rng).unwrap();
        // (1 ± g)/2 over GF(3): orthogonal idempotents, neither a unit
        basis.vectors = vec![vec![2, 2], vec![2, 1]];
        let out = build_unital_basis(&a, &basis, &Options::default()).unwrap();
        assert_eq!(out.replaced, 2);
        // GF(3) is small enough that the scan may need the extension
        let big = out.algebra.unwrap();
        let y = out.basis.unwrap();
        y.verify(&big).unwrap();
        assert!(y.vectors.iter().all(|v| big.alg.is_unit(v)));
    }

    #[test]
    fn unit_search_finds_one_in_full_space() {
        let a = kc2_char3_trivial_d();
        let id = Injection::identity(&a.d);
        let opts = Options { samples: 8, exhaustive: true };
        let s = unit_in_subspace(&a, &id, &opts).unwrap();
        assert!(s.found && s.exhaustive && !s.extended);
    }

    #[test]
    fn s3_char3_conditions_agree() {
        let g = Arc::new(PermGroup::from_generators("S3", 3, &[vec![1, 2, 0], vec![1, 0, 2]], 500).unwrap());
        let ctx = GroupContext::new(g, 3, 1).unwrap();
        let bd = analyze_block(&ctx, 0, 0).unwrap();
        let eq = equivalence_report(&bd, 3, &Options::default(), true).unwrap();
        assert!(eq.unital_basis && eq.twisted_units && eq.intrinsic_balance);
        assert_eq!(eq.ambient_balance, Some(true));
        assert!(eq.agree && eq.structure_ok && eq.lifts_ok && eq.unique_local_point);
        assert!(eq.findings.is_empty());
    }
}
