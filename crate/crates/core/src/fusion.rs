//! Fusion systems from groups, from Brauer pairs of blocks, and from
//! nonvanishing twisted Brauer quotients.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{self, Vector};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::groups::{Injection, PermGroup, Subgroup, TwistedClasses};
use crate::linalg::{self, Matrix};
use crate::salgebra::InteriorAlgebra;

/// A set of injective maps φ: P → S for subgroups P ≤ S; Hom(P, Q) is the
/// subset with image inside Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionSystem {
    pub s: Subgroup,
    pub prime: u64,
    maps: BTreeSet<Injection>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HomSummary {
    pub source_order: usize,
    pub target_order: usize,
    pub morphisms: usize,
}

impl FusionSystem {
    pub fn from_maps(s: Subgroup, prime: u64, maps: impl IntoIterator<Item = Injection>) -> Self {
        FusionSystem { s, prime, maps: maps.into_iter().collect() }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn contains(&self, phi: &Injection) -> bool {
        self.maps.contains(phi)
    }

    pub fn maps(&self) -> impl Iterator<Item = &Injection> {
        self.maps.iter()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn hom(&self, p: &Subgroup, q: &Subgroup) -> Vec<&Injection> {
        self.maps.iter().filter(|m| m.domain == p.elems && m.images.iter().all(|&y| q.contains(y))).collect()
    }

    /// Isomorphisms P → φ(P) whose image lies in Q; every stored map is one.
    pub fn iso(&self, p: &Subgroup, q: &Subgroup) -> Vec<&Injection> {
        self.hom(p, q).into_iter().filter(|m| m.images.len() == q.order()).collect()
    }

    pub fn automorphisms(&self, p: &Subgroup) -> Vec<&Injection> {
        self.iso(p, p)
    }

    /// Transport along conjugation by g (so that gSg⁻¹ becomes the new base).
    pub fn transport(&self, g: &PermGroup, x: usize) -> FusionSystem {
        let maps = self
            .maps
            .iter()
            .map(|m| {
                let mut pairs: Vec<(usize, usize)> = m.domain.iter().zip(&m.images).map(|(&a, &b)| (g.conj(x, a), g.conj(x, b))).collect();
                pairs.sort_unstable();
                Injection { domain: pairs.iter().map(|p| p.0).collect(), images: pairs.iter().map(|p| p.1).collect() }
            })
            .collect();
        FusionSystem { s: g.conjugate_subgroup(x, &self.s), prime: self.prime, maps }
    }

    /// Morphism counts per pair of subgroups (source, target = image).
    pub fn summary(&self) -> Vec<HomSummary> {
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for m in &self.maps {
            *counts.entry((m.domain.len(), m.images.len())).or_default() += 1;
        }
        counts.into_iter().rev().map(|((a, b), n)| HomSummary { source_order: a, target_order: b, morphisms: n }).collect()
    }
}

fn subgroups_of(g: &PermGroup, s: &Subgroup, p: u64) -> Vec<Subgroup> {
    if s.order() == 1 {
        vec![Subgroup::trivial()]
    } else {
        g.p_subgroups_in(s, p)
    }
}

/// F_S(G): maps c_g restricted to P whenever gPg⁻¹ ≤ S.
pub fn fusion_from_group(g: &PermGroup, s: &Subgroup, p: u64) -> FusionSystem {
    let mut maps = BTreeSet::new();
    for sub in subgroups_of(g, s, p) {
        for x in 0..g.order() {
            if sub.elems.iter().all(|&y| s.contains(g.conj(x, y))) {
                maps.insert(g.conjugation_map(x, &sub));
            }
        }
    }
    FusionSystem { s: s.clone(), prime: p, maps }
}

/// Maps φ with A(Δ(φ,P)) ≠ 0.
pub fn fixed_point_presystem(a: &InteriorAlgebra, classes: &TwistedClasses, p: u64) -> FusionSystem {
    let mut maps = BTreeSet::new();
    for (c, rep) in classes.reps.iter().enumerate() {
        if a.brauer_dim(rep) > 0 {
            maps.extend(classes.members(c));
        }
    }
    FusionSystem { s: classes.d.clone(), prime: p, maps }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DivisibilityReport {
    pub inclusions: bool,
    pub factorization: bool,
    pub composition: bool,
    pub witnesses: Vec<String>,
}

impl DivisibilityReport {
    pub fn holds(&self) -> bool {
        self.inclusions && self.factorization && self.composition
    }
}

/// Contains all inclusions, every morphism factors as an isomorphism onto
/// its image followed by an inclusion, and closed under composition.
pub fn is_divisible(g: &PermGroup, f: &FusionSystem) -> DivisibilityReport {
    let mut witnesses = vec![];
    let subs = subgroups_of(g, &f.s, f.prime);
    let mut inclusions = true;
    for sub in &subs {
        if !f.contains(&Injection::identity(sub)) {
            inclusions = false;
            witnesses.push(format!("missing inclusion of a subgroup of order {}", sub.order()));
        }
    }
    let mut factorization = true;
    for m in f.maps() {
        let img = m.image_group();
        if !f.contains(&Injection::identity(&img)) {
            factorization = false;
            witnesses.push(format!("image of order {} has no inclusion", img.order()));
        }
    }
    let mut composition = true;
    let by_domain: BTreeMap<&[usize], Vec<&Injection>> = f.maps().fold(BTreeMap::new(), |mut acc, m| {
        acc.entry(m.domain.as_slice()).or_insert_with(Vec::new).push(m);
        acc
    });
    'outer: for m in f.maps() {
        let img = m.image_group();
        for q in &subs {
            if !img.is_subset_of(q) {
                continue;
            }
            for outer in by_domain.get(q.elems.as_slice()).into_iter().flatten() {
                let c = m.then(outer).expect("image inside domain");
                if !f.contains(&c) {
                    composition = false;
                    witnesses.push("composite of two morphisms is missing".to_string());
                    break 'outer;
                }
            }
        }
    }
    DivisibilityReport { inclusions, factorization, composition, witnesses }
}

pub fn fusion_equal(a: &FusionSystem, b: &FusionSystem) -> Result<bool> {
    if a.s != b.s {
        return Err(Error::Input("fusion systems on different groups".into()));
    }
    Ok(a.maps == b.maps)
}

/// Conjugate a vector of kG by x: basis element y ↦ x y x⁻¹.
pub fn conj_group_vector(g: &PermGroup, x: usize, v: &[Fe]) -> Vector {
    let mut out = vec![0; v.len()];
    for (y, &c) in v.iter().enumerate() {
        if c != 0 {
            out[g.conj(x, y)] = c;
        }
    }
    out
}

/// Blocks of the Brauer quotient (kG)(P), lifted to kC_G(P).
#[derive(Clone, Debug)]
pub struct QuotientBlocks {
    pub subgroup: Subgroup,
    /// Lifts in kC_G(P), sorted.
    pub lifts: Vec<Vector>,
}

/// kG as an interior algebra over a p-subgroup containing every subgroup of interest.
pub fn quotient_blocks(kg: &InteriorAlgebra, p: &Subgroup, rng: &mut ChaCha8Rng) -> Result<QuotientBlocks> {
    let g = &kg.group;
    let q = kg.brauer_algebra(p)?;
    let cent = g.centralizer(p);
    let f = &kg.alg.field;
    let images: Vec<Vector> = cent
        .elems
        .iter()
        .map(|&c| q.project(&kg.alg.basis_vector(c)).ok_or_else(|| Error::Internal("centralizer element is not fixed".into())))
        .collect::<Result<_>>()?;
    let m = Matrix::from_rows(q.ctx.dim, &images)?.transpose();
    if linalg::rank(f, &m) != cent.order() || q.ctx.dim != cent.order() {
        return Err(Error::Internal("Brauer quotient of kG does not match the centralizer".into()));
    }
    let mut lifts = vec![];
    for e in algebra::block_idempotents_of(&q.ctx, rng)? {
        let coeffs = linalg::solve(f, &m, &e)?.ok_or_else(|| Error::Internal("block does not lift".into()))?;
        let mut v = kg.alg.zero();
        for (k, &c) in cent.elems.iter().enumerate() {
            v[c] = coeffs[k];
        }
        lifts.push(v);
    }
    lifts.sort();
    Ok(QuotientBlocks { subgroup: p.clone(), lifts })
}

/// The Brauer pairs below a chosen maximal pair (D, e_D) of a block b.
#[derive(Clone, Debug)]
pub struct BrauerPairs {
    pub block: Vector,
    pub d: Subgroup,
    /// ê_P in kC_G(P) for every P ≤ D.
    pub pairs: BTreeMap<Subgroup, Vector>,
    /// Number of blocks e of (kG)(D) with br_D(b)·e = e.
    pub maximal_candidates: usize,
}

/// Does br_P(x)·br_P(e) = br_P(e) in (kG)(P)?
fn absorbs(kg: &InteriorAlgebra, p: &Subgroup, x: &[Fe], e: &[Fe]) -> Result<bool> {
    let q = kg.brauer_algebra(p)?;
    let (Some(bx), Some(be)) = (q.project(x), q.project(e)) else {
        return Err(Error::Internal("element is not P-fixed".into()));
    };
    Ok(q.ctx.mul(&bx, &be) == be)
}

/// Choose (D, e_D): the first canonical block of (kG)(D) under br_D(b), then
/// walk down maximal-subgroup chains fixing the unique e_Q below each e_P.
pub fn brauer_pairs(kg: &InteriorAlgebra, b: &[Fe], d: &Subgroup, choice: usize, rng: &mut ChaCha8Rng) -> Result<BrauerPairs> {
    let g = kg.group.clone();
    let top = quotient_blocks(kg, d, rng)?;
    let mut cands = vec![];
    for e in &top.lifts {
        if absorbs(kg, d, b, e)? {
            cands.push(e.clone());
        }
    }
    if cands.is_empty() {
        return Err(Error::Internal("no block of (kG)(D) lies under b".into()));
    }
    // every maximal pair over D is N_G(D)-conjugate to the first
    let norm = g.normalizer(d);
    for e in &cands[1..] {
        if !norm.elems.iter().any(|&x| conj_group_vector(&g, x, &cands[0]) == *e) {
            return Err(Error::Internal("maximal Brauer pairs are not conjugate".into()));
        }
    }
    let chosen = cands.get(choice).cloned().ok_or_else(|| Error::Input("maximal pair index out of range".into()))?;
    let mut pairs: BTreeMap<Subgroup, Vector> = BTreeMap::new();
    pairs.insert(d.clone(), chosen);
    let mut queue = vec![d.clone()];
    let mut blocks_memo: BTreeMap<Subgroup, QuotientBlocks> = BTreeMap::new();
    while let Some(p) = queue.pop() {
        let ep = pairs[&p].clone();
        let pgens = g.generating_set(&p);
        for q in kg.maximal_subgroups(&p) {
            if !blocks_memo.contains_key(&q) {
                blocks_memo.insert(q.clone(), quotient_blocks(kg, &q, rng)?);
            }
            let mut found = vec![];
            for f in &blocks_memo[&q].lifts {
                let stable = pgens.iter().all(|&x| conj_group_vector(&g, x, f) == *f);
                if stable && absorbs(kg, &p, f, &ep)? {
                    found.push(f.clone());
                }
            }
            if found.len() != 1 {
                return Err(Error::Internal(format!("{} candidate blocks below a Brauer pair", found.len())));
            }
            match pairs.get(&q) {
                Some(prev) if *prev != found[0] => {
                    return Err(Error::Internal("two chains disagree on a Brauer pair".into()));
                }
                Some(_) => {}
                None => {
                    pairs.insert(q.clone(), found.pop().unwrap());
                    queue.push(q);
                }
            }
        }
    }
    Ok(BrauerPairs { block: b.to_vec(), d: d.clone(), pairs, maximal_candidates: cands.len() })
}

/// F_D(b): c_g on P whenever g(P, e_P)g⁻¹ = (gPg⁻¹, e_{gPg⁻¹}) with gPg⁻¹ ≤ D.
pub fn block_fusion(g: &PermGroup, bp: &BrauerPairs, p: u64) -> FusionSystem {
    let mut maps = BTreeSet::new();
    for (sub, e) in &bp.pairs {
        for x in 0..g.order() {
            let image = g.conjugate_subgroup(x, sub);
            let Some(target) = bp.pairs.get(&image) else { continue };
            if conj_group_vector(g, x, e) == *target {
                maps.insert(g.conjugation_map(x, sub));
            }
        }
    }
    FusionSystem { s: bp.d.clone(), prime: p, maps }
}

/// Classes of p-subgroups with br_P(b) ≠ 0, represented inside the Sylow
/// subgroup carried by `kg`; the largest is the defect group.
pub fn defect_group(kg: &InteriorAlgebra, b: &[Fe], p: u64) -> Result<Subgroup> {
    let g = &kg.group;
    let mut reps: BTreeMap<Subgroup, Subgroup> = BTreeMap::new();
    for sub in subgroups_of(g, &kg.d, p) {
        reps.entry(g.conjugacy_key(&sub)).or_insert(sub);
    }
    let mut live: Vec<Subgroup> = vec![];
    for sub in reps.into_values() {
        let q = kg.brauer_quotient(&Injection::identity(&sub));
        if !q.fixed.contains(&kg.alg.field, b) {
            return Err(Error::Input("block idempotent is not central".into()));
        }
        if !q.is_zero_image(&kg.alg, b) {
            live.push(sub);
        }
    }
    live.sort_by(|a, c| c.order().cmp(&a.order()).then_with(|| a.elems.cmp(&c.elems)));
    let d = live.first().cloned().ok_or_else(|| Error::Internal("br_1(b) vanished".into()))?;
    for other in &live {
        let inside = (0..g.order()).any(|x| g.conjugate_subgroup(x, other).is_subset_of(&d));
        if !inside {
            return Err(Error::Internal("p-subgroups with br(b) ≠ 0 are not all subconjugate to one".into()));
        }
    }
    Ok(d)
}

/// kG with the structural map of a subgroup S (usually a Sylow subgroup).
pub fn group_algebra_over(g: Arc<PermGroup>, s: &Subgroup, field: &crate::field::FiniteField, seed: u64) -> Result<InteriorAlgebra> {
    let a = algebra::group_algebra(&g, field);
    let st: Vec<Vector> = s.elems.iter().map(|&x| a.basis_vector(x)).collect();
    InteriorAlgebra::new(a, g, s.clone(), st, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::groups::twisted_diagonal_classes;
    use rand::SeedableRng;

    fn s3() -> Arc<PermGroup> {
        Arc::new(PermGroup::from_generators("S3", 3, &[vec![1, 2, 0], vec![1, 0, 2]], 500).unwrap())
    }

    #[test]
    fn s3_group_fusion() {
        let g = s3();
        let c3 = g.sylow_subgroup(3);
        let f = fusion_from_group(&g, &c3, 3);
        assert_eq!(f.automorphisms(&c3).len(), 2);
        let inner = fusion_from_group(&g, &c3, 3);
        assert!(is_divisible(&g, &f).holds());
        let c3_only = Arc::new(PermGroup::from_generators("C3", 3, &[vec![1, 2, 0]], 500).unwrap());
        let fc = fusion_from_group(&c3_only, &c3_only.whole(), 3);
        assert_eq!(fc.automorphisms(&c3_only.whole()).len(), 1);
        assert!(fusion_equal(&f, &inner).unwrap());
    }

    #[test]
    fn s3_char3_block_fusion() {
        let g = s3();
        let s = g.sylow_subgroup(3);
        let field = FiniteField::new(3, 1).unwrap();
        let kg = group_algebra_over(g.clone(), &s, &field, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = kg.alg.unit.clone();
        let d = defect_group(&kg, &b, 3).unwrap();
        assert_eq!(d, s);
        let bp = brauer_pairs(&kg, &b, &d, 0, &mut rng).unwrap();
        let fb = block_fusion(&g, &bp, 3);
        assert!(fusion_equal(&fb, &fusion_from_group(&g, &d, 3)).unwrap());
        let classes = twisted_diagonal_classes(&g, &d);
        let pre = fixed_point_presystem(&kg, &classes, 3);
        assert!(is_divisible(&g, &pre).holds());
    }

    #[test]
    fn s3_char2_defect_zero_block() {
        let g = s3();
        let s = g.sylow_subgroup(2);
        let field = FiniteField::new(2, 1).unwrap();
        let kg = group_algebra_over(g.clone(), &s, &field, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let blocks = algebra::block_idempotents(&kg.alg, &g, &mut rng).unwrap();
        assert_eq!(blocks.len(), 2);
        let orders: BTreeSet<usize> = blocks.iter().map(|b| defect_group(&kg, b, 2).unwrap().order()).collect();
        assert_eq!(orders, BTreeSet::from([1, 2]));
    }
}
