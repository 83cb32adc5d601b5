//! Block → defect group → maximal Brauer pair → source idempotent → source algebra.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, Vector};
use crate::bisets::{self, BisetShape, CharacteristicReport};
use crate::error::{Error, Result};
use crate::field::{make_field, FiniteField};
use crate::fusion::{self, BrauerPairs, DivisibilityReport, FusionSystem};
use crate::groups::{p_part, Injection, PermGroup, Subgroup, TwistedClasses};
use crate::salgebra::{fnv, usize_bytes, InteriorAlgebra};

/// Largest extension degree tried when a splitting step needs a bigger field.
pub const MAX_FIELD_DEGREE: u32 = 16;

/// kG over a field large enough for the group, with its blocks.
pub struct GroupContext {
    pub group: Arc<PermGroup>,
    pub prime: u64,
    pub field: FiniteField,
    pub sylow: Subgroup,
    /// kG with the structural map of the Sylow subgroup.
    pub kg: Arc<InteriorAlgebra>,
    pub blocks: Vec<Vector>,
    pub seed: u64,
}

impl GroupContext {
    pub fn new(group: Arc<PermGroup>, prime: u64, seed: u64) -> Result<Self> {
        if !(group.order() as u64).is_multiple_of(prime) {
            return Err(Error::Input(format!("{prime} does not divide |G| = {}", group.order())));
        }
        let exp = group.exponent();
        let field = make_field(prime, exp / p_part(exp, prime))?;
        Self::with_field(group, prime, field, seed)
    }

    pub fn with_field(group: Arc<PermGroup>, prime: u64, field: FiniteField, seed: u64) -> Result<Self> {
        let sylow = group.sylow_subgroup(prime);
        let kg = Arc::new(fusion::group_algebra_over(group.clone(), &sylow, &field, seed)?);
        let mut rng = ChaCha8Rng::seed_from_u64(fnv(&[&seed.to_le_bytes(), b"blocks"]));
        let mut blocks = algebra::block_idempotents(&kg.alg, &group, &mut rng)?;
        // principal block first, then canonical order
        blocks.sort_by_key(|b| (augmentation(&field, b) == 0, b.clone()));
        Ok(GroupContext { group, prime, field, sylow, kg, blocks, seed })
    }

    /// Rebuild over GF(p^{2m}).
    pub fn doubled(&self) -> Result<Self> {
        Self::with_field(self.group.clone(), self.prime, self.field.doubled()?, self.seed)
    }

    pub fn is_principal(&self, b: &[u64]) -> bool {
        augmentation(&self.field, b) != 0
    }
}

/// Image of x under kG → k, g ↦ 1.
pub fn augmentation(f: &FiniteField, x: &[u64]) -> u64 {
    x.iter().fold(0, |acc, &c| f.add(acc, c))
}

pub struct BlockData {
    pub index: usize,
    pub block: Vector,
    pub principal: bool,
    pub block_dim: usize,
    pub defect: Subgroup,
    pub pairs: BrauerPairs,
    /// Local primitive idempotents of B^D lying under e_D, canonical order.
    pub source_candidates: Vec<Vector>,
    pub source_choice: usize,
    /// kG with the structural map of D.
    pub kg_d: Arc<InteriorAlgebra>,
    pub block_alg: Arc<InteriorAlgebra>,
    pub source: Arc<InteriorAlgebra>,
    pub classes: Arc<TwistedClasses>,
    pub block_fusion: FusionSystem,
}

impl BlockData {
    pub fn source_idempotent(&self) -> &Vector {
        &self.source_candidates[self.source_choice]
    }
}

/// Corner e·kG·e as an interior D-algebra with d ↦ d·e.
pub fn corner_interior(kg_d: &InteriorAlgebra, e: &[u64], seed: u64) -> Result<InteriorAlgebra> {
    let sub = kg_d.alg.corner(e)?;
    let mut st = vec![];
    for &d in &kg_d.d.elems {
        let de = kg_d.alg.mul(&kg_d.alg.basis_vector(d), e);
        if kg_d.alg.mul(e, &de) != de {
            return Err(Error::Internal("corner idempotent is not D-fixed".into()));
        }
        st.push(sub.from_ambient(&de).ok_or_else(|| Error::Internal("structural image left the corner".into()))?);
    }
    for s in &st {
        if !sub.ctx.is_unit(s) {
            return Err(Error::Internal("structural image is not a unit of the corner".into()));
        }
    }
    InteriorAlgebra::new(sub.ctx, kg_d.group.clone(), kg_d.d.clone(), st, seed)
}

/// Embed a corner element back into kG.
pub fn corner_to_ambient(kg_d: &InteriorAlgebra, e: &[u64], x: &[u64]) -> Result<Vector> {
    Ok(kg_d.alg.corner(e)?.to_ambient(x))
}

pub fn analyze_block(ctx: &GroupContext, index: usize, source_choice: usize) -> Result<BlockData> {
    let g = &ctx.group;
    let b = ctx.blocks.get(index).ok_or_else(|| Error::Input(format!("no block {index}")))?.clone();
    let seed = fnv(&[&ctx.seed.to_le_bytes(), &usize_bytes(&[index])]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let defect = fusion::defect_group(&ctx.kg, &b, ctx.prime)?;
    let pairs = fusion::brauer_pairs(&ctx.kg, &b, &defect, 0, &mut rng)?;
    let block_fusion = fusion::block_fusion(g, &pairs, ctx.prime);
    let kg_d = Arc::new(fusion::group_algebra_over(g.clone(), &defect, &ctx.field, seed)?);
    let e_d = &pairs.pairs[&defect];
    let mut candidates = vec![];
    let bq = kg_d.brauer_algebra(&defect)?;
    let be = bq.project(e_d).ok_or_else(|| Error::Internal("e_D is not D-fixed".into()))?;
    for l in kg_d.decompose_in(&defect, &b, &mut rng)? {
        let bl = bq.project(&l).expect("decomposition is D-fixed");
        if !crate::linalg::is_zero(&bl) && bq.ctx.mul(&bl, &be) == bl {
            candidates.push(l);
        }
    }
    candidates.sort();
    if candidates.is_empty() {
        return Err(Error::Internal("no source idempotent under the maximal Brauer pair".into()));
    }
    if source_choice >= candidates.len() {
        return Err(Error::Input("source idempotent index out of range".into()));
    }
    let block_alg = Arc::new(corner_interior(&kg_d, &b, seed ^ 1)?);
    let source = Arc::new(corner_interior(&kg_d, &candidates[source_choice], seed ^ 2)?);
    let classes = Arc::new(crate::groups::twisted_diagonal_classes(g, &defect));
    Ok(BlockData {
        index,
        principal: ctx.is_principal(&b),
        block_dim: block_alg.dim(),
        block: b,
        defect,
        pairs,
        source_candidates: candidates,
        source_choice,
        kg_d,
        block_alg,
        source,
        classes,
        block_fusion,
    })
}

/// Structural checks on a block and its source algebra.
#[derive(Clone, Debug)]
pub struct BlockChecks {
    pub source_shape: BisetShape,
    pub block_shape: BisetShape,
    pub presystem: FusionSystem,
    pub divisibility: DivisibilityReport,
    pub fusion_matches: bool,
    pub characteristic: CharacteristicReport,
    pub rank_formula: bool,
    pub top_orbits: bool,
    pub block_stable: bool,
}

pub fn check_block(ctx: &GroupContext, bd: &BlockData) -> Result<BlockChecks> {
    let g = &ctx.group;
    let p = ctx.prime;
    let source_shape = bisets::shape_from_brauer_dims(&bd.source, bd.classes.clone())?;
    let block_shape = bisets::shape_from_brauer_dims(&bd.block_alg, bd.classes.clone())?;
    let presystem = fusion::fixed_point_presystem(&bd.source, &bd.classes, p);
    let divisibility = fusion::is_divisible(g, &presystem);
    let fusion_matches = fusion::fusion_equal(&presystem, &bd.block_fusion)?;
    let characteristic = bisets::characteristic_report(g, &source_shape, &bd.block_fusion)?;
    let d = bd.defect.order() as u64;
    let gp = p_part(g.order() as u64, p);
    let dim_b = bd.block_dim as u64;
    let rank_formula = dim_b.is_multiple_of(d) && p_part(dim_b / d, p) == (gp / d) * (gp / d);
    let mut top_orbits = true;
    for alpha in g.injective_maps(&bd.defect, &bd.defect) {
        let expected = u64::from(bd.block_fusion.contains(&alpha));
        if source_shape.multiplicity_of(&alpha) != expected {
            top_orbits = false;
        }
    }
    let block_stable = bd.block_fusion.maps().all(|phi| {
        let here = block_shape.fixed_count(phi);
        here == block_shape.fixed_count(&Injection::identity(&phi.domain_group()))
            && here == block_shape.fixed_count(&Injection::identity(&phi.image_group()))
    });
    Ok(BlockChecks {
        source_shape,
        block_shape,
        presystem,
        divisibility,
        fusion_matches,
        characteristic,
        rank_formula,
        top_orbits,
        block_stable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Arc<PermGroup> {
        Arc::new(PermGroup::from_generators("S3", 3, &[vec![1, 2, 0], vec![1, 0, 2]], 500).unwrap())
    }

    #[test]
    fn s3_char3_source_algebra() {
        let ctx = GroupContext::new(s3(), 3, 1).unwrap();
        assert_eq!(ctx.blocks.len(), 1);
        let bd = analyze_block(&ctx, 0, 0).unwrap();
        assert_eq!(bd.defect.order(), 3);
        assert_eq!(bd.source.dim(), 6);
        let checks = check_block(&ctx, &bd).unwrap();
        assert!(checks.fusion_matches);
        assert!(checks.divisibility.holds());
        assert!(checks.characteristic.all());
        assert!(checks.rank_formula && checks.top_orbits && checks.block_stable);
    }

    #[test]
    fn s3_char2_blocks() {
        let ctx = GroupContext::new(s3(), 2, 1).unwrap();
        assert_eq!(ctx.blocks.len(), 2);
        assert!(ctx.is_principal(&ctx.blocks[0]));
        let b0 = analyze_block(&ctx, 0, 0).unwrap();
        let b1 = analyze_block(&ctx, 1, 0).unwrap();
        assert_eq!(b0.defect.order(), 2);
        assert_eq!(b1.defect.order(), 1);
        assert_eq!(b1.block_dim, 4);
        assert_eq!(b1.source.dim(), 1);
        for bd in [&b0, &b1] {
            let c = check_block(&ctx, bd).unwrap();
            assert!(c.fusion_matches && c.characteristic.all() && c.rank_formula && c.top_orbits);
        }
    }
}
