use std::sync::Arc;

use bflab::algebra::{self, AlgebraContext, Vector};
use bflab::blocks::{analyze_block, augmentation, check_block, corner_to_ambient, GroupContext};
use bflab::catalog;
use bflab::error::Error;
use bflab::groups::{p_part, Injection, PermGroup};
use bflab::linalg::{is_zero, rank, Matrix};

fn context(name: &str, p: u64) -> GroupContext {
    let g = Arc::new(catalog::load(name).unwrap().unwrap());
    GroupContext::new(g, p, 21).unwrap()
}

fn catalog_pairs() -> Vec<(&'static str, u64)> {
    catalog::ENTRIES
        .iter()
        .flat_map(|(name, _)| {
            let g: PermGroup = catalog::load(name).unwrap().unwrap();
            catalog::dividing_primes(&g).into_iter().map(move |p| (*name, p))
        })
        .collect()
}

/// Number of idempotents of Z(A), by enumerating the centre.
fn central_idempotents(a: &AlgebraContext) -> usize {
    let z = a.center();
    let q = a.field.order();
    let total = q.pow(z.dim() as u32);
    (0..total)
        .filter(|code| {
            let c: Vec<u64> = (0..z.dim()).map(|i| (code / q.pow(i as u32)) % q).collect();
            a.is_idempotent(&z.combine(&a.field, &c))
        })
        .count()
}

fn power(a: &AlgebraContext, x: &[u64], mut n: u64) -> Vector {
    let mut acc = a.unit.clone();
    let mut base = x.to_vec();
    while n > 0 {
        if n & 1 == 1 {
            acc = a.mul(&acc, &base);
        }
        base = a.mul(&base, &base);
        n >>= 1;
    }
    acc
}

/// dim ker(x ↦ x^q − x) on Z(A): the number of blocks when the field splits Z(A)/J(Z(A)).
fn frobenius_fixed_dim(a: &AlgebraContext) -> usize {
    let z = a.center();
    let f = &a.field;
    let rows: Vec<Vector> = z.vectors().iter().map(|v| a.sub(&power(a, v, f.order()), v)).collect();
    let m = Matrix::from_rows(a.dim, &rows).unwrap();
    z.dim() - rank(f, &m)
}

#[test]
fn block_count_matches_central_idempotents() {
    for (name, p) in catalog_pairs() {
        let ctx = context(name, p);
        let a = &ctx.kg.alg;
        assert_eq!(frobenius_fixed_dim(a), ctx.blocks.len(), "{name} p={p}");
        if a.field.order().pow(a.center().dim() as u32) <= 20_000 {
            assert_eq!(central_idempotents(a), 1 << ctx.blocks.len(), "{name} p={p}");
        }
    }
}

#[test]
fn block_idempotents_decompose_the_unit() {
    for (name, p) in catalog_pairs() {
        let ctx = context(name, p);
        let a = &ctx.kg.alg;
        let z = a.center();
        let mut total = a.zero();
        for (i, b) in ctx.blocks.iter().enumerate() {
            assert!(a.is_idempotent(b) && z.contains(&a.field, b));
            for (j, c) in ctx.blocks.iter().enumerate() {
                if i != j {
                    assert!(is_zero(&a.mul(b, c)));
                }
            }
            total = a.add(&total, b);
        }
        assert_eq!(total, a.unit, "{name} p={p}");
        // exactly one block has augmentation 1 and it is listed first
        let aug: Vec<u64> = ctx.blocks.iter().map(|b| augmentation(&a.field, b)).collect();
        assert_eq!(aug[0], 1);
        assert!(aug[1..].iter().all(|&x| x == 0));
        assert!(ctx.is_principal(&ctx.blocks[0]));
    }
}

/// |D| = |G|_p² / (dim B)_p.
#[test]
fn defect_orders_follow_from_block_dimensions() {
    for (name, p) in catalog_pairs() {
        let ctx = context(name, p);
        let gp = p_part(ctx.group.order() as u64, p);
        let mut dims = 0;
        for k in 0..ctx.blocks.len() {
            let bd = analyze_block(&ctx, k, 0).unwrap();
            let dp = p_part(bd.block_dim as u64, p);
            assert_eq!(bd.defect.order() as u64, gp * gp / dp, "{name} p={p} block {k}");
            assert!(bd.defect.is_subset_of(&ctx.sylow) || k > 0);
            dims += bd.block_dim;
        }
        assert_eq!(dims, ctx.group.order());
    }
}

#[test]
fn known_block_structure() {
    // character degrees: S4 has 3-defect-zero characters 3, 3; SL(2,3) splits by the central character
    for (name, p, dims) in [
        ("s3", 2, vec![2, 4]),
        ("s3", 3, vec![6]),
        ("a4", 3, vec![3, 9]),
        ("s4", 3, vec![6, 9, 9]),
        ("sl2_3", 3, vec![3, 12, 9]),
        ("d8", 2, vec![8]),
    ] {
        let ctx = context(name, p);
        let mut got: Vec<usize> = (0..ctx.blocks.len()).map(|k| analyze_block(&ctx, k, 0).unwrap().block_dim).collect();
        got[1..].sort();
        let mut want = dims.clone();
        want[1..].sort();
        assert_eq!(got, want, "{name} p={p}");
    }
}

#[test]
fn source_idempotents_are_primitive_with_nonzero_brauer_image() {
    for (name, p) in catalog_pairs() {
        let ctx = context(name, p);
        for k in 0..ctx.blocks.len() {
            let bd = analyze_block(&ctx, k, 0).unwrap();
            let kgd = &bd.kg_d;
            for i in &bd.source_candidates {
                assert!(kgd.alg.is_idempotent(i));
                assert_eq!(kgd.alg.mul(&bd.block, i), *i);
                assert!(kgd.fixed_points(&bd.defect).contains(&kgd.alg.field, i));
                assert!(kgd.is_primitive_in(&bd.defect, i).unwrap());
                assert!(!kgd.brauer_quotient(&Injection::identity(&bd.defect)).is_zero_image(&kgd.alg, i));
            }
            assert_eq!(bd.source.dim(), kgd.alg.corner_space(bd.source_idempotent()).dim());
            assert_eq!(bd.source.dim() % bd.defect.order(), 0, "{name} p={p}");
        }
    }
}

#[test]
fn structural_map_of_the_source_is_a_homomorphism() {
    for (name, p) in [("s3", 3), ("a4", 2), ("sl2_3", 3)] {
        let ctx = context(name, p);
        let bd = analyze_block(&ctx, 0, 0).unwrap();
        let s = &bd.source;
        let g = &ctx.group;
        for &x in &bd.defect.elems {
            for &y in &bd.defect.elems {
                assert_eq!(s.alg.mul(s.structural_of(x), s.structural_of(y)), *s.structural_of(g.mul(x, y)));
            }
            let lifted = corner_to_ambient(&bd.kg_d, bd.source_idempotent(), s.structural_of(x)).unwrap();
            let expected = bd.kg_d.alg.mul(&bd.kg_d.alg.basis_vector(x), bd.source_idempotent());
            assert_eq!(lifted, expected);
        }
    }
}

#[test]
fn structural_checks_pass_on_the_catalog() {
    for (name, p) in catalog_pairs() {
        let ctx = context(name, p);
        for k in 0..ctx.blocks.len() {
            let bd = analyze_block(&ctx, k, 0).unwrap();
            let c = check_block(&ctx, &bd).unwrap();
            assert!(c.fusion_matches && c.divisibility.holds(), "{name} p={p} block {k}");
            assert!(c.characteristic.all() && c.rank_formula && c.top_orbits && c.block_stable, "{name} p={p} block {k}");
        }
    }
}

#[test]
fn doubled_field_keeps_blocks() {
    let ctx = context("a4", 3);
    let big = ctx.doubled().unwrap();
    assert_eq!(big.field.m(), 2 * ctx.field.m());
    assert_eq!(big.blocks.len(), ctx.blocks.len());
    let a = analyze_block(&ctx, 0, 0).unwrap();
    let b = analyze_block(&big, 0, 0).unwrap();
    assert_eq!((a.defect, a.block_dim, a.source.dim()), (b.defect, b.block_dim, b.source.dim()));
}

#[test]
fn bad_indices_are_input_errors() {
    let ctx = context("s3", 2);
    assert!(matches!(analyze_block(&ctx, 5, 0), Err(Error::Input(_))));
    let bd = analyze_block(&ctx, 0, 0).unwrap();
    let n = bd.source_candidates.len();
    assert!(matches!(analyze_block(&ctx, 0, n), Err(Error::Input(_))));
    assert!(GroupContext::new(ctx.group.clone(), 4, 1).is_err());
}

#[test]
fn block_idempotents_agree_with_the_generic_routine() {
    let ctx = context("s4", 3);
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2);
    let mut generic: Vec<Vector> = algebra::block_idempotents_of(&ctx.kg.alg, &mut rng).unwrap();
    let mut ours = ctx.blocks.clone();
    generic.sort();
    ours.sort();
    assert_eq!(generic, ours);
}
