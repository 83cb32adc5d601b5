use std::sync::Arc;

use bflab::algebra;
use bflab::blocks::GroupContext;
use bflab::catalog;
use bflab::fusion::{self, block_fusion, brauer_pairs, fusion_equal, fusion_from_group, is_divisible, FusionSystem};
use bflab::groups::{Injection, PermGroup, Subgroup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn group(name: &str) -> Arc<PermGroup> {
    Arc::new(catalog::load(name).unwrap().unwrap())
}

fn compose_power(phi: &Injection, n: usize) -> Injection {
    let mut out = Injection::identity(&phi.domain_group());
    for _ in 0..n {
        out = out.then(phi).unwrap();
    }
    out
}

#[test]
fn v4_in_a4_has_an_automorphism_of_order_3() {
    let g = group("a4");
    let v4 = g.sylow_subgroup(2);
    let f = fusion_from_group(&g, &v4, 2);
    let autos = f.automorphisms(&v4);
    assert_eq!(autos.len(), 3);
    let order3 = autos.iter().find(|a| !a.is_identity()).unwrap();
    assert!(!compose_power(order3, 2).is_identity());
    assert!(compose_power(order3, 3).is_identity());
}

#[test]
fn c3_in_s3_contains_inversion() {
    let g = group("s3");
    let c3 = g.sylow_subgroup(3);
    let f = fusion_from_group(&g, &c3, 3);
    let inversion = Injection { domain: c3.elems.clone(), images: c3.elems.iter().map(|&x| g.inv(x)).collect() };
    assert!(f.contains(&inversion));
    assert_eq!(f.automorphisms(&c3).len(), 2);
    let c3_alone = group("c3");
    let fc = fusion_from_group(&c3_alone, &c3_alone.whole(), 3);
    assert_eq!(fc.automorphisms(&c3_alone.whole()).len(), 1);
}

#[test]
fn fusion_equality() {
    let g = group("s4");
    let s = g.sylow_subgroup(2);
    let f = fusion_from_group(&g, &s, 2);
    let inner = fusion_from_group(&g, &s, 2);
    assert!(fusion_equal(&f, &inner).unwrap());
    let d8_self = FusionSystem::from_maps(
        s.clone(),
        2,
        g.p_subgroups_in(&s, 2).iter().flat_map(|p| s.elems.iter().map(|&x| g.conjugation_map(x, p)).collect::<Vec<_>>()),
    );
    // S4 fuses the two noncentral classes of involutions in its Sylow subgroup; D8 does not
    assert!(!fusion_equal(&f, &d8_self).unwrap());
    assert!(d8_self.len() < f.len());
    let other = fusion_from_group(&g, &g.sylow_subgroup(3), 3);
    assert!(fusion_equal(&f, &other).is_err());
}

#[test]
fn group_fusion_is_divisible_and_contains_conjugations() {
    for (name, _) in catalog::ENTRIES {
        let g = group(name);
        for p in catalog::dividing_primes(&g) {
            let s = g.sylow_subgroup(p);
            let f = fusion_from_group(&g, &s, p);
            assert!(is_divisible(&g, &f).holds(), "{name} p={p}");
            for q in g.p_subgroups_in(&s, p) {
                for x in 0..g.order() {
                    let c = g.conjugation_map(x, &q);
                    assert_eq!(f.contains(&c), c.image_group().is_subset_of(&s), "{name} p={p}");
                }
            }
        }
    }
}

#[test]
fn broken_systems_fail_divisibility() {
    let g = group("s3");
    let c3 = g.sylow_subgroup(3);
    let inversion = Injection { domain: c3.elems.clone(), images: c3.elems.iter().map(|&x| g.inv(x)).collect() };
    let no_inclusions = FusionSystem::from_maps(c3.clone(), 3, [inversion]);
    let r = is_divisible(&g, &no_inclusions);
    assert!(!r.inclusions);
    assert!(!r.holds());
    assert!(!r.witnesses.is_empty());
}

/// Principal block fusion coincides with the group fusion on a Sylow subgroup.
#[test]
fn principal_block_fusion_is_group_fusion() {
    for (name, _) in catalog::ENTRIES {
        let g = group(name);
        for p in catalog::dividing_primes(&g) {
            let ctx = GroupContext::new(g.clone(), p, 3).unwrap();
            let b = ctx.blocks[0].clone();
            assert!(ctx.is_principal(&b));
            let d = fusion::defect_group(&ctx.kg, &b, p).unwrap();
            assert_eq!(d, ctx.sylow, "{name} p={p}");
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let bp = brauer_pairs(&ctx.kg, &b, &d, 0, &mut rng).unwrap();
            let fb = block_fusion(&g, &bp, p);
            assert!(fusion_equal(&fb, &fusion_from_group(&g, &d, p)).unwrap(), "{name} p={p}");
        }
    }
}

/// Other maximal pair choices give N_G(D)-conjugate systems on the same D.
#[test]
fn block_fusion_depends_on_the_maximal_pair_only_up_to_conjugacy() {
    for (name, _) in catalog::ENTRIES {
        let g = group(name);
        for p in catalog::dividing_primes(&g) {
            let ctx = GroupContext::new(g.clone(), p, 3).unwrap();
            for b in &ctx.blocks {
                let d = fusion::defect_group(&ctx.kg, b, p).unwrap();
                if d.order() == 1 {
                    continue;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(8);
                let first = brauer_pairs(&ctx.kg, b, &d, 0, &mut rng).unwrap();
                let f0 = block_fusion(&g, &first, p);
                assert!(is_divisible(&g, &f0).holds());
                let norm = g.normalizer(&d);
                for choice in 1..first.maximal_candidates {
                    let bp = brauer_pairs(&ctx.kg, b, &d, choice, &mut rng).unwrap();
                    let fc = block_fusion(&g, &bp, p);
                    assert_eq!(fc.len(), f0.len());
                    assert!(norm.elems.iter().any(|&x| fusion_equal(&f0.transport(&g, x), &fc).unwrap()), "{name} p={p}");
                }
                assert!(brauer_pairs(&ctx.kg, b, &d, first.maximal_candidates, &mut rng).is_err());
            }
        }
    }
}

#[test]
fn defect_zero_blocks() {
    let g = group("s3");
    let ctx = GroupContext::new(g.clone(), 2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let blocks = algebra::block_idempotents(&ctx.kg.alg, &g, &mut rng).unwrap();
    let mut orders: Vec<usize> = blocks.iter().map(|b| fusion::defect_group(&ctx.kg, b, 2).unwrap().order()).collect();
    orders.sort();
    assert_eq!(orders, vec![1, 2]);
    let trivial = FusionSystem::from_maps(Subgroup::trivial(), 2, [Injection::identity(&Subgroup::trivial())]);
    assert!(is_divisible(&g, &trivial).holds());
}
