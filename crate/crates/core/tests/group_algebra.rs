use bflab::algebra::{self, group_algebra, AlgebraContext, Vector};
use bflab::catalog;
use bflab::field::{Fe, FiniteField};
use bflab::groups::PermGroup;
use bflab::linalg::Subspace;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kg(name: &str, p: u64, m: u32) -> (PermGroup, AlgebraContext) {
    let g = catalog::load(name).unwrap().unwrap();
    let a = group_algebra(&g, &FiniteField::new(p, m).unwrap());
    (g, a)
}

fn all_vectors(q: u64, dim: usize) -> Vec<Vector> {
    let n = q.pow(dim as u32);
    (0..n).map(|code| (0..dim).map(|i| (code / q.pow(i as u32)) % q).collect()).collect()
}

/// x ∈ J(A) iff 1 − a·x is a unit for every a ∈ A.
fn radical_by_enumeration(a: &AlgebraContext) -> Vec<Vector> {
    let f = &a.field;
    let elems = all_vectors(f.order(), a.dim);
    elems.iter().filter(|x| elems.iter().all(|y| a.is_unit(&a.sub(&a.unit, &a.mul(y, x))))).cloned().collect()
}

#[test]
fn dimensions_and_group_relations() {
    let (_, a) = kg("c2", 2, 1);
    assert_eq!(a.dim, 2);
    let x = a.basis_vector(1);
    assert_eq!(a.mul(&x, &x), a.unit);
    let (_, s3) = kg("s3", 3, 1);
    assert_eq!(s3.dim, 6);
    let one = PermGroup::from_generators("1", 1, &[], 500).unwrap();
    assert_eq!(group_algebra(&one, &FiniteField::new(5, 1).unwrap()).dim, 1);
    let (s4, ka) = kg("s4", 2, 1);
    for x in 0..s4.order() {
        assert_eq!(ka.mul(&ka.basis_vector(x), &ka.basis_vector(s4.inv(x))), ka.unit);
    }
}

#[test]
fn radicals_match_enumeration() {
    for (name, p) in [("c2", 2), ("c2", 3), ("c3", 3), ("c4", 2), ("v4", 2), ("s3", 2), ("s3", 3)] {
        let (_, a) = kg(name, p, 1);
        let j = algebra::radical(&a);
        let brute = radical_by_enumeration(&a);
        assert_eq!(brute.len() as u64, a.field.order().pow(j.dim() as u32), "{name} p={p}");
        assert!(brute.iter().all(|x| j.contains(&a.field, x)), "{name} p={p}");
    }
    let (_, kc2) = kg("c2", 2, 1);
    let j = algebra::radical(&kc2);
    assert_eq!(j.vectors(), vec![vec![1, 1]]);
    assert_eq!(algebra::radical(&kg("c2", 3, 1).1).dim(), 0);
    assert_eq!(algebra::radical(&kg("c3", 3, 1).1).dim(), 2);
}

#[test]
fn primitive_decompositions_of_small_algebras() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (_, semi) = kg("c2", 3, 1);
    let mut parts = algebra::primitive_decomposition(&semi, &semi.unit, &mut rng).unwrap();
    parts.sort();
    // (1 ± g)/2 with 1/2 = 2 in GF(3)
    assert_eq!(parts, vec![vec![2, 1], vec![2, 2]]);
    let (_, local) = kg("c2", 2, 1);
    assert_eq!(algebra::primitive_decomposition(&local, &local.unit, &mut rng).unwrap(), vec![local.unit.clone()]);
    assert!(algebra::is_primitive(&local, &local.unit));
    assert!(!algebra::is_primitive(&semi, &semi.unit));
    let k = group_algebra(&PermGroup::from_generators("1", 1, &[], 500).unwrap(), &FiniteField::new(3, 1).unwrap());
    assert!(algebra::is_primitive(&k, &k.unit));
}

#[test]
fn units_of_kc2() {
    let (_, char2) = kg("c2", 2, 1);
    assert!(!char2.is_unit(&[1, 1]));
    let (_, char3) = kg("c2", 3, 1);
    // 1 + g is a zero divisor: (1 + g)(1 − g) = 0
    assert!(!char3.is_unit(&[1, 1]));
    assert_eq!(char3.mul(&[1, 1], &[1, 2]), vec![0, 0]);
    let units: Vec<Vector> = all_vectors(3, 2).into_iter().filter(|v| char3.is_unit(v)).collect();
    let by_search: Vec<Vector> =
        all_vectors(3, 2).into_iter().filter(|v| all_vectors(3, 2).iter().any(|w| char3.mul(v, w) == char3.unit)).collect();
    assert_eq!(units, by_search);
    assert_eq!(units.len(), 4);
    assert_eq!(char3.invert(&[0, 2]).unwrap(), vec![0, 2]);
    assert!(char3.invert(&[1, 2]).is_err());
}

#[test]
fn block_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, p, expected) in [("c3", 3, 1), ("s3", 3, 1), ("s3", 2, 2)] {
        let (g, a) = kg(name, p, 1);
        assert_eq!(algebra::block_idempotents(&a, &g, &mut rng).unwrap().len(), expected, "{name} p={p}");
    }
}

#[test]
fn corners() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (_, a) = kg("s3", 3, 1);
    assert_eq!(a.corner(&a.unit).unwrap().ctx.dim, 6);
    let (_, kk) = kg("c2", 3, 1);
    assert_eq!(kk.corner(&[2, 2]).unwrap().ctx.dim, 1);
    let (g, ks3) = kg("s3", 2, 1);
    let blocks = algebra::block_idempotents(&ks3, &g, &mut rng).unwrap();
    let mut dims: Vec<usize> = blocks.iter().map(|b| ks3.corner(b).unwrap().ctx.dim).collect();
    dims.sort();
    assert_eq!(dims, vec![2, 4]);
}

fn vector_in(a: &AlgebraContext, seed: &[u64]) -> Vector {
    (0..a.dim).map(|i| seed[i % seed.len()].wrapping_mul(i as u64 + 1) % a.field.order()).collect()
}

fn group_algebras() -> Vec<(&'static str, u64, u32)> {
    vec![("c4", 2, 1), ("s3", 2, 2), ("s3", 3, 1), ("d8", 2, 1), ("a4", 2, 2), ("a4", 3, 1), ("q8", 2, 1)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn radical_is_a_nilpotent_ideal(k in 0usize..7, s1 in prop::collection::vec(any::<u64>(), 1..8), s2 in prop::collection::vec(any::<u64>(), 1..8)) {
        let (name, p, m) = group_algebras()[k];
        let (_, a) = kg(name, p, m);
        let j = algebra::radical(&a);
        let f = &a.field;
        let x = vector_in(&a, &s1);
        let coords: Vec<Fe> = (0..j.dim()).map(|i| s2[i % s2.len()] % f.order()).collect();
        let y = j.combine(f, &coords);
        prop_assert!(j.contains(f, &a.mul(&x, &y)));
        prop_assert!(j.contains(f, &a.mul(&y, &x)));
        let mut power = j.clone();
        for _ in 0..a.dim {
            power = a.product_span(&power, &j);
        }
        prop_assert_eq!(power.dim(), 0);
    }

    #[test]
    fn decompositions_are_complete_orthogonal_primitive(k in 0usize..7, seed in any::<u64>()) {
        let (name, p, m) = group_algebras()[k];
        let (g, a) = kg(name, p, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blocks = algebra::block_idempotents(&a, &g, &mut rng).unwrap();
        let parts = algebra::primitive_decomposition(&a, &a.unit, &mut rng).unwrap();
        let mut total = a.zero();
        for (i, e) in parts.iter().enumerate() {
            prop_assert!(a.is_idempotent(e));
            prop_assert!(algebra::is_primitive(&a, e));
            for (j, f) in parts.iter().enumerate() {
                if i != j {
                    prop_assert_eq!(a.mul(e, f), a.zero());
                }
            }
            // each primitive idempotent lies under exactly one block
            prop_assert_eq!(blocks.iter().filter(|b| a.mul(b, e) == *e).count(), 1);
            total = a.add(&total, e);
        }
        prop_assert_eq!(total, a.unit.clone());
        let span: Vec<Vector> = blocks.iter().flat_map(|b| (0..a.dim).map(|x| a.mul(b, &a.basis_vector(x))).collect::<Vec<_>>()).collect();
        prop_assert_eq!(Subspace::from_vectors(&a.field, a.dim, &span).dim(), a.dim);
    }
}
