use bflab::field::{make_field, Fe, FiniteField};
use bflab::linalg::{nullspace, rank, solve, Matrix, Subspace};
use bflab::poly::{self, factor_poly};
use proptest::prelude::*;

const FIELDS: &[(u64, u32)] = &[(2, 1), (2, 2), (2, 3), (2, 8), (3, 1), (3, 2), (5, 1), (7, 2), (13, 1)];

fn field(i: usize) -> FiniteField {
    let (p, m) = FIELDS[i % FIELDS.len()];
    FiniteField::new(p, m).unwrap()
}

/// Smallest m with e | p^m − 1, by scanning.
fn splitting_degree(p: u64, e: u64) -> u32 {
    (1..).find(|&m| (p.pow(m) - 1) % e == 0).unwrap()
}

#[test]
fn make_field_picks_the_smallest_splitting_degree() {
    for (p, e) in [(2, 3), (3, 1), (2, 7), (3, 4), (5, 3), (2, 5)] {
        let f = make_field(p, e).unwrap();
        assert_eq!(f.p(), p);
        assert_eq!(f.m(), splitting_degree(p, e), "p={p} e={e}");
    }
    assert_eq!(make_field(2, 3).unwrap().order(), 4);
    assert_eq!(make_field(2, 7).unwrap().order(), 8);
}

#[test]
fn cubic_over_gf5_splits_into_linear_factors() {
    let f = FiniteField::new(5, 1).unwrap();
    // x³ − x = x(x − 1)(x + 1)
    let a = vec![0, f.neg(1), 0, 1];
    let fac = factor_poly(&f, &a).unwrap();
    let got: Vec<Vec<Fe>> = fac
        .factors
        .iter()
        .map(|(g, k)| {
            assert_eq!(*k, 1);
            g.clone()
        })
        .collect();
    assert_eq!(got, vec![vec![0, 1], vec![1, 1], vec![4, 1]]);
}

/// Irreducibility by trial division over all monic polynomials of degree ≤ n/2.
fn irreducible_by_search(f: &FiniteField, a: &[Fe]) -> bool {
    let n = poly::degree(a).unwrap();
    let q = f.order();
    for d in 1..=n / 2 {
        let count = q.pow(d as u32);
        for code in 0..count {
            let mut g: Vec<Fe> = (0..d).map(|i| (code / q.pow(i as u32)) % q).collect();
            g.push(1);
            if poly::rem(f, a, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

#[test]
fn rank_nullity_fixed_examples() {
    let f = FiniteField::new(2, 1).unwrap();
    assert_eq!(rank(&f, &Matrix::identity(3)), 3);
    assert_eq!(nullspace(&f, &Matrix::zeros(2, 2)).dim(), 2);
    let m = Matrix::from_rows(2, &[vec![1, 1], vec![0, 1]]).unwrap();
    assert_eq!(solve(&f, &m, &[0, 1]).unwrap(), Some(vec![1, 1]));
}

#[test]
fn subspace_lattice_examples() {
    let f = FiniteField::new(3, 1).unwrap();
    let e1 = Subspace::from_vectors(&f, 2, &[vec![1, 0]]);
    let e2 = Subspace::from_vectors(&f, 2, &[vec![0, 1]]);
    assert_eq!(e1.sum(&f, &e1).unwrap(), e1);
    assert_eq!(e1.intersect(&f, &e1).unwrap(), e1);
    assert_eq!(e1.sum(&f, &e2).unwrap().dim(), 2);
    assert_eq!(e1.intersect(&f, &e2).unwrap().dim(), 0);
    let diag = Subspace::from_vectors(&f, 2, &[vec![1, 1]]);
    assert!(!diag.contains(&f, &[1, 0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(i in 0usize..FIELDS.len(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = field(i);
        let q = f.order();
        let (a, b, c) = (a % q, b % q, c % q);
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        } else {
            prop_assert!(f.inv(a).is_err());
        }
        prop_assert_eq!(f.pow(a, q), a);
        prop_assert_eq!(f.from_digits(&f.digits(a)), a);
    }

    #[test]
    fn factorization_multiplies_back(i in 0usize..FIELDS.len(), coeffs in prop::collection::vec(any::<u64>(), 1..9)) {
        let f = field(i);
        let mut a: Vec<Fe> = coeffs.iter().map(|c| c % f.order()).collect();
        poly::trim(&mut a);
        prop_assume!(poly::degree(&a).is_some());
        let fac = factor_poly(&f, &a).unwrap();
        prop_assert_eq!(fac.expand(&f), a);
        for (g, _) in &fac.factors {
            prop_assert_eq!(*g.last().unwrap(), 1);
        }
    }

    #[test]
    fn factors_are_irreducible_over_small_fields(p in prop::sample::select(vec![2u64, 3]), coeffs in prop::collection::vec(0u64..3, 2..8)) {
        let f = FiniteField::new(p, 1).unwrap();
        let mut a: Vec<Fe> = coeffs.iter().map(|c| c % p).collect();
        poly::trim(&mut a);
        prop_assume!(poly::degree(&a).is_some_and(|d| d >= 1));
        for (g, _) in &factor_poly(&f, &a).unwrap().factors {
            prop_assert!(irreducible_by_search(&f, g), "{:?} is reducible", g);
        }
    }

    #[test]
    fn rank_plus_nullity(i in 0usize..FIELDS.len(), rows in 1usize..7, cols in 1usize..7, seed in prop::collection::vec(any::<u64>(), 49)) {
        let f = field(i);
        let data: Vec<Vec<Fe>> = (0..rows).map(|r| (0..cols).map(|c| seed[r * 7 + c] % f.order()).collect()).collect();
        let m = Matrix::from_rows(cols, &data).unwrap();
        let ns = nullspace(&f, &m);
        prop_assert_eq!(rank(&f, &m) + ns.dim(), cols);
        for v in ns.vectors() {
            prop_assert!(m.transpose().vec_mul(&f, &v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solve_returns_a_solution(i in 0usize..FIELDS.len(), seed in prop::collection::vec(any::<u64>(), 20)) {
        let f = field(i);
        let q = f.order();
        let data: Vec<Vec<Fe>> = (0..4).map(|r| (0..4).map(|c| seed[r * 4 + c] % q).collect()).collect();
        let m = Matrix::from_rows(4, &data).unwrap();
        let x: Vec<Fe> = seed[16..20].iter().map(|s| s % q).collect();
        let b = m.transpose().vec_mul(&f, &x);
        let y = solve(&f, &m, &b).unwrap().expect("b is in the image");
        prop_assert_eq!(m.transpose().vec_mul(&f, &y), b);
    }
}
