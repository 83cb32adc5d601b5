//! Dense univariate polynomials over a [`FiniteField`], lowest degree first.
//! The zero polynomial is the empty vector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};

pub type Poly = Vec<Fe>;

pub fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn degree(a: &[Fe]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

pub fn add(f: &FiniteField, a: &[Fe], b: &[Fe]) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n).map(|i| f.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect();
    trim(&mut out);
    out
}

pub fn sub(f: &FiniteField, a: &[Fe], b: &[Fe]) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n).map(|i| f.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect();
    trim(&mut out);
    out
}

pub fn mul(f: &FiniteField, a: &[Fe], b: &[Fe]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

pub fn scale(f: &FiniteField, a: &[Fe], c: Fe) -> Poly {
    let mut out: Poly = a.iter().map(|&x| f.mul(x, c)).collect();
    trim(&mut out);
    out
}

pub fn monic(f: &FiniteField, a: &[Fe]) -> Poly {
    match a.last() {
        None => vec![],
        Some(&lead) => scale(f, a, f.inv(lead).expect("leading coefficient is nonzero")),
    }
}

/// Quotient and remainder. Panics on division by zero.
pub fn divrem(f: &FiniteField, a: &[Fe], b: &[Fe]) -> (Poly, Poly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let inv_lead = f.inv(b[db]).expect("nonzero lead");
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![0; r.len() - db];
    while r.len() > db {
        let d = r.len() - 1;
        let c = f.mul(r[d], inv_lead);
        let shift = d - db;
        q[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, bc));
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub fn rem(f: &FiniteField, a: &[Fe], b: &[Fe]) -> Poly {
    divrem(f, a, b).1
}

/// Monic greatest common divisor.
pub fn gcd(f: &FiniteField, a: &[Fe], b: &[Fe]) -> Poly {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, &a)
}

/// Extended Euclid: returns (g, s, t) with s·a + t·b = g monic.
pub fn xgcd(f: &FiniteField, a: &[Fe], b: &[Fe]) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    trim(&mut r0);
    trim(&mut r1);
    let (mut s0, mut s1): (Poly, Poly) = (vec![1], vec![]);
    let (mut t0, mut t1): (Poly, Poly) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let s = sub(f, &s0, &mul(f, &q, &s1));
        let t = sub(f, &t0, &mul(f, &q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    match r0.last() {
        None => (vec![], s0, t0),
        Some(&lead) => {
            let c = f.inv(lead).unwrap();
            (scale(f, &r0, c), scale(f, &s0, c), scale(f, &t0, c))
        }
    }
}

pub fn mulmod(f: &FiniteField, a: &[Fe], b: &[Fe], m: &[Fe]) -> Poly {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod(f: &FiniteField, a: &[Fe], mut e: u64, m: &[Fe]) -> Poly {
    let mut acc = rem(f, &[1], m);
    let mut base = rem(f, a, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &base, m);
        }
        base = mulmod(f, &base, &base, m);
        e >>= 1;
    }
    acc
}

pub fn derivative(f: &FiniteField, a: &[Fe]) -> Poly {
    let mut out: Poly = a.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, f.from_int(i as i64))).collect();
    trim(&mut out);
    out
}

pub fn eval(f: &FiniteField, a: &[Fe], x: Fe) -> Fe {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Result of [`factor_poly`]: `unit · Π factor^mult`, factors monic,
/// irreducible, sorted by (degree, coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Fe,
    pub factors: Vec<(Poly, usize)>,
}

impl Factorization {
    pub fn expand(&self, f: &FiniteField) -> Poly {
        let mut acc: Poly = vec![self.unit];
        for (g, k) in &self.factors {
            for _ in 0..*k {
                acc = mul(f, &acc, g);
            }
        }
        trim(&mut acc);
        acc
    }
}

/// Factor a nonzero polynomial into monic irreducibles.
pub fn factor_poly(f: &FiniteField, a: &[Fe]) -> Result<Factorization> {
    let mut a = a.to_vec();
    trim(&mut a);
    let unit = *a.last().ok_or(Error::ZeroPolynomial)?;
    let a = monic(f, &a);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_fac7);
    let mut out: Vec<(Poly, usize)> = vec![];
    for (sqf, mult) in squarefree(f, &a) {
        for (g, d) in distinct_degree(f, &sqf) {
            for h in equal_degree(f, &g, d, &mut rng) {
                out.push((h, mult));
            }
        }
    }
    // merge equal factors (cannot happen from a correct squarefree split, kept for safety)
    out.sort_by(|x, y| x.0.len().cmp(&y.0.len()).then_with(|| x.0.cmp(&y.0)));
    let mut merged: Vec<(Poly, usize)> = vec![];
    for (g, k) in out {
        match merged.last_mut() {
            Some((h, m)) if *h == g => *m += k,
            _ => merged.push((g, k)),
        }
    }
    Ok(Factorization { unit, factors: merged })
}

/// Squarefree decomposition of a monic polynomial: pairs (squarefree part, multiplicity).
fn squarefree(f: &FiniteField, a: &[Fe]) -> Vec<(Poly, usize)> {
    let p = f.p() as usize;
    let mut out = vec![];
    if a.len() <= 1 {
        return out;
    }
    let d = derivative(f, a);
    if d.is_empty() {
        // a = b^p
        let b = pth_root_poly(f, a);
        for (g, k) in squarefree(f, &b) {
            out.push((g, k * p));
        }
        return out;
    }
    let mut c = gcd(f, a, &d);
    let mut w = divrem(f, a, &c).0;
    let mut i = 1;
    while w.len() > 1 {
        let y = gcd(f, &w, &c);
        let z = divrem(f, &w, &y).0;
        if z.len() > 1 {
            out.push((monic(f, &z), i));
        }
        i += 1;
        w = y;
        c = divrem(f, &c, &w).0;
    }
    if c.len() > 1 {
        let b = pth_root_poly(f, &c);
        for (g, k) in squarefree(f, &b) {
            out.push((g, k * p));
        }
    }
    out
}

fn pth_root_poly(f: &FiniteField, a: &[Fe]) -> Poly {
    let p = f.p() as usize;
    let mut out: Poly = a.iter().step_by(p).map(|&c| f.pth_root(c)).collect();
    trim(&mut out);
    out
}

/// x^(q^k) mod m via k successive q-th powers.
fn frobenius_power(f: &FiniteField, base: &[Fe], k: usize, m: &[Fe]) -> Poly {
    let mut cur = rem(f, base, m);
    for _ in 0..k {
        cur = powmod(f, &cur, f.order(), m);
    }
    cur
}

fn distinct_degree(f: &FiniteField, a: &[Fe]) -> Vec<(Poly, usize)> {
    let mut out = vec![];
    let mut rest = a.to_vec();
    let mut d = 1;
    let mut xq = rem(f, &[0, 1], &rest);
    while rest.len() > 1 && 2 * d < rest.len() {
        xq = powmod(f, &xq, f.order(), &rest);
        let g = gcd(f, &rest, &sub(f, &xq, &[0, 1]));
        if g.len() > 1 {
            rest = divrem(f, &rest, &g).0;
            xq = rem(f, &xq, &rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.len() > 1 {
        let deg = rest.len() - 1;
        out.push((monic(f, &rest), deg));
    }
    out
}

fn random_poly(f: &FiniteField, deg_below: usize, rng: &mut ChaCha8Rng) -> Poly {
    let mut v: Poly = (0..deg_below).map(|_| rng.gen_range(0..f.order())).collect();
    trim(&mut v);
    v
}

/// Split a squarefree product of irreducibles of common degree `d`.
fn equal_degree(f: &FiniteField, a: &[Fe], d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = a.len() - 1;
    if n == d {
        return vec![monic(f, a)];
    }
    loop {
        let r = random_poly(f, n, rng);
        if r.len() <= 1 {
            continue;
        }
        let h = if f.p() == 2 {
            // absolute trace map: sum of r^(2^i) over i < m·d
            let mut acc: Poly = vec![];
            let mut cur = rem(f, &r, a);
            for _ in 0..(f.m() as usize * d) {
                acc = add(f, &acc, &cur);
                cur = mulmod(f, &cur, &cur, a);
            }
            acc
        } else {
            // r^((q^d - 1)/2) = (r · r^q ··· r^(q^(d-1)))^((q-1)/2)
            let mut prod = rem(f, &[1], a);
            let mut cur = rem(f, &r, a);
            for i in 0..d {
                if i > 0 {
                    cur = powmod(f, &cur, f.order(), a);
                }
                prod = mulmod(f, &prod, &cur, a);
            }
            let e = powmod(f, &prod, (f.order() - 1) / 2, a);
            sub(f, &e, &[1])
        };
        let g = gcd(f, a, &h);
        if g.len() > 1 && g.len() < a.len() {
            let other = divrem(f, a, &g).0;
            let mut left = equal_degree(f, &g, d, rng);
            left.extend(equal_degree(f, &monic(f, &other), d, rng));
            return left;
        }
    }
}

/// Some root of `a` in the field, if one exists.
pub fn find_root(f: &FiniteField, a: &[Fe]) -> Option<Fe> {
    let mut a = a.to_vec();
    trim(&mut a);
    if a.is_empty() {
        return Some(0);
    }
    let a = monic(f, &a);
    if a.len() == 1 {
        return None;
    }
    if a[0] == 0 {
        return Some(0);
    }
    let xq = frobenius_power(f, &[0, 1], 1, &a);
    let lin = gcd(f, &a, &sub(f, &xq, &[0, 1]));
    if lin.len() <= 1 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x2007);
    let roots = equal_degree(f, &lin, 1, &mut rng);
    roots.iter().map(|r| f.neg(r[0])).min()
}
