//! Finite fields GF(p^m).
//!
//! An element is a `u64` whose base-p digits are the coefficients of its
//! residue modulo the field's defining polynomial, lowest degree first.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Fe = u64;

/// Fields up to this order get full addition and multiplication tables.
const TABLE_LIMIT: u64 = 256;
/// Fields up to this order get exp/log tables for multiplication.
const LOG_LIMIT: u64 = 1 << 20;

#[derive(Clone)]
pub struct FiniteField(Arc<Inner>);

struct Inner {
    p: u64,
    m: u32,
    q: u64,
    /// Monic modulus, coefficients low to high, length m + 1.
    modulus: Vec<u64>,
    add_tab: Vec<u16>,
    mul_tab: Vec<u16>,
    exp: Vec<u64>,
    log: Vec<u32>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }
}
impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.m)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_pow(p: u64, m: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..m {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// Smallest field of characteristic `p` containing the `e`-th roots of unity.
pub fn make_field(p: u64, e: u64) -> Result<FiniteField> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if e == 0 || e.is_multiple_of(p) {
        return Err(Error::Input(format!("exponent part {e} must be positive and prime to {p}")));
    }
    let mut m = 1u32;
    let mut pm_mod = p % e;
    loop {
        if checked_pow(p, m).is_none() {
            return Err(Error::FieldTooLarge { p, m });
        }
        if pm_mod == 1 % e {
            return FiniteField::new(p, m);
        }
        m += 1;
        pm_mod = ((pm_mod as u128 * p as u128) % e as u128) as u64;
    }
}

// Polynomials over the prime field, used to pick the modulus.
fn pp_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pp_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    pp_trim(&mut r);
    let df = f.len() - 1;
    let inv_lead = inv_mod(f[df], p);
    while r.len() > df {
        let d = r.len() - 1;
        let c = (r[d] as u128 * inv_lead as u128 % p as u128) as u64;
        let shift = d - df;
        for (i, &fc) in f.iter().enumerate() {
            let sub = (c as u128 * fc as u128 % p as u128) as u64;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        pp_trim(&mut r);
    }
    r
}

fn pp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    pp_rem(&out, f, p)
}

fn pp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    pp_trim(&mut a);
    pp_trim(&mut b);
    while !b.is_empty() {
        let r = pp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// x^(p^k) mod f by repeated p-th powering.
fn pp_frobenius_x(f: &[u64], p: u64, k: u32) -> Vec<u64> {
    let mut cur = pp_rem(&[0, 1], f, p);
    for _ in 0..k {
        // cur^p by square-and-multiply
        let mut acc = vec![1u64];
        let mut base = cur.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = pp_mulmod(&acc, &base, f, p);
            }
            base = pp_mulmod(&base, &base, f, p);
            e >>= 1;
        }
        cur = acc;
    }
    cur
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test over GF(p).
fn pp_is_irreducible(f: &[u64], p: u64) -> bool {
    let m = (f.len() - 1) as u32;
    if m == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let sub_x = |mut v: Vec<u64>| {
        if v.len() < 2 {
            v.resize(2, 0);
        }
        v[1] = (v[1] + p - 1) % p;
        pp_trim(&mut v);
        v
    };
    let full = pp_frobenius_x(f, p, m);
    if pp_rem(&full, f, p) != pp_rem(&x, f, p) {
        return false;
    }
    for r in prime_divisors(m as u64) {
        let h = sub_x(pp_frobenius_x(f, p, m / r as u32));
        if h.is_empty() {
            return false;
        }
        if pp_gcd(f, &h, p).len() != 1 {
            return false;
        }
    }
    true
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * a as u128 % p as u128) as u64;
        }
        a = (a as u128 * a as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Lowest monic irreducible of degree `m`, ordering candidates by the base-p
/// value of their lower coefficients.
fn lowest_irreducible(p: u64, m: u32) -> Vec<u64> {
    if m == 1 {
        return vec![0, 1];
    }
    let count = checked_pow(p, m).expect("caller checked the order fits");
    for code in 0..count {
        let mut f = Vec::with_capacity(m as usize + 1);
        let mut c = code;
        for _ in 0..m {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if f[0] == 0 {
            continue;
        }
        if pp_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FiniteField {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::Input("extension degree must be positive".into()));
        }
        let q = checked_pow(p, m).ok_or(Error::FieldTooLarge { p, m })?;
        let modulus = lowest_irreducible(p, m);
        let mut inner = Inner { p, m, q, modulus, add_tab: vec![], mul_tab: vec![], exp: vec![], log: vec![] };
        if m > 1 && q <= LOG_LIMIT {
            // find a primitive element and build exp/log tables
            let factors = prime_divisors(q - 1);
            let mut g = 2u64;
            loop {
                if factors.iter().all(|&r| inner_pow(&inner, g, (q - 1) / r) != 1) {
                    break;
                }
                g += 1;
            }
            let mut exp = vec![0u64; (q - 1) as usize];
            let mut log = vec![0u32; q as usize];
            let mut x = 1u64;
            for (k, slot) in exp.iter_mut().enumerate() {
                *slot = x;
                log[x as usize] = k as u32;
                x = poly_mul_raw(&inner, x, g);
            }
            inner.exp = exp;
            inner.log = log;
        }
        if q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add_tab = vec![0u16; n * n];
            let mut mul_tab = vec![0u16; n * n];
            for a in 0..q {
                for b in 0..q {
                    add_tab[(a * q + b) as usize] = digit_add(&inner, a, b) as u16;
                    mul_tab[(a * q + b) as usize] = slow_mul(&inner, a, b) as u16;
                }
            }
            inner.add_tab = add_tab;
            inner.mul_tab = mul_tab;
        }
        Ok(FiniteField(Arc::new(inner)))
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn m(&self) -> u32 {
        self.0.m
    }
    pub fn order(&self) -> u64 {
        self.0.q
    }
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    #[inline]
    pub fn zero(&self) -> Fe {
        0
    }
    #[inline]
    pub fn one(&self) -> Fe {
        1
    }

    /// Image of an integer under Z -> GF(p).
    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.0.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let i = &*self.0;
        if !i.add_tab.is_empty() {
            return i.add_tab[(a * i.q + b) as usize] as Fe;
        }
        if i.m == 1 {
            let s = a + b;
            return if s >= i.p { s - i.p } else { s };
        }
        digit_add(i, a, b)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        let i = &*self.0;
        if i.p == 2 {
            return a;
        }
        if i.m == 1 {
            return if a == 0 { 0 } else { i.p - a };
        }
        let mut out = 0u64;
        let mut pw = 1u64;
        let mut x = a;
        for _ in 0..i.m {
            let d = x % i.p;
            x /= i.p;
            out += ((i.p - d) % i.p) * pw;
            pw = pw.wrapping_mul(i.p);
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let i = &*self.0;
        if !i.mul_tab.is_empty() {
            return i.mul_tab[(a * i.q + b) as usize] as Fe;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        if i.m == 1 {
            return (a as u128 * b as u128 % i.p as u128) as u64;
        }
        if !i.exp.is_empty() {
            let n = i.q - 1;
            let k = (i.log[a as usize] as u64 + i.log[b as usize] as u64) % n;
            return i.exp[k as usize];
        }
        poly_mul_raw(i, a, b)
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        inner_pow(&self.0, a, e)
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a == 0 {
            return Err(Error::Singular);
        }
        let i = &*self.0;
        if !i.exp.is_empty() {
            let n = i.q - 1;
            let k = (n - i.log[a as usize] as u64 % n) % n;
            return Ok(i.exp[k as usize]);
        }
        Ok(self.pow(a, i.q - 2))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Unique p-th root (Frobenius is bijective on a finite field).
    pub fn pth_root(&self, a: Fe) -> Fe {
        self.pow(a, self.0.q / self.0.p)
    }

    /// Absolute trace to GF(p).
    pub fn trace(&self, a: Fe) -> Fe {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.0.m {
            acc = self.add(acc, x);
            x = self.pow(x, self.0.p);
        }
        acc
    }

    /// Base-p digits of an element (coefficients of its residue polynomial).
    pub fn digits(&self, a: Fe) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.0.m as usize);
        let mut x = a;
        for _ in 0..self.0.m {
            out.push(x % self.0.p);
            x /= self.0.p;
        }
        out
    }

    pub fn from_digits(&self, d: &[u64]) -> Fe {
        let mut out = 0u64;
        for &c in d.iter().rev() {
            out = out * self.0.p + c % self.0.p;
        }
        out
    }

    /// The element x (class of the indeterminate); a generator over GF(p) when m > 1.
    pub fn generator(&self) -> Fe {
        if self.0.m == 1 {
            // any nonzero element generates GF(p) as a GF(p)-algebra
            1
        } else {
            self.0.p
        }
    }

    /// GF(p^(2m)), the field used when a computation needs a larger field.
    pub fn doubled(&self) -> Result<FiniteField> {
        FiniteField::new(self.0.p, self.0.m * 2)
    }

    /// A field embedding self -> `big`, given as the image of the generator.
    /// Requires m | big.m.
    pub fn embedding_into(&self, big: &FiniteField) -> Result<Embedding> {
        if big.p() != self.p() || !big.m().is_multiple_of(self.m()) {
            return Err(Error::Input(format!("no embedding {self:?} -> {big:?}")));
        }
        // find a root of our modulus inside `big`
        let md: Vec<Fe> = self.0.modulus.clone();
        let root = crate::poly::find_root(big, &md).ok_or_else(|| Error::Internal("modulus has no root in extension".into()))?;
        let mut powers = Vec::with_capacity(self.m() as usize);
        let mut x = 1;
        for _ in 0..self.m() {
            powers.push(x);
            x = big.mul(x, root);
        }
        Ok(Embedding { small: self.clone(), big: big.clone(), powers })
    }
}

/// A field homomorphism GF(p^m) -> GF(p^n).
#[derive(Clone, Debug)]
pub struct Embedding {
    pub small: FiniteField,
    pub big: FiniteField,
    powers: Vec<Fe>,
}

impl Embedding {
    pub fn apply(&self, a: Fe) -> Fe {
        let d = self.small.digits(a);
        let mut acc = 0;
        for (c, &pw) in d.iter().zip(&self.powers) {
            acc = self.big.add(acc, self.big.mul(*c, pw));
        }
        acc
    }
    pub fn apply_vec(&self, v: &[Fe]) -> Vec<Fe> {
        v.iter().map(|&a| self.apply(a)).collect()
    }
}

fn digit_add(i: &Inner, a: Fe, b: Fe) -> Fe {
    if i.p == 2 {
        return a ^ b;
    }
    let (mut x, mut y) = (a, b);
    let mut out = 0u64;
    let mut pw = 1u64;
    for _ in 0..i.m {
        let d = (x % i.p + y % i.p) % i.p;
        x /= i.p;
        y /= i.p;
        out += d * pw;
        pw = pw.wrapping_mul(i.p);
    }
    out
}

fn poly_mul_raw(i: &Inner, a: Fe, b: Fe) -> Fe {
    let p = i.p;
    let m = i.m as usize;
    let da = digits_of(a, p, m);
    let db = digits_of(b, p, m);
    let mut prod = vec![0u64; 2 * m - 1];
    for (s, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (t, &y) in db.iter().enumerate() {
            prod[s + t] = ((prod[s + t] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    let r = pp_rem(&prod, &i.modulus, p);
    let mut out = 0u64;
    for &c in r.iter().rev() {
        out = out * p + c;
    }
    out
}

fn digits_of(a: Fe, p: u64, m: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(m);
    let mut x = a;
    for _ in 0..m {
        out.push(x % p);
        x /= p;
    }
    out
}

fn slow_mul(i: &Inner, a: Fe, b: Fe) -> Fe {
    if i.m == 1 {
        return (a as u128 * b as u128 % i.p as u128) as u64;
    }
    if a == 0 || b == 0 {
        return 0;
    }
    if !i.exp.is_empty() {
        let n = i.q - 1;
        let k = (i.log[a as usize] as u64 + i.log[b as usize] as u64) % n;
        return i.exp[k as usize];
    }
    poly_mul_raw(i, a, b)
}

fn inner_pow(i: &Inner, a: Fe, mut e: u64) -> Fe {
    let mut acc = 1u64;
    let mut base = a;
    while e > 0 {
        if e & 1 == 1 {
            acc = slow_mul(i, acc, base);
        }
        base = slow_mul(i, base, base);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields_have_expected_moduli() {
        assert_eq!(FiniteField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FiniteField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        // x^2 + 1 is the first irreducible quadratic over GF(3)
        assert_eq!(FiniteField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn gf4_arithmetic() {
        let f = FiniteField::new(2, 2).unwrap();
        let w = f.generator();
        // w^2 = w + 1
        assert_eq!(f.mul(w, w), f.add(w, 1));
        assert_eq!(f.pow(w, 3), 1);
    }

    #[test]
    fn rejects_composite() {
        assert_eq!(make_field(4, 3), Err(Error::NotPrime(4)));
    }

    #[test]
    fn rejects_oversized() {
        assert!(matches!(FiniteField::new(2, 65), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn large_field_without_tables() {
        let f = FiniteField::new(2, 24).unwrap();
        let a = 0x123456;
        let inv = f.inv(a).unwrap();
        assert_eq!(f.mul(a, inv), 1);
        let g = FiniteField::new(3, 25).unwrap();
        let b = 12345678901;
        assert_eq!(g.mul(b, g.inv(b).unwrap()), 1);
    }
}
