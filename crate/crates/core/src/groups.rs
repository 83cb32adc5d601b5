//! Permutation groups, enumerated in full, with their p-local structure.
//!
//! Group elements are indices into [`PermGroup::elements`]. Products compose
//! right to left: `(g·h)(x) = g(h(x))`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ORDER_CAP: usize = 500;

/// Bit-exact group input document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub label: String,
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("group document: {e}")))
    }
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    pub label: String,
    pub degree: usize,
    /// Generators as element indices.
    pub generators: Vec<usize>,
    /// All elements as 0-based image arrays, sorted; index 0 is the identity.
    pub elements: Vec<Vec<u32>>,
    table: Vec<u32>,
    inverse: Vec<usize>,
    order_of: Vec<usize>,
}

/// A subgroup, stored as the sorted element indices of its parent group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgroup {
    pub elems: Vec<usize>,
}

impl Subgroup {
    pub fn trivial() -> Self {
        Subgroup { elems: vec![0] }
    }
    pub fn order(&self) -> usize {
        self.elems.len()
    }
    pub fn contains(&self, g: usize) -> bool {
        self.elems.binary_search(&g).is_ok()
    }
    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elems.iter().all(|&g| other.contains(g))
    }
}

/// An injective homomorphism from a subgroup, stored pointwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Injection {
    /// Sorted domain elements.
    pub domain: Vec<usize>,
    /// `images[k]` is the image of `domain[k]`.
    pub images: Vec<usize>,
}

impl Injection {
    pub fn identity(sub: &Subgroup) -> Self {
        Injection { domain: sub.elems.clone(), images: sub.elems.clone() }
    }

    pub fn apply(&self, g: usize) -> Option<usize> {
        self.domain.binary_search(&g).ok().map(|k| self.images[k])
    }

    pub fn domain_group(&self) -> Subgroup {
        Subgroup { elems: self.domain.clone() }
    }

    pub fn image_group(&self) -> Subgroup {
        let mut e = self.images.clone();
        e.sort_unstable();
        Subgroup { elems: e }
    }

    pub fn inverse(&self) -> Injection {
        let mut pairs: Vec<(usize, usize)> = self.images.iter().copied().zip(self.domain.iter().copied()).collect();
        pairs.sort_unstable();
        Injection { domain: pairs.iter().map(|x| x.0).collect(), images: pairs.iter().map(|x| x.1).collect() }
    }

    /// `outer ∘ self`; None if the image of self is not inside outer's domain.
    pub fn then(&self, outer: &Injection) -> Option<Injection> {
        let images: Option<Vec<usize>> = self.images.iter().map(|&y| outer.apply(y)).collect();
        Some(Injection { domain: self.domain.clone(), images: images? })
    }

    pub fn restrict(&self, sub: &Subgroup) -> Option<Injection> {
        let images: Option<Vec<usize>> = sub.elems.iter().map(|&g| self.apply(g)).collect();
        Some(Injection { domain: sub.elems.clone(), images: images? })
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.images
    }

    /// Twisted diagonal pairs (φ(p), p), sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self.images.iter().copied().zip(self.domain.iter().copied()).collect();
        v.sort_unstable();
        v
    }
}

/// Δ(φ, P) = {(φ(p), p)} inside D×D.
pub type TwistedDiagonal = Injection;

impl PermGroup {
    pub fn from_group_file(doc: &GroupFile, cap: usize) -> Result<Self> {
        let mut gens = Vec::with_capacity(doc.generators.len());
        for g in &doc.generators {
            if g.len() != doc.degree {
                return Err(Error::InvalidPermutation(format!("generator {g:?} has length {}, expected {}", g.len(), doc.degree)));
            }
            let mut seen = vec![false; doc.degree];
            let mut img = Vec::with_capacity(doc.degree);
            for &x in g {
                if x == 0 || x > doc.degree || seen[x - 1] {
                    return Err(Error::InvalidPermutation(format!("{g:?} is not a permutation of 1..{}", doc.degree)));
                }
                seen[x - 1] = true;
                img.push((x - 1) as u32);
            }
            gens.push(img);
        }
        Self::from_generators(&doc.label, doc.degree, &gens, cap)
    }

    pub fn from_json(text: &str, cap: usize) -> Result<Self> {
        Self::from_group_file(&GroupFile::parse(text)?, cap)
    }

    /// Enumerate the group generated by 0-based image arrays.
    pub fn from_generators(label: &str, degree: usize, gens: &[Vec<u32>], cap: usize) -> Result<Self> {
        let id: Vec<u32> = (0..degree as u32).collect();
        let compose = |g: &[u32], h: &[u32]| -> Vec<u32> { h.iter().map(|&x| g[x as usize]).collect() };
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(id.clone());
        queue.push_back(id.clone());
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = compose(g, &x);
                if seen.insert(y.clone()) {
                    if seen.len() > cap {
                        return Err(Error::OrderCapExceeded { cap });
                    }
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Vec<u32>> = seen.into_iter().collect();
        elements.sort();
        let index: HashMap<Vec<u32>, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let n = elements.len();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = index[&compose(&elements[a], &elements[b])] as u32;
            }
        }
        let mut inverse = vec![0usize; n];
        for a in 0..n {
            for b in 0..n {
                if table[a * n + b] == 0 {
                    inverse[a] = b;
                    break;
                }
            }
        }
        let mut order_of = vec![1usize; n];
        for a in 0..n {
            let mut x = a;
            let mut k = 1;
            while x != 0 {
                x = table[x * n + a] as usize;
                k += 1;
            }
            order_of[a] = k;
        }
        let generators = gens.iter().map(|g| index[g]).collect();
        Ok(PermGroup { label: label.to_string(), degree, generators, elements, table, inverse, order_of })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.order_of[a]
    }

    /// g·x·g⁻¹
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { elems: (0..self.order()).collect() }
    }

    /// Cycle notation, 1-based, for reports.
    pub fn cycle_string(&self, a: usize) -> String {
        let perm = &self.elements[a];
        let mut seen = vec![false; perm.len()];
        let mut out = String::new();
        for s in 0..perm.len() {
            if seen[s] || perm[s] as usize == s {
                continue;
            }
            out.push('(');
            let mut x = s;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&(x + 1).to_string());
                x = perm[x] as usize;
            }
            out.push(')');
        }
        if out.is_empty() {
            "()".into()
        } else {
            out
        }
    }

    /// Exponent of the group.
    pub fn exponent(&self) -> u64 {
        let mut e: u64 = 1;
        for &k in &self.order_of {
            e = lcm(e, k as u64);
        }
        e
    }

    /// Subgroup generated by a set of elements.
    pub fn closure(&self, gens: &[usize]) -> Subgroup {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut elems = vec![0usize];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        Subgroup { elems }
    }

    pub fn check_subgroup(&self, elems: &[usize]) -> Result<Subgroup> {
        let mut e = elems.to_vec();
        e.sort_unstable();
        e.dedup();
        let sub = Subgroup { elems: e };
        if !sub.contains(0) || sub.elems.iter().any(|&g| g >= self.order()) {
            return Err(Error::NotSubgroup("missing identity or out of range".into()));
        }
        for &a in &sub.elems {
            for &b in &sub.elems {
                if !sub.contains(self.mul(a, b)) {
                    return Err(Error::NotSubgroup("not closed under products".into()));
                }
            }
        }
        Ok(sub)
    }

    pub fn conjugate_subgroup(&self, g: usize, h: &Subgroup) -> Subgroup {
        let mut e: Vec<usize> = h.elems.iter().map(|&x| self.conj(g, x)).collect();
        e.sort_unstable();
        Subgroup { elems: e }
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = vec![];
        for x in 0..n {
            if seen[x] {
                continue;
            }
            let mut cls: BTreeSet<usize> = BTreeSet::new();
            for g in 0..n {
                cls.insert(self.conj(g, x));
            }
            for &y in &cls {
                seen[y] = true;
            }
            out.push(cls.into_iter().collect());
        }
        out
    }

    pub fn centralizer(&self, p: &Subgroup) -> Subgroup {
        let elems = (0..self.order()).filter(|&g| p.elems.iter().all(|&x| self.mul(g, x) == self.mul(x, g))).collect();
        Subgroup { elems }
    }

    pub fn normalizer(&self, p: &Subgroup) -> Subgroup {
        let elems = (0..self.order()).filter(|&g| p.elems.iter().all(|&x| p.contains(self.conj(g, x)))).collect();
        Subgroup { elems }
    }

    /// Centralizer inside a given subgroup.
    pub fn centralizer_in(&self, within: &Subgroup, p: &Subgroup) -> Subgroup {
        let elems = within.elems.iter().copied().filter(|&g| p.elems.iter().all(|&x| self.mul(g, x) == self.mul(x, g))).collect();
        Subgroup { elems }
    }

    /// Every p-subgroup contained in `within` (a subgroup of self).
    pub fn p_subgroups_in(&self, within: &Subgroup, p: u64) -> Vec<Subgroup> {
        let mut found: HashSet<Subgroup> = HashSet::new();
        let mut queue = VecDeque::new();
        found.insert(Subgroup::trivial());
        queue.push_back(Subgroup::trivial());
        while let Some(h) = queue.pop_front() {
            for &g in &within.elems {
                if h.contains(g) {
                    continue;
                }
                // g normalizes h and g^p ∈ h
                if !h.elems.iter().all(|&x| h.contains(self.conj(g, x))) {
                    continue;
                }
                let mut gp = 0;
                for _ in 0..p {
                    gp = self.mul(gp, g);
                }
                if !h.contains(gp) {
                    continue;
                }
                let mut gens = h.elems.clone();
                gens.push(g);
                let k = self.closure(&gens);
                if found.insert(k.clone()) {
                    queue.push_back(k);
                }
            }
        }
        let mut out: Vec<Subgroup> = found.into_iter().collect();
        sort_subgroups(&mut out);
        out
    }

    pub fn p_subgroups(&self, p: u64) -> Vec<Subgroup> {
        self.p_subgroups_in(&self.whole(), p)
    }

    /// Canonical representative of the G-conjugacy class of `h`.
    pub fn conjugacy_key(&self, h: &Subgroup) -> Subgroup {
        (0..self.order()).map(|g| self.conjugate_subgroup(g, h)).min().expect("nonempty group")
    }

    /// One representative per G-conjugacy class of p-subgroups, ordered by
    /// decreasing order and then by element list.
    pub fn p_subgroups_up_to_conjugacy(&self, p: u64) -> Vec<Subgroup> {
        let mut keys: BTreeSet<Subgroup> = BTreeSet::new();
        for h in self.p_subgroups(p) {
            keys.insert(self.conjugacy_key(&h));
        }
        let mut out: Vec<Subgroup> = keys.into_iter().collect();
        sort_subgroups(&mut out);
        out
    }

    pub fn sylow_subgroup(&self, p: u64) -> Subgroup {
        // the first class in decreasing-order sort has maximal order
        self.p_subgroups_up_to_conjugacy(p).into_iter().next().expect("trivial subgroup always present")
    }

    /// A small generating set of `h` (greedy).
    pub fn generating_set(&self, h: &Subgroup) -> Vec<usize> {
        let mut gens = vec![];
        let mut cur = Subgroup::trivial();
        // prefer elements of large order to keep the set short
        let mut cands = h.elems.clone();
        cands.sort_by_key(|&g| (std::cmp::Reverse(self.element_order(g)), g));
        for g in cands {
            if !cur.contains(g) {
                gens.push(g);
                let mut all = cur.elems.clone();
                all.push(g);
                cur = self.closure(&all);
            }
            if cur.order() == h.order() {
                break;
            }
        }
        gens
    }

    /// All injective homomorphisms `p -> d` between subgroups of self.
    pub fn injective_maps(&self, p: &Subgroup, d: &Subgroup) -> Vec<Injection> {
        if p.order() > d.order() {
            return vec![];
        }
        let gens = self.generating_set(p);
        let mut out = vec![];
        let cands: Vec<Vec<usize>> =
            gens.iter().map(|&g| d.elems.iter().copied().filter(|&y| self.element_order(y) == self.element_order(g)).collect()).collect();
        let mut choice = vec![0usize; gens.len()];
        if cands.iter().any(|c| c.is_empty()) {
            return out;
        }
        loop {
            let imgs: Vec<usize> = choice.iter().enumerate().map(|(k, &c)| cands[k][c]).collect();
            if let Some(map) = self.extend_hom(p, &gens, &imgs) {
                out.push(map);
            }
            // odometer
            let mut k = 0;
            loop {
                if k == gens.len() {
                    out.sort();
                    return out;
                }
                choice[k] += 1;
                if choice[k] < cands[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    /// Extend generator images to an injective homomorphism, if possible.
    pub fn extend_hom(&self, p: &Subgroup, gens: &[usize], imgs: &[usize]) -> Option<Injection> {
        let mut map: HashMap<usize, usize> = HashMap::new();
        map.insert(0, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let fx = map[&x];
            for (&g, &y) in gens.iter().zip(imgs) {
                let xg = self.mul(x, g);
                let fxg = self.mul(fx, y);
                match map.get(&xg) {
                    Some(&v) if v != fxg => return None,
                    Some(_) => {}
                    None => {
                        map.insert(xg, fxg);
                        queue.push_back(xg);
                    }
                }
            }
        }
        if map.len() != p.order() {
            return None;
        }
        let images: Vec<usize> = p.elems.iter().map(|g| map[g]).collect();
        let distinct: HashSet<usize> = images.iter().copied().collect();
        if distinct.len() != images.len() {
            return None;
        }
        Some(Injection { domain: p.elems.clone(), images })
    }

    /// Conjugation map c_g restricted to `p`.
    pub fn conjugation_map(&self, g: usize, p: &Subgroup) -> Injection {
        Injection { domain: p.elems.clone(), images: p.elems.iter().map(|&x| self.conj(g, x)).collect() }
    }

    /// Conjugate a twisted diagonal by (a, b) ∈ D×D.
    pub fn conj_twisted(&self, a: usize, b: usize, t: &TwistedDiagonal) -> TwistedDiagonal {
        let mut pairs: Vec<(usize, usize)> = t.domain.iter().zip(&t.images).map(|(&x, &y)| (self.conj(b, x), self.conj(a, y))).collect();
        pairs.sort_unstable();
        Injection { domain: pairs.iter().map(|x| x.0).collect(), images: pairs.iter().map(|x| x.1).collect() }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Largest power of p dividing n.
pub fn p_part(n: u64, p: u64) -> u64 {
    let mut r = 1;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
        r *= p;
    }
    r
}

fn sort_subgroups(v: &mut [Subgroup]) {
    v.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.elems.cmp(&b.elems)));
}

/// D×D-conjugacy classes of twisted diagonal subgroups of D×D, with marks.
#[derive(Clone, Debug)]
pub struct TwistedClasses {
    /// The p-group D as a subgroup of the ambient group.
    pub d: Subgroup,
    /// Canonical representatives, sorted by decreasing |P| then canonical form.
    pub reps: Vec<TwistedDiagonal>,
    /// marks[t][r] = |(D×D/R)^T| for representatives T = reps[t], R = reps[r].
    pub marks: Vec<Vec<u64>>,
    lookup: HashMap<TwistedDiagonal, usize>,
    /// All subgroups of D, sorted by decreasing order.
    pub subgroups: Vec<Subgroup>,
}

impl TwistedClasses {
    pub fn class_of(&self, t: &TwistedDiagonal) -> usize {
        *self.lookup.get(t).expect("twisted diagonal of D×D")
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// All members (not just representatives) of a class.
    pub fn members(&self, class: usize) -> Vec<TwistedDiagonal> {
        let mut v: Vec<TwistedDiagonal> = self.lookup.iter().filter(|(_, &c)| c == class).map(|(t, _)| t.clone()).collect();
        v.sort();
        v
    }

    /// Class of the opposite subgroup Δ(φ⁻¹, φP).
    pub fn opposite_class(&self, class: usize) -> usize {
        self.class_of(&self.reps[class].inverse())
    }

    pub fn order_of_class(&self, class: usize) -> usize {
        self.reps[class].domain.len()
    }

    /// Human-readable canonical descriptor.
    pub fn descriptor(&self, g: &PermGroup, class: usize) -> String {
        let t = &self.reps[class];
        let parts: Vec<String> = t
            .domain
            .iter()
            .zip(&t.images)
            .filter(|(&x, _)| x != 0)
            .map(|(&x, &y)| format!("{}->{}", g.cycle_string(x), g.cycle_string(y)))
            .collect();
        format!("Delta[{}]{{{}}}", t.domain.len(), parts.join(", "))
    }
}

/// Build the twisted diagonal classes of D×D.
pub fn twisted_diagonal_classes(g: &PermGroup, d: &Subgroup) -> TwistedClasses {
    let p_guess = d.order();
    let mut subgroups: Vec<Subgroup> = if p_guess == 1 {
        vec![Subgroup::trivial()]
    } else {
        let p = smallest_prime_factor(p_guess as u64);
        g.p_subgroups_in(d, p)
    };
    sort_subgroups(&mut subgroups);
    let mut lookup: HashMap<TwistedDiagonal, usize> = HashMap::new();
    let mut reps: Vec<TwistedDiagonal> = vec![];
    for p in &subgroups {
        for phi in g.injective_maps(p, d) {
            if lookup.contains_key(&phi) {
                continue;
            }
            let idx = reps.len();
            let mut members = vec![];
            for &a in &d.elems {
                for &b in &d.elems {
                    let c = g.conj_twisted(a, b, &phi);
                    if !lookup.contains_key(&c) {
                        lookup.insert(c.clone(), idx);
                        members.push(c);
                    }
                }
            }
            reps.push(members.into_iter().min_by(|x, y| x.pairs().cmp(&y.pairs())).unwrap());
        }
    }
    // canonical order: decreasing |P|, then canonical pair list
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by(|&a, &b| reps[b].domain.len().cmp(&reps[a].domain.len()).then_with(|| reps[a].pairs().cmp(&reps[b].pairs())));
    let mut remap = vec![0usize; reps.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let reps: Vec<TwistedDiagonal> = order.iter().map(|&i| reps[i].clone()).collect();
    for v in lookup.values_mut() {
        *v = remap[*v];
    }
    let n = reps.len();
    let mut marks = vec![vec![0u64; n]; n];
    let dd = d.order() as u64;
    for (ti, t) in reps.iter().enumerate() {
        for (ri, r) in reps.iter().enumerate() {
            if t.domain.len() > r.domain.len() {
                continue;
            }
            let rset: HashSet<(usize, usize)> = r.pairs().into_iter().collect();
            let mut count = 0u64;
            for &a in &d.elems {
                for &b in &d.elems {
                    // x⁻¹ T x ⊆ R with x = (a, b)
                    let (ai, bi) = (g.inv(a), g.inv(b));
                    if t.domain.iter().zip(&t.images).all(|(&x, &y)| rset.contains(&(g.conj(ai, y), g.conj(bi, x)))) {
                        count += 1;
                    }
                }
            }
            let _ = dd;
            marks[ti][ri] = count / r.domain.len() as u64;
        }
    }
    TwistedClasses { d: d.clone(), reps, marks, lookup, subgroups }
}

pub fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> PermGroup {
        PermGroup::from_generators("S3", 3, &[vec![1, 2, 0], vec![1, 0, 2]], 500).unwrap()
    }

    #[test]
    fn s3_basics() {
        let g = s3();
        assert_eq!(g.order(), 6);
        let mut sizes: Vec<usize> = g.conjugacy_classes().iter().map(|c| c.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(g.exponent(), 6);
    }

    #[test]
    fn trivial_group() {
        let g = PermGroup::from_generators("1", 1, &[], 500).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn cap_enforced() {
        let err = PermGroup::from_generators("S3", 3, &[vec![1, 2, 0], vec![1, 0, 2]], 5).unwrap_err();
        assert_eq!(err, Error::OrderCapExceeded { cap: 5 });
    }

    #[test]
    fn json_rejects_bad_permutation() {
        let e = PermGroup::from_json(r#"{"label":"x","degree":3,"generators":[[1,1,2]]}"#, 500);
        assert!(matches!(e, Err(Error::InvalidPermutation(_))));
    }
}
