//! The bundled group catalog.

use crate::error::Result;
use crate::groups::{PermGroup, DEFAULT_ORDER_CAP};

pub const ENTRIES: &[(&str, &str)] = &[
    ("c2", include_str!("../../../catalog/c2.json")),
    ("c3", include_str!("../../../catalog/c3.json")),
    ("c4", include_str!("../../../catalog/c4.json")),
    ("v4", include_str!("../../../catalog/v4.json")),
    ("s3", include_str!("../../../catalog/s3.json")),
    ("d8", include_str!("../../../catalog/d8.json")),
    ("q8", include_str!("../../../catalog/q8.json")),
    ("a4", include_str!("../../../catalog/a4.json")),
    ("sl2_3", include_str!("../../../catalog/sl2_3.json")),
    ("s4", include_str!("../../../catalog/s4.json")),
];

pub fn load(name: &str) -> Option<Result<PermGroup>> {
    ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, text)| PermGroup::from_json(text, DEFAULT_ORDER_CAP))
}

/// Primes dividing the group order, ascending.
pub fn dividing_primes(g: &PermGroup) -> Vec<u64> {
    let mut n = g.order() as u64;
    let mut out = vec![];
    let mut d = 2;
    while n > 1 {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_orders() {
        let orders: Vec<usize> = ENTRIES.iter().map(|(n, _)| load(n).unwrap().unwrap().order()).collect();
        assert_eq!(orders, vec![2, 3, 4, 4, 6, 8, 8, 12, 24, 24]);
    }
}
