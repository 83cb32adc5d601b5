#![no_main]

use std::sync::{Arc, OnceLock};

use bflab::bisets::BisetShape;
use bflab::catalog;
use bflab::groups::{twisted_diagonal_classes, PermGroup, TwistedClasses};
use libfuzzer_sys::fuzz_target;

/// Twisted-diagonal classes of the Sylow 2-subgroup of S4.
fn fixture() -> &'static (PermGroup, Arc<TwistedClasses>) {
    static CELL: OnceLock<(PermGroup, Arc<TwistedClasses>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = catalog::load("s4").unwrap().unwrap();
        let d = g.sylow_subgroup(2);
        let c = Arc::new(twisted_diagonal_classes(&g, &d));
        (g, c)
    })
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (g, classes) = fixture();
    if let Ok(s) = BisetShape::from_json(g, classes.clone(), text) {
        let again = serde_json::to_string(&s.entries(g)).unwrap();
        assert_eq!(BisetShape::from_json(g, classes.clone(), &again).unwrap(), s);
    }
});
