#![no_main]

use bflab::groups::PermGroup;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = PermGroup::from_json(text, 200) {
        assert!(g.order() >= 1 && g.order() <= 200);
        for x in 0..g.order() {
            assert_eq!(g.mul(x, g.inv(x)), g.mul(g.inv(x), x));
        }
    }
});
