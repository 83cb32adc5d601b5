#![no_main]

use bflab::report::Report;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = Report::from_json(text) {
        let again = r.to_json();
        let back = Report::from_json(&again).expect("serialized report parses");
        assert_eq!(back.to_json(), again);
    }
});
