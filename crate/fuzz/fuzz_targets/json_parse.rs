#![no_main]

use aqrm_core::serial::parse_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(value) = parse_json(text) {
        // anything accepted must survive an emit/parse round trip
        let emitted = value.emit();
        let again = parse_json(&emitted).expect("emitted JSON must re-parse");
        assert_eq!(again, value);
    }
});
