#![no_main]

use aqrm_core::serial::{emit_csv, parse_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_csv(text) {
        let emitted = emit_csv(&rows);
        let again = parse_csv(&emitted).expect("emitted CSV must re-parse");
        assert_eq!(again, rows);
    }
});
