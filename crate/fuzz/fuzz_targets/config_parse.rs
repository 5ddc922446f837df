#![no_main]

use aqrm_cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut cfg = RunConfig::default();
    if cfg.apply_text(text).is_ok() {
        // a resolved echo must re-parse to the identical configuration
        let echo = cfg.echo();
        let mut back = RunConfig::default();
        back.apply_text(&echo).expect("echo must re-parse");
        assert_eq!(back, cfg);
    }
});
