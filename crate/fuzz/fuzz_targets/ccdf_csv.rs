#![no_main]

use libfuzzer_sys::fuzz_target;
use polar_dsc::experiments::{parse_ccdf, render_ccdf};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = parse_ccdf(text) {
            let again = parse_ccdf(&render_ccdf(&rows)).expect("rendered rows parse");
            assert_eq!(rows, again);
        }
    }
});
