#![no_main]

use libfuzzer_sys::fuzz_target;
use polar_dsc::experiments::{parse_region, render_region};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = parse_region(text) {
            let again = parse_region(&render_region(&rows)).expect("rendered rows parse");
            assert_eq!(rows, again);
        }
    }
});
