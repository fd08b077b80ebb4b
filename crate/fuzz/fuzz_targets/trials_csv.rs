#![no_main]

use libfuzzer_sys::fuzz_target;
use polar_dsc::experiments::{parse_trials, render_trials};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = parse_trials(text) {
            let again = parse_trials(&render_trials(&rows)).expect("rendered rows parse");
            assert_eq!(rows, again);
        }
    }
});
