#![no_main]

use libfuzzer_sys::fuzz_target;
use polar_dsc::polar::parse_reliability;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(order) = parse_reliability(text) {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            assert!(sorted.iter().enumerate().all(|(i, &v)| i == v));
        }
    }
});
