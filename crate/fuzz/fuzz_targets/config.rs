#![no_main]

use libfuzzer_sys::fuzz_target;
use polar_dsc::experiments::{ConfigFile, ExperimentConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = ConfigFile::parse(text);
        let _ = ExperimentConfig::from_toml_str(text);
    }
});
