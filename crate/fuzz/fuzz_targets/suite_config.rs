#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = liebconc::io::parse_suite_config(text) {
        let _ = cfg.form_specs();
        let _ = cfg.dims();
    }
});
