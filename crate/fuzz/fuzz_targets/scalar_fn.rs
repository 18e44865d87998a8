#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = liebconc::io::parse_scalar_fn(text) {
        let _ = f.label();
        let _ = f.props();
        for x in [0.0, 0.5, 1.0, 4.0] {
            if f.domain().contains(x) {
                let _ = f.eval(x);
            }
        }
    }
});
