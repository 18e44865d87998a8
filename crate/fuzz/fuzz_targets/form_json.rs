#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(form) = liebconc::io::parse_form(text) {
        let _ = form.eval_vector(&[0.5, 1.0, 2.0, 3.0]);
        if let Ok(back) = form.to_json() {
            assert_eq!(liebconc::io::parse_form(&back).expect("round trip"), form);
        }
    }
});
