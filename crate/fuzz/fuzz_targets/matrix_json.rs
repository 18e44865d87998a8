#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = liebconc::io::parse_matrix(text) {
        let back = liebconc::io::parse_matrix(&liebconc::io::matrix_to_json(&m)).expect("round trip");
        assert_eq!(back, m);
    }
    if let Ok(h) = liebconc::io::parse_hermitian(text) {
        if h.dim() <= 16 {
            let _ = liebconc::linalg::eig_hermitian(&h);
        }
    }
});
