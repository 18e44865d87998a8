#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cert) = liebconc::io::parse_certificate(text) {
        if cert.source.len() <= 64 && cert.transforms.len() <= 256 {
            let _ = cert.residual();
            let _ = liebconc::majorization::certificate_to_matrix(&cert).stochastic_defect();
        }
    }
});
