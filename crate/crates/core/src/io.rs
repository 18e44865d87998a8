//! Text encodings used by the command-line tool and the fuzz targets.
//!
//! Every parser returns [`Error::Parse`] (or a validation error) on bad input
//! and never panics.

use crate::error::{Error, Result};
use crate::forms::SymmetricForm;
use crate::lab::SuiteConfig;
use crate::linalg::{hermitize, ComplexMatrix, HermitianMatrix, ScalarFn};
use crate::majorization::MajorizationCertificate;

/// Allowed `‖M − M*‖_F / max(1, ‖M‖_F)` for input read as Hermitian.
pub const HERMITIAN_INPUT_TOLERANCE: f64 = 1e-12;

/// Comma-separated finite reals, e.g. `1,2.5,-3`.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty vector".into()));
    }
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("'{tok}' is not a number")))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("'{tok}' is not finite")));
            }
            Ok(v)
        })
        .collect()
}

/// `{"rows", "cols", "re", "im"}` row-major matrix JSON.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Matrix JSON that must be Hermitian up to rounding.
pub fn parse_hermitian(text: &str) -> Result<HermitianMatrix> {
    let m = parse_matrix(text)?;
    let h = hermitize(&m)?;
    let skew = m.sub(h.as_matrix())?.frobenius_norm();
    if skew > HERMITIAN_INPUT_TOLERANCE * m.frobenius_norm().max(1.0) {
        return Err(Error::Parse(format!(
            "matrix is not Hermitian (skew part {skew:.3e})"
        )));
    }
    Ok(h)
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(m).expect("matrices always serialize")
}

/// Form descriptor JSON, e.g. `{"kind":"KTrace","k":2}`.
pub fn parse_form(text: &str) -> Result<SymmetricForm> {
    SymmetricForm::from_json(text)
}

/// Scalar function name (`exp`, `pow:0.5`, …) or JSON descriptor.
pub fn parse_scalar_fn(text: &str) -> Result<ScalarFn> {
    ScalarFn::parse(text)
}

/// Certificate JSON with its shape validated.
pub fn parse_certificate(text: &str) -> Result<MajorizationCertificate> {
    let cert: MajorizationCertificate =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cert.check_shape()?;
    Ok(cert)
}

/// Suite configuration JSON, validated.
pub fn parse_suite_config(text: &str) -> Result<SuiteConfig> {
    let config = SuiteConfig::from_json(text)?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::certify_majorization;

    #[test]
    fn vectors() {
        assert_eq!(parse_vector("1, 2.5,-3").unwrap(), vec![1.0, 2.5, -3.0]);
        assert!(parse_vector("").is_err());
        assert!(parse_vector("1,,2").is_err());
        assert!(parse_vector("1,inf").is_err());
        assert!(parse_vector("NaN").is_err());
    }

    #[test]
    fn hermitian_input() {
        let h = parse_hermitian(r#"{"rows":2,"cols":2,"re":[1,2,2,3]}"#).unwrap();
        assert_eq!(h.trace(), 4.0);
        assert!(parse_hermitian(r#"{"rows":2,"cols":2,"re":[1,2,0,3]}"#).is_err());
        assert!(parse_hermitian(r#"{"rows":2,"cols":2,"re":[1,0,0,3],"im":[0.5,0,0,0]}"#).is_err());
        assert!(parse_matrix("[1,2]").is_err());
    }

    #[test]
    fn certificates() {
        let cert = certify_majorization(&[2.0, 2.0], &[3.0, 1.0]).unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        let back = parse_certificate(&text).unwrap();
        assert!(back.residual().unwrap() < 1e-15);
        let bad = text.replace("\"source_order\":[0,1]", "\"source_order\":[0,0]");
        assert!(parse_certificate(&bad).is_err());
        let bad = text.replace("\"j\":1", "\"j\":7");
        assert!(parse_certificate(&bad).is_err());
    }

    #[test]
    fn suite_configs() {
        assert!(parse_suite_config(r#"{"map":"classic","trials":0}"#).is_ok());
        assert!(parse_suite_config(r#"{"map":"lieb","tolerance":-1}"#).is_err());
        assert!(parse_suite_config("not json").is_err());
    }
}
