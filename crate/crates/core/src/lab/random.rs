use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitize, ComplexMatrix, HermitianMatrix};
use crate::rng::gaussian_matrix;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    Ok(())
}

/// `W*W` with `W` an `n x n` complex Gaussian matrix scaled by `1/√n`.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HermitianMatrix> {
    check_dim(n)?;
    let w = gaussian_matrix(n, n, 1.0 / (n as f64).sqrt(), rng);
    hermitize(&w.adjoint().mul(&w))
}

/// [`random_psd`] plus `floor · I`.
pub fn random_posdef<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    floor: f64,
) -> Result<HermitianMatrix> {
    if !floor.is_finite() || floor < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "floor must be nonnegative, got {floor}"
        )));
    }
    random_psd(n, rng)?.add(&HermitianMatrix::identity(n).scale(floor))
}

/// `m x n` complex Gaussian matrix scaled by `1/√n`.
pub fn random_complex<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_dim(m)?;
    check_dim(n)?;
    Ok(gaussian_matrix(m, n, 1.0 / (n as f64).sqrt(), rng))
}

/// Random Hermitian matrix `(G + G*)/2` with `G` Gaussian scaled by `1/√n`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HermitianMatrix> {
    check_dim(n)?;
    hermitize(&gaussian_matrix(n, n, 1.0 / (n as f64).sqrt(), rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_hermitian;
    use crate::rng::stream_rng;

    #[test]
    fn psd_and_floor() {
        let mut rng = stream_rng(3, 0);
        for n in 1..7 {
            let a = random_psd(n, &mut rng).unwrap();
            assert!(eig_hermitian(&a).unwrap().eigenvalues[0] >= -1e-12);
            let b = random_posdef(n, &mut rng, 0.1).unwrap();
            assert!(eig_hermitian(&b).unwrap().eigenvalues[0] >= 0.1 - 1e-12);
        }
        assert!(random_psd(0, &mut rng).is_err());
        assert!(random_posdef(2, &mut rng, -1.0).is_err());
    }

    #[test]
    fn reproducible() {
        let a = random_psd(4, &mut stream_rng(11, 2)).unwrap();
        let b = random_psd(4, &mut stream_rng(11, 2)).unwrap();
        assert_eq!(a, b);
        let c = random_psd(4, &mut stream_rng(11, 3)).unwrap();
        assert_ne!(a, c);
    }
}
