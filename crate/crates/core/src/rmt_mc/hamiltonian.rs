use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Fills `h` with a GOE (`beta = 1`) or GUE (`beta = 2`) draw scaled so the
/// spectrum fills the semicircle of radius 2: `⟨|H_ij|²⟩ = 1/N` off the
/// diagonal.
pub(crate) fn fill_hamiltonian<R: Rng>(h: &mut Mat<c64>, beta: u8, rng: &mut R) {
    let n = h.nrows();
    let nf = n as f64;
    match beta {
        1 => {
            let off = (1.0 / nf).sqrt();
            let diag = (2.0 / nf).sqrt();
            for j in 0..n {
                for i in j..n {
                    let a: f64 = rng.sample(StandardNormal);
                    if i == j {
                        h[(i, i)] = c64::new(diag * a, 0.0);
                    } else {
                        let z = c64::new(off * a, 0.0);
                        h[(i, j)] = z;
                        h[(j, i)] = z;
                    }
                }
            }
        }
        _ => {
            let diag = (1.0 / nf).sqrt();
            let off = (0.5 / nf).sqrt();
            for j in 0..n {
                for i in j..n {
                    let a: f64 = rng.sample(StandardNormal);
                    if i == j {
                        h[(i, i)] = c64::new(diag * a, 0.0);
                    } else {
                        let b: f64 = rng.sample(StandardNormal);
                        let z = c64::new(off * a, off * b);
                        h[(i, j)] = z;
                        h[(j, i)] = z.conj();
                    }
                }
            }
        }
    }
}

pub fn sample_hamiltonian(beta: u8, n_dim: usize, seed: u64) -> Result<Mat<c64>> {
    if n_dim < 2 {
        return Err(Error::invalid("n_dim", format!("must be at least 2, got {n_dim}")));
    }
    if beta != 1 && beta != 2 {
        return Err(Error::invalid("beta", format!("must be 1 or 2, got {beta}")));
    }
    let mut h = Mat::<c64>::zeros(n_dim, n_dim);
    fill_hamiltonian(&mut h, beta, &mut ChaCha8Rng::seed_from_u64(seed));
    Ok(h)
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues(h: &Mat<c64>) -> Result<Vec<f64>> {
    h.self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Singular(format!("eigensolver failed: {e:?}")))
}
