//! Scalar and distribution diagnostics of two-site density matrices:
//! expectations, Fock distributions, partial trace/transpose, negativity, and
//! the second-order Renyi entropy.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::liouvillian::DensityMatrix;
use crate::C64;

/// Single-site occupation probabilities `p_n`, `n = 0..n_max`.
#[derive(Clone, Debug)]
pub struct FockDistribution {
    pub probabilities: Vec<f64>,
}

impl FockDistribution {
    pub fn validate(&self) -> Result<()> {
        if self.probabilities.iter().any(|&p| p < -1e-10) {
            return Err(Error::InvalidParameter("negative Fock probability".into()));
        }
        let sum: f64 = self.probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter(format!("Fock distribution sums to {sum}")));
        }
        Ok(())
    }

    pub fn argmax(&self) -> usize {
        self.probabilities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

fn check_site(site: usize) -> Result<()> {
    if site == 1 || site == 2 {
        Ok(())
    } else {
        Err(Error::SiteOutOfRange(site))
    }
}

/// `<a_site^dag a_site>`.
pub fn mean_phonon(rho: &DensityMatrix, site: usize) -> Result<f64> {
    check_site(site)?;
    let space = rho.space();
    let a = space.annihilation_at(site)?;
    let n = a.dagger().matmul(&a)?;
    let val = rho.expectation(&n)?;
    debug_assert!(val.im.abs() < 1e-10, "imaginary phonon number {}", val.im);
    Ok(val.re)
}

/// Reduce to the kept site by tracing out the other.
pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<ComplexMatrix> {
    check_site(keep)?;
    let space = rho.space();
    let n = space.n_max();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                let (r, c) = if keep == 1 {
                    (space.basis_index(i, k), space.basis_index(j, k))
                } else {
                    (space.basis_index(k, i), space.basis_index(k, j))
                };
                acc += m.get(r, c);
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Diagonal of the reduced state in the Fock basis.
pub fn fock_distribution(rho: &DensityMatrix, site: usize) -> Result<FockDistribution> {
    let reduced = partial_trace(rho, site)?;
    let probabilities = (0..reduced.rows()).map(|n| reduced.get(n, n).re).collect();
    Ok(FockDistribution { probabilities })
}

/// Transpose the indices of one site:
/// for site 1, `out[(m1,n2),(m1',n2')] = rho[(m1',n2),(m1,n2')]`.
pub fn partial_transpose(rho: &DensityMatrix, site: usize) -> Result<ComplexMatrix> {
    check_site(site)?;
    let space = rho.space();
    let n = space.n_max();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(space.dim(), space.dim());
    for m1 in 0..n {
        for n2 in 0..n {
            for m1p in 0..n {
                for n2p in 0..n {
                    let src = if site == 1 {
                        m.get(space.basis_index(m1p, n2), space.basis_index(m1, n2p))
                    } else {
                        m.get(space.basis_index(m1, n2p), space.basis_index(m1p, n2))
                    };
                    out.set(space.basis_index(m1, n2), space.basis_index(m1p, n2p), src);
                }
            }
        }
    }
    Ok(out)
}

/// Entanglement negativity `(||rho^Gamma_1||_1 - 1) / 2`; zero for separable
/// states.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose(rho, 1)?;
    Ok((pt.trace_norm_hermitian()? - 1.0) / 2.0)
}

/// Second-order Renyi entropy `-ln Tr(rho^2)` of a (reduced) density matrix;
/// natural logarithm.
pub fn renyi2(rho_reduced: &ComplexMatrix) -> Result<f64> {
    let purity = rho_reduced.matmul(rho_reduced)?.trace().re;
    if purity <= 0.0 {
        return Err(Error::InvalidParameter(format!("purity {purity} <= 0")));
    }
    Ok(-purity.ln())
}
