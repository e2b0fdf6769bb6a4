//! Truncated two-oscillator Fock space and ladder operators.
//!
//! Basis ordering is `|n1> (x) |n2>` with site 1 as the slow index: the basis
//! state `|n1, n2>` sits at index `n1 * n_max + n2`. The partial trace and
//! partial transpose in [`crate::observables`] rely on this ordering.

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix};
use crate::C64;

/// Two-oscillator Fock space hard-truncated at `n_max` levels per site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSpace {
    n_max: usize,
}

/// Site label, 1-based to match the oscillator subscripts.
pub const N_SITES: usize = 2;

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter(format!("n_max must be >= 2, got {n_max}")));
        }
        Ok(Self { n_max })
    }

    /// Levels per oscillator.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Total dimension `n_max^2`.
    pub fn dim(&self) -> usize {
        self.n_max * self.n_max
    }

    /// Index of the basis state `|n1, n2>`.
    pub fn basis_index(&self, n1: usize, n2: usize) -> usize {
        debug_assert!(n1 < self.n_max && n2 < self.n_max);
        n1 * self.n_max + n2
    }

    /// Single-site annihilation operator: `a[k-1, k] = sqrt(k)`.
    pub fn annihilation(&self) -> ComplexMatrix {
        let n = self.n_max;
        let mut a = ComplexMatrix::zeros(n, n);
        for k in 1..n {
            a.set(k - 1, k, C64::new((k as f64).sqrt(), 0.0));
        }
        a
    }

    /// Single-site creation operator.
    pub fn creation(&self) -> ComplexMatrix {
        self.annihilation().dagger()
    }

    /// Single-site number operator `diag(0, 1, ..., n_max - 1)`.
    pub fn number(&self) -> ComplexMatrix {
        let n = self.n_max;
        ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(i as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Embed a single-site operator at `site` (1 or 2) in the two-site space:
    /// site 1 -> `op (x) I`, site 2 -> `I (x) op`.
    pub fn embed(&self, op: &ComplexMatrix, site: usize) -> Result<ComplexMatrix> {
        if op.rows() != self.n_max || op.cols() != self.n_max {
            return Err(Error::DimensionMismatch(format!(
                "embed: operator {}x{} on a space with n_max {}",
                op.rows(),
                op.cols(),
                self.n_max
            )));
        }
        let id = ComplexMatrix::identity(self.n_max);
        match site {
            1 => kron(op, &id),
            2 => kron(&id, op),
            s => Err(Error::SiteOutOfRange(s)),
        }
    }

    /// Two-site annihilation operator `a_site`.
    pub fn annihilation_at(&self, site: usize) -> Result<ComplexMatrix> {
        self.embed(&self.annihilation(), site)
    }

    /// Normalized coherent state `|beta>` truncated to this space (single
    /// site, length `n_max`).
    pub fn coherent_amplitudes(&self, beta: C64) -> Vec<C64> {
        let mut amps = Vec::with_capacity(self.n_max);
        let mut term = C64::new(1.0, 0.0);
        amps.push(term);
        for n in 1..self.n_max {
            term *= beta / C64::new((n as f64).sqrt(), 0.0);
            amps.push(term);
        }
        let norm: f64 = amps.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        amps.iter().map(|v| v / norm).collect()
    }
}
