//! Lindblad generator of the coupled quantum Stuart-Landau oscillators:
//! Hamiltonian and dissipator assembly, vectorized superoperator, steady-state
//! solve, and fixed-step time evolution.
//!
//! The master equation is
//! `rho_dot = -i[(H0 + Hc), rho] + k1 sum_j D[a_j^dag](rho) + k2 sum_j D[a_j^2](rho)`
//! with `D[L](rho) = L rho L^dag - 1/2 {L^dag L, rho}`. There is no
//! single-phonon-loss dissipator.
//!
//! Vectorization is column-stacking: `vec(rho)` stacks the columns of `rho`,
//! so `vec(A rho B) = (B^T (x) A) vec(rho)` and
//! `L = -i (I (x) H - H^T (x) I)
//!     + sum_c [ conj(c) (x) c - 1/2 (I (x) c^dag c + (c^dag c)^T (x) I) ]`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::linalg::{kron, ComplexMatrix};
use crate::params::SystemParams;
use crate::C64;

/// Above this Hilbert-space dimension the steady-state solve goes through the
/// sparse LU path.
const DENSE_SOLVE_MAX_DIM: usize = 32;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Two-site density matrix with its Fock space.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    space: FockSpace,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian and unit trace within 1e-8, minimum
    /// eigenvalue >= -1e-8.
    pub fn new(matrix: ComplexMatrix, space: FockSpace) -> Result<Self> {
        let rho = Self::new_unchecked(matrix, space)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Dimension-checked constructor without the physicality checks; used for
    /// intermediate states inside integrators.
    pub fn new_unchecked(matrix: ComplexMatrix, space: FockSpace) -> Result<Self> {
        if matrix.rows() != space.dim() || matrix.cols() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix {}x{} on space of dim {}",
                matrix.rows(),
                matrix.cols(),
                space.dim()
            )));
        }
        Ok(Self { matrix: matrix.to_dense(), space })
    }

    pub fn validate(&self) -> Result<()> {
        let asym = self.matrix.asymmetry();
        if asym > 1e-8 {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        let tr = self.matrix.trace();
        if (tr - c(1.0, 0.0)).norm() > 1e-8 {
            return Err(Error::InvalidParameter(format!("density matrix trace {tr} != 1")));
        }
        let hermitized = self.hermitized();
        let vals = hermitized.matrix.hermitian_eigenvalues()?;
        let min = vals.first().copied().unwrap_or(0.0);
        if min < -1e-8 {
            return Err(Error::InvalidParameter(format!(
                "density matrix min eigenvalue {min:.3e} < -1e-8"
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    /// `(rho + rho^dag) / 2`, trace renormalized.
    pub fn hermitized(&self) -> Self {
        let h = self.matrix.add(&self.matrix.dagger()).unwrap().scale(c(0.5, 0.0));
        let tr = h.trace();
        let m = h.scale(c(1.0, 0.0) / tr);
        Self { matrix: m, space: self.space }
    }

    /// `Tr(rho op)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        Ok(self.matrix.matmul(op)?.trace())
    }

    /// Pure state from a normalized amplitude vector.
    pub fn from_pure(space: FockSpace, amps: &[C64]) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "pure state of length {} on space of dim {}",
                amps.len(),
                space.dim()
            )));
        }
        let norm: f64 = amps.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let matrix = ComplexMatrix::from_fn(space.dim(), space.dim(), |i, j| {
            amps[i] * amps[j].conj() / norm.powi(2)
        });
        Self::new_unchecked(matrix, space)
    }

    /// `|n1, n2><n1, n2|`.
    pub fn fock_state(space: FockSpace, n1: usize, n2: usize) -> Result<Self> {
        let mut amps = vec![c(0.0, 0.0); space.dim()];
        amps[space.basis_index(n1, n2)] = c(1.0, 0.0);
        Self::from_pure(space, &amps)
    }

    /// Product of truncated coherent states `|b1> (x) |b2>`.
    pub fn coherent_product(space: FockSpace, beta1: C64, beta2: C64) -> Result<Self> {
        let a1 = space.coherent_amplitudes(beta1);
        let a2 = space.coherent_amplitudes(beta2);
        let n = space.n_max();
        let mut amps = vec![c(0.0, 0.0); space.dim()];
        for n1 in 0..n {
            for n2 in 0..n {
                amps[space.basis_index(n1, n2)] = a1[n1] * a2[n2];
            }
        }
        Self::from_pure(space, &amps)
    }

    /// Maximally mixed state on the truncated space.
    pub fn maximally_mixed(space: FockSpace) -> Self {
        let d = space.dim();
        let matrix = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c(1.0 / d as f64, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        Self { matrix, space }
    }

    /// Trace distance `1/2 ||rho - sigma||_1`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        let diff = self.matrix.sub(&other.matrix)?;
        Ok(0.5 * diff.trace_norm_hermitian()?)
    }
}

/// Column-stacking vectorization.
pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    let (r, cl) = (m.rows(), m.cols());
    let mut v = vec![c(0.0, 0.0); r * cl];
    for j in 0..cl {
        for i in 0..r {
            v[j * r + i] = m.get(i, j);
        }
    }
    v
}

/// Inverse of [`vectorize`] for a square matrix of dimension `dim`.
pub fn unvectorize(v: &[C64], dim: usize) -> ComplexMatrix {
    assert_eq!(v.len(), dim * dim);
    ComplexMatrix::from_fn(dim, dim, |i, j| v[j * dim + i])
}

/// `H = H0 + Hc` on the two-site space.
///
/// `H0 = omega (n1 + n2) + K/2 (ad1^2 a1^2 + ad2^2 a2^2)`,
/// `Hc = -i eps (ad1 ad2 - a1 a2) + i eps/2 (ad1^2 + ad2^2 - a1^2 - a2^2)`.
pub fn build_hamiltonian(p: &SystemParams, space: FockSpace) -> Result<ComplexMatrix> {
    p.validate()?;
    let a1 = space.annihilation_at(1)?;
    let a2 = space.annihilation_at(2)?;
    let ad1 = a1.dagger();
    let ad2 = a2.dagger();

    let n1 = ad1.matmul(&a1)?;
    let n2 = ad2.matmul(&a2)?;
    let mut h = n1.add(&n2)?.scale(c(p.omega, 0.0));

    // Kerr: K/2 (ad^2 a^2) per site
    let a1sq = a1.matmul(&a1)?;
    let a2sq = a2.matmul(&a2)?;
    let kerr1 = a1sq.dagger().matmul(&a1sq)?;
    let kerr2 = a2sq.dagger().matmul(&a2sq)?;
    h = h.add(&kerr1.add(&kerr2)?.scale(c(p.kerr / 2.0, 0.0)))?;

    // -i eps (ad1 ad2 - a1 a2)
    let squeeze = ad1.matmul(&ad2)?.sub(&a1.matmul(&a2)?)?;
    h = h.add(&squeeze.scale(c(0.0, -p.epsilon)))?;

    // i eps/2 (ad1^2 + ad2^2 - a1^2 - a2^2)
    let single = a1sq.dagger().add(&a2sq.dagger())?.sub(&a1sq.add(&a2sq)?)?;
    h = h.add(&single.scale(c(0.0, p.epsilon / 2.0)))?;

    let asym = h.asymmetry();
    if asym > 1e-10 {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    Ok(h)
}

/// The four collapse operators `sqrt(k1) a_j^dag`, `sqrt(k2) a_j^2`.
pub fn collapse_operators(p: &SystemParams, space: FockSpace) -> Result<Vec<ComplexMatrix>> {
    let mut ops = Vec::with_capacity(4);
    for site in [1, 2] {
        let a = space.annihilation_at(site)?;
        ops.push(a.dagger().scale(c(p.k1.sqrt(), 0.0)));
        ops.push(a.matmul(&a)?.scale(c(p.k2.sqrt(), 0.0)));
    }
    Ok(ops)
}

/// Direct dense evaluation of the master-equation right side,
/// `-i[H, rho] + sum_c (c rho c^dag - 1/2 {c^dag c, rho})`.
///
/// This path never touches the vectorized superoperator; it doubles as an
/// independent cross-check of the assembly in [`build_liouvillian`].
pub fn master_rhs_direct(
    h: &ComplexMatrix,
    collapse: &[ComplexMatrix],
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let comm = h.matmul(rho)?.sub(&rho.matmul(h)?)?;
    let mut out = comm.scale(c(0.0, -1.0));
    for op in collapse {
        let opd = op.dagger();
        let gain = op.matmul(rho)?.matmul(&opd)?;
        let n = opd.matmul(op)?;
        let anti = n.matmul(rho)?.add(&rho.matmul(&n)?)?.scale(c(0.5, 0.0));
        out = out.add(&gain.sub(&anti)?)?;
    }
    Ok(out)
}

/// Vectorized Lindblad generator on `vec(rho)`.
#[derive(Clone, Debug)]
pub struct Superoperator {
    matrix: ComplexMatrix,
    space: FockSpace,
}

impl Superoperator {
    /// Wrap an already-assembled generator matrix of dims `(dim^2, dim^2)`.
    pub fn from_matrix(matrix: ComplexMatrix, space: FockSpace) -> Result<Self> {
        let d2 = space.dim() * space.dim();
        if matrix.rows() != d2 || matrix.cols() != d2 {
            return Err(Error::DimensionMismatch(format!(
                "superoperator {}x{} on space of dim {}",
                matrix.rows(),
                matrix.cols(),
                space.dim()
            )));
        }
        Ok(Self { matrix, space })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    /// Hilbert-space dimension (the superoperator acts on vectors of length
    /// `dim^2`).
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `unvec(L vec(rho))`: the time derivative of `rho`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.apply_matrix(rho.matrix())
    }

    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let dim = self.dim();
        if rho.rows() != dim || rho.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "apply: rho {}x{} on superoperator of Hilbert dim {dim}",
                rho.rows(),
                rho.cols()
            )));
        }
        let v = vectorize(rho);
        let lv = self.matrix.mul_vec(&v)?;
        Ok(unvectorize(&lv, dim))
    }

    /// `||L vec(rho)||_2`.
    pub fn residual(&self, rho: &DensityMatrix) -> Result<f64> {
        let dot = self.apply(rho)?;
        Ok(dot.fro_norm())
    }

    /// Max |entry| of `vec(I)^dag L`, which must vanish for a
    /// trace-preserving generator.
    pub fn trace_preservation_defect(&self) -> f64 {
        let dim = self.dim();
        let mut row = vec![c(0.0, 0.0); dim * dim];
        for (i, j, v) in self.matrix.triplets() {
            // vec(I) has ones at indices k*(dim+1)
            if i % (dim + 1) == 0 {
                row[j] += v;
            }
        }
        row.into_iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Smallest two singular values of `L` (dense; small spaces only).
    /// The gap `s_1 > 0` above the single null direction certifies steady-state
    /// uniqueness.
    pub fn singular_value_gap(&self) -> Result<(f64, f64)> {
        let d2 = self.dim() * self.dim();
        if d2 > 4096 {
            return Err(Error::InvalidParameter(format!(
                "singular_value_gap: dense SVD refused for superoperator dim {d2}"
            )));
        }
        let svals = self
            .matrix
            .to_dense()
            .singular_values_all()
            .map_err(|_| Error::EigFailed)?;
        // nonincreasing order from faer
        let s0 = svals[d2 - 1];
        let s1 = svals[d2 - 2];
        Ok((s0, s1))
    }
}

/// Assemble the Liouvillian of the master equation as a sparse superoperator.
pub fn build_liouvillian(p: &SystemParams, space: FockSpace) -> Result<Superoperator> {
    let dim = space.dim();
    let h = build_hamiltonian(p, space)?.to_sparse();
    let id = ComplexMatrix::sparse_identity(dim);

    // -i (I (x) H - H^T (x) I)
    let mut l = kron(&id, &h)?
        .sub(&kron(&h.transpose(), &id)?)?
        .scale(c(0.0, -1.0));

    for op in collapse_operators(p, space)? {
        let op = op.to_sparse();
        let opd = op.dagger();
        let n = opd.matmul(&op)?.to_sparse();
        // conj(c) (x) c
        l = l.add(&kron(&op.conj(), &op)?)?;
        // -1/2 (I (x) c^dag c + (c^dag c)^T (x) I)
        let anti = kron(&id, &n)?.add(&kron(&n.transpose(), &id)?)?.scale(c(-0.5, 0.0));
        l = l.add(&anti)?;
    }
    Ok(Superoperator { matrix: l, space })
}

/// Factor the steady-state solve through the exact symmetries of the
/// generator: total-phonon-number parity (a weak symmetry whose trivial
/// sector carries the unique steady state) and site exchange. Components
/// across parity sectors vanish and exchange-related components coincide,
/// which shrinks the linear system roughly fourfold and keeps the sparse
/// factorization tractable at large truncations. Entries violating either
/// symmetry abort the reduction so the caller can fall back.
fn solve_steady_reduced(l: &Superoperator) -> Result<Vec<C64>> {
    let dim = l.dim();
    let d2 = dim * dim;
    let n = l.space().n_max();

    let parity: Vec<i8> =
        (0..dim).map(|i| if (i / n + i % n) % 2 == 0 { 1 } else { -1 }).collect();
    let swap_h: Vec<usize> = (0..dim).map(|i| (i % n) * n + i / n).collect();
    let in_sector = |k: usize| parity[k % dim] == parity[k / dim];
    let swap_v = |k: usize| swap_h[k / dim] * dim + swap_h[k % dim];

    let mut red = vec![usize::MAX; d2];
    let mut n_red = 0;
    for k in 0..d2 {
        if in_sector(k) && swap_v(k) >= k {
            red[k] = n_red;
            n_red += 1;
        }
    }
    for k in 0..d2 {
        if in_sector(k) && red[k] == usize::MAX {
            red[k] = red[swap_v(k)];
        }
    }

    let mut entries: HashMap<(usize, usize), C64> = HashMap::new();
    for (i, j, v) in l.matrix.triplets() {
        *entries.entry((i, j)).or_insert(c(0.0, 0.0)) += v;
    }
    let scale = l.matrix.max_abs().max(1.0);
    let asymmetric = |what: &str| {
        Error::InvalidParameter(format!("steady-state reduction: generator is not {what}"))
    };
    for (&(i, j), &v) in &entries {
        if v.norm() <= 1e-12 * scale {
            continue;
        }
        if in_sector(i) != in_sector(j) {
            return Err(asymmetric("parity-sector preserving"));
        }
        let mirrored = entries.get(&(swap_v(i), swap_v(j))).copied().unwrap_or(c(0.0, 0.0));
        if (mirrored - v).norm() > 1e-9 * scale {
            return Err(asymmetric("site-exchange symmetric"));
        }
    }

    // trace-row replacement at the reduced image of the (0,0) component;
    // duplicate reduced triplets accumulate, which sums each exchange orbit
    let mut triplets: Vec<(usize, usize, C64)> = Vec::with_capacity(entries.len() / 2);
    for (&(i, j), &v) in &entries {
        if i == 0 || !in_sector(i) || !in_sector(j) || swap_v(i) < i {
            continue;
        }
        triplets.push((red[i], red[j], v));
    }
    for k in 0..dim {
        triplets.push((red[0], red[k * (dim + 1)], c(1.0, 0.0)));
    }
    let system = ComplexMatrix::from_triplets(n_red, n_red, triplets);
    let mut b = vec![c(0.0, 0.0); n_red];
    b[red[0]] = c(1.0, 0.0);
    let y = system.solve_sparse(&b)?;

    let mut x = vec![c(0.0, 0.0); d2];
    for k in 0..d2 {
        if in_sector(k) {
            x[k] = y[red[k]];
        }
    }
    Ok(x)
}

/// Solve `L vec(rho) = 0, Tr rho = 1` by replacing the first row of `L` with
/// the trace row. Large spaces go through the symmetry-reduced factorization
/// of [`solve_steady_reduced`] when the generator admits it.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    let dim = l.dim();
    let d2 = dim * dim;

    let full_system = || {
        let mut triplets: Vec<(usize, usize, C64)> =
            l.matrix.triplets().into_iter().filter(|&(i, _, _)| i != 0).collect();
        for k in 0..dim {
            triplets.push((0, k * (dim + 1), c(1.0, 0.0)));
        }
        let mut b = vec![c(0.0, 0.0); d2];
        b[0] = c(1.0, 0.0);
        (ComplexMatrix::from_triplets(d2, d2, triplets), b)
    };

    let x = if dim <= DENSE_SOLVE_MAX_DIM {
        let (system, b) = full_system();
        system.to_dense().solve(&b)?
    } else {
        match solve_steady_reduced(l) {
            Ok(x) => x,
            Err(_) => {
                let (system, b) = full_system();
                system.solve_sparse(&b)?
            }
        }
    };

    let rho = DensityMatrix::new_unchecked(unvectorize(&x, dim), l.space())?.hermitized();
    let res = l.residual(&rho)?;
    if res > 1e-7 {
        return Err(Error::DegenerateSteadyState(format!(
            "steady-state residual ||L rho|| = {res:.3e} exceeds 1e-7"
        )));
    }
    Ok(rho)
}

/// Result of a fixed-step evolution run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Sampled `(t, rho)` pairs; the last entry is the state at `t_final`.
    pub states: Vec<(f64, DensityMatrix)>,
    /// Max |Tr rho - 1| observed over the run.
    pub trace_drift: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        &self.states.last().expect("trajectory is never empty").1
    }
}

/// Classical fourth-order fixed-step integration of `vec(rho_dot) = L vec(rho)`.
///
/// `dt` must satisfy the stability bound `dt <= 0.5 / ||L||_inf`. Up to
/// ~100 intermediate states are retained, plus the terminal state.
pub fn evolve(
    rho0: &DensityMatrix,
    l: &Superoperator,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    if dt <= 0.0 || t_final < 0.0 {
        return Err(Error::InvalidParameter(format!("evolve: t_final {t_final}, dt {dt}")));
    }
    let linf = l.matrix.inf_norm();
    if linf > 0.0 && dt > 0.5 / linf {
        return Err(Error::UnstableTimeStep { dt, suggested: 0.5 / linf });
    }
    let dim = l.dim();
    let n_steps = (t_final / dt).ceil() as usize;
    let stride = (n_steps / 100).max(1);

    let mut v = vectorize(rho0.matrix());
    let mut states = vec![(0.0, rho0.clone())];
    let mut trace_drift: f64 = 0.0;

    let lv = |v: &[C64]| l.matrix.mul_vec(v).expect("dims fixed");
    for step in 0..n_steps {
        let h = dt.min(t_final - step as f64 * dt);
        let k1 = lv(&v);
        let y2: Vec<C64> = v.iter().zip(&k1).map(|(a, b)| a + b * c(h / 2.0, 0.0)).collect();
        let k2 = lv(&y2);
        let y3: Vec<C64> = v.iter().zip(&k2).map(|(a, b)| a + b * c(h / 2.0, 0.0)).collect();
        let k3 = lv(&y3);
        let y4: Vec<C64> = v.iter().zip(&k3).map(|(a, b)| a + b * c(h, 0.0)).collect();
        let k4 = lv(&y4);
        for i in 0..v.len() {
            v[i] += (k1[i] + (k2[i] + k3[i]) * c(2.0, 0.0) + k4[i]) * c(h / 6.0, 0.0);
        }
        let tr: C64 = (0..dim).map(|i| v[i * (dim + 1)]).sum();
        trace_drift = trace_drift.max((tr - c(1.0, 0.0)).norm());

        let t = (step + 1) as f64 * dt;
        if (step + 1) % stride == 0 || step + 1 == n_steps {
            let rho = DensityMatrix::new_unchecked(unvectorize(&v, dim), l.space())?;
            states.push((t.min(t_final), rho));
        }
    }
    Ok(Trajectory { states, trace_drift })
}
