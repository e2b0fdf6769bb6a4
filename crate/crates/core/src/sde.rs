//! Noisy classical model: drift and diffusion of the Fokker-Planck reduction,
//! Euler-Maruyama integration of the associated stochastic differential
//! equation, and ensemble amplitude statistics.
//!
//! The model is only valid in the weak quantum regime (`k1 > k2`); in the
//! deep regime the diffusion matrix turns negative near the origin and
//! [`diffusion`] reports a hard error.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::classical::{rk4_step_with, ClassicalState};
use crate::error::{Error, Result};
use crate::params::SystemParams;

const DIVERGENCE_GUARD: f64 = 1e6;

/// Discretization and ensemble controls of the stochastic integration.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct SdeConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    /// Leading fraction of each trajectory excluded from time averages.
    pub transient_fraction: f64,
    pub base_seed: u64,
}

impl SdeConfig {
    /// `dt = 1e-3/k1`, 200 trajectories of duration `500/k1`, half transient.
    pub fn defaults(p: &SystemParams) -> Self {
        Self {
            dt: 1e-3 / p.k1,
            n_steps: 500_000,
            n_trajectories: 200,
            transient_fraction: 0.5,
            base_seed: 0,
        }
    }

    pub fn validate(&self, p: &SystemParams) -> Result<()> {
        if !(self.dt > 0.0) || self.dt * p.k1 > 1e-2 {
            return Err(Error::UnstableTimeStep { dt: self.dt, suggested: 1e-3 / p.k1 });
        }
        if self.n_steps == 0 || self.n_trajectories == 0 {
            return Err(Error::InvalidParameter(
                "n_steps and n_trajectories must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.transient_fraction) {
            return Err(Error::InvalidParameter(format!(
                "transient_fraction must lie in [0, 1), got {}",
                self.transient_fraction
            )));
        }
        Ok(())
    }

    fn transient_steps(&self) -> usize {
        (self.transient_fraction * self.n_steps as f64).floor() as usize
    }
}

/// Drift vector of the noisy model: the classical derivative with every
/// `r_j^2` replaced by `r_j^2 - 1`.
pub fn drift(s: &ClassicalState, p: &SystemParams) -> ClassicalState {
    let site = |x: f64, y: f64, xo: f64, yo: f64| {
        let r2m1 = x * x + y * y - 1.0;
        let dx = (p.omega + p.kerr * r2m1) * y + (0.5 * p.k1 - p.k2 * r2m1 + p.epsilon) * x
            - p.epsilon * xo;
        let dy = (-p.omega - p.kerr * r2m1) * x + (0.5 * p.k1 - p.k2 * r2m1 - p.epsilon) * y
            + p.epsilon * yo;
        (dx, dy)
    };
    let (dx1, dy1) = site(s.x1, s.y1, s.x2, s.y2);
    let (dx2, dy2) = site(s.x2, s.y2, s.x1, s.y1);
    ClassicalState { x1: dx1, y1: dy1, x2: dx2, y2: dy2 }
}

/// Diagonal noise amplitudes `sigma = sqrt(D)`:
/// `nu_j = k1/2 + k2 (2 r_j^2 - 1)`, entries `sqrt(nu_j / 2)` repeated per
/// quadrature. Negative `nu_j` means the Fokker-Planck reduction does not
/// apply at this state and is a hard error.
pub fn diffusion(s: &ClassicalState, p: &SystemParams) -> Result<[f64; 4]> {
    let nu = |x: f64, y: f64| 0.5 * p.k1 + p.k2 * (2.0 * (x * x + y * y) - 1.0);
    let nu1 = nu(s.x1, s.y1);
    let nu2 = nu(s.x2, s.y2);
    if nu1 < 0.0 {
        return Err(Error::NegativeDiffusion { site: 1, nu: nu1 });
    }
    if nu2 < 0.0 {
        return Err(Error::NegativeDiffusion { site: 2, nu: nu2 });
    }
    let s1 = (0.5 * nu1).sqrt();
    let s2 = (0.5 * nu2).sqrt();
    Ok([s1, s1, s2, s2])
}

/// One stochastic path sampled at every step, including the initial state.
#[derive(Clone, Debug)]
pub struct SdeTrajectory {
    pub states: Vec<ClassicalState>,
    pub dt: f64,
}

impl SdeTrajectory {
    /// Time average of `|alpha_1|^2 = x1^2 + y1^2` after dropping the first
    /// `transient_steps` samples, by compensated summation.
    pub fn mean_amp_sq(&self, transient_steps: usize) -> f64 {
        let tail = &self.states[transient_steps.min(self.states.len() - 1)..];
        let mut sum = KahanSum::new();
        for s in tail {
            sum.add(s.x1 * s.x1 + s.y1 * s.y1);
        }
        sum.value() / tail.len() as f64
    }
}

fn stream_rng(base_seed: u64, trajectory_index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
    rng.set_stream(trajectory_index);
    rng
}

fn euler_maruyama(
    p: &SystemParams,
    cfg: &SdeConfig,
    initial: &ClassicalState,
    trajectory_index: u64,
    zero_noise: bool,
    mut on_sample: impl FnMut(usize, &ClassicalState),
) -> Result<()> {
    let mut rng = stream_rng(cfg.base_seed, trajectory_index);
    let sqrt_dt = cfg.dt.sqrt();
    let mut s = *initial;
    on_sample(0, &s);
    for step in 1..=cfg.n_steps {
        let mu = drift(&s, p);
        let mut a = s.to_array();
        let d = mu.to_array();
        if zero_noise {
            for i in 0..4 {
                a[i] += d[i] * cfg.dt;
            }
        } else {
            let sigma = diffusion(&s, p)?;
            for i in 0..4 {
                let xi: f64 = StandardNormal.sample(&mut rng);
                a[i] += d[i] * cfg.dt + sigma[i] * sqrt_dt * xi;
            }
        }
        s = ClassicalState::from_array(a);
        if !s.is_finite() || s.max_abs() > DIVERGENCE_GUARD {
            return Err(Error::Divergence(s.max_abs()));
        }
        on_sample(step, &s);
    }
    Ok(())
}

/// Integrate one Euler-Maruyama path. The generator is derived from
/// `(cfg.base_seed, trajectory_index)`, so identical inputs give bitwise
/// identical trajectories.
pub fn simulate(
    p: &SystemParams,
    cfg: &SdeConfig,
    initial: &ClassicalState,
    trajectory_index: u64,
) -> Result<SdeTrajectory> {
    cfg.validate(p)?;
    let mut states = Vec::with_capacity(cfg.n_steps + 1);
    euler_maruyama(p, cfg, initial, trajectory_index, false, |_, s| states.push(*s))?;
    Ok(SdeTrajectory { states, dt: cfg.dt })
}

/// Test hook: the same discretization with the noise amplitude forced to
/// zero, leaving plain Euler integration of the drift.
pub fn simulate_zero_noise(
    p: &SystemParams,
    cfg: &SdeConfig,
    initial: &ClassicalState,
) -> Result<SdeTrajectory> {
    cfg.validate(p)?;
    let mut states = Vec::with_capacity(cfg.n_steps + 1);
    euler_maruyama(p, cfg, initial, 0, true, |_, s| states.push(*s))?;
    Ok(SdeTrajectory { states, dt: cfg.dt })
}

/// Zero-noise integration of the drift with a fourth-order Runge-Kutta
/// stepper, for deterministic cross-checks free of the Euler radius bias.
pub fn integrate_drift_rk4(
    p: &SystemParams,
    initial: &ClassicalState,
    dt: f64,
    n_steps: usize,
) -> Result<ClassicalState> {
    if !(dt > 0.0) || dt * p.k1 > 1e-2 {
        return Err(Error::UnstableTimeStep { dt, suggested: 1e-3 / p.k1 });
    }
    let mut s = *initial;
    for _ in 0..n_steps {
        s = rk4_step_with(|s| drift(s, p), &s, dt);
        if !s.is_finite() || s.max_abs() > DIVERGENCE_GUARD {
            return Err(Error::Divergence(s.max_abs()));
        }
    }
    Ok(s)
}

/// Ensemble mean of `|alpha_1|^2` and its standard error.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleAmplitude {
    pub mean_amp_sq: f64,
    pub std_err: f64,
}

/// Average `|alpha_1|^2` over trajectories and post-transient time.
/// Trajectories run in parallel; the reduction uses compensated summation so
/// the result does not depend on scheduling order.
pub fn ensemble_amplitude(
    p: &SystemParams,
    cfg: &SdeConfig,
    initial: &ClassicalState,
) -> Result<EnsembleAmplitude> {
    cfg.validate(p)?;
    let transient = cfg.transient_steps();
    let per_trajectory: Result<Vec<f64>> = (0..cfg.n_trajectories as u64)
        .into_par_iter()
        .map(|idx| {
            let mut sum = KahanSum::new();
            let mut count = 0usize;
            euler_maruyama(p, cfg, initial, idx, false, |step, s| {
                if step >= transient {
                    sum.add(s.x1 * s.x1 + s.y1 * s.y1);
                    count += 1;
                }
            })?;
            Ok(sum.value() / count as f64)
        })
        .collect();
    let per_trajectory = per_trajectory?;
    let n = per_trajectory.len() as f64;
    let mut total = KahanSum::new();
    for v in &per_trajectory {
        total.add(*v);
    }
    let mean = total.value() / n;
    let mut var = KahanSum::new();
    for v in &per_trajectory {
        var.add((v - mean) * (v - mean));
    }
    let std_err = if per_trajectory.len() > 1 {
        (var.value() / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    Ok(EnsembleAmplitude { mean_amp_sq: mean, std_err })
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
