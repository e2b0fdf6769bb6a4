//! Deterministic classical model: quadrature equations of motion, trivial
//! fixed-point analysis, the inhomogeneous steady-state branch, and sweep
//! based attractor classification.

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::C64;

/// Quadratures of both oscillators, `alpha_j = x_j + i y_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalState {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl ClassicalState {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    pub const ORIGIN: Self = Self { x1: 0.0, y1: 0.0, x2: 0.0, y2: 0.0 };

    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self { x1: a[0], y1: a[1], x2: a[2], y2: a[3] }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn axpy(self, dt: f64, d: Self) -> Self {
        Self {
            x1: self.x1 + dt * d.x1,
            y1: self.y1 + dt * d.y1,
            x2: self.x2 + dt * d.x2,
            y2: self.y2 + dt * d.y2,
        }
    }
}

/// Time derivative of the quadratures:
/// `dx_j = omega y_j + (k1/2) x_j - k2 r_j^2 x_j + K r_j^2 y_j - eps (x_j' - x_j)`,
/// `dy_j = -omega x_j + (k1/2) y_j - k2 r_j^2 y_j - K r_j^2 x_j + eps (y_j' - y_j)`,
/// with `r_j^2 = x_j^2 + y_j^2`.
pub fn rhs(s: &ClassicalState, p: &SystemParams) -> ClassicalState {
    let site = |x: f64, y: f64, xo: f64, yo: f64| {
        let r2 = x * x + y * y;
        let dx = p.omega * y + 0.5 * p.k1 * x - p.k2 * r2 * x + p.kerr * r2 * y
            - p.epsilon * (xo - x);
        let dy = -p.omega * x + 0.5 * p.k1 * y - p.k2 * r2 * y - p.kerr * r2 * x
            + p.epsilon * (yo - y);
        (dx, dy)
    };
    let (dx1, dy1) = site(s.x1, s.y1, s.x2, s.y2);
    let (dx2, dy2) = site(s.x2, s.y2, s.x1, s.y1);
    ClassicalState { x1: dx1, y1: dy1, x2: dx2, y2: dy2 }
}

/// Euclidean norm of the derivative, the fixed-point residual.
pub fn rhs_norm(s: &ClassicalState, p: &SystemParams) -> f64 {
    let d = rhs(s, p);
    d.to_array().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Jacobian at the trivial fixed point (the origin), row-major.
pub fn trivial_jacobian(p: &SystemParams) -> [[f64; 4]; 4] {
    let h = 0.5 * p.k1;
    let (w, e) = (p.omega, p.epsilon);
    [
        [h + e, w, -e, 0.0],
        [-w, h - e, 0.0, e],
        [-e, 0.0, h + e, w],
        [0.0, e, -w, h - e],
    ]
}

/// Closed-form eigenvalues at the trivial fixed point:
/// `lambda_{1,2} = (k1 +- 2 i omega) / 2`,
/// `lambda_{3,4} = (k1 +- 2 sqrt(4 eps^2 - omega^2)) / 2`.
pub fn trivial_eigenvalues(p: &SystemParams) -> [C64; 4] {
    let disc = 4.0 * p.epsilon * p.epsilon - p.omega * p.omega;
    let root = if disc >= 0.0 {
        C64::new(disc.sqrt(), 0.0)
    } else {
        C64::new(0.0, (-disc).sqrt())
    };
    let half = |z: C64| z * 0.5;
    [
        half(C64::new(p.k1, 2.0 * p.omega)),
        half(C64::new(p.k1, -2.0 * p.omega)),
        half(C64::new(p.k1, 0.0) + root * 2.0),
        half(C64::new(p.k1, 0.0) - root * 2.0),
    ]
}

/// Pitchfork bifurcation point of the trivial state,
/// `eps_PB = sqrt(k1^2 + 4 omega^2) / 4`.
pub fn pitchfork_epsilon(p: &SystemParams) -> f64 {
    (p.k1 * p.k1 + 4.0 * p.omega * p.omega).sqrt() / 4.0
}

fn newton_polish(s: ClassicalState, p: &SystemParams, iters: usize) -> Option<ClassicalState> {
    let mut s = s;
    for _ in 0..iters {
        let f = rhs(&s, p).to_array();
        if f.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-13 {
            break;
        }
        // finite-difference Jacobian
        let h = 1e-7 * (1.0 + s.max_abs());
        let mut jac = [[0.0_f64; 4]; 4];
        for col in 0..4 {
            let mut up = s.to_array();
            let mut dn = s.to_array();
            up[col] += h;
            dn[col] -= h;
            let fu = rhs(&ClassicalState::from_array(up), p).to_array();
            let fd = rhs(&ClassicalState::from_array(dn), p).to_array();
            for row in 0..4 {
                jac[row][col] = (fu[row] - fd[row]) / (2.0 * h);
            }
        }
        let step = solve4(jac, f)?;
        let mut a = s.to_array();
        for i in 0..4 {
            a[i] -= step[i];
        }
        s = ClassicalState::from_array(a);
        if !s.is_finite() {
            return None;
        }
    }
    Some(s)
}

/// Gaussian elimination with partial pivoting for the 4x4 Newton systems.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Candidate inhomogeneous steady states `(x*, y*, -x*, -y*)`.
///
/// The slope `x*/y*` comes from the closed-form ratio; `y*` is pinned by a
/// sign-change search of the radial residual along each ray followed by a
/// Newton polish. Every returned state has residual below `1e-9`; both signs
/// of `y*` are returned when the branch exists.
pub fn ihss_branch(p: &SystemParams) -> Vec<ClassicalState> {
    let shift = p.omega + p.k1 * p.kerr / (2.0 * p.k2);
    let disc = 4.0 * p.epsilon * p.epsilon - shift * shift
        + (2.0 * p.epsilon * p.kerr / p.k2).powi(2);
    if disc < 0.0 {
        return Vec::new();
    }
    let denom = shift + 2.0 * p.epsilon * p.kerr / p.k2;
    if denom.abs() < 1e-12 {
        return Vec::new();
    }
    let mut states = Vec::new();
    for sign in [1.0, -1.0] {
        let slope = (-2.0 * p.epsilon + sign * disc.sqrt()) / denom;
        let ray = |y: f64| ClassicalState::new(slope * y, y, -slope * y, -y);
        // radial residual along the ray
        let radial = |y: f64| {
            let s = ray(y);
            let d = rhs(&s, p);
            s.x1 * d.x1 + s.y1 * d.y1
        };
        let mut y_prev = 1e-3;
        let mut f_prev = radial(y_prev);
        let mut y = y_prev;
        while y < 10.0 {
            y += 1e-2;
            let f = radial(y);
            if f_prev * f <= 0.0 {
                // bisect the bracket, then polish in the full 4-d system
                let (mut lo, mut hi) = (y_prev, y);
                let (mut flo, _) = (f_prev, f);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = radial(mid);
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                let seed = ray(0.5 * (lo + hi));
                if let Some(polished) = newton_polish(seed, p, 30) {
                    let antisym = (polished.x1 + polished.x2).abs() < 1e-8
                        && (polished.y1 + polished.y2).abs() < 1e-8;
                    if rhs_norm(&polished, p) < 1e-9
                        && antisym
                        && polished.max_abs() > 1e-6
                        && states
                            .iter()
                            .all(|s: &ClassicalState| (s.y1 - polished.y1).abs() > 1e-6)
                    {
                        states.push(polished);
                        let mirrored = ClassicalState::new(
                            -polished.x1,
                            -polished.y1,
                            -polished.x2,
                            -polished.y2,
                        );
                        states.push(mirrored);
                    }
                }
            }
            y_prev = y;
            f_prev = f;
        }
    }
    states
}

/// One fourth-order Runge-Kutta step of `ds/dt = f(s)`.
pub fn rk4_step_with(f: impl Fn(&ClassicalState) -> ClassicalState, s: &ClassicalState, dt: f64) -> ClassicalState {
    let k1 = f(s);
    let k2 = f(&s.axpy(0.5 * dt, k1));
    let k3 = f(&s.axpy(0.5 * dt, k2));
    let k4 = f(&s.axpy(dt, k3));
    ClassicalState {
        x1: s.x1 + dt / 6.0 * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1),
        y1: s.y1 + dt / 6.0 * (k1.y1 + 2.0 * k2.y1 + 2.0 * k3.y1 + k4.y1),
        x2: s.x2 + dt / 6.0 * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2),
        y2: s.y2 + dt / 6.0 * (k1.y2 + 2.0 * k2.y2 + 2.0 * k3.y2 + k4.y2),
    }
}

/// One Runge-Kutta step of the classical model.
pub fn rk4_step(s: &ClassicalState, p: &SystemParams, dt: f64) -> ClassicalState {
    rk4_step_with(|s| rhs(s, p), s, dt)
}

/// Long-time behavior of one trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Attractor {
    /// Sustained oscillation; `amplitude` is the peak-to-peak swing of `x1`
    /// and `final_state` the end of the integration (for sweep continuation).
    LimitCycle { amplitude: f64, final_state: ClassicalState },
    /// Settled fixed point with residual below `1e-6`.
    SteadyState { state: ClassicalState },
}

impl Attractor {
    pub fn amplitude(&self) -> f64 {
        match self {
            Attractor::LimitCycle { amplitude, .. } => *amplitude,
            Attractor::SteadyState { .. } => 0.0,
        }
    }

    pub fn final_state(&self) -> ClassicalState {
        match self {
            Attractor::LimitCycle { final_state, .. } => *final_state,
            Attractor::SteadyState { state } => *state,
        }
    }

    pub fn is_limit_cycle(&self) -> bool {
        matches!(self, Attractor::LimitCycle { .. })
    }
}

/// Integration windows of [`classify_attractor`].
#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub t_transient: f64,
    pub t_measure: f64,
    pub dt: f64,
}

impl ClassifyOptions {
    /// `t_transient = 200/k1`, `t_measure = 100/k1`, `dt = 0.01/k1`.
    pub fn defaults(p: &SystemParams) -> Self {
        Self { t_transient: 200.0 / p.k1, t_measure: 100.0 / p.k1, dt: 0.01 / p.k1 }
    }
}

const DIVERGENCE_GUARD: f64 = 1e6;
/// Peak-to-peak swing of `x1` above which a trajectory counts as oscillating.
pub const LC_AMPLITUDE_THRESHOLD: f64 = 1e-3;

/// Integrate from `initial`, discard the transient, and classify the
/// remainder by the peak-to-peak amplitude of `x1`.
pub fn classify_attractor(
    p: &SystemParams,
    initial: &ClassicalState,
    opts: &ClassifyOptions,
) -> Result<Attractor> {
    if !(opts.dt > 0.0) || !(opts.t_transient >= 0.0) || !(opts.t_measure > 0.0) {
        return Err(Error::InvalidParameter("integration windows must be positive".into()));
    }
    if opts.dt > 0.01 / p.k1 {
        return Err(Error::UnstableTimeStep { dt: opts.dt, suggested: 0.01 / p.k1 });
    }
    let mut s = *initial;
    let transient_steps = (opts.t_transient / opts.dt).ceil() as usize;
    let measure_steps = (opts.t_measure / opts.dt).ceil() as usize;
    for _ in 0..transient_steps {
        s = rk4_step(&s, p, opts.dt);
        if s.max_abs() > DIVERGENCE_GUARD {
            return Err(Error::Divergence(s.max_abs()));
        }
    }
    let mut lo = s.x1;
    let mut hi = s.x1;
    for _ in 0..measure_steps {
        s = rk4_step(&s, p, opts.dt);
        if s.max_abs() > DIVERGENCE_GUARD {
            return Err(Error::Divergence(s.max_abs()));
        }
        lo = lo.min(s.x1);
        hi = hi.max(s.x1);
    }
    let amplitude = hi - lo;
    if amplitude > LC_AMPLITUDE_THRESHOLD {
        return Ok(Attractor::LimitCycle { amplitude, final_state: s });
    }
    // nearly settled; pin the fixed point so the residual contract holds
    let settled = newton_polish(s, p, 50).unwrap_or(s);
    if rhs_norm(&settled, p) < 1e-6 {
        Ok(Attractor::SteadyState { state: settled })
    } else {
        Ok(Attractor::LimitCycle { amplitude, final_state: s })
    }
}

/// Which model constant a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    Epsilon,
    Kerr,
}

/// One row of a classical sweep.
#[derive(Debug)]
pub struct ClassicalSweepPoint {
    pub value: f64,
    pub result: Result<Attractor>,
}

/// Sweep one parameter over a strictly monotone list (ascending for forward
/// sweeps, descending for backward ones). With `continuation` the final state
/// of each point seeds the next, which captures hysteresis; per-point errors
/// are recorded and the sweep continues from the original initial condition.
pub fn classical_sweep(
    p_base: &SystemParams,
    param: SweepParameter,
    values: &[f64],
    initial: &ClassicalState,
    continuation: bool,
    opts: &ClassifyOptions,
) -> Result<Vec<ClassicalSweepPoint>> {
    let ascending = values.windows(2).all(|w| w[0] < w[1]);
    let descending = values.windows(2).all(|w| w[0] > w[1]);
    if !(ascending || descending) {
        return Err(Error::InvalidParameter("sweep values must be strictly monotone".into()));
    }
    let mut points = Vec::with_capacity(values.len());
    let mut seed = *initial;
    for &v in values {
        let p = match param {
            SweepParameter::Epsilon => p_base.with_epsilon(v),
            SweepParameter::Kerr => p_base.with_kerr(v),
        };
        let result = p.validate().and_then(|_| classify_attractor(&p, &seed, opts));
        if continuation {
            match &result {
                Ok(a) => seed = a.final_state(),
                Err(_) => seed = *initial,
            }
        }
        points.push(ClassicalSweepPoint { value: v, result });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn weak(eps: f64) -> SystemParams {
        SystemParams::weak_regime(eps)
    }

    fn random_state(rng: &mut StdRng) -> ClassicalState {
        ClassicalState::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )
    }

    #[test]
    fn origin_is_a_fixed_point() {
        let d = rhs(&ClassicalState::ORIGIN, &weak(1.3));
        assert_eq!(d, ClassicalState::ORIGIN);
    }

    #[test]
    fn uncoupled_limit_cycle_radius_is_stationary() {
        // r^2 = k1 / (2 k2) kills the radial derivative at eps = 0
        let p = weak(0.0);
        let r = (p.k1 / (2.0 * p.k2)).sqrt();
        let mut rng = StdRng::seed_from_u64(71);
        for _ in 0..10 {
            let t1 = rng.random_range(0.0..std::f64::consts::TAU);
            let t2 = rng.random_range(0.0..std::f64::consts::TAU);
            let s = ClassicalState::new(r * t1.cos(), r * t1.sin(), r * t2.cos(), r * t2.sin());
            let d = rhs(&s, &p);
            assert!((s.x1 * d.x1 + s.y1 * d.y1).abs() < 1e-12);
            assert!((s.x2 * d.x2 + s.y2 * d.y2).abs() < 1e-12);
        }
    }

    #[test]
    fn rhs_matches_amplitude_form_oracle() {
        // d alpha_j = -i w a_j + (k1/2) a_j - k2 |a_j|^2 a_j - i K |a_j|^2 a_j
        //             + eps (conj(a_j) - conj(a_j'))
        let mut rng = StdRng::seed_from_u64(73);
        let p = SystemParams::new(1.7, 0.9, 0.3, 0.8, 0.6).unwrap();
        for _ in 0..20 {
            let s = random_state(&mut rng);
            let a1 = C64::new(s.x1, s.y1);
            let a2 = C64::new(s.x2, s.y2);
            let amp = |a: C64, other: C64| {
                C64::new(0.0, -p.omega) * a + 0.5 * p.k1 * a
                    - (p.k2 + C64::new(0.0, p.kerr)) * a.norm_sqr() * a
                    + p.epsilon * (a.conj() - other.conj())
            };
            let d = rhs(&s, &p);
            assert!((amp(a1, a2) - C64::new(d.x1, d.y1)).norm() < 1e-12);
            assert!((amp(a2, a1) - C64::new(d.x2, d.y2)).norm() < 1e-12);
        }
    }

    #[test]
    fn rhs_symmetries() {
        let mut rng = StdRng::seed_from_u64(79);
        let p = weak(0.8);
        for _ in 0..20 {
            let s = random_state(&mut rng);
            let d = rhs(&s, &p);
            // oscillator exchange
            let swapped = ClassicalState::new(s.x2, s.y2, s.x1, s.y1);
            let ds = rhs(&swapped, &p);
            assert!((ds.x1 - d.x2).abs() < 1e-12 && (ds.y2 - d.y1).abs() < 1e-12);
            // global sign flip
            let flipped = ClassicalState::new(-s.x1, -s.y1, -s.x2, -s.y2);
            let df = rhs(&flipped, &p);
            for (a, b) in df.to_array().iter().zip(d.to_array()) {
                assert!((a + b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_difference() {
        let p = weak(0.7);
        let jac = trivial_jacobian(&p);
        let h = 1e-6;
        for col in 0..4 {
            let mut up = [0.0; 4];
            let mut dn = [0.0; 4];
            up[col] = h;
            dn[col] = -h;
            let fu = rhs(&ClassicalState::from_array(up), &p).to_array();
            let fd = rhs(&ClassicalState::from_array(dn), &p).to_array();
            for row in 0..4 {
                let fd_est = (fu[row] - fd[row]) / (2.0 * h);
                assert!((jac[row][col] - fd_est).abs() < 1e-6, "entry ({row},{col})");
            }
        }
    }

    #[test]
    fn jacobian_structure() {
        let p = weak(0.0);
        let jac = trivial_jacobian(&p);
        // eps = 0: block diagonal copies of [[k1/2, w], [-w, k1/2]]
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3), (2, 0), (2, 1), (3, 0), (3, 1)] {
            assert_eq!(jac[i][j], 0.0);
        }
        assert_eq!(jac[0][0], 0.5);
        assert_eq!(jac[0][1], 2.0);
        assert_eq!(jac[1][0], -2.0);
        // trace = 2 k1 for any eps
        let jac = trivial_jacobian(&weak(1.7));
        let trace: f64 = (0..4).map(|i| jac[i][i]).sum();
        assert!((trace - 2.0 * p.k1).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_closed_form_examples() {
        let p = weak(0.0);
        let ev = trivial_eigenvalues(&p);
        for l in ev {
            assert!((l.re - 0.5).abs() < 1e-15);
            assert!((l.im.abs() - 2.0).abs() < 1e-15);
        }
        let eps_pb = pitchfork_epsilon(&p);
        let ev = trivial_eigenvalues(&p.with_epsilon(eps_pb));
        assert!(ev[3].norm() < 1e-13, "lambda_4 at the pitchfork: {}", ev[3]);
    }

    #[test]
    fn eigenvalues_match_numerical_eigensolve() {
        use crate::linalg::ComplexMatrix;
        let mut rng = StdRng::seed_from_u64(83);
        for _ in 0..50 {
            let p = SystemParams::new(
                rng.random_range(0.1..3.0),
                rng.random_range(0.1..2.0),
                rng.random_range(0.1..2.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..2.0),
            )
            .unwrap();
            let jac = trivial_jacobian(&p);
            let m = ComplexMatrix::from_fn(4, 4, |i, j| C64::new(jac[i][j], 0.0));
            let mut numeric = m.eigenvalues_general().unwrap();
            // pair each closed-form root with its nearest numerical match
            for c in trivial_eigenvalues(&p) {
                let (idx, dist) = numeric
                    .iter()
                    .map(|n| (n - c).norm())
                    .enumerate()
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                assert!(dist < 1e-9, "{c} unmatched at {p:?}");
                numeric.swap_remove(idx);
            }
        }
    }

    #[test]
    fn pitchfork_formula() {
        assert!((pitchfork_epsilon(&weak(0.0)) - 17.0_f64.sqrt() / 4.0).abs() < 1e-15);
        let p = SystemParams::new(0.0, 2.0, 0.2, 0.0, 0.0).unwrap();
        assert!((pitchfork_epsilon(&p) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pitchfork_brackets_the_sign_change() {
        let p = weak(0.0);
        let eps_pb = pitchfork_epsilon(&p);
        let before = trivial_eigenvalues(&p.with_epsilon(eps_pb - 1e-3))[3];
        let after = trivial_eigenvalues(&p.with_epsilon(eps_pb + 1e-3))[3];
        // k1 - 2 sqrt(4 eps^2 - omega^2) decreases through zero at eps_pb
        assert!(before.re > 0.0 && after.re < 0.0, "{before} vs {after}");
    }

    #[test]
    fn ihss_branch_at_strong_coupling() {
        let p = weak(3.0);
        let states = ihss_branch(&p);
        assert!(!states.is_empty());
        for s in &states {
            assert!(rhs_norm(s, &p) < 1e-9);
            assert!((s.x2 + s.x1).abs() < 1e-8 && (s.y2 + s.y1).abs() < 1e-8);
            // the mirrored partner is in the list
            assert!(states
                .iter()
                .any(|m| (m.x1 + s.x1).abs() < 1e-8 && (m.y1 + s.y1).abs() < 1e-8));
        }
    }

    #[test]
    fn ihss_branch_absent_below_pitchfork() {
        let p = weak(0.5);
        assert!(ihss_branch(&p).is_empty());
    }

    #[test]
    fn classify_limit_cycle_and_od() {
        let p = weak(0.5);
        let opts = ClassifyOptions::defaults(&p);
        let lc_seed = ClassicalState::new(1.0, 0.0, -0.9, 0.1);
        let a = classify_attractor(&p, &lc_seed, &opts).unwrap();
        assert!(a.is_limit_cycle(), "expected oscillation at eps/k1 = 0.5");

        let p = weak(5.0);
        let a = classify_attractor(&p, &lc_seed, &opts).unwrap();
        match a {
            Attractor::SteadyState { state } => {
                let branch = ihss_branch(&p);
                let close = branch.iter().any(|b| {
                    (b.x1 - state.x1).abs() < 1e-6 && (b.y1 - state.y1).abs() < 1e-6
                });
                assert!(close, "settled point {state:?} not on the IHSS branch");
            }
            other => panic!("expected OD at eps/k1 = 5, got {other:?}"),
        }
    }

    #[test]
    fn uncoupled_amplitude_shrinks_with_damping() {
        let seed = ClassicalState::new(1.0, 0.0, 0.0, 1.0);
        let mut last = f64::INFINITY;
        for k2 in [0.2, 0.5, 1.0, 2.0] {
            let p = SystemParams::new(2.0, 1.0, k2, 1.0, 0.0).unwrap();
            let opts = ClassifyOptions::defaults(&p);
            let a = classify_attractor(&p, &seed, &opts).unwrap();
            let amp = a.amplitude();
            assert!(amp < last, "amplitude should shrink with k2");
            // peak-to-peak of x1 is twice the orbit radius
            let expected = 2.0 * (p.k1 / (2.0 * k2)).sqrt();
            assert!((amp - expected).abs() < 0.05 * expected);
            last = amp;
        }
    }

    #[test]
    fn unstable_time_step_rejected() {
        let p = weak(0.5);
        let opts = ClassifyOptions { t_transient: 1.0, t_measure: 1.0, dt: 0.5 };
        assert!(matches!(
            classify_attractor(&p, &ClassicalState::ORIGIN, &opts),
            Err(Error::UnstableTimeStep { .. })
        ));
    }

    #[test]
    fn forward_sweep_loses_the_limit_cycle_near_lp1() {
        let p = weak(0.0);
        let opts = ClassifyOptions::defaults(&p);
        let values: Vec<f64> = (0..16).map(|i| 1.4 + 0.05 * i as f64).collect();
        let seed = ClassicalState::new(1.0, 0.0, -0.9, 0.1);
        let points =
            classical_sweep(&p, SweepParameter::Epsilon, &values, &seed, true, &opts).unwrap();
        let first_od = points
            .iter()
            .find(|pt| matches!(pt.result, Ok(Attractor::SteadyState { .. })))
            .expect("sweep should terminate in OD");
        assert!(
            (first_od.value - 1.83).abs() <= 0.1 + 0.05,
            "LC lost at eps/k1 = {}",
            first_od.value
        );
    }

    #[test]
    fn backward_sweep_keeps_od_down_to_hb() {
        let p = weak(0.0);
        let opts = ClassifyOptions::defaults(&p);
        let values: Vec<f64> = (0..30).map(|i| 3.0 - 0.05 * i as f64).collect();
        let branch = ihss_branch(&p.with_epsilon(3.0));
        let seed = branch[0];
        let points =
            classical_sweep(&p, SweepParameter::Epsilon, &values, &seed, true, &opts).unwrap();
        let last_od = points
            .iter()
            .filter(|pt| matches!(pt.result, Ok(Attractor::SteadyState { .. })))
            .last()
            .expect("OD should persist for part of the backward sweep");
        assert!(
            (last_od.value - 1.63).abs() <= 0.1 + 0.05,
            "OD lost at eps/k1 = {}",
            last_od.value
        );
    }

    #[test]
    fn kerr_sweep_restores_the_limit_cycle() {
        let p = weak(3.0);
        let opts = ClassifyOptions::defaults(&p);
        let seed = ClassicalState::new(1.0, 0.0, -0.9, 0.1);
        let at_k = |k: f64| {
            classify_attractor(&p.with_kerr(k), &seed, &opts).unwrap()
        };
        assert!(!at_k(2.0).is_limit_cycle(), "expected OD at K = 2");
        assert!(at_k(6.0).is_limit_cycle(), "expected LC at K = 6");
    }

    #[test]
    fn sweep_rejects_non_monotone_values() {
        let p = weak(0.0);
        let opts = ClassifyOptions::defaults(&p);
        assert!(classical_sweep(
            &p,
            SweepParameter::Epsilon,
            &[0.1, 0.3, 0.2],
            &ClassicalState::ORIGIN,
            false,
            &opts
        )
        .is_err());
    }
}
