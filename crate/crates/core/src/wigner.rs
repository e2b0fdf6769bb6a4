//! Wigner function evaluation on a rectangular phase-space grid, plus the
//! lobe-distance diagnostic and the ring/bimodal classifier.
//!
//! Convention: `alpha = x + i y`, `integral W dx dy = 1`, vacuum peak `2/pi`.
//! The field is evaluated from a single-site reduced density matrix through
//! the closed-form Fock-basis kernel
//! `W(alpha) = (2/pi) Tr[rho D(2 alpha) P]`,
//! whose matrix elements are generalized Laguerre polynomials.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::liouvillian::{build_liouvillian, steady_state};
use crate::observables::partial_trace;
use crate::params::SystemParams;
use crate::fock::FockSpace;
use crate::C64;

/// Rectangular sampling grid in the `alpha = x + i y` phase plane.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub n_x: usize,
    pub n_y: usize,
}

impl PhaseGrid {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, n_x: usize, n_y: usize) -> Result<Self> {
        if !(x_min < x_max && y_min < y_max) {
            return Err(Error::InvalidParameter(format!(
                "phase grid bounds must be monotone, got x [{x_min}, {x_max}] y [{y_min}, {y_max}]"
            )));
        }
        if n_x < 16 || n_y < 16 {
            return Err(Error::InvalidParameter(format!(
                "phase grid needs at least 16 points per axis, got {n_x}x{n_y}"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max, n_x, n_y })
    }

    /// Default weak-regime grid: `[-5, 5]^2`, 201x201.
    pub fn weak_default() -> Self {
        Self { x_min: -5.0, x_max: 5.0, y_min: -5.0, y_max: 5.0, n_x: 201, n_y: 201 }
    }

    /// Default deep-regime grid: `[-3, 3]^2`, 151x151.
    pub fn deep_default() -> Self {
        Self { x_min: -3.0, x_max: 3.0, y_min: -3.0, y_max: 3.0, n_x: 151, n_y: 151 }
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.n_y - 1) as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + ix as f64 * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y_min + iy as f64 * self.dy()
    }
}

/// Real-valued Wigner samples on a [`PhaseGrid`], stored row-major, y outer.
#[derive(Clone, Debug)]
pub struct WignerField {
    pub grid: PhaseGrid,
    values: Vec<f64>,
    /// Set when the boundary carries more than `1e-4` of the peak value,
    /// indicating the grid clips the state.
    pub boundary_warning: bool,
}

impl WignerField {
    pub fn from_values(grid: PhaseGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_x * grid.n_y {
            return Err(Error::DimensionMismatch(format!(
                "field has {} samples for a {}x{} grid",
                values.len(),
                grid.n_y,
                grid.n_x
            )));
        }
        let mut field = Self { grid, values, boundary_warning: false };
        field.boundary_warning = field.boundary_mass_exceeds(1e-4);
        Ok(field)
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.n_x + ix]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Riemann-sum normalization `sum W dx dy`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx() * self.grid.dy()
    }

    fn boundary_mass_exceeds(&self, rel: f64) -> bool {
        let peak = self.max().abs();
        if peak == 0.0 {
            return false;
        }
        let (nx, ny) = (self.grid.n_x, self.grid.n_y);
        let mut edge_max = 0.0_f64;
        for ix in 0..nx {
            edge_max = edge_max.max(self.value(ix, 0).abs()).max(self.value(ix, ny - 1).abs());
        }
        for iy in 0..ny {
            edge_max = edge_max.max(self.value(0, iy).abs()).max(self.value(nx - 1, iy).abs());
        }
        edge_max >= rel * peak
    }
}

/// How the field's maxima are arranged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LobeClass {
    /// Rotationally distributed maxima: a quantum limit cycle.
    OscillatoryRing,
    /// Two mirror-symmetric lobes: quantum oscillation death.
    BimodalQod,
    Unimodal,
}

impl LobeClass {
    pub fn label(&self) -> &'static str {
        match self {
            LobeClass::OscillatoryRing => "oscillatory-ring",
            LobeClass::BimodalQod => "bimodal-QOD",
            LobeClass::Unimodal => "unimodal",
        }
    }
}

/// Classified maxima of one Wigner field.
#[derive(Clone, Debug)]
pub struct LobeReport {
    pub classification: LobeClass,
    /// `|y_+ - y_-|` between the two lobes; zero unless bimodal.
    pub delta_y: f64,
    /// Euclidean distance between the two lobes; zero unless bimodal.
    pub euclidean_distance: f64,
    /// Retained local maxima as `(x, y, W)`.
    pub maxima: Vec<(f64, f64, f64)>,
}

/// One entry of a [`lobe_sweep`].
#[derive(Debug)]
pub struct SweepPoint {
    pub eps_over_k1: f64,
    pub report: Result<LobeReport>,
}

/// Outcome of a coupling sweep: per-point reports plus the first coupling
/// value (in units of `k1`) classified as bimodal, if any.
#[derive(Debug)]
pub struct LobeSweep {
    pub points: Vec<SweepPoint>,
    pub transition_eps_over_k1: Option<f64>,
}

/// Evaluate the Wigner function of a single-site density matrix at one phase
/// point.
pub fn wigner_point(rho_reduced: &ComplexMatrix, x: f64, y: f64) -> f64 {
    let n = rho_reduced.rows();
    let beta = C64::new(2.0 * x, 2.0 * y);
    let s = beta.norm_sqr();
    let pref = (-0.5 * s).exp();
    let mut acc = 0.0;
    for k in 0..n {
        // coeff = sqrt(m! / (m + k)!), started at m = 0
        let mut coeff = (1..=k).map(|j| 1.0 / j as f64).product::<f64>().sqrt();
        let bpow = beta.powi(k as i32);
        // generalized Laguerre L_m^{(k)}(s) by upward recurrence in m
        let mut l_prev = 0.0_f64;
        let mut l = 1.0_f64;
        for m in 0..(n - k) {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let scalar = sign * coeff * pref * l;
            if k == 0 {
                acc += rho_reduced.get(m, m).re * scalar;
            } else {
                acc += 2.0 * (rho_reduced.get(m, m + k) * bpow).re * scalar;
            }
            coeff *= ((m + 1) as f64 / (m + 1 + k) as f64).sqrt();
            let l_next =
                (((2 * m + 1 + k) as f64 - s) * l - (m + k) as f64 * l_prev) / (m + 1) as f64;
            l_prev = l;
            l = l_next;
        }
    }
    (2.0 / PI) * acc
}

/// Sample the Wigner function of a single-site density matrix over `grid`.
/// The input must be a valid reduced state (Hermitian, unit trace).
pub fn wigner(rho_reduced: &ComplexMatrix, grid: &PhaseGrid) -> Result<WignerField> {
    if rho_reduced.rows() != rho_reduced.cols() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix is {}x{}",
            rho_reduced.rows(),
            rho_reduced.cols()
        )));
    }
    rho_reduced.require_hermitian()?;
    let tr = rho_reduced.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::InvalidParameter(format!("reduced state has trace {tr}")));
    }
    let rows: Vec<Vec<f64>> = (0..grid.n_y)
        .into_par_iter()
        .map(|iy| {
            let y = grid.y(iy);
            (0..grid.n_x).map(|ix| wigner_point(rho_reduced, grid.x(ix), y)).collect()
        })
        .collect();
    WignerField::from_values(*grid, rows.concat())
}

/// Locate and classify the local maxima of a normalized field.
///
/// Maxima are interior grid points dominating their 8 neighbors with value
/// above half the global maximum. Two maxima related by `y -> -y` or
/// `(x, y) -> (-x, -y)` symmetry give a bimodal report; maxima of a common
/// radius spread over more than 90 degrees give a ring; anything else is
/// unimodal.
/// A two-maxima field counts as bimodal only if the circle through the
/// maxima dips below this fraction of the peak somewhere; shallower
/// modulation is a decorated ring.
const RING_DIP_FRACTION: f64 = 0.7;

/// Minimum of the field along the circle of the given radius, sampled at one
/// degree resolution on the nearest grid points. Samples outside the grid are
/// skipped.
fn azimuthal_min(field: &WignerField, radius: f64) -> f64 {
    let g = &field.grid;
    let mut min = f64::INFINITY;
    for k in 0..360 {
        let theta = f64::from(k) * PI / 180.0;
        let (x, y) = (radius * theta.cos(), radius * theta.sin());
        let ix = ((x - g.x_min) / g.dx()).round();
        let iy = ((y - g.y_min) / g.dy()).round();
        if ix < 0.0 || iy < 0.0 || ix >= g.n_x as f64 || iy >= g.n_y as f64 {
            continue;
        }
        min = min.min(field.value(ix as usize, iy as usize));
    }
    min
}

pub fn lobe_report(field: &WignerField) -> LobeReport {
    let peak = field.max();
    let flat = LobeReport {
        classification: LobeClass::Unimodal,
        delta_y: 0.0,
        euclidean_distance: 0.0,
        maxima: Vec::new(),
    };
    if !(peak > 0.0) {
        return flat;
    }
    let (nx, ny) = (field.grid.n_x, field.grid.n_y);
    let mut maxima: Vec<(f64, f64, f64)> = Vec::new();
    for iy in 1..ny - 1 {
        for ix in 1..nx - 1 {
            let w = field.value(ix, iy);
            if w < 0.5 * peak {
                continue;
            }
            let dominant = (-1i64..=1)
                .flat_map(|dy| (-1i64..=1).map(move |dx| (dx, dy)))
                .filter(|&(dx, dy)| dx != 0 || dy != 0)
                .all(|(dx, dy)| {
                    w > field.value((ix as i64 + dx) as usize, (iy as i64 + dy) as usize)
                });
            if dominant {
                maxima.push((field.grid.x(ix), field.grid.y(iy), w));
            }
        }
    }
    if maxima.is_empty() {
        return flat;
    }
    let cell = field.grid.dx().hypot(field.grid.dy());
    if maxima.len() == 2 {
        let (x1, y1, _) = maxima[0];
        let (x2, y2, _) = maxima[1];
        let mirror_y = (x1 - x2).abs() < 2.0 * cell && (y1 + y2).abs() < 2.0 * cell;
        let point_refl = (x1 + x2).abs() < 2.0 * cell && (y1 + y2).abs() < 2.0 * cell;
        let separated = (y1 - y2).abs() > 2.0 * cell;
        // A symmetric pair of maxima can also sit on a weakly modulated
        // annulus. Count the pair as distinct lobes only when the profile
        // along their circle dips below RING_DIP_FRACTION of the peak;
        // otherwise the maxima top a continuous ridge and the state is a
        // ring.
        if (mirror_y || point_refl) && separated {
            let radius = 0.5 * (x1.hypot(y1) + x2.hypot(y2));
            if azimuthal_min(field, radius) >= RING_DIP_FRACTION * peak {
                return LobeReport {
                    classification: LobeClass::OscillatoryRing,
                    delta_y: 0.0,
                    euclidean_distance: 0.0,
                    maxima,
                };
            }
            return LobeReport {
                classification: LobeClass::BimodalQod,
                delta_y: (y1 - y2).abs(),
                euclidean_distance: (x1 - x2).hypot(y1 - y2),
                maxima,
            };
        }
    }
    if maxima.len() >= 3 {
        let radii: Vec<f64> = maxima.iter().map(|&(x, y, _)| x.hypot(y)).collect();
        let mean_r = radii.iter().sum::<f64>() / radii.len() as f64;
        let common_radius =
            mean_r > 0.0 && radii.iter().all(|r| (r - mean_r).abs() <= 0.1 * mean_r);
        let mut angles: Vec<f64> = maxima.iter().map(|&(x, y, _)| y.atan2(x)).collect();
        angles.sort_by(f64::total_cmp);
        let mut largest_gap = 2.0 * PI + angles[0] - angles[angles.len() - 1];
        for pair in angles.windows(2) {
            largest_gap = largest_gap.max(pair[1] - pair[0]);
        }
        let spread = 2.0 * PI - largest_gap;
        if common_radius && spread > 0.5 * PI {
            return LobeReport {
                classification: LobeClass::OscillatoryRing,
                delta_y: 0.0,
                euclidean_distance: 0.0,
                maxima,
            };
        }
    }
    LobeReport {
        classification: LobeClass::Unimodal,
        delta_y: 0.0,
        euclidean_distance: 0.0,
        maxima,
    }
}

/// Steady-state Wigner classification across an ascending list of coupling
/// strengths. A failed point is recorded and the sweep continues.
pub fn lobe_sweep(
    p_base: &SystemParams,
    epsilons: &[f64],
    space: FockSpace,
    grid: &PhaseGrid,
) -> Result<LobeSweep> {
    if epsilons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("epsilon list must be strictly ascending".into()));
    }
    let mut points = Vec::with_capacity(epsilons.len());
    let mut transition = None;
    for &eps in epsilons {
        let eps_over_k1 = eps / p_base.k1;
        let report = (|| {
            let p = p_base.with_epsilon(eps);
            p.validate()?;
            let l = build_liouvillian(&p, space)?;
            let rho = steady_state(&l)?;
            let reduced = partial_trace(&rho, 1)?;
            let field = wigner(&reduced, grid)?;
            Ok(lobe_report(&field))
        })();
        if transition.is_none() {
            if let Ok(r) = &report {
                if r.classification == LobeClass::BimodalQod {
                    transition = Some(eps_over_k1);
                }
            }
        }
        points.push(SweepPoint { eps_over_k1, report });
    }
    Ok(LobeSweep { points, transition_eps_over_k1: transition })
}
