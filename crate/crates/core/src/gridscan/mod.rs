//! Parameter sweeps, phase-space grids and the analytic-versus-oracle
//! validation report, with CSV and JSON output.

mod table;
mod validate;

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::ConditionalState;
use crate::error::{Error, Result};
use crate::params::ModelParams;

pub use table::{Cell, Format, Table};
pub use validate::{completeness_sum, smoothed_wigner, validate, wigner_marginal, Check, Fault, Finding, ValidationConfig, ValidationReport};

/// Default phase-space window half-width.
pub const DEFAULT_HALF_WIDTH: f64 = 4.0;
/// Default points per phase-space axis.
pub const DEFAULT_POINTS: usize = 81;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    R,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepObservable {
    PEvent,
    MeanN,
    MandelQ,
}

impl SweepObservable {
    pub fn name(self) -> &'static str {
        match self {
            SweepObservable::PEvent => "p_event",
            SweepObservable::MeanN => "mean_n",
            SweepObservable::MandelQ => "mandel_q",
        }
    }
}

/// A 1-D sweep of `r` or `θ` with the other held fixed, for several `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub range: [f64; 2],
    pub points: usize,
    /// Value of `θ` when sweeping `r`, ignored otherwise.
    pub theta: f64,
    /// Value of `r` when sweeping `θ`, ignored otherwise.
    pub r: f64,
    pub m_list: Vec<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.range;
        if !(lo < hi) {
            return Err(Error::InvalidSpec(format!("sweep range [{lo}, {hi}] must have lo < hi")));
        }
        if self.points < 2 {
            return Err(Error::invalid("points", self.points, "a sweep needs at least 2 points"));
        }
        if self.m_list.is_empty() {
            return Err(Error::InvalidSpec("m_list is empty".into()));
        }
        for &v in &[lo, hi] {
            let (theta, r) = self.at(v);
            for &m in &self.m_list {
                ModelParams::new(theta, r, m)?;
            }
        }
        Ok(())
    }

    /// Sample positions, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        linspace(self.range[0], self.range[1], self.points)
    }

    fn at(&self, v: f64) -> (f64, f64) {
        match self.variable {
            SweepVariable::R => (self.theta, v),
            SweepVariable::Theta => (v, self.r),
        }
    }
}

/// `n` evenly spaced points with exact endpoints.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + i as f64 * step }).collect()
}

/// One observable at one parameter point. Zero-probability events and an
/// undefined Q come back as `None`; other errors propagate.
pub fn observable_at(p: &ModelParams, obs: SweepObservable) -> Result<Option<f64>> {
    let state = match ConditionalState::new(p) {
        Ok(s) => s,
        Err(e) if e.is_zero_probability() => return Ok(None),
        Err(e) => return Err(e),
    };
    match obs {
        SweepObservable::PEvent => Ok(Some(state.event_probability())),
        SweepObservable::MeanN => state.mean_photon().map(Some),
        SweepObservable::MandelQ => match state.mandel_q() {
            Ok(q) => Ok(Some(q)),
            Err(Error::UndefinedMandelQ) => Ok(None),
            Err(e) => Err(e),
        },
    }
}

/// Table with columns `(r | theta, m, <observable>)`, ordered by `m` then the
/// swept value.
pub fn sweep(spec: &SweepSpec, obs: SweepObservable) -> Result<Table> {
    spec.validate()?;
    let values = spec.values();
    let jobs: Vec<(usize, f64)> = spec.m_list.iter().flat_map(|&m| values.iter().map(move |&v| (m, v))).collect();
    let results: Vec<Option<f64>> = jobs
        .par_iter()
        .map(|&(m, v)| {
            let (theta, r) = spec.at(v);
            observable_at(&ModelParams { theta, r, m }, obs)
        })
        .collect::<Result<_>>()?;
    let var = match spec.variable {
        SweepVariable::R => "r",
        SweepVariable::Theta => "theta",
    };
    let mut table = Table::new(&[var, "m", obs.name()]).with_meta("kind", "sweep").with_meta("spec", spec);
    for ((m, v), value) in jobs.into_iter().zip(results) {
        table.push(vec![Cell::from(v), Cell::from(m), Cell::from(value)]);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridObservable {
    Wigner,
    Husimi,
    /// Homodyne density; the second axis is the phase `φ`.
    Qcd,
}

/// A rectangular grid over `(x, p)` or, for [`GridObservable::Qcd`], `(x, φ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub observable: GridObservable,
}

impl GridSpec {
    /// The default `[-4, 4]²` window at 81×81 points.
    pub fn phase_space(observable: GridObservable) -> Self {
        let w = DEFAULT_HALF_WIDTH;
        GridSpec { x_range: [-w, w], y_range: [-w, w], nx: DEFAULT_POINTS, ny: DEFAULT_POINTS, observable }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidSpec(format!("grid needs nx, ny >= 2, got {} x {}", self.nx, self.ny)));
        }
        for (name, [lo, hi]) in [("x_range", self.x_range), ("y_range", self.y_range)] {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} [{lo}, {hi}] must be finite with lo < hi")));
            }
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_range[0], self.x_range[1], self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        linspace(self.y_range[0], self.y_range[1], self.ny)
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.x_range[1] - self.x_range[0]) / (self.nx - 1) as f64,
            (self.y_range[1] - self.y_range[0]) / (self.ny - 1) as f64,
        )
    }
}

/// Values of the grid observable in row-major order, `x` fastest.
pub fn grid_values(spec: &GridSpec, state: &ConditionalState) -> Result<Vec<f64>> {
    spec.validate()?;
    let (xs, ys) = (spec.xs(), spec.ys());
    Ok((0..xs.len() * ys.len())
        .into_par_iter()
        .map(|i| {
            let (x, y) = (xs[i % xs.len()], ys[i / xs.len()]);
            match spec.observable {
                GridObservable::Wigner => state.wigner(x, y),
                GridObservable::Husimi => state.husimi(x, y),
                GridObservable::Qcd => state.qcd(x, y),
            }
        })
        .collect())
}

/// Dense `(x, p | phi, value)` rows for one parameter set.
pub fn grid(spec: &GridSpec, p: &ModelParams) -> Result<Table> {
    let state = ConditionalState::new(p)?;
    let values = grid_values(spec, &state)?;
    let (ycol, vcol) = match spec.observable {
        GridObservable::Wigner => ("p", "wigner"),
        GridObservable::Husimi => ("p", "husimi"),
        GridObservable::Qcd => ("phi", "qcd"),
    };
    let mut table = Table::new(&["x", ycol, vcol])
        .with_meta("kind", "grid")
        .with_meta("params", p)
        .with_meta("spec", spec);
    let xs = spec.xs();
    for (i, v) in values.into_iter().enumerate() {
        let (x, y) = (xs[i % xs.len()], spec.ys()[i / xs.len()]);
        table.push(vec![Cell::from(x), Cell::from(y), Cell::from(v)]);
    }
    Ok(table)
}

/// Window used for the `Q(θ, r)` map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QMapSpec {
    pub theta_range: [f64; 2],
    pub r_range: [f64; 2],
    pub theta_points: usize,
    pub r_points: usize,
    pub m: usize,
}

impl QMapSpec {
    /// `θ ∈ [0, π/2]`, `r ∈ [0, 2]`.
    pub fn full(m: usize, theta_points: usize, r_points: usize) -> Self {
        QMapSpec { theta_range: [0.0, FRAC_PI_2], r_range: [0.0, 2.0], theta_points, r_points, m }
    }
}

/// Dense Mandel-Q table over `(θ, r)`, `θ` fastest; `None` where undefined.
pub fn q_region_map(spec: &QMapSpec) -> Result<Table> {
    let grid = GridSpec {
        x_range: spec.theta_range,
        y_range: spec.r_range,
        nx: spec.theta_points,
        ny: spec.r_points,
        observable: GridObservable::Wigner,
    };
    grid.validate()?;
    let (thetas, rs) = (grid.xs(), grid.ys());
    for &(theta, r) in &[(thetas[0], rs[0]), (thetas[thetas.len() - 1], rs[rs.len() - 1])] {
        ModelParams::new(theta, r, spec.m)?;
    }
    let values: Vec<Option<f64>> = (0..thetas.len() * rs.len())
        .into_par_iter()
        .map(|i| {
            let p = ModelParams { theta: thetas[i % thetas.len()], r: rs[i / thetas.len()], m: spec.m };
            observable_at(&p, SweepObservable::MandelQ)
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["theta", "r", "mandel_q"])
        .with_meta("kind", "q_region_map")
        .with_meta("spec", spec)
        .with_meta("contour_levels", [0.0, -0.2, -0.5, -0.8]);
    for (i, v) in values.into_iter().enumerate() {
        table.push(vec![Cell::from(thetas[i % thetas.len()]), Cell::from(rs[i / thetas.len()]), Cell::from(v)]);
    }
    Ok(table)
}
