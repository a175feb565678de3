//! Grid solver for `∂t u = min{a * u, 1}` and the numerical checks built on it.

pub mod checks;
pub mod convolve;
pub mod solver;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;

pub use convolve::Convolver;
pub use solver::{MesoSolver, PicardOptions};

/// Treatment of the solution beyond a grid edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// `u = 0` outside the grid.
    #[default]
    Zero,
    /// `u` continues with its edge-cell value.
    Plateau,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    /// A power of two.
    pub n_cells: usize,
    pub left: Closure,
    pub right: Closure,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<GridSpec> {
        let g = GridSpec {
            x_min,
            x_max,
            n_cells,
            left: Closure::Zero,
            right: Closure::Zero,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_closures(mut self, left: Closure, right: Closure) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(Error::Config("grid needs finite x_min < x_max".into()));
        }
        if self.n_cells < 2 || !self.n_cells.is_power_of_two() {
            return Err(Error::Config(format!("n_cells must be a power of two >= 2, got {}", self.n_cells)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    /// Centre of cell `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.h()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.x(i)).collect()
    }

    /// Symmetric domain `[-L, L]` with `L` 20% beyond `exp((1 + eps) T rate)`,
    /// where `rate` is the front exponent of the initial data.
    pub fn sized_for_front(rate: f64, eps: f64, horizon: f64, n_cells: usize) -> Result<GridSpec> {
        let l = 1.2 * ((1.0 + eps) * horizon * rate).exp();
        GridSpec::new(-l, l, n_cells)
    }
}

/// Solution values at cell centres at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MesoField {
    pub grid: GridSpec,
    pub t: f64,
    pub u: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// `height · 1{|x| ≤ half_width}`.
    Bump { height: f64, half_width: f64 },
    /// `height · 1{x ≤ 0}`.
    Step { height: f64 },
    /// `scale · a(x)`.
    Kernel { scale: f64 },
    /// `amplitude · exp(-(x - center)² / (2 width²))`.
    Gaussian { amplitude: f64, center: f64, width: f64 },
    Constant { value: f64 },
}

impl InitialCondition {
    pub fn eval(&self, x: f64, kernel: &KernelSpec) -> f64 {
        match *self {
            InitialCondition::Bump { height, half_width } => {
                if x.abs() <= half_width {
                    height
                } else {
                    0.0
                }
            }
            InitialCondition::Step { height } => {
                if x <= 0.0 {
                    height
                } else {
                    0.0
                }
            }
            InitialCondition::Kernel { scale } => scale * kernel.eval(x),
            InitialCondition::Gaussian {
                amplitude,
                center,
                width,
            } => amplitude * (-(x - center).powi(2) / (2.0 * width * width)).exp(),
            InitialCondition::Constant { value } => value,
        }
    }
}

impl MesoField {
    pub fn new(grid: GridSpec, u: Vec<f64>) -> Result<MesoField> {
        grid.validate()?;
        if u.len() != grid.n_cells {
            return Err(Error::Config("field length does not match the grid".into()));
        }
        if u.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain("initial values must be finite and non-negative".into()));
        }
        Ok(MesoField { grid, t: 0.0, u })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Result<MesoField> {
        let u = grid.xs().into_iter().map(f).collect();
        MesoField::new(grid, u)
    }

    pub fn from_initial(grid: GridSpec, init: &InitialCondition, kernel: &KernelSpec) -> Result<MesoField> {
        MesoField::from_fn(grid, |x| init.eval(x, kernel))
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Outermost crossing of `u = level` on `side`, scanning inward from that
/// edge and interpolating linearly between cell centres.
pub fn front_position(field: &MesoField, level: f64, side: Side) -> Option<f64> {
    let u = &field.u;
    let n = u.len();
    let g = &field.grid;
    match side {
        Side::Right => {
            if u[n - 1] >= level {
                return None;
            }
            for i in (1..n).rev() {
                if u[i - 1] >= level {
                    let frac = (u[i - 1] - level) / (u[i - 1] - u[i]);
                    return Some(g.x(i - 1) + frac * g.h());
                }
            }
            None
        }
        Side::Left => {
            if u[0] >= level {
                return None;
            }
            for i in 0..n - 1 {
                if u[i + 1] >= level {
                    let frac = (u[i + 1] - level) / (u[i + 1] - u[i]);
                    return Some(g.x(i + 1) - frac * g.h());
                }
            }
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontRecord {
    pub t: f64,
    pub x_left: Option<f64>,
    pub x_right: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontTrace {
    pub level: f64,
    pub records: Vec<FrontRecord>,
}

impl FrontTrace {
    pub fn new(level: f64) -> Self {
        FrontTrace {
            level,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, field: &MesoField) {
        self.records.push(FrontRecord {
            t: field.t,
            x_left: front_position(field, self.level, Side::Left),
            x_right: front_position(field, self.level, Side::Right),
        });
    }

    /// `(t, x_right)` for records where the right front exists.
    pub fn right_series(&self) -> Vec<(f64, f64)> {
        self.records.iter().filter_map(|r| r.x_right.map(|x| (r.t, x))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_front_is_interpolated() {
        let grid = GridSpec::new(-20.0, 20.0, 4096).unwrap();
        let f = MesoField::from_fn(grid, |x| {
            if x <= 0.0 {
                1.0
            } else if x >= 10.0 {
                0.0
            } else {
                1.0 - x / 10.0
            }
        })
        .unwrap();
        let x = front_position(&f, 0.5, Side::Right).unwrap();
        assert!((x - 5.0).abs() < 1e-12, "{x}");
        assert_eq!(front_position(&f, 0.5, Side::Left), None);
    }

    #[test]
    fn flat_field_has_no_front() {
        let grid = GridSpec::new(-1.0, 1.0, 64).unwrap();
        let f = MesoField::from_fn(grid, |_| 0.2).unwrap();
        assert_eq!(front_position(&f, 0.5, Side::Right), None);
        assert_eq!(front_position(&f, 0.5, Side::Left), None);
    }

    #[test]
    fn level_set_of_power_profile() {
        // min(1, x^{-2} e^{10}) drops below one at x = e^5.
        let grid = GridSpec::new(-400.0, 400.0, 1 << 16).unwrap();
        let f = MesoField::from_fn(grid.clone(), |x: f64| (x.powi(-2) * 10f64.exp()).min(1.0)).unwrap();
        let x = front_position(&f, 1.0, Side::Right).unwrap();
        assert!((x - 5f64.exp()).abs() <= grid.h(), "{x}");
        let xl = front_position(&f, 1.0, Side::Left).unwrap();
        assert!((xl + 5f64.exp()).abs() <= grid.h(), "{xl}");
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0.0, 1.0, 100).is_err());
        assert!(GridSpec::new(1.0, 0.0, 128).is_err());
        let g = GridSpec::new(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.xs(), vec![-0.75, -0.25, 0.25, 0.75]);
    }
}
