//! High-resolution finite-volume reference solver for convex scalar laws.
//!
//! Interface fluxes are the exact Godunov flux plus a limited Lax–Wendroff
//! correction `φ(θ) c` with `c = ½|s|(1 − |s|Δt/Δx) W` on each wave
//! `W = Q_i − Q_{i−1}`, and `θ` the ratio of the upwind `c` to the local one.
//! Boundaries use zero-order extrapolation.

use thiserror::Error;

use crate::funcapprox::PiecewiseFunction;
use crate::legendre::ConvexFlux;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FvError {
    #[error("need at least 2 cells and lo < hi, got {ncells} cells on [{lo}, {hi}]")]
    BadGrid { lo: f64, hi: f64, ncells: usize },
    #[error("time step {dt} exceeds the CFL limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("time step must be nonnegative and finite, got {0}")]
    BadStep(f64),
    #[error("cannot run backwards from t = {from} to t = {to}")]
    Backwards { from: f64, to: f64 },
}

/// Flux limiter applied to the ratio of upwind to local wave strength.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Limiter {
    #[default]
    VanLeer,
    /// `φ ≡ 1`: unlimited Lax–Wendroff.
    LaxWendroff,
    /// `φ ≡ 0`: first-order Godunov.
    Upwind,
}

impl Limiter {
    pub fn phi(self, theta: f64) -> f64 {
        match self {
            Limiter::VanLeer => (theta + theta.abs()) / (1.0 + theta.abs()),
            Limiter::LaxWendroff => 1.0,
            Limiter::Upwind => 0.0,
        }
    }
}

/// Fluxes through the two domain boundaries during one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub flux_left: f64,
    pub flux_right: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FvGrid {
    lo: f64,
    hi: f64,
    cells: Vec<f64>,
    time: f64,
    cfl_target: f64,
}

/// Five-point Gauss–Legendre nodes and weights on [−1, 1].
const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

impl FvGrid {
    pub fn new(lo: f64, hi: f64, cells: Vec<f64>) -> Result<Self, FvError> {
        if cells.len() < 2 || !(lo < hi) {
            return Err(FvError::BadGrid {
                lo,
                hi,
                ncells: cells.len(),
            });
        }
        Ok(Self {
            lo,
            hi,
            cells,
            time: 0.0,
            cfl_target: 0.9,
        })
    }

    /// Cell averages of `g` (extended by its end values) by 5-point Gauss on
    /// each sub-cell between breakpoints of `g`.
    pub fn init_from(g: &PiecewiseFunction, lo: f64, hi: f64, ncells: usize) -> Result<Self, FvError> {
        if ncells < 2 || !(lo < hi) {
            return Err(FvError::BadGrid { lo, hi, ncells });
        }
        let (dlo, dhi) = g.domain();
        let eval = |x: f64| g.evaluate(x.clamp(dlo, dhi)).expect("clamped into domain");
        let dx = (hi - lo) / ncells as f64;
        let cells = (0..ncells)
            .map(|i| {
                let (a, b) = (lo + i as f64 * dx, lo + (i + 1) as f64 * dx);
                let mut cuts = vec![a];
                cuts.extend(g.breakpoints().iter().copied().filter(|&c| c > a && c < b));
                cuts.push(b);
                let integral: f64 = cuts
                    .windows(2)
                    .map(|w| {
                        let (m, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                        h * GAUSS5.iter().map(|&(s, wt)| wt * eval(m + h * s)).sum::<f64>()
                    })
                    .sum();
                integral / dx
            })
            .collect();
        Self::new(lo, hi, cells)
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl_target = cfl;
        self
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn ncells(&self) -> usize {
        self.cells.len()
    }

    pub fn dx(&self) -> f64 {
        (self.hi - self.lo) / self.cells.len() as f64
    }

    pub fn cell_averages(&self) -> &[f64] {
        &self.cells
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn cfl_target(&self) -> f64 {
        self.cfl_target
    }

    pub fn centers(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.cells.len()).map(|i| self.lo + (i as f64 + 0.5) * dx).collect()
    }

    /// `Σ Q_i Δx`.
    pub fn total(&self) -> f64 {
        self.cells.iter().sum::<f64>() * self.dx()
    }

    pub fn total_variation(&self) -> f64 {
        self.cells.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    fn max_speed(&self, flux: &ConvexFlux) -> f64 {
        self.cells.iter().fold(0.0, |m, &q| m.max(flux.fprime(q).abs()))
    }

    /// `cfl_target Δx / max|F′(Q)|`, infinite for a stationary state.
    pub fn stable_dt(&self, flux: &ConvexFlux) -> f64 {
        let s = self.max_speed(flux);
        if s == 0.0 {
            f64::INFINITY
        } else {
            self.cfl_target * self.dx() / s
        }
    }

    /// One conservative update of size `dt`.
    pub fn step(&mut self, flux: &ConvexFlux, dt: f64, limiter: Limiter) -> Result<StepReport, FvError> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(FvError::BadStep(dt));
        }
        let limit = self.stable_dt(flux);
        if dt > limit * (1.0 + 1e-12) {
            return Err(FvError::Cfl { dt, limit });
        }
        let n = self.cells.len();
        let dx = self.dx();
        let nu = dt / dx;
        // two ghost cells per side
        let mut q = Vec::with_capacity(n + 4);
        q.extend([self.cells[0]; 2]);
        q.extend_from_slice(&self.cells);
        q.extend([self.cells[n - 1]; 2]);
        // wave and speed at the interface left of q[k], k = 1..n+4
        let waves: Vec<(f64, f64)> = (1..q.len())
            .map(|k| {
                let w = q[k] - q[k - 1];
                let s = if w.abs() > 1e-14 * (1.0 + q[k].abs()) {
                    (flux.f(q[k]) - flux.f(q[k - 1])) / w
                } else {
                    flux.fprime(0.5 * (q[k] + q[k - 1]))
                };
                (w, s)
            })
            .collect();
        // unlimited correction flux per wave; the limiter sees the ratio of these
        let strength: Vec<f64> = waves
            .iter()
            .map(|&(w, s)| 0.5 * s.abs() * (1.0 - s.abs() * nu) * w)
            .collect();
        // interface j (0..=n) sits between physical cells j−1 and j, i.e. q[j+1] and q[j+2]
        let fluxes: Vec<f64> = (0..=n)
            .map(|j| {
                let (ql, qr) = (q[j + 1], q[j + 2]);
                let (c, s) = (strength[j + 1], waves[j + 1].1);
                let upwind = if s >= 0.0 { strength[j] } else { strength[j + 2] };
                let theta = if c != 0.0 { upwind / c } else { 0.0 };
                godunov_flux(flux, ql, qr) + limiter.phi(theta) * c
            })
            .collect();
        for (i, c) in self.cells.iter_mut().enumerate() {
            *c -= nu * (fluxes[i + 1] - fluxes[i]);
        }
        self.time += dt;
        Ok(StepReport {
            dt,
            flux_left: fluxes[0],
            flux_right: fluxes[n],
        })
    }

    /// CFL-limited steps until `t_end`, the last one shortened to land on it exactly.
    pub fn run_until(&mut self, flux: &ConvexFlux, t_end: f64, limiter: Limiter) -> Result<usize, FvError> {
        if t_end < self.time {
            return Err(FvError::Backwards {
                from: self.time,
                to: t_end,
            });
        }
        let mut steps = 0;
        while self.time < t_end {
            let remaining = t_end - self.time;
            let dt = self.stable_dt(flux).min(remaining);
            self.step(flux, dt, limiter)?;
            if dt == remaining {
                self.time = t_end;
            }
            steps += 1;
        }
        Ok(steps)
    }
}

/// Exact Riemann flux for a convex `F`.
pub fn godunov_flux(flux: &ConvexFlux, ql: f64, qr: f64) -> f64 {
    if ql <= qr {
        if flux.fprime(ql) >= 0.0 {
            flux.f(ql)
        } else if flux.fprime(qr) <= 0.0 {
            flux.f(qr)
        } else {
            let (mut a, mut b) = (ql, qr);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if !(m > a && m < b) {
                    break;
                }
                if flux.fprime(m) < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            flux.f(0.5 * (a + b))
        }
    } else {
        flux.f(ql).max(flux.f(qr))
    }
}
