//! Pointwise entropy solutions for a space-independent convex flux.
//!
//! For each `(x, t)` the costate candidates are the roots of
//! `h(p) = g(x − tF′(p)) − p` together with the fan costates solving
//! `a_k = x − tF′(p)`; the one with least cost `(pF′ − F)t + G(x − tF′)` wins.

pub mod reconstruct;

use rayon::prelude::*;
use thiserror::Error;

use self::reconstruct::{Probe, ReconstructError, ReconstructOptions, Reconstruction};
use crate::funcapprox::{approximate, ApproxError, ApproxOptions, PiecewiseFunction, RootOptions};
use crate::legendre::{lagrangian_along_optimal, ConvexFlux};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("no characteristic reaches (x, t) = ({x}, {t})")]
    NoCandidates { x: f64, t: f64 },
    #[error("negative time t = {0}")]
    NegativeTime(f64),
    #[error("flux has no closed-form Lagrangian")]
    NoClosedFormLagrangian,
    #[error(transparent)]
    Approx(#[from] ApproxError),
}

pub type Result<T> = std::result::Result<T, EntropyError>;

/// Initial condition `g`, its continuous antiderivative `G`, and the jump points of `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialData {
    g: PiecewiseFunction,
    big_g: PiecewiseFunction,
    discontinuities: Vec<f64>,
}

impl InitialData {
    /// Derive `G` and the jump set from `g`.
    pub fn new(g: PiecewiseFunction) -> Self {
        let big_g = g.antiderivative();
        let threshold = 10.0 * g.vscale() * f64::EPSILON;
        let discontinuities = g.jumps(threshold);
        Self {
            g,
            big_g,
            discontinuities,
        }
    }

    /// Approximate `f` on `[lo, hi]` with breakpoint hints, then derive the rest.
    pub fn from_fn<F>(f: F, lo: f64, hi: f64, hints: &[f64]) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        let opts = ApproxOptions {
            max_pieces: 256,
            ..ApproxOptions::default()
        };
        Ok(Self::new(approximate(f, lo, hi, hints, &opts)?))
    }

    pub fn g_pf(&self) -> &PiecewiseFunction {
        &self.g
    }

    pub fn big_g_pf(&self) -> &PiecewiseFunction {
        &self.big_g
    }

    pub fn discontinuities(&self) -> &[f64] {
        &self.discontinuities
    }

    pub fn domain(&self) -> (f64, f64) {
        self.g.domain()
    }

    /// `g(x)`, extended by its end values outside the stored domain.
    pub fn g(&self, x: f64) -> f64 {
        let (lo, hi) = self.g.domain();
        if x < lo {
            self.g.first_value()
        } else if x >= hi {
            self.g.last_value()
        } else {
            self.g.evaluate(x).expect("x inside domain")
        }
    }

    /// `G(x)`, extended linearly with slope `g` at the nearest end.
    pub fn big_g(&self, x: f64) -> f64 {
        let (lo, hi) = self.g.domain();
        if x < lo {
            self.big_g.first_value() + self.g.first_value() * (x - lo)
        } else if x > hi {
            self.big_g.last_value() + self.g.last_value() * (x - hi)
        } else {
            self.big_g.evaluate(x).expect("x inside domain")
        }
    }

    /// Region of the real line containing `y` relative to the pieces of `g`.
    pub fn region(&self, y: f64) -> Region {
        let (lo, hi) = self.g.domain();
        if y < lo {
            Region::Left
        } else if y > hi {
            Region::Right
        } else {
            Region::Piece(self.g.piece_index(y).expect("y inside domain"))
        }
    }
}

/// Where a characteristic foot lands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Left,
    Piece(usize),
    Right,
}

/// Which family of solutions produced a sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `t = 0`: the initial condition itself.
    Initial,
    /// A smooth characteristic with foot in the given region.
    Characteristic(Region),
    /// A fan centred at discontinuity `a_k`.
    Fan(usize),
}

/// Solution value and minimal cost at one space-time point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionSample {
    pub x: f64,
    pub t: f64,
    pub u: f64,
    /// Minimal cost, i.e. the Hamilton–Jacobi value `w(x, t)`.
    pub j: f64,
    pub candidate_count: usize,
    /// Foot of the optimal characteristic, `x − tF′(u)`.
    pub foot: f64,
    pub branch: Branch,
}

/// Solver options.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyOptions {
    pub approx: ApproxOptions,
    pub roots: RootOptions,
    /// Relative cost window within which the smaller costate wins.
    pub tie_tol: f64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        Self {
            approx: ApproxOptions {
                max_pieces: 256,
                ..ApproxOptions::default()
            },
            roots: RootOptions::default(),
            tie_tol: 1e-12,
        }
    }
}

/// A flux and initial data with the per-problem precomputation done once.
#[derive(Clone, Debug)]
pub struct EntropySolver {
    flux: ConvexFlux,
    init: InitialData,
    opts: EntropyOptions,
    g_range: (f64, f64),
    fprime_pf: PiecewiseFunction,
}

impl EntropySolver {
    pub fn new(flux: ConvexFlux, init: InitialData) -> Result<Self> {
        Self::with_options(flux, init, EntropyOptions::default())
    }

    pub fn with_options(flux: ConvexFlux, init: InitialData, opts: EntropyOptions) -> Result<Self> {
        let g_range = init.g.range();
        let (plo, phi) = flux.p_domain();
        let mut lo = plo.min(g_range.0);
        let mut hi = phi.max(g_range.1);
        for &h in flux.smoothness_hints() {
            lo = lo.min(h);
            hi = hi.max(h);
        }
        let pad = 1e-3 * (hi - lo).max(1.0);
        let fprime_pf = approximate(
            |p| flux.fprime(p),
            lo - pad,
            hi + pad,
            flux.smoothness_hints(),
            &opts.approx,
        )?;
        Ok(Self {
            flux,
            init,
            opts,
            g_range,
            fprime_pf,
        })
    }

    pub fn flux(&self) -> &ConvexFlux {
        &self.flux
    }

    pub fn init(&self) -> &InitialData {
        &self.init
    }

    pub fn options(&self) -> &EntropyOptions {
        &self.opts
    }

    /// `[min g, max g]`.
    pub fn g_range(&self) -> (f64, f64) {
        self.g_range
    }

    /// All `p` with `F′(p) = level` inside the precomputed costate window.
    fn fprime_level(&self, level: f64) -> Vec<f64> {
        self.fprime_pf.roots_of_value(level, &self.opts.roots)
    }

    /// Fan costates: roots of `a_k − x + tF′(p)`, tagged with `k`.
    fn fan_costates(&self, x: f64, t: f64) -> Vec<(f64, usize)> {
        let mut out = Vec::new();
        for (k, &a) in self.init.discontinuities.iter().enumerate() {
            out.extend(self.fprime_level((x - a) / t).into_iter().map(|p| (p, k)));
        }
        out
    }

    /// Step I: every costate reaching `(x, t)`, sorted and deduplicated.
    pub fn candidate_costates(&self, x: f64, t: f64) -> Result<Vec<f64>> {
        if t < 0.0 {
            return Err(EntropyError::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(vec![self.init.g(x)]);
        }
        Ok(self.tagged_candidates(x, t)?.into_iter().map(|c| c.p).collect())
    }

    fn tagged_candidates(&self, x: f64, t: f64) -> Result<Vec<Candidate>> {
        let fans = self.fan_costates(x, t);
        let (mut lo, mut hi) = self.g_range;
        for &p in self.flux.smoothness_hints().iter().chain(fans.iter().map(|(p, _)| p)) {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        // roots of h lie in [min g, max g]; a margin keeps those at max g or min g off the boundary
        let pad = if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            1e-3 * (1.0 + lo.abs())
        } else {
            1e-6 * (hi - lo)
        };
        lo -= pad;
        hi += pad;
        // h is non-smooth where x − tF′(p) crosses a breakpoint of g.
        let mut hints: Vec<f64> = self.flux.smoothness_hints().to_vec();
        for &b in self.init.g.breakpoints() {
            hints.extend(self.fprime_level((x - b) / t));
        }
        let h = |p: f64| self.init.g(x - t * self.flux.fprime(p)) - p;
        let hpf = approximate(h, lo, hi, &hints, &self.opts.approx)?;
        let mut cands: Vec<Candidate> = hpf
            .roots_with(&self.opts.roots)
            .into_iter()
            .map(|p| Candidate { p, fan: None })
            .collect();
        cands.extend(fans.into_iter().map(|(p, k)| Candidate { p, fan: Some(k) }));
        cands.retain(|c| c.p.is_finite());
        // characteristic roots sort ahead of fan roots at equal p, so dedup keeps them
        cands.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.fan.is_some().cmp(&b.fan.is_some())));
        let tol = self.opts.roots.root_tol;
        let mut out: Vec<Candidate> = Vec::with_capacity(cands.len());
        for c in cands {
            match out.last_mut() {
                Some(last) if (c.p - last.p).abs() <= tol => {
                    if last.fan.is_some() && c.fan.is_none() {
                        *last = c;
                    }
                }
                _ => out.push(c),
            }
        }
        if out.is_empty() {
            return Err(EntropyError::NoCandidates { x, t });
        }
        Ok(out)
    }

    /// A fan costate can only be optimal if it lies between the one-sided values of `g` at `a_k`.
    fn fan_admissible(&self, c: &Candidate) -> bool {
        let Some(k) = c.fan else { return true };
        let a = self.init.discontinuities[k];
        let j = self.init.g.piece_index(a).expect("discontinuity inside domain");
        let (l, r) = (self.init.g.left_value(j), self.init.g.right_value(j));
        let tol = self.opts.roots.root_tol * (1.0 + l.abs().max(r.abs()));
        c.p >= l.min(r) - tol && c.p <= l.max(r) + tol
    }

    /// Step II cost `(pF′(p) − F(p))t + G(x − F′(p)t)`.
    pub fn cost(&self, p: f64, x: f64, t: f64) -> f64 {
        lagrangian_along_optimal(&self.flux, p) * t + self.init.big_g(x - self.flux.fprime(p) * t)
    }

    /// The entropy solution `u(x, t)` and value `w(x, t)`.
    ///
    /// Candidates within `tie_tol` of the least cost are resolved in favour of
    /// the smallest costate. Fan costates outside `[g(a_k−), g(a_k+)]` never
    /// minimize and are left out of the comparison.
    pub fn solve_point(&self, x: f64, t: f64) -> Result<SolutionSample> {
        if t < 0.0 {
            return Err(EntropyError::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(SolutionSample {
                x,
                t,
                u: self.init.g(x),
                j: self.init.big_g(x),
                candidate_count: 1,
                foot: x,
                branch: Branch::Initial,
            });
        }
        let all = self.tagged_candidates(x, t)?;
        let mut cands: Vec<Candidate> = all.iter().copied().filter(|c| self.fan_admissible(c)).collect();
        if cands.is_empty() {
            cands = all.clone();
        }
        let costs: Vec<f64> = cands.iter().map(|c| self.cost(c.p, x, t)).collect();
        let jmin = costs.iter().copied().fold(f64::INFINITY, f64::min);
        if !jmin.is_finite() {
            return Err(EntropyError::NoCandidates { x, t });
        }
        let window = jmin + self.opts.tie_tol * (1.0 + jmin.abs());
        // candidates are sorted, so the first inside the window has the smallest p
        let i = costs.iter().position(|&j| j <= window).expect("minimum is inside its own window");
        let best = cands[i];
        let foot = x - t * self.flux.fprime(best.p);
        let branch = match best.fan {
            Some(k) => Branch::Fan(k),
            None => Branch::Characteristic(self.init.region(foot)),
        };
        Ok(SolutionSample {
            x,
            t,
            u: best.p,
            j: costs[i],
            candidate_count: all.len(),
            foot,
            branch,
        })
    }

    /// `solve_point` over the grid `ts × xs`, ordered by `t` then `x`.
    ///
    /// With `parallel`, points are spread over the current rayon pool; the
    /// output is identical either way.
    pub fn solve_grid(&self, xs: &[f64], ts: &[f64], parallel: bool) -> Result<Vec<SolutionSample>> {
        let pts: Vec<(f64, f64)> = ts.iter().flat_map(|&t| xs.iter().map(move |&x| (x, t))).collect();
        if parallel {
            pts.par_iter().map(|&(x, t)| self.solve_point(x, t)).collect()
        } else {
            pts.iter().map(|&(x, t)| self.solve_point(x, t)).collect()
        }
    }

    /// Brute-force Hopf–Lax minimum of `tL((y − x)/t) + G(y)` over `n` points of a `y` window.
    ///
    /// Needs a closed-form Lagrangian. `u` is recovered by inverting `F′` at `(x − y*)/t`.
    pub fn hopf_lax_oracle(&self, x: f64, t: f64, n: usize) -> Result<OracleSample> {
        if !self.flux.has_closed_form_lagrangian() {
            return Err(EntropyError::NoClosedFormLagrangian);
        }
        if !(t > 0.0) {
            return Err(EntropyError::NegativeTime(t));
        }
        let (gmin, gmax) = self.g_range;
        let lo_y = x - t * self.flux.fprime(gmax);
        let hi_y = x - t * self.flux.fprime(gmin);
        let margin = 0.05 * (hi_y - lo_y) + 1e-2 * (1.0 + t);
        let (lo_y, hi_y) = (lo_y - margin, hi_y + margin);
        let n = n.max(2);
        let mut best = (f64::INFINITY, lo_y);
        for i in 0..n {
            let y = lo_y + (hi_y - lo_y) * i as f64 / (n - 1) as f64;
            let l = self.flux.lagrangian((y - x) / t)?;
            let v = t * l + self.init.big_g(y);
            if v < best.0 {
                best = (v, y);
            }
        }
        let u = self.invert_fprime((x - best.1) / t);
        Ok(OracleSample {
            w: best.0,
            y_star: best.1,
            u,
        })
    }

    /// Piecewise reconstruction of `x ↦ u(x, t)` on `[lo, hi]` with located shocks.
    pub fn reconstruct(
        &self,
        t: f64,
        lo: f64,
        hi: f64,
        opts: &ReconstructOptions,
    ) -> std::result::Result<Reconstruction, ReconstructError<EntropyError>> {
        reconstruct::reconstruct(
            |x| {
                self.solve_point(x, t).map(|s| Probe {
                    u: s.u,
                    foot: s.foot,
                    label: s.branch,
                })
            },
            lo,
            hi,
            opts,
        )
    }

    /// Smallest `p` in the costate window with `F′(p) ≥ level`, by bisection.
    fn invert_fprime(&self, level: f64) -> f64 {
        let (mut a, mut b) = self.fprime_pf.domain();
        if self.flux.fprime(a) >= level {
            return a;
        }
        if self.flux.fprime(b) < level {
            return b;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if !(m > a && m < b) {
                break;
            }
            if self.flux.fprime(m) >= level {
                b = m;
            } else {
                a = m;
            }
        }
        b
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    p: f64,
    fan: Option<usize>,
}

/// Result of [`EntropySolver::hopf_lax_oracle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSample {
    pub w: f64,
    pub y_star: f64,
    pub u: f64,
}

/// Free-function form of [`EntropySolver::candidate_costates`].
pub fn candidate_costates(flux: &ConvexFlux, init: &InitialData, x: f64, t: f64) -> Result<Vec<f64>> {
    EntropySolver::new(flux.clone(), init.clone())?.candidate_costates(x, t)
}

/// Free-function form of [`EntropySolver::cost`].
pub fn cost(flux: &ConvexFlux, init: &InitialData, p: f64, x: f64, t: f64) -> f64 {
    lagrangian_along_optimal(flux, p) * t + init.big_g(x - flux.fprime(p) * t)
}

/// Free-function form of [`EntropySolver::solve_point`].
pub fn solve_point(flux: &ConvexFlux, init: &InitialData, x: f64, t: f64) -> Result<SolutionSample> {
    EntropySolver::new(flux.clone(), init.clone())?.solve_point(x, t)
}
