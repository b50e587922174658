//! Minimum-value solutions for space-dependent fluxes from the PMP two-point BVPs.
//!
//! The state/costate system `ẋ = α*(x, p)`, `ṗ = −H_x(x, p, α*)` on `[0, t]` is
//! collocated at Chebyshev–Lobatto points and solved by damped Newton. The
//! terminal condition is either free (`p(t) = G′(x(t))`) or pinned at a
//! discontinuity (`x(t) = a_k`).

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::entropy::{Branch, InitialData, SolutionSample};
use crate::funcapprox::{cheb, PiecewiseFunction};

type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Fn3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BvpError {
    #[error("horizon must be positive, got t = {0}")]
    NonPositiveTime(f64),
    #[error("no candidate converged at (x, t) = ({x}, {t})")]
    NoConvergedCandidate { x: f64, t: f64 },
}

/// A space-dependent optimal control problem with Hamiltonian `H = pα + L(x, α)`.
#[derive(Clone)]
pub struct ControlProblem {
    hamiltonian: Fn3,
    dh_dx: Fn3,
    alpha_star: Fn2,
    lagrangian: Fn2,
    terminal: InitialData,
    slope: Fn1,
    slope_derivative: Fn1,
    horizon: f64,
}

impl fmt::Debug for ControlProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlProblem")
            .field("terminal_domain", &self.terminal.domain())
            .field("discontinuities", &self.terminal.discontinuities())
            .field("horizon", &self.horizon)
            .finish()
    }
}

impl ControlProblem {
    /// Terminal data `G` and jumps come from `terminal`; `G′` defaults to its `g`.
    pub fn new<H, D, A, L>(hamiltonian: H, dh_dx: D, alpha_star: A, lagrangian: L, terminal: InitialData, horizon: f64) -> Self
    where
        H: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        A: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        L: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let slope_init = terminal.clone();
        let dg: PiecewiseFunction = terminal.g_pf().derivative();
        Self {
            hamiltonian: Arc::new(hamiltonian),
            dh_dx: Arc::new(dh_dx),
            alpha_star: Arc::new(alpha_star),
            lagrangian: Arc::new(lagrangian),
            terminal,
            slope: Arc::new(move |x| slope_init.g(x)),
            slope_derivative: Arc::new(move |x| dg.evaluate(x).unwrap_or(0.0)),
            horizon,
        }
    }

    /// Exact `G′` and `G″` in place of the piecewise ones.
    pub fn with_terminal_slope<S, T>(mut self, slope: S, slope_derivative: T) -> Self
    where
        S: Fn(f64) -> f64 + Send + Sync + 'static,
        T: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.slope = Arc::new(slope);
        self.slope_derivative = Arc::new(slope_derivative);
        self
    }

    pub fn hamiltonian(&self, x: f64, p: f64, a: f64) -> f64 {
        (self.hamiltonian)(x, p, a)
    }

    pub fn dh_dx(&self, x: f64, p: f64, a: f64) -> f64 {
        (self.dh_dx)(x, p, a)
    }

    pub fn alpha_star(&self, x: f64, p: f64) -> f64 {
        (self.alpha_star)(x, p)
    }

    pub fn lagrangian(&self, x: f64, a: f64) -> f64 {
        (self.lagrangian)(x, a)
    }

    /// `F(x, p) = −min_α H(x, p, α)`.
    pub fn flux(&self, x: f64, p: f64) -> f64 {
        -self.hamiltonian(x, p, self.alpha_star(x, p))
    }

    pub fn terminal(&self) -> &InitialData {
        &self.terminal
    }

    /// `G′(x)`, the free terminal costate.
    pub fn terminal_slope(&self, x: f64) -> f64 {
        (self.slope)(x)
    }

    pub fn terminal_value(&self, x: f64) -> f64 {
        self.terminal.big_g(x)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn costate_rate(&self, x: f64, p: f64) -> f64 {
        -self.dh_dx(x, p, self.alpha_star(x, p))
    }
}

/// Terminal condition of the two-point BVP.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Terminal {
    /// `p(t) = G′(x(t))`.
    Free,
    /// `x(t) = a`.
    Pinned(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BvpOptions {
    /// Newton stops when the update is below `tol` (relative to the iterate).
    pub tol: f64,
    /// Collocation degrees tried in turn until the trailing coefficients are resolved.
    pub degrees: Vec<usize>,
    pub max_newton: usize,
    pub max_halvings: usize,
}

impl Default for BvpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            degrees: vec![16, 32, 64, 128],
            max_newton: 40,
            max_halvings: 10,
        }
    }
}

/// A collocated state/costate trajectory on `[0, t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BvpSolution {
    pub t: f64,
    /// State at the Lobatto nodes, node 0 at `r = t` and the last at `r = 0`.
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    /// `∫₀ᵗ L(x, α*) dr + G(x(t))`.
    pub cost: f64,
    pub converged: bool,
    /// Largest collocation/boundary residual of the final iterate.
    pub residual: f64,
    /// Whether the trailing Chebyshev coefficients fell below tolerance.
    pub resolved: bool,
    pub degree: usize,
}

impl BvpSolution {
    fn s_of(&self, r: f64) -> f64 {
        2.0 * r / self.t - 1.0
    }

    pub fn trajectory_x(&self, r: f64) -> f64 {
        cheb::lobatto_interpolate(&self.xs, self.s_of(r))
    }

    pub fn trajectory_p(&self, r: f64) -> f64 {
        cheb::lobatto_interpolate(&self.ps, self.s_of(r))
    }

    /// `u = p(0)`.
    pub fn initial_costate(&self) -> f64 {
        *self.ps.last().expect("nonempty")
    }

    /// `x(t)`.
    pub fn terminal_state(&self) -> f64 {
        self.xs[0]
    }
}

struct Collocation<'a> {
    prob: &'a ControlProblem,
    x0: f64,
    terminal: Terminal,
    scale: f64,
    d: DMatrix<f64>,
    n: usize,
}

impl Collocation<'_> {
    fn residual(&self, z: &DVector<f64>) -> DVector<f64> {
        let m = self.n + 1;
        let xs = z.rows(0, m);
        let ps = z.rows(m, m);
        let dx = &self.d * xs;
        let dp = &self.d * ps;
        let mut r = DVector::zeros(2 * m);
        for j in 0..m {
            let (x, p) = (xs[j], ps[j]);
            r[j] = self.scale * dx[j] - self.prob.alpha_star(x, p);
            r[m + j] = self.scale * dp[j] - self.prob.costate_rate(x, p);
        }
        // x(0) = x0 replaces the state equation at r = 0
        r[m - 1] = xs[m - 1] - self.x0;
        r[m] = match self.terminal {
            Terminal::Free => ps[0] - self.prob.terminal_slope(xs[0]),
            Terminal::Pinned(a) => xs[0] - a,
        };
        r
    }

    fn jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let m = self.n + 1;
        let mut jac = DMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                let v = self.scale * self.d[(i, j)];
                jac[(i, j)] = v;
                jac[(m + i, m + j)] = v;
            }
        }
        for j in 0..m {
            let (x, p) = (z[j], z[m + j]);
            let hx = 1e-7 * (1.0 + x.abs());
            let hp = 1e-7 * (1.0 + p.abs());
            let a = |x: f64, p: f64| self.prob.alpha_star(x, p);
            let b = |x: f64, p: f64| self.prob.costate_rate(x, p);
            jac[(j, j)] -= (a(x + hx, p) - a(x - hx, p)) / (2.0 * hx);
            jac[(j, m + j)] -= (a(x, p + hp) - a(x, p - hp)) / (2.0 * hp);
            jac[(m + j, j)] -= (b(x + hx, p) - b(x - hx, p)) / (2.0 * hx);
            jac[(m + j, m + j)] -= (b(x, p + hp) - b(x, p - hp)) / (2.0 * hp);
        }
        for c in 0..2 * m {
            jac[(m - 1, c)] = 0.0;
            jac[(m, c)] = 0.0;
        }
        jac[(m - 1, m - 1)] = 1.0;
        match self.terminal {
            Terminal::Free => {
                jac[(m, m)] = 1.0;
                jac[(m, 0)] = -(self.prob.slope_derivative)(z[0]);
            }
            Terminal::Pinned(_) => jac[(m, 0)] = 1.0,
        }
        jac
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solve the PMP two-point BVP from `x` over horizon `t`, starting Newton from `guess(r) = (x(r), p(r))`.
///
/// Divergence is reported through `converged = false` rather than an error.
pub fn solve_bvp(
    prob: &ControlProblem,
    x: f64,
    t: f64,
    terminal: Terminal,
    guess: &dyn Fn(f64) -> (f64, f64),
    opts: &BvpOptions,
) -> Result<BvpSolution, BvpError> {
    if !(t > 0.0) {
        return Err(BvpError::NonPositiveTime(t));
    }
    let mut current: Box<dyn Fn(f64) -> (f64, f64) + '_> = Box::new(|r| guess(r));
    let mut last = None;
    for &n in &opts.degrees {
        let nodes = cheb::lobatto_points(n);
        let m = n + 1;
        let mut z = DVector::zeros(2 * m);
        for (j, s) in nodes.iter().enumerate() {
            let (xr, pr) = current(0.5 * (s + 1.0) * t);
            z[j] = xr;
            z[m + j] = pr;
        }
        let col = Collocation {
            prob,
            x0: x,
            terminal,
            scale: 2.0 / t,
            d: cheb::lobatto_diff_matrix(n),
            n,
        };
        let (z, converged, residual) = newton(&col, z, opts);
        let xs: Vec<f64> = z.rows(0, m).iter().copied().collect();
        let ps: Vec<f64> = z.rows(m, m).iter().copied().collect();
        let resolved = converged && tail_is_small(&xs) && tail_is_small(&ps);
        let cost = trajectory_cost(prob, &xs, &ps, t);
        let sol = BvpSolution {
            t,
            xs,
            ps,
            cost,
            converged,
            residual,
            resolved,
            degree: n,
        };
        if !converged || resolved {
            return Ok(sol);
        }
        let prev = sol.clone();
        current = Box::new(move |r| (prev.trajectory_x(r), prev.trajectory_p(r)));
        last = Some(sol);
    }
    Ok(last.expect("at least one degree"))
}

fn newton(col: &Collocation<'_>, mut z: DVector<f64>, opts: &BvpOptions) -> (DVector<f64>, bool, f64) {
    let mut r = col.residual(&z);
    let mut rnorm = max_abs(&r);
    for _ in 0..opts.max_newton {
        if !rnorm.is_finite() {
            return (z, false, rnorm);
        }
        let jac = col.jacobian(&z);
        let Some(delta) = jac.lu().solve(&(-&r)) else {
            return (z, false, rnorm);
        };
        if max_abs(&delta) <= opts.tol * (1.0 + max_abs(&z)) {
            z += &delta;
            let rnorm = max_abs(&col.residual(&z));
            return (z, true, rnorm);
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = &z + &delta * lambda;
            let rt = col.residual(&trial);
            let tn = max_abs(&rt);
            if tn.is_finite() && (tn < rnorm || tn <= 1e-13 * (1.0 + max_abs(&trial))) {
                accepted = Some((trial, rt, tn));
                break;
            }
            lambda *= 0.5;
        }
        let Some((trial, rt, tn)) = accepted else {
            return (z, false, rnorm);
        };
        let step = max_abs(&delta) * lambda;
        z = trial;
        r = rt;
        rnorm = tn;
        if lambda == 1.0 && step <= opts.tol * (1.0 + max_abs(&z)) {
            return (z, true, rnorm);
        }
    }
    (z, false, rnorm)
}

fn tail_is_small(values: &[f64]) -> bool {
    let c = cheb::coeffs_from_lobatto(values);
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let tail = (c.len() / 8).max(2);
    c[c.len() - tail..].iter().all(|v| v.abs() <= 1e-12 * scale)
}

fn trajectory_cost(prob: &ControlProblem, xs: &[f64], ps: &[f64], t: f64) -> f64 {
    let w = cheb::clenshaw_curtis_weights(xs.len() - 1);
    let running: f64 = xs
        .iter()
        .zip(ps)
        .zip(&w)
        .map(|((&x, &p), &wj)| wj * prob.lagrangian(x, prob.alpha_star(x, p)))
        .sum();
    0.5 * t * running + prob.terminal_value(xs[0])
}

/// One BVP to try: a terminal condition and a Newton starting trajectory.
pub struct BvpCandidate {
    pub terminal: Terminal,
    pub guess: Box<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
}

impl fmt::Debug for BvpCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BvpCandidate").field("terminal", &self.terminal).finish()
    }
}

/// Produces the BVPs to solve at `(x, t)`.
pub trait CandidateEnumerator: Send + Sync {
    fn candidates(&self, prob: &ControlProblem, x: f64, t: f64) -> Vec<BvpCandidate>;
}

impl<F> CandidateEnumerator for F
where
    F: Fn(&ControlProblem, f64, f64) -> Vec<BvpCandidate> + Send + Sync,
{
    fn candidates(&self, prob: &ControlProblem, x: f64, t: f64) -> Vec<BvpCandidate> {
        self(prob, x, t)
    }
}

/// Algorithm 1: solve every candidate BVP and keep the least-cost converged one.
///
/// Costs within `1e-12 (1 + |J|)` of the minimum go to the smallest `p(0)`.
pub fn minimum_value_point(
    prob: &ControlProblem,
    enumerator: &dyn CandidateEnumerator,
    x: f64,
    t: f64,
    opts: &BvpOptions,
) -> Result<SolutionSample, BvpError> {
    if t == 0.0 {
        return Ok(SolutionSample {
            x,
            t,
            u: prob.terminal().g(x),
            j: prob.terminal_value(x),
            candidate_count: 1,
            foot: x,
            branch: Branch::Initial,
        });
    }
    if t < 0.0 {
        return Err(BvpError::NonPositiveTime(t));
    }
    let cands = enumerator.candidates(prob, x, t);
    let count = cands.len();
    let mut solved = Vec::new();
    for c in cands {
        let sol = solve_bvp(prob, x, t, c.terminal, &*c.guess, opts)?;
        if sol.converged {
            solved.push((c.terminal, sol));
        }
    }
    let jmin = solved.iter().map(|(_, s)| s.cost).fold(f64::INFINITY, f64::min);
    if !jmin.is_finite() {
        return Err(BvpError::NoConvergedCandidate { x, t });
    }
    let window = jmin + 1e-12 * (1.0 + jmin.abs());
    let (terminal, best) = solved
        .iter()
        .filter(|(_, s)| s.cost <= window)
        .min_by(|a, b| a.1.initial_costate().total_cmp(&b.1.initial_costate()))
        .expect("minimum lies in its own window");
    let foot = best.terminal_state();
    let branch = match terminal {
        Terminal::Free => Branch::Characteristic(prob.terminal().region(foot)),
        Terminal::Pinned(a) => {
            let k = prob
                .terminal()
                .discontinuities()
                .iter()
                .position(|d| (d - a).abs() <= 1e-12 * (1.0 + a.abs()))
                .unwrap_or(usize::MAX);
            Branch::Fan(k)
        }
    };
    Ok(SolutionSample {
        x,
        t,
        u: best.initial_costate(),
        j: best.cost,
        candidate_count: count,
        foot,
        branch,
    })
}

/// Which closed-form condition produced a harmonic-flux terminal state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmonicBranch {
    /// `X = x sech t`, valid for `X ≥ 0` or `X ≤ −1`.
    Outer,
    /// `X = x sech t − tanh t`, valid for `−1 < X < 0`.
    Inner,
    /// `X = 0` or `X = −1`, the jumps of the box data.
    Pinned,
}

/// A terminal state for the harmonic flux `(u² − x²)/2` with box data on `[−1, 0]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicCandidate {
    pub terminal_state: f64,
    pub branch: HarmonicBranch,
    /// The branch's validity condition holds.
    pub valid: bool,
}

/// All terminal states for the harmonic example, with validity checked; duplicate
/// `X` values are merged, keeping the pinned one.
pub fn harmonic_candidates(x: f64, t: f64) -> Vec<HarmonicCandidate> {
    let outer = x / t.cosh();
    let inner = outer - t.tanh();
    let mut out = vec![
        HarmonicCandidate {
            terminal_state: 0.0,
            branch: HarmonicBranch::Pinned,
            valid: true,
        },
        HarmonicCandidate {
            terminal_state: -1.0,
            branch: HarmonicBranch::Pinned,
            valid: true,
        },
    ];
    for c in [
        HarmonicCandidate {
            terminal_state: outer,
            branch: HarmonicBranch::Outer,
            valid: outer >= 0.0 || outer <= -1.0,
        },
        HarmonicCandidate {
            terminal_state: inner,
            branch: HarmonicBranch::Inner,
            valid: inner > -1.0 && inner < 0.0,
        },
    ] {
        if !out.iter().any(|o| (o.terminal_state - c.terminal_state).abs() <= 1e-12) {
            out.push(c);
        }
    }
    out
}

/// `G` for the box data `1` on `[−1, 0]`: a continuous ramp, zero left of −1.
pub fn harmonic_terminal_value(x: f64) -> f64 {
    x.clamp(-1.0, 0.0) + 1.0
}

/// Closed-form cost `(x² + X²)/2 · coth t − xX csch t + G(X)`.
pub fn harmonic_cost(x: f64, t: f64, terminal_state: f64) -> f64 {
    let xx = terminal_state;
    0.5 * (x * x + xx * xx) / t.tanh() - x * xx / t.sinh() + harmonic_terminal_value(xx)
}

/// The constant `C` in `x(r) = (x − C)e^{−r} + C e^{r}` reaching `X` at `r = t`.
pub fn harmonic_c(x: f64, t: f64, terminal_state: f64) -> f64 {
    (terminal_state - x * (-t).exp()) / (2.0 * t.sinh())
}

/// `(x(r), p(r))` on the closed-form trajectory from `x` to `X`.
pub fn harmonic_trajectory(x: f64, t: f64, terminal_state: f64, r: f64) -> (f64, f64) {
    let c = harmonic_c(x, t, terminal_state);
    ((x - c) * (-r).exp() + c * r.exp(), (x - c) * (-r).exp() - c * r.exp())
}

/// Closed-form minimum value solution `(u, w)` for the harmonic example.
pub fn harmonic_closed_form(x: f64, t: f64) -> (f64, f64) {
    let mut best: Option<(f64, f64)> = None;
    for c in harmonic_candidates(x, t).into_iter().filter(|c| c.valid) {
        let j = harmonic_cost(x, t, c.terminal_state);
        let u = harmonic_trajectory(x, t, c.terminal_state, 0.0).1;
        best = match best {
            Some((bu, bj)) if bj <= j + 1e-12 * (1.0 + j.abs()) && (bj < j - 1e-12 * (1.0 + j.abs()) || bu <= u) => {
                Some((bu, bj))
            }
            _ => Some((u, j)),
        };
    }
    best.expect("pinned candidates are always valid")
}

/// Enumerator for the harmonic example: one pinned or free BVP per valid closed-form `X`.
pub fn harmonic_enumerator(_prob: &ControlProblem, x: f64, t: f64) -> Vec<BvpCandidate> {
    harmonic_candidates(x, t)
        .into_iter()
        .filter(|c| c.valid)
        .map(|c| {
            let xx = c.terminal_state;
            BvpCandidate {
                terminal: match c.branch {
                    HarmonicBranch::Pinned => Terminal::Pinned(xx),
                    _ => Terminal::Free,
                },
                guess: Box::new(move |r| harmonic_trajectory(x, t, xx, r)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_problem() -> ControlProblem {
        let g = PiecewiseFunction::constant(0.0, -5.0, 5.0).unwrap();
        ControlProblem::new(
            |x, p, a| p * a + 0.5 * (x * x + a * a),
            |x, _, _| x,
            |_, p| -p,
            |x, a| 0.5 * (x * x + a * a),
            InitialData::new(g),
            1.0,
        )
    }

    #[test]
    fn trivial_trajectory_at_origin() {
        let prob = linear_problem();
        let sol = solve_bvp(&prob, 0.0, 1.0, Terminal::Free, &|_| (0.3, -0.2), &BvpOptions::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.xs.iter().chain(&sol.ps).all(|v| v.abs() < 1e-12));
        assert!(sol.cost.abs() < 1e-14);
    }

    #[test]
    fn pinned_linear_matches_closed_form() {
        let prob = linear_problem();
        let (x, t, xx) = (0.4f64, 0.8f64, -0.3f64);
        let sol = solve_bvp(&prob, x, t, Terminal::Pinned(xx), &|r| (x - r, 0.0), &BvpOptions::default()).unwrap();
        assert!(sol.converged && sol.resolved);
        for r in [0.0, 0.13, 0.5, 0.8] {
            let (ex, ep) = harmonic_trajectory(x, t, xx, r);
            assert!((sol.trajectory_x(r) - ex).abs() < 1e-10);
            assert!((sol.trajectory_p(r) - ep).abs() < 1e-10);
        }
    }

    #[test]
    fn candidates_at_origin() {
        let c = harmonic_candidates(0.0, 1.0);
        let xs: Vec<f64> = c.iter().filter(|c| c.valid).map(|c| c.terminal_state).collect();
        assert_eq!(xs.len(), 3);
        assert!(xs.contains(&0.0) && xs.contains(&-1.0));
        assert!(xs.iter().any(|&v| (v + 1f64.tanh()).abs() < 1e-15));
    }

    #[test]
    fn candidates_validity() {
        let right = harmonic_candidates(3.0, 0.5);
        let outer = right.iter().find(|c| c.branch == HarmonicBranch::Outer).unwrap();
        assert!(outer.valid && (outer.terminal_state - 3.0 / 0.5f64.cosh()).abs() < 1e-15);
        let left = harmonic_candidates(-3.0, 0.5);
        assert!(left.iter().find(|c| c.branch == HarmonicBranch::Outer).unwrap().valid);
        assert!(!left.iter().find(|c| c.branch == HarmonicBranch::Inner).unwrap().valid);
    }

    #[test]
    fn outer_branch_costate() {
        // P = x csch t − X coth t vanishes on the outer branch, and p(0) = x tanh t
        let (x, t) = (-5.0f64, 0.5f64);
        let xx = x / t.cosh();
        assert!((x / t.sinh() - xx / t.tanh()).abs() < 1e-14);
        let (u, _) = harmonic_closed_form(x, t);
        assert!((u - x * t.tanh()).abs() < 1e-13);
        let (u, _) = harmonic_closed_form(10.0, 0.1);
        assert!((u - 10.0 * 0.1f64.tanh()).abs() < 1e-12);
    }
}
