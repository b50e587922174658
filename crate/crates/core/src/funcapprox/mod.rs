//! Piecewise Chebyshev function engine.
//!
//! A [`PiecewiseFunction`] stores one Chebyshev series per subinterval. Pieces
//! are built adaptively from samples at first-kind Chebyshev points, so a
//! function may jump (or be undefined) exactly at a breakpoint. Evaluation at
//! an interior breakpoint returns the right-piece value.

pub mod cheb;
pub mod hqr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("approximation did not converge (worst piece residual {residual:e} on [{lo}, {hi}])")]
    NonConvergence { residual: f64, lo: f64, hi: f64 },
    #[error("function returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("x = {x} outside domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },
    #[error("malformed piecewise function: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, ApproxError>;

/// Knobs for [`approximate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxOptions {
    /// Relative accuracy target per piece.
    pub rel_tol: f64,
    /// Largest number of samples per piece before it is bisected.
    pub max_degree: usize,
    /// Cap on the total number of pieces produced by bisection.
    pub max_pieces: usize,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            max_degree: 1 << 13,
            max_pieces: 64,
        }
    }
}

/// Knobs for [`PiecewiseFunction::roots_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOptions {
    /// Absolute tolerance for accepting and deduplicating roots.
    pub root_tol: f64,
    /// Complex eigenvalues with `|imag| <= imag_tol * width` are kept.
    pub imag_tol: f64,
    /// Pieces of higher degree are subdivided before the eigenvalue solve.
    pub max_sub_degree: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            root_tol: 1e-12,
            imag_tol: 1e-10,
            max_sub_degree: 50,
        }
    }
}

// Off-centre split point (reference coordinates) so that symmetric problems
// don't place a root exactly on a subdivision boundary.
const ROOT_SPLIT: f64 = -0.004849834917525;

// Relative size below which trailing coefficients are dropped before the eigenvalue solve.
const EIG_CHOP: f64 = 1e-13;

/// Adaptive piecewise-polynomial representation of a real function on an interval.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFunction {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
    tolerance: f64,
}

impl PiecewiseFunction {
    /// Build from explicit breakpoints and per-piece Chebyshev coefficients.
    pub fn from_pieces(breakpoints: Vec<f64>, pieces: Vec<Vec<f64>>, tolerance: f64) -> Result<Self> {
        if breakpoints.len() < 2 || pieces.len() + 1 != breakpoints.len() {
            return Err(ApproxError::Malformed(format!(
                "{} breakpoints for {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ApproxError::Malformed("breakpoints not strictly increasing".into()));
        }
        if pieces.iter().any(|c| c.is_empty()) {
            return Err(ApproxError::Malformed("empty piece".into()));
        }
        Ok(Self {
            breakpoints,
            pieces,
            tolerance,
        })
    }

    /// The constant function `value` on `[lo, hi]`.
    pub fn constant(value: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(ApproxError::InvalidInterval { lo, hi });
        }
        Self::from_pieces(vec![lo, hi], vec![vec![value]], 0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// Polynomial degree of piece `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.pieces[i].len() - 1
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Upper bound on `max |f|` (sum of absolute coefficients), over all pieces.
    pub fn vscale(&self) -> f64 {
        self.pieces.iter().map(|c| piece_scale(c)).fold(0.0, f64::max)
    }

    fn to_ref(&self, i: usize, x: f64) -> f64 {
        let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
        (2.0 * x - a - b) / (b - a)
    }

    fn from_ref(&self, i: usize, s: f64) -> f64 {
        let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
        a + (s + 1.0) * 0.5 * (b - a)
    }

    /// Index of the piece containing `x` (right piece at interior breakpoints).
    pub fn piece_index(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let k = self.pieces.len();
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        Some(idx.saturating_sub(1).min(k - 1))
    }

    /// Value of the containing piece at `x`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let i = self.piece_index(x).ok_or_else(|| {
            let (lo, hi) = self.domain();
            ApproxError::Domain { x, lo, hi }
        })?;
        Ok(self.eval_piece(i, x))
    }

    /// Evaluate piece `i` (extrapolating if `x` lies outside it).
    pub fn eval_piece(&self, i: usize, x: f64) -> f64 {
        cheb::clenshaw(&self.pieces[i], self.to_ref(i, x))
    }

    /// Left limit at breakpoint `k` (value of piece `k - 1` at its right end).
    pub fn left_value(&self, k: usize) -> f64 {
        cheb::value_at_right(&self.pieces[k - 1])
    }

    /// Right limit at breakpoint `k` (value of piece `k` at its left end).
    pub fn right_value(&self, k: usize) -> f64 {
        cheb::value_at_left(&self.pieces[k])
    }

    /// Value at the left end of the domain.
    pub fn first_value(&self) -> f64 {
        self.right_value(0)
    }

    /// Value at the right end of the domain (left limit).
    pub fn last_value(&self) -> f64 {
        self.left_value(self.pieces.len())
    }

    /// Pointwise derivative, piece by piece.
    pub fn derivative(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let scale = 2.0 / (self.breakpoints[i + 1] - self.breakpoints[i]);
                cheb::derivative(c).into_iter().map(|d| d * scale).collect()
            })
            .collect();
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces,
            tolerance: self.tolerance,
        }
    }

    /// Continuous antiderivative, zero at the left endpoint.
    pub fn antiderivative(&self) -> Self {
        let mut offset = 0.0;
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let half = 0.5 * (self.breakpoints[i + 1] - self.breakpoints[i]);
                let mut ic: Vec<f64> = cheb::integral(c).into_iter().map(|v| v * half).collect();
                ic[0] += offset;
                offset = cheb::value_at_right(&ic);
                ic
            })
            .collect();
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces,
            tolerance: self.tolerance,
        }
    }

    /// Integral over the whole domain.
    pub fn integral(&self) -> f64 {
        self.antiderivative().last_value()
    }

    /// Global minimum and maximum.
    pub fn range(&self) -> (f64, f64) {
        let e = self.extrema();
        (e.min, e.max)
    }

    /// Global extrema with their locations, from interior critical points,
    /// piece endpoints and both one-sided breakpoint values.
    pub fn extrema(&self) -> Extrema {
        let mut best = Extrema {
            min: f64::INFINITY,
            argmin: self.breakpoints[0],
            max: f64::NEG_INFINITY,
            argmax: self.breakpoints[0],
        };
        let mut consider = |x: f64, v: f64| {
            if v < best.min {
                best.min = v;
                best.argmin = x;
            }
            if v > best.max {
                best.max = v;
                best.argmax = x;
            }
        };
        let opts = RootOptions::default();
        for (i, c) in self.pieces.iter().enumerate() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            consider(a, cheb::value_at_left(c));
            consider(b, cheb::value_at_right(c));
            if c.len() > 2 {
                let d = cheb::derivative(c);
                for s in piece_roots(&d, &opts, 0.0, b - a) {
                    consider(a + (s + 1.0) * 0.5 * (b - a), cheb::clenshaw(c, s));
                }
            }
        }
        best
    }

    /// Interior breakpoints where the one-sided values differ by more than `threshold`.
    pub fn jumps(&self, threshold: f64) -> Vec<f64> {
        (1..self.pieces.len())
            .filter(|&k| (self.right_value(k) - self.left_value(k)).abs() > threshold)
            .map(|k| self.breakpoints[k])
            .collect()
    }

    /// All real roots with default options.
    pub fn roots(&self) -> Vec<f64> {
        self.roots_with(&RootOptions::default())
    }

    /// All real roots of every piece within its subinterval, sorted and deduplicated.
    pub fn roots_with(&self, opts: &RootOptions) -> Vec<f64> {
        self.roots_of_value(0.0, opts)
    }

    /// Roots of `f(x) - level`.
    pub fn roots_of_value(&self, level: f64, opts: &RootOptions) -> Vec<f64> {
        let zero_scale = self.vscale().max(level.abs());
        let mut out = Vec::new();
        for (i, c) in self.pieces.iter().enumerate() {
            let width = self.breakpoints[i + 1] - self.breakpoints[i];
            let mut shifted = c.clone();
            shifted[0] -= level;
            if shifted.iter().all(|v| v.abs() <= 1e-14 * zero_scale) {
                // identically zero: the root set is the whole piece
                out.extend([-1.0, 0.0, 1.0].map(|s| self.from_ref(i, s)));
                continue;
            }
            out.extend(
                piece_roots(&shifted, opts, zero_scale, width)
                    .into_iter()
                    .map(|s| self.from_ref(i, s)),
            );
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|b, a| (*b - *a).abs() <= opts.root_tol);
        out
    }

    /// Map values through `op` piece by piece on the coefficients (affine ops only).
    pub fn scale_shift(&self, scale: f64, shift: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|c| {
                let mut d: Vec<f64> = c.iter().map(|v| v * scale).collect();
                d[0] += shift;
                d
            })
            .collect();
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces,
            tolerance: self.tolerance,
        }
    }
}

/// Result of [`PiecewiseFunction::extrema`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
    pub argmax: f64,
}

fn piece_scale(c: &[f64]) -> f64 {
    c.iter().map(|v| v.abs()).sum()
}

/// Roots of one Chebyshev series in reference coordinates, within [-1, 1].
fn piece_roots(coeffs: &[f64], opts: &RootOptions, zero_scale: f64, width: f64) -> Vec<f64> {
    let scale = piece_scale(coeffs).max(zero_scale);
    let mut c = coeffs.to_vec();
    cheb::chop(&mut c, 4.0 * f64::EPSILON * scale);
    if c.len() <= 1 {
        return Vec::new();
    }
    let tol_ref = 2.0 * opts.root_tol / width;
    if c.len() - 1 > opts.max_sub_degree {
        let mut out = Vec::new();
        for (lo, hi) in [(-1.0, ROOT_SPLIT), (ROOT_SPLIT, 1.0)] {
            let mut sub = cheb::restrict(&c, lo, hi);
            cheb::chop(&mut sub, 4.0 * f64::EPSILON * scale);
            let sub_width = width * (hi - lo) * 0.5;
            out.extend(
                piece_roots(&sub, opts, scale, sub_width)
                    .into_iter()
                    .map(|s| lo + (s + 1.0) * 0.5 * (hi - lo)),
            );
        }
        return out;
    }
    // A roundoff-sized leading coefficient blows up the colleague matrix, so
    // eigenvalues come from a truncated series and are polished on the full one.
    let mut c_eig = c.clone();
    cheb::chop(&mut c_eig, EIG_CHOP * scale);
    if c_eig.len() <= 1 {
        return Vec::new();
    }
    let imag_tol = 2.0 * opts.imag_tol;
    let Some(eigs) = cheb::colleague_roots(&c_eig, imag_tol) else {
        // QR failed; fall back to subdividing once more
        let mut out = Vec::new();
        for (lo, hi) in [(-1.0, ROOT_SPLIT), (ROOT_SPLIT, 1.0)] {
            let sub = cheb::restrict(&c, lo, hi);
            let sub_opts = RootOptions {
                max_sub_degree: (c.len() / 2).max(1),
                ..*opts
            };
            out.extend(
                piece_roots(&sub, &sub_opts, scale, width * (hi - lo) * 0.5)
                    .into_iter()
                    .map(|s| lo + (s + 1.0) * 0.5 * (hi - lo)),
            );
        }
        return out;
    };
    let d = cheb::derivative(&c);
    let slack = tol_ref.max(1e-8);
    eigs.into_iter()
        .filter(|r| *r >= -1.0 - slack && *r <= 1.0 + slack)
        .filter_map(|r| {
            let mut r = r.clamp(-1.0, 1.0);
            for _ in 0..8 {
                let f = cheb::clenshaw(&c, r);
                let fp = cheb::clenshaw(&d, r);
                if fp == 0.0 || !fp.is_finite() {
                    break;
                }
                let step = f / fp;
                if !(step.abs() < 1e-4) {
                    break;
                }
                let next = r - step;
                if next < -1.0 - tol_ref || next > 1.0 + tol_ref {
                    // the polished root left the piece
                    return None;
                }
                r = next.clamp(-1.0, 1.0);
                if step.abs() <= f64::EPSILON {
                    break;
                }
            }
            Some(r)
        })
        .collect()
}

/// Adaptive piecewise approximation of `f` on `[lo, hi]`, split at `hints`.
///
/// Each piece doubles its sample count until the trailing Chebyshev
/// coefficients fall below `rel_tol` times the vertical scale (the larger of the
/// piece's and the whole function's) and a few
/// off-grid checks agree; past `max_degree` the piece is bisected.
pub fn approximate<F>(f: F, lo: f64, hi: f64, hints: &[f64], opts: &ApproxOptions) -> Result<PiecewiseFunction>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(ApproxError::InvalidInterval { lo, hi });
    }
    let min_gap = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = hints
        .iter()
        .copied()
        .filter(|h| h.is_finite() && *h > lo && *h < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    for h in inner.into_iter().chain(std::iter::once(hi)) {
        let last = *edges.last().unwrap();
        if h - last > min_gap {
            edges.push(h);
        } else if h == hi {
            *edges.last_mut().unwrap() = hi;
        }
    }
    if edges.len() < 2 {
        return Err(ApproxError::InvalidInterval { lo, hi });
    }

    // Vertical scale of the whole function, so that pieces next to a
    // singularity converge in absolute rather than purely local terms.
    let mut vscale = 0.0f64;
    for w in edges.windows(2) {
        for s in cheb::first_kind_points(17) {
            let v = f(w[0] + (s + 1.0) * 0.5 * (w[1] - w[0]));
            if v.is_finite() {
                vscale = vscale.max(v.abs());
            }
        }
    }
    let mut b = Builder {
        f: &f,
        opts,
        budget: opts.max_pieces.max(edges.len() - 1),
        vscale,
        breakpoints: vec![edges[0]],
        pieces: Vec::new(),
    };
    for w in edges.windows(2) {
        b.budget -= 1;
        b.span(w[0], w[1])?;
    }
    PiecewiseFunction::from_pieces(b.breakpoints, b.pieces, opts.rel_tol)
}

struct Builder<'a, F> {
    f: &'a F,
    opts: &'a ApproxOptions,
    budget: usize,
    vscale: f64,
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
}

// Fixed off-grid check locations in reference coordinates.
const CHECK_POINTS: [f64; 4] = [-0.8731912, -0.2917310, 0.3370124, 0.9137661];

impl<F> Builder<'_, F>
where
    F: Fn(f64) -> f64,
{
    fn span(&mut self, a: f64, b: f64) -> Result<()> {
        match self.fit(a, b)? {
            Ok(coeffs) => {
                self.breakpoints.push(b);
                self.pieces.push(coeffs);
                Ok(())
            }
            Err(residual) => {
                let mid = 0.5 * (a + b);
                if self.budget == 0 || !(mid > a && mid < b) {
                    return Err(ApproxError::NonConvergence { residual, lo: a, hi: b });
                }
                self.budget -= 1;
                self.span(a, mid)?;
                self.span(mid, b)
            }
        }
    }

    /// Inner result is `Err(residual)` if the degree cap was hit.
    fn fit(&mut self, a: f64, b: f64) -> Result<std::result::Result<Vec<f64>, f64>> {
        let f = self.f;
        let opts = self.opts;
        let map = |s: f64| a + (s + 1.0) * 0.5 * (b - a);
        let mut n = 16usize;
        let mut residual = f64::INFINITY;
        while n <= opts.max_degree.max(16) {
            let pts = cheb::first_kind_points(n);
            let mut values = Vec::with_capacity(n);
            for s in &pts {
                let x = map(*s);
                let v = f(x);
                if !v.is_finite() {
                    return Err(ApproxError::NonFinite { x });
                }
                values.push(v);
            }
            let coeffs = cheb::coeffs_from_first_kind(&values);
            let vmax = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let cmax = coeffs.iter().map(|v| v.abs()).fold(0.0, f64::max);
            self.vscale = self.vscale.max(vmax);
            let local = vmax.max(cmax);
            let scale = local.max(self.vscale);
            let tail = (n / 8).max(2);
            let tail_max = coeffs[n - tail..].iter().map(|v| v.abs()).fold(0.0, f64::max);
            residual = if scale > 0.0 { tail_max / scale } else { 0.0 };
            if tail_max <= opts.rel_tol * scale {
                let mut c = coeffs;
                cheb::chop(&mut c, (0.01 * opts.rel_tol).max(f64::EPSILON) * scale);
                let checks_ok = CHECK_POINTS.iter().all(|&s| {
                    let exact = f(map(s));
                    let approx = cheb::clenshaw(&c, s);
                    (exact - approx).abs() <= 100.0 * opts.rel_tol * scale.max(exact.abs())
                });
                if checks_ok {
                    return Ok(Ok(c));
                }
            }
            n *= 2;
        }
        Ok(Err(residual))
    }
}
