//! Convex flux functions and Legendre–Fenchel duality.

use std::fmt;
use std::sync::Arc;

use crate::funcapprox::{approximate, ApproxError, ApproxOptions, PiecewiseFunction};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

// Low per-piece degree with many pieces: algebraic endpoint singularities
// (e.g. |p|^{3/2}) are resolved by bisection rather than by huge degrees.
const SPLIT_OPTS: ApproxOptions = ApproxOptions {
    rel_tol: 1e-13,
    max_degree: 256,
    max_pieces: 400,
};

/// A space-independent convex flux `F` with its derivative and a costate search interval.
#[derive(Clone)]
pub struct ConvexFlux {
    f: RealFn,
    fprime: RealFn,
    lagrangian: Option<RealFn>,
    p_domain: (f64, f64),
    smoothness_hints: Vec<f64>,
}

impl fmt::Debug for ConvexFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFlux")
            .field("p_domain", &self.p_domain)
            .field("smoothness_hints", &self.smoothness_hints)
            .field("closed_form_lagrangian", &self.lagrangian.is_some())
            .finish()
    }
}

impl ConvexFlux {
    pub fn new<F, D>(f: F, fprime: D, p_domain: (f64, f64)) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            fprime: Arc::new(fprime),
            lagrangian: None,
            p_domain,
            smoothness_hints: Vec::new(),
        }
    }

    /// Points where `F′` is not smooth.
    pub fn with_hints(mut self, hints: Vec<f64>) -> Self {
        self.smoothness_hints = hints;
        self
    }

    /// Closed-form `L = (F∘(−1))*`, used instead of a numerical transform.
    pub fn with_lagrangian<L>(mut self, l: L) -> Self
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.lagrangian = Some(Arc::new(l));
        self
    }

    pub fn f(&self, p: f64) -> f64 {
        (self.f)(p)
    }

    pub fn fprime(&self, p: f64) -> f64 {
        (self.fprime)(p)
    }

    pub fn p_domain(&self) -> (f64, f64) {
        self.p_domain
    }

    pub fn smoothness_hints(&self) -> &[f64] {
        &self.smoothness_hints
    }

    pub fn has_closed_form_lagrangian(&self) -> bool {
        self.lagrangian.is_some()
    }

    /// `L(α)`, from the closed form if one was supplied, otherwise numerically.
    pub fn lagrangian(&self, alpha: f64) -> Result<f64, ApproxError> {
        if let Some(l) = &self.lagrangian {
            return Ok(l(alpha));
        }
        let (lo, hi) = self.p_domain;
        let hints: Vec<f64> = self.smoothness_hints.iter().map(|h| -h).collect();
        let reflected = |lam: f64| self.f(-lam);
        Ok(widening_transform(&reflected, alpha, (-hi, -lo), &hints)?.value)
    }

    /// `F*(q)` with the default widening search policy.
    pub fn conjugate(&self, q: f64) -> Result<Transform, ApproxError> {
        widening_transform(&|p| self.f(p), q, self.p_domain, &self.smoothness_hints)
    }

    /// Sampled checks of convexity, monotone `F′` and `F′` consistency with `F`.
    pub fn validate(&self, samples: usize) -> Vec<String> {
        let (lo, hi) = self.p_domain;
        let n = samples.max(3);
        let ps: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let mut problems = Vec::new();
        for w in ps.windows(3) {
            let mid = self.f(w[1]);
            let avg = 0.5 * (self.f(w[0]) + self.f(w[2]));
            if mid > avg + 1e-10 * (1.0 + avg.abs()) {
                problems.push(format!("convexity fails near p = {}", w[1]));
            }
        }
        for w in ps.windows(2) {
            if self.fprime(w[1]) < self.fprime(w[0]) - 1e-12 * (1.0 + self.fprime(w[0]).abs()) {
                problems.push(format!("F′ decreases on [{}, {}]", w[0], w[1]));
            }
        }
        let h = 1e-6 * (hi - lo).max(1.0);
        for &p in &ps[1..n - 1] {
            if self.smoothness_hints.iter().any(|s| (s - p).abs() < 2.0 * h) {
                continue;
            }
            let fd = (self.f(p + h) - self.f(p - h)) / (2.0 * h);
            if (fd - self.fprime(p)).abs() > 1e-6 * (1.0 + fd.abs()) {
                problems.push(format!("F′ inconsistent with F at p = {p}"));
            }
        }
        problems
    }
}

/// Value and maximizer of a Legendre transform evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transform {
    pub value: f64,
    pub argmax: f64,
    /// The maximizer sits on the search boundary, so the true supremum may be larger.
    pub at_boundary: bool,
}

/// `sup_p { p q − F(p) }` over `search`, by approximating and maximizing `p q − F(p)`.
pub fn legendre_transform<F>(f: &F, q: f64, search: (f64, f64), hints: &[f64]) -> Result<Transform, ApproxError>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let (lo, hi) = search;
    let g = approximate(|p| p * q - f(p), lo, hi, hints, &SPLIT_OPTS)?;
    let e = g.extrema();
    let edge = 1e-9 * (hi - lo);
    Ok(Transform {
        value: e.max,
        argmax: e.argmax,
        at_boundary: e.argmax - lo <= edge || hi - e.argmax <= edge,
    })
}

/// Search `domain` widened by 50 %, then doubled (up to three times) while the maximizer is on the boundary.
pub fn widening_transform<F>(f: &F, q: f64, domain: (f64, f64), hints: &[f64]) -> Result<Transform, ApproxError>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let centre = 0.5 * (domain.0 + domain.1);
    let mut half = 0.75 * (domain.1 - domain.0);
    let mut out = legendre_transform(f, q, (centre - half, centre + half), hints)?;
    for _ in 0..3 {
        if !out.at_boundary {
            break;
        }
        half *= 2.0;
        out = legendre_transform(f, q, (centre - half, centre + half), hints)?;
    }
    Ok(out)
}

/// `L(−F′(p)) = p F′(p) − F(p)`.
pub fn lagrangian_along_optimal(flux: &ConvexFlux, p: f64) -> f64 {
    p * flux.fprime(p) - flux.f(p)
}

/// Outcome of [`check_duality`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualityReport {
    pub max_deviation: f64,
    pub worst_p: f64,
    pub samples: usize,
}

/// Largest `|F(p) − (F*)*(p)|` over `samples` equispaced points of the flux's `p_domain`.
///
/// `F*` is itself approximated piecewise on `[F′(lo), F′(hi)]`, then transformed again.
pub fn check_duality(flux: &ConvexFlux, samples: usize) -> Result<DualityReport, ApproxError> {
    let (lo, hi) = flux.p_domain();
    let (qlo, qhi) = (flux.fprime(lo), flux.fprime(hi));
    let margin = 0.05 * (qhi - qlo).abs().max(1e-3);
    let (qlo, qhi) = (qlo - margin, qhi + margin);
    let mut q_hints: Vec<f64> = flux.smoothness_hints().iter().map(|&h| flux.fprime(h)).collect();
    // F* loses smoothness where F′ is flat or has vanishing curvature; add F′ at argmin F.
    let argmin = approximate(|p| flux.f(p), lo, hi, flux.smoothness_hints(), &SPLIT_OPTS)?
        .extrema()
        .argmin;
    q_hints.push(flux.fprime(argmin));
    let conj = |q: f64| flux.conjugate(q).map(|t| t.value).unwrap_or(f64::NAN);
    let opts = ApproxOptions {
        rel_tol: 1e-11,
        ..SPLIT_OPTS
    };
    let fstar: PiecewiseFunction = approximate(conj, qlo, qhi, &q_hints, &opts)?;
    let n = samples.max(2);
    let mut report = DualityReport {
        max_deviation: 0.0,
        worst_p: lo,
        samples: n,
    };
    for i in 0..n {
        let p = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let g = approximate(
            |q| p * q - fstar.evaluate(q).unwrap_or(f64::NAN),
            qlo,
            qhi,
            fstar.breakpoints(),
            &opts,
        )?;
        let dev = (flux.f(p) - g.range().1).abs();
        if dev > report.max_deviation {
            report.max_deviation = dev;
            report.worst_p = p;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn burgers() -> ConvexFlux {
        ConvexFlux::new(|p| 0.5 * p * p, |p| p, (-2.0, 2.0))
    }

    #[test]
    fn quadratic_is_self_dual() {
        let f = |p: f64| 0.5 * p * p;
        let t = legendre_transform(&f, 3.0, (-10.0, 10.0), &[]).unwrap();
        assert!((t.value - 4.5).abs() < 1e-12);
        assert!((t.argmax - 3.0).abs() < 1e-8);
        assert!(!t.at_boundary);
        let t0 = legendre_transform(&f, 0.0, (-10.0, 10.0), &[]).unwrap();
        assert!(t0.value.abs() < 1e-13);
    }

    #[test]
    fn boundary_maximizer_is_flagged() {
        let f = |p: f64| 0.5 * p * p;
        let t = legendre_transform(&f, 5.0, (-1.0, 1.0), &[]).unwrap();
        assert!(t.at_boundary);
        let w = widening_transform(&f, 5.0, (-1.0, 1.0), &[]).unwrap();
        assert!(!w.at_boundary);
        assert!((w.value - 12.5).abs() < 1e-11);
    }

    #[test]
    fn lwr_lagrangian_at_one() {
        // F(p) = (1 + p) p, reflected: L(α) = (α + 1)² / 4
        let lwr = ConvexFlux::new(|p| (1.0 + p) * p, |p| 1.0 + 2.0 * p, (-2.0, 1.0));
        assert!((lwr.lagrangian(1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lagrangian_identity_values() {
        let b = burgers();
        assert_eq!(lagrangian_along_optimal(&b, 1.0), 0.5);
        assert_eq!(lagrangian_along_optimal(&b, 2.0), 2.0);
        assert_eq!(lagrangian_along_optimal(&b, 0.0), 0.0);
    }

    #[test]
    fn quadratic_duality_gate() {
        let r = check_duality(&burgers(), 41).unwrap();
        assert!(r.max_deviation <= 1e-8, "{r:?}");
    }

    #[test]
    fn validate_flags_concave() {
        let bad = ConvexFlux::new(|p| -p * p, |p| -2.0 * p, (-1.0, 1.0));
        assert!(!bad.validate(20).is_empty());
        assert!(burgers().validate(20).is_empty());
    }
}
