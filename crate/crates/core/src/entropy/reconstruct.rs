//! Piecewise approximation of `x ↦ u(x, t)` built from a pointwise solver.
//!
//! A uniform scan flags cells where the solution family changes or where the
//! jump in `u` or in the characteristic foot stands out from its neighbours.
//! Each flagged cell is bisected down to `locate_tol`; the located points
//! become breakpoint hints for [`approximate`].

use rayon::prelude::*;
use thiserror::Error;

use crate::funcapprox::{approximate, ApproxError, ApproxOptions, PiecewiseFunction};

/// What the pointwise solver reports at one `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe<L> {
    pub u: f64,
    /// Where the optimal trajectory starts (or ends), used to spot foot jumps.
    pub foot: f64,
    /// Solution family; a change between neighbours marks a kink or a shock.
    pub label: L,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructOptions {
    /// Uniform scan points.
    pub samples: usize,
    /// Relative width at which bisection stops.
    pub locate_tol: f64,
    /// One-sided values further apart than this make a shock.
    pub jump_tol: f64,
    pub approx: ApproxOptions,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            samples: 2001,
            locate_tol: 1e-13,
            jump_tol: 1e-8,
            approx: ApproxOptions {
                rel_tol: 1e-11,
                max_degree: 1024,
                max_pieces: 4096,
            },
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconstructError<E> {
    #[error("pointwise solver failed at x = {x}: {source}")]
    Solver { x: f64, source: E },
    #[error(transparent)]
    Approx(#[from] ApproxError),
}

/// A discontinuity of the reconstructed solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shock {
    pub x: f64,
    pub u_left: f64,
    pub u_right: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub u: PiecewiseFunction,
    pub shocks: Vec<Shock>,
    /// Located points where `u` is continuous but the solution family changes.
    pub kinks: Vec<f64>,
}

/// Reconstruct `u` on `[lo, hi]` from `sampler`.
pub fn reconstruct<L, E, S>(
    sampler: S,
    lo: f64,
    hi: f64,
    opts: &ReconstructOptions,
) -> Result<Reconstruction, ReconstructError<E>>
where
    L: PartialEq + Copy + Send + Sync,
    E: Send,
    S: Fn(f64) -> Result<Probe<L>, E> + Sync,
{
    let probe = |x: f64| sampler(x).map_err(|source| ReconstructError::Solver { x, source });
    let n = opts.samples.max(3);
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let probes: Vec<Probe<L>> = xs.par_iter().map(|&x| probe(x)).collect::<Result<_, _>>()?;

    let du: Vec<f64> = probes.windows(2).map(|w| (w[1].u - w[0].u).abs()).collect();
    let df: Vec<f64> = probes.windows(2).map(|w| (w[1].foot - w[0].foot).abs()).collect();
    let u_scale = probes.iter().map(|p| p.u.abs()).fold(1e-300, f64::max);
    let f_scale = probes.iter().map(|p| p.foot.abs()).fold(1.0, f64::max);
    let stands_out = |d: &[f64], i: usize, floor: f64| {
        let left = if i > 0 { d[i - 1] } else { 0.0 };
        let right = if i + 1 < d.len() { d[i + 1] } else { 0.0 };
        d[i] > 3.0 * left.max(right) + floor
    };
    let flagged: Vec<usize> = (0..n - 1)
        .filter(|&i| {
            probes[i].label != probes[i + 1].label
                || stands_out(&du, i, 1e-10 * u_scale)
                || stands_out(&df, i, 1e-10 * f_scale)
        })
        .collect();

    let located: Vec<Option<Feature>> = flagged
        .par_iter()
        .map(|&i| locate(&probe, xs[i], probes[i], xs[i + 1], probes[i + 1], opts))
        .collect::<Result<_, _>>()?;
    // a feature on a scan point is found from both neighbouring cells
    let mut features: Vec<Feature> = Vec::new();
    let merge = 1e3 * opts.locate_tol * lo.abs().max(hi.abs()).max(1.0);
    for f in located.into_iter().flatten() {
        match features.last_mut() {
            Some(prev) if f.x - prev.x <= merge => prev.jump |= f.jump,
            _ => features.push(f),
        }
    }
    let hints: Vec<f64> = features.iter().map(|f| f.x).collect();
    let kinks: Vec<f64> = features.iter().filter(|f| !f.jump).map(|f| f.x).collect();

    let u = approximate(
        |x| sampler(x).map(|p| p.u).unwrap_or(f64::NAN),
        lo,
        hi,
        &hints,
        &opts.approx,
    )?;
    let shocks = (1..u.num_pieces())
        .filter_map(|k| {
            let (ul, ur) = (u.left_value(k), u.right_value(k));
            ((ur - ul).abs() > opts.jump_tol).then(|| Shock {
                x: u.breakpoints()[k],
                u_left: ul,
                u_right: ur,
            })
        })
        .collect();
    Ok(Reconstruction { u, shocks, kinks })
}

struct Feature {
    x: f64,
    jump: bool,
}

fn locate<L, E, P>(
    probe: &P,
    mut a: f64,
    mut pa: Probe<L>,
    mut b: f64,
    mut pb: Probe<L>,
    opts: &ReconstructOptions,
) -> Result<Option<Feature>, E>
where
    L: PartialEq + Copy,
    P: Fn(f64) -> Result<Probe<L>, E>,
{
    let gap = |p: &Probe<L>, q: &Probe<L>| (q.u - p.u).abs() + (q.foot - p.foot).abs();
    loop {
        let m = 0.5 * (a + b);
        if b - a <= opts.locate_tol * a.abs().max(b.abs()).max(1.0) || !(m > a && m < b) {
            break;
        }
        let pm = probe(m)?;
        let go_left = if pa.label != pm.label {
            true
        } else if pm.label != pb.label {
            false
        } else {
            gap(&pa, &pm) >= gap(&pm, &pb)
        };
        if go_left {
            b = m;
            pb = pm;
        } else {
            a = m;
            pa = pm;
        }
    }
    let x = 0.5 * (a + b);
    let jump = (pb.u - pa.u).abs() > opts.jump_tol;
    Ok((jump || pa.label != pb.label).then_some(Feature { x, jump }))
}
