//! JSON documents for space-independent problems.
//!
//! ```json
//! {
//!   "name": "box",
//!   "flux": {"kind": "quadratic", "a": 1.0},
//!   "init": {"kind": "piecewise_polynomial", "breakpoints": [-1, 0, 1, 3],
//!            "pieces": [[0], [1], [0]]},
//!   "domain": {"x": [-1, 3], "t": [0.1, 4]}
//! }
//! ```
//!
//! Flux kinds: `quadratic` (`a p²/2`), `quartic` (`a p⁴`), `lwr`
//! (`v_max u(1 + u)` with `init` given as the density `q = −u`), and
//! `tabulated` (continuous piecewise-linear nondecreasing `F′` through
//! `(p, fprime)` with `F(p[0]) = f0`). Init kinds: `piecewise_polynomial`
//! (monomial coefficients in `x`, lowest first) and `chebyshev` (coefficients
//! on each piece mapped to [−1, 1]). Data are extended by their end values.

use serde::{Deserialize, Serialize};

use super::{padded_range, ProblemError, ProblemSpec, Rect, ReportTransform};
use crate::entropy::InitialData;
use crate::funcapprox::{approximate, ApproxOptions, PiecewiseFunction};
use crate::legendre::ConvexFlux;

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FluxDef {
    Quadratic {
        #[serde(default = "one")]
        a: f64,
    },
    Quartic {
        #[serde(default = "one")]
        a: f64,
    },
    Lwr {
        #[serde(default = "one")]
        v_max: f64,
    },
    Tabulated {
        p: Vec<f64>,
        fprime: Vec<f64>,
        #[serde(default)]
        f0: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitDef {
    PiecewisePolynomial { breakpoints: Vec<f64>, pieces: Vec<Vec<f64>> },
    Chebyshev { breakpoints: Vec<f64>, coefficients: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainDef {
    pub x: [f64; 2],
    pub t: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemDocument {
    pub name: String,
    pub flux: FluxDef,
    pub init: InitDef,
    pub domain: DomainDef,
    #[serde(default)]
    pub notes: String,
}

fn schema_err(msg: impl Into<String>) -> ProblemError {
    ProblemError::Schema(msg.into())
}

impl InitDef {
    fn to_piecewise(&self) -> Result<PiecewiseFunction, ProblemError> {
        let (breaks, pieces) = match self {
            InitDef::PiecewisePolynomial { breakpoints, pieces } => (breakpoints, pieces),
            InitDef::Chebyshev {
                breakpoints,
                coefficients,
            } => (breakpoints, coefficients),
        };
        if breaks.len() < 2 || pieces.len() + 1 != breaks.len() {
            return Err(schema_err(format!(
                "{} breakpoints need {} pieces, got {}",
                breaks.len(),
                breaks.len().saturating_sub(1),
                pieces.len()
            )));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(schema_err("breakpoints must be finite and strictly increasing"));
        }
        if pieces.iter().any(|c| c.is_empty() || c.iter().any(|v| !v.is_finite())) {
            return Err(schema_err("every piece needs at least one finite coefficient"));
        }
        match self {
            InitDef::Chebyshev { .. } => PiecewiseFunction::from_pieces(breaks.clone(), pieces.clone(), f64::EPSILON)
                .map_err(|e| schema_err(e.to_string())),
            InitDef::PiecewisePolynomial { .. } => {
                let mut out_pieces = Vec::new();
                for (w, mono) in breaks.windows(2).zip(pieces) {
                    let horner = |x: f64| mono.iter().rev().fold(0.0, |acc, &c| acc * x + c);
                    let opts = ApproxOptions {
                        max_pieces: 1,
                        ..ApproxOptions::default()
                    };
                    let pf = approximate(horner, w[0], w[1], &[], &opts).map_err(|e| schema_err(e.to_string()))?;
                    out_pieces.push(pf.pieces()[0].clone());
                }
                PiecewiseFunction::from_pieces(breaks.clone(), out_pieces, f64::EPSILON)
                    .map_err(|e| schema_err(e.to_string()))
            }
        }
    }
}

fn tabulated_flux(p: &[f64], fprime: &[f64], f0: f64, p_domain: (f64, f64)) -> Result<ConvexFlux, ProblemError> {
    if p.len() < 2 || p.len() != fprime.len() {
        return Err(schema_err("tabulated flux needs matching p and fprime with at least 2 entries"));
    }
    if p.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(schema_err("tabulated p must be strictly increasing"));
    }
    if fprime.windows(2).any(|w| w[1] < w[0]) {
        return Err(schema_err("tabulated fprime must be nondecreasing for a convex flux"));
    }
    let (p, d) = (p.to_vec(), fprime.to_vec());
    // F at each node by exact integration of the linear segments
    let mut f_nodes = vec![f0];
    for k in 1..p.len() {
        f_nodes.push(f_nodes[k - 1] + 0.5 * (d[k] + d[k - 1]) * (p[k] - p[k - 1]));
    }
    let segment = {
        let p = p.clone();
        move |x: f64| p[1..p.len() - 1].partition_point(|&b| b <= x)
    };
    let hints = p[1..p.len() - 1].to_vec();
    let (pf, df, seg_f) = (p.clone(), d.clone(), segment.clone());
    let fprime = move |x: f64| {
        let k = seg_f(x);
        let slope = (df[k + 1] - df[k]) / (pf[k + 1] - pf[k]);
        df[k] + slope * (x - pf[k])
    };
    let f = move |x: f64| {
        let k = segment(x);
        let h = x - p[k];
        let slope = (d[k + 1] - d[k]) / (p[k + 1] - p[k]);
        f_nodes[k] + d[k] * h + 0.5 * slope * h * h
    };
    Ok(ConvexFlux::new(f, fprime, p_domain).with_hints(hints))
}

impl ProblemDocument {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn into_spec(self) -> Result<ProblemSpec, ProblemError> {
        let [x0, x1] = self.domain.x;
        let [t0, t1] = self.domain.t;
        if !(x0 < x1) || !(t0 <= t1) || t0 < 0.0 {
            return Err(schema_err("domain needs x0 < x1 and 0 ≤ t0 ≤ t1"));
        }
        let mut g = self.init.to_piecewise()?;
        let lwr = matches!(self.flux, FluxDef::Lwr { .. });
        if lwr {
            g = g.scale_shift(-1.0, 0.0);
        }
        let init = InitialData::new(g);
        let p_domain = padded_range(&init);
        let flux = match self.flux {
            FluxDef::Quadratic { a } if a > 0.0 => super::quadratic_flux(a, &init),
            FluxDef::Quartic { a } if a > 0.0 => ConvexFlux::new(move |p| a * p.powi(4), move |p| 4.0 * a * p.powi(3), p_domain)
                .with_lagrangian(move |al: f64| 3.0 * al.abs().powf(4.0 / 3.0) / (4.0 * (4.0 * a).cbrt())),
            FluxDef::Lwr { v_max } if v_max > 0.0 => super::lwr_flux(v_max, p_domain),
            FluxDef::Tabulated { ref p, ref fprime, f0 } => tabulated_flux(p, fprime, f0, p_domain)?,
            _ => return Err(schema_err("flux coefficient must be positive")),
        };
        Ok(ProblemSpec {
            name: self.name,
            model: super::Model::Convex(flux),
            init,
            analytic: None,
            oracle: None,
            shock_loci: None,
            domain_xt: Rect {
                x: (x0, x1),
                t: (t0, t1),
            },
            transform: lwr.then_some(ReportTransform::Negate("q")),
            notes: self.notes,
        })
    }

    /// Catalog problems in JSON form, with `g` stored as Chebyshev coefficients.
    pub fn from_spec(spec: &ProblemSpec) -> Option<Self> {
        spec.convex_flux()?;
        let negate = spec.transform.is_some();
        let flux = if negate {
            FluxDef::Lwr { v_max: 1.0 }
        } else {
            FluxDef::Quadratic { a: 1.0 }
        };
        let g = spec.init.g_pf();
        let coefficients = g
            .pieces()
            .iter()
            .map(|c| c.iter().map(|&v| if negate { -v } else { v }).collect())
            .collect();
        Some(Self {
            name: spec.name.clone(),
            flux,
            init: InitDef::Chebyshev {
                breakpoints: g.breakpoints().to_vec(),
                coefficients,
            },
            domain: DomainDef {
                x: [spec.domain_xt.x.0, spec.domain_xt.x.1],
                t: [spec.domain_xt.t.0, spec.domain_xt.t.1],
            },
            notes: spec.notes.clone(),
        })
    }
}
