//! Chebyshev kernels on the reference interval [-1, 1].
//!
//! Coefficient vectors are in the Chebyshev-T basis, lowest degree first.

use std::cell::RefCell;
use std::f64::consts::PI;

use super::hqr::Hessenberg;
use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Chebyshev points of the first kind, `cos(pi (j + 1/2) / n)`, ordered from +1 towards -1.
///
/// None of them coincides with an endpoint, so a function may be undefined
/// (or jump) exactly at the ends of a piece.
pub fn first_kind_points(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| (PI * (j as f64 + 0.5) / n as f64).cos())
        .collect()
}

/// Chebyshev coefficients of the interpolant through values at [`first_kind_points`].
pub fn coeffs_from_first_kind(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![values[0]];
    }
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .chain(values.iter().rev())
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(2 * n));
    fft.process(&mut buf);
    let mut coeffs: Vec<f64> = (0..n)
        .map(|k| {
            let phase = -PI * k as f64 / (2.0 * n as f64);
            let twiddle = Complex::new(phase.cos(), phase.sin());
            (twiddle * buf[k]).re / n as f64
        })
        .collect();
    coeffs[0] *= 0.5;
    coeffs
}

/// Clenshaw evaluation of a Chebyshev series at `x` in [-1, 1].
pub fn clenshaw(coeffs: &[f64], x: f64) -> f64 {
    match coeffs.len() {
        0 => 0.0,
        1 => coeffs[0],
        _ => {
            let two_x = 2.0 * x;
            let mut b1 = 0.0;
            let mut b2 = 0.0;
            for &c in coeffs[1..].iter().rev() {
                let b0 = c + two_x * b1 - b2;
                b2 = b1;
                b1 = b0;
            }
            coeffs[0] + x * b1 - b2
        }
    }
}

/// Value at the right end (x = +1).
pub fn value_at_right(coeffs: &[f64]) -> f64 {
    coeffs.iter().sum()
}

/// Value at the left end (x = -1).
pub fn value_at_left(coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { *c } else { -*c })
        .sum()
}

/// Coefficients of d/dx on the reference interval.
pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * coeffs[k];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// Coefficients of the indefinite integral on the reference interval, zero at x = -1.
pub fn integral(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n == 0 {
        return vec![0.0];
    }
    let c = |k: usize| if k < n { coeffs[k] } else { 0.0 };
    let mut out = vec![0.0; n + 1];
    out[1] = c(0) - 0.5 * c(2);
    for k in 2..=n {
        out[k] = (c(k - 1) - c(k + 1)) / (2.0 * k as f64);
    }
    out[0] = -value_at_left(&out);
    out
}

/// Drop trailing coefficients with magnitude at or below `threshold`, keeping at least one.
pub fn chop(coeffs: &mut Vec<f64>, threshold: f64) {
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= threshold) {
        coeffs.pop();
    }
}

/// Real eigenvalues of the colleague matrix of a Chebyshev series, in reference coordinates.
///
/// The series must have a nonzero leading coefficient. Eigenvalues with
/// `|imag| > imag_tol` are discarded. Returns `None` if the QR iteration fails.
pub fn colleague_roots(coeffs: &[f64], imag_tol: f64) -> Option<Vec<f64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Some(Vec::new());
    }
    let lead = coeffs[n];
    if n == 1 {
        return Some(vec![-coeffs[0] / lead]);
    }
    // transpose of the colleague matrix, which is upper Hessenberg
    let mut m = Hessenberg::zeros(n);
    let mut entry = vec![0.0; n * n];
    entry[1] = 1.0;
    for k in 1..n - 1 {
        entry[k * n + k - 1] = 0.5;
        entry[k * n + k + 1] = 0.5;
    }
    for j in 0..n {
        entry[(n - 1) * n + j] -= coeffs[j] / (2.0 * lead);
    }
    entry[(n - 1) * n + n - 2] += 0.5;
    for i in 0..n {
        for j in 0..n {
            m.set(j, i, entry[i * n + j]);
        }
    }
    let eig = m.eigenvalues()?;
    Some(
        eig.into_iter()
            .filter(|z| z.1.abs() <= imag_tol)
            .map(|z| z.0)
            .collect(),
    )
}

/// Values of a Chebyshev series at `n` first-kind points of the sub-interval `[lo, hi]` of [-1, 1],
/// re-expanded as coefficients on that sub-interval.
pub fn restrict(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let n = coeffs.len().max(1);
    let values: Vec<f64> = first_kind_points(n)
        .into_iter()
        .map(|s| clenshaw(coeffs, lo + (s + 1.0) * 0.5 * (hi - lo)))
        .collect();
    coeffs_from_first_kind(&values)
}

/// Chebyshev–Lobatto points `cos(pi j / n)`, `j = 0..=n`, from +1 to -1.
pub fn lobatto_points(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![0.0];
    }
    (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect()
}

/// Spectral differentiation matrix on the Lobatto points (reference interval).
pub fn lobatto_diff_matrix(n: usize) -> DMatrix<f64> {
    let x = lobatto_points(n);
    let m = n + 1;
    let c: Vec<f64> = (0..m)
        .map(|j| {
            let w = if j == 0 || j == n { 2.0 } else { 1.0 };
            if j % 2 == 0 {
                w
            } else {
                -w
            }
        })
        .collect();
    let mut d = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let mut row_sum = 0.0;
        for j in 0..m {
            if i != j {
                let v = c[i] / c[j] / (x[i] - x[j]);
                d[(i, j)] = v;
                row_sum += v;
            }
        }
        d[(i, i)] = -row_sum;
    }
    d
}

/// Clenshaw–Curtis quadrature weights on the Lobatto points (sum to 2).
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![2.0];
    }
    let nf = n as f64;
    let mut w = vec![0.0; n + 1];
    let mut v = vec![1.0; n.saturating_sub(1)];
    let theta = |j: usize| PI * j as f64 / nf;
    if n % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
        for k in 1..n / 2 {
            let kf = k as f64;
            for (i, vi) in v.iter_mut().enumerate() {
                *vi -= 2.0 * (2.0 * kf * theta(i + 1)).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for (i, vi) in v.iter_mut().enumerate() {
            *vi -= (nf * theta(i + 1)).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            let kf = k as f64;
            for (i, vi) in v.iter_mut().enumerate() {
                *vi -= 2.0 * (2.0 * kf * theta(i + 1)).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for (i, vi) in v.iter().enumerate() {
        w[i + 1] = 2.0 * vi / nf;
    }
    w
}

/// Chebyshev coefficients from values at the Lobatto points (DCT-I).
pub fn coeffs_from_lobatto(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    if m <= 1 {
        return values.to_vec();
    }
    let n = m - 1;
    let nf = n as f64;
    (0..=n)
        .map(|k| {
            let mut s = 0.0;
            for (j, &v) in values.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += w * v * (PI * (j * k) as f64 / nf).cos();
            }
            let scale = if k == 0 || k == n { 1.0 / nf } else { 2.0 / nf };
            s * scale
        })
        .collect()
}

/// Barycentric interpolation through values at the Lobatto points.
pub fn lobatto_interpolate(values: &[f64], x: f64) -> f64 {
    let m = values.len();
    if m == 1 {
        return values[0];
    }
    let n = m - 1;
    let nodes = lobatto_points(n);
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, (&xj, &fj)) in nodes.iter().zip(values).enumerate() {
        let diff = x - xj;
        if diff == 0.0 {
            return fj;
        }
        let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == n {
            w *= 0.5;
        }
        let q = w / diff;
        num += q * fj;
        den += q;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dct_reproduces_low_degree_polynomial() {
        // x^2 = (T0 + T2) / 2
        let pts = first_kind_points(8);
        let vals: Vec<f64> = pts.iter().map(|x| x * x).collect();
        let c = coeffs_from_first_kind(&vals);
        assert!((c[0] - 0.5).abs() < 1e-15);
        assert!(c[1].abs() < 1e-15);
        assert!((c[2] - 0.5).abs() < 1e-15);
        for ck in &c[3..] {
            assert!(ck.abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_and_integral_are_inverse() {
        let c = vec![0.3, -1.2, 0.7, 0.25, -0.1];
        let d = derivative(&integral(&c));
        for (a, b) in c.iter().zip(&d) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(value_at_left(&integral(&c)).abs() < 1e-15);
    }

    #[test]
    fn colleague_finds_chebyshev_zeros() {
        // T3 has zeros at cos((2k+1) pi / 6)
        let mut roots = colleague_roots(&[0.0, 0.0, 0.0, 1.0], 1e-10).unwrap();
        roots.sort_by(f64::total_cmp);
        let expected = [-(3f64.sqrt()) / 2.0, 0.0, 3f64.sqrt() / 2.0];
        for (r, e) in roots.iter().zip(expected) {
            assert!((r - e).abs() < 1e-14);
        }
    }

    #[test]
    fn clenshaw_curtis_integrates_polynomials() {
        let n = 12;
        let w = clenshaw_curtis_weights(n);
        let x = lobatto_points(n);
        let integral: f64 = w.iter().zip(&x).map(|(wi, xi)| wi * xi.powi(4)).sum();
        assert!((integral - 0.4).abs() < 1e-14);
        let w = clenshaw_curtis_weights(7);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn diff_matrix_differentiates_cubic() {
        let n = 6;
        let d = lobatto_diff_matrix(n);
        let x = lobatto_points(n);
        for i in 0..=n {
            let mut s = 0.0;
            for j in 0..=n {
                s += d[(i, j)] * x[j].powi(3);
            }
            assert!((s - 3.0 * x[i] * x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn lobatto_transform_and_interpolation_agree() {
        let n = 10;
        let vals: Vec<f64> = lobatto_points(n).iter().map(|x| (2.0 * x).sin()).collect();
        let c = coeffs_from_lobatto(&vals);
        let x = 0.123;
        assert!((clenshaw(&c, x) - lobatto_interpolate(&vals, x)).abs() < 1e-13);
    }
}
