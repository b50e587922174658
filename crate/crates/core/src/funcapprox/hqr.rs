//! Eigenvalues of a real upper Hessenberg matrix by Francis double-shift QR.
//!
//! Eigenvalues only; no Schur vectors are accumulated. Follows the classic
//! EISPACK `balanc` + `hqr` pair.

/// Dense row-major square matrix.
#[derive(Clone, Debug)]
pub struct Hessenberg {
    n: usize,
    a: Vec<f64>,
}

impl Hessenberg {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        *self.at_mut(i, j) = v;
    }

    /// Diagonal similarity scaling by powers of two so rows and columns have comparable norms.
    fn balance(&mut self) {
        let n = self.n;
        let radix = 2.0f64;
        let sqrdx = radix * radix;
        let mut done = false;
        while !done {
            done = true;
            for i in 0..n {
                let mut r = 0.0;
                let mut c = 0.0;
                for j in 0..n {
                    if j != i {
                        c += self.at(j, i).abs();
                        r += self.at(i, j).abs();
                    }
                }
                if c != 0.0 && r != 0.0 {
                    let mut g = r / radix;
                    let mut f = 1.0;
                    let s = c + r;
                    while c < g {
                        f *= radix;
                        c *= sqrdx;
                    }
                    g = r * radix;
                    while c > g {
                        f /= radix;
                        c /= sqrdx;
                    }
                    if (c + r) / f < 0.95 * s {
                        done = false;
                        let g = 1.0 / f;
                        for j in 0..n {
                            *self.at_mut(i, j) *= g;
                        }
                        for j in 0..n {
                            *self.at_mut(j, i) *= f;
                        }
                    }
                }
            }
        }
    }

    /// All eigenvalues as `(re, im)` pairs, or `None` if QR fails to converge.
    pub fn eigenvalues(mut self) -> Option<Vec<(f64, f64)>> {
        let n = self.n;
        if n == 0 {
            return Some(Vec::new());
        }
        self.balance();
        let mut wr = vec![0.0; n];
        let mut wi = vec![0.0; n];
        let mut anorm = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(1)..n {
                anorm += self.at(i, j).abs();
            }
        }
        let mut nn: isize = n as isize - 1;
        let mut t = 0.0;
        let max_its = 60 * n.max(1);
        let mut total_its = 0usize;
        while nn >= 0 {
            let mut its = 0;
            loop {
                // look for a single small subdiagonal element
                let mut l = nn;
                while l >= 1 {
                    let lu = l as usize;
                    let mut s = self.at(lu - 1, lu - 1).abs() + self.at(lu, lu).abs();
                    if s == 0.0 {
                        s = anorm;
                    }
                    if self.at(lu, lu - 1).abs() + s == s {
                        *self.at_mut(lu, lu - 1) = 0.0;
                        break;
                    }
                    l -= 1;
                }
                let nu = nn as usize;
                let x = self.at(nu, nu);
                if l == nn {
                    wr[nu] = x + t;
                    wi[nu] = 0.0;
                    nn -= 1;
                    break;
                }
                let y = self.at(nu - 1, nu - 1);
                let w = self.at(nu, nu - 1) * self.at(nu - 1, nu);
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let z = q.abs().sqrt();
                    let x = x + t;
                    if q >= 0.0 {
                        let z = p + if p >= 0.0 { z.abs() } else { -z.abs() };
                        wr[nu - 1] = x + z;
                        wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                        wi[nu - 1] = 0.0;
                        wi[nu] = 0.0;
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                    break;
                }
                if total_its >= max_its {
                    return None;
                }
                let (mut x, mut y, mut w) = (x, y, w);
                if its == 10 || its == 20 {
                    // exceptional shift
                    t += x;
                    for i in 0..=nu {
                        *self.at_mut(i, i) -= x;
                    }
                    let s = self.at(nu, nu - 1).abs() + self.at(nu - 1, nu - 2.min(nu)).abs();
                    x = 0.75 * s;
                    y = x;
                    w = -0.4375 * s * s;
                }
                its += 1;
                total_its += 1;
                // look for two consecutive small subdiagonal elements
                let lu = l as usize;
                let mut m = nu - 2;
                let (mut p, mut q, mut r);
                loop {
                    let z = self.at(m, m);
                    let rr = x - z;
                    let ss = y - z;
                    p = (rr * ss - w) / self.at(m + 1, m) + self.at(m, m + 1);
                    q = self.at(m + 1, m + 1) - z - rr - ss;
                    r = self.at(m + 2, m + 1);
                    let s = p.abs() + q.abs() + r.abs();
                    p /= s;
                    q /= s;
                    r /= s;
                    if m == lu {
                        break;
                    }
                    let u = self.at(m, m - 1).abs() * (q.abs() + r.abs());
                    let v = p.abs() * (self.at(m - 1, m - 1).abs() + z.abs() + self.at(m + 1, m + 1).abs());
                    if u + v == v {
                        break;
                    }
                    m -= 1;
                }
                for i in (m + 2)..=nu {
                    *self.at_mut(i, i - 2) = 0.0;
                    if i != m + 2 {
                        *self.at_mut(i, i - 3) = 0.0;
                    }
                }
                // double QR step on rows l..=nn and columns m..=nn
                let mut k = m;
                while k < nu {
                    let notlast = k + 1 != nu;
                    if k != m {
                        p = self.at(k, k - 1);
                        q = self.at(k + 1, k - 1);
                        r = if notlast { self.at(k + 2, k - 1) } else { 0.0 };
                        x = p.abs() + q.abs() + r.abs();
                        if x != 0.0 {
                            p /= x;
                            q /= x;
                            r /= x;
                        }
                    }
                    let s0 = (p * p + q * q + r * r).sqrt();
                    let s = if p >= 0.0 { s0 } else { -s0 };
                    if s != 0.0 {
                        if k == m {
                            if l as usize != m {
                                *self.at_mut(k, k - 1) = -self.at(k, k - 1);
                            }
                        } else {
                            *self.at_mut(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        let z = r / s;
                        q /= p;
                        r /= p;
                        for j in k..=nu {
                            let mut pp = self.at(k, j) + q * self.at(k + 1, j);
                            if notlast {
                                pp += r * self.at(k + 2, j);
                                *self.at_mut(k + 2, j) -= pp * z;
                            }
                            *self.at_mut(k + 1, j) -= pp * y;
                            *self.at_mut(k, j) -= pp * x;
                        }
                        let mmin = if nu < k + 3 { nu } else { k + 3 };
                        for i in lu..=mmin {
                            let mut pp = x * self.at(i, k) + y * self.at(i, k + 1);
                            if notlast {
                                pp += z * self.at(i, k + 2);
                                *self.at_mut(i, k + 2) -= pp * r;
                            }
                            *self.at_mut(i, k + 1) -= pp * q;
                            *self.at_mut(i, k) -= pp;
                        }
                    }
                    k += 1;
                }
            }
        }
        Some(wr.into_iter().zip(wi).collect())
    }
}
