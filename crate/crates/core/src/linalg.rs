//! Minimal dense linear algebra for the small matrices this crate needs
//! (Jacobians up to 5x5, next-generation matrices 2x2): linear solves
//! with partial pivoting and eigenvalues via Hessenberg reduction plus
//! Francis double-shift QR. No external solver; everything here is a few
//! dozen flops per call and deterministic.

use serde::Serialize;
use thiserror::Error;

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-13;

/// Iteration cap for the QR sweep, scaled by dimension.
const QR_SWEEPS_PER_DIM: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision")]
    SingularMatrix,
    #[error("eigenvalue QR iteration failed to converge")]
    NoConvergence,
}

/// Dense row-major square matrix with compile-time dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize>(pub [[f64; N]; N]);

impl<const N: usize> Matrix<N> {
    pub fn new(rows: [[f64; N]; N]) -> Self {
        Self(rows)
    }

    pub fn zeros() -> Self {
        Self([[0.0; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64; N]) -> [f64; N] {
        let mut out = [0.0; N];
        for i in 0..N {
            for j in 0..N {
                out[i] += self.0[i][j] * v[j];
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= c;
            }
        }
        out
    }

    /// Infinity norm: maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.0
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
///
/// A pivot smaller than `1e-13 * ||A||_inf` raises `SingularMatrix`; the
/// threshold is tight enough to flag the deliberately singular transfer
/// systems that arise at endemic equilibria without false positives.
pub fn solve_linear<const N: usize>(a: &Matrix<N>, b: &[f64; N]) -> Result<[f64; N], LinalgError> {
    let mut m = a.0;
    let mut x = *b;
    let pivot_floor = SINGULARITY_THRESHOLD * a.inf_norm();

    for col in 0..N {
        let mut pivot_row = col;
        let mut best = m[col][col].abs();
        for row in col + 1..N {
            if m[row][col].abs() > best {
                best = m[row][col].abs();
                pivot_row = row;
            }
        }
        if best <= pivot_floor || best == 0.0 {
            return Err(LinalgError::SingularMatrix);
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            x.swap(pivot_row, col);
        }
        let inv_pivot = 1.0 / m[col][col];
        for row in col + 1..N {
            let factor = m[row][col] * inv_pivot;
            if factor == 0.0 {
                continue;
            }
            m[row][col] = 0.0;
            for j in col + 1..N {
                m[row][j] -= factor * m[col][j];
            }
            x[row] -= factor * x[col];
        }
    }
    for col in (0..N).rev() {
        let mut s = x[col];
        for j in col + 1..N {
            s -= m[col][j] * x[j];
        }
        x[col] = s / m[col][col];
    }
    Ok(x)
}

/// Determinant via the same pivoted elimination; 0.0 when a pivot underflows.
pub fn determinant<const N: usize>(a: &Matrix<N>) -> f64 {
    let mut m = a.0;
    let mut det = 1.0;
    for col in 0..N {
        let mut pivot_row = col;
        let mut best = m[col][col].abs();
        for row in col + 1..N {
            if m[row][col].abs() > best {
                best = m[row][col].abs();
                pivot_row = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        det *= m[col][col];
        let inv_pivot = 1.0 / m[col][col];
        for row in col + 1..N {
            let factor = m[row][col] * inv_pivot;
            for j in col..N {
                m[row][j] -= factor * m[col][j];
            }
        }
    }
    det
}

/// One eigenvalue as a (re, im) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Eigenvalues sorted by descending real part, ties by descending
/// imaginary part, so reports are reproducible. Complex values occur in
/// conjugate pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSet(Vec<Eigenvalue>);

impl EigenSet {
    fn from_unsorted(mut vals: Vec<Eigenvalue>) -> Self {
        vals.sort_unstable_by(|a, b| {
            b.re.total_cmp(&a.re).then_with(|| b.im.total_cmp(&a.im))
        });
        Self(vals)
    }

    pub fn values(&self) -> &[Eigenvalue] {
        &self.0
    }

    pub fn max_real_part(&self) -> f64 {
        self.0.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.0.iter().map(Eigenvalue::modulus).fold(0.0, f64::max)
    }
}

/// Fortran-style transfer of sign: |a| carrying the sign of b.
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of a real square matrix, `N <= 5`.
///
/// 2x2 uses the closed-form quadratic; larger sizes reduce to upper
/// Hessenberg form by Householder similarity and run Francis double-shift
/// QR sweeps until the active block deflates.
pub fn eigenvalues<const N: usize>(a: &Matrix<N>) -> Result<EigenSet, LinalgError> {
    match N {
        0 => Ok(EigenSet(Vec::new())),
        1 => Ok(EigenSet(vec![Eigenvalue {
            re: a.0[0][0],
            im: 0.0,
        }])),
        2 => {
            let (l1, l2) = eig2(a.0[0][0], a.0[0][1], a.0[1][0], a.0[1][1]);
            Ok(EigenSet::from_unsorted(vec![l1, l2]))
        }
        _ => {
            let mut h = hessenberg(a);
            let vals = francis_qr::<N>(&mut h)?;
            Ok(EigenSet::from_unsorted(vals))
        }
    }
}

/// Largest eigenvalue modulus.
pub fn spectral_radius<const N: usize>(a: &Matrix<N>) -> Result<f64, LinalgError> {
    Ok(eigenvalues(a)?.spectral_radius())
}

/// Closed-form eigenvalues of [[a, b], [c, d]].
fn eig2(a: f64, b: f64, c: f64, d: f64) -> (Eigenvalue, Eigenvalue) {
    let half_tr = 0.5 * (a + d);
    let det = a * d - b * c;
    let disc = 0.25 * (a - d) * (a - d) + b * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // Larger-magnitude root first, partner via the product to avoid
        // cancellation.
        let l1 = half_tr + sign(sq, half_tr);
        let l2 = if l1 != 0.0 { det / l1 } else { half_tr - sq };
        (
            Eigenvalue { re: l1, im: 0.0 },
            Eigenvalue { re: l2, im: 0.0 },
        )
    } else {
        let im = (-disc).sqrt();
        (
            Eigenvalue { re: half_tr, im },
            Eigenvalue { re: half_tr, im: -im },
        )
    }
}

/// Householder similarity reduction to upper Hessenberg form.
fn hessenberg<const N: usize>(a: &Matrix<N>) -> Matrix<N> {
    let mut h = *a;
    for k in 0..N.saturating_sub(2) {
        // Reflect column k below the subdiagonal onto the subdiagonal.
        let mut norm2 = 0.0;
        for i in k + 1..N {
            norm2 += h.0[i][k] * h.0[i][k];
        }
        let tail2: f64 = (k + 2..N).map(|i| h.0[i][k] * h.0[i][k]).sum();
        if tail2 == 0.0 {
            continue;
        }
        let alpha = -sign(norm2.sqrt(), h.0[k + 1][k]);
        let mut u = [0.0; 5];
        u[k + 1] = h.0[k + 1][k] - alpha;
        for i in k + 2..N {
            u[i] = h.0[i][k];
        }
        let unorm2: f64 = u[..N].iter().map(|v| v * v).sum();
        if unorm2 == 0.0 {
            continue;
        }
        let scale = 2.0 / unorm2;
        let mut p = Matrix::<N>::identity();
        for i in k + 1..N {
            for j in k + 1..N {
                p.0[i][j] -= scale * u[i] * u[j];
            }
        }
        h = p.mul(&h).mul(&p);
        // Entries below the subdiagonal are zero by construction; make it exact.
        for i in k + 2..N {
            h.0[i][k] = 0.0;
        }
    }
    h
}

/// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
fn francis_qr<const N: usize>(hm: &mut Matrix<N>) -> Result<Vec<Eigenvalue>, LinalgError> {
    let eps = f64::EPSILON;
    let h = &mut hm.0;
    let anorm: f64 = (0..N)
        .map(|i| (i.saturating_sub(1)..N).map(|j| h[i][j].abs()).sum::<f64>())
        .sum();
    let mut vals = Vec::with_capacity(N);
    let mut shift_total = 0.0;
    let mut sweeps = 0usize;

    let mut nn = N as isize - 1;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let nnu = nn as usize;
            // Look for a negligible subdiagonal entry to split the block.
            let mut l = nnu;
            while l >= 1 {
                let mut s = h[l - 1][l - 1].abs() + h[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h[l][l - 1].abs() <= eps * s {
                    h[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }

            let mut x = h[nnu][nnu];
            if l == nnu {
                // 1x1 block deflated.
                vals.push(Eigenvalue {
                    re: x + shift_total,
                    im: 0.0,
                });
                nn -= 1;
                break;
            }
            let y = h[nnu - 1][nnu - 1];
            let mut w = h[nnu][nnu - 1] * h[nnu - 1][nnu];
            if l + 1 == nnu {
                // 2x2 block deflated: quadratic on the trailing block.
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift_total;
                if q >= 0.0 {
                    let z = p + sign(z, p);
                    let first = x + z;
                    let second = if z != 0.0 { x - w / z } else { first };
                    vals.push(Eigenvalue { re: first, im: 0.0 });
                    vals.push(Eigenvalue {
                        re: second,
                        im: 0.0,
                    });
                } else {
                    vals.push(Eigenvalue { re: x + p, im: z });
                    vals.push(Eigenvalue { re: x + p, im: -z });
                }
                nn -= 2;
                break;
            }

            if sweeps >= QR_SWEEPS_PER_DIM * N {
                return Err(LinalgError::NoConvergence);
            }
            let mut yy = y;
            if its > 0 && its % 10 == 0 {
                // Exceptional shift to break symmetry-induced cycling.
                shift_total += x;
                for i in 0..=nnu {
                    h[i][i] -= x;
                }
                let s = h[nnu][nnu - 1].abs() + h[nnu - 1][nnu - 2].abs();
                x = 0.75 * s;
                yy = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            sweeps += 1;

            // Find two consecutive small subdiagonals starting the bulge.
            let mut m = nnu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = h[m][m];
                let rr = x - z;
                let ss = yy - z;
                p = (rr * ss - w) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - rr - ss;
                r = h[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nnu {
                h[i][i - 2] = 0.0;
                if i != m + 2 {
                    h[i][i - 3] = 0.0;
                }
            }

            // Double QR sweep: chase the bulge down rows m..nn.
            for k in m..nnu {
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if k + 1 != nnu { h[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                } else {
                    h[k][k - 1] = -s * x;
                }
                p += s;
                x = p / s;
                let y2 = q / s;
                let z2 = r / s;
                q /= p;
                r /= p;
                for j in k..=nnu {
                    let mut pj = h[k][j] + q * h[k + 1][j];
                    if k + 1 != nnu {
                        pj += r * h[k + 2][j];
                        h[k + 2][j] -= pj * z2;
                    }
                    h[k + 1][j] -= pj * y2;
                    h[k][j] -= pj * x;
                }
                let mmin = nnu.min(k + 3);
                for i in l..=mmin {
                    let mut pi = x * h[i][k] + y2 * h[i][k + 1];
                    if k + 1 != nnu {
                        pi += z2 * h[i][k + 2];
                        h[i][k + 2] -= pi * r;
                    }
                    h[i][k + 1] -= pi * q;
                    h[i][k] -= pi;
                }
            }
        }
    }
    Ok(vals)
}
