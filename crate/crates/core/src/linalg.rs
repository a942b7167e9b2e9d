//! Dense least squares for the per-cluster regressions.
//!
//! Full-rank problems go through a column-pivoted Householder QR. When the
//! design is rank deficient (including `m < q`) the solver falls back to
//! ridge-regularised normal equations, `(A'A + lambda I) b = A'y`, on the
//! column-equilibrated design.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Ridge term used for rank-deficient designs.
pub const RIDGE_LAMBDA: f64 = 1e-8;

/// Columns whose pivoted `|R_kk|` falls below this fraction of `|R_00|`
/// count as linearly dependent.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("design matrix or targets contain non-finite values")]
    NonFiniteInput,
    #[error("design is {rows}x{cols} but {targets} targets were given")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        targets: usize,
    },
}

/// Minimises `||A b - y||_2` for a row-major `m x q` design `A`.
pub fn solve_least_squares(
    design: &[f64],
    q: usize,
    targets: &[f64],
) -> Result<Vec<f64>, LinalgError> {
    let m = targets.len();
    if q == 0 || m == 0 || design.len() != m * q {
        return Err(LinalgError::ShapeMismatch {
            rows: if q == 0 { 0 } else { design.len() / q },
            cols: q,
            targets: m,
        });
    }
    if design.iter().chain(targets).any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFiniteInput);
    }

    // Equilibrate columns to unit norm; solve for the scaled coefficients.
    let mut scale = vec![1.0; q];
    for (j, s) in scale.iter_mut().enumerate() {
        let norm = math::sqrt((0..m).map(|i| { let v = design[i * q + j]; v * v }).sum::<f64>());
        if norm > 0.0 {
            *s = norm;
        }
    }
    // Column-major copy of the scaled design.
    let mut a = vec![0.0; m * q];
    for i in 0..m {
        for j in 0..q {
            a[j * m + i] = design[i * q + j] / scale[j];
        }
    }

    let coef = match pivoted_qr_solve(&a, m, q, targets) {
        Some(c) => c,
        None => ridge_solve(&a, m, q, targets),
    };
    Ok(coef.iter().zip(&scale).map(|(c, s)| c / s).collect())
}

/// Returns `None` when the design is numerically rank deficient.
fn pivoted_qr_solve(a: &[f64], m: usize, q: usize, y: &[f64]) -> Option<Vec<f64>> {
    if m < q {
        return None;
    }
    let mut a = a.to_vec();
    let mut y = y.to_vec();
    let mut perm: Vec<usize> = (0..q).collect();
    let mut col_norms: Vec<f64> = (0..q)
        .map(|j| a[j * m..(j + 1) * m].iter().map(|v| v * v).sum())
        .collect();
    let mut first_pivot = 0.0;

    for k in 0..q {
        // Pivot: remaining column with the largest residual norm.
        let p = (k..q)
            .max_by(|&i, &j| col_norms[i].total_cmp(&col_norms[j]).then(j.cmp(&i)))
            .unwrap_or(k);
        if p != k {
            for i in 0..m {
                a.swap(k * m + i, p * m + i);
            }
            col_norms.swap(k, p);
            perm.swap(k, p);
        }

        let col = &a[k * m..(k + 1) * m];
        let norm = math::sqrt(col[k..].iter().map(|v| v * v).sum::<f64>());
        if k == 0 {
            first_pivot = norm;
        }
        if norm == 0.0 || norm <= RANK_TOLERANCE * first_pivot {
            return None;
        }
        let alpha = if col[k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = col[k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for j in k..q {
                let cj = &mut a[j * m..(j + 1) * m];
                let dot: f64 = v.iter().zip(&cj[k..]).map(|(x, z)| x * z).sum();
                let f = 2.0 * dot / vnorm2;
                for (c, x) in cj[k..].iter_mut().zip(&v) {
                    *c -= f * x;
                }
            }
            let dot: f64 = v.iter().zip(&y[k..]).map(|(x, z)| x * z).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, x) in y[k..].iter_mut().zip(&v) {
                *c -= f * x;
            }
        }
        for j in k + 1..q {
            col_norms[j] = a[j * m + k + 1..(j + 1) * m]
                .iter()
                .map(|v| v * v)
                .sum();
        }
    }

    // Back substitution on the upper triangle.
    let mut z = vec![0.0; q];
    for k in (0..q).rev() {
        let mut s = y[k];
        for j in k + 1..q {
            s -= a[j * m + k] * z[j];
        }
        z[k] = s / a[k * m + k];
    }
    let mut coef = vec![0.0; q];
    for (k, &p) in perm.iter().enumerate() {
        coef[p] = z[k];
    }
    Some(coef)
}

fn ridge_solve(a: &[f64], m: usize, q: usize, y: &[f64]) -> Vec<f64> {
    let mut gram = vec![0.0; q * q];
    let mut rhs = vec![0.0; q];
    for i in 0..q {
        let ci = &a[i * m..(i + 1) * m];
        for j in 0..=i {
            let cj = &a[j * m..(j + 1) * m];
            let dot: f64 = ci.iter().zip(cj).map(|(x, z)| x * z).sum();
            gram[i * q + j] = dot;
            gram[j * q + i] = dot;
        }
        rhs[i] = ci.iter().zip(y).map(|(x, z)| x * z).sum();
    }
    let mut lambda = RIDGE_LAMBDA;
    loop {
        let mut g = gram.clone();
        for i in 0..q {
            g[i * q + i] += lambda;
        }
        if let Some(sol) = cholesky_solve(&mut g, q, &rhs) {
            return sol;
        }
        // Only reached if rounding makes the regularised Gram matrix
        // indefinite.
        lambda *= 10.0;
    }
}

fn cholesky_solve(g: &mut [f64], q: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    for j in 0..q {
        let mut d = g[j * q + j];
        for k in 0..j {
            d -= g[j * q + k] * g[j * q + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let d = math::sqrt(d);
        g[j * q + j] = d;
        for i in j + 1..q {
            let mut s = g[i * q + j];
            for k in 0..j {
                s -= g[i * q + k] * g[j * q + k];
            }
            g[i * q + j] = s / d;
        }
    }
    let mut z = rhs.to_vec();
    for i in 0..q {
        for k in 0..i {
            z[i] -= g[i * q + k] * z[k];
        }
        z[i] /= g[i * q + i];
    }
    for i in (0..q).rev() {
        for k in i + 1..q {
            z[i] -= g[k * q + i] * z[k];
        }
        z[i] /= g[i * q + i];
    }
    Some(z)
}
