//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

/// Gaussian elimination with partial pivoting on a dense row-major copy.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &v)| {
        let mut row = r.clone();
        row.push(v);
        row
    }).collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}

/// `I + scale W` built column by column: column `c` is the image of the
/// interior unit vector `e_c` after restoring ghost values and applying the
/// full stencil. No fold formulas are used.
pub fn brute_force_matrix(w: &[f64], m_intervals: usize, scale: f64) -> Vec<Vec<f64>> {
    let n = m_intervals - 1;
    let mut a = vec![vec![0.0; n]; n];
    for c in 0..n {
        let mut full = vec![0.0; m_intervals + 1];
        full[c + 1] = 1.0;
        full[0] = (4.0 * full[1] - full[2]) / 3.0;
        full[m_intervals] = (4.0 * full[m_intervals - 1] - full[m_intervals - 2]) / 3.0;
        for r in 0..n {
            let i = r + 1;
            let s: f64 = (0..=m_intervals).map(|k| w[i.abs_diff(k)] * full[k]).sum();
            a[r][c] = scale * s + if r == c { 1.0 } else { 0.0 };
        }
    }
    a
}

/// Grünwald weights `(-1)^k C(beta, k)` for `k = 0..count`.
pub fn grunwald(beta: f64, count: usize) -> Vec<f64> {
    let mut g = vec![1.0];
    for k in 1..count {
        let prev = g[k - 1];
        g.push(prev * (1.0 - (beta + 1.0) / k as f64));
    }
    g
}

/// Symmetrized WSGD weights from the shifted Grünwald combination
/// `w_k = (b/2) g_k + (1 - b/2) g_{k-1}`.
pub fn wsgd_from_grunwald(beta: f64, count: usize) -> Vec<f64> {
    let g = grunwald(beta, count + 2);
    let w = |k: usize| {
        if k == 0 {
            beta / 2.0 * g[0]
        } else {
            beta / 2.0 * g[k] + (1.0 - beta / 2.0) * g[k - 1]
        }
    };
    let two_cos = 2.0 * (beta * std::f64::consts::PI / 2.0).cos();
    (0..count)
        .map(|j| match j {
            0 => 2.0 * w(1) / two_cos,
            1 => (w(0) + w(2)) / two_cos,
            _ => w(j + 1) / two_cos,
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
