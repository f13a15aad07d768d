//! Reference implementations used to cross-check the library.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use specbounds::{HermitianMatrix, C64};

/// Eigenvalues through the real symmetric embedding `[[Re, −Im], [Im, Re]]`,
/// which doubles every eigenvalue; every other value is kept.
pub fn dense_eigenvalues(a: &HermitianMatrix) -> Vec<f64> {
    let n = a.dim();
    let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = a.get(i % n, j % n);
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v.into_iter().step_by(2).collect()
}

/// Principal submatrix keeping the 0-based indices in `keep`.
pub fn submatrix(a: &HermitianMatrix, keep: &[usize]) -> HermitianMatrix {
    let entries: Vec<C64> = keep
        .iter()
        .flat_map(|&i| keep.iter().map(move |&j| a.get(i, j)))
        .collect();
    HermitianMatrix::new(keep.len(), entries).unwrap()
}

/// Spectra of the `n` deleted-row submatrices, by the dense oracle.
pub fn deleted_spectra(a: &HermitianMatrix) -> Vec<Vec<f64>> {
    let n = a.dim();
    (0..n)
        .map(|k| {
            let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
            dense_eigenvalues(&submatrix(a, &keep))
        })
        .collect()
}

/// Ascending coefficients of `Π (x − r)`.
pub fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (i, &v) in c.iter().enumerate() {
            next[i + 1] += v;
            next[i] -= r * v;
        }
        c = next;
    }
    c
}

/// Quotient of `poly` by `(x − r)` by synthetic division from the top.
pub fn deflate(poly: &[f64], r: f64) -> Vec<f64> {
    let d = poly.len() - 1;
    let mut q = vec![0.0; d];
    let mut carry = 0.0;
    for k in (1..=d).rev() {
        carry = poly[k] + carry * r;
        q[k - 1] = carry;
    }
    q
}

/// Ascending coefficients of `Σ w_i Π_{j≠i}(x − λ_j)`, built by deflating
/// the full characteristic polynomial.
pub fn secular_poly(poles: &[f64], weights: &[f64]) -> Vec<f64> {
    let full = poly_from_roots(poles);
    let mut acc = vec![0.0; poles.len()];
    for (&p, &w) in poles.iter().zip(weights) {
        for (a, c) in acc.iter_mut().zip(deflate(&full, p)) {
            *a += w * c;
        }
    }
    acc
}

/// Roots of a polynomial (ascending coefficients) as eigenvalues of its
/// companion matrix, real parts sorted non-increasingly.
pub fn companion_roots(coeffs: &[f64]) -> Vec<f64> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    if d == 1 {
        return vec![-coeffs[0] / lead];
    }
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -coeffs[i] / lead;
    }
    let mut r: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
    r.sort_by(|x, y| y.total_cmp(x));
    r
}

/// Critical points of `Π (x − λ_j)` from the derivative's companion matrix.
pub fn critical_points(poles: &[f64]) -> Vec<f64> {
    let p = poly_from_roots(poles);
    let dp: Vec<f64> = (1..p.len()).map(|k| k as f64 * p[k]).collect();
    companion_roots(&dp)
}

/// Naive prefix-sum majorization test.
pub fn majorizes(x: &[f64], y: &[f64], tol: f64) -> bool {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.total_cmp(a));
    ys.sort_by(|a, b| b.total_cmp(a));
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        if sx < sy - tol {
            return false;
        }
    }
    xs.len() == ys.len() && (sx - sy).abs() <= tol
}

/// All `m`-subsets of `0..n`, lexicographic.
pub fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// `X_m(A)` by direct enumeration with the dense oracle.
pub fn all_submatrix_eigenvalues(a: &HermitianMatrix, m: usize) -> Vec<f64> {
    let mut v: Vec<f64> = subsets(a.dim(), m)
        .iter()
        .flat_map(|s| dense_eigenvalues(&submatrix(a, s)))
        .collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// Determinant of a principal submatrix by complex LU.
pub fn principal_minor(a: &HermitianMatrix, keep: &[usize]) -> f64 {
    let m = DMatrix::from_fn(keep.len(), keep.len(), |i, j| {
        let z = a.get(keep[i], keep[j]);
        nalgebra::Complex::new(z.re, z.im)
    });
    m.determinant().re
}

pub fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    (hi - lo).max(1.0)
}
