//! The weighted secular polynomial
//!
//! ```text
//! p(x) = Σ_i w_i Π_{j≠i} (x − λ_j),      f(x) = Σ_i w_i / (x − λ_i) = p(x) / Π_j (x − λ_j)
//! ```
//!
//! with poles `λ_1 ≥ … ≥ λ_n` and non-negative weights summing to one. The
//! sign convention uses factors `(x − λ_j)`; the alternative `(λ_j − x)`
//! differs by `(−1)^{n−1}` and has the same roots.
//!
//! Its `n − 1` roots interlace the poles. [`solve_secular`] finds them by
//! merging near-coincident poles, peeling off the roots forced by repeated or
//! zero-weight poles, and running a safeguarded Newton/bisection iteration on
//! `f` inside every remaining gap.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::spread_of;

/// Poles closer than this fraction of the spread are merged.
pub const MERGE_REL_TOL: f64 = 1e-12;
/// Bracket width at which the root iteration stops, relative to the spread.
pub const ROOT_REL_TOL: f64 = 1e-14;
pub const ROOT_MAX_ITERS: usize = 120;
/// Largest degree accepted by [`expand_secular_coeffs`].
pub const MAX_EXPANSION_DIM: usize = 20;

/// Sorted poles with normalized non-negative weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecularProblem {
    poles: Vec<f64>,
    weights: Vec<f64>,
}

impl SecularProblem {
    /// Sorts the poles non-increasingly (carrying the weights along) and
    /// rescales the weights to sum to one. The raw weight sum must lie in
    /// `[1e-9, 1e9]`.
    pub fn new(poles: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let n = poles.len();
        if n < 2 {
            return Err(Error::DimensionTooSmall { n });
        }
        if weights.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: weights.len(),
            });
        }
        if poles.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidProblem("poles must be finite".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidProblem(format!("weight {w} is negative or non-finite")));
        }
        let total: f64 = weights.iter().sum();
        if !(1e-9..=1e9).contains(&total) {
            return Err(Error::InvalidProblem(format!(
                "weight sum {total} cannot be normalized"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| poles[b].total_cmp(&poles[a]));
        let sorted_poles = order.iter().map(|&i| poles[i]).collect();
        let sorted_weights = order.iter().map(|&i| weights[i] / total).collect();
        Ok(SecularProblem {
            poles: sorted_poles,
            weights: sorted_weights,
        })
    }

    /// `w_i = 1/n`.
    pub fn equal_weights(poles: Vec<f64>) -> Result<Self> {
        let n = poles.len();
        Self::new(poles, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn spread(&self) -> f64 {
        spread_of(&self.poles)
    }

    pub fn has_equal_weights(&self) -> bool {
        let target = 1.0 / self.len() as f64;
        self.weights.iter().all(|w| (w - target).abs() <= 1e-12)
    }
}

/// Roots `μ_1 ≥ … ≥ μ_{n−1}` and the pole pairs `(λ_{j+1}, λ_j)` bracketing
/// each of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecularRoots {
    pub roots: Vec<f64>,
    pub brackets: Vec<(f64, f64)>,
}

impl SecularRoots {
    /// `Σ_{j=ℓ}^{r} μ_j`, 1-based inclusive.
    pub fn window_sum(&self, ell: usize, r: usize) -> f64 {
        self.roots[ell - 1..r].iter().sum()
    }
}

/// `∂μ_k/∂λ_j` for the equal-weight problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl SensitivityMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// 0-based.
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.entries[k * self.cols + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|k| self.get(k, j)).sum())
            .collect()
    }

    /// `W x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.cols)
            .map(|row| row.iter().zip(x).map(|(w, v)| w * v).sum())
            .collect()
    }
}

/// `Σ_i w_i Π_{j≠i}(x − λ_j)`. Each product multiplies its factors from the
/// largest magnitude down.
pub fn secular_poly_eval(prob: &SecularProblem, x: f64) -> f64 {
    let n = prob.len();
    let mut factors = Vec::with_capacity(n - 1);
    let mut total = 0.0;
    for i in 0..n {
        if prob.weights[i] == 0.0 {
            continue;
        }
        factors.clear();
        factors.extend((0..n).filter(|&j| j != i).map(|j| x - prob.poles[j]));
        factors.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        total += prob.weights[i] * factors.iter().product::<f64>();
    }
    total
}

/// `Σ w_i/(x − λ_i)` over positive-weight poles.
pub fn secular_func_eval(prob: &SecularProblem, x: f64) -> Result<f64> {
    let guard = 1e-14 * prob.spread();
    let mut total = 0.0;
    for (&p, &w) in prob.poles.iter().zip(&prob.weights) {
        if w == 0.0 {
            continue;
        }
        let d = x - p;
        if d.abs() <= guard {
            return Err(Error::PoleEvaluation { x });
        }
        total += w / d;
    }
    Ok(total)
}

struct Cluster {
    value: f64,
    multiplicity: usize,
    weight: f64,
}

fn clusters(prob: &SecularProblem, merge_tol: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    let mut sum = 0.0;
    let mut last = f64::NAN;
    for (&p, &w) in prob.poles.iter().zip(&prob.weights) {
        match out.last_mut() {
            Some(c) if last - p <= merge_tol => {
                c.multiplicity += 1;
                c.weight += w;
                sum += p;
                c.value = sum / c.multiplicity as f64;
            }
            _ => {
                sum = p;
                out.push(Cluster {
                    value: p,
                    multiplicity: 1,
                    weight: w,
                });
            }
        }
        last = p;
    }
    out
}

/// All `n − 1` roots of `p`, sorted non-increasingly.
pub fn solve_secular(prob: &SecularProblem) -> SecularRoots {
    let scale = prob.spread();
    let groups = clusters(prob, MERGE_REL_TOL * scale);

    let mut roots = Vec::with_capacity(prob.len() - 1);
    let mut reduced_poles = Vec::new();
    let mut reduced_weights = Vec::new();
    for g in &groups {
        if g.weight > 0.0 {
            roots.extend(std::iter::repeat_n(g.value, g.multiplicity - 1));
            reduced_poles.push(g.value);
            reduced_weights.push(g.weight);
        } else {
            // p vanishes to order m at a zero-weight pole of multiplicity m
            roots.extend(std::iter::repeat_n(g.value, g.multiplicity));
        }
    }
    let tol = ROOT_REL_TOL * scale;
    for k in 0..reduced_poles.len().saturating_sub(1) {
        roots.push(root_in_gap(&reduced_poles, &reduced_weights, k, tol));
    }
    roots.sort_by(|a, b| b.total_cmp(a));

    let brackets = (0..roots.len()).map(|j| (prob.poles[j + 1], prob.poles[j])).collect();
    SecularRoots { roots, brackets }
}

/// Root of `f` between `poles[k+1]` and `poles[k]`, where all poles are
/// distinct and all weights positive. The iteration runs on the offset from
/// whichever endpoint the root is closer to.
fn root_in_gap(poles: &[f64], weights: &[f64], k: usize, tol: f64) -> f64 {
    let (hi, lo) = (poles[k], poles[k + 1]);
    let mid = 0.5 * (hi + lo);
    let f_mid: f64 = poles.iter().zip(weights).map(|(&p, &w)| w / (mid - p)).sum();
    if f_mid == 0.0 {
        return mid;
    }
    // f decreases across the gap, so f(mid) > 0 puts the root above mid.
    let origin = if f_mid > 0.0 { k } else { k + 1 };
    let anchor = poles[origin];
    let offsets: Vec<f64> = poles.iter().map(|&p| anchor - p).collect();
    let (mut a, mut b) = if origin == k {
        (mid - anchor, 0.0)
    } else {
        (0.0, mid - anchor)
    };

    let eval = |t: f64| -> (f64, f64) {
        let mut f = 0.0;
        let mut df = 0.0;
        for (&d, &w) in offsets.iter().zip(weights) {
            let q = 1.0 / (t + d);
            f += w * q;
            df -= w * q * q;
        }
        (f, df)
    };

    let mut t = 0.5 * (a + b);
    for _ in 0..ROOT_MAX_ITERS {
        let (f, df) = eval(t);
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            a = t;
        } else {
            b = t;
        }
        if b - a <= tol {
            t = 0.5 * (a + b);
            break;
        }
        let newton = t - f / df;
        if newton.is_finite() && newton > a && newton < b {
            let step = (newton - t).abs();
            t = newton;
            if step <= 0.5 * tol {
                break;
            }
        } else {
            t = 0.5 * (a + b);
        }
    }
    anchor + t
}

/// Roots of `p'` for `p(x) = Π(x − λ_j)`, i.e. the equal-weight problem.
pub fn critical_points(poles: &[f64]) -> Result<SecularRoots> {
    Ok(solve_secular(&SecularProblem::equal_weights(poles.to_vec())?))
}

/// `W[k][j] = (μ_k − λ_j)^{-2} / Σ_i (μ_k − λ_i)^{-2}` for the equal-weight
/// problem with distinct poles.
pub fn sensitivities(prob: &SecularProblem) -> Result<SensitivityMatrix> {
    if !prob.has_equal_weights() {
        return Err(Error::NonUniformWeights);
    }
    let required = 1e-10 * prob.spread();
    let min_gap = prob.poles.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    if min_gap < required {
        return Err(Error::DegeneratePoles { min_gap, required });
    }
    let roots = solve_secular(prob).roots;
    let n = prob.len();
    let mut entries = Vec::with_capacity((n - 1) * n);
    for &mu in &roots {
        let inv: Vec<f64> = prob.poles.iter().map(|&p| (mu - p).powi(-2)).collect();
        let total: f64 = inv.iter().sum();
        entries.extend(inv.iter().map(|v| v / total));
    }
    Ok(SensitivityMatrix {
        rows: n - 1,
        cols: n,
        entries,
    })
}

/// Monomial coefficients of `p`, constant term first; the leading
/// coefficient is 1.
pub fn expand_secular_coeffs(prob: &SecularProblem) -> Result<Vec<f64>> {
    let n = prob.len();
    if n > MAX_EXPANSION_DIM {
        return Err(Error::DimensionTooLarge {
            n,
            max: MAX_EXPANSION_DIM,
        });
    }
    let mut acc = vec![0.0; n];
    for i in 0..n {
        let w = prob.weights[i];
        if w == 0.0 {
            continue;
        }
        let mut poly = vec![1.0];
        for (j, &root) in prob.poles.iter().enumerate() {
            if j != i {
                poly = multiply_linear(&poly, root);
            }
        }
        for (a, c) in acc.iter_mut().zip(&poly) {
            *a += w * c;
        }
    }
    let lead = acc[n - 1];
    Ok(acc.into_iter().map(|c| c / lead).collect())
}

/// `poly(x) · (x − root)`, ascending coefficients.
fn multiply_linear(poly: &[f64], root: f64) -> Vec<f64> {
    let mut out = vec![0.0; poly.len() + 1];
    for (i, &c) in poly.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= root * c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> f64 {
        1.0 / 3.0
    }

    #[test]
    fn constructor_sorts_and_normalizes() {
        let p = SecularProblem::new(vec![0.0, 2.0, 1.0], vec![2.0, 1.0, 1.0]).unwrap();
        assert_eq!(p.poles(), &[2.0, 1.0, 0.0]);
        assert_eq!(p.weights(), &[0.25, 0.25, 0.5]);
        assert!(SecularProblem::new(vec![1.0, 0.0], vec![-0.5, 1.5]).is_err());
        assert!(SecularProblem::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(SecularProblem::new(vec![1.0], vec![1.0]).is_err());
        assert!(SecularProblem::new(vec![1.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn poly_eval_examples() {
        let half = SecularProblem::new(vec![1.0, 0.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(secular_poly_eval(&half, 0.5), 0.0);
        let eq = SecularProblem::equal_weights(vec![2.0, 1.0, 0.0]).unwrap();
        assert!((secular_poly_eval(&eq, 0.0) - 2.0 / 3.0).abs() < 1e-15);
        let point = SecularProblem::new(vec![1.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(secular_poly_eval(&point, 0.0), 0.0);
    }

    #[test]
    fn func_eval_examples() {
        let half = SecularProblem::new(vec![1.0, 0.0], vec![0.5, 0.5]).unwrap();
        assert!((secular_func_eval(&half, 2.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(secular_func_eval(&half, 1.0 - 1e-9).unwrap() < -1e6);
        assert!(matches!(
            secular_func_eval(&half, 1.0),
            Err(Error::PoleEvaluation { .. })
        ));
        let point = SecularProblem::new(vec![1.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(secular_func_eval(&point, 0.0).unwrap(), -1.0);
    }

    #[test]
    fn solve_examples() {
        let p = SecularProblem::new(vec![1.0, 0.0], vec![0.3, 0.7]).unwrap();
        let r = solve_secular(&p);
        assert!((r.roots[0] - 0.7).abs() < 1e-14);
        assert_eq!(r.brackets, vec![(0.0, 1.0)]);

        let r = solve_secular(&SecularProblem::equal_weights(vec![2.0, 1.0, 0.0]).unwrap());
        let s = 1.0 / 3f64.sqrt();
        assert!((r.roots[0] - (1.0 + s)).abs() < 1e-14);
        assert!((r.roots[1] - (1.0 - s)).abs() < 1e-14);

        let r = solve_secular(&SecularProblem::equal_weights(vec![1.0, 1.0, 0.0]).unwrap());
        assert_eq!(r.roots[0], 1.0);
        assert!((r.roots[1] - third()).abs() < 1e-14);
    }

    #[test]
    fn critical_point_examples() {
        assert!((critical_points(&[1.0, 0.0]).unwrap().roots[0] - 0.5).abs() < 1e-15);
        assert_eq!(critical_points(&[4.0; 5]).unwrap().roots, vec![4.0; 4]);
    }

    #[test]
    fn zero_weight_poles_are_roots() {
        let p = SecularProblem::new(vec![3.0, 2.0, 1.0, 0.0], vec![0.5, 0.0, 0.5, 0.0]).unwrap();
        let r = solve_secular(&p);
        // zero-weight poles 2 and 0, plus the root of 0.5/(x−3) + 0.5/(x−1)
        assert_eq!(r.roots.len(), 3);
        assert!((r.roots[0] - 2.0).abs() < 1e-14);
        assert_eq!(r.roots[1], 2.0);
        assert_eq!(r.roots[2], 0.0);
    }

    #[test]
    fn repeated_zero_weight_cluster() {
        // p(x) = (x − 1)² (x − 0)·… : the doubled zero-weight pole contributes two roots
        let p = SecularProblem::new(vec![2.0, 1.0, 1.0, 0.0], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let r = solve_secular(&p);
        assert_eq!(r.roots, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn sensitivity_examples() {
        let w = sensitivities(&SecularProblem::equal_weights(vec![1.0, 0.0]).unwrap()).unwrap();
        assert!((w.get(0, 0) - 0.5).abs() < 1e-15 && (w.get(0, 1) - 0.5).abs() < 1e-15);

        let w = sensitivities(&SecularProblem::equal_weights(vec![2.0, 1.0, 0.0]).unwrap()).unwrap();
        for s in w.row_sums() {
            assert!((s - 1.0).abs() < 1e-12);
        }
        for s in w.col_sums() {
            assert!((s - 2.0 / 3.0).abs() < 1e-12);
        }
        assert!((0..2).all(|k| (0..3).all(|j| w.get(k, j) >= 0.0)));

        assert!(matches!(
            sensitivities(&SecularProblem::new(vec![1.0, 0.0], vec![0.3, 0.7]).unwrap()),
            Err(Error::NonUniformWeights)
        ));
        assert!(matches!(
            sensitivities(&SecularProblem::equal_weights(vec![1.0, 1.0, 0.0]).unwrap()),
            Err(Error::DegeneratePoles { .. })
        ));
    }

    #[test]
    fn expansion_examples() {
        let c = expand_secular_coeffs(&SecularProblem::new(vec![1.0, 0.0], vec![0.5, 0.5]).unwrap()).unwrap();
        assert_eq!(c, vec![-0.5, 1.0]);
        let c = expand_secular_coeffs(&SecularProblem::equal_weights(vec![2.0, 1.0, 0.0]).unwrap()).unwrap();
        assert!((c[0] - 2.0 / 3.0).abs() < 1e-15 && (c[1] + 2.0).abs() < 1e-15 && c[2] == 1.0);
        let c = expand_secular_coeffs(&SecularProblem::new(vec![2.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(c, vec![0.0, -1.0, 1.0]);
        let big = SecularProblem::equal_weights((0..21).map(f64::from).collect()).unwrap();
        assert!(matches!(
            expand_secular_coeffs(&big),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn tiny_weight_root_hugs_its_pole() {
        let p = SecularProblem::new(vec![2.0, 1.0, 0.0], vec![0.5, 1e-30, 0.5]).unwrap();
        let r = solve_secular(&p);
        assert!(r.roots.iter().any(|&x| (x - 1.0).abs() < 1e-13));
    }
}
