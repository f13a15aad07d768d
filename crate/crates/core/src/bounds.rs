//! Bounds on windowed sums of secular roots and of principal-submatrix
//! eigenvalues.
//!
//! Every function here is a closed-form evaluation on sorted spectra (and,
//! for the eigenvector-weighted families, on an [`EigenDecomposition`]). No
//! eigensolves happen in this module. Windows are 1-based and inclusive:
//! `1 ≤ ℓ ≤ r ≤ n − 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{EigenDecomposition, Spectrum, C64};
use crate::secular::SecularProblem;

/// Tail sums at or below this value are treated as zero.
pub const TAIL_EPS: f64 = 1e-14;
/// Relative slack granted by [`verify_bound`].
pub const VERIFY_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundSource {
    Thompson,
    JohnsonRobinson,
    WeightedMain,
    RelaxedWeighted,
    EqualWeight,
    AggregateRenormalized,
    AggregateRelaxed,
    AggregateCorollary,
    Tightest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInterval {
    pub lower: f64,
    pub upper: f64,
    pub source: BoundSource,
}

impl BoundInterval {
    /// `self ⊆ other` up to `tol`.
    pub fn within(&self, other: &BoundInterval, tol: f64) -> bool {
        self.lower >= other.lower - tol && self.upper <= other.upper + tol
    }
}

/// Index window `1 ≤ ℓ ≤ r ≤ n − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub ell: usize,
    pub r: usize,
}

impl Window {
    pub fn new(ell: usize, r: usize, n: usize) -> Result<Self> {
        if ell == 0 || ell > r || r + 1 > n {
            return Err(Error::WindowOutOfRange { ell, r, n });
        }
        Ok(Window { ell, r })
    }

    pub fn single(j: usize, n: usize) -> Result<Self> {
        Self::new(j, j, n)
    }

    /// Every valid window for dimension `n`, ordered by `(ℓ, r)`.
    pub fn all(n: usize) -> Vec<Window> {
        let mut out = Vec::new();
        for ell in 1..n {
            for r in ell..n {
                out.push(Window { ell, r });
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.r - self.ell + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, n: usize) -> Result<()> {
        Window::new(self.ell, self.r, n).map(|_| ())
    }
}

/// `U_ℓ = Σ_{i≥ℓ} w_i` and `L_{r+1} = Σ_{i≤r+1} w_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightTails {
    pub u_ell: f64,
    pub l_rplus1: f64,
}

impl WeightTails {
    pub fn of(weights: &[f64], w: Window) -> Self {
        WeightTails {
            u_ell: weights[w.ell - 1..].iter().sum(),
            l_rplus1: weights[..=w.r].iter().sum(),
        }
    }

    fn require_nonzero(&self, context: &str) -> Result<()> {
        if self.u_ell <= TAIL_EPS {
            return Err(Error::DegenerateTail(format!("{context}: U_ell = {:e}", self.u_ell)));
        }
        if self.l_rplus1 <= TAIL_EPS {
            return Err(Error::DegenerateTail(format!(
                "{context}: L_(r+1) = {:e}",
                self.l_rplus1
            )));
        }
        Ok(())
    }
}

/// `Ω_j(ℓ) = Σ_k |v_{j,k}|²/U_ℓ^k` for `j = ℓ..r` and
/// `Ψ_j(r) = Σ_k |v_{j,k}|²/L_{r+1}^k` for `j = ℓ+1..r+1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateCoefficients {
    pub omega: Vec<f64>,
    pub psi: Vec<f64>,
}

/// Outcome of checking one value against one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub slack_lower: f64,
    pub slack_upper: f64,
    pub tolerance: f64,
}

/// Serialized form of a single bound verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRecord {
    pub theorem: BoundSource,
    pub window: [usize; 2],
    pub lower: f64,
    pub upper: f64,
    pub actual: f64,
    pub slack_lower: f64,
    pub slack_upper: f64,
    pub pass: bool,
}

impl BoundRecord {
    pub fn new(interval: &BoundInterval, window: Window, actual: f64, verdict: &Verdict) -> Self {
        BoundRecord {
            theorem: interval.source,
            window: [window.ell, window.r],
            lower: interval.lower,
            upper: interval.upper,
            actual,
            slack_lower: verdict.slack_lower,
            slack_upper: verdict.slack_upper,
            pass: verdict.pass,
        }
    }
}

fn lam(values: &[f64], j: usize) -> f64 {
    values[j - 1]
}

fn sum_range(values: &[f64], from: usize, to: usize) -> f64 {
    (from..=to).map(|j| lam(values, j)).sum()
}

/// Bounds on `Σ_i μ_{i,j}` over the `n` deleted-row submatrices:
/// `[λ_j + (n−1)λ_{j+1}, (n−1)λ_j + λ_{j+1}]`.
pub fn thompson_bounds(lambda: &Spectrum, j: usize) -> Result<BoundInterval> {
    let n = lambda.len();
    Window::single(j, n)?;
    let l = lambda.values();
    let m = (n - 1) as f64;
    Ok(BoundInterval {
        lower: lam(l, j) + m * lam(l, j + 1),
        upper: m * lam(l, j) + lam(l, j + 1),
        source: BoundSource::Thompson,
    })
}

/// `(max_lower, min_upper)`: the first bounds `max_k μ_{k,j}` from below, the
/// second bounds `min_k μ_{k,j}` from above.
pub fn johnson_robinson_bounds(lambda: &Spectrum, j: usize) -> Result<(f64, f64)> {
    let n = lambda.len();
    Window::single(j, n)?;
    let l = lambda.values();
    let nf = n as f64;
    let a = (n - j) as f64 / nf;
    let b = j as f64 / nf;
    Ok((a * lam(l, j) + b * lam(l, n), a * lam(l, 1) + b * lam(l, j + 1)))
}

fn weighted_terms(poles: &[f64], weights: &[f64], w: Window, lower_scale: f64, upper_scale: f64) -> (f64, f64) {
    let (ell, r) = (w.ell, w.r);
    let mut lower = sum_range(poles, ell + 1, r + 1);
    let mut upper = sum_range(poles, ell, r);
    for j in ell..=r {
        lower += lam(weights, j + 1) * lower_scale * (lam(poles, ell) - lam(poles, j + 1));
        upper -= lam(weights, j) * upper_scale * (lam(poles, j) - lam(poles, r + 1));
    }
    (lower, upper)
}

/// Bounds on `Σ_{j=ℓ}^r μ_j` with the tail-renormalized weights
/// `w_{j+1}/L_{r+1}` and `w_j/U_ℓ`.
pub fn weighted_window_bounds(prob: &SecularProblem, w: Window) -> Result<BoundInterval> {
    w.check(prob.len())?;
    let tails = WeightTails::of(prob.weights(), w);
    tails.require_nonzero("weighted window")?;
    let (lower, upper) = weighted_terms(prob.poles(), prob.weights(), w, 1.0 / tails.l_rplus1, 1.0 / tails.u_ell);
    Ok(BoundInterval {
        lower,
        upper,
        source: BoundSource::WeightedMain,
    })
}

/// [`weighted_window_bounds`] with both tail sums replaced by 1.
pub fn relaxed_weighted_bounds(prob: &SecularProblem, w: Window) -> Result<BoundInterval> {
    w.check(prob.len())?;
    WeightTails::of(prob.weights(), w).require_nonzero("relaxed window")?;
    let (lower, upper) = weighted_terms(prob.poles(), prob.weights(), w, 1.0, 1.0);
    Ok(BoundInterval {
        lower,
        upper,
        source: BoundSource::RelaxedWeighted,
    })
}

/// Bounds on windowed sums of the critical points of `Π(x − λ_j)`.
pub fn equal_weight_bounds(lambda: &Spectrum, w: Window) -> Result<BoundInterval> {
    let n = lambda.len();
    w.check(n)?;
    let l = lambda.values();
    let (ell, r) = (w.ell, w.r);
    let lower_coef = 1.0 / (r + 1) as f64;
    let upper_coef = 1.0 / (n - ell + 1) as f64;
    let mut lower = sum_range(l, ell + 1, r + 1);
    let mut upper = sum_range(l, ell, r);
    let mut lower_dev = 0.0;
    let mut upper_dev = 0.0;
    for j in ell..=r {
        lower_dev += lam(l, ell) - lam(l, j + 1);
        upper_dev += lam(l, j) - lam(l, r + 1);
    }
    lower += lower_coef * lower_dev;
    upper -= upper_coef * upper_dev;
    Ok(BoundInterval {
        lower,
        upper,
        source: BoundSource::EqualWeight,
    })
}

/// Weighted bounds for the compression of `A` onto `u^⊥`, with weights
/// `|⟨u, v_i⟩|²`.
pub fn geometric_bounds(decomp: &EigenDecomposition, u: &[C64], w: Window) -> Result<BoundInterval> {
    let n = decomp.dim();
    if u.len() != n {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: n,
        });
    }
    let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitVector { norm });
    }
    w.check(n)?;
    weighted_for(decomp, decomp.weights_for(u), w)
}

/// Weighted bounds for the deleted-row submatrix `A_k` (1-based `k`), with
/// weights `|v_{i,k}|²`.
pub fn submatrix_bounds(decomp: &EigenDecomposition, k: usize, w: Window) -> Result<BoundInterval> {
    let n = decomp.dim();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    w.check(n)?;
    weighted_for(decomp, decomp.coordinate_weights(k - 1), w)
}

fn weighted_for(decomp: &EigenDecomposition, weights: Vec<f64>, w: Window) -> Result<BoundInterval> {
    let poles = decomp.spectrum.values();
    let tails = WeightTails::of(&weights, w);
    tails.require_nonzero("eigenvector weights")?;
    let (lower, upper) = weighted_terms(poles, &weights, w, 1.0 / tails.l_rplus1, 1.0 / tails.u_ell);
    Ok(BoundInterval {
        lower,
        upper,
        source: BoundSource::WeightedMain,
    })
}

/// `Ω` and `Ψ` for a window; fails if some `U_ℓ^k` or `L_{r+1}^k` vanishes.
pub fn aggregate_coefficients(decomp: &EigenDecomposition, w: Window) -> Result<AggregateCoefficients> {
    let n = decomp.dim();
    w.check(n)?;
    let mut u_tail = Vec::with_capacity(n);
    let mut l_tail = Vec::with_capacity(n);
    let mut offending = Vec::new();
    for k in 0..n {
        let t = WeightTails::of(&decomp.coordinate_weights(k), w);
        if t.u_ell <= TAIL_EPS {
            offending.push(format!("(k = {}, U_ell)", k + 1));
        }
        if t.l_rplus1 <= TAIL_EPS {
            offending.push(format!("(k = {}, L_(r+1))", k + 1));
        }
        u_tail.push(t.u_ell);
        l_tail.push(t.l_rplus1);
    }
    if !offending.is_empty() {
        return Err(Error::DegenerateTail(offending.join(", ")));
    }
    let coef =
        |j: usize, tails: &[f64]| -> f64 { (0..n).map(|k| decomp.component(j - 1, k).norm_sqr() / tails[k]).sum() };
    Ok(AggregateCoefficients {
        omega: (w.ell..=w.r).map(|j| coef(j, &u_tail)).collect(),
        psi: (w.ell + 1..=w.r + 1).map(|j| coef(j, &l_tail)).collect(),
    })
}

/// Sum over `k` of [`submatrix_bounds`], written through `Ω` and `Ψ`:
///
/// ```text
/// nΣλ_{j+1} + Σ(λ_ℓ − λ_{j+1})Ψ_{j+1}(r)  ≤  Σ_k Σ_j μ_{k,j}  ≤  nΣλ_j − Σ(λ_j − λ_{r+1})Ω_j(ℓ)
/// ```
pub fn aggregate_renormalized_bounds(decomp: &EigenDecomposition, w: Window) -> Result<BoundInterval> {
    let coefs = aggregate_coefficients(decomp, w)?;
    let n = decomp.dim() as f64;
    let l = decomp.spectrum.values();
    let (ell, r) = (w.ell, w.r);
    let mut lower = n * sum_range(l, ell + 1, r + 1);
    let mut upper = n * sum_range(l, ell, r);
    for (idx, j) in (ell..=r).enumerate() {
        lower += (lam(l, ell) - lam(l, j + 1)) * coefs.psi[idx];
        upper -= (lam(l, j) - lam(l, r + 1)) * coefs.omega[idx];
    }
    Ok(BoundInterval {
        lower,
        upper,
        source: BoundSource::AggregateRenormalized,
    })
}

/// `[(r−ℓ+1)λ_ℓ + (n−1)Σλ_{j+1}, (n−1)Σλ_j + (r−ℓ+1)λ_{r+1}]`.
pub fn aggregate_bounds(lambda: &Spectrum, w: Window) -> Result<BoundInterval> {
    let n = lambda.len();
    w.check(n)?;
    let l = lambda.values();
    let m = (n - 1) as f64;
    let count = w.len() as f64;
    // Evaluation order matches thompson_bounds so that ℓ = r agrees bit for bit.
    Ok(BoundInterval {
        lower: count * lam(l, w.ell) + m * sum_range(l, w.ell + 1, w.r + 1),
        upper: m * sum_range(l, w.ell, w.r) + count * lam(l, w.r + 1),
        source: BoundSource::AggregateRelaxed,
    })
}

/// `[(n−ℓ)λ_ℓ + (n−1)Σ_{ℓ+1}^r λ_j + rλ_n, (n−ℓ)λ_1 + (n−1)Σ_{ℓ+1}^r λ_j + rλ_{r+1}]`.
pub fn aggregate_corollary_bounds(lambda: &Spectrum, w: Window) -> Result<BoundInterval> {
    let n = lambda.len();
    w.check(n)?;
    let l = lambda.values();
    let (ell, r) = (w.ell, w.r);
    let inner = (n - 1) as f64 * if ell < r { sum_range(l, ell + 1, r) } else { 0.0 };
    let head = (n - ell) as f64;
    Ok(BoundInterval {
        lower: head * lam(l, ell) + inner + r as f64 * lam(l, n),
        upper: head * lam(l, 1) + inner + r as f64 * lam(l, r + 1),
        source: BoundSource::AggregateCorollary,
    })
}

/// Intersection of [`aggregate_bounds`] and [`aggregate_corollary_bounds`].
pub fn tightest_bounds(lambda: &Spectrum, w: Window) -> Result<BoundInterval> {
    let a = aggregate_bounds(lambda, w)?;
    let b = aggregate_corollary_bounds(lambda, w)?;
    let lower = a.lower.max(b.lower);
    let upper = a.upper.min(b.upper);
    let scale = lambda.len() as f64 * lambda.spread();
    if lower > upper + 1e-12 * scale {
        return Err(Error::EmptyIntersection { lower, upper });
    }
    Ok(BoundInterval {
        lower,
        upper,
        source: BoundSource::Tightest,
    })
}

/// Passes when `lower − tol ≤ actual ≤ upper + tol` with
/// `tol = 1e-8 · max(1, scale)`.
pub fn verify_bound(interval: &BoundInterval, actual: f64, scale: f64) -> Verdict {
    let tolerance = VERIFY_REL_TOL * scale.max(1.0);
    verify_with_tolerance(interval, actual, tolerance)
}

pub fn verify_with_tolerance(interval: &BoundInterval, actual: f64, tolerance: f64) -> Verdict {
    let slack_lower = actual - interval.lower;
    let slack_upper = interval.upper - actual;
    Verdict {
        pass: slack_lower >= -tolerance && slack_upper >= -tolerance,
        slack_lower,
        slack_upper,
        tolerance,
    }
}
