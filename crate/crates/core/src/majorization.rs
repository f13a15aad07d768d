//! Majorization of real vectors, the replicated vectors `λ*`, `μ*`, `ν*`
//! built from a spectrum and its critical points, and the doubly stochastic
//! matrix carrying `λ*` to `μ*`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Spectrum;
use crate::secular::{critical_points, sensitivities, SecularProblem, SensitivityMatrix};

/// Prefix-gap lists longer than this are dropped from serialized reports.
pub const MAX_SERIALIZED_GAPS: usize = 10_000;
pub const DOUBLY_STOCHASTIC_TOL: f64 = 1e-9;

/// A multiset of reals kept sorted non-increasingly.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RealMultiset {
    values: Vec<f64>,
}

impl RealMultiset {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        RealMultiset { values }
    }

    /// Each value repeated `copies` times.
    pub fn replicated(values: &[f64], copies: usize) -> Self {
        let mut out = Vec::with_capacity(values.len() * copies);
        for &v in values {
            out.extend(std::iter::repeat_n(v, copies));
        }
        Self::new(out)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Multiset union.
    pub fn concat(parts: &[&RealMultiset]) -> Self {
        Self::new(parts.iter().flat_map(|p| p.values.iter().copied()).collect())
    }

    /// `1e-9 · max(1, Σ|x|/N) · N`.
    pub fn default_tolerance(&self) -> f64 {
        let n = self.values.len().max(1) as f64;
        let mean_abs = self.values.iter().map(|v| v.abs()).sum::<f64>() / n;
        1e-9 * mean_abs.max(1.0) * n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub verdict: bool,
    pub min_gap: f64,
    pub total_residual: f64,
    #[serde(rename = "gaps", skip_serializing_if = "Option::is_none")]
    pub partial_sum_gaps: Option<Vec<f64>>,
    #[serde(skip)]
    pub tolerance: f64,
}

impl MajorizationReport {
    pub fn gaps(&self) -> &[f64] {
        self.partial_sum_gaps.as_deref().unwrap_or(&[])
    }
}

/// Checks `x ≻ y`: every prefix sum of `x↓` is at least that of `y↓`
/// (within `tol`) and the totals agree within `tol`.
pub fn majorizes(x: &RealMultiset, y: &RealMultiset, tol: f64) -> Result<MajorizationReport> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mut gaps = Vec::with_capacity(x.len());
    let (mut sx, mut sy) = (0.0, 0.0);
    let mut min_gap = f64::INFINITY;
    for (a, b) in x.values.iter().zip(&y.values) {
        sx += a;
        sy += b;
        let g = sx - sy;
        min_gap = min_gap.min(g);
        gaps.push(g);
    }
    let total_residual = gaps.last().map_or(0.0, |g| g.abs());
    if gaps.is_empty() {
        min_gap = 0.0;
    }
    let verdict = min_gap >= -tol && total_residual <= tol;
    Ok(MajorizationReport {
        verdict,
        min_gap,
        total_residual,
        partial_sum_gaps: (gaps.len() <= MAX_SERIALIZED_GAPS).then_some(gaps),
        tolerance: tol,
    })
}

/// Each `λ_j` repeated `n−1` times, each critical point `μ_k` repeated `n`
/// times, and each `ν_j = ((n−1)/n)λ_{j+1} + λ_1/n` repeated `n` times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarVectors {
    pub lambda_star: RealMultiset,
    pub mu_star: RealMultiset,
    pub nu_star: RealMultiset,
}

pub fn build_star_vectors(lambda: &Spectrum) -> Result<StarVectors> {
    let n = lambda.len();
    if n < 2 {
        return Err(Error::DimensionTooSmall { n });
    }
    let mu = critical_points(lambda.values())?.roots;
    let nf = n as f64;
    let nu: Vec<f64> = (1..n)
        .map(|j| (nf - 1.0) / nf * lambda.at(j + 1) + lambda.at(1) / nf)
        .collect();
    Ok(StarVectors {
        lambda_star: RealMultiset::replicated(lambda.values(), n - 1),
        mu_star: RealMultiset::replicated(&mu, n),
        nu_star: RealMultiset::replicated(&nu, n),
    })
}

/// Reports for `λ* ≻ μ*` and `μ* ≻ ν*`, each at the default tolerance of its
/// majorizing side.
pub fn check_star_majorization(lambda: &Spectrum) -> Result<(MajorizationReport, MajorizationReport)> {
    let s = build_star_vectors(lambda)?;
    let upper = majorizes(&s.lambda_star, &s.mu_star, s.lambda_star.default_tolerance())?;
    let lower = majorizes(&s.mu_star, &s.nu_star, s.mu_star.default_tolerance())?;
    Ok((upper, lower))
}

/// Dense `N × N` doubly stochastic matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublyStochasticMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl DoublyStochasticMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    /// 0-based.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.size + col]
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|row sum − 1|` and `|column sum − 1|`.
    pub fn max_sum_deviation(&self) -> f64 {
        let n = self.size;
        let rows = self.entries.chunks(n).map(|r| (r.iter().sum::<f64>() - 1.0).abs());
        let cols = (0..n).map(|c| ((0..n).map(|r| self.get(r, c)).sum::<f64>() - 1.0).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        self.min_entry() >= -1e-12 && self.max_sum_deviation() <= tol
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.size)
            .map(|row| row.iter().zip(x).map(|(d, v)| d * v).sum())
            .collect()
    }
}

/// Row of `D` for the pair `(k, m)`, with `k ∈ 1..n−1`, `m ∈ 1..n`.
pub fn transport_row(n: usize, k: usize, m: usize) -> usize {
    (k - 1) * n + (m - 1)
}

/// Column of `D` for the pair `(j, ℓ)`, with `j ∈ 1..n`, `ℓ ∈ 1..n−1`.
pub fn transport_col(n: usize, j: usize, ell: usize) -> usize {
    (j - 1) * (n - 1) + (ell - 1)
}

/// `W = ∂μ/∂λ` and its inflation `D[(k,m),(j,ℓ)] = W[k][j]/(n−1)`.
pub fn build_transport(lambda: &Spectrum) -> Result<(SensitivityMatrix, DoublyStochasticMatrix)> {
    let n = lambda.len();
    if n < 2 {
        return Err(Error::DimensionTooSmall { n });
    }
    let w = sensitivities(&SecularProblem::equal_weights(lambda.values().to_vec())?)?;
    let size = n * (n - 1);
    let mut entries = vec![0.0; size * size];
    let scale = 1.0 / (n - 1) as f64;
    for k in 1..n {
        for m in 1..=n {
            let row = transport_row(n, k, m);
            for j in 1..=n {
                let v = w.get(k - 1, j - 1) * scale;
                for ell in 1..n {
                    entries[row * size + transport_col(n, j, ell)] = v;
                }
            }
        }
    }
    Ok((w, DoublyStochasticMatrix { size, entries }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportVerdict {
    pub pass: bool,
    pub min_entry: f64,
    pub max_sum_deviation: f64,
    pub max_residual: f64,
}

/// Passes when `D` is doubly stochastic within `1e-9` and
/// `max|μ* − Dλ*| ≤ 1e-9 · max(1, spread)`.
pub fn verify_transport(lambda: &Spectrum) -> Result<TransportVerdict> {
    let (_, d) = build_transport(lambda)?;
    let stars = build_star_vectors(lambda)?;
    let image = d.apply(stars.lambda_star.values());
    let max_residual = image
        .iter()
        .zip(stars.mu_star.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let min_entry = d.min_entry();
    let max_sum_deviation = d.max_sum_deviation();
    let pass = d.is_doubly_stochastic(DOUBLY_STOCHASTIC_TOL) && max_residual <= 1e-9 * lambda.spread();
    Ok(TransportVerdict {
        pass,
        min_entry,
        max_sum_deviation,
        max_residual,
    })
}
