//! Spectra of all `m × m` principal submatrices and the majorizations
//! between them, together with products of principal minors.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{delete_one, eigenvalues, principal_submatrix, HermitianMatrix, IndexSet, Spectrum};
use crate::majorization::{majorizes, MajorizationReport, RealMultiset};

/// Hard cap on the number of eigenvalues collected into one vector.
pub const MAX_COLLECTION_LEN: u128 = 1_000_000;
/// Largest dimension for which all principal minors are enumerated.
pub const MAX_MINOR_DIM: usize = 14;
const PSD_REL_TOL: f64 = 1e-10;
const SZASZ_REL_TOL: f64 = 1e-9;

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All `m`-subsets of `{1..n}` in lexicographic order.
pub fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m == 0 || m > n {
        return out;
    }
    let mut idx: Vec<usize> = (1..=m).collect();
    loop {
        out.push(idx.clone());
        let mut i = m;
        while i > 0 && idx[i - 1] == n - m + i {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

fn guard(requested: u128) -> Result<()> {
    if requested > MAX_COLLECTION_LEN {
        return Err(Error::ExplosionGuard {
            requested,
            limit: MAX_COLLECTION_LEN,
        });
    }
    Ok(())
}

/// `X_m(A)`: eigenvalues of every `m × m` principal submatrix, with
/// repetitions, sorted non-increasingly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectraCollection {
    pub m: usize,
    pub values: RealMultiset,
}

/// `copies` concatenations of one spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicatedSpectrum {
    pub copies: usize,
    pub base: Vec<f64>,
    pub flattened: RealMultiset,
}

pub fn compute_x(a: &HermitianMatrix, m: usize) -> Result<SpectraCollection> {
    let n = a.dim();
    if m == 0 || m > n {
        return Err(Error::SizeOutOfRange { m, n });
    }
    guard(binomial(n, m) * m as u128)?;
    let spectra: Vec<Vec<f64>> = subsets(n, m)
        .into_par_iter()
        .map(|kept| {
            let sub = principal_submatrix(a, &IndexSet::new(kept)?)?;
            Ok(eigenvalues(&sub)?.into_values())
        })
        .collect::<Result<_>>()?;
    Ok(SpectraCollection {
        m,
        values: RealMultiset::new(spectra.concat()),
    })
}

pub fn compute_y(lambda: &Spectrum, copies: usize) -> Result<ReplicatedSpectrum> {
    if copies == 0 {
        return Err(Error::Config("copies must be positive".into()));
    }
    guard(copies as u128 * lambda.len() as u128)?;
    Ok(ReplicatedSpectrum {
        copies,
        base: lambda.values().to_vec(),
        flattened: RealMultiset::replicated(lambda.values(), copies),
    })
}

/// `⋃_k X_m(A_k)` over the `n` deleted-row submatrices.
pub fn x_over_deletions(a: &HermitianMatrix, m: usize) -> Result<RealMultiset> {
    let n = a.dim();
    let parts = (1..=n)
        .map(|k| compute_x(&delete_one(a, k)?, m).map(|x| x.values))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&RealMultiset> = parts.iter().collect();
    Ok(RealMultiset::concat(&refs))
}

fn tolerance(len: usize, spread: f64) -> f64 {
    1e-8 * len.max(1) as f64 * spread
}

/// Partial sums of `X_{n−1}` against `n−1` copies of `λ(A)` at the nodal
/// positions `p = rn`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalReport {
    pub n: usize,
    pub node_gaps: Vec<f64>,
    pub min_node_gap: f64,
    pub final_residual: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

pub fn nodal_check(a: &HermitianMatrix) -> Result<NodalReport> {
    let n = a.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall { n });
    }
    let lambda = eigenvalues(a)?;
    let x = compute_x(a, n - 1)?.values;
    let y = compute_y(&lambda, n - 1)?.flattened;
    let tol = tolerance(n, lambda.spread());
    let (mut sx, mut sy) = (0.0, 0.0);
    let mut node_gaps = Vec::with_capacity(n - 1);
    for (p, (xv, yv)) in x.values().iter().zip(y.values()).enumerate() {
        sx += xv;
        sy += yv;
        if (p + 1) % n == 0 {
            node_gaps.push(sy - sx);
        }
    }
    let min_node_gap = node_gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let final_residual = node_gaps.last().map_or(0.0, |g| g.abs());
    Ok(NodalReport {
        n,
        verdict: min_node_gap >= -tol && final_residual <= tol,
        node_gaps,
        min_node_gap,
        final_residual,
        tolerance: tol,
    })
}

/// `Y_{n,m}(A) ≻ X_m(A)` with `C(n−1, m−1)` copies of `λ(A)`.
pub fn full_majorization_check(a: &HermitianMatrix, m: usize) -> Result<MajorizationReport> {
    let n = a.dim();
    if m == 0 || m > n {
        return Err(Error::SizeOutOfRange { m, n });
    }
    let lambda = eigenvalues(a)?;
    let copies = binomial(n - 1, m - 1) as usize;
    let y = compute_y(&lambda, copies)?.flattened;
    let x = compute_x(a, m)?.values;
    let tol = tolerance(x.len(), lambda.spread());
    majorizes(&y, &x, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub lhs_copies: u128,
    pub rhs_copies: u128,
    pub verdict: bool,
    pub min_gap: f64,
    pub total_residual: f64,
    #[serde(skip)]
    pub length: usize,
}

fn hierarchy_from(
    collections: &[SpectraCollection],
    n: usize,
    k: usize,
    m: usize,
    spread: f64,
) -> Result<HierarchyReport> {
    let lhs_copies = binomial(m - 1, k - 1);
    let rhs_copies = binomial(n - k, m - k);
    let lhs_len = binomial(n, m) * m as u128 * lhs_copies;
    let rhs_len = binomial(n, k) * k as u128 * rhs_copies;
    if lhs_len != rhs_len {
        return Err(Error::LengthMismatch {
            left: lhs_len as usize,
            right: rhs_len as usize,
        });
    }
    guard(lhs_len)?;
    let lhs = RealMultiset::replicated(collections[m - 1].values.values(), lhs_copies as usize);
    let rhs = RealMultiset::replicated(collections[k - 1].values.values(), rhs_copies as usize);
    let report = majorizes(&lhs, &rhs, tolerance(lhs.len(), spread))?;
    Ok(HierarchyReport {
        n,
        k,
        m,
        lhs_copies,
        rhs_copies,
        verdict: report.verdict,
        min_gap: report.min_gap,
        total_residual: report.total_residual,
        length: lhs.len(),
    })
}

fn check_sizes(n: usize, k: usize, m: usize) -> Result<()> {
    if k == 0 || k > m {
        return Err(Error::SizeOutOfRange { m: k, n: m });
    }
    if m > n {
        return Err(Error::SizeOutOfRange { m, n });
    }
    Ok(())
}

/// `C(m−1, k−1)` copies of `X_m(A)` against `C(n−k, m−k)` copies of `X_k(A)`.
pub fn hierarchy_check(a: &HermitianMatrix, k: usize, m: usize) -> Result<HierarchyReport> {
    let n = a.dim();
    check_sizes(n, k, m)?;
    guard(binomial(n, m) * m as u128 * binomial(m - 1, k - 1))?;
    let spread = eigenvalues(a)?.spread();
    let mut collections: Vec<SpectraCollection> = (1..=m)
        .map(|s| SpectraCollection {
            m: s,
            values: RealMultiset::new(Vec::new()),
        })
        .collect();
    collections[k - 1] = compute_x(a, k)?;
    collections[m - 1] = compute_x(a, m)?;
    hierarchy_from(&collections, n, k, m, spread)
}

/// [`hierarchy_check`] for every pair `1 ≤ k ≤ m ≤ n`, computing each
/// `X_m(A)` once.
pub fn hierarchy_check_all(a: &HermitianMatrix) -> Result<Vec<HierarchyReport>> {
    let n = a.dim();
    let spread = eigenvalues(a)?.spread();
    let collections = (1..=n).map(|m| compute_x(a, m)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for m in 1..=n {
        for k in 1..=m {
            out.push(hierarchy_from(&collections, n, k, m, spread)?);
        }
    }
    Ok(out)
}

/// `P_m(A)`, the product of all `m × m` principal minors, stored as a sign
/// and a natural log of the magnitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorProducts {
    pub log_abs: Vec<f64>,
    pub negative: Vec<bool>,
}

impl MinorProducts {
    /// `P_m` for `m` in `1..=n`.
    pub fn value(&self, m: usize) -> f64 {
        let v = self.log_abs[m - 1].exp();
        if self.negative[m - 1] {
            -v
        } else {
            v
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (1..=self.log_abs.len()).map(|m| self.value(m)).collect()
    }
}

fn minor_logs(a: &HermitianMatrix, clamp: bool) -> Result<MinorProducts> {
    let n = a.dim();
    if n > MAX_MINOR_DIM {
        return Err(Error::ExplosionGuard {
            requested: 1u128 << n,
            limit: 1u128 << MAX_MINOR_DIM,
        });
    }
    let mut log_abs = Vec::with_capacity(n);
    let mut negative = Vec::with_capacity(n);
    for m in 1..=n {
        let per_minor: Vec<(f64, bool)> = subsets(n, m)
            .into_par_iter()
            .map(|kept| {
                let sub = principal_submatrix(a, &IndexSet::new(kept)?)?;
                let spec = eigenvalues(&sub)?;
                let mut log = 0.0;
                let mut neg = false;
                for &l in spec.values() {
                    let l = if clamp { l.max(0.0) } else { l };
                    log += l.abs().ln();
                    neg ^= l < 0.0;
                }
                Ok((log, neg))
            })
            .collect::<Result<_>>()?;
        log_abs.push(per_minor.iter().map(|p| p.0).sum());
        negative.push(per_minor.iter().fold(false, |acc, p| acc ^ p.1));
    }
    Ok(MinorProducts { log_abs, negative })
}

/// Determinants come from eigenvalue products of each submatrix.
pub fn minor_products(a: &HermitianMatrix) -> Result<MinorProducts> {
    minor_logs(a, false)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SzaszReport {
    /// `ln P_m / C(n−1, m−1)` for `m = 1..n`.
    pub normalized_logs: Vec<f64>,
    pub pairs_checked: usize,
    /// Largest `lhs − rhs` over all pairs (in log units).
    pub worst_excess: f64,
    pub pass: bool,
}

/// `P_m^{1/C(n−1,m−1)} ≤ P_k^{1/C(n−1,k−1)}` for every `1 ≤ k ≤ m ≤ n`,
/// compared in the log domain with relative tolerance `1e-9`.
pub fn szasz_check(a: &HermitianMatrix) -> Result<SzaszReport> {
    let n = a.dim();
    let lambda = eigenvalues(a)?;
    let lowest = lambda.at(n);
    if lowest < -PSD_REL_TOL * lambda.spread() {
        return Err(Error::NotPsd { min_eigenvalue: lowest });
    }
    let logs = minor_logs(a, true)?;
    let normalized: Vec<f64> = (1..=n)
        .map(|m| logs.log_abs[m - 1] / binomial(n - 1, m - 1) as f64)
        .collect();
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0;
    for m in 1..=n {
        for k in 1..=m {
            pairs += 1;
            let (lhs, rhs) = (normalized[m - 1], normalized[k - 1]);
            if lhs == f64::NEG_INFINITY {
                continue;
            }
            if rhs == f64::NEG_INFINITY {
                pass = false;
                worst = f64::INFINITY;
                continue;
            }
            let excess = lhs - rhs;
            worst = worst.max(excess);
            if excess > SZASZ_REL_TOL * lhs.abs().max(rhs.abs()).max(1.0) {
                pass = false;
            }
        }
    }
    Ok(SzaszReport {
        normalized_logs: normalized,
        pairs_checked: pairs,
        worst_excess: worst,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductVerdict {
    pub pass: bool,
    pub log_product_x: f64,
    pub log_product_y: f64,
}

/// For non-negative `x ≻ y`, checks `Π x_i ≤ Π y_i · (1 + 1e-9)`.
pub fn schur_product_bound_check(x: &RealMultiset, y: &RealMultiset) -> Result<ProductVerdict> {
    for v in [x, y] {
        if let Some((index, &value)) = v.values().iter().enumerate().find(|(_, &e)| e < 0.0) {
            return Err(Error::NegativeEntry { index, value });
        }
    }
    let rep = majorizes(x, y, x.default_tolerance())?;
    if !rep.verdict {
        return Err(Error::NotMajorizing { min_gap: rep.min_gap });
    }
    let lx: f64 = x.values().iter().map(|v| v.ln()).sum();
    let ly: f64 = y.values().iter().map(|v| v.ln()).sum();
    let pass = lx == f64::NEG_INFINITY || lx <= ly + 1e-9f64.ln_1p();
    Ok(ProductVerdict {
        pass,
        log_product_x: lx,
        log_product_y: ly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&[vec![2., 1.], vec![1., 2.]]).unwrap()
    }

    #[test]
    fn binomials_and_subsets() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(
            subsets(4, 2),
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
        assert_eq!(subsets(3, 3), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn x_examples() {
        let d = HermitianMatrix::from_diagonal(&[2., 1., 0.]);
        assert_eq!(compute_x(&d, 2).unwrap().values.values(), &[2., 2., 1., 1., 0., 0.]);
        let a = HermitianMatrix::from_real_rows(&[vec![1., 0.5, 0.], vec![0.5, -1., 0.3], vec![0., 0.3, 4.]]).unwrap();
        assert_eq!(
            compute_x(&a, 3).unwrap().values.values(),
            eigenvalues(&a).unwrap().values()
        );
        assert_eq!(compute_x(&a, 1).unwrap().values.values(), &[4., 1., -1.]);
        assert!(matches!(compute_x(&a, 4), Err(Error::SizeOutOfRange { .. })));
        let big = HermitianMatrix::identity(30);
        assert!(matches!(compute_x(&big, 15), Err(Error::ExplosionGuard { .. })));
    }

    #[test]
    fn y_examples() {
        let l = Spectrum::new(vec![2., 0.]);
        assert_eq!(compute_y(&l, 1).unwrap().flattened.values(), &[2., 0.]);
        assert_eq!(compute_y(&l, 2).unwrap().flattened.values(), &[2., 2., 0., 0.]);
        let l = Spectrum::new(vec![2., 1., 0.]);
        assert_eq!(
            compute_y(&l, binomial(2, 1) as usize).unwrap().flattened.values(),
            &[2., 2., 1., 1., 0., 0.]
        );
    }

    #[test]
    fn nodal_examples() {
        let r = nodal_check(&HermitianMatrix::from_diagonal(&[2., 1., 0.])).unwrap();
        assert!(r.verdict && r.node_gaps.iter().all(|&g| g == 0.0));
        let r = nodal_check(&two_by_two()).unwrap();
        assert!(r.verdict);
        assert_eq!(r.node_gaps.len(), 1);
        assert!(r.final_residual < 1e-12);
    }

    #[test]
    fn schur_via_full_majorization() {
        let r = full_majorization_check(&two_by_two(), 1).unwrap();
        assert!(r.verdict);
        assert!((r.gaps()[0] - 1.0).abs() < 1e-12);
        let r = full_majorization_check(&two_by_two(), 2).unwrap();
        assert!(r.verdict && r.gaps().iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn hierarchy_diagonal() {
        let d = HermitianMatrix::from_diagonal(&[2., 1., 0.]);
        let r = hierarchy_check(&d, 1, 2).unwrap();
        assert_eq!((r.lhs_copies, r.rhs_copies), (1, 2));
        assert!(r.verdict && r.min_gap == 0.0);
        assert!(matches!(hierarchy_check(&d, 3, 2), Err(Error::SizeOutOfRange { .. })));
        assert_eq!(hierarchy_check_all(&d).unwrap().len(), 6);
    }

    #[test]
    fn minor_product_examples() {
        assert_eq!(
            minor_products(&HermitianMatrix::identity(3)).unwrap().values(),
            vec![1., 1., 1.]
        );
        let p = minor_products(&two_by_two()).unwrap().values();
        assert!((p[0] - 4.0).abs() < 1e-12 && (p[1] - 3.0).abs() < 1e-12);
        let p = minor_products(&HermitianMatrix::from_diagonal(&[2., 1., 0.]))
            .unwrap()
            .values();
        assert_eq!(p, vec![0., 0., 0.]);
        let neg = minor_products(&HermitianMatrix::from_diagonal(&[-2., 1.])).unwrap();
        assert_eq!(neg.values(), vec![-2., -2.]);
        assert!(matches!(
            minor_products(&HermitianMatrix::identity(15)),
            Err(Error::ExplosionGuard { .. })
        ));
    }

    #[test]
    fn szasz_examples() {
        let r = szasz_check(&two_by_two()).unwrap();
        assert!(r.pass);
        assert!((r.normalized_logs[0] - 4f64.ln()).abs() < 1e-12);
        assert!((r.normalized_logs[1] - 3f64.ln()).abs() < 1e-12);
        let r = szasz_check(&HermitianMatrix::identity(4)).unwrap();
        assert!(r.pass && r.normalized_logs.iter().all(|&v| v == 0.0) && r.worst_excess == 0.0);
        let r = szasz_check(&HermitianMatrix::from_diagonal(&[2., 1., 0.])).unwrap();
        assert!(r.pass);
        assert!(matches!(
            szasz_check(&HermitianMatrix::from_diagonal(&[1., -1.])),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn product_bound_examples() {
        let ms = |v: &[f64]| RealMultiset::new(v.to_vec());
        assert!(schur_product_bound_check(&ms(&[3., 1.]), &ms(&[2., 2.])).unwrap().pass);
        let eq = schur_product_bound_check(&ms(&[2., 2.]), &ms(&[2., 2.])).unwrap();
        assert!(eq.pass && eq.log_product_x == eq.log_product_y);
        assert!(matches!(
            schur_product_bound_check(&ms(&[3., -1.]), &ms(&[1., 1.])),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(matches!(
            schur_product_bound_check(&ms(&[2., 2.]), &ms(&[3., 1.])),
            Err(Error::NotMajorizing { .. })
        ));
    }
}
