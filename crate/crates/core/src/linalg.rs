//! Dense Hermitian matrices, a cyclic complex Jacobi eigensolver, principal
//! submatrices, and compressions onto hyperplanes.
//!
//! Indices exposed through [`IndexSet`], [`delete_one`] and the spectrum
//! accessor [`Spectrum::at`] are 1-based to match the usual notation
//! `λ_1 ≥ … ≥ λ_n`; raw storage accessors are 0-based.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance used by [`validate_hermitian`] when callers have no
/// better choice.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of `‖A‖_F`.
pub const JACOBI_REL_TOL: f64 = 1e-13;

/// Maximum number of full cyclic sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 30;

const UNIT_TOL: f64 = 1e-10;

/// Spread used to scale tolerances: `max(1, λ_1 − λ_n)`.
pub fn spread_of(values: &[f64]) -> f64 {
    match (values.first(), values.last()) {
        (Some(&hi), Some(&lo)) => (hi - lo).max(1.0),
        _ => 1.0,
    }
}

/// A square complex Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    entries: Vec<C64>,
}

impl HermitianMatrix {
    /// Validates with [`HERMITIAN_TOL`].
    pub fn new(n: usize, entries: Vec<C64>) -> Result<Self> {
        validate_hermitian(n, &entries, HERMITIAN_TOL)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    len: row.len() * n,
                });
            }
            entries.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::new(n, entries)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * n + i] = C64::new(d, 0.0);
        }
        HermitianMatrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    /// Builds `(M + Mᴴ)/2` without a tolerance check. Used for products that
    /// are Hermitian up to rounding.
    pub(crate) fn symmetrized(n: usize, mut entries: Vec<C64>) -> Self {
        for i in 0..n {
            entries[i * n + i].im = 0.0;
            for j in (i + 1)..n {
                let avg = (entries[i * n + j] + entries[j * n + i].conj()) * 0.5;
                entries[i * n + j] = avg;
                entries[j * n + i] = avg.conj();
            }
        }
        HermitianMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// 0-based entry access.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i).re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Checks `M ≈ Mᴴ` relative to the largest entry and returns the
/// symmetrized matrix.
pub fn validate_hermitian(n: usize, entries: &[C64], tol: f64) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n });
    }
    if entries.len() != n * n {
        return Err(Error::NotSquare {
            rows: n,
            len: entries.len(),
        });
    }
    if let Some(index) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let max_abs = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut deviation: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let d = (entries[i * n + j] - entries[j * n + i].conj()).norm();
            deviation = deviation.max(d);
        }
    }
    let allowed = tol * max_abs;
    if deviation > allowed {
        return Err(Error::NonHermitian { deviation, allowed });
    }
    Ok(HermitianMatrix::symmetrized(n, entries.to_vec()))
}

/// Real eigenvalues sorted non-increasingly.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the values non-increasingly (stable).
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `λ_j`, 1-based.
    pub fn at(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    /// `max(1, λ_1 − λ_n)`.
    pub fn spread(&self) -> f64 {
        spread_of(&self.values)
    }

    /// Smallest difference between consecutive values (infinite for n < 2).
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Eigenvalues with a unitary matrix whose column `i` is the eigenvector of
/// `λ_{i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub spectrum: Spectrum,
    n: usize,
    vectors: Vec<C64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Component `k` (0-based) of eigenvector `i` (0-based).
    pub fn component(&self, i: usize, k: usize) -> C64 {
        self.vectors[k * self.n + i]
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        (0..self.n).map(|k| self.component(i, k)).collect()
    }

    /// Row-major `V` with eigenvectors as columns.
    pub fn vectors(&self) -> &[C64] {
        &self.vectors
    }

    /// `|⟨u, v_i⟩|²` for every eigenvector.
    pub fn weights_for(&self, u: &[C64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|k| u[k].conj() * self.component(i, k))
                    .sum::<C64>()
                    .norm_sqr()
            })
            .collect()
    }

    /// `|v_{i,k}|²` over `i` for a fixed coordinate `k` (0-based).
    pub fn coordinate_weights(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.component(i, k).norm_sqr()).collect()
    }

    /// `‖VᴴV − I‖_F`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dot: C64 = (0..n).map(|k| self.component(i, k).conj() * self.component(j, k)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                acc += (dot - target).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖A − VΛVᴴ‖_F`.
    pub fn reconstruction_residual(&self, a: &HermitianMatrix) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                let rec: C64 = (0..n)
                    .map(|i| self.component(i, r) * self.spectrum.values[i] * self.component(i, c).conj())
                    .sum();
                acc += (a.get(r, c) - rec).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

fn off_diagonal_norm(a: &[C64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi with unitary 2×2 rotations.
pub fn eigendecompose(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = a.n;
    let mut m = a.entries.clone();
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }
    let threshold = JACOBI_REL_TOL * a.frobenius_norm();

    let mut sweep = 0;
    loop {
        let off = off_diagonal_norm(&m, n);
        if off <= threshold {
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                sweeps: sweep,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, n, p, q);
            }
        }
        sweep += 1;
    }

    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = vec![C64::new(0.0, 0.0); n * n];
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + dst] = v[k * n + src];
        }
    }
    Ok(EigenDecomposition {
        spectrum: Spectrum { values },
        n,
        vectors,
    })
}

/// Eigenvalues only.
pub fn eigenvalues(a: &HermitianMatrix) -> Result<Spectrum> {
    eigendecompose(a).map(|d| d.spectrum)
}

fn rotate(m: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize) {
    let g = m[p * n + q];
    let mag = g.norm();
    if mag == 0.0 {
        return;
    }
    let phase = g / mag;
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let zeta = (aqq - app) / (2.0 * mag);
    let t = if zeta.abs() > 1e150 {
        0.5 / zeta
    } else {
        let t = 1.0 / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
        if zeta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane.
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = phase.conj() * -s;
    let jqq = phase.conj() * c;

    for k in 0..n {
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        m[k * n + p] = akp * jpp + akq * jqp;
        m[k * n + q] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = m[p * n + k];
        let aqk = m[q * n + k];
        m[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
        m[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    m[p * n + q] = C64::new(0.0, 0.0);
    m[q * n + p] = C64::new(0.0, 0.0);
    m[p * n + p].im = 0.0;
    m[q * n + q].im = 0.0;

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * jpp + vkq * jqp;
        v[k * n + q] = vkp * jpq + vkq * jqq;
    }
}

/// Strictly increasing 1-based indices selecting a principal submatrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    kept: Vec<usize>,
}

impl IndexSet {
    pub fn new(kept: Vec<usize>) -> Result<Self> {
        if kept.is_empty() {
            return Err(Error::InvalidIndexSet("empty".into()));
        }
        if kept[0] == 0 {
            return Err(Error::InvalidIndexSet("indices are 1-based".into()));
        }
        if kept.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndexSet("indices must be strictly increasing".into()));
        }
        Ok(IndexSet { kept })
    }

    /// `{1..n} \ {i}`.
    pub fn all_but(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        Self::new((1..=n).filter(|&k| k != i).collect())
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn principal_submatrix(a: &HermitianMatrix, kept: &IndexSet) -> Result<HermitianMatrix> {
    let n = a.n;
    if let Some(&bad) = kept.kept.iter().find(|&&k| k > n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    let m = kept.len();
    let mut entries = Vec::with_capacity(m * m);
    for &r in &kept.kept {
        for &c in &kept.kept {
            entries.push(a.get(r - 1, c - 1));
        }
    }
    Ok(HermitianMatrix { n: m, entries })
}

/// `A_i`: delete row and column `i` (1-based).
pub fn delete_one(a: &HermitianMatrix, i: usize) -> Result<HermitianMatrix> {
    if i == 0 || i > a.n {
        return Err(Error::IndexOutOfRange { index: i, n: a.n });
    }
    if a.n < 2 {
        return Err(Error::DimensionTooSmall { n: a.n });
    }
    principal_submatrix(a, &IndexSet::all_but(a.n, i)?)
}

/// `UᴴAU` where the columns of `U` are columns 2..n of the Householder
/// reflector sending `u` to a multiple of `e_1`.
pub fn compress(a: &HermitianMatrix, u: &[C64]) -> Result<HermitianMatrix> {
    let n = a.n;
    if u.len() != n {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: n,
        });
    }
    if n < 2 {
        return Err(Error::DimensionTooSmall { n });
    }
    let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitVector { norm });
    }
    let basis = hyperplane_basis(u);
    let m = n - 1;
    // AU, n × m
    let mut au = vec![C64::new(0.0, 0.0); n * m];
    for r in 0..n {
        for c in 0..m {
            au[r * m + c] = (0..n).map(|k| a.get(r, k) * basis[k * m + c]).sum();
        }
    }
    let mut b = vec![C64::new(0.0, 0.0); m * m];
    for r in 0..m {
        for c in 0..m {
            b[r * m + c] = (0..n).map(|k| basis[k * m + r].conj() * au[k * m + c]).sum();
        }
    }
    Ok(HermitianMatrix::symmetrized(m, b))
}

/// n × (n−1) row-major matrix with orthonormal columns spanning `u^⊥`.
fn hyperplane_basis(u: &[C64]) -> Vec<C64> {
    let n = u.len();
    let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let phase = if u[0].norm() > 0.0 {
        u[0] / u[0].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let alpha = -phase * norm;
    let mut w = u.to_vec();
    w[0] -= alpha;
    let wnorm2: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let m = n - 1;
    let mut basis = vec![C64::new(0.0, 0.0); n * m];
    for r in 0..n {
        for c in 1..n {
            let id = if r == c { 1.0 } else { 0.0 };
            basis[r * m + (c - 1)] = C64::new(id, 0.0) - w[r] * w[c].conj() * (2.0 / wnorm2);
        }
    }
    basis
}

/// Largest violation of `λ_j ≥ μ_j ≥ λ_{j+1}` (zero or negative when the
/// inner spectrum interlaces the outer one).
pub fn interlacing_violation(outer: &Spectrum, inner: &Spectrum) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for (j, &mu) in inner.values().iter().enumerate() {
        worst = worst.max(mu - outer.values[j]);
        worst = worst.max(outer.values[j + 1] - mu);
    }
    worst
}

/// Maximum normalized mismatch in
/// `|v_{i,j}|² Π_{k≠i}(λ_i − λ_k) = Π_k(λ_i − μ_{j,k})`.
///
/// Each term is divided by the larger side, floored at `1e-12` times
/// `Π_{k≠i}|λ_i − λ_k|` so that pairs where both sides vanish count as exact.
pub fn eigenvector_eigenvalue_identity_residual(a: &HermitianMatrix) -> Result<f64> {
    let n = a.n;
    if n < 2 {
        return Err(Error::DimensionTooSmall { n });
    }
    let decomp = eigendecompose(a)?;
    let lambda = decomp.spectrum.values();
    let required = 1e-8 * decomp.spectrum.spread();
    let min_gap = decomp.spectrum.min_gap();
    if min_gap <= required {
        return Err(Error::DegenerateSpectrum { min_gap, required });
    }
    let minors: Vec<Spectrum> = (1..=n)
        .map(|j| delete_one(a, j).and_then(|s| eigenvalues(&s)))
        .collect::<Result<_>>()?;

    let mut worst: f64 = 0.0;
    for i in 0..n {
        let pole_product: f64 = (0..n).filter(|&k| k != i).map(|k| lambda[i] - lambda[k]).product();
        let floor = 1e-12 * pole_product.abs();
        for (j, minor) in minors.iter().enumerate() {
            let lhs = decomp.component(i, j).norm_sqr() * pole_product;
            let rhs: f64 = minor.values().iter().map(|&mu| lambda[i] - mu).product();
            let denom = lhs.abs().max(rhs.abs()).max(floor);
            worst = worst.max((lhs - rhs).abs() / denom);
        }
    }
    Ok(worst)
}
