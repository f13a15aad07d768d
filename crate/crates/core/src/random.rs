//! Reproducible random instances.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit seed, with the
//! trial index selecting the stream. Streams for different trials are
//! independent, so trials can run in any order or on any thread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, C64};
use crate::secular::SecularProblem;

pub type Stream = ChaCha8Rng;

/// Stream `trial` of generator `seed`.
pub fn stream(seed: u64, trial: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard normal by Box–Muller.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Complex normal with `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    C64::new(s * gaussian(rng), s * gaussian(rng))
}

fn gaussian_square<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n * n).map(|_| complex_gaussian(rng)).collect()
}

/// Columns of a Gaussian matrix orthonormalized by modified Gram–Schmidt,
/// returned row-major.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let g = gaussian_square(n, rng);
        let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| g[i * n + j]).collect()).collect();
        let mut ok = true;
        for j in 0..n {
            for p in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let q = &done[p];
                let dot: C64 = q.iter().zip(rest[0].iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, qa) in rest[0].iter_mut().zip(q) {
                    *x -= dot * qa;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for x in cols[j].iter_mut() {
                *x /= norm;
            }
        }
        if ok {
            let mut out = vec![C64::new(0.0, 0.0); n * n];
            for (j, col) in cols.iter().enumerate() {
                for (i, &z) in col.iter().enumerate() {
                    out[i * n + j] = z;
                }
            }
            return out;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RandomModel {
    GaussianHermitian,
    PrescribedSpectrum { spectrum: Vec<f64> },
    PsdGram,
    Diagonal,
}

impl RandomModel {
    pub fn name(&self) -> &'static str {
        match self {
            RandomModel::GaussianHermitian => "gaussian_hermitian",
            RandomModel::PrescribedSpectrum { .. } => "prescribed_spectrum",
            RandomModel::PsdGram => "psd_gram",
            RandomModel::Diagonal => "diagonal",
        }
    }

    /// Builds a model from its name; `spectrum` is only used by
    /// `prescribed_spectrum`.
    pub fn from_name(name: &str, spectrum: Option<Vec<f64>>) -> Result<Self> {
        let model = match name {
            "gaussian_hermitian" => RandomModel::GaussianHermitian,
            "prescribed_spectrum" => RandomModel::PrescribedSpectrum {
                spectrum: spectrum.ok_or_else(|| Error::BadModel("prescribed_spectrum needs a spectrum".into()))?,
            },
            "psd_gram" => RandomModel::PsdGram,
            "diagonal" => RandomModel::Diagonal,
            other => return Err(Error::BadModel(format!("unknown model `{other}`"))),
        };
        Ok(model)
    }
}

fn matmul(n: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn adjoint(n: usize, a: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j].conj();
        }
    }
    out
}

pub fn generate<R: Rng + ?Sized>(model: &RandomModel, n: usize, rng: &mut R) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::BadModel("n must be positive".into()));
    }
    match model {
        RandomModel::GaussianHermitian => Ok(HermitianMatrix::symmetrized(n, gaussian_square(n, rng))),
        RandomModel::PrescribedSpectrum { spectrum } => {
            if spectrum.len() != n {
                return Err(Error::BadModel(format!(
                    "spectrum has {} values, expected {n}",
                    spectrum.len()
                )));
            }
            if spectrum.iter().any(|v| !v.is_finite()) || spectrum.windows(2).any(|p| p[0] < p[1]) {
                return Err(Error::BadModel("spectrum must be finite and non-increasing".into()));
            }
            let q = random_unitary(n, rng);
            let mut ql = q.clone();
            for i in 0..n {
                for j in 0..n {
                    ql[i * n + j] *= spectrum[j];
                }
            }
            Ok(HermitianMatrix::symmetrized(n, matmul(n, &ql, &adjoint(n, &q))))
        }
        RandomModel::PsdGram => {
            let b = gaussian_square(n, rng);
            Ok(HermitianMatrix::symmetrized(n, matmul(n, &adjoint(n, &b), &b)))
        }
        RandomModel::Diagonal => {
            let mut d: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
            d.sort_by(|a, b| b.total_cmp(a));
            Ok(HermitianMatrix::from_diagonal(&d))
        }
    }
}

/// Distinct Gaussian poles with weights drawn uniformly from `[0.05, 1]`.
pub fn secular_problem<R: Rng + ?Sized>(n: usize, rng: &mut R, equal: bool) -> Result<SecularProblem> {
    loop {
        let poles: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let mut sorted = poles.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let spread = crate::linalg::spread_of(&sorted);
        if sorted.windows(2).any(|p| p[0] - p[1] < 1e-6 * spread) {
            continue;
        }
        if equal {
            return SecularProblem::equal_weights(poles);
        }
        let weights = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        return SecularProblem::new(poles, weights);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues;

    #[test]
    fn same_seed_same_matrix() {
        for model in [
            RandomModel::GaussianHermitian,
            RandomModel::PsdGram,
            RandomModel::Diagonal,
        ] {
            let a = generate(&model, 5, &mut stream(7, 3)).unwrap();
            let b = generate(&model, 5, &mut stream(7, 3)).unwrap();
            assert_eq!(a, b);
            let c = generate(&model, 5, &mut stream(7, 4)).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn prescribed_spectrum_is_kept() {
        let model = RandomModel::PrescribedSpectrum {
            spectrum: vec![2., 1., 0.],
        };
        let a = generate(&model, 3, &mut stream(1, 0)).unwrap();
        let l = eigenvalues(&a).unwrap();
        for (x, y) in l.values().iter().zip([2., 1., 0.]) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!(a.entries().iter().filter(|z| z.im != 0.0).count() > 0);
    }

    #[test]
    fn bad_models() {
        let unsorted = RandomModel::PrescribedSpectrum { spectrum: vec![0., 1.] };
        assert!(matches!(
            generate(&unsorted, 2, &mut stream(0, 0)),
            Err(Error::BadModel(_))
        ));
        let short = RandomModel::PrescribedSpectrum { spectrum: vec![1.] };
        assert!(matches!(
            generate(&short, 2, &mut stream(0, 0)),
            Err(Error::BadModel(_))
        ));
        assert!(RandomModel::from_name("wishart", None).is_err());
        assert!(RandomModel::from_name("prescribed_spectrum", None).is_err());
    }

    #[test]
    fn gram_is_psd() {
        for t in 0..20 {
            let a = generate(&RandomModel::PsdGram, 6, &mut stream(11, t)).unwrap();
            assert!(eigenvalues(&a).unwrap().at(6) >= -1e-12);
        }
    }

    #[test]
    fn unitary_columns_are_orthonormal() {
        let n = 5;
        let q = random_unitary(n, &mut stream(2, 2));
        let p = matmul(n, &adjoint(n, &q), &q);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p[i * n + j] - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = stream(5, 0);
        let xs: Vec<f64> = (0..20000).map(|_| gaussian(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.05 && (var - 1.0).abs() < 0.05);
    }
}
