//! Full diagnostic report for a single matrix.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bounds::{
    aggregate_bounds, aggregate_corollary_bounds, aggregate_renormalized_bounds, submatrix_bounds, thompson_bounds,
    tightest_bounds, verify_bound, BoundInterval, BoundRecord, Window,
};
use crate::error::{Error, Result};
use crate::hierarchy::{hierarchy_check_all, nodal_check, szasz_check, HierarchyReport, NodalReport, SzaszReport};
use crate::linalg::{delete_one, eigendecompose, eigenvalues, HermitianMatrix, Spectrum};
use crate::majorization::{
    check_star_majorization, majorizes, verify_transport, MajorizationReport, RealMultiset, TransportVerdict,
};

/// Largest dimension for which the hierarchy section is produced.
pub const HIERARCHY_MAX_DIM: usize = 8;
/// Largest dimension for which the minor-product section is produced.
pub const SZASZ_MAX_DIM: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmatrixSpectrum {
    pub k: usize,
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurReport {
    pub eigenvalues: Vec<f64>,
    pub diagonal: Vec<f64>,
    pub report: MajorizationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarReport {
    pub lambda_over_mu: MajorizationReport,
    pub mu_over_nu: MajorizationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transport: Option<TransportVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InspectReport {
    pub n: usize,
    pub spectrum: Vec<f64>,
    pub psd: bool,
    pub submatrix_spectra: Vec<SubmatrixSpectrum>,
    pub bounds: Vec<BoundRecord>,
    pub schur: SchurReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stars: Option<StarReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodal: Option<NodalReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub hierarchy: Vec<HierarchyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub szasz: Option<SzaszReport>,
}

fn record(out: &mut Vec<BoundRecord>, iv: BoundInterval, w: Window, actual: f64, scale: f64) {
    out.push(BoundRecord::new(&iv, w, actual, &verify_bound(&iv, actual, scale)));
}

fn optional<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::DegenerateTail(_) | Error::DegeneratePoles { .. } | Error::DegenerateSpectrum { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn inspect(a: &HermitianMatrix) -> Result<InspectReport> {
    let n = a.dim();
    let decomp = eigendecompose(a)?;
    let lambda = decomp.spectrum.clone();
    let spread = lambda.spread();
    let psd = lambda.at(n) >= -1e-10 * spread;
    let minors: Vec<Spectrum> = if n >= 2 {
        (1..=n)
            .map(|k| eigenvalues(&delete_one(a, k)?))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let scale = n as f64 * spread;
    let mut bounds = Vec::new();
    for w in Window::all(n) {
        let actual: f64 = minors
            .iter()
            .map(|m| m.values()[w.ell - 1..w.r].iter().sum::<f64>())
            .sum();
        if w.ell == w.r {
            record(&mut bounds, thompson_bounds(&lambda, w.ell)?, w, actual, scale);
        }
        record(&mut bounds, aggregate_bounds(&lambda, w)?, w, actual, scale);
        record(&mut bounds, aggregate_corollary_bounds(&lambda, w)?, w, actual, scale);
        record(&mut bounds, tightest_bounds(&lambda, w)?, w, actual, scale);
        if let Some(iv) = optional(aggregate_renormalized_bounds(&decomp, w))? {
            record(&mut bounds, iv, w, actual, scale);
        }
        for (k, mu) in minors.iter().enumerate() {
            if let Some(iv) = optional(submatrix_bounds(&decomp, k + 1, w))? {
                let sum = mu.values()[w.ell - 1..w.r].iter().sum();
                record(&mut bounds, iv, w, sum, spread);
            }
        }
    }

    let diag = RealMultiset::new(a.diagonal());
    let eig = RealMultiset::new(lambda.values().to_vec());
    let schur = SchurReport {
        report: majorizes(&eig, &diag, eig.default_tolerance())?,
        eigenvalues: eig.values().to_vec(),
        diagonal: diag.values().to_vec(),
    };

    let stars = if n >= 2 {
        let (lambda_over_mu, mu_over_nu) = check_star_majorization(&lambda)?;
        Some(StarReport {
            lambda_over_mu,
            mu_over_nu,
            transport: optional(verify_transport(&lambda))?,
        })
    } else {
        None
    };

    let (nodal, hierarchy) = if (2..=HIERARCHY_MAX_DIM).contains(&n) {
        (Some(nodal_check(a)?), hierarchy_check_all(a)?)
    } else {
        (None, Vec::new())
    };
    let szasz = if psd && n <= SZASZ_MAX_DIM {
        Some(szasz_check(a)?)
    } else {
        None
    };

    Ok(InspectReport {
        n,
        spectrum: lambda.values().to_vec(),
        psd,
        submatrix_spectra: minors
            .into_iter()
            .enumerate()
            .map(|(k, s)| SubmatrixSpectrum {
                k: k + 1,
                spectrum: s.into_values(),
            })
            .collect(),
        bounds,
        schur,
        stars,
        nodal,
        hierarchy,
        szasz,
    })
}

fn list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn render_text(r: &InspectReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n = {}{}", r.n, if r.psd { " (positive semidefinite)" } else { "" });
    let _ = writeln!(s, "spectrum {}", list(&r.spectrum));
    for sub in &r.submatrix_spectra {
        let _ = writeln!(s, "  delete {:>2}: {}", sub.k, list(&sub.spectrum));
    }
    if !r.bounds.is_empty() {
        let _ = writeln!(s, "\nbounds");
        for b in &r.bounds {
            let _ = writeln!(
                s,
                "  {:<22} [{}, {}]  [{:.6}, {:.6}]  actual {:.6}  slack ({:.3e}, {:.3e})  {}",
                format!("{:?}", b.theorem),
                b.window[0],
                b.window[1],
                b.lower,
                b.upper,
                b.actual,
                b.slack_lower,
                b.slack_upper,
                verdict(b.pass)
            );
        }
    }
    let _ = writeln!(
        s,
        "\nschur {} majorizes {}  min gap {:.3e}  {}",
        list(&r.schur.eigenvalues),
        list(&r.schur.diagonal),
        r.schur.report.min_gap,
        verdict(r.schur.report.verdict)
    );
    if let Some(st) = &r.stars {
        let _ = writeln!(
            s,
            "lambda* over mu*  min gap {:.3e}  {}",
            st.lambda_over_mu.min_gap,
            verdict(st.lambda_over_mu.verdict)
        );
        let _ = writeln!(
            s,
            "mu* over nu*      min gap {:.3e}  {}",
            st.mu_over_nu.min_gap,
            verdict(st.mu_over_nu.verdict)
        );
        if let Some(t) = &st.transport {
            let _ = writeln!(
                s,
                "transport  min entry {:.3e}  sum deviation {:.3e}  residual {:.3e}  {}",
                t.min_entry,
                t.max_sum_deviation,
                t.max_residual,
                verdict(t.pass)
            );
        }
    }
    if let Some(nd) = &r.nodal {
        let _ = writeln!(s, "nodal gaps {}  {}", list(&nd.node_gaps), verdict(nd.verdict));
    }
    for h in &r.hierarchy {
        let _ = writeln!(
            s,
            "hierarchy k={} m={}  copies {}:{}  min gap {:.3e}  {}",
            h.k,
            h.m,
            h.lhs_copies,
            h.rhs_copies,
            h.min_gap,
            verdict(h.verdict)
        );
    }
    if let Some(z) = &r.szasz {
        let _ = writeln!(
            s,
            "szasz normalized logs {}  {}",
            list(&z.normalized_logs),
            verdict(z.pass)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BoundSource;

    #[test]
    fn diagonal_thompson() {
        let r = inspect(&HermitianMatrix::from_diagonal(&[2., 1., 0.])).unwrap();
        let t = r
            .bounds
            .iter()
            .find(|b| b.theorem == BoundSource::Thompson && b.window == [1, 1])
            .unwrap();
        assert_eq!((t.lower, t.upper, t.actual), (4.0, 5.0, 5.0));
        assert!(r.bounds.iter().all(|b| b.pass));
        assert!(r.psd && r.szasz.as_ref().unwrap().pass);
    }

    #[test]
    fn two_by_two_schur() {
        let a = HermitianMatrix::from_real_rows(&[vec![2., 1.], vec![1., 2.]]).unwrap();
        let r = inspect(&a).unwrap();
        assert!((r.schur.eigenvalues[0] - 3.0).abs() < 1e-12 && (r.schur.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert_eq!(r.schur.diagonal, vec![2., 2.]);
        assert!(r.schur.report.verdict);
        assert!(render_text(&r).contains("schur"));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["n"], 2);
    }

    #[test]
    fn one_by_one() {
        let r = inspect(&HermitianMatrix::from_diagonal(&[3.])).unwrap();
        assert!(r.bounds.is_empty() && r.stars.is_none());
    }
}
