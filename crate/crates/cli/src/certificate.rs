//! Certificate documents written by `design` and read by `verify`/`simulate`.
//!
//! Floats are written in shortest round-trip form, so parsing a document
//! restores every value bit for bit.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use subopt_core::design::{CaseBCoefficient, CaseTag, DesignCertificate, VerificationReport};
use subopt_core::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub c: f64,
    pub epsilon: f64,
    pub case: String,
    pub case_b_coefficient: String,
    pub p: Vec<Vec<f64>>,
    pub k: Vec<Vec<f64>>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub p_max_eigenvalue: f64,
    pub admissible_radius: f64,
    pub requested_radius: f64,
    pub requested_radius_ok: bool,
    pub verification: VerificationDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationDoc {
    pub modes: Vec<ModeDoc>,
    pub radius_condition: bool,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeDoc {
    pub lambda: f64,
    pub hurwitz: bool,
    pub inequality_negative_definite: bool,
}

impl From<&VerificationReport> for VerificationDoc {
    fn from(report: &VerificationReport) -> Self {
        Self {
            modes: report
                .modes
                .iter()
                .map(|m| ModeDoc {
                    lambda: m.lambda,
                    hurwitz: m.hurwitz,
                    inequality_negative_definite: m.inequality_negative_definite,
                })
                .collect(),
            radius_condition: report.radius_condition,
            passes: report.passes(),
        }
    }
}

impl CertificateDoc {
    pub fn new(
        cert: &DesignCertificate,
        coefficient: CaseBCoefficient,
        requested_radius: f64,
        report: &VerificationReport,
    ) -> Self {
        Self {
            c: cert.c,
            epsilon: cert.epsilon,
            case: cert.case_tag.as_str().to_string(),
            case_b_coefficient: coefficient.as_str().to_string(),
            p: cert.p.to_rows(),
            k: cert.k.to_rows(),
            lambda_min: cert.lambda_min,
            lambda_max: cert.lambda_max,
            p_max_eigenvalue: cert.p_max_eigenvalue,
            admissible_radius: cert.admissible_radius,
            requested_radius,
            requested_radius_ok: cert.requested_radius_ok,
            verification: report.into(),
        }
    }

    pub fn certificate(&self) -> Result<DesignCertificate> {
        let case_tag = CaseTag::parse(&self.case)
            .ok_or_else(|| anyhow!("case: expected \"case_a\" or \"case_b\", found {:?}", self.case))?;
        let p = Matrix::from_rows(&self.p).context("p")?;
        let k = Matrix::from_rows(&self.k).context("k")?;
        ensure!(
            p.is_square(),
            "p: expected a square matrix, found {}x{}",
            p.rows(),
            p.cols()
        );
        ensure!(
            k.cols() == p.rows(),
            "k: expected {} columns to match p, found {}",
            p.rows(),
            k.cols()
        );
        Ok(DesignCertificate {
            c: self.c,
            epsilon: self.epsilon,
            case_tag,
            p,
            k,
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            p_max_eigenvalue: self.p_max_eigenvalue,
            admissible_radius: self.admissible_radius,
            requested_radius_ok: self.requested_radius_ok,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading certificate {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("invalid certificate {}", path.display()))
    }
}
