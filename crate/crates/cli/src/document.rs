//! JSON documents read and written by the command-line tool.
//!
//! Complex arrays are stored as separate real and imaginary row arrays.

use std::collections::BTreeMap;

use jointsim::simjoint::SimilarityCertificate;
use jointsim::{CMatrix, Error, FamilySpec, Result, ToleranceConfig, C64};
use serde::{Deserialize, Serialize};

// ── Complex values ──

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexNumber {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexNumber {
    fn from(z: C64) -> Self {
        ComplexNumber { re: z.re, im: z.im }
    }
}

/// Dense complex array as two row-major real arrays of equal shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexArray {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexArray {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (re, im) = m.to_re_im();
        ComplexArray { re, im }
    }

    /// Converts to a matrix, checking both parts are `rows x cols`.
    pub fn to_matrix(&self, rows: usize, cols: usize, what: &str) -> Result<CMatrix> {
        for (label, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != rows || part.iter().any(|r| r.len() != cols) {
                return Err(Error::InvalidInput(format!(
                    "{what}: `{label}` must be a {rows}x{cols} array"
                )));
            }
        }
        let m = CMatrix::from_re_im(&self.re, &self.im)?;
        m.ensure_finite()?;
        Ok(m)
    }
}

// ── Family input ──

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMatrix {
    pub name: String,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl NamedMatrix {
    pub fn new(name: &str, m: &CMatrix) -> Self {
        let (re, im) = m.to_re_im();
        NamedMatrix {
            name: name.to_string(),
            re,
            im,
        }
    }

    pub fn to_matrix(&self, n: usize) -> Result<CMatrix> {
        let value = ComplexArray {
            re: self.re.clone(),
            im: self.im.clone(),
        };
        value.to_matrix(n, n, &format!("matrix {}", self.name))
    }
}

/// Partial tolerance settings; absent fields keep their defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_rank: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_commute: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_cluster: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_contraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_spectrum: Option<f64>,
}

impl ToleranceOverrides {
    /// Fields set in `other` win over fields set here.
    pub fn merged(self, other: ToleranceOverrides) -> Self {
        ToleranceOverrides {
            tol_rank: other.tol_rank.or(self.tol_rank),
            tol_commute: other.tol_commute.or(self.tol_commute),
            tol_cluster: other.tol_cluster.or(self.tol_cluster),
            tol_contraction: other.tol_contraction.or(self.tol_contraction),
            tol_spectrum: other.tol_spectrum.or(self.tol_spectrum),
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == ToleranceOverrides::default()
    }

    pub fn apply(&self, mut base: ToleranceConfig) -> ToleranceConfig {
        let fields = [
            (&mut base.tol_rank, self.tol_rank),
            (&mut base.tol_commute, self.tol_commute),
            (&mut base.tol_cluster, self.tol_cluster),
            (&mut base.tol_contraction, self.tol_contraction),
            (&mut base.tol_spectrum, self.tol_spectrum),
        ];
        for (slot, value) in fields {
            if let Some(v) = value {
                *slot = v;
            }
        }
        base
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub n: usize,
    pub matrices: Vec<NamedMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

impl FamilyDocument {
    pub fn from_family(family: &FamilySpec, tolerances: Option<ToleranceOverrides>) -> Self {
        FamilyDocument {
            n: family.dim(),
            matrices: family
                .names()
                .iter()
                .zip(family.members())
                .map(|(name, m)| NamedMatrix::new(name, m))
                .collect(),
            tolerances,
        }
    }

    /// Builds the family; `flags` override the document's tolerances, which
    /// override the defaults for the dimension.
    pub fn to_family(&self, flags: ToleranceOverrides) -> Result<FamilySpec> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        let members = self
            .matrices
            .iter()
            .map(|m| Ok((m.name.clone(), m.to_matrix(self.n)?)))
            .collect::<Result<Vec<_>>>()?;
        let overrides = self.tolerances.unwrap_or_default().merged(flags);
        let tol = overrides.apply(ToleranceConfig::for_dimension(self.n));
        FamilySpec::with_tolerances(members, tol)
    }
}

// ── Certificates ──

/// Serialized similarity certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    #[serde(rename = "Y")]
    pub y: ComplexArray,
    #[serde(rename = "norm_Y")]
    pub norm_y: f64,
    #[serde(rename = "norm_Yinv")]
    pub norm_y_inverse: f64,
    pub bound: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub r: f64,
    pub alpha: f64,
    pub conjugated_norms: BTreeMap<String, f64>,
    pub tolerances: ToleranceConfig,
    pub k_clamped: bool,
    pub part_dims: Vec<usize>,
    pub verified: bool,
}

impl From<&SimilarityCertificate> for CertificateDocument {
    fn from(c: &SimilarityCertificate) -> Self {
        CertificateDocument {
            y: ComplexArray::from_matrix(&c.y),
            norm_y: c.norm_y,
            norm_y_inverse: c.norm_y_inverse,
            bound: c.bound,
            k: c.k,
            r: c.r,
            alpha: c.alpha,
            conjugated_norms: c.names.iter().cloned().zip(c.conjugated_norms.iter().copied()).collect(),
            tolerances: c.tolerances,
            k_clamped: c.k_clamped,
            part_dims: c.part_dims.clone(),
            verified: c.verified,
        }
    }
}

/// What `verify` needs from a similarity file: only `Y`. Any other
/// certificate fields are accepted and ignored.
#[derive(Debug, Clone, Deserialize)]
pub struct ClaimedSimilarity {
    #[serde(rename = "Y")]
    pub y: ComplexArray,
}
