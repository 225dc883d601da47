//! Subcommand implementations. Each returns the JSON document to emit, a
//! one-line summary for stderr and the exit status.

use std::collections::BTreeMap;

use jointsim::decomp::{decompose_family, decompose_with_profiles, Tag};
use jointsim::famgen::{generate, GenSpec};
use jointsim::matcore::{inverse, op_norm};
use jointsim::simjoint::{
    contraction_bound, joint_similarity, uniform_family_report, UniformFamilyReport, MIN_K,
};
use jointsim::spectra::{
    profile, verify_power_bound_inequality, PowerBoundCertificate, PowerCheckReport,
    SpectralProfile,
};
use jointsim::{CMatrix, Error, FamilySpec, Result, ToleranceConfig};
use serde::Serialize;
use serde_json::Value;

use crate::document::{
    CertificateDocument, ComplexArray, ComplexNumber, FamilyDocument, ToleranceOverrides,
};
use crate::exit;

pub struct Outcome {
    pub document: Value,
    pub summary: String,
    pub status: u8,
}

fn ok(document: impl Serialize, summary: String) -> Result<Outcome> {
    Ok(Outcome {
        document: to_value(document),
        summary,
        status: exit::OK,
    })
}

fn to_value(document: impl Serialize) -> Value {
    serde_json::to_value(document).expect("documents serialize to JSON")
}

// ── analyze ──

#[derive(Serialize)]
struct SpectrumEntry {
    value: ComplexNumber,
    multiplicity: usize,
}

#[derive(Serialize)]
struct BlockEntry {
    eigenvalue: ComplexNumber,
    size: usize,
}

#[derive(Serialize)]
struct MemberReport {
    name: String,
    norm: f64,
    spectral_radius: f64,
    spectrum: Vec<SpectrumEntry>,
    delta_set: Vec<ComplexNumber>,
    delta: Option<f64>,
    jordan_blocks: Vec<BlockEntry>,
    power_bound: PowerBoundCertificate,
    /// Sampled check of the power-bound inequalities; absent when the member
    /// is not certified.
    power_check: Option<PowerCheckReport>,
}

#[derive(Serialize)]
struct CommutatorReport {
    /// Names of the pair with the largest normalized commutator.
    worst_pair: Option<(String, String)>,
    residual: f64,
    commuting: bool,
}

#[derive(Serialize)]
struct AnalysisReport {
    n: usize,
    members: Vec<MemberReport>,
    commutator: CommutatorReport,
    uniform: UniformFamilyReport,
    tolerances: ToleranceConfig,
}

fn member_report(name: &str, t: &CMatrix, p: &SpectralProfile, p_max: u32) -> Result<MemberReport> {
    let power_check = match verify_power_bound_inequality(t, p, p_max) {
        Ok(report) => Some(report),
        Err(Error::DomainViolation(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MemberReport {
        name: name.to_string(),
        norm: p.norm,
        spectral_radius: p.spectral_radius(),
        spectrum: p
            .spectrum
            .iter()
            .map(|c| SpectrumEntry {
                value: c.value.into(),
                multiplicity: c.algebraic_multiplicity,
            })
            .collect(),
        delta_set: p.delta_set.iter().map(|&z| z.into()).collect(),
        delta: p.delta_value,
        jordan_blocks: p
            .jordan
            .blocks
            .iter()
            .map(|b| BlockEntry {
                eigenvalue: b.eigenvalue.into(),
                size: b.size,
            })
            .collect(),
        power_bound: p.power_bound,
        power_check,
    })
}

fn profiles(family: &FamilySpec) -> Result<Vec<SpectralProfile>> {
    family.members().iter().map(|t| profile(t, &family.tol)).collect()
}

pub fn analyze(family: &FamilySpec, p_max: u32) -> Result<Outcome> {
    let profiles = profiles(family)?;
    let members = family
        .names()
        .iter()
        .zip(family.members())
        .zip(&profiles)
        .map(|((name, t), p)| member_report(name, t, p, p_max))
        .collect::<Result<Vec<_>>>()?;
    let worst = family.worst_commutator()?;
    let commutator = CommutatorReport {
        worst_pair: worst.map(|(i, j, _)| (family.names()[i].clone(), family.names()[j].clone())),
        residual: worst.map_or(0.0, |w| w.2),
        commuting: worst.is_none_or(|w| w.2 <= family.tol.tol_commute),
    };
    let uniform = uniform_family_report(family, &profiles, p_max);
    let summary = format!(
        "analyzed {} member(s) of dimension {}; commutator residual {:e}; {} power bounded",
        family.len(),
        family.dim(),
        commutator.residual,
        if uniform.uniform_k.is_some() { "all" } else { "not all" },
    );
    let report = AnalysisReport {
        n: family.dim(),
        members,
        commutator,
        uniform,
        tolerances: family.tol,
    };
    ok(report, summary)
}

// ── decompose ──

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TagEntry {
    Scalar { value: ComplexNumber },
    DeltaSpectrum,
}

impl From<Tag> for TagEntry {
    fn from(t: Tag) -> Self {
        match t {
            Tag::Scalar(z) => TagEntry::Scalar { value: z.into() },
            Tag::DeltaSpectrum => TagEntry::DeltaSpectrum,
        }
    }
}

#[derive(Serialize)]
struct PartEntry {
    dim: usize,
    basis: ComplexArray,
    tags: BTreeMap<String, TagEntry>,
}

#[derive(Serialize)]
struct DecompositionReport {
    parts: Vec<PartEntry>,
    assembly: ComplexArray,
    alpha: f64,
    splits: usize,
    tolerances: ToleranceConfig,
}

pub fn decompose(family: &FamilySpec) -> Result<Outcome> {
    let dec = decompose_family(family)?;
    let parts = dec
        .parts
        .iter()
        .zip(&dec.tags)
        .map(|(part, tags)| PartEntry {
            dim: part.dim(),
            basis: ComplexArray::from_matrix(part.basis()),
            tags: family
                .names()
                .iter()
                .cloned()
                .zip(tags.iter().map(|&t| t.into()))
                .collect(),
        })
        .collect();
    let summary = format!("{} part(s) of dimensions {:?}; alpha {}", dec.parts.len(), dec.dims(), dec.alpha);
    ok(
        DecompositionReport {
            parts,
            assembly: ComplexArray::from_matrix(&dec.assembly),
            alpha: dec.alpha,
            splits: dec.splits,
            tolerances: family.tol,
        },
        summary,
    )
}

// ── similarize ──

pub fn similarize(family: &FamilySpec) -> Result<Outcome> {
    match joint_similarity(family) {
        Ok(cert) => {
            let (worst, norm) = cert.worst_member();
            let summary = format!(
                "similarity found: ||Y|| = {}, bound {}, worst conjugated norm {} ({})",
                cert.norm_y,
                cert.bound,
                norm,
                cert.names[worst]
            );
            ok(CertificateDocument::from(&cert), summary)
        }
        Err(Error::VerificationFailure {
            member,
            norm,
            certificate,
        }) => Ok(Outcome {
            document: to_value(CertificateDocument::from(&*certificate)),
            summary: format!(
                "verification failed: {} has conjugated norm {norm}",
                certificate.names[member]
            ),
            status: exit::VERIFICATION,
        }),
        Err(e) => Err(e),
    }
}

// ── verify ──

/// Relative slack in the balance and bound checks.
const CHECK_SLACK: f64 = 1e-8;

#[derive(Serialize)]
struct ContractionCheck {
    passed: bool,
    tolerance: f64,
    worst_member: String,
    worst_norm: f64,
}

#[derive(Serialize)]
struct BalanceCheck {
    passed: bool,
    #[serde(rename = "norm_Y")]
    norm_y: f64,
    #[serde(rename = "norm_Yinv")]
    norm_y_inverse: f64,
    relative_gap: f64,
}

#[derive(Serialize)]
struct BoundCheck {
    passed: bool,
    bound: Option<f64>,
    alpha: Option<f64>,
    #[serde(rename = "K")]
    k: Option<f64>,
    r: Option<f64>,
    /// Why the bound could not be recomputed.
    unavailable: Option<String>,
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    conjugated_norms: BTreeMap<String, f64>,
    contraction: ContractionCheck,
    balance: BalanceCheck,
    bound: BoundCheck,
}

/// `alpha`, `K`, `r` and the bound recomputed from the family alone.
fn recomputed_bound(family: &FamilySpec) -> Result<(f64, f64, f64, f64)> {
    family.ensure_commuting()?;
    let profiles = profiles(family)?;
    if let Some((p, name)) = profiles
        .iter()
        .zip(family.names())
        .find(|(p, _)| !p.power_bound.is_power_bounded)
    {
        return Err(Error::DomainViolation(format!(
            "{name} is not power bounded ({:?})",
            p.power_bound.reason
        )));
    }
    let dec = decompose_with_profiles(family, &profiles)?;
    let k = profiles.iter().map(|p| p.norm).fold(0.0, f64::max).max(MIN_K);
    let r = profiles.iter().map(SpectralProfile::delta_radius).fold(0.0, f64::max);
    let bound = dec.alpha * contraction_bound(family.dim(), k, r);
    Ok((dec.alpha, k, r, bound))
}

pub fn verify(family: &FamilySpec, y: &CMatrix) -> Result<Outcome> {
    let n = family.dim();
    if y.rows() != n || y.cols() != n {
        return Err(Error::InvalidInput(format!("Y must be {n}x{n}")));
    }
    let y_inverse = inverse(y, family.tol.tol_rank)?;
    let conjugated: Vec<f64> = family
        .members()
        .iter()
        .map(|t| op_norm(&(&(y * t) * &y_inverse)))
        .collect::<Result<_>>()?;
    let (worst, worst_norm) = conjugated
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("families are non-empty");
    let contraction = ContractionCheck {
        passed: worst_norm <= 1.0 + family.tol.tol_contraction,
        tolerance: family.tol.tol_contraction,
        worst_member: family.names()[worst].clone(),
        worst_norm,
    };

    let (norm_y, norm_y_inverse) = (op_norm(y)?, op_norm(&y_inverse)?);
    let relative_gap = (norm_y - norm_y_inverse).abs() / norm_y;
    let balance = BalanceCheck {
        passed: relative_gap <= CHECK_SLACK,
        norm_y,
        norm_y_inverse,
        relative_gap,
    };

    let bound = match recomputed_bound(family) {
        Ok((alpha, k, r, bound)) => BoundCheck {
            passed: norm_y <= bound * (1.0 + CHECK_SLACK),
            bound: Some(bound),
            alpha: Some(alpha),
            k: Some(k),
            r: Some(r),
            unavailable: None,
        },
        Err(e) => BoundCheck {
            passed: false,
            bound: None,
            alpha: None,
            k: None,
            r: None,
            unavailable: Some(e.to_string()),
        },
    };

    let passed = contraction.passed && balance.passed && bound.passed;
    let mut failed = Vec::new();
    if !contraction.passed {
        failed.push(format!(
            "contraction ({} has norm {worst_norm})",
            contraction.worst_member
        ));
    }
    if !balance.passed {
        failed.push(format!("balance (relative gap {relative_gap:e})"));
    }
    if !bound.passed {
        failed.push(match (&bound.bound, &bound.unavailable) {
            (Some(b), _) => format!("bound (||Y|| = {norm_y} > {b})"),
            (None, Some(why)) => format!("bound (unavailable: {why})"),
            (None, None) => "bound".to_string(),
        });
    }
    let summary = if passed {
        format!("verified: worst conjugated norm {worst_norm}, ||Y|| = {norm_y}")
    } else {
        format!("verification failed: {}", failed.join("; "))
    };
    let report = VerifyReport {
        passed,
        conjugated_norms: family.names().iter().cloned().zip(conjugated).collect(),
        contraction,
        balance,
        bound,
    };
    Ok(Outcome {
        document: to_value(report),
        summary,
        status: if passed { exit::OK } else { exit::VERIFICATION },
    })
}

// ── generate ──

pub fn generate_family(spec: &GenSpec, tolerances: ToleranceOverrides) -> Result<Outcome> {
    let generated = generate(spec)?;
    let family = &generated.family;
    let summary = format!(
        "generated {} member(s) of dimension {} with recipe {}",
        family.len(),
        family.dim(),
        spec.recipe
    );
    let overrides = (!tolerances.is_empty()).then_some(tolerances);
    ok(FamilyDocument::from_family(family, overrides), summary)
}
