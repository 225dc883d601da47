//! Seeded generation of test families: polynomials in one matrix, planted
//! block-diagonal and Jordan structures, and the two standard
//! counterexamples (a non-commuting pair and an unbounded nilpotent family).
//!
//! Polynomial members are built from Hermite data: on each Jordan block
//! `J_r(mu)` of the seed matrix, `p(J_r(mu)) = sum_k c_k N^k` with
//! `c_k = p^(k)(mu) / k!`. Any such data is realized by an interpolating
//! polynomial of degree at most `n - 1`, so members commute by construction.

pub mod random;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::matcore::{direct_sum, inverse, norm2, CMatrix, ToleranceConfig, C64};
use crate::spectra::{cmp_complex, JordanBlock};
use random::{conditioned_matrix, point_in_disc, rng, GenRng};

const MAX_PLACEMENT_TRIES: usize = 10_000;
const MAX_NORM_RETRIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    PolynomialsInOneMatrix,
    PlantedBlockDiagonal,
    PlantedJordan,
    CounterexampleNc,
    CounterexampleUnbounded { m: usize },
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::PolynomialsInOneMatrix => write!(f, "polynomials_in_one_matrix"),
            Recipe::PlantedBlockDiagonal => write!(f, "planted_block_diagonal"),
            Recipe::PlantedJordan => write!(f, "planted_jordan"),
            Recipe::CounterexampleNc => write!(f, "counterexample_nc"),
            Recipe::CounterexampleUnbounded { m } => write!(f, "counterexample_unbounded:{m}"),
        }
    }
}

impl FromStr for Recipe {
    type Err = Error;

    /// Accepts the snake-case names; the unbounded family takes its size as
    /// `counterexample_unbounded:5` or `counterexample_unbounded(5)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "polynomials_in_one_matrix" => return Ok(Recipe::PolynomialsInOneMatrix),
            "planted_block_diagonal" => return Ok(Recipe::PlantedBlockDiagonal),
            "planted_jordan" => return Ok(Recipe::PlantedJordan),
            "counterexample_nc" => return Ok(Recipe::CounterexampleNc),
            _ => {}
        }
        let rest = s
            .strip_prefix("counterexample_unbounded")
            .ok_or_else(|| Error::InvalidInput(format!("unknown recipe {s:?}")))?;
        let arg = rest
            .strip_prefix(':')
            .or_else(|| rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
            .ok_or_else(|| Error::InvalidInput(format!("recipe {s:?} needs a size, e.g. counterexample_unbounded:5")))?;
        let m = arg
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad family size in {s:?}")))?;
        Ok(Recipe::CounterexampleUnbounded { m })
    }
}

/// Parameters of a generated family. Only `seed`, `n` and `recipe` are
/// required when deserializing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub n: usize,
    pub recipe: Recipe,
    #[serde(default = "default_radius_cap")]
    pub spectral_radius_cap: f64,
    #[serde(default = "default_norm_cap")]
    pub norm_cap: f64,
    #[serde(default = "default_family_size")]
    pub family_size: usize,
    /// Upper limit for the condition number of the planted conjugator.
    #[serde(default = "default_cond_cap")]
    pub cond_cap: f64,
    /// Minimum distance between distinct planted eigenvalues.
    #[serde(default = "default_min_gap")]
    pub min_gap: f64,
    /// Largest planted Jordan block.
    #[serde(default = "default_max_block")]
    pub max_block: usize,
}

fn default_radius_cap() -> f64 {
    0.9
}
fn default_norm_cap() -> f64 {
    10.0
}
fn default_family_size() -> usize {
    3
}
fn default_cond_cap() -> f64 {
    10.0
}
fn default_min_gap() -> f64 {
    0.02
}
fn default_max_block() -> usize {
    2
}

impl GenSpec {
    pub fn new(seed: u64, n: usize, recipe: Recipe) -> Self {
        GenSpec {
            seed,
            n,
            recipe,
            spectral_radius_cap: default_radius_cap(),
            norm_cap: default_norm_cap(),
            family_size: default_family_size(),
            cond_cap: default_cond_cap(),
            min_gap: default_min_gap(),
            max_block: default_max_block(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cap = self.spectral_radius_cap;
        if !(cap.is_finite() && cap > 0.0 && cap <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "spectral_radius_cap must lie in (0, 1], got {cap}"
            )));
        }
        if !(self.norm_cap.is_finite() && self.norm_cap >= cap) {
            return Err(Error::InvalidInput(format!(
                "norm_cap must be finite and at least the spectral radius cap, got {}",
                self.norm_cap
            )));
        }
        if !(self.cond_cap.is_finite() && self.cond_cap >= 1.0) {
            return Err(Error::InvalidInput(format!("cond_cap must be >= 1, got {}", self.cond_cap)));
        }
        if !(self.min_gap.is_finite() && self.min_gap > 0.0) {
            return Err(Error::InvalidInput(format!("min_gap must be positive, got {}", self.min_gap)));
        }
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if self.family_size == 0 {
            return Err(Error::InvalidInput("family_size must be positive".into()));
        }
        if self.max_block == 0 {
            return Err(Error::InvalidInput("max_block must be positive".into()));
        }
        match self.recipe {
            Recipe::CounterexampleNc | Recipe::CounterexampleUnbounded { .. } if self.n != 2 => Err(
                Error::InvalidInput(format!("recipe {} is 2x2, got n = {}", self.recipe, self.n)),
            ),
            Recipe::CounterexampleUnbounded { m: 0 } => {
                Err(Error::InvalidInput("counterexample_unbounded needs m >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Planted data behind a generated family.
#[derive(Debug, Clone, Default)]
pub struct GroundTruth {
    /// The conjugator `X` with members `X M_i X^-1`.
    pub conjugator: Option<CMatrix>,
    /// The members before conjugation.
    pub unconjugated: Vec<CMatrix>,
    /// Jordan blocks of each member, sorted by eigenvalue then size
    /// descending.
    pub member_blocks: Vec<Vec<JordanBlock>>,
    /// Dimensions of the planted diagonal blocks (planted_block_diagonal).
    pub block_dims: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct GeneratedFamily {
    pub family: FamilySpec,
    pub truth: GroundTruth,
}

/// Generates the family described by `spec`; the same spec always yields
/// the same family.
pub fn generate(spec: &GenSpec) -> Result<GeneratedFamily> {
    spec.validate()?;
    let mut r = rng(spec.seed);
    let (members, truth) = match spec.recipe {
        Recipe::CounterexampleNc => {
            let t = nilpotent(2.0);
            let members = vec![t.clone(), t.adjoint()];
            (members.clone(), GroundTruth { unconjugated: members, ..Default::default() })
        }
        Recipe::CounterexampleUnbounded { m } => {
            let members: Vec<CMatrix> = (1..=m).map(|k| nilpotent(k as f64)).collect();
            let blocks = vec![vec![JordanBlock { eigenvalue: C64::new(0.0, 0.0), size: 2 }]; m];
            (
                members.clone(),
                GroundTruth {
                    unconjugated: members,
                    member_blocks: blocks,
                    ..Default::default()
                },
            )
        }
        Recipe::PlantedJordan => planted_jordan(spec, &mut r)?,
        Recipe::PolynomialsInOneMatrix => {
            let seed = SeedStructure::sample(spec, spec.n, &mut r)?;
            let data: Vec<Vec<Hermite>> = (0..spec.family_size)
                .map(|_| seed.sample_hermite(spec, &mut r))
                .collect();
            let (members, mut truth) = conjugate_members(spec, &mut r, |scale| {
                data.iter().map(|h| seed.evaluate(h, scale)).collect()
            })?;
            truth.member_blocks = data.iter().map(|h| seed.member_blocks(h)).collect();
            (members, truth)
        }
        Recipe::PlantedBlockDiagonal => planted_block_diagonal(spec, &mut r)?,
    };
    let named = members
        .into_iter()
        .enumerate()
        .map(|(i, m)| (format!("T{}", i + 1), m))
        .collect();
    let family = FamilySpec::with_tolerances(named, ToleranceConfig::for_dimension(spec.n))?;
    Ok(GeneratedFamily { family, truth })
}

fn nilpotent(k: f64) -> CMatrix {
    let mut t = CMatrix::zeros(2, 2);
    t[(0, 1)] = C64::new(k, 0.0);
    t
}

// ── Planted structures ──────────────────────────────────────────────────

/// Distinct eigenvalues of a seed matrix with their Jordan block sizes.
#[derive(Debug, Clone)]
struct SeedStructure {
    eigenvalues: Vec<C64>,
    blocks: Vec<Vec<usize>>,
}

/// Taylor coefficients `c_0, c_1, ...` of a member polynomial at each seed
/// eigenvalue.
type Hermite = Vec<C64>;

impl SeedStructure {
    /// Random partition of `n` into blocks of size at most `max_block`
    /// (polynomial recipes use at most two defective eigenvalues), grouped
    /// into distinct eigenvalues with mutual distance at least `min_gap`.
    fn sample(spec: &GenSpec, n: usize, r: &mut GenRng) -> Result<Self> {
        let max_block = spec.max_block.min(n);
        let mut sizes = Vec::new();
        let mut left = n;
        let mut defective = 0;
        while left > 0 {
            let cap = if spec.recipe == Recipe::PlantedJordan || defective < 2 {
                max_block.min(left)
            } else {
                1
            };
            let s = if cap > 1 && r.gen_bool(0.5) { r.gen_range(2..=cap) } else { 1 };
            if s > 1 {
                defective += 1;
            }
            sizes.push(s);
            left -= s;
        }
        // occasionally share an eigenvalue between two blocks (derogatory)
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for s in sizes {
            match blocks.last_mut() {
                Some(last) if r.gen_bool(0.2) => last.push(s),
                _ => blocks.push(vec![s]),
            }
        }
        for b in &mut blocks {
            b.sort_unstable_by(|a, c| c.cmp(a));
        }
        let eigenvalues = separated_points(r, blocks.len(), spec.spectral_radius_cap, spec.min_gap)?;
        Ok(SeedStructure { eigenvalues, blocks })
    }

    fn max_block(&self, k: usize) -> usize {
        self.blocks[k][0]
    }

    /// Values stay in the disc of the radius cap, defective values in 0.9
    /// of it; distinct values keep the minimum gap, exact repeats happen on
    /// purpose. Derivatives are either zero or of modulus at least 0.2 so
    /// the member's Jordan structure stays well defined.
    fn sample_hermite(&self, spec: &GenSpec, r: &mut GenRng) -> Vec<Hermite> {
        let cap = spec.spectral_radius_cap;
        let k = self.eigenvalues.len();
        if r.gen_bool(0.15) {
            let z = point_in_disc(r, cap);
            return vec![vec![z]; k];
        }
        let mut out: Vec<Hermite> = Vec::with_capacity(k);
        for i in 0..k {
            let size = self.max_block(i);
            let reuse = out
                .iter()
                .enumerate()
                .filter(|(j, h)| size == 1 && self.max_block(*j) == 1 && h.len() == 1)
                .map(|(_, h)| h[0])
                .next();
            let value = match reuse {
                Some(z) if r.gen_bool(0.1) => z,
                _ => {
                    let radius = if size > 1 { 0.9 * cap } else { cap };
                    let taken: Vec<C64> = out.iter().map(|h| h[0]).collect();
                    let mut z = point_in_disc(r, radius);
                    for _ in 0..MAX_PLACEMENT_TRIES {
                        if taken.iter().all(|w| (w - z).norm() >= spec.min_gap) {
                            break;
                        }
                        z = point_in_disc(r, radius);
                    }
                    z
                }
            };
            let mut h = vec![value];
            if size > 1 && !r.gen_bool(0.15) {
                let d = C64::from_polar(r.gen_range(0.2..1.0), r.gen_range(0.0..std::f64::consts::TAU));
                h.push(d);
                for _ in 2..size {
                    h.push(C64::from_polar(r.gen_range(0.0..0.5), r.gen_range(0.0..std::f64::consts::TAU)));
                }
            }
            out.push(h);
        }
        out
    }

    /// Block-diagonal `p(J)` for Hermite data `h`, with every derivative
    /// coefficient multiplied by `scale^k`.
    fn evaluate(&self, h: &[Hermite], scale: f64) -> CMatrix {
        let mut parts = Vec::new();
        for (k, sizes) in self.blocks.iter().enumerate() {
            for &s in sizes {
                let mut b = CMatrix::zeros(s, s);
                for (d, c) in h[k].iter().enumerate().take(s) {
                    let coef = c * scale.powi(d as i32);
                    for i in 0..s - d {
                        b[(i, i + d)] = coef;
                    }
                }
                parts.push(b);
            }
        }
        direct_sum(&parts).expect("seed structure has at least one block")
    }

    /// Jordan blocks of `p(J)`: on `J_s(mu)` with `p'(mu) != 0` the block
    /// survives, otherwise it falls apart into `s` scalar blocks (only
    /// first-order data is sampled non-zero when `p'(mu) = 0`).
    fn member_blocks(&self, h: &[Hermite]) -> Vec<JordanBlock> {
        let mut out = Vec::new();
        for (k, sizes) in self.blocks.iter().enumerate() {
            for &s in sizes {
                let z = h[k][0];
                if h[k].len() > 1 && s > 1 {
                    out.push(JordanBlock { eigenvalue: z, size: s });
                } else {
                    out.extend(std::iter::repeat_n(JordanBlock { eigenvalue: z, size: 1 }, s));
                }
            }
        }
        sort_blocks(&mut out);
        out
    }
}

pub(crate) fn sort_blocks(blocks: &mut [JordanBlock]) {
    blocks.sort_by(|a, b| cmp_complex(a.eigenvalue, b.eigenvalue).then(b.size.cmp(&a.size)));
}

/// `count` points in the disc of radius `radius`, pairwise at least `gap`
/// apart.
fn separated_points(r: &mut GenRng, count: usize, radius: f64, gap: f64) -> Result<Vec<C64>> {
    let mut pts: Vec<C64> = Vec::with_capacity(count);
    let mut tries = 0;
    while pts.len() < count {
        tries += 1;
        if tries > MAX_PLACEMENT_TRIES * count.max(1) {
            return Err(Error::InvalidInput(format!(
                "cannot place {count} eigenvalues {gap} apart in a disc of radius {radius}"
            )));
        }
        let z = point_in_disc(r, radius);
        if pts.iter().all(|w| (w - z).norm() >= gap) {
            pts.push(z);
        }
    }
    Ok(pts)
}

/// Conjugates the members produced by `build(scale)` with a random `X`.
/// When a member exceeds the norm cap, the conditioning of `X` is halved
/// and the nilpotent parts shrink (`scale` halves) until it fits.
fn conjugate_members<F>(spec: &GenSpec, r: &mut GenRng, build: F) -> Result<(Vec<CMatrix>, GroundTruth)>
where
    F: Fn(f64) -> Vec<CMatrix>,
{
    let n = spec.n;
    let mut cond = log_uniform(r, 1.0, spec.cond_cap);
    let mut scale = 1.0;
    for _ in 0..MAX_NORM_RETRIES {
        let x = conditioned_matrix(r, n, cond);
        let xi = inverse(&x, 0.0)?;
        let plain = build(scale);
        let members: Vec<CMatrix> = plain.iter().map(|m| &(&x * m) * &xi).collect();
        if members.iter().all(|m| norm2(m) <= spec.norm_cap) {
            return Ok((
                members,
                GroundTruth {
                    conjugator: Some(x),
                    unconjugated: plain,
                    ..Default::default()
                },
            ));
        }
        cond = (cond / 2.0).max(1.0);
        scale /= 2.0;
    }
    Err(Error::InvalidInput(format!(
        "could not meet norm cap {} for n = {n}",
        spec.norm_cap
    )))
}

fn log_uniform(r: &mut GenRng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    (r.gen_range(lo.ln()..=hi.ln())).exp()
}

fn planted_jordan(spec: &GenSpec, r: &mut GenRng) -> Result<(Vec<CMatrix>, GroundTruth)> {
    let seed = SeedStructure::sample(spec, spec.n, r)?;
    let h: Vec<Hermite> = seed
        .eigenvalues
        .iter()
        .map(|&z| vec![z, C64::new(1.0, 0.0)])
        .collect();
    let blocks = seed.member_blocks(&h);
    let (members, mut truth) = conjugate_members(spec, r, |_| vec![seed.evaluate(&h, 1.0)])?;
    // the Jordan matrix keeps unit superdiagonals; only X is re-drawn
    truth.member_blocks = vec![blocks];
    Ok((members, truth))
}

fn planted_block_diagonal(spec: &GenSpec, r: &mut GenRng) -> Result<(Vec<CMatrix>, GroundTruth)> {
    let n = spec.n;
    let mut dims = Vec::new();
    let mut left = n;
    while left > 0 {
        let d = r.gen_range(1..=left.min(3));
        dims.push(d);
        left -= d;
    }
    let seeds: Vec<SeedStructure> = dims
        .iter()
        .map(|&d| SeedStructure::sample(spec, d, r))
        .collect::<Result<_>>()?;
    let data: Vec<Vec<Vec<Hermite>>> = (0..spec.family_size)
        .map(|_| seeds.iter().map(|s| s.sample_hermite(spec, r)).collect())
        .collect();
    let (members, mut truth) = conjugate_members(spec, r, |scale| {
        data.iter()
            .map(|per_block| {
                let parts: Vec<CMatrix> = seeds
                    .iter()
                    .zip(per_block)
                    .map(|(s, h)| s.evaluate(h, scale))
                    .collect();
                direct_sum(&parts).expect("non-empty")
            })
            .collect()
    })?;
    truth.member_blocks = data
        .iter()
        .map(|per_block| {
            let mut all: Vec<JordanBlock> = seeds
                .iter()
                .zip(per_block)
                .flat_map(|(s, h)| s.member_blocks(h))
                .collect();
            sort_blocks(&mut all);
            all
        })
        .collect();
    truth.block_dims = dims;
    Ok((members, truth))
}
