use crate::error::{Error, Result};
use crate::matcore::{commutator_residual, CMatrix, ToleranceConfig};

/// A named finite family of square matrices together with the tolerances
/// that govern every numerical decision made about it.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    names: Vec<String>,
    members: Vec<CMatrix>,
    pub tol: ToleranceConfig,
}

impl FamilySpec {
    /// Builds a family with default tolerances for its dimension.
    pub fn new(members: Vec<(String, CMatrix)>) -> Result<Self> {
        let n = members.first().map_or(0, |(_, m)| m.rows());
        Self::with_tolerances(members, ToleranceConfig::for_dimension(n))
    }

    pub fn with_tolerances(members: Vec<(String, CMatrix)>, tol: ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        let Some((_, first)) = members.first() else {
            return Err(Error::InvalidInput("family has no members".into()));
        };
        let n = first.rows();
        if n == 0 {
            return Err(Error::InvalidInput("matrices must be at least 1x1".into()));
        }
        let mut names = Vec::with_capacity(members.len());
        let mut mats = Vec::with_capacity(members.len());
        for (name, m) in members {
            if m.rows() != n || m.cols() != n {
                return Err(Error::InvalidInput(format!(
                    "member {name} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
            m.ensure_finite()?;
            if names.contains(&name) {
                return Err(Error::InvalidInput(format!("duplicate member name {name}")));
            }
            names.push(name);
            mats.push(m);
        }
        Ok(FamilySpec {
            names,
            members: mats,
            tol,
        })
    }

    /// Family with generated names `T1`, `T2`, ...
    pub fn from_matrices(members: Vec<CMatrix>) -> Result<Self> {
        Self::new(
            members
                .into_iter()
                .enumerate()
                .map(|(i, m)| (format!("T{}", i + 1), m))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.members[0].rows()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn members(&self) -> &[CMatrix] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &CMatrix {
        &self.members[i]
    }

    /// Worst pairwise commutator residual as `(i, j, residual)`; `None` for
    /// single-member families.
    pub fn worst_commutator(&self) -> Result<Option<(usize, usize, f64)>> {
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let r = commutator_residual(&self.members[i], &self.members[j])?;
                if worst.is_none_or(|(_, _, w)| r > w) {
                    worst = Some((i, j, r));
                }
            }
        }
        Ok(worst)
    }

    /// Fails with a commutativity violation naming the worst pair when any
    /// residual exceeds `tol_commute`.
    pub fn ensure_commuting(&self) -> Result<()> {
        if let Some((i, j, r)) = self.worst_commutator()? {
            if r > self.tol.tol_commute {
                return Err(Error::CommutativityViolation {
                    first: i,
                    second: j,
                    residual: r,
                });
            }
        }
        Ok(())
    }
}
