use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Group membership for random-intercept models; indices are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Groups {
    index: Vec<usize>,
    count: usize,
}

impl Groups {
    /// Every group in `0..count` must occur at least once.
    pub fn new(index: Vec<usize>, count: usize) -> Result<Self> {
        let mut seen = vec![false; count];
        for &g in &index {
            if g >= count {
                return Err(Error::InvalidArgument(format!(
                    "group index {g} outside 0..{count}"
                )));
            }
            seen[g] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!(
                "group {} has no observations",
                missing + 1
            )));
        }
        Ok(Self { index, count })
    }

    /// Maps arbitrary labels to indices in order of first appearance.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> (Self, Vec<String>) {
        let mut names: Vec<String> = Vec::new();
        let mut lookup = std::collections::HashMap::new();
        let index = labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                *lookup.entry(l.to_string()).or_insert_with(|| {
                    names.push(l.to_string());
                    names.len() - 1
                })
            })
            .collect();
        let count = names.len();
        (Self { index, count }, names)
    }

    pub fn index(&self) -> &[usize] {
        &self.index
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Responses, design matrix, and optional group labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    y: DVector<f64>,
    x: DMatrix<f64>,
    groups: Option<Groups>,
}

impl Dataset {
    pub fn new(y: DVector<f64>, x: DMatrix<f64>) -> Result<Self> {
        if y.is_empty() || x.ncols() == 0 {
            return Err(Error::InvalidArgument("need n ≥ 1 and p ≥ 1".into()));
        }
        if x.nrows() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "design has {} rows but there are {} responses",
                x.nrows(),
                y.len()
            )));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Restriction {
                index: i,
                message: "y must be finite".into(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("design has non-finite entries".into()));
        }
        Ok(Self { y, x, groups: None })
    }

    /// Builds a dataset from row-major covariate rows.
    pub fn from_rows(y: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidArgument("ragged design rows".into()));
        }
        let x = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
        Self::new(DVector::from_vec(y), x)
    }

    pub fn with_groups(mut self, groups: Groups) -> Result<Self> {
        if groups.index.len() != self.n() {
            return Err(Error::InvalidArgument(
                "group vector length differs from n".into(),
            ));
        }
        self.groups = Some(groups);
        Ok(self)
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn groups(&self) -> Option<&Groups> {
        self.groups.as_ref()
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}
