use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use super::quadrature::{Estimate, QuadratureGrid};
use crate::error::{Error, Result};

type Eval = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A real function on `[-1, 1]^d` with a label for reports.
#[derive(Clone)]
pub struct FunctionHandle {
    label: String,
    dim: usize,
    f: Arc<Eval>,
}

impl FunctionHandle {
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            dim,
            f: Arc::new(f),
        }
    }

    pub fn constant(label: impl Into<String>, dim: usize, value: f64) -> Self {
        Self::new(label, dim, move |_| value)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    /// Pointwise difference `self - other`.
    pub fn minus(&self, other: &FunctionHandle) -> FunctionHandle {
        let (a, b) = (self.f.clone(), other.f.clone());
        FunctionHandle {
            label: format!("{} - {}", self.label, other.label),
            dim: self.dim,
            f: Arc::new(move |x| a(x) - b(x)),
        }
    }
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .finish()
    }
}

fn check_dim(f: &FunctionHandle, grid: &QuadratureGrid) -> Result<()> {
    if f.dim() != grid.dim() {
        return Err(Error::Parameter(format!(
            "function {} has dimension {}, grid has {}",
            f.label(),
            f.dim(),
            grid.dim()
        )));
    }
    Ok(())
}

/// `∫ |f|` over `[-1, 1]^d`.
pub fn l1_norm(f: &FunctionHandle, grid: &QuadratureGrid) -> Result<Estimate> {
    check_dim(f, grid)?;
    grid.estimate(|x| f.eval(x).abs())
}

/// `∫ |f - g|` over `[-1, 1]^d`.
pub fn l1_distance(f: &FunctionHandle, g: &FunctionHandle, grid: &QuadratureGrid) -> Result<Estimate> {
    check_dim(f, grid)?;
    check_dim(g, grid)?;
    grid.estimate(|x| (f.eval(x) - g.eval(x)).abs())
}

/// A finite function set sampled at the nodes of one grid, so that pairwise
/// distances become weighted sums over stored values.
pub struct SampledSet<'g> {
    grid: &'g QuadratureGrid,
    labels: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl<'g> SampledSet<'g> {
    pub fn new(functions: &[FunctionHandle], grid: &'g QuadratureGrid) -> Result<Self> {
        for f in functions {
            check_dim(f, grid)?;
        }
        let values = functions
            .par_iter()
            .map(|f| grid.nodes().map(|x| f.eval(x)).collect())
            .collect();
        Ok(Self {
            grid,
            labels: functions.iter().map(|f| f.label().to_string()).collect(),
            values,
        })
    }

    /// Build from precomputed node values (one vector per function).
    pub fn from_values(
        labels: Vec<String>,
        values: Vec<Vec<f64>>,
        grid: &'g QuadratureGrid,
    ) -> Result<Self> {
        if labels.len() != values.len() || values.iter().any(|v| v.len() != grid.len()) {
            return Err(Error::Parameter("sampled values do not match the grid".into()));
        }
        Ok(Self {
            grid,
            labels,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.grid.weighted_l1(&self.values[i], &self.values[j])
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { self.distance(i, j) }).collect())
            .collect();
        DistanceMatrix {
            labels: self.labels.clone(),
            values: rows,
            tolerance: None,
        }
    }
}

/// Symmetric matrix of pairwise L1 distances.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    /// Largest `|d_m - d_2m|` over all pairs, when computed.
    pub tolerance: Option<f64>,
}

impl DistanceMatrix {
    /// Distances on `grid` with the refinement-based tolerance attached.
    pub fn compute(functions: &[FunctionHandle], grid: &QuadratureGrid) -> Result<Self> {
        let coarse = SampledSet::new(functions, grid)?.distance_matrix();
        let fine_grid = grid.refined()?;
        let fine = SampledSet::new(functions, &fine_grid)?.distance_matrix();
        let tol = coarse
            .values
            .iter()
            .flatten()
            .zip(fine.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            tolerance: Some(tol),
            ..coarse
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// CSV with a header row and a label column.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (label, row) in self.labels.iter().zip(&self.values) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::QuadratureScheme;

    #[test]
    fn norms() {
        let g1 = QuadratureGrid::default_for(1).unwrap();
        let abs = FunctionHandle::new("|x|", 1, |x| x[0].abs());
        let est = l1_norm(&abs, &g1).unwrap();
        assert!((est.value - 1.0).abs() < 1e-3, "{est:?}");
        let mid = QuadratureGrid::new(1, 64, QuadratureScheme::MidpointTensor).unwrap();
        assert!((l1_norm(&abs, &mid).unwrap().value - 1.0).abs() < 1e-12);
        let zero = FunctionHandle::constant("0", 1, 0.0);
        assert_eq!(l1_norm(&zero, &g1).unwrap().value, 0.0);
        let g2 = QuadratureGrid::default_for(2).unwrap();
        let one = FunctionHandle::constant("1", 2, 1.0);
        assert!((l1_norm(&one, &g2).unwrap().value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn distances() {
        let g = QuadratureGrid::default_for(1).unwrap();
        let one = FunctionHandle::constant("1", 1, 1.0);
        let zero = FunctionHandle::constant("0", 1, 0.0);
        assert!((l1_distance(&one, &zero, &g).unwrap().value - 2.0).abs() < 1e-12);
        assert_eq!(l1_distance(&one, &one, &g).unwrap().value, 0.0);
        let sq = FunctionHandle::new("x^2", 1, |x| x[0] * x[0]);
        assert_eq!(
            l1_distance(&sq, &one, &g).unwrap().value,
            l1_distance(&one, &sq, &g).unwrap().value
        );
        assert!(l1_distance(&one, &FunctionHandle::constant("1", 2, 1.0), &g).is_err());
    }

    #[test]
    fn csv_export() {
        let g = QuadratureGrid::default_for(1).unwrap();
        let fs = vec![FunctionHandle::constant("a", 1, 0.0), FunctionHandle::constant("b", 1, 1.0)];
        let m = DistanceMatrix::compute(&fs, &g).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], ",a,b");
        assert!(lines[1].starts_with("a,0,"));
        assert!(m.tolerance.unwrap() < 1e-12);
    }
}
