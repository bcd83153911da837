use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, FourierBasisSet};

/// Which forward path produced a [`CurrentGapMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Series,
    Bie,
    Born,
    Asymptotic,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Series => "series",
            Self::Bie => "bie",
            Self::Born => "born",
            Self::Asymptotic => "asymptotic",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the entries of a [`CurrentGapMatrix`] are arranged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Layout {
    /// `K × |basis|`: column `m` holds `(Λ - Λ₀)e^{i n_m θ}` at the boundary nodes.
    Responses(FourierBasisSet),
    /// `K × K`: maps nodal voltage samples to nodal current-gap samples.
    Nodal,
}

/// Discretized current-gap operator `Λ - Λ₀` on a boundary grid.
#[derive(Debug, Clone)]
pub struct CurrentGapMatrix {
    matrix: DMatrix<Complex64>,
    layout: Layout,
    provenance: Provenance,
    grid: BoundaryGrid,
}

impl CurrentGapMatrix {
    pub fn responses(matrix: DMatrix<Complex64>, basis: FourierBasisSet, grid: BoundaryGrid, provenance: Provenance) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "response matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                grid.len(),
                basis.len()
            )));
        }
        Self::checked(matrix, Layout::Responses(basis), grid, provenance)
    }

    pub fn nodal(matrix: DMatrix<Complex64>, grid: BoundaryGrid, provenance: Provenance) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "nodal matrix is {}x{}, expected {n}x{n}",
                matrix.nrows(),
                matrix.ncols(),
                n = grid.len()
            )));
        }
        Self::checked(matrix, Layout::Nodal, grid, provenance)
    }

    fn checked(matrix: DMatrix<Complex64>, layout: Layout, grid: BoundaryGrid, provenance: Provenance) -> Result<Self> {
        if matrix.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter("current-gap matrix has non-finite entries".into()));
        }
        Ok(Self { matrix, layout, provenance, grid })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn basis(&self) -> Option<&FourierBasisSet> {
        match &self.layout {
            Layout::Responses(b) => Some(b),
            Layout::Nodal => None,
        }
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn grid(&self) -> &BoundaryGrid {
        &self.grid
    }

    /// Same layout and provenance with the entries replaced (e.g. by noisy data).
    pub fn with_matrix(&self, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.shape() != self.matrix.shape() {
            return Err(Error::DimensionMismatch("replacement matrix has a different shape".into()));
        }
        Self::checked(matrix, self.layout.clone(), self.grid, self.provenance)
    }

    /// Converts response columns into the `K × K` nodal operator.
    ///
    /// Nodal voltages are expanded in the basis by the discrete Fourier
    /// transform `f_n = (1/K) Σ_k f(θ_k) e^{-inθ_k}`; modes outside the basis
    /// are mapped to zero.
    pub fn to_nodal(&self) -> Result<Self> {
        let basis = match &self.layout {
            Layout::Nodal => return Ok(self.clone()),
            Layout::Responses(b) => b,
        };
        let k = self.grid.len();
        let mut residues: Vec<i64> = basis.indices().iter().map(|&n| (n as i64).rem_euclid(k as i64)).collect();
        residues.sort_unstable();
        if residues.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DimensionMismatch(format!(
                "basis modes alias on a {k}-node grid; need |n| < {}",
                k / 2 + 1
            )));
        }
        let analysis = DMatrix::from_fn(basis.len(), k, |m, j| {
            Complex64::from_polar(1.0 / k as f64, -(basis.indices()[m] as f64) * self.grid.angle(j))
        });
        Self::nodal(&self.matrix * analysis, self.grid, self.provenance)
    }

    /// Applies the nodal operator to voltage samples.
    pub fn apply(&self, samples: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        match self.layout {
            Layout::Nodal if samples.len() == self.grid.len() => Ok(&self.matrix * samples),
            Layout::Nodal => Err(Error::DimensionMismatch("sample vector length differs from grid".into())),
            Layout::Responses(_) => self.to_nodal()?.apply(samples),
        }
    }

    /// Response column for basis index `n`, if present.
    pub fn response(&self, n: i32) -> Option<DVector<Complex64>> {
        let basis = self.basis()?;
        let col = basis.indices().iter().position(|&m| m == n)?;
        Some(self.matrix.column(col).into_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checks() {
        let grid = BoundaryGrid::new(8).unwrap();
        let basis = FourierBasisSet::music(2);
        assert!(CurrentGapMatrix::responses(DMatrix::zeros(8, 3), basis.clone(), grid, Provenance::Born).is_ok());
        assert!(CurrentGapMatrix::responses(DMatrix::zeros(3, 8), basis, grid, Provenance::Born).is_err());
        assert!(CurrentGapMatrix::nodal(DMatrix::zeros(8, 7), grid, Provenance::Series).is_err());
        let mut bad = DMatrix::zeros(8, 8);
        bad[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(CurrentGapMatrix::nodal(bad, grid, Provenance::Series).is_err());
    }

    #[test]
    fn nodal_conversion_reproduces_eigen_responses() {
        let grid = BoundaryGrid::new(16).unwrap();
        let basis = FourierBasisSet::symmetric(3);
        let lambda = |n: i32| 1.0 / (1.0 + (n * n) as f64);
        let resp = DMatrix::from_fn(16, basis.len(), |k, m| {
            let n = basis.indices()[m];
            Complex64::from_polar(lambda(n), n as f64 * grid.angle(k))
        });
        let op = CurrentGapMatrix::responses(resp, basis.clone(), grid, Provenance::Bie).unwrap();
        let nodal = op.to_nodal().unwrap();
        for &n in basis.indices() {
            let f = DVector::from_vec(FourierBasisSet::samples(n, &grid));
            let out = nodal.apply(&f).unwrap();
            assert!((out - f * Complex64::new(lambda(n), 0.0)).norm() < 1e-13);
        }
        // a mode outside the basis is annihilated
        let f = DVector::from_vec(FourierBasisSet::samples(5, &grid));
        assert!(nodal.apply(&f).unwrap().norm() < 1e-13);
    }

    #[test]
    fn aliasing_basis_rejected() {
        let grid = BoundaryGrid::new(8).unwrap();
        let basis = FourierBasisSet::symmetric(4);
        let op = CurrentGapMatrix::responses(DMatrix::zeros(8, 9), basis, grid, Provenance::Bie).unwrap();
        assert!(op.to_nodal().is_err());
    }
}
