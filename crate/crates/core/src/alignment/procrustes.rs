use nalgebra::DMatrix;

use crate::error::{Error, Result};

const SVD_EPS: f64 = 1e-15;
const SVD_MAX_ITER: usize = 10_000;

/// Orthogonal matrix `W` minimizing `||XW - Y||_F`: with `XᵀY = UΣVᵀ`,
/// `W = UVᵀ`.
pub fn procrustes_solve(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch(format!(
            "procrustes: X is {:?}, Y is {:?}",
            x.shape(),
            y.shape()
        )));
    }
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::ShapeMismatch("procrustes: empty matrices".into()));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::ShapeMismatch("procrustes: non-finite entries".into()));
    }
    let cross = x.transpose() * y;
    let svd = cross
        .try_svd(true, true, SVD_EPS, SVD_MAX_ITER)
        .ok_or(Error::SvdNonConvergence)?;
    let (u, v_t) = svd.u.zip(svd.v_t).ok_or(Error::SvdNonConvergence)?;
    Ok(u * v_t)
}

/// Largest absolute entry of `MᵀM - I`.
pub fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let gram = m.transpose() * m;
    let id = DMatrix::<f64>::identity(m.ncols(), m.ncols());
    (gram - id).amax()
}
