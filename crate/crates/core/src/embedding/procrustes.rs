use nalgebra::DMatrix;

/// Orthogonal `Q` minimizing `‖source · Q − target‖_F`.
///
/// Both inputs are `m × d` with matching rows. The solution is `U Vᵀ` for the
/// SVD `sourceᵀ target = U Σ Vᵀ`.
pub fn procrustes_rotation(source: &DMatrix<f64>, target: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(
        source.shape(),
        target.shape(),
        "procrustes inputs must have equal shape"
    );
    let d = source.ncols();
    if source.nrows() == 0 {
        return DMatrix::identity(d, d);
    }
    let m = source.transpose() * target;
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    u * v_t
}

/// Sum of squared row distances after applying `rotation` to `source`.
pub fn procrustes_objective(source: &DMatrix<f64>, target: &DMatrix<f64>, rotation: &DMatrix<f64>) -> f64 {
    (source * rotation - target).norm_squared()
}
