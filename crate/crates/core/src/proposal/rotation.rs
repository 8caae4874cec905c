use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Haar-uniform element of `SO(dim)`.
///
/// QR of a standard-Gaussian matrix, columns sign-corrected by the
/// diagonal of `R`, then one column negated if the determinant is −1.
pub fn random_rotation<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    assert!(dim >= 1, "rotation dimension must be >= 1");
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    if q.clone().determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// `‖RᵀR − I‖_max < tol` and `det R > 0`.
pub fn is_rotation(r: &DMatrix<f64>, tol: f64) -> bool {
    if !r.is_square() {
        return false;
    }
    let n = r.nrows();
    let gram = r.transpose() * r;
    (gram - DMatrix::<f64>::identity(n, n)).abs().max() < tol && r.clone().determinant() > 0.0
}
