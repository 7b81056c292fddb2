//! Small dense complex linear algebra used throughout the crate.
//!
//! Matrices here are tiny (rank ≤ 16 after Kronecker products), so plain
//! `DMatrix<Complex64>` is used everywhere.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(r: usize) -> CMat {
    CMat::identity(r, r)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// Frobenius norm.
pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖U*U − I‖_F`.
pub fn unitary_defect(u: &CMat) -> f64 {
    let n = u.ncols();
    frob(&(u.adjoint() * u - identity(n)))
}

/// `‖M + M*‖_F`, zero for skew-Hermitian matrices.
pub fn skew_defect(m: &CMat) -> f64 {
    frob(&(m + m.adjoint()))
}

/// Unitary polar factor `W V*` of a square matrix, via SVD.
pub fn polar_factor(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    u * v_t
}

/// Projects a nearly unitary matrix onto U(r).
///
/// Close to U(r) this runs Newton–Schulz steps `X ← X(3I − X*X)/2`, which
/// converge quadratically to the polar factor; otherwise it falls back to SVD.
pub fn project_unitary(m: &CMat) -> CMat {
    let n = m.ncols();
    let mut x = m.clone();
    let mut defect = unitary_defect(&x);
    if defect == 0.0 {
        return x;
    }
    if defect > 0.1 {
        return polar_factor(m);
    }
    let three = identity(n) * c(3.0, 0.0);
    for _ in 0..4 {
        if defect <= 1e-15 {
            break;
        }
        let g = &x.adjoint() * &x;
        x = &x * (&three - g) * c(0.5, 0.0);
        defect = unitary_defect(&x);
    }
    x
}

/// Kronecker product, row-major convention: `vec(A U B) = (A ⊗ Bᵀ) vec(U)`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Row-major vectorisation of a matrix.
pub fn vec_row_major(m: &CMat) -> CVec {
    let (r, cdim) = m.shape();
    CVec::from_iterator(r * cdim, (0..r).flat_map(|i| (0..cdim).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]))
}

/// Inverse of [`vec_row_major`].
pub fn unvec_row_major(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Block-diagonal `diag(a, b)`.
pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = zeros(ar + br, ac + bc);
    out.view_mut((0, 0), (ar, ac)).copy_from(a);
    out.view_mut((ar, ac), (br, bc)).copy_from(b);
    out
}

/// Orthonormal basis of the (numerical) null space of `m`.
///
/// A right singular vector counts as null when its singular value is at most
/// `tol` (absolute). Rows are zero-padded so that every column direction gets
/// a singular value.
pub fn nullspace(m: &CMat, tol: f64) -> Vec<CVec> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Vec::new();
    }
    let padded = if rows < cols {
        let mut p = zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("svd v_t");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= tol)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect()
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) / 2f64.sqrt()
}

/// Haar-distributed unitary matrix (QR of a Ginibre matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, r: usize) -> CMat {
    let g = CMat::from_fn(r, r, |_, _| random_complex(rng));
    let qr = g.qr();
    let q = qr.q();
    let rr = qr.r();
    let mut out = q;
    for j in 0..r {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..r {
            out[(i, j)] *= phase;
        }
    }
    out
}

/// Random skew-Hermitian matrix with Gaussian entries scaled by `scale`.
pub fn random_skew_hermitian<R: Rng + ?Sized>(rng: &mut R, r: usize, scale: f64) -> CMat {
    let g = CMat::from_fn(r, r, |_, _| random_complex(rng));
    (&g - g.adjoint()) * c(0.5 * scale, 0.0)
}

/// Diagonal unitary with the given phases.
pub fn diag_phases(args: &[f64]) -> CMat {
    let n = args.len();
    let mut m = zeros(n, n);
    for (i, a) in args.iter().enumerate() {
        m[(i, i)] = Complex64::from_polar(1.0, *a);
    }
    m
}

pub fn mat_pow(m: &CMat, k: i64) -> CMat {
    let n = m.nrows();
    let base = if k < 0 {
        m.clone().try_inverse().expect("invertible matrix")
    } else {
        m.clone()
    };
    let mut e = k.unsigned_abs();
    let mut acc = identity(n);
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        sq = &sq * &sq;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for r in 1..5 {
            assert!(unitary_defect(&random_unitary(&mut rng, r)) < 1e-12);
        }
    }

    #[test]
    fn projection_recovers_polar_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(&mut rng, 3);
        let noise = random_skew_hermitian(&mut rng, 3, 1e-4);
        let m = &u + &u * noise.map(|z| z * c(0.0, 1.0));
        let p = project_unitary(&m);
        assert!(unitary_defect(&p) < 1e-14);
        assert!(frob(&(p - polar_factor(&m))) < 1e-12);
    }

    #[test]
    fn kron_matches_vec_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = CMat::from_fn(2, 2, |_, _| random_complex(&mut rng));
        let u = CMat::from_fn(2, 3, |_, _| random_complex(&mut rng));
        let b = CMat::from_fn(3, 3, |_, _| random_complex(&mut rng));
        let lhs = vec_row_major(&(&a * &u * &b));
        let rhs = kron(&a, &b.transpose()) * vec_row_major(&u);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let m = CMat::from_row_slice(2, 3, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let ns = nullspace(&m, 1e-9);
        assert_eq!(ns.len(), 1);
        assert!((ns[0][2].norm() - 1.0).abs() < 1e-12);
    }
}
