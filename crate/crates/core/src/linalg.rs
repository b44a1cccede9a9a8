//! Small dense complex linear algebra helpers shared by all modules.
//!
//! Everything here operates on `DMatrix<Complex<f64>>`. Matrices in this
//! crate are tiny (at most 120x120 for the regular representation of the
//! binary icosahedral group), so dense decompositions are always fine.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn ci(im: f64) -> C64 {
    C64::new(0.0, im)
}

pub fn eye(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Max-entry norm, the tolerance convention used throughout.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    max_abs(&(m * m.adjoint() - eye(m.nrows()))) <= tol
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations: eigenvalues ascending, eigenvector columns orthonormal to
/// machine precision. Jacobi is used because repeated eigenvalues must come
/// out as exactly orthonormal invariant subspaces; the price in speed is
/// irrelevant at these sizes.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let d = m.nrows();
    let mut a = (m + m.adjoint()) * cr(0.5);
    let mut v = eye(d);
    let scale = max_abs(&a).max(f64::MIN_POSITIVE);
    let target = 1e-14 * scale;
    for _sweep in 0..60 {
        let mut off: f64 = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= target {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                let napq = apq.norm();
                if napq <= target * 1e-3 {
                    continue;
                }
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let phase = apq / cr(napq);
                let tau = (beta - alpha) / (2.0 * napq);
                let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                // G = [[c, s*phase], [-s*conj(phase), c]] on the (p, q) plane
                let gp = cr(cth);
                let gqp = -phase.conj() * cr(sth);
                let gpq = phase * cr(sth);
                // columns: A <- A G, V <- V G
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * gp + akq * gqp;
                    a[(k, q)] = akp * gpq + akq * gp;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * gp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gp;
                }
                // rows: A <- G^dagger A
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * gp.conj() + aqk * gqp.conj();
                    a[(q, k)] = apk * gpq.conj() + aqk * gp.conj();
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let vals: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vecs = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &v.column(src));
    }
    (vals, vecs)
}

/// Groups a list of reals into clusters whose consecutive gaps stay below
/// `tol`. Returns the member indices of each cluster, ordered by value.
pub fn cluster_indices(vals: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match clusters.last_mut() {
            Some(cl) if (vals[k] - vals[*cl.last().unwrap()]).abs() <= tol => cl.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    clusters
}

/// Eigendecomposition of a normal matrix (unitary matrices in practice).
///
/// Splits into the commuting Hermitian and anti-Hermitian parts and
/// diagonalizes them jointly; eigenvalues are recovered as Rayleigh
/// quotients. Returns eigenvalues and orthonormal eigenvector columns.
pub fn normal_eigen(m: &CMatrix, cluster_tol: f64) -> (Vec<C64>, CMatrix) {
    let d = m.nrows();
    let h = (m + m.adjoint()) * cr(0.5);
    let k = (m - m.adjoint()) * c(0.0, -0.5);
    let (hv, hq) = hermitian_eigen(&h);
    // Repeated eigenvalues of the Hermitian part can come back with a spread
    // well above machine precision; cluster them coarsely and let the
    // anti-Hermitian part separate what really differs.
    let scale = hv.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let h_tol = cluster_tol.max(1e-5 * scale);
    let mut vecs = CMatrix::zeros(d, d);
    let mut col = 0;
    for cl in cluster_indices(&hv, h_tol) {
        let mut sub = CMatrix::zeros(d, cl.len());
        for (j, &idx) in cl.iter().enumerate() {
            sub.set_column(j, &hq.column(idx));
        }
        let kk = sub.adjoint() * &k * &sub;
        let kk = (&kk + kk.adjoint()) * cr(0.5);
        let (_, kq) = hermitian_eigen(&kk);
        let refined = sub * kq;
        for j in 0..refined.ncols() {
            vecs.set_column(col, &refined.column(j));
            col += 1;
        }
    }
    let vals: Vec<C64> = (0..d)
        .map(|j| {
            let v = vecs.column(j);
            (v.adjoint() * m * v)[(0, 0)]
        })
        .collect();
    (vals, vecs)
}

/// Columns spanning the (numerical) kernel: right singular vectors whose
/// singular value falls below `tol`.
pub fn nullspace(m: &CMatrix, tol: f64) -> CMatrix {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("svd with v requested");
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] < tol)
        .collect();
    // Rows of vt beyond the recorded singular values also belong to the kernel.
    let extra = vt.nrows().saturating_sub(svd.singular_values.len());
    let mut out = CMatrix::zeros(m.ncols(), cols.len() + extra);
    for (j, &k) in cols.iter().enumerate() {
        out.set_column(j, &vt.row(k).adjoint());
    }
    for j in 0..extra {
        out.set_column(cols.len() + j, &vt.row(svd.singular_values.len() + j).adjoint());
    }
    out
}

pub fn rank(m: &CMatrix, tol: f64) -> usize {
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().filter(|&&s| s >= tol).count()
}

/// Dimension of the joint commutant {X : X A_k = A_k X for all k},
/// counting singular values of the stacked commutator map below `tol`.
/// Only the count matters here, so the faster library eigensolver is fine.
pub fn commutant_dimension(mats: &[CMatrix], tol: f64) -> usize {
    let d = mats[0].nrows();
    let id = eye(d);
    let mut gram = CMatrix::zeros(d * d, d * d);
    for a in mats {
        let k = id.kronecker(a) - a.transpose().kronecker(&id);
        gram += k.adjoint() * k;
    }
    let gram = (&gram + gram.adjoint()) * cr(0.5);
    let se = nalgebra::SymmetricEigen::new(gram);
    se.eigenvalues
        .iter()
        .filter(|&&v| v.max(0.0).sqrt() < tol)
        .count()
}

/// Projection onto the special unitary group: polar factor (by the Newton
/// iteration X <- (X + X^{-dagger})/2) with the determinant phase spread
/// evenly over the diagonal.
pub fn su_project(m: &CMatrix) -> CMatrix {
    let d = m.nrows();
    let mut x = m.clone();
    for _ in 0..40 {
        let inv_adj = x
            .clone()
            .try_inverse()
            .expect("polar iteration needs a nonsingular matrix")
            .adjoint();
        let next = (&x + inv_adj) * cr(0.5);
        let done = max_abs(&(&next * next.adjoint() - eye(d))) <= 1e-14;
        x = next;
        if done {
            break;
        }
    }
    let det = x.determinant();
    let phase = C64::from_polar(1.0, -det.arg() / d as f64);
    x * phase
}

/// Principal skew-Hermitian logarithm of a unitary matrix.
pub fn unitary_log(u: &CMatrix) -> CMatrix {
    let (vals, q) = normal_eigen(u, 1e-9);
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(
        vals.len(),
        vals.iter().map(|z| ci(z.arg())),
    ));
    &q * diag * q.adjoint()
}

/// Exponential of a skew-Hermitian matrix.
pub fn skew_exp(l: &CMatrix) -> CMatrix {
    let h = l * c(0.0, -1.0); // Hermitian
    let (vals, q) = hermitian_eigen(&h);
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&t| C64::from_polar(1.0, t)),
    ));
    &q * diag * q.adjoint()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let a = CMatrix::from_fn(d, d, |_, _| {
        c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    });
    (&a + a.adjoint()) * cr(0.5)
}

/// Basis of Hermitian d x d matrices: diagonal units, symmetric and
/// antisymmetric off-diagonal combinations. Length d^2.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = cr(1.0);
        out.push(m);
    }
    for k in 0..d {
        for l in (k + 1)..d {
            let mut s = CMatrix::zeros(d, d);
            s[(k, l)] = cr(1.0);
            s[(l, k)] = cr(1.0);
            out.push(s);
            let mut a = CMatrix::zeros(d, d);
            a[(k, l)] = ci(1.0);
            a[(l, k)] = ci(-1.0);
            out.push(a);
        }
    }
    out
}

/// Deterministic rank reduction of a family of real vectors (as columns)
/// by column-pivoted QR. Returns an orthonormal basis of the column span.
pub fn real_column_basis(cols: &RMatrix, tol: f64) -> RMatrix {
    let qr = cols.clone().col_piv_qr();
    let (q, r, _) = qr.unpack();
    let rr = r.nrows().min(r.ncols());
    let scale = (0..rr).map(|k| r[(k, k)].abs()).fold(0.0f64, f64::max);
    let rank = (0..rr)
        .take_while(|&k| r[(k, k)].abs() > tol * scale.max(1.0))
        .count();
    q.columns(0, rank).into_owned()
}

/// Least-squares solve min ||A x - b|| via SVD with cutoff.
pub fn lstsq(a: &RMatrix, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, tol).expect("svd solve")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normal_eigen_reconstructs_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(&mut rng, 6);
        let u = skew_exp(&(h * ci(1.0)));
        assert!(is_unitary(&u, 1e-10));
        let (vals, q) = normal_eigen(&u, 1e-9);
        let diag = CMatrix::from_diagonal(&CVector::from_vec(vals));
        assert!(max_abs(&(&u * &q - &q * diag)) < 1e-9);
        assert!(is_unitary(&q, 1e-9));
    }

    #[test]
    fn unitary_log_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(&mut rng, 4) * cr(0.4);
        let u = skew_exp(&(h * ci(1.0)));
        let l = unitary_log(&u);
        assert!(max_abs(&(&l + l.adjoint())) < 1e-10, "log not skew");
        assert!(max_abs(&(skew_exp(&l) - &u)) < 1e-9);
    }

    #[test]
    fn su_projection_is_special_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = CMatrix::from_fn(5, 5, |_, _| c(rng.gen::<f64>(), rng.gen::<f64>()))
            + eye(5) * cr(3.0);
        let p = su_project(&m);
        assert!(is_unitary(&p, 1e-10));
        assert!((p.determinant() - cr(1.0)).norm() < 1e-10);
    }

    #[test]
    fn commutant_of_scalars_is_full() {
        let mats = vec![eye(2) * cr(0.3), eye(2) * cr(-1.0)];
        assert_eq!(commutant_dimension(&mats, 1e-6), 4);
    }

    #[test]
    fn nullspace_dimension() {
        // rank-1 matrix on C^3 has a 2-dimensional kernel
        let v = CVector::from_vec(vec![cr(1.0), cr(2.0), ci(1.0)]);
        let m = &v * v.adjoint();
        let ns = nullspace(&m, 1e-9);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&m * &ns)) < 1e-9);
    }
}
