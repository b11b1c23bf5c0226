//! Dense linear-algebra kernels: real Schur reduction, quasi-triangular
//! Sylvester/Lyapunov back-substitution, eigenvalue utilities.

use crate::error::{Error, Result};
use nalgebra::{Complex, DMatrix, DVector};

pub type Mat = DMatrix<f64>;
pub type Vec64 = DVector<f64>;
pub type CMat = DMatrix<Complex<f64>>;

const SCHUR_EPS: f64 = 1e-14;

/// Real Schur decomposition `m = u t uᵀ` with `t` upper quasi-triangular.
pub fn schur(m: &Mat) -> Result<(Mat, Mat)> {
    let n = m.nrows();
    let sch = nalgebra::linalg::Schur::try_new(m.clone(), SCHUR_EPS, 200 * n.max(8))
        .ok_or_else(|| Error::NumericalFailure("real Schur iteration did not converge".into()))?;
    let (u, t) = sch.unpack();
    Ok((u, t))
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(m: &Mat) -> Result<Vec<Complex<f64>>> {
    let n = m.nrows();
    nalgebra::linalg::Schur::try_new(m.clone(), SCHUR_EPS, 200 * n.max(8))
        .and_then(|s| s.complex_eigenvalues().map(|v| v.iter().cloned().collect()))
        .or_else(|| m.clone().try_schur(SCHUR_EPS, 400 * n.max(8)).map(|s| {
            s.complex_eigenvalues()
                .map(|v| v.iter().cloned().collect())
                .unwrap_or_default()
        }))
        .filter(|v: &Vec<Complex<f64>>| v.len() == n)
        .ok_or_else(|| Error::NumericalFailure("eigenvalue iteration did not converge".into()))
}

/// Largest real part over the spectrum.
pub fn spectral_abscissa(m: &Mat) -> Result<f64> {
    Ok(eigenvalues(m)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

pub fn is_hurwitz(m: &Mat, tol: f64) -> Result<bool> {
    Ok(spectral_abscissa(m)? < -tol)
}

/// Eigenvalues of a complex square matrix via complex Schur reduction.
pub fn complex_eigenvalues(m: &CMat) -> Result<Vec<Complex<f64>>> {
    let n = m.nrows();
    let sch = nalgebra::linalg::Schur::try_new(m.clone(), SCHUR_EPS, 200 * n.max(8))
        .ok_or_else(|| Error::NumericalFailure("complex Schur did not converge".into()))?;
    let (_, t) = sch.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Determinant of a complex square matrix.
pub fn complex_det(m: &CMat) -> Complex<f64> {
    m.clone().lu().determinant()
}

/// Solves `r y + y s = f` with `r`, `s` upper quasi-triangular (real Schur forms).
fn quasi_sylvester(r: &Mat, s: &Mat, f: &Mat) -> Result<Mat> {
    let p = r.nrows();
    let q = s.nrows();
    let mut y = f.clone();
    let scale = r.norm() + s.norm() + 1.0;

    // Column blocks of s, left to right.
    let mut j = 0;
    while j < q {
        let jw = if j + 1 < q && s[(j + 1, j)] != 0.0 { 2 } else { 1 };
        // Subtract contributions of already-solved column blocks.
        if j > 0 {
            let contrib = y.columns(0, j) * s.view((0, j), (j, jw));
            let mut cols = y.columns_mut(j, jw);
            cols -= contrib;
        }
        // Back-substitute over row blocks of r, bottom to top.
        let mut i = p;
        while i > 0 {
            let iw = if i >= 2 && r[(i - 1, i - 2)] != 0.0 { 2 } else { 1 };
            let i0 = i - iw;
            if i < p {
                let contrib = r.view((i0, i), (iw, p - i)) * y.view((i, j), (p - i, jw));
                let mut blk = y.view_mut((i0, j), (iw, jw));
                blk -= contrib;
            }
            // Solve r_II x + x s_JJ = rhs via the small kron system.
            let rii = r.view((i0, i0), (iw, iw));
            let sjj = s.view((j, j), (jw, jw));
            let dim = iw * jw;
            let mut small = Mat::zeros(dim, dim);
            for a in 0..iw {
                for b in 0..jw {
                    let row = b * iw + a;
                    for c in 0..iw {
                        small[(row, b * iw + c)] += rii[(a, c)];
                    }
                    for d in 0..jw {
                        small[(row, d * iw + a)] += sjj[(d, b)];
                    }
                }
            }
            let mut rhs = Vec64::zeros(dim);
            for a in 0..iw {
                for b in 0..jw {
                    rhs[b * iw + a] = y[(i0 + a, j + b)];
                }
            }
            let lu = small.lu();
            if lu.determinant().abs() < 1e-13 * scale.powi(dim as i32) {
                return Err(Error::SingularLyapunov);
            }
            let sol = lu
                .solve(&rhs)
                .ok_or(Error::SingularLyapunov)?;
            for a in 0..iw {
                for b in 0..jw {
                    y[(i0 + a, j + b)] = sol[b * iw + a];
                }
            }
            i = i0;
        }
        j += jw;
    }
    Ok(y)
}

/// Reverses row and column order, turning a lower quasi-triangular matrix
/// into an upper quasi-triangular one.
fn flip(m: &Mat) -> Mat {
    let n = m.nrows();
    Mat::from_fn(n, m.ncols(), |i, j| m[(n - 1 - i, m.ncols() - 1 - j)])
}

fn flip_cols(m: &Mat) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, m.ncols() - 1 - j)])
}

/// Precomputed Schur factorization of a closed-loop matrix, reused for the
/// controllability and observability Lyapunov solves.
pub struct LyapunovCache {
    u: Mat,
    t: Mat,
}

impl LyapunovCache {
    pub fn new(m: &Mat) -> Result<Self> {
        let (u, t) = schur(m)?;
        Ok(LyapunovCache { u, t })
    }

    /// Solves `m x + x mᵀ = -w`.
    pub fn solve_primal(&self, w: &Mat) -> Result<Mat> {
        // mᵀ = (u j)(j tᵀ j)(u j)ᵀ with j the anti-identity.
        let s = flip(&self.t.transpose());
        let v = flip_cols(&self.u);
        let f = self.u.transpose() * (-w) * &v;
        let y = quasi_sylvester(&self.t, &s, &f)?;
        let x = &self.u * y * v.transpose();
        Ok(symmetrize(&x))
    }

    /// Solves `mᵀ x + x m = -w`.
    pub fn solve_dual(&self, w: &Mat) -> Result<Mat> {
        let r = flip(&self.t.transpose());
        let ur = flip_cols(&self.u);
        let f = ur.transpose() * (-w) * &self.u;
        let y = quasi_sylvester(&r, &self.t, &f)?;
        let x = &ur * y * self.u.transpose();
        Ok(symmetrize(&x))
    }
}

/// Solves the Sylvester equation `a x + x b = c`.
pub fn sylvester(a: &Mat, b: &Mat, c: &Mat) -> Result<Mat> {
    let (ua, r) = schur(a)?;
    let (ub, s) = schur(b)?;
    // b = ub s ubᵀ; bring the right factor to upper quasi-triangular form.
    let f = ua.transpose() * c * &ub;
    let y = quasi_sylvester(&r, &s, &f)?;
    Ok(&ua * y * ub.transpose())
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &Mat) -> Vec<f64> {
    let mut ev: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn min_sym_eigenvalue(m: &Mat) -> f64 {
    sym_eigenvalues(m)[0]
}

/// Symmetric square root with negative eigenvalues clamped at zero.
pub fn sqrt_psd_clamped(m: &Mat) -> Mat {
    let eig = symmetrize(m).symmetric_eigen();
    let vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * Mat::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &Mat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rand_mat(n: usize, seed: &mut u64) -> Mat {
        Mat::from_fn(n, n, |_, _| {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn lyapunov_scalar() {
        let cache = LyapunovCache::new(&Mat::from_element(1, 1, -1.0)).unwrap();
        let x = cache.solve_primal(&Mat::from_element(1, 1, 1.0)).unwrap();
        assert_abs_diff_eq!(x[(0, 0)], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn lyapunov_identity() {
        let cache = LyapunovCache::new(&(-Mat::identity(2, 2))).unwrap();
        let x = cache.solve_primal(&Mat::identity(2, 2)).unwrap();
        assert!((x - 0.5 * Mat::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn lyapunov_hand_solved_2x2() {
        // m x + x mᵀ = -I with m = [[-1, 1], [0, -2]]. Solving the three
        // scalar equations by hand: -4c = -1, c - 3b = 0, -2a + 2b = -1,
        // so x = [[7/12, 1/12], [1/12, 1/4]].
        let m = Mat::from_row_slice(2, 2, &[-1.0, 1.0, 0.0, -2.0]);
        let cache = LyapunovCache::new(&m).unwrap();
        let x = cache.solve_primal(&Mat::identity(2, 2)).unwrap();
        let expect = Mat::from_row_slice(2, 2, &[7.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 0.25]);
        assert!((&x - &expect).norm() < 1e-13, "got {x}");
        let resid = (&m * &x + &x * m.transpose() + Mat::identity(2, 2)).norm();
        assert!(resid < 1e-13);
    }

    #[test]
    fn lyapunov_dual_matches_transposed_primal() {
        let mut seed = 42;
        for _ in 0..5 {
            let mut m = rand_mat(5, &mut seed);
            m -= 3.0 * Mat::identity(5, 5);
            let w = {
                let g = rand_mat(5, &mut seed);
                &g * g.transpose() + Mat::identity(5, 5)
            };
            let cache = LyapunovCache::new(&m).unwrap();
            let x = cache.solve_dual(&w).unwrap();
            let resid = (m.transpose() * &x + &x * &m + &w).norm() / w.norm();
            assert!(resid < 1e-11, "resid {resid}");
        }
    }

    #[test]
    fn lyapunov_rejects_singular_operator() {
        // Eigenvalues +1 and -1 sum to zero across the pair.
        let m = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let cache = LyapunovCache::new(&m).unwrap();
        assert!(matches!(
            cache.solve_primal(&Mat::identity(2, 2)),
            Err(Error::SingularLyapunov)
        ));
    }

    #[test]
    fn sylvester_random_residual() {
        let mut seed = 7;
        for n in [3usize, 6] {
            let a = rand_mat(n, &mut seed) + 2.0 * Mat::identity(n, n);
            let b = rand_mat(n, &mut seed) + 2.0 * Mat::identity(n, n);
            let c = rand_mat(n, &mut seed);
            let x = sylvester(&a, &b, &c).unwrap();
            let resid = (&a * &x + &x * &b - &c).norm() / c.norm();
            assert!(resid < 1e-11, "resid {resid}");
        }
    }

    #[test]
    fn complex_eigenvalues_of_known_matrix() {
        use nalgebra::Complex;
        let j = Complex::new(0.0, 1.0);
        // diag(1+2i, -3) in a rotated basis stays diag under similarity.
        let m = CMat::from_row_slice(2, 2, &[
            Complex::new(1.0, 2.0),
            j,
            Complex::new(0.0, 0.0),
            Complex::new(-3.0, 0.0),
        ]);
        let mut ev = complex_eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_abs_diff_eq!(ev[0].re, -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1].im, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_norm_diag() {
        let m = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -3.0]);
        assert_abs_diff_eq!(spectral_norm(&m), 3.0, epsilon = 1e-12);
    }
}
