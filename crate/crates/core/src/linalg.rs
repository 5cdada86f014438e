//! Dense symmetric positive-definite solves.

use ndarray::{Array1, Array2};

use crate::error::{Result, SlogError};

/// Lower Cholesky factor, stored densely (upper triangle unused).
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Array2<f64>,
}

impl Cholesky {
    /// Factors `a = L L^T`, or `None` if a pivot is not strictly positive.
    pub fn factor(a: &Array2<f64>) -> Option<Self> {
        let m = a.nrows();
        debug_assert_eq!(m, a.ncols());
        let mut l = Array2::<f64>::zeros((m, m));
        {
            let ls = l.as_slice_mut().expect("standard layout");
            for i in 0..m {
                for j in 0..=i {
                    let (ri, rj) = (i * m, j * m);
                    let mut s = a[[i, j]];
                    for k in 0..j {
                        s -= ls[ri + k] * ls[rj + k];
                    }
                    if i == j {
                        if !(s > 0.0) || !s.is_finite() {
                            return None;
                        }
                        ls[ri + i] = s.sqrt();
                    } else {
                        ls[ri + j] = s / ls[rj + j];
                    }
                }
            }
        }
        Some(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Solves `L L^T x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let m = self.dim();
        let l = self.l.as_slice().expect("standard layout");
        for i in 0..m {
            let row = &l[i * m..i * m + i];
            let s: f64 = row.iter().zip(&b[..i]).map(|(a, x)| a * x).sum();
            b[i] = (b[i] - s) / l[i * m + i];
        }
        for i in (0..m).rev() {
            let mut s = b[i];
            for k in i + 1..m {
                s -= l[k * m + i] * b[k];
            }
            b[i] = s / l[i * m + i];
        }
    }

    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Array1::from(x)
    }
}

/// Factors an SPD matrix, retrying once with diagonal jitter `1e-12 * trace / m`.
pub fn factor_with_jitter(mut a: Array2<f64>) -> Result<Cholesky> {
    if let Some(c) = Cholesky::factor(&a) {
        return Ok(c);
    }
    let m = a.nrows();
    let jitter = 1e-12 * a.diag().sum() / m as f64;
    if !(jitter > 0.0) || !jitter.is_finite() {
        return Err(SlogError::SingularSystem);
    }
    a.diag_mut().mapv_inplace(|v| v + jitter);
    Cholesky::factor(&a).ok_or(SlogError::SingularSystem)
}

/// Solves `a x = b` for symmetric positive-definite `a`.
pub fn spd_solve(a: Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    Ok(factor_with_jitter(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn small_known_system() {
        let a = array![[4.0, 2.0], [2.0, 3.0]];
        let x = spd_solve(a.clone(), &array![2.0, 1.0]).unwrap();
        let back = a.dot(&x);
        assert!((back[0] - 2.0).abs() < 1e-14 && (back[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn indefinite_is_singular() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(matches!(spd_solve(a, &array![1.0, 1.0]), Err(SlogError::SingularSystem)));
    }

    #[test]
    fn rounding_level_semidefinite_recovered_by_jitter() {
        let v = array![1.0, 1.0 / 3.0, 2.0];
        let mut a = Array2::zeros((3, 3));
        for i in 0..3 {
            for j in 0..3 {
                a[[i, j]] = v[i] * v[j];
            }
        }
        // Rank one, so only the jittered retry can succeed.
        assert!(factor_with_jitter(a).is_ok());
    }

    proptest! {
        #[test]
        fn solves_random_spd(entries in proptest::collection::vec(-1.0f64..1.0, 25), rhs in proptest::collection::vec(-5.0f64..5.0, 5)) {
            let m = Array2::from_shape_vec((5, 5), entries).unwrap();
            let mut a = m.t().dot(&m);
            a.diag_mut().mapv_inplace(|v| v + 0.5);
            let b = Array1::from(rhs);
            let x = spd_solve(a.clone(), &b).unwrap();
            let r = &a.dot(&x) - &b;
            prop_assert!(r.iter().all(|v| v.abs() < 1e-10));
        }
    }
}
