//! Normalized Gram matrix of the permutation operators and coefficient recovery.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{checked_side, digits, index_of, permute_digits, DenseOperator};
use crate::error::{Error, Result};
use crate::symgroup::SymmetricGroup;

/// Residual above which an operator is rejected as lying outside the span.
pub const SPAN_TOLERANCE: f64 = 1e-8;

/// `M[π,σ] = d^{c(π⁻¹σ) − N}` for one dimension `d`, kept exactly.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub d: usize,
    pub sites: usize,
    pub entries: Vec<Vec<BigRational>>,
}

impl GramMatrix {
    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j].to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.order(), self.order(), |i, j| self.get(i, j))
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` when singular (`d < N`).
    pub fn inverse(&self) -> Option<Vec<Vec<BigRational>>> {
        let n = self.order();
        let mut a = self.entries.clone();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for c in 0..n {
                a[col][c] = &a[col][c] / &p;
                inv[col][c] = &inv[col][c] / &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in 0..n {
                    let (da, di) = (&f * &a[col][c], &f * &inv[col][c]);
                    a[r][c] -= da;
                    inv[r][c] -= di;
                }
            }
        }
        Some(inv)
    }
}

pub fn gram_matrix(group: &SymmetricGroup, d: usize) -> Result<GramMatrix> {
    if d == 0 {
        return Err(Error::DimensionTooSmall { d, min: 1 });
    }
    let n = group.sites();
    let base = BigInt::from(d);
    let entries = (0..group.order())
        .map(|i| {
            (0..group.order())
                .map(|j| {
                    let c = group.cycle_count(group.product(group.inverse_index(i), j));
                    // c ≤ n, so the exponent c − n is never positive
                    BigRational::new(BigInt::one(), num_traits::pow(base.clone(), n - c))
                })
                .collect()
        })
        .collect();
    Ok(GramMatrix {
        d,
        sites: n,
        entries,
    })
}

/// Result of expanding an operator in the permutation basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovered {
    /// Indexed like the group elements.
    pub coefficients: Vec<f64>,
    /// `‖A − Σ a_π V_π‖_F / ‖A‖_F` (absolute when `A = 0`).
    pub residual: f64,
}

/// `t_π = d^{-N} tr(V_π^T A)` for every group element.
pub fn normalized_overlaps(group: &SymmetricGroup, a: &DenseOperator) -> Vec<f64> {
    let (d, n) = (a.dim_site(), a.sites());
    let scale = (d as f64).powi(n as i32);
    let mut x = vec![0; n];
    let mut y = vec![0; n];
    group
        .elements()
        .iter()
        .map(|p| {
            let mut t = 0.0;
            for col in 0..a.side() {
                digits(col, d, n, &mut x);
                permute_digits(p, &x, &mut y);
                t += a.matrix()[(index_of(&y, d), col)];
            }
            t / scale
        })
        .collect()
}

/// Expands `A = Σ_π a_π V_π` exactly through `M⁻¹`.
pub fn recover_coefficients(group: &SymmetricGroup, a: &DenseOperator) -> Result<Recovered> {
    let (d, n) = (a.dim_site(), a.sites());
    if n != group.sites() {
        return Err(Error::SizeMismatch {
            left: n,
            right: group.sites(),
        });
    }
    if d < n {
        return Err(Error::DimensionTooSmall { d, min: n });
    }
    checked_side(d, n)?;
    let inv = gram_matrix(group, d)?
        .inverse()
        .ok_or_else(|| Error::Numerical("singular Gram matrix".into()))?;
    let t = normalized_overlaps(group, a);
    let coefficients: Vec<f64> = inv
        .iter()
        .map(|row| {
            row.iter()
                .zip(&t)
                .map(|(m, tj)| m.to_f64().unwrap_or(f64::NAN) * tj)
                .sum()
        })
        .collect();
    let rebuilt = DenseOperator::from_coefficients(group, d, &coefficients)?;
    let diff = (a.matrix() - rebuilt.matrix()).norm();
    let scale = a.matrix().norm();
    let residual = if scale > 0.0 { diff / scale } else { diff };
    if residual > SPAN_TOLERANCE {
        return Err(Error::NotInSpan { residual });
    }
    Ok(Recovered {
        coefficients,
        residual,
    })
}

/// Least-squares coefficients on a subset `support` of group elements from
/// unnormalized overlaps `t_k = tr(V_k^T X)`. Uses a pseudo-inverse so the
/// result is well defined even when the restricted Gram matrix is singular.
pub fn solve_on_support(
    group: &SymmetricGroup,
    d: usize,
    support: &[usize],
    t: &[f64],
) -> Vec<f64> {
    let g = DMatrix::from_fn(support.len(), support.len(), |i, j| {
        let c = group.cycle_count(group.product(group.inverse_index(support[i]), support[j]));
        (d as f64).powi(c as i32)
    });
    (symmetric_pseudo_inverse(g, 1e-10) * DVector::from_column_slice(t))
        .iter()
        .copied()
        .collect()
}

/// Pseudo-inverse of a symmetric matrix through its eigendecomposition,
/// dropping eigenvalues below `rel_tol` times the largest one. This is far
/// more accurate here than the SVD route for the small Gram systems involved.
pub fn symmetric_pseudo_inverse(m: DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m);
    let cutoff = rel_tol * eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let inv = eig
        .eigenvalues
        .map(|v| if v.abs() > cutoff { 1.0 / v } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::perm_operator;
    use crate::symgroup::Permutation;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g4() -> SymmetricGroup {
        SymmetricGroup::new(4).unwrap()
    }

    #[test]
    fn gram_entries() {
        let g = g4();
        let m = gram_matrix(&g, 4).unwrap();
        for i in 0..24 {
            assert!(m.entries[i][i].is_one());
        }
        let t = g
            .index_of(&Permutation::parse_cycles(4, "(12)").unwrap())
            .unwrap();
        assert_eq!(m.entries[0][t], BigRational::new(1.into(), 4.into()));
        for i in 0..24 {
            for j in 0..24 {
                if i != j {
                    assert!(m.get(i, j) <= 0.25 + 1e-15);
                }
            }
        }
    }

    #[test]
    fn gram_matches_dense_traces() {
        let g = g4();
        for d in 2..=4 {
            let m = gram_matrix(&g, d).unwrap();
            let ops: Vec<_> = g
                .elements()
                .iter()
                .map(|p| perm_operator(p, d).unwrap())
                .collect();
            let vol = (d as f64).powi(4);
            for i in (0..24).step_by(5) {
                for j in 0..24 {
                    let tr = (ops[i].matrix().transpose() * ops[j].matrix()).trace();
                    assert_abs_diff_eq!(tr / vol, m.get(i, j), epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn invertible_exactly_from_four() {
        let g = g4();
        assert!(gram_matrix(&g, 3).unwrap().inverse().is_none());
        let m = gram_matrix(&g, 4).unwrap();
        let inv = m.inverse().unwrap();
        for i in 0..24 {
            for j in 0..24 {
                let s: BigRational = (0..24).map(|k| &m.entries[i][k] * &inv[k][j]).sum();
                assert_eq!(s.is_one(), i == j);
                if i != j {
                    assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn recovers_basis_elements_and_combinations() {
        let g = g4();
        let k = g
            .index_of(&Permutation::parse_cycles(4, "(123)").unwrap())
            .unwrap();
        let r = recover_coefficients(&g, &perm_operator(g.element(k), 4).unwrap()).unwrap();
        for (i, c) in r.coefficients.iter().enumerate() {
            assert_abs_diff_eq!(*c, if i == k { 1.0 } else { 0.0 }, epsilon = 1e-10);
        }
        assert!(r.residual < 1e-12);

        let t = g
            .index_of(&Permutation::parse_cycles(4, "(12)").unwrap())
            .unwrap();
        let mut half = vec![0.0; 24];
        half[0] = 0.5;
        half[t] = 0.5;
        let a = DenseOperator::from_coefficients(&g, 4, &half).unwrap();
        let r = recover_coefficients(&g, &a).unwrap();
        assert_abs_diff_eq!(r.coefficients[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(r.coefficients[t], 0.5, epsilon = 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let coeffs: Vec<f64> = (0..24).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = DenseOperator::from_coefficients(&g, 4, &coeffs).unwrap();
        let r = recover_coefficients(&g, &a).unwrap();
        for (x, y) in r.coefficients.iter().zip(&coeffs) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-9);
        }
    }

    #[test]
    fn recovery_errors() {
        let g = g4();
        let a = perm_operator(g.element(0), 3).unwrap();
        assert!(matches!(
            recover_coefficients(&g, &a),
            Err(Error::DimensionTooSmall { d: 3, min: 4 })
        ));
        let mut m = DMatrix::zeros(256, 256);
        m[(0, 1)] = 1.0;
        let off = DenseOperator::from_matrix(4, 4, m).unwrap();
        assert!(matches!(
            recover_coefficients(&g, &off),
            Err(Error::NotInSpan { .. })
        ));
    }

    #[test]
    fn support_solve_on_subgroup() {
        let g = g4();
        let t = g
            .index_of(&Permutation::parse_cycles(4, "(12)").unwrap())
            .unwrap();
        let support = vec![0, t];
        // X = 2e − (12) at d=2: overlaps tr(V_k X)
        let tr =
            |k: usize, j: usize| 2f64.powi(g.cycle_count(g.product(g.inverse_index(k), j)) as i32);
        let rhs: Vec<f64> = support.iter().map(|&k| 2.0 * tr(k, 0) - tr(k, t)).collect();
        let c = solve_on_support(&g, 2, &support, &rhs);
        let full: Vec<usize> = (0..24).collect();
        let coeffs: Vec<f64> = (0..24).map(|k| (k as f64 * 0.37).sin()).collect();
        let rhs4: Vec<f64> = full
            .iter()
            .map(|&k| {
                (0..24)
                    .map(|j| {
                        4f64.powi(g.cycle_count(g.product(g.inverse_index(k), j)) as i32)
                            * coeffs[j]
                    })
                    .sum()
            })
            .collect();
        for (x, y) in solve_on_support(&g, 4, &full, &rhs4).iter().zip(&coeffs) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(c[0], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c[1], -1.0, epsilon = 1e-9);
    }
}
