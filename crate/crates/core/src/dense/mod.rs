//! Dense real operators on `(ℂ^d)^⊗N`.
//!
//! Every operator in scope (permutation operators, symmetric Werner states,
//! their partial transposes) is real in the computational basis, so a dense
//! operator is a real `d^N × d^N` matrix. Basis states are indexed with site 0
//! as the most significant digit.
//!
//! Operators that commute with `U^⊗N` (and their partial transposes) are
//! block diagonal in the weight basis; [`blocks`] exploits this to get exact
//! spectra without diagonalizing full matrices.

pub mod blocks;
pub mod gram;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::partitions::SiteSubset;
use crate::symgroup::{Permutation, SymmetricGroup};
use crate::werner::{VertexTable, WernerState, SITES};

pub use blocks::{Block, BlockLayout, Spectrum};
pub use gram::{
    gram_matrix, recover_coefficients, solve_on_support, symmetric_pseudo_inverse, GramMatrix,
    Recovered,
};

/// Largest admissible side length `d^N` of a dense operator.
pub const MAX_SIDE: usize = 10_000;

/// Side length `d^n`, rejected above [`MAX_SIDE`].
pub fn checked_side(d: usize, n: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::DimensionTooSmall { d, min: 1 });
    }
    let mut side: usize = 1;
    for _ in 0..n {
        side = side
            .checked_mul(d)
            .filter(|&s| s <= MAX_SIDE)
            .ok_or(Error::GuardExceeded {
                side: d.saturating_pow(n as u32),
                limit: MAX_SIDE,
            })?;
    }
    Ok(side)
}

/// Base-`d` digits of basis index `x`, site 0 first.
#[inline]
pub(crate) fn digits(mut x: usize, d: usize, n: usize, out: &mut [usize]) {
    for s in (0..n).rev() {
        out[s] = x % d;
        x /= d;
    }
}

#[inline]
pub(crate) fn index_of(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &v| acc * d + v)
}

/// Image of basis state `x` under `V_π`: the content of site `s` moves to site `π(s)`.
#[inline]
pub(crate) fn permute_digits(p: &Permutation, x: &[usize], out: &mut [usize]) {
    for (s, &v) in x.iter().enumerate() {
        out[p.apply(s)] = v;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    d: usize,
    sites: usize,
    matrix: DMatrix<f64>,
}

impl DenseOperator {
    pub fn zeros(d: usize, sites: usize) -> Result<Self> {
        let side = checked_side(d, sites)?;
        Ok(DenseOperator {
            d,
            sites,
            matrix: DMatrix::zeros(side, side),
        })
    }

    pub fn identity(d: usize, sites: usize) -> Result<Self> {
        let side = checked_side(d, sites)?;
        Ok(DenseOperator {
            d,
            sites,
            matrix: DMatrix::identity(side, side),
        })
    }

    pub fn from_matrix(d: usize, sites: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let side = checked_side(d, sites)?;
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::SizeMismatch {
                left: matrix.nrows(),
                right: side,
            });
        }
        Ok(DenseOperator { d, sites, matrix })
    }

    pub fn dim_site(&self) -> usize {
        self.d
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.side();
        (0..n).all(|i| (0..i).all(|j| (self.matrix[(i, j)] - self.matrix[(j, i)]).abs() <= tol))
    }

    /// `self += scale · V_π` without materializing `V_π`.
    pub fn add_permutation(&mut self, p: &Permutation, scale: f64) -> Result<()> {
        if p.len() != self.sites {
            return Err(Error::SizeMismatch {
                left: p.len(),
                right: self.sites,
            });
        }
        let (d, n) = (self.d, self.sites);
        let mut x = vec![0; n];
        let mut y = vec![0; n];
        for col in 0..self.side() {
            digits(col, d, n, &mut x);
            permute_digits(p, &x, &mut y);
            self.matrix[(index_of(&y, d), col)] += scale;
        }
        Ok(())
    }

    /// `Σ_k coefficients[k] · V_{group[k]}`.
    pub fn from_coefficients(
        group: &SymmetricGroup,
        d: usize,
        coefficients: &[f64],
    ) -> Result<Self> {
        let mut op = DenseOperator::zeros(d, group.sites())?;
        for (k, &c) in coefficients.iter().enumerate() {
            if c != 0.0 {
                op.add_permutation(group.element(k), c)?;
            }
        }
        Ok(op)
    }

    pub fn kron(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if self.d != other.d {
            return Err(Error::SizeMismatch {
                left: self.d,
                right: other.d,
            });
        }
        checked_side(self.d, self.sites + other.sites)?;
        Ok(DenseOperator {
            d: self.d,
            sites: self.sites + other.sites,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Eigenvalues of a symmetric operator, computed block by block.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.side());
        for block in self.connected_blocks() {
            let sub = submatrix(&self.matrix, &block);
            let sym = (&sub + sub.transpose()) * 0.5;
            out.extend(SymmetricEigen::new(sym).eigenvalues.iter());
        }
        out
    }

    /// Index sets of the connected components of the nonzero pattern.
    fn connected_blocks(&self) -> Vec<Vec<usize>> {
        let n = self.side();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for j in 0..n {
            let column = self.matrix.column(j);
            for (i, &v) in column.iter().enumerate() {
                if v != 0.0 && i != j {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }
}

fn submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

/// The permutation operator `V_π` on `(ℂ^d)^⊗N`.
pub fn perm_operator(p: &Permutation, d: usize) -> Result<DenseOperator> {
    let mut op = DenseOperator::zeros(d, p.len())?;
    op.add_permutation(p, 1.0)?;
    Ok(op)
}

/// Coefficients `c_π` with `ρ = Σ_π c_π V_π` for a symmetric four-party state.
///
/// `ρ = Σ_λ w_λ Q_λ / tr Q_λ` where `Q_λ = (dim λ / 24) Σ_π χ_λ(π) V_π` is the
/// isotypic projector and `tr Q_λ = (dim λ / 24) Σ_π χ_λ(π) d^{c(π)}`.
pub fn state_coefficients(
    state: &WernerState,
    d: usize,
    group: &SymmetricGroup,
    table: &VertexTable,
) -> Result<Vec<f64>> {
    state.ensure_valid_at(d, table)?;
    let order = group.order() as f64;
    let mut coeffs = vec![0.0; group.order()];
    for (lam, w) in state.weights().0.iter().enumerate() {
        if w.numer() == &0 {
            continue;
        }
        let w = crate::rational::to_f64(w);
        let dim = table.dims[lam] as f64;
        let chi = |k: usize| table.chi[lam][group.class_of(k)] as f64;
        let trace: f64 = (0..group.order())
            .map(|k| dim / order * chi(k) * (d as f64).powi(group.cycle_count(k) as i32))
            .sum();
        if trace <= 0.5 {
            return Err(Error::InvalidAtDimension {
                d,
                min: table.min_rows[lam],
            });
        }
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c += w * dim / order * chi(k) / trace;
        }
    }
    Ok(coeffs)
}

/// Dense density operator of a symmetric Werner state at dimension `d`.
pub fn state_operator(state: &WernerState, d: usize) -> Result<DenseOperator> {
    let group = SymmetricGroup::new(SITES)?;
    let table = crate::werner::vertex_table();
    let coeffs = state_coefficients(state, d, &group, &table)?;
    DenseOperator::from_coefficients(&group, d, &coeffs)
}

/// Transposes the tensor factors in `subset`.
pub fn partial_transpose(x: &DenseOperator, subset: SiteSubset) -> DenseOperator {
    let (d, n, side) = (x.d, x.sites, x.side());
    let mut out = DMatrix::zeros(side, side);
    let mut a = vec![0; n];
    let mut b = vec![0; n];
    for col in 0..side {
        digits(col, d, n, &mut b);
        for row in 0..side {
            let v = x.matrix[(row, col)];
            if v == 0.0 {
                continue;
            }
            digits(row, d, n, &mut a);
            for s in subset.iter().filter(|&s| s < n) {
                std::mem::swap(&mut a[s], &mut b[s]);
            }
            out[(index_of(&a, d), index_of(&b, d))] = v;
            for s in subset.iter().filter(|&s| s < n) {
                std::mem::swap(&mut a[s], &mut b[s]);
            }
        }
    }
    DenseOperator {
        d,
        sites: n,
        matrix: out,
    }
}

/// `tr √(X*X)`: absolute eigenvalues for symmetric `X`, singular values otherwise.
pub fn trace_norm(x: &DenseOperator) -> f64 {
    if x.is_symmetric(1e-12) {
        return x.eigenvalues().iter().map(|v| v.abs()).sum();
    }
    x.connected_blocks()
        .into_iter()
        .map(|block| {
            let sub = submatrix(&x.matrix, &block);
            // components of a non-symmetric pattern are closed under X*X
            sub.singular_values().iter().sum::<f64>()
        })
        .sum()
}

/// Largest singular value.
pub fn operator_norm(x: &DenseOperator) -> f64 {
    if x.is_symmetric(1e-12) {
        return x.eigenvalues().iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    x.matrix.singular_values().max()
}
