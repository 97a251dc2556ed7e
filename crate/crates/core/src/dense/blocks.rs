//! Weight-block decomposition of partially transposed permutation sums.
//!
//! `Θ_S(V_π)` commutes with `D^⊗(S^c) ⊗ D̄^⊗S` for diagonal unitaries `D`, so it
//! preserves the weight `w(x) = Σ_{s∉S} e_{x_s} − Σ_{s∈S} e_{x_s}` of a basis
//! state `x`. Every operator in `span{Θ_S(V_π)}` is therefore block diagonal
//! with one block per weight. Relabeling the local basis permutes weights
//! without changing matrix entries, so blocks whose weights agree after
//! sorting are identical; only one representative per sorted weight is
//! kept, together with its multiplicity.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{checked_side, digits, index_of, permute_digits};
use crate::error::Result;
use crate::partitions::SiteSubset;
use crate::symgroup::SymmetricGroup;

/// Eigenvalues with multiplicities.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Spectrum {
    pub values: Vec<(f64, usize)>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.0)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|&(v, m)| v.abs() * m as f64).sum()
    }

    pub fn positive_sum(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| v.0 > 0.0)
            .map(|&(v, m)| v * m as f64)
            .sum()
    }

    pub fn operator_norm(&self) -> f64 {
        self.values.iter().map(|v| v.0.abs()).fold(0.0, f64::max)
    }

    pub fn dimension(&self) -> usize {
        self.values.iter().map(|v| v.1).sum()
    }
}

/// One representative weight block.
#[derive(Clone, Debug)]
pub struct Block {
    pub size: usize,
    pub multiplicity: usize,
    /// For every group element, the `(row, col)` positions of the unit entries
    /// of `Θ_S(V_π)` inside this block.
    pub entries: Vec<Vec<(u32, u32)>>,
}

impl Block {
    /// `Σ_k coefficients[k] Θ_S(V_k)` restricted to the block.
    pub fn assemble(&self, coefficients: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for (k, &c) in coefficients.iter().enumerate() {
            if c != 0.0 {
                for &(r, col) in &self.entries[k] {
                    m[(r as usize, col as usize)] += c;
                }
            }
        }
        m
    }

    /// `tr(Θ_S(V_k)^T Y)` restricted to the block.
    pub fn overlap(&self, k: usize, y: &DMatrix<f64>) -> f64 {
        self.entries[k]
            .iter()
            .map(|&(r, c)| y[(r as usize, c as usize)])
            .sum()
    }
}

/// Block structure of `span{Θ_S(V_π)}` on `(ℂ^d)^⊗N`.
#[derive(Clone, Debug)]
pub struct BlockLayout {
    pub d: usize,
    pub subset: SiteSubset,
    pub blocks: Vec<Block>,
}

impl BlockLayout {
    pub fn new(group: &SymmetricGroup, d: usize, subset: SiteSubset) -> Result<Self> {
        let n = group.sites();
        let side = checked_side(d, n)?;
        let mut x = vec![0usize; n];

        // Group basis states by weight, and weights by their sorted form.
        let mut weight_class: HashMap<Vec<i8>, usize> = HashMap::new();
        let mut class_key: Vec<Vec<i8>> = Vec::new();
        let mut class_of_state = Vec::with_capacity(side);
        let mut class_states: Vec<Vec<usize>> = Vec::new();
        for idx in 0..side {
            digits(idx, d, n, &mut x);
            let mut w = vec![0i8; d];
            for (s, &v) in x.iter().enumerate() {
                w[v] += if subset.contains(s) { -1 } else { 1 };
            }
            let next = weight_class.len();
            let class = *weight_class.entry(w.clone()).or_insert_with(|| {
                let mut key = w;
                key.sort_unstable_by(|a, b| b.cmp(a));
                class_key.push(key);
                class_states.push(Vec::new());
                next
            });
            class_states[class].push(idx);
            class_of_state.push(class);
        }
        let mut rep_of_key: HashMap<&Vec<i8>, usize> = HashMap::new();
        let mut representatives: Vec<(usize, usize)> = Vec::new();
        for (class, key) in class_key.iter().enumerate() {
            match rep_of_key.get(key) {
                Some(&b) => representatives[b].1 += 1,
                None => {
                    rep_of_key.insert(key, representatives.len());
                    representatives.push((class, 1));
                }
            }
        }

        // Position of each state inside its representative block, if any.
        let mut slot: Vec<Option<(u32, u32)>> = vec![None; side];
        let mut blocks: Vec<Block> = representatives
            .iter()
            .enumerate()
            .map(|(b, &(class, multiplicity))| {
                for (pos, &st) in class_states[class].iter().enumerate() {
                    slot[st] = Some((b as u32, pos as u32));
                }
                Block {
                    size: class_states[class].len(),
                    multiplicity,
                    entries: vec![Vec::new(); group.order()],
                }
            })
            .collect();

        let mut y = vec![0usize; n];
        for (k, perm) in group.elements().iter().enumerate() {
            for col in 0..side {
                digits(col, d, n, &mut x);
                permute_digits(perm, &x, &mut y);
                // (y, x) is a unit entry of V_π; swap the transposed sites.
                for s in subset.iter().filter(|&s| s < n) {
                    std::mem::swap(&mut x[s], &mut y[s]);
                }
                let (row_idx, col_idx) = (index_of(&y, d), index_of(&x, d));
                if let Some((b, c)) = slot[col_idx] {
                    let (b_row, r) = slot[row_idx].expect("weight is conserved");
                    debug_assert_eq!(b_row, b);
                    blocks[b as usize].entries[k].push((r, c));
                }
            }
        }
        Ok(BlockLayout { d, subset, blocks })
    }

    /// Spectrum of `Θ_S(Σ_k c_k V_k)`, assumed symmetric.
    pub fn spectrum(&self, coefficients: &[f64]) -> Spectrum {
        let mut values = Vec::new();
        for block in &self.blocks {
            let m = symmetrize(block.assemble(coefficients));
            for v in SymmetricEigen::new(m).eigenvalues.iter() {
                values.push((*v, block.multiplicity));
            }
        }
        Spectrum { values }
    }

    /// `‖Θ_S(Σ_k c_k V_k)‖₁`; singular values are used when a block is not symmetric.
    pub fn trace_norm(&self, coefficients: &[f64]) -> f64 {
        self.blocks
            .iter()
            .map(|block| {
                let m = block.assemble(coefficients);
                let norm = if is_symmetric(&m) {
                    SymmetricEigen::new(m)
                        .eigenvalues
                        .iter()
                        .map(|v| v.abs())
                        .sum::<f64>()
                } else {
                    m.singular_values().iter().sum::<f64>()
                };
                norm * block.multiplicity as f64
            })
            .sum()
    }

    /// Applies `f` to the spectrum and returns `t_k = tr(Θ_S(V_k)^T f(X))`
    /// for every `k` in `support`.
    pub fn spectral_overlaps<F: Fn(f64) -> f64>(
        &self,
        coefficients: &[f64],
        support: &[usize],
        f: F,
    ) -> Vec<f64> {
        let mut t = vec![0.0; support.len()];
        for block in &self.blocks {
            let eig = SymmetricEigen::new(symmetrize(block.assemble(coefficients)));
            let fvals = DVector::from_iterator(
                eig.eigenvalues.len(),
                eig.eigenvalues.iter().map(|&v| f(v)),
            );
            let u = &eig.eigenvectors;
            let y = u * DMatrix::from_diagonal(&fvals) * u.transpose();
            for (slot, &k) in t.iter_mut().zip(support) {
                *slot += block.overlap(k, &y) * block.multiplicity as f64;
            }
        }
        t
    }

    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.size * b.multiplicity).sum()
    }
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= 1e-13 * (1.0 + m[(i, j)].abs())))
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}
