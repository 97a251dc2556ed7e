use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{signed_value, AnalyzingOperator, Certifier};
use crate::dense::{solve_on_support, symmetric_pseudo_inverse};
use crate::error::{Error, Result};
use crate::partitions::{SitePartition, SiteSubset};

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessOptions {
    pub iterations: usize,
    pub step: f64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            iterations: 200,
            step: 0.125,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BarrierOptions {
    /// Stop once the duality gap bound `ν/t` falls below this.
    pub gap: f64,
    /// Growth factor of `t` between centering steps.
    pub growth: f64,
    pub max_newton: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        BarrierOptions {
            gap: 1e-7,
            growth: 10.0,
            max_newton: 80,
        }
    }
}

fn embed(support: &[usize], values: &[f64], order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order];
    for (&k, &v) in support.iter().zip(values) {
        out[k] = v;
    }
    out
}

/// Applies `f` to the spectrum of the adapted operator with coefficients `c`
/// and expands the result back onto `support`.
fn spectral_map<F: Fn(f64) -> f64>(
    cert: &Certifier,
    c: &[f64],
    support: &[usize],
    f: F,
) -> Vec<f64> {
    let group = cert.group();
    let t = cert
        .layout(SiteSubset::EMPTY)
        .spectral_overlaps(c, support, f);
    let mut out = embed(
        support,
        &solve_on_support(group, cert.d(), support, &t),
        group.order(),
    );
    // exact symmetry a_π = a_{π⁻¹} is lost to rounding; restore it
    for k in 0..out.len() {
        let inv = group.inverse_index(k);
        if inv > k {
            let m = 0.5 * (out[k] + out[inv]);
            out[k] = m;
            out[inv] = m;
        }
    }
    out
}

/// Steepest ascent in operator-norm geometry over the adapted algebra,
/// clipped back to `0 ≤ A ≤ 1` after each step and seeded with subgroup
/// symmetrizers and their complements.
pub(super) fn adapted_ascent(
    cert: &Certifier,
    delta: &[f64],
    partition: &SitePartition,
    options: &WitnessOptions,
) -> AnalyzingOperator {
    let group = cert.group();
    let adapted = partition.adapted_indices(group);
    if adapted.iter().all(|&k| delta[k] == 0.0) {
        return AnalyzingOperator::zero();
    }

    let mut subgroups: Vec<Vec<usize>> = Vec::new();
    for (i, &a) in adapted.iter().enumerate() {
        for &b in &adapted[i..] {
            let h = group.generated_subgroup(&[a, b]);
            if !subgroups.contains(&h) {
                subgroups.push(h);
            }
        }
    }
    let mut best = AnalyzingOperator::zero();
    let mut best_value = 0.0;
    for h in &subgroups {
        let s = AnalyzingOperator::symmetrizer(h);
        for cand in [s.complement(), s] {
            let v = signed_value(delta, &cand);
            if v > best_value {
                best_value = v;
                best = cand;
            }
        }
    }

    // Hilbert-Schmidt projection of Δ onto the adapted span: tr(V_h^T Δ) = Δ(h).
    let overlaps: Vec<f64> = adapted.iter().map(|&k| delta[k]).collect();
    let projected = embed(
        &adapted,
        &solve_on_support(group, cert.d(), &adapted, &overlaps),
        group.order(),
    );
    let direction = spectral_map(cert, &projected, &adapted, |v| {
        if v > 1e-12 {
            1.0
        } else if v < -1e-12 {
            -1.0
        } else {
            0.0
        }
    });

    let mut current = best.coefficients.clone();
    for _ in 0..options.iterations {
        let stepped: Vec<f64> = current
            .iter()
            .zip(&direction)
            .map(|(a, s)| a + options.step * s)
            .collect();
        current = spectral_map(cert, &stepped, &adapted, |v| v.clamp(0.0, 1.0));
        let cand = AnalyzingOperator {
            coefficients: current.clone(),
        };
        let v = signed_value(delta, &cand);
        if v > best_value + 1e-15 && cert.check_admissible(&cand, partition).admissible {
            best_value = v;
            best = cand;
        }
    }
    best
}

/// Symmetric basis `V_π + V_π⁻¹` (or `V_π` for involutions), one per orbit.
fn symmetric_orbits(cert: &Certifier) -> Vec<Vec<usize>> {
    let group = cert.group();
    (0..group.order())
        .filter(|&k| group.inverse_index(k) >= k)
        .map(|k| {
            let inv = group.inverse_index(k);
            if inv == k {
                vec![k]
            } else {
                vec![k, inv]
            }
        })
        .collect()
}

struct ConstraintBlock {
    multiplicity: f64,
    basis: Vec<DMatrix<f64>>,
}

impl ConstraintBlock {
    fn matrix(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.basis[0].nrows();
        let mut m = DMatrix::zeros(n, n);
        for (b, &xj) in self.basis.iter().zip(x) {
            if xj != 0.0 {
                m += b * xj;
            }
        }
        m
    }
}

/// Maximizes `c·x` over `0 ≤ Θ_S(Σ x_j B_j) ≤ 1` for all compatible `S`
/// with a path-following log-barrier method and damped Newton centering.
pub(super) fn barrier(
    cert: &Certifier,
    delta: &[f64],
    partition: &SitePartition,
    options: &BarrierOptions,
) -> Result<AnalyzingOperator> {
    let orbits = symmetric_orbits(cert);
    let m = orbits.len();
    let c: Vec<f64> = orbits
        .iter()
        .map(|o| o.iter().map(|&k| delta[k]).sum())
        .collect();

    let mut blocks: Vec<ConstraintBlock> = Vec::new();
    for s in partition.compatible_representatives() {
        for block in &cert.layout(s).blocks {
            let basis = orbits
                .iter()
                .map(|o| {
                    let mut coeffs = vec![0.0; cert.group().order()];
                    for &k in o {
                        coeffs[k] = 1.0;
                    }
                    let b = block.assemble(&coeffs);
                    (&b + b.transpose()) * 0.5
                })
                .collect();
            blocks.push(ConstraintBlock {
                multiplicity: block.multiplicity as f64,
                basis,
            });
        }
    }
    let nu: f64 = blocks
        .iter()
        .map(|b| 2.0 * b.multiplicity * b.basis[0].nrows() as f64)
        .sum();

    let mut x = vec![0.0; m];
    x[0] = 0.5; // orbit of the identity comes first
    let mut t = 1.0;
    loop {
        center(&blocks, &c, t, &mut x, options.max_newton)?;
        if nu / t < options.gap {
            break;
        }
        t *= options.growth;
    }

    let mut coefficients = vec![0.0; cert.group().order()];
    for (o, &xj) in orbits.iter().zip(&x) {
        for &k in o {
            coefficients[k] = xj;
        }
    }
    Ok(AnalyzingOperator { coefficients })
}

/// Damped Newton on `t·(−c·x) − Σ log det X − Σ log det (1 − X)`.
fn center(
    blocks: &[ConstraintBlock],
    c: &[f64],
    t: f64,
    x: &mut [f64],
    max_newton: usize,
) -> Result<()> {
    let m = x.len();
    for _ in 0..max_newton {
        let mut grad = DVector::from_iterator(m, c.iter().map(|cj| -t * cj));
        let mut hess = DMatrix::zeros(m, m);
        for block in blocks {
            let eig = SymmetricEigen::new(block.matrix(x));
            let lam = &eig.eigenvalues;
            if lam.iter().any(|&l| l <= 0.0 || l >= 1.0) {
                return Err(Error::Numerical(
                    "barrier iterate left the feasible set".into(),
                ));
            }
            let n = lam.len();
            let u = &eig.eigenvectors;
            let rotated: Vec<DMatrix<f64>> =
                block.basis.iter().map(|b| u.transpose() * b * u).collect();
            let weight = DMatrix::from_fn(n, n, |p, q| {
                1.0 / (lam[p] * lam[q]) + 1.0 / ((1.0 - lam[p]) * (1.0 - lam[q]))
            });
            let mult = block.multiplicity;
            for (i, bi) in rotated.iter().enumerate() {
                let g: f64 = (0..n)
                    .map(|p| bi[(p, p)] * (1.0 / lam[p] - 1.0 / (1.0 - lam[p])))
                    .sum();
                grad[i] -= mult * g;
                let wi = bi.component_mul(&weight);
                for (j, bj) in rotated.iter().enumerate().skip(i) {
                    let h = mult * wi.dot(bj);
                    hess[(i, j)] += h;
                    if i != j {
                        hess[(j, i)] += h;
                    }
                }
            }
        }
        let step = match hess.clone().cholesky() {
            Some(ch) => ch.solve(&(-&grad)),
            None => symmetric_pseudo_inverse(hess, 1e-14) * (-&grad),
        };
        let decrement = (-grad.dot(&step)).max(0.0).sqrt();
        let scale = if decrement > 0.25 {
            1.0 / (1.0 + decrement)
        } else {
            1.0
        };
        for (xi, si) in x.iter_mut().zip(step.iter()) {
            *xi += scale * si;
        }
        if decrement < 1e-7 {
            return Ok(());
        }
    }
    Ok(())
}
