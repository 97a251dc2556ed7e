//! Boosting by repetition and the separable bipartite hiding scheme.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::certify::Certifier;
use crate::dense::{
    checked_side, partial_transpose, perm_operator, trace_norm, DenseOperator, MAX_SIDE,
};
use crate::error::{Error, Result};
use crate::partitions::{SitePartition, SiteSubset};
use crate::symgroup::{Permutation, SymmetricGroup};
use crate::werner::StatePair;

/// Cap on the copy count explored by [`required_copies`].
pub const MAX_COPIES: u64 = 50_000_000;

/// Threshold rule for telling `ρ₀` from `ρ₁` with `K` copies: count the
/// copies on which the analyzer clicks and guess `ρ₁` once the count reaches
/// `threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostPlan {
    pub p0: f64,
    pub p1: f64,
    pub copies: u64,
    /// Copies actually measured (`≤ copies`); using fewer can be strictly
    /// better for some threshold lattices.
    pub copies_used: u64,
    pub threshold: u64,
    /// `true` when `p1 < p0`, in which case non-clicks are counted instead.
    pub count_non_clicks: bool,
    pub type_one: f64,
    pub type_two: f64,
    pub error: f64,
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Degenerate(format!("probability {p} outside [0,1]")))
    }
}

/// Best threshold for exactly `k` copies with click probabilities `q0 < q1`.
/// Type I, `P[Bin(k,q0) ≥ t]`, falls with `t` while type II, `P[Bin(k,q1) < t]`,
/// rises, so the minimax threshold sits at their crossing.
fn best_threshold(q0: f64, q1: f64, k: u64) -> (u64, f64, f64) {
    let b0 = Binomial::new(q0, k).expect("validated probability");
    let b1 = Binomial::new(q1, k).expect("validated probability");
    let type_one = |t: u64| if t == 0 { 1.0 } else { b0.sf(t - 1) };
    let type_two = |t: u64| if t == 0 { 0.0 } else { b1.cdf(t - 1) };
    // first t in 0..=k with type_two(t) ≥ type_one(t)
    let (mut lo, mut hi) = (0u64, k);
    if type_two(k) < type_one(k) {
        lo = k;
    } else {
        while lo < hi {
            let mid = (lo + hi) / 2;
            if type_two(mid) >= type_one(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
    }
    let candidates = [lo.saturating_sub(1), lo];
    candidates
        .iter()
        .map(|&t| (t, type_one(t), type_two(t)))
        .min_by(|a, b| a.1.max(a.2).total_cmp(&b.1.max(b.2)).then(a.0.cmp(&b.0)))
        .expect("two candidates")
}

/// Minimax error of threshold rules using at most `copies` copies.
pub fn discrimination_error(p0: f64, p1: f64, copies: u64) -> Result<BoostPlan> {
    check_probability(p0)?;
    check_probability(p1)?;
    if p0 == p1 {
        return Err(Error::Degenerate(
            "p0 = p1: the outcomes carry no information".into(),
        ));
    }
    if copies == 0 {
        return Err(Error::Degenerate("at least one copy is needed".into()));
    }
    let flip = p1 < p0;
    let (q0, q1) = if flip { (1.0 - p0, 1.0 - p1) } else { (p0, p1) };
    let mut best: Option<BoostPlan> = None;
    for k in 1..=copies {
        let (t, e1, e2) = best_threshold(q0, q1, k);
        let error = e1.max(e2);
        if best.as_ref().map_or(true, |b| error < b.error) {
            best = Some(BoostPlan {
                p0,
                p1,
                copies,
                copies_used: k,
                threshold: t,
                count_non_clicks: flip,
                type_one: e1,
                type_two: e2,
                error,
            });
        }
    }
    Ok(best.expect("copies ≥ 1"))
}

/// Smallest `K` whose minimax error is at most `eps`.
///
/// Hoeffding's inequality at the midpoint threshold gives the upper limit
/// `⌈2 ln(1/ε) / (p1 − p0)²⌉` for the scan.
pub fn required_copies(p0: f64, p1: f64, eps: f64) -> Result<u64> {
    check_probability(p0)?;
    check_probability(p1)?;
    if p0 == p1 {
        return Err(Error::Degenerate(
            "p0 = p1: the outcomes carry no information".into(),
        ));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Degenerate(format!("eps = {eps} must lie in (0,1)")));
    }
    let gap = (p1 - p0).abs();
    let upper = (2.0 * (1.0 / eps).ln() / (gap * gap)).ceil().max(1.0);
    if upper > MAX_COPIES as f64 {
        return Err(Error::Degenerate(format!(
            "more than {MAX_COPIES} copies would be needed"
        )));
    }
    let (q0, q1) = if p1 < p0 {
        (1.0 - p0, 1.0 - p1)
    } else {
        (p0, p1)
    };
    for k in 1..=upper as u64 {
        let (_, e1, e2) = best_threshold(q0, q1, k);
        if e1.max(e2) <= eps {
            return Ok(k);
        }
    }
    Ok(upper as u64)
}

/// `(ε₁, ε₂) = (1 − (1 − 1/d)^K, 2^{−K})` for the bipartite scheme.
pub fn bipartite_qualities(d: usize, copies: u32) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { d, min: 2 });
    }
    if copies == 0 {
        return Err(Error::Degenerate("at least one copy is needed".into()));
    }
    let k = copies as i32;
    Ok((1.0 - (1.0 - 1.0 / d as f64).powi(k), 0.5f64.powi(k)))
}

/// `ρ₊ = P₊ / tr P₊` and `ρ₋ = P₋ / tr P₋` on `ℂ^d ⊗ ℂ^d`.
fn symmetric_pair_states(d: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let flip = perm_operator(&Permutation::transposition(2, 0, 1)?, d)?.into_matrix();
    let one = DMatrix::<f64>::identity(d * d, d * d);
    let plus = (&one + &flip) / (d * (d + 1)) as f64;
    let minus = (&one - &flip) / (d * (d - 1)) as f64;
    Ok((plus, minus))
}

fn kron_power(m: &DMatrix<f64>, copies: u32) -> DMatrix<f64> {
    (1..copies).fold(m.clone(), |acc, _| acc.kronecker(m))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BipartiteCheck {
    pub d: usize,
    pub copies: u32,
    /// Half the trace norm of the partial transpose of `ρ̂₁ − ρ̂₀`.
    pub eps1_dense: f64,
    /// `1 − tr(ρ̂₁A) + tr(ρ̂₀A)` with `A = P₊^⊗K`.
    pub eps2_dense: f64,
    pub trace_rho1_a: f64,
    pub trace_rho0_a: f64,
    pub eps1_formula: f64,
    pub eps2_formula: f64,
}

/// Dense evaluation of the bipartite scheme with `K` copies of a `d × d` pair.
///
/// Copy `j` occupies sites `2j` (first party) and `2j+1` (second party); the
/// partial transpose acts on every second-party site.
pub fn bipartite_dense_check(d: usize, copies: u32) -> Result<BipartiteCheck> {
    let (eps1_formula, eps2_formula) = bipartite_qualities(d, copies)?;
    let sites = 2 * copies as usize;
    checked_side(d, sites)?;
    let (plus, minus) = symmetric_pair_states(d)?;
    let rho1 = kron_power(&plus, copies);
    let rho0 = kron_power(&((&plus + &minus) * 0.5), copies);
    let flip = perm_operator(&Permutation::transposition(2, 0, 1)?, d)?.into_matrix();
    let p_plus = (DMatrix::<f64>::identity(d * d, d * d) + flip) * 0.5;
    let analyzer = kron_power(&p_plus, copies);

    let diff = DenseOperator::from_matrix(d, sites, &rho1 - &rho0)?;
    let second_parties: Vec<usize> = (0..copies as usize).map(|j| 2 * j + 1).collect();
    let eps1_dense = 0.5
        * trace_norm(&partial_transpose(
            &diff,
            SiteSubset::from_sites(&second_parties),
        ));
    let trace_rho1_a = (&rho1 * &analyzer).trace();
    let trace_rho0_a = (&rho0 * &analyzer).trace();
    Ok(BipartiteCheck {
        d,
        copies,
        eps1_dense,
        eps2_dense: 1.0 - trace_rho1_a + trace_rho0_a,
        trace_rho1_a,
        trace_rho0_a,
        eps1_formula,
        eps2_formula,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipExpectation {
    pub state: String,
    /// `tr(ρF)` computed densely.
    pub dense: f64,
    pub closed_form: f64,
    pub nonnegative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityCertificate {
    pub d: usize,
    pub rationale: String,
    pub entries: Vec<FlipExpectation>,
    pub certified: bool,
}

/// Records why both bipartite states are separable: a two-party state
/// invariant under `U ⊗ U` is separable exactly when its flip expectation
/// `tr(ρF)` is nonnegative. Only the states used by the scheme are covered.
pub fn separability_certificate(d: usize) -> Result<SeparabilityCertificate> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { d, min: 2 });
    }
    if d * d > MAX_SIDE {
        return Err(Error::GuardExceeded {
            side: d * d,
            limit: MAX_SIDE,
        });
    }
    let (plus, minus) = symmetric_pair_states(d)?;
    let flip = perm_operator(&Permutation::transposition(2, 0, 1)?, d)?.into_matrix();
    let mixed = DMatrix::<f64>::identity(d * d, d * d) / (d * d) as f64;
    let states = [
        ("rho_plus", plus.clone(), 1.0),
        ("(rho_plus + rho_minus)/2", (&plus + &minus) * 0.5, 0.0),
        ("maximally mixed", mixed, 1.0 / d as f64),
    ];
    let entries: Vec<FlipExpectation> = states
        .into_iter()
        .map(|(name, rho, closed_form)| {
            let dense = (&rho * &flip).trace();
            FlipExpectation {
                state: name.into(),
                dense,
                closed_form,
                nonnegative: dense >= -1e-12,
            }
        })
        .collect();
    Ok(SeparabilityCertificate {
        d,
        rationale:
            "U(x)U-invariant two-party states are separable iff tr(rho F) >= 0 for the flip F; \
                    rho_plus and the equal mixture of rho_plus and rho_minus both satisfy it"
                .into(),
        certified: entries.iter().take(2).all(|e| e.nonnegative),
        entries,
    })
}

/// Hiding bound when the parties additionally share a maximally entangled
/// pair of local dimension `D` across the cut: `D` times the unassisted value,
/// since `‖X ⊗ Θ(Ω_D)‖₁ = ‖X‖₁ · D`.
pub fn assisted_bound(
    pair: &StatePair,
    partition: &SitePartition,
    d: usize,
    ancilla: usize,
) -> Result<f64> {
    if ancilla == 0 {
        return Err(Error::DimensionTooSmall { d: ancilla, min: 1 });
    }
    Ok(ancilla as f64 * Certifier::new(d)?.hiding_bound(pair, partition)?.value)
}

/// Dense version of [`assisted_bound`]: builds `Θ_S(Δ) ⊗ Θ(Ω_D)` for every
/// proper compatible `S` and takes the smallest trace norm.
pub fn assisted_bound_dense(
    pair: &StatePair,
    partition: &SitePartition,
    d: usize,
    ancilla: usize,
) -> Result<f64> {
    if ancilla == 0 {
        return Err(Error::DimensionTooSmall { d: ancilla, min: 1 });
    }
    let side = checked_side(d, 4)? * ancilla * ancilla;
    if side > MAX_SIDE {
        return Err(Error::GuardExceeded {
            side,
            limit: MAX_SIDE,
        });
    }
    let cert = Certifier::new(d)?;
    let group = SymmetricGroup::new(4)?;
    let delta = DenseOperator::from_coefficients(&group, d, &cert.delta_coefficients(pair)?)?;
    // Θ(|Φ⟩⟨Φ|) = F / D for the normalized maximally entangled state.
    let omega_t = perm_operator(&Permutation::transposition(2, 0, 1)?, ancilla)?.into_matrix()
        / ancilla as f64;
    let mut subsets = partition.proper_compatible_representatives();
    if subsets.is_empty() {
        subsets.push(SiteSubset::EMPTY);
    }
    subsets
        .into_iter()
        .map(|s| {
            let big = partial_transpose(&delta, s).matrix().kronecker(&omega_t);
            SymmetricEigen::new(big)
                .eigenvalues
                .iter()
                .map(|v| v.abs())
                .sum::<f64>()
        })
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::Numerical("no subsets".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::werner::catalog_pair;
    use approx::assert_abs_diff_eq;

    fn brute_force(p0: f64, p1: f64, k: u64) -> f64 {
        let b0 = Binomial::new(p0, k).unwrap();
        let b1 = Binomial::new(p1, k).unwrap();
        (0..=k)
            .map(|t| {
                let e1 = if t == 0 { 1.0 } else { b0.sf(t - 1) };
                let e2 = if t == 0 { 0.0 } else { b1.cdf(t - 1) };
                e1.max(e2)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn error_examples() {
        assert_eq!(discrimination_error(0.0, 1.0, 1).unwrap().error, 0.0);
        for k in 1..=12 {
            let plan = discrimination_error(0.5, 1.0, k).unwrap();
            assert_abs_diff_eq!(plan.error, 0.5f64.powi(k as i32), epsilon = 1e-12);
            assert_eq!(plan.threshold, k);
        }
        let plan = discrimination_error(1.0 / 3.0, 2.0 / 3.0, 1).unwrap();
        assert_abs_diff_eq!(plan.error, 1.0 / 3.0, epsilon = 1e-12);
        assert_eq!(plan.threshold, 1);
        assert!(discrimination_error(0.3, 0.3, 4).is_err());
        assert!(discrimination_error(0.3, 0.4, 0).is_err());
        let flipped = discrimination_error(0.9, 0.1, 3).unwrap();
        assert!(flipped.count_non_clicks);
        assert_abs_diff_eq!(
            flipped.error,
            discrimination_error(0.1, 0.9, 3).unwrap().error,
            epsilon = 1e-12
        );
    }

    #[test]
    fn binary_searched_threshold_matches_sweep() {
        for &(p0, p1) in &[(0.4, 0.6), (0.1, 0.2), (0.0, 0.3), (0.7, 1.0), (0.45, 0.5)] {
            for k in 1..=25 {
                let (_, e1, e2) = best_threshold(p0, p1, k);
                assert_abs_diff_eq!(e1.max(e2), brute_force(p0, p1, k), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn copies_needed() {
        assert_eq!(required_copies(0.5, 1.0, 1e-3).unwrap(), 10);
        assert_eq!(required_copies(0.0, 1.0, 0.2).unwrap(), 1);
        let k = required_copies(0.4, 0.6, 0.05).unwrap();
        assert!(discrimination_error(0.4, 0.6, k).unwrap().error <= 0.05);
        assert!(discrimination_error(0.4, 0.6, k - 1).unwrap().error > 0.05);
        assert_eq!(k, 67);
        assert!(required_copies(0.4, 0.6, 1.5).is_err());
    }

    #[test]
    fn closed_form_qualities() {
        assert_eq!(bipartite_qualities(2, 1).unwrap(), (0.5, 0.5));
        let (e1, e2) = bipartite_qualities(10, 1).unwrap();
        assert_abs_diff_eq!(e1, 0.1, epsilon = 1e-15);
        assert_eq!(e2, 0.5);
        let (e1, _) = bipartite_qualities(1000, 3).unwrap();
        assert!((e1 - 3.0 / 1000.0).abs() < 1e-5);
        assert!(bipartite_qualities(1, 1).is_err());
        assert!(bipartite_qualities(3, 0).is_err());
    }

    #[test]
    fn dense_check_agrees_with_formula() {
        for (d, k) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
            let c = bipartite_dense_check(d, k).unwrap();
            assert_abs_diff_eq!(c.eps1_dense, c.eps1_formula, epsilon = 1e-9);
            assert_abs_diff_eq!(c.eps2_dense, c.eps2_formula, epsilon = 1e-12);
            assert_abs_diff_eq!(c.trace_rho1_a, 1.0, epsilon = 1e-12);
        }
        assert!(matches!(
            bipartite_dense_check(4, 4),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn flip_expectations() {
        for d in [2, 3, 5] {
            let cert = separability_certificate(d).unwrap();
            assert!(cert.certified);
            for e in &cert.entries {
                assert_abs_diff_eq!(e.dense, e.closed_form, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn assisted_bounds() {
        let strong = catalog_pair("strongest").unwrap();
        let p = SitePartition::parse(4, "12|34").unwrap();
        let one = assisted_bound(&strong, &p, 4, 1).unwrap();
        assert_eq!(
            one,
            Certifier::new(4)
                .unwrap()
                .hiding_bound(&strong, &p)
                .unwrap()
                .value
        );
        let two = assisted_bound(&strong, &p, 4, 2).unwrap();
        assert_abs_diff_eq!(two, 2.0 * one, epsilon = 1e-12);
        assert_abs_diff_eq!(
            assisted_bound_dense(&strong, &p, 4, 2).unwrap(),
            two,
            epsilon = 1e-8
        );
        assert!(assisted_bound(&strong, &p, 2, 2).is_err());
    }
}
