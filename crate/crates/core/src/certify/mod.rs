//! Hiding and revealing certification of a state pair.
//!
//! An analyzing operator `A = Σ_π a_π V_π` is admissible for a partition when
//! `0 ≤ Θ_S(A) ≤ 1` for every compatible subset `S` (a PPT relaxation of
//! what the parties can measure with local operations). For such `A` and any
//! compatible `S`, `|tr(ΔA)| ≤ ‖Θ_S(Δ)‖₁`, which gives the hiding bound.
//! Revealing is certified by exhibiting an adapted operator with a large
//! witness value `tr(ΔA)`.

mod optimize;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{
    checked_side, recover_coefficients, state_coefficients, BlockLayout, DenseOperator,
};
use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, SitePartition, SiteSubset};
use crate::rational::{to_f64, Q};
use crate::symgroup::{Permutation, SymmetricGroup};
use crate::werner::{vertex_table, StatePair, VertexTable, SITES};

pub use optimize::{BarrierOptions, WitnessOptions};

/// Spectral tolerance for admissibility.
pub const ADMISSIBLE_TOL: f64 = 1e-9;

/// `A = Σ_π a_π V_π` on four sites, coefficients indexed like the elements of `S₄`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyzingOperator {
    pub coefficients: Vec<f64>,
}

impl AnalyzingOperator {
    pub fn zero() -> Self {
        AnalyzingOperator {
            coefficients: vec![0.0; 24],
        }
    }

    pub fn identity() -> Self {
        let mut a = Self::zero();
        a.coefficients[0] = 1.0;
        a
    }

    /// Builds `Σ c·V_p` from cycle strings such as `"(12)"` or `"e"`.
    pub fn from_terms(group: &SymmetricGroup, terms: &[(&str, f64)]) -> Result<Self> {
        let mut a = Self::zero();
        for (text, c) in terms {
            let p = Permutation::parse_cycles(SITES, text)?;
            let k = group
                .index_of(&p)
                .ok_or_else(|| Error::InvalidPermutation(text.to_string()))?;
            a.coefficients[k] += c;
        }
        Ok(a)
    }

    /// `(1/|K|) Σ_{k ∈ K} V_k`, a projector when `K` is a subgroup.
    pub fn symmetrizer(members: &[usize]) -> Self {
        let mut a = Self::zero();
        for &k in members {
            a.coefficients[k] = 1.0 / members.len() as f64;
        }
        a
    }

    /// `1 − self`.
    pub fn complement(&self) -> Self {
        let mut a = AnalyzingOperator {
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
        };
        a.coefficients[0] += 1.0;
        a
    }

    /// Real symmetric as a matrix, i.e. `a_π = a_{π⁻¹}`.
    pub fn is_symmetric(&self, group: &SymmetricGroup, tol: f64) -> bool {
        (0..group.order()).all(|k| {
            (self.coefficients[k] - self.coefficients[group.inverse_index(k)]).abs() <= tol
        })
    }

    pub fn supported_on(&self, members: &[usize], tol: f64) -> bool {
        self.coefficients
            .iter()
            .enumerate()
            .all(|(k, c)| c.abs() <= tol || members.contains(&k))
    }

    /// Nonzero coefficients keyed by 1-based cycle notation.
    pub fn terms(&self, group: &SymmetricGroup, tol: f64) -> BTreeMap<String, f64> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(k, &c)| (group.element(k).to_string(), c))
            .collect()
    }

    pub fn dense(&self, group: &SymmetricGroup, d: usize) -> Result<DenseOperator> {
        DenseOperator::from_coefficients(group, d, &self.coefficients)
    }
}

/// `r(ρ₁) − r(ρ₀)` on the class of every group element, `0` on the identity.
pub fn delta_by_element(pair: &StatePair, group: &SymmetricGroup) -> Vec<f64> {
    let delta = pair.delta();
    (0..group.order())
        .map(|k| to_f64(&delta.on_class(group.class_of(k), Q::zero())))
        .collect()
}

/// `tr((ρ₁ − ρ₀) A)` from the closed-form expectations; no matrices involved.
pub fn witness_value(pair: &StatePair, a: &AnalyzingOperator, d: usize) -> Result<f64> {
    pair.states_at(d, &vertex_table())?;
    let group = SymmetricGroup::new(SITES)?;
    Ok(signed_value(&delta_by_element(pair, &group), a))
}

fn signed_value(delta: &[f64], a: &AnalyzingOperator) -> f64 {
    delta.iter().zip(&a.coefficients).map(|(x, c)| x * c).sum()
}

/// Spectral window of `Θ_S(A)` for one compatible subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMargin {
    pub subset: String,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// `false` when `A` is not symmetric, in which case no spectra are computed.
    pub hermitian: bool,
    pub margins: Vec<SpectralMargin>,
}

/// Hiding bound for one partition and the subset attaining it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HidingBound {
    pub value: f64,
    /// `None` for the single-block partition, where `‖Δ‖₁` is used.
    pub subset: Option<SiteSubset>,
}

/// Shared state for certification at one local dimension: the group, vertex
/// data and lazily built block layouts per subset (up to complement).
pub struct Certifier {
    d: usize,
    group: SymmetricGroup,
    table: VertexTable,
    layouts: Vec<OnceLock<BlockLayout>>,
}

impl Certifier {
    pub fn new(d: usize) -> Result<Self> {
        checked_side(d, SITES)?;
        Ok(Certifier {
            d,
            group: SymmetricGroup::new(SITES)?,
            table: vertex_table(),
            layouts: (0..1 << SITES).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn group(&self) -> &SymmetricGroup {
        &self.group
    }

    pub fn table(&self) -> &VertexTable {
        &self.table
    }

    /// Block layout of `Θ_S`; `S` and its complement share one layout since
    /// `Θ_{S^c}(X) = Θ_S(X)^T` has the same singular values.
    pub fn layout(&self, subset: SiteSubset) -> &BlockLayout {
        let rep = subset.complement_representative(SITES);
        self.layouts[rep.mask() as usize].get_or_init(|| {
            BlockLayout::new(&self.group, self.d, rep).expect("guard checked in new")
        })
    }

    /// Coefficients of `ρ₁ − ρ₀`; fails if either state is invalid at `d`.
    pub fn delta_coefficients(&self, pair: &StatePair) -> Result<Vec<f64>> {
        let (s0, s1) = pair.states_at(self.d, &self.table)?;
        let c0 = state_coefficients(&s0, self.d, &self.group, &self.table)?;
        let c1 = state_coefficients(&s1, self.d, &self.group, &self.table)?;
        Ok(c1.iter().zip(&c0).map(|(a, b)| a - b).collect())
    }

    pub fn hiding_bound(&self, pair: &StatePair, partition: &SitePartition) -> Result<HidingBound> {
        let delta = self.delta_coefficients(pair)?;
        Ok(self.hiding_bound_from(&delta, partition))
    }

    fn hiding_bound_from(&self, delta: &[f64], partition: &SitePartition) -> HidingBound {
        let subsets = partition.proper_compatible_representatives();
        if subsets.is_empty() {
            let value = self.layout(SiteSubset::EMPTY).trace_norm(delta);
            return HidingBound {
                value,
                subset: None,
            };
        }
        subsets
            .into_iter()
            .map(|s| HidingBound {
                value: self.layout(s).trace_norm(delta),
                subset: Some(s),
            })
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .expect("nonempty")
    }

    pub fn check_admissible(
        &self,
        a: &AnalyzingOperator,
        partition: &SitePartition,
    ) -> Admissibility {
        if !a.is_symmetric(&self.group, 1e-12) {
            return Admissibility {
                admissible: false,
                hermitian: false,
                margins: Vec::new(),
            };
        }
        let margins: Vec<SpectralMargin> = partition
            .compatible_representatives()
            .into_iter()
            .map(|s| {
                let spec = self.layout(s).spectrum(&a.coefficients);
                SpectralMargin {
                    subset: s.to_string(),
                    min_eigenvalue: spec.min(),
                    max_eigenvalue: spec.max(),
                }
            })
            .collect();
        let admissible = margins.iter().all(|m| {
            m.min_eigenvalue >= -ADMISSIBLE_TOL && m.max_eigenvalue <= 1.0 + ADMISSIBLE_TOL
        });
        Admissibility {
            admissible,
            hermitian: true,
            margins,
        }
    }

    pub fn optimize_witness(
        &self,
        pair: &StatePair,
        partition: &SitePartition,
        options: &WitnessOptions,
    ) -> Result<AnalyzingOperator> {
        pair.states_at(self.d, &self.table)?;
        Ok(optimize::adapted_ascent(
            self,
            &delta_by_element(pair, &self.group),
            partition,
            options,
        ))
    }

    /// Optimal witness over the whole permutation span under the PPT
    /// constraints of `partition`, by a log-barrier interior-point method.
    pub fn optimize_ppt_witness(
        &self,
        pair: &StatePair,
        partition: &SitePartition,
        options: &BarrierOptions,
    ) -> Result<AnalyzingOperator> {
        pair.states_at(self.d, &self.table)?;
        optimize::barrier(
            self,
            &delta_by_element(pair, &self.group),
            partition,
            options,
        )
    }

    /// Maximizes `Σ_k objective[k]·a_k` over symmetric operators admissible
    /// for `partition`, with the same interior-point method.
    pub fn maximize_linear(
        &self,
        objective: &[f64],
        partition: &SitePartition,
        options: &BarrierOptions,
    ) -> Result<AnalyzingOperator> {
        optimize::barrier(self, objective, partition, options)
    }
}

pub fn hiding_bound(pair: &StatePair, partition: &SitePartition, d: usize) -> Result<f64> {
    Ok(Certifier::new(d)?.hiding_bound(pair, partition)?.value)
}

pub fn check_admissible(
    a: &AnalyzingOperator,
    partition: &SitePartition,
    d: usize,
) -> Result<Admissibility> {
    Ok(Certifier::new(d)?.check_admissible(a, partition))
}

pub fn optimize_witness(
    pair: &StatePair,
    partition: &SitePartition,
    d: usize,
    iterations: usize,
) -> Result<AnalyzingOperator> {
    let options = WitnessOptions {
        iterations,
        ..WitnessOptions::default()
    };
    Certifier::new(d)?.optimize_witness(pair, partition, &options)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Hiding,
    Revealing,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub partition: String,
    pub partition_type: String,
    pub hiding_bound: f64,
    /// Subset `S` attaining the bound (1-based), absent for the single block.
    pub bound_subset: Option<String>,
    pub witness_value: f64,
    pub verdict: Verdict,
    /// Present when the witness value is positive.
    pub witness_coefficients: Option<BTreeMap<String, f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub pair: String,
    pub d: usize,
    pub eps1: f64,
    pub eps2: f64,
    pub notes: Vec<String>,
    pub rows: Vec<PartitionRow>,
}

impl QualityReport {
    pub fn row(&self, partition: &str) -> Option<&PartitionRow> {
        self.rows.iter().find(|r| r.partition == partition)
    }

    /// Pairs `(finer, coarser)` of row indices violating bound monotonicity
    /// (beyond `tol`) or the verdict lattice.
    pub fn lattice_violations(&self, tol: f64) -> Vec<(String, String)> {
        let parts: Vec<SitePartition> = self
            .rows
            .iter()
            .map(|r| SitePartition::parse(SITES, &r.partition).expect("rows hold valid partitions"))
            .collect();
        let mut out = Vec::new();
        for (i, fine) in parts.iter().enumerate() {
            for (j, coarse) in parts.iter().enumerate() {
                if i == j || !fine.refines(coarse) {
                    continue;
                }
                let (rf, rc) = (&self.rows[i], &self.rows[j]);
                let bound_bad = rf.hiding_bound > rc.hiding_bound + tol;
                let verdict_bad = rc.verdict == Verdict::Hiding && rf.verdict != Verdict::Hiding;
                if bound_bad || verdict_bad {
                    out.push((rf.partition.clone(), rc.partition.clone()));
                }
            }
        }
        out
    }
}

pub fn default_eps1(d: usize) -> f64 {
    5.0 / d as f64
}

pub const DEFAULT_EPS2: f64 = 1e-6;

/// Bounds and witnesses for all fifteen partitions of four sites.
///
/// Two sound propagations along the refinement order are applied: an
/// operator admissible for a finer partition is admissible for every coarser
/// one, so witnesses move up; and the bound of a coarser partition also
/// bounds every finer one, so bounds move down (this only matters for the
/// single-block fallback).
pub fn classify_pair(pair: &StatePair, d: usize, eps1: f64, eps2: f64) -> Result<QualityReport> {
    let cert = Certifier::new(d)?;
    let delta = cert.delta_coefficients(pair)?;
    let delta_el = delta_by_element(pair, &cert.group);
    let partitions = enumerate_partitions(SITES)?;
    let options = WitnessOptions::default();

    let raw: Vec<(HidingBound, AnalyzingOperator, f64)> = partitions
        .par_iter()
        .map(|p| {
            let bound = cert.hiding_bound_from(&delta, p);
            let w = optimize::adapted_ascent(&cert, &delta_el, p, &options);
            let value = signed_value(&delta_el, &w);
            (bound, w, value)
        })
        .collect();

    let mut rows = Vec::with_capacity(partitions.len());
    for (i, p) in partitions.iter().enumerate() {
        let mut bound = raw[i].0;
        let (mut witness, mut value) = (&raw[i].1, raw[i].2);
        for (j, q) in partitions.iter().enumerate() {
            if i == j {
                continue;
            }
            if p.refines(q) && raw[j].0.value < bound.value {
                bound = raw[j].0;
            }
            if q.refines(p) && raw[j].2 > value {
                witness = &raw[j].1;
                value = raw[j].2;
            }
        }
        let verdict = if value >= 1.0 - eps2 {
            Verdict::Revealing
        } else if bound.value <= eps1 {
            Verdict::Hiding
        } else {
            Verdict::Indeterminate
        };
        rows.push(PartitionRow {
            partition: p.to_string(),
            partition_type: p.partition_type().to_string(),
            hiding_bound: bound.value,
            bound_subset: bound.subset.map(|s| s.to_string()),
            witness_value: value,
            verdict,
            witness_coefficients: (value > 0.0).then(|| witness.terms(&cert.group, 1e-12)),
        });
    }
    Ok(QualityReport {
        pair: pair.name.clone(),
        d,
        eps1,
        eps2,
        notes: vec![
            "hiding bounds use the PPT relaxation: min over compatible S (excluding the empty and full set) of the trace norm of the partial transpose of rho1 - rho0; hiding against PPT operators implies hiding against LOCC".into(),
            "the single-block partition has no proper compatible subset; its bound is the plain trace norm of rho1 - rho0".into(),
            "witnesses are adapted operators with spectrum in [0,1]; witness_value is tr((rho1 - rho0) A)".into(),
            "verdict: revealing if witness_value >= 1 - eps2, else hiding if hiding_bound <= eps1, else indeterminate".into(),
        ],
        rows,
    })
}

/// Which admissible operators the decay experiment inspects.
#[derive(Clone, Debug, PartialEq)]
pub enum DecayFamily {
    /// For every non-adapted `π`, the admissible operator maximizing `a_π`.
    /// This is the supremum the coefficient bound is about.
    Extremal,
    /// The PPT-optimal witness of one state pair.
    PairWitness(StatePair),
}

impl DecayFamily {
    pub fn label(&self) -> String {
        match self {
            DecayFamily::Extremal => "extremal".into(),
            DecayFamily::PairWitness(p) => format!("witness:{}", p.name),
        }
    }
}

/// Largest non-adapted coefficient over the chosen family, per `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub d: usize,
    pub max_nonadapted_coeff: f64,
    /// Permutation attaining the maximum, 1-based cycle notation.
    pub argmax: String,
    /// Largest relative residual of the exact coefficient recovery.
    pub recovery_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub partition: String,
    pub family: String,
    pub rows: Vec<DecayRow>,
}

impl DecayTable {
    /// Least-squares slope of `log(max coeff)` against `log d`.
    pub fn fitted_slope(&self) -> f64 {
        log_log_slope(
            &self
                .rows
                .iter()
                .map(|r| (r.d as f64, r.max_nonadapted_coeff))
                .collect::<Vec<_>>(),
        )
    }
}

/// Least-squares slope in log–log coordinates.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// For each `d`, builds the admissible operators of `family` at `partition`,
/// expands each through the exact Gram inverse and records the largest
/// non-adapted coefficient.
pub fn coefficient_decay(
    partition: &SitePartition,
    d_range: &[usize],
    family: &DecayFamily,
) -> Result<DecayTable> {
    for &d in d_range {
        checked_side(d, SITES)?;
        if d < SITES {
            return Err(Error::DimensionTooSmall { d, min: SITES });
        }
    }
    let options = BarrierOptions::default();
    let rows = d_range
        .par_iter()
        .map(|&d| {
            let cert = Certifier::new(d)?;
            let group = &cert.group;
            let adapted = partition.adapted_indices(group);
            let operators: Vec<AnalyzingOperator> = match family {
                DecayFamily::PairWitness(pair) => {
                    vec![cert.optimize_ppt_witness(pair, partition, &options)?]
                }
                DecayFamily::Extremal => (0..group.order())
                    .filter(|&k| !adapted.contains(&k) && group.inverse_index(k) >= k)
                    .map(|k| {
                        let mut objective = vec![0.0; group.order()];
                        objective[k] = 1.0;
                        cert.maximize_linear(&objective, partition, &options)
                    })
                    .collect::<Result<_>>()?,
            };
            let mut row = DecayRow {
                d,
                max_nonadapted_coeff: 0.0,
                argmax: "e".into(),
                recovery_residual: 0.0,
            };
            for w in &operators {
                let recovered = recover_coefficients(group, &w.dense(group, d)?)?;
                row.recovery_residual = row.recovery_residual.max(recovered.residual);
                for (k, c) in recovered.coefficients.iter().enumerate() {
                    if !adapted.contains(&k) && c.abs() > row.max_nonadapted_coeff {
                        row.max_nonadapted_coeff = c.abs();
                        row.argmax = group.element(k).to_string();
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayTable {
        partition: partition.to_string(),
        family: family.label(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::werner::catalog_pair;
    use approx::assert_abs_diff_eq;

    fn part(s: &str) -> SitePartition {
        SitePartition::parse(4, s).unwrap()
    }

    #[test]
    fn catalog_witnesses() {
        let g = SymmetricGroup::new(4).unwrap();
        let sym = AnalyzingOperator::from_terms(&g, &[("e", 0.5), ("(12)", 0.5)]).unwrap();
        let v = witness_value(&catalog_pair("weakest").unwrap(), &sym, 4).unwrap();
        assert_abs_diff_eq!(v.abs(), 1.0, epsilon = 1e-12);
        let third = 1.0 / 3.0;
        let cyc =
            AnalyzingOperator::from_terms(&g, &[("e", third), ("(123)", third), ("(321)", third)])
                .unwrap();
        let v = witness_value(&catalog_pair("two-pairs").unwrap(), &cyc, 4).unwrap();
        assert_abs_diff_eq!(v.abs(), 1.0, epsilon = 1e-12);
        assert_eq!(
            witness_value(
                &catalog_pair("two-pairs").unwrap(),
                &AnalyzingOperator::zero(),
                4
            )
            .unwrap(),
            0.0
        );
        assert!(witness_value(&catalog_pair("two-pairs").unwrap(), &cyc, 3).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let cert = Certifier::new(3).unwrap();
        let g = cert.group().clone();
        let sym = AnalyzingOperator::from_terms(&g, &[("e", 0.5), ("(12)", 0.5)]).unwrap();
        assert!(cert.check_admissible(&sym, &part("12|3|4")).admissible);
        let swap = AnalyzingOperator::from_terms(&g, &[("(12)", 1.0)]).unwrap();
        let adm = cert.check_admissible(&swap, &part("12|3|4"));
        assert!(!adm.admissible);
        assert_abs_diff_eq!(adm.margins[0].min_eigenvalue, -1.0, epsilon = 1e-10);
        for p in enumerate_partitions(4).unwrap() {
            assert!(
                cert.check_admissible(&AnalyzingOperator::identity(), &p)
                    .admissible
            );
        }
        let cyc = AnalyzingOperator::from_terms(&g, &[("(123)", 1.0)]).unwrap();
        assert!(!cert.check_admissible(&cyc, &part("1234")).hermitian);
    }

    #[test]
    fn identical_states_have_zero_bounds_and_witnesses() {
        let t = vertex_table();
        let p = catalog_pair("two-pairs").unwrap();
        let same = StatePair::new("same", p.rho1.r, p.rho1.r, &t);
        let report = classify_pair(&same, 3, 0.5, DEFAULT_EPS2).unwrap();
        for row in &report.rows {
            assert!(row.hiding_bound.abs() < 1e-10);
            assert_eq!(row.witness_value, 0.0);
            assert_eq!(row.verdict, Verdict::Hiding);
        }
    }

    #[test]
    fn optimized_witnesses_reach_perfect_values() {
        let cert = Certifier::new(4).unwrap();
        let opts = WitnessOptions::default();
        let two = catalog_pair("two-pairs").unwrap();
        let w = cert.optimize_witness(&two, &part("123|4"), &opts).unwrap();
        assert_abs_diff_eq!(witness_value(&two, &w, 4).unwrap(), 1.0, epsilon = 1e-9);
        let strong = catalog_pair("strongest").unwrap();
        let w = cert
            .optimize_witness(&strong, &part("1234"), &opts)
            .unwrap();
        assert!(witness_value(&strong, &w, 4).unwrap() >= 1.0 - 1e-6);
        assert!(cert.check_admissible(&w, &part("1234")).admissible);
        // adapted Δ-expectations vanish on 12|34 for the strongest pair
        let w = cert
            .optimize_witness(&strong, &part("12|34"), &opts)
            .unwrap();
        assert_abs_diff_eq!(witness_value(&strong, &w, 4).unwrap(), 0.0, epsilon = 1e-12);
        let adapted = part("12|34").adapted_indices(cert.group());
        assert!(w.supported_on(&adapted, 0.0));
    }

    #[test]
    fn weakest_pair_classification() {
        let report = classify_pair(
            &catalog_pair("weakest").unwrap(),
            6,
            default_eps1(6),
            DEFAULT_EPS2,
        )
        .unwrap();
        for row in &report.rows {
            let finest = row.partition_type == "1111";
            assert_eq!(
                row.verdict == Verdict::Revealing,
                !finest,
                "{}",
                row.partition
            );
        }
        assert!(report.lattice_violations(1e-10).is_empty());
    }

    #[test]
    fn hiding_bound_regression() {
        let strong = catalog_pair("strongest").unwrap();
        let bounds: Vec<f64> = (4..=8)
            .map(|d| hiding_bound(&strong, &part("12|34"), d).unwrap())
            .collect();
        // dense eigendecomposition values, kept as fixtures
        assert_abs_diff_eq!(bounds[0], 83.0 / 30.0, epsilon = 1e-9);
        assert_abs_diff_eq!(bounds[1], 1.971428571428572, epsilon = 1e-9);
        assert!(bounds.windows(2).all(|w| w[1] < w[0]), "{bounds:?}");
        assert!(bounds[4] < 1.1);
        let weakest = catalog_pair("weakest").unwrap();
        let b = hiding_bound(&weakest, &part("1|2|3|4"), 4).unwrap();
        assert_abs_diff_eq!(b, 5.0, epsilon = 1e-9);
    }

    #[test]
    fn decay_of_identity_and_small_table() {
        let cert = Certifier::new(4).unwrap();
        let r = recover_coefficients(
            cert.group(),
            &AnalyzingOperator::identity()
                .dense(cert.group(), 4)
                .unwrap(),
        )
        .unwrap();
        assert!(r.coefficients[1..].iter().all(|c| c.abs() < 1e-12));
        let table = coefficient_decay(&part("12|34"), &[4, 5], &DecayFamily::Extremal).unwrap();
        assert!(table.rows[1].max_nonadapted_coeff < table.rows[0].max_nonadapted_coeff);
        assert!(table
            .rows
            .iter()
            .all(|r| r.max_nonadapted_coeff > 0.0 && r.recovery_residual < 1e-8));
        assert!(matches!(
            coefficient_decay(&part("12|34"), &[3], &DecayFamily::Extremal),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn ppt_witness_is_admissible_and_beats_adapted_witness() {
        let cert = Certifier::new(4).unwrap();
        let strong = catalog_pair("strongest").unwrap();
        let p = part("12|34");
        let w = cert
            .optimize_ppt_witness(&strong, &p, &BarrierOptions::default())
            .unwrap();
        assert!(cert.check_admissible(&w, &p).admissible);
        let v = witness_value(&strong, &w, 4).unwrap();
        assert!(
            v > 0.5 && v <= cert.hiding_bound(&strong, &p).unwrap().value + 1e-8,
            "{v}"
        );
    }
}
