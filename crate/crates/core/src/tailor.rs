//! Designing state pairs for a prescribed set of hiding partition types.
//!
//! A partition can only be hiding if `Δ = r(ρ₁) − r(ρ₀)` vanishes on every
//! class that contains a permutation adapted to it; otherwise the adapted
//! symmetrizers detect the difference. Conversely each revealing type needs
//! some adapted class with `Δ ≠ 0`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::certify::{classify_pair, default_eps1, QualityReport, Verdict, DEFAULT_EPS2};
use crate::error::{Error, Result};
use crate::partitions::{down_closure_valid, PartitionType};
use crate::rational::{format_rational, Q};
use crate::symgroup::SymmetricGroup;
use crate::werner::{
    vertex_table, CatalogEntry, ExpectationVector, IrrepWeights, StatePair, WernerState, IRREPS,
    SITES,
};

/// Grid denominators tried in turn by [`design_pair`].
pub const GRID_DENOMINATORS: [i64; 3] = [4, 8, 16];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HidingSpec {
    hiding: BTreeSet<PartitionType>,
}

impl HidingSpec {
    pub fn new(hiding: BTreeSet<PartitionType>) -> Result<Self> {
        if hiding.iter().any(|t| t.sites() != SITES) {
            return Err(Error::InvalidSpec(format!(
                "every type must partition {SITES} sites"
            )));
        }
        if hiding.contains(&PartitionType(vec![SITES])) {
            return Err(Error::InvalidSpec(
                "the single-block type can never be hiding".into(),
            ));
        }
        if !down_closure_valid(&hiding) {
            return Err(Error::InvalidSpec(
                "hiding types must be closed under refinement".into(),
            ));
        }
        Ok(HidingSpec { hiding })
    }

    pub fn hiding_types(&self) -> &BTreeSet<PartitionType> {
        &self.hiding
    }

    pub fn revealing_types(&self) -> Vec<PartitionType> {
        PartitionType::all(SITES)
            .into_iter()
            .filter(|t| !self.hiding.contains(t))
            .collect()
    }

    /// The six down-closed specs: `{}`, `{1111}`, `{1111,211}`, then adding
    /// `22`, `31`, or both.
    pub fn all_down_closed() -> Vec<HidingSpec> {
        [
            "",
            "1111",
            "1111,211",
            "1111,211,22",
            "1111,211,31",
            "1111,211,22,31",
        ]
        .iter()
        .map(|s| s.parse().expect("listed specs are valid"))
        .collect()
    }
}

impl FromStr for HidingSpec {
    type Err = Error;

    /// Comma-separated types, e.g. `"1111,211,22"`; empty text is the empty spec.
    fn from_str(text: &str) -> Result<Self> {
        let hiding = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(PartitionType::from_str)
            .collect::<Result<BTreeSet<_>>>()?;
        HidingSpec::new(hiding)
    }
}

impl fmt::Display for HidingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut types: Vec<&PartitionType> = self.hiding.iter().collect();
        types.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.cmp(b)));
        let names: Vec<String> = types.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", names.join(","))
    }
}

/// Non-identity classes (1..=4, indexing `Δ` components `r₂, r₂₂, r₃, r₄`)
/// containing a permutation adapted to partitions of type `t`.
pub fn adapted_classes(t: &PartitionType) -> BTreeSet<usize> {
    let group = SymmetricGroup::new(SITES).expect("four sites");
    t.representative()
        .adapted_indices(&group)
        .into_iter()
        .map(|k| group.class_of(k))
        .filter(|&c| c != 0)
        .collect()
}

/// Classes on which `Δ` must vanish: component indices `0..4` of `Δ`.
pub fn hiding_constraints(spec: &HidingSpec) -> BTreeSet<usize> {
    spec.hiding
        .iter()
        .flat_map(adapted_classes)
        .map(|c| c - 1)
        .collect()
}

/// `max |Δ_c|` over the adapted classes of `t`; zero when only the identity is adapted.
pub fn revealing_margin(delta: &ExpectationVector, t: &PartitionType) -> Q {
    adapted_classes(t)
        .into_iter()
        .map(|c| delta.0[c - 1].abs())
        .max()
        .unwrap_or_else(Q::zero)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub spec: String,
    #[serde(flatten)]
    pub entry: CatalogEntry,
    pub weights0: Vec<String>,
    pub weights1: Vec<String>,
    /// Per hiding type, `max |Δ_c|` over its adapted classes (`"0/1"` when satisfied).
    pub constraint_residuals: BTreeMap<String, String>,
    /// Per revealing type, `max |Δ_c|` over its adapted classes.
    pub revealing_margins: BTreeMap<String, String>,
    pub grid_denominator: i64,
    pub min_dimension: usize,
    pub objective: String,
}

impl DesignResult {
    pub fn pair(&self) -> Result<StatePair> {
        self.entry.to_pair()
    }
}

fn margins_by_type(delta: &ExpectationVector, types: &[PartitionType]) -> BTreeMap<String, String> {
    types
        .iter()
        .map(|t| (t.to_string(), format_rational(&revealing_margin(delta, t))))
        .collect()
}

/// All nonnegative integer vectors of length `IRREPS` summing to `n`, in
/// lexicographic order.
fn compositions(n: i64) -> Vec<[i64; IRREPS]> {
    fn rec(i: usize, left: i64, cur: &mut [i64; IRREPS], out: &mut Vec<[i64; IRREPS]>) {
        if i == IRREPS - 1 {
            cur[i] = left;
            out.push(*cur);
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut [0; IRREPS], &mut out);
    out
}

/// Exact grid search over pairs of vertex-weight vectors.
///
/// Among pairs meeting every hiding constraint, picks the one maximizing the
/// smallest revealing margin. The finest type is left out of that minimum
/// because its only adapted permutation is the identity, so its margin is
/// always zero. Ties go to the first pair in lexicographic order of
/// `(weights0, weights1)`.
pub fn design_pair(spec: &HidingSpec) -> Result<DesignResult> {
    let table = vertex_table();
    let zero_classes = hiding_constraints(spec);
    let revealing = spec.revealing_types();
    let scored: Vec<(PartitionType, BTreeSet<usize>)> = revealing
        .iter()
        .filter(|t| t.0.len() < SITES)
        .map(|t| (t.clone(), adapted_classes(t)))
        .collect();
    // 6ω_λ is integral for every irrep of S₄.
    let omega6: Vec<[i64; 4]> = table
        .omega
        .iter()
        .map(|om| {
            std::array::from_fn(|c| {
                let v = om.0[c] * Q::from_integer(6);
                assert!(v.is_integer());
                v.to_integer()
            })
        })
        .collect();

    for &n in &GRID_DENOMINATORS {
        let grid = compositions(n);
        let mut best: Option<(i64, [i64; IRREPS], [i64; IRREPS])> = None;
        for w0 in &grid {
            for w1 in &grid {
                let delta: [i64; 4] = std::array::from_fn(|c| {
                    (0..IRREPS).map(|l| (w1[l] - w0[l]) * omega6[l][c]).sum()
                });
                if zero_classes.iter().any(|&c| delta[c] != 0) {
                    continue;
                }
                let objective = scored
                    .iter()
                    .map(|(_, classes)| {
                        classes
                            .iter()
                            .map(|&c| delta[c - 1].abs())
                            .max()
                            .unwrap_or(0)
                    })
                    .min()
                    .unwrap_or(0);
                if objective > 0 && best.map_or(true, |b| objective > b.0) {
                    best = Some((objective, *w0, *w1));
                }
            }
        }
        let Some((objective, w0, w1)) = best else {
            continue;
        };
        let to_weights = |w: [i64; IRREPS]| IrrepWeights(w.map(|v| Q::new(v, n)));
        let s0 = WernerState::from_weights(to_weights(w0), &table)?;
        let s1 = WernerState::from_weights(to_weights(w1), &table)?;
        let name = format!("designed[{spec}]");
        let pair = StatePair::new(&name, *s0.r(), *s1.r(), &table);
        let delta = pair.delta();
        let hiding_types: Vec<PartitionType> = spec.hiding.iter().cloned().collect();
        return Ok(DesignResult {
            spec: spec.to_string(),
            entry: CatalogEntry::from_pair(&pair, Some("designed")),
            weights0: s0.weights().0.iter().map(format_rational).collect(),
            weights1: s1.weights().0.iter().map(format_rational).collect(),
            constraint_residuals: margins_by_type(&delta, &hiding_types),
            revealing_margins: margins_by_type(&delta, &revealing),
            grid_denominator: n,
            min_dimension: pair.min_dimension(&table)?,
            objective: format_rational(&Q::new(objective, 6 * n)),
        });
    }
    Err(Error::Infeasible(format!(
        "no grid pair separates the revealing types of spec {{{spec}}}"
    )))
}

/// Steps of the mixing factor tried by [`design_pair_at`].
pub const MIXING_STEPS: i64 = 16;

/// [`design_pair`] followed by calibration for local dimension `d`.
///
/// Replacing `ρᵢ` by `(1−λ)(ρ₀+ρ₁)/2 + λρᵢ` scales `Δ`, and with it every
/// margin and every hiding bound, by `λ` while keeping the constraints exact.
/// The largest `λ = k/16` for which every partition of a hiding type is
/// classified hiding at `d` (default thresholds) is kept.
pub fn design_pair_at(spec: &HidingSpec, d: usize) -> Result<DesignResult> {
    let base = design_pair(spec)?;
    let table = vertex_table();
    let parse = |w: &[String]| -> Result<[Q; IRREPS]> {
        let v: Vec<Q> = w
            .iter()
            .map(|s| crate::rational::parse_rational(s))
            .collect::<Result<_>>()?;
        Ok(std::array::from_fn(|i| v[i]))
    };
    let (w0, w1) = (parse(&base.weights0)?, parse(&base.weights1)?);
    for k in (1..=MIXING_STEPS).rev() {
        let lambda = Q::new(k, MIXING_STEPS);
        let mix = |w: &[Q; IRREPS]| {
            IrrepWeights(std::array::from_fn(|i| {
                (Q::one() - lambda) * (w0[i] + w1[i]) / Q::from_integer(2) + lambda * w[i]
            }))
        };
        let s0 = WernerState::from_weights(mix(&w0), &table)?;
        let s1 = WernerState::from_weights(mix(&w1), &table)?;
        let name = format!("designed[{spec}]@d={d}");
        let pair = StatePair::new(&name, *s0.r(), *s1.r(), &table);
        let report = classify_pair(&pair, d, default_eps1(d), DEFAULT_EPS2)?;
        let all_hiding = report.rows.iter().all(|row| {
            let t: PartitionType = row.partition_type.parse().expect("valid type");
            !spec.hiding.contains(&t) || row.verdict == Verdict::Hiding
        });
        if !all_hiding {
            continue;
        }
        let delta = pair.delta();
        let hiding_types: Vec<PartitionType> = spec.hiding.iter().cloned().collect();
        return Ok(DesignResult {
            spec: spec.to_string(),
            entry: CatalogEntry::from_pair(&pair, Some("designed")),
            weights0: s0.weights().0.iter().map(format_rational).collect(),
            weights1: s1.weights().0.iter().map(format_rational).collect(),
            constraint_residuals: margins_by_type(&delta, &hiding_types),
            revealing_margins: margins_by_type(&delta, &spec.revealing_types()),
            grid_denominator: base.grid_denominator,
            min_dimension: pair.min_dimension(&table)?,
            objective: format_rational(
                &(crate::rational::parse_rational(&base.objective)? * lambda),
            ),
        });
    }
    Err(Error::Infeasible(format!(
        "no mixing of the design for {{{spec}}} is hiding at d = {d}"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionCheck {
    pub d: usize,
    /// Partitions whose type is hiding in the spec but whose verdict is not hiding.
    pub hiding_not_confirmed: Vec<String>,
    /// Partitions whose type is revealing in the spec and whose verdict is revealing.
    pub revealing_confirmed: Vec<String>,
    pub report: QualityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogVerification {
    pub pair: String,
    pub spec: String,
    pub delta: Vec<String>,
    pub constraints_hold: bool,
    pub constraint_residuals: BTreeMap<String, String>,
    pub revealing_margins: BTreeMap<String, String>,
    /// Revealing types whose adapted classes all have `Δ = 0`.
    pub over_hiding: Vec<String>,
    /// Every hiding-type partition has a bound strictly decreasing along `d_list`.
    pub bounds_decreasing: bool,
    pub dimensions: Vec<DimensionCheck>,
}

/// Checks the hiding constraints exactly on `Δ`, then classifies the pair at
/// each requested dimension.
pub fn verify_catalog(
    pair: &StatePair,
    spec: &HidingSpec,
    d_list: &[usize],
) -> Result<CatalogVerification> {
    let table = vertex_table();
    pair.states(&table)?;
    let delta = pair.delta();
    let hiding_types: Vec<PartitionType> = spec.hiding.iter().cloned().collect();
    let revealing = spec.revealing_types();
    let constraint_residuals = margins_by_type(&delta, &hiding_types);
    let constraints_hold = hiding_types
        .iter()
        .all(|t| revealing_margin(&delta, t).is_zero());
    let over_hiding = revealing
        .iter()
        .filter(|t| t.0.len() < SITES && revealing_margin(&delta, t).is_zero())
        .map(|t| t.to_string())
        .collect();

    let mut dimensions = Vec::new();
    for &d in d_list {
        let report = classify_pair(pair, d, default_eps1(d), DEFAULT_EPS2)?;
        let mut hiding_not_confirmed = Vec::new();
        let mut revealing_confirmed = Vec::new();
        for row in &report.rows {
            let t: PartitionType = row.partition_type.parse()?;
            if spec.hiding.contains(&t) {
                if row.verdict != Verdict::Hiding {
                    hiding_not_confirmed.push(row.partition.clone());
                }
            } else if row.verdict == Verdict::Revealing {
                revealing_confirmed.push(row.partition.clone());
            }
        }
        dimensions.push(DimensionCheck {
            d,
            hiding_not_confirmed,
            revealing_confirmed,
            report,
        });
    }
    let bounds_decreasing = dimensions.windows(2).all(|w| {
        w[0].report
            .rows
            .iter()
            .zip(&w[1].report.rows)
            .all(|(a, b)| {
                let t: PartitionType = a.partition_type.parse().expect("valid type");
                !spec.hiding.contains(&t) || b.hiding_bound < a.hiding_bound
            })
    });

    Ok(CatalogVerification {
        pair: pair.name.clone(),
        spec: spec.to_string(),
        delta: delta.to_strings(),
        constraints_hold,
        constraint_residuals,
        revealing_margins: margins_by_type(&delta, &revealing),
        over_hiding,
        bounds_decreasing,
        dimensions,
    })
}
