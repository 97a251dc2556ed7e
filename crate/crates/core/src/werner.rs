//! Permutation-symmetric four-party Werner states.
//!
//! Such a state is fixed by four expectations `(r₂, r₂₂, r₃, r₄)` of the
//! permutation operators `V_(12)`, `V_(12)(34)`, `V_(123)`, `V_(1234)`. The
//! state space is the simplex spanned by the five normalized isotypic
//! projectors, one per irrep `λ` of `S₄`, whose expectation vectors are
//! `ω_λ = χ_λ / dim λ`. An irrep with more rows than `d` has no support on
//! `(ℂ^d)^⊗4`, so its weight must vanish at that dimension.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, q, solve, Q};
use crate::symgroup::character_table;

pub const SITES: usize = 4;
pub const IRREPS: usize = 5;

/// Expectations of the four non-trivial class representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExpectationVector(pub [Q; 4]);

impl ExpectationVector {
    pub fn new(r2: Q, r22: Q, r3: Q, r4: Q) -> Self {
        ExpectationVector([r2, r22, r3, r4])
    }

    /// `scale · (a, b, c, e)` with integer entries.
    pub fn scaled(scale: Q, entries: [i64; 4]) -> Self {
        ExpectationVector(entries.map(|e| scale * Q::from_integer(e)))
    }

    pub fn r2(&self) -> Q {
        self.0[0]
    }
    pub fn r22(&self) -> Q {
        self.0[1]
    }
    pub fn r3(&self) -> Q {
        self.0[2]
    }
    pub fn r4(&self) -> Q {
        self.0[3]
    }

    /// Value on conjugacy class `class` (0 = identity, 1..=4 the components),
    /// with `identity_value` used for the identity class.
    pub fn on_class(&self, class: usize, identity_value: Q) -> Q {
        if class == 0 {
            identity_value
        } else {
            self.0[class - 1]
        }
    }

    pub fn sub(&self, other: &ExpectationVector) -> ExpectationVector {
        ExpectationVector(std::array::from_fn(|i| self.0[i] - other.0[i]))
    }

    pub fn within_unit_box(&self) -> bool {
        self.0.iter().all(|x| x.abs() <= Q::one())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }

    pub fn from_strings(items: &[String]) -> Result<Self> {
        if items.len() != 4 {
            return Err(Error::Parse(format!(
                "expected 4 rationals, got {}",
                items.len()
            )));
        }
        let v: Vec<Q> = items
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_>>()?;
        Ok(ExpectationVector([v[0], v[1], v[2], v[3]]))
    }
}

impl fmt::Display for ExpectationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

/// Vertex expectation vectors and row counts of the five irreps of `S₄`.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexTable {
    /// Young diagrams in the order `[4], [3,1], [2,2], [2,1,1], [1,1,1,1]`.
    pub irreps: Vec<Vec<usize>>,
    pub omega: Vec<ExpectationVector>,
    pub min_rows: Vec<usize>,
    pub dims: Vec<i64>,
    /// `chi[λ][class]` with classes ordered identity, `[2,1,1]`, `[2,2]`, `[3,1]`, `[4]`.
    pub chi: Vec<Vec<i64>>,
}

impl VertexTable {
    pub fn irrep_index(&self, shape: &[usize]) -> Option<usize> {
        self.irreps.iter().position(|s| s == shape)
    }
}

pub fn vertex_table() -> VertexTable {
    let table = character_table(SITES).expect("S4 is supported");
    let dims = table.dims();
    let omega = table
        .chi
        .iter()
        .zip(&dims)
        .map(|(row, &dim)| ExpectationVector(std::array::from_fn(|c| q(row[c + 1], dim))))
        .collect();
    VertexTable {
        min_rows: table.irreps.iter().map(Vec::len).collect(),
        irreps: table.irreps,
        omega,
        dims,
        chi: table.chi,
    }
}

/// Exact vertex weights, possibly negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IrrepWeights(pub [Q; IRREPS]);

impl IrrepWeights {
    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|w| !w.is_negative())
    }

    /// Nonnegative and zero on every irrep with more than `d` rows.
    pub fn valid_at(&self, d: usize, table: &VertexTable) -> bool {
        self.is_nonnegative()
            && self
                .0
                .iter()
                .zip(&table.min_rows)
                .all(|(w, &rows)| rows <= d || w.is_zero())
    }

    pub fn expectations(&self, table: &VertexTable) -> ExpectationVector {
        ExpectationVector(std::array::from_fn(|c| {
            self.0
                .iter()
                .zip(&table.omega)
                .map(|(w, om)| *w * om.0[c])
                .sum()
        }))
    }

    pub fn describe(&self, table: &VertexTable) -> String {
        self.0
            .iter()
            .zip(&table.irreps)
            .map(|(w, shape)| {
                let label: String = shape.iter().map(|s| s.to_string()).collect();
                format!("[{label}]:{}", format_rational(w))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Solves `Σ_λ w_λ = 1, Σ_λ w_λ ω_λ = r` exactly.
pub fn decompose(r: &ExpectationVector, table: &VertexTable) -> IrrepWeights {
    let mut a = vec![vec![Q::one(); IRREPS]];
    for c in 0..4 {
        a.push(table.omega.iter().map(|om| om.0[c]).collect());
    }
    let mut b = vec![Q::one()];
    b.extend(r.0);
    let w = solve(a, b).expect("vertex vectors are affinely independent");
    IrrepWeights(std::array::from_fn(|i| w[i]))
}

/// A valid (nonnegative-weight) symmetric Werner state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WernerState {
    r: ExpectationVector,
    weights: IrrepWeights,
}

impl WernerState {
    pub fn r(&self) -> &ExpectationVector {
        &self.r
    }

    pub fn weights(&self) -> &IrrepWeights {
        &self.weights
    }

    /// Pure isotypic state of irrep number `irrep`.
    pub fn vertex(irrep: usize, table: &VertexTable) -> Self {
        let mut w = [Q::zero(); IRREPS];
        w[irrep] = Q::one();
        WernerState {
            r: table.omega[irrep],
            weights: IrrepWeights(w),
        }
    }

    pub fn from_weights(weights: IrrepWeights, table: &VertexTable) -> Result<Self> {
        if !weights.is_nonnegative() || weights.0.iter().sum::<Q>() != Q::one() {
            return Err(Error::InfeasibleState {
                weights: weights.describe(table),
            });
        }
        Ok(WernerState {
            r: weights.expectations(table),
            weights,
        })
    }

    pub fn valid_at(&self, d: usize, table: &VertexTable) -> bool {
        self.weights.valid_at(d, table)
    }

    pub fn ensure_valid_at(&self, d: usize, table: &VertexTable) -> Result<()> {
        if self.valid_at(d, table) {
            Ok(())
        } else {
            Err(Error::InvalidAtDimension {
                d,
                min: min_dimension(self, table),
            })
        }
    }
}

pub fn weights_from_expectations(
    r: &ExpectationVector,
    table: &VertexTable,
) -> Result<WernerState> {
    let weights = decompose(r, table);
    if weights.is_nonnegative() {
        Ok(WernerState { r: *r, weights })
    } else {
        Err(Error::InfeasibleState {
            weights: weights.describe(table),
        })
    }
}

/// Smallest `d` on which every irrep carrying weight fits.
pub fn min_dimension(state: &WernerState, table: &VertexTable) -> usize {
    state
        .weights
        .0
        .iter()
        .zip(&table.min_rows)
        .filter(|(w, _)| w.is_positive())
        .map(|(_, &rows)| rows)
        .max()
        .unwrap_or(1)
}

/// One member of a pair as given; the weights may be negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairMember {
    pub r: ExpectationVector,
    pub weights: IrrepWeights,
}

impl PairMember {
    pub fn new(r: ExpectationVector, table: &VertexTable) -> Self {
        PairMember {
            r,
            weights: decompose(&r, table),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.weights.is_nonnegative()
    }

    pub fn state(&self, table: &VertexTable) -> Result<WernerState> {
        weights_from_expectations(&self.r, table)
    }
}

/// Two candidate preparations `ρ₀`, `ρ₁` hiding one bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatePair {
    pub name: String,
    pub rho0: PairMember,
    pub rho1: PairMember,
}

impl StatePair {
    pub fn new(
        name: &str,
        r0: ExpectationVector,
        r1: ExpectationVector,
        table: &VertexTable,
    ) -> Self {
        StatePair {
            name: name.to_string(),
            rho0: PairMember::new(r0, table),
            rho1: PairMember::new(r1, table),
        }
    }

    /// `r(ρ₁) − r(ρ₀)`.
    pub fn delta(&self) -> ExpectationVector {
        self.rho1.r.sub(&self.rho0.r)
    }

    pub fn is_valid(&self) -> bool {
        self.rho0.is_valid() && self.rho1.is_valid()
    }

    pub fn states(&self, table: &VertexTable) -> Result<(WernerState, WernerState)> {
        Ok((self.rho0.state(table)?, self.rho1.state(table)?))
    }

    /// Both states, checked for support on `(ℂ^d)^⊗4`.
    pub fn states_at(&self, d: usize, table: &VertexTable) -> Result<(WernerState, WernerState)> {
        let (s0, s1) = self.states(table)?;
        s0.ensure_valid_at(d, table)?;
        s1.ensure_valid_at(d, table)?;
        Ok((s0, s1))
    }

    pub fn min_dimension(&self, table: &VertexTable) -> Result<usize> {
        let (s0, s1) = self.states(table)?;
        Ok(min_dimension(&s0, table).max(min_dimension(&s1, table)))
    }
}

pub const CATALOG_NAMES: [&str; 5] = [
    "weakest",
    "single-pairs",
    "two-pairs",
    "triplets",
    "strongest",
];

/// The five example pairs, entered verbatim.
pub fn catalog_pairs() -> Vec<StatePair> {
    let table = vertex_table();
    let one = Q::one();
    let third = q(1, 3);
    let quarter = q(1, 4);
    let v = ExpectationVector::scaled;
    vec![
        StatePair::new(
            "weakest",
            v(one, [1, 1, 1, 1]),
            v(one, [-1, 1, 1, -1]),
            &table,
        ),
        StatePair::new(
            "single-pairs",
            v(third, [-1, -1, 0, 1]),
            v(third, [-1, 3, 0, -1]),
            &table,
        ),
        StatePair::new(
            "two-pairs",
            v(one, [0, 1, 1, 0]),
            ExpectationVector::new(Q::zero(), one, q(-1, 2), Q::zero()),
            &table,
        ),
        StatePair::new(
            "triplets",
            v(third, [3, 1, 0, 3]),
            v(third, [1, -1, 0, -1]),
            &table,
        ),
        StatePair::new(
            "strongest",
            v(quarter, [0, 0, 1, 2]),
            v(quarter, [0, 0, 1, -2]),
            &table,
        ),
    ]
}

pub fn catalog_pair(name: &str) -> Result<StatePair> {
    catalog_pairs()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPair(name.to_string()))
}

/// Catalog JSON record; rationals are `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub rho0: Vec<String>,
    pub rho1: Vec<String>,
    pub valid0: bool,
    pub valid1: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<String>,
}

impl CatalogEntry {
    pub fn from_pair(pair: &StatePair, provenance: Option<&str>) -> Self {
        CatalogEntry {
            name: pair.name.clone(),
            rho0: pair.rho0.r.to_strings(),
            rho1: pair.rho1.r.to_strings(),
            valid0: pair.rho0.is_valid(),
            valid1: pair.rho1.is_valid(),
            provenance: provenance.map(str::to_string),
        }
    }

    pub fn to_pair(&self) -> Result<StatePair> {
        let table = vertex_table();
        Ok(StatePair::new(
            &self.name,
            ExpectationVector::from_strings(&self.rho0)?,
            ExpectationVector::from_strings(&self.rho1)?,
            &table,
        ))
    }
}
