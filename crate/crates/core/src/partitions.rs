//! Set partitions of the sites, ordered by refinement.
//!
//! A partition encodes which sites may exchange quantum information: sites in
//! one block act as a single party. User-facing text is 1-based (`"12|34"`),
//! everything internal is 0-based.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symgroup::{Permutation, SymmetricGroup, MAX_SITES};

/// A set of sites stored as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteSubset(u32);

impl SiteSubset {
    pub const EMPTY: SiteSubset = SiteSubset(0);

    pub fn from_mask(mask: u32) -> Self {
        SiteSubset(mask)
    }

    pub fn from_sites(sites: &[usize]) -> Self {
        SiteSubset(sites.iter().fold(0, |m, &s| m | (1 << s)))
    }

    pub fn full(n: usize) -> Self {
        SiteSubset((1u32 << n) - 1)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, site: usize) -> bool {
        self.0 >> site & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: SiteSubset) -> SiteSubset {
        SiteSubset(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: SiteSubset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn complement(self, n: usize) -> SiteSubset {
        SiteSubset(!self.0 & SiteSubset::full(n).0)
    }

    pub fn min_site(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// Every subset of `{0, …, n−1}`, ordered by mask.
    pub fn all(n: usize) -> impl Iterator<Item = SiteSubset> {
        (0..1u32 << n).map(SiteSubset)
    }

    /// Canonical member of `{S, complement(S)}`: fewer sites, then smaller mask.
    pub fn complement_representative(self, n: usize) -> SiteSubset {
        let c = self.complement(n);
        if (c.len(), c.0) < (self.len(), self.0) {
            c
        } else {
            self
        }
    }
}

impl fmt::Display for SiteSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, s) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s + 1)?;
        }
        write!(f, "}}")
    }
}

/// Block sizes of a partition, sorted descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionType(pub Vec<usize>);

impl PartitionType {
    pub fn sites(&self) -> usize {
        self.0.iter().sum()
    }

    /// A representative partition: consecutive blocks `{1..a}`, `{a+1..}`, ….
    pub fn representative(&self) -> SitePartition {
        let mut next = 0;
        let blocks = self
            .0
            .iter()
            .map(|&size| {
                let block = SiteSubset::from_sites(&(next..next + size).collect::<Vec<_>>());
                next += size;
                block
            })
            .collect();
        SitePartition::new(self.sites(), blocks).expect("consecutive blocks form a partition")
    }

    /// Induced type order: some partition of type `self` refines some of type `other`.
    pub fn is_finer_or_equal(&self, other: &PartitionType) -> bool {
        let n = self.sites();
        if n != other.sites() {
            return false;
        }
        let all = enumerate_partitions(n).expect("validated size");
        let coarse: Vec<&SitePartition> = all
            .iter()
            .filter(|q| q.partition_type() == *other)
            .collect();
        all.iter()
            .filter(|p| p.partition_type() == *self)
            .any(|p| coarse.iter().any(|q| p.refines(q)))
    }

    /// All types of `n` sites.
    pub fn all(n: usize) -> Vec<PartitionType> {
        crate::symgroup::integer_partitions(n)
            .into_iter()
            .map(PartitionType)
            .collect()
    }
}

impl fmt::Display for PartitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for PartitionType {
    type Err = Error;

    /// Parses digit strings such as `"211"` or `"1111"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s
            .chars()
            .map(|c| c.to_digit(10).filter(|&v| v > 0).map(|v| v as usize))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Parse(format!("bad partition type {s:?}")))?;
        if parts.is_empty() {
            return Err(Error::Parse("empty partition type".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(PartitionType(parts))
    }
}

/// A set partition of `{0, …, n−1}` with blocks sorted by their minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SitePartition {
    n: usize,
    blocks: Vec<SiteSubset>,
}

impl SitePartition {
    pub fn new(n: usize, mut blocks: Vec<SiteSubset>) -> Result<Self> {
        if n == 0 || n > MAX_SITES {
            return Err(Error::UnsupportedSites(n));
        }
        let mut union = SiteSubset::EMPTY;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if union.mask() & b.mask() != 0 {
                return Err(Error::InvalidPartition("overlapping blocks".into()));
            }
            union = union.union(*b);
        }
        if union != SiteSubset::full(n) {
            return Err(Error::InvalidPartition(format!(
                "blocks do not cover {n} sites"
            )));
        }
        blocks.sort_by_key(|b| b.min_site());
        Ok(SitePartition { n, blocks })
    }

    pub fn discrete(n: usize) -> Self {
        SitePartition::new(n, (0..n).map(|i| SiteSubset::from_sites(&[i])).collect())
            .expect("singletons partition")
    }

    pub fn full(n: usize) -> Self {
        SitePartition::new(n, vec![SiteSubset::full(n)]).expect("single block")
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[SiteSubset] {
        &self.blocks
    }

    pub fn partition_type(&self) -> PartitionType {
        let mut t: Vec<usize> = self.blocks.iter().map(|b| b.len()).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        PartitionType(t)
    }

    /// Every block of `self` lies inside some block of `other`.
    pub fn refines(&self, other: &SitePartition) -> bool {
        self.n == other.n
            && self
                .blocks
                .iter()
                .all(|b| other.blocks.iter().any(|c| b.is_subset_of(*c)))
    }

    /// `p` maps every block into itself.
    pub fn is_adapted(&self, p: &Permutation) -> bool {
        p.len() == self.n
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|i| b.contains(p.apply(i))))
    }

    /// Element indices of `group` adapted to this partition (a subgroup).
    pub fn adapted_indices(&self, group: &SymmetricGroup) -> Vec<usize> {
        (0..group.order())
            .filter(|&i| self.is_adapted(group.element(i)))
            .collect()
    }

    /// All unions of blocks, empty and full set included, ordered by mask.
    pub fn compatible_subsets(&self) -> Vec<SiteSubset> {
        let k = self.blocks.len();
        let mut out: Vec<SiteSubset> = (0..1u32 << k)
            .map(|choice| {
                (0..k)
                    .filter(|&j| choice >> j & 1 == 1)
                    .fold(SiteSubset::EMPTY, |s, j| s.union(self.blocks[j]))
            })
            .collect();
        out.sort();
        out
    }

    /// One of `{S, complement(S)}` per compatible `S`, including `∅`.
    pub fn compatible_representatives(&self) -> Vec<SiteSubset> {
        let reps: BTreeSet<(usize, SiteSubset)> = self
            .compatible_subsets()
            .into_iter()
            .map(|s| {
                let r = s.complement_representative(self.n);
                (r.len(), r)
            })
            .collect();
        reps.into_iter().map(|(_, s)| s).collect()
    }

    /// Compatible representatives other than `∅` (and hence the full set).
    pub fn proper_compatible_representatives(&self) -> Vec<SiteSubset> {
        self.compatible_representatives()
            .into_iter()
            .filter(|s| !s.is_empty())
            .collect()
    }

    /// Parses the 1-based `"12|34"` syntax.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let blocks = text
            .trim()
            .split('|')
            .map(|block| {
                let sites = block
                    .trim()
                    .chars()
                    .map(|c| match c.to_digit(10) {
                        Some(v) if v >= 1 && (v as usize) <= n => Ok(v as usize - 1),
                        _ => Err(Error::Parse(format!(
                            "bad site {c:?} in partition {text:?}"
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let subset = SiteSubset::from_sites(&sites);
                if subset.len() != sites.len() {
                    return Err(Error::InvalidPartition(format!(
                        "repeated site in {text:?}"
                    )));
                }
                Ok(subset)
            })
            .collect::<Result<Vec<_>>>()?;
        SitePartition::new(n, blocks)
    }
}

impl fmt::Display for SitePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, "|")?;
            }
            for s in b.iter() {
                write!(f, "{}", s + 1)?;
            }
        }
        Ok(())
    }
}

/// All set partitions of `n` sites (Bell(n) of them), via restricted growth strings.
pub fn enumerate_partitions(n: usize) -> Result<Vec<SitePartition>> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::UnsupportedSites(n));
    }
    fn rec(i: usize, n: usize, labels: &mut Vec<usize>, max: usize, out: &mut Vec<SitePartition>) {
        if i == n {
            let k = max + 1;
            let blocks = (0..k)
                .map(|b| {
                    let sites: Vec<usize> = (0..n).filter(|&s| labels[s] == b).collect();
                    SiteSubset::from_sites(&sites)
                })
                .collect();
            out.push(SitePartition::new(n, blocks).expect("growth string is a partition"));
            return;
        }
        for b in 0..=max + 1 {
            labels.push(b);
            rec(i + 1, n, labels, max.max(b), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    let mut labels = vec![0];
    rec(1, n, &mut labels, 0, &mut out);
    Ok(out)
}

/// `types` is closed under passing to finer types.
pub fn down_closure_valid(types: &BTreeSet<PartitionType>) -> bool {
    let Some(n) = types.iter().next().map(PartitionType::sites) else {
        return true;
    };
    if types.iter().any(|t| t.sites() != n) {
        return false;
    }
    let all = PartitionType::all(n);
    types.iter().all(|t| {
        all.iter()
            .filter(|u| u.is_finer_or_equal(t))
            .all(|u| types.contains(u))
    })
}
