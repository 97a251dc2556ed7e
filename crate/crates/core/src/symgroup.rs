//! Exact combinatorics of small symmetric groups.
//!
//! Permutations act on site indices `0..n`. Composition is right-to-left:
//! `p.compose(&q)` applies `q` first, so `(p∘q)(i) = p(q(i))`. Characters
//! are exact integers obtained from permutation characters of Young
//! subgroups and the (unitriangular) Kostka matrix.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::partitions::SiteSubset;

/// Largest number of sites supported by the brute-force machinery.
pub const MAX_SITES: usize = 5;

/// A bijection of `{0, …, n−1}`; `images[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 0-based disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= n || touched[a] {
                    return Err(Error::InvalidPermutation(format!("bad cycle {cycle:?}")));
                }
                touched[a] = true;
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation::new(images)
    }

    /// Transposition of two 0-based sites.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        Permutation::from_cycles(n, &[&[a, b]])
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// Disjoint cycles including fixed points, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut j = self.images[start];
            while j != start {
                seen[j] = true;
                cycle.push(j);
                j = self.images[j];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Cycle lengths sorted descending (an integer partition of `n`).
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// Number of points of `subset` mapped outside `subset`.
    pub fn escape_count(&self, subset: SiteSubset) -> usize {
        subset
            .iter()
            .filter(|&i| !subset.contains(self.images[i]))
            .count()
    }

    pub fn sign(&self) -> i64 {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Parses 1-based cycle notation such as `(12)(34)`, `(1,2,3)` or `e`.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "e" || text == "()" || text.is_empty() {
            return Ok(Permutation::identity(n));
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut current: Option<Vec<usize>> = None;
        let bad = || Error::Parse(format!("bad cycle notation {text:?}"));
        for ch in text.chars() {
            match ch {
                '(' => {
                    if current.is_some() {
                        return Err(bad());
                    }
                    current = Some(Vec::new());
                }
                ')' => cycles.push(current.take().ok_or_else(bad)?),
                ',' | ' ' => {}
                c => {
                    let digit = c.to_digit(10).ok_or_else(bad)? as usize;
                    if digit == 0 {
                        return Err(bad());
                    }
                    current.as_mut().ok_or_else(bad)?.push(digit - 1);
                }
            }
        }
        if current.is_some() {
            return Err(bad());
        }
        let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
        Permutation::from_cycles(n, &refs)
    }
}

impl fmt::Display for Permutation {
    /// 1-based cycle notation without fixed points; the identity prints as `e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<Vec<usize>> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "e");
        }
        for c in cycles {
            write!(f, "(")?;
            for i in c {
                write!(f, "{}", i + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// All permutations of `n` points in lexicographic order of their image lists.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(Permutation {
                images: prefix.clone(),
            });
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Integer partitions of `n`, each sorted descending, listed in decreasing
/// lexicographic order (`[n]` first, `[1,…,1]` last).
pub fn integer_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=remaining.min(max)).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub cycle_type: Vec<usize>,
    pub members: Vec<Permutation>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Conjugacy classes of `S_n`, ordered from the identity class `[1,…,1]` up to `[n]`.
pub fn conjugacy_classes(n: usize) -> Vec<ConjugacyClass> {
    let mut types = integer_partitions(n);
    types.reverse();
    let perms = all_permutations(n);
    types
        .into_iter()
        .map(|t| ConjugacyClass {
            members: perms
                .iter()
                .filter(|p| p.cycle_type() == t)
                .cloned()
                .collect(),
            cycle_type: t,
        })
        .collect()
}

/// The symmetric group with a fixed element order and precomputed lookups.
#[derive(Clone, Debug)]
pub struct SymmetricGroup {
    n: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    inverses: Vec<usize>,
    cycle_counts: Vec<usize>,
    class_of: Vec<usize>,
    classes: Vec<ConjugacyClass>,
}

impl SymmetricGroup {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SITES {
            return Err(Error::UnsupportedSites(n));
        }
        let elements = all_permutations(n);
        let index: HashMap<Permutation, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let inverses = elements.iter().map(|p| index[&p.inverse()]).collect();
        let cycle_counts = elements.iter().map(Permutation::cycle_count).collect();
        let classes = conjugacy_classes(n);
        let class_of = elements
            .iter()
            .map(|p| {
                let t = p.cycle_type();
                classes
                    .iter()
                    .position(|c| c.cycle_type == t)
                    .expect("every type has a class")
            })
            .collect();
        Ok(SymmetricGroup {
            n,
            elements,
            index,
            inverses,
            cycle_counts,
            class_of,
            classes,
        })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn identity_index(&self) -> usize {
        0
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverses[i]
    }

    pub fn cycle_count(&self, i: usize) -> usize {
        self.cycle_counts[i]
    }

    /// Index into [`SymmetricGroup::classes`] of element `i`.
    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    /// Index of `elements[i] ∘ elements[j]`.
    pub fn product(&self, i: usize, j: usize) -> usize {
        let p = self.elements[i]
            .compose(&self.elements[j])
            .expect("same size");
        self.index[&p]
    }

    /// Closure of a generating set; returns sorted element indices.
    pub fn generated_subgroup(&self, generators: &[usize]) -> Vec<usize> {
        let mut members = vec![false; self.order()];
        members[0] = true;
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in generators {
                let y = self.product(g, x);
                if !members[y] {
                    members[y] = true;
                    frontier.push(y);
                }
            }
        }
        (0..self.order()).filter(|&i| members[i]).collect()
    }
}

/// Character table of `S_n` with exact integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTable {
    pub n: usize,
    /// Young diagrams, `[n]` (trivial) first and `[1,…,1]` (sign) last.
    pub irreps: Vec<Vec<usize>>,
    pub classes: Vec<ConjugacyClass>,
    /// `chi[λ][c]`: character of irrep `λ` on class `c`.
    pub chi: Vec<Vec<i64>>,
}

impl CharacterTable {
    pub fn dims(&self) -> Vec<i64> {
        self.chi.iter().map(|row| row[0]).collect()
    }

    pub fn irrep_index(&self, shape: &[usize]) -> Option<usize> {
        self.irreps.iter().position(|s| s == shape)
    }

    pub fn class_index(&self, cycle_type: &[usize]) -> Option<usize> {
        self.classes.iter().position(|c| c.cycle_type == cycle_type)
    }
}

/// Number of ordered set partitions of `0..n` with block sizes `shape`
/// that are left invariant (blockwise) by `p`.
fn fixed_tabloids(p: &Permutation, shape: &[usize]) -> i64 {
    let n = p.len();
    let k = shape.len();
    let mut labels = vec![0usize; n];
    let mut count = 0;
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = c % k;
            c /= k;
        }
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        if sizes != shape {
            continue;
        }
        if (0..n).all(|i| labels[p.apply(i)] == labels[i]) {
            count += 1;
        }
    }
    count
}

/// Number of semistandard Young tableaux of `shape` with content `content`.
fn kostka(shape: &[usize], content: &[usize]) -> i64 {
    let n: usize = shape.iter().sum();
    let k = content.len();
    let cells: Vec<(usize, usize)> = shape
        .iter()
        .enumerate()
        .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
        .collect();
    let mut fill = vec![0usize; n];
    let mut count = 0;
    for code in 0..k.pow(n as u32) {
        let mut c = code;
        for v in fill.iter_mut() {
            *v = c % k;
            c /= k;
        }
        let mut used = vec![0usize; k];
        for &v in &fill {
            used[v] += 1;
        }
        if used != content {
            continue;
        }
        let at = |r: usize, c: usize| -> Option<usize> {
            cells.iter().position(|&x| x == (r, c)).map(|i| fill[i])
        };
        let ok = cells.iter().enumerate().all(|(i, &(r, c))| {
            let v = fill[i];
            let row_ok = c == 0 || at(r, c - 1).is_some_and(|left| left <= v);
            let col_ok = r == 0 || at(r - 1, c).is_some_and(|up| up < v);
            row_ok && col_ok
        });
        if ok {
            count += 1;
        }
    }
    count
}

/// Exact character table of `S_n` for `n ≤ 5`.
///
/// Permutation characters of Young subgroups satisfy `π_μ = Σ_λ K_{λμ} χ_λ`
/// with `K` unitriangular in dominance order, so the irreducible characters
/// follow by integer back substitution.
pub fn character_table(n: usize) -> Result<CharacterTable> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::UnsupportedSites(n));
    }
    let shapes = integer_partitions(n);
    let classes = conjugacy_classes(n);
    let reps: Vec<&Permutation> = classes.iter().map(|c| &c.members[0]).collect();
    let m = shapes.len();
    let perm_chars: Vec<Vec<i64>> = shapes
        .iter()
        .map(|mu| reps.iter().map(|p| fixed_tabloids(p, mu)).collect())
        .collect();
    let k: Vec<Vec<i64>> = shapes
        .iter()
        .map(|lam| shapes.iter().map(|mu| kostka(lam, mu)).collect())
        .collect();
    // π_μ = χ_μ + Σ_{λ before μ} K_{λμ} χ_λ, shapes in decreasing lexicographic order.
    let mut chi: Vec<Vec<i64>> = Vec::with_capacity(m);
    for mu in 0..m {
        debug_assert_eq!(k[mu][mu], 1);
        let row: Vec<i64> = (0..classes.len())
            .map(|c| perm_chars[mu][c] - (0..mu).map(|lam| k[lam][mu] * chi[lam][c]).sum::<i64>())
            .collect();
        chi.push(row);
    }
    Ok(CharacterTable {
        n,
        irreps: shapes,
        classes,
        chi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> Permutation {
        Permutation::parse_cycles(4, text).unwrap()
    }

    #[test]
    fn compose_matches_hand_computation() {
        assert_eq!(p("(12)").compose(&p("(23)")).unwrap(), p("(123)"));
        let q = p("(1342)");
        assert_eq!(Permutation::identity(4).compose(&q).unwrap(), q);
        assert!(q.compose(&q.inverse()).unwrap().is_identity());
        assert!(matches!(
            q.compose(&Permutation::identity(3)),
            Err(Error::SizeMismatch { left: 4, right: 3 })
        ));
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(Permutation::identity(4).cycle_count(), 4);
        assert_eq!(p("(12)(34)").cycle_count(), 2);
        assert_eq!(p("(1234)").cycle_count(), 1);
    }

    #[test]
    fn escape_counts() {
        let s = SiteSubset::from_sites(&[0, 1]);
        assert_eq!(p("(23)").escape_count(s), 1);
        assert_eq!(p("(12)").escape_count(s), 0);
        assert_eq!(p("(13)(24)").escape_count(s), 2);
    }

    #[test]
    fn display_round_trip() {
        for q in all_permutations(4) {
            assert_eq!(Permutation::parse_cycles(4, &q.to_string()).unwrap(), q);
        }
        assert_eq!(Permutation::identity(4).to_string(), "e");
        assert!(Permutation::parse_cycles(4, "(15)").is_err());
        assert!(Permutation::parse_cycles(4, "(12").is_err());
    }

    #[test]
    fn class_sizes_s4() {
        let classes = conjugacy_classes(4);
        let sizes: Vec<usize> = classes.iter().map(ConjugacyClass::size).collect();
        assert_eq!(sizes, vec![1, 6, 3, 8, 6]);
        assert_eq!(classes[2].cycle_type, vec![2, 2]);
        for n in 1..=5 {
            let total: usize = conjugacy_classes(n).iter().map(ConjugacyClass::size).sum();
            assert_eq!(total, (1..=n).product::<usize>());
        }
    }

    #[test]
    fn s4_character_values() {
        let t = character_table(4).unwrap();
        let triv = t.irrep_index(&[4]).unwrap();
        let sign = t.irrep_index(&[1, 1, 1, 1]).unwrap();
        let twotwo = t.irrep_index(&[2, 2]).unwrap();
        assert!(t.chi[triv].iter().all(|&x| x == 1));
        assert_eq!(t.chi[sign][t.class_index(&[2, 1, 1]).unwrap()], -1);
        assert_eq!(t.chi[twotwo][t.class_index(&[3, 1]).unwrap()], -1);
        assert_eq!(t.dims(), vec![1, 3, 2, 3, 1]);
    }

    #[test]
    fn sign_character_is_parity() {
        for n in 1..=5 {
            let t = character_table(n).unwrap();
            let sign = t.irreps.len() - 1;
            for (c, class) in t.classes.iter().enumerate() {
                assert_eq!(t.chi[sign][c], class.members[0].sign());
            }
        }
    }

    #[test]
    fn rejects_large_n() {
        assert!(matches!(
            character_table(6),
            Err(Error::UnsupportedSites(6))
        ));
        assert!(SymmetricGroup::new(0).is_err());
    }

    #[test]
    fn group_lookup_tables() {
        let g = SymmetricGroup::new(4).unwrap();
        assert_eq!(g.order(), 24);
        assert!(g.element(g.identity_index()).is_identity());
        for i in 0..24 {
            assert_eq!(g.product(i, g.inverse_index(i)), 0);
            assert_eq!(g.cycle_count(i), g.element(i).cycle_count());
        }
        let v4 = g.generated_subgroup(&[
            g.index_of(&p("(12)(34)")).unwrap(),
            g.index_of(&p("(13)(24)")).unwrap(),
        ]);
        assert_eq!(v4.len(), 4);
    }
}
