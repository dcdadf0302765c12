//! Finite posets of dimensional properties, stored as a transitive closure
//! plus the covering relation (Hasse diagram).
//!
//! Elements are kept sorted by name, so element indices, cover lists and every
//! enumeration come out in a deterministic order. Subsets of elements are
//! [`ElementSet`] bitmasks, which caps a poset at [`MAX_ELEMENTS`] elements.
//! The enumeration operations (chains, antichains) are exponential in the
//! worst case and meant for structures of roughly fifteen elements or fewer.

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported number of elements (one bit per element in [`ElementSet`]).
pub const MAX_ELEMENTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("invalid property id {0:?}: ids must be non-empty and contain no whitespace")]
    InvalidId(String),
    #[error("duplicate property `{0}`")]
    DuplicateElement(PropertyId),
    #[error("unknown property `{0}`")]
    UnknownElement(String),
    #[error("order relations form a cycle through `{0}`")]
    Cycle(PropertyId),
    #[error("a poset needs at least one element")]
    EmptyPoset,
    #[error("{0} elements exceed the supported maximum of {MAX_ELEMENTS}")]
    TooLarge(usize),
    #[error("poset is not graded: maximal chains have lengths {shortest} and {longest}")]
    NotGraded { shortest: usize, longest: usize },
}

/// Name of a dimensional property such as `safety` or `lawfulness`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PropertyId(String);

impl PropertyId {
    pub fn new(id: impl Into<String>) -> Result<Self, PosetError> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(PosetError::InvalidId(id));
        }
        Ok(PropertyId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for PropertyId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl FromStr for PropertyId {
    type Err = PosetError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropertyId::new(s)
    }
}

impl TryFrom<String> for PropertyId {
    type Error = PosetError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        PropertyId::new(s)
    }
}

impl From<PropertyId> for String {
    fn from(id: PropertyId) -> String {
        id.0
    }
}

impl AsRef<str> for PropertyId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A subset of a poset's elements, one bit per element index.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementSet(u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        ElementSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        ElementSet(1 << i)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        ElementSet(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        ElementSet(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ElementSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> ElementIter {
        ElementIter(self.0)
    }
}

impl BitOr for ElementSet {
    type Output = ElementSet;
    fn bitor(self, rhs: Self) -> Self {
        ElementSet(self.0 | rhs.0)
    }
}

impl BitAnd for ElementSet {
    type Output = ElementSet;
    fn bitand(self, rhs: Self) -> Self {
        ElementSet(self.0 & rhs.0)
    }
}

impl Sub for ElementSet {
    type Output = ElementSet;
    fn sub(self, rhs: Self) -> Self {
        ElementSet(self.0 & !rhs.0)
    }
}

impl Not for ElementSet {
    type Output = ElementSet;
    fn not(self) -> Self {
        ElementSet(!self.0)
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(ElementSet::EMPTY, ElementSet::with)
    }
}

impl IntoIterator for ElementSet {
    type Item = usize;
    type IntoIter = ElementIter;
    fn into_iter(self) -> ElementIter {
        self.iter()
    }
}

/// Ascending iterator over the indices in an [`ElementSet`].
#[derive(Debug, Clone)]
pub struct ElementIter(u64);

impl Iterator for ElementIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for ElementIter {}

/// A maximal chain, listed bottom to top.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Chain(pub Vec<PropertyId>);

impl Chain {
    /// Length counted in elements.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(PropertyId::as_str).collect();
        write!(f, "[{}]", names.join(" < "))
    }
}

/// An antichain, members sorted by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Antichain(pub Vec<PropertyId>);

impl Antichain {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(PropertyId::as_str).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// A finite, non-empty strict partial order.
///
/// Immutable once built. `above[i]` holds every `j` with `i < j` and
/// `upper_covers[i]` the `j` that cover `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    names: Vec<PropertyId>,
    index: BTreeMap<PropertyId, usize>,
    above: Vec<ElementSet>,
    below: Vec<ElementSet>,
    upper_covers: Vec<ElementSet>,
    lower_covers: Vec<ElementSet>,
}

impl Poset {
    /// Builds a poset from element names and any set of `(lower, upper)`
    /// relations. The relations are closed transitively and stored reduced.
    pub fn new<E, R, A, B>(elements: E, relations: R) -> Result<Self, PosetError>
    where
        E: IntoIterator,
        E::Item: AsRef<str>,
        R: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let names = elements
            .into_iter()
            .map(|e| PropertyId::new(e.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut index = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(PosetError::DuplicateElement(name.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| PosetError::UnknownElement(s.to_string()))
        };
        let edges = relations
            .into_iter()
            .map(|(a, b)| Ok((lookup(a.as_ref())?, lookup(b.as_ref())?)))
            .collect::<Result<Vec<_>, PosetError>>()?;
        Poset::from_indexed(names, &edges)
    }

    /// Builds from names and index-based `(lower, upper)` relations. Names
    /// need not be sorted; indices refer to positions in `names`.
    pub fn from_indexed(
        names: Vec<PropertyId>,
        relations: &[(usize, usize)],
    ) -> Result<Self, PosetError> {
        let n = names.len();
        if n == 0 {
            return Err(PosetError::EmptyPoset);
        }
        if n > MAX_ELEMENTS {
            return Err(PosetError::TooLarge(n));
        }
        // Sort names and remap the relation endpoints.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let mut new_pos = vec![0; n];
        for (pos, &old) in order.iter().enumerate() {
            new_pos[old] = pos;
        }
        let sorted: Vec<PropertyId> = order.iter().map(|&i| names[i].clone()).collect();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(PosetError::DuplicateElement(w[0].clone()));
            }
        }
        let mut above = vec![ElementSet::EMPTY; n];
        for &(lo, hi) in relations {
            if lo >= n || hi >= n {
                return Err(PosetError::UnknownElement(format!("#{}", lo.max(hi))));
            }
            above[new_pos[lo]] = above[new_pos[lo]].with(new_pos[hi]);
        }
        Poset::from_closure_rows(sorted, above)
    }

    /// `above[i]` lists direct or implied successors of element `i`; names
    /// must already be sorted and distinct.
    fn from_closure_rows(
        names: Vec<PropertyId>,
        mut above: Vec<ElementSet>,
    ) -> Result<Self, PosetError> {
        let n = names.len();
        // Warshall over bit rows.
        for k in 0..n {
            let row_k = above[k];
            for row in above.iter_mut() {
                if row.contains(k) {
                    *row = *row | row_k;
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| above[i].contains(i)) {
            return Err(PosetError::Cycle(names[i].clone()));
        }
        let mut below = vec![ElementSet::EMPTY; n];
        for (i, row) in above.iter().enumerate() {
            for j in row.iter() {
                below[j] = below[j].with(i);
            }
        }
        let upper_covers: Vec<ElementSet> = above
            .iter()
            .map(|&row| {
                let implied = row.iter().fold(ElementSet::EMPTY, |acc, j| acc | above[j]);
                row - implied
            })
            .collect();
        let mut lower_covers = vec![ElementSet::EMPTY; n];
        for (i, row) in upper_covers.iter().enumerate() {
            for j in row.iter() {
                lower_covers[j] = lower_covers[j].with(i);
            }
        }
        let index = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        Ok(Poset { names, index, above, below, upper_covers, lower_covers })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Always false: empty posets are rejected at construction.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[PropertyId] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &PropertyId {
        &self.names[i]
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn index_of(&self, id: &str) -> Result<usize, PosetError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| PosetError::UnknownElement(id.to_string()))
    }

    pub fn all(&self) -> ElementSet {
        ElementSet::full(self.len())
    }

    /// Converts property names to an [`ElementSet`].
    pub fn set_of<I>(&self, ids: I) -> Result<ElementSet, PosetError>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        ids.into_iter()
            .try_fold(ElementSet::EMPTY, |acc, id| Ok(acc.with(self.index_of(id.as_ref())?)))
    }

    pub fn names_of(&self, set: ElementSet) -> Vec<PropertyId> {
        set.iter().map(|i| self.names[i].clone()).collect()
    }

    /// `{a,b}` rendering of a subset, `{}` for the empty set.
    pub fn format_set(&self, set: ElementSet) -> String {
        let names: Vec<&str> = set.iter().map(|i| self.names[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Reflexive order test `a <= b` by name.
    pub fn leq(&self, a: &str, b: &str) -> Result<bool, PosetError> {
        let (a, b) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.leq_idx(a, b))
    }

    /// Strict order test `a < b` by name.
    pub fn lt(&self, a: &str, b: &str) -> Result<bool, PosetError> {
        let (a, b) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.lt_idx(a, b))
    }

    pub fn leq_idx(&self, a: usize, b: usize) -> bool {
        a == b || self.above[a].contains(b)
    }

    pub fn lt_idx(&self, a: usize, b: usize) -> bool {
        self.above[a].contains(b)
    }

    pub fn comparable_idx(&self, a: usize, b: usize) -> bool {
        a == b || self.above[a].contains(b) || self.below[a].contains(b)
    }

    pub fn above(&self, i: usize) -> ElementSet {
        self.above[i]
    }

    pub fn below(&self, i: usize) -> ElementSet {
        self.below[i]
    }

    pub fn upper_covers(&self, i: usize) -> ElementSet {
        self.upper_covers[i]
    }

    pub fn lower_covers(&self, i: usize) -> ElementSet {
        self.lower_covers[i]
    }

    /// Elements incomparable to `i` (excluding `i`).
    pub fn incomparable(&self, i: usize) -> ElementSet {
        self.all() - self.above[i] - self.below[i] - ElementSet::singleton(i)
    }

    pub fn minimal(&self) -> ElementSet {
        (0..self.len()).filter(|&i| self.below[i].is_empty()).collect()
    }

    pub fn maximal(&self) -> ElementSet {
        (0..self.len()).filter(|&i| self.above[i].is_empty()).collect()
    }

    /// Cover pairs `(lower, upper)` by index, sorted.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| self.upper_covers[i].iter().map(move |j| (i, j)))
            .collect()
    }

    /// Cover pairs `(lower, upper)` by name, sorted.
    pub fn covers(&self) -> Vec<(PropertyId, PropertyId)> {
        self.cover_pairs()
            .into_iter()
            .map(|(i, j)| (self.names[i].clone(), self.names[j].clone()))
            .collect()
    }

    /// Every `(lower, upper)` pair of the strict order, by index.
    pub fn relation_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| self.above[i].iter().map(move |j| (i, j)))
            .collect()
    }

    pub fn is_chain(&self, set: ElementSet) -> bool {
        set.iter().all(|i| (set - self.above[i] - self.below[i]).len() == 1)
    }

    pub fn is_antichain(&self, set: ElementSet) -> bool {
        set.iter().all(|i| (self.above[i] & set).is_empty())
    }

    /// Element indices in a linear extension (bottom first).
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.below[i].len(), i));
        order
    }

    /// Number of elements strictly below `i` on a longest chain ending at `i`.
    pub fn heights(&self) -> Vec<usize> {
        let mut height = vec![0; self.len()];
        for i in self.linear_extension() {
            height[i] = self.lower_covers[i].iter().map(|j| height[j] + 1).max().unwrap_or(0);
        }
        height
    }

    /// Number of elements strictly above `i` on a longest chain starting at `i`.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.len()];
        for i in self.linear_extension().into_iter().rev() {
            depth[i] = self.upper_covers[i].iter().map(|j| depth[j] + 1).max().unwrap_or(0);
        }
        depth
    }

    /// Length of a longest chain, in elements.
    pub fn height(&self) -> usize {
        self.heights().into_iter().max().unwrap_or(0) + 1
    }

    /// Every distinct maximal-chain length, ascending. Computed by dynamic
    /// programming over the covering relation, without enumerating chains.
    pub fn maximal_chain_lengths(&self) -> Vec<usize> {
        // bit k set in reach[i]: some cover path from a minimal element to i
        // has k elements.
        let mut reach = vec![0u128; self.len()];
        for i in self.linear_extension() {
            reach[i] = if self.lower_covers[i].is_empty() {
                1 << 1
            } else {
                self.lower_covers[i].iter().fold(0, |acc, j| acc | reach[j] << 1)
            };
        }
        let all = self.maximal().iter().fold(0u128, |acc, i| acc | reach[i]);
        (1..=MAX_ELEMENTS).filter(|&k| all >> k & 1 == 1).collect()
    }

    /// Graded in the sense that every maximal chain has the same length.
    pub fn is_graded(&self) -> bool {
        self.maximal_chain_lengths().len() == 1
    }

    /// Ranks by index; minimal elements get 0 and covers step by exactly 1.
    pub fn ranks(&self) -> Result<Vec<usize>, PosetError> {
        let lengths = self.maximal_chain_lengths();
        if lengths.len() != 1 {
            return Err(PosetError::NotGraded {
                shortest: lengths[0],
                longest: *lengths.last().expect("non-empty poset has a chain"),
            });
        }
        Ok(self.heights())
    }

    /// Rank function by name. Fails with [`PosetError::NotGraded`] unless all
    /// maximal chains share one length.
    pub fn rank_function(&self) -> Result<BTreeMap<PropertyId, usize>, PosetError> {
        let ranks = self.ranks()?;
        Ok(self.names.iter().cloned().zip(ranks).collect())
    }

    /// All maximal chains by index, bottom to top, in lexicographic order.
    pub fn maximal_chains_idx(&self) -> Vec<Vec<usize>> {
        fn extend(p: &Poset, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let top = *path.last().expect("path starts non-empty");
            let next = p.upper_covers[top];
            if next.is_empty() {
                out.push(path.clone());
                return;
            }
            for j in next {
                path.push(j);
                extend(p, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        for start in self.minimal() {
            extend(self, &mut vec![start], &mut out);
        }
        out
    }

    pub fn maximal_chains(&self) -> Vec<Chain> {
        let mut chains: Vec<Chain> = self
            .maximal_chains_idx()
            .into_iter()
            .map(|c| Chain(c.into_iter().map(|i| self.names[i].clone()).collect()))
            .collect();
        chains.sort();
        chains
    }

    /// All maximal antichains as bitmasks, ascending by mask.
    ///
    /// Bron-Kerbosch with pivoting on the incomparability graph: maximal
    /// antichains are exactly its maximal cliques.
    pub fn maximal_antichains_idx(&self) -> Vec<ElementSet> {
        fn bron_kerbosch(
            p: &Poset,
            r: ElementSet,
            mut candidates: ElementSet,
            mut excluded: ElementSet,
            out: &mut Vec<ElementSet>,
        ) {
            if candidates.is_empty() && excluded.is_empty() {
                out.push(r);
                return;
            }
            let pivot = (candidates | excluded)
                .iter()
                .max_by_key(|&u| (p.incomparable(u) & candidates).len())
                .expect("non-empty");
            for v in candidates - p.incomparable(pivot) {
                let nbrs = p.incomparable(v);
                bron_kerbosch(p, r.with(v), candidates & nbrs, excluded & nbrs, out);
                candidates = candidates.without(v);
                excluded = excluded.with(v);
            }
        }
        let mut out = Vec::new();
        bron_kerbosch(self, ElementSet::EMPTY, self.all(), ElementSet::EMPTY, &mut out);
        out.sort();
        out
    }

    pub fn maximal_antichains(&self) -> Vec<Antichain> {
        let mut out: Vec<Antichain> = self
            .maximal_antichains_idx()
            .into_iter()
            .map(|s| Antichain(self.names_of(s)))
            .collect();
        out.sort();
        out
    }

    /// A new poset on the same elements with `(lower, upper)` index relations
    /// replacing the current order.
    pub fn with_relations(&self, relations: &[(usize, usize)]) -> Result<Poset, PosetError> {
        Poset::from_indexed(self.names.clone(), relations)
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers()
            .iter()
            .map(|(a, b)| format!("{a}<{b}"))
            .collect();
        write!(f, "{{{}}} covers [{}]", self.names.iter().map(|n| n.as_str()).collect::<Vec<_>>().join(","), covers.join(", "))
    }
}
