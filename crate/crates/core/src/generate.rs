//! Poset generators for exhaustive sweeps and seeded random testing.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::poset::{ElementSet, Poset, PropertyId};

/// Largest size accepted by [`posets_up_to_isomorphism`].
pub const MAX_ENUMERATED: usize = 8;

/// Element names `p0, p1, ..` (zero-padded past ten so they sort numerically).
pub fn element_names(n: usize) -> Vec<PropertyId> {
    (0..n)
        .map(|i| {
            let name = if n > 10 { format!("p{i:02}") } else { format!("p{i}") };
            PropertyId::new(name).expect("generated names are valid")
        })
        .collect()
}

/// Every naturally labelled poset on `n` elements (`i < j` in the order
/// implies `i < j` as integers), each given as the down-set of every element.
pub fn naturally_labeled(n: usize) -> Vec<Vec<ElementSet>> {
    let mut layer: Vec<Vec<ElementSet>> = vec![Vec::new()];
    for k in 0..n {
        let mut next = Vec::new();
        for below in &layer {
            for bits in 0..(1u64 << k) {
                let down = ElementSet::from_bits(bits);
                if down.iter().all(|i| below[i].is_subset(down)) {
                    let mut extended = below.clone();
                    extended.push(down);
                    next.push(extended);
                }
            }
        }
        layer = next;
    }
    layer
}

fn invariants(below: &[ElementSet]) -> Vec<[usize; 4]> {
    let n = below.len();
    let mut above = vec![ElementSet::EMPTY; n];
    for (i, d) in below.iter().enumerate() {
        for j in d.iter() {
            above[j] = above[j].with(i);
        }
    }
    let covers = |set: ElementSet, rows: &[ElementSet]| {
        let implied = set.iter().fold(ElementSet::EMPTY, |acc, j| acc | rows[j]);
        (set - implied).len()
    };
    (0..n)
        .map(|i| [below[i].len(), above[i].len(), covers(below[i], below), covers(above[i], &above)])
        .collect()
}

/// Canonical code of a poset given by down-sets, for `n <= 8`: the minimum
/// relation-matrix encoding over every relabelling that keeps elements sorted
/// by a vector of isomorphism invariants.
pub fn canonical_code(below: &[ElementSet]) -> u64 {
    let n = below.len();
    assert!(n <= MAX_ENUMERATED, "canonical codes need n <= {MAX_ENUMERATED}");
    let inv = invariants(below);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| inv[i]);
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || inv[order[i]] != inv[order[start]] {
            blocks.push((start, i));
            start = i;
        }
    }

    fn encode(below: &[ElementSet], perm: &[usize]) -> u64 {
        let n = perm.len();
        let mut code = 0u64;
        for a in 0..n {
            for b in 0..n {
                if below[perm[b]].contains(perm[a]) {
                    code |= 1 << (a * n + b);
                }
            }
        }
        code
    }

    fn search(
        below: &[ElementSet],
        perm: &mut Vec<usize>,
        blocks: &[(usize, usize)],
        block: usize,
        pos: usize,
        best: &mut u64,
    ) {
        if block == blocks.len() {
            *best = (*best).min(encode(below, perm));
            return;
        }
        let (start, end) = blocks[block];
        if pos == end {
            search(below, perm, blocks, block + 1, end.max(start), best);
            return;
        }
        for k in pos..end {
            perm.swap(pos, k);
            search(below, perm, blocks, block, pos + 1, best);
            perm.swap(pos, k);
        }
    }

    let mut best = u64::MAX;
    let first = blocks.first().map_or(0, |b| b.0);
    search(below, &mut order, &blocks, 0, first, &mut best);
    best
}

fn poset_from_down_sets(below: &[ElementSet]) -> Poset {
    let relations: Vec<(usize, usize)> = below
        .iter()
        .enumerate()
        .flat_map(|(i, d)| d.iter().map(move |j| (j, i)))
        .collect();
    Poset::from_indexed(element_names(below.len()), &relations).expect("generated order is acyclic")
}

/// One representative of every isomorphism class of posets on `n` elements
/// (`1 <= n <= 8`). Counts are 1, 2, 5, 16, 63, 318, 2045, 16999.
pub fn posets_up_to_isomorphism(n: usize) -> Vec<Poset> {
    assert!((1..=MAX_ENUMERATED).contains(&n), "enumeration supports 1..={MAX_ENUMERATED} elements");
    let mut seen = HashSet::new();
    naturally_labeled(n)
        .into_iter()
        .filter(|below| seen.insert(canonical_code(below)))
        .map(|below| poset_from_down_sets(&below))
        .collect()
}

/// Random poset: a random DAG over a shuffled labelling, each forward pair
/// related with probability `density`.
pub fn random_poset<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Poset {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let mut relations = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                relations.push((labels[a], labels[b]));
            }
        }
    }
    Poset::from_indexed(element_names(n), &relations).expect("forward edges are acyclic")
}

/// Random graded poset with `ranks` levels (`1 <= ranks <= n`): relations only
/// join consecutive levels and every element has a neighbour on each side.
pub fn random_graded_poset<R: Rng + ?Sized>(rng: &mut R, n: usize, ranks: usize, density: f64) -> Poset {
    assert!(ranks >= 1 && ranks <= n);
    let mut rank_of: Vec<usize> = (0..n).map(|i| if i < ranks { i } else { rng.gen_range(0..ranks) }).collect();
    rank_of.shuffle(rng);
    let level = |r: usize| -> Vec<usize> { (0..n).filter(|&i| rank_of[i] == r).collect() };
    let mut relations = Vec::new();
    for r in 1..ranks {
        let lower = level(r - 1);
        let upper = level(r);
        let mut has_upper = vec![false; n];
        for &u in &upper {
            let forced = *lower.choose(rng).expect("levels are non-empty");
            for &l in &lower {
                if l == forced || rng.gen_bool(density) {
                    relations.push((l, u));
                    has_upper[l] = true;
                }
            }
        }
        for &l in &lower {
            if !has_upper[l] {
                relations.push((l, *upper.choose(rng).expect("levels are non-empty")));
            }
        }
    }
    Poset::from_indexed(element_names(n), &relations).expect("level edges are acyclic")
}

/// Random poset that is consistently evaluable but not graded: a graded
/// poset with `shortcuts` extra relations spanning two or more levels.
/// Returns `None` if no such relation can be placed.
pub fn random_evaluable_ungraded<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    ranks: usize,
    shortcuts: usize,
) -> Option<Poset> {
    let base = random_graded_poset(rng, n, ranks, 0.2);
    let rank = base.ranks().expect("graded by construction");
    let mut relations = base.cover_pairs();
    let mut current = base;
    for _ in 0..shortcuts.max(1) {
        let candidates: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).map(move |c| (a, c)))
            .filter(|&(a, c)| rank[c] >= rank[a] + 2 && !current.comparable_idx(a, c))
            .collect();
        let &pick = candidates.choose(rng)?;
        relations.push(pick);
        current = current.with_relations(&relations).expect("shortcut keeps order acyclic");
    }
    Some(current)
}
