//! Overlap partitions, maximin information, and the zero-error capacity
//! bound.
//!
//! Two source symbols are overlap connected when a finite chain of
//! pairwise-intersecting conditional ranges joins them. The connected
//! components form the unique overlap partition of the marginal range;
//! its log-cardinality is the maximin information `I*`, the most an
//! adversary limited to a single guess can learn. The partition is
//! computed with a union-find pass over the conditional ranges, which is
//! equivalent to the chain definition by graph connectivity.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::measures::{
    ceiling_dominates, identifiability_bound, min_epsilon, BoundValue, MinEpsilon,
};
use crate::uv::{AttributeMap, Channel, Relation, Symbol};
use crate::value::LeakageValue;

/// A partition of a symbol set into non-empty, disjoint, covering blocks,
/// kept in canonical order: blocks sorted by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    ground: BTreeSet<Symbol>,
    blocks: Vec<BTreeSet<Symbol>>,
}

impl Partition {
    pub fn new(ground: BTreeSet<Symbol>, mut blocks: Vec<BTreeSet<Symbol>>) -> Result<Self> {
        if ground.is_empty() {
            return Err(Error::input("partition ground set must be non-empty"));
        }
        let mut seen: BTreeSet<&Symbol> = BTreeSet::new();
        let mut total = 0usize;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::input("partition blocks must be non-empty"));
            }
            for s in b {
                if !ground.contains(s) {
                    return Err(Error::input(format!(
                        "block symbol {s} is outside the ground set"
                    )));
                }
                if !seen.insert(s) {
                    return Err(Error::input(format!("symbol {s} appears in two blocks")));
                }
                total += 1;
            }
        }
        if total != ground.len() {
            return Err(Error::input("partition blocks do not cover the ground set"));
        }
        blocks.sort_by(|a, b| a.first().cmp(&b.first()));
        Ok(Partition { ground, blocks })
    }

    pub fn ground(&self) -> &BTreeSet<Symbol> {
        &self.ground
    }

    pub fn blocks(&self) -> &[BTreeSet<Symbol>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `s`, in canonical block order.
    pub fn block_of(&self, s: &Symbol) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(s))
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// The unique overlap partition of `[[x]]` under observations of `y`:
/// connected components of the graph whose edges join conditional ranges
/// that intersect.
pub fn overlap_partition(rel: &Relation, x: &str, y: &str) -> Result<Partition> {
    if x == y {
        return Err(Error::input(
            "overlap partition needs two distinct variables",
        ));
    }
    let ground = rel.marginal_set(x)?;
    let index: BTreeMap<&Symbol, usize> = ground.iter().zip(0..).collect();
    let mut uf = UnionFind::new(ground.len());
    for yv in rel.marginal_set(y)? {
        let members = rel.conditional_set(x, y, &yv)?;
        let mut it = members.iter();
        let first = index[it.next().expect("conditional ranges are non-empty")];
        for s in it {
            uf.union(first, index[s]);
        }
    }
    let mut by_root: BTreeMap<usize, BTreeSet<Symbol>> = BTreeMap::new();
    for (s, &i) in &index {
        by_root.entry(uf.find(i)).or_default().insert((*s).clone());
    }
    Partition::new(ground, by_root.into_values().collect())
}

/// Maximin information `I* = log2(|overlap partition|)`.
pub fn maximin_info(rel: &Relation, x: &str, y: &str) -> Result<LeakageValue> {
    LeakageValue::from_count(overlap_partition(rel, x, y)?.block_count())
}

/// Labels each source symbol with its overlap-partition block index. The
/// induced variable is the common part of `x` and `y`: it is a function
/// of either one, every conditional range of it is a singleton, and its
/// entropy equals the maximin information.
pub fn common_variable(rel: &Relation, x: &str, y: &str) -> Result<AttributeMap> {
    let partition = overlap_partition(rel, x, y)?;
    let map = partition
        .ground()
        .iter()
        .map(|s| {
            let b = partition
                .block_of(s)
                .expect("partition covers the ground set");
            (s.clone(), Symbol::new(format!("b{b}")).unwrap())
        })
        .collect();
    AttributeMap::new(map)
}

/// Recomputes the overlap partition in both directions and compares the
/// block counts. Always true; exercised as a regression property.
pub fn maximin_symmetry_check(rel: &Relation, x: &str, y: &str) -> Result<bool> {
    Ok(overlap_partition(rel, x, y)?.block_count() == overlap_partition(rel, y, x)?.block_count())
}

/// The supremum of guessing leakage over attributes whose every
/// conditional range is a singleton (one-shot attributes). Equals the
/// maximin information; the oracle module re-derives the supremum by
/// exhaustive partition search.
pub fn one_shot_supremum(rel: &Relation, x: &str, y: &str) -> Result<LeakageValue> {
    maximin_info(rel, x, y)
}

/// Default cap on the subset search of [`zero_error_capacity_bound`].
pub const DEFAULT_ALPHABET_CAP: usize = 16;

/// Result of the zero-error capacity subset search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityBound {
    /// `sup over non-empty S of I*` for the channel restricted to S.
    pub value: LeakageValue,
    /// A maximizing subset: smallest cardinality first, then
    /// lexicographically smallest.
    pub witness: BTreeSet<Symbol>,
    /// `sup over non-empty S of L*` on the same restrictions.
    pub sup_maximal_leakage: LeakageValue,
    /// `value <= sup_maximal_leakage`; holds on every channel.
    pub leakage_dominates: bool,
    /// Tightest budget for which the full channel is identifiable.
    pub min_epsilon: MinEpsilon,
    /// The identifiability ceiling at that budget, over the declared
    /// alphabet size (zero when the budget infimum is open).
    pub ceiling: BoundValue,
    /// `value <= ceiling`.
    pub ceiling_holds: bool,
}

/// Supremum of maximin information over all non-empty sub-alphabets of a
/// channel: a single-letter zero-error capacity bound. Exhaustive over
/// `2^|alphabet| - 1` subsets, so the alphabet is capped.
pub fn zero_error_capacity_bound(
    alphabet: &BTreeSet<Symbol>,
    channel: &Channel,
    cap: usize,
) -> Result<CapacityBound> {
    if alphabet.is_empty() {
        return Err(Error::input("capacity search needs a non-empty alphabet"));
    }
    if alphabet.len() > cap {
        return Err(Error::SearchCap {
            what: "capacity subset search alphabet",
            size: alphabet.len(),
            cap,
        });
    }
    if alphabet.len() > 64 {
        return Err(Error::input("capacity search supports at most 64 symbols"));
    }
    let sources: Vec<&Symbol> = alphabet.iter().collect();
    for s in &sources {
        channel.image(s)?;
    }

    // per-target bitmask of sources that can emit it
    let targets: BTreeSet<&Symbol> = sources
        .iter()
        .flat_map(|s| channel.image(s).unwrap().iter())
        .collect();
    let mut target_masks: Vec<u64> = Vec::with_capacity(targets.len());
    for t in targets {
        let mut mask = 0u64;
        for (i, s) in sources.iter().enumerate() {
            if channel.image(s).unwrap().contains(t) {
                mask |= 1 << i;
            }
        }
        target_masks.push(mask);
    }

    let n = sources.len();
    let mut best: Option<(usize, u64)> = None; // (components, subset mask)
    let mut sup_lstar: (usize, u64) = (1, 1); // (|S| - min + 1, witness mask)
    for subset in 1u64..(1u64 << n) {
        let mut uf = UnionFind::new(n);
        let mut min_members = usize::MAX;
        for &tm in &target_masks {
            let members = tm & subset;
            if members == 0 {
                continue;
            }
            min_members = min_members.min(members.count_ones() as usize);
            let first = members.trailing_zeros() as usize;
            let mut rest = members & (members - 1);
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                uf.union(first, i);
                rest &= rest - 1;
            }
        }
        let mut roots = BTreeSet::new();
        let mut bits = subset;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            roots.insert(uf.find(i));
            bits &= bits - 1;
        }
        let components = roots.len();
        let lstar = subset.count_ones() as usize - min_members + 1;
        if lstar > sup_lstar.0 {
            sup_lstar = (lstar, subset);
        }
        let better = match best {
            None => true,
            Some((c, m)) => {
                components > c || (components == c && subset_beats_for_witness(subset, m, &sources))
            }
        };
        if better {
            best = Some((components, subset));
        }
    }

    let (components, witness_mask) = best.expect("at least one subset was scanned");
    let witness: BTreeSet<Symbol> = sources
        .iter()
        .enumerate()
        .filter(|(i, _)| witness_mask & (1 << i) != 0)
        .map(|(_, s)| (*s).clone())
        .collect();
    let value = LeakageValue::from_count(components)?;
    let sup_maximal_leakage = LeakageValue::from_count(sup_lstar.0)?;

    let full = channel.relation_over(alphabet)?;
    let eps = min_epsilon(&full, &[channel.source_var()], &[channel.target_var()])?;
    let (ceiling, ceiling_holds) = match eps.as_budget() {
        Some(budget) => {
            let ceiling = identifiability_bound(alphabet.len(), &budget)?;
            let holds = ceiling_dominates(alphabet.len(), &budget, &value)?;
            (ceiling, holds)
        }
        // identifiable at every positive budget; the ceiling limit is zero
        None => (BoundValue::Exact(LeakageValue::zero()), value.is_zero()),
    };

    Ok(CapacityBound {
        leakage_dominates: value <= sup_maximal_leakage,
        value,
        witness,
        sup_maximal_leakage,
        min_epsilon: eps,
        ceiling,
        ceiling_holds,
    })
}

/// Witness preference among equal-value subsets: smaller cardinality
/// first, then lexicographically smaller symbol sequence.
fn subset_beats_for_witness(candidate: u64, incumbent: u64, sources: &[&Symbol]) -> bool {
    let (cc, ic) = (candidate.count_ones(), incumbent.count_ones());
    if cc != ic {
        return cc < ic;
    }
    let list = |mask: u64| -> Vec<&Symbol> {
        sources
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, s)| *s)
            .collect()
    };
    list(candidate) < list(incumbent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uv::sym;

    fn rel(pairs: &[(&str, &str)]) -> Relation {
        let tuples = pairs.iter().map(|(x, y)| vec![sym(x), sym(y)]).collect();
        Relation::from_tuples(&["X", "Y"], tuples).unwrap()
    }

    fn reference_instance() -> Relation {
        rel(&[("x1", "y1"), ("x2", "y1"), ("x3", "y2")])
    }

    fn rel2() -> Relation {
        rel(&[("x1", "y1"), ("x2", "y1"), ("x2", "y2"), ("x3", "y2")])
    }

    fn identity_rel(n: usize) -> Relation {
        let tuples = (1..=n)
            .map(|i| vec![sym(&format!("x{i}")), sym(&format!("x{i}"))])
            .collect();
        Relation::from_tuples(&["X", "Y"], tuples).unwrap()
    }

    fn syms(names: &[&str]) -> BTreeSet<Symbol> {
        names.iter().map(|s| sym(s)).collect()
    }

    fn blocks(p: &Partition) -> Vec<Vec<String>> {
        p.blocks()
            .iter()
            .map(|b| b.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn overlap_partition_reference_instances() {
        let p = overlap_partition(&reference_instance(), "X", "Y").unwrap();
        assert_eq!(blocks(&p), vec![vec!["x1", "x2"], vec!["x3"]]);

        let p2 = overlap_partition(&rel2(), "X", "Y").unwrap();
        assert_eq!(blocks(&p2), vec![vec!["x1", "x2", "x3"]]);

        let pid = overlap_partition(&identity_rel(3), "X", "Y").unwrap();
        assert_eq!(pid.block_count(), 3);
        assert!(pid.blocks().iter().all(|b| b.len() == 1));
    }

    #[test]
    fn maximin_info_counts_blocks() {
        assert_eq!(
            maximin_info(&reference_instance(), "X", "Y").unwrap(),
            LeakageValue::from_count(2).unwrap()
        );
        assert_eq!(
            maximin_info(&rel2(), "X", "Y").unwrap(),
            LeakageValue::zero()
        );
        assert_eq!(
            maximin_info(&identity_rel(5), "X", "Y").unwrap(),
            LeakageValue::from_count(5).unwrap()
        );
    }

    #[test]
    fn common_variable_labels_blocks_and_is_one_shot() {
        let r = reference_instance();
        let g = common_variable(&r, "X", "Y").unwrap();
        assert_eq!(g.apply(&sym("x1")), Some(&sym("b0")));
        assert_eq!(g.apply(&sym("x2")), Some(&sym("b0")));
        assert_eq!(g.apply(&sym("x3")), Some(&sym("b1")));

        let ru = r.apply_attribute(&g, "X", "U").unwrap();
        for y in ru.marginal_set("Y").unwrap() {
            assert_eq!(ru.conditional_set("U", "Y", &y).unwrap().len(), 1);
        }
        assert_eq!(ru.marginal_set("U").unwrap().len(), 2);

        let g2 = common_variable(&rel2(), "X", "Y").unwrap();
        assert_eq!(g2.image(), syms(&["b0"]));
    }

    #[test]
    fn symmetry_holds_on_reference_instances() {
        assert!(maximin_symmetry_check(&reference_instance(), "X", "Y").unwrap());
        assert!(maximin_symmetry_check(&rel2(), "X", "Y").unwrap());
        assert!(maximin_symmetry_check(&identity_rel(4), "X", "Y").unwrap());
    }

    #[test]
    fn one_shot_value_is_bounded_by_maximal_leakage() {
        use crate::measures::maximal_leakage;
        for r in [reference_instance(), rel2(), identity_rel(4)] {
            let one_shot = one_shot_supremum(&r, "X", "Y").unwrap();
            let lstar = maximal_leakage(&r, &["X"], &["Y"]).unwrap();
            assert!(one_shot <= lstar);
        }
    }

    #[test]
    fn capacity_reference_instance() {
        let ch = reference_instance().channel("X", "Y").unwrap();
        let alphabet = syms(&["x1", "x2", "x3"]);
        let b = zero_error_capacity_bound(&alphabet, &ch, DEFAULT_ALPHABET_CAP).unwrap();
        assert_eq!(b.value, LeakageValue::from_count(2).unwrap());
        assert_eq!(b.witness, syms(&["x1", "x3"]));
        assert!(b.leakage_dominates);
        assert!(b.ceiling_holds);
    }

    #[test]
    fn noiseless_channel_capacity_is_full_entropy() {
        for n in [1usize, 2, 5, 8] {
            let map = (1..=n)
                .map(|i| (sym(&format!("x{i}")), syms(&[&format!("y{i}")])))
                .collect();
            let ch = Channel::new("X", "Y", map).unwrap();
            let alphabet: BTreeSet<Symbol> = (1..=n).map(|i| sym(&format!("x{i}"))).collect();
            let b = zero_error_capacity_bound(&alphabet, &ch, DEFAULT_ALPHABET_CAP).unwrap();
            assert_eq!(b.value, LeakageValue::from_count(n).unwrap());
            assert_eq!(b.witness, alphabet);
        }
    }

    #[test]
    fn all_images_equal_gives_zero_capacity() {
        let map = (1..=4)
            .map(|i| (sym(&format!("x{i}")), syms(&["y1", "y2"])))
            .collect();
        let ch = Channel::new("X", "Y", map).unwrap();
        let alphabet: BTreeSet<Symbol> = (1..=4).map(|i| sym(&format!("x{i}"))).collect();
        let b = zero_error_capacity_bound(&alphabet, &ch, DEFAULT_ALPHABET_CAP).unwrap();
        assert!(b.value.is_zero());
        assert_eq!(b.witness, syms(&["x1"]));
        assert!(b.min_epsilon.open_bound);
        assert!(b.ceiling_holds);
    }

    #[test]
    fn capacity_cap_is_enforced() {
        let ch = reference_instance().channel("X", "Y").unwrap();
        let alphabet = syms(&["x1", "x2", "x3"]);
        let err = zero_error_capacity_bound(&alphabet, &ch, 2).unwrap_err();
        assert!(matches!(err, Error::SearchCap { .. }));
    }

    #[test]
    fn capacity_is_monotone_under_alphabet_growth() {
        let ch = rel2().channel("X", "Y").unwrap();
        let small = zero_error_capacity_bound(&syms(&["x1", "x2"]), &ch, 16).unwrap();
        let full = zero_error_capacity_bound(&syms(&["x1", "x2", "x3"]), &ch, 16).unwrap();
        assert!(small.value <= full.value);
        // x1 and x3 have disjoint images in rel2's channel
        assert_eq!(full.value, LeakageValue::from_count(2).unwrap());
        assert_eq!(full.witness, syms(&["x1", "x3"]));
    }

    #[test]
    fn partition_validation() {
        let ground = syms(&["a", "b"]);
        assert!(Partition::new(ground.clone(), vec![syms(&["a"])]).is_err());
        assert!(Partition::new(ground.clone(), vec![syms(&["a", "b"]), syms(&["b"])]).is_err());
        assert!(Partition::new(ground.clone(), vec![syms(&["a", "b", "c"])]).is_err());
        let p = Partition::new(ground, vec![syms(&["b"]), syms(&["a"])]).unwrap();
        // canonical order sorts by smallest element
        assert_eq!(blocks(&p), vec![vec!["a"], vec!["b"]]);
    }

    #[test]
    fn every_conditional_range_sits_inside_one_block() {
        for r in [reference_instance(), rel2(), identity_rel(4)] {
            let p = overlap_partition(&r, "X", "Y").unwrap();
            for y in r.marginal_set("Y").unwrap() {
                let range = r.conditional_set("X", "Y", &y).unwrap();
                let hit: BTreeSet<usize> = range.iter().map(|s| p.block_of(s).unwrap()).collect();
                assert_eq!(hit.len(), 1);
            }
        }
    }
}
