//! Independent brute-force verification of every closed form.
//!
//! The guessing leakage of a derived attribute depends on the attribute
//! only through its fiber partition of the source range: the prior count
//! is the number of fibers and each posterior count is the number of
//! fibers meeting the conditional range. Searching over set partitions is
//! therefore an exhaustive search over all attributes, which makes the
//! closed forms checkable by brute force at desk scale.
//!
//! Set partitions are enumerated as restricted growth strings (Knuth,
//! TAOCP 4A, algorithm H), `B(n)` of them for an `n`-element ground set.
//!
//! Randomized campaigns re-check the proved inequalities on seeded
//! instances. Generation is deterministic: the stream comes from the
//! ChaCha8 generator (`rand_chacha` 0.3) seeded with the instance seed,
//! so goldens are portable across platforms.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::{BigRational, One, Signed};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::maximin::{maximin_info, overlap_partition, Partition};
use crate::measures::{
    ceiling_dominates, identifiability_bound, is_identifiable, leakage, maximal_leakage,
    min_epsilon, BoundValue, PrivacyBudget,
};
use crate::stochastic::{entropy_sum_bound, stochastic_bf_leakage, RationalDist};
use crate::uv::{compose_markov, AttributeMap, Channel, Relation, Symbol};
use crate::value::LeakageValue;

/// Default cap on the brute-force ground-set size; `B(10) = 115975`.
pub const DEFAULT_PARTITION_CAP: usize = 10;

/// Enumerates every set partition of `{0, .., n-1}` exactly once, as
/// restricted growth strings: position `i` holds the block label of
/// element `i`, labels first appear in increasing order.
pub struct PartitionIterator {
    labels: Vec<usize>,
    bounds: Vec<usize>,
    max_last: usize,
    n: usize,
    started: bool,
    done: bool,
}

impl PartitionIterator {
    pub fn new(n: usize) -> Self {
        PartitionIterator {
            labels: vec![0; n],
            bounds: vec![1; n],
            max_last: 1,
            n,
            started: false,
            done: n == 0,
        }
    }

    /// The next restricted growth string, or `None` when exhausted.
    pub fn next_labels(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.labels);
        }
        if self.n == 1 {
            self.done = true;
            return None;
        }
        if self.labels[self.n - 1] != self.max_last {
            self.labels[self.n - 1] += 1;
        } else {
            let mut j = self.n - 2;
            while j != 0 && self.labels[j] == self.bounds[j + 1] {
                j -= 1;
            }
            if j == 0 {
                self.done = true;
                return None;
            }
            self.labels[j] += 1;
            self.max_last = self.bounds[j + 1] + usize::from(self.labels[j] == self.bounds[j + 1]);
            j += 1;
            while j < self.n - 1 {
                self.labels[j] = 0;
                self.bounds[j + 1] = self.max_last;
                j += 1;
            }
            self.labels[self.n - 1] = 0;
        }
        Some(&self.labels)
    }

    /// Number of partitions remaining from a fresh iterator: the Bell
    /// number `B(n)`. Counting walks the whole enumeration.
    pub fn count(n: usize) -> usize {
        let mut it = PartitionIterator::new(n);
        let mut total = 0;
        while it.next_labels().is_some() {
            total += 1;
        }
        total
    }
}

/// Outcome of a brute-force search: the extremal value and a partition
/// witnessing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    pub value: LeakageValue,
    pub witness: Partition,
}

struct GroundScan {
    ground: Vec<Symbol>,
    observation_masks: Vec<u64>,
}

fn ground_scan(rel: &Relation, x: &str, y: &str, cap: usize) -> Result<GroundScan> {
    let ground: Vec<Symbol> = rel.marginal_set(x)?.into_iter().collect();
    if ground.len() > cap {
        return Err(Error::SearchCap {
            what: "brute-force partition search ground set",
            size: ground.len(),
            cap,
        });
    }
    if ground.len() > 64 {
        return Err(Error::input("partition search supports at most 64 symbols"));
    }
    let index: BTreeMap<&Symbol, usize> = ground.iter().zip(0..).collect();
    let mut observation_masks = Vec::new();
    for yv in rel.marginal_set(y)? {
        let mut mask = 0u64;
        for s in rel.conditional_set(x, y, &yv)? {
            mask |= 1 << index[&s];
        }
        observation_masks.push(mask);
    }
    Ok(GroundScan {
        ground,
        observation_masks,
    })
}

fn partition_from_labels(ground: &[Symbol], labels: &[usize]) -> Partition {
    let nblocks = labels.iter().max().map_or(0, |m| m + 1);
    let mut blocks: Vec<BTreeSet<Symbol>> = vec![BTreeSet::new(); nblocks];
    for (s, &l) in ground.iter().zip(labels) {
        blocks[l].insert(s.clone());
    }
    Partition::new(ground.iter().cloned().collect(), blocks)
        .expect("restricted growth strings encode valid partitions")
}

/// Maximizes `log2(|P| / min_y #{blocks of P meeting [[x|y]]})` over all
/// partitions `P` of the source range: the supremum of guessing leakage
/// over every attribute. Must equal the maximal-leakage closed form.
pub fn brute_force_max_leakage(rel: &Relation, x: &str, y: &str, cap: usize) -> Result<BruteForce> {
    let scan = ground_scan(rel, x, y, cap)?;
    let mut it = PartitionIterator::new(scan.ground.len());
    // best ratio tracked as integer pair, compared by cross products
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    while let Some(labels) = it.next_labels() {
        let nblocks = labels.iter().max().unwrap() + 1;
        let mut min_meet = usize::MAX;
        for &mask in &scan.observation_masks {
            let mut seen = 0u64;
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                seen |= 1 << labels[i];
                bits &= bits - 1;
            }
            min_meet = min_meet.min(seen.count_ones() as usize);
        }
        let improves = match &best {
            None => true,
            Some((bn, bd, _)) => {
                (nblocks as u128) * (*bd as u128) > (*bn as u128) * (min_meet as u128)
            }
        };
        if improves {
            best = Some((nblocks, min_meet, labels.to_vec()));
        }
    }
    let (num, den, labels) = best.expect("at least one partition exists");
    Ok(BruteForce {
        value: LeakageValue::from_cardinalities(num, den)?,
        witness: partition_from_labels(&scan.ground, &labels),
    })
}

/// Maximizes `log2(|P|)` over partitions in which every conditional range
/// sits inside a single block: the supremum of guessing leakage over
/// one-shot attributes. Must equal the maximin information, with the
/// overlap partition as the unique finest feasible witness.
pub fn brute_force_one_shot(rel: &Relation, x: &str, y: &str, cap: usize) -> Result<BruteForce> {
    let scan = ground_scan(rel, x, y, cap)?;
    let mut it = PartitionIterator::new(scan.ground.len());
    let mut best: Option<(usize, Vec<usize>)> = None;
    'outer: while let Some(labels) = it.next_labels() {
        for &mask in &scan.observation_masks {
            let first = mask.trailing_zeros() as usize;
            let want = labels[first];
            let mut bits = mask & (mask - 1);
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                if labels[i] != want {
                    continue 'outer;
                }
                bits &= bits - 1;
            }
        }
        let nblocks = labels.iter().max().unwrap() + 1;
        if best.as_ref().is_none_or(|(b, _)| nblocks > *b) {
            best = Some((nblocks, labels.to_vec()));
        }
    }
    let (nblocks, labels) = best.expect("the one-block partition is always feasible");
    Ok(BruteForce {
        value: LeakageValue::from_count(nblocks)?,
        witness: partition_from_labels(&scan.ground, &labels),
    })
}

/// Shape of a seeded random relation: per-variable range sizes, a fill
/// density, and the generator seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSpec {
    pub sizes: Vec<usize>,
    pub density: BigRational,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(sizes: Vec<usize>, density: BigRational, seed: u64) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::input("every variable needs a positive range size"));
        }
        if !density.is_positive() || density > BigRational::one() {
            return Err(Error::input(format!("density {density} is outside (0, 1]")));
        }
        let limit = BigInt::from(u32::MAX);
        if density.numer() > &limit || density.denom() > &limit {
            return Err(Error::input(
                "density numerator and denominator must fit in 32 bits",
            ));
        }
        sizes
            .iter()
            .try_fold(1usize, |acc, &s| {
                acc.checked_mul(s).filter(|&c| c <= 1_000_000)
            })
            .ok_or_else(|| Error::input("product range exceeds 1e6 cells"))?;
        Ok(InstanceSpec {
            sizes,
            density,
            seed,
        })
    }
}

/// Default variable names: X, Y, Z, W, then V5, V6, ...
pub fn default_variable_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| match i {
            0 => "X".to_string(),
            1 => "Y".to_string(),
            2 => "Z".to_string(),
            3 => "W".to_string(),
            _ => format!("V{}", i + 1),
        })
        .collect()
}

fn var_symbols(name: &str, size: usize) -> Vec<Symbol> {
    let prefix = name.to_lowercase();
    (1..=size)
        .map(|i| Symbol::new(format!("{prefix}{i}")).unwrap())
        .collect()
}

/// Exact Bernoulli(density) draw from one 64-bit generator step.
fn bernoulli(rng: &mut ChaCha8Rng, density: &BigRational) -> bool {
    let r = rng.next_u64();
    let p = u128::try_from(density.numer().magnitude()).expect("validated to fit");
    let q = u128::try_from(density.denom().magnitude()).expect("validated to fit");
    (r as u128) * q < p << 64
}

/// A seeded random relation with full marginals: one covering tuple per
/// symbol row is laid down through shuffled columns before the density
/// fill, so every declared symbol is realized regardless of density.
pub fn random_relation(spec: &InstanceSpec) -> Result<Relation> {
    let names = default_variable_names(spec.sizes.len());
    random_relation_named(spec, &names)
}

pub fn random_relation_named(spec: &InstanceSpec, names: &[String]) -> Result<Relation> {
    if names.len() != spec.sizes.len() {
        return Err(Error::input("one name per variable size is required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let symbols: Vec<Vec<Symbol>> = names
        .iter()
        .zip(&spec.sizes)
        .map(|(n, &s)| var_symbols(n, s))
        .collect();

    let mut tuples: BTreeSet<Vec<Symbol>> = BTreeSet::new();
    let max_size = *spec.sizes.iter().max().unwrap();
    let perms: Vec<Vec<usize>> = spec
        .sizes
        .iter()
        .map(|&s| {
            let mut p: Vec<usize> = (0..s).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    for j in 0..max_size {
        let t: Vec<Symbol> = symbols
            .iter()
            .zip(&perms)
            .map(|(syms, p)| syms[p[j % p.len()]].clone())
            .collect();
        tuples.insert(t);
    }

    let mut odometer = vec![0usize; spec.sizes.len()];
    loop {
        let t: Vec<Symbol> = symbols
            .iter()
            .zip(&odometer)
            .map(|(syms, &i)| syms[i].clone())
            .collect();
        if bernoulli(&mut rng, &spec.density) {
            tuples.insert(t);
        }
        let mut pos = spec.sizes.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < spec.sizes[pos] {
                break;
            }
            odometer[pos] = 0;
        }
        if odometer.iter().all(|&i| i == 0) {
            break;
        }
    }

    let names_ref: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let rel = Relation::from_tuples(&names_ref, tuples.into_iter().collect())?;
    for (name, &size) in names.iter().zip(&spec.sizes) {
        debug_assert_eq!(rel.marginal_set(name)?.len(), size);
    }
    Ok(rel)
}

/// A seeded random channel defined on every source symbol, whose images
/// jointly cover the whole target alphabet.
fn random_channel(
    rng: &mut ChaCha8Rng,
    source_var: &str,
    sources: &[Symbol],
    target_var: &str,
    targets: &[Symbol],
    density: &BigRational,
) -> Channel {
    let mut map: BTreeMap<Symbol, BTreeSet<Symbol>> = BTreeMap::new();
    for x in sources {
        let mut image = BTreeSet::new();
        for y in targets {
            if bernoulli(rng, density) {
                image.insert(y.clone());
            }
        }
        if image.is_empty() {
            image.insert(targets[rng.gen_range(0..targets.len())].clone());
        }
        map.insert(x.clone(), image);
    }
    for y in targets {
        if !map.values().any(|im| im.contains(y)) {
            let x = &sources[rng.gen_range(0..sources.len())];
            map.get_mut(x).unwrap().insert(y.clone());
        }
    }
    Channel::new(source_var, target_var, map).expect("images are non-empty by construction")
}

/// A seeded random surjective labeling of `domain` onto `blocks` fresh
/// attribute symbols.
fn random_attribute(
    rng: &mut ChaCha8Rng,
    domain: &BTreeSet<Symbol>,
    blocks: usize,
) -> AttributeMap {
    let blocks = blocks.clamp(1, domain.len());
    let labels: Vec<Symbol> = (1..=blocks)
        .map(|i| Symbol::new(format!("u{i}")).unwrap())
        .collect();
    let mut order: Vec<&Symbol> = domain.iter().collect();
    order.shuffle(rng);
    let map = order
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let label = if i < blocks {
                labels[i].clone()
            } else {
                labels[rng.gen_range(0..blocks)].clone()
            };
            ((*s).clone(), label)
        })
        .collect();
    AttributeMap::new(map).expect("domains are non-empty")
}

/// Shape of a seeded four-variable chain `U - X - Y - Z`, realized as a
/// random attribute over a random two-step channel composition, so every
/// adjacent triple is Markov by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpec {
    /// Range sizes of X, Y, Z.
    pub sizes: [usize; 3],
    /// Number of attribute values of U.
    pub attribute_blocks: usize,
    pub density: BigRational,
    pub seed: u64,
}

/// Builds the chain relation over `(U, X, Y, Z)`.
pub fn random_markov_chain(spec: &ChainSpec) -> Result<Relation> {
    if spec.sizes.contains(&0) || spec.attribute_blocks == 0 {
        return Err(Error::input("chain sizes must be positive"));
    }
    if !spec.density.is_positive() || spec.density > BigRational::one() {
        return Err(Error::input("chain density must lie in (0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let xs = var_symbols("X", spec.sizes[0]);
    let ys = var_symbols("Y", spec.sizes[1]);
    let zs = var_symbols("Z", spec.sizes[2]);
    let base = Relation::from_tuples(&["X"], xs.iter().map(|s| vec![s.clone()]).collect())?;
    let k1 = random_channel(&mut rng, "X", &xs, "Y", &ys, &spec.density);
    let k2 = random_channel(&mut rng, "Y", &ys, "Z", &zs, &spec.density);
    let xyz = compose_markov(&base, &[&k1, &k2])?;
    let g = random_attribute(&mut rng, &xyz.marginal_set("X")?, spec.attribute_blocks);
    xyz.apply_attribute(&g, "X", "U")
}

/// Every relation on full marginals with `|[[X]]| <= max_x` and
/// `|[[Y]]| <= max_y`: the exhaustive family behind the small-instance
/// equivalence checks.
pub fn exhaustive_full_marginal_relations(max_x: usize, max_y: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    for nx in 1..=max_x {
        for ny in 1..=max_y {
            let xs = var_symbols("X", nx);
            let ys = var_symbols("Y", ny);
            let cells = nx * ny;
            assert!(
                cells <= 24,
                "exhaustive family is meant for desk-size grids"
            );
            for mask in 1u32..(1u32 << cells) {
                let mut row_cover = 0u32;
                let mut col_cover = 0u32;
                for c in 0..cells {
                    if mask & (1 << c) != 0 {
                        row_cover |= 1 << (c / ny);
                        col_cover |= 1 << (c % ny);
                    }
                }
                if row_cover.count_ones() as usize != nx || col_cover.count_ones() as usize != ny {
                    continue;
                }
                let tuples: Vec<Vec<Symbol>> = (0..cells)
                    .filter(|c| mask & (1 << c) != 0)
                    .map(|c| vec![xs[c / ny].clone(), ys[c % ny].clone()])
                    .collect();
                out.push(Relation::from_tuples(&["X", "Y"], tuples).unwrap());
            }
        }
    }
    out
}

/// The campaigns: named bundles of checks over exhaustive small families
/// and seeded random instances. A violation carries the counterexample
/// relation so it can be written out and reloaded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Campaign {
    /// Guessing leakage never increases under post-processing.
    Dpi,
    /// Guessing leakage is non-negative and vanishes on unrelated pairs.
    Bounding,
    /// Maximal leakage is non-negative, vanishes exactly on unrelated
    /// pairs, and is capped by the prior entropy with equality on the
    /// identity channel.
    Properties,
    /// The maximal-leakage closed form equals the exhaustive attribute
    /// search.
    ClosedForm,
    /// The one-shot supremum equals the overlap-partition count and is
    /// dominated by maximal leakage.
    OneShot,
    /// Identifiability audits are exact and the leakage ceiling is tight
    /// at the infimum budget.
    Identifiability,
    /// Maximal leakage is at most output entropy plus conditional
    /// entropy.
    EntropySum,
    /// Maximal leakage over unrelated products of revealing factors
    /// splits into the sum of per-factor guessing leakages.
    Additivity,
    /// Overlap partitions have the same block count in both directions.
    MaximinSymmetry,
    /// Stochastic guessing leakage is non-negative on random rational
    /// distributions.
    StochasticNonneg,
}

impl Campaign {
    pub const ALL: [Campaign; 10] = [
        Campaign::Dpi,
        Campaign::Bounding,
        Campaign::Properties,
        Campaign::ClosedForm,
        Campaign::OneShot,
        Campaign::Identifiability,
        Campaign::EntropySum,
        Campaign::Additivity,
        Campaign::MaximinSymmetry,
        Campaign::StochasticNonneg,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Campaign::Dpi => "dpi",
            Campaign::Bounding => "bounding",
            Campaign::Properties => "properties",
            Campaign::ClosedForm => "closed-form",
            Campaign::OneShot => "one-shot",
            Campaign::Identifiability => "identifiability",
            Campaign::EntropySum => "prop6",
            Campaign::Additivity => "additivity",
            Campaign::MaximinSymmetry => "maximin-symmetry",
            Campaign::StochasticNonneg => "stochastic-nonneg",
        }
    }

    pub fn claim(&self) -> &'static str {
        match self {
            Campaign::Dpi => "leakage never increases under post-processing along a chain",
            Campaign::Bounding => "guessing leakage is non-negative and vanishes on unrelated pairs",
            Campaign::Properties => {
                "maximal leakage is non-negative, vanishes exactly on unrelated pairs, and is capped by prior entropy"
            }
            Campaign::ClosedForm => "the maximal-leakage closed form matches exhaustive attribute search",
            Campaign::OneShot => "the one-shot supremum matches the overlap-partition count",
            Campaign::Identifiability => "identifiability audits are exact and the ceiling is tight at the infimum budget",
            Campaign::EntropySum => "maximal leakage is at most output entropy plus worst-case conditional entropy",
            Campaign::Additivity => "maximal leakage over unrelated products splits into per-factor leakages",
            Campaign::MaximinSymmetry => "overlap partitions have equal block counts in both directions",
            Campaign::StochasticNonneg => "stochastic guessing leakage is non-negative on rational distributions",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Campaign::ALL
            .iter()
            .copied()
            .find(|c| c.name() == name)
            .ok_or_else(|| {
                let known: Vec<&str> = Campaign::ALL.iter().map(|c| c.name()).collect();
                Error::input(format!(
                    "unknown campaign {name:?}; expected one of {}",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignConfig {
    pub trials: usize,
    pub seed: u64,
    pub partition_cap: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            trials: 200,
            seed: 7,
            partition_cap: DEFAULT_PARTITION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub description: String,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignReport {
    pub campaign: Campaign,
    /// Instances examined (exhaustive plus random).
    pub instances: usize,
    /// Individual assertions evaluated.
    pub checks: usize,
    pub violations: Vec<Violation>,
    /// Findings that are reported without counting as violations.
    pub notes: Vec<String>,
}

impl CampaignReport {
    fn new(campaign: Campaign) -> Self {
        CampaignReport {
            campaign,
            instances: 0,
            checks: 0,
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, ok: bool, rel: &Relation, description: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(Violation {
                description: description(),
                relation: rel.clone(),
            });
        }
    }
}

fn instance_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add((trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn density_from(rng: &mut ChaCha8Rng) -> BigRational {
    let num = rng.gen_range(1..=4i64);
    BigRational::new(BigInt::from(num), BigInt::from(4))
}

/// Runs one campaign and returns its findings.
pub fn property_campaign(campaign: Campaign, cfg: &CampaignConfig) -> Result<CampaignReport> {
    match campaign {
        Campaign::Dpi => dpi_campaign(cfg),
        Campaign::Bounding => bounding_campaign(cfg),
        Campaign::Properties => properties_campaign(cfg),
        Campaign::ClosedForm => closed_form_campaign(cfg),
        Campaign::OneShot => one_shot_campaign(cfg),
        Campaign::Identifiability => identifiability_campaign(cfg),
        Campaign::EntropySum => entropy_sum_campaign(cfg),
        Campaign::Additivity => additivity_campaign(cfg),
        Campaign::MaximinSymmetry => maximin_symmetry_campaign(cfg),
        Campaign::StochasticNonneg => stochastic_nonneg_campaign(cfg),
    }
}

fn dpi_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport::new(Campaign::Dpi);
    for t in 0..cfg.trials {
        let seed = instance_seed(cfg.seed, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sizes = [
            rng.gen_range(2..=5usize),
            rng.gen_range(2..=5usize),
            rng.gen_range(2..=5usize),
        ];
        let spec = ChainSpec {
            sizes,
            attribute_blocks: rng.gen_range(1..=sizes[0]),
            density: density_from(&mut rng),
            seed,
        };
        let chain = random_markov_chain(&spec)?;
        report.instances += 1;

        let to_y = leakage(&chain, &["U"], &["Y"])?.value;
        let to_z = leakage(&chain, &["U"], &["Z"])?.value;
        report.check(to_z <= to_y, &chain, || {
            format!("attribute leakage grew under post-processing: {to_z} > {to_y} (seed {seed})")
        });

        let lx_y = maximal_leakage(&chain, &["X"], &["Y"])?;
        let lx_z = maximal_leakage(&chain, &["X"], &["Z"])?;
        report.check(lx_z <= lx_y, &chain, || {
            format!("maximal leakage grew under post-processing: {lx_z} > {lx_y} (seed {seed})")
        });
    }
    Ok(report)
}

fn bounding_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport::new(Campaign::Bounding);
    for t in 0..cfg.trials {
        let seed = instance_seed(cfg.seed, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sizes = vec![rng.gen_range(1..=6usize), rng.gen_range(1..=6usize)];
        let spec = InstanceSpec::new(sizes, density_from(&mut rng), seed)?;
        let rel = random_relation(&spec)?;
        let blocks = rng.gen_range(1..=spec.sizes[0]);
        let g = random_attribute(&mut rng, &rel.marginal_set("X")?, blocks);
        let extended = rel.apply_attribute(&g, "X", "U")?;
        report.instances += 1;

        let l = leakage(&extended, &["U"], &["Y"])?.value;
        report.check(l >= LeakageValue::zero(), &extended, || {
            format!("negative attribute leakage {l} (seed {seed})")
        });

        // unrelated instance: full product of the same marginals
        let mut product_tuples = Vec::new();
        for x in rel.marginal_set("X")? {
            for y in rel.marginal_set("Y")? {
                product_tuples.push(vec![x.clone(), y.clone()]);
            }
        }
        let product = Relation::from_tuples(&["X", "Y"], product_tuples)?;
        let extended = product.apply_attribute(&g, "X", "U")?;
        report.instances += 1;
        let l0 = leakage(&extended, &["U"], &["Y"])?.value;
        report.check(l0.is_zero(), &extended, || {
            format!("unrelated pair leaked {l0} through an attribute (seed {seed})")
        });
    }
    Ok(report)
}

fn properties_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport::new(Campaign::Properties);

    // zero-leakage iff unrelated, exhaustively on small grids
    for rel in exhaustive_full_marginal_relations(3, 3) {
        report.instances += 1;
        let lstar = maximal_leakage(&rel, &["X"], &["Y"])?;
        let unrelated = rel.is_unrelated(&["X"], &["Y"])?;
        report.check(lstar.is_zero() == unrelated, &rel, || {
            format!("zero maximal leakage ({lstar}) disagrees with unrelatedness ({unrelated})")
        });
    }

    // identity channel attains the prior-entropy cap
    for n in 1..=8usize {
        let tuples = (1..=n)
            .map(|i| vec![Symbol::new(format!("x{i}")).unwrap(); 2])
            .collect();
        let rel = Relation::from_tuples(&["X", "Y"], tuples)?;
        report.instances += 1;
        let lstar = maximal_leakage(&rel, &["X"], &["Y"])?;
        report.check(lstar == LeakageValue::from_count(n)?, &rel, || {
            format!("identity channel leaked {lstar}, expected log2({n})")
        });
    }

    // random instances: non-negativity and the entropy cap
    for t in 0..cfg.trials {
        let seed = instance_seed(cfg.seed, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sizes = vec![rng.gen_range(1..=8usize), rng.gen_range(1..=8usize)];
        let spec = InstanceSpec::new(sizes, density_from(&mut rng), seed)?;
        let rel = random_relation(&spec)?;
        report.instances += 1;
        let lstar = maximal_leakage(&rel, &["X"], &["Y"])?;
        let cap = LeakageValue::from_count(rel.marginal_set("X")?.len())?;
        report.check(lstar >= LeakageValue::zero(), &rel, || {
            format!("negative maximal leakage {lstar} (seed {seed})")
        });
        report.check(lstar <= cap, &rel, || {
            format!("maximal leakage {lstar} exceeds prior entropy {cap} (seed {seed})")
        });
    }
    Ok(report)
}

fn random_two_var(seed: u64, max_x: usize, max_y: usize) -> Result<Relation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = vec![rng.gen_range(1..=max_x), rng.gen_range(1..=max_y)];
    let spec = InstanceSpec::new(sizes, density_from(&mut rng), seed)?;
    random_relation(&spec)
}

fn closed_form_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport::new(Campaign::ClosedForm);
    for rel in exhaustive_full_marginal_relations(4, 3) {
        report.instances += 1;
        let closed = maximal_leakage(&rel, &["X"], &["Y"])?;
        let brute = brute_force_max_leakage(&rel, "X", "Y", cfg.partition_cap)?;
        report.check(brute.value == closed, &rel, || {
            format!("closed form {closed} != exhaustive search {}", brute.value)
        });
    }
    for t in 0..cfg.trials {
        let seed = instance_seed(cfg.seed, t);
        let rel = random_two_var(seed, 8, 8)?;
        report.instances += 1;
        let closed = maximal_leakage(&rel, &["X"], &["Y"])?;
        let brute = brute_force_max_leakage(&rel, "X", "Y", cfg.partition_cap)?;
        report.check(brute.value == closed, &rel, || {
            format!(
                "closed form {closed} != exhaustive search {} (seed {seed})",
                brute.value
            )
        });
    }
    Ok(report)
}

fn one_shot_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport::new(Campaign::OneShot);
    let run = |rel: &Relation, report: &mut CampaignReport, seed: Option<u64>| -> Result<()> {
        report.instances += 1;
        let brute = brute_force_one_shot(rel, "X", "Y", cfg.partition_cap)?;
        let info = maximin_info(rel, "X", "Y")?;
        let lstar = maximal_leakage(rel, &["X"], &["Y"])?;
        let tag = seed.map(|s| format!(" (seed {s})")).unwrap_or_default();
        report.check(brute.value == info, rel, || {
            format!(
                "one-shot search {} != overlap count {info}{tag}",
                brute.value
            )
        });
        report.check(brute.value <= lstar, rel, || {
            format!(
                "one-shot supremum {} exceeds maximal leakage {lstar}{tag}",
                brute.value
            )
        });
        let overlap = overlap_partition(rel, "X", "Y")?;
        report.check(brute.witness == overlap, rel, || {
            format!("finest feasible partition differs from the overlap partition{tag}")
        });
        Ok(())
    };
    for rel in exhaustive_full_marginal_relations(4, 3) {
        run(&rel, &mut report, None)?;
    }
    for t in 0..cfg.trials {
        let seed = instance_seed(cfg.seed, t);
        let rel = random_two_var(seed, 8, 8)?;
        run(&rel, &mut report, Some(seed))?;
    }
    Ok(report)
}

fn identifiability_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport::new(Campaign::Identifiability);
    let run = |rel: &Relation, report: &mut CampaignReport| -> Result<()> {
        report.instances += 1;
        let lstar = maximal_leakage(rel, &["X"], &["Y"])?;
        let eps = min_epsilon(rel, &["X"], &["Y"])?;
        let n = rel.marginal_set("X")?.len();
        match eps.as_budget() {
            None => {
                report.check(lstar.is_zero(), rel, || {
                    format!("open-bound budget with non-zero maximal leakage {lstar}")
                });
            }
            Some(budget) => {
                report.check(is_identifiable(rel, &["X"], &["Y"], &budget)?, rel, || {
                    format!("not identifiable at its own infimum budget {budget}")
                });
                // any strictly smaller budget must fail: between the
                // infimum log2(n/m) and log2(2n/(2m+1)) there is room
                let m = eps.value.den();
                let nn = eps.value.num();
                let below = PrivacyBudget::log2(BigRational::new(
                    BigInt::from(nn.clone() * 2u8),
                    BigInt::from(m.clone() * 2u8 + BigInt::one().magnitude()),
                ))?;
                report.check(!is_identifiable(rel, &["X"], &["Y"], &below)?, rel, || {
                    format!("identifiable strictly below the infimum budget ({below})")
                });
                // ceiling is exact and tight at the infimum
                match identifiability_bound(n, &budget)? {
                    BoundValue::Exact(ceiling) => {
                        report.check(ceiling == lstar, rel, || {
                            format!("ceiling {ceiling} at the infimum budget is not tight against {lstar}")
                        });
                    }
                    BoundValue::Enclosure { .. } => {
                        report.check(false, rel, || {
                            "infimum-budget ceiling unexpectedly irrational".to_string()
                        });
                    }
                }
                // larger budgets keep dominating
                for extra in 1..=2usize {
                    let bigger = PrivacyBudget::log2(
                        eps.value.ratio()
                            * BigRational::new(BigInt::from(extra + 1), BigInt::one()),
                    )?;
                    report.check(ceiling_dominates(n, &bigger, &lstar)?, rel, || {
                        format!("ceiling at budget {bigger} fails to dominate {lstar}")
                    });
                }
            }
        }
        Ok(())
    };
    for rel in exhaustive_full_marginal_relations(4, 3) {
        run(&rel, &mut report)?;
    }
    for t in 0..cfg.trials {
        let rel = random_two_var(instance_seed(cfg.seed, t), 8, 8)?;
        run(&rel, &mut report)?;
    }
    Ok(report)
}

fn entropy_sum_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport::new(Campaign::EntropySum);
    for rel in exhaustive_full_marginal_relations(4, 3) {
        report.instances += 1;
        let bound = entropy_sum_bound(&rel, "X", "Y")?;
        report.check(bound.holds, &rel, || {
            format!("entropy-sum bound violated: {} > {}", bound.lhs, bound.rhs)
        });
    }
    for t in 0..cfg.trials {
        let seed = instance_seed(cfg.seed, t);
        let rel = random_two_var(seed, 8, 8)?;
        report.instances += 1;
        let bound = entropy_sum_bound(&rel, "X", "Y")?;
        report.check(bound.holds, &rel, || {
            format!(
                "entropy-sum bound violated: {} > {} (seed {seed})",
                bound.lhs, bound.rhs
            )
        });
    }
    Ok(report)
}

/// One random factor pair with a fully revealing output: some observation
/// pins the source down to a single symbol, which is the regime where
/// product leakage is exactly additive.
fn revealing_factor(seed: u64, index: usize) -> Result<Relation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = vec![rng.gen_range(2..=4usize), rng.gen_range(2..=3usize)];
    let names = vec![format!("X{index}"), format!("Y{index}")];
    let spec = InstanceSpec::new(sizes, density_from(&mut rng), seed)?;
    let rel = random_relation_named(&spec, &names)?;

    let xs: Vec<Symbol> = rel.marginal_set(&names[0])?.into_iter().collect();
    let pinned = xs[rng.gen_range(0..xs.len())].clone();
    let fresh = Symbol::new(format!("{}r", names[1].to_lowercase())).unwrap();
    let mut tuples: Vec<Vec<Symbol>> = rel.tuples().iter().cloned().collect();
    tuples.push(vec![pinned, fresh]);
    let names_ref: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Relation::from_tuples(&names_ref, tuples)
}

fn unconstrained_factor(seed: u64, index: usize) -> Result<Relation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = vec![rng.gen_range(2..=4usize), rng.gen_range(2..=3usize)];
    let names = vec![format!("X{index}"), format!("Y{index}")];
    let spec = InstanceSpec::new(sizes, density_from(&mut rng), seed)?;
    random_relation_named(&spec, &names)
}

/// Interleaves independent factor relations into one product relation
/// over `(X1..Xn, Y1..Yn)`; the factor pairs are mutually unrelated by
/// construction.
pub fn unrelated_product(factors: &[Relation]) -> Result<Relation> {
    if factors.is_empty() {
        return Err(Error::input("a product needs at least one factor"));
    }
    let mut x_names = Vec::new();
    let mut y_names = Vec::new();
    for f in factors {
        if f.variables().len() != 2 {
            return Err(Error::input(
                "product factors must be two-variable relations",
            ));
        }
        x_names.push(f.variables()[0].clone());
        y_names.push(f.variables()[1].clone());
    }
    let mut rows: Vec<(Vec<Symbol>, Vec<Symbol>)> = vec![(Vec::new(), Vec::new())];
    for f in factors {
        let mut next = Vec::new();
        for (xs, ys) in &rows {
            for t in f.tuples() {
                let mut nx = xs.clone();
                let mut ny = ys.clone();
                nx.push(t[0].clone());
                ny.push(t[1].clone());
                next.push((nx, ny));
            }
        }
        rows = next;
    }
    let names: Vec<String> = x_names.iter().chain(y_names.iter()).cloned().collect();
    let names_ref: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let tuples = rows
        .into_iter()
        .map(|(mut xs, ys)| {
            xs.extend(ys);
            xs
        })
        .collect();
    Relation::from_tuples(&names_ref, tuples)
}

fn additivity_sums(
    product: &Relation,
    factors: &[Relation],
) -> Result<(LeakageValue, LeakageValue, LeakageValue)> {
    let x_group: Vec<&str> = factors.iter().map(|f| f.variables()[0].as_str()).collect();
    let y_group: Vec<&str> = factors.iter().map(|f| f.variables()[1].as_str()).collect();
    let product_lstar = maximal_leakage(product, &x_group, &y_group)?;
    let mut sum_leakage = LeakageValue::zero();
    let mut sum_lstar = LeakageValue::zero();
    for f in factors {
        let x = f.variables()[0].as_str();
        let y = f.variables()[1].as_str();
        sum_leakage = &sum_leakage + &leakage(f, &[x], &[y])?.value;
        sum_lstar = &sum_lstar + &maximal_leakage(f, &[x], &[y])?;
    }
    Ok((product_lstar, sum_leakage, sum_lstar))
}

fn additivity_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport::new(Campaign::Additivity);
    for t in 0..cfg.trials {
        let seed = instance_seed(cfg.seed, t);
        let n_factors = 2 + (t % 2);
        let factors: Vec<Relation> = (1..=n_factors)
            .map(|i| revealing_factor(instance_seed(seed, i), i))
            .collect::<Result<_>>()?;
        let product = unrelated_product(&factors)?;
        report.instances += 1;

        let (product_lstar, sum_leakage, sum_lstar) = additivity_sums(&product, &factors)?;
        report.check(product_lstar == sum_leakage, &product, || {
            format!(
                "product maximal leakage {product_lstar} != factor leakage sum {sum_leakage} (seed {seed})"
            )
        });
        report.check(product_lstar == sum_lstar, &product, || {
            format!(
                "product maximal leakage {product_lstar} != factor maximal-leakage sum {sum_lstar} (seed {seed})"
            )
        });
    }

    // comparison sample without the revealing-output constraint: both
    // readings of the additivity identity can fail there, which is
    // reported as a finding rather than a violation.
    let sample = (cfg.trials / 10).max(5);
    let mut divergent = 0usize;
    for t in 0..sample {
        let seed = instance_seed(cfg.seed ^ 0xA11D, t);
        let factors: Vec<Relation> = (1..=2usize)
            .map(|i| unconstrained_factor(instance_seed(seed, i), i))
            .collect::<Result<_>>()?;
        let product = unrelated_product(&factors)?;
        let (product_lstar, sum_leakage, sum_lstar) = additivity_sums(&product, &factors)?;
        if product_lstar != sum_leakage || product_lstar != sum_lstar {
            divergent += 1;
            if report.notes.len() < 3 {
                report.notes.push(format!(
                    "unconstrained product (seed {seed}): product maximal leakage {product_lstar}, \
                     factor leakage sum {sum_leakage}, factor maximal-leakage sum {sum_lstar}; \
                     additivity holds exactly when some observation of every factor pins its source"
                ));
            }
        }
    }
    if divergent > 0 {
        report.notes.push(format!(
            "{divergent}/{sample} unconstrained products diverge from both factor sums; exact \
             additivity is specific to factors with a fully revealing output"
        ));
    }
    Ok(report)
}

fn maximin_symmetry_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport::new(Campaign::MaximinSymmetry);
    for rel in exhaustive_full_marginal_relations(4, 3) {
        report.instances += 1;
        let forward = overlap_partition(&rel, "X", "Y")?.block_count();
        let backward = overlap_partition(&rel, "Y", "X")?.block_count();
        report.check(forward == backward, &rel, || {
            format!("overlap counts differ: {forward} vs {backward}")
        });
    }
    for t in 0..cfg.trials {
        let seed = instance_seed(cfg.seed, t);
        let rel = random_two_var(seed, 8, 8)?;
        report.instances += 1;
        let forward = overlap_partition(&rel, "X", "Y")?.block_count();
        let backward = overlap_partition(&rel, "Y", "X")?.block_count();
        report.check(forward == backward, &rel, || {
            format!("overlap counts differ: {forward} vs {backward} (seed {seed})")
        });
    }
    Ok(report)
}

/// A seeded random exact rational distribution over the tuples of a
/// relation: positive integer weights normalized by their total.
pub fn random_distribution(rel: &Relation, seed: u64) -> RationalDist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<i64> = rel
        .tuples()
        .iter()
        .map(|_| rng.gen_range(1..=12i64))
        .collect();
    let total: i64 = raw.iter().sum();
    let weights = rel
        .tuples()
        .iter()
        .zip(raw)
        .map(|(t, w)| {
            (
                t.clone(),
                BigRational::new(BigInt::from(w), BigInt::from(total)),
            )
        })
        .collect();
    RationalDist::new(rel.clone(), weights).expect("weights normalize to one")
}

fn stochastic_nonneg_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport::new(Campaign::StochasticNonneg);
    for t in 0..cfg.trials {
        let seed = instance_seed(cfg.seed, t);
        let rel = random_two_var(seed, 6, 6)?;
        let dist = random_distribution(&rel, seed ^ 0xD157);
        report.instances += 1;
        let l = stochastic_bf_leakage(&dist, &["X"], &["Y"])?;
        report.check(!l.is_negative(), &rel, || {
            format!("negative stochastic guessing leakage {l} (seed {seed})")
        });
    }
    Ok(report)
}
