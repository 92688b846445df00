//! Acceptance suite: every release criterion as one test, printing one
//! pass/fail line each (run with `--nocapture` to see the lines).
//!
//! Criteria with runtime budgets assert them with `Instant`; all value
//! assertions are exact integer-argument equalities, zero tolerance.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num::{BigInt, BigRational, Signed};

use nsleak_core::maximin::{
    common_variable, maximin_info, overlap_partition, zero_error_capacity_bound,
};
use nsleak_core::measures::{
    ceiling_dominates, identifiability_bound, leakage, maximal_leakage, min_epsilon, BoundValue,
};
use nsleak_core::oracle::{
    exhaustive_full_marginal_relations, property_campaign, random_distribution, Campaign,
    CampaignConfig, CampaignReport, DEFAULT_PARTITION_CAP,
};
use nsleak_core::stochastic::{
    cond_guessing_entropy, guessing_entropy, maximal_stochastic_leakage, stochastic_bf_leakage,
    RationalDist, StochasticChannel,
};
use nsleak_core::uv::{Channel, Relation, Symbol};
use nsleak_core::value::LeakageValue;

fn criterion(number: usize, name: &str, f: impl FnOnce()) {
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let verdict = if outcome.is_ok() { "PASS" } else { "FAIL" };
    println!("acceptance criterion {number:2} [{name}]: {verdict}");
    if let Err(cause) = outcome {
        resume_unwind(cause);
    }
}

fn sym(text: &str) -> Symbol {
    Symbol::new(text).unwrap()
}

fn lv(num: usize, den: usize) -> LeakageValue {
    LeakageValue::from_cardinalities(num, den).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn reference_relation() -> Relation {
    Relation::from_tuples(
        &["X", "Y"],
        vec![
            vec![sym("x1"), sym("y1")],
            vec![sym("x2"), sym("y1")],
            vec![sym("x3"), sym("y2")],
        ],
    )
    .unwrap()
}

fn campaign_config(trials: usize) -> CampaignConfig {
    CampaignConfig {
        trials,
        seed: 20_260_810,
        partition_cap: DEFAULT_PARTITION_CAP,
    }
}

fn assert_clean(report: &CampaignReport) {
    assert!(
        report.passed(),
        "campaign {} reported violations: {:#?}",
        report.campaign.name(),
        report
            .violations
            .iter()
            .map(|v| v.description.clone())
            .collect::<Vec<_>>()
    );
}

#[test]
fn criterion_01_asymmetric_reference_values() {
    criterion(1, "reference instance, both directions, exact", || {
        let started = Instant::now();
        let rel = reference_relation();
        let forward = maximal_leakage(&rel, &["X"], &["Y"]).unwrap();
        let backward = maximal_leakage(&rel, &["Y"], &["X"]).unwrap();
        let elapsed = started.elapsed();
        assert_eq!(forward, lv(3, 1));
        assert_eq!(backward, lv(2, 1));
        assert!(
            elapsed < Duration::from_millis(1),
            "took {elapsed:?}, budget is 1ms"
        );
    });
}

#[test]
fn criterion_02_closed_form_equals_exhaustive_search() {
    criterion(
        2,
        "closed form vs attribute search, exhaustive + 1000 seeded",
        || {
            let started = Instant::now();
            let report = property_campaign(Campaign::ClosedForm, &campaign_config(1000)).unwrap();
            assert_clean(&report);
            // exhaustive small family plus the seeded random family
            assert!(report.instances > 1000);
            let elapsed = started.elapsed();
            assert!(
                elapsed < Duration::from_secs(60),
                "took {elapsed:?}, budget is 60s"
            );
        },
    );
}

#[test]
fn criterion_03_one_shot_supremum_equals_maximin() {
    criterion(
        3,
        "one-shot search vs overlap count, exhaustive + 1000 seeded",
        || {
            let started = Instant::now();
            let report = property_campaign(Campaign::OneShot, &campaign_config(1000)).unwrap();
            assert_clean(&report);
            assert!(report.instances > 1000);
            let elapsed = started.elapsed();
            assert!(
                elapsed < Duration::from_secs(60),
                "took {elapsed:?}, budget is 60s"
            );
        },
    );
}

#[test]
fn criterion_04_post_processing_cannot_increase_leakage() {
    criterion(
        4,
        "1000 seeded chains, attribute and maximal leakage",
        || {
            let report = property_campaign(Campaign::Dpi, &campaign_config(1000)).unwrap();
            assert_clean(&report);
            assert_eq!(report.instances, 1000);
        },
    );
}

#[test]
fn criterion_05_sign_zero_and_cap_properties() {
    criterion(
        5,
        "non-negativity, zero iff unrelated, identity cap",
        || {
            let report = property_campaign(Campaign::Properties, &campaign_config(500)).unwrap();
            assert_clean(&report);
            let report = property_campaign(Campaign::Bounding, &campaign_config(500)).unwrap();
            assert_clean(&report);

            // zero iff unrelated, exhaustively on the larger small family too
            for rel in exhaustive_full_marginal_relations(4, 3) {
                let ls = maximal_leakage(&rel, &["X"], &["Y"]).unwrap();
                assert_eq!(ls.is_zero(), rel.is_unrelated(&["X"], &["Y"]).unwrap());
            }

            // identity channel attains the cap for every size in 1..=8
            for n in 1..=8usize {
                let tuples = (1..=n)
                    .map(|i| vec![sym(&format!("x{i}")), sym(&format!("x{i}"))])
                    .collect();
                let rel = Relation::from_tuples(&["X", "Y"], tuples).unwrap();
                assert_eq!(
                    maximal_leakage(&rel, &["X"], &["Y"]).unwrap(),
                    LeakageValue::from_count(n).unwrap()
                );
            }
        },
    );
}

#[test]
fn criterion_06_product_additivity() {
    criterion(
        6,
        "200 seeded unrelated products, exact factor-sum equality",
        || {
            let report = property_campaign(Campaign::Additivity, &campaign_config(200)).unwrap();
            assert_clean(&report);
            assert_eq!(report.instances, 200);
        },
    );
}

#[test]
fn criterion_07_identifiability_ceiling_and_entropy_sum_bound() {
    criterion(
        7,
        "ceiling tight at the infimum budget; entropy-sum bound",
        || {
            let report =
                property_campaign(Campaign::Identifiability, &campaign_config(500)).unwrap();
            assert_clean(&report);
            let report = property_campaign(Campaign::EntropySum, &campaign_config(500)).unwrap();
            assert_clean(&report);

            // the tightness identity spelled out on the exhaustive family
            for rel in exhaustive_full_marginal_relations(4, 3) {
                let lstar = maximal_leakage(&rel, &["X"], &["Y"]).unwrap();
                let eps = min_epsilon(&rel, &["X"], &["Y"]).unwrap();
                let n = rel.marginal_set("X").unwrap().len();
                match eps.as_budget() {
                    Some(budget) => {
                        match identifiability_bound(n, &budget).unwrap() {
                            BoundValue::Exact(ceiling) => assert_eq!(ceiling, lstar),
                            BoundValue::Enclosure { .. } => panic!("infimum ceiling must be exact"),
                        }
                        assert!(ceiling_dominates(n, &budget, &lstar).unwrap());
                    }
                    None => assert!(lstar.is_zero()),
                }
            }
        },
    );
}

#[test]
fn criterion_08_maximin_machinery() {
    criterion(
        8,
        "partition validity, uniqueness, symmetry, common variable",
        || {
            let report =
                property_campaign(Campaign::MaximinSymmetry, &campaign_config(1000)).unwrap();
            assert_clean(&report);

            for rel in exhaustive_full_marginal_relations(4, 3) {
                let p = overlap_partition(&rel, "X", "Y").unwrap();

                // valid: non-empty disjoint covering blocks
                let mut seen = BTreeSet::new();
                for b in p.blocks() {
                    assert!(!b.is_empty());
                    for s in b {
                        assert!(seen.insert(s.clone()));
                    }
                }
                assert_eq!(seen, rel.marginal_set("X").unwrap());

                // unique: recomputation under a symbol re-ordering maps along
                let rename = |s: &Symbol| sym(&format!("zz_{s}"));
                let renamed = Relation::from_tuples(
                    &["X", "Y"],
                    rel.tuples()
                        .iter()
                        .map(|t| vec![rename(&t[0]), t[1].clone()])
                        .collect(),
                )
                .unwrap();
                let q = overlap_partition(&renamed, "X", "Y").unwrap();
                let mapped: BTreeSet<BTreeSet<Symbol>> = p
                    .blocks()
                    .iter()
                    .map(|b| b.iter().map(&rename).collect())
                    .collect();
                assert_eq!(mapped, q.blocks().iter().cloned().collect::<BTreeSet<_>>());

                // symmetry of the count
                assert_eq!(
                    p.block_count(),
                    overlap_partition(&rel, "Y", "X").unwrap().block_count()
                );

                // the common variable answers every observation in one guess
                let g = common_variable(&rel, "X", "Y").unwrap();
                let extended = rel.apply_attribute(&g, "X", "U").unwrap();
                for y in extended.marginal_set("Y").unwrap() {
                    assert_eq!(extended.conditional_set("U", "Y", &y).unwrap().len(), 1);
                }
                assert_eq!(extended.marginal_set("U").unwrap().len(), p.block_count());
            }
        },
    );
}

#[test]
fn criterion_09_stochastic_suite() {
    criterion(
        9,
        "guessing entropies, reference leakages, Sibson value",
        || {
            // uniform guessing entropy closed form up to 16
            for n in 1..=16i64 {
                let dist: std::collections::BTreeMap<Vec<Symbol>, BigRational> = (0..n)
                    .map(|i| (vec![sym(&format!("s{i:02}"))], rat(1, n)))
                    .collect();
                assert_eq!(guessing_entropy(&dist).unwrap(), rat(n + 1, 2));
            }

            // uniform reference instance: exact conditional entropies and leakage
            let dist = RationalDist::uniform(reference_relation());
            assert_eq!(
                cond_guessing_entropy(&dist, &["X"], &[("Y", &sym("y1"))]).unwrap(),
                rat(3, 2)
            );
            assert_eq!(
                cond_guessing_entropy(&dist, &["X"], &[("Y", &sym("y2"))]).unwrap(),
                rat(1, 1)
            );
            assert_eq!(
                stochastic_bf_leakage(&dist, &["X"], &["Y"]).unwrap(),
                rat(2, 3)
            );

            // the binary rows reference value
            let rows: std::collections::BTreeMap<
                Symbol,
                std::collections::BTreeMap<Symbol, BigRational>,
            > = [
                (
                    sym("x1"),
                    [(sym("y1"), rat(3, 4)), (sym("y2"), rat(1, 4))].into(),
                ),
                (
                    sym("x2"),
                    [(sym("y1"), rat(1, 4)), (sym("y2"), rat(3, 4))].into(),
                ),
            ]
            .into();
            let ch = StochasticChannel::new("X", "Y", rows).unwrap();
            assert_eq!(
                maximal_stochastic_leakage(&ch, &ch.source_alphabet()).unwrap(),
                lv(3, 2)
            );

            // non-negativity over 1000 seeded rational distributions
            let report =
                property_campaign(Campaign::StochasticNonneg, &campaign_config(1000)).unwrap();
            assert_clean(&report);
            assert_eq!(report.instances, 1000);

            // direct spot check that the expectation really is the weighted one
            let d = random_distribution(&reference_relation(), 99);
            assert!(!stochastic_bf_leakage(&d, &["X"], &["Y"])
                .unwrap()
                .is_negative());
        },
    );
}

#[test]
fn criterion_10_capacity_bound() {
    criterion(
        10,
        "capacity bound, witness, dominations, noiseless family",
        || {
            let rel = reference_relation();
            let ch = rel.channel("X", "Y").unwrap();
            let alphabet: BTreeSet<Symbol> = [sym("x1"), sym("x2"), sym("x3")].into();
            let bound = zero_error_capacity_bound(&alphabet, &ch, 16).unwrap();
            assert_eq!(bound.value, lv(2, 1));
            assert_eq!(
                bound.witness,
                [sym("x1"), sym("x3")].into_iter().collect::<BTreeSet<_>>()
            );
            assert!(bound.leakage_dominates);
            assert!(bound.ceiling_holds);

            // the two dominations on every exhaustive small channel
            for rel in exhaustive_full_marginal_relations(3, 3) {
                let ch = rel.channel("X", "Y").unwrap();
                let alphabet = rel.marginal_set("X").unwrap();
                let b = zero_error_capacity_bound(&alphabet, &ch, 16).unwrap();
                assert!(b.leakage_dominates);
                assert!(b.ceiling_holds);
                // the capacity bound never exceeds the maximin info ceiling
                // given by the full relation's own maximal leakage supremum
                assert!(b.value <= b.sup_maximal_leakage);
            }

            // noiseless channels: capacity log2(n) up to 12 symbols
            for n in 1..=12usize {
                let map = (1..=n)
                    .map(|i| {
                        (
                            sym(&format!("x{i:02}")),
                            [sym(&format!("y{i:02}"))].into_iter().collect(),
                        )
                    })
                    .collect();
                let ch = Channel::new("X", "Y", map).unwrap();
                let alphabet: BTreeSet<Symbol> =
                    (1..=n).map(|i| sym(&format!("x{i:02}"))).collect();
                let b = zero_error_capacity_bound(&alphabet, &ch, 16).unwrap();
                assert_eq!(b.value, LeakageValue::from_count(n).unwrap());
            }

            // maximin info of the winning subset really is the bound value,
            // and is dominated by the sub-relation's own maximal leakage
            let winning = ch.relation_over(&bound.witness).unwrap();
            let info = maximin_info(&winning, "X", "Y").unwrap();
            assert_eq!(info, bound.value);
            assert!(info <= maximal_leakage(&winning, &["X"], &["Y"]).unwrap());
            assert!(leakage(&winning, &["X"], &["Y"]).unwrap().value <= bound.sup_maximal_leakage);
        },
    );
}
