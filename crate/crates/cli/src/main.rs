//! `nsleak`: exact information-leakage analysis of finite uncertain
//! variables.
//!
//! Exit codes: 0 success (audit passed, no violations), 1 audit failure
//! or property violation found, 2 input error, 3 incompatible evidence.

mod report;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nsleak_core::error::Error;
use nsleak_core::fileio::{
    attribute_to_json, channel_from_json, distribution_from_json, relation_from_json,
    relation_to_json, AttributeFile, RelationFile,
};
use nsleak_core::maximin::{
    common_variable, maximin_info, overlap_partition, zero_error_capacity_bound,
    DEFAULT_ALPHABET_CAP,
};
use nsleak_core::measures::{
    h0, h0_cond, i0, identifiability_bound, is_identifiable, leakage, maximal_leakage, min_epsilon,
    worst_attribute, BoundValue, PrivacyBudget,
};
use nsleak_core::oracle::{
    property_campaign, random_relation, Campaign, CampaignConfig, InstanceSpec,
    DEFAULT_PARTITION_CAP,
};
use nsleak_core::stochastic::{
    cond_guessing_entropy, entropy_sum_bound, guessing_entropy, maximal_stochastic_leakage,
    stochastic_bf_leakage, StochasticChannel,
};
use nsleak_core::uv::{compose_markov, Relation, Symbol};
use nsleak_core::value::parse_rational;

use report::{
    AuditBlock, AuditReport, CampaignFinding, CapacityReport, CheckLine, InstanceSummary,
    MaximinReport, MeasureReport, NamedValue, OracleReport, StochasticBlock, ValueCell,
    WitnessBlock,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "nsleak",
    version,
    about = "Exact non-stochastic information-leakage analysis"
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Cap on the brute-force partition search ground set.
    #[arg(long, global = true, default_value_t = DEFAULT_PARTITION_CAP)]
    max_partition_cap: usize,

    /// Cap on the capacity subset-search alphabet.
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHABET_CAP)]
    max_alphabet: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute every measure of a relation: entropies, leakages, maximin
    /// information, the identifiability infimum, and the bound checks.
    Measure(MeasureArgs),
    /// Build the attribute achieving maximal leakage and write it out.
    WorstAttribute(WorstAttributeArgs),
    /// Check identifiability against a privacy budget.
    Audit(AuditArgs),
    /// Overlap partition, maximin information and the common variable.
    Maximin(PairArgs),
    /// Zero-error capacity bound of a channel by exhaustive subset search.
    Capacity(CapacityArgs),
    /// Chain a single-variable range through channels into a relation.
    Compose(ComposeArgs),
    /// Brute-force verification campaigns.
    Oracle(OracleArgs),
    /// Generate a seeded random relation with full marginals.
    Random(RandomArgs),
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Relation file (JSON).
    relation: PathBuf,
    /// Source (protected) variable.
    #[arg(short = 'x', long)]
    x: String,
    /// Observed variable.
    #[arg(short = 'y', long)]
    y: String,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Optional privacy budget to audit against, e.g. "log2(3)" or "1/2".
    #[arg(long)]
    epsilon: Option<String>,
    /// Optional distribution file enabling the stochastic block.
    #[arg(long)]
    dist: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WorstAttributeArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Output attribute file.
    #[arg(short = 'o', long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct AuditArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Privacy budget, e.g. "log2(3)", "3/2" or "0.5".
    #[arg(long)]
    epsilon: String,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    /// Channel file (JSON).
    channel: PathBuf,
}

#[derive(Debug, Args)]
struct ComposeArgs {
    /// Single-variable relation file: the base range.
    base: PathBuf,
    /// Channel files, applied in order.
    #[arg(required = true)]
    channels: Vec<PathBuf>,
    /// Output relation file.
    #[arg(short = 'o', long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(subcommand)]
    command: OracleCommand,
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Run one verification campaign and report violations.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Campaign name: dpi, bounding, properties, closed-form, one-shot,
    /// identifiability, prop6, additivity, maximin-symmetry,
    /// stochastic-nonneg.
    #[arg(long)]
    prop: String,
    /// Random trials in the campaign.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Directory for counterexample files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct RandomArgs {
    /// Comma-separated per-variable range sizes, e.g. "4,3".
    #[arg(long)]
    sizes: String,
    /// Fill density in (0, 1], e.g. "1/2".
    #[arg(long, default_value = "1/2")]
    density: String,
    /// Output relation file (stdout when omitted).
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 2 for malformed input of any kind, 3 for conditioning evidence that no
/// tuple realizes.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::IncompatibleEvidence(_) => 3,
        Error::Input(_) | Error::SearchCap { .. } => 2,
    }
}

fn read_to_string(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_string(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_relation(path: &Path) -> Result<Relation, Error> {
    relation_from_json(&read_to_string(path)?)
}

fn instance_summary(rel: &Relation) -> Result<InstanceSummary, Error> {
    let variables = rel
        .variables()
        .iter()
        .map(|v| Ok((v.clone(), rel.marginal_set(v)?.len())))
        .collect::<Result<_, Error>>()?;
    Ok(InstanceSummary {
        variables,
        tuples: rel.tuples().len(),
        duplicates_dropped: rel.duplicates_dropped(),
    })
}

fn emit<T: serde::Serialize>(format: Format, report: &T, human: String) {
    match format {
        Format::Human => print!("{human}"),
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(report).expect("reports serialize")
            );
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Measure(args) => cmd_measure(cli, args),
        Command::WorstAttribute(args) => cmd_worst_attribute(cli, args),
        Command::Audit(args) => cmd_audit(cli, args),
        Command::Maximin(args) => cmd_maximin(cli, args),
        Command::Capacity(args) => cmd_capacity(cli, args),
        Command::Compose(args) => cmd_compose(args),
        Command::Oracle(args) => match &args.command {
            OracleCommand::Verify(v) => cmd_oracle_verify(cli, v),
        },
        Command::Random(args) => cmd_random(cli, args),
    }
}

fn join_symbols(t: &[Symbol]) -> String {
    t.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("|")
}

fn cmd_measure(cli: &Cli, args: &MeasureArgs) -> Result<ExitCode, Error> {
    let rel = load_relation(&args.pair.relation)?;
    let x = args.pair.x.as_str();
    let y = args.pair.y.as_str();

    let h0_x = h0(&rel.marginal_set(x)?)?;
    let h0_y = h0(&rel.marginal_set(y)?)?;
    let h0_cond_xy = h0_cond(&rel, &[x], &[y])?;
    let i0_xy = i0(&rel, &[x], &[y])?;
    let l = leakage(&rel, &[x], &[y])?;
    let lstar_xy = maximal_leakage(&rel, &[x], &[y])?;
    let lstar_yx = maximal_leakage(&rel, &[y], &[x])?;
    let info = maximin_info(&rel, x, y)?;
    let eps = min_epsilon(&rel, &[x], &[y])?;
    let worst = worst_attribute(&rel, x, y)?;
    let partition = overlap_partition(&rel, x, y)?;

    let measures = vec![
        NamedValue {
            name: format!("H0({x})"),
            value: ValueCell::from_value(&h0_x),
        },
        NamedValue {
            name: format!("H0({y})"),
            value: ValueCell::from_value(&h0_y),
        },
        NamedValue {
            name: format!("H0({x}|{y})"),
            value: ValueCell::from_value(&h0_cond_xy),
        },
        NamedValue {
            name: format!("I0({x};{y})"),
            value: ValueCell::from_value(&i0_xy),
        },
        NamedValue {
            name: format!("L({x}->{y})"),
            value: ValueCell::from_value(&l.value),
        },
        NamedValue {
            name: format!("L*({x}->{y})"),
            value: ValueCell::from_value(&lstar_xy),
        },
        NamedValue {
            name: format!("L*({y}->{x})"),
            value: ValueCell::from_value(&lstar_yx),
        },
        NamedValue {
            name: format!("I*({x};{y})"),
            value: ValueCell::from_value(&info),
        },
        NamedValue {
            name: "min_epsilon".to_string(),
            value: ValueCell::from_value(&eps.value),
        },
    ];

    let mut checks = Vec::new();
    let n = rel.marginal_set(x)?.len();
    match eps.as_budget() {
        Some(budget) => {
            let ceiling = identifiability_bound(n, &budget)?;
            let tight = matches!(&ceiling, BoundValue::Exact(v) if v == &lstar_xy);
            checks.push(CheckLine {
                name: "leakage ceiling at min_epsilon is tight".to_string(),
                lhs: lstar_xy.to_string(),
                rhs: ceiling.exact_string(),
                holds: tight,
            });
        }
        None => {
            checks.push(CheckLine {
                name: "open-bound budget implies zero maximal leakage".to_string(),
                lhs: lstar_xy.to_string(),
                rhs: "log2(1)".to_string(),
                holds: lstar_xy.is_zero(),
            });
        }
    }
    let esb = entropy_sum_bound(&rel, x, y)?;
    checks.push(CheckLine {
        name: "maximal leakage <= output entropy + conditional entropy".to_string(),
        lhs: esb.lhs.to_string(),
        rhs: esb.rhs.to_string(),
        holds: esb.holds,
    });

    let audit = match &args.epsilon {
        Some(text) => {
            let budget = PrivacyBudget::parse(text)?;
            let identifiable = is_identifiable(&rel, &[x], &[y], &budget)?;
            let ceiling = identifiability_bound(n, &budget)?;
            Some(AuditBlock {
                epsilon: budget.to_string(),
                identifiable,
                ceiling: ValueCell::from_bound(&ceiling),
            })
        }
        None => None,
    };

    let stochastic = match &args.dist {
        Some(path) => {
            let dist = distribution_from_json(&rel, &read_to_string(path)?)?;
            let prior = guessing_entropy(&dist.marginal(&[x])?)?;
            let mut conditional = Vec::new();
            let mut expected = num::BigRational::from_integer(0.into());
            for (yv, py) in dist.marginal(&[y])? {
                let hg = cond_guessing_entropy(&dist, &[x], &[(y, &yv[0])])?;
                expected += &py * &hg;
                conditional.push(NamedValue {
                    name: format!("{y}={}", yv[0]),
                    value: ValueCell::from_rational(&hg),
                });
            }
            let bf = stochastic_bf_leakage(&dist, &[x], &[y])?;
            let channel = StochasticChannel::from_dist(&dist, x, y)?;
            let sibson = maximal_stochastic_leakage(&channel, &channel.source_alphabet())?;
            Some(StochasticBlock {
                guessing_entropy: ValueCell::from_rational(&prior),
                conditional_guessing_entropy: conditional,
                expected_posterior_guessing_entropy: ValueCell::from_rational(&expected),
                bf_leakage: ValueCell::from_rational(&bf),
                sibson_infinity: ValueCell::from_value(&sibson),
            })
        }
        None => None,
    };

    let report = MeasureReport {
        instance: instance_summary(&rel)?,
        measures,
        min_epsilon_open_bound: eps.open_bound,
        witnesses: WitnessBlock {
            argmin_observation: join_symbols(&l.witness),
            worst_attribute: AttributeFile::from_attribute(
                &worst.attribute,
                Some(worst.achieved.clone()),
            ),
            overlap_partition: partition
                .blocks()
                .iter()
                .map(|b| b.iter().map(|s| s.to_string()).collect())
                .collect(),
        },
        checks,
        audit,
        stochastic,
    };

    let ok = report.all_checks_pass();
    let human = report.render_human();
    emit(cli.format, &report, human);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_worst_attribute(cli: &Cli, args: &WorstAttributeArgs) -> Result<ExitCode, Error> {
    let rel = load_relation(&args.pair.relation)?;
    let worst = worst_attribute(&rel, &args.pair.x, &args.pair.y)?;
    let text = attribute_to_json(&worst.attribute, Some(worst.achieved.clone()));
    write_string(&args.output, &text)?;
    let file = AttributeFile::from_attribute(&worst.attribute, Some(worst.achieved.clone()));
    let human = format!(
        "wrote {} ({} symbols, collapses the range at {}={}, achieves {} = {})\n",
        args.output.display(),
        worst.attribute.domain().len(),
        args.pair.y,
        worst.y_star,
        worst.achieved,
        worst.achieved.decimal()
    );
    emit(cli.format, &file, human);
    Ok(ExitCode::SUCCESS)
}

fn cmd_audit(cli: &Cli, args: &AuditArgs) -> Result<ExitCode, Error> {
    let rel = load_relation(&args.pair.relation)?;
    let x = args.pair.x.as_str();
    let y = args.pair.y.as_str();
    let budget = PrivacyBudget::parse(&args.epsilon)?;
    let identifiable = is_identifiable(&rel, &[x], &[y], &budget)?;
    let eps = min_epsilon(&rel, &[x], &[y])?;
    let n = rel.marginal_set(x)?.len();
    let ceiling = identifiability_bound(n, &budget)?;
    let report = AuditReport {
        epsilon: budget.to_string(),
        identifiable,
        min_epsilon: ValueCell::from_value(&eps.value),
        min_epsilon_open_bound: eps.open_bound,
        ceiling: ValueCell::from_bound(&ceiling),
    };
    let human = report.render_human();
    emit(cli.format, &report, human);
    Ok(if identifiable {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_maximin(cli: &Cli, args: &PairArgs) -> Result<ExitCode, Error> {
    let rel = load_relation(&args.relation)?;
    let x = args.x.as_str();
    let y = args.y.as_str();
    let forward = maximin_info(&rel, x, y)?;
    let backward = maximin_info(&rel, y, x)?;
    let partition = overlap_partition(&rel, x, y)?;
    let common = common_variable(&rel, x, y)?;
    let lstar = maximal_leakage(&rel, &[x], &[y])?;
    let report = MaximinReport {
        instance: instance_summary(&rel)?,
        symmetric: forward == backward,
        forward: ValueCell::from_value(&forward),
        backward: ValueCell::from_value(&backward),
        partition: partition
            .blocks()
            .iter()
            .map(|b| b.iter().map(|s| s.to_string()).collect())
            .collect(),
        common_variable: common
            .entries()
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        one_shot_supremum: ValueCell::from_value(&forward),
        dominated: forward <= lstar,
        maximal_leakage: ValueCell::from_value(&lstar),
    };
    let ok = report.symmetric && report.dominated;
    let human = report.render_human();
    emit(cli.format, &report, human);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_capacity(cli: &Cli, args: &CapacityArgs) -> Result<ExitCode, Error> {
    let channel = channel_from_json(&read_to_string(&args.channel)?)?;
    let alphabet: BTreeSet<Symbol> = channel.map().keys().cloned().collect();
    let bound = zero_error_capacity_bound(&alphabet, &channel, cli.max_alphabet)?;
    let report = CapacityReport {
        alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
        bound: ValueCell::from_value(&bound.value),
        witness: bound.witness.iter().map(|s| s.to_string()).collect(),
        sup_maximal_leakage: ValueCell::from_value(&bound.sup_maximal_leakage),
        leakage_dominates: bound.leakage_dominates,
        min_epsilon: ValueCell::from_value(&bound.min_epsilon.value),
        min_epsilon_open_bound: bound.min_epsilon.open_bound,
        ceiling: ValueCell::from_bound(&bound.ceiling),
        ceiling_holds: bound.ceiling_holds,
    };
    let ok = report.leakage_dominates && report.ceiling_holds;
    let human = report.render_human();
    emit(cli.format, &report, human);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_compose(args: &ComposeArgs) -> Result<ExitCode, Error> {
    let base = load_relation(&args.base)?;
    if base.variables().len() != 1 {
        return Err(Error::Input(format!(
            "base relation must have exactly one variable, found {}",
            base.variables().len()
        )));
    }
    let channels = args
        .channels
        .iter()
        .map(|p| channel_from_json(&read_to_string(p)?))
        .collect::<Result<Vec<_>, Error>>()?;
    let refs: Vec<&_> = channels.iter().collect();
    let composed = compose_markov(&base, &refs)?;
    write_string(&args.output, &relation_to_json(&composed))?;
    println!(
        "wrote {} ({} variables, {} tuples)",
        args.output.display(),
        composed.variables().len(),
        composed.tuples().len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle_verify(cli: &Cli, args: &VerifyArgs) -> Result<ExitCode, Error> {
    let campaign = Campaign::parse(&args.prop)?;
    if cli.max_partition_cap > DEFAULT_PARTITION_CAP {
        eprintln!(
            "warning: partition cap raised to {}; the search space grows as the Bell numbers \
             (B({}) = 115975 already)",
            cli.max_partition_cap, DEFAULT_PARTITION_CAP
        );
    }
    let cfg = CampaignConfig {
        trials: args.trials,
        seed: cli.seed,
        partition_cap: cli.max_partition_cap,
    };
    let outcome = property_campaign(campaign, &cfg)?;
    let mut findings = Vec::new();
    for (i, violation) in outcome.violations.iter().enumerate() {
        let path = args
            .out_dir
            .join(format!("counterexample-{}-{i}.json", campaign.name()));
        write_string(&path, &relation_to_json(&violation.relation))?;
        findings.push(CampaignFinding {
            description: violation.description.clone(),
            counterexample_file: Some(path.display().to_string()),
            relation: RelationFile::from_relation(&violation.relation),
        });
    }
    let report = OracleReport {
        campaign: campaign.name().to_string(),
        claim: campaign.claim().to_string(),
        trials: cfg.trials,
        instances: outcome.instances,
        checks: outcome.checks,
        violations: findings,
        notes: outcome.notes.clone(),
        passed: outcome.passed(),
    };
    let ok = report.passed;
    let human = report.render_human();
    emit(cli.format, &report, human);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_random(cli: &Cli, args: &RandomArgs) -> Result<ExitCode, Error> {
    let sizes = args
        .sizes
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|e| Error::Input(format!("bad size {p:?}: {e}")))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let density = parse_rational(&args.density)?;
    let spec = InstanceSpec::new(sizes, density, cli.seed)?;
    let rel = random_relation(&spec)?;
    let text = relation_to_json(&rel);
    match &args.output {
        Some(path) => {
            write_string(path, &text)?;
            println!(
                "wrote {} ({} tuples, seed {})",
                path.display(),
                rel.tuples().len(),
                cli.seed
            );
        }
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
