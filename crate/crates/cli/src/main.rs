use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use gmms_core::algorithms::SearchLimits;
use gmms_core::experiment::{run_experiment, write_csv, ExperimentConfig, CSV_SCHEMA_VERSION};
use gmms_core::fixtures::appendix_a_policy;
use gmms_core::generator::{serialize_gen_spec, RNG_NAME};
use gmms_core::{
    check, efl_allocate, gmms_factor, gmms_threshold, mms, paper_fixture, parse_allocation, parse_gen_spec,
    parse_instance, parse_policy, serialize_allocation, serialize_instance, Distribution, Fixture, GenSpec,
    Notion, SearchStatus, TieBreakPolicy, Value,
};

/// Decimal digits shown next to exact values.
const SIG: usize = 6;

/// Environment variable holding the experiment worker count.
const WORKERS_ENV: &str = "GMMS_WORKERS";

#[derive(Parser)]
#[command(name = "gmms", version, about = "Groupwise maximin share fair division toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the envy-graph EFL algorithm; prints the allocation and its GMMS factor.
    SolveEfl {
        instance: PathBuf,
        /// Tie-break script {"sources":[..],"goods":[..]}.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Write the allocation here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a fairness notion; exit 0 if it holds, 1 if violated.
    Check {
        instance: PathBuf,
        allocation: PathBuf,
        #[arg(long, value_enum)]
        notion: NotionArg,
        /// Group size for --notion kwise.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Maximin share of one agent with its witness partition.
    Mms {
        instance: PathBuf,
        #[arg(long)]
        agent: usize,
    },
    /// Groupwise threshold of one agent under an allocation.
    GmmsThreshold {
        instance: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
        #[arg(long)]
        agent: usize,
    },
    /// Exhaustive search for a GMMS allocation; exit 0 found, 1 none exists, 3 budget hit.
    GmmsSearch {
        instance: PathBuf,
        /// Maximum number of complete assignments to examine.
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long)]
        time_limit_ms: Option<u64>,
        /// Write the allocation found here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random instance from flags or a spec document.
    Gen {
        /// GenSpec JSON document; replaces the other flags.
        #[arg(long, conflicts_with_all = ["agents", "goods", "dist", "sop", "seed", "quantization"])]
        spec: Option<PathBuf>,
        #[arg(long, required_unless_present = "spec")]
        agents: Option<usize>,
        #[arg(long, required_unless_present = "spec")]
        goods: Option<usize>,
        #[arg(long, value_enum, default_value_t = DistArg::Uniform01)]
        dist: DistArg,
        #[arg(long)]
        sop: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        quantization: u32,
        /// Also write the effective spec document here.
        #[arg(long)]
        spec_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a worked-example instance and its reference allocation.
    Fixture {
        #[arg(value_enum)]
        name: FixtureArg,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// V for sec3 (integer, decimal or p/q).
        #[arg(long)]
        v: Option<String>,
        /// epsilon for sec3 (integer, decimal or p/q).
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allocation_out: Option<PathBuf>,
        /// appendix-a only: the tie-break script that leads to the reference allocation.
        #[arg(long)]
        policy_out: Option<PathBuf>,
    },
    /// Run the random-instance grid and write CSV.
    Experiment {
        /// Agent counts, e.g. 3-5.
        #[arg(long, default_value = "3-5")]
        agents: String,
        /// Good counts, e.g. 3-11.
        #[arg(long, default_value = "3-11")]
        goods: String,
        #[arg(long, value_enum, default_value_t = DistArg::Uniform01)]
        dist: DistArg,
        #[arg(long)]
        sop: bool,
        /// Instances per (n, m) cell.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Seed of the first instance; each further instance adds 1.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Leaf budget for the exact search per instance; 0 skips the search.
        #[arg(long, default_value_t = 0)]
        budget: u64,
        #[arg(long)]
        time_limit_ms: Option<u64>,
        /// Write 0 in the timing columns so output is byte-identical across runs.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NotionArg {
    Ef,
    Ef1,
    Efx,
    Efl,
    Mms,
    Pmms,
    Kwise,
    Gmms,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform01,
    Gaussian,
}

impl From<DistArg> for Distribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Uniform01 => Distribution::Uniform01,
            DistArg::Gaussian => Distribution::Gaussian,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureArg {
    Sec21,
    Sec3,
    Sec4MmsNotEf1,
    AppendixA,
    SingleGoodTwoAgents,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn pretty(v: serde_json::Value) -> Vec<u8> {
    let mut out = serde_json::to_vec(&v).expect("json serializes");
    out.push(b'\n');
    out
}

fn exact(v: &Value) -> serde_json::Value {
    json!({ "value": v.to_ratio_string(), "decimal": v.to_decimal(SIG) })
}

fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let (lo, hi) = match text.split_once('-') {
        Some((a, b)) => (a.trim().parse()?, b.trim().parse()?),
        None => {
            let v = text.trim().parse()?;
            (v, v)
        }
    };
    if lo > hi {
        bail!("empty range {text:?}");
    }
    Ok(lo..=hi)
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::SolveEfl { instance, policy, out } => {
            let inst = parse_instance(&read(&instance)?)?;
            let policy = match policy {
                Some(p) => parse_policy(&read(&p)?)?,
                None => TieBreakPolicy::lowest_index(),
            };
            let alloc = efl_allocate(&inst, &policy)?;
            let factor = gmms_factor(&inst, &alloc)?;
            assert!(
                factor.at_least(&Value::from_ratio(1, 2)),
                "EFL allocation with GMMS factor {factor} below 1/2"
            );
            emit(out.as_deref(), &serialize_allocation(&alloc))?;
            eprintln!("gmms_factor {} ({})", factor, factor.to_decimal(SIG));
            Ok(0)
        }
        Command::Check {
            instance,
            allocation,
            notion,
            k,
        } => {
            let inst = parse_instance(&read(&instance)?)?;
            let alloc = parse_allocation(&read(&allocation)?)?;
            let notion = match (notion, k) {
                (NotionArg::Kwise, Some(k)) => Notion::Kwise(k),
                (NotionArg::Kwise, None) => bail!("--notion kwise needs --k"),
                (_, Some(_)) => bail!("--k only applies to --notion kwise"),
                (NotionArg::Ef, None) => Notion::Ef,
                (NotionArg::Ef1, None) => Notion::Ef1,
                (NotionArg::Efx, None) => Notion::Efx,
                (NotionArg::Efl, None) => Notion::Efl,
                (NotionArg::Mms, None) => Notion::Mms,
                (NotionArg::Pmms, None) => Notion::Pmms,
                (NotionArg::Gmms, None) => Notion::Gmms,
            };
            let report = check(&inst, &alloc, notion)?;
            emit(None, &report.to_json())?;
            Ok(if report.holds { 0 } else { 1 })
        }
        Command::Mms { instance, agent } => {
            let inst = parse_instance(&read(&instance)?)?;
            let r = mms(&inst, agent)?;
            let mut doc = exact(&r.value);
            doc["agent"] = json!(agent);
            doc["partition"] = serde_json::to_value(&r.witness)?;
            emit(None, &pretty(doc))?;
            Ok(0)
        }
        Command::GmmsThreshold {
            instance,
            allocation,
            agent,
        } => {
            let inst = parse_instance(&read(&instance)?)?;
            let alloc = parse_allocation(&read(&allocation)?)?;
            let t = gmms_threshold(&inst, &alloc, agent)?;
            let mut doc = exact(&t.value);
            doc["agent"] = json!(agent);
            doc["group"] = json!(t.witness_group);
            doc["partition"] = serde_json::to_value(&t.witness_partition)?;
            emit(None, &pretty(doc))?;
            Ok(0)
        }
        Command::GmmsSearch {
            instance,
            budget,
            time_limit_ms,
            out,
        } => {
            let inst = parse_instance(&read(&instance)?)?;
            let limits = SearchLimits {
                max_leaves: budget,
                deadline: time_limit_ms.map(|ms| Instant::now() + Duration::from_millis(ms)),
            };
            let r = gmms_core::algorithms::exact_gmms_search_with(&inst, limits)?;
            let status = serde_json::to_value(r.status)?;
            let doc = match &r.allocation {
                Some(a) => {
                    if let Some(p) = &out {
                        emit(Some(p), &serialize_allocation(a))?;
                    }
                    let bundles: serde_json::Value = serde_json::from_slice(&serialize_allocation(a))?;
                    json!({ "status": status, "visited": r.visited, "allocation": bundles })
                }
                None => json!({ "status": status, "visited": r.visited }),
            };
            emit(None, &pretty(doc))?;
            Ok(match r.status {
                SearchStatus::Found => 0,
                SearchStatus::Exhausted => 1,
                SearchStatus::Budget => 3,
            })
        }
        Command::Gen {
            spec,
            agents,
            goods,
            dist,
            sop,
            seed,
            quantization,
            spec_out,
            out,
        } => {
            let spec = match spec {
                Some(p) => parse_gen_spec(&read(&p)?)?,
                None => {
                    let mut s = GenSpec::new(
                        agents.expect("required by clap"),
                        goods.expect("required by clap"),
                        dist.into(),
                        seed,
                    );
                    s.sop = sop;
                    s.quantization = quantization;
                    s
                }
            };
            let inst = gmms_core::generate(&spec)?;
            if let Some(p) = spec_out {
                emit(Some(&p), &serialize_gen_spec(&spec))?;
            }
            emit(out.as_deref(), &serialize_instance(&inst))?;
            Ok(0)
        }
        Command::Fixture {
            name,
            k,
            n,
            v,
            eps,
            out,
            allocation_out,
            policy_out,
        } => {
            let literal = |s: Option<String>, default: &str| -> Result<Value> {
                let s = s.unwrap_or_else(|| default.to_string());
                s.parse::<Value>().with_context(|| format!("bad value {s:?}"))
            };
            let fixture = match name {
                FixtureArg::Sec21 => Fixture::Sec21 {
                    k: k.unwrap_or(4),
                    n: n.unwrap_or(9),
                },
                FixtureArg::Sec3 => Fixture::Sec3 {
                    n: n.unwrap_or(4),
                    v: literal(v, "1")?,
                    eps: literal(eps, "1/100")?,
                },
                FixtureArg::Sec4MmsNotEf1 => Fixture::Sec4MmsNotEf1,
                FixtureArg::AppendixA => Fixture::AppendixA { n: n.unwrap_or(4) },
                FixtureArg::SingleGoodTwoAgents => Fixture::SingleGoodTwoAgents,
            };
            let (inst, alloc) = paper_fixture(&fixture)?;
            if let Some(p) = allocation_out {
                let a = alloc.as_ref().context("fixture has no reference allocation")?;
                emit(Some(&p), &serialize_allocation(a))?;
            }
            if let Some(p) = policy_out {
                let Fixture::AppendixA { n } = fixture else {
                    bail!("--policy-out only applies to appendix-a");
                };
                emit(Some(&p), &gmms_core::doc::serialize_policy(&appendix_a_policy(n)?))?;
            }
            emit(out.as_deref(), &serialize_instance(&inst))?;
            Ok(0)
        }
        Command::Experiment {
            agents,
            goods,
            dist,
            sop,
            count,
            seed,
            budget,
            time_limit_ms,
            no_timing,
            out,
        } => {
            let mut config = ExperimentConfig::new(parse_range(&agents)?, parse_range(&goods)?, dist.into());
            if *config.agents.start() == 0 {
                bail!("agent counts start at 1");
            }
            config.sop = sop;
            config.count = count;
            config.seed = seed;
            config.budget = budget;
            config.time_limit = time_limit_ms.map(Duration::from_millis);
            let workers = match std::env::var(WORKERS_ENV) {
                Ok(v) => Some(v.parse::<usize>().with_context(|| format!("{WORKERS_ENV}={v:?}"))?),
                Err(_) => None,
            };
            eprintln!("csv schema v{CSV_SCHEMA_VERSION}, rng {RNG_NAME}, first seed {seed}");
            let records = run_experiment(&config, workers)?;
            let mut buf = Vec::new();
            write_csv(&mut buf, &records, !no_timing)?;
            emit(out.as_deref(), &buf)?;
            Ok(0)
        }
    }
}
