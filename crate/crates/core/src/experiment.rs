//! Random-instance experiment grid: EFL factor and GMMS existence per
//! instance, written as CSV.

use std::io::Write;
use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::algorithms::{efl_allocate, exact_gmms_search_with, SearchLimits, SearchStatus, TieBreakPolicy};
use crate::error::{Error, Result};
use crate::fairness::{gmms_factor, is_efl, Factor};
use crate::generator::{generate, Distribution, GenSpec};
use crate::value::Value;

pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 11] = [
    "n",
    "m",
    "dist",
    "sop",
    "seed",
    "gmms_exists",
    "efl_factor_num",
    "efl_factor_den",
    "efl_factor_dec",
    "t_efl_us",
    "t_search_us",
];

/// Outcome of the exact search for one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GmmsExists {
    True,
    False,
    Budget,
    /// The search was disabled.
    Skipped,
}

impl GmmsExists {
    pub fn as_str(self) -> &'static str {
        match self {
            GmmsExists::True => "true",
            GmmsExists::False => "false",
            GmmsExists::Budget => "budget",
            GmmsExists::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentRecord {
    pub n: usize,
    pub m: usize,
    pub distribution: Distribution,
    pub sop: bool,
    pub seed: u64,
    pub gmms_exists: GmmsExists,
    pub efl_factor: Factor,
    pub efl_is_efl: bool,
    pub t_efl_us: u64,
    pub t_search_us: u64,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub agents: RangeInclusive<usize>,
    pub goods: RangeInclusive<usize>,
    pub distribution: Distribution,
    pub sop: bool,
    /// Instances per (n, m) cell.
    pub count: usize,
    /// Seed of the first instance; later instances count up from it.
    pub seed: u64,
    /// Leaf budget for the exact search; 0 disables it.
    pub budget: u64,
    /// Wall-clock limit per exact search.
    pub time_limit: Option<Duration>,
    pub quantization: u32,
}

impl ExperimentConfig {
    pub fn new(agents: RangeInclusive<usize>, goods: RangeInclusive<usize>, distribution: Distribution) -> Self {
        ExperimentConfig {
            agents,
            goods,
            distribution,
            sop: false,
            count: 1000,
            seed: 0,
            budget: 0,
            time_limit: None,
            quantization: 6,
        }
    }

    /// Generator specs in output order: by n, then m, then index.
    pub fn specs(&self) -> Vec<GenSpec> {
        let mut out = Vec::new();
        let mut seed = self.seed;
        for n in self.agents.clone() {
            for m in self.goods.clone() {
                for _ in 0..self.count {
                    let mut spec = GenSpec::new(n, m, self.distribution, seed);
                    spec.sop = self.sop;
                    spec.quantization = self.quantization;
                    out.push(spec);
                    seed = seed.wrapping_add(1);
                }
            }
        }
        out
    }
}

/// Runs one instance.
pub fn run_one(spec: &GenSpec, budget: u64, time_limit: Option<Duration>) -> Result<ExperimentRecord> {
    let instance = generate(spec)?;
    let start = Instant::now();
    let allocation = efl_allocate(&instance, &TieBreakPolicy::lowest_index())?;
    let t_efl = start.elapsed();
    let efl_is_efl = is_efl(&instance, &allocation)?.holds;
    let efl_factor = gmms_factor(&instance, &allocation)?;
    if efl_is_efl && !efl_factor.at_least(&Value::from_ratio(1, 2)) {
        return Err(Error::input(format!(
            "EFL allocation with factor {efl_factor} below 1/2 (seed {})",
            spec.seed
        )));
    }

    let (gmms_exists, t_search) = if budget == 0 {
        (GmmsExists::Skipped, Duration::ZERO)
    } else {
        let start = Instant::now();
        let limits = SearchLimits {
            max_leaves: budget,
            deadline: time_limit.map(|d| start + d),
        };
        let out = exact_gmms_search_with(&instance, limits)?;
        let flag = match out.status {
            SearchStatus::Found => GmmsExists::True,
            SearchStatus::Exhausted => GmmsExists::False,
            SearchStatus::Budget => GmmsExists::Budget,
        };
        (flag, start.elapsed())
    };

    Ok(ExperimentRecord {
        n: spec.num_agents,
        m: spec.num_goods,
        distribution: spec.distribution,
        sop: spec.sop,
        seed: spec.seed,
        gmms_exists,
        efl_factor,
        efl_is_efl,
        t_efl_us: micros(t_efl),
        t_search_us: micros(t_search),
    })
}

fn micros(d: Duration) -> u64 {
    d.as_micros().try_into().unwrap_or(u64::MAX)
}

/// Runs the whole grid on `workers` threads (all cores when `None`).
/// Records come back in the order of [`ExperimentConfig::specs`].
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<ExperimentRecord>> {
    let specs = config.specs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::input(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        specs
            .par_iter()
            .map(|s| run_one(s, config.budget, config.time_limit))
            .collect()
    })
}

/// Per-(n, m) aggregate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSummary {
    pub n: usize,
    pub m: usize,
    pub count: usize,
    /// Exact mean over the finite factors; `Infinite` if there are none.
    pub mean: Factor,
    pub min: Factor,
    pub found: usize,
    pub exhausted: usize,
    pub budget: usize,
    pub skipped: usize,
}

/// Summaries in first-appearance order of the (n, m) cells.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<CellSummary> {
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for r in records {
        if !cells.contains(&(r.n, r.m)) {
            cells.push((r.n, r.m));
        }
    }
    cells
        .into_iter()
        .map(|(n, m)| {
            let rows: Vec<&ExperimentRecord> = records.iter().filter(|r| r.n == n && r.m == m).collect();
            let finite: Vec<&Value> = rows.iter().filter_map(|r| r.efl_factor.finite()).collect();
            let mean = if finite.is_empty() {
                Factor::Infinite
            } else {
                let total: Value = finite.iter().copied().sum();
                Factor::Finite(&total / &Value::from_integer(finite.len() as u64))
            };
            let min = rows.iter().map(|r| r.efl_factor.clone()).min().unwrap_or(Factor::Infinite);
            let tally = |flag| rows.iter().filter(|r| r.gmms_exists == flag).count();
            CellSummary {
                n,
                m,
                count: rows.len(),
                mean,
                min,
                found: tally(GmmsExists::True),
                exhausted: tally(GmmsExists::False),
                budget: tally(GmmsExists::Budget),
                skipped: tally(GmmsExists::Skipped),
            }
        })
        .collect()
}

fn factor_fields(f: &Factor) -> [String; 3] {
    match f {
        Factor::Finite(v) => [v.numer().to_string(), v.denom().to_string(), v.to_decimal(6)],
        // 1/0 marks "no agent has a positive threshold"
        Factor::Infinite => ["1".into(), "0".into(), "inf".into()],
    }
}

/// Writes the header, one row per record and two summary rows per cell
/// (`summary-mean`, `summary-min` in the seed column). With `timing` off
/// the time columns are 0, making the output byte-identical across runs.
pub fn write_csv<W: Write>(out: W, records: &[ExperimentRecord], timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let t = |us: u64| if timing { us.to_string() } else { "0".into() };
    for r in records {
        let [num, den, dec] = factor_fields(&r.efl_factor);
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.distribution.to_string(),
            r.sop.to_string(),
            r.seed.to_string(),
            r.gmms_exists.as_str().into(),
            num,
            den,
            dec,
            t(r.t_efl_us),
            t(r.t_search_us),
        ])?;
    }
    if let Some(first) = records.first() {
        for c in summarize(records) {
            let counts = format!(
                "found={};exhausted={};budget={};skipped={}",
                c.found, c.exhausted, c.budget, c.skipped
            );
            for (label, f) in [("summary-mean", &c.mean), ("summary-min", &c.min)] {
                let [num, den, dec] = factor_fields(f);
                w.write_record([
                    c.n.to_string(),
                    c.m.to_string(),
                    first.distribution.to_string(),
                    first.sop.to_string(),
                    label.into(),
                    counts.clone(),
                    num,
                    den,
                    dec,
                    String::new(),
                    String::new(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Number of complete assignments for an n-agent, m-good instance.
pub fn search_space(n: usize, m: usize) -> BigUint {
    BigUint::from(n).pow(m as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        let mut c = ExperimentConfig::new(3..=3, 3..=4, Distribution::Uniform01);
        c.count = 3;
        c.seed = 40;
        c.budget = 1_000_000;
        c
    }

    #[test]
    fn rows_in_seed_order_regardless_of_workers() {
        let c = tiny();
        let one = run_experiment(&c, Some(1)).unwrap();
        let many = run_experiment(&c, Some(4)).unwrap();
        let strip = |v: Vec<ExperimentRecord>| {
            v.into_iter()
                .map(|mut r| {
                    r.t_efl_us = 0;
                    r.t_search_us = 0;
                    r
                })
                .collect::<Vec<_>>()
        };
        let one = strip(one);
        assert_eq!(one, strip(many));
        assert_eq!(one.iter().map(|r| r.seed).collect::<Vec<_>>(), (40..46).collect::<Vec<_>>());
        assert!(one.iter().all(|r| r.gmms_exists == GmmsExists::True && r.efl_is_efl));
    }

    #[test]
    fn csv_is_reproducible_without_timing() {
        let c = tiny();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&mut a, &run_experiment(&c, Some(2)).unwrap(), false).unwrap();
        write_csv(&mut b, &run_experiment(&c, Some(3)).unwrap(), false).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        assert_eq!(text.lines().count(), 1 + 6 + 4);
    }

    #[test]
    fn empty_grid_is_header_only() {
        let mut c = tiny();
        c.count = 0;
        let mut out = Vec::new();
        write_csv(&mut out, &run_experiment(&c, None).unwrap(), true).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn summary_mean_is_exact() {
        let rec = |f: Factor| ExperimentRecord {
            n: 2,
            m: 2,
            distribution: Distribution::Uniform01,
            sop: false,
            seed: 0,
            gmms_exists: GmmsExists::Skipped,
            efl_factor: f,
            efl_is_efl: true,
            t_efl_us: 0,
            t_search_us: 0,
        };
        let rows = vec![
            rec(Factor::Finite(Value::from_ratio(1, 2))),
            rec(Factor::Finite(Value::one())),
            rec(Factor::Infinite),
        ];
        let s = summarize(&rows);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean, Factor::Finite(Value::from_ratio(3, 4)));
        assert_eq!(s[0].min, Factor::Finite(Value::from_ratio(1, 2)));
        assert_eq!(s[0].skipped, 3);
    }
}
