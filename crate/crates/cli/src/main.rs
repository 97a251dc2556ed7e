mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use hidelab::certify::{
    classify_pair, coefficient_decay, default_eps1, log_log_slope, Certifier, DecayFamily, Verdict,
    DEFAULT_EPS2,
};
use hidelab::multicopy::{
    bipartite_dense_check, bipartite_qualities, separability_certificate, BipartiteCheck,
    SeparabilityCertificate,
};
use hidelab::partitions::SitePartition;
use hidelab::tailor::{design_pair, design_pair_at, HidingSpec};
use hidelab::werner::{catalog_pair, catalog_pairs, CatalogEntry, StatePair, SITES};

use output::{fmt_float, to_csv, to_json, write_atomic, Format};

#[derive(Parser, Debug)]
#[command(
    name = "hidelab",
    version,
    about = "Certify and design multi-party data-hiding state pairs"
)]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in state pairs with their validity flags.
    Catalog,
    /// Classify every partition of the four sites for one pair at one dimension.
    Certify {
        /// Catalog name, or a path to a JSON file in catalog format.
        #[arg(long)]
        pair: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps1: Option<f64>,
        #[arg(long)]
        eps2: Option<f64>,
    },
    /// Hiding bound of one partition across a range of dimensions.
    Scan {
        #[arg(long)]
        pair: String,
        /// Inclusive range `A..B`, or a single value.
        #[arg(long)]
        d: String,
        #[arg(long)]
        partition: String,
    },
    /// Design a pair for a down-closed set of hiding partition types.
    Tailor {
        /// Comma-separated types such as "1111,211,22"; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        hiding: String,
        /// Calibrate so every hiding-type partition is certified at this dimension.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Largest non-adapted coefficient of admissible operators across dimensions.
    Decay {
        #[arg(long)]
        partition: String,
        #[arg(long)]
        d: String,
        /// Track the optimal witness of this pair instead of the extremal family.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Qualities of the two-party scheme with K copies.
    Bipartite {
        #[arg(long)]
        d: usize,
        #[arg(long = "K")]
        k: u32,
        /// Also evaluate the scheme with explicit matrices.
        #[arg(long)]
        dense: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<hidelab::Error> for CliError {
    fn from(e: hidelab::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

fn internal<E: fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_range(text: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Input(format!("invalid dimension range {text:?}; expected A..B"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let v = text.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn check_eps(name: &str, value: f64) -> CliResult<f64> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(CliError::Input(format!(
            "--{name} must lie in (0,1), got {value}"
        )))
    }
}

fn load_pair(selector: &str) -> CliResult<StatePair> {
    if selector.ends_with(".json") {
        let text = std::fs::read_to_string(selector)
            .map_err(|e| CliError::Input(format!("{selector}: {e}")))?;
        let entry: CatalogEntry =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{selector}: {e}")))?;
        return Ok(entry.to_pair()?);
    }
    Ok(catalog_pair(selector)?)
}

fn joined(items: &[String]) -> String {
    items.join(" ")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// A rendered report: JSON always, CSV when the command has a tabular form.
struct Rendered {
    json: String,
    csv: Option<String>,
}

fn render<T: Serialize>(
    value: &T,
    csv: Option<(&[&str], Vec<Vec<String>>)>,
) -> CliResult<Rendered> {
    Ok(Rendered {
        json: to_json(value).map_err(internal)?,
        csv: match csv {
            Some((header, rows)) => Some(to_csv(header, &rows).map_err(internal)?),
            None => None,
        },
    })
}

fn catalog() -> CliResult<Rendered> {
    let entries: Vec<CatalogEntry> = catalog_pairs()
        .iter()
        .map(|p| CatalogEntry::from_pair(p, None))
        .collect();
    let rows = entries
        .iter()
        .map(|e| {
            vec![
                e.name.clone(),
                joined(&e.rho0),
                joined(&e.rho1),
                e.valid0.to_string(),
                e.valid1.to_string(),
            ]
        })
        .collect();
    render(
        &entries,
        Some((&["name", "rho0", "rho1", "valid0", "valid1"], rows)),
    )
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Hiding => "hiding",
        Verdict::Revealing => "revealing",
        Verdict::Indeterminate => "indeterminate",
    }
}

fn certify(pair: &str, d: usize, eps1: Option<f64>, eps2: Option<f64>) -> CliResult<Rendered> {
    let pair = load_pair(pair)?;
    let eps1 = eps1
        .map(|e| check_eps("eps1", e))
        .transpose()?
        .unwrap_or_else(|| default_eps1(d));
    let eps2 = eps2
        .map(|e| check_eps("eps2", e))
        .transpose()?
        .unwrap_or(DEFAULT_EPS2);
    let report = classify_pair(&pair, d, eps1, eps2)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.partition.clone(),
                r.partition_type.clone(),
                fmt_float(r.hiding_bound),
                r.bound_subset.clone().unwrap_or_default(),
                fmt_float(r.witness_value),
                verdict_label(r.verdict).to_string(),
            ]
        })
        .collect();
    render(
        &report,
        Some((
            &[
                "partition",
                "partition_type",
                "hiding_bound",
                "bound_subset",
                "witness_value",
                "verdict",
            ],
            rows,
        )),
    )
}

#[derive(Serialize)]
struct ScanRow {
    d: usize,
    hiding_bound: Option<f64>,
    bound_subset: Option<String>,
    status: String,
}

#[derive(Serialize)]
struct ScanReport {
    pair: String,
    partition: String,
    rows: Vec<ScanRow>,
    /// Over the dimensions where the pair is valid.
    strictly_decreasing: bool,
    log_log_slope: Option<f64>,
}

fn scan(pair: &str, d: &str, partition: &str) -> CliResult<Rendered> {
    let pair = load_pair(pair)?;
    let dims = parse_range(d)?;
    let partition = SitePartition::parse(SITES, partition)?;
    for &d in &dims {
        Certifier::new(d)?;
    }
    let rows: Vec<ScanRow> = dims
        .par_iter()
        .map(|&d| {
            let cert = Certifier::new(d)?;
            match cert.hiding_bound(&pair, &partition) {
                Ok(b) => Ok(ScanRow {
                    d,
                    hiding_bound: Some(b.value),
                    bound_subset: b.subset.map(|s| s.to_string()),
                    status: "ok".into(),
                }),
                Err(
                    e @ (hidelab::Error::InvalidAtDimension { .. }
                    | hidelab::Error::DimensionTooSmall { .. }),
                ) => Ok(ScanRow {
                    d,
                    hiding_bound: None,
                    bound_subset: None,
                    status: e.to_string(),
                }),
                Err(e) => Err(CliError::from(e)),
            }
        })
        .collect::<CliResult<_>>()?;
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.hiding_bound.map(|b| (r.d as f64, b)))
        .collect();
    let report = ScanReport {
        pair: pair.name.clone(),
        partition: partition.to_string(),
        strictly_decreasing: points.windows(2).all(|w| w[1].1 < w[0].1),
        log_log_slope: (points.len() >= 2).then(|| log_log_slope(&points)),
        rows,
    };
    let csv_rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.d.to_string(),
                opt_float(r.hiding_bound),
                r.bound_subset.clone().unwrap_or_default(),
                r.status.clone(),
            ]
        })
        .collect();
    render(
        &report,
        Some((&["d", "hiding_bound", "bound_subset", "status"], csv_rows)),
    )
}

fn tailor(hiding: &str, d: Option<usize>) -> CliResult<Rendered> {
    let spec: HidingSpec = hiding.parse()?;
    let result = match d {
        Some(d) => design_pair_at(&spec, d)?,
        None => design_pair(&spec)?,
    };
    let e = &result.entry;
    let row = vec![
        e.name.clone(),
        joined(&e.rho0),
        joined(&e.rho1),
        e.valid0.to_string(),
        e.valid1.to_string(),
        e.provenance.clone().unwrap_or_default(),
        result.spec.clone(),
        result.min_dimension.to_string(),
    ];
    render(
        &result,
        Some((
            &[
                "name",
                "rho0",
                "rho1",
                "valid0",
                "valid1",
                "provenance",
                "spec",
                "min_dimension",
            ],
            vec![row],
        )),
    )
}

#[derive(Serialize)]
struct DecayReport {
    #[serde(flatten)]
    table: hidelab::certify::DecayTable,
    fitted_slope: f64,
}

fn decay(partition: &str, d: &str, pair: Option<&str>) -> CliResult<Rendered> {
    let partition = SitePartition::parse(SITES, partition)?;
    let dims = parse_range(d)?;
    let family = match pair {
        Some(name) => DecayFamily::PairWitness(load_pair(name)?),
        None => DecayFamily::Extremal,
    };
    let table = coefficient_decay(&partition, &dims, &family)?;
    let rows = table
        .rows
        .iter()
        .map(|r| vec![r.d.to_string(), fmt_float(r.max_nonadapted_coeff)])
        .collect();
    let report = DecayReport {
        fitted_slope: table.fitted_slope(),
        table,
    };
    render(&report, Some((&["d", "max_nonadapted_coeff"], rows)))
}

#[derive(Serialize)]
struct BipartiteReport {
    d: usize,
    copies: u32,
    eps1: f64,
    eps2: f64,
    separability: SeparabilityCertificate,
    dense: Option<BipartiteCheck>,
}

fn bipartite(d: usize, k: u32, dense: bool) -> CliResult<Rendered> {
    let (eps1, eps2) = bipartite_qualities(d, k)?;
    let report = BipartiteReport {
        d,
        copies: k,
        eps1,
        eps2,
        separability: separability_certificate(d)?,
        dense: dense.then(|| bipartite_dense_check(d, k)).transpose()?,
    };
    let row = vec![
        d.to_string(),
        k.to_string(),
        fmt_float(eps1),
        fmt_float(eps2),
        opt_float(report.dense.as_ref().map(|c| c.eps1_dense)),
        opt_float(report.dense.as_ref().map(|c| c.eps2_dense)),
    ];
    render(
        &report,
        Some((
            &["d", "K", "eps1", "eps2", "eps1_dense", "eps2_dense"],
            vec![row],
        )),
    )
}

fn run(cli: &Cli) -> CliResult<()> {
    let rendered = match &cli.command {
        Command::Catalog => catalog()?,
        Command::Certify {
            pair,
            d,
            eps1,
            eps2,
        } => certify(pair, *d, *eps1, *eps2)?,
        Command::Scan { pair, d, partition } => scan(pair, d, partition)?,
        Command::Tailor { hiding, d } => tailor(hiding, *d)?,
        Command::Decay { partition, d, pair } => decay(partition, d, pair.as_deref())?,
        Command::Bipartite { d, k, dense } => bipartite(*d, *k, *dense)?,
    };
    let text = match cli.format {
        Format::Json => rendered.json,
        Format::Csv => rendered
            .csv
            .ok_or_else(|| CliError::Input("no CSV form for this command".into()))?,
    };
    match &cli.out {
        Some(path) => {
            write_atomic(path, &text).map_err(|e| internal(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Input(_) => ExitCode::from(2),
                CliError::Internal(_) => ExitCode::from(1),
            }
        }
    }
}
