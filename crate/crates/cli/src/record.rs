//! One flat result row shared by every subcommand, so CSV headers never
//! change between them. Columns that do not apply are left empty.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::args::Format;
use crate::CliError;

/// Bumped whenever a column is added, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub subcommand: String,
    pub mechanism: String,
    pub idc: Option<String>,
    pub trial: usize,
    pub seed: u64,
    pub vertices: usize,
    pub universe_size: usize,
    pub n: f64,
    pub n2: f64,
    pub eps: f64,
    pub delta: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub k: usize,
    pub queries_answered: Option<usize>,
    /// Errors on the canonical query scale (see `measure`).
    pub max_error: Option<f64>,
    pub mean_error: Option<f64>,
    pub sampled_max_error: Option<f64>,
    /// Exact max error over all cuts, filled when |V| <= 14.
    pub bruteforce_max_error: Option<f64>,
    pub updates: Option<u64>,
    pub budget: Option<u64>,
    pub exhausted: Option<bool>,
    pub early_exit: Option<bool>,
    pub sigma: Option<f64>,
    pub threshold: Option<f64>,
    pub runtime_ms: Option<f64>,
    /// `certified` or `refused`.
    pub privacy_status: String,
    pub privacy_eps: Option<f64>,
    pub privacy_delta: Option<f64>,
    /// `sqrt(n) (log k)^(1/2) (log |X|)^(1/4) / eps^(1/2)`
    pub bound_mw_shape: Option<f64>,
    /// `n2^(1/4) (log k)^(1/2) |X|^(1/4) / eps^(1/2)`
    pub bound_fk_shape: Option<f64>,
    /// Randomized-response error bound at `|Q|` = number of sampled cuts.
    pub bound_rr: Option<f64>,
    /// Accuracy fixed point solved from the update bound.
    pub bound_alpha: Option<f64>,
    /// Exact max canonical cut error against the true graph per pipeline
    /// stage, filled when |V| <= 14.
    pub residual_clip: Option<f64>,
    pub residual_projected: Option<f64>,
    pub residual_rounded: Option<f64>,
}

impl ResultRecord {
    pub fn new(subcommand: &str, mechanism: &str, trial: usize, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            subcommand: subcommand.into(),
            mechanism: mechanism.into(),
            trial,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize> {
    schema_version: u32,
    config: &'a C,
    records: &'a [ResultRecord],
}

pub(crate) fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Write records in the chosen format. JSON embeds the configuration; CSV
/// gets a `<out>.config.json` sidecar (or the config on stderr for stdout).
pub fn write_records<C: Serialize>(
    records: &[ResultRecord],
    config: &C,
    out: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let mut w = sink(out)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &Envelope { schema_version: SCHEMA_VERSION, config, records })?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            for r in records {
                c.serialize(r)?;
            }
            c.flush()?;
            drop(c);
            let cfg = serde_json::to_string(config)?;
            match out {
                Some(p) => {
                    let mut side = p.as_os_str().to_owned();
                    side.push(".config.json");
                    std::fs::write(side, cfg + "\n")?;
                }
                None => log::info!("config: {cfg}"),
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Read records back from CSV; used by tests and for post-processing.
pub fn read_csv(reader: impl io::Read) -> Result<Vec<ResultRecord>, CliError> {
    csv::Reader::from_reader(reader).deserialize().map(|r| r.map_err(CliError::from)).collect()
}
