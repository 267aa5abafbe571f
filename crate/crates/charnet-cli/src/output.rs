//! Artifact writers. Every file starts with a header block carrying the
//! tool version, the command, and the run configuration, so identical
//! configurations produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use charnet::metrics::{TopoStats, TopoSummary};

use crate::{Cli, CliError};

pub struct Sink {
    dir: PathBuf,
    header: Vec<String>,
}

impl Sink {
    pub fn new(cli: &Cli, command: &str) -> Result<Sink, CliError> {
        fs::create_dir_all(&cli.out)?;
        let header = vec![
            format!("charnet v{}", env!("CARGO_PKG_VERSION")),
            format!("command: {command}"),
            format!("input: {}", cli.input.display()),
            format!(
                "seed: {} replicates: {} occ-min: {} deg-min: {} giant-only: {} seq-degree: {}",
                cli.seed, cli.replicates, cli.occ_min, cli.deg_min, cli.giant_only, cli.seq_degree
            ),
        ];
        Ok(Sink {
            dir: cli.out.clone(),
            header,
        })
    }

    pub fn header_lines(&self) -> &[String] {
        &self.header
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    /// CSV with `#` comment header, a column line, and rows.
    pub fn write_csv(
        &self,
        file: &str,
        columns: &str,
        rows: &[String],
    ) -> Result<PathBuf, CliError> {
        self.write_csv_with(file, &[], columns, rows)
    }

    /// Like [`Sink::write_csv`] with extra per-file header comments.
    pub fn write_csv_with(
        &self,
        file: &str,
        extra_header: &[String],
        columns: &str,
        rows: &[String],
    ) -> Result<PathBuf, CliError> {
        let mut out = String::new();
        for line in self.header.iter().chain(extra_header) {
            writeln!(out, "# {line}").unwrap();
        }
        writeln!(out, "{columns}").unwrap();
        for row in rows {
            writeln!(out, "{row}").unwrap();
        }
        let path = self.path(file);
        fs::write(&path, out)?;
        Ok(path)
    }

    /// JSON object wrapped with run metadata.
    pub fn write_json<T: serde::Serialize>(&self, file: &str, data: &T) -> Result<PathBuf, CliError> {
        let wrapped = serde_json::json!({
            "meta": {
                "tool": format!("charnet v{}", env!("CARGO_PKG_VERSION")),
                "header": self.header,
            },
            "data": data,
        });
        let path = self.path(file);
        fs::write(&path, serde_json::to_string_pretty(&wrapped).unwrap())?;
        Ok(path)
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.6}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    fmt_f64(x.unwrap_or(f64::NAN))
}

/// One summary row in the layout of the topology table.
pub fn summary_row(label: &str, s: &TopoSummary) -> String {
    format!(
        "{label},{},{},{},{},{},{},{},{},{}",
        s.vertices,
        s.edges,
        fmt_f64(s.density),
        fmt_f64(s.mean_degree),
        s.max_degree,
        fmt_opt(s.degree_assortativity),
        fmt_opt(s.mean_distance),
        s.diameter.map(|d| d.to_string()).unwrap_or_else(|| "NaN".into()),
        fmt_opt(s.mean_transitivity),
    )
}

pub const SUMMARY_COLUMNS: &str =
    "network,n,m,density,mean_degree,max_degree,assortativity,mean_distance,diameter,transitivity";

/// One model row in the layout of the reference-model table.
pub fn model_row(network: &str, model: &str, s: &TopoStats) -> String {
    format!(
        "{network},{model},{},{},{},{},{},{}",
        fmt_f64(s.mean_degree),
        fmt_f64(s.max_degree),
        fmt_f64(s.degree_assortativity),
        fmt_f64(s.mean_distance),
        fmt_f64(s.diameter),
        fmt_f64(s.mean_transitivity),
    )
}

pub const MODEL_COLUMNS: &str =
    "network,model,mean_degree,max_degree,assortativity,mean_distance,diameter,transitivity";

pub fn print_artifact(path: &Path) {
    println!("wrote {}", path.display());
}
