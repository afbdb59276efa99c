//! File formats.
//!
//! Point clouds are read and written as CSV (one point per row, optional first
//! line `dim=<d>,role=<r>`) or TOPD, a little-endian binary layout:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "TOPD"
//!      4     4  version (u32, = 1)
//!      8     8  n_points (u64)
//!     16     8  dim (u64)
//!     24     1  role (0 train, 1 test, 2 ood, 3 unlabeled)
//!     25     7  reserved, zero
//!     32     …  n_points × dim f64, row-major
//! ```
//!
//! Diagrams are line records `dimension,birth,death` (`inf` for essential
//! classes) after `#` metadata lines. Distributions and comparison reports are
//! JSON documents that embed the configuration that produced them. All
//! outputs go through a temporary file in the target directory and are renamed
//! into place, so an interrupted run leaves nothing behind.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bootstrap::{BootstrapConfig, BootstrapOutput};
use crate::compare::{ComparisonReport, DistributionSet, Interval, IntervalStat, OodVerdict, QUANTILE_RULE};
use crate::error::{Error, Result};
use crate::persistence::{Bar, PersistenceConfig, PersistenceDiagram};
use crate::pointcloud::{PointCloud, Role};
use crate::summaries::StatisticId;

pub const TOPD_MAGIC: &[u8; 4] = b"TOPD";
pub const TOPD_VERSION: u32 = 1;
pub const TOPD_HEADER_LEN: usize = 32;
pub const DEFAULT_HISTOGRAM_BINS: usize = 100;
pub const DISTRIBUTIONS_FORMAT: &str = "topood-distributions/1";
pub const REPORT_FORMAT: &str = "topood-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFormat {
    Csv,
    Topd,
}

impl PointFormat {
    /// Guess from the file extension; anything but `.topd` is CSV.
    pub fn from_path(path: &Path) -> PointFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("topd") => PointFormat::Topd,
            _ => PointFormat::Csv,
        }
    }
}

impl FromStr for PointFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(PointFormat::Csv),
            "topd" => Ok(PointFormat::Topd),
            other => Err(Error::InvalidConfig(format!(
                "unknown format {other:?}; expected csv or topd"
            ))),
        }
    }
}

impl fmt::Display for PointFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointFormat::Csv => "csv",
            PointFormat::Topd => "topd",
        })
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `bytes` to `path` through a sibling temporary file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let write_err = |source| Error::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(write_err)?;
    tmp.write_all(bytes).map_err(write_err)?;
    tmp.as_file().sync_all().map_err(write_err)?;
    tmp.persist(path).map_err(|e| write_err(e.error))?;
    Ok(())
}

/// Reads a cloud; `role` overrides whatever the file declares.
pub fn read_point_cloud(path: &Path, format: Option<PointFormat>, role: Option<Role>) -> Result<PointCloud> {
    let mut cloud = match format.unwrap_or_else(|| PointFormat::from_path(path)) {
        PointFormat::Csv => read_csv(path)?,
        PointFormat::Topd => read_topd(path)?,
    };
    if let Some(role) = role {
        cloud.role = role;
    }
    Ok(cloud)
}

fn read_csv(path: &Path) -> Result<PointCloud> {
    let bytes = read_bytes(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());

    let mut declared_dim = None;
    let mut role = Role::Unlabeled;
    let mut dim = None;
    let mut coords = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if i == 0
            && record
                .get(0)
                .is_some_and(|f| f.starts_with("dim=") || f.starts_with("role="))
        {
            (declared_dim, role) = parse_csv_header(path, &record)?;
            continue;
        }
        let expected = *dim.get_or_insert(declared_dim.unwrap_or(record.len()));
        if record.len() != expected {
            return Err(Error::DimensionMismatch {
                path: path.to_path_buf(),
                line,
                expected,
                found: record.len(),
            });
        }
        for field in &record {
            let value: f64 = field.parse().map_err(|_| Error::ParseNumber {
                path: path.to_path_buf(),
                line,
                value: field.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteValue {
                    path: path.to_path_buf(),
                    line,
                    value: field.to_string(),
                });
            }
            coords.push(value);
        }
    }
    let dim = dim.or(declared_dim).unwrap_or(0);
    PointCloud::new(coords, dim, role, path.display().to_string())
}

fn parse_csv_header(path: &Path, record: &csv::StringRecord) -> Result<(Option<usize>, Role)> {
    let malformed = |msg: String| Error::MalformedHeader {
        path: path.to_path_buf(),
        msg,
    };
    let mut dim = None;
    let mut role = Role::Unlabeled;
    for field in record {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| malformed(format!("expected key=value, found {field:?}")))?;
        match key.trim() {
            "dim" => {
                let d: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| malformed(format!("bad dim {value:?}")))?;
                if d == 0 {
                    return Err(malformed("dim must be positive".into()));
                }
                dim = Some(d);
            }
            "role" => role = value.parse().map_err(|_| malformed(format!("bad role {value:?}")))?,
            other => return Err(malformed(format!("unknown key {other:?}"))),
        }
    }
    Ok((dim, role))
}

fn read_topd(path: &Path) -> Result<PointCloud> {
    let bytes = read_bytes(path)?;
    let malformed = |msg: &str| Error::MalformedHeader {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    };
    if bytes.len() < TOPD_HEADER_LEN {
        return Err(malformed("file shorter than the 32-byte header"));
    }
    if &bytes[0..4] != TOPD_MAGIC {
        return Err(malformed("bad magic, expected \"TOPD\""));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != TOPD_VERSION {
        return Err(malformed(&format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let dim = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let role = Role::from_byte(bytes[24]).ok_or_else(|| malformed(&format!("unknown role byte {}", bytes[24])))?;
    if bytes[25..32].iter().any(|&b| b != 0) {
        return Err(malformed("reserved bytes must be zero"));
    }
    let expected = n
        .checked_mul(dim)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| malformed("n_points × dim overflows"))?;
    let found = (bytes.len() - TOPD_HEADER_LEN) as u64;
    if found != expected {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected,
            found,
        });
    }
    let coords: Vec<f64> = bytes[TOPD_HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
        let dim = dim as usize;
        return Err(Error::NonFiniteValue {
            path: path.to_path_buf(),
            line: pos / dim + 1,
            value: format!("{} (axis {})", coords[pos], pos % dim),
        });
    }
    PointCloud::new(coords, dim as usize, role, path.display().to_string())
}

pub fn encode_topd(cloud: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(TOPD_HEADER_LEN + cloud.coords().len() * 8);
    out.extend_from_slice(TOPD_MAGIC);
    out.extend_from_slice(&TOPD_VERSION.to_le_bytes());
    out.extend_from_slice(&(cloud.len() as u64).to_le_bytes());
    out.extend_from_slice(&(cloud.dim() as u64).to_le_bytes());
    out.push(cloud.role.as_byte());
    out.extend_from_slice(&[0u8; 7]);
    for c in cloud.coords() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

/// CSV with a `dim=…,role=…` header and 17 significant digits per value.
pub fn encode_csv(cloud: &PointCloud) -> String {
    let mut out = format!("dim={},role={}\n", cloud.dim(), cloud.role);
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_point_cloud(cloud: &PointCloud, path: &Path, format: Option<PointFormat>) -> Result<()> {
    match format.unwrap_or_else(|| PointFormat::from_path(path)) {
        PointFormat::Csv => write_atomic(path, encode_csv(cloud).as_bytes()),
        PointFormat::Topd => write_atomic(path, &encode_topd(cloud)),
    }
}

/// Text form of a diagram; floats use the shortest round-tripping decimal.
pub fn encode_diagram(diagram: &PersistenceDiagram, config: &PersistenceConfig, source: &str) -> String {
    let mut out = String::from("# topood persistence diagram\n");
    out.push_str(&format!("# source={source}\n"));
    out.push_str(&format!("# n_points={}\n", diagram.n_points));
    out.push_str(&format!("# threshold={:?}\n", diagram.threshold));
    out.push_str(&format!("# threshold_policy={}\n", config.threshold));
    out.push_str(&format!("# include_zero_bars={}\n", config.include_zero_bars));
    out.push_str("# coefficients=Z/2\n");
    out.push_str("# columns=dimension,birth,death\n");
    for bar in diagram.all_bars() {
        out.push_str(&format_bar(bar));
        out.push('\n');
    }
    out
}

pub fn format_bar(bar: &Bar) -> String {
    format!("{},{:?},{:?}", bar.dimension, bar.birth, bar.death)
}

pub fn write_diagram(
    diagram: &PersistenceDiagram,
    config: &PersistenceConfig,
    source: &str,
    path: &Path,
) -> Result<()> {
    write_atomic(path, encode_diagram(diagram, config, source).as_bytes())
}

pub fn read_diagram(path: &Path) -> Result<PersistenceDiagram> {
    let text = String::from_utf8(read_bytes(path)?).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    parse_diagram(path, &text)
}

fn parse_diagram(path: &Path, text: &str) -> Result<PersistenceDiagram> {
    let mut diagram = PersistenceDiagram {
        n_points: 0,
        threshold: f64::INFINITY,
        h0: Vec::new(),
        h1: Vec::new(),
    };
    let format_err = |line: usize, msg: String| Error::Format {
        path: path.to_path_buf(),
        msg: format!("line {line}: {msg}"),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((key, value)) = meta.trim().split_once('=') {
                match key {
                    "n_points" => {
                        diagram.n_points = value
                            .parse()
                            .map_err(|_| format_err(i + 1, format!("bad n_points {value:?}")))?
                    }
                    "threshold" => {
                        diagram.threshold = value
                            .parse()
                            .map_err(|_| format_err(i + 1, format!("bad threshold {value:?}")))?
                    }
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [dim, birth, death] = fields[..] else {
            return Err(format_err(i + 1, format!("expected 3 fields, found {}", fields.len())));
        };
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format_err(i + 1, format!("bad number {s:?}")))
        };
        let bar = Bar::new(
            dim.trim()
                .parse()
                .map_err(|_| format_err(i + 1, format!("bad dimension {dim:?}")))?,
            num(birth)?,
            num(death)?,
        );
        match bar.dimension {
            0 => diagram.h0.push(bar),
            1 => diagram.h1.push(bar),
            d => return Err(format_err(i + 1, format!("unsupported dimension {d}"))),
        }
    }
    Ok(diagram)
}

/// Equal-width binned counts over `[low, high]` of the values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: usize,
    pub low: f64,
    pub high: f64,
    pub counts: Vec<u64>,
}

pub fn histogram(values: &[f64], bins: usize) -> Histogram {
    let bins = bins.max(1);
    let low = values.iter().copied().fold(f64::INFINITY, f64::min);
    let high = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0u64; bins];
    if values.is_empty() {
        return Histogram {
            bins,
            low: 0.0,
            high: 0.0,
            counts,
        };
    }
    let width = (high - low) / bins as f64;
    for &v in values {
        let slot = if width > 0.0 {
            (((v - low) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[slot] += 1;
    }
    Histogram {
        bins,
        low,
        high,
        counts,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticRecord {
    pub statistic: StatisticId,
    pub ci_low: f64,
    pub ci_high: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_empty: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Histogram>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionConventions {
    pub ci_method: String,
    pub quantile_rule: String,
    pub empty_diagram_rule: String,
    pub histogram_bins: usize,
}

/// On-disk form of a bootstrap run. Only `config`, `role` and the interval
/// fields of `statistics` are required when reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionDocument {
    pub format: String,
    pub role: Role,
    #[serde(default)]
    pub source: String,
    #[serde(default)]
    pub population: Option<usize>,
    pub config: BootstrapConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conventions: Option<DistributionConventions>,
    pub statistics: Vec<StatisticRecord>,
}

impl DistributionDocument {
    pub fn from_output(out: &BootstrapOutput, bins: usize) -> Self {
        let empty_rule = match out.config.empty_policy {
            crate::bootstrap::EmptyPolicy::Zero => "diagrams without finite bars contribute zeros",
            crate::bootstrap::EmptyPolicy::Skip => "diagrams without finite bars are skipped",
        };
        DistributionDocument {
            format: DISTRIBUTIONS_FORMAT.into(),
            role: out.role,
            source: out.source.clone(),
            population: Some(out.population),
            config: out.config.clone(),
            conventions: Some(DistributionConventions {
                ci_method: "percentile bootstrap".into(),
                quantile_rule: QUANTILE_RULE.into(),
                empty_diagram_rule: empty_rule.into(),
                histogram_bins: bins,
            }),
            statistics: out
                .distributions
                .iter()
                .map(|d| StatisticRecord {
                    statistic: d.statistic,
                    ci_low: d.ci_low,
                    ci_high: d.ci_high,
                    mean: Some(d.mean),
                    std: Some(d.std),
                    n_empty: Some(d.n_empty),
                    histogram: Some(histogram(&d.values, bins)),
                    values: d.values.clone(),
                })
                .collect(),
        }
    }

    pub fn to_distribution_set(&self) -> DistributionSet {
        DistributionSet {
            config: self.config.clone(),
            role: self.role,
            source: self.source.clone(),
            stats: self
                .statistics
                .iter()
                .map(|r| IntervalStat {
                    statistic: r.statistic,
                    interval: Interval {
                        low: r.ci_low,
                        high: r.ci_high,
                        mean: r.mean,
                        std: r.std,
                    },
                })
                .collect(),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn write_distributions(out: &BootstrapOutput, bins: usize, path: &Path) -> Result<()> {
    write_atomic(path, to_json(&DistributionDocument::from_output(out, bins)).as_bytes())
}

pub fn read_distributions(path: &Path) -> Result<DistributionDocument> {
    let bytes = read_bytes(path)?;
    let doc: DistributionDocument = serde_json::from_slice(&bytes).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    for r in &doc.statistics {
        if !(r.ci_low <= r.ci_high) {
            return Err(Error::Format {
                path: path.to_path_buf(),
                msg: format!("{}: ci_low {} exceeds ci_high {}", r.statistic, r.ci_low, r.ci_high),
            });
        }
    }
    Ok(doc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format: String,
    pub inputs: Vec<(Role, PathBuf)>,
    pub report: ComparisonReport,
    pub verdict: OodVerdict,
}

pub fn write_report(doc: &ReportDocument, path: &Path) -> Result<()> {
    write_atomic(path, to_json(doc).as_bytes())
}
