use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use minpart_core::DomainSpec64;

/// Fully resolved run configuration, embedded in every output file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poles: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub pole_positions: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    pub tol: f64,
    pub seed: u64,
    pub budget: usize,
    pub zero_tol: f64,
    pub richardson: bool,
    pub out: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subcommand: String::new(),
            domain: None,
            h: None,
            k: None,
            poles: None,
            pole_positions: Vec::new(),
            eps: None,
            t: None,
            lambda: None,
            t_min: None,
            t_max: None,
            step: None,
            tol: 1e-9,
            seed: 42,
            budget: 200,
            zero_tol: 1e-6,
            richardson: false,
            out: PathBuf::from("out"),
            threads: None,
        }
    }
}

/// Partial configuration as read from --config JSON; every field optional,
/// command-line flags override.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub domain: Option<DomainSpec64>,
    pub h: Option<f64>,
    pub k: Option<usize>,
    pub poles: Option<usize>,
    pub pole_positions: Option<Vec<[f64; 2]>>,
    pub eps: Option<f64>,
    pub t: Option<f64>,
    pub lambda: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub step: Option<f64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub zero_tol: Option<f64>,
    pub richardson: Option<bool>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

pub fn load_file_config(path: &PathBuf) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let cfg: FileConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    Ok(cfg)
}

/// Parses a --domain argument: a shape keyword with optional parameters, or
/// inline JSON. Accepted keywords: unit_square, disk:R,
/// rectangle:WxH, regular_polygon:N:AREA.
pub fn parse_domain(arg: &str) -> anyhow::Result<DomainSpec64> {
    let arg = arg.trim();
    if arg.starts_with('{') {
        return serde_json::from_str(arg).context("parsing inline domain JSON");
    }
    let mut parts = arg.split(':');
    let head = parts.next().unwrap_or_default();
    match head {
        "unit_square" => Ok(DomainSpec64::UnitSquare),
        "disk" => {
            let r: f64 = parts
                .next()
                .context("disk needs a radius, e.g. disk:1.0")?
                .parse()?;
            Ok(DomainSpec64::Disk { radius: r })
        }
        "rectangle" => {
            let dims = parts
                .next()
                .context("rectangle needs WxH, e.g. rectangle:2x1")?;
            let (w, h) = dims
                .split_once('x')
                .context("rectangle needs WxH, e.g. rectangle:2x1")?;
            Ok(DomainSpec64::Rectangle {
                width: w.parse()?,
                height: h.parse()?,
            })
        }
        "regular_polygon" => {
            let n: usize = parts.next().context("regular_polygon:N:AREA")?.parse()?;
            let a: f64 = parts.next().context("regular_polygon:N:AREA")?.parse()?;
            Ok(DomainSpec64::RegularPolygon { sides: n, area: a })
        }
        other => bail!("unknown domain shape '{other}'"),
    }
}

/// Parses one --pole argument "x,y".
pub fn parse_pole(arg: &str) -> anyhow::Result<[f64; 2]> {
    let (x, y) = arg
        .split_once(',')
        .context("pole positions are given as x,y")?;
    Ok([x.trim().parse()?, y.trim().parse()?])
}
