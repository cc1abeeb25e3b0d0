//! Run configuration: `key = value` config file merged under command-line
//! flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use geospec::analysis::{DEFAULT_MIN_BASELINE_DOCS, DEFAULT_MIN_FOCAL_DOCS, DEFAULT_TOP_N};
use geospec::render::DEFAULT_NUTS_PROPERTY;
use geospec::FieldLevel;
use serde::Serialize;

use crate::error::Failure;

pub const CONFIG_ENV: &str = "GEOSPEC_CONFIG";

const KEYS: &[&str] = &[
    "input",
    "reference",
    "focal",
    "baseline",
    "min_baseline_docs",
    "min_focal_docs",
    "out_dir",
    "top",
    "formats",
    "geojson",
    "nuts_property",
];

/// Parsed config file. Keys may use `-` or `_`.
#[derive(Debug, Default)]
pub struct ConfigFile {
    pub path: Option<PathBuf>,
    values: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| {
            Failure::input(format!("{}: cannot read config file: {e}", path.display()))
        })?;
        Self::parse(&text, path)
    }

    fn parse(text: &str, path: &Path) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::input(format!(
                    "{}: line {line_no}: expected `key = value`",
                    path.display()
                )));
            };
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(Failure::input(format!(
                    "{}: line {line_no}: unknown key {key:?}",
                    path.display()
                )));
            }
            let value = value.trim().trim_matches('"').to_owned();
            if values.insert(key.clone(), (value, line_no)).is_some() {
                return Err(Failure::input(format!(
                    "{}: line {line_no}: key {key:?} given twice",
                    path.display()
                )));
            }
        }
        Ok(Self {
            path: Some(path.to_owned()),
            values,
        })
    }

    fn get(&self, key: &str) -> Option<&(String, usize)> {
        self.values.get(key)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|e| {
                Failure::input(format!(
                    "{}: line {line}: invalid value {v:?} for {key}: {e}",
                    self.path
                        .as_deref()
                        .unwrap_or(Path::new("<config>"))
                        .display()
                ))
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

pub fn parse_formats(s: &str) -> Result<Vec<TableFormat>, String> {
    let mut out = Vec::new();
    for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let f = match token {
            "csv" => TableFormat::Csv,
            "json" => TableFormat::Json,
            other => return Err(format!("unknown format {other:?} (expected csv or json)")),
        };
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err("at least one output format is required".to_owned());
    }
    Ok(out)
}

/// Flag values as given on the command line; `None` means not given.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub input: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub focal: Option<FieldLevel>,
    pub baseline: Option<FieldLevel>,
    pub min_baseline_docs: Option<u64>,
    pub min_focal_docs: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub top: Option<usize>,
    pub formats: Option<Vec<TableFormat>>,
    pub geojson: Option<PathBuf>,
    pub nuts_property: Option<String>,
}

/// Effective configuration of one run, echoed into `run.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub config_file: Option<PathBuf>,
    pub input: PathBuf,
    pub reference: Option<PathBuf>,
    pub focal: FieldLevel,
    pub baseline: FieldLevel,
    pub min_baseline_docs: u64,
    pub min_focal_docs: u64,
    pub out_dir: PathBuf,
    pub top: usize,
    pub formats: Vec<TableFormat>,
    pub geojson: Option<PathBuf>,
    pub nuts_property: String,
}

impl RunConfig {
    /// Flags win over the config file, which wins over defaults.
    pub fn resolve(flags: Overrides, file: &ConfigFile) -> Result<Self, Failure> {
        let path = |key: &str| file.get(key).map(|(v, _)| PathBuf::from(v));
        let formats = match flags.formats {
            Some(f) => f,
            None => match file.get("formats") {
                Some((v, line)) => parse_formats(v).map_err(|e| {
                    Failure::input(format!(
                        "{}: line {line}: {e}",
                        file.path
                            .as_deref()
                            .unwrap_or(Path::new("<config>"))
                            .display()
                    ))
                })?,
                None => vec![TableFormat::Csv, TableFormat::Json],
            },
        };
        let input = flags.input.or_else(|| path("input")).ok_or_else(|| {
            Failure::input("no input dataset given (use --input or `input =` in the config file)")
        })?;
        let config = Self {
            config_file: file.path.clone(),
            input,
            reference: flags.reference.or_else(|| path("reference")),
            focal: flags
                .focal
                .map_or_else(|| file.parsed("focal"), |v| Ok(Some(v)))?
                .unwrap_or(FieldLevel::Ai),
            baseline: flags
                .baseline
                .map_or_else(|| file.parsed("baseline"), |v| Ok(Some(v)))?
                .unwrap_or(FieldLevel::Compu),
            min_baseline_docs: flags
                .min_baseline_docs
                .map_or_else(|| file.parsed("min_baseline_docs"), |v| Ok(Some(v)))?
                .unwrap_or(DEFAULT_MIN_BASELINE_DOCS),
            min_focal_docs: flags
                .min_focal_docs
                .map_or_else(|| file.parsed("min_focal_docs"), |v| Ok(Some(v)))?
                .unwrap_or(DEFAULT_MIN_FOCAL_DOCS),
            out_dir: flags
                .out_dir
                .or_else(|| path("out_dir"))
                .unwrap_or_else(|| PathBuf::from(".")),
            top: flags
                .top
                .map_or_else(|| file.parsed("top"), |v| Ok(Some(v)))?
                .unwrap_or(DEFAULT_TOP_N),
            formats,
            geojson: flags.geojson.or_else(|| path("geojson")),
            nuts_property: flags
                .nuts_property
                .or_else(|| file.get("nuts_property").map(|(v, _)| v.clone()))
                .unwrap_or_else(|| DEFAULT_NUTS_PROPERTY.to_owned()),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), Failure> {
        if self.focal == self.baseline {
            return Err(Failure::input(format!(
                "focal and baseline levels must differ (both are {})",
                self.focal
            )));
        }
        if self.top == 0 {
            return Err(Failure::input("--top must be at least 1"));
        }
        require_file(&self.input, "input dataset")?;
        if let Some(reference) = &self.reference {
            require_file(reference, "reference totals")?;
        }
        if let Some(geojson) = &self.geojson {
            require_file(geojson, "geometry")?;
        }
        if self.out_dir.exists() && !self.out_dir.is_dir() {
            return Err(Failure::input(format!(
                "{}: output directory path exists and is not a directory",
                self.out_dir.display()
            )));
        }
        Ok(())
    }
}

fn require_file(path: &Path, what: &str) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::input(format!(
            "{}: {what} file not found",
            path.display()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let f = ConfigFile::parse(
            "# c\nfocal = AI\nmin-baseline-docs = 50\n\ninput=\"a.csv\"\n",
            Path::new("x.conf"),
        )
        .unwrap();
        assert_eq!(f.get("focal").unwrap().0, "AI");
        assert_eq!(f.parsed::<u64>("min_baseline_docs").unwrap(), Some(50));
        assert_eq!(f.get("input").unwrap().0, "a.csv");
    }

    #[test]
    fn rejects_bad_lines() {
        for text in ["focal AI\n", "colour = red\n", "top = 1\ntop = 2\n"] {
            let err = ConfigFile::parse(text, Path::new("x.conf")).unwrap_err();
            assert!(err.to_string().contains("x.conf: line"), "{err}");
        }
        let f = ConfigFile::parse("top = many\n", Path::new("x.conf")).unwrap();
        assert!(f.parsed::<usize>("top").is_err());
    }

    #[test]
    fn formats() {
        assert_eq!(parse_formats("csv").unwrap(), vec![TableFormat::Csv]);
        assert_eq!(
            parse_formats("json, csv,json").unwrap(),
            vec![TableFormat::Json, TableFormat::Csv]
        );
        assert!(parse_formats("svg").is_err());
        assert!(parse_formats("").is_err());
    }
}
