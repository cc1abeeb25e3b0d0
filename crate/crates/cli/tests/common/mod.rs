//! Helpers shared by the end-to-end tests and the acceptance runner.

#![allow(dead_code)]

use std::ffi::OsStr;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_geospec");

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

pub fn fixture(rel: &str) -> PathBuf {
    repo_root().join("fixtures").join(rel)
}

pub fn sample_dataset() -> PathBuf {
    fixture("sample/dataset.csv")
}

pub fn sample_geojson() -> PathBuf {
    fixture("sample/regions.geojson")
}

/// Run the binary from the repository root with no config in the environment.
pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    Command::new(BIN)
        .args(args)
        .current_dir(repo_root())
        .env_remove("GEOSPEC_CONFIG")
        .output()
        .expect("spawn geospec")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn run_json(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("run.json")).unwrap()).unwrap()
}

/// One happy-path invocation per subcommand with the files it must write.
pub struct HappyCase {
    pub name: &'static str,
    pub args: Vec<String>,
    pub files: &'static [&'static str],
}

pub fn happy_cases() -> Vec<HappyCase> {
    let input = sample_dataset().display().to_string();
    let geo = sample_geojson().display().to_string();
    let base = |cmd: &[&str]| -> Vec<String> {
        let mut v: Vec<String> = cmd.iter().map(|s| s.to_string()).collect();
        v.extend(["--input".to_owned(), input.clone()]);
        v
    };
    vec![
        HappyCase {
            name: "compute",
            args: base(&["compute"]),
            files: &["indicators.csv", "indicators.json", "run.json"],
        },
        HappyCase {
            name: "rank",
            args: base(&["rank"]),
            files: &["ranking.csv", "ranking.json", "run.json"],
        },
        HappyCase {
            name: "classify",
            args: base(&["classify"]),
            files: &["quadrants.csv", "quadrants.json", "report.md", "run.json"],
        },
        HappyCase {
            name: "plot fig1",
            args: base(&["plot", "fig1"]),
            files: &["fig1.svg", "run.json"],
        },
        HappyCase {
            name: "plot fig3",
            args: base(&["plot", "fig3"]),
            files: &["fig3.svg", "run.json"],
        },
        HappyCase {
            name: "plot map",
            args: {
                let mut v = base(&["plot", "map"]);
                v.extend(["--geojson".to_owned(), geo]);
                v
            },
            files: &["map.svg", "run.json"],
        },
    ]
}

const HEADER: &str = "nuts_code,region_name,country,level,docs,cites\n";

/// A crafted failing invocation: files to create, arguments, expected exit
/// status and fragments the diagnostic must contain.
pub struct ErrorCase {
    pub name: &'static str,
    pub files: Vec<(&'static str, String)>,
    pub args: Vec<&'static str>,
    pub code: i32,
    pub needles: Vec<&'static str>,
}

impl ErrorCase {
    /// Write the case's files into `dir` and run it there.
    pub fn execute(&self, dir: &Path) -> Output {
        for (name, body) in &self.files {
            fs::write(dir.join(name), body).unwrap();
        }
        let sample = sample_dataset();
        let geo = sample_geojson();
        let args: Vec<String> = self
            .args
            .iter()
            .map(|a| match *a {
                "@sample" => sample.display().to_string(),
                "@geo" => geo.display().to_string(),
                other => other.to_owned(),
            })
            .collect();
        Command::new(BIN)
            .args(&args)
            .current_dir(dir)
            .env_remove("GEOSPEC_CONFIG")
            .output()
            .expect("spawn geospec")
    }

    /// `Err` describes the mismatch.
    pub fn check(&self, dir: &Path) -> Result<(), String> {
        let out = self.execute(dir);
        let err = stderr(&out);
        if out.status.code() != Some(self.code) {
            return Err(format!(
                "{}: exit {:?}, want {} ({err})",
                self.name,
                out.status.code(),
                self.code
            ));
        }
        for needle in &self.needles {
            if !err.contains(needle) {
                return Err(format!("{}: stderr lacks {needle:?}: {err}", self.name));
            }
        }
        Ok(())
    }
}

fn data(rows: &str) -> String {
    format!("{HEADER}{rows}")
}

pub fn error_cases() -> Vec<ErrorCase> {
    let ok_rows =
        "XX001,A,X,AI,5,10\nXX001,A,X,COMPU,50,100\nXX002,B,X,AI,2,1\nXX002,B,X,COMPU,40,90\n";
    let square = r#"{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}"#;
    vec![
        ErrorCase {
            name: "missing input file",
            files: vec![],
            args: vec!["compute", "--input", "nowhere.csv"],
            code: 2,
            needles: vec!["nowhere.csv"],
        },
        ErrorCase {
            name: "no input given",
            files: vec![],
            args: vec!["rank"],
            code: 2,
            needles: vec!["--input"],
        },
        ErrorCase {
            name: "wrong header",
            files: vec![("d.csv", "code,name,country,level,docs,cites\nXX001,A,X,AI,1,1\n".to_owned())],
            args: vec!["compute", "--input", "d.csv"],
            code: 2,
            needles: vec!["d.csv", "line 1", "header"],
        },
        ErrorCase {
            name: "non-integer count",
            files: vec![("d.csv", data("XX001,A,X,AI,5,1\nXX001,A,X,COMPU,many,1\n"))],
            args: vec!["compute", "--input", "d.csv"],
            code: 2,
            needles: vec!["d.csv", "line 3", "malformed row"],
        },
        ErrorCase {
            name: "wrong column count",
            files: vec![("d.csv", data("XX001,A,X,AI,5\n"))],
            args: vec!["compute", "--input", "d.csv"],
            code: 2,
            needles: vec!["d.csv", "line 2"],
        },
        ErrorCase {
            name: "duplicate key",
            files: vec![("d.csv", data("XX001,A,X,AI,5,1\nXX001,A,X,COMPU,9,1\nXX001,A,X,AI,6,1\n"))],
            args: vec!["rank", "--input", "d.csv"],
            code: 2,
            needles: vec!["d.csv", "line 4", "duplicate key"],
        },
        ErrorCase {
            name: "bad NUTS code",
            files: vec![("d.csv", data("X1,A,X,AI,5,1\n"))],
            args: vec!["classify", "--input", "d.csv"],
            code: 2,
            needles: vec!["d.csv", "line 2", "NUTS"],
        },
        ErrorCase {
            name: "nesting violation",
            files: vec![("d.csv", data("XX001,A,X,COMPU,5,1\nXX001,A,X,AI,9,1\n"))],
            args: vec!["compute", "--input", "d.csv"],
            code: 2,
            needles: vec!["d.csv", "line 3", "exceed"],
        },
        ErrorCase {
            name: "header-only dataset",
            files: vec![("d.csv", HEADER.to_owned())],
            args: vec!["compute", "--input", "d.csv"],
            code: 2,
            needles: vec!["d.csv", "no rows"],
        },
        ErrorCase {
            name: "focal level absent",
            files: vec![("d.csv", data("XX001,A,X,COMPU,5,1\n"))],
            args: vec!["compute", "--input", "d.csv"],
            code: 2,
            needles: vec!["d.csv", "AI"],
        },
        ErrorCase {
            name: "focal equals baseline",
            files: vec![("d.csv", data(ok_rows))],
            args: vec!["compute", "--input", "d.csv", "--focal", "COMPU"],
            code: 2,
            needles: vec!["must differ"],
        },
        ErrorCase {
            name: "reference lacks level",
            files: vec![("d.csv", data(ok_rows)), ("r.csv", "level,docs,cites\nCOMPU,100,100\n".to_owned())],
            args: vec!["compute", "--input", "d.csv", "--reference", "r.csv"],
            code: 2,
            needles: vec!["r.csv", "AI"],
        },
        ErrorCase {
            name: "degenerate reference",
            files: vec![
                ("d.csv", data(ok_rows)),
                ("r.csv", "level,docs,cites\nAI,0,0\nCOMPU,100,100\n".to_owned()),
            ],
            args: vec!["rank", "--input", "d.csv", "--reference", "r.csv"],
            code: 2,
            needles: vec!["r.csv"],
        },
        ErrorCase {
            name: "missing reference file",
            files: vec![("d.csv", data(ok_rows))],
            args: vec!["compute", "--input", "d.csv", "--reference", "gone.csv"],
            code: 2,
            needles: vec!["gone.csv"],
        },
        ErrorCase {
            name: "top zero",
            files: vec![],
            args: vec!["rank", "--input", "@sample", "--top", "0"],
            code: 2,
            needles: vec!["--top"],
        },
        ErrorCase {
            name: "unknown table format",
            files: vec![],
            args: vec!["compute", "--input", "@sample", "--formats", "xml"],
            code: 2,
            needles: vec!["xml"],
        },
        ErrorCase {
            name: "map without geometry",
            files: vec![],
            args: vec!["plot", "map", "--input", "@sample"],
            code: 2,
            needles: vec!["--geojson"],
        },
        ErrorCase {
            name: "feature lacks NUTS property",
            files: vec![(
                "g.geojson",
                format!(r#"{{"type":"FeatureCollection","features":[{{"type":"Feature","properties":{{"id":"XX001"}},"geometry":{square}}}]}}"#),
            )],
            args: vec!["plot", "map", "--input", "@sample", "--geojson", "g.geojson"],
            code: 2,
            needles: vec!["g.geojson", "NUTS_ID"],
        },
        ErrorCase {
            name: "non-polygonal feature",
            files: vec![(
                "g.geojson",
                r#"{"type":"FeatureCollection","features":[{"type":"Feature","properties":{"NUTS_ID":"XX001"},"geometry":{"type":"Point","coordinates":[0,0]}}]}"#.to_owned(),
            )],
            args: vec!["plot", "map", "--input", "@sample", "--geojson", "g.geojson"],
            code: 2,
            needles: vec!["g.geojson", "feature 0"],
        },
        ErrorCase {
            name: "no row survives fig3 filter",
            files: vec![],
            args: vec!["plot", "fig3", "--input", "@sample", "--min-focal-docs", "1000000"],
            code: 2,
            needles: vec!["no row"],
        },
        ErrorCase {
            name: "unknown config key",
            files: vec![("c.conf", "input = x.csv\ncolour = red\n".to_owned())],
            args: vec!["compute", "--config", "c.conf"],
            code: 2,
            needles: vec!["c.conf", "line 2", "colour"],
        },
        ErrorCase {
            name: "missing config file",
            files: vec![],
            args: vec!["compute", "--input", "@sample", "--config", "absent.conf"],
            code: 2,
            needles: vec!["absent.conf"],
        },
        ErrorCase {
            name: "output directory cannot be created",
            files: vec![("blocker", String::new())],
            args: vec!["compute", "--input", "@sample", "--out-dir", "blocker/sub"],
            code: 1,
            needles: vec!["internal error", "blocker"],
        },
    ]
}
