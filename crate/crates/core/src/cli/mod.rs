//! The `cdirac` command-line front end.
//!
//! Exit codes: `0` success, `1` input errors (unreadable or malformed files,
//! bad flags, inadmissible triples, failing property suites), `2` analysis
//! completed with per-point failures.

pub mod catalog;
pub mod fieldfile;
pub mod report;
pub mod tetra;
pub mod verify;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::classify::{normal_form, TetraCoord};
use crate::dirac::Triple;
use crate::field::{analyze_grid, eval_field, FieldSpec, Grid, GridBox, GridOptions};
use crate::subspace::DEFAULT_TOL;

use fieldfile::{FieldFile, InputError};

pub const TOL_ENV: &str = "CDIRAC_TOL";

#[derive(Debug, Parser)]
#[command(name = "cdirac", version, about = "Invariants and normal forms of complex Dirac structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a structure field on a grid and write a report.
    Analyze(AnalyzeArgs),
    /// Normal form of a structure field at one point.
    Classify(ClassifyArgs),
    /// Run seeded property suites on random lagrangians.
    Verify(VerifyArgs),
    /// Emit the tetrahedron of admissible (r, s, k).
    Tetra(TetraArgs),
    /// List or emit built-in field files.
    Examples(ExamplesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TetraFormat {
    Svg,
    Json,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// `lo,hi` for a cube or `lo_1,…,lo_m,hi_1,…,hi_m`; overrides the file.
    #[arg(long = "box", value_name = "BOUNDS", allow_hyphen_values = true)]
    pub bounds: Option<String>,
    /// Points per axis, one value or one per axis.
    #[arg(long, default_value = "9")]
    pub res: String,
    /// Finite-difference step (default `1e-5 (1 + |p|)` per point).
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: ReportFormat,
    /// Worker threads (1 runs serially).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub skip_involutivity: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub file: PathBuf,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: verify::Suite,
    /// Samples per dimension.
    #[arg(long, default_value_t = 100)]
    pub seeds: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5, 6])]
    pub dims: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct TetraArgs {
    /// Field file whose strata are highlighted.
    #[arg(conflicts_with = "triple")]
    pub file: Option<PathBuf>,
    /// Comma-separated `r,s,k`; may be repeated.
    #[arg(long, requires = "dim")]
    pub triple: Vec<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Grid resolution used with a field file.
    #[arg(long, default_value_t = 5)]
    pub res: usize,
    #[arg(long, value_enum, default_value = "svg")]
    pub out: TetraFormat,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExamplesArgs {
    #[arg(long, conflicts_with = "emit")]
    pub list: bool,
    #[arg(long, value_name = "NAME")]
    pub emit: Option<String>,
    #[arg(long, requires = "emit")]
    pub out: Option<PathBuf>,
}

/// Failure of a subcommand together with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self {
            code: 1,
            message: message.to_string(),
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Self::input(e)
    }
}

/// Outcome of a subcommand: text for standard output plus the exit code.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(out) => {
            print!("{}", out.stdout);
            let _ = std::io::stdout().flush();
            eprint!("{}", out.stderr);
            out.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(command: &Command) -> Result<Output, Failure> {
    match command {
        Command::Analyze(a) => analyze(a),
        Command::Classify(a) => classify(a),
        Command::Verify(a) => Ok(run_verify(a)),
        Command::Tetra(a) => tetra(a),
        Command::Examples(a) => examples(a),
    }
}

fn env_tol() -> Result<Option<f64>, Failure> {
    match std::env::var(TOL_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0 && t.is_finite())
            .map(Some)
            .ok_or_else(|| Failure::input(format!("{TOL_ENV}={v:?} is not a positive number"))),
        Err(_) => Ok(None),
    }
}

/// `--tol`, then the file's `tol`, then `CDIRAC_TOL`, then the default.
pub fn resolve_tol(flag: Option<f64>, file: Option<f64>) -> Result<f64, Failure> {
    let tol = match (flag, file) {
        (Some(t), _) | (None, Some(t)) => t,
        (None, None) => env_tol()?.unwrap_or(DEFAULT_TOL),
    };
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(Failure::input(format!("tolerance must be positive, got {tol}")))
    }
}

fn load(path: &Path, tol: Option<f64>) -> Result<FieldSpec, Failure> {
    let (file, text) = FieldFile::read(path)?;
    let tol = resolve_tol(tol, file.tol)?;
    Ok(file.to_spec(&text, &path.display().to_string(), tol)?)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Failure::input(format!("{what}: cannot parse {:?}", s.trim())))
        })
        .collect()
}

fn parse_box(text: &str, m: usize) -> Result<GridBox, Failure> {
    let v: Vec<f64> = parse_list(text, "--box")?;
    if v.len() == 2 {
        Ok(GridBox::cube(m, v[0], v[1]))
    } else if v.len() == 2 * m {
        Ok(GridBox {
            lo: v[..m].to_vec(),
            hi: v[m..].to_vec(),
        })
    } else {
        Err(Failure::input(format!("--box needs 2 or {} values, got {}", 2 * m, v.len())))
    }
}

fn parse_res(text: &str, m: usize) -> Result<Vec<usize>, Failure> {
    let v: Vec<usize> = parse_list(text, "--res")?;
    match v.len() {
        1 => Ok(vec![v[0]; m]),
        n if n == m => Ok(v),
        n => Err(Failure::input(format!("--res needs 1 or {m} values, got {n}"))),
    }
}

fn write_or_return(path: Option<&Path>, text: String) -> Result<String, Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, text)
                .map_err(|e| Failure::input(format!("{}: cannot write: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn analyze(a: &AnalyzeArgs) -> Result<Output, Failure> {
    let mut spec = load(&a.file, a.tol)?;
    let m = spec.dim;
    if let Some(b) = &a.bounds {
        spec = spec.with_domain(parse_box(b, m)?);
    }
    let domain = spec
        .domain
        .clone()
        .ok_or_else(|| Failure::input(format!("{}: no `box` in the file and no --box", a.file.display())))?;
    let grid = Grid::new(domain, parse_res(&a.res, m)?).map_err(Failure::input)?;
    if let Some(h) = a.h {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Failure::input(format!("--h must be positive, got {h}")));
        }
    }
    if a.workers == Some(0) {
        return Err(Failure::input("--workers must be at least 1"));
    }
    let opts = GridOptions {
        h: a.h,
        skip_involutivity: a.skip_involutivity,
        workers: a.workers,
    };
    let rep = analyze_grid(&spec, &grid, &opts);
    let file = report::ReportFile::new(&spec, &rep);
    let text = match a.format {
        ReportFormat::Json => file.to_json(),
        ReportFormat::Csv => file.to_csv(),
    };
    let mut stderr = String::new();
    for st in &rep.strata {
        let _ = writeln!(stderr, "stratum {}: {} points", st.triple, st.count);
    }
    if rep.marginal > 0 {
        let _ = writeln!(stderr, "{} points with marginal rank decisions", rep.marginal);
    }
    for rec in &rep.points {
        if let Err(e) = &rec.result {
            let _ = writeln!(stderr, "{}: point {:?}: {e}", a.file.display(), rec.point);
        }
    }
    Ok(Output {
        stdout: write_or_return(a.out.as_deref(), text)?,
        stderr,
        code: if rep.failed > 0 { 2 } else { 0 },
    })
}

/// Rounds display noise (including `-0`) to zero.
fn clean(x: f64) -> f64 {
    if x.abs() < 5e-13 {
        0.0
    } else {
        x
    }
}

fn fmt_real(x: f64) -> String {
    format!("{:>10.6}", clean(x))
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:>9.5}{:+.5}i", clean(z.re), clean(z.im))
}

fn write_matrix<T: Copy>(out: &mut String, title: &str, m: &DMatrix<T>, f: impl Fn(T) -> String) {
    let _ = writeln!(out, "{title} ({}x{}):", m.nrows(), m.ncols());
    if m.is_empty() {
        let _ = writeln!(out, "  (empty)");
        return;
    }
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| f(m[(i, j)])).collect();
        let _ = writeln!(out, "  [{}]", row.join(" "));
    }
}

fn classify(a: &ClassifyArgs) -> Result<Output, Failure> {
    let spec = load(&a.file, a.tol)?;
    let p: Vec<f64> = parse_list(&a.point, "--point")?;
    if p.len() != spec.dim {
        return Err(Failure::input(format!(
            "--point has {} coordinates, the field has {}",
            p.len(),
            spec.dim
        )));
    }
    let l = eval_field(&spec, &p).map_err(|e| Failure::input(format!("{}: {e}", a.file.display())))?;
    let nf = normal_form(&l).map_err(|e| Failure::input(format!("normal form: {e}")))?;
    let block = nf.cr_block().map_err(|e| Failure::input(format!("CR block: {e}")))?;
    let inv = l.invariants();
    let coord = TetraCoord::new(spec.dim, nf.triple).map_err(Failure::input)?;
    let mut out = String::new();
    let _ = writeln!(out, "point: {:?}", p);
    write_matrix(&mut out, "B", &nf.b, fmt_real);
    write_matrix(&mut out, "Delta frame (columns)", nf.delta.basis(), fmt_real);
    write_matrix(&mut out, "omega_Delta", &nf.omega_delta, fmt_real);
    let _ = writeln!(out, "presymplectic block rank: {}", inv.rank_delta - (inv.r - inv.s));
    write_matrix(&mut out, "CR block C (columns)", block.c.basis(), fmt_real);
    write_matrix(&mut out, "CR block J", &block.j, fmt_real);
    write_matrix(&mut out, "T10 (columns)", nf.t10.basis(), fmt_complex);
    let _ = writeln!(out, "(r, s, k): ({}, {}, {})", nf.triple.r, nf.triple.s, nf.triple.k);
    let _ = writeln!(out, "rank Delta: {}", inv.rank_delta);
    let _ = writeln!(out, "hat_order: {}", coord.hat_order);
    let _ = writeln!(out, "roundtrip residual: {:.3e}", nf.residual);
    if inv.marginal {
        let _ = writeln!(out, "warning: marginal rank decision");
    }
    Ok(Output {
        stdout: out,
        ..Output::default()
    })
}

fn run_verify(a: &VerifyArgs) -> Output {
    let rep = verify::run(a.suite, a.seeds, &a.dims);
    Output {
        stdout: rep.to_text(),
        stderr: String::new(),
        code: if rep.passed() { 0 } else { 1 },
    }
}

fn parse_triple(text: &str) -> Result<Triple, Failure> {
    let v: Vec<usize> = parse_list(text, "--triple")?;
    match v[..] {
        [r, s, k] => Ok(Triple::new(r, s, k)),
        _ => Err(Failure::input(format!("--triple needs r,s,k, got {text:?}"))),
    }
}

fn tetra(a: &TetraArgs) -> Result<Output, Failure> {
    let (m, triples) = match (&a.file, a.triple.is_empty()) {
        (Some(path), _) => {
            let spec = load(path, None)?;
            let domain = spec
                .domain
                .clone()
                .ok_or_else(|| Failure::input(format!("{}: no `box` in the file", path.display())))?;
            let grid = Grid::uniform(domain, a.res).map_err(Failure::input)?;
            let opts = GridOptions {
                skip_involutivity: true,
                ..GridOptions::default()
            };
            let rep = analyze_grid(&spec, &grid, &opts);
            (spec.dim, rep.strata.iter().map(|s| s.triple).collect::<Vec<_>>())
        }
        (None, false) => {
            let m = a.dim.ok_or_else(|| Failure::input("--triple needs --dim"))?;
            let triples = a.triple.iter().map(|t| parse_triple(t)).collect::<Result<Vec<_>, _>>()?;
            for &t in &triples {
                TetraCoord::new(m, t).map_err(|v| {
                    Failure::input(format!("({}, {}, {}) is not admissible in dimension {m}: {v}", t.r, t.s, t.k))
                })?;
            }
            (m, triples)
        }
        (None, true) => return Err(Failure::input("give a field file or --triple r,s,k --dim m")),
    };
    let doc = tetra::document(m, &triples);
    let mut stderr = String::new();
    for q in &doc.queries {
        let _ = writeln!(
            stderr,
            "({}, {}, {}) admissible in dimension {m}, hat_order {}",
            q.r, q.s, q.k, q.hat_order
        );
    }
    let text = match a.out {
        TetraFormat::Svg => doc.to_svg(),
        TetraFormat::Json => report::to_json(&doc),
    };
    Ok(Output {
        stdout: write_or_return(a.output.as_deref(), text)?,
        stderr,
        code: 0,
    })
}

fn examples(a: &ExamplesArgs) -> Result<Output, Failure> {
    match &a.emit {
        Some(name) => {
            let entry = catalog::find(name).ok_or_else(|| {
                let names: Vec<&str> = catalog::catalog().iter().map(|e| e.name).collect();
                Failure::input(format!("unknown example {name:?}; available: {}", names.join(", ")))
            })?;
            Ok(Output {
                stdout: write_or_return(a.out.as_deref(), entry.to_toml())?,
                ..Output::default()
            })
        }
        None => {
            let mut out = String::new();
            for e in catalog::catalog() {
                let _ = writeln!(out, "{:<22} {}", e.name, e.summary);
            }
            Ok(Output {
                stdout: out,
                ..Output::default()
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> Result<Output, Failure> {
        let cli = Cli::try_parse_from(std::iter::once("cdirac").chain(args.iter().copied())).unwrap();
        execute(&cli.command)
    }

    #[test]
    fn tetra_rejections_name_the_constraint() {
        let e = exec(&["tetra", "--triple", "1,2,0", "--dim", "3"]).unwrap_err();
        assert_eq!(e.code, 1);
        assert!(e.message.contains("order ≤ real index"), "{}", e.message);
        let e = exec(&["tetra", "--triple", "0,0,1", "--dim", "3"]).unwrap_err();
        assert!(e.message.contains("parity"), "{}", e.message);
        let ok = exec(&["tetra", "--triple", "1,1,0", "--dim", "3", "--out", "json"]).unwrap();
        assert!(ok.stderr.contains("hat_order 1"));
        let v: serde_json::Value = serde_json::from_str(&ok.stdout).unwrap();
        assert_eq!(v["queries"][0]["hat_order"], 1);
    }

    #[test]
    fn box_and_res_parsing() {
        assert_eq!(parse_box("-1,1", 2).unwrap(), GridBox::cube(2, -1.0, 1.0));
        assert_eq!(parse_box("0,1,2,3", 2).unwrap().hi, vec![2.0, 3.0]);
        assert!(parse_box("0,1,2", 2).is_err());
        assert_eq!(parse_res("3,4", 2).unwrap(), vec![3, 4]);
        assert!(parse_res("x", 2).is_err());
    }

    #[test]
    fn tolerance_precedence() {
        assert_eq!(resolve_tol(Some(1e-6), Some(1e-7)).unwrap(), 1e-6);
        assert_eq!(resolve_tol(None, Some(1e-7)).unwrap(), 1e-7);
        assert!(resolve_tol(Some(-1.0), None).is_err());
    }

    #[test]
    fn examples_list_and_unknown() {
        let out = exec(&["examples", "--list"]).unwrap();
        assert!(out.stdout.contains("sec61"));
        let e = exec(&["examples", "--emit", "nope"]).unwrap_err();
        assert_eq!(e.code, 1);
    }
}
