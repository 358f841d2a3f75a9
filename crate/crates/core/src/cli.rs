//! Command-line front end: table reproduction, grid dumps of the hitting
//! laws, fee solving, the equivalence check and the verification report.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::map_indices;
use crate::gmwb::{
    self, equivalence_residual, solve_fair_fee, table_template, ModelParams, Side, TABLE1_BP,
    TABLE2_BP, TABLE2_LINK, TABLE_SIGMAS, TABLE_WITHDRAWAL_RATES,
};
use crate::hitting::{
    cdf_a, density_h_first, density_h_second, laplace_h, TauLaw, YorParams,
};
use crate::mc::{self, McConfig};
use crate::stats::{ks_two_sample, Estimate};

/// Exit code when a checked table deviates from the published values.
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gmwb", version, about = "Hitting-time laws and GMWB fair fees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fair fees with m = m_w on the published grid.
    Table1(TableArgs),
    /// Fair fees with m_w = 0.8m on the published grid.
    Table2(TableArgs),
    /// Fair fee for one contract.
    FairFee(FeeArgs),
    /// Density of a hitting time on a grid.
    Density(LawArgs),
    /// Distribution function on a grid.
    Cdf(LawArgs),
    /// Laplace transform on a grid of s.
    Laplace(LawArgs),
    /// Analytic and Monte Carlo verification report (JSON).
    McVerify(VerifyArgs),
    /// Dynkin residual of the pricing equations on a grid of fees.
    Equivalence(EquivalenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideChoice {
    Policyholder,
    Insurer,
    Both,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Exit with code 2 if any cell is more than 1 bp off the published value.
    #[arg(long)]
    pub check: bool,
    /// Pricing equation; defaults to policyholder for table1, insurer for table2.
    #[arg(long, value_enum)]
    pub side: Option<SideChoice>,
    /// Compute cells one after another.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct ContractArgs {
    #[arg(long, default_value_t = 0.05)]
    pub r: f64,
    #[arg(long, default_value_t = 0.2)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100.0)]
    pub g: f64,
    #[arg(long, default_value_t = 5.0)]
    pub w: f64,
}

#[derive(Debug, Args)]
pub struct FeeArgs {
    #[command(flatten)]
    pub contract: ContractArgs,
    #[arg(long, value_enum, default_value_t = Side::Policyholder)]
    pub side: Side,
    /// m_w / m.
    #[arg(long, default_value_t = 1.0)]
    pub fee_link: f64,
}

#[derive(Debug, Args)]
pub struct EquivalenceArgs {
    #[command(flatten)]
    pub contract: ContractArgs,
    /// Single fee level; overrides --grid.
    #[arg(long)]
    pub m: Option<f64>,
    /// m_w, which must equal m for the identity.
    #[arg(long)]
    pub mw: Option<f64>,
    #[arg(long, default_value = "0.001:0.03:5")]
    pub grid: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Law {
    /// Passage time H_a of Yor's process.
    H,
    /// Passage time to zero of the reduced process.
    Tau,
    /// Yor's process A_t itself.
    A,
}

#[derive(Debug, Args)]
pub struct LawArgs {
    #[arg(long, value_enum, default_value_t = Law::H)]
    pub law: Law,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub nu: f64,
    /// Level a of H, or starting point y of τ.
    #[arg(long, default_value_t = 0.5)]
    pub level: f64,
    /// Time at which the law of A is taken.
    #[arg(long, default_value_t = 0.2)]
    pub t: f64,
    #[arg(long, default_value = "0.1:3:30")]
    pub grid: Grid,
    /// For H, emit both representations side by side.
    #[arg(long)]
    pub both: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 20_160_601)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub paths: usize,
    /// Time step in reduced units.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long)]
    pub skip_mc: bool,
}

/// Evenly spaced points lo..=hi, written lo:hi:n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:n, got {s:?}"));
        }
        let lo: f64 = parts[0].parse().map_err(|e| format!("lo: {e}"))?;
        let hi: f64 = parts[1].parse().map_err(|e| format!("hi: {e}"))?;
        let n: usize = parts[2].parse().map_err(|e| format!("n: {e}"))?;
        if n == 0 || !(hi >= lo) {
            return Err(format!("empty grid {s:?}"));
        }
        Ok(Grid { lo, hi, n })
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|k| self.lo + step * k as f64).collect()
    }
}

/// One output value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(v) => write!(f, "{v}"),
        }
    }
}

/// Rows under a header, rendered as CSV or as a JSON array of objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Frame {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
                    s.push_str(&line.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let objs: Vec<serde_json::Map<String, serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|row| {
                        self.header
                            .iter()
                            .zip(row)
                            .map(|(k, v)| (k.to_string(), serde_json::to_value(v).unwrap_or_default()))
                            .collect()
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&objs).unwrap_or_default();
                s.push('\n');
                s
            }
        }
    }
}

/// What a command produced: text to write and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn cell_coords(sigma: f64, rate: f64) -> String {
    format!("(w/G={rate}, sigma={sigma})")
}

/// The ten (σ index, rate index) cells of a table in output order.
fn table_cells() -> Vec<(usize, usize)> {
    (0..TABLE_SIGMAS.len())
        .flat_map(|i| (0..TABLE_WITHDRAWAL_RATES.len()).map(move |j| (i, j)))
        .collect()
}

/// Fair fees in per-year units for one table, keyed like the published arrays.
pub struct TableRun {
    pub which: u8,
    pub sides: Vec<Side>,
    /// Per cell and side: the solved fee or the solver error.
    pub results: Vec<Vec<Result<gmwb::FairFee>>>,
}

pub fn compute_table(which: u8, sides: &[Side], parallel: bool) -> TableRun {
    let link = if which == 1 { 1.0 } else { TABLE2_LINK };
    let cells = table_cells();
    let jobs: Vec<(usize, Side)> = (0..cells.len())
        .flat_map(|c| sides.iter().map(move |&s| (c, s)))
        .collect();
    let solved = map_indices(jobs.len(), parallel, |k| {
        let (c, side) = jobs[k];
        let (i, j) = cells[c];
        solve_fair_fee(side, &table_template(TABLE_SIGMAS[i], TABLE_WITHDRAWAL_RATES[j]), link)
    });
    let mut it = solved.into_iter();
    let results = cells
        .iter()
        .map(|_| sides.iter().map(|_| it.next().expect("one result per job")).collect())
        .collect();
    TableRun {
        which,
        sides: sides.to_vec(),
        results,
    }
}

/// Published values as per-year fees, (m, m_w).
pub fn golden_fees(which: u8) -> Vec<(f64, f64)> {
    table_cells()
        .into_iter()
        .map(|(i, j)| {
            if which == 1 {
                let m = TABLE1_BP[i][j] as f64 * 1e-4;
                (m, m)
            } else {
                let (m, mw) = TABLE2_BP[i][j];
                (m as f64 * 1e-4, mw as f64 * 1e-4)
            }
        })
        .collect()
}

/// Cells deviating from `golden` by more than 1 bp (plus rounding slack).
pub fn table_deviations(run: &TableRun, golden: &[(f64, f64)]) -> Vec<String> {
    let mut bad = Vec::new();
    for ((c, per_side), &(gm, gmw)) in table_cells().iter().zip(&run.results).zip(golden) {
        let (i, j) = *c;
        for (side, r) in run.sides.iter().zip(per_side) {
            let at = cell_coords(TABLE_SIGMAS[i], TABLE_WITHDRAWAL_RATES[j]);
            match r {
                Ok(f) => {
                    let dm = (f.m_bp as f64 * 1e-4 - gm).abs();
                    let dmw = (f.m_w_bp as f64 * 1e-4 - gmw).abs();
                    if dm > 1e-4 + 1e-12 || (run.which == 2 && dmw > 1e-4 + 1e-12) {
                        bad.push(format!(
                            "{at} {side:?}: got {}/{} bp, published {:.0}/{:.0}",
                            f.m_bp,
                            f.m_w_bp,
                            gm * 1e4,
                            gmw * 1e4
                        ));
                    }
                }
                Err(e) => bad.push(format!("{at} {side:?}: {e}")),
            }
        }
    }
    bad
}

fn table_frame(run: &TableRun) -> Frame {
    let two_sides = run.sides.len() > 1;
    let mut header = vec!["w_over_G", "sigma"];
    if two_sides {
        header.push("side");
    }
    header.push("m_bp");
    if run.which == 2 {
        header.push("m_w_bp");
    }
    let mut rows = Vec::new();
    for (&(i, j), per_side) in table_cells().iter().zip(&run.results) {
        for (side, r) in run.sides.iter().zip(per_side) {
            let mut row = vec![Cell::Num(TABLE_WITHDRAWAL_RATES[j]), Cell::Num(TABLE_SIGMAS[i])];
            if two_sides {
                row.push(Cell::Text(side_name(*side).into()));
            }
            match r {
                Ok(f) => {
                    row.push(Cell::Int(f.m_bp));
                    if run.which == 2 {
                        row.push(Cell::Int(f.m_w_bp));
                    }
                }
                Err(_) => {
                    row.push(Cell::Num(f64::NAN));
                    if run.which == 2 {
                        row.push(Cell::Num(f64::NAN));
                    }
                }
            }
            rows.push(row);
        }
    }
    Frame { header, rows }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Policyholder => "policyholder",
        Side::Insurer => "insurer",
    }
}

fn resolve_sides(which: u8, choice: Option<SideChoice>) -> Vec<Side> {
    let default = if which == 1 { SideChoice::Policyholder } else { SideChoice::Insurer };
    match choice.unwrap_or(default) {
        SideChoice::Policyholder => vec![Side::Policyholder],
        SideChoice::Insurer => vec![Side::Insurer],
        SideChoice::Both => vec![Side::Policyholder, Side::Insurer],
    }
}

pub fn run_table(which: u8, args: &TableArgs, format: Format) -> Outcome {
    let run = compute_table(which, &resolve_sides(which, args.side), !args.sequential);
    let mut code = 0;
    for (&(i, j), per_side) in table_cells().iter().zip(&run.results) {
        for (side, r) in run.sides.iter().zip(per_side) {
            if let Err(e) = r {
                eprintln!(
                    "cell {} {}: {e}",
                    cell_coords(TABLE_SIGMAS[i], TABLE_WITHDRAWAL_RATES[j]),
                    side_name(*side)
                );
                code = 1;
            }
        }
    }
    if args.check {
        let bad = table_deviations(&run, &golden_fees(which));
        for b in &bad {
            eprintln!("check failed: {b}");
        }
        if !bad.is_empty() {
            code = EXIT_CHECK_FAILED;
        }
    }
    Outcome {
        text: table_frame(&run).render(format),
        code,
    }
}

fn contract(c: &ContractArgs, m: f64, m_w: f64) -> Result<ModelParams> {
    ModelParams::new(c.r, c.sigma, c.g, c.w, m, m_w)
}

pub fn run_fair_fee(args: &FeeArgs, format: Format) -> Result<Outcome> {
    let template = contract(&args.contract, 0.0, 0.0)?;
    let f = solve_fair_fee(args.side, &template, args.fee_link)?;
    let frame = Frame {
        header: vec!["side", "m", "m_w", "m_bp", "m_w_bp"],
        rows: vec![vec![
            Cell::Text(side_name(args.side).into()),
            Cell::Num(f.m),
            Cell::Num(f.m_w),
            Cell::Int(f.m_bp),
            Cell::Int(f.m_w_bp),
        ]],
    };
    Ok(Outcome {
        text: frame.render(format),
        code: 0,
    })
}

/// Evaluates `f` on every grid point; failures become NaN with a note on stderr.
fn grid_columns<F>(points: &[f64], columns: usize, f: F) -> (Vec<Vec<Cell>>, bool)
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync + Send,
{
    let values = map_indices(points.len(), true, |k| f(points[k]));
    let mut failed = false;
    let rows = points
        .iter()
        .zip(values)
        .map(|(&x, v)| {
            let mut row = vec![Cell::Num(x)];
            match v {
                Ok(vals) => row.extend(vals.into_iter().map(Cell::Num)),
                Err(e) => {
                    eprintln!("point {x}: {e}");
                    failed = true;
                    row.extend(std::iter::repeat_n(Cell::Num(f64::NAN), columns));
                }
            }
            row
        })
        .collect();
    (rows, failed)
}

fn law_outcome(header: Vec<&'static str>, rows: (Vec<Vec<Cell>>, bool), format: Format) -> Outcome {
    let (rows, failed) = rows;
    Outcome {
        text: Frame { header, rows }.render(format),
        code: if failed { 1 } else { 0 },
    }
}

pub fn run_density(args: &LawArgs, format: Format) -> Result<Outcome> {
    let pts = args.grid.points();
    match args.law {
        Law::H => {
            let p = YorParams::new(args.nu, args.level)?;
            if args.both {
                let rows = grid_columns(&pts, 2, |u| {
                    Ok(vec![density_h_first(&p, u)?, density_h_second(&p, u)?])
                });
                Ok(law_outcome(vec!["u", "density_first", "density_second"], rows, format))
            } else {
                let rows = grid_columns(&pts, 1, |u| Ok(vec![density_h_second(&p, u)?]));
                Ok(law_outcome(vec!["u", "density"], rows, format))
            }
        }
        Law::Tau => {
            let law = TauLaw::new(args.nu, args.level)?;
            let rows = grid_columns(&pts, 1, |t| Ok(vec![law.density(t)?]));
            Ok(law_outcome(vec!["u", "density"], rows, format))
        }
        Law::A => Err(Error::domain("density", "A has a distribution function only; use cdf")),
    }
}

pub fn run_cdf(args: &LawArgs, format: Format) -> Result<Outcome> {
    let pts = args.grid.points();
    match args.law {
        Law::H => {
            let nu = args.nu;
            let a = args.level;
            YorParams::new(nu, a)?;
            // P(H_a ≤ u) = 1 − P(A_u < a)
            let rows = grid_columns(&pts, 1, |u| Ok(vec![1.0 - cdf_a(nu, u, a)?]));
            Ok(law_outcome(vec!["u", "cdf"], rows, format))
        }
        Law::Tau => {
            let law = TauLaw::new(args.nu, args.level)?;
            let rows = grid_columns(&pts, 1, |t| Ok(vec![law.cdf(t)?]));
            Ok(law_outcome(vec!["u", "cdf"], rows, format))
        }
        Law::A => {
            let (nu, t) = (args.nu, args.t);
            let rows = grid_columns(&pts, 1, |y| Ok(vec![cdf_a(nu, t, y)?]));
            Ok(law_outcome(vec!["y", "cdf"], rows, format))
        }
    }
}

pub fn run_laplace(args: &LawArgs, format: Format) -> Result<Outcome> {
    let pts = args.grid.points();
    match args.law {
        Law::H => {
            let p = YorParams::new(args.nu, args.level)?;
            let rows = grid_columns(&pts, 1, |s| Ok(vec![laplace_h(&p, s)?]));
            Ok(law_outcome(vec!["s", "laplace"], rows, format))
        }
        Law::Tau => {
            let law = TauLaw::new(args.nu, args.level)?;
            let rows = grid_columns(&pts, 1, |s| Ok(vec![law.laplace(s)?]));
            Ok(law_outcome(vec!["s", "laplace"], rows, format))
        }
        Law::A => Err(Error::domain("laplace", "no transform is provided for A")),
    }
}

pub fn run_equivalence(args: &EquivalenceArgs, format: Format) -> Result<Outcome> {
    let fees = match args.m {
        Some(m) => vec![m],
        None => args.grid.points(),
    };
    if let (Some(m), Some(mw)) = (args.m, args.mw) {
        if m != mw {
            return Err(Error::domain("equivalence", "the identity needs m = m_w"));
        }
    }
    let mut rows = Vec::new();
    for m in fees {
        let mp = contract(&args.contract, m, m)?;
        let res = equivalence_residual(&mp)?;
        rows.push(vec![Cell::Num(m), Cell::Num(res), Cell::Num(res / mp.g)]);
    }
    Ok(Outcome {
        text: Frame {
            header: vec!["m", "residual", "relative_residual"],
            rows,
        }
        .render(format),
        code: 0,
    })
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The quantity compared against the threshold.
    pub statistic: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Inputs of the verification suite. `golden_table1` lets tests inject a
/// tampered copy of the published values.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub skip_mc: bool,
    pub mc: McConfig,
    pub golden_table1: Vec<(f64, f64)>,
}

impl VerifyOptions {
    pub fn new(skip_mc: bool, mc: McConfig) -> Self {
        Self {
            skip_mc,
            mc,
            golden_table1: golden_fees(1),
        }
    }
}

fn check_from(name: &str, stat: Result<f64>, threshold: f64, detail: String) -> Check {
    match stat {
        Ok(v) => Check {
            name: name.into(),
            passed: v <= threshold,
            statistic: v,
            threshold,
            detail,
        },
        Err(e) => Check {
            name: name.into(),
            passed: false,
            statistic: f64::NAN,
            threshold,
            detail: e.to_string(),
        },
    }
}

fn representation_gap() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(nu, a) in &[(0.0, 0.5), (1.0, 0.5), (2.0, 1.0)] {
        let p = YorParams::new(nu, a)?;
        for &u in &[0.2, 0.7, 1.5] {
            worst = worst.max((density_h_first(&p, u)? - density_h_second(&p, u)?).abs());
        }
    }
    Ok(worst)
}

fn laplace_density_gap() -> Result<f64> {
    use crate::quad::{integrate_finite, integrate_semi_infinite, QuadConfig};
    let mut worst: f64 = 0.0;
    let cfg = QuadConfig::with_tolerances(1e-10, 1e-14);
    for &(nu, y, s) in &[(1.0, 0.5, 1.0), (-0.5, 0.3, 0.5), (3.3, 0.3, 2.0)] {
        let law = TauLaw::new(nu, y)?;
        let f = |u: f64| -> Result<f64> { Ok((-s * u).exp() * law.density(u)?) };
        let head = integrate_finite(|u| f(u).unwrap_or(f64::NAN), 0.0, 2.0, &cfg)?;
        let tail: f64 = integrate_semi_infinite(f, 2.0, 2.0, &cfg)?;
        let exact = law.laplace(s)?;
        worst = worst.max(((head + tail) - exact).abs() / exact);
    }
    Ok(worst)
}

fn equivalence_gap() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(sigma, rate, m) in &[(0.2, 0.05, 0.004), (0.3, 0.07, 0.02), (0.25, 0.09, 0.011)] {
        let mp = table_template(sigma, rate).with_fee(m, 1.0);
        worst = worst.max(equivalence_residual(&mp)?.abs() / mp.g);
    }
    Ok(worst)
}

fn golden_gap(golden: &[(f64, f64)]) -> Result<f64> {
    let run = compute_table(1, &[Side::Policyholder, Side::Insurer], true);
    let mut worst: f64 = 0.0;
    for (per_side, &(gm, _)) in run.results.iter().zip(golden) {
        for r in per_side {
            let f = r.as_ref().map_err(|e| Error::domain("golden table", e.to_string()))?;
            worst = worst.max((f.m_bp as f64 * 1e-4 - gm).abs());
        }
    }
    Ok(worst)
}

fn z_check(name: &str, est: Result<Estimate>, target: f64) -> Check {
    let detail = match &est {
        Ok(e) => format!("mean {} ± {} vs {}", e.mean, e.std_error, target),
        Err(_) => String::new(),
    };
    check_from(name, est.map(|e| e.z_score(target)), 3.0, detail)
}

pub fn run_verify(opts: &VerifyOptions) -> Report {
    let mut checks = vec![
        check_from(
            "representation_equivalence",
            representation_gap(),
            1e-6,
            "max |first − second| over (nu, a, u)".into(),
        ),
        check_from(
            "laplace_density_consistency",
            laplace_density_gap(),
            1e-6,
            "max relative gap between transformed density and closed form".into(),
        ),
        check_from(
            "equivalence_residual",
            equivalence_gap(),
            1e-5,
            "max |residual|/G at non-fair fees".into(),
        ),
        check_from(
            "table1_golden",
            golden_gap(&opts.golden_table1),
            1e-4 + 1e-12,
            "max |fee − published| per year, both sides".into(),
        ),
    ];
    if !opts.skip_mc {
        let cfg = opts.mc;
        let ks = (|| -> Result<f64> {
            let h = mc::simulate_hitting_h(0.5, 0.5, &cfg)?;
            let t = mc::simulate_hitting_tau(-0.5, 0.5, &McConfig { seed: cfg.seed ^ 0x9e37, ..cfg })?;
            Ok(ks_two_sample(&h.times, &t.times)?.p_value)
        })();
        checks.push(Check {
            threshold: 0.01,
            passed: matches!(ks, Ok(p) if p > 0.01),
            statistic: ks.as_ref().copied().unwrap_or(f64::NAN),
            name: "identity_in_distribution".into(),
            detail: "KS p-value of H(0.5, 0.5) against tau(-0.5, 0.5)".into(),
        });
        let escaped = (|| -> Result<Estimate> {
            let s = mc::simulate_hitting_tau(2.0, 0.3, &cfg)?;
            let xs: Vec<f64> = s.times.iter().map(|t| if t.is_finite() { 0.0 } else { 1.0 }).collect();
            Ok(Estimate::from_samples(&xs))
        })();
        let target = TauLaw::new(2.0, 0.3).map(|l| 1.0 - l.prob_finite()).unwrap_or(f64::NAN);
        checks.push(z_check("censored_mass", escaped, target));
        let mp = table_template(0.2, 0.05).with_fee(0.012, 1.0);
        let dynkin = mc::simulate_gmwb(&mp, &cfg).map(|e| e.dynkin_lhs);
        checks.push(z_check("dynkin_identity_mc", dynkin, mp.g));
    }
    Report {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

/// Runs a parsed command and returns its output without writing it.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let f = cli.format;
    match &cli.command {
        Command::Table1(a) => Ok(run_table(1, a, f)),
        Command::Table2(a) => Ok(run_table(2, a, f)),
        Command::FairFee(a) => run_fair_fee(a, f),
        Command::Density(a) => run_density(a, f),
        Command::Cdf(a) => run_cdf(a, f),
        Command::Laplace(a) => run_laplace(a, f),
        Command::Equivalence(a) => run_equivalence(a, f),
        Command::McVerify(a) => {
            let mc = McConfig {
                n_paths: a.paths,
                dt: a.dt,
                seed: a.seed,
                ..McConfig::default()
            };
            let report = run_verify(&VerifyOptions::new(a.skip_mc, mc));
            let mut text = serde_json::to_string_pretty(&report).unwrap_or_default();
            text.push('\n');
            Ok(Outcome {
                code: if report.passed { 0 } else { 1 },
                text,
            })
        }
    }
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli.out, &outcome.text) {
                eprintln!("gmwb: cannot write output: {e}");
                return 1;
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("gmwb: {e}");
            1
        }
    }
}
