//! Command-line front end: configuration, dispatch, and output writing.

pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::Parser;
use rayon::prelude::*;

pub use config::{parse_config, parse_config_with, Command, ConfigError, Format, Overrides, RunConfig};
pub use output::{parse_table, to_csv, to_json, Cell, Table, SCHEMA_LINE};

use crate::blockcore::matrix::{identity, op_norm, singular_values, Mat, Vector, C64};
use crate::blockcore::params::validate_params;
use crate::measure::{cauchy_transform, quadrature_measure, DiscreteMatrixMeasure};
use crate::solutions::compute_pq;
use crate::subordinacy::{jl_function, nonsub_diagnostic, spectral_consequence_report};
use crate::transfer::{lo_residual, omega_identity_residual, transfer_nstep, transfer_step};
use crate::weyl::{ac_report, boundary_scan, energy_identity_gap, weyl_resolvent, weyl_schur};
use output::{empty_cells, matrix_cells, matrix_columns};

/// Completed run: the table plus the process exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    pub exit_code: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

pub fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => to_csv(table),
        Format::Json => to_json(table),
    }
}

/// Executes the configured command. Per-row numeric failures land in the `error` column.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, ConfigError> {
    let table = match cfg.command {
        Command::Validate => validate(cfg),
        Command::Polys => polys(cfg),
        Command::TransferCheck => transfer_check(cfg),
        Command::Weyl => weyl(cfg),
        Command::WeylScan => weyl_scan(cfg),
        Command::Measure => measure(cfg),
        Command::CauchyCheck => cauchy_check(cfg)?,
        Command::Jl => jl(cfg),
        Command::Nonsub => nonsub(cfg),
        Command::Report => report(cfg),
    };
    let exit_code = if table.all_failed() { EXIT_NUMERIC } else { EXIT_OK };
    Ok(RunOutput { table, exit_code })
}

fn names(base: &[&str]) -> Vec<String> {
    base.iter().map(|s| s.to_string()).collect()
}

fn validate(cfg: &RunConfig) -> Table {
    let p = &cfg.family;
    let mut t = Table::new(names(&["n", "sigma_min_a", "hermitian_defect_b", "ok"]));
    let report = validate_params(p, cfg.n - 1);
    for n in 0..cfg.n {
        let a = p.a(n);
        let b = p.b(n);
        let smin = singular_values(&a).last().copied().unwrap_or(0.0);
        let defect = op_norm(&(&b - b.adjoint()));
        let bad: Vec<String> = report.violations.iter().filter(|v| v.n == n).map(|v| format!("{:?}", v.kind)).collect();
        let err = (!bad.is_empty()).then(|| bad.join("; "));
        t.push(vec![n.into(), smin.into(), defect.into(), bad.is_empty().into()], err);
    }
    t
}

fn polys(cfg: &RunConfig) -> Table {
    let d = cfg.family.d();
    let mut cols = names(&["z_re", "z_im", "n"]);
    cols.extend(matrix_columns("p", d));
    cols.extend(matrix_columns("q", d));
    let mut t = Table::new(cols);
    let width = 3 + 4 * d * d;
    for z in &cfg.z_list {
        match compute_pq(&cfg.family, *z, cfg.n) {
            Ok(pq) => {
                for n in -1..=(cfg.n as isize) {
                    let mut row = vec![z.re.into(), z.im.into(), n.into()];
                    row.extend(matrix_cells(pq.p(n)));
                    row.extend(matrix_cells(pq.q(n)));
                    t.push(row, None);
                }
            }
            Err(e) => {
                let mut row = vec![z.re.into(), z.im.into(), Cell::Empty];
                row.extend(empty_cells(width - 3));
                t.push(row, Some(e.to_string()));
            }
        }
    }
    t
}

fn transfer_check(cfg: &RunConfig) -> Table {
    let cols = names(&[
        "z_re",
        "z_im",
        "k",
        "step_inverse_residual",
        "nstep_inverse_residual",
        "cond_scale",
        "omega_residual",
        "omega_relative",
        "lo_r1",
        "lo_r2",
        "lo_r1_relative",
        "lo_r2_relative",
    ]);
    let mut t = Table::new(cols);
    let p = &cfg.family;
    let d2 = 2 * p.d();
    let jobs: Vec<(C64, usize)> = cfg.z_list.iter().flat_map(|z| (1..=cfg.k_max).map(move |k| (*z, k))).collect();
    let rows: Vec<_> = jobs
        .par_iter()
        .map(|&(z, k)| {
            let r = (|| -> crate::Result<Vec<Cell>> {
                let s = transfer_step(p, z, k - 1)?;
                let step_res = op_norm(&(&s.t * &s.t_inv - identity(d2)));
                let ns = transfer_nstep(p, z, k)?;
                let nres = op_norm(&(&ns.r * &ns.r_inv - identity(d2)));
                let om = omega_identity_residual(p, z, k)?;
                let lo = lo_residual(p, z, k)?;
                Ok(vec![
                    step_res.into(),
                    nres.into(),
                    ns.cond_scale.into(),
                    om.absolute.into(),
                    om.relative.into(),
                    lo.r1.into(),
                    lo.r2.into(),
                    lo.r1_relative.into(),
                    lo.r2_relative.into(),
                ])
            })();
            (z, k, r)
        })
        .collect();
    for (z, k, r) in rows {
        let mut row = vec![z.re.into(), z.im.into(), k.into()];
        match r {
            Ok(cells) => {
                row.extend(cells);
                t.push(row, None);
            }
            Err(e) => {
                row.extend(empty_cells(9));
                t.push(row, Some(e.to_string()));
            }
        }
    }
    t
}

fn weyl(cfg: &RunConfig) -> Table {
    let p = &cfg.family;
    let d = p.d();
    let mut cols = names(&["z_re", "z_im", "n"]);
    cols.extend(matrix_columns("w", d));
    cols.extend(names(&[
        "route_gap",
        "herglotz_min_eig",
        "herglotz_max_eig",
        "tail_norm",
        "energy_lhs",
        "energy_rhs",
        "energy_gap",
    ]));
    let mut t = Table::new(cols);
    let width = 2 * d * d + 7;
    let rows: Vec<_> = cfg
        .z_list
        .par_iter()
        .map(|&z| {
            let r = (|| -> crate::Result<Vec<Cell>> {
                let s = weyl_schur(p, z, cfg.n)?;
                let r = weyl_resolvent(p, z, cfg.n)?;
                let mut cells = matrix_cells(&s.w);
                cells.push(op_norm(&(&s.w - &r.w)).into());
                cells.push(s.diagnostics.herglotz_min_eig.into());
                cells.push(s.diagnostics.herglotz_max_eig.into());
                cells.push(s.diagnostics.tail_norm.into());
                if z.im != 0.0 {
                    let mut e1 = Vector::zeros(d);
                    e1[0] = C64::new(1.0, 0.0);
                    let e = energy_identity_gap(p, z, cfg.n, &e1)?;
                    cells.extend([e.lhs.into(), e.rhs.into(), e.gap.into()]);
                } else {
                    cells.extend(empty_cells(3));
                }
                Ok(cells)
            })();
            (z, r)
        })
        .collect();
    for (z, r) in rows {
        let mut row = vec![z.re.into(), z.im.into(), cfg.n.into()];
        match r {
            Ok(cells) => {
                row.extend(cells);
                t.push(row, None);
            }
            Err(e) => {
                row.extend(empty_cells(width));
                t.push(row, Some(e.to_string()));
            }
        }
    }
    t
}

fn weyl_scan(cfg: &RunConfig) -> Table {
    let p = &cfg.family;
    let d = p.d();
    let mut cols = names(&["lambda", "eps", "n"]);
    cols.extend(matrix_columns("w", d));
    cols.extend(names(&["tr_im", "classification"]));
    cols.extend(matrix_columns("density", d));
    let mut t = Table::new(cols);
    let scan = match boundary_scan(p, &cfg.lambda_grid, &cfg.eps_ladder, cfg.n_rule, cfg.thresholds) {
        Ok(s) => s,
        Err(e) => {
            for &lambda in &cfg.lambda_grid {
                let mut row = vec![lambda.into()];
                row.extend(empty_cells(t.columns.len() - 2));
                t.push(row, Some(e.to_string()));
            }
            return t;
        }
    };
    for r in &scan.results {
        let last = r.points.len() - 1;
        for (i, pt) in r.points.iter().enumerate() {
            let mut row = vec![r.lambda.into(), pt.eps.into(), pt.n.into()];
            match &pt.w {
                Some(w) => row.extend(matrix_cells(w)),
                None => row.extend(empty_cells(2 * d * d)),
            }
            row.push(pt.tr_im().into());
            row.push(r.classification.label().into());
            match (&r.density, i == last) {
                (Some(dens), true) => row.extend(matrix_cells(dens)),
                _ => row.extend(empty_cells(2 * d * d)),
            }
            t.push(row, pt.error.clone());
        }
    }
    t
}

fn measure_table(d: usize) -> Table {
    let mut cols = names(&["lambda"]);
    cols.extend(matrix_columns("w", d));
    Table::new(cols)
}

fn measure(cfg: &RunConfig) -> Table {
    let d = cfg.family.d();
    let mut t = measure_table(d);
    match quadrature_measure(&cfg.family, cfg.n) {
        Ok(m) => {
            for (lambda, w) in m.atoms() {
                let mut row = vec![(*lambda).into()];
                row.extend(matrix_cells(w));
                t.push(row, None);
            }
        }
        Err(e) => t.push(empty_cells(1 + 2 * d * d), Some(e.to_string())),
    }
    t
}

/// Rebuilds a measure from the rows written by the `measure` command.
pub fn measure_from_table(t: &Table, d: usize) -> Result<DiscreteMatrixMeasure, String> {
    let lambda_col = t.column("lambda").ok_or("measure table has no `lambda` column")?;
    let mut idx = Vec::with_capacity(2 * d * d);
    for name in matrix_columns("w", d) {
        idx.push(t.column(&name).ok_or_else(|| format!("measure table lacks column `{name}` for d = {d}"))?);
    }
    let num = |c: &Cell, what: &str| match c {
        Cell::Num(x) => Ok(*x),
        _ => Err(format!("non-numeric {what}")),
    };
    let mut atoms = Vec::with_capacity(t.rows.len());
    for row in &t.rows {
        let lambda = num(&row[lambda_col], "lambda")?;
        let mut w = Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let k = 2 * (i * d + j);
                w[(i, j)] = C64::new(num(&row[idx[k]], "weight")?, num(&row[idx[k + 1]], "weight")?);
            }
        }
        atoms.push((lambda, w));
    }
    DiscreteMatrixMeasure::new(d, atoms).map_err(|e| e.to_string())
}

fn cauchy_check(cfg: &RunConfig) -> Result<Table, ConfigError> {
    let p = &cfg.family;
    let d = p.d();
    let from_file = match &cfg.measure_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read measure file {}: {e}", path.display())))?;
            let table = parse_table(&text).map_err(|e| ConfigError(format!("measure file {}: {e}", path.display())))?;
            Some(
                measure_from_table(&table, d)
                    .map_err(|e| ConfigError(format!("measure file {}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let n_list: Vec<usize> = if from_file.is_some() { vec![cfg.n] } else { cfg.n_list.clone() };
    let source = if from_file.is_some() { "file" } else { "quadrature" };
    let mut t = Table::new(names(&["n", "z_re", "z_im", "source", "atoms", "gap"]));
    let jobs: Vec<(usize, C64)> = n_list.iter().flat_map(|n| cfg.z_list.iter().map(move |z| (*n, *z))).collect();
    let rows: Vec<_> = jobs
        .par_iter()
        .map(|&(n, z)| {
            let r = (|| -> crate::Result<(usize, f64)> {
                let m = match &from_file {
                    Some(m) => m.clone(),
                    None => quadrature_measure(p, n)?,
                };
                let c = cauchy_transform(&m, z)?;
                let w = weyl_resolvent(p, z, n)?.w;
                Ok((m.atoms().len(), op_norm(&(c - w))))
            })();
            (n, z, r)
        })
        .collect();
    for (n, z, r) in rows {
        let head = vec![n.into(), z.re.into(), z.im.into(), source.into()];
        match r {
            Ok((atoms, gap)) => t.push([head, vec![atoms.into(), gap.into()]].concat(), None),
            Err(e) => t.push([head, empty_cells(2)].concat(), Some(e.to_string())),
        }
    }
    Ok(t)
}

fn jl(cfg: &RunConfig) -> Table {
    let mut t = Table::new(names(&["lambda", "eps", "ell", "residual", "horizon"]));
    let jobs: Vec<(f64, f64)> = cfg.lambda_grid.iter().flat_map(|l| cfg.jl_eps.iter().map(move |e| (*l, *e))).collect();
    let rows: Vec<_> = jobs.par_iter().map(|&(l, e)| (l, e, jl_function(&cfg.family, l, e, cfg.seminorm))).collect();
    for (lambda, eps, r) in rows {
        match r {
            Ok(s) => t.push(vec![lambda.into(), eps.into(), s.ell.into(), s.residual.into(), s.horizon.into()], None),
            Err(e) => {
                t.push(vec![lambda.into(), eps.into(), Cell::Empty, Cell::Empty, Cell::Empty], Some(e.to_string()))
            }
        }
    }
    t
}

fn nonsub(cfg: &RunConfig) -> Table {
    let mut t = Table::new(names(&["lambda", "t", "cond", "verdict", "growth_rate", "cap"]));
    let rows: Vec<_> =
        cfg.lambda_grid.par_iter().map(|&l| (l, nonsub_diagnostic(&cfg.family, l, &cfg.t_grid, cfg.cap))).collect();
    for (lambda, r) in rows {
        match r {
            Ok(diag) => {
                for (tt, cond) in &diag.cond_trajectory {
                    t.push(
                        vec![
                            lambda.into(),
                            (*tt).into(),
                            (*cond).into(),
                            diag.verdict.label().into(),
                            diag.growth_rate.into(),
                            diag.cap.into(),
                        ],
                        None,
                    );
                }
            }
            Err(e) => t.push(
                vec![lambda.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, cfg.cap.into()],
                Some(e.to_string()),
            ),
        }
    }
    t
}

fn report(cfg: &RunConfig) -> Table {
    let mut t = Table::new(names(&["kind", "lo", "hi", "has_ac", "max_rank", "note"]));
    let note = "heuristic numerical report on a finite grid; not a proof";
    match boundary_scan(&cfg.family, &cfg.lambda_grid, &cfg.eps_ladder, cfg.n_rule, cfg.thresholds) {
        Ok(scan) => {
            let rep = ac_report(&scan);
            for iv in &rep.intervals {
                let kind = if iv.has_ac { "ac_interval" } else { "gap_interval" };
                t.push(
                    vec![kind.into(), iv.lo.into(), iv.hi.into(), iv.has_ac.into(), iv.max_rank.into(), note.into()],
                    None,
                );
            }
            for l in &rep.sing_candidates {
                t.push(
                    vec!["sing_candidate".into(), (*l).into(), (*l).into(), false.into(), Cell::Empty, note.into()],
                    None,
                );
            }
            for l in &rep.undecided {
                t.push(
                    vec!["undecided".into(), (*l).into(), (*l).into(), false.into(), Cell::Empty, note.into()],
                    None,
                );
            }
            // Nonsubordinacy at the grid centre backs the a.c. claim with a second, independent signal.
            let centre = cfg.lambda_grid[cfg.lambda_grid.len() / 2];
            let claim = nonsub_diagnostic(&cfg.family, centre, &cfg.t_grid, cfg.cap)
                .and_then(|d| spectral_consequence_report(&cfg.family, &d, cfg.self_adjoint));
            match claim {
                Ok(r) => {
                    let text = r.claim.unwrap_or(r.reason);
                    t.push(
                        vec![
                            "nonsub_claim".into(),
                            centre.into(),
                            centre.into(),
                            Cell::Empty,
                            Cell::Empty,
                            text.into(),
                        ],
                        None,
                    )
                }
                Err(e) => t.push(
                    vec!["nonsub_claim".into(), centre.into(), centre.into(), Cell::Empty, Cell::Empty, note.into()],
                    Some(e.to_string()),
                ),
            }
        }
        Err(e) => t.push(
            vec!["scan".into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, note.into()],
            Some(e.to_string()),
        ),
    }
    t
}

/// Command-line arguments of the `bjweyl` binary.
#[derive(Debug, Parser)]
#[command(name = "bjweyl", version, about = "Block Jacobi operators: Weyl function, spectral measures, subordinacy")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// validate | polys | transfer-check | weyl | weyl-scan | measure | cauchy-check | jl | nonsub | report
    #[arg(long)]
    pub command: Option<String>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
    /// Truncation size.
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "lambda-min", allow_negative_numbers = true)]
    pub lambda_min: Option<f64>,
    #[arg(long = "lambda-max", allow_negative_numbers = true)]
    pub lambda_max: Option<f64>,
    #[arg(long = "lambda-steps")]
    pub lambda_steps: Option<usize>,
    /// Comma-separated, strictly decreasing, e.g. "0.1,0.01,0.001".
    #[arg(long = "eps-ladder")]
    pub eps_ladder: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// norm | minmod
    #[arg(long)]
    pub seminorm: Option<String>,
    /// Condition-number cap of the nonsubordinacy verdict.
    #[arg(long)]
    pub cap: Option<f64>,
}

impl Cli {
    pub fn overrides(&self) -> Result<Overrides, ConfigError> {
        let eps_ladder = match &self.eps_ladder {
            Some(s) => Some(
                s.split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|e| ConfigError(format!("--eps-ladder entry `{x}`: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        Ok(Overrides {
            command: self.command.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
            n: self.n,
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            lambda_steps: self.lambda_steps,
            eps_ladder,
            seed: self.seed,
            seminorm: self.seminorm.clone(),
            cap: self.cap,
        })
    }

    pub fn load(&self) -> Result<RunConfig, ConfigError> {
        let overrides = self.overrides()?;
        let (text, base) = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
                let base = path.parent().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
                (text, base)
            }
            None => (String::new(), PathBuf::from(".")),
        };
        parse_config_with(&text, &base, &overrides)
    }
}

/// Parses arguments, runs, writes the output, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let cfg = match cli.load() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let out = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let text = render(&out.table, cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
        None => print!("{text}"),
    }
    if out.exit_code == EXIT_NUMERIC {
        eprintln!("error: every row failed; see the error column");
    }
    out.exit_code
}
