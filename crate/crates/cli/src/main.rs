mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{load_file_config, parse_domain, parse_pole, FileConfig, RunConfig};
use minpart_core::constants::ConstantLedger;
use minpart_core::eigen::{richardson, smallest_eigenpairs, Spectrum};
use minpart_core::geometry::{build_grid, default_cuts, PoleConfig};
use minpart_core::operator::assemble_ab_with_gauge;
use minpart_core::partition::{
    euler_check, extract_partition, hexa1_energy, hexagonal_diagnostic, partition_energies,
    partition_to_pgm, CriticalPoint, EulerReport,
};
use minpart_core::search::search_minimal_partition;
use minpart_core::weyl::{min_t_for_wq, CountReport};
use minpart_core::{DomainSpec64, Error as CoreError};

#[derive(Parser)]
#[command(
    name = "minpart",
    version,
    about = "Spectral minimal partitions, flux-pi operators and counting certificates on planar grids"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// JSON config file; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (also MINPART_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct DomainOpts {
    /// Domain: unit_square | disk:R | rectangle:WxH | regular_polygon:N:AREA
    /// or inline JSON like {"shape":"unit_square"}.
    #[arg(long)]
    domain: Option<String>,
    /// Grid spacing.
    #[arg(long)]
    h: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form constant ledger as JSON.
    Constants {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Exact unit-square counting versus both closed-form bounds (CSV).
    Weyl {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Also scan for the empirical threshold of n(t) >= (1-eps) t^2/4pi.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Low eigenpairs of the (gauged) operator on a domain.
    Solve {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        domain: DomainOpts,
        /// Number of eigenvalues.
        #[arg(long)]
        k: Option<usize>,
        /// Pole positions, repeatable: --pole x,y
        #[arg(long = "pole", value_parser = parse_pole)]
        pole_positions: Vec<[f64; 2]>,
        /// Two-grid (h, h/2) eigenvalue extrapolation.
        #[arg(long)]
        richardson: bool,
        /// Assumed convergence order for --richardson.
        #[arg(long, default_value_t = 2.0)]
        order: f64,
        /// Dump the assembled matrix in `row col value` text form.
        #[arg(long)]
        dump_matrix: bool,
        /// Dump the grid (indices, coordinates) as diagnostic JSON.
        #[arg(long)]
        dump_grid: bool,
    },
    /// Nodal partition of the k-th eigenfunction.
    Partition {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        domain: DomainOpts,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "pole", value_parser = parse_pole)]
        pole_positions: Vec<[f64; 2]>,
        /// Relative zero threshold for the nodal set.
        #[arg(long)]
        zero_tol: Option<f64>,
    },
    /// Maximize lambda_k over pole positions and extract the partition.
    Search {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        domain: DomainOpts,
        #[arg(long)]
        k: Option<usize>,
        /// Number of poles to optimize.
        #[arg(long)]
        poles: Option<usize>,
        /// Objective evaluation budget.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        zero_tol: Option<f64>,
    },
    /// Tiling, superadditivity and lower-bound evaluation for one instance.
    Certify {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        domain: DomainOpts,
        #[arg(long)]
        k: Option<usize>,
        /// Partition energy L_k to certify at.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long = "pole", value_parser = parse_pole)]
        pole_positions: Vec<[f64; 2]>,
    },
    /// Scaled-energy and critical-point trend table against the hexagonal
    /// reference energy.
    HexaDiagnostic {
        #[command(flatten)]
        common: CommonOpts,
        /// JSON array of [k, L_k] or [k, L_k, nu_k] entries.
        #[arg(long)]
        input: PathBuf,
        /// Domain area the L_k belong to.
        #[arg(long)]
        area: Option<f64>,
        /// Grid spacing for the hexagon reference energy.
        #[arg(long)]
        h: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {:#}", err.source);
            ExitCode::from(err.code)
        }
    }
}

struct CliError {
    code: u8,
    source: anyhow::Error,
}

impl From<anyhow::Error> for CliError {
    fn from(source: anyhow::Error) -> Self {
        let code = source
            .downcast_ref::<CoreError>()
            .map(exit_code)
            .unwrap_or(2);
        CliError { code, source }
    }
}

/// 2: configuration, 3: solver failure, 4: invariant violation.
fn exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::NoConvergence { .. }
        | CoreError::FactorizationBreakdown { .. }
        | CoreError::AllZero
        | CoreError::BudgetExhausted(_) => 3,
        CoreError::InconsistentCuts(_) | CoreError::DifferentStructure => 4,
        _ => 2,
    }
}

fn invariant_violation(msg: String) -> CliError {
    CliError {
        code: 4,
        source: anyhow::anyhow!(msg),
    }
}

fn core(e: CoreError) -> CliError {
    let code = exit_code(&e);
    CliError {
        code,
        source: anyhow::Error::new(e),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Command::Constants { common } => {
            let cfg = resolve(&common, None, "constants")?;
            init_threads(&cfg);
            let ledger = ConstantLedger::<f64>::compute();
            let path = emit::write_json(&cfg, "constants.json", &ledger).map_err(CliError::from)?;
            println!(
                "constants: j = {:.15}, eps_max = {:.12}, c0 = {:.12} -> {}",
                ledger.j,
                ledger.eps_max,
                ledger.quoted.c0_closed_form,
                path.display()
            );
            for note in &ledger.notes {
                println!("  note: {note}");
            }
            Ok(())
        }
        Command::Weyl {
            common,
            t_min,
            t_max,
            step,
            eps,
        } => {
            let mut cfg = resolve(&common, None, "weyl")?;
            cfg.t_min = t_min.or(cfg.t_min).or(Some(2.0));
            cfg.t_max = t_max.or(cfg.t_max).or(Some(50.0));
            cfg.step = step.or(cfg.step).or(Some(0.1));
            cfg.eps = eps.or(cfg.eps);
            init_threads(&cfg);
            run_weyl(&cfg).map_err(CliError::from)
        }
        Command::Solve {
            common,
            domain,
            k,
            pole_positions,
            richardson,
            order,
            dump_matrix,
            dump_grid,
        } => {
            let mut cfg = resolve(&common, Some(&domain), "solve")?;
            cfg.k = k.or(cfg.k).or(Some(5));
            if !pole_positions.is_empty() {
                cfg.pole_positions = pole_positions;
            }
            cfg.richardson = richardson || cfg.richardson;
            init_threads(&cfg);
            run_solve(&cfg, order, dump_matrix, dump_grid)
        }
        Command::Partition {
            common,
            domain,
            k,
            pole_positions,
            zero_tol,
        } => {
            let mut cfg = resolve(&common, Some(&domain), "partition")?;
            cfg.k = k.or(cfg.k).or(Some(2));
            if !pole_positions.is_empty() {
                cfg.pole_positions = pole_positions;
            }
            if let Some(z) = zero_tol {
                cfg.zero_tol = z;
            }
            init_threads(&cfg);
            run_partition(&cfg)
        }
        Command::Search {
            common,
            domain,
            k,
            poles,
            budget,
            zero_tol,
        } => {
            let mut cfg = resolve(&common, Some(&domain), "search")?;
            cfg.k = k.or(cfg.k).or(Some(2));
            cfg.poles = poles.or(cfg.poles).or(Some(0));
            if let Some(b) = budget {
                cfg.budget = b;
            }
            if let Some(z) = zero_tol {
                cfg.zero_tol = z;
            }
            init_threads(&cfg);
            run_search(&cfg)
        }
        Command::Certify {
            common,
            domain,
            k,
            lambda,
            t,
            eps,
            pole_positions,
        } => {
            let mut cfg = resolve(&common, Some(&domain), "certify")?;
            cfg.k = k.or(cfg.k).or(Some(1));
            cfg.lambda = lambda.or(cfg.lambda);
            cfg.t = t.or(cfg.t);
            cfg.eps = eps.or(cfg.eps);
            if !pole_positions.is_empty() {
                cfg.pole_positions = pole_positions;
            }
            init_threads(&cfg);
            run_certify(&cfg)
        }
        Command::HexaDiagnostic {
            common,
            input,
            area,
            h,
        } => {
            let mut cfg = resolve(&common, None, "hexa-diagnostic")?;
            cfg.h = h.or(cfg.h).or(Some(1.0 / 128.0));
            init_threads(&cfg);
            run_hexa(&cfg, &input, area.unwrap_or(1.0)).map_err(CliError::from)
        }
    }
}

/// Merges defaults <- config file <- explicit flags.
fn resolve(
    common: &CommonOpts,
    domain: Option<&DomainOpts>,
    name: &str,
) -> Result<RunConfig, CliError> {
    let file: FileConfig = match &common.config {
        Some(p) => load_file_config(p).map_err(CliError::from)?,
        None => FileConfig::default(),
    };
    let mut cfg = RunConfig {
        subcommand: name.to_string(),
        ..RunConfig::default()
    };
    cfg.domain = file.domain;
    cfg.h = file.h;
    cfg.k = file.k;
    cfg.poles = file.poles;
    cfg.pole_positions = file.pole_positions.unwrap_or_default();
    cfg.eps = file.eps;
    cfg.t = file.t;
    cfg.lambda = file.lambda;
    cfg.t_min = file.t_min;
    cfg.t_max = file.t_max;
    cfg.step = file.step;
    if let Some(v) = file.tol {
        cfg.tol = v;
    }
    if let Some(v) = file.seed {
        cfg.seed = v;
    }
    if let Some(v) = file.budget {
        cfg.budget = v;
    }
    if let Some(v) = file.zero_tol {
        cfg.zero_tol = v;
    }
    if let Some(v) = file.richardson {
        cfg.richardson = v;
    }
    if let Some(v) = file.out {
        cfg.out = v;
    }
    cfg.threads = file.threads;

    if let Some(d) = domain {
        if let Some(spec) = &d.domain {
            cfg.domain = Some(parse_domain(spec).map_err(CliError::from)?);
        }
        if let Some(h) = d.h {
            cfg.h = Some(h);
        }
    }
    if let Some(v) = &common.out {
        cfg.out = v.clone();
    }
    if let Some(v) = common.tol {
        cfg.tol = v;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    } else if let Ok(env) = std::env::var("MINPART_THREADS") {
        if let Ok(n) = env.parse() {
            cfg.threads = Some(n);
        }
    }
    Ok(cfg)
}

fn init_threads(cfg: &RunConfig) {
    if let Some(n) = cfg.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn need_domain(cfg: &RunConfig) -> Result<DomainSpec64, CliError> {
    cfg.domain.clone().ok_or_else(|| CliError {
        code: 2,
        source: anyhow::anyhow!("--domain is required"),
    })
}

fn need_h(cfg: &RunConfig) -> Result<f64, CliError> {
    cfg.h.ok_or_else(|| CliError {
        code: 2,
        source: anyhow::anyhow!("--h is required"),
    })
}

#[derive(Serialize)]
struct SpectrumSummary {
    n: usize,
    h: f64,
    eigenvalues: Vec<f64>,
    residuals: Vec<f64>,
    iterations: usize,
}

impl SpectrumSummary {
    fn new(n: usize, sp: &Spectrum<f64>) -> Self {
        SpectrumSummary {
            n,
            h: sp.h,
            eigenvalues: sp.eigenvalues.clone(),
            residuals: sp.residuals.clone(),
            iterations: sp.iterations,
        }
    }
}

fn solve_at(
    spec: &DomainSpec64,
    h: f64,
    poles_xy: &[[f64; 2]],
    m: usize,
    tol: f64,
    seed: u64,
) -> Result<(usize, Spectrum<f64>), CoreError> {
    let grid = build_grid(spec, h)?;
    let poles: Vec<(f64, f64)> = poles_xy.iter().map(|p| (p[0], p[1])).collect();
    let cfg = PoleConfig::snap(&grid, &poles)?;
    let cuts = default_cuts(&grid, &cfg)?;
    let (op, _) = assemble_ab_with_gauge(&grid, &cfg, &cuts)?;
    let sp = smallest_eigenpairs(&op, m, tol, seed)?;
    Ok((op.n, sp))
}

fn run_weyl(cfg: &RunConfig) -> anyhow::Result<()> {
    let (t0, t1, dt) = (cfg.t_min.unwrap(), cfg.t_max.unwrap(), cfg.step.unwrap());
    anyhow::ensure!(dt > 0.0 && t1 >= t0, "bad t range");
    let steps = ((t1 - t0) / dt).round() as usize;
    let mut csv = String::from(CountReport::<f64>::csv_header());
    csv.push('\n');
    let mut reports = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = t0 + dt * i as f64;
        let r = CountReport::<f64>::evaluate(t);
        csv.push_str(&r.csv_row());
        csv.push('\n');
        reports.push(r);
    }
    let csv_path = emit::write_text(cfg, "weyl.csv", &csv)?;

    #[derive(Serialize)]
    struct WeylSummary {
        rows: usize,
        paper_bound_violations: Vec<f64>,
        corrected_bound_violations: Vec<f64>,
        wq_threshold: Option<minpart_core::weyl::WqThreshold<f64>>,
    }
    let summary = WeylSummary {
        rows: reports.len(),
        paper_bound_violations: reports
            .iter()
            .filter(|r| !r.satisfied_paper)
            .map(|r| r.t)
            .collect(),
        corrected_bound_violations: reports
            .iter()
            .filter(|r| !r.satisfied_corrected)
            .map(|r| r.t)
            .collect(),
        wq_threshold: cfg.eps.map(|e| min_t_for_wq(e, cfg.t_max.unwrap())),
    };
    let json_path = emit::write_json(cfg, "weyl.json", &summary)?;
    println!(
        "weyl: {} rows, {} quoted-bound violations, {} corrected-bound violations -> {}, {}",
        summary.rows,
        summary.paper_bound_violations.len(),
        summary.corrected_bound_violations.len(),
        csv_path.display(),
        json_path.display()
    );
    Ok(())
}

fn run_solve(
    cfg: &RunConfig,
    order: f64,
    dump_matrix: bool,
    dump_grid: bool,
) -> Result<(), CliError> {
    let spec = need_domain(cfg)?;
    let h = need_h(cfg)?;
    let m = cfg.k.unwrap();
    let (n, sp) = solve_at(&spec, h, &cfg.pole_positions, m, cfg.tol, cfg.seed).map_err(core)?;

    #[derive(Serialize)]
    struct SolveData {
        coarse: SpectrumSummary,
        #[serde(skip_serializing_if = "Option::is_none")]
        fine: Option<SpectrumSummary>,
        #[serde(skip_serializing_if = "Option::is_none")]
        extrapolated: Option<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        order: Option<f64>,
    }
    let mut data = SolveData {
        coarse: SpectrumSummary::new(n, &sp),
        fine: None,
        extrapolated: None,
        order: None,
    };
    if cfg.richardson {
        let (n2, sp2) =
            solve_at(&spec, h / 2.0, &cfg.pole_positions, m, cfg.tol, cfg.seed).map_err(core)?;
        let ext: Vec<f64> = sp
            .eigenvalues
            .iter()
            .zip(&sp2.eigenvalues)
            .map(|(&a, &b)| richardson(a, b, order))
            .collect();
        data.fine = Some(SpectrumSummary::new(n2, &sp2));
        data.extrapolated = Some(ext);
        data.order = Some(order);
    }
    if dump_matrix || dump_grid {
        let grid = build_grid(&spec, h).map_err(core)?;
        if dump_grid {
            let dump =
                serde_json::to_string_pretty(&grid.diagnostic_json()).map_err(|e| CliError {
                    code: 2,
                    source: e.into(),
                })?;
            emit::write_text(cfg, "grid.json", &dump).map_err(CliError::from)?;
        }
        if dump_matrix {
            let poles: Vec<(f64, f64)> = cfg.pole_positions.iter().map(|p| (p[0], p[1])).collect();
            let pc = PoleConfig::snap(&grid, &poles).map_err(core)?;
            let cuts = default_cuts(&grid, &pc).map_err(core)?;
            let (op, _) = assemble_ab_with_gauge(&grid, &pc, &cuts).map_err(core)?;
            emit::write_text(cfg, "matrix.txt", &op.dump_coordinate_text())
                .map_err(CliError::from)?;
        }
    }
    let path = emit::write_json(cfg, "solve.json", &data).map_err(CliError::from)?;
    println!(
        "solve: n = {}, eigenvalues {:?} -> {}",
        n,
        data.coarse.eigenvalues,
        path.display()
    );
    if let Some(ext) = &data.extrapolated {
        println!("solve: extrapolated {ext:?}");
    }
    Ok(())
}

#[derive(Serialize)]
struct PartitionData {
    k: usize,
    lambda: f64,
    energies: Vec<f64>,
    critical_points: Vec<CriticalPoint<f64>>,
    boundary_contacts: usize,
    euler: EulerReport,
    pole_association: Vec<Option<usize>>,
    eigenvalue: f64,
}

fn run_partition(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = need_domain(cfg)?;
    let h = need_h(cfg)?;
    let k = cfg.k.unwrap();
    let grid = build_grid(&spec, h).map_err(core)?;
    let poles: Vec<(f64, f64)> = cfg.pole_positions.iter().map(|p| (p[0], p[1])).collect();
    let pc = PoleConfig::snap(&grid, &poles).map_err(core)?;
    let cuts = default_cuts(&grid, &pc).map_err(core)?;
    let (op, gauge) = assemble_ab_with_gauge(&grid, &pc, &cuts).map_err(core)?;
    let sp = smallest_eigenpairs(&op, k, cfg.tol, cfg.seed).map_err(core)?;
    let part =
        extract_partition(&sp.eigenvectors[k - 1], &gauge, &grid, cfg.zero_tol).map_err(core)?;
    let (energies, lambda) = partition_energies(&part, cfg.tol, cfg.seed).map_err(core)?;
    let euler = euler_check(&part);
    let data = PartitionData {
        k: part.k,
        lambda,
        energies,
        critical_points: part.critical_points.clone(),
        boundary_contacts: part.boundary_contacts.len(),
        euler: euler.clone(),
        pole_association: part.pole_association.clone(),
        eigenvalue: sp.eigenvalues[k - 1],
    };
    emit::write_text(cfg, "partition.pgm", &partition_to_pgm(&part)).map_err(CliError::from)?;
    let path = emit::write_json(cfg, "partition.json", &data).map_err(CliError::from)?;
    println!(
        "partition: k = {}, Lambda = {:.6}, odd critical points = {} -> {}",
        data.k,
        data.lambda,
        data.euler.odd_count,
        path.display()
    );
    if !euler.pass {
        return Err(invariant_violation(format!(
            "Euler bound violated: {} odd critical points > {}",
            euler.odd_count, euler.bound
        )));
    }
    Ok(())
}

fn run_search(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = need_domain(cfg)?;
    let h = need_h(cfg)?;
    let k = cfg.k.unwrap();
    let l = cfg.poles.unwrap();
    let r = search_minimal_partition(&spec, k, l, h, cfg.budget, cfg.seed, cfg.tol, cfg.zero_tol)
        .map_err(core)?;
    #[derive(Serialize)]
    struct SearchData {
        k: usize,
        l: usize,
        h: f64,
        lambda_k: f64,
        frak_l_estimate: f64,
        best_poles: Vec<(f64, f64)>,
        domain_energies: Vec<f64>,
        equipartition_ratio: f64,
        partition_k: usize,
        euler: EulerReport,
        critical_points: Vec<CriticalPoint<f64>>,
        trace: minpart_core::search::SearchTrace<f64>,
    }
    let data = SearchData {
        k,
        l,
        h,
        lambda_k: r.lambda_k,
        frak_l_estimate: r.frak_l_estimate,
        best_poles: r.best_poles.clone(),
        domain_energies: r.domain_energies.clone(),
        equipartition_ratio: r.equipartition_ratio,
        partition_k: r.partition.k,
        euler: r.euler.clone(),
        critical_points: r.partition.critical_points.clone(),
        trace: r.trace.clone(),
    };
    emit::write_text(cfg, "search.pgm", &partition_to_pgm(&r.partition)).map_err(CliError::from)?;
    let path = emit::write_json(cfg, "search.json", &data).map_err(CliError::from)?;
    println!(
        "search: lambda_{k} = {:.6}, L_{k} estimate = {:.6}, poles = {:?} -> {}",
        r.lambda_k,
        r.frak_l_estimate,
        r.best_poles,
        path.display()
    );
    Ok(())
}

fn run_certify(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = need_domain(cfg)?;
    let h = need_h(cfg)?;
    let k = cfg.k.unwrap();
    let ledger = ConstantLedger::<f64>::compute();
    let eps = cfg.eps.unwrap_or(ledger.eps_max);
    let t = cfg.t.unwrap_or(ledger.quoted.t_at_eps_max);
    let lambda = match cfg.lambda {
        Some(l) => l,
        None => {
            let (_, sp) =
                solve_at(&spec, h, &cfg.pole_positions, k, cfg.tol, cfg.seed).map_err(core)?;
            sp.eigenvalues[k - 1]
        }
    };
    let poles: Vec<(f64, f64)> = cfg.pole_positions.iter().map(|p| (p[0], p[1])).collect();
    let cert = minpart_core::certificate::run_certificate(&spec, h, &poles, k, lambda, t, eps)
        .map_err(core)?;

    println!("certificate at lambda = {lambda:.6}, t = {t:.4}, eps = {eps:.6}");
    println!(
        "  tiling: {} kept / {} inside squares, side {:.6}",
        cert.tiling.kept, cert.tiling.inside, cert.tiling.side
    );
    println!(
        "  superadditivity: {} x {} = {} <= {} : {}",
        cert.superadditivity.squares,
        cert.superadditivity.n_per_square,
        cert.superadditivity.sum_tiles,
        cert.superadditivity.count_domain,
        if cert.superadditivity.holds {
            "holds"
        } else {
            "VIOLATED"
        }
    );
    println!(
        "  bound: rhs/k = {:.6}, alpha = {:.6}, alpha_threshold = {:.6}, contradiction = {}",
        cert.bound.rhs_over_k,
        cert.bound.alpha,
        cert.bound.alpha_threshold,
        cert.bound.contradiction
    );
    let path = emit::write_json(cfg, "certify.json", &cert).map_err(CliError::from)?;
    println!("  -> {}", path.display());
    if !cert.superadditivity.holds {
        return Err(invariant_violation(format!(
            "superadditivity violated: {} > {}",
            cert.superadditivity.sum_tiles, cert.superadditivity.count_domain
        )));
    }
    Ok(())
}

fn run_hexa(cfg: &RunConfig, input: &PathBuf, area: f64) -> anyhow::Result<()> {
    let text =
        std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let raw: Vec<Vec<f64>> =
        serde_json::from_str(&text).context("entries must be [[k, L_k, nu_k?],...]")?;
    let entries: Vec<(usize, f64, Option<usize>)> = raw
        .iter()
        .map(|row| {
            anyhow::ensure!(row.len() >= 2, "entry needs at least [k, L_k]");
            Ok((row[0] as usize, row[1], row.get(2).map(|&v| v as usize)))
        })
        .collect::<anyhow::Result<_>>()?;
    let hexa = hexa1_energy(cfg.h.unwrap(), cfg.tol, cfg.seed).map_err(anyhow::Error::new)?;
    let report = hexagonal_diagnostic(&entries, area, hexa);
    let mut csv = String::from("k,scaled_energy,nu_ratio,hexa1_reference,faber_krahn_floor\n");
    for row in &report.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.k,
            row.scaled_energy,
            row.nu_ratio.map(|v| v.to_string()).unwrap_or_default(),
            report.hexa1_reference,
            report.faber_krahn_floor
        ));
    }
    emit::write_text(cfg, "hexa.csv", &csv)?;
    let path = emit::write_json(cfg, "hexa.json", &report)?;
    println!(
        "hexa-diagnostic: reference lambda(Hexa_1) = {:.6}, {} rows -> {}",
        report.hexa1_reference,
        report.rows.len(),
        path.display()
    );
    Ok(())
}
