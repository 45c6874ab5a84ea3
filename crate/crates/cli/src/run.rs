//! Mode dispatch.

use frac_pp::mms::{convergence_study, Axis};
use frac_pp::stepper::perturbation_experiment;
use frac_pp::weights::caputo_coeffs;
use frac_pp::{FieldPair, GridSpec, RieszWeights, Stepper};

use crate::config::{Mode, RunConfig, WeightFamily, PAPER_IC};
use crate::error::CliError;
use crate::output;

/// Validates the config and runs its mode inside a worker pool of the
/// configured size. Returns the lines to print on stdout.
pub fn run_mode(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    std::fs::write(cfg.out_dir.join("config.toml"), cfg.to_toml())?;
    log::info!("{:?} into {} on {} threads", cfg.mode, cfg.out_dir.display(), pool.current_num_threads());
    pool.install(|| match cfg.mode {
        Mode::Simulate => simulate(cfg),
        Mode::ConvergeTime => converge(cfg, Axis::Time),
        Mode::ConvergeSpace => converge(cfg, Axis::Space),
        Mode::Stability => stability(cfg),
        Mode::WeightsDump => weights_dump(cfg),
    })
}

/// `paper-ic` or node values read from a CSV with columns `x, N, P`.
///
/// The file may list the interior nodes only or every node including both
/// ends; the ends are dropped.
pub fn initial_data(spec: &str, grid: &GridSpec) -> Result<FieldPair, CliError> {
    if spec == PAPER_IC {
        return Ok(FieldPair::reference_initial(grid));
    }
    let mut reader = csv::Reader::from_path(spec).map_err(|e| CliError::InitialData(format!("{spec}: {e}")))?;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::InitialData(format!("{spec}: {e}")))?;
        let parse = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .ok_or_else(|| CliError::InitialData(format!("{spec}: expected columns x, N, P")))?
                .trim()
                .parse()
                .map_err(|e| CliError::InitialData(format!("{spec}: {e}")))
        };
        rows.push((parse(0)?, parse(1)?, parse(2)?));
    }
    let m = grid.m_intervals;
    let interior = match rows.len() {
        n if n == m - 1 => &rows[..],
        n if n == m + 1 => &rows[1..m],
        n => {
            return Err(CliError::InitialData(format!(
                "{spec}: {n} rows, expected {} interior or {} total nodes",
                m - 1,
                m + 1
            )))
        }
    };
    let tol = 1e-9 * (grid.right - grid.left);
    for (i, (x, _, _)) in interior.iter().enumerate() {
        let want = grid.node(i + 1);
        if (x - want).abs() > tol {
            return Err(CliError::InitialData(format!("{spec}: row {} has x = {x}, expected {want}", i + 1)));
        }
    }
    let (n, p) = interior.iter().map(|&(_, n, p)| (n, p)).unzip();
    Ok(FieldPair::new(n, p, 0)?)
}

fn simulate(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let grid = cfg.grid()?;
    let stepper = Stepper::new(grid, cfg.params(), cfg.scheme.into(), cfg.guards())?;
    let init = initial_data(&cfg.initial, &grid)?;
    let dir = &cfg.out_dir;
    if cfg.dump_matrix {
        output::write_matrix(&dir.join("matrix_prey.csv"), stepper.prey_operator())?;
        output::write_matrix(&dir.join("matrix_predator.csv"), stepper.predator_operator())?;
    }
    let out = stepper.run(init)?;
    output::write_trajectory(&dir.join("trajectory.csv"), &out, &grid, cfg.snapshot_stride)?;
    output::write_summary(&dir.join("summary.csv"), &out)?;

    let (lo_n, hi_n, lo_p, hi_p) = out.global_extremes();
    let (mu_n, mu_p) = stepper.mu_thresholds();
    let mut lines = vec![
        format!(
            "simulated {} steps, {} scheme, alpha = {}, beta = {}, h = {}, tau = {}",
            grid.n_steps, frac_pp::Scheme::from(cfg.scheme), cfg.alpha, cfg.beta, grid.h(), grid.tau()
        ),
        format!("mu = {:.6e} (positivity thresholds {mu_n:.6e}, {mu_p:.6e})", out.mu),
        format!("N in [{lo_n:.6e}, {hi_n:.6e}], P in [{lo_p:.6e}, {hi_p:.6e}]"),
    ];
    let violations = out.violations().count();
    if violations > 0 {
        lines.push(format!("{violations} levels breached the bounds (see summary.csv)"));
    }
    lines.push(format!("wrote {}", dir.display()));
    Ok(lines)
}

fn converge(cfg: &RunConfig, axis: Axis) -> Result<Vec<String>, CliError> {
    let levels = cfg.levels.clone().unwrap_or_default();
    let fixed = cfg.study_fixed_step();
    let report = convergence_study(axis, &levels, fixed, cfg.scheme.into(), cfg.params())?;
    output::write_convergence(&cfg.out_dir.join("convergence.csv"), &report, cfg.verbose)?;
    let mut lines: Vec<String> = report.to_string().lines().map(str::to_string).collect();
    if cfg.verbose {
        lines.push("max over all time levels:".into());
        for (s, e) in report.steps.iter().zip(&report.errors) {
            lines.push(format!("{s:<16} {:>22.15e} {:>22.15e}", e.e_n_all, e.e_p_all));
        }
    }
    Ok(lines)
}

fn stability(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let mut rows = Vec::new();
    for &tau in &cfg.taus {
        let steps = (cfg.t_final / tau).round();
        if steps < 1.0 || (steps * tau - cfg.t_final).abs() > 1e-9 * cfg.t_final {
            return Err(CliError::Config(format!("tau = {tau} does not divide T = {}", cfg.t_final)));
        }
        let grid = GridSpec::new(cfg.left, cfg.right, cfg.m_intervals, steps as usize, cfg.t_final)?;
        let init = initial_data(&cfg.initial, &grid)?;
        for &eps in &cfg.epsilons {
            let p = perturbation_experiment(&init, grid, cfg.params(), cfg.scheme.into(), eps)?;
            rows.push((tau, eps, p));
        }
    }
    output::write_stability(&cfg.out_dir.join("stability.csv"), &rows)?;
    let mut lines = vec![format!("{:>10} {:>10} {:>22} {:>12}", "tau", "epsilon", "max_divergence", "ratio")];
    lines.extend(
        rows.iter()
            .map(|(t, e, p)| format!("{t:>10} {e:>10.1e} {:>22.15e} {:>12.6}", p.max_divergence, p.ratio())),
    );
    Ok(lines)
}

fn weights_dump(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let family = cfg.weight_family();
    let count = cfg.count.unwrap_or(match family {
        WeightFamily::Caputo => cfg.n_steps + 1,
        _ => cfg.m_intervals + 1,
    });
    let values = match family {
        WeightFamily::Caputo => caputo_coeffs(cfg.alpha, count)?.as_slice().to_vec(),
        WeightFamily::Centered => RieszWeights::new(frac_pp::Scheme::Centered, cfg.beta, count)?.as_slice().to_vec(),
        WeightFamily::Wsgd => RieszWeights::new(frac_pp::Scheme::Wsgd, cfg.beta, count)?.as_slice().to_vec(),
    };
    let path = cfg.out_dir.join("weights.csv");
    output::write_weights(&path, &values)?;
    Ok(vec![format!("wrote {count} {} weights to {}", family.name(), path.display())])
}
