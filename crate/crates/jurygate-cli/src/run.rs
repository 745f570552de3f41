//! Command implementations. Each command renders a complete CSV document
//! (provenance header comments, column header, data rows) as a string;
//! writing it anywhere is the caller's business. All output is a pure
//! function of the resolved config, so reruns are byte-identical.

use std::fmt::Write as _;

use jurygate::analytics::{bound_report, publish_probability, BoundReport};
use jurygate::montecarlo::{simulate, trace_confidence, SimConfig, SimResult};
use jurygate::population::{build_scenario_with, Population, Scenario};
use jurygate::GroundTruth;

use crate::config::{ExperimentConfig, SweepAxis};
use crate::CliError;

/// One (scenario, grid value) evaluation point with the swept member applied.
#[derive(Debug, Clone, Copy)]
struct GridPoint {
    scenario: Scenario,
    axis: SweepAxis,
    axis_value: f64,
    n_agents: usize,
    horizon_t: u32,
    tau: f64,
}

fn grid_points(cfg: &ExperimentConfig) -> Result<Vec<GridPoint>, CliError> {
    let (axis, grid) = cfg.resolved_sweep()?;
    let mut points = Vec::with_capacity(cfg.scenarios.len() * grid.len());
    for &scenario in &cfg.scenarios {
        for &value in &grid {
            let mut point = GridPoint {
                scenario,
                axis,
                axis_value: value,
                n_agents: cfg.n_agents,
                horizon_t: cfg.horizon_t,
                tau: cfg.tau,
            };
            match axis {
                SweepAxis::NAgents => point.n_agents = value as usize,
                SweepAxis::HorizonT => point.horizon_t = value as u32,
                SweepAxis::Tau => point.tau = value,
            }
            points.push(point);
        }
    }
    // Deterministic emission order regardless of how scenarios were listed.
    points.sort_by(|a, b| {
        a.scenario
            .name()
            .cmp(b.scenario.name())
            .then(a.axis_value.total_cmp(&b.axis_value))
    });
    Ok(points)
}

fn build_pop(cfg: &ExperimentConfig, point: &GridPoint) -> Result<Population, CliError> {
    Ok(build_scenario_with(
        point.scenario,
        point.n_agents,
        point.horizon_t,
        point.tau,
        cfg.p_critical,
        cfg.kappa,
        cfg.epsilon,
    )?)
}

fn header_comments(out: &mut String, cfg: &ExperimentConfig, command: &str) {
    let _ = writeln!(out, "# jurygate {command} table");
    let _ = writeln!(out, "# schema_version = {}", crate::config::SCHEMA_VERSION);
    let scenarios: Vec<&str> = cfg.scenarios.iter().map(Scenario::name).collect();
    let _ = writeln!(out, "# scenarios = {}", scenarios.join(","));
    match &cfg.sweep {
        Some((axis, grid)) => {
            let _ = writeln!(out, "# sweep_axis = {}", axis.name());
            let rendered: Vec<String> = grid.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "# sweep_grid = {}", rendered.join(","));
        }
        None => {
            let _ = writeln!(out, "# sweep_axis = (default N grid)");
        }
    }
    let _ = writeln!(out, "# n_agents = {}", cfg.n_agents);
    let _ = writeln!(out, "# horizon_t = {}", cfg.horizon_t);
    let _ = writeln!(out, "# tau = {}", cfg.tau);
    let _ = writeln!(out, "# p_critical = {}", cfg.p_critical);
    let _ = writeln!(out, "# kappa = {}", cfg.kappa);
    let _ = writeln!(out, "# epsilon = {}", cfg.epsilon);
    let _ = writeln!(out, "# runs = {}", cfg.runs);
    let _ = writeln!(out, "# seed = {}", cfg.seed);
}

fn point_prefix(point: &GridPoint, cfg: &ExperimentConfig) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        point.scenario.name(),
        point.axis.name(),
        point.axis_value,
        point.n_agents,
        point.horizon_t,
        point.tau,
        cfg.p_critical
    )
}

fn report_for(point: &GridPoint, cfg: &ExperimentConfig) -> Result<BoundReport, CliError> {
    let pop = build_pop(cfg, point)?;
    Ok(bound_report(&pop, GroundTruth::Valid)?)
}

fn simulate_point(point: &GridPoint, cfg: &ExperimentConfig) -> Result<SimResult, CliError> {
    let pop = build_pop(cfg, point)?;
    Ok(simulate(
        &pop,
        &SimConfig {
            runs: cfg.runs,
            seed: cfg.seed,
            ground_truth: GroundTruth::Valid,
        },
    )?)
}

/// Analytic bound table: margins, variance budgets, both bounds, and the
/// convergence premises per scenario and grid point.
pub fn cmd_bound(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let mut out = String::new();
    header_comments(&mut out, cfg, "bound");
    out.push_str(
        "scenario,axis,axis_value,N,T,tau,p_critical,q_mean,q_min_competent,\
         expected_margin,variance_budget,lb_success,ub_hallucination,\
         conv_lb,delta_p_ok,q_min_ok\n",
    );
    for point in grid_points(cfg)? {
        let pop = build_pop(cfg, &point)?;
        let report = bound_report(&pop, GroundTruth::Valid)?;
        let mut q_sum = 0.0;
        let mut q_min_competent = f64::INFINITY;
        for agent in pop.agents() {
            let q = publish_probability(agent, pop.horizon_t())?.q;
            q_sum += q;
            if agent.p() >= 0.5 {
                q_min_competent = q_min_competent.min(q);
            }
        }
        let q_mean = q_sum / pop.len() as f64;
        let q_min_cell = if q_min_competent.is_finite() {
            q_min_competent.to_string()
        } else {
            String::new()
        };
        let conv_cell = report
            .convergence_lower_bound
            .map(|v| v.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            point_prefix(&point, cfg),
            q_mean,
            q_min_cell,
            report.expected_margin,
            report.variance_budget,
            format_args!(
                "{},{}",
                report.success_lower_bound, report.hallucination_upper_bound
            ),
            conv_cell,
            format_args!("{},{}", report.delta_p_positive, report.q_min_positive),
        );
    }
    Ok(out)
}

/// Monte Carlo table with the matching analytic bounds in adjacent columns.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let mut out = String::new();
    header_comments(&mut out, cfg, "simulate");
    out.push_str(
        "scenario,axis,axis_value,N,T,tau,p_critical,lb_success,ub_hallucination,\
         emp_success,ci_lo,ci_hi,runs,seed\n",
    );
    for point in grid_points(cfg)? {
        let report = report_for(&point, cfg)?;
        let sim = simulate_point(&point, cfg)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            point_prefix(&point, cfg),
            report.success_lower_bound,
            report.hallucination_upper_bound,
            sim.empirical_success,
            sim.wilson_ci95.0,
            sim.wilson_ci95.1,
            sim.runs,
            sim.seed,
        );
    }
    Ok(out)
}

/// Combined bound + simulation table.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let mut out = String::new();
    header_comments(&mut out, cfg, "sweep");
    out.push_str(
        "scenario,axis,axis_value,N,T,tau,p_critical,expected_margin,variance_budget,\
         lb_success,ub_hallucination,emp_success,ci_lo,ci_hi,runs,seed\n",
    );
    for point in grid_points(cfg)? {
        let report = report_for(&point, cfg)?;
        let sim = simulate_point(&point, cfg)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            point_prefix(&point, cfg),
            report.expected_margin,
            report.variance_budget,
            report.success_lower_bound,
            report.hallucination_upper_bound,
            sim.empirical_success,
            sim.wilson_ci95.0,
            sim.wilson_ci95.1,
            sim.runs,
            sim.seed,
        );
    }
    Ok(out)
}

/// Long-format confidence trajectory of one seeded run: requires exactly one
/// scenario and a single parameter point.
pub fn cmd_trace(cfg: &ExperimentConfig) -> Result<String, CliError> {
    if cfg.scenarios.len() != 1 {
        return Err(CliError::Config(format!(
            "trace needs exactly one scenario, got {}",
            cfg.scenarios.len()
        )));
    }
    // An explicit one-point sweep pins that parameter; anything wider is
    // ambiguous for a single trajectory.
    let mut point = GridPoint {
        scenario: cfg.scenarios[0],
        axis: SweepAxis::NAgents,
        axis_value: cfg.n_agents as f64,
        n_agents: cfg.n_agents,
        horizon_t: cfg.horizon_t,
        tau: cfg.tau,
    };
    if let Some((axis, grid)) = &cfg.sweep {
        if grid.len() != 1 {
            return Err(CliError::Config(format!(
                "trace needs a single grid point, got {} values on the {} axis",
                grid.len(),
                axis.name()
            )));
        }
        point.axis = *axis;
        point.axis_value = grid[0];
        match axis {
            SweepAxis::NAgents => point.n_agents = grid[0] as usize,
            SweepAxis::HorizonT => point.horizon_t = grid[0] as u32,
            SweepAxis::Tau => point.tau = grid[0],
        }
    }
    let pop = build_pop(cfg, &point)?;
    let series = trace_confidence(&pop, cfg.seed)?;

    let mut out = String::new();
    header_comments(&mut out, cfg, "trace");
    out.push_str("agent_id,t,confidence,would_publish\n");
    for (agent_id, agent_series) in series.iter().enumerate() {
        for p in agent_series {
            let _ = writeln!(out, "{},{},{},{}", agent_id, p.t, p.confidence, p.published);
        }
    }
    Ok(out)
}
