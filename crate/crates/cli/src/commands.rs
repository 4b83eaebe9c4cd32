use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use newtonflow::entropy::{riemann, EntropySolution, FrontTraceRow};
use newtonflow::flow::{repulsive_flow, MergeEvent, ParticleTrajectory};
use newtonflow::harness::{
    check_equivalence, contraction_suite, convergence_study, EquivalenceRow, Scenario,
};
use newtonflow::io::fmt_f64;
use newtonflow::subdiff::{
    extended_minimal_plan, frechet_minimal, marginal_check, plan_norm, FrechetMinimal,
    TransportPlan,
};
use newtonflow::{Measure1D, PiecewiseLinear, Sigma};
use serde::Serialize;

use crate::output::Output;
use crate::{Cli, Command, Outcome};

pub fn run(cli: &Cli) -> Result<Outcome> {
    let out = Output::new(&cli.out, cli.format)?;
    match &cli.command {
        Command::Solve => solve(cli, &out),
        Command::Riemann { left, right, x0 } => riemann_cmd(cli, &out, *left, *right, *x0),
        Command::Equivalence => equivalence(cli, &out),
        Command::Converge => converge(cli, &out),
        Command::Contract { trials } => contract(cli, &out, *trials),
        Command::Subdiff => subdiff(cli, &out),
    }
}

/// The scenario file with command-line overrides applied.
fn scenario(cli: &Cli) -> Result<Scenario> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| anyhow!("this command needs --scenario"))?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut sc = Scenario::from_json(&text).with_context(|| format!("in {}", path.display()))?;
    if let Some(s) = cli.sigma {
        sc.sigma = s;
    }
    if let Some(t) = &cli.times {
        sc.times = t.clone();
    }
    if let Some(seed) = cli.seed {
        sc.seed = seed;
    }
    sc.validate()?;
    Ok(sc)
}

fn require_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        bail!("no sample times: give --t or \"times\" in the scenario");
    }
    Ok(())
}

fn check_grid(cli: &Cli) -> Result<()> {
    if cli.x_samples < 2 || cli.s_samples < 2 {
        bail!("--x-samples and --s-samples must be at least 2");
    }
    if let Some(r) = &cli.x_range {
        if r.len() != 2 || !(r[0] < r[1]) || !r.iter().all(|x| x.is_finite()) {
            bail!("--x-range takes two finite values A,B with A < B");
        }
    }
    Ok(())
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + h * i as f64 })
        .collect()
}

/// Uniform samples on the range plus every breakpoint inside it, so that
/// jumps and kinks are always sampled exactly.
fn x_grid(range: (f64, f64), n: usize, breaks: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut xs = uniform(range.0, range.1, n);
    xs.extend(
        breaks
            .into_iter()
            .filter(|x| (range.0..=range.1).contains(x)),
    );
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Support of all measures, padded by a tenth of its width (at least ½).
fn default_range(measures: &[Measure1D]) -> (f64, f64) {
    let (lo, hi) = measures
        .iter()
        .map(Measure1D::support)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (l, h)| {
            (a.min(l), b.max(h))
        });
    let pad = (0.1 * (hi - lo)).max(0.5);
    (lo - pad, hi + pad)
}

fn is_non_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

#[derive(Serialize)]
struct Snapshot {
    t: f64,
    measure: Measure1D,
    /// Knots `(s, X(s))` of the quantile.
    quantile: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct SolveReport {
    sigma: Sigma,
    snapshots: Vec<Snapshot>,
    #[serde(skip_serializing_if = "Option::is_none")]
    merges: Option<Vec<MergeEvent>>,
}

fn knots(p: &PiecewiseLinear) -> Vec<(f64, f64)> {
    p.knots().iter().map(|k| (k.x, k.v)).collect()
}

fn solve(cli: &Cli, out: &Output) -> Result<Outcome> {
    check_grid(cli)?;
    let sc = scenario(cli)?;
    require_times(&sc.times)?;
    let horizon = *sc.times.last().unwrap();
    let mut outcome = Outcome::default();

    let trajectory = match sc.sigma {
        Sigma::Attractive if !sc.measure.is_atomic() => bail!(
            "solve with sigma = 1 needs atomic data; continuous data flattens into atoms and is handled by `equivalence` through particle discretization"
        ),
        Sigma::Attractive => Some(ParticleTrajectory::simulate(&sc.measure, horizon)?),
        Sigma::Repulsive => None,
    };
    let states: Vec<Measure1D> = sc
        .times
        .iter()
        .map(|&t| match &trajectory {
            Some(traj) => traj.state_at(t)?.measure(),
            None => repulsive_flow(&sc.measure, t),
        })
        .collect::<newtonflow::Result<_>>()?;

    let range = match &cli.x_range {
        Some(r) => (r[0], r[1]),
        None => default_range(&states),
    };
    let mut profile = Vec::new();
    for (&t, mu) in sc.times.iter().zip(&states) {
        let cdf = mu.cdf();
        let xs = x_grid(range, cli.x_samples, cdf.breakpoints());
        let values: Vec<f64> = xs.iter().map(|&x| cdf.eval(x)).collect();
        if !is_non_decreasing(&values) {
            outcome
                .failures
                .push(format!("cdf samples decrease at t = {t}"));
        }
        for (&x, &v) in xs.iter().zip(&values) {
            let density: f64 = mu
                .segments()
                .iter()
                .filter(|s| s.left <= x && x < s.right)
                .map(|s| s.density())
                .sum();
            let atom: f64 = mu
                .atoms()
                .iter()
                .filter(|a| a.position == x)
                .map(|a| a.mass)
                .sum();
            profile.push(vec![f(t), f(x), f(v), f(density), f(atom)]);
        }
    }
    out.csv("profile", &["t", "x", "cdf", "density", "atom"], &profile)?;

    let ss = uniform(0.0, 1.0, cli.s_samples);
    let quantile: Vec<Vec<String>> = sc
        .times
        .iter()
        .zip(&states)
        .flat_map(|(&t, mu)| {
            let x = mu.quantile();
            ss.iter()
                .map(move |&s| vec![f(t), f(s), f(x.eval(s))])
                .collect::<Vec<_>>()
        })
        .collect();
    out.csv("quantile", &["t", "s", "quantile"], &quantile)?;

    if let Some(traj) = &trajectory {
        let mut times: Vec<f64> = traj.merge_times();
        times.extend(&sc.times);
        times.sort_by(f64::total_cmp);
        times.dedup();
        let mut rows = Vec::new();
        for t in times {
            for (i, p) in traj.state_at(t)?.particles.iter().enumerate() {
                rows.push(vec![f(t), i.to_string(), f(p.position_at(t)), f(p.mass)]);
            }
        }
        out.csv(
            "trajectory",
            &["t", "particle_index", "position", "mass"],
            &rows,
        )?;

        let sol = EntropySolution::from_measure(&sc.measure, Sigma::Attractive)?;
        if let Some(fs) = sol.fronts() {
            out.csv("fronts", FRONT_HEADER, &front_rows(&fs.trace(&sc.times)?))?;
        }
    }

    out.json(
        "solve",
        &SolveReport {
            sigma: sc.sigma,
            snapshots: sc
                .times
                .iter()
                .zip(&states)
                .map(|(&t, mu)| Snapshot {
                    t,
                    measure: mu.clone(),
                    quantile: knots(&mu.quantile()),
                })
                .collect(),
            merges: trajectory.map(|tr| tr.merges),
        },
    )?;
    Ok(outcome)
}

const FRONT_HEADER: &[&str] = &[
    "t",
    "front_index",
    "position",
    "left_state",
    "right_state",
    "speed",
];

fn front_rows(rows: &[FrontTraceRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                f(r.t),
                r.front_index.to_string(),
                f(r.position),
                f(r.left_state),
                f(r.right_state),
                f(r.speed),
            ]
        })
        .collect()
}

#[derive(Serialize)]
struct RiemannProfile {
    t: f64,
    /// Knots `(x, F)` of the cdf.
    cdf: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct RiemannReport {
    sigma: Sigma,
    left: f64,
    right: f64,
    x0: f64,
    profiles: Vec<RiemannProfile>,
}

fn riemann_cmd(cli: &Cli, out: &Output, left: f64, right: f64, x0: f64) -> Result<Outcome> {
    check_grid(cli)?;
    let from_file = cli.scenario.as_ref().map(|_| scenario(cli)).transpose()?;
    let sigma = cli
        .sigma
        .or(from_file.as_ref().map(|sc| sc.sigma))
        .ok_or_else(|| anyhow!("riemann needs --sigma"))?;
    let times = match (&cli.times, &from_file) {
        (Some(t), _) => t.clone(),
        (None, Some(sc)) => sc.times.clone(),
        (None, None) => vec![],
    };
    require_times(&times)?;
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || !is_non_decreasing(&times) {
        bail!("times must be finite, non-negative and sorted");
    }
    let sol = riemann(sigma, left, right, x0)?;
    let reach = times.iter().copied().fold(0.0, f64::max).max(1.0);
    let range = match &cli.x_range {
        Some(r) => (r[0], r[1]),
        None => (x0 - reach - 0.5, x0 + reach + 0.5),
    };

    let mut outcome = Outcome::default();
    let mut rows = Vec::new();
    let mut profiles = Vec::new();
    for &t in &times {
        let cdf = sol.profile(t)?;
        let xs = x_grid(range, cli.x_samples, cdf.breakpoints());
        let values: Vec<f64> = xs.iter().map(|&x| cdf.eval(x)).collect();
        if !is_non_decreasing(&values) {
            outcome
                .failures
                .push(format!("cdf samples decrease at t = {t}"));
        }
        rows.extend(
            xs.iter()
                .zip(&values)
                .map(|(&x, &v)| vec![f(t), f(x), f(v)]),
        );
        profiles.push(RiemannProfile {
            t,
            cdf: knots(&cdf),
        });
    }
    out.csv("riemann", &["t", "x", "cdf"], &rows)?;
    if let Some(fs) = sol.fronts() {
        out.csv("fronts", FRONT_HEADER, &front_rows(&fs.trace(&times)?))?;
    }
    out.json(
        "riemann",
        &RiemannReport {
            sigma,
            left,
            right,
            x0,
            profiles,
        },
    )?;
    Ok(outcome)
}

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

fn equivalence(cli: &Cli, out: &Output) -> Result<Outcome> {
    let sc = scenario(cli)?;
    require_times(&sc.times)?;
    let report = check_equivalence(&sc)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r: &EquivalenceRow| {
            vec![
                f(r.t),
                f(r.dw_flow_entropy),
                opt(r.dw_flow_l2),
                opt(r.dw_entropy_l2),
                opt(r.quantile_l2),
                f(report.tolerance),
                r.pass.to_string(),
            ]
        })
        .collect();
    out.csv(
        "equivalence",
        &[
            "t",
            "dw_flow_entropy",
            "dw_flow_l2",
            "dw_entropy_l2",
            "quantile_l2",
            "tolerance",
            "pass",
        ],
        &rows,
    )?;
    out.json("equivalence", &report)?;
    Ok(Outcome {
        failures: report
            .rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| {
                format!(
                    "routes disagree by {} at t = {} (tolerance {})",
                    r.max(),
                    r.t,
                    report.tolerance
                )
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct ConvergeReport {
    rows: Vec<newtonflow::harness::ConvergenceRow>,
}

fn converge(cli: &Cli, out: &Output) -> Result<Outcome> {
    let sc = scenario(cli)?;
    require_times(&sc.times)?;
    if sc.n.is_empty() {
        bail!("converge needs an \"N\" grid in the scenario");
    }
    let rows = convergence_study(&sc)?;
    let mut csv = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        // error ratio against the next smaller N at the same t
        let ratio = rows[..i]
            .iter()
            .rev()
            .find(|p| p.t == r.t)
            .filter(|p| p.distance > 0.0)
            .map(|p| r.distance / p.distance);
        csv.push(vec![
            r.n.to_string(),
            f(r.t),
            f(r.distance),
            f(r.initial_distance),
            f(r.bound),
            opt(ratio),
            r.within_bound.to_string(),
        ]);
    }
    out.csv(
        "converge",
        &[
            "N",
            "t",
            "distance",
            "initial_distance",
            "bound",
            "ratio",
            "within_bound",
        ],
        &csv,
    )?;
    let failures = rows
        .iter()
        .filter(|r| !r.within_bound)
        .map(|r| {
            format!(
                "N = {}, t = {}: distance {} exceeds bound {}",
                r.n, r.t, r.distance, r.bound
            )
        })
        .collect();
    out.json("converge", &ConvergeReport { rows })?;
    Ok(Outcome { failures })
}

fn contract(cli: &Cli, out: &Output, trials: usize) -> Result<Outcome> {
    let from_file = cli.scenario.as_ref().map(|_| scenario(cli)).transpose()?;
    let sigma = cli
        .sigma
        .or(from_file.as_ref().map(|sc| sc.sigma))
        .ok_or_else(|| anyhow!("contract needs --sigma or a scenario"))?;
    let seed = cli
        .seed
        .or(from_file.as_ref().map(|sc| sc.seed))
        .unwrap_or(0);
    let report = contraction_suite(seed, sigma, trials)?;
    out.csv(
        "contract",
        &[
            "sigma",
            "seed",
            "trials",
            "max_ratio_wasserstein",
            "max_ratio_entropy",
            "max_ratio_l2",
            "violations",
            "pass",
        ],
        &[vec![
            sigma.to_string(),
            seed.to_string(),
            trials.to_string(),
            f(report.max_ratio_wasserstein),
            f(report.max_ratio_entropy),
            f(report.max_ratio_l2),
            report.violations.len().to_string(),
            report.pass.to_string(),
        ]],
    )?;
    out.json("contract", &report)?;
    if !report.violations.is_empty() {
        // the witnessing pairs are kept whatever the format
        out.json_always("contract_violations", &report)?;
    }
    Ok(Outcome {
        failures: report
            .violations
            .iter()
            .map(|v| {
                format!(
                    "trial {} at t = {}: {:?} grew from {} to {}",
                    v.trial, v.t, v.inequality, v.before, v.after
                )
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct SubdiffReport {
    sigma: Sigma,
    frechet: FrechetMinimal,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<TransportPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    marginal_ok: Option<bool>,
}

fn subdiff(cli: &Cli, out: &Output) -> Result<Outcome> {
    let sc = scenario(cli)?;
    let mut outcome = Outcome::default();
    let frechet = frechet_minimal(&sc.measure, sc.sigma);
    let rows: Vec<Vec<String>> = match &frechet {
        FrechetMinimal::Field(k) => k
            .profile()
            .into_iter()
            .map(|(x, v)| vec![f(x), f(v)])
            .collect(),
        FrechetMinimal::Empty { .. } => vec![],
    };
    out.csv("frechet", &["x", "velocity"], &rows)?;

    let mut report = SubdiffReport {
        sigma: sc.sigma,
        frechet,
        plan: None,
        plan_norm: None,
        marginal_ok: None,
    };
    // the extended plan describes the repulsive velocity, which splits atoms
    if sc.sigma == Sigma::Repulsive {
        let plan = extended_minimal_plan(&sc.measure);
        let norm = plan_norm(&plan);
        let marginal_ok = marginal_check(&plan, &sc.measure);
        if !marginal_ok {
            outcome
                .failures
                .push("first marginal of the plan differs from the measure".into());
        }
        if (norm - 1.0 / 3.0).abs() > 1e-12 {
            outcome
                .failures
                .push(format!("plan norm {norm} differs from 1/3"));
        }
        let vertical: Vec<Vec<String>> = plan
            .vertical
            .iter()
            .map(|v| vec![f(v.x), f(v.y_lo), f(v.y_hi), f(v.density)])
            .collect();
        let graph: Vec<Vec<String>> = plan
            .graph
            .iter()
            .map(|g| vec![f(g.x_lo), f(g.x_hi), f(g.y_lo), f(g.y_hi), f(g.mass)])
            .collect();
        out.csv(
            "plan_vertical",
            &["x", "y_lo", "y_hi", "density"],
            &vertical,
        )?;
        out.csv(
            "plan_graph",
            &["x_lo", "x_hi", "y_lo", "y_hi", "mass"],
            &graph,
        )?;
        report.plan = Some(plan);
        report.plan_norm = Some(norm);
        report.marginal_ok = Some(marginal_ok);
    }
    out.json("subdiff", &report)?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_breakpoints_and_ends() {
        let xs = x_grid((-1.0, 1.0), 3, [0.25, 5.0]);
        assert_eq!(xs, vec![-1.0, 0.0, 0.25, 1.0]);
    }

    #[test]
    fn default_range_pads_support() {
        let mu = Measure1D::dirac(2.0).unwrap();
        assert_eq!(default_range(&[mu]), (1.5, 2.5));
    }
}
