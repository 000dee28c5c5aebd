use serde_json::{json, Value};
use telegraph_core::demos::{nonuniqueness, NonuniquenessSetup};
use telegraph_core::energy::{blowup_certificate, BlowupConfig, BlowupVerdict};
use telegraph_core::exact::PowerSolution;
use telegraph_core::matching::{check, MatchingOptions, Verdict};
use telegraph_core::solver::{run, GridSpec, RunOptions, Status, Trajectory};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::Table;

/// What a subcommand produced: a document for stdout or `<prefix>.<ext>`,
/// plus a human-readable verdict for stderr.
pub enum Report {
    Json(Value),
    Csv(String),
}

pub struct Outcome {
    pub report: Option<Report>,
    pub verdict: String,
    /// Exit with the numerical-failure code after emitting the report.
    pub numerical_failure: bool,
}

impl Outcome {
    fn new(report: Report, verdict: String) -> Self {
        Self {
            report: Some(report),
            verdict,
            numerical_failure: false,
        }
    }
}

pub fn check_matching(cfg: &RunConfig) -> Result<Outcome> {
    let (p, _) = cfg.problem()?;
    let opts = MatchingOptions {
        form: cfg.form()?,
        tol: cfg.f64("checks", "tol")?,
        ..MatchingOptions::default()
    };
    let report = check(&p, opts)?;
    let (verdict, order) = match report.verdict {
        Verdict::Compatible => ("Compatible", None),
        Verdict::NonexistenceCertificate {
            first_violated_order,
        } => ("NonexistenceCertificate", Some(first_violated_order)),
    };
    let doc = json!({
        "boundary": report.boundary.to_string(),
        "residuals": report
            .residuals
            .iter()
            .map(|r| json!({"order": r.order, "value": r.value}))
            .collect::<Vec<_>>(),
        "tol": report.tol,
        "form": report.second_order_form.map(|f| f.to_string()),
        "analytic_derivatives": report.analytic,
        "verdict": verdict,
        "first_violated_order": order,
        "assertion_cited": report.result_cited(),
    });
    Ok(Outcome::new(Report::Json(doc), report.certificate_text()))
}

pub fn check_energy(cfg: &RunConfig) -> Result<Outcome> {
    let lambda = cfg
        .f64("checks", "lambda")?
        .ok_or_else(|| CliError::usage("missing required key `lambda` in [checks]"))?;
    let ep = cfg.energy_problem()?;
    let mut bc = BlowupConfig {
        z_range: cfg.z_range()?,
        ..BlowupConfig::default()
    };
    if let Some(n) = cfg.usize("checks", "samples")? {
        bc.samples = n;
    }
    let report = blowup_certificate(&ep, lambda, bc)?;
    let s = &report.structural;
    let (verdict, reasons) = match &report.verdict {
        BlowupVerdict::CertificateOfNonexistence => ("CertificateOfNonexistence", Vec::new()),
        BlowupVerdict::CriteriaNotMet(r) => (
            "CriteriaNotMet",
            r.iter().map(ToString::to_string).collect(),
        ),
    };
    let doc = json!({
        "E0": report.e0,
        "lambda": report.lambda,
        "boundary": report.boundary.to_string(),
        "sign_condition": {
            "range": [report.sign.z_lo, report.sign.z_hi],
            "samples": report.sign.samples,
            "violations": report
                .sign
                .violations
                .iter()
                .map(|v| json!({"z": v.z, "gap": v.gap}))
                .collect::<Vec<_>>(),
        },
        "structural": {
            "g_vanishes_at_zero": s.g_vanishes_at_zero,
            "nonlinearity_matches_g": s.nonlinearity_matches_g,
            "forcing_vanishes": s.forcing_vanishes,
            "boundary_data_vanishes": s.boundary_data_vanishes,
            "compact_support": s.compact_support,
        },
        "verdict": verdict,
        "reasons": reasons,
        "notes": report.notes,
        "assertion_cited": report.result_cited(),
    });
    Ok(Outcome::new(Report::Json(doc), report.certificate_text()))
}

pub struct ExactRequest {
    pub alpha: f64,
    pub shift: f64,
    pub t: Option<f64>,
    pub t_max: f64,
    pub points: usize,
}

impl ExactRequest {
    fn times(&self) -> Result<Vec<f64>> {
        if let Some(t) = self.t {
            return Ok(vec![t]);
        }
        if self.points < 2 || self.t_max.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(CliError::usage(format!(
                "need --points >= 2 and --t-max > 0, got {} and {}",
                self.points, self.t_max
            )));
        }
        let n = self.points - 1;
        Ok((0..=n).map(|i| self.t_max * i as f64 / n as f64).collect())
    }
}

pub fn exact_eval(req: &ExactRequest, json_rows: bool) -> Result<Outcome> {
    let ps = PowerSolution::new(req.alpha, req.shift)?;
    let rows: Vec<[f64; 5]> = req
        .times()?
        .into_iter()
        .map(|t| {
            let (u, ut, utt) = (ps.eval(t, 0), ps.eval(t, 1), ps.eval(t, 2));
            [t, u, ut, utt, (utt - u.powf(ps.alpha)).abs()]
        })
        .collect();
    let worst = rows.iter().map(|r| r[4]).fold(0.0, f64::max);
    let verdict = format!(
        "u = {:e} (t - {})_+^{}; max residual {worst:e} over {} points",
        ps.beta,
        ps.shift,
        ps.gamma,
        rows.len()
    );
    let report = if json_rows {
        Report::Json(Value::Array(
            rows.iter()
                .map(|r| json!({"t": r[0], "u": r[1], "ut": r[2], "utt": r[3], "residual": r[4]}))
                .collect(),
        ))
    } else {
        let mut table = Table::new(&["t", "u", "ut", "utt", "residual"]);
        rows.iter().for_each(|r| table.push(r));
        Report::Csv(table.finish()?)
    };
    Ok(Outcome::new(report, verdict))
}

fn grid_json(grid: &GridSpec, a: f64) -> Value {
    json!({
        "T": grid.t_final,
        "L": grid.length,
        "nt": grid.nt,
        "nx": grid.nx,
        "dt": grid.dt(),
        "dx": grid.dx(),
        "nu": grid.nu(a),
    })
}

/// Files written by `simulate`.
pub struct SimulationFiles {
    pub snapshots: String,
    pub energy: Option<String>,
    pub summary: Value,
}

fn snapshots_csv(traj: &Trajectory) -> Result<String> {
    let mut table = Table::new(&["t", "x", "u"]);
    let xs = traj.grid.xs();
    for snap in &traj.snapshots {
        for (x, u) in xs.iter().zip(&snap.values) {
            table.push(&[snap.t, *x, *u]);
        }
    }
    table.finish()
}

pub fn simulate(cfg: &RunConfig) -> Result<(SimulationFiles, Outcome)> {
    let (p, g) = cfg.problem()?;
    let grid = cfg.grid(p.a)?;
    let mut opts = RunOptions {
        support_bound: cfg.support_bound()?,
        g: g.clone(),
        ..RunOptions::default()
    };
    if let Some(stride) = cfg.usize("grid", "snapshot_stride")? {
        opts.snapshot_stride = stride;
    }
    if let Some(m) = cfg.f64("grid", "blowup_threshold")? {
        opts.blowup_threshold = m;
    }
    let traj = run(&p, &grid, cfg.far_boundary()?, &opts)?;

    let energy = match g {
        Some(_) => {
            let mut table = Table::new(&["t", "E"]);
            traj.energy_series
                .iter()
                .for_each(|(t, e)| table.push(&[*t, *e]));
            Some(table.finish()?)
        }
        None => None,
    };
    let mut summary = json!({
        "grid": grid_json(&grid, p.a),
        "max_abs_u": traj.max_abs_u,
        "blowup_threshold": opts.blowup_threshold,
        "warnings": traj.warnings,
    });
    let (status, verdict, failed) = match &traj.status {
        Status::Completed => (
            "Completed",
            "completed without detecting blow-up".to_string(),
            false,
        ),
        Status::BlowUpDetected { t } => {
            summary["t_detect"] = json!(t);
            (
                "BlowUpDetected",
                format!(
                    "max |u| exceeded M = {:e} at t = {t} (numerical proxy for blow-up, mesh dependent)",
                    opts.blowup_threshold
                ),
                false,
            )
        }
        Status::NumericalFailure { t, reason } => {
            summary["t_failure"] = json!(t);
            summary["reason"] = json!(reason);
            (
                "NumericalFailure",
                format!("numerical failure at t = {t}: {reason}"),
                true,
            )
        }
    };
    summary["status"] = json!(status);
    let files = SimulationFiles {
        snapshots: snapshots_csv(&traj)?,
        energy,
        summary,
    };
    let mut verdict = verdict;
    for w in &traj.warnings {
        verdict.push_str(&format!("\nwarning: {w}"));
    }
    Ok((
        files,
        Outcome {
            report: None,
            verdict,
            numerical_failure: failed,
        },
    ))
}

pub fn demo_nonuniqueness(setup: &NonuniquenessSetup) -> Result<Outcome> {
    let s = nonuniqueness(setup)?;
    let grid = GridSpec::new(setup.t_end - setup.t0, setup.length, setup.nt, setup.nx)?;
    let status = |st: &Status| match st {
        Status::Completed => "Completed",
        Status::BlowUpDetected { .. } => "BlowUpDetected",
        Status::NumericalFailure { .. } => "NumericalFailure",
    };
    let doc = json!({
        "alpha": setup.alpha,
        "s": setup.shift,
        "t0": setup.t0,
        "t_end": setup.t_end,
        "grid": grid_json(&grid, setup.a),
        "zero_status": status(&s.zero_status),
        "glued_status": status(&s.glued_status),
        "zero_max_abs": s.zero_max_abs,
        "zero_bitwise": s.zero_bitwise,
        "glued_final_error_vs_exact": s.glued_final_error_vs_exact,
        "separation_at_t_end": s.separation_at_t_end,
        "convergence_ratio": s.convergence_ratio,
    });
    let verdict = format!(
        "two continuations of zero data: the zero run (max |u| = {:e}) and the glued run, \
         {:.6} apart at t = {}; glued error {:e}, ratio {:.3} under mesh doubling",
        s.zero_max_abs,
        s.separation_at_t_end,
        setup.t_end,
        s.glued_final_error_vs_exact,
        s.convergence_ratio
    );
    Ok(Outcome::new(Report::Json(doc), verdict))
}

/// Negative-energy blow-up configuration: `g = -z^3`, `phi = 5 bump(x, 2, 1)`.
pub const BLOWUP_PRESET: &str = r#"
[problem]
a = 1
boundary = dirichlet
phi = "5*bump(x,2,1)"
psi = "0"
mu = "0"
F = "0"
g = "-z^3"

[grid]
T = 4
L = 10
nx = 400
nt = 178
far_boundary = dirichlet
snapshot_stride = 10
blowup_threshold = 1e6

[checks]
support_bound = 4

[output]
prefix = "blowup"
"#;
