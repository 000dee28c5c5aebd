//! INI run configuration:
//!
//! ```ini
//! [problem]
//! a = 1
//! boundary = dirichlet
//! phi = "5*bump(x,2,1)"
//! g = "-z^3"
//!
//! [grid]
//! T = 4
//! L = 10
//! nx = 400
//! nt = 178
//! ```

use std::path::Path;

use ini::{Ini, ParseOption};
use telegraph_core::energy::EnergyProblem;
use telegraph_core::exprlang::compile;
use telegraph_core::matching::SecondOrderForm;
use telegraph_core::solver::{FarBoundary, GridSpec};
use telegraph_core::{BoundaryKind, MixedProblem, ScalarFn};

use crate::error::{CliError, Result};

const SECTIONS: [(&str, &[&str]); 5] = [
    (
        "problem",
        &["a", "boundary", "phi", "psi", "mu", "F", "f", "g"],
    ),
    (
        "grid",
        &[
            "T",
            "L",
            "nt",
            "nx",
            "nu",
            "far_boundary",
            "snapshot_stride",
            "blowup_threshold",
        ],
    ),
    (
        "checks",
        &[
            "tol",
            "lambda",
            "support_bound",
            "z_range",
            "samples",
            "form",
        ],
    ),
    ("output", &["format", "prefix"]),
    ("exact", &["alpha", "s", "t_max", "points"]),
];

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    ini: Ini,
}

fn parse_options() -> ParseOption {
    ParseOption {
        enabled_quote: true,
        enabled_escape: false,
        ..ParseOption::default()
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str_opt(text, parse_options())
            .map_err(|e| CliError::usage(format!("config syntax error at {e}")))?;
        let cfg = Self { ini };
        cfg.check_keys()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn check_keys(&self) -> Result<()> {
        for (section, props) in self.ini.iter() {
            let Some(name) = section else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(CliError::usage(format!(
                        "key `{key}` appears before any section"
                    )));
                }
                continue;
            };
            let Some((_, allowed)) = SECTIONS.iter().find(|(s, _)| *s == name) else {
                return Err(CliError::usage(format!("unknown config section [{name}]")));
            };
            for (key, _) in props.iter() {
                if !allowed.contains(&key) {
                    return Err(CliError::usage(format!("unknown key `{key}` in [{name}]")));
                }
            }
        }
        Ok(())
    }

    /// Keys of `other` replace those of `self`.
    pub fn overlay(mut self, other: &RunConfig) -> Self {
        for (section, props) in other.ini.iter() {
            for (key, value) in props.iter() {
                self.ini.with_section(section).set(key, value);
            }
        }
        self
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.ini
            .section(Some(section))
            .and_then(|p| p.get(key))
            .map(str::trim)
            .filter(|v| !v.is_empty())
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key)
            .ok_or_else(|| CliError::usage(format!("missing required key `{key}` in [{section}]")))
    }

    pub fn f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<f64>().map_err(|_| {
                    CliError::usage(format!("[{section}] {key} = `{v}` is not a number"))
                })
            })
            .transpose()
    }

    pub fn usize(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    CliError::usage(format!(
                        "[{section}] {key} = `{v}` is not a non-negative integer"
                    ))
                })
            })
            .transpose()
    }

    fn expr(&self, key: &str, vars: &[&str]) -> Result<ScalarFn> {
        match self.get("problem", key) {
            None => Ok(ScalarFn::zero(vars.len())),
            Some(src) => {
                compile(src, vars).map_err(|e| CliError::usage(format!("[problem] {key}: {e}")))
            }
        }
    }

    pub fn boundary(&self) -> Result<BoundaryKind> {
        parse_boundary(self.require("problem", "boundary")?)
    }

    /// The mixed problem and, when the nonlinearity was given as a restoring
    /// force, `g` itself (`f = -g`).
    pub fn problem(&self) -> Result<(MixedProblem, Option<ScalarFn>)> {
        let a = self
            .f64("problem", "a")?
            .ok_or_else(|| CliError::usage("missing required key `a` in [problem]"))?;
        let boundary = self.boundary()?;
        let g = match (self.get("problem", "f"), self.get("problem", "g")) {
            (Some(_), Some(_)) => {
                return Err(CliError::usage("[problem] sets both `f` and `g`; give one"))
            }
            (_, Some(_)) => Some(self.expr("g", &["z"])?),
            _ => None,
        };
        let f = match &g {
            Some(g) => {
                let g = g.clone();
                ScalarFn::new(3, move |args| Ok(-g.call1(args[2])?))
            }
            None => self.expr("f", &["t", "x", "z"])?,
        };
        let p = MixedProblem {
            a,
            f,
            forcing: self.expr("F", &["t", "x"])?,
            phi: self.expr("phi", &["x"])?,
            psi: self.expr("psi", &["x"])?,
            mu: self.expr("mu", &["t"])?,
            boundary,
        };
        p.validate()?;
        Ok((p, g))
    }

    pub fn energy_problem(&self) -> Result<EnergyProblem> {
        let (p, g) = self.problem()?;
        let g = g.ok_or_else(|| CliError::usage("missing required key `g` in [problem]"))?;
        let x = self
            .support_bound()?
            .ok_or_else(|| CliError::usage("missing required key `support_bound` in [checks]"))?;
        Ok(EnergyProblem::from_parts(p, g, x)?)
    }

    pub fn support_bound(&self) -> Result<Option<f64>> {
        self.f64("checks", "support_bound")
    }

    pub fn form(&self) -> Result<SecondOrderForm> {
        match self.get("checks", "form") {
            None | Some("derived") => Ok(SecondOrderForm::Derived),
            Some("paper-literal") | Some("literal") => Ok(SecondOrderForm::PaperLiteral),
            Some(other) => Err(CliError::usage(format!(
                "[checks] form = `{other}`; expected derived or paper-literal"
            ))),
        }
    }

    pub fn z_range(&self) -> Result<Option<(f64, f64)>> {
        let Some(v) = self.get("checks", "z_range") else {
            return Ok(None);
        };
        let bad = || {
            CliError::usage(format!(
                "[checks] z_range = `{v}`; expected `lo, hi` with lo < hi"
            ))
        };
        let parts: Vec<&str> = v
            .trim_matches(|c| c == '[' || c == ']')
            .split(',')
            .collect();
        let [lo, hi] = parts[..] else {
            return Err(bad());
        };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        if lo >= hi || lo.is_nan() || hi.is_nan() {
            return Err(bad());
        }
        Ok(Some((lo, hi)))
    }

    pub fn grid(&self, a: f64) -> Result<GridSpec> {
        let missing = |k: &str| CliError::usage(format!("missing required key `{k}` in [grid]"));
        let t = self.f64("grid", "T")?.ok_or_else(|| missing("T"))?;
        let l = self.f64("grid", "L")?.ok_or_else(|| missing("L"))?;
        let nx = self.usize("grid", "nx")?.ok_or_else(|| missing("nx"))?;
        match (self.usize("grid", "nt")?, self.f64("grid", "nu")?) {
            (Some(nt), _) => Ok(GridSpec::new(t, l, nt, nx)?),
            (None, Some(nu)) => Ok(GridSpec::with_courant(t, l, nx, a, nu)?),
            (None, None) => Err(missing("nt")),
        }
    }

    pub fn far_boundary(&self) -> Result<FarBoundary> {
        match self.get("grid", "far_boundary") {
            None => Ok(FarBoundary::DirichletZero),
            Some(v) => match parse_boundary(v)? {
                BoundaryKind::Dirichlet => Ok(FarBoundary::DirichletZero),
                BoundaryKind::Neumann => Ok(FarBoundary::NeumannZero),
            },
        }
    }
}

fn parse_boundary(v: &str) -> Result<BoundaryKind> {
    match v.to_ascii_lowercase().as_str() {
        "dirichlet" | "dirichlet_zero" | "first" => Ok(BoundaryKind::Dirichlet),
        "neumann" | "neumann_zero" | "second" => Ok(BoundaryKind::Neumann),
        _ => Err(CliError::usage(format!(
            "unknown boundary kind `{v}`; expected dirichlet or neumann"
        ))),
    }
}
