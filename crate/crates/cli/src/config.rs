//! Run configuration: a JSON file and command-line flags with the same
//! field names, flags winning.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use u1walsh::lattice::{builtin_weave, load_weave};
use u1walsh::studies::{log_grid, ModelSpec};
use u1walsh::{Basis, Exec, Formulation, LatticeSpec, ThetaPolicy, TrotterOrder, WeaveMatrix};

/// Flags shared by every subcommand. Each one may also come from `--config`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunArgs {
    /// JSON file with any of these options (kebab-case keys); flags override it
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Lattice extent, NxM
    #[arg(long, global = true)]
    pub lattice: Option<String>,

    /// Qubits per plaquette; comma-separated where a command sweeps it
    #[arg(long, global = true, value_delimiter = ',')]
    pub nq: Option<Vec<u32>>,

    /// Coupling value(s), comma-separated
    #[arg(long, global = true, value_delimiter = ',', conflicts_with = "g_grid")]
    pub g: Option<Vec<f64>>,

    /// Log-spaced coupling grid LO:HI:COUNT
    #[arg(long, global = true)]
    pub g_grid: Option<String>,

    /// compact or non-compact
    #[arg(long, global = true)]
    pub formulation: Option<String>,

    /// original or weaved
    #[arg(long, global = true)]
    pub basis: Option<String>,

    /// Weave matrix JSON file ({"n_p": N, "rows": [...]}); implies --basis weaved
    #[arg(long, global = true)]
    pub weave: Option<PathBuf>,

    /// Truncation threshold value(s), read through --theta-min-policy
    #[arg(long, global = true, value_delimiter = ',')]
    pub theta_min: Option<Vec<f64>>,

    /// How --theta-min relates to δt: abs (θ), dt (θ·δt) or dt2 (θ·δt²)
    #[arg(long, global = true, value_parser = ["abs", "dt", "dt2"])]
    pub theta_min_policy: Option<String>,

    /// Trotter step size(s)
    #[arg(long, global = true, value_delimiter = ',')]
    pub dt: Option<Vec<f64>>,

    /// Evolution time
    #[arg(long, global = true)]
    pub t: Option<f64>,

    /// Trotter order, 1 or 2
    #[arg(long, global = true)]
    pub order: Option<String>,

    /// csv or json
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    pub format: Option<String>,

    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Run sweeps on one thread
    #[arg(long, global = true)]
    pub sequential: bool,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl RunArgs {
    /// File values with the flags laid over them.
    pub fn merged(&self) -> Result<RunArgs> {
        let mut base = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str::<RunArgs>(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => RunArgs::default(),
        };
        if self.g.is_some() {
            base.g_grid = None;
        }
        if self.g_grid.is_some() {
            base.g = None;
        }
        overlay!(
            base,
            self,
            lattice,
            nq,
            g,
            g_grid,
            formulation,
            basis,
            weave,
            theta_min,
            theta_min_policy,
            dt,
            t,
            order,
            format,
            out
        );
        base.sequential |= self.sequential;
        base.config = self.config.clone();
        Ok(base)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Abs,
    Dt,
    Dt2,
}

impl PolicyKind {
    pub fn with(self, value: f64) -> ThetaPolicy {
        match self {
            PolicyKind::Abs => ThetaPolicy::Absolute(value),
            PolicyKind::Dt => ThetaPolicy::PerDt(value),
            PolicyKind::Dt2 => ThetaPolicy::PerDt2(value),
        }
    }
}

/// Validated configuration. Serialized verbatim into output headers.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub lattice: String,
    pub n_q: Vec<u32>,
    pub g: Vec<f64>,
    pub formulation: Formulation,
    pub basis: Basis,
    pub weave: Option<PathBuf>,
    pub theta_min: Vec<f64>,
    pub theta_min_policy: PolicyKind,
    pub dt: Vec<f64>,
    pub t: f64,
    pub order: TrotterOrder,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub sequential: bool,
    #[serde(skip)]
    pub lattice_spec: LatticeSpec,
    #[serde(skip)]
    pub weave_matrix: Option<WeaveMatrix>,
}

fn parse_g_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        bail!("--g-grid expects LO:HI:COUNT, got {s:?}");
    };
    let lo: f64 = lo.trim().parse().with_context(|| format!("bad grid start in {s:?}"))?;
    let hi: f64 = hi.trim().parse().with_context(|| format!("bad grid end in {s:?}"))?;
    let count: usize = count
        .trim()
        .parse()
        .with_context(|| format!("bad grid count in {s:?}"))?;
    Ok(log_grid(lo, hi, count)?)
}

fn positive(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        bail!("--{name} needs at least one value");
    }
    if let Some(x) = xs.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        bail!("--{name} values must be positive, got {x}");
    }
    Ok(())
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let a = args.merged()?;
        let lattice = a.lattice.unwrap_or_else(|| "2x2".into());
        let lattice_spec: LatticeSpec = lattice.parse()?;
        let n_q = a.nq.unwrap_or_else(|| vec![2]);
        if n_q.is_empty() || n_q.contains(&0) {
            bail!("--nq values must be at least 1");
        }
        let g = match (a.g, a.g_grid) {
            (Some(g), _) => g,
            (None, Some(grid)) => parse_g_grid(&grid)?,
            (None, None) => vec![1.0],
        };
        positive("g", &g)?;
        let formulation: Formulation = a.formulation.as_deref().unwrap_or("compact").parse()?;
        let basis = match (a.basis.as_deref(), &a.weave) {
            (Some(b), w) => {
                let b: Basis = b.parse()?;
                if b == Basis::Original && w.is_some() {
                    bail!("--weave given together with --basis original");
                }
                b
            }
            (None, Some(_)) => Basis::Weaved,
            (None, None) => Basis::Original,
        };
        let weave_matrix = match (basis, &a.weave) {
            (Basis::Original, _) => None,
            (Basis::Weaved, Some(path)) => Some(load_weave(path)?),
            (Basis::Weaved, None) => Some(builtin_weave(lattice_spec.n_p())?),
        };
        if let Some(w) = &weave_matrix {
            if w.n_p() != lattice_spec.n_p() {
                bail!(
                    "weave is for N_p = {} but lattice {lattice} has N_p = {}",
                    w.n_p(),
                    lattice_spec.n_p()
                );
            }
        }
        let theta_min = a.theta_min.unwrap_or_else(|| vec![0.0]);
        if theta_min.is_empty() || theta_min.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            bail!("--theta-min values must be non-negative");
        }
        let theta_min_policy = match a.theta_min_policy.as_deref().unwrap_or("abs") {
            "abs" => PolicyKind::Abs,
            "dt" => PolicyKind::Dt,
            "dt2" => PolicyKind::Dt2,
            other => bail!("unknown θ_min policy {other:?} (abs, dt, dt2)"),
        };
        let dt = a.dt.unwrap_or_else(|| vec![0.1]);
        positive("dt", &dt)?;
        let t = a.t.unwrap_or(0.2);
        if !(t >= 0.0 && t.is_finite()) {
            bail!("--t must be non-negative, got {t}");
        }
        let order: TrotterOrder = a.order.as_deref().unwrap_or("1").parse()?;
        let format = match a.format.as_deref().unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => bail!("unknown format {other:?} (csv, json)"),
        };
        Ok(Self {
            lattice: lattice_spec.to_string(),
            n_q,
            g,
            formulation,
            basis,
            weave: a.weave,
            theta_min,
            theta_min_policy,
            dt,
            t,
            order,
            format,
            out: a.out,
            sequential: a.sequential,
            lattice_spec,
            weave_matrix,
        })
    }

    pub fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    pub fn model_spec(&self) -> ModelSpec {
        let spec = ModelSpec::new(self.lattice_spec, self.formulation);
        match &self.weave_matrix {
            Some(w) => spec.weaved(w.clone()),
            None => spec,
        }
    }

    pub fn policies(&self) -> Vec<ThetaPolicy> {
        self.theta_min.iter().map(|&v| self.theta_min_policy.with(v)).collect()
    }

    pub fn one_nq(&self, command: &str) -> Result<u32> {
        match self.n_q.as_slice() {
            [n] => Ok(*n),
            _ => bail!("{command} takes a single --nq"),
        }
    }

    pub fn one_g(&self, command: &str) -> Result<f64> {
        match self.g.as_slice() {
            [g] => Ok(*g),
            _ => bail!("{command} takes a single --g"),
        }
    }

    pub fn one_dt(&self, command: &str) -> Result<f64> {
        match self.dt.as_slice() {
            [d] => Ok(*d),
            _ => bail!("{command} takes a single --dt"),
        }
    }

    pub fn one_policy(&self, command: &str) -> Result<ThetaPolicy> {
        match self.policies().as_slice() {
            [p] => Ok(*p),
            _ => bail!("{command} takes a single --theta-min"),
        }
    }

    pub fn out_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(
            &path,
            r#"{"lattice": "2x3", "nq": [3], "g-grid": "0.1:10:5", "dt": [0.05]}"#,
        )
        .unwrap();
        let args = RunArgs {
            config: Some(path),
            nq: Some(vec![2]),
            g: Some(vec![0.5]),
            ..Default::default()
        };
        let c = RunConfig::resolve(&args).unwrap();
        assert_eq!(c.lattice, "2x3");
        assert_eq!(c.n_q, [2]);
        assert_eq!(c.g, [0.5]);
        assert_eq!(c.dt, [0.05]);
    }

    #[test]
    fn unknown_file_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"latice": "2x3"}"#).unwrap();
        let args = RunArgs {
            config: Some(path),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&args).is_err());
    }

    #[test]
    fn validation() {
        let bad = |a: RunArgs| RunConfig::resolve(&a).is_err();
        assert!(bad(RunArgs {
            g: Some(vec![-1.0]),
            ..Default::default()
        }));
        assert!(bad(RunArgs {
            lattice: Some("1x3".into()),
            ..Default::default()
        }));
        assert!(bad(RunArgs {
            g_grid: Some("1:2".into()),
            ..Default::default()
        }));
        assert!(bad(RunArgs {
            basis: Some("weaved".into()),
            lattice: Some("3x3".into()),
            ..Default::default()
        }));
        let ok = RunConfig::resolve(&RunArgs {
            basis: Some("weaved".into()),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(ok.weave_matrix.unwrap().n_p(), 3);
    }
}
