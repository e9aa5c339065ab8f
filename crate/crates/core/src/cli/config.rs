use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dynamics::{DriftFamily, DriftModel, EvolveOptions};
use crate::ensembles::{EnsembleFamily, EnsembleSpec};
use crate::kernels::{KernelFamily, KernelSpec};

/// Every option of every subcommand. Config files use the same keys as the
/// long flags; values given on the command line win.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// Sub-action: `ibp` or `qg-ratio` for measures; `density`, `spacing`,
    /// `number-variance`, `stationarity` or `msd` for stats.
    #[arg(value_name = "ACTION")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,

    /// TOML file with `flag-name = value` lines.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,

    /// dyson, airy, bessel, ginibre1 or ginibre2.
    #[arg(long)]
    pub model: Option<String>,
    /// gaussian-beta, laguerre-beta or ginibre.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// sine, airy, extended-airy, bessel or ginibre.
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Truncation radius of the drift, or the window radius for qg-ratio.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Harmonic confinement κ of one-dimensional drifts.
    #[arg(long)]
    pub confinement: Option<f64>,

    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub dt_min: Option<f64>,
    #[arg(long)]
    pub output_intervals: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub record_noise: Option<bool>,
    /// Factor applied to the sampled initial configuration.
    #[arg(long)]
    pub init_scale: Option<f64>,

    /// Run manifest of an earlier `evolve` (ifc-check) or `sample`/`evolve`
    /// (stats).
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Head sizes, comma separated.
    #[arg(long)]
    pub ms: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,

    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Time of the first kernel argument.
    #[arg(long)]
    pub s: Option<f64>,
    /// Time of the second kernel argument.
    #[arg(long)]
    pub t: Option<f64>,
    /// Determinant domain, `a:b` intervals separated by commas.
    #[arg(long)]
    pub domain: Option<String>,
    /// Multi-time determinant times, comma separated.
    #[arg(long)]
    pub times: Option<String>,
    #[arg(long)]
    pub order: Option<usize>,
    /// Constant multiplier χ of the determinant.
    #[arg(long)]
    pub chi: Option<f64>,

    /// gaussian or bump.
    #[arg(long)]
    pub test_fn: Option<String>,
    #[arg(long)]
    pub center: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    /// Inside count for qg-ratio.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,

    #[arg(long)]
    pub bins: Option<usize>,
    /// Counting radii, comma separated.
    #[arg(long)]
    pub radii: Option<String>,
    #[arg(long)]
    pub lag_min: Option<f64>,
    #[arg(long)]
    pub lag_max: Option<f64>,
    /// Fraction of the spectral radius defining bulk tags.
    #[arg(long)]
    pub bulk_fraction: Option<f64>,
}

impl RunConfig {
    /// Reads a config file; unknown keys are errors.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Invalid(format!("config file {}: {e}", path.display())))
    }

    /// `self` with every unset field taken from `base`.
    pub fn over(&self, base: &RunConfig) -> Result<RunConfig, CliError> {
        let to_map = |c: &RunConfig| match serde_json::to_value(c) {
            Ok(serde_json::Value::Object(m)) => Ok(m),
            _ => Err(CliError::Invalid("config is not a flat table".into())),
        };
        let mut merged = to_map(base)?;
        for (k, v) in to_map(self)? {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
        let mut out: RunConfig = serde_json::from_value(serde_json::Value::Object(merged))
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        out.config = self.config.clone();
        Ok(out)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn replicas(&self) -> Result<usize, CliError> {
        match self.replicas.unwrap_or(1) {
            0 => Err(CliError::Invalid("replicas must be > 0".into())),
            r => Ok(r),
        }
    }

    pub fn n(&self) -> Result<usize, CliError> {
        match self.n.unwrap_or(64) {
            0 => Err(CliError::Invalid("n must be >= 1".into())),
            n => Ok(n),
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(2.0)
    }

    pub fn drift_family(&self) -> Result<DriftFamily, CliError> {
        self.model.as_deref().unwrap_or("dyson").parse().map_err(|e: crate::dynamics::DynamicsError| CliError::Invalid(e.to_string()))
    }

    pub fn drift_model(&self) -> Result<DriftModel, CliError> {
        let family = self.drift_family()?;
        let beta = self.beta();
        let r = self.r.unwrap_or(f64::INFINITY);
        let model = DriftModel {
            family,
            beta,
            r,
            a: self.a.unwrap_or(1.0),
            confinement: self.confinement.unwrap_or(0.0),
        };
        if matches!(family, DriftFamily::Ginibre1 | DriftFamily::Ginibre2) && beta != 2.0 {
            return Err(CliError::Invalid(format!(
                "{family} requires d = 2 and beta = 2, got beta = {beta}"
            )));
        }
        if family == DriftFamily::Airy && self.r.is_none() {
            return Err(CliError::Invalid("the airy model needs a finite truncation radius --r".into()));
        }
        model.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(model)
    }

    pub fn ensemble_family(&self) -> Result<EnsembleFamily, CliError> {
        self.ensemble
            .as_deref()
            .unwrap_or("gaussian-beta")
            .parse()
            .map_err(|e: crate::ensembles::EnsembleError| CliError::Invalid(e.to_string()))
    }

    pub fn ensemble_spec(&self) -> Result<EnsembleSpec, CliError> {
        let family = self.ensemble_family()?;
        let spec = match family {
            EnsembleFamily::GaussianBeta => EnsembleSpec::gaussian(self.n()?, self.beta(), self.seed()),
            EnsembleFamily::LaguerreBeta => {
                EnsembleSpec::laguerre(self.n()?, self.beta(), self.a.unwrap_or(1.0), self.seed())
            }
            EnsembleFamily::Ginibre => {
                let mut s = EnsembleSpec::ginibre(self.n()?, self.seed());
                s.beta = self.beta();
                s
            }
        };
        spec.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(spec)
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec, CliError> {
        let family: KernelFamily = self
            .kernel
            .as_deref()
            .unwrap_or("sine")
            .parse()
            .map_err(|e: crate::kernels::KernelError| CliError::Invalid(e.to_string()))?;
        let spec = match family {
            KernelFamily::Sine => KernelSpec::sine(),
            KernelFamily::Airy => KernelSpec::airy(),
            KernelFamily::ExtendedAiry => KernelSpec::extended_airy(),
            KernelFamily::Ginibre => KernelSpec::ginibre(),
            KernelFamily::Bessel => KernelSpec::bessel(self.a.unwrap_or(1.0)).map_err(|e| CliError::Invalid(e.to_string()))?,
        };
        Ok(spec)
    }

    pub fn evolve_options(&self) -> Result<EvolveOptions, CliError> {
        let t_final = self.t_final.unwrap_or(1.0);
        let dt = self.dt.unwrap_or(1e-3);
        let mut o = EvolveOptions::new(t_final, dt, self.seed());
        o.dt_min = self.dt_min;
        if let Some(k) = self.output_intervals {
            o.output_intervals = k;
        }
        o.record_noise = self.record_noise.unwrap_or(false);
        Ok(o)
    }

    /// Checks the options relevant to `command`, naming the violated
    /// constraint.
    pub fn validate(&self, command: super::CommandKind) -> Result<(), CliError> {
        use super::CommandKind as C;
        self.replicas()?;
        let actions: &[&str] = match command {
            C::Measures => &["ibp", "qg-ratio"],
            C::Stats => &["density", "spacing", "number-variance", "stationarity", "msd"],
            _ => &[],
        };
        match (&self.action, actions.is_empty()) {
            (Some(a), true) => return Err(CliError::Invalid(format!("{command} takes no action, got '{a}'"))),
            (None, false) => {
                return Err(CliError::Invalid(format!("{command} needs an action: {}", actions.join(", "))))
            }
            (Some(a), false) if !actions.contains(&a.as_str()) => {
                return Err(CliError::Invalid(format!("unknown {command} action '{a}'; expected one of {}", actions.join(", "))))
            }
            _ => {}
        }
        match command {
            C::Sample => {
                self.ensemble_spec()?;
            }
            C::Evolve => {
                self.drift_model()?;
                self.n()?;
                let o = self.evolve_options()?;
                if !(o.t_final >= 0.0 && o.dt > 0.0) {
                    return Err(CliError::Invalid("t-final must be >= 0 and dt > 0".into()));
                }
            }
            C::IfcCheck => {
                if self.trajectory.is_none() {
                    return Err(CliError::Invalid("ifc-check needs --trajectory <manifest>".into()));
                }
                parse_list::<usize>(self.ms.as_deref().unwrap_or("1"), "ms")?;
            }
            C::Kernel => {
                self.kernel_spec()?;
            }
            C::Measures => {
                self.ensemble_spec()?;
            }
            C::Stats => {
                if self.trajectory.is_none() {
                    return Err(CliError::Invalid("stats needs --trajectory <manifest>".into()));
                }
            }
        }
        Ok(())
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str, name: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|_| CliError::Invalid(format!("bad entry '{p}' in --{name}"))))
        .collect()
}

pub fn parse_domain(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| CliError::Invalid(format!("domain interval '{p}' is not of the form a:b")))?;
            let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| CliError::Invalid(format!("bad number '{v}' in --domain")));
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}
