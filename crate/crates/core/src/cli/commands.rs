use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{parse_domain, parse_list, RunConfig};
use super::io::{coord_header, fmt_f, read_paths, read_samples, Outputs, RunManifest};
use super::{CliError, CommandKind};
use crate::dynamics::{evolve_replicas, scan_invariants, DriftFamily, DriftModel, LabeledPath};
use crate::ensembles::{rescale, sample_many, sample_replica, EnsembleSpec, ScalingMap, ScalingRegime};
use crate::ifc::consistency_report;
use crate::kernels::{eval_kernel, fredholm_det, multitime_mgf, Chi, KernelFamily};
use crate::measures::{quasi_gibbs_ratio, verify_ibp, Bump, LogDerivativeField, TestFunction, TruncatedGaussian};
use crate::stats::laws::{disk_radial_cdf, semicircle_cdf, surmise_cdf};
use crate::stats::{
    central_window, ks_one_sample, msd_tagged, number_variance, pooled_spacings, power_law_fit, stationarity_test,
    terminal_states, HistogramEstimate, Normalization, TagSelection, Unfolding, Verdict,
};
use crate::Configuration;

pub type Diagnostics = BTreeMap<String, Value>;

fn point_rows<'a>(replica: usize, prefix: &[String], c: &'a Configuration) -> impl Iterator<Item = Vec<String>> + 'a {
    let prefix = prefix.to_vec();
    c.points().enumerate().map(move |(i, p)| {
        let mut row = vec![replica.to_string()];
        row.extend(prefix.iter().cloned());
        row.push(i.to_string());
        row.extend(p.iter().map(|&v| fmt_f(v)));
        row
    })
}

pub fn sample(cfg: &RunConfig, out: &mut Outputs, diag: &mut Diagnostics) -> Result<(), CliError> {
    let spec = cfg.ensemble_spec()?;
    let samples = sample_many(&spec, cfg.replicas()?)?;
    let rows = samples.iter().enumerate().flat_map(|(r, s)| point_rows(r, &[], &s.config));
    out.csv("samples.csv", &coord_header(&["replica", "index"], spec.dim()), rows)?;
    diag.insert("dim".into(), json!(spec.dim()));
    diag.insert("redraws".into(), json!(samples.iter().map(|s| s.redraws as u64).sum::<u64>()));
    Ok(())
}

/// Equilibrium ensemble the model starts from, with the map placing it in
/// the model's coordinates.
fn initial_ensemble(cfg: &RunConfig, model: &DriftModel) -> Result<(EnsembleSpec, Option<ScalingMap>), CliError> {
    let n = cfg.n()?;
    let seed = cfg.seed();
    Ok(match model.family {
        DriftFamily::Dyson => (EnsembleSpec::gaussian(n, model.beta, seed), None),
        DriftFamily::Airy => {
            (EnsembleSpec::gaussian(n, model.beta, seed), Some(ScalingMap::new(ScalingRegime::SoftEdge, n, model.beta)))
        }
        DriftFamily::Bessel => (
            EnsembleSpec::laguerre(n, model.beta, model.a, seed),
            Some(ScalingMap::new(ScalingRegime::HardEdge, n, model.beta)),
        ),
        DriftFamily::Ginibre1 | DriftFamily::Ginibre2 => (EnsembleSpec::ginibre(n, seed), None),
    })
}

pub fn initial_states(cfg: &RunConfig, model: &DriftModel, replicas: usize) -> Result<Vec<Configuration>, CliError> {
    let (spec, map) = initial_ensemble(cfg, model)?;
    let scale = cfg.init_scale.unwrap_or(1.0);
    (0..replicas as u64)
        .map(|r| {
            let mut c = sample_replica(&spec, r)?.config;
            if let Some(map) = &map {
                c = rescale(&c, map)?;
            }
            if scale != 1.0 {
                c.coords_mut().iter_mut().for_each(|x| *x *= scale);
            }
            Ok(c)
        })
        .collect()
}

pub fn evolve(cfg: &RunConfig, out: &mut Outputs, diag: &mut Diagnostics) -> Result<(), CliError> {
    let model = cfg.drift_model()?;
    let opts = cfg.evolve_options()?;
    let initials = initial_states(cfg, &model, cfg.replicas()?)?;
    let results = evolve_replicas(&initials, &model, &opts);
    let mut paths = Vec::new();
    let mut failure = None;
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(p) => paths.push(p),
            Err(e) => {
                failure.get_or_insert(format!("replica {k}: {e}"));
            }
        }
    }

    let rows = paths.iter().flat_map(|p| {
        p.times
            .iter()
            .zip(&p.positions)
            .flat_map(move |(&t, c)| point_rows(p.replica as usize, &[fmt_f(t)], c))
    });
    out.csv("trajectory.csv", &coord_header(&["replica", "time", "index"], model.dim()), rows)?;
    if opts.record_noise {
        let header: &[&str] = if model.dim() == 1 {
            &["replica", "step", "t", "dt", "index", "dx"]
        } else {
            &["replica", "step", "t", "dt", "index", "dx", "dy"]
        };
        let rows = paths.iter().flat_map(|p| {
            let noise = p.noise.as_ref().expect("recording was requested");
            noise.steps.iter().enumerate().flat_map(move |(k, s)| {
                s.increments.chunks(model.dim()).enumerate().map(move |(i, inc)| {
                    let mut row = vec![p.replica.to_string(), k.to_string(), fmt_f(s.t), fmt_f(s.dt), i.to_string()];
                    row.extend(inc.iter().map(|&v| fmt_f(v)));
                    row
                })
            })
        });
        out.csv("noise.csv", header, rows)?;
    }

    let reports: Vec<_> = paths.iter().map(scan_invariants).collect();
    diag.insert("replicas_completed".into(), json!(paths.len()));
    diag.insert("accepted_steps".into(), json!(paths.iter().map(|p| p.diagnostics.accepted_steps).sum::<u64>()));
    diag.insert("rejections".into(), json!(paths.iter().map(|p| p.diagnostics.rejections).sum::<u64>()));
    diag.insert(
        "min_gap".into(),
        json!(paths.iter().map(|p| p.diagnostics.min_gap).fold(f64::INFINITY, f64::min)),
    );
    diag.insert(
        "smallest_dt".into(),
        json!(paths.iter().map(|p| p.diagnostics.smallest_dt).fold(f64::INFINITY, f64::min)),
    );
    diag.insert("states_checked".into(), json!(reports.iter().map(|r| r.states_checked).sum::<usize>()));
    diag.insert(
        "invariant_violations".into(),
        json!(reports
            .iter()
            .map(|r| r.ordering_violations + r.positivity_violations + r.non_finite)
            .sum::<usize>()),
    );
    match failure {
        Some(msg) => Err(CliError::Failed(msg)),
        None => Ok(()),
    }
}

pub fn ifc_check(cfg: &RunConfig, out: &mut Outputs, diag: &mut Diagnostics) -> Result<(), CliError> {
    let manifest_path = cfg.trajectory.as_deref().expect("validated");
    let source = RunManifest::read(manifest_path)?;
    if source.config.record_noise != Some(true) {
        return Err(CliError::Invalid("the trajectory was not recorded with --record-noise".into()));
    }
    let model = source.config.drift_model()?;
    let paths = read_paths(manifest_path, true)?;
    let ms: Vec<usize> = parse_list(cfg.ms.as_deref().unwrap_or("1"), "ms")?;
    let epsilon = cfg.epsilon.unwrap_or(1e-6);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for p in &paths {
        for row in consistency_report(p, &model, &ms, epsilon)? {
            worst = worst.max(row.max_dev);
            rows.push(vec![
                p.replica.to_string(),
                row.m.to_string(),
                fmt_f(row.max_dev),
                row.perturbed_dev.map(fmt_f).unwrap_or_default(),
                fmt_f(row.epsilon),
            ]);
        }
    }
    out.csv("ifc.csv", &["replica", "m", "max_dev", "perturbed_dev", "epsilon"], rows)?;
    diag.insert("replicas".into(), json!(paths.len()));
    diag.insert("max_dev".into(), json!(worst));
    Ok(())
}

fn default_window(family: KernelFamily) -> (f64, f64) {
    match family {
        KernelFamily::Sine | KernelFamily::Ginibre => (-2.0, 2.0),
        KernelFamily::Airy | KernelFamily::ExtendedAiry => (-4.0, 2.0),
        KernelFamily::Bessel => (0.05, 4.0),
    }
}

pub fn kernel(cfg: &RunConfig, out: &mut Outputs, diag: &mut Diagnostics) -> Result<(), CliError> {
    let spec = cfg.kernel_spec()?;
    let (lo, hi) = default_window(spec.family);
    let (lo, hi) = (cfg.x_min.unwrap_or(lo), cfg.x_max.unwrap_or(hi));
    let points = cfg.points.unwrap_or(41);
    if points < 2 || !(hi > lo) {
        return Err(CliError::Invalid("kernel grid needs points >= 2 and x-max > x-min".into()));
    }
    let (s, t) = (cfg.s.unwrap_or(0.0), cfg.t.unwrap_or(0.0));
    let grid: Vec<f64> = (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect();
    let embed = |x: f64| if spec.dim() == 2 { vec![x, 0.0] } else { vec![x] };
    let mut rows = Vec::with_capacity(points * points);
    for &x in &grid {
        for &y in &grid {
            let v = eval_kernel(&spec, s, &embed(x), t, &embed(y))?;
            rows.push(vec![fmt_f(s), fmt_f(x), fmt_f(t), fmt_f(y), fmt_f(v)]);
        }
    }
    out.csv("kernel.csv", &["s", "x", "t", "y", "value"], rows)?;
    if let Some(domain) = &cfg.domain {
        let domain = parse_domain(domain)?;
        let order = cfg.order.unwrap_or(24);
        let chi = Chi::Constant(cfg.chi.unwrap_or(-1.0));
        let record = match &cfg.times {
            Some(times) => {
                let times: Vec<f64> = parse_list(times, "times")?;
                multitime_mgf(&spec, &times, &domain, order, &vec![chi; times.len()])?
            }
            None => fredholm_det(&spec, &domain, order, chi)?,
        };
        diag.insert("determinant".into(), json!(record.value));
        out.json("determinant.json", &record)?;
    }
    diag.insert("grid_points".into(), json!(points));
    Ok(())
}

#[derive(Serialize)]
struct IbpOutput {
    lhs: f64,
    rhs: f64,
    stderr: f64,
    replicas: usize,
    inconclusive: bool,
    z: f64,
}

pub fn measures(cfg: &RunConfig, out: &mut Outputs, diag: &mut Diagnostics) -> Result<(), CliError> {
    let spec = cfg.ensemble_spec()?;
    match cfg.action.as_deref() {
        Some("ibp") => {
            let field = LogDerivativeField::for_ensemble(&spec)?;
            let center = vec![cfg.center.unwrap_or(0.5); spec.dim()];
            let width = cfg.width.unwrap_or(1.0);
            let f: Box<dyn TestFunction> = match cfg.test_fn.as_deref().unwrap_or("gaussian") {
                "gaussian" => Box::new(TruncatedGaussian { center, width }),
                "bump" => Box::new(Bump { center, radius: width }),
                other => return Err(CliError::Invalid(format!("unknown test-fn '{other}'; expected gaussian or bump"))),
            };
            let e = verify_ibp(&spec, &field, f.as_ref(), cfg.replicas()?)?;
            diag.insert("z".into(), json!(e.z()));
            out.json(
                "ibp.json",
                &IbpOutput {
                    lhs: e.lhs,
                    rhs: e.rhs,
                    stderr: e.stderr,
                    replicas: e.replicas,
                    inconclusive: e.inconclusive,
                    z: e.z(),
                },
            )
        }
        _ => {
            let report = quasi_gibbs_ratio(
                &spec,
                cfg.r.unwrap_or(1.0),
                cfg.m.unwrap_or(1),
                cfg.replicas()?,
                cfg.grid.unwrap_or(9),
            )?;
            diag.insert("samples_used".into(), json!(report.samples_used));
            out.json("qg_ratio.json", &report)
        }
    }
}

#[derive(Serialize)]
struct VerdictFile<'a> {
    action: &'a str,
    source: String,
    verdicts: Vec<Verdict>,
    details: BTreeMap<String, Value>,
}

fn histogram_rows(h: &HistogramEstimate) -> Vec<Vec<String>> {
    h.edges
        .windows(2)
        .zip(h.counts.iter().zip(&h.values))
        .map(|(e, (c, v))| vec![fmt_f(e[0]), fmt_f(e[1]), c.to_string(), fmt_f(*v)])
        .collect()
}

/// Configurations of a `sample` run, or terminal states of an `evolve` run.
fn source_configs(manifest_path: &Path, source: &RunManifest) -> Result<Vec<Configuration>, CliError> {
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    match source.command {
        CommandKind::Sample => read_samples(&dir.join("samples.csv")),
        CommandKind::Evolve => Ok(terminal_states(&read_paths(manifest_path, false)?)),
        other => Err(CliError::Invalid(format!("stats reads sample or evolve runs, got {other}"))),
    }
}

fn evolve_source(manifest_path: &Path, source: &RunManifest) -> Result<Vec<LabeledPath>, CliError> {
    if source.command != CommandKind::Evolve {
        return Err(CliError::Invalid("this action needs an evolve run".into()));
    }
    read_paths(manifest_path, false)
}

pub fn stats(cfg: &RunConfig, out: &mut Outputs, diag: &mut Diagnostics) -> Result<(), CliError> {
    let manifest_path = cfg.trajectory.as_deref().expect("validated");
    let source = RunManifest::read(manifest_path)?;
    let n = source.config.n()?;
    let beta = source.config.beta();
    let bins = cfg.bins.unwrap_or(40);
    let action = cfg.action.as_deref().unwrap_or_default();
    let mut verdicts = Vec::new();
    let mut details = BTreeMap::new();
    let hist_header = ["lo", "hi", "count", "value"];
    match action {
        "density" => {
            let configs = source_configs(manifest_path, &source)?;
            let planar = configs.first().is_some_and(|c| c.dim() == 2);
            let (scale, range) = if planar {
                ((n as f64).sqrt(), (0.0, 1.5))
            } else {
                ((beta * n as f64 / 2.0).sqrt(), (-2.5, 2.5))
            };
            let points: Vec<f64> = configs
                .iter()
                .flat_map(|c| (0..c.len()).map(move |i| if planar { c.radius(i) } else { c.coords()[i] }))
                .map(|v| v / scale)
                .collect();
            let h = HistogramEstimate::from_data(
                HistogramEstimate::uniform_edges(range.0, range.1, bins),
                points.clone(),
                Normalization::Density,
                configs.len(),
            )?;
            out.csv("density.csv", &hist_header, histogram_rows(&h))?;
            let ks = if planar { ks_one_sample(&points, disk_radial_cdf) } else { ks_one_sample(&points, semicircle_cdf) };
            verdicts.push(Verdict::at_most(if planar { "ks-vs-circular-law" } else { "ks-vs-semicircle" }, ks.statistic, 0.05));
            details.insert("p_value".into(), json!(ks.p_value));
        }
        "spacing" => {
            let configs = source_configs(manifest_path, &source)?;
            let window = central_window(n, beta, 0.5);
            let s = pooled_spacings(&configs, window, Unfolding::Semicircle { n, beta })?;
            let h = HistogramEstimate::from_data(
                HistogramEstimate::uniform_edges(0.0, 4.0, bins),
                s.clone(),
                Normalization::Density,
                configs.len(),
            )?;
            out.csv("spacing.csv", &hist_header, histogram_rows(&h))?;
            let ks = ks_one_sample(&s, surmise_cdf);
            verdicts.push(Verdict::at_most("ks-vs-surmise", ks.statistic, 0.05));
            details.insert("spacings".into(), json!(s.len()));
        }
        "number-variance" => {
            let configs = source_configs(manifest_path, &source)?;
            let radii: Vec<f64> = parse_list(cfg.radii.as_deref().unwrap_or("2,3,4,5,6,7,8,9,10,11"), "radii")?;
            let rows = number_variance(&configs, &radii)?;
            out.csv(
                "number_variance.csv",
                &["radius", "mean", "variance"],
                rows.iter().map(|r| vec![fmt_f(r.radius), fmt_f(r.mean), fmt_f(r.variance)]),
            )?;
            let fit = power_law_fit(&radii, &rows.iter().map(|r| r.variance).collect::<Vec<_>>())?;
            verdicts.push(Verdict::below("variance-exponent", fit.exponent, 2.0));
            details.insert("exponent".into(), json!(fit.exponent));
            details.insert("prefactor".into(), json!(fit.prefactor));
        }
        "stationarity" => {
            let paths = evolve_source(manifest_path, &source)?;
            let model = source.config.drift_model()?;
            // Same seed and replicas without the initial scale: these are the
            // initial states of an unscaled run.
            let mut eq_cfg = source.config.clone();
            eq_cfg.init_scale = None;
            let equilibrium = initial_states(&eq_cfg, &model, paths.len())?;
            let r = stationarity_test(&terminal_states(&paths), &equilibrium, cfg.seed())?;
            verdicts.push(Verdict::at_most("ks-terminal-vs-equilibrium", r.statistic, 0.08));
            details.insert("p_value".into(), json!(r.p_value));
            details.insert("configurations".into(), json!(r.configurations));
        }
        "msd" => {
            let paths = evolve_source(manifest_path, &source)?;
            let selection = TagSelection::Bulk { fraction: cfg.bulk_fraction.unwrap_or(0.5) };
            let fit = msd_tagged(&paths, selection, (cfg.lag_min.unwrap_or(0.1), cfg.lag_max.unwrap_or(1.0)), 12)?;
            out.csv("msd.csv", &["lag", "msd"], fit.lags.iter().zip(&fit.msd).map(|(l, m)| vec![fmt_f(*l), fmt_f(*m)]))?;
            verdicts.push(Verdict::below("msd-exponent", fit.exponent, 0.95));
            details.insert("exponent".into(), json!(fit.exponent));
            details.insert("mean_tags".into(), json!(fit.mean_tags));
        }
        other => return Err(CliError::Invalid(format!("unknown stats action '{other}'"))),
    }
    diag.insert("pass".into(), json!(verdicts.iter().all(|v| v.pass)));
    out.json(
        "verdict.json",
        &VerdictFile { action, source: manifest_path.display().to_string(), verdicts, details },
    )
}
