//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! ```text
//! cargo test --release --test acceptance
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::RngExt;
use rayon::prelude::*;

use logdyn::cli::{parse_args, run, RunManifest};
use logdyn::dynamics::{drift_into, evolve, scan_invariants, DriftModel, EvolveOptions, InvariantReport, LabeledPath};
use logdyn::ensembles::{rescale, sample, sample_many, sample_replica, EnsembleSpec, ScalingMap, ScalingRegime};
use logdyn::kernels::{eval_kernel, extended_airy, fredholm_det, Chi, KernelSpec};
use logdyn::measures::{verify_ibp, LogDerivativeField, TestFunction, TruncatedGaussian};
use logdyn::rng::replica_rng;
use logdyn::special::QuadratureGrid;
use logdyn::stats::laws::{semicircle_cdf, surmise_cdf};
use logdyn::stats::{
    central_window, ks_one_sample, msd_tagged, number_variance, poisson_disk_samples, pooled_spacings, power_law_fit,
    TagSelection, Unfolding,
};
use logdyn::Configuration;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Runs a command line and returns the manifest path.
fn cli(line: &str) -> PathBuf {
    let args: Vec<String> = line.split_whitespace().map(String::from).collect();
    let (kind, cfg) = parse_args(&args).unwrap_or_else(|e| panic!("{line}: {e}"));
    run(kind, &cfg).unwrap_or_else(|e| panic!("{line}: {e}"))
}

fn verdict(manifest: &Path) -> serde_json::Value {
    let text = fs::read_to_string(manifest.with_file_name("verdict.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Evolves every replica with recorded noise, scans every accepted state and
/// drops the record.
fn scan_runs(initials: &[Configuration], model: &DriftModel, opts: &EvolveOptions) -> (Vec<LabeledPath>, InvariantReport) {
    let results: Vec<(LabeledPath, InvariantReport)> = initials
        .par_iter()
        .enumerate()
        .map(|(k, init)| {
            let mut o = opts.clone().record_noise(true);
            o.replica = opts.replica + k as u64;
            let mut p = evolve(init, model, &o).unwrap_or_else(|e| panic!("replica {k}: {e}"));
            let r = scan_invariants(&p);
            p.noise = None;
            (p, r)
        })
        .collect();
    let mut total = InvariantReport { states_checked: 0, ordering_violations: 0, positivity_violations: 0, non_finite: 0, max_abs: 0.0 };
    let mut paths = Vec::with_capacity(results.len());
    for (p, r) in results {
        total.states_checked += r.states_checked;
        total.ordering_violations += r.ordering_violations;
        total.positivity_violations += r.positivity_violations;
        total.non_finite += r.non_finite;
        total.max_abs = total.max_abs.max(r.max_abs);
        paths.push(p);
    }
    (paths, total)
}

fn gue_starts(n: usize, replicas: usize, seed: u64, scale: f64) -> Vec<Configuration> {
    (0..replicas as u64)
        .map(|r| {
            let mut c = sample_replica(&EnsembleSpec::gaussian(n, 2.0, seed), r).unwrap().config;
            c.coords_mut().iter_mut().for_each(|x| *x *= scale);
            c
        })
        .collect()
}

const C2_RUN: &str = "--model dyson --beta 2 --confinement 0.5 --n 64 --t-final 0.1 --dt 1e-4 --replicas 200 --seed 2 --output-intervals 1";
const C2_CONTROL: &str = "--init-scale 1e-1";
const C3_SPACING: &str = "--ensemble gaussian-beta --beta 2 --n 200 --replicas 500 --seed 3";
const C4_RUN: &str = "--model dyson --beta 2 --confinement 0.5 --n 8 --t-final 0.05 --dt 1e-3 --seed 4 --record-noise";

struct Suite {
    dir: tempfile::TempDir,
    scans: Vec<(String, InvariantReport)>,
}

impl Suite {
    fn out(&self, name: &str) -> String {
        self.dir.path().join(name).display().to_string()
    }

    fn criterion_2(&mut self) -> Outcome {
        let main = cli(&format!("logdyn evolve {C2_RUN} --out {}", self.out("c2")));
        let stats = cli(&format!("logdyn stats stationarity --seed 2 --trajectory {} --out {}", main.display(), self.out("c2-stats")));
        let v = verdict(&stats);
        let ks = v["verdicts"][0]["statistic"].as_f64().unwrap();
        let control = cli(&format!("logdyn evolve {C2_RUN} {C2_CONTROL} --out {}", self.out("c2-control")));
        let cstats =
            cli(&format!("logdyn stats stationarity --seed 2 --trajectory {} --out {}", control.display(), self.out("c2-cstats")));
        let p = verdict(&cstats)["details"]["p_value"].as_f64().unwrap();

        // the same runs through the library, for the invariant scan
        let model = DriftModel::dyson(2.0, f64::INFINITY).with_confinement(0.5);
        let opts = EvolveOptions::new(0.1, 1e-4, 2).output_intervals(1);
        let (paths, r) = scan_runs(&gue_starts(64, 200, 2, 1.0), &model, &opts);
        let csv_final = fs::read_to_string(self.dir.path().join("c2/trajectory.csv")).unwrap();
        let last = paths[199].final_state().coords()[63];
        assert!(csv_final.contains(&logdyn::cli::fmt_f(last)), "library and CLI runs differ");
        self.scans.push(("dyson N=64 stationarity".into(), r));
        let (_, r) = scan_runs(&gue_starts(64, 200, 2, 1e-1), &model, &opts);
        self.scans.push(("dyson N=64 compressed start".into(), r));

        outcome(ks <= 0.08 && p < 0.01, format!("KS terminal vs initial {ks:.4} (<= 0.08); compressed start p = {p:.2e} (< 0.01)"))
    }

    fn criterion_3(&mut self) -> Outcome {
        let n = 1000;
        let scale = (2.0 * n as f64 / 2.0).sqrt();
        let xs: Vec<f64> =
            sample(&EnsembleSpec::gaussian(n, 2.0, 3)).unwrap().config.coords().iter().map(|x| x / scale).collect();
        let semicircle = ks_one_sample(&xs, semicircle_cdf).statistic;

        let manifest = cli(&format!("logdyn sample {C3_SPACING} --out {}", self.out("c3")));
        let configs: Vec<Configuration> = sample_many(&EnsembleSpec::gaussian(200, 2.0, 3), 500)
            .unwrap()
            .into_iter()
            .map(|s| s.config)
            .collect();
        let s = pooled_spacings(&configs, central_window(200, 2.0, 0.5), Unfolding::Semicircle { n: 200, beta: 2.0 }).unwrap();
        let surmise = ks_one_sample(&s, surmise_cdf).statistic;
        let stats = cli(&format!("logdyn stats spacing --trajectory {} --out {}", manifest.display(), self.out("c3-stats")));
        let cli_surmise = verdict(&stats)["verdicts"][0]["statistic"].as_f64().unwrap();
        assert_eq!(cli_surmise, surmise, "CLI and library spacings differ");
        outcome(
            semicircle <= 0.03 && surmise <= 0.05,
            format!("KS to semicircle {semicircle:.4} (<= 0.03); {} spacings, sup distance to surmise {surmise:.4} (<= 0.05)", s.len()),
        )
    }

    fn criterion_4(&mut self) -> Outcome {
        let manifest = cli(&format!("logdyn evolve {C4_RUN} --out {}", self.out("c4")));
        let ifc = cli(&format!(
            "logdyn ifc-check --ms 1,4,7,8 --trajectory {} --out {}",
            manifest.display(),
            self.out("c4-ifc")
        ));
        let table = fs::read_to_string(ifc.with_file_name("ifc.csv")).unwrap();
        let devs: Vec<(usize, f64)> = table
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[1].parse().unwrap(), f[2].parse().unwrap())
            })
            .collect();
        let worst = devs.iter().map(|d| d.1).fold(0.0, f64::max);
        let model = DriftModel::dyson(2.0, f64::INFINITY).with_confinement(0.5);
        let (_, r) = scan_runs(&gue_starts(8, 1, 4, 1.0), &model, &EvolveOptions::new(0.05, 1e-3, 4));
        self.scans.push(("dyson N=8 ifc reference".into(), r));
        outcome(
            devs.len() == 4 && worst <= 1e-12,
            format!("m = 1, 4, 7, 8: max deviation {worst:.1e} (<= 1e-12)"),
        )
    }

    fn criterion_5(&mut self) -> Outcome {
        let airy = KernelSpec::airy();
        let mut rng = replica_rng(5, 0);
        let mut worst: f64 = 0.0;
        let mut drawn = 0;
        while drawn < 100 {
            let (x, y): (f64, f64) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            if (x - y).abs() <= 1e-3 {
                continue;
            }
            drawn += 1;
            let s = rng.random_range(-1.0..1.0);
            let a = eval_kernel(&airy, 0.0, &[x], 0.0, &[y]).unwrap();
            worst = worst.max((extended_airy(s, x, s, y).unwrap() - a).abs());
        }
        let sine = KernelSpec::sine();
        let gap = fredholm_det(&sine, &[(0.0, 0.01)], 8, Chi::Constant(-1.0)).unwrap();
        let gap_err = (gap.value - 0.99).abs();
        let refinement = [
            gap.refinement_error,
            fredholm_det(&sine, &[(0.0, 1.0)], 20, Chi::Constant(-1.0)).unwrap().refinement_error,
            fredholm_det(&airy, &[(-2.0, 12.0)], 40, Chi::Constant(-1.0)).unwrap().refinement_error,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        outcome(
            worst <= 1e-8 && gap_err <= 1e-3 && refinement <= 1e-6,
            format!("extended vs equal-time Airy {worst:.1e} (<= 1e-8); gap(0.01) − 0.99 = {gap_err:.1e} (<= 1e-3); grid doubling {refinement:.1e} (<= 1e-6)"),
        )
    }

    fn criterion_6(&mut self) -> Outcome {
        let spec = EnsembleSpec::gaussian(8, 2.0, 6);
        let field = LogDerivativeField::for_ensemble(&spec).unwrap();
        let f = TruncatedGaussian { center: vec![0.5], width: 1.0 };
        let e = verify_ibp(&spec, &field, &f, 1_000_000).unwrap();
        let diff = (e.lhs - e.rhs).abs();

        // N = 1: E f'(X) = −E f(X) d(X) = 2c/(3√3) e^{−c²/3} for f = e^{−(x−c)²}
        let one = LogDerivativeField::for_ensemble(&EnsembleSpec::gaussian(1, 2.0, 6)).unwrap();
        let grid = QuadratureGrid::gauss_legendre(&[(-14.0, 14.0)], 400).unwrap();
        let c = 0.5;
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for (&x, &w) in grid.nodes.iter().zip(&grid.weights) {
            let phi = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let (mut g, mut d) = ([0.0], [0.0]);
            f.gradient(&[x], &mut g);
            one.at(0, &[x], &mut d).unwrap();
            lhs += w * phi * g[0];
            rhs -= w * phi * f.value(&[x]) * d[0];
        }
        let exact = 2.0 * c / (3.0 * 3f64.sqrt()) * (-c * c / 3.0).exp();
        let closed = (lhs - exact).abs().max((rhs - exact).abs());
        outcome(
            diff <= 3.0 * e.stderr && closed <= 1e-12,
            format!(
                "N=8, 1e6 replicas: |lhs − rhs| = {diff:.2e} = {:.2} standard errors (<= 3); N=1 closed form error {closed:.1e}",
                diff / e.stderr
            ),
        )
    }

    fn criterion_7(&mut self) -> Outcome {
        let n = 500;
        let samples = sample_many(&EnsembleSpec::ginibre(n, 7), 20).unwrap();
        let bulk = 0.5 * (n as f64).sqrt();
        let mse: Vec<f64> = [2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|&r| {
                let (g1, g2) = (DriftModel::ginibre1(r), DriftModel::ginibre2(r));
                let (mut sum, mut count) = (0.0, 0usize);
                for s in &samples {
                    let c = s.config.coords();
                    for i in (0..n).filter(|&i| s.config.radius(i) < bulk) {
                        let (mut a, mut b) = ([0.0; 2], [0.0; 2]);
                        drift_into(&g1, i, c, &mut a).unwrap();
                        drift_into(&g2, i, c, &mut b).unwrap();
                        sum += (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
                        count += 1;
                    }
                }
                sum / count as f64
            })
            .collect();
        let monotone = mse.windows(2).all(|w| w[1] < w[0]);
        outcome(monotone, format!("MSE over r = 2, 4, 8, 16: {mse:.3?}"))
    }

    fn criterion_8(&mut self) -> Outcome {
        let n = 500;
        let radii: Vec<f64> = (2..=11).map(f64::from).collect();
        let configs: Vec<Configuration> =
            sample_many(&EnsembleSpec::ginibre(n, 8), 100).unwrap().into_iter().map(|s| s.config).collect();
        let exponent = |samples: &[Configuration]| {
            let rows = number_variance(samples, &radii).unwrap();
            power_law_fit(&radii, &rows.iter().map(|r| r.variance).collect::<Vec<_>>()).unwrap().exponent
        };
        let ginibre = exponent(&configs);
        let poisson = exponent(&poisson_disk_samples((n as f64).sqrt(), 100, 8));
        let nv_ok = ginibre < 2.0 && (ginibre - 1.0).abs() <= 0.3 && (poisson - 2.0).abs() <= 0.3;

        let starts: Vec<Configuration> =
            sample_many(&EnsembleSpec::ginibre(256, 8), 100).unwrap().into_iter().map(|s| s.config).collect();
        let opts = EvolveOptions::new(1.0, 1e-3, 8).output_intervals(100);
        let tags = TagSelection::Bulk { fraction: 0.5 };
        let (paths, r) = scan_runs(&starts, &DriftModel::ginibre2(f64::INFINITY), &opts);
        self.scans.push(("ginibre2 N=256 MSD".into(), r));
        let msd = msd_tagged(&paths, tags, (0.1, 1.0), 12).unwrap().exponent;
        drop(paths);
        let (free_paths, r) = scan_runs(&starts, &DriftModel::ginibre1(1e-9), &opts);
        self.scans.push(("free planar calibration".into(), r));
        let free = msd_tagged(&free_paths, tags, (0.1, 1.0), 12).unwrap().exponent;
        let msd_ok = msd < 0.95 && (free - 1.0).abs() <= 0.05;
        outcome(
            nv_ok && msd_ok,
            format!(
                "number variance exponent {ginibre:.3} (Poisson {poisson:.3}); MSD exponent {msd:.3} (< 0.95), free calibration {free:.3} (1 ± 0.05)"
            ),
        )
    }

    /// Bessel dynamics from a hard-edge start, the run that exercises
    /// positivity.
    fn bessel_scan(&mut self) {
        let n = 32;
        let map = ScalingMap::new(ScalingRegime::HardEdge, n, 2.0);
        let starts: Vec<Configuration> = sample_many(&EnsembleSpec::laguerre(n, 2.0, 1.0, 1), 20)
            .unwrap()
            .iter()
            .map(|s| rescale(&s.config, &map).unwrap())
            .collect();
        let model = DriftModel::bessel(2.0, 1.0).unwrap();
        let (_, r) = scan_runs(&starts, &model, &EvolveOptions::new(0.5, 1e-3, 1));
        self.scans.push(("bessel N=32 hard edge".into(), r));
    }

    fn criterion_1(&mut self) -> Outcome {
        self.bessel_scan();
        let states: usize = self.scans.iter().map(|s| s.1.states_checked).sum();
        let bad: usize = self
            .scans
            .iter()
            .map(|s| s.1.ordering_violations + s.1.positivity_violations + s.1.non_finite)
            .sum();
        for (name, r) in &self.scans {
            println!("    {name}: {} states, {} violations", r.states_checked, r.ordering_violations + r.positivity_violations + r.non_finite);
        }
        outcome(bad == 0 && states > 0, format!("{states} accepted states in {} runs, {bad} violations", self.scans.len()))
    }

    fn criterion_9(&mut self) -> Outcome {
        let reruns = [
            (format!("logdyn evolve {C2_RUN}"), "c2"),
            (format!("logdyn sample {C3_SPACING}"), "c3"),
            (format!("logdyn evolve {C4_RUN}"), "c4"),
            ("logdyn kernel --kernel extended-airy --s 0 --t 0.5 --points 21 --domain=-1:6 --times 0,0.5 --chi=-0.5".into(), "c9-kernel"),
        ];
        let mut compared = 0;
        let mut mismatched = Vec::new();
        for (line, first) in reruns {
            if !self.dir.path().join(first).exists() {
                cli(&format!("{line} --out {}", self.out(first)));
            }
            let second = format!("{first}-rerun");
            let manifest = cli(&format!("{line} --out {}", self.out(&second)));
            let m = RunManifest::read(&manifest).unwrap();
            for o in m.outputs.iter().filter(|o| o.path.ends_with(".csv")) {
                compared += 1;
                let a = fs::read(self.dir.path().join(first).join(&o.path)).unwrap();
                let b = fs::read(self.dir.path().join(&second).join(&o.path)).unwrap();
                if a != b {
                    mismatched.push(format!("{first}/{}", o.path));
                }
            }
        }
        outcome(
            mismatched.is_empty() && compared > 0,
            format!("{compared} CSV files rerun, mismatches: {mismatched:?}"),
        )
    }
}

fn main() {
    let mut suite = Suite { dir: tempfile::tempdir().expect("temporary directory"), scans: Vec::new() };
    let names = [
        "non-collision invariant",
        "stationarity of the Gaussian ensemble",
        "semicircle and surmise",
        "frozen-tail exactness",
        "kernel identities",
        "logarithmic-derivative integration by parts",
        "Ginibre drift coincidence",
        "rigidity diagnostics",
        "determinism",
    ];
    let mut results: Vec<Option<(Outcome, f64)>> = (0..9).map(|_| None).collect();
    let order: [usize; 9] = [2, 3, 4, 5, 6, 7, 8, 1, 9];
    for id in order {
        let started = Instant::now();
        let o = match id {
            1 => suite.criterion_1(),
            2 => suite.criterion_2(),
            3 => suite.criterion_3(),
            4 => suite.criterion_4(),
            5 => suite.criterion_5(),
            6 => suite.criterion_6(),
            7 => suite.criterion_7(),
            8 => suite.criterion_8(),
            _ => suite.criterion_9(),
        };
        results[id - 1] = Some((o, started.elapsed().as_secs_f64()));
    }
    let mut failed = 0;
    for (k, r) in results.into_iter().enumerate() {
        let (o, secs) = r.expect("every criterion ran");
        failed += usize::from(!o.pass);
        println!(
            "criterion {}: {} {} [{secs:.1} s] {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            names[k],
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
