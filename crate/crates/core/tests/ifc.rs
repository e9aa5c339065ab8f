use logdyn::dynamics::{evolve, DriftModel, EvolveOptions};
use logdyn::ensembles::{sample, EnsembleSpec};
use logdyn::ifc::{consistency_report, perturbation_probe};

#[test]
fn perturbation_decays_with_distance() {
    let n = 32;
    let model = DriftModel::dyson(2.0, f64::INFINITY).with_confinement(0.5);
    let start = sample(&EnsembleSpec::gaussian(n, 2.0, 31)).unwrap().config;
    let reference = evolve(&start, &model, &EvolveOptions::new(0.05, 1e-3, 31).record_noise(true)).unwrap();
    // labels are sorted, so label distance from the head is spatial distance
    let devs: Vec<f64> = [4, 12, 31]
        .iter()
        .map(|&l| perturbation_probe(&reference, &model, 4, l, 1e-6).unwrap())
        .collect();
    assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
    assert!(devs[0] < 1e-6);
}

#[test]
fn head_resolve_is_exact_for_every_head_size() {
    let model = DriftModel::airy(2.0, 6.0);
    let start = logdyn::Configuration::line((0..10).map(|i| -(10 - i) as f64).collect());
    let reference = evolve(&start, &model, &EvolveOptions::new(0.05, 1e-3, 2).record_noise(true)).unwrap();
    let ms: Vec<usize> = (1..=10).collect();
    for row in consistency_report(&reference, &model, &ms, 1e-6).unwrap() {
        assert_eq!(row.max_dev, 0.0, "m = {}", row.m);
    }
}
