use logdyn::dynamics::DriftModel;
use logdyn::ensembles::EnsembleSpec;
use logdyn::measures::{quasi_gibbs_ratio, verify_ibp, LogDerivativeField, TestFunction, TruncatedGaussian};
use logdyn::special::QuadratureGrid;

#[test]
fn single_particle_identity_by_quadrature() {
    // N = 1: X ~ N(0, 1), d(x) = −x, f = e^{−(x−c)²};
    // E f'(X) = E X f(X) = 2c/(3√3) e^{−c²/3}
    let spec = EnsembleSpec::gaussian(1, 2.0, 0);
    let field = LogDerivativeField::for_ensemble(&spec).unwrap();
    let grid = QuadratureGrid::gauss_legendre(&[(-14.0, 14.0)], 400).unwrap();
    for c in [0.0, 0.5, 1.3] {
        let f = TruncatedGaussian { center: vec![c], width: 1.0 };
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for (&x, &w) in grid.nodes.iter().zip(&grid.weights) {
            let phi = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let mut g = [0.0];
            f.gradient(&[x], &mut g);
            let mut d = [0.0];
            field.at(0, &[x], &mut d).unwrap();
            lhs += w * phi * g[0];
            rhs -= w * phi * f.value(&[x]) * d[0];
        }
        let exact = 2.0 * c / (3.0 * 3f64.sqrt()) * (-c * c / 3.0).exp();
        assert!((lhs - exact).abs() < 1e-13 && (rhs - exact).abs() < 1e-13, "{lhs} {rhs} {exact}");
    }
}

#[test]
fn ibp_holds_for_goe() {
    let spec = EnsembleSpec::gaussian(4, 1.0, 6);
    let field = LogDerivativeField::for_ensemble(&spec).unwrap();
    let f = TruncatedGaussian { center: vec![-0.7], width: 0.8 };
    let e = verify_ibp(&spec, &field, &f, 100_000).unwrap();
    assert!(e.z() < 4.0, "{e:?}");
}

#[test]
fn wrong_field_is_detected() {
    // twice the correct confinement
    let spec = EnsembleSpec::gaussian(4, 2.0, 6);
    let field = LogDerivativeField::new(DriftModel::dyson(2.0, f64::INFINITY).with_confinement(1.0)).unwrap();
    let f = TruncatedGaussian { center: vec![1.0], width: 1.0 };
    let e = verify_ibp(&spec, &field, &f, 100_000).unwrap();
    assert!(e.z() > 6.0, "{e:?}");
}

#[test]
fn quasi_gibbs_spread_vanishes_without_outside_points() {
    let r = quasi_gibbs_ratio(&EnsembleSpec::gaussian(2, 2.0, 1), 3.0, 2, 50, 7).unwrap();
    assert!(r.samples_used > 0);
    assert!(r.spread_quantiles[4] < 1e-9, "{:?}", r.spread_quantiles);
}
