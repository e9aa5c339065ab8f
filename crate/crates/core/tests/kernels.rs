//! Kernel values and Fredholm determinants against values computed
//! independently with mpmath / scipy.

use logdyn::kernels::{eval_kernel, extended_airy, fredholm_det, multitime_mgf, Chi, KernelSpec};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol:e})");
}

#[test]
fn airy_kernel_reference_values() {
    let k = KernelSpec::airy();
    close(eval_kernel(&k, 0.0, &[-1.0], 0.0, &[-0.5]).unwrap(), 0.208928984853488376833627132244, 1e-12);
    close(eval_kernel(&k, 0.0, &[-1.0], 0.0, &[-1.0]).unwrap(), 0.286928696837016258812030627904, 1e-12);
}

#[test]
fn bessel_kernel_uses_order_a_minus_one() {
    // order α = a − 1 = 1
    let k = KernelSpec::bessel(2.0).unwrap();
    close(eval_kernel(&k, 0.0, &[1.5], 0.0, &[2.0]).unwrap(), 0.0403236474077668487507907553094, 1e-12);
}

#[test]
fn extended_airy_reference_values() {
    close(extended_airy(0.0, -1.0, 0.5, -1.0).unwrap(), 0.244558929181780744321706682832, 1e-9);
    close(extended_airy(0.0, -1.0, 1.0, -1.0).unwrap(), 0.21165847767016214460633564421, 1e-9);
    close(extended_airy(0.5, -1.0, 0.0, -1.0).unwrap(), -0.3826653259621308101175287, 1e-9);
}

#[test]
fn extended_airy_equal_time_is_airy() {
    for (x, y) in [(-2.5, 1.0), (0.3, -0.7), (2.0, 2.9)] {
        let a = eval_kernel(&KernelSpec::airy(), 0.0, &[x], 0.0, &[y]).unwrap();
        close(extended_airy(0.7, x, 0.7, y).unwrap(), a, 1e-10);
    }
}

#[test]
fn ginibre_density_is_one_over_pi() {
    let v = eval_kernel(&KernelSpec::ginibre(), 0.0, &[1.3, -0.4], 0.0, &[1.3, -0.4]).unwrap();
    close(v, std::f64::consts::FRAC_1_PI, 1e-15);
}

#[test]
fn sine_gap_probabilities() {
    let sine = KernelSpec::sine();
    let one = fredholm_det(&sine, &[(0.0, 1.0)], 20, Chi::Constant(-1.0)).unwrap();
    close(one.value, 0.17021742137918552, 1e-12);
    // E(0; s) = 1 − s + π² s⁴ / 36 + O(s⁶)
    let small = fredholm_det(&sine, &[(0.0, 0.01)], 8, Chi::Constant(-1.0)).unwrap();
    close(small.value, 0.9900000027414126, 1e-13);
}

#[test]
fn tracy_widom_values() {
    let airy = KernelSpec::airy();
    let at = |s: f64| fredholm_det(&airy, &[(s, 12.0)], 40, Chi::Constant(-1.0)).unwrap().value;
    close(at(-2.0), 0.41322414250512124, 1e-10);
    close(at(0.0), 0.9693728283552622, 1e-10);
}

#[test]
fn split_domain_equals_joined_domain() {
    let sine = KernelSpec::sine();
    let joined = fredholm_det(&sine, &[(0.0, 1.2)], 16, Chi::Constant(-1.0)).unwrap().value;
    let split = fredholm_det(&sine, &[(0.0, 0.5), (0.5, 1.2)], 16, Chi::Constant(-1.0)).unwrap().value;
    close(joined, split, 1e-12);
}

#[test]
fn single_time_block_matches_airy_determinant() {
    let chi = Chi::Constant(-0.4);
    let one = multitime_mgf(&KernelSpec::extended_airy(), &[0.3], &[(-1.0, 6.0)], 20, &[chi]).unwrap().value;
    let direct = fredholm_det(&KernelSpec::airy(), &[(-1.0, 6.0)], 20, chi).unwrap().value;
    close(one, direct, 1e-9);
}
