//! Pins the exact expected values that the float-side test suites reuse.
//! Every constant asserted here was computed by this oracle; the float
//! libraries are tested against these fractions, not the other way around.

use hk_oracle::*;

/// Weights as exact tenths, e.g. 7 -> 7/10.
fn tenths(parts: &[i64]) -> Vec<Q> {
    normalize_weights(&parts.iter().map(|&p| qr(p, 10)).collect::<Vec<_>>())
}

#[test]
fn two_point_worked_instance() {
    let a = [qi(14), qi(10)];
    let w = tenths(&[7, 3]);
    assert_eq!(harmonic_mean(&a, &w), qr(25, 2)); // 12.5
    assert_eq!(arithmetic_mean(&a, &w), qr(64, 5)); // 12.8
    assert_eq!(arithmetic_mean(&a, &w) - harmonic_mean(&a, &w), qr(3, 10));
    assert_eq!(gap_closed_form(&a, &w), qr(3, 10));
    assert_eq!(min_bound(&a, &w), qi(20));

    let xh = intersection_abscissa(&a[0], &a[1], &w[0], &w[1]);
    assert_eq!(xh, qr(5, 8)); // 0.625
    // Case ordinates: w2*H, w1*H, H/2.
    assert_eq!(intersection_ordinate(1, &a[0], &w[0], &w[1], &xh), qr(15, 4));
    assert_eq!(intersection_ordinate(2, &a[0], &w[0], &w[1], &xh), qr(35, 4));
    assert_eq!(intersection_ordinate(3, &a[0], &w[0], &w[1], &xh), qr(25, 4));
    // The chord through (0, a2) and (1, a1) passes through (x_H, H).
    assert_eq!(chord(&a[0], &a[1], &xh), qr(25, 2));
}

#[test]
fn two_point_uniform_instance() {
    let a = [qi(14), qi(2)];
    let w = tenths(&[5, 5]);
    assert_eq!(harmonic_mean(&a, &w), qr(7, 2)); // 3.5
    assert_eq!(intersection_abscissa(&a[0], &a[1], &w[0], &w[1]), qr(1, 8));
}

#[test]
fn two_point_scaling_instance() {
    let a = [qi(3), qi(6)];
    let w = tenths(&[6, 4]);
    assert_eq!(harmonic_mean(&a, &w), qr(15, 4)); // 3.75
    // Rescaled sample (a_i / w_i) = (5, 15) under uniform weights.
    let rescaled = [&a[0] / &w[0], &a[1] / &w[1]];
    assert_eq!(rescaled[0], qi(5));
    assert_eq!(rescaled[1], qi(15));
    let h_star = harmonic_mean(&rescaled, &tenths(&[5, 5]));
    assert_eq!(h_star, qr(15, 2)); // 7.5 = 2 * 3.75
    assert_eq!(h_star, qi(2) * harmonic_mean(&a, &w));
}

#[test]
fn three_point_scene_instance() {
    let a = [qi(3), qi(4), qi(6)];
    let w = tenths(&[2, 2, 6]);
    let h = harmonic_mean(&a, &w);
    assert_eq!(h, qr(60, 13));
    assert_eq!(arithmetic_mean(&a, &w), qi(5));

    let xb_plane = x_bar(&a, &w, Cap::Plane);
    assert_eq!(xb_plane, vec![qr(4, 13), qr(3, 13), qr(36, 13)]);
    let xb_cap = x_bar(&a, &w, Cap::Paraboloid);
    assert_eq!(xb_cap, vec![qr(4, 13), qr(3, 13), qr(20, 13)]);

    assert_eq!(axis_coefficients(&a, &w, Cap::Plane), vec![qr(-26, 3), qr(-52, 5)]);
    assert_eq!(axis_coefficients(&a, &w, Cap::Paraboloid), vec![qr(-26, 9), qr(-52, 15)]);
    assert_eq!(cap_coefficients(&a, &w), vec![qr(26, 9), qr(52, 15)]);

    // Interpolating plane through the prism edge heights recovers both means.
    let heights = a.to_vec();
    assert_eq!(hyperplane_at(&heights, &xb_plane[..2]), h);
    assert_eq!(hyperplane_at(&heights, &[w[0].clone(), w[1].clone()]), qi(5));

    for cap in [Cap::Plane, Cap::Paraboloid] {
        for r in scene_residuals_at_x_bar(&a, &w, cap) {
            use num_traits::Zero;
            assert!(r.is_zero());
        }
    }
}

#[test]
fn corollary_scene_instance() {
    let a = [qi(6), qi(7), qi(10)];
    let w = tenths(&[4, 3, 3]);
    let h = harmonic_mean(&a, &w);
    assert_eq!(h, qr(2100, 293)); // 7.16723..., not the rounded 7.1599 sometimes quoted

    let rescaled: Vec<Q> = a.iter().zip(&w).map(|(ai, wi)| ai / wi).collect();
    assert_eq!(rescaled, vec![qi(15), qr(70, 3), qr(100, 3)]);
    let uniform = normalize_weights(&[qi(1), qi(1), qi(1)]);
    let h_star = harmonic_mean(&rescaled, &uniform);
    assert_eq!(h_star, qr(6300, 293));
    assert_eq!(h_star, qi(3) * &h);
    assert_eq!(arithmetic_mean(&rescaled, &uniform), qr(215, 9));

    // The rescaled prism shares the base point x_bar_i = w_i H / a_i with the
    // weighted scene. Its interpolating plane there reads off n * H = H*,
    // while the common point's own last coordinate is the plain H:
    // x_bar_n = (1/n) * H* = H.
    let xb: Vec<Q> = (0..2).map(|i| &w[i] * &h / &a[i]).collect();
    assert_eq!(xb, vec![qr(140, 293), qr(90, 293)]);
    let star_plane = hyperplane_at(&rescaled, &xb);
    assert_eq!(star_plane, h_star);
    assert_eq!(&h_star / qi(3), h);

    // Plain-scene plane at the same base still reads off the plain means.
    let plain_plane = hyperplane_at(&a, &xb);
    assert_eq!(plain_plane, h);
    assert_eq!(hyperplane_at(&a, &[w[0].clone(), w[1].clone()]), arithmetic_mean(&a, &w));
}

#[test]
fn uniform_weights_flatten_every_quadratic() {
    use num_traits::Zero;
    for n in 2..=8usize {
        let a: Vec<Q> = (0..n).map(|i| qr(2 * i as i64 + 1, 2)).collect();
        let w = normalize_weights(&vec![qi(1); n]);
        for cap in [Cap::Plane, Cap::Paraboloid] {
            for b in axis_coefficients(&a, &w, cap) {
                assert!(b.is_zero());
            }
        }
        for c in cap_coefficients(&a, &w) {
            assert!(c.is_zero());
        }
    }
}

#[test]
fn uniform_cubic_split_midpoint() {
    // Third-difference impulse on the unit-spaced grid: the cubic through
    // (0,0),(1,0),(2,0),(3,1) evaluated midway between the inner nodes.
    let xs = [qi(0), qi(1), qi(2), qi(3)];
    let fs = [qi(0), qi(0), qi(0), qi(1)];
    let mid = qr(3, 2);
    assert_eq!(lagrange_cubic(&xs, &fs, &mid), qr(-1, 16));
    assert_eq!(split_cubic_midpoint(&xs, &fs), qr(-1, 16));
}

#[test]
fn nonuniform_split_midpoint() {
    // Spacings (1, 2, 1): coupling -1/2, indicator weights (1/2, 1/2).
    let xs = [qi(0), qi(1), qi(3), qi(4)];
    let h2 = &xs[2] - &xs[1];
    let c = -(&h2 * &h2) / qi(8);
    assert_eq!(c, qr(-1, 2));
    for fs in [
        [qi(0), qi(1), qi(27), qi(64)],
        [qi(5), qi(-3), qi(2), qi(11)],
        [qr(1, 3), qr(2, 7), qr(-5, 11), qr(9, 13)],
    ] {
        let mid = qi(2);
        assert_eq!(split_cubic_midpoint(&xs, &fs), lagrange_cubic(&xs, &fs, &mid));
    }
}
