//! Independent reference values and helpers shared by the test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn ulps(a: f64, b: f64) -> u64 {
    fn key(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    }
    key(a).abs_diff(key(b))
}

/// Closed-form kernel entry through log-Gamma and the reflection formula,
/// independent of the library's recurrence.
pub fn closed_form_coeff(alpha: f64, k: usize) -> f64 {
    let lg = |x: f64| libm::lgamma(x);
    if k == 0 {
        return (lg(alpha + 1.0) - 2.0 * lg(0.5 * alpha + 1.0)).exp();
    }
    let k = k as f64;
    let s = (std::f64::consts::PI * 0.5 * alpha).sin();
    -s / std::f64::consts::PI * (lg(alpha + 1.0) + lg(k - 0.5 * alpha) - lg(0.5 * alpha + k + 1.0)).exp()
}

/// High-precision reference values `(k, c_k)` frozen from a 50-digit
/// evaluation of the closed form.
pub const REFERENCE_COEFFS: &[(f64, &[(usize, f64)])] = &[
    (
        1.01,
        &[
            (0, 1.278178813510465),
            (1, -0.42889056533075404),
            (2, -0.08475083027493942),
            (3, -0.03614907025992423),
            (7, -0.006430757585155609),
            (10, -0.0031315101130052108),
            (100, -3.052514307784261e-05),
            (1000, -2.9829554080896886e-07),
            (5000, -1.1741320588448464e-08),
            (9999, -2.91564033257435e-09),
            (10000, -2.9150543184612153e-09),
        ],
    ),
    (
        1.3,
        &[
            (0, 1.4400112287560058),
            (1, -0.567277150722063),
            (2, -0.07492339726517812),
            (3, -0.027711393509038482),
            (7, -0.003798652730946365),
            (10, -0.0016652678742393576),
            (100, -8.312133239933683e-06),
            (1000, -4.1657655044314687e-08),
            (5000, -1.0281669463569432e-09),
            (9999, -2.0883079189341867e-10),
            (10000, -2.087827639331006e-10),
        ],
    ),
    (
        1.5,
        &[
            (0, 1.573787465354795),
            (1, -0.6744803422949122),
            (2, -0.06131639475408292),
            (3, -0.020438798251360975),
            (7, -0.002334009071739531),
            (10, -0.0009513786019485183),
            (100, -2.992230740961773e-06),
            (1000, -9.461752131971402e-09),
            (5000, -1.692568787668211e-10),
            (9999, -2.992815267079304e-11),
            (10000, -2.992067119373612e-11),
        ],
    ),
    (
        1.75,
        &[
            (0, 1.7692576250231415),
            (1, -0.8256535583441328),
            (2, -0.03589798079757099),
            (3, -0.010421994425101255),
            (7, -0.0009435650786241102),
            (10, -0.0003510358397706766),
            (100, -6.195916461964422e-07),
            (1000, -1.1017250446478291e-09),
            (5000, -1.3179696107939765e-11),
            (9999, -1.959712377698168e-12),
            (10000, -1.9591735039457545e-12),
        ],
    ),
    (
        1.99,
        &[
            (0, 1.990032186613175),
            (1, -0.9925223186366462),
            (2, -0.00165696547351694),
            (3, -0.0004168336172426845),
            (7, -3.0060577923615153e-05),
            (10, -1.024001548909545e-05),
            (100, -1.037590743146796e-08),
            (1000, -1.0616553568303217e-11),
            (5000, -8.63103405214486e-14),
            (9999, -1.0867083164120325e-14),
            (10000, -1.0863834229523245e-14),
        ],
    ),
    (
        2.0,
        &[
            (0, 2.0),
            (1, -1.0),
            (2, 0.0),
            (3, 0.0),
            (7, 0.0),
            (10, 0.0),
            (100, 0.0),
            (1000, 0.0),
            (5000, 0.0),
            (9999, 0.0),
            (10000, 0.0),
        ],
    ),
];

/// `B(x) = sin x / √(2 − cos x)` and its first two derivatives in closed form.
pub fn b_derivatives(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let g = 2.0 - c;
    let d1 = c / g.sqrt() - 0.5 * s * s / g.powf(1.5);
    let d2 = -s / g.sqrt() - 1.5 * s * c / g.powf(1.5) + 0.75 * s * s * s / g.powf(2.5);
    (d1, d2)
}
