//! Comparisons against values computed offline with mpmath at 40 digits.
#![allow(clippy::excessive_precision, clippy::approx_constant)]

use std::sync::Arc;

use besov_dunkl::transform::forward_default;
use besov_dunkl::{bessel_j_normalized, dunkl_kernel, gamma, AlphaParameter, Parity, QuadGrid, SampledFunction};

const J: &[(f64, f64, f64)] = &[
    (-0.25, 0.1, 0.99666904689766713501),
    (-0.25, 5.0, -0.067605364441623918884),
    (-0.25, 12.5, 0.39041213942757887422),
    (-0.25, 80.0, -0.13287926959589796174),
    (0.0, 0.1, 0.99750156206604003228),
    (0.0, 5.0, -0.17759677131433830435),
    (0.0, 30.0, -0.086367983581040211336),
    (0.5, 12.5, -0.0053057517880960551144),
    (0.5, 80.0, -0.012423608174042189872),
    (1.5, 1.0, 0.90350603681927036775),
    (1.5, 30.0, -0.00062395279119115370128),
    (1.5, 80.0, 0.000045920454217971266365),
    (3.7, 1.0, 0.94796059929963142619),
    (3.7, 5.0, 0.21261438118612096633),
    (3.7, 12.5, 0.0039927088893468389418),
    (3.7, 30.0, 6.5099343287998421945e-6),
    (3.7, 80.0, -5.4377918777293836454e-7),
];

const GAMMA: &[(f64, f64)] = &[
    (0.3, 2.9915689876875906283),
    (4.25, 8.2850851418352201659),
    (7.75, 3057.8226711926072104),
];

/// `(alpha, x, y, Re E(-ixy), Im E(-ixy))`
const KERNEL: &[(f64, f64, f64, f64, f64)] = &[
    (0.0, 1.0, 2.0, 0.22389077914123566805, -0.5767248077568733872),
    (0.5, 1.0, std::f64::consts::PI, 0.0, -0.31830988618379067154),
    (1.5, -2.0, 3.5, -0.040411042405402420203, -0.057542687483057512152),
    (-0.25, 4.0, -7.0, -0.28005140214524787866, 0.21957192936130053869),
];

/// Transform of `x exp(-x^2/2)`: `(alpha, lambda, Im)`, real part zero.
const MOMENT: &[(f64, f64, f64)] = &[
    (0.0, 0.5, -0.44124845129229770143),
    (0.5, 2.0, -0.27067056647322538379),
    (1.5, 0.5, -0.44124845129229770143),
];

/// Transform of `exp(-(x-1)^2)`: `(alpha, lambda, Re, Im)`.
const BUMP: &[(f64, f64, f64, f64)] = &[
    (0.0, 0.5, 0.79923980499733885812, -0.29481126438206466349),
    (0.0, 2.0, -0.009125543019222653629, -0.23943475735209195473),
    (0.5, 0.5, 0.92840538609156092019, -0.2672006029569748438),
    (0.5, 2.0, 0.06414164323972665245, -0.23152783531302179871),
];

#[test]
fn bessel_and_gamma() {
    for &(a, z, v) in J {
        let got = bessel_j_normalized(a, z).unwrap();
        assert!((got - v).abs() <= 1e-11, "j_{a}({z}) = {got}, want {v}");
    }
    for &(x, v) in GAMMA {
        assert!((gamma(x).unwrap() - v).abs() <= 1e-13 * v.abs(), "gamma({x})");
    }
    assert!(gamma(-0.4).is_err());
}

#[test]
fn kernel_values() {
    for &(a, x, y, re, im) in KERNEL {
        let e = dunkl_kernel(&AlphaParameter::new(a).unwrap(), x, y);
        assert!((e.re - re).abs() <= 1e-12 && (e.im - im).abs() <= 1e-12, "E at {a} {x} {y}: {e}");
    }
}

fn grid(a: f64) -> Arc<QuadGrid> {
    QuadGrid::shared(AlphaParameter::new(a).unwrap(), 20.0, 1024).unwrap()
}

#[test]
fn transforms_at_off_grid_frequencies() {
    for &(a, l, im) in MOMENT {
        let f = SampledFunction::from_real(grid(a), Parity::Odd, |x| x * (-0.5 * x * x).exp()).unwrap();
        let v = forward_default(&f).unwrap().eval(l);
        assert!(v.re.abs() <= 1e-10 && (v.im - im).abs() <= 1e-8, "alpha {a}, lambda {l}: {v}");
    }
    for &(a, l, re, im) in BUMP {
        let f = SampledFunction::from_real(grid(a), Parity::None, |x| (-(x - 1.0) * (x - 1.0)).exp()).unwrap();
        let v = forward_default(&f).unwrap().eval(l);
        assert!((v.re - re).abs() <= 1e-8 && (v.im - im).abs() <= 1e-8, "alpha {a}, lambda {l}: {v}");
    }
}
