use besov_dunkl::besov::{equivalence_report, BesovParams, Ceilings, Lattices, Verdict};
use besov_dunkl::catalog::lookup;
use besov_dunkl::smoothness::best_approx;
use besov_dunkl::{AlphaParameter, QuadGrid};

fn gaussian(a: f64, n: usize) -> besov_dunkl::SampledFunction {
    let g = QuadGrid::shared(AlphaParameter::new(a).unwrap(), 20.0, n).unwrap();
    lookup("gaussian").unwrap().sample(&g).unwrap()
}

#[test]
fn gaussian_best_approximation_at_p2() {
    // sqrt(int_{|l|>1} exp(-l^2) |l| / 2 dl) = sqrt(exp(-1) / 2)
    let e = best_approx(&gaussian(0.0, 1024), 1.0, 2.0).unwrap();
    assert!((e.value - (0.5 * (-1.0f64).exp()).sqrt()).abs() <= 1e-9, "{}", e.value);
    assert!(!e.upper_bound);
}

#[test]
fn gaussian_report_passes_all_three_comparisons() {
    let params = BesovParams::new(2.0, 2.0, 0.5, 0.5).unwrap();
    let r = equivalence_report(&gaussian(0.5, 2048), &params, &Lattices::default(), &Ceilings::default()).unwrap();
    assert_eq!(r.flags.w_k_equivalence, Verdict::Pass);
    assert_eq!(r.flags.ed_below_bd, Verdict::Pass);
    assert_eq!(r.flags.bd_below_ed, Verdict::Pass);
    assert!(!r.flags.degenerate && !r.flags.e_upper_bound);
    for v in [r.seminorms.bd, r.seminorms.kd, r.seminorms.ed] {
        assert!(v.is_finite() && v > 0.0);
    }
}

#[test]
fn sup_seminorm_is_stable_under_refinement() {
    let params = BesovParams::new(2.0, f64::INFINITY, 0.5, 0.5).unwrap();
    let l = Lattices::default();
    let c = Ceilings::default();
    let coarse = equivalence_report(&gaussian(0.5, 1024), &params, &l, &c).unwrap().seminorms.bd;
    let fine = equivalence_report(&gaussian(0.5, 2048), &params, &l, &c).unwrap().seminorms.bd;
    assert!(((coarse - fine) / fine).abs() < 0.02, "{coarse} vs {fine}");
}
