use std::ffi::CString;
use std::ptr;

use besov_dunkl_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { bd_last_error(buf.as_mut_ptr().cast(), buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8(buf).unwrap()
}

fn grid(alpha: f64, n: usize) -> *mut BdGrid {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { bd_grid_new(alpha, 20.0, n, &mut g) }, BdStatus::Ok);
    g
}

#[test]
fn kernel_and_errors() {
    let (mut re, mut im) = (0.0, 0.0);
    unsafe {
        assert_eq!(bd_dunkl_kernel(0.5, 0.0, 3.0, &mut re, &mut im), BdStatus::Ok);
        assert_eq!((re, im), (1.0, 0.0));
        assert_eq!(bd_dunkl_kernel(-0.6, 1.0, 1.0, &mut re, &mut im), BdStatus::Domain);
        assert!(last_error().contains("alpha"));
        assert_eq!(bd_dunkl_kernel(0.5, 1.0, 1.0, ptr::null_mut(), &mut im), BdStatus::NullPointer);
        let mut g = ptr::null_mut();
        assert_eq!(bd_grid_new(0.0, 20.0, 130, &mut g), BdStatus::Domain);
        assert!(g.is_null());
        assert_eq!(bd_grid_len(ptr::null()), 0);
        bd_grid_free(ptr::null_mut());
    }
}

#[test]
fn transform_round_trip() {
    let g = grid(0.5, 1024);
    unsafe {
        let n = bd_grid_len(g);
        assert_eq!(n, 1024);
        let mut nodes = vec![0.0; n];
        assert_eq!(bd_grid_nodes(g, nodes.as_mut_ptr(), n), BdStatus::Ok);
        assert_eq!(bd_grid_nodes(g, nodes.as_mut_ptr(), n - 1), BdStatus::BufferTooSmall);
        let vals: Vec<f64> = nodes.iter().map(|x| (-0.5 * x * x).exp()).collect();
        let mut f = ptr::null_mut();
        assert_eq!(bd_function_from_values(g, vals.as_ptr(), n, &mut f), BdStatus::Ok);
        assert_eq!(bd_function_parity(f), 0);
        let mut s = ptr::null_mut();
        assert_eq!(bd_transform(f, ptr::null(), &mut s), BdStatus::Ok);
        // the Gaussian is a fixed point
        let mut sv = vec![0.0; n];
        assert_eq!(bd_spectrum_values(s, sv.as_mut_ptr(), ptr::null_mut(), n), BdStatus::Ok);
        for (a, b) in sv.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-8);
        }
        let mut back = ptr::null_mut();
        assert_eq!(bd_inverse_transform(s, g, &mut back), BdStatus::Ok);
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(bd_function_values(back, re.as_mut_ptr(), im.as_mut_ptr(), n), BdStatus::Ok);
        for (a, b) in re.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-7);
        }
        let mut norm = 0.0;
        assert_eq!(bd_lp_norm(f, 0.5, &mut norm), BdStatus::Domain);
        assert_eq!(bd_lp_norm(f, 2.0, &mut norm), BdStatus::Ok);
        assert!(norm > 0.0);
        bd_function_free(back);
        bd_spectrum_free(s);
        bd_function_free(f);
        bd_grid_free(g);
    }
}

#[test]
fn catalog_translate_convolve() {
    let g = grid(0.0, 256);
    unsafe {
        let name = CString::new("gaussian").unwrap();
        let mut f = ptr::null_mut();
        assert_eq!(bd_function_from_catalog(g, name.as_ptr(), &mut f), BdStatus::Ok);
        let bad = CString::new("nope").unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(bd_function_from_catalog(g, bad.as_ptr(), &mut h), BdStatus::Usage);
        assert!(last_error().contains("nope"));

        let mut t = ptr::null_mut();
        assert_eq!(bd_translate(f, 0.0, 32, &mut t), BdStatus::Ok);
        let n = bd_function_len(f);
        let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
        bd_function_values(f, a.as_mut_ptr(), ptr::null_mut(), n);
        bd_function_values(t, b.as_mut_ptr(), ptr::null_mut(), n);
        assert_eq!(a, b);

        let other = grid(0.5, 256);
        let mut f2 = ptr::null_mut();
        assert_eq!(bd_function_from_catalog(other, name.as_ptr(), &mut f2), BdStatus::Ok);
        let mut c = ptr::null_mut();
        assert_eq!(bd_convolve(f, f2, 32, &mut c), BdStatus::GridMismatch);
        assert!(c.is_null());
        assert_eq!(bd_convolve(f, ptr::null(), 32, &mut c), BdStatus::NullPointer);

        for h in [t, f, f2] {
            bd_function_free(h);
        }
        bd_grid_free(other);
        bd_grid_free(g);
    }
}

#[test]
fn seminorms_of_constant_are_degenerate() {
    let g = grid(0.0, 256);
    unsafe {
        let name = CString::new("constant").unwrap();
        let mut f = ptr::null_mut();
        assert_eq!(bd_function_from_catalog(g, name.as_ptr(), &mut f), BdStatus::Ok);
        let mut out = BdSeminorms::default();
        assert_eq!(bd_seminorms(f, 2.0, f64::INFINITY, 0.5, &mut out), BdStatus::Ok);
        assert_eq!(out.degenerate, 1);
        assert_eq!((out.bd, out.kd, out.ed), (0.0, 0.0, 0.0));
        assert_eq!(bd_seminorms(f, 2.0, 2.0, -1.0, &mut out), BdStatus::Domain);
        bd_function_free(f);
        bd_grid_free(g);
    }
}
