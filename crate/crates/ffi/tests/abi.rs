use std::ffi::{c_char, c_int, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use current_lab_ffi::*;

fn last_error() -> String {
    let p = cl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn curve_periods_and_tau() {
    unsafe {
        let mut curve = ptr::null_mut();
        assert_eq!(cl_curve_new(1.0, 2.0, 3.0, &mut curve), ClStatus::ClOk);
        let (mut re, mut im) = ([0.0; 4], [0.0; 4]);
        assert_eq!(cl_alpha_periods(curve, re.as_mut_ptr(), im.as_mut_ptr()), ClStatus::ClOk);
        assert!(re[0].abs() < 1e-12 && im[0] > 0.0);
        assert!(im[3].abs() < 1e-12 && re[3] < 0.0);
        let mut data = ptr::null_mut();
        assert_eq!(cl_period_data_new(curve, &mut data), ClStatus::ClOk);
        assert_eq!(cl_period_data_tau(data, re.as_mut_ptr(), im.as_mut_ptr()), ClStatus::ClOk);
        assert!((im[1] - im[2]).abs() < 1e-9);
        assert!((im[0] - 1.78056882835559).abs() < 1e-10);
        let mut eig = [0.0; 2];
        assert_eq!(cl_period_data_im_tau_eigenvalues(data, eig.as_mut_ptr()), ClStatus::ClOk);
        assert!(eig[0] > 0.0 && eig[0] <= eig[1]);
        cl_period_data_free(data);
        cl_curve_free(curve);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut curve = ptr::null_mut();
        assert_eq!(cl_curve_new(3.0, 2.0, 1.0, &mut curve), ClStatus::ClErrInput);
        assert!(curve.is_null());
        assert!(last_error().contains("0 < s < t < r"));
        assert_eq!(cl_curve_new(1.0, 2.0, 3.0, ptr::null_mut()), ClStatus::ClErrNullPointer);
        let mut eig = [0.0; 2];
        assert_eq!(cl_period_data_im_tau_eigenvalues(ptr::null(), eig.as_mut_ptr()), ClStatus::ClErrNullPointer);
        let mut res = ptr::null_mut();
        assert_eq!(cl_search_rational(1, 1, 2.0, 3.0, &mut res), ClStatus::ClErrNoSolution);
        assert!(last_error().contains("1.05226"));
        cl_curve_free(ptr::null_mut());
        cl_string_free(ptr::null_mut());
    }
}

#[test]
fn search_and_classification() {
    unsafe {
        let mut res = ptr::null_mut();
        assert_eq!(cl_search_rational(3, 2, 2.0, 3.0, &mut res), ClStatus::ClOk);
        assert!((cl_search_result_ratio(res) - 1.5).abs() <= 1e-11);
        let s = cl_search_result_s(res);
        assert!(s > 0.0 && s < 2.0);
        let (mut re, mut im) = ([0.0; 2], [0.0; 2]);
        assert_eq!(cl_search_result_scaled_periods(res, re.as_mut_ptr(), im.as_mut_ptr()), ClStatus::ClOk);
        assert!((im[0] - 3.0).abs() < 1e-9 && (re[1].abs() - 2.0).abs() < 1e-9);
        cl_search_result_free(res);
    }
    assert_eq!(cl_classify_charge(0.0, -1.0), ClChargeKind::ClIntegrableLowest);
    assert_eq!(cl_classify_charge(0.0, 2.0), ClChargeKind::ClIntegrableHighest);
    assert_eq!(cl_classify_charge(-1.0, 0.0), ClChargeKind::ClNonintegrable);
}

#[test]
fn run_returns_report_json() {
    let args: Vec<CString> = ["periods", "--curve", "1,2,3"].iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let mut code: c_int = -1;
    let mut json: *mut c_char = ptr::null_mut();
    unsafe {
        assert_eq!(cl_run(ptrs.len() as c_int, ptrs.as_ptr(), &mut code, &mut json), ClStatus::ClOk);
        assert_eq!(code, 0);
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        cl_string_free(json);
        assert!(text.contains("\"tau\""));
        let bad = [CString::new("periods").unwrap(), CString::new("--curve").unwrap(), CString::new("1").unwrap()];
        let bad_ptrs: Vec<*const c_char> = bad.iter().map(|a| a.as_ptr()).collect();
        assert_eq!(cl_run(3, bad_ptrs.as_ptr(), &mut code, &mut json), ClStatus::ClOk);
        assert_eq!(code, 2);
        assert!(json.is_null());
        assert!(last_error().contains("curve"));
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/current_lab.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["cl_curve_new", "cl_period_data_tau", "cl_search_rational", "cl_run", "cl_string_free", "ClErrNoSolution"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let include = format!("-I{}", dir.join("include").display());
    let c = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-fsyntax-only", &include])
        .arg(dir.join("tests/c_usage.c"))
        .status()
        .expect("C compiler");
    assert!(c.success());
    let cpp = Command::new("c++")
        .args(["-x", "c++", "-Wall", "-Werror", "-fsyntax-only", &include])
        .arg(&header)
        .status()
        .expect("C++ compiler");
    assert!(cpp.success());
}
