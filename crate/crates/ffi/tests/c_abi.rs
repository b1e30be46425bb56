use std::ffi::{CStr, CString};
use std::ptr;

use revival_ffi::*;

fn last_error() -> String {
    let p = revival_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn level_sets_and_revival_params() {
    unsafe {
        let mut set = ptr::null_mut();
        assert_eq!(revival_levels_biperiodic(25, 10, &mut set), RevivalStatus::Ok);
        assert_eq!(revival_levels_len(set), 35);
        let (mut p, mut q) = (0, 0);
        assert_eq!(revival_levels_get(set, 0, &mut p, &mut q), RevivalStatus::Ok);
        assert_eq!((p, q), (-49, 1));
        let mut params = RevivalParams::default();
        assert_eq!(revival_levels_params(set, &mut params), RevivalStatus::Ok);
        assert_eq!((params.a_num, params.a_den, params.b_num, params.b_den), (1, 2, 0, 1));
        assert!((params.t_rev - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(revival_levels_get(set, 35, &mut p, &mut q), RevivalStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));
        revival_levels_free(set);

        let mut primes = ptr::null_mut();
        assert_eq!(revival_levels_primes(50, &mut primes), RevivalStatus::Ok);
        assert_eq!(revival_levels_get(primes, 49, &mut p, &mut q), RevivalStatus::Ok);
        assert_eq!((p, q), (229, 1));
        revival_levels_free(primes);

        let num = [1i64, 3, 7];
        let den = [2i64, 2, 2];
        let mut custom = ptr::null_mut();
        assert_eq!(revival_levels_new(num.as_ptr(), den.as_ptr(), 3, &mut custom), RevivalStatus::Ok);
        assert_eq!(revival_levels_params(custom, &mut params), RevivalStatus::Ok);
        assert_eq!((params.a_num, params.a_den, params.b_num, params.b_den), (1, 1, 1, 2));
        revival_levels_free(custom);

        let unsorted = [3i64, 1];
        let ones = [1i64, 1];
        let mut bad = ptr::null_mut();
        assert_eq!(
            revival_levels_new(unsorted.as_ptr(), ones.as_ptr(), 2, &mut bad),
            RevivalStatus::InvalidArgument
        );
        assert!(bad.is_null());
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(revival_levels_harmonic(3, ptr::null_mut()), RevivalStatus::NullPointer);
        assert!(last_error().contains("out"));
        let mut params = RevivalParams::default();
        assert_eq!(revival_levels_params(ptr::null(), &mut params), RevivalStatus::NullPointer);
        assert_eq!(revival_levels_len(ptr::null()), 0);
        revival_levels_free(ptr::null_mut());
        revival_potential_free(ptr::null_mut());
        revival_job_free(ptr::null_mut());
        // a successful call clears the message
        let mut set = ptr::null_mut();
        assert_eq!(revival_levels_harmonic(3, &mut set), RevivalStatus::Ok);
        assert!(revival_last_error().is_null());
        revival_levels_free(set);
    }
}

#[test]
fn bad_job_text_is_a_parse_error() {
    let toml = CString::new("[family]\nkind = \"primes\"\ncount = 4\nbogus = 1\n").unwrap();
    let mut job = ptr::null_mut();
    let status = unsafe { revival_job_from_toml(toml.as_ptr(), &mut job) };
    assert_eq!(status, RevivalStatus::Parse);
    assert!(last_error().contains("bogus"));
    assert!(job.is_null());
}

#[test]
fn design_verify_and_revive() {
    let toml = CString::new(
        "[family]\nkind = \"biperiodic\"\nn_added = 6\nharmonic_count = 4\n[grid]\nn_points = 2049\n",
    )
    .unwrap();
    unsafe {
        let mut job = ptr::null_mut();
        assert_eq!(revival_job_from_toml(toml.as_ptr(), &mut job), RevivalStatus::Ok, "{}", last_error());
        let mut pot = ptr::null_mut();
        assert_eq!(revival_job_design(job, &mut pot), RevivalStatus::Ok);
        let n = revival_potential_len(pot);
        assert_eq!(n, 2049);

        let mut x = vec![0.0; n];
        let mut v = vec![0.0; n];
        assert_eq!(revival_potential_samples(pot, x.as_mut_ptr(), v.as_mut_ptr(), n), RevivalStatus::Ok);
        assert_eq!(x[n / 2], 0.0);
        let mut at = 0.0;
        assert_eq!(revival_potential_eval(pot, x[100], &mut at), RevivalStatus::Ok);
        assert!((at - v[100]).abs() < 1e-12);
        assert_eq!(
            revival_potential_samples(pot, x.as_mut_ptr(), v.as_mut_ptr(), n - 1),
            RevivalStatus::BufferTooSmall
        );

        let mut levels = ptr::null_mut();
        assert_eq!(revival_job_levels(job, &mut levels), RevivalStatus::Ok);
        let mut e = [0.0; 3];
        assert_eq!(
            revival_potential_eigenvalues(pot, RevivalStencil::FivePoint as i32, 3, e.as_mut_ptr()),
            RevivalStatus::Ok
        );
        for (k, target) in [-11.0, -9.0, -7.0].iter().enumerate() {
            assert!((e[k] - target).abs() < 1e-4, "{k}: {}", e[k]);
        }
        assert_eq!(revival_potential_eigenvalues(pot, 7, 3, e.as_mut_ptr()), RevivalStatus::InvalidArgument);

        let (mut max_error, mut passed) = (0.0, false);
        assert_eq!(
            revival_potential_verify(pot, levels, 1e-4, RevivalStencil::FivePoint as i32, &mut max_error, &mut passed),
            RevivalStatus::Ok
        );
        assert!(passed && max_error < 1e-4);
        assert_eq!(
            revival_potential_verify(pot, levels, 1e-14, RevivalStencil::FivePoint as i32, &mut max_error, &mut passed),
            RevivalStatus::Ok
        );
        assert!(!passed);

        let mut params = RevivalParams::default();
        revival_levels_params(levels, &mut params);
        let times = [0.0, 0.5 * params.t_rev, params.t_rev];
        let (mut re, mut im, mut residual) = ([0.0; 3], [0.0; 3], -1.0);
        assert_eq!(
            revival_job_autocorrelation(job, pot, times.as_ptr(), 3, re.as_mut_ptr(), im.as_mut_ptr(), &mut residual),
            RevivalStatus::Ok
        );
        assert!((re[0] - 1.0).abs() < 1e-12 && im[0].abs() < 1e-12);
        assert!(re[2].hypot(im[2]) > 0.999);
        assert!(residual >= 0.0);

        revival_levels_free(levels);
        revival_potential_free(pot);
        revival_job_free(job);
    }
}

#[test]
fn potential_csv_round_trip() {
    let dir = std::env::temp_dir().join(format!("revival-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("v.csv");
    std::fs::write(&path, "x,V\n-1,0.5\n0,0\n1,0.5\n").unwrap();
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    let missing = CString::new(dir.join("missing.csv").to_str().unwrap()).unwrap();
    unsafe {
        let mut pot = ptr::null_mut();
        assert_eq!(revival_potential_read_csv(c_path.as_ptr(), &mut pot), RevivalStatus::Ok);
        assert_eq!(revival_potential_len(pot), 3);
        revival_potential_free(pot);
        let mut none = ptr::null_mut();
        assert_eq!(revival_potential_read_csv(missing.as_ptr(), &mut none), RevivalStatus::Io);
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(revival_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
