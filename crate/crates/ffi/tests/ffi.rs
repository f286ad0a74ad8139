//! Round trips through the C entry points.

use std::ffi::CStr;
use std::ptr;

use piobs_ffi::*;

unsafe fn system(n: usize, m: usize, p: usize, a: &[f64], b: &[f64], c: &[f64]) -> *mut PiobsSystem {
    let mut sys = ptr::null_mut();
    let status = piobs_system_new(n, m, p, a.as_ptr(), b.as_ptr(), c.as_ptr(), &mut sys);
    assert_eq!(status, PiobsStatus::Ok);
    assert!(!sys.is_null());
    sys
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(piobs_last_error_message()) }.to_str().unwrap().to_owned()
}

#[test]
fn worked_scalar_design() {
    unsafe {
        let sys = system(1, 1, 1, &[0.5], &[1.0], &[1.0]);
        let poles_re = [0.2];
        let poles_im = [0.0];
        let opts = PiobsDesignOptions {
            phi_scalar: 0.3,
            pole_count: 1,
            poles_re: poles_re.as_ptr(),
            poles_im: poles_im.as_ptr(),
            ..piobs_design_options_default()
        };
        let mut obs = ptr::null_mut();
        assert_eq!(piobs_design(sys, &opts, &mut obs), PiobsStatus::Ok);

        let mut l = [0.0];
        let mut f = [0.0];
        assert_eq!(piobs_observer_gain_l(obs, l.as_mut_ptr(), 1), PiobsStatus::Ok);
        assert_eq!(piobs_observer_gain_f(obs, f.as_mut_ptr(), 1), PiobsStatus::Ok);
        assert!((l[0] - 1.0).abs() < 1e-12);
        assert!((f[0] - 0.56).abs() < 1e-12);

        let mut radius = f64::NAN;
        assert_eq!(piobs_observer_spectral_radius(obs, &mut radius), PiobsStatus::Ok);
        assert!((radius - 0.3).abs() < 1e-9, "{radius}");

        piobs_observer_free(obs);
        piobs_system_free(sys);
    }
}

#[test]
fn step_tracks_the_plant() {
    unsafe {
        let (a, b, c) = ([0.5], [1.0], [1.0]);
        let sys = system(1, 1, 1, &a, &b, &c);
        let mut obs = ptr::null_mut();
        assert_eq!(piobs_design(sys, ptr::null(), &mut obs), PiobsStatus::Ok);

        let (mut x, mut xhat, mut v) = ([1.0], [0.0], [0.0]);
        for k in 0..200 {
            let u = [(k as f64 * 0.3).sin()];
            let y = [c[0] * x[0]];
            let (xh, vv) = (xhat, v);
            let status =
                piobs_observer_step(obs, xh.as_ptr(), vv.as_ptr(), y.as_ptr(), u.as_ptr(), xhat.as_mut_ptr(), v.as_mut_ptr());
            assert_eq!(status, PiobsStatus::Ok);
            x = [a[0] * x[0] + b[0] * u[0]];
        }
        assert!((x[0] - xhat[0]).abs() < 1e-9);
        piobs_observer_free(obs);
        piobs_system_free(sys);
    }
}

#[test]
fn infeasible_design_reports_witness() {
    unsafe {
        let sys = system(2, 1, 1, &[2.0, 0.0, 0.0, 0.5], &[1.0, 1.0], &[0.0, 1.0]);
        let mut detectable = true;
        assert_eq!(piobs_is_detectable(sys, &mut detectable), PiobsStatus::Ok);
        assert!(!detectable);

        let mut obs = ptr::null_mut();
        assert_eq!(piobs_design(sys, ptr::null(), &mut obs), PiobsStatus::Infeasible);
        assert!(obs.is_null());
        assert!(!last_error().is_empty());

        let mut count = 0;
        assert_eq!(piobs_last_witness(ptr::null_mut(), ptr::null_mut(), 0, &mut count), PiobsStatus::Ok);
        assert_eq!(count, 1);
        let (mut re, mut im) = ([0.0], [0.0]);
        assert_eq!(piobs_last_witness(re.as_mut_ptr(), im.as_mut_ptr(), 1, &mut count), PiobsStatus::Ok);
        assert!((re[0] - 2.0).abs() < 1e-9 && im[0].abs() < 1e-9);
        piobs_system_free(sys);
    }
}

#[test]
fn observability_and_dims() {
    unsafe {
        let sys = system(2, 1, 1, &[0.5, 0.0, 0.0, 2.0], &[1.0, 0.0], &[0.0, 1.0]);
        let (mut n, mut m, mut p) = (0, 0, 0);
        assert_eq!(piobs_system_dims(sys, &mut n, &mut m, &mut p), PiobsStatus::Ok);
        assert_eq!((n, m, p), (2, 1, 1));
        let mut observable = true;
        assert_eq!(piobs_is_observable(sys, &mut observable), PiobsStatus::Ok);
        assert!(!observable);
        let mut detectable = false;
        assert_eq!(piobs_is_detectable(sys, &mut detectable), PiobsStatus::Ok);
        assert!(detectable);
        piobs_system_free(sys);
    }
}

#[test]
fn rank_deficient_output_is_invalid_input() {
    unsafe {
        let (a, b, c) = ([0.5, 0.0, 0.0, 2.0], [1.0, 0.0], [0.0, 1.0, 0.0, 0.0]);
        let mut sys = ptr::null_mut();
        let status = piobs_system_new(2, 1, 2, a.as_ptr(), b.as_ptr(), c.as_ptr(), &mut sys);
        assert_eq!(status, PiobsStatus::InvalidInput);
        assert!(sys.is_null());
        assert!(last_error().contains("rank"), "{}", last_error());
    }
}

#[test]
fn null_and_short_buffers_are_rejected() {
    unsafe {
        let one = [1.0];
        let mut sys = ptr::null_mut();
        let status = piobs_system_new(1, 1, 1, ptr::null(), one.as_ptr(), one.as_ptr(), &mut sys);
        assert_eq!(status, PiobsStatus::NullPointer);

        let sys = system(2, 1, 1, &[0.9, 0.1, 0.0, 0.4], &[1.0, 0.0], &[1.0, 0.0]);
        let mut obs = ptr::null_mut();
        assert_eq!(piobs_design(sys, ptr::null(), &mut obs), PiobsStatus::Ok);
        let mut k = [0.0; 1];
        assert_eq!(piobs_observer_gain_k(obs, k.as_mut_ptr(), 1), PiobsStatus::BufferTooSmall);
        let mut k = [0.0; 2];
        assert_eq!(piobs_observer_gain_k(obs, k.as_mut_ptr(), 2), PiobsStatus::Ok);
        piobs_observer_free(obs);
        piobs_system_free(sys);
        piobs_system_free(ptr::null_mut());
    }
}

#[test]
fn version_is_nonempty() {
    let v = unsafe { CStr::from_ptr(piobs_version()) };
    assert!(!v.to_str().unwrap().is_empty());
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/piobs.h")).unwrap();
    for name in [
        "piobs_system_new",
        "piobs_system_free",
        "piobs_design",
        "piobs_observer_step",
        "piobs_last_error_message",
        "PIOBS_STATUS_INFEASIBLE = 2",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
