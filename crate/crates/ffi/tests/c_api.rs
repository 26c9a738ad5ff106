use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use schmidt_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let owned = CStr::from_ptr(s).to_str().unwrap().to_owned();
    schmidt_string_free(s);
    owned
}

fn last_error() -> String {
    let p = schmidt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_functions() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(schmidt_binomial(5, 2, &mut s), SchmidtStatus::Ok);
        assert_eq!(take(s), "10");
        assert_eq!(schmidt_binomial(3, 5, &mut s), SchmidtStatus::Ok);
        assert_eq!(take(s), "0");
        assert_eq!(
            schmidt_binomial(-1, 0, &mut s),
            SchmidtStatus::InvalidArgument
        );
        assert!(last_error().contains("non-negative"));

        assert_eq!(schmidt_number(2, 3, &mut s), SchmidtStatus::Ok);
        assert_eq!(take(s), "1445");
        assert_eq!(schmidt_franel(3, &mut s), SchmidtStatus::Ok);
        assert_eq!(take(s), "56");
        assert_eq!(schmidt_strehl(2, &mut s), SchmidtStatus::Ok);
        assert_eq!(take(s), "68");

        let x = CString::new("2").unwrap();
        assert_eq!(
            schmidt_poly_eval(2, 1, x.as_ptr(), &mut s),
            SchmidtStatus::Ok
        );
        assert_eq!(take(s), "9");
        let bad = CString::new("1/0").unwrap();
        assert_eq!(
            schmidt_poly_eval(2, 1, bad.as_ptr(), &mut s),
            SchmidtStatus::InvalidArgument
        );
        assert_eq!(
            schmidt_poly_eval(2, 1, ptr::null(), &mut s),
            SchmidtStatus::NullPointer
        );
        assert_eq!(schmidt_number(0, 3, &mut s), SchmidtStatus::InvalidArgument);
        assert_eq!(
            schmidt_number(2, 3, ptr::null_mut()),
            SchmidtStatus::NullPointer
        );
    }
}

#[test]
fn table_and_row_handles() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(schmidt_table_new(2, 3, &mut t), SchmidtStatus::Ok);
        let (mut r, mut k_max) = (0u32, 0u64);
        assert_eq!(schmidt_table_info(t, &mut r, &mut k_max), SchmidtStatus::Ok);
        assert_eq!((r, k_max), (2, 3));

        let mut next = ptr::null_mut();
        assert_eq!(schmidt_table_step(t, &mut next), SchmidtStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(schmidt_table_entry(next, 1, 2, &mut s), SchmidtStatus::Ok);
        assert_eq!(take(s), "32");
        assert_eq!(schmidt_table_entry(next, 1, 9, &mut s), SchmidtStatus::Ok);
        assert_eq!(take(s), "0");
        assert_eq!(
            schmidt_table_entry(next, 4, 4, &mut s),
            SchmidtStatus::OutOfRange
        );

        let mut row = ptr::null_mut();
        assert_eq!(schmidt_row_from_table(t, &mut row), SchmidtStatus::Ok);
        let mut len = 0u64;
        assert_eq!(schmidt_row_len(row, &mut len), SchmidtStatus::Ok);
        assert_eq!(len, 4);
        let values: Vec<String> = (0..len)
            .map(|k| {
                assert_eq!(schmidt_row_value(row, k, &mut s), SchmidtStatus::Ok);
                take(s)
            })
            .collect();
        assert_eq!(values, ["1", "2", "10", "56"]);
        assert_eq!(schmidt_row_value(row, 4, &mut s), SchmidtStatus::OutOfRange);

        let mut ok = false;
        assert_eq!(schmidt_row_check(row, 3, &mut ok), SchmidtStatus::Ok);
        assert!(ok);
        assert_eq!(
            schmidt_row_check(row, 4, &mut ok),
            SchmidtStatus::OutOfRange
        );

        let mut implicit = ptr::null_mut();
        assert_eq!(schmidt_row_implicit(2, 3, &mut implicit), SchmidtStatus::Ok);
        assert_eq!(schmidt_row_value(implicit, 3, &mut s), SchmidtStatus::Ok);
        assert_eq!(take(s), "56");

        let mut degree = 0u64;
        assert_eq!(
            schmidt_verify_lemma(t, 3, &mut ok, &mut degree),
            SchmidtStatus::Ok
        );
        assert!(ok);
        assert_eq!(degree, 12);
        assert_eq!(
            schmidt_verify_lemma(t, 4, &mut ok, ptr::null_mut()),
            SchmidtStatus::OutOfRange
        );
        assert_eq!(
            schmidt_table_info(ptr::null(), &mut r, &mut k_max),
            SchmidtStatus::NullPointer
        );

        schmidt_row_free(implicit);
        schmidt_row_free(row);
        schmidt_table_free(next);
        schmidt_table_free(t);
        schmidt_table_free(ptr::null_mut());
        schmidt_row_free(ptr::null_mut());
        schmidt_string_free(ptr::null_mut());
    }
}

#[test]
fn checks_and_guessing() {
    unsafe {
        let (mut ok, mut degree) = (false, 0u64);
        assert_eq!(
            schmidt_verify_kernel(1, 1, &mut ok, &mut degree),
            SchmidtStatus::Ok
        );
        assert!(ok);
        assert_eq!(degree, 4);
        assert_eq!(schmidt_sweep_integrality(6, 12, &mut ok), SchmidtStatus::Ok);
        assert!(ok);

        let mut s = ptr::null_mut();
        assert_eq!(schmidt_fit_kernel(4, 6, 14, &mut s), SchmidtStatus::Ok);
        let text = take(s);
        assert!(text.lines().any(|l| l == "C(k+i,i)*C(k,j-i)*C(j,k)"));

        assert_eq!(schmidt_fit_kernel(2, 6, 2, &mut s), SchmidtStatus::Singular);
        assert!(last_error().contains("needs r_max"));
    }
}

#[test]
fn success_clears_last_error() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(schmidt_number(0, 1, &mut s), SchmidtStatus::InvalidArgument);
        assert!(!schmidt_last_error().is_null());
        assert_eq!(schmidt_number(1, 1, &mut s), SchmidtStatus::Ok);
        take(s);
        assert!(schmidt_last_error().is_null());
        let v = CStr::from_ptr(schmidt_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/schmidt.h")).unwrap();
    let source = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20);
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    assert!(header.contains("typedef struct SchmidtTable SchmidtTable;"));
}

fn find_staticlib() -> Option<PathBuf> {
    // target/<profile>/deps/<test-binary>
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libschmidt_ffi.a");
    lib.exists().then_some(lib)
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn c_program_links_and_runs() {
    if !have_cc() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let Some(lib) = find_staticlib() else {
        eprintln!("skipping: static library not built");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let include: &Path = &crate_dir().join("include");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(include)
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C build failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
