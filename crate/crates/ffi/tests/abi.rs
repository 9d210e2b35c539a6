use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use fratio_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    fratio_string_free(s);
    out
}

#[test]
fn list_round_trip() {
    unsafe {
        let mut l = ptr::null_mut();
        assert_eq!(
            fratio_list_parse(c("[9,1,-3]").as_ptr(), &mut l),
            FratioStatus::Ok
        );
        assert_eq!(fratio_list_len(l), 3);
        let mut buf = [0i64; 2];
        let mut len = 0usize;
        assert_eq!(
            fratio_list_entries(l, buf.as_mut_ptr(), 2, &mut len),
            FratioStatus::Ok
        );
        assert_eq!((buf, len), ([1, 9], 3));
        let mut n = ptr::null_mut();
        assert_eq!(fratio_list_norm(l, &mut n), FratioStatus::Ok);
        assert_eq!(take(n), "17/108");
        fratio_list_free(l);
    }
}

#[test]
fn check_reports_height_and_json() {
    unsafe {
        let mut l = ptr::null_mut();
        fratio_list_parse(c("30,1,-15,-10,-6").as_ptr(), &mut l);
        let (mut integral, mut height, mut js) = (0, 0, ptr::null_mut());
        assert_eq!(
            fratio_list_check(l, &mut integral, &mut height, &mut js),
            FratioStatus::Ok
        );
        assert_eq!((integral, height), (1, 1));
        let v: serde_json::Value = serde_json::from_str(&take(js)).unwrap();
        assert_eq!(v["status"], "integral");
        fratio_list_free(l);
    }
}

#[test]
fn certify_and_errors() {
    unsafe {
        let mut l = ptr::null_mut();
        fratio_list_parse(c("33,-11,3,-1,-12,-12").as_ptr(), &mut l);
        let mut yes = 0;
        assert_eq!(
            fratio_list_certify(l, 11, &mut yes, ptr::null_mut()),
            FratioStatus::Ok
        );
        assert_eq!(yes, 1);
        assert_eq!(
            fratio_list_certify(l, 9, &mut yes, ptr::null_mut()),
            FratioStatus::InvalidInput
        );
        let msg = CStr::from_ptr(fratio_last_error()).to_str().unwrap();
        assert!(msg.contains('9'), "{msg}");
        fratio_list_free(l);

        assert_eq!(
            fratio_list_parse(c("1,-1").as_ptr(), &mut l),
            FratioStatus::InvalidInput
        );
        assert_eq!(
            fratio_list_parse(c("1,,x").as_ptr(), &mut l),
            FratioStatus::Parse
        );
        assert_eq!(
            fratio_list_check(ptr::null(), &mut yes, ptr::null_mut(), ptr::null_mut()),
            FratioStatus::NullPointer
        );
        let bad = [0xffu8, 0];
        assert_eq!(
            fratio_list_parse(bad.as_ptr() as *const c_char, &mut l),
            FratioStatus::InvalidUtf8
        );
    }
}

#[test]
fn family_and_catalog() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(
            fratio_family_parse(c("6a,b,-2a,-3a,-6b,-(a-5b)").as_ptr(), &mut f),
            FratioStatus::Ok
        );
        assert_eq!(fratio_family_dim(f), 2);
        let mut passed = 0;
        assert_eq!(
            fratio_family_verify_exact(f, &mut passed, ptr::null_mut()),
            FratioStatus::Ok
        );
        assert_eq!(passed, 1);
        fratio_family_free(f);

        let mut js = ptr::null_mut();
        assert_eq!(
            fratio_catalog_verify(c("sporadic").as_ptr(), &mut passed, &mut js),
            FratioStatus::Ok
        );
        assert_eq!(passed, 1);
        let v: serde_json::Value = serde_json::from_str(&take(js)).unwrap();
        assert_eq!(v["failed"], 0);
        assert_eq!(
            fratio_catalog_verify(c("nope").as_ptr(), &mut passed, ptr::null_mut()),
            FratioStatus::InvalidInput
        );
    }
}

#[test]
fn header_declares_every_export() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/fratio.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let mut n = 0;
    for line in src.lines() {
        let Some(rest) = line.split("extern \"C\" fn ").nth(1) else {
            continue;
        };
        let name = rest.split('(').next().unwrap();
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
        n += 1;
    }
    assert!(n >= 12, "{n}");
    assert!(header.contains("typedef struct FratioList FratioList;"));
}

/// Compiles and runs a C program against the static library and header.
#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; C smoke test not run");
        return;
    };
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // test binary lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libfratio_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let out = std::env::temp_dir().join(format!("fratio_smoke_{}", std::process::id()));
    let status = Command::new(cc)
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| {
            Command::new(c)
                .arg("--version")
                .output()
                .is_ok_and(|o| o.status.success())
        })
        .ok_or(())
}
