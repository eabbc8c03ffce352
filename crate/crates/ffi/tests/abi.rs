use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use paramgrid_ffi::*;

const TOY: &str = r#"{"problem": "knapsack", "K": 1, "lambda_min": ["0"],
  "items": [{"a": 3, "b": [1], "w": 2}, {"a": 2, "b": [4], "w": 2}], "capacity": 2}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Copies and frees a library-owned string.
unsafe fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    pg_string_free(p);
    s
}

fn last_error() -> Option<String> {
    let p = pg_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned())
}

unsafe fn toy() -> *mut PgInstance {
    let mut inst = ptr::null_mut();
    assert_eq!(pg_instance_parse(c(TOY).as_ptr(), &mut inst), PgStatus::Ok);
    inst
}

#[test]
fn approximate_and_query() {
    unsafe {
        let inst = toy();
        let mut k = 0;
        assert_eq!(pg_instance_k(inst, &mut k), PgStatus::Ok);
        assert_eq!(k, 1);

        let mut set = ptr::null_mut();
        assert_eq!(pg_approximate(inst, c("1/2").as_ptr(), 0, 0, 0, &mut set), PgStatus::Ok);
        assert!(last_error().is_none());

        let mut g = ptr::null_mut();
        assert_eq!(pg_set_guarantee(set, &mut g), PgStatus::Ok);
        assert_eq!(take(g), "3/2");
        let (mut count, mut size) = (0usize, 0u64);
        assert_eq!(pg_set_solution_count(set, &mut count), PgStatus::Ok);
        assert_eq!(pg_set_grid_size(set, &mut size), PgStatus::Ok);
        assert!(count >= 1 && count as u64 <= size);

        let lambda = [c("1")];
        let ptrs: Vec<*const c_char> = lambda.iter().map(|s| s.as_ptr()).collect();
        let (mut index, mut value) = (usize::MAX, ptr::null_mut());
        assert_eq!(pg_query(set, inst, ptrs.as_ptr(), 1, &mut index, &mut value), PgStatus::Ok);
        assert!(index < count);
        // optimum at λ = 1 is 6; the guarantee allows down to 4
        let v = take(value);
        let (n, d) = v.split_once('/').unwrap();
        assert!(n.parse::<i64>().unwrap() >= 4 * d.parse::<i64>().unwrap(), "{v}");

        let mut sol = ptr::null_mut();
        assert_eq!(pg_set_solution_json(set, index, &mut sol), PgStatus::Ok);
        assert!(take(sol).contains("\"F\""));
        assert_eq!(pg_set_solution_json(set, count, &mut sol), PgStatus::Failure);

        pg_set_free(set);
        pg_instance_free(inst);
    }
}

#[test]
fn json_round_trip_keeps_answers() {
    unsafe {
        let inst = toy();
        let mut set = ptr::null_mut();
        assert_eq!(pg_approximate(inst, c("0.25").as_ptr(), 2, 0, 1, &mut set), PgStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(pg_set_to_json(set, &mut json), PgStatus::Ok);
        let text = c(&take(json));
        let mut back = ptr::null_mut();
        assert_eq!(pg_set_from_json(text.as_ptr(), &mut back), PgStatus::Ok);

        for l in ["0", "1/3", "2", "40"] {
            let arg = c(l);
            let ptrs = [arg.as_ptr()];
            let (mut a, mut b) = (0, 0);
            let (mut va, mut vb) = (ptr::null_mut(), ptr::null_mut());
            assert_eq!(pg_query(set, inst, ptrs.as_ptr(), 1, &mut a, &mut va), PgStatus::Ok);
            assert_eq!(pg_query(back, inst, ptrs.as_ptr(), 1, &mut b, &mut vb), PgStatus::Ok);
            assert_eq!(a, b);
            assert_eq!(take(va), take(vb));
        }
        pg_set_free(back);
        pg_set_free(set);
        pg_instance_free(inst);
    }
}

#[test]
fn status_codes_and_messages() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(pg_instance_parse(c("{ nope").as_ptr(), &mut inst), PgStatus::Schema);
        assert!(last_error().is_some());
        assert_eq!(pg_instance_parse(ptr::null(), &mut inst), PgStatus::NullArgument);
        assert_eq!(last_error().unwrap(), "json is null");
        let bad: [u8; 4] = [0x7b, 0xff, 0x7d, 0];
        assert_eq!(pg_instance_parse(bad.as_ptr() as *const c_char, &mut inst), PgStatus::InvalidUtf8);

        let inst = toy();
        let mut set = ptr::null_mut();
        assert_eq!(pg_approximate(inst, c("3/2").as_ptr(), 1, 0, 0, &mut set), PgStatus::EpsilonOutOfRange);
        assert!(last_error().unwrap().contains("epsilon"));
        assert_eq!(pg_approximate(inst, c("1/2").as_ptr(), 1, 3, 0, &mut set), PgStatus::GridTooLarge);
        assert_eq!(pg_approximate(inst, c("1/2").as_ptr(), 1, 0, 0, &mut set), PgStatus::Ok);
        assert!(last_error().is_none());

        let below = [c("-1")];
        let ptrs = [below[0].as_ptr()];
        assert_eq!(pg_query(set, inst, ptrs.as_ptr(), 1, ptr::null_mut(), ptr::null_mut()), PgStatus::DomainViolation);
        assert_eq!(pg_query(set, inst, ptr::null(), 1, ptr::null_mut(), ptr::null_mut()), PgStatus::NullArgument);
        assert_eq!(pg_query(ptr::null(), inst, ptrs.as_ptr(), 1, ptr::null_mut(), ptr::null_mut()), PgStatus::NullArgument);

        pg_string_free(ptr::null_mut());
        pg_set_free(ptr::null_mut());
        pg_instance_free(ptr::null_mut());
        pg_set_free(set);
        pg_instance_free(inst);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/paramgrid.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["pg_instance_parse", "pg_approximate", "pg_query", "pg_last_error", "PG_STATUS_DOMAIN_VIOLATION"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"paramgrid.h\"\nint check(PgInstance *i) { size_t k; return pg_instance_k(i, &k) == PG_STATUS_OK ? (int)k : -1; }\n",
    )
    .unwrap();
    let status = match Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    {
        Ok(s) => s,
        Err(_) => {
            eprintln!("no C compiler; skipping the compile check");
            return;
        }
    };
    assert!(status.success());
}
