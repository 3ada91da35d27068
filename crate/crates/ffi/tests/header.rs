use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn exported_functions() -> Vec<String> {
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    src.lines()
        .filter_map(|l| l.trim().strip_prefix("pub unsafe extern \"C\" fn ").or(l.trim().strip_prefix("pub extern \"C\" fn ")))
        .map(|rest| rest.split('(').next().unwrap().to_string())
        .collect()
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/autonomy.h")).unwrap();
    let names = exported_functions();
    assert!(names.len() >= 20, "{names:?}");
    for name in names {
        assert!(name.starts_with("autonomy_"), "{name}");
        assert!(header.contains(&format!(" {name}(")) || header.contains(&format!("*{name}(")), "{name} missing from header");
    }
    for ty in ["AutonomyEquilibrium", "AutonomyCase", "AutonomyConstitution", "AutonomyTrace"] {
        assert!(header.contains(&format!("typedef struct {ty} {ty};")), "{ty} is not opaque");
    }
}

fn compiler() -> Option<&'static str> {
    ["cc", "clang", "gcc"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
}

/// Builds the static library into a private target directory; the copy
/// under the shared target directory is not refreshed by `cargo test`.
fn fresh_static_lib() -> PathBuf {
    let manifest = crate_dir().join("Cargo.toml");
    let target = Path::new(env!("CARGO_TARGET_TMPDIR")).join("c-smoke");
    let status = Command::new(env!("CARGO"))
        .args(["build", "--offline", "--quiet", "--lib", "--manifest-path"])
        .arg(&manifest)
        .arg("--target-dir")
        .arg(&target)
        .status()
        .expect("cargo runs");
    assert!(status.success(), "building the static library failed");
    target.join("debug/libautonomy_ffi.a")
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "autonomy.h"

int main(void) {
    AutonomyEquilibrium *eq = NULL;
    if (autonomy_equilibrium_new("442000000", "0.18", "0.25", &eq) != AUTONOMY_STATUS_OK) return 1;
    char *income = NULL;
    if (autonomy_equilibrium_income(eq, 2, false, &income) != AUTONOMY_STATUS_OK) return 2;
    printf("%s\n", income);
    autonomy_string_free(income);
    autonomy_equilibrium_free(eq);

    AutonomyEquilibrium *bad = NULL;
    if (autonomy_equilibrium_new("1", "2", "0", &bad) != AUTONOMY_STATUS_DOMAIN_ERROR) return 3;
    char *msg = autonomy_last_error();
    if (msg == NULL || strstr(msg, "tax_rate") == NULL) return 4;
    autonomy_string_free(msg);

    AutonomyConstitution *c = NULL;
    AutonomyTrace *t = NULL;
    if (autonomy_constitution_default(&c) != AUTONOMY_STATUS_OK) return 5;
    if (autonomy_court_simulate(c, 1, 30, &t) != AUTONOMY_STATUS_OK) return 6;
    printf("%zu\n", autonomy_trace_len(t));
    autonomy_trace_free(t);
    autonomy_constitution_free(c);
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = crate_dir().join("include");
    let syntax = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));

    if !cfg!(target_os = "linux") {
        eprintln!("link flags are Linux-specific; skipping link");
        return;
    }
    let lib = fresh_static_lib();
    let exe = dir.path().join("smoke");
    let build = Command::new(cc)
        .args(["-std=c99", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8(run.stdout).unwrap(), "2455555555.56\n30\n");
}
