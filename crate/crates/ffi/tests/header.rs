//! The generated header is valid C and declares every exported symbol.

use std::path::{Path, PathBuf};
use std::process::Command;

const SYMBOLS: [&str; 18] = [
    "fbmre_version",
    "fbmre_last_error_message",
    "fbmre_mc_config_default",
    "fbmre_law_point",
    "fbmre_law_uniform",
    "fbmre_law_scaled_beta",
    "fbmre_law_discrete",
    "fbmre_law_from_json",
    "fbmre_law_free",
    "fbmre_law_ess_sup",
    "fbmre_plan_new",
    "fbmre_plan_free",
    "fbmre_plan_len",
    "fbmre_plan_eigenvalues",
    "fbmre_sample_path",
    "fbmre_estimate_persistence",
    "fbmre_estimate_small_barrier",
    "fbmre_fit_exponent",
];

fn include_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_all_symbols() {
    let text = std::fs::read_to_string(include_dir().join("fbmre.h")).unwrap();
    for s in SYMBOLS {
        assert!(text.contains(&format!("{s}(")), "missing {s}");
    }
    for s in [
        "typedef struct FbmrePlan FbmrePlan;",
        "typedef struct FbmreLaw FbmreLaw;",
        "#define FBMRE_PANIC 6",
    ] {
        assert!(text.contains(s), "missing {s}");
    }
}

/// Compiles and runs a C client against the shared library.
#[test]
fn c_client_round_trip() {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib_dir = deps.parent().unwrap().to_path_buf();
    assert!(
        lib_dir.join("libfbmre_ffi.so").exists(),
        "shared library not built in {}",
        lib_dir.display()
    );
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("client.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "fbmre.h"
int main(void) {
    FbmreLaw *law = NULL;
    if (fbmre_law_uniform(0.4, 0.8, &law) != FBMRE_OK) return 10;
    double h0 = 0.0;
    if (fbmre_law_ess_sup(law, &h0) != FBMRE_OK || h0 != 0.8) return 11;
    FbmreMcConfig cfg;
    fbmre_mc_config_default(&cfg);
    cfg.n_paths = 2000;
    cfg.seed = 3;
    cfg.grid_kind = FBMRE_GRID_FIXED;
    cfg.m_fixed = 16;
    double t[2] = {1.0, 8.0};
    FbmreEstimate est[2];
    if (fbmre_estimate_persistence(law, t, 2, &cfg, est) != FBMRE_OK) return 12;
    if (!(est[0].p_hat >= est[1].p_hat)) return 13;
    fbmre_law_free(law);
    if (fbmre_law_point(2.0, &law) != FBMRE_INVALID_ARGUMENT) return 14;
    printf("%s %.4f %.4f\n", fbmre_version(), est[0].p_hat, est[1].p_hat);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.path().join("client");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(&src)
        .arg("-I")
        .arg(include_dir())
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lfbmre_ffi")
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).env("LD_LIBRARY_PATH", &lib_dir).output().unwrap();
    assert!(out.status.success(), "client exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(env!("CARGO_PKG_VERSION")));
}
