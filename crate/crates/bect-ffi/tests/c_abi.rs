//! Compile and run a small C client against the generated header and the
//! static library, exercising the ABI end to end.

use std::path::PathBuf;
use std::process::Command;

const C_CLIENT: &str = r#"
#include <math.h>
#include <stdio.h>
#include "bect.h"

int main(void) {
    BectKernel *kernel = NULL;
    if (bect_kernel_plane_wave_new(1, 0, 0, &kernel) != BECT_STATUS_OK) return 1;

    double q[3] = {2.0, 0.0, 0.0};
    double mean = 0.0;
    if (bect_exact_mean_r(kernel, 4, 3, q, &mean) != BECT_STATUS_OK) return 2;
    if (fabs(mean - 22.0 / 3.0) > 1e-12) return 3;

    double var = 0.0;
    if (bect_exact_quantum_cov_avg(kernel, 2, 1, q, q, &var) != BECT_STATUS_OK) return 4;
    if (var != 1.0) return 5;

    double bad = 0.0;
    if (bect_exact_mean_r(kernel, 5, 3, q, &bad) != BECT_STATUS_INVALID_ARGUMENT) return 6;

    double sums[7];
    if (bect_sums(4, 3, 0, sums, 7) != BECT_STATUS_OK) return 7;
    if (fabs(sums[1] - 10.0 / 3.0) > 1e-12) return 8;

    BectSampler *sampler = NULL;
    if (bect_sampler_new(100, 11, 42, &sampler) != BECT_STATUS_OK) return 9;
    double state[22];
    if (bect_sampler_state(sampler, 0, state, 22) != BECT_STATUS_OK) return 10;
    double norm2 = 0.0;
    for (int i = 0; i < 11; ++i) norm2 += state[2*i]*state[2*i] + state[2*i+1]*state[2*i+1];
    if (fabs(norm2 - 1.0) > 1e-12) return 11;

    bect_sampler_free(sampler);
    bect_kernel_free(kernel);
    printf("ok\n");
    return 0;
}
"#;

fn workspace_target() -> PathBuf {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile = if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    };
    manifest.join("../../target").join(profile)
}

#[test]
fn c_client_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler available, skipping");
        return;
    }
    let staticlib = workspace_target().join("libbect_ffi.a");
    assert!(
        staticlib.exists(),
        "static library missing at {}",
        staticlib.display()
    );
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().expect("tempdir");
    let src = dir.path().join("client.c");
    std::fs::write(&src, C_CLIENT).expect("write client.c");
    let exe = dir.path().join("client");

    let compile = Command::new(&cc)
        .arg(&src)
        .arg(&staticlib)
        .arg("-I")
        .arg(&include)
        .arg("-lm")
        .arg("-lpthread")
        .arg("-ldl")
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("compiler invocation");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe).output().expect("client run");
    assert!(
        run.status.success(),
        "client exited with {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
