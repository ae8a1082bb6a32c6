use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "entrocat.h"

int main(int argc, char **argv) {
    EcDataset *d = NULL;
    if (ec_dataset_load_path(argv[1], ',', EC_NA_POLICY_KEEP, &d) != EC_STATUS_OK) {
        fprintf(stderr, "%s\n", ec_last_error_message());
        return 2;
    }
    double su = 0.0;
    if (ec_symmetric_uncertainty(d, "Creativity", "GotHired", &su) != EC_STATUS_OK) return 3;
    if (fabs(su - 0.46268937755384703) > 1e-12) return 4;
    if (ec_symmetric_uncertainty(d, "Nope", "GotHired", &su) != EC_STATUS_UNKNOWN_COLUMN) return 5;
    EcMatrix *m = NULL;
    size_t n = 0;
    if (ec_distance_matrix(d, &m) != EC_STATUS_OK || ec_matrix_size(m, &n) != EC_STATUS_OK) return 6;
    if (n != 6) return 7;
    char *json = NULL;
    if (ec_matrix_to_json(m, &json) != EC_STATUS_OK) return 8;
    ec_string_free(json);
    ec_matrix_free(m);
    ec_dataset_free(d);
    printf("%.4f\n", su);
    return 0;
}
"#;

/// Directory holding the built libraries (`target/<profile>`).
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = lib_dir();
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    if !lib.join("libentrocat_ffi.so").exists() {
        eprintln!("shared library not built at {}; skipping", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("consumer.c");
    let exe = dir.join("consumer");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg("-L")
        .arg(&lib)
        .arg("-lentrocat_ffi")
        .arg(format!("-Wl,-rpath,{}", lib.display()))
        .arg("-lm")
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe)
        .arg(manifest.join("../core/fixtures/internship.csv"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), "0.4627\n");
    let _ = std::fs::remove_dir_all(dir);
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("entrocat-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
