//! Imports the freshly built extension from Python and runs the smoke script.

use std::path::PathBuf;
use std::process::Command;

fn built_library() -> PathBuf {
    // Test binaries live in <target>/<profile>/deps; the cdylib one level up.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    ["libstoresim_py.so", "libstoresim_py.dylib"]
        .iter()
        .map(|n| profile_dir.join(n))
        .find(|p| p.exists())
        .expect("cdylib built alongside the tests")
}

#[test]
fn python_smoke_test() {
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../python/smoke_test.py");
    let out = Command::new("python3")
        .arg(&script)
        .env("STORESIM_PY_LIB", built_library())
        .output()
        .expect("python3 on PATH");
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"smoke_test\": \"ok\""));
}
