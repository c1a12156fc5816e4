//! Byte-exact outputs at the default config. Regenerate with
//! `HYKG_BLESS=1 cargo test -p hykg-cli --test golden`.

use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_hykg");
const FILES: [(&str, &str); 4] = [
    ("spectrum", "spectrum.csv"),
    ("spectrum", "spectrum.json"),
    ("audit", "audit.json"),
    ("audit", "audit.csv"),
];

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn run_into(dir: &Path) {
    let config = manifest().join("configs/default.toml");
    for cmd in ["spectrum", "audit"] {
        let status = Command::new(BIN)
            .args([cmd, "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
            .status()
            .expect("binary runs");
        assert!(status.success(), "{cmd} failed: {status}");
    }
}

fn golden(name: &str) -> PathBuf {
    manifest().join("tests/golden").join(name)
}

#[test]
fn default_outputs_are_stable_and_match_golden() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_into(a.path());
    run_into(b.path());
    let bless = std::env::var_os("HYKG_BLESS").is_some();
    for (cmd, name) in FILES {
        let first = std::fs::read(a.path().join(name)).unwrap();
        let second = std::fs::read(b.path().join(name)).unwrap();
        assert!(first == second, "{cmd}: {name} differs between runs");
        if bless {
            std::fs::write(golden(name), &first).unwrap();
            continue;
        }
        let want = std::fs::read(golden(name))
            .unwrap_or_else(|e| panic!("{name}: {e}; bless with HYKG_BLESS=1"));
        assert!(first == want, "{name} differs from tests/golden/{name}");
    }
}
