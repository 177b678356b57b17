//! Acceptance gate, CLI half: criterion 8. Re-running any subcommand with
//! the same config and seed must reproduce every output byte, and the
//! worker count must not be able to change a single one of them.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_orbiforest")
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let e = entry.unwrap();
        out.insert(
            e.file_name().into_string().unwrap(),
            fs::read(e.path()).unwrap(),
        );
    }
    out
}

fn run(config: &Path, args: &[&str], out: &Path) -> BTreeMap<String, Vec<u8>> {
    let output = Command::new(bin())
        .arg(args[0])
        .arg("--config")
        .arg(config)
        .args(&args[1..])
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&output.stderr)
    );
    snapshot(out)
}

#[test]
fn criterion_8_determinism() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let f2 = dir.path().join("f2.json");
    fs::write(
        &f2,
        r#"{"group":{"kind":"free","rank":2},"generators":["a","b"],"radius":4,"p":0.45,"trials":20,"seed":81}"#,
    )
    .unwrap();
    let pz = dir.path().join("pz.json");
    fs::write(
        &pz,
        r#"{"group":{"kind":"product_with_z","inner":{"kind":"free","rank":2}},"generators":["a","b","z"],"radius":4,"epsilon":0.05,"trials":8,"seed":82}"#,
    )
    .unwrap();

    let cases: [(&Path, Vec<&str>); 11] = [
        (&f2, vec!["ball"]),
        (&f2, vec!["percolate"]),
        (
            &f2,
            vec!["phase-scan", "--radii=[4,5]", "--p_grid=[0.2,0.35,0.5]", "--radius=null"],
        ),
        (&f2, vec!["wilson"]),
        (&f2, vec!["wilson", "--builder=stacks"]),
        (&f2, vec!["msf"]),
        (&pz, vec!["pipeline"]),
        (&pz, vec!["blocks"]),
        (&pz, vec!["ends"]),
        (&pz, vec!["cost", "--trials=5"]),
        (
            &f2,
            vec!["indist", "--radius=7", "--p=0.5", "--trials=35", "--resample=30"],
        ),
    ];

    let mut checked = 0;
    for (i, (config, args)) in cases.iter().enumerate() {
        let mut snaps = Vec::new();
        for (j, workers) in [None, None, Some("--workers=1"), Some("--workers=3")]
            .iter()
            .enumerate()
        {
            let out = dir.path().join(format!("case{i}-run{j}"));
            let mut full = args.clone();
            if let Some(w) = workers {
                full.push(w);
            }
            snaps.push(run(config, &full, &out));
        }
        let base = &snaps[0];
        assert!(!base.is_empty(), "{args:?} wrote nothing");
        for (j, other) in snaps.iter().enumerate().skip(1) {
            assert_eq!(
                base.keys().collect::<Vec<_>>(),
                other.keys().collect::<Vec<_>>(),
                "{args:?}: file sets differ between run 0 and run {j}"
            );
            for (name, bytes) in base {
                assert_eq!(
                    bytes, &other[name],
                    "{args:?}: {name} differs between run 0 and run {j}"
                );
            }
        }
        checked += 1;
    }

    // selftest has no output directory; its report must still reproduce.
    let a = Command::new(bin()).arg("selftest").output().unwrap();
    let b = Command::new(bin()).arg("selftest").output().unwrap();
    assert!(a.status.success() && b.status.success(), "selftest failed");
    assert_eq!(a.stdout, b.stdout, "selftest output differs between runs");

    let elapsed = t0.elapsed().as_secs_f64();
    println!(
        "criterion 8 (determinism): PASS — {checked} subcommand invocations byte-identical \
         across reruns and worker counts 1 vs 3, plus selftest, {elapsed:.1}s"
    );
}
