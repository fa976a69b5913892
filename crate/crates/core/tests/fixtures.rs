use std::path::Path;

use credal_cfr::cfr::fixtures;
use credal_cfr::cfr::{evaluate_scenario, read_records};
use credal_cfr::credal::CredalNetwork;

#[test]
fn generated_files_are_current() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    for (rel, body) in fixtures::generated_files() {
        let on_disk = std::fs::read_to_string(root.join(rel))
            .unwrap_or_else(|e| panic!("{rel}: {e}; run `cargo run --example write_fixtures`"));
        assert_eq!(
            on_disk, body,
            "{rel} is stale; run `cargo run --example write_fixtures`"
        );
    }
}

#[test]
fn shipped_networks_reproduce_scenario_bounds() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(root.join("data/networks/line1_idm.json")).unwrap();
    let net = CredalNetwork::from_json(&text).unwrap();
    let iv = evaluate_scenario(&net, &fixtures::scenario("line1_storm").unwrap()).unwrap();
    assert!((iv.lower() - 1.7702e-2).abs() < 1e-6);
    assert!((iv.upper() - 2.3828e-2).abs() < 1e-6);
}

#[test]
fn shipped_history_has_forty_failures() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let recs =
        read_records(std::fs::File::open(root.join("data/records/failure_history.csv")).unwrap())
            .unwrap();
    assert_eq!(recs.len(), 40);
    assert!(recs.iter().all(|r| r.failed));
}
