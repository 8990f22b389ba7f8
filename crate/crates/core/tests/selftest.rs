use specblock::selftest::{run_selftest, SelftestConfig, DEFAULT_SEED};
use specblock::{Outcome, Tally};

#[test]
fn default_seed_passes() {
    let checks = run_selftest(&SelftestConfig::new(DEFAULT_SEED)).unwrap();
    let failed: Vec<_> = checks.iter().filter(|c| c.outcome == Outcome::Fail).map(|c| &c.name).collect();
    assert!(failed.is_empty(), "{failed:?}");
}

#[test]
fn same_seed_same_report() {
    let a = run_selftest(&SelftestConfig::new(42)).unwrap();
    let b = run_selftest(&SelftestConfig::new(42)).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn corrupted_fixture_is_caught() {
    let mut cfg = SelftestConfig::new(7);
    cfg.corrupt_fixture = true;
    let checks = run_selftest(&cfg).unwrap();
    let t = Tally::of(&checks);
    assert!(t.fail >= 1);
    assert!(checks.iter().filter(|c| c.name.starts_with("M3")).all(|c| c.outcome == Outcome::Fail));
}
