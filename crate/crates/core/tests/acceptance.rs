//! Runs the full acceptance suite; one pass/fail line per criterion.

#[test]
fn acceptance() {
    let results = icehankel::verify::run_all();
    let mut all_ok = true;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} criterion {:>2} ({}): {}", r.id, r.name, r.detail);
        all_ok &= r.passed;
    }
    assert!(all_ok, "acceptance criteria failed");
}
