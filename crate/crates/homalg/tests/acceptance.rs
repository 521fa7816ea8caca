//! The acceptance suite: every check runs at its pinned parameters and
//! budget, printing one verdict line per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the table.

use homalg::verify::{run_criterion, CRITERIA};

const SEED: u64 = 0xD1CE;

#[test]
fn acceptance_suite() {
    let mut all_ok = true;
    let mut lines = vec![];
    for (id, _) in CRITERIA {
        let report = run_criterion(id, SEED).expect("criterion must run to completion");
        let verdict = if report.ok() {
            "PASS"
        } else if report.passed {
            "FAIL (budget)"
        } else {
            "FAIL"
        };
        let budget = report
            .budget
            .map(|b| format!(", budget {:.0?}", b))
            .unwrap_or_default();
        let line = format!(
            "[{:>2}/14] {:<5} {:<32} {} case(s) in {:.2?}{}{}",
            report.id,
            verdict,
            report.name,
            report.cases,
            report.elapsed,
            budget,
            if report.detail.is_empty() {
                String::new()
            } else {
                format!(" — {}", report.detail)
            }
        );
        println!("{line}");
        all_ok &= report.ok();
        lines.push(line);
    }
    assert!(all_ok, "acceptance criteria failed:\n{}", lines.join("\n"));
}
