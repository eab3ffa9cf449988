use std::process::Command;
use std::time::{Duration, Instant};

use fockdeform_cli::{run_suite, CheckRecord, Relation, SuiteConfig, SuiteReport, DETECTION_THRESHOLD};

struct Verdict {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn run(suites: &[&str]) -> (SuiteReport, Duration) {
    let config = SuiteConfig { suites: suites.iter().map(|s| s.to_string()).collect(), ..SuiteConfig::default() };
    let start = Instant::now();
    let report = run_suite(&config).expect("default config runs");
    (report, start.elapsed())
}

fn select<'a>(report: &'a SuiteReport, suite: &str, prefixes: &[&str]) -> Vec<&'a CheckRecord> {
    report
        .records
        .iter()
        .filter(|r| r.suite == suite && prefixes.iter().any(|p| r.check.starts_with(p)))
        .collect()
}

fn worst(records: &[&CheckRecord]) -> f64 {
    records.iter().map(|r| r.max_deviation.unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
}

/// Every record passes against a tolerance no looser than `tol`.
fn identities_hold(records: &[&CheckRecord], tol: f64) -> bool {
    !records.is_empty()
        && records.iter().all(|r| r.pass && r.relation == Relation::AtMost && r.tolerance <= tol)
}

fn probes_detect(records: &[&CheckRecord]) -> bool {
    !records.is_empty()
        && records.iter().all(|r| {
            r.pass && r.relation == Relation::Exceeds && r.max_deviation.is_some_and(|d| d > DETECTION_THRESHOLD)
        })
}

fn count_roots(records: &[&CheckRecord], marker: &str) -> usize {
    records.iter().filter(|r| r.check.contains(marker)).count()
}

fn main() {
    let mut verdicts = Vec::new();

    let (report, elapsed) = run(&["inner-functions"]);
    let recs = select(&report, "inner-functions", &["axioms", "root-square", "root-reflection"]);
    verdicts.push(Verdict {
        id: 1,
        title: "inner-function axioms and root laws",
        pass: identities_hold(&recs, 1e-10) && count_roots(&recs, "random") >= 15 && elapsed < Duration::from_secs(1),
        detail: format!("max dev {:.2e}, {} records, {:.3}s", worst(&recs), recs.len(), elapsed.as_secs_f64()),
    });

    let (report, elapsed) = run(&["fock-core"]);
    let adjoint = select(&report, "fock-core", &["adjoint"]);
    let ccr = select(&report, "fock-core", &["ccr"]);
    verdicts.push(Verdict {
        id: 2,
        title: "CCR and adjointness at M = 4, N = 3",
        pass: identities_hold(&adjoint, 1e-12) && identities_hold(&ccr, 1e-10) && elapsed < Duration::from_secs(1),
        detail: format!(
            "adjoint {:.2e}, ccr {:.2e}, {:.3}s",
            worst(&adjoint),
            worst(&ccr),
            elapsed.as_secs_f64()
        ),
    });

    let (report, _) = run(&[
        "kernels",
        "chiral-isomorphism",
        "shat-lemma",
        "main-relation",
        "field-equivalence",
        "root-independence",
        "sharp-momentum",
        "modular",
        "twist-algebra",
    ]);

    let recs = select(&report, "kernels", &["reciprocity", "boost-invariance"]);
    let both_masses = recs.iter().any(|r| r.check.contains("m=0")) && recs.iter().any(|r| r.check.contains("m>0"));
    verdicts.push(Verdict {
        id: 3,
        title: "kernel reciprocity and boost invariance",
        pass: identities_hold(&recs, 1e-10) && both_masses,
        detail: format!("max dev {:.2e}", worst(&recs)),
    });

    let recs = select(&report, "chiral-isomorphism", &["v-"]);
    verdicts.push(Verdict {
        id: 4,
        title: "chiral isomorphism V",
        pass: identities_hold(&recs, 1e-10) && recs.len() >= 4,
        detail: format!("max dev {:.2e}", worst(&recs)),
    });

    let recs = select(&report, "shat-lemma", &["shat["]);
    verdicts.push(Verdict {
        id: 5,
        title: "Shat = V S V^-1",
        pass: identities_hold(&recs, 1e-10) && count_roots(&recs, "random") == 5,
        detail: format!("max dev {:.2e}", worst(&recs)),
    });

    let recs = select(&report, "main-relation", &["plus[", "minus["]);
    let trivial: Vec<_> = recs.iter().copied().filter(|r| r.check.contains("trivial-root")).collect();
    let exact = trivial.len() == 2 && trivial.iter().all(|r| r.pass && r.max_deviation == Some(0.0));
    verdicts.push(Verdict {
        id: 6,
        title: "main relation, both signs",
        pass: identities_hold(&recs, 1e-10) && count_roots(&recs, "random") == 10 && exact,
        detail: format!("max dev {:.2e}, trivial root exact: {exact}", worst(&recs)),
    });

    let recs = select(&report, "field-equivalence", &["plus[", "minus["]);
    verdicts.push(Verdict {
        id: 7,
        title: "twisted chiral field equals deformed field",
        pass: identities_hold(&recs, 1e-10) && count_roots(&recs, "random") == 10,
        detail: format!("max dev {:.2e}", worst(&recs)),
    });

    let same = select(&report, "root-independence", &["ratio[", "annihilator[", "field["]);
    let probes = select(&report, "root-independence", &["mismatch-"]);
    verdicts.push(Verdict {
        id: 8,
        title: "root independence via Y_r",
        pass: identities_hold(&same, 1e-10) && probes_detect(&probes),
        detail: format!(
            "equal-square dev {:.2e}, smallest mismatch {:.2e}",
            worst(&same),
            probes.iter().filter_map(|r| r.max_deviation).fold(f64::INFINITY, f64::min)
        ),
    });

    let massive = |r: &&CheckRecord| r.check.contains("m>0");
    let conj: Vec<_> = select(&report, "sharp-momentum", &["conjugation["]).into_iter().filter(massive).collect();
    let agree: Vec<_> = select(&report, "sharp-momentum", &["variants-agree["]).into_iter().filter(massive).collect();
    let differ = select(&report, "sharp-momentum", &["variants-differ"]);
    let variants = conj.iter().any(|r| r.check.contains("pairwise-sum")) && conj.iter().any(|r| r.check.contains("sign-split"));
    verdicts.push(Verdict {
        id: 9,
        title: "sharp-momentum twists at m = 1",
        pass: identities_hold(&conj, 1e-10) && identities_hold(&agree, 1e-10) && probes_detect(&differ) && variants,
        detail: format!("conjugation dev {:.2e}, variant gap {:.2e}", worst(&conj), worst(&differ)),
    });

    let flip = select(&report, "modular", &["j-flip["]);
    let square = select(&report, "twist-algebra", &["s-square["]);
    verdicts.push(Verdict {
        id: 10,
        title: "J flip and S_R^2 = S_{R^2}",
        pass: identities_hold(&flip, 1e-10)
            && identities_hold(&square, 1e-10)
            && count_roots(&flip, "random") == 5
            && count_roots(&square, "random") == 5,
        detail: format!("j-flip {:.2e}, square {:.2e}", worst(&flip), worst(&square)),
    });

    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_fockdeform"))
        .args(["verify", "--omit-runtime"])
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    verdicts.push(Verdict {
        id: 11,
        title: "default CLI run",
        pass: status.status.success() && elapsed < Duration::from_secs(30),
        detail: format!("exit {:?}, {:.2}s", status.status.code(), elapsed.as_secs_f64()),
    });

    for v in &verdicts {
        println!("{} criterion {:>2}: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.id, v.title, v.detail);
    }
    let failed: Vec<u32> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    println!("acceptance: {} of {} criteria passed", verdicts.len() - failed.len(), verdicts.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
