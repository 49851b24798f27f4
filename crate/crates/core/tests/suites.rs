use specdisc::suite::{suite_by_name, suites, SuiteConfig};

fn small() -> SuiteConfig {
    SuiteConfig {
        count: Some(5),
        mc_samples: 1000,
        ..SuiteConfig::default()
    }
}

fn run_all(threads: usize, cfg: &SuiteConfig) -> Vec<String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    pool.install(|| {
        suites()
            .iter()
            .map(|s| serde_json::to_string(&s.run(cfg).unwrap()).unwrap())
            .collect()
    })
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let cfg = small();
    let one = run_all(1, &cfg);
    let three = run_all(3, &cfg);
    for (a, b) in one.iter().zip(&three) {
        assert_eq!(a, b);
    }
}

#[test]
fn seed_changes_the_sweep() {
    let s = suite_by_name("thm13").unwrap();
    let a = s.run(&small()).unwrap();
    let b = s.run(&SuiteConfig { seed: 8, ..small() }).unwrap();
    assert_ne!(a.rows, b.rows);
}

#[test]
fn small_sweeps_pass_except_stated_forms() {
    for s in suites() {
        let rep = s.run(&small()).unwrap();
        for row in rep.rows.iter().filter(|r| !r.pass) {
            assert!(
                rep.suite == "schatten"
                    && (row.name.contains("sigma_F") || row.name.contains("Khintchine MC bound")),
                "{}: {} failed ({} vs {})",
                rep.suite,
                row.name,
                row.lhs,
                row.rhs
            );
        }
    }
}
