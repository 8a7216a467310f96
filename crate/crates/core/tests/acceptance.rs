//! Acceptance criteria, each run at its stated ranges and wall-clock limit.
//! Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::sync::Arc;
use std::time::{Duration, Instant};

use modvoa::c2::verify_c2_cofinite;
use modvoa::liealg::{verify_restricted_axioms, RestrictedSample};
use modvoa::modes::{check_axioms, check_power_field, check_virasoro_pcenter_field, AxiomSample};
use modvoa::scalars::{verify_appendix_identities, verify_lucas_lemma};
use modvoa::suites::{axiom_module, run_suite, virasoro_centrality, AlgebraChoice, Suite, SuiteConfig};
use modvoa::vacuum::{build_graded_module, ideal_graded_span, IdealFamily, InducedModule};
use modvoa::zhu::{classify_irreducibles_u_sl2, omega_w_action_check, simple_top, verify_zhu_affine, verify_zhu_vir};
use modvoa::{Check, LieAlgebra, Prime, Report, StructureConstants};

fn p(q: u64) -> Prime {
    Prime::new(q).unwrap()
}

/// Outcome of one criterion: whether it holds, and a one-line summary.
struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn from_reports(reports: &[Report]) -> Outcome {
        let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
        let failed: Vec<String> = reports
            .iter()
            .flat_map(|r| r.failures().map(move |c| format!("{}/{}: {}", r.suite, c.name, c.witness.clone().unwrap_or_default())))
            .collect();
        Outcome {
            ok: failed.is_empty() && checks > 0,
            detail: if failed.is_empty() { format!("{checks} checks") } else { failed.join("; ") },
        }
    }

    fn from_checks(name: &str, checks: Vec<Check>) -> Outcome {
        Outcome::from_reports(&[Report::new(name, checks)])
    }

    fn and(mut self, ok: bool, note: impl FnOnce() -> String) -> Outcome {
        if !ok {
            self.ok = false;
            self.detail = format!("{}; {}", self.detail, note());
        }
        self
    }
}

fn param(r: &Report, check: &str, key: &str) -> Option<String> {
    r.checks.iter().find(|c| c.name == check).and_then(|c| c.params.get(key).cloned())
}

fn appendix() -> Outcome {
    let reports: Vec<Report> = [3, 5, 7].map(|q| verify_appendix_identities(p(q), -12..=12, -12..=12, 0..=10)).into();
    Outcome::from_reports(&reports)
}

fn lucas() -> Outcome {
    let reports: Vec<Report> = [3, 5, 7].map(|q| verify_lucas_lemma(p(q), 25, 25)).into();
    Outcome::from_reports(&reports)
}

fn restricted() -> Outcome {
    let mut reports = Vec::new();
    for q in [3, 5, 7] {
        let sample = RestrictedSample { window: (-8, 8), random_elements: 0, seed: 0 };
        let r = verify_restricted_axioms(&LieAlgebra::virasoro(p(q)), &sample);
        reports.push(Report::new("virasoro-ad-power", r.checks.into_iter().filter(|c| c.name == "axiom-i-generators").collect()));
    }
    for q in [3, 5] {
        let sc = Arc::new(StructureConstants::sl2(p(q)));
        let sample = RestrictedSample { window: (0, 0), random_elements: 50, seed: 0 };
        reports.push(verify_restricted_axioms(&LieAlgebra::Finite(sc), &sample));
    }
    Outcome::from_reports(&reports)
}

fn centrality() -> Outcome {
    Outcome::from_checks("centrality", vec![virasoro_centrality(p(3), [2, 3, 4]), virasoro_centrality(p(5), [2])])
}

fn cmn() -> Outcome {
    let mut reports = Vec::new();
    for q in [3, 5] {
        reports.extend(run_suite(Suite::Cmn, &SuiteConfig::new(p(q), AlgebraChoice::Virasoro)).unwrap());
    }
    let samples = param(&reports[0], "cmn-identity", "instances");
    Outcome::from_reports(&reports).and(samples.as_deref() == Some("25"), || format!("p=3 samples {samples:?}"))
}

fn pcenter_field() -> Outcome {
    let mut checks = Vec::new();
    for c in [0, 1, 2] {
        let m = InducedModule::virasoro_vacuum(p(3), c, 27);
        for n in [2, 3] {
            checks.push(check_virasoro_pcenter_field(&m, n, 9, 9).param("c", c));
        }
    }
    // every input of degree <= 9 is compared for every exponent
    let full: usize = (0..=9).map(|d| InducedModule::virasoro_vacuum(p(3), 0, 9).dim(d)).sum::<usize>() * 19;
    let complete = checks.iter().all(|c| c.params.get("basis-evaluations") == Some(&full.to_string()));
    Outcome::from_checks("pcenter-field", checks).and(complete, || "some inputs were not compared".into())
}

fn zhu_vir() -> Outcome {
    let mut reports = Vec::new();
    for c in [0, 1] {
        reports.push(verify_zhu_vir(p(3), c, 4, 20, 0));
        reports.push(verify_zhu_vir(p(5), c, 2, 20, 0));
    }
    let class = param(&reports[0], "omega-power-class", "class");
    Outcome::from_reports(&reports).and(class.as_deref() == Some("[L(-2)^3 1] = x^3 - x"), || format!("{class:?}"))
}

fn zhu_affine() -> Outcome {
    let sc = Arc::new(StructureConstants::sl2(p(3)));
    let reports: Vec<Report> = (0..3).map(|level| verify_zhu_affine(sc.clone(), level, 1, 20, 0)).collect();
    Outcome::from_reports(&reports)
}

fn classification() -> Outcome {
    let mut reports = Vec::new();
    let mut dims_ok = true;
    for q in [3u64, 5] {
        let pr = p(q);
        let (mods, r) = classify_irreducibles_u_sl2(pr);
        dims_ok &= mods.iter().map(|m| m.dim).eq(1..=q as usize);
        reports.push(r);
        let sc = Arc::new(StructureConstants::sl2(pr));
        for s in &mods {
            let w = InducedModule::affine_generalized_verma(sc.clone(), 1, simple_top(pr, s), 0).unwrap();
            reports.push(omega_w_action_check(&w, 2));
        }
        // L_Vir(c, λ), λ ∈ F_p: p modules, told apart by the L(0)-eigenvalue on the top
        let mut tops = Vec::new();
        for lambda in 0..pr.get() {
            let w = InducedModule::virasoro_verma(pr, 1, lambda, 4);
            reports.push(omega_w_action_check(&w, 4));
            tops.push(build_graded_module(&w).dims()[0]);
            let t = w.top_vector(0);
            dims_ok &= w.act_raw(modvoa::Gen::vir(0), &t) == t.scaled(lambda);
        }
        dims_ok &= tops.len() == q as usize && tops.iter().all(|&d| d == 1);
    }
    Outcome::from_reports(&reports).and(dims_ok, || "module count or dimensions differ".into())
}

/// Partitions of `n` into parts `>= 2`, counted directly.
fn partitions_min2(n: usize) -> usize {
    fn go(n: usize, smallest: usize) -> usize {
        if n == 0 {
            return 1;
        }
        (smallest..=n).map(|k| go(n - k, k)).sum()
    }
    go(n, 2)
}

fn graded_dims() -> Outcome {
    let m = InducedModule::virasoro_vacuum(p(3), 0, 8);
    let dims = m.dims();
    let oracle: Vec<usize> = (0..=8).map(partitions_min2).collect();
    let ideal = ideal_graded_span(&m, &IdealFamily::Virasoro { mu: 0 }).unwrap().dims();
    let ok = dims == vec![1, 0, 1, 1, 2, 2, 4, 4, 7] && dims == oracle && ideal[..6].iter().all(|&d| d == 0) && ideal[6] == 1;
    Outcome { ok, detail: format!("V {dims:?}, oracle {oracle:?}, I0 {ideal:?}") }
}

fn c2() -> Outcome {
    let vir = verify_c2_cofinite(&InducedModule::virasoro_vacuum(p(3), 0, 8), 20, 0);
    let sl2 = verify_c2_cofinite(&InducedModule::affine_vacuum(Arc::new(StructureConstants::sl2(p(3))), 1, 4), 20, 0);
    let spans = param(&vir, "omega-powers-span", "dims");
    let powers = param(&sl2, "generator-power-vanishes", "instances");
    Outcome::from_reports(&[vir, sl2])
        .and(spans.as_deref() == Some("1,0,1,0,1,0,0,0,0"), || format!("V0/C2 dims {spans:?}"))
        .and(powers.as_deref() == Some("3"), || format!("generator powers {powers:?}"))
}

fn singular() -> Outcome {
    let cfg = SuiteConfig { level: 1, ..SuiteConfig::new(p(3), AlgebraChoice::sl2(p(3))) };
    let reports = run_suite(Suite::Singular, &cfg).unwrap();
    let levels = reports[0].checks.iter().filter(|c| c.name == "e-power-singular").count();
    Outcome::from_reports(&reports).and(levels == 3, || format!("{levels} levels checked"))
}

fn axioms() -> Outcome {
    let mut reports = Vec::new();
    for q in [3, 5] {
        for alg in [AlgebraChoice::Virasoro, AlgebraChoice::sl2(p(q))] {
            let cfg = SuiteConfig { c: 1, level: 1, ..SuiteConfig::new(p(q), alg) };
            let m = axiom_module(&cfg);
            reports.push(check_axioms(&m, &AxiomSample { triples: 100, max_total_degree: 5, window: (-4, 4), seed: 0 }));
        }
    }
    let skipped = reports.iter().flat_map(|r| &r.checks).any(|c| c.params.get("skipped").is_some_and(|s| s != "0"));
    Outcome::from_reports(&reports).and(!skipped, || "instances were skipped".into())
}

fn power_field() -> Outcome {
    let m = InducedModule::affine_vacuum(Arc::new(StructureConstants::sl2(p(3))), 1, 14);
    let c = check_power_field(&m, 0, 1, 6, 5);
    let full: usize = (0..=5).map(|d| m.dim(d)).sum::<usize>() * 13;
    let complete = c.params.get("basis-evaluations") == Some(&full.to_string());
    Outcome::from_checks("power-field", vec![c]).and(complete, || "some inputs were not compared".into())
}

fn main() {
    let criteria: Vec<(u32, &str, u64, fn() -> Outcome)> = vec![
        (1, "binomial bracket identities", 10, appendix),
        (2, "Lucas vanishing and lifting", 5, lucas),
        (3, "restricted structures", 30, restricted),
        (4, "p-center centrality", 60, centrality),
        (5, "CMN identity", 30, cmn),
        (6, "p-center field expansion", 120, pcenter_field),
        (7, "Zhu algebra, Virasoro", 120, zhu_vir),
        (8, "Zhu algebra, sl2", 60, zhu_affine),
        (9, "classification", 60, classification),
        (10, "graded dimensions", 10, graded_dims),
        (11, "C2 cofiniteness", 60, c2),
        (12, "singular vectors", 30, singular),
        (13, "vertex algebra axioms", 180, axioms),
        (14, "Frobenius field powers", 60, power_field),
    ];
    let mut failures = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let ok = outcome.ok && in_time;
        if !ok {
            failures += 1;
        }
        let timing = if in_time { String::new() } else { " [over time limit]".to_string() };
        println!(
            "{} criterion {n:>2} {name}: {} ({:.2}s of {limit}s){timing}",
            if ok { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 14 criteria passed", 14 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
