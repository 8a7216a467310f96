//! Named verification suites, as run by the command line and the acceptance tests.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::c2::verify_c2_cofinite;
use crate::enveloping::{uea_name, Enveloping};
use crate::liealg::{verify_b_module_lie, verify_restricted_axioms, Gen, LieAlgebra, LieElement, RestrictedSample, StructureConstants};
use crate::linalg::Lin;
use crate::modes::{
    check_axioms, check_dnv_corollary, check_pcenter_commutes, check_power_field, check_virasoro_pcenter_field,
    AxiomSample,
};
use crate::report::{Check, Report};
use crate::scalars::{verify_appendix_identities, verify_lucas_lemma, Prime};
use crate::vacuum::{raising_radical, InducedModule};
use crate::zhu::{
    classify_irreducibles_u_sl2, omega_w_action_check, simple_top, verify_zhu_affine, verify_zhu_vir, vir_pcenter_vector,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Appendix,
    Lucas,
    Restricted,
    Cmn,
    PcenterField,
    ZhuVir,
    ZhuAffine,
    C2,
    Singular,
    Axioms,
    All,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Appendix,
        Suite::Lucas,
        Suite::Restricted,
        Suite::Cmn,
        Suite::PcenterField,
        Suite::ZhuVir,
        Suite::ZhuAffine,
        Suite::C2,
        Suite::Singular,
        Suite::Axioms,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Appendix => "appendix",
            Suite::Lucas => "lucas",
            Suite::Restricted => "restricted",
            Suite::Cmn => "cmn",
            Suite::PcenterField => "pcenter-field",
            Suite::ZhuVir => "zhu-vir",
            Suite::ZhuAffine => "zhu-affine",
            Suite::C2 => "c2",
            Suite::Singular => "singular",
            Suite::Axioms => "axioms",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Suite, SuiteError> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| SuiteError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SuiteError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("suite {suite} needs {needs}")]
    NotApplicable { suite: Suite, needs: &'static str },
}

/// The algebra a suite runs on: the Virasoro algebra, or the affinization of
/// a finite-dimensional restricted Lie algebra.
#[derive(Clone, Debug)]
pub enum AlgebraChoice {
    Virasoro,
    Finite(Arc<StructureConstants>),
}

impl AlgebraChoice {
    pub fn sl2(p: Prime) -> AlgebraChoice {
        AlgebraChoice::Finite(Arc::new(StructureConstants::sl2(p)))
    }

    fn is_sl2(&self, p: Prime) -> bool {
        matches!(self, AlgebraChoice::Finite(sc) if **sc == StructureConstants::sl2(p))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub p: Prime,
    pub algebra: AlgebraChoice,
    pub c: u32,
    pub level: u32,
    pub max_degree: usize,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(p: Prime, algebra: AlgebraChoice) -> SuiteConfig {
        SuiteConfig { p, algebra, c: 0, level: 0, max_degree: 9, seed: 0 }
    }
}

/// Runs a suite; `All` runs every suite that applies to the chosen algebra.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Report>, SuiteError> {
    let virasoro = matches!(cfg.algebra, AlgebraChoice::Virasoro);
    let sc = match &cfg.algebra {
        AlgebraChoice::Finite(sc) => Some(sc.clone()),
        AlgebraChoice::Virasoro => None,
    };
    let need_finite = |s| SuiteError::NotApplicable { suite: s, needs: "a finite-dimensional Lie algebra (sl2 or custom)" };
    let out = match suite {
        Suite::Appendix => vec![appendix(cfg.p)],
        Suite::Lucas => vec![verify_lucas_lemma(cfg.p, 25, 25)],
        Suite::Restricted => restricted(cfg),
        Suite::Cmn => vec![cmn(cfg)],
        Suite::PcenterField => vec![pcenter_field(cfg)],
        Suite::ZhuVir if virasoro => zhu_vir(cfg),
        Suite::ZhuVir => return Err(SuiteError::NotApplicable { suite, needs: "the Virasoro algebra" }),
        Suite::ZhuAffine => zhu_affine(cfg, sc.ok_or_else(|| need_finite(suite))?),
        Suite::C2 => vec![c2(cfg)],
        Suite::Singular => vec![singular(cfg)?],
        Suite::Axioms => vec![axioms(cfg)],
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::ALL {
                let skip = s == Suite::All || (s == Suite::ZhuVir && !virasoro) || (s == Suite::ZhuAffine && virasoro);
                if !skip {
                    out.extend(run_suite(s, cfg)?);
                }
            }
            out
        }
    };
    Ok(out)
}

fn appendix(p: Prime) -> Report {
    verify_appendix_identities(p, -12..=12, -12..=12, 0..=10)
}

fn lie_algebra(cfg: &SuiteConfig) -> LieAlgebra {
    match &cfg.algebra {
        AlgebraChoice::Virasoro => LieAlgebra::virasoro(cfg.p),
        AlgebraChoice::Finite(sc) => LieAlgebra::Affine(sc.clone()),
    }
}

fn vacuum(cfg: &SuiteConfig, n: usize) -> InducedModule {
    match &cfg.algebra {
        AlgebraChoice::Virasoro => InducedModule::virasoro_vacuum(cfg.p, cfg.c, n),
        AlgebraChoice::Finite(sc) => InducedModule::affine_vacuum(sc.clone(), cfg.level, n),
    }
}

/// Indices `n` whose p-center generators are checked.
fn pcenter_indices(p: Prime) -> std::ops::RangeInclusive<i64> {
    if p.get() == 3 {
        2..=4
    } else {
        2..=2
    }
}

/// Centrality of `L_{-n}^p − δ_{p|n}L_{-np}` in `U(Vir)` for `s ∈ [−6, 6]`.
pub fn virasoro_centrality(p: Prime, ns: impl IntoIterator<Item = i64>) -> Check {
    let u = Enveloping::new(LieAlgebra::virasoro(p));
    let mut c = Check::new("pcenter-central");
    let mut done = Vec::new();
    for n in ns {
        let z = u.p_center(Gen::vir(-n));
        match u.is_central(&z, (-6, 6)) {
            Ok(()) => c.record(true, String::new),
            Err((g, r)) => {
                c.record(false, || format!("n={n}: [{}, z] = {}", u.algebra().gen_name(g), uea_name(u.algebra(), &r)))
            }
        }
        done.push(n.to_string());
    }
    c.finish().param("n", done.join(",")).param("window", "[-6,6]")
}

fn restricted(cfg: &SuiteConfig) -> Vec<Report> {
    let sample = RestrictedSample { window: (-8, 8), random_elements: 20, seed: cfg.seed };
    match &cfg.algebra {
        AlgebraChoice::Virasoro => {
            let alg = LieAlgebra::virasoro(cfg.p);
            let mut r = verify_restricted_axioms(&alg, &sample);
            r.push(virasoro_centrality(cfg.p, pcenter_indices(cfg.p)));
            vec![r, verify_b_module_lie(&alg, (-6, 6), 6)]
        }
        AlgebraChoice::Finite(sc) => {
            let structure = sc.validate().param("p", cfg.p);
            let finite = LieAlgebra::Finite(sc.clone());
            let mut r = verify_restricted_axioms(&finite, &sample);
            if structure.passed() {
                let u = Enveloping::new(finite.clone());
                let mut central = Check::new("pcenter-central");
                for b in 0..sc.dim() {
                    let z = u.p_center(Gen::aff(b, 0));
                    central.record(u.is_central(&z, (0, 0)).is_ok(), || format!("{}^p − {}^[p]", sc.names()[b], sc.names()[b]));
                }
                r.push(central.finish());
                let affine = LieAlgebra::Affine(sc.clone());
                let aff_sample = RestrictedSample { window: (-4, 4), ..sample };
                vec![structure, r, verify_restricted_axioms(&affine, &aff_sample), verify_b_module_lie(&affine, (-4, 4), 6)]
            } else {
                vec![structure, r]
            }
        }
    }
}

fn random_lie_element(alg: &LieAlgebra, gens: &[Gen], rng: &mut ChaCha8Rng) -> LieElement {
    let p = alg.prime();
    let mut v = Lin::zero(p);
    while v.is_zero() {
        for _ in 0..rng.gen_range(1..=2) {
            v.add_term(gens[rng.gen_range(0..gens.len())], rng.gen_range(1..p.get()));
        }
    }
    v
}

fn cmn(cfg: &SuiteConfig) -> Report {
    let p = cfg.p;
    let q = p.get() as usize;
    let alg = match &cfg.algebra {
        AlgebraChoice::Virasoro => LieAlgebra::virasoro(p),
        AlgebraChoice::Finite(sc) => LieAlgebra::Finite(sc.clone()),
    };
    let gens: Vec<Gen> = alg.window_gens(-3, 3);
    let u = Enveloping::new(alg.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // p! orderings of p-fold products per sample
    let samples = match q {
        3 => 25,
        5 => 5,
        _ => 1,
    };
    let mut full = Check::new("cmn-identity");
    for _ in 0..samples {
        let a: Vec<LieElement> = (0..q).map(|_| random_lie_element(&alg, &gens, &mut rng)).collect();
        full.absorb(&Report::new("", vec![u.cmn_identity_check(&a)]));
    }
    let mut multi = Check::new("cmn-multiset");
    for r in [vec![p.get() - 1, 1], vec![1, p.get() - 1]] {
        for _ in 0..5 {
            let a: Vec<LieElement> = (0..2).map(|_| random_lie_element(&alg, &gens, &mut rng)).collect();
            multi.absorb(&Report::new("", vec![u.cmn_multiset_check(&a, &r)]));
        }
    }
    Report::new(
        "cmn",
        vec![
            full.finish().param("orderings", "all").param("samples", samples),
            multi.finish().param("multiplicities", format!("({},1),(1,{})", q - 1, q - 1)),
        ],
    )
    .param("p", p)
    .param("algebra", &alg)
    .param("seed", cfg.seed)
}

fn pcenter_field(cfg: &SuiteConfig) -> Report {
    let p = cfg.p;
    let q = p.get() as i64;
    match &cfg.algebra {
        AlgebraChoice::Virasoro => {
            let input = cfg.max_degree;
            let emax = cfg.max_degree as i64;
            let mut checks = Vec::new();
            for n in 2..=3 {
                let big = InducedModule::virasoro_vacuum(p, cfg.c, input + (n * q + emax) as usize);
                checks.push(check_virasoro_pcenter_field(&big, n, emax, input));
                let v = InducedModule::virasoro_vacuum(p, cfg.c, (n * q + 2 * q) as usize);
                checks.push(check_dnv_corollary(&v, n, 2 * q as u64));
                let small = InducedModule::virasoro_vacuum(p, cfg.c, (n * q + 4) as usize);
                checks.push(check_pcenter_commutes(&small, n, (-3, 3)));
            }
            Report::new("pcenter-field", checks).param("p", p).param("c", cfg.c).param("algebra", lie_algebra(cfg))
        }
        AlgebraChoice::Finite(sc) => {
            let input = cfg.max_degree.min(5);
            let emax = 2 * q;
            let m = InducedModule::affine_vacuum(sc.clone(), cfg.level, input + (q + emax) as usize);
            let checks = (0..sc.dim()).map(|b| check_power_field(&m, b, 1, emax, input)).collect();
            Report::new("pcenter-field", checks).param("p", p).param("level", cfg.level).param("algebra", lie_algebra(cfg))
        }
    }
}

fn zhu_vir(cfg: &SuiteConfig) -> Vec<Report> {
    let p = cfg.p;
    let nmax = *pcenter_indices(p).end();
    let r = verify_zhu_vir(p, cfg.c, nmax, 20, cfg.seed);
    let mut omega = Report::new("omega-action", Vec::new()).param("p", p).param("c", cfg.c);
    for lambda in 0..p.get() {
        let w = InducedModule::virasoro_verma(p, cfg.c, lambda, 2);
        let sub = omega_w_action_check(&w, cfg.max_degree.min(4));
        for c in sub.checks {
            omega.push(c.param("lambda", lambda));
        }
    }
    vec![r, omega]
}

fn zhu_affine(cfg: &SuiteConfig, sc: Arc<StructureConstants>) -> Vec<Report> {
    let p = cfg.p;
    let mut out = vec![verify_zhu_affine(sc.clone(), cfg.level, 1, 20, cfg.seed)];
    if cfg.algebra.is_sl2(p) {
        let (mods, r) = classify_irreducibles_u_sl2(p);
        out.push(r);
        let mut omega = Report::new("omega-action", Vec::new()).param("p", p).param("level", cfg.level);
        for s in &mods {
            let top = simple_top(p, s);
            match InducedModule::affine_generalized_verma(sc.clone(), cfg.level, top, 2) {
                Ok(w) => {
                    for c in omega_w_action_check(&w, cfg.max_degree.min(2)).checks {
                        omega.push(c.param("top", format!("L({})", s.highest_weight)));
                    }
                }
                Err(e) => omega.push(Check::single("generalized-verma", false, || e.to_string())),
            }
        }
        out.push(omega);
    }
    out
}

fn c2(cfg: &SuiteConfig) -> Report {
    let q = cfg.p.get() as usize;
    let n = match cfg.algebra {
        AlgebraChoice::Virasoro => cfg.max_degree.max(2 * q),
        AlgebraChoice::Finite(_) => q + 1,
    };
    verify_c2_cofinite(&vacuum(cfg, n), 20, cfg.seed)
}

fn singular(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let p = cfg.p;
    let q = p.get() as i64;
    match &cfg.algebra {
        AlgebraChoice::Virasoro => {
            let mut sing = Check::new("pcenter-vector-singular");
            let mut rad = Check::new("pcenter-vector-in-radical");
            for n in 2..=3 {
                let m = InducedModule::virasoro_vacuum(p, cfg.c, (n * q) as usize);
                let z = vir_pcenter_vector(&m, n);
                sing.record(m.is_singular(&z).unwrap_or(false), || format!("n={n}"));
                let j = raising_radical(&m);
                rad.record(j.contains(&m, &z), || format!("n={n}: {} not in J", m.vec_name(&z)));
            }
            let m = InducedModule::virasoro_vacuum(p, cfg.c, cfg.max_degree);
            let evidence = raising_radical(&m).dims().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
            Ok(Report::new("singular", vec![sing.finish(), rad.finish()])
                .param("p", p)
                .param("c", cfg.c)
                .param("radical-dims", evidence))
        }
        AlgebraChoice::Finite(sc) if cfg.algebra.is_sl2(p) => {
            let mut checks = Vec::new();
            for level in 0..p.get() {
                let ell = level as usize;
                let m = InducedModule::affine_vacuum(sc.clone(), level, ell + 1);
                let v = m.act_word_raw(&vec![Gen::aff(0, -1); ell + 1], &m.one());
                let e0 = m.act_raw(Gen::aff(0, 0), &v);
                let f1 = m.act_raw(Gen::aff(1, 1), &v);
                let j = raising_radical(&m);
                let ok = !v.is_zero() && e0.is_zero() && f1.is_zero() && m.is_singular(&v).unwrap_or(false) && j.contains(&m, &v);
                checks.push(
                    Check::single("e-power-singular", ok, || {
                        format!("level {level}: e(0)v={} f(1)v={}", m.vec_name(&e0), m.vec_name(&f1))
                    })
                    .param("level", level)
                    .param("vector", m.vec_name(&v)),
                );
            }
            let m = InducedModule::affine_vacuum(sc.clone(), cfg.level, cfg.max_degree.min(4));
            let evidence = raising_radical(&m).dims().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
            Ok(Report::new("singular", checks).param("p", p).param("level", cfg.level).param("radical-dims", evidence))
        }
        AlgebraChoice::Finite(_) => Err(SuiteError::NotApplicable { suite: Suite::Singular, needs: "Virasoro or sl2" }),
    }
}

/// The vacuum module used by the axiom suite; its truncation leaves room for
/// every mode in the window applied to triples of total degree at most 5.
pub fn axiom_module(cfg: &SuiteConfig) -> InducedModule {
    vacuum(cfg, 5 + 3 * 4 + 3)
}

fn axioms(cfg: &SuiteConfig) -> Report {
    let m = axiom_module(cfg);
    check_axioms(&m, &AxiomSample { seed: cfg.seed, ..AxiomSample::default() })
}
