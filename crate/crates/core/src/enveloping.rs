//! Universal enveloping algebras in PBW normal form, p-center elements, the
//! symmetrization identities and restricted enveloping algebras `u(g)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::liealg::{format_combination, Gen, LieAlgebra, LieElement, StructureConstants};
use crate::linalg::Lin;
use crate::report::Check;
use crate::scalars::Prime;

/// A PBW monomial: generators strictly increasing, each with a positive exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<(Gen, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn gen(g: Gen) -> Monomial {
        Monomial(vec![(g, 1)])
    }

    pub fn power(g: Gen, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(g, e)])
        }
    }

    /// Sorts and merges an arbitrary list of factors of commuting generators.
    pub fn from_factors(mut f: Vec<(Gen, u32)>) -> Monomial {
        f.sort_by_key(|x| x.0);
        let mut out: Vec<(Gen, u32)> = Vec::with_capacity(f.len());
        for (g, e) in f {
            match out.last_mut() {
                Some((h, x)) if *h == g => *x += e,
                _ if e > 0 => out.push((g, e)),
                _ => {}
            }
        }
        Monomial(out)
    }

    pub fn factors(&self) -> &[(Gen, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> u32 {
        self.0.iter().map(|x| x.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|(g, e)| g.degree() * *e as i64).sum()
    }

    pub fn first(&self) -> Option<Gen> {
        self.0.first().map(|x| x.0)
    }

    /// The monomial with one copy of the first generator removed.
    pub fn without_first(&self) -> Monomial {
        let mut f = self.0.clone();
        if f[0].1 == 1 {
            f.remove(0);
        } else {
            f[0].1 -= 1;
        }
        Monomial(f)
    }

    /// `g` times this monomial, valid when `g` does not exceed the first factor.
    pub fn prepend(&self, g: Gen) -> Monomial {
        let mut f = self.0.clone();
        match f.first_mut() {
            Some((h, e)) if *h == g => *e += 1,
            _ => f.insert(0, (g, 1)),
        }
        Monomial(f)
    }

    /// The factors as a word, leftmost first.
    pub fn word(&self) -> Vec<Gen> {
        self.0.iter().flat_map(|&(g, e)| std::iter::repeat_n(g, e as usize)).collect()
    }

    pub fn name(&self, alg: &LieAlgebra) -> String {
        if self.0.is_empty() {
            return String::new();
        }
        self.0
            .iter()
            .map(|&(g, e)| if e == 1 { alg.gen_name(g) } else { format!("{}^{e}", alg.gen_name(g)) })
            .join("*")
    }
}

pub type UEAElement = Lin<Monomial>;

pub fn lie_to_uea(x: &LieElement) -> UEAElement {
    x.map_linear(|g| Lin::single(x.prime(), Monomial::gen(*g), 1))
}

/// Writes an element using the generator names of `alg`.
pub fn uea_name(alg: &LieAlgebra, x: &UEAElement) -> String {
    format_combination(x.iter().map(|(m, c)| (if m.is_one() { "1".to_string() } else { m.name(alg) }, c)))
}

/// The universal enveloping algebra of a Lie algebra, optionally with the
/// central element specialized to a scalar.
pub struct Enveloping {
    alg: LieAlgebra,
    central: Option<u32>,
    cache: RefCell<HashMap<(Gen, Monomial), UEAElement>>,
}

impl fmt::Debug for Enveloping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U({}) central={:?}", self.alg, self.central)
    }
}

impl Enveloping {
    /// `U(g)` with the central element kept as a commuting generator.
    pub fn new(alg: LieAlgebra) -> Enveloping {
        Enveloping { alg, central: None, cache: RefCell::new(HashMap::new()) }
    }

    /// `U(g)` with the central element acting as the scalar `c`.
    pub fn specialized(alg: LieAlgebra, c: u32) -> Enveloping {
        Enveloping { alg, central: Some(c), cache: RefCell::new(HashMap::new()) }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }

    pub fn prime(&self) -> Prime {
        self.alg.prime()
    }

    pub fn one(&self) -> UEAElement {
        Lin::single(self.prime(), Monomial::one(), 1)
    }

    pub fn gen(&self, g: Gen) -> UEAElement {
        self.left_mul_gen(g, &Monomial::one())
    }

    pub fn from_lie(&self, x: &LieElement) -> UEAElement {
        x.map_linear(|g| self.gen(*g))
    }

    /// Normal form of `g * m`.
    pub fn left_mul_gen(&self, g: Gen, m: &Monomial) -> UEAElement {
        let p = self.prime();
        if let (Gen::Central, Some(c)) = (g, self.central) {
            return Lin::single(p, m.clone(), c);
        }
        let x1 = match m.first() {
            None => return Lin::single(p, Monomial::gen(g), 1),
            Some(x1) if g <= x1 => return Lin::single(p, m.prepend(g), 1),
            Some(x1) => x1,
        };
        let key = (g, m.clone());
        if let Some(v) = self.cache.borrow().get(&key) {
            return v.clone();
        }
        // g x1 m' = x1 (g m') + [g, x1] m'
        let rest = m.without_first();
        let inner = self.left_mul_gen(g, &rest);
        let mut r = inner.map_linear(|mono| self.left_mul_gen(x1, mono));
        for (h, c) in self.alg.bracket_gens(g, x1).iter() {
            r.add_scaled(&self.left_mul_gen(*h, &rest), c);
        }
        self.cache.borrow_mut().insert(key, r.clone());
        r
    }

    /// Normal form of a word of generators.
    pub fn straighten(&self, word: &[Gen]) -> UEAElement {
        word.iter().rev().fold(self.one(), |acc, g| self.left_mul_elem_gen(*g, &acc))
    }

    fn left_mul_elem_gen(&self, g: Gen, x: &UEAElement) -> UEAElement {
        x.map_linear(|m| self.left_mul_gen(g, m))
    }

    pub fn multiply(&self, u: &UEAElement, v: &UEAElement) -> UEAElement {
        let mut r = Lin::zero(self.prime());
        for (m, c) in u.iter() {
            let prod = m.word().iter().rev().fold(v.clone(), |acc, g| self.left_mul_elem_gen(*g, &acc));
            r.add_scaled(&prod, c);
        }
        r
    }

    pub fn commutator(&self, u: &UEAElement, v: &UEAElement) -> UEAElement {
        self.multiply(u, v).minus(&self.multiply(v, u))
    }

    pub fn power(&self, u: &UEAElement, e: u32) -> UEAElement {
        (0..e).fold(self.one(), |acc, _| self.multiply(&acc, u))
    }

    /// Checks `[g, z] = 0` for every generator `g` with index in the window.
    /// Returns the first violating generator and the commutator otherwise.
    ///
    /// This certifies centrality only against the window.
    pub fn is_central(&self, z: &UEAElement, window: (i64, i64)) -> Result<(), (Gen, UEAElement)> {
        for g in self.alg.window_gens(window.0, window.1) {
            let c = self.commutator(&self.gen(g), z);
            if !c.is_zero() {
                return Err((g, c));
            }
        }
        Ok(())
    }

    /// The p-center element `x^p - x^{[p]}` of a generator.
    pub fn p_center(&self, g: Gen) -> UEAElement {
        let p = self.prime();
        let xp = self.alg.p_map_gen(g).expect("p-map available");
        self.power(&self.gen(g), p.get()).minus(&self.from_lie(&xp))
    }

    fn nested_bracket(&self, seq: &[&LieElement]) -> LieElement {
        seq[1..].iter().fold(seq[0].clone(), |acc, x| self.alg.bracket_unchecked(&acc, x))
    }

    fn product(&self, seq: &[&LieElement]) -> UEAElement {
        seq.iter().fold(self.one(), |acc, x| self.multiply(&acc, &self.from_lie(x)))
    }

    /// Both sides of the symmetrization identity for exactly `p` Lie elements:
    /// `Σ_{σ∈S_p} a_σ(1)...a_σ(p)` and the sum of left-nested brackets over `σ(1)=1`.
    pub fn cmn_sides(&self, a: &[LieElement]) -> (UEAElement, UEAElement) {
        let p = self.prime();
        assert_eq!(a.len(), p.get() as usize, "exactly p elements required");
        let mut lhs = Lin::zero(p);
        let mut rhs = Lin::zero(p);
        for perm in (0..a.len()).permutations(a.len()) {
            let seq: Vec<&LieElement> = perm.iter().map(|&i| &a[i]).collect();
            lhs.add(&self.product(&seq));
            if perm[0] == 0 {
                rhs.add(&self.from_lie(&self.nested_bracket(&seq)));
            }
        }
        (lhs, rhs)
    }

    pub fn cmn_identity_check(&self, a: &[LieElement]) -> Check {
        let (l, r) = self.cmn_sides(a);
        let names: Vec<String> = a.iter().map(|x| self.alg.element_name(x)).collect();
        Check::single("cmn-identity", l == r, || {
            format!("({}) sym={} brackets={}", names.join(", "), uea_name(&self.alg, &l), uea_name(&self.alg, &r))
        })
        .param("elements", names.join("; "))
    }

    /// Both sides of the multiset identity: `r_1 Σ_{τ∈T} a_τ(1)...a_τ(p)` and the
    /// sum of left-nested brackets over `τ ∈ T` with `τ(1) = 1`, where `T` is the
    /// set of sequences taking value `i` exactly `r_i` times.
    pub fn cmn_multiset_sides(&self, a: &[LieElement], r: &[u32]) -> Result<(UEAElement, UEAElement), String> {
        let p = self.prime();
        if a.len() != r.len() || a.is_empty() || r.iter().any(|&x| x == 0) || r.iter().sum::<u32>() != p.get() {
            return Err(format!("multiplicities {r:?} must be positive and sum to {p}"));
        }
        let mut lhs = Lin::zero(p);
        let mut rhs = Lin::zero(p);
        for tau in multiset_sequences(r) {
            let seq: Vec<&LieElement> = tau.iter().map(|&i| &a[i]).collect();
            lhs.add(&self.product(&seq));
            if tau[0] == 0 {
                rhs.add(&self.from_lie(&self.nested_bracket(&seq)));
            }
        }
        Ok((lhs.scaled(r[0]), rhs))
    }

    pub fn cmn_multiset_check(&self, a: &[LieElement], r: &[u32]) -> Check {
        let names: Vec<String> = a.iter().map(|x| self.alg.element_name(x)).collect();
        let c = match self.cmn_multiset_sides(a, r) {
            Ok((l, rr)) => Check::single("cmn-multiset", l == rr, || {
                format!("lhs={} rhs={}", uea_name(&self.alg, &l), uea_name(&self.alg, &rr))
            }),
            Err(e) => Check::single("cmn-multiset", false, || e),
        };
        c.param("elements", names.join("; ")).param("multiplicities", format!("{r:?}"))
    }
}

/// All sequences over `0..r.len()` in which `i` occurs exactly `r[i]` times.
pub fn multiset_sequences(r: &[u32]) -> Vec<Vec<usize>> {
    fn go(left: &mut Vec<u32>, cur: &mut Vec<usize>, total: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == total {
            out.push(cur.clone());
            return;
        }
        for i in 0..left.len() {
            if left[i] > 0 {
                left[i] -= 1;
                cur.push(i);
                go(left, cur, total, out);
                cur.pop();
                left[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let total = r.iter().sum::<u32>() as usize;
    go(&mut r.to_vec(), &mut Vec::new(), total, &mut out);
    out
}

/// The restricted enveloping algebra `u(g) = U(g) / (x^p - x^{[p]})`.
pub struct RestrictedEnveloping {
    u: Enveloping,
    sc: Arc<StructureConstants>,
}

impl RestrictedEnveloping {
    pub fn new(sc: Arc<StructureConstants>) -> RestrictedEnveloping {
        assert!(sc.has_p_map(), "restricted quotient needs a p-map");
        RestrictedEnveloping { u: Enveloping::new(LieAlgebra::Finite(sc.clone())), sc }
    }

    pub fn enveloping(&self) -> &Enveloping {
        &self.u
    }

    pub fn prime(&self) -> Prime {
        self.sc.prime()
    }

    pub fn gen(&self, i: usize) -> UEAElement {
        self.u.gen(Gen::aff(i, 0))
    }

    /// PBW monomials with every exponent below `p`; there are `p^{dim g}` of them.
    pub fn basis(&self) -> Vec<Monomial> {
        let q = self.prime().get();
        (0..self.sc.dim())
            .map(|_| 0..q)
            .multi_cartesian_product()
            .map(|exps| Monomial::from_factors(exps.iter().enumerate().map(|(i, &e)| (Gen::aff(i, 0), e)).collect()))
            .collect()
    }

    /// Rewrites every factor `x^e` with `e >= p` via `x^p -> x^{[p]}` until all
    /// exponents are below `p`.
    pub fn reduce(&self, x: &UEAElement) -> UEAElement {
        let p = self.prime();
        let q = p.get();
        let mut out = Lin::zero(p);
        let mut todo = x.clone();
        loop {
            let Some((m, c)) = todo.iter().next().map(|(m, c)| (m.clone(), c)) else { break };
            todo.add_term(m.clone(), p.neg(c));
            let Some(pos) = m.factors().iter().position(|&(_, e)| e >= q) else {
                out.add_term(m, c);
                continue;
            };
            let f = m.factors();
            let (g, e) = f[pos];
            let before = Monomial::from_factors(f[..pos].iter().copied().chain([(g, e - q)]).collect());
            let after = Monomial::from_factors(f[pos + 1..].to_vec());
            let gp = self.u.from_lie(&self.u.algebra().p_map_gen(g).expect("p-map table"));
            let before = Lin::single(p, before, 1);
            let after = Lin::single(p, after, 1);
            let prod = self.u.multiply(&self.u.multiply(&before, &gp), &after);
            todo.add_scaled(&prod, c);
        }
        out
    }

    pub fn multiply(&self, a: &UEAElement, b: &UEAElement) -> UEAElement {
        self.reduce(&self.u.multiply(a, b))
    }

    pub fn dim(&self) -> usize {
        self.basis().len()
    }
}
