//! Virasoro, affine and finite-dimensional Lie algebras over `F_p` with their
//! p-mappings and Hasse-derivative actions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Lin;
use crate::report::{Check, Report};
use crate::scalars::{Prime, ScalarError};

/// A generator of one of the supported Lie algebras.
///
/// The derived order is the PBW order: modes are compared by loop index and
/// then by base index, and the central element is greatest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gen {
    /// `L_index` for the Virasoro algebra (`base` is 0), `a_base(index)` for an
    /// affine algebra, or the basis element `a_base` of a finite algebra
    /// (`index` is 0).
    Mode { index: i64, base: u16 },
    /// `c` or `k`.
    Central,
}

impl Gen {
    pub fn vir(n: i64) -> Gen {
        Gen::Mode { index: n, base: 0 }
    }

    pub fn aff(base: usize, n: i64) -> Gen {
        Gen::Mode { index: n, base: base as u16 }
    }

    pub fn index(self) -> Option<i64> {
        match self {
            Gen::Mode { index, .. } => Some(index),
            Gen::Central => None,
        }
    }

    pub fn base(self) -> Option<usize> {
        match self {
            Gen::Mode { base, .. } => Some(base as usize),
            Gen::Central => None,
        }
    }

    /// Degree in the grading where `L_n` and `a(n)` have degree `-n`.
    pub fn degree(self) -> i64 {
        match self {
            Gen::Mode { index, .. } => -index,
            Gen::Central => 0,
        }
    }
}

pub type LieElement = Lin<Gen>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("generator {0:?} does not belong to this algebra")]
    InvalidGenerator(Gen),
    #[error("no p-mapping table is attached")]
    MissingPMap,
    #[error("invalid structure constants: {0}")]
    Structure(String),
}

/// Structure constants of a finite-dimensional restricted Lie algebra with an
/// invariant symmetric form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    p: Prime,
    names: Vec<String>,
    bracket: Vec<Vec<Vec<(usize, u32)>>>,
    form: Vec<Vec<u32>>,
    pmap: Option<Vec<Vec<(usize, u32)>>>,
}

/// Serializable description of structure constants, as read from a file.
///
/// Brackets are listed for ordered pairs `(i, j)`; the opposite pair is filled
/// in by antisymmetry. Missing p-map entries mean `a^{[p]} = 0`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StructureSpec {
    pub p: u64,
    pub basis: Vec<String>,
    #[serde(default)]
    pub bracket: Vec<BracketEntry>,
    pub form: Vec<Vec<i64>>,
    #[serde(default)]
    pub p_map: Option<Vec<PMapEntry>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BracketEntry {
    pub pair: (usize, usize),
    pub terms: Vec<(usize, i64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PMapEntry {
    pub basis: usize,
    pub terms: Vec<(usize, i64)>,
}

impl StructureConstants {
    /// Builds the constants without checking the Lie, invariance or
    /// restrictedness axioms; see [`StructureConstants::validate`].
    pub fn from_spec_unchecked(spec: &StructureSpec) -> Result<StructureConstants, LieError> {
        let p = Prime::new(spec.p)?;
        let dim = spec.basis.len();
        let bad = |m: String| Err(LieError::Structure(m));
        if dim == 0 || dim > u16::MAX as usize {
            return bad(format!("basis size {dim} unsupported"));
        }
        let mut bracket = vec![vec![Vec::new(); dim]; dim];
        let mut given = vec![vec![false; dim]; dim];
        for e in &spec.bracket {
            let (i, j) = e.pair;
            if i >= dim || j >= dim || e.terms.iter().any(|&(k, _)| k >= dim) {
                return bad(format!("bracket entry {:?} out of range", e.pair));
            }
            let v = Lin::from_terms(p, e.terms.iter().map(|&(k, c)| (k, p.reduce(c))));
            let neg = v.scaled(p.get() - 1);
            let as_vec = |l: &Lin<usize>| l.iter().map(|(k, c)| (*k, c)).collect::<Vec<_>>();
            if given[i][j] && bracket[i][j] != as_vec(&v) {
                return bad(format!("conflicting bracket entries for {:?}", e.pair));
            }
            if given[j][i] && bracket[j][i] != as_vec(&neg) {
                return bad(format!("bracket entries {:?} violate antisymmetry", e.pair));
            }
            bracket[i][j] = as_vec(&v);
            bracket[j][i] = as_vec(&neg);
            given[i][j] = true;
            given[j][i] = true;
        }
        if spec.form.len() != dim || spec.form.iter().any(|r| r.len() != dim) {
            return bad("form matrix has the wrong shape".into());
        }
        let form = spec.form.iter().map(|r| r.iter().map(|&x| p.reduce(x)).collect()).collect();
        let pmap = match &spec.p_map {
            None => None,
            Some(entries) => {
                let mut t = vec![Vec::new(); dim];
                for e in entries {
                    if e.basis >= dim || e.terms.iter().any(|&(k, _)| k >= dim) {
                        return bad(format!("p-map entry for {} out of range", e.basis));
                    }
                    let v = Lin::from_terms(p, e.terms.iter().map(|&(k, c)| (k, p.reduce(c))));
                    t[e.basis] = v.iter().map(|(k, c)| (*k, c)).collect();
                }
                Some(t)
            }
        };
        Ok(StructureConstants { p, names: spec.basis.clone(), bracket, form, pmap })
    }

    /// Builds and eagerly validates (Jacobi, form invariance, restrictedness).
    pub fn from_spec(spec: &StructureSpec) -> Result<StructureConstants, LieError> {
        let sc = StructureConstants::from_spec_unchecked(spec)?;
        let report = sc.validate();
        let failure = report
            .failures()
            .next()
            .map(|c| format!("{} fails: {}", c.name, c.witness.clone().unwrap_or_default()));
        match failure {
            None => Ok(sc),
            Some(msg) => Err(LieError::Structure(msg)),
        }
    }

    /// `sl_2` with basis `(e, f, h)`, trace form and `e,f ↦ 0`, `h ↦ h`.
    pub fn sl2(p: Prime) -> StructureConstants {
        StructureConstants::from_spec(&sl2_spec(p.get() as u64)).expect("sl2 is a restricted Lie algebra")
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, u32)] {
        &self.bracket[i][j]
    }

    pub fn form(&self, i: usize, j: usize) -> u32 {
        self.form[i][j]
    }

    pub fn p_map_basis(&self, i: usize) -> Option<&[(usize, u32)]> {
        self.pmap.as_ref().map(|t| t[i].as_slice())
    }

    pub fn has_p_map(&self) -> bool {
        self.pmap.is_some()
    }

    /// Bracket of two elements written in the basis.
    pub fn bracket(&self, x: &Lin<usize>, y: &Lin<usize>) -> Lin<usize> {
        let p = self.p;
        let mut r = Lin::zero(p);
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let c = p.mul(a, b);
                for &(k, s) in &self.bracket[*i][*j] {
                    r.add_term(k, p.mul(c, s));
                }
            }
        }
        r
    }

    pub fn form_value(&self, x: &Lin<usize>, y: &Lin<usize>) -> u32 {
        let p = self.p;
        x.iter().fold(0, |acc, (i, a)| {
            y.iter().fold(acc, |acc, (j, b)| p.add(acc, p.mul(p.mul(a, b), self.form[*i][*j])))
        })
    }

    /// Matrix of `ad x` in the basis, columns indexed by the input basis vector.
    pub fn ad_matrix(&self, x: &Lin<usize>) -> Vec<Vec<u32>> {
        let n = self.dim();
        let mut m = vec![vec![0; n]; n];
        for j in 0..n {
            let img = self.bracket(x, &Lin::single(self.p, j, 1));
            for (i, c) in img.iter() {
                m[*i][j] = c;
            }
        }
        m
    }

    /// Checks antisymmetry, Jacobi, symmetry and invariance of the form, and
    /// `(ad a)^p = ad a^{[p]}` on basis pairs.
    pub fn validate(&self) -> Report {
        let p = self.p;
        let n = self.dim();
        let e = |i: usize| Lin::single(p, i, 1);
        let mut anti = Check::new("antisymmetry");
        let mut jacobi = Check::new("jacobi");
        let mut sym = Check::new("form-symmetric");
        let mut inv = Check::new("form-invariant");
        let mut restricted = Check::new("restricted-basis");
        for i in 0..n {
            for j in 0..n {
                let s = self.bracket(&e(i), &e(j)).plus(&self.bracket(&e(j), &e(i)));
                anti.record(s.is_zero(), || format!("[{0},{1}] + [{1},{0}] != 0", self.names[i], self.names[j]));
                sym.record(self.form[i][j] == self.form[j][i], || format!("<{},{}>", self.names[i], self.names[j]));
                for k in 0..n {
                    let bij = self.bracket(&e(i), &e(j));
                    let bjk = self.bracket(&e(j), &e(k));
                    let bki = self.bracket(&e(k), &e(i));
                    let mut s = self.bracket(&bij, &e(k));
                    s.add(&self.bracket(&bjk, &e(i)));
                    s.add(&self.bracket(&bki, &e(j)));
                    jacobi.record(s.is_zero(), || {
                        format!("({}, {}, {})", self.names[i], self.names[j], self.names[k])
                    });
                    let l = self.form_value(&bij, &e(k));
                    let r = self.form_value(&e(i), &bjk);
                    inv.record(l == r, || {
                        format!("<[{0},{1}],{2}> != <{0},[{1},{2}]>", self.names[i], self.names[j], self.names[k])
                    });
                }
            }
        }
        if let Some(t) = &self.pmap {
            for i in 0..n {
                let ap = Lin::from_terms(p, t[i].iter().copied());
                for j in 0..n {
                    let mut lhs = e(j);
                    for _ in 0..p.get() {
                        lhs = self.bracket(&e(i), &lhs);
                    }
                    let rhs = self.bracket(&ap, &e(j));
                    restricted.record(lhs == rhs, || {
                        format!("(ad {0})^p {1} != [{0}^[p], {1}]", self.names[i], self.names[j])
                    });
                }
            }
        } else {
            restricted = restricted.param("skipped", "no p-map");
        }
        Report::new(
            "structure",
            vec![anti.finish(), jacobi.finish(), sym.finish(), inv.finish(), restricted.finish()],
        )
    }
}

/// The structure file describing `sl_2` in the basis `(e, f, h)`.
pub fn sl2_spec(p: u64) -> StructureSpec {
    StructureSpec {
        p,
        basis: vec!["e".into(), "f".into(), "h".into()],
        bracket: vec![
            BracketEntry { pair: (0, 1), terms: vec![(2, 1)] },
            BracketEntry { pair: (2, 0), terms: vec![(0, 2)] },
            BracketEntry { pair: (2, 1), terms: vec![(1, -2)] },
        ],
        form: vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 2]],
        p_map: Some(vec![PMapEntry { basis: 2, terms: vec![(2, 1)] }]),
    }
}

/// The Lie algebras handled by the library.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LieAlgebra {
    Virasoro(Prime),
    /// The affinization `g ⊗ F[t, t^{-1}] ⊕ F k`.
    Affine(Arc<StructureConstants>),
    /// The finite-dimensional algebra itself, with generators `Mode { index: 0, .. }`.
    Finite(Arc<StructureConstants>),
}

impl fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieAlgebra::Virasoro(p) => write!(f, "Vir over F_{p}"),
            LieAlgebra::Affine(sc) => write!(f, "affine {} over F_{}", sc.names.join(","), sc.p),
            LieAlgebra::Finite(sc) => write!(f, "{} over F_{}", sc.names.join(","), sc.p),
        }
    }
}

impl LieAlgebra {
    pub fn virasoro(p: Prime) -> LieAlgebra {
        LieAlgebra::Virasoro(p)
    }

    pub fn affine(sc: StructureConstants) -> LieAlgebra {
        LieAlgebra::Affine(Arc::new(sc))
    }

    pub fn prime(&self) -> Prime {
        match self {
            LieAlgebra::Virasoro(p) => *p,
            LieAlgebra::Affine(sc) | LieAlgebra::Finite(sc) => sc.p,
        }
    }

    pub fn structure(&self) -> Option<&Arc<StructureConstants>> {
        match self {
            LieAlgebra::Virasoro(_) => None,
            LieAlgebra::Affine(sc) | LieAlgebra::Finite(sc) => Some(sc),
        }
    }

    pub fn is_virasoro(&self) -> bool {
        matches!(self, LieAlgebra::Virasoro(_))
    }

    /// Number of base directions: 1 for Virasoro, `dim g` otherwise.
    pub fn base_dim(&self) -> usize {
        self.structure().map_or(1, |sc| sc.dim())
    }

    pub fn has_central(&self) -> bool {
        !matches!(self, LieAlgebra::Finite(_))
    }

    pub fn check_gen(&self, g: Gen) -> Result<(), LieError> {
        match (self, g) {
            (LieAlgebra::Finite(_), Gen::Central) => Err(LieError::InvalidGenerator(g)),
            (_, Gen::Central) => Ok(()),
            (LieAlgebra::Virasoro(_), Gen::Mode { base, .. }) if base != 0 => Err(LieError::InvalidGenerator(g)),
            (LieAlgebra::Finite(_), Gen::Mode { index, .. }) if index != 0 => Err(LieError::InvalidGenerator(g)),
            (_, Gen::Mode { base, .. }) if base as usize >= self.base_dim() => Err(LieError::InvalidGenerator(g)),
            _ => Ok(()),
        }
    }

    pub fn gen_name(&self, g: Gen) -> String {
        match (self, g) {
            (LieAlgebra::Virasoro(_), Gen::Central) => "c".into(),
            (_, Gen::Central) => "k".into(),
            (LieAlgebra::Virasoro(_), Gen::Mode { index, .. }) => format!("L({index})"),
            (LieAlgebra::Affine(sc), Gen::Mode { index, base }) => format!("{}({index})", sc.names[base as usize]),
            (LieAlgebra::Finite(sc), Gen::Mode { base, .. }) => sc.names[base as usize].clone(),
        }
    }

    pub fn element_name(&self, x: &LieElement) -> String {
        format_combination(x.iter().map(|(g, c)| (self.gen_name(*g), c)))
    }

    /// Bracket of two generators.
    pub fn bracket_gens(&self, x: Gen, y: Gen) -> LieElement {
        let p = self.prime();
        let mut r = Lin::zero(p);
        let (Gen::Mode { index: m, base: a }, Gen::Mode { index: n, base: b }) = (x, y) else {
            return r;
        };
        match self {
            LieAlgebra::Virasoro(_) => {
                r.add_term(Gen::vir(m + n), p.reduce(m - n));
                if m + n == 0 {
                    r.add_term(Gen::Central, p.mul(p.half(), p.binom(m + 1, 3)));
                }
            }
            LieAlgebra::Affine(sc) => {
                for &(k, c) in sc.bracket_basis(a as usize, b as usize) {
                    r.add_term(Gen::aff(k, m + n), c);
                }
                if m + n == 0 {
                    r.add_term(Gen::Central, p.mul(p.reduce(m), sc.form(a as usize, b as usize)));
                }
            }
            LieAlgebra::Finite(sc) => {
                for &(k, c) in sc.bracket_basis(a as usize, b as usize) {
                    r.add_term(Gen::aff(k, 0), c);
                }
            }
        }
        r
    }

    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> Result<LieElement, LieError> {
        let p = self.prime();
        for v in [x, y] {
            if v.prime() != p {
                return Err(ScalarError::PrimeMismatch(p.get(), v.prime().get()).into());
            }
            for g in v.keys() {
                self.check_gen(*g)?;
            }
        }
        Ok(self.bracket_unchecked(x, y))
    }

    pub(crate) fn bracket_unchecked(&self, x: &LieElement, y: &LieElement) -> LieElement {
        let p = self.prime();
        let mut r = Lin::zero(p);
        for (g, a) in x.iter() {
            for (h, b) in y.iter() {
                r.add_scaled(&self.bracket_gens(*g, *h), p.mul(a, b));
            }
        }
        r
    }

    /// `(ad x)^e y`.
    pub fn ad_power(&self, x: &LieElement, e: u32, y: &LieElement) -> LieElement {
        (0..e).fold(y.clone(), |acc, _| self.bracket_unchecked(x, &acc))
    }

    /// The p-mapping on a generator.
    pub fn p_map_gen(&self, g: Gen) -> Result<LieElement, LieError> {
        let p = self.prime();
        let q = p.get() as i64;
        self.check_gen(g)?;
        let Gen::Mode { index, base } = g else {
            return Ok(Lin::single(p, Gen::Central, 1));
        };
        match self {
            LieAlgebra::Virasoro(_) => Ok(if index % q == 0 {
                Lin::single(p, Gen::vir(index * q), 1)
            } else {
                Lin::zero(p)
            }),
            LieAlgebra::Affine(sc) | LieAlgebra::Finite(sc) => {
                let table = sc.p_map_basis(base as usize).ok_or(LieError::MissingPMap)?;
                Ok(Lin::from_terms(p, table.iter().map(|&(k, c)| (Gen::aff(k, index * q), c))))
            }
        }
    }

    /// The p-mapping on an arbitrary element, extended from generators by
    /// `(λa)^{[p]} = λ^p a^{[p]}` and the `s_i` correction terms.
    pub fn p_map(&self, x: &LieElement) -> Result<LieElement, LieError> {
        let p = self.prime();
        let mut it = x.iter();
        let Some((g, c)) = it.next() else {
            return Ok(Lin::zero(p));
        };
        let a = Lin::single(p, *g, c);
        let b = x.minus(&a);
        let mut r = self.p_map_gen(*g)?.scaled(p.pow(c, p.get() as u64));
        if !b.is_zero() {
            r.add(&self.p_map(&b)?);
            for s in self.s_terms(&a, &b) {
                r.add(&s);
            }
        }
        Ok(r)
    }

    /// `s_1(a,b), ..., s_{p-1}(a,b)` read off from
    /// `(ad(aX + b))^{p-1}(a) = Σ i s_i(a,b) X^{i-1}` in `g ⊗ F[X]`.
    pub fn s_terms(&self, a: &LieElement, b: &LieElement) -> Vec<LieElement> {
        let p = self.prime();
        let q = p.get();
        let mut y: Lin<(u32, Gen)> = Lin::from_terms(p, a.iter().map(|(g, c)| ((0, *g), c)));
        for _ in 0..q - 1 {
            let mut next = Lin::zero(p);
            for ((d, g), c) in y.iter() {
                let single = Lin::single(p, *g, c);
                for (h, s) in self.bracket_unchecked(a, &single).iter() {
                    next.add_term((d + 1, *h), s);
                }
                for (h, s) in self.bracket_unchecked(b, &single).iter() {
                    next.add_term((*d, *h), s);
                }
            }
            y = next;
        }
        (1..q)
            .map(|i| {
                let inv = p.inv(i).expect("i < p");
                Lin::from_terms(p, y.iter().filter(|((d, _), _)| *d == i - 1).map(|((_, g), c)| (*g, p.mul(c, inv))))
            })
            .collect()
    }

    /// Hasse derivative `D^(k)` on a generator.
    pub fn hasse_gen(&self, k: u64, g: Gen) -> LieElement {
        let p = self.prime();
        let k = k as i64;
        match (self, g) {
            (_, Gen::Central) | (LieAlgebra::Finite(_), _) => {
                if k == 0 {
                    Lin::single(p, g, 1)
                } else {
                    Lin::zero(p)
                }
            }
            (LieAlgebra::Virasoro(_), Gen::Mode { index: m, .. }) => {
                Lin::single(p, Gen::vir(m - k), p.mul(p.sign(k), p.binom(m + 1, k)))
            }
            (LieAlgebra::Affine(_), Gen::Mode { index: m, base }) => {
                Lin::single(p, Gen::aff(base as usize, m - k), p.mul(p.sign(k), p.binom(m, k)))
            }
        }
    }

    pub fn hasse(&self, k: u64, x: &LieElement) -> LieElement {
        x.map_linear(|g| self.hasse_gen(k, *g))
    }

    /// Generators `L_n`, `a(n)` with `n` in the window, plus the central element.
    pub fn window_gens(&self, lo: i64, hi: i64) -> Vec<Gen> {
        let mut v: Vec<Gen> = match self {
            LieAlgebra::Finite(sc) => (0..sc.dim()).map(|b| Gen::aff(b, 0)).collect(),
            _ => (lo..=hi).flat_map(|n| (0..self.base_dim()).map(move |b| Gen::aff(b, n))).collect(),
        };
        if self.has_central() {
            v.push(Gen::Central);
        }
        v
    }

    /// Solves `ad y = (ad x)^p` inside a finite-dimensional algebra. The solution
    /// is unique when the center is trivial.
    pub fn p_map_from_adjoint(&self, x: &LieElement) -> Option<LieElement> {
        let LieAlgebra::Finite(sc) = self else {
            return None;
        };
        let p = self.prime();
        let n = sc.dim();
        let to_base = |v: &LieElement| Lin::from_terms(p, v.iter().map(|(g, c)| (g.base().unwrap(), c)));
        let xb = to_base(x);
        let adx = sc.ad_matrix(&xb);
        let mut target = crate::linalg::identity(n);
        for _ in 0..p.get() {
            target = crate::linalg::mat_mul(p, &adx, &target);
        }
        let flat = |m: &Vec<Vec<u32>>| m.iter().flatten().copied().collect::<Vec<u32>>();
        let columns: Vec<Vec<u32>> = (0..n).map(|k| flat(&sc.ad_matrix(&Lin::single(p, k, 1)))).collect();
        let mut system: Vec<Vec<u32>> = columns.clone();
        system.push(flat(&target));
        let kernel = crate::linalg::left_kernel(p, &system, n * n);
        let sol = kernel.into_iter().find(|v| v[n] != 0)?;
        let scale = p.neg(p.inv(sol[n]).unwrap());
        Some(Lin::from_terms(p, (0..n).map(|k| (Gen::aff(k, 0), p.mul(sol[k], scale)))))
    }
}

/// Whether a finite-dimensional algebra has trivial center.
pub fn center_is_trivial(alg: &LieAlgebra) -> bool {
    let LieAlgebra::Finite(sc) = alg else {
        return false;
    };
    let p = sc.prime();
    let rows: Vec<Vec<u32>> = (0..sc.dim())
        .map(|k| sc.ad_matrix(&Lin::single(p, k, 1)).into_iter().flatten().collect())
        .collect();
    crate::linalg::left_kernel(p, &rows, sc.dim() * sc.dim()).is_empty()
}

pub(crate) fn format_combination(terms: impl Iterator<Item = (String, u32)>) -> String {
    let parts: Vec<String> = terms
        .map(|(n, c)| if c == 1 { n } else if n.is_empty() { c.to_string() } else { format!("{c}*{n}") })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Sample specification for [`verify_restricted_axioms`].
#[derive(Clone, Debug)]
pub struct RestrictedSample {
    /// Index window for generator pairs (ignored for finite algebras).
    pub window: (i64, i64),
    /// Number of random elements used for axioms (ii) and (iii).
    pub random_elements: usize,
    pub seed: u64,
}

/// Checks the three axioms of a restricted Lie algebra.
///
/// Axiom (i) runs on all generator pairs of the window. Axioms (ii) and (iii)
/// run on seeded random elements: (ii) through `ad` of the scaled element, and
/// (iii) by comparing the extended p-map with `(ad(a+b))^p` on the window and,
/// for finite algebras, with the adjoint solution of `ad y = (ad(a+b))^p`.
pub fn verify_restricted_axioms(alg: &LieAlgebra, sample: &RestrictedSample) -> Report {
    use rand::{Rng, SeedableRng};
    let p = alg.prime();
    let q = p.get();
    let (lo, hi) = sample.window;
    let gens: Vec<Gen> = alg.window_gens(lo, hi).into_iter().filter(|g| *g != Gen::Central).collect();
    let targets: Vec<LieElement> = alg.window_gens(lo, hi).into_iter().map(|g| Lin::single(p, g, 1)).collect();
    let window = format!("{lo}..={hi}");
    let mut ax1 = Check::new("axiom-i-generators").param("p", q).param("window", &window);
    let mut ax2 = Check::new("axiom-ii-scaling").param("p", q).param("window", &window);
    let mut ax3 = Check::new("axiom-iii-sums").param("p", q).param("window", &window);
    let mut ax3adj = Check::new("axiom-iii-adjoint").param("p", q);

    let check_one = |x: &LieElement, xp: &LieElement, check: &mut Check, label: &dyn Fn() -> String| {
        for t in &targets {
            let lhs = alg.ad_power(x, q, t);
            let rhs = alg.bracket_unchecked(xp, t);
            check.record(lhs == rhs, || format!("{} on {}", label(), alg.element_name(t)));
        }
    };

    for &g in &gens {
        match alg.p_map_gen(g) {
            Ok(gp) => {
                let x = Lin::single(p, g, 1);
                check_one(&x, &gp, &mut ax1, &|| format!("({})", alg.gen_name(g)));
            }
            Err(e) => ax1.record(false, || e.to_string()),
        }
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(sample.seed);
    let random_element = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut v = Lin::zero(p);
        let terms = rng.gen_range(1..=3.min(gens.len()));
        for _ in 0..terms {
            let g = gens[rng.gen_range(0..gens.len())];
            v.add_term(g, rng.gen_range(1..q));
        }
        if rng.gen_bool(0.3) && alg.has_central() {
            v.add_term(Gen::Central, rng.gen_range(1..q));
        }
        v
    };
    for _ in 0..sample.random_elements {
        let g = gens[rng.gen_range(0..gens.len())];
        let lambda = rng.gen_range(1..q);
        if let Ok(gp) = alg.p_map_gen(g) {
            let x = Lin::single(p, g, lambda);
            let xp = gp.scaled(p.pow(lambda, q as u64));
            check_one(&x, &xp, &mut ax2, &|| format!("{lambda}*{}", alg.gen_name(g)));
        }
        let a = random_element(&mut rng);
        let b = random_element(&mut rng);
        let sum = a.plus(&b);
        let (Ok(ap), Ok(bp)) = (alg.p_map(&a), alg.p_map(&b)) else {
            ax3.record(false, || "p-map unavailable".into());
            continue;
        };
        let mut claimed = ap.plus(&bp);
        for s in alg.s_terms(&a, &b) {
            claimed.add(&s);
        }
        let label = || format!("a={} b={}", alg.element_name(&a), alg.element_name(&b));
        check_one(&sum, &claimed, &mut ax3, &label);
        if let LieAlgebra::Finite(_) = alg {
            let strip = |v: &LieElement| v.filtered(|g| *g != Gen::Central);
            let independent = alg.p_map_from_adjoint(&strip(&sum));
            let ok = match &independent {
                Some(y) if center_is_trivial(alg) => *y == strip(&claimed),
                Some(_) => true,
                None => false,
            };
            ax3adj.record(ok, || format!("{} vs adjoint solution {:?}", label(), independent.map(|y| alg.element_name(&y))));
        }
    }
    let mut checks = vec![ax1.finish(), ax2.finish(), ax3.finish()];
    if matches!(alg, LieAlgebra::Finite(_)) {
        checks.push(ax3adj.finish());
    }
    Report::new("restricted", checks).param("algebra", alg).param("p", q)
}

/// Checks `D^(k)[x,y] = Σ_i [D^(k-i)x, D^(i)y]` on generator pairs of the window
/// for `k <= kmax`, and `D^(m) D^(n) = binom(m+n, n) D^(m+n)` on generators.
pub fn verify_b_module_lie(alg: &LieAlgebra, window: (i64, i64), kmax: u64) -> Report {
    let p = alg.prime();
    let gens = alg.window_gens(window.0, window.1);
    let mut compat = Check::new("hasse-bracket-compatibility").param("kmax", kmax);
    let mut compose = Check::new("hasse-composition").param("kmax", kmax);
    for &x in &gens {
        for &y in &gens {
            for k in 0..=kmax {
                let lhs = alg.hasse(k, &alg.bracket_gens(x, y));
                let mut rhs = Lin::zero(p);
                for i in 0..=k {
                    rhs.add(&alg.bracket_unchecked(&alg.hasse_gen(k - i, x), &alg.hasse_gen(i, y)));
                }
                compat.record(lhs == rhs, || format!("k={k} on ({}, {})", alg.gen_name(x), alg.gen_name(y)));
            }
        }
        for m in 0..=kmax {
            for n in 0..=kmax {
                let lhs = alg.hasse(m, &alg.hasse_gen(n, x));
                let rhs = alg.hasse_gen(m + n, x).scaled(p.binom((m + n) as i64, n as i64));
                compose.record(lhs == rhs, || format!("D^({m})D^({n}) on {}", alg.gen_name(x)));
            }
        }
    }
    Report::new("b-module", vec![compat.finish(), compose.finish()])
        .param("algebra", alg)
        .param("window", format!("{}..={}", window.0, window.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vir(q: u64) -> LieAlgebra {
        LieAlgebra::virasoro(Prime::new(q).unwrap())
    }

    fn l(p: Prime, n: i64) -> LieElement {
        Lin::single(p, Gen::vir(n), 1)
    }

    fn sl2_affine(q: u64) -> LieAlgebra {
        LieAlgebra::affine(StructureConstants::sl2(Prime::new(q).unwrap()))
    }

    #[test]
    fn virasoro_bracket_examples() {
        let alg = vir(3);
        let p = alg.prime();
        let b = alg.bracket(&l(p, 2), &l(p, -2)).unwrap();
        assert_eq!(b, Lin::from_terms(p, [(Gen::vir(0), 1), (Gen::Central, 2)]));
        for q in [3, 5, 7] {
            let alg = vir(q);
            let p = alg.prime();
            assert_eq!(alg.bracket(&l(p, 1), &l(p, -1)).unwrap(), l(p, 0).scaled(2));
            assert!(alg.bracket(&l(p, 4), &Lin::single(p, Gen::Central, 1)).unwrap().is_zero());
        }
    }

    #[test]
    fn mixed_primes_rejected() {
        let alg = vir(3);
        let other = l(Prime::new(5).unwrap(), 1);
        assert!(matches!(alg.bracket(&l(alg.prime(), 1), &other), Err(LieError::Scalar(_))));
    }

    #[test]
    fn affine_bracket_examples() {
        let alg = sl2_affine(5);
        let p = alg.prime();
        let (e, f, h) = (0, 1, 2);
        let b = alg.bracket_gens(Gen::aff(e, 1), Gen::aff(f, -1));
        assert_eq!(b, Lin::from_terms(p, [(Gen::aff(h, 0), 1), (Gen::Central, 1)]));
        for n in -3..4 {
            assert_eq!(alg.bracket_gens(Gen::aff(h, 0), Gen::aff(e, n)), Lin::single(p, Gen::aff(e, n), 2));
            assert!(alg.bracket_gens(Gen::aff(e, n), Gen::Central).is_zero());
        }
        assert!(alg.check_gen(Gen::aff(3, 0)).is_err());
    }

    #[test]
    fn p_map_examples() {
        let alg = vir(3);
        let p = alg.prime();
        assert_eq!(alg.p_map_gen(Gen::vir(3)).unwrap(), l(p, 9));
        assert!(alg.p_map_gen(Gen::vir(1)).unwrap().is_zero());
        assert_eq!(alg.p_map_gen(Gen::Central).unwrap(), Lin::single(p, Gen::Central, 1));
        let aff = sl2_affine(3);
        assert!(aff.p_map_gen(Gen::aff(0, 4)).unwrap().is_zero());
        assert_eq!(aff.p_map_gen(Gen::aff(2, -1)).unwrap(), Lin::single(p, Gen::aff(2, -3), 1));
    }

    #[test]
    fn hasse_examples() {
        let alg = vir(5);
        let p = alg.prime();
        assert_eq!(alg.hasse_gen(1, Gen::vir(-2)), l(p, -3));
        assert_eq!(alg.hasse(0, &l(p, 7)), l(p, 7));
        let aff = sl2_affine(5);
        assert_eq!(aff.hasse_gen(2, Gen::aff(0, -1)), Lin::single(p, Gen::aff(0, -3), 1));
        let d11 = alg.hasse(1, &alg.hasse_gen(1, Gen::vir(5)));
        assert_eq!(d11, alg.hasse_gen(2, Gen::vir(5)).scaled(2));
    }

    #[test]
    fn ad_power_examples() {
        let alg = vir(3);
        let p = alg.prime();
        assert!(alg.ad_power(&l(p, 1), 3, &l(p, 0)).is_zero());
        let lhs = alg.ad_power(&l(p, 3), 3, &l(p, 1));
        assert_eq!(lhs, l(p, 10).scaled(p.neg(1)));
        assert_eq!(lhs, alg.bracket(&l(p, 9), &l(p, 1)).unwrap());
        let fin = LieAlgebra::Finite(Arc::new(StructureConstants::sl2(p)));
        let e = Lin::single(p, Gen::aff(0, 0), 1);
        let f = Lin::single(p, Gen::aff(1, 0), 1);
        assert!(fin.ad_power(&e, 3, &f).is_zero());
    }

    #[test]
    fn closed_form_for_iterated_adjoint() {
        for q in [3i64, 5, 7] {
            let alg = vir(q as u64);
            let p = alg.prime();
            for m in -4..=4 {
                for n in -4..=4 {
                    let prod = (0..q).fold(1, |acc, i| p.mul(acc, p.reduce(-n - (i - 1) * m)));
                    let expect = l(p, q * m + n).scaled(prod);
                    assert_eq!(alg.ad_power(&l(p, m), q as u32, &l(p, n)), expect, "m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn sl2_validates_and_corruption_is_caught() {
        let p = Prime::new(3).unwrap();
        assert!(StructureConstants::sl2(p).validate().passed());
        let mut spec = sl2_spec(3);
        spec.p_map = Some(vec![PMapEntry { basis: 2, terms: vec![(0, 1)] }]);
        let sc = StructureConstants::from_spec_unchecked(&spec).unwrap();
        let r = sc.validate();
        let bad = r.failures().next().unwrap();
        assert_eq!(bad.name, "restricted-basis");
        assert!(bad.witness.as_ref().unwrap().contains("(ad h)^p e"));
        assert!(StructureConstants::from_spec(&spec).is_err());
    }

    #[test]
    fn broken_jacobi_is_rejected() {
        let spec = StructureSpec {
            p: 5,
            basis: vec!["x".into(), "y".into(), "z".into()],
            bracket: vec![
                BracketEntry { pair: (0, 1), terms: vec![(1, 1)] },
                BracketEntry { pair: (0, 2), terms: vec![(0, 1)] },
                BracketEntry { pair: (1, 2), terms: vec![(2, 1)] },
            ],
            form: vec![vec![0; 3]; 3],
            p_map: None,
        };
        assert!(matches!(StructureConstants::from_spec(&spec), Err(LieError::Structure(_))));
    }

    #[test]
    fn restricted_axioms_virasoro_and_sl2() {
        let sample = RestrictedSample { window: (-6, 6), random_elements: 10, seed: 1 };
        assert!(verify_restricted_axioms(&vir(3), &sample).passed());
        for q in [3, 5] {
            let p = Prime::new(q).unwrap();
            let fin = LieAlgebra::Finite(Arc::new(StructureConstants::sl2(p)));
            let r = verify_restricted_axioms(&fin, &RestrictedSample { window: (0, 0), random_elements: 30, seed: q });
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn b_module_structure() {
        for q in [3, 5] {
            assert!(verify_b_module_lie(&vir(q), (-5, 5), 4).passed());
            assert!(verify_b_module_lie(&sl2_affine(q), (-3, 3), 4).passed());
        }
        let alg = vir(5);
        let p = alg.prime();
        let lhs = alg.hasse(1, &alg.bracket_gens(Gen::vir(2), Gen::vir(-2)));
        let rhs = alg
            .bracket_unchecked(&alg.hasse_gen(1, Gen::vir(2)), &l(p, -2))
            .plus(&alg.bracket_unchecked(&l(p, 2), &alg.hasse_gen(1, Gen::vir(-2))));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_compatibility_is_the_first_binomial_identity() {
        let alg = vir(7);
        let p = alg.prime();
        for m in -6..=6 {
            for n in -6..=6 {
                for k in 0..=6 {
                    let lhs = alg.hasse(k, &alg.bracket_gens(Gen::vir(m), Gen::vir(n)));
                    let coeff = lhs.coeff(&Gen::vir(m + n - k as i64));
                    let expected = p.mul(p.sign(k as i64), crate::scalars::first_identity_sides(p, m, n, k as i64).0);
                    assert_eq!(coeff, expected);
                }
            }
        }
    }

    #[test]
    fn s_terms_vanish_for_commuting_pair() {
        let alg = vir(5);
        let p = alg.prime();
        let a = l(p, 2);
        for s in alg.s_terms(&a, &a.scaled(3)) {
            assert!(s.is_zero());
        }
    }
}
