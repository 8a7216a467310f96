//! Degree-truncated induced modules: vacuum modules, Verma modules and
//! generalized Verma modules, together with p-center ideals, quotients and
//! maximal graded submodules.
//!
//! A vector is a combination of [`ModKey`]s, each a PBW monomial of lowering
//! generators applied to a basis vector of the degree-zero space.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::enveloping::Monomial;
use crate::liealg::{Gen, LieAlgebra, LieElement, LieError, StructureConstants};
use crate::linalg::{left_kernel, mat_mul, Echelon, Lin};
use crate::scalars::Prime;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("result of degree {degree} exceeds the truncation degree {max}")]
    Overflow { degree: i64, max: usize },
    #[error("vector is not homogeneous")]
    NotHomogeneous,
    #[error("invalid degree-zero module: {0}")]
    InvalidTop(String),
    #[error("state is not a vacuum vector")]
    NotVacuum,
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// A lowering monomial applied to the `top`-th basis vector of degree zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModKey {
    pub mono: Monomial,
    pub top: u16,
}

impl ModKey {
    pub fn vacuum() -> ModKey {
        ModKey { mono: Monomial::one(), top: 0 }
    }

    pub fn degree(&self) -> i64 {
        self.mono.degree()
    }
}

pub type ModVec = Lin<ModKey>;

/// A finite-dimensional restricted module over `g`, given by the matrices of
/// the basis elements (column `j` is the image of the `j`-th basis vector).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopModule {
    dim: usize,
    action: Vec<Vec<Vec<u32>>>,
}

impl TopModule {
    /// Validates the bracket relations and the restricted relations
    /// `ρ(a)^p = ρ(a^{[p]})` on basis elements.
    pub fn new(sc: &StructureConstants, action: Vec<Vec<Vec<u32>>>) -> Result<TopModule, ModuleError> {
        let p = sc.prime();
        let n = sc.dim();
        if action.len() != n {
            return Err(ModuleError::InvalidTop(format!("expected {n} matrices")));
        }
        let dim = action.first().map_or(0, |m| m.len());
        if dim == 0 || action.iter().any(|m| m.len() != dim || m.iter().any(|r| r.len() != dim)) {
            return Err(ModuleError::InvalidTop("matrices must be square of a common positive size".into()));
        }
        let top = TopModule { dim, action };
        for i in 0..n {
            for j in 0..n {
                let lhs = sub_mat(p, &mat_mul(p, &top.action[i], &top.action[j]), &mat_mul(p, &top.action[j], &top.action[i]));
                let rhs = top.matrix_of(p, sc.bracket_basis(i, j));
                if lhs != rhs {
                    return Err(ModuleError::InvalidTop(format!(
                        "[{}, {}] is not represented by the commutator",
                        sc.names()[i],
                        sc.names()[j]
                    )));
                }
            }
            if let Some(pm) = sc.p_map_basis(i) {
                let pow = (0..p.get()).fold(crate::linalg::identity(dim), |acc, _| mat_mul(p, &top.action[i], &acc));
                if pow != top.matrix_of(p, pm) {
                    return Err(ModuleError::InvalidTop(format!("{}^p differs from its p-map", sc.names()[i])));
                }
            }
        }
        Ok(top)
    }

    /// The one-dimensional trivial module.
    pub fn trivial(sc: &StructureConstants) -> TopModule {
        TopModule { dim: 1, action: vec![vec![vec![0]]; sc.dim()] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, base: usize) -> &[Vec<u32>] {
        &self.action[base]
    }

    fn matrix_of(&self, p: Prime, combo: &[(usize, u32)]) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0; self.dim]; self.dim];
        for &(k, c) in combo {
            for (r, row) in m.iter_mut().enumerate() {
                for (s, x) in row.iter_mut().enumerate() {
                    *x = p.add(*x, p.mul(c, self.action[k][r][s]));
                }
            }
        }
        m
    }
}

fn sub_mat(p: Prime, a: &[Vec<u32>], b: &[Vec<u32>]) -> Vec<Vec<u32>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| p.sub(*u, *v)).collect()).collect()
}

/// The degree-zero data of an induced module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Top {
    /// The vacuum: everything of index at least `-1` (Virasoro) or `0` (affine)
    /// kills the generating vector.
    Vacuum,
    /// The Virasoro Verma module with `L(0)` acting by the given scalar.
    Verma(u32),
    /// The generalized Verma module over a finite module of `g`.
    Module(TopModule),
}

/// An induced module of the Virasoro or an affine algebra with the central
/// element acting by a fixed scalar, truncated at `max_degree`.
pub struct InducedModule {
    alg: LieAlgebra,
    central: u32,
    top: Top,
    max_degree: usize,
    act_cache: RefCell<HashMap<(Gen, ModKey), ModVec>>,
    mode_cache: RefCell<HashMap<(Monomial, i64, ModKey), ModVec>>,
    bases: RefCell<Vec<Arc<GradedPiece>>>,
}

/// The PBW basis of one degree and its index map.
#[derive(Debug)]
pub struct GradedPiece {
    pub keys: Vec<ModKey>,
    pub index: HashMap<ModKey, usize>,
}

impl fmt::Debug for InducedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InducedModule({}, central={}, top={:?}, N={})", self.alg, self.central, self.top, self.max_degree)
    }
}

impl InducedModule {
    pub fn new(alg: LieAlgebra, central: u32, top: Top, max_degree: usize) -> Result<InducedModule, ModuleError> {
        match (&alg, &top) {
            (LieAlgebra::Finite(_), _) => return Err(ModuleError::InvalidTop("finite algebras have no induced modules".into())),
            (LieAlgebra::Virasoro(_), Top::Module(_)) => {
                return Err(ModuleError::InvalidTop("Virasoro modules take a scalar weight".into()))
            }
            (LieAlgebra::Affine(_), Top::Verma(_)) => {
                return Err(ModuleError::InvalidTop("affine modules take a module of g".into()))
            }
            (LieAlgebra::Affine(sc), Top::Module(t)) if t.action.len() != sc.dim() => {
                return Err(ModuleError::InvalidTop("module does not match the algebra".into()))
            }
            _ => {}
        }
        let central = central % alg.prime().get();
        Ok(InducedModule {
            alg,
            central,
            top,
            max_degree,
            act_cache: RefCell::new(HashMap::new()),
            mode_cache: RefCell::new(HashMap::new()),
            bases: RefCell::new(Vec::new()),
        })
    }

    /// `V_Vir(c, 0)`.
    pub fn virasoro_vacuum(p: Prime, c: u32, max_degree: usize) -> InducedModule {
        InducedModule::new(LieAlgebra::virasoro(p), c, Top::Vacuum, max_degree).expect("valid")
    }

    /// `M_Vir(c, λ)`.
    pub fn virasoro_verma(p: Prime, c: u32, lambda: u32, max_degree: usize) -> InducedModule {
        InducedModule::new(LieAlgebra::virasoro(p), c, Top::Verma(lambda % p.get()), max_degree).expect("valid")
    }

    /// `V_ĝ(ℓ, 0)`.
    pub fn affine_vacuum(sc: Arc<StructureConstants>, level: u32, max_degree: usize) -> InducedModule {
        InducedModule::new(LieAlgebra::Affine(sc), level, Top::Vacuum, max_degree).expect("valid")
    }

    /// `M_ĝ(ℓ, U)`.
    pub fn affine_generalized_verma(
        sc: Arc<StructureConstants>,
        level: u32,
        top: TopModule,
        max_degree: usize,
    ) -> Result<InducedModule, ModuleError> {
        InducedModule::new(LieAlgebra::Affine(sc), level, Top::Module(top), max_degree)
    }

    /// The same module with a different truncation degree.
    pub fn with_max_degree(&self, max_degree: usize) -> InducedModule {
        InducedModule::new(self.alg.clone(), self.central, self.top.clone(), max_degree).expect("valid")
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }

    pub fn prime(&self) -> Prime {
        self.alg.prime()
    }

    pub fn central(&self) -> u32 {
        self.central
    }

    pub fn top(&self) -> &Top {
        &self.top
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn is_vacuum(&self) -> bool {
        self.top == Top::Vacuum
    }

    pub fn top_dim(&self) -> usize {
        match &self.top {
            Top::Module(t) => t.dim,
            _ => 1,
        }
    }

    /// Whether `g` is one of the free lowering generators of this module.
    pub fn is_lowering(&self, g: Gen) -> bool {
        match g {
            Gen::Central => false,
            Gen::Mode { index, .. } => match (&self.alg, &self.top) {
                (LieAlgebra::Virasoro(_), Top::Vacuum) => index <= -2,
                _ => index <= -1,
            },
        }
    }

    /// Smallest degree of a lowering generator.
    pub fn min_lowering_degree(&self) -> usize {
        match (&self.alg, &self.top) {
            (LieAlgebra::Virasoro(_), Top::Vacuum) => 2,
            _ => 1,
        }
    }

    /// Generators whose modes raise degree and generate all raising modes:
    /// `L(1), L(2)` or `a(1), a(2)` for every basis element `a`.
    pub fn raising_generators(&self) -> Vec<Gen> {
        (1..=2).flat_map(|n| (0..self.alg.base_dim()).map(move |b| Gen::aff(b, n))).collect()
    }

    pub fn one(&self) -> ModVec {
        self.key_vec(ModKey::vacuum())
    }

    /// The `i`-th basis vector of degree zero.
    pub fn top_vector(&self, i: usize) -> ModVec {
        self.key_vec(ModKey { mono: Monomial::one(), top: i as u16 })
    }

    pub fn key_vec(&self, k: ModKey) -> ModVec {
        Lin::single(self.prime(), k, 1)
    }

    pub fn key_name(&self, k: &ModKey) -> String {
        let top = match &self.top {
            Top::Vacuum => "1".to_string(),
            Top::Verma(_) => "v".to_string(),
            Top::Module(_) => format!("u{}", k.top),
        };
        if k.mono.is_one() {
            top
        } else {
            format!("{}*{top}", k.mono.name(&self.alg))
        }
    }

    pub fn vec_name(&self, v: &ModVec) -> String {
        crate::liealg::format_combination(v.iter().map(|(k, c)| (self.key_name(k), c)))
    }

    /// The action of a generator on the degree-zero space.
    fn top_action(&self, g: Gen, top: u16) -> ModVec {
        let p = self.prime();
        let mut r = Lin::zero(p);
        match (g, &self.top) {
            (Gen::Central, _) => r.add_term(ModKey { mono: Monomial::one(), top }, self.central),
            (Gen::Mode { index: 0, .. }, Top::Verma(l)) => r.add_term(ModKey { mono: Monomial::one(), top }, *l),
            (Gen::Mode { index: 0, base }, Top::Module(t)) => {
                for (i, row) in t.action[base as usize].iter().enumerate() {
                    r.add_term(ModKey { mono: Monomial::one(), top: i as u16 }, row[top as usize]);
                }
            }
            _ => {}
        }
        r
    }

    /// `g` applied to a basis vector, with no truncation check.
    pub fn act_key(&self, g: Gen, k: &ModKey) -> ModVec {
        let p = self.prime();
        if g == Gen::Central {
            return Lin::single(p, k.clone(), self.central);
        }
        let lowering = self.is_lowering(g);
        let x1 = match k.mono.first() {
            None if lowering => return Lin::single(p, ModKey { mono: Monomial::gen(g), top: k.top }, 1),
            None => return self.top_action(g, k.top),
            Some(x1) if lowering && g <= x1 => {
                return Lin::single(p, ModKey { mono: k.mono.prepend(g), top: k.top }, 1)
            }
            Some(x1) => x1,
        };
        let key = (g, k.clone());
        if let Some(v) = self.act_cache.borrow().get(&key) {
            return v.clone();
        }
        // g x1 w = x1 (g w) + [g, x1] w
        let rest = ModKey { mono: k.mono.without_first(), top: k.top };
        let inner = self.act_key(g, &rest);
        let mut r = inner.map_linear(|kk| self.act_key(x1, kk));
        for (h, c) in self.alg.bracket_gens(g, x1).iter() {
            r.add_scaled(&self.act_key(*h, &rest), c);
        }
        self.act_cache.borrow_mut().insert(key, r.clone());
        r
    }

    /// `g` applied to a vector, with no truncation check.
    pub fn act_raw(&self, g: Gen, v: &ModVec) -> ModVec {
        v.map_linear(|k| self.act_key(g, k))
    }

    /// A Lie element applied to a vector, with no truncation check.
    pub fn act_lie_raw(&self, x: &LieElement, v: &ModVec) -> ModVec {
        let mut r = Lin::zero(self.prime());
        for (g, c) in x.iter() {
            r.add_scaled(&self.act_raw(*g, v), c);
        }
        r
    }

    /// Applies a word of generators, rightmost first.
    pub fn act_word_raw(&self, word: &[Gen], v: &ModVec) -> ModVec {
        word.iter().rev().fold(v.clone(), |acc, g| self.act_raw(*g, &acc))
    }

    fn check_degree(&self, v: &ModVec) -> Result<(), ModuleError> {
        match v.keys().map(|k| k.degree()).max() {
            Some(d) if d > self.max_degree as i64 => Err(ModuleError::Overflow { degree: d, max: self.max_degree }),
            _ => Ok(()),
        }
    }

    /// `g·v`, failing when the result leaves the truncation.
    pub fn act(&self, g: Gen, v: &ModVec) -> Result<ModVec, ModuleError> {
        self.alg.check_gen(g)?;
        if let Some(d) = v.keys().map(|k| k.degree() + g.degree()).max() {
            if d > self.max_degree as i64 {
                return Err(ModuleError::Overflow { degree: d, max: self.max_degree });
            }
        }
        Ok(self.act_raw(g, v))
    }

    pub fn act_word(&self, word: &[Gen], v: &ModVec) -> Result<ModVec, ModuleError> {
        word.iter().rev().try_fold(v.clone(), |acc, g| self.act(*g, &acc))
    }

    /// The degree of a homogeneous vector; `None` for zero.
    pub fn degree_of(&self, v: &ModVec) -> Result<Option<usize>, ModuleError> {
        let mut it = v.keys().map(|k| k.degree());
        let Some(d) = it.next() else {
            return Ok(None);
        };
        if it.any(|e| e != d) {
            return Err(ModuleError::NotHomogeneous);
        }
        Ok(Some(d as usize))
    }

    pub fn component(&self, v: &ModVec, d: usize) -> ModVec {
        v.filtered(|k| k.degree() == d as i64)
    }

    /// The PBW basis in degree `d`; free of truncation limits.
    pub fn basis(&self, d: usize) -> Arc<GradedPiece> {
        {
            let b = self.bases.borrow();
            if let Some(x) = b.get(d) {
                return x.clone();
            }
        }
        let have = self.bases.borrow().len();
        for e in have..=d {
            let keys = self.enumerate(e);
            let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
            self.bases.borrow_mut().push(Arc::new(GradedPiece { keys, index }));
        }
        self.bases.borrow()[d].clone()
    }

    pub fn dim(&self, d: usize) -> usize {
        self.basis(d).keys.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.max_degree).map(|d| self.dim(d)).collect()
    }

    fn enumerate(&self, d: usize) -> Vec<ModKey> {
        let lo = self.min_lowering_degree();
        let mut gens: Vec<Gen> = Vec::new();
        for n in (lo..=d.max(lo)).rev() {
            if n > d {
                continue;
            }
            for b in 0..self.alg.base_dim() {
                gens.push(Gen::aff(b, -(n as i64)));
            }
        }
        gens.sort();
        let mut monos = Vec::new();
        fn go(gens: &[Gen], left: i64, cur: &mut Vec<(Gen, u32)>, out: &mut Vec<Monomial>) {
            if left == 0 {
                out.push(Monomial::from_factors(cur.clone()));
                return;
            }
            let Some((&g, rest)) = gens.split_first() else {
                return;
            };
            let dg = g.degree();
            let mut e = 0u32;
            while dg * e as i64 <= left {
                if e > 0 {
                    cur.push((g, e));
                }
                go(rest, left - dg * e as i64, cur, out);
                if e > 0 {
                    cur.pop();
                }
                e += 1;
            }
        }
        go(&gens, d as i64, &mut Vec::new(), &mut monos);
        monos.sort();
        let mut keys = Vec::new();
        for t in 0..self.top_dim() {
            for m in &monos {
                keys.push(ModKey { mono: m.clone(), top: t as u16 });
            }
        }
        keys
    }

    /// Coordinates of a vector's degree-`d` component in the PBW basis.
    pub fn coords(&self, v: &ModVec, d: usize) -> Vec<u32> {
        let piece = self.basis(d);
        let mut out = vec![0; piece.keys.len()];
        for (k, c) in v.iter() {
            if k.degree() == d as i64 {
                out[piece.index[k]] = c;
            }
        }
        out
    }

    pub fn from_coords(&self, d: usize, x: &[u32]) -> ModVec {
        let piece = self.basis(d);
        Lin::from_terms(self.prime(), piece.keys.iter().cloned().zip(x.iter().copied()))
    }

    /// Vertex-operator mode `(S 1)_m` of a vacuum monomial `S` on a basis
    /// vector, via the iterate formula on the leading factor of `S`.
    pub fn mode_key(&self, state: &Monomial, m: i64, w: &ModKey) -> ModVec {
        let p = self.prime();
        let Some(g) = state.first() else {
            return if m == -1 { Lin::single(p, w.clone(), 1) } else { Lin::zero(p) };
        };
        let deg_w = w.degree();
        if state.degree() + deg_w - m - 1 < 0 {
            return Lin::zero(p);
        }
        let key = (state.clone(), m, w.clone());
        if let Some(v) = self.mode_cache.borrow().get(&key) {
            return v.clone();
        }
        let u = state.without_first();
        let deg_u = u.degree();
        let (q, deg_a) = match g {
            Gen::Mode { index, .. } if self.alg.is_virasoro() => (index + 1, 2),
            Gen::Mode { index, .. } => (index, 1),
            Gen::Central => unreachable!("states carry no central factor"),
        };
        let a = |j: i64| match g {
            Gen::Mode { .. } if self.alg.is_virasoro() => Gen::vir(j - 1),
            Gen::Mode { base, .. } => Gen::aff(base as usize, j),
            Gen::Central => unreachable!(),
        };
        let wv = Lin::single(p, w.clone(), 1);
        let mut r = Lin::zero(p);
        for i in 0..=(deg_u + deg_w - m - 1).max(-1) {
            let c = p.mul(p.sign(i), p.binom(q, i));
            if c == 0 {
                continue;
            }
            let inner = self.mode_key(&u, m + i, w);
            r.add_scaled(&self.act_raw(a(q - i), &inner), c);
        }
        let sq = p.sign(q);
        for i in 0..=(deg_w + deg_a - 1).max(-1) {
            let c = p.neg(p.mul(sq, p.mul(p.sign(i), p.binom(q, i))));
            if c == 0 {
                continue;
            }
            let inner = self.act_raw(a(i), &wv);
            r.add_scaled(&inner.map_linear(|k| self.mode_key(&u, q + m - i, k)), c);
        }
        self.mode_cache.borrow_mut().insert(key, r.clone());
        r
    }

    /// `v_m w` for a vacuum vector `v` (keys of `v` must have top index 0 and
    /// only vacuum lowering factors), with no truncation check.
    pub fn mode_raw(&self, v: &ModVec, m: i64, w: &ModVec) -> ModVec {
        let mut r = Lin::zero(self.prime());
        for (s, c) in v.iter() {
            r.add_scaled(&w.map_linear(|k| self.mode_key(&s.mono, m, k)), c);
        }
        r
    }

    pub fn is_vacuum_state(&self, v: &ModVec) -> bool {
        let lo = match self.alg {
            LieAlgebra::Virasoro(_) => 2,
            _ => 1,
        };
        v.keys().all(|k| k.top == 0 && k.mono.factors().iter().all(|(g, _)| g.degree() >= lo))
    }

    /// `v_m w`, failing when the result leaves the truncation.
    pub fn mode(&self, v: &ModVec, m: i64, w: &ModVec) -> Result<ModVec, ModuleError> {
        if !self.is_vacuum_state(v) {
            return Err(ModuleError::NotVacuum);
        }
        let dv = v.keys().map(|k| k.degree()).max();
        let dw = w.keys().map(|k| k.degree()).max();
        if let (Some(a), Some(b)) = (dv, dw) {
            if a + b - m - 1 > self.max_degree as i64 {
                return Err(ModuleError::Overflow { degree: a + b - m - 1, max: self.max_degree });
            }
        }
        let r = self.mode_raw(v, m, w);
        self.check_degree(&r)?;
        Ok(r)
    }

    /// `D^(k) v = v_{-k-1} 1` on the vacuum module.
    pub fn d_operator(&self, k: u64, v: &ModVec) -> Result<ModVec, ModuleError> {
        if !self.is_vacuum() {
            return Err(ModuleError::NotVacuum);
        }
        self.mode(v, -(k as i64) - 1, &self.one())
    }

    pub fn d_operator_raw(&self, k: u64, v: &ModVec) -> ModVec {
        self.mode_raw(v, -(k as i64) - 1, &self.one())
    }

    /// Whether every raising generator kills `v`; for a homogeneous `v` this is
    /// membership in `Ω`.
    pub fn is_singular(&self, v: &ModVec) -> Result<bool, ModuleError> {
        self.degree_of(v)?;
        Ok(self.raising_generators().iter().all(|g| self.act_raw(*g, v).is_zero()))
    }
}

/// Per-degree subspaces of a graded module, stored in reduced echelon form.
#[derive(Clone, Debug)]
pub struct GradedSubspace {
    p: Prime,
    pieces: Vec<Echelon>,
}

impl GradedSubspace {
    pub fn zero(m: &InducedModule) -> GradedSubspace {
        GradedSubspace { p: m.prime(), pieces: (0..=m.max_degree()).map(|d| Echelon::new(m.prime(), m.dim(d))).collect() }
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.len() - 1
    }

    pub fn piece(&self, d: usize) -> &Echelon {
        &self.pieces[d]
    }

    pub fn dim(&self, d: usize) -> usize {
        self.pieces.get(d).map_or(0, |e| e.rank())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(|e| e.rank()).collect()
    }

    /// Adds every homogeneous component of `v` lying within the truncation.
    pub fn insert(&mut self, m: &InducedModule, v: &ModVec) {
        for d in 0..self.pieces.len() {
            let x = m.coords(v, d);
            if x.iter().any(|&c| c != 0) {
                self.pieces[d].insert(&x);
            }
        }
    }

    /// Whether every component of `v` lies in the subspace. Components above
    /// the truncation are rejected.
    pub fn contains(&self, m: &InducedModule, v: &ModVec) -> bool {
        if v.keys().any(|k| k.degree() as usize >= self.pieces.len()) {
            return false;
        }
        (0..self.pieces.len()).all(|d| self.pieces[d].contains(&m.coords(v, d)))
    }

    /// Canonical representative of `v` modulo the subspace.
    pub fn reduce(&self, m: &InducedModule, v: &ModVec) -> ModVec {
        let mut r = Lin::zero(self.p);
        for d in 0..self.pieces.len() {
            let x = m.coords(v, d);
            if x.iter().any(|&c| c != 0) {
                r.add(&m.from_coords(d, &self.pieces[d].reduce(&x)));
            }
        }
        r.add(&v.filtered(|k| k.degree() as usize >= self.pieces.len()));
        r
    }

    pub fn is_subspace_of(&self, other: &GradedSubspace) -> bool {
        self.pieces.iter().zip(&other.pieces).all(|(a, b)| a.rows().iter().all(|r| b.contains(r)))
    }

    pub fn sum(&self, other: &GradedSubspace) -> GradedSubspace {
        let mut r = self.clone();
        for (a, b) in r.pieces.iter_mut().zip(&other.pieces) {
            for row in b.rows() {
                a.insert(row);
            }
        }
        r
    }

    /// The basis vectors of degree `d` as module vectors.
    pub fn basis_vectors(&self, m: &InducedModule, d: usize) -> Vec<ModVec> {
        self.pieces[d].rows().iter().map(|r| m.from_coords(d, r)).collect()
    }
}

/// The p-center ideals `I_μ` (Virasoro) and `J_χ` (affine).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealFamily {
    Virasoro { mu: u32 },
    Affine { chi: Vec<u32> },
}

impl IdealFamily {
    pub fn zero(alg: &LieAlgebra) -> IdealFamily {
        match alg {
            LieAlgebra::Virasoro(_) => IdealFamily::Virasoro { mu: 0 },
            _ => IdealFamily::Affine { chi: vec![0; alg.base_dim()] },
        }
    }

    pub fn is_graded(&self) -> bool {
        match self {
            IdealFamily::Virasoro { mu } => *mu == 0,
            IdealFamily::Affine { chi } => chi.iter().all(|&c| c == 0),
        }
    }
}

/// A generator of a p-center ideal: `Σ c·word` applied to the vacuum, minus a
/// scalar multiple of the vacuum.
#[derive(Clone, Debug)]
pub struct PCenterGenerator {
    pub degree: usize,
    pub words: Vec<(Vec<Gen>, u32)>,
    pub scalar: u32,
    pub label: String,
}

impl PCenterGenerator {
    /// `z·v`, using that `z` is central.
    pub fn apply(&self, m: &InducedModule, v: &ModVec) -> ModVec {
        let p = m.prime();
        let mut r = v.scaled(p.neg(self.scalar));
        for (w, c) in &self.words {
            r.add_scaled(&m.act_word_raw(w, v), *c);
        }
        r
    }
}

/// The p-center generators of top degree at most `dmax`. Basis elements
/// suffice: `a ↦ a^p − a^{[p]}` is p-semilinear, and so is `χ(a)^p`.
pub fn pcenter_generators(alg: &LieAlgebra, fam: &IdealFamily, dmax: usize) -> Result<Vec<PCenterGenerator>, LieError> {
    let p = alg.prime();
    let q = p.get() as usize;
    let mut out = Vec::new();
    match (alg, fam) {
        (LieAlgebra::Virasoro(_), IdealFamily::Virasoro { mu }) => {
            for n in 2..=dmax / q {
                let mut words = vec![(vec![Gen::vir(-(n as i64)); q], 1)];
                if n % q == 0 {
                    words.push((vec![Gen::vir(-((n * q) as i64))], p.neg(1)));
                }
                let scalar = if n == 2 { p.pow(*mu, q as u64) } else { 0 };
                out.push(PCenterGenerator { degree: n * q, words, scalar, label: format!("L(-{n})^{q} - L(-{n})^[p]") });
            }
        }
        (LieAlgebra::Affine(sc), IdealFamily::Affine { chi }) => {
            for m in 1..=dmax / q {
                for b in 0..sc.dim() {
                    let g = Gen::aff(b, -(m as i64));
                    let mut words = vec![(vec![g; q], 1)];
                    for (h, c) in alg.p_map_gen(g)?.iter() {
                        words.push((vec![*h], p.neg(c)));
                    }
                    let scalar = if m == 1 { p.pow(chi.get(b).copied().unwrap_or(0) % p.get(), q as u64) } else { 0 };
                    let name = &sc.names()[b];
                    out.push(PCenterGenerator {
                        degree: m * q,
                        words,
                        scalar,
                        label: format!("{name}(-{m})^{q} - {name}^[p](-{})", m * q),
                    });
                }
            }
        }
        _ => return Err(LieError::Structure("ideal family does not match the algebra".into())),
    }
    Ok(out)
}

/// The graded ideal `I_0` or `J_0` through the truncation degree, computed as
/// `span{z·u}` over p-center generators `z` and PBW basis vectors `u`.
pub fn ideal_graded_span(m: &InducedModule, fam: &IdealFamily) -> Result<GradedSubspace, ModuleError> {
    if !fam.is_graded() {
        return Err(ModuleError::InvalidTop("the ideal is not graded for a nonzero parameter".into()));
    }
    let gens = pcenter_generators(m.algebra(), fam, m.max_degree())?;
    let mut s = GradedSubspace::zero(m);
    for z in &gens {
        for d in z.degree..=m.max_degree() {
            for k in m.basis(d - z.degree).keys.iter() {
                s.insert(m, &z.apply(m, &m.key_vec(k.clone())));
            }
        }
    }
    Ok(s)
}

/// Dimensions of `I ∩ V_{≤d}` for `d ≤ N`, valid for any parameter; for a
/// nonzero parameter the ideal is only filtered.
pub fn ideal_filtration_dims(m: &InducedModule, fam: &IdealFamily) -> Result<Vec<usize>, ModuleError> {
    let gens = pcenter_generators(m.algebra(), fam, m.max_degree())?;
    let n = m.max_degree();
    let offsets: Vec<usize> = (0..=n).scan(0, |acc, d| {
        let o = *acc;
        *acc += m.dim(d);
        Some(o)
    }).collect();
    let total = offsets[n] + m.dim(n);
    let mut e = Echelon::new(m.prime(), total);
    let mut dims = vec![0; n + 1];
    for d in 0..=n {
        for z in gens.iter().filter(|z| z.degree <= d) {
            for k in m.basis(d - z.degree).keys.iter() {
                let v = z.apply(m, &m.key_vec(k.clone()));
                let mut x = vec![0; total];
                for e2 in 0..=d {
                    for (i, c) in m.coords(&v, e2).into_iter().enumerate() {
                        x[offsets[e2] + i] = c;
                    }
                }
                e.insert(&x);
            }
        }
        dims[d] = e.rank();
    }
    Ok(dims)
}

/// The maximal graded submodule meeting degree zero trivially, through the
/// truncation degree.
///
/// Degree `d` consists of the vectors sent into degree `d − n` of the radical
/// by every raising generator of degree `n`. The raising generators generate all
/// raising modes, so this is the common kernel of all pure raising monomials,
/// and lowering or zero modes cannot bring a vector back to degree zero.
pub fn raising_radical(m: &InducedModule) -> GradedSubspace {
    let p = m.prime();
    let gens = m.raising_generators();
    let mut rad = GradedSubspace::zero(m);
    for d in 1..=m.max_degree() {
        let basis = m.basis(d);
        let targets: Vec<(Gen, usize)> =
            gens.iter().filter(|g| -g.degree() as usize <= d).map(|g| (*g, (d as i64 + g.degree()) as usize)).collect();
        let mut rows = Vec::with_capacity(basis.keys.len());
        for k in &basis.keys {
            let mut row = Vec::new();
            for &(g, t) in &targets {
                let img = m.act_key(g, k);
                let red = rad.pieces[t].reduce(&m.coords(&img, t));
                row.extend(red);
            }
            rows.push(row);
        }
        let ncols = rows.first().map_or(0, |r| r.len());
        for v in left_kernel(p, &rows, ncols) {
            rad.pieces[d].insert(&v);
        }
    }
    rad
}

/// A graded module modulo a graded subspace.
pub struct QuotientModule<'a> {
    pub module: &'a InducedModule,
    pub sub: GradedSubspace,
}

impl<'a> QuotientModule<'a> {
    pub fn new(module: &'a InducedModule, sub: GradedSubspace) -> QuotientModule<'a> {
        QuotientModule { module, sub }
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.module.max_degree()).map(|d| self.module.dim(d) - self.sub.dim(d)).collect()
    }

    pub fn reduce(&self, v: &ModVec) -> ModVec {
        self.sub.reduce(self.module, v)
    }

    pub fn is_zero(&self, v: &ModVec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn act(&self, g: Gen, v: &ModVec) -> Result<ModVec, ModuleError> {
        Ok(self.reduce(&self.module.act(g, v)?))
    }

    pub fn mode(&self, v: &ModVec, n: i64, w: &ModVec) -> Result<ModVec, ModuleError> {
        Ok(self.reduce(&self.module.mode(v, n, w)?))
    }
}

/// `L_Vir(c, λ)` or `L_ĝ(ℓ, U)` through degree `N`: the induced module and its
/// raising radical.
pub fn build_graded_module(m: &InducedModule) -> QuotientModule<'_> {
    QuotientModule::new(m, raising_radical(m))
}

/// The submodule generated by `seeds` through the truncation degree, by closing
/// under every generator with index in `[-N, N]`.
pub fn submodule_closure(m: &InducedModule, seeds: &[ModVec]) -> GradedSubspace {
    let n = m.max_degree() as i64;
    let mut s = GradedSubspace::zero(m);
    let mut frontier: Vec<ModVec> = Vec::new();
    for v in seeds {
        for d in 0..=m.max_degree() {
            let c = m.component(v, d);
            if !c.is_zero() && !s.contains(m, &c) {
                s.insert(m, &c);
                frontier.push(c);
            }
        }
    }
    let gens = m.algebra().window_gens(-n, n);
    while let Some(v) = frontier.pop() {
        for g in &gens {
            if let Ok(w) = m.act(*g, &v) {
                if !w.is_zero() && !s.contains(m, &w) {
                    s.insert(m, &w);
                    frontier.push(w);
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: u64) -> Prime {
        Prime::new(q).unwrap()
    }

    fn sl2(q: u64) -> Arc<StructureConstants> {
        Arc::new(StructureConstants::sl2(p(q)))
    }

    fn partitions_min2(n: usize) -> usize {
        fn count(n: usize, min: usize) -> usize {
            if n == 0 {
                return 1;
            }
            (min..=n).map(|k| count(n - k, k)).sum()
        }
        count(n, 2)
    }

    #[test]
    fn virasoro_vacuum_dims() {
        let v = InducedModule::virasoro_vacuum(p(3), 0, 8);
        assert_eq!(v.dims(), vec![1, 0, 1, 1, 2, 2, 4, 4, 7]);
        for d in 0..=12 {
            assert_eq!(v.dim(d), partitions_min2(d));
        }
        let a = InducedModule::affine_vacuum(sl2(3), 1, 3);
        assert_eq!(a.dims(), vec![1, 3, 9, 22]);
    }

    #[test]
    fn act_examples() {
        let pr = p(3);
        for c in 0..3 {
            let v = InducedModule::virasoro_vacuum(pr, c, 6);
            let w = v.act(Gen::vir(-2), &v.one()).unwrap();
            let r = v.act(Gen::vir(2), &w).unwrap();
            assert_eq!(r, v.one().scaled(pr.mul(2, c)));
            assert!(v.act(Gen::vir(-1), &v.one()).unwrap().is_zero());
        }
        let a = InducedModule::affine_vacuum(sl2(3), 1, 3);
        let e1 = a.act(Gen::aff(0, -1), &a.one()).unwrap();
        assert_eq!(a.act(Gen::aff(2, 0), &e1).unwrap(), e1.scaled(2));
        let v = InducedModule::virasoro_vacuum(pr, 0, 3);
        assert!(matches!(v.act(Gen::vir(-4), &v.one()), Err(ModuleError::Overflow { .. })));
    }

    #[test]
    fn singular_affine_vector() {
        for l in 0..3u32 {
            let a = InducedModule::affine_vacuum(sl2(3), l, 4);
            let v = a.act_word(&vec![Gen::aff(0, -1); l as usize + 1], &a.one()).unwrap();
            assert!(a.is_singular(&v).unwrap(), "level {l}");
            assert!(a.act(Gen::aff(0, 0), &v).unwrap().is_zero());
            let j = raising_radical(&a);
            assert!(j.contains(&a, &v));
            assert_eq!(j.dim(0), 0);
        }
        let a = InducedModule::affine_vacuum(sl2(3), 1, 2);
        let e = a.act(Gen::aff(0, -1), &a.one()).unwrap();
        let ee = a.act(Gen::aff(0, -1), &e).unwrap();
        // f(1) e(-1)^2 1 = (2ℓ - 2) e(-1) 1
        assert!(a.act(Gen::aff(1, 1), &ee).unwrap().is_zero());
        let a5 = InducedModule::affine_vacuum(sl2(5), 3, 2);
        let e = a5.act(Gen::aff(0, -1), &a5.one()).unwrap();
        let ee = a5.act(Gen::aff(0, -1), &e).unwrap();
        assert_eq!(a5.act(Gen::aff(1, 1), &ee).unwrap(), e.scaled(4));
    }

    #[test]
    fn omega_examples() {
        let v = InducedModule::virasoro_vacuum(p(5), 1, 4);
        assert!(v.is_singular(&v.one()).unwrap());
        let w = v.act(Gen::vir(-2), &v.one()).unwrap();
        assert!(!v.is_singular(&w).unwrap());
        assert!(matches!(v.is_singular(&w.plus(&v.one())), Err(ModuleError::NotHomogeneous)));
    }

    #[test]
    fn virasoro_ideal() {
        let v = InducedModule::virasoro_vacuum(p(3), 1, 8);
        let i0 = ideal_graded_span(&v, &IdealFamily::Virasoro { mu: 0 }).unwrap();
        assert_eq!(i0.dims(), vec![0, 0, 0, 0, 0, 0, 1, 0, 1]);
        let z = v.act_word(&[Gen::vir(-2); 3], &v.one()).unwrap();
        assert!(i0.contains(&v, &z));
        let q = QuotientModule::new(&v, i0.clone());
        assert_eq!(q.dims()[6], 3);
        assert!(q.is_zero(&z));
        let fil = ideal_filtration_dims(&v, &IdealFamily::Virasoro { mu: 1 }).unwrap();
        assert_eq!(fil, vec![0, 0, 0, 0, 0, 0, 1, 1, 2]);
        assert!(ideal_graded_span(&v, &IdealFamily::Virasoro { mu: 2 }).is_err());
    }

    #[test]
    fn ideal_is_a_submodule() {
        let v = InducedModule::virasoro_vacuum(p(3), 2, 9);
        let i0 = ideal_graded_span(&v, &IdealFamily::Virasoro { mu: 0 }).unwrap();
        for d in 0..=9 {
            for b in i0.basis_vectors(&v, d) {
                for n in -3..=3 {
                    if let Ok(w) = v.act(Gen::vir(n), &b) {
                        assert!(i0.contains(&v, &w), "L({n}) on degree {d}");
                    }
                }
                for k in 1..=3u64 {
                    if let Ok(w) = v.d_operator(k, &b) {
                        assert!(i0.contains(&v, &w));
                    }
                }
            }
        }
        // the module generated by L(-2)^3 1 misses L(-3)^3 1 - L(-9) 1, which is D^(3) of it
        let z2 = v.act_word(&[Gen::vir(-2); 3], &v.one()).unwrap();
        let closure = submodule_closure(&v, std::slice::from_ref(&z2));
        assert_eq!(closure.dims(), vec![0, 0, 0, 0, 0, 0, 1, 0, 1, 1]);
        let z3 = v.d_operator(3, &z2).unwrap();
        let expect = v.act_word(&[Gen::vir(-3); 3], &v.one()).unwrap().minus(&v.act(Gen::vir(-9), &v.one()).unwrap());
        assert_eq!(z3, expect);
        assert_eq!(submodule_closure(&v, &[z2, z3]).dims(), i0.dims());
    }

    #[test]
    fn affine_ideal() {
        let a = InducedModule::affine_vacuum(sl2(3), 1, 3);
        let j0 = ideal_graded_span(&a, &IdealFamily::zero(a.algebra())).unwrap();
        assert_eq!(j0.dims(), vec![0, 0, 0, 3]);
        let e3 = a.act_word(&[Gen::aff(0, -1); 3], &a.one()).unwrap();
        let f3 = a.act_word(&[Gen::aff(1, -1); 3], &a.one()).unwrap();
        let h3 = a.act_word(&[Gen::aff(2, -1); 3], &a.one()).unwrap().minus(&a.act(Gen::aff(2, -3), &a.one()).unwrap());
        for z in [e3, f3, h3] {
            assert!(j0.contains(&a, &z));
        }
    }

    #[test]
    fn radical_cross_checks() {
        let a = InducedModule::affine_vacuum(sl2(3), 1, 3);
        let j = raising_radical(&a);
        let closure = submodule_closure(&a, &(1..=3).flat_map(|d| j.basis_vectors(&a, d)).collect::<Vec<_>>());
        assert!(closure.is_subspace_of(&j));
        assert_eq!(closure.dim(0), 0);
        for d in 1..=3 {
            for v in j.basis_vectors(&a, d) {
                for n in 1..=d as i64 {
                    for b in 0..3 {
                        assert!(j.contains(&a, &a.act(Gen::aff(b, n), &v).unwrap()));
                    }
                }
            }
        }
        let v = InducedModule::virasoro_vacuum(p(5), 1, 6);
        let j = raising_radical(&v);
        for d in 1..=6 {
            for x in j.basis_vectors(&v, d) {
                for n in 1..=d as i64 {
                    assert!(j.contains(&v, &v.act(Gen::vir(n), &x).unwrap()));
                }
            }
        }
    }

    #[test]
    fn verma_modules() {
        let m = InducedModule::virasoro_verma(p(3), 1, 2, 4);
        assert_eq!(m.dims(), vec![1, 1, 2, 3, 5]);
        let top = m.top_vector(0);
        assert_eq!(m.act(Gen::vir(0), &top).unwrap(), top.scaled(2));
        let l = build_graded_module(&m);
        assert_eq!(l.dims()[0], 1);
        let m0 = InducedModule::virasoro_verma(p(3), 1, 0, 5);
        let v = InducedModule::virasoro_vacuum(p(3), 1, 5);
        let l0 = build_graded_module(&m0).dims();
        let lv = build_graded_module(&v).dims();
        assert_eq!(l0, lv);
    }

    #[test]
    fn generalized_verma_top() {
        let sc = sl2(3);
        let pr = p(3);
        // the two-dimensional module: e = [[0,1],[0,0]], f = [[0,0],[1,0]], h = diag(1,-1)
        let e = vec![vec![0, 1], vec![0, 0]];
        let f = vec![vec![0, 0], vec![1, 0]];
        let h = vec![vec![1, 0], vec![0, pr.neg(1)]];
        let u = TopModule::new(&sc, vec![e, f, h]).unwrap();
        let m = InducedModule::affine_generalized_verma(sc.clone(), 1, u, 2).unwrap();
        let l = build_graded_module(&m);
        assert_eq!(l.dims()[0], 2);
        let hv = m.act(Gen::aff(2, 0), &m.top_vector(1)).unwrap();
        assert_eq!(hv, m.top_vector(1).scaled(2));
        let bad = TopModule::new(&sc, vec![vec![vec![1]], vec![vec![0]], vec![vec![0]]]);
        assert!(bad.is_err());
    }

    #[test]
    fn modes_of_generators() {
        let v = InducedModule::virasoro_vacuum(p(5), 1, 8);
        let omega = v.act(Gen::vir(-2), &v.one()).unwrap();
        for d in 0..=4 {
            for k in v.basis(d).keys.iter() {
                let w = v.key_vec(k.clone());
                for n in -2..=4 {
                    assert_eq!(v.mode_raw(&omega, n, &w), v.act_raw(Gen::vir(n - 1), &w));
                    assert_eq!(v.mode_raw(&v.one(), n, &w), if n == -1 { w.clone() } else { Lin::zero(v.prime()) });
                }
            }
        }
        let a = InducedModule::affine_vacuum(sl2(3), 2, 4);
        for b in 0..3 {
            let x = a.act(Gen::aff(b, -1), &a.one()).unwrap();
            for k in a.basis(2).keys.iter() {
                let w = a.key_vec(k.clone());
                for n in -2..=3 {
                    assert_eq!(a.mode_raw(&x, n, &w), a.act_raw(Gen::aff(b, n), &w));
                }
            }
        }
    }
}
