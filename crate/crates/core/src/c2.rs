//! The subspace `C_2(V)`, the commutative algebra `V/C_2(V)` and
//! `C_2`-cofiniteness of the p-center quotients at truncated degrees.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::liealg::Gen;
use crate::linalg::Echelon;
use crate::report::{Check, Report};
use crate::vacuum::{ideal_graded_span, GradedSubspace, IdealFamily, InducedModule, ModVec};

/// `C_2(V)` per degree: the span of `u_{−2−k} v` over homogeneous basis
/// vectors `u`, `v` with `deg u + deg v + k + 1 = d`.
pub fn c2_span(m: &InducedModule) -> GradedSubspace {
    let n = m.max_degree();
    let mut s = GradedSubspace::zero(m);
    let bases: Vec<Vec<ModVec>> =
        (0..=n).map(|d| m.basis(d).keys.iter().map(|k| m.key_vec(k.clone())).collect()).collect();
    for du in 1..=n {
        for dv in 0..=n - du {
            for k in 0..(n + 1).saturating_sub(du + dv + 1) {
                for u in &bases[du] {
                    for v in &bases[dv] {
                        s.insert(m, &m.mode_raw(u, -2 - k as i64, v));
                    }
                }
            }
        }
    }
    s
}

/// `V/C_2(V)`, optionally after quotienting by a graded ideal, with the
/// product `ū·v̄ = u_{−1}v`.
pub struct C2Quotient<'a> {
    module: &'a InducedModule,
    sub: GradedSubspace,
    basis: Vec<Vec<ModVec>>,
}

impl<'a> C2Quotient<'a> {
    /// `ideal` is added to `C_2(V)`; pass `None` for `V` itself.
    pub fn new(module: &'a InducedModule, ideal: Option<&GradedSubspace>) -> C2Quotient<'a> {
        let mut sub = c2_span(module);
        if let Some(i) = ideal {
            sub = sub.sum(i);
        }
        let basis = (0..=module.max_degree())
            .map(|d| {
                let piece = sub.piece(d);
                let pivots: Vec<usize> =
                    piece.rows().iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
                (0..module.dim(d))
                    .filter(|c| !pivots.contains(c))
                    .map(|c| {
                        let mut x = vec![0; module.dim(d)];
                        x[c] = 1;
                        module.from_coords(d, &x)
                    })
                    .collect()
            })
            .collect();
        C2Quotient { module, sub, basis }
    }

    pub fn module(&self) -> &InducedModule {
        self.module
    }

    pub fn subspace(&self) -> &GradedSubspace {
        &self.sub
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.len()).collect()
    }

    /// Coset representatives of the degree-`d` basis.
    pub fn basis(&self, d: usize) -> &[ModVec] {
        &self.basis[d]
    }

    pub fn reduce(&self, v: &ModVec) -> ModVec {
        self.sub.reduce(self.module, v)
    }

    pub fn is_zero(&self, v: &ModVec) -> bool {
        self.sub.contains(self.module, v)
    }

    pub fn product(&self, u: &ModVec, v: &ModVec) -> ModVec {
        self.reduce(&self.module.mode_raw(u, -1, v))
    }

    /// Checks unit, commutativity and associativity on the basis table, and
    /// that products do not depend on coset representatives.
    pub fn check_table(&self, samples: usize, seed: u64) -> Vec<Check> {
        let n = self.module.max_degree();
        let one = self.module.one();
        let mut unit = Check::new("unit");
        let mut comm = Check::new("commutative");
        let mut assoc = Check::new("associative");
        let name = |v: &ModVec| self.module.vec_name(v);
        for d in 0..=n {
            for u in &self.basis[d] {
                unit.record(self.product(&one, u) == self.reduce(u), || format!("1·{} != {}", name(u), name(u)));
                for e in d..=n - d {
                    for v in &self.basis[e] {
                        comm.record(self.product(u, v) == self.product(v, u), || format!("{} and {}", name(u), name(v)));
                        for f in 0..=n - d - e {
                            for w in &self.basis[f] {
                                let l = self.product(&self.product(u, v), w);
                                let r = self.product(u, &self.product(v, w));
                                assoc.record(l == r, || format!("({}·{})·{}", name(u), name(v), name(w)));
                            }
                        }
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ideal = Check::new("c2-ideal");
        let mut well = Check::new("well-defined");
        let sub_degrees: Vec<usize> = (1..=n).filter(|&d| self.sub.dim(d) > 0).collect();
        for _ in 0..samples {
            if sub_degrees.is_empty() {
                break;
            }
            let d = sub_degrees[rng.gen_range(0..sub_degrees.len())];
            let rows = self.sub.basis_vectors(self.module, d);
            let c = &rows[rng.gen_range(0..rows.len())];
            let room = n - d;
            let da = rng.gen_range(0..=room);
            let Some(a) = crate::modes::random_homogeneous(self.module, da, &mut rng) else { continue };
            for k in 0..=(room - da).min(3) {
                let x = self.module.mode_raw(&a, -1 - k as i64, c);
                ideal.record(self.is_zero(&x), || format!("{}_({}) moves {} out", name(&a), -1 - k as i64, name(c)));
            }
            // representatives a and a + c give the same products
            let cs = self.sub.basis_vectors(self.module, da);
            if !cs.is_empty() {
                let alt = a.plus(&cs[rng.gen_range(0..cs.len())]);
                let e = rng.gen_range(0..=n - da);
                for w in &self.basis[e] {
                    let ok = self.product(&a, w) == self.product(&alt, w) && self.product(w, &a) == self.product(w, &alt);
                    well.record(ok, || format!("{} and {} differ on {}", name(&a), name(&alt), name(w)));
                }
            }
        }
        vec![unit.finish(), comm.finish(), assoc.finish(), ideal.finish(), well.finish()]
    }
}

/// `ā^k = a(−1)^k 1`-type products as module vectors: the image of a word of
/// generators in the commutative quotient.
fn power_product(m: &InducedModule, word: &[Gen]) -> ModVec {
    m.act_word_raw(word, &m.one())
}

/// Cofiniteness of `V^0 = V/I` at truncation `N` for the Virasoro vacuum
/// module (`I = I_0`) or an affine vacuum module (`I = J_0`).
pub fn verify_c2_cofinite(m: &InducedModule, samples: usize, seed: u64) -> Report {
    let p = m.prime();
    let q = p.get() as usize;
    let alg = m.algebra().clone();
    let gen_degree = if alg.is_virasoro() { 2 } else { 1 };
    let params = |r: Report| {
        r.param("p", p).param("algebra", crate::modes::algebra_label(&alg)).param("central", m.central()).param(
            "max-degree",
            m.max_degree(),
        )
    };
    if m.max_degree() < q * gen_degree {
        let c = Check::single("truncation", false, || {
            format!("max degree {} is below p·{gen_degree} = {}", m.max_degree(), q * gen_degree)
        });
        return params(Report::new("c2", vec![c]));
    }
    let ideal = match ideal_graded_span(m, &IdealFamily::zero(&alg)) {
        Ok(i) => i,
        Err(e) => return params(Report::new("c2", vec![Check::single("ideal", false, || e.to_string())])),
    };
    let full = C2Quotient::new(m, None);
    let v0 = C2Quotient::new(m, Some(&ideal));
    let mut checks = Vec::new();
    let dims_full = full.dims();
    let dims_v0 = v0.dims();

    if alg.is_virasoro() {
        let omega_pow = |k: usize| power_product(m, &vec![Gen::vir(-2); k]);
        checks.push(Check::single("degree-0-1", full.subspace().dim(0) == 0 && full.subspace().dim(1) == 0, || {
            format!("C2 dims {:?}", full.subspace().dims())
        }));
        checks.push(
            Check::single("omega-power-vanishes", v0.is_zero(&omega_pow(q)), || {
                format!("{} is nonzero", m.vec_name(&omega_pow(q)))
            })
            .param("power", q),
        );
        let mut span = Check::new("omega-powers-span");
        for (d, &dim) in dims_v0.iter().enumerate() {
            let expected = usize::from(d % 2 == 0 && d / 2 < q);
            let ok = dim == expected && (expected == 0 || !v0.is_zero(&omega_pow(d / 2)));
            span.record(ok, || format!("degree {d}: quotient dim {dim}"));
        }
        checks.push(span.finish().param("dims", dims_v0.iter().join(",")));
        let mut poly = Check::new("polynomial-dims");
        for (d, &dim) in dims_full.iter().enumerate().take(2 * q + 1) {
            poly.record(dim == usize::from(d % 2 == 0) && (d % 2 == 1 || !full.is_zero(&omega_pow(d / 2))), || {
                format!("degree {d}: V/C2 dim {dim}")
            });
        }
        checks.push(poly.finish().param("degrees", format!("[0,{}]", (2 * q).min(m.max_degree()))));
    } else {
        let dim = alg.base_dim();
        let names = alg.structure().map(|s| s.names().to_vec()).unwrap_or_default();
        let mut pw = Check::new("generator-power-vanishes");
        for b in 0..dim {
            let v = power_product(m, &vec![Gen::aff(b, -1); q]);
            pw.record(v0.is_zero(&v), || format!("{}^{q} is nonzero", names[b]));
        }
        checks.push(pw.finish().param("power", q));
        let mut restricted = Check::new("restricted-monomials-span");
        let mut symmetric = Check::new("symmetric-surjection");
        for d in 0..=m.max_degree() {
            let monos = exponent_vectors(dim, d);
            for (check, quotient, cap) in [(&mut restricted, &v0, q - 1), (&mut symmetric, &full, d)] {
                let mut e = Echelon::new(p, m.dim(d));
                for ex in monos.iter().filter(|ex| ex.iter().all(|&k| k <= cap)) {
                    let word: Vec<Gen> =
                        ex.iter().enumerate().flat_map(|(b, &k)| std::iter::repeat_n(Gen::aff(b, -1), k)).collect();
                    e.insert(&m.coords(&quotient.reduce(&power_product(m, &word)), d));
                }
                let qd = quotient.dims()[d];
                check.record(e.rank() == qd, || format!("degree {d}: monomials span {} of {qd}", e.rank()));
            }
            let free = monos.len();
            symmetric.record(dims_full[d] == free, || format!("degree {d}: V/C2 dim {} vs {free}", dims_full[d]));
        }
        checks.push(restricted.finish().param("dims", dims_v0.iter().join(",")));
        checks.push(symmetric.finish().param("dims", dims_full.iter().join(",")));
        let bound = q.pow(dim as u32);
        let total: usize = dims_v0.iter().sum();
        checks.push(Check::single("dimension-bound", total <= bound, || format!("{total} > {bound}")).param("bound", bound));
    }
    checks.extend(v0.check_table(samples, seed));
    params(Report::new("c2", checks)).param("verdict", format!("verified through degree {}", m.max_degree()))
}

/// All exponent vectors of length `n` with sum `d`.
fn exponent_vectors(n: usize, d: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=d)
        .flat_map(|k| {
            exponent_vectors(n - 1, d - k).into_iter().map(move |mut v| {
                v.insert(0, k);
                v
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::liealg::StructureConstants;
    use crate::scalars::Prime;

    fn p(q: u64) -> Prime {
        Prime::new(q).unwrap()
    }

    #[test]
    fn virasoro_c2_low_degrees() {
        let m = InducedModule::virasoro_vacuum(p(3), 1, 8);
        let c2 = c2_span(&m);
        assert_eq!(c2.dim(0), 0);
        assert_eq!(c2.dim(1), 0);
        assert_eq!(c2.dim(2), 0);
        // L(-3)1 = D^(1) ω
        assert_eq!(c2.dim(3), 1);
        let q = C2Quotient::new(&m, None);
        assert_eq!(q.dims(), vec![1, 0, 1, 0, 1, 0, 1, 0, 1]);
        for k in 1..=4 {
            let omega = m.act_raw(Gen::vir(-2), &m.one());
            assert!(c2.contains(&m, &m.d_operator_raw(k, &omega)));
        }
    }

    #[test]
    fn virasoro_cofinite() {
        let m = InducedModule::virasoro_vacuum(p(3), 0, 8);
        let r = verify_c2_cofinite(&m, 10, 0);
        assert!(r.passed(), "{r}");
        let short = InducedModule::virasoro_vacuum(p(3), 0, 5);
        assert!(!verify_c2_cofinite(&short, 1, 0).passed());
    }

    #[test]
    fn affine_cofinite() {
        let sc = Arc::new(StructureConstants::sl2(p(3)));
        let m = InducedModule::affine_vacuum(sc, 1, 4);
        let r = verify_c2_cofinite(&m, 10, 0);
        assert!(r.passed(), "{r}");
        let q = C2Quotient::new(&m, None);
        assert_eq!(q.dims(), vec![1, 3, 6, 10, 15]);
    }

    #[test]
    fn exponent_vector_counts() {
        assert_eq!(exponent_vectors(3, 2).len(), 6);
        assert_eq!(exponent_vectors(1, 4), vec![vec![4]]);
        assert_eq!(exponent_vectors(0, 1).len(), 0);
    }
}
