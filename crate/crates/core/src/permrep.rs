//! Permutation representations `Γ → S_N` and norms of group-algebra
//! elements in the standard representation on mean-zero vectors.
//!
//! Convention: a permutation is an array `σ` with `i ↦ σ[i]`. Words act on
//! the right and are evaluated left to right, so `(xy)[i] = y[x[i]]`. The
//! operator of `σ` on `C^N` is `(P_σ v)[j] = v[σ[j]]`, which makes
//! `γ ↦ P_γ` a homomorphism: `P_{xy} = P_x P_y`.
//!
//! Worked example with `N = 3`, `x = [1, 2, 0]`, `y = [1, 0, 2]`:
//! `xy = [y[1], y[2], y[0]] = [0, 2, 1]`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::algebra::{AlgebraElement, Coefficient, Context};
use crate::normbracket::{sandwich_with, NormError, SandwichOptions};
use crate::rng::{pair_stream, stream};
use crate::tower::{
    discriminating_hom, DiscriminateOptions, Homomorphism, SubgroupDescriptor, TowerDescriptor, TowerError,
};
use crate::words::{Basis, Word};
use crate::CSV_VERSION_HEADER;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PermError {
    #[error("degree must be at least 2")]
    SmallDegree,
    #[error("image of generator {0} is not a permutation of 0..N")]
    NotBijection(usize),
    #[error("homomorphism codomain does not match the representation")]
    Mismatch,
    #[error("element context does not match the representation")]
    ContextMismatch,
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// Images of the generators of `basis` in `S_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermRep {
    n: usize,
    basis: Basis,
    images: Vec<Vec<u32>>,
}

pub fn identity_perm(n: usize) -> Vec<u32> {
    (0..n as u32).collect()
}

pub fn compose(x: &[u32], y: &[u32]) -> Vec<u32> {
    x.iter().map(|&i| y[i as usize]).collect()
}

pub fn invert_perm(x: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; x.len()];
    for (i, &j) in x.iter().enumerate() {
        out[j as usize] = i as u32;
    }
    out
}

impl PermRep {
    pub fn new(basis: Basis, images: Vec<Vec<u32>>) -> Result<Self, PermError> {
        let n = images.first().map_or(0, Vec::len);
        if n < 2 {
            return Err(PermError::SmallDegree);
        }
        if images.len() != basis.rank() {
            return Err(PermError::Mismatch);
        }
        for (g, p) in images.iter().enumerate() {
            let mut seen = vec![false; n];
            if p.len() != n {
                return Err(PermError::NotBijection(g));
            }
            for &i in p {
                if i as usize >= n || core::mem::replace(&mut seen[i as usize], true) {
                    return Err(PermError::NotBijection(g));
                }
            }
        }
        Ok(PermRep { n, basis, images })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn images(&self) -> &[Vec<u32>] {
        &self.images
    }

    /// Permutation of a word, letters applied left to right.
    pub fn evaluate(&self, w: &Word) -> Vec<u32> {
        let inverses: Vec<Option<Vec<u32>>> = self.images.iter().map(|_| None).collect();
        let mut inverses = inverses;
        let mut cur = identity_perm(self.n);
        for l in w.letters() {
            let g = l.generator();
            let p = if l.is_inverse() {
                inverses[g].get_or_insert_with(|| invert_perm(&self.images[g]))
            } else {
                &self.images[g]
            };
            for v in cur.iter_mut() {
                *v = p[*v as usize];
            }
        }
        cur
    }
}

/// Independent uniform permutations, generator `g` drawn from substream `g`.
pub fn random_free_rep(basis: &Basis, n: usize, seed: u64) -> Result<PermRep, PermError> {
    if n < 2 {
        return Err(PermError::SmallDegree);
    }
    let images = (0..basis.rank())
        .map(|g| {
            let mut rng = stream(seed, g as u64);
            let mut p = identity_perm(n);
            p.shuffle(&mut rng);
            p
        })
        .collect();
    PermRep::new(basis.clone(), images)
}

/// `ρ = rep ∘ φ`.
pub fn induce_rep(phi: &Homomorphism, rep: &PermRep) -> Result<PermRep, PermError> {
    if phi.codomain() != rep.basis() {
        return Err(PermError::Mismatch);
    }
    let images = phi.images().iter().map(|w| rep.evaluate(w)).collect();
    PermRep::new(phi.domain().clone(), images)
}

/// `Σ a(γ) ⊗ P_γ` restricted to mean-zero vectors (per matrix component).
#[derive(Debug, Clone)]
pub struct StdOperator {
    n: usize,
    dim: usize,
    perms: Vec<Vec<u32>>,
    inverse_perms: Vec<Vec<u32>>,
    coeffs: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl StdOperator {
    pub fn new(element: &AlgebraElement, rep: &PermRep) -> Result<Self, PermError> {
        if element.context().basis() != rep.basis() || !element.context().is_free() {
            return Err(PermError::ContextMismatch);
        }
        let dim = element.matrix_dim().unwrap_or(1);
        let mut perms = Vec::with_capacity(element.len());
        let mut coeffs = Vec::with_capacity(element.len());
        for (w, c) in element.terms() {
            perms.push(rep.evaluate(w));
            coeffs.push(match c {
                Coefficient::Scalar(z) => vec![*z],
                Coefficient::Matrix(m) => m.entries().to_vec(),
            });
        }
        let inverse_perms = perms.iter().map(|p| invert_perm(p)).collect();
        Ok(StdOperator {
            n: rep.degree(),
            dim,
            perms,
            inverse_perms,
            coeffs,
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn block_dim(&self) -> usize {
        self.dim
    }

    /// `y = B x`, vectors laid out as `x[j·r + c]`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let r = self.dim;
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (p, a) in self.perms.iter().zip(&self.coeffs) {
            for j in 0..self.n {
                let src = p[j] as usize * r;
                for row in 0..r {
                    let mut s = Complex64::new(0.0, 0.0);
                    for col in 0..r {
                        s += a[row * r + col] * x[src + col];
                    }
                    y[j * r + row] += s;
                }
            }
        }
    }

    /// `y = B* x`.
    pub fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        let r = self.dim;
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (p, a) in self.inverse_perms.iter().zip(&self.coeffs) {
            for j in 0..self.n {
                let src = p[j] as usize * r;
                for row in 0..r {
                    let mut s = Complex64::new(0.0, 0.0);
                    for col in 0..r {
                        s += a[col * r + row].conj() * x[src + col];
                    }
                    y[j * r + row] += s;
                }
            }
        }
    }

    fn project(&self, x: &mut [Complex64]) {
        let r = self.dim;
        for c in 0..r {
            let mean: Complex64 = (0..self.n).map(|j| x[j * r + c]).sum::<Complex64>() / self.n as f64;
            for j in 0..self.n {
                x[j * r + c] -= mean;
            }
        }
    }

    /// Largest singular value on the mean-zero subspace by power iteration
    /// on `B*B`; stops once the eigen-residual is below `tol` relative.
    pub fn op_norm(&self, tol: f64, max_iters: usize, seed: u64) -> NormEstimate {
        let len = self.n * self.dim;
        let mut rng = stream(seed, u64::MAX);
        let mut x: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        self.project(&mut x);
        let mut bx = vec![Complex64::new(0.0, 0.0); len];
        let mut g = vec![Complex64::new(0.0, 0.0); len];
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nx = norm(&x);
        if nx == 0.0 {
            return NormEstimate {
                value: 0.0,
                converged: true,
                iterations: 0,
            };
        }
        x.iter_mut().for_each(|z| *z /= nx);
        let mut best = 0.0f64;
        for it in 1..=max_iters {
            self.apply(&x, &mut bx);
            self.apply_adjoint(&bx, &mut g);
            self.project(&mut g);
            let lambda: f64 = x.iter().zip(&g).map(|(a, b)| (a.conj() * b).re).sum();
            best = best.max(lambda);
            let resid = x
                .iter()
                .zip(&g)
                .map(|(a, b)| (b - a * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let ng = norm(&g);
            if ng == 0.0 {
                return NormEstimate {
                    value: 0.0,
                    converged: true,
                    iterations: it,
                };
            }
            if resid <= tol * lambda.abs() {
                return NormEstimate {
                    value: lambda.max(0.0).sqrt(),
                    converged: true,
                    iterations: it,
                };
            }
            for (a, b) in x.iter_mut().zip(&g) {
                *a = b / ng;
            }
        }
        NormEstimate {
            value: best.max(0.0).sqrt(),
            converged: false,
            iterations: max_iters,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub seed: u64,
    pub op_norm: f64,
    pub converged: bool,
    pub reference_upper: f64,
    pub l1_cap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentOptions {
    pub r_for_phi: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub sandwich_doublings: u32,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            r_for_phi: 2,
            tol: 1e-7,
            max_iters: 20_000,
            sandwich_doublings: 2,
        }
    }
}

/// Shared data of an experiment: `φ`, the pushed-forward element and its
/// reference bracket.
#[derive(Debug, Clone)]
pub struct ExperimentSetup {
    pub phi: Homomorphism,
    pub element: AlgebraElement,
    pub reference_upper: f64,
    pub l1_cap: f64,
}

pub fn experiment_setup(
    tower: &TowerDescriptor,
    y: &SubgroupDescriptor,
    z: &AlgebraElement,
    opts: &ExperimentOptions,
) -> Result<ExperimentSetup, PermError> {
    if z.context().basis() != y.basis() {
        return Err(PermError::ContextMismatch);
    }
    let d = discriminating_hom(tower, y, opts.r_for_phi, &DiscriminateOptions::default())?;
    let target = Context::free(tower.base().clone());
    let b = z.pushforward(&d.on_subgroup, &target).map_err(NormError::from)?;
    let bracket = sandwich_with(
        &b,
        &SandwichOptions {
            max_doublings: opts.sandwich_doublings,
            target_ratio: 1.0,
            max_stat_passes: 0,
            ..SandwichOptions::default()
        },
    )?;
    Ok(ExperimentSetup {
        phi: d.on_subgroup,
        element: z.clone(),
        reference_upper: bracket.upper,
        l1_cap: z.l1(),
    })
}

/// One `(N, seed)` cell; pure and deterministic.
pub fn experiment_cell(
    setup: &ExperimentSetup,
    n: usize,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<ExperimentRow, PermError> {
    let free = random_free_rep(setup.phi.codomain(), n, seed)?;
    let rho = induce_rep(&setup.phi, &free)?;
    let op = StdOperator::new(&setup.element, &rho)?;
    let est = op.op_norm(opts.tol, opts.max_iters, pair_stream(n as u64, seed));
    Ok(ExperimentRow {
        n,
        seed,
        op_norm: est.value,
        converged: est.converged,
        reference_upper: setup.reference_upper,
        l1_cap: setup.l1_cap,
    })
}

/// Rows in schedule order (`N` outer, seeds inner).
pub fn strong_convergence_experiment(
    tower: &TowerDescriptor,
    y: &SubgroupDescriptor,
    z: &AlgebraElement,
    n_schedule: &[usize],
    seeds: &[u64],
    opts: &ExperimentOptions,
) -> Result<Vec<ExperimentRow>, PermError> {
    let setup = experiment_setup(tower, y, z, opts)?;
    let mut rows = Vec::new();
    for &n in n_schedule {
        for &s in seeds {
            rows.push(experiment_cell(&setup, n, s, opts)?);
        }
    }
    Ok(rows)
}

/// CSV `N,seed,op_norm,converged,reference_upper,l1_cap`.
pub fn experiment_csv(rows: &[ExperimentRow]) -> String {
    let mut s = String::new();
    s.push_str(CSV_VERSION_HEADER);
    s.push('\n');
    s.push_str("N,seed,op_norm,converged,reference_upper,l1_cap\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.n, r.seed, r.op_norm, r.converged, r.reference_upper, r.l1_cap
        );
    }
    s
}

/// Per-`N` medians in schedule order.
pub fn medians(rows: &[ExperimentRow]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    for n in ns {
        let mut v: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.op_norm).collect();
        v.sort_by(f64::total_cmp);
        let m = if v.len() % 2 == 1 {
            v[v.len() / 2]
        } else {
            0.5 * (v[v.len() / 2 - 1] + v[v.len() / 2])
        };
        out.push((n, m));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar_element;
    use crate::linalg::{top_eigenvalue_upper, CMatrix};
    use crate::tower::preset_genus2;
    use rand::SeedableRng;

    fn f2() -> Basis {
        Basis::new(["x", "y"]).unwrap()
    }

    #[test]
    fn composition_convention() {
        let b = f2();
        let rep = PermRep::new(b.clone(), vec![vec![1, 2, 0], vec![1, 0, 2]]).unwrap();
        assert_eq!(rep.evaluate(&b.parse_word("x y").unwrap()), vec![0, 2, 1]);
        assert_eq!(rep.evaluate(&b.parse_word("x x^-1").unwrap()), identity_perm(3));
        assert_eq!(rep.evaluate(&b.parse_word("x^-1").unwrap()), invert_perm(&[1, 2, 0]));
    }

    #[test]
    fn bad_reps_rejected() {
        assert_eq!(PermRep::new(f2(), vec![vec![0], vec![0]]), Err(PermError::SmallDegree));
        assert_eq!(
            PermRep::new(f2(), vec![vec![0, 0], vec![0, 1]]),
            Err(PermError::NotBijection(0))
        );
        assert_eq!(random_free_rep(&f2(), 1, 0), Err(PermError::SmallDegree));
    }

    #[test]
    fn seeded_reps_are_reproducible() {
        let a = random_free_rep(&f2(), 50, 9).unwrap();
        let b = random_free_rep(&f2(), 50, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_free_rep(&f2(), 50, 10).unwrap());
        let one = Basis::new(["a"]).unwrap();
        let r = random_free_rep(&one, 2, 4).unwrap();
        assert!(r.images()[0] == vec![0, 1] || r.images()[0] == vec![1, 0]);
    }

    #[test]
    fn uniform_on_s3() {
        let one = Basis::new(["a"]).unwrap();
        let mut counts = alloc::collections::BTreeMap::new();
        let samples = 10_000;
        for seed in 0..samples {
            let r = random_free_rep(&one, 3, seed).unwrap();
            *counts.entry(r.images()[0].clone()).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = samples as f64 / 6.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // χ² with 5 degrees of freedom: p = 0.001 at 20.52.
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn induced_rep_respects_words() {
        let b = f2();
        let phi = Homomorphism::new(
            Basis::new(["g"]).unwrap(),
            b.clone(),
            vec![b.parse_word("x y").unwrap()],
        )
        .unwrap();
        let rep = random_free_rep(&b, 20, 1).unwrap();
        let ind = induce_rep(&phi, &rep).unwrap();
        assert_eq!(ind.images()[0], compose(&rep.images()[0], &rep.images()[1]));
        let id = induce_rep(&Homomorphism::identity(b.clone()), &rep).unwrap();
        assert_eq!(id, rep);
    }

    #[test]
    fn genus2_relator_maps_to_identity() {
        let (tower, y) = preset_genus2();
        let d = discriminating_hom(&tower, &y, 1, &DiscriminateOptions::default()).unwrap();
        let rel = y.basis().parse_word("a1 b1 a1^-1 b1^-1 b2 a2 b2^-1 a2^-1").unwrap();
        for seed in 0..100 {
            let rep = random_free_rep(tower.base(), 30, seed).unwrap();
            let rho = induce_rep(&d.on_subgroup, &rep).unwrap();
            assert_eq!(rho.evaluate(&rel), identity_perm(30));
        }
    }

    fn dense(op: &StdOperator) -> CMatrix {
        let len = op.degree() * op.block_dim();
        let mut m = CMatrix::zeros(len);
        let mut e = vec![Complex64::new(0.0, 0.0); len];
        let mut col = vec![Complex64::new(0.0, 0.0); len];
        for j in 0..len {
            e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            op.project(&mut e);
            op.apply(&e, &mut col);
            for i in 0..len {
                m.set(i, j, col[i]);
            }
        }
        m
    }

    #[test]
    fn power_iteration_matches_dense_oracle() {
        let b = f2();
        let ctx = Context::free(b.clone());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let ball = crate::words::ball(&b, 2, 100).unwrap();
        for case in 0..20 {
            let n = rng.random_range(2..=20);
            let rep = random_free_rep(&b, n, case).unwrap();
            let terms: Vec<(Word, Coefficient)> = (0..rng.random_range(1..5))
                .map(|_| {
                    (
                        ball[rng.random_range(0..ball.len())].clone(),
                        Coefficient::scalar(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    )
                })
                .collect();
            let z = AlgebraElement::from_terms(ctx.clone(), terms).unwrap();
            if z.is_empty() {
                continue;
            }
            let op = StdOperator::new(&z, &rep).unwrap();
            let m = dense(&op);
            let reference = top_eigenvalue_upper(&(m.adjoint() * &m)).sqrt();
            let est = op.op_norm(1e-12, 200_000, case);
            assert!(est.converged);
            assert!(
                (est.value - reference).abs() <= 1e-6 * reference.max(1e-12),
                "case {case}: {} vs {reference}",
                est.value
            );
        }
    }

    #[test]
    fn unitary_and_contraction() {
        let b = f2();
        let ctx = Context::free(b.clone());
        let rep = random_free_rep(&b, 40, 5).unwrap();
        for w in ["", "x", "x y^-1 x"] {
            let z = scalar_element(ctx.clone(), &[(1.0, w)]).unwrap();
            let est = StdOperator::new(&z, &rep).unwrap().op_norm(1e-12, 10_000, 1);
            assert!((est.value - 1.0).abs() < 1e-9);
        }
        let z = scalar_element(ctx, &[(1.0, "x"), (-0.5, "y"), (2.0, "x y")]).unwrap();
        let est = StdOperator::new(&z, &rep).unwrap().op_norm(1e-10, 50_000, 1);
        assert!(est.value <= z.l1() + 1e-6);
    }

    #[test]
    fn matrix_mode_is_capped() {
        let b = f2();
        let ctx = Context::free(b.clone());
        let z = AlgebraElement::from_terms(
            ctx,
            [
                (Word::identity(), Coefficient::Matrix(CMatrix::identity(2))),
                (b.parse_word("x").unwrap(), Coefficient::Matrix(CMatrix::unit(2, 0, 1))),
            ],
        )
        .unwrap();
        let rep = random_free_rep(&b, 30, 3).unwrap();
        let op = StdOperator::new(&z, &rep).unwrap();
        let est = op.op_norm(1e-12, 100_000, 0);
        assert!(est.value.is_finite() && est.value <= z.l1() + 1e-9);
        let m = dense(&op);
        let reference = top_eigenvalue_upper(&(m.adjoint() * &m)).sqrt();
        assert!((est.value - reference).abs() <= 1e-6 * reference);
    }

    #[test]
    fn identity_element_has_norm_one() {
        let (tower, y) = preset_genus2();
        let z = scalar_element(Context::free(y.basis().clone()), &[(1.0, "")]).unwrap();
        let rows =
            strong_convergence_experiment(&tower, &y, &z, &[10, 20], &[1, 2], &ExperimentOptions::default()).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!((r.op_norm - 1.0).abs() < 1e-9);
        }
        assert_eq!(experiment_csv(&rows).lines().count(), 6);
        assert_eq!(medians(&rows).len(), 2);
    }
}
