//! Fourier-model norms for `C[Z^r]` and for the Klein bottle group
//! `K = ⟨a, t | t a t⁻¹ = a⁻¹⟩`.
//!
//! `‖λ(z)‖` for `z ∈ C[Z^r]` is the sup of `|Σ z(v) e^{2πi⟨v,x⟩}|` over the
//! torus; it is evaluated on the grid `T^r_q = (Z/q)^r / q`. For `K`, the
//! symbol at `(α, β)` is the 2×2 matrix of the representation induced from
//! the character `a ↦ e^{iα}`, `t² ↦ e^{iβ}` of `A = ⟨a, t²⟩`:
//! `a ↦ diag(e^{iα}, e^{−iα})`, `t ↦ [[0, e^{iβ}], [1, 0]]`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::op_norm_2x2;
use crate::words::{Basis, Letter, Word};

pub const DEFAULT_GRID_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("grid order must be at least 1")]
    ZeroGrid,
    #[error("grid has {points} points (cap {cap})")]
    GridCap { points: u128, cap: u128 },
    #[error("vector has length {got}, expected {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("Klein words use exactly the generators a and t")]
    KleinBasis,
}

/// Finitely supported element of `C[Z^r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZrElement {
    rank: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl ZrElement {
    pub fn new(rank: usize) -> Self {
        ZrElement {
            rank,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(rank: usize, terms: I) -> Result<Self, TorusError>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut z = ZrElement::new(rank);
        for (v, c) in terms {
            z.add(v, c)?;
        }
        Ok(z)
    }

    pub fn add(&mut self, v: Vec<i64>, c: Complex64) -> Result<(), TorusError> {
        if v.len() != self.rank {
            return Err(TorusError::Dimension {
                got: v.len(),
                expected: self.rank,
            });
        }
        let e = self.coeffs.entry(v).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if e.re == 0.0 && e.im == 0.0 {
            self.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }
}

/// `e^{2πik/q}` for `k = 0..q`, so that equal angles give identical values.
fn roots_of_unity(q: usize) -> Vec<Complex64> {
    (0..q)
        .map(|k| {
            if k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, TAU * k as f64 / q as f64)
            }
        })
        .collect()
}

fn check_grid(q: usize, dims: u32, cap: u128) -> Result<(), TorusError> {
    if q == 0 {
        return Err(TorusError::ZeroGrid);
    }
    let points = (q as u128).checked_pow(dims).unwrap_or(u128::MAX);
    if points > cap {
        return Err(TorusError::GridCap { points, cap });
    }
    Ok(())
}

/// `max_{x ∈ T^r_q} |Σ z(v) e^{2πi⟨v,x⟩}|`.
pub fn zr_norm(z: &ZrElement, q: usize) -> Result<f64, TorusError> {
    zr_norm_capped(z, q, DEFAULT_GRID_CAP)
}

pub fn zr_norm_capped(z: &ZrElement, q: usize, cap: u128) -> Result<f64, TorusError> {
    check_grid(q, z.rank as u32, cap)?;
    let roots = roots_of_unity(q);
    let qi = q as i64;
    let terms: Vec<(Vec<usize>, Complex64)> = z
        .coeffs
        .iter()
        .map(|(v, c)| (v.iter().map(|x| x.rem_euclid(qi) as usize).collect(), *c))
        .collect();
    let mut best = 0.0f64;
    let mut idx = alloc::vec![0usize; z.rank];
    loop {
        let mut s = Complex64::new(0.0, 0.0);
        for (v, c) in &terms {
            let mut k = 0usize;
            for (vi, xi) in v.iter().zip(&idx) {
                k = (k + vi * xi) % q;
            }
            s += c * roots[k];
        }
        best = best.max(s.norm());
        // Odometer over the grid.
        let mut d = 0;
        loop {
            if d == z.rank {
                return Ok(best);
            }
            idx[d] += 1;
            if idx[d] < q {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Normal form `a^p t^q` of a Klein bottle group element.
pub type KleinKey = (i64, i64);

/// `(p,q)(p',q') = (p + (−1)^q p', q + q')`.
pub fn klein_multiply(x: KleinKey, y: KleinKey) -> KleinKey {
    let sign = if x.1.rem_euclid(2) == 0 { 1 } else { -1 };
    (x.0 + sign * y.0, x.1 + y.1)
}

/// Rewrites a word over `{a, t}` (generator 0 = `a`, 1 = `t`) to `a^p t^q`
/// by moving every `t^{±1}` rightwards past `a^{±1}` with `t a^e = a^{−e} t`.
pub fn klein_normalize(w: &Word) -> KleinKey {
    let mut letters: Vec<Letter> = w.letters().to_vec();
    let is_t = |l: &Letter| l.generator() == 1;
    // Bubble passes: each swap applies the relation once.
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..letters.len().saturating_sub(1) {
            if is_t(&letters[i]) && !is_t(&letters[i + 1]) {
                let a = letters[i + 1].inverse();
                letters[i + 1] = letters[i];
                letters[i] = a;
                changed = true;
            }
        }
    }
    let mut p = 0;
    let mut q = 0;
    for l in &letters {
        let e = if l.is_inverse() { -1 } else { 1 };
        if is_t(l) {
            q += e;
        } else {
            p += e;
        }
    }
    (p, q)
}

/// Parses a Klein word over a basis whose names are exactly `a`, `t`.
pub fn klein_basis() -> Basis {
    Basis::new(["a", "t"]).expect("valid names")
}

/// Finitely supported element of `C[K]`, keyed by normal forms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KleinElement {
    coeffs: BTreeMap<KleinKey, Complex64>,
}

impl KleinElement {
    pub fn from_terms<I: IntoIterator<Item = (KleinKey, Complex64)>>(terms: I) -> Self {
        let mut z = KleinElement::default();
        for (k, c) in terms {
            *z.coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        z.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        z
    }

    pub fn terms(&self) -> impl Iterator<Item = (&KleinKey, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Image under the automorphism `a ↦ a⁻¹`, `t ↦ t`.
    pub fn invert_a(&self) -> Self {
        KleinElement::from_terms(self.coeffs.iter().map(|(&(p, q), &c)| ((-p, q), c)))
    }

    /// The `Z`-element `Σ z(a^p) δ_p` when supported on `⟨a⟩`.
    pub fn pushdown(&self) -> Option<ZrElement> {
        if self.coeffs.keys().any(|k| k.1 != 0) {
            return None;
        }
        ZrElement::from_terms(1, self.coeffs.iter().map(|(&(p, _), &c)| (alloc::vec![p], c))).ok()
    }
}

/// Symbol `M(α_i, β_j)` of `a^p t^q` with `α = 2πi/q_grid`, `β = 2πj/q_grid`.
fn klein_symbol_entry(
    roots: &[Complex64],
    g: usize,
    i: usize,
    j: usize,
    key: KleinKey,
    out: &mut [Complex64; 4],
    c: Complex64,
) {
    let gi = g as i64;
    let (p, q) = key;
    let s = q.div_euclid(2);
    let rho = q.rem_euclid(2);
    let angle = |k: i64| roots[k.rem_euclid(gi) as usize];
    // diag(e^{ipα}, e^{−ipα}) · e^{isβ} · M(t)^ρ
    let x = angle(p * i as i64 + s * j as i64);
    let y = angle(-p * i as i64 + s * j as i64);
    if rho == 0 {
        out[0] += c * x;
        out[3] += c * y;
    } else {
        out[1] += c * x * roots[j % g];
        out[2] += c * y;
    }
}

/// `max_{(α,β) ∈ T²_q} ‖Σ z(p,q) M(α,β)^{(p,q)}‖_op`.
pub fn klein_norm(z: &KleinElement, q: usize) -> Result<f64, TorusError> {
    klein_norm_capped(z, q, DEFAULT_GRID_CAP)
}

pub fn klein_norm_capped(z: &KleinElement, q: usize, cap: u128) -> Result<f64, TorusError> {
    check_grid(q, 2, cap)?;
    let roots = roots_of_unity(q);
    let mut best = 0.0f64;
    for i in 0..q {
        for j in 0..q {
            let mut m = [Complex64::new(0.0, 0.0); 4];
            for (&k, &c) in &z.coeffs {
                klein_symbol_entry(&roots, q, i, j, k, &mut m, c);
            }
            best = best.max(op_norm_2x2(m));
        }
    }
    Ok(best)
}

/// Model matrices of `a` and `t` at grid point `(i, j)`.
pub fn klein_generators(q: usize, i: usize, j: usize) -> ([Complex64; 4], [Complex64; 4]) {
    let roots = roots_of_unity(q);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let a = [roots[i % q], zero, zero, roots[(q - i % q) % q]];
    let t = [zero, roots[j % q], one, zero];
    (a, t)
}

fn mul2(x: &[Complex64; 4], y: &[Complex64; 4]) -> [Complex64; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

fn inv2(x: &[Complex64; 4]) -> [Complex64; 4] {
    let det = x[0] * x[3] - x[1] * x[2];
    [x[3] / det, -x[1] / det, -x[2] / det, x[0] / det]
}

/// Largest entrywise deviation from `M(t)M(a)M(t)⁻¹ = M(a)⁻¹` and
/// `M(t)² = e^{iβ}I` over the whole grid.
pub fn klein_relation_residual(q: usize) -> f64 {
    let roots = roots_of_unity(q);
    let mut worst = 0.0f64;
    for i in 0..q {
        for j in 0..q {
            let (a, t) = klein_generators(q, i, j);
            let lhs = mul2(&mul2(&t, &a), &inv2(&t));
            let rhs = inv2(&a);
            let tt = mul2(&t, &t);
            let e = roots[j];
            let zero = Complex64::new(0.0, 0.0);
            let target = [e, zero, zero, e];
            for k in 0..4 {
                worst = worst.max((lhs[k] - rhs[k]).norm()).max((tt[k] - target[k]).norm());
            }
        }
    }
    worst
}

/// One line of a grid-refinement table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementRow {
    pub q: usize,
    pub value: f64,
    /// `|N_q − N_{q/2}|`, absent on the first row.
    pub change: Option<f64>,
}

/// Evaluates `norm` on `q₀, 2q₀, …` up to `q_max`.
pub fn refine<F>(q0: usize, q_max: usize, mut norm: F) -> Result<Vec<RefinementRow>, TorusError>
where
    F: FnMut(usize) -> Result<f64, TorusError>,
{
    let mut out: Vec<RefinementRow> = Vec::new();
    let mut q = q0.max(1);
    while q <= q_max {
        let value = norm(q)?;
        let change = out.last().map(|r| (value - r.value).abs());
        out.push(RefinementRow { q, value, change });
        q *= 2;
    }
    Ok(out)
}
