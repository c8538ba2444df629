//! Finitely supported group-algebra elements over a word-presented group.
//!
//! Keys are normalized words of the ambient [`Context`]: freely reduced words
//! for a free group, canonical normal-form words for a height-one tower.
//! Coefficients are double-precision complex scalars or `r × r` complex
//! matrices; no rounding control is attempted.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Write as _;
use core::hash::BuildHasher;

use hashbrown::HashMap;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rustc_hash::FxBuildHasher;
use thiserror::Error;

use crate::linalg::CMatrix;
use crate::tower::{HeightOneGroup, Homomorphism};
use crate::words::{Basis, Word, WordError};

pub(crate) type FxHashMap<K, V> = HashMap<K, V, FxBuildHasher>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("elements live in different group contexts")]
    ContextMismatch,
    #[error("coefficient kinds differ (scalar vs {0}x{0} matrix)")]
    KindMismatch(usize),
    #[error("matrix dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("term cap exceeded: more than {limit} terms")]
    TermCap { limit: usize },
    #[error("letter cap exceeded: more than {limit} letters held in keys")]
    LetterCap { limit: u64 },
    #[error("operation needs a free-group context (word length)")]
    NotFree,
    #[error("the zero element has no support")]
    EmptySupport,
    #[error("homomorphism domain does not match the element's context")]
    DomainMismatch,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Resource caps. Exceeding either is a hard error, never a truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_terms: usize,
    pub max_letters: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_terms: 50_000_000,
            max_letters: 400_000_000,
        }
    }
}

/// Ambient group of an element.
#[derive(Debug, Clone)]
pub enum Context {
    Free(Arc<Basis>),
    /// Height-one extension of centralizers; keys are canonical words.
    HeightOne(Arc<HeightOneGroup>),
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Context::Free(a), Context::Free(b)) => Arc::ptr_eq(a, b) || a == b,
            (Context::HeightOne(a), Context::HeightOne(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl Context {
    pub fn free(basis: Basis) -> Self {
        Context::Free(Arc::new(basis))
    }

    pub fn basis(&self) -> &Basis {
        match self {
            Context::Free(b) => b,
            Context::HeightOne(g) => g.basis(),
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Context::Free(_))
    }

    pub fn normalize(&self, w: &Word) -> Word {
        match self {
            Context::Free(_) => w.clone(),
            Context::HeightOne(g) => g.canonical(w),
        }
    }

    pub fn product(&self, a: &Word, b: &Word) -> Word {
        match self {
            Context::Free(_) => a.mul(b),
            Context::HeightOne(g) => g.canonical(&a.mul(b)),
        }
    }

    pub fn inverse(&self, a: &Word) -> Word {
        match self {
            Context::Free(_) => a.inverse(),
            Context::HeightOne(g) => g.canonical(&a.inverse()),
        }
    }
}

/// Scalar or matrix coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Scalar(Complex64),
    Matrix(CMatrix),
}

impl Coefficient {
    pub fn scalar(re: f64, im: f64) -> Self {
        Coefficient::Scalar(Complex64::new(re, im))
    }

    /// `None` for scalars, `Some(r)` for `r × r` matrices.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Coefficient::Scalar(_) => None,
            Coefficient::Matrix(m) => Some(m.dim()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Scalar(z) => z.re == 0.0 && z.im == 0.0,
            Coefficient::Matrix(m) => m.is_zero(),
        }
    }

    /// Absolute value, or operator norm for matrices.
    pub fn norm(&self) -> f64 {
        match self {
            Coefficient::Scalar(z) => z.norm(),
            Coefficient::Matrix(m) => m.op_norm(),
        }
    }

    /// `|z|²`, or the squared Frobenius norm for matrices.
    pub fn norm_sq(&self) -> f64 {
        match self {
            Coefficient::Scalar(z) => z.norm_sqr(),
            Coefficient::Matrix(m) => m.frobenius_sq(),
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Coefficient::Scalar(z) => Coefficient::Scalar(z.conj()),
            Coefficient::Matrix(m) => Coefficient::Matrix(m.adjoint()),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        match self {
            Coefficient::Scalar(z) => Coefficient::Scalar(z * s),
            Coefficient::Matrix(m) => Coefficient::Matrix(m.scale(s)),
        }
    }

    fn mul(&self, other: &Coefficient) -> Coefficient {
        match (self, other) {
            (Coefficient::Scalar(a), Coefficient::Scalar(b)) => Coefficient::Scalar(a * b),
            (Coefficient::Matrix(a), Coefficient::Matrix(b)) => Coefficient::Matrix(a * b),
            _ => unreachable!("coefficient kinds checked by caller"),
        }
    }

    fn add_assign(&mut self, other: &Coefficient) {
        match (self, other) {
            (Coefficient::Scalar(a), Coefficient::Scalar(b)) => *a += b,
            (Coefficient::Matrix(a), Coefficient::Matrix(b)) => *a += b,
            _ => unreachable!("coefficient kinds checked by caller"),
        }
    }
}

/// A finitely supported map from group elements to coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    context: Context,
    dim: Option<usize>,
    terms: BTreeMap<Word, Coefficient>,
}

/// Statistics of a product computed without materializing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductStats {
    pub l2_sq: f64,
    pub radius: usize,
    pub terms: usize,
    pub passes: usize,
}

impl AlgebraElement {
    pub fn zero(context: Context, dim: Option<usize>) -> Self {
        AlgebraElement {
            context,
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn delta(context: Context, w: &Word) -> Self {
        let mut a = AlgebraElement::zero(context, None);
        let key = a.context.normalize(w);
        a.terms.insert(key, Coefficient::scalar(1.0, 0.0));
        a
    }

    /// Sums `(word, coefficient)` pairs after normalizing each word; exact
    /// zeros are dropped.
    pub fn from_terms<I>(context: Context, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Word, Coefficient)>,
    {
        let mut out = AlgebraElement::zero(context, None);
        let mut first = true;
        for (w, c) in terms {
            out.context.basis().check(&w)?;
            if first {
                out.dim = c.dim();
                first = false;
            } else if c.dim() != out.dim {
                return Err(out.kind_error(c.dim()));
            }
            let key = out.context.normalize(&w);
            out.add_term(key, &c);
        }
        out.prune();
        Ok(out)
    }

    fn kind_error(&self, other: Option<usize>) -> AlgebraError {
        match (self.dim, other) {
            (Some(a), Some(b)) => AlgebraError::DimensionMismatch(a, b),
            (Some(a), None) | (None, Some(a)) => AlgebraError::KindMismatch(a),
            (None, None) => unreachable!(),
        }
    }

    fn add_term(&mut self, key: Word, c: &Coefficient) {
        match self.terms.get_mut(&key) {
            Some(v) => v.add_assign(c),
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn matrix_dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> Option<&Coefficient> {
        self.terms.get(&self.context.normalize(w))
    }

    /// Scalar coefficient at the identity (zero when absent).
    pub fn identity_scalar(&self) -> Complex64 {
        match self.terms.get(&Word::identity()) {
            Some(Coefficient::Scalar(z)) => *z,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.scale(s);
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        if out.terms.is_empty() {
            out.dim = other.dim;
        }
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out.prune();
        Ok(out)
    }

    fn check_compatible(&self, other: &AlgebraElement) -> Result<(), AlgebraError> {
        if self.context != other.context {
            return Err(AlgebraError::ContextMismatch);
        }
        if self.dim != other.dim && !self.is_empty() && !other.is_empty() {
            return Err(self.kind_error(other.dim));
        }
        Ok(())
    }

    /// `a*(g) = conj(a(g⁻¹))`, conjugate transpose for matrices.
    pub fn star(&self) -> Self {
        let mut out = AlgebraElement::zero(self.context.clone(), self.dim);
        for (w, c) in &self.terms {
            out.terms.insert(self.context.inverse(w), c.adjoint());
        }
        out
    }

    /// `Σ |a(g)|`, operator norms for matrix coefficients.
    pub fn l1(&self) -> f64 {
        self.terms.values().map(Coefficient::norm).sum()
    }

    pub fn l2_sq(&self) -> f64 {
        self.terms.values().map(Coefficient::norm_sq).sum()
    }

    pub fn l2(&self) -> f64 {
        self.l2_sq().sqrt()
    }

    /// Largest word length in the support; free contexts only.
    pub fn support_radius(&self) -> Result<usize, AlgebraError> {
        if !self.context.is_free() {
            return Err(AlgebraError::NotFree);
        }
        self.terms.keys().map(Word::len).max().ok_or(AlgebraError::EmptySupport)
    }

    /// Total number of letters held in the keys.
    pub fn key_letters(&self) -> u64 {
        self.terms.keys().map(|w| w.len() as u64).sum()
    }

    /// `(a·b)(g) = Σ_h a(h) b(h⁻¹g)`.
    pub fn convolve(&self, other: &AlgebraElement, limits: &Limits) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let dim = if self.is_empty() { other.dim } else { self.dim };
        let mut acc: FxHashMap<Word, Coefficient> = FxHashMap::default();
        let mut letters: u64 = 0;
        for (h, x) in &self.terms {
            for (k, y) in &other.terms {
                let key = self.context.product(h, k);
                let c = x.mul(y);
                match acc.get_mut(&key) {
                    Some(v) => v.add_assign(&c),
                    None => {
                        letters += key.len() as u64;
                        if acc.len() >= limits.max_terms {
                            return Err(AlgebraError::TermCap {
                                limit: limits.max_terms,
                            });
                        }
                        if letters > limits.max_letters {
                            return Err(AlgebraError::LetterCap {
                                limit: limits.max_letters,
                            });
                        }
                        acc.insert(key, c);
                    }
                }
            }
        }
        let mut out = AlgebraElement::zero(self.context.clone(), dim);
        out.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(out)
    }

    /// ℓ² norm, support radius and size of `self · self`, computed in
    /// hash-partitioned passes so that at most about `resident` distinct
    /// terms are held at once. Free contexts only.
    pub fn square_stats(&self, resident: usize, max_passes: usize) -> Result<ProductStats, AlgebraError> {
        if !self.context.is_free() {
            return Err(AlgebraError::NotFree);
        }
        let pairs = (self.len() as u128) * (self.len() as u128);
        let passes = pairs.div_ceil(resident.max(1) as u128).max(1);
        if passes > max_passes as u128 {
            return Err(AlgebraError::TermCap {
                limit: resident.saturating_mul(max_passes),
            });
        }
        let passes = passes as usize;
        if let Some(packed) = PackedTerms::new(self) {
            Ok(packed.square_stats(passes))
        } else {
            Ok(self.square_stats_words(passes))
        }
    }

    fn square_stats_words(&self, passes: usize) -> ProductStats {
        let hasher = FxBuildHasher;
        let mut stats = ProductStats {
            l2_sq: 0.0,
            radius: 0,
            terms: 0,
            passes,
        };
        for pass in 0..passes {
            let mut acc: FxHashMap<Word, Coefficient> = FxHashMap::default();
            for (h, x) in &self.terms {
                for (k, y) in &self.terms {
                    let key = h.mul(k);
                    if passes > 1 && (hasher.hash_one(&key) % passes as u64) as usize != pass {
                        continue;
                    }
                    let c = x.mul(y);
                    match acc.get_mut(&key) {
                        Some(v) => v.add_assign(&c),
                        None => {
                            acc.insert(key, c);
                        }
                    }
                }
            }
            for (w, c) in &acc {
                if !c.is_zero() {
                    stats.l2_sq += c.norm_sq();
                    stats.radius = stats.radius.max(w.len());
                    stats.terms += 1;
                }
            }
        }
        stats
    }

    /// Applies a homomorphism to every key, summing coefficients of
    /// colliding images. `target` must be built on the map's codomain.
    pub fn pushforward(&self, phi: &Homomorphism, target: &Context) -> Result<Self, AlgebraError> {
        if phi.domain() != self.context.basis() || phi.codomain() != target.basis() {
            return Err(AlgebraError::DomainMismatch);
        }
        let mut out = AlgebraElement::zero(target.clone(), self.dim);
        for (w, c) in &self.terms {
            let image = target.normalize(&phi.apply(w));
            out.add_term(image, c);
        }
        out.prune();
        Ok(out)
    }

    /// Same element viewed in another context over the same basis.
    pub fn recontextualize(&self, target: &Context) -> Result<Self, AlgebraError> {
        if target.basis() != self.context.basis() {
            return Err(AlgebraError::ContextMismatch);
        }
        let mut out = AlgebraElement::zero(target.clone(), self.dim);
        for (w, c) in &self.terms {
            out.add_term(target.normalize(w), c);
        }
        out.prune();
        Ok(out)
    }

    /// Text rendering; see [`AlgebraElement::parse_text`].
    pub fn to_text(&self) -> String {
        let basis = self.context.basis();
        let mut out = String::new();
        match self.dim {
            None => {
                for (w, c) in &self.terms {
                    if let Coefficient::Scalar(z) = c {
                        let _ = writeln!(out, "{} {} {}", z.re, z.im, basis.format_word(w)).map(|_| ());
                        trim_trailing_space(&mut out);
                    }
                }
            }
            Some(r) => {
                let _ = writeln!(out, "matdim {}", r);
                for (w, c) in &self.terms {
                    if let Coefficient::Matrix(m) = c {
                        for i in 0..r {
                            for j in 0..r {
                                let z = m.get(i, j);
                                if z.re != 0.0 || z.im != 0.0 {
                                    let _ = writeln!(out, "{} {} {} {} {}", z.re, z.im, i, j, basis.format_word(w));
                                    trim_trailing_space(&mut out);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Parses one term per line: `RE IM <word>`. A `matdim r` header switches
    /// to matrix entries `RE IM ROW COL <word>`. Blank lines and `#`
    /// comments are ignored.
    pub fn parse_text(context: Context, text: &str) -> Result<Self, AlgebraError> {
        let mut dim: Option<usize> = None;
        let mut scalars: Vec<(Word, Coefficient)> = Vec::new();
        let mut matrices: BTreeMap<Word, CMatrix> = BTreeMap::new();
        let mut seen_term = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| AlgebraError::Parse { line: line_no, message };
            let mut fields = line.split_whitespace();
            let head = fields.next().unwrap_or("");
            if head == "matdim" {
                if seen_term || dim.is_some() {
                    return Err(err("`matdim` must precede all terms".into()));
                }
                let r: usize = fields
                    .next()
                    .and_then(|s| s.parse().ok())
                    .filter(|r| *r >= 1)
                    .ok_or_else(|| err("expected a positive matrix dimension".into()))?;
                if fields.next().is_some() {
                    return Err(err("trailing fields after `matdim`".into()));
                }
                dim = Some(r);
                continue;
            }
            seen_term = true;
            let re: f64 = head.parse().map_err(|_| err(format!("bad real part `{head}`")))?;
            let im_s = fields.next().ok_or_else(|| err("missing imaginary part".into()))?;
            let im: f64 = im_s.parse().map_err(|_| err(format!("bad imaginary part `{im_s}`")))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(err("coefficients must be finite".into()));
            }
            let z = Complex64::new(re, im);
            match dim {
                None => {
                    let rest: Vec<&str> = fields.collect();
                    let w = context
                        .basis()
                        .parse_word(&rest.join(" "))
                        .map_err(|e| err(format!("{e}")))?;
                    scalars.push((w, Coefficient::Scalar(z)));
                }
                Some(r) => {
                    let mut index = |name: &str| -> Result<usize, AlgebraError> {
                        let s = fields.next().ok_or_else(|| err(format!("missing {name}")))?;
                        s.parse::<usize>()
                            .ok()
                            .filter(|v| *v < r)
                            .ok_or_else(|| err(format!("bad {name} `{s}`")))
                    };
                    let row = index("row")?;
                    let col = index("column")?;
                    let rest: Vec<&str> = fields.collect();
                    let w = context
                        .basis()
                        .parse_word(&rest.join(" "))
                        .map_err(|e| err(format!("{e}")))?;
                    let m = matrices.entry(w).or_insert_with(|| CMatrix::zeros(r));
                    let old = m.get(row, col);
                    m.set(row, col, old + z);
                }
            }
        }
        match dim {
            None => AlgebraElement::from_terms(context, scalars),
            Some(r) => {
                let mut out = AlgebraElement::from_terms(
                    context,
                    matrices.into_iter().map(|(w, m)| (w, Coefficient::Matrix(m))),
                )?;
                out.dim = Some(r);
                Ok(out)
            }
        }
    }
}

fn trim_trailing_space(s: &mut String) {
    // A term at the identity renders its word as the empty string.
    if s.ends_with(" \n") {
        s.truncate(s.len() - 2);
        s.push('\n');
    }
}

/// Free-group terms packed into `u128` keys: letter codes in the low 120
/// bits at a fixed width, the length in the top 8 bits.
struct PackedTerms {
    width: u32,
    keys: Vec<(u128, u32)>,
    values: Vec<Complex64>,
}

const PACK_BITS: u32 = 120;

impl PackedTerms {
    fn new(a: &AlgebraElement) -> Option<Self> {
        if a.dim.is_some() {
            return None;
        }
        let codes = 2 * a.context.basis().rank();
        let width = usize::BITS - (codes - 1).max(1).leading_zeros();
        let max_len = a.terms.keys().map(Word::len).max().unwrap_or(0);
        if (2 * max_len) as u32 * width > PACK_BITS || 2 * max_len > u8::MAX as usize {
            return None;
        }
        let mut keys = Vec::with_capacity(a.len());
        let mut values = Vec::with_capacity(a.len());
        for (w, c) in &a.terms {
            let mut bits: u128 = 0;
            for (i, l) in w.letters().iter().enumerate() {
                bits |= (l.code() as u128) << (i as u32 * width);
            }
            keys.push((bits, w.len() as u32));
            match c {
                Coefficient::Scalar(z) => values.push(*z),
                Coefficient::Matrix(_) => return None,
            }
        }
        Some(PackedTerms { width, keys, values })
    }

    #[inline]
    fn product(&self, a: (u128, u32), b: (u128, u32)) -> u128 {
        let w = self.width;
        let mask = (1u128 << w) - 1;
        let (abits, la) = a;
        let (bbits, lb) = b;
        let n = la.min(lb);
        let mut c = 0;
        while c < n {
            let x = (abits >> ((la - 1 - c) * w)) & mask;
            let y = (bbits >> (c * w)) & mask;
            if x != y ^ 1 {
                break;
            }
            c += 1;
        }
        let keep = la - c;
        let low = if keep == 0 {
            0
        } else {
            abits & ((1u128 << (keep * w)) - 1)
        };
        let high = if c * w >= 128 { 0 } else { bbits >> (c * w) };
        let len = la + lb - 2 * c;
        let high = if keep * w >= 128 { 0 } else { high << (keep * w) };
        (low | high) | ((len as u128) << PACK_BITS)
    }

    fn square_stats(&self, passes: usize) -> ProductStats {
        let hasher = FxBuildHasher;
        let mut stats = ProductStats {
            l2_sq: 0.0,
            radius: 0,
            terms: 0,
            passes,
        };
        for pass in 0..passes {
            let mut acc: FxHashMap<u128, Complex64> = FxHashMap::default();
            for (i, &a) in self.keys.iter().enumerate() {
                let x = self.values[i];
                for (j, &b) in self.keys.iter().enumerate() {
                    let key = self.product(a, b);
                    if passes > 1 && (hasher.hash_one(key) % passes as u64) as usize != pass {
                        continue;
                    }
                    *acc.entry(key).or_insert(Complex64::new(0.0, 0.0)) += x * self.values[j];
                }
            }
            for (k, z) in &acc {
                if z.re != 0.0 || z.im != 0.0 {
                    stats.l2_sq += z.norm_sqr();
                    stats.radius = stats.radius.max((k >> PACK_BITS) as usize);
                    stats.terms += 1;
                }
            }
        }
        stats
    }
}

/// Convenience: scalar element from `(coefficient, word-text)` pairs.
pub fn scalar_element(context: Context, terms: &[(f64, &str)]) -> Result<AlgebraElement, AlgebraError> {
    let mut out = Vec::with_capacity(terms.len());
    for (c, w) in terms {
        out.push((context.basis().parse_word(w)?, Coefficient::scalar(*c, 0.0)));
    }
    AlgebraElement::from_terms(context, out)
}
