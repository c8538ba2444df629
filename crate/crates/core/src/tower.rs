//! Iterated extensions of centralizers `F = Γ₀ < Γ₁ < … < Γ_n`, where
//! `Γ_i = ⟨Γ_{i−1}, t_i | [t_i, u_i] = e⟩`, and homomorphisms back to `F`.
//!
//! Generators of the full tower are ordered as the base basis followed by
//! the stable letters `t_1, …, t_n`; level `i` may use the base generators
//! and `t_1, …, t_{i−1}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use core::hash::BuildHasher;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::algebra::FxHashMap;
use crate::words::{ball, ball_size, Basis, Letter, Word, WordError, DEFAULT_BALL_CAP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TowerError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("level {level}: {message}")]
    Level { level: usize, message: String },
    #[error("level {0} is out of range for a tower of height {1}")]
    LevelOutOfRange(usize, usize),
    #[error("operation is implemented for height-1 towers only (height {0})")]
    HeightNotOne(usize),
    #[error("twist exponent must be positive")]
    ZeroTwist,
    #[error("radius must be at least 1")]
    ZeroRadius,
    #[error("subgroup needs at least one generator")]
    EmptySubgroup,
    #[error("subgroup has {gens} generators but {names} names")]
    NameCount { gens: usize, names: usize },
    #[error("level {level}: image of t would have {predicted} letters (cap {cap})")]
    ImageTooLarge { level: usize, predicted: u128, cap: u128 },
    #[error("relator [t_{level}, u_{level}] does not map to the identity")]
    RelatorViolation { level: usize },
    #[error("map is not injective on the ball: `{first}` and `{second}` have the same image")]
    NotInjective { first: String, second: String },
    #[error("`{first}` and `{second}` have the same image; equality in Γ is undecided above height 1")]
    Undecided { first: String, second: String },
    #[error("no exponent up to {0} separates the ball")]
    TightSearchExhausted(u64),
    #[error("map domain/codomain mismatch")]
    Mismatch,
}

/// One extension step: `t` commutes with `u`; the twist uses `a = u^twist`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub u: Word,
    pub t: String,
    pub a: Word,
    pub twist: i64,
}

/// Textual level description: `a` defaults to `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSpec {
    pub u: String,
    pub t: String,
    pub a: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerDescriptor {
    base: Basis,
    full: Basis,
    levels: Vec<Level>,
}

/// Exponent `e` with `a = u^e`, if any.
pub fn power_exponent(u: &Word, a: &Word) -> Option<i64> {
    if a.is_identity() {
        return Some(0);
    }
    let du = u.cyclic_decompose().ok()?;
    let da = a.cyclic_decompose().ok()?;
    if du.conjugator != da.conjugator || da.exponent % du.exponent != 0 {
        return None;
    }
    let e = (da.exponent / du.exponent) as i64;
    if da.core == du.core {
        Some(e)
    } else if da.core == du.core.inverse() {
        Some(-e)
    } else {
        None
    }
}

impl TowerDescriptor {
    pub fn new(base: Basis, levels: &[LevelSpec]) -> Result<Self, TowerError> {
        let names: Vec<&str> = levels.iter().map(|l| l.t.as_str()).collect();
        let full = base.extended(&names)?;
        let k = base.rank();
        let mut out = Vec::with_capacity(levels.len());
        for (i, spec) in levels.iter().enumerate() {
            let level = i + 1;
            let err = |message: String| TowerError::Level { level, message };
            let allowed = k + i;
            let parse = |text: &str| -> Result<Word, TowerError> {
                let w = full.parse_word(text)?;
                if w.max_generator().is_some_and(|g| g >= allowed) {
                    return Err(err(format!("`{text}` uses generators not available below this level")));
                }
                Ok(w)
            };
            let u = parse(&spec.u)?;
            if u.is_identity() {
                return Err(err("u must be nontrivial".into()));
            }
            let a = match &spec.a {
                Some(text) => parse(text)?,
                None => u.clone(),
            };
            let twist = match power_exponent(&u, &a) {
                Some(e) if e != 0 => e,
                _ => return Err(err("a must be a nonzero power of u".into())),
            };
            out.push(Level {
                u,
                t: spec.t.clone(),
                a,
                twist,
            });
        }
        Ok(TowerDescriptor {
            base,
            full,
            levels: out,
        })
    }

    pub fn base(&self) -> &Basis {
        &self.base
    }

    /// Base generators followed by all stable letters.
    pub fn full_basis(&self) -> &Basis {
        &self.full
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn stable_letter(&self, level: usize) -> usize {
        self.base.rank() + level - 1
    }

    /// Generators available in `Γ_level`.
    pub fn level_basis(&self, level: usize) -> Basis {
        let n = self.base.rank() + level;
        Basis::new(self.full.names()[..n].iter().cloned()).expect("prefix of a valid basis")
    }

    /// The tower truncated to `Γ_level`.
    pub fn truncated(&self, level: usize) -> TowerDescriptor {
        TowerDescriptor {
            base: self.base.clone(),
            full: self.level_basis(level),
            levels: self.levels[..level].to_vec(),
        }
    }

    fn check_level(&self, level: usize) -> Result<(), TowerError> {
        if level == 0 || level > self.height() {
            return Err(TowerError::LevelOutOfRange(level, self.height()));
        }
        Ok(())
    }

    /// Relator words `[t_i, u_i]`.
    pub fn relators(&self) -> Vec<Word> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let t = Word::generator_power(self.stable_letter(i + 1), 1);
                t.mul(&l.u).mul(&t.inverse()).mul(&l.u.inverse())
            })
            .collect()
    }

    pub fn height_one_group(&self) -> Result<HeightOneGroup, TowerError> {
        if self.height() != 1 {
            return Err(TowerError::HeightNotOne(self.height()));
        }
        Ok(HeightOneGroup::new(
            self.full.clone(),
            self.base.rank(),
            self.levels[0].u.clone(),
        ))
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.full.format_word(w)
    }
}

/// A finitely generated subgroup given by generator words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupDescriptor {
    names: Basis,
    gens: Vec<Word>,
}

impl SubgroupDescriptor {
    pub fn new(tower: &TowerDescriptor, gens: &[String], names: Option<&[String]>) -> Result<Self, TowerError> {
        if gens.is_empty() {
            return Err(TowerError::EmptySubgroup);
        }
        let names: Vec<String> = match names {
            Some(n) if n.len() != gens.len() => {
                return Err(TowerError::NameCount {
                    gens: gens.len(),
                    names: n.len(),
                })
            }
            Some(n) => n.to_vec(),
            None => (1..=gens.len()).map(|i| format!("y{i}")).collect(),
        };
        let words = gens
            .iter()
            .map(|g| tower.full_basis().parse_word(g))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SubgroupDescriptor {
            names: Basis::new(names)?,
            gens: words,
        })
    }

    /// Free basis on the generator names; `Y`-words live here.
    pub fn basis(&self) -> &Basis {
        &self.names
    }

    pub fn gens(&self) -> &[Word] {
        &self.gens
    }

    /// The inclusion `F(Y) → Γ`.
    pub fn inclusion(&self, tower: &TowerDescriptor) -> Homomorphism {
        Homomorphism {
            domain: self.names.clone(),
            codomain: tower.full_basis().clone(),
            images: self.gens.clone(),
            metadata: HomMetadata::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HomMetadata {
    pub certified_radius: Option<usize>,
    /// `max |h(g)|` over the certified ball.
    pub stretch: Option<usize>,
    /// Per-level twist exponents `m_i`, bottom level first.
    pub level_exponents: Vec<u64>,
}

/// Generator-image map between word-presented groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    domain: Basis,
    codomain: Basis,
    images: Vec<Word>,
    pub metadata: HomMetadata,
}

impl Homomorphism {
    pub fn new(domain: Basis, codomain: Basis, images: Vec<Word>) -> Result<Self, TowerError> {
        if images.len() != domain.rank() {
            return Err(TowerError::Mismatch);
        }
        for w in &images {
            codomain.check(w)?;
        }
        Ok(Homomorphism {
            domain,
            codomain,
            images,
            metadata: HomMetadata::default(),
        })
    }

    pub fn identity(basis: Basis) -> Self {
        let images = (0..basis.rank()).map(|g| Word::generator_power(g, 1)).collect();
        Homomorphism {
            domain: basis.clone(),
            codomain: basis,
            images,
            metadata: HomMetadata::default(),
        }
    }

    pub fn domain(&self) -> &Basis {
        &self.domain
    }

    pub fn codomain(&self) -> &Basis {
        &self.codomain
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator]
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for l in w.letters() {
            let img = &self.images[l.generator()];
            if l.is_inverse() {
                out.mul_assign(&img.inverse());
            } else {
                out.mul_assign(img);
            }
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Homomorphism) -> Result<Homomorphism, TowerError> {
        if inner.codomain != self.domain {
            return Err(TowerError::Mismatch);
        }
        Ok(Homomorphism {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            images: inner.images.iter().map(|w| self.apply(w)).collect(),
            metadata: HomMetadata::default(),
        })
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }
}

/// `π: Γ_level → Γ_{level−1}`, killing `t_level`.
pub fn retraction_pi(tower: &TowerDescriptor, level: usize) -> Result<Homomorphism, TowerError> {
    tower.check_level(level)?;
    let dom = tower.level_basis(level);
    let cod = tower.level_basis(level - 1);
    let mut images: Vec<Word> = (0..cod.rank()).map(|g| Word::generator_power(g, 1)).collect();
    images.push(Word::identity());
    Homomorphism::new(dom, cod, images)
}

/// `τ^m` on `Γ_level`: `t_level ↦ t_level · a^m`, everything else fixed.
pub fn twist_tau(tower: &TowerDescriptor, level: usize, m: u64) -> Result<Homomorphism, TowerError> {
    tower.check_level(level)?;
    if m == 0 {
        return Err(TowerError::ZeroTwist);
    }
    let basis = tower.level_basis(level);
    let mut h = Homomorphism::identity(basis);
    let t = tower.stable_letter(level);
    let a = &tower.levels[level - 1].a;
    h.images[t] = Word::generator_power(t, 1).mul(&a.pow(m as i64));
    Ok(h)
}

/// `d_i(r)`: `d₀(r) = r`, `d_i(r) = (8r² + 4r) · d_{i−1}(2(r + |a_i|))²`.
pub fn distortion_bound_exact(tower: &TowerDescriptor, r: u64) -> BigUint {
    fn go(levels: &[Level], r: &BigUint) -> BigUint {
        match levels.split_last() {
            None => r.clone(),
            Some((top, rest)) => {
                let a = BigUint::from(top.a.len());
                let l = (r + &a) * 2u32;
                let inner = go(rest, &l);
                (r * r * 8u32 + r * 4u32) * &inner * &inner
            }
        }
    }
    go(&tower.levels, &BigUint::from(r))
}

/// [`distortion_bound_exact`] as a float (`inf` once it leaves `f64` range).
pub fn distortion_bound(tower: &TowerDescriptor, r: u64) -> f64 {
    distortion_bound_exact(tower, r).to_f64().unwrap_or(f64::INFINITY)
}

/// `D(n) = 2^{n+2} − 2^n − 2`.
pub fn degree(height: u32) -> BigUint {
    let one = BigUint::one();
    (&one << (height + 2)) - (&one << height) - 2u32
}

/// Per-level exponents from the explicit choice
/// `m_i = (4r_i + 2) · 2 · d_{i−1}(L_i)`, `L_i = 2(r_i + |a_i|)`, starting
/// from `r_n = r` at the top and descending with `r_{i−1} = L_i`.
/// Bottom level first.
pub fn formula_exponents(tower: &TowerDescriptor, r: u64) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(tower.height());
    let mut ri = BigUint::from(r);
    for i in (1..=tower.height()).rev() {
        let a = BigUint::from(tower.levels[i - 1].a.len());
        let l = (&ri + &a) * 2u32;
        let below = tower.truncated(i - 1);
        let d = distortion_bound_exact(&below, l.to_u64().unwrap_or(u64::MAX));
        out.push((&ri * 4u32 + 2u32) * 2u32 * d);
        ri = l;
    }
    out.reverse();
    out
}

/// `h = ψ₁ ∘ … ∘ ψ_n` with `ψ_i = π_i ∘ τ_i^{m_i}`, i.e. `t_i ↦ a_i^{m_i}`
/// pushed down through the lower levels.
pub fn retraction_map(
    tower: &TowerDescriptor,
    exponents: &[u64],
    max_letters: u128,
) -> Result<Homomorphism, TowerError> {
    assert_eq!(exponents.len(), tower.height());
    let k = tower.base.rank();
    let mut images: Vec<Word> = (0..k).map(|g| Word::generator_power(g, 1)).collect();
    for (i, level) in tower.levels.iter().enumerate() {
        let partial = Homomorphism {
            domain: tower.level_basis(i),
            codomain: tower.base.clone(),
            images: images.clone(),
            metadata: HomMetadata::default(),
        };
        let ha = partial.apply(&level.a);
        let (p, c) = ha.cyclic_reduction();
        let predicted = 2 * p.len() as u128 + c.len() as u128 * exponents[i] as u128;
        if predicted > max_letters {
            return Err(TowerError::ImageTooLarge {
                level: i + 1,
                predicted,
                cap: max_letters,
            });
        }
        images.push(ha.pow(exponents[i] as i64));
    }
    let mut h = Homomorphism::new(tower.full.clone(), tower.base.clone(), images)?;
    h.metadata.level_exponents = exponents.to_vec();
    for (i, rel) in tower.relators().iter().enumerate() {
        if !h.apply(rel).is_identity() {
            return Err(TowerError::RelatorViolation { level: i + 1 });
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscriminateOptions {
    /// Search the smallest uniform exponent that passes verification.
    pub tight: bool,
    pub ball_cap: u128,
    pub max_image_letters: u128,
}

impl Default for DiscriminateOptions {
    fn default() -> Self {
        DiscriminateOptions {
            tight: false,
            ball_cap: DEFAULT_BALL_CAP,
            max_image_letters: 100_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrimination {
    /// `Γ → F` on the tower generators.
    pub hom: Homomorphism,
    /// `F(Y) → F`, i.e. `hom` restricted to the subgroup.
    pub on_subgroup: Homomorphism,
    pub radius: usize,
    /// Formal `Y`-words of length ≤ radius.
    pub ball_words: usize,
    /// Distinct elements of `Γ` among them.
    pub distinct_elements: usize,
    pub stretch: usize,
    /// `d_n(radius)` from the recursion.
    pub formula_bound: BigUint,
    /// Exponents the explicit formula prescribes (bottom level first).
    pub formula_exponents: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallCheck {
    pub words: usize,
    pub distinct_elements: usize,
    pub stretch: usize,
}

/// Checks that `h ∘ ι` is injective on the image in `Γ` of the radius-`r`
/// ball of `F(Y)`: formal words with equal images must be equal in `Γ`.
pub fn verify_on_ball(
    tower: &TowerDescriptor,
    y: &SubgroupDescriptor,
    h: &Homomorphism,
    r: usize,
    cap: u128,
) -> Result<BallCheck, TowerError> {
    let words = ball(y.basis(), r, cap)?;
    let incl = y.inclusion(tower);
    let hy = h.compose(&incl)?;
    let group = tower.height_one_group().ok();
    let mut stretch = 0;
    // Group the ball by image digest; images can be millions of letters,
    // so only anchors are kept and exact equality is rechecked on a hit.
    let hasher = rustc_hash::FxBuildHasher;
    let mut classes: FxHashMap<(u64, usize), Vec<usize>> = FxHashMap::default();
    let mut distinct = 0;
    let mut failure: Option<(usize, usize)> = None;
    for (i, w) in words.iter().enumerate() {
        let img = hy.apply(w);
        stretch = stretch.max(img.len());
        let bucket = classes.entry((hasher.hash_one(&img), img.len())).or_default();
        let anchor = bucket.iter().copied().find(|&a| hy.apply(&words[a]) == img);
        match anchor {
            None => {
                bucket.push(i);
                distinct += 1;
            }
            Some(anchor) => {
                let same = match &group {
                    Some(g) => g.equal(&incl.apply(&words[anchor]), &incl.apply(w)),
                    None => incl.apply(&words[anchor]) == incl.apply(w) && tower.height() == 0,
                };
                if !same && failure.is_none_or(|f| (anchor, i) < f) {
                    failure = Some((anchor, i));
                }
            }
        }
    }
    if let Some((i, j)) = failure {
        let first = y.basis().format_word(&words[i]);
        let second = y.basis().format_word(&words[j]);
        return Err(if group.is_some() || tower.height() == 0 {
            TowerError::NotInjective { first, second }
        } else {
            TowerError::Undecided { first, second }
        });
    }
    Ok(BallCheck {
        words: words.len(),
        distinct_elements: distinct,
        stretch,
    })
}

/// Discriminating map `Γ → F`, verified injective on `B_Y(r)`.
pub fn discriminating_hom(
    tower: &TowerDescriptor,
    y: &SubgroupDescriptor,
    r: usize,
    opts: &DiscriminateOptions,
) -> Result<Discrimination, TowerError> {
    if r == 0 {
        return Err(TowerError::ZeroRadius);
    }
    let predicted = ball_size(y.basis().rank(), r);
    if predicted > opts.ball_cap {
        return Err(WordError::BallTooLarge {
            radius: r,
            predicted,
            cap: opts.ball_cap,
        }
        .into());
    }
    let formula = formula_exponents(tower, r as u64);
    let run = |exps: &[u64]| -> Result<(Homomorphism, BallCheck), TowerError> {
        let h = retraction_map(tower, exps, opts.max_image_letters)?;
        let check = verify_on_ball(tower, y, &h, r, opts.ball_cap)?;
        Ok((h, check))
    };
    let (mut hom, check) = if opts.tight && tower.height() > 0 {
        let limit = formula.iter().max().and_then(|m| m.to_u64()).unwrap_or(u64::MAX);
        let mut found = None;
        for m in 1..=limit {
            match run(&vec![m; tower.height()]) {
                Ok(v) => {
                    found = Some(v);
                    break;
                }
                Err(TowerError::NotInjective { .. } | TowerError::Undecided { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        found.ok_or(TowerError::TightSearchExhausted(limit))?
    } else {
        let exps = formula
            .iter()
            .enumerate()
            .map(|(i, m)| {
                m.to_u64().ok_or(TowerError::ImageTooLarge {
                    level: i + 1,
                    predicted: u128::MAX,
                    cap: opts.max_image_letters,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        run(&exps)?
    };
    hom.metadata.certified_radius = Some(r);
    hom.metadata.stretch = Some(check.stretch);
    let mut on_subgroup = hom.compose(&y.inclusion(tower))?;
    on_subgroup.metadata = hom.metadata.clone();
    Ok(Discrimination {
        hom,
        on_subgroup,
        radius: r,
        ball_words: check.words,
        distinct_elements: check.distinct_elements,
        stretch: check.stretch,
        formula_bound: distortion_bound_exact(tower, r as u64),
        formula_exponents: formula,
    })
}

/// Height-1 normal form: `Π t^{n_i} v_i` or the axial element `t^n u^α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalForm {
    Axial {
        t_exp: i64,
        u_exp: i64,
    },
    /// Syllables `(n_i, v_i)`; only the first `n_i` may be zero and only
    /// the last `v_i` may be trivial.
    Alternating(Vec<(i64, Word)>),
}

/// `Γ' = ⟨F, t | [t, u] = e⟩` with `F` free on the first `t_index`
/// generators of `basis`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightOneGroup {
    basis: Basis,
    t_index: usize,
    u: Word,
    conj: Word,
    core: Word,
    core_inv: Word,
    root_exp: i64,
}

enum Syllable {
    F(Word),
    T(i64),
}

impl HeightOneGroup {
    pub fn new(basis: Basis, t_index: usize, u: Word) -> Self {
        let d = u.cyclic_decompose().expect("u is nontrivial");
        HeightOneGroup {
            basis,
            t_index,
            conj: d.conjugator,
            core_inv: d.core.inverse(),
            core: d.core,
            root_exp: d.exponent as i64,
            u,
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn u(&self) -> &Word {
        &self.u
    }

    fn syllables(&self, w: &Word) -> Vec<Syllable> {
        let mut out = Vec::new();
        let mut f: Vec<Letter> = Vec::new();
        let mut n: i64 = 0;
        for &l in w.letters() {
            if l.generator() == self.t_index {
                if !f.is_empty() {
                    out.push(Syllable::F(Word::from_letters(f.drain(..))));
                }
                n += if l.is_inverse() { -1 } else { 1 };
            } else {
                if n != 0 {
                    out.push(Syllable::T(n));
                    n = 0;
                }
                f.push(l);
            }
        }
        if !f.is_empty() {
            out.push(Syllable::F(Word::from_letters(f)));
        }
        if n != 0 {
            out.push(Syllable::T(n));
        }
        out
    }

    /// Membership in `⟨u⟩` through cyclic decompositions; the exponent `q`
    /// with `x = u^q`.
    pub fn u_exponent(&self, x: &Word) -> Option<i64> {
        if x.is_identity() {
            return Some(0);
        }
        let d = x.cyclic_decompose().ok()?;
        if d.conjugator != self.conj || d.exponent as i64 % self.root_exp != 0 {
            return None;
        }
        let e = d.exponent as i64 / self.root_exp;
        if d.core == self.core {
            Some(e)
        } else if d.core == self.core_inv {
            Some(-e)
        } else {
            None
        }
    }

    /// `x = u^q · c` with `c` the canonical representative of `⟨u⟩x`:
    /// shortest, then lexicographically least, among the coset elements
    /// closest to `x`'s position in the root coset.
    pub fn coset_decompose(&self, x: &Word) -> (i64, Word) {
        let s = &self.core;
        let si = &self.core_inv;
        let mut y = self.conj.inverse().mul(x);
        let mut j: i64 = 0;
        loop {
            if y.len() >= s.len() && y.starts_with(s) {
                y = si.mul(&y);
                j += 1;
            } else if y.len() >= s.len() && y.starts_with(si) {
                y = s.mul(&y);
                j -= 1;
            } else {
                break;
            }
        }
        // Only s^{-1}y, y, s·y can be shortest once no full period is left.
        let mut best = (0i64, y.clone());
        for (k, cand) in [(-1i64, si.mul(&y)), (1, s.mul(&y))] {
            if (cand.len(), cand.letters()) < (best.1.len(), best.1.letters()) {
                best = (k, cand);
            }
        }
        let (k, ymin) = best;
        // y = s^{j−k} · ymin
        let total = j - k;
        let q = total.div_euclid(self.root_exp);
        let rho = total.rem_euclid(self.root_exp);
        let rep = self.conj.mul(&s.pow(rho)).mul(&ymin);
        (q, rep)
    }

    fn reduce_syllables(&self, w: &Word) -> (Word, Vec<(i64, Word)>) {
        let mut lead = Word::identity();
        // Built right to left: the last element is the leftmost syllable.
        let mut stack: Vec<(i64, Word)> = Vec::new();
        for syl in self.syllables(w).into_iter().rev() {
            match syl {
                Syllable::F(f) => lead = f.mul(&lead),
                Syllable::T(n) => {
                    let (q, c) = self.coset_decompose(&lead);
                    let uq = self.u.pow(q);
                    if c.is_identity() && !stack.is_empty() {
                        let top = stack.last_mut().unwrap();
                        top.0 += n;
                        if top.0 == 0 {
                            let (_, c2) = stack.pop().unwrap();
                            lead = uq.mul(&c2);
                        } else {
                            lead = uq;
                        }
                    } else {
                        stack.push((n, c));
                        lead = uq;
                    }
                }
            }
        }
        stack.reverse();
        (lead, stack)
    }

    pub fn normal_form(&self, w: &Word) -> NormalForm {
        let (lead, stack) = self.reduce_syllables(w);
        match stack.as_slice() {
            [] => {
                if let Some(q) = self.u_exponent(&lead) {
                    return NormalForm::Axial { t_exp: 0, u_exp: q };
                }
            }
            [(n, c)] if c.is_identity() => {
                if let Some(q) = self.u_exponent(&lead) {
                    return NormalForm::Axial { t_exp: *n, u_exp: q };
                }
            }
            _ => {}
        }
        let mut out = Vec::with_capacity(stack.len() + 1);
        if !lead.is_identity() || stack.is_empty() {
            out.push((0, lead));
        }
        out.extend(stack);
        NormalForm::Alternating(out)
    }

    pub fn recompose(&self, nf: &NormalForm) -> Word {
        let t = |n: i64| Word::generator_power(self.t_index, n);
        match nf {
            NormalForm::Axial { t_exp, u_exp } => t(*t_exp).mul(&self.u.pow(*u_exp)),
            NormalForm::Alternating(s) => {
                let mut w = Word::identity();
                for (n, v) in s {
                    w.mul_assign(&t(*n));
                    w.mul_assign(v);
                }
                w
            }
        }
    }

    /// Canonical word of the element: `lead · Π t^{n_i} c_i` with each `c_i`
    /// the canonical right-coset representative of `⟨u⟩`.
    pub fn canonical(&self, w: &Word) -> Word {
        let (lead, stack) = self.reduce_syllables(w);
        let mut out = lead;
        for (n, c) in &stack {
            out.mul_assign(&Word::generator_power(self.t_index, *n));
            out.mul_assign(c);
        }
        out
    }

    /// Equality by pinching `t^m f t^n → f t^{m+n}` (`f ∈ ⟨u⟩`) until the
    /// syllable sequence of `w1·w2⁻¹` is reduced.
    pub fn equal(&self, w1: &Word, w2: &Word) -> bool {
        let w = w1.mul(&w2.inverse());
        let mut stack: Vec<Syllable> = Vec::new();
        for syl in self.syllables(&w) {
            match syl {
                Syllable::F(f) => self.push_f(&mut stack, f),
                Syllable::T(n) => self.push_t(&mut stack, n),
            }
        }
        stack.is_empty()
    }

    fn push_f(&self, stack: &mut Vec<Syllable>, f: Word) {
        if let Some(Syllable::F(g)) = stack.last_mut() {
            g.mul_assign(&f);
            if g.is_identity() {
                stack.pop();
            }
        } else if !f.is_identity() {
            stack.push(Syllable::F(f));
        }
    }

    fn push_t(&self, stack: &mut Vec<Syllable>, n: i64) {
        if n == 0 {
            return;
        }
        let len = stack.len();
        if let Some(Syllable::T(m)) = stack.last_mut() {
            *m += n;
            if *m == 0 {
                stack.pop();
            }
            return;
        }
        match stack.last() {
            Some(Syllable::F(f)) if len >= 2 && self.u_exponent(f).is_some() => {
                let Some(Syllable::F(f)) = stack.pop() else {
                    unreachable!()
                };
                let Some(Syllable::T(m)) = stack.pop() else {
                    unreachable!()
                };
                self.push_f(stack, f);
                self.push_t(stack, m + n);
                return;
            }
            _ => {}
        }
        stack.push(Syllable::T(n));
    }
}

pub fn normal_form_h1(tower: &TowerDescriptor, w: &Word) -> Result<NormalForm, TowerError> {
    Ok(tower.height_one_group()?.normal_form(w))
}

pub fn equal_h1(tower: &TowerDescriptor, w1: &Word, w2: &Word) -> Result<bool, TowerError> {
    Ok(tower.height_one_group()?.equal(w1, w2))
}

/// Genus-2 surface group inside `⟨a, b, t | [t, [a,b]] = e⟩`.
pub fn preset_genus2() -> (TowerDescriptor, SubgroupDescriptor) {
    let base = Basis::new(["a", "b"]).expect("valid names");
    let tower = TowerDescriptor::new(
        base,
        &[LevelSpec {
            u: "a b a^-1 b^-1".into(),
            t: "t".into(),
            a: None,
        }],
    )
    .expect("valid preset");
    let gens: Vec<String> = ["a", "b", "t a t^-1", "t b t^-1"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let names: Vec<String> = ["a1", "b1", "a2", "b2"].iter().map(|s| s.to_string()).collect();
    let y = SubgroupDescriptor::new(&tower, &gens, Some(&names)).expect("valid preset");
    (tower, y)
}

/// `Z²` as `⟨a, t | [t, a] = e⟩`.
pub fn preset_z2() -> (TowerDescriptor, SubgroupDescriptor) {
    let base = Basis::new(["a"]).expect("valid names");
    let tower = TowerDescriptor::new(
        base,
        &[LevelSpec {
            u: "a".into(),
            t: "t".into(),
            a: None,
        }],
    )
    .expect("valid preset");
    let gens: Vec<String> = vec!["a".into(), "t".into()];
    let y = SubgroupDescriptor::new(&tower, &gens, Some(&gens)).expect("valid preset");
    (tower, y)
}

/// Preset lookup by name.
pub fn preset(name: &str) -> Option<(TowerDescriptor, SubgroupDescriptor)> {
    match name {
        "genus2" => Some(preset_genus2()),
        "z2" => Some(preset_z2()),
        _ => None,
    }
}

/// Images of the ball grouped by image word, for external cross-checks.
pub fn ball_images(
    tower: &TowerDescriptor,
    y: &SubgroupDescriptor,
    h: &Homomorphism,
    r: usize,
    cap: u128,
) -> Result<Vec<(Word, Word, Word)>, TowerError> {
    let incl = y.inclusion(tower);
    let hy = h.compose(&incl)?;
    Ok(ball(y.basis(), r, cap)?
        .into_iter()
        .map(|w| {
            let g = incl.apply(&w);
            let img = hy.apply(&w);
            (w, g, img)
        })
        .collect())
}

/// Measured stretch of `h` on `B_Y(r)` for each radius `1..=r_max`.
pub fn stretch_profile(
    tower: &TowerDescriptor,
    y: &SubgroupDescriptor,
    h: &Homomorphism,
    r_max: usize,
    cap: u128,
) -> Result<BTreeMap<usize, usize>, TowerError> {
    let mut out = BTreeMap::new();
    for (w, _, img) in ball_images(tower, y, h, r_max, cap)? {
        for r in w.len().max(1)..=r_max {
            let e = out.entry(r).or_insert(0);
            *e = (*e).max(img.len());
        }
    }
    Ok(out)
}
