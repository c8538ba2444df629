//! The quantitative Baumslag power lemma: if `w = Π_{i=0}^n u^{k_i} b_i`
//! is trivial and the exponents are large enough, some `b_i` commutes
//! with `u`.
//!
//! Variant A (cyclically reduced, primitive `u`):
//! `min_{i>0} |k_i| > (8n+2) · max_{i≥0} {1, |b_i|/|u|}`.
//! Variant B (any `u`): `min_{i≥0} |k_i| ≥ (8n+2) · max_{i≥0} (|b_i| + |u|)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::Rng as _;
use thiserror::Error;

use crate::rng::{stream, Rng};
use crate::words::{ball, commute, Basis, Letter, Word};
use crate::CSV_VERSION_HEADER;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaumslagError {
    #[error("u must be nontrivial")]
    EmptyU,
    #[error("b has {b} entries but k has {k}")]
    LengthMismatch { b: usize, k: usize },
    #[error("instance needs at least one factor")]
    NoFactors,
    #[error("variant A needs a cyclically reduced, primitive u")]
    Precondition,
    #[error("w would have {predicted} letters before reduction (cap {cap})")]
    LengthCap { predicted: u128, cap: u128 },
    #[error("COUNTEREXAMPLE: hypothesis holds and w = e, but no b_i commutes with u: {0}")]
    Counterexample(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    A,
    B,
}

/// `w = Π u^{k_i} b_i`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerInstance {
    pub u: Word,
    pub b: Vec<Word>,
    pub k: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaVerdict {
    pub hypothesis_holds: bool,
    pub w_trivial: bool,
    pub commuting_index: Option<usize>,
}

pub const DEFAULT_LENGTH_CAP: u128 = 100_000_000;

impl PowerInstance {
    pub fn new(u: Word, b: Vec<Word>, k: Vec<i64>) -> Result<Self, BaumslagError> {
        let inst = PowerInstance { u, b, k };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<(), BaumslagError> {
        if self.u.is_identity() {
            return Err(BaumslagError::EmptyU);
        }
        if self.b.len() != self.k.len() {
            return Err(BaumslagError::LengthMismatch {
                b: self.b.len(),
                k: self.k.len(),
            });
        }
        if self.b.is_empty() {
            return Err(BaumslagError::NoFactors);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.b.len() - 1
    }

    /// Length of the unreduced product `Σ|k_i||u| + Σ|b_i|`.
    pub fn unreduced_len(&self) -> u128 {
        let u = self.u.len() as u128;
        self.k.iter().map(|k| k.unsigned_abs() as u128 * u).sum::<u128>()
            + self.b.iter().map(|b| b.len() as u128).sum::<u128>()
    }

    pub fn describe(&self, basis: &Basis) -> String {
        let mut s = format!("u = `{}`;", basis.format_word(&self.u));
        for (b, k) in self.b.iter().zip(&self.k) {
            let _ = write!(s, " (k = {k}, b = `{}`)", basis.format_word(b));
        }
        s
    }
}

fn variant_a_allowed(u: &Word) -> bool {
    u.is_cyclically_reduced() && u.cyclic_decompose().is_ok_and(|d| d.exponent == 1)
}

/// Smallest `|k|` for which every relevant exponent satisfies the variant's
/// hypothesis (0 when the condition is vacuous).
pub fn threshold(inst: &PowerInstance, variant: Variant) -> u64 {
    let n = inst.n() as u128;
    let u = inst.u.len() as u128;
    let factor = 8 * n + 2;
    match variant {
        Variant::A => {
            if n == 0 {
                return 0;
            }
            let m = inst.b.iter().map(|b| b.len() as u128).max().unwrap_or(0).max(u);
            // |k|·|u| > factor·m  ⇔  |k| ≥ ⌊factor·m/|u|⌋ + 1
            (factor * m / u + 1) as u64
        }
        Variant::B => {
            let m = inst.b.iter().map(|b| b.len() as u128 + u).max().unwrap_or(u);
            (factor * m) as u64
        }
    }
}

/// Exact integer check of the variant's hypothesis.
pub fn check_hypothesis(inst: &PowerInstance, variant: Variant) -> Result<bool, BaumslagError> {
    inst.validate()?;
    let n = inst.n() as u128;
    let u = inst.u.len() as u128;
    let factor = 8 * n + 2;
    match variant {
        Variant::A => {
            if !variant_a_allowed(&inst.u) {
                return Err(BaumslagError::Precondition);
            }
            let Some(min_k) = inst.k[1..].iter().map(|k| k.unsigned_abs() as u128).min() else {
                return Ok(true);
            };
            let m = inst.b.iter().map(|b| b.len() as u128).max().unwrap_or(0).max(u);
            Ok(min_k * u > factor * m)
        }
        Variant::B => {
            let min_k = inst.k.iter().map(|k| k.unsigned_abs() as u128).min().unwrap_or(0);
            let m = inst.b.iter().map(|b| b.len() as u128 + u).max().unwrap_or(u);
            Ok(min_k >= factor * m)
        }
    }
}

/// The reduced product `Π u^{k_i} b_i`.
pub fn evaluate_w(inst: &PowerInstance, cap: u128) -> Result<Word, BaumslagError> {
    inst.validate()?;
    let predicted = inst.unreduced_len();
    if predicted > cap {
        return Err(BaumslagError::LengthCap { predicted, cap });
    }
    let mut w = Word::identity();
    for (b, &k) in inst.b.iter().zip(&inst.k) {
        w.mul_assign(&inst.u.pow(k));
        w.mul_assign(b);
    }
    Ok(w)
}

pub fn verify_instance(inst: &PowerInstance, variant: Variant) -> Result<LemmaVerdict, BaumslagError> {
    let hypothesis_holds = check_hypothesis(inst, variant)?;
    let w = evaluate_w(inst, DEFAULT_LENGTH_CAP)?;
    let commuting_index = inst.b.iter().position(|b| commute(&inst.u, b));
    let verdict = LemmaVerdict {
        hypothesis_holds,
        w_trivial: w.is_identity(),
        commuting_index,
    };
    if verdict.hypothesis_holds && verdict.w_trivial && verdict.commuting_index.is_none() {
        let names: Vec<String> = (0..=inst
            .u
            .max_generator()
            .unwrap_or(0)
            .max(inst.b.iter().filter_map(Word::max_generator).max().unwrap_or(0)))
            .map(|i| format!("x{i}"))
            .collect();
        let basis = Basis::new(names).expect("generated names are valid");
        return Err(BaumslagError::Counterexample(inst.describe(&basis)));
    }
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub rank: usize,
    pub n_max: usize,
    pub u_len_max: usize,
    pub b_len_max: usize,
    /// Upper end of the exponent band; raised to the threshold if smaller.
    pub k_max: u64,
    /// Every other trial closes `w` to `e` with small exponents.
    pub closing: bool,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            rank: 2,
            n_max: 3,
            u_len_max: 4,
            b_len_max: 6,
            k_max: 400,
            closing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRow {
    pub trial: u64,
    pub n: usize,
    pub u_len: usize,
    pub threshold: u64,
    pub min_k: u64,
    pub hypothesis_holds: bool,
    pub w_trivial: bool,
    pub commuting_index: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchReport {
    pub rows: Vec<TrialRow>,
    /// Trials with `w = e` while the hypothesis fails.
    pub tightness: Vec<u64>,
}

fn random_reduced(rng: &mut Rng, rank: usize, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_code(rng.random_range(0..2 * rank));
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    Word::from_letters(letters)
}

/// Uniform length, then a uniform reduced word of that length, rejected
/// until cyclically reduced and primitive.
fn random_primitive(rng: &mut Rng, rank: usize, len_max: usize) -> Word {
    loop {
        let len = rng.random_range(1..=len_max);
        let w = random_reduced(rng, rank, len);
        if variant_a_allowed(&w) {
            return w;
        }
    }
}

/// Instance for `trial`, drawn from substream `trial` of `seed`.
pub fn random_instance(seed: u64, trial: u64, bounds: &SearchBounds, variant: Variant) -> PowerInstance {
    let mut rng = stream(seed, trial);
    let n = rng.random_range(0..=bounds.n_max);
    let u = random_primitive(&mut rng, bounds.rank, bounds.u_len_max.max(1));
    let mut b: Vec<Word> = (0..=n)
        .map(|_| {
            let len = rng.random_range(0..=bounds.b_len_max);
            random_reduced(&mut rng, bounds.rank, len)
        })
        .collect();
    let closing = bounds.closing && trial % 2 == 1;
    let mut inst = PowerInstance {
        u,
        b: b.clone(),
        k: alloc::vec![0; n + 1],
    };
    let t = threshold(&inst, variant).max(1);
    let k: Vec<i64> = (0..=n)
        .map(|_| {
            let mag = if closing {
                rng.random_range(1..=t)
            } else {
                rng.random_range(t..=bounds.k_max.max(t))
            };
            if rng.random_bool(0.5) {
                mag as i64
            } else {
                -(mag as i64)
            }
        })
        .collect();
    if closing {
        // Choose b_n so that the whole product collapses.
        let mut prefix = Word::identity();
        for i in 0..n {
            prefix.mul_assign(&inst.u.pow(k[i]));
            prefix.mul_assign(&b[i]);
        }
        prefix.mul_assign(&inst.u.pow(k[n]));
        b[n] = prefix.inverse();
    }
    inst.b = b;
    inst.k = k;
    inst
}

pub fn run_trial(seed: u64, trial: u64, bounds: &SearchBounds, variant: Variant) -> Result<TrialRow, BaumslagError> {
    let inst = random_instance(seed, trial, bounds, variant);
    let verdict = match variant {
        Variant::A | Variant::B => verify_instance(&inst, variant)?,
    };
    Ok(TrialRow {
        trial,
        n: inst.n(),
        u_len: inst.u.len(),
        threshold: threshold(&inst, variant),
        min_k: inst.k.iter().map(|k| k.unsigned_abs()).min().unwrap_or(0),
        hypothesis_holds: verdict.hypothesis_holds,
        w_trivial: verdict.w_trivial,
        commuting_index: verdict.commuting_index,
    })
}

/// Deterministic random search; any violation is returned as an error.
pub fn search_counterexamples(
    seed: u64,
    bounds: &SearchBounds,
    trials: u64,
    variant: Variant,
) -> Result<SearchReport, BaumslagError> {
    let mut report = SearchReport::default();
    for trial in 0..trials {
        let row = run_trial(seed, trial, bounds, variant)?;
        if row.w_trivial && !row.hypothesis_holds {
            report.tightness.push(trial);
        }
        report.rows.push(row);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub instances: u64,
    pub hypothesis_a: u64,
    pub hypothesis_b: u64,
    pub trivial: u64,
}

/// Every `n = 0` instance `u^k b` with `|u| ≤ u_max`, `|b| ≤ b_max`,
/// `|k| ≤ k_max` over the given rank, checked against both variants
/// (variant A only where its precondition holds).
pub fn exhaustive_n0(rank: usize, u_max: usize, b_max: usize, k_max: i64) -> Result<SweepReport, BaumslagError> {
    let names: Vec<String> = (0..rank).map(|i| format!("x{i}")).collect();
    let basis = Basis::new(names).expect("generated names are valid");
    let us = ball(&basis, u_max, u128::MAX).expect("small ball");
    let bs = ball(&basis, b_max, u128::MAX).expect("small ball");
    let mut rep = SweepReport::default();
    for u in us.iter().filter(|u| !u.is_identity()) {
        let a_ok = variant_a_allowed(u);
        for b in &bs {
            let commutes = commute(u, b);
            for k in -k_max..=k_max {
                let inst = PowerInstance {
                    u: u.clone(),
                    b: alloc::vec![b.clone()],
                    k: alloc::vec![k],
                };
                rep.instances += 1;
                let vb = verify_instance(&inst, Variant::B)?;
                debug_assert_eq!(vb.commuting_index.is_some(), commutes);
                rep.hypothesis_b += vb.hypothesis_holds as u64;
                rep.trivial += vb.w_trivial as u64;
                if a_ok {
                    let va = verify_instance(&inst, Variant::A)?;
                    rep.hypothesis_a += va.hypothesis_holds as u64;
                }
            }
        }
    }
    Ok(rep)
}

/// CSV `trial,n,|u|,threshold,min_k,w_trivial,commuting_index`.
pub fn report_csv(report: &SearchReport) -> String {
    let mut s = String::new();
    s.push_str(CSV_VERSION_HEADER);
    s.push('\n');
    s.push_str("trial,n,|u|,threshold,min_k,w_trivial,commuting_index\n");
    for r in &report.rows {
        let _ = write!(
            s,
            "{},{},{},{},{},{},",
            r.trial, r.n, r.u_len, r.threshold, r.min_k, r.w_trivial
        );
        if let Some(i) = r.commuting_index {
            let _ = write!(s, "{i}");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Basis {
        Basis::new(["a", "b"]).unwrap()
    }

    fn inst(u: &str, b: &[&str], k: &[i64]) -> PowerInstance {
        let basis = ab();
        PowerInstance::new(
            basis.parse_word(u).unwrap(),
            b.iter().map(|s| basis.parse_word(s).unwrap()).collect(),
            k.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn hypothesis_examples() {
        assert!(check_hypothesis(&inst("a", &["b"], &[1]), Variant::A).unwrap());
        assert!(check_hypothesis(&inst("a", &["b", "b"], &[100, 100]), Variant::A).unwrap());
        // n = 1, |u| = 1, |b| ≤ 1: A needs |k_1| > 10, B needs min |k| ≥ 20.
        assert!(!check_hypothesis(&inst("a", &["b", "b"], &[0, 10]), Variant::A).unwrap());
        assert!(check_hypothesis(&inst("a", &["b", "b"], &[0, 11]), Variant::A).unwrap());
        assert!(!check_hypothesis(&inst("a", &["b", "b"], &[19, 20]), Variant::B).unwrap());
        assert!(check_hypothesis(&inst("a", &["b", "b"], &[20, 20]), Variant::B).unwrap());
        assert_eq!(threshold(&inst("a", &["b", "b"], &[0, 0]), Variant::A), 11);
        assert_eq!(threshold(&inst("a", &["b", "b"], &[0, 0]), Variant::B), 20);
        assert_eq!(
            check_hypothesis(&inst("a^2", &["b"], &[1]), Variant::A),
            Err(BaumslagError::Precondition)
        );
        assert_eq!(
            check_hypothesis(&inst("b a b^-1", &["b"], &[1]), Variant::A),
            Err(BaumslagError::Precondition)
        );
        assert!(check_hypothesis(&inst("b a b^-1", &["b"], &[30]), Variant::B).unwrap());
    }

    #[test]
    fn boundary_is_strict_only_for_a() {
        // |k|·|u| = (8n+2)·max(|u|, |b|) exactly.
        let i = inst("a b", &["a", "b a"], &[10, 10]);
        assert!(!check_hypothesis(&i, Variant::A).unwrap());
        let j = inst("a", &["b", "b"], &[20, -20]);
        assert!(check_hypothesis(&j, Variant::B).unwrap());
    }

    #[test]
    fn evaluation_examples() {
        let basis = ab();
        assert!(evaluate_w(&inst("a", &["a^-5"], &[5]), 1000).unwrap().is_identity());
        assert_eq!(
            evaluate_w(&inst("a", &["b"], &[3]), 1000).unwrap(),
            basis.parse_word("a^3 b").unwrap()
        );
        assert_eq!(
            evaluate_w(&inst("a", &["b"], &[3000]), 100),
            Err(BaumslagError::LengthCap {
                predicted: 3001,
                cap: 100
            })
        );
    }

    #[test]
    fn verdict_examples() {
        let v = verify_instance(&inst("a", &["a^2"], &[7]), Variant::A).unwrap();
        assert_eq!(
            v,
            LemmaVerdict {
                hypothesis_holds: true,
                w_trivial: false,
                commuting_index: Some(0)
            }
        );
        let v = verify_instance(&inst("a", &["b"], &[50]), Variant::A).unwrap();
        assert_eq!(
            v,
            LemmaVerdict {
                hypothesis_holds: true,
                w_trivial: false,
                commuting_index: None
            }
        );
        // Tightness probe: closing with b₀ = u^{-k}.
        let v = verify_instance(&inst("a b", &["b^-1 a^-1 b^-1 a^-1 b^-1 a^-1"], &[3]), Variant::B).unwrap();
        assert!(v.w_trivial && !v.hypothesis_holds);
        assert_eq!(v.commuting_index, Some(0));
    }

    #[test]
    fn counterexample_is_an_error() {
        // Not a valid instance of the lemma: with no hypothesis the product
        // a b a^-1 b^-1 · (b a b^-1 a^-1) is trivial and nothing commutes.
        // Variant B fails its hypothesis here, so no error is raised.
        let i = inst("a", &["b", "b^-1", "b a b^-1 a^-1"], &[1, -1, 0]);
        let v = verify_instance(&i, Variant::B).unwrap();
        assert!(v.w_trivial && !v.hypothesis_holds && v.commuting_index.is_none());
    }

    #[test]
    fn empty_search() {
        let r = search_counterexamples(1, &SearchBounds::default(), 0, Variant::B).unwrap();
        assert!(r.rows.is_empty() && r.tightness.is_empty());
        assert_eq!(
            report_csv(&r),
            "# residua-csv v1\ntrial,n,|u|,threshold,min_k,w_trivial,commuting_index\n"
        );
    }

    #[test]
    fn seeded_search_has_no_violations() {
        let bounds = SearchBounds::default();
        let r = search_counterexamples(42, &bounds, 2000, Variant::B).unwrap();
        assert!(r.rows.iter().all(|row| row.hypothesis_holds && !row.w_trivial));
        let again = search_counterexamples(42, &bounds, 2000, Variant::B).unwrap();
        assert_eq!(report_csv(&r), report_csv(&again));
        let ra = search_counterexamples(7, &SearchBounds { k_max: 100, ..bounds }, 1000, Variant::A).unwrap();
        assert!(ra.rows.iter().all(|row| row.hypothesis_holds));
    }

    #[test]
    fn closing_trials_feed_tightness() {
        let bounds = SearchBounds {
            closing: true,
            ..SearchBounds::default()
        };
        let r = search_counterexamples(3, &bounds, 400, Variant::B).unwrap();
        for row in r.rows.iter().filter(|r| r.trial % 2 == 1) {
            assert!(row.w_trivial);
        }
        assert!(!r.tightness.is_empty());
    }

    #[test]
    fn small_exhaustive_sweep() {
        let rep = exhaustive_n0(2, 2, 2, 12).unwrap();
        assert_eq!(rep.instances, 16 * 17 * 25);
        assert!(rep.trivial > 0);
    }

    proptest! {
        #[test]
        fn evaluate_matches_naive(
            u in proptest::collection::vec((0usize..2, any::<bool>()), 1..4),
            parts in proptest::collection::vec((proptest::collection::vec((0usize..2, any::<bool>()), 0..4), -6i64..6), 1..4),
        ) {
            let u = Word::from_letters(u.into_iter().map(|(g, s)| Letter::new(g, s)));
            prop_assume!(!u.is_identity());
            let b: Vec<Word> = parts.iter().map(|(w, _)| Word::from_letters(w.iter().map(|&(g, s)| Letter::new(g, s)))).collect();
            let k: Vec<i64> = parts.iter().map(|(_, k)| *k).collect();
            let i = PowerInstance::new(u.clone(), b.clone(), k.clone()).unwrap();
            let mut raw: Vec<Letter> = Vec::new();
            for (bi, ki) in b.iter().zip(&k) {
                for _ in 0..ki.unsigned_abs() {
                    let piece = if *ki < 0 { u.inverse() } else { u.clone() };
                    raw.extend_from_slice(piece.letters());
                }
                raw.extend_from_slice(bi.letters());
            }
            prop_assert_eq!(raw.len() as u128, i.unreduced_len());
            let w = evaluate_w(&i, 10_000).unwrap();
            prop_assert_eq!(&w, &Word::from_letters(raw));
            prop_assert!(w.len() as u128 <= i.unreduced_len());
        }
    }
}
