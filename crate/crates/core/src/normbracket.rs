//! Two-sided estimates of `‖λ_F(a)‖` for finitely supported `a ∈ C[F]`.
//!
//! With `c₁ = a*a` and `c_{j+1} = c_j²` (so `c_j = (a*a)^m`, `m = 2^{j−1}`),
//! `‖λ(a)‖^{2m} = ‖λ(c_j)‖`, which lies between `‖c_j‖₂` and
//! `(R_j+1)^{3/2}‖c_j‖₂` when `c_j` is supported on the radius-`R_j` ball.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraError, Limits};
use crate::words::ball_size;
use crate::CSV_VERSION_HEADER;

pub const FLOAT_DISCLAIMER: &str =
    "double-precision evaluation without directed rounding; bounds are exact up to float error";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("the zero element has no norm bracket")]
    Zero,
    #[error("norm brackets need a free-group context")]
    NotFree,
    #[error("max_doublings must be at least 1")]
    NoDoublings,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// One step of the repeated-squaring schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleRow {
    pub j: u32,
    pub m: u64,
    /// `‖c_j‖₂`.
    pub l2: f64,
    pub radius: usize,
    pub terms: usize,
    pub lower: f64,
    pub upper: f64,
    /// False when `c_j` was only measured (hash-partitioned passes) and
    /// never held in memory.
    pub materialized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TargetRatio,
    MaxDoublings,
    TermCap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub l1_cap: f64,
    pub l2: f64,
    pub schedule: Vec<ScheduleRow>,
    pub stop: StopReason,
    /// The schedule ended at the term cap before the requested depth.
    pub truncated: bool,
    /// Matrix coefficients: the upper bound is not certified.
    pub heuristic_upper: bool,
    pub disclaimer: &'static str,
}

impl NormBracket {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichOptions {
    pub max_doublings: u32,
    /// Stop once `upper / lower` is at most this.
    pub target_ratio: f64,
    pub limits: Limits,
    /// Passes allowed for a final measured-only squaring (0 disables it).
    pub max_stat_passes: usize,
}

impl Default for SandwichOptions {
    fn default() -> Self {
        SandwichOptions {
            max_doublings: 8,
            target_ratio: 1.0,
            limits: Limits::default(),
            max_stat_passes: 16,
        }
    }
}

pub fn sandwich(a: &AlgebraElement, max_doublings: u32, target_ratio: f64) -> Result<NormBracket, NormError> {
    sandwich_with(
        a,
        &SandwichOptions {
            max_doublings,
            target_ratio,
            ..SandwichOptions::default()
        },
    )
}

fn row(j: u32, l2: f64, radius: usize, terms: usize, matrix_dim: Option<usize>, materialized: bool) -> ScheduleRow {
    let m = 1u64 << (j - 1);
    let inv = 1.0 / (2.0 * m as f64);
    let certified = match matrix_dim {
        // Some column of the block operator applied to a basis vector
        // already has norm ≥ ‖c‖_F / √r.
        Some(r) => l2 / (r as f64).sqrt(),
        None => l2,
    };
    let factor = ((radius + 1) as f64).powf(1.5);
    ScheduleRow {
        j,
        m,
        l2,
        radius,
        terms,
        lower: certified.powf(inv),
        upper: (factor * l2).powf(inv),
        materialized,
    }
}

pub fn sandwich_with(a: &AlgebraElement, opts: &SandwichOptions) -> Result<NormBracket, NormError> {
    if !a.context().is_free() {
        return Err(NormError::NotFree);
    }
    if a.is_empty() {
        return Err(NormError::Zero);
    }
    if opts.max_doublings == 0 {
        return Err(NormError::NoDoublings);
    }
    let dim = a.matrix_dim();
    let rank = a.context().basis().rank();
    let l1 = a.l1();
    let l2 = a.l2();
    let mut out = NormBracket {
        lower: match dim {
            Some(r) => l2 / (r as f64).sqrt(),
            None => l2,
        },
        upper: l1,
        l1_cap: l1,
        l2,
        schedule: Vec::new(),
        stop: StopReason::MaxDoublings,
        truncated: false,
        heuristic_upper: dim.is_some(),
        disclaimer: FLOAT_DISCLAIMER,
    };

    let mut current = match a.star().convolve(a, &opts.limits) {
        Ok(c) => Some(c),
        Err(AlgebraError::TermCap { .. } | AlgebraError::LetterCap { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut j = 1u32;
    loop {
        let Some(c) = current.take() else {
            out.stop = StopReason::TermCap;
            out.truncated = true;
            break;
        };
        let r = row(j, c.l2(), c.support_radius()?, c.len(), dim, true);
        push_row(&mut out, r);
        if out.ratio() <= opts.target_ratio {
            out.stop = StopReason::TargetRatio;
            break;
        }
        if j >= opts.max_doublings {
            out.stop = StopReason::MaxDoublings;
            break;
        }
        let radius = c.support_radius()?;
        let pairs = (c.len() as u128) * (c.len() as u128);
        let predicted = pairs.min(ball_size(rank, 2 * radius));
        let letters = predicted.saturating_mul(2 * radius as u128);
        if predicted <= opts.limits.max_terms as u128 && letters <= opts.limits.max_letters as u128 {
            match c.convolve(&c, &opts.limits) {
                Ok(next) => {
                    current = Some(next);
                    j += 1;
                    continue;
                }
                Err(AlgebraError::TermCap { .. } | AlgebraError::LetterCap { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
        // Too large to hold: measure the next level only, then stop.
        out.stop = StopReason::TermCap;
        out.truncated = true;
        if opts.max_stat_passes > 0 {
            let resident = (opts.limits.max_terms / 4).max(1);
            if let Ok(s) = c.square_stats(resident, opts.max_stat_passes) {
                push_row(&mut out, row(j + 1, s.l2_sq.sqrt(), s.radius, s.terms, dim, false));
                if j + 1 >= opts.max_doublings {
                    out.stop = StopReason::MaxDoublings;
                    out.truncated = false;
                }
            }
        }
        break;
    }
    Ok(out)
}

fn push_row(out: &mut NormBracket, r: ScheduleRow) {
    out.lower = out.lower.max(r.lower);
    out.upper = out.upper.min(r.upper);
    out.schedule.push(r);
}

/// Lower values along the schedule never decrease (up to relative `tol`).
pub fn lower_is_monotone(b: &NormBracket, tol: f64) -> bool {
    b.schedule.windows(2).all(|w| w[1].lower >= w[0].lower * (1.0 - tol))
}

/// CSV with header `j,m,l2,radius,lower,upper`.
pub fn bracket_report(b: &NormBracket) -> String {
    let mut s = String::new();
    s.push_str(CSV_VERSION_HEADER);
    s.push('\n');
    s.push_str("j,m,l2,radius,lower,upper\n");
    for r in &b.schedule {
        let _ = writeln!(s, "{},{},{},{},{},{}", r.j, r.m, r.l2, r.radius, r.lower, r.upper);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{scalar_element, Coefficient, Context};
    use crate::linalg::CMatrix;
    use crate::words::{Basis, Word};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn f(names: &[&str]) -> Context {
        Context::free(Basis::new(names.iter().copied()).unwrap())
    }

    /// Closed walks of length `n` from the root of the `d`-regular tree,
    /// by dynamic programming over the distance to the root.
    fn tree_closed_walks(d: usize, n: usize) -> f64 {
        let mut v = alloc::vec![0.0f64; n + 2];
        v[0] = 1.0;
        for _ in 0..n {
            let mut w = alloc::vec![0.0f64; n + 2];
            for (k, &x) in v.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                if k == 0 {
                    w[1] += d as f64 * x;
                } else {
                    w[k - 1] += x;
                    if k + 1 < w.len() {
                        w[k + 1] += (d - 1) as f64 * x;
                    }
                }
            }
            v = w;
        }
        v[0]
    }

    #[test]
    fn dp_oracle_small_values() {
        // 4-regular tree: 4, 28, 232 closed walks of lengths 2, 4, 6.
        assert_eq!(tree_closed_walks(4, 2), 4.0);
        assert_eq!(tree_closed_walks(4, 4), 28.0);
        assert_eq!(tree_closed_walks(4, 6), 232.0);
        assert_eq!(tree_closed_walks(2, 4), 6.0);
    }

    #[test]
    fn unitary_is_exact() {
        let ctx = f(&["a", "b"]);
        for w in ["", "a", "a b^-1 a"] {
            let a = scalar_element(ctx.clone(), &[(1.0, w)]).unwrap();
            let b = sandwich(&a, 4, 1.0 + 1e-12).unwrap();
            assert_eq!(b.schedule.len(), 1);
            assert!((b.lower - 1.0).abs() < 1e-15 && (b.upper - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rank_one_brackets_two() {
        let a = scalar_element(f(&["a"]), &[(1.0, ""), (1.0, "a")]).unwrap();
        let b = sandwich(&a, 8, 1.0).unwrap();
        assert!(b.contains(2.0));
        assert!(lower_is_monotone(&b, 0.0));
        assert!(b.lower > 1.8);
    }

    #[test]
    fn kesten_schedule_matches_tree_walks() {
        let a = scalar_element(f(&["a", "b"]), &[(1.0, "a"), (1.0, "a^-1"), (1.0, "b"), (1.0, "b^-1")]).unwrap();
        let b = sandwich(&a, 3, 1.0).unwrap();
        assert_eq!(b.schedule.len(), 3);
        for r in &b.schedule {
            // c_j = a^{2m}, so ‖c_j‖₂² = a^{4m}(e).
            let walks = tree_closed_walks(4, 4 * r.m as usize);
            assert!((r.l2 * r.l2 - walks).abs() <= 1e-9 * walks, "j={}", r.j);
        }
        assert!(b.contains(2.0 * 3f64.sqrt()));
        assert!((b.lower - 2.862107472209264).abs() < 1e-9);
    }

    #[test]
    fn zero_and_non_free_rejected() {
        let z = AlgebraElement::zero(f(&["a"]), None);
        assert_eq!(sandwich(&z, 3, 1.0), Err(NormError::Zero));
        let a = scalar_element(f(&["a"]), &[(1.0, "a")]).unwrap();
        assert_eq!(sandwich(&a, 0, 1.0), Err(NormError::NoDoublings));
    }

    #[test]
    fn term_cap_truncates_instead_of_failing() {
        let a = scalar_element(f(&["a", "b"]), &[(1.0, "a"), (1.0, "b"), (1.0, "")]).unwrap();
        let opts = SandwichOptions {
            max_doublings: 8,
            target_ratio: 1.0,
            limits: Limits {
                max_terms: 40,
                max_letters: u64::MAX,
            },
            max_stat_passes: 0,
        };
        let b = sandwich_with(&a, &opts).unwrap();
        assert!(b.truncated);
        assert_eq!(b.stop, StopReason::TermCap);
        assert!(!b.schedule.is_empty());
        assert!(b.l2 <= b.lower && b.lower <= b.upper && b.upper <= b.l1_cap);
    }

    #[test]
    fn measured_last_row_agrees_with_materialized() {
        let a = scalar_element(f(&["a", "b"]), &[(1.0, "a"), (0.5, "b^-1"), (0.25, "a b")]).unwrap();
        let full = sandwich(&a, 4, 1.0).unwrap();
        let opts = SandwichOptions {
            max_doublings: 4,
            target_ratio: 1.0,
            limits: Limits {
                max_terms: full.schedule[2].terms,
                max_letters: u64::MAX,
            },
            max_stat_passes: 64,
        };
        let cut = sandwich_with(&a, &opts).unwrap();
        let last = cut.schedule.last().unwrap();
        assert!(!last.materialized);
        let same = full.schedule.iter().find(|r| r.j == last.j).unwrap();
        assert_eq!(last.terms, same.terms);
        assert_eq!(last.radius, same.radius);
        assert!((last.l2 - same.l2).abs() <= 1e-10 * same.l2);
    }

    #[test]
    fn matrix_mode_is_flagged() {
        let ctx = f(&["a", "b"]);
        let a = AlgebraElement::from_terms(
            ctx,
            [
                (Word::identity(), Coefficient::Matrix(CMatrix::identity(2))),
                (
                    Word::identity().mul(&Basis::new(["a", "b"]).unwrap().parse_word("a").unwrap()),
                    Coefficient::Matrix(CMatrix::unit(2, 0, 1)),
                ),
            ],
        )
        .unwrap();
        let b = sandwich(&a, 4, 1.0).unwrap();
        assert!(b.heuristic_upper);
        assert!(b.lower <= b.upper && b.upper <= b.l1_cap + 1e-12);
        assert!(b.lower >= 1.0 - 1e-12);
    }

    #[test]
    fn report_formats() {
        let empty = NormBracket {
            lower: 1.0,
            upper: 1.0,
            l1_cap: 1.0,
            l2: 1.0,
            schedule: Vec::new(),
            stop: StopReason::TermCap,
            truncated: true,
            heuristic_upper: false,
            disclaimer: FLOAT_DISCLAIMER,
        };
        assert_eq!(bracket_report(&empty), "# residua-csv v1\nj,m,l2,radius,lower,upper\n");
        let a = scalar_element(f(&["a"]), &[(1.0, "a")]).unwrap();
        let one = sandwich(&a, 1, 1.0).unwrap();
        assert_eq!(
            bracket_report(&one),
            "# residua-csv v1\nj,m,l2,radius,lower,upper\n1,1,1,0,1,1\n"
        );
        let k = scalar_element(f(&["a", "b"]), &[(1.0, "a"), (1.0, "b")]).unwrap();
        let many = sandwich(&k, 3, 1.0).unwrap();
        let text = bracket_report(&many);
        assert_eq!(text.lines().count(), 2 + many.schedule.len());
        assert!(text.lines().nth(4).unwrap().starts_with("3,4,"));
    }

    fn arb_element() -> impl Strategy<Value = AlgebraElement> {
        proptest::collection::vec((0usize..13, -2.0f64..2.0), 1..5).prop_map(|terms| {
            let ball = crate::words::ball(&Basis::new(["x", "y"]).unwrap(), 2, 100).unwrap();
            AlgebraElement::from_terms(
                f(&["x", "y"]),
                terms
                    .into_iter()
                    .map(|(i, c)| (ball[i % ball.len()].clone(), Coefficient::scalar(c, 0.0))),
            )
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn containment_and_monotonicity(a in arb_element()) {
            prop_assume!(!a.is_empty());
            let opts = SandwichOptions {
                max_doublings: 4,
                target_ratio: 1.0,
                limits: Limits { max_terms: 20_000, max_letters: 2_000_000 },
                max_stat_passes: 4,
            };
            let b = sandwich_with(&a, &opts).unwrap();
            prop_assert!(lower_is_monotone(&b, 1e-12));
            prop_assert!(b.l2 <= b.lower * (1.0 + 1e-12));
            prop_assert!(b.lower <= b.upper * (1.0 + 1e-12));
            prop_assert!(b.upper <= b.l1_cap * (1.0 + 1e-12));
        }

        #[test]
        fn homogeneity(a in arb_element(), t in 0.1f64..5.0, theta in 0.0f64..6.3) {
            prop_assume!(!a.is_empty());
            let s = Complex64::from_polar(t, theta);
            let b = sandwich(&a, 3, 1.0).unwrap();
            let bt = sandwich(&a.scale(s), 3, 1.0).unwrap();
            prop_assert!((bt.lower - t * b.lower).abs() <= 1e-9 * t * b.lower);
            prop_assert!((bt.upper - t * b.upper).abs() <= 1e-9 * t * b.upper);
        }
    }
}
