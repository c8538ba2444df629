//! Certificates that a homomorphism `φ: Γ → F` almost preserves reduced
//! C*-norms of given unit-ℓ¹ elements `a ∈ C[Γ]` supported in `B_Y(R)`.
//!
//! With `b = φ(a)` and `m` from [`choose_m`], the chain is
//!
//! ```text
//! ‖λ_F(b)‖^{2m} = ‖λ_F((b*b)^m)‖ ≤ (ρ+1)^{3/2} ‖(b*b)^m‖₂      (Haagerup, ρ = 2m·|b|)
//!              = (ρ+1)^{3/2} ‖(a*a)^m‖₂                        (φ injective on B_Y(2mR))
//!              ≤ (ρ+1)^{3/2} ‖λ_Γ(a)‖^{2m}.
//! ```
//!
//! `‖λ_Γ(a)‖` itself is never computed. It is bounded below by the proxy
//! `P_j = ‖(a*a)^{2^{j−1}}‖₂^{1/2^j}`, computed exactly in `C[Γ]` with
//! canonical normal forms, and above by `‖a‖₁ = 1`. All slacks are
//! relative to this proxy chain.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write as _;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraError, Coefficient, Context, Limits};
use crate::tower::{
    degree, discriminating_hom, formula_exponents, retraction_map, verify_on_ball, DiscriminateOptions, Homomorphism,
    SubgroupDescriptor, TowerDescriptor, TowerError,
};
use crate::words::Word;
use crate::CSV_VERSION_HEADER;

pub const SLACK_NOTE: &str = "final_slack is relative to the proxy chain: norm_upper_free <= proxy + epsilon, \
where proxy is a certified lower bound for the reduced norm in the domain group";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("element {index}: l1 norm {l1} is not 1 (tolerance 1e-9)")]
    Normalization { index: usize, l1: f64 },
    #[error("element {index}: support radius {radius} exceeds R = {bound}")]
    Support { index: usize, radius: usize, bound: usize },
    #[error("element {index} is not over the subgroup generators")]
    Context { index: usize },
    #[error("certificates need a tower of height at most 1 (height {0})")]
    Height(usize),
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    #[error("net mode supports at most 3 support elements (got {0})")]
    NetTooLarge(usize),
    #[error("exponent {0} does not fit the image-size caps")]
    ExponentTooLarge(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `ln` of both sides of `[C(2mR)^D]^{3/(4m)} ≤ 1 + ε/3`.
pub fn m_choice_logs(c: f64, d: u32, r: u64, eps: f64, m: u64) -> (f64, f64) {
    let lhs = 3.0 / (4.0 * m as f64) * (c.ln() + d as f64 * (2.0 * m as f64 * r as f64).ln());
    (lhs, (1.0 + eps / 3.0).ln())
}

pub fn m_choice_holds(c: f64, d: u32, r: u64, eps: f64, m: u64) -> bool {
    let (l, r_) = m_choice_logs(c, d, r, eps, m);
    l <= r_
}

/// Smallest `m ≥ 1` with `[C(2mR)^D]^{3/(4m)} ≤ 1 + ε/3`. The left side
/// decreases in `m` from `m = 2` on, so a doubling search followed by
/// bisection finds it.
pub fn choose_m(c: f64, d: u32, r: u64, eps: f64) -> Result<u64, PipelineError> {
    if !(c >= 1.0) || d < 1 || r < 1 || !(eps > 0.0) {
        return Err(PipelineError::Parameter("choose_m needs C ≥ 1, D ≥ 1, R ≥ 1, ε > 0"));
    }
    if m_choice_holds(c, d, r, eps, 1) {
        return Ok(1);
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while !m_choice_holds(c, d, r, eps, hi) {
        lo = hi;
        hi = hi
            .checked_mul(2)
            .ok_or(PipelineError::Parameter("no admissible m below 2^63"))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if m_choice_holds(c, d, r, eps, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    /// Radii whose measured stretch fixes `C = max stretch(r)/r^D`.
    pub stretch_radii: Vec<usize>,
    /// Radius on which the certificate map is checked exhaustively.
    pub verify_radius: usize,
    /// Squarings used for the proxy lower bound.
    pub proxy_doublings: u32,
    /// Proxy levels also recomputed in `C[F]` through a verified map.
    pub transfer_depth: u32,
    pub limits: Limits,
    pub max_image_letters: u128,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            stretch_radii: vec![1, 2, 3],
            verify_radius: 2,
            proxy_doublings: 3,
            transfer_depth: 2,
            limits: Limits::default(),
            max_image_letters: 100_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateRow {
    pub l1: f64,
    pub l2: f64,
    /// Best proxy `P_j` and the level `j` achieving it.
    pub proxy: f64,
    pub proxy_level: u32,
    pub proxy_schedule: Vec<f64>,
    /// `‖(a*a)^m‖₂` lies in `[l2_power_lower, l2_power_upper]`.
    pub l2_power_lower: f64,
    pub l2_power_upper: f64,
    /// Support radius of `b = φ(a)` in `F`.
    pub image_radius: usize,
    pub image_l1: f64,
    /// `(ρ+1)^{3/2}` with `ρ = 2m · image_radius`.
    pub haagerup_factor: f64,
    /// `haagerup_factor^{1/2m}`.
    pub chain_factor: f64,
    pub norm_upper_free: f64,
    /// `1 + ε/3 − chain_factor`.
    pub chain_slack: f64,
    /// `proxy + ε − norm_upper_free`.
    pub final_slack: f64,
    /// Levels whose proxy was reproduced through a verified map into `F`.
    pub transfer_checked: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrfCertificate {
    pub radius: usize,
    pub epsilon: f64,
    pub m: u64,
    pub degree: u32,
    pub c_meas: f64,
    /// `(r, stretch)` measurements behind `c_meas`.
    pub stretch_measurements: Vec<(usize, usize)>,
    /// `ln` of both sides of the m-choice inequality, at `m` and `m − 1`.
    pub m_choice: (f64, f64),
    pub m_minus_one_fails: bool,
    pub phi: Homomorphism,
    pub phi_exponents: Vec<u64>,
    /// `2mR`, the radius the construction targets.
    pub certified_radius: usize,
    /// Radius on which injectivity was checked exhaustively.
    pub injectivity_verified_radius: usize,
    pub phi_max_image_len: usize,
    pub rows: Vec<CertificateRow>,
}

impl CsrfCertificate {
    pub fn all_slacks_nonnegative(&self) -> bool {
        self.rows.iter().all(|r| r.chain_slack >= 0.0 && r.final_slack >= 0.0)
    }
}

fn group_context(tower: &TowerDescriptor) -> Result<Context, PipelineError> {
    match tower.height() {
        0 => Ok(Context::free(tower.full_basis().clone())),
        1 => Ok(Context::HeightOne(Arc::new(tower.height_one_group()?))),
        h => Err(PipelineError::Height(h)),
    }
}

/// `P_j = ‖(a*a)^{2^{j−1}}‖₂^{1/2^j}` for `j = 1..=doublings`, computed in
/// the group algebra of `ctx` (stops early at the term cap).
pub fn proxy_schedule(a: &AlgebraElement, doublings: u32, limits: &Limits) -> Result<Vec<f64>, PipelineError> {
    let mut out = Vec::new();
    let mut c = a.star().convolve(a, limits)?;
    for j in 1..=doublings {
        let m = (1u64 << (j - 1)) as f64;
        out.push(c.l2().powf(1.0 / (2.0 * m)));
        if j == doublings {
            break;
        }
        match c.convolve(&c, limits) {
            Ok(next) => c = next,
            Err(AlgebraError::TermCap { .. } | AlgebraError::LetterCap { .. }) => break,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

fn check_elements(y: &SubgroupDescriptor, radius: usize, elements: &[AlgebraElement]) -> Result<(), PipelineError> {
    for (index, a) in elements.iter().enumerate() {
        if !a.context().is_free() || a.context().basis() != y.basis() || a.matrix_dim().is_some() {
            return Err(PipelineError::Context { index });
        }
        let l1 = a.l1();
        if (l1 - 1.0).abs() > 1e-9 {
            return Err(PipelineError::Normalization { index, l1 });
        }
        let r = a.support_radius()?;
        if r > radius {
            return Err(PipelineError::Support {
                index,
                radius: r,
                bound: radius,
            });
        }
    }
    Ok(())
}

/// Full certificate for each element.
pub fn certify(
    tower: &TowerDescriptor,
    y: &SubgroupDescriptor,
    radius: usize,
    epsilon: f64,
    elements: &[AlgebraElement],
    opts: &CertifyOptions,
) -> Result<CsrfCertificate, PipelineError> {
    if radius == 0 || !(epsilon > 0.0) {
        return Err(PipelineError::Parameter("certify needs R ≥ 1 and ε > 0"));
    }
    let gamma = group_context(tower)?;
    check_elements(y, radius, elements)?;

    let d = degree(tower.height() as u32)
        .to_u32()
        .ok_or(PipelineError::Parameter("degree overflow"))?;
    let disc_opts = DiscriminateOptions {
        max_image_letters: opts.max_image_letters,
        ..DiscriminateOptions::default()
    };
    let mut stretch_measurements = Vec::new();
    let mut c_meas = 1.0f64;
    for &r in &opts.stretch_radii {
        let disc = discriminating_hom(tower, y, r, &disc_opts)?;
        stretch_measurements.push((r, disc.stretch));
        c_meas = c_meas.max(disc.stretch as f64 / (r as f64).powi(d as i32));
    }
    let m = choose_m(c_meas, d, radius as u64, epsilon)?;
    let m_choice = m_choice_logs(c_meas, d, radius as u64, epsilon, m);
    let m_minus_one_fails = m == 1 || !m_choice_holds(c_meas, d, radius as u64, epsilon, m - 1);

    let certified_radius = 2 * m as usize * radius;
    let exps = formula_exponents(tower, certified_radius as u64)
        .iter()
        .map(|e| {
            e.to_u64()
                .ok_or_else(|| PipelineError::ExponentTooLarge(alloc::format!("{e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut hom = retraction_map(tower, &exps, opts.max_image_letters)?;
    let check = verify_on_ball(tower, y, &hom, opts.verify_radius, disc_opts.ball_cap)?;
    hom.metadata.certified_radius = Some(certified_radius);
    hom.metadata.stretch = Some(check.stretch);
    let mut phi = hom.compose(&y.inclusion(tower))?;
    phi.metadata = hom.metadata.clone();
    let free = Context::free(tower.base().clone());

    // Maps verified on B_Y(2·2^{j−1}·R) for the transfer checks.
    let mut transfer_maps: Vec<Homomorphism> = Vec::new();
    for j in 1..=opts.transfer_depth {
        let r = 2 * (1usize << (j - 1)) * radius;
        transfer_maps.push(discriminating_hom(tower, y, r, &disc_opts)?.on_subgroup);
    }

    let incl = y.inclusion(tower);
    let mut rows = Vec::with_capacity(elements.len());
    for a in elements {
        let in_gamma = a.pushforward(&incl, &gamma)?;
        let schedule = proxy_schedule(&in_gamma, opts.proxy_doublings, &opts.limits)?;
        let (proxy_level, proxy) =
            schedule.iter().enumerate().fold(
                (0u32, a.l2()),
                |acc, (i, &p)| if p > acc.1 { (i as u32 + 1, p) } else { acc },
            );

        let mut transfer_checked = 0;
        for (j, psi) in transfer_maps.iter().enumerate() {
            let Some(&p) = schedule.get(j) else { break };
            let b = a.pushforward(psi, &free)?;
            let mut c = b.star().convolve(&b, &opts.limits)?;
            for _ in 0..j {
                c = c.convolve(&c, &opts.limits)?;
            }
            let q = c.l2().powf(1.0 / (2.0 * (1u64 << j) as f64));
            if (q - p).abs() <= 1e-9 * p.max(1e-300) {
                transfer_checked += 1;
            } else {
                break;
            }
        }

        let b = a.pushforward(&phi, &free)?;
        let image_radius = b.support_radius()?;
        let rho = 2.0 * m as f64 * image_radius as f64;
        let ln_h = 1.5 * (rho + 1.0).ln();
        let haagerup_factor = ln_h.exp();
        let chain_factor = (ln_h / (2.0 * m as f64)).exp();
        let l1 = a.l1();
        let image_l1 = b.l1();
        let norm_upper_free = image_l1.min(chain_factor * l1);
        rows.push(CertificateRow {
            l1,
            l2: a.l2(),
            proxy,
            proxy_level,
            proxy_schedule: schedule,
            l2_power_lower: proxy.powf(2.0 * m as f64),
            l2_power_upper: l1.powf(2.0 * m as f64),
            image_radius,
            image_l1,
            haagerup_factor,
            chain_factor,
            norm_upper_free,
            chain_slack: 1.0 + epsilon / 3.0 - chain_factor,
            final_slack: proxy + epsilon - norm_upper_free,
            transfer_checked,
        });
    }

    Ok(CsrfCertificate {
        radius,
        epsilon,
        m,
        degree: d,
        c_meas,
        stretch_measurements,
        m_choice,
        m_minus_one_fails,
        phi_max_image_len: phi.max_image_len(),
        phi,
        phi_exponents: exps,
        certified_radius,
        injectivity_verified_radius: opts.verify_radius,
        rows,
    })
}

/// CSV of certificate rows, with the slack caveat as a comment line.
pub fn certificate_csv(cert: &CsrfCertificate) -> String {
    let mut s = String::new();
    s.push_str(CSV_VERSION_HEADER);
    s.push('\n');
    let _ = writeln!(s, "# {SLACK_NOTE}");
    s.push_str("element,l1,l2,proxy,proxy_level,l2_power_lower,l2_power_upper,image_radius,haagerup_factor,chain_factor,norm_upper_free,chain_slack,final_slack,transfer_checked\n");
    for (i, r) in cert.rows.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            i,
            r.l1,
            r.l2,
            r.proxy,
            r.proxy_level,
            r.l2_power_lower,
            r.l2_power_upper,
            r.image_radius,
            r.haagerup_factor,
            r.chain_factor,
            r.norm_upper_free,
            r.chain_slack,
            r.final_slack,
            r.transfer_checked
        );
    }
    s
}

/// Grid on `{x ≥ 0, Σx = 1}` with denominator `n`.
fn simplex_grid(s: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(s: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if s == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            go(s - 1, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(s, n, &mut Vec::new(), &mut out);
    out
}

/// Denominator of the real grid: `⌈6(s−1)/ε⌉` (at least 1).
pub fn net_denominator(s: usize, epsilon: f64) -> usize {
    ((6.0 * (s.max(2) - 1) as f64 / epsilon).ceil() as usize).max(1)
}

/// Finite `ε/3`-net of the unit ℓ¹ sphere on a support of at most three
/// group elements.
///
/// Without phases: the real nonnegative slice, a simplex grid with
/// denominator `⌈6(s−1)/ε⌉`. With phases: a grid with twice that
/// denominator, times `⌈6π/ε⌉` equally spaced phases on every nonzero
/// coordinate after the first (norms are invariant under a global phase,
/// so the first is fixed to 1).
pub fn net_mode(
    context: &Context,
    support: &[Word],
    epsilon: f64,
    phases: bool,
) -> Result<Vec<AlgebraElement>, PipelineError> {
    let s = support.len();
    if s == 0 || !(epsilon > 0.0) {
        return Err(PipelineError::Parameter("net needs a nonempty support and ε > 0"));
    }
    if s > 3 {
        return Err(PipelineError::NetTooLarge(s));
    }
    let n = if phases {
        2 * net_denominator(s, epsilon)
    } else {
        net_denominator(s, epsilon)
    };
    let k = if phases {
        (6.0 * PI / epsilon).ceil() as usize
    } else {
        1
    };
    let mut out = Vec::new();
    for point in simplex_grid(s, n) {
        let nonzero: Vec<usize> = (0..s).filter(|&i| point[i] > 0).collect();
        let free_coords = nonzero.len().saturating_sub(1);
        let combos = k.pow(free_coords as u32);
        for mut code in 0..combos {
            let mut terms = Vec::with_capacity(nonzero.len());
            for (pos, &i) in nonzero.iter().enumerate() {
                let mag = point[i] as f64 / n as f64;
                let phase = if pos == 0 {
                    0
                } else {
                    let p = code % k;
                    code /= k;
                    p
                };
                let z = if phase == 0 {
                    Complex64::new(mag, 0.0)
                } else {
                    Complex64::from_polar(mag, 2.0 * PI * phase as f64 / k as f64)
                };
                terms.push((support[i].clone(), Coefficient::Scalar(z)));
            }
            out.push(AlgebraElement::from_terms(context.clone(), terms)?);
        }
    }
    Ok(out)
}
