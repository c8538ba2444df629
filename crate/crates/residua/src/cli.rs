//! Command-line interface. Exit codes: 0 success, 1 usage or input error,
//! 2 computation error (caps, non-convergence), 3 invariant violation.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use residua_core::algebra::{scalar_element, AlgebraElement, AlgebraError, Context, Limits};
use residua_core::baumslag::{exhaustive_n0, report_csv, BaumslagError, SearchBounds, Variant};
use residua_core::normbracket::{bracket_report, sandwich_with, NormError, SandwichOptions};
use residua_core::permrep::{experiment_csv, ExperimentOptions, PermError};
use residua_core::pipeline::{certificate_csv, certify, net_mode, CertifyOptions, PipelineError};
use residua_core::torus::{klein_norm_capped, refine, zr_norm_capped, TorusError, DEFAULT_GRID_CAP};
use residua_core::tower::{
    degree, discriminating_hom, distortion_bound_exact, formula_exponents, DiscriminateOptions, NormalForm, TowerError,
};
use residua_core::words::{Basis, WordError, DEFAULT_BALL_CAP};

use crate::drivers::{baumslag_search, permrep_experiment, with_threads};
use crate::formats::{self, FormatError};

#[derive(Debug, Parser)]
#[command(
    name = "residua",
    version,
    about = "Discriminating maps, group-algebra norm brackets and residual-freeness certificates"
)]
pub struct Cli {
    /// Worker threads for parallel subcommands [default: all cores]
    #[arg(long, global = true, value_name = "K")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified bracket for the reduced C*-norm of a free-group algebra element
    Norm(NormArgs),
    /// Inspect a tower: degree, distortion bound, normal forms
    Tower(TowerArgs),
    /// Build and verify a homomorphism to the base free group injective on a ball
    Discriminate(DiscriminateArgs),
    /// Seeded search for violations of the power lemma, or the exhaustive n = 0 sweep
    Baumslag(BaumslagArgs),
    /// Operator norms in random permutation representations
    Permrep(PermrepArgs),
    /// Exact Fourier-model norms on Z^r or the Klein bottle group
    Torus(TorusArgs),
    /// End-to-end norm-preservation certificate for unit-l1 elements
    Certify(CertifyArgs),
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Comma-separated generator names of the free group
    #[arg(long, value_delimiter = ',', required = true)]
    pub basis: Vec<String>,
    /// Element file: one `RE IM <word>` term per line
    #[arg(long)]
    pub element: PathBuf,
    /// Maximum number of squarings
    #[arg(long, default_value_t = 6)]
    pub doublings: u32,
    /// Stop once upper/lower falls to this ratio
    #[arg(long, default_value_t = 1.0)]
    pub target_ratio: f64,
    /// Cap on stored terms per convolution
    #[arg(long, default_value_t = Limits::default().max_terms)]
    pub max_terms: usize,
    /// Write the CSV here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TowerArgs {
    /// Tower file, or preset:genus2 / preset:z2
    #[arg(long)]
    pub tower: String,
    /// Radius for the distortion bound and formula exponents
    #[arg(long)]
    pub radius: Option<u64>,
    /// Word over the tower generators to put in normal form (height 1; repeatable)
    #[arg(long = "word", value_name = "WORD")]
    pub words: Vec<String>,
    /// Decide whether exactly two given words are equal in the group
    #[arg(long)]
    pub equal: bool,
}

#[derive(Debug, Args)]
pub struct DiscriminateArgs {
    /// Tower file, or preset:genus2 / preset:z2
    #[arg(long)]
    pub tower: String,
    /// Radius of the subgroup ball to inject
    #[arg(long)]
    pub radius: usize,
    /// Search the smallest uniform exponent that passes verification
    #[arg(long)]
    pub tight: bool,
    /// Maximum number of ball words
    #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
    pub ball_cap: u128,
    /// Maximum letters in any generator image
    #[arg(long, default_value_t = 100_000_000)]
    pub max_image_letters: u128,
    /// Also print the images of the subgroup generators
    #[arg(long)]
    pub images: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    A,
    B,
}

#[derive(Debug, Args)]
pub struct BaumslagArgs {
    /// Seed of the random search (required unless --exhaustive-n0)
    #[arg(long, required_unless_present = "exhaustive_n0")]
    pub seed: Option<u64>,
    /// Number of random trials
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Lemma variant: a (cyclically reduced primitive u) or b (general u)
    #[arg(long, value_enum, default_value_t = VariantArg::B)]
    pub variant: VariantArg,
    /// Rank of the free group
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    /// Maximum n (number of factors minus one)
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Maximum length of u
    #[arg(long, default_value_t = 4)]
    pub u_max: usize,
    /// Maximum length of each b_i
    #[arg(long, default_value_t = 6)]
    pub b_max: usize,
    /// Upper end of the exponent band
    #[arg(long, default_value_t = 400)]
    pub k_max: u64,
    /// Make every other trial close w to the identity with small exponents
    #[arg(long)]
    pub closing: bool,
    /// Run the exhaustive n = 0 sweep instead of the random search
    #[arg(long)]
    pub exhaustive_n0: bool,
    /// Write the CSV here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PermrepArgs {
    /// Tower file, or preset:genus2 / preset:z2
    #[arg(long)]
    pub tower: String,
    /// Element over the subgroup generators [default: sum of the generators]
    #[arg(long)]
    pub element: Option<PathBuf>,
    /// Comma-separated seeds
    #[arg(long = "seed", value_delimiter = ',', required = true)]
    pub seeds: Vec<u64>,
    /// Comma-separated permutation degrees N
    #[arg(long, value_delimiter = ',', default_value = "100,400,1600")]
    pub sizes: Vec<usize>,
    /// Relative residual tolerance of the power iteration
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Iteration cap of the power iteration
    #[arg(long, default_value_t = 20_000)]
    pub max_iters: usize,
    /// Ball radius on which the map to the free group is verified
    #[arg(long, default_value_t = 2)]
    pub phi_radius: usize,
    /// Squarings for the reference bracket of the pushed-forward element
    #[arg(long, default_value_t = 2)]
    pub doublings: u32,
    /// Write the CSV here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TorusArgs {
    /// Element of C[Z^r]: `RE IM k_1 ... k_r` per line
    #[arg(long, conflicts_with = "klein")]
    pub zr: bool,
    /// Element of the Klein bottle group algebra: `RE IM p q` per line for a^p t^q
    #[arg(long)]
    pub klein: bool,
    /// Element file
    #[arg(long)]
    pub element: PathBuf,
    /// Grid size q (angles 2 pi j / q)
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Also print a refinement table for q = grid, 2 grid, ... up to this size
    #[arg(long, value_name = "Q_MAX")]
    pub refine: Option<usize>,
    /// Maximum number of grid points
    #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
    pub grid_cap: u128,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Tower file, or preset:genus2 / preset:z2
    #[arg(long)]
    pub tower: String,
    /// Support radius R of the elements
    #[arg(long)]
    pub radius: usize,
    /// Tolerance epsilon
    #[arg(long)]
    pub epsilon: f64,
    /// Element file over the subgroup generators; elements separated by `---` lines
    #[arg(long, required_unless_present = "net")]
    pub elements: Option<PathBuf>,
    /// Certify an epsilon/3-net on these support words (comma-separated, at most 3) instead
    #[arg(long, value_delimiter = ',', conflicts_with = "elements")]
    pub net: Option<Vec<String>>,
    /// Include phases in the net
    #[arg(long, requires = "net")]
    pub phases: bool,
    /// Ball radius on which the certificate map is checked exhaustively
    #[arg(long, default_value_t = 2)]
    pub verify_radius: usize,
    /// Squarings used for the proxy lower bound
    #[arg(long, default_value_t = 3)]
    pub proxy_doublings: u32,
    /// Directory for certificate.toml and rows.csv
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Compute(m) | CliError::Invariant(m) => m,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<WordError> for CliError {
    fn from(e: WordError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::TermCap { .. } | AlgebraError::LetterCap { .. } => CliError::Compute(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::NotInjective { .. } | TowerError::RelatorViolation { .. } => CliError::Invariant(e.to_string()),
            TowerError::Word(WordError::BallTooLarge { .. })
            | TowerError::ImageTooLarge { .. }
            | TowerError::Undecided { .. }
            | TowerError::TightSearchExhausted(..) => CliError::Compute(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<NormError> for CliError {
    fn from(e: NormError) -> Self {
        match e {
            NormError::Algebra(a) => a.into(),
            NormError::Zero | NormError::NotFree | NormError::NoDoublings => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BaumslagError> for CliError {
    fn from(e: BaumslagError) -> Self {
        match e {
            BaumslagError::Counterexample(_) => CliError::Invariant(e.to_string()),
            BaumslagError::LengthCap { .. } => CliError::Compute(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<PermError> for CliError {
    fn from(e: PermError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<TorusError> for CliError {
    fn from(e: TorusError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Tower(t) => t.into(),
            PipelineError::Algebra(a) => a.into(),
            PipelineError::ExponentTooLarge(_) => CliError::Compute(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn emit(out: &mut dyn Write, path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => formats::write_file(p, text)?,
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("standard output: {e}")))?,
    }
    Ok(())
}

fn run_norm(a: &NormArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let basis = Basis::new(a.basis.iter().map(String::as_str))?;
    let text = formats::read_file(&a.element)?;
    let el = AlgebraElement::parse_text(Context::free(basis), &text)?;
    let opts = SandwichOptions {
        max_doublings: a.doublings,
        target_ratio: a.target_ratio,
        limits: Limits {
            max_terms: a.max_terms,
            ..Limits::default()
        },
        ..SandwichOptions::default()
    };
    let b = sandwich_with(&el, &opts)?;
    emit(out, &a.out, &bracket_report(&b))?;
    let _ = writeln!(
        err,
        "bracket [{}, {}] (l1 cap {}, stop {:?}{}{})",
        b.lower,
        b.upper,
        b.l1_cap,
        b.stop,
        if b.truncated { ", truncated" } else { "" },
        if b.heuristic_upper { ", heuristic upper" } else { "" }
    );
    Ok(())
}

fn format_normal_form(basis: &Basis, t_index: usize, nf: &NormalForm) -> String {
    let t = &basis.names()[t_index];
    match nf {
        NormalForm::Axial { t_exp, u_exp } => format!("axial t^{t_exp} u^{u_exp}"),
        NormalForm::Alternating(syl) => {
            let parts: Vec<String> = syl
                .iter()
                .map(|(n, v)| format!("{t}^{n} [{}]", basis.format_word(v)))
                .collect();
            format!("alternating {}", parts.join(" "))
        }
    }
}

fn run_tower(a: &TowerArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (tower, y) = formats::load_tower(&a.tower)?;
    let mut s = String::new();
    let _ = writeln!(s, "height = {}", tower.height());
    let _ = writeln!(s, "degree = {}", degree(tower.height() as u32));
    let _ = writeln!(s, "generators = {:?}", tower.full_basis().names());
    let rel: Vec<String> = tower.relators().iter().map(|r| tower.format_word(r)).collect();
    let _ = writeln!(s, "relators = {rel:?}");
    let subgroup: Vec<String> = y
        .basis()
        .names()
        .iter()
        .zip(y.gens())
        .map(|(n, g)| format!("{n} = {}", tower.format_word(g)))
        .collect();
    let _ = writeln!(s, "subgroup = {subgroup:?}");
    if let Some(r) = a.radius {
        if r == 0 {
            return Err(CliError::Usage("--radius must be at least 1".into()));
        }
        let _ = writeln!(s, "distortion_bound = {}", distortion_bound_exact(&tower, r));
        let exps: Vec<String> = formula_exponents(&tower, r).iter().map(|e| e.to_string()).collect();
        let _ = writeln!(s, "formula_exponents = [{}]", exps.join(", "));
    }
    if !a.words.is_empty() || a.equal {
        let group = tower.height_one_group()?;
        let words = a
            .words
            .iter()
            .map(|w| tower.full_basis().parse_word(w))
            .collect::<Result<Vec<_>, _>>()?;
        let t_index = tower.stable_letter(1);
        for (text, w) in a.words.iter().zip(&words) {
            let nf = group.normal_form(w);
            let _ = writeln!(
                s,
                "{text:?} -> {} ; canonical {:?}",
                format_normal_form(tower.full_basis(), t_index, &nf),
                tower.format_word(&group.canonical(w))
            );
        }
        if a.equal {
            if words.len() != 2 {
                return Err(CliError::Usage("--equal needs exactly two --word values".into()));
            }
            let _ = writeln!(s, "equal = {}", group.equal(&words[0], &words[1]));
        }
    }
    emit(out, &None, &s)
}

fn run_discriminate(a: &DiscriminateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (tower, y) = formats::load_tower(&a.tower)?;
    let opts = DiscriminateOptions {
        tight: a.tight,
        ball_cap: a.ball_cap,
        max_image_letters: a.max_image_letters,
    };
    let d = discriminating_hom(&tower, &y, a.radius, &opts)?;
    let mut s = String::new();
    let _ = writeln!(s, "radius = {}", d.radius);
    let _ = writeln!(s, "ball_words = {}", d.ball_words);
    let _ = writeln!(s, "distinct_elements = {}", d.distinct_elements);
    let _ = writeln!(s, "stretch = {}", d.stretch);
    let _ = writeln!(s, "formula_bound = {}", d.formula_bound);
    let fe: Vec<String> = d.formula_exponents.iter().map(|e| e.to_string()).collect();
    let _ = writeln!(s, "formula_exponents = [{}]", fe.join(", "));
    let used: Vec<String> = d.hom.metadata.level_exponents.iter().map(|e| e.to_string()).collect();
    let _ = writeln!(s, "level_exponents = [{}]", used.join(", "));
    let lens: Vec<String> = d.on_subgroup.images().iter().map(|w| w.len().to_string()).collect();
    let _ = writeln!(s, "image_lengths = [{}]", lens.join(", "));
    if a.images {
        for (name, img) in y.basis().names().iter().zip(d.on_subgroup.images()) {
            let _ = writeln!(s, "image.{name} = {:?}", tower.base().format_word(img));
        }
    }
    emit(out, &None, &s)
}

fn run_baumslag(a: &BaumslagArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    if a.exhaustive_n0 {
        let r = exhaustive_n0(a.rank, a.u_max, a.b_max, a.k_max as i64)?;
        let text = format!(
            "{}\ninstances,hypothesis_a,hypothesis_b,trivial,counterexamples\n{},{},{},{},0\n",
            residua_core::CSV_VERSION_HEADER,
            r.instances,
            r.hypothesis_a,
            r.hypothesis_b,
            r.trivial
        );
        return emit(out, &a.out, &text);
    }
    let seed = a.seed.ok_or_else(|| CliError::Usage("--seed is required".into()))?;
    let bounds = SearchBounds {
        rank: a.rank,
        n_max: a.n_max,
        u_len_max: a.u_max,
        b_len_max: a.b_max,
        k_max: a.k_max,
        closing: a.closing,
    };
    let variant = match a.variant {
        VariantArg::A => Variant::A,
        VariantArg::B => Variant::B,
    };
    let report = baumslag_search(seed, &bounds, a.trials, variant)?;
    emit(out, &a.out, &report_csv(&report))?;
    let _ = writeln!(
        err,
        "{} trials, 0 counterexamples, {} tightness witnesses",
        report.rows.len(),
        report.tightness.len()
    );
    Ok(())
}

fn run_permrep(
    a: &PermrepArgs,
    threads: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let (tower, y) = formats::load_tower(&a.tower)?;
    let ctx = Context::free(y.basis().clone());
    let z = match &a.element {
        Some(p) => AlgebraElement::parse_text(ctx, &formats::read_file(p)?)?,
        None => {
            let names: Vec<(f64, &str)> = y.basis().names().iter().map(|n| (1.0, n.as_str())).collect();
            scalar_element(ctx, &names)?
        }
    };
    let opts = ExperimentOptions {
        r_for_phi: a.phi_radius,
        tol: a.tol,
        max_iters: a.max_iters,
        sandwich_doublings: a.doublings,
    };
    let rows = with_threads(threads, || {
        permrep_experiment(&tower, &y, &z, &a.sizes, &a.seeds, &opts)
    })?;
    emit(out, &a.out, &experiment_csv(&rows))?;
    let stalled = rows.iter().filter(|r| !r.converged).count();
    if stalled > 0 {
        return Err(CliError::Compute(format!(
            "{stalled} of {} power iterations did not converge",
            rows.len()
        )));
    }
    let _ = writeln!(err, "{} cells", rows.len());
    Ok(())
}

fn run_torus(a: &TorusArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = formats::read_file(&a.element)?;
    let mut norm: Box<dyn FnMut(usize) -> Result<f64, TorusError>> = if a.klein {
        let k = formats::parse_klein(&text)?;
        let cap = a.grid_cap;
        Box::new(move |q| klein_norm_capped(&k, q, cap))
    } else {
        let z = formats::parse_zr(&text)?;
        let cap = a.grid_cap;
        Box::new(move |q| zr_norm_capped(&z, q, cap))
    };
    let mut s = format!("{}\n", norm(a.grid)?);
    if let Some(q_max) = a.refine {
        let rows = refine(a.grid, q_max, &mut norm)?;
        s.push_str(residua_core::CSV_VERSION_HEADER);
        s.push_str("\nq,value,change\n");
        for r in rows {
            let change = r.change.map(|c| c.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{}", r.q, r.value, change);
        }
    }
    emit(out, &None, &s)
}

fn run_certify(a: &CertifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (tower, y) = formats::load_tower(&a.tower)?;
    let ctx = Context::free(y.basis().clone());
    let elements = match (&a.elements, &a.net) {
        (Some(p), _) => formats::parse_elements(&ctx, &formats::read_file(p)?)?,
        (None, Some(words)) => {
            let support = words
                .iter()
                .map(|w| y.basis().parse_word(w))
                .collect::<Result<Vec<_>, _>>()?;
            net_mode(&ctx, &support, a.epsilon, a.phases)?
        }
        (None, None) => return Err(CliError::Usage("give --elements or --net".into())),
    };
    if elements.is_empty() {
        return Err(CliError::Usage("no elements to certify".into()));
    }
    let opts = CertifyOptions {
        verify_radius: a.verify_radius,
        proxy_doublings: a.proxy_doublings,
        ..CertifyOptions::default()
    };
    let cert = certify(&tower, &y, a.radius, a.epsilon, &elements, &opts)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Usage(format!("{}: {e}", a.out_dir.display())))?;
    formats::write_file(&a.out_dir.join("certificate.toml"), &formats::certificate_toml(&cert))?;
    let csv = certificate_csv(&cert);
    formats::write_file(&a.out_dir.join("rows.csv"), &csv)?;
    emit(out, &None, &csv)?;
    if !cert.all_slacks_nonnegative() {
        return Err(CliError::Invariant("negative slack in certificate".into()));
    }
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    if let Some(0) = cli.threads {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    match &cli.command {
        Command::Norm(a) => run_norm(a, out, err),
        Command::Tower(a) => run_tower(a, out),
        Command::Discriminate(a) => run_discriminate(a, out),
        Command::Baumslag(a) => with_threads(cli.threads, || run_baumslag_send(a)).and_then(|(text, note)| {
            out.write_all(text.as_bytes())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let _ = err.write_all(note.as_bytes());
            Ok(())
        }),
        Command::Permrep(a) => run_permrep(a, cli.threads, out, err),
        Command::Torus(a) => run_torus(a, out),
        Command::Certify(a) => run_certify(a, out),
    }
}

/// Buffers output so the search can run inside the thread pool.
fn run_baumslag_send(a: &BaumslagArgs) -> Result<(String, String), CliError> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    run_baumslag(a, &mut out, &mut err)?;
    Ok((
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    ))
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}
