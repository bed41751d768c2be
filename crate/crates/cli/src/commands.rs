//! One function per subcommand. Each returns a serializable result and
//! whether a mathematical property failed on the instance.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use nlgap_core::certifier::{certify_mode, CertInput, CertReport, ParamMode};
use nlgap_core::certifier::encode::BinaryField;
use nlgap_core::constants::{eval_constant, identity_checks, ConstParams, ConstantId, IdentityReport};
use nlgap_core::expansion::{
    partA_check_exact, partA_check_sampled, partB_check_exact, partB_spectral_sufficient, ExpanParams, ExpanVerdict,
};
use nlgap_core::graph::{write_edge_list, Indexing, RegularGraph};
use nlgap_core::norms::{cotype_constant_exact, cotype_constant_sampled, CotypeConstant, UncondNorm, COTYPE_EXACT_LIMIT};
use nlgap_core::poincare::{
    distance_summary, gamma_scalar_l2_exact, gamma_search, uc_experiment, PoincareQuery, RatioReport, ScalarGamma,
    SearchOptions,
};
use nlgap_core::random_graphs::sample_simple_regular;
use nlgap_core::rng::RngState;
use nlgap_core::spectral::{
    cheeger_sandwich_check, eigen_summary, friedman_check, CheegerSandwich, FriedmanReport, SpectralMethod,
    CHEEGER_EXACT_LIMIT,
};
use nlgap_core::LogScalar;

use crate::inputs::{parse_list, read_field, read_graph, read_matrix, read_norm};

pub struct Outcome<R> {
    pub result: R,
    pub falsified: bool,
}

fn ok<R>(result: R) -> Outcome<R> {
    Outcome { result, falsified: false }
}

/// Runs `f` over `items` on up to `jobs` threads, keeping input order.
pub fn par_map<T: Sync, U: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    if items.is_empty() {
        return Vec::new();
    }
    let chunk = items.len().div_ceil(jobs.max(1));
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> =
            items.chunks(chunk).map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<U>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Stream for grid point `(n, d, sample)`, independent of grid order.
fn point_stream(seed: u64, n: usize, d: usize, sample: usize) -> RngState {
    RngState::new(seed).split(n as u64).split(d as u64).split(sample as u64)
}

#[derive(Debug, Args, Serialize)]
pub struct GraphInput {
    /// Edge-list file (`p n d` header optional).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Vertex labels start at 1.
    #[arg(long)]
    pub one_based: bool,
}

impl GraphInput {
    fn load(&self) -> Result<RegularGraph> {
        read_graph(&self.input, self.one_based)
    }
}

// ---------------------------------------------------------------- gen

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub one_based: bool,
}

#[derive(Debug, Serialize)]
pub struct GenItem {
    pub file: String,
    pub rng: RngState,
    pub rejections: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct GenResult {
    pub graphs: Vec<GenItem>,
}

pub fn gen(a: &GenArgs, jobs: usize) -> Result<Outcome<GenResult>> {
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let indexing = if a.one_based { Indexing::OneBased } else { Indexing::ZeroBased };
    let idx: Vec<usize> = (0..a.count).collect();
    let graphs = par_map(&idx, jobs, |&i| -> Result<GenItem> {
        let rng_state = point_stream(a.seed, a.n, a.d, i);
        let t = Instant::now();
        let s = sample_simple_regular(a.n, a.d, &mut rng_state.rng(), None)?;
        let file = format!("g{i:04}.edges");
        fs::write(a.out.join(&file), write_edge_list(&s.graph, indexing))?;
        Ok(GenItem { file, rng: rng_state, rejections: s.rejections, wall_seconds: t.elapsed().as_secs_f64() })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(ok(GenResult { graphs }))
}

// ---------------------------------------------------------------- spectra

#[derive(Debug, Args, Serialize)]
pub struct SpectraArgs {
    #[command(flatten)]
    pub graph: GraphInput,
    /// Additive slack on the `2√(d−1)` threshold.
    #[arg(long, default_value_t = 0.0)]
    pub slack: f64,
    /// Force the Cheeger sandwich above the exact-cut size limit (upper
    /// bound on h only).
    #[arg(long)]
    pub cheeger: bool,
    /// Write JSON here instead of stdout.
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    #[serde(skip)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct SpectraResult {
    pub n: usize,
    pub d: usize,
    pub method: SpectralMethod,
    /// Dense solves are exact up to rounding.
    pub exact: bool,
    pub eigenvalues: Option<Vec<f64>>,
    pub lambda2: f64,
    pub lambda: f64,
    pub residual: f64,
    pub cheeger: Option<CheegerSandwich>,
    pub friedman: FriedmanReport,
}

pub fn spectra(a: &SpectraArgs) -> Result<Outcome<SpectraResult>> {
    let g = a.graph.load()?;
    let s = eigen_summary(&g, 1e-10)?;
    let cheeger = if g.n() <= CHEEGER_EXACT_LIMIT || a.cheeger { Some(cheeger_sandwich_check(&g)?) } else { None };
    let friedman = friedman_check(&g, a.slack)?;
    let falsified = cheeger.as_ref().is_some_and(|c| !c.holds());
    Ok(Outcome {
        result: SpectraResult {
            n: g.n(),
            d: g.d(),
            method: s.method,
            exact: s.method == SpectralMethod::Dense,
            eigenvalues: s.eigenvalues.clone(),
            lambda2: s.lambda2,
            lambda: s.lambda,
            residual: s.residual,
            cheeger,
            friedman,
        },
        falsified,
    })
}

// ---------------------------------------------------------------- expan

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpanMode {
    Exact,
    Sampled,
    Sufficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartSel {
    A,
    B,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpanArgs {
    #[command(flatten)]
    pub graph: GraphInput,
    /// Natural log of α; defaults to the degree's built-in α.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_log: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long, value_enum, default_value_t = ExpanMode::Exact)]
    pub mode: ExpanMode,
    #[arg(long, value_enum, default_value_t = PartSel::Both)]
    pub part: PartSel,
    /// Random probe sets in sampled mode.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    #[serde(skip)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct ExpanResult {
    pub params: ExpanParams,
    pub exact: bool,
    pub trials: Option<usize>,
    pub verdicts: Vec<ExpanVerdict>,
    pub notes: Vec<String>,
}

pub fn expan(a: &ExpanArgs) -> Result<Outcome<ExpanResult>> {
    let g = a.graph.load()?;
    let paper = ExpanParams::paper(g.d());
    let params = ExpanParams::new(
        a.alpha_log.map(LogScalar::from_ln).unwrap_or(paper.alpha),
        a.eps.unwrap_or(paper.eps),
        a.l.map(LogScalar::from).unwrap_or(paper.l),
    )?;
    let want_a = a.part != PartSel::B;
    let want_b = a.part != PartSel::A;
    let mut verdicts = Vec::new();
    let mut notes = Vec::new();
    match a.mode {
        ExpanMode::Exact => {
            if want_a {
                verdicts.push(partA_check_exact(&g, params.alpha)?);
            }
            if want_b {
                verdicts.push(partB_check_exact(&g, &params)?);
            }
        }
        ExpanMode::Sampled => {
            if want_a {
                verdicts.push(partA_check_sampled(&g, params.alpha, a.trials, &mut RngState::new(a.seed).rng())?);
            }
            if want_b {
                if a.part == PartSel::B {
                    bail!("part B has exact and sufficient modes only");
                }
                notes.push("part B skipped: no sampled mode".into());
            }
        }
        ExpanMode::Sufficient => {
            if want_a {
                if a.part == PartSel::A {
                    bail!("part A has exact and sampled modes only");
                }
                notes.push("part A skipped: no sufficient condition".into());
            }
            if want_b {
                verdicts.push(partB_spectral_sufficient(&g)?);
                notes.push("the sufficient condition fixes the built-in parameters; given ones are ignored".into());
            }
        }
    }
    let falsified = verdicts.iter().any(|v| v.failed());
    Ok(Outcome {
        result: ExpanResult {
            params,
            exact: a.mode != ExpanMode::Sampled,
            trials: (a.mode == ExpanMode::Sampled).then_some(a.trials),
            verdicts,
            notes,
        },
        falsified,
    })
}

// ---------------------------------------------------------------- gamma

#[derive(Debug, Args, Serialize)]
pub struct GammaArgs {
    #[command(flatten)]
    pub graph: GraphInput,
    /// Norm JSON; defaults to the Euclidean norm.
    #[arg(long)]
    pub norm: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Field dimension; defaults to the norm's dimension, else 1.
    #[arg(long)]
    pub k: Option<usize>,
    /// Total annealing steps, e.g. `1e5`.
    #[arg(long, default_value_t = 1e5)]
    pub budget: f64,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    #[serde(skip)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct GammaResult {
    /// The search value is a lower bound on the constant.
    pub exact: bool,
    pub lower_bound: RatioReport,
    pub budget: usize,
    pub restarts: usize,
    /// Closed form, for the scalar Euclidean case with `p = 2`.
    pub closed_form: Option<ScalarGamma>,
}

pub fn gamma(a: &GammaArgs) -> Result<Outcome<GammaResult>> {
    let g = a.graph.load()?;
    let norm = match &a.norm {
        Some(p) => read_norm(p)?,
        None => UncondNorm::lq(2.0)?,
    };
    let k = a.k.or(norm.dim()).unwrap_or(1);
    if !(a.budget >= 1.0 && a.budget <= 1e12) {
        bail!("--budget {} must lie in [1, 1e12]", a.budget);
    }
    let mut opts = SearchOptions::with_budget(a.budget as usize);
    if let Some(r) = a.restarts {
        opts.restarts = r;
    }
    let scalar_l2 = k == 1 && a.p == 2.0 && matches!(&norm, UncondNorm::Lq { q, .. } if q.value() == 2.0);
    let query = PoincareQuery::new(norm, a.p)?;
    let found = gamma_search(&g, &query, k, &opts, RngState::new(a.seed))?;
    let closed_form = if scalar_l2 { Some(gamma_scalar_l2_exact(&g)?) } else { None };
    // A search value above the closed form would contradict it.
    let falsified = closed_form.as_ref().is_some_and(|c| found.ratio > c.certified * (1.0 + 1e-6));
    Ok(Outcome {
        result: GammaResult {
            exact: false,
            lower_bound: found,
            budget: opts.budget,
            restarts: opts.restarts,
            closed_form,
        },
        falsified,
    })
}

// ---------------------------------------------------------------- certify

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    Paper,
    Fitted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Binary when every entry is -1, 0 or 1.
    Auto,
    Binary,
    Real,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub graph: GraphInput,
    /// CSV with n rows and k columns.
    #[arg(long = "f")]
    pub field: PathBuf,
    #[arg(long)]
    pub norm: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// Cotype constant of the norm.
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = AlphaMode::Paper)]
    pub alpha_mode: AlphaMode,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = FieldKind::Auto)]
    pub field_kind: FieldKind,
    /// Random probe sets when fitting α on graphs too large to enumerate.
    #[arg(long, default_value_t = 512)]
    pub probes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    #[serde(skip)]
    pub json: Option<PathBuf>,
}

pub fn certify(a: &CertifyArgs) -> Result<Outcome<CertReport>> {
    let g = a.graph.load()?;
    let norm = match &a.norm {
        Some(p) => read_norm(p)?,
        None => UncondNorm::lq(2.0)?,
    };
    let f = read_field(&a.field)?;
    let input = match a.field_kind {
        FieldKind::Real => CertInput::Real(f),
        FieldKind::Binary => CertInput::Binary(BinaryField::from_field(&f)?),
        FieldKind::Auto => match BinaryField::from_field(&f) {
            Ok(b) => CertInput::Binary(b),
            Err(_) => CertInput::Real(f),
        },
    };
    let mode = match a.alpha_mode {
        AlphaMode::Paper => ParamMode::Paper,
        AlphaMode::Fitted => ParamMode::Fitted,
    };
    let mut rng = RngState::new(a.seed).rng();
    let report = certify_mode(&g, &input, &norm, a.q, a.c, mode, a.p, a.probes, &mut rng)?;
    let falsified = !report.all_hold();
    Ok(Outcome { result: report, falsified })
}

// ---------------------------------------------------------------- cotype

#[derive(Debug, Args, Serialize)]
pub struct CotypeArgs {
    #[arg(long)]
    pub norm: PathBuf,
    /// CSV, one vector per row.
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// Monte Carlo sign samples; exact enumeration when omitted and there
    /// are at most 20 vectors.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    #[serde(skip)]
    pub json: Option<PathBuf>,
}

pub fn cotype(a: &CotypeArgs) -> Result<Outcome<CotypeConstant>> {
    let nm = read_norm(&a.norm)?;
    let xs = read_matrix(&a.vectors)?;
    let c = match a.samples {
        None if xs.len() <= COTYPE_EXACT_LIMIT => cotype_constant_exact(&nm, &xs, a.q)?,
        None => bail!(
            "{} vectors exceed the exact limit of {COTYPE_EXACT_LIMIT}; pass --samples for a Monte Carlo estimate",
            xs.len()
        ),
        Some(s) => cotype_constant_sampled(&nm, &xs, a.q, s, &mut RngState::new(a.seed).rng())?,
    };
    Ok(ok(c))
}

// ---------------------------------------------------------------- constants

#[derive(Debug, Args, Serialize)]
pub struct ConstantsArgs {
    /// Constant name, e.g. Gamma, Pi, Ltilde, c, chat, cprime, eps_d.
    #[arg(long)]
    pub id: Option<String>,
    /// Every constant at these parameters.
    #[arg(long)]
    pub all: bool,
    /// Also run the identity checks between constants.
    #[arg(long)]
    pub identities: bool,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    #[arg(long = "K", default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 6)]
    pub d: usize,
    /// `paper` for the degree's built-in α, ε and L, or a number in (0, 1].
    #[arg(long, default_value = "paper")]
    pub alpha: String,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Index for the scale weight `a_i`.
    #[arg(long, default_value_t = 1)]
    pub i: usize,
    /// `d/(d−λ2)` for the baseline bounds.
    #[arg(long)]
    pub gap_ratio: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    #[serde(skip)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct ConstantValue {
    pub id: String,
    pub sign: i8,
    pub ln_value: f64,
    pub log10_value: f64,
    /// Plain value when it fits in a double.
    pub value: Option<f64>,
    pub display: String,
}

#[derive(Debug, Serialize)]
pub struct ConstantsResult {
    pub params: ConstParams,
    pub values: Vec<ConstantValue>,
    pub identities: Option<IdentityReport>,
}

fn const_params(a: &ConstantsArgs) -> Result<ConstParams> {
    let mut p = if a.alpha == "paper" {
        ConstParams::paper(a.d)
    } else {
        let alpha: f64 = a.alpha.parse().with_context(|| format!("--alpha {:?} is neither `paper` nor a number", a.alpha))?;
        ConstParams { d: a.d, alpha: LogScalar::from(alpha), ..ConstParams::default() }
    };
    p.q = a.q;
    p.c = a.c;
    p.k_uncond = a.k;
    p.i = a.i;
    p.gap_ratio = a.gap_ratio;
    if let Some(e) = a.eps {
        p.eps = e;
    }
    if let Some(l) = a.l {
        p.l = LogScalar::from(l);
    }
    Ok(p)
}

pub fn constants(a: &ConstantsArgs) -> Result<Outcome<ConstantsResult>> {
    let params = const_params(a)?;
    let ids: Vec<ConstantId> = match (&a.id, a.all) {
        (_, true) => ConstantId::ALL.to_vec(),
        (Some(id), false) => vec![id.parse()?],
        (None, false) if a.identities => Vec::new(),
        (None, false) => bail!("pass --id NAME, --all or --identities"),
    };
    let mut values = Vec::new();
    for id in ids {
        let v = match eval_constant(id, &params) {
            Ok(v) => v,
            // Baseline bounds need --gap-ratio; skip them under --all.
            Err(_) if a.all => continue,
            Err(e) => return Err(e.into()),
        };
        let plain = v.to_f64();
        values.push(ConstantValue {
            id: id.name().to_string(),
            sign: v.sign(),
            ln_value: v.ln_abs(),
            log10_value: v.log10_abs(),
            value: plain.is_finite().then_some(plain),
            display: v.to_string(),
        });
    }
    let identities = if a.identities { Some(identity_checks()?) } else { None };
    let falsified = identities.as_ref().is_some_and(|r| !r.all_hold());
    Ok(Outcome { result: ConstantsResult { params, values, identities }, falsified })
}

// ---------------------------------------------------------------- uc-sweep

#[derive(Debug, Args, Serialize)]
pub struct UcSweepArgs {
    #[arg(long)]
    pub d: usize,
    /// Comma-separated vertex counts.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    /// Comma-separated cotype exponents.
    #[arg(long, default_value = "2,4,8")]
    pub q: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct UcCsvRow {
    pub n: usize,
    pub d: usize,
    pub sample: usize,
    pub stream: u64,
    pub q: Option<f64>,
    pub mean_distance: Option<f64>,
    pub log10_distortion_times_gamma: Option<f64>,
    pub excluded: Option<bool>,
    pub q_floor: Option<f64>,
    pub error: Option<String>,
}

pub fn uc_sweep(a: &UcSweepArgs, jobs: usize) -> Result<Vec<UcCsvRow>> {
    let ns: Vec<usize> = parse_list(&a.n)?;
    let qs: Vec<f64> = parse_list(&a.q)?;
    let points: Vec<(usize, usize)> = ns.iter().flat_map(|&n| (0..a.samples).map(move |s| (n, s))).collect();
    let rows = par_map(&points, jobs, |&(n, sample)| {
        let st = point_stream(a.seed, n, a.d, sample);
        let base = UcCsvRow {
            n,
            d: a.d,
            sample,
            stream: st.stream,
            q: None,
            mean_distance: None,
            log10_distortion_times_gamma: None,
            excluded: None,
            q_floor: None,
            error: None,
        };
        let g = match sample_simple_regular(n, a.d, &mut st.rng(), None) {
            Ok(s) => s.graph,
            Err(e) => return vec![UcCsvRow { error: Some(e.to_string()), ..base_clone(&base) }],
        };
        // One row per q; a bad q fails only its own row.
        qs.iter()
            .map(|&q| match uc_experiment(std::slice::from_ref(&g), &[q], &ConstParams::default()) {
                Ok(rows) => {
                    let r = &rows[0];
                    UcCsvRow {
                        q: Some(r.q),
                        mean_distance: Some(r.mean_distance),
                        log10_distortion_times_gamma: Some(r.distortion_times_gamma.log10_abs()),
                        excluded: Some(r.excluded),
                        q_floor: Some(r.q_floor),
                        ..base_clone(&base)
                    }
                }
                Err(e) => UcCsvRow { q: Some(q), error: Some(e.to_string()), ..base_clone(&base) },
            })
            .collect::<Vec<_>>()
    });
    Ok(rows.into_iter().flatten().collect())
}

fn base_clone(b: &UcCsvRow) -> UcCsvRow {
    UcCsvRow { error: b.error.clone(), ..*b }
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Comma-separated vertex counts; empty gives a header-only CSV.
    #[arg(long, allow_hyphen_values = true)]
    pub n: String,
    /// Comma-separated degrees.
    #[arg(long)]
    pub d: String,
    /// Samples per `(n, d)`.
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub d: usize,
    pub sample: usize,
    pub stream: u64,
    pub rejections: Option<usize>,
    pub lambda2: Option<f64>,
    pub lambda: Option<f64>,
    pub friedman_strong: Option<bool>,
    pub diameter: Option<usize>,
    pub mean_distance: Option<f64>,
    pub error: Option<String>,
}

pub fn sweep(a: &SweepArgs, jobs: usize) -> Result<Vec<SweepRow>> {
    let ns: Vec<usize> = parse_list(&a.n)?;
    let ds: Vec<usize> = parse_list(&a.d)?;
    let points: Vec<(usize, usize, usize)> = ns
        .iter()
        .flat_map(|&n| ds.iter().flat_map(move |&d| (0..a.samples).map(move |s| (n, d, s))))
        .collect();
    Ok(par_map(&points, jobs, |&(n, d, sample)| {
        let st = point_stream(a.seed, n, d, sample);
        let run = || -> nlgap_core::Result<SweepRow> {
            let s = sample_simple_regular(n, d, &mut st.rng(), None)?;
            let fr = friedman_check(&s.graph, 0.0)?;
            let dist = distance_summary(&s.graph)?;
            Ok(SweepRow {
                n,
                d,
                sample,
                stream: st.stream,
                rejections: Some(s.rejections),
                lambda2: Some(fr.lambda2),
                lambda: Some(fr.lambda),
                friedman_strong: Some(fr.passes_strong),
                diameter: Some(dist.diameter),
                mean_distance: Some(dist.mean_with_diagonal),
                error: None,
            })
        };
        run().unwrap_or_else(|e| SweepRow {
            n,
            d,
            sample,
            stream: st.stream,
            rejections: None,
            lambda2: None,
            lambda: None,
            friedman_strong: None,
            diameter: None,
            mean_distance: None,
            error: Some(e.to_string()),
        })
    }))
}

/// RFC-4180 CSV with a header row, even when there are no rows.
pub fn write_csv<T: Serialize>(rows: &[T], header: &[&str], path: Option<&PathBuf>) -> Result<()> {
    let sink: Box<dyn std::io::Write> = match path {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const UC_HEADER: &[&str] = &[
    "n",
    "d",
    "sample",
    "stream",
    "q",
    "mean_distance",
    "log10_distortion_times_gamma",
    "excluded",
    "q_floor",
    "error",
];

pub const SWEEP_HEADER: &[&str] = &[
    "n",
    "d",
    "sample",
    "stream",
    "rejections",
    "lambda2",
    "lambda",
    "friedman_strong",
    "diameter",
    "mean_distance",
    "error",
];
