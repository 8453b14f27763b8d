//! Subcommand implementations. Each one returns an [`Outcome`]; `run` decides
//! where the artifact, text and data go.

use crate::artifact::{emit, Artifact};
use crate::{
    AlgebraArgs, Cli, Command, MetricArg, ModelsetCmd, PatchFormat, PatchSource, PisotCmd,
    SchemeCmd, VerifyCmd,
};
use nilmodel::cutproject::{
    builtin_algebra, enumerate_model_set, load_scheme_config, pisot_patch, CutProjectError,
    ModelSetPatch, Scheme, SchemeConfig, Window,
};
use nilmodel::exactfield::{parse_rational, FieldError, QuadFieldElem, Rational, Scalar};
use nilmodel::freenilp::{
    bch_many, hall_basis, iterate_sum_word, synthesize_bracket_word, synthesize_sum_word,
    FreeNilpElem, SynthesisError, WordCertificate,
};
use nilmodel::liealg::{
    decompose_indecomposable, extend_lattice_hom, parse_algebra, AnyAlgebra, DecomposeError,
    HomError, IsoInvariants, LieAlgebra, LieAlgebraError, DEFAULT_SEARCH_BUDGET,
};
use nilmodel::verify::{
    approx_certificate, counterexample_powers, delone_two_scale, linearize_hom, log_image_delone,
    min_separation, n0_from_certificates, product_patch, ApproxCertificate, HomValues, Metric,
    Thresholds, VerifyError,
};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input files.
    Usage(String),
    /// A verification that could not complete in a passing state.
    Failed(String),
    /// Budgets, overflow and I/O.
    Internal(String),
    /// The reader of stdout went away.
    BrokenPipe,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
            CliError::BrokenPipe => 0,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) | CliError::Failed(s) | CliError::Internal(s) => f.write_str(s),
            CliError::BrokenPipe => f.write_str("broken pipe"),
        }
    }
}

impl From<CutProjectError> for CliError {
    fn from(e: CutProjectError) -> Self {
        let s = e.to_string();
        match e {
            CutProjectError::Config(_)
            | CutProjectError::InvalidWindow(_)
            | CutProjectError::InvalidAlgebra(_)
            | CutProjectError::NotPisot(_) => CliError::Usage(s),
            CutProjectError::ClosureFailed { .. } => CliError::Failed(s),
            CutProjectError::RegionTooLarge { .. }
            | CutProjectError::Overflow
            | CutProjectError::Internal(_) => CliError::Internal(s),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        let s = e.to_string();
        match e {
            VerifyError::EmptyCore { .. } | VerifyError::InvalidInput(_) => CliError::Usage(s),
            VerifyError::FactorizationGap { .. } | VerifyError::RankDeficient { .. } => {
                CliError::Failed(s)
            }
            VerifyError::BudgetExceeded { .. } | VerifyError::Internal(_) => CliError::Internal(s),
            VerifyError::CutProject(e) => e.into(),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<LieAlgebraError> for CliError {
    fn from(e: LieAlgebraError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SynthesisError> for CliError {
    fn from(e: SynthesisError) -> Self {
        match e {
            SynthesisError::UnsupportedClass { .. } | SynthesisError::UnsupportedArity { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<DecomposeError> for CliError {
    fn from(e: DecomposeError) -> Self {
        match e {
            DecomposeError::Algebra(e) => e.into(),
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return CliError::BrokenPipe;
        }
        CliError::Internal(format!("i/o: {e}"))
    }
}

type Res<T> = Result<T, CliError>;
type DataWriter = Box<dyn FnOnce(&mut dyn Write) -> io::Result<()>>;

struct Outcome {
    artifact: Artifact,
    text: String,
    pass: bool,
    /// Point data; goes to `--out` (or stdout) in place of the artifact.
    data: Option<DataWriter>,
}

pub fn run(cli: &Cli) -> Res<ExitCode> {
    let g = &cli.global;
    let outcome = match &cli.command {
        Command::Bch { class, generators } => bch(*class, *generators, g.seed)?,
        Command::Words { class, iterate } => words(*class, *iterate, g.seed)?,
        Command::Scheme(SchemeCmd::Build { config }) => scheme_build(config, g.seed)?,
        Command::Modelset(ModelsetCmd::Gen {
            config,
            radius,
            format,
        }) => {
            let src = Source::from_config(config, radius.as_deref())?;
            patch_data("modelset gen", &src, *format, g.seed)?
        }
        Command::Pisot(PisotCmd::Gen {
            a,
            b,
            d,
            max_exp,
            format,
        }) => {
            let src = Source::pisot(a, b, *d, *max_exp)?;
            patch_data("pisot gen", &src, *format, g.seed)?
        }
        Command::PlotData { source } => {
            let src = Source::new(source)?;
            patch_data("plot-data", &src, PatchFormat::Csv, g.seed)?
        }
        Command::Verify(v) => verify(v, g.seed, g.tolerance)?,
        Command::Decompose(args) => decompose(args, g.seed)?,
        Command::ExtendHom { spec } => extend_hom(spec, g.seed)?,
    };
    let Outcome {
        artifact,
        text,
        pass,
        data,
    } = outcome;
    let rendered = artifact.render();
    match data {
        Some(write) => match &g.out {
            Some(path) => {
                let mut f = io::BufWriter::new(std::fs::File::create(path)?);
                write(&mut f)?;
                f.flush()?;
                if g.json {
                    emit(None, rendered.as_bytes())?;
                } else {
                    emit(None, text.as_bytes())?;
                }
            }
            None => {
                let mut out = io::BufWriter::new(io::stdout().lock());
                write(&mut out)?;
                out.flush()?;
            }
        },
        None => {
            if let Some(path) = &g.out {
                emit(Some(path), rendered.as_bytes())?;
            }
            if g.json {
                emit(None, rendered.as_bytes())?;
            } else {
                emit(None, text.as_bytes())?;
            }
        }
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn header(command: &str, seed: u64) -> String {
    format!(
        "# nilmodel {} {command} seed {seed}\n",
        env!("CARGO_PKG_VERSION")
    )
}

fn f64_of(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn bch(class: usize, generators: usize, seed: u64) -> Res<Outcome> {
    if class == 0 || generators < 2 {
        return Err(CliError::Usage(
            "need --class >= 1 and --generators >= 2".into(),
        ));
    }
    let basis = hall_basis(generators, class);
    let xs: Vec<FreeNilpElem> = (0..generators)
        .map(|i| FreeNilpElem::generator(&basis, i))
        .collect();
    let series = bch_many(&basis, &xs).to_string();
    let artifact = Artifact::new(
        "bch",
        json!({ "seed": seed, "class": class, "generators": generators }),
    )
    .result(json!({ "series": series }), Some(true));
    Ok(Outcome {
        artifact,
        text: format!("{series}\n"),
        pass: true,
        data: None,
    })
}

fn cert_line(c: &WordCertificate, ok: bool) -> String {
    format!(
        "{} class {}: w={}, m={}, n={}, log={}, verified {ok}\n",
        json!(c.target).as_str().unwrap_or("?"),
        c.class,
        c.word,
        c.m,
        c.n,
        c.log
    )
}

fn words(class: usize, iterate: Option<usize>, seed: u64) -> Res<Outcome> {
    let mut certs = vec![synthesize_sum_word(class)?];
    if class >= 2 {
        certs.push(synthesize_bracket_word(class)?);
    }
    let mut artifact = Artifact::new(
        "words",
        json!({ "seed": seed, "class": class, "iterate": iterate }),
    );
    let mut text = String::new();
    let mut pass = true;
    let mut full = Vec::new();
    for c in &certs {
        let j = c.to_json();
        artifact.certificate(&j);
        let ok = c.verify();
        pass &= ok;
        text += &cert_line(c, ok);
        full.push(j);
    }
    let mut result = json!({ "certificates": full });
    if let Some(n) = iterate {
        let it = iterate_sum_word(class, n)?;
        let ok = it.verify();
        pass &= ok;
        text += &format!(
            "iterated arity {n}: multiplier {}, letters {}, log={}, verified {ok}\n",
            it.multiplier, it.letter_count, it.log
        );
        result["iterated"] = json!({
            "arity": n,
            "multiplier": it.multiplier.to_string(),
            "letter_count": it.letter_count.to_string(),
            "log": it.log.to_string(),
            "verified": ok,
        });
    }
    Ok(Outcome {
        artifact: artifact.result(result, Some(pass)),
        text,
        pass,
        data: None,
    })
}

fn config_base(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn scheme_build(path: &Path, seed: u64) -> Res<Outcome> {
    let cfg = load_scheme_config(path)?;
    let config = json!({ "seed": seed, "path": path.display().to_string(), "scheme": cfg });
    let artifact = Artifact::new("scheme build", config);
    let head = header("scheme build", seed);
    match cfg.scheme(&config_base(path)) {
        Ok(s) => {
            let c = s.closure();
            let text = format!(
                "{head}dim {} d {} denominators {:?} weights {:?}\nclosure degree_bound {} grid_side {} supports {} evaluations {} {}\n",
                s.dim(),
                s.d(),
                s.denominators(),
                s.weights(),
                c.degree_bound,
                c.grid_side,
                c.supports_checked,
                c.evaluations,
                verdict(c.passed)
            );
            let result = json!({
                "dim": s.dim(),
                "d": s.d(),
                "denominators": s.denominators(),
                "weights": s.weights(),
                "closure": c,
            });
            Ok(Outcome {
                artifact: artifact.result(result, Some(c.passed)),
                text,
                pass: c.passed,
                data: None,
            })
        }
        Err(CutProjectError::ClosureFailed { witness }) => {
            let text = format!("{head}closure FAIL: {witness}\n");
            let result = json!({ "closure": { "passed": false, "witness": witness } });
            Ok(Outcome {
                artifact: artifact.result(result, Some(false)),
                text,
                pass: false,
                data: None,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// Where a patch comes from: a scheme config or a Pisot set.
enum Source {
    Config {
        path: PathBuf,
        cfg: SchemeConfig,
        scheme: Arc<Scheme>,
        window: Window,
        radius: Rational,
        core: Option<Rational>,
    },
    Pisot {
        a: Rational,
        b: Rational,
        d: u64,
        max_exp: u32,
    },
}

impl Source {
    fn new(src: &PatchSource) -> Res<Self> {
        match (&src.config, src.pisot_max_exp) {
            (Some(path), None) => Self::from_config(path, src.radius.as_deref()),
            (None, Some(n)) => Self::pisot(&src.pisot_a, &src.pisot_b, src.pisot_d, n),
            _ => Err(CliError::Usage(
                "give exactly one of --config or --pisot-max-exp".into(),
            )),
        }
    }

    fn from_config(path: &Path, radius: Option<&str>) -> Res<Self> {
        let cfg = load_scheme_config(path)?;
        let scheme = cfg.scheme(&config_base(path))?;
        let window = cfg.window()?;
        let radius = match radius {
            Some(r) => parse_rational(r)?,
            None => cfg.radius()?,
        };
        let core = cfg.core_radius()?;
        Ok(Source::Config {
            path: path.to_path_buf(),
            cfg,
            scheme,
            window,
            radius,
            core,
        })
    }

    fn pisot(a: &str, b: &str, d: u64, max_exp: u32) -> Res<Self> {
        Ok(Source::Pisot {
            a: parse_rational(a)?,
            b: parse_rational(b)?,
            d,
            max_exp,
        })
    }

    fn config_json(&self) -> Value {
        match self {
            Source::Config {
                path,
                cfg,
                radius,
                core,
                ..
            } => json!({
                "source": "config",
                "path": path.display().to_string(),
                "scheme": cfg,
                "radius": radius.to_string(),
                "core_radius": core.as_ref().map(|c| c.to_string()),
            }),
            Source::Pisot { a, b, d, max_exp } => json!({
                "source": "pisot",
                "a": a.to_string(),
                "b": b.to_string(),
                "d": d,
                "max_exp": max_exp,
            }),
        }
    }

    /// `scale` 0 is the configured patch; scale 1 doubles the radius (or
    /// adds 2 to the Pisot cutoff).
    fn patch(&self, scale: u32) -> Res<ModelSetPatch> {
        match self {
            Source::Config {
                scheme,
                window,
                radius,
                core,
                ..
            } => {
                let f = Rational::from_integer((1i64 << scale).into());
                let p = enumerate_model_set(scheme, window, &(radius * &f))?;
                Ok(match core {
                    Some(c) => p.with_core_radius(f64_of(&(c * &f))),
                    None => p,
                })
            }
            Source::Pisot { a, b, d, max_exp } => Ok(pisot_patch(a, b, *d, max_exp + 2 * scale)?),
        }
    }

    /// Product radius for approximate-subgroup certificates at `scale`:
    /// `3R/20`, or `floor(g^(N-3))` for Pisot sets.
    fn default_rho(&self, scale: u32) -> Rational {
        match self {
            Source::Config { radius, .. } => {
                radius * Rational::new((3i64 << scale).into(), 20.into())
            }
            Source::Pisot { a, b, d, max_exp } => {
                let g = f64_of(a) + f64_of(b) * (*d as f64).sqrt();
                let e = *max_exp as i32 + 2 * scale as i32 - 3;
                Rational::from_integer((g.powi(e.max(0)).floor().max(1.0) as i64).into())
            }
        }
    }

    fn scale_rho(&self, rho: &Rational, scale: u32) -> Rational {
        match self {
            Source::Config { .. } => rho * Rational::from_integer((1i64 << scale).into()),
            Source::Pisot { a, b, d, .. } => {
                let g = f64_of(a) + f64_of(b) * (*d as f64).sqrt();
                let v = f64_of(rho) * g.powi(2 * scale as i32);
                Rational::from_integer((v.floor().max(1.0) as i64).into())
            }
        }
    }
}

fn patch_data(command: &str, src: &Source, format: PatchFormat, seed: u64) -> Res<Outcome> {
    let p = src.patch(0)?;
    let config = json!({ "seed": seed, "format": format, "patch": src.config_json() });
    let summary = p.summary_json();
    let artifact = Artifact::new(command, config).result(summary, Some(true));
    let text = format!(
        "{}points {}\nradius {}\ncore_radius {}\ndoubling_added {:?}\n",
        header(command, seed),
        p.len(),
        p.radius(),
        p.core_radius(),
        p.meta().doubling_added
    );
    let head = artifact.to_value().to_string();
    let data: DataWriter = match format {
        PatchFormat::Jsonl => Box::new(move |w: &mut dyn Write| {
            writeln!(w, "{head}")?;
            p.write_jsonl(w)
        }),
        PatchFormat::Csv => Box::new(move |w: &mut dyn Write| p.write_csv(w)),
        PatchFormat::Summary => {
            let r = artifact.render();
            Box::new(move |w: &mut dyn Write| w.write_all(r.as_bytes()))
        }
    };
    Ok(Outcome {
        artifact,
        text,
        pass: true,
        data: Some(data),
    })
}

fn thresholds(tolerance: Option<f64>) -> Res<Thresholds> {
    let mut t = Thresholds::default();
    if let Some(x) = tolerance {
        if !(x > 0.0) {
            return Err(CliError::Usage("--tolerance must be positive".into()));
        }
        t.covering_rel_tol = x;
    }
    Ok(t)
}

fn approx_summary(c: &ApproxCertificate, full: bool) -> Value {
    let mut v = serde_json::to_value(c).unwrap_or(Value::Null);
    if !full {
        if let Some(m) = v.as_object_mut() {
            m.remove("factorizations");
        }
    }
    v["F_size"] = json!(c.f.len());
    v
}

fn verify(cmd: &VerifyCmd, seed: u64, tolerance: Option<f64>) -> Res<Outcome> {
    let mut t = thresholds(tolerance)?;
    match cmd {
        VerifyCmd::Delone {
            source,
            metric,
            grid_step,
        } => {
            let src = Source::new(source)?;
            let metric = match metric {
                MetricArg::Group => Metric::GroupQuasi,
                MetricArg::Euclidean => Metric::Euclidean,
            };
            let rep = delone_two_scale(&src.patch(0)?, &src.patch(1)?, metric, *grid_step, &t)?;
            let config = json!({
                "seed": seed, "patch": src.config_json(), "metric": metric,
                "grid_step": grid_step, "thresholds": t,
            });
            let text = header("verify delone", seed) + &rep.to_text();
            Ok(Outcome {
                artifact: Artifact::new("verify delone", config).result(json!(rep), Some(rep.pass)),
                text,
                pass: rep.pass,
                data: None,
            })
        }
        VerifyCmd::Approx { source, rho, full } => {
            let src = Source::new(source)?;
            let rho0 = match rho {
                Some(r) => parse_rational(r)?,
                None => src.default_rho(0),
            };
            let rho1 = match rho {
                Some(_) => src.scale_rho(&rho0, 1),
                None => src.default_rho(1),
            };
            let mut text = header("verify approx", seed);
            let mut scales = Vec::new();
            let mut certs = Vec::new();
            for (scale, r) in [(0u32, &rho0), (1, &rho1)] {
                let p = src.patch(scale)?;
                let products = product_patch(&p, 2, r)?;
                let c = approx_certificate(&p, &products)?;
                text += &format!(
                    "scale {}: patch_radius {} patch_points {} product_radius {r} products {}\n",
                    if scale == 0 { "small" } else { "large" },
                    p.radius(),
                    p.len(),
                    products.len()
                );
                text += &c.to_text();
                let mut v = approx_summary(&c, *full);
                v["patch_radius"] = json!(p.radius());
                v["patch_points"] = json!(p.len().to_string());
                v["rho"] = json!(r.to_string());
                scales.push(v);
                certs.push(c);
            }
            let replay = certs.iter().all(|c| c.replay_ok);
            let stable = certs[0].f.len() == certs[1].f.len();
            let pass = replay && stable;
            text += &format!(
                "F_size {} / {} stable {}\napprox {}\n",
                certs[0].f.len(),
                certs[1].f.len(),
                stable,
                verdict(pass)
            );
            let config = json!({
                "seed": seed, "patch": src.config_json(), "rho": [rho0.to_string(), rho1.to_string()],
                "full": full,
            });
            let result = json!({ "small": scales[0], "large": scales[1], "replay_ok": replay, "F_stable": stable });
            Ok(Outcome {
                artifact: Artifact::new("verify approx", config).result(result, Some(pass)),
                text,
                pass,
                data: None,
            })
        }
        VerifyCmd::Powers { source, k, rho } => {
            let src = Source::new(source)?;
            let rho = parse_rational(rho)?;
            let p = src.patch(0)?;
            let products = product_patch(&p, *k, &rho)?;
            let sep = min_separation(&products, Metric::GroupQuasi)?;
            let pass = sep.min_separation > t.min_separation;
            let text = format!(
                "{}powers k {k} rho {rho} points {} core_points {} min_separation {:.12} exact_difference {:?}\npowers {}\n",
                header("verify powers", seed),
                products.len(),
                sep.core_points,
                sep.min_separation,
                sep.exact_difference,
                verdict(pass)
            );
            let config = json!({
                "seed": seed, "patch": src.config_json(), "k": k, "rho": rho.to_string(), "thresholds": t,
            });
            let result = json!({ "points": products.len().to_string(), "separation": sep });
            Ok(Outcome {
                artifact: Artifact::new("verify powers", config).result(result, Some(pass)),
                text,
                pass,
                data: None,
            })
        }
        VerifyCmd::Logimage {
            source,
            n,
            small,
            large,
            grid_step,
            samples,
        } => {
            let src = Source::new(source)?;
            let p = src.patch(0)?;
            let class = p.scheme().algebra().class();
            let certs: Vec<WordCertificate> = (1..=class)
                .map(synthesize_sum_word)
                .collect::<Result<_, _>>()?;
            let n = match n {
                Some(n) => *n,
                None => n0_from_certificates(&certs)? as usize,
            };
            let (small, large) = (parse_rational(small)?, parse_rational(large)?);
            let rep = log_image_delone(
                &p, n, &certs, &small, &large, *grid_step, *samples, seed, &t,
            )?;
            let config = json!({
                "seed": seed, "patch": src.config_json(), "n": n, "small": small.to_string(),
                "large": large.to_string(), "grid_step": grid_step, "samples": samples, "thresholds": t,
            });
            let mut artifact = Artifact::new("verify logimage", config);
            for c in &certs {
                artifact.certificate(&c.to_json());
            }
            Ok(Outcome {
                artifact: artifact.result(json!(rep), Some(rep.pass)),
                text: header("verify logimage", seed) + &rep.to_text(),
                pass: rep.pass,
                data: None,
            })
        }
        VerifyCmd::Linearize {
            source,
            a,
            b,
            fit_radius,
        } => {
            if let Some(x) = tolerance {
                t.drift_tol = x;
            }
            let src = Source::new(source)?;
            let p = src.patch(0)?;
            let (a, b) = (parse_rational(a)?, parse_rational(b)?);
            let values = HomValues::Formula {
                a: a.clone(),
                b: b.clone(),
            };
            let r = linearize_hom(&p, &values, *fit_radius, &t)?;
            let config = json!({
                "seed": seed, "patch": src.config_json(), "a": a.to_string(), "b": b.to_string(),
                "fit_radius": fit_radius, "thresholds": t,
            });
            Ok(Outcome {
                artifact: Artifact::new("verify linearize", config).result(json!(r), Some(r.pass)),
                text: header("verify linearize", seed) + &r.to_text(),
                pass: r.pass,
                data: None,
            })
        }
        VerifyCmd::Counterexample { k, n_max } => {
            let r = counterexample_powers(*k, *n_max)?;
            let config = json!({ "seed": seed, "k": k, "n_max": n_max });
            Ok(Outcome {
                artifact: Artifact::new("verify counterexample", config)
                    .result(json!(r), Some(r.pass)),
                text: header("verify counterexample", seed) + &r.to_text(),
                pass: r.pass,
                data: None,
            })
        }
    }
}

fn builtin(name: &str) -> Res<LieAlgebra<Rational>> {
    builtin_algebra(name)
        .ok_or_else(|| CliError::Usage(format!("unknown builtin algebra '{name}'")))
}

fn read_algebra(path: &Path) -> Res<AnyAlgebra> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(parse_algebra(&text)?)
}

fn invariants_json(i: &IsoInvariants) -> Value {
    json!({
        "dim": i.dim,
        "lower_central_dims": i.lower_central_dims,
        "derived_dims": i.derived_dims,
        "center_dim": i.center_dim,
        "centroid_dim": i.centroid_dim,
        "bracket_rank": i.bracket_rank,
    })
}

fn vec_strings<F: fmt::Display>(v: &[F]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn decompose_generic<F: Scalar + fmt::Display>(g: &LieAlgebra<F>) -> Res<(Value, String)> {
    let r = decompose_indecomposable(g, DEFAULT_SEARCH_BUDGET)?;
    let mut text = format!(
        "dim {} factors {} dims {:?} candidates_tried {}\n",
        g.dim(),
        r.factors.len(),
        r.factor_dims(),
        r.candidates_tried
    );
    let mut factors = Vec::new();
    for (i, f) in r.factors.iter().enumerate() {
        let basis: Vec<Vec<String>> = f.ideal_basis.iter().map(|v| vec_strings(v)).collect();
        text += &format!(
            "factor {i}: dim {} lower_central {:?} basis {:?}\n",
            f.algebra.dim(),
            f.invariants.lower_central_dims,
            basis
        );
        factors.push(json!({
            "ideal_basis": basis,
            "invariants": invariants_json(&f.invariants),
            "centroid_dim": f.centroid_dim,
            "radical_dim": f.radical_dim,
        }));
    }
    let classes: Vec<Value> = r
        .iso_classes()
        .iter()
        .map(|(inv, m)| json!({ "invariants": invariants_json(inv), "multiplicity": m }))
        .collect();
    let result = json!({
        "dim": g.dim(),
        "factors": factors,
        "factor_dims": r.factor_dims(),
        "iso_classes": classes,
        "candidates_tried": r.candidates_tried,
        "splits": r.splits.len(),
    });
    Ok((result, text))
}

fn decompose(args: &AlgebraArgs, seed: u64) -> Res<Outcome> {
    let base = match (&args.algebra, &args.builtin) {
        (Some(p), None) => read_algebra(p)?,
        (None, Some(name)) => AnyAlgebra::Rational(builtin(name)?),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --algebra or --builtin".into(),
            ))
        }
    };
    let plus = args
        .plus
        .iter()
        .map(|n| builtin(n))
        .collect::<Res<Vec<_>>>()?;
    let (result, text) = match base {
        AnyAlgebra::Rational(mut g) => {
            for h in &plus {
                g = g.direct_sum(h)?;
            }
            decompose_generic(&g)?
        }
        AnyAlgebra::Quad(mut g) => {
            let d = g.field().radicand().unwrap_or(0);
            for h in &plus {
                g = g.direct_sum(&h.lift_to_quad(d)?)?;
            }
            decompose_generic(&g)?
        }
    };
    Ok(Outcome {
        artifact: Artifact::new("decompose", json!({ "seed": seed, "algebra": args }))
            .result(result, Some(true)),
        text: header("decompose", seed) + &text,
        pass: true,
        data: None,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    fn text(&self) -> String {
        match self {
            Entry::Int(i) => i.to_string(),
            Entry::Text(s) => s.clone(),
        }
    }
}

/// ```toml
/// d = 2                      # optional; rational coefficients otherwise
/// source = "heisenberg"      # builtin name or algebra file
/// target = "abelian2"
/// generators = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
/// images = [[1, 0], [0, 1], [0, 0]]
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HomSpec {
    d: Option<u64>,
    source: String,
    target: String,
    generators: Vec<Vec<Entry>>,
    images: Vec<Vec<Entry>>,
}

fn load_named(name: &str, base: &Path) -> Res<AnyAlgebra> {
    match builtin_algebra(name) {
        Some(g) => Ok(AnyAlgebra::Rational(g)),
        None => read_algebra(&base.join(name)),
    }
}

fn parse_rows<F>(
    rows: &[Vec<Entry>],
    parse: impl Fn(&str) -> Result<F, FieldError>,
) -> Res<Vec<Vec<F>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|e| parse(&e.text()).map_err(CliError::from))
                .collect()
        })
        .collect()
}

fn hom_generic<F: Scalar + fmt::Display>(
    g: &LieAlgebra<F>,
    gens: &[Vec<F>],
    h: &LieAlgebra<F>,
    images: &[Vec<F>],
) -> Res<(Value, String, bool)> {
    match extend_lattice_hom(g, gens, h, images) {
        Ok(l) => {
            let rows: Vec<Vec<String>> = l.iter().map(|r| vec_strings(r)).collect();
            let text = format!(
                "homomorphism {}x{}\n{}\nextend-hom PASS\n",
                h.dim(),
                g.dim(),
                rows.iter()
                    .map(|r| r.join(" "))
                    .collect::<Vec<_>>()
                    .join("\n")
            );
            Ok((json!({ "matrix": rows }), text, true))
        }
        Err(HomError::DimensionMismatch { .. }) => Err(CliError::Usage(
            extend_lattice_hom(g, gens, h, images)
                .unwrap_err()
                .to_string(),
        )),
        Err(e) => {
            let witness = match &e {
                HomError::NotAHomomorphism { i, j } => json!({ "i": i, "j": j }),
                HomError::NotLinear { index } => json!({ "generator": index }),
                HomError::GeneratorsDoNotSpan { count, rank, dim } => {
                    json!({ "count": count, "rank": rank, "dim": dim })
                }
                HomError::DimensionMismatch { .. } => Value::Null,
            };
            let text = format!("{e}\nextend-hom FAIL\n");
            Ok((
                json!({ "error": e.to_string(), "witness": witness }),
                text,
                false,
            ))
        }
    }
}

fn extend_hom(path: &Path, seed: u64) -> Res<Outcome> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let spec: HomSpec = toml::from_str(&raw).map_err(|e| CliError::Usage(e.to_string()))?;
    let base = config_base(path);
    let (src, tgt) = (
        load_named(&spec.source, &base)?,
        load_named(&spec.target, &base)?,
    );
    let quad_d = [&src, &tgt].iter().find_map(|a| a.field().radicand());
    let d = spec.d.or(quad_d);
    let (result, text, pass) = match d {
        Some(d) => {
            let (g, h) = (src.into_quad(d)?, tgt.into_quad(d)?);
            let p = |s: &str| QuadFieldElem::parse(s, Some(d));
            hom_generic(
                &g,
                &parse_rows(&spec.generators, p)?,
                &h,
                &parse_rows(&spec.images, p)?,
            )?
        }
        None => {
            let (AnyAlgebra::Rational(g), AnyAlgebra::Rational(h)) = (src, tgt) else {
                return Err(CliError::Internal("field detection failed".into()));
            };
            hom_generic(
                &g,
                &parse_rows(&spec.generators, parse_rational)?,
                &h,
                &parse_rows(&spec.images, parse_rational)?,
            )?
        }
    };
    let config = json!({ "seed": seed, "path": path.display().to_string(), "spec": spec });
    Ok(Outcome {
        artifact: Artifact::new("extend-hom", config).result(result, Some(pass)),
        text: header("extend-hom", seed) + &text,
        pass,
        data: None,
    })
}
