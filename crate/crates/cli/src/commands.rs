//! The subcommands. Each one computes its outputs in memory; `main` writes
//! them into a fresh run directory.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use maxrep::hyperbolic::octagon_hyperbolization;
use maxrep::max_reps::{milnor_wood_bound, toledo, translation_length_sp, LengthOptions};
use maxrep::surface_group::{builtin_twist, curve_system, load_curve_system, load_twists, CurveSystem, Twist};
use maxrep::{Embedding, Hyperbolization, MaximalRep, Tolerances};
use maxrep_lab::{causal_suite, lemma_suite, orbit_probe, qi_estimate, sample_words, task_rng};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::error::CliError;
use crate::record::{RepInfo, Settings, Status, ToledoSummary};

/// Soft budget for `verify` with the default configuration.
pub const VERIFY_BUDGET: Duration = Duration::from_secs(600);

/// Stream for the seed of the translation-length minimizer; the lab uses
/// streams below `4 << 32`.
const LENGTH_STREAM: u64 = 4 << 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepSpec {
    Diagonal,
    Irreducible,
    File(PathBuf),
}

impl FromStr for RepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "diagonal" => Ok(RepSpec::Diagonal),
            "irreducible" => Ok(RepSpec::Irreducible),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(RepSpec::File(p.into())),
                _ => Err(format!("`{s}`: expected diagonal, irreducible or file:PATH")),
            },
        }
    }
}

impl std::fmt::Display for RepSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RepSpec::Diagonal => write!(f, "diagonal"),
            RepSpec::Irreducible => write!(f, "irreducible"),
            RepSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// A representation together with the hyperbolization its words are drawn
/// from and compared against.
pub struct Loaded {
    pub rep: MaximalRep,
    pub reference: Option<Hyperbolization>,
    pub info: RepInfo,
}

fn builtin_hyperbolization(genus: u32, tol: &Tolerances) -> Result<Hyperbolization, CliError> {
    if genus != 2 {
        return Err(CliError::Unsupported(format!("no built-in hyperbolization for genus {genus}")));
    }
    Ok(octagon_hyperbolization(tol))
}

/// Builds the representation named by `spec`. `genus` and `n` are only
/// checked against a file when they were given explicitly.
pub fn load_rep(spec: &RepSpec, genus: Option<u32>, n: Option<usize>, tol: &Tolerances) -> Result<Loaded, CliError> {
    let (rep, reference, source) = match spec {
        RepSpec::Diagonal | RepSpec::Irreducible => {
            let n = n.unwrap_or(2);
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let h = builtin_hyperbolization(genus.unwrap_or(2), tol)?;
            let e = if *spec == RepSpec::Diagonal { Embedding::diagonal(n) } else { Embedding::irreducible(n) };
            let rep = MaximalRep::compose(&h, &e, tol)?;
            (rep, Some(h), format!("octagon ∘ {spec}({n})"))
        }
        RepSpec::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let rep = MaximalRep::from_table(&text, tol)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            if genus.is_some_and(|g| g != rep.genus()) || n.is_some_and(|n| n != rep.n()) {
                return Err(CliError::Config(format!(
                    "{} holds a genus {} representation into Sp({}, R), which contradicts --genus/--n",
                    path.display(),
                    rep.genus(),
                    2 * rep.n()
                )));
            }
            let reference = (rep.genus() == 2).then(|| octagon_hyperbolization(tol));
            (rep, reference, path.display().to_string())
        }
    };
    let info = RepInfo {
        construction: rep.construction().as_str().to_string(),
        genus: rep.genus(),
        n: rep.n(),
        source,
        relator_residual: rep.relator_residual()?,
        milnor_wood_bound: milnor_wood_bound(rep.genus(), rep.n()),
    };
    Ok(Loaded { rep, reference, info })
}

pub struct Context {
    pub cfg: Config,
    pub settings: Settings,
    pub seed: u64,
    pub loaded: Option<Loaded>,
}

impl Context {
    fn tol(&self) -> &Tolerances {
        &self.cfg.tolerances
    }

    fn loaded(&self) -> &Loaded {
        self.loaded.as_ref().expect("command needs a representation")
    }

    fn length_options(&self) -> LengthOptions {
        LengthOptions {
            starts: self.cfg.sampling.length_starts,
            polish_rounds: self.cfg.sampling.polish_rounds,
            seed: task_rng(self.seed, LENGTH_STREAM).random(),
            ..LengthOptions::default()
        }
    }

    fn reference(&self) -> Result<&Hyperbolization, CliError> {
        self.loaded()
            .reference
            .as_ref()
            .ok_or_else(|| CliError::Unsupported("no hyperbolization to sample words from".into()))
    }

    fn words(&self, count: usize) -> Result<Vec<maxrep::surface_group::Word>, CliError> {
        let h = self.reference()?;
        Ok(sample_words(h, count, self.cfg.sampling.max_word_len, self.seed, self.tol())?)
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(String, Vec<u8>)>,
    pub lines: Vec<String>,
    pub status: Option<Status>,
    pub warnings: Vec<String>,
    pub toledo: Option<ToledoSummary>,
}

impl Outcome {
    pub fn status(&self) -> Status {
        self.status.unwrap_or(Status::Ok)
    }
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report serializes");
    v.push(b'\n');
    v
}

fn csv_bytes(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::NonNumeric).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn verify(ctx: &Context) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let l = ctx.loaded();
    let report = lemma_suite(&l.rep, &ctx.cfg.sampling.suite, ctx.seed, ctx.tol(), &ctx.length_options())?;
    let mut out = Outcome::default();
    out.lines.push(format!(
        "cone: {}/{} passed, worst lambda_min {:e}, worst relative margin {:e}",
        report.cone.passed,
        report.cone.cases.len(),
        report.cone.worst_lambda_min,
        report.cone.worst_relative_min
    ));
    out.lines.push(format!(
        "comparison: A' = {:.4}, A'' = {}, B'' = {:e}",
        report.cone.comparison.a_prime, report.cone.comparison.a_double_prime, report.cone.comparison.b_double_prime
    ));
    out.lines.push(format!(
        "attainment: {}/{} passed, worst gap {:e}",
        report.attainment.passed,
        report.attainment.cases.len(),
        report.attainment.worst_gap
    ));
    out.lines.push(format!(
        "causal: {}/{} passed, worst margins {:e} (literal) {:e} (proof)",
        report.causal.passed, report.causal.curves, report.causal.worst_margin_literal, report.causal.worst_margin_proof
    ));
    out.lines.push(format!("{} checks, {} failed", report.checks, report.failed));
    out.status = Some(if report.passed { Status::Ok } else { Status::ChecksFailed });
    out.files.push(("lemma_suite.json".into(), json(&report)));
    let elapsed = start.elapsed();
    if elapsed > VERIFY_BUDGET {
        out.warnings.push(format!(
            "verify took {:.0} s, over the {} s budget",
            elapsed.as_secs_f64(),
            VERIFY_BUDGET.as_secs()
        ));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ToledoReport {
    value: i64,
    milnor_wood_bound: i64,
    maximal: bool,
    raw: f64,
    residual: f64,
    steps: usize,
    max_correction_modulus: f64,
}

pub fn toledo_cmd(ctx: &Context) -> Result<Outcome, CliError> {
    let l = ctx.loaded();
    let t = toledo(&l.rep, ctx.tol())?;
    let bound = l.info.milnor_wood_bound;
    let report = ToledoReport {
        value: t.value,
        milnor_wood_bound: bound,
        maximal: t.value.abs() == bound,
        raw: t.raw,
        residual: t.residual,
        steps: t.steps,
        max_correction_modulus: t.max_correction_modulus,
    };
    let mut out = Outcome::default();
    out.lines.push(format!("toledo: {}", t.value));
    out.lines.push(format!("milnor-wood bound: {bound}"));
    out.lines.push(format!("maximal: {}", report.maximal));
    out.lines.push(format!("winding residual: {:e}", t.residual));
    out.files.push(("toledo.json".into(), json(&report)));
    out.toledo = Some(ToledoSummary {
        value: t.value,
        bound,
        steps: t.steps,
        residual: t.residual,
    });
    Ok(out)
}

pub fn trlen(ctx: &Context) -> Result<Outcome, CliError> {
    let l = ctx.loaded();
    let h = ctx.reference()?;
    let words = ctx.words(ctx.cfg.sampling.trlen_words)?;
    let opts = ctx.length_options();
    let rows = words
        .par_iter()
        .map(|w| {
            let tr_h = h.translation_length(w, ctx.tol()).map_err(|e| CliError::Numerical(e.to_string()))?;
            let r = translation_length_sp(&l.rep, w, ctx.tol(), &opts)?;
            Ok((w.to_string(), tr_h, r))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let (lo, hi) = rows
        .iter()
        .map(|(_, h, r)| r.value / h)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let unconverged = rows.iter().filter(|(_, _, r)| !r.converged).count();
    let mut out = Outcome::default();
    out.lines.push(format!("{} words, tr_rho / tr_h in [{lo:.6}, {hi:.6}]", rows.len()));
    if unconverged > 0 {
        out.warnings.push(format!("{unconverged} minimizations did not converge"));
    }
    let header = ["word", "tr_h", "tr_rho", "lower_bound", "spectral_bound", "converged"];
    let body = rows
        .into_iter()
        .map(|(w, tr_h, r)| {
            vec![w, num(tr_h), num(r.value), num(r.lower_bound), num(r.spectral_bound), r.converged.to_string()]
        })
        .collect();
    out.files.push(("trlen.csv".into(), csv_bytes(header.map(String::from).to_vec(), body)?));
    Ok(out)
}

pub fn qi(ctx: &Context) -> Result<Outcome, CliError> {
    let l = ctx.loaded();
    let words = ctx.words(ctx.cfg.sampling.qi_words)?;
    let (fit, samples) = qi_estimate(&l.rep, &words, ctx.tol(), &ctx.length_options())?;
    let mut out = Outcome::default();
    out.lines.push(format!("A = {}, B = {}", fit.a, fit.b));
    out.lines.push(format!(
        "{} samples, {} skipped, tr_rho / tr_h in [{:.6}, {:.6}]",
        fit.samples, fit.skipped, fit.ratio_min, fit.ratio_max
    ));
    let header = ["word", "tr_h", "tr_rho", "d_J"].map(String::from).to_vec();
    let body = samples
        .iter()
        .map(|s| vec![s.word.clone(), num(s.tr_h), num(s.tr_rho), num(s.d_j)])
        .collect();
    out.files.push(("qi_scatter.csv".into(), csv_bytes(header, body)?));
    out.files.push(("qi_fit.json".into(), json(&fit)));
    Ok(out)
}

fn load_twist(ctx: &Context, genus: u32) -> Result<Twist, CliError> {
    let label = ctx.settings.twist.as_str();
    let Some(path) = &ctx.cfg.twists.file else {
        return Ok(builtin_twist(genus, label)?);
    };
    if label == "identity" || label == "id" {
        return Ok(Twist::identity(genus));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    load_twists(&text, ctx.cfg.twists.max_conjugator)?
        .into_iter()
        .find(|t| t.label == label)
        .ok_or_else(|| CliError::Config(format!("{} has no twist `{label}`", path.display())))
}

fn load_curves(ctx: &Context, genus: u32) -> Result<CurveSystem, CliError> {
    match &ctx.cfg.curves.file {
        None => Ok(curve_system(genus)?),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            Ok(load_curve_system(&text)?)
        }
    }
}

pub fn orbit(ctx: &Context) -> Result<Outcome, CliError> {
    let l = ctx.loaded();
    let twist = load_twist(ctx, l.rep.genus())?;
    let curves = load_curves(ctx, l.rep.genus())?;
    let probe = orbit_probe(&l.rep, &twist, &curves, ctx.settings.kmax, ctx.tol(), &ctx.length_options())?;
    let mut out = Outcome::default();
    for (k, s) in probe.ks.iter().zip(&probe.sums) {
        out.lines.push(format!("k = {k:>3}  sum = {s:.6}"));
    }
    out.lines.push(match probe.increasing_from {
        Some(k0) => format!(
            "increasing from k = {k0}, final / initial = {:.4}, diverges: {}",
            probe.final_over_initial, probe.diverges
        ),
        None => format!("not eventually increasing, final / initial = {:.4}", probe.final_over_initial),
    });
    let mut header = vec!["k".to_string(), "sum".to_string()];
    header.extend(probe.labels.iter().cloned());
    let body = probe
        .ks
        .iter()
        .zip(&probe.sums)
        .zip(&probe.per_curve)
        .map(|((k, s), row)| {
            let mut r = vec![k.to_string(), num(*s)];
            r.extend(row.iter().map(|&x| num(x)));
            r
        })
        .collect();
    out.files.push(("orbit_probe.csv".into(), csv_bytes(header, body)?));
    out.files.push(("orbit_probe.json".into(), json(&probe)));
    Ok(out)
}

pub fn causal(ctx: &Context) -> Result<Outcome, CliError> {
    let report = causal_suite(&ctx.cfg.sampling.suite, ctx.seed, ctx.tol())?;
    let mut out = Outcome::default();
    out.lines.push(format!(
        "{}/{} curves at n = {} passed; worst margins {:e} (literal) {:e} (proof); {} non-monotone",
        report.passed,
        report.curves,
        report.n,
        report.worst_margin_literal,
        report.worst_margin_proof,
        report.non_monotone
    ));
    out.status = Some(if report.failed == 0 { Status::Ok } else { Status::ChecksFailed });
    out.files.push(("causal.json".into(), json(&report)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rep_specs_parse() {
        assert_eq!("diagonal".parse::<RepSpec>(), Ok(RepSpec::Diagonal));
        assert_eq!("file:a/b.txt".parse::<RepSpec>(), Ok(RepSpec::File("a/b.txt".into())));
        assert!("file:".parse::<RepSpec>().is_err());
        assert!("fuchsian".parse::<RepSpec>().is_err());
    }

    #[test]
    fn file_reps_are_checked_against_flags() {
        let tol = Tolerances::default();
        let rep = load_rep(&RepSpec::Diagonal, None, Some(1), &tol).unwrap().rep;
        let tmp = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(tmp.path(), rep.to_table()).unwrap();
        let spec = RepSpec::File(tmp.path().into());
        let loaded = load_rep(&spec, None, None, &tol).unwrap();
        assert_eq!((loaded.info.genus, loaded.info.n), (2, 1));
        assert!(matches!(load_rep(&spec, Some(2), Some(2), &tol), Err(CliError::Config(_))));
    }

    #[test]
    fn only_genus_two_is_built_in() {
        let tol = Tolerances::default();
        assert!(matches!(load_rep(&RepSpec::Diagonal, Some(3), None, &tol), Err(CliError::Unsupported(_))));
    }

    #[test]
    fn csv_quotes_words_only() {
        let b = csv_bytes(vec!["word".into(), "x".into()], vec![vec!["a1,-b2".into(), num(1.5)]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "\"word\",\"x\"\n\"a1,-b2\",1.5\n");
    }
}
