use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use serde::Serialize;
use vw_core::exact::Exponent;
use vw_core::localization::size_tuples;
use vw_core::modular::{self, VerificationReport};
use vw_core::universal::{assemble as assemble_series, extract_universal};
use vw_core::{
    AssembledSeries, BundleTuple, Cache, DivisorClass, Engine, Extraction, Mode, PuiseuxSeries, RationalFunction,
    SurfaceKind, ToricSurface, UniversalSeriesSet,
};

use crate::config::{pick, FileConfig};
use crate::output::{emit, Format, Rows};
use crate::{AssembleArgs, CacheGcArgs, CliError, Common, ComputeQArgs, Conjecture, ExtractArgs, ModeSel, VerifyArgs};

const DEFAULT_SEED: u64 = 1;

/// Options shared by every computing command after merging flags with the
/// config file.
struct Env {
    file: FileConfig,
    seed: u64,
    engine: Engine,
    output: Option<PathBuf>,
    format: Format,
}

fn resolve(common: &Common) -> Result<Env, CliError> {
    let file = match &common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let seed = pick(common.seed, &file, "seed")?.unwrap_or(DEFAULT_SEED);
    let workers = pick(common.workers, &file, "workers")?
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let no_cache = common.no_cache || file.flag("no_cache")?;
    let cache = if no_cache {
        None
    } else {
        match pick(common.cache_dir.clone(), &file, "cache_dir")? {
            Some(dir) => Some(Cache::new(dir)),
            None => Cache::from_env(),
        }
    };
    let output = pick(common.output.clone(), &file, "output")?;
    let format = pick(common.format, &file, "format")?.unwrap_or(Format::Json);
    Ok(Env { file, seed, engine: Engine::new(workers).with_cache(cache), output, format })
}

fn modes(sel: ModeSel) -> Vec<Mode> {
    match sel {
        ModeSel::Unrefined => vec![Mode::Unrefined],
        ModeSel::Refined => vec![Mode::Refined],
        ModeSel::Both => vec![Mode::Unrefined, Mode::Refined],
    }
}

fn single_mode(sel: ModeSel) -> Result<Mode, CliError> {
    match sel {
        ModeSel::Unrefined => Ok(Mode::Unrefined),
        ModeSel::Refined => Ok(Mode::Refined),
        ModeSel::Both => Err(CliError::Usage("this command takes a single mode".into())),
    }
}

/// `trivial`, or `;`-separated classes: `0`, `K`, `-K`, `3K`, or `a,b`.
pub fn parse_beta(spec: &str, s: &ToricSurface, rank: usize) -> Result<Vec<DivisorClass>, CliError> {
    let s_count = rank.saturating_sub(1);
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("trivial") {
        return Ok(vec![vec![0; s.picard_rank()]; s_count]);
    }
    let parts: Vec<&str> = if spec.is_empty() { Vec::new() } else { spec.split(';').map(str::trim).collect() };
    if parts.len() != s_count {
        return Err(CliError::Usage(format!("rank {rank} needs {s_count} classes in --beta, got {}", parts.len())));
    }
    parts
        .into_iter()
        .map(|p| {
            if p == "0" || p.eq_ignore_ascii_case("o") {
                return Ok(vec![0; s.picard_rank()]);
            }
            if let Some(k) = p.strip_suffix(['K', 'k']) {
                let m: i64 = match k {
                    "" => 1,
                    "-" => -1,
                    k => k.parse().map_err(|_| CliError::Usage(format!("bad class {p:?}")))?,
                };
                return Ok(s.canonical.iter().map(|x| m * x).collect());
            }
            let class: Vec<i64> = p
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| CliError::Usage(format!("bad class {p:?}"))))
                .collect::<Result<_, _>>()?;
            if class.len() != s.picard_rank() {
                return Err(CliError::Usage(format!("class {p:?} needs {} coordinates", s.picard_rank())));
            }
            Ok(class)
        })
        .collect()
}

/// One `Q_n` request, kept for the cache spot-check.
struct Task {
    surface: ToricSurface,
    bundles: BundleTuple,
    n: Vec<u32>,
    mode: Mode,
}

/// Recompute one randomly chosen cached `Q_n` and compare.
fn spot_check(env: &Env, tasks: &[Task]) -> Result<(), CliError> {
    let Some(cache) = env.engine.cache() else {
        return Ok(());
    };
    if tasks.is_empty() {
        return Ok(());
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(env.seed);
    let t = &tasks[rng.gen_range(0..tasks.len())];
    let Some(hit) = cache.get(t.surface.kind, &t.bundles, &t.n, t.mode)? else {
        return Ok(());
    };
    let fresh = env.engine.compute_q_uncached(&t.surface, &t.bundles, &t.n, t.mode, env.seed)?;
    if fresh.value != hit.value {
        return Err(CliError::Compute(format!(
            "cache entry for {} n={:?} {} disagrees with a recomputation",
            t.surface.kind,
            t.n,
            t.mode.id()
        )));
    }
    log::info!("cache spot-check passed for {} n={:?} {}", t.surface.kind, t.n, t.mode.id());
    Ok(())
}

#[derive(Serialize)]
struct RunConfig {
    command: &'static str,
    rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    surface: Option<SurfaceKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<Vec<DivisorClass>>,
    n_max: u32,
    modes: Vec<Mode>,
    seed: u64,
}

#[derive(Serialize)]
struct QRecord {
    n: Vec<u32>,
    value: RationalFunction,
}

#[derive(Serialize)]
struct ModeRun {
    mode: Mode,
    records: Vec<QRecord>,
    series: PuiseuxSeries,
}

#[derive(Serialize)]
struct ComputeQReport {
    schema: &'static str,
    config: RunConfig,
    runs: Vec<ModeRun>,
}

pub fn compute_q(a: &ComputeQArgs) -> Result<(), CliError> {
    let env = resolve(&a.common)?;
    let surface_name = pick(a.surface.clone(), &env.file, "surface")?
        .ok_or_else(|| CliError::Usage("--surface is required".into()))?;
    let kind: SurfaceKind = surface_name.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
    let surface = ToricSurface::new(kind);
    let rank = pick(a.rank, &env.file, "rank")?.unwrap_or(1);
    if rank == 0 {
        return Err(CliError::Usage("rank must be at least 1".into()));
    }
    let beta_spec = pick(a.beta.clone(), &env.file, "beta")?.unwrap_or_else(|| "trivial".into());
    let beta = parse_beta(&beta_spec, &surface, rank)?;
    let n_max = pick(a.nmax, &env.file, "nmax")?.unwrap_or(0);
    let sel = pick(a.mode, &env.file, "mode")?.unwrap_or(ModeSel::Refined);
    let bundles = BundleTuple::lift(&surface, &beta);

    let mut runs = Vec::new();
    let mut tasks = Vec::new();
    let mut rows = Rows::default();
    for mode in modes(sel) {
        let mut records = Vec::new();
        let mut series = PuiseuxSeries::zero(Exponent::from_integer(n_max as i64 + 1));
        for n in size_tuples(rank, n_max) {
            let q = env.engine.compute_q(&surface, &bundles, &n, mode, env.seed)?;
            let total: u32 = n.iter().sum();
            series.add_term(Exponent::from_integer(total as i64), q.value.clone());
            rows.push("Q", &format!("{} {:?}", mode.id(), n), total.to_string(), q.value.to_string());
            records.push(QRecord { n: n.clone(), value: q.value });
            tasks.push(Task { surface: surface.clone(), bundles: bundles.clone(), n, mode });
        }
        rows.series("series", mode.id(), &series);
        runs.push(ModeRun { mode, records, series });
    }
    spot_check(&env, &tasks)?;
    let report = ComputeQReport {
        schema: "vw.compute-q/1",
        config: RunConfig { command: "compute-q", rank, surface: Some(kind), beta: Some(beta), n_max, modes: modes(sel), seed: env.seed },
        runs,
    };
    emit(&report, &rows, env.format, env.output.as_deref())
}

struct ExtractSettings {
    rank: usize,
    n_max: u32,
    mode: Mode,
}

fn extract_settings(a: &ExtractArgs, file: &FileConfig, default_rank: Option<usize>) -> Result<ExtractSettings, CliError> {
    let rank = pick(a.rank, file, "rank")?
        .or(default_rank)
        .ok_or_else(|| CliError::Usage("--rank is required".into()))?;
    if !(2..=4).contains(&rank) {
        return Err(CliError::Usage(format!("extraction supports ranks 2 to 4, got {rank}")));
    }
    let n_max = pick(a.nmax, file, "nmax")?.ok_or_else(|| CliError::Usage("--nmax is required".into()))?;
    let mode = single_mode(pick(a.mode, file, "mode")?.unwrap_or(ModeSel::Refined))?;
    Ok(ExtractSettings { rank, n_max, mode })
}

fn run_extraction(env: &Env, x: &ExtractSettings) -> Result<Extraction, CliError> {
    let extraction = extract_universal(&env.engine, x.rank, x.n_max, x.mode, env.seed)?;
    let mut tasks = Vec::new();
    for pair in &extraction.basis {
        let (surface, bundles) = pair.bundles();
        for n in size_tuples(x.rank, x.n_max) {
            tasks.push(Task { surface: surface.clone(), bundles: bundles.clone(), n, mode: x.mode });
        }
    }
    spot_check(env, &tasks)?;
    Ok(extraction)
}

fn universal_rows(rows: &mut Rows, u: &UniversalSeriesSet) {
    for e in &u.entries {
        rows.series("universal", &e.label, &e.series);
    }
}

fn assembled_rows(rows: &mut Rows, z: &AssembledSeries) {
    rows.series("assembled", "A", &z.a);
    rows.series("assembled", "B", &z.b);
    for c in &z.c {
        rows.series("assembled", &format!("C{}{}", c.i, c.j), &c.series);
    }
}

#[derive(Serialize)]
struct ExtractReport {
    schema: &'static str,
    config: RunConfig,
    extraction: Extraction,
    assembled: AssembledSeries,
}

pub fn extract(a: &ExtractArgs) -> Result<(), CliError> {
    let env = resolve(&a.common)?;
    let x = extract_settings(a, &env.file, None)?;
    let extraction = run_extraction(&env, &x)?;
    let assembled = assemble_series(&extraction.universal)?;
    let mut rows = Rows::default();
    for (pair, s) in extraction.basis.iter().zip(&extraction.basis_series) {
        rows.series("basis", &pair.to_string(), s);
    }
    universal_rows(&mut rows, &extraction.universal);
    assembled_rows(&mut rows, &assembled);
    let report = ExtractReport {
        schema: "vw.extract/1",
        config: RunConfig { command: "extract", rank: x.rank, surface: None, beta: None, n_max: x.n_max, modes: vec![x.mode], seed: env.seed },
        extraction,
        assembled,
    };
    emit(&report, &rows, env.format, env.output.as_deref())
}

/// Universal series from an `extract` report or a bare series set.
fn read_universal(path: &Path) -> Result<UniversalSeriesSet, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let node = value
        .pointer("/extraction/universal")
        .or_else(|| value.get("universal"))
        .cloned()
        .unwrap_or(value);
    serde_json::from_value(node).map_err(|e| CliError::Usage(format!("{}: not a universal series set: {e}", path.display())))
}

#[derive(Serialize)]
struct AssembleReport {
    schema: &'static str,
    rank: usize,
    mode: Mode,
    n_max: u32,
    assembled: AssembledSeries,
}

pub fn assemble(a: &AssembleArgs) -> Result<(), CliError> {
    let env = resolve(&a.extract.common)?;
    let universal = match pick(a.input.clone(), &env.file, "input")? {
        Some(p) => read_universal(&p)?,
        None => run_extraction(&env, &extract_settings(&a.extract, &env.file, None)?)?.universal,
    };
    let assembled = assemble_series(&universal)?;
    let mut rows = Rows::default();
    assembled_rows(&mut rows, &assembled);
    let report =
        AssembleReport { schema: "vw.assemble/1", rank: universal.rank, mode: universal.mode, n_max: universal.n_max, assembled };
    emit(&report, &rows, env.format, env.output.as_deref())
}

#[derive(Serialize)]
struct VerifyOutput {
    schema: &'static str,
    seed: u64,
    report: VerificationReport,
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let env = resolve(&a.common)?;
    let rank_flag = pick(a.rank, &env.file, "rank")?;
    let order_flag = pick(a.order, &env.file, "order")?;
    let report = if a.check.k3 {
        let rank = rank_flag.unwrap_or(1);
        if rank == 0 {
            return Err(CliError::Usage("rank must be at least 1".into()));
        }
        modular::verify_k3(rank, order_flag.unwrap_or(3 * rank as u32))?
    } else {
        let rank = match a.check.conjecture {
            Some(Conjecture::GkRank2) => 2,
            Some(Conjecture::GkRank3) => 3,
            None => rank_flag.ok_or_else(|| CliError::Usage("--theorem-bprime needs --rank".into()))?,
        };
        if rank_flag.is_some_and(|r| r != rank) {
            return Err(CliError::Usage(format!("--rank {} conflicts with the rank {rank} conjecture", rank_flag.unwrap())));
        }
        if !(2..=3).contains(&rank) {
            return Err(CliError::Usage(format!("closed forms exist for ranks 2 and 3, not {rank}")));
        }
        let terms = order_flag.unwrap_or(if rank == 2 { 4 } else { 3 });
        if terms == 0 {
            return Err(CliError::Usage("--order must be positive".into()));
        }
        let mode = single_mode(pick(a.mode, &env.file, "mode")?.unwrap_or(ModeSel::Refined))?;
        let universal = match pick(a.input.clone(), &env.file, "input")? {
            Some(p) => read_universal(&p)?,
            None => {
                let x = ExtractSettings { rank, n_max: terms - 1, mode };
                run_extraction(&env, &x)?.universal
            }
        };
        if universal.rank != rank {
            return Err(CliError::Usage(format!("input holds rank {} series, expected {rank}", universal.rank)));
        }
        let assembled = assemble_series(&universal)?;
        if a.check.theorem_bprime {
            modular::verify_canonical_curve(rank, terms, &assembled)?
        } else {
            modular::verify(rank, terms, &assembled)?
        }
    };
    let mut rows = Rows::default();
    for v in &report.series {
        let status = if v.congruent {
            "congruent"
        } else if v.insufficient_precision {
            "insufficient precision"
        } else {
            "mismatch"
        };
        let at = v.first_mismatch.as_ref().map(|m| m.relative_exponent.clone()).unwrap_or_default();
        rows.push("verdict", &v.name, at, status.to_string());
    }
    let all = report.all_congruent;
    let failing: Vec<String> = report.series.iter().filter(|v| !v.congruent).map(|v| v.name.clone()).collect();
    emit(&VerifyOutput { schema: "vw.verify/1", seed: env.seed, report }, &rows, env.format, env.output.as_deref())?;
    if all {
        Ok(())
    } else {
        Err(CliError::Mismatch(failing.join(", ")))
    }
}

pub fn cache_gc(a: &CacheGcArgs) -> Result<(), CliError> {
    let file = match &a.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let cache = match pick(a.cache_dir.clone(), &file, "cache_dir")? {
        Some(dir) => Cache::new(dir),
        None => Cache::from_env().ok_or_else(|| CliError::Usage("no cache directory: pass --cache-dir or set VW_CACHE_DIR".into()))?,
    };
    let max_age = match pick(a.max_age_days, &file, "max_age_days")? {
        Some(d) if d.is_finite() && d >= 0.0 => Some(Duration::from_secs_f64(d * 86_400.0)),
        Some(d) => return Err(CliError::Usage(format!("bad --max-age-days {d}"))),
        None => None,
    };
    let report = cache.gc(max_age)?;
    let mut rows = Rows::default();
    rows.push("gc", "kept", String::new(), report.kept.to_string());
    rows.push("gc", "removed", String::new(), report.removed.to_string());
    rows.push("gc", "corrupt", String::new(), report.corrupt.to_string());
    emit(&report, &rows, Format::Json, a.output.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_specs() {
        let p2 = ToricSurface::new(SurfaceKind::P2);
        assert_eq!(parse_beta("trivial", &p2, 3).unwrap(), vec![vec![0], vec![0]]);
        assert_eq!(parse_beta("K", &p2, 2).unwrap(), vec![p2.canonical.clone()]);
        assert_eq!(parse_beta("2K; 0", &p2, 3).unwrap(), vec![vec![2 * p2.canonical[0]], vec![0]]);
        assert_eq!(parse_beta("-K", &p2, 2).unwrap(), vec![vec![-p2.canonical[0]]]);
        assert_eq!(parse_beta("", &p2, 1).unwrap(), Vec::<DivisorClass>::new());
        let q = ToricSurface::new(SurfaceKind::P1xP1);
        assert_eq!(parse_beta("1,-1", &q, 2).unwrap(), vec![vec![1, -1]]);
        assert!(parse_beta("1", &q, 2).is_err());
        assert!(parse_beta("K", &q, 3).is_err());
        assert!(parse_beta("xK", &q, 2).is_err());
    }
}
