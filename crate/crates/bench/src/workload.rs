//! Workload specs and the query runner.
//!
//! A spec is a line-oriented `key = value` file; `#` starts a comment.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankaccess_core::dar::{
    build_backend, choose_epsilon, conformal_query, exact_query_traced, BackendKind,
};
use rankaccess_core::epsample::{build_eps_sample_with, EpsSample, SampleSizing, DEFAULT_SIZE_CONSTANT};
use rankaccess_core::hier::{HierConfig, HierIndex};
use rankaccess_core::kthlevel2d::{build_levels_2d, LevelStructure2D};
use rankaccess_core::srr::{exhaustive_query_stripe, KdTree, SrrBackend};
use rankaccess_core::{select_rank_exhaustive, Dataset, ScoringVector, StripeRange};

use crate::error::{usage, Result};
use crate::gen::{gen_directions, generate, CoordDistribution};
use crate::ingest::{load_csv, Normalization};
use crate::persist::{encode, load, load_dataset, Stored};
use crate::report::{ReportRow, Summary, WorkloadReport};

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Generated {
        dist: CoordDistribution,
        n: usize,
        d: usize,
        seed: u64,
    },
    /// A stored dataset or a CSV read with every column as is.
    File(PathBuf),
    Csv {
        path: PathBuf,
        columns: Vec<String>,
        normalization: Normalization,
    },
}

impl DataSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DataSource::Generated { dist, n, d, seed } => generate(*dist, *n, *d, *seed),
            DataSource::File(path) => load_dataset(path),
            DataSource::Csv {
                path,
                columns,
                normalization,
            } => Ok(load_csv(path, columns, *normalization)?.data),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    /// Stripe range retrieval.
    Srs,
    Conformal,
    Exact,
    KthLevel2D,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Srs => "srs",
            QueryKind::Conformal => "conformal",
            QueryKind::Exact => "exact",
            QueryKind::KthLevel2D => "kthlevel2d",
        }
    }
}

impl std::str::FromStr for QueryKind {
    type Err = crate::BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "srs" => QueryKind::Srs,
            "conformal" => QueryKind::Conformal,
            "exact" => QueryKind::Exact,
            "kthlevel2d" => QueryKind::KthLevel2D,
            other => {
                return Err(usage(format!(
                    "unknown query kind {other:?} (expected srs, conformal, exact or kthlevel2d)"
                )))
            }
        })
    }
}

/// Target width of stripe queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StripeWidth {
    /// About this many points: the stripe spans ranks `c - h ..= c + h`
    /// around a uniform random rank `c`, with `h = ⌊(w - 1) / 2⌋`.
    Points(usize),
    /// `[a, a + w]` where `a` is the score of a uniform random point.
    Score(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RankRule {
    Fixed(usize),
    Random,
    /// Query `j` uses entry `j mod len`.
    Sweep(Vec<usize>),
}

impl std::str::FromStr for RankRule {
    type Err = crate::BenchError;

    /// `random`, `fixed:K` or `sweep:A,B,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || usage(format!("bad rank rule {s:?} (expected random, fixed:K or sweep:A,B,..)"));
        if s == "random" {
            return Ok(RankRule::Random);
        }
        if let Some(k) = s.strip_prefix("fixed:") {
            return k.trim().parse().map(RankRule::Fixed).map_err(|_| bad());
        }
        if let Some(list) = s.strip_prefix("sweep:") {
            let ks = list
                .split(',')
                .map(|k| k.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            if ks.is_empty() {
                return Err(bad());
            }
            return Ok(RankRule::Sweep(ks));
        }
        Err(bad())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub source: DataSource,
    pub kind: QueryKind,
    pub queries: usize,
    pub width: StripeWidth,
    pub rank: RankRule,
    /// When absent, chosen from `kappa` or left at the default.
    pub epsilon: Option<f64>,
    pub phi: f64,
    pub kappa: Option<usize>,
    pub backend: BackendKind,
    pub decay: usize,
    pub size_constant: f64,
    pub query_seed: u64,
    pub sample_seed: u64,
    pub index_seed: u64,
    pub verify: bool,
    /// Prebuilt backend index.
    pub index: Option<PathBuf>,
    /// Prebuilt sample.
    pub sample: Option<PathBuf>,
}

pub const DEFAULT_EPSILON: f64 = 0.05;

impl Default for WorkloadSpec {
    fn default() -> Self {
        Self {
            source: DataSource::Generated {
                dist: CoordDistribution::Uniform,
                n: 10_000,
                d: 2,
                seed: 0,
            },
            kind: QueryKind::Srs,
            queries: 100,
            width: StripeWidth::Points(100),
            rank: RankRule::Random,
            epsilon: None,
            phi: 0.1,
            kappa: None,
            backend: BackendKind::KdTree,
            decay: rankaccess_core::hier::DEFAULT_DECAY,
            size_constant: DEFAULT_SIZE_CONSTANT,
            query_seed: 1,
            sample_seed: 2,
            index_seed: 3,
            verify: false,
            index: None,
            sample: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| usage(format!("line {line}: {key}: cannot parse {value:?}")))
}

impl WorkloadSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::BenchError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base)
    }

    /// Parses spec text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut spec = WorkloadSpec::default();
        let mut seen: Vec<String> = Vec::new();
        let (mut dist, mut n, mut d, mut seed) = (CoordDistribution::Uniform, 10_000usize, 2usize, 0u64);
        let mut data_path: Option<PathBuf> = None;
        let mut csv_path: Option<PathBuf> = None;
        let mut columns: Vec<String> = Vec::new();
        let mut normalization = Normalization::None;
        let resolve = |v: &str| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| usage(format!("line {line}: expected `key = value`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(usage(format!("line {line}: {key} given twice")));
            }
            seen.push(key.to_string());
            match key {
                "data" => data_path = Some(resolve(value)),
                "csv" => csv_path = Some(resolve(value)),
                "columns" => {
                    columns = value.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect()
                }
                "normalize" => normalization = parse_value(line, key, value)?,
                "dist" => dist = parse_value(line, key, value)?,
                "n" => n = parse_value(line, key, value)?,
                "d" => d = parse_value(line, key, value)?,
                "seed" => seed = parse_value(line, key, value)?,
                "query" => spec.kind = parse_value(line, key, value)?,
                "queries" => spec.queries = parse_value(line, key, value)?,
                "width" => spec.width = StripeWidth::Points(parse_value(line, key, value)?),
                "width_score" => spec.width = StripeWidth::Score(parse_value(line, key, value)?),
                "rank" => spec.rank = parse_value(line, key, value)?,
                "epsilon" => spec.epsilon = Some(parse_value(line, key, value)?),
                "phi" => spec.phi = parse_value(line, key, value)?,
                "kappa" => spec.kappa = Some(parse_value(line, key, value)?),
                "backend" => spec.backend = parse_value(line, key, value)?,
                "decay" => spec.decay = parse_value(line, key, value)?,
                "size_constant" => spec.size_constant = parse_value(line, key, value)?,
                "query_seed" => spec.query_seed = parse_value(line, key, value)?,
                "sample_seed" => spec.sample_seed = parse_value(line, key, value)?,
                "index_seed" => spec.index_seed = parse_value(line, key, value)?,
                "verify" => spec.verify = parse_value(line, key, value)?,
                "index" => spec.index = Some(resolve(value)),
                "sample" => spec.sample = Some(resolve(value)),
                other => return Err(usage(format!("line {line}: unknown key {other:?}"))),
            }
        }
        if seen.iter().any(|k| k == "width") && seen.iter().any(|k| k == "width_score") {
            return Err(usage("width and width_score are mutually exclusive"));
        }
        spec.source = match (data_path, csv_path) {
            (Some(_), Some(_)) => return Err(usage("data and csv are mutually exclusive")),
            (Some(p), None) => DataSource::File(p),
            (None, Some(path)) => DataSource::Csv {
                path,
                columns,
                normalization,
            },
            (None, None) => DataSource::Generated { dist, n, d, seed },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let DataSource::Generated { dist, n, d, .. } = &self.source {
            if *n == 0 || *d == 0 {
                return Err(usage("n and d must be positive"));
            }
            if let CoordDistribution::Zipfian { s, v } = dist {
                if !(*s > 0.0) || *v == 0 {
                    return Err(usage("dist: zipfian needs s > 0 and V >= 1"));
                }
            }
        }
        match self.width {
            StripeWidth::Points(0) => return Err(usage("width must be positive")),
            StripeWidth::Score(w) if !(w >= 0.0 && w.is_finite()) => {
                return Err(usage("width_score must be finite and non-negative"))
            }
            _ => {}
        }
        match &self.rank {
            RankRule::Fixed(0) => return Err(usage("rank: ranks start at 1")),
            RankRule::Sweep(ks) if ks.contains(&0) => return Err(usage("rank: ranks start at 1")),
            _ => {}
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(usage("epsilon must lie in (0, 1)"));
            }
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(usage("phi must lie in (0, 1)"));
        }
        if self.kappa == Some(0) {
            return Err(usage("kappa must be positive"));
        }
        if self.decay < 2 {
            return Err(usage("decay must be at least 2"));
        }
        if !(self.size_constant > 0.0 && self.size_constant.is_finite()) {
            return Err(usage("size_constant must be positive"));
        }
        Ok(())
    }

    pub fn sizing(&self) -> SampleSizing {
        SampleSizing {
            constant: self.size_constant,
        }
    }
}

enum Engine {
    Stripe(Box<dyn SrrBackend + Send + Sync>),
    Levels(LevelStructure2D),
}

fn load_backend(path: &Path, data: &Dataset, kind: BackendKind) -> Result<Box<dyn SrrBackend + Send + Sync>> {
    let backend: Box<dyn SrrBackend + Send + Sync> = match (load(path)?, kind) {
        (Stored::KdTree(t), BackendKind::KdTree) => Box::new(t),
        (Stored::Hier(h), BackendKind::Hier) => Box::new(h),
        (other, _) => {
            return Err(usage(format!(
                "{} holds a {:?}, but backend is {}",
                path.display(),
                other.kind(),
                kind.name()
            )))
        }
    };
    if backend.count_halfspace(data, &first_axis(data.dim()), f64::NEG_INFINITY, false).is_err() {
        return Err(usage(format!("{} was built over a different dataset", path.display())));
    }
    Ok(backend)
}

fn first_axis(d: usize) -> ScoringVector {
    let mut w = vec![0.0; d];
    w[0] = 1.0;
    ScoringVector::new(w).expect("unit axis")
}

fn index_bytes(kind: BackendKind, data: &Dataset, seed: u64, decay: usize) -> Result<Option<(Stored, usize)>> {
    let stored = match kind {
        BackendKind::Exhaustive => return Ok(None),
        BackendKind::KdTree => Stored::KdTree(KdTree::build(data)),
        BackendKind::Hier => Stored::Hier(HierIndex::build(
            data,
            HierConfig {
                decay,
                seed,
                ..HierConfig::default()
            },
        )?),
    };
    let size = encode(&stored).len();
    Ok(Some((stored, size)))
}

fn stripe_for(data: &Dataset, f: &ScoringVector, width: StripeWidth, rng: &mut impl Rng) -> Result<StripeRange> {
    let n = data.len();
    Ok(match width {
        StripeWidth::Points(w) => {
            let half = (w - 1) / 2;
            let c = rng.gen_range(1..=n);
            let top = c.saturating_sub(half).max(1);
            let bottom = (c + half).min(n);
            let upper = select_rank_exhaustive(data, f, top)?.score;
            let lower = select_rank_exhaustive(data, f, bottom)?.score;
            StripeRange::new(f.clone(), lower, upper)?
        }
        StripeWidth::Score(w) => {
            let a = f.score_coords(data.coords(rng.gen_range(0..n as u32)));
            StripeRange::new(f.clone(), a, a + w)?
        }
    })
}

fn rank_for(rule: &RankRule, j: usize, n: usize, rng: &mut impl Rng) -> Result<usize> {
    let i = match rule {
        RankRule::Fixed(k) => *k,
        RankRule::Random => rng.gen_range(1..=n),
        RankRule::Sweep(ks) => ks[j % ks.len()],
    };
    if i > n {
        return Err(usage(format!("rank {i} exceeds dataset size {n}")));
    }
    Ok(i)
}

/// Runs `spec` on an already loaded dataset.
pub fn run_on(spec: &WorkloadSpec, data: &Dataset) -> Result<WorkloadReport> {
    spec.validate()?;
    let n = data.len();
    let d = data.dim();
    let mut summary = Summary::new(spec, n, d);

    let build_start = Instant::now();
    let needs_sample = matches!(spec.kind, QueryKind::Conformal | QueryKind::Exact);
    let engine = if spec.kind == QueryKind::KthLevel2D {
        let levels = build_levels_2d(data)?;
        summary.index_bytes = encode(&Stored::Levels2D(levels.clone())).len();
        summary.backend = "kthlevel2d".into();
        Engine::Levels(levels)
    } else if let Some(path) = &spec.index {
        Engine::Stripe(load_backend(path, data, spec.backend)?)
    } else {
        match index_bytes(spec.backend, data, spec.index_seed, spec.decay)? {
            Some((stored, bytes)) => {
                summary.index_bytes = bytes;
                Engine::Stripe(match stored {
                    Stored::KdTree(t) => Box::new(t),
                    Stored::Hier(h) => Box::new(h),
                    _ => unreachable!("index_bytes only builds stripe backends"),
                })
            }
            None => Engine::Stripe(build_backend(data, BackendKind::Exhaustive, spec.decay, spec.index_seed)?),
        }
    };
    let sample = if needs_sample {
        let s = match &spec.sample {
            Some(path) => match load(path)? {
                Stored::Sample(s) if s.source_n == n => s,
                Stored::Sample(_) => return Err(crate::error::data("sample was drawn from a dataset of another size")),
                other => return Err(usage(format!("{} holds a {:?}, not a sample", path.display(), other.kind()))),
            },
            None => {
                let epsilon = match (spec.epsilon, spec.kappa) {
                    (Some(e), _) => e,
                    (None, Some(kappa)) => {
                        let sizing = spec.sizing();
                        let choice = choose_epsilon(n, kappa.min(n), |e| sizing.size(n, d, e, spec.phi))?;
                        summary.best_effort_epsilon = Some(choice.best_effort);
                        choice.epsilon
                    }
                    (None, None) => DEFAULT_EPSILON,
                };
                build_eps_sample_with(data, epsilon, spec.phi, spec.sample_seed, spec.sizing())?
            }
        };
        summary.epsilon = Some(s.epsilon);
        summary.sample_size = Some(s.len());
        Some(s)
    } else {
        None
    };
    summary.build_ms = build_start.elapsed().as_secs_f64() * 1e3;

    let dirs = gen_directions(spec.queries, d, spec.query_seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.query_seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let mut rows = Vec::with_capacity(spec.queries);
    for (j, f) in dirs.iter().enumerate() {
        let row = match (&engine, spec.kind) {
            (Engine::Stripe(backend), QueryKind::Srs) => {
                let stripe = stripe_for(data, f, spec.width, &mut rng)?;
                run_stripe(spec, data, backend.as_ref(), &stripe, j)?
            }
            (Engine::Stripe(backend), QueryKind::Conformal) => {
                let i = rank_for(&spec.rank, j, n, &mut rng)?;
                run_conformal(spec, data, sample.as_ref().unwrap(), backend.as_ref(), f, i, j)?
            }
            (Engine::Stripe(backend), QueryKind::Exact) => {
                let i = rank_for(&spec.rank, j, n, &mut rng)?;
                run_exact(spec, data, sample.as_ref().unwrap(), backend.as_ref(), f, i, j, &mut summary)?
            }
            (Engine::Levels(levels), _) => {
                let i = rank_for(&spec.rank, j, n, &mut rng)?;
                run_levels(spec, data, levels, f, i, j)?
            }
            (Engine::Stripe(_), QueryKind::KthLevel2D) => unreachable!("level queries build levels"),
        };
        rows.push(row);
    }
    summary.absorb(&rows);
    Ok(WorkloadReport { rows, summary })
}

pub fn run_workload(spec: &WorkloadSpec) -> Result<WorkloadReport> {
    let data = spec.source.load()?;
    run_on(spec, &data)
}

fn row(spec: &WorkloadSpec, j: usize, backend: &str, params: String) -> ReportRow {
    ReportRow {
        query: j,
        wall_ns: 0,
        points_examined: 0,
        nodes_visited: 0,
        result_size: 0,
        recall: None,
        guaranteed: None,
        backend: backend.to_string(),
        params: format!("kind={};{params}", spec.kind.name()),
    }
}

fn run_stripe(
    spec: &WorkloadSpec,
    data: &Dataset,
    backend: &dyn SrrBackend,
    stripe: &StripeRange,
    j: usize,
) -> Result<ReportRow> {
    let t = Instant::now();
    let hits = backend.query_stripe(data, stripe)?;
    let wall = t.elapsed();
    let mut r = row(spec, j, backend.name(), format!("lower={};upper={}", stripe.lower, stripe.upper));
    r.wall_ns = wall.as_nanos() as u64;
    r.points_examined = hits.stats.points_examined;
    r.nodes_visited = hits.stats.nodes_visited;
    r.result_size = hits.ids.len();
    if spec.verify {
        r.recall = Some((hits.ids == exhaustive_query_stripe(data, stripe)?) as u8 as f64);
    }
    Ok(r)
}

fn run_conformal(
    spec: &WorkloadSpec,
    data: &Dataset,
    sample: &EpsSample,
    backend: &dyn SrrBackend,
    f: &ScoringVector,
    i: usize,
    j: usize,
) -> Result<ReportRow> {
    let t = Instant::now();
    let set = conformal_query(data, sample, backend, f, i)?;
    let wall = t.elapsed();
    let mut r = row(spec, j, backend.name(), format!("i={i}"));
    r.wall_ns = wall.as_nanos() as u64;
    r.points_examined = set.stats.points_examined;
    r.nodes_visited = set.stats.nodes_visited;
    r.result_size = set.len();
    r.guaranteed = Some(set.guaranteed);
    if spec.verify {
        let target = select_rank_exhaustive(data, f, i)?.id;
        r.recall = Some(set.ids.binary_search(&target).is_ok() as u8 as f64);
    }
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn run_exact(
    spec: &WorkloadSpec,
    data: &Dataset,
    sample: &EpsSample,
    backend: &dyn SrrBackend,
    f: &ScoringVector,
    i: usize,
    j: usize,
    summary: &mut Summary,
) -> Result<ReportRow> {
    let t = Instant::now();
    let out = exact_query_traced(data, sample, backend, f, i)?;
    let wall = t.elapsed();
    let mut r = row(spec, j, backend.name(), format!("i={i};attempts={}", out.attempts));
    r.wall_ns = wall.as_nanos() as u64;
    r.points_examined = out.stats.points_examined;
    r.nodes_visited = out.stats.nodes_visited;
    r.result_size = out.candidates;
    summary.fallbacks += out.fell_back as usize;
    if spec.verify {
        let want = select_rank_exhaustive(data, f, i)?;
        r.recall = Some((want.id == out.answer.id) as u8 as f64);
    }
    Ok(r)
}

fn run_levels(
    spec: &WorkloadSpec,
    data: &Dataset,
    levels: &LevelStructure2D,
    f: &ScoringVector,
    i: usize,
    j: usize,
) -> Result<ReportRow> {
    let t = Instant::now();
    let answer = levels.query(f, i)?;
    let wall = t.elapsed();
    let mut r = row(spec, j, "kthlevel2d", format!("i={i}"));
    r.wall_ns = wall.as_nanos() as u64;
    r.result_size = 1;
    if spec.verify {
        let want = select_rank_exhaustive(data, f, i)?;
        r.recall = Some((want.id == answer.id) as u8 as f64);
    }
    Ok(r)
}

/// Axis varied by [`run_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Dim,
    Size,
    Width,
    Epsilon,
    Rank,
}

impl std::str::FromStr for SweepAxis {
    type Err = crate::BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dim" => SweepAxis::Dim,
            "size" => SweepAxis::Size,
            "width" => SweepAxis::Width,
            "epsilon" => SweepAxis::Epsilon,
            "i" => SweepAxis::Rank,
            other => {
                return Err(usage(format!(
                    "unknown sweep axis {other:?} (expected dim, size, width, epsilon or i)"
                )))
            }
        })
    }
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Dim => "dim",
            SweepAxis::Size => "size",
            SweepAxis::Width => "width",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::Rank => "i",
        }
    }

    /// `base` with this axis set to `value`.
    pub fn apply(self, base: &WorkloadSpec, value: f64) -> Result<WorkloadSpec> {
        let mut spec = base.clone();
        let count = || {
            if value >= 1.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(usage(format!("sweep value {value} must be a positive integer")))
            }
        };
        match self {
            SweepAxis::Dim | SweepAxis::Size => match &mut spec.source {
                DataSource::Generated { n, d, .. } => {
                    *(if self == SweepAxis::Dim { d } else { n }) = count()?;
                }
                _ => return Err(usage("dim and size sweeps need a generated dataset")),
            },
            SweepAxis::Width => spec.width = StripeWidth::Points(count()?),
            SweepAxis::Epsilon => spec.epsilon = Some(value),
            SweepAxis::Rank => spec.rank = RankRule::Fixed(count()?),
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// One summary per sweep value. The dataset is loaded once unless the axis
/// changes it.
pub fn run_sweep(base: &WorkloadSpec, axis: SweepAxis, values: &[f64]) -> Result<Vec<(f64, Summary)>> {
    if values.is_empty() {
        return Err(usage("sweep needs at least one value"));
    }
    let shared = match axis {
        SweepAxis::Dim | SweepAxis::Size => None,
        _ => Some(base.source.load()?),
    };
    values
        .iter()
        .map(|&v| {
            let spec = axis.apply(base, v)?;
            let report = match &shared {
                Some(data) => run_on(&spec, data)?,
                None => run_workload(&spec)?,
            };
            Ok((v, report.summary))
        })
        .collect()
}
