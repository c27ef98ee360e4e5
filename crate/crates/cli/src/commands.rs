//! Subcommand drivers. Trials run in parallel, each on its own random
//! streams derived from `(seed, trial)`, and records come back in trial
//! order, so output is independent of scheduling.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::time::Instant;

use idc_release::graph::{gnp, max_gap_cut, random_cuts};
use idc_release::idc::{FriezeKannan, Idc, MedianMechanism, MultiplicativeWeights};
use idc_release::io::{read_graph, read_queries, write_graph, write_queries, write_weighted};
use idc_release::noise::{NoiseSource, PrivacyParams};
use idc_release::offline::{ic_release, Distinguisher, ExpMechDistinguisher, IcConfig, PrivacyReport, SvdRank1Distinguisher};
use idc_release::online::{solve_alpha, Mechanism, OnlineConfig};
use idc_release::synth::{
    project_to_synthetic, randomized_response, round_to_unweighted, rr_privacy, BruteForceOracle, SeparationOracle,
    SpectralOracle,
};
use idc_release::{compile_cut_query, CutQuery, DataHistogram, LinearQuery, QueryTag, Universe};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::args::{
    BenchArgs, DistinguisherKind, GenGraphArgs, GenQueriesArgs, GraphSource, IdcKind, Mechanism as MechanismKind,
    OfflineArgs, OnlineArgs, OracleKind, RrArgs, StreamMode,
};
use crate::measure::{bruteforce_max_error, fk_shape, gnm, mw_shape, rr_bound, sampled_max_error};
use crate::record::{sink, write_records, ResultRecord};
use crate::{CliError, RunStatus};

const GRAPH: u64 = 0;
const QUERIES: u64 = 1;
const NOISE: u64 = 2;
const MEASURE: u64 = 3;
const ROUNDING: u64 = 4;
const STREAMS_PER_TRIAL: u64 = 8;

/// The random streams of one trial.
#[derive(Debug, Clone, Copy)]
struct Streams {
    seed: u64,
    id: u64,
}

impl Streams {
    fn new(seed: u64, id: usize) -> Self {
        Self { seed, id: id as u64 }
    }

    fn stream(&self, purpose: u64) -> u64 {
        self.id * STREAMS_PER_TRIAL + purpose
    }

    fn rng(&self, purpose: u64) -> ChaCha20Rng {
        let mut r = ChaCha20Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream(purpose));
        r
    }

    fn noise(&self, zero: bool) -> NoiseSource {
        if zero {
            NoiseSource::zero_noise(self.seed)
        } else {
            NoiseSource::with_stream(self.seed, self.stream(NOISE))
        }
    }
}

enum Source {
    Fixed(DataHistogram),
    Gnp(usize, f64),
    Gnm(usize, usize),
}

impl Source {
    fn from_args(g: &GraphSource) -> Result<Self, CliError> {
        match (&g.graph, g.gen_v, g.gen_p) {
            (Some(path), _, _) => Ok(Source::Fixed(read_graph(open(path)?)?)),
            (None, Some(v), Some(p)) => Ok(Source::Gnp(v, p)),
            _ => Err(CliError::Config("give either --graph FILE or --gen-v V --gen-p P".into())),
        }
    }

    fn vertex_count(&self) -> Result<usize, CliError> {
        Ok(match self {
            Source::Fixed(g) => g.universe().require_graph()?,
            Source::Gnp(v, _) | Source::Gnm(v, _) => *v,
        })
    }

    fn sample(&self, s: &Streams) -> Result<DataHistogram, CliError> {
        Ok(match self {
            Source::Fixed(g) => g.clone(),
            Source::Gnp(v, p) => gnp(*v, *p, &mut s.rng(GRAPH))?,
            Source::Gnm(v, m) => gnm(*v, *m, &mut s.rng(GRAPH))?,
        })
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))
}

fn privacy(eps: f64, delta: f64) -> Result<PrivacyParams, CliError> {
    Ok(PrivacyParams::new(eps, delta)?)
}

fn cut_queries(v: usize, k: usize, s: &Streams) -> Result<Vec<LinearQuery>, CliError> {
    let u = Universe::graph(v)?;
    random_cuts(v, k, &mut s.rng(QUERIES))
        .iter()
        .map(|c| compile_cut_query(&c.s, &c.t, &u).map_err(CliError::from))
        .collect()
}

fn run_trials<F>(ids: usize, f: F) -> Result<Vec<ResultRecord>, CliError>
where
    F: Fn(usize) -> Result<Vec<ResultRecord>, CliError> + Sync + Send,
{
    let per_trial: Vec<Vec<ResultRecord>> = (0..ids).into_par_iter().map(f).collect::<Result<_, _>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

fn elapsed_ms(start: Instant, no_timing: bool) -> Option<f64> {
    (!no_timing).then(|| start.elapsed().as_secs_f64() * 1e3)
}

fn describe_graph(rec: &mut ResultRecord, db: &DataHistogram) {
    rec.vertices = db.universe().vertex_count().unwrap_or(0);
    rec.universe_size = db.universe().size();
    rec.n = db.n();
    rec.n2 = db.n2();
}

fn set_privacy(rec: &mut ResultRecord, report: &PrivacyReport) {
    match report {
        PrivacyReport::Certified { epsilon, delta } => {
            rec.privacy_status = "certified".into();
            rec.privacy_eps = Some(*epsilon);
            rec.privacy_delta = Some(*delta);
        }
        PrivacyReport::Refused { .. } => rec.privacy_status = "refused".into(),
    }
}

fn error_stats(errors: &[f64]) -> (Option<f64>, Option<f64>) {
    if errors.is_empty() {
        return (None, None);
    }
    (Some(errors.iter().copied().fold(0.0, f64::max)), Some(errors.iter().sum::<f64>() / errors.len() as f64))
}

// ---------------------------------------------------------------- generators

pub fn gen_graph(a: &GenGraphArgs) -> Result<RunStatus, CliError> {
    if a.v < 2 {
        return Err(CliError::Config(format!("--v must be at least 2, got {}", a.v)));
    }
    let g = gnp(a.v, a.p, &mut ChaCha20Rng::seed_from_u64(a.seed))?;
    let mut w = sink(a.out.as_deref())?;
    write_graph(&g, &mut w)?;
    w.flush()?;
    Ok(RunStatus::default())
}

/// Max-gap cuts against a Frieze-Kannan hypothesis that is updated with the
/// exact answer whenever the gap reaches `alpha`. Reads the graph exactly:
/// test use only.
pub fn adversarial_stream(g: &DataHistogram, k: usize, alpha: f64) -> Result<Vec<CutQuery>, CliError> {
    let u = *g.universe();
    let fk = FriezeKannan::new(u, g.n2().max(1.0))?;
    let mut h = fk.init();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let (cut, gap) = max_gap_cut(&u, g.weights(), &h.weights)?;
        // the public-scale gap is twice the canonical one
        if gap / 2.0 >= alpha {
            let q = compile_cut_query(&cut.s, &cut.t, &u)?;
            h = fk.update(&h, &q, q.canonical(g.weights())?, alpha)?;
        }
        out.push(cut);
    }
    Ok(out)
}

pub fn gen_queries(a: &GenQueriesArgs) -> Result<RunStatus, CliError> {
    if a.k == 0 {
        return Err(CliError::Config("--k must be at least 1".into()));
    }
    let cuts = match a.mode {
        StreamMode::Uniform => random_cuts(a.v, a.k, &mut ChaCha20Rng::seed_from_u64(a.seed)),
        StreamMode::Adversarial => {
            if !cfg!(feature = "test-hooks") {
                return Err(CliError::Config(
                    "adversarial streams read the graph exactly and are only available with the test-hooks feature"
                        .into(),
                ));
            }
            let path = a.graph.as_deref().ok_or_else(|| CliError::Config("adversarial mode needs --graph".into()))?;
            let g = read_graph(open(path)?)?;
            if g.universe().vertex_count() != Some(a.v) {
                return Err(CliError::Config(format!("--v {} does not match the graph", a.v)));
            }
            adversarial_stream(&g, a.k, a.alpha)?
        }
    };
    let tags: Vec<QueryTag> = cuts.into_iter().map(QueryTag::Cut).collect();
    let mut w = sink(a.out.as_deref())?;
    write_queries(&tags, &mut w)?;
    w.flush()?;
    Ok(RunStatus::default())
}

// ------------------------------------------------------------------- online

struct OnlineRun<'a> {
    cfg: OnlineConfig,
    auto_alpha: bool,
    queries: &'a [LinearQuery],
    no_timing: bool,
}

fn online_trial<I: Idc>(
    db: &DataHistogram,
    idc: I,
    run: &OnlineRun,
    noise: NoiseSource,
    rec: &mut ResultRecord,
) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = if run.auto_alpha { run.cfg.auto_alpha(&idc)? } else { run.cfg };
    // accuracy fixed point with the mechanism's own constant sigma_c * T_c
    rec.bound_alpha = solve_alpha(&idc, cfg.privacy, cfg.k, cfg.beta, cfg.sigma_constant * cfg.t_constant).ok();
    rec.idc = Some(idc.name().into());
    let mut m = Mechanism::new(db.clone(), idc, cfg, noise)?;
    let mut errors = Vec::new();
    let mut exhausted = false;
    for q in run.queries {
        match m.answer_query(q) {
            Ok(r) => {
                if let Some(answer) = r.answer {
                    // published answers are on the public scale
                    errors.push((answer - q.evaluate(db.weights())?).abs() / q.rescale());
                }
            }
            Err(idc_release::Error::BudgetExhausted { .. }) => exhausted = true,
            Err(e) => return Err(e.into()),
        }
    }
    describe_graph(rec, db);
    let (max, mean) = error_stats(&errors);
    rec.eps = cfg.privacy.epsilon;
    rec.delta = cfg.privacy.delta;
    rec.alpha = Some(cfg.alpha);
    rec.beta = Some(cfg.beta);
    rec.k = cfg.k;
    rec.queries_answered = Some(errors.len());
    rec.max_error = max;
    rec.mean_error = mean;
    rec.updates = Some(m.updates());
    rec.budget = Some(m.budget());
    rec.exhausted = Some(exhausted);
    rec.sigma = Some(m.sigma());
    rec.threshold = Some(m.threshold());
    let p = m.privacy_report();
    set_privacy(rec, &PrivacyReport::Certified { epsilon: p.epsilon, delta: p.delta });
    rec.bound_mw_shape = Some(mw_shape(rec.n, cfg.k, rec.universe_size, cfg.privacy.epsilon));
    rec.bound_fk_shape = Some(fk_shape(rec.n2, cfg.k, rec.universe_size, cfg.privacy.epsilon));
    rec.runtime_ms = elapsed_ms(start, run.no_timing);
    Ok(())
}

fn online_with(
    kind: IdcKind,
    db: &DataHistogram,
    run: &OnlineRun,
    mm_cap: u64,
    noise: NoiseSource,
    rec: &mut ResultRecord,
) -> Result<(), CliError> {
    let u = *db.universe();
    match kind {
        IdcKind::Fk => online_trial(db, FriezeKannan::new(u, db.n2())?, run, noise, rec),
        IdcKind::Mw => online_trial(db, MultiplicativeWeights::new(u, db.n())?, run, noise, rec),
        IdcKind::Mm => {
            if run.auto_alpha {
                return Err(CliError::Config("--alpha-auto is not supported with --idc mm".into()));
            }
            let mm = MedianMechanism::new(u, db.n(), run.cfg.k, run.cfg.alpha, mm_cap)?;
            online_trial(db, mm, run, noise, rec)
        }
    }
}

pub fn release_online(a: &OnlineArgs) -> Result<RunStatus, CliError> {
    let privacy = privacy(a.eps, a.delta)?;
    let source = Source::from_args(&a.graph)?;
    let v = source.vertex_count()?;
    let fixed = match &a.queries {
        Some(path) => Some(read_queries(open(path)?, &Universe::graph(v)?)?),
        None => None,
    };
    let records = run_trials(a.run.trials, |trial| {
        let s = Streams::new(a.run.seed, trial);
        let db = source.sample(&s)?;
        let queries = match &fixed {
            Some(q) => q.clone(),
            None => cut_queries(v, a.k, &s)?,
        };
        let cfg = OnlineConfig::new(privacy, a.alpha.unwrap_or(1.0), a.beta, queries.len())
            .with_constants(a.sigma_const, a.t_const)
            .with_strict(a.strict);
        let run = OnlineRun { cfg, auto_alpha: a.alpha_auto, queries: &queries, no_timing: a.output.no_timing };
        let mut rec = ResultRecord::new("release-online", "online", trial, a.run.seed);
        online_with(a.idc, &db, &run, a.mm_cap, s.noise(a.run.zero_noise), &mut rec)?;
        Ok(vec![rec])
    })?;
    write_records(&records, a, a.output.out.as_deref(), a.output.format)?;
    Ok(RunStatus { exhausted: records.iter().any(|r| r.exhausted == Some(true)) })
}

// ------------------------------------------------------------------ offline

struct OfflineRun<'a> {
    cfg: IcConfig,
    distinguisher: &'a dyn Distinguisher,
    /// Queries whose errors fill the max/mean columns.
    class: &'a [LinearQuery],
    sample_cuts: usize,
    no_timing: bool,
}

fn offline_trial<I: Idc>(
    db: &DataHistogram,
    idc: &I,
    run: &OfflineRun,
    s: &Streams,
    noise: &mut NoiseSource,
    rec: &mut ResultRecord,
) -> Result<(), CliError> {
    let start = Instant::now();
    let out = ic_release(db, idc, run.distinguisher, run.cfg, noise)?;
    let h = idc.dense(&out.hypothesis).ok_or_else(|| CliError::Config(format!("{} has no vector form", idc.name())))?;
    let u = *db.universe();
    let errors: Vec<f64> = run
        .class
        .iter()
        .map(|q| Ok((q.canonical(db.weights())? - q.canonical(&h)?).abs()))
        .collect::<Result<_, CliError>>()?;
    describe_graph(rec, db);
    let (max, mean) = error_stats(&errors);
    rec.idc = Some(idc.name().into());
    rec.eps = run.cfg.privacy.epsilon;
    rec.delta = run.cfg.privacy.delta;
    rec.alpha = Some(run.cfg.alpha);
    rec.beta = run.cfg.certify_beta;
    rec.k = run.class.len();
    rec.max_error = max;
    rec.mean_error = mean;
    rec.sampled_max_error = Some(sampled_max_error(&u, db.weights(), &h, run.sample_cuts, &mut s.rng(MEASURE))?);
    rec.bruteforce_max_error = bruteforce_max_error(&u, db.weights(), &h)?;
    rec.updates = Some(out.trace.len() as u64);
    rec.budget = Some(out.budget);
    rec.early_exit = Some(out.early_exit);
    set_privacy(rec, &out.privacy);
    rec.runtime_ms = elapsed_ms(start, run.no_timing);
    Ok(())
}

fn offline_with(
    kind: IdcKind,
    db: &DataHistogram,
    run: &OfflineRun,
    s: &Streams,
    noise: &mut NoiseSource,
    rec: &mut ResultRecord,
) -> Result<(), CliError> {
    let u = *db.universe();
    match kind {
        IdcKind::Fk => offline_trial(db, &FriezeKannan::new(u, db.n2())?, run, s, noise, rec),
        IdcKind::Mw => offline_trial(db, &MultiplicativeWeights::new(u, db.n())?, run, s, noise, rec),
        IdcKind::Mm => Err(CliError::Config(
            "the median mechanism keeps a candidate set, not a vector, so the offline construction cannot use it".into(),
        )),
    }
}

pub fn release_offline(a: &OfflineArgs) -> Result<RunStatus, CliError> {
    let privacy = privacy(a.eps, a.delta)?;
    let source = Source::from_args(&a.graph)?;
    let v = source.vertex_count()?;
    let records = run_trials(a.run.trials, |trial| {
        let s = Streams::new(a.run.seed, trial);
        let db = source.sample(&s)?;
        let class = cut_queries(v, a.k, &s)?;
        let expmech;
        let svd;
        let (distinguisher, measured): (&dyn Distinguisher, &[LinearQuery]) = match a.distinguisher {
            DistinguisherKind::Expmech => {
                expmech = ExpMechDistinguisher::new(class.clone(), a.gamma)?;
                (&expmech, &class)
            }
            DistinguisherKind::Svd => {
                svd = SvdRank1Distinguisher::new(*db.universe())?;
                (&svd, &[])
            }
        };
        let mut cfg = IcConfig::new(privacy, a.alpha);
        if let Some(beta) = a.beta {
            cfg = cfg.with_certification(beta);
        }
        let run = OfflineRun { cfg, distinguisher, class: measured, sample_cuts: a.sample_cuts, no_timing: a.output.no_timing };
        let mut rec = ResultRecord::new("release-offline", "ic", trial, a.run.seed);
        offline_with(a.idc, &db, &run, &s, &mut s.noise(a.run.zero_noise), &mut rec)?;
        Ok(vec![rec])
    })?;
    write_records(&records, a, a.output.out.as_deref(), a.output.format)?;
    Ok(RunStatus::default())
}

// ----------------------------------------------------------------------- rr

pub fn rr_synth(a: &RrArgs) -> Result<RunStatus, CliError> {
    let source = Source::from_args(&a.graph)?;
    let guarantee = rr_privacy(a.eps)?;
    let records = run_trials(a.run.trials, |trial| {
        let start = Instant::now();
        let s = Streams::new(a.run.seed, trial);
        let db = source.sample(&s)?;
        let u = *db.universe();
        let z = randomized_response(&db, a.eps, &mut s.noise(a.run.zero_noise))?;
        let clipped = z.clipped();
        let oracle: Option<Box<dyn SeparationOracle>> = match a.oracle {
            OracleKind::Spectral => Some(Box::new(SpectralOracle::new(false))),
            OracleKind::SpectralNormalized => Some(Box::new(SpectralOracle::new(true))),
            OracleKind::Bruteforce => Some(Box::new(BruteForceOracle::default())),
            OracleKind::None => None,
        };
        let projected = match &oracle {
            Some(o) => Some(project_to_synthetic(&z, o.as_ref(), a.project_budget)?.graph),
            None => None,
        };
        let weighted = projected.clone().unwrap_or_else(|| clipped.clone());
        let rounded = a
            .round
            .then(|| round_to_unweighted(&weighted, &mut NoiseSource::with_stream(a.run.seed, s.stream(ROUNDING))));
        let released: &[f64] = rounded.as_ref().map_or(weighted.weights(), |g| g.weights());

        let mut rec = ResultRecord::new("rr-synth", "rr", trial, a.run.seed);
        describe_graph(&mut rec, &db);
        rec.eps = guarantee.epsilon;
        rec.delta = guarantee.delta;
        rec.beta = Some(a.beta);
        rec.k = a.sample_cuts;
        rec.sampled_max_error = Some(sampled_max_error(&u, db.weights(), released, a.sample_cuts, &mut s.rng(MEASURE))?);
        rec.max_error = rec.sampled_max_error;
        rec.bruteforce_max_error = bruteforce_max_error(&u, db.weights(), released)?;
        rec.residual_clip = bruteforce_max_error(&u, db.weights(), clipped.weights())?;
        if let Some(p) = &projected {
            rec.residual_projected = bruteforce_max_error(&u, db.weights(), p.weights())?;
        }
        if let Some(g) = &rounded {
            rec.residual_rounded = bruteforce_max_error(&u, db.weights(), g.weights())?;
        }
        rec.bound_rr = Some(rr_bound(u.size(), a.sample_cuts, a.beta, a.eps));
        set_privacy(&mut rec, &PrivacyReport::Certified { epsilon: guarantee.epsilon, delta: guarantee.delta });
        rec.runtime_ms = elapsed_ms(start, a.output.no_timing);

        if trial == 0 {
            if let Some(path) = &a.write_graph {
                let mut w = sink(Some(path))?;
                match &rounded {
                    Some(g) => write_graph(g, &mut w)?,
                    None => write_weighted(weighted.vertex_count(), weighted.weights(), &mut w)?,
                }
                w.flush()?;
            }
        }
        Ok(vec![rec])
    })?;
    write_records(&records, a, a.output.out.as_deref(), a.output.format)?;
    Ok(RunStatus::default())
}

// -------------------------------------------------------------------- bench

#[derive(Debug, Clone, Copy)]
enum Density {
    P(f64),
    Edges(usize),
}

pub fn bench(a: &BenchArgs) -> Result<RunStatus, CliError> {
    let densities: Vec<Density> = match &a.edges {
        Some(m) => m.iter().map(|&m| Density::Edges(m)).collect(),
        None => a.ps.iter().map(|&p| Density::P(p)).collect(),
    };
    let mut cells = Vec::new();
    for &v in &a.vs {
        for &d in &densities {
            for &eps in &a.epss {
                cells.push((v, d, eps));
            }
        }
    }
    for &(_, _, eps) in &cells {
        privacy(eps, a.delta)?;
    }
    let trials = a.run.trials;
    let records = run_trials(cells.len() * trials, |id| {
        let (v, d, eps) = cells[id / trials];
        let trial = id % trials;
        let s = Streams::new(a.run.seed, id);
        let source = match d {
            Density::P(p) => Source::Gnp(v, p),
            Density::Edges(m) => Source::Gnm(v, m),
        };
        let db = source.sample(&s)?;
        let u = *db.universe();
        let privacy = privacy(eps, a.delta)?;
        let queries = cut_queries(v, a.k, &s)?;
        let cfg = OnlineConfig::new(privacy, 1.0, a.beta, a.k).with_constants(a.sigma_const, a.t_const);
        let run = OnlineRun { cfg, auto_alpha: true, queries: &queries, no_timing: a.output.no_timing };
        let mut out = Vec::new();
        for mech in &a.mechanism {
            match mech {
                MechanismKind::Online => {
                    for &kind in &a.idc {
                        let mut rec = ResultRecord::new("bench", "online", trial, a.run.seed);
                        online_with(kind, &db, &run, idc_release::idc::DEFAULT_CANDIDATE_CAP, s.noise(false), &mut rec)?;
                        out.push(rec);
                    }
                }
                MechanismKind::Ic => {
                    let dist = ExpMechDistinguisher::new(queries.clone(), 1e-3)?;
                    for &kind in &a.idc {
                        // run at the accuracy the online mechanism would target
                        let alpha = match kind {
                            IdcKind::Fk => cfg.auto_alpha(&FriezeKannan::new(u, db.n2())?)?.alpha,
                            IdcKind::Mw => cfg.auto_alpha(&MultiplicativeWeights::new(u, db.n())?)?.alpha,
                            IdcKind::Mm => cfg.alpha,
                        };
                        let run = OfflineRun {
                            cfg: IcConfig::new(privacy, alpha),
                            distinguisher: &dist,
                            class: &queries,
                            sample_cuts: a.sample_cuts,
                            no_timing: a.output.no_timing,
                        };
                        let mut rec = ResultRecord::new("bench", "ic", trial, a.run.seed);
                        offline_with(kind, &db, &run, &s, &mut s.noise(false), &mut rec)?;
                        rec.bound_mw_shape = Some(mw_shape(rec.n, a.k, u.size(), eps));
                        rec.bound_fk_shape = Some(fk_shape(rec.n2, a.k, u.size(), eps));
                        out.push(rec);
                    }
                }
                MechanismKind::Rr => {
                    let start = Instant::now();
                    let z = randomized_response(&db, eps, &mut s.noise(false))?;
                    let clipped = z.clipped();
                    let guarantee = rr_privacy(eps)?;
                    let mut rec = ResultRecord::new("bench", "rr", trial, a.run.seed);
                    describe_graph(&mut rec, &db);
                    rec.eps = eps;
                    rec.delta = guarantee.delta;
                    rec.beta = Some(a.beta);
                    rec.k = a.sample_cuts;
                    rec.sampled_max_error =
                        Some(sampled_max_error(&u, db.weights(), clipped.weights(), a.sample_cuts, &mut s.rng(MEASURE))?);
                    rec.max_error = rec.sampled_max_error;
                    rec.bruteforce_max_error = bruteforce_max_error(&u, db.weights(), clipped.weights())?;
                    rec.residual_clip = rec.bruteforce_max_error;
                    rec.bound_rr = Some(rr_bound(u.size(), a.sample_cuts, a.beta, eps));
                    set_privacy(&mut rec, &PrivacyReport::Certified { epsilon: guarantee.epsilon, delta: guarantee.delta });
                    rec.runtime_ms = elapsed_ms(start, a.output.no_timing);
                    out.push(rec);
                }
            }
        }
        Ok(out)
    })?;
    write_records(&records, a, a.output.out.as_deref(), a.output.format)?;
    Ok(RunStatus { exhausted: records.iter().any(|r| r.exhausted == Some(true)) })
}
