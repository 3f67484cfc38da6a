//! Experiment harness: configurations, dispatch to `cll-core`, result
//! records, atomic persistence and regression manifests.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cll_core::cohomology::{l_schur_cover, schur_multiplier_l, schur_multiplier_uct};
use cll_core::group::{catalog, CSet, FiniteGroup, GammaGroup};
use cll_core::hurwitz::CSetData;
use cll_core::models::{self, MomentEstimate, YConfig, ZConfig};
use cll_core::nilpotent::word::Images;
use cll_core::nilpotent::{pairing_image, relator_matrix, FreeNilGroup, Word};
use cll_core::{CllError, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// One experiment. The command fields are hashed; `threads` and `output`
/// only affect scheduling and persistence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Schur { group: String, ell: u64 },
    Cover { group: String, ell: u64 },
    LiftingInvariant { group: String, ell: u64, tuple: Vec<usize> },
    HurwitzB { group: String, cset: String, q: u64, n: u64 },
    HurwitzFixed { group: String, cset: String, q: u64, n: u64, min: u64 },
    RelatorMatrix { relator: String, gens: usize, ell: u64 },
    PairingImage { group: String, gens: Vec<usize>, relator: String, modulus: u64 },
    MomentY { n: usize, ell: u64, q: u64, class: u8, h: String, delta: Vec<u64>, samples: u64, seed: u64 },
    MomentZ { n: usize, ell: u64, class: u8, h: String, samples: u64, seed: u64 },
    OrbitCheck { n: usize, ell: u64, q: u64, h: String, delta: Vec<u64>, pairs: Option<usize>, seed: u64 },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Schur { .. } => "schur",
            Command::Cover { .. } => "cover",
            Command::LiftingInvariant { .. } => "lifting-invariant",
            Command::HurwitzB { .. } => "hurwitz-b",
            Command::HurwitzFixed { .. } => "hurwitz-fixed",
            Command::RelatorMatrix { .. } => "relator-matrix",
            Command::PairingImage { .. } => "pairing-image",
            Command::MomentY { .. } => "moment-y",
            Command::MomentZ { .. } => "moment-z",
            Command::OrbitCheck { .. } => "orbit-check",
        }
    }
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig { command, threads: None, output: None }
    }

    pub fn hash(&self) -> String {
        models::estimate::config_hash(&self.command)
    }
}

/// A reference value and the formula it comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub value: f64,
    pub source: String,
}

/// Outcome of one run. Estimates carry `mean`/`stderr`/`samples`/`seed`;
/// exact results carry `exact` and no `stderr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    pub config_hash: String,
    pub timestamp: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas_off: Option<f64>,
    #[serde(default)]
    pub details: Value,
}

impl ResultRecord {
    fn base(cfg: &ExperimentConfig) -> Self {
        ResultRecord {
            command: cfg.command.name().to_string(),
            config_hash: cfg.hash(),
            timestamp: 0,
            exact: None,
            mean: None,
            stderr: None,
            samples: None,
            seed: None,
            target: None,
            target_source: None,
            sigmas_off: None,
            details: Value::Null,
        }
    }

    fn exact(cfg: &ExperimentConfig, value: Value, details: Value) -> Self {
        ResultRecord { exact: Some(value), details, ..Self::base(cfg) }
    }

    fn estimate(cfg: &ExperimentConfig, e: &MomentEstimate, target: Target, details: Value) -> Self {
        ResultRecord {
            mean: Some(e.mean),
            stderr: Some(e.stderr),
            samples: Some(e.samples),
            seed: Some(e.seed),
            sigmas_off: Some(e.sigmas_off(target.value)),
            target: Some(target.value),
            target_source: Some(target.source),
            details,
            ..Self::base(cfg)
        }
    }

    /// The record without its timestamp, for determinism comparisons.
    pub fn payload(&self) -> String {
        let mut r = self.clone();
        r.timestamp = 0;
        serde_json::to_string(&r).expect("records serialize")
    }
}

pub fn parse_group(spec: &str) -> Result<Arc<FiniteGroup>> {
    Ok(Arc::new(catalog::parse_group(spec)?))
}

pub fn parse_gamma_group(spec: &str) -> Result<GammaGroup> {
    catalog::parse_gamma_group(spec)
}

fn json_of<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("values serialize")
}

/// `|[H,H]| · |H₂(H, ℤ)|` for an `ℓ`-group `H`.
pub fn z_target(h: &Arc<FiniteGroup>, ell: u64) -> Result<f64> {
    let comm = h.commutator_subgroup().len() as f64;
    Ok(comm * schur_multiplier_l(h, ell)?.order() as f64)
}

/// Runs one experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let threads = cfg.threads;
    let mut rec = match &cfg.command {
        Command::Schur { group, ell } => {
            let g = parse_group(group)?;
            let m = schur_multiplier_l(&g, *ell)?;
            let uct = schur_multiplier_uct(&g, *ell)?;
            ResultRecord::exact(cfg, json!(m.factors), json!({ "order": g.order(), "uct_factors": uct, "routes_agree": uct == m.factors }))
        }
        Command::Cover { group, ell } => {
            let g = parse_group(group)?;
            let c = l_schur_cover(&g, *ell)?;
            ResultRecord::exact(
                cfg,
                json!(c.total.order()),
                json!({ "base_order": g.order(), "kernel_factors": c.kernel_structure().factors, "total_hash": c.total.canonical_hash() }),
            )
        }
        Command::LiftingInvariant { group, ell, tuple } => {
            let g = parse_group(group)?;
            let c = l_schur_cover(&g, *ell)?;
            let inv = c.lifting_invariant(tuple)?;
            let coords = c.kernel_coords(inv).ok_or(CllError::NotInKernel)?.to_vec();
            ResultRecord::exact(cfg, json!(coords), json!({ "kernel_factors": c.kernel_structure().factors }))
        }
        Command::HurwitzB { group, cset, q, n } => {
            let g = parse_group(group)?;
            let c = CSet::parse(&g, cset)?;
            let d = CSetData::new(g.clone(), c)?;
            let b = d.b_count(*q, *n)?;
            let mut rec = ResultRecord::exact(cfg, json!(b), json!({ "classes": d.num_classes(), "kernel_order": d.kernel().len() }));
            if g.order() == 2 && d.num_classes() == 1 {
                rec.target = Some(if n % 2 == 0 { 1.0 } else { 0.0 });
                rec.target_source = Some("Γ = ℤ/2 with its involution: one component iff n is even".into());
            }
            rec
        }
        Command::HurwitzFixed { group, cset, q, n, min } => {
            let g = parse_group(group)?;
            let d = CSetData::new(g.clone(), CSet::parse(&g, cset)?)?;
            let fixed = d.count_frobenius_fixed(*q, *n, *min)?;
            ResultRecord::exact(cfg, json!(fixed), json!({ "b": d.b_count(*q, *n)? }))
        }
        Command::RelatorMatrix { relator, gens, ell } => {
            let w = Word::parse(relator)?;
            let m = (*gens).max(w.max_gen().map_or(0, |g| g + 1));
            let f = FreeNilGroup::new(m, 2, *ell)?;
            ResultRecord::exact(cfg, json!(relator_matrix(&f, &w.eval(&f)?)?), json!({ "gens": m, "ell": ell }))
        }
        Command::PairingImage { group, gens, relator, modulus } => {
            let g = parse_group(group)?;
            let w = Word::parse(relator)?;
            let lambda = w.eval(&Images { group: &g, images: gens })?;
            let p = pairing_image(&g, gens, lambda, *modulus)?;
            ResultRecord::exact(cfg, json!(p.values), json!({ "b": p.b, "orders": p.orders }))
        }
        Command::MomentY { n, ell, q, class, h, delta, samples, seed } => {
            let hg = parse_gamma_group(h)?;
            let idx = hg.fixed_index() as f64;
            let yc = YConfig { n: *n, ell: *ell, q: *q, class: *class, h: h.clone(), delta: delta.clone(), samples: *samples, seed: *seed };
            let rep = models::estimate_moment_y(&yc, hg, threads)?;
            let vanish = rep.delta_order_warning;
            let (yt, xt) = if vanish { (0.0, 0.0) } else { (1.0 / idx, 1.0) };
            let source = if vanish {
                "ord δ does not divide q − 1: every count vanishes".to_string()
            } else {
                format!("1/[H:H^Γ] = 1/{idx} for Y; 1 for X = Y ⋊ Γ")
            };
            let details = json!({
                "x": { "mean": rep.x.mean, "stderr": rep.x.stderr, "target": xt, "sigmas_off": rep.x.sigmas_off(xt) },
                "report": json_of(&rep),
            });
            if vanish {
                eprintln!("warning: δ has order {} which does not divide q - 1 = {}", rep.delta_order, q - 1);
            }
            ResultRecord::estimate(cfg, &rep.y, Target { value: yt, source }, details)
        }
        Command::MomentZ { n, ell, class, h, samples, seed } => {
            let g = parse_group(h)?;
            let zc = ZConfig { n: *n, ell: *ell, class: *class, h: h.clone(), samples: *samples, seed: *seed };
            let rep = models::estimate_moment_z(&zc, &g, threads)?;
            let target = z_target(&g, *ell)?;
            let mut details = json!({ "report": json_of(&rep) });
            if models::estimate::elementary_rank(&g, *ell) == Some(1) {
                details["finite_n_exact"] = json!(models::z_cyclic_exact(*ell, *n));
            }
            let source = "limit as n → ∞: |[H,H]| · |H₂(H, ℤ)|".to_string();
            ResultRecord::estimate(cfg, &rep.z, Target { value: target, source }, details)
        }
        Command::OrbitCheck { n, ell, q, h, delta, pairs, seed } => {
            let hg = parse_gamma_group(h)?;
            let rep = models::orbit_transitivity_check(*n, *ell, *q, hg, delta, *pairs, *seed)?;
            if !rep.all_connected() {
                eprintln!("warning: {} of {} pairs not connected", rep.pairs_checked - rep.connected, rep.pairs_checked);
            }
            ResultRecord::exact(cfg, json!(rep.all_connected()), json_of(&rep))
        }
    };
    rec.timestamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(rec)
}

/// Replaces `path` with `contents` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CllError::Io(e.to_string()))?;
    Ok(())
}

/// Appends `record` as one JSON line, atomically replacing the file.
pub fn append_record(path: &Path, record: &ResultRecord) -> Result<()> {
    let mut contents = match std::fs::read(path) {
        Ok(c) => c,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    if !contents.is_empty() && !contents.ends_with(b"\n") {
        contents.push(b'\n');
    }
    contents.extend(serde_json::to_vec(record)?);
    contents.push(b'\n');
    write_atomic(path, &contents)
}

/// CSV projection of records: the scalar columns only.
pub fn to_csv(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CllError::Io(e.to_string());
    w.write_record(["command", "config_hash", "timestamp", "exact", "mean", "stderr", "samples", "seed", "target", "sigmas_off"]).map_err(io)?;
    let opt = |x: Option<String>| x.unwrap_or_default();
    for r in records {
        w.write_record([
            r.command.clone(),
            r.config_hash.clone(),
            r.timestamp.to_string(),
            opt(r.exact.as_ref().map(|v| v.to_string())),
            opt(r.mean.map(|v| v.to_string())),
            opt(r.stderr.map(|v| v.to_string())),
            opt(r.samples.map(|v| v.to_string())),
            opt(r.seed.map(|v| v.to_string())),
            opt(r.target.map(|v| v.to_string())),
            opt(r.sigmas_off.map(|v| v.to_string())),
        ])
        .map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| CllError::Io(e.to_string()))?).map_err(|e| CllError::Io(e.to_string()))
}

fn default_sigmas() -> f64 {
    3.0
}

/// A stored configuration with either an exact expectation or a target
/// within `sigmas` standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default = "default_sigmas")]
    pub sigmas: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<ResultRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub passed: usize,
    pub failed: usize,
    pub entries: Vec<EntryOutcome>,
}

impl RegressionReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

fn check_entry(e: &ManifestEntry, threads: Option<usize>) -> EntryOutcome {
    let mut cfg = e.config.clone();
    cfg.threads = threads.or(cfg.threads);
    let rec = match run(&cfg) {
        Ok(r) => r,
        Err(err) => return EntryOutcome { name: e.name.clone(), pass: false, detail: format!("error: {err}"), record: None },
    };
    let (pass, detail) = match (&e.exact, e.target) {
        (Some(want), _) => match &rec.exact {
            Some(got) if got == want => (true, "exact match".to_string()),
            Some(got) => (false, format!("expected {want}, got {got}")),
            None => (false, "no exact value in record".to_string()),
        },
        (None, Some(t)) => match (rec.mean, rec.stderr) {
            (Some(m), Some(s)) => {
                let z = MomentEstimate { mean: m, stderr: s, samples: 0, seed: 0, config_hash: String::new() }.sigmas_off(t);
                (z.abs() <= e.sigmas, format!("mean {m} ± {s} vs {t}: {z:.2}σ"))
            }
            _ => (false, "no estimate in record".to_string()),
        },
        (None, None) => (false, "entry declares neither exact nor target".to_string()),
    };
    EntryOutcome { name: e.name.clone(), pass, detail, record: Some(rec) }
}

/// Reruns every entry; failures are report entries, never errors.
pub fn regression_suite(manifest: &Manifest, threads: Option<usize>) -> RegressionReport {
    let entries: Vec<EntryOutcome> = manifest.entries.iter().map(|e| check_entry(e, threads)).collect();
    let passed = entries.iter().filter(|e| e.pass).count();
    RegressionReport { passed, failed: entries.len() - passed, entries }
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    Ok(serde_json::from_slice(&std::fs::read(path)?)?)
}

/// Exit status for an error: 1 for malformed input, 2 for failed computations.
pub fn exit_code(e: &CllError) -> i32 {
    match e {
        CllError::UnknownSpec(_) | CllError::Parse(_) | CllError::BadIndex(_) => 1,
        _ => 2,
    }
}
