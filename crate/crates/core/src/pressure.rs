//! The strip-difference sweep: for each height `n`, the Perron eigenvalue of
//! the (block-recoded) strip transfer matrix, and the differences
//! `(log lambda_{n+1} - log lambda_n) / p`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gibbs::{applicability, ApplicabilityReport, P_C_RIGOROUS};
use crate::interaction::NnInteraction;
use crate::lattice::{ColumnBudget, ColumnSystem, CyclicColumnSystem, NnSft, PeriodicRow};
use crate::models::Model;
use crate::transfer::{
    cyclic_report, report_for, CyclicReport, CyclicTransfer, PerronData, PerronOptions, StripChain,
    StripReport, TransferMatrix, SUMMATION_MODE,
};

/// Safety factor applied to the last successive-difference gap.
pub const ERROR_BAR_FACTOR: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Pressure,
    TopologicalEntropy,
}

impl Quantity {
    pub fn label(self) -> &'static str {
        match self {
            Quantity::Pressure => "pressure",
            Quantity::TopologicalEntropy => "topological entropy",
        }
    }
}

/// How a strip with block length `p > 1` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StripMethod {
    /// Recode to horizontal `p`-blocks and build the block strip.
    #[default]
    Recoded,
    /// Keep `p` phases of ordinary columns and use the product of the
    /// phase transfer matrices. Same eigenvalue, far fewer states.
    Cyclic,
}

impl StripMethod {
    pub fn label(self) -> &'static str {
        match self {
            StripMethod::Recoded => "recoded",
            StripMethod::Cyclic => "cyclic",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: Model,
    pub top: PeriodicRow,
    pub bottom: PeriodicRow,
    /// Block length; defaults to `lcm(period(top), period(bottom))`.
    pub period: Option<usize>,
    pub n_min: usize,
    pub n_max: usize,
    pub rel_tol: f64,
    pub p_c_bound: f64,
    pub force: bool,
    pub budget: ColumnBudget,
    pub checkpoint: Option<PathBuf>,
    pub quantity: Quantity,
    pub method: StripMethod,
}

impl RunConfig {
    /// Uses the model's default boundary rows.
    pub fn new(model: Model, n_min: usize, n_max: usize) -> Result<Self> {
        let top = model
            .top
            .clone()
            .ok_or_else(|| Error::Input("model has no default top row; supply one".into()))?;
        let bottom = model
            .bottom
            .clone()
            .ok_or_else(|| Error::Input("model has no default bottom row; supply one".into()))?;
        Ok(Self::with_rows(model, top, bottom, n_min, n_max))
    }

    pub fn with_rows(
        model: Model,
        top: PeriodicRow,
        bottom: PeriodicRow,
        n_min: usize,
        n_max: usize,
    ) -> Self {
        RunConfig {
            model,
            top,
            bottom,
            period: None,
            n_min,
            n_max,
            rel_tol: 1e-12,
            p_c_bound: P_C_RIGOROUS,
            force: false,
            budget: ColumnBudget::default(),
            checkpoint: None,
            quantity: Quantity::Pressure,
            method: StripMethod::default(),
        }
    }

    pub fn natural_period(&self) -> usize {
        lcm(self.top.period(), self.bottom.period())
    }

    pub fn block_length(&self) -> Result<usize> {
        let base = self.natural_period();
        match self.period {
            None => Ok(base),
            Some(p) if p >= 1 && p % base == 0 => Ok(p),
            Some(p) => Err(Error::Input(format!(
                "block length {p} must be a positive multiple of the row period {base}"
            ))),
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// The SFT, interaction and rows a strip is built from: recoded to
/// `p`-blocks for [`StripMethod::Recoded`], unchanged for
/// [`StripMethod::Cyclic`].
#[derive(Clone, Debug)]
pub struct Prepared {
    pub sft: NnSft,
    pub interaction: NnInteraction,
    pub top: PeriodicRow,
    pub bottom: PeriodicRow,
    pub p: usize,
    pub method: StripMethod,
}

pub fn prepare(
    model: &Model,
    top: &PeriodicRow,
    bottom: &PeriodicRow,
    p: usize,
) -> Result<Prepared> {
    prepare_with(model, top, bottom, p, StripMethod::Recoded)
}

pub fn prepare_with(
    model: &Model,
    top: &PeriodicRow,
    bottom: &PeriodicRow,
    p: usize,
    method: StripMethod,
) -> Result<Prepared> {
    for row in [top, bottom] {
        for &s in row.word() {
            model.sft.alphabet().check(s)?;
        }
    }
    if p == 0 || !p.is_multiple_of(top.period()) || !p.is_multiple_of(bottom.period()) {
        return Err(Error::Input(format!(
            "block length {p} must be a positive multiple of the row periods"
        )));
    }
    if p == 1 || method == StripMethod::Cyclic {
        return Ok(Prepared {
            sft: model.sft.clone(),
            interaction: model.interaction.clone(),
            top: top.clone(),
            bottom: bottom.clone(),
            p,
            method: if p == 1 { StripMethod::Recoded } else { method },
        });
    }
    let hp = model.sft.higher_power(p)?;
    Ok(Prepared {
        interaction: model.interaction.power_interaction(&hp)?,
        top: hp.recode_row(top)?,
        bottom: hp.recode_row(bottom)?,
        sft: hp.sft,
        p,
        method,
    })
}

/// One strip of the sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct StripRow {
    pub n: usize,
    /// Columns after trimming.
    pub columns: usize,
    pub log_lambda: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub identity_residual: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug)]
pub enum StripDetail {
    Recoded {
        report: StripReport,
        transfer: TransferMatrix,
    },
    Cyclic {
        report: CyclicReport,
        transfer: CyclicTransfer,
    },
}

/// Everything computed for a single strip height.
#[derive(Clone, Debug)]
pub struct StripOutcome {
    pub raw_columns: usize,
    pub trimmed_removed: usize,
    /// Columns after trimming, summed over phases for the cyclic method.
    pub columns: usize,
    pub edges: usize,
    pub detail: StripDetail,
}

impl StripOutcome {
    pub fn perron(&self) -> &PerronData {
        match &self.detail {
            StripDetail::Recoded { report, .. } => &report.perron,
            StripDetail::Cyclic { report, .. } => &report.perron,
        }
    }

    pub fn log_lambda(&self) -> f64 {
        self.perron().log_lambda()
    }

    /// Entropy of one step of the strip chain (one `p`-block).
    pub fn entropy(&self) -> f64 {
        match &self.detail {
            StripDetail::Recoded { report, .. } => report.chain.entropy,
            StripDetail::Cyclic { report, .. } => report.entropy,
        }
    }

    pub fn expected_phi(&self) -> f64 {
        match &self.detail {
            StripDetail::Recoded { report, .. } => report.chain.expected_phi,
            StripDetail::Cyclic { report, .. } => report.expected_phi,
        }
    }

    pub fn identity_residual(&self) -> f64 {
        match &self.detail {
            StripDetail::Recoded { report, .. } => report.chain.identity_residual,
            StripDetail::Cyclic { report, .. } => report.identity_residual,
        }
    }

    /// The column chain; only the recoded method has a single one.
    pub fn chain(&self) -> Option<&StripChain> {
        match &self.detail {
            StripDetail::Recoded { report, .. } => Some(&report.chain),
            StripDetail::Cyclic { .. } => None,
        }
    }
}

pub fn compute_strip(
    prep: &Prepared,
    n: usize,
    opts: &PerronOptions,
    budget: &ColumnBudget,
) -> Result<StripOutcome> {
    let not_mixing = |diag: &crate::lattice::TrimDiagnostics| Error::NotMixing {
        n,
        scc_count: diag.scc_count,
        period: diag.period,
    };
    if prep.method == StripMethod::Cyclic {
        let cs = CyclicColumnSystem::build(&prep.sft, n, &prep.top, &prep.bottom, prep.p, budget)?;
        let raw_columns = cs.total_columns();
        let (trimmed, diag) = cs.trim_to_essential()?;
        drop(cs);
        if !diag.is_primitive {
            return Err(not_mixing(&diag));
        }
        let transfer = CyclicTransfer::build(&prep.interaction, trimmed)?;
        let report = cyclic_report(&transfer, opts)?;
        return Ok(StripOutcome {
            raw_columns,
            trimmed_removed: diag.removed,
            columns: report.columns,
            edges: report.edges,
            detail: StripDetail::Cyclic { report, transfer },
        });
    }
    let cs = ColumnSystem::build(&prep.sft, n, &prep.top, &prep.bottom, budget)?;
    let raw_columns = cs.len();
    let (trimmed, diag) = cs.trim_to_essential()?;
    drop(cs);
    if !diag.is_primitive {
        return Err(not_mixing(&diag));
    }
    let transfer = TransferMatrix::build(&prep.interaction, trimmed)?;
    let report = report_for(&transfer, opts)?;
    Ok(StripOutcome {
        raw_columns,
        trimmed_removed: diag.removed,
        columns: report.columns,
        edges: report.edges,
        detail: StripDetail::Recoded { report, transfer },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    /// Decay rate: minus the slope of `log |gap_n|` against `n`.
    pub r: f64,
    /// Prefactor of the tail bound `|diff_n - limit| <= q e^{-r n}`
    /// implied by geometric gaps: `gap_prefactor / (1 - e^{-r})`.
    pub q: f64,
    /// `exp(intercept)` of the fitted line through the gaps.
    pub gap_prefactor: f64,
    pub r_squared: f64,
    pub rms_residual: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RateFitOutcome {
    Fit(RateFit),
    Absent(String),
}

impl RateFitOutcome {
    pub fn fit(&self) -> Option<&RateFit> {
        match self {
            RateFitOutcome::Fit(f) => Some(f),
            RateFitOutcome::Absent(_) => None,
        }
    }
}

/// Least-squares line through `(n, log |diff_{n+1} - diff_n|)`.
pub fn fit_rate(diffs: &[(usize, f64)]) -> RateFitOutcome {
    if diffs.len() < 3 {
        return RateFitOutcome::Absent("fewer than 3 differences".into());
    }
    if diffs.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return RateFitOutcome::Absent("differences are not at consecutive heights".into());
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for w in diffs.windows(2) {
        let gap = (w[1].1 - w[0].1).abs();
        if !(gap > 0.0) {
            return RateFitOutcome::Absent("converged below floating-point resolution".into());
        }
        xs.push(w[0].0 as f64);
        ys.push(gap.ln());
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r = -slope;
    let gap_prefactor = intercept.exp();
    let q = if r > 0.0 {
        gap_prefactor / (1.0 - (-r).exp())
    } else {
        gap_prefactor
    };
    RateFitOutcome::Fit(RateFit {
        r,
        q,
        gap_prefactor,
        r_squared: if ss_tot > 0.0 {
            1.0 - ss_res / ss_tot
        } else {
            1.0
        },
        rms_residual: (ss_res / m).sqrt(),
        points: xs.len(),
    })
}

#[derive(Clone, Debug)]
pub struct PressureRun {
    pub model_name: String,
    pub quantity: Quantity,
    pub p: usize,
    pub method: StripMethod,
    pub rel_tol: f64,
    pub rows: Vec<StripRow>,
    /// `(n, (log lambda_{n+1} - log lambda_n) / p)` for `n_min <= n < n_max`.
    pub diffs: Vec<(usize, f64)>,
    pub estimate: f64,
    /// Heuristic, not certified.
    pub error_bar: Option<f64>,
    pub rate_fit: RateFitOutcome,
    pub gate: ApplicabilityReport,
    /// Ran with a failed gate.
    pub forced: bool,
    /// Smallest height whose strip lost no column to trimming.
    pub first_untrimmed_n: Option<usize>,
}

fn fingerprint(cfg: &RunConfig, p: usize) -> String {
    let mut h = Sha256::new();
    h.update(cfg.model.canonical_description().as_bytes());
    h.update(format!(
        "|t={:?}|b={:?}|p={p}|tol={:016x}|q={:?}|m={:?}",
        cfg.top.word(),
        cfg.bottom.word(),
        cfg.rel_tol.to_bits(),
        cfg.quantity,
        cfg.method
    ));
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn run_pressure(cfg: &RunConfig) -> Result<PressureRun> {
    if cfg.n_min < 1 || cfg.n_max < cfg.n_min + 1 {
        return Err(Error::Input(format!(
            "need 1 <= n_min < n_max, got n_min={} n_max={}",
            cfg.n_min, cfg.n_max
        )));
    }
    let gate = applicability(
        &cfg.model.interaction,
        &cfg.model.sft,
        &cfg.model.kind,
        cfg.p_c_bound,
    )?;
    if !gate.passes && !cfg.force {
        return Err(Error::GateFailed {
            q_hat: gate.q_hat,
            p_c_bound: gate.p_c_bound,
        });
    }
    let p = cfg.block_length()?;
    let prep = prepare_with(&cfg.model, &cfg.top, &cfg.bottom, p, cfg.method)?;
    let opts = PerronOptions::with_tol(cfg.rel_tol);
    let fp = fingerprint(cfg, p);

    let mut done: BTreeMap<usize, (StripRow, usize)> = match &cfg.checkpoint {
        Some(path) if path.exists() => read_checkpoint(path, &fp)?,
        _ => BTreeMap::new(),
    };
    for n in cfg.n_min..=cfg.n_max {
        if done.contains_key(&n) {
            continue;
        }
        let start = Instant::now();
        let out = compute_strip(&prep, n, &opts, &cfg.budget)?;
        let pd = out.perron();
        let row = StripRow {
            n,
            columns: out.columns,
            log_lambda: pd.log_lambda(),
            lambda_lo: pd.lambda_lo(),
            lambda_hi: pd.lambda_hi(),
            identity_residual: out.identity_residual(),
            wall_ms: (start.elapsed().as_secs_f64() * 1e6).round() / 1e3,
        };
        done.insert(n, (row, out.trimmed_removed));
        if let Some(path) = &cfg.checkpoint {
            write_checkpoint(path, &fp, &done)?;
        }
    }
    let range: Vec<_> = (cfg.n_min..=cfg.n_max).map(|n| done[&n].clone()).collect();
    let first_untrimmed_n = range
        .iter()
        .find(|(_, removed)| *removed == 0)
        .map(|(r, _)| r.n);
    let rows: Vec<StripRow> = range.into_iter().map(|(r, _)| r).collect();
    let diffs: Vec<(usize, f64)> = rows
        .windows(2)
        .map(|w| (w[0].n, (w[1].log_lambda - w[0].log_lambda) / p as f64))
        .collect();
    let estimate = diffs.last().unwrap().1;
    let error_bar = (diffs.len() >= 2)
        .then(|| ERROR_BAR_FACTOR * (diffs[diffs.len() - 1].1 - diffs[diffs.len() - 2].1).abs());
    Ok(PressureRun {
        model_name: cfg.model.name.clone(),
        quantity: cfg.quantity,
        p,
        method: prep.method,
        rel_tol: cfg.rel_tol,
        rate_fit: fit_rate(&diffs),
        rows,
        diffs,
        estimate,
        error_bar,
        forced: !gate.passes,
        gate,
        first_untrimmed_n,
    })
}

/// `run_pressure` with the zero interaction on the same shift.
pub fn entropy_run(cfg: &RunConfig) -> Result<PressureRun> {
    let mut cfg = cfg.clone();
    cfg.model = cfg.model.with_zero_interaction();
    cfg.quantity = Quantity::TopologicalEntropy;
    run_pressure(&cfg)
}

pub fn check(model: &Model, p_c_bound: f64) -> Result<ApplicabilityReport> {
    applicability(&model.interaction, &model.sft, &model.kind, p_c_bound)
}

/// Fifteen significant digits.
pub fn sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..15).contains(&mag) {
        format!("{:.*}", (14 - mag).max(0) as usize, x)
    } else {
        format!("{x:.14e}")
    }
}

/// Shortest text that parses back to `x`, in exponent form outside
/// `[1e-4, 1e15)`.
pub fn roundtrip(x: f64) -> String {
    let mag = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&mag) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

const CSV_HEADER: [&str; 8] = [
    "n",
    "columns",
    "log_lambda",
    "lambda_lo",
    "lambda_hi",
    "diff",
    "identity_residual",
    "wall_ms",
];

impl PressureRun {
    /// Metadata lines written as `# key=value` comments above the CSV.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("model".to_string(), self.model_name.clone()),
            ("quantity".into(), self.quantity.label().into()),
            ("block_length".into(), self.p.to_string()),
            ("method".into(), self.method.label().into()),
            ("rel_tol".into(), format!("{:e}", self.rel_tol)),
            ("summation".into(), SUMMATION_MODE.into()),
            ("estimate".into(), roundtrip(self.estimate)),
        ];
        if let Some(e) = self.error_bar {
            kv.push(("error_bar_heuristic".into(), roundtrip(e)));
        }
        match &self.rate_fit {
            RateFitOutcome::Fit(f) => {
                kv.push(("rate_r".into(), roundtrip(f.r)));
                kv.push(("rate_q".into(), roundtrip(f.q)));
                kv.push(("rate_r_squared".into(), roundtrip(f.r_squared)));
            }
            RateFitOutcome::Absent(why) => kv.push(("rate_fit".into(), format!("absent: {why}"))),
        }
        if self.forced {
            kv.push(("hypotheses".into(), "not certified (forced run)".into()));
        }
        if let Some(n) = self.first_untrimmed_n {
            kv.push(("first_untrimmed_n".into(), n.to_string()));
        }
        for (k, v) in self.gate.key_values() {
            kv.push((format!("gate.{k}"), v));
        }
        kv
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in self.metadata() {
            writeln!(out, "# {k}={v}")?;
        }
        let diffs: BTreeMap<usize, f64> = self.diffs.iter().copied().collect();
        write_rows(&mut out, &self.rows, |n| diffs.get(&n).copied())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 csv")
    }

    /// Writes via a temporary file and rename.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.to_csv_string().as_bytes())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model: {}", self.model_name);
        let _ = writeln!(s, "block length p = {} ({})", self.p, self.method.label());
        if self.forced {
            let _ = writeln!(
                s,
                "WARNING: applicability gate failed; hypotheses not certified"
            );
        }
        let _ = writeln!(
            s,
            "{:>4} {:>10} {:>22} {:>22} {:>12}",
            "n", "columns", "log_lambda", "diff", "residual"
        );
        let diffs: BTreeMap<usize, f64> = self.diffs.iter().copied().collect();
        for r in &self.rows {
            let d = diffs.get(&r.n).map(|&d| sig15(d)).unwrap_or_default();
            let _ = writeln!(
                s,
                "{:>4} {:>10} {:>22} {:>22} {:>12.3e}",
                r.n,
                r.columns,
                sig15(r.log_lambda),
                d,
                r.identity_residual
            );
        }
        let _ = write!(
            s,
            "{} estimate: {}",
            self.quantity.label(),
            sig15(self.estimate)
        );
        if let Some(e) = self.error_bar {
            let _ = write!(s, " +/- {:.3e} (heuristic, not certified)", e);
        }
        let _ = writeln!(s);
        match &self.rate_fit {
            RateFitOutcome::Fit(f) => {
                let _ = writeln!(
                    s,
                    "empirical rate: R = {} Q = {} (R^2 = {:.6}, {} gaps)",
                    sig15(f.r),
                    sig15(f.q),
                    f.r_squared,
                    f.points
                );
            }
            RateFitOutcome::Absent(why) => {
                let _ = writeln!(s, "empirical rate: absent ({why})");
            }
        }
        if let Some(n) = self.first_untrimmed_n {
            let _ = writeln!(
                s,
                "first height with no trimmed columns: {n} (weak proxy only)"
            );
        }
        s
    }
}

fn write_rows<W: std::io::Write>(
    out: W,
    rows: &[StripRow],
    diff: impl Fn(usize) -> Option<f64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.columns.to_string(),
            roundtrip(r.log_lambda),
            roundtrip(r.lambda_lo),
            roundtrip(r.lambda_hi),
            diff(r.n).map(roundtrip).unwrap_or_default(),
            roundtrip(r.identity_residual),
            roundtrip(r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parsed CSV content: metadata comments, rows and diffs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunCsv {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<StripRow>,
    pub diffs: Vec<(usize, f64)>,
}

pub fn parse_csv(text: &str) -> Result<RunCsv> {
    let metadata = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected CSV header {headers:?}")));
    }
    let mut rows = Vec::new();
    let mut diffs = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {:?}", &rec[i])))
        };
        let u = |i: usize| -> Result<usize> {
            rec[i]
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad integer {:?}", &rec[i])))
        };
        let row = StripRow {
            n: u(0)?,
            columns: u(1)?,
            log_lambda: f(2)?,
            lambda_lo: f(3)?,
            lambda_hi: f(4)?,
            identity_residual: f(6)?,
            wall_ms: f(7)?,
        };
        if !rec[5].is_empty() {
            diffs.push((row.n, f(5)?));
        }
        rows.push(row);
    }
    Ok(RunCsv {
        metadata,
        rows,
        diffs,
    })
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_checkpoint(
    path: &Path,
    fp: &str,
    done: &BTreeMap<usize, (StripRow, usize)>,
) -> Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "# fingerprint={fp}")?;
    for (n, (_, removed)) in done {
        writeln!(buf, "# trimmed.{n}={removed}")?;
    }
    let rows: Vec<StripRow> = done.values().map(|(r, _)| r.clone()).collect();
    write_rows(&mut buf, &rows, |_| None)?;
    atomic_write(path, &buf)
}

fn read_checkpoint(path: &Path, fp: &str) -> Result<BTreeMap<usize, (StripRow, usize)>> {
    let text = fs::read_to_string(path)?;
    let parsed = parse_csv(&text)?;
    let stored = parsed
        .metadata
        .iter()
        .find(|(k, _)| k == "fingerprint")
        .map(|(_, v)| v.as_str());
    if stored != Some(fp) {
        return Err(Error::Input(format!(
            "checkpoint {} belongs to a different model or configuration",
            path.display()
        )));
    }
    let removed: BTreeMap<usize, usize> = parsed
        .metadata
        .iter()
        .filter_map(|(k, v)| Some((k.strip_prefix("trimmed.")?.parse().ok()?, v.parse().ok()?)))
        .collect();
    Ok(parsed
        .rows
        .into_iter()
        .map(|r| {
            let rm = removed.get(&r.n).copied().unwrap_or(0);
            (r.n, (r, rm))
        })
        .collect())
}
