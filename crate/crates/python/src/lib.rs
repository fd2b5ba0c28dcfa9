//! Python bindings: `import pystrip`.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use strip_pressure::model_file::parse_word_str;
use strip_pressure::pressure::{self, compute_strip, prepare_with};
use strip_pressure::{
    entropy_run, fit_rate as core_fit_rate, load_model, run_pressure, ColumnBudget, Error, Model,
    PeriodicRow, PerronOptions, PressureRun, RateFitOutcome, RunConfig, StripMethod, P_C_RIGOROUS,
};

create_exception!(pystrip, StripError, PyException);
create_exception!(pystrip, GateFailedError, StripError);
create_exception!(pystrip, NumericalError, StripError);
create_exception!(pystrip, ModelError, StripError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e.exit_code() {
        2 => GateFailedError::new_err(msg),
        3 => NumericalError::new_err(msg),
        4 => ModelError::new_err(msg),
        _ => StripError::new_err(msg),
    }
}

fn method(name: &str) -> PyResult<StripMethod> {
    match name {
        "recoded" => Ok(StripMethod::Recoded),
        "cyclic" => Ok(StripMethod::Cyclic),
        other => Err(ModelError::new_err(format!(
            "method must be \"recoded\" or \"cyclic\", got {other:?}"
        ))),
    }
}

#[pyclass(name = "Model", module = "pystrip", frozen)]
struct PyModel {
    inner: Model,
}

impl PyModel {
    fn row(
        &self,
        word: Option<&str>,
        default: &Option<PeriodicRow>,
        which: &str,
    ) -> PyResult<PeriodicRow> {
        match word {
            Some(w) => parse_word_str(self.inner.sft.alphabet(), w)
                .and_then(PeriodicRow::new)
                .map_err(to_py),
            None => default
                .clone()
                .ok_or_else(|| ModelError::new_err(format!("model has no default {which} row"))),
        }
    }

    fn names(&self, row: &Option<PeriodicRow>) -> Option<Vec<String>> {
        let a = self.inner.sft.alphabet();
        row.as_ref()
            .map(|r| r.word().iter().map(|&s| a.name(s).to_string()).collect())
    }
}

#[pymethods]
impl PyModel {
    /// A model file path or a built-in such as `"hard_core a=0.5"`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        load_model(spec)
            .map(|inner| PyModel { inner })
            .map_err(to_py)
    }

    /// Model-file text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        strip_pressure::parse_model(text)
            .map(|inner| PyModel { inner })
            .map_err(to_py)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn symbols(&self) -> Vec<String> {
        self.inner.sft.alphabet().names().to_vec()
    }

    #[getter]
    fn top(&self) -> Option<Vec<String>> {
        self.names(&self.inner.top)
    }

    #[getter]
    fn bottom(&self) -> Option<Vec<String>> {
        self.names(&self.inner.bottom)
    }

    fn canonical_description(&self) -> String {
        self.inner.canonical_description()
    }

    fn q_hat(&self) -> PyResult<f64> {
        strip_pressure::q_hat(&self.inner.interaction, &self.inner.sft).map_err(to_py)
    }

    /// Gate report as a `{key: value}` dict of strings.
    #[pyo3(signature = (pc = P_C_RIGOROUS))]
    fn check(&self, pc: f64) -> PyResult<BTreeMap<String, String>> {
        pressure::check(&self.inner, pc)
            .map(|r| r.key_values().into_iter().collect())
            .map_err(to_py)
    }

    /// Perron data of one strip.
    #[pyo3(signature = (n, tol = 1e-12, block = None, method = "recoded", t = None, b = None))]
    #[allow(clippy::too_many_arguments)]
    fn strip(
        &self,
        py: Python<'_>,
        n: usize,
        tol: f64,
        block: Option<usize>,
        method: &str,
        t: Option<&str>,
        b: Option<&str>,
    ) -> PyResult<PyStrip> {
        let top = self.row(t, &self.inner.top, "top")?;
        let bottom = self.row(b, &self.inner.bottom, "bottom")?;
        let mut cfg = RunConfig::with_rows(self.inner.clone(), top.clone(), bottom.clone(), 1, 2);
        cfg.period = block;
        let p = cfg.block_length().map_err(to_py)?;
        let m = self::method(method)?;
        let model = &self.inner;
        py.detach(|| {
            let prep = prepare_with(model, &top, &bottom, p, m)?;
            let out = compute_strip(
                &prep,
                n,
                &PerronOptions::with_tol(tol),
                &ColumnBudget::default(),
            )?;
            let pd = out.perron();
            Ok(PyStrip {
                n,
                p,
                raw_columns: out.raw_columns,
                columns: out.columns,
                edges: out.edges,
                log_lambda: pd.log_lambda(),
                lambda_lo: pd.lambda_lo(),
                lambda_hi: pd.lambda_hi(),
                iterations: pd.iterations,
                residual: pd.residual,
                entropy: out.entropy(),
                expected_phi: out.expected_phi(),
                identity_residual: out.identity_residual(),
            })
        })
        .map_err(to_py)
    }

    /// Sweep `n_min..=n_max`; `entropy=True` drops the interaction.
    #[pyo3(signature = (
        n_min, n_max, tol = 1e-12, force = false, pc = P_C_RIGOROUS, block = None,
        method = "recoded", t = None, b = None, entropy = false, checkpoint = None
    ))]
    #[allow(clippy::too_many_arguments)]
    fn run(
        &self,
        py: Python<'_>,
        n_min: usize,
        n_max: usize,
        tol: f64,
        force: bool,
        pc: f64,
        block: Option<usize>,
        method: &str,
        t: Option<&str>,
        b: Option<&str>,
        entropy: bool,
        checkpoint: Option<std::path::PathBuf>,
    ) -> PyResult<PyRun> {
        let top = self.row(t, &self.inner.top, "top")?;
        let bottom = self.row(b, &self.inner.bottom, "bottom")?;
        let mut cfg = RunConfig::with_rows(self.inner.clone(), top, bottom, n_min, n_max);
        cfg.rel_tol = tol;
        cfg.force = force;
        cfg.p_c_bound = pc;
        cfg.period = block;
        cfg.method = self::method(method)?;
        cfg.checkpoint = checkpoint;
        py.detach(|| {
            if entropy {
                entropy_run(&cfg)
            } else {
                run_pressure(&cfg)
            }
        })
        .map(|inner| PyRun { inner })
        .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Model({:?})", self.inner.name)
    }
}

#[pyclass(name = "Strip", module = "pystrip", frozen, get_all)]
struct PyStrip {
    n: usize,
    p: usize,
    raw_columns: usize,
    columns: usize,
    edges: usize,
    log_lambda: f64,
    lambda_lo: f64,
    lambda_hi: f64,
    iterations: usize,
    residual: f64,
    entropy: f64,
    expected_phi: f64,
    identity_residual: f64,
}

#[pymethods]
impl PyStrip {
    fn __repr__(&self) -> String {
        format!(
            "Strip(n={}, columns={}, log_lambda={:.15})",
            self.n, self.columns, self.log_lambda
        )
    }
}

#[pyclass(name = "StripRow", module = "pystrip", frozen, get_all)]
struct PyRow {
    n: usize,
    columns: usize,
    log_lambda: f64,
    lambda_lo: f64,
    lambda_hi: f64,
    diff: Option<f64>,
    identity_residual: f64,
    wall_ms: f64,
}

#[pyclass(name = "PressureRun", module = "pystrip", frozen)]
struct PyRun {
    inner: PressureRun,
}

#[pymethods]
impl PyRun {
    #[getter]
    fn rows(&self) -> Vec<PyRow> {
        let diffs: BTreeMap<usize, f64> = self.inner.diffs.iter().copied().collect();
        self.inner
            .rows
            .iter()
            .map(|r| PyRow {
                n: r.n,
                columns: r.columns,
                log_lambda: r.log_lambda,
                lambda_lo: r.lambda_lo,
                lambda_hi: r.lambda_hi,
                diff: diffs.get(&r.n).copied(),
                identity_residual: r.identity_residual,
                wall_ms: r.wall_ms,
            })
            .collect()
    }

    #[getter]
    fn diffs(&self) -> Vec<(usize, f64)> {
        self.inner.diffs.clone()
    }

    #[getter]
    fn estimate(&self) -> f64 {
        self.inner.estimate
    }

    /// Heuristic, not certified.
    #[getter]
    fn error_bar(&self) -> Option<f64> {
        self.inner.error_bar
    }

    /// `(R, Q, r_squared)`, or `None` with the reason in `rate_note`.
    #[getter]
    fn rate(&self) -> Option<(f64, f64, f64)> {
        self.inner.rate_fit.fit().map(|f| (f.r, f.q, f.r_squared))
    }

    #[getter]
    fn rate_note(&self) -> Option<String> {
        match &self.inner.rate_fit {
            RateFitOutcome::Absent(why) => Some(why.clone()),
            RateFitOutcome::Fit(_) => None,
        }
    }

    #[getter]
    fn block_length(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn forced(&self) -> bool {
        self.inner.forced
    }

    #[getter]
    fn gate(&self) -> BTreeMap<String, String> {
        self.inner.gate.key_values().into_iter().collect()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv_string()
    }

    fn save_csv(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.inner.save_csv(&path).map_err(to_py)
    }

    fn report(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        format!(
            "PressureRun({:?}, estimate={:.15}, rows={})",
            self.inner.model_name,
            self.inner.estimate,
            self.inner.rows.len()
        )
    }
}

/// `(R, Q, r_squared)` fitted to `[(n, diff_n), ...]`, or `None`.
#[pyfunction]
fn fit_rate(diffs: Vec<(usize, f64)>) -> Option<(f64, f64, f64)> {
    core_fit_rate(&diffs).fit().map(|f| (f.r, f.q, f.r_squared))
}

#[pymodule]
fn pystrip(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyStrip>()?;
    m.add_class::<PyRow>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(fit_rate, m)?)?;
    let py = m.py();
    m.add("StripError", py.get_type::<StripError>())?;
    m.add("GateFailedError", py.get_type::<GateFailedError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add("ModelError", py.get_type::<ModelError>())?;
    m.add("P_C_RIGOROUS", P_C_RIGOROUS)?;
    m.add("P_C_SIMULATED", strip_pressure::P_C_SIMULATED)?;
    Ok(())
}
