//! Python bindings for the `jumpvar` crate.

use std::collections::HashMap;

use jumpvar::averaging::{cube_average_slice, dini_norms, discrete_symbol, ConvexBodySpec, ModulusOfContinuity};
use jumpvar::fourier::{littlewood_paley_symbol, poisson_symbol, PoissonKind};
use jumpvar::geometry::{boundary_neighborhood_exact, boundary_neighborhood_measure};
use jumpvar::harness::{run, ExperimentConfig, Format};
use jumpvar::oscillatory::{vdc_1d, AmplitudeSpec, PhaseSpec};
use jumpvar::variation::{self, Atom, FieldOfPaths, Time};
use jumpvar::Error;
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Parse(_) => PyValueError::new_err(e.to_string()),
        Error::NumericFailure(_) => PyArithmeticError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
    }
}

#[derive(FromPyObject)]
enum TimeArg {
    Int(i64),
    Text(String),
}

fn to_time(t: TimeArg) -> PyResult<Time> {
    match t {
        TimeArg::Int(n) => Ok(Time::integer(n)),
        TimeArg::Text(s) => s.parse().map_err(py_err),
    }
}

/// A finite path `t -> a_t` sampled at increasing rational times.
///
/// `times` holds ints or strings such as `"3/4"` or `"5/2^3"`; it defaults
/// to `1, 2, 3, ...`.
#[pyclass(name = "SampledPath", module = "jumpvar_py", frozen, from_py_object)]
#[derive(Clone)]
struct PySampledPath {
    inner: variation::SampledPath,
}

#[pymethods]
impl PySampledPath {
    #[new]
    #[pyo3(signature = (values, times=None))]
    fn new(values: Vec<Complex64>, times: Option<Vec<TimeArg>>) -> PyResult<Self> {
        let inner = match times {
            None => variation::SampledPath::from_values(values),
            Some(ts) => {
                let ts = ts.into_iter().map(to_time).collect::<PyResult<Vec<_>>>()?;
                variation::SampledPath::new(ts, values)
            }
        }
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn values(&self) -> Vec<Complex64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn times(&self) -> Vec<String> {
        self.inner.times().iter().map(ToString::to_string).collect()
    }

    /// Longest chain of increments of size at least `lam`.
    fn jump_count(&self, lam: f64) -> PyResult<usize> {
        variation::jump_count(&self.inner, lam).map_err(py_err)
    }

    /// `r`-variation; pass `float("inf")` for the sup of increments.
    fn variation(&self, r: f64) -> PyResult<f64> {
        variation::variation(&self.inner, r).map_err(py_err)
    }

    /// `(lhs, rhs)` of the dyadic square-function bound.
    fn lewko_bound(&self, r: f64) -> PyResult<(f64, f64)> {
        variation::lewko_bound(&self.inner, r).map_err(py_err)
    }

    /// `(lhs, long, short)` of the long/short split at threshold `lam`.
    fn long_short(&self, lam: f64) -> PyResult<(f64, f64, f64)> {
        let s = variation::long_short_split(&self.inner, lam).map_err(py_err)?;
        Ok((s.lhs, s.long, s.short))
    }

    /// `[(lambda, N_lambda)]` at the thresholds where the count drops.
    fn jump_breakpoints(&self) -> Vec<(f64, usize)> {
        variation::jump_breakpoints(&self.inner).breakpoints().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("SampledPath(len={})", self.inner.len())
    }
}

/// Jump quasi-seminorm of a weighted family of paths.
#[pyfunction]
#[pyo3(signature = (paths, p, weights=None))]
fn jump_seminorm(paths: Vec<PySampledPath>, p: f64, weights: Option<Vec<f64>>) -> PyResult<f64> {
    let weights = weights.unwrap_or_else(|| vec![1.0; paths.len()]);
    if weights.len() != paths.len() {
        return Err(PyValueError::new_err("one weight per path"));
    }
    let atoms = paths
        .into_iter()
        .zip(weights)
        .map(|(path, weight)| Atom { weight, path: path.inner })
        .collect();
    let field = FieldOfPaths::new(atoms).map_err(py_err)?;
    variation::jump_seminorm(&field, p).map_err(py_err)
}

fn poisson_kind(discrete: bool) -> PoissonKind {
    if discrete {
        PoissonKind::Discrete
    } else {
        PoissonKind::Continuous
    }
}

#[pyfunction]
#[pyo3(signature = (t, xi, discrete=false))]
fn poisson(t: f64, xi: Vec<f64>, discrete: bool) -> PyResult<f64> {
    poisson_symbol(t, &xi, poisson_kind(discrete)).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (k, xi, discrete=false))]
fn littlewood_paley(k: i32, xi: Vec<f64>, discrete: bool) -> PyResult<f64> {
    littlewood_paley_symbol(k, &xi, poisson_kind(discrete)).map_err(py_err)
}

/// Multiplier of the average over `[-n, n]^d`.
#[pyfunction]
fn cube_symbol(n: u32, xi: Vec<f64>) -> f64 {
    discrete_symbol(n, &xi)
}

/// Periodic average over `x - [-n, n]^dims` of a row-major array.
#[pyfunction]
fn cube_average(values: Vec<f64>, dims: usize, side: usize, n: usize) -> PyResult<Vec<f64>> {
    cube_average_slice(&values, dims, side, n).map_err(py_err)
}

/// `(int omega/t, int omega |log t|/t)` for `omega(t) = c t^theta`.
#[pyfunction]
fn dini_power(c: f64, theta: f64) -> PyResult<(Option<f64>, Option<f64>)> {
    let omega = ModulusOfContinuity::power(c, theta);
    omega.validate().map_err(py_err)?;
    let d = dini_norms(&omega);
    Ok((d.dini.value(), d.log_dini.value()))
}

/// Van der Corput quantities for `lam (x - center)^k / k!` on `[a, b]` with
/// an indicator of `[lo, hi]` or a hat of `(center, half_width)`.
#[pyfunction]
#[pyo3(signature = (lam, order, amplitude, a=0.0, b=1.0, center=0.0))]
fn vdc(lam: f64, order: u32, amplitude: (&str, f64, f64), a: f64, b: f64, center: f64) -> PyResult<HashMap<&'static str, f64>> {
    let phase = PhaseSpec::Monomial { lambda: lam, order, center, a, b };
    let psi = match amplitude.0 {
        "indicator" => AmplitudeSpec::indicator_1d(amplitude.1, amplitude.2),
        "hat" => AmplitudeSpec::hat_1d(amplitude.1, amplitude.2),
        other => return Err(PyValueError::new_err(format!("unknown amplitude {other:?}"))),
    };
    let r = vdc_1d(&phase, &psi).map_err(py_err)?;
    Ok(HashMap::from([
        ("lhs", r.lhs),
        ("rhs_window", r.rhs_window),
        ("rhs_smoothness", r.rhs_smoothness),
        ("l1_norm", r.l1_norm),
        ("ratio", r.ratio()),
    ]))
}

/// Monte Carlo `(estimate, stderr, exact or None)` for the `s`-neighbourhood
/// of the boundary of the unit `l^q` ball.
#[pyfunction]
#[pyo3(signature = (q, dim, s, samples=100_000, seed=0))]
fn boundary_measure(q: f64, dim: usize, s: f64, samples: usize, seed: u64) -> PyResult<(f64, f64, Option<f64>)> {
    let body = ConvexBodySpec::lq_ball(q, dim).map_err(py_err)?;
    let est = boundary_neighborhood_measure(&body, s, samples, seed).map_err(py_err)?;
    Ok((est.estimate, est.stderr, boundary_neighborhood_exact(&body, s)))
}

/// Runs an experiment config given as JSON text and returns the rendered table.
#[pyfunction]
#[pyo3(signature = (config, format="csv", seed=None))]
fn run_config(config: &str, format: &str, seed: Option<u64>) -> PyResult<String> {
    let mut cfg = ExperimentConfig::from_json(config).map_err(py_err)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let format = match format {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return Err(PyValueError::new_err(format!("unknown format {other:?}"))),
    };
    Ok(run(&cfg).map_err(py_err)?.render(format))
}

#[pymodule]
fn jumpvar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySampledPath>()?;
    m.add_function(wrap_pyfunction!(jump_seminorm, m)?)?;
    m.add_function(wrap_pyfunction!(poisson, m)?)?;
    m.add_function(wrap_pyfunction!(littlewood_paley, m)?)?;
    m.add_function(wrap_pyfunction!(cube_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(cube_average, m)?)?;
    m.add_function(wrap_pyfunction!(dini_power, m)?)?;
    m.add_function(wrap_pyfunction!(vdc, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_measure, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
