//! Python bindings. Rationals cross the boundary as `fractions.Fraction`;
//! inputs may also be `int` or `"p/q"` strings. Floats are refused.

use std::collections::BTreeSet;

use lbgame::cli::{self, GridSpec};
use lbgame::f4::{self, Mode};
use lbgame::oracle;
use lbgame::report::ReportDocument;
use lbgame::{f3, game, Framework, GameError, Params, Profile, Rational, Slopes};
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyFloat, PyList, PyString};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn game_error(e: GameError) -> PyErr {
    value_error(e)
}

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if obj.is_instance_of::<PyFloat>() {
        return Err(PyTypeError::new_err("floats are not accepted; pass an int, a Fraction or a 'p/q' string"));
    }
    let text = if obj.is_instance_of::<PyString>() { obj.extract::<String>()? } else { obj.str()?.to_string() };
    text.parse().map_err(value_error)
}

fn to_fraction<'py>(py: Python<'py>, r: Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.numer(), r.denom()))
}

fn framework(name: &str) -> PyResult<Framework> {
    match name {
        "f3" => Ok(Framework::F3),
        "f4" => Ok(Framework::F4),
        other => Err(value_error(format!("framework must be 'f3' or 'f4', got '{other}'"))),
    }
}

fn pairs(set: &BTreeSet<Profile>) -> Vec<(u32, u32)> {
    set.iter().map(|p| (p.n_abc, p.n_bac)).collect()
}

fn from_json<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.getattr("loads")?.call1((text,))
}

/// One instance of the game: slopes `a`, `b` and `n` connections per source.
#[pyclass(name = "Game", module = "lbgame_py", frozen)]
pub struct PyGame {
    params: Params,
}

impl PyGame {
    fn profile(&self, n_abc: u32, n_bac: u32) -> PyResult<Profile> {
        let p = Profile::new(n_abc, n_bac);
        self.params.check(p).map_err(game_error)?;
        Ok(p)
    }
}

#[pymethods]
impl PyGame {
    #[new]
    fn new(a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>, n: u32) -> PyResult<Self> {
        let params = Params::new(to_rational(a)?, to_rational(b)?, n).map_err(game_error)?;
        Ok(PyGame { params })
    }

    #[getter]
    fn a<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, self.params.a())
    }

    #[getter]
    fn b<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, self.params.b())
    }

    #[getter]
    fn n(&self) -> u32 {
        self.params.n()
    }

    fn __repr__(&self) -> String {
        format!("Game(a={}, b={}, n={})", self.params.a(), self.params.b(), self.params.n())
    }

    /// Route costs as a dict keyed by route name.
    fn route_costs<'py>(&self, py: Python<'py>, n_abc: u32, n_bac: u32) -> PyResult<Bound<'py, PyDict>> {
        let c = game::route_costs(&self.params, self.profile(n_abc, n_bac)?).map_err(game_error)?;
        let d = PyDict::new(py);
        for (k, v) in [("AB", c.ab), ("AC", c.ac), ("ABC", c.abc), ("BC", c.bc), ("BAC", c.bac)] {
            d.set_item(k, to_fraction(py, v)?)?;
        }
        Ok(d)
    }

    fn utility_a<'py>(&self, py: Python<'py>, n_abc: u32, n_bac: u32) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, game::utility_a(&self.params, self.profile(n_abc, n_bac)?).map_err(game_error)?)
    }

    fn utility_b<'py>(&self, py: Python<'py>, n_abc: u32, n_bac: u32) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, game::utility_b(&self.params, self.profile(n_abc, n_bac)?).map_err(game_error)?)
    }

    fn total_cost<'py>(&self, py: Python<'py>, n_abc: u32, n_bac: u32) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, game::total_cost(&self.params, self.profile(n_abc, n_bac)?).map_err(game_error)?)
    }

    fn potential<'py>(&self, py: Python<'py>, n_abc: u32, n_bac: u32) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, f3::rosenthal_potential(&self.params, self.profile(n_abc, n_bac)?).map_err(game_error)?)
    }

    /// Closed-form equilibria as sorted `(nABC, nBAC)` tuples.
    fn equilibria(&self, framework_name: &str) -> PyResult<Vec<(u32, u32)>> {
        Ok(pairs(&oracle::default_predictor(framework(framework_name)?)(&self.params)))
    }

    /// Brute-force equilibria, independent of the closed forms.
    fn oracle_equilibria(&self, framework_name: &str) -> PyResult<Vec<(u32, u32)>> {
        Ok(pairs(&oracle::enumerate_ne(&self.params, framework(framework_name)?)))
    }

    fn best_response_a(&self, n_bac: u32) -> PyResult<Vec<u32>> {
        Ok(f4::best_response_a(&self.params, n_bac).map_err(game_error)?.to_vec())
    }

    fn best_response_b(&self, n_abc: u32) -> PyResult<Vec<u32>> {
        Ok(f4::best_response_b(&self.params, n_abc).map_err(game_error)?.to_vec())
    }

    /// `(cost_a, cost_b)` as nested lists of Fractions.
    #[pyo3(signature = (scaled = false))]
    fn payoff_matrices<'py>(&self, py: Python<'py>, scaled: bool) -> PyResult<(Bound<'py, PyList>, Bound<'py, PyList>)> {
        let m = if scaled { f4::scaled_payoff_matrices(&self.params) } else { f4::payoff_matrices(&self.params) };
        let convert = |grid: &Vec<Vec<Rational>>| -> PyResult<Bound<'py, PyList>> {
            let rows = PyList::empty(py);
            for row in grid {
                let cells: PyResult<Vec<_>> = row.iter().map(|&v| to_fraction(py, v)).collect();
                rows.append(PyList::new(py, cells?)?)?;
            }
            Ok(rows)
        };
        Ok((convert(&m.cost_a)?, convert(&m.cost_b)?))
    }

    /// Mode label (`"1"`, `"2"`, `"3-A"`, `"3-B"`), or `None` unless a > 2b.
    fn mode(&self) -> Option<&'static str> {
        f4::classify_mode(&self.params).ok().map(|m| Mode::label(&m.mode))
    }

    /// Full report in the JSON document layout, decoded into Python objects.
    fn report<'py>(&self, py: Python<'py>, framework_name: &str) -> PyResult<Bound<'py, PyAny>> {
        let doc = match framework(framework_name)? {
            Framework::F3 => ReportDocument::from_f3(&f3::analyze(&self.params)),
            Framework::F4 => ReportDocument::from_f4(&f4::predict_equilibria(&self.params)),
        };
        from_json(py, &doc)
    }
}

#[pyfunction]
fn limit_equilibrium<'py>(py: Python<'py>, a: &Bound<'py, PyAny>, b: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let s = Slopes::new(to_rational(a)?, to_rational(b)?).map_err(game_error)?;
    to_fraction(py, f4::limit_equilibrium(&s))
}

#[pyfunction]
fn limit_poa<'py>(py: Python<'py>, a: &Bound<'py, PyAny>, b: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let s = Slopes::new(to_rational(a)?, to_rational(b)?).map_err(game_error)?;
    to_fraction(py, f4::limit_poa(&s))
}

/// Limits document as a dict.
#[pyfunction]
fn limits<'py>(py: Python<'py>, a: &Bound<'py, PyAny>, b: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let s = Slopes::new(to_rational(a)?, to_rational(b)?).map_err(game_error)?;
    from_json(py, &ReportDocument::limits(&s))
}

/// Predictor versus oracle. Returns `(ok, report_text)`.
#[pyfunction]
#[pyo3(signature = (framework_name = "both", grid_spec = None))]
fn verify(py: Python<'_>, framework_name: &str, grid_spec: Option<&str>) -> PyResult<(bool, String)> {
    let frameworks = match framework_name {
        "both" => vec![Framework::F3, Framework::F4],
        other => vec![framework(other)?],
    };
    let spec = grid_spec.map(GridSpec::parse).transpose().map_err(value_error)?;
    py.detach(|| {
        let mut out = Vec::new();
        let ok = cli::verify_with(&frameworks, spec.as_ref(), |fw, p| oracle::default_predictor(fw)(p), &mut out)
            .map_err(value_error)?;
        Ok((ok, String::from_utf8_lossy(&out).into_owned()))
    })
}

#[pymodule]
fn lbgame_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_function(wrap_pyfunction!(limit_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(limit_poa, m)?)?;
    m.add_function(wrap_pyfunction!(limits, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
