//! Python bindings. Words are digit strings (`"132"`), dual points use the
//! `prefix(period)` form (`"1(23)"`), as in the command-line configurations.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cantor_scaling::branch::{BranchSystem as System, PerturbationShape};
use cantor_scaling::error::Error;
use cantor_scaling::ratio::{
    holder_exponent as holder, log_length_residual, ratio_geometry, rho_s as rho_s_fn, Metric, PairSampler,
    RatioVector, ScalingSource, TailPolicy,
};
use cantor_scaling::realization::{
    realize as realize_fn, FiniteMemory, HolderSeries, IntervalTree as Tree, PrescribedScaling as Prescribed,
    DEFAULT_TAIL_DEPTH,
};
use cantor_scaling::smoothness::{
    conjugacy_smoothness as conjugacy_fn, family_levels, lemma_check, refutation_probe as probe_fn,
    smoothness_exponent as exponent_fn, whitney_check as whitney_fn, ConjugacyOptions, ConstraintSet, ExponentFit,
    ExponentLevel, ExponentOptions, LemmaPair, PairFamily, WhitneyOptions,
};
use cantor_scaling::symbolic::{lcp, rho_delta as rho_delta_fn, DualPoint, Word};

create_exception!(cantor, CantorError, PyValueError);

fn py_err(e: Error) -> PyErr {
    CantorError::new_err(e.to_string())
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for cantor_scaling::error::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn word(text: &str, d: usize) -> PyResult<Word> {
    Word::decode(text, d).py()
}

fn dual(text: &str, d: usize) -> PyResult<DualPoint> {
    DualPoint::decode(text, d).py()
}

fn constraint_set(name: &str) -> PyResult<ConstraintSet> {
    match name {
        "outer" => Ok(ConstraintSet::Outer),
        "inner" => Ok(ConstraintSet::Inner),
        "combined" => Ok(ConstraintSet::Combined),
        other => Err(PyValueError::new_err(format!(
            "constraints must be 'outer', 'inner' or 'combined', got '{other}'"
        ))),
    }
}

/// Expanding map with `d` inverse branches on disjoint domains in `[0, 1]`.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
pub struct BranchSystem {
    inner: System,
}

#[pymethods]
impl BranchSystem {
    /// Affine branches; `lengths` alternates `d` domain lengths with `d - 1` gaps.
    #[staticmethod]
    fn affine(d: usize, lengths: Vec<f64>) -> PyResult<Self> {
        Ok(BranchSystem {
            inner: System::affine(d, &lengths).py()?,
        })
    }

    /// The `C^{k+eps}` example: one power branch, the others affine.
    #[staticmethod]
    fn power_example(d: usize, k: usize, eps: f64) -> PyResult<Self> {
        Ok(BranchSystem {
            inner: System::power_example(d, k, eps).py()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (d, lengths, amplitude, harmonic = 1))]
    fn perturbed_affine(d: usize, lengths: Vec<f64>, amplitude: f64, harmonic: u32) -> PyResult<Self> {
        Ok(BranchSystem {
            inner: System::perturbed_affine(d, &lengths, amplitude, PerturbationShape::Sine { harmonic }).py()?,
        })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn is_affine(&self) -> bool {
        self.inner.is_affine()
    }

    fn contraction_factor(&self) -> f64 {
        self.inner.contraction_factor()
    }

    fn forward(&self, x: f64) -> PyResult<f64> {
        self.inner.forward(x).py()
    }

    /// `(a, b, log_len)` of the cylinder `I_w`.
    fn cylinder(&self, w: &str) -> PyResult<(f64, f64, f64)> {
        let h = self.inner.cylinder_hull(&word(w, self.inner.d())?).py()?;
        Ok((h.a, h.b(), h.log_len))
    }

    /// Child and gap ratios of `I_w`, interleaved.
    fn ratio_geometry(&self, w: &str) -> PyResult<Vec<f64>> {
        Ok(ratio_geometry(&self.inner, &word(w, self.inner.d())?)
            .py()?
            .interleaved())
    }

    fn log_length_residual(&self, w: &str) -> PyResult<f64> {
        log_length_residual(&self.inner, &word(w, self.inner.d())?).py()
    }

    /// The same map read in blocks of `n` symbols.
    fn regroup(&self, n: usize) -> PyResult<Self> {
        Ok(BranchSystem {
            inner: self.inner.regroup(n).py()?,
        })
    }

    fn __repr__(&self) -> String {
        format!("BranchSystem(d={}, affine={})", self.inner.d(), self.inner.is_affine())
    }
}

/// A scaling function given directly rather than induced by a map.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
pub struct PrescribedScaling {
    inner: Prescribed,
}

#[pymethods]
impl PrescribedScaling {
    #[staticmethod]
    fn constant(ratios: Vec<f64>) -> PyResult<Self> {
        Ok(PrescribedScaling {
            inner: Prescribed::Constant(RatioVector::from_interleaved(&ratios).py()?),
        })
    }

    /// `entries` maps a word to the ratios used when a dual point starts with it.
    #[staticmethod]
    fn finite_memory(d: usize, entries: Vec<(String, Vec<f64>)>, fallback: Vec<f64>) -> PyResult<Self> {
        let entries = entries
            .iter()
            .map(|(w, r)| Ok((word(w, d)?, RatioVector::from_interleaved(r).py()?)))
            .collect::<PyResult<Vec<_>>>()?;
        let fm = FiniteMemory::new(d, entries, RatioVector::from_interleaved(&fallback).py()?).py()?;
        Ok(PrescribedScaling {
            inner: Prescribed::FiniteMemory(fm),
        })
    }

    /// Perturbations of size `a0 * exp(-alpha * delta * m)` at depth `m`.
    #[staticmethod]
    fn holder_series(d: usize, a0: f64, delta: f64, alpha: f64) -> PyResult<Self> {
        let base = HolderSeries::default_base(d, delta).py()?;
        Ok(PrescribedScaling {
            inner: Prescribed::HolderSeries(HolderSeries::new(base, a0, delta, alpha).py()?),
        })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn is_constant(&self) -> bool {
        self.inner.is_constant()
    }

    /// `S(w tail)`, interleaved; without a tail only the word is read.
    #[pyo3(signature = (w, tail = None))]
    fn ratio(&self, w: &str, tail: Option<&str>) -> PyResult<Vec<f64>> {
        let d = self.inner.d();
        let w = word(w, d)?;
        let r = match tail {
            Some(t) => self.inner.ratio_with_tail(&w, &dual(t, d)?, DEFAULT_TAIL_DEPTH),
            None => self.inner.ratio(&w),
        };
        Ok(r.py()?.interleaved())
    }

    fn __repr__(&self) -> String {
        format!(
            "PrescribedScaling(d={}, constant={})",
            self.inner.d(),
            self.inner.is_constant()
        )
    }
}

/// Either kind of scaling source.
#[derive(FromPyObject)]
enum Source<'py> {
    System(PyRef<'py, BranchSystem>),
    Scaling(PyRef<'py, PrescribedScaling>),
}

impl Source<'_> {
    fn get(&self) -> &dyn ScalingSource {
        match self {
            Source::System(s) => &s.inner,
            Source::Scaling(s) => &s.inner,
        }
    }
}

/// Nested intervals realizing a scaling function along one tail.
#[pyclass(frozen)]
pub struct IntervalTree {
    inner: Tree,
}

#[pymethods]
impl IntervalTree {
    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn hull(&self, w: &str) -> PyResult<(f64, f64, f64)> {
        let h = self.inner.hull(&word(w, self.inner.d())?).py()?;
        Ok((h.a, h.b(), h.log_len))
    }

    fn node_ratio(&self, w: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.node_ratio(&word(w, self.inner.d())?).py()?.interleaved())
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }
}

#[pyfunction]
fn realize(source: Source<'_>, tail: &str, depth: usize) -> PyResult<IntervalTree> {
    let s = source.get();
    Ok(IntervalTree {
        inner: realize_fn(s, &dual(tail, s.d())?, depth).py()?,
    })
}

#[pyfunction]
fn lcp_length(a: &str, b: &str, d: usize) -> PyResult<usize> {
    Ok(lcp(&word(a, d)?, &word(b, d)?, None).py()?.length)
}

#[pyfunction]
fn rho_delta(delta: f64, a: &str, b: &str, d: usize) -> PyResult<f64> {
    rho_delta_fn(delta, &word(a, d)?, &word(b, d)?, None).py()
}

/// `ρ_S` between two dual points given as `prefix(period)`.
#[pyfunction]
fn rho_s(source: Source<'_>, a: &str, b: &str) -> PyResult<f64> {
    let s = source.get();
    rho_s_fn(s, &dual(a, s.d())?, &dual(b, s.d())?, &TailPolicy::default()).py()
}

fn levels_list<'py>(py: Python<'py>, levels: &[ExponentLevel]) -> PyResult<Vec<Bound<'py, PyDict>>> {
    levels
        .iter()
        .map(|l| {
            let d = PyDict::new(py);
            d.set_item("n", l.n)?;
            d.set_item("log_scale", l.log_scale)?;
            d.set_item("variation", l.variation)?;
            d.set_item("noise", l.noise)?;
            d.set_item("excluded", l.excluded)?;
            Ok(d)
        })
        .collect()
}

fn fit_dict<'py>(py: Python<'py>, fit: &ExponentFit) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("slope", fit.slope)?;
    d.set_item("intercept", fit.intercept)?;
    d.set_item("r_squared", fit.r_squared)?;
    d.set_item("levels", levels_list(py, &fit.levels)?)?;
    Ok(d)
}

/// Hölder exponent of `S` against `ρ_S` (`metric="rho_s"`) or `ρ_δ` (`metric=δ`).
#[pyfunction]
#[pyo3(signature = (source, delta = None, seed = 0x5eed, max_lcp = 12))]
fn holder_exponent<'py>(
    py: Python<'py>,
    source: Source<'_>,
    delta: Option<f64>,
    seed: u64,
    max_lcp: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let metric = match delta {
        Some(x) => Metric::RhoDelta(x),
        None => Metric::RhoS(TailPolicy::default()),
    };
    let sampler = PairSampler {
        seed,
        max_lcp,
        ..PairSampler::default()
    };
    let est = holder(source.get(), &metric, &sampler).py()?;
    let d = PyDict::new(py);
    d.set_item("exponent", est.exponent)?;
    d.set_item("log_constant", est.log_constant)?;
    d.set_item("r_squared", est.r_squared)?;
    d.set_item("pairs_used", est.pairs_used)?;
    d.set_item("constant", est.constant)?;
    Ok(d)
}

fn family(d: usize, symbol: u32, tail: &str) -> PyResult<PairFamily> {
    Ok(PairFamily::ConstantPrefix {
        symbol,
        tail: dual(tail, d)?,
    })
}

/// Slope of the divided-difference variation bound against `ρ_S` along
/// the pairs `(s_n tail, s_{n+1} tail)` with `s = symbol`.
#[pyfunction]
#[pyo3(signature = (source, k, symbol = 1, tail = "(2)", n_min = 3, n_max = 10, constraints = "combined"))]
#[allow(clippy::too_many_arguments)]
fn smoothness_exponent<'py>(
    py: Python<'py>,
    source: Source<'_>,
    k: usize,
    symbol: u32,
    tail: &str,
    n_min: usize,
    n_max: usize,
    constraints: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let s = source.get();
    let opts = ExponentOptions {
        constraints: constraint_set(constraints)?,
        ..ExponentOptions::default()
    };
    let fit = exponent_fn(s, k, &family(s.d(), symbol, tail)?, n_min..=n_max, &opts).py()?;
    fit_dict(py, &fit)
}

/// Growth of `variation / ρ_S^{k+eps1-1}` along the same pair family.
#[pyfunction]
#[pyo3(signature = (source, k, eps1, symbol = 1, tail = "(2)", n_min = 4, n_max = 10))]
#[allow(clippy::too_many_arguments)]
fn refutation_probe<'py>(
    py: Python<'py>,
    source: Source<'_>,
    k: usize,
    eps1: f64,
    symbol: u32,
    tail: &str,
    n_min: usize,
    n_max: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let s = source.get();
    let rows = family_levels(
        s,
        k,
        &family(s.d(), symbol, tail)?,
        n_min..=n_max,
        &ExponentOptions::default(),
    )
    .py()?;
    let p = probe_fn(&rows, k, eps1, ConstraintSet::Combined).py()?;
    let d = PyDict::new(py);
    d.set_item("ratios", p.ratios)?;
    d.set_item("monotone", p.monotone)?;
    d.set_item("growth", p.growth)?;
    d.set_item("refuted", p.verdict == cantor_scaling::smoothness::Verdict::Refuted)?;
    Ok(d)
}

/// Remainder exponents of the forward map for orders `0..=k`.
#[pyfunction]
#[pyo3(signature = (system, k, eps, levels = (4, 12), samples = 64, seed = 0x5eed))]
fn whitney_check<'py>(
    py: Python<'py>,
    system: PyRef<'_, BranchSystem>,
    k: usize,
    eps: f64,
    levels: (usize, usize),
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = WhitneyOptions {
        levels: levels.0..=levels.1,
        sample_count: samples,
        seed,
        ..WhitneyOptions::default()
    };
    let r = whitney_fn(&system.inner, k, eps, &opts).py()?;
    let d = PyDict::new(py);
    d.set_item("exact_case", r.exact_case)?;
    d.set_item("passed", r.pass())?;
    let orders: Vec<(usize, f64, Option<f64>)> = r.orders.iter().map(|o| (o.l, o.target, o.exponent)).collect();
    d.set_item("orders", orders)?;
    Ok(d)
}

/// Variation bounds of the conjugacy between two trees of one scaling function.
#[pyfunction]
#[pyo3(signature = (first, second, k, refinement = 2, root_tolerance = None))]
fn conjugacy_smoothness<'py>(
    py: Python<'py>,
    first: PyRef<'_, IntervalTree>,
    second: PyRef<'_, IntervalTree>,
    k: usize,
    refinement: usize,
    root_tolerance: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut opts = ConjugacyOptions {
        refinement,
        ..ConjugacyOptions::default()
    };
    if let Some(t) = root_tolerance {
        opts.root_tolerance = t;
    }
    let last = first
        .inner
        .depth()
        .checked_sub(refinement)
        .filter(|&n| n >= 1)
        .ok_or_else(|| PyValueError::new_err(format!("tree depth must exceed refinement {refinement}")))?;
    let r = conjugacy_fn(&first.inner, &second.inner, k, 1..=last, &opts).py()?;
    let d = PyDict::new(py);
    d.set_item("exact", r.exact)?;
    d.set_item("levels", levels_list(py, &r.levels)?)?;
    match &r.fit {
        Some(f) => d.set_item("fit", fit_dict(py, f)?)?,
        None => d.set_item("fit", py.None())?,
    }
    Ok(d)
}

/// Seeded pairs agreeing on `2d` points, checked at orders `1..=k_max`.
#[pyfunction]
#[pyo3(signature = (seed = 0x5eed, d = 3, pairs = 50, k_max = 4, grid = 2001))]
fn lemma_suite<'py>(
    py: Python<'py>,
    seed: u64,
    d: usize,
    pairs: usize,
    k_max: usize,
    grid: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let (mut checks, mut fail_m, mut fail_2m) = (0usize, 0usize, 0usize);
    for pair in LemmaPair::suite(seed, d, pairs) {
        for k in 1..=k_max {
            let r = lemma_check(&pair, k, grid).py()?;
            checks += 1;
            fail_m += usize::from(!r.holds);
            fail_2m += usize::from(!r.holds_2m);
        }
    }
    let out = PyDict::new(py);
    out.set_item("checks", checks)?;
    out.set_item("failures_m", fail_m)?;
    out.set_item("failures_2m", fail_2m)?;
    Ok(out)
}

#[pymodule]
pub fn cantor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", cantor_scaling::VERSION)?;
    m.add("CantorError", m.py().get_type::<CantorError>())?;
    m.add_class::<BranchSystem>()?;
    m.add_class::<PrescribedScaling>()?;
    m.add_class::<IntervalTree>()?;
    m.add_function(wrap_pyfunction!(realize, m)?)?;
    m.add_function(wrap_pyfunction!(lcp_length, m)?)?;
    m.add_function(wrap_pyfunction!(rho_delta, m)?)?;
    m.add_function(wrap_pyfunction!(rho_s, m)?)?;
    m.add_function(wrap_pyfunction!(holder_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(smoothness_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(refutation_probe, m)?)?;
    m.add_function(wrap_pyfunction!(whitney_check, m)?)?;
    m.add_function(wrap_pyfunction!(conjugacy_smoothness, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_suite, m)?)?;
    Ok(())
}
