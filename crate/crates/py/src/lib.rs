//! Python bindings: the main types and operations of the valve library.
//!
//! Build with `cargo build -p spinvalve-py --release`; the produced
//! `libspinvalve.so` imports as the module `spinvalve` (see
//! `python/smoke_test.py` for a loader that works straight from the target
//! directory).

use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use spinvalve_core::criticals;
use spinvalve_core::modes;
use spinvalve_core::oracle;
use spinvalve_core::scattering;
use spinvalve_core::simulator;
use spinvalve_core::spinor;
use spinvalve_core::{Branch, Error};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Validation(msg) => PyValueError::new_err(msg),
        Error::Infeasible(msg) => PyValueError::new_err(format!("infeasible: {msg}")),
        Error::Numerical(msg) => PyRuntimeError::new_err(msg),
    }
}

/// All tunables of the system plus the incident spin-basis angles.
#[pyclass(name = "SystemParams", skip_from_py_object)]
#[derive(Clone)]
struct PySystemParams {
    inner: modes::SystemParams,
}

#[pymethods]
impl PySystemParams {
    #[new]
    #[pyo3(signature = (g, lam, gamma=0.002, epsilon=0.0, alpha=std::f64::consts::PI/20.0, a=std::f64::consts::PI/4.0, b=std::f64::consts::PI/2.0))]
    fn new(g: f64, lam: f64, gamma: f64, epsilon: f64, alpha: f64, a: f64, b: f64) -> PyResult<Self> {
        let inner = modes::SystemParams {
            alpha,
            gamma,
            lambda: lam,
            g,
            epsilon,
            a,
            b,
        };
        inner.validate().map_err(to_py_err)?;
        Ok(PySystemParams { inner })
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.g
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }

    /// Eigenenergy of the localized mode, below the band.
    fn omega_localized(&self) -> f64 {
        self.inner.omega_localized()
    }

    /// Spin-alignment factor `C_Y`; 0 means spin-reciprocal transport.
    fn c_y(&self) -> f64 {
        self.inner.c_y()
    }

    fn localized_mode(&self) -> PyLocalizedMode {
        PyLocalizedMode {
            inner: modes::LocalizedMode::from_params(&self.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "SystemParams(g={}, lam={}, gamma={}, epsilon={}, alpha={}, a={}, b={})",
            self.inner.g,
            self.inner.lambda,
            self.inner.gamma,
            self.inner.epsilon,
            self.inner.alpha,
            self.inner.a,
            self.inner.b
        )
    }
}

/// The strong localized condensate with its derived quantities.
#[pyclass(name = "LocalizedMode")]
struct PyLocalizedMode {
    inner: modes::LocalizedMode,
}

#[pymethods]
impl PyLocalizedMode {
    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn n_atoms(&self) -> f64 {
        self.inner.n_atoms
    }

    /// Condensate spinor `(up, down)` at site `n`.
    fn site(&self, n: i64) -> (C64, C64) {
        let s = self.inner.site(n);
        (s.up, s.down)
    }

    /// Closed-form spin texture `(sx, sy, sz)` at site `n`.
    fn spin_texture(&self, n: i64) -> (f64, f64, f64) {
        let s = self.inner.spin_texture(n);
        (s.sx, s.sy, s.sz)
    }
}

/// Closed-form scattering amplitudes at one energy.
#[pyclass(name = "SMatrix")]
struct PySMatrix {
    inner: scattering::SMatrix,
}

#[pymethods]
impl PySMatrix {
    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn phi_tilde(&self) -> f64 {
        self.inner.phi_tilde
    }

    #[getter]
    fn c_y(&self) -> f64 {
        self.inner.c_y
    }

    #[getter]
    fn s11(&self) -> C64 {
        self.inner.s11
    }

    #[getter]
    fn s21(&self) -> C64 {
        self.inner.s21
    }

    #[getter]
    fn s31(&self) -> C64 {
        self.inner.s31
    }

    #[getter]
    fn s41(&self) -> C64 {
        self.inner.s41
    }

    #[getter]
    fn s13(&self) -> C64 {
        self.inner.s13
    }

    #[getter]
    fn s23(&self) -> C64 {
        self.inner.s23
    }

    #[getter]
    fn s33(&self) -> C64 {
        self.inner.s33
    }

    #[getter]
    fn s43(&self) -> C64 {
        self.inner.s43
    }

    /// Amplitude for outgoing branch `j_out` given incident branch `j_in`
    /// (right incidence resolved through the isotropy relations).
    fn amplitude(&self, j_out: u8, j_in: u8) -> PyResult<C64> {
        self.inner.amplitude(j_out, j_in).map_err(to_py_err)
    }

    /// Unitarity defect of the incident-branch-1 column.
    fn flux_residual(&self) -> f64 {
        scattering::flux_residual(&self.inner)
    }
}

/// Final spin-resolved fractions of a time-domain run.
#[pyclass(name = "SimSummary")]
struct PySimSummary {
    #[pyo3(get)]
    transmitted_plus: f64,
    #[pyo3(get)]
    transmitted_minus: f64,
    #[pyo3(get)]
    reflected_plus: f64,
    #[pyo3(get)]
    reflected_minus: f64,
    #[pyo3(get)]
    core: f64,
    #[pyo3(get)]
    condensate_fidelity: f64,
    #[pyo3(get)]
    norm_drift: f64,
    #[pyo3(get)]
    energy_drift: f64,
}

/// `R^n = exp(-i sigma_y n alpha)` as a nested tuple, row-major.
#[pyfunction]
fn rotation_matrix(alpha: f64, n: i64) -> ((C64, C64), (C64, C64)) {
    let r = spinor::rotation_matrix(alpha, n);
    ((r.a, r.b), (r.c, r.d))
}

/// Spin expectation `(sx, sy, sz)` of the spinor `(up, down)`.
#[pyfunction]
fn spin_expectation(up: C64, down: C64) -> (f64, f64, f64) {
    let s = spinor::spin_expectation(&spinor::Spinor::new(up, down));
    (s.sx, s.sy, s.sz)
}

/// The orthogonal spin pair `(l_plus, l_minus)` for basis angles `(a, b)`.
#[pyfunction]
fn spin_basis(a: f64, b: f64) -> PyResult<((C64, C64), (C64, C64))> {
    let angles = modes::SpinBasisAngles::new(a, b).map_err(to_py_err)?;
    let (lp, lm) = modes::spin_basis(angles);
    Ok(((lp.up, lp.down), (lm.up, lm.down)))
}

/// Transmission-mode spinor `(up, down)` of branch `j` at site `n`.
#[pyfunction]
fn transmission_mode(j: u8, phi: f64, a: f64, b: f64, alpha: f64, n: i64) -> PyResult<(C64, C64)> {
    let angles = modes::SpinBasisAngles::new(a, b).map_err(to_py_err)?;
    let branch = Branch::from_index(j).map_err(to_py_err)?;
    let mode = modes::TransmissionMode::new(branch, phi, angles, alpha).map_err(to_py_err)?;
    let s = mode.spinor_at(n);
    Ok((s.up, s.down))
}

/// Closed-form scattering matrix at band energy `omega`.
#[pyfunction]
fn s_matrix(omega: f64, params: &PySystemParams) -> PyResult<PySMatrix> {
    scattering::s_matrix(omega, &params.inner)
        .map(|inner| PySMatrix { inner })
        .map_err(to_py_err)
}

/// Independent numeric solve; returns `([S1j, S2j, S3j, S4j], (q_up, q_down))`.
#[pyfunction]
fn oracle_solve(omega: f64, params: &PySystemParams, j: u8) -> PyResult<(Vec<C64>, (C64, C64))> {
    let branch = Branch::from_index(j).map_err(to_py_err)?;
    let sol = oracle::solve_numeric(omega, &params.inner, branch).map_err(to_py_err)?;
    Ok((sol.s.to_vec(), (sol.q0.up, sol.q0.down)))
}

/// Max violation of the left/right isotropy identities at one energy.
#[pyfunction]
fn isotropy_check(omega: f64, params: &PySystemParams) -> PyResult<f64> {
    oracle::isotropy_check(omega, &params.inner).map_err(to_py_err)
}

/// Defining `mu` of a transparency/blockade kind
/// (`"t_plus" | "t_minus" | "b_plus" | "b_minus"`, aliases `T1, T2, B1, B2`).
#[pyfunction]
fn critical_mu(kind: &str, lam: f64) -> PyResult<f64> {
    let kind: criticals::CriticalKind = kind.parse().map_err(to_py_err)?;
    criticals::critical_mu(kind, lam).map_err(to_py_err)
}

/// Band energy for a given `mu`, with the feasibility verdict.
#[pyfunction]
fn mu_to_omega(mu: f64, g: f64, lam: f64) -> (f64, bool) {
    criticals::mu_to_omega(mu, g, lam)
}

/// The perfect-isolation operating point at localization grade `g`:
/// `(lam, mu, omega, feasible)`.
#[pyfunction]
fn isolation_point(g: f64) -> PyResult<(f64, f64, f64, bool)> {
    let pt = criticals::isolation_point(g).map_err(to_py_err)?;
    Ok((pt.lambda, pt.mu.unwrap_or(f64::NAN), pt.omega, pt.feasible))
}

/// Maximal-conversion energies: list of `(omega, abs_s31, residual)`.
#[pyfunction]
fn conversion_roots(g: f64, lam: f64, a: f64, b: f64) -> PyResult<Vec<(f64, f64, f64)>> {
    let roots = criticals::conversion_point(g, lam, a, b).map_err(to_py_err)?;
    Ok(roots.iter().map(|r| (r.omega, r.s31_abs, r.residual)).collect())
}

/// Condensate spin angle enforcing spin-reciprocal transport (`C_Y = 0`).
#[pyfunction]
fn epsilon_perpendicular(a: f64, b: f64) -> f64 {
    criticals::epsilon_perpendicular(a, b)
}

/// Nonlinear time-domain run; returns the final population split.
#[pyfunction]
#[pyo3(signature = (params, omega, branch=1, s0=None, s_p=0.002, n0=-150, window=(-400, 400), dt=0.005, t_final=600.0))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    params: &PySystemParams,
    omega: f64,
    branch: u8,
    s0: Option<f64>,
    s_p: f64,
    n0: i64,
    window: (i64, i64),
    dt: f64,
    t_final: f64,
) -> PyResult<PySimSummary> {
    let packet = simulator::WavepacketSpec {
        s0: s0.unwrap_or_else(|| 0.01 * (params.inner.g / params.inner.gamma).sqrt()),
        s_p,
        n0,
        branch: Branch::from_index(branch).map_err(to_py_err)?,
        omega,
    };
    let (mut state, _report) =
        simulator::init_state(&params.inner, &packet, window).map_err(to_py_err)?;
    let config = simulator::EvolveConfig {
        dt,
        t_final,
        record_every: t_final,
        ..simulator::EvolveConfig::default()
    };
    let result =
        simulator::evolve(&mut state, &params.inner, &packet, &config).map_err(to_py_err)?;
    let split = result.final_split;
    Ok(PySimSummary {
        transmitted_plus: split.transmitted_plus,
        transmitted_minus: split.transmitted_minus,
        reflected_plus: split.reflected_plus,
        reflected_minus: split.reflected_minus,
        core: split.core,
        condensate_fidelity: split.condensate_fidelity,
        norm_drift: result.norm_drift,
        energy_drift: result.energy_drift,
    })
}

#[pymodule]
fn spinvalve(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyLocalizedMode>()?;
    m.add_class::<PySMatrix>()?;
    m.add_class::<PySimSummary>()?;
    m.add_function(wrap_pyfunction!(rotation_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(spin_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(spin_basis, m)?)?;
    m.add_function(wrap_pyfunction!(transmission_mode, m)?)?;
    m.add_function(wrap_pyfunction!(s_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_solve, m)?)?;
    m.add_function(wrap_pyfunction!(isotropy_check, m)?)?;
    m.add_function(wrap_pyfunction!(critical_mu, m)?)?;
    m.add_function(wrap_pyfunction!(mu_to_omega, m)?)?;
    m.add_function(wrap_pyfunction!(isolation_point, m)?)?;
    m.add_function(wrap_pyfunction!(conversion_roots, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_perpendicular, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
