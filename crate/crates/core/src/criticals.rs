//! Operating points of the valve: transparency, blockade, spin isolation,
//! and maximal spin conversion, with feasibility over the `(g, lambda)` plane.
//!
//! Transparency and blockade are fixed by the roots and poles of the factored
//! combinations `X + Y` and `X - Y`, so each kind pins a value of `mu` that is
//! independent of `g`; `g` only decides whether the corresponding band energy
//! `omega = 2 Omega + sqrt(mu^2 g^2 + 4)` lands inside `[-2, 2]`.
//!
//! Kind naming follows the defining equations. The paper's main-text labels
//! map as: T1 <-> `TPlus` (root of X+Y, `mu = (3/2)(lambda+1)`), B1 <-> `BPlus`
//! (pole of X+Y, `mu = 2 lambda + 2`), T2 <-> `TMinus` (root of X-Y,
//! `mu = -(1/2)(lambda-3)(lambda+1)`), B2 <-> `BMinus` (pole of X-Y, `mu = 2`).
//! With `C_Y = -1` (condensate spin along `s_+`), branch 1 is transparent at
//! `TPlus` and blocked at `BPlus` while branch 3 is transparent at `TMinus`
//! and blocked at `BMinus`; `C_Y = +1` swaps the branch roles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::modes::SystemParams;
use crate::scattering::{factored_x_minus_y, factored_x_plus_y, mu_of_omega, s_matrix};

/// Operating-point kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    /// Root of `X + Y`: `mu = (3/2)(lambda + 1)`. Main-text alias T1.
    TPlus,
    /// Root of `X - Y`: `mu = -(1/2)(lambda - 3)(lambda + 1)`. Main-text alias T2.
    TMinus,
    /// Pole of `X + Y`: `mu = 2 lambda + 2`. Main-text alias B1.
    BPlus,
    /// Pole of `X - Y`: `mu = 2`. Main-text alias B2.
    BMinus,
    /// `TPlus` and `BMinus` coincide: `lambda = 1/3`, `mu = 2`.
    Isolation,
    /// `|S31| = 1/2` at `4 - omega^2 = g^2 (Y^2 - X^2)` with `C_Y = 0`.
    Conversion,
}

impl CriticalKind {
    pub fn label(&self) -> &'static str {
        match self {
            CriticalKind::TPlus => "t_plus",
            CriticalKind::TMinus => "t_minus",
            CriticalKind::BPlus => "b_plus",
            CriticalKind::BMinus => "b_minus",
            CriticalKind::Isolation => "isolation",
            CriticalKind::Conversion => "conversion",
        }
    }

    /// Main-text figure label, where one exists.
    pub fn paper_alias(&self) -> Option<&'static str> {
        match self {
            CriticalKind::TPlus => Some("T1"),
            CriticalKind::TMinus => Some("T2"),
            CriticalKind::BPlus => Some("B1"),
            CriticalKind::BMinus => Some("B2"),
            _ => None,
        }
    }

    pub fn all_mu_kinds() -> [CriticalKind; 4] {
        [
            CriticalKind::TPlus,
            CriticalKind::TMinus,
            CriticalKind::BPlus,
            CriticalKind::BMinus,
        ]
    }
}

impl std::str::FromStr for CriticalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t_plus" | "tplus" | "t1" => Ok(CriticalKind::TPlus),
            "t_minus" | "tminus" | "t2" => Ok(CriticalKind::TMinus),
            "b_plus" | "bplus" | "b1" => Ok(CriticalKind::BPlus),
            "b_minus" | "bminus" | "b2" => Ok(CriticalKind::BMinus),
            "isolation" => Ok(CriticalKind::Isolation),
            "conversion" => Ok(CriticalKind::Conversion),
            other => Err(Error::validation(format!("unknown critical kind '{other}'"))),
        }
    }
}

/// Spin configuration a kind requires of the condensate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpinRequirement {
    /// `C_Y = -1` or `+1` (`b = pi/2`, `eps = a -+ pi/2`).
    CY(f64),
    /// `tan(eps) = tan(a) sin(b)`, i.e. `C_Y = 0`.
    Perpendicular,
}

/// One evaluated operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub kind: CriticalKind,
    pub g: f64,
    pub lambda: f64,
    /// Defining `mu`; `None` for conversion points (defined in `omega` directly).
    pub mu: Option<f64>,
    /// Band energy; meaningful when `feasible`.
    pub omega: f64,
    /// True when `omega` lies inside `[-2, 2]` and `mu > 0`.
    pub feasible: bool,
    pub spin: SpinRequirement,
}

/// The defining `mu` for the four transparency/blockade kinds.
pub fn critical_mu(kind: CriticalKind, lambda: f64) -> Result<f64> {
    if !positive(lambda) {
        return Err(Error::validation(format!("lambda = {lambda} must be > 0")));
    }
    match kind {
        CriticalKind::TPlus => Ok(1.5 * (lambda + 1.0)),
        CriticalKind::TMinus => Ok(-0.5 * (lambda - 3.0) * (lambda + 1.0)),
        CriticalKind::BPlus => Ok(2.0 * lambda + 2.0),
        CriticalKind::BMinus => Ok(2.0),
        CriticalKind::Isolation | CriticalKind::Conversion => Err(Error::validation(format!(
            "{} has no single defining mu; use its dedicated constructor",
            kind.label()
        ))),
    }
}

/// Band energy for a given `mu`, with the in-band feasibility verdict.
pub fn mu_to_omega(mu: f64, g: f64, lambda: f64) -> (f64, bool) {
    let omega_loc = -((1.0 + lambda).powi(2) * g * g + 4.0).sqrt();
    let omega = 2.0 * omega_loc + (mu * mu * g * g + 4.0).sqrt();
    let feasible = mu > 0.0 && (-2.0..=2.0).contains(&omega);
    (omega, feasible)
}

/// Evaluate one transparency/blockade kind at `(g, lambda)`.
pub fn critical_point(kind: CriticalKind, g: f64, lambda: f64) -> Result<CriticalPoint> {
    if !positive(g) {
        return Err(Error::validation(format!("g = {g} must be > 0")));
    }
    let mu = critical_mu(kind, lambda)?;
    let (omega, mut feasible) = mu_to_omega(mu, g, lambda);
    if mu <= 0.0 {
        feasible = false;
    }
    Ok(CriticalPoint {
        kind,
        g,
        lambda,
        mu: Some(mu),
        omega,
        feasible,
        // canonical config: C_Y = -1 acts on branch 1 at the "+" kinds and on
        // branch 3 at the "-" kinds; C_Y = +1 swaps the roles
        spin: SpinRequirement::CY(-1.0),
    })
}

/// The perfect-isolation point: `lambda` pinned to 1/3 where `TPlus` and
/// `BMinus` coincide at `mu = 2`; one spin branch transmits fully while the
/// other reflects fully at the same energy.
pub fn isolation_point(g: f64) -> Result<CriticalPoint> {
    if !positive(g) {
        return Err(Error::validation(format!("g = {g} must be > 0")));
    }
    let lambda = 1.0 / 3.0;
    let (omega, feasible) = mu_to_omega(2.0, g, lambda);
    Ok(CriticalPoint {
        kind: CriticalKind::Isolation,
        g,
        lambda,
        mu: Some(2.0),
        omega,
        feasible,
        spin: SpinRequirement::CY(-1.0),
    })
}

/// The condensate spin angle enforcing `C_Y = 0` for given basis angles.
pub fn epsilon_perpendicular(a: f64, b: f64) -> f64 {
    (a.sin() * b.sin()).atan2(a.cos())
}

/// A solved maximal-conversion energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionRoot {
    pub omega: f64,
    /// `|S31|` evaluated at the root; 1/2 when genuine.
    pub s31_abs: f64,
    /// Residual of `4 - omega^2 - g^2 (Y^2 - X^2)` at the root.
    pub residual: f64,
}

/// All maximal-conversion energies for `(g, lambda)` with spin basis `(a, b)`.
///
/// Solves `F(omega) = 4 - omega^2 - g^2 (Y(mu)^2 - X(mu)^2) = 0` by bisection
/// on each pole-free sub-interval of the band (the in-band images of the
/// `mu = 2` and `mu = 2 + 2 lambda` poles partition it). An empty result means
/// `Y^2 <= X^2` throughout: no conversion maximum exists at these parameters.
pub fn conversion_point(g: f64, lambda: f64, a: f64, b: f64) -> Result<Vec<ConversionRoot>> {
    let eps = epsilon_perpendicular(a, b);
    let params = SystemParams {
        alpha: 0.0,
        gamma: 0.002,
        lambda,
        g,
        epsilon: eps,
        a,
        b,
    };
    params.validate()?;
    let omega_loc = params.omega_localized();

    // F via the factored forms: Y^2 - X^2 = -(X+Y)(X-Y)
    let f = |omega: f64| -> f64 {
        let mu = mu_of_omega(omega, omega_loc, g).expect("omega inside band");
        let p = factored_x_plus_y(mu, lambda);
        let q = factored_x_minus_y(mu, lambda);
        4.0 - omega * omega + g * g * p * q
    };

    // partition [-2, 2] at the in-band pole energies
    let margin = 1e-9;
    let mut cuts = vec![-2.0 + margin];
    for mu_pole in [2.0, 2.0 + 2.0 * lambda] {
        let (om, feasible) = mu_to_omega(mu_pole, g, lambda);
        if feasible {
            cuts.push(om);
        }
    }
    cuts.push(2.0 - margin);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0] + margin, w[1] - margin);
        if hi <= lo {
            continue;
        }
        // scan for sign changes inside the pole-free interval
        const SCAN: usize = 400;
        let step = (hi - lo) / SCAN as f64;
        let mut x0 = lo;
        let mut f0 = f(x0);
        for k in 1..=SCAN {
            let x1 = lo + step * k as f64;
            let f1 = f(x1);
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0 * f1 < 0.0 {
                roots.push(bisect(&f, x0, x1));
            }
            x0 = x1;
            f0 = f1;
        }
    }

    let mut out = Vec::new();
    for omega in roots {
        let s = s_matrix(omega, &params)?;
        out.push(ConversionRoot {
            omega,
            s31_abs: s.s31.norm(),
            residual: f(omega).abs(),
        });
    }
    Ok(out)
}

/// Bisection to floating-point interval exhaustion.
fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    0.5 * (lo + hi)
}

/// A conversion point packaged as a `CriticalPoint` (lowest-energy root).
pub fn conversion_critical_point(g: f64, lambda: f64, a: f64, b: f64) -> Result<CriticalPoint> {
    let roots = conversion_point(g, lambda, a, b)?;
    let root = roots.first().copied();
    Ok(CriticalPoint {
        kind: CriticalKind::Conversion,
        g,
        lambda,
        mu: None,
        omega: root.map_or(f64::NAN, |r| r.omega),
        feasible: root.is_some(),
        spin: SpinRequirement::Perpendicular,
    })
}

/// One row of a feasibility map.
pub type MapCell = CriticalPoint;

/// Evaluate `kind` over the grid `g_grid x lambda_grid`; cells are independent
/// and run in parallel. For `Isolation`, `lambda` is pinned to 1/3 and the
/// lambda grid is ignored (the map is the 1-D `omega(g)` curve).
pub fn feasibility_map(
    kind: CriticalKind,
    g_grid: &[f64],
    lambda_grid: &[f64],
    spin_basis: (f64, f64),
) -> Result<Vec<MapCell>> {
    let (a, b) = spin_basis;
    match kind {
        CriticalKind::Isolation => g_grid.par_iter().map(|&g| isolation_point(g)).collect(),
        CriticalKind::Conversion => {
            let mut jobs = Vec::new();
            for &g in g_grid {
                for &lambda in lambda_grid {
                    jobs.push((g, lambda));
                }
            }
            jobs.par_iter()
                .map(|&(g, lambda)| conversion_critical_point(g, lambda, a, b))
                .collect()
        }
        _ => {
            let mut jobs = Vec::new();
            for &g in g_grid {
                for &lambda in lambda_grid {
                    jobs.push((g, lambda));
                }
            }
            jobs.par_iter()
                .map(|&(g, lambda)| critical_point(kind, g, lambda))
                .collect()
        }
    }
}

/// Evenly spaced grid over `(lo, hi]`, excluding the open end at `lo`.
pub fn grid(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    (1..=cells)
        .map(|k| lo + (hi - lo) * k as f64 / cells as f64)
        .collect()
}
