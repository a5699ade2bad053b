//! Free transmission modes and the strong localized condensate mode.
//!
//! Transmission modes are the four degenerate plane-wave branches
//! `l_n = e^{+-i n phi} R^n l_+-` with dispersion `omega = -2 cos(phi)`.
//! The localized mode is the self-trapped stationary state
//! `d_n = sqrt(g/gamma) kappa^{|n|} R^n (e^{i eps}, 1)^T` with eigenenergy
//! `Omega = -sqrt((1+lambda)^2 g^2 + 4)` below the band.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::spinor::{rotation_matrix, SpinVector, Spinor};

/// Spin-basis angles `(a, b)` parametrizing `l_+ = cos(a/2) u_+ + e^{ib} sin(a/2) u_-`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinBasisAngles {
    a: f64,
    b: f64,
}

impl SpinBasisAngles {
    /// Both angles must lie in `[0, pi]`.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&a) || !a.is_finite() {
            return Err(Error::validation(format!("spin angle a = {a} outside [0, pi]")));
        }
        if !(0.0..=PI).contains(&b) || !b.is_finite() {
            return Err(Error::validation(format!("spin angle b = {b} outside [0, pi]")));
        }
        Ok(SpinBasisAngles { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// The orthogonal spin pair `(l_+, l_-)`; each has squared norm 2.
pub fn spin_basis(angles: SpinBasisAngles) -> (Spinor, Spinor) {
    let (a, b) = (angles.a, angles.b);
    let (up, um) = (Spinor::u_plus(), Spinor::u_minus());
    let cos_half = C64::new((a / 2.0).cos(), 0.0);
    let sin_half = C64::new((a / 2.0).sin(), 0.0);
    let phase = C64::from_polar(1.0, b);
    let l_plus = cos_half * up + (phase * sin_half) * um;
    let l_minus = -(phase.conj() * sin_half) * up + cos_half * um;
    (l_plus, l_minus)
}

/// One of the four degenerate transmission branches at a given energy.
///
/// Branches 1 and 3 move right (group velocity `+2 sin phi`), 2 and 4 move
/// left; 1 and 2 carry spin `l_+`, 3 and 4 carry `l_-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    B1 = 1,
    B2 = 2,
    B3 = 3,
    B4 = 4,
}

impl Branch {
    pub fn from_index(j: u8) -> Result<Branch> {
        match j {
            1 => Ok(Branch::B1),
            2 => Ok(Branch::B2),
            3 => Ok(Branch::B3),
            4 => Ok(Branch::B4),
            other => Err(Error::validation(format!("invalid branch index {other} (expected 1..=4)"))),
        }
    }

    pub fn index(&self) -> u8 {
        *self as u8
    }

    /// +1 for right-movers (1, 3), -1 for left-movers (2, 4).
    pub fn direction(&self) -> i8 {
        match self {
            Branch::B1 | Branch::B3 => 1,
            Branch::B2 | Branch::B4 => -1,
        }
    }

    /// True for the `l_+` spin branches (1, 2).
    pub fn is_plus_spin(&self) -> bool {
        matches!(self, Branch::B1 | Branch::B2)
    }
}

/// A transmission mode `l_n^{(j)}` pinned to one branch and quasimomentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionMode {
    pub branch: Branch,
    /// Quasimomentum in `[0, pi]`.
    pub phi: f64,
    /// Band energy `-2 cos(phi)`.
    pub omega: f64,
    pub angles: SpinBasisAngles,
    pub alpha: f64,
}

impl TransmissionMode {
    pub fn new(branch: Branch, phi: f64, angles: SpinBasisAngles, alpha: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&phi) || !phi.is_finite() {
            return Err(Error::validation(format!("quasimomentum phi = {phi} outside [0, pi]")));
        }
        Ok(TransmissionMode {
            branch,
            phi,
            omega: -2.0 * phi.cos(),
            angles,
            alpha,
        })
    }

    /// Entry point by band energy; uses the principal branch `phi = arccos(-omega/2)`.
    pub fn from_omega(branch: Branch, omega: f64, angles: SpinBasisAngles, alpha: f64) -> Result<Self> {
        if !(-2.0..=2.0).contains(&omega) || !omega.is_finite() {
            return Err(Error::validation(format!("energy omega = {omega} outside the band [-2, 2]")));
        }
        Self::new(branch, (-omega / 2.0).acos(), angles, alpha)
    }

    pub fn group_velocity(&self) -> f64 {
        2.0 * self.phi.sin() * self.branch.direction() as f64
    }

    /// Mode amplitude `e^{+-i n phi} R^n l_+-` at site `n`.
    pub fn spinor_at(&self, n: i64) -> Spinor {
        transmission_mode(self.branch, self.phi, self.angles, self.alpha, n)
    }
}

/// `l_n^{(j)}` at site `n` for branch `j`.
pub fn transmission_mode(
    branch: Branch,
    phi: f64,
    angles: SpinBasisAngles,
    alpha: f64,
    n: i64,
) -> Spinor {
    let (l_plus, l_minus) = spin_basis(angles);
    let spin = if branch.is_plus_spin() { l_plus } else { l_minus };
    let phase = C64::from_polar(1.0, branch.direction() as f64 * n as f64 * phi);
    phase * (rotation_matrix(alpha, n) * spin)
}

/// Closed-form spin texture of the transmission modes,
/// `s_{+-,n} = +-2 [sin a sin(b + 2 n alpha), cos a, sin a cos(b + 2 n alpha)]`.
pub fn transmission_spin_texture(
    plus: bool,
    n: i64,
    angles: SpinBasisAngles,
    alpha: f64,
) -> SpinVector {
    let (a, b) = (angles.a(), angles.b());
    let arg = b + 2.0 * n as f64 * alpha;
    let sign = if plus { 2.0 } else { -2.0 };
    SpinVector::new(
        sign * a.sin() * arg.sin(),
        sign * a.cos(),
        sign * a.sin() * arg.cos(),
    )
}

/// All tunables of the system plus the spin-basis angles of the incident wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Spin-orbit coupling angle per hop; texture rotation period is `pi/alpha` sites.
    pub alpha: f64,
    /// Intraspecies interaction strength (attractive, `0 < gamma << 1`).
    pub gamma: f64,
    /// Interspecies / intraspecies interaction ratio (`> 0`).
    pub lambda: f64,
    /// Localization grade (`> 0`).
    pub g: f64,
    /// Condensate spin angle in `[0, 2 pi)`.
    pub epsilon: f64,
    /// Incident-wave spin-basis angle `a` in `[0, pi]`.
    pub a: f64,
    /// Incident-wave spin-basis angle `b` in `[0, pi]`.
    pub b: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        if !positive(self.g) {
            return Err(Error::validation(format!("localization grade g = {} must be > 0", self.g)));
        }
        if !positive(self.lambda) {
            return Err(Error::validation(format!("interaction ratio lambda = {} must be > 0", self.lambda)));
        }
        if !positive(self.gamma) {
            return Err(Error::validation(format!("interaction strength gamma = {} must be > 0", self.gamma)));
        }
        if !self.epsilon.is_finite() || !self.alpha.is_finite() {
            return Err(Error::validation("epsilon and alpha must be finite".to_string()));
        }
        self.spin_angles()?;
        Ok(())
    }

    pub fn spin_angles(&self) -> Result<SpinBasisAngles> {
        SpinBasisAngles::new(self.a, self.b)
    }

    /// Localized-mode eigenenergy `Omega = -sqrt((1+lambda)^2 g^2 + 4)`.
    pub fn omega_localized(&self) -> f64 {
        -((1.0 + self.lambda).powi(2) * self.g * self.g + 4.0).sqrt()
    }

    /// `C_Y = sin(eps) cos(a) - cos(eps) sin(a) sin(b)`; zero iff spin-reciprocal.
    pub fn c_y(&self) -> f64 {
        self.epsilon.sin() * self.a.cos() - self.epsilon.cos() * self.a.sin() * self.b.sin()
    }
}

/// The strong localized condensate `d_n` with its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizedMode {
    pub g: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub alpha: f64,
    /// Eigenenergy below the band (`< -2`).
    pub omega: f64,
    /// Spatial decay factor in `(0, 1)`.
    pub kappa: f64,
    /// Total atom number `-2 Omega / ((1+lambda) gamma)`.
    pub n_atoms: f64,
}

impl LocalizedMode {
    pub fn new(g: f64, lambda: f64, gamma: f64, epsilon: f64, alpha: f64) -> Result<Self> {
        let params = SystemParams {
            alpha,
            gamma,
            lambda,
            g,
            epsilon,
            a: 0.0,
            b: 0.0,
        };
        params.validate()?;
        Ok(Self::from_params(&params))
    }

    pub fn from_params(params: &SystemParams) -> Self {
        let omega = params.omega_localized();
        let kappa = (-omega - (omega * omega - 4.0).sqrt()) / 2.0;
        LocalizedMode {
            g: params.g,
            lambda: params.lambda,
            gamma: params.gamma,
            epsilon: params.epsilon,
            alpha: params.alpha,
            omega,
            kappa,
            n_atoms: -2.0 * omega / ((1.0 + params.lambda) * params.gamma),
        }
    }

    /// True when `gamma (1 + lambda) >= 0.1`, where the mean-field premise
    /// `gamma, lambda gamma << 1` starts to strain.
    pub fn interaction_strength_suspect(&self) -> bool {
        self.gamma * (1.0 + self.lambda) >= 0.1
    }

    /// Peak amplitude `sqrt(g/gamma)`.
    pub fn peak_amplitude(&self) -> f64 {
        (self.g / self.gamma).sqrt()
    }

    /// Condensate amplitude `d_n = sqrt(g/gamma) kappa^{|n|} R^n (e^{i eps}, 1)^T`.
    pub fn site(&self, n: i64) -> Spinor {
        let spin = Spinor::new(C64::from_polar(1.0, self.epsilon), C64::new(1.0, 0.0));
        let decay = self.decay_factor(n);
        C64::new(self.peak_amplitude() * decay, 0.0) * (rotation_matrix(self.alpha, n) * spin)
    }

    /// `kappa^{|n|}`, in the log domain for deep tails to dodge underflow.
    fn decay_factor(&self, n: i64) -> f64 {
        let an = n.unsigned_abs() as f64;
        if n.unsigned_abs() > 500 {
            (an * self.kappa.ln()).exp()
        } else {
            self.kappa.powf(an)
        }
    }

    /// Closed-form spin texture
    /// `s_{eps,n} = 2 (g/gamma) kappa^{2|n|} [cos eps cos(2 n alpha), -sin eps, -cos eps sin(2 n alpha)]`.
    pub fn spin_texture(&self, n: i64) -> SpinVector {
        localized_spin_texture(n, self.g, self.gamma, self.kappa, self.epsilon, self.alpha)
    }

    /// Residual of the stationary equation at site `n`; zero for the exact mode.
    pub fn stationarity_residual(&self, n: i64) -> f64 {
        let r = rotation_matrix(self.alpha, 1);
        let mut rhs = -(r * self.site(n - 1)) - (r.dagger() * self.site(n + 1));
        if n == 0 {
            let d0 = self.site(0);
            let dens_up = d0.up.norm_sqr();
            let dens_dn = d0.down.norm_sqr();
            rhs = rhs
                - Spinor::new(
                    C64::new(self.gamma * (dens_up + self.lambda * dens_dn), 0.0) * d0.up,
                    C64::new(self.gamma * (dens_dn + self.lambda * dens_up), 0.0) * d0.down,
                );
        }
        (rhs - C64::new(self.omega, 0.0) * self.site(n)).norm_sqr().sqrt()
    }
}

/// Closed-form localized-mode texture with `Omega`-independent inputs, for
/// plotting the texture at a quoted `kappa` without asserting `Omega(g, lambda)`.
pub fn localized_spin_texture(
    n: i64,
    g: f64,
    gamma: f64,
    kappa: f64,
    epsilon: f64,
    alpha: f64,
) -> SpinVector {
    let weight = 2.0 * (g / gamma) * kappa.powi(2 * n.unsigned_abs() as i32);
    let arg = 2.0 * n as f64 * alpha;
    SpinVector::new(
        weight * epsilon.cos() * arg.cos(),
        -weight * epsilon.sin(),
        -weight * epsilon.cos() * arg.sin(),
    )
}

/// Residual of the free lattice equation `omega l_n + R l_{n-1} + R^dag l_{n+1}`
/// for a transmission mode; zero when the dispersion holds.
pub fn free_equation_residual(mode: &TransmissionMode, n: i64) -> f64 {
    let r = rotation_matrix(mode.alpha, 1);
    let lhs = C64::new(mode.omega, 0.0) * mode.spinor_at(n)
        + r * mode.spinor_at(n - 1)
        + r.dagger() * mode.spinor_at(n + 1);
    lhs.norm_sqr().sqrt()
}
