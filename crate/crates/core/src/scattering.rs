//! Closed-form scattering matrix of the linearized transport problem.
//!
//! For an incident transmission mode at band energy `omega`, the eight
//! amplitudes `S_{j'j}` (left incidence, `j = 1, 3`) follow from the
//! intermediate parameters `X(mu)`, `Y(mu)` with
//! `mu = sqrt((2 Omega - omega)^2 - 4) / g`. The amplitudes stay finite at
//! the poles of `X` and `Y` (`mu = 2` and `mu = 2 + 2 lambda`); evaluation
//! here goes through the factored combinations `P = X + Y`, `Q = X - Y`
//! so those limits come out exact rather than as 0/0 noise.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::modes::SystemParams;

/// Half-width of the `mu` window around each pole inside which the limiting
/// form is used instead of the raw quotient.
const POLE_WINDOW: f64 = 1e-9;

/// `mu = sqrt((2 Omega - omega)^2 - 4) / g` for band energy `omega`.
///
/// `omega_localized < -2` guarantees the radicand is positive; `mu` is
/// strictly increasing in `omega` over the band.
pub fn mu_of_omega(omega: f64, omega_localized: f64, g: f64) -> Result<f64> {
    if !(-2.0..=2.0).contains(&omega) || !omega.is_finite() {
        return Err(Error::validation(format!(
            "energy omega = {omega} outside the band [-2, 2]"
        )));
    }
    let nu = 2.0 * omega_localized - omega;
    Ok((nu * nu - 4.0).sqrt() / g)
}

/// Which pole (if either) a given `mu` sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleFlag {
    None,
    /// `mu = 2 + 2 lambda`, the pole of `X + Y`.
    PlusPole,
    /// `mu = 2`, the pole of `X - Y`.
    MinusPole,
}

/// The supplement's intermediate parameters and their factored combinations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XYIntermediates {
    pub mu: f64,
    pub x: f64,
    pub y: f64,
    /// `X + Y = (lambda+1)(2 mu - 3 lambda - 3) / (mu - 2 lambda - 2)`.
    pub x_plus_y: f64,
    /// `X - Y = (2 mu + lambda^2 - 2 lambda - 3) / (mu - 2)`.
    pub x_minus_y: f64,
    pub pole: PoleFlag,
}

/// Evaluate `X`, `Y` at the given `mu`; errors exactly on a pole.
pub fn xy(mu: f64, lambda: f64) -> Result<XYIntermediates> {
    if !positive(mu) {
        return Err(Error::validation(format!("mu = {mu} must be > 0")));
    }
    if !positive(lambda) {
        return Err(Error::validation(format!("lambda = {lambda} must be > 0")));
    }
    let pole = pole_flag(mu, lambda);
    if pole != PoleFlag::None {
        return Err(Error::numerical(format!(
            "X, Y diverge at mu = {mu} (pole at mu = {}); use the S-matrix limit forms",
            if pole == PoleFlag::PlusPole { 2.0 + 2.0 * lambda } else { 2.0 }
        )));
    }
    let denom = (mu - 2.0) * (mu - 2.0 - 2.0 * lambda);
    let x = (2.0 + lambda) + ((lambda * lambda + 1.0) * mu - lambda.powi(3) - lambda - 2.0) / denom;
    let y = lambda * (1.0 + (2.0 * mu + lambda * lambda - 2.0 * lambda - 3.0) / denom);
    let x_plus_y = factored_x_plus_y(mu, lambda);
    let x_minus_y = factored_x_minus_y(mu, lambda);
    let scale = x.abs().max(y.abs()).max(1.0);
    if ((x + y) - x_plus_y).abs() > 1e-10 * scale || ((x - y) - x_minus_y).abs() > 1e-10 * scale {
        return Err(Error::numerical(format!(
            "raw and factored X, Y disagree at mu = {mu}, lambda = {lambda}"
        )));
    }
    Ok(XYIntermediates {
        mu,
        x,
        y,
        x_plus_y,
        x_minus_y,
        pole,
    })
}

pub fn pole_flag(mu: f64, lambda: f64) -> PoleFlag {
    if (mu - (2.0 + 2.0 * lambda)).abs() < POLE_WINDOW {
        PoleFlag::PlusPole
    } else if (mu - 2.0).abs() < POLE_WINDOW {
        PoleFlag::MinusPole
    } else {
        PoleFlag::None
    }
}

pub fn factored_x_plus_y(mu: f64, lambda: f64) -> f64 {
    (lambda + 1.0) * (2.0 * mu - 3.0 * lambda - 3.0) / (mu - 2.0 * lambda - 2.0)
}

pub fn factored_x_minus_y(mu: f64, lambda: f64) -> f64 {
    (2.0 * mu + lambda * lambda - 2.0 * lambda - 3.0) / (mu - 2.0)
}

/// The eight left-incidence scattering amplitudes at one energy, plus the
/// intermediates they came from. Right-incidence values follow from isotropy
/// via the accessor methods (`s12`, `s22`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SMatrix {
    pub omega: f64,
    /// `2 sin(phi) / g`, with the principal `phi in [0, pi]`, so always `>= 0`.
    pub phi_tilde: f64,
    pub mu: f64,
    pub x: f64,
    pub y: f64,
    pub c_y: f64,
    pub c_eps: C64,
    pub s11: C64,
    pub s21: C64,
    pub s31: C64,
    pub s41: C64,
    pub s13: C64,
    pub s23: C64,
    pub s33: C64,
    pub s43: C64,
}

impl SMatrix {
    /// Outgoing flux of the `j = 1` column; 1 when unitary.
    pub fn column1_flux(&self) -> f64 {
        self.s11.norm_sqr() + self.s21.norm_sqr() + self.s31.norm_sqr() + self.s41.norm_sqr()
    }

    /// Outgoing flux of the `j = 3` column.
    pub fn column3_flux(&self) -> f64 {
        self.s13.norm_sqr() + self.s23.norm_sqr() + self.s33.norm_sqr() + self.s43.norm_sqr()
    }

    // Right-incidence aliases from the isotropy relation S_{j'j} = P12 P34 S_{j'j}.
    pub fn s12(&self) -> C64 {
        self.s21
    }
    pub fn s22(&self) -> C64 {
        self.s11
    }
    pub fn s32(&self) -> C64 {
        self.s41
    }
    pub fn s42(&self) -> C64 {
        self.s31
    }
    pub fn s14(&self) -> C64 {
        self.s23
    }
    pub fn s24(&self) -> C64 {
        self.s13
    }
    pub fn s34(&self) -> C64 {
        self.s43
    }
    pub fn s44(&self) -> C64 {
        self.s33
    }

    /// Amplitude for outgoing branch `j_out` given incident branch `j_in`.
    pub fn amplitude(&self, j_out: u8, j_in: u8) -> Result<C64> {
        Ok(match (j_out, j_in) {
            (1, 1) => self.s11,
            (2, 1) => self.s21,
            (3, 1) => self.s31,
            (4, 1) => self.s41,
            (1, 3) => self.s13,
            (2, 3) => self.s23,
            (3, 3) => self.s33,
            (4, 3) => self.s43,
            (1, 2) => self.s12(),
            (2, 2) => self.s22(),
            (3, 2) => self.s32(),
            (4, 2) => self.s42(),
            (1, 4) => self.s14(),
            (2, 4) => self.s24(),
            (3, 4) => self.s34(),
            (4, 4) => self.s44(),
            _ => {
                return Err(Error::validation(format!(
                    "invalid branch pair ({j_out}, {j_in})"
                )))
            }
        })
    }
}

/// Closed-form scattering matrix at band energy `omega`.
///
/// At `omega = +-2` the transmission channel closes (`phi_tilde = 0`) and the
/// degenerate full-reflection values are returned.
pub fn s_matrix(omega: f64, params: &SystemParams) -> Result<SMatrix> {
    params.validate()?;
    let omega_loc = params.omega_localized();
    let mu = mu_of_omega(omega, omega_loc, params.g)?;
    let lambda = params.lambda;
    let phi_tilde = (4.0 - omega * omega).max(0.0).sqrt() / params.g;

    // P = X+Y and Q = X-Y enter only through A = 1/(i pt + P) and PA = P A;
    // at a pole the pair (A, PA) has the exact limit (0, 1).
    let ipt = C64::new(0.0, phi_tilde);
    let pole = pole_flag(mu, lambda);
    let (pa, a) = match pole {
        PoleFlag::PlusPole => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        _ => {
            let p = factored_x_plus_y(mu, lambda);
            let inv = C64::new(1.0, 0.0) / (ipt + p);
            (p * inv, inv)
        }
    };
    let (qb, b) = match pole {
        PoleFlag::MinusPole => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        _ => {
            let q = factored_x_minus_y(mu, lambda);
            let inv = C64::new(1.0, 0.0) / (ipt + q);
            (q * inv, inv)
        }
    };

    let (a_ang, b_ang, eps) = (params.a, params.b, params.epsilon);
    let c_y = params.c_y();
    let c_eps = C64::new((a_ang / 2.0).cos().powi(2), 0.0)
        + C64::from_polar(1.0, 2.0 * b_ang) * (a_ang / 2.0).sin().powi(2);
    // M and its j=3 counterpart; |M|^2 = 1 - C_Y^2
    let m_plus = C64::new(0.0, 1.0) * C64::from_polar(1.0, b_ang) * (a_ang.sin() * eps.sin())
        - c_eps * eps.cos();
    let m_minus = C64::new(0.0, 1.0) * C64::from_polar(1.0, -b_ang) * (a_ang.sin() * eps.sin())
        + c_eps.conj() * eps.cos();

    // S11 = i pt (i pt + X + Y C_Y) / ((i pt + P)(i pt + Q)), rearranged so each
    // factor stays finite at the poles.
    let half_plus = 0.5 * (1.0 + c_y);
    let half_minus = 0.5 * (1.0 - c_y);
    let s11 = ipt * (half_plus * pa * b + half_minus * qb * a + ipt * a * b);
    let s33 = ipt * (half_minus * pa * b + half_plus * qb * a + ipt * a * b);
    // i Y = i (P - Q)/2 -> i/2 (PA * B - QB * A) after factoring
    let cross = C64::new(0.0, 0.5) * (pa * b - qb * a);
    let s31 = ipt * cross * m_plus;
    let s13 = ipt * cross * m_minus;

    let (x, y) = match pole {
        PoleFlag::None => {
            let p = factored_x_plus_y(mu, lambda);
            let q = factored_x_minus_y(mu, lambda);
            (0.5 * (p + q), 0.5 * (p - q))
        }
        // at a pole both diverge; keep the finite combination and flag with infinities
        PoleFlag::PlusPole => (f64::INFINITY, f64::INFINITY),
        PoleFlag::MinusPole => (f64::INFINITY, f64::NEG_INFINITY),
    };

    Ok(SMatrix {
        omega,
        phi_tilde,
        mu,
        x,
        y,
        c_y,
        c_eps,
        s11,
        s21: s11 - 1.0,
        s31,
        s41: s31,
        s13,
        s23: s13,
        s33,
        s43: s33 - 1.0,
    })
}

/// `| |S11|^2 + |S21|^2 + |S31|^2 + |S41|^2 - 1 |`, the unitarity defect of
/// the incident-branch-1 column.
pub fn flux_residual(s: &SMatrix) -> f64 {
    (s.column1_flux() - 1.0).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn params(g: f64, lambda: f64, epsilon: f64, a: f64, b: f64) -> SystemParams {
        SystemParams {
            alpha: PI / 20.0,
            gamma: 0.002,
            lambda,
            g,
            epsilon,
            a,
            b,
        }
    }

    #[test]
    fn mu_round_trip_and_reference_value() {
        // g = 0.9, lambda = 0.025: Omega = -2.2025; omega at mu = 1.5375
        let p = params(0.9, 0.025, 0.0, PI / 4.0, PI / 2.0);
        let omega_loc = p.omega_localized();
        assert!((omega_loc + 2.2025).abs() < 1e-12);
        let mu = 1.5375;
        let omega = 2.0 * omega_loc + (mu * mu * p.g * p.g + 4.0).sqrt();
        assert!((omega + 1.972971).abs() < 5e-7);
        let back = mu_of_omega(omega, omega_loc, p.g).unwrap();
        assert!((back - mu).abs() < 1e-12);
        // inversion identity omega = 2 Omega + sqrt(mu^2 g^2 + 4)
        let om2 = 2.0 * omega_loc + (back * back * p.g * p.g + 4.0).sqrt();
        assert!((om2 - omega).abs() < 1e-12);
    }

    #[test]
    fn mu_is_strictly_increasing_in_omega() {
        let p = params(0.9, 0.025, 0.0, PI / 4.0, PI / 2.0);
        let omega_loc = p.omega_localized();
        let mut prev = mu_of_omega(-2.0, omega_loc, p.g).unwrap();
        for k in 1..=1000 {
            let omega = -2.0 + 4.0 * k as f64 / 1000.0;
            let mu = mu_of_omega(omega, omega_loc, p.g).unwrap();
            assert!(mu > prev, "mu not increasing at omega = {omega}");
            prev = mu;
        }
    }

    #[test]
    fn mu_rejects_out_of_band() {
        assert!(mu_of_omega(2.5, -2.2025, 0.9).is_err());
        assert!(mu_of_omega(-2.0001, -2.2025, 0.9).is_err());
    }

    #[test]
    fn xy_reference_points() {
        // Y vanishes as lambda -> 0
        let tiny = xy(1.3, 1e-12).unwrap();
        assert!(tiny.y.abs() < 1e-11);
        // X+Y root at mu = (3/2)(lambda+1)
        let lambda = 0.37;
        let root = xy(1.5 * (lambda + 1.0), lambda).unwrap();
        assert!(root.x_plus_y.abs() < 1e-13);
        // X-Y root at mu = -(1/2)(lambda-3)(lambda+1)
        let root2 = xy(-0.5 * (lambda - 3.0) * (lambda + 1.0), lambda).unwrap();
        assert!(root2.x_minus_y.abs() < 1e-13);
        // raw and factored forms agree away from poles
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let lambda = rng.random_range(0.02..2.0);
            let mu = rng.random_range(0.05..6.0);
            match xy(mu, lambda) {
                Ok(v) => {
                    assert!((v.x + v.y - v.x_plus_y).abs() < 1e-9 * (1.0 + v.x.abs()));
                }
                Err(Error::Numerical(_)) => {} // landed in a pole window
                Err(e) => panic!("unexpected {e}"),
            }
        }
    }

    #[test]
    fn xy_errors_at_poles() {
        assert!(matches!(xy(2.0, 0.5), Err(Error::Numerical(_))));
        assert!(matches!(xy(3.0, 0.5), Err(Error::Numerical(_))));
        assert!(matches!(xy(-1.0, 0.5), Err(Error::Validation(_))));
    }

    #[test]
    fn structural_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = params(
                rng.random_range(0.2..1.2),
                rng.random_range(0.02..2.0),
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.0..PI),
                rng.random_range(0.0..PI),
            );
            let omega = rng.random_range(-1.99..1.99);
            let s = s_matrix(omega, &p).unwrap();
            assert_eq!(s.s21, s.s11 - 1.0);
            assert_eq!(s.s43, s.s33 - 1.0);
            assert_eq!(s.s31, s.s41);
            assert_eq!(s.s13, s.s23);
            assert!((s.s31.norm() - s.s13.norm()).abs() < 1e-12);
            assert!(flux_residual(&s) < 1e-10);
            assert!((s.column3_flux() - 1.0).abs() < 1e-10);
            assert!(s.s31.norm() <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn m_identity_ties_conversion_to_c_y() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let a: f64 = rng.random_range(0.0..PI);
            let b: f64 = rng.random_range(0.0..PI);
            let eps: f64 = rng.random_range(0.0..2.0 * PI);
            let c_y = eps.sin() * a.cos() - eps.cos() * a.sin() * b.sin();
            let c_eps = C64::new((a / 2.0).cos().powi(2), 0.0)
                + C64::from_polar(1.0, 2.0 * b) * (a / 2.0).sin().powi(2);
            let m = C64::new(0.0, 1.0) * C64::from_polar(1.0, b) * (a.sin() * eps.sin())
                - c_eps * eps.cos();
            assert!((m.norm_sqr() + c_y * c_y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn transparency_at_x_plus_y_root() {
        // C_Y = -1 via b = pi/2, eps = a - pi/2; mu at the X+Y root
        let a = PI / 4.0;
        let p = params(0.9, 0.025, a - PI / 2.0, a, PI / 2.0);
        assert!((p.c_y() + 1.0).abs() < 1e-15);
        let mu_t = 1.5 * (1.0 + p.lambda);
        let omega = 2.0 * p.omega_localized() + (mu_t * mu_t * p.g * p.g + 4.0).sqrt();
        let s = s_matrix(omega, &p).unwrap();
        assert!((s.s11 - 1.0).norm() < 1e-10, "S11 = {:?}", s.s11);
        assert!(s.s31.norm() < 1e-13);
        // spin-nonreciprocal: the opposite branch is not transparent here
        assert!(s.s33.norm() < 1.0 - 1e-3);
    }

    #[test]
    fn blockade_at_x_plus_y_pole() {
        let a = PI / 4.0;
        let p = params(0.75, 0.1, a - PI / 2.0, a, PI / 2.0);
        let mu_b = 2.0 * p.lambda + 2.0;
        let omega = 2.0 * p.omega_localized() + (mu_b * mu_b * p.g * p.g + 4.0).sqrt();
        let s = s_matrix(omega, &p).unwrap();
        assert!(s.s11.norm() < 1e-10, "S11 = {:?}", s.s11);
        assert!((s.s21 + 1.0).norm() < 1e-10);
        assert!(flux_residual(&s) < 1e-12);
        // the limit form should blend continuously into the off-pole evaluation
        let near = s_matrix(omega + 1e-7, &p).unwrap();
        assert!((near.s33 - s.s33).norm() < 1e-5);
    }

    #[test]
    fn reciprocity_iff_c_y_zero() {
        let (a, b) = (PI / 4.0, PI / 4.0);
        let eps_star = (a.sin() * b.sin()).atan2(a.cos());
        let p = params(0.69, 0.1, eps_star, a, b);
        assert!(p.c_y().abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let omega = rng.random_range(-1.95..1.95);
            let s = s_matrix(omega, &p).unwrap();
            assert!((s.s11.norm() - s.s33.norm()).abs() < 1e-12);
        }
        // C_Y = +-1 kills conversion exactly (M = 0)
        let p1 = params(0.69, 0.1, a - PI / 2.0, a, PI / 2.0);
        let s = s_matrix(0.3, &p1).unwrap();
        assert!(s.s31.norm() < 1e-15 && s.s13.norm() < 1e-15);
    }

    #[test]
    fn band_edges_reflect_everything() {
        let p = params(0.9, 0.025, 0.1, PI / 4.0, PI / 2.0);
        for omega in [-2.0, 2.0] {
            let s = s_matrix(omega, &p).unwrap();
            assert!(s.s11.norm() < 1e-15);
            assert!((s.s21 + 1.0).norm() < 1e-15);
            assert!(s.phi_tilde == 0.0);
        }
    }

    #[test]
    fn flux_identity_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let mut worst = 0.0_f64;
        for _ in 0..10_000 {
            let p = params(
                rng.random_range(0.2..1.2),
                rng.random_range(0.02..2.0),
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.0..PI),
                rng.random_range(0.0..PI),
            );
            let omega = rng.random_range(-1.999..1.999);
            let s = s_matrix(omega, &p).unwrap();
            worst = worst.max(flux_residual(&s)).max((s.column3_flux() - 1.0).abs());
        }
        assert!(worst < 1e-10, "worst flux residual {worst:.3e}");
    }
}
