//! Independent numeric solver for the linearized scattering problem.
//!
//! The linearized dynamics couple the extended response `p_n` at the incident
//! frequency `omega` to a conjugated evanescent response `q_n` at
//! `nu = 2 Omega - omega`:
//!
//! ```text
//! omega p_n = -R p_{n-1} - R^dag p_{n+1} - delta_{n0} (R_- p_0 + g K q_0^*)
//! nu    q_n = -R q_{n-1} - R^dag q_{n+1} - delta_{n0} (R_- q_0 + g K p_0^*)
//! ```
//!
//! with `R_- = g[(2+lambda) I + lambda(cos(eps) sigma_x - sin(eps) sigma_y)]`
//! and `K = [[e^{2i eps}, lambda e^{i eps}], [lambda e^{i eps}, 1]]`. Because
//! `q` couples to `p^*`, the system is real-linear, not complex-linear: the
//! scattering ansatz leaves 6 complex unknowns `{S_1j..S_4j, q_0}` fixed by
//! the `n = -1, 0` rows plus the `q` row, i.e. a 12x12 real system. None of
//! this reuses the closed-form amplitudes, so it serves as their oracle.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::modes::{transmission_mode, Branch, SystemParams};
use crate::spinor::{rotation_matrix, Mat2, Spinor};

/// Coefficient data of the real-linear system for one incidence branch.
#[derive(Debug, Clone)]
pub struct LinearScatterSystem {
    pub omega: f64,
    /// `nu = 2 Omega - omega`, below the band.
    pub nu: f64,
    /// Evanescent decay of the `q` channel, `chi + 1/chi = -nu`, in `(0, 1)`.
    pub chi: f64,
    pub branch: Branch,
    matrix: [[f64; 12]; 12],
    rhs: [f64; 12],
}

/// Solved amplitudes for one incidence branch.
#[derive(Debug, Clone, Copy)]
pub struct OracleSolution {
    pub branch: Branch,
    pub omega: f64,
    pub chi: f64,
    /// `S_{j'j}` indexed by outgoing branch `j' = 1..=4`.
    pub s: [C64; 4],
    /// Evanescent amplitude at the impurity site.
    pub q0: Spinor,
    /// Condition estimate of the solved system (max/min pivot magnitude).
    pub condition: f64,
}

impl OracleSolution {
    pub fn outgoing_flux(&self) -> f64 {
        self.s.iter().map(|s| s.norm_sqr()).sum()
    }
}

fn impurity_direct(params: &SystemParams) -> Mat2 {
    let g = params.g;
    let lam = params.lambda;
    let e = C64::from_polar(1.0, params.epsilon);
    Mat2::new(
        C64::new(g * (2.0 + lam), 0.0),
        g * lam * e,
        g * lam * e.conj(),
        C64::new(g * (2.0 + lam), 0.0),
    )
}

fn impurity_conjugate(params: &SystemParams) -> Mat2 {
    let g = params.g;
    let lam = params.lambda;
    let e = C64::from_polar(1.0, params.epsilon);
    Mat2::new(g * e * e, g * lam * e, g * lam * e, C64::new(g, 0.0))
}

/// Outgoing-wave content of `p_n` on each side for incidence branch `j`.
///
/// Left incidence (`j = 1, 3`): incident on `n <= -1`, reflected into branches
/// 2, 4 there, transmitted into 1, 3 on `n >= 0`. Right incidence mirrors it.
struct Ansatz<'a> {
    params: &'a SystemParams,
    phi: f64,
    branch: Branch,
}

impl Ansatz<'_> {
    /// Complex coefficient of unknown `S_{k}` (k = outgoing branch 1..=4) in
    /// `p_n`, plus the inhomogeneous incident part.
    fn p_parts(&self, n: i64) -> ([Spinor; 4], Spinor) {
        let angles = self.params.spin_angles().expect("validated");
        let alpha = self.params.alpha;
        let mode = |j: u8| transmission_mode(Branch::from_index(j).unwrap(), self.phi, angles, alpha, n);
        let mut coeff = [Spinor::ZERO; 4];
        let mut incident = Spinor::ZERO;
        let left_incidence = self.branch.direction() == 1;
        if n <= -1 {
            coeff[1] = mode(2);
            coeff[3] = mode(4);
            if left_incidence {
                incident = mode(self.branch.index());
            }
        } else {
            coeff[0] = mode(1);
            coeff[2] = mode(3);
            if !left_incidence {
                incident = mode(self.branch.index());
            }
        }
        (coeff, incident)
    }
}

/// Accumulates complex-linear rows `sum A_k z_k + sum B_k conj(z_k) + c = 0`
/// into the real 12x12 form.
struct RealSystem {
    m: [[f64; 12]; 12],
    rhs: [f64; 12],
    row: usize,
}

impl RealSystem {
    fn new() -> Self {
        RealSystem {
            m: [[0.0; 12]; 12],
            rhs: [0.0; 12],
            row: 0,
        }
    }

    /// Push one complex scalar equation (two real rows).
    fn push(&mut self, lin: [C64; 6], conj: [C64; 6], constant: C64) {
        let (re, im) = (self.row, self.row + 1);
        for k in 0..6 {
            let a = lin[k];
            let b = conj[k];
            self.m[re][2 * k] += a.re + b.re;
            self.m[re][2 * k + 1] += -a.im + b.im;
            self.m[im][2 * k] += a.im + b.im;
            self.m[im][2 * k + 1] += a.re - b.re;
        }
        self.rhs[re] -= constant.re;
        self.rhs[im] -= constant.im;
        self.row += 2;
    }
}

/// Assemble the 12x12 system for one incidence branch.
pub fn build_system(omega: f64, params: &SystemParams, branch: Branch) -> Result<LinearScatterSystem> {
    params.validate()?;
    if !(-2.0 < omega && omega < 2.0) {
        return Err(Error::validation(format!(
            "oracle requires omega strictly inside the band, got {omega}"
        )));
    }
    let omega_loc = params.omega_localized();
    let nu = 2.0 * omega_loc - omega;
    let chi = (-nu - (nu * nu - 4.0).sqrt()) / 2.0;
    let phi = (-omega / 2.0).acos();
    let r = rotation_matrix(params.alpha, 1);
    let rd = r.dagger();
    let r_minus = impurity_direct(params);
    let k_conj = impurity_conjugate(params);
    let ansatz = Ansatz { params, phi, branch };

    let mut sys = RealSystem::new();
    let zero6 = [C64::new(0.0, 0.0); 6];

    // helper: add mat * p_n contribution into (lin, const) accumulators
    let accumulate = |mat: &Mat2, n: i64, lin: &mut [[C64; 6]; 2], constant: &mut [C64; 2]| {
        let (coeff, inc) = ansatz.p_parts(n);
        for (k, c) in coeff.iter().enumerate() {
            let v = *mat * *c;
            lin[0][k] += v.up;
            lin[1][k] += v.down;
        }
        let v = *mat * inc;
        constant[0] += v.up;
        constant[1] += v.down;
    };

    // row n = -1: omega p_{-1} + R p_{-2} + R^dag p_0 = 0
    {
        let mut lin = [[C64::new(0.0, 0.0); 6]; 2];
        let mut constant = [C64::new(0.0, 0.0); 2];
        let omega_i = Mat2::identity().scale(C64::new(omega, 0.0));
        accumulate(&omega_i, -1, &mut lin, &mut constant);
        accumulate(&r, -2, &mut lin, &mut constant);
        accumulate(&rd, 0, &mut lin, &mut constant);
        sys.push(lin[0], zero6, constant[0]);
        sys.push(lin[1], zero6, constant[1]);
    }

    // row n = 0: (omega I + R_-) p_0 + R p_{-1} + R^dag p_1 + g K q_0^* = 0
    {
        let mut lin = [[C64::new(0.0, 0.0); 6]; 2];
        let mut constant = [C64::new(0.0, 0.0); 2];
        let center = Mat2::identity().scale(C64::new(omega, 0.0)) + r_minus;
        accumulate(&center, 0, &mut lin, &mut constant);
        accumulate(&r, -1, &mut lin, &mut constant);
        accumulate(&rd, 1, &mut lin, &mut constant);
        let mut conj_up = zero6;
        let mut conj_dn = zero6;
        conj_up[4] = k_conj.a;
        conj_up[5] = k_conj.b;
        conj_dn[4] = k_conj.c;
        conj_dn[5] = k_conj.d;
        sys.push(lin[0], conj_up, constant[0]);
        sys.push(lin[1], conj_dn, constant[1]);
    }

    // q row: (nu + 2 chi) q_0 + R_- q_0 + g K p_0^* = 0
    {
        let diag = C64::new(nu + 2.0 * chi, 0.0);
        let mq = Mat2::identity().scale(diag) + r_minus;
        let mut lin_up = zero6;
        let mut lin_dn = zero6;
        lin_up[4] = mq.a;
        lin_up[5] = mq.b;
        lin_dn[4] = mq.c;
        lin_dn[5] = mq.d;
        let (coeff, inc) = ansatz.p_parts(0);
        let mut conj_up = zero6;
        let mut conj_dn = zero6;
        for (k, c) in coeff.iter().enumerate() {
            let v = k_conj * c.conj();
            conj_up[k] = v.up;
            conj_dn[k] = v.down;
        }
        let vinc = k_conj * inc.conj();
        sys.push(lin_up, conj_up, vinc.up);
        sys.push(lin_dn, conj_dn, vinc.down);
    }

    Ok(LinearScatterSystem {
        omega,
        nu,
        chi,
        branch,
        matrix: sys.m,
        rhs: sys.rhs,
    })
}

/// Partial-pivot Gaussian elimination on the fixed-size system.
fn solve12(mut m: [[f64; 12]; 12], mut rhs: [f64; 12]) -> Result<([f64; 12], f64)> {
    let mut max_pivot = 0.0_f64;
    let mut min_pivot = f64::INFINITY;
    for col in 0..12 {
        let pivot_row = (col..12)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        let pivot = m[pivot_row][col];
        if pivot.abs() < 1e-14 {
            return Err(Error::numerical(format!(
                "singular scattering system (pivot {:.3e} at column {col})",
                pivot.abs()
            )));
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        max_pivot = max_pivot.max(pivot.abs());
        min_pivot = min_pivot.min(pivot.abs());
        let pivot_row = m[col];
        for row in (col + 1)..12 {
            let f = m[row][col] / pivot;
            if f == 0.0 {
                continue;
            }
            for (dst, src) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= f * src;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 12];
    for row in (0..12).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..12 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Ok((x, max_pivot / min_pivot))
}

/// Solve the scattering problem numerically for one incidence branch.
pub fn solve_numeric(omega: f64, params: &SystemParams, branch: Branch) -> Result<OracleSolution> {
    let sys = build_system(omega, params, branch)?;
    let (x, condition) = solve12(sys.matrix, sys.rhs)?;
    let z = |k: usize| C64::new(x[2 * k], x[2 * k + 1]);
    Ok(OracleSolution {
        branch,
        omega,
        chi: sys.chi,
        s: [z(0), z(1), z(2), z(3)],
        q0: Spinor::new(z(4), z(5)),
        condition,
    })
}

/// Max violation of the isotropy identities `S_{j'j} = P12 P34 S_{j'j}`
/// (e.g. `S12 = S21`) between right- and left-incidence solves.
pub fn isotropy_check(omega: f64, params: &SystemParams) -> Result<f64> {
    let sol1 = solve_numeric(omega, params, Branch::B1)?;
    let sol2 = solve_numeric(omega, params, Branch::B2)?;
    let sol3 = solve_numeric(omega, params, Branch::B3)?;
    let sol4 = solve_numeric(omega, params, Branch::B4)?;
    // P12 P34 maps outgoing index 1<->2, 3<->4
    let perm = |s: &[C64; 4]| [s[1], s[0], s[3], s[2]];
    let p2 = perm(&sol2.s);
    let p4 = perm(&sol4.s);
    let mut worst = 0.0_f64;
    for k in 0..4 {
        worst = worst.max((p2[k] - sol1.s[k]).norm());
        worst = worst.max((p4[k] - sol3.s[k]).norm());
    }
    Ok(worst)
}

/// Reconstruct `p_n`, `q_n` from a solution and return the worst residual of
/// the coupled equations over every site of a `[-half, half]` lattice.
pub fn lattice_residual(sol: &OracleSolution, params: &SystemParams, half: i64) -> f64 {
    let angles = params.spin_angles().expect("validated");
    let alpha = params.alpha;
    let phi = (-sol.omega / 2.0).acos();
    let mode =
        |j: u8, n: i64| transmission_mode(Branch::from_index(j).unwrap(), phi, angles, alpha, n);
    let left_incidence = sol.branch.direction() == 1;
    let p_at = |n: i64| -> Spinor {
        let mut v = Spinor::ZERO;
        if n <= -1 {
            v = v + sol.s[1] * mode(2, n) + sol.s[3] * mode(4, n);
            if left_incidence {
                v = v + mode(sol.branch.index(), n);
            }
        } else {
            v = v + sol.s[0] * mode(1, n) + sol.s[2] * mode(3, n);
            if !left_incidence {
                v = v + mode(sol.branch.index(), n);
            }
        }
        v
    };
    let q_at = |n: i64| -> Spinor {
        let decay = sol.chi.powi(n.unsigned_abs() as i32);
        C64::new(decay, 0.0) * (rotation_matrix(alpha, n) * sol.q0)
    };
    let r = rotation_matrix(alpha, 1);
    let rd = r.dagger();
    let r_minus = impurity_direct(params);
    let k_conj = impurity_conjugate(params);
    let nu = 2.0 * params.omega_localized() - sol.omega;

    let mut worst = 0.0_f64;
    for n in -half..=half {
        let mut p_res = C64::new(sol.omega, 0.0) * p_at(n) + r * p_at(n - 1) + rd * p_at(n + 1);
        let mut q_res = C64::new(nu, 0.0) * q_at(n) + r * q_at(n - 1) + rd * q_at(n + 1);
        if n == 0 {
            p_res = p_res + r_minus * p_at(0) + k_conj * q_at(0).conj();
            q_res = q_res + r_minus * q_at(0) + k_conj * p_at(0).conj();
        }
        worst = worst.max(p_res.norm_sqr().sqrt()).max(q_res.norm_sqr().sqrt());
    }
    worst
}
