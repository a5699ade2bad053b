//! Nonlinear time-domain evolution of the spinor lattice field.
//!
//! The full equation of motion is
//! `i d psi_n / dt = -R psi_{n-1} - R^dag psi_{n+1}
//!                   - delta_{n0} gamma (|psi_{0 s}|^2 + lambda |psi_{0 -s}|^2) psi_{0 s}`,
//! integrated with fixed-step classic RK4 over a hard-walled window. A weak
//! Gaussian wavepacket rides on top of the condensate `d_n e^{-i Omega t}`;
//! after the collision, spin-resolved transmitted/reflected fractions are read
//! off by projecting the residual field onto the local mode basis
//! `{R^n l_+ / sqrt2, R^n l_- / sqrt2}` outside a core region `|n| <= n_cut`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::modes::{spin_basis, Branch, LocalizedMode, SystemParams, TransmissionMode};
use crate::spinor::{rotation_matrix, Spinor};

/// Gaussian incident packet riding one transmission branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketSpec {
    /// Peak amplitude; must stay small against the condensate peak `sqrt(g/gamma)`.
    pub s0: f64,
    /// Inverse squared width (site^-2) of the envelope `exp(-s_p (n - n0)^2)`.
    pub s_p: f64,
    /// Center site, on the incident side.
    pub n0: i64,
    pub branch: Branch,
    /// Band energy of the carrier.
    pub omega: f64,
}

impl WavepacketSpec {
    /// Envelope amplitude at the impurity site relative to `s0`.
    pub fn origin_overlap(&self) -> f64 {
        (-self.s_p * (self.n0 as f64).powi(2)).exp()
    }

    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        if self.s0 < 0.0 || !self.s0.is_finite() || !positive(self.s_p) {
            return Err(Error::validation(
                "packet needs s0 >= 0 and s_p > 0 (s0 = 0 gives a pure condensate)".to_string(),
            ));
        }
        let peak = (params.g / params.gamma).sqrt();
        if self.s0 / peak > 0.05 {
            return Err(Error::validation(format!(
                "packet amplitude s0 = {} exceeds 5% of the condensate peak {peak:.3}; \
                 the linear-response reading of the output would not apply",
                self.s0
            )));
        }
        if !(-2.0..=2.0).contains(&self.omega) {
            return Err(Error::validation(format!(
                "carrier energy {} outside the band",
                self.omega
            )));
        }
        let incident_side_ok = match self.branch.direction() {
            1 => self.n0 < 0,
            _ => self.n0 > 0,
        };
        if !incident_side_ok {
            return Err(Error::validation(format!(
                "packet center n0 = {} is not on the incident side of branch {}",
                self.n0,
                self.branch.index()
            )));
        }
        Ok(())
    }
}

/// The spinor field over a finite window, plus its clock.
#[derive(Debug, Clone)]
pub struct LatticeState {
    pub n_min: i64,
    pub n_max: i64,
    pub psi: Vec<Spinor>,
    pub time: f64,
}

impl LatticeState {
    pub fn site_count(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn index_of(&self, n: i64) -> usize {
        (n - self.n_min) as usize
    }

    pub fn total_norm(&self) -> f64 {
        self.psi.iter().map(|s| s.norm_sqr()).sum()
    }
}

/// Warnings gathered while building an initial state.
#[derive(Debug, Clone, Default)]
pub struct InitReport {
    pub warnings: Vec<String>,
}

/// Condensate plus packet at `t = 0`.
///
/// The packet is `s0 exp(-s_p (n-n0)^2) L_n^{(j)}` where `L` carries the
/// branch's step-function support: left of the impurity for `j = 1, 3`,
/// right of it for `j = 2, 4`.
pub fn init_state(
    params: &SystemParams,
    packet: &WavepacketSpec,
    window: (i64, i64),
) -> Result<(LatticeState, InitReport)> {
    params.validate()?;
    packet.validate(params)?;
    let (n_min, n_max) = window;
    if n_min >= 0 || n_max <= 0 || n_max <= n_min {
        return Err(Error::validation(format!(
            "window [{n_min}, {n_max}] must straddle the impurity site 0"
        )));
    }
    if packet.n0 <= n_min || packet.n0 >= n_max {
        return Err(Error::validation(format!(
            "packet center {} outside window [{n_min}, {n_max}]",
            packet.n0
        )));
    }
    let mut report = InitReport::default();
    if packet.s0 > 0.0 && packet.origin_overlap() > 1e-3 {
        report.warnings.push(format!(
            "packet tail overlaps the impurity: envelope at n = 0 is {:.2e} of s0",
            packet.origin_overlap()
        ));
    }
    let condensate = LocalizedMode::from_params(params);
    if condensate.interaction_strength_suspect() {
        report.warnings.push(format!(
            "gamma (1 + lambda) = {:.3} is not small; mean-field premise is strained",
            params.gamma * (1.0 + params.lambda)
        ));
    }
    let mode = TransmissionMode::from_omega(
        packet.branch,
        packet.omega,
        params.spin_angles()?,
        params.alpha,
    )?;
    let mut psi = Vec::with_capacity((n_max - n_min + 1) as usize);
    for n in n_min..=n_max {
        let mut site = condensate.site(n);
        let supported = match packet.branch.direction() {
            1 => n <= -1,
            _ => n >= 0,
        };
        if supported {
            let envelope = packet.s0 * (-packet.s_p * ((n - packet.n0) as f64).powi(2)).exp();
            site = site + envelope * mode.spinor_at(n);
        }
        psi.push(site);
    }
    Ok((
        LatticeState {
            n_min,
            n_max,
            psi,
            time: 0.0,
        },
        report,
    ))
}

/// Right-hand side `d psi / dt` of the lattice equation, hard walls outside
/// the window.
pub fn gpe_rhs(state: &LatticeState, params: &SystemParams, out: &mut Vec<Spinor>) {
    let count = state.site_count();
    out.clear();
    out.resize(count, Spinor::ZERO);
    let r = rotation_matrix(params.alpha, 1);
    let rd = r.dagger();
    let i = C64::new(0.0, 1.0);
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = Spinor::ZERO;
        if k > 0 {
            acc = acc + r * state.psi[k - 1];
        }
        if k + 1 < count {
            acc = acc + rd * state.psi[k + 1];
        }
        *slot = i * acc;
    }
    let k0 = state.index_of(0);
    let psi0 = state.psi[k0];
    let dens_up = psi0.up.norm_sqr();
    let dens_dn = psi0.down.norm_sqr();
    let gamma = params.gamma;
    let lambda = params.lambda;
    let nl = Spinor::new(
        C64::new(gamma * (dens_up + lambda * dens_dn), 0.0) * psi0.up,
        C64::new(gamma * (dens_dn + lambda * dens_up), 0.0) * psi0.down,
    );
    out[k0] = out[k0] + i * nl;
}

/// Lattice energy `H(psi)`: hopping plus the on-site quartic term.
pub fn energy(state: &LatticeState, params: &SystemParams) -> f64 {
    let r = rotation_matrix(params.alpha, 1);
    let mut hop = 0.0;
    for k in 0..state.site_count() - 1 {
        // psi_{n+1}^dag R psi_n + c.c.
        hop += 2.0 * state.psi[k + 1].dot(&(r * state.psi[k])).re;
    }
    let psi0 = state.psi[state.index_of(0)];
    let du = psi0.up.norm_sqr();
    let dd = psi0.down.norm_sqr();
    let quartic =
        params.gamma * (du * du + dd * dd) + 2.0 * params.gamma * params.lambda * du * dd;
    -hop - 0.5 * quartic
}

/// What to record and guard during an evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Record populations every this many time units.
    pub record_every: f64,
    /// Sites from each wall over which edge population is watched.
    pub edge_guard_sites: i64,
    /// Abort when edge population exceeds this fraction of the packet norm.
    pub edge_guard_level: f64,
    /// Core radius for population bookkeeping; `None` derives it from the
    /// condensate tail (`(g/gamma) kappa^{2n} < 1e-6 s0^2`).
    pub n_cut: Option<i64>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            dt: 0.005,
            t_final: 600.0,
            record_every: 1.0,
            edge_guard_sites: 10,
            edge_guard_level: 1e-6,
            n_cut: None,
        }
    }
}

/// Spin-resolved population split of the residual (condensate-subtracted) field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSplit {
    /// Transmitted fraction in the `l_+` spin channel (`n > n_cut`).
    pub transmitted_plus: f64,
    pub transmitted_minus: f64,
    /// Reflected fraction in the `l_+` spin channel (`n < -n_cut`).
    pub reflected_plus: f64,
    pub reflected_minus: f64,
    /// Residual norm fraction inside `|n| <= n_cut`.
    pub core: f64,
    /// `|<d e^{-i Omega t}, psi>| / ||d||^2`; below 0.99 the condensate
    /// reference (and hence the split) is unreliable.
    pub condensate_fidelity: f64,
}

impl PopulationSplit {
    pub fn total(&self) -> f64 {
        self.transmitted_plus
            + self.transmitted_minus
            + self.reflected_plus
            + self.reflected_minus
            + self.core
    }

    pub fn reliable(&self) -> bool {
        self.condensate_fidelity >= 0.99
    }
}

/// One recorded sample of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub t: f64,
    pub split: PopulationSplit,
    pub total_norm: f64,
}

/// Full outcome of a time-domain run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimResult {
    pub params: SystemParams,
    pub packet: WavepacketSpec,
    pub window: (i64, i64),
    pub dt: f64,
    pub n_cut: i64,
    pub records: Vec<SimRecord>,
    pub final_split: PopulationSplit,
    /// Relative drift of the total norm over the run.
    pub norm_drift: f64,
    /// Relative drift of the lattice energy over the run.
    pub energy_drift: f64,
    /// Initial packet norm used to normalize all fractions.
    pub packet_norm: f64,
}

/// Derive the default core radius: smallest `n` with the condensate tail
/// below `1e-6 s0^2`.
pub fn default_n_cut(params: &SystemParams, packet: &WavepacketSpec) -> i64 {
    let condensate = LocalizedMode::from_params(params);
    let target = if packet.s0 > 0.0 {
        1e-6 * packet.s0 * packet.s0
    } else {
        1e-12 * (params.g / params.gamma)
    };
    let mut n = 1i64;
    while n < 10_000 {
        let tail = (params.g / params.gamma) * condensate.kappa.powi(2 * n as i32);
        if tail < target {
            return n;
        }
        n += 1;
    }
    n
}

/// Projection amplitudes of the residual field onto the local mode basis.
///
/// The condensate reference carries the analytic phase `e^{-i Omega t}`
/// corrected by the measured residual global phase of the condensate: norm
/// exchanged during the collision shifts the condensate frequency by
/// `O(s0^2)`, and with an amplitude of order `sqrt(N_at)` at the core even a
/// milliradian of accumulated phase would otherwise read as spurious core
/// population. The magnitude of the overlap (the fidelity) is unaffected.
fn measure_into(
    state: &LatticeState,
    params: &SystemParams,
    condensate: &LocalizedMode,
    n_cut: i64,
    packet_norm: f64,
) -> PopulationSplit {
    let (l_plus, l_minus) = spin_basis(params.spin_angles().expect("validated"));
    let analytic = C64::from_polar(1.0, -condensate.omega * state.time);
    let mut overlap = C64::new(0.0, 0.0);
    let mut cond_norm = 0.0;
    for n in state.n_min..=state.n_max {
        let reference = analytic * condensate.site(n);
        overlap += reference.dot(&state.psi[state.index_of(n)]);
        cond_norm += reference.norm_sqr();
    }
    let phase = if overlap.norm() > 0.0 {
        analytic * (overlap / overlap.norm())
    } else {
        analytic
    };
    let mut tp = 0.0;
    let mut tm = 0.0;
    let mut rp = 0.0;
    let mut rm = 0.0;
    let mut core = 0.0;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for n in state.n_min..=state.n_max {
        let k = state.index_of(n);
        let reference = phase * condensate.site(n);
        let residual = state.psi[k] - reference;
        if n.abs() <= n_cut {
            core += residual.norm_sqr();
            continue;
        }
        // rotate back to the site-local frame and project on l_+- / sqrt2
        let back = rotation_matrix(params.alpha, -n);
        let local = back * residual;
        let amp_p = l_plus.dot(&local) * inv_sqrt2;
        let amp_m = l_minus.dot(&local) * inv_sqrt2;
        if n > 0 {
            tp += amp_p.norm_sqr();
            tm += amp_m.norm_sqr();
        } else {
            rp += amp_p.norm_sqr();
            rm += amp_m.norm_sqr();
        }
    }
    PopulationSplit {
        transmitted_plus: tp / packet_norm,
        transmitted_minus: tm / packet_norm,
        reflected_plus: rp / packet_norm,
        reflected_minus: rm / packet_norm,
        core: core / packet_norm,
        condensate_fidelity: overlap.norm() / cond_norm,
    }
}

/// Spin-resolved split of the current state against the analytic condensate
/// reference. Call after the packet has cleared `|n| <= n_cut`.
pub fn measure_populations(
    state: &LatticeState,
    params: &SystemParams,
    packet: &WavepacketSpec,
    n_cut: i64,
) -> Result<PopulationSplit> {
    params.validate()?;
    let condensate = LocalizedMode::from_params(params);
    let packet_norm = packet_norm_of(packet, params, (state.n_min, state.n_max))?;
    Ok(measure_into(state, params, &condensate, n_cut, packet_norm))
}

/// Norm of the initial packet on the given window.
fn packet_norm_of(
    packet: &WavepacketSpec,
    params: &SystemParams,
    window: (i64, i64),
) -> Result<f64> {
    let mode = TransmissionMode::from_omega(
        packet.branch,
        packet.omega,
        params.spin_angles()?,
        params.alpha,
    )?;
    let mut norm = 0.0;
    for n in window.0..=window.1 {
        let supported = match packet.branch.direction() {
            1 => n <= -1,
            _ => n >= 0,
        };
        if supported {
            let envelope = packet.s0 * (-packet.s_p * ((n - packet.n0) as f64).powi(2)).exp();
            norm += envelope * envelope * mode.spinor_at(n).norm_sqr();
        }
    }
    Ok(norm)
}

/// Classic fixed-step RK4 evolution with population recording and an
/// edge-contact guard.
pub fn evolve(
    state: &mut LatticeState,
    params: &SystemParams,
    packet: &WavepacketSpec,
    config: &EvolveConfig,
) -> Result<SimResult> {
    params.validate()?;
    if !positive(config.dt) || config.dt > 0.02 {
        return Err(Error::validation(format!(
            "dt = {} outside (0, 0.02] (RK4 stability/accuracy bound)",
            config.dt
        )));
    }
    if config.t_final <= 0.0 {
        return Err(Error::validation("t_final must be positive".to_string()));
    }
    let n_cut = config.n_cut.unwrap_or_else(|| default_n_cut(params, packet));
    let condensate = LocalizedMode::from_params(params);
    // pure-condensate runs (s0 = 0) normalize against unity instead
    let packet_norm = match packet_norm_of(packet, params, (state.n_min, state.n_max))? {
        norm if norm > 0.0 => norm,
        _ => 1.0,
    };

    let steps = (config.t_final / config.dt).round() as u64;
    let record_stride = (config.record_every / config.dt).round().max(1.0) as u64;
    let count = state.site_count();
    let mut k1 = Vec::with_capacity(count);
    let mut k2 = Vec::with_capacity(count);
    let mut k3 = Vec::with_capacity(count);
    let mut k4 = Vec::with_capacity(count);
    let mut scratch = LatticeState {
        n_min: state.n_min,
        n_max: state.n_max,
        psi: state.psi.clone(),
        time: state.time,
    };

    let norm0 = state.total_norm();
    let energy0 = energy(state, params);
    let mut records = Vec::new();
    records.push(SimRecord {
        t: state.time,
        split: measure_into(state, params, &condensate, n_cut, packet_norm),
        total_norm: norm0,
    });

    let guard = config.edge_guard_sites.max(1) as usize;
    let dt = config.dt;
    let stage = |scratch: &mut Vec<Spinor>, base: &[Spinor], slope: &[Spinor], h: f64| {
        let factor = C64::new(h, 0.0);
        for ((dst, src), kv) in scratch.iter_mut().zip(base).zip(slope) {
            *dst = *src + factor * *kv;
        }
    };
    for step in 1..=steps {
        gpe_rhs(state, params, &mut k1);
        stage(&mut scratch.psi, &state.psi, &k1, 0.5 * dt);
        gpe_rhs(&scratch, params, &mut k2);
        stage(&mut scratch.psi, &state.psi, &k2, 0.5 * dt);
        gpe_rhs(&scratch, params, &mut k3);
        stage(&mut scratch.psi, &state.psi, &k3, dt);
        gpe_rhs(&scratch, params, &mut k4);
        let sixth = C64::new(dt / 6.0, 0.0);
        for k in 0..count {
            state.psi[k] =
                state.psi[k] + sixth * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
        state.time += dt;

        if step % record_stride == 0 || step == steps {
            // edge guard on the condensate-subtracted field
            let phase = C64::from_polar(1.0, -condensate.omega * state.time);
            let mut edge = 0.0;
            for k in 0..guard {
                let n_lo = state.n_min + k as i64;
                let n_hi = state.n_max - k as i64;
                edge += (state.psi[k] - phase * condensate.site(n_lo)).norm_sqr();
                edge += (state.psi[count - 1 - k] - phase * condensate.site(n_hi)).norm_sqr();
            }
            if edge > config.edge_guard_level * packet_norm {
                return Err(Error::numerical(format!(
                    "wavepacket reached the window edge at t = {:.2} \
                     (edge population {:.3e} of packet norm); enlarge the window or stop earlier",
                    state.time,
                    edge / packet_norm
                )));
            }
            records.push(SimRecord {
                t: state.time,
                split: measure_into(state, params, &condensate, n_cut, packet_norm),
                total_norm: state.total_norm(),
            });
        }
    }

    let norm1 = state.total_norm();
    let energy1 = energy(state, params);
    let final_split = records.last().expect("at least the initial record").split;
    Ok(SimResult {
        params: *params,
        packet: *packet,
        window: (state.n_min, state.n_max),
        dt,
        n_cut,
        records,
        final_split,
        norm_drift: ((norm1 - norm0) / norm0).abs(),
        energy_drift: ((energy1 - energy0) / energy0).abs(),
        packet_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn base_params() -> SystemParams {
        SystemParams {
            alpha: PI / 20.0,
            gamma: 0.002,
            lambda: 0.025,
            g: 0.9,
            epsilon: PI / 4.0 - PI / 2.0,
            a: PI / 4.0,
            b: PI / 2.0,
        }
    }

    fn condensate_only_state(params: &SystemParams, half: i64) -> LatticeState {
        let condensate = LocalizedMode::from_params(params);
        let psi = (-half..=half).map(|n| condensate.site(n)).collect();
        LatticeState {
            n_min: -half,
            n_max: half,
            psi,
            time: 0.0,
        }
    }

    #[test]
    fn condensate_is_a_fixed_point_of_the_rhs() {
        let params = base_params();
        let state = condensate_only_state(&params, 60);
        let condensate = LocalizedMode::from_params(&params);
        let mut rhs = Vec::new();
        gpe_rhs(&state, &params, &mut rhs);
        // d psi/dt should equal -i Omega psi site-by-site
        let mut worst = 0.0_f64;
        for n in -40..=40i64 {
            let k = state.index_of(n);
            let expect = C64::new(0.0, -condensate.omega) * state.psi[k];
            worst = worst.max((rhs[k] - expect).norm_sqr().sqrt());
        }
        assert!(worst < 1e-10, "stationarity residual {worst:.3e}");
    }

    #[test]
    fn free_single_site_spreads_symmetrically_with_spin_rotation() {
        // gamma ~ 0: the impurity term vanishes with the packet scale
        let params = SystemParams {
            gamma: 1e-300,
            ..base_params()
        };
        let mut psi = vec![Spinor::ZERO; 41];
        psi[20] = Spinor::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let mut state = LatticeState {
            n_min: -20,
            n_max: 20,
            psi,
            time: 0.0,
        };
        let mut buf = Vec::new();
        let dt = 0.01;
        for _ in 0..500 {
            let snapshot = state.psi.clone();
            gpe_rhs(&state, &params, &mut buf);
            let k1 = buf.clone();
            let mut mid = state.clone();
            for k in 0..41 {
                mid.psi[k] = snapshot[k] + C64::new(0.5 * dt, 0.0) * k1[k];
            }
            gpe_rhs(&mid, &params, &mut buf);
            let k2 = buf.clone();
            for k in 0..41 {
                mid.psi[k] = snapshot[k] + C64::new(0.5 * dt, 0.0) * k2[k];
            }
            gpe_rhs(&mid, &params, &mut buf);
            let k3 = buf.clone();
            for k in 0..41 {
                mid.psi[k] = snapshot[k] + C64::new(dt, 0.0) * k3[k];
            }
            gpe_rhs(&mid, &params, &mut buf);
            for k in 0..41 {
                state.psi[k] = snapshot[k]
                    + C64::new(dt / 6.0, 0.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + buf[k]);
            }
            state.time += dt;
        }
        // mirror symmetry of population, with the spin rotated by R^{2n}
        for n in 1..=10i64 {
            let left = state.psi[state.index_of(-n)];
            let right = state.psi[state.index_of(n)];
            assert!((left.norm_sqr() - right.norm_sqr()).abs() < 1e-10);
            // undo the site-local rotation; amplitudes must then agree
            let l0 = rotation_matrix(params.alpha, n) * left;
            let r0 = rotation_matrix(params.alpha, -n) * right;
            assert!((l0 - r0).norm_sqr() < 1e-20);
        }
    }

    #[test]
    fn alpha_zero_keeps_spin_up_pure() {
        let params = SystemParams {
            alpha: 0.0,
            gamma: 1e-300,
            ..base_params()
        };
        let mut psi = vec![Spinor::ZERO; 41];
        psi[20] = Spinor::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let state = LatticeState {
            n_min: -20,
            n_max: 20,
            psi,
            time: 0.0,
        };
        let mut rhs = Vec::new();
        gpe_rhs(&state, &params, &mut rhs);
        assert!(rhs.iter().all(|s| s.down.norm() == 0.0));
    }

    #[test]
    fn init_state_shapes_and_warnings() {
        let params = base_params();
        let packet = WavepacketSpec {
            s0: 0.01 * (params.g / params.gamma).sqrt(),
            s_p: 0.002,
            n0: -150,
            branch: Branch::B1,
            omega: -1.9,
        };
        let (state, report) = init_state(&params, &packet, (-400, 400)).unwrap();
        assert!(report.warnings.is_empty());
        assert_eq!(state.site_count(), 801);
        // packet absent on the transmitted side
        let condensate = LocalizedMode::from_params(&params);
        let k = state.index_of(50);
        assert!((state.psi[k] - condensate.site(50)).norm_sqr() < 1e-30);
        // s0 = 0 gives the pure condensate
        let mut zero = packet;
        zero.s0 = 0.0;
        let (pure, _) = init_state(&params, &zero, (-400, 400)).unwrap();
        let k = pure.index_of(-150);
        assert!((pure.psi[k] - condensate.site(-150)).norm_sqr() < 1e-30);
        // a packet parked on the impurity draws a warning
        let mut close = packet;
        close.n0 = -10;
        let (_, report) = init_state(&params, &close, (-400, 400)).unwrap();
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn init_state_rejects_loud_packets_and_bad_sides() {
        let params = base_params();
        let loud = WavepacketSpec {
            s0: 0.1 * (params.g / params.gamma).sqrt(),
            s_p: 0.002,
            n0: -150,
            branch: Branch::B1,
            omega: -1.9,
        };
        assert!(matches!(
            init_state(&params, &loud, (-400, 400)),
            Err(Error::Validation(_))
        ));
        let wrong_side = WavepacketSpec {
            s0: 0.01 * (params.g / params.gamma).sqrt(),
            s_p: 0.002,
            n0: 150,
            branch: Branch::B1,
            omega: -1.9,
        };
        assert!(init_state(&params, &wrong_side, (-400, 400)).is_err());
        // right incidence takes positive n0
        let right = WavepacketSpec {
            branch: Branch::B2,
            n0: 150,
            ..wrong_side
        };
        assert!(init_state(&params, &right, (-400, 400)).is_ok());
    }

    #[test]
    fn condensate_only_evolution_is_pure_phase_rotation() {
        let params = base_params();
        let condensate = LocalizedMode::from_params(&params);
        let mut state = condensate_only_state(&params, 60);
        let packet = WavepacketSpec {
            s0: 0.0,
            s_p: 0.002,
            n0: -30,
            branch: Branch::B1,
            omega: -1.9,
        };
        // dt = 0.002: the fourth-order phase error must stay under the 1e-6
        // absolute match against an amplitude-~30 field over 50k steps
        let config = EvolveConfig {
            dt: 0.002,
            t_final: 100.0,
            record_every: 10.0,
            ..EvolveConfig::default()
        };
        let result = evolve(&mut state, &params, &packet, &config).unwrap();
        let phase = C64::from_polar(1.0, -condensate.omega * state.time);
        let mut worst = 0.0_f64;
        for n in -60..=60i64 {
            let expect = phase * condensate.site(n);
            worst = worst.max((state.psi[state.index_of(n)] - expect).norm_sqr().sqrt());
        }
        assert!(worst < 1e-6, "phase-rotation deviation {worst:.3e}");
        assert!(result.norm_drift < 1e-8, "norm drift {:.3e}", result.norm_drift);
        assert!(result.energy_drift < 1e-6);
    }

    #[test]
    fn free_packet_moves_at_group_velocity() {
        // packet-only state: without the condensate the impurity term is
        // cubic in the weak packet, so propagation is effectively free
        let params = base_params();
        let omega = -1.0; // phi = pi/3, v = 2 sin(phi) = sqrt(3)
        let packet = WavepacketSpec {
            s0: 1.0e-2,
            s_p: 0.002,
            n0: -100,
            branch: Branch::B1,
            omega,
        };
        let mode =
            TransmissionMode::from_omega(packet.branch, omega, params.spin_angles().unwrap(), params.alpha)
                .unwrap();
        let psi = (-250..=250i64)
            .map(|n| {
                if n <= -1 {
                    let env = packet.s0 * (-packet.s_p * ((n - packet.n0) as f64).powi(2)).exp();
                    env * mode.spinor_at(n)
                } else {
                    Spinor::ZERO
                }
            })
            .collect();
        let mut state = LatticeState {
            n_min: -250,
            n_max: 250,
            psi,
            time: 0.0,
        };
        let t_final = 50.0;
        let config = EvolveConfig {
            dt: 0.01,
            t_final,
            record_every: t_final,
            ..EvolveConfig::default()
        };
        evolve(&mut state, &params, &packet, &config).unwrap();
        let mut weight = 0.0;
        let mut centroid = 0.0;
        for n in state.n_min..=state.n_max {
            let w = state.psi[state.index_of(n)].norm_sqr();
            weight += w;
            centroid += n as f64 * w;
        }
        centroid /= weight;
        let v_measured = (centroid + 100.0) / t_final;
        assert!(
            (v_measured - 3.0_f64.sqrt()).abs() < 0.02 * 3.0_f64.sqrt(),
            "measured v = {v_measured:.4}, expected {:.4}",
            3.0_f64.sqrt()
        );
    }

    #[test]
    fn edge_guard_aborts_runaway_packets() {
        let params = SystemParams {
            gamma: 1e-300,
            ..base_params()
        };
        let packet = WavepacketSpec {
            s0: 1.0e-2,
            s_p: 0.002,
            n0: -60,
            branch: Branch::B1,
            omega: -1.0,
        };
        let (mut state, _) = init_state(&params, &packet, (-90, 90)).unwrap();
        let config = EvolveConfig {
            dt: 0.01,
            t_final: 200.0,
            record_every: 1.0,
            ..EvolveConfig::default()
        };
        match evolve(&mut state, &params, &packet, &config) {
            Err(Error::Numerical(msg)) => assert!(msg.contains("edge")),
            other => panic!("expected edge abort, got {other:?}"),
        }
    }

    #[test]
    fn rk4_rejects_oversized_steps() {
        let params = base_params();
        let packet = WavepacketSpec {
            s0: 0.2,
            s_p: 0.002,
            n0: -50,
            branch: Branch::B1,
            omega: -1.9,
        };
        let (mut state, _) = init_state(&params, &packet, (-100, 100)).unwrap();
        let config = EvolveConfig {
            dt: 0.05,
            ..EvolveConfig::default()
        };
        assert!(matches!(
            evolve(&mut state, &params, &packet, &config),
            Err(Error::Validation(_))
        ));
    }
}
