//! Time integration of the reduced flow with conservation diagnostics.
//!
//! Fixed-step classical RK4 is the default; an embedded Fehlberg 7(8)
//! pair provides adaptive stepping when higher order is wanted. Both
//! abort (with a partial report) rather than step across a collision.

use crate::error::{Error, Result};
use crate::model::{self, ReducedState, SystemParams};

/// Integration method selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fixed-step Runge-Kutta of order 4.
    Rk4,
    /// Fehlberg 7(8) embedded pair, adaptive step. `dt` is the initial
    /// step; the local error per step is kept under `tol` (mixed
    /// absolute/relative against the state scale).
    Rkf78 { tol: f64 },
}

/// Why a run ended before `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub enum Abort {
    Collision(String),
    StepUnderflow { t: f64, dt: f64 },
}

/// Sampled trajectory plus drift series of the conserved quantities.
///
/// Drifts are relative to the initial magnitude of each quantity, with an
/// absolute fallback when the initial value is below 1e-12.
#[derive(Debug, Clone)]
pub struct IntegrationReport {
    pub times: Vec<f64>,
    pub states: Vec<ReducedState>,
    pub drift_h: Vec<f64>,
    pub drift_half_l0_sq: Vec<f64>,
    pub drift_half_pi1_sq: Vec<f64>,
    pub drift_half_pi2_sq: Vec<f64>,
    /// Norm of L(t) - L(0) over max(|L(0)|, fallback).
    pub drift_l: Vec<f64>,
    pub drift_pi0_3: Vec<f64>,
    pub aborted: Option<Abort>,
}

impl IntegrationReport {
    pub fn completed(&self) -> bool {
        self.aborted.is_none()
    }

    pub fn final_state(&self) -> &ReducedState {
        self.states.last().expect("report holds at least z0")
    }

    pub fn max_drift_h(&self) -> f64 {
        self.drift_h.iter().fold(0.0f64, |m, d| m.max(d.abs()))
    }

    pub fn max_casimir_drift(&self) -> f64 {
        [
            &self.drift_half_l0_sq,
            &self.drift_half_pi1_sq,
            &self.drift_half_pi2_sq,
            &self.drift_l,
            &self.drift_pi0_3,
        ]
        .iter()
        .flat_map(|s| s.iter())
        .fold(0.0f64, |m, d| m.max(d.abs()))
    }
}

fn rel_drift(now: f64, init: f64) -> f64 {
    let denom = init.abs().max(1e-12);
    (now - init) / denom
}

struct DriftBase {
    h: f64,
    half_l0_sq: f64,
    half_pi1_sq: f64,
    half_pi2_sq: f64,
    l: model::Vec3,
    l_norm: f64,
    pi0_3: f64,
}

fn record(
    report: &mut IntegrationReport,
    base: &DriftBase,
    params: &SystemParams,
    t: f64,
    z: &ReducedState,
) {
    let c = model::casimirs(z);
    let h = model::hamiltonian(params, z).unwrap_or(f64::NAN);
    report.times.push(t);
    report.states.push(*z);
    report.drift_h.push(rel_drift(h, base.h));
    report
        .drift_half_l0_sq
        .push(rel_drift(c.half_l0_sq, base.half_l0_sq));
    report
        .drift_half_pi1_sq
        .push(rel_drift(c.half_pi1_sq, base.half_pi1_sq));
    report
        .drift_half_pi2_sq
        .push(rel_drift(c.half_pi2_sq, base.half_pi2_sq));
    let l_now = model::total_angular_momentum(z);
    report
        .drift_l
        .push((l_now - base.l).norm() / base.l_norm.max(1e-12));
    report.drift_pi0_3.push(rel_drift(z.pi0.z, base.pi0_3));
}

fn add_scaled(z: &ReducedState, dz: &ReducedState, s: f64) -> ReducedState {
    ReducedState {
        pi1: z.pi1 + dz.pi1 * s,
        pi2: z.pi2 + dz.pi2 * s,
        pi0: z.pi0 + dz.pi0 * s,
        lambda: z.lambda + dz.lambda * s,
        p_lambda: z.p_lambda + dz.p_lambda * s,
        mu: z.mu + dz.mu * s,
        p_mu: z.p_mu + dz.p_mu * s,
    }
}

fn combine(z: &ReducedState, stages: &[(f64, &ReducedState)], dt: f64) -> ReducedState {
    let mut out = *z;
    for &(w, k) in stages {
        out = add_scaled(&out, k, w * dt);
    }
    out
}

/// One classical RK4 step.
fn rk4_step(params: &SystemParams, z: &ReducedState, dt: f64) -> Result<ReducedState> {
    let k1 = model::vector_field(params, z)?;
    let k2 = model::vector_field(params, &add_scaled(z, &k1, 0.5 * dt))?;
    let k3 = model::vector_field(params, &add_scaled(z, &k2, 0.5 * dt))?;
    let k4 = model::vector_field(params, &add_scaled(z, &k3, dt))?;
    Ok(combine(
        z,
        &[
            (1.0 / 6.0, &k1),
            (1.0 / 3.0, &k2),
            (1.0 / 3.0, &k3),
            (1.0 / 6.0, &k4),
        ],
        dt,
    ))
}

/// Fehlberg 7(8) coefficients (13 stages).
const RKF78_C: [f64; 13] = [
    0.0,
    2.0 / 27.0,
    1.0 / 9.0,
    1.0 / 6.0,
    5.0 / 12.0,
    0.5,
    5.0 / 6.0,
    1.0 / 6.0,
    2.0 / 3.0,
    1.0 / 3.0,
    1.0,
    0.0,
    1.0,
];

const RKF78_A: [[f64; 12]; 13] = [
    [0.0; 12],
    [2.0 / 27.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 36.0, 1.0 / 12.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 24.0, 0.0, 1.0 / 8.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 20.0, 0.0, 0.0, 0.25, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        -25.0 / 108.0,
        0.0,
        0.0,
        125.0 / 108.0,
        -65.0 / 27.0,
        125.0 / 54.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        31.0 / 300.0,
        0.0,
        0.0,
        0.0,
        61.0 / 225.0,
        -2.0 / 9.0,
        13.0 / 900.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.0,
        0.0,
        0.0,
        -53.0 / 6.0,
        704.0 / 45.0,
        -107.0 / 9.0,
        67.0 / 90.0,
        3.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        -91.0 / 108.0,
        0.0,
        0.0,
        23.0 / 108.0,
        -976.0 / 135.0,
        311.0 / 54.0,
        -19.0 / 60.0,
        17.0 / 6.0,
        -1.0 / 12.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2383.0 / 4100.0,
        0.0,
        0.0,
        -341.0 / 164.0,
        4496.0 / 1025.0,
        -301.0 / 82.0,
        2133.0 / 4100.0,
        45.0 / 82.0,
        45.0 / 164.0,
        18.0 / 41.0,
        0.0,
        0.0,
    ],
    [
        3.0 / 205.0,
        0.0,
        0.0,
        0.0,
        0.0,
        -6.0 / 41.0,
        -3.0 / 205.0,
        -3.0 / 41.0,
        3.0 / 41.0,
        6.0 / 41.0,
        0.0,
        0.0,
    ],
    [
        -1777.0 / 4100.0,
        0.0,
        0.0,
        -341.0 / 164.0,
        4496.0 / 1025.0,
        -289.0 / 82.0,
        2193.0 / 4100.0,
        51.0 / 82.0,
        33.0 / 164.0,
        12.0 / 41.0,
        0.0,
        1.0,
    ],
];

/// 8th-order weights (the propagated solution).
const RKF78_B8: [f64; 13] = [
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    34.0 / 105.0,
    9.0 / 35.0,
    9.0 / 35.0,
    9.0 / 280.0,
    9.0 / 280.0,
    0.0,
    41.0 / 840.0,
    41.0 / 840.0,
];

/// The classical error estimate: (41/840)(k1 + k11 - k12 - k13) * dt.
fn rkf78_step(
    params: &SystemParams,
    z: &ReducedState,
    dt: f64,
) -> Result<(ReducedState, f64)> {
    let mut k: Vec<ReducedState> = Vec::with_capacity(13);
    for i in 0..13 {
        let mut zi = *z;
        for (j, kj) in k.iter().enumerate() {
            let a = RKF78_A[i][j];
            if a != 0.0 {
                zi = add_scaled(&zi, kj, a * dt);
            }
        }
        let _ = RKF78_C[i]; // autonomous field; stage time unused
        k.push(model::vector_field(params, &zi)?);
    }
    let mut out = *z;
    for (i, ki) in k.iter().enumerate() {
        if RKF78_B8[i] != 0.0 {
            out = add_scaled(&out, ki, RKF78_B8[i] * dt);
        }
    }
    let err_state = {
        let mut e = ReducedState::zero();
        e = add_scaled(&e, &k[0], 1.0);
        e = add_scaled(&e, &k[10], 1.0);
        e = add_scaled(&e, &k[11], -1.0);
        e = add_scaled(&e, &k[12], -1.0);
        e
    };
    let err = err_state
        .to_flat()
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs()))
        * (41.0 / 840.0)
        * dt.abs();
    Ok((out, err))
}

/// Integrate from `z0` to `t_end` with step `dt` (initial step for the
/// adaptive method). Sampling happens at every accepted step.
pub fn integrate(
    params: &SystemParams,
    z0: &ReducedState,
    t_end: f64,
    dt: f64,
    method: Method,
) -> Result<IntegrationReport> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::Integration(format!(
            "need dt > 0 and t_end > 0, got dt = {}, t_end = {}",
            dt, t_end
        )));
    }
    // Validate z0 before starting.
    model::separations(params, &z0.lambda, &z0.mu)?;
    let h0 = model::hamiltonian(params, z0)?;
    let c0 = model::casimirs(z0);
    let l_init = model::total_angular_momentum(z0);
    let base = DriftBase {
        h: h0,
        half_l0_sq: c0.half_l0_sq,
        half_pi1_sq: c0.half_pi1_sq,
        half_pi2_sq: c0.half_pi2_sq,
        l: l_init,
        l_norm: l_init.norm(),
        pi0_3: c0.pi0_3,
    };
    let mut report = IntegrationReport {
        times: Vec::new(),
        states: Vec::new(),
        drift_h: Vec::new(),
        drift_half_l0_sq: Vec::new(),
        drift_half_pi1_sq: Vec::new(),
        drift_half_pi2_sq: Vec::new(),
        drift_l: Vec::new(),
        drift_pi0_3: Vec::new(),
        aborted: None,
    };
    record(&mut report, &base, params, 0.0, z0);

    let mut t = 0.0;
    let mut z = *z0;
    let mut h = dt;
    let min_step = 1e-14 * t_end;
    if let Method::Rk4 = method {
        // Fixed-step path with integer step accounting, so a run of
        // n = t_end/dt steps samples exactly n+1 states.
        let n_steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
        for i in 1..=n_steps {
            let target = if i == n_steps { t_end } else { i as f64 * dt };
            match rk4_step(params, &z, target - t) {
                Ok(next) => {
                    z = next;
                    t = target;
                    record(&mut report, &base, params, t, &z);
                }
                Err(Error::Collision { pair, separation }) => {
                    report.aborted = Some(Abort::Collision(format!(
                        "{} at {:e} (t = {})",
                        pair, separation, t
                    )));
                    return Ok(report);
                }
                Err(e) => return Err(e),
            }
        }
        return Ok(report);
    }
    while t < t_end {
        let step = h.min(t_end - t);
        match method {
            Method::Rk4 => unreachable!("fixed-step path handled above"),
            Method::Rkf78 { tol } => {
                match rkf78_step(params, &z, step) {
                    Ok((next, err)) => {
                        let scale = z.scale();
                        let limit = tol * scale;
                        if err <= limit || step <= min_step {
                            z = next;
                            t += step;
                            record(&mut report, &base, params, t, &z);
                        }
                        // PI-free classic step control with safety factor.
                        let ratio = if err > 0.0 { limit / err } else { 4.0 };
                        h = (step * 0.9 * ratio.powf(1.0 / 8.0)).clamp(step * 0.1, step * 4.0);
                        if h < min_step {
                            report.aborted = Some(Abort::StepUnderflow { t, dt: h });
                            return Ok(report);
                        }
                    }
                    Err(Error::Collision { pair, separation }) => {
                        report.aborted = Some(Abort::Collision(format!(
                            "{} at {:e} (t = {})",
                            pair, separation, t
                        )));
                        return Ok(report);
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(report)
}

/// CSV emission: `t`, the 21 state columns in flat order, then the six
/// drift columns. Headers documented in the README.
pub fn report_csv_header() -> String {
    let mut cols = vec!["t".to_string()];
    let names = ["Pi1", "Pi2", "Pi0", "lambda", "p_lambda", "mu", "p_mu"];
    for n in names {
        for ax in ["x", "y", "z"] {
            cols.push(format!("{n}_{ax}"));
        }
    }
    for d in [
        "drift_H",
        "drift_half_L0_sq",
        "drift_half_Pi1_sq",
        "drift_half_Pi2_sq",
        "drift_L",
        "drift_pi0_3",
    ] {
        cols.push(d.to_string());
    }
    cols.join(",")
}

pub fn report_to_csv(report: &IntegrationReport) -> String {
    let mut out = String::new();
    out.push_str(&report_csv_header());
    out.push('\n');
    for (i, t) in report.times.iter().enumerate() {
        let mut row = vec![format!("{:.17e}", t)];
        for c in report.states[i].to_flat() {
            row.push(format!("{:.17e}", c));
        }
        for series in [
            &report.drift_h,
            &report.drift_half_l0_sq,
            &report.drift_half_pi1_sq,
            &report.drift_half_pi2_sq,
            &report.drift_l,
            &report.drift_pi0_3,
        ] {
            row.push(format!("{:.17e}", series[i]));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vec3;

    fn base_params() -> SystemParams {
        SystemParams::new(
            1.0, 0.005, 0.008, 1.0, 0.05, 0.06, 1e-5, 1.02e-5, 2e-5, 2.03e-5, 0.01,
        )
        .unwrap()
    }

    /// Planar orbit with axis-aligned spins: the invariant manifold on
    /// which the stored L components are conserved (no frame rotation of
    /// transverse angular momentum). The in-plane kick makes the pair
    /// orbit eccentric enough for measurable truncation error.
    fn bound_orbit_setup() -> (SystemParams, ReducedState) {
        let params = base_params();
        let eq = crate::lagrange::build_equilateral(&params, 1.0, 1).unwrap();
        let mut z = eq.state;
        z.p_lambda.x += 0.25 * z.p_lambda.norm();
        z.p_mu.y += 0.05 * z.p_mu.norm();
        (params, z)
    }

    /// Tumbling variant: transverse rotor and body spins exercise the
    /// Casimir conservation nontrivially (the L components then rotate
    /// with the frame and are checked elsewhere).
    fn tumbling_orbit_setup() -> (SystemParams, ReducedState) {
        let (params, mut z) = bound_orbit_setup();
        z.pi0.x += 1e-3 * z.pi0.norm();
        z.pi1.x += 0.3 * z.pi1.norm();
        z.pi2.y += 0.3 * z.pi2.norm();
        (params, z)
    }

    #[test]
    fn rk4_conserves_casimirs_and_h() {
        let (params, z0) = tumbling_orbit_setup();
        let report = integrate(&params, &z0, 10.0, 1e-3, Method::Rk4).unwrap();
        assert!(report.completed());
        assert_eq!(report.times.len(), 10_001);
        let m = |v: &Vec<f64>| v.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        for series in [
            &report.drift_half_l0_sq,
            &report.drift_half_pi1_sq,
            &report.drift_half_pi2_sq,
            &report.drift_pi0_3,
        ] {
            assert!(m(series) <= 1e-9, "casimir drift {}", m(series));
        }
        assert!(report.max_drift_h() <= 1e-8, "{}", report.max_drift_h());
    }

    #[test]
    fn rk4_conserves_l_components_on_planar_manifold() {
        let (params, z0) = bound_orbit_setup();
        let report = integrate(&params, &z0, 10.0, 1e-3, Method::Rk4).unwrap();
        assert!(report.completed());
        assert!(report.max_casimir_drift() <= 1e-9, "{}", report.max_casimir_drift());
    }

    #[test]
    fn rk4_halving_dt_shows_order_four() {
        // Steps sized so the truncation-error drift sits well above
        // roundoff at both resolutions.
        let (params, z0) = bound_orbit_setup();
        let coarse = integrate(&params, &z0, 8.0, 1.6e-2, Method::Rk4).unwrap();
        let fine = integrate(&params, &z0, 8.0, 8e-3, Method::Rk4).unwrap();
        let ratio = coarse.max_drift_h() / fine.max_drift_h();
        assert!(
            (12.0..=20.0).contains(&ratio),
            "H-drift ratio {} outside [12, 20] (coarse {:e}, fine {:e})",
            ratio,
            coarse.max_drift_h(),
            fine.max_drift_h()
        );
    }

    #[test]
    fn rk4_time_reversal_returns_to_start() {
        let (params, z0) = bound_orbit_setup();
        let fwd = integrate(&params, &z0, 2.0, 1e-3, Method::Rk4).unwrap();
        let mut back = *fwd.final_state();
        // Reverse momenta and rotor state; the field is time-reversible
        // under (p, Pi, l) -> -(p, Pi, l).
        let mut params_rev = params.clone();
        params_rev.l = -params.l;
        back.p_lambda = -back.p_lambda;
        back.p_mu = -back.p_mu;
        back.pi0 = -back.pi0;
        back.pi1 = -back.pi1;
        back.pi2 = -back.pi2;
        let ret = integrate(&params_rev, &back, 2.0, 1e-3, Method::Rk4).unwrap();
        let mut z_ret = *ret.final_state();
        z_ret.p_lambda = -z_ret.p_lambda;
        z_ret.p_mu = -z_ret.p_mu;
        z_ret.pi0 = -z_ret.pi0;
        z_ret.pi1 = -z_ret.pi1;
        z_ret.pi2 = -z_ret.pi2;
        let diff = z_ret
            .to_flat()
            .iter()
            .zip(z0.to_flat())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff <= 1e-8 * z0.scale(), "round trip diff {}", diff);
    }

    #[test]
    fn rkf78_matches_rk4_on_smooth_orbit() {
        let (params, z0) = bound_orbit_setup();
        let adaptive = integrate(&params, &z0, 2.0, 1e-2, Method::Rkf78 { tol: 1e-12 }).unwrap();
        let reference = integrate(&params, &z0, 2.0, 2e-4, Method::Rk4).unwrap();
        let diff = adaptive
            .final_state()
            .to_flat()
            .iter()
            .zip(reference.final_state().to_flat())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff <= 1e-8 * z0.scale(), "diff {}", diff);
        assert!(adaptive.completed());
    }

    #[test]
    fn collision_aborts_with_partial_report() {
        let params = SystemParams::spherical(1.0, 1.0, 1.0, 1.0)
            .unwrap()
            .with_collision_eps(1e-2);
        // Radial infall of the pair: lambda shrinks to zero.
        let z = ReducedState {
            lambda: Vec3::new(0.05, 0.0, 0.0),
            mu: Vec3::new(0.0, 2.0, 0.0),
            p_lambda: Vec3::new(-0.5, 0.0, 0.0),
            ..ReducedState::zero()
        };
        let report = integrate(&params, &z, 10.0, 1e-3, Method::Rk4).unwrap();
        assert!(matches!(report.aborted, Some(Abort::Collision(_))));
        assert!(!report.times.is_empty());
        assert!(*report.times.last().unwrap() < 10.0);
    }

    #[test]
    fn csv_shape_matches_header() {
        let (params, z0) = bound_orbit_setup();
        let report = integrate(&params, &z0, 0.01, 1e-3, Method::Rk4).unwrap();
        let csv = report_to_csv(&report);
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert_eq!(header.split(',').count(), 1 + 21 + 6);
        for line in lines {
            assert_eq!(line.split(',').count(), 1 + 21 + 6);
        }
    }
}
