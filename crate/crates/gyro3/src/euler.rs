//! Eulerian (collinear) relative equilibria: the h1/h2 balance condition,
//! its polynomial reductions (the spherical quintic and the degree-9
//! equation), bifurcation classification over (k, beta2), and state
//! construction.
//!
//! The master condition is the h1/h2 balance; every polynomial form here
//! is derived from it by clearing denominators and cross-checked against
//! the printed specializations, several of which carry typos (see the
//! fixture functions and their tests).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ReducedState, SystemParams, Vec3};
use crate::polyroot::{self, RealPoly};
use crate::solution::{EquilibriumSolution, SolutionKind};

/// The three collinear orderings. The interval of the line-ratio
/// parameter rho determines the ordering: the gyrostat sits at
/// `mu = ((1+rho) m2 + rho m1)/M2 lambda`, so the body-1 and body-2
/// distances are |rho| |lambda| and |1+rho| |lambda|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EulerConfig {
    /// rho > 0: S2, S1, S0 along the line (letter "c").
    S2S1S0,
    /// -1 < rho < 0: the gyrostat between the bodies (letter "b").
    S2S0S1,
    /// rho < -1: S0, S2, S1 (letter "a").
    S0S2S1,
}

impl EulerConfig {
    /// Interval letter used by the CLI: a = (-inf, -1), b = (-1, 0),
    /// c = (0, +inf).
    pub fn letter(self) -> char {
        match self {
            EulerConfig::S0S2S1 => 'a',
            EulerConfig::S2S0S1 => 'b',
            EulerConfig::S2S1S0 => 'c',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'a' => Some(EulerConfig::S0S2S1),
            'b' => Some(EulerConfig::S2S0S1),
            'c' => Some(EulerConfig::S2S1S0),
            _ => None,
        }
    }

    /// Signs (sgn(rho), sgn(1+rho)) on the configuration interval.
    pub fn signs(self) -> (f64, f64) {
        match self {
            EulerConfig::S2S1S0 => (1.0, 1.0),
            EulerConfig::S2S0S1 => (-1.0, 1.0),
            EulerConfig::S0S2S1 => (-1.0, -1.0),
        }
    }

    /// Open interval of admissible rho; infinities are realized by the
    /// caller via Cauchy bounds.
    pub fn interval(self) -> (f64, f64) {
        match self {
            EulerConfig::S2S1S0 => (0.0, f64::INFINITY),
            EulerConfig::S2S0S1 => (-1.0, 0.0),
            EulerConfig::S0S2S1 => (f64::NEG_INFINITY, -1.0),
        }
    }

    pub fn contains(self, rho: f64) -> bool {
        let (a, b) = self.interval();
        rho > a && rho < b
    }

    pub fn from_rho(rho: f64) -> Option<Self> {
        [EulerConfig::S2S1S0, EulerConfig::S2S0S1, EulerConfig::S0S2S1]
            .into_iter()
            .find(|c| c.contains(rho))
    }

    pub fn all() -> [EulerConfig; 3] {
        [EulerConfig::S2S1S0, EulerConfig::S2S0S1, EulerConfig::S0S2S1]
    }
}

impl std::fmt::Display for EulerConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EulerConfig::S2S1S0 => "S2S1S0",
            EulerConfig::S2S0S1 => "S2S0S1",
            EulerConfig::S0S2S1 => "S0S2S1",
        };
        write!(f, "{}", s)
    }
}

/// sgn with the convention sgn(x) = 1 for x > 0, -1 for x <= 0.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// The collinear mass weight: `mu_e = w(rho)/M2 * lambda_e` with
/// `w = (1+rho) m2 + rho m1`. This is the weight consistent with
/// `mu - (m2/M2) lambda = rho lambda`.
pub fn mu_weight(params: &SystemParams, rho: f64) -> f64 {
    (1.0 + rho) * params.m2 + rho * params.m1
}

/// The alternative weight printed in the sufficient-condition display,
/// `(1+rho) m1 + rho m2`; kept only for the comparison test that rejects
/// it (the rho = -1/2 symmetry root fails under it for m1 = m2).
pub fn mu_weight_prop3_variant(params: &SystemParams, rho: f64) -> f64 {
    (1.0 + rho) * params.m1 + rho * params.m2
}

/// Radial force coefficients along the line: at a collinear point,
/// `grad_lambda V = h1 lambda` and `grad_mu V = h2 lambda`.
pub fn h_functions(params: &SystemParams, rho: f64, a: f64) -> Result<(f64, f64)> {
    if rho == 0.0 || rho == -1.0 {
        return Err(Error::RhoAtPole(rho));
    }
    let h2 = params.m0 * h2_over_m0(params, rho, a);
    Ok((h1(params, rho, a), h2))
}

fn h1(params: &SystemParams, rho: f64, a: f64) -> f64 {
    let g = params.g;
    let m2s = params.mass_pair();
    let (s0, s1) = (sgn(rho), sgn(1.0 + rho));
    let a3 = a.powi(3);
    let a2 = a * a;
    g * params.m1 * params.m2 / a3
        + (g * params.m0 * params.m1 * s1 / (m2s * a3))
            * (params.m2 / (1.0 + rho).powi(2) + params.beta2() / ((1.0 + rho).powi(4) * a2))
        - (g * params.m0 * params.m2 * s0 / (m2s * a3))
            * (params.m1 / rho.powi(2) + params.beta1() / (rho.powi(4) * a2))
}

/// h2 divided by m0; finite in the restricted limit.
fn h2_over_m0(params: &SystemParams, rho: f64, a: f64) -> f64 {
    let g = params.g;
    let (s0, s1) = (sgn(rho), sgn(1.0 + rho));
    let a3 = a.powi(3);
    let a2 = a * a;
    (g * s1 / a3) * (params.m2 / (1.0 + rho).powi(2) + params.beta2() / (a2 * (1.0 + rho).powi(4)))
        + (g * s0 / a3) * (params.m1 / rho.powi(2) + params.beta1() / (a2 * rho.powi(4)))
}

/// Residual of the collinear balance condition
/// `m0 M2 w(rho) h1 - m1 m2 M1 h2` (zero exactly at Eulerian equilibria).
/// In the restricted limit the shared m0 factor is divided out.
pub fn euler_condition(params: &SystemParams, rho: f64, a: f64) -> Result<f64> {
    if rho == 0.0 || rho == -1.0 {
        return Err(Error::RhoAtPole(rho));
    }
    let w = mu_weight(params, rho);
    let h1v = h1(params, rho, a);
    let h2m0 = h2_over_m0(params, rho, a);
    // Both sides carry one power of m0; cancel it so m0 = 0 stays meaningful.
    Ok(params.mass_pair() * w * h1v - params.m1 * params.m2 * params.mass_total() * h2m0)
}

/// Same residual with the rejected weight variant; see
/// [`mu_weight_prop3_variant`].
pub fn euler_condition_prop3_variant(params: &SystemParams, rho: f64, a: f64) -> Result<f64> {
    if rho == 0.0 || rho == -1.0 {
        return Err(Error::RhoAtPole(rho));
    }
    let w = mu_weight_prop3_variant(params, rho);
    let h1v = h1(params, rho, a);
    let h2m0 = h2_over_m0(params, rho, a);
    Ok(params.mass_pair() * w * h1v - params.m1 * params.m2 * params.mass_total() * h2m0)
}

/// The spherical-case quintic with the sgn constants resolved for the
/// configuration interval (ascending coefficients).
fn quintic_coeffs(m0: f64, m1: f64, m2: f64, config: EulerConfig) -> RealPoly {
    let (s0, s1) = config.signs();
    RealPoly::new(vec![
        -(m0 * s0 + m1 * s0),
        -(3.0 * s0 * m0 + 2.0 * s0 * m1),
        m2 - m2 * s1 - m1 * s0 - 3.0 * m0 * s0,
        3.0 * m2 + m1 + m0 * (s1 - s0),
        3.0 * m2 + 2.0 * m1,
        m1 + m2,
    ])
}

/// Degree-5 polynomial whose root in the configuration interval is the
/// spherical Eulerian equilibrium. Requires C_i = A_i.
pub fn spherical_quintic(params: &SystemParams, config: EulerConfig) -> Result<RealPoly> {
    let tol = 1e-12 * (params.a1.max(params.c1).max(params.a2).max(params.c2));
    params.require_spherical(tol)?;
    Ok(quintic_coeffs(params.m0, params.m1, params.m2, config))
}

/// The per-case quintics as printed in the case-by-case proposition.
/// Cases 2 and 3 disagree with the master specialization (case 2 drops a
/// 2 m0 rho^3 term and gains 2 m2 rho^2; case 3 swaps m1/m2 in rho^4 and
/// shifts the m0/m2 terms); the master form is authoritative, these are
/// comparison fixtures.
pub fn printed_case_quintic(m0: f64, m1: f64, m2: f64, config: EulerConfig) -> RealPoly {
    match config {
        EulerConfig::S2S1S0 => RealPoly::new(vec![
            -(m0 + m1),
            -(3.0 * m0 + 2.0 * m1),
            -(3.0 * m0 + m1),
            3.0 * m2 + m1,
            3.0 * m2 + 2.0 * m1,
            m1 + m2,
        ]),
        EulerConfig::S2S0S1 => RealPoly::new(vec![
            m0 + m1,
            3.0 * m0 + 2.0 * m1,
            3.0 * m0 + 2.0 * m2 + m1,
            3.0 * m2 + m1,
            3.0 * m2 + 2.0 * m1,
            m1 + m2,
        ]),
        EulerConfig::S0S2S1 => RealPoly::new(vec![
            m0 + m1,
            3.0 * m0 + 2.0 * m1,
            3.0 * m0 + m1,
            2.0 * m0 + 3.0 * m2 + m1,
            3.0 * m1 + 2.0 * m2,
            m1 + m2,
        ]),
    }
}

/// Build the degree-9 collinear condition polynomial
/// `N(rho) = beta2 q(rho) - m1 m2 a^2 rho^2 (1+rho)^2 p(rho)`
/// by clearing denominators of the h1/h2 balance (one shared m0 power
/// divided out, so m0 = 0 is the exact restricted limit).
///
/// `p` coincides with the spherical quintic; `q` is the derived
/// oblateness weight polynomial (the printed one drops an m2 factor on
/// its rho^3 and rho^2 terms; see [`printed_q`]).
pub fn nine_degree_poly(
    params: &SystemParams,
    config: EulerConfig,
    beta1: f64,
    beta2: f64,
    a: f64,
) -> RealPoly {
    let (m0, m1, m2) = (params.m0, params.m1, params.m2);
    let m2s = m1 + m2;
    let m1s = m0 + m1 + m2;
    let (s0, s1) = config.signs();
    let a2 = a * a;

    let rho = RealPoly::monomial(1.0, 1);
    let rho2 = RealPoly::monomial(1.0, 2);
    let rho4 = RealPoly::monomial(1.0, 4);
    let one_plus = RealPoly::new(vec![1.0, 1.0]);
    let one_plus2 = one_plus.mul(&one_plus);
    let one_plus4 = one_plus2.mul(&one_plus2);
    let w = RealPoly::new(vec![m2, m2s]); // (1+rho) m2 + rho m1
    let _ = &rho;

    // u = m2 a^2 rho^4 (1+rho)^2 + beta2 rho^4   (body-2 radial strength, cleared)
    let u = rho4
        .mul(&one_plus2)
        .scale(m2 * a2)
        .add(&rho4.scale(beta2));
    // v = m1 a^2 rho^2 (1+rho)^4 + beta1 (1+rho)^4
    let v = rho2
        .mul(&one_plus4)
        .scale(m1 * a2)
        .add(&one_plus4.scale(beta1));

    // E = M2 W m1 m2 a^2 rho^4 (1+rho)^4
    //     + m0 W [ m1 s1 u - m2 s0 v ]
    //     - m1 m2 M1 [ s1 u + s0 v ]
    let term1 = w
        .mul(&rho4)
        .mul(&one_plus4)
        .scale(m2s * m1 * m2 * a2);
    let term2 = w.mul(&u.scale(m1 * s1).sub(&v.scale(m2 * s0))).scale(m0);
    let term3 = u.scale(s1).add(&v.scale(s0)).scale(m1 * m2 * m1s);
    let e = term1.add(&term2).sub(&term3);
    e.scale(-1.0 / m2s)
}

/// The oblateness weight polynomial q(rho) of the degree-9 equation,
/// derived from the balance condition with `beta1 = k beta2`.
pub fn derived_q(params: &SystemParams, config: EulerConfig, k: f64) -> RealPoly {
    let (m0, m1, m2) = (params.m0, params.m1, params.m2);
    let m2s = m1 + m2;
    let m1s = m0 + m1 + m2;
    let (s0, s1) = config.signs();
    let rho4 = RealPoly::monomial(1.0, 4);
    let one_plus = RealPoly::new(vec![1.0, 1.0]);
    let one_plus4 = one_plus.mul(&one_plus).mul(&one_plus).mul(&one_plus);
    let w = RealPoly::new(vec![m2, m2s]);
    // dE/dbeta2 = s1 m1 rho^4 (m0 W - m2 M1); dE/dbeta1 = -s0 m2 (1+rho)^4 (m0 W + m1 M1)
    let db2 = rho4
        .mul(&w.scale(m0).add(&RealPoly::constant(-m2 * m1s)))
        .scale(s1 * m1);
    let db1 = one_plus4
        .mul(&w.scale(m0).add(&RealPoly::constant(m1 * m1s)))
        .scale(-s0 * m2);
    db2.add(&db1.scale(k)).scale(-1.0 / m2s)
}

/// q(rho) exactly as printed (missing the m2 factor on the rho^3 and
/// rho^2 terms); comparison fixture only.
pub fn printed_q(params: &SystemParams, config: EulerConfig, k: f64) -> RealPoly {
    let (m0, m1, m2) = (params.m0, params.m1, params.m2);
    let (s0, s1) = config.signs();
    RealPoly::new(vec![
        k * s0 * m2 * (m0 + m1),
        k * s0 * m2 * (4.0 * m1 + 5.0 * m0),
        2.0 * k * s0 * (3.0 * m1 + 5.0 * m0),
        2.0 * k * s0 * (2.0 * m1 + 5.0 * m0),
        m2 * (s1 * m1 + 5.0 * s0 * m0 * k + k * m1 * s0),
        m0 * (k * s0 * m2 - s1 * m1),
    ])
}

/// The printed small-m0 restricted polynomials p1, q1. The mass fraction
/// argument is m2/(m1+m2): under that reading the printed p1 equals the
/// restricted limit of the quintic divided by M2.
pub fn printed_p1(mu_frac_m2: f64, config: EulerConfig) -> RealPoly {
    let mu = mu_frac_m2;
    let (s0, s1) = config.signs();
    RealPoly::new(vec![
        -(1.0 - mu) * s0,
        -2.0 * s0 * (1.0 - mu),
        mu - mu * s1 - (1.0 - mu) * s0,
        1.0 + 2.0 * mu,
        2.0 + mu,
        1.0,
    ])
}

pub fn printed_q1(k: f64, config: EulerConfig) -> RealPoly {
    let (s0, s1) = config.signs();
    RealPoly::new(vec![
        s0 * k,
        4.0 * s0 * k,
        6.0 * s0 * k,
        4.0 * s0 * k,
        s1 + s0 * k,
    ])
}

/// Bounded version of the configuration interval: infinities replaced by
/// the Cauchy root bound of `p`, and the finite endpoints (the rho = 0
/// and rho = -1 poles of the balance condition, where cleared
/// denominators plant spurious roots) pulled inward.
fn bounded_interval(p: &RealPoly, config: EulerConfig) -> (f64, f64) {
    let bound = p.cauchy_bound();
    let (a, b) = config.interval();
    let shrink = 1e-9;
    let lo = if a.is_finite() { a + shrink } else { -bound - 2.0 };
    let hi = if b.is_finite() { b - shrink } else { bound + 2.0 };
    (lo, hi)
}

/// Count collinear equilibrium candidates (roots of the degree-9
/// polynomial, or of the quintic when both betas vanish) in the
/// configuration interval.
pub fn count_roots(
    params: &SystemParams,
    config: EulerConfig,
    beta1: f64,
    beta2: f64,
    a: f64,
) -> Result<usize> {
    let p = if beta1 == 0.0 && beta2 == 0.0 {
        quintic_coeffs(params.m0, params.m1, params.m2, config)
    } else {
        nine_degree_poly(params, config, beta1, beta2, a)
    };
    let (lo, hi) = bounded_interval(&p, config);
    polyroot::sturm_count(&p, lo, hi)
}

/// Find and refine all collinear candidates in the interval.
pub fn find_roots(
    params: &SystemParams,
    config: EulerConfig,
    beta1: f64,
    beta2: f64,
    a: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    let p = if beta1 == 0.0 && beta2 == 0.0 {
        quintic_coeffs(params.m0, params.m1, params.m2, config)
    } else {
        nine_degree_poly(params, config, beta1, beta2, a)
    };
    let (lo, hi) = bounded_interval(&p, config);
    let report = polyroot::isolate_and_refine(&p, (lo, hi), tol)?;
    Ok(report.roots.iter().map(|r| r.value).collect())
}

/// Squared rotation rate of a collinear candidate, evaluated through two
/// independent routes that must agree (disagreement signals a
/// configuration-tag or root-quality bug).
///
/// Returns the value and its positivity flag.
pub fn omega_squared(
    params: &SystemParams,
    rho: f64,
    a: f64,
    config: EulerConfig,
) -> Result<(f64, bool)> {
    if !config.contains(rho) {
        return Err(Error::InvalidParams(format!(
            "rho = {} outside the {} interval",
            rho, config
        )));
    }
    let primary = params.mass_pair() * h1(params, rho, a) / (params.m1 * params.m2);
    let secondary = if params.is_spherical(1e-12) {
        // Case display: G M2/a^3 (1 + m0/M2 (s1/(1+rho)^2 - s0/rho^2)).
        let (s0, s1) = config.signs();
        (params.g * params.mass_pair() / a.powi(3))
            * (1.0
                + (params.m0 / params.mass_pair())
                    * (s1 / (1.0 + rho).powi(2) - s0 / rho.powi(2)))
    } else {
        // Second Lemma route: M1 h2 / (m0 w); stays defined through h2/m0.
        params.mass_total() * h2_over_m0(params, rho, a) / mu_weight(params, rho)
    };
    let scale = primary.abs().max(secondary.abs()).max(1e-300);
    if (primary - secondary).abs() > 1e-10 * scale {
        return Err(Error::RouteMismatch {
            what: "omega0^2",
            a: primary,
            b: secondary,
        });
    }
    Ok((primary, primary > 0.0))
}

/// One admitted collinear candidate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EulerRoot {
    pub rho: f64,
    pub omega0_sq: f64,
}

/// All collinear equilibria of one configuration at fixed |lambda| = a.
/// Candidates with non-positive omega^2 are kept in `rejected`, never
/// silently dropped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EulerBranch {
    pub config: EulerConfig,
    pub a: f64,
    pub roots: Vec<EulerRoot>,
    pub rejected: Vec<EulerRoot>,
}

/// Solve one configuration with the params' own beta1, beta2.
pub fn solve(params: &SystemParams, config: EulerConfig, a: f64) -> Result<EulerBranch> {
    let rhos = find_roots(params, config, params.beta1(), params.beta2(), a, 1e-13)?;
    let mut roots = Vec::new();
    let mut rejected = Vec::new();
    for rho in rhos {
        if !config.contains(rho) {
            continue;
        }
        let (w2, positive) = omega_squared(params, rho, a, config)?;
        let entry = EulerRoot {
            rho,
            omega0_sq: w2,
        };
        if positive {
            roots.push(entry);
        } else {
            rejected.push(entry);
        }
    }
    Ok(EulerBranch {
        config,
        a,
        roots,
        rejected,
    })
}

/// Populate the full 21-component state of a collinear equilibrium
/// (spins of the rigid bodies are free; `None` means synchronous with
/// the orbit).
pub fn build_equilibrium(
    params: &SystemParams,
    rho: f64,
    a: f64,
    config: EulerConfig,
    spins: Option<(f64, f64)>,
) -> Result<EquilibriumSolution> {
    if params.g2() == 0.0 {
        return Err(Error::RestrictedLimit("build_equilibrium"));
    }
    if !config.contains(rho) {
        return Err(Error::InvalidParams(format!(
            "rho = {} outside the {} interval",
            rho, config
        )));
    }
    // rho must actually solve the balance condition.
    let res = euler_condition(params, rho, a)?;
    let cond_scale = params.mass_pair()
        * mu_weight(params, rho).abs()
        * h1(params, rho, a).abs()
        + params.m1 * params.m2 * params.mass_total() * h2_over_m0(params, rho, a).abs();
    if res.abs() > 1e-8 * cond_scale.max(1e-300) {
        return Err(Error::NotEquilibrium {
            residual: res.abs(),
            tol: 1e-8 * cond_scale,
        });
    }
    let (w2, positive) = omega_squared(params, rho, a, config)?;
    if !positive {
        return Err(Error::OmegaSquaredNegative(w2));
    }
    let omega0 = w2.sqrt();
    let (omega1, omega2) = spins.unwrap_or((omega0, omega0));
    let mu_e = mu_weight(params, rho) / params.mass_pair() * a;
    let state = ReducedState {
        lambda: Vec3::new(a, 0.0, 0.0),
        mu: Vec3::new(mu_e, 0.0, 0.0),
        p_lambda: Vec3::new(0.0, params.g1() * omega0 * a, 0.0),
        p_mu: Vec3::new(0.0, params.g2() * omega0 * mu_e, 0.0),
        pi0: Vec3::new(0.0, 0.0, params.c0 * omega0 + params.l),
        pi1: Vec3::new(0.0, 0.0, params.c1 * omega1),
        pi2: Vec3::new(0.0, 0.0, params.c2 * omega2),
    };
    let field_residual = model::field_residual(params, &state)?;
    let torque_residual = model::gravity_torque(params, &state.lambda, &state.mu)?.norm();
    Ok(EquilibriumSolution {
        state,
        kind: SolutionKind::Euler { config, rho },
        omega0,
        field_residual,
        torque_residual,
    })
}

/// Third component of the total angular momentum per the construction
/// display: C2 w2 + C1 w1 + C0 w0 + l + g1 w0 a^2 + g2 w0 mu^2.
pub fn total_momentum_z(params: &SystemParams, rho: f64, a: f64, spins: (f64, f64)) -> Result<f64> {
    let config = EulerConfig::from_rho(rho).ok_or(Error::RhoAtPole(rho))?;
    let (w2, _) = omega_squared(params, rho, a, config)?;
    let omega0 = w2.abs().sqrt() * w2.signum();
    let mu_e = mu_weight(params, rho) / params.mass_pair() * a;
    Ok(params.c2 * spins.1
        + params.c1 * spins.0
        + params.c0 * omega0
        + params.l
        + params.g1() * omega0 * a * a
        + params.g2() * omega0 * mu_e * mu_e)
}

// ---------------------------------------------------------------------
// Bifurcation classification over (k, beta2)
// ---------------------------------------------------------------------

/// A critical point of the threshold function R with its value.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub rho: f64,
    pub value: f64,
    pub is_minimum: bool,
}

/// The rational threshold function `beta2 = R(rho) = Num(rho)/q(rho)` with
/// `Num = m1 m2 a^2 rho^2 (1+rho)^2 p(rho)`: the level sets of R are the
/// collinear equilibria at oblateness beta2 (with beta1 = k beta2).
pub struct ThresholdFn {
    pub numerator: RealPoly,
    pub denominator: RealPoly,
    config: EulerConfig,
}

impl ThresholdFn {
    /// `small_m0` replaces m0 by exact zero (the regime the bifurcation
    /// propositions are stated in).
    pub fn new(params: &SystemParams, config: EulerConfig, k: f64, a: f64, small_m0: bool) -> Self {
        let mut p = params.clone();
        if small_m0 {
            p.m0 = 0.0;
        }
        let quintic = quintic_coeffs(p.m0, p.m1, p.m2, config);
        let shape = RealPoly::new(vec![0.0, 0.0, 1.0])
            .mul(&RealPoly::new(vec![1.0, 2.0, 1.0]));
        let numerator = shape.mul(&quintic).scale(p.m1 * p.m2 * a * a);
        let denominator = derived_q(&p, config, k);
        ThresholdFn {
            numerator,
            denominator,
            config,
        }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        self.numerator.eval(rho) / self.denominator.eval(rho)
    }

    /// Local extrema of R inside the configuration interval, sorted by
    /// value. Poles of the denominator are excluded.
    pub fn critical_points(&self) -> Result<Vec<CriticalPoint>> {
        let c = self
            .numerator
            .derivative()
            .mul(&self.denominator)
            .sub(&self.numerator.mul(&self.denominator.derivative()));
        let (lo, hi) = bounded_interval(&c, self.config);
        if lo >= hi {
            return Ok(Vec::new());
        }
        let report = polyroot::isolate_and_refine(&c, (lo, hi), 1e-12)?;
        let mut out = Vec::new();
        for r in &report.roots {
            let rho = r.value;
            if !self.config.contains(rho) {
                continue;
            }
            let q = self.denominator.eval(rho);
            let qscale = self.denominator.max_abs_coeff() * rho.abs().max(1.0).powi(5);
            if q.abs() <= 1e-9 * qscale {
                continue; // rides a pole, not an extremum
            }
            let h = 1e-5 * (1.0 + rho.abs());
            let v = self.eval(rho);
            let before = self.eval(rho - h);
            let after = self.eval(rho + h);
            let is_minimum = before > v && after > v;
            let is_maximum = before < v && after < v;
            if is_minimum || is_maximum {
                out.push(CriticalPoint {
                    rho,
                    value: v,
                    is_minimum,
                });
            }
        }
        out.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
        Ok(out)
    }
}

/// The resultant-zero abscissa k0: the k at which the restricted
/// numerator root meets the denominator pole. For the restricted problem
/// it reduces to `k0 = -s0 s1 rho_p^4/(1+rho_p)^4` with rho_p the quintic
/// root in the interval.
pub fn k_resultant_zero(params: &SystemParams, config: EulerConfig) -> Result<f64> {
    let mut p = params.clone();
    p.m0 = 0.0;
    let quintic = quintic_coeffs(0.0, p.m1, p.m2, config);
    let (lo, hi) = bounded_interval(&quintic, config);
    let report = polyroot::isolate_and_refine(&quintic, (lo, hi), 1e-13)?;
    let rho_p = report
        .roots
        .first()
        .ok_or_else(|| Error::InvalidParams("no restricted quintic root in interval".into()))?
        .value;
    let (s0, s1) = config.signs();
    Ok(-s0 * s1 * rho_p.powi(4) / (1.0 + rho_p).powi(4))
}

/// Outcome of locating (k, beta2) against the bifurcation thresholds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EulerRegime {
    pub config: EulerConfig,
    pub k: f64,
    pub beta2: f64,
    /// Sturm root count of the degree-9 condition in the interval.
    pub count: usize,
    /// Clause label, e.g. "a)3".
    pub clause: String,
    /// Count the matched clause predicts; compare with `count`.
    pub clause_count: Option<usize>,
    /// R at its local maximum / minimum when present (xi1, xi2).
    pub xi1: Option<f64>,
    pub xi2: Option<f64>,
    pub k0: Option<f64>,
    /// Set when beta2 sits within tolerance of a clause boundary; the
    /// label then names both neighbours.
    pub boundary: Option<String>,
}

/// Classify the (k, beta2) point for one configuration: the family count
/// comes from Sturm counting of the derived degree-9 polynomial; the
/// clause label from the computed critical values of R.
pub fn classify_bifurcation(
    params: &SystemParams,
    config: EulerConfig,
    k: f64,
    beta2: f64,
    a: f64,
    small_m0: bool,
) -> Result<EulerRegime> {
    let mut p = params.clone();
    if small_m0 {
        p.m0 = 0.0;
    }
    let beta1 = k * beta2;
    let count = count_roots(&p, config, beta1, beta2, a)?;

    let thresholds = ThresholdFn::new(&p, config, k, a, small_m0);
    let crits = thresholds.critical_points()?;
    let xi_min = crits.iter().find(|c| c.is_minimum).map(|c| c.value);
    let xi_max = crits.iter().find(|c| !c.is_minimum).map(|c| c.value);
    let k0 = k_resultant_zero(&p, config).ok();

    let tol = 1e-9 * (1.0 + beta2.abs());
    let near = |threshold: Option<f64>| threshold.is_some_and(|t| (beta2 - t).abs() <= tol);

    // Clause tables of the two enumerated configurations (the third is
    // deduced from S2S1S0 in the source analysis and shares its table).
    let (clause, clause_count, boundary): (String, Option<usize>, Option<String>) = match config {
        EulerConfig::S2S1S0 | EulerConfig::S0S2S1 => {
            if k > 0.0 {
                let xi2 = xi_min;
                if near(xi2) {
                    ("a)2".into(), Some(1), Some("a)1 | a)3".into()))
                } else if beta2.abs() <= tol {
                    ("a)4".into(), Some(1), Some("a)3 | a)4".into()))
                } else if xi2.is_some_and(|x| beta2 < x) {
                    ("a)1".into(), Some(0), None)
                } else if beta2 < 0.0 {
                    ("a)3".into(), Some(2), None)
                } else {
                    ("a)4".into(), Some(1), None)
                }
            } else if k0.is_some_and(|k0| k > k0) {
                if beta2 > 0.0 {
                    let (lo, hi) = (xi_max, xi_min); // xi1 <= xi2 by value sort
                    if near(lo) || near(hi) {
                        ("b)2".into(), Some(1), Some("b)1 | b)3/b)4".into()))
                    } else if lo.is_some_and(|l| beta2 > l) && hi.is_some_and(|h| beta2 < h) {
                        ("b)1".into(), Some(0), None)
                    } else if hi.is_some_and(|h| beta2 > h) {
                        ("b)3".into(), Some(2), None)
                    } else {
                        ("b)4".into(), Some(2), None)
                    }
                } else {
                    ("c)1".into(), Some(1), None)
                }
            } else if beta2 > 0.0 {
                ("d)1".into(), Some(2), None)
            } else {
                ("e)1".into(), Some(1), None)
            }
        }
        EulerConfig::S2S0S1 => {
            if k > 0.0 {
                let xi2 = xi_min;
                if near(xi2) {
                    ("a)2".into(), Some(2), Some("a)1 | a)3".into()))
                } else if beta2.abs() <= tol {
                    ("a)4".into(), Some(1), Some("a)3 | a)4".into()))
                } else if xi2.is_some_and(|x| beta2 < x) {
                    ("a)1".into(), Some(1), None)
                } else if beta2 < 0.0 {
                    ("a)3".into(), Some(3), None)
                } else {
                    ("a)4".into(), Some(1), None)
                }
            } else if beta2 > 0.0 {
                let (lo, hi) = (xi_max, xi_min);
                if near(lo) || near(hi) {
                    ("b)2".into(), Some(1), Some("b)1 | b)3/b)4".into()))
                } else if lo.is_some_and(|l| beta2 > l) && hi.is_some_and(|h| beta2 < h) {
                    ("b)1".into(), Some(0), None)
                } else if hi.is_some_and(|h| beta2 > h) {
                    ("b)3".into(), Some(2), None)
                } else {
                    ("b)4".into(), Some(2), None)
                }
            } else {
                let xi2 = xi_min;
                if near(xi2) {
                    ("c)2".into(), Some(1), Some("c)1 | c)3".into()))
                } else if xi2.is_some_and(|x| beta2 > x) {
                    ("c)1".into(), Some(2), None)
                } else {
                    ("c)3".into(), Some(0), None)
                }
            }
        }
    };

    Ok(EulerRegime {
        config,
        k,
        beta2,
        count,
        clause,
        clause_count,
        xi1: xi_max,
        xi2: xi_min,
        k0,
        boundary,
    })
}
