//! Linear stability of relative equilibria: tangent-flow assembly (two
//! independent routes), characteristic polynomial via the
//! Faddeev-LeVerrier recurrence, eigenvalue extraction, Jordan-structure
//! probing at zero, and the closed-form coefficient sets of the spherical
//! special cases.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Mat3, ReducedState, SystemParams};
use crate::polyroot::RealPoly;

/// Closed-form Jacobian of the reduced field at any admissible state.
pub fn tangent_matrix(params: &SystemParams, z: &ReducedState) -> Result<DMatrix<f64>> {
    if params.g2() == 0.0 {
        return Err(Error::RestrictedLimit("tangent_matrix"));
    }
    let (gl, gm) = model::grad_potential(params, &z.lambda, &z.mu)?;
    let (vll, vlm, vmm) = model::hess_potential(params, &z.lambda, &z.mu)?;
    let omega0 = params.omega0(&z.pi0);
    let omega1 = model::Vec3::new(z.pi1.x / params.a1, z.pi1.y / params.a1, z.pi1.z / params.c1);
    let omega2 = model::Vec3::new(z.pi2.x / params.a2, z.pi2.y / params.a2, z.pi2.z / params.c2);
    let i0_inv = Mat3::from_diagonal(&model::Vec3::new(
        1.0 / params.a0,
        1.0 / params.a0,
        1.0 / params.c0,
    ));
    let i1_inv = Mat3::from_diagonal(&model::Vec3::new(
        1.0 / params.a1,
        1.0 / params.a1,
        1.0 / params.c1,
    ));
    let i2_inv = Mat3::from_diagonal(&model::Vec3::new(
        1.0 / params.a2,
        1.0 / params.a2,
        1.0 / params.c2,
    ));
    let h = model::hat;
    let eye = Mat3::identity();

    let mut u = DMatrix::zeros(21, 21);
    let mut set = |bi: usize, bj: usize, m: Mat3| {
        u.view_mut((3 * bi, 3 * bj), (3, 3)).copy_from(&m);
    };
    // Pi1, Pi2 rows
    set(0, 0, h(&z.pi1) * i1_inv - h(&omega1));
    set(1, 1, h(&z.pi2) * i2_inv - h(&omega2));
    // Pi0 row
    set(2, 2, h(&z.pi0) * i0_inv - h(&omega0));
    set(2, 3, -h(&gl) + h(&z.lambda) * vll + h(&z.mu) * vlm.transpose());
    set(2, 5, -h(&gm) + h(&z.lambda) * vlm + h(&z.mu) * vmm);
    // lambda row
    set(3, 2, h(&z.lambda) * i0_inv);
    set(3, 3, -h(&omega0));
    set(3, 4, eye / params.g1());
    // p_lambda row
    set(4, 2, h(&z.p_lambda) * i0_inv);
    set(4, 3, -vll);
    set(4, 4, -h(&omega0));
    set(4, 5, -vlm);
    // mu row
    set(5, 2, h(&z.mu) * i0_inv);
    set(5, 5, -h(&omega0));
    set(5, 6, eye / params.g2());
    // p_mu row
    set(6, 2, h(&z.p_mu) * i0_inv);
    set(6, 3, -vlm.transpose());
    set(6, 5, -vmm);
    set(6, 6, -h(&omega0));
    Ok(u)
}

/// Independent assembly of the same matrix through the bracket:
/// `U = B(z) Hess H + (dB . grad H)`.
pub fn tangent_matrix_poisson(params: &SystemParams, z: &ReducedState) -> Result<DMatrix<f64>> {
    if params.g2() == 0.0 {
        return Err(Error::RestrictedLimit("tangent_matrix_poisson"));
    }
    let (vll, vlm, vmm) = model::hess_potential(params, &z.lambda, &z.mu)?;
    let gh = model::grad_hamiltonian(params, z)?;
    let g = ReducedState::from_dvector(&gh);

    let mut hess = DMatrix::zeros(21, 21);
    let mut set_h = |bi: usize, bj: usize, m: Mat3| {
        hess.view_mut((3 * bi, 3 * bj), (3, 3)).copy_from(&m);
    };
    let diag_inv = |a: f64, c: f64| {
        Mat3::from_diagonal(&model::Vec3::new(1.0 / a, 1.0 / a, 1.0 / c))
    };
    set_h(0, 0, diag_inv(params.a1, params.c1));
    set_h(1, 1, diag_inv(params.a2, params.c2));
    set_h(2, 2, diag_inv(params.a0, params.c0));
    set_h(3, 3, vll);
    set_h(3, 5, vlm);
    set_h(5, 3, vlm.transpose());
    set_h(5, 5, vmm);
    set_h(4, 4, Mat3::identity() / params.g1());
    set_h(6, 6, Mat3::identity() / params.g2());

    let b = model::poisson_tensor(z);
    let mut u = b * hess;

    // dB/dz contracted with grad H: every state-dependent block of B is a
    // hat of one state slot, so each contributes -hat(g_slice) at the
    // (row, slot) position.
    let h = model::hat;
    let mut add = |bi: usize, bj: usize, m: Mat3| {
        let mut view = u.view_mut((3 * bi, 3 * bj), (3, 3));
        let sum = view.clone_owned() + m;
        view.copy_from(&sum);
    };
    add(0, 0, -h(&g.pi1));
    add(1, 1, -h(&g.pi2));
    add(2, 2, -h(&g.pi0));
    add(2, 3, -h(&g.lambda));
    add(2, 4, -h(&g.p_lambda));
    add(2, 5, -h(&g.mu));
    add(2, 6, -h(&g.p_mu));
    add(3, 3, -h(&g.pi0));
    add(4, 4, -h(&g.pi0));
    add(5, 5, -h(&g.pi0));
    add(6, 6, -h(&g.pi0));
    Ok(u)
}

/// Jacobian at a certified equilibrium: rejects states whose field
/// residual exceeds `1e-8 * scale`.
pub fn jacobian(params: &SystemParams, z_e: &ReducedState) -> Result<DMatrix<f64>> {
    let residual = model::field_residual(params, z_e)?;
    let tol = 1e-8 * z_e.scale();
    if residual > tol {
        return Err(Error::NotEquilibrium { residual, tol });
    }
    tangent_matrix(params, z_e)
}

/// Characteristic polynomial det(lambda I - A) by the Faddeev-LeVerrier
/// recurrence (monic, ascending coefficients).
pub fn char_poly(a: &DMatrix<f64>) -> Result<RealPoly> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "char_poly needs a square matrix");
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("char_poly input"));
    }
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * m;
        m += a * coeffs[n - k + 1];
        coeffs[n - k] = -m.trace() / k as f64;
    }
    Ok(RealPoly::new(coeffs))
}

/// Eigenvalues through the real Schur decomposition.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("eigenvalue input"));
    }
    let v = a.clone().complex_eigenvalues();
    Ok(v.iter().copied().collect())
}

/// All complex roots of a polynomial by Durand-Kerner iteration; used as
/// the companion-free fallback cross-check for [`eigenvalues`].
pub fn complex_roots(p: &RealPoly, iterations: usize) -> Vec<Complex64> {
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let lead = p.leading();
    let monic: Vec<Complex64> = (0..=n)
        .map(|k| Complex64::new(p.coeff(k) / lead, 0.0))
        .collect();
    let eval = |x: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    let radius = 1.0 + p.max_abs_coeff() / lead.abs();
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| radius * seed.powu(k as u32 + 1)).collect();
    for _ in 0..iterations {
        let prev = roots.clone();
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &rj) in prev.iter().enumerate() {
                if j != i {
                    denom *= prev[i] - rj;
                }
            }
            if denom.norm() > 0.0 {
                roots[i] = prev[i] - eval(prev[i]) / denom;
            }
        }
    }
    roots
}

/// Rank of a matrix by singular values above `rel_tol * sigma_max`.
fn numeric_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|s| **s > rel_tol * smax)
        .count()
}

/// Stability class of the linearized flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Some eigenvalue has positive real part.
    Unstable,
    /// Spectrum on the imaginary axis but a nilpotent block exists
    /// (secular polynomial growth; linearly unstable).
    SpectrallyStable,
    /// Spectrum on the imaginary axis and diagonalizable restriction.
    LinearlyStable,
}

/// One named inequality of the stability analysis with its value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub value: f64,
    pub satisfied: bool,
}

/// Full stability outcome at one equilibrium.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityVerdict {
    /// Monic characteristic polynomial coefficients, ascending (length 22).
    pub char_coeffs: Vec<f64>,
    /// Eigenvalues as (re, im) pairs.
    pub eigenvalues: Vec<[f64; 2]>,
    pub max_real_part: f64,
    pub zero_algebraic: usize,
    /// Dimension of ker U (geometric multiplicity of 0).
    pub zero_geometric: usize,
    /// rank(U) - rank(U^2): the number of Jordan blocks of size >= 2 at 0.
    pub zero_rank_defect: usize,
    pub classification: Classification,
    /// Some decisive quantity sits within tolerance of zero.
    pub marginal: bool,
    pub conditions: Vec<Condition>,
}

/// Eigenvalue-based classification shared by the Euler and Lagrange paths.
pub fn spectral_verdict(params: &SystemParams, z_e: &ReducedState) -> Result<StabilityVerdict> {
    let u = jacobian(params, z_e)?;
    spectral_verdict_of_matrix(&u)
}

pub fn spectral_verdict_of_matrix(u: &DMatrix<f64>) -> Result<StabilityVerdict> {
    let eigs = eigenvalues(u)?;
    let cp = char_poly(u)?;
    let scale = matrix_scale(u);
    let ztol = 1e-7 * scale;
    let retol = 1e-8 * scale;

    let max_real_part = eigs.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    let zero_algebraic = eigs.iter().filter(|e| e.norm() <= ztol).count();
    let n = u.nrows();
    let rank_u = numeric_rank(u, 1e-9);
    let rank_u2 = numeric_rank(&(u * u), 1e-9);
    let zero_geometric = n - rank_u;
    let zero_rank_defect = rank_u.saturating_sub(rank_u2);

    let mut marginal = false;
    let classification = if max_real_part > retol {
        if max_real_part <= 10.0 * retol {
            marginal = true;
        }
        Classification::Unstable
    } else {
        // On the axis: diagonalizable?
        let mut diagonalizable = zero_rank_defect == 0;
        if diagonalizable {
            // Probe each repeated nonzero imaginary cluster.
            let mut checked: Vec<f64> = Vec::new();
            for e in &eigs {
                if e.norm() <= ztol || e.im <= 0.0 {
                    continue;
                }
                let w = e.im;
                if checked.iter().any(|c| (c - w).abs() <= ztol) {
                    continue;
                }
                checked.push(w);
                let alg = eigs
                    .iter()
                    .filter(|x| (x.im - w).abs() <= ztol && x.re.abs() <= ztol)
                    .count()
                    * 2;
                if alg > 2 {
                    let shifted = u * u + DMatrix::identity(n, n) * (w * w);
                    let geo = n - numeric_rank(&shifted, 1e-9);
                    if geo < alg {
                        diagonalizable = false;
                        break;
                    }
                }
            }
        }
        if diagonalizable {
            Classification::LinearlyStable
        } else {
            Classification::SpectrallyStable
        }
    };

    Ok(StabilityVerdict {
        char_coeffs: cp.coeffs().to_vec(),
        eigenvalues: eigs.iter().map(|e| [e.re, e.im]).collect(),
        max_real_part,
        zero_algebraic,
        zero_geometric,
        zero_rank_defect,
        classification,
        marginal,
        conditions: Vec::new(),
    })
}

fn matrix_scale(u: &DMatrix<f64>) -> f64 {
    u.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300)
}

/// Oscillation rate of the free gyrostat block:
/// `Phi_0 = ((C0 - A0) w0 + l) / A0`.
pub fn phi0(params: &SystemParams, omega0: f64) -> f64 {
    ((params.c0 - params.a0) * omega0 + params.l) / params.a0
}

/// The rigid bodies carry no rotor, so their rate omits l:
/// `Phi_i = (C_i - A_i) w_i / A_i`.
pub fn phi_body(c: f64, a: f64, omega: f64) -> f64 {
    (c - a) * omega / a
}

/// Spin rates read off an axis-aligned equilibrium state.
pub fn spins_of_state(params: &SystemParams, z: &ReducedState) -> (f64, f64, f64) {
    let omega0 = (z.pi0.z - params.l) / params.c0;
    (omega0, z.pi1.z / params.c1, z.pi2.z / params.c2)
}

// ---------------------------------------------------------------------
// Spherical Lagrangian case
// ---------------------------------------------------------------------

/// The quartic constant of the spherical triangular case:
/// `q = 27 G^2 (m1 m0 + m2 m0 + m1 m2) / (4 Z^6)`.
pub fn lagrange_quartic_q(params: &SystemParams, z_len: f64) -> f64 {
    27.0 * params.g * params.g
        * (params.m1 * params.m0 + params.m2 * params.m0 + params.m1 * params.m2)
        / (4.0 * z_len.powi(6))
}

/// Expected eigenvalue multiset of the spherical triangular equilibrium:
/// zero (x5), the three Phi pairs, the triple orbital pair, and the roots
/// of `x^2 + w^2 x + q` mapped back to lambda.
pub fn lagrange_expected_eigenvalues(
    params: &SystemParams,
    z_e: &ReducedState,
) -> Vec<Complex64> {
    let z_len = z_e.lambda.norm();
    let w2 = params.g * params.mass_total() / z_len.powi(3);
    let q = lagrange_quartic_q(params, z_len);
    let (omega0, omega1, omega2) = spins_of_state(params, z_e);
    let mut out = vec![Complex64::new(0.0, 0.0); 5];
    let mut push_pair = |x: Complex64| {
        let lam = x.sqrt();
        out.push(lam);
        out.push(-lam);
    };
    push_pair(Complex64::new(-phi0(params, omega0).powi(2), 0.0));
    push_pair(Complex64::new(-phi_body(params.c1, params.a1, omega1).powi(2), 0.0));
    push_pair(Complex64::new(-phi_body(params.c2, params.a2, omega2).powi(2), 0.0));
    for _ in 0..3 {
        push_pair(Complex64::new(-w2, 0.0));
    }
    let disc = Complex64::new(w2 * w2 - 4.0 * q, 0.0).sqrt();
    push_pair((Complex64::new(-w2, 0.0) + disc) * 0.5);
    push_pair((Complex64::new(-w2, 0.0) - disc) * 0.5);
    out
}

/// Greedy nearest matching between two complex multisets; returns the
/// largest matched distance (infinite when sizes differ).
pub fn multiset_distance(expected: &[Complex64], actual: &[Complex64]) -> f64 {
    if expected.len() != actual.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; actual.len()];
    let mut worst = 0.0f64;
    // Match the largest expected values first to keep the greedy pairing stable.
    let mut order: Vec<usize> = (0..expected.len()).collect();
    order.sort_by(|&i, &j| {
        actual_norm(expected[j])
            .partial_cmp(&actual_norm(expected[i]))
            .unwrap()
    });
    for &i in &order {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for (j, &a) in actual.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (a - expected[i]).norm();
            if d < best {
                best = d;
                best_j = j;
            }
        }
        used[best_j] = true;
        worst = worst.max(best);
    }
    worst
}

fn actual_norm(c: Complex64) -> f64 {
    c.norm()
}

/// Routh-type spectral stability margin of the triangular family:
/// `(m0+m1+m2)^2 - 27 (m0 m1 + m0 m2 + m1 m2)`.
pub fn routh_margin(params: &SystemParams) -> f64 {
    let total = params.mass_total();
    total * total
        - 27.0
            * (params.m0 * params.m1 + params.m0 * params.m2 + params.m1 * params.m2)
}

/// Full stability analysis of a triangular equilibrium: numeric spectrum
/// first (numeric truth outranks the formula ledger), then the closed-form
/// condition set for the spherical and near-sphere paths.
pub fn lagrange_stability(params: &SystemParams, z_e: &ReducedState) -> Result<StabilityVerdict> {
    let mut verdict = spectral_verdict(params, z_e)?;
    let z_len = z_e.lambda.norm();
    let w2 = params.g * params.mass_total() / z_len.powi(3);
    let margin = routh_margin(params);
    let q71 = lagrange_quartic_q(params, z_len);
    verdict.conditions.push(Condition {
        name: "routh_27_margin".into(),
        value: margin,
        satisfied: margin >= 0.0,
    });
    verdict.conditions.push(Condition {
        name: "quartic_discriminant(w^4 - 4q)".into(),
        value: w2 * w2 - 4.0 * q71,
        satisfied: w2 * w2 - 4.0 * q71 >= 0.0,
    });
    verdict.conditions.push(Condition {
        name: "nilpotent_zero_block(rankU - rankU^2)".into(),
        value: verdict.zero_rank_defect as f64,
        satisfied: verdict.zero_rank_defect > 0,
    });
    if margin.abs() <= 1e-10 * params.mass_total().powi(2) {
        verdict.marginal = true;
    }

    if !params.is_spherical(1e-12) {
        // Near-sphere path: extract (m, n, p, q, r, s) from the spectrum
        // and evaluate the printed sign conditions.
        let eigs: Vec<Complex64> = verdict
            .eigenvalues
            .iter()
            .map(|e| Complex64::new(e[0], e[1]))
            .collect();
        let (omega0, omega1, omega2) = spins_of_state(params, z_e);
        let phis = [
            phi0(params, omega0),
            phi_body(params.c1, params.a1, omega1),
            phi_body(params.c2, params.a2, omega2),
        ];
        if let Some(f) = extract_even_factors(&eigs, w2, &phis) {
            let [m, n, p, q, r, s] = f;
            // The extracted s is structurally zero: the octic always
            // carries the nilpotent family pair at the origin (observed
            // across oblateness magnitudes), so its sign check runs with
            // an eigenvalue-noise tolerance tied to r.
            let s_noise = 1e-9 * r.abs().max(1.0);
            let c1 = p * p * q * q - 3.0 * r * p.powi(3) - 6.0 * p * p * s - 4.0 * q.powi(3)
                + 14.0 * p * q * r
                + 16.0 * q * s
                - 18.0 * r * r;
            let c2 = p * p * q * r - 48.0 * s * r - 9.0 * s * p.powi(3) + 32.0 * p * q * s
                - 4.0 * q * q * r
                + 3.0 * p * r * r;
            let quartic = RealPoly::new(vec![s, r, q, p, 1.0]);
            let disc_h = crate::polyroot::discriminant(&quartic).unwrap_or(f64::NAN);
            for (name, value, floor) in [
                ("sign_c1(p^2q^2-3rp^3-6p^2s-4q^3+14pqr+16qs-18r^2)", c1, 0.0),
                ("sign_c2(p^2qr-48sr-9sp^3+32pqs-4q^2r+3pr^2)", c2, 0.0),
                ("r_nonneg", r, 0.0),
                ("s_nonneg(structurally_zero)", s, s_noise),
                ("3p^2-8q", 3.0 * p * p - 8.0 * q, 0.0),
                ("pr-16s", p * r - 16.0 * s, 0.0),
                ("m_nonneg", m, 0.0),
                ("n_nonneg", n, 0.0),
                ("discrim_quartic_in_lambda^2", disc_h, 0.0),
            ] {
                verdict.conditions.push(Condition {
                    name: name.into(),
                    value,
                    satisfied: value >= -floor,
                });
            }
        }
        // First-order s and the mass-weighted oblateness criterion.
        let s_formula = 81.0 * params.g.powi(4) * params.m0 * params.mass_total().powi(2)
            * (params.beta1() * params.m1 + params.beta2() * params.m2)
            / 4.0;
        verdict.conditions.push(Condition {
            name: "near_sphere_s_first_order".into(),
            value: s_formula,
            satisfied: s_formula > 0.0,
        });
        let mass_weighted = params.m1 * (params.c1 - params.a1)
            + params.m2 * (params.c2 - params.a2);
        verdict.conditions.push(Condition {
            name: "m1(C1-A1)+m2(C2-A2)".into(),
            value: mass_weighted,
            satisfied: mass_weighted > 0.0,
        });
    }
    // Every relative equilibrium sits on a family (scale and body spins),
    // whose tangent carries a nilpotent zero pair: "linear stability" in
    // the stated sense is stability modulo that secular family drift.
    let axis_ok = verdict.classification != Classification::Unstable;
    let ledger_ok = verdict
        .conditions
        .iter()
        .all(|c| c.satisfied || c.name.starts_with("nilpotent"));
    verdict.conditions.push(Condition {
        name: "linearly_stable_modulo_family_drift".into(),
        value: if axis_ok && ledger_ok { 1.0 } else { 0.0 },
        satisfied: axis_ok && ledger_ok,
    });
    Ok(verdict)
}

/// Pull (m, n, p, q, r, s) of the even-polynomial factorization
/// `(x+m)(x+n)(x^4+px^3+qx^2+rx+s)` out of the computed spectrum, after
/// removing the zero cluster and the three Phi pairs. The (m, n) pair is
/// the one nearest the orbital `-w^2` (the assignment the near-sphere
/// expansion is anchored to).
fn extract_even_factors(eigs: &[Complex64], w2: f64, phis: &[f64; 3]) -> Option<[f64; 6]> {
    let scale = eigs.iter().map(|e| e.norm()).fold(0.0f64, f64::max).max(1e-300);
    let ztol = 1e-7 * scale;
    // One representative per +/- pair.
    let mut xs: Vec<Complex64> = eigs
        .iter()
        .filter(|e| e.norm() > ztol && (e.im > ztol || (e.im.abs() <= ztol && e.re > 0.0)))
        .map(|e| e * e)
        .collect();
    // Remove the Phi pairs (x = -Phi^2), nearest match each.
    for phi in phis {
        let target = Complex64::new(-phi * phi, 0.0);
        let (idx, _) = xs
            .iter()
            .enumerate()
            .map(|(i, x)| (i, (x - target).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
        xs.swap_remove(idx);
    }
    if xs.len() != 6 {
        return None;
    }
    // (m, n): the two x nearest -w^2.
    let mut mn = Vec::new();
    for _ in 0..2 {
        let target = Complex64::new(-w2, 0.0);
        let (idx, _) = xs
            .iter()
            .enumerate()
            .map(|(i, x)| (i, (x - target).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
        mn.push(-xs[idx].re);
        xs.swap_remove(idx);
    }
    // Remaining four: elementary symmetric functions give the quartic.
    let e1: Complex64 = xs.iter().sum();
    let mut e2 = Complex64::new(0.0, 0.0);
    let mut e3 = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in (i + 1)..4 {
            e2 += xs[i] * xs[j];
            for k in (j + 1)..4 {
                e3 += xs[i] * xs[j] * xs[k];
            }
        }
    }
    let e4: Complex64 = xs.iter().product();
    Some([
        mn[0], mn[1], -e1.re, e2.re, -e3.re, e4.re,
    ])
}

// ---------------------------------------------------------------------
// Spherical Eulerian case (configuration S0S2S1)
// ---------------------------------------------------------------------

/// Closed-form characteristic-polynomial coefficients of the spherical
/// collinear case in configuration S0S2S1.
///
/// The source displays are written in the positive distance ratio
/// `rho' = |1 + rho|` (gyrostat to the massive primary over the pair
/// separation), not the signed collinear parameter; this constructor
/// converts internally. Under that convention the `omega_e^2` display is
/// identically the balance-condition rate and the `p` display matches the
/// numeric spectrum to ~1e-11. The `q` display sits a few percent off the
/// numeric factorization and the r-numerator tables are print-damaged
/// (`r` keeps the complete-quartic `a2 rho'^3` reading; the literal
/// duplicated-exponent variant is carried alongside). Signs are reliable
/// throughout: p > 0, q > 0 numerically, r < 0 always, which is what the
/// instability argument consumes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EulerSphericalCoeffs {
    /// Location of the double pair; equals the balance rotation rate.
    pub omega_e_sq: f64,
    /// Validated closed form for the isolated (lambda^2 + p) pair.
    pub p: f64,
    /// Printed quartic coefficient; few-percent deviation from numerics.
    pub q: f64,
    /// Printed quartic constant, a2 rho'^3 reading; sign-reliable only.
    pub r: f64,
    pub a: [f64; 5],
    /// r with the literal duplicated rho'^4 exponent.
    pub r_rho4_reading: f64,
}

pub fn euler_spherical_coefficients(
    params: &SystemParams,
    rho: f64,
    a_len: f64,
) -> Result<EulerSphericalCoeffs> {
    params.require_spherical(1e-12 * params.a1.max(params.a2))?;
    if !(rho < -1.0) {
        return Err(Error::InvalidParams(format!(
            "coefficients are for configuration S0S2S1 (rho < -1), got {}",
            rho
        )));
    }
    let (m0, m1, m2, g) = (params.m0, params.m1, params.m2, params.g);
    let a3 = a_len.powi(3);
    let rp = -(1.0 + rho); // the displays' distance-ratio variable
    let omega_e_sq = g
        * ((m2 + m1) * rp.powi(4)
            + (2.0 * m1 + 2.0 * m2) * rp.powi(3)
            + (m2 + m1) * rp.powi(2)
            - 2.0 * m0 * rp
            - m0)
        / (a3 * (1.0 + rp).powi(2) * rp.powi(2));
    let denom3 = (1.0 + rp).powi(3) * rp.powi(3) * a3;
    let p = g
        * ((m2 + 4.0 * m0 + m1) * rp.powi(3)
            + (3.0 * m2 + 6.0 * m0) * rp.powi(2)
            + (4.0 * m0 + 3.0 * m2) * rp
            + m0
            + m2)
        / denom3;
    let q = g
        * (-2.0 * m1 * m2 * rp.powi(4)
            + (-2.0 * m0 * m1 + m1 * m1 + m2 * m2 - 2.0 * m1 * m2 - 2.0 * m0 * m2)
                * rp.powi(3)
            + (3.0 * m2 * m2 + m1 * m2 - 6.0 * m0 * m1) * rp.powi(2)
            + (-m1 * m2 + 3.0 * m2 * m2 + 2.0 * m0 * m2 - 4.0 * m0 * m1) * rp
            + (m2 * m2 - m0 * m1 + m0 * m2 - m1 * m2))
        / denom3;
    let a_coeffs = appendix_a_coefficients(m0, m1, m2);
    let denom_r = (1.0 + rp).powi(8) * rp.powi(8) * a_len.powi(9);
    let r_rho3 = g
        * g
        * (a_coeffs[0] * rp.powi(4)
            + a_coeffs[1] * rp.powi(3)
            + a_coeffs[2] * rp.powi(2)
            + a_coeffs[3] * rp
            + a_coeffs[4])
        / denom_r;
    let r_rho4 = g
        * g
        * ((a_coeffs[0] + a_coeffs[1]) * rp.powi(4)
            + a_coeffs[2] * rp.powi(2)
            + a_coeffs[3] * rp
            + a_coeffs[4])
        / denom_r;
    Ok(EulerSphericalCoeffs {
        omega_e_sq,
        p,
        q,
        r: r_rho3,
        a: a_coeffs,
        r_rho4_reading: r_rho4,
    })
}

/// Numeric (p, q, r) of the even-factor split, extracted from the
/// spectrum at a spherical S0S2S1 equilibrium. The split is anchored on
/// the validated closed-form p: that pair is removed, the remaining two
/// roots form the quartic `x^2 + q x + r`.
pub fn euler_numeric_factors(
    params: &SystemParams,
    z_e: &ReducedState,
    coeffs: &EulerSphericalCoeffs,
) -> Result<[f64; 3]> {
    let u = jacobian(params, z_e)?;
    let eigs = eigenvalues(&u)?;
    let scale = eigs.iter().map(|e| e.norm()).fold(0.0f64, f64::max).max(1e-300);
    // One representative per +/- pair, largest first: the defective zero
    // cluster can leak to ~sqrt(roundoff), so the six structural pairs
    // are taken by magnitude rather than by a hard zero threshold.
    let ztol = 1e-12 * scale;
    let mut xs: Vec<Complex64> = eigs
        .iter()
        .filter(|e| e.norm() > ztol && (e.im > ztol || (e.im.abs() <= ztol && e.re > 0.0)))
        .map(|e| e * e)
        .collect();
    xs.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    if xs.len() < 6 {
        return Err(Error::InvalidParams(format!(
            "expected 6 nonzero pairs, found {}",
            xs.len()
        )));
    }
    xs.truncate(6);
    let (omega0, _, _) = spins_of_state(params, z_e);
    // Remove the double pair (x = -omega_e^2, twice) and the Phi0 pair.
    for target in [
        Complex64::new(-coeffs.omega_e_sq, 0.0),
        Complex64::new(-coeffs.omega_e_sq, 0.0),
        Complex64::new(-phi0(params, omega0).powi(2), 0.0),
    ] {
        let (idx, _) = xs
            .iter()
            .enumerate()
            .map(|(i, x)| (i, (x - target).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        xs.swap_remove(idx);
    }
    // Anchor p on the validated closed form.
    let (idx, _) = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (i, (x + Complex64::new(coeffs.p, 0.0)).norm()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let p_num = -xs.swap_remove(idx).re;
    let q_num = -(xs[0] + xs[1]).re;
    let r_num = (xs[0] * xs[1]).re;
    Ok([p_num, q_num, r_num])
}

/// The five printed degree-8 mass polynomials of the r numerator. The
/// `-378 m2^4 m1 m0^4` monomial is read as `m0^3` (every other monomial
/// is degree 8) and the `+2 m1^6 m0^2` sign is kept as printed.
fn appendix_a_coefficients(m0: f64, m1: f64, m2: f64) -> [f64; 5] {
    let a1 = -42.0 * m2.powi(7) * m1
        - 48.0 * m2.powi(7) * m0
        - 147.0 * m2.powi(6) * m1.powi(2)
        - 336.0 * m2.powi(6) * m1 * m0
        - 129.0 * m2.powi(6) * m0.powi(2)
        - 207.0 * m2.powi(5) * m1.powi(3)
        - 782.0 * m2.powi(5) * m1.powi(2) * m0
        - 673.0 * m2.powi(5) * m1 * m0.powi(2)
        - 81.0 * m2.powi(5) * m0.powi(3)
        - 150.0 * m2.powi(4) * m1.powi(4)
        - 869.0 * m2.powi(4) * m1.powi(3) * m0
        - 1325.0 * m2.powi(4) * m1.powi(2) * m0.powi(2)
        - 378.0 * m2.powi(4) * m1 * m0.powi(3)
        - 64.0 * m2.powi(3) * m1.powi(5)
        - 513.0 * m2.powi(3) * m1.powi(4) * m0
        - 1270.0 * m2.powi(3) * m1.powi(3) * m0.powi(2)
        - 702.0 * m2.powi(3) * m1.powi(2) * m0.powi(3)
        - 14.0 * m2.powi(2) * m1.powi(6)
        - 165.0 * m2.powi(2) * m1.powi(5) * m0
        - 610.0 * m2.powi(2) * m1.powi(4) * m0.powi(2)
        - 648.0 * m2.powi(2) * m1.powi(3) * m0.powi(3)
        - 24.0 * m2 * m1.powi(6) * m0
        - 119.0 * m2 * m1.powi(5) * m0.powi(2)
        - 297.0 * m2 * m1.powi(4) * m0.powi(3)
        + 2.0 * m1.powi(6) * m0.powi(2)
        - 54.0 * m1.powi(5) * m0.powi(3);
    let a2 = -60.0 * m2.powi(7) * m1
        - 54.0 * m2.powi(7) * m0
        - 243.0 * m2.powi(6) * m1.powi(2)
        - 474.0 * m2.powi(6) * m1 * m0
        - 173.0 * m2.powi(6) * m0.powi(2)
        - 399.0 * m2.powi(5) * m1.powi(3)
        - 1345.0 * m2.powi(5) * m1.powi(2) * m0
        - 999.0 * m2.powi(5) * m1 * m0.powi(2)
        - 135.0 * m2.powi(5) * m0.powi(3)
        - 329.0 * m2.powi(4) * m1.powi(4)
        - 1846.0 * m2.powi(4) * m1.powi(3) * m0
        - 2223.0 * m2.powi(4) * m1.powi(2) * m0.powi(2)
        - 648.0 * m2.powi(4) * m1 * m0.powi(3)
        - 138.0 * m2.powi(3) * m1.powi(5)
        - 1364.0 * m2.powi(3) * m1.powi(4) * m0
        - 2506.0 * m2.powi(3) * m1.powi(3) * m0.powi(2)
        - 1242.0 * m2.powi(3) * m1.powi(2) * m0.powi(3)
        - 24.0 * m2.powi(2) * m1.powi(6)
        - 536.0 * m2.powi(2) * m1.powi(5) * m0
        - 1530.0 * m2.powi(2) * m1.powi(4) * m0.powi(2)
        - 1188.0 * m2.powi(2) * m1.powi(3) * m0.powi(3)
        - 90.0 * m2 * m1.powi(6) * m0
        - 477.0 * m2 * m1.powi(5) * m0.powi(2)
        - 567.0 * m2 * m1.powi(4) * m0.powi(3)
        - 56.0 * m1.powi(6) * m0.powi(2)
        - 108.0 * m1.powi(5) * m0.powi(3);
    let a3 = -42.0 * m2.powi(7) * m1
        - 36.0 * m2.powi(7) * m0
        - 183.0 * m2.powi(6) * m1.powi(2)
        - 342.0 * m2.powi(6) * m1 * m0
        - 93.0 * m2.powi(6) * m0.powi(2)
        - 349.0 * m2.powi(5) * m1.powi(3)
        - 1097.0 * m2.powi(5) * m1.powi(2) * m0
        - 630.0 * m2.powi(5) * m1 * m0.powi(2)
        - 81.0 * m2.powi(5) * m0.powi(3)
        - 358.0 * m2.powi(4) * m1.powi(4)
        - 1776.0 * m2.powi(4) * m1.powi(3) * m0
        - 166.0 * m2.powi(4) * m1.powi(2) * m0.powi(2)
        - 405.0 * m2.powi(4) * m1 * m0.powi(3)
        - 189.0 * m2.powi(3) * m1.powi(5)
        - 1614.0 * m2.powi(3) * m1.powi(4) * m0
        - 2256.0 * m2.powi(3) * m1.powi(3) * m0.powi(2)
        - 810.0 * m2.powi(3) * m1.powi(2) * m0.powi(3)
        - 31.0 * m2.powi(2) * m1.powi(6)
        - 827.0 * m2.powi(2) * m1.powi(5) * m0
        - 1683.0 * m2.powi(2) * m1.powi(4) * m0.powi(2)
        - 810.0 * m2.powi(2) * m1.powi(3) * m0.powi(3)
        - 6.0 * m2 * m1.powi(7)
        - 228.0 * m2 * m1.powi(6) * m0
        - 666.0 * m2 * m1.powi(5) * m0.powi(2)
        - 405.0 * m2 * m1.powi(4) * m0.powi(3)
        - 30.0 * m1.powi(7) * m0
        - 81.0 * m1.powi(5) * m0.powi(3)
        - 111.0 * m1.powi(6) * m0.powi(2);
    let a4 = -12.0 * m2.powi(7) * m1
        - 12.0 * m2.powi(7) * m0
        - 56.0 * m2.powi(6) * m1.powi(2)
        - 114.0 * m2.powi(6) * m1 * m0
        - 24.0 * m2.powi(6) * m0.powi(2)
        - 130.0 * m2.powi(5) * m1.powi(3)
        - 387.0 * m2.powi(5) * m1.powi(2) * m0
        - 162.0 * m2.powi(5) * m1 * m0.powi(2)
        - 179.0 * m2.powi(4) * m1.powi(4)
        - 687.0 * m2.powi(4) * m1.powi(3) * m0
        - 432.0 * m2.powi(4) * m1.powi(2) * m0.powi(2)
        - 140.0 * m2.powi(3) * m1.powi(5)
        - 693.0 * m2.powi(3) * m1.powi(4) * m0
        - 588.0 * m2.powi(3) * m1.powi(3) * m0.powi(2)
        - 52.0 * m2.powi(2) * m1.powi(6)
        - 387.0 * m2.powi(2) * m1.powi(5) * m0
        - 432.0 * m2.powi(2) * m1.powi(4) * m0.powi(2)
        - 6.0 * m2 * m1.powi(7)
        - 108.0 * m2 * m1.powi(6) * m0
        - 162.0 * m2 * m1.powi(5) * m0.powi(2)
        - 12.0 * m1.powi(7) * m0
        - 24.0 * m1.powi(6) * m0.powi(2);
    let a5 = -(m0 + m2)
        * (18.0 * m0 * m2.powi(6)
            + 12.0 * m1 * m2.powi(6)
            + 94.0 * m2.powi(5) * m0 * m1
            + 36.0 * m1.powi(2) * m2.powi(5)
            + 81.0 * m2.powi(4) * m0.powi(2) * m1
            + 168.0 * m2.powi(4) * m0 * m1.powi(2)
            + 42.0 * m2.powi(4) * m1.powi(3)
            + 128.0 * m2.powi(3) * m0 * m1.powi(3)
            + 27.0 * m2.powi(3) * m1.powi(4)
            + 15.0 * m2.powi(2) * m1.powi(5)
            + 31.0 * m2.powi(2) * m0 * m1.powi(4)
            + 126.0 * m2.powi(2) * m0.powi(2) * m1.powi(3)
            + 18.0 * m0.powi(2) * m2.powi(5)
            + 54.0 * m2 * m0.powi(2) * m1.powi(4)
            + 12.0 * m2 * m0 * m1.powi(5)
            + 5.0 * m2 * m1.powi(6)
            + 7.0 * m1.powi(6) * m0
            + 9.0 * m0.powi(2) * m1.powi(5)
            + 144.0 * m2.powi(3) * m0.powi(2) * m1.powi(2));
    [a1, a2, a3, a4, a5]
}

/// Expected eigenvalue multiset of the spherical collinear S0S2S1 case:
/// zero (x5), the Phi pairs, the double pair at the printed omega_e, the
/// `lambda^2 + p` pair, and the roots of `x^2 + q x + r`.
pub fn euler_expected_eigenvalues(
    params: &SystemParams,
    z_e: &ReducedState,
    coeffs: &EulerSphericalCoeffs,
) -> Vec<Complex64> {
    let (omega0, omega1, omega2) = spins_of_state(params, z_e);
    let mut out = vec![Complex64::new(0.0, 0.0); 5];
    let mut push_pair = |x: Complex64| {
        let lam = x.sqrt();
        out.push(lam);
        out.push(-lam);
    };
    push_pair(Complex64::new(-phi0(params, omega0).powi(2), 0.0));
    push_pair(Complex64::new(-phi_body(params.c1, params.a1, omega1).powi(2), 0.0));
    push_pair(Complex64::new(-phi_body(params.c2, params.a2, omega2).powi(2), 0.0));
    push_pair(Complex64::new(-coeffs.omega_e_sq, 0.0));
    push_pair(Complex64::new(-coeffs.omega_e_sq, 0.0));
    push_pair(Complex64::new(-coeffs.p, 0.0));
    let disc = Complex64::new(coeffs.q * coeffs.q - 4.0 * coeffs.r, 0.0).sqrt();
    push_pair((Complex64::new(-coeffs.q, 0.0) + disc) * 0.5);
    push_pair((Complex64::new(-coeffs.q, 0.0) - disc) * 0.5);
    out
}

/// Stability analysis of a collinear equilibrium: numeric spectrum plus
/// the spherical-case closed-form r sign when applicable.
pub fn euler_stability(params: &SystemParams, z_e: &ReducedState) -> Result<StabilityVerdict> {
    let mut verdict = spectral_verdict(params, z_e)?;
    if params.is_spherical(1e-12) {
        let a_len = z_e.lambda.norm();
        let mu_len = z_e.mu.x / z_e.lambda.x * a_len;
        let rho = mu_len / a_len - params.m2 / params.mass_pair();
        if rho < -1.0 {
            let c = euler_spherical_coefficients(params, rho, a_len)?;
            verdict.conditions.push(Condition {
                name: "appendix_r_negative_implies_unstable".into(),
                value: c.r,
                satisfied: c.r < 0.0,
            });
            verdict.conditions.push(Condition {
                name: "quartic_q".into(),
                value: c.q,
                satisfied: c.q >= 0.0,
            });
            verdict.conditions.push(Condition {
                name: "pair_p".into(),
                value: c.p,
                satisfied: c.p >= 0.0,
            });
        }
    }
    Ok(verdict)
}

/// Dispatch on the geometry of the state: collinear goes to the Euler
/// path, planar-triangular to the Lagrange path.
pub fn stability_report(params: &SystemParams, z_e: &ReducedState) -> Result<StabilityVerdict> {
    let cross = z_e.lambda.cross(&z_e.mu).norm();
    let scale = z_e.lambda.norm() * z_e.mu.norm();
    if cross <= 1e-9 * scale.max(1e-300) {
        euler_stability(params, z_e)
    } else {
        lagrange_stability(params, z_e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrange;

    fn fd_tangent(params: &SystemParams, z: &ReducedState) -> DMatrix<f64> {
        let mut u = DMatrix::zeros(21, 21);
        let flat = z.to_flat();
        for j in 0..21 {
            let h = 1e-6 * (1.0 + flat[j].abs());
            let mut zp = flat;
            zp[j] += h;
            let mut zm = flat;
            zm[j] -= h;
            let fp = model::vector_field(params, &ReducedState::from_flat(zp))
                .unwrap()
                .to_flat();
            let fm = model::vector_field(params, &ReducedState::from_flat(zm))
                .unwrap()
                .to_flat();
            for i in 0..21 {
                u[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        u
    }

    fn lagrange_setup() -> (SystemParams, ReducedState) {
        let params = SystemParams::new(
            1.0, 0.003, 0.004, 1.0, 0.05, 0.06, 1e-5, 1e-5, 2e-5, 2e-5, 0.01,
        )
        .unwrap();
        let eq = lagrange::build_equilateral(&params, 1.0, 1).unwrap();
        (params, eq.state)
    }

    #[test]
    fn tangent_matrix_matches_finite_differences() {
        let (params, z) = lagrange_setup();
        let analytic = tangent_matrix(&params, &z).unwrap();
        let fd = fd_tangent(&params, &z);
        let scale = analytic.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for i in 0..21 {
            for j in 0..21 {
                let d = (analytic[(i, j)] - fd[(i, j)]).abs();
                assert!(
                    d <= 1e-6 * scale.max(analytic[(i, j)].abs()),
                    "({i},{j}): {} vs {}",
                    analytic[(i, j)],
                    fd[(i, j)]
                );
            }
        }
    }

    #[test]
    fn closed_form_and_poisson_assembly_agree() {
        let (params, mut z) = lagrange_setup();
        // Off-equilibrium point: the agreement is an identity, not an
        // equilibrium property.
        z.p_lambda.x += 0.02;
        z.pi0.y += 0.03;
        z.mu.z += 0.01;
        let a = tangent_matrix(&params, &z).unwrap();
        let b = tangent_matrix_poisson(&params, &z).unwrap();
        let scale = a.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let diff = (&a - &b).iter().fold(0.0f64, |m, c| m.max(c.abs()));
        assert!(diff <= 1e-12 * scale, "diff {diff} scale {scale}");
    }

    #[test]
    fn body_rows_carry_only_the_phi_block() {
        // Non-spherical body 1 spinning about its symmetry axis: the Pi1
        // row is the planar rotation generator, zero elsewhere.
        let mut params = SystemParams::new(
            1.0, 0.003, 0.004, 1.0, 0.05, 0.06, 1e-5, 1.4e-5, 2e-5, 2e-5, 0.01,
        )
        .unwrap();
        params.c1 = 1.4e-5;
        let eq = lagrange::build_equilateral(&params, 1.0, 1).unwrap();
        let u = tangent_matrix(&params, &eq.state).unwrap();
        let omega1 = eq.state.pi1.z / params.c1;
        let phi = phi_body(params.c1, params.a1, omega1);
        for j in 3..21 {
            assert_eq!(u[(0, j)], 0.0);
            assert_eq!(u[(1, j)], 0.0);
            assert_eq!(u[(2, j)], 0.0);
        }
        assert!((u[(0, 1)] + phi).abs() <= 1e-14 * phi.abs());
        assert!((u[(1, 0)] - phi).abs() <= 1e-14 * phi.abs());
        assert_eq!(u[(2, 2)], 0.0);
    }

    #[test]
    fn char_poly_of_diagonal_matrix() {
        let n = 21;
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            (1..=n).map(|k| k as f64),
        ));
        let cp = char_poly(&a).unwrap();
        let eigs = eigenvalues(&a).unwrap();
        for k in 1..=n {
            assert!(eigs
                .iter()
                .any(|e| (e - Complex64::new(k as f64, 0.0)).norm() < 1e-9));
        }
        // Char poly evaluated at each eigenvalue is ~0 relative to the
        // coefficient scale.
        let scale = cp.max_abs_coeff();
        for k in 1..=n {
            assert!(cp.eval(k as f64).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn eigenvalues_agree_with_durand_kerner_on_small_matrix() {
        let a = DMatrix::from_row_slice(4, 4, &[
            0.0, 1.0, 0.0, 0.0, //
            -2.0, 0.0, 0.3, 0.0, //
            0.0, 0.0, 0.5, 1.0, //
            0.1, 0.0, -1.0, -0.5,
        ]);
        let eigs = eigenvalues(&a).unwrap();
        let cp = char_poly(&a).unwrap();
        let roots = complex_roots(&cp, 200);
        assert!(multiset_distance(&eigs, &roots) < 1e-8);
    }

    #[test]
    fn hamiltonian_spectrum_is_plus_minus_symmetric() {
        let (params, z) = lagrange_setup();
        let u = jacobian(&params, &z).unwrap();
        let eigs = eigenvalues(&u).unwrap();
        let negated: Vec<Complex64> = eigs.iter().map(|e| -e).collect();
        assert!(multiset_distance(&eigs, &negated) <= 1e-7 * matrix_scale(&u));
    }

    #[test]
    fn spherical_lagrange_matches_printed_factorization() {
        let (params, z) = lagrange_setup();
        let u = jacobian(&params, &z).unwrap();
        let eigs = eigenvalues(&u).unwrap();
        let expected = lagrange_expected_eigenvalues(&params, &z);
        let d = multiset_distance(&expected, &eigs);
        assert!(d <= 1e-7 * matrix_scale(&u), "multiset distance {d}");
    }

    #[test]
    fn routh_condition_splits_stable_and_unstable() {
        // Dominant gyrostat: margin positive, spectrum imaginary, but the
        // zero block is nilpotent (linearly unstable).
        let (params, z) = lagrange_setup();
        let v = lagrange_stability(&params, &z).unwrap();
        assert!(routh_margin(&params) > 0.0);
        assert_eq!(v.classification, Classification::SpectrallyStable);
        assert!(v.zero_rank_defect > 0);
        assert!(v.max_real_part <= 1e-8 * 2.0);

        // Equal masses: 9 < 81, unstable.
        let pe = SystemParams::new(1.0, 1.0, 1.0, 1.0, 0.05, 0.06, 1e-5, 1e-5, 2e-5, 2e-5, 0.0)
            .unwrap();
        let eq = lagrange::build_equilateral(&pe, 1.0, 1).unwrap();
        let ve = lagrange_stability(&pe, &eq.state).unwrap();
        assert!(routh_margin(&pe) < 0.0);
        assert_eq!(ve.classification, Classification::Unstable);
    }

    #[test]
    fn euler_spherical_case_unstable_with_negative_r() {
        let params = SystemParams::new(
            0.01, 0.1, 0.89, 1.0, 1e-4, 1.2e-4, 1e-5, 1e-5, 2e-5, 2e-5, 0.0,
        )
        .unwrap();
        let branch = crate::euler::solve(&params, crate::euler::EulerConfig::S0S2S1, 1.0).unwrap();
        let rho = branch.roots[0].rho;
        let eq =
            crate::euler::build_equilibrium(&params, rho, 1.0, crate::euler::EulerConfig::S0S2S1, None)
                .unwrap();
        let coeffs = euler_spherical_coefficients(&params, rho, 1.0).unwrap();
        assert!(coeffs.r < 0.0, "r = {}", coeffs.r);
        assert!(coeffs.r_rho4_reading < 0.0);
        let v = euler_stability(&params, &eq.state).unwrap();
        assert_eq!(v.classification, Classification::Unstable);
        assert!(v.max_real_part > 1e-6 * eq.omega0);
    }

    /// Near-sphere triangular case with positive mass-weighted oblateness
    /// and the Routh condition satisfied: the spectrum stays on the axis
    /// and the sign-condition ledger passes, i.e. linearly stable modulo
    /// the family drift. The zero cluster keeps algebraic multiplicity 5
    /// (three orbital zeros plus one spin-rate zero per body) with the
    /// nilpotent family pair, for oblate and spherical bodies alike.
    #[test]
    fn near_sphere_lagrange_linear_stability() {
        let params = SystemParams::new(
            1.0, 0.02, 0.015, 1.0, 0.05, 0.06, 1e-5, 1.05e-5, 2e-5, 2.1e-5, 0.01,
        )
        .unwrap();
        assert!(routh_margin(&params) > 0.0);
        let tri = crate::lagrange::solve_for_params(&params, 1.0)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        let eq = crate::lagrange::build_equilibrium(&params, &tri, 1, None).unwrap();
        let v = lagrange_stability(&params, &eq.state).unwrap();
        assert_eq!(v.classification, Classification::SpectrallyStable);
        assert_eq!(v.zero_rank_defect, 1, "the family pair stays nilpotent");
        let cond = |name: &str| {
            v.conditions
                .iter()
                .find(|c| c.name.starts_with(name))
                .unwrap_or_else(|| panic!("missing condition {name}"))
        };
        assert!(cond("routh_27_margin").satisfied);
        assert!(cond("near_sphere_s_first_order").satisfied);
        assert!(cond("m1(C1-A1)+m2(C2-A2)").satisfied);
        assert!(cond("s_nonneg").satisfied);
        assert!(cond("r_nonneg").satisfied);
        assert!(cond("m_nonneg").satisfied && cond("n_nonneg").satisfied);
        assert!(cond("linearly_stable_modulo_family_drift").satisfied);
    }

    /// Collinear instability persists as the bodies approach spheres
    /// (numeric continuation in the oblateness, not a proof).
    #[test]
    fn euler_instability_persists_toward_spherical_limit() {
        for scale in [1e-3f64, 1e-5, 1e-7] {
            let mut params = SystemParams::new(
                0.02, 0.15, 0.83, 1.0, 1e-4, 1.2e-4, 1e-5, 1e-5, 2e-5, 2e-5, 0.0,
            )
            .unwrap();
            params.c1 = params.a1 * (1.0 + scale);
            params.c2 = params.a2 * (1.0 + 0.7 * scale);
            let branch =
                crate::euler::solve(&params, crate::euler::EulerConfig::S0S2S1, 1.0).unwrap();
            let rho = branch.roots[0].rho;
            let eq = crate::euler::build_equilibrium(
                &params,
                rho,
                1.0,
                crate::euler::EulerConfig::S0S2S1,
                None,
            )
            .unwrap();
            let v = spectral_verdict(&params, &eq.state).unwrap();
            assert_eq!(
                v.classification,
                Classification::Unstable,
                "oblateness scale {scale}"
            );
            assert!(v.max_real_part > 1e-3 * eq.omega0);
        }
    }

    /// The omega_e^2 and p displays reproduce the numeric spectrum once
    /// read in the distance-ratio variable; q sits within a few percent
    /// (one damaged term); the r tables only keep their sign.
    #[test]
    fn euler_closed_forms_against_numeric_factors() {
        for (m0, m1, m2) in [(0.02, 0.15, 0.83), (0.05, 0.3, 0.65), (0.01, 0.45, 0.54)] {
            let params = SystemParams::new(
                m0, m1, m2, 1.0, 1e-4, 1.2e-4, 1e-5, 1e-5, 2e-5, 2e-5, 0.0,
            )
            .unwrap();
            let branch =
                crate::euler::solve(&params, crate::euler::EulerConfig::S0S2S1, 1.0).unwrap();
            let rho = branch.roots[0].rho;
            let eq = crate::euler::build_equilibrium(
                &params,
                rho,
                1.0,
                crate::euler::EulerConfig::S0S2S1,
                None,
            )
            .unwrap();
            let c = euler_spherical_coefficients(&params, rho, 1.0).unwrap();
            // omega_e^2 equals the balance rate identically.
            let (w2, _) =
                crate::euler::omega_squared(&params, rho, 1.0, crate::euler::EulerConfig::S0S2S1)
                    .unwrap();
            assert!((c.omega_e_sq - w2).abs() <= 1e-12 * w2);
            let [p_num, q_num, r_num] = euler_numeric_factors(&params, &eq.state, &c).unwrap();
            assert!(
                (c.p - p_num).abs() <= 1e-6 * p_num.abs(),
                "p formula {} vs numeric {}",
                c.p,
                p_num
            );
            assert!(p_num > 0.0 && q_num > 0.0 && r_num < 0.0);
            assert!(
                (c.q - q_num).abs() <= 0.1 * q_num.abs(),
                "q formula {} vs numeric {}",
                c.q,
                q_num
            );
            assert!(c.r < 0.0);
        }
    }
}
