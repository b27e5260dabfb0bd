//! Lagrangian (triangular) relative equilibria: the decoupled quintic
//! system in the side lengths, discriminant-based bifurcation thresholds,
//! isosceles/scalene/equilateral state construction, and the near-sphere
//! expansions.
//!
//! Side-length conventions: Z = |lambda| (the S1-S2 distance),
//! X = |mu - (m2/M2) lambda| (gyrostat to body 1),
//! Y = |mu + (m1/M2) lambda| (gyrostat to body 2).
//!
//! The quintic parameters `beta1`, `beta2` here are the per-unit-mass
//! oblateness strengths: for physical parameters they are
//! `3 (C_i - A_i) / (2 m_i)` (see [`effective_quintic_betas`]); the
//! identities behind the system divide the moment difference by the
//! body's own mass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ReducedState, SystemParams, Vec3};
use crate::polyroot::{self, RealPoly};
use crate::solution::{EquilibriumSolution, SolutionKind};

/// Shape tag of a triangle candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangleShape {
    Equilateral,
    Isosceles,
    Scalene,
    /// Zero-height boundary case (the gyrostat on the S1-S2 line).
    Degenerate,
}

/// One positive solution (X, Y) of the side-length system for a given Z.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TriangleSolution {
    pub z: f64,
    pub x: f64,
    pub y: f64,
    pub shape: TriangleShape,
    /// Branch indices (which root of the X-quintic, which of the Y-quintic),
    /// in increasing root order.
    pub branch: (usize, usize),
}

impl TriangleSolution {
    /// Heron radicand `(Z+X+Y)(Z+X-Y)(Z+Y-X)(X+Y-Z)`; positive exactly
    /// for realizable nondegenerate triangles.
    pub fn radicand(&self) -> f64 {
        radicand(self.z, self.x, self.y)
    }
}

pub fn radicand(z: f64, x: f64, y: f64) -> f64 {
    (z + x + y) * (z + x - y) * (z + y - x) * (x + y - z)
}

/// The side quintic `S^5 - Z^3 S^2 - beta Z^3`.
pub fn side_quintic(z: f64, beta: f64) -> RealPoly {
    let z3 = z.powi(3);
    RealPoly::new(vec![-beta * z3, 0.0, -z3, 0.0, 0.0, 1.0])
}

/// Positive roots of the side quintic, ascending.
pub fn side_roots(z: f64, beta: f64) -> Result<Vec<f64>> {
    let p = side_quintic(z, beta);
    let hi = p.cauchy_bound() + 1.0;
    let report = polyroot::isolate_and_refine(&p, (0.0, hi), 1e-14)?;
    Ok(report.roots.iter().map(|r| r.value).collect())
}

/// Discriminant-zero threshold `beta* = -(3 cbrt(20)/25) Z^2`: below it
/// the side quintic has no positive root.
pub fn beta_star(z: f64) -> f64 {
    -3.0 * 20f64.cbrt() / 25.0 * z * z
}

/// Degenerate-triangle threshold `-7 Z^2 / 32`: at it the lower branch
/// crosses S = Z/2 and the isosceles height hits zero.
pub fn beta_degenerate(z: f64) -> f64 {
    -7.0 * z * z / 32.0
}

/// Solve the decoupled system: all positive (X, Y) root pairs, filtered
/// by realizability (pairs whose Heron radicand is clearly negative are
/// dropped; boundary cases are kept tagged `Degenerate`) and shape-tagged.
pub fn lagrange_system_solve(z: f64, beta1: f64, beta2: f64) -> Result<Vec<TriangleSolution>> {
    assert!(z > 0.0, "Z must be positive");
    let xs = side_roots(z, beta1)?;
    let ys = side_roots(z, beta2)?;
    let tol = 1e-9 * z.powi(4);
    let rel = 1e-9 * z;
    let mut out = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let rad = radicand(z, x, y);
            if rad < -tol {
                continue;
            }
            let shape = if rad.abs() <= tol {
                TriangleShape::Degenerate
            } else if (x - z).abs() <= rel && (y - z).abs() <= rel {
                TriangleShape::Equilateral
            } else if (x - y).abs() <= rel {
                TriangleShape::Isosceles
            } else {
                TriangleShape::Scalene
            };
            out.push(TriangleSolution {
                z,
                x,
                y,
                shape,
                branch: (i, j),
            });
        }
    }
    Ok(out)
}

/// Where a beta value sits relative to the bifurcation thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BetaRegion {
    Positive,
    Zero,
    /// (-7 Z^2/32, 0): the lower branch is below Z/2.
    Shallow,
    AtDegenerate,
    /// (beta*, -7 Z^2/32): both branches above Z/2.
    Deep,
    AtStar,
    BelowStar,
}

fn beta_region(z: f64, beta: f64, tol: f64) -> BetaRegion {
    let bs = beta_star(z);
    let bd = beta_degenerate(z);
    if beta.abs() <= tol {
        BetaRegion::Zero
    } else if beta > 0.0 {
        BetaRegion::Positive
    } else if (beta - bd).abs() <= tol {
        BetaRegion::AtDegenerate
    } else if beta > bd {
        BetaRegion::Shallow
    } else if (beta - bs).abs() <= tol {
        BetaRegion::AtStar
    } else if beta > bs {
        BetaRegion::Deep
    } else {
        BetaRegion::BelowStar
    }
}

/// Classification outcome for one (Z, beta1, beta2) point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LagrangeRegime {
    pub z: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Clause label of the matching bifurcation case, e.g. "2.a1".
    pub clause: String,
    /// Number of (X-branch, Y-branch) solution pairs (mirror states folded).
    pub families: usize,
    pub equilateral: usize,
    pub isosceles: usize,
    pub scalene: usize,
    pub degenerate: usize,
    /// Number of distinct states counting both reflection signs.
    pub mirror_states: usize,
    pub beta_star: f64,
    pub beta_degenerate: f64,
    /// Set when either beta sits within tolerance of a threshold.
    pub boundary: Option<String>,
}

/// Map (beta1, beta2) against the thresholds 0, -7Z^2/32 and beta*, and
/// count families with the solver (the clause label is threshold-driven,
/// the count is always the solver's).
pub fn classify_lagrange(z: f64, beta1: f64, beta2: f64) -> Result<LagrangeRegime> {
    assert!(z > 0.0);
    let sols = lagrange_system_solve(z, beta1, beta2)?;
    let count_shape = |s: TriangleShape| sols.iter().filter(|t| t.shape == s).count();
    let tol = 1e-9 * z * z;
    let r1 = beta_region(z, beta1, tol);
    let r2 = beta_region(z, beta2, tol);
    let equal_betas = (beta1 - beta2).abs() <= tol;

    let at_boundary = |r: BetaRegion| {
        matches!(
            r,
            BetaRegion::Zero | BetaRegion::AtDegenerate | BetaRegion::AtStar
        )
    };
    let mut boundary = None;
    if at_boundary(r1) || at_boundary(r2) {
        boundary = Some(format!("threshold boundary: {:?} / {:?}", r1, r2));
    }

    let clause = if equal_betas {
        // Equal-oblateness proposition.
        match r1 {
            BetaRegion::Positive => "1".to_string(),
            BetaRegion::Zero => "1 | 2.a1 (equilateral point)".to_string(),
            BetaRegion::Shallow => "2.a1".to_string(),
            BetaRegion::AtDegenerate => "2.a1 | 2.a2".to_string(),
            BetaRegion::Deep => "2.a2".to_string(),
            BetaRegion::AtStar => "2.b".to_string(),
            BetaRegion::BelowStar => "2.c".to_string(),
        }
    } else {
        // Unequal-oblateness proposition; symmetric under swapping the
        // two bodies, so classify by the region pair.
        let mut pair = [r1, r2];
        pair.sort_by_key(|r| *r as usize);
        let has = |r: BetaRegion| pair.contains(&r);
        let both_nonneg = !pair
            .iter()
            .any(|r| matches!(r, BetaRegion::Shallow | BetaRegion::Deep | BetaRegion::AtStar | BetaRegion::AtDegenerate | BetaRegion::BelowStar));
        if both_nonneg {
            "1".to_string()
        } else if has(BetaRegion::Positive) || has(BetaRegion::Zero) {
            // One oblateness non-negative, the other negative.
            if has(BetaRegion::Shallow) {
                "2.a1".to_string()
            } else if has(BetaRegion::AtDegenerate) {
                "2.a1 | 2.a2".to_string()
            } else if has(BetaRegion::Deep) {
                "2.a2".to_string()
            } else if has(BetaRegion::AtStar) {
                "2.b".to_string()
            } else {
                "2.c".to_string()
            }
        } else {
            // Both negative.
            if has(BetaRegion::BelowStar) {
                if has(BetaRegion::AtStar) {
                    "4.b5".to_string()
                } else {
                    "4.b5 (no roots on one side)".to_string()
                }
            } else if has(BetaRegion::AtStar) {
                "4.b4".to_string()
            } else if pair.iter().all(|r| *r == BetaRegion::Shallow) {
                "4.b1".to_string()
            } else if pair.iter().all(|r| *r == BetaRegion::Deep) {
                "4.b3".to_string()
            } else if has(BetaRegion::AtDegenerate) {
                "4.b1 | 4.b2 | 4.b3".to_string()
            } else {
                "4.b2".to_string()
            }
        }
    };

    let degenerate = count_shape(TriangleShape::Degenerate);
    Ok(LagrangeRegime {
        z,
        beta1,
        beta2,
        clause,
        families: sols.len(),
        equilateral: count_shape(TriangleShape::Equilateral),
        isosceles: count_shape(TriangleShape::Isosceles),
        scalene: count_shape(TriangleShape::Scalene),
        degenerate,
        mirror_states: 2 * (sols.len() - degenerate) + degenerate,
        beta_star: beta_star(z),
        beta_degenerate: beta_degenerate(z),
        boundary,
    })
}

/// The Eq.-level quintic parameters for physical system parameters:
/// `3 (C_i - A_i) / (2 m_i)`.
pub fn effective_quintic_betas(params: &SystemParams) -> (f64, f64) {
    (params.beta1() / params.m1, params.beta2() / params.m2)
}

/// Solve the side system for physical parameters.
pub fn solve_for_params(params: &SystemParams, z: f64) -> Result<Vec<TriangleSolution>> {
    let (b1, b2) = effective_quintic_betas(params);
    lagrange_system_solve(z, b1, b2)
}

/// Residuals of the three necessary conditions at a planar candidate
/// state: (A12, g2 A11 - g1 A22, |Omega0|^2 - A11/g1). All vanish at
/// genuine Lagrangian equilibria.
pub fn necessary_conditions_residual(
    params: &SystemParams,
    z: &ReducedState,
) -> Result<(f64, f64, f64)> {
    let (a11, a12, _a21, a22) = model::a_coefficients(params, &z.lambda, &z.mu)?;
    let omega0 = params.omega0(&z.pi0);
    let mismatch = omega0.norm_squared() - a11 / params.g1();
    Ok((a12, params.g2() * a11 - params.g1() * a22, mismatch))
}

/// Gyrostat planar coordinates for a solved triangle: the barycentric
/// x-offset and the height above the S1-S2 line.
///
/// `x2` comes from intersecting the two distance circles around the body
/// positions (m2/M2) Z and -(m1/M2) Z; equivalently
/// `(m2 (Y^2+Z^2-X^2) - m1 (X^2+Z^2-Y^2)) / (2 M2 Z)`.
pub fn planar_coordinates(params: &SystemParams, tri: &TriangleSolution) -> (f64, f64) {
    let (z, x, y) = (tri.z, tri.x, tri.y);
    let x2 = (y * y - x * x) / (2.0 * z)
        + (params.m2 - params.m1) * z / (2.0 * params.mass_pair());
    let rad = radicand(z, x, y).max(0.0);
    let y2 = rad.sqrt() / (2.0 * z);
    (x2, y2)
}

/// Populate the 21-component state of a triangular equilibrium. The
/// reflection sign picks which of the two mirror states is built; rigid
/// body spins default to synchronous.
pub fn build_equilibrium(
    params: &SystemParams,
    tri: &TriangleSolution,
    sign_choice: i8,
    spins: Option<(f64, f64)>,
) -> Result<EquilibriumSolution> {
    if params.g2() == 0.0 {
        return Err(Error::RestrictedLimit("build_equilibrium"));
    }
    if tri.shape == TriangleShape::Degenerate {
        return Err(Error::DegenerateTriangle);
    }
    let z_len = tri.z;
    let omega0_sq = params.g * params.mass_total() / z_len.powi(3);
    let omega0 = omega0_sq.sqrt();
    let (omega1, omega2) = spins.unwrap_or((omega0, omega0));
    let (x2, y2_abs) = planar_coordinates(params, tri);
    let y2 = f64::from(sign_choice.signum()) * y2_abs;
    let lambda = Vec3::new(z_len, 0.0, 0.0);
    let mu = Vec3::new(x2, y2, 0.0);
    let state = ReducedState {
        lambda,
        mu,
        p_lambda: Vec3::new(0.0, params.g1() * omega0 * z_len, 0.0),
        p_mu: Vec3::new(-params.g2() * omega0 * y2, params.g2() * omega0 * x2, 0.0),
        pi0: Vec3::new(0.0, 0.0, params.c0 * omega0 + params.l),
        pi1: Vec3::new(0.0, 0.0, params.c1 * omega1),
        pi2: Vec3::new(0.0, 0.0, params.c2 * omega2),
    };
    let field_residual = model::field_residual(params, &state)?;
    let torque_residual = model::gravity_torque(params, &state.lambda, &state.mu)?.norm();
    Ok(EquilibriumSolution {
        state,
        kind: SolutionKind::Lagrange {
            shape: tri.shape,
            x: tri.x,
            y: tri.y,
            sign: sign_choice.signum(),
        },
        omega0,
        field_residual,
        torque_residual,
    })
}

/// Equilateral construction (X = Y = Z); exact for spherical bodies.
pub fn build_equilateral(params: &SystemParams, z: f64, sign_choice: i8) -> Result<EquilibriumSolution> {
    let tri = TriangleSolution {
        z,
        x: z,
        y: z,
        shape: TriangleShape::Equilateral,
        branch: (0, 0),
    };
    build_equilibrium(params, &tri, sign_choice, None)
}

/// Second-order near-sphere expansions of (X, Y, x2, y2) in the quintic
/// betas. The printed first-order y2 term is restored to `/(9 Z)` (the
/// display drops the 1/Z), which the root-solver consistency tests pin
/// down.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NearSphere {
    pub x: f64,
    pub y: f64,
    pub x2: f64,
    pub y2: f64,
}

pub fn near_sphere_expansion(z: f64, beta1: f64, beta2: f64, m1: f64, m2: f64) -> NearSphere {
    let z3 = z.powi(3);
    let x = z + beta1 / (3.0 * z) - beta1 * beta1 / (3.0 * z3);
    let y = z + beta2 / (3.0 * z) - beta2 * beta2 / (3.0 * z3);
    let x2 = (m2 - m1) * z / (2.0 * (m1 + m2)) - beta1 / (3.0 * z) + beta2 / (3.0 * z)
        + 5.0 * beta1 * beta1 / (18.0 * z3)
        - 5.0 * beta2 * beta2 / (18.0 * z3);
    let s3 = 3f64.sqrt();
    let y2 = s3 * z / 2.0 + s3 * (beta1 + beta2) / (9.0 * z)
        - (23.0 * s3 * beta1 * beta1 / (162.0 * z3) - 4.0 * s3 * beta1 * beta2 / (81.0 * z3)
            + 23.0 * s3 * beta2 * beta2 / (162.0 * z3));
    NearSphere { x, y, x2, y2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_betas_give_unique_equilateral() {
        let sols = lagrange_system_solve(1.3, 0.0, 0.0).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].shape, TriangleShape::Equilateral);
        assert!((sols[0].x - 1.3).abs() < 1e-12);
        assert!((sols[0].y - 1.3).abs() < 1e-12);
    }

    #[test]
    fn degenerate_boundary_hits_half_z() {
        let z = 1.0;
        let beta = beta_degenerate(z);
        let roots = side_roots(z, beta).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 0.5).abs() < 1e-10, "lower root {}", roots[0]);
        let sols = lagrange_system_solve(z, beta, beta).unwrap();
        // The (low, low) pair collapses onto the line.
        assert!(sols
            .iter()
            .any(|t| t.branch == (0, 0) && t.shape == TriangleShape::Degenerate));
    }

    #[test]
    fn below_star_is_empty() {
        let z = 1.0;
        let beta = beta_star(z) * 1.01;
        assert!(lagrange_system_solve(z, beta, beta).unwrap().is_empty());
        // And just above, solutions exist.
        let beta_hi = beta_star(z) * 0.99;
        assert!(!lagrange_system_solve(z, beta_hi, beta_hi).unwrap().is_empty());
    }

    #[test]
    fn root_count_follows_discriminant_sign() {
        let z = 1.4;
        for &(beta, want) in &[(0.2, 1usize), (-0.05 * z * z, 2), (beta_star(z) * 1.02, 0)] {
            let p = side_quintic(z, beta);
            let d = polyroot::discriminant(&p).unwrap();
            let roots = side_roots(z, beta).unwrap();
            assert_eq!(roots.len(), want, "beta {beta}");
            if beta < 0.0 {
                if want == 2 {
                    assert!(d < 0.0);
                } else {
                    assert!(d > 0.0);
                }
            }
        }
    }

    #[test]
    fn discriminant_matches_closed_form_on_grid() {
        for &z in &[0.6f64, 1.0, 2.3] {
            for &beta in &[-0.8, -0.3, -0.05, 0.1, 0.7] {
                let p = side_quintic(z, beta);
                let d = polyroot::discriminant(&p).unwrap();
                let closed = beta * z.powi(12) * (3125.0 * beta.powi(3) + 108.0 * z.powi(6));
                assert!(
                    (d - closed).abs() <= 1e-10 * closed.abs().max(1e-12),
                    "z {z} beta {beta}: {d} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn classify_equal_beta_shallow_region() {
        // 1 isosceles + 2 scalene.
        let r = classify_lagrange(1.0, -0.1, -0.1).unwrap();
        assert_eq!(r.clause, "2.a1");
        assert_eq!(r.isosceles, 1);
        assert_eq!(r.scalene, 2);
        assert_eq!(r.families, 3);
    }

    #[test]
    fn classify_mixed_sign_shallow() {
        // beta1 in (-7/32, 0), beta2 > 0: two scalene families.
        let r = classify_lagrange(1.0, -0.1, 0.05).unwrap();
        assert_eq!(r.clause, "2.a1");
        assert_eq!(r.scalene, 2);
        assert_eq!(r.families, 2);
    }

    #[test]
    fn classify_both_deep() {
        // Both in (beta*, -7/32): four branch pairs, eight mirror states.
        let r = classify_lagrange(1.0, -0.25, -0.26).unwrap();
        assert_eq!(r.clause, "4.b3");
        assert_eq!(r.scalene, 4);
        assert_eq!(r.families, 4);
        assert_eq!(r.mirror_states, 8);
    }

    #[test]
    fn classify_boundary_reports_neighbours() {
        let z = 1.0;
        let r = classify_lagrange(z, beta_degenerate(z), beta_degenerate(z)).unwrap();
        assert!(r.clause.contains('|'));
        assert!(r.boundary.is_some());
    }

    fn near_spherical_params() -> SystemParams {
        SystemParams::new(
            1.0, 0.005, 0.008, 1.0, 0.05, 0.06, 1e-5, 1.006e-5, 2e-5, 2.024e-5, 0.01,
        )
        .unwrap()
    }

    #[test]
    fn equilateral_coordinates_match_display() {
        let p = SystemParams::spherical(0.3, 1.0, 2.0, 1.0).unwrap();
        let z = 1.7;
        let eq = build_equilateral(&p, z, 1).unwrap();
        let x2 = z * (p.m2 - p.m1) / (2.0 * (p.m1 + p.m2));
        let y2 = 3f64.sqrt() * z / 2.0;
        assert!((eq.state.mu.x - x2).abs() < 1e-12);
        assert!((eq.state.mu.y - y2).abs() < 1e-12);
        assert!(eq.field_residual <= 1e-10 * eq.state.scale());
        let w2 = p.g * p.mass_total() / z.powi(3);
        assert!((eq.omega0 * eq.omega0 - w2).abs() < 1e-12 * w2);
    }

    #[test]
    fn scalene_x2_reduces_to_isosceles_form_when_x_equals_y() {
        let p = SystemParams::spherical(0.4, 1.1, 2.3, 1.0).unwrap();
        let tri = TriangleSolution {
            z: 1.0,
            x: 0.8,
            y: 0.8,
            shape: TriangleShape::Isosceles,
            branch: (0, 0),
        };
        let (x2, _) = planar_coordinates(&p, &tri);
        let iso = tri.z * (p.m2 - p.m1) / (2.0 * (p.m1 + p.m2));
        assert!((x2 - iso).abs() < 1e-14);
    }

    #[test]
    fn built_scalene_equilibrium_annihilates_the_field() {
        let p = near_spherical_params();
        let (b1, b2) = effective_quintic_betas(&p);
        assert!(b1 != b2 && (b1 < 0.0) == (p.c1 < p.a1));
        let sols = solve_for_params(&p, 1.0).unwrap();
        assert!(!sols.is_empty());
        for tri in &sols {
            for sign in [1i8, -1] {
                let eq = build_equilibrium(&p, tri, sign, None).unwrap();
                assert!(
                    eq.field_residual <= 1e-10 * eq.state.scale(),
                    "tri {:?} sign {}: residual {}",
                    tri.branch,
                    sign,
                    eq.field_residual
                );
                assert!(eq.torque_residual <= 1e-10 * eq.state.scale());
            }
        }
    }

    #[test]
    fn necessary_conditions_vanish_at_equilibria_and_detect_perturbations() {
        let p = SystemParams::spherical(0.3, 1.0, 2.0, 1.0).unwrap();
        let eq = build_equilateral(&p, 1.0, 1).unwrap();
        let (a12, bal, w2) = necessary_conditions_residual(&p, &eq.state).unwrap();
        assert!(a12.abs() <= 1e-12);
        assert!(bal.abs() <= 1e-12);
        assert!(w2.abs() <= 1e-12);

        let pq = near_spherical_params();
        let sols = solve_for_params(&pq, 1.0).unwrap();
        let tri = sols.iter().find(|t| t.shape == TriangleShape::Scalene).unwrap();
        let eq = build_equilibrium(&pq, tri, 1, None).unwrap();
        let (a12, bal, w2) = necessary_conditions_residual(&pq, &eq.state).unwrap();
        let scale = pq.g * pq.mass_total();
        assert!(a12.abs() <= 1e-10 * scale);
        assert!(bal.abs() <= 1e-10 * scale);
        assert!(w2.abs() <= 1e-10 * scale);

        // Negative control: move the gyrostat off the triangle point.
        let mut z = eq.state;
        z.mu.x += 0.05;
        let (a12, bal, w2) = necessary_conditions_residual(&pq, &z).unwrap();
        assert!(
            a12.abs() > 1e-3 * pq.g * pq.m0 || bal.abs() > 1e-3 || w2.abs() > 1e-3,
            "perturbation went undetected: {a12} {bal} {w2}"
        );
    }

    #[test]
    fn near_sphere_zeroth_order() {
        let ns = near_sphere_expansion(2.0, 0.0, 0.0, 1.0, 3.0);
        assert_eq!(ns.x, 2.0);
        assert_eq!(ns.y, 2.0);
        assert!((ns.x2 - 2.0 * (3.0 - 1.0) / (2.0 * 4.0)).abs() < 1e-15);
        assert!((ns.y2 - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn near_sphere_x_series_is_third_order_accurate() {
        let z = 1.0;
        let mut errs = Vec::new();
        for &beta in &[1e-3, 5e-4, 2.5e-4] {
            let root = side_roots(z, beta).unwrap()[0];
            let ns = near_sphere_expansion(z, beta, beta, 1.0, 1.0);
            errs.push((ns.x - root).abs());
        }
        // Halving beta should shrink the error ~8x (third order).
        let slope1 = (errs[0] / errs[1]).log2();
        let slope2 = (errs[1] / errs[2]).log2();
        assert!(
            (2.5..3.5).contains(&slope1) && (2.5..3.5).contains(&slope2),
            "slopes {slope1} {slope2}, errs {errs:?}"
        );
    }

    #[test]
    fn near_sphere_y2_matches_isosceles_closed_form() {
        // y2 series at beta1 = beta2 = beta vs sqrt(4X^2 - Z^2)/2 with X
        // from the X-series, to O(beta^3). Fails without the 1/Z fix for
        // Z != 1.
        let z = 1.7;
        let mut errs = Vec::new();
        for &beta in &[2e-3, 1e-3] {
            let ns = near_sphere_expansion(z, beta, beta, 1.0, 1.0);
            let closed = (4.0 * ns.x * ns.x - z * z).sqrt() / 2.0;
            errs.push((ns.y2 - closed).abs());
        }
        let cube_ratio = errs[0] / errs[1];
        assert!(
            (6.0..10.5).contains(&cube_ratio),
            "ratio {cube_ratio}, errs {errs:?}"
        );
        assert!(errs[1] < 1e-8);
    }

    /// 2-D sign-change scan over an (X, Y) grid: the solution set of the
    /// system must equal the Cartesian product of the per-axis root sets.
    #[test]
    fn solution_set_is_cartesian_product_of_root_sets() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let z: f64 = rng.gen_range(0.5..2.0);
            let b1 = rng.gen_range(-0.4 * z * z..0.3 * z * z);
            let b2 = rng.gen_range(-0.4 * z * z..0.3 * z * z);
            let px = side_quintic(z, b1);
            let py = side_quintic(z, b2);
            let n = 4000usize;
            let hi = 3.0 * z;
            let mut grid_x = 0usize;
            let mut grid_y = 0usize;
            let mut prev_x = px.eval(1e-9);
            let mut prev_y = py.eval(1e-9);
            for i in 1..=n {
                let s = 1e-9 + hi * i as f64 / n as f64;
                let vx = px.eval(s);
                let vy = py.eval(s);
                if vx.signum() != prev_x.signum() {
                    grid_x += 1;
                }
                if vy.signum() != prev_y.signum() {
                    grid_y += 1;
                }
                prev_x = vx;
                prev_y = vy;
            }
            let xs = side_roots(z, b1).unwrap().len();
            let ys = side_roots(z, b2).unwrap().len();
            assert_eq!(grid_x, xs, "X roots at z={z}, b1={b1}");
            assert_eq!(grid_y, ys, "Y roots at z={z}, b2={b2}");
            // Product count before triangle filtering.
            let all_pairs = xs * ys;
            let filtered = lagrange_system_solve(z, b1, b2).unwrap().len();
            assert!(filtered <= all_pairs);
        }
    }
}
