//! Domain types and the reduced Poisson system: the approximate mutual
//! potential of a gyrostat with two axisymmetric rigid bodies, its
//! gradients and Hessian, the Hamiltonian, the Poisson tensor B(z), and
//! the closed-form vector field.
//!
//! State layout (21 components, fixed order):
//! `z = (Pi1, Pi2, Pi0, lambda, p_lambda, mu, p_mu)`
//! matching the block layout of B(z). `lambda` is the vector from body 2
//! to body 1; `mu` is the gyrostat position relative to the pair
//! barycenter, both in the gyrostat body frame.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Skew matrix of `v`: `hat(v) * w == v.cross(&w)`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

fn default_collision_eps() -> f64 {
    1e-9
}

/// Masses, inertia moments, gyrostatic momentum and the gravitational
/// constant: everything the potential needs.
///
/// The bodies are S0 (the gyrostat, mass `m0`, inertia diag(A0, A0, C0),
/// rotor momentum `l_r = (0, 0, l)`) and the axisymmetric rigid bodies
/// S1, S2. `m0 = 0` is accepted as the restricted limit; operations that
/// need `g2 > 0` reject it explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    /// Gravitational constant in the working unit system.
    pub g: f64,
    pub a0: f64,
    pub c0: f64,
    pub a1: f64,
    pub c1: f64,
    pub a2: f64,
    pub c2: f64,
    /// Gyrostatic momentum magnitude; the rotor vector is (0, 0, l).
    pub l: f64,
    /// Minimum admissible separation (nondimensional length).
    #[serde(default = "default_collision_eps")]
    pub collision_eps: f64,
}

impl SystemParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m0: f64,
        m1: f64,
        m2: f64,
        g: f64,
        a0: f64,
        c0: f64,
        a1: f64,
        c1: f64,
        a2: f64,
        c2: f64,
        l: f64,
    ) -> Result<Self> {
        let p = SystemParams {
            m0,
            m1,
            m2,
            g,
            a0,
            c0,
            a1,
            c1,
            a2,
            c2,
            l,
            collision_eps: default_collision_eps(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Spherical bodies and gyrostat with unit-ish inertias; handy base
    /// for point-mass scenarios.
    pub fn spherical(m0: f64, m1: f64, m2: f64, g: f64) -> Result<Self> {
        SystemParams::new(m0, m1, m2, g, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m0 >= 0.0) {
            return Err(Error::InvalidParams(format!("m0 = {} < 0", self.m0)));
        }
        for (name, v) in [
            ("m1", self.m1),
            ("m2", self.m2),
            ("G", self.g),
            ("A0", self.a0),
            ("C0", self.c0),
            ("A1", self.a1),
            ("C1", self.c1),
            ("A2", self.a2),
            ("C2", self.c2),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParams(format!("{} = {} must be > 0", name, v)));
            }
        }
        if !(self.collision_eps > 0.0) {
            return Err(Error::InvalidParams("collision_eps must be > 0".into()));
        }
        Ok(())
    }

    pub fn with_collision_eps(mut self, eps: f64) -> Self {
        self.collision_eps = eps;
        self
    }

    /// M2 = m1 + m2.
    pub fn mass_pair(&self) -> f64 {
        self.m1 + self.m2
    }

    /// M1 = m0 + m1 + m2.
    pub fn mass_total(&self) -> f64 {
        self.m0 + self.m1 + self.m2
    }

    /// g1 = m1 m2 / M2.
    pub fn g1(&self) -> f64 {
        self.m1 * self.m2 / self.mass_pair()
    }

    /// g2 = m0 M2 / M1; zero in the restricted limit.
    pub fn g2(&self) -> f64 {
        self.m0 * self.mass_pair() / self.mass_total()
    }

    /// beta_i = 3 (C_i - A_i) / 2.
    pub fn beta1(&self) -> f64 {
        1.5 * (self.c1 - self.a1)
    }

    pub fn beta2(&self) -> f64 {
        1.5 * (self.c2 - self.a2)
    }

    /// alpha_i = 2 A_i + C_i (the trace of the inertia tensor).
    pub fn alpha1(&self) -> f64 {
        2.0 * self.a1 + self.c1
    }

    pub fn alpha2(&self) -> f64 {
        2.0 * self.a2 + self.c2
    }

    pub fn inertia0(&self) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(self.a0, self.a0, self.c0))
    }

    pub fn inertia1(&self) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(self.a1, self.a1, self.c1))
    }

    pub fn inertia2(&self) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(self.a2, self.a2, self.c2))
    }

    /// Rotor momentum vector (0, 0, l).
    pub fn l_r(&self) -> Vec3 {
        Vec3::new(0.0, 0.0, self.l)
    }

    /// True when both rigid bodies are spherical within `tol` on C - A.
    pub fn is_spherical(&self, tol: f64) -> bool {
        (self.c1 - self.a1).abs() <= tol && (self.c2 - self.a2).abs() <= tol
    }

    pub fn require_spherical(&self, tol: f64) -> Result<()> {
        if (self.c1 - self.a1).abs() > tol {
            return Err(Error::NonSpherical {
                body: 1,
                c_minus_a: self.c1 - self.a1,
            });
        }
        if (self.c2 - self.a2).abs() > tol {
            return Err(Error::NonSpherical {
                body: 2,
                c_minus_a: self.c2 - self.a2,
            });
        }
        Ok(())
    }

    /// Gyrostat angular velocity for a given Pi0: `I0^-1 (Pi0 - l_r)`.
    pub fn omega0(&self, pi0: &Vec3) -> Vec3 {
        Vec3::new(pi0.x / self.a0, pi0.y / self.a0, (pi0.z - self.l) / self.c0)
    }
}

/// The 21-component reduced state `(Pi1, Pi2, Pi0, lambda, p_lambda, mu, p_mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub pi1: Vec3,
    pub pi2: Vec3,
    pub pi0: Vec3,
    pub lambda: Vec3,
    pub p_lambda: Vec3,
    pub mu: Vec3,
    pub p_mu: Vec3,
}

impl ReducedState {
    pub fn zero() -> Self {
        ReducedState {
            pi1: Vec3::zeros(),
            pi2: Vec3::zeros(),
            pi0: Vec3::zeros(),
            lambda: Vec3::zeros(),
            p_lambda: Vec3::zeros(),
            mu: Vec3::zeros(),
            p_mu: Vec3::zeros(),
        }
    }

    pub fn to_flat(&self) -> [f64; 21] {
        let mut out = [0.0; 21];
        for (slot, v) in self.slots().into_iter().enumerate() {
            out[3 * slot] = v.x;
            out[3 * slot + 1] = v.y;
            out[3 * slot + 2] = v.z;
        }
        out
    }

    pub fn from_flat(flat: [f64; 21]) -> Self {
        let v = |i: usize| Vec3::new(flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]);
        ReducedState {
            pi1: v(0),
            pi2: v(1),
            pi0: v(2),
            lambda: v(3),
            p_lambda: v(4),
            mu: v(5),
            p_mu: v(6),
        }
    }

    fn slots(&self) -> [Vec3; 7] {
        [
            self.pi1,
            self.pi2,
            self.pi0,
            self.lambda,
            self.p_lambda,
            self.mu,
            self.p_mu,
        ]
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_row_slice(&self.to_flat())
    }

    pub fn from_dvector(v: &DVector<f64>) -> Self {
        let mut flat = [0.0; 21];
        flat.copy_from_slice(v.as_slice());
        ReducedState::from_flat(flat)
    }

    /// Characteristic magnitude used to scale residual tolerances.
    pub fn scale(&self) -> f64 {
        self.to_flat().iter().fold(1.0f64, |m, c| m.max(c.abs()))
    }
}

impl Serialize for ReducedState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_flat().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReducedState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let flat = <[f64; 21]>::deserialize(d)?;
        Ok(ReducedState::from_flat(flat))
    }
}

/// Conserved-quantity snapshot (Casimirs plus the total angular momentum
/// and the third rotor component, which the flow also preserves).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CasimirValues {
    pub half_l0_sq: f64,
    pub half_pi1_sq: f64,
    pub half_pi2_sq: f64,
    pub total_l: [f64; 3],
    pub pi0_3: f64,
}

/// L0 = Pi0 + lambda x p_lambda + mu x p_mu.
pub fn l0(z: &ReducedState) -> Vec3 {
    z.pi0 + z.lambda.cross(&z.p_lambda) + z.mu.cross(&z.p_mu)
}

/// Total angular momentum L = Pi2 + Pi1 + L0.
pub fn total_angular_momentum(z: &ReducedState) -> Vec3 {
    z.pi1 + z.pi2 + l0(z)
}

pub fn casimirs(z: &ReducedState) -> CasimirValues {
    let l0v = l0(z);
    let l = z.pi1 + z.pi2 + l0v;
    CasimirValues {
        half_l0_sq: 0.5 * l0v.norm_squared(),
        half_pi1_sq: 0.5 * z.pi1.norm_squared(),
        half_pi2_sq: 0.5 * z.pi2.norm_squared(),
        total_l: [l.x, l.y, l.z],
        pi0_3: z.pi0.z,
    }
}

/// Gradients of the three Casimirs |L0|^2/2, |Pi1|^2/2, |Pi2|^2/2 as flat
/// 21-vectors (used for kernel checks of B(z)).
pub fn casimir_gradients(z: &ReducedState) -> [DVector<f64>; 3] {
    let l0v = l0(z);
    let g0 = ReducedState {
        pi1: Vec3::zeros(),
        pi2: Vec3::zeros(),
        pi0: l0v,
        lambda: z.p_lambda.cross(&l0v),
        p_lambda: l0v.cross(&z.lambda),
        mu: z.p_mu.cross(&l0v),
        p_mu: l0v.cross(&z.mu),
    };
    let g1 = ReducedState {
        pi1: z.pi1,
        ..ReducedState::zero()
    };
    let g2 = ReducedState {
        pi2: z.pi2,
        ..ReducedState::zero()
    };
    [g0.to_dvector(), g1.to_dvector(), g2.to_dvector()]
}

/// The two gyrostat-body separation vectors and all three distances.
#[derive(Debug, Clone, Copy)]
pub struct Separations {
    /// |lambda|: the S1-S2 distance.
    pub r12: f64,
    /// d1 = mu - (m2/M2) lambda, from body 1 to the gyrostat.
    pub d1: Vec3,
    pub r01: f64,
    /// d2 = mu + (m1/M2) lambda, from body 2 to the gyrostat.
    pub d2: Vec3,
    pub r02: f64,
}

/// Compute separations, rejecting configurations below the collision
/// epsilon and naming the offending pair.
pub fn separations(params: &SystemParams, lambda: &Vec3, mu: &Vec3) -> Result<Separations> {
    let m2_pair = params.mass_pair();
    let d1 = mu - lambda * (params.m2 / m2_pair);
    let d2 = mu + lambda * (params.m1 / m2_pair);
    let s = Separations {
        r12: lambda.norm(),
        d1,
        r01: d1.norm(),
        d2,
        r02: d2.norm(),
    };
    let eps = params.collision_eps;
    if s.r12 <= eps {
        return Err(Error::Collision {
            pair: "lambda (S1-S2)",
            separation: s.r12,
        });
    }
    if s.r01 <= eps {
        return Err(Error::Collision {
            pair: "mu - (m2/M2) lambda (S0-S1)",
            separation: s.r01,
        });
    }
    if s.r02 <= eps {
        return Err(Error::Collision {
            pair: "mu + (m1/M2) lambda (S0-S2)",
            separation: s.r02,
        });
    }
    Ok(s)
}

/// Approximate potential V = V1 + V2.
///
/// V1 is the three point-mass terms; V2 carries the quadrupole corrections
/// of the two axisymmetric bodies through alpha_i and the quadratic forms
/// f_i = d_i . I_i d_i. For spherical bodies V2 vanishes identically.
pub fn potential(params: &SystemParams, lambda: &Vec3, mu: &Vec3) -> Result<f64> {
    let s = separations(params, lambda, mu)?;
    let g = params.g;
    let v1 = -g
        * (params.m1 * params.m2 / s.r12
            + params.m1 * params.m0 / s.r01
            + params.m2 * params.m0 / s.r02);
    let f1 = s.d1.dot(&(params.inertia1() * s.d1));
    let f2 = s.d2.dot(&(params.inertia2() * s.d2));
    let v2 = -0.5
        * g
        * params.m0
        * (params.alpha1() / s.r01.powi(3) + params.alpha2() / s.r02.powi(3)
            - 3.0 * f1 / s.r01.powi(5)
            - 3.0 * f2 / s.r02.powi(5));
    Ok(v1 + v2)
}

/// Gradient of the point-mass + quadrupole attraction of one body with
/// respect to the separation vector d (gyrostat side).
fn body_grad(g: f64, m0: f64, m: f64, alpha: f64, inertia: &Mat3, d: &Vec3) -> Vec3 {
    let r = d.norm();
    let r3 = r.powi(3);
    let r5 = r3 * r * r;
    let r7 = r5 * r * r;
    let id = inertia * d;
    let f = d.dot(&id);
    d * (g * m0 * m / r3) + d * (1.5 * g * m0 * alpha / r5) + id * (3.0 * g * m0 / r5)
        - d * (7.5 * g * m0 * f / r7)
}

/// Closed-form gradients (dV/dlambda, dV/dmu) at a general point.
///
/// At planar equilibria these reduce to the G m0 (m_i/r^3 + beta_i/r^5) d
/// form used throughout the equilibrium analysis.
pub fn grad_potential(params: &SystemParams, lambda: &Vec3, mu: &Vec3) -> Result<(Vec3, Vec3)> {
    let s = separations(params, lambda, mu)?;
    let g = params.g;
    let m2_pair = params.mass_pair();
    let g1d = body_grad(g, params.m0, params.m1, params.alpha1(), &params.inertia1(), &s.d1);
    let g2d = body_grad(g, params.m0, params.m2, params.alpha2(), &params.inertia2(), &s.d2);
    let grad_lambda = lambda * (g * params.m1 * params.m2 / s.r12.powi(3))
        - g1d * (params.m2 / m2_pair)
        + g2d * (params.m1 / m2_pair);
    let grad_mu = g1d + g2d;
    Ok((grad_lambda, grad_mu))
}

/// Hessian of one body's attraction with respect to d.
fn body_hess(g: f64, m0: f64, m: f64, alpha: f64, inertia: &Mat3, d: &Vec3) -> Mat3 {
    let r = d.norm();
    let r3 = r.powi(3);
    let r5 = r3 * r * r;
    let r7 = r5 * r * r;
    let r9 = r7 * r * r;
    let id = inertia * d;
    let f = d.dot(&id);
    let ddt = d * d.transpose();
    let idt = id * d.transpose();
    let eye = Mat3::identity();
    // point-mass part: G m0 m (I/r^3 - 3 d d^T / r^5)
    let pm = (eye / r3 - ddt * (3.0 / r5)) * (g * m0 * m);
    // trace part: (3 G m0 alpha / 2)(I/r^5 - 5 d d^T / r^7)
    let tr = (eye / r5 - ddt * (5.0 / r7)) * (1.5 * g * m0 * alpha);
    // quadratic-form part
    let qf = (inertia * (2.0 / r5)
        - (idt + idt.transpose()) * (10.0 / r7)
        - eye * (5.0 * f / r7)
        + ddt * (35.0 * f / r9))
        * (1.5 * g * m0);
    pm + tr + qf
}

/// Hessian blocks of V: (V_ll, V_lm, V_mm); V_ml is the transpose of V_lm
/// (each block is itself symmetric here).
pub fn hess_potential(params: &SystemParams, lambda: &Vec3, mu: &Vec3) -> Result<(Mat3, Mat3, Mat3)> {
    let s = separations(params, lambda, mu)?;
    let g = params.g;
    let m2_pair = params.mass_pair();
    let w1 = params.m2 / m2_pair;
    let w2 = params.m1 / m2_pair;
    let h1 = body_hess(g, params.m0, params.m1, params.alpha1(), &params.inertia1(), &s.d1);
    let h2 = body_hess(g, params.m0, params.m2, params.alpha2(), &params.inertia2(), &s.d2);
    let r = s.r12;
    let pair = (Mat3::identity() / r.powi(3)
        - (lambda * lambda.transpose()) * (3.0 / r.powi(5)))
        * (g * params.m1 * params.m2);
    let v_ll = pair + h1 * (w1 * w1) + h2 * (w2 * w2);
    let v_lm = h1 * (-w1) + h2 * w2;
    let v_mm = h1 + h2;
    Ok((v_ll, v_lm, v_mm))
}

/// The decomposition coefficients of the potential gradients over the
/// (lambda, mu) frame at planar configurations:
/// `grad_lambda V = A11 lambda + A12 mu`, `grad_mu V = A21 lambda + A22 mu`
/// with A12 = A21 by construction.
pub fn a_coefficients(params: &SystemParams, lambda: &Vec3, mu: &Vec3) -> Result<(f64, f64, f64, f64)> {
    let s = separations(params, lambda, mu)?;
    let g = params.g;
    let m2_pair = params.mass_pair();
    let u = params.m1 / s.r01.powi(3) + params.beta1() / s.r01.powi(5);
    let v = params.m2 / s.r02.powi(3) + params.beta2() / s.r02.powi(5);
    let a11 = g * params.m1 * params.m2 / s.r12.powi(3)
        + g * params.m0 * (params.m2 * params.m2 * u + params.m1 * params.m1 * v)
            / (m2_pair * m2_pair);
    let a12 = g * params.m0 * (params.m1 * v - params.m2 * u) / m2_pair;
    let a22 = g * params.m0 * (u + v);
    Ok((a11, a12, a12, a22))
}

/// Hamiltonian: translational kinetic terms, gyrostat and rigid body
/// rotor terms, plus the potential.
pub fn hamiltonian(params: &SystemParams, z: &ReducedState) -> Result<f64> {
    if params.g2() == 0.0 {
        return Err(Error::RestrictedLimit("hamiltonian"));
    }
    let v = potential(params, &z.lambda, &z.mu)?;
    let i0 = params.inertia0();
    let rot0 = 0.5 * z.pi0.dot(&(i0.try_inverse().unwrap() * z.pi0))
        - params.l * z.pi0.z / params.c0;
    let rot1 = 0.5
        * (z.pi1.x * z.pi1.x / params.a1
            + z.pi1.y * z.pi1.y / params.a1
            + z.pi1.z * z.pi1.z / params.c1);
    let rot2 = 0.5
        * (z.pi2.x * z.pi2.x / params.a2
            + z.pi2.y * z.pi2.y / params.a2
            + z.pi2.z * z.pi2.z / params.c2);
    Ok(z.p_lambda.norm_squared() / (2.0 * params.g1())
        + z.p_mu.norm_squared() / (2.0 * params.g2())
        + rot0
        + rot1
        + rot2
        + v)
}

/// Analytic gradient of H in the flat layout.
pub fn grad_hamiltonian(params: &SystemParams, z: &ReducedState) -> Result<DVector<f64>> {
    if params.g2() == 0.0 {
        return Err(Error::RestrictedLimit("grad_hamiltonian"));
    }
    let (gl, gm) = grad_potential(params, &z.lambda, &z.mu)?;
    let omega0 = params.omega0(&z.pi0);
    let omega1 = Vec3::new(z.pi1.x / params.a1, z.pi1.y / params.a1, z.pi1.z / params.c1);
    let omega2 = Vec3::new(z.pi2.x / params.a2, z.pi2.y / params.a2, z.pi2.z / params.c2);
    let g = ReducedState {
        pi1: omega1,
        pi2: omega2,
        pi0: omega0,
        lambda: gl,
        p_lambda: z.p_lambda / params.g1(),
        mu: gm,
        p_mu: z.p_mu / params.g2(),
    };
    Ok(g.to_dvector())
}

/// Assemble the 21x21 Poisson tensor B(z).
pub fn poisson_tensor(z: &ReducedState) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(21, 21);
    let mut set = |bi: usize, bj: usize, m: Mat3| {
        b.view_mut((3 * bi, 3 * bj), (3, 3)).copy_from(&m);
    };
    let eye = Mat3::identity();
    set(0, 0, hat(&z.pi1));
    set(1, 1, hat(&z.pi2));
    set(2, 2, hat(&z.pi0));
    set(2, 3, hat(&z.lambda));
    set(2, 4, hat(&z.p_lambda));
    set(2, 5, hat(&z.mu));
    set(2, 6, hat(&z.p_mu));
    set(3, 2, hat(&z.lambda));
    set(3, 4, eye);
    set(4, 2, hat(&z.p_lambda));
    set(4, 3, -eye);
    set(5, 2, hat(&z.mu));
    set(5, 6, eye);
    set(6, 2, hat(&z.p_mu));
    set(6, 5, -eye);
    b
}

/// Closed-form reduced vector field (the bracket equations written out).
pub fn vector_field(params: &SystemParams, z: &ReducedState) -> Result<ReducedState> {
    if params.g2() == 0.0 {
        return Err(Error::RestrictedLimit("vector_field"));
    }
    let (gl, gm) = grad_potential(params, &z.lambda, &z.mu)?;
    let omega0 = params.omega0(&z.pi0);
    let omega1 = Vec3::new(z.pi1.x / params.a1, z.pi1.y / params.a1, z.pi1.z / params.c1);
    let omega2 = Vec3::new(z.pi2.x / params.a2, z.pi2.y / params.a2, z.pi2.z / params.c2);
    Ok(ReducedState {
        pi0: z.pi0.cross(&omega0) + z.lambda.cross(&gl) + z.mu.cross(&gm),
        lambda: z.p_lambda / params.g1() + z.lambda.cross(&omega0),
        p_lambda: z.p_lambda.cross(&omega0) - gl,
        mu: z.p_mu / params.g2() + z.mu.cross(&omega0),
        p_mu: z.p_mu.cross(&omega0) - gm,
        pi1: z.pi1.cross(&omega1),
        pi2: z.pi2.cross(&omega2),
    })
}

/// The same field through the Poisson route `B(z) grad H(z)`; kept as an
/// independent assembly for consistency checks.
pub fn vector_field_poisson(params: &SystemParams, z: &ReducedState) -> Result<ReducedState> {
    let b = poisson_tensor(z);
    let gh = grad_hamiltonian(params, z)?;
    Ok(ReducedState::from_dvector(&(b * gh)))
}

/// Infinity norm of the field at `z`, used for equilibrium residuals.
pub fn field_residual(params: &SystemParams, z: &ReducedState) -> Result<f64> {
    let f = vector_field(params, z)?;
    Ok(f.to_flat().iter().fold(0.0f64, |m, c| m.max(c.abs())))
}

/// Torque on the gyrostat: `lambda x grad_lambda V + mu x grad_mu V`.
/// Vanishes at every relative equilibrium.
pub fn gravity_torque(params: &SystemParams, lambda: &Vec3, mu: &Vec3) -> Result<Vec3> {
    let (gl, gm) = grad_potential(params, lambda, mu)?;
    Ok(lambda.cross(&gl) + mu.cross(&gm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_arbitrary_inertia() -> SystemParams {
        SystemParams::new(1.0, 1.0, 1.0, 1.0, 0.4, 0.7, 0.21, 0.34, 0.45, 0.27, 0.3).unwrap()
    }

    /// Direct term-by-term transcription of the displayed potential, kept
    /// separate from the production path.
    fn potential_oracle(p: &SystemParams, lambda: &Vec3, mu: &Vec3) -> f64 {
        let m2s = p.m1 + p.m2;
        let d1 = mu - lambda * (p.m2 / m2s);
        let d2 = mu + lambda * (p.m1 / m2s);
        let i1 = Mat3::from_diagonal(&Vec3::new(p.a1, p.a1, p.c1));
        let i2 = Mat3::from_diagonal(&Vec3::new(p.a2, p.a2, p.c2));
        let f1 = mu.dot(&(i1 * mu)) - (2.0 * p.m2 / m2s) * lambda.dot(&(i1 * mu))
            + (p.m2 / m2s).powi(2) * lambda.dot(&(i1 * lambda));
        let f2 = mu.dot(&(i2 * mu)) + (2.0 * p.m1 / m2s) * lambda.dot(&(i2 * mu))
            + (p.m1 / m2s).powi(2) * lambda.dot(&(i2 * lambda));
        let v1 = -(p.g * p.m1 * p.m2 / lambda.norm()
            + p.g * p.m1 * p.m0 / d1.norm()
            + p.g * p.m2 * p.m0 / d2.norm());
        let v2 = -0.5
            * (p.g * p.m0 * (2.0 * p.a1 + p.c1) / d1.norm().powi(3)
                + p.g * p.m0 * (2.0 * p.a2 + p.c2) / d2.norm().powi(3)
                - 3.0 * p.g * p.m0 * f1 / d1.norm().powi(5)
                - 3.0 * p.g * p.m0 * f2 / d2.norm().powi(5));
        v1 + v2
    }

    #[test]
    fn potential_matches_term_by_term_oracle() {
        let p = params_arbitrary_inertia();
        let lambda = Vec3::new(1.0, 0.0, 0.0);
        let mu = Vec3::new(0.0, 1.0, 0.0);
        let v = potential(&p, &lambda, &mu).unwrap();
        let o = potential_oracle(&p, &lambda, &mu);
        assert!((v - o).abs() <= 1e-14 * o.abs());
    }

    #[test]
    fn spherical_bodies_reduce_to_point_masses() {
        let p = SystemParams::new(0.7, 1.3, 2.1, 1.0, 0.4, 0.7, 0.5, 0.5, 0.33, 0.33, 0.1).unwrap();
        let lambda = Vec3::new(1.1, -0.2, 0.4);
        let mu = Vec3::new(-0.3, 0.9, 0.25);
        let s = separations(&p, &lambda, &mu).unwrap();
        let v1 = -p.g
            * (p.m1 * p.m2 / s.r12 + p.m1 * p.m0 / s.r01 + p.m2 * p.m0 / s.r02);
        let v = potential(&p, &lambda, &mu).unwrap();
        assert!((v - v1).abs() <= 1e-13 * v1.abs());
    }

    #[test]
    fn swap_bodies_with_lambda_flip_leaves_potential_invariant() {
        let p = params_arbitrary_inertia();
        let swapped = SystemParams::new(
            p.m0, p.m2, p.m1, p.g, p.a0, p.c0, p.a2, p.c2, p.a1, p.c1, p.l,
        )
        .unwrap();
        let lambda = Vec3::new(0.9, 0.3, -0.1);
        let mu = Vec3::new(-0.2, 0.8, 0.5);
        let v = potential(&p, &lambda, &mu).unwrap();
        let v_swapped = potential(&swapped, &(-lambda), &mu).unwrap();
        assert!((v - v_swapped).abs() <= 1e-13 * v.abs());
    }

    #[test]
    fn collision_names_offending_pair() {
        let p = params_arbitrary_inertia();
        let err = potential(&p, &Vec3::new(1e-12, 0.0, 0.0), &Vec3::new(0.0, 1.0, 0.0)).unwrap_err();
        match err {
            Error::Collision { pair, .. } => assert!(pair.contains("S1-S2")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn hamiltonian_reduces_to_potential_at_rest() {
        let p = params_arbitrary_inertia();
        let z = ReducedState {
            lambda: Vec3::new(1.0, 0.0, 0.0),
            mu: Vec3::new(0.0, 1.2, 0.0),
            ..ReducedState::zero()
        };
        let h = hamiltonian(&p, &z).unwrap();
        let v = potential(&p, &z.lambda, &z.mu).unwrap();
        assert!((h - v).abs() <= 1e-14 * v.abs());
    }

    #[test]
    fn rotor_term_shift_is_linear_in_l() {
        let p = params_arbitrary_inertia();
        let mut p0 = p.clone();
        p0.l = 0.0;
        let z = ReducedState {
            pi0: Vec3::new(0.2, -0.4, 0.9),
            lambda: Vec3::new(1.0, 0.0, 0.0),
            mu: Vec3::new(0.0, 1.2, 0.0),
            p_lambda: Vec3::new(0.0, 0.1, 0.0),
            p_mu: Vec3::new(0.05, 0.0, 0.0),
            ..ReducedState::zero()
        };
        let h_l = hamiltonian(&p, &z).unwrap();
        let h_0 = hamiltonian(&p0, &z).unwrap();
        let expect = -p.l * z.pi0.z / p.c0;
        assert!((h_l - h_0 - expect).abs() <= 1e-14 * h_0.abs().max(1.0));
    }

    #[test]
    fn flat_layout_round_trip_and_order() {
        let z = ReducedState {
            pi1: Vec3::new(1.0, 2.0, 3.0),
            pi2: Vec3::new(4.0, 5.0, 6.0),
            pi0: Vec3::new(7.0, 8.0, 9.0),
            lambda: Vec3::new(10.0, 11.0, 12.0),
            p_lambda: Vec3::new(13.0, 14.0, 15.0),
            mu: Vec3::new(16.0, 17.0, 18.0),
            p_mu: Vec3::new(19.0, 20.0, 21.0),
        };
        let flat = z.to_flat();
        assert_eq!(flat[0], 1.0);
        assert_eq!(flat[6], 7.0); // Pi0 starts at slot 2
        assert_eq!(flat[9], 10.0); // lambda at slot 3
        assert_eq!(ReducedState::from_flat(flat), z);
        let json = serde_json::to_string(&z).unwrap();
        let back: ReducedState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, z);
        assert!(json.starts_with('['));
    }

    #[test]
    fn hat_is_cross_product() {
        let u = Vec3::new(0.3, -1.2, 2.2);
        let w = Vec3::new(-0.7, 0.4, 1.9);
        assert!((hat(&u) * w - u.cross(&w)).norm() < 1e-15);
        assert!((hat(&u) + hat(&u).transpose()).norm() == 0.0);
    }

    #[test]
    fn casimirs_zero_state() {
        let c = casimirs(&ReducedState::zero());
        assert_eq!(c.half_l0_sq, 0.0);
        assert_eq!(c.half_pi1_sq, 0.0);
        assert_eq!(c.half_pi2_sq, 0.0);
        assert_eq!(c.total_l, [0.0; 3]);
        assert_eq!(c.pi0_3, 0.0);
    }

    #[test]
    fn l0_two_ways_agree() {
        let z = ReducedState {
            pi1: Vec3::new(0.1, 0.2, 0.3),
            pi2: Vec3::new(-0.4, 0.5, 0.6),
            pi0: Vec3::new(0.7, -0.8, 0.9),
            lambda: Vec3::new(1.0, 0.1, -0.2),
            p_lambda: Vec3::new(0.3, 0.4, 0.5),
            mu: Vec3::new(-0.6, 0.7, 0.8),
            p_mu: Vec3::new(0.9, 1.0, -1.1),
        };
        let via_l = total_angular_momentum(&z) - z.pi1 - z.pi2;
        assert!((via_l - l0(&z)).norm() < 1e-15);
    }
}
