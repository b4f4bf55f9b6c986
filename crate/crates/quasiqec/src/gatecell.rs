//! Coarse-grained gate cells: uniform partitions of U(1) and SU(2),
//! the ZXZ Euler decomposition, and the coding-cost laws of the four
//! quasi-code families.

use crate::linalg::{cr, max_abs, CMat};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Uniform partition of the circle [0, 2π) into ⌈2π/η⌉ segments.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct U1Partition {
    pub eta: f64,
    pub segments: usize,
}

pub fn u1_partition(eta: f64) -> Result<U1Partition> {
    if !(eta > 0.0 && eta <= 2.0 * PI) {
        return Err(Error::OutOfRange(format!("segment size {eta}")));
    }
    Ok(U1Partition {
        eta,
        segments: (2.0 * PI / eta).ceil() as usize,
    })
}

/// Segment index of an angle; angles are wrapped into [0, 2π).
pub fn cell_of_angle(theta: f64, partition: &U1Partition) -> usize {
    let width = 2.0 * PI / partition.segments as f64;
    let wrapped = theta.rem_euclid(2.0 * PI);
    ((wrapped / width) as usize).min(partition.segments - 1)
}

/// Cubic tessellation of the radius-π/2 ball of SU(2) rotation vectors,
/// with cube side η/√3 so every cell has diameter at most η.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Su2Partition {
    pub eta: f64,
    pub cube_side: f64,
}

pub fn su2_partition(eta: f64) -> Result<Su2Partition> {
    if !(eta > 0.0 && eta <= PI) {
        return Err(Error::OutOfRange(format!("cell size {eta}")));
    }
    Ok(Su2Partition {
        eta,
        cube_side: eta / 3.0_f64.sqrt(),
    })
}

/// Integer cube coordinates of a gate cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GateCellId(pub i64, pub i64, pub i64);

/// Rotation-vector coordinates (θ ≤ π/2, n̂) of a special unitary,
/// folded through U(θ, n̂) = U(θ−π, n̂) and sign-canonicalized on the
/// θ = π/2 boundary.
pub fn rotation_vector(u: &CMat) -> Result<[f64; 3]> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(Error::DimensionMismatch("su2_cell".into()));
    }
    if !crate::linalg::is_unitary(u, 1e-10) || ((u.determinant()) - cr(1.0)).norm() > 1e-10 {
        return Err(Error::Malformed("input is not special unitary".into()));
    }
    // U = x0·1 + i(x1 σx + x2 σy + x3 σz), all components real
    let x0 = 0.5 * (u[(0, 0)] + u[(1, 1)]).re;
    let mut x = [
        0.5 * (u[(0, 1)] + u[(1, 0)]).im,
        0.5 * (u[(1, 0)] - u[(0, 1)]).re,
        0.5 * (u[(0, 0)] - u[(1, 1)]).im,
    ];
    let mut c = x0;
    // project out the global sign: fold to cos θ ≥ 0
    if c < 0.0 || (c.abs() < 1e-12 && leading_sign(&x) < 0.0) {
        c = -c;
        for v in &mut x {
            *v = -*v;
        }
    }
    let s = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let theta = s.atan2(c);
    if s < 1e-14 {
        return Ok([0.0; 3]);
    }
    Ok([theta * x[0] / s, theta * x[1] / s, theta * x[2] / s])
}

fn leading_sign(x: &[f64; 3]) -> f64 {
    for &v in x {
        if v.abs() > 1e-12 {
            return v.signum();
        }
    }
    1.0
}

/// Gate cell of a special unitary under the cubic tessellation.
pub fn su2_cell(u: &CMat, partition: &Su2Partition) -> Result<GateCellId> {
    let p = rotation_vector(u)?;
    let side = partition.cube_side;
    Ok(GateCellId(
        (p[0] / side).floor() as i64,
        (p[1] / side).floor() as i64,
        (p[2] / side).floor() as i64,
    ))
}

/// Angles (θ₁, θ₂, θ₃) with U = Z(θ₁)·H·Z(θ₂)·H·Z(θ₃) up to global
/// phase, for Z(θ) = exp(iθZ).
pub fn euler_decompose(u: &CMat) -> Result<(f64, f64, f64)> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(Error::DimensionMismatch("euler_decompose".into()));
    }
    if !crate::linalg::is_unitary(u, 1e-10) {
        return Err(Error::Malformed("input is not unitary".into()));
    }
    // remove the determinant phase
    let det = u.determinant();
    let phase = det.powf(0.5);
    let su = u / phase;
    // H Z(θ) H = X(θ): the product is
    // [[e^{i(θ1+θ3)} cos θ2, i e^{i(θ1−θ3)} sin θ2],
    //  [i e^{-i(θ1−θ3)} sin θ2, e^{-i(θ1+θ3)} cos θ2]]
    let a = su[(0, 0)];
    let b = su[(0, 1)];
    let theta2 = b.norm().atan2(a.norm());
    let (sum, diff) = if a.norm() > 1e-12 && b.norm() > 1e-12 {
        (a.arg(), b.arg() - PI / 2.0)
    } else if a.norm() > 1e-12 {
        (a.arg(), a.arg())
    } else {
        (b.arg() - PI / 2.0, b.arg() - PI / 2.0)
    };
    let theta1 = 0.5 * (sum + diff);
    let theta3 = 0.5 * (sum - diff);
    Ok((theta1, theta2, theta3))
}

/// Z(θ₁)·H·Z(θ₂)·H·Z(θ₃).
pub fn euler_recompose(theta1: f64, theta2: f64, theta3: f64) -> CMat {
    let z = |t: f64| {
        CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::from_polar(1.0, t),
                cr(0.0),
                cr(0.0),
                Complex64::from_polar(1.0, -t),
            ],
        )
    };
    let h = crate::channels::hadamard();
    z(theta1) * &h * z(theta2) * &h * z(theta3)
}

/// Operator distance up to global phase, min_φ ‖U − e^{iφ}V‖.
pub fn projective_distance(u: &CMat, v: &CMat) -> f64 {
    let overlap = crate::linalg::trace(&(u.adjoint() * v));
    if overlap.norm() < 1e-300 {
        return max_abs(&(u - v)).min(max_abs(&(u + v)));
    }
    let phase = overlap / cr(overlap.norm());
    max_abs(&(u - v * phase.conj()))
}

/// Coding-cost law of a quasi-code family at target accuracy ε.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum CostFamily {
    /// Strong family with error ∝ x^{−N}: N(ε) = ln(1/ε)/ln x.
    ExpInSize { x: f64 },
    /// Strong family with error ∝ N^{−α}: N(ε) = ε^{−1/α}.
    PowerInSize { alpha: f64 },
    /// Weak family: N(ε) = c/ε.
    Weak { c: f64 },
}

pub fn coding_cost(family: CostFamily, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfRange(format!("epsilon {epsilon}")));
    }
    match family {
        CostFamily::ExpInSize { x } => {
            if x <= 1.0 {
                return Err(Error::Malformed("exponential base must exceed 1".into()));
            }
            Ok((1.0 / epsilon).ln() / x.ln())
        }
        CostFamily::PowerInSize { alpha } => {
            if alpha <= 0.0 {
                return Err(Error::Malformed("exponent must be positive".into()));
            }
            Ok(epsilon.powf(-1.0 / alpha))
        }
        CostFamily::Weak { c } => Ok(c / epsilon),
    }
}
