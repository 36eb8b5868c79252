//! Closed-form price-of-anarchy and price-of-stability bounds for linear
//! congestion games at approximation factor `eps`, plus executable checkers
//! for the arithmetic inequalities those bounds rest on.
//!
//! All formulas are functions of `eps >= 0` only. The atomic anarchy bound
//! runs through the integer level
//!
//! ```text
//! z(eps) = max { z in N : z^2/(z+1) <= 1 + eps }
//! ```
//!
//! which is also `floor((1 + eps + sqrt(5 + 6 eps + eps^2)) / 2)`. At the
//! boundary values of `eps` where two consecutive `z` are admissible, both
//! evaluate to the same bound, so the choice does not matter.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::EQ_TOL;

/// Relative slack used when deciding integer admissibility from floats, so
/// that boundary values like `eps = 1/3` land on the inclusive side.
const BOUNDARY_TOL: f64 = 1e-9;

fn check_nonnegative(eps: f64) -> Result<()> {
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!(
            "bounds are defined for eps >= 0, got {eps}"
        )));
    }
    Ok(())
}

/// Whether `z` satisfies `z^2 <= (1 + eps)(z + 1)` up to boundary slack.
fn z_admissible(z: u64, eps: f64) -> bool {
    let z2 = (z * z) as f64;
    z2 <= (1.0 + eps) * ((z + 1) as f64) + BOUNDARY_TOL * z2.max(1.0)
}

/// Largest integer `z` with `z^2/(z+1) <= 1 + eps`.
pub fn z_of_epsilon(eps: f64) -> Result<u64> {
    check_nonnegative(eps)?;
    let mut z =
        (((1.0 + eps + (5.0 + 6.0 * eps + eps * eps).sqrt()) / 2.0).floor() as i64).max(1) as u64;
    while z_admissible(z + 1, eps) {
        z += 1;
    }
    while z > 1 && !z_admissible(z, eps) {
        z -= 1;
    }
    Ok(z)
}

fn atomic_poa_at(eps: f64, z: u64) -> f64 {
    let z = z as f64;
    (1.0 + eps) * (z * z + 3.0 * z + 1.0) / (2.0 * z - eps)
}

/// Worst-case ratio of an `eps`-equilibrium to the optimum in atomic games:
/// `(1+eps)(z^2+3z+1)/(2z-eps)` with `z = z_of_epsilon(eps)`.
pub fn atomic_poa_bound(eps: f64) -> Result<f64> {
    let z = z_of_epsilon(eps)?;
    let value = atomic_poa_at(eps, z);
    if z >= 2 {
        // at a z-boundary both admissible levels must agree on the bound
        let slack = (1.0 + eps) * ((z + 1) as f64) - (z * z) as f64;
        if slack.abs() <= BOUNDARY_TOL * ((z * z) as f64) {
            debug_assert!(
                (value - atomic_poa_at(eps, z - 1)).abs() <= 1e-9 * value.abs().max(1.0),
                "bound must be continuous across the z boundary"
            );
        }
    }
    Ok(value)
}

/// Worst-case ratio for non-atomic games: `4(1+eps)/(3-eps)` up to `eps = 1`,
/// then `(1+eps)^2`. The two branches agree at `eps = 1`.
pub fn nonatomic_poa_bound(eps: f64) -> Result<f64> {
    check_nonnegative(eps)?;
    Ok(if eps <= 1.0 {
        4.0 * (1.0 + eps) / (3.0 - eps)
    } else {
        (1.0 + eps) * (1.0 + eps)
    })
}

/// Largest integer `z <= 1 + eps`, with the same boundary slack as
/// [`z_of_epsilon`].
pub fn z_floor_of_epsilon(eps: f64) -> Result<u64> {
    check_nonnegative(eps)?;
    let mut z = ((1.0 + eps).floor() as i64).max(1) as u64;
    while ((z + 1) as f64) <= 1.0 + eps + BOUNDARY_TOL * ((z + 1) as f64) {
        z += 1;
    }
    while z > 1 && (z as f64) > 1.0 + eps + BOUNDARY_TOL * (z as f64) {
        z -= 1;
    }
    Ok(z)
}

/// Best known lower bound for the non-atomic anarchy ratio at `eps >= 1`:
/// `(1+eps) z (z+1) / (2z - eps)` with `z = floor(1+eps)`. Matches
/// `(1+eps)^2` exactly when `1+eps` is an integer and stays strictly below it
/// otherwise.
pub fn nonatomic_poa_lower_large(eps: f64) -> Result<f64> {
    check_nonnegative(eps)?;
    if eps < 1.0 - EQ_TOL {
        return Err(Error::Domain(format!(
            "the large-eps lower bound needs eps >= 1, got {eps}"
        )));
    }
    let z = z_floor_of_epsilon(eps)? as f64;
    Ok((1.0 + eps) * z * (z + 1.0) / (2.0 * z - eps))
}

/// The three stability bounds for atomic games on `eps in [0,1]`; all three
/// collapse to 1 for `eps >= 1`, where the optimum itself is an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomicPosBounds {
    /// The easy potential-comparison bound `2/(1+eps)`.
    pub coarse: f64,
    /// The sharp upper bound `(sqrt(3)+1)/(sqrt(3)+eps)`.
    pub upper: f64,
    /// The dominant-strategy family value, reached only in the many-player
    /// limit; equals `upper` at `eps = 0` and at `eps = 1`.
    pub lower: f64,
}

pub fn atomic_pos_bounds(eps: f64) -> Result<AtomicPosBounds> {
    check_nonnegative(eps)?;
    if eps >= 1.0 {
        return Ok(AtomicPosBounds {
            coarse: 1.0,
            upper: 1.0,
            lower: 1.0,
        });
    }
    let s3 = 3.0_f64.sqrt();
    let coarse = 2.0 / (1.0 + eps);
    let upper = (s3 + 1.0) / (s3 + eps);
    let e2 = eps * eps;
    let e3 = e2 * eps;
    let e4 = e3 * eps;
    let theta = (3.0 * e3 + 3.0 + eps + 2.0 * e4).sqrt();
    let numerator = 2.0 * (3.0 + eps + theta * e2 + 3.0 * e3 + 2.0 * e4 + theta + theta * eps);
    let denominator =
        6.0 + 2.0 * eps + 5.0 * theta * eps + 6.0 * e3 + 4.0 * e4 - theta * e3 + 2.0 * theta * e2;
    Ok(AtomicPosBounds {
        coarse,
        upper,
        lower: numerator / denominator,
    })
}

/// Stability bound for non-atomic games: `4/((3-eps)(1+eps))` on `[0,1]`,
/// and 1 beyond.
pub fn nonatomic_pos_bound(eps: f64) -> Result<f64> {
    check_nonnegative(eps)?;
    Ok(if eps >= 1.0 {
        1.0
    } else {
        4.0 / ((3.0 - eps) * (1.0 + eps))
    })
}

/// One row of the bound table at a given `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub epsilon: f64,
    pub z_atomic: u64,
    pub z_nonatomic: u64,
    pub atomic_poa: f64,
    pub atomic_pos_upper: f64,
    pub atomic_pos_lower: f64,
    pub nonatomic_poa: f64,
    /// Only meaningful for `eps >= 1`, where the explicit large-`eps` family
    /// exists.
    pub nonatomic_poa_lower_large: Option<f64>,
    pub nonatomic_pos: f64,
}

pub fn bound_report(eps: f64) -> Result<BoundReport> {
    let pos = atomic_pos_bounds(eps)?;
    Ok(BoundReport {
        epsilon: eps,
        z_atomic: z_of_epsilon(eps)?,
        z_nonatomic: z_floor_of_epsilon(eps)?,
        atomic_poa: atomic_poa_bound(eps)?,
        atomic_pos_upper: pos.upper,
        atomic_pos_lower: pos.lower,
        nonatomic_poa: nonatomic_poa_bound(eps)?,
        nonatomic_poa_lower_large: if eps >= 1.0 - EQ_TOL {
            Some(nonatomic_poa_lower_large(eps.max(1.0))?)
        } else {
            None
        },
        nonatomic_pos: nonatomic_pos_bound(eps)?,
    })
}

/// The arithmetic inequalities behind the four bound proofs, with their
/// stated parameter domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundLemma {
    /// For naturals `alpha, beta` and level `z >= 1`:
    /// `beta (alpha + 1) <= alpha^2/(2z+1) + (z^2+3z+1) beta^2/(2z+1)`.
    AtomicAnarchy { alpha: u64, beta: u64, z: u64 },
    /// For reals with `lambda > 0`:
    /// `alpha beta <= alpha^2/(4 lambda) + lambda beta^2`.
    NonatomicAnarchy { alpha: f64, beta: f64, lambda: f64 },
    /// For nonnegative integers `alpha, beta` and `eps in [0,1]`, the mixed
    /// quadratic comparison used by the sharp atomic stability bound; see
    /// [`stability_comparison_sides`] for the exact sides.
    AtomicStability { alpha: u64, beta: u64, eps: f64 },
    /// For reals and `eps in [0,1]`:
    /// `alpha beta <= (1+eps) alpha^2/4 + beta^2/(1+eps)`.
    NonatomicStability { alpha: f64, beta: f64, eps: f64 },
}

/// Left and right side of the atomic-stability comparison at integer
/// `(alpha, beta)` and the mixing weight implied by `eps`:
///
/// ```text
/// g b^2 + (1 - g eps)/(1+eps) b - (g - eps)/(1+eps) a + (1-g) a b
///     <= (2 sqrt3 - 3)(1 - eps)/d * a^2 + (6 + 2 sqrt3)/d * b^2
/// ```
///
/// with `g = (3 + 2 sqrt3)(eps - 3 + 2 sqrt3)/d` and `d = 3 eps + 3 + 2 sqrt3`.
pub fn stability_comparison_sides(alpha: f64, beta: f64, eps: f64) -> (f64, f64) {
    let s3 = 3.0_f64.sqrt();
    let d = 3.0 * eps + 3.0 + 2.0 * s3;
    let g = (3.0 + 2.0 * s3) * (eps - 3.0 + 2.0 * s3) / d;
    let lhs = g * beta * beta + (1.0 - g * eps) / (1.0 + eps) * beta
        - (g - eps) / (1.0 + eps) * alpha
        + (1.0 - g) * beta * alpha;
    let c1 = (2.0 * s3 - 3.0) * (1.0 - eps) / d;
    let c2 = (6.0 + 2.0 * s3) / d;
    let rhs = c1 * alpha * alpha + c2 * beta * beta;
    (lhs, rhs)
}

/// The atomic-stability gap `(rhs - lhs)` normalized by the `alpha^2`
/// coefficient. The normalization cancels every occurrence of `eps`, and the
/// result factors as `alpha (alpha + 3 + 2 sqrt3)` at `beta = 0` and
/// `alpha (alpha - 1)` at `beta = 1`, which is how the checker is
/// cross-validated. Defined for `eps in [0, 1)`.
pub fn stability_gap_normalized(alpha: f64, beta: f64, eps: f64) -> f64 {
    let s3 = 3.0_f64.sqrt();
    let d = 3.0 * eps + 3.0 + 2.0 * s3;
    let c1 = (2.0 * s3 - 3.0) * (1.0 - eps) / d;
    let (lhs, rhs) = stability_comparison_sides(alpha, beta, eps);
    (rhs - lhs) / c1
}

/// Evaluate one of the bound inequalities at concrete parameters.
///
/// Integer-domain lemmas are decided in exact integer arithmetic; the real
/// ones allow relative rounding slack `1e-12`.
pub fn lemma_holds(lemma: &BoundLemma) -> Result<bool> {
    const REL_TOL: f64 = 1e-12;
    match *lemma {
        BoundLemma::AtomicAnarchy { alpha, beta, z } => {
            if z == 0 {
                return Err(Error::Domain("level z must be at least 1".into()));
            }
            // multiplied through by 2z+1, all terms stay integral
            let (alpha, beta, z) = (alpha as u128, beta as u128, z as u128);
            let lhs = (2 * z + 1) * beta * (alpha + 1);
            let rhs = alpha * alpha + (z * z + 3 * z + 1) * beta * beta;
            Ok(lhs <= rhs)
        }
        BoundLemma::NonatomicAnarchy {
            alpha,
            beta,
            lambda,
        } => {
            if !(lambda > 0.0) {
                return Err(Error::Domain(format!(
                    "lambda must be positive, got {lambda}"
                )));
            }
            let lhs = alpha * beta;
            let rhs = alpha * alpha / (4.0 * lambda) + lambda * beta * beta;
            Ok(lhs <= rhs + REL_TOL * rhs.abs().max(lhs.abs()).max(1.0))
        }
        BoundLemma::AtomicStability { alpha, beta, eps } => {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::Domain(format!(
                    "the stability comparison is stated for eps in [0,1], got {eps}"
                )));
            }
            let (lhs, rhs) = stability_comparison_sides(alpha as f64, beta as f64, eps);
            Ok(lhs <= rhs + REL_TOL * rhs.abs().max(lhs.abs()).max(1.0))
        }
        BoundLemma::NonatomicStability { alpha, beta, eps } => {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::Domain(format!(
                    "the stability inequality is stated for eps in [0,1], got {eps}"
                )));
            }
            let lhs = alpha * beta;
            let rhs = (1.0 + eps) * alpha * alpha / 4.0 + beta * beta / (1.0 + eps);
            Ok(lhs <= rhs + REL_TOL * rhs.abs().max(lhs.abs()).max(1.0))
        }
    }
}
