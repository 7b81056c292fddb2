use rayon::prelude::*;

use super::{linear_fit, ReferenceOrbit};
use crate::bundle::ConnectionForm;
use crate::error::{LabError, Result};
use crate::hyperbolic::{GeodesicFrame, Mobius, Point};
use crate::linalg::{frob, unitary_defect, CMat};
use crate::transport::{connector_with_density, default_steps, transport_frame};

#[derive(Clone, Debug)]
pub struct SpiralLimit {
    /// `q_n` for `n = 1..=N`.
    pub q: Vec<CMat>,
    pub limit: CMat,
    /// `‖q_n − q_N‖` for `n = 1..=N−2`.
    pub residuals: Vec<f64>,
    /// Minus the slope of `ln residual` against `n`; `None` when the
    /// residuals vanish.
    pub rate: Option<f64>,
    pub r_squared: Option<f64>,
    pub max_unitarity_defect: f64,
}

impl ReferenceOrbit {
    /// Point on the stable horocycle of `x⋆` at signed horocyclic offset `c`.
    pub fn stable_point(&self, c: f64) -> Point {
        self.frame.frame.apply(Point::new(c, 1.0))
    }
}

/// `q_n = C(x⋆,nT⋆)⁻¹ C_{x_n→x⋆} C(x₀,nT⋆) C_{x⋆→x₀}` for `n ≤ n_max`.
///
/// In the cover the factors `ρ(g⋆ⁿ)` cancel, leaving transports along the
/// axis, along the stable geodesic through `x₀` and two short connectors.
pub fn spiral_limit<C: ConnectionForm + ?Sized>(
    conn: &C,
    r: &ReferenceOrbit,
    x0: Point,
    n_max: usize,
    density: f64,
) -> Result<SpiralLimit> {
    if n_max < 3 {
        return Err(LabError::InsufficientData(format!("spiral needs N ≥ 3, got {n_max}")));
    }
    let w = r.frame.local(x0);
    if (w.y - 1.0).abs() > 1e-9 {
        return Err(LabError::InvalidAnchor { offset: (w.y - 1.0).abs() });
    }
    let stable = GeodesicFrame::new(r.frame.frame * Mobius::new(1.0, w.x, 0.0, 1.0));
    let enter = connector_with_density(conn, r.x_star, x0, density).matrix;

    let q: Vec<CMat> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let len = n as f64 * r.period;
            let steps = default_steps(len, density);
            let along_axis = transport_frame(conn, &r.frame, 0.0, len, steps)?.matrix;
            let along_leaf = transport_frame(conn, &stable, 0.0, len, steps)?.matrix;
            let back = connector_with_density(conn, stable.point(len), r.lift(n as i64), density).matrix;
            Ok(along_axis.adjoint() * back * along_leaf * &enter)
        })
        .collect::<Result<_>>()?;

    let limit = q[n_max - 1].clone();
    let residuals: Vec<f64> = q[..n_max - 2].iter().map(|m| frob(&(m - &limit))).collect();
    let (rate, r_squared) = if residuals.iter().all(|&x| x > 0.0) {
        let xs: Vec<f64> = (1..=residuals.len()).map(|n| n as f64).collect();
        let ys: Vec<f64> = residuals.iter().map(|x| x.ln()).collect();
        let (slope, _, r2) = linear_fit(&xs, &ys);
        (Some(-slope), Some(r2))
    } else {
        (None, None)
    };
    let max_unitarity_defect = q.iter().map(unitary_defect).fold(0.0, f64::max);
    Ok(SpiralLimit { q, limit, residuals, rate, r_squared, max_unitarity_defect })
}
