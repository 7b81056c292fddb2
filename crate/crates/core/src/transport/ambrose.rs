//! Numerical Ambrose–Singer identity on a Fermi-coordinate square.
//!
//! For a homotopy `Γ(s, t)`, `C_→(s,t)` transports along the bottom edge to
//! `s` then up to `t`; `C_↑(s,t)` goes up the left edge, along the top to `s`,
//! then down to `t`. Then
//! `C_↑(1,1)⁻¹C_→(1,1) − I = ∫∫ C_↑⁻¹ F(∂ₜΓ, ∂ₛΓ) C_→ dt ds`.

use num_complex::Complex64;

use super::transport_path;
use crate::bundle::{curvature_eval, ConnectionForm};
use crate::hyperbolic::{GeodesicFrame, Point};
use crate::linalg::{c, frob, identity, zeros, CMat};

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Square `Γ(s, t) = F(u₀ + s·side, v₀ + t·side)` in Fermi coordinates
/// `F(u, v) = M(eᵘ(tanh v + i sech v))` of a reference geodesic `M`.
#[derive(Clone, Copy, Debug)]
pub struct FermiSquare {
    pub frame: GeodesicFrame,
    pub u0: f64,
    pub v0: f64,
    pub side: f64,
}

impl FermiSquare {
    /// Square with lower-left corner at signed distance `v0` from the
    /// geodesic, above the time `u0`.
    pub fn new(frame: GeodesicFrame, u0: f64, v0: f64, side: f64) -> Self {
        FermiSquare { frame, u0, v0, side }
    }

    fn local(&self, u: f64, v: f64) -> Complex64 {
        Complex64::new(v.tanh(), 1.0 / v.cosh()) * u.exp()
    }

    pub fn point(&self, s: f64, t: f64) -> Point {
        let w = self.local(self.u0 + s * self.side, self.v0 + t * self.side);
        self.frame.frame.apply(Point::from_complex(w))
    }

    /// `(∂ₛΓ, ∂ₜΓ)` as complex tangent vectors.
    pub fn partials(&self, s: f64, t: f64) -> (Complex64, Complex64) {
        let (u, v) = (self.u0 + s * self.side, self.v0 + t * self.side);
        let w = self.local(u, v);
        let m = self.frame.frame.derivative(Point::from_complex(w));
        let du = m * w;
        let sech = 1.0 / v.cosh();
        let dv = m * Complex64::new(sech * sech, -sech * v.tanh()) * u.exp();
        (du * self.side, dv * self.side)
    }
}

#[derive(Clone, Debug)]
pub struct AmbroseSinger {
    pub lhs: CMat,
    pub rhs: CMat,
    pub residual: f64,
    pub lhs_norm: f64,
}

/// Compares both sides with an `n × n` Gauss–Legendre rule. Every edge
/// transport uses `steps_per_unit` RK4 steps per unit of the parameter.
pub fn ambrose_singer_check<C: ConnectionForm + ?Sized>(conn: &C, sq: &FermiSquare, n: usize, steps_per_unit: usize) -> AmbroseSinger {
    let r = conn.rank();
    let nodes = gauss_legendre(n);
    let steps = |a: f64, b: f64| ((b - a).abs() * steps_per_unit as f64).ceil().max(1.0) as usize;
    let horizontal = |t: f64| move |s: f64| (sq.point(s, t), sq.partials(s, t).0);
    let vertical = |s: f64| move |t: f64| (sq.point(s, t), sq.partials(s, t).1);
    let along = |f: &dyn Fn(f64) -> (Point, Complex64), a: f64, b: f64| transport_path(conn, f, a, b, steps(a, b));

    let left = along(&vertical(0.0), 0.0, 1.0);
    let mut bottom = identity(r);
    let mut top = identity(r);
    let mut s_prev = 0.0;
    let mut rhs = zeros(r, r);
    for &(s, ws) in &nodes {
        bottom = along(&horizontal(0.0), s_prev, s) * bottom;
        top = along(&horizontal(1.0), s_prev, s) * top;
        s_prev = s;
        let up_start = &top * &left;
        // C_→ sweeps upward from t = 0; C_↑ sweeps downward from t = 1
        let mut fwd = Vec::with_capacity(n);
        let mut acc = bottom.clone();
        let mut t_prev = 0.0;
        for &(t, _) in &nodes {
            acc = along(&vertical(s), t_prev, t) * acc;
            t_prev = t;
            fwd.push(acc.clone());
        }
        let mut down = vec![zeros(r, r); n];
        let mut acc = up_start;
        let mut t_prev = 1.0;
        for (j, &(t, _)) in nodes.iter().enumerate().rev() {
            acc = along(&vertical(s), t_prev, t) * acc;
            t_prev = t;
            down[j] = acc.clone();
        }
        for (j, &(t, wt)) in nodes.iter().enumerate() {
            let (gs, gt) = sq.partials(s, t);
            let area = gt.re * gs.im - gt.im * gs.re;
            let f = curvature_eval(conn, sq.point(s, t));
            rhs += down[j].adjoint() * f * &fwd[j] * c(ws * wt * area, 0.0);
        }
    }
    bottom = along(&horizontal(0.0), s_prev, 1.0) * bottom;
    top = along(&horizontal(1.0), s_prev, 1.0) * top;
    let right = along(&vertical(1.0), 0.0, 1.0);
    let c_fwd = right * bottom;
    let c_up = top * left;
    let lhs = c_up.adjoint() * c_fwd - identity(r);
    let residual = frob(&(&lhs - &rhs));
    AmbroseSinger { lhs_norm: frob(&lhs), lhs, rhs, residual }
}
