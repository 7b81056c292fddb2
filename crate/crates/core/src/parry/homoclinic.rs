use serde::Serialize;

use super::{linear_fit, ReferenceOrbit};
use crate::error::{LabError, Result};
use crate::hyperbolic::{Boundary, GeodesicFrame, Mobius, MobiusElement, Point};

pub const DEFAULT_DELTA: f64 = 0.1;

/// Number of approach points measured on each side.
pub const APPROACH_SAMPLES: usize = 8;

/// Geodesic from `ξ⁻(g⋆)` to `h·ξ⁺(g⋆)`.
///
/// Time is synchronised with the reference orbit: at `t = jT⋆` the backward
/// end lies on the horocycle (centred at `ξ⁻`) through `g⋆^j x⋆`, and at
/// `t = A₊ + nT⋆` the forward end lies on the horocycle through
/// `h g⋆^{k₊+n} x⋆`. The forward end is also kept pulled back by `h⁻¹`,
/// where it is asymptotic to the axis itself and numerically benign.
#[derive(Clone, Debug, Serialize)]
pub struct HomoclinicOrbit {
    pub label: MobiusElement,
    pub back: Boundary,
    pub fwd: Boundary,
    pub delta: f64,
    pub degenerate: bool,
    pub frame: GeodesicFrame,
    /// `h⁻¹·γ` with the same time parameter.
    pub translated: GeodesicFrame,
    pub a_minus: f64,
    pub a_plus: f64,
    /// `A₋ = k₋T⋆`.
    pub k_minus: i64,
    /// `x_n⁺` shadows `h g⋆^{k₊+n} x⋆`.
    pub k_plus: i64,
    /// `d(x_n⁻, g⋆^{k₋−n}x⋆)` for `n = 1..=8`.
    pub approach_minus: Vec<f64>,
    /// `d(x_n⁺, h g⋆^{k₊+n}x⋆)` for `n = 1..=8`.
    pub approach_plus: Vec<f64>,
    /// Fitted exponential rate, the smaller of the two sides.
    pub theta: Option<f64>,
}

impl HomoclinicOrbit {
    pub fn trunk_length(&self) -> f64 {
        self.a_plus - self.a_minus
    }

    /// `x_n⁻ = γ(A₋ − nT⋆)`.
    pub fn approach_minus_point(&self, r: &ReferenceOrbit, n: usize) -> Point {
        self.frame.point(self.a_minus - n as f64 * r.period)
    }

    /// `h⁻¹ x_n⁺ = h⁻¹γ(A₊ + nT⋆)`.
    pub fn approach_plus_translated(&self, r: &ReferenceOrbit, n: usize) -> Point {
        self.translated.point(self.a_plus + n as f64 * r.period)
    }

    /// Another trunk: `A₋` moved back by `back` periods and `A₊` forward by
    /// `fwd` periods.
    pub fn with_trunk_shift(&self, r: &ReferenceOrbit, back: i64, fwd: i64) -> HomoclinicOrbit {
        let mut o = self.clone();
        o.a_minus -= back as f64 * r.period;
        o.k_minus -= back;
        o.a_plus += fwd as f64 * r.period;
        o.k_plus += fwd;
        o
    }
}

/// Busemann function of the repelling end `0`: `ln(|z|²/y)`, equal to `t`
/// at `i·eᵗ`.
fn busemann_zero(p: Point) -> f64 {
    ((p.x * p.x + p.y * p.y) / p.y).ln()
}

pub fn homoclinic_geodesic(r: &ReferenceOrbit, h: &MobiusElement, delta: f64) -> Result<HomoclinicOrbit> {
    let t = r.period;
    let hl = r.to_local(&h.matrix).to_sl2();
    let scale = hl.a.abs().max(hl.b.abs()).max(hl.c.abs()).max(hl.d.abs());
    if hl.c.abs() <= 1e-10 * scale {
        // h fixes ξ⁺, so it is a power of g⋆ and the orbit is the axis.
        return Ok(degenerate(r, h, delta));
    }
    let eta = hl.a / hl.c;
    if eta.abs() <= 1e-12 * scale {
        return Err(LabError::DegenerateEndpoints);
    }

    let raw = GeodesicFrame::from_endpoints_projecting(Boundary::Finite(0.0), Boundary::Finite(eta), Point::i())?;
    let local = raw.shifted(-busemann_zero(raw.point(0.0)));

    let hinv = hl.inverse();
    let u = -hl.b / hl.a; // h⁻¹(0)
    let c_plus = hinv.apply(local.point(0.0)).y.ln();
    let local_translated = GeodesicFrame::new(Mobius::new(1.0, u, 0.0, 1.0) * Mobius::diag((c_plus / 2.0).exp()));

    let dist_axis = |t: f64| {
        let p = local.point(t);
        (p.x.abs() / p.y).asinh()
    };
    let (mut lo, mut hi) = (-60.0, 0.0);
    while dist_axis(hi) < delta {
        hi += 10.0;
    }
    while dist_axis(lo) > delta {
        lo -= 10.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist_axis(mid) < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_exit = lo;
    let t_entry = (u.abs() / delta.sinh()).ln() - c_plus;

    let k_minus = (t_exit / t).floor() as i64;
    let k_plus = ((t_entry + c_plus) / t).ceil() as i64;
    let a_minus = k_minus as f64 * t;
    let a_plus = k_plus as f64 * t - c_plus;

    let on_axis = |j: i64| Point::new(0.0, (j as f64 * t).exp());
    let approach_minus: Vec<f64> = (1..=APPROACH_SAMPLES)
        .map(|n| local.point(a_minus - n as f64 * t).distance(on_axis(k_minus - n as i64)))
        .collect();
    let approach_plus: Vec<f64> = (1..=APPROACH_SAMPLES)
        .map(|n| local_translated.point(a_plus + n as f64 * t).distance(on_axis(k_plus + n as i64)))
        .collect();
    let theta = [&approach_minus, &approach_plus]
        .iter()
        .map(|d| {
            let xs: Vec<f64> = (1..=d.len()).map(|n| n as f64).collect();
            let ys: Vec<f64> = d.iter().map(|v| v.ln()).collect();
            -linear_fit(&xs, &ys).0
        })
        .fold(f64::INFINITY, f64::min);

    let f = r.frame.frame;
    let frame = local.transformed(&f);
    Ok(HomoclinicOrbit {
        label: h.clone(),
        back: frame.backward_end(),
        fwd: frame.forward_end(),
        delta,
        degenerate: false,
        frame,
        translated: local_translated.transformed(&f),
        a_minus,
        a_plus,
        k_minus,
        k_plus,
        approach_minus,
        approach_plus,
        theta: Some(theta),
    })
}

fn degenerate(r: &ReferenceOrbit, h: &MobiusElement, delta: f64) -> HomoclinicOrbit {
    HomoclinicOrbit {
        label: h.clone(),
        back: r.frame.backward_end(),
        fwd: r.frame.forward_end(),
        delta,
        degenerate: true,
        frame: r.frame,
        translated: r.frame,
        a_minus: 0.0,
        a_plus: 0.0,
        k_minus: 0,
        k_plus: 0,
        approach_minus: vec![0.0; APPROACH_SAMPLES],
        approach_plus: vec![0.0; APPROACH_SAMPLES],
        theta: None,
    }
}
