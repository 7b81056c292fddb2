//! Gauge transformations `p = exp(χ)` with bump-shaped `χ = f·X`.

use num_complex::Complex64;

use super::{Bump, ConnectionForm, UnitaryRep};
use crate::error::{LabError, Result};
use crate::hyperbolic::{Point, SurfaceGroup};
use crate::linalg::{c, identity, skew_defect, CMat};

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeElement {
    pub bump: Bump,
    pub generator: CMat,
}

impl GaugeElement {
    pub fn new(center: Point, radius: f64, generator: CMat) -> Result<Self> {
        if skew_defect(&generator) > 1e-12 * (1.0 + crate::linalg::frob(&generator)) {
            return Err(LabError::InvalidBump("gauge generator not skew-Hermitian".into()));
        }
        Ok(GaugeElement { bump: Bump { center, radius }, generator })
    }

    pub fn negated(&self) -> GaugeElement {
        GaugeElement { bump: self.bump, generator: -self.generator.clone() }
    }

    /// `p` at a fundamental-domain point.
    pub fn local_value(&self, z: Point) -> CMat {
        let f = self.bump.value(z);
        if f == 0.0 {
            return identity(self.generator.nrows());
        }
        (&self.generator * c(f, 0.0)).exp()
    }

    /// `p(z)` on the universal cover, extended by `p(γz) = ρ(γ)p(z)ρ(γ)⁻¹`.
    pub fn value(&self, group: &SurfaceGroup, rep: &UnitaryRep, z: Point) -> CMat {
        let (z0, gamma) = group.reduce_to_domain(z);
        let p = self.local_value(z0);
        let rg = rep.eval_word(&gamma.word);
        rg.adjoint() * p * rg
    }
}

/// The pulled-back connection `p*∇`, with `A' = p⁻¹Ap + p⁻¹dp`.
#[derive(Clone, Debug)]
pub struct Gauged<C> {
    inner: C,
    gauge: GaugeElement,
}

impl<C: ConnectionForm> Gauged<C> {
    pub fn new(inner: C, gauge: GaugeElement) -> Result<Self> {
        if gauge.generator.nrows() != inner.rank() {
            return Err(LabError::RankMismatch(format!(
                "gauge of rank {} on a rank-{} bundle",
                gauge.generator.nrows(),
                inner.rank()
            )));
        }
        gauge.bump.check(inner.group())?;
        Ok(Gauged { inner, gauge })
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }

    pub fn gauge(&self) -> &GaugeElement {
        &self.gauge
    }
}

pub fn gauge_transform<C: ConnectionForm>(conn: C, g: GaugeElement) -> Result<Gauged<C>> {
    Gauged::new(conn, g)
}

impl<C: ConnectionForm> ConnectionForm for Gauged<C> {
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn rep(&self) -> &UnitaryRep {
        self.inner.rep()
    }

    fn group(&self) -> &SurfaceGroup {
        self.inner.group()
    }

    fn eval(&self, z: Point, v: Complex64) -> CMat {
        let a = self.inner.eval(z, v);
        let (z0, gamma) = self.group().reduce_to_domain(z);
        if z0.distance(self.gauge.bump.center) >= self.gauge.bump.radius {
            return a;
        }
        let v0 = gamma.matrix.push_vector(z, v);
        let p = self.gauge.local_value(z0);
        // p⁻¹ dp = X df because X commutes with exp(fX)
        let dlog = &self.gauge.generator * c(self.gauge.bump.differential(z0, v0), 0.0);
        let local = p.adjoint() * (self.map_in(&a, &gamma.word)) * &p + dlog;
        self.map_out(&local, &gamma.word)
    }

    fn is_flat(&self) -> bool {
        self.inner.is_flat() && self.gauge.generator.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    fn edge_offsets(&self, z: Point, out: &mut Vec<f64>) {
        self.inner.edge_offsets(z, out);
        let (z0, _) = self.group().reduce_to_domain(z);
        out.push(z0.distance(self.gauge.bump.center) - self.gauge.bump.radius);
    }
}

impl<C: ConnectionForm> Gauged<C> {
    // ρ(γ) a ρ(γ)⁻¹: moves a value at z to the fundamental-domain frame
    fn map_in(&self, a: &CMat, w: &crate::word::Word) -> CMat {
        if w.is_empty() {
            return a.clone();
        }
        let rg = self.rep().eval_word(w);
        &rg * a * rg.adjoint()
    }

    fn map_out(&self, a: &CMat, w: &crate::word::Word) -> CMat {
        if w.is_empty() {
            return a.clone();
        }
        let rg = self.rep().eval_word(w);
        rg.adjoint() * a * rg
    }
}
