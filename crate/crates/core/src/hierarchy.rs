//! Green-function hierarchy of the sourced quartic equation on a 1+1D lattice.
//!
//! Writing `φ[j] = φ₀ + C₁j + ½C₂jj + ⅙C₃jjj + …` with `C_k = δᵏφ/δjᵏ`, the
//! kernels obey
//!
//! ```text
//! L C₁(x, y)       = δ(x − y)
//! L C₂(x; y, z)    = −6λ φ₀ C₁(x, y) C₁(x, z)
//! L C₃(x; y, z, w) = −6λ [φ₀ (C₁y C₂zw + C₁z C₂yw + C₁w C₂yz) + C₁y C₁z C₁w]
//! ```
//!
//! with `L = ∂² + 3λφ₀²`. Everything here works with fields over `x` for
//! fixed external points or contracted with external sources, so a kernel
//! never has to be stored over all site tuples.

use std::collections::BTreeMap;

use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::lattice::{
    dalembertian, max_abs_interior, AdvancedGreen, Field, Lattice1p1, LatticeBackground, RetardedGreen,
    SourceField, Stencil,
};
use crate::par;

/// Largest lattice (in sites) for which a dense [`KernelGrid`] is assembled.
pub const MAX_DENSE_SITES: usize = 4096;

/// A linear solve `s ↦ ∫ C(x, w) s(w) d²w` on a lattice.
pub trait GreenOperator {
    fn lattice(&self) -> &Lattice1p1;
    fn respond(&self, source: &Field) -> Result<Field>;
}

impl GreenOperator for RetardedGreen {
    fn lattice(&self) -> &Lattice1p1 {
        RetardedGreen::lattice(self)
    }
    fn respond(&self, source: &Field) -> Result<Field> {
        RetardedGreen::respond(self, source)
    }
}

impl GreenOperator for AdvancedGreen {
    fn lattice(&self) -> &Lattice1p1 {
        AdvancedGreen::lattice(self)
    }
    fn respond(&self, source: &Field) -> Result<Field> {
        AdvancedGreen::respond(self, source)
    }
}

/// Dense two-point kernel `K[x, w]` over all lattice sites.
#[derive(Debug, Clone)]
pub struct KernelGrid {
    lat: Lattice1p1,
    values: Array2<f64>,
}

impl KernelGrid {
    /// Column `w` is the response to a unit delta at `w`. Columns at sites that
    /// cannot carry a source are zero.
    pub fn assemble<G: GreenOperator + Sync>(green: &G) -> Result<Self> {
        let lat = *green.lattice();
        let sites = lat.sites();
        if sites > MAX_DENSE_SITES {
            return Err(Error::Configuration(format!(
                "dense kernel limited to {MAX_DENSE_SITES} sites, lattice has {sites}"
            )));
        }
        let columns = par::map_range(sites, |w| {
            let (n, i) = lat.site(w);
            if lat.accepts_source(n, i) {
                green.respond(&lat.delta(n, i)).map(Some)
            } else {
                Ok(None)
            }
        });
        let mut values = Array2::zeros((sites, sites));
        for (w, col) in columns.into_iter().enumerate() {
            if let Some(col) = col? {
                for (x, v) in col.iter().enumerate() {
                    values[[x, w]] = *v;
                }
            }
        }
        Ok(Self { lat, values })
    }

    pub fn lattice(&self) -> &Lattice1p1 {
        &self.lat
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn get(&self, x: (usize, usize), w: (usize, usize)) -> f64 {
        self.values[[self.lat.site_index(x.0, x.1), self.lat.site_index(w.0, w.1)]]
    }

    pub fn column(&self, w: (usize, usize)) -> Field {
        let col = self.values.column(self.lat.site_index(w.0, w.1)).to_owned();
        col.into_shape_with_order((self.lat.nt, self.lat.nx)).expect("column has lattice size")
    }

    /// Midpoint quadrature `Σ_w K(x, w) s(w) dt dx`.
    pub fn apply(&self, source: &Field) -> Result<Field> {
        self.lat.check_field(source)?;
        let flat = source.iter().copied().collect::<ndarray::Array1<f64>>();
        let out = self.values.dot(&flat) * self.lat.cell_volume();
        Ok(out.into_shape_with_order((self.lat.nt, self.lat.nx)).expect("lattice size"))
    }

    pub fn transpose(&self) -> Self {
        Self { lat: self.lat, values: self.values.t().to_owned() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_difference(&self, other: &Self) -> Result<f64> {
        if self.lat != other.lat {
            return Err(Error::Shape("kernels live on different lattices".into()));
        }
        Ok(Zip::from(&self.values)
            .and(&other.values)
            .fold(0.0f64, |m, a, b| m.max((a - b).abs())))
    }
}

/// `max |C_ret(x, y) − C_adv(y, x)| / max |C_ret|` over pairs of
/// source-capable sites.
///
/// The retarded lattice kernel is not symmetric in its arguments; its
/// transpose is the advanced kernel of the same operator.
pub fn reciprocity_defect(background: &LatticeBackground) -> Result<f64> {
    let (ret, adv) = par::join(
        || KernelGrid::assemble(&RetardedGreen::new(background)),
        || KernelGrid::assemble(&AdvancedGreen::new(background)),
    );
    let (ret, adv) = (ret?, adv?);
    let lat = ret.lat;
    let inner: Vec<usize> = (0..lat.sites())
        .filter(|&k| {
            let (n, i) = lat.site(k);
            lat.accepts_source(n, i)
        })
        .collect();
    let worst = par::max_range(inner.len(), |a| {
        let x = inner[a];
        inner
            .iter()
            .fold(0.0f64, |m, &y| m.max((ret.values[[x, y]] - adv.values[[y, x]]).abs()))
    });
    Ok(worst / ret.max_abs())
}

/// Pairing set used for the `C₁C₂` terms of the third-order kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairingSet {
    /// `{y|zw}, {z|yw}, {w|yz}`.
    #[default]
    Symmetric,
    /// `{y|zw}` counted twice and `{z|yw}` dropped.
    Duplicated,
}

fn product3(a: &Field, b: &Field, c: &Field) -> Field {
    let mut out = a.clone();
    Zip::from(&mut out).and(b).and(c).for_each(|o, &b, &c| *o *= b * c);
    out
}

/// Lattice realization of the kernels `C₁, C₂, C₃` about a background.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    background: LatticeBackground,
    green: RetardedGreen,
    max_order: usize,
}

impl Hierarchy {
    pub fn new(background: LatticeBackground) -> Self {
        Self::with_max_order(background, 3).expect("3 is supported")
    }

    /// Restricts the available kernels to orders `<= max_order` (at most 3).
    pub fn with_max_order(background: LatticeBackground, max_order: usize) -> Result<Self> {
        if max_order > 3 {
            return Err(Error::Capability(format!("kernels exist up to order 3, asked for {max_order}")));
        }
        let green = RetardedGreen::new(&background);
        Ok(Self { background, green, max_order })
    }

    pub fn lattice(&self) -> &Lattice1p1 {
        self.background.lattice()
    }

    pub fn background(&self) -> &LatticeBackground {
        &self.background
    }

    pub fn green(&self) -> &RetardedGreen {
        &self.green
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn require(&self, order: usize) -> Result<()> {
        if order > self.max_order {
            return Err(Error::Capability(format!(
                "order {order} requested, kernels available up to {}",
                self.max_order
            )));
        }
        Ok(())
    }

    /// `∫ C₁(x, w) s(w)`.
    pub fn c1_field(&self, s: &Field) -> Result<Field> {
        self.require(1)?;
        self.green.respond(s)
    }

    /// `−6λ ∫ C₁(x, w) φ₀(w) u₁(w) u₂(w)` for given first-order responses.
    pub fn c2_from_responses(&self, u1: &Field, u2: &Field, lambda: f64) -> Result<Field> {
        self.require(2)?;
        let mut s = product3(self.background.field(), u1, u2);
        s *= -6.0 * lambda;
        self.green.respond(&s)
    }

    /// `∫∫ C₂(x; y, z) s₁(y) s₂(z)`.
    pub fn c2_field(&self, s1: &Field, s2: &Field) -> Result<Field> {
        let (u1, u2) = par::join(|| self.c1_field(s1), || self.c1_field(s2));
        self.c2_from_responses(&u1?, &u2?, self.background.lambda())
    }

    /// Third-order kernel from first-order responses `u = [u_y, u_z, u_w]` and
    /// second-order responses `v = [v_zw, v_yw, v_yz]`.
    pub fn c3_from_responses(&self, u: [&Field; 3], v: [&Field; 3], pairing: PairingSet) -> Result<Field> {
        self.require(3)?;
        let phi0 = self.background.field();
        let pairs: [(usize, usize); 3] = match pairing {
            PairingSet::Symmetric => [(0, 0), (1, 1), (2, 2)],
            PairingSet::Duplicated => [(0, 0), (0, 0), (2, 2)],
        };
        let mut s = product3(u[0], u[1], u[2]);
        for (ui, vi) in pairs {
            Zip::from(&mut s).and(phi0).and(u[ui]).and(v[vi]).for_each(|s, &p, &a, &b| {
                *s += p * a * b;
            });
        }
        s *= -6.0 * self.background.lambda();
        self.green.respond(&s)
    }

    /// `∫∫∫ C₃(x; y, z, w) s₁(y) s₂(z) s₃(w)`.
    pub fn c3_field(&self, s: [&Field; 3], pairing: PairingSet) -> Result<Field> {
        self.require(3)?;
        let u = par::map_slice(&s, |si| self.c1_field(si));
        let u = u.into_iter().collect::<Result<Vec<_>>>()?;
        let lambda = self.background.lambda();
        let pairs = [(1, 2), (0, 2), (0, 1)];
        let v = par::map_slice(&pairs, |&(a, b)| self.c2_from_responses(&u[a], &u[b], lambda));
        let v = v.into_iter().collect::<Result<Vec<_>>>()?;
        self.c3_from_responses([&u[0], &u[1], &u[2]], [&v[0], &v[1], &v[2]], pairing)
    }

    fn delta_at(&self, site: (usize, usize)) -> Result<Field> {
        let lat = self.lattice();
        if !lat.accepts_source(site.0, site.1) {
            return Err(Error::Configuration(format!("{site:?} cannot carry a source")));
        }
        Ok(lat.delta(site.0, site.1))
    }

    /// `C₂(x; y, z)` as a field over `x`.
    pub fn c2_convolution(&self, y: (usize, usize), z: (usize, usize)) -> Result<Field> {
        self.c2_field(&self.delta_at(y)?, &self.delta_at(z)?)
    }

    /// `C₃(x; y, z, w)` as a field over `x`, symmetric pairings.
    pub fn c3_convolution(&self, y: (usize, usize), z: (usize, usize), w: (usize, usize)) -> Result<Field> {
        let (dy, dz, dw) = (self.delta_at(y)?, self.delta_at(z)?, self.delta_at(w)?);
        self.c3_field([&dy, &dz, &dw], PairingSet::Symmetric)
    }

    /// `φ₀ + Σ_{k<=order} (1/k!) C_k j…j`.
    pub fn taylor_response(&self, j: &SourceField, order: usize) -> Result<Field> {
        self.require(order)?;
        let mut out = self.background.field().clone();
        if order == 0 {
            return Ok(out);
        }
        let s = j.values();
        let u = self.green.respond(&s)?;
        out += &u;
        if order == 1 {
            return Ok(out);
        }
        let lambda = self.background.lambda();
        let v = self.c2_from_responses(&u, &u, lambda)?;
        out.scaled_add(0.5, &v);
        if order == 2 {
            return Ok(out);
        }
        let w = self.c3_from_responses([&u, &u, &u], [&v, &v, &v], PairingSet::Symmetric)?;
        out.scaled_add(1.0 / 6.0, &w);
        Ok(out)
    }

    /// Kernels contracted with up to three external sources, for
    /// [`hierarchy_residual`].
    pub fn external_kernels(&self, sources: &[Field]) -> Result<ExternalKernels> {
        if sources.len() > 3 {
            return Err(Error::Capability("at most three external sources".into()));
        }
        self.require(sources.len())?;
        let lat = self.lattice();
        let mut ek = ExternalKernels::new(lat, self.background.lambda(), self.background.field().clone())?;
        let u = par::map_slice(sources, |s| self.green.respond(s));
        let u = u.into_iter().collect::<Result<Vec<_>>>()?;
        for (k, (s, uk)) in sources.iter().zip(&u).enumerate() {
            ek.set_source(k, s.clone())?;
            ek.insert(1 << k, uk.clone())?;
        }
        let lambda = self.background.lambda();
        let mut v = BTreeMap::new();
        for a in 0..sources.len() {
            for b in a + 1..sources.len() {
                let vab = self.c2_from_responses(&u[a], &u[b], lambda)?;
                ek.insert((1 << a) | (1 << b), vab.clone())?;
                v.insert((a, b), vab);
            }
        }
        if sources.len() == 3 {
            let w = self.c3_from_responses(
                [&u[0], &u[1], &u[2]],
                [&v[&(1, 2)], &v[&(0, 2)], &v[&(0, 1)]],
                PairingSet::Symmetric,
            )?;
            ek.insert(0b111, w)?;
        }
        Ok(ek)
    }
}

/// Fields `K_S(x)` keyed by subsets `S` of up to three external labels (as
/// bit masks): `K_∅ = φ₀`, `K_{y} = C₁(x, y)`, `K_{y,z} = C₂(x; y, z)`, …,
/// possibly contracted with sources. `sources[k]` is the inhomogeneity that
/// accompanies external `k` at first order.
#[derive(Debug, Clone)]
pub struct ExternalKernels {
    lat: Lattice1p1,
    lambda: f64,
    kernels: BTreeMap<u8, Field>,
    sources: BTreeMap<usize, Field>,
}

impl ExternalKernels {
    pub fn new(lat: &Lattice1p1, lambda: f64, phi0: Field) -> Result<Self> {
        lat.check_field(&phi0)?;
        let mut kernels = BTreeMap::new();
        kernels.insert(0u8, phi0);
        Ok(Self { lat: *lat, lambda, kernels, sources: BTreeMap::new() })
    }

    pub fn lattice(&self) -> &Lattice1p1 {
        &self.lat
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn insert(&mut self, mask: u8, field: Field) -> Result<()> {
        if mask == 0 || mask > 0b111 {
            return Err(Error::Parameter(format!("external mask must be in 1..=7, got {mask}")));
        }
        self.lat.check_field(&field)?;
        self.kernels.insert(mask, field);
        Ok(())
    }

    pub fn set_source(&mut self, external: usize, source: Field) -> Result<()> {
        if external > 2 {
            return Err(Error::Parameter(format!("external index must be 0..=2, got {external}")));
        }
        self.lat.check_field(&source)?;
        self.sources.insert(external, source);
        Ok(())
    }

    pub fn kernel(&self, mask: u8) -> Result<&Field> {
        self.kernels
            .get(&mask)
            .ok_or_else(|| Error::Capability(format!("kernel for external set {mask:#05b} is missing")))
    }

    pub fn source(&self, external: usize) -> Option<&Field> {
        self.sources.get(&external)
    }

    pub fn phi0(&self) -> &Field {
        &self.kernels[&0]
    }
}

fn submasks(s: u8) -> impl Iterator<Item = u8> {
    let mut next = Some(s);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & s) };
        Some(cur)
    })
}

/// `λ δ^S(φ³)`: sum over ordered splittings `S = B₁ ⊔ B₂ ⊔ B₃` of `Π K_{B_i}`.
pub fn cubic_variation(kernels: &ExternalKernels, set: u8) -> Result<Field> {
    let mut out = kernels.lat.zeros();
    for b1 in submasks(set) {
        let rest = set & !b1;
        for b2 in submasks(rest) {
            let b3 = rest & !b2;
            let (k1, k2, k3) = (kernels.kernel(b1)?, kernels.kernel(b2)?, kernels.kernel(b3)?);
            Zip::from(&mut out).and(k1).and(k2).and(k3).for_each(|o, &a, &b, &c| *o += a * b * c);
        }
    }
    out *= kernels.lambda;
    Ok(out)
}

/// Pointwise residual of the order-`k` hierarchy equation for the kernel with
/// externals `0..k`: `∂²K_S + λ δ^S(φ³) − [k = 1] s₀`.
pub fn hierarchy_residual_field(order: usize, kernels: &ExternalKernels, stencil: Stencil) -> Result<Field> {
    if order > 3 {
        return Err(Error::Capability(format!("hierarchy residual defined for orders 0..=3, got {order}")));
    }
    let set = ((1u16 << order) - 1) as u8;
    let mut r = dalembertian(kernels.kernel(set)?, &kernels.lat, stencil);
    r += &cubic_variation(kernels, set)?;
    if order == 1 {
        if let Some(s) = kernels.source(0) {
            r -= s;
        }
    }
    let m = stencil.margin();
    let (nt, nx) = r.dim();
    for ((n, i), v) in r.indexed_iter_mut() {
        if n < m || i < m || n + m >= nt || i + m >= nx {
            *v = 0.0;
        }
    }
    Ok(r)
}

/// Max interior value of [`hierarchy_residual_field`].
pub fn hierarchy_residual(order: usize, kernels: &ExternalKernels, stencil: Stencil) -> Result<f64> {
    let r = hierarchy_residual_field(order, kernels, stencil)?;
    Ok(max_abs_interior(&r, stencil.margin()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::WaveBackground;

    fn setup() -> (Lattice1p1, LatticeBackground) {
        let bg = WaveBackground::rest(1.0, 2.0).unwrap();
        let lat = Lattice1p1::new(14, 12, 0.1, 0.2).unwrap();
        (lat, LatticeBackground::sampled(&bg, &lat).unwrap())
    }

    #[test]
    fn submask_enumeration() {
        let mut v: Vec<u8> = submasks(0b101).collect();
        v.sort();
        assert_eq!(v, vec![0, 1, 4, 5]);
        assert_eq!(submasks(0).count(), 1);
    }

    #[test]
    fn kernel_grid_quadrature_matches_solver() {
        let (lat, bgl) = setup();
        let green = RetardedGreen::new(&bgl);
        let grid = KernelGrid::assemble(&green).unwrap();
        let s = SourceField::bump(&lat, 0.6, 1.1, 0.4, 1.0).unwrap().values();
        let a = grid.apply(&s).unwrap();
        let b = green.respond(&s).unwrap();
        let err = (&a - &b).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err < 1e-12 * (1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs()))));
    }

    #[test]
    fn retarded_transpose_is_advanced() {
        let (_, bgl) = setup();
        assert!(reciprocity_defect(&bgl).unwrap() < 1e-12);
    }

    #[test]
    fn retarded_kernel_is_not_symmetric() {
        let (_, bgl) = setup();
        let g = KernelGrid::assemble(&RetardedGreen::new(&bgl)).unwrap();
        assert!(g.max_abs_difference(&g.transpose()).unwrap() > 0.1 * g.max_abs());
    }

    #[test]
    fn dense_grid_size_limit() {
        let bg = WaveBackground::rest(1.0, 2.0).unwrap();
        let lat = Lattice1p1::new(80, 80, 0.05, 0.1).unwrap();
        let bgl = LatticeBackground::sampled(&bg, &lat).unwrap();
        assert!(KernelGrid::assemble(&RetardedGreen::new(&bgl)).is_err());
    }

    #[test]
    fn c2_is_odd_in_lambda() {
        let (lat, bgl) = setup();
        let h = Hierarchy::new(bgl);
        let s = SourceField::bump(&lat, 0.5, 1.1, 0.3, 1.0).unwrap().values();
        let u = h.c1_field(&s).unwrap();
        let a = h.c2_from_responses(&u, &u, 0.7).unwrap();
        let b = h.c2_from_responses(&u, &u, -0.7).unwrap();
        assert!((&a + &b).iter().all(|v| v.abs() < 1e-15));
        assert!(h.c2_from_responses(&u, &u, 0.0).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn c2_convolution_is_symmetric() {
        let (_, bgl) = setup();
        let h = Hierarchy::new(bgl);
        let a = h.c2_convolution((2, 4), (3, 7)).unwrap();
        let b = h.c2_convolution((3, 7), (2, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn c3_convolution_is_symmetric() {
        let (_, bgl) = setup();
        let h = Hierarchy::new(bgl);
        let a = h.c3_convolution((2, 4), (3, 7), (1, 5)).unwrap();
        let b = h.c3_convolution((1, 5), (2, 4), (3, 7)).unwrap();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(scale > 0.0);
        assert!((&a - &b).iter().all(|v| v.abs() <= 1e-12 * scale));
    }

    #[test]
    fn taylor_response_without_source_is_background() {
        let (lat, bgl) = setup();
        let h = Hierarchy::new(bgl.clone());
        for order in 0..=3 {
            assert_eq!(&h.taylor_response(&SourceField::zero(&lat), order).unwrap(), bgl.field());
        }
    }

    #[test]
    fn missing_order_is_capability_error() {
        let (lat, bgl) = setup();
        let h = Hierarchy::with_max_order(bgl, 1).unwrap();
        let j = SourceField::zero(&lat);
        assert!(matches!(h.taylor_response(&j, 2), Err(Error::Capability(_))));
        assert!(h.taylor_response(&j, 1).is_ok());
    }

    #[test]
    fn zero_kernel_residual_is_the_delta() {
        let (lat, bgl) = setup();
        let mut ek = ExternalKernels::new(&lat, 2.0, bgl.field().clone()).unwrap();
        ek.insert(1, lat.zeros()).unwrap();
        ek.set_source(0, lat.delta(5, 6)).unwrap();
        let r = hierarchy_residual_field(1, &ek, Stencil::Leapfrog).unwrap();
        for ((n, i), v) in r.indexed_iter() {
            let expected = if (n, i) == (5, 6) { -1.0 / lat.cell_volume() } else { 0.0 };
            assert_eq!(*v, expected);
        }
    }

    #[test]
    fn discrete_hierarchy_holds_exactly_with_leapfrog() {
        let (lat, bgl) = setup();
        let h = Hierarchy::new(bgl);
        let s: Vec<Field> = [(0.5, 1.0), (0.7, 1.2), (0.4, 1.4)]
            .iter()
            .map(|&(t, x)| SourceField::bump(&lat, t, x, 0.35, 1.0).unwrap().values())
            .collect();
        let ek = h.external_kernels(&s).unwrap();
        for order in 1..=3 {
            let r = hierarchy_residual(order, &ek, Stencil::Leapfrog).unwrap();
            assert!(r < 1e-9, "order {order}: {r}");
        }
    }

    #[test]
    fn duplicated_pairing_breaks_third_order() {
        let (lat, bgl) = setup();
        let h = Hierarchy::new(bgl);
        let s: Vec<Field> = [(0.5, 1.0), (0.7, 1.2), (0.4, 1.4)]
            .iter()
            .map(|&(t, x)| SourceField::bump(&lat, t, x, 0.35, 1.0).unwrap().values())
            .collect();
        let mut ek = h.external_kernels(&s).unwrap();
        let good = hierarchy_residual(3, &ek, Stencil::Leapfrog).unwrap();
        let bad = h.c3_field([&s[0], &s[1], &s[2]], PairingSet::Duplicated).unwrap();
        ek.insert(0b111, bad).unwrap();
        let r = hierarchy_residual(3, &ek, Stencil::Leapfrog).unwrap();
        assert!(r > 1e3 * good.max(1e-14), "duplicated {r}, symmetric {good}");
    }

    #[test]
    fn mismatched_geometry_is_shape_error() {
        let (lat, bgl) = setup();
        let mut ek = ExternalKernels::new(&lat, 2.0, bgl.field().clone()).unwrap();
        let other = Lattice1p1::new(20, 12, 0.1, 0.2).unwrap();
        assert!(matches!(ek.insert(1, other.zeros()), Err(Error::Shape(_))));
    }
}
