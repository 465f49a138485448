use ndarray::Zip;
use proptest::prelude::*;
use qfield_core::hierarchy::{hierarchy_residual, reciprocity_defect, Hierarchy, KernelGrid};
use qfield_core::lattice::{
    solve_nonlinear, AdvancedGreen, Field, Lattice1p1, LatticeBackground, RetardedGreen, SourceField, Stencil,
};
use qfield_core::scalar::WaveBackground;

fn rest() -> WaveBackground {
    WaveBackground::rest(1.0, 2.0).unwrap()
}

fn lattice(n: usize) -> Lattice1p1 {
    let dx = rest().time_period() / n as f64;
    Lattice1p1::new(n, n, 0.5 * dx, dx).unwrap()
}

fn max_diff(a: &Field, b: &Field) -> f64 {
    Zip::from(a).and(b).fold(0.0f64, |m, x, y| m.max((x - y).abs()))
}

fn max_abs(a: &Field) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `−6λ Σ_w G(x, w) φ₀(w) G(w, y) G(w, z) dt dx` from the dense kernel.
fn c2_by_summation(g: &KernelGrid, phi0: &Field, lambda: f64, y: usize, z: usize) -> Vec<f64> {
    let v = g.values();
    let lat = g.lattice();
    let sites = lat.sites();
    (0..sites)
        .map(|x| {
            let s: f64 = (0..sites)
                .map(|w| {
                    let (n, i) = lat.site(w);
                    v[[x, w]] * phi0[[n, i]] * v[[w, y]] * v[[w, z]]
                })
                .sum();
            -6.0 * lambda * s * lat.cell_volume()
        })
        .collect()
}

#[test]
fn c2_matches_explicit_kernel_sum() {
    let lat = lattice(16);
    let bg = LatticeBackground::sampled(&rest(), &lat).unwrap();
    let grid = KernelGrid::assemble(&RetardedGreen::new(&bg)).unwrap();
    let h = Hierarchy::new(bg.clone());
    for (y, z) in [((2, 5), (3, 9)), ((4, 7), (4, 7)), ((1, 1), (6, 12))] {
        let c2 = h.c2_convolution(y, z).unwrap();
        let oracle = c2_by_summation(&grid, bg.field(), bg.lambda(), lat.site_index(y.0, y.1), lat.site_index(z.0, z.1));
        let scale = max_abs(&c2).max(1e-300);
        for (k, o) in oracle.iter().enumerate() {
            let (n, i) = lat.site(k);
            assert!((c2[[n, i]] - o).abs() <= 1e-11 * scale, "{y:?} {z:?} at {k}");
        }
    }
}

#[test]
fn c3_matches_explicit_kernel_sum() {
    let lat = lattice(12);
    let bg = LatticeBackground::sampled(&rest(), &lat).unwrap();
    let grid = KernelGrid::assemble(&RetardedGreen::new(&bg)).unwrap();
    let v = grid.values();
    let lambda = bg.lambda();
    let phi0 = bg.field();
    let sites = lat.sites();
    let (y, z, w) = ((1usize, 4usize), (2usize, 6usize), (3usize, 5usize));
    let (iy, iz, iw) = (lat.site_index(y.0, y.1), lat.site_index(z.0, z.1), lat.site_index(w.0, w.1));
    let c2 = |a: usize, b: usize| c2_by_summation(&grid, phi0, lambda, a, b);
    let (c2zw, c2yw, c2yz) = (c2(iz, iw), c2(iy, iw), c2(iy, iz));
    let oracle: Vec<f64> = (0..sites)
        .map(|x| {
            let s: f64 = (0..sites)
                .map(|q| {
                    let (n, i) = lat.site(q);
                    let (gy, gz, gw) = (v[[q, iy]], v[[q, iz]], v[[q, iw]]);
                    v[[x, q]] * (phi0[[n, i]] * (gy * c2zw[q] + gz * c2yw[q] + gw * c2yz[q]) + gy * gz * gw)
                })
                .sum();
            -6.0 * lambda * s * lat.cell_volume()
        })
        .collect();
    let c3 = Hierarchy::new(bg).c3_convolution(y, z, w).unwrap();
    let scale = max_abs(&c3);
    assert!(scale > 0.0);
    for (k, o) in oracle.iter().enumerate() {
        let (n, i) = lat.site(k);
        assert!((c3[[n, i]] - o).abs() <= 1e-10 * scale, "site {k}");
    }
}

#[test]
fn retarded_and_advanced_kernels_are_transposes() {
    let lat = lattice(20);
    let bg = LatticeBackground::sampled(&rest(), &lat).unwrap();
    let ret = KernelGrid::assemble(&RetardedGreen::new(&bg)).unwrap();
    let adv = KernelGrid::assemble(&AdvancedGreen::new(&bg)).unwrap();
    let scale = ret.max_abs();
    let mut worst = 0.0f64;
    let mut asym = 0.0f64;
    for a in 0..lat.sites() {
        for b in 0..lat.sites() {
            let (pa, pb) = (lat.site(a), lat.site(b));
            if lat.accepts_source(pa.0, pa.1) && lat.accepts_source(pb.0, pb.1) {
                worst = worst.max((ret.get(pa, pb) - adv.get(pb, pa)).abs());
                asym = asym.max((ret.get(pa, pb) - ret.get(pb, pa)).abs());
            }
        }
    }
    assert!(worst < 1e-12 * scale);
    assert!(asym > 0.1 * scale, "a retarded kernel cannot be symmetric");
    assert!(reciprocity_defect(&bg).unwrap() < 1e-12);
}

#[test]
fn zero_coupling_gives_vanishing_higher_kernels() {
    let lat = lattice(16);
    let bg = LatticeBackground::from_field(&lat, 0.0, lat.sample(|t, x| (t - x).sin())).unwrap();
    let h = Hierarchy::new(bg);
    assert!(max_abs(&h.c2_convolution((3, 4), (5, 6)).unwrap()) == 0.0);
    assert!(max_abs(&h.c3_convolution((3, 4), (5, 6), (2, 8)).unwrap()) == 0.0);
}

fn taylor_slope(order: usize, eps: [f64; 3]) -> Vec<f64> {
    let bg = rest();
    let lat = lattice(64);
    let h = Hierarchy::new(LatticeBackground::evolved(&bg, &lat).unwrap());
    let t_len = (lat.nt - 1) as f64 * lat.dt;
    let x_len = (lat.nx - 1) as f64 * lat.dx;
    let j = SourceField::bump(&lat, 0.3 * t_len, 0.5 * x_len, 0.15 * t_len.min(x_len), 1.0).unwrap();
    let errors: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let je = j.with_amplitude(e);
            let exact = solve_nonlinear(&bg, &je, &lat).unwrap().field;
            max_diff(&exact, &h.taylor_response(&je, order).unwrap())
        })
        .collect();
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn taylor_truncation_error_orders() {
    for s in taylor_slope(1, [1e-2, 5e-3, 2.5e-3]) {
        assert!((s - 2.0).abs() < 0.3, "order 1: {s}");
    }
    for s in taylor_slope(2, [1e-2, 5e-3, 2.5e-3]) {
        assert!((s - 3.0).abs() < 0.3, "order 2: {s}");
    }
    for s in taylor_slope(3, [0.4, 0.2, 0.1]) {
        assert!((s - 4.0).abs() < 0.3, "order 3: {s}");
    }
}

#[test]
fn order_two_residual_shrinks_under_refinement() {
    let bg = rest();
    let mut res = Vec::new();
    let mut lat = lattice(64);
    for _ in 0..3 {
        let t_len = (lat.nt - 1) as f64 * lat.dt;
        let x_len = (lat.nx - 1) as f64 * lat.dx;
        let j = SourceField::bump(&lat, 0.3 * t_len, 0.5 * x_len, 0.15 * t_len.min(x_len), 1.0).unwrap().values();
        let h = Hierarchy::new(LatticeBackground::sampled(&bg, &lat).unwrap());
        let ek = h.external_kernels(&[j.clone(), j]).unwrap();
        res.push(hierarchy_residual(2, &ek, Stencil::FourthOrder).unwrap());
        lat = lat.refined();
    }
    assert!(res[0] / res[1] >= 2.0 && res[1] / res[2] >= 2.0, "{res:?}");
}

#[test]
fn evolved_background_satisfies_discrete_hierarchy_to_roundoff() {
    let bg = rest();
    let lat = lattice(48);
    let h = Hierarchy::new(LatticeBackground::evolved(&bg, &lat).unwrap());
    let t_len = (lat.nt - 1) as f64 * lat.dt;
    let x_len = (lat.nx - 1) as f64 * lat.dx;
    let sources: Vec<Field> = (0..3)
        .map(|k| {
            SourceField::bump(&lat, (0.2 + 0.05 * k as f64) * t_len, (0.4 + 0.1 * k as f64) * x_len, 0.1 * x_len, 1.0)
                .unwrap()
                .values()
        })
        .collect();
    let ek = h.external_kernels(&sources).unwrap();
    for order in 0..=3 {
        let r = hierarchy_residual(order, &ek, Stencil::Leapfrog).unwrap();
        assert!(r < 1e-8, "order {order}: {r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn higher_kernels_are_permutation_symmetric(
        y in (1usize..14, 1usize..15),
        z in (1usize..14, 1usize..15),
        w in (1usize..14, 1usize..15),
    ) {
        let lat = lattice(16);
        let h = Hierarchy::new(LatticeBackground::sampled(&rest(), &lat).unwrap());
        let a = h.c2_convolution(y, z).unwrap();
        let b = h.c2_convolution(z, y).unwrap();
        prop_assert!(max_diff(&a, &b) <= 1e-12 * max_abs(&a).max(1e-300));
        let base = h.c3_convolution(y, z, w).unwrap();
        let scale = max_abs(&base).max(1e-300);
        for perm in [(z, y, w), (w, z, y), (y, w, z), (z, w, y)] {
            let p = h.c3_convolution(perm.0, perm.1, perm.2).unwrap();
            prop_assert!(max_diff(&base, &p) <= 1e-12 * scale);
        }
    }

    #[test]
    fn second_kernel_is_odd_in_the_coupling(lambda in 0.01f64..10.0, seed in 0u64..100) {
        let lat = lattice(16);
        let h = Hierarchy::new(LatticeBackground::sampled(&rest(), &lat).unwrap());
        let u1 = lat.sample(|t, x| (t * (1.0 + seed as f64 * 0.01)).sin() * x.cos());
        let u2 = lat.sample(|t, x| (x - 0.3 * t).sin());
        let plus = h.c2_from_responses(&u1, &u2, lambda).unwrap();
        let minus = h.c2_from_responses(&u1, &u2, -lambda).unwrap();
        prop_assert!(max_diff(&plus, &(-&minus)) <= 1e-14 * max_abs(&plus).max(1.0));
    }
}
