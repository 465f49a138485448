use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use qfield_core::scalar::{propagator_momentum, FourVector, PoleSeries, WaveBackground};
use qfield_core::yangmills::{
    casimir_contraction_audit, casimir_contraction_audit_with, contact_terms, field_strength, max_abs_color,
    no_current, smilga_ansatz, smilga_field_strength_exact, tensor_propagator, ym_residual, ColorGaugeField,
    Epsilon3, KernelSubstitution, MixedSymbols,
};

const G: [i64; 4] = [1, -1, -1, -1];

fn levi_civita(a: usize, b: usize, c: usize) -> i64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

fn eta(a: usize, mu: usize) -> i64 {
    (mu == a + 1) as i64
}

fn metric(mu: usize, nu: usize) -> i64 {
    if mu == nu {
        G[mu]
    } else {
        0
    }
}

fn kernel(sub: KernelSubstitution, b: usize, f: usize, mu: usize, rho: usize) -> i64 {
    match sub {
        KernelSubstitution::Metric => (b == f) as i64 * metric(mu, rho),
        KernelSubstitution::Aligned => eta(b, mu) * eta(f, rho),
    }
}

/// The three contact terms by direct summation over every index.
fn brute_contact_terms(sub: KernelSubstitution) -> Vec<[i64; 144]> {
    let mut out = vec![[0i64; 144]; 3];
    for a in 0..3 {
        for f in 0..3 {
            for nu in 0..4 {
                for rho in 0..4 {
                    let slot = ((a * 3 + f) * 4 + nu) * 4 + rho;
                    for b in 0..3 {
                        for c in 0..3 {
                            for d in 0..3 {
                                for e in 0..3 {
                                    let ee = levi_civita(a, b, c) * levi_civita(c, d, e);
                                    for mu in 0..4 {
                                        // raise μ with the metric on whichever factor carries it up
                                        out[0][slot] += ee * G[mu] * kernel(sub, b, f, mu, rho) * eta(d, mu) * eta(e, nu);
                                        out[1][slot] += ee * G[mu] * eta(b, mu) * kernel(sub, d, f, mu, rho) * eta(e, nu);
                                        out[2][slot] += ee * G[mu] * eta(b, mu) * eta(d, mu) * kernel(sub, e, f, nu, rho);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn basis() -> DMatrix<f64> {
    DMatrix::from_fn(144, 4, |slot, k| {
        let rho = slot % 4;
        let nu = (slot / 4) % 4;
        let f = (slot / 16) % 3;
        let a = slot / 48;
        let d = (a == f) as i64;
        (match k {
            0 => d * metric(nu, rho),
            1 => d * (nu == 0 && rho == 0) as i64,
            2 => eta(a, nu) * eta(f, rho),
            _ => eta(a, rho) * eta(f, nu),
        }) as f64
    })
}

fn project(t: &[i64; 144]) -> (Vec<f64>, f64) {
    let b = basis();
    let v = DVector::from_iterator(144, t.iter().map(|&x| x as f64));
    let coeffs = b.clone().svd(true, true).solve(&v, 1e-12).unwrap();
    let residual = (&b * &coeffs - &v).norm();
    (coeffs.iter().copied().collect(), residual)
}

#[test]
fn symbol_identities_by_enumeration() {
    let e = Epsilon3;
    let m = MixedSymbols::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                assert_eq!(e.get(a, b, c), levi_civita(a, b, c));
            }
            let contracted: i64 = (0..4).map(|mu| eta(a, mu) * G[mu] * eta(b, mu)).sum();
            assert_eq!(contracted, -((a == b) as i64));
            assert_eq!(m.contract(a, b), contracted);
            let casimir: i64 = (0..3).flat_map(|p| (0..3).map(move |q| (p, q))).map(|(p, q)| {
                levi_civita(p, q, a) * levi_civita(p, q, b)
            }).sum();
            assert_eq!(casimir, 2 * (a == b) as i64);
        }
        for mu in 0..4 {
            assert_eq!(m.lower(a, mu), eta(a, mu));
        }
        assert_eq!(m.lower(a, 0), 0);
    }
}

#[test]
fn contact_terms_agree_with_brute_force() {
    for sub in [KernelSubstitution::Metric, KernelSubstitution::Aligned] {
        let lib = contact_terms(sub);
        let brute = brute_contact_terms(sub);
        for k in 0..3 {
            let flat: Vec<i64> = lib[k].iter().flatten().flatten().flatten().copied().collect();
            assert_eq!(flat, brute[k].to_vec(), "{sub:?} term {k}");
        }
    }
}

#[test]
fn metric_substitution_decomposition() {
    let brute = brute_contact_terms(KernelSubstitution::Metric);
    let mut sum = [0i64; 144];
    for (k, t) in brute.iter().enumerate() {
        let (c, r) = project(t);
        assert!(r < 1e-10, "term {k} leaves a remainder {r}");
        let expected_delta_metric = [0.0, -1.0, 2.0][k];
        assert!((c[0] - expected_delta_metric).abs() < 1e-10, "term {k}: {c:?}");
        for (s, v) in sum.iter_mut().zip(t) {
            *s += v;
        }
    }
    let (c, r) = project(&sum);
    assert!(r < 1e-10);
    for (x, y) in c.iter().zip([1.0, 1.0, -2.0, 1.0]) {
        assert!((x - y).abs() < 1e-10, "sum: {c:?}");
    }
    let audit = casimir_contraction_audit(1.0);
    assert_eq!(audit.delta_metric_coefficient, "1");
    assert!(!audit.delta_metric_matches);
    assert_eq!(audit.sum.basis_coefficients, ["1", "1", "-2", "1"]);
    assert_eq!(audit.sum.remainder_norm_sq, "0");
}

#[test]
fn aligned_substitution_gives_six() {
    let brute = brute_contact_terms(KernelSubstitution::Aligned);
    let mut sum = [0i64; 144];
    for t in &brute {
        let (c, r) = project(t);
        assert!(r < 1e-10);
        assert!((c[2] - 2.0).abs() < 1e-10 && c[0].abs() < 1e-10 && c[1].abs() < 1e-10 && c[3].abs() < 1e-10);
        for (s, v) in sum.iter_mut().zip(t) {
            *s += v;
        }
    }
    assert!((project(&sum).0[2] - 6.0).abs() < 1e-10);
    let audit = casimir_contraction_audit_with(2.0, KernelSubstitution::Aligned);
    assert_eq!(audit.sum.basis_coefficients, ["0", "0", "6", "0"]);
    assert_eq!(audit.delta_metric_value, 0.0);
}

#[test]
fn coupling_scales_audit_values() {
    for g in [0.0, 0.5, 3.0] {
        let audit = casimir_contraction_audit(g);
        assert!((audit.delta_metric_value - g * g).abs() < 1e-12);
        assert!((audit.expected_value - 6.0 * g * g).abs() < 1e-12);
        if g == 0.0 {
            assert!(audit.sum.coefficients.iter().all(|v| *v == 0.0));
        }
    }
}

#[test]
fn ansatz_field_strength_against_closed_form() {
    let bg = WaveBackground::rest(1.3, 2.0 * 0.8 * 0.8).unwrap();
    let a = smilga_ansatz(&bg, 0.8).unwrap();
    for t in [0.1, 0.7, 2.3] {
        let x = FourVector::new(t, 0.3, -0.5, 1.1);
        let num = field_strength(&a, &x, 1e-4);
        let exact = smilga_field_strength_exact(&bg, 0.8, &x);
        for c in 0..3 {
            for mu in 0..4 {
                for nu in 0..4 {
                    assert!((num[c][mu][nu] - exact[c][mu][nu]).abs() < 1e-7);
                    assert!((num[c][mu][nu] + num[c][nu][mu]).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn pure_gauge_zero_and_abelian_fields() {
    let zero = ColorGaugeField::zero(1.0);
    let x = FourVector::new(0.2, 0.1, 0.0, 0.4);
    assert_eq!(max_abs_color(&ym_residual(&zero, &no_current, &x, 1e-3)), 0.0);
    // a single color plane wave obeys the free Maxwell equations
    let wave = ColorGaugeField::new(1.0, |x: &FourVector| {
        let mut a = [[0.0; 4]; 3];
        a[0][2] = (x.t - x.x).sin();
        a
    });
    assert!(max_abs_color(&ym_residual(&wave, &no_current, &x, 1e-3)) < 1e-6);
}

#[test]
fn propagator_trace_is_three_scalar_propagators() {
    let series = PoleSeries::new(1.0, 1e-2, 8).unwrap();
    for k in [FourVector::new(0.5, 0.1, 0.2, 0.0), FourVector::new(2.0, -1.0, 0.3, 0.7)] {
        let d = tensor_propagator(&k, &series).unwrap();
        let c1 = propagator_momentum(k.t, (k.x * k.x + k.y * k.y + k.z * k.z).sqrt(), &series);
        for a in 0..3 {
            let tr: num_complex::Complex64 = (0..4).map(|mu| d[a][a][mu][mu] * G[mu] as f64).sum();
            assert!((tr - c1 * 3.0).norm() < 1e-12 * c1.norm().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ansatz_residual_is_second_order(t in 0.0f64..5.0, x in -2.0f64..2.0, g in 0.3f64..2.0) {
        let bg = WaveBackground::rest(1.0, 2.0 * g * g).unwrap();
        let a = smilga_ansatz(&bg, g).unwrap();
        let p = FourVector::new(t, x, 0.2, -0.4);
        let h = 1e-2 / bg.mass();
        let r1 = max_abs_color(&ym_residual(&a, &no_current, &p, h));
        let r2 = max_abs_color(&ym_residual(&a, &no_current, &p, h / 2.0));
        let scale = g * g * bg.amplitude().powi(3);
        prop_assert!(r2 < 1e-4 * scale);
        prop_assert!(r1 < 5.0 * r2 + 1e-9 * scale);
    }

    #[test]
    fn propagator_is_transverse(k in prop::array::uniform4(-3.0f64..3.0)) {
        let k = FourVector::from_array(k);
        prop_assume!(k.square().abs() > 1e-2);
        let series = PoleSeries::new(1.0, 1e-2, 8).unwrap();
        let d = tensor_propagator(&k, &series).unwrap();
        let ku = k.to_array();
        let norm = d[1][1].iter().flatten().fold(0.0f64, |m, v| m.max(v.norm()));
        let kmax = ku.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for a in 0..3 {
            for b in 0..3 {
                for nu in 0..4 {
                    let s: num_complex::Complex64 = (0..4).map(|mu| d[a][b][mu][nu] * ku[mu]).sum();
                    prop_assert!(s.norm() <= 1e-12 * norm * kmax);
                    if a != b {
                        prop_assert!((0..4).all(|mu| d[a][b][mu][nu].norm() == 0.0));
                    }
                }
            }
        }
    }
}
