use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use qfield_core::cumulants::{
    bell, cumulants_from_moments, gaussian_closure_check, gaussian_sampling_check, moments_from_cumulants, multisets,
    set_partitions, CumulantSet, GaussianSampler, MomentSet, PointSet,
};
use qfield_core::dyson::{ds_terms, DsForm};

/// `E[Π x_i]` for `x ~ N(μ, Σ)`: expand each factor as `μ + y` and pair the
/// centred parts in every possible way.
fn isserlis(idx: &[usize], mean: &[f64], cov: &DMatrix<f64>) -> f64 {
    fn pairings(rest: &[usize], cov: &DMatrix<f64>) -> f64 {
        match rest {
            [] => 1.0,
            [_] => 0.0,
            [first, tail @ ..] => (0..tail.len())
                .map(|k| {
                    let mut remaining = tail.to_vec();
                    let partner = remaining.remove(k);
                    cov[(*first, partner)] * pairings(&remaining, cov)
                })
                .sum(),
        }
    }
    let n = idx.len();
    (0u32..1 << n)
        .map(|mask| {
            let centred: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| idx[b]).collect();
            let fixed: f64 = (0..n).filter(|b| mask >> b & 1 == 0).map(|b| mean[idx[b]]).product();
            fixed * pairings(&centred, cov)
        })
        .sum()
}

fn test_gaussian() -> (Vec<f64>, DMatrix<f64>) {
    let mean = vec![0.3, -0.7, 1.1];
    let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, -0.4, 0.0, 0.8, 0.3, 0.5, -0.1, 0.6]);
    (mean, &a * a.transpose() + DMatrix::identity(3, 3) * 0.1)
}

fn gaussian_cumulants(mean: &[f64], cov: &DMatrix<f64>, order: usize) -> CumulantSet {
    let n = mean.len();
    let mut g = CumulantSet::new(n, order).unwrap();
    for i in 0..n {
        g.set(&[i], mean[i]).unwrap();
        for j in i..n {
            g.set(&[i, j], cov[(i, j)]).unwrap();
        }
    }
    g
}

#[test]
fn gaussian_moments_follow_wick_pairings() {
    let (mean, cov) = test_gaussian();
    let pts = PointSet::numbered(3).unwrap();
    let s = moments_from_cumulants(&gaussian_cumulants(&mean, &cov, 6), &pts, 6).unwrap();
    for order in 1..=6 {
        for idx in multisets(3, order) {
            let w = isserlis(&idx, &mean, &cov);
            assert!((s.get(&idx) - w).abs() < 1e-12 * w.abs().max(1.0), "{idx:?}");
        }
    }
}

#[test]
fn low_order_moment_relations() {
    let pts = PointSet::numbered(2).unwrap();
    let mut g = CumulantSet::new(2, 4).unwrap();
    g.set(&[0], 0.5).unwrap();
    g.set(&[1], -2.0).unwrap();
    g.set(&[0, 1], 0.25).unwrap();
    g.set(&[0, 0, 1], 0.1).unwrap();
    let s = moments_from_cumulants(&g, &pts, 3).unwrap();
    assert!((s.get(&[1, 0]) - (0.25 + 0.5 * -2.0)).abs() < 1e-15);
    // S(0,0,1) = G001 + G00 G1 + 2 G01 G0 + G0 G0 G1
    let expected = 0.1 + 0.0 + 2.0 * 0.25 * 0.5 + 0.25 * -2.0;
    assert!((s.get(&[0, 1, 0]) - expected).abs() < 1e-15);
    let zero = moments_from_cumulants(&CumulantSet::new(2, 4).unwrap(), &pts, 4).unwrap();
    assert!(zero.entries().all(|(_, v)| *v == 0.0));
}

#[test]
fn partitions_are_valid_and_counted_by_bell_numbers() {
    let known = [1u64, 1, 2, 5, 15, 52, 203];
    for n in 0..=6 {
        let parts = set_partitions(n);
        assert_eq!(parts.len() as u64, known[n]);
        assert_eq!(bell(n), known[n]);
        for p in &parts {
            let mut all: Vec<usize> = p.iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..n).collect::<Vec<_>>());
            assert!(p.iter().all(|b| !b.is_empty()));
        }
    }
}

#[test]
fn closure_test_flags_nonzero_third_order() {
    let (mean, cov) = test_gaussian();
    let mut g = gaussian_cumulants(&mean, &cov, 4);
    assert!(gaussian_closure_check(&g, 1e-12).gaussian);
    g.set(&[0, 1, 2], 0.1).unwrap();
    let report = gaussian_closure_check(&g, 1e-12);
    assert!(!report.gaussian);
    assert_eq!(report.violations, vec![(vec![0, 1, 2], 0.1)]);
}

#[test]
fn sampling_agrees_with_the_gaussian_and_is_reproducible() {
    let (mean, cov) = test_gaussian();
    let sampler = GaussianSampler::new(DVector::from_vec(mean), cov).unwrap();
    let a = gaussian_sampling_check(&sampler, 80_000, 7, 16).unwrap();
    let b = gaussian_sampling_check(&sampler, 80_000, 7, 16).unwrap();
    assert!(a.within(5.0), "{a:?}");
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let pooled_a = sampler.sample(5_000, 3, 4).unwrap().pooled();
    let pooled_b = sampler.sample(5_000, 3, 4).unwrap().pooled();
    assert_eq!(pooled_a, pooled_b);
    assert_ne!(pooled_a, sampler.sample(5_000, 4, 4).unwrap().pooled());
}

type Term = Vec<(u8, u8)>;

/// `δ/δJ(e)` of a sum of products of connected functions, where
/// `δG(m, S)/δJ(e) = G(m, S ∪ {e})`.
fn differentiate(expr: &BTreeMap<Term, i64>, e: u8) -> BTreeMap<Term, i64> {
    let mut out = BTreeMap::new();
    for (term, &c) in expr {
        for k in 0..term.len() {
            let mut t = term.clone();
            t[k].1 |= e;
            t.sort_unstable();
            *out.entry(t).or_insert(0) += c;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn library_terms(eq: usize, form: DsForm) -> BTreeMap<Term, i64> {
    let mut m = BTreeMap::new();
    for t in ds_terms(eq, form).unwrap() {
        *m.entry(t.factors).or_insert(0) += t.coefficient;
    }
    m
}

#[test]
fn dyson_schwinger_terms_follow_from_the_first_equation() {
    // ⟨φ(x)³⟩ in connected functions: one term per set partition of three copies
    let mut expr: BTreeMap<Term, i64> = BTreeMap::new();
    for p in set_partitions(3) {
        let mut t: Term = p.iter().map(|b| (b.len() as u8, 0u8)).collect();
        t.sort_unstable();
        *expr.entry(t).or_insert(0) += 1;
    }
    assert_eq!(expr, library_terms(1, DsForm::Complete));
    for (eq, e) in [(2, 1u8), (3, 2), (4, 4)] {
        expr = differentiate(&expr, e);
        assert_eq!(expr, library_terms(eq, DsForm::Complete), "equation {eq}");
    }
    assert_eq!(expr.len(), 14);
    assert_ne!(expr, library_terms(4, DsForm::WithoutG3Products));
    let counts: Vec<usize> = (1..=4).map(|q| ds_terms(q, DsForm::Complete).unwrap().len()).collect();
    assert_eq!(counts, [3, 4, 7, 14]);
    let kept: Vec<usize> = (1..=4)
        .map(|q| ds_terms(q, DsForm::Complete).unwrap().iter().filter(|t| !t.is_coincident()).count())
        .collect();
    assert_eq!(kept, [1, 1, 2, 5]);
    assert!(ds_terms(5, DsForm::Complete).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moment_cumulant_round_trip(values in prop::collection::vec(-2.0f64..2.0, 34)) {
        let pts = PointSet::numbered(3).unwrap();
        let mut g = CumulantSet::new(3, 4).unwrap();
        let keys: Vec<Vec<usize>> = (1..=4).flat_map(|k| multisets(3, k)).collect();
        prop_assert_eq!(keys.len(), 34);
        for (k, v) in keys.iter().zip(&values) {
            g.set(k, *v).unwrap();
        }
        let s: MomentSet = moments_from_cumulants(&g, &pts, 4).unwrap();
        let back = cumulants_from_moments(&s, &pts, 4).unwrap();
        for k in &keys {
            prop_assert!((back.get(k) - g.get(k)).abs() < 1e-10);
        }
    }

    #[test]
    fn tables_are_permutation_symmetric(i in 0usize..3, j in 0usize..3, k in 0usize..3, v in -5.0f64..5.0) {
        let mut g = CumulantSet::new(3, 3).unwrap();
        g.set(&[i, j, k], v).unwrap();
        prop_assert_eq!(g.get(&[k, i, j]), v);
        prop_assert_eq!(g.get(&[j, k, i]), v);
    }
}
