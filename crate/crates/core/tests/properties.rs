use clsi::entropy::{fisher_lindblad, lindblad_rel_entropy, p_fisher, p_rel_entropy, rel_entropy, RelEntropy};
use clsi::estimator::{mlsi_estimate, mlsi_ratio, EstimateOptions};
use clsi::graphs::{certified_bound, kruskal_mst, traversal_cover, verify_cover};
use clsi::lindblad::{depolarizing, expectation_residual, fixed_point_dim, graph_lindblad, pauli_system};
use clsi::matfun::{doi_apply, hs_inner, tau};
use clsi::rng::{random_complex, random_hermitian, random_kraus, random_positive, random_state, seeded, Rand};
use clsi::{CMat, ConditionalExpectation, HermitianMatrix, ScalarKernel, SpectralSuperoperator, State, WeightedGraph};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Random spanning tree plus a few extra edges.
fn random_connected(rng: &mut Rand, n: usize, unit: bool) -> WeightedGraph {
    let weight = |rng: &mut Rand| if unit { 1.0 } else { rng.random_range(0.25..4.0) };
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        let w = weight(rng);
        edges.push((u, v, w));
    }
    for _ in 0..rng.random_range(0..=n) {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v && !edges.iter().any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u)) {
            let w = weight(rng);
            edges.push((u, v, w));
        }
    }
    WeightedGraph::new(n, &edges, None).unwrap()
}

fn random_pinching(rng: &mut Rand, n: usize) -> ConditionalExpectation {
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    ConditionalExpectation::block_pinching(&labels)
}

fn random_generators(rng: &mut Rand, n: usize) -> Vec<HermitianMatrix> {
    (0..rng.random_range(1..=3)).map(|_| random_hermitian(rng, n, 1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn doi_is_hermitian_and_linear(seed: u64, n in 2usize..=5) {
        let mut rng = seeded(seed);
        let rho = random_positive(&mut rng, n, 0.05, 20.0);
        let x = random_hermitian(&mut rng, n, 1.0);
        let y = random_hermitian(&mut rng, n, 1.0);
        let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        for k in [ScalarKernel::LogQuotient, ScalarKernel::PowerQuotient(1.5), ScalarKernel::Tilt] {
            let qx = doi_apply(&rho, &rho, &k, x.as_mat()).unwrap();
            prop_assert!(max_abs(&(&qx - qx.adjoint())) < 1e-10);
            let qy = doi_apply(&rho, &rho, &k, y.as_mat()).unwrap();
            let combo = x.as_mat() * c(a) + y.as_mat() * c(b);
            let lhs = doi_apply(&rho, &rho, &k, &combo).unwrap();
            prop_assert!(max_abs(&(lhs - (qx * c(a) + qy * c(b)))) < 1e-10 * (1.0 + max_abs(&combo)));
        }
    }

    #[test]
    fn generators_give_self_adjoint_unital_superoperators(seed: u64, n in 2usize..=4) {
        let mut rng = seeded(seed);
        let s = SpectralSuperoperator::from_generators(n, &random_generators(&mut rng, n)).unwrap();
        prop_assert!(s.unitality_residual() < 1e-10);
        prop_assert!(s.self_adjoint_residual() < 1e-10);
        let (x, y) = (random_complex(&mut rng, n, n), random_complex(&mut rng, n, n));
        let gap = hs_inner(&s.apply(&x), &y) - hs_inner(&x, &s.apply(&y));
        prop_assert!(gap.norm() < 1e-10 * (1.0 + max_abs(&x) * max_abs(&y)));
    }

    #[test]
    fn semigroup_preserves_trace_and_positivity(seed: u64, n in 2usize..=4, t in 0.0f64..10.0) {
        let mut rng = seeded(seed);
        let s = SpectralSuperoperator::from_generators(n, &random_generators(&mut rng, n)).unwrap();
        let rho = random_positive(&mut rng, n, 0.01, 3.0);
        let out = s.semigroup_apply(t, rho.as_mat()).unwrap();
        prop_assert!((tau(&out) - tau(rho.as_mat())).norm() < 1e-10);
        prop_assert!(HermitianMatrix::symmetrized(out).min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn certified_bound_is_positive(seed: u64, n in 2usize..=12, unit: bool) {
        let mut rng = seeded(seed);
        let g = random_connected(&mut rng, n, unit);
        let cert = certified_bound(&g).unwrap();
        prop_assert!(cert.bounds.best > 0.0);
        prop_assert!(cert.lindblad_bound > 0.0 && cert.lindblad_bound < cert.bounds.best);
        prop_assert_eq!(certified_bound(&g).unwrap(), cert);
    }

    #[test]
    fn traversal_cover_verifies(seed: u64, n in 2usize..=12, unit: bool) {
        let mut rng = seeded(seed);
        let g = random_connected(&mut rng, n, unit);
        let tree = kruskal_mst(&g).unwrap();
        let root = rng.random_range(0..n);
        let cover = traversal_cover(&tree, Some(root)).unwrap();
        prop_assert_eq!(cover.len(), 2 * (n - 1));
        let verdict = verify_cover(&cover, &cover.covered_tree().unwrap());
        prop_assert!(verdict.ok, "{:?}", verdict.reasons);
    }

    #[test]
    fn corollary_is_the_worst_case(seed: u64, n in 3usize..=10) {
        let mut rng = seeded(seed);
        let g = random_connected(&mut rng, n, true);
        let b = certified_bound(&g).unwrap().bounds;
        if let Some(worst) = b.corollary_worst_case {
            prop_assert!(b.tree_general >= worst * (1.0 - 1e-12), "{} < {}", b.tree_general, worst);
        }
    }

    #[test]
    fn entropy_and_fisher_scale_linearly(seed: u64, n in 2usize..=4, scale in 0.1f64..10.0) {
        let mut rng = seeded(seed);
        let s = SpectralSuperoperator::from_generators(n, &random_generators(&mut rng, n)).unwrap();
        let e = random_pinching(&mut rng, n);
        let rho = random_state(&mut rng, n, 1.0).into_inner();
        let scaled = rho.scale(scale);
        let d = lindblad_rel_entropy(&rho, &e.apply_herm(&rho).unwrap()).unwrap();
        let dc = lindblad_rel_entropy(&scaled, &e.apply_herm(&scaled).unwrap()).unwrap();
        prop_assert!((dc - scale * d).abs() <= 1e-10 * (1.0 + scale * d.abs()));
        let i = fisher_lindblad(&s, &rho).unwrap();
        let ic = fisher_lindblad(&s, &scaled).unwrap();
        prop_assert!((ic - scale * i).abs() <= 1e-10 * (1.0 + scale * i.abs()));
    }

    #[test]
    fn pinchings_process_data(seed: u64, n in 2usize..=6) {
        let mut rng = seeded(seed);
        let rho = random_state(&mut rng, n, 1.0);
        let sigma = random_state(&mut rng, n, 1.0).into_inner();
        let p = random_pinching(&mut rng, n);
        let before = rel_entropy(&rho, &sigma).unwrap().value();
        let pr = State::new(p.apply_herm(rho.matrix()).unwrap()).unwrap();
        let after = rel_entropy(&pr, &p.apply_herm(&sigma).unwrap()).unwrap().value();
        prop_assert!(after <= before + 1e-10, "{after} > {before}");
    }

    #[test]
    fn functionals_are_nonnegative(seed: u64, n in 2usize..=4, p in 1.05f64..1.95) {
        let mut rng = seeded(seed);
        let s = SpectralSuperoperator::from_generators(n, &random_generators(&mut rng, n)).unwrap();
        let rho = random_state(&mut rng, n, 1.5);
        let sigma = random_state(&mut rng, n, 1.5).into_inner();
        prop_assert!(matches!(rel_entropy(&rho, &sigma).unwrap(), RelEntropy::Finite(v) if v >= -1e-10));
        prop_assert!(lindblad_rel_entropy(rho.matrix(), &sigma).unwrap() >= -1e-10);
        prop_assert!(p_rel_entropy(rho.matrix(), &sigma, p).unwrap() >= -1e-10);
        prop_assert!(fisher_lindblad(&s, &rho).unwrap() >= -1e-10);
        prop_assert!(p_fisher(&s, &rho, p).unwrap() >= -1e-10);
    }

    #[test]
    fn conditional_expectation_axioms(seed: u64, n in 2usize..=6) {
        let mut rng = seeded(seed);
        let x = random_complex(&mut rng, n, n);
        for e in [random_pinching(&mut rng, n), ConditionalExpectation::Diagonal { n }, ConditionalExpectation::Trace { n }] {
            prop_assert!(expectation_residual(&e, &x) <= 1e-10);
            let p = random_positive(&mut rng, n, 0.01, 2.0);
            prop_assert!(e.apply_herm(&p).unwrap().min_eigenvalue() >= -1e-10);
        }
    }

    #[test]
    fn graph_lindbladian_restricts_to_classical_generator(seed: u64, n in 2usize..=6) {
        let mut rng = seeded(seed);
        let g = random_connected(&mut rng, n, false);
        let s = graph_lindblad(&g);
        let a = g.generator_matrix();
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
        let img = s.apply(HermitianMatrix::diag(&f).as_mat());
        for i in 0..n {
            let want: f64 = (0..n).map(|k| a[(i, k)] * f[k]).sum();
            prop_assert!((img[(i, i)] - c(want)).norm() < 1e-12);
            for j in (0..n).filter(|&j| j != i) {
                prop_assert!(img[(i, j)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn connected_graphs_are_ergodic(seed: u64, n in 3usize..=6) {
        let mut rng = seeded(seed);
        let g = random_connected(&mut rng, n, false);
        prop_assert_eq!(fixed_point_dim(&graph_lindblad(&g)).dim, 1);
    }

    #[test]
    fn pauli_fisher_decays(seed: u64, t in 0.0f64..2.0) {
        let mut rng = seeded(seed);
        let s = pauli_system();
        let rho = random_state(&mut rng, 2, 1.5);
        let i0 = fisher_lindblad(&s, &rho).unwrap();
        let rt = HermitianMatrix::symmetrized(s.semigroup_apply(t, rho.as_mat()).unwrap());
        let it = fisher_lindblad(&s, &rt).unwrap();
        prop_assert!(it <= (-2.0 * t).exp() * i0 * (1.0 + 1e-8) + 1e-14, "{it} > e^-2t {i0}");
    }

    #[test]
    fn random_channels_are_trace_preserving(seed: u64, n in 2usize..=3, count in 2usize..=4) {
        let mut rng = seeded(seed);
        let kraus = random_kraus(&mut rng, n, count);
        let sum = kraus.iter().fold(CMat::zeros(n, n), |acc, k| acc + k.adjoint() * k);
        prop_assert!(max_abs(&(sum - CMat::identity(n, n))) < 1e-10);
    }
}

/// A handful of small operators and the kernel dimensions they should have.
fn tensor_cases() -> Vec<(SpectralSuperoperator, usize)> {
    let split = WeightedGraph::unweighted(3, &[(0, 1)]).unwrap();
    vec![
        (pauli_system(), 1),
        (depolarizing(2).unwrap(), 1),
        (graph_lindblad(&WeightedGraph::complete(2).unwrap()), 2),
        (graph_lindblad(&WeightedGraph::path(3).unwrap()), 1),
        (graph_lindblad(&split), fixed_point_dim(&graph_lindblad(&split)).dim),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_dimension_tensorizes(i in 0usize..5, j in 0usize..5) {
        let cases = tensor_cases();
        let (a, da) = &cases[i];
        let (b, db) = &cases[j];
        prop_assume!(a.dim() * b.dim() <= 6);
        prop_assert_eq!(fixed_point_dim(a).dim, *da);
        let sum = SpectralSuperoperator::tensor_sum(a, b);
        prop_assert_eq!(fixed_point_dim(&sum).dim, da * db);
    }

    #[test]
    fn estimate_is_reproducible_and_witnessed(seed: u64, restarts in 2usize..=6) {
        let s = pauli_system();
        let e = ConditionalExpectation::Trace { n: 2 };
        let opts = EstimateOptions { restarts, seed, ..Default::default() };
        let r = mlsi_estimate(&s, &e, &opts).unwrap();
        prop_assert_eq!(&mlsi_estimate(&s, &e, &opts).unwrap(), &r);
        let again = mlsi_ratio(&s, &e, &State::new(r.witness.clone()).unwrap()).unwrap();
        prop_assert!((again.ratio - r.value).abs() <= 1e-12, "{} vs {}", again.ratio, r.value);
        prop_assert!(r.value >= 2.0 - 1e-9);
    }
}
