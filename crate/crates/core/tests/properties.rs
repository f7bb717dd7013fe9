use mutlab::abelian::{h1, smith_normal_form, IntMatrix};
use mutlab::groups::{
    fingerprint, haar_sample, Family, LieGroup, ProjectiveQuaternion, Representation, SU3Element, UnitQuaternion,
};
use mutlab::solver::{find_representations, SolveConfig};
use mutlab::words::*;
use num_bigint::BigInt;
use proptest::prelude::*;

fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0usize..4, prop::bool::ANY), 0..max_len).prop_map(|v| {
        let gens = surface_generators();
        Word::from_letters(v.into_iter().map(|(g, pos)| Letter::new(gens[g].clone(), if pos { 1 } else { -1 })).collect())
    })
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..7, c), r))
}

/// Identity of size `n` pushed through random elementary operations.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for &(i, j, k) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        for c in 0..n {
            let v = m[(j, c)].clone() * BigInt::from(k);
            m[(i, c)] += v;
        }
    }
    m
}

fn diag(m: &IntMatrix) -> Vec<BigInt> {
    smith_normal_form(m).1
}

fn surface_rep<G: LieGroup>(family: Family, seed: u64) -> Representation<G> {
    Representation::new(family, surface_generators(), (0..4).map(|i| haar_sample::<G>(seed * 4 + i)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn free_reduce_idempotent_and_shorter(w in word_strategy(40)) {
        let r = free_reduce(&w);
        prop_assert!(r.len() <= w.len());
        prop_assert!(r.is_reduced());
        prop_assert_eq!(free_reduce(&r), r);
    }

    #[test]
    fn word_times_inverse_cancels(w in word_strategy(40)) {
        prop_assert!(w.concat(&w.inverse()).reduced().is_empty());
        prop_assert!(w.inverse().concat(&w).reduced().is_empty());
    }

    #[test]
    fn word_grammar_round_trip(w in word_strategy(30)) {
        let r = w.reduced();
        prop_assert_eq!(Word::parse(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn snf_divisibility_and_permutation(rows in matrix_strategy(), seed in 0u64..1000) {
        let m = IntMatrix::from_rows(&rows);
        let d = diag(&m);
        let zero = BigInt::from(0);
        for w in d.windows(2) {
            prop_assert!(w[1] == zero || (w[0] != zero && &w[1] % &w[0] == zero), "{:?}", d);
        }
        let mut perm_rows = rows.clone();
        let n = perm_rows.len();
        perm_rows.rotate_left((seed as usize) % n);
        let cols = rows[0].len();
        let shift = (seed as usize / 7) % cols;
        for r in perm_rows.iter_mut() {
            r.rotate_left(shift);
        }
        prop_assert_eq!(diag(&IntMatrix::from_rows(&perm_rows)), d);
    }

    #[test]
    fn snf_unimodular_invariance(
        rows in matrix_strategy(),
        u_ops in prop::collection::vec((0usize..5, 0usize..5, -3i64..4), 0..8),
        v_ops in prop::collection::vec((0usize..5, 0usize..5, -3i64..4), 0..8),
    ) {
        let m = IntMatrix::from_rows(&rows);
        let u = unimodular(m.rows(), &u_ops);
        let v = unimodular(m.cols(), &v_ops);
        prop_assert_eq!(diag(&u.mul(&m).mul(&v)), diag(&m));
    }

    #[test]
    fn h1_invariant_under_relator_moves(e in -6i64..3, k in 0usize..20, invert in prop::bool::ANY) {
        let p = SeifertData::new(vec![2; 6], e, vec![1; 6]).unwrap().presentation();
        let relators: Vec<Relator> = p.relators().iter().map(|r| {
            let letters = r.word.letters();
            let cut = if letters.is_empty() { 0 } else { k % letters.len() };
            let mut rotated = letters[cut..].to_vec();
            rotated.extend_from_slice(&letters[..cut]);
            let w = Word::from_letters(rotated).reduced();
            Relator { word: if invert { w.inverse() } else { w }, defect: r.defect }
        }).collect();
        let q = Presentation::new("moved", p.generators().to_vec(), relators).unwrap();
        prop_assert_eq!(h1(&q), h1(&p));
    }

    #[test]
    fn quaternion_associativity_and_sign_blindness(seed in 0u64..100_000) {
        let (a, b, c): (UnitQuaternion, UnitQuaternion, UnitQuaternion) =
            (haar_sample(3 * seed), haar_sample(3 * seed + 1), haar_sample(3 * seed + 2));
        prop_assert!(((a * b) * c).distance(a * (b * c)) <= 1e-12);
        prop_assert!(ProjectiveQuaternion(a) == ProjectiveQuaternion(-a));
        prop_assert!(ProjectiveQuaternion(a) != ProjectiveQuaternion(b) || a.distance(b).min(a.distance(-b)) < 1e-9);
    }

    #[test]
    fn trace_conjugation_invariance(seed in 0u64..100_000) {
        let (g, a): (UnitQuaternion, UnitQuaternion) = (haar_sample(2 * seed), haar_sample(2 * seed + 1));
        for family in [Family::Su2, Family::So3] {
            let c = g.compose(&a).compose(&g.inv());
            prop_assert!((LieGroup::trace(&c, family) - LieGroup::trace(&a, family)).norm() <= 1e-10);
        }
        let (g, a): (SU3Element, SU3Element) = (haar_sample(2 * seed), haar_sample(2 * seed + 1));
        let c = g.compose(&a).compose(&g.inv());
        prop_assert!((LieGroup::trace(&c, Family::Su3) - LieGroup::trace(&a, Family::Su3)).norm() <= 1e-10);
    }

    #[test]
    fn evaluate_is_a_homomorphism(u in word_strategy(40), v in word_strategy(40), seed in 0u64..10_000) {
        let rho = surface_rep::<UnitQuaternion>(Family::Su2, seed);
        let uv = rho.evaluate(&u.concat(&v)).unwrap();
        let prod = rho.evaluate(&u).unwrap() * rho.evaluate(&v).unwrap();
        prop_assert!(uv.distance(prod) <= 1e-10);
        let sigma = surface_rep::<SU3Element>(Family::Su3, seed);
        let uv = sigma.evaluate(&u.concat(&v)).unwrap();
        let prod = sigma.evaluate(&u).unwrap().compose(&sigma.evaluate(&v).unwrap());
        prop_assert!(uv.ambient_distance(&prod) <= 1e-10);
    }

    #[test]
    fn heegaard_and_duality_on_fingerprints(seed in 0u64..10_000) {
        let f2 = free_group("F2", &["x", "y"]);
        let t = inversion_map(f2.generators());
        let rho = Representation::<UnitQuaternion>::for_presentation(Family::Su2, &f2, vec![haar_sample(2 * seed), haar_sample(2 * seed + 1)]);
        let moved = mutlab::mutation::heegaard_mutate(&rho, &t).unwrap();
        prop_assert!(fingerprint(&moved).distance(&fingerprint(&rho)) <= 1e-10);
        let sigma = Representation::<SU3Element>::for_presentation(Family::Su3, &f2, vec![haar_sample(2 * seed), haar_sample(2 * seed + 1)]);
        let dual = mutlab::mutation::su3_dual(&sigma);
        prop_assert!(fingerprint(&dual).distance(&fingerprint(&sigma).conj()) <= 1e-10);
    }
}

#[test]
fn tau_relator_is_conjugate_by_b1() {
    let r = surface_relator();
    let image = tau_map().apply(&r).unwrap();
    let w = r.conjugator_to(&image).expect("tau_*(R) is a conjugate of R");
    assert_eq!(w.inverse().concat(&r).concat(&w).reduced(), image);
    let b1 = Word::parse("b1").unwrap();
    assert_eq!(b1.inverse().concat(&r).concat(&b1).reduced(), image);
}

#[test]
fn random_splittings_keep_homology_predicates() {
    let tau = tau_map();
    let mut spheres = 0;
    for seed in 0..300 {
        let r = mutlab::fixtures::random_splitting(seed).unwrap();
        let am = h1(&build_amalgam(&r.splitting, None).unwrap());
        if !am.is_trivial() {
            continue;
        }
        spheres += 1;
        assert_eq!(h1(&build_wtau(&r.splitting).unwrap()), mutlab::abelian::AbelianInvariants::new(&[], 1));
        assert!(h1(&build_amalgam(&r.splitting, Some(&tau)).unwrap()).is_trivial());
    }
    assert!(spheres > 20);
}

#[test]
fn solver_is_deterministic_and_residuals_recompute() {
    let p = brieskorn([2, 3, 5]).unwrap();
    let cfg = SolveConfig { restarts: 300, seed: 9, ..Default::default() };
    let a = find_representations::<UnitQuaternion>(&p, Family::Su2, &cfg).unwrap();
    let b = find_representations::<UnitQuaternion>(&p, Family::Su2, &cfg).unwrap();
    assert_eq!(a.classes.len(), b.classes.len());
    for (x, y) in a.classes.iter().zip(&b.classes) {
        assert_eq!(x.representative.images(), y.representative.images());
        assert_eq!(x.hits, y.hits);
        assert!((x.representative.relator_residual(&p) - x.residual).abs() <= 1e-10);
    }
}

#[test]
fn trivial_class_is_isolated_on_homology_spheres() {
    for a in [[2, 3, 5], [2, 3, 7]] {
        let p = brieskorn(a).unwrap();
        let cfg = SolveConfig { restarts: 400, seed: 2, ..Default::default() };
        let out = find_representations::<UnitQuaternion>(&p, Family::Su2, &cfg).unwrap();
        let trivial = out
            .classes
            .iter()
            .find(|c| c.stabilizer == mutlab::groups::Stabilizer::Central)
            .expect("trivial class present");
        for c in out.irreducible() {
            assert!(c.fingerprint.distance(&trivial.fingerprint) > cfg.dedup_tol);
        }
        for (i, x) in out.classes.iter().enumerate() {
            for y in &out.classes[i + 1..] {
                assert!(x.fingerprint.distance(&y.fingerprint) > cfg.dedup_tol);
            }
        }
    }
}
