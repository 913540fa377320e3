use ctc_core::equiv::{check_step_bisim, Mode, Strength};
use ctc_core::laws::{gen_guard, gen_past, gen_term, law_model, GenConfig};
use ctc_core::semantics::Engine;
use ctc_core::syntax::{is_nstd, is_std, parse_guard, pretty_guard};
use ctc_core::{build_plts, parse_process, pretty, Bounds, Definitions, Guard, Plts, Prob, Process};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg(seed: u64) -> GenConfig {
    GenConfig { max_depth: 3, seed, ..GenConfig::default() }
}

fn plts(p: &Process) -> Option<Plts> {
    let bounds = Bounds { max_configs: 400, ..Bounds::default() };
    build_plts(p, 0, &law_model(), &Definitions::new(), bounds).ok()
}

fn step(a: &Plts, b: &Plts, mode: Mode, strength: Strength) -> bool {
    check_step_bisim(a, b, mode, strength).unwrap().equivalent
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printing_then_parsing_is_the_identity(seed in any::<u64>()) {
        let p = gen_term(&cfg(seed));
        prop_assert_eq!(parse_process(&pretty(&p), &Definitions::new()).unwrap(), p);
        let past = gen_past(&cfg(seed), &mut ChaCha8Rng::seed_from_u64(seed), &mut 1);
        prop_assert_eq!(parse_process(&pretty(&past), &Definitions::new()).unwrap(), past);
    }

    #[test]
    fn guard_printing_round_trips(seed in any::<u64>()) {
        let g = gen_guard(&cfg(seed), &mut ChaCha8Rng::seed_from_u64(seed), 4);
        prop_assert_eq!(parse_guard(&pretty_guard(&g)).unwrap(), g);
    }

    #[test]
    fn test_is_a_boolean_homomorphism(seed in any::<u64>(), s in 0usize..4) {
        let m = law_model();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gen_guard(&cfg(seed), &mut rng, 3);
        let h = gen_guard(&cfg(seed), &mut rng, 3);
        let t = |x: &Guard| m.test(x, s).unwrap();
        prop_assert_eq!(t(&Guard::not(g.clone())), !t(&g));
        prop_assert_eq!(t(&Guard::sum(g.clone(), h.clone())), t(&g) || t(&h));
        prop_assert_eq!(t(&Guard::prod(g.clone(), h.clone())), t(&g) && t(&h));
        prop_assert!(t(&Guard::Epsilon));
        prop_assert!(!t(&Guard::Delta));
    }

    #[test]
    fn generated_terms_are_standard_and_pasts_are_executed(seed in any::<u64>()) {
        let p = gen_term(&cfg(seed));
        prop_assert!(is_std(&p));
        let past = gen_past(&cfg(seed), &mut ChaCha8Rng::seed_from_u64(seed), &mut 1);
        prop_assert!(is_nstd(&past));
        prop_assert_eq!(is_std(&past), past.keys().is_empty());
    }

    #[test]
    fn resolution_is_a_distribution(seed in any::<u64>()) {
        let m = law_model();
        let defs = Definitions::new();
        let engine = Engine::new(&m, &defs, Bounds::default());
        if let Some(g) = plts(&gen_term(&cfg(seed))) {
            for c in g.configs.iter().take(20) {
                let total: Prob = engine.prob_resolve(c).unwrap().iter().map(|(p, _)| *p).sum();
                prop_assert_eq!(total, Prob::from_integer(1));
            }
        }
    }

    #[test]
    fn step_bisimilarity_is_reflexive_and_symmetric(a in any::<u64>(), b in any::<u64>()) {
        let (Some(x), Some(y)) = (plts(&gen_term(&cfg(a))), plts(&gen_term(&cfg(b)))) else { return Ok(()) };
        for mode in [Mode::Forward, Mode::Reverse, Mode::ForwardReverse] {
            prop_assert!(step(&x, &x, mode, Strength::Strong));
            prop_assert_eq!(step(&x, &y, mode, Strength::Strong), step(&y, &x, mode, Strength::Strong));
            prop_assert_eq!(step(&x, &y, mode, Strength::Weak), step(&y, &x, mode, Strength::Weak));
        }
    }

    #[test]
    fn strong_implies_weak(seed in any::<u64>()) {
        let p = gen_term(&cfg(seed));
        // `P + P` is often strongly equivalent to P, which exercises the implication
        let q = Process::sum(p.clone(), p.clone());
        let (Some(x), Some(y)) = (plts(&p), plts(&q)) else { return Ok(()) };
        for mode in [Mode::Forward, Mode::Reverse, Mode::ForwardReverse] {
            if step(&x, &y, mode, Strength::Strong) {
                prop_assert!(step(&x, &y, mode, Strength::Weak));
            }
        }
    }
}
