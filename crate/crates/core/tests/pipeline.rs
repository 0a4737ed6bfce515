use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use vcsp::blp::{blp_value, blp_value_with, solve_vcsp, solve_vcsp_with};
use vcsp::exactlp::verify_outcome;
use vcsp::exec::Config;
use vcsp::feasibility::{one_infty_minimize, solve_csp};
use vcsp::model::{evaluate, feas_language, ExtRat};
use vcsp::oracle::{brute_feasible, brute_opt};
use vcsp::random::{random_instance, submodular_instance};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relaxation_bounds_the_optimum(seed in any::<u64>(), k in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (lang, inst) = random_instance(&mut rng, k, 5, 7, 0.3);
        let opt = brute_opt(&lang, &inst).unwrap().value;
        let raw = blp_value(&lang, &inst).unwrap();
        prop_assert!(verify_outcome(&raw.lp, &raw.outcome));
        prop_assert!(raw.value <= opt);
        let min = one_infty_minimize(&lang, &inst).unwrap();
        let bar = blp_value(&min.lang, &min.inst).unwrap().value;
        prop_assert!(raw.value <= bar);
        prop_assert!(bar <= opt);
        prop_assert_eq!(brute_opt(&min.lang, &min.inst).unwrap().value, opt);
    }

    #[test]
    fn feasibility_engines_agree(seed in any::<u64>(), k in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (lang, inst) = random_instance(&mut rng, k, 6, 8, 0.5);
        let feas = feas_language(&lang);
        let fast = solve_csp(&feas, &inst).unwrap();
        let slow = brute_feasible(&lang, &inst, &Config::default()).unwrap();
        prop_assert_eq!(&fast, &slow);
        if let Some(x) = fast {
            prop_assert!(evaluate(&lang, &inst, &x).unwrap().is_finite());
        }
    }

    #[test]
    fn submodular_solving_is_exact(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (lang, inst) = submodular_instance(&mut rng, 7, 10);
        let opt = brute_opt(&lang, &inst).unwrap().value;
        let sol = solve_vcsp(&lang, &inst).unwrap();
        prop_assert!(sol.certified);
        prop_assert_eq!(&sol.value, &opt);
        match &sol.assignment {
            Some(x) => prop_assert_eq!(evaluate(&lang, &inst, x).unwrap(), opt),
            None => prop_assert_eq!(opt, ExtRat::Infinity),
        }
    }

    #[test]
    fn sequential_matches_parallel(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (lang, inst) = submodular_instance(&mut rng, 6, 8);
        let seq = Config::sequential();
        let par = Config::default();
        prop_assert_eq!(
            blp_value_with(&lang, &inst, &seq).unwrap().value,
            blp_value_with(&lang, &inst, &par).unwrap().value
        );
        let a = solve_vcsp_with(&lang, &inst, &seq).unwrap();
        let b = solve_vcsp_with(&lang, &inst, &par).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(a.assignment, b.assignment);
    }
}
