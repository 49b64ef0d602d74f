//! Closed-form predictors against the brute-force oracle on parameter grids.

use std::collections::BTreeSet;

use lbgame::f4::{self, Mode};
use lbgame::game::Regime;
use lbgame::oracle::{self, Grid};
use lbgame::{f3, Framework, Params, Profile, Rational};

fn grid(ab: i128, n: u32, extra_pairs: Vec<(i128, i128)>) -> Vec<Params> {
    Grid { a: 1..=ab, b: 1..=ab, n: 1..=n, extra_pairs }.instances()
}

fn small_f4_grid() -> Vec<Params> {
    grid(8, 24, vec![(10, 3), (3, 1), (2, 1), (7, 2), (13, 4)])
}

#[test]
fn f3_oracle_and_equilibrium_test_agree() {
    for p in grid(5, 15, vec![]) {
        let via_test: BTreeSet<Profile> = p.profiles().filter(|&q| f3::is_equilibrium(&p, q).unwrap()).collect();
        assert_eq!(via_test, oracle::enumerate_ne_f3(&p), "{p}");
    }
}

#[test]
fn f3_equilibria_are_symmetric_and_match_closed_form() {
    for r in oracle::consistency_sweep(&grid(8, 20, vec![]), Framework::F3) {
        assert!(r.matched, "{} {}", r.params, r.note);
        assert!(r.oracle_set.iter().all(Profile::is_symmetric));
    }
}

#[test]
fn f3_rational_slopes_match_closed_form() {
    let slopes = [(1, 2), (3, 2), (5, 7), (7, 3)];
    for &(an, ad) in &slopes {
        for &(bn, bd) in &slopes {
            for n in 1..=16 {
                let p = Params::new(Rational::frac(an, ad), Rational::frac(bn, bd), n).unwrap();
                assert_eq!(oracle::enumerate_ne_f3(&p), f3::equilibria_closed_form(&p), "{p}");
            }
        }
    }
}

#[test]
fn f3_poa_matches_oracle_efficiency() {
    for p in grid(6, 12, vec![]) {
        let eq = oracle::enumerate_ne_f3(&p);
        let exact = oracle::exact_efficiency(&p, &eq, Framework::F3).unwrap();
        let e = f3::poa_pos(&p);
        assert_eq!(exact.poa, e.poa_exact, "{p}");
        assert_eq!(exact.pos, e.pos, "{p}");
        assert_eq!(exact.optimum, p.b() * 2);
        assert_eq!(f3::social_optimum(&p).profile, Profile::new(0, 0));
    }
}

#[test]
fn f4_bimatrix_route_equals_best_response_route() {
    for p in small_f4_grid() {
        assert_eq!(oracle::enumerate_ne_f4(&p), f4::enumerate_equilibria(&p), "{p}");
    }
}

#[test]
fn f4_predictions_are_sound_and_complete() {
    for r in oracle::consistency_sweep(&small_f4_grid(), Framework::F4) {
        assert!(r.matched, "{} {}", r.params, r.note);
    }
}

#[test]
fn f4_rational_slopes() {
    let slopes = [(1, 2), (3, 2), (5, 7), (7, 3), (9, 1)];
    for &(an, ad) in &slopes {
        for &(bn, bd) in &slopes {
            for n in 1..=20 {
                let p = Params::new(Rational::frac(an, ad), Rational::frac(bn, bd), n).unwrap();
                let rep = f4::predict_equilibria(&p);
                assert!(rep.rejected.is_empty(), "{p} rejected {:?}", rep.rejected);
                assert_eq!(rep.equilibria, oracle::enumerate_ne_f4(&p), "{p}");
            }
        }
    }
}

#[test]
fn f4_structure_theorems() {
    for p in small_f4_grid() {
        let eq = oracle::enumerate_ne_f4(&p);
        assert!((1..=4).contains(&eq.len()), "{p}: {eq:?}");
        for e in &eq {
            assert!(eq.contains(&e.swapped()), "{p}: not closed under swap");
        }
        match p.slopes().regime() {
            Regime::ALessThan2B => assert!(eq.iter().all(Profile::is_symmetric), "{p}"),
            Regime::AEquals2B => assert_eq!(eq.len() == 4, p.n() % 8 == 4, "{p}"),
            Regime::AGreaterThan2B => {
                assert!(eq.len() <= 3, "{p}");
                let lows: Vec<u32> = eq.iter().filter(|e| e.is_symmetric()).map(|e| e.n_abc).collect();
                for w in lows.windows(2) {
                    assert!(w[1] != w[0] + 1, "{p}: adjacent symmetric equilibria");
                }
            }
        }
    }
}

#[test]
fn corner_flags_match_oracle() {
    for p in small_f4_grid() {
        let eq = oracle::enumerate_ne_f4(&p);
        let c = f4::corner_conditions(&p);
        assert_eq!(c.origin_is_ne, eq.contains(&Profile::new(0, 0)), "{p}");
        assert_eq!(c.all_in_is_ne, eq.contains(&Profile::new(p.n(), p.n())), "{p}");
    }
}

#[test]
fn boundary_equilibria_match_oracle() {
    for p in small_f4_grid() {
        let eq = oracle::enumerate_ne_f4(&p);
        let boundary = f4::boundary_equilibria(&p);
        let expected: BTreeSet<Profile> = match p.slopes().regime() {
            Regime::AGreaterThan2B => eq.iter().copied().filter(|e| e.n_abc == 0 || e.n_bac == 0).collect(),
            _ => eq.iter().copied().filter(|e| (e.n_abc == 0) != (e.n_bac == 0)).collect(),
        };
        assert_eq!(boundary, expected, "{p}");
        assert!(boundary.iter().all(|e| e.n_abc < p.n() && e.n_bac < p.n()));
    }
}

#[test]
fn single_connection_frameworks_coincide() {
    for a in 1..=8 {
        for b in 1..=8 {
            let p = Params::ints(a, b, 1).unwrap();
            let g = f4::n1_game(&p).unwrap();
            assert_eq!(g.equilibria, oracle::enumerate_ne_f4(&p), "{p}");
            assert_eq!(g.equilibria, oracle::enumerate_ne_f3(&p), "{p}");
        }
    }
}

#[test]
fn equilibria_stay_within_one_step_of_the_limit() {
    for p in small_f4_grid() {
        let target = f4::limit_equilibrium(&p.slopes());
        let n = p.n_rat();
        for e in f4::predict_equilibria(&p).equilibria {
            for k in [e.n_abc, e.n_bac] {
                assert!((p.fraction(k) - target).abs() <= Rational::ONE / n, "{p} {e}");
            }
        }
    }
}

#[test]
fn best_response_dynamics_end_in_oracle_equilibria() {
    for p in grid(6, 10, vec![(10, 3)]) {
        let eq = oracle::enumerate_ne_f4(&p);
        for start in p.profiles() {
            let t = f4::br_dynamics(&p, start, 200).unwrap();
            if t.outcome == f4::BrOutcome::Converged {
                assert!(eq.contains(&t.last()), "{p} from {start}");
            }
        }
    }
}

#[test]
fn mode_two_appears_exactly_on_sixes_mod_twelve() {
    // a = 10, b = 3: N gamma = N / 12, alpha = 4/9, beta = 5/9.
    for n in 1..=64 {
        let p = Params::ints(10, 3, n).unwrap();
        let m = f4::classify_mode(&p).unwrap();
        assert_eq!(m.mode == Mode::Mode2, n % 12 == 6, "N={n}");
        if m.mode == Mode::Mode2 {
            let a = m.n_tilde;
            let expected: BTreeSet<Profile> = [Profile::new(a, a + 1), Profile::new(a + 1, a)].into_iter().collect();
            assert_eq!(oracle::enumerate_ne_f4(&p), expected, "N={n}");
        }
    }
}
