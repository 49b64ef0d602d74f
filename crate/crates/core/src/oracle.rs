//! Brute-force ground truth.
//!
//! Everything here is computed by exhaustive scans over profiles using only
//! the cost and utility functions of [`crate::game`]. None of it reads the
//! closed-form predictors, which are compared against it in
//! [`consistency_sweep`].

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GameError, Result};
use crate::game::{route_costs, total_cost, utility_a, utility_b, Framework, Params, Profile};
use crate::rational::Rational;
use crate::{f3, f4};

/// Pure equilibria of a bimatrix cost game: cells where the row is a weak
/// best response for the row player and the column is one for the column
/// player.
pub fn enumerate_ne_bimatrix(cost_a: &[Vec<Rational>], cost_b: &[Vec<Rational>]) -> Result<BTreeSet<(usize, usize)>> {
    let shape = |m: &[Vec<Rational>]| -> Result<(usize, usize)> {
        let cols = m.first().map_or(0, |r| r.len());
        if m.iter().any(|r| r.len() != cols) {
            return Err(GameError::ShapeMismatch { left: (m.len(), cols), right: (m.len(), cols) });
        }
        Ok((m.len(), cols))
    };
    let (sa, sb) = (shape(cost_a)?, shape(cost_b)?);
    if sa != sb {
        return Err(GameError::ShapeMismatch { left: sa, right: sb });
    }
    let (rows, cols) = sa;
    let col_min: Vec<Option<Rational>> = (0..cols).map(|j| (0..rows).map(|i| cost_a[i][j]).min()).collect();
    let row_min: Vec<Option<Rational>> = cost_b.iter().map(|r| r.iter().copied().min()).collect();
    let mut out = BTreeSet::new();
    for i in 0..rows {
        for j in 0..cols {
            if Some(cost_a[i][j]) == col_min[j] && Some(cost_b[i][j]) == row_min[i] {
                out.insert((i, j));
            }
        }
    }
    Ok(out)
}

/// Cost matrices rebuilt straight from the utility functions.
fn utility_matrices(params: &Params) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let n = params.n();
    let build = |f: fn(&Params, Profile) -> Result<Rational>| -> Vec<Vec<Rational>> {
        (0..=n)
            .map(|x| (0..=n).map(|y| f(params, Profile::new(x, y)).expect("in range")).collect())
            .collect()
    };
    (build(utility_a), build(utility_b))
}

pub fn enumerate_ne_f4(params: &Params) -> BTreeSet<Profile> {
    let (ca, cb) = utility_matrices(params);
    enumerate_ne_bimatrix(&ca, &cb)
        .expect("square matrices")
        .into_iter()
        .map(|(i, j)| Profile::new(i as u32, j as u32))
        .collect()
}

/// Can one connection strictly lower its own cost by switching route?
/// The deviator's new cost is read off the route costs of the profile
/// after the move.
fn someone_gains(params: &Params, p: Profile) -> bool {
    let n = params.n();
    let now = route_costs(params, p).expect("in range");
    let after = |q: Profile| route_costs(params, q).expect("in range");
    (p.n_abc < n && after(Profile::new(p.n_abc + 1, p.n_bac)).abc < now.ac)
        || (p.n_abc > 0 && after(Profile::new(p.n_abc - 1, p.n_bac)).ac < now.abc)
        || (p.n_bac < n && after(Profile::new(p.n_abc, p.n_bac + 1)).bac < now.bc)
        || (p.n_bac > 0 && after(Profile::new(p.n_abc, p.n_bac - 1)).bc < now.bac)
}

pub fn enumerate_ne_f3(params: &Params) -> BTreeSet<Profile> {
    params.profiles().filter(|&p| !someone_gains(params, p)).collect()
}

pub fn enumerate_ne(params: &Params, framework: Framework) -> BTreeSet<Profile> {
    match framework {
        Framework::F3 => enumerate_ne_f3(params),
        Framework::F4 => enumerate_ne_f4(params),
    }
}

/// Social cost as the flow-weighted sum of route costs.
fn f3_social_cost(params: &Params, p: Profile) -> Rational {
    let c = route_costs(params, p).expect("in range");
    let n = params.n();
    let f = |k: u32| params.fraction(k);
    f(p.n_abc) * c.abc + f(p.n_ac(n)) * c.ac + f(p.n_bac) * c.bac + f(p.n_bc(n)) * c.bc
}

fn social_cost(params: &Params, p: Profile, framework: Framework) -> Rational {
    match framework {
        Framework::F3 => f3_social_cost(params, p),
        Framework::F4 => total_cost(params, p).expect("in range"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExactEfficiency {
    pub poa: Rational,
    pub pos: Rational,
    pub optimum: Rational,
}

/// Worst and best equilibrium cost over the exhaustively minimized social
/// cost.
pub fn exact_efficiency(params: &Params, equilibria: &BTreeSet<Profile>, framework: Framework) -> Result<ExactEfficiency> {
    if equilibria.is_empty() {
        return Err(GameError::EmptyEquilibria);
    }
    for &e in equilibria {
        params.check(e)?;
    }
    let optimum = params
        .profiles()
        .map(|p| social_cost(params, p, framework))
        .min()
        .expect("at least one profile");
    let ratios: Vec<Rational> = equilibria.iter().map(|&e| social_cost(params, e, framework) / optimum).collect();
    Ok(ExactEfficiency {
        poa: *ratios.iter().max().expect("non-empty"),
        pos: *ratios.iter().min().expect("non-empty"),
        optimum,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyResult {
    pub params: Params,
    pub framework: Framework,
    pub oracle_set: BTreeSet<Profile>,
    pub predicted_set: BTreeSet<Profile>,
    pub matched: bool,
    pub note: String,
}

fn describe(set: &BTreeSet<Profile>) -> String {
    let parts: Vec<String> = set.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn check_instance(
    params: &Params,
    framework: Framework,
    predictor: impl Fn(&Params) -> BTreeSet<Profile>,
) -> ConsistencyResult {
    let oracle_set = enumerate_ne(params, framework);
    let predicted_set = predictor(params);
    let matched = oracle_set == predicted_set;
    let note = if matched {
        String::new()
    } else {
        let missing: BTreeSet<_> = oracle_set.difference(&predicted_set).copied().collect();
        let extra: BTreeSet<_> = predicted_set.difference(&oracle_set).copied().collect();
        format!("missing {} extra {}", describe(&missing), describe(&extra))
    };
    ConsistencyResult { params: *params, framework, oracle_set, predicted_set, matched, note }
}

/// The closed-form predictor this crate ships for `framework`.
pub fn default_predictor(framework: Framework) -> fn(&Params) -> BTreeSet<Profile> {
    match framework {
        Framework::F3 => f3::equilibria_closed_form,
        Framework::F4 => |p| f4::predict_equilibria(p).equilibria,
    }
}

/// Oracle versus predictor on every instance, results in grid order.
pub fn consistency_sweep_with<F>(grid: &[Params], framework: Framework, predictor: F) -> Vec<ConsistencyResult>
where
    F: Fn(&Params) -> BTreeSet<Profile> + Sync,
{
    grid.par_iter().map(|p| check_instance(p, framework, &predictor)).collect()
}

pub fn consistency_sweep(grid: &[Params], framework: Framework) -> Vec<ConsistencyResult> {
    consistency_sweep_with(grid, framework, default_predictor(framework))
}

/// Cartesian grid over integer slopes and connection counts, plus extra
/// slope pairs swept over the same `N` range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub a: std::ops::RangeInclusive<i128>,
    pub b: std::ops::RangeInclusive<i128>,
    pub n: std::ops::RangeInclusive<u32>,
    pub extra_pairs: Vec<(i128, i128)>,
}

impl Grid {
    pub fn f3_acceptance() -> Self {
        Grid { a: 1..=8, b: 1..=8, n: 1..=40, extra_pairs: vec![] }
    }

    pub fn f4_acceptance() -> Self {
        Grid { a: 1..=8, b: 1..=8, n: 1..=64, extra_pairs: vec![(10, 3), (3, 1), (2, 1)] }
    }

    pub fn instances(&self) -> Vec<Params> {
        let mut pairs: Vec<(i128, i128)> =
            self.a.clone().flat_map(|a| self.b.clone().map(move |b| (a, b))).collect();
        for &pair in &self.extra_pairs {
            if !pairs.contains(&pair) {
                pairs.push(pair);
            }
        }
        pairs
            .into_iter()
            .filter(|&(a, b)| a > 0 && b > 0)
            .flat_map(|(a, b)| self.n.clone().filter(|&n| n > 0).map(move |n| Params::ints(a, b, n).expect("positive")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: i128, b: i128, n: u32) -> Params {
        Params::ints(a, b, n).unwrap()
    }

    fn set(items: &[(u32, u32)]) -> BTreeSet<Profile> {
        items.iter().map(|&(x, y)| Profile::new(x, y)).collect()
    }

    #[test]
    fn bimatrix_on_example_matrices() {
        let m = f4::scaled_payoff_matrices(&params(1, 3, 4));
        let eq = enumerate_ne_bimatrix(&m.cost_a, &m.cost_b).unwrap();
        assert_eq!(eq, [(1, 1), (2, 2)].into_iter().collect());
    }

    #[test]
    fn bimatrix_constant_game_is_all_cells() {
        let m = vec![vec![Rational::int(3); 3]; 2];
        assert_eq!(enumerate_ne_bimatrix(&m, &m).unwrap().len(), 6);
    }

    #[test]
    fn bimatrix_shape_mismatch() {
        let a = vec![vec![Rational::ONE; 2]; 2];
        let b = vec![vec![Rational::ONE; 3]; 2];
        assert!(matches!(enumerate_ne_bimatrix(&a, &b), Err(GameError::ShapeMismatch { .. })));
        let ragged = vec![vec![Rational::ONE; 2], vec![Rational::ONE; 1]];
        assert!(enumerate_ne_bimatrix(&ragged, &ragged).is_err());
    }

    #[test]
    fn bimatrix_agrees_with_best_response_pairing() {
        let p = params(2, 1, 12);
        let m = f4::payoff_matrices(&p);
        let cells: BTreeSet<Profile> = enumerate_ne_bimatrix(&m.cost_a, &m.cost_b)
            .unwrap()
            .into_iter()
            .map(|(i, j)| Profile::new(i as u32, j as u32))
            .collect();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells, f4::enumerate_equilibria(&p));
    }

    #[test]
    fn f3_oracle_examples() {
        assert_eq!(enumerate_ne_f3(&params(1, 3, 4)), set(&[(0, 0), (1, 1)]));
        assert_eq!(enumerate_ne_f3(&params(1, 4, 4)), set(&[(0, 0), (1, 1), (2, 2)]));
        assert_eq!(enumerate_ne_f3(&params(100, 1, 4)), set(&[(0, 0)]));
    }

    #[test]
    fn efficiency_examples() {
        let p = params(2, 4, 5);
        let e = exact_efficiency(&p, &enumerate_ne_f3(&p), Framework::F3).unwrap();
        assert_eq!((e.poa, e.pos), (Rational::frac(26, 25), Rational::ONE));

        let p = params(1, 3, 4);
        let e = exact_efficiency(&p, &set(&[(1, 1), (2, 2)]), Framework::F4).unwrap();
        assert_eq!(e.optimum, Rational::int(6));
        assert_eq!(e.pos, Rational::frac(100, 16) / 6);
        assert_eq!(e.poa, Rational::frac(7, 6));

        let e = exact_efficiency(&p, &set(&[(2, 2)]), Framework::F4).unwrap();
        assert_eq!(e.poa, e.pos);

        assert_eq!(exact_efficiency(&p, &BTreeSet::new(), Framework::F3), Err(GameError::EmptyEquilibria));
    }

    #[test]
    fn sweep_reports_a_corrupted_predictor() {
        let grid = Grid { a: 1..=2, b: 1..=3, n: 1..=5, extra_pairs: vec![] }.instances();
        let corrupt = |p: &Params| {
            let mut s = f3::equilibria_closed_form(p);
            s.insert(Profile::new(p.n(), 0));
            s
        };
        let results = consistency_sweep_with(&grid, Framework::F3, corrupt);
        assert_eq!(results.len(), grid.len());
        assert!(results.iter().all(|r| !r.matched && r.note.contains("extra")));
        assert!(consistency_sweep(&grid, Framework::F3).iter().all(|r| r.matched));
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(Grid::f3_acceptance().instances().len(), 2560);
        assert_eq!(Grid::f4_acceptance().instances().len(), 65 * 64);
        let empty = Grid { a: 1..=2, b: 1..=2, n: 5..=4, extra_pairs: vec![] };
        assert!(empty.instances().is_empty());
    }
}
