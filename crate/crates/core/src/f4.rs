//! Semi-splitable framework: each source is a single player routing its `N`
//! connections, which yields a symmetric `(N+1) x (N+1)` bimatrix game.
//!
//! Equilibria are predicted in closed form from the sign of `a - 2b` and
//! then checked by exact best-response membership before being reported.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::f3;
use crate::game::{scaled_utility_a, total_cost, utility_a, utility_b, Params, Profile, Regime, Slopes};
use crate::rational::Rational;

/// Cost matrices. Rows index player A's `nABC`, columns player B's `nBAC`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffMatrices {
    /// Entries are multiplied by `N^2`.
    pub scaled: bool,
    pub cost_a: Vec<Vec<Rational>>,
    pub cost_b: Vec<Vec<Rational>>,
}

impl PayoffMatrices {
    pub fn size(&self) -> usize {
        self.cost_a.len()
    }
}

fn build_matrices(params: &Params, scaled: bool) -> PayoffMatrices {
    let n = params.n();
    let scale = if scaled { params.n_rat() * params.n_rat() } else { Rational::ONE };
    let cost_a: Vec<Vec<Rational>> = (0..=n)
        .map(|x| {
            (0..=n)
                .map(|y| utility_a(params, Profile::new(x, y)).expect("in range") * scale)
                .collect()
        })
        .collect();
    let cost_b = (0..=n)
        .map(|x| {
            (0..=n)
                .map(|y| utility_b(params, Profile::new(x, y)).expect("in range") * scale)
                .collect()
        })
        .collect();
    PayoffMatrices { scaled, cost_a, cost_b }
}

pub fn payoff_matrices(params: &Params) -> PayoffMatrices {
    build_matrices(params, false)
}

/// `N^2`-scaled matrices; integer entries for integer slopes.
pub fn scaled_payoff_matrices(params: &Params) -> PayoffMatrices {
    build_matrices(params, true)
}

/// One or two optimal actions. Two only on an exact tie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BestResponse {
    low: u32,
    high: Option<u32>,
}

impl BestResponse {
    pub fn contains(&self, action: u32) -> bool {
        self.low == action || self.high == Some(action)
    }

    /// Lowest optimal action.
    pub fn min(&self) -> u32 {
        self.low
    }

    pub fn len(&self) -> usize {
        1 + self.high.is_some() as usize
    }

    pub fn is_tie(&self) -> bool {
        self.high.is_some()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> {
        std::iter::once(self.low).chain(self.high)
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }
}

/// Continuous minimizer of A's cost against `opponent`, in connection
/// units: `(bN - (a - 2b) * opponent) / (2 (a + 2b))`.
pub fn best_response_vertex(params: &Params, opponent: u32) -> Rational {
    let (a, b) = (params.a(), params.b());
    (b * params.n_rat() - (a - b * 2) * Rational::from(opponent)) / ((a + b * 2) * 2)
}

/// Integer minimizer(s) of A's strictly convex cost given B's `nBAC`.
pub fn best_response_a(params: &Params, n_bac: u32) -> Result<BestResponse> {
    params.check(Profile::new(0, n_bac))?;
    let n = params.n() as i128;
    let v = best_response_vertex(params, n_bac);
    let lo = v.floor().clamp(0, n) as u32;
    let hi = v.ceil().clamp(0, n) as u32;
    if lo == hi {
        return Ok(BestResponse { low: lo, high: None });
    }
    let cost = |x| scaled_utility_a(params, Profile::new(x, n_bac)).expect("in range");
    let (c_lo, c_hi) = (cost(lo), cost(hi));
    Ok(match c_lo.cmp(&c_hi) {
        std::cmp::Ordering::Less => BestResponse { low: lo, high: None },
        std::cmp::Ordering::Greater => BestResponse { low: hi, high: None },
        std::cmp::Ordering::Equal => BestResponse { low: lo, high: Some(hi) },
    })
}

/// B's best response to A's `nABC`; the game is symmetric.
pub fn best_response_b(params: &Params, n_abc: u32) -> Result<BestResponse> {
    best_response_a(params, n_abc)
}

/// Both coordinates are best responses to each other.
pub fn is_equilibrium(params: &Params, p: Profile) -> Result<bool> {
    params.check(p)?;
    Ok(best_response_a(params, p.n_bac)?.contains(p.n_abc) && best_response_b(params, p.n_abc)?.contains(p.n_bac))
}

/// Every pure equilibrium, found by pairing best responses. `O(N)`.
pub fn enumerate_equilibria(params: &Params) -> BTreeSet<Profile> {
    let mut out = BTreeSet::new();
    for y in 0..=params.n() {
        for x in best_response_a(params, y).expect("in range").iter() {
            if best_response_b(params, x).expect("in range").contains(y) {
                out.insert(Profile::new(x, y));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "1")]
    Mode1,
    #[serde(rename = "2")]
    Mode2,
    #[serde(rename = "3-A")]
    Mode3A,
    #[serde(rename = "3-B")]
    Mode3B,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Mode1 => "1",
            Mode::Mode2 => "2",
            Mode::Mode3A => "3-A",
            Mode::Mode3B => "3-B",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Position of `N * gamma` relative to the mode bands when `a > 2b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModeInfo {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    /// `N * gamma`, the continuous equilibrium level in connection units.
    pub n_gamma: Rational,
    #[serde(rename = "nTilde")]
    pub n_tilde: u32,
    pub z: Rational,
    pub mode: Mode,
}

impl ModeInfo {
    /// Equilibrium pattern implied by the mode, before any verification.
    pub fn pattern(&self) -> Vec<Profile> {
        let (lo, hi) = (self.n_tilde, self.n_tilde + 1);
        let p = Profile::new;
        match self.mode {
            Mode::Mode1 if self.z < self.alpha => vec![p(lo, lo)],
            Mode::Mode1 => vec![p(hi, hi)],
            Mode::Mode2 => vec![p(lo, hi), p(hi, lo)],
            Mode::Mode3A => vec![p(lo, lo), p(lo, hi), p(hi, lo)],
            Mode::Mode3B => vec![p(lo, hi), p(hi, lo), p(hi, hi)],
        }
    }
}

pub fn classify_mode(params: &Params) -> Result<ModeInfo> {
    let (a, b) = (params.a(), params.b());
    if params.slopes().regime() != Regime::AGreaterThan2B {
        return Err(GameError::Precondition {
            what: "mode classification",
            requirement: format!("a > 2b, got a={a} b={b}"),
        });
    }
    let denom = a * 3 + b * 2;
    let alpha = (a + b * 2) / denom;
    let beta = a * 2 / denom;
    let gamma = b / denom;
    let n_gamma = params.n_rat() * gamma;
    let n_tilde = n_gamma.floor() as u32;
    let z = n_gamma.fract();
    let mode = if z == alpha {
        Mode::Mode3A
    } else if z == beta {
        Mode::Mode3B
    } else if alpha < z && z < beta {
        Mode::Mode2
    } else {
        Mode::Mode1
    };
    Ok(ModeInfo { alpha, beta, gamma, n_gamma, n_tilde, z, mode })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CornerFlags {
    /// `(0, 0)` is an equilibrium.
    #[serde(rename = "originIsNE")]
    pub origin_is_ne: bool,
    /// `(N, N)` is an equilibrium.
    #[serde(rename = "allInIsNE")]
    pub all_in_is_ne: bool,
}

pub fn corner_conditions(params: &Params) -> CornerFlags {
    let (a, b, n) = (params.a(), params.b(), params.n_rat());
    CornerFlags {
        origin_is_ne: n <= a / b + 2,
        all_in_is_ne: n <= (b * 2 + a) / (a * 3 + b),
    }
}

/// Equilibria with at least one source sending nothing through the other.
///
/// For `a = 2b` these are the off-origin pair at `N = 4`. For `a > 2b`
/// they are `(0, k)` and `(k, 0)` for every `k` with `k / N` inside
/// `[b/(a-2b) - (a+2b)/(N(a-2b)), b/(2(a+2b)) + 1/(2N)]`, the origin
/// included. None exist off the origin when `a < 2b`.
pub fn boundary_equilibria(params: &Params) -> BTreeSet<Profile> {
    let (a, b, n) = (params.a(), params.b(), params.n_rat());
    match params.slopes().regime() {
        Regime::ALessThan2B => BTreeSet::new(),
        Regime::AEquals2B => {
            if params.n() == 4 {
                [Profile::new(0, 1), Profile::new(1, 0)].into_iter().collect()
            } else {
                BTreeSet::new()
            }
        }
        Regime::AGreaterThan2B => {
            let theta = a - b * 2;
            let lower = b / theta - (a + b * 2) / (n * theta);
            let upper = b / ((a + b * 2) * 2) + Rational::ONE / (n * 2);
            (0..params.n())
                .filter(|&k| {
                    let f = params.fraction(k);
                    lower <= f && f <= upper
                })
                .flat_map(|k| [Profile::new(0, k), Profile::new(k, 0)])
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F4Report {
    pub params: Params,
    pub equilibria: BTreeSet<Profile>,
    /// Predicted profiles that failed best-response verification.
    pub rejected: BTreeSet<Profile>,
    pub mode_info: Option<ModeInfo>,
    pub corners: CornerFlags,
    pub poa_exact: Rational,
    pub pos_exact: Rational,
}

fn candidates(params: &Params) -> (Vec<Profile>, Option<ModeInfo>) {
    let n = params.n();
    match params.slopes().regime() {
        // all equilibria are symmetric here
        Regime::ALessThan2B => {
            let sym = (0..=n)
                .filter(|&p| best_response_a(params, p).expect("in range").contains(p))
                .map(|p| Profile::new(p, p))
                .collect();
            (sym, None)
        }
        Regime::AEquals2B => {
            let nb = n / 8;
            let pats = match n % 8 {
                4 => vec![
                    Profile::new(nb, nb),
                    Profile::new(nb + 1, nb),
                    Profile::new(nb, nb + 1),
                    Profile::new(nb + 1, nb + 1),
                ],
                r if r < 4 => vec![Profile::new(nb, nb)],
                _ => vec![Profile::new(nb + 1, nb + 1)],
            };
            (pats, None)
        }
        Regime::AGreaterThan2B => {
            let info = classify_mode(params).expect("regime checked");
            (info.pattern(), Some(info))
        }
    }
}

/// Closed-form equilibrium set, verified member by member.
pub fn predict_equilibria(params: &Params) -> F4Report {
    let (predicted, mode_info) = candidates(params);
    let (mut equilibria, mut rejected) = (BTreeSet::new(), BTreeSet::new());
    for p in predicted {
        if matches!(is_equilibrium(params, p), Ok(true)) {
            equilibria.insert(p);
        } else {
            rejected.insert(p);
        }
    }
    let optimum = params.b() * 2;
    let ratios: Vec<Rational> = equilibria
        .iter()
        .map(|&p| total_cost(params, p).expect("verified profile") / optimum)
        .collect();
    F4Report {
        params: *params,
        poa_exact: ratios.iter().copied().max().unwrap_or(Rational::ZERO),
        pos_exact: ratios.iter().copied().min().unwrap_or(Rational::ZERO),
        equilibria,
        rejected,
        mode_info,
        corners: corner_conditions(params),
    }
}

/// The single-connection game, where both frameworks coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct N1Game {
    pub matrices: PayoffMatrices,
    /// Rosenthal potential at the four profiles.
    pub potential: [[Rational; 2]; 2],
    pub equilibria: BTreeSet<Profile>,
}

pub fn n1_game(params: &Params) -> Result<N1Game> {
    if params.n() != 1 {
        return Err(GameError::Precondition {
            what: "the single-connection game",
            requirement: format!("N = 1, got N = {}", params.n()),
        });
    }
    let pot = |x, y| f3::rosenthal_potential(params, Profile::new(x, y)).expect("in range");
    let mut equilibria: BTreeSet<Profile> = [Profile::new(0, 0)].into_iter().collect();
    if params.a() * 2 <= params.b() {
        equilibria.insert(Profile::new(1, 1));
    }
    Ok(N1Game {
        matrices: payoff_matrices(params),
        potential: [[pot(0, 0), pot(0, 1)], [pot(1, 0), pot(1, 1)]],
        equilibria,
    })
}

/// Equilibrium flow fraction of the perfectly splitable limit.
pub fn limit_equilibrium(slopes: &Slopes) -> Rational {
    slopes.b() / (slopes.a() * 3 + slopes.b() * 2)
}

pub fn limit_poa(slopes: &Slopes) -> Rational {
    let d = slopes.a() * 3 + slopes.b() * 2;
    Rational::ONE + slopes.a() * slopes.b() / (d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BrOutcome {
    Converged,
    Cycle,
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrTrace {
    /// Starting profile followed by every profile that changed.
    pub profiles: Vec<Profile>,
    pub outcome: BrOutcome,
}

impl BrTrace {
    pub fn last(&self) -> Profile {
        *self.profiles.last().expect("trace starts non-empty")
    }
}

/// Alternating best responses, A first, ties broken toward fewer rerouted
/// connections. Stops at the first equilibrium reached.
pub fn br_dynamics(params: &Params, start: Profile, max_steps: usize) -> Result<BrTrace> {
    params.check(start)?;
    let mut profiles = vec![start];
    let mut current = start;
    let mut seen = HashSet::new();
    let mut a_moves = true;
    for _ in 0..max_steps {
        if is_equilibrium(params, current)? {
            return Ok(BrTrace { profiles, outcome: BrOutcome::Converged });
        }
        if !seen.insert((current, a_moves)) {
            return Ok(BrTrace { profiles, outcome: BrOutcome::Cycle });
        }
        let next = if a_moves {
            Profile::new(best_response_a(params, current.n_bac)?.min(), current.n_bac)
        } else {
            Profile::new(current.n_abc, best_response_b(params, current.n_abc)?.min())
        };
        if next != current {
            profiles.push(next);
            current = next;
        }
        a_moves = !a_moves;
    }
    let outcome = if is_equilibrium(params, current)? { BrOutcome::Converged } else { BrOutcome::StepLimit };
    Ok(BrTrace { profiles, outcome })
}
