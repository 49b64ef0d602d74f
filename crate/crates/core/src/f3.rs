//! Atomic non-splitable framework: every connection picks its own route.
//!
//! Covers the single-deviation equilibrium test, the closed-form
//! equilibrium set, the Rosenthal potential, the non-atomic limit and the
//! efficiency figures.

use std::collections::BTreeSet;

use crate::error::{GameError, Result};
use crate::game::{route_costs, Params, Profile, Slopes};
use crate::rational::Rational;

/// True iff no single connection can strictly lower its cost by moving to
/// the other route of its source. A condition is vacuous when the route it
/// would leave is empty.
pub fn is_equilibrium(params: &Params, p: Profile) -> Result<bool> {
    let c = route_costs(params, p)?;
    let n = params.n();
    let da = params.a() / params.n_rat();
    let db = params.b() / params.n_rat();

    let ac_stays = p.n_ac(n) == 0 || c.ac <= (c.ab + da) + (c.bc + db);
    let bc_stays = p.n_bc(n) == 0 || c.bc <= (c.ab + da) + (c.ac + db);
    let abc_stays = p.n_abc == 0 || c.abc <= c.ac + db;
    let bac_stays = p.n_bac == 0 || c.bac <= c.bc + db;
    Ok(ac_stays && bc_stays && abc_stays && bac_stays)
}

/// Largest `p` with `2ap <= b`, capped by `N`.
fn max_symmetric_level(params: &Params) -> u32 {
    let bound = (params.b() / (params.a() * 2)).floor();
    bound.min(params.n() as i128) as u32
}

/// Closed-form equilibrium set: the symmetric profiles `(p, p)` with
/// `p <= b / 2a`.
pub fn equilibria_closed_form(params: &Params) -> BTreeSet<Profile> {
    (0..=max_symmetric_level(params)).map(|p| Profile::new(p, p)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquilibriumCount {
    pub count: u32,
    /// Beyond this many connections per source the count no longer changes.
    pub threshold: u32,
}

pub fn equilibrium_count(params: &Params) -> EquilibriumCount {
    let ratio = params.b() / (params.a() * 2);
    EquilibriumCount {
        count: max_symmetric_level(params) + 1,
        threshold: ratio.ceil() as u32,
    }
}

/// Rosenthal potential in flow-fraction form.
pub fn rosenthal_potential(params: &Params, p: Profile) -> Result<Rational> {
    params.check(p)?;
    let (a, b, n) = (params.a(), params.b(), params.n_rat());
    let x = params.fraction(p.n_abc);
    let y = params.fraction(p.n_bac);
    let diff = x - y;
    let sum = x + y;
    Ok(b * n * diff * diff + a * n / 2 * sum * (sum + n.recip().expect("N >= 1")))
}

/// One connection changing route at its source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Switch {
    AcToAbc,
    AbcToAc,
    BcToBac,
    BacToBc,
}

impl Switch {
    pub const ALL: [Switch; 4] = [Switch::AcToAbc, Switch::AbcToAc, Switch::BcToBac, Switch::BacToBc];

    pub fn source_route(&self) -> &'static str {
        match self {
            Switch::AcToAbc => "AC",
            Switch::AbcToAc => "ABC",
            Switch::BcToBac => "BC",
            Switch::BacToBc => "BAC",
        }
    }

    /// Profile after the switch, or `None` if the source route is empty.
    pub fn apply(&self, n: u32, p: Profile) -> Option<Profile> {
        match self {
            Switch::AcToAbc if p.n_abc < n => Some(Profile::new(p.n_abc + 1, p.n_bac)),
            Switch::AbcToAc if p.n_abc > 0 => Some(Profile::new(p.n_abc - 1, p.n_bac)),
            Switch::BcToBac if p.n_bac < n => Some(Profile::new(p.n_abc, p.n_bac + 1)),
            Switch::BacToBc if p.n_bac > 0 => Some(Profile::new(p.n_abc, p.n_bac - 1)),
            _ => None,
        }
    }
}

/// Both sides of the potential identity for one switch, each measured as
/// value before the switch minus value after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PotentialDelta {
    pub delta_potential: Rational,
    pub delta_cost: Rational,
}

impl PotentialDelta {
    pub fn holds(&self) -> bool {
        self.delta_potential == self.delta_cost
    }
}

pub fn potential_delta(params: &Params, p: Profile, switch: Switch) -> Result<PotentialDelta> {
    params.check(p)?;
    let after = switch
        .apply(params.n(), p)
        .ok_or(GameError::EmptyRoute { route: switch.source_route() })?;
    let before_costs = route_costs(params, p)?;
    let after_costs = route_costs(params, after)?;
    let (old, new) = match switch {
        Switch::AcToAbc => (before_costs.ac, after_costs.abc),
        Switch::AbcToAc => (before_costs.abc, after_costs.ac),
        Switch::BcToBac => (before_costs.bc, after_costs.bac),
        Switch::BacToBc => (before_costs.bac, after_costs.bc),
    };
    Ok(PotentialDelta {
        delta_potential: rosenthal_potential(params, p)? - rosenthal_potential(params, after)?,
        delta_cost: old - new,
    })
}

/// Sum of the average route costs of both sources, in the
/// `a(fABC + fBAC)^2 + 2b(1 + (fABC - fBAC)^2)` form.
pub fn social_cost(params: &Params, p: Profile) -> Result<Rational> {
    params.check(p)?;
    let x = params.fraction(p.n_abc);
    let y = params.fraction(p.n_bac);
    let (sum, diff) = (x + y, x - y);
    Ok(params.a() * sum * sum + params.b() * 2 * (Rational::ONE + diff * diff))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SocialOptimum {
    pub profile: Profile,
    pub cost: Rational,
    /// No other profile reaches the same cost.
    pub unique: bool,
}

/// Exhaustive minimization of [`social_cost`] over all profiles.
pub fn social_optimum(params: &Params) -> SocialOptimum {
    let mut best: Option<SocialOptimum> = None;
    for p in params.profiles() {
        let cost = social_cost(params, p).expect("enumerated profile is valid");
        best = match best {
            None => Some(SocialOptimum { profile: p, cost, unique: true }),
            Some(cur) if cost < cur.cost => Some(SocialOptimum { profile: p, cost, unique: true }),
            Some(cur) if cost == cur.cost => Some(SocialOptimum { unique: false, ..cur }),
            keep => keep,
        };
    }
    best.expect("at least one profile")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Efficiency {
    /// Worst equilibrium over social optimum, maximized over integer levels.
    pub poa_exact: Rational,
    /// `1 + b / (2 a N^2)`, obtained by maximizing over real-valued levels.
    pub poa_formula: Rational,
    pub pos: Rational,
}

impl Efficiency {
    pub fn diverges(&self) -> bool {
        self.poa_exact != self.poa_formula
    }
}

pub fn poa_pos(params: &Params) -> Efficiency {
    let (a, b, n) = (params.a(), params.b(), params.n_rat());
    let p = Rational::from(max_symmetric_level(params));
    Efficiency {
        poa_exact: Rational::ONE + a * 2 * p * p / (b * n * n),
        poa_formula: Rational::ONE + b / (a * 2 * n * n),
        pos: Rational::ONE,
    }
}

/// Potential of the non-atomic limit game.
pub fn nonatomic_potential(slopes: &Slopes, f_abc: Rational, f_bac: Rational) -> Result<Rational> {
    check_fractions(f_abc, f_bac)?;
    let (a, b) = (slopes.a(), slopes.b());
    let (diff, sum) = (f_abc - f_bac, f_abc + f_bac);
    Ok(b * diff * diff + a / 2 * sum * sum)
}

pub fn nonatomic_gradient(slopes: &Slopes, f_abc: Rational, f_bac: Rational) -> Result<[Rational; 2]> {
    check_fractions(f_abc, f_bac)?;
    let (a, b) = (slopes.a(), slopes.b());
    let sum = f_abc + f_bac;
    Ok([a * sum + b * 2 * (f_abc - f_bac), a * sum + b * 2 * (f_bac - f_abc)])
}

/// Constant Hessian of the non-atomic potential.
pub fn nonatomic_hessian(slopes: &Slopes) -> [[Rational; 2]; 2] {
    let (a, b) = (slopes.a(), slopes.b());
    [[a + b * 2, a - b * 2], [a - b * 2, a + b * 2]]
}

/// Sylvester's criterion on a symmetric 2x2 matrix.
pub fn is_positive_definite(m: &[[Rational; 2]; 2]) -> bool {
    m[0][0].is_positive() && (m[0][0] * m[1][1] - m[0][1] * m[1][0]).is_positive()
}

/// The non-atomic limit has a single equilibrium at the origin.
pub fn nonatomic_equilibrium() -> (Rational, Rational) {
    (Rational::ZERO, Rational::ZERO)
}

fn check_fractions(f_abc: Rational, f_bac: Rational) -> Result<()> {
    for f in [f_abc, f_bac] {
        if f.is_negative() || f > Rational::ONE {
            return Err(GameError::Precondition {
                what: "non-atomic potential",
                requirement: format!("flow fractions in [0, 1], got {f}"),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F3Report {
    pub params: Params,
    pub equilibria: BTreeSet<Profile>,
    pub count: EquilibriumCount,
    pub efficiency: Efficiency,
    pub social_optimum: SocialOptimum,
}

pub fn analyze(params: &Params) -> F3Report {
    F3Report {
        params: *params,
        equilibria: equilibria_closed_form(params),
        count: equilibrium_count(params),
        efficiency: poa_pos(params),
        social_optimum: social_optimum(params),
    }
}
