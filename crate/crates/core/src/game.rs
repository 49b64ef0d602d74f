//! Game instances, profiles, link and route costs, utilities.
//!
//! Two sources A and B each emit `N` connections towards the exit node C.
//! A connection either goes direct (AC, BC) or transits through the other
//! source (ABC, BAC). A profile records only how many connections take the
//! transversal route at each source; everything else follows from
//! conservation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::rational::Rational;

/// Cost slopes: `a` on link [AB], `b` on links [AC] and [BC].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slopes {
    a: Rational,
    b: Rational,
}

impl Slopes {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(GameError::NonPositiveSlope { name: "a", value: a });
        }
        if !b.is_positive() {
            return Err(GameError::NonPositiveSlope { name: "b", value: b });
        }
        Ok(Slopes { a, b })
    }

    pub fn a(&self) -> Rational {
        self.a
    }

    pub fn b(&self) -> Rational {
        self.b
    }

    /// Sign of `a - 2b`, which selects the semi-splitable regime.
    pub fn regime(&self) -> Regime {
        match self.a.cmp(&(self.b * 2)) {
            std::cmp::Ordering::Less => Regime::ALessThan2B,
            std::cmp::Ordering::Equal => Regime::AEquals2B,
            std::cmp::Ordering::Greater => Regime::AGreaterThan2B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    ALessThan2B,
    AEquals2B,
    AGreaterThan2B,
}

/// A game instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    slopes: Slopes,
    n: u32,
}

impl Params {
    pub fn new(a: Rational, b: Rational, n: u32) -> Result<Self> {
        Self::from_slopes(Slopes::new(a, b)?, n)
    }

    pub fn from_slopes(slopes: Slopes, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(GameError::ZeroConnections);
        }
        Ok(Params { slopes, n })
    }

    /// Integer-slope shorthand, mostly for tests and grids.
    pub fn ints(a: i128, b: i128, n: u32) -> Result<Self> {
        Self::new(Rational::int(a), Rational::int(b), n)
    }

    pub fn slopes(&self) -> Slopes {
        self.slopes
    }

    pub fn a(&self) -> Rational {
        self.slopes.a
    }

    pub fn b(&self) -> Rational {
        self.slopes.b
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n_rat(&self) -> Rational {
        Rational::from(self.n)
    }

    pub fn check(&self, p: Profile) -> Result<()> {
        if p.n_abc > self.n || p.n_bac > self.n {
            Err(GameError::ProfileOutOfRange { profile: p, n: self.n })
        } else {
            Ok(())
        }
    }

    /// All `(N+1)^2` profiles in lexicographic order.
    pub fn profiles(&self) -> impl Iterator<Item = Profile> {
        let n = self.n;
        (0..=n).flat_map(move |x| (0..=n).map(move |y| Profile::new(x, y)))
    }

    pub fn fraction(&self, count: u32) -> Rational {
        Rational::frac(count as i128, self.n as i128)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={} b={} N={}", self.a(), self.b(), self.n)
    }
}

/// Anonymous pure profile: connections rerouted at each source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Profile {
    #[serde(rename = "nABC")]
    pub n_abc: u32,
    #[serde(rename = "nBAC")]
    pub n_bac: u32,
}

impl Profile {
    pub const fn new(n_abc: u32, n_bac: u32) -> Self {
        Profile { n_abc, n_bac }
    }

    /// The same profile seen from the other source.
    pub fn swapped(self) -> Self {
        Profile::new(self.n_bac, self.n_abc)
    }

    pub fn is_symmetric(&self) -> bool {
        self.n_abc == self.n_bac
    }

    pub fn n_ac(&self, n: u32) -> u32 {
        n - self.n_abc
    }

    pub fn n_bc(&self, n: u32) -> u32 {
        n - self.n_bac
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n_abc, self.n_bac)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Framework {
    /// Atomic non-splitable: every connection is its own player.
    F3,
    /// Semi-splitable: each source routes its `N` connections.
    F4,
}

impl fmt::Display for Framework {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Framework::F3 => "f3",
            Framework::F4 => "f4",
        })
    }
}

/// Connections carried by each link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkLoads {
    pub n_ab: u32,
    pub n_ac: u32,
    pub n_bc: u32,
}

/// Link [AB] cost plus the four route costs. Routes AC and BC consist of a
/// single link, so their cost is the link cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteCosts {
    pub ab: Rational,
    pub ac: Rational,
    pub abc: Rational,
    pub bc: Rational,
    pub bac: Rational,
}

pub fn link_loads(params: &Params, p: Profile) -> Result<LinkLoads> {
    params.check(p)?;
    let n = params.n();
    Ok(LinkLoads {
        n_ab: p.n_abc + p.n_bac,
        n_ac: p.n_ac(n) + p.n_bac,
        n_bc: p.n_bc(n) + p.n_abc,
    })
}

pub fn route_costs(params: &Params, p: Profile) -> Result<RouteCosts> {
    let loads = link_loads(params, p)?;
    let n = params.n_rat();
    let ab = params.a() * Rational::from(loads.n_ab) / n;
    let ac = params.b() * Rational::from(loads.n_ac) / n;
    let bc = params.b() * Rational::from(loads.n_bc) / n;
    Ok(RouteCosts { ab, ac, abc: ab + bc, bc, bac: ab + ac })
}

/// Average cost of source A's connections, in closed polynomial form.
pub fn utility_a(params: &Params, p: Profile) -> Result<Rational> {
    params.check(p)?;
    let (a, b) = (params.a(), params.b());
    let x = params.fraction(p.n_abc);
    let y = params.fraction(p.n_bac);
    Ok(b - b * x + b * y + (a - b * 2) * x * y + (a + b * 2) * x * x)
}

pub fn utility_b(params: &Params, p: Profile) -> Result<Rational> {
    utility_a(params, p.swapped())
}

/// `N^2 * utility_a`; an integer whenever `a` and `b` are.
pub fn scaled_utility_a(params: &Params, p: Profile) -> Result<Rational> {
    params.check(p)?;
    let (a, b) = (params.a(), params.b());
    let n = params.n_rat();
    let x = Rational::from(p.n_abc);
    let y = Rational::from(p.n_bac);
    Ok(b * n * n - b * n * x + b * n * y + (a - b * 2) * x * y + (a + b * 2) * x * x)
}

pub fn scaled_utility_b(params: &Params, p: Profile) -> Result<Rational> {
    scaled_utility_a(params, p.swapped())
}

/// Sum of both sources' average costs.
pub fn total_cost(params: &Params, p: Profile) -> Result<Rational> {
    params.check(p)?;
    let (a, b) = (params.a(), params.b());
    let x = params.fraction(p.n_abc);
    let y = params.fraction(p.n_bac);
    Ok(b * 2 + (a - b * 2) * x * y * 2 + (a + b * 2) * (x * x + y * y))
}
