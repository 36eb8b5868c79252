//! Atomic congestion games with linear latencies.
//!
//! A game has a set of facilities, each with latency `l(x) = a*x + b`, and a
//! finite set of players. Each player picks one strategy (a set of facilities)
//! and pays the sum of latencies at the realized integer loads. A profile is a
//! multiplicative `eps`-equilibrium when no player can cut her cost below
//! `current / (1 + eps)` by a unilateral switch.
//!
//! The module also carries the `eps`-potential
//!
//! ```text
//! Phi_eps(A) = 1/2 * sum_e (a_e n_e + b_e) n_e
//!            + 1/2 * (1-eps)/(1+eps) * sum_e (a_e + b_e) n_e
//! ```
//!
//! whose local minima are `eps`-equilibria. At `eps = 0` it reduces to the
//! classical Rosenthal potential.

pub mod solvers;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::EQ_TOL;

/// One facility with linear latency `l(x) = a*x + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Facility {
    pub id: usize,
    /// Load coefficient, must be nonnegative.
    pub a: f64,
    /// Constant term. May be negative as long as `a + b >= 0`, so the latency
    /// is nonnegative at every integer load that can actually occur.
    pub b: f64,
}

impl Facility {
    /// Latency at load `x` (an integer player count or a fractional flow).
    pub fn latency(&self, x: f64) -> f64 {
        self.a * x + self.b
    }
}

/// A pure strategy profile: one strategy index per player.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Profile {
    pub choices: Vec<usize>,
}

impl Profile {
    pub fn new(choices: Vec<usize>) -> Self {
        Profile { choices }
    }
}

/// Per-facility player counts for a profile, indexed by dense facility position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadVector {
    loads: Vec<u32>,
}

impl LoadVector {
    pub fn get(&self, facility_index: usize) -> u32 {
        self.loads[facility_index]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.loads
    }

    /// Total load, which always equals the summed strategy sizes of the profile.
    pub fn total(&self) -> u64 {
        self.loads.iter().map(|&n| u64::from(n)).sum()
    }
}

/// Result of the `eps`-equilibrium verifier.
///
/// `epsilon_star` is the least `eps` for which the profile is an
/// `eps`-equilibrium; it is `f64::INFINITY` when some player with positive
/// cost has a zero-cost deviation. `witness` is the (player, strategy index)
/// pair attaining the worst deviation ratio, absent when every player already
/// best-responds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonReport {
    pub epsilon_star: f64,
    pub witness: Option<(usize, usize)>,
}

impl EpsilonReport {
    /// Whether the verified profile is an `eps`-equilibrium, up to the
    /// standard verifier tolerance.
    pub fn is_epsilon_nash(&self, eps: f64) -> bool {
        self.epsilon_star <= eps + EQ_TOL
    }
}

#[derive(Deserialize)]
struct RawAtomicGame {
    facilities: Vec<Facility>,
    players: Vec<Vec<Vec<usize>>>,
}

/// An atomic congestion game: facilities plus one strategy set per player.
///
/// Games are canonicalized on construction: facility ids inside each strategy
/// are sorted and deduplicated, so equal games compare and hash identically.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawAtomicGame")]
pub struct AtomicGame {
    facilities: Vec<Facility>,
    /// Canonical strategy sets, `players[i][s]` listing sorted facility ids.
    players: Vec<Vec<Vec<usize>>>,
    /// Strategies as sorted dense facility indices, parallel to `players`.
    #[serde(skip)]
    dense: Vec<Vec<Vec<usize>>>,
    #[serde(skip)]
    index: BTreeMap<usize, usize>,
}

impl TryFrom<RawAtomicGame> for AtomicGame {
    type Error = Error;

    fn try_from(raw: RawAtomicGame) -> Result<Self> {
        AtomicGame::new(raw.facilities, raw.players)
    }
}

impl AtomicGame {
    pub fn new(facilities: Vec<Facility>, players: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (pos, f) in facilities.iter().enumerate() {
            if index.insert(f.id, pos).is_some() {
                return Err(Error::InvalidGame(format!(
                    "duplicate facility id {}",
                    f.id
                )));
            }
            if !(f.a >= 0.0) {
                return Err(Error::InvalidGame(format!(
                    "facility {} has negative load coefficient a = {}",
                    f.id, f.a
                )));
            }
            if !(f.a + f.b >= 0.0) {
                return Err(Error::InvalidGame(format!(
                    "facility {} has negative latency {} at load 1",
                    f.id,
                    f.a + f.b
                )));
            }
        }
        let mut canonical = Vec::with_capacity(players.len());
        let mut dense = Vec::with_capacity(players.len());
        for (i, strategies) in players.into_iter().enumerate() {
            if strategies.is_empty() {
                return Err(Error::InvalidGame(format!("player {i} has no strategy")));
            }
            let mut canon_strats = Vec::with_capacity(strategies.len());
            let mut dense_strats = Vec::with_capacity(strategies.len());
            for (s, mut ids) in strategies.into_iter().enumerate() {
                ids.sort_unstable();
                ids.dedup();
                if ids.is_empty() {
                    return Err(Error::InvalidGame(format!(
                        "player {i} strategy {s} is empty"
                    )));
                }
                let mut ix: Vec<usize> = Vec::with_capacity(ids.len());
                for id in &ids {
                    let pos = index.get(id).ok_or_else(|| {
                        Error::InvalidGame(format!(
                            "player {i} strategy {s} references unknown facility {id}"
                        ))
                    })?;
                    ix.push(*pos);
                }
                ix.sort_unstable();
                canon_strats.push(ids);
                dense_strats.push(ix);
            }
            canonical.push(canon_strats);
            dense.push(dense_strats);
        }
        Ok(AtomicGame {
            facilities,
            players: canonical,
            dense,
            index,
        })
    }

    pub fn facilities(&self) -> &[Facility] {
        &self.facilities
    }

    /// Strategy sets per player, as canonical sorted facility ids.
    pub fn players(&self) -> &[Vec<Vec<usize>>] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    /// Dense position of a facility id, if present.
    pub fn facility_index(&self, id: usize) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Number of pure profiles, i.e. the product of strategy-set sizes.
    pub fn profile_count(&self) -> u128 {
        self.players
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    pub fn check_profile(&self, profile: &Profile) -> Result<()> {
        if profile.choices.len() != self.players.len() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} choices for {} players",
                profile.choices.len(),
                self.players.len()
            )));
        }
        for (i, &c) in profile.choices.iter().enumerate() {
            if c >= self.players[i].len() {
                return Err(Error::InvalidProfile(format!(
                    "player {i} choice {c} out of range (has {} strategies)",
                    self.players[i].len()
                )));
            }
        }
        Ok(())
    }

    /// Per-facility player counts under `profile`.
    pub fn loads(&self, profile: &Profile) -> Result<LoadVector> {
        self.check_profile(profile)?;
        let mut loads = vec![0u32; self.facilities.len()];
        for (i, &c) in profile.choices.iter().enumerate() {
            for &e in &self.dense[i][c] {
                loads[e] += 1;
            }
        }
        Ok(LoadVector { loads })
    }

    fn strategy_cost(&self, loads: &LoadVector, strategy: &[usize]) -> f64 {
        strategy
            .iter()
            .map(|&e| self.facilities[e].latency(f64::from(loads.loads[e])))
            .sum()
    }

    /// Cost of the strategy `alt` for `player` when everyone else keeps the
    /// loads in `loads` (computed from the player's current strategy).
    fn deviation_cost(&self, loads: &LoadVector, current: &[usize], alt: &[usize]) -> f64 {
        alt.iter()
            .map(|&e| {
                let stays = current.binary_search(&e).is_ok();
                let n = loads.loads[e] + if stays { 0 } else { 1 };
                self.facilities[e].latency(f64::from(n))
            })
            .sum()
    }

    /// Cost paid by `player` under `profile`.
    pub fn player_cost(&self, profile: &Profile, player: usize) -> Result<f64> {
        let loads = self.loads(profile)?;
        if player >= self.players.len() {
            return Err(Error::InvalidProfile(format!(
                "player {player} out of range"
            )));
        }
        Ok(self.strategy_cost(&loads, &self.dense[player][profile.choices[player]]))
    }

    /// Total cost, `sum_i c_i(A)`, which also equals
    /// `sum_e n_e (a_e n_e + b_e)`.
    pub fn social_cost(&self, profile: &Profile) -> Result<f64> {
        let loads = self.loads(profile)?;
        Ok(self.social_cost_at(&loads))
    }

    pub(crate) fn social_cost_at(&self, loads: &LoadVector) -> f64 {
        self.facilities
            .iter()
            .enumerate()
            .map(|(e, f)| {
                let n = loads.loads[e];
                f64::from(n) * f.latency(f64::from(n))
            })
            .sum()
    }

    /// Least `eps` such that `profile` is an `eps`-equilibrium, with the
    /// player/deviation witness attaining it.
    ///
    /// A player whose only strategy is the current one contributes 0. A player
    /// with positive cost and a zero-cost deviation makes the ratio unbounded
    /// and the report carries `epsilon_star = INFINITY`.
    pub fn profile_epsilon(&self, profile: &Profile) -> Result<EpsilonReport> {
        let loads = self.loads(profile)?;
        Ok(self.profile_epsilon_at(&loads, profile))
    }

    pub(crate) fn profile_epsilon_at(
        &self,
        loads: &LoadVector,
        profile: &Profile,
    ) -> EpsilonReport {
        let mut epsilon_star = 0.0_f64;
        let mut witness = None;
        for (i, &choice) in profile.choices.iter().enumerate() {
            let current = &self.dense[i][choice];
            let cur_cost = self.strategy_cost(loads, current);
            if cur_cost <= 0.0 {
                continue;
            }
            let mut best_cost = cur_cost;
            let mut best_alt = choice;
            for (s, alt) in self.dense[i].iter().enumerate() {
                if s == choice {
                    continue;
                }
                let c = self.deviation_cost(loads, current, alt);
                if c < best_cost {
                    best_cost = c;
                    best_alt = s;
                }
            }
            let contribution = if best_cost <= 0.0 {
                f64::INFINITY
            } else {
                (cur_cost / best_cost - 1.0).max(0.0)
            };
            if contribution > epsilon_star {
                epsilon_star = contribution;
                witness = Some((i, best_alt));
            }
        }
        EpsilonReport {
            epsilon_star,
            witness,
        }
    }

    /// The `eps`-potential of a profile. At `eps = 0` this is the Rosenthal
    /// potential; at `eps = 1` the linear correction term vanishes.
    pub fn potential(&self, profile: &Profile, eps: f64) -> Result<f64> {
        check_epsilon(eps)?;
        let loads = self.loads(profile)?;
        Ok(self.potential_at(&loads, eps))
    }

    pub(crate) fn potential_at(&self, loads: &LoadVector, eps: f64) -> f64 {
        let kappa = (1.0 - eps) / (1.0 + eps);
        self.facilities
            .iter()
            .enumerate()
            .map(|(e, f)| {
                let n = f64::from(loads.loads[e]);
                0.5 * (f.a * n + f.b) * n + 0.5 * kappa * (f.a + f.b) * n
            })
            .sum()
    }

    /// Closed-form potential change when `player` switches to strategy `alt`:
    ///
    /// ```text
    /// sum_{e in alt} (a_e n_e + (a_e + b_e)/(1+eps))
    ///   - sum_{e in alt ∩ cur} a_e
    ///   - sum_{e in cur} (a_e n_e + (b_e - a_e eps)/(1+eps))
    /// ```
    ///
    /// which equals `potential(after) - potential(before)` exactly (up to
    /// rounding), and at `eps = 0` equals the mover's cost change.
    pub fn potential_delta(
        &self,
        profile: &Profile,
        player: usize,
        alt: usize,
        eps: f64,
    ) -> Result<f64> {
        check_epsilon(eps)?;
        let loads = self.loads(profile)?;
        if player >= self.players.len() {
            return Err(Error::InvalidProfile(format!(
                "player {player} out of range"
            )));
        }
        if alt >= self.players[player].len() {
            return Err(Error::InvalidProfile(format!(
                "player {player} deviation {alt} out of range"
            )));
        }
        Ok(self.potential_delta_at(&loads, player, profile.choices[player], alt, eps))
    }

    pub(crate) fn potential_delta_at(
        &self,
        loads: &LoadVector,
        player: usize,
        current: usize,
        alt: usize,
        eps: f64,
    ) -> f64 {
        if current == alt {
            return 0.0;
        }
        let cur = &self.dense[player][current];
        let new = &self.dense[player][alt];
        let inv = 1.0 / (1.0 + eps);
        let mut delta = 0.0;
        for &e in new {
            let f = &self.facilities[e];
            delta += f.a * f64::from(loads.loads[e]) + (f.a + f.b) * inv;
            if cur.binary_search(&e).is_ok() {
                delta -= f.a;
            }
        }
        for &e in cur {
            let f = &self.facilities[e];
            delta -= f.a * f64::from(loads.loads[e]) + (f.b - f.a * eps) * inv;
        }
        delta
    }

    pub(crate) fn deviation_cost_of(
        &self,
        loads: &LoadVector,
        player: usize,
        current: usize,
        alt: usize,
    ) -> f64 {
        if current == alt {
            self.strategy_cost(loads, &self.dense[player][current])
        } else {
            self.deviation_cost(
                loads,
                &self.dense[player][current],
                &self.dense[player][alt],
            )
        }
    }

    /// Update `loads` in place for `player` switching `from -> to`.
    pub(crate) fn apply_switch(
        &self,
        loads: &mut LoadVector,
        player: usize,
        from: usize,
        to: usize,
    ) {
        if from == to {
            return;
        }
        for &e in &self.dense[player][from] {
            loads.loads[e] -= 1;
        }
        for &e in &self.dense[player][to] {
            loads.loads[e] += 1;
        }
    }
}

pub(crate) fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!(
            "epsilon must be nonnegative, got {eps}"
        )));
    }
    Ok(())
}
