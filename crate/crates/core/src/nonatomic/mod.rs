//! Non-atomic congestion games: a continuum of users per commodity, split
//! across finitely many strategies (facility sets).
//!
//! A feasible flow assigns nonnegative weight to every strategy so that each
//! commodity's weights sum to its rate. The latency of a strategy is the sum
//! of its facility latencies at the induced facility flows, and a flow is an
//! `eps`-equilibrium when every used strategy is within a factor `1 + eps` of
//! the cheapest strategy of its commodity.
//!
//! The `eps`-potential here is the quadratic
//!
//! ```text
//! Phi_eps(f) = sum_e (1/2 a_e f_e^2 + b_e f_e / (1 + eps))
//! ```
//!
//! whose global minima are `eps`-equilibria; it is the Beckmann potential at
//! `eps = 0`.

pub mod solvers;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::atomic::{check_epsilon, Facility};
use crate::error::{Error, Result};
use crate::EQ_TOL;

/// Default relative threshold under which a strategy weight counts as unused.
///
/// Iterative solvers leave float dust on abandoned strategies; a strategy is
/// treated as used only when its weight exceeds this fraction of the
/// commodity rate.
pub const USED_THRESHOLD: f64 = 1e-9;

/// One commodity: a traffic rate plus its admissible strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commodity {
    pub rate: f64,
    pub strategies: Vec<Vec<usize>>,
}

/// A feasible assignment of traffic: `weights[i][s]` is the amount of
/// commodity `i` routed on its strategy `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub weights: Vec<Vec<f64>>,
}

/// Per-facility load induced by a flow, indexed by dense facility position.
#[derive(Debug, Clone, PartialEq)]
pub struct FacilityFlow {
    flows: Vec<f64>,
}

impl FacilityFlow {
    pub fn get(&self, facility_index: usize) -> f64 {
        self.flows[facility_index]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.flows
    }
}

/// Worst used-versus-best latency ratio of a flow, reported as the least
/// `eps` for which the flow is an `eps`-equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WardropReport {
    pub epsilon_star: f64,
    /// `(commodity, used strategy, cheaper strategy)` attaining the ratio.
    pub witness: Option<(usize, usize, usize)>,
    /// The relative weight threshold below which strategies were ignored.
    /// Which strategies count as "used" is a modeling choice, so every
    /// report carries the value it was computed with.
    pub used_threshold: f64,
}

impl WardropReport {
    pub fn is_epsilon_wardrop(&self, eps: f64) -> bool {
        self.epsilon_star <= eps + EQ_TOL
    }
}

/// Outcome of a two-flow inequality check: `slack` is right side minus left
/// side, and `holds` is `slack >= 0` with no tolerance applied. Callers that
/// expect exact equality should test `slack` against their own tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub holds: bool,
    pub slack: f64,
}

impl InequalityCheck {
    fn from_sides(lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        InequalityCheck {
            holds: slack >= 0.0,
            slack,
        }
    }
}

#[derive(Deserialize)]
struct RawNonatomicGame {
    facilities: Vec<Facility>,
    commodities: Vec<Commodity>,
}

/// A non-atomic congestion game over shared facilities.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawNonatomicGame")]
pub struct NonatomicGame {
    facilities: Vec<Facility>,
    commodities: Vec<Commodity>,
    /// Strategies as sorted dense facility indices, parallel to `commodities`.
    #[serde(skip)]
    dense: Vec<Vec<Vec<usize>>>,
    #[serde(skip)]
    index: BTreeMap<usize, usize>,
}

impl TryFrom<RawNonatomicGame> for NonatomicGame {
    type Error = Error;

    fn try_from(raw: RawNonatomicGame) -> Result<Self> {
        NonatomicGame::new(raw.facilities, raw.commodities)
    }
}

impl NonatomicGame {
    pub fn new(facilities: Vec<Facility>, commodities: Vec<Commodity>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (pos, f) in facilities.iter().enumerate() {
            if index.insert(f.id, pos).is_some() {
                return Err(Error::InvalidGame(format!(
                    "duplicate facility id {}",
                    f.id
                )));
            }
            if !(f.a >= 0.0) || !(f.b >= 0.0) {
                return Err(Error::InvalidGame(format!(
                    "facility {} needs nonnegative coefficients for fractional loads, got a = {}, b = {}",
                    f.id, f.a, f.b
                )));
            }
        }
        let mut canonical = Vec::with_capacity(commodities.len());
        let mut dense = Vec::with_capacity(commodities.len());
        for (i, commodity) in commodities.into_iter().enumerate() {
            if !(commodity.rate > 0.0) {
                return Err(Error::InvalidGame(format!(
                    "commodity {i} rate must be positive, got {}",
                    commodity.rate
                )));
            }
            if commodity.strategies.is_empty() {
                return Err(Error::InvalidGame(format!("commodity {i} has no strategy")));
            }
            let mut canon_strats = Vec::with_capacity(commodity.strategies.len());
            let mut dense_strats = Vec::with_capacity(commodity.strategies.len());
            for (s, mut ids) in commodity.strategies.into_iter().enumerate() {
                ids.sort_unstable();
                ids.dedup();
                if ids.is_empty() {
                    return Err(Error::InvalidGame(format!(
                        "commodity {i} strategy {s} is empty"
                    )));
                }
                let mut ix = Vec::with_capacity(ids.len());
                for id in &ids {
                    let pos = index.get(id).ok_or_else(|| {
                        Error::InvalidGame(format!(
                            "commodity {i} strategy {s} references unknown facility {id}"
                        ))
                    })?;
                    ix.push(*pos);
                }
                ix.sort_unstable();
                canon_strats.push(ids);
                dense_strats.push(ix);
            }
            canonical.push(Commodity {
                rate: commodity.rate,
                strategies: canon_strats,
            });
            dense.push(dense_strats);
        }
        Ok(NonatomicGame {
            facilities,
            commodities: canonical,
            dense,
            index,
        })
    }

    pub fn facilities(&self) -> &[Facility] {
        &self.facilities
    }

    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn facility_index(&self, id: usize) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Check arity, nonnegativity, and the per-commodity rate constraint.
    pub fn check_flow(&self, flow: &Flow) -> Result<()> {
        if flow.weights.len() != self.commodities.len() {
            return Err(Error::InvalidFlow(format!(
                "flow has {} commodities, game has {}",
                flow.weights.len(),
                self.commodities.len()
            )));
        }
        for (i, (w, c)) in flow.weights.iter().zip(&self.commodities).enumerate() {
            if w.len() != c.strategies.len() {
                return Err(Error::InvalidFlow(format!(
                    "commodity {i} has {} weights for {} strategies",
                    w.len(),
                    c.strategies.len()
                )));
            }
            if w.iter().any(|&x| !(x >= 0.0)) {
                return Err(Error::InvalidFlow(format!(
                    "commodity {i} has a negative strategy weight"
                )));
            }
            let total: f64 = w.iter().sum();
            if (total - c.rate).abs() > EQ_TOL {
                return Err(Error::InfeasibleFlow {
                    commodity: i,
                    rate: c.rate,
                    actual: total,
                });
            }
        }
        Ok(())
    }

    /// Facility loads induced by a feasible flow.
    pub fn facility_flows(&self, flow: &Flow) -> Result<FacilityFlow> {
        self.check_flow(flow)?;
        Ok(self.facility_flows_unchecked(flow))
    }

    pub(crate) fn facility_flows_unchecked(&self, flow: &Flow) -> FacilityFlow {
        let mut flows = vec![0.0; self.facilities.len()];
        for (i, w) in flow.weights.iter().enumerate() {
            for (s, &amount) in w.iter().enumerate() {
                if amount != 0.0 {
                    for &e in &self.dense[i][s] {
                        flows[e] += amount;
                    }
                }
            }
        }
        FacilityFlow { flows }
    }

    /// Latency of one strategy of one commodity at the loads of `flow`.
    pub fn strategy_latency(&self, flow: &Flow, commodity: usize, strategy: usize) -> Result<f64> {
        let ff = self.facility_flows(flow)?;
        self.check_strategy(commodity, strategy)?;
        Ok(self.strategy_latency_at(&ff, commodity, strategy))
    }

    fn check_strategy(&self, commodity: usize, strategy: usize) -> Result<()> {
        if commodity >= self.commodities.len() {
            return Err(Error::InvalidFlow(format!(
                "commodity {commodity} out of range"
            )));
        }
        if strategy >= self.commodities[commodity].strategies.len() {
            return Err(Error::InvalidFlow(format!(
                "commodity {commodity} strategy {strategy} out of range"
            )));
        }
        Ok(())
    }

    pub(crate) fn strategy_latency_at(
        &self,
        ff: &FacilityFlow,
        commodity: usize,
        strategy: usize,
    ) -> f64 {
        self.dense[commodity][strategy]
            .iter()
            .map(|&e| self.facilities[e].latency(ff.flows[e]))
            .sum()
    }

    /// Total delay `C(f) = sum_e l_e(f_e) f_e`, which also equals the
    /// weight-weighted sum of strategy latencies.
    pub fn social_cost(&self, flow: &Flow) -> Result<f64> {
        let ff = self.facility_flows(flow)?;
        Ok(self.social_cost_at(&ff))
    }

    pub(crate) fn social_cost_at(&self, ff: &FacilityFlow) -> f64 {
        self.facilities
            .iter()
            .enumerate()
            .map(|(e, f)| f.latency(ff.flows[e]) * ff.flows[e])
            .sum()
    }

    /// Least `eps` such that `flow` is an `eps`-equilibrium, using the default
    /// used-strategy threshold.
    pub fn flow_epsilon(&self, flow: &Flow) -> Result<WardropReport> {
        self.flow_epsilon_with(flow, USED_THRESHOLD)
    }

    /// As [`flow_epsilon`](Self::flow_epsilon) with an explicit threshold: a
    /// strategy counts as used when its weight exceeds
    /// `used_threshold * rate`.
    pub fn flow_epsilon_with(&self, flow: &Flow, used_threshold: f64) -> Result<WardropReport> {
        if !(used_threshold >= 0.0) {
            return Err(Error::Domain(format!(
                "used_threshold must be nonnegative, got {used_threshold}"
            )));
        }
        let ff = self.facility_flows(flow)?;
        let mut epsilon_star = 0.0_f64;
        let mut witness = None;
        for (i, commodity) in self.commodities.iter().enumerate() {
            let latencies: Vec<f64> = (0..commodity.strategies.len())
                .map(|s| self.strategy_latency_at(&ff, i, s))
                .collect();
            let (min_s, min_latency) =
                latencies
                    .iter()
                    .enumerate()
                    .fold((0usize, f64::INFINITY), |(bs, bl), (s, &l)| {
                        if l < bl {
                            (s, l)
                        } else {
                            (bs, bl)
                        }
                    });
            for (s, &w) in flow.weights[i].iter().enumerate() {
                if w <= used_threshold * commodity.rate {
                    continue;
                }
                let used = latencies[s];
                if used <= 0.0 {
                    continue;
                }
                let contribution = if min_latency <= 0.0 {
                    f64::INFINITY
                } else {
                    (used / min_latency - 1.0).max(0.0)
                };
                if contribution > epsilon_star {
                    epsilon_star = contribution;
                    witness = Some((i, s, min_s));
                }
            }
        }
        Ok(WardropReport {
            epsilon_star,
            witness,
            used_threshold,
        })
    }

    /// The `eps`-potential `sum_e (1/2 a_e f_e^2 + b_e f_e / (1+eps))`.
    pub fn potential(&self, flow: &Flow, eps: f64) -> Result<f64> {
        check_epsilon(eps)?;
        let ff = self.facility_flows(flow)?;
        Ok(self.potential_at(&ff, eps))
    }

    pub(crate) fn potential_at(&self, ff: &FacilityFlow, eps: f64) -> f64 {
        let inv = 1.0 / (1.0 + eps);
        self.facilities
            .iter()
            .enumerate()
            .map(|(e, f)| {
                let x = ff.flows[e];
                0.5 * f.a * x * x + f.b * x * inv
            })
            .sum()
    }

    /// The equilibrium inequality `C(f) <= (1+eps) sum_e l_e(f_e) f_alt_e`,
    /// valid for every feasible `f_alt` whenever `f` is an
    /// `eps`-equilibrium. The caller asserts that property; this only
    /// evaluates the two sides.
    pub fn bmw_check(&self, f: &Flow, f_alt: &Flow, eps: f64) -> Result<InequalityCheck> {
        check_epsilon(eps)?;
        let ff = self.facility_flows(f)?;
        let fa = self.facility_flows(f_alt)?;
        let lhs = self.social_cost_at(&ff);
        let rhs: f64 = (1.0 + eps)
            * self
                .facilities
                .iter()
                .enumerate()
                .map(|(e, fac)| fac.latency(ff.flows[e]) * fa.flows[e])
                .sum::<f64>();
        Ok(InequalityCheck::from_sides(lhs, rhs))
    }

    /// The variational inequality satisfied by a minimizer `f_min` of the
    /// `eps`-potential against any feasible `f_alt`:
    ///
    /// ```text
    /// sum_e (a f^2 + b f/(1+eps)) <= sum_e (a f f' + b f'/(1+eps))
    /// ```
    pub fn variational_check(
        &self,
        f_min: &Flow,
        f_alt: &Flow,
        eps: f64,
    ) -> Result<InequalityCheck> {
        check_epsilon(eps)?;
        let fm = self.facility_flows(f_min)?;
        let fa = self.facility_flows(f_alt)?;
        let inv = 1.0 / (1.0 + eps);
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for (e, f) in self.facilities.iter().enumerate() {
            let x = fm.flows[e];
            let y = fa.flows[e];
            lhs += f.a * x * x + f.b * x * inv;
            rhs += f.a * x * y + f.b * y * inv;
        }
        Ok(InequalityCheck::from_sides(lhs, rhs))
    }

    pub(crate) fn dense_strategies(&self, commodity: usize) -> &[Vec<usize>] {
        &self.dense[commodity]
    }
}
