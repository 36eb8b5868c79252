//! Convex minimization over the product of scaled strategy simplices by
//! conditional-gradient (Frank-Wolfe) iteration.
//!
//! Both objectives are convex quadratics of the facility flows:
//!
//! * the `eps`-potential, whose minimizers are `eps`-equilibria, and
//! * the social cost, whose minimizers are optima.
//!
//! The linear oracle picks, per commodity, the strategy with the smallest
//! gradient sum (ties to the lowest index); the step uses the exact quadratic
//! line search clipped to `[0, 1]`; the loop stops when the duality gap
//! `<grad, current - vertex>` drops to the tolerance. The gap is a certified
//! upper bound on the objective suboptimality at every iterate.

use serde::Serialize;

use crate::atomic::check_epsilon;
use crate::error::{Error, Result};
use crate::nonatomic::{FacilityFlow, Flow, NonatomicGame};

/// What to minimize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// The `eps`-potential; a minimizer is an `eps`-equilibrium.
    Potential { eps: f64 },
    /// Total delay; a minimizer is a social optimum.
    SocialCost,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Stop when the duality gap falls to this value.
    pub tol: f64,
    pub max_iter: usize,
    /// Record `(gap, objective)` per iteration.
    pub record_trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_iter: 100_000,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub gap: f64,
    pub objective: f64,
}

/// Outcome of a conditional-gradient run.
#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub flow: Flow,
    pub objective: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Some facility in play has zero slope, so the objective is not strictly
    /// convex in the facility flows and the minimizer need not be unique in
    /// strategy space.
    pub nonunique_hint: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TracePoint>>,
}

struct Gradient {
    per_facility: Vec<f64>,
}

impl Objective {
    fn validate(&self) -> Result<()> {
        if let Objective::Potential { eps } = self {
            check_epsilon(*eps)?;
        }
        Ok(())
    }

    fn value(&self, game: &NonatomicGame, ff: &FacilityFlow) -> f64 {
        match *self {
            Objective::Potential { eps } => game.potential_at(ff, eps),
            Objective::SocialCost => game.social_cost_at(ff),
        }
    }

    fn gradient(&self, game: &NonatomicGame, ff: &FacilityFlow) -> Gradient {
        let per_facility = match *self {
            Objective::Potential { eps } => {
                let inv = 1.0 / (1.0 + eps);
                game.facilities()
                    .iter()
                    .enumerate()
                    .map(|(e, f)| f.a * ff.get(e) + f.b * inv)
                    .collect()
            }
            Objective::SocialCost => game
                .facilities()
                .iter()
                .enumerate()
                .map(|(e, f)| 2.0 * f.a * ff.get(e) + f.b)
                .collect(),
        };
        Gradient { per_facility }
    }

    /// Quadratic coefficient of `t -> value(flow + t * direction)`.
    fn curvature(&self, game: &NonatomicGame, direction: &[f64]) -> f64 {
        let sum: f64 = game
            .facilities()
            .iter()
            .enumerate()
            .map(|(e, f)| f.a * direction[e] * direction[e])
            .sum();
        match *self {
            Objective::Potential { .. } => 0.5 * sum,
            Objective::SocialCost => sum,
        }
    }
}

/// Minimize `objective` over the feasible flows of `game`.
///
/// Starts from the uniform split of every commodity. Fails only on invalid
/// input; running out of iterations is reported via `converged = false` with
/// the best iterate.
pub fn minimize(
    game: &NonatomicGame,
    objective: Objective,
    options: &SolveOptions,
) -> Result<SolveResult> {
    objective.validate()?;
    if !(options.tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {}",
            options.tol
        )));
    }
    let mut weights: Vec<Vec<f64>> = game
        .commodities()
        .iter()
        .map(|c| vec![c.rate / c.strategies.len() as f64; c.strategies.len()])
        .collect();
    let mut trace = options.record_trace.then(Vec::new);
    let mut iterations = 0;
    let mut converged = false;
    let mut gap;

    loop {
        let flow = Flow {
            weights: weights.clone(),
        };
        let ff = game.facility_flows_unchecked(&flow);
        let grad = objective.gradient(game, &ff);

        // linear oracle per commodity + the duality gap
        let mut vertex_choice = vec![0usize; game.commodities().len()];
        gap = 0.0;
        for (i, commodity) in game.commodities().iter().enumerate() {
            let scores: Vec<f64> = game
                .dense_strategies(i)
                .iter()
                .map(|s| s.iter().map(|&e| grad.per_facility[e]).sum())
                .collect();
            let mut best = 0usize;
            for (s, &score) in scores.iter().enumerate() {
                if score < scores[best] {
                    best = s;
                }
            }
            vertex_choice[i] = best;
            let current: f64 = weights[i].iter().zip(&scores).map(|(&w, &g)| w * g).sum();
            gap += current - commodity.rate * scores[best];
        }
        if let Some(t) = trace.as_mut() {
            t.push(TracePoint {
                gap,
                objective: objective.value(game, &ff),
            });
        }
        if gap <= options.tol {
            converged = true;
            break;
        }
        if iterations >= options.max_iter {
            break;
        }

        // exact line search toward the oracle vertex
        let mut direction = vec![0.0; game.facilities().len()];
        for (e, &f) in ff.as_slice().iter().enumerate() {
            direction[e] = -f;
        }
        for (i, commodity) in game.commodities().iter().enumerate() {
            for &e in &game.dense_strategies(i)[vertex_choice[i]] {
                direction[e] += commodity.rate;
            }
        }
        let quadratic = objective.curvature(game, &direction);
        let linear = -gap;
        let t = if quadratic > 0.0 {
            (-linear / (2.0 * quadratic)).clamp(0.0, 1.0)
        } else if linear < 0.0 {
            1.0
        } else {
            0.0
        };
        for (i, commodity) in game.commodities().iter().enumerate() {
            for (s, w) in weights[i].iter_mut().enumerate() {
                let target = if s == vertex_choice[i] {
                    commodity.rate
                } else {
                    0.0
                };
                *w = (1.0 - t) * *w + t * target;
            }
        }
        iterations += 1;
    }

    let flow = Flow { weights };
    let ff = game.facility_flows_unchecked(&flow);
    let nonunique_hint = game
        .commodities()
        .iter()
        .enumerate()
        .flat_map(|(i, _)| game.dense_strategies(i).iter().flatten())
        .any(|&e| game.facilities()[e].a == 0.0);
    Ok(SolveResult {
        objective: objective.value(game, &ff),
        duality_gap: gap,
        iterations,
        converged,
        nonunique_hint,
        trace,
        flow,
    })
}

/// Certified stability data: the cost of the potential minimizer (an
/// `eps`-equilibrium) over the optimal cost. This upper-bounds the cost of
/// the best equilibrium; it makes no claim in the other direction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PosCertificate {
    pub equilibrium_cost: f64,
    pub opt_cost: f64,
    pub ratio: f64,
}

pub fn pos_certificate(game: &NonatomicGame, eps: f64, tol: f64) -> Result<PosCertificate> {
    let options = SolveOptions {
        tol,
        ..SolveOptions::default()
    };
    let equilibrium = minimize(game, Objective::Potential { eps }, &options)?;
    if !equilibrium.converged {
        return Err(Error::Nonconvergence {
            gap: equilibrium.duality_gap,
            iterations: equilibrium.iterations,
        });
    }
    let optimum = minimize(game, Objective::SocialCost, &options)?;
    if !optimum.converged {
        return Err(Error::Nonconvergence {
            gap: optimum.duality_gap,
            iterations: optimum.iterations,
        });
    }
    let equilibrium_cost = game.social_cost(&equilibrium.flow)?;
    let opt_cost = game.social_cost(&optimum.flow)?;
    if opt_cost <= 0.0 {
        return Err(Error::Construction(
            "optimal cost is zero; the stability ratio is undefined".into(),
        ));
    }
    Ok(PosCertificate {
        equilibrium_cost,
        opt_cost,
        ratio: equilibrium_cost / opt_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds;
    use crate::instances::{self, AssignmentForm, GameForm};
    use crate::nonatomic::{Commodity, Facility};
    use crate::random::{random_flow, random_nonatomic_game, RandomNonatomicParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pigou(eps: f64) -> NonatomicGame {
        instances::pigou_game(eps).unwrap()
    }

    #[test]
    fn pigou_potential_minimizer_is_all_lower() {
        for eps in [0.0, 0.3, 0.9] {
            let game = pigou(eps);
            let result = minimize(
                &game,
                Objective::Potential { eps },
                &SolveOptions::default(),
            )
            .unwrap();
            assert!(result.converged);
            assert!((result.flow.weights[0][0] - 1.0).abs() <= 1e-9);
            assert!((result.objective - 0.5).abs() <= 1e-9);
            let report = game.flow_epsilon(&result.flow).unwrap();
            assert!(report.epsilon_star <= eps + 1e-6);
        }
    }

    #[test]
    fn pigou_social_optimum_is_the_split() {
        for eps in [0.0, 0.5] {
            let game = pigou(eps);
            let result = minimize(&game, Objective::SocialCost, &SolveOptions::default()).unwrap();
            assert!(result.converged);
            let expected_cost = (1.0 + eps) * (3.0 - eps) / 4.0;
            assert!(
                (result.objective - expected_cost).abs() <= 1e-9,
                "cost {} vs {expected_cost}",
                result.objective
            );
            assert!((result.flow.weights[0][0] - (1.0 + eps) / 2.0).abs() <= 1e-7);
        }
    }

    #[test]
    fn single_strategy_game_solves_immediately() {
        let game = NonatomicGame::new(
            vec![Facility {
                id: 0,
                a: 1.0,
                b: 1.0,
            }],
            vec![Commodity {
                rate: 2.0,
                strategies: vec![vec![0]],
            }],
        )
        .unwrap();
        let result = minimize(&game, Objective::SocialCost, &SolveOptions::default()).unwrap();
        assert!(result.converged);
        assert!(result.iterations <= 1);
        assert_eq!(result.flow.weights, vec![vec![2.0]]);
    }

    #[test]
    fn all_constant_objective_takes_one_oracle_step() {
        // both facilities have zero slope: the objective is linear
        let game = NonatomicGame::new(
            vec![
                Facility {
                    id: 0,
                    a: 0.0,
                    b: 2.0,
                },
                Facility {
                    id: 1,
                    a: 0.0,
                    b: 1.0,
                },
            ],
            vec![Commodity {
                rate: 1.0,
                strategies: vec![vec![0], vec![1]],
            }],
        )
        .unwrap();
        let result = minimize(&game, Objective::SocialCost, &SolveOptions::default()).unwrap();
        assert!(result.converged);
        assert!(result.iterations <= 1);
        assert_eq!(result.flow.weights[0][1], 1.0);
        assert!(result.nonunique_hint);
    }

    #[test]
    fn objective_is_monotone_and_gap_bounds_suboptimality() {
        let eps = 0.4;
        let game = pigou(eps);
        let options = SolveOptions {
            record_trace: true,
            ..SolveOptions::default()
        };
        let result = minimize(&game, Objective::SocialCost, &options).unwrap();
        let trace = result.trace.as_ref().unwrap();
        let optimum = (1.0 + eps) * (3.0 - eps) / 4.0;
        let mut previous = f64::INFINITY;
        for point in trace {
            assert!(point.objective <= previous + 1e-12, "objective increased");
            assert!(
                point.gap >= point.objective - optimum - 1e-9,
                "gap {} under-reports suboptimality {}",
                point.gap,
                point.objective - optimum
            );
            previous = point.objective;
        }
    }

    #[test]
    fn potential_minimizers_verify_on_lower_bound_families() {
        for instance_eps in [0.0, 0.5, 1.0, 2.0] {
            let bundle = instances::nonatomic_poa_lb(instance_eps).unwrap();
            let GameForm::Nonatomic(game) = &bundle.game else {
                panic!("expected nonatomic game")
            };
            for k in 0..=10 {
                let eps = f64::from(k) / 10.0;
                let result =
                    minimize(game, Objective::Potential { eps }, &SolveOptions::default()).unwrap();
                assert!(result.converged, "instance {instance_eps} at eps {eps}");
                let report = game.flow_epsilon(&result.flow).unwrap();
                assert!(
                    report.epsilon_star <= eps + 1e-6,
                    "instance {instance_eps}: solver flow has epsilon {} at eps {eps}",
                    report.epsilon_star
                );
            }
        }
    }

    #[test]
    fn optimum_matches_refined_grid_search_on_small_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let params = RandomNonatomicParams {
            max_commodities: 3,
            max_strategies: 2,
            max_facilities: 5,
            max_coefficient: 3,
        };
        for _ in 0..20 {
            let game = random_nonatomic_game(&mut rng, &params);
            let result = minimize(&game, Objective::SocialCost, &SolveOptions::default()).unwrap();
            let grid_cost = grid_search_cost(&game);
            assert!(
                result.objective <= grid_cost + 1e-4,
                "solver {} vs grid {grid_cost}",
                result.objective
            );
            assert!(
                result.objective >= grid_cost - 1e-4,
                "grid beat the solver: {} vs {grid_cost}",
                result.objective
            );
        }
    }

    /// Refined full-grid search over per-commodity splits, for games where
    /// every commodity has at most 2 strategies. Successive refinement is
    /// valid here because the objective is convex: the continuous minimizer
    /// lies within one cell of the discrete argmin at every level.
    fn grid_search_cost(game: &NonatomicGame) -> f64 {
        let k = game.commodities().len();
        let mut centers = vec![0.5_f64; k];
        let mut radius = 0.5_f64;
        let mut best_cost = f64::INFINITY;
        for _ in 0..4 {
            let mut best_point = centers.clone();
            let steps = 11usize;
            let mut counter = vec![0usize; k];
            loop {
                let point: Vec<f64> = (0..k)
                    .map(|i| {
                        let lo = (centers[i] - radius).max(0.0);
                        let hi = (centers[i] + radius).min(1.0);
                        lo + (hi - lo) * counter[i] as f64 / (steps - 1) as f64
                    })
                    .collect();
                let flow = Flow {
                    weights: game
                        .commodities()
                        .iter()
                        .enumerate()
                        .map(|(i, c)| {
                            if c.strategies.len() == 1 {
                                vec![c.rate]
                            } else {
                                vec![point[i] * c.rate, (1.0 - point[i]) * c.rate]
                            }
                        })
                        .collect(),
                };
                let cost = game.social_cost(&flow).unwrap();
                if cost < best_cost {
                    best_cost = cost;
                    best_point = point;
                }
                // odometer
                let mut i = 0;
                loop {
                    if i == k {
                        break;
                    }
                    counter[i] += 1;
                    if counter[i] < steps {
                        break;
                    }
                    counter[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
            centers = best_point;
            radius /= 4.0;
        }
        best_cost
    }

    #[test]
    fn stability_certificate_on_pigou_meets_the_bound() {
        let game = pigou(0.0);
        let cert = pos_certificate(&game, 0.0, 1e-8).unwrap();
        assert!((cert.ratio - 4.0 / 3.0).abs() <= 1e-6);
        assert!((cert.opt_cost - 0.75).abs() <= 1e-8);

        // at eps = 1 the bound collapses to 1 and so does the ratio
        let game = pigou(1.0);
        let cert = pos_certificate(&game, 1.0, 1e-8).unwrap();
        assert!((cert.ratio - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn stability_certificate_respects_bound_on_families() {
        for eps in [0.0, 0.25, 0.5, 0.75] {
            let bundle = instances::nonatomic_poa_lb(eps).unwrap();
            let GameForm::Nonatomic(game) = &bundle.game else {
                panic!("expected nonatomic game")
            };
            let cert = pos_certificate(game, eps, 1e-8).unwrap();
            let bound = bounds::nonatomic_pos_bound(eps).unwrap();
            assert!(
                cert.ratio <= bound + 1e-6,
                "eps {eps}: ratio {} above bound {bound}",
                cert.ratio
            );
        }
    }

    #[test]
    fn variational_inequality_holds_for_solver_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let params = RandomNonatomicParams::default();
        for _ in 0..20 {
            let game = random_nonatomic_game(&mut rng, &params);
            let eps = 0.5;
            let result = minimize(
                &game,
                Objective::Potential { eps },
                &SolveOptions::default(),
            )
            .unwrap();
            for _ in 0..20 {
                let alt = random_flow(&mut rng, &game);
                let check = game.variational_check(&result.flow, &alt, eps).unwrap();
                assert!(
                    check.slack >= -1e-6,
                    "variational slack {} on solver output",
                    check.slack
                );
            }
        }
    }

    #[test]
    fn rescaled_rates_still_solve_to_equilibrium() {
        // scaling every rate by s scales facility flows by s; the minimizer
        // of the rescaled game must again verify at the same eps
        let eps = 0.3;
        let bundle = instances::nonatomic_poa_lb(0.5).unwrap();
        let GameForm::Nonatomic(game) = &bundle.game else {
            panic!("expected nonatomic game")
        };
        let AssignmentForm::Flow(designated) = &bundle.equilibrium else {
            panic!("expected flow")
        };
        for s in [0.5, 2.0, 7.5] {
            let scaled = NonatomicGame::new(
                game.facilities().to_vec(),
                game.commodities()
                    .iter()
                    .map(|c| Commodity {
                        rate: c.rate * s,
                        strategies: c.strategies.clone(),
                    })
                    .collect(),
            )
            .unwrap();
            // facility flows scale linearly with the designated flow
            let scaled_flow = Flow {
                weights: designated
                    .weights
                    .iter()
                    .map(|w| w.iter().map(|&x| x * s).collect())
                    .collect(),
            };
            let base = game.facility_flows(designated).unwrap();
            let lifted = scaled.facility_flows(&scaled_flow).unwrap();
            for e in 0..game.facilities().len() {
                assert!((lifted.get(e) - s * base.get(e)).abs() <= 1e-9 * s.max(1.0));
            }
            let base_cost = game.social_cost(designated).unwrap();
            let scaled_cost = scaled.social_cost(&scaled_flow).unwrap();
            assert!(scaled_cost >= s.min(s * s) * base_cost - 1e-9);
            assert!(scaled_cost <= s.max(s * s) * base_cost + 1e-9);
            let result = minimize(
                &scaled,
                Objective::Potential { eps },
                &SolveOptions::default(),
            )
            .unwrap();
            assert!(result.converged);
            let report = scaled.flow_epsilon(&result.flow).unwrap();
            assert!(report.epsilon_star <= eps + 1e-6);
        }
    }
}
