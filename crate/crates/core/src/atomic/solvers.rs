//! Equilibrium computation for small atomic games: exhaustive enumeration
//! with exact anarchy/stability ratios, `eps`-best-response dynamics, and
//! `eps`-potential descent.
//!
//! Descent is sound by construction: a profile with no potential-decreasing
//! unilateral move is a local minimum of the `eps`-potential and therefore an
//! `eps`-equilibrium. The converse fails — some equilibria are not local
//! minima — so descent certifies an upper bound on the best equilibrium cost,
//! never the exact stability ratio.

use std::io::Write;

use serde::Serialize;

use crate::atomic::{check_epsilon, AtomicGame, LoadVector, Profile};
use crate::error::{Error, Result};
use crate::{BR_MARGIN, DESCENT_TOL, EQ_TOL};

/// Refuse to enumerate profile spaces larger than this by default.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Default step budget for the dynamics.
pub const DEFAULT_MAX_STEPS: usize = 100_000;

/// Everything exhaustive enumeration learns about a game at a given `eps`:
/// all `eps`-equilibria, the social optimum, and the exact anarchy and
/// stability ratios.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSet {
    pub epsilon: f64,
    pub equilibria: Vec<Profile>,
    pub optimum: Profile,
    pub opt_cost: f64,
    pub poa: f64,
    pub pos: f64,
}

/// Decode the lexicographic profile at `index` (player 0 most significant).
fn profile_at(game: &AtomicGame, mut index: u128) -> Profile {
    let mut choices = vec![0usize; game.num_players()];
    for i in (0..game.num_players()).rev() {
        let k = game.players()[i].len() as u128;
        choices[i] = (index % k) as usize;
        index /= k;
    }
    Profile::new(choices)
}

struct ScanResult {
    equilibria: Vec<Profile>,
    min_cost: f64,
    min_profile: Option<Profile>,
    min_eq_cost: f64,
    max_eq_cost: f64,
}

fn scan_range(game: &AtomicGame, eps: f64, range: std::ops::Range<u128>) -> ScanResult {
    let mut out = ScanResult {
        equilibria: Vec::new(),
        min_cost: f64::INFINITY,
        min_profile: None,
        min_eq_cost: f64::INFINITY,
        max_eq_cost: f64::NEG_INFINITY,
    };
    for index in range {
        let profile = profile_at(game, index);
        let loads = game
            .loads(&profile)
            .expect("enumerated profiles are valid by construction");
        let cost = game.social_cost_at(&loads);
        if cost < out.min_cost {
            out.min_cost = cost;
            out.min_profile = Some(profile.clone());
        }
        let report = game.profile_epsilon_at(&loads, &profile);
        if report.epsilon_star <= eps + EQ_TOL {
            out.min_eq_cost = out.min_eq_cost.min(cost);
            out.max_eq_cost = out.max_eq_cost.max(cost);
            out.equilibria.push(profile);
        }
    }
    out
}

/// Enumerate every profile, classify the `eps`-equilibria, and report exact
/// optimum, anarchy, and stability values. Uses the default cap and a single
/// thread.
pub fn brute_force(game: &AtomicGame, eps: f64) -> Result<EquilibriumSet> {
    brute_force_with(game, eps, DEFAULT_ENUMERATION_CAP, 1)
}

/// As [`brute_force`] with an explicit profile cap and worker count.
///
/// Workers split the profile index space into contiguous ranges and results
/// merge in range order, so the outcome is identical for every `jobs` value:
/// the reported optimum is always the lexicographically smallest minimizer.
pub fn brute_force_with(
    game: &AtomicGame,
    eps: f64,
    cap: u128,
    jobs: usize,
) -> Result<EquilibriumSet> {
    check_epsilon(eps)?;
    let total = game.profile_count();
    if total > cap {
        return Err(Error::EnumerationCap {
            profiles: total,
            cap,
        });
    }
    let jobs = jobs.max(1).min(total.max(1) as usize);
    let chunks: Vec<std::ops::Range<u128>> = (0..jobs as u128)
        .map(|j| {
            let lo = total * j / jobs as u128;
            let hi = total * (j + 1) / jobs as u128;
            lo..hi
        })
        .collect();
    let mut partials: Vec<ScanResult> = Vec::with_capacity(jobs);
    if jobs == 1 {
        partials.push(scan_range(game, eps, chunks[0].clone()));
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|range| scope.spawn(|| scan_range(game, eps, range.clone())))
                .collect();
            for handle in handles {
                partials.push(handle.join().expect("enumeration worker panicked"));
            }
        });
    }

    let mut equilibria = Vec::new();
    let mut min_cost = f64::INFINITY;
    let mut min_profile = None;
    let mut min_eq_cost = f64::INFINITY;
    let mut max_eq_cost = f64::NEG_INFINITY;
    for partial in partials {
        if partial.min_cost < min_cost {
            min_cost = partial.min_cost;
            min_profile = partial.min_profile;
        }
        min_eq_cost = min_eq_cost.min(partial.min_eq_cost);
        max_eq_cost = max_eq_cost.max(partial.max_eq_cost);
        equilibria.extend(partial.equilibria);
    }

    let optimum = min_profile.ok_or_else(|| Error::Internal("game has no profile".into()))?;
    if equilibria.is_empty() {
        // a pure eps-equilibrium always exists (the potential has a global
        // minimum), so an empty set can only be a bug
        return Err(Error::Internal(format!(
            "no eps-equilibrium found at eps = {eps}"
        )));
    }
    let (poa, pos) = if min_cost > 0.0 {
        (max_eq_cost / min_cost, min_eq_cost / min_cost)
    } else if max_eq_cost <= 0.0 {
        (1.0, 1.0)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(EquilibriumSet {
        epsilon: eps,
        equilibria,
        optimum,
        opt_cost: min_cost,
        poa,
        pos,
    })
}

/// Stability measured two ways: the exact enumerated value and the
/// descent-certified upper bound obtained by descending the potential from
/// the social optimum. The exact value never exceeds the certificate; the
/// certificate is cheap on games too large to enumerate the equilibria of.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityEstimate {
    pub exact: f64,
    pub certified_upper: f64,
}

/// Compute the stability ratio exactly (by enumeration) and as a descent
/// certificate (social cost of the descent terminal from the optimum over
/// the optimal cost).
pub fn stability_two_ways(game: &AtomicGame, eps: f64, cap: u128) -> Result<StabilityEstimate> {
    let set = brute_force_with(game, eps, cap, 1)?;
    let trace = potential_descent(game, &set.optimum, eps, DEFAULT_MAX_STEPS)?;
    if !trace.converged {
        return Err(Error::Nonconvergence {
            gap: f64::NAN,
            iterations: trace.steps.len(),
        });
    }
    let certified_upper = if set.opt_cost > 0.0 {
        game.social_cost(&trace.terminal)? / set.opt_cost
    } else {
        1.0
    };
    Ok(StabilityEstimate {
        exact: set.pos,
        certified_upper,
    })
}

/// Which player moves when several can improve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MoveRule {
    /// Lowest-index player with an `eps`-improving move.
    #[default]
    FirstImprover,
    /// Player with the largest current-to-best-deviation ratio; ties go to
    /// the lowest index.
    BestImprover,
}

impl std::str::FromStr for MoveRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(MoveRule::FirstImprover),
            "best" => Ok(MoveRule::BestImprover),
            other => Err(Error::Domain(format!(
                "unknown move rule {other:?}, expected \"first\" or \"best\""
            ))),
        }
    }
}

/// One recorded move of a dynamics run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceStep {
    pub mover: usize,
    pub from: usize,
    pub to: usize,
    /// Potential change of this move (closed form).
    pub delta: f64,
    /// Potential value after the move.
    pub potential: f64,
}

/// Full record of a dynamics run, ending in `terminal`.
#[derive(Debug, Clone, Serialize)]
pub struct DynamicsTrace {
    pub epsilon: f64,
    pub initial_potential: f64,
    pub steps: Vec<TraceStep>,
    pub terminal: Profile,
    /// False when the step budget ran out before the dynamics settled.
    pub converged: bool,
}

impl DynamicsTrace {
    /// Write the trace as `step,mover,delta,potential` rows.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "step,mover,delta,potential")?;
        writeln!(w, "0,,,{}", self.initial_potential)?;
        for (k, s) in self.steps.iter().enumerate() {
            writeln!(w, "{},{},{},{}", k + 1, s.mover, s.delta, s.potential)?;
        }
        Ok(())
    }
}

/// Find the best deviation for `player` and decide whether it is an
/// `eps`-improving move (strictly better than the `1+eps` slack with a small
/// relative margin, so float noise cannot ping-pong).
fn improving_move(
    game: &AtomicGame,
    loads: &LoadVector,
    choice: usize,
    player: usize,
    eps: f64,
) -> Option<(usize, f64, f64)> {
    let current_cost = game.deviation_cost_of(loads, player, choice, choice);
    if current_cost <= 0.0 {
        return None;
    }
    let mut best = current_cost;
    let mut best_alt = choice;
    for s in 0..game.players()[player].len() {
        if s == choice {
            continue;
        }
        let c = game.deviation_cost_of(loads, player, choice, s);
        if c < best {
            best = c;
            best_alt = s;
        }
    }
    if current_cost > (1.0 + eps) * best * (1.0 + BR_MARGIN) {
        Some((best_alt, current_cost, best))
    } else {
        None
    }
}

/// Run `eps`-best-response dynamics from `start`: a player moves only when
/// her cost exceeds `1+eps` times her best deviation, and always moves to
/// that best deviation. Termination is not guaranteed in general; hitting
/// `max_steps` is reported via `converged = false`, not as an error.
pub fn epsilon_best_response(
    game: &AtomicGame,
    start: &Profile,
    eps: f64,
    rule: MoveRule,
    max_steps: usize,
) -> Result<DynamicsTrace> {
    check_epsilon(eps)?;
    let mut profile = start.clone();
    let mut loads = game.loads(&profile)?;
    let mut trace = DynamicsTrace {
        epsilon: eps,
        initial_potential: game.potential_at(&loads, eps),
        steps: Vec::new(),
        terminal: profile.clone(),
        converged: false,
    };
    for _ in 0..max_steps {
        let mut chosen: Option<(usize, usize)> = None;
        match rule {
            MoveRule::FirstImprover => {
                for i in 0..game.num_players() {
                    if let Some((alt, _, _)) =
                        improving_move(game, &loads, profile.choices[i], i, eps)
                    {
                        chosen = Some((i, alt));
                        break;
                    }
                }
            }
            MoveRule::BestImprover => {
                let mut best_ratio = f64::NEG_INFINITY;
                for i in 0..game.num_players() {
                    if let Some((alt, cost, dev)) =
                        improving_move(game, &loads, profile.choices[i], i, eps)
                    {
                        let ratio = if dev > 0.0 { cost / dev } else { f64::INFINITY };
                        if ratio > best_ratio {
                            best_ratio = ratio;
                            chosen = Some((i, alt));
                        }
                    }
                }
            }
        }
        let Some((mover, to)) = chosen else {
            trace.converged = true;
            break;
        };
        let from = profile.choices[mover];
        let delta = game.potential_delta_at(&loads, mover, from, to, eps);
        game.apply_switch(&mut loads, mover, from, to);
        profile.choices[mover] = to;
        trace.steps.push(TraceStep {
            mover,
            from,
            to,
            delta,
            potential: game.potential_at(&loads, eps),
        });
    }
    if trace.steps.len() < max_steps && !trace.converged {
        trace.converged = true; // zero-step budget edge case
    }
    trace.terminal = profile;
    Ok(trace)
}

/// Descend the `eps`-potential from `start` by steepest unilateral moves
/// (ties broken by lowest player, then lowest strategy index). The terminal
/// profile of a completed run is a local minimum of the potential and hence
/// an `eps`-equilibrium.
pub fn potential_descent(
    game: &AtomicGame,
    start: &Profile,
    eps: f64,
    max_steps: usize,
) -> Result<DynamicsTrace> {
    check_epsilon(eps)?;
    let mut profile = start.clone();
    let mut loads = game.loads(&profile)?;
    let mut trace = DynamicsTrace {
        epsilon: eps,
        initial_potential: game.potential_at(&loads, eps),
        steps: Vec::new(),
        terminal: profile.clone(),
        converged: false,
    };
    for _ in 0..max_steps {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..game.num_players() {
            let choice = profile.choices[i];
            for s in 0..game.players()[i].len() {
                if s == choice {
                    continue;
                }
                let delta = game.potential_delta_at(&loads, i, choice, s, eps);
                if delta < -DESCENT_TOL && best.is_none_or(|(d, _, _)| delta < d) {
                    best = Some((delta, i, s));
                }
            }
        }
        let Some((delta, mover, to)) = best else {
            trace.converged = true;
            break;
        };
        let from = profile.choices[mover];
        game.apply_switch(&mut loads, mover, from, to);
        profile.choices[mover] = to;
        trace.steps.push(TraceStep {
            mover,
            from,
            to,
            delta,
            potential: game.potential_at(&loads, eps),
        });
    }
    if trace.steps.len() < max_steps && !trace.converged {
        trace.converged = true;
    }
    trace.terminal = profile;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::random::{random_atomic_game, random_profile, RandomGameParams};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn atomic_game(bundle: &crate::instances::InstanceBundle) -> &AtomicGame {
        match &bundle.game {
            crate::instances::GameForm::Atomic(g) => g,
            _ => panic!("expected an atomic game"),
        }
    }

    fn atomic_profile(a: &crate::instances::AssignmentForm) -> &Profile {
        match a {
            crate::instances::AssignmentForm::Profile(p) => p,
            _ => panic!("expected a profile"),
        }
    }

    #[test]
    fn single_player_game_has_trivial_equilibrium() {
        let game = AtomicGame::new(
            vec![
                crate::atomic::Facility {
                    id: 0,
                    a: 1.0,
                    b: 0.0,
                },
                crate::atomic::Facility {
                    id: 1,
                    a: 0.0,
                    b: 0.5,
                },
            ],
            vec![vec![vec![0], vec![1]]],
        )
        .unwrap();
        let set = brute_force(&game, 0.0).unwrap();
        assert_eq!(set.equilibria.len(), 1);
        assert_eq!(set.equilibria[0].choices, vec![1]);
        assert_eq!(set.optimum.choices, vec![1]);
        assert_eq!(set.poa, 1.0);
        assert_eq!(set.pos, 1.0);
    }

    #[test]
    fn tight_anarchy_instance_enumerates_to_five_halves() {
        let bundle = instances::atomic_poa_lb(0.0).unwrap();
        let game = atomic_game(&bundle);
        let set = brute_force(game, 0.0).unwrap();
        assert!((set.poa - 2.5).abs() <= 1e-9, "poa = {}", set.poa);
        assert!((set.opt_cost - 6.0).abs() <= 1e-9);
        let eq = atomic_profile(&bundle.equilibrium);
        assert!(set.equilibria.iter().any(|p| p == eq));
        assert_eq!(set.optimum, *atomic_profile(&bundle.optimum));
    }

    #[test]
    fn enumeration_cap_refuses_large_games() {
        // 2^40 profiles is far over a cap of 1000
        let facilities = vec![
            crate::atomic::Facility {
                id: 0,
                a: 1.0,
                b: 0.0,
            },
            crate::atomic::Facility {
                id: 1,
                a: 1.0,
                b: 0.0,
            },
        ];
        let players = vec![vec![vec![0], vec![1]]; 40];
        let game = AtomicGame::new(facilities, players).unwrap();
        match brute_force_with(&game, 0.0, 1000, 1) {
            Err(Error::EnumerationCap { profiles, cap }) => {
                assert_eq!(profiles, 1u128 << 40);
                assert_eq!(cap, 1000);
            }
            other => panic!("expected cap refusal, got {other:?}"),
        }
    }

    #[test]
    fn parallel_enumeration_matches_single_threaded() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let params = RandomGameParams::default();
        for _ in 0..25 {
            let game = random_atomic_game(&mut rng, &params);
            let eps = rng.gen_range(0.0..1.0);
            let single = brute_force_with(&game, eps, 1 << 20, 1).unwrap();
            let multi = brute_force_with(&game, eps, 1 << 20, 4).unwrap();
            assert_eq!(single.equilibria, multi.equilibria);
            assert_eq!(single.optimum, multi.optimum);
            assert_eq!(single.opt_cost, multi.opt_cost);
            assert_eq!(single.poa, multi.poa);
            assert_eq!(single.pos, multi.pos);
        }
    }

    #[test]
    fn every_listed_equilibrium_verifies() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let params = RandomGameParams::default();
        for _ in 0..50 {
            let game = random_atomic_game(&mut rng, &params);
            let eps = rng.gen_range(0.0..0.5);
            let set = brute_force(&game, eps).unwrap();
            assert!(set.poa >= set.pos - 1e-12);
            assert!(set.pos >= 1.0 - 1e-12);
            for p in &set.equilibria {
                assert!(game.profile_epsilon(p).unwrap().epsilon_star <= eps + EQ_TOL);
            }
        }
    }

    #[test]
    fn stability_is_exactly_one_for_eps_at_least_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let params = RandomGameParams::default();
        for _ in 0..50 {
            let game = random_atomic_game(&mut rng, &params);
            let set = brute_force(&game, 1.0).unwrap();
            assert_eq!(set.pos, 1.0, "optimum must be a 1-equilibrium");
        }
    }

    #[test]
    fn enumerated_anarchy_never_exceeds_closed_form_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let params = RandomGameParams::default();
        for _ in 0..100 {
            let game = random_atomic_game(&mut rng, &params);
            for eps in [0.0, 0.5, 1.0] {
                let set = brute_force(&game, eps).unwrap();
                let bound = crate::bounds::atomic_poa_bound(eps).unwrap();
                assert!(
                    set.poa <= bound + 1e-9,
                    "poa {} exceeds bound {bound} at eps={eps}",
                    set.poa
                );
            }
        }
    }

    #[test]
    fn best_response_from_equilibrium_takes_no_step() {
        let bundle = instances::atomic_poa_lb(0.5).unwrap();
        let game = atomic_game(&bundle);
        let eq = atomic_profile(&bundle.equilibrium);
        let trace = epsilon_best_response(game, eq, 0.5, MoveRule::FirstImprover, 1000).unwrap();
        assert!(trace.converged);
        assert!(trace.steps.is_empty());
        assert_eq!(trace.terminal, *eq);
    }

    #[test]
    fn best_response_terminates_on_two_facility_game() {
        // two players choosing between a load-linear and a constant facility
        let game = AtomicGame::new(
            vec![
                crate::atomic::Facility {
                    id: 0,
                    a: 1.0,
                    b: 0.0,
                },
                crate::atomic::Facility {
                    id: 1,
                    a: 0.0,
                    b: 1.5,
                },
            ],
            vec![vec![vec![0], vec![1]]; 2],
        )
        .unwrap();
        for rule in [MoveRule::FirstImprover, MoveRule::BestImprover] {
            let trace =
                epsilon_best_response(&game, &Profile::new(vec![0, 0]), 0.0, rule, 1000).unwrap();
            assert!(trace.converged);
            let report = game.profile_epsilon(&trace.terminal).unwrap();
            assert!(report.is_epsilon_nash(0.0), "terminal not an equilibrium");
        }
    }

    #[test]
    fn best_response_from_tight_instance_optimum_ends_verified() {
        for eps in [0.0, 0.4, 1.0] {
            let bundle = instances::atomic_poa_lb(eps).unwrap();
            let game = atomic_game(&bundle);
            let start = atomic_profile(&bundle.optimum);
            let trace =
                epsilon_best_response(game, start, eps, MoveRule::FirstImprover, 10_000).unwrap();
            assert!(trace.converged);
            let report = game.profile_epsilon(&trace.terminal).unwrap();
            assert!(
                report.is_epsilon_nash(eps),
                "terminal epsilon {} at eps {eps}",
                report.epsilon_star
            );
        }
    }

    #[test]
    fn descent_from_potential_minimizer_takes_no_step() {
        let game = AtomicGame::new(
            vec![
                crate::atomic::Facility {
                    id: 0,
                    a: 1.0,
                    b: 0.0,
                },
                crate::atomic::Facility {
                    id: 1,
                    a: 3.0,
                    b: 0.0,
                },
            ],
            vec![vec![vec![0], vec![1]]],
        )
        .unwrap();
        // the global potential minimizer at eps = 0 is facility 0
        let trace = potential_descent(&game, &Profile::new(vec![0]), 0.0, 100).unwrap();
        assert!(trace.converged);
        assert!(trace.steps.is_empty());
        assert!(game
            .profile_epsilon(&trace.terminal)
            .unwrap()
            .is_epsilon_nash(0.0));
    }

    #[test]
    fn descent_terminals_verify_across_random_suite() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let params = RandomGameParams::default();
        for _ in 0..300 {
            let game = random_atomic_game(&mut rng, &params);
            let start = random_profile(&mut rng, &game);
            let eps = rng.gen_range(0.0..2.0);
            let trace = potential_descent(&game, &start, eps, DEFAULT_MAX_STEPS).unwrap();
            assert!(trace.converged, "descent must reach a local minimum");
            let report = game.profile_epsilon(&trace.terminal).unwrap();
            assert!(
                report.epsilon_star <= eps + EQ_TOL,
                "descent terminal has epsilon {} > {eps}",
                report.epsilon_star
            );
        }
    }

    #[test]
    fn descent_potential_strictly_decreases() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let params = RandomGameParams::default();
        for _ in 0..100 {
            let game = random_atomic_game(&mut rng, &params);
            let start = random_profile(&mut rng, &game);
            let eps = rng.gen_range(0.0..1.5);
            let trace = potential_descent(&game, &start, eps, DEFAULT_MAX_STEPS).unwrap();
            let mut previous = trace.initial_potential;
            for step in &trace.steps {
                assert!(
                    step.potential < previous - DESCENT_TOL / 2.0,
                    "potential failed to decrease: {} -> {}",
                    previous,
                    step.potential
                );
                previous = step.potential;
            }
        }
    }

    #[test]
    fn descent_from_optimum_certifies_one_equilibrium() {
        // at eps = 1 the social optimum is already a local potential minimum
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let params = RandomGameParams::default();
        for _ in 0..50 {
            let game = random_atomic_game(&mut rng, &params);
            let set = brute_force(&game, 1.0).unwrap();
            let trace = potential_descent(&game, &set.optimum, 1.0, DEFAULT_MAX_STEPS).unwrap();
            let report = game.profile_epsilon(&trace.terminal).unwrap();
            assert!(report.is_epsilon_nash(1.0));
        }
    }

    #[test]
    fn descent_certificate_upper_bounds_exact_stability() {
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let params = RandomGameParams::default();
        for _ in 0..100 {
            let game = random_atomic_game(&mut rng, &params);
            let eps = rng.gen_range(0.0..1.0);
            let estimate = stability_two_ways(&game, eps, 1 << 20).unwrap();
            assert!(
                estimate.exact <= estimate.certified_upper + 1e-9,
                "exact {} above certificate {}",
                estimate.exact,
                estimate.certified_upper
            );
        }
    }

    #[test]
    fn some_equilibrium_is_not_a_potential_local_minimum() {
        // Descent certifies equilibria but not all of them: search small
        // random games for an equilibrium that still has a potential-
        // decreasing move. Its existence is why descent only upper-bounds
        // the best-equilibrium cost.
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let params = RandomGameParams::default();
        let eps = 0.5;
        let mut found = false;
        'outer: for _ in 0..400 {
            let game = random_atomic_game(&mut rng, &params);
            let set = brute_force(&game, eps).unwrap();
            for eq in &set.equilibria {
                let loads = game.loads(eq).unwrap();
                for i in 0..game.num_players() {
                    for s in 0..game.players()[i].len() {
                        if s != eq.choices[i]
                            && game.potential_delta_at(&loads, i, eq.choices[i], s, eps) < -1e-9
                        {
                            found = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
        assert!(
            found,
            "expected an eps-equilibrium that is not a potential local minimum"
        );
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let game = AtomicGame::new(
            vec![
                crate::atomic::Facility {
                    id: 0,
                    a: 2.0,
                    b: 0.0,
                },
                crate::atomic::Facility {
                    id: 1,
                    a: 1.0,
                    b: 0.0,
                },
            ],
            vec![vec![vec![0], vec![1]]],
        )
        .unwrap();
        let trace = potential_descent(&game, &Profile::new(vec![0]), 0.0, 100).unwrap();
        assert_eq!(trace.steps.len(), 1);
        let mut csv = Vec::new();
        trace.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("step,mover,delta,potential"));
        assert_eq!(lines.count(), 2);
    }
}
