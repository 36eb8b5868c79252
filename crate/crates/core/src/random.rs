//! Seeded generators for small random games, profiles, and flows.
//!
//! Everything here is driven by a caller-supplied RNG so that test suites and
//! the reproduction report are bit-reproducible from a single seed.

use rand::Rng;

use crate::atomic::{AtomicGame, Facility, Profile};
use crate::nonatomic::{Commodity, Flow, NonatomicGame};

/// Shape of the random atomic games used by the randomized suites:
/// small player/strategy/facility counts and small integer coefficients.
#[derive(Debug, Clone, Copy)]
pub struct RandomGameParams {
    pub max_players: usize,
    pub max_strategies: usize,
    pub max_facilities: usize,
    /// `a` and `b` are drawn uniformly from `0..=max_coefficient`.
    pub max_coefficient: u32,
}

impl Default for RandomGameParams {
    fn default() -> Self {
        RandomGameParams {
            max_players: 3,
            max_strategies: 3,
            max_facilities: 6,
            max_coefficient: 3,
        }
    }
}

/// A random atomic game with integer latency coefficients.
///
/// Integer coefficients keep every strategy cost an exact integer, so a cost
/// is either 0 or at least 1. That gap is what makes the randomized
/// descent-soundness suites immune to rounding at the verifier tolerance.
pub fn random_atomic_game<R: Rng>(rng: &mut R, params: &RandomGameParams) -> AtomicGame {
    let num_facilities = rng.gen_range(1..=params.max_facilities);
    let facilities: Vec<Facility> = (0..num_facilities)
        .map(|id| Facility {
            id,
            a: f64::from(rng.gen_range(0..=params.max_coefficient)),
            b: f64::from(rng.gen_range(0..=params.max_coefficient)),
        })
        .collect();
    let num_players = rng.gen_range(1..=params.max_players);
    let players = (0..num_players)
        .map(|_| {
            let num_strategies = rng.gen_range(1..=params.max_strategies);
            (0..num_strategies)
                .map(|_| random_subset(rng, num_facilities))
                .collect()
        })
        .collect();
    AtomicGame::new(facilities, players).expect("randomly generated game is valid by construction")
}

fn random_subset<R: Rng>(rng: &mut R, num_facilities: usize) -> Vec<usize> {
    let size = rng.gen_range(1..=num_facilities);
    let mut ids: Vec<usize> = (0..num_facilities).collect();
    for i in 0..size {
        let j = rng.gen_range(i..num_facilities);
        ids.swap(i, j);
    }
    ids.truncate(size);
    ids
}

/// A uniformly random pure profile for `game`.
pub fn random_profile<R: Rng>(rng: &mut R, game: &AtomicGame) -> Profile {
    Profile::new(
        game.players()
            .iter()
            .map(|s| rng.gen_range(0..s.len()))
            .collect(),
    )
}

/// Shape of the random non-atomic games used by the randomized suites.
#[derive(Debug, Clone, Copy)]
pub struct RandomNonatomicParams {
    pub max_commodities: usize,
    pub max_strategies: usize,
    pub max_facilities: usize,
    pub max_coefficient: u32,
}

impl Default for RandomNonatomicParams {
    fn default() -> Self {
        RandomNonatomicParams {
            max_commodities: 3,
            max_strategies: 3,
            max_facilities: 6,
            max_coefficient: 3,
        }
    }
}

/// A random non-atomic game with unit-scale rates.
pub fn random_nonatomic_game<R: Rng>(rng: &mut R, params: &RandomNonatomicParams) -> NonatomicGame {
    let num_facilities = rng.gen_range(1..=params.max_facilities);
    let facilities: Vec<Facility> = (0..num_facilities)
        .map(|id| Facility {
            id,
            a: f64::from(rng.gen_range(0..=params.max_coefficient)),
            b: f64::from(rng.gen_range(0..=params.max_coefficient)),
        })
        .collect();
    let num_commodities = rng.gen_range(1..=params.max_commodities);
    let commodities = (0..num_commodities)
        .map(|_| Commodity {
            rate: rng.gen_range(1..=4) as f64 * 0.5,
            strategies: {
                let num_strategies = rng.gen_range(1..=params.max_strategies);
                (0..num_strategies)
                    .map(|_| random_subset(rng, num_facilities))
                    .collect()
            },
        })
        .collect();
    NonatomicGame::new(facilities, commodities)
        .expect("randomly generated game is valid by construction")
}

/// A random feasible flow: per commodity, uniform weights normalized to the rate.
pub fn random_flow<R: Rng>(rng: &mut R, game: &NonatomicGame) -> Flow {
    let weights = game
        .commodities()
        .iter()
        .map(|c| {
            let raw: Vec<f64> = (0..c.strategies.len())
                .map(|_| rng.gen_range(0.0..1.0) + 1e-6)
                .collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|w| w / total * c.rate).collect()
        })
        .collect();
    Flow { weights }
}
