use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ecl_core::atomic::solvers::{brute_force_with, potential_descent};
use ecl_core::instances::{self, AssignmentForm, GameForm};
use ecl_core::nonatomic::solvers::{minimize, Objective, SolveOptions};
use ecl_core::random::{random_atomic_game, random_profile, RandomGameParams};

fn bench_verifier(c: &mut Criterion) {
    let mut group = c.benchmark_group("profile_epsilon");
    for n in [100usize, 200, 400] {
        let lambda = instances::pos_best_lambda(0.0, n);
        let bundle = instances::atomic_pos_lb(0.0, n, lambda, 1e-9).unwrap();
        let GameForm::Atomic(game) = &bundle.game else {
            unreachable!()
        };
        let AssignmentForm::Profile(profile) = &bundle.equilibrium else {
            unreachable!()
        };
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| game.profile_epsilon(black_box(profile)).unwrap())
        });
    }
    group.finish();
}

fn bench_brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force");
    for n in [8usize, 12, 16] {
        let bundle = instances::two_links(n, 0.5).unwrap();
        let GameForm::Atomic(game) = &bundle.game else {
            unreachable!()
        };
        group.bench_with_input(BenchmarkId::new("two_links", n), &n, |b, _| {
            b.iter(|| brute_force_with(black_box(game), 0.5, 1 << 30, 1).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("two_links_4_jobs", n), &n, |b, _| {
            b.iter(|| brute_force_with(black_box(game), 0.5, 1 << 30, 4).unwrap())
        });
    }
    group.finish();
}

fn bench_descent(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let params = RandomGameParams {
        max_players: 6,
        max_strategies: 4,
        max_facilities: 10,
        max_coefficient: 3,
    };
    let cases: Vec<_> = (0..32)
        .map(|_| {
            let game = random_atomic_game(&mut rng, &params);
            let start = random_profile(&mut rng, &game);
            (game, start)
        })
        .collect();
    c.bench_function("potential_descent_random_batch", |b| {
        b.iter(|| {
            for (game, start) in &cases {
                potential_descent(black_box(game), start, 0.3, 10_000).unwrap();
            }
        })
    });
}

fn bench_frank_wolfe(c: &mut Criterion) {
    let mut group = c.benchmark_group("frank_wolfe");
    for eps in [0.0, 0.5, 2.0] {
        let bundle = instances::nonatomic_poa_lb(eps).unwrap();
        let GameForm::Nonatomic(game) = &bundle.game else {
            unreachable!()
        };
        group.bench_with_input(
            BenchmarkId::new("potential", format!("eps_{eps}")),
            &eps,
            |b, _| {
                b.iter(|| {
                    minimize(
                        black_box(game),
                        Objective::Potential { eps: 0.4 },
                        &SolveOptions::default(),
                    )
                    .unwrap()
                })
            },
        );
        group.bench_with_input(
            BenchmarkId::new("social_cost", format!("eps_{eps}")),
            &eps,
            |b, _| {
                b.iter(|| {
                    minimize(
                        black_box(game),
                        Objective::SocialCost,
                        &SolveOptions::default(),
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_verifier,
    bench_brute_force,
    bench_descent,
    bench_frank_wolfe
);
criterion_main!(benches);
