//! Parametric generators for the tight lower-bound families, each packaged as
//! an [`InstanceBundle`]: the game, a designated equilibrium, a designated
//! optimum, and the exact values the pair must reproduce. Every generator
//! re-verifies its own bundle before returning, so a bundle in hand is a
//! machine-checked certificate.
//!
//! Families:
//!
//! * `atomic-poa` — the cyclic two-strategy construction whose worst
//!   equilibrium meets the atomic anarchy bound exactly at every `eps`.
//! * `nonatomic-poa` — three unit commodities over shared linear facilities
//!   for `eps <= 1`, and the cyclic variant with `z = floor(1+eps)` beyond.
//! * `pigou` — two parallel links, tight for non-atomic stability.
//! * `atomic-pos` — the dominant-strategy family whose unique equilibrium
//!   approaches the stability bound as the player count grows.
//! * `two-links` — two parallel links where the social optimum is only a
//!   `(1 - (1+gamma)/n)`-equilibrium.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::atomic::{AtomicGame, Facility, Profile};
use crate::bounds::{z_floor_of_epsilon, z_of_epsilon};
use crate::error::{Error, Result};
use crate::network::{CommoditySpec, Edge, Graph};
use crate::nonatomic::{Commodity, Flow, NonatomicGame};
use crate::rational::{rat_to_string, rational_from_f64, Rat};
use crate::EQ_TOL;

/// A game of either kind; the JSON schema is self-describing (`players` vs
/// `commodities`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameForm {
    Atomic(AtomicGame),
    Nonatomic(NonatomicGame),
}

/// A pure profile or a flow, matching the game kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AssignmentForm {
    Profile(Profile),
    Flow(Flow),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleMetadata {
    pub family: String,
    pub parameters: BTreeMap<String, f64>,
    /// Exact `p/q` renditions of the parameters, present when `eps` was
    /// recognizably rational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// A generated game with its designated equilibrium, designated optimum, and
/// the values they are certified to reproduce.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceBundle {
    pub game: GameForm,
    pub equilibrium: AssignmentForm,
    pub optimum: AssignmentForm,
    /// Exact equilibrium quality of the designated assignment.
    pub expected_epsilon: f64,
    /// Exact `cost(equilibrium) / cost(optimum)`.
    pub expected_ratio: f64,
    pub metadata: BundleMetadata,
}

/// Re-measured bundle values, for audits and the CLI.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BundleCheck {
    pub measured_epsilon: f64,
    pub measured_ratio: f64,
    pub epsilon_ok: bool,
    pub ratio_ok: bool,
}

impl InstanceBundle {
    /// Recompute the equilibrium quality and cost ratio from scratch and
    /// compare them against the expected values at the verifier tolerance.
    pub fn check(&self) -> Result<BundleCheck> {
        let measured_epsilon = match (&self.game, &self.equilibrium) {
            (GameForm::Atomic(g), AssignmentForm::Profile(p)) => g.profile_epsilon(p)?.epsilon_star,
            (GameForm::Nonatomic(g), AssignmentForm::Flow(f)) => g.flow_epsilon(f)?.epsilon_star,
            _ => {
                return Err(Error::InvalidGame(
                    "bundle mixes game kind and assignment kind".into(),
                ))
            }
        };
        let cost = |assignment: &AssignmentForm| -> Result<f64> {
            match (&self.game, assignment) {
                (GameForm::Atomic(g), AssignmentForm::Profile(p)) => g.social_cost(p),
                (GameForm::Nonatomic(g), AssignmentForm::Flow(f)) => g.social_cost(f),
                _ => Err(Error::InvalidGame(
                    "bundle mixes game kind and assignment kind".into(),
                )),
            }
        };
        let eq_cost = cost(&self.equilibrium)?;
        let opt_cost = cost(&self.optimum)?;
        if opt_cost <= 0.0 {
            return Err(Error::Construction(
                "designated optimum has zero cost".into(),
            ));
        }
        let measured_ratio = eq_cost / opt_cost;
        Ok(BundleCheck {
            measured_epsilon,
            measured_ratio,
            epsilon_ok: (measured_epsilon - self.expected_epsilon).abs() <= EQ_TOL,
            ratio_ok: (measured_ratio - self.expected_ratio).abs() <= EQ_TOL,
        })
    }

    fn certify(self) -> Result<Self> {
        let check = self.check()?;
        if !check.epsilon_ok {
            return Err(Error::Construction(format!(
                "{}: designated equilibrium has epsilon {} instead of {}",
                self.metadata.family, check.measured_epsilon, self.expected_epsilon
            )));
        }
        if !check.ratio_ok {
            return Err(Error::Construction(format!(
                "{}: measured ratio {} instead of {}",
                self.metadata.family, check.measured_ratio, self.expected_ratio
            )));
        }
        Ok(self)
    }
}

fn params(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn exact_map(entries: &[(&str, Rat)]) -> BTreeMap<String, String> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), rat_to_string(v)))
        .collect()
}

/// Tight atomic anarchy instance at `eps`: `z+2` players over `z+2`
/// load-proportional facilities and `z+2` facilities with slope `gamma`,
/// where `z = z_of_epsilon(eps)`. Each player either takes her own pair or a
/// long cyclic strategy; the all-cyclic profile is exactly an
/// `eps`-equilibrium and its cost ratio meets the closed-form bound.
pub fn atomic_poa_lb(eps: f64) -> Result<InstanceBundle> {
    let mut z = z_of_epsilon(eps)?;
    let mut notes = Vec::new();
    // at level boundaries the gamma denominator vanishes; the previous level
    // is then admissible and yields the identical ratio
    if (1.0 + eps) * ((z + 1) as f64) - ((z * z) as f64) <= 1e-12 {
        z -= 1;
        notes.push(format!("level boundary: construction uses z = {z}"));
        if z == 0 || (1.0 + eps) * ((z + 1) as f64) - ((z * z) as f64) <= 1e-12 {
            return Err(Error::Construction(format!(
                "no admissible level at eps = {eps}"
            )));
        }
    }
    let zf = z as f64;
    let denominator = (1.0 + eps) * (zf + 1.0) - zf * zf;
    let mut gamma = ((zf + 1.0) * (zf + 1.0) - (1.0 + eps) * (zf + 2.0)) / denominator;
    if gamma < 0.0 {
        if gamma >= -EQ_TOL {
            notes.push(format!("gamma {gamma:.3e} clamped to 0"));
            gamma = 0.0;
        } else {
            return Err(Error::Construction(format!(
                "negative facility slope gamma = {gamma} at eps = {eps}"
            )));
        }
    }
    let m = (z + 2) as usize;
    let mut facilities = Vec::with_capacity(2 * m);
    for i in 0..m {
        facilities.push(Facility {
            id: i,
            a: 1.0,
            b: 0.0,
        });
    }
    for i in 0..m {
        facilities.push(Facility {
            id: m + i,
            a: gamma,
            b: 0.0,
        });
    }
    let players: Vec<Vec<Vec<usize>>> = (0..m)
        .map(|i| {
            let own_pair = vec![i, m + i];
            let mut cyclic: Vec<usize> = (0..m).filter(|&j| j != i).collect();
            cyclic.extend((1..=z as usize).map(|t| m + (i + t) % m));
            vec![own_pair, cyclic]
        })
        .collect();
    let game = AtomicGame::new(facilities, players)?;
    let expected_ratio = (1.0 + eps) * (zf * zf + 3.0 * zf + 1.0) / (2.0 * zf - eps);

    let exact = rational_from_f64(eps).and_then(|e| {
        let r = Rat::from_integer(1) + e;
        let zr = Rat::from_integer(z as i128);
        let den = r * (zr + 1) - zr * zr;
        // a float eps sitting just above a level boundary can reconstruct to
        // the boundary rational itself, where the exact slope is undefined
        if den == Rat::from_integer(0) {
            return None;
        }
        let g = ((zr + 1) * (zr + 1) - r * (zr + 2)) / den;
        let ratio = r * (zr * zr + zr * 3 + 1) / (zr * 2 - e);
        Some(exact_map(&[
            ("epsilon", e),
            ("gamma", g.reduced()),
            ("ratio", ratio.reduced()),
        ]))
    });

    InstanceBundle {
        game: GameForm::Atomic(game),
        equilibrium: AssignmentForm::Profile(Profile::new(vec![1; m])),
        optimum: AssignmentForm::Profile(Profile::new(vec![0; m])),
        expected_epsilon: eps,
        expected_ratio,
        metadata: BundleMetadata {
            family: "atomic-poa".into(),
            parameters: params(&[
                ("epsilon", eps),
                ("z", zf),
                ("gamma", gamma),
                ("players", m as f64),
            ]),
            exact,
            notes,
        },
    }
    .certify()
}

/// Tight non-atomic anarchy instance. For `eps <= 1`: three unit commodities,
/// three load-proportional facilities, three constant facilities at
/// `gamma = 2(1-eps)/(1+eps)`. For `eps > 1`: the cyclic family with
/// `z = floor(1+eps)`, whose ratio matches `(1+eps)^2` exactly at integral
/// `1+eps` (via the adjacent level) and stays strictly below it otherwise.
pub fn nonatomic_poa_lb(eps: f64) -> Result<InstanceBundle> {
    crate::atomic::check_epsilon(eps)?;
    if eps <= 1.0 {
        let gamma = 2.0 * (1.0 - eps) / (1.0 + eps);
        let facilities = vec![
            Facility {
                id: 0,
                a: 1.0,
                b: 0.0,
            },
            Facility {
                id: 1,
                a: 1.0,
                b: 0.0,
            },
            Facility {
                id: 2,
                a: 1.0,
                b: 0.0,
            },
            Facility {
                id: 3,
                a: 0.0,
                b: gamma,
            },
            Facility {
                id: 4,
                a: 0.0,
                b: gamma,
            },
            Facility {
                id: 5,
                a: 0.0,
                b: gamma,
            },
        ];
        let commodities = (0..3)
            .map(|i| Commodity {
                rate: 1.0,
                strategies: vec![vec![i, 3 + i], (0..3).filter(|&j| j != i).collect()],
            })
            .collect();
        let game = NonatomicGame::new(facilities, commodities)?;
        let expected_ratio = 4.0 * (1.0 + eps) / (3.0 - eps);
        let exact = rational_from_f64(eps).map(|e| {
            let g = (Rat::from_integer(1) - e) * 2 / (Rat::from_integer(1) + e);
            let ratio = (Rat::from_integer(1) + e) * 4 / (Rat::from_integer(3) - e);
            exact_map(&[
                ("epsilon", e),
                ("gamma", g.reduced()),
                ("ratio", ratio.reduced()),
            ])
        });
        InstanceBundle {
            game: GameForm::Nonatomic(game),
            equilibrium: AssignmentForm::Flow(Flow {
                weights: vec![vec![0.0, 1.0]; 3],
            }),
            optimum: AssignmentForm::Flow(Flow {
                weights: vec![vec![1.0, 0.0]; 3],
            }),
            expected_epsilon: eps,
            expected_ratio,
            metadata: BundleMetadata {
                family: "nonatomic-poa".into(),
                parameters: params(&[("epsilon", eps), ("gamma", gamma), ("commodities", 3.0)]),
                exact,
                notes: Vec::new(),
            },
        }
        .certify()
    } else {
        nonatomic_poa_lb_large(eps)
    }
}

/// The cyclic non-atomic family with explicit level `z = floor(1+eps)`,
/// stepping down one level when `1+eps` is integral (where the slope formula
/// degenerates while the intended ratio `(1+eps)^2` is still achieved).
pub fn nonatomic_poa_lb_large(eps: f64) -> Result<InstanceBundle> {
    crate::atomic::check_epsilon(eps)?;
    let mut z = z_floor_of_epsilon(eps)?;
    let mut notes = Vec::new();
    if (1.0 + eps) * (z as f64) - ((z * z) as f64) <= 1e-12 {
        z -= 1;
        notes.push(format!("integral 1+eps: construction uses z = {z}"));
        if z == 0 || (1.0 + eps) * (z as f64) - ((z * z) as f64) <= 1e-12 {
            return Err(Error::Construction(format!(
                "no admissible level at eps = {eps}"
            )));
        }
    }
    let zf = z as f64;
    let denominator = (1.0 + eps) * zf - zf * zf;
    let mut gamma = ((zf + 1.0) * (zf + 1.0) - (1.0 + eps) * (zf + 1.0)) / denominator;
    if gamma < 0.0 {
        if gamma >= -EQ_TOL {
            notes.push(format!("gamma {gamma:.3e} clamped to 0"));
            gamma = 0.0;
        } else {
            return Err(Error::Construction(format!(
                "negative facility slope gamma = {gamma} at eps = {eps}"
            )));
        }
    }
    let m = (z + 2) as usize;
    let mut facilities = Vec::with_capacity(2 * m);
    for i in 0..m {
        facilities.push(Facility {
            id: i,
            a: 1.0,
            b: 0.0,
        });
    }
    for i in 0..m {
        facilities.push(Facility {
            id: m + i,
            a: gamma,
            b: 0.0,
        });
    }
    let commodities = (0..m)
        .map(|i| Commodity {
            rate: 1.0,
            strategies: vec![
                vec![i, m + i],
                (0..m)
                    .filter(|&j| j != i)
                    .chain((1..=z as usize).map(|t| m + (i + t) % m))
                    .collect(),
            ],
        })
        .collect();
    let game = NonatomicGame::new(facilities, commodities)?;
    let expected_ratio = (1.0 + eps) * zf * (zf + 1.0) / (2.0 * zf - eps);
    let exact = rational_from_f64(eps).and_then(|e| {
        let r = Rat::from_integer(1) + e;
        let zr = Rat::from_integer(z as i128);
        let den = r * zr - zr * zr;
        // same degeneracy as the atomic family: integral 1+eps reconstructed
        // exactly while the float stayed a hair above it
        if den == Rat::from_integer(0) {
            return None;
        }
        let g = ((zr + 1) * (zr + 1) - r * (zr + 1)) / den;
        let ratio = r * zr * (zr + 1) / (zr * 2 - e);
        Some(exact_map(&[
            ("epsilon", e),
            ("gamma", g.reduced()),
            ("ratio", ratio.reduced()),
        ]))
    });
    InstanceBundle {
        game: GameForm::Nonatomic(game),
        equilibrium: AssignmentForm::Flow(Flow {
            weights: vec![vec![0.0, 1.0]; m],
        }),
        optimum: AssignmentForm::Flow(Flow {
            weights: vec![vec![1.0, 0.0]; m],
        }),
        expected_epsilon: eps,
        expected_ratio,
        metadata: BundleMetadata {
            family: "nonatomic-poa".into(),
            parameters: params(&[
                ("epsilon", eps),
                ("z", zf),
                ("gamma", gamma),
                ("commodities", m as f64),
            ]),
            exact,
            notes,
        },
    }
    .certify()
}

/// The two-link game with a load-proportional lower edge and a constant
/// upper edge at `1 + eps`, for any `eps >= 0`.
pub fn pigou_game(eps: f64) -> Result<NonatomicGame> {
    crate::atomic::check_epsilon(eps)?;
    NonatomicGame::new(
        vec![
            Facility {
                id: 0,
                a: 1.0,
                b: 0.0,
            },
            Facility {
                id: 1,
                a: 0.0,
                b: 1.0 + eps,
            },
        ],
        vec![Commodity {
            rate: 1.0,
            strategies: vec![vec![0], vec![1]],
        }],
    )
}

/// Tight non-atomic stability instance for `eps in [0, 1)`.
///
/// The all-lower flow is the unique equilibrium up to `eps` (it is in fact an
/// exact one), while the optimum splits `(1+eps)/2` onto the lower edge. The
/// generator certifies uniqueness on a grid: every flow with real upper-edge
/// mass fails the `eps` test. Beyond `eps = 1` the family degenerates
/// (stability is 1) and the generator refuses.
pub fn pigou(eps: f64) -> Result<InstanceBundle> {
    crate::atomic::check_epsilon(eps)?;
    if eps >= 1.0 {
        return Err(Error::Domain(format!(
            "the two-link stability family needs eps < 1 (stability is 1 beyond); got {eps}"
        )));
    }
    let game = pigou_game(eps)?;
    // uniqueness sweep: any flow with upper mass beyond dust is worse than eps
    for k in 1..100 {
        let upper = f64::from(k) / 100.0;
        let report = game.flow_epsilon(&Flow {
            weights: vec![vec![1.0 - upper, upper]],
        })?;
        if report.epsilon_star <= eps + EQ_TOL {
            return Err(Error::Construction(format!(
                "flow with upper mass {upper} verifies at eps = {eps}; family is not tight"
            )));
        }
    }
    let split = (1.0 + eps) / 2.0;
    let expected_ratio = 4.0 / ((3.0 - eps) * (1.0 + eps));
    let exact = rational_from_f64(eps).map(|e| {
        let one = Rat::from_integer(1);
        let ratio = Rat::from_integer(4) / ((Rat::from_integer(3) - e) * (one + e));
        let split = (one + e) / 2;
        exact_map(&[
            ("epsilon", e),
            ("ratio", ratio.reduced()),
            ("optimum_lower", split.reduced()),
        ])
    });
    InstanceBundle {
        game: GameForm::Nonatomic(game),
        equilibrium: AssignmentForm::Flow(Flow {
            weights: vec![vec![1.0, 0.0]],
        }),
        optimum: AssignmentForm::Flow(Flow {
            weights: vec![vec![split, 1.0 - split]],
        }),
        // the designated equilibrium is exact: its used edge is also cheapest
        expected_epsilon: 0.0,
        expected_ratio,
        metadata: BundleMetadata {
            family: "pigou".into(),
            parameters: params(&[("epsilon", eps), ("optimum_lower", split)]),
            exact,
            notes: vec![
                "all-lower is an exact equilibrium; uniqueness below eps certified on a flow grid"
                    .into(),
            ],
        },
    }
    .certify()
}

/// Per-player costs in the dominant-strategy stability family at the mixed
/// profile where `k` of the `n` flexible players sit on their equilibrium
/// strategy: `cost_a` for one of those `k`, `cost_p` for one of the rest.
pub fn pos_family_costs(eps: f64, n: usize, lambda: usize, delta: f64, k: usize) -> (f64, f64) {
    let beta = (1.0 + eps) / (2.0 + eps);
    let alpha = (1.0 + eps)
        * (2.0 * n as f64 * eps - eps + eps * lambda as f64 + n as f64 + 2.0 * lambda as f64 + 1.0)
        / (2.0 + eps)
        + delta;
    let cost_a = (2.0 * n as f64 - k as f64 - 1.0) * beta + (lambda as f64 + k as f64);
    let cost_p = alpha + (n as f64 + k as f64 - 1.0) * beta;
    (cost_a, cost_p)
}

/// Closed-form cost ratio of the dominant-strategy family: total cost at the
/// all-equilibrium profile over total cost at the designated optimum.
pub fn pos_family_ratio(eps: f64, n: usize, lambda: usize, delta: f64) -> f64 {
    let (cost_a_full, _) = pos_family_costs(eps, n, lambda, delta, n);
    let (_, cost_p_empty) = pos_family_costs(eps, n, lambda, delta, 0);
    let nf = n as f64;
    let lf = lambda as f64;
    (nf * cost_a_full + lf * (lf + nf)) / (nf * cost_p_empty + lf * lf)
}

/// Integer sweep for the `lambda` maximizing the family ratio at a given
/// player count.
pub fn pos_best_lambda(eps: f64, n: usize) -> usize {
    let mut best = (f64::NEG_INFINITY, 0usize);
    for lambda in 0..=5 * n {
        let r = pos_family_ratio(eps, n, lambda, 0.0);
        if r > best.0 {
            best = (r, lambda);
        }
    }
    best.1
}

/// The dominant-strategy stability family: `n` flexible players (each with an
/// equilibrium strategy and an optimum strategy), `lambda` fixed players on a
/// shared unit-slope facility, and slopes chosen so that switching away from
/// the equilibrium strategy is at least `1+eps` times more expensive at every
/// intermediate profile. Any `delta > 0` makes that margin strict, which
/// makes the all-equilibrium profile the unique `eps`-equilibrium.
pub fn atomic_pos_lb(eps: f64, n: usize, lambda: usize, delta: f64) -> Result<InstanceBundle> {
    crate::atomic::check_epsilon(eps)?;
    if n < 2 {
        return Err(Error::Domain(format!(
            "the stability family needs at least 2 flexible players, got {n}"
        )));
    }
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    let beta = (1.0 + eps) / (2.0 + eps);
    let alpha = (1.0 + eps)
        * (2.0 * n as f64 * eps - eps + eps * lambda as f64 + n as f64 + 2.0 * lambda as f64 + 1.0)
        / (2.0 + eps)
        + delta;

    // facility ids: own facilities 0..n, pair facilities n..n+n(n-1), shared last
    let pair_id = {
        let mut map = BTreeMap::new();
        let mut next = n;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    map.insert((i, j), next);
                    next += 1;
                }
            }
        }
        map
    };
    let shared = n + n * (n - 1);
    let mut facilities = Vec::with_capacity(shared + 1);
    for i in 0..n {
        facilities.push(Facility {
            id: i,
            a: alpha,
            b: 0.0,
        });
    }
    for &id in pair_id.values() {
        facilities.push(Facility {
            id,
            a: beta,
            b: 0.0,
        });
    }
    facilities.push(Facility {
        id: shared,
        a: 1.0,
        b: 0.0,
    });

    let mut players: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n + lambda);
    for i in 0..n {
        let mut eq_strategy: Vec<usize> = (0..n)
            .filter(|&j| j != i)
            .map(|j| pair_id[&(i, j)])
            .collect();
        eq_strategy.push(shared);
        let mut opt_strategy: Vec<usize> = vec![i];
        opt_strategy.extend((0..n).filter(|&j| j != i).map(|j| pair_id[&(j, i)]));
        players.push(vec![eq_strategy, opt_strategy]);
    }
    for _ in 0..lambda {
        players.push(vec![vec![shared]]);
    }
    let game = AtomicGame::new(facilities, players)?;

    // strictness audit of the dominance margins
    for k in 1..=n {
        let (cost_a, _) = pos_family_costs(eps, n, lambda, delta, k);
        let (_, cost_p_prev) = pos_family_costs(eps, n, lambda, delta, k - 1);
        let margin = cost_p_prev - (1.0 + eps) * cost_a;
        if delta > 0.0 {
            if margin <= 0.0 {
                return Err(Error::Construction(format!(
                    "dominance margin {margin} not strict at k = {k}"
                )));
            }
        } else if margin.abs() > 1e-9 * cost_p_prev.abs().max(1.0) {
            return Err(Error::Construction(format!(
                "dominance should be tight at delta = 0, found margin {margin} at k = {k}"
            )));
        }
    }

    let eq_choices = vec![0usize; n + lambda];
    let mut opt_choices = vec![1usize; n];
    opt_choices.extend(vec![0usize; lambda]);
    let expected_ratio = pos_family_ratio(eps, n, lambda, delta);
    let exact = if delta == 0.0 {
        rational_from_f64(eps).map(|e| {
            let one = Rat::from_integer(1);
            let b = (one + e) / (Rat::from_integer(2) + e);
            let nr = Rat::from_integer(n as i128);
            let lr = Rat::from_integer(lambda as i128);
            let a = (one + e) * (nr * e * 2 - e + e * lr + nr + lr * 2 + 1)
                / (Rat::from_integer(2) + e);
            exact_map(&[
                ("epsilon", e),
                ("alpha", a.reduced()),
                ("beta", b.reduced()),
            ])
        })
    } else {
        None
    };
    InstanceBundle {
        game: GameForm::Atomic(game),
        equilibrium: AssignmentForm::Profile(Profile::new(eq_choices)),
        optimum: AssignmentForm::Profile(Profile::new(opt_choices)),
        // the all-equilibrium profile is an exact equilibrium; dominance only
        // rules out every other profile
        expected_epsilon: 0.0,
        expected_ratio,
        metadata: BundleMetadata {
            family: "atomic-pos".into(),
            parameters: params(&[
                ("epsilon", eps),
                ("n", n as f64),
                ("lambda", lambda as f64),
                ("delta", delta),
                ("alpha", alpha),
                ("beta", beta),
            ]),
            exact,
            notes: Vec::new(),
        },
    }
    .certify()
}

/// Two parallel links with `n` players: the first link has latency
/// `(2n-1)x - gamma`, the second `x`. The unique social optimum (one player
/// on the first link) is exactly a `(1 - (1+gamma)/n)`-equilibrium, so the
/// optimum stops being an equilibrium for any smaller factor.
pub fn two_links(n: usize, gamma: f64) -> Result<InstanceBundle> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 players, got {n}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!(
            "gamma must lie strictly between 0 and 1 to keep latencies positive, got {gamma}"
        )));
    }
    let slope = 2.0 * n as f64 - 1.0;
    let game = AtomicGame::new(
        vec![
            Facility {
                id: 0,
                a: slope,
                b: -gamma,
            },
            Facility {
                id: 1,
                a: 1.0,
                b: 0.0,
            },
        ],
        vec![vec![vec![0], vec![1]]; n],
    )?;
    let mut choices = vec![1usize; n];
    choices[0] = 0;
    let designated = Profile::new(choices);
    let opt_cost = game.social_cost(&designated)?;
    // optimality over the number of players on the first link
    for k in 0..=n {
        let mut c = vec![1usize; n];
        for item in c.iter_mut().take(k) {
            *item = 0;
        }
        let cost = game.social_cost(&Profile::new(c))?;
        if k != 1 && cost <= opt_cost {
            return Err(Error::Construction(format!(
                "{k} players on the first link cost {cost} <= designated {opt_cost}"
            )));
        }
    }
    let expected_epsilon = 1.0 - (1.0 + gamma) / n as f64;
    let exact = rational_from_f64(gamma).map(|g| {
        let nr = Rat::from_integer(n as i128);
        let eps_star = Rat::from_integer(1) - (Rat::from_integer(1) + g) / nr;
        let opt = nr * 2 - 1 - g + (nr - 1) * (nr - 1);
        exact_map(&[
            ("gamma", g),
            ("epsilon_star", eps_star.reduced()),
            ("optimum_cost", opt.reduced()),
        ])
    });
    InstanceBundle {
        game: GameForm::Atomic(game),
        equilibrium: AssignmentForm::Profile(designated.clone()),
        optimum: AssignmentForm::Profile(designated),
        expected_epsilon,
        expected_ratio: 1.0,
        metadata: BundleMetadata {
            family: "two-links".into(),
            parameters: params(&[
                ("n", n as f64),
                ("gamma", gamma),
                ("optimum_cost", opt_cost),
            ]),
            exact,
            notes: vec!["equilibrium and optimum coincide; the point is its epsilon".into()],
        },
    }
    .certify()
}

/// The routing-network realization of the `eps <= 1` non-atomic anarchy
/// family: three commodities `i -> i'` over a 12-node grid, where the two
/// designated paths of each commodity reproduce the strategy pair of
/// [`nonatomic_poa_lb`]. Connector edges have zero latency.
pub fn nonatomic_poa_lb_graph(eps: f64) -> Result<Graph> {
    crate::atomic::check_epsilon(eps)?;
    if eps > 1.0 {
        return Err(Error::Domain(format!(
            "the three-commodity network realization needs eps <= 1, got {eps}"
        )));
    }
    let gamma = 2.0 * (1.0 - eps) / (1.0 + eps);
    let nodes: Vec<String> = [
        "1", "2", "3", "1'", "2'", "3'", "a", "b", "c", "d", "e", "g",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let edge = |id: usize, tail: &str, head: &str, a: f64, b: f64| Edge {
        id,
        tail: tail.into(),
        head: head.into(),
        a,
        b,
    };
    let edges = vec![
        edge(0, "1", "a", 0.0, 0.0),
        edge(1, "a", "b", 1.0, 0.0), // load-proportional, first commodity
        edge(2, "b", "1'", 0.0, gamma), // constant
        edge(3, "1", "c", 0.0, 0.0),
        edge(4, "c", "d", 1.0, 0.0), // load-proportional, second commodity
        edge(5, "d", "2'", 0.0, gamma),
        edge(6, "2", "c", 0.0, 0.0),
        edge(7, "2", "e", 0.0, 0.0),
        edge(8, "e", "g", 1.0, 0.0), // load-proportional, third commodity
        edge(9, "g", "3'", 0.0, gamma),
        edge(10, "3", "e", 0.0, 0.0),
        edge(11, "3", "a", 0.0, 0.0),
        edge(12, "d", "e", 0.0, 0.0),
        edge(13, "g", "a", 0.0, 0.0),
        edge(14, "b", "c", 0.0, 0.0),
        edge(15, "b", "2'", 0.0, 0.0),
        edge(16, "d", "3'", 0.0, 0.0),
        edge(17, "g", "1'", 0.0, 0.0),
    ];
    let graph = Graph {
        nodes,
        edges,
        commodities: (1..=3)
            .map(|i| CommoditySpec {
                source: i.to_string(),
                sink: format!("{i}'"),
                rate: 1.0,
            })
            .collect(),
    };
    // the designated short and long paths must be among the simple paths
    let designated: [(usize, Vec<usize>, Vec<usize>); 3] = [
        (1, vec![0, 1, 2], vec![3, 4, 8, 12, 17]),
        (2, vec![4, 5, 6], vec![1, 7, 8, 13, 15]),
        (3, vec![8, 9, 10], vec![1, 4, 11, 14, 16]),
    ];
    for (source, short, long) in &designated {
        let paths = graph.enumerate_paths(&source.to_string(), &format!("{source}'"), 1000)?;
        let as_sets: Vec<Vec<usize>> = paths
            .iter()
            .map(|p| {
                let mut s = p.clone();
                s.sort_unstable();
                s
            })
            .collect();
        let mut short = short.clone();
        short.sort_unstable();
        let mut long = long.clone();
        long.sort_unstable();
        if !as_sets.contains(&short) || !as_sets.contains(&long) {
            return Err(Error::Construction(format!(
                "designated paths for commodity {source} missing from the network"
            )));
        }
    }
    Ok(graph)
}
