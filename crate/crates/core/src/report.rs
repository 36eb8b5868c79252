//! The one-shot reproduction suite: every headline quantity is regenerated
//! from scratch, measured, and compared against its closed form at a pinned
//! tolerance. The CLI `reproduce` subcommand and the acceptance test target
//! both run exactly this code.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atomic::solvers::{brute_force, potential_descent, DEFAULT_MAX_STEPS};
use crate::atomic::Profile;
use crate::bounds::{self, BoundLemma};
use crate::error::Result;
use crate::instances::{self, AssignmentForm, GameForm};
use crate::nonatomic::solvers::{minimize, pos_certificate, Objective, SolveOptions};
use crate::nonatomic::NonatomicGame;
use crate::random::{random_atomic_game, random_flow, random_profile, RandomGameParams};
use crate::EQ_TOL;

/// Default RNG seed for the randomized suites.
pub const DEFAULT_SEED: u64 = 42;

/// The reproduction families, one per headline claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Tight atomic anarchy instances across the `eps` grid.
    AtomicPoa,
    /// Enumerated anarchy of random games never exceeds the closed form.
    AtomicPoaRandom,
    /// Tight non-atomic anarchy instances, both regimes.
    NonatomicPoa,
    /// Descent terminals are equilibria on a randomized suite.
    PotentialAtomic,
    /// Potential minimizers are equilibria on every bundled instance.
    PotentialNonatomic,
    /// Two-link stability family is tight.
    Pigou,
    /// Stability bounds sandwich: family value <= sharp <= coarse.
    AtomicPosBounds,
    /// Dominant-strategy family approaches the stability bound.
    AtomicPos,
    /// The optimum of the two-link game is exactly a known approximate
    /// equilibrium and nothing better.
    TwoLinks,
    /// The four arithmetic inequalities on their declared grids.
    Lemmas,
    /// Equilibrium and variational inequalities against random flows.
    Bmw,
}

impl Family {
    pub fn all() -> Vec<Family> {
        use Family::*;
        vec![
            AtomicPoa,
            AtomicPoaRandom,
            NonatomicPoa,
            PotentialAtomic,
            PotentialNonatomic,
            Pigou,
            AtomicPosBounds,
            AtomicPos,
            TwoLinks,
            Lemmas,
            Bmw,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::AtomicPoa => "atomic-poa",
            Family::AtomicPoaRandom => "atomic-poa-random",
            Family::NonatomicPoa => "nonatomic-poa",
            Family::PotentialAtomic => "potential-atomic",
            Family::PotentialNonatomic => "potential-nonatomic",
            Family::Pigou => "pigou",
            Family::AtomicPosBounds => "atomic-pos-bounds",
            Family::AtomicPos => "atomic-pos",
            Family::TwoLinks => "two-links",
            Family::Lemmas => "lemmas",
            Family::Bmw => "bmw",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::all()
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                crate::error::Error::Domain(format!(
                    "unknown family {s:?}; known: {}",
                    Family::all()
                        .iter()
                        .map(|f| f.name())
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            })
    }
}

/// One measured check: `pass` encodes the comparison named in `check`.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionRow {
    pub family: String,
    pub case: String,
    pub expected: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CriterionRow {
    fn close(
        family: Family,
        case: impl Into<String>,
        expected: f64,
        measured: f64,
        tol: f64,
    ) -> Self {
        CriterionRow {
            family: family.name().into(),
            case: case.into(),
            expected,
            measured,
            tolerance: tol,
            pass: (measured - expected).abs() <= tol,
        }
    }

    fn at_most(
        family: Family,
        case: impl Into<String>,
        limit: f64,
        measured: f64,
        tol: f64,
    ) -> Self {
        CriterionRow {
            family: family.name().into(),
            case: case.into(),
            expected: limit,
            measured,
            tolerance: tol,
            pass: measured <= limit + tol,
        }
    }

    fn at_least(
        family: Family,
        case: impl Into<String>,
        limit: f64,
        measured: f64,
        tol: f64,
    ) -> Self {
        CriterionRow {
            family: family.name().into(),
            case: case.into(),
            expected: limit,
            measured,
            tolerance: tol,
            pass: measured >= limit - tol,
        }
    }

    fn strictly_below(family: Family, case: impl Into<String>, limit: f64, measured: f64) -> Self {
        CriterionRow {
            family: family.name().into(),
            case: case.into(),
            expected: limit,
            measured,
            tolerance: 0.0,
            pass: measured < limit,
        }
    }

    fn zero_count(family: Family, case: impl Into<String>, count: usize) -> Self {
        CriterionRow {
            family: family.name().into(),
            case: case.into(),
            expected: 0.0,
            measured: count as f64,
            tolerance: 0.0,
            pass: count == 0,
        }
    }
}

/// Full result of a reproduction run.
#[derive(Debug, Clone, Serialize)]
pub struct ReproductionReport {
    pub seed: u64,
    pub rows: Vec<CriterionRow>,
    pub pass: bool,
}

impl ReproductionReport {
    pub fn failing(&self) -> Vec<&CriterionRow> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    /// JSON rendition with values rounded to 12 significant digits.
    pub fn to_json_value(&self) -> serde_json::Value {
        rounded_json(self)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "family,case,expected,measured,tolerance,pass")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                row.family,
                row.case.replace(',', ";"),
                row.expected,
                row.measured,
                row.tolerance,
                row.pass
            )?;
        }
        Ok(())
    }
}

/// Serialize anything with every float rounded to 12 significant digits,
/// the precision all JSON reports are emitted at.
pub fn rounded_json<T: Serialize>(value: &T) -> serde_json::Value {
    let mut v = serde_json::to_value(value).expect("report values serialize");
    round_values(&mut v);
    v
}

/// Round to `digits` significant digits (report display precision).
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - magnitude);
    (x * factor).round() / factor
}

fn round_values(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig(f, 12)) {
                        *n = rounded;
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_values),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_values),
        _ => {}
    }
}

/// Run the selected families and collect all rows.
pub fn run(families: &[Family], seed: u64) -> Result<ReproductionReport> {
    let mut rows = Vec::new();
    for family in families {
        rows.extend(run_family(*family, seed)?);
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(ReproductionReport { seed, rows, pass })
}

pub fn run_family(family: Family, seed: u64) -> Result<Vec<CriterionRow>> {
    match family {
        Family::AtomicPoa => atomic_poa_rows(),
        Family::AtomicPoaRandom => atomic_poa_random_rows(seed),
        Family::NonatomicPoa => nonatomic_poa_rows(),
        Family::PotentialAtomic => potential_atomic_rows(seed),
        Family::PotentialNonatomic => potential_nonatomic_rows(),
        Family::Pigou => pigou_rows(),
        Family::AtomicPosBounds => atomic_pos_bounds_rows(),
        Family::AtomicPos => atomic_pos_rows(),
        Family::TwoLinks => two_links_rows(),
        Family::Lemmas => lemma_rows(seed),
        Family::Bmw => bmw_rows(seed),
    }
}

/// The non-atomic instances every flow-level check runs against.
fn bundled_nonatomic_instances() -> Result<Vec<(String, instances::InstanceBundle)>> {
    let mut out = Vec::new();
    for eps in [0.0, 0.3, 0.6, 0.9] {
        out.push((format!("pigou eps={eps}"), instances::pigou(eps)?));
    }
    for eps in [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0] {
        out.push((
            format!("nonatomic-poa eps={eps}"),
            instances::nonatomic_poa_lb(eps)?,
        ));
    }
    Ok(out)
}

fn nonatomic_game(bundle: &instances::InstanceBundle) -> &NonatomicGame {
    match &bundle.game {
        GameForm::Nonatomic(g) => g,
        GameForm::Atomic(_) => unreachable!("bundled flow instances are non-atomic"),
    }
}

fn atomic_poa_rows() -> Result<Vec<CriterionRow>> {
    let mut rows = Vec::new();
    for k in 0..=30 {
        let eps = f64::from(k) / 10.0;
        let bundle = instances::atomic_poa_lb(eps)?;
        let check = bundle.check()?;
        let bound = bounds::atomic_poa_bound(eps)?;
        rows.push(CriterionRow::close(
            Family::AtomicPoa,
            format!("ratio equals bound at eps={eps:.1}"),
            bound,
            check.measured_ratio,
            EQ_TOL,
        ));
        rows.push(CriterionRow::close(
            Family::AtomicPoa,
            format!("equilibrium epsilon at eps={eps:.1}"),
            eps,
            check.measured_epsilon,
            EQ_TOL,
        ));
    }
    let at_zero = instances::atomic_poa_lb(0.0)?.check()?;
    rows.push(CriterionRow::close(
        Family::AtomicPoa,
        "exact 5/2 at eps=0",
        2.5,
        at_zero.measured_ratio,
        EQ_TOL,
    ));
    Ok(rows)
}

fn atomic_poa_random_rows(seed: u64) -> Result<Vec<CriterionRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = RandomGameParams::default();
    let games: Vec<_> = (0..1000)
        .map(|_| random_atomic_game(&mut rng, &params))
        .collect();
    let mut rows = Vec::new();
    for eps in [0.0, 0.25, 0.5, 1.0] {
        let bound = bounds::atomic_poa_bound(eps)?;
        let mut worst_excess = f64::NEG_INFINITY;
        for game in &games {
            let set = brute_force(game, eps)?;
            worst_excess = worst_excess.max(set.poa - bound);
        }
        rows.push(CriterionRow::at_most(
            Family::AtomicPoaRandom,
            format!("max enumerated-anarchy excess over bound, 1000 games, eps={eps}"),
            0.0,
            worst_excess,
            EQ_TOL,
        ));
    }
    Ok(rows)
}

fn nonatomic_poa_rows() -> Result<Vec<CriterionRow>> {
    let mut rows = Vec::new();
    for k in 0..=10 {
        let eps = f64::from(k) / 10.0;
        let check = instances::nonatomic_poa_lb(eps)?.check()?;
        rows.push(CriterionRow::close(
            Family::NonatomicPoa,
            format!("ratio equals 4(1+eps)/(3-eps) at eps={eps:.1}"),
            4.0 * (1.0 + eps) / (3.0 - eps),
            check.measured_ratio,
            EQ_TOL,
        ));
        rows.push(CriterionRow::close(
            Family::NonatomicPoa,
            format!("equilibrium epsilon at eps={eps:.1}"),
            eps,
            check.measured_epsilon,
            EQ_TOL,
        ));
    }
    for eps in [1.0, 2.0, 3.0] {
        let check = instances::nonatomic_poa_lb(eps)?.check()?;
        rows.push(CriterionRow::close(
            Family::NonatomicPoa,
            format!("ratio equals (1+eps)^2 at integral 1+eps, eps={eps}"),
            (1.0 + eps) * (1.0 + eps),
            check.measured_ratio,
            EQ_TOL,
        ));
    }
    for eps in [1.25, 1.5] {
        let bundle = instances::nonatomic_poa_lb(eps)?;
        let check = bundle.check()?;
        let family_value = bounds::nonatomic_poa_lower_large(eps)?;
        rows.push(CriterionRow::close(
            Family::NonatomicPoa,
            format!("ratio equals the explicit family value at eps={eps}"),
            family_value,
            check.measured_ratio,
            EQ_TOL,
        ));
        rows.push(CriterionRow::strictly_below(
            Family::NonatomicPoa,
            format!("documented gap below (1+eps)^2 at non-integral eps={eps}"),
            bounds::nonatomic_poa_bound(eps)?,
            check.measured_ratio,
        ));
    }
    Ok(rows)
}

fn potential_atomic_rows(seed: u64) -> Result<Vec<CriterionRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0001);
    let params = RandomGameParams::default();
    let mut failures = 0usize;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut unfinished = 0usize;
    for _ in 0..1000 {
        let game = random_atomic_game(&mut rng, &params);
        let start = random_profile(&mut rng, &game);
        let eps = rng.gen_range(0.0..2.0);
        let trace = potential_descent(&game, &start, eps, DEFAULT_MAX_STEPS)?;
        if !trace.converged {
            unfinished += 1;
            continue;
        }
        let report = game.profile_epsilon(&trace.terminal)?;
        let excess = report.epsilon_star - eps;
        worst_excess = worst_excess.max(excess);
        if excess > EQ_TOL {
            failures += 1;
        }
    }
    Ok(vec![
        CriterionRow::zero_count(
            Family::PotentialAtomic,
            "descent terminals failing the equilibrium test, 1000 runs",
            failures,
        ),
        CriterionRow::zero_count(
            Family::PotentialAtomic,
            "descents that ran out of budget",
            unfinished,
        ),
        CriterionRow::at_most(
            Family::PotentialAtomic,
            "worst terminal epsilon excess",
            0.0,
            worst_excess,
            EQ_TOL,
        ),
    ])
}

fn potential_nonatomic_rows() -> Result<Vec<CriterionRow>> {
    let mut rows = Vec::new();
    for (name, bundle) in bundled_nonatomic_instances()? {
        let game = nonatomic_game(&bundle);
        let mut worst_excess = f64::NEG_INFINITY;
        let mut unconverged = 0usize;
        for k in 0..=10 {
            let eps = f64::from(k) / 10.0;
            let result = minimize(game, Objective::Potential { eps }, &SolveOptions::default())?;
            if !result.converged {
                unconverged += 1;
                continue;
            }
            let report = game.flow_epsilon(&result.flow)?;
            worst_excess = worst_excess.max(report.epsilon_star - eps);
        }
        rows.push(CriterionRow::zero_count(
            Family::PotentialNonatomic,
            format!("{name}: solves stopped by iteration budget"),
            unconverged,
        ));
        rows.push(CriterionRow::at_most(
            Family::PotentialNonatomic,
            format!("{name}: worst minimizer epsilon excess over the grid"),
            0.0,
            worst_excess,
            1e-6,
        ));
    }
    Ok(rows)
}

fn pigou_rows() -> Result<Vec<CriterionRow>> {
    let mut rows = Vec::new();
    for k in 0..10 {
        let eps = f64::from(k) / 10.0;
        let bundle = instances::pigou(eps)?;
        let check = bundle.check()?;
        let bound = bounds::nonatomic_pos_bound(eps)?;
        rows.push(CriterionRow::close(
            Family::Pigou,
            format!("family ratio equals 4/((3-eps)(1+eps)) at eps={eps:.1}"),
            bound,
            check.measured_ratio,
            EQ_TOL,
        ));
        let cert = pos_certificate(nonatomic_game(&bundle), eps, 1e-8)?;
        rows.push(CriterionRow::close(
            Family::Pigou,
            format!("stability certificate matches at eps={eps:.1}"),
            bound,
            cert.ratio,
            1e-6,
        ));
    }
    let at_zero = instances::pigou(0.0)?.check()?;
    rows.push(CriterionRow::close(
        Family::Pigou,
        "exact 4/3 at eps=0",
        4.0 / 3.0,
        at_zero.measured_ratio,
        EQ_TOL,
    ));
    Ok(rows)
}

fn atomic_pos_bounds_rows() -> Result<Vec<CriterionRow>> {
    let mut rows = Vec::new();
    for k in 0..=10 {
        let eps = f64::from(k) / 10.0;
        let b = bounds::atomic_pos_bounds(eps)?;
        rows.push(CriterionRow::at_most(
            Family::AtomicPosBounds,
            format!("family value below sharp bound at eps={eps:.1}"),
            b.upper,
            b.lower,
            EQ_TOL,
        ));
        rows.push(CriterionRow::at_most(
            Family::AtomicPosBounds,
            format!("sharp bound below 2/(1+eps) at eps={eps:.1}"),
            b.coarse,
            b.upper,
            EQ_TOL,
        ));
    }
    let target = 1.0 + 3.0_f64.sqrt() / 3.0;
    let at_zero = bounds::atomic_pos_bounds(0.0)?;
    rows.push(CriterionRow::close(
        Family::AtomicPosBounds,
        "sharp bound equals 1+sqrt(3)/3 at eps=0",
        target,
        at_zero.upper,
        EQ_TOL,
    ));
    rows.push(CriterionRow::close(
        Family::AtomicPosBounds,
        "family value equals 1+sqrt(3)/3 at eps=0",
        target,
        at_zero.lower,
        EQ_TOL,
    ));
    rows.push(CriterionRow::close(
        Family::AtomicPosBounds,
        "sharp bound equals 1 at eps=1",
        1.0,
        bounds::atomic_pos_bounds(1.0)?.upper,
        EQ_TOL,
    ));
    Ok(rows)
}

fn atomic_pos_rows() -> Result<Vec<CriterionRow>> {
    let target = 1.0 + 3.0_f64.sqrt() / 3.0;
    let mut rows = Vec::new();

    let lambda = instances::pos_best_lambda(0.0, 200);
    let bundle = instances::atomic_pos_lb(0.0, 200, lambda, 1e-9)?;
    let check = bundle.check()?;
    rows.push(CriterionRow::close(
        Family::AtomicPos,
        format!("n=200 lambda={lambda} ratio within 2% of 1+sqrt(3)/3"),
        target,
        check.measured_ratio,
        0.02 * target,
    ));

    let gap = |n: usize| -> Result<f64> {
        let lambda = instances::pos_best_lambda(0.0, n);
        let check = instances::atomic_pos_lb(0.0, n, lambda, 1e-9)?.check()?;
        Ok((check.measured_ratio - target).abs())
    };
    let gap_100 = gap(100)?;
    let gap_400 = gap(400)?;
    rows.push(CriterionRow::strictly_below(
        Family::AtomicPos,
        format!("gap to the limit shrinks from n=100 ({gap_100:.2e}) to n=400"),
        gap_100,
        gap_400,
    ));

    // small instance: the designated profile is the unique equilibrium
    let bundle = instances::atomic_pos_lb(0.0, 3, 1, 1e-6)?;
    let GameForm::Atomic(game) = &bundle.game else {
        unreachable!("stability family is atomic")
    };
    let AssignmentForm::Profile(designated) = &bundle.equilibrium else {
        unreachable!("stability family uses profiles")
    };
    let set = brute_force(game, 0.0)?;
    let spurious = set.equilibria.iter().filter(|p| *p != designated).count();
    rows.push(CriterionRow::zero_count(
        Family::AtomicPos,
        "n=3 lambda=1 delta=1e-6: equilibria besides the designated profile",
        spurious,
    ));
    rows.push(CriterionRow::zero_count(
        Family::AtomicPos,
        "n=3 lambda=1 delta=1e-6: designated profile missing from equilibria",
        usize::from(!set.equilibria.iter().any(|p| p == designated)),
    ));
    Ok(rows)
}

fn two_links_rows() -> Result<Vec<CriterionRow>> {
    let gamma = 0.5;
    let mut rows = Vec::new();
    for n in [3usize, 5, 10] {
        let bundle = instances::two_links(n, gamma)?;
        let check = bundle.check()?;
        rows.push(CriterionRow::close(
            Family::TwoLinks,
            format!("optimum epsilon equals 1-(1+gamma)/n at n={n}"),
            1.0 - (1.0 + gamma) / n as f64,
            check.measured_epsilon,
            EQ_TOL,
        ));
        let GameForm::Atomic(game) = &bundle.game else {
            unreachable!("two-link game is atomic")
        };
        let AssignmentForm::Profile(designated) = &bundle.optimum else {
            unreachable!("two-link optimum is a profile")
        };
        // full enumeration confirms the designated optimum
        let set = brute_force(game, 1.0)?;
        rows.push(CriterionRow::zero_count(
            Family::TwoLinks,
            format!("enumerated optimum differs from designated at n={n}"),
            usize::from(set.optimum != *designated),
        ));
        // and over the per-link player counts, one player on the first link wins
        let designated_cost = game.social_cost(designated)?;
        let mut runner_up = f64::INFINITY;
        for k in 0..=n {
            if k == 1 {
                continue;
            }
            let mut choices = vec![1usize; n];
            for c in choices.iter_mut().take(k) {
                *c = 0;
            }
            runner_up = runner_up.min(game.social_cost(&Profile::new(choices))?);
        }
        rows.push(CriterionRow::strictly_below(
            Family::TwoLinks,
            format!("designated optimum beats every other link split at n={n}"),
            runner_up,
            designated_cost,
        ));
    }
    Ok(rows)
}

fn lemma_rows(seed: u64) -> Result<Vec<CriterionRow>> {
    let mut violations = 0usize;
    for alpha in 0..=40 {
        for beta in 0..=40 {
            for z in 1..=12 {
                if !bounds::lemma_holds(&BoundLemma::AtomicAnarchy { alpha, beta, z })? {
                    violations += 1;
                }
            }
        }
    }
    let atomic_anarchy = CriterionRow::zero_count(
        Family::Lemmas,
        "atomic anarchy comparison, exhaustive alpha,beta<=40, z<=12",
        violations,
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0002);
    let mut violations = 0usize;
    for _ in 0..100_000 {
        let lemma = BoundLemma::NonatomicAnarchy {
            alpha: rng.gen_range(-100.0..100.0),
            beta: rng.gen_range(-100.0..100.0),
            lambda: rng.gen_range(1e-3..20.0),
        };
        if !bounds::lemma_holds(&lemma)? {
            violations += 1;
        }
    }
    let nonatomic_anarchy = CriterionRow::zero_count(
        Family::Lemmas,
        "nonatomic anarchy comparison, 100000 random triples",
        violations,
    );

    let mut violations = 0usize;
    for alpha in 0..=25 {
        for beta in 0..=25 {
            for k in 0..=20 {
                let eps = f64::from(k) * 0.05;
                if !bounds::lemma_holds(&BoundLemma::AtomicStability { alpha, beta, eps })? {
                    violations += 1;
                }
            }
        }
    }
    let atomic_stability = CriterionRow::zero_count(
        Family::Lemmas,
        "atomic stability comparison, alpha,beta<=25 x eps grid",
        violations,
    );

    let mut violations = 0usize;
    for _ in 0..100_000 {
        let lemma = BoundLemma::NonatomicStability {
            alpha: rng.gen_range(-100.0..100.0),
            beta: rng.gen_range(-100.0..100.0),
            eps: rng.gen_range(0.0..=1.0),
        };
        if !bounds::lemma_holds(&lemma)? {
            violations += 1;
        }
    }
    let nonatomic_stability = CriterionRow::zero_count(
        Family::Lemmas,
        "nonatomic stability comparison, 100000 random triples",
        violations,
    );

    Ok(vec![
        atomic_anarchy,
        nonatomic_anarchy,
        atomic_stability,
        nonatomic_stability,
    ])
}

fn bmw_rows(seed: u64) -> Result<Vec<CriterionRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0003);
    let mut rows = Vec::new();
    for (name, bundle) in bundled_nonatomic_instances()? {
        let game = nonatomic_game(&bundle);
        let AssignmentForm::Flow(equilibrium) = &bundle.equilibrium else {
            unreachable!("bundled flow instances designate flows")
        };
        let eps = bundle.metadata.parameters["epsilon"];
        let minimizer = minimize(game, Objective::Potential { eps }, &SolveOptions::default())?;
        let mut worst_eq = f64::INFINITY;
        let mut worst_var = f64::INFINITY;
        for _ in 0..100 {
            let alt = random_flow(&mut rng, game);
            worst_eq = worst_eq.min(game.bmw_check(equilibrium, &alt, eps)?.slack);
            worst_var = worst_var.min(game.variational_check(&minimizer.flow, &alt, eps)?.slack);
        }
        rows.push(CriterionRow::at_least(
            Family::Bmw,
            format!("{name}: worst equilibrium-inequality slack, 100 random flows"),
            0.0,
            worst_eq,
            1e-6,
        ));
        rows.push(CriterionRow::at_least(
            Family::Bmw,
            format!("{name}: worst variational slack, 100 random flows"),
            0.0,
            worst_var,
            1e-6,
        ));
    }
    Ok(rows)
}

/// Rows for the bound table on an `eps` grid, as CSV.
pub fn bounds_csv(start: f64, end: f64, step: f64) -> Result<String> {
    if !(step > 0.0) || end < start || !(start >= 0.0) {
        return Err(crate::error::Error::Domain(format!(
            "bad grid {start}:{end}:{step}"
        )));
    }
    let mut out = String::from(
        "epsilon,z_atomic,z_nonatomic,atomic_poa,atomic_pos_upper,atomic_pos_lower,nonatomic_poa,nonatomic_poa_lower_large,nonatomic_pos\n",
    );
    let mut k = 0u64;
    loop {
        let eps = start + step * k as f64;
        if eps > end + step * 1e-9 {
            break;
        }
        let row = bounds::bound_report(eps)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.epsilon,
            row.z_atomic,
            row.z_nonatomic,
            row.atomic_poa,
            row.atomic_pos_upper,
            row.atomic_pos_lower,
            row.nonatomic_poa,
            row.nonatomic_poa_lower_large
                .map(|v| v.to_string())
                .unwrap_or_default(),
            row.nonatomic_pos
        ));
        k += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for family in Family::all() {
            let parsed: Family = family.name().parse().unwrap();
            assert_eq!(parsed, family);
        }
        assert!("no-such-family".parse::<Family>().is_err());
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(1.5773502691896257, 12), 1.57735026919);
        assert_eq!(round_sig(0.0, 12), 0.0);
        assert_eq!(round_sig(-2.5, 12), -2.5);
        assert!(round_sig(f64::INFINITY, 12).is_infinite());
    }

    #[test]
    fn csv_has_one_row_per_grid_point() {
        let csv = bounds_csv(0.0, 1.0, 0.25).unwrap();
        assert_eq!(csv.lines().count(), 1 + 5);
        assert!(bounds_csv(1.0, 0.0, 0.1).is_err());
        assert!(bounds_csv(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn a_failing_row_fails_the_report() {
        let row = CriterionRow::close(Family::Pigou, "tampered", 1.0, 2.0, 1e-9);
        assert!(!row.pass);
        let report = ReproductionReport {
            seed: 0,
            rows: vec![row],
            pass: false,
        };
        assert_eq!(report.failing().len(), 1);
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().contains("tampered"));
    }

    #[test]
    fn report_json_is_rounded() {
        let report = ReproductionReport {
            seed: 7,
            rows: vec![CriterionRow::close(
                Family::Pigou,
                "check",
                1.0 / 3.0,
                1.0 / 3.0,
                1e-9,
            )],
            pass: true,
        };
        let value = report.to_json_value();
        let text = value.to_string();
        assert!(text.contains("0.333333333333"), "{text}");
        assert!(!text.contains("0.3333333333333333"), "{text}");
    }
}
