//! The checks run by `verify`, each producing a named [`Report`].

use num_traits::{One, Zero};
use pi1_haar::convalg::verify_algebra_iso;
use pi1_haar::cover::section;
use pi1_haar::edgepath::enumerate_ball;
use pi1_haar::gpdcore::{
    check_axioms, check_commuting_diagram, check_kinetics_inverse, check_orbit_equality, check_quotient_bijection,
    EquivalenceBibundle, FundamentalGroupoid,
};
use pi1_haar::haar::{
    direct_weight_oracle, haar_from_base_measure, haar_from_transversal, transversal_from_haar, verify_group_case,
    verify_haar, verify_section_independence,
};
use pi1_haar::measures::{
    averaging_family, check_equivariance, compose_family, counting_family, cutoff, mu_surjectivity_witness,
    recover_base_measure, FinSuppFn,
};
use pi1_haar::{
    sampling, Arrow, BaseMeasureQ, DeckAction, Error, HaarSystemQ, MeasureFamilyQ, MultiGraph, Rational, Report,
    Result, Section, Transversal, TrivializationWeightsQ, VertexId,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// Test hooks that break one ingredient of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mutation {
    /// Set the Haar weight of one length-one arrow to zero.
    ZeroWeight,
    /// Double the Haar weight of one length-one arrow.
    #[value(alias = "weight")]
    DoubleWeight,
    /// Compose arrows without cancelling backtracks.
    SkipReduction,
    /// Double one value of the counting family.
    PerturbFamily,
}

impl Mutation {
    pub fn name(self) -> &'static str {
        match self {
            Mutation::ZeroWeight => "zero-weight",
            Mutation::DoubleWeight => "double-weight",
            Mutation::SkipReduction => "skip-reduction",
            Mutation::PerturbFamily => "perturb-family",
        }
    }
}

/// A graph with base point, tree section, deck action and base measure.
pub struct Fixture<'g> {
    pub graph: &'g MultiGraph,
    pub transversal: Transversal<'g>,
    pub section: Section,
    pub deck: DeckAction,
    pub nu: BaseMeasureQ,
}

impl<'g> Fixture<'g> {
    pub fn new(graph: &'g MultiGraph, base: VertexId, nu: BaseMeasureQ) -> Result<Self> {
        if nu.len() != graph.vertex_count() {
            return Err(Error::AmbientMismatch(format!(
                "measure has {} weights for {} vertices",
                nu.len(),
                graph.vertex_count()
            )));
        }
        nu.require_full_support()?;
        let transversal = Transversal::new(graph, base)?;
        let tree = transversal.tree();
        let section = section(&transversal, &tree)?;
        let deck = DeckAction::new(&transversal, &tree)?;
        Ok(Self { graph, transversal, section, deck, nu })
    }

    pub fn base(&self) -> VertexId {
        self.transversal.base()
    }

    pub fn haar(&self) -> Result<HaarSystemQ> {
        haar_from_base_measure(&self.nu, &self.transversal, &self.section)
    }

    pub fn bibundle(&self) -> Result<EquivalenceBibundle<'g>> {
        EquivalenceBibundle::new(self.transversal, self.section.clone())
    }
}

/// Turns an error into a single violation of the named check.
pub fn guarded(name: &str, run: impl FnOnce() -> Result<Report>) -> Report {
    run().unwrap_or_else(|e| {
        let mut r = Report::new(name);
        r.fail(format!("{}: {e}", e.kind()));
        r
    })
}

/// `system`, the system built from `ν∘μ` on the transversal, and
/// `γ ↦ ν(s(γ))` agree on the ball.
pub fn oracle_agreement(fx: &Fixture<'_>, system: &HaarSystemQ, radius: usize) -> Result<Report> {
    let lam = compose_family(&fx.nu, &counting_family(&fx.transversal))?;
    let via_transversal = haar_from_transversal(&lam, &fx.transversal, &fx.section, radius)?;
    let direct = direct_weight_oracle(&fx.nu);
    let mut report = Report::new("oracle_agreement");
    for gamma in enumerate_ball(fx.graph, radius) {
        let expected = direct.weight(&gamma);
        report.check(system.weight(&gamma) == expected, || format!("constructed weight differs at {gamma}"));
        report.check(via_transversal.weight(&gamma) == expected, || format!("transversal route differs at {gamma}"));
    }
    Ok(report)
}

/// Sections `u ↦ ρ·c_u` for the identity, every generator, one random loop
/// of length at most three, and one random loop per vertex all induce the
/// same system.
pub fn section_independence<R: Rng + ?Sized>(fx: &Fixture<'_>, radius: usize, rng: &mut R) -> Result<Report> {
    let v = fx.graph.vertex_count();
    let x = fx.base();
    let mut choices: Vec<Vec<Arrow>> = vec![vec![Arrow::unit(x); v]];
    choices.extend(fx.deck.generators().iter().map(|g| vec![g.clone(); v]));
    let loops: Vec<Arrow> = fx.transversal.ball(3).into_iter().filter(|a| a.is_loop_at(x) && !a.is_unit()).collect();
    if let Some(rho) = loops.choose(rng) {
        choices.push(vec![rho.clone(); v]);
        choices.push((0..v).map(|_| loops.choose(rng).cloned().expect("nonempty")).collect());
    }
    let mut report = Report::new("section_independence");
    for rhos in choices {
        let other = fx.section.retranslated(&rhos)?;
        report.absorb(verify_section_independence(&fx.nu, &fx.transversal, &fx.section, &other, radius)?);
    }
    Ok(report)
}

/// Recovering `ν` from `ν∘family` with the normalized section cutoff, for
/// the fixture's `ν` and `extra` random ones.
pub fn base_measure_recovery<R: Rng + ?Sized>(
    fx: &Fixture<'_>,
    family: &MeasureFamilyQ,
    extra: usize,
    rng: &mut R,
) -> Result<Report> {
    let h = cutoff::<Rational>(&fx.section);
    let mut measures = vec![fx.nu.clone()];
    measures.extend((0..extra).map(|_| sampling::positive_measure(rng, fx.graph.vertex_count())));
    let mut report = Report::new("base_measure_recovery");
    for nu in measures {
        let lam = compose_family(&nu, family)?;
        let back = recover_base_measure(&lam, &h)?;
        report.check(back == nu, || format!("recovered {:?} from {:?}", back.weights(), nu.weights()));
    }
    Ok(report)
}

/// `system ↦ λ^x ↦` system again is the identity on the ball.
pub fn transversal_round_trip(fx: &Fixture<'_>, system: &HaarSystemQ, radius: usize) -> Result<Report> {
    let lam = transversal_from_haar(system, fx.base());
    let back = haar_from_transversal(&lam, &fx.transversal, &fx.section, radius)?;
    let mut report = Report::new("transversal_round_trip");
    for gamma in enumerate_ball(fx.graph, radius) {
        report.check(back.weight(&gamma) == system.weight(&gamma), || format!("round trip changes {gamma}"));
    }
    Ok(report)
}

fn transversal_samples<R: Rng + ?Sized>(
    fx: &Fixture<'_>,
    radius: usize,
    random: usize,
    rng: &mut R,
) -> Vec<FinSuppFn<Arrow, Rational>> {
    let ball = fx.transversal.ball(radius);
    let mut samples: Vec<_> = ball.iter().map(|a| FinSuppFn::indicator([a.clone()])).collect();
    samples.extend((0..random).map(|_| sampling::function(rng, &ball, 4)));
    samples
}

/// The family is equivariant under the deck generators.
pub fn equivariance<R: Rng + ?Sized>(
    fx: &Fixture<'_>,
    family: &MeasureFamilyQ,
    radius: usize,
    random: usize,
    rng: &mut R,
) -> Report {
    let samples = transversal_samples(fx, radius, random, rng);
    check_equivariance(family, &fx.deck.symmetric_generators(), |rho, y| fx.deck.act(rho, y), &samples)
}

/// Orbit sums are deck-invariant, and every function on vertices is one.
pub fn averaging<R: Rng + ?Sized>(fx: &Fixture<'_>, radius: usize, random: usize, rng: &mut R) -> Result<Vec<Report>> {
    let samples = transversal_samples(fx, radius, random, rng);
    let mut invariance = Report::new("averaging_invariance");
    for rho in fx.deck.symmetric_generators() {
        for f in &samples {
            let moved = f.try_push_keys(|y| fx.deck.act(&rho, y))?;
            invariance.check(averaging_family(&fx.deck, f)? == averaging_family(&fx.deck, &moved)?, || {
                format!("averaging changes under {rho}")
            });
        }
    }
    let mut surjectivity = Report::new("averaging_surjectivity");
    let v = fx.graph.vertex_count();
    for _ in 0..random.max(1) {
        let big_f: FinSuppFn<VertexId, Rational> =
            FinSuppFn::from_pairs((0..v).map(|u| (VertexId(u), sampling::gaussian(rng))));
        let witness = mu_surjectivity_witness(&big_f, &fx.section);
        surjectivity.check(averaging_family(&fx.deck, &witness)? == big_f, || "witness does not average back".into());
    }
    Ok(vec![invariance, surjectivity])
}

pub struct SuiteOptions {
    pub radius: usize,
    pub trials: usize,
    pub mutation: Option<Mutation>,
}

pub struct SuiteRun {
    pub reports: Vec<Report>,
    pub group_case: Option<(usize, bool)>,
}

impl SuiteRun {
    pub fn is_clean(&self) -> bool {
        self.reports.iter().all(Report::is_clean)
    }
}

/// `system` with the weight mutation applied, if any.
fn mutated_system(fx: &Fixture<'_>, clean: HaarSystemQ, mutation: Option<Mutation>) -> HaarSystemQ {
    let target =
        enumerate_ball(fx.graph, 1).into_iter().find(|a| !a.is_unit()).unwrap_or_else(|| Arrow::unit(fx.base()));
    match mutation {
        Some(Mutation::ZeroWeight) => clean.with_override(target, Rational::zero()),
        Some(Mutation::DoubleWeight) => {
            let doubled = clean.weight(&target) * Rational::from_integer(2.into());
            clean.with_override(target, doubled)
        }
        _ => clean,
    }
}

/// Every check of the suite, in a fixed order, drawing all randomness from
/// `rng`.
pub fn run<R: Rng + ?Sized>(
    fx: &Fixture<'_>,
    weights: &TrivializationWeightsQ,
    opts: &SuiteOptions,
    rng: &mut R,
) -> Result<SuiteRun> {
    let radius = opts.radius;
    let small = radius.min(3);
    let tiny = radius.min(2);
    let mut reports = Vec::new();

    let axioms = if opts.mutation == Some(Mutation::SkipReduction) {
        check_axioms(&FundamentalGroupoid::without_reduction(fx.graph), tiny)
    } else {
        check_axioms(&FundamentalGroupoid::new(fx.graph), tiny)
    };
    reports.push(axioms);

    let system = mutated_system(fx, fx.haar()?, opts.mutation);
    let haar = verify_haar(&FundamentalGroupoid::new(fx.graph), &system, radius, opts.trials, rng);
    reports.extend([haar.support, haar.invariance]);
    reports.push(guarded("oracle_agreement", || oracle_agreement(fx, &system, radius)));
    reports.push(guarded("section_independence", || section_independence(fx, radius, rng)));
    reports.push(guarded("transversal_round_trip", || transversal_round_trip(fx, &system, radius)));

    let mut family = counting_family(&fx.transversal);
    if opts.mutation == Some(Mutation::PerturbFamily) {
        let at = fx.section.arrow(VertexId(fx.graph.vertex_count() - 1)).clone();
        let value = family.fiber_weight(&at) + Rational::one();
        family = family.with_override(at, value);
    }
    reports.push(guarded("base_measure_recovery", || base_measure_recovery(fx, &family, 20, rng)));
    let random = opts.trials / 10;
    reports.push(equivariance(fx, &family, small, random, rng));
    match averaging(fx, small, random, rng) {
        Ok(rs) => reports.extend(rs),
        Err(e) => reports.push(guarded("averaging_invariance", || Err(e))),
    }

    let bibundle = fx.bibundle()?;
    reports.push(check_commuting_diagram(&bibundle, small));
    reports.push(check_kinetics_inverse(&bibundle, small));
    reports.push(check_quotient_bijection(&bibundle, small));
    reports.push(check_orbit_equality(&bibundle, tiny));

    match verify_algebra_iso(fx.graph, &fx.section, weights, opts.trials.min(100), opts.trials.min(30), small, rng) {
        Ok(rs) => reports.extend(rs),
        Err(e) => reports.push(guarded("algebra_iso", || Err(e))),
    }

    let mut group_case = None;
    if fx.graph.is_standard_cycle() {
        let n = fx.graph.vertex_count();
        let v = verify_group_case(n, &fx.nu, radius, opts.trials, rng)?;
        group_case = Some((n, v.is_clean()));
        reports.extend(v.reports);
    }
    Ok(SuiteRun { reports, group_case })
}
