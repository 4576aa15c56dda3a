//! Soundness, concealing and binding of the three schemes.
//!
//! Exact figures come from enumerating channel supports; Monte Carlo
//! figures come from full sessions run through the protocol engine with
//! seeded, sharded random streams.
//!
//! Concealing distances use `Σ |P(·|0) - P(·|1)|`, twice the total-variation
//! distance; reports print both.

pub mod lattice;
pub mod montecarlo;
pub mod report;
pub mod sessions;
pub mod simple;
pub mod twirl_check;

pub use lattice::{
    best_reveals, binding_search, binding_search_finite_precision, concealing_bound, concealing_exact,
    concealing_exact_with_budget, reveal_probability, soundness_exact, BindingAnalysis, BindingWitness,
    ConcealingAnalysis, PayloadBinding,
};
pub use montecarlo::{estimate, wilson_interval, Estimate};
pub use report::{parse_report, Report, Section, Value};
pub use sessions::{
    four_symbol_cheat_monte_carlo,    lattice_cheat_monte_carlo, max_rotation_error, parallel_flip_exact, parallel_flip_monte_carlo,
    soundness_monte_carlo,
};
pub use simple::{
    alpha_grid, cheat_curve_continuous, continuous_analysis, four_symbol_analysis, CheatRow,
    ContinuousAnalysis, FourSymbolAnalysis,
};
pub use twirl_check::{cyclic_twirl_check, haar_twirl_check, CyclicTwirlCheck, HaarTwirlCheck};

use crate::error::Result;
use crate::lattice::{LatticeParams, Predicate};
use crate::ExactProb;

/// Exact figures for one lattice parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSecurity {
    pub soundness: ExactProb,
    pub concealing: ConcealingAnalysis<ExactProb>,
    pub concealing_bound: ExactProb,
    pub binding_strict: BindingAnalysis<ExactProb>,
    pub binding_lenient: BindingAnalysis<ExactProb>,
}

impl LatticeSecurity {
    pub fn bound_holds(&self) -> bool {
        self.concealing.distance <= self.concealing_bound
    }

    /// Binding analysis for the predicate Bob actually runs.
    pub fn binding(&self, predicate: Predicate) -> &BindingAnalysis<ExactProb> {
        match predicate {
            Predicate::Strict => &self.binding_strict,
            Predicate::Lenient => &self.binding_lenient,
        }
    }

    /// Appends `soundness`, `concealing` and `binding` sections.
    pub fn write(&self, report: &mut Report, predicate: Predicate) {
        report
            .section("soundness")
            .text("method", "exact")
            .exact("probability", &self.soundness);

        let c = &self.concealing;
        report
            .section("concealing")
            .text("method", "exact")
            .exact("distance", &c.distance)
            .exact("total_variation", &c.total_variation())
            .exact("bound", &self.concealing_bound)
            .flag("bound_holds", self.bound_holds())
            .exact("boundary_mass", &c.boundary_mass)
            .exact("interior_max_gap", &c.interior_max_gap)
            .text("note", "distance is the sum of |P(a'|0) - P(a'|1)|, twice the total variation");

        let b = report.section("binding");
        b.text("method", "exact");
        b.text("predicate", predicate.as_str());
        for (name, a) in [("strict", &self.binding_strict), ("lenient", &self.binding_lenient)] {
            b.exact(&format!("flip_{name}"), &a.flip.probability);
            b.text(&format!("flip_{name}_commit"), a.flip.commit.to_string());
            b.text(&format!("flip_{name}_reveal"), a.flip.reveal.to_string());
        }
        b.exact("sum_max", &self.binding(predicate).sum_max);
        b.text("sum_max_commit", self.binding(predicate).sum_commit.to_string());
        b.flag(
            "lenient_dominates_strict",
            self.binding_lenient.flip.probability >= self.binding_strict.flip.probability,
        );
        b.text(
            "predicate_note",
            "strict rejects a zero difference (flip 1/(2d)); lenient accepts it (flip 1/d)",
        );
    }
}

/// Runs every exact lattice analysis under the given enumeration budget.
pub fn analyze_lattice(params: &LatticeParams<f64>, budget: u128) -> Result<LatticeSecurity> {
    Ok(LatticeSecurity {
        soundness: soundness_exact(params, budget)?,
        concealing: concealing_exact_with_budget(params, budget)?,
        concealing_bound: concealing_bound(params.d(), params.l())?,
        binding_strict: binding_search(params, Predicate::Strict),
        binding_lenient: binding_search(params, Predicate::Lenient),
    })
}
