//! Deterministic models of personal autonomy in law.
//!
//! * [`equilibrium`]: the linear rights/duties model of taxpayer autonomy
//!   and its legal equilibrium, with SVG and ASCII diagrams.
//! * [`adjudicator`]: a rule-based judge for tax penalty disputes that
//!   writes motivated judgments.
//! * [`court`]: a constitutional court over robot deactivation and
//!   uninstallation requests, with a lawyer agent that learns case-law.
//! * [`formats`]: case files, constitution files, replay scripts and trace
//!   exports.
//!
//! Amounts are exact fixed-point decimals ([`money`]); results do not depend
//! on the platform.

pub mod adjudicator;
pub mod cli;
pub mod court;
pub mod equilibrium;
pub mod formats;
pub mod money;

pub use adjudicator::{adjudicate, assess_obligation, render_judgment, RuleParams, TaxCase, Verdict};
pub use court::{
    decide, default_constitution, replay, run_simulation, Constitution, CourtRecord, LawyerState,
    RequestType, SimulationTrace,
};
pub use equilibrium::{
    evaluate, model_from_tax_params, render_diagram, solve_equilibrium, Equilibrium,
    EquilibriumPoint, LinearFn, LinearLawModel,
};
pub use money::{
    approx_eq, format_money_2dp, format_percent_0dp, mul_rate, parse_money, parse_rate, Money,
    RationalMoney, Rate,
};
