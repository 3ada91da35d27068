//! Linear model of taxpayer autonomy.
//!
//! Exercised freedom (declared income `I`) maps to responsibility along two
//! lines. The rights line is the tax the taxpayer assesses on their own,
//! `R(I) = t·I`. The duties line is what the State imposes after an audit
//! that finds `E` of evaded tax: the unpaid tax plus a penalty on it, plus the
//! tax already paid, `D(I) = (1 + p)(E − t·I) + t·I`. The two lines meet at
//! the legal equilibrium.
//!
//! All arithmetic is exact over rationals; nothing is rounded until display.

mod diagram;

pub use diagram::{
    render_ascii, render_diagram, render_svg, Diagram, DiagramError, DiagramOptions,
    ASCII_HEIGHT, ASCII_WIDTH,
};

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::money::{format_rational_fixed, Money, RationalMoney, Rate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("{parameter} = {value} is out of range (expected {expected})")]
    OutOfRange {
        parameter: &'static str,
        value: String,
        expected: &'static str,
    },
}

/// `y = slope·x + intercept`, with `x` and `y` in whole currency units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFn {
    pub slope: BigRational,
    pub intercept: RationalMoney,
}

impl LinearFn {
    pub fn new(slope: BigRational, intercept: impl Into<RationalMoney>) -> Self {
        LinearFn {
            slope,
            intercept: intercept.into(),
        }
    }

    pub fn through_origin(slope: BigRational) -> Self {
        LinearFn::new(slope, RationalMoney::zero())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        &self.slope * x + self.intercept.as_ratio()
    }

    /// The same line with both axes divided by `scale`.
    pub(crate) fn rescaled(&self, scale: &BigRational) -> LinearFn {
        LinearFn {
            slope: self.slope.clone(),
            intercept: RationalMoney::new(self.intercept.as_ratio() / scale),
        }
    }

    /// Human-readable equation in the variable `var`, e.g. `552500000 - 0.045 × I`.
    pub fn describe(&self, var: &str) -> String {
        let slope = render_exact(&self.slope.abs());
        let term = if self.slope.is_one() {
            var.to_string()
        } else {
            format!("{slope} × {var}")
        };
        match (self.intercept.is_zero(), self.slope.is_zero()) {
            (_, true) => render_exact(self.intercept.as_ratio()),
            (true, false) if self.slope.is_negative() => format!("-{term}"),
            (true, false) => term,
            (false, false) => {
                let op = if self.slope.is_negative() { '-' } else { '+' };
                format!("{} {op} {term}", render_exact(self.intercept.as_ratio()))
            }
        }
    }
}

/// Renders a rational as a terminating decimal when it has one, otherwise as
/// a fraction.
fn render_exact(value: &BigRational) -> String {
    let mut denom = value.denom().clone();
    let mut digits = 0u32;
    for p in [2u8, 5] {
        while (&denom % BigInt::from(p)).is_zero() {
            denom /= BigInt::from(p);
        }
    }
    if !denom.is_one() {
        return format!("{}/{}", value.numer(), value.denom());
    }
    while !(value * BigInt::from(10u8).pow(digits)).is_integer() {
        digits += 1;
    }
    format_rational_fixed(value, digits)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisLabels {
    pub x: String,
    pub y: String,
}

impl Default for AxisLabels {
    fn default() -> Self {
        AxisLabels {
            x: "Freedom (declared income in UAH millions)".to_string(),
            y: "Responsibility (tax & penalty in UAH millions)".to_string(),
        }
    }
}

/// Rights and duties lines over the same freedom axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearLawModel {
    rights: LinearFn,
    duties: LinearFn,
    pub axis_labels: AxisLabels,
    /// Display divisor; `1_000_000` shows amounts in millions.
    unit_scale: u64,
    /// Income beyond which the duties line is an extrapolation (the point
    /// where the underlying tax debt reaches zero), when known.
    duties_domain_end: Option<RationalMoney>,
    /// When set, past `duties_domain_end` the imposed amount follows the
    /// rights line (no debt, no penalty) instead of the extrapolated line.
    strict_domain: bool,
}

pub const DEFAULT_UNIT_SCALE: u64 = 1_000_000;

impl LinearLawModel {
    pub fn new(rights: LinearFn, duties: LinearFn) -> Result<Self, ModelError> {
        if rights.slope.is_negative() {
            return Err(ModelError::OutOfRange {
                parameter: "rights slope",
                value: render_exact(&rights.slope),
                expected: ">= 0",
            });
        }
        Ok(LinearLawModel {
            rights,
            duties,
            axis_labels: AxisLabels::default(),
            unit_scale: DEFAULT_UNIT_SCALE,
            duties_domain_end: None,
            strict_domain: false,
        })
    }

    pub fn rights(&self) -> &LinearFn {
        &self.rights
    }

    pub fn duties(&self) -> &LinearFn {
        &self.duties
    }

    pub fn unit_scale(&self) -> u64 {
        self.unit_scale
    }

    pub fn with_unit_scale(mut self, unit_scale: u64) -> Result<Self, ModelError> {
        if unit_scale == 0 {
            return Err(ModelError::OutOfRange {
                parameter: "unit_scale",
                value: "0".to_string(),
                expected: "> 0",
            });
        }
        self.unit_scale = unit_scale;
        Ok(self)
    }

    pub fn with_axis_labels(mut self, labels: AxisLabels) -> Self {
        self.axis_labels = labels;
        self
    }

    pub fn with_strict_domain(mut self, strict: bool) -> Self {
        self.strict_domain = strict;
        self
    }

    pub fn strict_domain(&self) -> bool {
        self.strict_domain
    }

    pub fn duties_domain_end(&self) -> Option<&RationalMoney> {
        self.duties_domain_end.as_ref()
    }

    fn duties_value(&self, income: &BigRational) -> BigRational {
        match &self.duties_domain_end {
            Some(end) if self.strict_domain && income > end.as_ratio() => self.rights.eval(income),
            _ => self.duties.eval(income),
        }
    }
}

/// Builds the model from the audited evasion total `E`, tax rate `t` and
/// penalty rate `p`: rights `t·I`, duties `(1 + p)·E − p·t·I`.
pub fn model_from_tax_params(
    evasion_total: Money,
    tax_rate: Rate,
    penalty_rate: Rate,
) -> Result<LinearLawModel, ModelError> {
    if evasion_total.is_negative() {
        return Err(ModelError::OutOfRange {
            parameter: "evasion_total",
            value: evasion_total.to_string(),
            expected: ">= 0",
        });
    }
    if tax_rate <= Rate::ZERO || tax_rate >= Rate::ONE {
        return Err(ModelError::OutOfRange {
            parameter: "tax_rate",
            value: tax_rate.to_string(),
            expected: "strictly between 0 and 1",
        });
    }
    if penalty_rate < Rate::ZERO {
        return Err(ModelError::OutOfRange {
            parameter: "penalty_rate",
            value: penalty_rate.to_string(),
            expected: ">= 0",
        });
    }
    let t = tax_rate.to_rational();
    let p = penalty_rate.to_rational();
    let evasion = RationalMoney::from(evasion_total);
    let rights = LinearFn::through_origin(t.clone());
    let duties = LinearFn::new(
        -(&p * &t),
        RationalMoney::new((BigRational::one() + &p) * evasion.as_ratio()),
    );
    let mut model = LinearLawModel::new(rights, duties)?;
    model.duties_domain_end = Some(RationalMoney::new(evasion.as_ratio() / &t));
    Ok(model)
}

/// Both lines evaluated at the same income.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineValues {
    pub rights: RationalMoney,
    pub duties: RationalMoney,
}

/// Evaluates both lines exactly. The duties line is extrapolated past the
/// point where the tax debt turns negative unless the model is strict.
pub fn evaluate(model: &LinearLawModel, income: &RationalMoney) -> LineValues {
    LineValues {
        rights: RationalMoney::new(model.rights.eval(income.as_ratio())),
        duties: RationalMoney::new(model.duties_value(income.as_ratio())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquilibriumPoint {
    pub income: RationalMoney,
    pub responsibility: RationalMoney,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equilibrium {
    Point(EquilibriumPoint),
    /// The lines cross at negative income.
    OutsideDomain(EquilibriumPoint),
    /// The lines are identical.
    Coincident,
    /// Parallel, distinct lines.
    NoEquilibrium,
}

impl Equilibrium {
    pub fn point(&self) -> Option<&EquilibriumPoint> {
        match self {
            Equilibrium::Point(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for Equilibrium {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equilibrium::Point(p) => write!(
                f,
                "legal equilibrium at income {} ({}), responsibility {}",
                p.income.to_fixed(2),
                p.income,
                p.responsibility.to_fixed(2)
            ),
            Equilibrium::OutsideDomain(p) => write!(
                f,
                "equilibrium outside domain at income {} ({})",
                p.income.to_fixed(2),
                p.income
            ),
            Equilibrium::Coincident => f.write_str("all points coincide"),
            Equilibrium::NoEquilibrium => f.write_str("no equilibrium (parallel lines)"),
        }
    }
}

/// Intersection of the rights and duties lines.
pub fn solve_equilibrium(model: &LinearLawModel) -> Equilibrium {
    let rights = &model.rights;
    let duties = &model.duties;
    let slope_gap = &rights.slope - &duties.slope;
    let intercept_gap = duties.intercept.as_ratio() - rights.intercept.as_ratio();
    if slope_gap.is_zero() {
        return if intercept_gap.is_zero() {
            Equilibrium::Coincident
        } else {
            Equilibrium::NoEquilibrium
        };
    }
    let income = intercept_gap / slope_gap;
    let point = EquilibriumPoint {
        responsibility: RationalMoney::new(rights.eval(&income)),
        income: RationalMoney::new(income),
    };
    if point.income.is_negative() {
        Equilibrium::OutsideDomain(point)
    } else {
        Equilibrium::Point(point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::money::{parse_money, parse_rate};

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn reference_model() -> LinearLawModel {
        model_from_tax_params(
            parse_money("442000000").unwrap(),
            parse_rate("0.18").unwrap(),
            parse_rate("0.25").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn reference_duties_line() {
        let model = reference_model();
        assert_eq!(model.duties().intercept.as_ratio(), &ratio(552_500_000, 1));
        assert_eq!(model.duties().slope, ratio(-45, 1000));
        assert_eq!(model.rights().slope, ratio(18, 100));
        assert_eq!(model.duties().describe("I"), "552500000 - 0.045 × I");
        assert_eq!(model.rights().describe("I"), "0.18 × I");
    }

    #[test]
    fn reference_equilibrium() {
        let eq = solve_equilibrium(&reference_model());
        let point = eq.point().expect("proper equilibrium");
        assert_eq!(point.income.as_ratio(), &ratio(22_100_000_000, 9));
        assert_eq!(point.responsibility.as_ratio(), &ratio(442_000_000, 1));
        assert_eq!(point.income.to_fixed(2), "2455555555.56");
    }

    #[test]
    fn zero_evasion_meets_at_origin() {
        let model = model_from_tax_params(
            Money::ZERO,
            parse_rate("0.3").unwrap(),
            parse_rate("0.1").unwrap(),
        )
        .unwrap();
        assert!(model.duties().intercept.is_zero());
        let point = solve_equilibrium(&model).point().unwrap().clone();
        assert!(point.income.is_zero());
        assert!(point.responsibility.is_zero());
    }

    #[test]
    fn symbolic_small_model() {
        let model = model_from_tax_params(
            parse_money("100").unwrap(),
            parse_rate("0.5").unwrap(),
            parse_rate("1").unwrap(),
        )
        .unwrap();
        assert_eq!(model.duties().describe("I"), "200 - 0.5 × I");
        assert_eq!(model.rights().describe("I"), "0.5 × I");
        let values = evaluate(&model, &parse_money("100").unwrap().into());
        assert_eq!(values.rights.as_ratio(), &ratio(50, 1));
        assert_eq!(values.duties.as_ratio(), &ratio(150, 1));
    }

    #[test]
    fn evaluate_reference_intercepts_and_crossing() {
        let model = reference_model();
        let at_zero = evaluate(&model, &RationalMoney::zero());
        assert!(at_zero.rights.is_zero());
        assert_eq!(at_zero.duties.as_ratio(), &ratio(552_500_000, 1));
        let at_eq = evaluate(&model, &RationalMoney::new(ratio(22_100_000_000, 9)));
        assert_eq!(at_eq.rights.as_ratio(), &ratio(442_000_000, 1));
        assert_eq!(at_eq.duties.as_ratio(), &ratio(442_000_000, 1));
    }

    #[test]
    fn extrapolation_and_strict_domain() {
        let model = reference_model();
        let far = RationalMoney::new(ratio(5_000_000_000, 1));
        // 552.5M - 0.045 * 5000M = 327.5M
        assert_eq!(evaluate(&model, &far).duties.as_ratio(), &ratio(327_500_000, 1));
        let strict = model.with_strict_domain(true);
        assert_eq!(evaluate(&strict, &far).duties.as_ratio(), &ratio(900_000_000, 1));
        let before = RationalMoney::new(ratio(1_000_000_000, 1));
        assert_eq!(
            evaluate(&strict, &before).duties.as_ratio(),
            &ratio(507_500_000, 1)
        );
    }

    #[test]
    fn degenerate_outcomes() {
        let line = LinearFn::through_origin(ratio(18, 100));
        let same = LinearLawModel::new(line.clone(), line.clone()).unwrap();
        assert_eq!(solve_equilibrium(&same), Equilibrium::Coincident);
        let shifted = LinearFn::new(ratio(18, 100), RationalMoney::new(ratio(1, 1)));
        let parallel = LinearLawModel::new(line, shifted).unwrap();
        assert_eq!(solve_equilibrium(&parallel), Equilibrium::NoEquilibrium);
        let behind = LinearLawModel::new(
            LinearFn::new(ratio(1, 1), RationalMoney::new(ratio(10, 1))),
            LinearFn::new(ratio(-1, 1), RationalMoney::new(ratio(4, 1))),
        )
        .unwrap();
        match solve_equilibrium(&behind) {
            Equilibrium::OutsideDomain(p) => assert_eq!(p.income.as_ratio(), &ratio(-3, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parameter_validation() {
        let e = parse_money("1").unwrap();
        let ok = parse_rate("0.2").unwrap();
        let err = model_from_tax_params(parse_money("-1").unwrap(), ok, ok).unwrap_err();
        assert!(err.to_string().contains("evasion_total"));
        for t in ["0", "1", "1.5", "-0.1"] {
            let err = model_from_tax_params(e, parse_rate(t).unwrap(), ok).unwrap_err();
            assert!(err.to_string().contains("tax_rate"), "{t}");
        }
        let err = model_from_tax_params(e, ok, parse_rate("-0.01").unwrap()).unwrap_err();
        assert!(err.to_string().contains("penalty_rate"));
        assert!(model_from_tax_params(e, ok, Rate::ZERO).is_ok());
        assert!(LinearLawModel::new(
            LinearFn::through_origin(ratio(-1, 2)),
            LinearFn::through_origin(ratio(1, 2))
        )
        .is_err());
    }

    #[test]
    fn describe_edge_forms() {
        assert_eq!(LinearFn::through_origin(ratio(1, 1)).describe("I"), "I");
        assert_eq!(LinearFn::through_origin(ratio(-1, 3)).describe("x"), "-1/3 × x");
        assert_eq!(
            LinearFn::new(BigRational::zero(), RationalMoney::new(ratio(5, 2))).describe("I"),
            "2.5"
        );
        assert_eq!(
            LinearFn::new(ratio(2, 1), RationalMoney::new(ratio(7, 1))).describe("I"),
            "7 + 2 × I"
        );
    }
}
