//! Rule-based adjudication of tax penalty disputes.
//!
//! A plaintiff asks the court to nullify a tax penalty decision. The court
//! recomputes the outstanding obligation from the tax base and the tax paid,
//! then picks one of three outcomes in a fixed order: the tax was fully paid,
//! the authority's assessment was correct, or the assessment was wrong and is
//! nullified with the recalculated figures stated in the opinion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::money::{approx_eq, format_money_2dp, mul_rate, parse_money, Money, Rate};

/// Largest amount accepted on a case field: one trillion UAH.
pub const MAX_CASE_AMOUNT: Money = Money::from_micros(1_000_000_000_000 * 1_000_000);
/// Upper bound on the late-payment penalty rate (900%).
pub const MAX_LATE_PENALTY_RATE: Rate = Rate::from_steps(90_000);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CaseError {
    #[error("plaintiff must not be empty")]
    EmptyPlaintiff,
    #[error("{field}: `{value}` is negative")]
    Negative { field: &'static str, value: String },
    #[error("{field}: `{value}` has more than 2 fractional digits")]
    TooPrecise { field: &'static str, value: String },
    #[error("{field}: `{value}` exceeds the maximum case amount")]
    TooLarge { field: &'static str, value: String },
    #[error("{field}: {reason}")]
    Malformed { field: &'static str, reason: String },
}

impl CaseError {
    pub fn field(&self) -> &'static str {
        match self {
            CaseError::EmptyPlaintiff => "plaintiff",
            CaseError::Negative { field, .. }
            | CaseError::TooPrecise { field, .. }
            | CaseError::TooLarge { field, .. }
            | CaseError::Malformed { field, .. } => field,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamsError {
    #[error("tax_rate {0} must be strictly between 0 and 1")]
    TaxRate(Rate),
    #[error("late_penalty_rate {0} must be between 0 and 9")]
    LatePenaltyRate(Rate),
    #[error("tolerance {0} must be positive")]
    Tolerance(Money),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("verdict {claimed:?} does not follow from the case; the rules give {actual:?}")]
pub struct ConsistencyError {
    pub claimed: Verdict,
    pub actual: Verdict,
}

/// A validated claim to nullify a tax penalty decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxCase {
    plaintiff: String,
    /// The relevant tax base.
    income: Money,
    tax_paid: Money,
    assessed_debt: Money,
    assessed_penalty: Money,
}

impl TaxCase {
    pub fn new(
        plaintiff: impl Into<String>,
        income: Money,
        tax_paid: Money,
        assessed_debt: Money,
        assessed_penalty: Money,
    ) -> Result<Self, CaseError> {
        let plaintiff = plaintiff.into();
        if plaintiff.trim().is_empty() {
            return Err(CaseError::EmptyPlaintiff);
        }
        for (field, amount) in [
            ("tax_base", income),
            ("tax_paid", tax_paid),
            ("assessed_debt", assessed_debt),
            ("assessed_penalty", assessed_penalty),
        ] {
            check_amount(field, amount)?;
        }
        Ok(TaxCase {
            plaintiff,
            income,
            tax_paid,
            assessed_debt,
            assessed_penalty,
        })
    }

    /// Builds a case from decimal strings, reporting the offending field.
    pub fn parse(
        plaintiff: &str,
        income: &str,
        tax_paid: &str,
        assessed_debt: &str,
        assessed_penalty: &str,
    ) -> Result<Self, CaseError> {
        let amount = |field: &'static str, text: &str| {
            parse_money(text).map_err(|e| CaseError::Malformed {
                field,
                reason: e.to_string(),
            })
        };
        TaxCase::new(
            plaintiff,
            amount("tax_base", income)?,
            amount("tax_paid", tax_paid)?,
            amount("assessed_debt", assessed_debt)?,
            amount("assessed_penalty", assessed_penalty)?,
        )
    }

    pub fn plaintiff(&self) -> &str {
        &self.plaintiff
    }

    pub fn income(&self) -> Money {
        self.income
    }

    pub fn tax_paid(&self) -> Money {
        self.tax_paid
    }

    pub fn assessed_debt(&self) -> Money {
        self.assessed_debt
    }

    pub fn assessed_penalty(&self) -> Money {
        self.assessed_penalty
    }
}

fn check_amount(field: &'static str, amount: Money) -> Result<(), CaseError> {
    let value = || amount.to_string();
    if amount.is_negative() {
        return Err(CaseError::Negative { field, value: value() });
    }
    if amount.fractional_digits() > 2 {
        return Err(CaseError::TooPrecise { field, value: value() });
    }
    if amount > MAX_CASE_AMOUNT {
        return Err(CaseError::TooLarge { field, value: value() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleParams {
    tax_rate: Rate,
    late_penalty_rate: Rate,
    tolerance: Money,
}

impl Default for RuleParams {
    /// 18% corporate tax, 20% late-payment penalty, 0.01 UAH tolerance.
    fn default() -> Self {
        RuleParams {
            tax_rate: Rate::from_steps(1800),
            late_penalty_rate: Rate::from_steps(2000),
            tolerance: Money::from_cents(1).expect("constant"),
        }
    }
}

impl RuleParams {
    pub fn new(tax_rate: Rate, late_penalty_rate: Rate, tolerance: Money) -> Result<Self, ParamsError> {
        if tax_rate <= Rate::ZERO || tax_rate >= Rate::ONE {
            return Err(ParamsError::TaxRate(tax_rate));
        }
        if late_penalty_rate < Rate::ZERO || late_penalty_rate > MAX_LATE_PENALTY_RATE {
            return Err(ParamsError::LatePenaltyRate(late_penalty_rate));
        }
        if !tolerance.is_positive() {
            return Err(ParamsError::Tolerance(tolerance));
        }
        Ok(RuleParams {
            tax_rate,
            late_penalty_rate,
            tolerance,
        })
    }

    pub fn tax_rate(&self) -> Rate {
        self.tax_rate
    }

    pub fn late_penalty_rate(&self) -> Rate {
        self.late_penalty_rate
    }

    pub fn tolerance(&self) -> Money {
        self.tolerance
    }

    fn penalty_on(&self, debt: Money) -> Money {
        // bounded by MAX_CASE_AMOUNT * MAX_LATE_PENALTY_RATE < i64::MAX micros
        mul_rate(debt, self.late_penalty_rate).expect("bounded by case validation")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Nothing was owed; the penalty decision is nullified.
    FullyPaid,
    /// The authority's debt and penalty match the law; the claim fails.
    DecisionUpheld,
    /// The authority miscalculated; the decision is nullified and the
    /// correct figures are stated.
    DecisionNullifiedRecalculated {
        correct_debt: Money,
        allowed_penalty: Money,
    },
}

impl Verdict {
    pub fn favours_plaintiff(&self) -> bool {
        !matches!(self, Verdict::DecisionUpheld)
    }
}

/// `tax_rate × income − tax_paid`; negative on overpayment.
pub fn assess_obligation(case: &TaxCase, params: &RuleParams) -> Money {
    let due = mul_rate(case.income, params.tax_rate).expect("tax rate below one");
    due - case.tax_paid
}

pub fn adjudicate(case: &TaxCase, params: &RuleParams) -> Verdict {
    let obligation = assess_obligation(case, params);
    if !obligation.is_positive() {
        return Verdict::FullyPaid;
    }
    let allowed_penalty = params.penalty_on(obligation);
    if approx_eq(case.assessed_debt, obligation, params.tolerance)
        && approx_eq(case.assessed_penalty, allowed_penalty, params.tolerance)
    {
        Verdict::DecisionUpheld
    } else {
        Verdict::DecisionNullifiedRecalculated {
            correct_debt: obligation,
            allowed_penalty,
        }
    }
}

/// Adjudicates in parallel; results keep the input order.
pub fn adjudicate_all(cases: &[TaxCase], params: &RuleParams) -> Vec<Verdict> {
    cases.par_iter().map(|c| adjudicate(c, params)).collect()
}

const JUDGMENT_FOR_PLAINTIFF: &str =
    "For these reasons, the Court rules in favor of plaintiff to nullify tax penalty decision of defendant.";
const JUDGMENT_FOR_DEFENDANT: &str =
    "For these reasons, the Court rules in favor of defendant, that plaintiff recover nothing in this case.";

/// The motivated judgment: process, facts, law, opinion and ruling, in that
/// order, as one paragraph.
pub fn render_judgment(
    case: &TaxCase,
    verdict: &Verdict,
    params: &RuleParams,
) -> Result<String, ConsistencyError> {
    let actual = adjudicate(case, params);
    if actual != *verdict {
        return Err(ConsistencyError {
            claimed: *verdict,
            actual,
        });
    }
    let process = format!(
        "In the case of {} v. District Tax Office plaintiff asks the Court to nullify tax penalty decision, issued by defendant. ",
        case.plaintiff
    );
    let total = case.assessed_debt + case.assessed_penalty;
    let facts = format!(
        "Court found that relevant tax base is {} UAH. Plaintiff calculated, declared and paid corporate tax in sum of {} UAH. \
         Defendant more than month later conducted tax audit with result of tax recalculation and tax penalty decision \
         according to Articles 54.3.2, 116.1 of the Tax Code of Ukraine (TCU), increased tax obligation to {} UAH in total, \
         including additional amount of corporate tax {} UAH and penalty {} UAH. ",
        format_money_2dp(case.income),
        format_money_2dp(case.tax_paid),
        format_money_2dp(total),
        format_money_2dp(case.assessed_debt),
        format_money_2dp(case.assessed_penalty),
    );
    let law = format!(
        "Art. 167.1 of TCU setting corporate tax rate {} of income. \
         Delaying tax payment more than 30 days is punishable by a penalty {} of repaid amount of the tax debt according to Art. 126.1 of TCU, \
         that does not relieve the taxpayer from the obligation to pay full amount of the tax according to Art. 113.2 of TCU. ",
        params.tax_rate.percent_text(),
        params.late_penalty_rate.percent_text(),
    );
    let (opinion, judgment) = match verdict {
        Verdict::FullyPaid => (
            "So, plaintiff paid in due time full amount of corporate tax and no legal penalties can be imposed in such circumstances. "
                .to_string(),
            JUDGMENT_FOR_PLAINTIFF,
        ),
        Verdict::DecisionUpheld => (
            "So, defendant issued appropriate tax penalty decision, based on law and correct calculations. ".to_string(),
            JUDGMENT_FOR_DEFENDANT,
        ),
        Verdict::DecisionNullifiedRecalculated {
            correct_debt,
            allowed_penalty,
        } => (
            format!(
                "Considering that plaintiff's tax debt {} UAH allows to impose penalty in amount of {} UAH, \
                 defendant's tax penalty decision does not meet requirements of the law and must be nullified, \
                 despite defendant can issue appropriate tax penalty decision later. ",
                format_money_2dp(*correct_debt),
                format_money_2dp(*allowed_penalty),
            ),
            JUDGMENT_FOR_PLAINTIFF,
        ),
    };
    Ok(format!("{process}{facts}{law}{opinion}{judgment}"))
}

/// Adjudicates and renders in one step.
pub fn judge(case: &TaxCase, params: &RuleParams) -> (Verdict, String) {
    let verdict = adjudicate(case, params);
    let text = render_judgment(case, &verdict, params).expect("verdict derived from the same case");
    (verdict, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(text: &str) -> Money {
        parse_money(text).unwrap()
    }

    fn case(name: &str, income: &str, tax: &str, debt: &str, penalty: &str) -> TaxCase {
        TaxCase::parse(name, income, tax, debt, penalty).unwrap()
    }

    #[test]
    fn obligations() {
        let p = RuleParams::default();
        let guild = case("Guild LLC", "1257313.71", "180000", "46316.47", "9263.29");
        assert_eq!(assess_obligation(&guild, &p), m("46316.4678"));
        let profit = case("Profit JSC", "120643811.94", "21715886.15", "14450", "2890");
        assert_eq!(assess_obligation(&profit, &p), m("-0.0008"));
        let nothing = case("X", "0", "0", "0", "0");
        assert_eq!(assess_obligation(&nothing, &p), Money::ZERO);
    }

    #[test]
    fn three_branches() {
        let p = RuleParams::default();
        let guild = case("Guild LLC", "1257313.71", "180000", "46316.47", "9263.29");
        assert_eq!(adjudicate(&guild, &p), Verdict::DecisionUpheld);
        let firma = case("Firma Corp.", "24108.5", "200", "5000", "85");
        assert_eq!(
            adjudicate(&firma, &p),
            Verdict::DecisionNullifiedRecalculated {
                correct_debt: m("4139.53"),
                allowed_penalty: m("827.906"),
            }
        );
        let env = case("Environment SOE", "3572866.21", "750000", "2378", "640");
        assert_eq!(adjudicate(&env, &p), Verdict::FullyPaid);
    }

    #[test]
    fn zero_obligation_is_fully_paid() {
        let p = RuleParams::default();
        // 0.18 * 1000 = 180 exactly
        let exact = case("Exact Ltd", "1000", "180", "10", "2");
        assert_eq!(adjudicate(&exact, &p), Verdict::FullyPaid);
    }

    #[test]
    fn tolerance_boundary_is_strict() {
        let p = RuleParams::default();
        // obligation 180, penalty 36
        let off_by_cent = case("A", "2000", "180", "180.01", "36");
        assert!(matches!(
            adjudicate(&off_by_cent, &p),
            Verdict::DecisionNullifiedRecalculated { .. }
        ));
        let exact = case("A", "2000", "180", "180", "36");
        assert_eq!(adjudicate(&exact, &p), Verdict::DecisionUpheld);
        let penalty_off = case("A", "2000", "180", "180", "35.99");
        assert!(matches!(
            adjudicate(&penalty_off, &p),
            Verdict::DecisionNullifiedRecalculated { .. }
        ));
    }

    #[test]
    fn judgment_fragments() {
        let p = RuleParams::default();
        let profit = case("Profit JSC", "120643811.94", "21715886.15", "14450", "2890");
        let (_, text) = judge(&profit, &p);
        assert!(text.contains("increased tax obligation to 17340.00 UAH in total"));
        let guild = case("Guild LLC", "1257313.71", "180000", "46316.47", "9263.29");
        let (_, text) = judge(&guild, &p);
        assert!(text.ends_with(
            "For these reasons, the Court rules in favor of defendant, that plaintiff recover nothing in this case."
        ));
        let firma = case("Firma Corp.", "24108.5", "200", "5000", "85");
        let (_, text) = judge(&firma, &p);
        assert!(text.contains("despite defendant can issue appropriate tax penalty decision later"));
        assert!(text.contains("tax debt 4139.53 UAH allows to impose penalty in amount of 827.91 UAH"));
    }

    #[test]
    fn mismatched_verdict_is_rejected() {
        let p = RuleParams::default();
        let env = case("Environment SOE", "3572866.21", "750000", "2378", "640");
        let err = render_judgment(&env, &Verdict::DecisionUpheld, &p).unwrap_err();
        assert_eq!(err.actual, Verdict::FullyPaid);
    }

    #[test]
    fn law_paragraph_follows_params() {
        let p = RuleParams::new(Rate::from_steps(2000), Rate::from_steps(500), m("0.01")).unwrap();
        let (_, text) = judge(&case("A", "100", "0", "0", "0"), &p);
        assert!(text.contains("corporate tax rate 20% of income"));
        assert!(text.contains("by a penalty 5% of repaid amount"));
    }

    #[test]
    fn case_validation() {
        assert_eq!(
            TaxCase::parse(" ", "1", "1", "1", "1").unwrap_err(),
            CaseError::EmptyPlaintiff
        );
        let err = TaxCase::parse("A", "-5", "1", "1", "1").unwrap_err();
        assert_eq!(err.field(), "tax_base");
        let err = TaxCase::parse("A", "1", "1.001", "1", "1").unwrap_err();
        assert!(matches!(err, CaseError::TooPrecise { field: "tax_paid", .. }));
        let err = TaxCase::parse("A", "1", "1", "x", "1").unwrap_err();
        assert!(matches!(err, CaseError::Malformed { field: "assessed_debt", .. }));
        let err = TaxCase::parse("A", "1", "1", "1", "1000000000000.01").unwrap_err();
        assert!(matches!(err, CaseError::TooLarge { field: "assessed_penalty", .. }));
    }

    #[test]
    fn params_validation() {
        let tol = m("0.01");
        assert!(RuleParams::new(Rate::ZERO, Rate::ZERO, tol).is_err());
        assert!(RuleParams::new(Rate::ONE, Rate::ZERO, tol).is_err());
        assert!(RuleParams::new(Rate::from_steps(1), Rate::from_steps(-1), tol).is_err());
        assert!(RuleParams::new(Rate::from_steps(1), Rate::from_steps(90_001), tol).is_err());
        assert!(RuleParams::new(Rate::from_steps(1), Rate::ZERO, Money::ZERO).is_err());
        assert!(RuleParams::new(Rate::from_steps(1), MAX_LATE_PENALTY_RATE, tol).is_ok());
    }

    #[test]
    fn parallel_matches_sequential() {
        let p = RuleParams::default();
        let cases: Vec<TaxCase> = (0..500)
            .map(|i| {
                TaxCase::new(
                    format!("C{i}"),
                    Money::from_cents(i * 7919).unwrap(),
                    Money::from_cents(i * 997).unwrap(),
                    Money::from_cents(i * 13).unwrap(),
                    Money::from_cents(i * 3).unwrap(),
                )
                .unwrap()
            })
            .collect();
        let sequential: Vec<Verdict> = cases.iter().map(|c| adjudicate(c, &p)).collect();
        assert_eq!(adjudicate_all(&cases, &p), sequential);
    }
}
