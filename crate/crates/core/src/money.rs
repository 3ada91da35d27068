//! Fixed-point money and rate arithmetic.
//!
//! [`Money`] counts micro-units (10^-6 UAH) in an `i64`, which covers roughly
//! ±9.2×10^12 UAH. [`Rate`] counts 10^-4 steps. A product of an amount with at
//! most two fractional digits and a rate with at most four fractional digits
//! lands exactly on the micro grid; every other product is rounded half away
//! from zero in [`mul_rate`], which is the only rounding site in the
//! arithmetic. Display rounding happens in [`format_money_2dp`] and
//! [`format_percent_0dp`].
//!
//! [`RationalMoney`] carries exact quotients (the equilibrium income is a
//! repeating decimal) and rounds only when rendered.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Micro-units per currency unit.
pub const MICROS_PER_UNIT: i64 = 1_000_000;
/// Fractional digits of the [`Money`] grid.
pub const MONEY_SCALE: u32 = 6;
/// Rate steps per unit.
pub const RATE_STEPS_PER_UNIT: i64 = 10_000;
/// Fractional digits of the [`Rate`] grid.
pub const RATE_SCALE: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseDecimalError {
    #[error("malformed decimal `{0}`")]
    Malformed(String),
    #[error("`{token}` has more than {max} fractional digits")]
    TooPrecise { token: String, max: u32 },
    #[error("`{0}` is out of range")]
    Overflow(String),
}

impl ParseDecimalError {
    pub fn token(&self) -> &str {
        match self {
            Self::Malformed(t) | Self::Overflow(t) => t,
            Self::TooPrecise { token, .. } => token,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("arithmetic overflow")]
pub struct ArithmeticError;

/// An amount of currency in micro-units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);
    pub const MAX: Money = Money(i64::MAX);
    pub const MIN: Money = Money(i64::MIN + 1);

    pub const fn from_micros(micros: i64) -> Self {
        Money(micros)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    /// Whole currency units; `None` on overflow.
    pub fn from_units(units: i64) -> Option<Self> {
        units.checked_mul(MICROS_PER_UNIT).map(Money)
    }

    /// Amount given in cents (hundredths); `None` on overflow.
    pub fn from_cents(cents: i64) -> Option<Self> {
        cents.checked_mul(MICROS_PER_UNIT / 100).map(Money)
    }

    pub fn checked_add(self, other: Money) -> Option<Money> {
        self.0.checked_add(other.0).map(Money)
    }

    pub fn checked_sub(self, other: Money) -> Option<Money> {
        self.0.checked_sub(other.0).map(Money)
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Number of significant fractional digits, 0 through 6.
    pub fn fractional_digits(self) -> u32 {
        let mut frac = (self.0 % MICROS_PER_UNIT).unsigned_abs();
        if frac == 0 {
            return 0;
        }
        let mut digits = MONEY_SCALE;
        while frac.is_multiple_of(10) {
            frac /= 10;
            digits -= 1;
        }
        digits
    }

    pub fn to_rational(self) -> RationalMoney {
        RationalMoney::from(self)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

/// Full precision, always six fractional digits.
impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_scaled(self.0 as i128, MONEY_SCALE))
    }
}

impl FromStr for Money {
    type Err = ParseDecimalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_money(s)
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_money(&text).map_err(serde::de::Error::custom)
    }
}

/// A multiplier with at most four fractional digits, e.g. `0.18` or `0.045`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rate(i64);

impl Rate {
    pub const ZERO: Rate = Rate(0);
    pub const ONE: Rate = Rate(RATE_STEPS_PER_UNIT);

    /// A rate counted in 10^-4 steps: `Rate::from_steps(1800)` is 0.18.
    pub const fn from_steps(steps: i64) -> Self {
        Rate(steps)
    }

    pub const fn steps(self) -> i64 {
        self.0
    }

    pub fn checked_mul(self, other: Rate) -> Option<BigRational> {
        let product = (self.0 as i128).checked_mul(other.0 as i128)?;
        let steps = (RATE_STEPS_PER_UNIT as i128) * (RATE_STEPS_PER_UNIT as i128);
        Some(BigRational::new(BigInt::from(product), BigInt::from(steps)))
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.0), BigInt::from(RATE_STEPS_PER_UNIT))
    }

    /// The rate as a percentage with trailing zeros trimmed: `18%`, `4.5%`.
    pub fn percent_text(self) -> String {
        // one rate step is 0.01 percentage points
        let mut text = render_scaled(self.0 as i128, 2);
        trim_fraction(&mut text);
        text.push('%');
        text
    }
}

/// Shortest exact decimal: `0.18`, `1`, `-0.045`.
impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut text = render_scaled(self.0 as i128, RATE_SCALE);
        trim_fraction(&mut text);
        f.write_str(&text)
    }
}

impl FromStr for Rate {
    type Err = ParseDecimalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rate(s)
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rate(&text).map_err(serde::de::Error::custom)
    }
}

/// An exact rational amount of currency (in whole units, not micros).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalMoney(BigRational);

impl RationalMoney {
    pub fn new(value: BigRational) -> Self {
        RationalMoney(value)
    }

    pub fn zero() -> Self {
        RationalMoney(BigRational::zero())
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Exact conversion back onto the micro grid, if the value lies on it.
    pub fn to_money(&self) -> Option<Money> {
        let scaled = &self.0 * BigInt::from(MICROS_PER_UNIT);
        if !scaled.is_integer() {
            return None;
        }
        scaled.to_integer().to_i64().map(Money)
    }

    /// Decimal rendering rounded half away from zero to `digits` places.
    pub fn to_fixed(&self, digits: u32) -> String {
        format_rational_fixed(&self.0, digits)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<Money> for RationalMoney {
    fn from(m: Money) -> Self {
        RationalMoney(BigRational::new(
            BigInt::from(m.micros()),
            BigInt::from(MICROS_PER_UNIT),
        ))
    }
}

/// `numerator/denominator` in lowest terms, or a bare integer.
impl fmt::Display for RationalMoney {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Parses `-?\d+(\.\d{1,6})?` into an exact [`Money`].
pub fn parse_money(text: &str) -> Result<Money, ParseDecimalError> {
    parse_scaled(text, MONEY_SCALE).map(Money)
}

/// Parses `-?\d+(\.\d{1,4})?` into an exact [`Rate`].
pub fn parse_rate(text: &str) -> Result<Rate, ParseDecimalError> {
    parse_scaled(text, RATE_SCALE).map(Rate)
}

/// Money times rate, exact when the result lies on the micro grid and
/// otherwise rounded half away from zero.
pub fn mul_rate(m: Money, r: Rate) -> Result<Money, ArithmeticError> {
    let product = (m.0 as i128) * (r.0 as i128);
    let micros = div_round_half_away(product, RATE_STEPS_PER_UNIT as i128);
    i64::try_from(micros).map(Money).map_err(|_| ArithmeticError)
}

/// `|a - b| < tol`, strict.
pub fn approx_eq(a: Money, b: Money, tol: Money) -> bool {
    debug_assert!(tol.0 >= 0);
    ((a.0 as i128) - (b.0 as i128)).abs() < tol.0 as i128
}

/// Two fractional digits, half away from zero, `.` separator.
pub fn format_money_2dp(m: Money) -> String {
    let cents = div_round_half_away(m.0 as i128, (MICROS_PER_UNIT / 100) as i128);
    render_scaled(cents, 2)
}

/// `100 * numerator / denominator` rounded half up to an integer, with `%`.
///
/// # Panics
///
/// Panics if `denominator` is zero.
pub fn format_percent_0dp(numerator: u64, denominator: u64) -> String {
    assert!(denominator > 0, "percentage of an empty docket");
    let n = numerator as u128;
    let d = denominator as u128;
    format!("{}%", (200 * n + d) / (2 * d))
}

/// Decimal rendering of an exact rational, rounded half away from zero.
pub fn format_rational_fixed(value: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u8).pow(digits);
    let rounded = (value * &scale).round().to_integer();
    let negative = rounded.is_negative();
    let magnitude = rounded.abs().to_string();
    let width = digits as usize + 1;
    let padded = format!("{magnitude:0>width$}");
    let (int_part, frac_part) = padded.split_at(padded.len() - digits as usize);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

pub(crate) fn div_round_half_away(n: i128, d: i128) -> i128 {
    debug_assert!(d > 0);
    let q = n / d;
    let r = n % d;
    if 2 * r.abs() >= d {
        q + n.signum()
    } else {
        q
    }
}

fn parse_scaled(text: &str, scale: u32) -> Result<i64, ParseDecimalError> {
    let malformed = || ParseDecimalError::Malformed(text.to_string());
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    let frac_part = frac_part.unwrap_or("");
    if body.contains('.') && frac_part.is_empty() {
        return Err(malformed());
    }
    if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    if frac_part.len() > scale as usize {
        return Err(ParseDecimalError::TooPrecise {
            token: text.to_string(),
            max: scale,
        });
    }
    let overflow = || ParseDecimalError::Overflow(text.to_string());
    let mut value: i128 = 0;
    for b in int_part.bytes() {
        value = value * 10 + (b - b'0') as i128;
        if value > i64::MAX as i128 {
            return Err(overflow());
        }
    }
    for i in 0..scale as usize {
        let digit = frac_part.as_bytes().get(i).map_or(0, |b| b - b'0');
        value = value * 10 + digit as i128;
    }
    if negative {
        value = -value;
    }
    i64::try_from(value)
        .ok()
        .filter(|v| *v != i64::MIN)
        .ok_or_else(overflow)
}

fn render_scaled(value: i128, scale: u32) -> String {
    let unit = 10i128.pow(scale);
    let sign = if value < 0 { "-" } else { "" };
    let magnitude = value.unsigned_abs();
    let int_part = magnitude / unit as u128;
    let frac_part = magnitude % unit as u128;
    if scale == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{frac_part:0>width$}",
            width = scale as usize
        )
    }
}

fn trim_fraction(text: &mut String) {
    if text.contains('.') {
        while text.ends_with('0') {
            text.pop();
        }
        if text.ends_with('.') {
            text.pop();
        }
    }
}
