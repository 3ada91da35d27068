//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

/// Plain SplitMix64, written out longhand.
#[derive(Clone, Debug)]
pub struct Mix(pub u64);

impl Mix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi as i128 - lo as i128 + 1) as u128;
        (lo as i128 + (self.next() as u128 % span) as i128) as i64
    }

    pub fn coin(&mut self) -> bool {
        self.next() >> 63 == 1
    }
}

/// Integer division rounding half away from zero.
pub fn round_div(n: i128, d: i128) -> i128 {
    assert!(d > 0);
    let q = n / d;
    let r = n % d;
    if 2 * r.abs() >= d {
        q + n.signum()
    } else {
        q
    }
}

/// Renders a micro-unit count with the given number of decimals.
pub fn render_micros(micros: i128, digits: u32) -> String {
    let scaled = round_div(micros, 10i128.pow(6 - digits));
    let unit = 10i128.pow(digits);
    let sign = if scaled < 0 { "-" } else { "" };
    let a = scaled.abs();
    if digits == 0 {
        format!("{sign}{a}")
    } else {
        format!("{sign}{}.{:0width$}", a / unit, a % unit, width = digits as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    FullyPaid,
    Upheld,
    Nullified { debt_micros: i128, penalty_micros: i128 },
}

/// Straight-line evaluation of the three conditions, amounts in cents,
/// rates in 10^-4 steps, tolerance in micros.
pub fn oracle_branch(
    income_cents: i128,
    paid_cents: i128,
    debt_cents: i128,
    penalty_cents: i128,
    tax_steps: i128,
    late_steps: i128,
    tolerance_micros: i128,
) -> Branch {
    // cents × steps is already in micro-units
    let obligation = income_cents * tax_steps - paid_cents * 10_000;
    let penalty = round_div(obligation * late_steps, 10_000);
    let first = 0 >= obligation;
    let second = !first
        && (debt_cents * 10_000 - obligation).abs() < tolerance_micros
        && (penalty_cents * 10_000 - penalty).abs() < tolerance_micros;
    let third = !first && !second;
    assert_eq!(first as u8 + second as u8 + third as u8, 1);
    if first {
        Branch::FullyPaid
    } else if second {
        Branch::Upheld
    } else {
        Branch::Nullified {
            debt_micros: obligation,
            penalty_micros: penalty,
        }
    }
}

/// Replaces locale decimal commas (`1,5`) with points.
pub fn normalize_separators(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        let between_digits = i > 0
            && i + 1 < chars.len()
            && chars[i - 1].is_ascii_digit()
            && chars[i + 1].is_ascii_digit();
        out.push(if c == ',' && between_digits { '.' } else { c });
    }
    out
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn golden(name: &str) -> String {
    std::fs::read_to_string(golden_path(name)).expect("golden file present")
}

/// The four reference judgments with decimal points.
pub fn reference_judgments() -> Vec<String> {
    normalize_separators(&golden("sample_judgments.txt"))
        .split("\n\n")
        .map(|s| s.trim().to_string())
        .collect()
}

/// Autonomy percentages of the reference 30-case session.
pub const REFERENCE_AUTONOMY: [u32; 30] = [
    0, 50, 67, 75, 80, 83, 71, 63, 67, 70, 73, 75, 77, 71, 73, 75, 76, 78, 79, 80, 76, 77, 78, 79,
    80, 81, 81, 82, 83, 83,
];
