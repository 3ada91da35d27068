//! Text formats read and written by the toolkit.
//!
//! * Case files: JSON Lines, one object per line with the string keys
//!   `plaintiff`, `tax_base`, `tax_paid`, `assessed_debt` and
//!   `assessed_penalty`. Amounts are decimal strings with at most two
//!   fractional digits. Blank lines and lines starting with `#` are skipped.
//! * Constitution files: one rule per line, `allow|deny <requester> <action>
//!   <target>` with requesters `sysadmin|system|program`, actions
//!   `deactivate|uninstall` and targets `system|program`, plus an optional
//!   `name <text>` line. `#` starts a comment. Unruled request types are
//!   denied with a warning.
//! * Trace exports: JSON Lines with a `header` line, one `record` line per
//!   case and a closing `summary` line.
//! * Replay scripts: an optional `constitution <source>` line, one
//!   `knowledge` line with twelve `allow|deny` tokens, then `case` lines
//!   holding either a canonical index or `<requester> <action> <target>`.
//!
//! Every parse error carries the 1-based line number and the offending field
//! or token.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::adjudicator::TaxCase;
use crate::court::{
    Action, Constitution, CourtRecord, RequestType, Requester, Robot, SimulationTrace,
    REQUEST_TYPES,
};
use crate::money::format_money_2dp;

pub const TRACE_FORMAT: &str = "autonomy-court-trace";
pub const TRACE_VERSION: u32 = 1;

/// The reference constitution, equal to [`crate::court::default_constitution`].
pub const REFERENCE_CONSTITUTION: &str = include_str!("../data/os_constitution.txt");
/// The four reference tax cases.
pub const SAMPLE_CASES: &str = include_str!("../data/sample_cases.jsonl");
/// Replay script reproducing the reference 30-case court log.
pub const SAMPLE_SESSION: &str = include_str!("../data/sample_session.txt");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {field}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl FormatError {
    fn new(line: usize, field: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError {
            line,
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Numbered lines that are neither blank nor `#` comments.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn last_line(text: &str) -> usize {
    text.lines().count().max(1)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseLine {
    plaintiff: String,
    tax_base: String,
    tax_paid: String,
    assessed_debt: String,
    assessed_penalty: String,
}

/// A parsed case with the line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseEntry {
    pub line: usize,
    pub case: TaxCase,
}

/// Parses a case file, stopping at the first invalid line.
pub fn parse_case_file(text: &str) -> Result<Vec<CaseEntry>, FormatError> {
    content_lines(text)
        .map(|(line, content)| {
            let raw: CaseLine = serde_json::from_str(content)
                .map_err(|e| FormatError::new(line, "record", e.to_string()))?;
            let case = TaxCase::parse(
                &raw.plaintiff,
                &raw.tax_base,
                &raw.tax_paid,
                &raw.assessed_debt,
                &raw.assessed_penalty,
            )
            .map_err(|e| FormatError::new(line, e.field(), e.to_string()))?;
            Ok(CaseEntry { line, case })
        })
        .collect()
}

pub fn parse_cases(text: &str) -> Result<Vec<TaxCase>, FormatError> {
    Ok(parse_case_file(text)?.into_iter().map(|e| e.case).collect())
}

pub fn serialize_cases(cases: &[TaxCase]) -> String {
    let mut out = String::new();
    for case in cases {
        let line = CaseLine {
            plaintiff: case.plaintiff().to_string(),
            tax_base: format_money_2dp(case.income()),
            tax_paid: format_money_2dp(case.tax_paid()),
            assessed_debt: format_money_2dp(case.assessed_debt()),
            assessed_penalty: format_money_2dp(case.assessed_penalty()),
        };
        out.push_str(&serde_json::to_string(&line).expect("plain strings serialize"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleLine {
    pub line: usize,
    pub allow: bool,
    pub request: RequestType,
}

/// A constitution file with the provenance of each rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstitutionSource {
    pub origin: String,
    pub text: String,
    pub name: Option<String>,
    pub rules: Vec<RuleLine>,
    pub warnings: Vec<String>,
}

impl ConstitutionSource {
    pub fn parse(origin: impl Into<String>, text: impl Into<String>) -> Result<Self, FormatError> {
        let origin = origin.into();
        let text = text.into();
        let mut name: Option<(usize, String)> = None;
        let mut rules: Vec<RuleLine> = Vec::new();
        for (line, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let keyword = tokens.next().expect("non-empty line");
            match keyword {
                "name" => {
                    if let Some((first, _)) = &name {
                        return Err(FormatError::new(
                            line,
                            "name",
                            format!("duplicate name, first given on line {first}"),
                        ));
                    }
                    let value = content["name".len()..].trim();
                    if value.is_empty() {
                        return Err(FormatError::new(line, "name", "empty name"));
                    }
                    name = Some((line, value.to_string()));
                }
                "allow" | "deny" => {
                    let rest: Vec<&str> = tokens.collect();
                    let request = parse_request_tokens(line, &rest)?;
                    if let Some(first) = rules.iter().find(|r| r.request == request) {
                        return Err(FormatError::new(
                            line,
                            "rule",
                            format!(
                                "duplicate rule for `{request}`, first ruled on line {}",
                                first.line
                            ),
                        ));
                    }
                    rules.push(RuleLine {
                        line,
                        allow: keyword == "allow",
                        request,
                    });
                }
                other => {
                    return Err(FormatError::new(
                        line,
                        "keyword",
                        format!("unknown token `{other}` (expected allow, deny or name)"),
                    ))
                }
            }
        }
        let warnings = RequestType::all()
            .filter(|r| !rules.iter().any(|rule| rule.request == *r))
            .map(|r| format!("no rule for `{r}`; denied by default"))
            .collect();
        Ok(ConstitutionSource {
            origin,
            text,
            name: name.map(|(_, n)| n),
            rules,
            warnings,
        })
    }

    pub fn to_constitution(&self) -> Constitution {
        let mut permissions = [false; REQUEST_TYPES];
        for rule in &self.rules {
            permissions[rule.request.index()] = rule.allow;
        }
        let name = self.name.clone().unwrap_or_else(|| self.origin.clone());
        Constitution::new(name, permissions)
    }
}

/// Parses constitution rules; warnings list the request types left unruled.
pub fn parse_constitution(text: &str) -> Result<(Constitution, Vec<String>), FormatError> {
    let source = ConstitutionSource::parse("constitution", text)?;
    Ok((source.to_constitution(), source.warnings))
}

pub fn serialize_constitution(constitution: &Constitution) -> String {
    let mut out = format!("name {}\n", constitution.name());
    for request in RequestType::all() {
        let verdict = if constitution.permissions()[request.index()] {
            "allow"
        } else {
            "deny"
        };
        let _ = writeln!(out, "{verdict} {}", request_tokens(request));
    }
    out
}

fn requester_token(r: Requester) -> &'static str {
    match r {
        Requester::Sysadmin => "sysadmin",
        Requester::SystemRobot => "system",
        Requester::ProgramRobot => "program",
    }
}

fn robot_token(r: Robot) -> &'static str {
    match r {
        Robot::SystemRobot => "system",
        Robot::ProgramRobot => "program",
    }
}

fn request_tokens(request: RequestType) -> String {
    format!(
        "{} {} {}",
        requester_token(request.requester),
        request.action.verb(),
        robot_token(request.target)
    )
}

fn parse_request_tokens(line: usize, tokens: &[&str]) -> Result<RequestType, FormatError> {
    let [requester, action, target] = tokens else {
        return Err(FormatError::new(
            line,
            "rule",
            format!(
                "expected `<requester> <action> <target>`, found {} token(s)",
                tokens.len()
            ),
        ));
    };
    let requester = match *requester {
        "sysadmin" => Requester::Sysadmin,
        "system" => Requester::SystemRobot,
        "program" => Requester::ProgramRobot,
        other => {
            return Err(FormatError::new(
                line,
                "requester",
                format!("unknown token `{other}`"),
            ))
        }
    };
    let action = match *action {
        "deactivate" => Action::Deactivate,
        "uninstall" => Action::Uninstall,
        other => {
            return Err(FormatError::new(
                line,
                "action",
                format!("unknown token `{other}`"),
            ))
        }
    };
    let target = match *target {
        "system" => Robot::SystemRobot,
        "program" => Robot::ProgramRobot,
        "sysadmin" => {
            return Err(FormatError::new(
                line,
                "target",
                "invalid target `sysadmin`: the sysadmin cannot be deactivated or uninstalled",
            ))
        }
        other => {
            return Err(FormatError::new(
                line,
                "target",
                format!("unknown token `{other}`"),
            ))
        }
    };
    Ok(RequestType::new(requester, action, target))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum TraceLine {
    Header {
        format: String,
        version: u32,
        constitution: String,
        seed: Option<u64>,
    },
    Record {
        case_no: u64,
        request_index: usize,
        request: RequestType,
        allowed: bool,
        lawyer_objected: bool,
        lawyer_correct: bool,
        autonomy: String,
        judgment: String,
    },
    Summary {
        cases: usize,
        final_autonomy: String,
    },
}

/// The two export streams of a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceExport {
    /// Machine-readable JSON Lines document.
    pub structured: String,
    /// One judgment sentence per line.
    pub log: String,
}

pub fn export_trace(trace: &SimulationTrace) -> TraceExport {
    let mut lines = vec![TraceLine::Header {
        format: TRACE_FORMAT.to_string(),
        version: TRACE_VERSION,
        constitution: trace.constitution.clone(),
        seed: trace.seed,
    }];
    lines.extend(trace.records.iter().map(|r| TraceLine::Record {
        case_no: r.case_no(),
        request_index: r.request().index(),
        request: r.request(),
        allowed: r.opinion(),
        lawyer_objected: r.lawyer_objected(),
        lawyer_correct: r.lawyer_correct(),
        autonomy: r.autonomy_text().to_string(),
        judgment: r.judgment_text().to_string(),
    }));
    lines.push(TraceLine::Summary {
        cases: trace.records.len(),
        final_autonomy: trace.final_autonomy_text.clone(),
    });
    let mut structured = String::new();
    for line in &lines {
        structured.push_str(&serde_json::to_string(line).expect("trace lines serialize"));
        structured.push('\n');
    }
    TraceExport {
        structured,
        log: trace.log(),
    }
}

/// Parses a structured trace export, re-deriving every record to check it.
pub fn parse_trace(text: &str) -> Result<SimulationTrace, FormatError> {
    let mut header: Option<(String, Option<u64>)> = None;
    let mut records: Vec<CourtRecord> = Vec::new();
    let mut summary: Option<String> = None;
    let mut correct = 0u64;
    for (line, content) in content_lines(text) {
        if summary.is_some() {
            return Err(FormatError::new(line, "kind", "content after the summary line"));
        }
        let parsed: TraceLine = serde_json::from_str(content)
            .map_err(|e| FormatError::new(line, "record", e.to_string()))?;
        match parsed {
            TraceLine::Header {
                format,
                version,
                constitution,
                seed,
            } => {
                if header.is_some() || !records.is_empty() {
                    return Err(FormatError::new(line, "kind", "header must be the first line"));
                }
                if format != TRACE_FORMAT {
                    return Err(FormatError::new(line, "format", format!("unknown format `{format}`")));
                }
                if version != TRACE_VERSION {
                    return Err(FormatError::new(
                        line,
                        "version",
                        format!("unsupported version {version}"),
                    ));
                }
                header = Some((constitution, seed));
            }
            TraceLine::Record {
                case_no,
                request_index,
                request,
                allowed,
                lawyer_objected,
                lawyer_correct,
                autonomy,
                judgment,
            } => {
                if header.is_none() {
                    return Err(FormatError::new(line, "kind", "record before header"));
                }
                let expected_no = records.len() as u64 + 1;
                if case_no != expected_no {
                    return Err(FormatError::new(
                        line,
                        "case_no",
                        format!("expected case {expected_no}, found {case_no}"),
                    ));
                }
                if request_index != request.index() {
                    return Err(FormatError::new(
                        line,
                        "request_index",
                        format!("{request_index} does not match `{request}`"),
                    ));
                }
                let record = CourtRecord::assemble(case_no, request, allowed, lawyer_objected, correct);
                for (field, ok) in [
                    ("lawyer_correct", record.lawyer_correct() == lawyer_correct),
                    ("autonomy", record.autonomy_text() == autonomy),
                    ("judgment", record.judgment_text() == judgment),
                ] {
                    if !ok {
                        return Err(FormatError::new(line, field, "inconsistent with the record"));
                    }
                }
                correct += record.lawyer_correct() as u64;
                records.push(record);
            }
            TraceLine::Summary {
                cases,
                final_autonomy,
            } => {
                if header.is_none() {
                    return Err(FormatError::new(line, "kind", "summary before header"));
                }
                if cases != records.len() {
                    return Err(FormatError::new(
                        line,
                        "cases",
                        format!("summary counts {cases} cases, found {}", records.len()),
                    ));
                }
                let expected = records.last().map_or("0%", |r| r.autonomy_text());
                if final_autonomy != expected {
                    return Err(FormatError::new(line, "final_autonomy", "inconsistent with the records"));
                }
                summary = Some(final_autonomy);
            }
        }
    }
    let end = last_line(text);
    let (constitution, seed) =
        header.ok_or_else(|| FormatError::new(end, "kind", "missing header line"))?;
    let final_autonomy_text =
        summary.ok_or_else(|| FormatError::new(end, "kind", "missing summary line"))?;
    Ok(SimulationTrace {
        constitution,
        seed,
        records,
        final_autonomy_text,
    })
}

/// A court session fixed in advance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayScript {
    /// `builtin` or a path, resolved by the caller.
    pub constitution: Option<String>,
    pub knowledge: [bool; REQUEST_TYPES],
    pub cases: Vec<RequestType>,
}

pub fn parse_replay_script(text: &str) -> Result<ReplayScript, FormatError> {
    let mut constitution: Option<String> = None;
    let mut knowledge: Option<[bool; REQUEST_TYPES]> = None;
    let mut cases = Vec::new();
    for (line, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().expect("non-empty line");
        let rest: Vec<&str> = tokens.collect();
        match keyword {
            "constitution" => {
                if constitution.is_some() {
                    return Err(FormatError::new(line, "constitution", "given twice"));
                }
                let value = content["constitution".len()..].trim();
                if value.is_empty() {
                    return Err(FormatError::new(line, "constitution", "missing source"));
                }
                constitution = Some(value.to_string());
            }
            "knowledge" => {
                if knowledge.is_some() {
                    return Err(FormatError::new(line, "knowledge", "given twice"));
                }
                if rest.len() != REQUEST_TYPES {
                    return Err(FormatError::new(
                        line,
                        "knowledge",
                        format!("expected {REQUEST_TYPES} entries, found {}", rest.len()),
                    ));
                }
                let mut values = [false; REQUEST_TYPES];
                for (slot, token) in values.iter_mut().zip(&rest) {
                    *slot = match *token {
                        "allow" | "1" | "true" => true,
                        "deny" | "0" | "false" => false,
                        other => {
                            return Err(FormatError::new(
                                line,
                                "knowledge",
                                format!("unknown token `{other}`"),
                            ))
                        }
                    };
                }
                knowledge = Some(values);
            }
            "case" => {
                let request = match rest.as_slice() {
                    [index] => index
                        .parse::<usize>()
                        .ok()
                        .and_then(RequestType::from_index)
                        .ok_or_else(|| {
                            FormatError::new(
                                line,
                                "case",
                                format!("`{index}` is not a request index in 0..12"),
                            )
                        })?,
                    tokens => parse_request_tokens(line, tokens)?,
                };
                cases.push(request);
            }
            other => {
                return Err(FormatError::new(
                    line,
                    "keyword",
                    format!("unknown token `{other}` (expected constitution, knowledge or case)"),
                ))
            }
        }
    }
    let end = last_line(text);
    let knowledge =
        knowledge.ok_or_else(|| FormatError::new(end, "knowledge", "missing knowledge line"))?;
    if cases.is_empty() {
        return Err(FormatError::new(end, "case", "script has no cases"));
    }
    Ok(ReplayScript {
        constitution,
        knowledge,
        cases,
    })
}

pub fn serialize_replay_script(script: &ReplayScript) -> String {
    let mut out = String::new();
    if let Some(c) = &script.constitution {
        let _ = writeln!(out, "constitution {c}");
    }
    let knowledge: Vec<&str> = script
        .knowledge
        .iter()
        .map(|k| if *k { "allow" } else { "deny" })
        .collect();
    let _ = writeln!(out, "knowledge {}", knowledge.join(" "));
    for case in &script.cases {
        let _ = writeln!(out, "case {}", request_tokens(*case));
    }
    out
}
