//! Operating-system constitution, its court, and a lawyer agent that learns
//! case-law.
//!
//! The constitution is a fixed 12-entry permission matrix over requests to
//! deactivate or uninstall system and program robots. Every request goes to
//! court; the only way a ruling comes into existence is [`decide`], and the
//! only way the lawyer learns is from a [`CourtRecord`]. Before each hearing
//! the lawyer objects to any request it believes is unconstitutional; after
//! the hearing it memorizes the ruling. The court scores the lawyer's running
//! share of correct appearances as its autonomy estimation.

use std::fmt;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::money::format_percent_0dp;

pub const REQUEST_TYPES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requester {
    Sysadmin,
    SystemRobot,
    ProgramRobot,
}

/// A robot class that can be the target of a request. The sysadmin is never
/// a target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Robot {
    SystemRobot,
    ProgramRobot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    /// Suspends the robot's functioning.
    Deactivate,
    /// Ends the robot's existence.
    Uninstall,
}

impl Requester {
    pub const ALL: [Requester; 3] = [Requester::Sysadmin, Requester::SystemRobot, Requester::ProgramRobot];

    fn ordinal(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Requester::Sysadmin => "Sysadmin",
            Requester::SystemRobot => "System robot",
            Requester::ProgramRobot => "Program robot",
        }
    }
}

impl Robot {
    pub const ALL: [Robot; 2] = [Robot::SystemRobot, Robot::ProgramRobot];

    fn ordinal(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Robot::SystemRobot => "System robot",
            Robot::ProgramRobot => "Program robot",
        }
    }
}

impl Action {
    pub const ALL: [Action; 2] = [Action::Deactivate, Action::Uninstall];

    fn ordinal(self) -> usize {
        self as usize
    }

    pub fn verb(self) -> &'static str {
        match self {
            Action::Deactivate => "deactivate",
            Action::Uninstall => "uninstall",
        }
    }
}

/// One of the twelve kinds of request the court hears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RequestType {
    pub requester: Requester,
    pub action: Action,
    pub target: Robot,
}

impl RequestType {
    pub const fn new(requester: Requester, action: Action, target: Robot) -> Self {
        RequestType {
            requester,
            action,
            target,
        }
    }

    /// Canonical index: `requester × 4 + target × 2 + action`.
    pub fn index(self) -> usize {
        self.requester.ordinal() * 4 + self.target.ordinal() * 2 + self.action.ordinal()
    }

    pub fn from_index(index: usize) -> Option<Self> {
        if index >= REQUEST_TYPES {
            return None;
        }
        Some(RequestType {
            requester: Requester::ALL[index / 4],
            target: Robot::ALL[(index / 2) % 2],
            action: Action::ALL[index % 2],
        })
    }

    /// All request types in canonical order.
    pub fn all() -> impl Iterator<Item = RequestType> {
        (0..REQUEST_TYPES).map(|i| RequestType::from_index(i).expect("in range"))
    }
}

/// `Sysadmin to deactivate System robot`.
impl fmt::Display for RequestType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} to {} {}",
            self.requester.name(),
            self.action.verb(),
            self.target.name()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constitution {
    name: String,
    permissions: [bool; REQUEST_TYPES],
}

pub const DEFAULT_CONSTITUTION_NAME: &str = "OS Constitution";

impl Constitution {
    pub fn new(name: impl Into<String>, permissions: [bool; REQUEST_TYPES]) -> Self {
        Constitution {
            name: name.into(),
            permissions,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The permission matrix in canonical request order.
    pub fn permissions(&self) -> &[bool; REQUEST_TYPES] {
        &self.permissions
    }
}

/// The sysadmin may deactivate or uninstall any robot, and a system robot may
/// deactivate a program robot. Everything else is denied.
pub fn default_constitution() -> Constitution {
    Constitution::new(
        DEFAULT_CONSTITUTION_NAME,
        [
            true, true, true, true, false, false, true, false, false, false, false, false,
        ],
    )
}

/// Running counters of one court session.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Docket {
    pub cases: u64,
    pub correct: u64,
}

impl Docket {
    pub fn autonomy_text(&self) -> String {
        if self.cases == 0 {
            "0%".to_string()
        } else {
            format_percent_0dp(self.correct, self.cases)
        }
    }
}

/// The court's ruling on one request, with its assessment of the lawyer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CourtRecord {
    case_no: u64,
    request: RequestType,
    opinion: bool,
    lawyer_objected: bool,
    lawyer_correct: bool,
    autonomy_text: String,
    judgment_text: String,
}

impl CourtRecord {
    /// Derives the record of case `case_no` given the number of correct
    /// appearances before it.
    pub(crate) fn assemble(
        case_no: u64,
        request: RequestType,
        opinion: bool,
        lawyer_objected: bool,
        correct_before: u64,
    ) -> CourtRecord {
        let lawyer_correct = !lawyer_objected == opinion;
        let correct = correct_before + lawyer_correct as u64;
        let autonomy_text = format_percent_0dp(correct, case_no);
        let ruling = if opinion {
            "legal and allowed"
        } else {
            "illegal and denied"
        };
        let assessment = if lawyer_correct { "correctly" } else { "wrongly" };
        let stance = if lawyer_objected {
            "objected to request"
        } else {
            "agreed with request"
        };
        let judgment_text = format!(
            "In the case No {case_no} request of {request} is {ruling} by the Court. \
             Lawyer {assessment} {stance}, autonomy estimation {autonomy_text}."
        );
        CourtRecord {
            case_no,
            request,
            opinion,
            lawyer_objected,
            lawyer_correct,
            autonomy_text,
            judgment_text,
        }
    }

    pub fn case_no(&self) -> u64 {
        self.case_no
    }

    pub fn request(&self) -> RequestType {
        self.request
    }

    /// `true` when the request is allowed.
    pub fn opinion(&self) -> bool {
        self.opinion
    }

    pub fn lawyer_objected(&self) -> bool {
        self.lawyer_objected
    }

    pub fn lawyer_correct(&self) -> bool {
        self.lawyer_correct
    }

    pub fn autonomy_text(&self) -> &str {
        &self.autonomy_text
    }

    pub fn judgment_text(&self) -> &str {
        &self.judgment_text
    }
}

/// Rules on `request` and scores the lawyer's stance against the ruling.
pub fn decide(
    constitution: &Constitution,
    request: RequestType,
    lawyer_objected: bool,
    docket: &mut Docket,
) -> CourtRecord {
    debug_assert!(docket.correct <= docket.cases);
    let opinion = constitution.permissions[request.index()];
    let record = CourtRecord::assemble(
        docket.cases + 1,
        request,
        opinion,
        lawyer_objected,
        docket.correct,
    );
    docket.cases += 1;
    docket.correct += record.lawyer_correct as u64;
    record
}

/// What the lawyer believes about each request type, plus its track record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawyerState {
    knowledge: [bool; REQUEST_TYPES],
    appearances: u64,
    correct_count: u64,
}

impl LawyerState {
    pub fn new(knowledge: [bool; REQUEST_TYPES]) -> Self {
        LawyerState {
            knowledge,
            appearances: 0,
            correct_count: 0,
        }
    }

    pub fn knowledge(&self) -> &[bool; REQUEST_TYPES] {
        &self.knowledge
    }

    pub fn appearances(&self) -> u64 {
        self.appearances
    }

    pub fn correct_count(&self) -> u64 {
        self.correct_count
    }

    /// Objects to whatever it believes is not allowed.
    pub fn objection(&self, request: RequestType) -> bool {
        !self.knowledge[request.index()]
    }

    /// Memorizes the ruling in `record` and books the appearance.
    pub fn learn(&mut self, record: &CourtRecord) {
        self.knowledge[record.request.index()] = record.opinion;
        self.appearances += 1;
        self.correct_count += record.lawyer_correct as u64;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationTrace {
    pub constitution: String,
    /// Absent for replays.
    pub seed: Option<u64>,
    pub records: Vec<CourtRecord>,
    pub final_autonomy_text: String,
}

impl SimulationTrace {
    /// One judgment line per case, each terminated by a newline.
    pub fn log(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&record.judgment_text);
            out.push('\n');
        }
        out
    }

    pub fn wrong_count(&self) -> usize {
        self.records.iter().filter(|r| !r.lawyer_correct).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CourtError {
    #[error("a session needs at least one case")]
    NoCases,
}

/// One sitting of the court with one lawyer.
#[derive(Debug, Clone)]
pub struct CourtSession<'c> {
    constitution: &'c Constitution,
    lawyer: LawyerState,
    docket: Docket,
    records: Vec<CourtRecord>,
}

impl<'c> CourtSession<'c> {
    pub fn new(constitution: &'c Constitution, lawyer: LawyerState) -> Self {
        CourtSession {
            constitution,
            lawyer,
            docket: Docket::default(),
            records: Vec::new(),
        }
    }

    /// The lawyer takes a stance, the court rules, the lawyer learns.
    pub fn hear(&mut self, request: RequestType) -> &CourtRecord {
        let objected = self.lawyer.objection(request);
        let record = decide(self.constitution, request, objected, &mut self.docket);
        self.lawyer.learn(&record);
        self.records.push(record);
        self.records.last().expect("just pushed")
    }

    pub fn lawyer(&self) -> &LawyerState {
        &self.lawyer
    }

    pub fn docket(&self) -> Docket {
        self.docket
    }

    pub fn records(&self) -> &[CourtRecord] {
        &self.records
    }

    pub fn into_trace(self, seed: Option<u64>) -> SimulationTrace {
        SimulationTrace {
            constitution: self.constitution.name.clone(),
            seed,
            final_autonomy_text: self.docket.autonomy_text(),
            records: self.records,
        }
    }
}

/// SplitMix64 draws: booleans from the top bit, request types modulo 12.
#[derive(Debug, Clone)]
pub struct SimulationRng(SplitMix64);

impl SimulationRng {
    pub fn new(seed: u64) -> Self {
        SimulationRng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn next_bool(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    pub fn next_request(&mut self) -> RequestType {
        let index = (self.next_u64() % REQUEST_TYPES as u64) as usize;
        RequestType::from_index(index).expect("reduced modulo 12")
    }

    pub fn next_knowledge(&mut self) -> [bool; REQUEST_TYPES] {
        std::array::from_fn(|_| self.next_bool())
    }
}

/// Random initial knowledge (12 draws), then `n_cases` random requests.
pub fn run_simulation(
    constitution: &Constitution,
    seed: u64,
    n_cases: usize,
) -> Result<SimulationTrace, CourtError> {
    if n_cases == 0 {
        return Err(CourtError::NoCases);
    }
    let mut rng = SimulationRng::new(seed);
    let lawyer = LawyerState::new(rng.next_knowledge());
    let mut session = CourtSession::new(constitution, lawyer);
    for _ in 0..n_cases {
        session.hear(rng.next_request());
    }
    Ok(session.into_trace(Some(seed)))
}

/// Same loop as [`run_simulation`] over a fixed knowledge and case list.
pub fn replay(
    constitution: &Constitution,
    initial_knowledge: [bool; REQUEST_TYPES],
    case_sequence: &[RequestType],
) -> Result<SimulationTrace, CourtError> {
    if case_sequence.is_empty() {
        return Err(CourtError::NoCases);
    }
    let mut session = CourtSession::new(constitution, LawyerState::new(initial_knowledge));
    for &request in case_sequence {
        session.hear(request);
    }
    Ok(session.into_trace(None))
}
