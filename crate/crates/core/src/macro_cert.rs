//! Macro-level certificate for the six-state candidate.
//!
//! The candidate spends almost all of its run in configurations of the shape
//! `1^k0 0 1^k1 [C] 1^k2`, where `[C]` marks the head (in state C) sitting on
//! the last one of the middle block, or on the separating zero when `k1 = 0`.
//! A handful of rules with exact step costs move between such
//! configurations, and a chain of them from the blank tape to a blank halt
//! accounts for every step of the run.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::machine::{parse_machine, StateId, TransitionTable};
use crate::sim::{Configuration, Step};
use crate::tape::Tape;

/// The machine the certificate is about.
pub const CANDIDATE: &str = "1RB1RA_1LB1LC_1RD0RE_0LE0RA_0RZ0RF_0RB0RC";

const STATE_C: StateId = StateId(2);

pub fn candidate() -> TransitionTable {
    parse_machine(CANDIDATE).expect("candidate string is well formed")
}

/// `C(k0, k1, k2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MacroConfig {
    pub k0: u64,
    pub k1: u64,
    pub k2: u64,
}

impl MacroConfig {
    pub const fn new(k0: u64, k1: u64, k2: u64) -> Self {
        MacroConfig { k0, k1, k2 }
    }
}

impl fmt::Display for MacroConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({},{},{})", self.k0, self.k1, self.k2)
    }
}

/// Either end of a macro step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Start,
    Config(MacroConfig),
    Halt { blank: bool },
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Start => f.write_str("START"),
            Endpoint::Config(c) => c.fmt(f),
            Endpoint::Halt { blank: true } => f.write_str("HALT"),
            Endpoint::Halt { blank: false } => f.write_str("HALT(dirty)"),
        }
    }
}

impl FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "START" => return Ok(Endpoint::Start),
            "HALT" => return Ok(Endpoint::Halt { blank: true }),
            "HALT(dirty)" => return Ok(Endpoint::Halt { blank: false }),
            _ => {}
        }
        let inner = s
            .strip_prefix("C(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("bad endpoint {s:?}"))?;
        let ks: Vec<u64> = inner
            .split(',')
            .map(|k| k.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad endpoint {s:?}: {e}"))?;
        match ks[..] {
            [k0, k1, k2] => Ok(Endpoint::Config(MacroConfig::new(k0, k1, k2))),
            _ => Err(format!("bad endpoint {s:?}: expected three parameters")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Start,
    Case1,
    Case2_1,
    Case2_2a,
    Case2_2b,
    Case2_3a,
    Case2_3b,
    /// `k1 = 4m + r` with `k2 ≡ 2 (mod 3)`, aggregated.
    ClosedForm {
        r: u8,
        m: u64,
    },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Start => f.write_str("start"),
            Rule::Case1 => f.write_str("case-1"),
            Rule::Case2_1 => f.write_str("case-2.1"),
            Rule::Case2_2a => f.write_str("case-2.2a"),
            Rule::Case2_2b => f.write_str("case-2.2b"),
            Rule::Case2_3a => f.write_str("case-2.3a"),
            Rule::Case2_3b => f.write_str("case-2.3b"),
            Rule::ClosedForm { r, m } => write!(f, "closed-form(r={r},m={m})"),
        }
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "start" => Rule::Start,
            "case-1" => Rule::Case1,
            "case-2.1" => Rule::Case2_1,
            "case-2.2a" => Rule::Case2_2a,
            "case-2.2b" => Rule::Case2_2b,
            "case-2.3a" => Rule::Case2_3a,
            "case-2.3b" => Rule::Case2_3b,
            _ => {
                let inner = s
                    .strip_prefix("closed-form(r=")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| format!("unknown rule {s:?}"))?;
                let (r, m) = inner
                    .split_once(",m=")
                    .ok_or_else(|| format!("unknown rule {s:?}"))?;
                let r: u8 = r.parse().map_err(|_| format!("unknown rule {s:?}"))?;
                let m: u64 = m.parse().map_err(|_| format!("unknown rule {s:?}"))?;
                if r > 3 {
                    return Err(format!("unknown rule {s:?}"));
                }
                Rule::ClosedForm { r, m }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MacroStep {
    pub from: Endpoint,
    pub to: Endpoint,
    pub cost: u64,
    pub rule: Rule,
}

impl fmt::Display for MacroStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} → {} {} {}", self.from, self.to, self.cost, self.rule)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MacroError {
    #[error("{0} lies outside the analyzed region")]
    OutOfDomain(MacroConfig),
}

fn step_to(from: MacroConfig, to: Endpoint, cost: u64, rule: Rule) -> MacroStep {
    MacroStep {
        from: Endpoint::Config(from),
        to,
        cost,
        rule,
    }
}

/// The concrete configuration denoted by `mc`: cells from offset 0 hold
/// `1^k0 0 1^(k1+k2)`, the head sits at offset `k0 + k1`, state C.
pub fn expand(mc: MacroConfig) -> Configuration {
    let MacroConfig { k0, k1, k2 } = mc;
    let mut cells = vec![1u8; k0 as usize];
    cells.push(0);
    cells.extend(std::iter::repeat(1).take((k1 + k2) as usize));
    let head = (k0 + k1) as i64;
    let mut tape = Tape::from_symbols(0, &cells);
    tape.visit(head);
    Configuration {
        tape,
        head,
        state: STATE_C,
        steps: 0,
    }
}

/// The single rule that applies to `mc`.
pub fn macro_step(mc: MacroConfig) -> Result<MacroStep, MacroError> {
    let MacroConfig { k0, k1, k2 } = mc;
    let c = |a, b, c| Endpoint::Config(MacroConfig::new(a, b, c));
    let out = match (k1, k2 % 3) {
        (0, _) if k2 >= 2 => step_to(mc, c(k0 + 1, k2 - 1, 2), k2 + 4, Rule::Case1),
        (0, _) => return Err(MacroError::OutOfDomain(mc)),
        (_, 0) => step_to(
            mc,
            Endpoint::Halt {
                blank: k0 == 0 && k1 == 1,
            },
            k2 + 2,
            Rule::Case2_1,
        ),
        (1, _) if k0 == 0 => return Err(MacroError::OutOfDomain(mc)),
        (1, 1) => step_to(mc, c(0, k0 - 1, k2 + 5), 2 * k2 + 7, Rule::Case2_2b),
        (1, _) => step_to(mc, c(0, k0 - 1, k2 + 6), 2 * k2 + 11, Rule::Case2_3b),
        (_, 1) => step_to(mc, c(k0, k1 - 2, k2 + 4), 2 * k2 + 6, Rule::Case2_2a),
        _ => step_to(mc, c(k0, k1 - 2, k2 + 5), 2 * k2 + 10, Rule::Case2_3a),
    };
    Ok(out)
}

/// One aggregated step for `k2 ≡ 2 (mod 3)`, following the formula for
/// `r = k1 mod 4`.
pub fn closed_form_step(mc: MacroConfig) -> Result<MacroStep, MacroError> {
    let MacroConfig { k0, k1, k2 } = mc;
    if k2 % 3 != 2 {
        return Err(MacroError::OutOfDomain(mc));
    }
    let (m, r) = (k1 / 4, k1 % 4);
    if r % 2 == 1 && k0 == 0 {
        return Err(MacroError::OutOfDomain(mc));
    }
    let base = 4 * m * k2 + 18 * m * m;
    let (cost, to) = match r {
        0 => (
            base + k2 + 17 * m + 4,
            MacroConfig::new(k0 + 1, k2 + 9 * m - 1, 2),
        ),
        1 => (
            base + 2 * k2 + 26 * m + 11,
            MacroConfig::new(0, k0 - 1, k2 + 9 * m + 6),
        ),
        2 => (
            base + 3 * k2 + 35 * m + 19,
            MacroConfig::new(k0 + 1, k2 + 9 * m + 4, 2),
        ),
        _ => (
            base + 4 * k2 + 44 * m + 27,
            MacroConfig::new(0, k0 - 1, k2 + 9 * m + 10),
        ),
    };
    Ok(step_to(
        mc,
        Endpoint::Config(to),
        cost,
        Rule::ClosedForm { r: r as u8, m },
    ))
}

/// Composes single macro steps from `mc` up to and including the first one
/// that resets the middle block (case 1, 2.2b or 2.3b). For `k2 ≡ 2` this
/// covers exactly the same ground as [`closed_form_step`].
pub fn fold_macro_steps(mc: MacroConfig) -> Result<MacroStep, MacroError> {
    let mut cur = mc;
    let mut cost = 0;
    loop {
        let s = macro_step(cur)?;
        cost += s.cost;
        match (s.rule, s.to) {
            (Rule::Case1 | Rule::Case2_2b | Rule::Case2_3b, to)
            | (_, to @ Endpoint::Halt { .. }) => {
                return Ok(MacroStep {
                    from: Endpoint::Config(mc),
                    to,
                    cost,
                    rule: s.rule,
                });
            }
            (_, Endpoint::Config(next)) => cur = next,
            (_, Endpoint::Start) => unreachable!("no rule leads back to START"),
        }
    }
}

/// Whether two configurations agree up to a shift of the tape and head.
pub fn same_up_to_translation(a: &Configuration, b: &Configuration) -> bool {
    if a.state != b.state {
        return false;
    }
    match (a.tape.trimmed(), b.tape.trimmed()) {
        (None, None) => true,
        (Some((sa, ca)), Some((sb, cb))) => ca == cb && sa - a.head == sb - b.head,
        _ => false,
    }
}

/// Runs the candidate for exactly `ms.cost` steps from the concrete form of
/// `ms.from` and compares with the concrete form of `ms.to`.
pub fn cross_check(ms: &MacroStep) -> bool {
    cross_check_on(&candidate(), ms)
}

fn cross_check_on(table: &TransitionTable, ms: &MacroStep) -> bool {
    let mut config = match ms.from {
        Endpoint::Start => Configuration::start(),
        Endpoint::Config(c) => expand(c),
        Endpoint::Halt { .. } => return false,
    };
    for i in 0..ms.cost {
        match config.step(table) {
            Step::Continue => {}
            Step::Halted => {
                return i + 1 == ms.cost
                    && ms.to
                        == Endpoint::Halt {
                            blank: config.tape.is_blank(),
                        };
            }
            Step::Undefined(..) => return false,
        }
    }
    match ms.to {
        Endpoint::Config(c) => same_up_to_translation(&config, &expand(c)),
        _ => false,
    }
}

/// Tally of an exhaustive cross-check over a box of macro configurations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GridReport {
    pub checked: u64,
    pub passed: u64,
    pub out_of_domain: u64,
}

/// Cross-checks [`macro_step`] on every `C(k0, k1, k2)` with each parameter
/// up to the given maximum.
pub fn cross_check_grid(k0_max: u64, k1_max: u64, k2_max: u64) -> GridReport {
    let table = candidate();
    let mut report = GridReport::default();
    for k0 in 0..=k0_max {
        for k1 in 0..=k1_max {
            for k2 in 0..=k2_max {
                match macro_step(MacroConfig::new(k0, k1, k2)) {
                    Ok(s) => {
                        report.checked += 1;
                        report.passed += u64::from(cross_check_on(&table, &s));
                    }
                    Err(_) => report.out_of_domain += 1,
                }
            }
        }
    }
    report
}

/// A chain of macro steps from START to HALT.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub steps: Vec<MacroStep>,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("certificate is empty")]
    Empty,
    #[error("step {0} does not start at START")]
    NoStart(usize),
    #[error("step {0} does not continue from the previous target")]
    Broken(usize),
    #[error("step {0} does not match its rule")]
    RuleMismatch(usize),
    #[error("step {0} disagrees with direct simulation")]
    CrossCheck(usize),
    #[error("chain does not end in a blank halt")]
    NotBlankHalt,
    #[error("stated total {stated} differs from the sum of costs {sum}")]
    Total { stated: u64, sum: u64 },
}

/// The step the certificate takes from `mc`: aggregated where a closed form
/// exists, single otherwise.
fn chain_step(mc: MacroConfig) -> Result<MacroStep, MacroError> {
    if mc.k1 >= 1 && mc.k2 % 3 == 2 {
        closed_form_step(mc)
    } else {
        macro_step(mc)
    }
}

const START_STEP: MacroStep = MacroStep {
    from: Endpoint::Start,
    to: Endpoint::Config(MacroConfig::new(0, 0, 2)),
    cost: 3,
    rule: Rule::Start,
};

/// The full START → HALT chain of the candidate.
pub fn build_certificate() -> Certificate {
    let mut steps = vec![START_STEP];
    let mut cur = START_STEP.to;
    while let Endpoint::Config(mc) = cur {
        let s = chain_step(mc).expect("chain stays inside the analyzed region");
        cur = s.to;
        steps.push(s);
    }
    let total = steps.iter().map(|s| s.cost).sum();
    Certificate { steps, total }
}

impl Certificate {
    /// Line-delimited form: one `from → to cost rule` line per step, then
    /// `total N`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out.push_str(&format!("total {}\n", self.total));
        out
    }

    pub fn parse(text: &str) -> Result<Certificate, CertError> {
        let mut steps = Vec::new();
        let mut total = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            let err = |msg: String| CertError::Parse { line: i + 1, msg };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if total.is_some() {
                return Err(err("content after the total line".into()));
            }
            if let Some(t) = line.strip_prefix("total ") {
                total = Some(t.trim().parse::<u64>().map_err(|e| err(e.to_string()))?);
                continue;
            }
            let (from, rest) = line
                .split_once(" → ")
                .ok_or_else(|| err("missing arrow".into()))?;
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let [to, cost, rule] = parts[..] else {
                return Err(err("expected `from → to cost rule`".into()));
            };
            steps.push(MacroStep {
                from: from.parse().map_err(err)?,
                to: to.parse().map_err(err)?,
                cost: cost
                    .parse()
                    .map_err(|e: std::num::ParseIntError| err(e.to_string()))?,
                rule: rule.parse().map_err(err)?,
            });
        }
        let total = total.ok_or(CertError::Parse {
            line: text.lines().count(),
            msg: "missing total line".into(),
        })?;
        Ok(Certificate { steps, total })
    }

    /// Checks the chain structure, recomputes every step from its rule, and
    /// cross-checks each one against direct simulation.
    pub fn verify(&self) -> Result<(), CertError> {
        let first = self.steps.first().ok_or(CertError::Empty)?;
        if first.from != Endpoint::Start {
            return Err(CertError::NoStart(0));
        }
        for (i, pair) in self.steps.windows(2).enumerate() {
            if pair[0].to != pair[1].from {
                return Err(CertError::Broken(i + 1));
            }
        }
        if self.steps.last().map(|s| s.to) != Some(Endpoint::Halt { blank: true }) {
            return Err(CertError::NotBlankHalt);
        }
        let sum: u64 = self.steps.iter().map(|s| s.cost).sum();
        if sum != self.total {
            return Err(CertError::Total {
                stated: self.total,
                sum,
            });
        }
        let table = candidate();
        for (i, s) in self.steps.iter().enumerate() {
            let expected = match (s.rule, s.from) {
                (Rule::Start, Endpoint::Start) => Some(START_STEP),
                (Rule::ClosedForm { .. }, Endpoint::Config(mc)) => closed_form_step(mc).ok(),
                (Rule::Start, _) | (_, Endpoint::Start) => None,
                (_, Endpoint::Config(mc)) => macro_step(mc).ok(),
                (_, Endpoint::Halt { .. }) => None,
            };
            if expected != Some(*s) {
                return Err(CertError::RuleMismatch(i));
            }
            if !cross_check_on(&table, s) {
                return Err(CertError::CrossCheck(i));
            }
        }
        Ok(())
    }
}

/// State A on the first of `k + 1` ones: after `k + 2` steps the block has
/// grown by one, the head is just past it, and the state is B.
pub fn replay_property_1(k: u64) -> bool {
    let table = candidate();
    let ones = vec![1u8; k as usize + 1];
    let mut c = Configuration {
        tape: Tape::from_symbols(0, &ones),
        ..Configuration::start()
    };
    c.run(&table, k + 2);
    let expected = Configuration {
        tape: Tape::from_symbols(0, &vec![1u8; k as usize + 2]),
        head: k as i64 + 2,
        state: StateId(1),
        steps: 0,
    };
    c.steps == k + 2 && c.head == expected.head && same_up_to_translation(&c, &expected)
}

/// State B on the last of `k` zeros that follow a one: after `k + 1` steps
/// there are `k + 1` ones, the head is on the cell just left of them, and
/// the state is C.
pub fn replay_property_2(k: u64) -> bool {
    let table = candidate();
    let mut cells = vec![0u8; k as usize + 1];
    cells[0] = 1;
    let mut c = Configuration {
        tape: Tape::from_symbols(0, &cells),
        head: k as i64,
        state: StateId(1),
        steps: 0,
    };
    c.run(&table, k + 1);
    c.steps == k + 1
        && c.head == -1
        && c.state == STATE_C
        && c.tape.trimmed() == Some((0, &vec![1u8; k as usize + 1][..]))
}

/// State C on the first of `k + 1` ones: after `k + 1` steps they are all
/// zeros, the head is on the next cell, and the state is E, F or C for
/// `k ≡ 0, 1, 2 (mod 3)`.
pub fn replay_property_3(k: u64) -> bool {
    let table = candidate();
    let mut c = Configuration {
        tape: Tape::from_symbols(0, &vec![1u8; k as usize + 1]),
        state: STATE_C,
        ..Configuration::start()
    };
    c.run(&table, k + 1);
    let end = [StateId(4), StateId(5), STATE_C][(k % 3) as usize];
    c.steps == k + 1 && c.head == k as i64 + 1 && c.state == end && c.tape.is_blank()
}
