//! Checks every transition of a trace against the complexity bounds.
//!
//! With `p = C(E) + C(Θ)` before a transition and `x` the complexity of the
//! moved type, the total after the transition (including the clean-up of
//! instances it spent) must lie in:
//!
//! | transition              | interval             |
//! |-------------------------|----------------------|
//! | yield then resume       | `[p-2-2x, p-2x]`     |
//! | yield then external     | `[p-1, p]`           |
//! | yield coroutine         | `[p-1, p]`           |
//! | consume coroutine       | `[p-2x-1, p-2x]`     |
//! | deadlock terminal       | `[p, p]`             |
//! | lone clean-up           | `[p-1, p]`           |
//!
//! Transitions that bind variables, expand references or restore starred
//! coroutines change complexity in ways the bounds do not describe and are
//! reported as skipped.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::trace::{RuleId, TraceEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Proposition {
    /// Yield followed by resume.
    YieldResume,
    /// Yield followed by an external yield.
    YieldExternal,
    YieldCoroutine,
    ConsumeCoroutine,
    Deadlock,
    Cleanup,
}

impl Proposition {
    pub fn name(self) -> &'static str {
        match self {
            Proposition::YieldResume => "yield+resume",
            Proposition::YieldExternal => "yield+external",
            Proposition::YieldCoroutine => "yield-coroutine",
            Proposition::ConsumeCoroutine => "consume-coroutine",
            Proposition::Deadlock => "deadlock",
            Proposition::Cleanup => "cleanup",
        }
    }

    /// Allowed range of the total after the transition.
    pub fn interval(self, p: i64, x: i64) -> (i64, i64) {
        match self {
            Proposition::YieldResume => (p - 2 - 2 * x, p - 2 * x),
            Proposition::YieldExternal | Proposition::YieldCoroutine | Proposition::Cleanup => {
                (p - 1, p)
            }
            Proposition::ConsumeCoroutine => (p - 2 * x - 1, p - 2 * x),
            Proposition::Deadlock => (p, p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditVerdict {
    Ok,
    OutOfBounds,
    SkippedNonground,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditEntry {
    pub proposition: Option<Proposition>,
    /// Step numbers of the events making up the transition.
    pub steps: Vec<usize>,
    pub before: usize,
    pub after: i64,
    pub x: usize,
    pub interval: Option<(i64, i64)>,
    pub verdict: AuditVerdict,
}

impl fmt::Display for AuditEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.proposition.map_or("star-restore", Proposition::name);
        let steps: Vec<String> = self.steps.iter().map(usize::to_string).collect();
        write!(f, "steps {} {name}: p={} -> {}", steps.join(","), self.before, self.after)?;
        if let Some((lo, hi)) = self.interval {
            write!(f, " in [{lo}, {hi}] (x={})", self.x)?;
        }
        let verdict = match self.verdict {
            AuditVerdict::Ok => "ok",
            AuditVerdict::OutOfBounds => "OUT OF BOUNDS",
            AuditVerdict::SkippedNonground => "skipped",
        };
        write!(f, " {verdict}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn out_of_bounds(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries
            .iter()
            .filter(|e| e.verdict == AuditVerdict::OutOfBounds)
    }

    pub fn is_clean(&self) -> bool {
        self.out_of_bounds().next().is_none()
    }

    pub fn count(&self, verdict: AuditVerdict) -> usize {
        self.entries.iter().filter(|e| e.verdict == verdict).count()
    }
}

/// Audits one transition: `event`, the event it is paired with (the resume
/// or external step consuming a yield), and the clean-ups it caused.
pub fn audit_delta(
    event: &TraceEvent,
    paired: Option<&TraceEvent>,
    cleanups: &[&TraceEvent],
) -> AuditEntry {
    let mut members = vec![event];
    members.extend(paired);
    members.extend(cleanups.iter().copied());
    let steps = members.iter().map(|e| e.step).collect();
    let p = event.complexity_before;
    let after = p as i64 + members.iter().map(|e| e.delta()).sum::<i64>();

    let proposition = match (event.rule_id, paired.map(|e| e.rule_id)) {
        (RuleId::Yield, Some(RuleId::Resume)) => Some(Proposition::YieldResume),
        (RuleId::Yield, Some(RuleId::External)) => Some(Proposition::YieldExternal),
        (RuleId::YieldCoroutine, _) => Some(Proposition::YieldCoroutine),
        (RuleId::ConsumeCoroutine, _) => Some(Proposition::ConsumeCoroutine),
        (RuleId::TerminalDeadlock, _) => Some(Proposition::Deadlock),
        (RuleId::Cleanup, _) => Some(Proposition::Cleanup),
        _ => None,
    };
    let x = event.subject_complexity.unwrap_or(0);
    let ground = members.iter().all(|e| e.ground_step);
    let Some(prop) = proposition.filter(|_| ground) else {
        return AuditEntry {
            proposition,
            steps,
            before: p,
            after,
            x,
            interval: None,
            verdict: AuditVerdict::SkippedNonground,
        };
    };
    let (lo, hi) = prop.interval(p as i64, x as i64);
    let verdict = if (lo..=hi).contains(&after) {
        AuditVerdict::Ok
    } else {
        AuditVerdict::OutOfBounds
    };
    AuditEntry {
        proposition,
        steps,
        before: p,
        after,
        x,
        interval: Some((lo, hi)),
        verdict,
    }
}

/// Groups a trace into transitions and audits each.
pub fn audit(trace: &[TraceEvent]) -> AuditReport {
    let mut absorbed = BTreeSet::new();
    let mut entries = Vec::new();
    let mut i = 0;
    while i < trace.len() {
        if absorbed.contains(&i) {
            i += 1;
            continue;
        }
        let event = &trace[i];
        let (paired, owners): (Option<&TraceEvent>, Vec<Option<u32>>) = match event.rule_id {
            RuleId::Yield => match trace.get(i + 1) {
                Some(next) if matches!(next.rule_id, RuleId::Resume | RuleId::External) => {
                    absorbed.insert(i + 1);
                    (Some(next), vec![event.actor_id, next.receiver_id])
                }
                // Cut off by the step limit before delivery.
                _ => {
                    i += 1;
                    continue;
                }
            },
            RuleId::YieldCoroutine => (None, vec![event.actor_id]),
            RuleId::ConsumeCoroutine => (None, vec![event.receiver_id]),
            RuleId::TerminalDeadlock | RuleId::Cleanup | RuleId::StarRestore => (None, Vec::new()),
            _ => {
                i += 1;
                continue;
            }
        };
        // Clean-ups of the instances this transition spent follow directly,
        // possibly interleaved with restorations of starred instances.
        let mut cleanups = Vec::new();
        let mut j = i + 1 + usize::from(paired.is_some());
        while let Some(next) = trace.get(j) {
            match next.rule_id {
                RuleId::Cleanup if owners.contains(&next.actor_id) => {
                    absorbed.insert(j);
                    cleanups.push(next);
                }
                RuleId::Cleanup | RuleId::StarRestore => {}
                _ => break,
            }
            j += 1;
        }
        entries.push(audit_delta(event, paired, &cleanups));
        i += 1;
    }
    AuditReport { entries }
}
