use std::fmt;

use serde::Serialize;

use crate::matcher::Bindings;

/// Which rule fired at a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RuleId {
    #[serde(rename = "R1-cleanup")]
    Cleanup,
    #[serde(rename = "R2-terminal-single")]
    TerminalSingle,
    #[serde(rename = "R3-yield")]
    Yield,
    #[serde(rename = "R4-yield-coroutine")]
    YieldCoroutine,
    #[serde(rename = "R5-terminal-deadlock")]
    TerminalDeadlock,
    #[serde(rename = "R6-resume")]
    Resume,
    #[serde(rename = "R7-external")]
    External,
    #[serde(rename = "R8-consume-coroutine")]
    ConsumeCoroutine,
    #[serde(rename = "STAR-restore")]
    StarRestore,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Cleanup => "R1-cleanup",
            RuleId::TerminalSingle => "R2-terminal-single",
            RuleId::Yield => "R3-yield",
            RuleId::YieldCoroutine => "R4-yield-coroutine",
            RuleId::TerminalDeadlock => "R5-terminal-deadlock",
            RuleId::Resume => "R6-resume",
            RuleId::External => "R7-external",
            RuleId::ConsumeCoroutine => "R8-consume-coroutine",
            RuleId::StarRestore => "STAR-restore",
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, RuleId::TerminalSingle | RuleId::TerminalDeadlock)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One fired rule.
///
/// `actor` is the instance that yields (R3/R4), is removed or restored
/// (R1/STAR), or is consumed (R8). `receiver` is the instance that receives
/// (R6/R8). Indices are positions in Θ before the step; ids are stable
/// instance ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceEvent {
    pub step: usize,
    pub rule_id: RuleId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actor_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub receiver_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actor_id: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub receiver_id: Option<u32>,
    /// Id given to a restored or newly inserted instance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_id: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bindings: Option<Bindings>,
    /// The type moved by this step: the yielded type (R3/R7/R6), the
    /// inserted coroutine (R4) or the consumed one (R8).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    /// Complexity of `subject`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject_complexity: Option<usize>,
    pub complexity_before: usize,
    pub complexity_after: usize,
    pub ground_step: bool,
}

impl TraceEvent {
    pub(crate) fn new(step: usize, rule_id: RuleId, before: usize) -> Self {
        TraceEvent {
            step,
            rule_id,
            actor_index: None,
            receiver_index: None,
            actor_id: None,
            receiver_id: None,
            new_id: None,
            bindings: None,
            subject: None,
            subject_complexity: None,
            complexity_before: before,
            complexity_after: before,
            ground_step: true,
        }
    }

    pub fn delta(&self) -> i64 {
        self.complexity_after as i64 - self.complexity_before as i64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace events serialize")
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>4}  {:<22}", self.step, self.rule_id.as_str())?;
        if let Some(i) = self.actor_index {
            write!(f, " actor={i}")?;
        }
        if let Some(i) = self.receiver_index {
            write!(f, " receiver={i}")?;
        }
        write!(
            f,
            " C {} -> {}",
            self.complexity_before, self.complexity_after
        )?;
        if let Some(subject) = &self.subject {
            write!(f, "  {subject}")?;
        }
        if let Some(d) = &self.bindings {
            if !d.is_empty() {
                write!(f, "  D={d}")?;
            }
        }
        Ok(())
    }
}
