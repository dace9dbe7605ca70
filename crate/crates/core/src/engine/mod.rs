//! The composition engine.
//!
//! A composition keeps a pending type, the external yields `E` and the
//! ordered coroutine instances `Θ`. Each step fires exactly one rule, picked
//! by fixed precedence:
//!
//! 1. a pending type is delivered: resume the first instance that can
//!    receive it (R6), otherwise append it to `E` (R7);
//! 2. with nothing pending: clean up or restore a spent instance (R1),
//!    finish if one or no instance is left (R2), let an instance consume
//!    another (R8), insert a yielded coroutine (R4), yield a type (R3),
//!    and finally stop on deadlock (R5).

pub mod audit;
pub mod trace;

use std::collections::BTreeMap;
use std::fmt;

use crate::matcher::{match_types, substitute, Bindings, FreshSupply};
use crate::syntax::{Program, SyntaxError};
use crate::types::{Coroutine, EvalError, Type, SUFFIX_MARK};

pub use audit::{audit, audit_delta, AuditEntry, AuditReport, AuditVerdict, Proposition};
pub use trace::{RuleId, TraceEvent};

pub const DEFAULT_STEP_LIMIT: usize = 10_000;

#[derive(Debug, thiserror::Error)]
pub enum ComposeError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("step {step}: {source}")]
    Eval {
        step: usize,
        #[source]
        source: EvalError,
    },
    #[error("step {step}: reference `@{label}` does not name a labeled coroutine")]
    UnresolvedRef { step: usize, label: String },
}

/// A live coroutine in Θ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: u32,
    pub current: Coroutine,
    /// Declared form, kept for starred coroutines so they can restore.
    pub original: Option<Coroutine>,
}

impl Instance {
    pub fn label(&self) -> Option<&str> {
        self.current.label.as_deref()
    }

    pub fn starred(&self) -> bool {
        self.current.starred
    }

    pub fn complexity(&self) -> usize {
        self.current.complexity()
    }

    pub fn as_type(&self) -> Type {
        self.current.clone().into_type()
    }

    /// The current type with instance suffixes removed.
    pub fn shape(&self) -> Type {
        self.as_type().rename("")
    }
}

/// Result of [`first`]: the leftmost match and the elements around it.
#[derive(Debug)]
pub struct Found<'a, T> {
    pub index: Option<usize>,
    pub item: Option<&'a T>,
    pub before: &'a [T],
    pub after: &'a [T],
}

/// Leftmost element satisfying `pred`. Without a match, `before` is the
/// whole slice and `after` is empty.
pub fn first<T>(items: &[T], pred: impl FnMut(&T) -> bool) -> Found<'_, T> {
    match items.iter().position(pred) {
        Some(i) => Found {
            index: Some(i),
            item: Some(&items[i]),
            before: &items[..i],
            after: &items[i + 1..],
        },
        None => Found {
            index: None,
            item: None,
            before: items,
            after: &[],
        },
    }
}

#[derive(Debug, Clone)]
pub struct ComposeOptions {
    pub step_limit: usize,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        ComposeOptions {
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }
}

/// Composition context: pending type, external yields and Θ.
#[derive(Debug, Clone, Default)]
pub struct State {
    pub pending: Option<Type>,
    pub external: Vec<Type>,
    pub theta: Vec<Instance>,
    pub steps_taken: usize,
    fresh: FreshSupply,
    next_id: u32,
}

impl State {
    /// C(E) + C(Θ). The pending type is not counted.
    pub fn complexity(&self) -> usize {
        self.external.iter().map(Type::complexity).sum::<usize>()
            + self.theta.iter().map(Instance::complexity).sum::<usize>()
    }

    pub fn theta_types(&self) -> Vec<Type> {
        self.theta.iter().map(Instance::as_type).collect()
    }

    pub fn fresh_issued(&self) -> u32 {
        self.fresh.issued()
    }

    fn allocate_id(&mut self) -> u32 {
        self.next_id += 1;
        self.next_id
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pending {
            Some(t) => writeln!(f, "pending: {t}")?,
            None => writeln!(f, "pending: void")?,
        }
        let external = Type::Seq(self.external.clone()).normalize();
        writeln!(f, "external: {external}")?;
        writeln!(f, "theta:")?;
        for inst in &self.theta {
            writeln!(f, "  {}", inst.current)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// A single composed coroutine type.
    Composed(Type),
    /// Deadlock: the external yields followed by the stuck coroutines.
    Residual(Type),
    StepLimitExceeded,
}

#[derive(Debug, Clone)]
pub struct ComposeResult {
    pub outcome: Outcome,
    pub external: Vec<Type>,
    pub state: State,
    pub trace: Vec<TraceEvent>,
    pub audit: AuditReport,
}

impl ComposeResult {
    pub fn steps(&self) -> usize {
        self.state.steps_taken
    }

    /// The composed or residual type, if composition terminated.
    pub fn result_type(&self) -> Option<&Type> {
        match &self.outcome {
            Outcome::Composed(t) | Outcome::Residual(t) => Some(t),
            Outcome::StepLimitExceeded => None,
        }
    }

    /// Items of the residual sequence (a single item when it is not a
    /// sequence). Empty for composed results.
    pub fn residual_items(&self) -> Vec<Type> {
        match &self.outcome {
            Outcome::Residual(Type::Seq(items)) => items.clone(),
            Outcome::Residual(Type::Void) => Vec::new(),
            Outcome::Residual(t) => vec![t.clone()],
            _ => Vec::new(),
        }
    }

    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|e| format!("{e}\n")).collect()
    }

    pub fn trace_json(&self) -> String {
        self.trace.iter().map(|e| e.to_json() + "\n").collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Fired,
    Terminal(Outcome),
}

/// Step-by-step composition of one program.
#[derive(Debug, Clone)]
pub struct Composer {
    state: State,
    labels: BTreeMap<String, Coroutine>,
    trace: Vec<TraceEvent>,
    finished: Option<Outcome>,
}

impl Composer {
    pub fn new(program: &Program) -> Result<Self, ComposeError> {
        let labels = program.validate()?;
        let coroutines = program.coroutines()?;
        Ok(Self::with_labels(coroutines, labels))
    }

    /// Starts from bare coroutines; references may only name coroutines
    /// labeled inside them.
    pub fn from_coroutines(coroutines: Vec<Coroutine>) -> Result<Self, ComposeError> {
        Self::new(&Program::from_coroutines(coroutines))
    }

    fn with_labels(coroutines: Vec<Coroutine>, labels: BTreeMap<String, Coroutine>) -> Self {
        let mut state = State::default();
        for c in coroutines {
            let c = c.into_type().normalize();
            let Type::Coroutine(c) = c else {
                unreachable!("declarations are coroutines")
            };
            let id = state.allocate_id();
            let current = rename_coroutine(&c, id);
            let original = c.starred.then(|| (*c).clone());
            state.theta.push(Instance {
                id,
                current,
                original,
            });
        }
        Composer {
            state,
            labels,
            trace: Vec::new(),
            finished: None,
        }
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn outcome(&self) -> Option<&Outcome> {
        self.finished.as_ref()
    }

    /// Runs until a terminal rule fires or `step_limit` steps were taken.
    pub fn run(mut self, options: &ComposeOptions) -> Result<ComposeResult, ComposeError> {
        while self.finished.is_none() && self.state.steps_taken < options.step_limit {
            self.step()?;
        }
        let outcome = self.finished.clone().unwrap_or(Outcome::StepLimitExceeded);
        let audit = audit(&self.trace);
        Ok(ComposeResult {
            outcome,
            external: self.state.external.clone(),
            state: self.state,
            trace: self.trace,
            audit,
        })
    }

    /// Fires exactly one rule.
    pub fn step(&mut self) -> Result<StepOutcome, ComposeError> {
        if let Some(outcome) = &self.finished {
            return Ok(StepOutcome::Terminal(outcome.clone()));
        }
        self.state.steps_taken += 1;
        let step = self.state.steps_taken;
        let before = self.state.complexity();
        let mut event = TraceEvent::new(step, RuleId::Cleanup, before);
        let terminal = self.fire(&mut event)?;
        event.complexity_after = match &terminal {
            Some(_) => before,
            None => self.state.complexity(),
        };
        self.trace.push(event);
        Ok(match terminal {
            Some(outcome) => {
                self.finished = Some(outcome.clone());
                StepOutcome::Terminal(outcome)
            }
            None => StepOutcome::Fired,
        })
    }

    fn fire(&mut self, event: &mut TraceEvent) -> Result<Option<Outcome>, ComposeError> {
        let step = event.step;
        let eval_err = |source| ComposeError::Eval { step, source };

        if let Some(pending) = self.state.pending.take() {
            event.subject = Some(pending.to_string());
            event.subject_complexity = Some(pending.complexity());
            // R6: the first instance whose receiving part accepts the pending type.
            for i in 0..self.state.theta.len() {
                let recv = &self.state.theta[i].current.recv;
                if recv.is_void() {
                    continue;
                }
                let mut trial = self.state.fresh.clone();
                let d = match_types(&pending, recv, &mut trial);
                if d.is_bottom() {
                    continue;
                }
                self.state.fresh = trial;
                let inst = &mut self.state.theta[i];
                inst.current = receive(&inst.current, &d).map_err(eval_err)?;
                event.rule_id = RuleId::Resume;
                event.receiver_index = Some(i);
                event.receiver_id = Some(inst.id);
                event.ground_step = d.is_empty();
                event.bindings = Some(d);
                return Ok(None);
            }
            // R7: nobody can receive it.
            event.rule_id = RuleId::External;
            self.state.external.push(pending);
            return Ok(None);
        }

        // R1: remove a spent instance, or restore it when starred.
        if let Some(i) = first(&self.state.theta, |inst| inst.current.is_spent()).index {
            let old_id = self.state.theta[i].id;
            event.actor_index = Some(i);
            event.actor_id = Some(old_id);
            match self.state.theta[i].original.clone() {
                Some(original) => {
                    let id = self.state.allocate_id();
                    let inst = &mut self.state.theta[i];
                    inst.id = id;
                    inst.current = rename_coroutine(&original, id);
                    event.rule_id = RuleId::StarRestore;
                    event.new_id = Some(id);
                    event.ground_step = false;
                }
                None => {
                    self.state.theta.remove(i);
                    event.rule_id = RuleId::Cleanup;
                }
            }
            return Ok(None);
        }

        // R2 and its empty-Θ counterpart.
        match self.state.theta.as_slice() {
            [] => {
                event.rule_id = RuleId::TerminalSingle;
                let yld = Type::Seq(self.state.external.clone()).normalize();
                return Ok(Some(Outcome::Composed(Type::coroutine(Type::Void, yld))));
            }
            [survivor] => {
                event.rule_id = RuleId::TerminalSingle;
                event.actor_index = Some(0);
                event.actor_id = Some(survivor.id);
                let mut items = self.state.external.clone();
                items.push(survivor.current.yld.clone());
                let composed =
                    Type::coroutine(survivor.current.recv.clone(), Type::Seq(items).normalize());
                return Ok(Some(Outcome::Composed(composed)));
            }
            _ => {}
        }

        // R8: an instance whose demand is a coroutine consumes another instance.
        for i in 0..self.state.theta.len() {
            let Some(pattern @ Type::Coroutine(_)) = self.state.theta[i].current.recv.head() else {
                continue;
            };
            let pattern = pattern.clone();
            for j in 0..self.state.theta.len() {
                if j == i {
                    continue;
                }
                let offered = self.state.theta[j].as_type();
                let mut trial = self.state.fresh.clone();
                let d = match_types(&offered, &pattern, &mut trial);
                if d.is_bottom() {
                    continue;
                }
                self.state.fresh = trial;
                let receiver_id = self.state.theta[i].id;
                let consumed = self.state.theta.remove(j);
                let i_now = if j < i { i - 1 } else { i };
                let inst = &mut self.state.theta[i_now];
                inst.current = receive(&inst.current, &d).map_err(eval_err)?;
                event.rule_id = RuleId::ConsumeCoroutine;
                event.receiver_index = Some(i);
                event.receiver_id = Some(receiver_id);
                event.actor_index = Some(j);
                event.actor_id = Some(consumed.id);
                event.subject = Some(consumed.current.to_string());
                event.subject_complexity = Some(consumed.complexity());
                event.ground_step = d.is_empty();
                event.bindings = Some(d);
                return Ok(None);
            }
        }

        // R4: a yielded coroutine joins Θ right after its producer.
        let yields_coroutine = |inst: &Instance| {
            inst.current.recv.is_void()
                && matches!(
                    inst.current.yld.head(),
                    Some(Type::Coroutine(_) | Type::Ref(_))
                )
        };
        if let Some(i) = first(&self.state.theta, yields_coroutine).index {
            let head = self.state.theta[i].current.yld.head().cloned();
            let tail = self.state.theta[i].current.yld.tail().unwrap_or(Type::Void);
            let id = self.state.allocate_id();
            let (inserted, ground) = match head {
                Some(Type::Coroutine(c)) => (*c, true),
                Some(Type::Ref(label)) => {
                    let body = self.labels.get(&label).cloned().ok_or_else(|| {
                        ComposeError::UnresolvedRef {
                            step,
                            label: label.clone(),
                        }
                    })?;
                    (rename_coroutine(&body, id), false)
                }
                _ => unreachable!("checked by the predicate"),
            };
            let original = inserted.starred.then(|| inserted.clone());
            event.rule_id = RuleId::YieldCoroutine;
            event.actor_index = Some(i);
            event.actor_id = Some(self.state.theta[i].id);
            event.new_id = Some(id);
            event.subject = Some(inserted.to_string());
            event.subject_complexity = Some(inserted.complexity());
            event.ground_step = ground;
            self.state.theta[i].current.yld = tail;
            self.state.theta.insert(
                i + 1,
                Instance {
                    id,
                    current: inserted,
                    original,
                },
            );
            return Ok(None);
        }

        // R3: yield the head of the first instance that has nothing left to receive.
        let can_yield =
            |inst: &Instance| inst.current.recv.is_void() && !inst.current.yld.is_void();
        if let Some(i) = first(&self.state.theta, can_yield).index {
            let inst = &mut self.state.theta[i];
            let head = inst.current.yld.head().cloned().unwrap_or(Type::Void);
            inst.current.yld = inst.current.yld.tail().unwrap_or(Type::Void);
            event.rule_id = RuleId::Yield;
            event.actor_index = Some(i);
            event.actor_id = Some(inst.id);
            event.subject = Some(head.to_string());
            event.subject_complexity = Some(head.complexity());
            self.state.pending = Some(head);
            return Ok(None);
        }

        // R5: deadlock.
        event.rule_id = RuleId::TerminalDeadlock;
        let mut items = self.state.external.clone();
        items.extend(self.state.theta_types());
        Ok(Some(Outcome::Residual(Type::Seq(items).normalize())))
    }
}

// `<tl(recv) ; yld>[D]`
fn receive(current: &Coroutine, d: &Bindings) -> Result<Coroutine, EvalError> {
    let next = Coroutine {
        recv: current.recv.tail().unwrap_or(Type::Void),
        ..current.clone()
    };
    match substitute(&next.into_type(), d)? {
        Type::Coroutine(c) => Ok(*c),
        _ => unreachable!("substitution keeps the coroutine node"),
    }
}

fn rename_coroutine(c: &Coroutine, id: u32) -> Coroutine {
    match c.clone().into_type().rename(&format!("{SUFFIX_MARK}{id}")) {
        Type::Coroutine(c) => *c,
        _ => unreachable!("renaming keeps the coroutine node"),
    }
}

/// Composes a program.
pub fn compose(program: &Program, options: &ComposeOptions) -> Result<ComposeResult, ComposeError> {
    Composer::new(program)?.run(options)
}
