//! Example programs bundled with the crate, each with its expected result.

use std::fmt;

use crate::engine::{compose, ComposeError, ComposeOptions, ComposeResult, Outcome};
use crate::syntax::{parse_program, Program, SyntaxError};
use crate::types::{Length, Type};

/// What composing an example must produce.
#[derive(Clone, Copy)]
pub enum Expectation {
    /// The printed composed or residual type.
    Exact(&'static str),
    /// Composition must not terminate within the example's step limit.
    StepLimit,
    /// A property of the result, described for the report.
    Predicate(&'static str, fn(&ComposeResult) -> bool),
}

impl fmt::Debug for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Exact(s) => write!(f, "Exact({s:?})"),
            Expectation::StepLimit => f.write_str("StepLimit"),
            Expectation::Predicate(d, _) => write!(f, "Predicate({d:?})"),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Exact(s) => f.write_str(s),
            Expectation::StepLimit => f.write_str("step limit exceeded"),
            Expectation::Predicate(d, _) => f.write_str(d),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Example {
    pub name: &'static str,
    pub source: &'static str,
    pub expectation: Expectation,
    pub step_limit: usize,
}

impl Example {
    pub fn program(&self) -> Result<Program, SyntaxError> {
        parse_program(self.source)
    }

    pub fn compose(&self) -> Result<ComposeResult, ComposeError> {
        let program = self.program()?;
        compose(
            &program,
            &ComposeOptions {
                step_limit: self.step_limit,
            },
        )
    }

    pub fn check(&self, result: &ComposeResult) -> bool {
        match self.expectation {
            Expectation::Exact(expected) => result
                .result_type()
                .is_some_and(|t| t.to_string() == expected),
            Expectation::StepLimit => result.outcome == Outcome::StepLimitExceeded,
            Expectation::Predicate(_, pred) => pred(result),
        }
    }
}

/// Outcome of running one example.
#[derive(Debug, Clone)]
pub struct ExampleReport {
    pub name: &'static str,
    pub expected: String,
    /// Printed result, `step limit exceeded`, or the error.
    pub actual: String,
    pub steps: usize,
    pub passed: bool,
}

pub fn run_example(example: &Example) -> ExampleReport {
    let (actual, steps, passed) = match example.compose() {
        Ok(result) => {
            let actual = match &result.outcome {
                Outcome::Composed(t) => t.to_string(),
                Outcome::Residual(t) => format!("residual {t}"),
                Outcome::StepLimitExceeded => "step limit exceeded".to_string(),
            };
            (actual, result.steps(), example.check(&result))
        }
        Err(e) => (format!("error: {e}"), 0, false),
    };
    ExampleReport {
        name: example.name,
        expected: example.expectation.to_string(),
        actual,
        steps,
        passed,
    }
}

pub fn run_all() -> Vec<ExampleReport> {
    EXAMPLES.iter().map(run_example).collect()
}

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}

const LIMIT: usize = crate::engine::DEFAULT_STEP_LIMIT;

pub static EXAMPLES: &[Example] = &[
    Example {
        name: "starting-position",
        source: include_str!("../corpus/starting_position.cot"),
        expectation: Expectation::Exact("<S ; [T, U]>"),
        step_limit: LIMIT,
    },
    Example {
        name: "order-independent",
        source: include_str!("../corpus/order_independent.cot"),
        expectation: Expectation::Exact("<void ; U>"),
        step_limit: LIMIT,
    },
    Example {
        name: "endless-cycle",
        source: include_str!("../corpus/endless_cycle.cot"),
        expectation: Expectation::StepLimit,
        step_limit: 50,
    },
    Example {
        name: "file-zip",
        source: include_str!("../corpus/file_zip.cot"),
        expectation: Expectation::Exact("<void ; (String, String)^min(α0, β0)>"),
        step_limit: LIMIT,
    },
    Example {
        name: "prolog-sue",
        source: include_str!("../corpus/prolog_sue.cot"),
        expectation: Expectation::Predicate("residual starting with Yes", |r| {
            first_residual(r) == Some(Type::concrete("Yes"))
        }),
        step_limit: LIMIT,
    },
    Example {
        name: "prolog-jane",
        source: include_str!("../corpus/prolog_jane.cot"),
        expectation: Expectation::Predicate("residual not starting with Yes", |r| {
            matches!(r.outcome, Outcome::Residual(_))
                && first_residual(r) != Some(Type::concrete("Yes"))
        }),
        step_limit: LIMIT,
    },
    Example {
        name: "mem-positive",
        source: include_str!("../corpus/mem_positive.cot"),
        expectation: Expectation::Predicate("first external yield is T^*", |r| {
            r.external.first() == Some(&star_list("T"))
        }),
        step_limit: LIMIT,
    },
    Example {
        name: "mem-negative",
        source: include_str!("../corpus/mem_negative.cot"),
        expectation: Expectation::Predicate(
            "residual starting with F^*, holding rec1, rec2 and an eq test",
            mem_negative_holds,
        ),
        step_limit: LIMIT,
    },
    Example {
        name: "mapping-x-t",
        source: include_str!("../corpus/mapping_x_t.cot"),
        expectation: Expectation::Exact("[a: <T ; Int>, print*: <Int ; void>]"),
        step_limit: LIMIT,
    },
    Example {
        name: "mapping-x-other",
        source: include_str!("../corpus/mapping_x_other.cot"),
        expectation: Expectation::Exact("[a: <T ; Int>, print*: <Int ; void>]"),
        step_limit: LIMIT,
    },
];

fn star_list(name: &str) -> Type {
    Type::list(Type::concrete(name), Length::Star)
}

fn first_residual(r: &ComposeResult) -> Option<Type> {
    r.residual_items().into_iter().next()
}

fn mem_negative_holds(r: &ComposeResult) -> bool {
    let items = r.residual_items();
    let label_of = |t: &Type| t.as_coroutine().and_then(|c| c.label.clone());
    let labels: Vec<String> = items.iter().filter_map(label_of).collect();
    items.first() == Some(&star_list("F"))
        && labels.iter().any(|l| l == "rec1")
        && labels.iter().any(|l| l == "rec2")
        && labels.iter().any(|l| l == "eq")
}
