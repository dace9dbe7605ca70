//! Types for composable coroutines.
//!
//! A coroutine type `<r ; y>` states what a coroutine receives before it
//! runs and what it yields afterwards. Given coroutine types in activation
//! order, [`engine::compose`] computes one type describing their collective
//! behavior, or the residual of a deadlock. Every step is recorded and
//! audited against complexity bounds.
//!
//! ```
//! use corotype::{compose, parse_program, ComposeOptions, Outcome};
//!
//! let program = parse_program("a: <S;T>\nl: <void;S>\nb: <S;U>").unwrap();
//! let result = compose(&program, &ComposeOptions::default()).unwrap();
//! assert_eq!(result.outcome, Outcome::Composed(corotype::parse_type("<S ; [T, U]>").unwrap()));
//! ```

pub mod cli;
pub mod corpus;
pub mod engine;
pub mod matcher;
pub mod syntax;
pub mod types;

pub use engine::{compose, ComposeError, ComposeOptions, ComposeResult, Composer, Outcome};
pub use matcher::{match_types, substitute, unify_length, Bindings, FreshSupply};
pub use syntax::{parse_program, parse_type, print_type, Program};
pub use types::{Coroutine, Length, Type};
