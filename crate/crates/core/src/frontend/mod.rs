//! Input formats: JSON models and `.qtp` programs.

pub mod compile;
pub mod json;
pub mod program;

pub use compile::{compile_probabilistic, compile_weighted, CompileError, CompileOptions, CompileReport, ProbMode};
pub use json::{emit_model, emit_model_value, parse_model, parse_model_value, JsonError};
pub use program::{parse_program, ParseError, Program, ProgramMode};
