//! Java front end: tokenizer, subset parser and cross-file resolution into a
//! [`CodeModel`](crate::model::CodeModel).

pub mod lexer;
pub mod parser;
mod resolve;

use thiserror::Error;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_unit, CompilationUnit, FieldDecl, Import, MethodDecl, ParamDecl, TypeDecl};
pub use resolve::{build_model, resolve_type_name, Resolution};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FrontendError {
    #[error("lexical error at line {line}: {message}")]
    Lexical { line: u32, message: String },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ResolveError {
    #[error("ambiguous type name `{name}` in {path}: candidates {}", candidates.join(", "))]
    Ambiguous {
        path: String,
        name: String,
        candidates: Vec<String>,
    },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("type {name} declared twice: {first} and {second}")]
    DuplicateType {
        name: String,
        first: String,
        second: String,
    },
    #[error("source path {0} appears twice")]
    DuplicatePath(String),
    #[error("{owner} declares {member} twice")]
    DuplicateMember { owner: String, member: String },
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}
