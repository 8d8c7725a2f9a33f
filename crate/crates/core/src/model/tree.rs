//! Statement and expression trees for method bodies.
//!
//! The trees keep only what the metrics and the reference analysis consume:
//! control structure, declared locals, invocations, field accesses,
//! instantiations and the operators that count as decision points.

use serde::Serialize;
use std::fmt;

/// A type as written in source, with generic arguments discarded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypeRef {
    /// Dotted name as written (`String`, `java.util.List`, `Map.Entry`).
    pub name: String,
    pub dims: u8,
    pub varargs: bool,
}

impl TypeRef {
    pub fn simple(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            dims: 0,
            varargs: false,
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(
            self.name.as_str(),
            "boolean" | "byte" | "char" | "short" | "int" | "long" | "float" | "double" | "void" | "var"
        )
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for _ in 0..self.dims {
            f.write_str("[]")?;
        }
        if self.varargs {
            f.write_str("...")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StmtKind {
    Block,
    If,
    ElseArm,
    For,
    While,
    Do,
    Switch,
    CaseArm,
    DefaultArm,
    Try,
    Catch,
    Finally,
    Return,
    LocalDecl,
    ExprStmt,
    Throw,
    Jump,
    Synchronized,
    Empty,
}

impl StmtKind {
    /// Control structures that open a nesting level.
    pub fn is_nesting(self) -> bool {
        matches!(
            self,
            StmtKind::If
                | StmtKind::For
                | StmtKind::While
                | StmtKind::Do
                | StmtKind::Switch
                | StmtKind::Try
        )
    }
}

/// A local variable introduced by a statement (declaration, loop variable,
/// catch parameter or try resource).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalVar {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: u32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub locals: Vec<LocalVar>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub exprs: Vec<Expr>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Stmt>,
}

impl Stmt {
    pub fn new(kind: StmtKind, line: u32) -> Self {
        Self {
            kind,
            line,
            locals: Vec::new(),
            exprs: Vec::new(),
            children: Vec::new(),
        }
    }

    /// Pre-order traversal over this node and every descendant.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    /// Number of top-level statements when this node is a block.
    pub fn statement_count(&self) -> usize {
        match self.kind {
            StmtKind::Block => self
                .children
                .iter()
                .filter(|c| c.kind != StmtKind::Empty)
                .count(),
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "node", rename_all = "kebab-case")]
pub enum Expr {
    Name {
        name: String,
    },
    Literal,
    This,
    Super,
    Field {
        target: Box<Expr>,
        name: String,
    },
    Call {
        target: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    New {
        ty: TypeRef,
        args: Vec<Expr>,
        anonymous_body: bool,
    },
    NewArray {
        ty: TypeRef,
        exprs: Vec<Expr>,
    },
    ArrayInit {
        items: Vec<Expr>,
    },
    Index {
        target: Box<Expr>,
        index: Box<Expr>,
    },
    Cast {
        ty: TypeRef,
        expr: Box<Expr>,
    },
    InstanceOf {
        expr: Box<Expr>,
        ty: TypeRef,
    },
    ClassLit {
        ty: TypeRef,
    },
    Unary {
        op: String,
        expr: Box<Expr>,
    },
    Binary {
        op: String,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    Assign {
        op: String,
        target: Box<Expr>,
        value: Box<Expr>,
    },
    MethodRef {
        target: Box<Expr>,
        name: String,
    },
    /// Placeholder for a construct skipped by the parser (lambda bodies,
    /// switch expressions).
    Skipped,
}

impl Expr {
    pub fn name(n: impl Into<String>) -> Self {
        Expr::Name { name: n.into() }
    }

    /// Direct sub-expressions.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Name { .. }
            | Expr::Literal
            | Expr::This
            | Expr::Super
            | Expr::ClassLit { .. }
            | Expr::Skipped => Vec::new(),
            Expr::Field { target, .. } | Expr::MethodRef { target, .. } => vec![target],
            Expr::Call { target, args, .. } => target.iter().map(|t| &**t).chain(args).collect(),
            Expr::New { args, .. } => args.iter().collect(),
            Expr::NewArray { exprs, .. } => exprs.iter().collect(),
            Expr::ArrayInit { items } => items.iter().collect(),
            Expr::Index { target, index } => vec![target, index],
            Expr::Cast { expr, .. } | Expr::InstanceOf { expr, .. } | Expr::Unary { expr, .. } => {
                vec![expr]
            }
            Expr::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            Expr::Ternary {
                cond,
                then,
                otherwise,
            } => vec![cond, then, otherwise],
            Expr::Assign { target, value, .. } => vec![target, value],
        }
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Dotted rendering of a pure name chain (`a.b.c`), if this is one.
    pub fn dotted(&self) -> Option<String> {
        match self {
            Expr::Name { name } => Some(name.clone()),
            Expr::Field { target, name } => target.dotted().map(|t| format!("{t}.{name}")),
            _ => None,
        }
    }
}
