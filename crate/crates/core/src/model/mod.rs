//! Resolved, project-wide model of source files, types, members and the
//! file-to-file references between them.
//!
//! A [`CodeModel`] is immutable once built. Ids are dense indices assigned in
//! sorted-name order so two builds over the same sources are identical.

pub mod tree;

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

pub use tree::{Expr, LocalVar, Stmt, StmtKind, TypeRef};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntegrityError {
    #[error("method {method} refers to missing owner type id {owner}")]
    DanglingOwner { method: String, owner: u32 },
    #[error("unknown method id {0}")]
    UnknownMethod(u32),
    #[error("unknown type id {0}")]
    UnknownType(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct TypeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct MethodId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct FieldId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Protected,
    Package,
    Private,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Import,
    Supertype,
    FieldType,
    ParamType,
    ReturnType,
    Invocation,
    FieldAccess,
    Instantiation,
    /// Local declarations, casts, `instanceof` and class literals.
    TypeUse,
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ReferenceKind::Import => "import",
            ReferenceKind::Supertype => "supertype",
            ReferenceKind::FieldType => "field-type",
            ReferenceKind::ParamType => "param-type",
            ReferenceKind::ReturnType => "return-type",
            ReferenceKind::Invocation => "invocation",
            ReferenceKind::FieldAccess => "field-access",
            ReferenceKind::Instantiation => "instantiation",
            ReferenceKind::TypeUse => "type-use",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceFile {
    pub path: String,
    pub package: String,
    pub type_ids: Vec<TypeId>,
    /// Lines that are neither blank nor entirely comment.
    pub loc: u32,
    pub parse_gaps: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeEntity {
    pub id: TypeId,
    pub qualified_name: String,
    pub simple_name: String,
    pub kind: TypeKind,
    pub visibility: Visibility,
    pub file: String,
    pub field_ids: Vec<FieldId>,
    pub method_ids: Vec<MethodId>,
    pub supertype_names: Vec<String>,
    pub loc: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Param {
    pub name: String,
    pub ty: TypeRef,
}

/// One attribute access made by a method body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FieldRef {
    /// Project type that owns the attribute.
    pub owner: TypeId,
    pub name: String,
    /// True when the owner is the accessing method's own type.
    pub own: bool,
    /// True when the access went through an accessor-named method.
    pub via_accessor: bool,
}

/// One invocation made by a method body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct InvocationRef {
    /// Receiver as written (`dao`, `this`, `Util`), absent for unqualified calls.
    pub receiver: Option<String>,
    pub name: String,
    pub arg_count: usize,
    /// Project type the call dispatches on, when it could be determined.
    pub target: Option<TypeId>,
}

impl fmt::Display for InvocationRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.receiver {
            Some(r) => write!(f, "{r}.{}", self.name),
            None => f.write_str(&self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodEntity {
    pub id: MethodId,
    pub owner: TypeId,
    pub name: String,
    /// Name plus ordered parameter type names, e.g. `save(Turma,int)`.
    pub signature: String,
    pub visibility: Visibility,
    pub is_constructor: bool,
    pub is_static: bool,
    pub params: Vec<Param>,
    pub return_type: Option<TypeRef>,
    #[serde(skip)]
    pub body: Option<Stmt>,
    pub accessed_fields: Vec<FieldRef>,
    pub invoked: Vec<InvocationRef>,
    /// Project types instantiated with `new`.
    pub instantiated: Vec<TypeId>,
    /// Every project type referenced from the signature or body.
    pub referenced_types: BTreeSet<TypeId>,
    /// Parameters read or written in the body.
    pub used_params: BTreeSet<String>,
    /// Locals declared in the body.
    pub locals: BTreeSet<String>,
    /// Non-blank, non-comment lines spanned by the declaration.
    pub loc: u32,
    pub start_line: u32,
}

impl MethodEntity {
    /// Accessor: `get*`/`set*`/`is*` name with at most one statement.
    pub fn is_accessor(&self) -> bool {
        if self.is_constructor || !is_accessor_name(&self.name) {
            return false;
        }
        match &self.body {
            Some(b) => b.statement_count() <= 1,
            None => false,
        }
    }
}

/// `getX`, `setX`, `isX` with an upper-case letter after the prefix.
pub fn is_accessor_name(name: &str) -> bool {
    accessor_attribute(name).is_some()
}

/// Attribute implied by an accessor-style name: `getNome` → `nome`.
pub fn accessor_attribute(name: &str) -> Option<String> {
    let rest = ["get", "set", "is"]
        .iter()
        .find_map(|p| name.strip_prefix(p))?;
    let mut chars = rest.chars();
    let first = chars.next()?;
    if !first.is_uppercase() {
        return None;
    }
    Some(first.to_lowercase().chain(chars).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldEntity {
    pub id: FieldId,
    pub owner: TypeId,
    pub name: String,
    pub ty: TypeRef,
    pub visibility: Visibility,
    pub is_static: bool,
    pub is_final: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Reference {
    pub from_file: String,
    pub to_file: String,
    pub kind: ReferenceKind,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CodeModel {
    pub files: BTreeMap<String, SourceFile>,
    pub types: Vec<TypeEntity>,
    pub methods: Vec<MethodEntity>,
    pub fields: Vec<FieldEntity>,
    pub references: Vec<Reference>,
    /// Type names that resolved outside the project, per file.
    pub unresolved: BTreeMap<String, BTreeSet<String>>,
    #[serde(skip)]
    pub(crate) type_index: BTreeMap<String, TypeId>,
}

impl CodeModel {
    /// The type with this qualified name, if the project declares it.
    pub fn entity_lookup(&self, qualified_name: &str) -> Option<&TypeEntity> {
        self.type_index
            .get(qualified_name)
            .map(|id| &self.types[id.0 as usize])
    }

    pub fn type_entity(&self, id: TypeId) -> Result<&TypeEntity, IntegrityError> {
        self.types
            .get(id.0 as usize)
            .ok_or(IntegrityError::UnknownType(id.0))
    }

    pub fn method(&self, id: MethodId) -> Result<&MethodEntity, IntegrityError> {
        self.methods
            .get(id.0 as usize)
            .ok_or(IntegrityError::UnknownMethod(id.0))
    }

    pub fn methods_of<'a>(&'a self, ty: &'a TypeEntity) -> impl Iterator<Item = &'a MethodEntity> {
        ty.method_ids.iter().map(|id| &self.methods[id.0 as usize])
    }

    pub fn fields_of<'a>(&'a self, ty: &'a TypeEntity) -> impl Iterator<Item = &'a FieldEntity> {
        ty.field_ids.iter().map(|id| &self.fields[id.0 as usize])
    }

    pub fn types_in_file<'a>(&'a self, path: &str) -> impl Iterator<Item = &'a TypeEntity> + 'a {
        self.files
            .get(path)
            .into_iter()
            .flat_map(|f| f.type_ids.iter())
            .map(|id| &self.types[id.0 as usize])
    }

    /// `<owner qualified name>#<name>(<param types>)`.
    pub fn method_qualified_name(&self, method: &MethodEntity) -> Result<String, IntegrityError> {
        let owner = self
            .types
            .get(method.owner.0 as usize)
            .ok_or_else(|| IntegrityError::DanglingOwner {
                method: method.signature.clone(),
                owner: method.owner.0,
            })?;
        let params: Vec<String> = method.params.iter().map(|p| p.ty.to_string()).collect();
        Ok(format!(
            "{}#{}({})",
            owner.qualified_name,
            method.name,
            params.join(",")
        ))
    }

    /// Project files declaring the given types.
    pub fn files_of_types<'a>(
        &'a self,
        ids: impl IntoIterator<Item = &'a TypeId>,
    ) -> BTreeSet<&'a str> {
        ids.into_iter()
            .filter_map(|id| self.types.get(id.0 as usize))
            .map(|t| t.file.as_str())
            .collect()
    }
}
