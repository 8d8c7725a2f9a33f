//! Cross-file name resolution and [`CodeModel`] assembly.
//!
//! Type names resolve with the precedence: declared in the same file,
//! single-type import, same package, on-demand import, otherwise external.
//! Receivers of invocations and field accesses are typed from the declared
//! types of locals, parameters and fields only.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::parser::{CompilationUnit, FieldDecl, MethodDecl, TypeDecl};
use super::{ModelError, ResolveError};
use crate::model::{
    accessor_attribute, is_accessor_name, CodeModel, Expr, FieldEntity, FieldId, FieldRef,
    InvocationRef, MethodEntity, MethodId, Param, Reference, ReferenceKind, SourceFile, Stmt,
    StmtKind, TypeEntity, TypeId, TypeRef,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    /// Qualified name of a project type.
    Project(String),
    /// Name that does not denote a project type.
    External(String),
}

fn qualify(package: &str, simple: &str) -> String {
    if package.is_empty() {
        simple.to_string()
    } else {
        format!("{package}.{simple}")
    }
}

/// Resolve a type name as written in `unit` against the project's types.
pub fn resolve_type_name(
    unit: &CompilationUnit,
    name: &str,
    model: &CodeModel,
) -> Result<Resolution, ResolveError> {
    resolve_with(unit, name, &[], &|q| model.type_index.contains_key(q))
}

fn resolve_with(
    unit: &CompilationUnit,
    name: &str,
    type_params: &[&str],
    known: &dyn Fn(&str) -> bool,
) -> Result<Resolution, ResolveError> {
    if name.contains('.') {
        if known(name) {
            return Ok(Resolution::Project(name.to_string()));
        }
        let parts: Vec<&str> = name.split('.').collect();
        // `pkg.Outer.Inner` collapses onto `pkg.Outer`.
        for i in (2..parts.len()).rev() {
            let prefix = parts[..i].join(".");
            if known(&prefix) {
                return Ok(Resolution::Project(prefix));
            }
        }
        // `Outer.Inner` collapses onto whatever `Outer` resolves to.
        return match resolve_simple(unit, parts[0], type_params, known)? {
            Resolution::Project(q) => Ok(Resolution::Project(q)),
            Resolution::External(_) => Ok(Resolution::External(name.to_string())),
        };
    }
    resolve_simple(unit, name, type_params, known)
}

fn resolve_simple(
    unit: &CompilationUnit,
    name: &str,
    type_params: &[&str],
    known: &dyn Fn(&str) -> bool,
) -> Result<Resolution, ResolveError> {
    if type_params.contains(&name) {
        return Ok(Resolution::External(name.to_string()));
    }
    if unit.types.iter().any(|t| t.name == name) {
        let q = qualify(&unit.package, name);
        if known(&q) {
            return Ok(Resolution::Project(q));
        }
    }
    let single = unit.imports.iter().find(|i| {
        !i.on_demand && !i.is_static && i.name.rsplit('.').next() == Some(name)
    });
    if let Some(imp) = single {
        return Ok(if known(&imp.name) {
            Resolution::Project(imp.name.clone())
        } else {
            Resolution::External(imp.name.clone())
        });
    }
    let same_package = qualify(&unit.package, name);
    if known(&same_package) {
        return Ok(Resolution::Project(same_package));
    }
    let candidates: BTreeSet<String> = unit
        .imports
        .iter()
        .filter(|i| i.on_demand && !i.is_static)
        .map(|i| format!("{}.{name}", i.name))
        .filter(|q| known(q))
        .collect();
    match candidates.len() {
        0 => Ok(Resolution::External(name.to_string())),
        1 => Ok(Resolution::Project(candidates.into_iter().next().unwrap_or_default())),
        _ => Err(ResolveError::Ambiguous {
            path: unit.path.clone(),
            name: name.to_string(),
            candidates: candidates.into_iter().collect(),
        }),
    }
}

fn signature(m: &MethodDecl) -> String {
    let params: Vec<String> = m.params.iter().map(|p| p.ty.to_string()).collect();
    format!("{}({})", m.name, params.join(","))
}

fn decl_is_accessor(m: &MethodDecl) -> bool {
    !m.is_constructor
        && is_accessor_name(&m.name)
        && m.body.as_ref().is_some_and(|b| b.statement_count() <= 1)
}

/// Shared, read-only context for attributing every body in the project.
struct Project<'a> {
    units: &'a [CompilationUnit],
    index: BTreeMap<String, TypeId>,
    /// (unit index, type index) per type id.
    decls: Vec<(usize, usize)>,
    /// Per type: method name → whether some declaration of it is an accessor.
    accessors: Vec<HashMap<&'a str, bool>>,
}

impl<'a> Project<'a> {
    fn decl(&self, id: TypeId) -> (&'a CompilationUnit, &'a TypeDecl) {
        let (u, t) = self.decls[id.0 as usize];
        (&self.units[u], &self.units[u].types[t])
    }

    fn resolve_in(
        &self,
        unit: &CompilationUnit,
        type_params: &[&str],
        name: &str,
    ) -> Result<Option<TypeId>, ResolveError> {
        let known = |q: &str| self.index.contains_key(q);
        Ok(match resolve_with(unit, name, type_params, &known)? {
            Resolution::Project(q) => self.index.get(&q).copied(),
            Resolution::External(_) => None,
        })
    }

    /// An accessor-style call on `owner` reads attribute data unless the
    /// owner declares that name as a non-accessor method.
    fn accessor_like(&self, owner: TypeId, name: &str) -> bool {
        match self.accessors[owner.0 as usize].get(name) {
            Some(is_acc) => *is_acc,
            None => is_accessor_name(name),
        }
    }

    /// Declared type of field `name` in project type `owner`.
    fn field_type(&self, owner: TypeId, name: &str) -> Result<Option<TypeId>, ResolveError> {
        let (unit, decl) = self.decl(owner);
        let Some(f) = decl.fields.iter().find(|f| f.name == name) else {
            return Ok(None);
        };
        if f.ty.is_primitive() || f.ty.dims > 0 {
            return Ok(None);
        }
        let tps: Vec<&str> = decl.type_params.iter().map(String::as_str).collect();
        self.resolve_in(unit, &tps, &f.ty.name)
    }
}

#[derive(Default)]
struct Attribution {
    fields: Vec<FieldRef>,
    invoked: Vec<InvocationRef>,
    instantiated: Vec<TypeId>,
    referenced: BTreeSet<TypeId>,
    refs: BTreeSet<(TypeId, ReferenceKind)>,
    used_params: BTreeSet<String>,
    locals: BTreeSet<String>,
    unresolved: BTreeSet<String>,
}

enum Recv {
    Own,
    Type(TypeId),
    Unknown,
}

struct Walker<'p, 'a> {
    project: &'p Project<'a>,
    unit: &'a CompilationUnit,
    own: TypeId,
    own_decl: &'a TypeDecl,
    type_params: Vec<&'a str>,
    scopes: Vec<HashMap<String, TypeRef>>,
    out: Attribution,
}

impl<'p, 'a> Walker<'p, 'a> {
    fn new(project: &'p Project<'a>, own: TypeId, method: Option<&'a MethodDecl>) -> Self {
        let (unit, own_decl) = project.decl(own);
        let mut type_params: Vec<&str> = own_decl.type_params.iter().map(String::as_str).collect();
        let mut params = HashMap::new();
        if let Some(m) = method {
            type_params.extend(m.type_params.iter().map(String::as_str));
            for p in &m.params {
                params.insert(p.name.clone(), p.ty.clone());
            }
        }
        Self {
            project,
            unit,
            own,
            own_decl,
            type_params,
            scopes: vec![params],
            out: Attribution::default(),
        }
    }

    fn resolve(&mut self, ty: &TypeRef) -> Result<Option<TypeId>, ResolveError> {
        if ty.is_primitive() {
            return Ok(None);
        }
        let known = |q: &str| self.project.index.contains_key(q);
        match resolve_with(self.unit, &ty.name, &self.type_params, &known)? {
            Resolution::Project(q) => Ok(self.project.index.get(&q).copied()),
            Resolution::External(name) => {
                self.out.unresolved.insert(name);
                Ok(None)
            }
        }
    }

    fn reference(&mut self, ty: &TypeRef, kind: ReferenceKind) -> Result<Option<TypeId>, ResolveError> {
        let id = self.resolve(ty)?;
        if let Some(id) = id {
            self.out.refs.insert((id, kind));
            self.out.referenced.insert(id);
        }
        Ok(id)
    }

    fn lookup_var(&self, name: &str) -> Option<(usize, &TypeRef)> {
        self.scopes
            .iter()
            .enumerate()
            .rev()
            .find_map(|(i, s)| s.get(name).map(|t| (i, t)))
    }

    fn is_own_field(&self, name: &str) -> bool {
        self.own_decl.fields.iter().any(|f| f.name == name)
    }

    fn own_field_decl(&self, name: &str) -> Option<&'a FieldDecl> {
        self.own_decl.fields.iter().find(|f| f.name == name)
    }

    fn declare(&mut self, name: &str, ty: &TypeRef) -> Result<(), ResolveError> {
        self.reference(ty, ReferenceKind::TypeUse)?;
        self.out.locals.insert(name.to_string());
        if let Some(s) = self.scopes.last_mut() {
            s.insert(name.to_string(), ty.clone());
        }
        Ok(())
    }

    fn recv_from_type(&mut self, ty: &TypeRef) -> Result<Recv, ResolveError> {
        if ty.dims > 0 {
            return Ok(Recv::Unknown);
        }
        Ok(match self.resolve(ty)? {
            Some(id) if id == self.own => Recv::Own,
            Some(id) => Recv::Type(id),
            None => Recv::Unknown,
        })
    }

    fn recv_from_id(&self, id: Option<TypeId>) -> Recv {
        match id {
            Some(id) if id == self.own => Recv::Own,
            Some(id) => Recv::Type(id),
            None => Recv::Unknown,
        }
    }

    /// Static type of a receiver expression, from declarations only.
    fn receiver_of(&mut self, e: &Expr) -> Result<Recv, ResolveError> {
        match e {
            Expr::This => Ok(Recv::Own),
            Expr::Name { name } => {
                if let Some((_, ty)) = self.lookup_var(name) {
                    let ty = ty.clone();
                    return self.recv_from_type(&ty);
                }
                if let Some(f) = self.own_field_decl(name) {
                    return self.recv_from_type(&f.ty.clone());
                }
                let id = self.resolve(&TypeRef::simple(name.clone()))?;
                Ok(self.recv_from_id(id))
            }
            Expr::Field { target, name } => {
                if let Some(d) = e.dotted() {
                    if self.project.index.contains_key(&d) {
                        let id = self.project.index.get(&d).copied();
                        return Ok(self.recv_from_id(id));
                    }
                }
                let id = match self.receiver_of(target)? {
                    Recv::Own => self.project.field_type(self.own, name)?,
                    Recv::Type(t) => self.project.field_type(t, name)?,
                    Recv::Unknown => None,
                };
                Ok(self.recv_from_id(id))
            }
            Expr::New { ty, .. } | Expr::Cast { ty, .. } => self.recv_from_type(ty),
            _ => Ok(Recv::Unknown),
        }
    }

    fn is_type_name(&self, e: &Expr) -> bool {
        match e {
            Expr::Name { name } => self.lookup_var(name).is_none() && !self.is_own_field(name),
            Expr::Field { .. } => e
                .dotted()
                .is_some_and(|d| self.project.index.contains_key(&d)),
            _ => false,
        }
    }

    fn receiver_text(e: &Expr) -> String {
        match e {
            Expr::This => "this".into(),
            Expr::Super => "super".into(),
            Expr::New { ty, .. } => format!("new {}", ty.name),
            other => other.dotted().unwrap_or_else(|| "(expr)".into()),
        }
    }

    fn field_ref(&mut self, owner: Recv, name: &str, via_accessor: bool) {
        match owner {
            Recv::Own => self.out.fields.push(FieldRef {
                owner: self.own,
                name: name.to_string(),
                own: true,
                via_accessor,
            }),
            Recv::Type(t) => {
                self.out.refs.insert((t, ReferenceKind::FieldAccess));
                self.out.referenced.insert(t);
                self.out.fields.push(FieldRef {
                    owner: t,
                    name: name.to_string(),
                    own: false,
                    via_accessor,
                });
            }
            Recv::Unknown => {}
        }
    }

    fn expr(&mut self, e: &Expr) -> Result<(), ResolveError> {
        match e {
            Expr::Name { name } => {
                if let Some((scope, _)) = self.lookup_var(name) {
                    if scope == 0 {
                        self.out.used_params.insert(name.clone());
                    }
                } else if self.is_own_field(name) {
                    self.field_ref(Recv::Own, name, false);
                } else if let Some(id) = self.resolve(&TypeRef::simple(name.clone()))? {
                    // Bare type name used as a static receiver.
                    self.out.referenced.insert(id);
                }
            }
            Expr::Field { target, name } => {
                if let Some(d) = e.dotted() {
                    if let Some(&id) = self.project.index.get(&d) {
                        if id != self.own {
                            self.out.referenced.insert(id);
                        }
                        return Ok(());
                    }
                }
                let recv = self.receiver_of(target)?;
                if matches!(recv, Recv::Type(_)) || matches!(recv, Recv::Own) {
                    self.field_ref(recv, name, false);
                }
                self.expr(target)?;
            }
            Expr::Call { target, name, args } => {
                let recv = match target.as_deref() {
                    None | Some(Expr::This) => Recv::Own,
                    Some(Expr::Super) => Recv::Unknown,
                    Some(t) => self.receiver_of(t)?,
                };
                let target_id = match recv {
                    Recv::Own => Some(self.own),
                    Recv::Type(t) => Some(t),
                    Recv::Unknown => None,
                };
                if let Recv::Type(t) = recv {
                    self.out.refs.insert((t, ReferenceKind::Invocation));
                    self.out.referenced.insert(t);
                    if self.project.accessor_like(t, name) {
                        if let Some(attr) = accessor_attribute(name) {
                            self.field_ref(Recv::Type(t), &attr, true);
                        }
                    }
                }
                self.out.invoked.push(InvocationRef {
                    receiver: target.as_deref().map(Self::receiver_text),
                    name: name.clone(),
                    arg_count: args.len(),
                    target: target_id,
                });
                if let Some(t) = target {
                    if !self.is_type_name(t) {
                        self.expr(t)?;
                    }
                }
                for a in args {
                    self.expr(a)?;
                }
            }
            Expr::New { ty, args, .. } => {
                if let Some(id) = self.reference(ty, ReferenceKind::Instantiation)? {
                    self.out.instantiated.push(id);
                }
                for a in args {
                    self.expr(a)?;
                }
            }
            Expr::NewArray { ty, exprs } => {
                self.reference(&TypeRef::simple(ty.name.clone()), ReferenceKind::TypeUse)?;
                for x in exprs {
                    self.expr(x)?;
                }
            }
            Expr::Cast { ty, expr } => {
                self.reference(&TypeRef::simple(ty.name.clone()), ReferenceKind::TypeUse)?;
                self.expr(expr)?;
            }
            Expr::InstanceOf { expr, ty } => {
                self.reference(&TypeRef::simple(ty.name.clone()), ReferenceKind::TypeUse)?;
                self.expr(expr)?;
            }
            Expr::ClassLit { ty } => {
                self.reference(&TypeRef::simple(ty.name.clone()), ReferenceKind::TypeUse)?;
            }
            Expr::MethodRef { target, .. } => {
                let recv = match &**target {
                    Expr::ClassLit { ty } => self.recv_from_type(ty)?,
                    t => self.receiver_of(t)?,
                };
                if let Recv::Type(t) = recv {
                    self.out.refs.insert((t, ReferenceKind::Invocation));
                    self.out.referenced.insert(t);
                }
                if !self.is_type_name(target) {
                    self.expr(target)?;
                }
            }
            other => {
                for c in other.children() {
                    self.expr(c)?;
                }
            }
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), ResolveError> {
        let scoped = !matches!(s.kind, StmtKind::LocalDecl);
        if scoped {
            self.scopes.push(HashMap::new());
        }
        if s.kind == StmtKind::LocalDecl {
            for e in &s.exprs {
                self.expr(e)?;
            }
            for l in &s.locals {
                self.declare(&l.name, &l.ty)?;
            }
        } else {
            for l in &s.locals {
                self.declare(&l.name, &l.ty)?;
            }
            for e in &s.exprs {
                self.expr(e)?;
            }
        }
        for c in &s.children {
            self.stmt(c)?;
        }
        if scoped {
            self.scopes.pop();
        }
        Ok(())
    }
}

/// Resolve parsed units into a [`CodeModel`].
///
/// The result does not depend on the order of `units`.
pub fn build_model(mut units: Vec<CompilationUnit>) -> Result<CodeModel, ModelError> {
    units.sort_by(|a, b| a.path.cmp(&b.path));
    for w in units.windows(2) {
        if w[0].path == w[1].path {
            return Err(ModelError::DuplicatePath(w[0].path.clone()));
        }
    }

    let mut declared: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (ui, u) in units.iter().enumerate() {
        for (ti, t) in u.types.iter().enumerate() {
            let q = qualify(&u.package, &t.name);
            if let Some(&(pu, _)) = declared.get(&q) {
                return Err(ModelError::DuplicateType {
                    name: q,
                    first: units[pu].path.clone(),
                    second: u.path.clone(),
                });
            }
            declared.insert(q, (ui, ti));
        }
    }
    let index: BTreeMap<String, TypeId> = declared
        .keys()
        .enumerate()
        .map(|(i, q)| (q.clone(), TypeId(i as u32)))
        .collect();
    let decls: Vec<(usize, usize)> = declared.values().copied().collect();
    let accessors = decls
        .iter()
        .map(|&(u, t)| {
            let mut m: HashMap<&str, bool> = HashMap::new();
            for md in &units[u].types[t].methods {
                *m.entry(md.name.as_str()).or_insert(false) |= decl_is_accessor(md);
            }
            m
        })
        .collect();
    let project = Project {
        units: &units,
        index,
        decls,
        accessors,
    };

    let mut model = CodeModel::default();
    let mut file_refs: BTreeMap<usize, BTreeSet<(TypeId, ReferenceKind)>> = BTreeMap::new();
    let mut unresolved: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();

    for (i, (qn, &(ui, ti))) in declared.iter().enumerate() {
        let own = TypeId(i as u32);
        let unit = &units[ui];
        let decl = &unit.types[ti];
        let refs = file_refs.entry(ui).or_default();
        let unres = unresolved.entry(ui).or_default();

        // Type-level references: supertypes, field types, field initializers.
        let mut type_walker = Walker::new(&project, own, None);
        let mut supertype_names = Vec::new();
        for st in &decl.supertypes {
            match type_walker.reference(st, ReferenceKind::Supertype)? {
                Some(id) => supertype_names.push(project.index.iter().find(|(_, v)| **v == id).map(|(k, _)| k.clone()).unwrap_or_default()),
                None => supertype_names.push(st.name.clone()),
            }
        }
        let mut fdecls: Vec<&FieldDecl> = decl.fields.iter().collect();
        fdecls.sort_by(|a, b| a.name.cmp(&b.name));
        let mut field_ids = Vec::new();
        for (k, f) in fdecls.iter().enumerate() {
            if k > 0 && fdecls[k - 1].name == f.name {
                return Err(ModelError::DuplicateMember {
                    owner: qn.clone(),
                    member: f.name.clone(),
                });
            }
            type_walker.reference(&TypeRef::simple(f.ty.name.clone()), ReferenceKind::FieldType)?;
            if let Some(init) = &f.init {
                type_walker.expr(init)?;
            }
            let id = FieldId(model.fields.len() as u32);
            field_ids.push(id);
            model.fields.push(FieldEntity {
                id,
                owner: own,
                name: f.name.clone(),
                ty: f.ty.clone(),
                visibility: f.visibility,
                is_static: f.is_static,
                is_final: f.is_final,
            });
        }
        refs.extend(type_walker.out.refs);
        unres.extend(type_walker.out.unresolved);

        let mut mdecls: Vec<(String, &MethodDecl)> =
            decl.methods.iter().map(|m| (signature(m), m)).collect();
        mdecls.sort_by(|a, b| a.0.cmp(&b.0));
        let mut method_ids = Vec::new();
        for (k, (sig, m)) in mdecls.iter().enumerate() {
            if k > 0 && mdecls[k - 1].0 == *sig {
                return Err(ModelError::DuplicateMember {
                    owner: qn.clone(),
                    member: sig.clone(),
                });
            }
            let mut w = Walker::new(&project, own, Some(m));
            for p in &m.params {
                w.reference(&TypeRef::simple(p.ty.name.clone()), ReferenceKind::ParamType)?;
            }
            if let Some(rt) = &m.return_type {
                w.reference(&TypeRef::simple(rt.name.clone()), ReferenceKind::ReturnType)?;
            }
            if let Some(body) = &m.body {
                w.stmt(body)?;
            }
            let att = w.out;
            refs.extend(att.refs.iter().copied());
            unres.extend(att.unresolved.iter().cloned());
            let id = MethodId(model.methods.len() as u32);
            method_ids.push(id);
            let mut referenced = att.referenced;
            referenced.remove(&own);
            model.methods.push(MethodEntity {
                id,
                owner: own,
                name: m.name.clone(),
                signature: sig.clone(),
                visibility: m.visibility,
                is_constructor: m.is_constructor,
                is_static: m.is_static,
                params: m
                    .params
                    .iter()
                    .map(|p| Param {
                        name: p.name.clone(),
                        ty: p.ty.clone(),
                    })
                    .collect(),
                return_type: m.return_type.clone(),
                body: m.body.clone(),
                accessed_fields: att.fields,
                invoked: att.invoked,
                instantiated: att.instantiated,
                referenced_types: referenced,
                used_params: att.used_params,
                locals: att.locals,
                loc: m.loc,
                start_line: m.start_line,
            });
        }

        model.types.push(TypeEntity {
            id: own,
            qualified_name: qn.clone(),
            simple_name: decl.name.clone(),
            kind: decl.kind,
            visibility: decl.visibility,
            file: unit.path.clone(),
            field_ids,
            method_ids,
            supertype_names,
            loc: decl.loc,
        });
    }

    // Import references.
    for (ui, unit) in units.iter().enumerate() {
        for imp in &unit.imports {
            if imp.on_demand && !imp.is_static {
                continue;
            }
            let target = if imp.is_static && !imp.on_demand {
                imp.name.rsplit_once('.').map(|(o, _)| o.to_string())
            } else {
                Some(imp.name.clone())
            };
            let Some(target) = target else { continue };
            let parts: Vec<&str> = target.split('.').collect();
            let hit = (1..=parts.len())
                .rev()
                .map(|i| parts[..i].join("."))
                .find_map(|p| project.index.get(&p).copied());
            if let Some(id) = hit {
                file_refs.entry(ui).or_default().insert((id, ReferenceKind::Import));
            }
        }
    }

    for (ui, unit) in units.iter().enumerate() {
        let type_ids: Vec<TypeId> = model
            .types
            .iter()
            .filter(|t| t.file == unit.path)
            .map(|t| t.id)
            .collect();
        model.files.insert(
            unit.path.clone(),
            SourceFile {
                path: unit.path.clone(),
                package: unit.package.clone(),
                type_ids,
                loc: unit.loc,
                parse_gaps: unit.parse_gaps,
            },
        );
        if let Some(names) = unresolved.remove(&ui) {
            if !names.is_empty() {
                model.unresolved.insert(unit.path.clone(), names);
            }
        }
    }

    let mut references = BTreeSet::new();
    for (ui, set) in &file_refs {
        let from = &units[*ui].path;
        for (id, kind) in set {
            let to = &model.types[id.0 as usize].file;
            if to != from {
                references.insert(Reference {
                    from_file: from.clone(),
                    to_file: to.clone(),
                    kind: *kind,
                });
            }
        }
    }
    model.references = references.into_iter().collect();
    model.type_index = project.index;
    Ok(model)
}
