//! Recursive-descent parser for the supported Java subset.
//!
//! Unsupported constructs (annotations, lambdas, member and local classes,
//! anonymous class bodies, initializer blocks, switch expressions, records)
//! are skipped and counted in `parse_gaps`. Recovery never aborts a file:
//! the only hard failure after lexing is unbalanced braces.

use super::lexer::{token_lines, tokenize, Token, TokenKind};
use super::FrontendError;
use crate::model::{Expr, LocalVar, Stmt, StmtKind, TypeKind, TypeRef, Visibility};

const MAX_DEPTH: u32 = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    /// Dotted name without the trailing `.*`.
    pub name: String,
    pub on_demand: bool,
    pub is_static: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Modifiers {
    pub visibility: Option<Visibility>,
    pub is_static: bool,
    pub is_final: bool,
    pub is_abstract: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub ty: TypeRef,
    pub visibility: Visibility,
    pub is_static: bool,
    pub is_final: bool,
    pub line: u32,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDecl {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub name: String,
    pub is_constructor: bool,
    pub visibility: Visibility,
    pub is_static: bool,
    pub type_params: Vec<String>,
    pub params: Vec<ParamDecl>,
    /// Absent for constructors.
    pub return_type: Option<TypeRef>,
    pub body: Option<Stmt>,
    pub start_line: u32,
    pub loc: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub name: String,
    pub kind: TypeKind,
    pub visibility: Visibility,
    pub type_params: Vec<String>,
    pub supertypes: Vec<TypeRef>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub start_line: u32,
    pub loc: u32,
}

/// One parsed source file with unresolved names.
#[derive(Debug, Clone, PartialEq)]
pub struct CompilationUnit {
    pub path: String,
    pub package: String,
    pub imports: Vec<Import>,
    pub types: Vec<TypeDecl>,
    pub parse_gaps: u32,
    pub loc: u32,
}

/// Tokenize and parse one file.
pub fn parse_unit(source: &str, path: &str) -> Result<CompilationUnit, FrontendError> {
    let tokens = tokenize(source)?;
    check_braces(&tokens, path)?;
    let loc = token_lines(&tokens);
    let mut p = Parser {
        toks: &tokens,
        pos: 0,
        gaps: 0,
        depth: 0,
    };
    let (package, imports, types) = p.unit();
    Ok(CompilationUnit {
        path: path.to_string(),
        package,
        imports,
        types,
        parse_gaps: p.gaps,
        loc,
    })
}

fn check_braces(tokens: &[Token], path: &str) -> Result<(), FrontendError> {
    let mut depth = 0i64;
    for t in tokens {
        if t.kind != TokenKind::Punctuation {
            continue;
        }
        match t.text.as_str() {
            "{" => depth += 1,
            "}" => {
                depth -= 1;
                if depth < 0 {
                    return Err(FrontendError::Parse {
                        path: path.to_string(),
                        message: format!("unmatched '}}' at line {}", t.line),
                    });
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(FrontendError::Parse {
            path: path.to_string(),
            message: format!("{depth} unclosed '{{'"),
        });
    }
    Ok(())
}

/// Marker for a construct the parser could not handle at this position.
#[derive(Debug)]
struct Unsupported;

type PResult<T> = Result<T, Unsupported>;

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    gaps: u32,
    depth: u32,
}

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

impl<'t> Parser<'t> {
    // ---- token helpers -------------------------------------------------

    fn tok(&self, ahead: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + ahead)
    }

    fn text(&self, ahead: usize) -> &'t str {
        self.tok(ahead).map(|t| t.text.as_str()).unwrap_or("")
    }

    fn at(&self, s: &str) -> bool {
        self.tok(0).is_some_and(|t| t.is(s))
    }

    fn at_n(&self, ahead: usize, s: &str) -> bool {
        self.tok(ahead).is_some_and(|t| t.is(s))
    }

    fn is_ident(&self, ahead: usize) -> bool {
        self.tok(ahead).is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    fn eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn line(&self) -> u32 {
        self.tok(0)
            .or_else(|| self.toks.last())
            .map(|t| t.line)
            .unwrap_or(1)
    }

    fn bump(&mut self) -> &'t str {
        let t = self.text(0);
        if !self.eof() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.at(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(Unsupported)
        }
    }

    fn ident(&mut self) -> PResult<String> {
        if self.is_ident(0) {
            Ok(self.bump().to_string())
        } else {
            Err(Unsupported)
        }
    }

    fn gap(&mut self) {
        self.gaps += 1;
    }

    /// Distinct token lines in `[start, self.pos)`.
    fn lines_since(&self, start: usize) -> u32 {
        token_lines(&self.toks[start..self.pos.min(self.toks.len())])
    }

    fn enter(&mut self) -> PResult<()> {
        if self.depth >= MAX_DEPTH {
            return Err(Unsupported);
        }
        self.depth += 1;
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---- skipping ------------------------------------------------------

    /// Skip a balanced group starting at an opening `(`, `[` or `{`.
    fn skip_balanced(&mut self) {
        let (open, close) = match self.text(0) {
            "(" => ("(", ")"),
            "[" => ("[", "]"),
            "{" => ("{", "}"),
            _ => return,
        };
        let mut depth = 0usize;
        while !self.eof() {
            let t = self.bump();
            if t == open {
                depth += 1;
            } else if t == close {
                depth -= 1;
                if depth == 0 {
                    return;
                }
            }
        }
    }

    /// Skip `<...>` type arguments.
    fn skip_angles(&mut self) {
        let mut depth = 0usize;
        while !self.eof() {
            match self.text(0) {
                "<" => depth += 1,
                ">" => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos += 1;
                        return;
                    }
                }
                ";" | "{" | "}" | "=" => return,
                _ => {}
            }
            self.pos += 1;
        }
    }

    /// Recovery: advance past the construct starting at `start`, stopping
    /// after a `;` at nesting depth zero or after a brace block closes.
    /// Never consumes a `}` that closes an enclosing block.
    fn recover_from(&mut self, start: usize) {
        self.gap();
        self.pos = start;
        let mut depth = 0i64;
        while !self.eof() {
            match self.text(0) {
                "(" | "[" => depth += 1,
                ")" | "]" => depth -= 1,
                "{" => {
                    self.skip_balanced();
                    if depth <= 0 && !matches!(self.text(0), "." | ")" | "," | ";") {
                        return;
                    }
                    continue;
                }
                "}" => return,
                ";" if depth <= 0 => {
                    self.pos += 1;
                    return;
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    /// Skip an annotation (`@Name`, `@a.b.Name(...)`), counting a gap.
    fn skip_annotation(&mut self) {
        self.gap();
        self.pos += 1;
        if self.at("interface") {
            return;
        }
        while self.is_ident(0) {
            self.pos += 1;
            if self.at(".") && self.is_ident(1) {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.at("(") {
            self.skip_balanced();
        }
    }

    // ---- compilation unit ---------------------------------------------

    fn unit(&mut self) -> (String, Vec<Import>, Vec<TypeDecl>) {
        let mut package = String::new();
        let mut imports = Vec::new();
        let mut types = Vec::new();
        while !self.eof() {
            let start = self.pos;
            if self.eat(";") {
                continue;
            }
            if self.at("@") && !self.at_n(1, "interface") {
                self.skip_annotation();
                continue;
            }
            if self.at("package") {
                self.pos += 1;
                match self.qualified_name() {
                    Ok(n) if self.eat(";") => package = n,
                    _ => self.recover_from(start),
                }
                continue;
            }
            if self.at("import") {
                match self.import() {
                    Ok(i) => imports.push(i),
                    Err(_) => self.recover_from(start),
                }
                continue;
            }
            match self.type_decl(false) {
                Ok(Some(t)) => types.push(t),
                Ok(None) => {}
                Err(_) => self.recover_from(start),
            }
        }
        (package, imports, types)
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?;
        while self.at(".") && self.is_ident(1) {
            self.pos += 1;
            name.push('.');
            name.push_str(self.bump());
        }
        Ok(name)
    }

    fn import(&mut self) -> PResult<Import> {
        self.expect("import")?;
        let is_static = self.eat("static");
        let name = self.qualified_name()?;
        let on_demand = if self.at(".") && self.at_n(1, "*") {
            self.pos += 2;
            true
        } else {
            false
        };
        self.expect(";")?;
        Ok(Import {
            name,
            on_demand,
            is_static,
        })
    }

    fn modifiers(&mut self) -> Modifiers {
        let mut m = Modifiers::default();
        loop {
            if self.at("@") && !self.at_n(1, "interface") {
                self.skip_annotation();
                continue;
            }
            let Some(t) = self.tok(0) else { break };
            match (t.kind, t.text.as_str()) {
                (TokenKind::Keyword, "public") => m.visibility = Some(Visibility::Public),
                (TokenKind::Keyword, "protected") => m.visibility = Some(Visibility::Protected),
                (TokenKind::Keyword, "private") => m.visibility = Some(Visibility::Private),
                (TokenKind::Keyword, "static") => m.is_static = true,
                (TokenKind::Keyword, "final") => m.is_final = true,
                (TokenKind::Keyword, "abstract") => m.is_abstract = true,
                (
                    TokenKind::Keyword,
                    "native" | "transient" | "volatile" | "strictfp",
                ) => {}
                (TokenKind::Keyword, "synchronized") if !self.at_n(1, "(") => {}
                (TokenKind::Keyword, "default") if !matches!(self.text(1), ":" | "->") => {}
                (TokenKind::Identifier, "sealed")
                    if self.tok(1).is_some_and(|n| n.kind == TokenKind::Keyword) => {}
                (TokenKind::Identifier, "non")
                    if self.at_n(1, "-") && self.text(2) == "sealed" =>
                {
                    self.pos += 2;
                }
                _ => break,
            }
            self.pos += 1;
        }
        m
    }

    fn type_params(&mut self) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        if !self.at("<") {
            return Ok(out);
        }
        let start = self.pos;
        let mut depth = 0usize;
        let mut expect_name = true;
        while !self.eof() {
            match self.text(0) {
                "<" => {
                    depth += 1;
                    expect_name = depth == 1;
                }
                ">" => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos += 1;
                        return Ok(out);
                    }
                }
                "," if depth == 1 => expect_name = true,
                ";" | "{" | "}" => break,
                _ => {
                    if expect_name && depth == 1 && self.is_ident(0) {
                        out.push(self.text(0).to_string());
                        expect_name = false;
                    }
                }
            }
            self.pos += 1;
        }
        self.pos = start;
        Err(Unsupported)
    }

    /// Parses a top-level or member type declaration. Member types
    /// (`nested`) are skipped as a gap.
    fn type_decl(&mut self, nested: bool) -> PResult<Option<TypeDecl>> {
        let start = self.pos;
        let mods = self.modifiers();
        let kind = match self.text(0) {
            "class" => TypeKind::Class,
            "interface" => TypeKind::Interface,
            "enum" => TypeKind::Enum,
            "@" if self.at_n(1, "interface") => {
                self.skip_type_body();
                return Ok(None);
            }
            "record" if self.is_ident(1) => {
                self.skip_type_body();
                return Ok(None);
            }
            _ => {
                if self.pos == start {
                    return Err(Unsupported);
                }
                // Modifiers followed by something we do not understand.
                return Err(Unsupported);
            }
        };
        if nested {
            self.skip_type_body();
            return Ok(None);
        }
        let start_line = self.toks[start].line;
        self.pos += 1;
        let name = self.ident()?;
        let type_params = self.type_params()?;
        let mut supertypes = Vec::new();
        loop {
            if self.eat("extends") || self.eat("implements") || self.eat("permits") {
                loop {
                    supertypes.push(self.type_ref()?);
                    if !self.eat(",") {
                        break;
                    }
                }
                continue;
            }
            break;
        }
        if !self.at("{") {
            return Err(Unsupported);
        }
        let default_vis = if kind == TypeKind::Interface {
            Visibility::Public
        } else {
            Visibility::Package
        };
        let visibility = mods.visibility.unwrap_or(Visibility::Package);
        let mut decl = TypeDecl {
            name,
            kind,
            visibility,
            type_params,
            supertypes,
            fields: Vec::new(),
            methods: Vec::new(),
            start_line,
            loc: 0,
        };
        self.pos += 1;
        if kind == TypeKind::Enum {
            self.enum_constants(&mut decl);
        }
        self.class_body(&mut decl, default_vis);
        // Drop the last `}` of the body.
        self.eat("}");
        decl.loc = self.lines_since(start);
        Ok(Some(decl))
    }

    /// Skip from the current keyword to the end of the type's body.
    fn skip_type_body(&mut self) {
        self.gap();
        while !self.eof() && !self.at("{") && !self.at(";") && !self.at("}") {
            self.pos += 1;
        }
        if self.at("{") {
            self.skip_balanced();
        } else if self.at(";") {
            self.pos += 1;
        }
    }

    fn enum_constants(&mut self, decl: &mut TypeDecl) {
        loop {
            while self.at("@") {
                self.skip_annotation();
            }
            if !self.is_ident(0) {
                break;
            }
            let line = self.line();
            let name = self.bump().to_string();
            if self.at("(") {
                self.skip_balanced();
            }
            if self.at("{") {
                self.gap();
                self.skip_balanced();
            }
            decl.fields.push(FieldDecl {
                name,
                ty: TypeRef::simple(decl.name.clone()),
                visibility: Visibility::Public,
                is_static: true,
                is_final: true,
                line,
                init: None,
            });
            if !self.eat(",") {
                break;
            }
        }
        self.eat(";");
    }

    fn class_body(&mut self, decl: &mut TypeDecl, default_vis: Visibility) {
        while !self.eof() && !self.at("}") {
            let start = self.pos;
            if self.eat(";") {
                continue;
            }
            if let Err(Unsupported) = self.member(decl, default_vis) {
                self.recover_from(start);
            }
        }
    }

    fn member(&mut self, decl: &mut TypeDecl, default_vis: Visibility) -> PResult<()> {
        let start = self.pos;
        let mods = self.modifiers();
        if self.at("{") {
            // Instance or static initializer.
            self.gap();
            self.skip_balanced();
            return Ok(());
        }
        if matches!(self.text(0), "class" | "interface" | "enum")
            || (self.at("@") && self.at_n(1, "interface"))
            || (self.at("record") && self.is_ident(1) && self.at_n(2, "("))
            || (self.at("record") && self.is_ident(1) && self.at_n(2, "<"))
        {
            self.pos = start;
            self.type_decl(true)?;
            return Ok(());
        }
        let visibility = mods.visibility.unwrap_or(default_vis);
        let type_params = self.type_params()?;
        let start_line = self.toks[start].line;
        // Constructor.
        if self.text(0) == decl.name && self.at_n(1, "(") {
            let name = self.bump().to_string();
            let params = self.params()?;
            self.throws()?;
            let body = Some(self.block()?);
            decl.methods.push(MethodDecl {
                name,
                is_constructor: true,
                visibility,
                is_static: false,
                type_params,
                params,
                return_type: None,
                body,
                start_line,
                loc: self.lines_since(start),
            });
            return Ok(());
        }
        let ty = self.type_ref()?;
        let name = self.ident()?;
        if self.at("(") {
            let params = self.params()?;
            let mut ret = ty;
            while self.at("[") && self.at_n(1, "]") {
                self.pos += 2;
                ret.dims += 1;
            }
            self.throws()?;
            let body = if self.eat(";") {
                None
            } else if self.at("default") {
                // Annotation element default value.
                while !self.eof() && !self.eat(";") {
                    self.pos += 1;
                }
                None
            } else {
                Some(self.block()?)
            };
            decl.methods.push(MethodDecl {
                name,
                is_constructor: false,
                visibility,
                is_static: mods.is_static,
                type_params,
                params,
                return_type: Some(ret),
                body,
                start_line,
                loc: self.lines_since(start),
            });
            return Ok(());
        }
        // Field declarators.
        let in_interface = default_vis == Visibility::Public;
        let mut name = name;
        loop {
            let line = self.line();
            let mut fty = ty.clone();
            while self.at("[") && self.at_n(1, "]") {
                self.pos += 2;
                fty.dims += 1;
            }
            let init = if self.eat("=") {
                Some(self.var_init()?)
            } else {
                None
            };
            decl.fields.push(FieldDecl {
                name,
                ty: fty,
                visibility,
                is_static: mods.is_static || in_interface,
                is_final: mods.is_final || in_interface,
                line,
                init,
            });
            if self.eat(",") {
                name = self.ident()?;
                continue;
            }
            break;
        }
        self.expect(";")?;
        Ok(())
    }

    fn throws(&mut self) -> PResult<()> {
        if self.eat("throws") {
            loop {
                self.type_ref()?;
                if !self.eat(",") {
                    break;
                }
            }
        }
        Ok(())
    }

    fn params(&mut self) -> PResult<Vec<ParamDecl>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            let _ = self.modifiers();
            let mut ty = self.type_ref()?;
            if self.eat("...") {
                ty.varargs = true;
            }
            let name = if self.at("this") {
                // Receiver parameter.
                self.pos += 1;
                "this".to_string()
            } else {
                self.ident()?
            };
            while self.at("[") && self.at_n(1, "]") {
                self.pos += 2;
                ty.dims += 1;
            }
            if name != "this" {
                out.push(ParamDecl { name, ty });
            }
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(out)
    }

    /// A type reference with generic arguments discarded.
    fn type_ref(&mut self) -> PResult<TypeRef> {
        while self.at("@") {
            self.skip_annotation();
        }
        let mut name = if PRIMITIVES.contains(&self.text(0)) {
            self.bump().to_string()
        } else {
            let n = self.ident()?;
            if self.at("<") {
                self.skip_angles();
            }
            n
        };
        while self.at(".") && (self.is_ident(1) || self.at_n(1, "@")) {
            self.pos += 1;
            while self.at("@") {
                self.skip_annotation();
            }
            name.push('.');
            name.push_str(&self.ident()?);
            if self.at("<") {
                self.skip_angles();
            }
        }
        let mut ty = TypeRef::simple(name);
        while self.at("[") && self.at_n(1, "]") {
            self.pos += 2;
            ty.dims += 1;
        }
        Ok(ty)
    }

    /// Speculatively parse a type; restores position and gap count.
    fn try_type(&mut self) -> Option<TypeRef> {
        let (pos, gaps) = (self.pos, self.gaps);
        match self.type_ref() {
            Ok(t) => Some(t),
            Err(_) => {
                self.pos = pos;
                self.gaps = gaps;
                None
            }
        }
    }

    // ---- statements ----------------------------------------------------

    fn block(&mut self) -> PResult<Stmt> {
        let line = self.line();
        self.expect("{")?;
        let mut block = Stmt::new(StmtKind::Block, line);
        while !self.eof() && !self.at("}") {
            if let Some(s) = self.statement_recovering() {
                block.children.push(s);
            }
        }
        self.expect("}")?;
        Ok(block)
    }

    fn statement_recovering(&mut self) -> Option<Stmt> {
        let start = self.pos;
        let depth = self.depth;
        match self.statement() {
            Ok(s) => Some(s),
            Err(_) => {
                self.depth = depth;
                self.recover_from(start);
                if self.pos == start && !self.at("}") {
                    self.pos += 1;
                }
                None
            }
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        self.enter()?;
        let r = self.statement_inner();
        self.leave();
        r
    }

    fn statement_inner(&mut self) -> PResult<Stmt> {
        let line = self.line();
        match self.text(0) {
            "{" if self.tok(0).is_some_and(|t| t.kind == TokenKind::Punctuation) => self.block(),
            ";" => {
                self.pos += 1;
                Ok(Stmt::new(StmtKind::Empty, line))
            }
            "if" => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let then = self.statement_recovering().unwrap_or_else(|| Stmt::new(StmtKind::Empty, line));
                let mut s = Stmt::new(StmtKind::If, line);
                s.exprs.push(cond);
                s.children.push(then);
                if self.at("else") {
                    let eline = self.line();
                    self.pos += 1;
                    let mut arm = Stmt::new(StmtKind::ElseArm, eline);
                    if let Some(e) = self.statement_recovering() {
                        arm.children.push(e);
                    }
                    s.children.push(arm);
                }
                Ok(s)
            }
            "for" => self.for_stmt(),
            "while" => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let mut s = Stmt::new(StmtKind::While, line);
                s.exprs.push(cond);
                s.children.extend(self.statement_recovering());
                Ok(s)
            }
            "do" => {
                self.pos += 1;
                let mut s = Stmt::new(StmtKind::Do, line);
                s.children.extend(self.statement_recovering());
                self.expect("while")?;
                s.exprs.push(self.paren_expr()?);
                self.expect(";")?;
                Ok(s)
            }
            "switch" => self.switch_stmt(),
            "try" => self.try_stmt(),
            "return" => {
                self.pos += 1;
                let mut s = Stmt::new(StmtKind::Return, line);
                if !self.at(";") {
                    s.exprs.push(self.expr()?);
                }
                self.expect(";")?;
                Ok(s)
            }
            "throw" => {
                self.pos += 1;
                let mut s = Stmt::new(StmtKind::Throw, line);
                s.exprs.push(self.expr()?);
                self.expect(";")?;
                Ok(s)
            }
            "break" | "continue" => {
                self.pos += 1;
                if self.is_ident(0) {
                    self.pos += 1;
                }
                self.expect(";")?;
                Ok(Stmt::new(StmtKind::Jump, line))
            }
            "synchronized" if self.at_n(1, "(") => {
                self.pos += 1;
                let mut s = Stmt::new(StmtKind::Synchronized, line);
                s.exprs.push(self.paren_expr()?);
                s.children.push(self.block()?);
                Ok(s)
            }
            "assert" => {
                self.pos += 1;
                let mut s = Stmt::new(StmtKind::ExprStmt, line);
                s.exprs.push(self.expr()?);
                if self.eat(":") {
                    s.exprs.push(self.expr()?);
                }
                self.expect(";")?;
                Ok(s)
            }
            "class" | "interface" | "enum" | "abstract" | "static" => {
                // Local type declarations are not modelled.
                Err(Unsupported)
            }
            _ => {
                if self.is_ident(0) && self.at_n(1, ":") && !self.at_n(2, ":") {
                    // Labelled statement.
                    self.pos += 2;
                    return self.statement_inner();
                }
                if self.at("final") && matches!(self.text(1), "class" | "abstract") {
                    return Err(Unsupported);
                }
                if let Some(s) = self.local_decl_stmt(line)? {
                    return Ok(s);
                }
                let mut s = Stmt::new(StmtKind::ExprStmt, line);
                s.exprs.push(self.expr()?);
                self.expect(";")?;
                Ok(s)
            }
        }
    }

    /// Returns the declared type if the tokens ahead start a local variable
    /// declaration (`Type name` followed by `=`, `;`, `,`, `[` or `:`).
    fn local_decl_header(&mut self) -> Option<TypeRef> {
        let (pos, gaps) = (self.pos, self.gaps);
        let _ = self.modifiers();
        if let Some(ty) = self.try_type() {
            if self.is_ident(0) && matches!(self.text(1), "=" | ";" | "," | "[" | ":" | ")") {
                return Some(ty);
            }
        }
        self.pos = pos;
        self.gaps = gaps;
        None
    }

    fn local_decl_stmt(&mut self, line: u32) -> PResult<Option<Stmt>> {
        let Some(ty) = self.local_decl_header() else {
            return Ok(None);
        };
        let mut s = Stmt::new(StmtKind::LocalDecl, line);
        self.declarators(&ty, &mut s)?;
        self.expect(";")?;
        Ok(Some(s))
    }

    fn declarators(&mut self, ty: &TypeRef, s: &mut Stmt) -> PResult<()> {
        loop {
            let name = self.ident()?;
            let mut vty = ty.clone();
            while self.at("[") && self.at_n(1, "]") {
                self.pos += 2;
                vty.dims += 1;
            }
            s.locals.push(LocalVar { name, ty: vty });
            if self.eat("=") {
                s.exprs.push(self.var_init()?);
            }
            if !self.eat(",") {
                return Ok(());
            }
        }
    }

    fn var_init(&mut self) -> PResult<Expr> {
        if self.at("{") {
            self.array_init()
        } else {
            self.expr()
        }
    }

    fn array_init(&mut self) -> PResult<Expr> {
        self.expect("{")?;
        let mut items = Vec::new();
        while !self.at("}") {
            items.push(self.var_init()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect("}")?;
        Ok(Expr::ArrayInit { items })
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        let line = self.line();
        self.pos += 1;
        self.expect("(")?;
        let mut s = Stmt::new(StmtKind::For, line);
        if let Some(ty) = self.local_decl_header() {
            if self.at_n(1, ":") {
                let name = self.ident()?;
                self.pos += 1;
                s.locals.push(LocalVar { name, ty });
                s.exprs.push(self.expr()?);
                self.expect(")")?;
                s.children.extend(self.statement_recovering());
                return Ok(s);
            }
            self.declarators(&ty, &mut s)?;
        } else {
            while !self.at(";") {
                s.exprs.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(";")?;
        if !self.at(";") {
            s.exprs.push(self.expr()?);
        }
        self.expect(";")?;
        while !self.at(")") {
            s.exprs.push(self.expr()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        s.children.extend(self.statement_recovering());
        Ok(s)
    }

    fn switch_stmt(&mut self) -> PResult<Stmt> {
        let line = self.line();
        self.pos += 1;
        let mut s = Stmt::new(StmtKind::Switch, line);
        s.exprs.push(self.paren_expr()?);
        self.expect("{")?;
        while !self.eof() && !self.at("}") {
            let aline = self.line();
            let kind = if self.eat("case") {
                StmtKind::CaseArm
            } else if self.eat("default") {
                StmtKind::DefaultArm
            } else {
                return Err(Unsupported);
            };
            let mut arm = Stmt::new(kind, aline);
            if kind == StmtKind::CaseArm {
                loop {
                    arm.exprs.push(self.ternary()?);
                    if !self.eat(",") {
                        break;
                    }
                }
            }
            if self.eat("->") {
                if self.at("{") {
                    arm.children.push(self.block()?);
                } else if self.at("throw") {
                    arm.children.push(self.statement()?);
                } else {
                    let l = self.line();
                    let mut e = Stmt::new(StmtKind::ExprStmt, l);
                    e.exprs.push(self.expr()?);
                    self.expect(";")?;
                    arm.children.push(e);
                }
            } else {
                self.expect(":")?;
                while !self.eof() && !self.at("case") && !self.at("default") && !self.at("}") {
                    if let Some(st) = self.statement_recovering() {
                        arm.children.push(st);
                    }
                }
                // `default` used as a modifier cannot appear here, so a bare
                // `default` always starts the next arm.
            }
            s.children.push(arm);
        }
        self.expect("}")?;
        Ok(s)
    }

    fn try_stmt(&mut self) -> PResult<Stmt> {
        let line = self.line();
        self.pos += 1;
        let mut s = Stmt::new(StmtKind::Try, line);
        if self.eat("(") {
            while !self.at(")") {
                if let Some(ty) = self.local_decl_header() {
                    let name = self.ident()?;
                    s.locals.push(LocalVar { name, ty });
                    self.expect("=")?;
                    s.exprs.push(self.expr()?);
                } else {
                    s.exprs.push(self.expr()?);
                }
                if !self.eat(";") {
                    break;
                }
            }
            self.expect(")")?;
        }
        s.children.push(self.block()?);
        while self.at("catch") {
            let cline = self.line();
            self.pos += 1;
            self.expect("(")?;
            let _ = self.modifiers();
            let ty = self.type_ref()?;
            while self.eat("|") {
                self.type_ref()?;
            }
            let name = self.ident()?;
            self.expect(")")?;
            let mut c = Stmt::new(StmtKind::Catch, cline);
            c.locals.push(LocalVar { name, ty });
            c.children.push(self.block()?);
            s.children.push(c);
        }
        if self.at("finally") {
            let fline = self.line();
            self.pos += 1;
            let mut f = Stmt::new(StmtKind::Finally, fline);
            f.children.push(self.block()?);
            s.children.push(f);
        }
        Ok(s)
    }

    // ---- expressions ---------------------------------------------------

    fn paren_expr(&mut self) -> PResult<Expr> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(")")?;
        Ok(e)
    }

    /// Lambda check: `x ->` or `( ... ) ->`.
    fn at_lambda(&self) -> bool {
        if self.is_ident(0) && self.at_n(1, "->") {
            return true;
        }
        if !self.at("(") {
            return false;
        }
        let mut depth = 0usize;
        let mut i = 0usize;
        while let Some(t) = self.tok(i) {
            match t.text.as_str() {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        return self.at_n(i + 1, "->");
                    }
                }
                ";" | "{" | "}" => return false,
                _ => {}
            }
            i += 1;
        }
        false
    }

    fn skip_lambda(&mut self) -> PResult<Expr> {
        self.gap();
        if self.at("(") {
            self.skip_balanced();
        } else {
            self.pos += 1;
        }
        self.expect("->")?;
        if self.at("{") {
            self.skip_balanced();
        } else {
            // Expression body: parse for well-formedness, then discard.
            let gaps = self.gaps;
            self.expr()?;
            self.gaps = gaps.max(self.gaps);
        }
        Ok(Expr::Skipped)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.expr_inner();
        self.leave();
        r
    }

    fn expr_inner(&mut self) -> PResult<Expr> {
        if self.at_lambda() {
            return self.skip_lambda();
        }
        let lhs = self.ternary()?;
        if let Some((op, n)) = self.assign_op() {
            self.pos += n;
            let value = self.expr()?;
            return Ok(Expr::Assign {
                op,
                target: Box::new(lhs),
                value: Box::new(value),
            });
        }
        Ok(lhs)
    }

    /// Adjacent `>` tokens with no space between them.
    fn adjacent_gt(&self, ahead: usize) -> bool {
        match (self.tok(ahead), self.tok(ahead + 1)) {
            (Some(a), Some(b)) => a.text == ">" && b.offset == a.offset + 1,
            _ => false,
        }
    }

    fn assign_op(&self) -> Option<(String, usize)> {
        let t = self.tok(0)?;
        if t.kind != TokenKind::Operator {
            return None;
        }
        match t.text.as_str() {
            "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=" | "<<=" | ">>>=" => {
                Some((t.text.clone(), 1))
            }
            ">" => {
                // `>>=` lexes as `>` `>=`; `>>>=` may lex as `>` `>` `>=`.
                let b = self.tok(1)?;
                if b.text == ">=" && b.offset == t.offset + 1 {
                    return Some((">>=".into(), 2));
                }
                if self.adjacent_gt(0) {
                    let c = self.tok(2)?;
                    if c.text == ">=" && c.offset == t.offset + 2 {
                        return Some((">>>=".into(), 3));
                    }
                }
                None
            }
            _ => None,
        }
    }

    fn ternary(&mut self) -> PResult<Expr> {
        let cond = self.binary(1)?;
        if self.eat("?") {
            let then = self.expr()?;
            self.expect(":")?;
            let otherwise = if self.at_lambda() {
                self.skip_lambda()?
            } else {
                self.ternary()?
            };
            return Ok(Expr::Ternary {
                cond: Box::new(cond),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            });
        }
        Ok(cond)
    }

    /// Binary operator at the cursor: (text, precedence, token count).
    fn binary_op(&self) -> Option<(String, u8, usize)> {
        let t = self.tok(0)?;
        if t.kind == TokenKind::Keyword && t.text == "instanceof" {
            return Some(("instanceof".into(), 7, 1));
        }
        if t.kind != TokenKind::Operator {
            return None;
        }
        let prec = match t.text.as_str() {
            "||" => 1,
            "&&" => 2,
            "|" => 3,
            "^" => 4,
            "&" => 5,
            "==" | "!=" => 6,
            "<" | "<=" | ">=" => 7,
            ">" => {
                if self.assign_op().is_some() {
                    return None;
                }
                if self.adjacent_gt(0) {
                    if self.adjacent_gt(1) {
                        return Some((">>>".into(), 8, 3));
                    }
                    return Some((">>".into(), 8, 2));
                }
                7
            }
            "<<" => 8,
            "+" | "-" => 9,
            "*" | "/" | "%" => 10,
            _ => return None,
        };
        Some((t.text.clone(), prec, 1))
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some((op, prec, n)) = self.binary_op() {
            if prec < min_prec {
                break;
            }
            self.pos += n;
            if op == "instanceof" {
                let _ = self.modifiers();
                let ty = self.type_ref()?;
                if self.is_ident(0) {
                    // Pattern binding.
                    self.pos += 1;
                }
                lhs = Expr::InstanceOf {
                    expr: Box::new(lhs),
                    ty,
                };
                continue;
            }
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.unary_inner();
        self.leave();
        r
    }

    fn unary_inner(&mut self) -> PResult<Expr> {
        if let Some(t) = self.tok(0) {
            if t.kind == TokenKind::Operator
                && matches!(t.text.as_str(), "+" | "-" | "!" | "~" | "++" | "--")
            {
                self.pos += 1;
                let e = self.unary()?;
                return Ok(Expr::Unary {
                    op: t.text.clone(),
                    expr: Box::new(e),
                });
            }
        }
        if self.at("(") {
            if let Some(cast) = self.try_cast()? {
                return Ok(cast);
            }
        }
        let e = self.primary()?;
        self.postfix(e)
    }

    fn try_cast(&mut self) -> PResult<Option<Expr>> {
        let (pos, gaps) = (self.pos, self.gaps);
        self.pos += 1;
        let Some(ty) = self.try_type() else {
            self.pos = pos;
            return Ok(None);
        };
        while self.eat("&") {
            if self.try_type().is_none() {
                self.pos = pos;
                self.gaps = gaps;
                return Ok(None);
            }
        }
        if !self.eat(")") {
            self.pos = pos;
            self.gaps = gaps;
            return Ok(None);
        }
        let primitive = ty.is_primitive() && ty.name != "var";
        let next_ok = match self.tok(0) {
            None => false,
            Some(t) => match t.kind {
                TokenKind::Identifier | TokenKind::Literal => true,
                TokenKind::Keyword => matches!(t.text.as_str(), "this" | "super" | "new" | "switch")
                    || PRIMITIVES.contains(&t.text.as_str()),
                TokenKind::Punctuation => t.text == "(",
                TokenKind::Operator => {
                    matches!(t.text.as_str(), "!" | "~")
                        || (primitive && matches!(t.text.as_str(), "+" | "-" | "++" | "--"))
                }
            },
        };
        if !next_ok {
            self.pos = pos;
            self.gaps = gaps;
            return Ok(None);
        }
        let expr = if self.at_lambda() {
            self.skip_lambda()?
        } else {
            self.unary()?
        };
        Ok(Some(Expr::Cast {
            ty,
            expr: Box::new(expr),
        }))
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(out)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(t) = self.tok(0) else {
            return Err(Unsupported);
        };
        match t.kind {
            TokenKind::Literal => {
                self.pos += 1;
                Ok(Expr::Literal)
            }
            TokenKind::Identifier => {
                self.pos += 1;
                let name = t.text.clone();
                if self.at("(") {
                    let args = self.args()?;
                    return Ok(Expr::Call {
                        target: None,
                        name,
                        args,
                    });
                }
                if self.at("[") && self.at_n(1, "]") {
                    // Array type in `Foo[].class` or `Foo[]::new`.
                    let mut ty = TypeRef::simple(name);
                    while self.at("[") && self.at_n(1, "]") {
                        self.pos += 2;
                        ty.dims += 1;
                    }
                    return self.type_suffix(ty);
                }
                Ok(Expr::Name { name })
            }
            TokenKind::Keyword => match t.text.as_str() {
                "this" => {
                    self.pos += 1;
                    if self.at("(") {
                        let args = self.args()?;
                        return Ok(Expr::Call {
                            target: Some(Box::new(Expr::This)),
                            name: "<init>".into(),
                            args,
                        });
                    }
                    Ok(Expr::This)
                }
                "super" => {
                    self.pos += 1;
                    if self.at("(") {
                        let args = self.args()?;
                        return Ok(Expr::Call {
                            target: Some(Box::new(Expr::Super)),
                            name: "<init>".into(),
                            args,
                        });
                    }
                    Ok(Expr::Super)
                }
                "new" => self.creation(),
                "switch" => {
                    // Switch expression.
                    self.gap();
                    self.pos += 1;
                    if !self.at("(") {
                        return Err(Unsupported);
                    }
                    self.skip_balanced();
                    if !self.at("{") {
                        return Err(Unsupported);
                    }
                    self.skip_balanced();
                    Ok(Expr::Skipped)
                }
                k if PRIMITIVES.contains(&k) => {
                    let ty = self.type_ref()?;
                    self.type_suffix(ty)
                }
                _ => Err(Unsupported),
            },
            TokenKind::Punctuation => match t.text.as_str() {
                "(" => {
                    self.pos += 1;
                    let e = self.expr()?;
                    self.expect(")")?;
                    Ok(e)
                }
                "{" => self.array_init(),
                "@" => {
                    self.skip_annotation();
                    self.primary()
                }
                _ => Err(Unsupported),
            },
            TokenKind::Operator => Err(Unsupported),
        }
    }

    /// `Type.class` or `Type::new` after a bare type.
    fn type_suffix(&mut self, ty: TypeRef) -> PResult<Expr> {
        if self.at(".") && self.at_n(1, "class") {
            self.pos += 2;
            return Ok(Expr::ClassLit { ty });
        }
        if self.eat("::") {
            let name = self.bump().to_string();
            return Ok(Expr::MethodRef {
                target: Box::new(Expr::ClassLit { ty }),
                name,
            });
        }
        Err(Unsupported)
    }

    fn creation(&mut self) -> PResult<Expr> {
        self.expect("new")?;
        if self.at("<") {
            self.skip_angles();
        }
        let mut ty = self.type_ref()?;
        if self.at("[") {
            let mut exprs = Vec::new();
            while self.eat("[") {
                if self.eat("]") {
                    ty.dims += 1;
                    continue;
                }
                exprs.push(self.expr()?);
                self.expect("]")?;
                ty.dims += 1;
            }
            if self.at("{") {
                exprs.push(self.array_init()?);
            }
            return Ok(Expr::NewArray { ty, exprs });
        }
        if ty.dims > 0 {
            // `new int[] {...}` lexes its dims inside type_ref.
            let mut exprs = Vec::new();
            if self.at("{") {
                exprs.push(self.array_init()?);
            }
            return Ok(Expr::NewArray { ty, exprs });
        }
        let args = self.args()?;
        let mut anonymous_body = false;
        if self.at("{") {
            self.gap();
            self.skip_balanced();
            anonymous_body = true;
        }
        Ok(Expr::New {
            ty,
            args,
            anonymous_body,
        })
    }

    fn postfix(&mut self, mut e: Expr) -> PResult<Expr> {
        loop {
            if self.at(".") {
                self.pos += 1;
                if self.at("<") {
                    self.skip_angles();
                }
                match self.text(0) {
                    "class" => {
                        self.pos += 1;
                        let name = e.dotted().ok_or(Unsupported)?;
                        e = Expr::ClassLit {
                            ty: TypeRef::simple(name),
                        };
                    }
                    "this" => {
                        // Qualified `Outer.this`.
                        self.pos += 1;
                        e = Expr::This;
                    }
                    "new" => {
                        // Inner class creation `outer.new Inner()`.
                        let inner = self.creation()?;
                        e = inner;
                    }
                    "super" => {
                        self.pos += 1;
                        e = Expr::Super;
                    }
                    _ => {
                        let name = self.ident()?;
                        if self.at("(") {
                            let args = self.args()?;
                            e = Expr::Call {
                                target: Some(Box::new(e)),
                                name,
                                args,
                            };
                        } else {
                            e = Expr::Field {
                                target: Box::new(e),
                                name,
                            };
                        }
                    }
                }
                continue;
            }
            if self.at("[") {
                self.pos += 1;
                let index = self.expr()?;
                self.expect("]")?;
                e = Expr::Index {
                    target: Box::new(e),
                    index: Box::new(index),
                };
                continue;
            }
            if self.at("++") || self.at("--") {
                let op = self.bump().to_string();
                e = Expr::Unary {
                    op,
                    expr: Box::new(e),
                };
                continue;
            }
            if self.eat("::") {
                if self.at("<") {
                    self.skip_angles();
                }
                let name = self.bump().to_string();
                e = Expr::MethodRef {
                    target: Box::new(e),
                    name,
                };
                continue;
            }
            if self.at("<") {
                // Generic type used in a method reference: `List<String>::new`.
                let (pos, gaps) = (self.pos, self.gaps);
                if let Some(name) = e.dotted() {
                    self.skip_angles();
                    if self.at("::") {
                        e = Expr::ClassLit {
                            ty: TypeRef::simple(name),
                        };
                        continue;
                    }
                }
                self.pos = pos;
                self.gaps = gaps;
            }
            return Ok(e);
        }
    }
}
