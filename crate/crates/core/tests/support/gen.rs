//! Seeded generator of small Java projects for the property suites.
//!
//! Every random draw happens before any name is rendered, so the same seed
//! rendered under two `Names` gives the same program with different
//! identifiers.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const PACKAGE: &str = "g";

pub trait Names {
    fn class(&self, i: usize) -> String;
    fn field(&self, i: usize) -> String;
    fn method(&self, i: usize) -> String;
    fn var(&self, i: usize) -> String;
}

/// `C0`, `f0`, `m0`, `v0`.
pub struct Plain;

impl Names for Plain {
    fn class(&self, i: usize) -> String {
        format!("C{i}")
    }
    fn field(&self, i: usize) -> String {
        format!("f{i}")
    }
    fn method(&self, i: usize) -> String {
        format!("m{i}")
    }
    fn var(&self, i: usize) -> String {
        format!("v{i}")
    }
}

/// Different spellings, with class indices permuted so that sorted order
/// differs from the plain names.
pub struct Renamed {
    pub perm: Vec<usize>,
}

impl Renamed {
    pub fn new(salt: u64) -> Self {
        let mut rng = StdRng::seed_from_u64(salt);
        let mut perm: Vec<usize> = (0..64).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        Renamed { perm }
    }

    /// Permutes within each block of 64, so any index maps injectively.
    fn p(&self, i: usize) -> usize {
        let n = self.perm.len();
        i / n * n + self.perm[i % n]
    }
}

impl Names for Renamed {
    fn class(&self, i: usize) -> String {
        format!("Kx{}w", self.p(i))
    }
    fn field(&self, i: usize) -> String {
        format!("a{}_q", self.p(i))
    }
    fn method(&self, i: usize) -> String {
        format!("run{}", self.p(i))
    }
    fn var(&self, i: usize) -> String {
        format!("z{}", self.p(i))
    }
}

fn cap(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

#[derive(Debug, Clone)]
struct Field {
    id: usize,
    class_ty: Option<usize>,
    public: bool,
    getter: bool,
    setter: bool,
}

#[derive(Debug, Clone)]
struct Method {
    id: usize,
    public: bool,
    returns_int: bool,
    params: Vec<Option<usize>>,
}

#[derive(Debug, Clone)]
struct Class {
    fields: Vec<Field>,
    methods: Vec<Method>,
}

/// A generated project, rendered.
#[derive(Debug, Clone)]
pub struct Generated {
    /// (path, source), in class order.
    pub files: Vec<(String, String)>,
    /// Qualified class names, in class order.
    pub classes: Vec<String>,
    /// Method keys in generation order, accessors included.
    pub methods: Vec<String>,
}

#[derive(Clone)]
enum Ty {
    Int,
    Class(usize),
}

struct Var {
    id: usize,
    ty: Ty,
}

struct Body<'a> {
    rng: StdRng,
    names: &'a dyn Names,
    classes: &'a [Class],
    me: usize,
    next_var: usize,
    scopes: Vec<Vec<Var>>,
    out: Vec<String>,
}

impl Body<'_> {
    fn vars(&self) -> impl Iterator<Item = &Var> {
        self.scopes.iter().flatten()
    }

    fn fresh(&mut self) -> usize {
        self.next_var += 1;
        self.next_var - 1
    }

    /// Receivers of class type: variables and own class-typed fields.
    fn receivers(&self) -> Vec<(String, usize)> {
        let mut r: Vec<(String, usize)> = self
            .vars()
            .filter_map(|v| match v.ty {
                Ty::Class(c) => Some((self.names.var(v.id), c)),
                Ty::Int => None,
            })
            .collect();
        for f in &self.classes[self.me].fields {
            if let Some(c) = f.class_ty {
                r.push((self.names.field(f.id), c));
            }
        }
        r
    }

    fn int_atom(&mut self) -> String {
        let roll = self.rng.random_range(0..6);
        let ints: Vec<usize> = self.vars().filter(|v| matches!(v.ty, Ty::Int)).map(|v| v.id).collect();
        let own: Vec<usize> = self.classes[self.me]
            .fields
            .iter()
            .filter(|f| f.class_ty.is_none())
            .map(|f| f.id)
            .collect();
        match roll {
            0 | 1 if !ints.is_empty() => {
                let i = ints[self.rng.random_range(0..ints.len())];
                self.names.var(i)
            }
            2 if !own.is_empty() => {
                let f = own[self.rng.random_range(0..own.len())];
                if self.rng.random_bool(0.5) {
                    format!("this.{}", self.names.field(f))
                } else {
                    self.names.field(f)
                }
            }
            3 | 4 => {
                let recv = self.receivers();
                if recv.is_empty() {
                    return self.rng.random_range(0..9).to_string();
                }
                let (r, c) = recv[self.rng.random_range(0..recv.len())].clone();
                let data: Vec<&Field> = self.classes[c].fields.iter().filter(|f| f.class_ty.is_none()).collect();
                if data.is_empty() {
                    return self.rng.random_range(0..9).to_string();
                }
                let f = data[self.rng.random_range(0..data.len())];
                if f.getter && (roll == 3 || !f.public) {
                    format!("{r}.get{}()", cap(&self.names.field(f.id)))
                } else if f.public {
                    format!("{r}.{}", self.names.field(f.id))
                } else {
                    self.rng.random_range(0..9).to_string()
                }
            }
            _ => self.rng.random_range(0..9).to_string(),
        }
    }

    fn cond(&mut self) -> String {
        let a = self.int_atom();
        let b = self.int_atom();
        let op = [">", "<", "==", "!="][self.rng.random_range(0..4)];
        let base = format!("{a} {op} {b}");
        match self.rng.random_range(0..4) {
            0 => format!("{base} && {} > 0", self.int_atom()),
            1 => format!("{base} || {} < 0", self.int_atom()),
            _ => base,
        }
    }

    fn expr(&mut self) -> String {
        if self.rng.random_bool(0.15) {
            let c = self.cond();
            let a = self.int_atom();
            let b = self.int_atom();
            format!("({c} ? {a} : {b})")
        } else if self.rng.random_bool(0.3) {
            format!("{} + {}", self.int_atom(), self.int_atom())
        } else {
            self.int_atom()
        }
    }

    fn args(&mut self, params: &[Option<usize>]) -> String {
        let mut out = Vec::new();
        for p in params {
            match p {
                None => out.push(self.int_atom()),
                Some(c) => {
                    let fit: Vec<String> = self
                        .receivers()
                        .into_iter()
                        .filter(|(_, k)| k == c)
                        .map(|(n, _)| n)
                        .collect();
                    if fit.is_empty() || self.rng.random_bool(0.3) {
                        out.push("null".into());
                    } else {
                        out.push(fit[self.rng.random_range(0..fit.len())].clone());
                    }
                }
            }
        }
        out.join(", ")
    }

    fn call(&mut self) -> Option<String> {
        if self.rng.random_bool(0.3) {
            let ms = &self.classes[self.me].methods;
            let m = ms[self.rng.random_range(0..ms.len())].clone();
            let args = self.args(&m.params);
            return Some(format!("{}({args})", self.names.method(m.id)));
        }
        let recv = self.receivers();
        if recv.is_empty() {
            return None;
        }
        let (r, c) = recv[self.rng.random_range(0..recv.len())].clone();
        let visible: Vec<Method> = self.classes[c].methods.iter().filter(|m| m.public).cloned().collect();
        if visible.is_empty() {
            return None;
        }
        let m = &visible[self.rng.random_range(0..visible.len())];
        let args = self.args(&m.params);
        Some(format!("{r}.{}({args})", self.names.method(m.id)))
    }

    fn line(&mut self, depth: usize, s: String) {
        self.out.push(format!("{}{s}", "    ".repeat(depth + 2)));
    }

    fn block(&mut self, depth: usize) {
        let n = self.rng.random_range(1..=4);
        for _ in 0..n {
            self.stmt(depth);
        }
    }

    fn nested(&mut self, depth: usize, head: String, init: Option<Var>) {
        self.line(depth, format!("{head} {{"));
        self.scopes.push(init.into_iter().collect());
        self.block(depth + 1);
        self.scopes.pop();
    }

    fn stmt(&mut self, depth: usize) {
        let roll = if depth >= 3 { self.rng.random_range(0..4) } else { self.rng.random_range(0..8) };
        match roll {
            0 => {
                let e = self.expr();
                let id = self.fresh();
                self.line(depth, format!("int {} = {e};", self.names.var(id)));
                self.scopes.last_mut().unwrap().push(Var { id, ty: Ty::Int });
            }
            1 => {
                let e = self.expr();
                let own: Vec<usize> = self.classes[self.me]
                    .fields
                    .iter()
                    .filter(|f| f.class_ty.is_none())
                    .map(|f| f.id)
                    .collect();
                if !own.is_empty() && self.rng.random_bool(0.5) {
                    let f = own[self.rng.random_range(0..own.len())];
                    self.line(depth, format!("{} = {e};", self.names.field(f)));
                } else {
                    let id = self.fresh();
                    self.line(depth, format!("int {} = {e};", self.names.var(id)));
                    self.scopes.last_mut().unwrap().push(Var { id, ty: Ty::Int });
                }
            }
            2 | 3 => match self.call() {
                Some(c) => self.line(depth, format!("{c};")),
                None => {
                    let e = self.expr();
                    let id = self.fresh();
                    self.line(depth, format!("int {} = {e};", self.names.var(id)));
                    self.scopes.last_mut().unwrap().push(Var { id, ty: Ty::Int });
                }
            },
            4 | 5 => {
                let c = self.cond();
                self.nested(depth, format!("if ({c})"), None);
                if self.rng.random_bool(0.4) {
                    self.line(depth, "} else {".into());
                    self.scopes.push(Vec::new());
                    self.block(depth + 1);
                    self.scopes.pop();
                }
                self.line(depth, "}".into());
            }
            6 => {
                let bound = self.int_atom();
                let id = self.fresh();
                let v = self.names.var(id);
                self.nested(
                    depth,
                    format!("for (int {v} = 0; {v} < {bound}; {v}++)"),
                    Some(Var { id, ty: Ty::Int }),
                );
                self.line(depth, "}".into());
            }
            _ => {
                let c = self.cond();
                self.nested(depth, format!("while ({c})"), None);
                self.line(depth, "}".into());
            }
        }
    }
}

/// Build the structure for `seed` and render it with `names`.
pub fn generate(seed: u64, names: &dyn Names) -> Generated {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(2..=6);
    let mut next_field = 0;
    let mut next_method = 0;
    let mut classes = Vec::new();
    for _ in 0..n {
        let fields = (0..rng.random_range(0..=4))
            .map(|_| {
                next_field += 1;
                Field {
                    id: next_field - 1,
                    class_ty: rng.random_bool(0.35).then(|| rng.random_range(0..n)),
                    public: rng.random_bool(0.2),
                    getter: rng.random_bool(0.5),
                    setter: rng.random_bool(0.3),
                }
            })
            .collect();
        let methods = (0..rng.random_range(1..=4))
            .map(|_| {
                next_method += 1;
                Method {
                    id: next_method - 1,
                    public: rng.random_bool(0.7),
                    returns_int: rng.random_bool(0.5),
                    params: (0..rng.random_range(0..=3))
                        .map(|_| rng.random_bool(0.4).then(|| rng.random_range(0..n)))
                        .collect(),
                }
            })
            .collect();
        classes.push(Class { fields, methods });
    }

    let ty_name = |t: &Option<usize>| match t {
        Some(c) => names.class(*c),
        None => "int".to_string(),
    };
    let mut out = Generated {
        files: Vec::new(),
        classes: Vec::new(),
        methods: Vec::new(),
    };
    for (ci, class) in classes.iter().enumerate() {
        let cname = names.class(ci);
        let qn = format!("{PACKAGE}.{cname}");
        let mut src = vec![format!("package {PACKAGE};"), String::new(), format!("public class {cname} {{")];
        for f in &class.fields {
            let vis = if f.public { "public" } else { "private" };
            src.push(format!("    {vis} {} {};", ty_name(&f.class_ty), names.field(f.id)));
        }
        for f in &class.fields {
            let fname = names.field(f.id);
            let ty = ty_name(&f.class_ty);
            if f.getter {
                src.push(String::new());
                src.push(format!("    public {ty} get{}() {{ return {fname}; }}", cap(&fname)));
                out.methods.push(format!("{qn}#get{}()", cap(&fname)));
            }
            if f.setter {
                src.push(String::new());
                src.push(format!(
                    "    public void set{}({ty} value) {{ this.{fname} = value; }}",
                    cap(&fname)
                ));
                out.methods.push(format!("{qn}#set{}({ty})", cap(&fname)));
            }
        }
        for m in &class.methods {
            let vis = if m.public { "public" } else { "private" };
            let ret = if m.returns_int { "int" } else { "void" };
            let params: Vec<Var> = m
                .params
                .iter()
                .enumerate()
                .map(|(i, p)| Var {
                    id: i,
                    ty: p.map_or(Ty::Int, Ty::Class),
                })
                .collect();
            let plist: Vec<String> = m
                .params
                .iter()
                .zip(&params)
                .map(|(p, v)| format!("{} {}", ty_name(p), names.var(v.id)))
                .collect();
            let ptypes: Vec<String> = m.params.iter().map(ty_name).collect();
            out.methods.push(format!("{qn}#{}({})", names.method(m.id), ptypes.join(",")));
            src.push(String::new());
            src.push(format!("    {vis} {ret} {}({}) {{", names.method(m.id), plist.join(", ")));
            let mut body = Body {
                rng: StdRng::seed_from_u64(rng.random()),
                names,
                classes: &classes,
                me: ci,
                next_var: params.len(),
                scopes: vec![params],
                out: Vec::new(),
            };
            body.block(0);
            if m.returns_int {
                let e = body.expr();
                body.line(0, format!("return {e};"));
            }
            src.append(&mut body.out);
            src.push("    }".into());
        }
        src.push("}".into());
        src.push(String::new());
        out.files.push((format!("{PACKAGE}/{cname}.java"), src.join("\n")));
        out.classes.push(qn);
    }
    out
}
