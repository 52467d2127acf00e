//! The definition file format.
//!
//! A document is a sequence of line-oriented definitions. Blocks run to a
//! line holding `end`; everything else fits on one line. Lines starting with
//! `#` are comments.
//!
//! ```text
//! monoid zero-adjoined
//!   orbit 1 0
//!   orbit A 1
//!   orbit 0 0
//!   unit 1
//!   A(x1) * A(x1) -> 0
//!   A(x1) * A(x2) -> 0
//! end
//!
//! map h : atoms -> zero-adjoined
//!   A(x1) -> A(x1)
//! end
//!
//! subset P of zero-adjoined
//!   0
//! end
//!
//! language L = h accepts P
//! word w = a b a
//! bound s = via h
//! term t = (a b)^w a
//! equation ap bound s : (a)^w a = (a)^w
//! ```
//!
//! Table and map entries are patterns: identifiers on the left are
//! variables, equal identifiers denote equal atoms and distinct ones
//! distinct atoms. Entries involving the unit may be left out of a monoid.
//! Everywhere else atoms are written `a` to `z` or `n27`, `n28`, ….

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use orbitfin::bounds::SupportBound;
use orbitfin::fs_sets::FsSubset;
use orbitfin::language::{builtin_language, Language, Word};
use orbitfin::monoid::{builder, catalog_quotient, GeneratorMap, MonoidMorphism, NominalMonoid};
use orbitfin::nominal::{
    Atom, AtomSet, Element, EquivariantMap, OrbitDescriptor, OrbitFiniteSet, OrbitImage, Permutation, ProductSet,
};
use orbitfin::prolimit::{Equation, OmegaTerm};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

type PResult<T> = std::result::Result<T, ParseError>;

fn at<T>(line: usize, r: Result<T, String>) -> PResult<T> {
    r.or_else(|m| err(line, 1, m))
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> PResult<T> {
    Err(ParseError { line, column, message: message.into() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Quoted(String),
    Open,
    Close,
    Star,
    Arrow,
    Equals,
    Colon,
    Caret,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    column: usize,
}

fn lex(text: &str, line: usize) -> PResult<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let single = match c {
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            '*' | '·' => Some(Tok::Star),
            '=' => Some(Tok::Equals),
            ':' => Some(Tok::Colon),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if c.is_whitespace() {
            i += 1;
        } else if let Some(tok) = single {
            out.push(Token { tok, column });
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Arrow, column });
            i += 2;
        } else if c == '"' {
            let end = chars[i + 1..]
                .iter()
                .position(|&d| d == '"')
                .ok_or(ParseError { line, column, message: "unterminated quoted label".into() })?;
            out.push(Token { tok: Tok::Quoted(chars[i + 1..i + 1 + end].iter().collect()), column });
            i += end + 2;
        } else {
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() && !"()*·=:^\"".contains(chars[i]) {
                i += 1;
            }
            out.push(Token { tok: Tok::Word(chars[start..i].iter().collect()), column });
        }
    }
    Ok(out)
}

/// A defined object, with the names it refers to.
#[derive(Clone, Debug)]
pub enum Object {
    Set(Arc<OrbitFiniteSet>),
    Monoid(Arc<NominalMonoid>),
    Map { source: String, target: String, map: GeneratorMap },
    Morphism { dom: String, cod: String, morphism: MonoidMorphism },
    Subset { carrier: String, subset: FsSubset },
    Bound { spec: BoundSpec, bound: SupportBound },
    Language { map: String, predicate: String, language: Language },
    Word(Word),
    Term(OmegaTerm),
    Equation { bound: String, equation: Equation },
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Set(_) => "set",
            Object::Monoid(_) => "monoid",
            Object::Map { .. } => "map",
            Object::Morphism { .. } => "morphism",
            Object::Subset { .. } => "subset",
            Object::Bound { .. } => "bound",
            Object::Language { .. } => "language",
            Object::Word(_) => "word",
            Object::Term(_) => "term",
            Object::Equation { .. } => "equation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundSpec {
    FirstLetter,
    Const(AtomSet),
    Via(String),
}

#[derive(Clone, Debug)]
pub struct Definition {
    pub name: String,
    pub line: usize,
    pub object: Object,
}

#[derive(Clone, Debug, Default)]
pub struct Document {
    pub definitions: Vec<Definition>,
}

/// Resolves names to objects: earlier definitions first, then built-ins.
pub trait Resolver {
    fn lookup(&self, name: &str) -> Option<&Object>;

    fn set(&self, name: &str) -> Result<Arc<OrbitFiniteSet>, String> {
        match self.lookup(name) {
            Some(Object::Set(s)) => Ok(s.clone()),
            Some(Object::Monoid(m)) => Ok(m.carrier().clone()),
            Some(o) => Err(format!("`{name}` is a {}, not a set", o.kind())),
            None if name == "atoms" => Ok(Arc::new(OrbitFiniteSet::atoms())),
            None => builder(name).map(|m| m.carrier().clone()).map_err(|_| format!("unknown set `{name}`")),
        }
    }

    fn monoid(&self, name: &str) -> Result<Arc<NominalMonoid>, String> {
        match self.lookup(name) {
            Some(Object::Monoid(m)) => Ok(m.clone()),
            Some(o) => Err(format!("`{name}` is a {}, not a monoid", o.kind())),
            None => builder(name).map(Arc::new).map_err(|_| format!("unknown monoid `{name}`")),
        }
    }

    fn morphism(&self, name: &str) -> Result<MonoidMorphism, String> {
        match self.lookup(name) {
            Some(Object::Morphism { morphism, .. }) => Ok(morphism.clone()),
            Some(o) => Err(format!("`{name}` is a {}, not a morphism", o.kind())),
            None => catalog_quotient(name).map_err(|_| format!("unknown morphism `{name}`")),
        }
    }

    fn map(&self, name: &str) -> Result<GeneratorMap, String> {
        match self.lookup(name) {
            Some(Object::Map { map, .. }) => Ok(map.clone()),
            Some(Object::Language { language, .. }) => Ok(language.h0().clone()),
            Some(o) => Err(format!("`{name}` is a {}, not a map", o.kind())),
            None if name == "first-letter" => match SupportBound::first_letter() {
                Ok(SupportBound::ViaMorphism(q)) => Ok(q),
                _ => Err("first-letter map unavailable".into()),
            },
            None => builtin_language(name).map(|l| l.h0().clone()).map_err(|_| format!("unknown map `{name}`")),
        }
    }

    fn subset(&self, name: &str) -> Result<FsSubset, String> {
        match self.lookup(name) {
            Some(Object::Subset { subset, .. }) => Ok(subset.clone()),
            Some(o) => Err(format!("`{name}` is a {}, not a subset", o.kind())),
            None => Err(format!("unknown subset `{name}`")),
        }
    }

    fn bound(&self, name: &str) -> Result<SupportBound, String> {
        match self.lookup(name) {
            Some(Object::Bound { bound, .. }) => Ok(bound.clone()),
            Some(Object::Map { map, .. }) => Ok(SupportBound::ViaMorphism(map.clone())),
            Some(o) => Err(format!("`{name}` is a {}, not a bound", o.kind())),
            None if name == "first-letter" => SupportBound::first_letter().map_err(|e| e.to_string()),
            None => self.map(name).map(SupportBound::ViaMorphism).map_err(|_| format!("unknown bound `{name}`")),
        }
    }

    fn language(&self, name: &str) -> Result<Language, String> {
        match self.lookup(name) {
            Some(Object::Language { language, .. }) => Ok(language.clone()),
            Some(o) => Err(format!("`{name}` is a {}, not a language", o.kind())),
            None => builtin_language(name).map_err(|_| format!("unknown language `{name}`")),
        }
    }
}

impl Resolver for Document {
    fn lookup(&self, name: &str) -> Option<&Object> {
        self.get(name)
    }
}

impl Document {
    pub fn get(&self, name: &str) -> Option<&Object> {
        self.definitions.iter().rev().find(|d| d.name == name).map(|d| &d.object)
    }

    pub fn line_of(&self, name: &str) -> Option<usize> {
        self.definitions.iter().rev().find(|d| d.name == name).map(|d| d.line)
    }

    pub fn monoids(&self) -> impl Iterator<Item = (&Definition, &Arc<NominalMonoid>)> {
        self.definitions.iter().filter_map(|d| match &d.object {
            Object::Monoid(m) => Some((d, m)),
            _ => None,
        })
    }

    pub fn parse(text: &str) -> PResult<Document> {
        let lines: Vec<(usize, Vec<Token>)> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| {
                let t = l.trim_start();
                !t.is_empty() && !t.starts_with('#')
            })
            .map(|(i, l)| lex(l, i + 1).map(|toks| (i + 1, toks)))
            .collect::<PResult<_>>()?;
        let mut doc = Document::default();
        let mut i = 0;
        while i < lines.len() {
            let (line, toks) = &lines[i];
            let mut c = Cursor::new(toks, *line);
            let keyword = c.word("a definition keyword")?;
            let name = c.word("a name")?;
            if doc.get(&name).is_some() {
                return err(*line, toks[1].column, format!("`{name}` is already defined"));
            }
            let block = matches!(keyword.as_str(), "set" | "monoid" | "map" | "morphism" | "subset");
            let body = if block {
                let end = lines[i + 1..]
                    .iter()
                    .position(|(_, t)| matches!(t.as_slice(), [Token { tok: Tok::Word(w), .. }] if w == "end"))
                    .ok_or(ParseError { line: *line, column: 1, message: format!("{keyword} `{name}` has no `end`") })?;
                let body = &lines[i + 1..i + 1 + end];
                i += end + 2;
                body
            } else {
                i += 1;
                &lines[0..0]
            };
            let object = match keyword.as_str() {
                "set" => {
                    c.finish()?;
                    let mut it = body.iter().peekable();
                    let set = parse_orbits(&mut it, *line)?;
                    if let Some((l, toks)) = it.next() {
                        return err(*l, toks[0].column, "expected `orbit`");
                    }
                    Object::Set(Arc::new(set))
                }
                "monoid" => {
                    c.finish()?;
                    Object::Monoid(Arc::new(parse_monoid(&name, body, *line)?))
                }
                "map" | "morphism" => {
                    c.expect(Tok::Colon, "`:`")?;
                    let source = c.word("a source name")?;
                    c.expect(Tok::Arrow, "`->`")?;
                    let target = c.word("a target name")?;
                    c.finish()?;
                    if keyword == "map" {
                        let alphabet = at(*line, doc.set(&source))?;
                        let monoid = at(*line, doc.monoid(&target))?;
                        let table = parse_entries(body, &alphabet, monoid.carrier(), *line, None)?;
                        let map = GeneratorMap::new(alphabet, monoid, table).or_else(|e| err(*line, 1, e.to_string()))?;
                        Object::Map { source, target, map }
                    } else {
                        let dom = at(*line, doc.monoid(&source))?;
                        let cod = at(*line, doc.monoid(&target))?;
                        let table = parse_entries(body, dom.carrier(), cod.carrier(), *line, None)?;
                        let morphism =
                            MonoidMorphism::new(dom, cod, table).or_else(|e| err(*line, 1, e.to_string()))?;
                        Object::Morphism { dom: source, cod: target, morphism }
                    }
                }
                "subset" => {
                    c.keyword("of")?;
                    let carrier_name = c.word("a carrier name")?;
                    let mut support = AtomSet::new();
                    if !c.done() {
                        c.keyword("support")?;
                        while !c.done() {
                            support.insert(c.atom()?);
                        }
                    }
                    let carrier = doc.set(&carrier_name).or_else(|m| err(*line, 1, m))?;
                    let mut elements = Vec::new();
                    for (l, toks) in body {
                        let mut c = Cursor::new(toks, *l);
                        elements.push(c.element(&carrier, &mut Cursor::global_atom)?);
                        c.finish()?;
                    }
                    let subset = FsSubset::from_elements(carrier, support, &elements)
                        .or_else(|e| err(*line, 1, e.to_string()))?;
                    Object::Subset { carrier: carrier_name, subset }
                }
                "bound" => {
                    c.expect(Tok::Equals, "`=`")?;
                    let kind = c.word("`first-letter`, `const` or `via`")?;
                    let spec = match kind.as_str() {
                        "first-letter" => BoundSpec::FirstLetter,
                        "const" => {
                            let mut s = AtomSet::new();
                            while !c.done() {
                                s.insert(c.atom()?);
                            }
                            BoundSpec::Const(s)
                        }
                        "via" => BoundSpec::Via(c.word("a map name")?),
                        other => return err(*line, toks[3].column, format!("unknown bound kind `{other}`")),
                    };
                    c.finish()?;
                    let bound = match &spec {
                        BoundSpec::FirstLetter => SupportBound::first_letter().or_else(|e| err(*line, 1, e.to_string()))?,
                        BoundSpec::Const(s) => SupportBound::Constant(s.clone()),
                        BoundSpec::Via(m) => SupportBound::ViaMorphism(doc.map(m).or_else(|e| err(*line, 1, e))?),
                    };
                    Object::Bound { spec, bound }
                }
                "language" => {
                    c.expect(Tok::Equals, "`=`")?;
                    let map = c.word("a map name")?;
                    c.keyword("accepts")?;
                    let predicate = c.word("a subset name")?;
                    c.finish()?;
                    let h0 = doc.map(&map).or_else(|e| err(*line, 1, e))?;
                    let p = doc.subset(&predicate).or_else(|e| err(*line, 1, e))?;
                    let language = Language::new(h0, p).or_else(|e| err(*line, 1, e.to_string()))?.with_name(&name);
                    Object::Language { map, predicate, language }
                }
                "word" => {
                    c.expect(Tok::Equals, "`=`")?;
                    let mut ids = Vec::new();
                    while !c.done() {
                        ids.push(c.atom()?.0);
                    }
                    Object::Word(Word::of_atoms(&ids))
                }
                "term" => {
                    c.expect(Tok::Equals, "`=`")?;
                    let t = c.term()?;
                    c.finish()?;
                    Object::Term(t)
                }
                "equation" => {
                    c.keyword("bound")?;
                    let bound_name = c.word("a bound name")?;
                    c.expect(Tok::Colon, "`:`")?;
                    let lhs = c.term()?;
                    c.expect(Tok::Equals, "`=`")?;
                    let rhs = c.term()?;
                    c.finish()?;
                    let bound = doc.bound(&bound_name).or_else(|e| err(*line, 1, e))?;
                    let alphabet = Arc::new(OrbitFiniteSet::atoms());
                    Object::Equation { bound: bound_name, equation: Equation { alphabet, bound, lhs, rhs } }
                }
                other => return err(*line, toks[0].column, format!("unknown definition keyword `{other}`")),
            };
            doc.definitions.push(Definition { name, line: *line, object });
        }
        Ok(doc)
    }

    /// The canonical text of the document.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (i, d) in self.definitions.iter().enumerate() {
            let block = matches!(
                d.object,
                Object::Set(_) | Object::Monoid(_) | Object::Map { .. } | Object::Morphism { .. } | Object::Subset { .. }
            );
            if i > 0 && block {
                out.push('\n');
            }
            match &d.object {
                Object::Set(s) => {
                    let _ = writeln!(out, "set {}", d.name);
                    write_orbits(&mut out, s);
                    out.push_str("end\n");
                }
                Object::Monoid(m) => out.push_str(&serialize_monoid_as(&d.name, m)),
                Object::Map { source, target, map } => {
                    let _ = writeln!(out, "map {} : {source} -> {target}", d.name);
                    write_entries(&mut out, map.map());
                    out.push_str("end\n");
                }
                Object::Morphism { dom, cod, morphism } => {
                    let _ = writeln!(out, "morphism {} : {dom} -> {cod}", d.name);
                    write_entries(&mut out, morphism.map());
                    out.push_str("end\n");
                }
                Object::Subset { carrier, subset } => {
                    let _ = write!(out, "subset {} of {carrier}", d.name);
                    if !subset.support().is_empty() {
                        let _ = write!(out, " support {}", show_atom_list(subset.support().iter()));
                    }
                    out.push('\n');
                    for x in subset.reps() {
                        let _ = writeln!(out, "  {}", show_element(subset.carrier(), x, &|a| a.to_string()));
                    }
                    out.push_str("end\n");
                }
                Object::Bound { spec, .. } => {
                    let rhs = match spec {
                        BoundSpec::FirstLetter => "first-letter".to_string(),
                        BoundSpec::Const(s) if s.is_empty() => "const".to_string(),
                        BoundSpec::Const(s) => format!("const {}", show_atom_list(s.iter())),
                        BoundSpec::Via(m) => format!("via {m}"),
                    };
                    let _ = writeln!(out, "bound {} = {rhs}", d.name);
                }
                Object::Language { map, predicate, .. } => {
                    let _ = writeln!(out, "language {} = {map} accepts {predicate}", d.name);
                }
                Object::Word(w) => {
                    let ids = show_atom_list(w.letters().iter().map(|x| &x.atoms()[0]));
                    let _ = writeln!(out, "word {} = {ids}", d.name);
                }
                Object::Term(t) => {
                    let _ = writeln!(out, "term {} = {}", d.name, show_term(t));
                }
                Object::Equation { bound, equation } => {
                    let _ = writeln!(
                        out,
                        "equation {} bound {bound} : {} = {}",
                        d.name,
                        show_term(&equation.lhs),
                        show_term(&equation.rhs)
                    );
                }
            }
        }
        out
    }
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Token], line: usize) -> Self {
        Cursor { toks, pos: 0, line }
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or_else(|| self.toks.last().map_or(1, |t| t.column + 1), |t| t.column)
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        err(self.line, self.column(), message)
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn finish(&self) -> PResult<()> {
        if self.done() {
            Ok(())
        } else {
            self.fail("unexpected trailing input")
        }
    }

    fn word(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Word(w)) | Some(Tok::Quoted(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn keyword(&mut self, k: &str) -> PResult<()> {
        match self.peek() {
            Some(Tok::Word(w)) if w == k => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(format!("expected `{k}`")),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn number(&mut self, what: &str) -> PResult<usize> {
        let column = self.column();
        let w = self.word(what)?;
        w.parse().or_else(|_| err(self.line, column, format!("expected {what}, found `{w}`")))
    }

    fn global_atom(name: &str) -> Option<Atom> {
        let mut cs = name.chars();
        match (cs.next(), cs.next()) {
            (Some(c @ 'a'..='z'), None) => Some(Atom(c as u32 - 'a' as u32 + 1)),
            (Some('n'), Some(_)) => name[1..].parse().ok().filter(|&n| n > 0).map(Atom),
            _ => None,
        }
    }

    fn atom(&mut self) -> PResult<Atom> {
        let column = self.column();
        let w = self.word("an atom")?;
        Cursor::global_atom(&w)
            .ok_or(ParseError { line: self.line, column, message: format!("`{w}` is not an atom (use a-z or n27, n28, …)") })
    }

    /// `LABEL` or `LABEL(x y …)`, with identifiers resolved by `resolve`.
    fn element(&mut self, set: &OrbitFiniteSet, resolve: &mut dyn FnMut(&str) -> Option<Atom>) -> PResult<Element> {
        let column = self.column();
        let label = self.word("an element")?;
        let orbit = set
            .orbit_by_label(&label)
            .ok_or(ParseError { line: self.line, column, message: format!("no orbit labelled `{label}`") })?;
        let mut tuple = Vec::new();
        if self.peek() == Some(&Tok::Open) {
            self.pos += 1;
            while self.peek() != Some(&Tok::Close) {
                let c = self.column();
                let id = self.word("an atom or `)`")?;
                tuple.push(resolve(&id).ok_or(ParseError {
                    line: self.line,
                    column: c,
                    message: format!("`{id}` is not an atom here"),
                })?);
            }
            self.pos += 1;
        }
        set.element(orbit, &tuple).or_else(|e| err(self.line, column, e.to_string()))
    }

    fn term(&mut self) -> PResult<OmegaTerm> {
        let mut factors = Vec::new();
        loop {
            let mut f = match self.peek() {
                Some(Tok::Open) => {
                    self.pos += 1;
                    let t = self.term()?;
                    self.expect(Tok::Close, "`)`")?;
                    t
                }
                Some(Tok::Word(w)) if w == "1" => {
                    self.pos += 1;
                    OmegaTerm::Unit
                }
                Some(Tok::Word(_)) => OmegaTerm::word(&Word::of_atoms(&[self.atom()?.0])),
                _ => break,
            };
            while self.peek() == Some(&Tok::Caret) {
                self.pos += 1;
                match self.peek() {
                    Some(Tok::Word(w)) if w == "w" || w == "ω" => self.pos += 1,
                    _ => return self.fail("expected `w` after `^`"),
                }
                f = OmegaTerm::omega(f);
            }
            factors.push(f);
        }
        Ok(match factors.len() {
            0 => OmegaTerm::Unit,
            1 => factors.pop().expect("one factor"),
            _ => OmegaTerm::Concat(factors),
        })
    }
}

/// Leading `orbit` lines of a block.
fn parse_orbits(it: &mut std::iter::Peekable<std::slice::Iter<'_, (usize, Vec<Token>)>>, header: usize) -> PResult<OrbitFiniteSet> {
    let mut orbits = Vec::new();
    while let Some((line, toks)) = it.peek() {
        if !matches!(toks.first(), Some(Token { tok: Tok::Word(w), .. }) if w == "orbit") {
            break;
        }
        it.next();
        let mut c = Cursor::new(toks, *line);
        c.pos = 1;
        let label = c.word("an orbit label")?;
        let dim = c.number("a dimension")?;
        let mut generators = Vec::new();
        while !c.done() {
            c.keyword("sym")?;
            c.expect(Tok::Open, "`(`")?;
            let mut perm = Vec::new();
            while c.peek() != Some(&Tok::Close) {
                let column = c.column();
                let p = c.number("a position")?;
                if p == 0 {
                    return err(*line, column, "positions are numbered from 1");
                }
                perm.push(p - 1);
            }
            c.pos += 1;
            generators.push(perm);
        }
        orbits.push(OrbitDescriptor::new(label, dim, generators).or_else(|e| err(*line, 1, e.to_string()))?);
    }
    if orbits.is_empty() {
        let line = it.peek().map_or(header, |(l, _)| *l);
        return err(line, 1, "expected `orbit`");
    }
    Ok(OrbitFiniteSet::new(orbits))
}

fn parse_monoid(name: &str, body: &[(usize, Vec<Token>)], header: usize) -> PResult<NominalMonoid> {
    let mut it = body.iter().peekable();
    let carrier = Arc::new(parse_orbits(&mut it, header)?);
    let unit = match it.next() {
        Some((line, toks)) => {
            let mut c = Cursor::new(toks, *line);
            c.keyword("unit")?;
            let u = c.element(&carrier, &mut |_| None)?;
            c.finish()?;
            u
        }
        None => return err(header, 1, format!("monoid `{name}` has no `unit` line")),
    };
    let rest: Vec<(usize, Vec<Token>)> = it.cloned().collect();
    let square = ProductSet::square(carrier.clone()).or_else(|e| err(header, 1, e.to_string()))?;
    let table = parse_entries(&rest, square.set(), &carrier, header, Some((&square, &unit)))?;
    let m = NominalMonoid::from_table(name, carrier, unit, table).or_else(|e| err(header, 1, e.to_string()))?;
    Ok(m)
}

/// Entries `source-pattern -> target`, one per source orbit. For a monoid
/// table the source pattern is a product `x * y` and unit entries default.
fn parse_entries(
    body: &[(usize, Vec<Token>)],
    source: &Arc<OrbitFiniteSet>,
    target: &Arc<OrbitFiniteSet>,
    header: usize,
    table: Option<(&ProductSet, &Element)>,
) -> PResult<EquivariantMap> {
    let mut assignment: BTreeMap<usize, (usize, OrbitImage)> = BTreeMap::new();
    for (line, toks) in body {
        let mut c = Cursor::new(toks, *line);
        let mut vars: HashMap<String, Atom> = HashMap::new();
        let mut local = |id: &str| -> Option<Atom> {
            let next = Atom(vars.len() as u32 + 1);
            Some(*vars.entry(id.to_string()).or_insert(next))
        };
        let z = match table {
            Some((square, _)) => {
                let x = c.element(square.left(), &mut local)?;
                c.expect(Tok::Star, "`*`")?;
                let y = c.element(square.right(), &mut local)?;
                square.pair(&x, &y)
            }
            None => c.element(source, &mut local)?,
        };
        c.expect(Tok::Arrow, "`->`")?;
        let r = c.element(target, &mut |id| vars.get(id).copied())?;
        c.finish()?;
        let rep = source.rep(z.orbit());
        let pi = Permutation::extending(z.atoms().iter().copied().zip(rep.atoms().iter().copied()))
            .or_else(|e| err(*line, 1, e.to_string()))?;
        let r = target.act(&pi, &r);
        let positions = r.atoms().iter().map(|a| rep.atoms().iter().position(|b| b == a).expect("atoms of rep")).collect();
        if let Some((first, _)) = assignment.get(&z.orbit()) {
            return err(*line, 1, format!("this pattern was already given on line {first}"));
        }
        assignment.insert(z.orbit(), (*line, OrbitImage::new(r.orbit(), positions)));
    }
    let mut images = Vec::with_capacity(source.orbit_count());
    for o in 0..source.orbit_count() {
        match assignment.get(&o) {
            Some((_, img)) => images.push(img.clone()),
            None => {
                let rep = source.rep(o);
                let default = table.and_then(|(square, unit)| {
                    let (x, y) = square.unpair(&rep);
                    let v = if &x == unit { Some(y) } else if &y == unit { Some(x) } else { None }?;
                    let positions = v.atoms().iter().map(|a| rep.atoms().iter().position(|b| b == a)).collect::<Option<Vec<_>>>()?;
                    Some(OrbitImage::new(v.orbit(), positions))
                });
                match default {
                    Some(img) => images.push(img),
                    None => {
                        let pattern = match table {
                            Some((square, _)) => show_pair(square, &rep),
                            None => show_element(source, &rep, &var_name),
                        };
                        return err(header, 1, format!("no entry for {pattern}"));
                    }
                }
            }
        }
    }
    let map = EquivariantMap::from_parts(source.clone(), target.clone(), images);
    let report = map.check_well_defined();
    if let Some(e) = report.shape_errors.first() {
        return err(header, 1, e.clone());
    }
    if let Some(v) = report.violations.first() {
        let line = assignment.get(&v.orbit).map_or(header, |(l, _)| *l);
        return err(line, 1, "entry is not invariant under the symmetries of its pattern");
    }
    Ok(map)
}

/// A word written as atoms separated by spaces.
pub fn parse_word(text: &str) -> PResult<Word> {
    let toks = lex(text, 1)?;
    let mut c = Cursor::new(&toks, 1);
    let mut ids = Vec::new();
    while !c.done() {
        ids.push(c.atom()?.0);
    }
    Ok(Word::of_atoms(&ids))
}

/// An ω-term over the atoms, such as `(a b)^w a`.
pub fn parse_term(text: &str) -> PResult<OmegaTerm> {
    let toks = lex(text, 1)?;
    let mut c = Cursor::new(&toks, 1);
    let t = c.term()?;
    c.finish()?;
    Ok(t)
}

fn var_name(a: &Atom) -> String {
    format!("x{}", a.0)
}

fn show_label(label: &str) -> String {
    let bare = !label.is_empty()
        && label != "end"
        && label.chars().all(|c| !c.is_whitespace() && !"()*·=:^\"".contains(c))
        && !label.starts_with('#')
        && !label.contains("->");
    if bare {
        label.to_string()
    } else {
        format!("\"{label}\"")
    }
}

fn show_element(set: &OrbitFiniteSet, x: &Element, name: &dyn Fn(&Atom) -> String) -> String {
    let label = show_label(set.orbits()[x.orbit()].label());
    if x.atoms().is_empty() {
        label
    } else {
        let args: Vec<String> = x.atoms().iter().map(name).collect();
        format!("{label}({})", args.join(" "))
    }
}

fn show_pair(square: &ProductSet, z: &Element) -> String {
    let (x, y) = square.unpair(z);
    format!("{} * {}", show_element(square.left(), &x, &var_name), show_element(square.right(), &y, &var_name))
}

fn show_atom_list<'a>(atoms: impl Iterator<Item = &'a Atom>) -> String {
    atoms.map(Atom::to_string).collect::<Vec<_>>().join(" ")
}

pub fn show_term(t: &OmegaTerm) -> String {
    match t {
        OmegaTerm::Unit => "1".into(),
        OmegaTerm::Letter(x) => x.atoms().iter().map(Atom::to_string).collect::<Vec<_>>().join(" "),
        OmegaTerm::Concat(ts) => ts.iter().map(show_term).collect::<Vec<_>>().join(" "),
        OmegaTerm::Omega(t) => format!("({})^w", show_term(t)),
    }
}

fn write_orbits(out: &mut String, s: &OrbitFiniteSet) {
    for o in s.orbits() {
        let _ = write!(out, "  orbit {} {}", show_label(o.label()), o.dim());
        for g in o.generators() {
            let images: Vec<String> = g.iter().map(|p| (p + 1).to_string()).collect();
            let _ = write!(out, " sym ({})", images.join(" "));
        }
        out.push('\n');
    }
}

fn write_entries(out: &mut String, map: &EquivariantMap) {
    for o in 0..map.source().orbit_count() {
        let x = map.source().rep(o);
        let y = map.apply(&x).expect("representative of the source");
        let _ = writeln!(
            out,
            "  {} -> {}",
            show_element(map.source(), &x, &var_name),
            show_element(map.target(), &y, &var_name)
        );
    }
}

/// The monoid as a `monoid` block named `name`, with every table entry.
pub fn serialize_monoid_as(name: &str, m: &NominalMonoid) -> String {
    let mut out = format!("monoid {name}\n");
    write_orbits(&mut out, m.carrier());
    let _ = writeln!(out, "  unit {}", show_element(m.carrier(), m.unit(), &var_name));
    let square = m.square().expect("carrier square");
    let table = m.table().expect("multiplication table");
    for o in 0..square.set().orbit_count() {
        let z = square.set().rep(o);
        let v = table.apply(&z).expect("representative of the square");
        let _ = writeln!(out, "  {} -> {}", show_pair(square, &z), show_element(m.carrier(), &v, &var_name));
    }
    out.push_str("end\n");
    out
}

pub fn serialize_monoid(m: &NominalMonoid) -> String {
    serialize_monoid_as(m.name(), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    const COMPARE: &str = "\
# M maps onto N by collapsing the barred orbits to 0.
monoid M
  orbit 1 0
  orbit A 1
  orbit 1bar 0
  orbit Abar 1
  unit 1
  A(x) * A(x) -> Abar(x)
  A(x) * A(y) -> Abar(x)
  A(x) * 1bar -> Abar(x)
  A(x) * Abar(x) -> Abar(x)
  A(x) * Abar(y) -> Abar(x)
  1bar * A(x) -> Abar(x)
  1bar * 1bar -> 1bar
  1bar * Abar(x) -> Abar(x)
  Abar(x) * A(x) -> Abar(x)
  Abar(x) * A(y) -> Abar(x)
  Abar(x) * 1bar -> Abar(x)
  Abar(x) * Abar(x) -> Abar(x)
  Abar(x) * Abar(y) -> Abar(x)
end
";

    #[test]
    fn catalog_monoids_round_trip() {
        for name in orbitfin::monoid::catalog_names() {
            let m = builder(name).unwrap();
            let text = serialize_monoid(&m);
            let doc = Document::parse(&text).unwrap();
            let back = doc.monoid(name).unwrap();
            assert_eq!(back.carrier(), m.carrier(), "{name}");
            assert_eq!(back.unit(), m.unit(), "{name}");
            assert_eq!(back.table().unwrap(), m.table().unwrap(), "{name}");
            assert_eq!(doc.serialize(), text, "{name}");
        }
    }

    #[test]
    fn hand_written_monoid_parses() {
        let doc = Document::parse(COMPARE).unwrap();
        let m = doc.monoid("M").unwrap();
        assert_eq!(m.orbit_count(), 4);
        assert!(m.validate().is_valid(), "{}", m.validate());
        assert_eq!(m.table().unwrap(), builder("barred").unwrap().table().unwrap());
    }

    #[test]
    fn conflicting_entry_is_positioned() {
        let text = COMPARE.replace("  1bar * 1bar -> 1bar\n", "  1bar * 1bar -> 1bar\n  1bar * 1bar -> 1\n");
        let e = Document::parse(&text).unwrap_err();
        assert_eq!(e.line, 15);
        let text = COMPARE.replace("A(x) * A(y) -> Abar(x)", "A(x) * A(y) -> Abar(z)");
        let e = Document::parse(&text).unwrap_err();
        assert_eq!((e.line, e.column), (9, 23));
    }

    #[test]
    fn missing_entry_is_reported() {
        let text = COMPARE.replace("  Abar(x) * Abar(y) -> Abar(x)\n", "");
        let e = Document::parse(&text).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("no entry for Abar(x1) * Abar(x2)"), "{e}");
    }

    #[test]
    fn one_liners_round_trip() {
        let text = "\
map h : atoms -> first-proj
  A(x1) -> A(x1)
end

subset P of first-proj
  A(a)
end
language L = h accepts P
bound s = via h
bound c = const a b
word w = a b n30
term t = (a b)^w a
equation e bound s : (a)^w a = (a)^w
";
        let doc = Document::parse(text).unwrap();
        assert_eq!(doc.serialize(), text);
        let l = doc.language("L").unwrap();
        match doc.get("w") {
            Some(Object::Word(w)) => assert!(l.member(w).unwrap()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_invariant_entry_is_rejected() {
        let text = "\
set S
  orbit P 2 sym (2 1)
end
monoid M
  orbit 1 0
  orbit A 1
  unit 1
  A(x) * A(x) -> A(x)
  A(x) * A(y) -> A(x)
end
map h : S -> M
  P(x y) -> A(x)
end
";
        let e = Document::parse(text).unwrap_err();
        assert_eq!(e.line, 12, "{e}");
    }
}
