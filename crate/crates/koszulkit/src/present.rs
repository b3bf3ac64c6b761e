//! The `.kpres` presentation format.
//!
//! ```text
//! # comment
//! field QQ            # or GF(p)
//! truncate 5
//! generators x y
//! relation x^2 - y^3
//! ```
//!
//! Relations are read as `expr = 0`. Products need an explicit `*`; `[a,b]`
//! is the commutator; `^-k` inverts a series with nonzero constant term.

use num_bigint::BigInt;
use thiserror::Error;

use crate::exactlin::{Echelon, Field, Subspace};
use crate::ncalg::{Alphabet, NCPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: unknown generator '{name}'")]
    UnknownGenerator { line: usize, col: usize, name: String },
    #[error("line {line}: relation has a term of degree below 2: {term}")]
    LowDegree { line: usize, term: String },
    #[error("line {line}: relation vanishes modulo the truncation")]
    ZeroRelation { line: usize },
    #[error("missing '{0}' directive")]
    Missing(&'static str),
    #[error("truncation must be at least 3, got {0}")]
    TruncationTooSmall(usize),
    #[error("relation leading parts are linearly dependent: {0}")]
    DependentLeadingParts(String),
}

impl PresentError {
    fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        PresentError::Syntax { line, col, msg: msg.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub field: Field,
    pub alphabet: Alphabet,
    pub relations: Vec<NCPoly>,
    pub trunc: usize,
}

/// A presentation whose relations have independent quadratic leading parts.
#[derive(Clone, Debug)]
pub struct NonhomQuadPresentation {
    pub presentation: Presentation,
    /// Span of the degree-2 components inside `V (x) V`.
    pub leading_parts: Subspace,
}

impl Presentation {
    pub fn ngens(&self) -> usize {
        self.alphabet.len()
    }

    pub fn zero(&self) -> NCPoly {
        NCPoly::zero(self.field, self.ngens(), self.trunc)
    }

    pub fn generator(&self, i: usize) -> NCPoly {
        NCPoly::generator(self.field, self.ngens(), self.trunc, i)
    }

    /// Same relations cut at a smaller truncation; relations that vanish are dropped.
    pub fn truncated(&self, trunc: usize) -> Presentation {
        Presentation {
            field: self.field,
            alphabet: self.alphabet.clone(),
            relations: self
                .relations
                .iter()
                .map(|r| r.truncate(trunc))
                .filter(|r| !r.is_zero())
                .collect(),
            trunc,
        }
    }

    /// Every relation is homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        self.relations.iter().all(|r| r.lowest_degree() == r.max_degree())
    }

    /// Lowest-degree forms of the relations.
    pub fn leading_forms(&self) -> Presentation {
        Presentation {
            field: self.field,
            alphabet: self.alphabet.clone(),
            relations: self
                .relations
                .iter()
                .map(|r| r.homogeneous_part(r.lowest_degree().unwrap_or(0)))
                .collect(),
            trunc: self.trunc,
        }
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("field {}\n", self.field.name()));
        out.push_str(&format!("truncate {}\n", self.trunc));
        out.push_str(&format!("generators {}\n", self.alphabet.names().join(" ")));
        for r in &self.relations {
            out.push_str(&format!("relation {}\n", r.render(&self.alphabet)));
        }
        out
    }
}

pub fn to_nonhom_quadratic(p: &Presentation) -> Result<NonhomQuadPresentation, PresentError> {
    let g = p.ngens();
    let mut ech = Echelon::tracked(p.field, g * g);
    let mut parts = Vec::new();
    for r in &p.relations {
        let v = r.degree_component(2).expect("truncation is at least 2");
        if let Some(rel) = ech.insert_with_dependency(&v) {
            let combo: Vec<String> = rel
                .iter()
                .map(|(i, c)| format!("{}*r{}", c.render(), i + 1))
                .collect();
            return Err(PresentError::DependentLeadingParts(combo.join(" + ")));
        }
        parts.push(v);
    }
    Ok(NonhomQuadPresentation {
        presentation: p.clone(),
        leading_parts: Subspace::span(p.field, g * g, parts),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Sym(char),
}

fn tokenize(s: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>, PresentError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push((Tok::Num(digits.parse().unwrap()), col));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Name(chars[start..i].iter().collect()), col));
        } else if "+-*/^()[],".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(PresentError::syntax(line, col, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    field: Field,
    alphabet: &'a Alphabet,
    trunc: usize,
}

impl ExprParser<'_> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn err(&self, msg: impl Into<String>) -> PresentError {
        PresentError::syntax(self.line, self.col(), msg)
    }

    fn peek_sym(&self, c: char) -> bool {
        matches!(self.toks.get(self.pos), Some((Tok::Sym(s), _)) if *s == c)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek_sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), PresentError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<NCPoly, PresentError> {
        let mut acc = self.term()?;
        loop {
            if self.eat_sym('+') {
                acc = acc.add(&self.term()?).unwrap();
            } else if self.eat_sym('-') {
                acc = acc.sub(&self.term()?).unwrap();
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<NCPoly, PresentError> {
        let mut neg = false;
        loop {
            if self.eat_sym('-') {
                neg = !neg;
            } else if !self.eat_sym('+') {
                break;
            }
        }
        let mut acc = self.factor()?;
        while self.eat_sym('*') {
            acc = acc.multiply(&self.factor()?).unwrap();
        }
        Ok(if neg { acc.neg() } else { acc })
    }

    fn factor(&mut self) -> Result<NCPoly, PresentError> {
        let base = self.atom()?;
        if !self.eat_sym('^') {
            return Ok(base);
        }
        let inverse = self.eat_sym('-');
        let k = match self.toks.get(self.pos) {
            Some((Tok::Num(n), _)) => {
                let k: usize = n.try_into().map_err(|_| self.err("exponent too large"))?;
                self.pos += 1;
                k
            }
            _ => return Err(self.err("expected integer exponent")),
        };
        if !inverse {
            return Ok(base.pow(k));
        }
        let c = base.constant_term();
        if c.is_zero() {
            return Err(self.err("negative power of a series without constant term"));
        }
        let cinv = c.inv();
        let inv = base.scale(&cinv).invert_unital().unwrap().scale(&cinv);
        Ok(inv.pow(k))
    }

    fn atom(&mut self) -> Result<NCPoly, PresentError> {
        let g = self.alphabet.len();
        let (tok, col) = match self.toks.get(self.pos) {
            Some(t) => t.clone(),
            None => return Err(self.err("unexpected end of expression")),
        };
        self.pos += 1;
        match tok {
            Tok::Num(n) => {
                let mut den = BigInt::from(1);
                if self.eat_sym('/') {
                    match self.toks.get(self.pos) {
                        Some((Tok::Num(d), _)) => {
                            den = d.clone();
                            self.pos += 1;
                        }
                        _ => return Err(self.err("expected denominator")),
                    }
                }
                let c = self
                    .field
                    .ratio(&n, &den)
                    .ok_or_else(|| PresentError::syntax(self.line, col, "denominator vanishes in this field"))?;
                Ok(NCPoly::constant(self.field, g, self.trunc, c))
            }
            Tok::Name(name) => match self.alphabet.index(&name) {
                Some(i) => Ok(NCPoly::generator(self.field, g, self.trunc, i)),
                None => Err(PresentError::UnknownGenerator { line: self.line, col, name }),
            },
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Sym('[') => {
                let a = self.expr()?;
                self.expect_sym(',')?;
                let b = self.expr()?;
                self.expect_sym(']')?;
                Ok(a.commutator(&b).unwrap())
            }
            Tok::Sym(c) => Err(PresentError::syntax(self.line, col, format!("unexpected '{c}'"))),
        }
    }
}

fn parse_field(arg: &str, line: usize, col: usize) -> Result<Field, PresentError> {
    if arg == "QQ" {
        return Ok(Field::Rationals);
    }
    let inner = arg
        .strip_prefix("GF(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| PresentError::syntax(line, col, format!("unknown field '{arg}'")))?;
    let p: u64 = inner
        .trim()
        .parse()
        .map_err(|_| PresentError::syntax(line, col, format!("bad modulus '{inner}'")))?;
    Field::prime(p).map_err(|e| PresentError::syntax(line, col, e.to_string()))
}

pub fn parse_presentation(text: &str) -> Result<Presentation, PresentError> {
    let mut field = None;
    let mut trunc = None;
    let mut alphabet: Option<Alphabet> = None;
    let mut rel_lines: Vec<(usize, usize, String)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap().trim_end_matches('\r');
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let lead = content.len() - trimmed.len();
        let (kw, rest) = match trimmed.find(char::is_whitespace) {
            Some(i) => (&trimmed[..i], &trimmed[i..]),
            None => (trimmed, ""),
        };
        let arg_col = lead + kw.len() + 1 + (rest.len() - rest.trim_start().len());
        let arg = rest.trim();
        let dup = |seen: bool| {
            if seen {
                Err(PresentError::syntax(line, lead + 1, format!("duplicate '{kw}' directive")))
            } else {
                Ok(())
            }
        };
        match kw {
            "field" => {
                dup(field.is_some())?;
                field = Some(parse_field(arg, line, arg_col)?);
            }
            "truncate" => {
                dup(trunc.is_some())?;
                let d: usize = arg
                    .parse()
                    .map_err(|_| PresentError::syntax(line, arg_col, format!("bad truncation '{arg}'")))?;
                trunc = Some(d);
            }
            "generators" => {
                dup(alphabet.is_some())?;
                let names: Vec<&str> = arg.split_whitespace().collect();
                for n in &names {
                    let ok = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                        && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                    if !ok {
                        let msg = if n.contains(':') {
                            format!("generator '{n}': only weight-1 generators are supported")
                        } else {
                            format!("bad generator name '{n}'")
                        };
                        return Err(PresentError::syntax(line, arg_col, msg));
                    }
                }
                alphabet = Some(Alphabet::new(names).ok_or_else(|| {
                    PresentError::syntax(line, arg_col, "generator list is empty or repeats a name")
                })?);
            }
            "relation" => {
                if arg.is_empty() {
                    return Err(PresentError::syntax(line, arg_col, "empty relation"));
                }
                rel_lines.push((line, lead + kw.len() + 1, rest.to_string()));
            }
            _ => {
                return Err(PresentError::syntax(line, lead + 1, format!("unknown directive '{kw}'")));
            }
        }
    }

    let field = field.ok_or(PresentError::Missing("field"))?;
    let trunc = trunc.ok_or(PresentError::Missing("truncate"))?;
    let alphabet = alphabet.ok_or(PresentError::Missing("generators"))?;
    if trunc < 3 {
        return Err(PresentError::TruncationTooSmall(trunc));
    }

    let mut relations = Vec::new();
    for (line, col0, rest) in rel_lines {
        let toks = tokenize(&rest, line, col0)?;
        let end_col = col0 + rest.chars().count();
        let mut p = ExprParser { toks, pos: 0, line, end_col, field, alphabet: &alphabet, trunc };
        let r = p.expr()?;
        if p.pos < p.toks.len() {
            return Err(p.err("unexpected trailing input"));
        }
        if let Some((w, c)) = r.terms().find(|(w, _)| w.degree() < 2) {
            let t = NCPoly::monomial(field, alphabet.len(), trunc, w.clone(), c.clone());
            return Err(PresentError::LowDegree { line, term: t.render(&alphabet) });
        }
        if r.is_zero() {
            return Err(PresentError::ZeroRelation { line });
        }
        relations.push(r);
    }
    Ok(Presentation { field, alphabet, relations, trunc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::Word;

    fn w(s: &str) -> Word {
        Word(s.bytes().map(|b| b - b'x').collect())
    }

    #[test]
    fn parses_commutator() {
        let p = parse_presentation("field QQ\ntruncate 4\ngenerators x y\nrelation x*y - y*x\n").unwrap();
        assert_eq!(p.ngens(), 2);
        assert_eq!(p.relations.len(), 1);
        let r = &p.relations[0];
        assert_eq!(r.coefficient(&w("xy")), Field::Rationals.int(1));
        assert_eq!(r.coefficient(&w("yx")), Field::Rationals.int(-1));
    }

    #[test]
    fn parses_x2_y3() {
        let p = parse_presentation("field QQ\ntruncate 5\ngenerators x y\nrelation x^2 - y^3").unwrap();
        assert_eq!(p.relations[0].render(&p.alphabet), "x^2 - y^3");
        let nq = to_nonhom_quadratic(&p).unwrap();
        assert_eq!(nq.leading_parts.dim(), 1);
        assert_eq!(nq.leading_parts.basis()[0], vec![(0, Field::Rationals.int(1))]);
    }

    #[test]
    fn lie_bracket_token() {
        let a = parse_presentation("field QQ\ntruncate 4\ngenerators x y z1\nrelation [x,y] + z1^3").unwrap();
        let b = parse_presentation("field QQ\ntruncate 4\ngenerators x y z1\nrelation x*y - y*x + z1*z1*z1").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_presentation("field QQ\ntruncate 4\ngenerators x y\nrelation x*q").unwrap_err();
        assert_eq!(e, PresentError::UnknownGenerator { line: 4, col: 12, name: "q".into() });
        let e = parse_presentation("field QQ\ntruncate 4\ngenerators x y\nrelation x*y + y").unwrap_err();
        assert!(matches!(e, PresentError::LowDegree { line: 4, ref term } if term == "y"));
        let e = parse_presentation("truncate 4\ngenerators x y\nrelation x*y").unwrap_err();
        assert_eq!(e, PresentError::Missing("field"));
        let e = parse_presentation("field QQ\ntruncate 4\ngenerators x y\nrelation x*(y").unwrap_err();
        assert!(matches!(e, PresentError::Syntax { line: 4, .. }));
        let e = parse_presentation("field GF(4)\ntruncate 4\ngenerators x\nrelation x^2").unwrap_err();
        assert!(matches!(e, PresentError::Syntax { line: 1, col: 7, .. }));
    }

    #[test]
    fn leading_parts() {
        let p = parse_presentation("field QQ\ntruncate 5\ngenerators x y\nrelation x^2 - y^3\nrelation x*y-y*x").unwrap();
        assert_eq!(to_nonhom_quadratic(&p).unwrap().leading_parts.dim(), 2);
        let p = parse_presentation("field QQ\ntruncate 5\ngenerators x y\nrelation x*y-y*x\nrelation 2*x*y-2*y*x+x^3")
            .unwrap();
        assert!(matches!(to_nonhom_quadratic(&p), Err(PresentError::DependentLeadingParts(_))));
    }

    #[test]
    fn negative_powers() {
        let p = parse_presentation(
            "field GF(3)\ntruncate 5\ngenerators x y\nrelation (1+x)*(1+y)*(1+x)^-1*(1+y)^-1 - (1+y^3)^2",
        )
        .unwrap();
        let r = &p.relations[0];
        assert_eq!(r.lowest_degree(), Some(2));
        assert_eq!(r.homogeneous_part(2).render(&p.alphabet), "x*y + 2*y*x");
    }

    #[test]
    fn round_trip() {
        let src = "field GF(5)\ntruncate 4\ngenerators a b\nrelation 1/2*a*b - [a,b] + a^2*b\r\n# tail\n";
        let p = parse_presentation(src).unwrap();
        let q = parse_presentation(&p.serialize()).unwrap();
        assert_eq!(p, q);
    }
}
