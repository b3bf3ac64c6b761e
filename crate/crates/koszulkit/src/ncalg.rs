//! Words and truncated noncommutative power series in weight-1 generators.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::exactlin::{Field, Scalar, SparseVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NcError {
    #[error("generator count mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("constant term is not 1")]
    NotUnital,
    #[error("substitution rule for generator {0} is not of the form x + (higher terms)")]
    BadRule(usize),
    #[error("degree {0} outside 0..={1}")]
    DegreeOutOfRange(usize, usize),
    #[error("generator index {0} out of range")]
    UnknownGenerator(usize),
}

/// Generator names, in the order that fixes the lexicographic word order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// `None` if names repeat or the list is empty.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Option<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > 255 {
            return None;
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return None;
            }
        }
        Some(Alphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A word in generator indices. Ordered by length, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(pub Vec<u8>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i as u8])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Position among the `g^n` words of the same degree.
    pub fn index_in_degree(&self, g: usize) -> usize {
        self.0.iter().fold(0, |acc, &l| acc * g + l as usize)
    }

    pub fn from_index(mut idx: usize, n: usize, g: usize) -> Word {
        let mut v = vec![0u8; n];
        for slot in v.iter_mut().rev() {
            *slot = (idx % g) as u8;
            idx /= g;
        }
        Word(v)
    }

    /// Position among all words of degree `<= D` in degree-first order.
    pub fn global_index(&self, g: usize) -> usize {
        words_below(self.degree(), g) + self.index_in_degree(g)
    }

    pub fn from_global_index(idx: usize, g: usize) -> Word {
        let mut n = 0;
        while words_below(n + 1, g) <= idx {
            n += 1;
        }
        Word::from_index(idx - words_below(n, g), n, g)
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let name = alphabet.name(l as usize);
            if j - i == 1 {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{}^{}", name, j - i));
            }
            i = j;
        }
        parts.join("*")
    }
}

/// Number of words of degree `< n` on `g` letters.
pub fn words_below(n: usize, g: usize) -> usize {
    (0..n).map(|k| g.pow(k as u32)).sum()
}

/// Number of words of degree exactly `n`.
pub fn words_of_degree(n: usize, g: usize) -> usize {
    g.pow(n as u32)
}

/// Iterate the words of degree `n` in order.
pub fn words(n: usize, g: usize) -> impl Iterator<Item = Word> {
    (0..words_of_degree(n, g)).map(move |i| Word::from_index(i, n, g))
}

/// A noncommutative polynomial truncated above total degree `trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCPoly {
    field: Field,
    ngens: usize,
    trunc: usize,
    terms: BTreeMap<Word, Scalar>,
}

/// Lie expression over generator indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LieExpr {
    Gen(usize),
    Bracket(Box<LieExpr>, Box<LieExpr>),
    Sum(Vec<(Scalar, LieExpr)>),
}

impl LieExpr {
    pub fn bracket(a: LieExpr, b: LieExpr) -> LieExpr {
        LieExpr::Bracket(Box::new(a), Box::new(b))
    }
}

impl NCPoly {
    pub fn zero(field: Field, ngens: usize, trunc: usize) -> Self {
        NCPoly { field, ngens, trunc, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, ngens: usize, trunc: usize, c: Scalar) -> Self {
        let mut p = NCPoly::zero(field, ngens, trunc);
        p.add_term(Word::empty(), c);
        p
    }

    pub fn one(field: Field, ngens: usize, trunc: usize) -> Self {
        NCPoly::constant(field, ngens, trunc, field.one())
    }

    pub fn generator(field: Field, ngens: usize, trunc: usize, i: usize) -> Self {
        NCPoly::monomial(field, ngens, trunc, Word::letter(i), field.one())
    }

    pub fn monomial(field: Field, ngens: usize, trunc: usize, w: Word, c: Scalar) -> Self {
        let mut p = NCPoly::zero(field, ngens, trunc);
        p.add_term(w, c);
        p
    }

    /// Build from `(word, coefficient)` pairs; repeated words are summed.
    pub fn from_terms(
        field: Field,
        ngens: usize,
        trunc: usize,
        terms: impl IntoIterator<Item = (Word, Scalar)>,
    ) -> Self {
        let mut p = NCPoly::zero(field, ngens, trunc);
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn truncation(&self) -> usize {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Word::empty())
    }

    /// Adds `c * w`, dropping words above the truncation.
    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() || w.degree() > self.trunc {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                let s = &*x + &c;
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn lowest_degree(&self) -> Option<usize> {
        self.terms.keys().next().map(Word::degree)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::degree).max()
    }

    /// Degree-`n` homogeneous part as an `NCPoly`.
    pub fn homogeneous_part(&self, n: usize) -> NCPoly {
        let mut p = NCPoly::zero(self.field, self.ngens, self.trunc);
        for (w, c) in self.terms.iter().filter(|(w, _)| w.degree() == n) {
            p.terms.insert(w.clone(), c.clone());
        }
        p
    }

    /// Coordinates of the degree-`n` part in the basis of degree-`n` words.
    pub fn degree_component(&self, n: usize) -> Result<SparseVec, NcError> {
        if n > self.trunc {
            return Err(NcError::DegreeOutOfRange(n, self.trunc));
        }
        Ok(self
            .terms
            .iter()
            .filter(|(w, _)| w.degree() == n)
            .map(|(w, c)| (w.index_in_degree(self.ngens), c.clone()))
            .collect())
    }

    pub fn from_component(field: Field, ngens: usize, trunc: usize, n: usize, v: &[(usize, Scalar)]) -> Self {
        NCPoly::from_terms(
            field,
            ngens,
            trunc,
            v.iter().map(|(i, c)| (Word::from_index(*i, n, ngens), c.clone())),
        )
    }

    /// Coordinates in the basis of all words of degree `<= trunc`.
    pub fn to_global(&self) -> SparseVec {
        self.terms
            .iter()
            .map(|(w, c)| (w.global_index(self.ngens), c.clone()))
            .collect()
    }

    pub fn from_global(field: Field, ngens: usize, trunc: usize, v: &[(usize, Scalar)]) -> Self {
        NCPoly::from_terms(
            field,
            ngens,
            trunc,
            v.iter().map(|(i, c)| (Word::from_global_index(*i, ngens), c.clone())),
        )
    }

    /// Same polynomial cut at a smaller truncation.
    pub fn truncate(&self, trunc: usize) -> NCPoly {
        let mut p = NCPoly::zero(self.field, self.ngens, trunc);
        for (w, c) in &self.terms {
            p.add_term(w.clone(), c.clone());
        }
        p
    }

    fn compatible(&self, other: &NCPoly) -> Result<(), NcError> {
        if self.field != other.field {
            return Err(NcError::FieldMismatch(self.field, other.field));
        }
        if self.ngens != other.ngens {
            return Err(NcError::AlphabetMismatch(self.ngens, other.ngens));
        }
        if self.trunc != other.trunc {
            return Err(NcError::TruncationMismatch(self.trunc, other.trunc));
        }
        Ok(())
    }

    pub fn add(&self, other: &NCPoly) -> Result<NCPoly, NcError> {
        self.compatible(other)?;
        let mut p = self.clone();
        for (w, c) in &other.terms {
            p.add_term(w.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn sub(&self, other: &NCPoly) -> Result<NCPoly, NcError> {
        self.add(&other.scale(&self.field.int(-1)))
    }

    pub fn scale(&self, a: &Scalar) -> NCPoly {
        let mut p = NCPoly::zero(self.field, self.ngens, self.trunc);
        if a.is_zero() {
            return p;
        }
        p.terms = self.terms.iter().map(|(w, c)| (w.clone(), a * c)).collect();
        p
    }

    pub fn neg(&self) -> NCPoly {
        self.scale(&self.field.int(-1))
    }

    pub fn multiply(&self, other: &NCPoly) -> Result<NCPoly, NcError> {
        self.compatible(other)?;
        let mut p = NCPoly::zero(self.field, self.ngens, self.trunc);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if u.degree() + v.degree() <= self.trunc {
                    p.add_term(u.concat(v), a * b);
                }
            }
        }
        Ok(p)
    }

    /// Commutator `ab - ba`.
    pub fn commutator(&self, other: &NCPoly) -> Result<NCPoly, NcError> {
        self.multiply(other)?.sub(&other.multiply(self)?)
    }

    pub fn pow(&self, k: usize) -> NCPoly {
        let mut acc = NCPoly::one(self.field, self.ngens, self.trunc);
        for _ in 0..k {
            acc = acc.multiply(self).expect("same shape");
        }
        acc
    }

    /// Inverse of a series with constant term 1, as a geometric series.
    pub fn invert_unital(&self) -> Result<NCPoly, NcError> {
        if !self.constant_term().is_one() {
            return Err(NcError::NotUnital);
        }
        let one = NCPoly::one(self.field, self.ngens, self.trunc);
        let b = self.sub(&one)?.neg();
        let mut acc = one.clone();
        let mut power = one;
        for _ in 0..self.trunc {
            power = power.multiply(&b)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc)
    }

    /// Simultaneous substitution `x_i -> rules[i]` (missing rules keep `x_i`).
    /// Each rule must be `x_i` plus terms of degree at least 2.
    pub fn substitute(&self, rules: &BTreeMap<usize, NCPoly>) -> Result<NCPoly, NcError> {
        let mut images = Vec::with_capacity(self.ngens);
        for i in 0..self.ngens {
            let gen = NCPoly::generator(self.field, self.ngens, self.trunc, i);
            match rules.get(&i) {
                None => images.push(gen),
                Some(r) => {
                    self.compatible(r)?;
                    let low = NCPoly::from_terms(
                        self.field,
                        self.ngens,
                        self.trunc,
                        r.terms.iter().filter(|(w, _)| w.degree() <= 1).map(|(w, c)| (w.clone(), c.clone())),
                    );
                    if low != gen {
                        return Err(NcError::BadRule(i));
                    }
                    images.push(r.clone());
                }
            }
        }
        for &i in rules.keys() {
            if i >= self.ngens {
                return Err(NcError::UnknownGenerator(i));
            }
        }
        let mut out = NCPoly::zero(self.field, self.ngens, self.trunc);
        for (w, c) in &self.terms {
            let mut t = NCPoly::constant(self.field, self.ngens, self.trunc, c.clone());
            for &l in &w.0 {
                t = t.multiply(&images[l as usize])?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Associative expansion of a Lie expression, `[a,b] = ab - ba`.
    pub fn lie_expand(field: Field, ngens: usize, trunc: usize, e: &LieExpr) -> Result<NCPoly, NcError> {
        match e {
            LieExpr::Gen(i) => {
                if *i >= ngens {
                    return Err(NcError::UnknownGenerator(*i));
                }
                Ok(NCPoly::generator(field, ngens, trunc, *i))
            }
            LieExpr::Bracket(a, b) => {
                let a = NCPoly::lie_expand(field, ngens, trunc, a)?;
                let b = NCPoly::lie_expand(field, ngens, trunc, b)?;
                a.commutator(&b)
            }
            LieExpr::Sum(parts) => {
                let mut acc = NCPoly::zero(field, ngens, trunc);
                for (c, sub) in parts {
                    acc = acc.add(&NCPoly::lie_expand(field, ngens, trunc, sub)?.scale(c))?;
                }
                Ok(acc)
            }
        }
    }

    /// Text form accepted by the presentation parser.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { c.neg() } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if w.degree() == 0 {
                out.push_str(&mag.render());
            } else if mag.is_one() {
                out.push_str(&w.render(alphabet));
            } else {
                out.push_str(&mag.render());
                out.push('*');
                out.push_str(&w.render(alphabet));
            }
        }
        out
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.ngens).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.render(&Alphabet { names }))
    }
}
