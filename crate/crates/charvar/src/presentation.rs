//! Finitely presented groups: parsing, abelianization, and the
//! exponent-canceling classification.
//!
//! Concrete syntax: `gens <name>+ ;` followed by zero or more `rel <word> ;`.
//! In words, juxtaposition is product, `^-1` (or any integer power) is
//! exponentiation, `[x,y]` is the commutator `x y x^-1 y^-1`, and parentheses
//! group subwords.

use crate::zmodule::IntMatrix;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PresentationError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown generator `{name}` at {line}:{col}")]
    UnknownGenerator { name: String, line: usize, col: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A freely reduced word in the generators: (generator index, exponent +-1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<(usize, i8)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: Vec<(usize, i8)>) -> Self {
        let mut w = Word { letters: Vec::with_capacity(letters.len()) };
        for (g, e) in letters {
            debug_assert!(e == 1 || e == -1);
            w.push(g, e);
        }
        w
    }

    /// Push a letter, cancelling against the current tail.
    fn push(&mut self, gen: usize, exp: i8) {
        match self.letters.last() {
            Some(&(g, e)) if g == gen && e == -exp => {
                self.letters.pop();
            }
            _ => self.letters.push((gen, exp)),
        }
    }

    fn extend(&mut self, other: &Word) {
        for &(g, e) in &other.letters {
            self.push(g, e);
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend(other);
        w
    }

    pub fn commutator(a: &Word, b: &Word) -> Word {
        let mut w = a.clone();
        w.extend(b);
        w.extend(&a.inverse());
        w.extend(&b.inverse());
        w
    }

    pub fn generator(g: usize) -> Word {
        Word { letters: vec![(g, 1)] }
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Net exponent of generator `g`.
    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.letters
            .iter()
            .filter(|&&(h, _)| h == g)
            .map(|&(_, e)| e as i64)
            .sum()
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::identity();
        for _ in 0..n.unsigned_abs() {
            w.extend(&base);
        }
        w
    }
}

/// A finitely presented group: distinct generator names and freely reduced
/// relator words over them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generator_names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(
        generator_names: Vec<String>,
        relators: Vec<Word>,
    ) -> Result<Self, PresentationError> {
        for (i, n) in generator_names.iter().enumerate() {
            if n.is_empty() {
                return Err(PresentationError::InvalidParameter(
                    "empty generator name".into(),
                ));
            }
            if generator_names[..i].contains(n) {
                return Err(PresentationError::InvalidParameter(format!(
                    "duplicate generator name `{n}`"
                )));
            }
        }
        let ngens = generator_names.len();
        for r in &relators {
            if let Some(&(g, _)) = r.letters().iter().find(|&&(g, _)| g >= ngens) {
                return Err(PresentationError::InvalidParameter(format!(
                    "relator references generator index {g} out of range"
                )));
            }
        }
        Ok(Presentation { generator_names, relators })
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn num_generators(&self) -> usize {
        self.generator_names.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Matrix of exponent sums: entry (i, j) is the net exponent of
    /// generator j in relator i. Its cokernel is the abelianization.
    pub fn abelianization_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.relators.len(), self.num_generators());
        for (i, r) in self.relators.iter().enumerate() {
            for j in 0..self.num_generators() {
                m[(i, j)] = r.exponent_sum(j).into();
            }
        }
        m
    }

    pub fn abelianization(&self) -> crate::zmodule::FgAbelianGroup {
        crate::zmodule::cokernel(&self.abelianization_matrix())
    }

    /// True iff every relator has zero net exponent in each generator; the
    /// rank (generator count) is returned in that case, and the
    /// abelianization is free abelian of that rank.
    pub fn is_exponent_canceling(&self) -> (bool, Option<usize>) {
        if self.abelianization_matrix().is_zero_matrix() {
            (true, Some(self.num_generators()))
        } else {
            (false, None)
        }
    }

    /// Concatenation of two presentations on disjoint generator sets: the
    /// free product (and, with the extra commutators, building block for
    /// direct products).
    pub fn free_product(&self, other: &Presentation) -> Presentation {
        let offset = self.num_generators();
        let mut names = self.generator_names.clone();
        for n in &other.generator_names {
            let mut n = n.clone();
            while names.contains(&n) {
                n.push('_');
            }
            names.push(n);
        }
        let mut relators = self.relators.clone();
        relators.extend(other.relators.iter().map(|w| {
            Word::from_letters(w.letters().iter().map(|&(g, e)| (g + offset, e)).collect())
        }));
        Presentation { generator_names: names, relators }
    }

    /// Direct product: free product plus all cross commutators.
    pub fn direct_product(&self, other: &Presentation) -> Presentation {
        let offset = self.num_generators();
        let mut p = self.free_product(other);
        for i in 0..offset {
            for j in offset..p.num_generators() {
                let c = Word::commutator(&Word::generator(i), &Word::generator(j));
                p.relators.push(c);
            }
        }
        p
    }

    /// True when there are no relators.
    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    /// Recognizes the standard free-abelian presentation: relators are
    /// exactly the pairwise commutators of distinct generators, every
    /// unordered pair covered once.
    pub fn standard_free_abelian_rank(&self) -> Option<usize> {
        let r = self.num_generators();
        let mut seen = vec![false; r * r];
        for w in &self.relators {
            let l = w.letters();
            if l.len() != 4 {
                return None;
            }
            let (a, b) = (l[0], l[1]);
            if a.1 != 1 || b.1 != 1 || a.0 == b.0 {
                return None;
            }
            if l[2] != (a.0, -1) || l[3] != (b.0, -1) {
                return None;
            }
            let (x, y) = (a.0.min(b.0), a.0.max(b.0));
            if seen[x * r + y] {
                return None;
            }
            seen[x * r + y] = true;
        }
        for x in 0..r {
            for y in x + 1..r {
                if !seen[x * r + y] {
                    return None;
                }
            }
        }
        Some(r)
    }

    /// Recognizes the standard genus-g surface presentation
    /// `<a_1, b_1, ..., a_g, b_g | [a_1,b_1]...[a_g,b_g]>`.
    pub fn standard_surface_genus(&self) -> Option<usize> {
        let n = self.num_generators();
        if n == 0 || n % 2 != 0 || self.relators.len() != 1 {
            return None;
        }
        let g = n / 2;
        let mut expected = Word::identity();
        for i in 0..g {
            expected = expected.concat(&Word::commutator(
                &Word::generator(2 * i),
                &Word::generator(2 * i + 1),
            ));
        }
        (self.relators[0] == expected).then_some(g)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens")?;
        for n in &self.generator_names {
            write!(f, " {n}")?;
        }
        write!(f, ";")?;
        for r in &self.relators {
            write!(f, "\nrel")?;
            if r.is_identity() {
                // An empty word has no printable letters; emit a trivial
                // relator that reduces to the identity.
                write!(f, " {} {}^-1", self.generator_names[0], self.generator_names[0])?;
            }
            for &(g, e) in r.letters() {
                write!(f, " {}", self.generator_names[g])?;
                if e < 0 {
                    write!(f, "^-1")?;
                }
            }
            write!(f, ";")?;
        }
        Ok(())
    }
}

// --- parser ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Caret,
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, PresentationError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '#' => {
                // comment to end of line
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            }
            ';' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::Semi, line: tline, col: tcol });
            }
            ',' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::Comma, line: tline, col: tcol });
            }
            '^' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::Caret, line: tline, col: tcol });
            }
            '[' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::LBracket, line: tline, col: tcol });
            }
            ']' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::RBracket, line: tline, col: tcol });
            }
            '(' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::LParen, line: tline, col: tcol });
            }
            ')' => {
                bump(&mut chars);
                toks.push(Spanned { tok: Tok::RParen, line: tline, col: tcol });
            }
            '-' | '0'..='9' => {
                let mut s = String::new();
                s.push(bump(&mut chars));
                while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    s.push(bump(&mut chars));
                }
                let n: i64 = s.parse().map_err(|_| PresentationError::Syntax {
                    line: tline,
                    col: tcol,
                    msg: format!("malformed integer `{s}`"),
                })?;
                toks.push(Spanned { tok: Tok::Int(n), line: tline, col: tcol });
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while chars
                    .peek()
                    .is_some_and(|c| c.is_alphanumeric() || *c == '_')
                {
                    s.push(bump(&mut chars));
                }
                toks.push(Spanned { tok: Tok::Ident(s), line: tline, col: tcol });
            }
            c => {
                return Err(PresentationError::Syntax {
                    line: tline,
                    col: tcol,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    gens: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    fn err_here(&self, msg: impl Into<String>) -> PresentationError {
        match self.peek() {
            Some(s) => PresentationError::Syntax { line: s.line, col: s.col, msg: msg.into() },
            None => PresentationError::Syntax {
                line: self.toks.last().map_or(1, |s| s.line),
                col: self.toks.last().map_or(1, |s| s.col + 1),
                msg: format!("{} (unexpected end of input)", msg.into()),
            },
        }
    }

    fn lookup(&self, name: &str, line: usize, col: usize) -> Result<usize, PresentationError> {
        self.gens
            .iter()
            .position(|g| g == name)
            .ok_or(PresentationError::UnknownGenerator { name: name.to_string(), line, col })
    }

    /// word := factor+ ; stops at `;`, `,`, `]`, `)`.
    fn parse_word(&mut self) -> Result<Word, PresentationError> {
        let mut w = Word::identity();
        let mut any = false;
        while let Some(s) = self.peek() {
            match &s.tok {
                Tok::Semi | Tok::Comma | Tok::RBracket | Tok::RParen => break,
                _ => {
                    w = w.concat(&self.parse_factor()?);
                    any = true;
                }
            }
        }
        if !any {
            return Err(self.err_here("expected a word"));
        }
        Ok(w)
    }

    /// factor := atom (`^` int)?
    fn parse_factor(&mut self) -> Result<Word, PresentationError> {
        let base = self.parse_atom()?;
        if matches!(self.peek().map(|s| &s.tok), Some(Tok::Caret)) {
            self.pos += 1;
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    Ok(base.pow(n))
                }
                _ => Err(self.err_here("expected integer exponent after `^`")),
            }
        } else {
            Ok(base)
        }
    }

    /// atom := name | `[` word `,` word `]` | `(` word `)`
    fn parse_atom(&mut self) -> Result<Word, PresentationError> {
        let s = self.peek().ok_or_else(|| self.err_here("expected atom"))?;
        match &s.tok {
            Tok::Ident(name) => {
                let idx = self.lookup(name, s.line, s.col)?;
                self.pos += 1;
                Ok(Word::generator(idx))
            }
            Tok::LBracket => {
                self.pos += 1;
                let a = self.parse_word()?;
                if !matches!(self.peek().map(|s| &s.tok), Some(Tok::Comma)) {
                    return Err(self.err_here("expected `,` in commutator"));
                }
                self.pos += 1;
                let b = self.parse_word()?;
                if !matches!(self.peek().map(|s| &s.tok), Some(Tok::RBracket)) {
                    return Err(self.err_here("expected `]`"));
                }
                self.pos += 1;
                Ok(Word::commutator(&a, &b))
            }
            Tok::LParen => {
                self.pos += 1;
                let w = self.parse_word()?;
                if !matches!(self.peek().map(|s| &s.tok), Some(Tok::RParen)) {
                    return Err(self.err_here("expected `)`"));
                }
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.err_here("expected generator, `[`, or `(`")),
        }
    }
}

pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let toks = tokenize(text)?;
    let mut pos = 0usize;

    let expect_kw = |toks: &[Spanned], pos: usize, kw: &str| -> Result<(), PresentationError> {
        match toks.get(pos) {
            Some(Spanned { tok: Tok::Ident(s), .. }) if s == kw => Ok(()),
            Some(s) => Err(PresentationError::Syntax {
                line: s.line,
                col: s.col,
                msg: format!("expected `{kw}`"),
            }),
            None => Err(PresentationError::Syntax {
                line: 1,
                col: 1,
                msg: format!("expected `{kw}` (empty input)"),
            }),
        }
    };

    expect_kw(&toks, pos, "gens")?;
    pos += 1;
    let mut gens = Vec::new();
    loop {
        match toks.get(pos) {
            Some(Spanned { tok: Tok::Ident(n), line, col }) => {
                if n == "rel" || gens.contains(n) {
                    return Err(PresentationError::Syntax {
                        line: *line,
                        col: *col,
                        msg: format!("bad generator name `{n}`"),
                    });
                }
                gens.push(n.clone());
                pos += 1;
            }
            Some(Spanned { tok: Tok::Semi, .. }) => {
                pos += 1;
                break;
            }
            Some(s) => {
                return Err(PresentationError::Syntax {
                    line: s.line,
                    col: s.col,
                    msg: "expected generator name or `;`".into(),
                })
            }
            None => {
                return Err(PresentationError::Syntax {
                    line: 1,
                    col: 1,
                    msg: "unterminated `gens` line".into(),
                })
            }
        }
    }
    if gens.is_empty() {
        return Err(PresentationError::Syntax {
            line: 1,
            col: 1,
            msg: "at least one generator required".into(),
        });
    }

    let mut relators = Vec::new();
    while pos < toks.len() {
        expect_kw(&toks, pos, "rel")?;
        pos += 1;
        let mut p = Parser { toks: &toks, pos, gens: &gens };
        let w = p.parse_word()?;
        pos = p.pos;
        match toks.get(pos) {
            Some(Spanned { tok: Tok::Semi, .. }) => pos += 1,
            _ => {
                let p = Parser { toks: &toks, pos, gens: &gens };
                return Err(p.err_here("expected `;` after relator"));
            }
        }
        relators.push(w);
    }

    Presentation::new(gens, relators)
}

// --- standard groups ------------------------------------------------------

/// Simple undirected graph on `vertices` nodes, for right-angled Artin groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StandardGroup {
    Free(usize),
    FreeAbelian(usize),
    Surface(usize),
    CentralExtSurface(usize),
    Raag(Graph),
}

fn gen_names(n: usize, prefix: &str) -> Vec<String> {
    if prefix.is_empty() && n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        let p = if prefix.is_empty() { "x" } else { prefix };
        (1..=n).map(|i| format!("{p}{i}")).collect()
    }
}

/// Standard presentations; every output is exponent-canceling.
pub fn standard_group(kind: &StandardGroup) -> Result<Presentation, PresentationError> {
    match kind {
        StandardGroup::Free(r) => Presentation::new(gen_names(*r, ""), vec![]),
        StandardGroup::FreeAbelian(r) => {
            let mut relators = Vec::new();
            for i in 0..*r {
                for j in i + 1..*r {
                    relators.push(Word::commutator(&Word::generator(i), &Word::generator(j)));
                }
            }
            Presentation::new(gen_names(*r, ""), relators)
        }
        StandardGroup::Surface(g) => {
            if *g == 0 {
                return Err(PresentationError::InvalidParameter("genus must be >= 1".into()));
            }
            let mut names = Vec::new();
            for i in 1..=*g {
                names.push(format!("a{i}"));
                names.push(format!("b{i}"));
            }
            let mut relator = Word::identity();
            for i in 0..*g {
                relator = relator.concat(&Word::commutator(
                    &Word::generator(2 * i),
                    &Word::generator(2 * i + 1),
                ));
            }
            Presentation::new(names, vec![relator])
        }
        StandardGroup::CentralExtSurface(g) => {
            if *g == 0 {
                return Err(PresentationError::InvalidParameter("genus must be >= 1".into()));
            }
            // Generators a1, b1, ..., ag, bg, z; the central generator z is
            // set equal to the surface relator.
            let mut names = Vec::new();
            for i in 1..=*g {
                names.push(format!("a{i}"));
                names.push(format!("b{i}"));
            }
            names.push("z".to_string());
            let z = 2 * g;
            let mut surface = Word::identity();
            for i in 0..*g {
                surface = surface.concat(&Word::commutator(
                    &Word::generator(2 * i),
                    &Word::generator(2 * i + 1),
                ));
            }
            let mut relators = vec![Word::generator(z).inverse().concat(&surface)];
            for i in 0..2 * g {
                relators.push(Word::commutator(&Word::generator(z), &Word::generator(i)));
            }
            Presentation::new(names, relators)
        }
        StandardGroup::Raag(graph) => {
            for &(u, v) in &graph.edges {
                if u >= graph.vertices || v >= graph.vertices {
                    return Err(PresentationError::InvalidParameter(format!(
                        "edge ({u},{v}) out of range"
                    )));
                }
                if u == v {
                    return Err(PresentationError::InvalidParameter(format!(
                        "loop edge at vertex {u}"
                    )));
                }
            }
            let mut seen = std::collections::HashSet::new();
            for &(u, v) in &graph.edges {
                if !seen.insert((u.min(v), u.max(v))) {
                    return Err(PresentationError::InvalidParameter(format!(
                        "duplicate edge ({u},{v})"
                    )));
                }
            }
            let relators = graph
                .edges
                .iter()
                .map(|&(u, v)| Word::commutator(&Word::generator(u), &Word::generator(v)))
                .collect();
            Presentation::new(gen_names(graph.vertices, ""), relators)
        }
    }
}
