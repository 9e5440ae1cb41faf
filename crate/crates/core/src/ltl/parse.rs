//! Recursive-descent parser for LTL formulas.
//!
//! Binding strength, tightest first: unary operators (`! ~ X G [] F <>`),
//! then `U`/`R`/`V` (right-associative), `&`/`&&`, `|`/`||`, `->`
//! (right-associative), `<->` (right-associative).

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("position {pos}: expected {expected}, found {found}")]
    Unexpected {
        pos: usize,
        expected: &'static str,
        found: String,
    },
    #[error("position {pos}: reserved word `{word}` cannot be used as a proposition")]
    ReservedWord { pos: usize, word: String },
    #[error("position {pos}: non-ASCII character `{ch}`")]
    NonAscii { pos: usize, ch: char },
    #[error("position {pos}: unknown symbol `{symbol}`")]
    UnknownSymbol { pos: usize, symbol: String },
}

impl ParseError {
    /// 1-based character position of the error.
    pub fn position(&self) -> usize {
        match self {
            ParseError::Unexpected { pos, .. }
            | ParseError::ReservedWord { pos, .. }
            | ParseError::NonAscii { pos, .. }
            | ParseError::UnknownSymbol { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Next,
    Until,
    Release,
    Globally,
    Finally,
    True,
    False,
    Ident(String),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Not => "negation".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Next => "`X`".into(),
            Tok::Until => "`U`".into(),
            Tok::Release => "release operator".into(),
            Tok::Globally => "globally operator".into(),
            Tok::Finally => "finally operator".into(),
            Tok::True | Tok::False => "constant".into(),
            Tok::Ident(name) => format!("`{name}`"),
            Tok::End => "end of input".into(),
        }
    }
}

/// A token, its 1-based start position and its source text.
type Spanned = (Tok, usize, String);

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    // Longest match first: `<->` before `<>`, `&&` before `&`.
    const SYMBOLS: &[(&str, Tok)] = &[
        ("<->", Tok::Iff),
        ("->", Tok::Implies),
        ("<>", Tok::Finally),
        ("[]", Tok::Globally),
        ("&&", Tok::And),
        ("||", Tok::Or),
        ("&", Tok::And),
        ("|", Tok::Or),
        ("!", Tok::Not),
        ("~", Tok::Not),
        ("(", Tok::LParen),
        (")", Tok::RParen),
    ];
    'outer: while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if !c.is_ascii() {
            return Err(ParseError::NonAscii { pos, ch: c });
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "true" | "TRUE" => Tok::True,
                "false" | "FALSE" => Tok::False,
                "X" => Tok::Next,
                "U" => Tok::Until,
                "R" | "V" => Tok::Release,
                "G" => Tok::Globally,
                "F" => Tok::Finally,
                _ => Tok::Ident(word.clone()),
            };
            out.push((tok, pos, word));
            continue;
        }
        for (sym, tok) in SYMBOLS {
            let len = sym.len();
            if i + len <= chars.len() && chars[i..i + len].iter().copied().eq(sym.chars()) {
                out.push((tok.clone(), pos, sym.to_string()));
                i += len;
                continue 'outer;
            }
        }
        let symbol = match c {
            '-' | '<' | '[' => chars[i..(i + 3).min(chars.len())].iter().collect(),
            _ => c.to_string(),
        };
        return Err(ParseError::UnknownSymbol { pos, symbol });
    }
    out.push((Tok::End, chars.len() + 1, String::new()));
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        ParseError::Unexpected {
            pos: self.pos(),
            expected,
            found: self.peek().describe(),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implies()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.temporal()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.bump();
                Ok(Formula::until(lhs, self.temporal()?))
            }
            Tok::Release => {
                self.bump();
                Ok(Formula::release(lhs, self.temporal()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let wrap: fn(Formula) -> Formula = match self.peek() {
            Tok::Not => Formula::not,
            Tok::Next => Formula::next,
            Tok::Globally => Formula::globally,
            Tok::Finally => Formula::finally,
            _ => return self.atom(),
        };
        self.bump();
        Ok(wrap(self.unary()?))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Prop(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Until | Tok::Release => Err(ParseError::ReservedWord {
                pos,
                word: self.toks[self.at].2.clone(),
            }),
            _ => Err(self.unexpected("a formula")),
        }
    }
}

/// Parses a formula written with any mix of the accepted operator spellings.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let f = p.iff()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(f)
}
