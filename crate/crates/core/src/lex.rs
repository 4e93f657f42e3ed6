//! Tokenizer shared by the term, type, theory and certificate grammars.

use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    LParen,
    RParen,
    Lambda,
    Dot,
    Arrow,
    Amp,
    Le,
    Tilde,
    Turnstile,
    Colon,
    Comma,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Lambda => "`\\`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `src` into tokens paired with their byte offsets.
pub fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let two = |it: &mut std::iter::Peekable<std::str::CharIndices<'_>>, next: char| {
            it.next();
            match it.peek() {
                Some(&(_, n)) if n == next => {
                    it.next();
                    true
                }
                _ => false,
            }
        };
        let tok = match c {
            '(' => {
                it.next();
                Tok::LParen
            }
            ')' => {
                it.next();
                Tok::RParen
            }
            '\\' | 'λ' => {
                it.next();
                Tok::Lambda
            }
            '.' => {
                it.next();
                Tok::Dot
            }
            '&' => {
                it.next();
                Tok::Amp
            }
            '~' => {
                it.next();
                Tok::Tilde
            }
            ':' => {
                it.next();
                Tok::Colon
            }
            ',' => {
                it.next();
                Tok::Comma
            }
            '-' => {
                if two(&mut it, '>') {
                    Tok::Arrow
                } else {
                    return Err(ParseError::new(pos, "expected `->`"));
                }
            }
            '<' => {
                if two(&mut it, '=') {
                    Tok::Le
                } else {
                    return Err(ParseError::new(pos, "expected `<=`"));
                }
            }
            '|' => {
                if two(&mut it, '-') {
                    Tok::Turnstile
                } else {
                    return Err(ParseError::new(pos, "expected `|-`"));
                }
            }
            c if ident_start(c) => {
                let mut s = String::new();
                s.push(c);
                it.next();
                while let Some(&(_, n)) = it.peek() {
                    if ident_continue(n) {
                        s.push(n);
                        it.next();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            c => return Err(ParseError::new(pos, format!("unexpected character `{c}`"))),
        };
        out.push((tok, pos));
    }
    Ok(out)
}

/// Cursor over a token stream.
pub struct Cursor {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: tokenize(src)?,
            idx: 0,
            end: src.len(),
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.idx + k).map(|(t, _)| t)
    }

    pub fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(_, p)| *p).unwrap_or(self.end)
    }

    pub fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.idx >= self.toks.len()
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.idx += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::new(self.pos(), format!("expected {wanted}, found {}", t.describe())),
            None => ParseError::new(self.pos(), format!("expected {wanted}, found end of input")),
        }
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}
