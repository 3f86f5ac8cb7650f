use std::fmt;

use super::ast::Span;
use super::ParseError;
use crate::typesys::Name;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Data,
    Codata,
    Declare,
    In,
    Of,
    Fn,
    Case,
    Let,
    LetStar,
    Fst,
    Snd,
    Inl,
    Inr,
    Lower,
    Fold,
    SFold,
    Unfold,
    SUnfold,
    Unit,
}

const KEYWORDS: &[(&str, Kw)] = &[
    ("data", Kw::Data),
    ("codata", Kw::Codata),
    ("declare", Kw::Declare),
    ("in", Kw::In),
    ("of", Kw::Of),
    ("fn", Kw::Fn),
    ("case", Kw::Case),
    ("let", Kw::Let),
    ("fst", Kw::Fst),
    ("snd", Kw::Snd),
    ("inl", Kw::Inl),
    ("inr", Kw::Inr),
    ("lower", Kw::Lower),
    ("fold", Kw::Fold),
    ("sfold", Kw::SFold),
    ("unfold", Kw::Unfold),
    ("sunfold", Kw::SUnfold),
    ("unit", Kw::Unit),
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.iter().any(|(k, _)| *k == s)
}

impl Kw {
    pub fn text(self) -> &'static str {
        if self == Kw::LetStar {
            return "let*";
        }
        KEYWORDS.iter().find(|(_, k)| *k == self).map(|(s, _)| *s).unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(Name),
    /// `'name`: a safe type, safe constructor, or `'c` / `'d`.
    Tick(Name),
    Kw(Kw),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Semi,
    Bar,
    Eq,
    FatArrow,
    Arrow,
    Plus,
    Star,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Tick(s) => write!(f, "`'{s}`"),
            Tok::Kw(k) => write!(f, "`{}`", k.text()),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrack => f.write_str("`[`"),
            Tok::RBrack => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let span = Span { line, col };
        let ident = |start: usize| -> (String, usize) {
            let mut j = start;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (chars[start..j].iter().collect(), j)
        };
        let tok = if is_ident_start(c) {
            let (word, end) = ident(i);
            while i < end {
                bump!();
            }
            if word == "let" && chars.get(i) == Some(&'*') {
                bump!();
                Tok::Kw(Kw::LetStar)
            } else if let Some((_, kw)) = KEYWORDS.iter().find(|(k, _)| *k == word) {
                Tok::Kw(*kw)
            } else {
                Tok::Ident(word.into())
            }
        } else if c == '\'' {
            if !chars.get(i + 1).copied().is_some_and(is_ident_start) {
                return Err(ParseError::lexical(span, "expected a name after `'`"));
            }
            let (word, end) = ident(i + 1);
            while i < end {
                bump!();
            }
            Tok::Tick(word.into())
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let (tok, width) = match two.as_str() {
                "=>" => (Tok::FatArrow, 2),
                "->" => (Tok::Arrow, 2),
                _ => (
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '[' => Tok::LBrack,
                        ']' => Tok::RBrack,
                        ',' => Tok::Comma,
                        ':' => Tok::Colon,
                        ';' => Tok::Semi,
                        '|' => Tok::Bar,
                        '=' => Tok::Eq,
                        '+' => Tok::Plus,
                        '*' => Tok::Star,
                        other => {
                            return Err(ParseError::lexical(span, &format!("unexpected character `{other}`")))
                        }
                    },
                    1,
                ),
            };
            for _ in 0..width {
                bump!();
            }
            tok
        };
        out.push(Token { tok, span });
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col } });
    Ok(out)
}
