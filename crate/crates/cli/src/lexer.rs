//! Tokens of the operator expression language.

use crate::error::{CliError, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Let,
    Check,
    Print,
    Ident(String),
    /// A real literal.
    Num(f64),
    /// An imaginary literal such as `2i` or `i`.
    Imag(f64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Eq,
    Tilde,
    Plus,
    Minus,
    Star,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Let => "`let`".into(),
            Tok::Check => "`check`".into(),
            Tok::Print => "`print`".into(),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(x) => format!("number {x}"),
            Tok::Imag(x) => format!("imaginary number {x}i"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits `text` into tokens; `#` starts a comment running to the end of the line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, CliError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let ch = chars[i];
        let span = Span { line, col };
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if ch.is_ascii_digit()
            || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit()))
        {
            i = scan_number(&chars, i);
            let lexeme: String = chars[start..i].iter().collect();
            let value: f64 = lexeme
                .parse()
                .map_err(|_| CliError::syntax(format!("malformed number `{lexeme}`"), span))?;
            if !value.is_finite() {
                return Err(CliError::syntax(
                    format!("number `{lexeme}` is out of range"),
                    span,
                ));
            }
            if chars.get(i) == Some(&'i') && !chars.get(i + 1).is_some_and(|c| is_ident_char(*c)) {
                i += 1;
                Tok::Imag(value)
            } else {
                Tok::Num(value)
            }
        } else if ch.is_alphabetic() || ch == '_' {
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            match word.as_str() {
                "let" => Tok::Let,
                "check" => Tok::Check,
                "print" => Tok::Print,
                "i" => Tok::Imag(1.0),
                _ => Tok::Ident(word),
            }
        } else if ch == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(CliError::syntax("unterminated string", span)),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        match chars.get(i + 1) {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            _ => {
                                return Err(CliError::syntax(
                                    "unknown escape in string",
                                    Span {
                                        line,
                                        col: col + (i - start),
                                    },
                                ))
                            }
                        }
                        i += 2;
                    }
                    Some(c) => {
                        s.push(*c);
                        i += 1;
                    }
                }
            }
            Tok::Str(s)
        } else {
            i += 1;
            match ch {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '=' => Tok::Eq,
                '~' => Tok::Tilde,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                other => {
                    return Err(CliError::syntax(
                        format!("unexpected character `{other}`"),
                        span,
                    ))
                }
            }
        };
        col += i - start;
        out.push(Token { tok, span });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, col },
    });
    Ok(out)
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Digits, an optional fraction and an optional exponent.
fn scan_number(chars: &[char], mut i: usize) -> usize {
    let digits = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
    };
    digits(&mut i);
    if chars.get(i) == Some(&'.') {
        i += 1;
        digits(&mut i);
    }
    if matches!(chars.get(i), Some('e' | 'E')) {
        let mut j = i + 1;
        if matches!(chars.get(j), Some('+' | '-')) {
            j += 1;
        }
        if chars.get(j).is_some_and(|c| c.is_ascii_digit()) {
            i = j;
            digits(&mut i);
        }
    }
    i
}
