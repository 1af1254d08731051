use std::fmt;

use super::ParseDiagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Identifier,
    Variable,
    Integer,
    Punctuation,
    Comparison,
    Arithmetic,
    Directive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: usize,
    pub column: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }

    pub fn is_punct(&self, lexeme: &str) -> bool {
        self.is(TokenKind::Punctuation, lexeme)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.lexeme)
    }
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, buf: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            buf.push(c);
            self.bump();
        }
    }
}

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits program or fact text into tokens. `%` comments run to end of line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseDiagnostic> {
    let mut cur = Cursor { chars: text.chars().peekable(), line: 1, column: 1 };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '%' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let mut lexeme = String::new();
        let kind = if c.is_ascii_lowercase() {
            cur.take_while(&mut lexeme, is_word);
            TokenKind::Identifier
        } else if c.is_ascii_uppercase() || c == '_' {
            cur.take_while(&mut lexeme, is_word);
            TokenKind::Variable
        } else if c.is_ascii_digit() {
            cur.take_while(&mut lexeme, |c| c.is_ascii_digit());
            if lexeme.parse::<i64>().is_err() {
                return Err(ParseDiagnostic::error("integer out of range", line, column));
            }
            TokenKind::Integer
        } else if c == '#' {
            lexeme.push(c);
            cur.bump();
            cur.take_while(&mut lexeme, is_word);
            if lexeme.len() == 1 {
                return Err(ParseDiagnostic::error("illegal character '#'", line, column));
            }
            TokenKind::Directive
        } else {
            cur.bump();
            lexeme.push(c);
            match c {
                '(' | ')' | ',' | '.' => TokenKind::Punctuation,
                ':' => {
                    if cur.peek() != Some('-') {
                        return Err(ParseDiagnostic::error("expected `:-`", line, column));
                    }
                    cur.bump();
                    lexeme.push('-');
                    TokenKind::Punctuation
                }
                '+' | '-' | '*' | '/' => TokenKind::Arithmetic,
                '=' => TokenKind::Comparison,
                '<' | '>' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        lexeme.push('=');
                    }
                    TokenKind::Comparison
                }
                '!' => {
                    if cur.peek() != Some('=') {
                        return Err(ParseDiagnostic::error("illegal character '!'", line, column));
                    }
                    cur.bump();
                    lexeme.push('=');
                    TokenKind::Comparison
                }
                other => {
                    return Err(ParseDiagnostic::error(format!("illegal character {other:?}"), line, column));
                }
            }
        };
        out.push(Token { kind, lexeme, line, column });
    }
    Ok(out)
}
