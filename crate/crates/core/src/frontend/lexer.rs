//! Java tokenizer.
//!
//! Comments and whitespace are dropped. `>` is always emitted on its own so
//! that nested generic closers (`List<List<T>>`) need no splitting; the
//! expression parser re-joins adjacent `>` tokens into shift operators.

use super::FrontendError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Literal,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the first character.
    pub line: u32,
    /// 1-based line of the last character; differs from `line` only for
    /// text blocks.
    pub end_line: u32,
    /// Byte offset of the first character.
    pub offset: usize,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text && self.kind != TokenKind::Literal
    }
}

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null",
];

// Longest first so the first prefix match is the maximal munch.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "<<", "+", "-", "*", "/", "%", "=", "<", ">", "!", "~",
    "?", ":", "&", "|", "^",
];

const PUNCTUATION: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.', '@'];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    tokens: Vec<Token>,
}

/// Split `source` into tokens, dropping comments and whitespace.
pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    let mut lx = Lexer {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        line: 1,
        tokens: Vec::new(),
    };
    lx.run()?;
    Ok(lx.tokens)
}

impl<'a> Lexer<'a> {
    fn peek(&self, ahead: usize) -> Option<u8> {
        self.bytes.get(self.pos + ahead).copied()
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: u32) {
        self.tokens.push(Token {
            kind,
            text: self.src[start..self.pos].to_string(),
            line,
            end_line: self.line,
            offset: start,
        });
    }

    fn run(&mut self) -> Result<(), FrontendError> {
        while let Some(b) = self.peek(0) {
            match b {
                b'\n' => {
                    self.line += 1;
                    self.pos += 1;
                }
                b' ' | b'\t' | b'\r' | 0x0c => self.pos += 1,
                b'/' if self.peek(1) == Some(b'/') => {
                    while let Some(c) = self.peek(0) {
                        if c == b'\n' {
                            break;
                        }
                        self.pos += 1;
                    }
                }
                b'/' if self.peek(1) == Some(b'*') => self.block_comment()?,
                b'"' => self.string()?,
                b'\'' => self.char_lit()?,
                b'0'..=b'9' => self.number(),
                b'.' if matches!(self.peek(1), Some(b'0'..=b'9')) => self.number(),
                _ => {
                    let c = self.src[self.pos..].chars().next().unwrap_or('\0');
                    if c.is_alphabetic() || c == '_' || c == '$' {
                        self.ident();
                    } else if PUNCTUATION.contains(&c) && !self.src[self.pos..].starts_with("...")
                    {
                        let start = self.pos;
                        self.pos += 1;
                        self.push(TokenKind::Punctuation, start, self.line);
                    } else if let Some(op) =
                        OPERATORS.iter().find(|op| self.src[self.pos..].starts_with(**op))
                    {
                        let start = self.pos;
                        self.pos += op.len();
                        self.push(TokenKind::Operator, start, self.line);
                    } else if c.is_whitespace() {
                        self.pos += c.len_utf8();
                    } else {
                        return Err(FrontendError::Lexical {
                            line: self.line,
                            message: format!("unexpected character {c:?}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn block_comment(&mut self) -> Result<(), FrontendError> {
        let start_line = self.line;
        self.pos += 2;
        loop {
            match self.peek(0) {
                None => {
                    return Err(FrontendError::Lexical {
                        line: start_line,
                        message: "unterminated comment".into(),
                    })
                }
                Some(b'*') if self.peek(1) == Some(b'/') => {
                    self.pos += 2;
                    return Ok(());
                }
                Some(b'\n') => {
                    self.line += 1;
                    self.pos += 1;
                }
                Some(_) => self.pos += 1,
            }
        }
    }

    fn string(&mut self) -> Result<(), FrontendError> {
        let start = self.pos;
        let line = self.line;
        if self.src[self.pos..].starts_with("\"\"\"") {
            self.pos += 3;
            loop {
                match self.peek(0) {
                    None => {
                        return Err(FrontendError::Lexical {
                            line,
                            message: "unterminated text block".into(),
                        })
                    }
                    Some(b'\\') => {
                        if self.peek(1) == Some(b'\n') {
                            self.line += 1;
                        }
                        self.pos += 2;
                    }
                    Some(b'"') if self.src[self.pos..].starts_with("\"\"\"") => {
                        self.pos += 3;
                        break;
                    }
                    Some(b'\n') => {
                        self.line += 1;
                        self.pos += 1;
                    }
                    Some(_) => self.pos += 1,
                }
            }
            self.pos = self.pos.min(self.bytes.len());
            self.push(TokenKind::Literal, start, line);
            return Ok(());
        }
        self.quoted(b'"', "string")?;
        self.push(TokenKind::Literal, start, line);
        Ok(())
    }

    fn char_lit(&mut self) -> Result<(), FrontendError> {
        let start = self.pos;
        let line = self.line;
        self.quoted(b'\'', "character literal")?;
        self.push(TokenKind::Literal, start, line);
        Ok(())
    }

    fn quoted(&mut self, quote: u8, what: &str) -> Result<(), FrontendError> {
        self.pos += 1;
        loop {
            match self.peek(0) {
                None | Some(b'\n') => {
                    return Err(FrontendError::Lexical {
                        line: self.line,
                        message: format!("unterminated {what}"),
                    })
                }
                Some(b'\\') => {
                    if self.peek(1).is_none() || self.peek(1) == Some(b'\n') {
                        self.pos += 1;
                    } else {
                        self.pos += 2;
                    }
                }
                Some(c) if c == quote => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(_) => self.pos += 1,
            }
        }
    }

    fn number(&mut self) {
        let start = self.pos;
        let line = self.line;
        let hex = self.src[start..].starts_with("0x") || self.src[start..].starts_with("0X");
        let mut prev = 0u8;
        while let Some(c) = self.peek(0) {
            let sign = (c == b'+' || c == b'-')
                && (matches!(prev, b'p' | b'P') || (!hex && matches!(prev, b'e' | b'E')));
            if !(c.is_ascii_alphanumeric() || c == b'_' || c == b'.' || sign) {
                break;
            }
            prev = c;
            self.pos += 1;
        }
        self.push(TokenKind::Literal, start, line);
    }

    fn ident(&mut self) {
        let start = self.pos;
        let line = self.line;
        for (i, c) in self.src[start..].char_indices() {
            if c.is_alphanumeric() || c == '_' || c == '$' {
                continue;
            }
            self.pos = start + i;
            break;
        }
        if self.pos == start {
            self.pos = self.src.len();
        }
        let text = &self.src[start..self.pos];
        let kind = if text == "true" || text == "false" || text == "null" {
            TokenKind::Literal
        } else if is_keyword(text) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
        self.push(kind, start, line);
    }
}

/// Count of distinct lines that carry at least one token.
pub fn token_lines(tokens: &[Token]) -> u32 {
    let mut count = 0u32;
    let mut last = 0u32;
    for t in tokens {
        let first = t.line.max(last + 1);
        if t.end_line >= first {
            count += t.end_line - first + 1;
            last = t.end_line;
        }
    }
    count
}
