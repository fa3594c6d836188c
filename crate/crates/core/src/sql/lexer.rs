use super::error::SqlError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// Identifier or keyword, as written.
    Word(String),
    Integer(String),
    Real(f64),
    Str(String),
    Comma,
    Dot,
    LParen,
    RParen,
    Star,
    Plus,
    Minus,
    Slash,
    Percent,
    Concat,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Semicolon,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub position: usize,
    pub text: String,
}

impl Token {
    pub fn is_word(&self, kw: &str) -> bool {
        matches!(&self.kind, TokenKind::Word(w) if w.eq_ignore_ascii_case(kw))
    }
}

fn syntax(position: usize, token: &str, message: &str) -> SqlError {
    SqlError::Syntax {
        position,
        token: token.to_string(),
        message: message.to_string(),
    }
}

pub fn tokenize(input: &str) -> Result<Vec<Token>, SqlError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'-' && bytes.get(i + 1) == Some(&b'-') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let kind = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            TokenKind::Word(input[start..i].to_string())
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut real = false;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                real = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    real = true;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                return Err(syntax(start, &input[start..=i], "malformed number"));
            }
            let text = &input[start..i];
            if real {
                let r: f64 = text
                    .parse()
                    .map_err(|_| syntax(start, text, "malformed number"))?;
                if !r.is_finite() {
                    return Err(syntax(start, text, "number out of range"));
                }
                TokenKind::Real(r)
            } else {
                TokenKind::Integer(text.to_string())
            }
        } else if c == b'\'' {
            let mut value = String::new();
            i += 1;
            loop {
                let Some(rel) = input[i..].find('\'') else {
                    return Err(syntax(start, &input[start..], "unterminated string literal"));
                };
                value.push_str(&input[i..i + rel]);
                i += rel + 1;
                if bytes.get(i) == Some(&b'\'') {
                    value.push('\'');
                    i += 1;
                } else {
                    break;
                }
            }
            TokenKind::Str(value)
        } else if c == b'"' || c == b'`' || c == b'[' {
            return Err(SqlError::unsupported("quoted identifier"));
        } else {
            let two = bytes.get(i + 1).copied();
            let (kind, len) = match (c, two) {
                (b'<', Some(b'=')) => (TokenKind::Le, 2),
                (b'>', Some(b'=')) => (TokenKind::Ge, 2),
                (b'<', Some(b'>')) | (b'!', Some(b'=')) => (TokenKind::Ne, 2),
                (b'=', Some(b'=')) => (TokenKind::Eq, 2),
                (b'|', Some(b'|')) => (TokenKind::Concat, 2),
                (b'=', _) => (TokenKind::Eq, 1),
                (b'<', _) => (TokenKind::Lt, 1),
                (b'>', _) => (TokenKind::Gt, 1),
                (b',', _) => (TokenKind::Comma, 1),
                (b'.', _) => (TokenKind::Dot, 1),
                (b'(', _) => (TokenKind::LParen, 1),
                (b')', _) => (TokenKind::RParen, 1),
                (b'*', _) => (TokenKind::Star, 1),
                (b'+', _) => (TokenKind::Plus, 1),
                (b'-', _) => (TokenKind::Minus, 1),
                (b'/', _) => (TokenKind::Slash, 1),
                (b'%', _) => (TokenKind::Percent, 1),
                (b';', _) => (TokenKind::Semicolon, 1),
                _ => {
                    let ch = input[i..].chars().next().unwrap_or('?');
                    return Err(syntax(i, &ch.to_string(), "unexpected character"));
                }
            };
            i += len;
            kind
        };
        tokens.push(Token {
            kind,
            position: start,
            text: input[start..i].to_string(),
        });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        position: input.len(),
        text: String::new(),
    });
    Ok(tokens)
}
