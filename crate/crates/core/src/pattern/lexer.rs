use super::{PatternError, PatternErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    LBrace,
    RBrace,
    LParen,
    RParen,
    Lt,
    Gt,
    Colon,
    Comma,
    Ident(String),
    /// Regex body with `\/` already unescaped.
    Regex(String),
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub offset: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, PatternError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'<' => Tok::Lt,
            b'>' => Tok::Gt,
            b':' => Tok::Colon,
            b',' => Tok::Comma,
            b'/' => {
                let mut body = String::new();
                let mut j = i + 1;
                loop {
                    let Some(ch) = src[j..].chars().next() else {
                        return Err(PatternError::new(start, PatternErrorKind::UnterminatedRegex));
                    };
                    match ch {
                        '/' => break,
                        '\\' if src[j + 1..].starts_with('/') => {
                            body.push('/');
                            j += 2;
                        }
                        '\\' => {
                            body.push('\\');
                            j += 1;
                            if let Some(next) = src[j..].chars().next() {
                                body.push(next);
                                j += next.len_utf8();
                            }
                        }
                        _ => {
                            body.push(ch);
                            j += ch.len_utf8();
                        }
                    }
                }
                i = j + 1;
                out.push(Token {
                    tok: Tok::Regex(body),
                    offset: start,
                });
                continue;
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[i..j].to_string()),
                    offset: start,
                });
                i = j;
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(PatternError::new(start, PatternErrorKind::UnexpectedChar(ch)));
            }
        };
        out.push(Token { tok, offset: start });
        i += 1;
    }
    Ok(out)
}
