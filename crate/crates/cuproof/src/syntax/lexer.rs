use std::fmt;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Lambda,
    Dot,
    Comma,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Bar,
    Colon,
    Arrow,
    Imp,
    And,
    Or,
    Neck,
    Equals,
    Star,
    Forall,
    Exists,
    Top,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Lambda => "`\\`",
            Tok::Dot => "`.`",
            Tok::Comma => "`,`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::Bar => "`|`",
            Tok::Colon => "`:`",
            Tok::Arrow => "`->`",
            Tok::Imp => "`=>`",
            Tok::And => "`/\\`",
            Tok::Or => "`\\/`",
            Tok::Neck => "`:-`",
            Tok::Equals => "`=`",
            Tok::Star => "`*`",
            Tok::Forall => "`forall`",
            Tok::Exists => "`exists`",
            Tok::Top => "`true`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub pragmas: Vec<String>,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Lexed, (Span, String)> {
    let mut tokens = Vec::new();
    let mut pragmas = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let span_at = |start: usize, end: usize, line: usize, line_start: usize| Span {
        start,
        end,
        line,
        col: src[line_start..start].chars().count() + 1,
    };
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c == '\n' {
            line += 1;
            line_start = pos + 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '%' {
            let end = src[pos..].find('\n').map(|k| pos + k).unwrap_or(src.len());
            if let Some(p) = src[pos..end].strip_prefix("%!") {
                pragmas.push(p.trim().to_string());
            }
            while i < chars.len() && chars[i].0 < end {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).map(|x| x.1);
        let two = |a: char, b: char| c == a && next == Some(b);
        let (tok, len) = if two('-', '>') {
            (Tok::Arrow, 2)
        } else if two('=', '>') {
            (Tok::Imp, 2)
        } else if two('/', '\\') {
            (Tok::And, 2)
        } else if two('\\', '/') {
            (Tok::Or, 2)
        } else if two(':', '-') {
            (Tok::Neck, 2)
        } else {
            match c {
                '\\' | 'λ' => (Tok::Lambda, 1),
                '.' => (Tok::Dot, 1),
                ',' => (Tok::Comma, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBrack, 1),
                ']' => (Tok::RBrack, 1),
                '|' => (Tok::Bar, 1),
                ':' => (Tok::Colon, 1),
                '=' => (Tok::Equals, 1),
                '*' | '⋆' => (Tok::Star, 1),
                '→' => (Tok::Arrow, 1),
                '⊃' => (Tok::Imp, 1),
                '∧' | '&' => (Tok::And, 1),
                '∨' => (Tok::Or, 1),
                '∀' => (Tok::Forall, 1),
                '∃' => (Tok::Exists, 1),
                '⊤' => (Tok::Top, 1),
                '⋄' => {
                    return Err((
                        span_at(pos, pos + c.len_utf8(), line, line_start),
                        "`⋄` is reserved for snapshots".into(),
                    ))
                }
                c if is_ident_char(c) => {
                    let mut j = i;
                    while j < chars.len() && is_ident_char(chars[j].1) {
                        j += 1;
                    }
                    let end = chars.get(j).map(|x| x.0).unwrap_or(src.len());
                    let word = &src[pos..end];
                    let tok = match word {
                        "forall" => Tok::Forall,
                        "exists" => Tok::Exists,
                        "true" => Tok::Top,
                        _ => Tok::Ident(word.to_string()),
                    };
                    tokens.push(Token {
                        tok,
                        span: span_at(pos, end, line, line_start),
                    });
                    i = j;
                    continue;
                }
                other => {
                    return Err((
                        span_at(pos, pos + other.len_utf8(), line, line_start),
                        format!("unexpected character `{other}`"),
                    ))
                }
            }
        };
        let end = chars.get(i + len).map(|x| x.0).unwrap_or(src.len());
        tokens.push(Token {
            tok,
            span: span_at(pos, end, line, line_start),
        });
        i += len;
    }
    let end = src.len();
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span {
            start: end,
            end,
            line,
            col: src[line_start..].chars().count() + 1,
        },
    });
    Ok(Lexed { tokens, pragmas })
}
