use super::SourceError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    Eq,
    Neq,
    Backslash,
    Dot,
    Colon,
    Define,
    Gt,
    LParen,
    RParen,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Tilde => "`~`".into(),
            TokenKind::Amp => "`&`".into(),
            TokenKind::Bar => "`|`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::DoubleArrow => "`<->`".into(),
            TokenKind::Eq => "`=`".into(),
            TokenKind::Neq => "`!=`".into(),
            TokenKind::Backslash => "`\\`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Define => "`:=`".into(),
            TokenKind::Gt => "`>`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, SourceError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let push = |out: &mut Vec<Token>, kind| out.push(Token { kind, line: tl, column: tc });
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump!();
            }
            continue;
        }
        if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                s.push(c);
                bump!();
            }
            push(&mut out, TokenKind::Ident(s));
            continue;
        }
        bump!();
        let kind = match c {
            '~' | '¬' => TokenKind::Tilde,
            '&' | '∧' => TokenKind::Amp,
            '|' | '∨' => TokenKind::Bar,
            '→' => TokenKind::Arrow,
            '↔' => TokenKind::DoubleArrow,
            '≠' => TokenKind::Neq,
            '\\' | 'λ' => TokenKind::Backslash,
            '.' => TokenKind::Dot,
            '>' => TokenKind::Gt,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '=' => TokenKind::Eq,
            '□' => TokenKind::Ident("box".into()),
            '◇' => TokenKind::Ident("dia".into()),
            '∀' => TokenKind::Ident("all".into()),
            '∃' => TokenKind::Ident("ex".into()),
            '⊤' => TokenKind::Ident("top".into()),
            '⊥' => TokenKind::Ident("bot".into()),
            '-' if chars.peek() == Some(&'>') => {
                bump!();
                TokenKind::Arrow
            }
            '<' if chars.peek() == Some(&'-') => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    TokenKind::DoubleArrow
                } else {
                    return Err(SourceError::syntax(tl, tc, "expected `<->`", vec!["`<->`".into()]));
                }
            }
            '!' if chars.peek() == Some(&'=') => {
                bump!();
                TokenKind::Neq
            }
            ':' if chars.peek() == Some(&'=') => {
                bump!();
                TokenKind::Define
            }
            ':' => TokenKind::Colon,
            other => {
                return Err(SourceError::syntax(tl, tc, format!("unexpected character `{other}`"), vec![]));
            }
        };
        push(&mut out, kind);
    }
    out.push(Token {
        kind: TokenKind::Eof,
        line,
        column,
    });
    Ok(out)
}
