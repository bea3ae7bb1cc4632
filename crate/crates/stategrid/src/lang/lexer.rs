//! Tokenizer for the predicate language. Positions are character offsets
//! into the input, used verbatim in syntax errors.

use num_bigint::BigInt;

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Unsigned `p` or `p/q`; the sign is applied by the parser.
    Number(BigInt, Option<BigInt>),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    At,
    Plus,
    Minus,
    Arrow,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(n) => format!("`{n}`"),
            Tok::Number(_, _) => "a number".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Dot => "`.`".to_string(),
            Tok::At => "`@`".to_string(),
            Tok::Plus => "`+`".to_string(),
            Tok::Minus => "`-`".to_string(),
            Tok::Arrow => "`->`".to_string(),
            Tok::Lt => "`<`".to_string(),
            Tok::Gt => "`>`".to_string(),
            Tok::Le => "`<=`".to_string(),
            Tok::Ge => "`>=`".to_string(),
            Tok::Eq => "`=`".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub pos: usize,
}

pub fn lex(input: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        match c {
            _ if c.is_whitespace() => {
                i += 1;
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, pos });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, pos });
                i += 1;
            }
            '{' => {
                out.push(Spanned { tok: Tok::LBrace, pos });
                i += 1;
            }
            '}' => {
                out.push(Spanned { tok: Tok::RBrace, pos });
                i += 1;
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, pos });
                i += 1;
            }
            '.' => {
                out.push(Spanned { tok: Tok::Dot, pos });
                i += 1;
            }
            '@' => {
                out.push(Spanned { tok: Tok::At, pos });
                i += 1;
            }
            '+' => {
                out.push(Spanned { tok: Tok::Plus, pos });
                i += 1;
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    out.push(Spanned { tok: Tok::Arrow, pos });
                    i += 2;
                } else {
                    out.push(Spanned { tok: Tok::Minus, pos });
                    i += 1;
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    out.push(Spanned { tok: Tok::Le, pos });
                    i += 2;
                } else {
                    out.push(Spanned { tok: Tok::Lt, pos });
                    i += 1;
                }
            }
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    out.push(Spanned { tok: Tok::Ge, pos });
                    i += 2;
                } else {
                    out.push(Spanned { tok: Tok::Gt, pos });
                    i += 1;
                }
            }
            '=' => {
                out.push(Spanned { tok: Tok::Eq, pos });
                i += 1;
            }
            _ if c.is_ascii_digit() => {
                let num = read_digits(&chars, &mut i);
                // A slash glues a denominator only when digits follow
                // immediately; the language has no division operator.
                let den = if chars.get(i) == Some(&'/')
                    && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())
                {
                    i += 1;
                    Some(read_digits(&chars, &mut i))
                } else {
                    None
                };
                out.push(Spanned {
                    tok: Tok::Number(num, den),
                    pos,
                });
            }
            _ if c.is_alphabetic() || c == '_' => {
                let mut name = String::new();
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    name.push(chars[i]);
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(name),
                    pos,
                });
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos,
                    expected: format!("a token, found `{c}`"),
                });
            }
        }
    }
    Ok(out)
}

fn read_digits(chars: &[char], i: &mut usize) -> BigInt {
    let start = *i;
    while *i < chars.len() && chars[*i].is_ascii_digit() {
        *i += 1;
    }
    let text: String = chars[start..*i].iter().collect();
    text.parse().expect("digit run parses as an integer")
}
