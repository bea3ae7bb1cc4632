//! Recursive-descent parser. One token of lookahead everywhere; the only
//! wrinkle is `abs(a - b)`, where the `-` belongs to the syntax, so the
//! first operand is parsed with top-level `-` suppressed (parentheses
//! restore it).

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::lexer::{lex, Spanned, Tok};
use super::{check_well_formed, CmpOp, Expr, IndexExpr, ParseError, Vocabulary, RESERVED};
use crate::rat::Rational;

pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.chars().count(),
    };
    let e = p.expr(false)?;
    if let Some(t) = p.peek() {
        return Err(ParseError::Syntax {
            pos: t.pos,
            expected: format!("end of input, found {}", t.tok.describe()),
        });
    }
    check_well_formed(&e, vocab)?;
    Ok(e)
}

struct Parser {
    toks: Vec<Spanned>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.idx)
    }

    fn pos(&self) -> usize {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        let found = match self.peek() {
            Some(t) => format!(", found {}", t.tok.describe()),
            None => String::new(),
        };
        Err(ParseError::Syntax {
            pos: self.pos(),
            expected: format!("{expected}{found}"),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek().map(|t| &t.tok) == Some(&tok) {
            self.idx += 1;
            Ok(())
        } else {
            self.fail(expected)
        }
    }

    fn at_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Spanned { tok: Tok::Ident(n), .. }) if n == word)
    }

    fn take_ident(&mut self, expected: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Spanned {
                tok: Tok::Ident(n), ..
            }) => {
                let n = n.clone();
                self.idx += 1;
                Ok(n)
            }
            _ => self.fail(expected),
        }
    }

    fn take_plain_ident(&mut self, role: &str) -> Result<String, ParseError> {
        let pos = self.pos();
        let n = self.take_ident(role)?;
        if RESERVED.contains(&n.as_str()) {
            return Err(ParseError::Syntax {
                pos,
                expected: format!("{role}, found the reserved word `{n}`"),
            });
        }
        Ok(n)
    }

    fn expr(&mut self, stop_minus: bool) -> Result<Expr, ParseError> {
        if self.at_ident("forall") || self.at_ident("exists") {
            let universal = self.at_ident("forall");
            self.idx += 1;
            let var = self.take_plain_ident("a variable name")?;
            if !self.at_ident("in") {
                return self.fail("`in`");
            }
            self.idx += 1;
            let carrier = self.take_plain_ident("a carrier name")?;
            self.expect(Tok::Dot, "`.`")?;
            let body = self.expr(stop_minus)?;
            return Ok(if universal {
                Expr::Forall(var, carrier, Box::new(body))
            } else {
                Expr::Exists(var, carrier, Box::new(body))
            });
        }
        self.implication(stop_minus)
    }

    fn implication(&mut self, stop_minus: bool) -> Result<Expr, ParseError> {
        let lhs = self.disjunction(stop_minus)?;
        if self.peek().map(|t| &t.tok) == Some(&Tok::Arrow) {
            self.idx += 1;
            // Right-associative; a quantifier may follow the arrow
            // directly, its body extending to the far right.
            let rhs = self.expr(stop_minus)?;
            return Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self, stop_minus: bool) -> Result<Expr, ParseError> {
        let mut lhs = self.conjunction(stop_minus)?;
        while self.at_ident("or") {
            self.idx += 1;
            let rhs = self.conjunction(stop_minus)?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self, stop_minus: bool) -> Result<Expr, ParseError> {
        let mut lhs = self.negation(stop_minus)?;
        while self.at_ident("and") {
            self.idx += 1;
            let rhs = self.negation(stop_minus)?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn negation(&mut self, stop_minus: bool) -> Result<Expr, ParseError> {
        if self.at_ident("not") {
            self.idx += 1;
            let inner = self.negation(stop_minus)?;
            return Ok(Expr::Not(Box::new(inner)));
        }
        self.comparison(stop_minus)
    }

    fn comparison(&mut self, stop_minus: bool) -> Result<Expr, ParseError> {
        let lhs = self.sum(stop_minus)?;
        let op = match self.peek().map(|t| &t.tok) {
            Some(Tok::Lt) => Some(CmpOp::Lt),
            Some(Tok::Gt) => Some(CmpOp::Gt),
            Some(Tok::Eq) => Some(CmpOp::Eq),
            Some(Tok::Le) => Some(CmpOp::Le),
            Some(Tok::Ge) => Some(CmpOp::Ge),
            _ => None,
        };
        if let Some(op) = op {
            self.idx += 1;
            let rhs = self.sum(stop_minus)?;
            return Ok(Expr::Cmp(op, Box::new(lhs), Box::new(rhs)));
        }
        if self.at_ident("subset") {
            self.idx += 1;
            let rhs = self.sum(stop_minus)?;
            return Ok(Expr::SubsetOf(Box::new(lhs), Box::new(rhs)));
        }
        if self.at_ident("in") {
            self.idx += 1;
            let rhs = self.sum(stop_minus)?;
            return Ok(Expr::Member(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn sum(&mut self, stop_minus: bool) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) => {
                    self.idx += 1;
                    let rhs = self.term()?;
                    lhs = Expr::App(super::SYM_PLUS.to_string(), vec![lhs, rhs]);
                }
                Some(Tok::Minus) if !stop_minus => {
                    self.idx += 1;
                    let rhs = self.term()?;
                    lhs = Expr::App(super::SYM_MINUS.to_string(), vec![lhs, rhs]);
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Ident(name)) if name == "card" => {
                self.idx += 1;
                self.expect(Tok::LParen, "`(` after `card`")?;
                let inner = self.expr(false)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Card(Box::new(inner)))
            }
            Some(Tok::Ident(name)) if name == "abs" => {
                self.idx += 1;
                self.expect(Tok::LParen, "`(` after `abs`")?;
                let a = self.expr(true)?;
                self.expect(Tok::Minus, "`-` inside `abs(a - b)`")?;
                let b = self.expr(false)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::AbsDiff(Box::new(a), Box::new(b)))
            }
            Some(Tok::Ident(name)) => {
                if RESERVED.contains(&name.as_str()) {
                    return self.fail("an expression");
                }
                self.idx += 1;
                match self.peek().map(|t| &t.tok) {
                    Some(Tok::LParen) => {
                        self.idx += 1;
                        let mut args = vec![self.expr(false)?];
                        while self.peek().map(|t| &t.tok) == Some(&Tok::Comma) {
                            self.idx += 1;
                            args.push(self.expr(false)?);
                        }
                        self.expect(Tok::RParen, "`)` or `,`")?;
                        Ok(Expr::App(name, args))
                    }
                    Some(Tok::At) => {
                        self.idx += 1;
                        let index = self.index()?;
                        Ok(Expr::AtTime(name, index))
                    }
                    _ => Ok(Expr::Atom(name)),
                }
            }
            Some(Tok::Number(num, den)) => {
                self.idx += 1;
                self.rational(num, den, false)
            }
            Some(Tok::Minus) => {
                self.idx += 1;
                match self.peek().map(|t| t.tok.clone()) {
                    Some(Tok::Number(num, den)) => {
                        self.idx += 1;
                        self.rational(num, den, true)
                    }
                    _ => self.fail("a number after `-`"),
                }
            }
            Some(Tok::LParen) => {
                self.idx += 1;
                let inner = self.expr(false)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::LBrace) => {
                self.idx += 1;
                let mut elems = Vec::new();
                if self.peek().map(|t| &t.tok) != Some(&Tok::RBrace) {
                    elems.push(self.expr(false)?);
                    while self.peek().map(|t| &t.tok) == Some(&Tok::Comma) {
                        self.idx += 1;
                        elems.push(self.expr(false)?);
                    }
                }
                self.expect(Tok::RBrace, "`}` or `,`")?;
                Ok(Expr::SetLit(elems))
            }
            _ => self.fail("an expression"),
        }
    }

    fn rational(
        &self,
        num: BigInt,
        den: Option<BigInt>,
        negative: bool,
    ) -> Result<Expr, ParseError> {
        let den = den.unwrap_or_else(BigInt::one);
        if den.is_zero() {
            return Err(ParseError::Syntax {
                pos: self.toks[self.idx - 1].pos,
                expected: "a nonzero denominator".to_string(),
            });
        }
        let num = if negative { -num } else { num };
        Ok(Expr::Num(Rational::new(num, den)))
    }

    /// Index after `@`: bare `i` or a natural, or the parenthesized forms
    /// `(i)`, `(i+1)`, `(n)`. A bare `i+1` is not accepted because the `+`
    /// would be ambiguous with addition.
    fn index(&mut self) -> Result<IndexExpr, ParseError> {
        if self.peek().map(|t| &t.tok) == Some(&Tok::LParen) {
            self.idx += 1;
            let idx = if self.at_ident("i") {
                self.idx += 1;
                if self.peek().map(|t| &t.tok) == Some(&Tok::Plus) {
                    self.idx += 1;
                    match self.peek().map(|t| t.tok.clone()) {
                        Some(Tok::Number(n, None)) if n == BigInt::one() => {
                            self.idx += 1;
                            IndexExpr::Succ
                        }
                        _ => return self.fail("`1` (only `i` and `i+1` index forms exist)"),
                    }
                } else {
                    IndexExpr::Var
                }
            } else {
                IndexExpr::Lit(self.natural()?)
            };
            self.expect(Tok::RParen, "`)`")?;
            Ok(idx)
        } else if self.at_ident("i") {
            self.idx += 1;
            Ok(IndexExpr::Var)
        } else if matches!(self.peek(), Some(Spanned { tok: Tok::Number(_, None), .. })) {
            Ok(IndexExpr::Lit(self.natural()?))
        } else {
            self.fail("a time index: `i`, a natural number, or `(i+1)`")
        }
    }

    fn natural(&mut self) -> Result<u32, ParseError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Number(n, None)) => match n.to_u32() {
                Some(v) => {
                    self.idx += 1;
                    Ok(v)
                }
                None => self.fail("a time index that fits in 32 bits"),
            },
            _ => self.fail("a natural number"),
        }
    }
}
