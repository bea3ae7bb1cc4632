//! Canonical printer. Emits the minimal-parenthesis form the parser
//! accepts, so `parse(print(e)) == e`; redundant parentheses in the input
//! therefore disappear on a print round trip.

use super::{Expr, IndexExpr, SYM_MINUS, SYM_PLUS};
use crate::rat::format_rational;

// Precedence levels, loosest to tightest. A child is parenthesized when
// its own level is below what its position requires.
const LVL_EXPR: u8 = 0;
const LVL_DISJ: u8 = 1;
const LVL_CONJ: u8 = 2;
const LVL_NEG: u8 = 3;
const LVL_CMP: u8 = 4;
const LVL_SUM: u8 = 5;
const LVL_TERM: u8 = 6;

pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, LVL_EXPR, &mut out);
    out
}

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Forall(_, _, _) | Expr::Exists(_, _, _) | Expr::Implies(_, _) => LVL_EXPR,
        Expr::Or(_, _) => LVL_DISJ,
        Expr::And(_, _) => LVL_CONJ,
        Expr::Not(_) => LVL_NEG,
        Expr::Cmp(_, _, _) | Expr::Member(_, _) | Expr::SubsetOf(_, _) => LVL_CMP,
        Expr::App(f, args) if args.len() == 2 && (f == SYM_PLUS || f == SYM_MINUS) => LVL_SUM,
        _ => LVL_TERM,
    }
}

fn write_expr(e: &Expr, required: u8, out: &mut String) {
    if level(e) < required {
        out.push('(');
        write_bare(e, out);
        out.push(')');
    } else {
        write_bare(e, out);
    }
}

fn write_bare(e: &Expr, out: &mut String) {
    match e {
        Expr::Atom(n) => out.push_str(n),
        Expr::Num(r) => out.push_str(&format_rational(r)),
        Expr::SetLit(es) => {
            out.push('{');
            for (k, x) in es.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_expr(x, LVL_EXPR, out);
            }
            out.push('}');
        }
        Expr::App(f, args) if args.len() == 2 && (f == SYM_PLUS || f == SYM_MINUS) => {
            write_expr(&args[0], LVL_SUM, out);
            out.push_str(if f == SYM_PLUS { " + " } else { " - " });
            write_expr(&args[1], LVL_TERM, out);
        }
        Expr::App(f, args) => {
            out.push_str(f);
            out.push('(');
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_expr(a, LVL_EXPR, out);
            }
            out.push(')');
        }
        Expr::Card(x) => {
            out.push_str("card(");
            write_expr(x, LVL_EXPR, out);
            out.push(')');
        }
        Expr::AbsDiff(a, b) => {
            // The first operand sits left of the structural `-`, so it is
            // kept at term level; a looser expression would leak its own
            // minus or comparison into the abs syntax.
            out.push_str("abs(");
            write_expr(a, LVL_TERM, out);
            out.push_str(" - ");
            write_expr(b, LVL_EXPR, out);
            out.push(')');
        }
        Expr::Cmp(op, l, r) => {
            write_expr(l, LVL_SUM, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(r, LVL_SUM, out);
        }
        Expr::Member(l, r) => {
            write_expr(l, LVL_SUM, out);
            out.push_str(" in ");
            write_expr(r, LVL_SUM, out);
        }
        Expr::SubsetOf(l, r) => {
            write_expr(l, LVL_SUM, out);
            out.push_str(" subset ");
            write_expr(r, LVL_SUM, out);
        }
        Expr::Not(x) => {
            out.push_str("not ");
            write_expr(x, LVL_NEG, out);
        }
        Expr::And(a, b) => {
            write_expr(a, LVL_CONJ, out);
            out.push_str(" and ");
            write_expr(b, LVL_NEG, out);
        }
        Expr::Or(a, b) => {
            write_expr(a, LVL_DISJ, out);
            out.push_str(" or ");
            write_expr(b, LVL_CONJ, out);
        }
        Expr::Implies(a, b) => {
            write_expr(a, LVL_DISJ, out);
            out.push_str(" -> ");
            write_expr(b, LVL_EXPR, out);
        }
        Expr::Forall(v, c, body) => {
            out.push_str("forall ");
            out.push_str(v);
            out.push_str(" in ");
            out.push_str(c);
            out.push_str(" . ");
            write_expr(body, LVL_EXPR, out);
        }
        Expr::Exists(v, c, body) => {
            out.push_str("exists ");
            out.push_str(v);
            out.push_str(" in ");
            out.push_str(c);
            out.push_str(" . ");
            write_expr(body, LVL_EXPR, out);
        }
        Expr::AtTime(family, idx) => {
            out.push_str(family);
            out.push('@');
            match idx {
                IndexExpr::Var => out.push('i'),
                IndexExpr::Succ => out.push_str("(i+1)"),
                IndexExpr::Lit(n) => out.push_str(&format!("({n})")),
            }
        }
    }
}
