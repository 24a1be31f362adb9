//! Canonical source rendering. Output re-parses to the same AST.

use std::fmt::{self, Write};

use crate::ast::{Expr, Function, Program, Stmt, StmtKind};

const INDENT: &str = "    ";

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary { op, .. } => op.precedence(),
        Expr::Neg(_) => 7,
        _ => 8,
    }
}

fn write_expr(out: &mut impl Write, e: &Expr) -> fmt::Result {
    match e {
        Expr::Int(v) => write!(out, "{v}"),
        Expr::Var(name) => out.write_str(name),
        Expr::Index { array, index } => {
            write!(out, "{array}[")?;
            write_expr(out, index)?;
            out.write_char(']')
        }
        Expr::Neg(inner) => {
            out.write_char('-')?;
            // `-(5)` must not collapse into the literal `-5`.
            if matches!(**inner, Expr::Int(_) | Expr::Binary { .. }) {
                out.write_char('(')?;
                write_expr(out, inner)?;
                out.write_char(')')
            } else {
                write_expr(out, inner)
            }
        }
        Expr::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            write_operand(out, lhs, expr_prec(lhs) < p)?;
            write!(out, " {} ", op.symbol())?;
            write_operand(out, rhs, expr_prec(rhs) <= p)
        }
        Expr::Call { name, args } => {
            write!(out, "{name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write_expr(out, a)?;
            }
            out.write_char(')')
        }
    }
}

fn write_operand(out: &mut impl Write, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        out.write_char('(')?;
        write_expr(out, e)?;
        out.write_char(')')
    } else {
        write_expr(out, e)
    }
}

fn write_block(out: &mut impl Write, body: &[Stmt], depth: usize) -> fmt::Result {
    out.write_str("{\n")?;
    for s in body {
        write_stmt(out, s, depth + 1)?;
    }
    for _ in 0..depth {
        out.write_str(INDENT)?;
    }
    out.write_char('}')
}

fn write_stmt(out: &mut impl Write, s: &Stmt, depth: usize) -> fmt::Result {
    for _ in 0..depth {
        out.write_str(INDENT)?;
    }
    match &s.kind {
        StmtKind::Assign { var, value } => {
            write!(out, "{var} = ")?;
            write_expr(out, value)?;
            out.write_char(';')?;
        }
        StmtKind::ArrayWrite {
            array,
            index,
            value,
        } => {
            write!(out, "{array}[")?;
            write_expr(out, index)?;
            out.write_str("] = ")?;
            write_expr(out, value)?;
            out.write_char(';')?;
        }
        StmtKind::If {
            cond,
            then_body,
            else_body,
        } => {
            out.write_str("if (")?;
            write_expr(out, cond)?;
            out.write_str(") ")?;
            write_block(out, then_body, depth)?;
            if let Some(else_body) = else_body {
                out.write_str(" else ")?;
                write_block(out, else_body, depth)?;
            }
        }
        StmtKind::While { cond, body } => {
            out.write_str("while (")?;
            write_expr(out, cond)?;
            out.write_str(") ")?;
            write_block(out, body, depth)?;
        }
        StmtKind::Return(e) => {
            out.write_str("return ")?;
            write_expr(out, e)?;
            out.write_char(';')?;
        }
        StmtKind::Block(body) => write_block(out, body, depth)?,
    }
    out.write_char('\n')
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

impl fmt::Display for Stmt {
    /// Renders the statement on its own, without a trailing newline.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_stmt(&mut s, self, 0)?;
        f.write_str(s.trim_end_matches('\n'))
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fn {}({}) ", self.name, self.params.join(", "))?;
        write_block(f, &self.body, 0)?;
        f.write_char('\n')
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, func) in self.functions.iter().enumerate() {
            if i > 0 {
                f.write_char('\n')?;
            }
            write!(f, "{func}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use crate::ast::{BinOp, Expr};
    use crate::{parse, parse_expr};

    #[test]
    fn layout() {
        let p = parse("fn f(a,n){ i=0; while(i<n){ if(a[i]==0){return i;}else{i=i+1;} } return -1; }").unwrap();
        let expected = "\
fn f(a, n) {
    i = 0;
    while (i < n) {
        if (a[i] == 0) {
            return i;
        } else {
            i = i + 1;
        }
    }
    return -1;
}
";
        assert_eq!(p.to_string(), expected);
    }

    #[test]
    fn minimal_parentheses() {
        for src in ["(a + b) * c", "a - (b - c)", "a - b - c", "-(a + b)", "-(3)", "x * -3", "(a || b) && c", "f(a, b[i + 1])"] {
            let e = parse_expr(src).unwrap();
            assert_eq!(e.to_string(), src);
        }
    }

    #[test]
    fn constructed_trees_round_trip() {
        let trees = [
            Expr::Neg(Box::new(Expr::Int(4))),
            Expr::Neg(Box::new(Expr::Int(-4))),
            Expr::binary(BinOp::Sub, Expr::var("x"), Expr::Int(-1)),
            Expr::binary(BinOp::Lt, Expr::binary(BinOp::Lt, Expr::var("a"), Expr::var("b")), Expr::var("c")),
            Expr::binary(BinOp::Lt, Expr::var("a"), Expr::binary(BinOp::Lt, Expr::var("b"), Expr::var("c"))),
            Expr::Neg(Box::new(Expr::Neg(Box::new(Expr::var("y"))))),
        ];
        for t in trees {
            assert_eq!(parse_expr(&t.to_string()).unwrap(), t, "{t}");
        }
    }
}
