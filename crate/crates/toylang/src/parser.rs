//! Lexer and recursive-descent parser for `.toy` sources.
//!
//! ```text
//! program   = { function } ;
//! function  = "fn" ident "(" [ ident { "," ident } ] ")" block ;
//! block     = "{" { stmt } "}" ;
//! stmt      = ident "=" expr ";"
//!           | ident "[" expr "]" "=" expr ";"
//!           | "if" "(" expr ")" block [ "else" block ]
//!           | "while" "(" expr ")" block
//!           | "return" expr ";"
//!           | block ;
//! expr      = or ;
//! or        = and { "||" and } ;
//! and       = equality { "&&" equality } ;
//! equality  = relation { ( "==" | "!=" ) relation } ;
//! relation  = additive { ( "<" | "<=" | ">" | ">=" ) additive } ;
//! additive  = term { ( "+" | "-" ) term } ;
//! term      = unary { ( "*" | "/" | "%" ) unary } ;
//! unary     = "-" unary | postfix ;
//! postfix   = int | ident | ident "[" expr "]" | ident "(" [ expr { "," expr } ] ")"
//!           | "(" expr ")" ;
//! ```
//!
//! `//` starts a comment running to the end of the line. A minus sign
//! directly in front of an integer literal is folded into the literal.

use crate::ast::{BinOp, Expr, Function, Program, Stmt, StmtId, StmtKind};
use crate::error::ParseError;

/// Nesting limit for blocks and expressions combined.
const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Fn,
    If,
    Else,
    While,
    Return,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Assign,
    Op(BinOp),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Fn => "`fn`".into(),
            Tok::If => "`if`".into(),
            Tok::Else => "`else`".into(),
            Tok::While => "`while`".into(),
            Tok::Return => "`return`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Assign => "`=`".into(),
            Tok::Op(op) => format!("`{}`", op.symbol()),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let peek = chars.get(i + 1).copied();

        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && peek == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i, &mut col);
            }
            continue;
        }

        let tok = if c.is_ascii_digit() {
            let mut value: u64 = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                let digit = chars[i] as u64 - '0' as u64;
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(digit))
                    .filter(|v| *v <= i64::MAX as u64 + 1)
                    .ok_or_else(|| ParseError::new(start_line, start_col, "integer literal out of range"))?;
                advance(1, &mut i, &mut col);
            }
            out.push(Token {
                tok: Tok::Int(value),
                line: start_line,
                col: start_col,
            });
            continue;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                word.push(chars[i]);
                advance(1, &mut i, &mut col);
            }
            let tok = match word.as_str() {
                "fn" => Tok::Fn,
                "if" => Tok::If,
                "else" => Tok::Else,
                "while" => Tok::While,
                "return" => Tok::Return,
                _ => Tok::Ident(word),
            };
            out.push(Token {
                tok,
                line: start_line,
                col: start_col,
            });
            continue;
        } else {
            let two: Option<BinOp> = peek.and_then(|p| BinOp::from_symbol(&format!("{c}{p}")));
            match (c, two) {
                (_, Some(op)) if matches!(op, BinOp::Le | BinOp::Ge | BinOp::Eq | BinOp::Ne | BinOp::And | BinOp::Or) => {
                    advance(2, &mut i, &mut col);
                    Tok::Op(op)
                }
                _ => {
                    let tok = match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        ',' => Tok::Comma,
                        ';' => Tok::Semi,
                        '=' => Tok::Assign,
                        '+' => Tok::Op(BinOp::Add),
                        '-' => Tok::Op(BinOp::Sub),
                        '*' => Tok::Op(BinOp::Mul),
                        '/' => Tok::Op(BinOp::Div),
                        '%' => Tok::Op(BinOp::Rem),
                        '<' => Tok::Op(BinOp::Lt),
                        '>' => Tok::Op(BinOp::Gt),
                        other => {
                            return Err(ParseError::new(
                                start_line,
                                start_col,
                                format!("unexpected character `{other}`"),
                            ))
                        }
                    };
                    advance(1, &mut i, &mut col);
                    tok
                }
            }
        };
        out.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

fn advance(n: usize, i: &mut usize, col: &mut usize) {
    *i += n;
    *col += n;
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let t = &self.tokens[self.pos];
        ParseError::new(t.line, t.col, message)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error_here(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error_here("nesting too deep"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn program(&mut self) -> Result<Vec<Function>, ParseError> {
        let mut functions: Vec<Function> = Vec::new();
        while *self.peek() != Tok::Eof {
            let (line, col) = (self.tokens[self.pos].line, self.tokens[self.pos].col);
            let f = self.function()?;
            if functions.iter().any(|g| g.name == f.name) {
                return Err(ParseError::new(line, col, format!("duplicate function `{}`", f.name)));
            }
            functions.push(f);
        }
        Ok(functions)
    }

    fn function(&mut self) -> Result<Function, ParseError> {
        self.expect(Tok::Fn)?;
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let p = self.ident()?;
                if params.contains(&p) {
                    return Err(self.error_here(format!("duplicate parameter `{p}`")));
                }
                params.push(p);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        let body = self.block()?;
        Ok(Function { name, params, body })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect(Tok::LBrace)?;
        self.enter()?;
        let mut body = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return Err(self.unexpected("`}`"));
            }
            body.push(self.stmt()?);
        }
        self.bump();
        self.leave();
        Ok(body)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let kind = match self.peek().clone() {
            Tok::If => {
                self.bump();
                let cond = self.paren_expr()?;
                let then_body = self.block()?;
                let else_body = if *self.peek() == Tok::Else {
                    self.bump();
                    Some(self.block()?)
                } else {
                    None
                };
                StmtKind::If {
                    cond,
                    then_body,
                    else_body,
                }
            }
            Tok::While => {
                self.bump();
                let cond = self.paren_expr()?;
                let body = self.block()?;
                StmtKind::While { cond, body }
            }
            Tok::Return => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Return(e)
            }
            Tok::LBrace => StmtKind::Block(self.block()?),
            Tok::Ident(name) => {
                self.bump();
                match self.peek() {
                    Tok::Assign => {
                        self.bump();
                        let value = self.expr()?;
                        self.expect(Tok::Semi)?;
                        StmtKind::Assign { var: name, value }
                    }
                    Tok::LBracket => {
                        self.bump();
                        let index = self.expr()?;
                        self.expect(Tok::RBracket)?;
                        self.expect(Tok::Assign)?;
                        let value = self.expr()?;
                        self.expect(Tok::Semi)?;
                        StmtKind::ArrayWrite {
                            array: name,
                            index,
                            value,
                        }
                    }
                    _ => return Err(self.unexpected("`=` or `[`")),
                }
            }
            _ => return Err(self.unexpected("statement")),
        };
        Ok(Stmt { id: StmtId(0), kind })
    }

    fn paren_expr(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen)?;
        let e = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let e = self.binary(1)?;
        self.leave();
        Ok(e)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        if min_prec > 6 {
            return self.unary();
        }
        let mut lhs = self.binary(min_prec + 1)?;
        loop {
            let op = match self.peek() {
                Tok::Op(op) if op.precedence() == min_prec => *op,
                _ => break,
            };
            self.bump();
            let rhs = self.binary(min_prec + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op(BinOp::Sub) {
            if let Tok::Int(v) = *self.peek_at(1) {
                self.bump();
                self.bump();
                return Ok(Expr::Int((v as i128).wrapping_neg() as i64));
            }
            self.bump();
            self.enter()?;
            let inner = self.unary()?;
            self.leave();
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                if v > i64::MAX as u64 {
                    return Err(self.error_here("integer literal out of range"));
                }
                self.bump();
                Ok(Expr::Int(v as i64))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match self.peek() {
                    Tok::LBracket => {
                        self.bump();
                        let index = self.expr()?;
                        self.expect(Tok::RBracket)?;
                        Ok(Expr::Index {
                            array: name,
                            index: Box::new(index),
                        })
                    }
                    Tok::LParen => {
                        self.bump();
                        let mut args = Vec::new();
                        if *self.peek() != Tok::RParen {
                            loop {
                                args.push(self.expr()?);
                                if *self.peek() == Tok::Comma {
                                    self.bump();
                                } else {
                                    break;
                                }
                            }
                        }
                        self.expect(Tok::RParen)?;
                        Ok(Expr::Call { name, args })
                    }
                    _ => Ok(Expr::Var(name)),
                }
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

/// Parses a whole program and assigns preorder statement ids from 1.
pub fn parse(source: &str) -> Result<Program, ParseError> {
    let mut p = Parser {
        tokens: lex(source)?,
        pos: 0,
        depth: 0,
    };
    let functions = p.program()?;
    Ok(Program::new(functions))
}

/// Parses a single expression; the whole input must be consumed.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        tokens: lex(source)?,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}
