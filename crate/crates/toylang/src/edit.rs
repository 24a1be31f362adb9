//! Edits and their application.
//!
//! An [`Edit`] names its target by [`StmtId`], so an edit list minted
//! against one program can be replayed on the same lineage in order.
//! Application is total: an edit whose target, donor or expression path no
//! longer exists leaves the program unchanged and is counted as a no-op.
//!
//! Text form, one edit per line:
//!
//! ```text
//! StmtReplace @12 donor=9
//! OffByOne @5 path=2 delta=-1
//! ExprAdd @4 path=0 op=&& expr=i < len(a)
//! ```
//!
//! `expr=` is always the last field and takes the rest of the line.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ast::{BinOp, Expr, ExprPath, Program, Stmt, StmtId, StmtKind};
use crate::operators::MutationOperator;
use crate::parser::parse_expr;
use crate::scope::{index_site, negate, offset};

/// Which operand of a logical operator survives `ExprRemove`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Operator-specific data carried by an edit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Payload {
    None,
    Donor(StmtId),
    Path(ExprPath),
    Delta { path: ExprPath, delta: i64 },
    Expr { path: ExprPath, expr: Expr },
    Junction { path: ExprPath, op: BinOp, expr: Expr },
    Keep { path: ExprPath, side: Side },
    Callee { path: ExprPath, name: String },
    Var(String),
    Init { var: String, value: i64 },
    Value(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edit {
    pub operator: MutationOperator,
    pub target: StmtId,
    pub payload: Payload,
}

/// Result of applying one or more edits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applied {
    pub program: Program,
    /// Edits that found nothing to act on.
    pub noops: usize,
}

impl Applied {
    pub fn is_noop(&self) -> bool {
        self.noops > 0
    }
}

/// Applies `edit` to a copy of `program`.
pub fn apply_edit(program: &Program, edit: &Edit) -> Applied {
    apply_edits(program, std::slice::from_ref(edit))
}

/// Applies `edits` in order to a copy of `program`.
pub fn apply_edits(program: &Program, edits: &[Edit]) -> Applied {
    let mut out = program.clone();
    let noops = edits.iter().filter(|e| !apply_in_place(&mut out, e)).count();
    Applied { program: out, noops }
}

fn if_stmt(p: &mut Program, cond: Expr, body: Vec<Stmt>) -> Stmt {
    p.new_stmt(StmtKind::If {
        cond,
        then_body: body,
        else_body: None,
    })
}

fn assign(p: &mut Program, var: &str, value: Expr) -> Stmt {
    p.new_stmt(StmtKind::Assign {
        var: var.to_string(),
        value,
    })
}

fn len_of(array: &str) -> Expr {
    Expr::call("len", vec![Expr::var(array)])
}

fn wrap(p: &mut Program, target: StmtId, cond: Expr) -> bool {
    let guard = if_stmt(p, cond, Vec::new());
    let Some((block, pos)) = p.locate_mut(target) else {
        return false;
    };
    let inner = std::mem::replace(&mut block[pos], guard);
    if let StmtKind::If { then_body, .. } = &mut block[pos].kind {
        then_body.push(inner);
    }
    true
}

fn insert(p: &mut Program, target: StmtId, stmt: Stmt, after: bool) -> bool {
    let Some((block, pos)) = p.locate_mut(target) else {
        return false;
    };
    block.insert(if after { pos + 1 } else { pos }, stmt);
    true
}

/// Rewrites the expression at `path` of `target`; `f` returns `None` when
/// the node does not fit the edit.
fn rewrite(p: &mut Program, target: StmtId, path: ExprPath, f: impl FnOnce(&Expr) -> Option<Expr>) -> bool {
    let Some(node) = p.find_mut(target).and_then(|s| s.expr_at_mut(path)) else {
        return false;
    };
    match f(node) {
        Some(new) if new != *node => {
            *node = new;
            true
        }
        _ => false,
    }
}

fn apply_in_place(p: &mut Program, edit: &Edit) -> bool {
    use MutationOperator as Op;
    let t = edit.target;
    let Some(target) = p.find(t).cloned() else {
        return false;
    };
    match (edit.operator, &edit.payload) {
        (Op::StmtAppend, Payload::Donor(d)) => {
            let Some(donor) = p.find(*d).cloned() else {
                return false;
            };
            let copy = p.fresh_copy(&donor);
            insert(p, t, copy, true)
        }
        (Op::StmtReplace, Payload::Donor(d)) if *d != t => {
            let Some(donor) = p.find(*d).cloned() else {
                return false;
            };
            let copy = p.fresh_copy(&donor);
            let Some((block, pos)) = p.locate_mut(t) else {
                return false;
            };
            block[pos] = copy;
            true
        }
        (Op::StmtDelete, Payload::None) => {
            let Some((block, pos)) = p.locate_mut(t) else {
                return false;
            };
            block.remove(pos);
            true
        }
        (Op::StmtSwap, Payload::None) => {
            let Some((block, pos)) = p.locate_mut(t) else {
                return false;
            };
            if pos + 1 >= block.len() {
                return false;
            }
            block.swap(pos, pos + 1);
            true
        }
        (Op::GuardInsert, Payload::Var(v)) => {
            let cond = Expr::binary(BinOp::Ne, Expr::var(v), Expr::Int(0));
            wrap(p, t, cond)
        }
        (Op::SizeCheckInsert, Payload::Var(a)) => {
            let cond = Expr::binary(BinOp::Gt, len_of(a), Expr::Int(0));
            wrap(p, t, cond)
        }
        (Op::RangeCheckInsert, Payload::Path(path)) => {
            let Some(site) = index_site(&target, *path) else {
                return false;
            };
            let idx = target.expr_at(site.index).cloned().expect("index site path resolves");
            let cond = Expr::binary(
                BinOp::And,
                Expr::binary(BinOp::Ge, idx.clone(), Expr::Int(0)),
                Expr::binary(BinOp::Lt, idx, len_of(&site.array)),
            );
            wrap(p, t, cond)
        }
        (Op::LowerBoundClamp, Payload::Var(v)) => {
            let reset = assign(p, v, Expr::Int(0));
            let clamp = if_stmt(p, Expr::binary(BinOp::Lt, Expr::var(v), Expr::Int(0)), vec![reset]);
            insert(p, t, clamp, false)
        }
        (Op::UpperBoundClamp, Payload::Path(path)) => {
            let Some(site) = index_site(&target, *path) else {
                return false;
            };
            let Some(Expr::Var(v)) = target.expr_at(site.index).cloned() else {
                return false;
            };
            let last = Expr::binary(BinOp::Sub, len_of(&site.array), Expr::Int(1));
            let reset = assign(p, &v, last.clone());
            let clamp = if_stmt(p, Expr::binary(BinOp::Gt, Expr::var(&v), last), vec![reset]);
            insert(p, t, clamp, false)
        }
        (Op::VarInitInsert, Payload::Init { var, value }) => {
            let init = assign(p, var, Expr::Int(*value));
            insert(p, t, init, false)
        }
        (Op::DefaultReturnInsert, Payload::Value(e)) => {
            let ret = p.new_stmt(StmtKind::Return(e.clone()));
            insert(p, t, ret, true)
        }
        (Op::OffByOne, Payload::Delta { path, delta }) => rewrite(p, t, *path, |e| Some(offset(e, *delta))),
        (Op::ConstPerturb, Payload::Delta { path, delta }) => rewrite(p, t, *path, |e| match e {
            Expr::Int(k) => k.checked_add(*delta).map(Expr::Int),
            _ => None,
        }),
        (Op::NegateCondition, Payload::Path(path)) => rewrite(p, t, *path, |e| Some(negate(e))),
        (Op::FuncCallSwap, Payload::Callee { path, name }) => rewrite(p, t, *path, |e| match e {
            Expr::Call { args, .. } => Some(Expr::Call {
                name: name.clone(),
                args: args.clone(),
            }),
            _ => None,
        }),
        (Op::ExprReplace, Payload::Expr { path, expr }) => rewrite(p, t, *path, |_| Some(expr.clone())),
        (Op::ExprAdd, Payload::Junction { path, op, expr }) if op.is_logical() => {
            rewrite(p, t, *path, |e| Some(Expr::binary(*op, e.clone(), expr.clone())))
        }
        (Op::ExprRemove, Payload::Keep { path, side }) => rewrite(p, t, *path, |e| match e {
            Expr::Binary { op, lhs, rhs } if op.is_logical() => Some(match side {
                Side::Left => lhs.as_ref().clone(),
                Side::Right => rhs.as_ref().clone(),
            }),
            _ => None,
        }),
        _ => false,
    }
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @{}", self.operator, self.target)?;
        match &self.payload {
            Payload::None => Ok(()),
            Payload::Donor(d) => write!(f, " donor={d}"),
            Payload::Path(p) => write!(f, " path={p}"),
            Payload::Delta { path, delta } => write!(f, " path={path} delta={delta}"),
            Payload::Expr { path, expr } => write!(f, " path={path} expr={expr}"),
            Payload::Junction { path, op, expr } => write!(f, " path={path} op={} expr={expr}", op.symbol()),
            Payload::Keep { path, side } => {
                let side = match side {
                    Side::Left => "left",
                    Side::Right => "right",
                };
                write!(f, " path={path} keep={side}")
            }
            Payload::Callee { path, name } => write!(f, " path={path} callee={name}"),
            Payload::Var(v) => write!(f, " var={v}"),
            Payload::Init { var, value } => write!(f, " var={var} value={value}"),
            Payload::Value(e) => write!(f, " expr={e}"),
        }
    }
}

/// Error text for a single edit line; the patch reader adds line numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditSyntaxError(pub String);

impl fmt::Display for EditSyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for EditSyntaxError {}

struct Fields {
    map: BTreeMap<String, String>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Result<String, EditSyntaxError> {
        self.map
            .remove(key)
            .ok_or_else(|| EditSyntaxError(format!("missing `{key}=`")))
    }

    fn num<T: FromStr>(&mut self, key: &str) -> Result<T, EditSyntaxError> {
        let raw = self.take(key)?;
        raw.parse()
            .map_err(|_| EditSyntaxError(format!("bad value `{raw}` for `{key}`")))
    }

    fn path(&mut self) -> Result<ExprPath, EditSyntaxError> {
        self.num("path").map(ExprPath)
    }

    fn expr(&mut self) -> Result<Expr, EditSyntaxError> {
        let raw = self.take("expr")?;
        parse_expr(&raw).map_err(|e| EditSyntaxError(format!("bad expression `{raw}`: {e}")))
    }

    fn ident(&mut self, key: &str) -> Result<String, EditSyntaxError> {
        let raw = self.take(key)?;
        let mut chars = raw.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(raw)
        } else {
            Err(EditSyntaxError(format!("bad identifier `{raw}` for `{key}`")))
        }
    }

    fn finish(self) -> Result<(), EditSyntaxError> {
        match self.map.keys().next() {
            Some(k) => Err(EditSyntaxError(format!("unexpected field `{k}`"))),
            None => Ok(()),
        }
    }
}

impl FromStr for Edit {
    type Err = EditSyntaxError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        use MutationOperator as Op;
        let line = line.trim();
        let (head, expr_text) = match line.find(" expr=") {
            Some(at) => (&line[..at], Some(line[at + " expr=".len()..].trim())),
            None => (line, None),
        };
        let mut tokens = head.split_whitespace();
        let operator: MutationOperator = tokens
            .next()
            .ok_or_else(|| EditSyntaxError("empty edit".into()))?
            .parse()
            .map_err(EditSyntaxError)?;
        let target = tokens
            .next()
            .and_then(|t| t.strip_prefix('@'))
            .and_then(|t| t.parse::<u32>().ok())
            .map(StmtId)
            .ok_or_else(|| EditSyntaxError("expected `@<statement id>` after the operator".into()))?;
        let mut map = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| EditSyntaxError(format!("expected `key=value`, found `{tok}`")))?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(EditSyntaxError(format!("duplicate field `{k}`")));
            }
        }
        if let Some(e) = expr_text {
            map.insert("expr".to_string(), e.to_string());
        }
        let mut fields = Fields { map };

        let payload = match operator {
            Op::StmtDelete | Op::StmtSwap => Payload::None,
            Op::StmtAppend | Op::StmtReplace => Payload::Donor(StmtId(fields.num("donor")?)),
            Op::RangeCheckInsert | Op::UpperBoundClamp | Op::NegateCondition => Payload::Path(fields.path()?),
            Op::OffByOne | Op::ConstPerturb => Payload::Delta {
                path: fields.path()?,
                delta: fields.num("delta")?,
            },
            Op::ExprReplace => Payload::Expr {
                path: fields.path()?,
                expr: fields.expr()?,
            },
            Op::ExprAdd => {
                let path = fields.path()?;
                let raw = fields.take("op")?;
                let op = BinOp::from_symbol(&raw)
                    .filter(|op| op.is_logical())
                    .ok_or_else(|| EditSyntaxError(format!("`op` must be `&&` or `||`, found `{raw}`")))?;
                Payload::Junction {
                    path,
                    op,
                    expr: fields.expr()?,
                }
            }
            Op::ExprRemove => {
                let path = fields.path()?;
                let side = match fields.take("keep")?.as_str() {
                    "left" => Side::Left,
                    "right" => Side::Right,
                    other => return Err(EditSyntaxError(format!("`keep` must be left or right, found `{other}`"))),
                };
                Payload::Keep { path, side }
            }
            Op::FuncCallSwap => Payload::Callee {
                path: fields.path()?,
                name: fields.ident("callee")?,
            },
            Op::GuardInsert | Op::SizeCheckInsert | Op::LowerBoundClamp => Payload::Var(fields.ident("var")?),
            Op::VarInitInsert => Payload::Init {
                var: fields.ident("var")?,
                value: fields.num("value")?,
            },
            Op::DefaultReturnInsert => Payload::Value(fields.expr()?),
        };
        fields.finish()?;
        Ok(Edit {
            operator,
            target,
            payload,
        })
    }
}
