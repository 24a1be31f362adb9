//! Static facts about statements and functions that the mutation
//! operators need: which names are arrays, where indexing happens, and
//! which expressions share a type.

use std::collections::BTreeSet;

use crate::ast::{BinOp, Expr, ExprPath, Function, Stmt, StmtKind, BUILTINS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ExprType {
    Bool,
    Int,
    Array,
}

/// Names used as arrays anywhere in the function: indexed, written
/// through, or passed to `len`.
pub(crate) fn array_names(func: &Function) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    for s in func.statements() {
        if let StmtKind::ArrayWrite { array, .. } = &s.kind {
            names.insert(array.clone());
        }
        for root in s.own_exprs() {
            root.visit(&mut |e| match e {
                Expr::Index { array, .. } => {
                    names.insert(array.clone());
                }
                Expr::Call { name, args } if name == "len" && args.len() == 1 => {
                    if let Expr::Var(v) = &args[0] {
                        names.insert(v.clone());
                    }
                }
                _ => {}
            });
        }
    }
    names
}

pub(crate) fn type_of(e: &Expr, arrays: &BTreeSet<String>) -> ExprType {
    match e {
        Expr::Var(v) if arrays.contains(v) => ExprType::Array,
        e if e.is_boolean() => ExprType::Bool,
        _ => ExprType::Int,
    }
}

/// An indexing site: the path of the index expression and the array it
/// indexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IndexSite {
    pub index: ExprPath,
    pub array: String,
}

pub(crate) fn index_sites(stmt: &Stmt) -> Vec<IndexSite> {
    let mut sites = Vec::new();
    if let StmtKind::ArrayWrite { array, .. } = &stmt.kind {
        sites.push(IndexSite {
            index: ExprPath(0),
            array: array.clone(),
        });
    }
    for (path, e) in stmt.expr_nodes() {
        if let Expr::Index { array, .. } = e {
            // The index child immediately follows its parent in preorder.
            sites.push(IndexSite {
                index: ExprPath(path.0 + 1),
                array: array.clone(),
            });
        }
    }
    sites
}

pub(crate) fn index_site(stmt: &Stmt, index: ExprPath) -> Option<IndexSite> {
    index_sites(stmt).into_iter().find(|s| s.index == index)
}

/// Operand paths of a loop condition's top-level comparison.
pub(crate) fn loop_bound_paths(stmt: &Stmt) -> Vec<ExprPath> {
    match &stmt.kind {
        StmtKind::While {
            cond: Expr::Binary { op, lhs, .. },
            ..
        } if op.is_comparison() => vec![ExprPath(1), ExprPath(1 + lhs.node_count() as u32)],
        _ => Vec::new(),
    }
}

fn push_unique(out: &mut Vec<String>, name: &str) {
    if !out.iter().any(|n| n == name) {
        out.push(name.to_string());
    }
}

/// Integer variables read by the statement's own expressions, in order of
/// first appearance.
pub(crate) fn int_vars_read(stmt: &Stmt, arrays: &BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::new();
    for root in stmt.own_exprs() {
        root.visit(&mut |e| {
            if let Expr::Var(v) = e {
                if !arrays.contains(v) {
                    push_unique(&mut out, v);
                }
            }
        });
    }
    out
}

/// Arrays the statement's own expressions touch.
pub(crate) fn arrays_used(stmt: &Stmt, arrays: &BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::new();
    if let StmtKind::ArrayWrite { array, .. } = &stmt.kind {
        push_unique(&mut out, array);
    }
    for root in stmt.own_exprs() {
        root.visit(&mut |e| match e {
            Expr::Index { array, .. } => push_unique(&mut out, array),
            Expr::Var(v) if arrays.contains(v) => push_unique(&mut out, v),
            _ => {}
        });
    }
    out
}

/// Scalar variables of the function: non-array parameters and every
/// assignment target, in order of first appearance.
pub(crate) fn int_vars(func: &Function, arrays: &BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::new();
    for p in &func.params {
        if !arrays.contains(p) {
            push_unique(&mut out, p);
        }
    }
    for s in func.statements() {
        if let StmtKind::Assign { var, .. } = &s.kind {
            push_unique(&mut out, var);
        }
    }
    out
}

/// Assignment targets only.
pub(crate) fn assigned_vars(func: &Function) -> Vec<String> {
    let mut out = Vec::new();
    for s in func.statements() {
        if let StmtKind::Assign { var, .. } = &s.kind {
            push_unique(&mut out, var);
        }
    }
    out
}

/// Distinct expression nodes of the function, in preorder of first
/// appearance.
pub(crate) fn expression_pool(func: &Function) -> Vec<Expr> {
    let mut pool: Vec<Expr> = Vec::new();
    for s in func.statements() {
        for root in s.own_exprs() {
            root.visit(&mut |e| {
                if !pool.contains(e) {
                    pool.push(e.clone());
                }
            });
        }
    }
    pool
}

/// Everything callable with its arity. User functions shadow builtins.
pub(crate) fn callables(functions: &[Function]) -> Vec<(String, usize)> {
    let mut out: Vec<(String, usize)> = functions.iter().map(|f| (f.name.clone(), f.params.len())).collect();
    for (name, arity) in BUILTINS {
        if !out.iter().any(|(n, _)| n == name) {
            out.push((name.to_string(), arity));
        }
    }
    out
}

/// `e + delta`, folding into an existing literal offset where possible.
pub(crate) fn offset(e: &Expr, delta: i64) -> Expr {
    let fold = |base: &Expr, k: i64| -> Option<Expr> {
        let net = k.checked_add(delta)?;
        Some(match net {
            0 => base.clone(),
            n if n > 0 => Expr::binary(BinOp::Add, base.clone(), Expr::Int(n)),
            n => Expr::binary(BinOp::Sub, base.clone(), Expr::Int(n.checked_neg()?)),
        })
    };
    let folded = match e {
        Expr::Int(k) => k.checked_add(delta).map(Expr::Int),
        Expr::Binary { op: BinOp::Add, lhs, rhs } => match rhs.as_ref() {
            Expr::Int(k) => fold(lhs, *k),
            _ => None,
        },
        Expr::Binary { op: BinOp::Sub, lhs, rhs } => match rhs.as_ref() {
            Expr::Int(k) => k.checked_neg().and_then(|k| fold(lhs, k)),
            _ => None,
        },
        _ => None,
    };
    folded.unwrap_or_else(|| {
        let op = if delta >= 0 { BinOp::Add } else { BinOp::Sub };
        Expr::binary(op, e.clone(), Expr::Int(delta.unsigned_abs() as i64))
    })
}

/// The logical negation of a condition.
pub(crate) fn negate(e: &Expr) -> Expr {
    match e {
        Expr::Binary { op, lhs, rhs } if op.negated().is_some() => Expr::Binary {
            op: op.negated().expect("comparison"),
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        },
        _ => Expr::binary(BinOp::Eq, e.clone(), Expr::Int(0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_expr;

    fn off(src: &str, d: i64) -> String {
        offset(&parse_expr(src).unwrap(), d).to_string()
    }

    #[test]
    fn offsets_fold() {
        assert_eq!(off("i", 1), "i + 1");
        assert_eq!(off("i", -1), "i - 1");
        assert_eq!(off("i + 1", -1), "i");
        assert_eq!(off("i - 1", -1), "i - 2");
        assert_eq!(off("len(a) - 1", 1), "len(a)");
        assert_eq!(off("4", -1), "3");
        assert_eq!(off("i * 2", 1), "i * 2 + 1");
    }

    #[test]
    fn negation() {
        assert_eq!(negate(&parse_expr("x < y").unwrap()).to_string(), "x >= y");
        assert_eq!(negate(&parse_expr("x && y").unwrap()).to_string(), "(x && y) == 0");
    }

    #[test]
    fn index_sites_cover_reads_and_writes() {
        let p = crate::parse("fn f(a, i) { a[i] = a[i + 1]; return 0; }").unwrap();
        let s = &p.functions[0].body[0];
        let sites = index_sites(s);
        assert_eq!(sites.len(), 2);
        assert_eq!(s.expr_at(sites[0].index).unwrap().to_string(), "i");
        assert_eq!(s.expr_at(sites[1].index).unwrap().to_string(), "i + 1");
    }
}
