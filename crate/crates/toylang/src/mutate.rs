//! Minting edits.
//!
//! For a given operator and statement, [`options`] lists every concrete
//! edit the operator could make there. [`mint_edit`] draws a target
//! statement by suspiciousness weight among those with at least one
//! option, then an option uniformly. [`enumerate_single_edits`] walks the
//! same option lists exhaustively.

use rand::Rng;
use thiserror::Error;

use crate::ast::{BinOp, Expr, ExprPath, Program, StmtId, StmtKind};
use crate::edit::{Edit, Payload, Side};
use crate::localize::SuspiciousnessMap;
use crate::operators::MutationOperator;
use crate::scope::{
    array_names, arrays_used, assigned_vars, callables, expression_pool, index_sites, int_vars, int_vars_read,
    loop_bound_paths, type_of,
};

/// The operator has nothing to act on at any suspicious statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{0} is inapplicable to every suspicious statement")]
pub struct Inapplicable(pub MutationOperator);

/// Every edit `op` can make at `target` in `program`, in a fixed order.
pub fn options(op: MutationOperator, program: &Program, target: StmtId) -> Vec<Edit> {
    use MutationOperator as Op;
    let Some(fi) = program.function_of(target) else {
        return Vec::new();
    };
    let func = &program.functions[fi];
    let stmt = program.find(target).expect("function_of found it");
    let arrays = array_names(func);
    let make = |payload: Payload| Edit {
        operator: op,
        target,
        payload,
    };
    let deltas = |path: ExprPath| [1, -1].map(|delta| Payload::Delta { path, delta });

    let payloads: Vec<Payload> = match op {
        Op::StmtAppend => func.statements().iter().map(|s| Payload::Donor(s.id)).collect(),
        Op::StmtReplace => func
            .statements()
            .iter()
            .filter(|s| s.id != target && s.kind != stmt.kind)
            .map(|s| Payload::Donor(s.id))
            .collect(),
        Op::StmtDelete => vec![Payload::None],
        Op::StmtSwap => {
            let block = func
                .statements()
                .into_iter()
                .flat_map(|s| s.child_blocks())
                .chain(std::iter::once(&func.body))
                .find(|b| b.iter().any(|s| s.id == target))
                .expect("target lives in some block");
            let pos = block.iter().position(|s| s.id == target).expect("present");
            match block.get(pos + 1) {
                Some(next) if next.kind != stmt.kind => vec![Payload::None],
                _ => Vec::new(),
            }
        }
        Op::FuncCallSwap => {
            let all = callables(&program.functions);
            let mut out = Vec::new();
            for (path, e) in stmt.expr_nodes() {
                if let Expr::Call { name, args } = e {
                    for (callee, arity) in &all {
                        if callee != name && *arity == args.len() {
                            out.push(Payload::Callee {
                                path,
                                name: callee.clone(),
                            });
                        }
                    }
                }
            }
            out
        }
        Op::ExprReplace => {
            let pool = expression_pool(func);
            let mut out = Vec::new();
            for (path, e) in stmt.expr_nodes() {
                let ty = type_of(e, &arrays);
                for donor in &pool {
                    if donor != e && type_of(donor, &arrays) == ty {
                        out.push(Payload::Expr {
                            path,
                            expr: donor.clone(),
                        });
                    }
                }
            }
            out
        }
        Op::ExprAdd => match &stmt.kind {
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => {
                let pool = expression_pool(func);
                let mut out = Vec::new();
                for op in [BinOp::And, BinOp::Or] {
                    for donor in pool.iter().filter(|d| d.is_boolean() && *d != cond) {
                        out.push(Payload::Junction {
                            path: ExprPath(0),
                            op,
                            expr: donor.clone(),
                        });
                    }
                }
                out
            }
            _ => Vec::new(),
        },
        Op::ExprRemove => stmt
            .expr_nodes()
            .into_iter()
            .filter(|(_, e)| matches!(e, Expr::Binary { op, .. } if op.is_logical()))
            .flat_map(|(path, _)| [Side::Left, Side::Right].map(|side| Payload::Keep { path, side }))
            .collect(),
        Op::GuardInsert | Op::LowerBoundClamp => int_vars_read(stmt, &arrays).into_iter().map(Payload::Var).collect(),
        Op::SizeCheckInsert => arrays_used(stmt, &arrays).into_iter().map(Payload::Var).collect(),
        Op::RangeCheckInsert => index_sites(stmt).into_iter().map(|s| Payload::Path(s.index)).collect(),
        Op::UpperBoundClamp => index_sites(stmt)
            .into_iter()
            .filter(|s| matches!(stmt.expr_at(s.index), Some(Expr::Var(_))))
            .map(|s| Payload::Path(s.index))
            .collect(),
        Op::OffByOne => {
            let mut paths: Vec<ExprPath> = index_sites(stmt).into_iter().map(|s| s.index).collect();
            for p in loop_bound_paths(stmt) {
                if !paths.contains(&p) {
                    paths.push(p);
                }
            }
            paths.into_iter().flat_map(deltas).collect()
        }
        Op::ConstPerturb => stmt
            .expr_nodes()
            .into_iter()
            .filter_map(|(path, e)| match e {
                Expr::Int(k) => Some((path, *k)),
                _ => None,
            })
            .flat_map(|(path, k)| {
                [1i64, -1]
                    .into_iter()
                    .filter(move |d| k.checked_add(*d).is_some())
                    .map(move |delta| Payload::Delta { path, delta })
            })
            .collect(),
        Op::NegateCondition => match &stmt.kind {
            StmtKind::If { .. } | StmtKind::While { .. } => {
                let mut paths = vec![ExprPath(0)];
                for (path, e) in stmt.expr_nodes() {
                    if path.0 > 0 && matches!(e, Expr::Binary { op, .. } if op.is_comparison()) {
                        paths.push(path);
                    }
                }
                paths.into_iter().map(Payload::Path).collect()
            }
            _ => Vec::new(),
        },
        Op::VarInitInsert => {
            let mut vars = assigned_vars(func);
            for v in int_vars_read(stmt, &arrays) {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars.into_iter()
                .flat_map(|var| [0, 1].map(|value| Payload::Init { var: var.clone(), value }))
                .collect()
        }
        Op::DefaultReturnInsert => {
            if matches!(stmt.kind, StmtKind::Return(_)) {
                Vec::new()
            } else {
                std::iter::once(Expr::Int(0))
                    .chain(int_vars(func, &arrays).iter().map(|v| Expr::var(v)))
                    .map(Payload::Value)
                    .collect()
            }
        }
    };
    payloads.into_iter().map(make).collect()
}

/// Draws one edit for `op` against `program`.
///
/// Only statements with positive weight that still exist in `program` and
/// admit at least one option are considered.
pub fn mint_edit<R: Rng + ?Sized>(
    op: MutationOperator,
    program: &Program,
    suspicious: &SuspiciousnessMap,
    rng: &mut R,
) -> Result<Edit, Inapplicable> {
    let present = program.statement_ids();
    let mut candidates = Vec::new();
    let mut per_target = Vec::new();
    for (id, _) in suspicious.targets() {
        if !present.contains(&id) {
            continue;
        }
        let opts = options(op, program, id);
        if !opts.is_empty() {
            candidates.push(id);
            per_target.push(opts);
        }
    }
    let chosen = suspicious.sample(&candidates, rng).ok_or(Inapplicable(op))?;
    let at = candidates.iter().position(|id| *id == chosen).expect("sampled from candidates");
    let opts = &mut per_target[at];
    let pick = rng.gen_range(0..opts.len());
    Ok(opts.swap_remove(pick))
}

/// Every single edit over the given operators at every suspicious
/// statement.
pub fn enumerate_single_edits(
    program: &Program,
    suspicious: &SuspiciousnessMap,
    operators: &[MutationOperator],
) -> Vec<Edit> {
    let mut out = Vec::new();
    for (id, _) in suspicious.targets() {
        for op in operators {
            out.extend(options(*op, program, id));
        }
    }
    out
}
