//! Tree-walking interpreter.
//!
//! Semantics are integer-only and fully deterministic: arithmetic wraps on
//! overflow, comparisons and logical operators yield 0 or 1, and any
//! non-zero integer is true. Arrays are values; passing one to a function
//! passes a copy. Every executed statement, loop test, and call costs one
//! step against the budget. A loop that provably cycles fails with the same
//! budget fault early.

use std::collections::BTreeSet;

use crate::ast::{BinOp, Expr, Function, Program, Stmt, StmtId, StmtKind};
use crate::error::Fault;

/// Default per-test step budget.
pub const DEFAULT_STEP_BUDGET: u64 = 100_000;

const MAX_CALL_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Array(Vec<i64>),
}

impl Value {
    fn int(&self) -> Result<i64, Fault> {
        match self {
            Value::Int(v) => Ok(*v),
            Value::Array(_) => Err(Fault::TypeMismatch("array used as integer")),
        }
    }
}

// Programs are lowered once per evaluation into a form where variables are
// frame slots and callees are resolved, so the hot loop does no string
// hashing.

#[derive(Debug, Clone, Copy)]
enum Builtin {
    Len,
    Abs,
    Min,
    Max,
}

#[derive(Debug, Clone, Copy)]
enum Callee {
    User(usize),
    Builtin(Builtin),
    Unknown,
}

#[derive(Debug)]
enum CExpr {
    Int(i64),
    Var(usize),
    Index { slot: usize, index: Box<CExpr> },
    Neg(Box<CExpr>),
    Binary { op: BinOp, lhs: Box<CExpr>, rhs: Box<CExpr> },
    /// `len(v)` on a plain variable with the builtin `len`.
    LenOf(usize),
    Call { callee: Callee, name: String, args: Vec<CExpr> },
}

#[derive(Debug)]
struct CStmt {
    id: StmtId,
    kind: CKind,
}

#[derive(Debug)]
enum CKind {
    Assign { slot: usize, value: CExpr },
    ArrayWrite { slot: usize, index: CExpr, value: CExpr },
    If { cond: CExpr, then_body: Vec<CStmt>, else_body: Option<Vec<CStmt>> },
    While { cond: CExpr, body: Vec<CStmt> },
    Return(CExpr),
    Block(Vec<CStmt>),
}

#[derive(Debug)]
struct CFunc {
    name: String,
    n_params: usize,
    param_slots: Vec<usize>,
    slot_names: Vec<String>,
    body: Vec<CStmt>,
}

/// A program lowered for execution.
#[derive(Debug)]
pub(crate) struct Executable {
    funcs: Vec<CFunc>,
}

struct Lowering<'a> {
    program: &'a Program,
    slots: Vec<String>,
}

impl Lowering<'_> {
    fn slot(&mut self, name: &str) -> usize {
        match self.slots.iter().position(|s| s == name) {
            Some(i) => i,
            None => {
                self.slots.push(name.to_string());
                self.slots.len() - 1
            }
        }
    }

    fn callee(&self, name: &str) -> Callee {
        if let Some(i) = self.program.functions.iter().position(|f| f.name == name) {
            return Callee::User(i);
        }
        match name {
            "len" => Callee::Builtin(Builtin::Len),
            "abs" => Callee::Builtin(Builtin::Abs),
            "min" => Callee::Builtin(Builtin::Min),
            "max" => Callee::Builtin(Builtin::Max),
            _ => Callee::Unknown,
        }
    }

    fn expr(&mut self, e: &Expr) -> CExpr {
        match e {
            Expr::Int(v) => CExpr::Int(*v),
            Expr::Var(v) => CExpr::Var(self.slot(v)),
            Expr::Index { array, index } => CExpr::Index {
                slot: self.slot(array),
                index: Box::new(self.expr(index)),
            },
            Expr::Neg(inner) => CExpr::Neg(Box::new(self.expr(inner))),
            Expr::Binary { op, lhs, rhs } => CExpr::Binary {
                op: *op,
                lhs: Box::new(self.expr(lhs)),
                rhs: Box::new(self.expr(rhs)),
            },
            Expr::Call { name, args } => {
                let callee = self.callee(name);
                if let (Callee::Builtin(Builtin::Len), [Expr::Var(v)]) = (callee, args.as_slice()) {
                    return CExpr::LenOf(self.slot(v));
                }
                CExpr::Call {
                    callee,
                    name: name.clone(),
                    args: args.iter().map(|a| self.expr(a)).collect(),
                }
            }
        }
    }

    fn block(&mut self, body: &[Stmt]) -> Vec<CStmt> {
        body.iter().map(|s| self.stmt(s)).collect()
    }

    fn stmt(&mut self, s: &Stmt) -> CStmt {
        let kind = match &s.kind {
            StmtKind::Assign { var, value } => {
                let value = self.expr(value);
                CKind::Assign {
                    slot: self.slot(var),
                    value,
                }
            }
            StmtKind::ArrayWrite { array, index, value } => {
                let slot = self.slot(array);
                CKind::ArrayWrite {
                    slot,
                    index: self.expr(index),
                    value: self.expr(value),
                }
            }
            StmtKind::If {
                cond,
                then_body,
                else_body,
            } => CKind::If {
                cond: self.expr(cond),
                then_body: self.block(then_body),
                else_body: else_body.as_deref().map(|b| self.block(b)),
            },
            StmtKind::While { cond, body } => CKind::While {
                cond: self.expr(cond),
                body: self.block(body),
            },
            StmtKind::Return(e) => CKind::Return(self.expr(e)),
            StmtKind::Block(body) => CKind::Block(self.block(body)),
        };
        CStmt { id: s.id, kind }
    }

    fn function(program: &Program, f: &Function) -> CFunc {
        let mut l = Lowering {
            program,
            slots: Vec::new(),
        };
        // Parameters occupy the first slots, in order.
        let param_slots: Vec<usize> = f.params.iter().map(|p| l.slot(p)).collect();
        let body = l.block(&f.body);
        CFunc {
            name: f.name.clone(),
            n_params: f.params.len(),
            param_slots,
            slot_names: l.slots,
            body,
        }
    }
}

impl Executable {
    pub(crate) fn new(program: &Program) -> Self {
        Executable {
            funcs: program
                .functions
                .iter()
                .map(|f| Lowering::function(program, f))
                .collect(),
        }
    }

    pub(crate) fn has_function(&self, name: &str) -> bool {
        self.funcs.iter().any(|f| f.name == name)
    }

    pub(crate) fn run(
        &self,
        entry: &str,
        args: Vec<Value>,
        step_budget: u64,
        coverage: Option<&mut BTreeSet<StmtId>>,
    ) -> Result<Value, Fault> {
        let mut m = Machine {
            exe: self,
            steps_left: step_budget,
            depth: 0,
            coverage,
        };
        let result = m.tick().and_then(|()| match self.funcs.iter().position(|f| f.name == entry) {
            Some(i) => m.call_user(i, args),
            None => m.call_builtin(builtin_named(entry), entry, args),
        });
        result.map_err(|f| *f)
    }
}

fn builtin_named(name: &str) -> Option<Builtin> {
    match name {
        "len" => Some(Builtin::Len),
        "abs" => Some(Builtin::Abs),
        "min" => Some(Builtin::Min),
        "max" => Some(Builtin::Max),
        _ => None,
    }
}

enum Flow {
    Next,
    Return(Value),
}

type Frame = Vec<Option<Value>>;

// Boxed so the hot return paths stay two words wide.
type R<T> = Result<T, Box<Fault>>;

struct Machine<'e, 'c> {
    exe: &'e Executable,
    steps_left: u64,
    depth: usize,
    coverage: Option<&'c mut BTreeSet<StmtId>>,
}

impl<'e> Machine<'e, '_> {
    fn tick(&mut self) -> R<()> {
        if self.steps_left == 0 {
            return Err(Box::new(Fault::StepBudgetExhausted));
        }
        self.steps_left -= 1;
        Ok(())
    }

    fn call_builtin(&mut self, builtin: Option<Builtin>, name: &str, args: Vec<Value>) -> R<Value> {
        let Some(builtin) = builtin else {
            return fault(Fault::UnknownFunction(name.to_string()));
        };
        let expected = match builtin {
            Builtin::Len | Builtin::Abs => 1,
            Builtin::Min | Builtin::Max => 2,
        };
        if args.len() != expected {
            return fault(Fault::Arity {
                function: name.to_string(),
                expected,
                got: args.len(),
            });
        }
        match builtin {
            Builtin::Len => match &args[0] {
                Value::Array(a) => Ok(Value::Int(a.len() as i64)),
                Value::Int(_) => fault(Fault::TypeMismatch("len of an integer")),
            },
            Builtin::Abs => Ok(Value::Int(args[0].int()?.wrapping_abs())),
            Builtin::Min => Ok(Value::Int(args[0].int()?.min(args[1].int()?))),
            Builtin::Max => Ok(Value::Int(args[0].int()?.max(args[1].int()?))),
        }
    }

    fn call_user(&mut self, index: usize, args: Vec<Value>) -> R<Value> {
        let func = &self.exe.funcs[index];
        if args.len() != func.n_params {
            return fault(Fault::Arity {
                function: func.name.clone(),
                expected: func.n_params,
                got: args.len(),
            });
        }
        if self.depth >= MAX_CALL_DEPTH {
            return fault(Fault::CallDepthExceeded);
        }
        self.depth += 1;
        let mut frame: Frame = vec![None; func.slot_names.len()];
        for (slot, v) in func.param_slots.iter().zip(args) {
            frame[*slot] = Some(v);
        }
        let flow = self.exec_block(&func.body, &mut frame, func);
        self.depth -= 1;
        match flow? {
            Flow::Return(v) => Ok(v),
            Flow::Next => fault(Fault::MissingReturn(func.name.clone())),
        }
    }

    fn exec_block(&mut self, body: &'e [CStmt], frame: &mut Frame, func: &'e CFunc) -> R<Flow> {
        for s in body {
            if let Flow::Return(v) = self.exec(s, frame, func)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Next)
    }

    fn exec(&mut self, stmt: &'e CStmt, frame: &mut Frame, func: &'e CFunc) -> R<Flow> {
        self.tick()?;
        if let Some(cov) = self.coverage.as_deref_mut() {
            cov.insert(stmt.id);
        }
        match &stmt.kind {
            CKind::Assign { slot, value } => {
                let v = self.eval(value, frame, func)?;
                frame[*slot] = Some(v);
                Ok(Flow::Next)
            }
            CKind::ArrayWrite { slot, index, value } => {
                let i = self.eval(index, frame, func)?.int()?;
                let v = self.eval(value, frame, func)?.int()?;
                match &mut frame[*slot] {
                    Some(Value::Array(items)) => {
                        let len = items.len();
                        let cell = usize::try_from(i)
                            .ok()
                            .and_then(|i| items.get_mut(i))
                            .ok_or_else(|| Fault::IndexOutOfBounds {
                                array: func.slot_names[*slot].clone(),
                                index: i,
                                len,
                            })?;
                        *cell = v;
                        Ok(Flow::Next)
                    }
                    Some(Value::Int(_)) => fault(Fault::TypeMismatch("indexing an integer")),
                    None => fault(Fault::UndefinedVariable(func.slot_names[*slot].clone())),
                }
            }
            CKind::If {
                cond,
                then_body,
                else_body,
            } => {
                if self.int(cond, frame, func)? != 0 {
                    self.exec_block(then_body, frame, func)
                } else if let Some(else_body) = else_body {
                    self.exec_block(else_body, frame, func)
                } else {
                    Ok(Flow::Next)
                }
            }
            CKind::While { cond, body } => {
                // A loop head revisited with an identical frame can never
                // exit; fail now rather than burn the remaining budget.
                // Snapshots are taken at power-of-two iterations (Brent).
                let mut snapshot: Option<Frame> = None;
                let mut iterations = 0u64;
                loop {
                    if self.int(cond, frame, func)? == 0 {
                        break Ok(Flow::Next);
                    }
                    if let Flow::Return(v) = self.exec_block(body, frame, func)? {
                        break Ok(Flow::Return(v));
                    }
                    self.tick()?;
                    iterations += 1;
                    if snapshot.as_ref() == Some(frame) {
                        break fault(Fault::StepBudgetExhausted);
                    }
                    if iterations.is_power_of_two() {
                        snapshot = Some(frame.clone());
                    }
                }
            }
            CKind::Return(e) => Ok(Flow::Return(self.eval(e, frame, func)?)),
            CKind::Block(body) => self.exec_block(body, frame, func),
        }
    }

    fn int(&mut self, e: &'e CExpr, frame: &mut Frame, func: &'e CFunc) -> R<i64> {
        match e {
            CExpr::Int(v) => Ok(*v),
            CExpr::Var(slot) => match &frame[*slot] {
                Some(Value::Int(v)) => Ok(*v),
                Some(Value::Array(_)) => fault(Fault::TypeMismatch("array used as integer")),
                None => Err(undefined(func, *slot)),
            },
            CExpr::Index { slot, index } => {
                let i = self.int(index, frame, func)?;
                match &frame[*slot] {
                    Some(Value::Array(items)) => usize::try_from(i)
                        .ok()
                        .and_then(|i| items.get(i))
                        .copied()
                        .ok_or_else(|| {
                            Fault::IndexOutOfBounds {
                                array: func.slot_names[*slot].clone(),
                                index: i,
                                len: items.len(),
                            }
                            .into()
                        }),
                    Some(Value::Int(_)) => fault(Fault::TypeMismatch("indexing an integer")),
                    None => Err(undefined(func, *slot)),
                }
            }
            CExpr::Neg(inner) => Ok(self.int(inner, frame, func)?.wrapping_neg()),
            CExpr::Binary { op, lhs, rhs } => {
                let l = self.int(lhs, frame, func)?;
                if *op == BinOp::And && l == 0 {
                    return Ok(0);
                }
                if *op == BinOp::Or && l != 0 {
                    return Ok(1);
                }
                let r = self.int(rhs, frame, func)?;
                binary(*op, l, r)
            }
            CExpr::LenOf(slot) => match &frame[*slot] {
                Some(Value::Array(items)) => {
                    let n = items.len() as i64;
                    self.tick()?;
                    Ok(n)
                }
                Some(Value::Int(_)) => {
                    self.tick()?;
                    fault(Fault::TypeMismatch("len of an integer"))
                }
                None => Err(undefined(func, *slot)),
            },
            CExpr::Call { .. } => Ok(self.eval(e, frame, func)?.int()?),
        }
    }

    fn eval(&mut self, e: &'e CExpr, frame: &mut Frame, func: &'e CFunc) -> R<Value> {
        match e {
            CExpr::Var(slot) => frame[*slot].clone().ok_or_else(|| undefined(func, *slot)),
            CExpr::Call { callee, name, args } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.eval(a, frame, func)?);
                }
                self.tick()?;
                match callee {
                    Callee::User(i) => self.call_user(*i, values),
                    Callee::Builtin(b) => self.call_builtin(Some(*b), name, values),
                    Callee::Unknown => self.call_builtin(None, name, values),
                }
            }
            _ => self.int(e, frame, func).map(Value::Int),
        }
    }
}

fn fault<T>(f: Fault) -> R<T> {
    Err(Box::new(f))
}

fn undefined(func: &CFunc, slot: usize) -> Box<Fault> {
    Box::new(Fault::UndefinedVariable(func.slot_names[slot].clone()))
}

fn binary(op: BinOp, l: i64, r: i64) -> R<i64> {
    let b = |c: bool| c as i64;
    Ok(match op {
        BinOp::Add => l.wrapping_add(r),
        BinOp::Sub => l.wrapping_sub(r),
        BinOp::Mul => l.wrapping_mul(r),
        BinOp::Div => {
            if r == 0 {
                return Err(Box::new(Fault::DivisionByZero));
            }
            l.wrapping_div(r)
        }
        BinOp::Rem => {
            if r == 0 {
                return Err(Box::new(Fault::DivisionByZero));
            }
            l.wrapping_rem(r)
        }
        BinOp::Lt => b(l < r),
        BinOp::Le => b(l <= r),
        BinOp::Gt => b(l > r),
        BinOp::Ge => b(l >= r),
        BinOp::Eq => b(l == r),
        BinOp::Ne => b(l != r),
        BinOp::And | BinOp::Or => b(r != 0),
    })
}

/// Calls `entry` with `args` under a step budget.
pub fn execute(program: &Program, entry: &str, args: Vec<Value>, step_budget: u64) -> Result<Value, Fault> {
    Executable::new(program).run(entry, args, step_budget, None)
}

/// Like [`execute`], additionally recording every statement that started
/// executing.
pub fn execute_with_coverage(
    program: &Program,
    entry: &str,
    args: Vec<Value>,
    step_budget: u64,
    coverage: &mut BTreeSet<StmtId>,
) -> Result<Value, Fault> {
    Executable::new(program).run(entry, args, step_budget, Some(coverage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;

    fn run(src: &str, args: Vec<Value>) -> Result<Value, Fault> {
        execute(&parse(src).unwrap(), "main", args, DEFAULT_STEP_BUDGET)
    }

    #[test]
    fn arithmetic_and_control_flow() {
        let src = "fn main(n) { s = 0; i = 1; while (i <= n) { if (i % 2 == 0) { s = s + i; } i = i + 1; } return s; }";
        assert_eq!(run(src, vec![Value::Int(10)]), Ok(Value::Int(30)));
    }

    #[test]
    fn arrays_are_copied_into_calls() {
        let src = "fn main(a) { x = bump(a); return a[0] * 100 + x; }\nfn bump(b) { b[0] = b[0] + 1; return b[0]; }";
        assert_eq!(run(src, vec![Value::Array(vec![4])]), Ok(Value::Int(405)));
    }

    #[test]
    fn builtins() {
        let src = "fn main(a, x) { return len(a) * 1000 + abs(x) * 10 + min(x, 2) + max(x, 0); }";
        assert_eq!(run(src, vec![Value::Array(vec![1, 2, 3]), Value::Int(-4)]), Ok(Value::Int(3036)));
    }

    #[test]
    fn faults() {
        assert_eq!(run("fn main(x) { return 1 / x; }", vec![Value::Int(0)]), Err(Fault::DivisionByZero));
        assert_eq!(run("fn main(x) { return 1 % x; }", vec![Value::Int(0)]), Err(Fault::DivisionByZero));
        assert!(matches!(
            run("fn main(a) { return a[3]; }", vec![Value::Array(vec![1])]),
            Err(Fault::IndexOutOfBounds { index: 3, len: 1, .. })
        ));
        assert!(matches!(
            run("fn main(a) { a[-1] = 0; return 0; }", vec![Value::Array(vec![1])]),
            Err(Fault::IndexOutOfBounds { index: -1, .. })
        ));
        assert_eq!(run("fn main(x) { return y; }", vec![Value::Int(0)]), Err(Fault::UndefinedVariable("y".into())));
        assert_eq!(run("fn main(x) { x = 1; }", vec![Value::Int(0)]), Err(Fault::MissingReturn("main".into())));
        assert!(matches!(run("fn main(x) { return f(x); }", vec![Value::Int(0)]), Err(Fault::UnknownFunction(_))));
        assert!(matches!(run("fn main(x) { return min(x); }", vec![Value::Int(0)]), Err(Fault::Arity { .. })));
        assert_eq!(
            run("fn main(x) { return main(x); }", vec![Value::Int(0)]),
            Err(Fault::CallDepthExceeded)
        );
    }

    #[test]
    fn infinite_loop_hits_the_budget() {
        assert_eq!(run("fn main(x) { while (1) { } return x; }", vec![Value::Int(0)]), Err(Fault::StepBudgetExhausted));
    }

    #[test]
    fn overflow_wraps() {
        let src = "fn main(x) { return x * x + 1; }";
        assert_eq!(run(src, vec![Value::Int(i64::MAX)]), Ok(Value::Int(2)));
        assert_eq!(run("fn main(x) { return x / -1; }", vec![Value::Int(i64::MIN)]), Ok(Value::Int(i64::MIN)));
    }

    #[test]
    fn logical_operators_short_circuit() {
        let src = "fn main(a, i) { if (i < len(a) && a[i] > 0) { return 1; } return 0; }";
        assert_eq!(run(src, vec![Value::Array(vec![5]), Value::Int(3)]), Ok(Value::Int(0)));
        let src = "fn main(x) { return (x == 0 || 10 / x > 1) + (2 && 3); }";
        assert_eq!(run(src, vec![Value::Int(0)]), Ok(Value::Int(2)));
    }

    #[test]
    fn coverage_records_executed_statements() {
        let p = parse("fn main(x) { if (x > 0) { x = 1; } else { x = 2; } return x; }").unwrap();
        let mut cov = BTreeSet::new();
        execute_with_coverage(&p, "main", vec![Value::Int(5)], 100, &mut cov).unwrap();
        assert_eq!(cov.into_iter().map(|s| s.0).collect::<Vec<_>>(), vec![1, 2, 4]);
    }

    #[test]
    fn revisited_loop_state_faults_like_the_budget() {
        // Frame cycles with period 2; detected long before the budget.
        let src = "fn main(x) { while (1) { x = 1 - x; } return x; }";
        let p = parse(src).unwrap();
        assert_eq!(execute(&p, "main", vec![Value::Int(0)], u64::MAX), Err(Fault::StepBudgetExhausted));
        // A strictly growing counter is not a cycle and runs out the budget.
        let src = "fn main(x) { while (x >= 0) { x = x + 1; } return x; }";
        assert_eq!(run(src, vec![Value::Int(0)]), Err(Fault::StepBudgetExhausted));
        // Loops that revisit states across, not within, activations still finish.
        let src = "fn main(n) { s = 0; while (n > 0) { i = 0; while (i < 3) { i = i + 1; s = s + 1; } n = n - 1; } return s; }";
        assert_eq!(run(src, vec![Value::Int(4)]), Ok(Value::Int(12)));
    }

    #[test]
    fn user_functions_shadow_builtins() {
        let src = "fn main(a) { return len(a); }\nfn len(b) { return 7; }";
        assert_eq!(run(src, vec![Value::Array(vec![1])]), Ok(Value::Int(7)));
        assert_eq!(
            run("fn main(x) { return len(x); }", vec![Value::Int(3)]),
            Err(Fault::TypeMismatch("len of an integer"))
        );
    }
}
