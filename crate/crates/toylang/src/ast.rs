use std::fmt;

use serde::{Deserialize, Serialize};

/// Stable identity of a statement within one program lineage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StmtId(pub u32);

impl fmt::Display for StmtId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Preorder index of an expression node among a statement's own
/// expressions (those of nested statements are not counted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExprPath(pub u32);

impl fmt::Display for ExprPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter. All operators are left
    /// associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }

    /// The comparison that holds exactly when `self` does not.
    pub fn negated(self) -> Option<BinOp> {
        Some(match self {
            BinOp::Lt => BinOp::Ge,
            BinOp::Le => BinOp::Gt,
            BinOp::Gt => BinOp::Le,
            BinOp::Ge => BinOp::Lt,
            BinOp::Eq => BinOp::Ne,
            BinOp::Ne => BinOp::Eq,
            _ => return None,
        })
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        Some(match s {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Rem,
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            "&&" => BinOp::And,
            "||" => BinOp::Or,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Int(i64),
    Var(String),
    Index { array: String, index: Box<Expr> },
    Neg(Box<Expr>),
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Call { name: String, args: Vec<Expr> },
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn call(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Call {
            name: name.to_string(),
            args,
        }
    }

    /// Whether the expression is a truth value (comparison or logical op).
    pub fn is_boolean(&self) -> bool {
        matches!(self, Expr::Binary { op, .. } if op.is_comparison() || op.is_logical())
    }

    fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Int(_) | Expr::Var(_) => Vec::new(),
            Expr::Index { index, .. } => vec![index],
            Expr::Neg(inner) => vec![inner],
            Expr::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            Expr::Call { args, .. } => args.iter().collect(),
        }
    }

    /// Visits every node in preorder.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for child in self.children() {
            child.visit(f);
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    fn nth(&self, n: &mut usize) -> Option<&Expr> {
        if *n == 0 {
            return Some(self);
        }
        *n -= 1;
        for child in self.children() {
            if let Some(found) = child.nth(n) {
                return Some(found);
            }
        }
        None
    }

    fn nth_mut(&mut self, n: &mut usize) -> Option<&mut Expr> {
        if *n == 0 {
            return Some(self);
        }
        *n -= 1;
        match self {
            Expr::Int(_) | Expr::Var(_) => None,
            Expr::Index { index, .. } => index.nth_mut(n),
            Expr::Neg(inner) => inner.nth_mut(n),
            Expr::Binary { lhs, rhs, .. } => {
                if let Some(found) = lhs.nth_mut(n) {
                    return Some(found);
                }
                rhs.nth_mut(n)
            }
            Expr::Call { args, .. } => {
                for arg in args {
                    if let Some(found) = arg.nth_mut(n) {
                        return Some(found);
                    }
                }
                None
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stmt {
    pub id: StmtId,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StmtKind {
    Assign { var: String, value: Expr },
    ArrayWrite { array: String, index: Expr, value: Expr },
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Option<Vec<Stmt>> },
    While { cond: Expr, body: Vec<Stmt> },
    Return(Expr),
    Block(Vec<Stmt>),
}

impl Stmt {
    /// Root expressions owned directly by this statement, in source order.
    pub fn own_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Assign { value, .. } => vec![value],
            StmtKind::ArrayWrite { index, value, .. } => vec![index, value],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::Return(e) => vec![e],
            StmtKind::Block(_) => Vec::new(),
        }
    }

    fn own_exprs_mut(&mut self) -> Vec<&mut Expr> {
        match &mut self.kind {
            StmtKind::Assign { value, .. } => vec![value],
            StmtKind::ArrayWrite { index, value, .. } => vec![index, value],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::Return(e) => vec![e],
            StmtKind::Block(_) => Vec::new(),
        }
    }

    /// Every own expression node paired with its path, in preorder.
    pub fn expr_nodes(&self) -> Vec<(ExprPath, &Expr)> {
        let mut out = Vec::new();
        for root in self.own_exprs() {
            root.visit(&mut |e| {
                let path = ExprPath(out.len() as u32);
                out.push((path, e));
            });
        }
        out
    }

    pub fn expr_at(&self, path: ExprPath) -> Option<&Expr> {
        let mut n = path.0 as usize;
        for root in self.own_exprs() {
            if let Some(found) = root.nth(&mut n) {
                return Some(found);
            }
        }
        None
    }

    pub fn expr_at_mut(&mut self, path: ExprPath) -> Option<&mut Expr> {
        let mut n = path.0 as usize;
        for root in self.own_exprs_mut() {
            if let Some(found) = root.nth_mut(&mut n) {
                return Some(found);
            }
        }
        None
    }

    /// Nested statement lists, in source order.
    pub fn child_blocks(&self) -> Vec<&Vec<Stmt>> {
        match &self.kind {
            StmtKind::If {
                then_body,
                else_body,
                ..
            } => {
                let mut v = vec![then_body];
                if let Some(e) = else_body {
                    v.push(e);
                }
                v
            }
            StmtKind::While { body, .. } | StmtKind::Block(body) => vec![body],
            _ => Vec::new(),
        }
    }

    pub fn child_blocks_mut(&mut self) -> Vec<&mut Vec<Stmt>> {
        match &mut self.kind {
            StmtKind::If {
                then_body,
                else_body,
                ..
            } => {
                let mut v = vec![then_body];
                if let Some(e) = else_body {
                    v.push(e);
                }
                v
            }
            StmtKind::While { body, .. } | StmtKind::Block(body) => vec![body],
            _ => Vec::new(),
        }
    }

    /// This statement and all nested statements, in preorder.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        f(self);
        for block in self.child_blocks() {
            for s in block {
                s.visit(f);
            }
        }
    }

    fn visit_mut(&mut self, f: &mut impl FnMut(&mut Stmt)) {
        f(self);
        for block in self.child_blocks_mut() {
            for s in block {
                s.visit_mut(f);
            }
        }
    }

    pub fn contains(&self, id: StmtId) -> bool {
        let mut found = false;
        self.visit(&mut |s| found |= s.id == id);
        found
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Function {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
}

impl Function {
    /// All statements of the function in preorder.
    pub fn statements(&self) -> Vec<&Stmt> {
        let mut out = Vec::new();
        for s in &self.body {
            s.visit(&mut |s| out.push(s));
        }
        out
    }
}

/// A parsed toy-language program.
///
/// Statement ids are unique within the program. Statements copied in by
/// edits receive fresh ids from `next_id`, so ids minted against an
/// ancestor keep pointing at the same statements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Program {
    pub functions: Vec<Function>,
    next_id: u32,
}

impl Program {
    /// Builds a program and assigns preorder ids starting at 1, ignoring
    /// whatever ids the statements carried.
    pub fn new(functions: Vec<Function>) -> Self {
        let mut p = Program {
            functions,
            next_id: 1,
        };
        p.renumber();
        p
    }

    fn renumber(&mut self) {
        let mut next = 1;
        for f in &mut self.functions {
            for s in &mut f.body {
                s.visit_mut(&mut |s| {
                    s.id = StmtId(next);
                    next += 1;
                });
            }
        }
        self.next_id = next;
    }

    /// Copy with ids reassigned in preorder; two programs are structurally
    /// identical exactly when their canonical forms are equal.
    pub fn canonical(&self) -> Program {
        let mut p = self.clone();
        p.renumber();
        p
    }

    pub fn same_shape(&self, other: &Program) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn statements(&self) -> Vec<&Stmt> {
        self.functions.iter().flat_map(|f| f.statements()).collect()
    }

    pub fn statement_ids(&self) -> Vec<StmtId> {
        self.statements().iter().map(|s| s.id).collect()
    }

    pub fn find(&self, id: StmtId) -> Option<&Stmt> {
        self.statements().into_iter().find(|s| s.id == id)
    }

    /// Index of the function containing `id`.
    pub fn function_of(&self, id: StmtId) -> Option<usize> {
        self.functions
            .iter()
            .position(|f| f.body.iter().any(|s| s.contains(id)))
    }

    /// The statement list holding `id` and its position in that list.
    pub fn locate_mut(&mut self, id: StmtId) -> Option<(&mut Vec<Stmt>, usize)> {
        fn search(block: &mut Vec<Stmt>, id: StmtId) -> Option<(&mut Vec<Stmt>, usize)> {
            if let Some(pos) = block.iter().position(|s| s.id == id) {
                return Some((block, pos));
            }
            let holder = block.iter().position(|s| s.contains(id))?;
            for child in block[holder].child_blocks_mut() {
                if child.iter().any(|s| s.contains(id)) {
                    return search(child, id);
                }
            }
            None
        }
        self.functions
            .iter_mut()
            .find(|f| f.body.iter().any(|s| s.contains(id)))
            .and_then(|f| search(&mut f.body, id))
    }

    pub fn find_mut(&mut self, id: StmtId) -> Option<&mut Stmt> {
        let (block, pos) = self.locate_mut(id)?;
        block.get_mut(pos)
    }

    pub fn fresh_id(&mut self) -> StmtId {
        let id = StmtId(self.next_id);
        self.next_id += 1;
        id
    }

    /// Deep copy of `stmt` with every id in the copy freshly allocated.
    pub fn fresh_copy(&mut self, stmt: &Stmt) -> Stmt {
        let mut copy = stmt.clone();
        copy.visit_mut(&mut |s| {
            s.id = StmtId(self.next_id);
            self.next_id += 1;
        });
        copy
    }

    /// Wraps an already-built statement kind with a fresh id.
    pub fn new_stmt(&mut self, kind: StmtKind) -> Stmt {
        Stmt {
            id: self.fresh_id(),
            kind,
        }
    }
}

/// Functions every program can call without defining them.
pub const BUILTINS: [(&str, usize); 4] = [("len", 1), ("abs", 1), ("min", 2), ("max", 2)];
