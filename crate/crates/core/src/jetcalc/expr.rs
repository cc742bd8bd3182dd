use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::jet::{Jet, MONOMIALS};
use super::EvalError;

/// Denominators (and bases of negative powers) smaller than this in absolute
/// value are rejected during evaluation.
pub const DIVISION_GUARD: f64 = 1e-13;

pub type Point = [f64; 3];

/// Closed-form expression tree over the chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Pow(Arc<Expr>, i32),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Exp(Arc<Expr>),
}

fn as_const(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

// Smart constructors. Folding is restricted to operations whose result is
// bit-identical to what evaluation would produce.

pub(crate) fn add(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Arc::new(Expr::Const(x + y)),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Arc::new(Expr::Add(a, b)),
    }
}

pub(crate) fn sub(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Arc::new(Expr::Const(x - y)),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => Arc::new(Expr::Sub(a, b)),
    }
}

pub(crate) fn mul(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Arc::new(Expr::Const(x * y)),
        (Some(x), _) if x == 0.0 => a,
        (_, Some(y)) if y == 0.0 => b,
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        _ => Arc::new(Expr::Mul(a, b)),
    }
}

pub(crate) fn div(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    match (as_const(&a), as_const(&b)) {
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), Some(y)) if y.abs() >= DIVISION_GUARD => Arc::new(Expr::Const(x / y)),
        _ => Arc::new(Expr::Div(a, b)),
    }
}

pub(crate) fn neg(a: Arc<Expr>) -> Arc<Expr> {
    match &*a {
        Expr::Const(c) => Arc::new(Expr::Const(-c)),
        Expr::Neg(inner) => inner.clone(),
        _ => Arc::new(Expr::Neg(a)),
    }
}

pub(crate) fn pow(a: Arc<Expr>, n: i32) -> Arc<Expr> {
    match n {
        0 => Arc::new(Expr::Const(1.0)),
        1 => a,
        _ => Arc::new(Expr::Pow(a, n)),
    }
}

fn constant(c: f64) -> Arc<Expr> {
    Arc::new(Expr::Const(c))
}

impl Expr {
    pub fn depends_on(&self, axis: usize) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => *v == axis,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on(axis) || b.depends_on(axis)
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
                a.depends_on(axis)
            }
        }
    }

    /// Evaluates by direct recursion. Used for one-off values; repeated
    /// evaluation goes through a cached [`Tape`].
    pub fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => p[*i],
            Expr::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Expr::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Expr::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Expr::Div(a, b) => guarded_div(a.eval(p)?, b.eval(p)?)?,
            Expr::Neg(a) => -a.eval(p)?,
            Expr::Pow(a, n) => guarded_powi(a.eval(p)?, *n)?,
            Expr::Sin(a) => a.eval(p)?.sin(),
            Expr::Cos(a) => a.eval(p)?.cos(),
            Expr::Exp(a) => a.eval(p)?.exp(),
        };
        finite(v)
    }
}

fn guarded_div(num: f64, den: f64) -> Result<f64, EvalError> {
    if den.abs() < DIVISION_GUARD {
        return Err(EvalError::NearZeroDenominator { value: den });
    }
    Ok(num / den)
}

fn guarded_powi(base: f64, n: i32) -> Result<f64, EvalError> {
    if n < 0 && base.abs() < DIVISION_GUARD {
        return Err(EvalError::NearZeroDenominator { value: base });
    }
    Ok(base.powi(n))
}

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

/// Symbolic partial derivative of an expression tree.
pub fn derive(e: &Arc<Expr>, axis: usize) -> Arc<Expr> {
    if !e.depends_on(axis) {
        return constant(0.0);
    }
    match &**e {
        Expr::Const(_) => constant(0.0),
        Expr::Var(v) => constant(if *v == axis { 1.0 } else { 0.0 }),
        Expr::Add(a, b) => add(derive(a, axis), derive(b, axis)),
        Expr::Sub(a, b) => sub(derive(a, axis), derive(b, axis)),
        Expr::Mul(a, b) => add(
            mul(derive(a, axis), b.clone()),
            mul(a.clone(), derive(b, axis)),
        ),
        Expr::Div(a, b) => {
            // (a/b)' = a'/b - a b' / b^2
            let first = div(derive(a, axis), b.clone());
            let second = div(mul(a.clone(), derive(b, axis)), pow(b.clone(), 2));
            sub(first, second)
        }
        Expr::Neg(a) => neg(derive(a, axis)),
        Expr::Pow(a, n) => mul(
            mul(constant(*n as f64), pow(a.clone(), n - 1)),
            derive(a, axis),
        ),
        Expr::Sin(a) => mul(Arc::new(Expr::Cos(a.clone())), derive(a, axis)),
        Expr::Cos(a) => neg(mul(Arc::new(Expr::Sin(a.clone())), derive(a, axis))),
        Expr::Exp(a) => mul(e.clone(), derive(a, axis)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 {
                    write!(f, "(-{:?})", -c)
                } else {
                    write!(f, "{:?}", c)
                }
            }
            Expr::Var(i) => write!(f, "{}", ["x", "y", "z"][*i]),
            Expr::Add(a, b) => write!(f, "({} + {})", a, b),
            Expr::Sub(a, b) => write!(f, "({} - {})", a, b),
            Expr::Mul(a, b) => write!(f, "({} * {})", a, b),
            Expr::Div(a, b) => write!(f, "({} / {})", a, b),
            Expr::Neg(a) => write!(f, "(-{})", a),
            Expr::Pow(a, n) => write!(f, "({}^{})", a, n),
            Expr::Sin(a) => write!(f, "sin({})", a),
            Expr::Cos(a) => write!(f, "cos({})", a),
            Expr::Exp(a) => write!(f, "exp({})", a),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(f64),
    Var(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Neg(usize),
    Pow(usize, i32),
    Sin(usize),
    Cos(usize),
    Exp(usize),
}

/// Linearised DAG of a set of expressions. Shared subtrees (by pointer) are
/// evaluated once per call.
#[derive(Debug)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<usize>,
}

impl Tape {
    pub fn new(exprs: &[Arc<Expr>]) -> Self {
        let mut tape = Tape {
            ops: Vec::new(),
            outputs: Vec::with_capacity(exprs.len()),
        };
        let mut seen = HashMap::new();
        for e in exprs {
            let slot = tape.push(e, &mut seen);
            tape.outputs.push(slot);
        }
        tape
    }

    fn push(&mut self, e: &Arc<Expr>, seen: &mut HashMap<*const Expr, usize>) -> usize {
        let key = Arc::as_ptr(e);
        if let Some(&slot) = seen.get(&key) {
            return slot;
        }
        let op = match &**e {
            Expr::Const(c) => Op::Const(*c),
            Expr::Var(i) => Op::Var(*i),
            Expr::Add(a, b) => Op::Add(self.push(a, seen), self.push(b, seen)),
            Expr::Sub(a, b) => Op::Sub(self.push(a, seen), self.push(b, seen)),
            Expr::Mul(a, b) => Op::Mul(self.push(a, seen), self.push(b, seen)),
            Expr::Div(a, b) => Op::Div(self.push(a, seen), self.push(b, seen)),
            Expr::Neg(a) => Op::Neg(self.push(a, seen)),
            Expr::Pow(a, n) => Op::Pow(self.push(a, seen), *n),
            Expr::Sin(a) => Op::Sin(self.push(a, seen)),
            Expr::Cos(a) => Op::Cos(self.push(a, seen)),
            Expr::Exp(a) => Op::Exp(self.push(a, seen)),
        };
        self.ops.push(op);
        let slot = self.ops.len() - 1;
        seen.insert(key, slot);
        slot
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn eval(&self, p: &Point, out: &mut [f64]) -> Result<(), EvalError> {
        let mut regs = vec![0.0; self.ops.len()];
        for (slot, op) in self.ops.iter().enumerate() {
            let v = match *op {
                Op::Const(c) => c,
                Op::Var(i) => p[i],
                Op::Add(a, b) => regs[a] + regs[b],
                Op::Sub(a, b) => regs[a] - regs[b],
                Op::Mul(a, b) => regs[a] * regs[b],
                Op::Div(a, b) => guarded_div(regs[a], regs[b])?,
                Op::Neg(a) => -regs[a],
                Op::Pow(a, n) => guarded_powi(regs[a], n)?,
                Op::Sin(a) => regs[a].sin(),
                Op::Cos(a) => regs[a].cos(),
                Op::Exp(a) => regs[a].exp(),
            };
            regs[slot] = finite(v)?;
        }
        for (o, &slot) in out.iter_mut().zip(&self.outputs) {
            *o = regs[slot];
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
struct DerivativeCache {
    // Partial-derivative expressions in `MONOMIALS` order (index 0 is the
    // field itself).
    partials: OnceLock<Vec<Arc<Expr>>>,
    tapes: [OnceLock<Tape>; 4],
}

/// A smooth real-valued function on the chart, with declared periodicity.
///
/// Cloning is cheap; derivative expressions and evaluation tapes are built
/// lazily and shared between clones.
#[derive(Debug, Clone)]
pub struct ScalarField {
    expr: Arc<Expr>,
    periods: [Option<f64>; 3],
    cache: Arc<DerivativeCache>,
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr && self.periods == other.periods
    }
}

const NUM_PARTIALS: [usize; 4] = [1, 4, 10, 20];

impl ScalarField {
    pub fn from_expr(expr: Arc<Expr>) -> Self {
        Self {
            expr,
            periods: [None; 3],
            cache: Arc::default(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_expr(constant(c))
    }

    pub fn coordinate(axis: usize) -> Self {
        assert!(axis < 3, "coordinate axis out of range");
        Self::from_expr(Arc::new(Expr::Var(axis)))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn expr(&self) -> &Arc<Expr> {
        &self.expr
    }

    pub fn periods(&self) -> [Option<f64>; 3] {
        self.periods
    }

    /// Declares a period along `axis`. The declaration is metadata; use
    /// [`ScalarField::periodicity_residual`] to verify it.
    pub fn with_period(mut self, axis: usize, period: f64) -> Self {
        self.periods[axis] = Some(period);
        self
    }

    pub fn with_periods(mut self, periods: [Option<f64>; 3]) -> Self {
        self.periods = periods;
        self
    }

    pub fn is_constant(&self) -> bool {
        matches!(*self.expr, Expr::Const(_))
    }

    pub fn as_constant(&self) -> Option<f64> {
        as_const(&self.expr)
    }

    pub fn depends_on(&self, axis: usize) -> bool {
        self.expr.depends_on(axis)
    }

    pub fn differentiate(&self, axis: usize) -> ScalarField {
        // Derivatives of periodic functions keep the period.
        ScalarField::from_expr(derive(&self.expr, axis)).with_periods(self.periods)
    }

    pub fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        let mut out = [0.0];
        self.tape(0).eval(p, &mut out)?;
        Ok(out[0])
    }

    /// Value and all partial derivatives up to `order` (at most 3), each
    /// obtained by evaluating the symbolic derivative chain.
    pub fn eval_jet(&self, p: &Point, order: usize) -> Result<Jet, EvalError> {
        assert!(order <= 3, "jets are truncated at order 3");
        let n = NUM_PARTIALS[order];
        let mut partials = [0.0; 20];
        self.tape(order).eval(p, &mut partials[..n])?;
        Ok(Jet::from_partials(order, &partials[..n]))
    }

    fn partial_exprs(&self) -> &[Arc<Expr>] {
        self.cache.partials.get_or_init(|| {
            let mut out: Vec<Arc<Expr>> = Vec::with_capacity(20);
            let mut index = HashMap::new();
            for (slot, alpha) in MONOMIALS.iter().enumerate() {
                let degree: u8 = alpha.iter().sum();
                let e = if degree == 0 {
                    self.expr.clone()
                } else {
                    // Peel the highest axis off: d^alpha = d_axis d^(alpha - e_axis).
                    let axis = (0..3).rev().find(|&a| alpha[a] > 0).unwrap();
                    let mut parent = *alpha;
                    parent[axis] -= 1;
                    derive(&out[index[&parent]], axis)
                };
                index.insert(*alpha, slot);
                out.push(e);
            }
            out
        })
    }

    fn tape(&self, order: usize) -> &Tape {
        self.cache.tapes[order].get_or_init(|| {
            if order == 0 {
                Tape::new(std::slice::from_ref(&self.expr))
            } else {
                Tape::new(&self.partial_exprs()[..NUM_PARTIALS[order]])
            }
        })
    }

    /// Largest deviation |F(p + period e_axis) - F(p)| over the given points
    /// and all declared periods.
    pub fn periodicity_residual(&self, points: &[Point]) -> Result<f64, EvalError> {
        let mut worst: f64 = 0.0;
        for (axis, period) in self.periods.iter().enumerate() {
            let Some(period) = period else { continue };
            for p in points {
                let mut q = *p;
                q[axis] += period;
                let a = self.eval(p)?;
                let b = self.eval(&q)?;
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
        }
        Ok(worst)
    }

    pub fn sin(&self) -> ScalarField {
        self.unary(|e| Arc::new(Expr::Sin(e)))
    }

    pub fn cos(&self) -> ScalarField {
        self.unary(|e| Arc::new(Expr::Cos(e)))
    }

    pub fn exp(&self) -> ScalarField {
        self.unary(|e| Arc::new(Expr::Exp(e)))
    }

    pub fn powi(&self, n: i32) -> ScalarField {
        self.unary(|e| pow(e, n))
    }

    fn unary(&self, build: impl FnOnce(Arc<Expr>) -> Arc<Expr>) -> ScalarField {
        ScalarField::from_expr(build(self.expr.clone())).with_periods(self.periods)
    }

    fn binary(
        &self,
        other: &ScalarField,
        build: impl FnOnce(Arc<Expr>, Arc<Expr>) -> Arc<Expr>,
    ) -> ScalarField {
        let mut periods = [None; 3];
        for (axis, slot) in periods.iter_mut().enumerate() {
            *slot = match (self.periods[axis], other.periods[axis]) {
                (Some(a), Some(b)) if a == b => Some(a),
                (Some(a), None) if !other.depends_on(axis) => Some(a),
                (None, Some(b)) if !self.depends_on(axis) => Some(b),
                _ => None,
            };
        }
        ScalarField::from_expr(build(self.expr.clone(), other.expr.clone())).with_periods(periods)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

impl From<f64> for ScalarField {
    fn from(c: f64) -> Self {
        ScalarField::constant(c)
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $build:path) => {
        impl std::ops::$trait<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                self.binary(rhs, $build)
            }
        }
        impl std::ops::$trait<ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                self.binary(&rhs, $build)
            }
        }
        impl std::ops::$trait<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                self.binary(rhs, $build)
            }
        }
        impl std::ops::$trait<ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                self.binary(&rhs, $build)
            }
        }
        impl std::ops::$trait<f64> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: f64) -> ScalarField {
                self.binary(&ScalarField::constant(rhs), $build)
            }
        }
        impl std::ops::$trait<f64> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: f64) -> ScalarField {
                self.binary(&ScalarField::constant(rhs), $build)
            }
        }
        impl std::ops::$trait<&ScalarField> for f64 {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                ScalarField::constant(self).binary(rhs, $build)
            }
        }
        impl std::ops::$trait<ScalarField> for f64 {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                ScalarField::constant(self).binary(&rhs, $build)
            }
        }
    };
}

field_binop!(Add, add, add);
field_binop!(Sub, sub, sub);
field_binop!(Mul, mul, mul);
field_binop!(Div, div, div);

impl std::ops::Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.unary(neg)
    }
}

impl std::ops::Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.unary(neg)
    }
}

/// Central difference quotient of `field` along `axis`. Exists only as an
/// independent cross-check for the symbolic derivatives.
pub fn finite_difference_oracle(
    field: &ScalarField,
    p: &Point,
    axis: usize,
    step: f64,
) -> Result<f64, EvalError> {
    assert!(step > 0.0, "finite-difference step must be positive");
    let mut fwd = *p;
    let mut bwd = *p;
    fwd[axis] += step;
    bwd[axis] -= step;
    Ok((field.expr.eval(&fwd)? - field.expr.eval(&bwd)?) / (2.0 * step))
}
