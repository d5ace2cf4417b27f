//! Arithmetic circuits: an append-only gate DAG with pinned constants.
//!
//! Variables `0..num_free` are free; constants live in further variables whose
//! values are pinned, so no input gate is ever labelled by a constant.
//! Formal degree counts free inputs as 1 and pinned inputs as 0.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_q, ComplexScalar, GaussRat, Scalar, CFloat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(usize),
    Add(Vec<usize>),
    Mul(usize, usize),
}

impl Gate {
    pub fn children(&self) -> &[usize] {
        match self {
            Gate::Input(_) => &[],
            Gate::Add(c) => c,
            Gate::Mul(a, _) => std::slice::from_ref(a),
        }
    }
    fn for_each_child(&self, mut f: impl FnMut(usize)) {
        match self {
            Gate::Input(_) => {}
            Gate::Add(c) => c.iter().for_each(|&x| f(x)),
            Gate::Mul(a, b) => {
                f(*a);
                f(*b);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub size: usize,
    /// Longest input-to-output path, in edges.
    pub depth: usize,
    pub degree: usize,
    /// Largest number of multiplication gates on any path.
    pub mult_depth: usize,
    pub max_add_fanin: usize,
}

#[derive(Clone, Debug)]
pub struct Circuit {
    gates: Vec<Gate>,
    outputs: Vec<usize>,
    num_free: usize,
    pins: Vec<Option<GaussRat>>,
    wide_add: bool,
    metrics: Metrics,
    degrees: Vec<usize>,
}

impl Circuit {
    /// Validates and freezes a gate list. Pinned variables are given as
    /// `pins[v] = Some(value)`; `pins.len()` is the variable count.
    pub fn from_parts(gates: Vec<Gate>, outputs: Vec<usize>, num_free: usize, pins: Vec<Option<GaussRat>>, wide_add: bool) -> Result<Circuit> {
        if outputs.is_empty() {
            return Err(Error::Circuit("no output".into()));
        }
        for (id, g) in gates.iter().enumerate() {
            match g {
                Gate::Input(v) if *v >= pins.len() => return Err(Error::Circuit(format!("gate {id}: variable {v} out of range"))),
                Gate::Add(c) if c.is_empty() => return Err(Error::Circuit(format!("gate {id}: empty addition"))),
                Gate::Add(c) if c.len() > 2 && !wide_add => {
                    return Err(Error::Circuit(format!("gate {id}: addition fan-in {} in a fan-in-2 circuit", c.len())))
                }
                _ => {}
            }
            let mut bad = false;
            g.for_each_child(|c| bad |= c >= id);
            if bad {
                return Err(Error::Circuit(format!("gate {id}: child id not smaller than parent")));
            }
        }
        if let Some(&o) = outputs.iter().find(|&&o| o >= gates.len()) {
            return Err(Error::Circuit(format!("output {o} out of range")));
        }
        let mut c = Circuit { gates, outputs, num_free, pins, wide_add, metrics: Metrics::default(), degrees: vec![] };
        c.compute_metrics();
        Ok(c)
    }

    fn compute_metrics(&mut self) {
        let n = self.gates.len();
        let mut depth = vec![0usize; n];
        let mut mdepth = vec![0usize; n];
        let mut deg = vec![0usize; n];
        let mut fanin = 0;
        for (i, g) in self.gates.iter().enumerate() {
            match g {
                Gate::Input(v) => deg[i] = usize::from(self.pins[*v].is_none()),
                Gate::Add(c) => {
                    fanin = fanin.max(c.len());
                    depth[i] = 1 + c.iter().map(|&x| depth[x]).max().unwrap_or(0);
                    mdepth[i] = c.iter().map(|&x| mdepth[x]).max().unwrap_or(0);
                    deg[i] = c.iter().map(|&x| deg[x]).max().unwrap_or(0);
                }
                Gate::Mul(a, b) => {
                    depth[i] = 1 + depth[*a].max(depth[*b]);
                    mdepth[i] = 1 + mdepth[*a].max(mdepth[*b]);
                    deg[i] = deg[*a] + deg[*b];
                }
            }
        }
        self.metrics = Metrics {
            size: n,
            depth: self.outputs.iter().map(|&o| depth[o]).max().unwrap_or(0),
            degree: self.outputs.iter().map(|&o| deg[o]).max().unwrap_or(0),
            mult_depth: self.outputs.iter().map(|&o| mdepth[o]).max().unwrap_or(0),
            max_add_fanin: fanin,
        };
        self.degrees = deg;
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }
    pub fn output(&self) -> usize {
        self.outputs[0]
    }
    pub fn num_vars(&self) -> usize {
        self.pins.len()
    }
    pub fn num_free(&self) -> usize {
        self.num_free
    }
    pub fn pins(&self) -> &[Option<GaussRat>] {
        &self.pins
    }
    pub fn pin(&self, v: usize) -> Option<&GaussRat> {
        self.pins.get(v).and_then(|p| p.as_ref())
    }
    /// Variables without a pinned value, in index order.
    pub fn free_vars(&self) -> Vec<usize> {
        (0..self.pins.len()).filter(|&v| self.pins[v].is_none()).collect()
    }
    pub fn is_wide_add(&self) -> bool {
        self.wide_add
    }
    pub fn metrics(&self) -> Metrics {
        self.metrics
    }
    pub fn size(&self) -> usize {
        self.gates.len()
    }
    /// Formal degree of every gate.
    pub fn gate_degrees(&self) -> &[usize] {
        &self.degrees
    }
    /// Longest path (in edges) from an input to each gate.
    pub fn gate_depths(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            let mut m = None;
            g.for_each_child(|c| m = Some(m.unwrap_or(0).max(d[c])));
            d[i] = m.map_or(0, |x| x + 1);
        }
        d
    }
    pub fn is_fan_in_2(&self) -> bool {
        self.gates.iter().all(|g| !matches!(g, Gate::Add(c) if c.len() > 2))
    }

    /// Circuit with only output `i`, pruned to the gates it reaches.
    pub fn view(&self, i: usize) -> Circuit {
        let mut b = Builder::from_circuit_vars(self);
        let map = b.copy_gates(self, &|v| VarMap::Keep(v));
        let o = map[self.outputs[i]];
        b.finish_wide(vec![o], self.wide_add)
    }

    /// Same circuit over the first `num_free` free variables; fails if a
    /// dropped variable is still read.
    pub fn with_num_free(&self, num_free: usize) -> Result<Circuit> {
        for g in &self.gates {
            if let Gate::Input(v) = g {
                if self.pins[*v].is_none() && *v >= num_free {
                    return Err(Error::Circuit(format!("free variable {v} is still used")));
                }
            }
        }
        let mut b = Builder::new(num_free);
        let map = b.copy_gates(self, &|v| VarMap::Keep(v));
        let o = self.outputs.iter().map(|&x| map[x]).collect();
        Ok(b.finish_wide(o, self.wide_add))
    }

    /// Evaluates all outputs; `assignment.len()` must equal `num_vars()`,
    /// pinned entries are overridden by their values.
    pub fn eval_all<T: Scalar>(&self, assignment: &[T], ctx: &T::Ctx) -> Result<Vec<T>> {
        if assignment.len() != self.num_vars() {
            return Err(Error::Arity { expected: self.num_vars(), got: assignment.len() });
        }
        let pinned: Vec<Option<T>> = self.pins.iter().map(|p| p.as_ref().map(|q| T::embed(q, ctx))).collect();
        let mut val: Vec<T> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let x = match g {
                Gate::Input(v) => pinned[*v].clone().unwrap_or_else(|| assignment[*v].clone()),
                Gate::Add(c) => {
                    let mut acc = val[c[0]].clone();
                    for &x in &c[1..] {
                        acc = acc.add(&val[x]);
                    }
                    acc
                }
                Gate::Mul(a, b) => val[*a].mul(&val[*b]),
            };
            val.push(x);
        }
        Ok(self.outputs.iter().map(|&o| val[o].clone()).collect())
    }

    /// Evaluates all outputs given values for the free variables only.
    pub fn eval_free<T: Scalar>(&self, free: &[T], ctx: &T::Ctx) -> Result<Vec<T>> {
        let fv = self.free_vars();
        if free.len() != fv.len() {
            return Err(Error::Arity { expected: fv.len(), got: free.len() });
        }
        let zero = T::embed(&GaussRat::zero(), ctx);
        let mut a = vec![zero; self.num_vars()];
        for (v, x) in fv.iter().zip(free) {
            a[*v] = x.clone();
        }
        self.eval_all(&a, ctx)
    }

    /// Evaluates gate-by-gate and returns every gate value.
    pub fn eval_gates<T: Scalar>(&self, assignment: &[T], ctx: &T::Ctx) -> Result<Vec<T>> {
        if assignment.len() != self.num_vars() {
            return Err(Error::Arity { expected: self.num_vars(), got: assignment.len() });
        }
        let mut val: Vec<T> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let x = match g {
                Gate::Input(v) => match &self.pins[*v] {
                    Some(q) => T::embed(q, ctx),
                    None => assignment[*v].clone(),
                },
                Gate::Add(c) => c[1..].iter().fold(val[c[0]].clone(), |acc, &x| acc.add(&val[x])),
                Gate::Mul(a, b) => val[*a].mul(&val[*b]),
            };
            val.push(x);
        }
        Ok(val)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# VARS {} FREE {}", self.num_vars(), self.num_free);
        for (v, p) in self.pins.iter().enumerate() {
            if let Some(q) = p {
                let _ = writeln!(s, "# PIN {v} {} {}", q.re, q.im);
            }
        }
        for (i, g) in self.gates.iter().enumerate() {
            let _ = match g {
                Gate::Input(v) => writeln!(s, "{i} IN {v}"),
                Gate::Add(c) => {
                    let cs: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                    writeln!(s, "{i} ADD {}", cs.join(" "))
                }
                Gate::Mul(a, b) => writeln!(s, "{i} MUL {a} {b}"),
            };
        }
        for o in &self.outputs {
            let _ = writeln!(s, "OUT {o}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let bad = |l: &str| Error::Parse(format!("bad circuit line `{l}`"));
        let mut gates = vec![];
        let mut outputs = vec![];
        let mut pins: Vec<Option<GaussRat>> = vec![];
        let mut num_free = None;
        let mut max_var = 0usize;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok.as_slice() {
                ["#", "VARS", n, "FREE", f] => {
                    let n: usize = n.parse().map_err(|_| bad(line))?;
                    pins.resize(n, None);
                    num_free = Some(f.parse().map_err(|_| bad(line))?);
                }
                ["#", "PIN", v, re, im] => {
                    let v: usize = v.parse().map_err(|_| bad(line))?;
                    if v >= pins.len() {
                        pins.resize(v + 1, None);
                    }
                    pins[v] = Some(GaussRat::new(parse_q(re)?, parse_q(im)?));
                }
                ["#", ..] => {}
                ["OUT", o] => outputs.push(o.parse().map_err(|_| bad(line))?),
                [id, op, rest @ ..] => {
                    let id: usize = id.parse().map_err(|_| bad(line))?;
                    if id != gates.len() {
                        return Err(Error::Parse(format!("gate ids must be dense, expected {}", gates.len())));
                    }
                    let nums: Vec<usize> = rest.iter().map(|t| t.parse().map_err(|_| bad(line))).collect::<Result<_>>()?;
                    let g = match (*op, nums.as_slice()) {
                        ("IN", [v]) => {
                            max_var = max_var.max(*v + 1);
                            Gate::Input(*v)
                        }
                        ("ADD", c) if !c.is_empty() => Gate::Add(c.to_vec()),
                        ("MUL", [a, b]) => Gate::Mul(*a, *b),
                        _ => return Err(bad(line)),
                    };
                    gates.push(g);
                }
                _ => return Err(bad(line)),
            }
        }
        if pins.len() < max_var {
            pins.resize(max_var, None);
        }
        let wide = gates.iter().any(|g| matches!(g, Gate::Add(c) if c.len() > 2));
        let nf = num_free.unwrap_or(pins.len());
        Circuit::from_parts(gates, outputs, nf, pins, wide)
    }
}

/// Evaluates the primary output in the mode of the assignment.
pub fn evaluate(c: &Circuit, assignment: &[ComplexScalar]) -> Result<ComplexScalar> {
    if assignment.len() != c.num_vars() {
        return Err(Error::Arity { expected: c.num_vars(), got: assignment.len() });
    }
    let Some(first) = assignment.first() else {
        // No variables: the circuit is constant; evaluate exactly.
        return Ok(ComplexScalar::Exact(c.eval_all::<GaussRat>(&[], &())?.swap_remove(0)));
    };
    match first {
        ComplexScalar::Exact(_) => {
            let a: Vec<GaussRat> = assignment.iter().map(|x| x.as_exact().cloned().ok_or(Error::Mode)).collect::<Result<_>>()?;
            Ok(ComplexScalar::Exact(c.eval_all(&a, &())?.swap_remove(0)))
        }
        ComplexScalar::Float(f) => {
            let prec = f.prec;
            let a: Vec<CFloat> = assignment
                .iter()
                .map(|x| match x {
                    ComplexScalar::Float(f) => Ok(f.clone()),
                    _ => Err(Error::Mode),
                })
                .collect::<Result<_>>()?;
            Ok(ComplexScalar::Float(c.eval_all(&a, &prec)?.swap_remove(0)))
        }
    }
}

pub fn metrics(c: &Circuit) -> (usize, usize, usize) {
    let m = c.metrics();
    (m.size, m.depth, m.degree)
}

pub(crate) enum VarMap {
    Keep(usize),
    Gate(usize),
}

/// Incremental circuit construction with structural sharing (identical gates
/// are created once) and deduplicated constants.
#[derive(Clone, Debug)]
pub struct Builder {
    gates: Vec<Gate>,
    memo: HashMap<Gate, usize>,
    pins: Vec<Option<GaussRat>>,
    consts: HashMap<GaussRat, usize>,
    num_free: usize,
}

impl Builder {
    pub fn new(num_free: usize) -> Self {
        Builder { gates: vec![], memo: HashMap::new(), pins: vec![None; num_free], consts: HashMap::new(), num_free }
    }

    fn from_circuit_vars(c: &Circuit) -> Self {
        let mut b = Builder::new(c.num_free);
        b.pins = c.pins.clone();
        for (v, p) in c.pins.iter().enumerate() {
            if let Some(q) = p {
                b.consts.entry(q.clone()).or_insert(v);
            }
        }
        b
    }

    fn intern(&mut self, g: Gate) -> usize {
        if let Some(&id) = self.memo.get(&g) {
            return id;
        }
        let id = self.gates.len();
        self.gates.push(g.clone());
        self.memo.insert(g, id);
        id
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }
    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
    pub fn num_free(&self) -> usize {
        self.num_free
    }

    pub fn input(&mut self, v: usize) -> usize {
        if v >= self.pins.len() {
            self.pins.resize(v + 1, None);
            self.num_free = self.num_free.max(v + 1);
        }
        self.intern(Gate::Input(v))
    }

    /// Input gate of a variable pinned to `q`.
    pub fn constant(&mut self, q: &GaussRat) -> usize {
        let v = match self.consts.get(q) {
            Some(&v) => v,
            None => {
                let v = self.pins.len();
                self.pins.push(Some(q.clone()));
                self.consts.insert(q.clone(), v);
                v
            }
        };
        self.intern(Gate::Input(v))
    }

    pub fn zero(&mut self) -> usize {
        self.constant(&GaussRat::zero())
    }
    pub fn one(&mut self) -> usize {
        self.constant(&GaussRat::one())
    }

    pub fn add(&mut self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.intern(Gate::Add(vec![a, b]))
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.intern(Gate::Mul(a, b))
    }

    /// Balanced fan-in-2 sum; `None` for an empty list.
    pub fn sum(&mut self, mut xs: Vec<usize>) -> Option<usize> {
        if xs.is_empty() {
            return None;
        }
        while xs.len() > 1 {
            let mut next = Vec::with_capacity(xs.len().div_ceil(2));
            for ch in xs.chunks(2) {
                next.push(if ch.len() == 2 { self.add(ch[0], ch[1]) } else { ch[0] });
            }
            xs = next;
        }
        Some(xs[0])
    }

    /// Single addition gate of arbitrary fan-in (marks the circuit wide).
    pub fn add_wide(&mut self, mut xs: Vec<usize>) -> Option<usize> {
        match xs.len() {
            0 => None,
            1 => Some(xs[0]),
            _ => {
                xs.sort_unstable();
                Some(self.intern(Gate::Add(xs)))
            }
        }
    }

    pub fn scale(&mut self, q: &GaussRat, x: usize) -> usize {
        if q.is_one() {
            return x;
        }
        let c = self.constant(q);
        self.mul(c, x)
    }

    pub fn neg(&mut self, x: usize) -> usize {
        self.scale(&GaussRat::int(-1), x)
    }

    pub fn sub(&mut self, a: usize, b: usize) -> usize {
        let nb = self.neg(b);
        self.add(a, nb)
    }

    /// Copies all gates of `c`; `var` decides what each free input becomes.
    pub(crate) fn copy_gates(&mut self, c: &Circuit, var: &dyn Fn(usize) -> VarMap) -> Vec<usize> {
        let mut map = Vec::with_capacity(c.gates.len());
        for g in &c.gates {
            let id = match g {
                Gate::Input(v) => match &c.pins[*v] {
                    Some(q) => self.constant(q),
                    None => match var(*v) {
                        VarMap::Keep(w) => self.input(w),
                        VarMap::Gate(id) => id,
                    },
                },
                Gate::Add(ch) => {
                    let xs: Vec<usize> = ch.iter().map(|&x| map[x]).collect();
                    if xs.len() == 2 {
                        self.add(xs[0], xs[1])
                    } else {
                        self.add_wide(xs).expect("nonempty")
                    }
                }
                Gate::Mul(a, b) => self.mul(map[*a], map[*b]),
            };
            map.push(id);
        }
        map
    }

    /// Freezes the circuit, keeping only gates reachable from `outputs`.
    pub fn finish(self, outputs: Vec<usize>) -> Circuit {
        let wide = self.gates.iter().any(|g| matches!(g, Gate::Add(c) if c.len() > 2));
        self.finish_wide(outputs, wide)
    }

    fn finish_wide(self, outputs: Vec<usize>, wide: bool) -> Circuit {
        let n = self.gates.len();
        let mut live = vec![false; n];
        for &o in &outputs {
            live[o] = true;
        }
        for i in (0..n).rev() {
            if live[i] {
                let g = &self.gates[i];
                match g {
                    Gate::Input(_) => {}
                    Gate::Add(c) => c.iter().for_each(|&x| live[x] = true),
                    Gate::Mul(a, b) => {
                        live[*a] = true;
                        live[*b] = true;
                    }
                }
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut gates = Vec::new();
        for (i, g) in self.gates.into_iter().enumerate() {
            if !live[i] {
                continue;
            }
            remap[i] = gates.len();
            gates.push(match g {
                Gate::Input(v) => Gate::Input(v),
                Gate::Add(c) => Gate::Add(c.into_iter().map(|x| remap[x]).collect()),
                Gate::Mul(a, b) => Gate::Mul(remap[a], remap[b]),
            });
        }
        let outputs = outputs.into_iter().map(|o| remap[o]).collect();
        Circuit::from_parts(gates, outputs, self.num_free, self.pins, wide).expect("builder produces valid circuits")
    }
}

/// `outer(inner_1(x), …, inner_k(x))`. The free variables of `outer`, in index
/// order, are replaced by the primary outputs of `inner`; pinned variables of
/// `outer` stay constants. Inner circuits share one variable space.
pub fn compose(outer: &Circuit, inner: &[Circuit]) -> Result<Circuit> {
    let ofree = outer.free_vars();
    if ofree.len() != inner.len() {
        return Err(Error::Arity { expected: ofree.len(), got: inner.len() });
    }
    let nf = inner.iter().map(|c| c.num_free).max().unwrap_or(0);
    let mut b = Builder::new(nf);
    let mut outs = Vec::with_capacity(inner.len());
    for c in inner {
        let map = b.copy_gates(c, &VarMap::Keep);
        outs.push(map[c.output()]);
    }
    let slot: HashMap<usize, usize> = ofree.iter().enumerate().map(|(k, &v)| (v, outs[k])).collect();
    let map = b.copy_gates(outer, &|v| VarMap::Gate(slot[&v]));
    let o: Vec<usize> = outer.outputs.iter().map(|&x| map[x]).collect();
    Ok(b.finish(o))
}

/// Like [`compose`] but the inner values are the outputs of one shared
/// multi-output circuit.
pub fn compose_multi(outer: &Circuit, inner: &Circuit) -> Result<Circuit> {
    let ofree = outer.free_vars();
    if ofree.len() != inner.outputs.len() {
        return Err(Error::Arity { expected: ofree.len(), got: inner.outputs.len() });
    }
    let mut b = Builder::new(inner.num_free);
    let map = b.copy_gates(inner, &VarMap::Keep);
    let slot: HashMap<usize, usize> = ofree.iter().enumerate().map(|(k, &v)| (v, map[inner.outputs[k]])).collect();
    let map = b.copy_gates(outer, &|v| VarMap::Gate(slot[&v]));
    let o: Vec<usize> = outer.outputs.iter().map(|&x| map[x]).collect();
    Ok(b.finish(o))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(v: i64) -> ComplexScalar {
        ComplexScalar::Exact(GaussRat::int(v))
    }

    #[test]
    fn evaluates_simple_polynomial() {
        let mut b = Builder::new(3);
        let (x0, x1, x2) = (b.input(0), b.input(1), b.input(2));
        let p = b.mul(x0, x1);
        let s = b.add(p, x2);
        let c = b.finish(vec![s]);
        let v = evaluate(&c, &[ex(2), ex(3), ex(4)]).unwrap();
        assert_eq!(v.as_exact().unwrap(), &GaussRat::int(10));
        assert!(matches!(evaluate(&c, &[ex(1)]), Err(Error::Arity { .. })));
    }

    #[test]
    fn metric_examples() {
        let mut b = Builder::new(1);
        let x = b.input(0);
        assert_eq!(metrics(&b.finish(vec![x])), (1, 0, 1));

        let mut b = Builder::new(8);
        let mut layer: Vec<usize> = (0..8).map(|v| b.input(v)).collect();
        while layer.len() > 1 {
            layer = layer.chunks(2).map(|p| b.mul(p[0], p[1])).collect();
        }
        assert_eq!(metrics(&b.finish(layer)), (15, 3, 8));

        let mut b = Builder::new(8);
        let mut acc = b.input(0);
        for v in 1..8 {
            let x = b.input(v);
            acc = b.mul(acc, x);
        }
        let (_, d, deg) = metrics(&b.finish(vec![acc]));
        assert_eq!((d, deg), (7, 8));
    }

    #[test]
    fn rejects_bad_topology() {
        let g = vec![Gate::Input(0), Gate::Mul(0, 2), Gate::Input(0)];
        assert!(Circuit::from_parts(g, vec![1], 1, vec![None], false).is_err());
        let g = vec![Gate::Input(0), Gate::Input(1), Gate::Input(2), Gate::Add(vec![0, 1, 2])];
        assert!(Circuit::from_parts(g.clone(), vec![3], 3, vec![None; 3], false).is_err());
        assert!(Circuit::from_parts(g, vec![3], 3, vec![None; 3], true).is_ok());
    }

    #[test]
    fn compose_example_and_roundtrip() {
        let mut o = Builder::new(2);
        let (a, bb) = (o.input(0), o.input(1));
        let s = o.add(a, bb);
        let outer = o.finish(vec![s]);
        let mut i1 = Builder::new(1);
        let x = i1.input(0);
        let sq = i1.mul(x, x);
        let inner1 = i1.finish(vec![sq]);
        let mut i2 = Builder::new(1);
        let one = i2.one();
        let inner2 = i2.finish(vec![one]);
        let c = compose(&outer, &[inner1, inner2]).unwrap();
        let v = c.eval_free::<GaussRat>(&[GaussRat::int(5)], &()).unwrap();
        assert_eq!(v[0], GaussRat::int(26));
        let back = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(back.gates(), c.gates());
        assert_eq!(back.eval_free::<GaussRat>(&[GaussRat::int(5)], &()).unwrap()[0], GaussRat::int(26));
    }
}
