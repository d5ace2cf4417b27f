//! Depth reduction for low-degree circuits: homogenize, then rebuild every
//! gate from products across a degree frontier so that each level of the
//! recursion halves the degree. Output has fan-in-2 products and wide sums.
//!
//! Notation: `[u:w]` is the derivative of `u` with respect to `w` when `w` is
//! replaced by a fresh variable; it is linear whenever `deg w > deg u / 2`.
//! For `m < deg u ≤ 2m`, with `G_m` the products of degree `> m` whose two
//! factors have degree `≤ m`,
//!   `u = Σ_{t∈G_m} [u:t]·t_a·t_b` and, for `deg w ≤ m`,
//!   `[u:w] = Σ_{t∈G_m} [u:t]·([t_a:w]·t_b + [t_b:w]·t_a)`.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::circuit::{Builder, Circuit, Gate};
use crate::error::{Error, Result};
use crate::scalar::GaussRat;

/// Multiplicative depth after reduction is at most `C3·⌈log₂(d+1)⌉² + C4`.
pub const C3: usize = 2;
pub const C4: usize = 6;

pub fn mult_depth_bound(degree: usize) -> usize {
    let l = ceil_log2(degree + 1);
    C3 * l * l + C4
}

pub fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Item {
    Var(usize),
    Lin(usize),
    Atom(usize),
}

/// Homogeneous sum `Σ c·item`, all items of degree `deg`.
struct Lin {
    deg: usize,
    items: Vec<(GaussRat, Item)>,
}

/// Product of two homogeneous sums, both of degree ≥ 1.
struct Atom {
    deg: usize,
    a: usize,
    b: usize,
}

#[derive(Default)]
struct Homog {
    lins: Vec<Lin>,
    atoms: Vec<Atom>,
    atom_ids: HashMap<(usize, usize), usize>,
}

impl Homog {
    fn lin(&mut self, deg: usize, items: Vec<(GaussRat, Item)>) -> Option<usize> {
        let items: Vec<_> = items.into_iter().filter(|(c, _)| !c.is_zero()).collect();
        match items.as_slice() {
            [] => None,
            [(c, Item::Lin(l))] if c.is_one() => Some(*l),
            _ => {
                self.lins.push(Lin { deg, items });
                Some(self.lins.len() - 1)
            }
        }
    }
    fn atom(&mut self, a: usize, b: usize) -> usize {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&id) = self.atom_ids.get(&key) {
            return id;
        }
        let deg = self.lins[a].deg + self.lins[b].deg;
        self.atoms.push(Atom { deg, a: key.0, b: key.1 });
        let id = self.atoms.len() - 1;
        self.atom_ids.insert(key, id);
        id
    }
}

/// Per-gate homogeneous parts: exact constant part and a sum per degree.
struct Parts {
    c: GaussRat,
    h: Vec<Option<usize>>,
}

fn homogenize(c: &Circuit, hg: &mut Homog) -> Vec<Parts> {
    let mut parts: Vec<Parts> = Vec::with_capacity(c.size());
    for g in c.gates() {
        let p = match g {
            Gate::Input(v) => match c.pin(*v) {
                Some(q) => Parts { c: q.clone(), h: vec![] },
                None => {
                    let l = hg.lin(1, vec![(GaussRat::one(), Item::Var(*v))]);
                    Parts { c: GaussRat::zero(), h: vec![None, l] }
                }
            },
            Gate::Add(ch) => {
                let len = ch.iter().map(|&x| parts[x].h.len()).max().unwrap_or(0);
                let cst = ch.iter().fold(GaussRat::zero(), |a, &x| a.add(&parts[x].c));
                let mut h = vec![None; len];
                for (j, slot) in h.iter_mut().enumerate().skip(1) {
                    let items: Vec<_> = ch.iter().filter_map(|&x| parts[x].h.get(j).copied().flatten()).map(|l| (GaussRat::one(), Item::Lin(l))).collect();
                    *slot = hg.lin(j, items);
                }
                Parts { c: cst, h }
            }
            Gate::Mul(x, y) => {
                let (px, py) = (&parts[*x], &parts[*y]);
                let len = if px.h.is_empty() || py.h.is_empty() { px.h.len().max(py.h.len()) } else { px.h.len() + py.h.len() - 1 };
                let cst = px.c.mul(&py.c);
                let mut h = vec![None; len];
                for (j, slot) in h.iter_mut().enumerate().skip(1) {
                    let mut items = Vec::new();
                    if let Some(l) = py.h.get(j).copied().flatten() {
                        items.push((px.c.clone(), Item::Lin(l)));
                    }
                    if let Some(l) = px.h.get(j).copied().flatten() {
                        items.push((py.c.clone(), Item::Lin(l)));
                    }
                    for a in 1..j {
                        if let (Some(la), Some(lb)) = (px.h.get(a).copied().flatten(), py.h.get(j - a).copied().flatten()) {
                            items.push((GaussRat::one(), Item::Atom(hg.atom(la, lb))));
                        }
                    }
                    *slot = hg.lin(j, items);
                }
                Parts { c: cst, h }
            }
        };
        parts.push(p);
    }
    parts
}

#[derive(Clone, Debug)]
enum Val {
    Zero,
    Const(GaussRat),
    G(usize),
}

struct Reducer<'a> {
    hg: &'a Homog,
    b: Builder,
    p_memo: HashMap<usize, Val>,
    q_memo: HashMap<(usize, usize), Val>,
    coef_memo: HashMap<usize, Rc<HashMap<usize, GaussRat>>>,
    front_memo: HashMap<(usize, usize), Vec<usize>>,
    flat_memo: HashMap<usize, Vec<(usize, GaussRat)>>,
}

impl Reducer<'_> {
    fn mul(&mut self, x: &Val, y: &Val) -> Val {
        match (x, y) {
            (Val::Zero, _) | (_, Val::Zero) => Val::Zero,
            (Val::Const(a), Val::Const(b)) => Val::Const(a.mul(b)),
            (Val::Const(a), Val::G(g)) | (Val::G(g), Val::Const(a)) => Val::G(self.b.scale(a, *g)),
            (Val::G(g), Val::G(h)) => Val::G(self.b.mul(*g, *h)),
        }
    }

    fn sum(&mut self, vals: Vec<Val>) -> Val {
        let mut cst = GaussRat::zero();
        let mut gates = Vec::new();
        for v in vals {
            match v {
                Val::Zero => {}
                Val::Const(c) => cst = cst.add(&c),
                Val::G(g) => gates.push(g),
            }
        }
        if !cst.is_zero() {
            if gates.is_empty() {
                return Val::Const(cst);
            }
            gates.push(self.b.constant(&cst));
        }
        match self.b.add_wide(gates) {
            None => Val::Zero,
            Some(g) => Val::G(g),
        }
    }

    /// Coefficient of atom `w` in the same-degree sum `u`.
    fn coef(&mut self, u: usize, w: usize) -> GaussRat {
        self.atom_map(u).get(&w).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// All atoms of a sum with their exact coefficients.
    fn atom_map(&mut self, u: usize) -> Rc<HashMap<usize, GaussRat>> {
        if let Some(m) = self.coef_memo.get(&u) {
            return m.clone();
        }
        let mut acc: HashMap<usize, GaussRat> = HashMap::new();
        for (c, it) in &self.hg.lins[u].items {
            match it {
                Item::Atom(a) => {
                    let e = acc.entry(*a).or_insert_with(GaussRat::zero);
                    *e = e.add(c);
                }
                Item::Lin(l) => {
                    for (a, d) in self.atom_map(*l).iter() {
                        let e = acc.entry(*a).or_insert_with(GaussRat::zero);
                        *e = e.add(&c.mul(d));
                    }
                }
                Item::Var(_) => {}
            }
        }
        let m = Rc::new(acc);
        self.coef_memo.insert(u, m.clone());
        m
    }

    /// `G_m(u)`: atoms of degree `> m` with both factors of degree `≤ m`,
    /// reached from `u` through gates of degree `> m`.
    fn frontier(&mut self, u: usize, m: usize) -> Vec<usize> {
        if let Some(f) = self.front_memo.get(&(u, m)) {
            return f.clone();
        }
        let hg = self.hg;
        let mut seen_lin = HashSet::new();
        let mut seen_atom = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![u];
        seen_lin.insert(u);
        while let Some(l) = stack.pop() {
            for (_, it) in &hg.lins[l].items {
                match *it {
                    Item::Lin(c) if hg.lins[c].deg > m => {
                        if seen_lin.insert(c) {
                            stack.push(c);
                        }
                    }
                    Item::Atom(a) if hg.atoms[a].deg > m => {
                        if !seen_atom.insert(a) {
                            continue;
                        }
                        let at = &hg.atoms[a];
                        let (da, db) = (hg.lins[at.a].deg, hg.lins[at.b].deg);
                        if da <= m && db <= m {
                            out.push(a);
                        } else {
                            for c in [at.a, at.b] {
                                if hg.lins[c].deg > m && seen_lin.insert(c) {
                                    stack.push(c);
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        out.sort_unstable();
        self.front_memo.insert((u, m), out.clone());
        out
    }

    /// Exact variable coefficients of a degree-1 sum.
    fn flat(&mut self, u: usize) -> Vec<(usize, GaussRat)> {
        if let Some(f) = self.flat_memo.get(&u) {
            return f.clone();
        }
        let mut acc: HashMap<usize, GaussRat> = HashMap::new();
        for (c, it) in self.hg.lins[u].items.clone() {
            match it {
                Item::Var(x) => {
                    let e = acc.entry(x).or_insert_with(GaussRat::zero);
                    *e = e.add(&c);
                }
                Item::Lin(l) => {
                    for (x, d) in self.flat(l) {
                        let e = acc.entry(x).or_insert_with(GaussRat::zero);
                        *e = e.add(&c.mul(&d));
                    }
                }
                Item::Atom(_) => unreachable!("degree-1 sum holds no products"),
            }
        }
        let mut f: Vec<(usize, GaussRat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        f.sort_by_key(|(x, _)| *x);
        self.flat_memo.insert(u, f.clone());
        f
    }

    /// Degree-1 sums are emitted as one wide sum of scaled variables.
    fn linear(&mut self, u: usize) -> Val {
        let terms: Vec<Val> = self
            .flat(u)
            .into_iter()
            .map(|(x, c)| {
                let g = self.b.input(x);
                Val::G(self.b.scale(&c, g))
            })
            .collect();
        self.sum(terms)
    }

    /// The polynomial of sum `u`.
    fn p(&mut self, u: usize) -> Val {
        if let Some(v) = self.p_memo.get(&u) {
            return v.clone();
        }
        let d = self.hg.lins[u].deg;
        let v = if d == 1 {
            self.linear(u)
        } else {
            let m = d.div_ceil(2);
            let front = self.frontier(u, m);
            let mut terms = Vec::with_capacity(front.len());
            for t in front {
                let (a, b) = (self.hg.atoms[t].a, self.hg.atoms[t].b);
                let q = self.q(u, t);
                let pa = self.p(a);
                let pb = self.p(b);
                let ab = self.mul(&pa, &pb);
                terms.push(self.mul(&q, &ab));
            }
            self.sum(terms)
        };
        self.p_memo.insert(u, v.clone());
        v
    }

    /// `[u:w]` for a sum `u` and an atom `w` with `deg u < 2·deg w`.
    fn q(&mut self, u: usize, w: usize) -> Val {
        let (du, dw) = (self.hg.lins[u].deg, self.hg.atoms[w].deg);
        if du < dw {
            return Val::Zero;
        }
        if du == dw {
            let c = self.coef(u, w);
            return if c.is_zero() { Val::Zero } else { Val::Const(c) };
        }
        debug_assert!(du < 2 * dw);
        if let Some(v) = self.q_memo.get(&(u, w)) {
            return v.clone();
        }
        let m = (du + dw) / 2;
        let front = self.frontier(u, m);
        let mut terms = Vec::new();
        for t in front {
            let (a, b) = (self.hg.atoms[t].a, self.hg.atoms[t].b);
            let qa = self.q_lin(a, w);
            let qb = self.q_lin(b, w);
            if matches!(qa, Val::Zero) && matches!(qb, Val::Zero) {
                continue;
            }
            let mut inner = Vec::with_capacity(2);
            if !matches!(qa, Val::Zero) {
                let pb = self.p(b);
                inner.push(self.mul(&qa, &pb));
            }
            if !matches!(qb, Val::Zero) {
                let pa = self.p(a);
                inner.push(self.mul(&qb, &pa));
            }
            let tw = self.sum(inner);
            let ut = self.q(u, t);
            terms.push(self.mul(&ut, &tw));
        }
        let v = self.sum(terms);
        self.q_memo.insert((u, w), v.clone());
        v
    }

    fn q_lin(&mut self, u: usize, w: usize) -> Val {
        if self.hg.lins[u].deg < self.hg.atoms[w].deg {
            Val::Zero
        } else {
            self.q(u, w)
        }
    }
}

/// Equivalent circuit of multiplicative depth `O(log² d)` (in practice
/// `O(log d)`) with wide additions. Each output keeps its polynomial.
pub fn depth_reduce(c: &Circuit) -> Result<Circuit> {
    let mut hg = Homog::default();
    let parts = homogenize(c, &mut hg);
    let mut r = Reducer {
        hg: &hg,
        b: Builder::new(c.num_free()),
        p_memo: HashMap::new(),
        q_memo: HashMap::new(),
        coef_memo: HashMap::new(),
        front_memo: HashMap::new(),
        flat_memo: HashMap::new(),
    };
    let mut outs = Vec::with_capacity(c.outputs().len());
    for &o in c.outputs() {
        let mut vals = vec![Val::Const(parts[o].c.clone())];
        for l in parts[o].h.iter().flatten() {
            vals.push(r.p(*l));
        }
        let v = r.sum(vals);
        let g = match v {
            Val::Zero => r.b.zero(),
            Val::Const(q) => r.b.constant(&q),
            Val::G(g) => g,
        };
        outs.push(g);
    }
    let out = r.b.finish(outs);
    let (mi, mo) = (c.metrics(), out.metrics());
    if mo.degree > mi.degree {
        return Err(Error::Circuit(format!("reduction raised degree from {} to {}", mi.degree, mo.degree)));
    }
    if mo.mult_depth > mult_depth_bound(mi.degree) {
        return Err(Error::Circuit(format!(
            "multiplicative depth {} exceeds bound {} for degree {}",
            mo.mult_depth,
            mult_depth_bound(mi.degree),
            mi.degree
        )));
    }
    Ok(out)
}

/// Replaces every wide addition by a balanced tree of fan-in-2 additions.
pub fn binarize_adds(c: &Circuit) -> Circuit {
    let mut b = Builder::new(c.num_free());
    let mut map = Vec::with_capacity(c.size());
    for g in c.gates() {
        let id = match g {
            Gate::Input(v) => match c.pin(*v) {
                Some(q) => b.constant(q),
                None => b.input(*v),
            },
            Gate::Add(ch) => b.sum(ch.iter().map(|&x| map[x]).collect()).expect("nonempty"),
            Gate::Mul(x, y) => b.mul(map[*x], map[*y]),
        };
        map.push(id);
    }
    let outs = c.outputs().iter().map(|&o| map[o]).collect();
    b.finish(outs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Fp2, GaussRat};
    use rand::SeedableRng;

    fn agree(a: &Circuit, b: &Circuit, points: usize) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..points {
            let x: Vec<Fp2> = (0..a.num_free()).map(|_| Fp2::random(&mut rng)).collect();
            assert_eq!(a.eval_free(&x, &()).unwrap(), b.eval_free(&x, &()).unwrap());
        }
    }

    #[test]
    fn chain_of_eight() {
        let mut b = Builder::new(8);
        let mut acc = b.input(0);
        for i in 1..8 {
            let x = b.input(i);
            acc = b.mul(acc, x);
        }
        let c = b.finish(vec![acc]);
        let r = depth_reduce(&c).unwrap();
        agree(&c, &r, 20);
        let m = r.metrics();
        assert!(m.mult_depth <= mult_depth_bound(8));
        // depth ≤ C3·log₂8·(log₂ s + log₂ 8)
        assert!(m.depth <= C3 * 3 * (ceil_log2(c.size()) + 3));
    }

    #[test]
    fn single_input_unchanged() {
        let mut b = Builder::new(1);
        let x = b.input(0);
        let c = b.finish(vec![x]);
        let r = depth_reduce(&c).unwrap();
        assert_eq!(r.size(), 1);
        assert_eq!(r.gates()[0], Gate::Input(0));
    }

    #[test]
    fn nonhomogeneous_power() {
        // (x + y + 2)^9 by repeated multiplication
        let mut b = Builder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let two = b.constant(&GaussRat::int(2));
        let s = b.add(x, y);
        let s = b.add(s, two);
        let mut acc = s;
        for _ in 1..9 {
            acc = b.mul(acc, s);
        }
        let c = b.finish(vec![acc]);
        let r = depth_reduce(&c).unwrap();
        agree(&c, &r, 20);
        assert!(r.metrics().degree <= 9);
    }

    #[test]
    fn binarize_wide_add() {
        let mut b = Builder::new(8);
        let xs: Vec<usize> = (0..8).map(|i| b.input(i)).collect();
        let s = b.add_wide(xs).unwrap();
        let c = b.finish(vec![s]);
        let bc = binarize_adds(&c);
        assert!(bc.is_fan_in_2());
        assert_eq!(bc.metrics().depth, 3);
        agree(&c, &bc, 20);
    }
}
