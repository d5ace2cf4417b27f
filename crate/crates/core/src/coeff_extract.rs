//! Coefficient extraction: from a circuit for `p(x, z)` build circuits for
//! the coefficients `[z^i]p`, `0 ≤ i ≤ k`, as one shared table of gates
//! `(v, i)`.

use crate::circuit::{Builder, Circuit, Gate};
use crate::error::{Error, Result};

/// `size ≤ SIZE_CONSTANT·(k+1)²·|C| + 2` (the `+2` covers the shared 0 and 1).
pub const SIZE_CONSTANT: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Comp {
    Zero,
    One,
    G(usize),
}

fn materialize(b: &mut Builder, c: Comp) -> Option<usize> {
    match c {
        Comp::Zero => None,
        Comp::One => Some(b.one()),
        Comp::G(g) => Some(g),
    }
}

fn combine(b: &mut Builder, terms: Vec<Comp>, wide: bool) -> Comp {
    let terms: Vec<Comp> = terms.into_iter().filter(|t| *t != Comp::Zero).collect();
    match terms.len() {
        0 => Comp::Zero,
        1 => terms[0],
        _ => {
            let ids: Vec<usize> = terms.into_iter().filter_map(|t| materialize(b, t)).collect();
            let s = if wide { b.add_wide(ids) } else { b.sum(ids) };
            Comp::G(s.expect("nonempty"))
        }
    }
}

fn product(b: &mut Builder, x: Comp, y: Comp) -> Comp {
    match (x, y) {
        (Comp::Zero, _) | (_, Comp::Zero) => Comp::Zero,
        (Comp::One, o) | (o, Comp::One) => o,
        (Comp::G(p), Comp::G(q)) => Comp::G(b.mul(p, q)),
    }
}

/// Size and depth guarantees checked on every extraction.
pub fn size_bound(input_size: usize, k: usize) -> usize {
    SIZE_CONSTANT * (k + 1) * (k + 1) * input_size + 2
}
pub fn depth_bound(input_depth: usize, k: usize) -> usize {
    (k + 1) * input_depth
}

/// Returns one circuit whose outputs are `[z^0]p, …, [z^{k_max}]p`, in the
/// same variable space as `c` (the `z` variable is left unused).
pub fn extract_coefficients_batch(c: &Circuit, z_var: usize, k_max: usize) -> Result<Circuit> {
    if z_var >= c.num_vars() {
        return Err(Error::Parameter(format!("z variable {z_var} out of range")));
    }
    if c.pin(z_var).is_some() {
        return Err(Error::Parameter(format!("z variable {z_var} is pinned")));
    }
    let wide = c.is_wide_add();
    let mut b = Builder::new(c.num_free());
    let mut table: Vec<Vec<Comp>> = Vec::with_capacity(c.size());
    for g in c.gates() {
        let comps = match g {
            Gate::Input(v) if *v == z_var => {
                let mut t = vec![Comp::Zero, Comp::One];
                t.truncate(k_max + 1);
                t
            }
            Gate::Input(v) => match c.pin(*v) {
                Some(q) if q.is_zero() => vec![],
                Some(q) if q.is_one() => vec![Comp::One],
                Some(q) => vec![Comp::G(b.constant(q))],
                None => vec![Comp::G(b.input(*v))],
            },
            Gate::Add(ch) => {
                let len = ch.iter().map(|&x| table[x].len()).max().unwrap_or(0);
                (0..len)
                    .map(|i| {
                        let terms = ch.iter().map(|&x| table[x].get(i).copied().unwrap_or(Comp::Zero)).collect();
                        combine(&mut b, terms, wide)
                    })
                    .collect()
            }
            Gate::Mul(p, q) => {
                let (lp, lq) = (table[*p].len(), table[*q].len());
                let len = if lp == 0 || lq == 0 { 0 } else { (lp + lq - 1).min(k_max + 1) };
                (0..len)
                    .map(|i| {
                        let terms = (0..=i)
                            .filter(|&j| j < lp && i - j < lq)
                            .map(|j| product(&mut b, table[*p][j], table[*q][i - j]))
                            .collect();
                        combine(&mut b, terms, false)
                    })
                    .collect()
            }
        };
        let mut comps = comps;
        while comps.last() == Some(&Comp::Zero) {
            comps.pop();
        }
        table.push(comps);
    }
    let out = &table[c.output()];
    let outputs: Vec<usize> = (0..=k_max)
        .map(|i| match out.get(i).copied().unwrap_or(Comp::Zero) {
            Comp::Zero => b.zero(),
            Comp::One => b.one(),
            Comp::G(g) => g,
        })
        .collect();
    let res = b.finish(outputs);
    let m = res.metrics();
    let cm = c.metrics();
    if m.size > size_bound(cm.size, k_max) {
        return Err(Error::Circuit(format!("extraction size {} exceeds bound {}", m.size, size_bound(cm.size, k_max))));
    }
    if !wide && m.depth > depth_bound(cm.depth, k_max) {
        return Err(Error::Circuit(format!("extraction depth {} exceeds bound {}", m.depth, depth_bound(cm.depth, k_max))));
    }
    Ok(res)
}

/// Circuit for `[z^k]p`.
pub fn extract_coefficient(c: &Circuit, z_var: usize, k: usize) -> Result<Circuit> {
    Ok(extract_coefficients_batch(c, z_var, k)?.view(k))
}
