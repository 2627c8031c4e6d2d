//! Conventional QUBO mapping with one-hot encoded node values.
//!
//! Energies follow the normal form
//!
//! ```text
//! H(s) = sum_a sum_b J[a][b] s_a s_b + sum_a bias[a] s_a + offset
//! ```
//!
//! with `J` symmetric and zero on the diagonal, so every unordered pair
//! contributes `2 J[a][b]`. Diagonal terms are folded into the bias using
//! `s^2 = s` when the model is built.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::encoding::{BitState, EncodingLayout};
use crate::error::{Error, Result};
use crate::model::EnergyModel;
use crate::problem::{ColoringInstance, TspInstance};

/// Accumulates polynomial coefficients before freezing them into a [`QuboModel`].
#[derive(Debug, Clone)]
pub struct QuboBuilder {
    dim: usize,
    pairs: BTreeMap<(usize, usize), f64>,
    bias: Vec<f64>,
    offset: f64,
}

impl QuboBuilder {
    pub fn new(dim: usize) -> Self {
        QuboBuilder {
            dim,
            pairs: BTreeMap::new(),
            bias: vec![0.0; dim],
            offset: 0.0,
        }
    }

    /// Adds `coef * s_a * s_b`. A diagonal term folds into the bias.
    pub fn add_term(&mut self, a: usize, b: usize, coef: f64) -> &mut Self {
        assert!(a < self.dim && b < self.dim, "bit index out of range");
        if a == b {
            self.bias[a] += coef;
        } else {
            *self.pairs.entry((a.min(b), a.max(b))).or_insert(0.0) += coef;
        }
        self
    }

    pub fn add_linear(&mut self, a: usize, coef: f64) -> &mut Self {
        self.bias[a] += coef;
        self
    }

    pub fn add_offset(&mut self, c: f64) -> &mut Self {
        self.offset += c;
        self
    }

    /// Adds `penalty * (1 - sum_{a in group} s_a)^2`.
    pub fn add_one_hot_penalty(&mut self, group: &[usize], penalty: f64) -> &mut Self {
        self.offset += penalty;
        for (x, &a) in group.iter().enumerate() {
            // -2P s_a + P s_a^2
            self.bias[a] -= penalty;
            for &b in &group[x + 1..] {
                self.add_term(a, b, 2.0 * penalty);
            }
        }
        self
    }

    pub fn build(&self) -> QuboModel {
        let mut rows = vec![Vec::new(); self.dim];
        for (&(a, b), &c) in &self.pairs {
            if c != 0.0 {
                rows[a].push((b, 0.5 * c));
                rows[b].push((a, 0.5 * c));
            }
        }
        for row in &mut rows {
            row.sort_by_key(|&(b, _)| b);
        }
        let integer = self
            .pairs
            .values()
            .chain(&self.bias)
            .chain(std::iter::once(&self.offset))
            .all(|c| c.fract() == 0.0);
        QuboModel {
            dim: self.dim,
            rows,
            bias: self.bias.clone(),
            offset: self.offset,
            integer,
        }
    }
}

/// Sparse symmetric QUBO.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    dim: usize,
    /// `rows[a]` holds `(b, J[a][b])`, sorted by `b`, for every nonzero entry.
    rows: Vec<Vec<(usize, f64)>>,
    bias: Vec<f64>,
    offset: f64,
    integer: bool,
}

impl QuboModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Symmetric matrix entry `J[a][b]` (zero on the diagonal).
    pub fn pair_weight(&self, a: usize, b: usize) -> f64 {
        self.rows[a]
            .binary_search_by_key(&b, |&(c, _)| c)
            .map(|i| self.rows[a][i].1)
            .unwrap_or(0.0)
    }

    pub fn neighbors(&self, a: usize) -> &[(usize, f64)] {
        &self.rows[a]
    }

    fn check_len(&self, state: &BitState) -> Result<()> {
        if state.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                got: state.len(),
            });
        }
        Ok(())
    }

    /// Quadratic form plus bias plus offset.
    pub fn energy(&self, state: &BitState) -> Result<f64> {
        self.check_len(state)?;
        Ok(self.eval(state))
    }

    /// `H(bit = 1) - H(bit = 0)` in O(row length).
    pub fn delta_h(&self, state: &BitState, bit: usize) -> Result<f64> {
        self.check_len(state)?;
        if bit >= self.dim {
            return Err(Error::IndexOutOfRange {
                what: "bit",
                index: bit,
                limit: self.dim,
            });
        }
        Ok(self.local_delta(state, bit))
    }

    #[inline]
    fn local_delta(&self, state: &BitState, bit: usize) -> f64 {
        let bits = state.bits();
        let mut field = 0.0;
        for &(b, j) in &self.rows[bit] {
            if bits[b] == 1 {
                field += j;
            }
        }
        self.bias[bit] + 2.0 * field
    }

    /// Plain-text export: an `offset <c>` line, then `i j w` rows for `i < j`
    /// where `w` is the coefficient of `s_i s_j` (that is `2 J[i][j]`), and
    /// `i i b` rows for the linear terms.
    pub fn to_coefficient_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# qubo dim {}", self.dim).unwrap();
        writeln!(out, "offset {}", self.offset).unwrap();
        for a in 0..self.dim {
            if self.bias[a] != 0.0 {
                writeln!(out, "{a} {a} {}", self.bias[a]).unwrap();
            }
            for &(b, j) in &self.rows[a] {
                if b > a {
                    writeln!(out, "{a} {b} {}", 2.0 * j).unwrap();
                }
            }
        }
        out
    }

    pub fn from_coefficient_text(text: &str) -> Result<QuboModel> {
        let mut dim = None;
        let mut offset = 0.0;
        let mut terms = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if let ["qubo", "dim", d] = toks.as_slice() {
                    dim = Some(d.parse().map_err(|_| Error::parse(lineno, "bad dim"))?);
                }
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["offset", c] => {
                    offset = c.parse().map_err(|_| Error::parse(lineno, "bad offset"))?
                }
                [a, b, w] => {
                    let a: usize = a.parse().map_err(|_| Error::parse(lineno, "bad index"))?;
                    let b: usize = b.parse().map_err(|_| Error::parse(lineno, "bad index"))?;
                    let w: f64 = w.parse().map_err(|_| Error::parse(lineno, "bad weight"))?;
                    terms.push((a, b, w));
                }
                _ => return Err(Error::parse(lineno, format!("unrecognized line {line:?}"))),
            }
        }
        let dim = dim.unwrap_or_else(|| {
            terms
                .iter()
                .map(|&(a, b, _)| a.max(b) + 1)
                .max()
                .unwrap_or(0)
        });
        let mut builder = QuboBuilder::new(dim);
        builder.add_offset(offset);
        for (a, b, w) in terms {
            if a >= dim || b >= dim {
                return Err(Error::IndexOutOfRange {
                    what: "bit",
                    index: a.max(b),
                    limit: dim,
                });
            }
            builder.add_term(a, b, w);
        }
        Ok(builder.build())
    }
}

impl EnergyModel for QuboModel {
    type Scratch = ();

    fn num_bits(&self) -> usize {
        self.dim
    }

    fn eval(&self, state: &BitState) -> f64 {
        let bits = state.bits();
        let mut e = self.offset;
        for a in 0..self.dim {
            if bits[a] == 0 {
                continue;
            }
            e += self.bias[a];
            for &(b, j) in &self.rows[a] {
                if b > a && bits[b] == 1 {
                    e += 2.0 * j;
                }
            }
        }
        e
    }

    fn init_scratch(&self, _state: &BitState) {}

    #[inline]
    fn delta(&self, state: &BitState, _scratch: &(), bit: usize) -> f64 {
        self.local_delta(state, bit)
    }

    #[inline]
    fn set_bit(&self, state: &mut BitState, _scratch: &mut (), bit: usize, value: bool) {
        state.set(bit, value);
    }

    fn has_integer_weights(&self) -> bool {
        self.integer
    }
}

/// `A * sum_{(i,j) in E} sum_k s_ik s_jk + B * sum_i (1 - sum_k s_ik)^2` over
/// a one-hot layout with `q` bits per node.
pub fn build_onehot(instance: &ColoringInstance, a: f64, b: f64) -> Result<QuboModel> {
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "one-hot factors must be positive, got A = {a}, B = {b}"
        )));
    }
    let layout = coloring_layout(instance);
    let mut builder = QuboBuilder::new(layout.total_bits);
    for (u, v, w) in instance.graph.weighted_edges() {
        for k in 0..instance.q {
            builder.add_term(layout.bit_index(u, k), layout.bit_index(v, k), a * w);
        }
    }
    let mut group = Vec::with_capacity(instance.q);
    for i in 0..instance.num_nodes() {
        group.clear();
        group.extend((0..instance.q).map(|k| layout.bit_index(i, k)));
        builder.add_one_hot_penalty(&group, b);
    }
    Ok(builder.build())
}

/// Same as [`build_onehot`] but accepts `B = 0`, leaving the one-hot
/// constraint out entirely (used to show why the constraint is needed).
pub fn build_onehot_unconstrained(instance: &ColoringInstance, a: f64, b: f64) -> Result<QuboModel> {
    if b == 0.0 {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!("A must be positive, got {a}")));
        }
        let layout = coloring_layout(instance);
        let mut builder = QuboBuilder::new(layout.total_bits);
        for (u, v, w) in instance.graph.weighted_edges() {
            for k in 0..instance.q {
                builder.add_term(layout.bit_index(u, k), layout.bit_index(v, k), a * w);
            }
        }
        return Ok(builder.build());
    }
    build_onehot(instance, a, b)
}

pub fn coloring_layout(instance: &ColoringInstance) -> EncodingLayout {
    EncodingLayout::one_hot(instance.num_nodes(), instance.q)
}

/// Per-node colors of a one-hot state; `None` marks a malformed group.
pub fn decode_onehot_coloring(
    state: &BitState,
    instance: &ColoringInstance,
) -> Result<Vec<Option<usize>>> {
    coloring_layout(instance).decode_all(state)
}

/// Layout for the one-hot TSP mapping: node = city, value = tour position.
pub fn tsp_layout(instance: &TspInstance) -> EncodingLayout {
    EncodingLayout::one_hot(instance.num_cities(), instance.num_cities())
}

/// Permutation-matrix TSP Hamiltonian:
///
/// ```text
/// A sum_{k != l} sum_i W_kl s_ik s_(i+1)l + B sum_i (1 - sum_k s_ik)^2 + B sum_k (1 - sum_i s_ik)^2
/// ```
///
/// where `s_ik` marks city `k` at position `i`. Positions wrap, so the
/// closing edge of the tour is part of the cost.
pub fn build_onehot_tsp(instance: &TspInstance, a: f64, b: f64) -> Result<QuboModel> {
    let n = instance.num_cities();
    if n < 3 {
        return Err(Error::InvalidInstance(format!("need at least 3 cities, got {n}")));
    }
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "one-hot factors must be positive, got A = {a}, B = {b}"
        )));
    }
    let layout = tsp_layout(instance);
    let mut builder = QuboBuilder::new(layout.total_bits);
    for k in 0..n {
        for l in 0..n {
            if k == l {
                continue;
            }
            let w = instance.weight(k, l);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let next = (i + 1) % n;
                builder.add_term(layout.bit_index(k, i), layout.bit_index(l, next), a * w);
            }
        }
    }
    let mut group = Vec::with_capacity(n);
    for i in 0..n {
        // one city per position
        group.clear();
        group.extend((0..n).map(|k| layout.bit_index(k, i)));
        builder.add_one_hot_penalty(&group, b);
        // one position per city
        group.clear();
        group.extend((0..n).map(|p| layout.bit_index(i, p)));
        builder.add_one_hot_penalty(&group, b);
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::delta_by_recompute;
    use crate::problem::Graph;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn edge(q: usize) -> ColoringInstance {
        ColoringInstance::new(Graph::new(2, [(0, 1)]).unwrap(), q, "edge").unwrap()
    }

    /// Straight-line evaluation of the one-hot coloring polynomial.
    fn onehot_reference(inst: &ColoringInstance, a: f64, b: f64, s: &BitState) -> f64 {
        let q = inst.q;
        let bit = |i: usize, k: usize| s.bits()[i * q + k] as f64;
        let mut ha = 0.0;
        for &(u, v) in inst.graph.edges() {
            for k in 0..q {
                ha += bit(u, k) * bit(v, k);
            }
        }
        let mut hb = 0.0;
        for i in 0..inst.num_nodes() {
            let sum: f64 = (0..q).map(|k| bit(i, k)).sum();
            hb += (1.0 - sum).powi(2);
        }
        a * ha + b * hb
    }

    #[test]
    fn single_node_penalty() {
        let inst = ColoringInstance::new(Graph::new(1, []).unwrap(), 2, "n").unwrap();
        let m = build_onehot(&inst, 1.0, 1.0).unwrap();
        let e = |bits: Vec<u8>| m.energy(&BitState::from_bits(bits).unwrap()).unwrap();
        assert_eq!(e(vec![1, 0]), 0.0);
        assert_eq!(e(vec![0, 0]), 1.0);
        assert_eq!(e(vec![1, 1]), 1.0);
    }

    #[test]
    fn triangle_proper_coloring_is_ground() {
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let inst = ColoringInstance::new(g, 3, "k3").unwrap();
        let m = build_onehot(&inst, 1.0, 1.0).unwrap();
        let s = coloring_layout(&inst).encode_all(&[0, 1, 2]).unwrap();
        assert_eq!(m.energy(&s).unwrap(), 0.0);
    }

    #[test]
    fn same_color_edge_costs_a() {
        let inst = edge(2);
        let m = build_onehot(&inst, 2.0, 1.0).unwrap();
        let s = BitState::from_bits(vec![1, 0, 1, 0]).unwrap();
        assert_eq!(m.energy(&s).unwrap(), 2.0);
        // every 4-bit state agrees with the polynomial
        for w in 0..16u64 {
            let s = BitState::from_word(w, 4);
            assert_eq!(m.energy(&s).unwrap(), onehot_reference(&inst, 2.0, 1.0, &s));
        }
    }

    #[test]
    fn all_zero_state_is_offset() {
        let inst = edge(3);
        let m = build_onehot(&inst, 1.0, 1.5).unwrap();
        assert_eq!(m.energy(&BitState::zeros(6)).unwrap(), m.offset());
        assert_eq!(m.offset(), 3.0);
    }

    #[test]
    fn rejects_non_positive_factors() {
        assert!(build_onehot(&edge(2), 0.0, 1.0).is_err());
        assert!(build_onehot(&edge(2), 1.0, -1.0).is_err());
    }

    #[test]
    fn delta_matches_pair_algebra() {
        let mut b = QuboBuilder::new(2);
        b.add_term(0, 1, 2.0 * 0.75).add_linear(0, -0.3);
        let m = b.build();
        assert_eq!(m.pair_weight(0, 1), 0.75);
        assert_eq!(m.pair_weight(1, 0), 0.75);
        let s = BitState::zeros(2);
        assert_eq!(m.delta_h(&s, 0).unwrap(), -0.3);
        let s = BitState::from_bits(vec![0, 1]).unwrap();
        assert!((m.delta_h(&s, 0).unwrap() - (2.0 * 0.75 - 0.3)).abs() < 1e-12);
        assert!(m.delta_h(&s, 2).is_err());
        assert!(m.energy(&BitState::zeros(3)).is_err());
    }

    #[test]
    fn coefficient_text_roundtrip() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let inst = ColoringInstance::new(g, 3, "p3").unwrap();
        let m = build_onehot(&inst, 1.0, 2.0).unwrap();
        let text = m.to_coefficient_text();
        assert!(text.contains("offset 6"));
        let back = QuboModel::from_coefficient_text(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn tsp_permutation_energy_is_tour_cost() {
        let raw = vec![
            vec![0.0, 1.0, 2.0, 3.0],
            vec![1.0, 0.0, 4.0, 5.0],
            vec![2.0, 4.0, 0.0, 6.0],
            vec![3.0, 5.0, 6.0, 0.0],
        ];
        let t = TspInstance::from_distances("t", &raw).unwrap();
        let m = build_onehot_tsp(&t, 1.0, 3.0).unwrap();
        let layout = tsp_layout(&t);
        // city k at position pos[k]; tour 0 -> 2 -> 1 -> 3
        let pos = [0, 2, 1, 3];
        let s = layout.encode_all(&pos).unwrap();
        let tour = [0, 2, 1, 3];
        let expected = t.tour_cost(&tour);
        assert!((m.energy(&s).unwrap() - expected).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn energy_matches_reference(seed in any::<u64>(), a in 0.1f64..4.0, b in 0.1f64..4.0) {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
            let inst = ColoringInstance::new(g, 3, "g").unwrap();
            let m = build_onehot(&inst, a, b).unwrap();
            let s = BitState::random(12, &mut rng);
            let e = m.energy(&s).unwrap();
            prop_assert!((e - onehot_reference(&inst, a, b, &s)).abs() < 1e-9);
            for bit in 0..12 {
                let d = m.delta_h(&s, bit).unwrap();
                prop_assert!((d - delta_by_recompute(&m, &s, bit)).abs() < 1e-9);
            }
        }

        #[test]
        fn relabeling_nodes_preserves_energy(seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
            let mut perm: Vec<usize> = (0..4).collect();
            perm.shuffle(&mut rng);
            let inst = ColoringInstance::new(g.clone(), 3, "g").unwrap();
            let relabeled = ColoringInstance::new(g.relabel(&perm).unwrap(), 3, "g").unwrap();
            let m1 = build_onehot(&inst, 1.0, 1.0).unwrap();
            let m2 = build_onehot(&relabeled, 1.0, 1.0).unwrap();
            let s = BitState::random(12, &mut rng);
            let mut moved = BitState::zeros(12);
            for i in 0..4 {
                for k in 0..3 {
                    moved.set(perm[i] * 3 + k, s.get(i * 3 + k));
                }
            }
            prop_assert_eq!(m1.energy(&s).unwrap(), m2.energy(&moved).unwrap());
        }
    }
}
