//! Vectorized mapping: each node value is a binary vector of
//! `n = ceil(log2 q)` bits, and every interacting node pair contributes
//! `W * F(S_i, S_j)` where `F` is a dense truth table over the `2n` select
//! bits.
//!
//! The truth table stores a small integer code per `(value_i, value_j)`
//! combination at index `value_i * 2^n + value_j`. Each pair maps codes to
//! energies, which lets one table serve pairs with different weights.

use std::fmt::Write as _;

use crate::encoding::{bits_for, BitState, EncodingLayout};
use crate::error::{Error, Result};
use crate::model::EnergyModel;
use crate::problem::{ColoringInstance, TspInstance};

/// Codes a truth table may hold.
pub const CODES: [i8; 4] = [0, 1, -1, -2];

#[inline]
fn code_slot(code: i8) -> Option<u8> {
    CODES.iter().position(|&c| c == code).map(|p| p as u8)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTableOperator {
    n: usize,
    codes: Vec<i8>,
    slots: Vec<u8>,
}

impl TruthTableOperator {
    /// Builds a table by evaluating `f(a, b)` on every value pair.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> i8) -> Result<Self> {
        if n == 0 || n > 8 {
            return Err(Error::InvalidParameter(format!(
                "bits per node must be in 1..=8, got {n}"
            )));
        }
        let side = 1usize << n;
        let mut codes = Vec::with_capacity(side * side);
        for a in 0..side {
            for b in 0..side {
                codes.push(f(a, b));
            }
        }
        Self::from_codes(n, codes)
    }

    pub fn from_codes(n: usize, codes: Vec<i8>) -> Result<Self> {
        if codes.len() != 1 << (2 * n) {
            return Err(Error::LengthMismatch {
                expected: 1 << (2 * n),
                got: codes.len(),
            });
        }
        let slots = codes
            .iter()
            .map(|&c| {
                code_slot(c)
                    .ok_or_else(|| Error::InvalidParameter(format!("unsupported code {c}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TruthTableOperator { n, codes, slots })
    }

    pub fn bits_per_node(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize) -> usize {
        (a << self.n) | b
    }

    #[inline]
    pub fn code(&self, a: usize, b: usize) -> i8 {
        self.codes[self.index(a, b)]
    }

    pub fn codes(&self) -> &[i8] {
        &self.codes
    }

    /// `a b code` rows preceded by a `# truth-table n <n>` header.
    pub fn to_text(&self) -> String {
        let side = 1usize << self.n;
        let mut out = String::new();
        writeln!(out, "# truth-table n {}", self.n).unwrap();
        for a in 0..side {
            for b in 0..side {
                writeln!(out, "{a} {b} {}", self.code(a, b)).unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut rows = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if let ["truth-table", "n", v] = toks.as_slice() {
                    n = Some(
                        v.parse::<usize>()
                            .map_err(|_| Error::parse(lineno, "bad bit count"))?,
                    );
                }
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [a, b, c] = toks.as_slice() else {
                return Err(Error::parse(lineno, "expected `a b code`"));
            };
            let a: usize = a.parse().map_err(|_| Error::parse(lineno, "bad value"))?;
            let b: usize = b.parse().map_err(|_| Error::parse(lineno, "bad value"))?;
            let c: i8 = c.parse().map_err(|_| Error::parse(lineno, "bad code"))?;
            rows.push((lineno, a, b, c));
        }
        let n = match n {
            Some(n) => n,
            None => {
                // infer from the row count: 4^n rows
                let side = (rows.len() as f64).sqrt().round() as usize;
                bits_for(side)
            }
        };
        if n == 0 || n > 8 {
            return Err(Error::parse(0, format!("unsupported bits per node {n}")));
        }
        let side = 1usize << n;
        let mut codes = vec![None; side * side];
        for (lineno, a, b, c) in rows {
            if a >= side || b >= side {
                return Err(Error::parse(lineno, format!("value out of range for n = {n}")));
            }
            codes[(a << n) | b] = Some(c);
        }
        let codes = codes
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::parse(0, format!("missing table entry {i}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_codes(n, codes)
    }
}

/// Coloring operator: 1 when both nodes share a color or either color is
/// out of range, 0 otherwise.
pub fn build_coloring_operator(q: usize) -> Result<TruthTableOperator> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 colors, got {q}")));
    }
    TruthTableOperator::from_fn(bits_for(q), |a, b| {
        i8::from(a == b || a >= q || b >= q)
    })
}

/// TSP position operator over `N` positions, branches tested in order:
/// adjacent positions give 1, equal positions -1, a position outside
/// `[0, N)` -2, anything else 0.
pub fn build_tsp_operator(num_cities: usize) -> Result<TruthTableOperator> {
    if num_cities < 3 {
        return Err(Error::InvalidInstance(format!(
            "need at least 3 cities, got {num_cities}"
        )));
    }
    TruthTableOperator::from_fn(bits_for(num_cities), |a, b| {
        if a.abs_diff(b) == 1 {
            1
        } else if a == b {
            -1
        } else if a >= num_cities || b >= num_cities {
            -2
        } else {
            0
        }
    })
}

/// One interacting node pair with its code-to-energy map.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    /// Energy per code, indexed like [`CODES`].
    pub energies: [f64; 4],
}

impl PairTerm {
    pub fn energy_of(&self, code: i8) -> f64 {
        code_slot(code).map_or(0.0, |s| self.energies[s as usize])
    }
}

#[derive(Debug, Clone, Copy)]
struct Incidence {
    pair: u32,
    other: u32,
    /// True when this node is the pair's first (row) node.
    first: bool,
    /// Copy of the pair's energies, kept inline for the update loop.
    energies: [f64; 4],
}

#[derive(Debug, Clone)]
pub struct PairOperatorModel {
    layout: EncodingLayout,
    operator: TruthTableOperator,
    pairs: Vec<PairTerm>,
    incidence: Vec<Vec<Incidence>>,
    /// Operator slots with the two node values swapped.
    slots_t: Vec<u8>,
    integer: bool,
}

impl PairOperatorModel {
    pub fn new(
        layout: EncodingLayout,
        operator: TruthTableOperator,
        pairs: Vec<PairTerm>,
    ) -> Result<Self> {
        if layout.bits_per_node != operator.bits_per_node() {
            return Err(Error::InvalidParameter(format!(
                "layout uses {} bits per node but the operator expects {}",
                layout.bits_per_node,
                operator.bits_per_node()
            )));
        }
        let mut incidence = vec![Vec::new(); layout.num_nodes];
        let mut seen = std::collections::HashSet::new();
        for (p, pair) in pairs.iter().enumerate() {
            for node in [pair.i, pair.j] {
                if node >= layout.num_nodes {
                    return Err(Error::IndexOutOfRange {
                        what: "node",
                        index: node,
                        limit: layout.num_nodes,
                    });
                }
            }
            if pair.i == pair.j {
                return Err(Error::InvalidInstance(format!("pair on a single node {}", pair.i)));
            }
            if !seen.insert((pair.i.min(pair.j), pair.i.max(pair.j))) {
                return Err(Error::InvalidInstance(format!(
                    "pair ({}, {}) listed twice",
                    pair.i, pair.j
                )));
            }
            if pair.energies.iter().any(|e| !e.is_finite()) {
                return Err(Error::InvalidInstance("non-finite pair energy".into()));
            }
            incidence[pair.i].push(Incidence {
                pair: p as u32,
                other: pair.j as u32,
                first: true,
                energies: pair.energies,
            });
            incidence[pair.j].push(Incidence {
                pair: p as u32,
                other: pair.i as u32,
                first: false,
                energies: pair.energies,
            });
        }
        let integer = pairs
            .iter()
            .all(|p| p.energies.iter().all(|e| e.fract() == 0.0));
        let n = operator.n;
        let mask = (1usize << n) - 1;
        let slots_t = (0..operator.slots.len())
            .map(|idx| operator.slots[((idx & mask) << n) | (idx >> n)])
            .collect();
        Ok(PairOperatorModel {
            layout,
            operator,
            pairs,
            incidence,
            slots_t,
            integer,
        })
    }

    pub fn layout(&self) -> &EncodingLayout {
        &self.layout
    }

    pub fn operator(&self) -> &TruthTableOperator {
        &self.operator
    }

    pub fn pairs(&self) -> &[PairTerm] {
        &self.pairs
    }

    /// Number of pairs touching `node`.
    pub fn degree(&self, node: usize) -> usize {
        self.incidence[node].len()
    }

    fn check_len(&self, state: &BitState) -> Result<()> {
        if state.len() != self.layout.total_bits {
            return Err(Error::LengthMismatch {
                expected: self.layout.total_bits,
                got: state.len(),
            });
        }
        Ok(())
    }

    /// Sum over pairs of the energy of each pair's code.
    pub fn energy(&self, state: &BitState) -> Result<f64> {
        self.check_len(state)?;
        Ok(self.eval(state))
    }

    /// `H(bit k of node = 1) - H(bit k of node = 0)`, summed over the
    /// node's pairs with every other bit fixed.
    pub fn delta_h(&self, state: &BitState, node: usize, k: usize) -> Result<f64> {
        self.check_len(state)?;
        if node >= self.layout.num_nodes {
            return Err(Error::IndexOutOfRange {
                what: "node",
                index: node,
                limit: self.layout.num_nodes,
            });
        }
        if k >= self.layout.bits_per_node {
            return Err(Error::IndexOutOfRange {
                what: "bit",
                index: k,
                limit: self.layout.bits_per_node,
            });
        }
        let values = self.init_scratch(state);
        Ok(self.node_delta(&values, node, k))
    }

    /// Raw node values (possibly out of range).
    pub fn node_values(&self, state: &BitState) -> Vec<u32> {
        (0..self.layout.num_nodes)
            .map(|i| self.layout.raw_value(state, i) as u32)
            .collect()
    }

    #[inline]
    fn pair_energy(&self, p: usize, index: usize) -> f64 {
        self.pairs[p].energies[self.operator.slots[index] as usize]
    }

    #[inline]
    fn node_delta(&self, values: &[u32], node: usize, k: usize) -> f64 {
        let v = values[node] as usize;
        let n = self.operator.n;
        let i1 = (v | (1 << k)) << n;
        let i0 = (v & !(1 << k)) << n;
        let mut d = 0.0;
        for inc in &self.incidence[node] {
            let w = values[inc.other as usize] as usize;
            let slots = if inc.first { &self.operator.slots } else { &self.slots_t };
            d += inc.energies[slots[i1 | w] as usize] - inc.energies[slots[i0 | w] as usize];
        }
        d
    }

    pub(crate) fn incident(&self, node: usize) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        self.incidence[node]
            .iter()
            .map(|inc| (inc.pair as usize, inc.other as usize, inc.first))
    }
}

impl EnergyModel for PairOperatorModel {
    /// Raw value of every node.
    type Scratch = Vec<u32>;

    fn num_bits(&self) -> usize {
        self.layout.total_bits
    }

    fn eval(&self, state: &BitState) -> f64 {
        let values = self.node_values(state);
        self.pairs
            .iter()
            .enumerate()
            .map(|(p, pair)| {
                let idx = self
                    .operator
                    .index(values[pair.i] as usize, values[pair.j] as usize);
                self.pair_energy(p, idx)
            })
            .sum()
    }

    fn init_scratch(&self, state: &BitState) -> Vec<u32> {
        self.node_values(state)
    }

    #[inline]
    fn delta(&self, _state: &BitState, values: &Vec<u32>, bit: usize) -> f64 {
        let (node, k) = self.layout.split(bit);
        self.node_delta(values, node, k)
    }

    #[inline]
    fn set_bit(&self, state: &mut BitState, values: &mut Vec<u32>, bit: usize, value: bool) {
        state.set(bit, value);
        let (node, k) = self.layout.split(bit);
        if value {
            values[node] |= 1 << k;
        } else {
            values[node] &= !(1 << k);
        }
    }

    fn has_integer_weights(&self) -> bool {
        self.integer
    }
}

pub fn coloring_layout(instance: &ColoringInstance) -> EncodingLayout {
    EncodingLayout::binary(instance.num_nodes(), instance.q)
}

/// One pair per graph edge; code 1 costs the edge weight.
pub fn build_coloring_model(instance: &ColoringInstance) -> Result<PairOperatorModel> {
    let operator = build_coloring_operator(instance.q)?;
    let pairs = instance
        .graph
        .weighted_edges()
        .map(|(i, j, w)| PairTerm {
            i,
            j,
            energies: [0.0, w, 0.0, 0.0],
        })
        .collect();
    PairOperatorModel::new(coloring_layout(instance), operator, pairs)
}

pub fn tsp_layout(instance: &TspInstance) -> EncodingLayout {
    EncodingLayout::binary(instance.num_cities(), instance.num_cities())
}

/// One pair per unordered city pair `i < j`. Adjacent positions cost
/// `W_ij`; a shared position costs `wt` times the column sum of `W` at `j`;
/// an out-of-range position costs the largest weight.
pub fn build_tsp_operator_model(instance: &TspInstance, wt: f64) -> Result<PairOperatorModel> {
    if !(wt > 0.0 && wt.is_finite()) {
        return Err(Error::InvalidParameter(format!("wt must be positive, got {wt}")));
    }
    let n = instance.num_cities();
    let operator = build_tsp_operator(n)?;
    let max_w = instance.max_weight();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(PairTerm {
                i,
                j,
                energies: [0.0, instance.weight(i, j), wt * instance.column_sum(j), max_w],
            });
        }
    }
    PairOperatorModel::new(tsp_layout(instance), operator, pairs)
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

    #[test]
    fn coloring_operator_codes() {
        let op = build_coloring_operator(3).unwrap();
        assert_eq!(op.code(1, 1), 1);
        assert_eq!(op.code(3, 0), 1);
        assert_eq!(op.code(0, 2), 0);
        assert_eq!(op.codes().len(), 16);
        assert!(build_coloring_operator(1).is_err());
    }

    #[test]
    fn tsp_operator_codes() {
        let op = build_tsp_operator(5).unwrap();
        assert_eq!(op.bits_per_node(), 3);
        assert_eq!(op.code(2, 3), 1);
        assert_eq!(op.code(0, 0), -1);
        assert_eq!(op.code(6, 0), -2);
        assert_eq!(op.code(0, 2), 0);
        // listed branch order: equality wins over range, adjacency over both
        assert_eq!(op.code(6, 6), -1);
        assert_eq!(op.code(5, 6), 1);
    }

    #[test]
    fn single_edge_energies() {
        let m = build_coloring_model(&edge(2)).unwrap();
        let s = BitState::from_bits(vec![0, 1]).unwrap();
        assert_eq!(m.energy(&s).unwrap(), 0.0);
        let s = BitState::from_bits(vec![1, 1]).unwrap();
        assert_eq!(m.energy(&s).unwrap(), 1.0);
        // neighbor has color 1, node bit 0 currently 0
        let s = BitState::from_bits(vec![0, 1]).unwrap();
        assert_eq!(m.delta_h(&s, 0, 0).unwrap(), 1.0);
    }

    #[test]
    fn triangle_two_colors_minimum_is_one() {
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let m = build_coloring_model(&ColoringInstance::new(g, 2, "k3").unwrap()).unwrap();
        let min = (0..8u64)
            .map(|w| m.energy(&BitState::from_word(w, 3)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, 1.0);
    }

    #[test]
    fn isolated_node_has_zero_delta() {
        let g = Graph::new(3, [(0, 1)]).unwrap();
        let m = build_coloring_model(&ColoringInstance::new(g, 3, "g").unwrap()).unwrap();
        let s = BitState::from_bits(vec![1, 0, 1, 0, 1, 1]).unwrap();
        assert_eq!(m.delta_h(&s, 2, 0).unwrap(), 0.0);
        assert_eq!(m.delta_h(&s, 2, 1).unwrap(), 0.0);
        assert!(m.delta_h(&s, 3, 0).is_err());
        assert!(m.delta_h(&s, 0, 2).is_err());
    }

    #[test]
    fn tsp_pair_energies() {
        let raw = vec![
            vec![0.0, 2.0, 4.0, 1.0, 3.0],
            vec![2.0, 0.0, 1.0, 2.0, 2.0],
            vec![4.0, 1.0, 0.0, 3.0, 1.0],
            vec![1.0, 2.0, 3.0, 0.0, 2.0],
            vec![3.0, 2.0, 1.0, 2.0, 0.0],
        ];
        let t = TspInstance::from_distances("t5", &raw).unwrap();
        let m = build_tsp_operator_model(&t, 0.5).unwrap();
        assert_eq!(m.pairs().len(), 10);
        let p = &m.pairs()[0]; // cities 0 and 1
        assert_eq!(p.energy_of(1), t.weight(0, 1));
        assert_eq!(p.energy_of(-1), 0.5 * t.column_sum(1));
        assert_eq!(p.energy_of(-2), 1.0);
        assert!(build_tsp_operator_model(&t, 0.0).is_err());
    }

    #[test]
    fn truth_table_text_roundtrip() {
        let op = build_coloring_operator(5).unwrap();
        let back = TruthTableOperator::from_text(&op.to_text()).unwrap();
        assert_eq!(back, op);
        let op = build_tsp_operator(7).unwrap();
        let text = op.to_text();
        let headerless: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert_eq!(TruthTableOperator::from_text(&headerless).unwrap(), op);
    }

    #[test]
    fn duplicate_pairs_rejected() {
        let op = build_coloring_operator(2).unwrap();
        let layout = EncodingLayout::binary(2, 2);
        let pair = PairTerm { i: 0, j: 1, energies: [0.0, 1.0, 0.0, 0.0] };
        let swapped = PairTerm { i: 1, j: 0, ..pair.clone() };
        assert!(PairOperatorModel::new(layout, op, vec![pair, swapped]).is_err());
    }

    /// Straight-line evaluator working directly from the instance.
    fn coloring_reference(inst: &ColoringInstance, s: &BitState) -> f64 {
        let n = bits_for(inst.q);
        let value = |i: usize| (0..n).map(|k| (s.bits()[i * n + k] as usize) << k).sum::<usize>();
        inst.graph
            .weighted_edges()
            .map(|(u, v, w)| {
                let (a, b) = (value(u), value(v));
                if a == b || a >= inst.q || b >= inst.q { w } else { 0.0 }
            })
            .sum()
    }

    proptest! {
        #[test]
        fn energy_and_delta_match_references(seed in any::<u64>()) {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
            let inst = ColoringInstance::new(g, 3, "g").unwrap();
            let m = build_coloring_model(&inst).unwrap();
            let s = BitState::random(8, &mut rng);
            prop_assert_eq!(m.energy(&s).unwrap(), coloring_reference(&inst, &s));
            let values = m.init_scratch(&s);
            for bit in 0..8 {
                prop_assert_eq!(m.delta(&s, &values, bit), delta_by_recompute(&m, &s, bit));
            }
        }

        #[test]
        fn tsp_delta_matches_recompute(seed in any::<u64>(), wt in 0.05f64..2.0) {
            use rand::Rng;
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            let n = 6;
            let mut raw = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let d = rng.random_range(1.0..100.0f64).round();
                    raw[i][j] = d;
                    raw[j][i] = d;
                }
            }
            let t = TspInstance::from_distances("r", &raw).unwrap();
            let m = build_tsp_operator_model(&t, wt).unwrap();
            let s = BitState::random(m.num_bits(), &mut rng);
            let values = m.init_scratch(&s);
            for bit in 0..m.num_bits() {
                prop_assert!((m.delta(&s, &values, bit) - delta_by_recompute(&m, &s, bit)).abs() < 1e-9);
            }
        }
    }
}
