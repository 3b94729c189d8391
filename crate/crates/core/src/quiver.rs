//! Partitions of the trapezoid `Γ_{N0,N1}` and their quivers.
//!
//! A partition is a cyclic word of `N = N0 + N1` labels: `B` for a triangle
//! with its base on the bottom edge, `T` for a base on the top edge. Vertex `k`
//! of the quiver carries a loop iff `σ_{k-1}` and `σ_k` (indices mod `N`) have
//! equal labels, and curve `C_i` (`1 <= i < N`) between `σ_{i-1}` and `σ_i`
//! is a `(-1,-1)`-curve iff their labels differ.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::torus::PairingMatrix;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Label {
    B,
    T,
}

impl Label {
    pub fn as_char(self) -> char {
        match self {
            Label::B => 'B',
            Label::T => 'T',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Partition {
    n0: usize,
    n1: usize,
    labels: Vec<Label>,
}

fn check_range(n0: usize, n1: usize) -> Result<()> {
    if n0 == 0 || n1 > n0 {
        return Err(Error::BadRange { n0, n1 });
    }
    Ok(())
}

impl Partition {
    pub fn parse(n0: usize, n1: usize, labels: &str) -> Result<Self> {
        check_range(n0, n1)?;
        let labels = labels
            .trim()
            .chars()
            .map(|c| match c {
                'B' | 'b' => Ok(Label::B),
                'T' | 't' => Ok(Label::T),
                other => Err(Error::BadLabel(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        let found_b = labels.iter().filter(|&&l| l == Label::B).count();
        let found_t = labels.len() - found_b;
        if found_b != n0 || found_t != n1 {
            return Err(Error::BadCounts { n0, n1, found_b, found_t });
        }
        Ok(Self { n0, n1, labels })
    }

    /// All `binom(N, N1)` label sequences, in lexicographic order with `B < T`.
    pub fn enumerate(n0: usize, n1: usize) -> Result<Vec<Self>> {
        check_range(n0, n1)?;
        let n = n0 + n1;
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(n);
        fn go(n0: usize, n1: usize, b_left: usize, t_left: usize, word: &mut Vec<Label>, out: &mut Vec<Partition>) {
            if b_left == 0 && t_left == 0 {
                out.push(Partition { n0, n1, labels: word.clone() });
                return;
            }
            if b_left > 0 {
                word.push(Label::B);
                go(n0, n1, b_left - 1, t_left, word, out);
                word.pop();
            }
            if t_left > 0 {
                word.push(Label::T);
                go(n0, n1, b_left, t_left - 1, word, out);
                word.pop();
            }
        }
        go(n0, n1, n0, n1, &mut word, &mut out);
        debug_assert_eq!(out.len(), binomial(n, n1));
        Ok(out)
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Number of triangles, which is also the number of quiver vertices.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label_string(&self) -> String {
        self.labels.iter().map(|l| l.as_char()).collect()
    }

    /// Vertices `k` with `σ_{k-1} = σ_k` cyclically.
    pub fn loop_vertices(&self) -> Vec<usize> {
        let n = self.n();
        (0..n).filter(|&k| self.labels[(k + n - 1) % n] == self.labels[k]).collect()
    }

    pub fn curve_profile(&self) -> CurveProfile {
        let types = self
            .labels
            .windows(2)
            .map(|w| if w[0] != w[1] { CurveType::Conifold } else { CurveType::Surface })
            .collect();
        CurveProfile::new(types)
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.n0, self.n1, self.label_string())
    }
}

/// Parses `<n0> <n1> <labels>`.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let [n0, n1, labels] = parts.as_slice() else {
            return Err(Error::Parse(format!("expected `<n0> <n1> <labels>`, got {s:?}")));
        };
        let n0 = n0.parse().map_err(|_| Error::Parse(format!("bad n0 {n0:?}")))?;
        let n1 = n1.parse().map_err(|_| Error::Parse(format!("bad n1 {n1:?}")))?;
        Self::parse(n0, n1, labels)
    }
}

/// Normal bundle type of an exceptional curve.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CurveType {
    /// `(-1,-1)`: adjacent triangles form a quadrilateral.
    Conifold,
    /// `(-2,0)`: adjacent triangles form a triangle.
    Surface,
}

impl fmt::Display for CurveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveType::Conifold => write!(f, "(-1,-1)"),
            CurveType::Surface => write!(f, "(-2,0)"),
        }
    }
}

/// Curve types of `C_1, ..., C_{N-1}` and the counts `c(a,b)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurveProfile {
    types: Vec<CurveType>,
    // prefix[i] = number of (-1,-1) curves among C_1..C_i
    prefix: Vec<usize>,
}

impl CurveProfile {
    fn new(types: Vec<CurveType>) -> Self {
        let mut prefix = vec![0];
        for t in &types {
            prefix.push(prefix.last().unwrap() + usize::from(*t == CurveType::Conifold));
        }
        Self { types, prefix }
    }

    pub fn types(&self) -> &[CurveType] {
        &self.types
    }

    /// Number of `(-1,-1)`-curves among `C_a, ..., C_b`.
    pub fn c(&self, a: usize, b: usize) -> Result<usize> {
        let max = self.types.len();
        if a < 1 || a > b || b > max {
            return Err(Error::BadInterval { a, b, max });
        }
        Ok(self.prefix[b] - self.prefix[a - 1])
    }

    /// `c(a,b)` for all `1 <= a <= b <= N-1`.
    pub fn c_table(&self) -> BTreeMap<(usize, usize), usize> {
        let max = self.types.len();
        (1..=max)
            .flat_map(|a| (a..=max).map(move |b| (a, b)))
            .map(|(a, b)| ((a, b), self.prefix[b] - self.prefix[a - 1]))
            .collect()
    }
}

/// `Q_σ` with optional framing; the framing vertex `∞` has index `n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quiver {
    partition: Partition,
    loops: Vec<usize>,
    edges: Vec<(usize, usize)>,
    framing_rank: u32,
    pairing: Arc<PairingMatrix>,
}

impl Quiver {
    pub fn build(partition: &Partition, framing_rank: u32) -> Self {
        let n = partition.n();
        let loops = partition.loop_vertices();
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i, (i + 1) % n));
            edges.push(((i + 1) % n, i));
        }
        edges.extend(loops.iter().map(|&k| (k, k)));
        edges.extend((0..framing_rank).map(|_| (n, 0)));
        let mut q = Self {
            partition: partition.clone(),
            loops,
            edges,
            framing_rank,
            pairing: Arc::new(PairingMatrix::zero(n)),
        };
        let chi = q.euler_ringel();
        let skew = (0..=n).map(|i| (0..=n).map(|j| chi[i][j] - chi[j][i]).collect()).collect();
        q.pairing = Arc::new(PairingMatrix::from_rows(skew));
        q
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn loops(&self) -> &[usize] {
        &self.loops
    }

    pub fn has_loop(&self, k: usize) -> bool {
        self.loops.contains(&k)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn framing_rank(&self) -> u32 {
        self.framing_rank
    }

    pub fn curve_profile(&self) -> CurveProfile {
        self.partition.curve_profile()
    }

    /// `χ(e_i, e_j) = δ_ij - #{edges i -> j}` on the `N+1` framed vertices.
    pub fn euler_ringel(&self) -> Vec<Vec<i64>> {
        let size = self.n() + 1;
        let mut chi = vec![vec![0i64; size]; size];
        for (i, row) in chi.iter_mut().enumerate() {
            row[i] = 1;
        }
        for &(t, h) in &self.edges {
            chi[t][h] -= 1;
        }
        chi
    }

    /// Skew form `<α,β> = χ(α,β) - χ(β,α)`.
    pub fn pairing(&self) -> Arc<PairingMatrix> {
        self.pairing.clone()
    }

    /// Cyclic derivative `∂w/∂a = Σ_{w = c a c'} c' c`, as a formal sum of paths
    /// given by edge indices.
    pub fn cyclic_derivative(&self, word: &Path, a: usize) -> Result<BTreeMap<Vec<usize>, i64>> {
        self.check_path(word)?;
        if a >= self.edges.len() {
            return Err(Error::UnknownEdge(a));
        }
        let w = &word.edges;
        let mut out = BTreeMap::new();
        for p in (0..w.len()).filter(|&p| w[p] == a) {
            let rotated: Vec<usize> = w[p + 1..].iter().chain(&w[..p]).copied().collect();
            *out.entry(rotated).or_insert(0) += 1;
        }
        Ok(out)
    }

    fn check_path(&self, word: &Path) -> Result<()> {
        let mut at = word.start;
        for &e in &word.edges {
            let &(t, h) = self.edges.get(e).ok_or(Error::UnknownEdge(e))?;
            if t != at {
                return Err(Error::NotClosed);
            }
            at = h;
        }
        if at != word.start {
            return Err(Error::NotClosed);
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let n = self.n();
        let name = |v: usize| if v == n { json!("inf") } else { json!(v) };
        json!({
            "partition": self.partition.to_string(),
            "vertices": (0..n).collect::<Vec<_>>(),
            "loops": self.loops,
            "edges": self.edges.iter().map(|&(t, h)| json!([name(t), name(h)])).collect::<Vec<_>>(),
            "framingRank": self.framing_rank,
            "curveTypes": self.curve_profile().types().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn to_dot(&self) -> String {
        let n = self.n();
        let name = |v: usize| if v == n { "inf".to_string() } else { v.to_string() };
        let mut out = format!("digraph Q_{} {{\n", self.partition.label_string());
        for v in 0..n {
            out.push_str(&format!("  {v};\n"));
        }
        if self.framing_rank > 0 {
            out.push_str("  inf [shape=box];\n");
        }
        for &(t, h) in &self.edges {
            out.push_str(&format!("  {} -> {};\n", name(t), name(h)));
        }
        out.push_str("}\n");
        out
    }
}

/// A path given by its start vertex and a sequence of edge indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n0: usize, n1: usize, s: &str) -> Partition {
        Partition::parse(n0, n1, s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p(1, 1, "BT").n(), 2);
        assert_eq!(p(4, 2, "BTBBTB").label_string(), "BTBBTB");
        assert_eq!(Partition::parse(1, 2, "BTT"), Err(Error::BadRange { n0: 1, n1: 2 }));
        assert_eq!(Partition::parse(0, 0, ""), Err(Error::BadRange { n0: 0, n1: 0 }));
        assert!(matches!(Partition::parse(2, 1, "BTT"), Err(Error::BadCounts { .. })));
        assert_eq!(Partition::parse(1, 1, "BX"), Err(Error::BadLabel('X')));
        assert_eq!("4 2 BTBBTB".parse::<Partition>().unwrap(), p(4, 2, "BTBBTB"));
        assert!(matches!("4 BTBBTB".parse::<Partition>(), Err(Error::Parse(_))));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(Partition::enumerate(4, 2).unwrap().len(), 15);
        assert_eq!(Partition::enumerate(3, 0).unwrap().len(), 1);
        let all: Vec<String> = Partition::enumerate(2, 1).unwrap().iter().map(|p| p.label_string()).collect();
        assert_eq!(all, vec!["BBT", "BTB", "TBB"]);
    }

    #[test]
    fn conifold_quiver() {
        let q = Quiver::build(&p(1, 1, "BT"), 0);
        assert_eq!(q.n(), 2);
        assert!(q.loops().is_empty());
        assert_eq!(q.edges().len(), 4);
        assert_eq!(q.euler_ringel()[0][1], -2);
        assert!(q.pairing().unframed_is_zero());
    }

    #[test]
    fn worked_example_has_two_loops() {
        let q = Quiver::build(&p(4, 2, "BTBBTB"), 0);
        assert_eq!(q.n(), 6);
        assert_eq!(q.loops().len(), 2);
        assert_eq!(q.loops(), &[0, 3]);
    }

    #[test]
    fn all_bottom_has_loops_everywhere() {
        let q = Quiver::build(&p(2, 0, "BB"), 0);
        assert_eq!(q.loops(), &[0, 1]);
    }

    #[test]
    fn single_vertex_quiver() {
        let q = Quiver::build(&p(1, 0, "B"), 1);
        assert_eq!(q.loops(), &[0]);
        assert_eq!(q.edges().iter().filter(|(t, h)| t == h && *t == 0).count(), 3);
        assert!(q.curve_profile().types().is_empty());
    }

    #[test]
    fn framing_pairing() {
        let q = Quiver::build(&p(1, 1, "BT"), 2);
        assert_eq!(q.euler_ringel()[2][0], -2);
        assert_eq!(q.pairing().entry(2, 0), -2);
        assert_eq!(q.pairing().entry(0, 2), 2);
    }

    #[test]
    fn curve_profiles() {
        let c = p(1, 1, "BT").curve_profile();
        assert_eq!(c.types(), &[CurveType::Conifold]);
        assert_eq!(c.c(1, 1).unwrap(), 1);
        let c = p(2, 0, "BB").curve_profile();
        assert_eq!(c.types(), &[CurveType::Surface]);
        assert_eq!(c.c(1, 1).unwrap(), 0);
        let c = p(4, 2, "BTBBTB").curve_profile();
        use CurveType::*;
        assert_eq!(c.types(), &[Conifold, Conifold, Surface, Conifold, Conifold]);
        assert_eq!(c.c(1, 5).unwrap(), 4);
        assert_eq!(c.c(3, 3).unwrap(), 0);
        assert_eq!(c.c(2, 6), Err(Error::BadInterval { a: 2, b: 6, max: 5 }));
        assert_eq!(c.c_table().len(), 15);
    }

    #[test]
    fn cyclic_derivatives() {
        // single vertex: edges 0, 1 cyclic self-edges, 2 the loop
        let q = Quiver::build(&p(1, 0, "B"), 0);
        let w = Path { start: 0, edges: vec![2, 2, 2] };
        let d = q.cyclic_derivative(&w, 2).unwrap();
        assert_eq!(d, BTreeMap::from([(vec![2, 2], 3)]));
        assert!(q.cyclic_derivative(&w, 0).unwrap().is_empty());

        // conifold: a1 = 0 (0->1), b1 = 1 (1->0), b2 = 2 (1->0), a2 = 3 (0->1)
        let q = Quiver::build(&p(1, 1, "BT"), 0);
        let w = Path { start: 0, edges: vec![0, 1, 3, 2] };
        let d = q.cyclic_derivative(&w, 0).unwrap();
        assert_eq!(d, BTreeMap::from([(vec![1, 3, 2], 1)]));

        let open = Path { start: 0, edges: vec![0] };
        assert_eq!(q.cyclic_derivative(&open, 0), Err(Error::NotClosed));
        let bad = Path { start: 0, edges: vec![9] };
        assert_eq!(q.cyclic_derivative(&bad, 0), Err(Error::UnknownEdge(9)));
    }

    #[test]
    fn non_loop_vertices_are_even_and_match_label_changes() {
        for n in 1..=8 {
            for n1 in 0..=n / 2 {
                for part in Partition::enumerate(n - n1, n1).unwrap() {
                    let non_loop = n - part.loop_vertices().len();
                    assert_eq!(non_loop % 2, 0, "{part}");
                    let changes = (0..n).filter(|&k| part.labels()[k] != part.labels()[(k + 1) % n]).count();
                    assert_eq!(part.loop_vertices().len(), n - changes);
                }
            }
        }
    }

    #[test]
    fn json_and_dot() {
        let q = Quiver::build(&p(1, 1, "BT"), 1);
        let v = q.to_json();
        assert_eq!(v["framingRank"], json!(1));
        assert_eq!(v["edges"][4], json!(["inf", 0]));
        assert!(q.to_dot().contains("inf -> 0;"));
    }
}
