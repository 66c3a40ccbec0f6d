//! Spanning-tree presentations of the fundamental group and rational
//! homology ranks.

use std::collections::VecDeque;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::complex::{EdgeId, TriangleComplex, VertexId};
use crate::error::GroupError;

/// A word in the generators: `k > 0` is generator `k-1`, `k < 0` its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Word(pub Vec<i64>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(gen: usize, inverse: bool) -> Self {
        let k = gen as i64 + 1;
        Word(vec![if inverse { -k } else { k }])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|k| -k).collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v).reduced()
    }

    pub fn reduced(&self) -> Word {
        let mut out: Vec<i64> = Vec::with_capacity(self.0.len());
        for &k in &self.0 {
            if out.last() == Some(&-k) {
                out.pop();
            } else {
                out.push(k);
            }
        }
        Word(out)
    }

    /// Cyclic reduction: strips matching first/last inverse pairs.
    pub fn cyclically_reduced(&self) -> Word {
        let mut w = self.reduced().0;
        while w.len() >= 2 && w[0] == -w[w.len() - 1] {
            w.pop();
            w.remove(0);
        }
        Word(w)
    }

    fn exponent_sum(&self, gen: usize) -> i64 {
        let k = gen as i64 + 1;
        self.0.iter().map(|&l| if l == k { 1 } else if l == -k { -1 } else { 0 }).sum()
    }

    fn occurrences(&self, gen: usize) -> usize {
        let k = gen as i64 + 1;
        self.0.iter().filter(|l| l.abs() == k).count()
    }

    /// Replaces every occurrence of generator `gen` by `w`.
    fn substitute(&self, gen: usize, w: &Word) -> Word {
        let k = gen as i64 + 1;
        let inv = w.inverse();
        let mut out = Vec::new();
        for &l in &self.0 {
            if l == k {
                out.extend_from_slice(&w.0);
            } else if l == -k {
                out.extend_from_slice(&inv.0);
            } else {
                out.push(l);
            }
        }
        Word(out).reduced()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&k| if k > 0 { format!("g{}", k - 1) } else { format!("g{}^-1", -k - 1) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Presentation {
    pub basepoint: VertexId,
    /// Generator `i` is the non-tree edge `generators[i]`, read low to high.
    pub generators: Vec<EdgeId>,
    pub tree: Vec<EdgeId>,
    pub relators: Vec<Word>,
    #[serde(skip)]
    gen_of_edge: Vec<Option<usize>>,
}

/// Spanning-tree presentation based at `basepoint`.
pub fn fundamental_group(
    x: &TriangleComplex,
    basepoint: VertexId,
) -> Result<Presentation, GroupError> {
    if basepoint.0 >= x.vertex_count() {
        return Err(GroupError::UnknownVertex(basepoint.to_string()));
    }
    let mut seen = vec![false; x.vertex_count()];
    let mut in_tree = vec![false; x.edge_count()];
    let mut queue = VecDeque::from([basepoint]);
    seen[basepoint.0] = true;
    while let Some(v) = queue.pop_front() {
        for &e in x.edges_at(v) {
            let w = x.edge(e).other_end(v);
            if !seen[w.0] {
                seen[w.0] = true;
                in_tree[e.0] = true;
                queue.push_back(w);
            }
        }
    }
    if let Some(v) = x.vertices().find(|v| !seen[v.0]) {
        return Err(GroupError::Disconnected(x.vertex_name(v).to_string()));
    }
    let mut generators = Vec::new();
    let mut gen_of_edge = vec![None; x.edge_count()];
    let mut tree = Vec::new();
    for e in x.edge_ids() {
        if in_tree[e.0] {
            tree.push(e);
        } else {
            gen_of_edge[e.0] = Some(generators.len());
            generators.push(e);
        }
    }
    let mut p = Presentation { basepoint, generators, tree, relators: Vec::new(), gen_of_edge };
    let relators = x
        .triangle_ids()
        .map(|t| {
            let v = x.triangle(t).vertices;
            p.word_of_cycle(x, &[v[0], v[1], v[2], v[0]]).expect("triangle boundary is a path")
        })
        .collect();
    p.relators = relators;
    Ok(p)
}

impl Presentation {
    pub fn generator_of(&self, e: EdgeId) -> Option<usize> {
        self.gen_of_edge.get(e.0).copied().flatten()
    }

    fn step(&self, x: &TriangleComplex, a: VertexId, b: VertexId) -> Result<Word, GroupError> {
        let e = x.edge_between(a, b).ok_or(GroupError::BadPath)?;
        Ok(match self.generator_of(e) {
            None => Word::identity(),
            Some(g) => Word::letter(g, a > b),
        })
    }

    /// Reduced word of a closed vertex path (first vertex repeated at the end).
    pub fn word_of_cycle(&self, x: &TriangleComplex, path: &[VertexId]) -> Result<Word, GroupError> {
        if path.len() < 2 || path[0] != *path.last().unwrap() {
            return Err(GroupError::BadPath);
        }
        self.word_of_path(x, path)
    }

    /// Word of an arbitrary edge path; for paths between tree-connected
    /// points this is the word of the loop closed up through the tree.
    pub fn word_of_path(&self, x: &TriangleComplex, path: &[VertexId]) -> Result<Word, GroupError> {
        let mut out = Vec::new();
        for w in path.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            out.extend(self.step(x, w[0], w[1])?.0);
        }
        Ok(Word(out).reduced())
    }

    /// Tietze elimination of generators that occur exactly once in some
    /// relator.
    pub fn simplified(&self) -> SimplePresentation {
        let mut gens: Vec<usize> = (0..self.generators.len()).collect();
        let mut rels: Vec<Word> =
            self.relators.iter().map(|r| r.cyclically_reduced()).filter(|r| !r.is_empty()).collect();
        loop {
            let mut progress = false;
            'outer: for ri in 0..rels.len() {
                for &g in &gens {
                    if rels[ri].occurrences(g) != 1 {
                        continue;
                    }
                    // r = u g^ε v  ⇒  g^ε = u⁻¹ v⁻¹.
                    let r = &rels[ri].0;
                    let k = g as i64 + 1;
                    let pos = r.iter().position(|l| l.abs() == k).unwrap();
                    let u = Word(r[..pos].to_vec());
                    let v = Word(r[pos + 1..].to_vec());
                    let mut rep = u.inverse().concat(&v.inverse());
                    if r[pos] < 0 {
                        rep = rep.inverse();
                    }
                    let rel = rels.remove(ri);
                    debug_assert_eq!(rel.occurrences(g), 1);
                    for other in rels.iter_mut() {
                        *other = other.substitute(g, &rep).cyclically_reduced();
                    }
                    rels.retain(|r| !r.is_empty());
                    gens.retain(|&h| h != g);
                    progress = true;
                    break 'outer;
                }
            }
            if !progress {
                break;
            }
        }
        rels.sort();
        rels.dedup();
        SimplePresentation { generators: gens, relators: rels }
    }

    /// Free rank of the abelianization.
    pub fn abelian_rank(&self) -> usize {
        let rows: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|r| (0..self.generators.len()).map(|g| r.exponent_sum(g)).collect())
            .collect();
        self.generators.len() - rational_rank(&rows, self.generators.len())
    }
}

/// Presentation after Tietze moves; generator ids refer to the original
/// presentation.
#[derive(Clone, Debug, Serialize)]
pub struct SimplePresentation {
    pub generators: Vec<usize>,
    pub relators: Vec<Word>,
}

/// Rank over ℚ of an integer matrix.
pub fn rational_rank(rows: &[Vec<i64>], ncols: usize) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = BigRational::one() / m[rank][col].clone();
        for c in col..ncols {
            m[rank][c] = &m[rank][c] * &inv;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for c in col..ncols {
                    let d = &f * &m[rank][c];
                    m[i][c] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Betti {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
}

/// Rational Betti numbers from the simplicial chain complex.
pub fn betti_numbers(x: &TriangleComplex) -> Betti {
    let b0 = x.component_count();
    let rank1 = x.vertex_count() - b0;
    let rows: Vec<Vec<i64>> = x
        .triangle_ids()
        .map(|t| {
            let mut row = vec![0i64; x.edge_count()];
            let v = x.triangle(t).vertices;
            for (a, b) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                let e = x.edge_between(a, b).unwrap();
                row[e.0] += if a < b { 1 } else { -1 };
            }
            row
        })
        .collect();
    let rank2 = rational_rank(&rows, x.edge_count());
    Betti { b0, b1: x.edge_count() - rank1 - rank2, b2: x.triangle_count() - rank2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn square_is_simply_connected() {
        let x = fixtures::flat_square();
        let p = fundamental_group(&x, VertexId(0)).unwrap();
        assert_eq!(p.generators.len(), 2);
        let s = p.simplified();
        assert!(s.generators.is_empty() && s.relators.is_empty());
        assert_eq!(p.abelian_rank(), 0);
    }

    #[test]
    fn theta_circle_homology() {
        let x = fixtures::theta_circle();
        let p = fundamental_group(&x, VertexId(0)).unwrap();
        assert_eq!(p.abelian_rank(), 3);
        assert_eq!(betti_numbers(&x), Betti { b0: 1, b1: 3, b2: 2 });
        let s = p.simplified();
        assert!(s.generators.len() >= 3);
    }

    #[test]
    fn free_circle_gives_one_free_generator() {
        let x = fixtures::triangle_with_circle();
        let p = fundamental_group(&x, VertexId(0)).unwrap();
        let s = p.simplified();
        assert_eq!(s.generators.len(), 1);
        assert!(s.relators.is_empty());
    }

    #[test]
    fn disconnected_is_rejected() {
        let x = fixtures::two_wedges_disjoint();
        assert!(matches!(fundamental_group(&x, VertexId(0)), Err(GroupError::Disconnected(_))));
    }

    #[test]
    fn word_reduction() {
        let w = Word(vec![1, 2, -2, -1, 3]);
        assert_eq!(w.reduced(), Word(vec![3]));
        assert_eq!(Word(vec![-1, 2, 3, 1]).cyclically_reduced(), Word(vec![2, 3]));
        assert_eq!(Word(vec![1, -2]).inverse(), Word(vec![2, -1]));
    }

    #[test]
    fn abelian_rank_matches_betti_on_corpus() {
        for (name, x) in fixtures::corpus() {
            let b = betti_numbers(&x);
            if b.b0 != 1 {
                continue;
            }
            let p = fundamental_group(&x, VertexId(0)).unwrap();
            assert_eq!(p.abelian_rank(), b.b1, "{name}");
        }
    }
}
