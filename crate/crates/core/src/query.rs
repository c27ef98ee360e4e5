//! Linear queries and their structured cut / rank-1 forms.
//!
//! A query is stored in *canonical* form: a coefficient vector in `[0,1]^|X|`
//! plus a positive `rescale` applied to the dot product when an answer is
//! made public. All noise and thresholds operate on the canonical value, whose
//! sensitivity to adding or removing one item is at most 1.
//!
//! Cut and rank-1 queries follow the symmetric adjacency-matrix convention:
//! `Q_{S,T}(G) = sum_{i in S, j in T} A[i][j]`, a sum over ordered pairs. On the
//! unordered-pair universe an edge `{i,j}` contributes
//! `1[i in S, j in T] + 1[j in S, i in T]`, which can be 2. The canonical form
//! stores half of that and sets `rescale = 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::universe::Universe;

/// A cut query `Q_{S,T}` on vertex sets `S` and `T` (either may be empty).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutQuery {
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    #[serde(rename = "T")]
    pub t: Vec<usize>,
}

/// A rank-1 query `u v^T` with `u, v` in `[0,1]^|V|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rank1Query {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Where a linear query came from. Serializes as a query-stream line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum QueryTag {
    Generic,
    Cut(CutQuery),
    Rank1(Rank1Query),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearQuery {
    coefficients: Vec<f64>,
    rescale: f64,
    tag: QueryTag,
}

impl LinearQuery {
    /// A generic query with `rescale = 1`. Every coefficient must lie in `[0,1]`.
    pub fn generic(coefficients: Vec<f64>) -> Result<Self> {
        check_unit_interval(&coefficients, "coefficient")?;
        Ok(Self { coefficients, rescale: 1.0, tag: QueryTag::Generic })
    }

    /// The indicator query of a set of universe indices.
    pub fn indicator(universe: &Universe, items: &[usize]) -> Result<Self> {
        let mut coefficients = vec![0.0; universe.size()];
        for &i in items {
            if i >= universe.size() {
                return Err(Error::Validation(format!("item {i} outside universe of size {}", universe.size())));
            }
            coefficients[i] = 1.0;
        }
        Ok(Self { coefficients, rescale: 1.0, tag: QueryTag::Generic })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn rescale(&self) -> f64 {
        self.rescale
    }

    pub fn tag(&self) -> &QueryTag {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    /// Canonical value `<coefficients, h>`, without the public rescale.
    pub fn canonical(&self, h: &[f64]) -> Result<f64> {
        self.check_dim(h.len())?;
        Ok(self.dot(h))
    }

    /// Public value `rescale * <coefficients, h>`. Works for histograms as well
    /// as fractional or negative hypothesis vectors.
    pub fn evaluate(&self, h: &[f64]) -> Result<f64> {
        Ok(self.rescale * self.canonical(h)?)
    }

    /// Dot product; callers guarantee matching dimensions.
    pub(crate) fn dot(&self, h: &[f64]) -> f64 {
        debug_assert_eq!(h.len(), self.coefficients.len());
        self.coefficients.iter().zip(h).map(|(q, x)| q * x).sum()
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.coefficients.len() {
            return Err(Error::DimensionMismatch { expected: self.coefficients.len(), got });
        }
        Ok(())
    }

    /// Rebuilds a query from a stream tag.
    pub fn from_tag(tag: &QueryTag, universe: &Universe) -> Result<Self> {
        match tag {
            QueryTag::Cut(c) => compile_cut_query(&c.s, &c.t, universe),
            QueryTag::Rank1(r) => compile_rank1_query(&r.u, &r.v, universe),
            QueryTag::Generic => {
                Err(Error::Validation("generic queries cannot be rebuilt from their tag".into()))
            }
        }
    }
}

fn check_unit_interval(values: &[f64], what: &str) -> Result<()> {
    match values.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
        Some((i, x)) => Err(Error::Validation(format!("{what} {i} = {x} is outside [0, 1]"))),
        None => Ok(()),
    }
}

fn membership(set: &[usize], v: usize, name: &str) -> Result<Vec<bool>> {
    let mut mask = vec![false; v];
    for &x in set {
        if x >= v {
            return Err(Error::Validation(format!("vertex {x} in {name} outside [0, {v})")));
        }
        mask[x] = true;
    }
    Ok(mask)
}

/// Compiles `Q_{S,T}` onto the pair universe: coefficient
/// `(1[i in S, j in T] + 1[j in S, i in T]) / 2` for the pair `{i,j}` and
/// `rescale = 2`.
pub fn compile_cut_query(s: &[usize], t: &[usize], universe: &Universe) -> Result<LinearQuery> {
    let v = universe.require_graph()?;
    let in_s = membership(s, v, "S")?;
    let in_t = membership(t, v, "T")?;
    let coefficients = universe
        .pairs()
        .map(|(_, i, j)| {
            let ordered = (in_s[i] && in_t[j]) as u8 + (in_s[j] && in_t[i]) as u8;
            f64::from(ordered) / 2.0
        })
        .collect();
    let s_sorted: Vec<usize> = (0..v).filter(|&x| in_s[x]).collect();
    let t_sorted: Vec<usize> = (0..v).filter(|&x| in_t[x]).collect();
    Ok(LinearQuery {
        coefficients,
        rescale: 2.0,
        tag: QueryTag::Cut(CutQuery { s: s_sorted, t: t_sorted }),
    })
}

/// Compiles `Q_{u,v}` onto the pair universe: coefficient
/// `(u[i] v[j] + u[j] v[i]) / 2` and `rescale = 2`.
pub fn compile_rank1_query(u: &[f64], v: &[f64], universe: &Universe) -> Result<LinearQuery> {
    let vc = universe.require_graph()?;
    for (name, x) in [("u", u), ("v", v)] {
        if x.len() != vc {
            return Err(Error::DimensionMismatch { expected: vc, got: x.len() });
        }
        check_unit_interval(x, name)?;
    }
    let coefficients = universe
        .pairs()
        .map(|(_, i, j)| (u[i] * v[j] + u[j] * v[i]) / 2.0)
        .collect();
    Ok(LinearQuery {
        coefficients,
        rescale: 2.0,
        tag: QueryTag::Rank1(Rank1Query { u: u.to_vec(), v: v.to_vec() }),
    })
}

/// `rescale * <coefficients, h>`.
pub fn evaluate(query: &LinearQuery, h: &[f64]) -> Result<f64> {
    query.evaluate(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::DataHistogram;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn adjacency(g: &DataHistogram) -> Vec<Vec<f64>> {
        let v = g.universe().vertex_count().unwrap();
        let mut a = vec![vec![0.0; v]; v];
        for (i, j) in g.edges() {
            a[i][j] = 1.0;
            a[j][i] = 1.0;
        }
        a
    }

    fn subset(mask: u32, v: usize) -> Vec<usize> {
        (0..v).filter(|&i| mask >> i & 1 == 1).collect()
    }

    #[test]
    fn cut_examples() {
        // vertices {1,2} of a 3-vertex graph are 0 and 1 here
        let g = DataHistogram::from_edges(3, &[(0, 1)]).unwrap();
        let u = *g.universe();
        let q = compile_cut_query(&[0], &[1], &u).unwrap();
        assert_eq!(q.evaluate(g.weights()).unwrap(), 1.0);
        let q = compile_cut_query(&[0, 1], &[0, 1], &u).unwrap();
        assert_eq!(q.evaluate(g.weights()).unwrap(), 2.0);
        let q = compile_cut_query(&[], &[0, 1, 2], &u).unwrap();
        assert!(q.coefficients().iter().all(|&c| c == 0.0));
        assert_eq!(q.evaluate(g.weights()).unwrap(), 0.0);
    }

    #[test]
    fn cut_requires_graph_universe() {
        let u = Universe::new(6).unwrap();
        assert!(matches!(compile_cut_query(&[0], &[1], &u), Err(Error::DomainMismatch(_))));
        let g = Universe::graph(3).unwrap();
        assert!(compile_cut_query(&[3], &[1], &g).is_err());
    }

    #[test]
    fn rank1_examples() {
        let u3 = Universe::graph(3).unwrap();
        let chi_s = [1.0, 0.0, 1.0];
        let chi_t = [0.0, 1.0, 1.0];
        assert_eq!(
            compile_rank1_query(&chi_s, &chi_t, &u3).unwrap().coefficients(),
            compile_cut_query(&[0, 2], &[1, 2], &u3).unwrap().coefficients()
        );
        let g = DataHistogram::from_edges(2, &[(0, 1)]).unwrap();
        let q = compile_rank1_query(&[1.0, 1.0], &[1.0, 1.0], g.universe()).unwrap();
        assert_eq!(q.evaluate(g.weights()).unwrap(), 2.0);
        let q = compile_rank1_query(&[0.0, 0.0], &[1.0, 1.0], g.universe()).unwrap();
        assert_eq!(q.evaluate(g.weights()).unwrap(), 0.0);
        assert!(compile_rank1_query(&[1.5, 0.0], &[1.0, 1.0], g.universe()).is_err());
        assert!(compile_rank1_query(&[1.0], &[1.0, 1.0], g.universe()).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let q = LinearQuery::generic(vec![1.0; 8]).unwrap();
        assert_eq!(q.evaluate(&[0.0; 8]).unwrap(), 0.0);
        let h = [1.0, 0.0, 3.0, 2.0, 0.0, 0.0, 1.0, 4.0];
        assert_eq!(q.evaluate(&h).unwrap(), 11.0);
        assert!(matches!(q.evaluate(&[1.0; 3]), Err(Error::DimensionMismatch { .. })));
        assert!(LinearQuery::generic(vec![0.5, 1.1]).is_err());

        // random 8-dim instance against a separately written summation
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let coeffs: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
        let h: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
        let mut oracle = 0.0;
        for i in 0..8 {
            oracle += coeffs[i] * h[i];
        }
        let q = LinearQuery::generic(coeffs).unwrap();
        assert!((q.evaluate(&h).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn cut_matches_double_sum_exhaustively() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for v in 2..=8usize {
            let u = Universe::graph(v).unwrap();
            let edges: Vec<_> = u.pairs().filter(|_| rng.random_bool(0.5)).map(|(_, i, j)| (i, j)).collect();
            let g = DataHistogram::from_edges(v, &edges).unwrap();
            let a = adjacency(&g);
            for sm in 0..(1u32 << v) {
                let s = subset(sm, v);
                for tm in 0..(1u32 << v) {
                    let t = subset(tm, v);
                    let direct: f64 = s.iter().flat_map(|&i| t.iter().map(move |&j| (i, j))).map(|(i, j)| a[i][j]).sum();
                    let q = compile_cut_query(&s, &t, &u).unwrap();
                    assert_eq!(q.evaluate(g.weights()).unwrap(), direct);
                }
            }
        }
    }

    #[test]
    fn canonical_sensitivity_at_most_one() {
        for v in 2..=6usize {
            let u = Universe::graph(v).unwrap();
            let base = DataHistogram::zeros(u);
            let queries: Vec<LinearQuery> = (0..(1u32 << v))
                .flat_map(|sm| (0..(1u32 << v)).map(move |tm| (sm, tm)))
                .map(|(sm, tm)| compile_cut_query(&subset(sm, v), &subset(tm, v), &u).unwrap())
                .collect();
            for e in 0..u.size() {
                let mut flipped = base.weights().to_vec();
                flipped[e] = 1.0;
                for q in &queries {
                    let d = (q.canonical(&flipped).unwrap() - q.canonical(base.weights()).unwrap()).abs();
                    assert!(d <= 1.0);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn rank1_with_indicators_equals_cut(v in 2usize..9, sm in any::<u32>(), tm in any::<u32>()) {
            let u = Universe::graph(v).unwrap();
            let s = subset(sm, v);
            let t = subset(tm, v);
            let chi = |set: &[usize]| (0..v).map(|i| if set.contains(&i) { 1.0 } else { 0.0 }).collect::<Vec<_>>();
            let r = compile_rank1_query(&chi(&s), &chi(&t), &u).unwrap();
            let c = compile_cut_query(&s, &t, &u).unwrap();
            prop_assert_eq!(r.coefficients(), c.coefficients());
            prop_assert_eq!(r.rescale(), c.rescale());
        }

        #[test]
        fn tag_round_trips_through_json(v in 2usize..9, sm in any::<u32>(), tm in any::<u32>()) {
            let u = Universe::graph(v).unwrap();
            let q = compile_cut_query(&subset(sm, v), &subset(tm, v), &u).unwrap();
            let line = serde_json::to_string(q.tag()).unwrap();
            let tag: QueryTag = serde_json::from_str(&line).unwrap();
            prop_assert_eq!(LinearQuery::from_tag(&tag, &u).unwrap(), q);
        }
    }
}
