use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::int::Int;
use crate::intlin::snf::kernel;
use crate::intlin::IntMatrix;
use crate::Error;

/// Finite poset of cells with a dimension function and signed incidences.
///
/// Open sets are up-sets; the open star of `σ` is `{τ : τ ≥ σ}`.
#[derive(Clone, Debug)]
pub struct StratPoset {
    ids: Vec<String>,
    dims: Vec<usize>,
    /// Codimension-one faces with incidence numbers `[τ : σ]`.
    faces: Vec<Vec<(usize, i64)>>,
    cofaces: Vec<Vec<usize>>,
    le: Vec<Vec<bool>>,
    index: HashMap<String, usize>,
}

/// Serialized form: `{"cells":[{"id":..,"dim":..}],"covers":[[face,coface]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetSpec {
    pub cells: Vec<CellSpec>,
    pub covers: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSpec {
    pub id: String,
    pub dim: usize,
}

impl PartialEq for StratPoset {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.dims == other.dims && self.faces == other.faces
    }
}

impl Eq for StratPoset {}

impl StratPoset {
    /// Builds from cells and covering pairs, computing incidence numbers.
    pub fn new(cells: Vec<(String, usize)>, covers: Vec<(String, String)>) -> Result<Self, Error> {
        let mut p = Self::skeleton(cells, &covers)?;
        p.compute_incidences()?;
        Ok(p)
    }

    /// Builds from cells and signed covers `(face, coface, [coface : face])`.
    pub fn with_incidences(cells: Vec<(String, usize)>, covers: Vec<(String, String, i64)>) -> Result<Self, Error> {
        let plain: Vec<(String, String)> = covers.iter().map(|(a, b, _)| (a.clone(), b.clone())).collect();
        let mut p = Self::skeleton(cells, &plain)?;
        for (a, b, s) in covers {
            let (a, b) = (p.index[&a], p.index[&b]);
            for e in p.faces[b].iter_mut() {
                if e.0 == a {
                    e.1 = s;
                }
            }
        }
        p.check_boundary()?;
        Ok(p)
    }

    fn skeleton(cells: Vec<(String, usize)>, covers: &[(String, String)]) -> Result<Self, Error> {
        let n = cells.len();
        let mut index = HashMap::new();
        let mut ids = Vec::with_capacity(n);
        let mut dims = Vec::with_capacity(n);
        for (k, (id, dim)) in cells.into_iter().enumerate() {
            if index.insert(id.clone(), k).is_some() {
                return Err(Error::InvalidPoset(format!("duplicate cell id `{id}`")));
            }
            ids.push(id);
            dims.push(dim);
        }
        let mut faces = vec![Vec::new(); n];
        let mut cofaces = vec![Vec::new(); n];
        for (a, b) in covers {
            let ia = *index.get(a).ok_or_else(|| Error::UnknownCell(a.clone()))?;
            let ib = *index.get(b).ok_or_else(|| Error::UnknownCell(b.clone()))?;
            if dims[ia] >= dims[ib] {
                return Err(Error::InvalidPoset(format!(
                    "cover ({a}, {b}): face dimension {} is not below coface dimension {}",
                    dims[ia], dims[ib]
                )));
            }
            if dims[ia] + 1 != dims[ib] {
                return Err(Error::InvalidPoset(format!("cover ({a}, {b}) skips a dimension")));
            }
            if faces[ib].iter().any(|&(f, _)| f == ia) {
                return Err(Error::InvalidPoset(format!("duplicate cover ({a}, {b})")));
            }
            faces[ib].push((ia, 0));
            cofaces[ia].push(ib);
        }
        for f in faces.iter_mut() {
            f.sort();
        }
        for c in cofaces.iter_mut() {
            c.sort();
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&k| (dims[k], k));
        let mut le = vec![vec![false; n]; n];
        for &t in &order {
            le[t][t] = true;
            for k in 0..faces[t].len() {
                let f = faces[t][k].0;
                for s in 0..n {
                    if le[s][f] {
                        le[s][t] = true;
                    }
                }
            }
        }
        Ok(StratPoset { ids, dims, faces, cofaces, le, index })
    }

    /// Orients each cell so that the boundary of its boundary vanishes.
    fn compute_incidences(&mut self) -> Result<(), Error> {
        for t in self.order() {
            let fs: Vec<usize> = self.faces[t].iter().map(|e| e.0).collect();
            match self.dims[t] {
                0 => {}
                1 => {
                    if fs.len() != 2 {
                        return Err(Error::InvalidPoset(format!(
                            "1-cell `{}` has {} vertices, expected 2",
                            self.ids[t],
                            fs.len()
                        )));
                    }
                    self.faces[t] = vec![(fs[0], -1), (fs[1], 1)];
                }
                _ => {
                    let mut rows: Vec<usize> = fs.iter().flat_map(|&f| self.faces[f].iter().map(|e| e.0)).collect();
                    rows.sort();
                    rows.dedup();
                    let mut m = IntMatrix::zeros(rows.len(), fs.len());
                    for (c, &f) in fs.iter().enumerate() {
                        for &(g, s) in &self.faces[f] {
                            let r = rows.binary_search(&g).unwrap();
                            m.set(r, c, Int::from(s));
                        }
                    }
                    let k = kernel(&m);
                    let v = if k.cols() == 1 { k.column(0) } else { Vec::new() };
                    if v.len() != fs.len() || v.iter().any(|x| !x.is_unit()) {
                        return Err(Error::InvalidPoset(format!(
                            "boundary of `{}` is not an oriented sphere",
                            self.ids[t]
                        )));
                    }
                    let flip = v[0].is_negative();
                    self.faces[t] = fs
                        .iter()
                        .zip(&v)
                        .map(|(&f, x)| (f, if flip { -x.to_i64().unwrap() } else { x.to_i64().unwrap() }))
                        .collect();
                }
            }
        }
        Ok(())
    }

    fn check_boundary(&self) -> Result<(), Error> {
        for t in 0..self.len() {
            if self.faces[t].iter().any(|e| e.1 != 1 && e.1 != -1) {
                return Err(Error::InvalidPoset(format!("cell `{}` has an incidence other than ±1", self.ids[t])));
            }
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(f, s) in &self.faces[t] {
                for &(g, r) in &self.faces[f] {
                    *acc.entry(g).or_default() += s * r;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return Err(Error::InvalidPoset(format!("∂∂ ≠ 0 on cell `{}`", self.ids[t])));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, k: usize) -> &str {
        &self.ids[k]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn cell(&self, id: &str) -> Result<usize, Error> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownCell(id.to_string()))
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims[k]
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    /// `σ ≤ τ`.
    pub fn le(&self, s: usize, t: usize) -> bool {
        self.le[s][t]
    }

    /// Codimension-one faces of `τ` with incidences `[τ : σ]`.
    pub fn faces(&self, t: usize) -> &[(usize, i64)] {
        &self.faces[t]
    }

    pub fn cofaces(&self, s: usize) -> &[usize] {
        &self.cofaces[s]
    }

    pub fn incidence(&self, t: usize, s: usize) -> i64 {
        self.faces[t].iter().find(|e| e.0 == s).map_or(0, |e| e.1)
    }

    /// Cells sorted by `(dim, index)`: a linear extension of the order.
    pub fn order(&self) -> Vec<usize> {
        let mut o: Vec<usize> = (0..self.len()).collect();
        o.sort_by_key(|&k| (self.dims[k], k));
        o
    }

    pub fn cells_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.dims[k] == d).collect()
    }

    /// The open star `{τ : τ ≥ σ}`.
    pub fn star(&self, s: usize) -> Vec<usize> {
        (0..self.len()).filter(|&t| self.le[s][t]).collect()
    }

    /// The closure `{ρ : ρ ≤ σ}`.
    pub fn closure(&self, s: usize) -> Vec<usize> {
        (0..self.len()).filter(|&r| self.le[r][s]).collect()
    }

    pub fn is_up_set(&self, u: &[bool]) -> bool {
        (0..self.len()).all(|s| !u[s] || self.cofaces[s].iter().all(|&t| u[t]))
    }

    pub fn is_down_set(&self, z: &[bool]) -> bool {
        (0..self.len()).all(|t| !z[t] || self.faces[t].iter().all(|e| z[e.0]))
    }

    /// Least upper bound, if any.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let ups: Vec<usize> = (0..self.len()).filter(|&c| self.le[a][c] && self.le[b][c]).collect();
        let m = *ups.iter().min_by_key(|&&c| (self.dims[c], c))?;
        ups.iter().all(|&c| self.le[m][c]).then_some(m)
    }

    /// Whether any two cells with a common upper bound have a join.
    pub fn has_joins(&self) -> bool {
        (0..self.len()).all(|a| {
            (a..self.len()).all(|b| {
                let common = (0..self.len()).any(|c| self.le[a][c] && self.le[b][c]);
                !common || self.join(a, b).is_some()
            })
        })
    }

    /// Membership vector of a list of cells.
    pub fn mask(&self, cells: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.len()];
        for &c in cells {
            m[c] = true;
        }
        m
    }

    /// The subposet on the cells marked in `keep`, with inherited incidences.
    /// Returns the poset and the map from new to old indices.
    pub fn subposet(&self, keep: &[bool]) -> (StratPoset, Vec<usize>) {
        let old: Vec<usize> = (0..self.len()).filter(|&k| keep[k]).collect();
        let mut new_of = vec![usize::MAX; self.len()];
        for (n, &o) in old.iter().enumerate() {
            new_of[o] = n;
        }
        let ids: Vec<String> = old.iter().map(|&o| self.ids[o].clone()).collect();
        let dims: Vec<usize> = old.iter().map(|&o| self.dims[o]).collect();
        let faces: Vec<Vec<(usize, i64)>> = old
            .iter()
            .map(|&o| self.faces[o].iter().filter(|e| keep[e.0]).map(|&(f, s)| (new_of[f], s)).collect())
            .collect();
        let cofaces = old
            .iter()
            .map(|&o| self.cofaces[o].iter().filter(|&&t| keep[t]).map(|&t| new_of[t]).collect())
            .collect();
        let le = old.iter().map(|&a| old.iter().map(|&b| self.le[a][b]).collect()).collect();
        let index = ids.iter().enumerate().map(|(k, id)| (id.clone(), k)).collect();
        (StratPoset { ids, dims, faces, cofaces, le, index }, old)
    }

    /// Product poset; cell `(σ, τ)` has index `σ · |Y| + τ` and id `σ×τ`.
    ///
    /// Incidences follow the Koszul rule: `[(σ,τ):(σ',τ)] = [σ:σ']` and
    /// `[(σ,τ):(σ,τ')] = (−1)^{dim σ}[τ:τ']`.
    pub fn product(&self, other: &StratPoset) -> StratPoset {
        let (n, m) = (self.len(), other.len());
        let idx = |a: usize, b: usize| a * m + b;
        let mut ids = Vec::with_capacity(n * m);
        let mut dims = Vec::with_capacity(n * m);
        let mut faces = Vec::with_capacity(n * m);
        let mut cofaces = Vec::with_capacity(n * m);
        for a in 0..n {
            for b in 0..m {
                ids.push(format!("{}×{}", self.ids[a], other.ids[b]));
                dims.push(self.dims[a] + other.dims[b]);
                let sign = if self.dims[a] % 2 == 0 { 1 } else { -1 };
                let mut f: Vec<(usize, i64)> = self.faces[a].iter().map(|&(x, s)| (idx(x, b), s)).collect();
                f.extend(other.faces[b].iter().map(|&(y, s)| (idx(a, y), sign * s)));
                f.sort();
                faces.push(f);
                let mut c: Vec<usize> = self.cofaces[a].iter().map(|&x| idx(x, b)).collect();
                c.extend(other.cofaces[b].iter().map(|&y| idx(a, y)));
                c.sort();
                cofaces.push(c);
            }
        }
        let mut le = vec![vec![false; n * m]; n * m];
        for a in 0..n {
            for b in 0..m {
                for c in 0..n {
                    if !self.le[a][c] {
                        continue;
                    }
                    for d in 0..m {
                        le[idx(a, b)][idx(c, d)] = other.le[b][d];
                    }
                }
            }
        }
        let index = ids.iter().enumerate().map(|(k, id)| (id.clone(), k)).collect();
        StratPoset { ids, dims, faces, cofaces, le, index }
    }

    pub fn to_spec(&self) -> PosetSpec {
        let cells = self.ids.iter().zip(&self.dims).map(|(id, &dim)| CellSpec { id: id.clone(), dim }).collect();
        let mut covers = Vec::new();
        for t in 0..self.len() {
            for &(f, _) in &self.faces[t] {
                covers.push((self.ids[f].clone(), self.ids[t].clone()));
            }
        }
        PosetSpec { cells, covers }
    }

    pub fn from_spec(spec: &PosetSpec) -> Result<Self, Error> {
        StratPoset::new(spec.cells.iter().map(|c| (c.id.clone(), c.dim)).collect(), spec.covers.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> String {
        x.to_string()
    }

    #[test]
    fn interval_and_incidences() {
        let p = StratPoset::new(
            vec![(s("a"), 0), (s("b"), 0), (s("e"), 1)],
            vec![(s("a"), s("e")), (s("b"), s("e"))],
        )
        .unwrap();
        assert!(p.le(0, 2) && !p.le(0, 1));
        assert_eq!(p.incidence(2, 0) + p.incidence(2, 1), 0);
        assert_eq!(p.join(0, 1), Some(2));
        assert!(p.has_joins());
        let err = StratPoset::new(vec![(s("a"), 1), (s("e"), 1)], vec![(s("a"), s("e"))]).unwrap_err();
        assert!(err.to_string().contains("(a, e)"));
    }

    #[test]
    fn square_product() {
        let i = StratPoset::new(
            vec![(s("a"), 0), (s("b"), 0), (s("e"), 1)],
            vec![(s("a"), s("e")), (s("b"), s("e"))],
        )
        .unwrap();
        let sq = i.product(&i);
        assert_eq!(sq.len(), 9);
        sq.check_boundary().unwrap();
        assert_eq!(sq.cells_of_dim(2).len(), 1);
    }
}
