use std::collections::BTreeSet;

use crate::cellspace::StratPoset;
use crate::Error;

/// Abstract simplicial complex on labelled vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    /// All faces as sorted vertex lists, ordered by `(dim, vertices)`.
    faces: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// The closure of a list of facets.
    pub fn from_facets(labels: Vec<String>, facets: &[Vec<usize>]) -> Result<Self, Error> {
        let mut set = BTreeSet::new();
        for f in facets {
            let mut f = f.clone();
            f.sort();
            f.dedup();
            if f.is_empty() || f.iter().any(|&v| v >= labels.len()) {
                return Err(Error::InvalidPoset(format!("bad facet {f:?}")));
            }
            let k = f.len();
            for mask in 1u64..(1 << k) {
                set.insert(f.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect::<Vec<_>>());
            }
        }
        Self::from_faces(labels, set.into_iter().collect())
    }

    /// A complex from its complete face list; rejects lists not closed under subsets.
    pub fn from_faces(labels: Vec<String>, faces: Vec<Vec<usize>>) -> Result<Self, Error> {
        let mut faces: Vec<Vec<usize>> = faces
            .into_iter()
            .map(|mut f| {
                f.sort();
                f
            })
            .collect();
        faces.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        faces.dedup();
        let set: BTreeSet<&Vec<usize>> = faces.iter().collect();
        for f in &faces {
            if f.is_empty() || f.iter().any(|&v| v >= labels.len()) {
                return Err(Error::InvalidPoset(format!("bad face {f:?}")));
            }
            if f.len() > 1 {
                for i in 0..f.len() {
                    let mut g = f.clone();
                    g.remove(i);
                    if !set.contains(&g) {
                        return Err(Error::InvalidPoset(format!("face {f:?} is missing its face {g:?}")));
                    }
                }
            }
        }
        Ok(SimplicialComplex { labels, faces })
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.faces.iter().map(|f| f.len() - 1).max().unwrap_or(0)
    }

    /// Face counts by dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dim() + 1];
        for s in &self.faces {
            f[s.len() - 1] += 1;
        }
        f
    }

    /// The cone with a new apex vertex.
    pub fn cone(&self, apex: &str) -> SimplicialComplex {
        let a = self.labels.len();
        let mut labels = self.labels.clone();
        labels.push(apex.to_string());
        let mut faces = self.faces.clone();
        faces.push(vec![a]);
        for f in &self.faces {
            let mut g = f.clone();
            g.push(a);
            faces.push(g);
        }
        SimplicialComplex::from_faces(labels, faces).expect("cone of a complex is a complex")
    }

    fn face_id(&self, f: &[usize]) -> String {
        f.iter().map(|&v| self.labels[v].as_str()).collect::<Vec<_>>().join("-")
    }

    /// One cell per simplex; the face omitting the `i`-th vertex has incidence `(−1)^i`.
    pub fn face_poset(&self) -> StratPoset {
        let cells = self.faces.iter().map(|f| (self.face_id(f), f.len() - 1)).collect();
        let mut covers = Vec::new();
        for f in &self.faces {
            if f.len() < 2 {
                continue;
            }
            for i in 0..f.len() {
                let mut g = f.to_vec();
                g.remove(i);
                covers.push((self.face_id(&g), self.face_id(f), if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        StratPoset::with_incidences(cells, covers).expect("simplicial incidences are valid")
    }
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|v| v.to_string()).collect()
}

/// Facets of an 11-vertex triangulation of the real projective 3-space, f-vector (11, 52, 82, 41).
pub const RP3_FACETS: [[usize; 4]; 41] = [
    [0, 1, 2, 3], [0, 1, 2, 6], [0, 1, 3, 9], [0, 1, 5, 6], [0, 1, 5, 9], [0, 2, 3, 8], [0, 2, 6, 10],
    [0, 2, 8, 10], [0, 3, 7, 8], [0, 3, 7, 9], [0, 4, 5, 6], [0, 4, 5, 7], [0, 4, 6, 10], [0, 4, 7, 8],
    [0, 4, 8, 10], [0, 5, 7, 9], [1, 2, 3, 4], [1, 2, 4, 7], [1, 2, 6, 7], [1, 3, 4, 10], [1, 3, 9, 10],
    [1, 4, 7, 8], [1, 4, 8, 10], [1, 5, 6, 8], [1, 5, 8, 10], [1, 5, 9, 10], [1, 6, 7, 8], [2, 3, 4, 5],
    [2, 3, 5, 8], [2, 4, 5, 7], [2, 5, 7, 9], [2, 5, 8, 10], [2, 5, 9, 10], [2, 6, 7, 9], [2, 6, 9, 10],
    [3, 4, 5, 6], [3, 4, 6, 10], [3, 5, 6, 8], [3, 6, 7, 8], [3, 6, 7, 9], [3, 6, 9, 10],
];

/// Built-in simplicial models.
pub mod builtin {
    use super::*;

    pub fn point() -> SimplicialComplex {
        SimplicialComplex::from_facets(labels(1), &[vec![0]]).unwrap()
    }

    pub fn interval() -> SimplicialComplex {
        SimplicialComplex::from_facets(labels(2), &[vec![0, 1]]).unwrap()
    }

    /// Hollow triangle.
    pub fn circle() -> SimplicialComplex {
        SimplicialComplex::from_facets(labels(3), &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    pub fn simplex2() -> SimplicialComplex {
        SimplicialComplex::from_facets(labels(3), &[vec![0, 1, 2]]).unwrap()
    }

    /// Boundary of the tetrahedron.
    pub fn sphere2() -> SimplicialComplex {
        let f: Vec<Vec<usize>> = (0..4).map(|i| (0..4).filter(|&v| v != i).collect()).collect();
        SimplicialComplex::from_facets(labels(4), &f).unwrap()
    }

    pub fn rp3() -> SimplicialComplex {
        let f: Vec<Vec<usize>> = RP3_FACETS.iter().map(|f| f.to_vec()).collect();
        SimplicialComplex::from_facets(labels(11), &f).unwrap()
    }

    /// The cone over [`rp3`] with apex `c`.
    pub fn rp3_cone() -> SimplicialComplex {
        rp3().cone("c")
    }

    /// Built-in space by name.
    pub fn by_name(name: &str) -> Option<SimplicialComplex> {
        Some(match name {
            "point" => point(),
            "interval" => interval(),
            "circle" => circle(),
            "simplex2" => simplex2(),
            "sphere2" => sphere2(),
            "rp3" => rp3(),
            "rp3-cone" => rp3_cone(),
            _ => return None,
        })
    }

    pub const NAMES: [&str; 7] = ["point", "interval", "circle", "simplex2", "sphere2", "rp3", "rp3-cone"];
}

#[cfg(test)]
mod tests {
    use super::builtin::*;
    use super::*;

    #[test]
    fn face_posets() {
        let p = interval().face_poset();
        assert_eq!(p.len(), 3);
        let c = circle().face_poset();
        assert_eq!((c.len(), (0..c.len()).map(|k| c.faces(k).len()).sum::<usize>()), (6, 6));
        assert_eq!(simplex2().face_poset().len(), 7);
        assert_eq!(rp3().f_vector(), vec![11, 52, 82, 41]);
        assert_eq!(rp3_cone().face_poset().len(), 373);
        assert!(SimplicialComplex::from_faces(labels(2), vec![vec![0, 1], vec![0]]).is_err());
    }
}
