use super::vectors::VectorSet;

/// All complete orthogonal bases present in a [`VectorSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalityStructure {
    set: VectorSet,
    bases: Vec<Vec<usize>>,
}

impl OrthogonalityStructure {
    pub fn set(&self) -> &VectorSet {
        &self.set
    }

    /// Bases as sorted index tuples, in lexicographic order.
    pub fn bases(&self) -> &[Vec<usize>] {
        &self.bases
    }

    pub fn num_vectors(&self) -> usize {
        self.set.len()
    }

    /// Number of bases each vector belongs to.
    pub fn membership_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.set.len()];
        for b in &self.bases {
            for &v in b {
                counts[v] += 1;
            }
        }
        counts
    }
}

/// Enumerates every `dim`-tuple of mutually orthogonal vectors.
pub fn build_orthogonality(set: &VectorSet, tol: f64) -> OrthogonalityStructure {
    let n = set.len();
    let dim = set.dim();
    let adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i != j && set.orthogonal(i, j, tol)).collect()).collect();

    let mut bases = Vec::new();
    let mut current = Vec::with_capacity(dim);
    extend_clique(&adj, dim, 0, &mut current, &mut bases);
    OrthogonalityStructure { set: set.clone(), bases }
}

fn extend_clique(adj: &[Vec<bool>], size: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == size {
        out.push(current.clone());
        return;
    }
    for v in start..adj.len() {
        if current.iter().all(|&u| adj[u][v]) {
            current.push(v);
            extend_clique(adj, size, v + 1, current, out);
            current.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_basis(k: usize) -> VectorSet {
        let vs = (0..k).map(|i| (0..3).map(|j| i64::from(i == j)).collect()).collect();
        VectorSet::from_integer("e", 3, 1, vs).unwrap()
    }

    #[test]
    fn standard_basis_is_one_triad() {
        let s = build_orthogonality(&std_basis(3), 1e-9);
        assert_eq!(s.bases(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn two_vectors_make_no_triad() {
        assert!(build_orthogonality(&std_basis(2), 1e-9).bases().is_empty());
    }

    #[test]
    fn real_and_exact_sets_agree() {
        let exact = VectorSet::from_integer("a", 3, 1, vec![vec![1, 1, 0], vec![1, -1, 0], vec![0, 0, 1]]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let real =
            VectorSet::from_real("b", 3, vec![vec![s, s, 0.0], vec![s, -s, 0.0], vec![0.0, 0.0, 1.0]], 1e-9).unwrap();
        assert_eq!(build_orthogonality(&exact, 1e-9).bases(), build_orthogonality(&real, 1e-9).bases());
    }
}
