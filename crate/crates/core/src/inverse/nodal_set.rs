use std::collections::BTreeMap;

use rayon::prelude::*;

use super::InverseError;
use crate::forward::{eigenvalues_with, nodes_with, ForwardError, NodeList, Propagator};
use crate::model::Problem;
use crate::Real;

/// Nodal points `{xₙʲ : j = 0..n−1}` for a set of indices `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalSet<T> {
    entries: BTreeMap<i64, Vec<T>>,
    /// Where the data came from (free text, carried into reports).
    pub provenance: String,
}

impl<T: Real> NodalSet<T> {
    pub fn new(provenance: impl Into<String>) -> Self {
        NodalSet { entries: BTreeMap::new(), provenance: provenance.into() }
    }

    /// Adds the nodes for index `n`, which must be exactly `n` strictly
    /// increasing points inside `(0, π)`.
    pub fn insert(&mut self, n: i64, nodes: Vec<T>) -> Result<(), InverseError> {
        validate(n, &nodes)?;
        self.entries.insert(n, nodes);
        Ok(())
    }

    pub fn get(&self, n: i64) -> Option<&[T]> {
        self.entries.get(&n).map(Vec::as_slice)
    }

    pub(crate) fn require(&self, n: i64) -> Result<&[T], InverseError> {
        self.get(n).ok_or(InverseError::MissingIndex(n))
    }

    /// Indices present, ascending.
    pub fn indices(&self) -> Vec<i64> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &[T])> {
        self.entries.iter().map(|(&n, v)| (n, v.as_slice()))
    }

    /// Builds the set from forward node lists, keeping the zeros labelled
    /// `j = 0..n−1`.
    pub fn from_node_lists(lists: &[NodeList<T>], provenance: impl Into<String>) -> Result<Self, InverseError> {
        let mut set = Self::new(provenance);
        for list in lists {
            set.insert(list.n, list.labelled_nodes().to_vec())?;
        }
        Ok(set)
    }

    /// Runs the forward solver for every `n` in `n_list`.
    pub fn from_problem(problem: &Problem<T>, n_list: &[i64], tol: T) -> Result<Self, InverseError> {
        let prop = Propagator::new(problem)?;
        let lists = n_list
            .par_iter()
            .map(|&n| {
                let spectrum = eigenvalues_with(&prop, n, n, tol)?;
                let lambda = spectrum.lambda(n).ok_or(InverseError::MissingEigenvalue(n))?;
                Ok(nodes_with(&prop, lambda, n, tol)?)
            })
            .collect::<Result<Vec<_>, InverseError>>()?;
        Self::from_node_lists(&lists, "forward solver")
    }
}

impl From<ForwardError> for InverseError {
    fn from(e: ForwardError) -> Self {
        InverseError::Forward(Box::new(e))
    }
}

fn validate<T: Real>(n: i64, nodes: &[T]) -> Result<(), InverseError> {
    if n < 1 || nodes.len() as i64 != n {
        return Err(InverseError::Length { n, got: nodes.len() });
    }
    for (index, &x) in nodes.iter().enumerate() {
        if !(x > T::zero() && x < T::PI()) {
            return Err(InverseError::OutOfRange { n, index, value: x.to_f64_lossy() });
        }
        if index > 0 && !(x > nodes[index - 1]) {
            return Err(InverseError::NotIncreasing { n, index });
        }
    }
    Ok(())
}

/// The node of index `n` closest to `x` (ties go to the smaller `j`).
pub fn select_nodes<T: Real>(set: &NodalSet<T>, x: T, n: i64) -> Result<(usize, T), InverseError> {
    let nodes = set.require(n)?;
    let right = nodes.partition_point(|&t| t < x);
    let j = if right == 0 {
        0
    } else if right == nodes.len() || x - nodes[right - 1] <= nodes[right] - x {
        right - 1
    } else {
        right
    };
    Ok((j, nodes[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn zero_set() -> NodalSet<f64> {
        let mut set = NodalSet::new("closed form");
        set.insert(3, vec![PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]).unwrap();
        set
    }

    #[test]
    fn rejects_malformed_arrays() {
        let mut set = NodalSet::<f64>::new("test");
        assert!(matches!(set.insert(3, vec![0.5, 1.0]), Err(InverseError::Length { n: 3, got: 2 })));
        assert!(matches!(set.insert(2, vec![1.0, 1.0]), Err(InverseError::NotIncreasing { n: 2, index: 1 })));
        assert!(matches!(set.insert(2, vec![0.0, 1.0]), Err(InverseError::OutOfRange { n: 2, index: 0, .. })));
        assert!(matches!(set.insert(1, vec![f64::NAN]), Err(InverseError::OutOfRange { .. })));
        assert!(set.is_empty());
    }

    #[test]
    fn selects_closest_node() {
        let set = zero_set();
        assert_eq!(select_nodes(&set, 1.6, 3).unwrap(), (1, PI / 2.0));
        assert_eq!(select_nodes(&set, 0.01, 3).unwrap().0, 0);
        assert_eq!(select_nodes(&set, 3.1, 3).unwrap().0, 2);
        let mut even = NodalSet::new("test");
        even.insert(2, vec![0.5, 1.0]).unwrap();
        assert_eq!(select_nodes(&even, 0.75, 2).unwrap(), (0, 0.5));
        assert!(matches!(select_nodes(&set, 1.0, 4), Err(InverseError::MissingIndex(4))));
    }
}
