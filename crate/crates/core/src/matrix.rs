use std::fmt;

/// Square `n × n` table of pairwise Shapley shares, row-major.
///
/// Entry `(i, j)` is the part of player `i`'s Shapley value attributed to
/// its synergy with player `j`.
#[derive(Clone, PartialEq)]
pub struct SynergyMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Clone> SynergyMatrix<T> {
    pub fn filled(n: usize, value: T) -> Self {
        SynergyMatrix {
            n,
            entries: vec![value; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(SynergyMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn entries_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.entries.iter_mut()
    }

    /// Copies the upper triangle onto the lower one.
    pub fn mirror_upper(&mut self) {
        for i in 0..self.n {
            for j in i + 1..self.n {
                let v = self.get(i, j).clone();
                self.set(j, i, v);
            }
        }
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> SynergyMatrix<U> {
        SynergyMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl<T: PartialEq> SynergyMatrix<T> {
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.entries[i * self.n + j] == self.entries[j * self.n + i]))
    }
}

impl<T: fmt::Debug> fmt::Debug for SynergyMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.entries.chunks(self.n.max(1)).take(self.n))
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_makes_symmetric() {
        let mut m = SynergyMatrix::from_rows(vec![vec![0, 1, 2], vec![0, 0, 3], vec![0, 0, 0]]).unwrap();
        assert!(!m.is_symmetric());
        m.mirror_upper();
        assert!(m.is_symmetric());
        assert_eq!(m.row(2), &[2, 3, 0]);
        assert_eq!(m.rows().count(), 3);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(SynergyMatrix::from_rows(vec![vec![1, 2], vec![3]]).is_none());
    }
}
