//! Product-form basis inverse.

/// One elementary column transformation: the basis column at `row` was
/// replaced by a column whose representation in the previous basis is
/// `pivot` at `row` and `entries` elsewhere.
#[derive(Clone, Debug)]
struct Eta {
    row: usize,
    pivot: f64,
    entries: Vec<(u32, f64)>,
}

/// `B^{-1}` as a product `E_k^{-1} ... E_1^{-1}` applied to the identity.
#[derive(Clone, Debug, Default)]
pub(crate) struct EtaFile {
    etas: Vec<Eta>,
    nnz: usize,
}

impl EtaFile {
    pub fn clear(&mut self) {
        self.etas.clear();
        self.nnz = 0;
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    /// `x := B^{-1} x`.
    pub fn ftran(&self, x: &mut [f64]) {
        for e in &self.etas {
            let xr = x[e.row];
            if xr == 0.0 {
                continue;
            }
            let t = xr / e.pivot;
            x[e.row] = t;
            for &(i, a) in &e.entries {
                x[i as usize] -= a * t;
            }
        }
    }

    /// `y^T := y^T B^{-1}`.
    pub fn btran(&self, y: &mut [f64]) {
        for e in self.etas.iter().rev() {
            let mut s = y[e.row];
            for &(i, a) in &e.entries {
                s -= a * y[i as usize];
            }
            y[e.row] = s / e.pivot;
        }
    }

    /// Sparse `x := B^{-1} x`, extending the pattern of `w` as entries fill in.
    pub fn ftran_sparse(&self, w: &mut Workspace) {
        for e in &self.etas {
            let xr = w.values[e.row];
            if xr == 0.0 {
                continue;
            }
            let t = xr / e.pivot;
            w.values[e.row] = t;
            for &(i, a) in &e.entries {
                w.touch(i as usize);
                w.values[i as usize] -= a * t;
            }
        }
    }

    /// [`EtaFile::push`] reading only the pattern of `w`.
    pub fn push_sparse(&mut self, row: usize, w: &Workspace) {
        let mut entries: Vec<(u32, f64)> = w
            .pattern
            .iter()
            .map(|&i| (i as u32, w.values[i]))
            .filter(|&(i, a)| i as usize != row && a.abs() > 1e-13)
            .collect();
        entries.sort_unstable_by_key(|&(i, _)| i);
        self.nnz += entries.len() + 1;
        self.etas.push(Eta {
            row,
            pivot: w.values[row],
            entries,
        });
    }

    /// Appends the transformation for pivoting `alpha = B^{-1} a_q` into
    /// position `row`.
    #[cfg(test)]
    pub fn push(&mut self, row: usize, alpha: &[f64]) {
        let entries: Vec<(u32, f64)> = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != row && a.abs() > 1e-13)
            .map(|(i, &a)| (i as u32, a))
            .collect();
        self.nnz += entries.len() + 1;
        self.etas.push(Eta {
            row,
            pivot: alpha[row],
            entries,
        });
    }
}

/// Dense vector that remembers which entries may be nonzero.
#[derive(Clone, Debug, Default)]
pub(crate) struct Workspace {
    pub values: Vec<f64>,
    pub pattern: Vec<usize>,
    mark: Vec<bool>,
}

impl Workspace {
    pub fn new(m: usize) -> Self {
        Self { values: vec![0.0; m], pattern: Vec::new(), mark: vec![false; m] }
    }

    /// Zeroes the touched entries.
    pub fn clear(&mut self) {
        for &i in &self.pattern {
            self.values[i] = 0.0;
            self.mark[i] = false;
        }
        self.pattern.clear();
    }

    pub fn touch(&mut self, i: usize) {
        if !self.mark[i] {
            self.mark[i] = true;
            self.pattern.push(i);
        }
    }

    pub fn set(&mut self, i: usize, v: f64) {
        self.touch(i);
        self.values[i] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pivots_invert_a_small_basis() {
        // B = [[2, 1], [0, 3]] built from the identity by two pivots.
        let mut f = EtaFile::default();
        let a0 = [2.0, 0.0];
        f.push(0, &a0);
        let mut a1 = [1.0, 3.0];
        f.ftran(&mut a1);
        f.push(1, &a1);

        let mut x = [5.0, 6.0];
        f.ftran(&mut x);
        // B x = (5, 6) gives x = (1.5, 2)
        assert!((x[0] - 1.5).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);

        let mut y = [4.0, 9.0];
        f.btran(&mut y);
        // y B = (4, 9) gives y = (2, 7/3)
        assert!((y[0] - 2.0).abs() < 1e-12 && (y[1] - 7.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_and_dense_agree() {
        let mut f = EtaFile::default();
        f.push(0, &[2.0, 0.0, 1.0]);
        f.push(2, &[1.0, 0.5, 4.0]);
        let mut g = EtaFile::default();
        let mut w = Workspace::new(3);
        w.set(0, 2.0);
        w.set(2, 1.0);
        g.push_sparse(0, &w);
        w.clear();
        w.set(0, 1.0);
        w.set(1, 0.5);
        w.set(2, 4.0);
        g.push_sparse(2, &w);
        w.clear();
        w.set(1, 3.0);
        let mut x = [0.0, 3.0, 0.0];
        f.ftran(&mut x);
        g.ftran_sparse(&mut w);
        for i in 0..3 {
            assert!((x[i] - w.values[i]).abs() < 1e-12);
        }
    }
}
