//! Dense square matrices: product, Gauss-Jordan inversion, and a Neumann-series
//! evaluation of `G (I - G)^-1` used to cross-check the closed form.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Pivots smaller than this are treated as zero.
pub const SINGULAR_PIVOT: f64 = 1e-12;

/// Square matrix of finite reals, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispMatrix {
    order: usize,
    data: Vec<f64>,
}

impl CrispMatrix {
    pub fn zeros(order: usize) -> Self {
        assert!(order >= 1, "matrix order must be at least 1");
        CrispMatrix {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = CrispMatrix::zeros(order);
        for i in 0..order {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::dimension("matrix order", 1, 0));
        }
        let mut data = Vec::with_capacity(order * order);
        for row in rows {
            if row.len() != order {
                return Err(Error::dimension("matrix row length", order, row.len()));
            }
            data.extend(row);
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CrispMatrix { order, data })
    }

    pub(crate) fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = CrispMatrix::zeros(order);
        for i in 0..order {
            for j in 0..order {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.order)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.order)
            .map(|j| (0..self.order).map(|i| self[(i, j)]).sum())
            .collect()
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        self.rows()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &CrispMatrix) -> f64 {
        assert_eq!(self.order, other.order);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> CrispMatrix {
        CrispMatrix::from_fn(self.order, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - self[(i, j)]
        })
    }

    pub fn add(&self, other: &CrispMatrix) -> Result<CrispMatrix> {
        self.check_order(other)?;
        Ok(CrispMatrix {
            order: self.order,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn multiply(&self, other: &CrispMatrix) -> Result<CrispMatrix> {
        self.check_order(other)?;
        let n = self.order;
        let mut out = CrispMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan elimination with partial pivoting on the largest
    /// absolute value in each column.
    pub fn invert(&self) -> Result<CrispMatrix> {
        let n = self.order;
        let mut a = self.clone();
        let mut inv = CrispMatrix::identity(n);

        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&x, &y| a[(x, col)].abs().total_cmp(&a[(y, col)].abs()))
                .expect("non-empty pivot range");
            if a[(pivot_row, col)].abs() < SINGULAR_PIVOT {
                return Err(Error::Singular { column: col });
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }

            let pivot = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= pivot;
                inv[(col, j)] /= pivot;
            }

            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a[(row, col)];
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.data[row * n + j] -= factor * a.data[col * n + j];
                    inv.data[row * n + j] -= factor * inv.data[col * n + j];
                }
            }
        }
        Ok(inv)
    }

    /// Total relation `G (I - G)^-1`, i.e. direct plus all indirect influence.
    pub fn total_relation(&self) -> Result<CrispMatrix> {
        self.multiply(&self.identity_minus().invert()?)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        let n = self.order;
        for j in 0..n {
            self.data.swap(a * n + j, b * n + j);
        }
    }

    fn check_order(&self, other: &CrispMatrix) -> Result<()> {
        if self.order != other.order {
            return Err(Error::dimension("matrix order", self.order, other.order));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CrispMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.order && j < self.order, "index ({i}, {j}) out of range");
        &self.data[i * self.order + j]
    }
}

impl IndexMut<(usize, usize)> for CrispMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(i < self.order && j < self.order, "index ({i}, {j}) out of range");
        &mut self.data[i * self.order + j]
    }
}

impl fmt::Display for CrispMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>10.6}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Sums `G + G^2 + G^3 + ...` until the newest term's largest entry falls
/// below `tol`.
///
/// Requires the max absolute row sum of `g` to be strictly below 1, which
/// guarantees convergence.
pub fn neumann_total_relation(g: &CrispMatrix, tol: f64, max_terms: usize) -> Result<CrispMatrix> {
    let row_sum = g.max_abs_row_sum();
    if row_sum >= 1.0 {
        return Err(Error::Divergent { row_sum });
    }
    let mut term = g.clone();
    let mut sum = g.clone();
    let mut terms = 1;
    while term.max_abs() >= tol {
        if terms >= max_terms {
            return Err(Error::NonConvergence { terms });
        }
        term = term.multiply(g)?;
        sum = sum.add(&term)?;
        terms += 1;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> CrispMatrix {
        CrispMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(CrispMatrix::from_rows(vec![]), Err(Error::Dimension { .. })));
        assert!(matches!(
            CrispMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(CrispMatrix::from_rows(vec![vec![f64::INFINITY]]), Err(Error::NonFinite)));
    }

    #[test]
    fn multiply_laws() {
        let a = m(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[7.0, 8.0, 10.0]]);
        let id = CrispMatrix::identity(3);
        assert_eq!(id.multiply(&a).unwrap(), a);
        assert_eq!(a.multiply(&id).unwrap(), a);

        let p = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(p.multiply(&p).unwrap(), CrispMatrix::identity(2));

        assert!(matches!(a.multiply(&p), Err(Error::Dimension { .. })));
    }

    #[test]
    fn invert_small_cases() {
        assert_eq!(CrispMatrix::identity(4).invert().unwrap(), CrispMatrix::identity(4));
        let d = m(&[&[2.0, 0.0], &[0.0, 4.0]]).invert().unwrap();
        assert_eq!(d, m(&[&[0.5, 0.0], &[0.0, 0.25]]));
        assert!(matches!(m(&[&[1.0, 1.0], &[1.0, 1.0]]).invert(), Err(Error::Singular { column: 1 })));
        assert!(matches!(CrispMatrix::zeros(3).invert(), Err(Error::Singular { column: 0 })));
    }

    #[test]
    fn invert_needs_pivoting() {
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(a.invert().unwrap(), a);
        let b = m(&[&[1.0, 2.0, 3.0], &[0.0, 1.0, 4.0], &[5.0, 6.0, 0.0]]);
        let expected = m(&[&[-24.0, 18.0, 5.0], &[20.0, -15.0, -4.0], &[-5.0, 4.0, 1.0]]);
        assert!(b.invert().unwrap().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn neumann_cases() {
        let z = CrispMatrix::zeros(3);
        assert_eq!(neumann_total_relation(&z, 1e-12, 10).unwrap(), z);

        let half = m(&[&[0.5]]);
        let s = neumann_total_relation(&half, 1e-12, 200).unwrap();
        assert!((s[(0, 0)] - 1.0).abs() < 1e-11);

        assert!(matches!(
            neumann_total_relation(&m(&[&[0.0, 1.0], &[0.5, 0.0]]), 1e-12, 100),
            Err(Error::Divergent { .. })
        ));
        assert!(matches!(
            neumann_total_relation(&m(&[&[0.9]]), 1e-12, 5),
            Err(Error::NonConvergence { terms: 5 })
        ));
    }

    #[test]
    fn neumann_matches_closed_form_2x2() {
        // G = [[0, 0.2], [0.3, 0]]: det(I - G) = 0.94, so
        // G (I - G)^-1 = [[0.06, 0.2], [0.3, 0.06]] / 0.94.
        let g = m(&[&[0.0, 0.2], &[0.3, 0.0]]);
        let series = neumann_total_relation(&g, 1e-15, 1000).unwrap();
        let expected = m(&[&[0.06 / 0.94, 0.2 / 0.94], &[0.3 / 0.94, 0.06 / 0.94]]);
        assert!(series.max_abs_diff(&expected) < 1e-12);
        assert!(g.total_relation().unwrap().max_abs_diff(&series) < 1e-9);
        assert!((series[(0, 1)] - 0.212_765_957_4).abs() < 1e-9);
        assert!((series[(1, 0)] - 0.319_148_936_2).abs() < 1e-9);
    }

    fn arb_matrix(max_n: usize) -> impl Strategy<Value = CrispMatrix> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |data| CrispMatrix { order: n, data })
        })
    }

    proptest! {
        #[test]
        fn double_inversion_roundtrips(a in arb_matrix(6)) {
            let shifted = a.add(&CrispMatrix::from_fn(a.order(), |i, j| if i == j { 3.0 } else { 0.0 })).unwrap();
            let back = shifted.invert().unwrap().invert().unwrap();
            prop_assert!(back.max_abs_diff(&shifted) < 1e-9);
        }

        #[test]
        fn associativity(a in arb_matrix(4), seed in 0u64..1000) {
            let n = a.order();
            let b = CrispMatrix::from_fn(n, |i, j| ((seed as f64 + (i * n + j) as f64) * 0.37).sin());
            let c = CrispMatrix::from_fn(n, |i, j| ((seed as f64 - (i + 2 * j) as f64) * 0.91).cos());
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert!(left.max_abs_diff(&right) < 1e-10);
        }

        #[test]
        fn neumann_agrees_with_inversion(a in arb_matrix(6), target in 0.05..0.8f64) {
            let scale = target / a.max_abs_row_sum().max(1e-3);
            let g = CrispMatrix { order: a.order(), data: a.entries().iter().map(|x| x * scale).collect() };
            let series = neumann_total_relation(&g, 1e-15, 10_000).unwrap();
            prop_assert!(g.total_relation().unwrap().max_abs_diff(&series) < 1e-9);
        }
    }
}
