//! Dense square matrices and vectors over a semiring.

use crate::semiring::{Boolean, Semiring};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Semiring> Matrix<S> {
    pub fn zero(n: usize) -> Self {
        Matrix { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &S) {
        let k = i * self.n + j;
        self.data[k] = self.data[k].add(v);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, &a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Matrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn map<T: Semiring>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn support(&self) -> Matrix<Boolean> {
        self.map(|x| Boolean(!x.is_zero()))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Matrix with rows and columns picked by `keep` (old indices, in order).
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut out = Self::zero(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }
}

/// Row vector times matrix.
pub fn vec_mul<S: Semiring>(v: &[S], m: &Matrix<S>) -> Vec<S> {
    let n = m.dim();
    let mut out = vec![S::zero(); n];
    for (i, a) in v.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, slot) in out.iter_mut().enumerate() {
            let b = m.get(i, j);
            if !b.is_zero() {
                *slot = slot.add(&a.mul(b));
            }
        }
    }
    out
}

/// Matrix times column vector.
pub fn mul_vec<S: Semiring>(m: &Matrix<S>, v: &[S]) -> Vec<S> {
    (0..m.dim()).map(|i| dot(m.row(i), v)).collect()
}

pub fn dot<S: Semiring>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).fold(S::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

pub fn unit<S: Semiring>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

pub fn support(v: &[impl Semiring]) -> Vec<Boolean> {
    v.iter().map(|x| Boolean(!x.is_zero())).collect()
}
