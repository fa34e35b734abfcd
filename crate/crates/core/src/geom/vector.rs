use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest ambient dimension handled by the geometry kernels.
pub const MAX_DIM: usize = 4;

/// A point or displacement in ℝⁿ, 1 ≤ n ≤ [`MAX_DIM`].
///
/// Stored inline so that the hot loops (point location, vertex enumeration)
/// never allocate.
#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    dim: usize,
    c: [f64; MAX_DIM],
}

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Vector {
            dim,
            c: [0.0; MAX_DIM],
        }
    }

    /// Builds a vector from its coordinates. Panics if the length is not in 1..=4.
    pub fn from_slice(xs: &[f64]) -> Self {
        let mut v = Vector::zeros(xs.len());
        v.c[..xs.len()].copy_from_slice(xs);
        v
    }

    pub fn try_from_slice(xs: &[f64]) -> Option<Self> {
        if (1..=MAX_DIM).contains(&xs.len()) {
            Some(Vector::from_slice(xs))
        } else {
            None
        }
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Vector::zeros(dim);
        v.c[axis] = 1.0;
        v
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize) -> f64) -> Self {
        let mut v = Vector::zeros(dim);
        for i in 0..dim {
            v.c[i] = f(i);
        }
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    #[inline]
    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            s += self.c[i] * other.c[i];
        }
        s
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector::from_fn(self.dim, |i| f(self.c[i]))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.as_slice().to_vec()
    }

    /// Lexicographic comparison of coordinates.
    pub fn lex_cmp(&self, other: &Vector) -> std::cmp::Ordering {
        for i in 0..self.dim.min(other.dim) {
            match self.c[i].total_cmp(&other.c[i]) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        self.dim.cmp(&other.dim)
    }

    pub fn approx_eq(&self, other: &Vector, tol: f64) -> bool {
        self.dim == other.dim && (*self - *other).max_abs() <= tol
    }
}

/// Solves the square system `rows · x = rhs` (one equation per row).
///
/// Returns `None` when the system is numerically singular, judged by the
/// Hadamard ratio |det| / Π‖rowᵢ‖ falling below 1e-12.
pub fn solve_square(rows: &[Vector], rhs: &[f64]) -> Option<Vector> {
    let n = rows.len();
    debug_assert_eq!(rhs.len(), n);
    if n == 0 {
        return None;
    }
    let mut m = Matrix4::<f64>::identity();
    let mut b = Vector4::<f64>::zeros();
    let mut hadamard = 1.0;
    for (i, r) in rows.iter().enumerate() {
        debug_assert_eq!(r.dim(), n);
        for j in 0..n {
            m[(i, j)] = r[j];
        }
        b[i] = rhs[i];
        hadamard *= r.norm();
    }
    if hadamard == 0.0 {
        return None;
    }
    let lu = m.lu();
    if (lu.determinant() / hadamard).abs() < 1e-12 {
        return None;
    }
    let x = lu.solve(&b)?;
    Some(Vector::from_fn(n, |i| x[i]))
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        debug_assert!(i < self.dim);
        &self.c[i]
    }
}

impl IndexMut<usize> for Vector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        debug_assert!(i < self.dim);
        &mut self.c[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    #[inline]
    fn add(mut self, rhs: Vector) -> Vector {
        self += rhs;
        self
    }
}

impl AddAssign for Vector {
    #[inline]
    fn add_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..MAX_DIM {
            self.c[i] += rhs.c[i];
        }
    }
}

impl Sub for Vector {
    type Output = Vector;
    #[inline]
    fn sub(mut self, rhs: Vector) -> Vector {
        self -= rhs;
        self
    }
}

impl SubAssign for Vector {
    #[inline]
    fn sub_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..MAX_DIM {
            self.c[i] -= rhs.c[i];
        }
    }
}

impl Neg for Vector {
    type Output = Vector;
    #[inline]
    fn neg(self) -> Vector {
        self * -1.0
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    #[inline]
    fn mul(mut self, s: f64) -> Vector {
        for x in &mut self.c {
            *x *= s;
        }
        self
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    #[inline]
    fn mul(self, v: Vector) -> Vector {
        v * self
    }
}

impl Div<f64> for Vector {
    type Output = Vector;
    #[inline]
    fn div(self, s: f64) -> Vector {
        self * (1.0 / s)
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let xs = Vec::<f64>::deserialize(d)?;
        Vector::try_from_slice(&xs).ok_or_else(|| {
            serde::de::Error::custom(format!("vector length {} outside 1..={MAX_DIM}", xs.len()))
        })
    }
}
