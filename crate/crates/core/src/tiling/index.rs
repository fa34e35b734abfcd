//! Point location among periodic pieces.
//!
//! A `PieceIndex` holds convex pieces in ambient coordinates, each standing
//! for all its translates by Ω. Queries reduce the point to the fundamental
//! domain and scan one bucket of a uniform grid over basis coordinates.
//! Pieces keep their insertion order inside every bucket, so the first hit
//! is the lowest-numbered piece containing the point.

use crate::geom::{Polytope, Vector, MAX_DIM};
use crate::lattice::Torus;

/// Slack added to every piece's coordinate bounding box so that points on
/// a boundary (within the containment tolerance) are still found.
const BOX_PAD: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct PieceIndex {
    torus: Torus,
    pieces: Vec<Polytope>,
    labels: Vec<usize>,
    res: usize,
    /// Per bucket: (piece, lattice shift) in increasing piece order.
    buckets: Vec<Vec<(u32, Vector)>>,
}

impl PieceIndex {
    /// Builds the index; `labels[i]` is reported for hits on `pieces[i]`.
    pub fn new(torus: &Torus, pieces: Vec<Polytope>, labels: Vec<usize>) -> PieceIndex {
        assert_eq!(pieces.len(), labels.len());
        let n = torus.dim();
        let lattice = torus.lattice();
        let res = ((4 * pieces.len().max(1)) as f64)
            .powf(1.0 / n as f64)
            .ceil()
            .clamp(1.0, 48.0) as usize;
        let total = res.pow(n as u32);
        let mut buckets: Vec<Vec<(u32, Vector)>> = vec![Vec::new(); total];
        for (pi, piece) in pieces.iter().enumerate() {
            let mut lo = [f64::INFINITY; MAX_DIM];
            let mut hi = [f64::NEG_INFINITY; MAX_DIM];
            for v in piece.vertices() {
                let c = lattice.coords(v);
                for j in 0..n {
                    lo[j] = lo[j].min(c[j] - BOX_PAD);
                    hi[j] = hi[j].max(c[j] + BOX_PAD);
                }
            }
            // Shifts z with [lo − z, hi − z] meeting [0, 1).
            let zlo: Vec<i64> = (0..n).map(|j| lo[j].floor() as i64).collect();
            let zhi: Vec<i64> = (0..n).map(|j| hi[j].floor() as i64).collect();
            for_each_box(&zlo, &zhi, |z| {
                let shift = lattice.vector(z);
                let mut blo = [0usize; MAX_DIM];
                let mut bhi = [0usize; MAX_DIM];
                for j in 0..n {
                    let a = (lo[j] - z[j] as f64).max(0.0);
                    let b = (hi[j] - z[j] as f64).min(1.0 - 1e-15);
                    blo[j] = ((a * res as f64).floor() as usize).min(res - 1);
                    bhi[j] = ((b * res as f64).floor() as usize).min(res - 1);
                }
                let blo_i: Vec<i64> = blo[..n].iter().map(|&x| x as i64).collect();
                let bhi_i: Vec<i64> = bhi[..n].iter().map(|&x| x as i64).collect();
                for_each_box(&blo_i, &bhi_i, |b| {
                    let mut idx = 0;
                    for j in (0..n).rev() {
                        idx = idx * res + b[j] as usize;
                    }
                    buckets[idx].push((pi as u32, shift));
                });
            });
        }
        PieceIndex {
            torus: torus.clone(),
            pieces,
            labels,
            res,
            buckets,
        }
    }

    pub fn pieces(&self) -> &[Polytope] {
        &self.pieces
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    fn bucket_of(&self, frac: &Vector) -> usize {
        let n = self.torus.dim();
        let mut idx = 0;
        for j in (0..n).rev() {
            let b = ((frac[j] * self.res as f64) as usize).min(self.res - 1);
            idx = idx * self.res + b;
        }
        idx
    }

    /// Index of the first piece containing `p` modulo Ω, if any.
    pub fn first_piece(&self, p: &Vector, eps: f64) -> Option<usize> {
        let f = self.torus.frac(p);
        let q = self.torus.lattice().point(&f);
        self.buckets[self.bucket_of(&f)]
            .iter()
            .find(|(pi, shift)| self.pieces[*pi as usize].contains(&(q + *shift), eps))
            .map(|(pi, _)| *pi as usize)
    }

    /// Label of the first piece containing `p` modulo Ω, if any.
    pub fn first_label(&self, p: &Vector, eps: f64) -> Option<usize> {
        self.first_piece(p, eps).map(|i| self.labels[i])
    }

    /// Number of (piece, lattice copy) pairs whose interior contains `p`
    /// with depth greater than `depth`.
    pub fn count_interior(&self, p: &Vector, depth: f64) -> usize {
        let f = self.torus.frac(p);
        let q = self.torus.lattice().point(&f);
        self.buckets[self.bucket_of(&f)]
            .iter()
            .filter(|(pi, shift)| self.pieces[*pi as usize].depth(&(q + *shift)) > depth)
            .count()
    }
}

/// Visits every integer vector in the box `[lo, hi]` (coordinate 0 fastest).
pub(crate) fn for_each_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let n = lo.len();
    if (0..n).any(|j| lo[j] > hi[j]) {
        return;
    }
    let mut z = lo.to_vec();
    loop {
        f(&z);
        let mut j = 0;
        loop {
            if j == n {
                return;
            }
            if z[j] < hi[j] {
                z[j] += 1;
                break;
            }
            z[j] = lo[j];
            j += 1;
        }
    }
}
