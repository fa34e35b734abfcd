use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geom::{ConvexBody, Polytope, Vector, EPS_GEOM};
use crate::lattice::{Lattice, Multilattice};
use crate::tiling::{PeriodicTiling, PieceIndex};

/// Version of the coloring file layout.
pub const COLORING_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColoringMode {
    /// Color j is the shrunk tiling translated by tⱼ; overlaps go to the lowest j.
    ShrunkCover,
    /// Every cell is one color, assigned per translate class.
    CellPartition,
}

/// A coloring of ℝⁿ_K, periodic modulo s·Ω.
///
/// The pieces, in unscaled torus coordinates, are ν(ψ̃ᵢ − x̃ᵢ) + x̃ᵢ + tⱼ;
/// a point p gets the label of the first piece containing p/s.
#[derive(Clone, Debug)]
pub struct Coloring {
    body: ConvexBody,
    tiling: PeriodicTiling,
    mode: ColoringMode,
    nu: f64,
    scale: f64,
    translates: Vec<Vector>,
    cell_colors: Vec<usize>,
    color_count: usize,
    index: PieceIndex,
}

impl Coloring {
    /// One color per translate of the ν-shrunk tiling.
    pub fn shrunk_cover(
        body: ConvexBody,
        tiling: PeriodicTiling,
        nu: f64,
        scale: f64,
        translates: Vec<Vector>,
    ) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::invalid(format!(
                "shrink factor must lie in (0, 1), got {nu}"
            )));
        }
        if translates.is_empty() {
            return Err(Error::invalid(
                "a cover coloring needs at least one translate",
            ));
        }
        let color_count = translates.len();
        Self::assemble(
            body,
            tiling,
            ColoringMode::ShrunkCover,
            nu,
            scale,
            translates,
            Vec::new(),
            color_count,
        )
    }

    /// Unshrunk cells colored by `cell_colors[i]`.
    pub fn cell_partition(
        body: ConvexBody,
        tiling: PeriodicTiling,
        cell_colors: Vec<usize>,
        scale: f64,
    ) -> Result<Self> {
        if cell_colors.len() != tiling.cells().len() {
            return Err(Error::invalid(format!(
                "{} cell colors for {} cells",
                cell_colors.len(),
                tiling.cells().len()
            )));
        }
        let color_count = cell_colors.iter().max().map_or(0, |&c| c + 1);
        let n = tiling.dim();
        Self::assemble(
            body,
            tiling,
            ColoringMode::CellPartition,
            1.0,
            scale,
            vec![Vector::zeros(n)],
            cell_colors,
            color_count,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        body: ConvexBody,
        tiling: PeriodicTiling,
        mode: ColoringMode,
        nu: f64,
        scale: f64,
        translates: Vec<Vector>,
        cell_colors: Vec<usize>,
        color_count: usize,
    ) -> Result<Self> {
        check_dim(tiling.dim(), body.dim())?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!(
                "scale must be positive, got {scale}"
            )));
        }
        for t in &translates {
            check_dim(tiling.dim(), t.dim())?;
            if !t.is_finite() {
                return Err(Error::invalid("non-finite translate"));
            }
        }
        let shapes = piece_shapes(&tiling, nu);
        let mut pieces = Vec::with_capacity(translates.len() * shapes.len());
        let mut labels = Vec::with_capacity(pieces.capacity());
        for (j, t) in translates.iter().enumerate() {
            for (i, shape) in shapes.iter().enumerate() {
                pieces.push(shape.translated(t));
                labels.push(match mode {
                    ColoringMode::ShrunkCover => j,
                    ColoringMode::CellPartition => cell_colors[i],
                });
            }
        }
        let index = PieceIndex::new(tiling.torus(), pieces, labels);
        Ok(Coloring {
            body,
            tiling,
            mode,
            nu,
            scale,
            translates,
            cell_colors,
            color_count,
            index,
        })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn tiling(&self) -> &PeriodicTiling {
        &self.tiling
    }

    pub fn mode(&self) -> ColoringMode {
        self.mode
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn translates(&self) -> &[Vector] {
        &self.translates
    }

    pub fn cell_colors(&self) -> &[usize] {
        &self.cell_colors
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    pub fn dim(&self) -> usize {
        self.tiling.dim()
    }

    /// Point location over all pieces, in unscaled coordinates.
    pub fn index(&self) -> &PieceIndex {
        &self.index
    }

    /// The cells shrunk by ν about their sites (unscaled, untranslated).
    pub fn piece_shapes(&self) -> Vec<Polytope> {
        piece_shapes(&self.tiling, self.nu)
    }

    /// Color of the point `p` of ℝⁿ: the lowest-numbered piece containing p/s.
    pub fn color_of(&self, p: &Vector) -> Result<usize> {
        check_dim(self.dim(), p.dim())?;
        if !p.is_finite() {
            return Err(Error::invalid("non-finite point"));
        }
        self.color_of_unchecked(p).ok_or_else(|| {
            Error::Certificate(format!("point {p:?} lies in no piece of the coloring"))
        })
    }

    pub(crate) fn color_of_unchecked(&self, p: &Vector) -> Option<usize> {
        self.index.first_label(&(*p / self.scale), EPS_GEOM)
    }

    pub fn to_file(&self) -> ColoringFile {
        let m = self.tiling.multilattice();
        ColoringFile {
            schema: COLORING_SCHEMA,
            n: self.dim(),
            body: self.body.clone(),
            lattice_basis: m.base().clone(),
            translate_classes: m.translates().to_vec(),
            cells: self.tiling.cells().to_vec(),
            nu: self.nu,
            scale: self.scale,
            mode: self.mode,
            translates: self.translates.clone(),
            color_count: self.color_count,
            cell_colors: self.cell_colors.clone(),
        }
    }

    /// Rebuilds a coloring, re-validating the tiling and the color count.
    pub fn from_file(f: ColoringFile) -> Result<Self> {
        if f.schema != COLORING_SCHEMA {
            return Err(Error::invalid(format!(
                "unsupported coloring schema {}",
                f.schema
            )));
        }
        if f.n != f.body.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.n,
                got: f.body.dim(),
            });
        }
        let m = Multilattice::new(f.lattice_basis, f.translate_classes)?;
        let tiling = PeriodicTiling::new(m, f.cells)?;
        let c = match f.mode {
            ColoringMode::ShrunkCover => {
                Coloring::shrunk_cover(f.body, tiling, f.nu, f.scale, f.translates)?
            }
            ColoringMode::CellPartition => {
                Coloring::cell_partition(f.body, tiling, f.cell_colors, f.scale)?
            }
        };
        if c.color_count != f.color_count {
            return Err(Error::invalid(format!(
                "file claims {} colors but describes {}",
                f.color_count, c.color_count
            )));
        }
        Ok(c)
    }
}

fn piece_shapes(tiling: &PeriodicTiling, nu: f64) -> Vec<Polytope> {
    if nu == 1.0 {
        tiling.cells().to_vec()
    } else {
        tiling
            .cells()
            .iter()
            .zip(tiling.sites())
            .map(|(c, x)| c.homothety(x, nu))
            .collect()
    }
}

/// On-disk form of a [`Coloring`] (`coloring.json`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColoringFile {
    pub schema: u32,
    pub n: usize,
    pub body: ConvexBody,
    pub lattice_basis: Lattice,
    pub translate_classes: Vec<Vector>,
    pub cells: Vec<Polytope>,
    pub nu: f64,
    pub scale: f64,
    pub mode: ColoringMode,
    pub translates: Vec<Vector>,
    pub color_count: usize,
    #[serde(default)]
    pub cell_colors: Vec<usize>,
}
