//! Representations `Γ_g -> Sp(2n, R)` built from a hyperbolization and an
//! embedding of SL(2,R), their Toledo invariant, boundary maps, and
//! translation lengths.

mod boundary;
mod embedding;
mod length;
mod toledo;

pub use boundary::{attracting_lagrangian, boundary_map, check_proximal, j_of_u, repelling_lagrangian, BoundaryMap};
pub use embedding::{binary_form_pairing, Construction, Embedding};
pub use length::{
    displacement_sp, translation_length_matrix, translation_length_sp, unrestricted_translation_length,
    LengthOptions, TranslationLength,
};
pub use toledo::{toledo, toledo_with_perturbations, ToledoResult};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::hyperbolic::{HyperbolicError, Hyperbolization};
use crate::linalg::max_abs;
use crate::scalar::{lit, to_f64, Real};
use crate::surface_group::{generator_label, parse_generator, GroupError, Presentation, Word};
use crate::symplectic::{SymplecticError, SymplecticMatrix};
use crate::table::{entry, parse_floats, row, Section, TableError, TableFile};
use crate::tolerances::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("relator residual {0:e} exceeds tolerance")]
    RelatorResidual(f64),
    #[error("word has genus {word}, representation has genus {rep}")]
    GenusMismatch { word: u32, rep: u32 },
    #[error("representations have different genus or dimension")]
    Incompatible,
    #[error("winding {raw} is not within tolerance of an integer")]
    NonIntegralWinding { raw: f64 },
    #[error("Toledo value {value} exceeds the Milnor-Wood bound {bound}")]
    MilnorWood { value: i64, bound: i64 },
    #[error("element is not proximal: eigenvalue modulus {modulus} too close to 1")]
    NotProximal { modulus: f64 },
    #[error("no boundary map for {0} representations")]
    Unsupported(&'static str),
    #[error("boundary triple is not maximal (signature {signature})")]
    NonMaximalTriple { signature: i64 },
    #[error("minimizer failure: {0}")]
    Minimizer(String),
    #[error("{0}")]
    Parse(String),
}

/// Generator images in `Sp(2n, R)` with construction metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalRep<T: Real> {
    genus: u32,
    n: usize,
    images: Vec<SymplecticMatrix<T>>,
    construction: Construction,
    embedding: Option<Embedding<T>>,
    /// `C` with `images = C (e ∘ h) C⁻¹`.
    conjugator: DMatrix<T>,
    base: Option<Hyperbolization<T>>,
    toledo_cache: Option<i64>,
}

/// `n (2g - 2)`, the largest possible `|T(ρ)|`.
pub fn milnor_wood_bound(genus: u32, n: usize) -> i64 {
    n as i64 * (2 * genus as i64 - 2)
}

impl<T: Real> MaximalRep<T> {
    /// `e ∘ h`, validated and with its Toledo invariant cached.
    pub fn compose(h: &Hyperbolization<T>, e: &Embedding<T>, tol: &Tolerances) -> Result<Self, RepError> {
        let images = h
            .images()
            .iter()
            .map(|m| SymplecticMatrix::new(e.apply(m), tol))
            .collect::<Result<Vec<_>, _>>()?;
        let mut rep = Self {
            genus: h.genus(),
            n: e.n(),
            images,
            construction: e.kind(),
            embedding: Some(e.clone()),
            conjugator: DMatrix::identity(2 * e.n(), 2 * e.n()),
            base: Some(h.clone()),
            toledo_cache: None,
        };
        rep.check_relator(tol)?;
        rep.toledo_cache = Some(toledo(&rep, tol)?.value);
        Ok(rep)
    }

    /// A user-supplied representation; no boundary map is available.
    pub fn from_images(genus: u32, images: Vec<DMatrix<T>>, tol: &Tolerances) -> Result<Self, RepError> {
        if images.len() != 2 * genus as usize || images.is_empty() {
            return Err(RepError::Parse(format!("expected {} generator images", 2 * genus)));
        }
        let dim = images[0].nrows();
        let images = images
            .into_iter()
            .map(|m| {
                if m.nrows() != dim {
                    return Err(SymplecticError::DimensionMismatch(m.nrows(), dim));
                }
                SymplecticMatrix::new(m, tol)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n = dim / 2;
        let rep = Self {
            genus,
            n,
            images,
            construction: Construction::User,
            embedding: None,
            conjugator: DMatrix::identity(2 * n, 2 * n),
            base: None,
            toledo_cache: None,
        };
        rep.check_relator(tol)?;
        Ok(rep)
    }

    /// Every generator sent to the identity.
    pub fn trivial(genus: u32, n: usize) -> Self {
        Self {
            genus,
            n,
            images: vec![SymplecticMatrix::identity(n); 2 * genus as usize],
            construction: Construction::User,
            embedding: None,
            conjugator: DMatrix::identity(2 * n, 2 * n),
            base: None,
            toledo_cache: Some(0),
        }
    }

    pub(crate) fn check_relator(&self, tol: &Tolerances) -> Result<(), RepError> {
        let res = self.scaled_relator_residual()?;
        if res > tol.relator_rep {
            return Err(RepError::RelatorResidual(res));
        }
        Ok(())
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[SymplecticMatrix<T>] {
        &self.images
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn embedding(&self) -> Option<&Embedding<T>> {
        self.embedding.as_ref()
    }

    pub fn conjugator(&self) -> &DMatrix<T> {
        &self.conjugator
    }

    pub fn base_hyperbolization(&self) -> Option<&Hyperbolization<T>> {
        self.base.as_ref()
    }

    pub fn toledo_cache(&self) -> Option<i64> {
        self.toledo_cache
    }

    pub fn milnor_wood_bound(&self) -> i64 {
        milnor_wood_bound(self.genus, self.n)
    }

    /// Cached Toledo invariant, computed on first use.
    pub fn toledo_value(&mut self, tol: &Tolerances) -> Result<i64, RepError> {
        if let Some(t) = self.toledo_cache {
            return Ok(t);
        }
        let t = toledo(self, tol)?.value;
        self.toledo_cache = Some(t);
        Ok(t)
    }

    /// `|T(ρ)| = n (2g - 2)`.
    pub fn is_maximal(&mut self, tol: &Tolerances) -> Result<bool, RepError> {
        Ok(self.toledo_value(tol)?.abs() == self.milnor_wood_bound())
    }

    pub fn generator(&self, letter: i32) -> SymplecticMatrix<T> {
        let g = &self.images[(letter.unsigned_abs() - 1) as usize];
        if letter > 0 {
            g.clone()
        } else {
            g.inverse()
        }
    }

    /// Left-to-right product of the generator images along `w`.
    pub fn evaluate(&self, w: &Word) -> Result<SymplecticMatrix<T>, RepError> {
        if w.genus() != self.genus {
            return Err(RepError::GenusMismatch {
                word: w.genus(),
                rep: self.genus,
            });
        }
        let mut m = SymplecticMatrix::identity(self.n);
        for &l in w.letters() {
            m = m.mul(&self.generator(l));
        }
        Ok(m)
    }

    /// `||ρ(R) - I||` entrywise.
    pub fn relator_residual(&self) -> Result<f64, RepError> {
        let r = self.evaluate(Presentation::new(self.genus)?.relator())?;
        Ok(to_f64(max_abs(&(r.matrix() - DMatrix::identity(2 * self.n, 2 * self.n)))))
    }

    /// Relator residual divided by `max(1, max_k ||P_k|| ||S_k||)` over the
    /// splittings `R = P_k S_k`, the growth factor of rounding errors in the
    /// product. This is what the relator tolerance is compared against: for
    /// high-degree embeddings the factors are large and the absolute residual
    /// only reflects floating point.
    pub fn scaled_relator_residual(&self) -> Result<f64, RepError> {
        let relator = Presentation::new(self.genus)?.relator().clone();
        let letters = relator.letters();
        let dim = 2 * self.n;
        let mut prefixes = vec![DMatrix::<T>::identity(dim, dim)];
        for &l in letters {
            let next = prefixes.last().expect("nonempty") * self.generator(l).matrix();
            prefixes.push(next);
        }
        let mut suffix = DMatrix::<T>::identity(dim, dim);
        let mut kappa = 1.0f64;
        for k in (0..=letters.len()).rev() {
            kappa = kappa.max(to_f64(max_abs(&prefixes[k]) * max_abs(&suffix)));
            if k > 0 {
                suffix = self.generator(letters[k - 1]).matrix() * suffix;
            }
        }
        let res = to_f64(max_abs(&(&prefixes[letters.len()] - DMatrix::identity(dim, dim))));
        Ok(res / kappa)
    }

    /// `g ρ g⁻¹`. The Toledo cache is dropped so that callers recompute it.
    pub fn conjugate(&self, g: &SymplecticMatrix<T>) -> Self {
        let ginv = g.inverse();
        Self {
            images: self.images.iter().map(|m| g.mul(m).mul(&ginv)).collect(),
            conjugator: g.matrix() * &self.conjugator,
            toledo_cache: None,
            ..self.clone()
        }
    }

    /// Block sum `ρ₁ ⊕ ρ₂` on `R^{2n₁} ⊕ R^{2n₂}`, with the symplectic planes
    /// of the first summand first.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, RepError> {
        if self.genus != other.genus {
            return Err(RepError::Incompatible);
        }
        let (n1, n2) = (self.n, other.n);
        let n = n1 + n2;
        let place = |out: &mut DMatrix<T>, m: &DMatrix<T>, k: usize, offset: usize| {
            let idx = |i: usize| if i < k { offset + i } else { n + offset + i - k };
            for i in 0..2 * k {
                for j in 0..2 * k {
                    out[(idx(i), idx(j))] = m[(i, j)];
                }
            }
        };
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| {
                let mut m = DMatrix::zeros(2 * n, 2 * n);
                place(&mut m, a.matrix(), n1, 0);
                place(&mut m, b.matrix(), n2, n1);
                SymplecticMatrix::from_trusted(m)
            })
            .collect();
        Ok(Self {
            genus: self.genus,
            n,
            images,
            construction: Construction::User,
            embedding: None,
            conjugator: DMatrix::identity(2 * n, 2 * n),
            base: None,
            toledo_cache: None,
        })
    }

    /// Plain-text form: header `genus`, `n`, `construction`, then one
    /// section per generator holding `2n` comma-separated rows.
    pub fn to_table(&self) -> String {
        let mut file = TableFile::default();
        file.header.lines.push(entry("genus", self.genus.to_string()));
        file.header.lines.push(entry("n", self.n.to_string()));
        file.header
            .lines
            .push(entry("construction", self.construction.as_str()));
        if let Some(t) = self.toledo_cache {
            file.header.lines.push(entry("toledo", t.to_string()));
        }
        for (i, g) in self.images.iter().enumerate() {
            let m = g.matrix();
            let lines = (0..m.nrows())
                .map(|r| {
                    row((0..m.ncols())
                        .map(|c| format!("{:?}", to_f64(m[(r, c)])))
                        .collect::<Vec<_>>()
                        .join(","))
                })
                .collect();
            file.sections.push(Section {
                name: generator_label(i as u32 + 1),
                lines,
            });
        }
        file.render()
    }

    /// Loads a representation written by [`MaximalRep::to_table`] (or by
    /// hand). The result is always tagged `user`: a boundary map cannot be
    /// recovered from generator matrices.
    pub fn from_table(text: &str, tol: &Tolerances) -> Result<Self, RepError> {
        let file = TableFile::parse(text)?;
        let parse_usize = |key: &str| -> Result<usize, RepError> {
            file.require_header(key)?
                .parse()
                .map_err(|_| RepError::Parse(format!("`{key}` must be a positive integer")))
        };
        let genus = parse_usize("genus")? as u32;
        let n = parse_usize("n")?;
        if genus == 0 || n == 0 {
            return Err(RepError::Parse("genus and n must be positive".into()));
        }
        let mut images: Vec<Option<DMatrix<T>>> = vec![None; 2 * genus as usize];
        for s in &file.sections {
            let idx = parse_generator(&s.name)
                .filter(|&g| g >= 1 && g <= 2 * genus)
                .ok_or_else(|| RepError::Parse(format!("unknown generator section `[{}]`", s.name)))?;
            let rows: Vec<Vec<f64>> = s
                .rows()
                .map(parse_floats)
                .collect::<Result<_, _>>()
                .map_err(RepError::Parse)?;
            if rows.len() != 2 * n || rows.iter().any(|r| r.len() != 2 * n) {
                return Err(RepError::Parse(format!("`[{}]` must be a {0}x{0} block", 2 * n)));
            }
            images[idx as usize - 1] = Some(DMatrix::from_fn(2 * n, 2 * n, |i, j| lit(rows[i][j])));
        }
        let images: Option<Vec<_>> = images.into_iter().collect();
        let images = images.ok_or_else(|| RepError::Parse("missing generator sections".into()))?;
        Self::from_images(genus, images, tol)
    }
}
