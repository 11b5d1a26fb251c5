//! Upper half-plane model of the hyperbolic plane, hyperbolizations of the
//! surface group and their translation lengths.
//!
//! Points of the plane are complex numbers with positive imaginary part; the
//! boundary is `R ∪ {∞}`. The disk model never appears at the API, only in the
//! octagon construction where it is the natural coordinate.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{Complex, ComplexField, Matrix2};
use thiserror::Error;

use crate::scalar::{lit, to_f64, Real};
use crate::surface_group::{generator_label, parse_generator, GroupError, Presentation, Word};
use crate::table::{entry, parse_floats, TableError, TableFile};
use crate::tolerances::Tolerances;

pub type Mat2<T> = Matrix2<T>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperbolicError {
    #[error("matrix is not unimodular (det = {0})")]
    NonUnimodular(f64),
    #[error("matrix is not hyperbolic (|trace| = {0})")]
    NotHyperbolic(f64),
    #[error("point is not in the open upper half-plane")]
    OutsideModel,
    #[error("expected {expected} generator images, got {got}")]
    WrongGeneratorCount { expected: usize, got: usize },
    #[error("relator residual {0:e} exceeds tolerance")]
    RelatorResidual(f64),
    #[error("generator {label} is not hyperbolic (|trace| = {trace})")]
    NonHyperbolicGenerator { label: String, trace: f64 },
    #[error("word has genus {word}, hyperbolization has genus {hyperbolization}")]
    GenusMismatch { word: u32, hyperbolization: u32 },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A point of `R ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> BoundaryPoint<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    /// Chordal distance after the Cayley map to the unit circle; a bounded
    /// metric that treats `∞` like any other point.
    pub fn chordal_distance(&self, other: &Self) -> T {
        let on_circle = |p: &Self| -> (T, T) {
            match *p {
                BoundaryPoint::Infinity => (T::one(), T::zero()),
                BoundaryPoint::Finite(x) => {
                    let r = T::one() + x * x;
                    ((x * x - T::one()) / r, lit::<T>(2.0) * x / r)
                }
            }
        };
        let (a, b) = on_circle(self);
        let (c, d) = on_circle(other);
        ((a - c) * (a - c) + (b - d) * (b - d)).sqrt()
    }
}

impl<T: Real> fmt::Display for BoundaryPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{}", to_f64(*x)),
            BoundaryPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Sign of the cyclic order of three boundary points in the direction of
/// increasing real coordinate: `+1`, `-1`, or `0` when two coincide.
fn increasing_order<T: Real>(x: BoundaryPoint<T>, y: BoundaryPoint<T>, z: BoundaryPoint<T>) -> i8 {
    use BoundaryPoint::*;
    let sign = |v: T| match v.partial_cmp(&T::zero()) {
        Some(Ordering::Greater) => 1i8,
        Some(Ordering::Less) => -1,
        _ => 0,
    };
    match (x, y, z) {
        (Finite(a), Finite(b), Finite(c)) => sign((b - a) * (c - b) * (c - a)),
        // ∞ sits above every real number; rotate it to the last slot
        (Finite(a), Finite(b), Infinity) => sign(b - a),
        (Finite(a), Infinity, Finite(c)) => sign(a - c),
        (Infinity, Finite(b), Finite(c)) => sign(c - b),
        _ => 0,
    }
}

/// Orientation predicate for boundary triples. Positive means the points are
/// met in this order when the circle is traversed through decreasing real
/// values, e.g. `(0, -1, ∞)`; this is the orientation for which the boundary
/// map `x -> span(x, 1)` produces maximal Lagrangian triples.
pub fn is_positively_oriented<T: Real>(x: BoundaryPoint<T>, y: BoundaryPoint<T>, z: BoundaryPoint<T>) -> bool {
    increasing_order(x, y, z) == -1
}

/// Ordered triple of boundary points, read as a unit tangent vector: the
/// geodesic from `minus` to `plus`, with the base point the foot of the
/// perpendicular from `zero`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentTriple<T> {
    pub minus: BoundaryPoint<T>,
    pub zero: BoundaryPoint<T>,
    pub plus: BoundaryPoint<T>,
}

impl<T: Real> TangentTriple<T> {
    pub fn new(minus: BoundaryPoint<T>, zero: BoundaryPoint<T>, plus: BoundaryPoint<T>) -> Option<Self> {
        is_positively_oriented(minus, zero, plus).then_some(Self { minus, zero, plus })
    }

    pub fn is_positive(&self) -> bool {
        is_positively_oriented(self.minus, self.zero, self.plus)
    }

    pub fn map(&self, m: &Mat2<T>) -> Self {
        Self {
            minus: act_on_boundary(m, self.minus),
            zero: act_on_boundary(m, self.zero),
            plus: act_on_boundary(m, self.plus),
        }
    }

    /// Foot of the perpendicular from `zero` onto the geodesic
    /// `minus -> plus`.
    pub fn base_point(&self) -> Complex<T> {
        let g = normalizer(self.minus, self.plus);
        let r = match act_on_boundary(&g, self.zero) {
            BoundaryPoint::Finite(x) => x.abs(),
            BoundaryPoint::Infinity => T::one(),
        };
        act_on_point(&inv_sl2(&g), Complex::new(T::zero(), r))
    }

    /// The isometry moving the base point `a + ib` to `i` and the geodesic
    /// onto the imaginary axis, `minus` to 0 and `plus` to ∞: the affine map
    /// `z -> (z - a) / b` followed by a rotation about `i`. An element with
    /// this axis and foot becomes diagonal, and the recentred triple is
    /// `(0, -1, ∞)`.
    pub fn recentering(&self) -> Mat2<T> {
        let p = self.base_point();
        let s = p.im.sqrt();
        let affine = Mat2::new(T::one() / s, -p.re / s, T::zero(), s);
        let theta = match act_on_boundary(&affine, self.minus) {
            BoundaryPoint::Finite(m) => m.atan(),
            BoundaryPoint::Infinity => T::frac_pi_2(),
        };
        let (sin, cos) = theta.sin_cos();
        Mat2::new(cos, -sin, sin, cos) * affine
    }
}

pub fn det2<T: Real>(m: &Mat2<T>) -> T {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

pub fn trace2<T: Real>(m: &Mat2<T>) -> T {
    m[(0, 0)] + m[(1, 1)]
}

/// Inverse of a unimodular matrix (adjugate).
pub fn inv_sl2<T: Real>(m: &Mat2<T>) -> Mat2<T> {
    Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)])
}

pub fn is_unimodular<T: Real>(m: &Mat2<T>, tol: f64) -> bool {
    to_f64((det2(m) - T::one()).abs()) <= tol
}

fn check_unimodular<T: Real>(m: &Mat2<T>, tol: f64) -> Result<(), HyperbolicError> {
    if is_unimodular(m, tol) {
        Ok(())
    } else {
        Err(HyperbolicError::NonUnimodular(to_f64(det2(m))))
    }
}

/// Like [`check_unimodular`], widened by the rounding error of `ad - bc`,
/// which for a long product dwarfs any fixed tolerance.
fn check_product_unimodular<T: Real>(m: &Mat2<T>, tol: f64) -> Result<(), HyperbolicError> {
    let scale = to_f64((m[(0, 0)] * m[(1, 1)]).abs() + (m[(0, 1)] * m[(1, 0)]).abs());
    if to_f64((det2(m) - T::one()).abs()) <= tol + 64.0 * f64::EPSILON * scale {
        Ok(())
    } else {
        Err(HyperbolicError::NonUnimodular(to_f64(det2(m))))
    }
}

/// Möbius action on the upper half-plane.
pub fn act_on_point<T: Real>(m: &Mat2<T>, z: Complex<T>) -> Complex<T> {
    let num = z * m[(0, 0)] + Complex::from(m[(0, 1)]);
    let den = z * m[(1, 0)] + Complex::from(m[(1, 1)]);
    num / den
}

/// Möbius action on `R ∪ {∞}`.
pub fn act_on_boundary<T: Real>(m: &Mat2<T>, x: BoundaryPoint<T>) -> BoundaryPoint<T> {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    match x {
        BoundaryPoint::Infinity => {
            if c == T::zero() {
                BoundaryPoint::Infinity
            } else {
                BoundaryPoint::Finite(a / c)
            }
        }
        BoundaryPoint::Finite(x) => {
            let den = c * x + d;
            if den == T::zero() {
                BoundaryPoint::Infinity
            } else {
                BoundaryPoint::Finite((a * x + b) / den)
            }
        }
    }
}

/// Hyperbolic distance in the upper half-plane,
/// `cosh d = 1 + |p - q|^2 / (2 Im p Im q)`.
pub fn distance<T: Real>(p: Complex<T>, q: Complex<T>) -> Result<T, HyperbolicError> {
    if !(p.im > T::zero() && q.im > T::zero()) || !p.re.is_finite() || !q.re.is_finite() {
        return Err(HyperbolicError::OutsideModel);
    }
    let diff = (p - q).norm_sqr();
    // asinh form is accurate for nearby points
    let s = (diff / (lit::<T>(4.0) * p.im * q.im)).sqrt();
    Ok(lit::<T>(2.0) * s.asinh())
}

/// Distance between two points of the Poincaré disk.
pub fn disk_distance<T: Real>(p: Complex<T>, q: Complex<T>) -> Result<T, HyperbolicError> {
    distance(disk_to_half_plane(p)?, disk_to_half_plane(q)?)
}

/// Cayley map `w -> i (1 + w) / (1 - w)` from the open disk onto the upper
/// half-plane.
pub fn disk_to_half_plane<T: Real>(w: Complex<T>) -> Result<Complex<T>, HyperbolicError> {
    if w.norm_sqr() >= T::one() {
        return Err(HyperbolicError::OutsideModel);
    }
    let one = Complex::new(T::one(), T::zero());
    Ok(Complex::new(T::zero(), T::one()) * (one + w) / (one - w))
}

/// `tr_h`: `2 arcosh(|tr M| / 2)` for hyperbolic `M` and `0` otherwise.
pub fn translation_length_h<T: Real>(m: &Mat2<T>, tol: &Tolerances) -> Result<T, HyperbolicError> {
    check_product_unimodular(m, tol.unimodular)?;
    let half = trace2(m).abs() / lit::<T>(2.0);
    if half <= T::one() {
        Ok(T::zero())
    } else {
        Ok(lit::<T>(2.0) * half.acosh())
    }
}

pub fn is_hyperbolic<T: Real>(m: &Mat2<T>, margin: f64) -> bool {
    to_f64(trace2(m).abs()) > 2.0 + margin
}

/// Repelling and attracting fixed points `(γ⁻, γ⁺)` of a hyperbolic element.
pub fn fixed_points<T: Real>(
    m: &Mat2<T>,
    tol: &Tolerances,
) -> Result<(BoundaryPoint<T>, BoundaryPoint<T>), HyperbolicError> {
    check_product_unimodular(m, tol.unimodular)?;
    if !is_hyperbolic(m, tol.hyperbolic_margin) {
        return Err(HyperbolicError::NotHyperbolic(to_f64(trace2(m).abs())));
    }
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    if c == T::zero() {
        // fixes ∞ and b / (d - a); ∞ attracts iff |a| > |d|
        let finite = BoundaryPoint::Finite(b / (d - a));
        return Ok(if a.abs() > d.abs() {
            (finite, BoundaryPoint::Infinity)
        } else {
            (BoundaryPoint::Infinity, finite)
        });
    }
    // c x^2 + (d - a) x - b = 0, solved without cancellation
    let p = d - a;
    let tr = a + d;
    let disc = (tr * tr - lit::<T>(4.0) * det2(m)).max(T::zero()).sqrt();
    let sgn = if p >= T::zero() { T::one() } else { -T::one() };
    let q = -(p + sgn * disc) / lit::<T>(2.0);
    let x1 = q / c;
    let x2 = -b / q;
    // derivative of the Möbius map at a fixed point x is (cx + d)^-2
    let attracting = |x: T| (c * x + d).abs() > T::one();
    let (rep, att) = if attracting(x1) { (x2, x1) } else { (x1, x2) };
    Ok((BoundaryPoint::Finite(rep), BoundaryPoint::Finite(att)))
}

/// Orientation-preserving Möbius map sending `(minus, plus)` to `(0, ∞)`.
fn normalizer<T: Real>(minus: BoundaryPoint<T>, plus: BoundaryPoint<T>) -> Mat2<T> {
    use BoundaryPoint::*;
    let one = T::one();
    let zero = T::zero();
    match (minus, plus) {
        (Finite(m), Infinity) => Mat2::new(one, -m, zero, one),
        (Infinity, Finite(p)) => Mat2::new(zero, -one, one, -p),
        (Finite(m), Finite(p)) => {
            let det = m - p;
            let s = det.abs().sqrt();
            if det > zero {
                Mat2::new(one / s, -m / s, one / s, -p / s)
            } else {
                Mat2::new(-one / s, m / s, one / s, -p / s)
            }
        }
        (Infinity, Infinity) => Mat2::identity(),
    }
}

/// Unit tangent vector on the axis of `m` as a boundary triple `(γ⁻, x₀, γ⁺)`.
///
/// The base point is the midpoint between the projection `p` of `i` onto the
/// axis and `m p`; `x₀` is the endpoint of the perpendicular geodesic through
/// it on the side that makes the triple positive.
pub fn axis_tangent_triple<T: Real>(m: &Mat2<T>, tol: &Tolerances) -> Result<TangentTriple<T>, HyperbolicError> {
    let (minus, plus) = fixed_points(m, tol)?;
    let g = normalizer(minus, plus);
    let n = g * m * inv_sl2(&g);
    // n is diagonal: z -> lambda^2 z with lambda^2 > 1
    let scale = (n[(0, 0)] / n[(1, 1)]).abs().sqrt();
    let r = act_on_point(&g, Complex::new(T::zero(), T::one())).norm_sqr().sqrt();
    let x0 = act_on_boundary(&inv_sl2(&g), BoundaryPoint::Finite(-r * scale));
    Ok(TangentTriple {
        minus,
        zero: x0,
        plus,
    })
}

/// A representation of the genus-`g` surface group into `PSL(2,R)`, stored as
/// `SL(2,R)` lifts of the generator images.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperbolization<T> {
    genus: u32,
    images: Vec<Mat2<T>>,
    name: String,
}

impl<T: Real> Hyperbolization<T> {
    /// Validates unimodularity, the relator up to sign, and hyperbolicity of
    /// every generator.
    pub fn new(genus: u32, images: Vec<Mat2<T>>, name: impl Into<String>, tol: &Tolerances) -> Result<Self, HyperbolicError> {
        let expected = 2 * genus as usize;
        if genus < 1 || images.len() != expected {
            return Err(HyperbolicError::WrongGeneratorCount {
                expected,
                got: images.len(),
            });
        }
        for (i, m) in images.iter().enumerate() {
            check_unimodular(m, tol.unimodular)?;
            if !is_hyperbolic(m, tol.hyperbolic_margin) {
                return Err(HyperbolicError::NonHyperbolicGenerator {
                    label: generator_label(i as u32 + 1),
                    trace: to_f64(trace2(m).abs()),
                });
            }
        }
        let h = Self {
            genus,
            images,
            name: name.into(),
        };
        let res = h.relator_residual()?;
        if res > tol.relator_h {
            return Err(HyperbolicError::RelatorResidual(res));
        }
        Ok(h)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn images(&self) -> &[Mat2<T>] {
        &self.images
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Image of a generator index (`1..=2g`, negative for inverses).
    pub fn generator(&self, letter: i32) -> Mat2<T> {
        let m = self.images[(letter.unsigned_abs() - 1) as usize];
        if letter > 0 {
            m
        } else {
            inv_sl2(&m)
        }
    }

    /// Left-to-right product of the generator images along `w`.
    pub fn evaluate(&self, w: &Word) -> Result<Mat2<T>, HyperbolicError> {
        if w.genus() != self.genus {
            return Err(HyperbolicError::GenusMismatch {
                word: w.genus(),
                hyperbolization: self.genus,
            });
        }
        Ok(w.letters()
            .iter()
            .fold(Mat2::identity(), |acc, &l| acc * self.generator(l)))
    }

    /// `min ||h(R) ∓ I||` entrywise.
    pub fn relator_residual(&self) -> Result<f64, HyperbolicError> {
        let r = self.evaluate(Presentation::new(self.genus)?.relator())?;
        let id = Mat2::<T>::identity();
        let plus = (r - id).amax();
        let minus = (r + id).amax();
        Ok(to_f64(plus.min(minus)))
    }

    pub fn translation_length(&self, w: &Word, tol: &Tolerances) -> Result<T, HyperbolicError> {
        translation_length_h(&self.evaluate(w)?, tol)
    }

    /// Renders as `genus: g` plus one `a1: m11,m12,m21,m22` line per
    /// generator.
    pub fn to_table(&self) -> String {
        let mut file = TableFile::default();
        file.header.lines.push(entry("genus", self.genus.to_string()));
        file.header.lines.push(entry("name", self.name.clone()));
        for (i, m) in self.images.iter().enumerate() {
            let vals = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
                .iter()
                .map(|&x| format!("{:?}", to_f64(x)))
                .collect::<Vec<_>>()
                .join(",");
            file.header.lines.push(entry(generator_label(i as u32 + 1), vals));
        }
        file.render()
    }

    pub fn from_table(text: &str, tol: &Tolerances) -> Result<Self, HyperbolicError> {
        let file = TableFile::parse(text)?;
        let genus: u32 = file
            .require_header("genus")?
            .parse()
            .map_err(|_| HyperbolicError::Parse("genus must be a positive integer".into()))?;
        let name = file.header_value("name").unwrap_or("user").to_string();
        let mut images: Vec<Option<Mat2<T>>> = vec![None; 2 * genus as usize];
        for (key, value) in file.header.entries() {
            if key == "genus" || key == "name" {
                continue;
            }
            let idx = parse_generator(key)
                .filter(|&g| g >= 1 && g <= 2 * genus)
                .ok_or_else(|| HyperbolicError::Parse(format!("unknown generator `{key}`")))?;
            let v = parse_floats(value).map_err(HyperbolicError::Parse)?;
            if v.len() != 4 {
                return Err(HyperbolicError::Parse(format!("`{key}` needs 4 entries, got {}", v.len())));
            }
            images[idx as usize - 1] = Some(Mat2::new(lit(v[0]), lit(v[1]), lit(v[2]), lit(v[3])));
        }
        let got = images.iter().filter(|m| m.is_some()).count();
        let images: Option<Vec<_>> = images.into_iter().collect();
        let images = images.ok_or(HyperbolicError::WrongGeneratorCount {
            expected: 2 * genus as usize,
            got,
        })?;
        Self::new(genus, images, name, tol)
    }
}

// --- regular octagon --------------------------------------------------------

type CMat<T> = Matrix2<Complex<T>>;

fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Rotation of the disk by `theta` about the origin, in SU(1,1).
fn disk_rotation<T: Real>(theta: T) -> CMat<T> {
    let h = theta / lit::<T>(2.0);
    let z = T::zero();
    CMat::new(c(h.cos(), h.sin()), c(z, z), c(z, z), c(h.cos(), -h.sin()))
}

/// Translation of the disk by hyperbolic distance `d` along the real axis.
fn disk_translation<T: Real>(d: T) -> CMat<T> {
    let h = d / lit::<T>(2.0);
    let z = T::zero();
    CMat::new(c(h.cosh(), z), c(h.sinh(), z), c(h.sinh(), z), c(h.cosh(), z))
}

/// Half-turn about the point at distance `r` from the origin in direction
/// `angle`.
fn disk_half_turn<T: Real>(r: T, angle: T) -> CMat<T> {
    disk_rotation(angle)
        * disk_translation(r)
        * disk_rotation(T::pi())
        * disk_translation(-r)
        * disk_rotation(-angle)
}

/// Conjugates an SU(1,1) matrix to the real form acting on the half-plane.
fn disk_to_real<T: Real>(m: &CMat<T>) -> Mat2<T> {
    let (z, o) = (T::zero(), T::one());
    let k = CMat::new(c(o, z), c(z, -o), c(o, z), c(z, o));
    let k_inv = CMat::new(c(o, z), c(o, z), c(z, o), c(z, -o)) * Complex::from(lit::<T>(0.5));
    let h = k_inv * m * k;
    h.map(|x| x.real())
}

/// Genus-2 hyperbolization from the regular octagon with interior angles
/// `π/4`.
///
/// Vertices sit at angles `kπ/4 + π/8`, so side `k` has its midpoint in
/// direction `kπ/4 + π/4` at distance `arccosh(1 + √2)` from the centre. The
/// side pairing `j -> i` is a rotation by `(i - j)π/4` followed by the half
/// turn at the midpoint of side `i`. The pairs `(0,2), (1,3), (4,6), (5,7)`
/// give `a1, b1, a2, b2` (the `b` generators are the inverse pairings), and
/// the relator `[a1,b1][a2,b2]` then holds exactly in SL(2,R).
pub fn octagon_hyperbolization<T: Real>(tol: &Tolerances) -> Hyperbolization<T> {
    let sqrt2 = lit::<T>(2.0).sqrt();
    let inradius = (T::one() + sqrt2).acosh();
    let quarter = T::frac_pi_4();
    let midpoint = |k: i32| quarter * lit::<T>(k as f64) + quarter;
    let pairing = |i: i32, j: i32| {
        disk_half_turn(inradius, midpoint(i)) * disk_rotation(quarter * lit::<T>((i - j) as f64))
    };
    let a1 = disk_to_real(&pairing(0, 2));
    let b1 = inv_sl2(&disk_to_real(&pairing(1, 3)));
    let a2 = disk_to_real(&pairing(4, 6));
    let b2 = inv_sl2(&disk_to_real(&pairing(5, 7)));
    Hyperbolization::new(2, vec![a1, b1, a2, b2], "octagon", tol).expect("regular octagon group is a hyperbolization")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_group::parse_word;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn octagon_matches_reference_matrices() {
        let h = octagon_hyperbolization::<f64>(&tol());
        let a1 = h.images()[0];
        let expected = Mat2::new(3.90447501, 1.70710678, -1.70710678, -0.49026145);
        assert!((a1 - expected).amax() < 1e-8, "{a1}");
        for m in h.images() {
            assert!((trace2(m).abs() - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        }
        assert!(h.relator_residual().unwrap() < 1e-12);
    }

    #[test]
    fn distance_basics() {
        let i = Complex::new(0.0, 1.0);
        assert_eq!(distance(i, i).unwrap(), 0.0);
        let ei = Complex::new(0.0, std::f64::consts::E);
        assert!((distance(i, ei).unwrap() - 1.0).abs() < 1e-15);
        assert!(distance(i, Complex::new(0.0, -1.0)).is_err());
    }

    #[test]
    fn fixed_points_of_diagonal_and_shift() {
        let e = std::f64::consts::E;
        let m = Mat2::new(e, 0.0, 0.0, 1.0 / e);
        let (minus, plus) = fixed_points(&m, &tol()).unwrap();
        assert_eq!(minus, BoundaryPoint::Finite(0.0));
        assert_eq!(plus, BoundaryPoint::Infinity);
        let t = Mat2::new(1.0, 1.0, 0.0, 1.0);
        let (minus, plus) = fixed_points(&(t * m * inv_sl2(&t)), &tol()).unwrap();
        assert_eq!(plus, BoundaryPoint::Infinity);
        assert!(minus.chordal_distance(&BoundaryPoint::Finite(1.0)) < 1e-12);
    }

    #[test]
    fn parabolic_rejected_by_fixed_points() {
        let p = Mat2::new(1.0, 1.0, 0.0, 1.0);
        assert!(matches!(fixed_points(&p, &tol()), Err(HyperbolicError::NotHyperbolic(_))));
        assert_eq!(translation_length_h(&p, &tol()).unwrap(), 0.0);
    }

    #[test]
    fn orientation_convention() {
        use BoundaryPoint::*;
        assert!(is_positively_oriented(Finite(0.0), Finite(-1.0), Infinity));
        assert!(is_positively_oriented(Infinity, Finite(1.0), Finite(0.0)));
        assert!(!is_positively_oriented(Finite(0.0), Finite(1.0), Infinity));
        assert!(!is_positively_oriented(Finite(0.0), Finite(0.0), Infinity));
    }

    #[test]
    fn axis_triple_of_diagonal() {
        let e = std::f64::consts::E;
        let m = Mat2::new(e, 0.0, 0.0, 1.0 / e);
        let u = axis_tangent_triple(&m, &tol()).unwrap();
        assert_eq!(u.minus, BoundaryPoint::Finite(0.0));
        assert_eq!(u.plus, BoundaryPoint::Infinity);
        match u.zero {
            BoundaryPoint::Finite(x) => assert!(x < 0.0 && x.is_finite()),
            BoundaryPoint::Infinity => panic!("x0 must be finite"),
        }
        assert!(u.is_positive());
    }

    #[test]
    fn table_round_trip() {
        let h = octagon_hyperbolization::<f64>(&tol());
        let back = Hyperbolization::<f64>::from_table(&h.to_table(), &tol()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn table_rejects_broken_relator() {
        let h = octagon_hyperbolization::<f64>(&tol());
        let text = h.to_table().replace("a1: 3.", "a1: 4.");
        assert!(Hyperbolization::<f64>::from_table(&text, &tol()).is_err());
    }

    #[test]
    fn recentred_axis_is_standard() {
        let h = octagon_hyperbolization::<f64>(&tol());
        for text in ["a1", "-b2,a2,b1,-a2,a1,-a2,-b1,-a1", "b1,b1,a2"] {
            let m = h.evaluate(&parse_word(2, text).unwrap()).unwrap();
            let u = axis_tangent_triple(&m, &tol()).unwrap();
            let eta = u.recentering();
            let v = u.map(&eta);
            let eps = 1e-9;
            assert!(v.minus.chordal_distance(&BoundaryPoint::Finite(0.0)) < eps, "{text}: {v:?}");
            assert!(v.zero.chordal_distance(&BoundaryPoint::Finite(-1.0)) < eps, "{text}: {v:?}");
            assert!(v.plus.chordal_distance(&BoundaryPoint::Infinity) < eps, "{text}: {v:?}");
            let d = eta * m * inv_sl2(&eta);
            let off = d[(0, 1)].abs().max(d[(1, 0)].abs());
            assert!(off < 1e-9 * d.amax(), "{text}: {d}");
            assert!(d[(0, 0)].abs() > d[(1, 1)].abs());
        }
    }

    // h(w⁶) has entries of size e^{3ℓ}, far beyond where det = 1 holds to 1e-9
    #[test]
    fn long_products_keep_their_lengths() {
        let h = octagon_hyperbolization::<f64>(&tol());
        let w = parse_word(2, "a1,b2,-a2,b1").unwrap();
        let ell = h.translation_length(&w, &tol()).unwrap();
        let m = h.evaluate(&w.pow(6)).unwrap();
        assert!(m.amax() > 1e6);
        assert!((translation_length_h(&m, &tol()).unwrap() - 6.0 * ell).abs() < 1e-9 * ell);
        assert!(fixed_points(&m, &tol()).is_ok());
        let short = h.evaluate(&w).unwrap();
        assert!(translation_length_h(&(short * 1.0001), &tol()).is_err());
    }

    #[test]
    fn evaluate_trivial_words() {
        let h = octagon_hyperbolization::<f64>(&tol());
        assert_eq!(h.evaluate(&Word::identity(2)).unwrap(), Mat2::identity());
        let w = parse_word(2, "a1,-a1").unwrap();
        assert_eq!(h.evaluate(&w).unwrap(), Mat2::identity());
        assert!(h.evaluate(&Word::identity(3)).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let mut t = tol();
        t.unimodular = 1e-4;
        t.relator_h = 1e-3;
        let h = octagon_hyperbolization::<f32>(&t);
        let l = h.translation_length(&parse_word(2, "a1").unwrap(), &t).unwrap();
        assert!((l as f64 - 2.0 * (1.0 + 0.5f64.sqrt()).acosh()).abs() < 1e-3);
    }
}
