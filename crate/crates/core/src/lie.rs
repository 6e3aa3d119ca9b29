//! Floating-point verification of the weight-0 theory on SL(2,R) and R^2:
//! three operator families with closed forms, finite-difference
//! differentiation at the origin, the Lie-algebra weight-0 identity, the
//! mixed-derivative compatibility check, and the closed-form exchange maps.

use crate::error::CoreError;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt::{Debug, Display};

/// Scalar bound for the numeric kernels. Pinned tolerances in the batch
/// checks are calibrated for `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}
impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

fn c<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant representable")
}

/// Row-major 2x2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Mat2::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// `[[a, b], [c, -a]]`.
    pub fn traceless(a: T, b: T, c: T) -> Self {
        Mat2::new(a, b, c, -a)
    }

    pub fn diag(x: T, y: T) -> Self {
        Mat2::new(x, T::zero(), T::zero(), y)
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn neg(&self) -> Self {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn scale(&self, k: T) -> Self {
        Mat2::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn inv(&self) -> Option<Self> {
        let det = self.det();
        if det.abs() < c::<T>(1e-300) {
            return None;
        }
        Some(Mat2::new(self.d, -self.b, -self.c, self.a).scale(det.recip()))
    }

    pub fn frob(&self) -> T {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    /// `g * self * g^{-1}`.
    pub fn conjugated_by(&self, g: &Self) -> Self {
        g.mul(self).mul(&g.inv().expect("conjugating matrix is invertible"))
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn matvec(&self, v: &Vec2<T>) -> Vec2<T> {
        Vec2 {
            x: self.a * v.x + self.b * v.y,
            y: self.c * v.x + self.d * v.y,
        }
    }

    pub fn to_json(&self) -> Value {
        json!([
            [self.a.to_f64(), self.b.to_f64()],
            [self.c.to_f64(), self.d.to_f64()]
        ])
    }
}

/// Column vector in R^2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2::new(T::zero(), T::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Vec2::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Vec2::new(self.x - o.x, self.y - o.y)
    }

    pub fn scale(&self, k: T) -> Self {
        Vec2::new(self.x * k, self.y * k)
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn to_json(&self) -> Value {
        json!([self.x.to_f64(), self.y.to_f64()])
    }
}

/// Matrix exponential via the traceless decomposition
/// `M = (tr/2) I + N`, `N^2 = delta I`.
pub fn exp2x2<T: Real>(m: &Mat2<T>) -> Mat2<T> {
    let half_tr = m.trace() * c(0.5);
    let n = m.sub(&Mat2::diag(half_tr, half_tr));
    let delta = -n.det();
    let (cosh_like, sinhc) = if delta.abs() < c(1e-8) {
        // Even series in sqrt(delta), valid for either sign.
        (
            T::one() + delta * c(0.5) + delta * delta * c(1.0 / 24.0),
            T::one() + delta * c(1.0 / 6.0) + delta * delta * c(1.0 / 120.0),
        )
    } else if delta > T::zero() {
        let q = delta.sqrt();
        (q.cosh(), q.sinh() / q)
    } else {
        let q = (-delta).sqrt();
        (q.cos(), q.sin() / q)
    };
    Mat2::diag(cosh_like, cosh_like)
        .add(&n.scale(sinhc))
        .scale(half_tr.exp())
}

/// Principal square root for matrices with positive determinant and
/// `tr + 2 sqrt(det) > 0`.
fn sqrt2x2<T: Real>(m: &Mat2<T>) -> Result<Mat2<T>, CoreError> {
    let det = m.det();
    if det <= T::zero() {
        return Err(CoreError::Precondition(
            "matrix square root needs positive determinant".into(),
        ));
    }
    let r = det.sqrt();
    let denom = m.trace() + r + r;
    if denom <= T::zero() {
        return Err(CoreError::Precondition(
            "matrix has no principal square root".into(),
        ));
    }
    Ok(m.add(&Mat2::diag(r, r)).scale(denom.sqrt().recip()))
}

fn log2x2_unit<T: Real>(m: &Mat2<T>, depth: u32) -> Result<Mat2<T>, CoreError> {
    // Far from the identity: pull back through square roots first.
    if (m.trace() - c(2.0)).abs() > c(1.5) {
        if depth >= 40 {
            return Err(CoreError::Precondition(
                "matrix logarithm did not contract to the identity".into(),
            ));
        }
        let r = sqrt2x2(m)?;
        return Ok(log2x2_unit(&r, depth + 1)?.scale(c(2.0)));
    }
    let t = m.trace() * c(0.5);
    let s = m.sub(&Mat2::diag(t, t));
    let delta = -s.det();
    let factor = if delta.abs() < c(1e-8) {
        // q / sinh(q) with sinh(q)^2 = delta, as an even series.
        T::one() - delta * c(1.0 / 6.0) + delta * delta * c(3.0 / 40.0)
    } else if delta > T::zero() {
        if t <= T::zero() {
            return Err(CoreError::Precondition(
                "matrix has no real logarithm".into(),
            ));
        }
        let q = delta.sqrt().asinh();
        q / delta.sqrt()
    } else {
        let root = (-delta).sqrt();
        let theta = root.atan2(t);
        theta / root
    };
    Ok(s.scale(factor))
}

/// Matrix logarithm: closed-form inverse of the exponential near the
/// identity, with a square-root contraction fallback when the trace is far
/// from 2. Requires positive determinant.
pub fn log2x2<T: Real>(m: &Mat2<T>) -> Result<Mat2<T>, CoreError> {
    let det = m.det();
    if det <= T::zero() {
        return Err(CoreError::Precondition(
            "matrix logarithm needs positive determinant".into(),
        ));
    }
    let mu = det.sqrt().ln();
    let unit = m.scale(det.sqrt().recip());
    Ok(log2x2_unit(&unit, 0)?.add(&Mat2::diag(mu, mu)))
}

/// Which of the three closed-form operator families.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Family {
    /// Traceless matrix to the diagonal exponential of its corner entry.
    Bs,
    /// Traceless matrix to the unit upper-triangular shear by its lower
    /// entry.
    Bsp,
    /// Plane vector to the unit upper-triangular shear by its second
    /// coordinate.
    Rs,
}

impl std::str::FromStr for Family {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        match s.to_ascii_lowercase().as_str() {
            "bs" | "b" => Ok(Family::Bs),
            "bsp" | "bs'" | "b'" | "bprime" => Ok(Family::Bsp),
            "rs" | "r" => Ok(Family::Rs),
            _ => Err(CoreError::Parse(format!("unknown family {:?}", s))),
        }
    }
}

/// A point in the domain of a family: a traceless matrix for the matrix
/// families, a plane vector for the vector family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pt<T> {
    M(Mat2<T>),
    V(Vec2<T>),
}

impl<T: Real> Pt<T> {
    pub fn scale(&self, k: T) -> Self {
        match self {
            Pt::M(m) => Pt::M(m.scale(k)),
            Pt::V(v) => Pt::V(v.scale(k)),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (Pt::M(a), Pt::M(b)) => Pt::M(a.add(b)),
            (Pt::V(a), Pt::V(b)) => Pt::V(a.add(b)),
            _ => panic!("mixed point kinds"),
        }
    }

    pub fn dist(&self, o: &Self) -> T {
        match (self, o) {
            (Pt::M(a), Pt::M(b)) => a.sub(b).frob(),
            (Pt::V(a), Pt::V(b)) => a.sub(b).norm(),
            _ => panic!("mixed point kinds"),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Pt::M(m) => m.to_json(),
            Pt::V(v) => v.to_json(),
        }
    }
}

/// One operator family at a fixed parameter `s`.
#[derive(Clone, Copy, Debug)]
pub struct OperatorFamily<T> {
    pub kind: Family,
    pub s: T,
}

/// Outcome of a batch numeric check.
#[derive(Debug, Clone, Serialize)]
pub struct NumReport {
    pub check: String,
    pub holds: bool,
    pub max_residual: f64,
    pub argmax: Option<Value>,
    pub samples: u64,
    pub seed: Option<u64>,
    pub tolerance: f64,
}

impl NumReport {
    fn from_scan(check: &str, scan: ResidualScan, samples: u64, seed: Option<u64>, tol: f64) -> Self {
        NumReport {
            check: check.into(),
            holds: scan.max <= tol && scan.max.is_finite(),
            max_residual: scan.max,
            argmax: scan.argmax,
            samples,
            seed,
            tolerance: tol,
        }
    }
}

struct ResidualScan {
    max: f64,
    argmax: Option<Value>,
}

impl ResidualScan {
    fn new() -> Self {
        ResidualScan {
            max: 0.0,
            argmax: None,
        }
    }

    fn push<T: Real>(&mut self, residual: T, sample: impl FnOnce() -> Value) {
        let r = residual.to_f64().unwrap_or(f64::NAN);
        if r.is_nan() || r > self.max {
            self.max = r;
            self.argmax = Some(sample());
        }
    }
}

impl<T: Real> OperatorFamily<T> {
    pub fn new(kind: Family, s: T) -> Self {
        OperatorFamily { kind, s }
    }

    pub fn is_vector_domain(&self) -> bool {
        self.kind == Family::Rs
    }

    /// The group element assigned to a domain point.
    pub fn eval(&self, x: &Pt<T>) -> Result<Mat2<T>, CoreError> {
        match (self.kind, x) {
            (Family::Bs, Pt::M(m)) => {
                let e = (self.s * m.a).exp();
                Ok(Mat2::diag(e, e.recip()))
            }
            (Family::Bsp, Pt::M(m)) => {
                Ok(Mat2::new(T::one(), self.s * m.c, T::zero(), T::one()))
            }
            (Family::Rs, Pt::V(v)) => {
                Ok(Mat2::new(T::one(), self.s * v.y, T::zero(), T::one()))
            }
            _ => Err(CoreError::Precondition(
                "point kind does not match the family's domain".into(),
            )),
        }
    }

    /// The module action of a group element on a domain point: conjugation
    /// on matrices, matrix-vector multiplication on vectors.
    pub fn act(&self, g: &Mat2<T>, x: &Pt<T>) -> Pt<T> {
        match x {
            Pt::M(m) => Pt::M(m.conjugated_by(g)),
            Pt::V(v) => Pt::V(g.matvec(v)),
        }
    }

    /// Draws a domain point with entries uniform in [-2, 2].
    pub fn sample(&self, rng: &mut impl Rng) -> Pt<T> {
        let mut take = || c::<T>(rng.gen_range(-2.0..=2.0));
        if self.is_vector_domain() {
            Pt::V(Vec2::new(take(), take()))
        } else {
            Pt::M(Mat2::traceless(take(), take(), take()))
        }
    }

    /// Residual of the defining relation at one pair:
    /// `|| F(x) F(y) - F(x + Phi(F(x)) y) ||`.
    pub fn rb_residual(&self, x: &Pt<T>, y: &Pt<T>) -> Result<T, CoreError> {
        let fx = self.eval(x)?;
        let fy = self.eval(y)?;
        let sum = x.add(&self.act(&fx, y));
        Ok(fx.mul(&fy).sub(&self.eval(&sum)?).frob())
    }

    /// Batch residual check over seeded samples.
    pub fn rb_check(&self, samples: usize, seed: u64) -> NumReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scan = ResidualScan::new();
        for _ in 0..samples {
            let x = self.sample(&mut rng);
            let y = self.sample(&mut rng);
            let r = self.rb_residual(&x, &y).expect("sampled in domain");
            scan.push(r, || json!({"x": x.to_json(), "y": y.to_json()}));
        }
        NumReport::from_scan("rb_residual", scan, samples as u64, Some(seed), 1e-9)
    }

    /// All assigned group elements are unimodular.
    pub fn det_check(&self, samples: usize, seed: u64) -> NumReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scan = ResidualScan::new();
        for _ in 0..samples {
            let x = self.sample(&mut rng);
            let d = self.eval(&x).expect("sampled in domain").det();
            scan.push((d - T::one()).abs(), || x.to_json());
        }
        NumReport::from_scan("det_one", scan, samples as u64, Some(seed), 1e-12)
    }

    /// Central finite difference of `t -> log F(t x)` at `t = 0`, improved
    /// by one Richardson extrapolation step over h and h/2.
    pub fn differentiate_at_zero(&self, x: &Pt<T>) -> Result<Mat2<T>, CoreError> {
        let diff = |h: T| -> Result<Mat2<T>, CoreError> {
            let plus = log2x2(&self.eval(&x.scale(h))?)?;
            let minus = log2x2(&self.eval(&x.scale(-h))?)?;
            Ok(plus.sub(&minus).scale((h + h).recip()))
        };
        let h: T = c(1e-3);
        let d1 = diff(h)?;
        let d2 = diff(h * c(0.5))?;
        // (4 D(h/2) - D(h)) / 3 cancels the quadratic error term.
        Ok(d2.scale(c(4.0)).sub(&d1).scale(c(1.0 / 3.0)))
    }

    /// The closed-form derivative at the origin.
    pub fn closed_derivative(&self, x: &Pt<T>) -> Result<Mat2<T>, CoreError> {
        match (self.kind, x) {
            (Family::Bs, Pt::M(m)) => Ok(Mat2::diag(self.s * m.a, -(self.s * m.a))),
            (Family::Bsp, Pt::M(m)) => {
                Ok(Mat2::new(T::zero(), self.s * m.c, T::zero(), T::zero()))
            }
            (Family::Rs, Pt::V(v)) => {
                Ok(Mat2::new(T::zero(), self.s * v.y, T::zero(), T::zero()))
            }
            _ => Err(CoreError::Precondition(
                "point kind does not match the family's domain".into(),
            )),
        }
    }

    /// Finite-difference derivative against the closed form on seeded
    /// samples.
    pub fn derivative_check(&self, samples: usize, seed: u64) -> NumReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scan = ResidualScan::new();
        for _ in 0..samples {
            let x = self.sample(&mut rng);
            let fd = self.differentiate_at_zero(&x).expect("families are smooth");
            let cf = self.closed_derivative(&x).expect("sampled in domain");
            scan.push(fd.sub(&cf).frob(), || x.to_json());
        }
        NumReport::from_scan("derivative_at_zero", scan, samples as u64, Some(seed), 1e-6)
    }

    /// Mixed second finite difference of `(t, u) -> Phi(F(t x))(u y)` at the
    /// origin against the bracket `[B(x), y]` of the closed derivative, on
    /// matrix domains.
    pub fn prelie_diff_check(&self, samples: usize, seed: u64) -> Result<NumReport, CoreError> {
        if self.is_vector_domain() {
            return Err(CoreError::Precondition(
                "mixed-derivative check needs a matrix domain".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scan = ResidualScan::new();
        let h: T = c(1e-3);
        for _ in 0..samples {
            let x = self.sample(&mut rng);
            let y = self.sample(&mut rng);
            let (xm, ym) = match (&x, &y) {
                (Pt::M(a), Pt::M(b)) => (*a, *b),
                _ => unreachable!(),
            };
            let conj = |t: T| -> Mat2<T> {
                let g = self
                    .eval(&Pt::M(xm.scale(t)))
                    .expect("matrix domain");
                ym.conjugated_by(&g)
            };
            // Linearity in the second slot collapses the mixed difference to
            // a central difference of the conjugation.
            let fd = conj(h).sub(&conj(-h)).scale((h + h).recip());
            let bx = self.closed_derivative(&x).expect("matrix domain");
            scan.push(fd.sub(&bx.commutator(&ym)).frob(), || {
                json!({"x": x.to_json(), "y": y.to_json()})
            });
        }
        Ok(NumReport::from_scan(
            "prelie_mixed_derivative",
            scan,
            samples as u64,
            Some(seed),
            1e-5,
        ))
    }

    /// The exchange map computed from the defining data:
    /// `(u, v) -> (w, Phi(F(w)^{-1}) u)` with `w = Phi(F(u)) v`.
    pub fn upsilon_generic(&self, u: &Pt<T>, v: &Pt<T>) -> Result<(Pt<T>, Pt<T>), CoreError> {
        let fu = self.eval(u)?;
        let w = self.act(&fu, v);
        let fw_inv = self
            .eval(&w)?
            .inv()
            .ok_or_else(|| CoreError::Precondition("non-invertible value".into()))?;
        Ok((w, self.act(&fw_inv, u)))
    }

    /// The closed form of the exchange map for this family.
    pub fn upsilon_closed(&self, u: &Pt<T>, v: &Pt<T>) -> Result<(Pt<T>, Pt<T>), CoreError> {
        let s = self.s;
        match (self.kind, u, v) {
            (Family::Rs, Pt::V(p), Pt::V(q)) => {
                let shear = s * p.y * q.y;
                Ok((
                    Pt::V(Vec2::new(q.x + shear, q.y)),
                    Pt::V(Vec2::new(p.x - shear, p.y)),
                ))
            }
            (Family::Bs, Pt::M(m), Pt::M(n)) => {
                let e = (s * m.a + s * m.a).exp(); // e^{2 s a}
                let f = (s * n.a + s * n.a).exp(); // e^{2 s x}
                Ok((
                    Pt::M(Mat2::traceless(n.a, n.b * e, n.c / e)),
                    Pt::M(Mat2::traceless(m.a, m.b / f, m.c * f)),
                ))
            }
            (Family::Bsp, Pt::M(m), Pt::M(n)) => {
                let (a, b, cc) = (m.a, m.b, m.c);
                let (x, y, z) = (n.a, n.b, n.c);
                Ok((
                    Pt::M(Mat2::traceless(
                        x + s * cc * z,
                        y - (s + s) * cc * x - s * s * cc * cc * z,
                        z,
                    )),
                    Pt::M(Mat2::traceless(
                        a - s * cc * z,
                        b + (s + s) * a * z - s * s * z * z * cc,
                        cc,
                    )),
                ))
            }
            _ => Err(CoreError::Precondition(
                "point kinds do not match the family's domain".into(),
            )),
        }
    }

    /// Closed form against the generic evaluation, on seeded samples.
    pub fn upsilon_agreement_check(&self, samples: usize, seed: u64) -> NumReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scan = ResidualScan::new();
        for _ in 0..samples {
            let u = self.sample(&mut rng);
            let v = self.sample(&mut rng);
            let (g1, g2) = self.upsilon_generic(&u, &v).expect("sampled in domain");
            let (c1, c2) = self.upsilon_closed(&u, &v).expect("sampled in domain");
            let r = g1.dist(&c1).max(g2.dist(&c2));
            scan.push(r, || json!({"u": u.to_json(), "v": v.to_json()}));
        }
        NumReport::from_scan(
            "upsilon_closed_vs_generic",
            scan,
            samples as u64,
            Some(seed),
            1e-10,
        )
    }

    /// The closed-form exchange map is an involution, on seeded samples.
    pub fn upsilon_involution_check(&self, samples: usize, seed: u64) -> NumReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scan = ResidualScan::new();
        for _ in 0..samples {
            let u = self.sample(&mut rng);
            let v = self.sample(&mut rng);
            let (w, t) = self.upsilon_closed(&u, &v).expect("sampled in domain");
            let (u2, v2) = self.upsilon_closed(&w, &t).expect("stays in domain");
            let r = u2.dist(&u).max(v2.dist(&v));
            scan.push(r, || json!({"u": u.to_json(), "v": v.to_json()}));
        }
        NumReport::from_scan(
            "upsilon_involutive",
            scan,
            samples as u64,
            Some(seed),
            1e-9,
        )
    }
}

/// The weight-0 identity `[B(x), B(y)] = B([B(x), y] + [x, B(y)])` for a
/// linear map on traceless matrices, with linearity itself probed on the
/// same samples.
pub fn lie_rb_check<T: Real>(
    b: &(dyn Fn(&Mat2<T>) -> Mat2<T> + Sync),
    samples: usize,
    seed: u64,
) -> NumReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scan = ResidualScan::new();
    let take = |rng: &mut ChaCha8Rng| {
        Mat2::traceless(
            c::<T>(rng.gen_range(-2.0..=2.0)),
            c::<T>(rng.gen_range(-2.0..=2.0)),
            c::<T>(rng.gen_range(-2.0..=2.0)),
        )
    };
    for _ in 0..samples {
        let x = take(&mut rng);
        let y = take(&mut rng);
        let alpha: T = c(rng.gen_range(-2.0..=2.0));
        let lin = b(&x.scale(alpha).add(&y))
            .sub(&b(&x).scale(alpha))
            .sub(&b(&y))
            .frob();
        scan.push(lin, || json!({"part": "linearity", "x": x.to_json(), "y": y.to_json()}));
        let lhs = b(&x).commutator(&b(&y));
        let rhs = b(&b(&x).commutator(&y).add(&x.commutator(&b(&y))));
        scan.push(lhs.sub(&rhs).frob(), || {
            json!({"part": "identity", "x": x.to_json(), "y": y.to_json()})
        });
    }
    NumReport::from_scan("lie_rb_identity", scan, samples as u64, Some(seed), 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Mat2<f64>;

    fn fam(kind: Family, s: f64) -> OperatorFamily<f64> {
        OperatorFamily::new(kind, s)
    }

    #[test]
    fn matrix_basics() {
        let m = M::new(1.0, 2.0, 3.0, 4.0);
        let id = M::identity();
        assert_eq!(m.mul(&id), m);
        assert!((m.det() + 2.0).abs() < 1e-12);
        let mi = m.inv().unwrap();
        assert!(m.mul(&mi).sub(&id).frob() < 1e-12);
    }

    #[test]
    fn exp_log_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = M::traceless(
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
            );
            let back = log2x2(&exp2x2(&n)).unwrap();
            assert!(back.sub(&n).frob() < 1e-9, "{:?}", n);
        }
        assert_eq!(exp2x2(&M::zero()), M::identity());
    }

    #[test]
    fn log_far_from_identity_uses_contraction() {
        let big = exp2x2(&M::diag(2.0, -2.0));
        assert!((big.trace() - 2.0).abs() > 1.5);
        let l = log2x2(&big).unwrap();
        assert!(l.sub(&M::diag(2.0, -2.0)).frob() < 1e-9);
    }

    #[test]
    fn residual_zero_at_origin_and_small_on_samples() {
        for kind in [Family::Bs, Family::Bsp, Family::Rs] {
            let f = fam(kind, 0.7);
            let zero = if f.is_vector_domain() {
                Pt::V(Vec2::zero())
            } else {
                Pt::M(M::zero())
            };
            assert_eq!(f.rb_residual(&zero, &zero).unwrap(), 0.0);
            let rep = f.rb_check(250, 42);
            assert!(rep.holds, "{:?}", rep);
            let rep = f.det_check(250, 42);
            assert!(rep.holds, "{:?}", rep);
        }
    }

    #[test]
    fn mismatched_domain_is_rejected() {
        let f = fam(Family::Bs, 1.0);
        assert!(f.eval(&Pt::V(Vec2::new(1.0, 2.0))).is_err());
        let g = fam(Family::Rs, 1.0);
        assert!(g.eval(&Pt::M(M::zero())).is_err());
    }

    #[test]
    fn derivative_matches_closed_forms() {
        let s = 0.6;
        let f = fam(Family::Bs, s);
        let x = Pt::M(M::traceless(1.0, 0.3, -0.2));
        let d = f.differentiate_at_zero(&x).unwrap();
        assert!(d.sub(&M::diag(s, -s)).frob() < 1e-6);

        let f = fam(Family::Bsp, s);
        let x = Pt::M(M::traceless(0.4, -1.1, 1.0));
        let d = f.differentiate_at_zero(&x).unwrap();
        assert!(d.sub(&M::new(0.0, s, 0.0, 0.0)).frob() < 1e-6);

        let f = fam(Family::Rs, s);
        let x = Pt::V(Vec2::new(0.7, 1.0));
        let d = f.differentiate_at_zero(&x).unwrap();
        assert!(d.sub(&M::new(0.0, s, 0.0, 0.0)).frob() < 1e-6);

        // At the origin the derivative vanishes.
        let d = f.differentiate_at_zero(&Pt::V(Vec2::zero())).unwrap();
        assert!(d.frob() < 1e-9);

        for kind in [Family::Bs, Family::Bsp, Family::Rs] {
            let rep = fam(kind, -0.5).derivative_check(100, 42);
            assert!(rep.holds, "{:?}", rep);
        }
    }

    #[test]
    fn lie_identity_for_derived_maps() {
        let zero = |_: &M| M::zero();
        assert!(lie_rb_check::<f64>(&zero, 100, 42).holds);

        let s = 0.8;
        let bs = move |x: &M| M::diag(s * x.a, -s * x.a);
        assert!(lie_rb_check::<f64>(&bs, 200, 42).holds);
        let bsp = move |x: &M| M::new(0.0, s * x.c, 0.0, 0.0);
        assert!(lie_rb_check::<f64>(&bsp, 200, 42).holds);

        let ident = |x: &M| *x;
        let rep = lie_rb_check::<f64>(&ident, 200, 42);
        assert!(!rep.holds);
        assert!(rep.argmax.is_some());
    }

    #[test]
    fn mixed_derivative_matches_bracket() {
        // Diagonal x against the upper nilpotent: the bracket doubles and
        // scales the nilpotent.
        let s = 0.9;
        let f = fam(Family::Bs, s);
        let x = M::diag(1.0, -1.0);
        let y = M::new(0.0, 1.0, 0.0, 0.0);
        let g = |t: f64| f.eval(&Pt::M(x.scale(t))).unwrap();
        let h = 1e-3;
        let fd = y
            .conjugated_by(&g(h))
            .sub(&y.conjugated_by(&g(-h)))
            .scale(1.0 / (2.0 * h));
        assert!(fd.sub(&y.scale(2.0 * s)).frob() < 1e-5);

        for kind in [Family::Bs, Family::Bsp] {
            let rep = fam(kind, 0.5).prelie_diff_check(100, 42).unwrap();
            assert!(rep.holds, "{:?}", rep);
        }
        assert!(fam(Family::Rs, 0.5).prelie_diff_check(10, 42).is_err());
    }

    #[test]
    fn upsilon_closed_forms() {
        let s = 0.45;
        let f = fam(Family::Rs, s);
        let u = Pt::V(Vec2::new(1.0, 2.0));
        let v = Pt::V(Vec2::new(-0.5, 1.5));
        let (w, t) = f.upsilon_closed(&u, &v).unwrap();
        assert_eq!(w, Pt::V(Vec2::new(-0.5 + s * 2.0 * 1.5, 1.5)));
        assert_eq!(t, Pt::V(Vec2::new(1.0 - s * 2.0 * 1.5, 2.0)));

        for kind in [Family::Bs, Family::Bsp, Family::Rs] {
            for s in [-1.0, -0.5, 0.5, 1.0] {
                let f = fam(kind, s);
                assert!(f.upsilon_agreement_check(200, 42).holds, "{:?} {}", kind, s);
                assert!(f.upsilon_involution_check(200, 42).holds, "{:?} {}", kind, s);
            }
        }

        // s = 0 turns the exchange into the flip.
        for kind in [Family::Bs, Family::Bsp, Family::Rs] {
            let f = fam(kind, 0.0);
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let u = f.sample(&mut rng);
            let v = f.sample(&mut rng);
            let (w, t) = f.upsilon_closed(&u, &v).unwrap();
            assert!(w.dist(&v) < 1e-14 && t.dist(&u) < 1e-14);
        }
    }

    #[test]
    fn reports_serialize() {
        let rep = fam(Family::Bs, 1.0).rb_check(10, 42);
        let j = serde_json::to_value(&rep).unwrap();
        assert_eq!(j["check"], "rb_residual");
        assert_eq!(j["seed"], 42);
    }
}
