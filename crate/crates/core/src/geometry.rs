//! Discretised boundaries: smooth closed curves in the plane, spheres in space,
//! scaled holes `p + eps * Omega` and smooth perturbations of curves.

use crate::lattice::{add, dot, norm, sub, UnitCell};
use crate::quadrature::GaussLegendre;
use crate::{Error, Point, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

/// Closed curves in reference position, parameterised on `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum CurveShape {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// `scale * (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)`.
    Kite { scale: f64 },
}

impl CurveShape {
    /// Position and first two parameter derivatives.
    pub fn eval(&self, t: f64) -> [Point; 3] {
        let (s, c) = t.sin_cos();
        match *self {
            CurveShape::Circle { radius: r } => [
                [r * c, r * s, 0.0],
                [-r * s, r * c, 0.0],
                [-r * c, -r * s, 0.0],
            ],
            CurveShape::Ellipse { a, b } => [
                [a * c, b * s, 0.0],
                [-a * s, b * c, 0.0],
                [-a * c, -b * s, 0.0],
            ],
            CurveShape::Kite { scale: k } => {
                let (s2, c2) = (2.0 * t).sin_cos();
                [
                    [k * (c + 0.65 * c2 - 0.65), k * 1.5 * s, 0.0],
                    [k * (-s - 1.3 * s2), k * 1.5 * c, 0.0],
                    [k * (-c - 2.6 * c2), -k * 1.5 * s, 0.0],
                ]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CurveShape::Circle { radius } => radius > 0.0 && radius.is_finite(),
            CurveShape::Ellipse { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            CurveShape::Kite { scale } => scale > 0.0 && scale.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGeometry(format!("non-positive size parameter in {self:?}")))
        }
    }
}

/// Catalog entry: a curve or a sphere, both centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Curve(CurveShape),
    Sphere { radius: f64 },
}

impl Shape {
    /// Looks up `circle`, `ellipse`, `kite` or `sphere` with positional parameters.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let need = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidGeometry(format!(
                    "shape '{name}' takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        match name {
            "circle" => need(1).map(|_| Shape::Curve(CurveShape::Circle { radius: params[0] })),
            "ellipse" => need(2).map(|_| Shape::Curve(CurveShape::Ellipse { a: params[0], b: params[1] })),
            "kite" => need(1).map(|_| Shape::Curve(CurveShape::Kite { scale: params[0] })),
            "sphere" => need(1).map(|_| Shape::Sphere { radius: params[0] }),
            _ => Err(Error::InvalidGeometry(format!("unknown shape '{name}'"))),
        }
    }

    /// Discretises with `resolution` nodes (curves) or order `L` (spheres).
    pub fn discretize(&self, center: Point, resolution: usize) -> Result<BoundaryGeometry> {
        match *self {
            Shape::Curve(c) => BoundaryGeometry::curve(c, center, resolution),
            Shape::Sphere { radius } => BoundaryGeometry::sphere(center, radius, resolution),
        }
    }
}

/// Vector fields along a reference curve, indexed by its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "field", rename_all = "snake_case")]
pub enum FieldBasis {
    /// Constant field.
    Translation { direction: [f64; 2] },
    /// The position field of the reference curve.
    Dilation,
    /// `e_axis cos(mode t)`, or `sin` when `sine`.
    Fourier { mode: u32, axis: usize, sine: bool },
}

impl FieldBasis {
    /// Field and its first two parameter derivatives at `t`.
    fn eval(&self, shape: &CurveShape, t: f64) -> [Point; 3] {
        match *self {
            FieldBasis::Translation { direction: d } => [[d[0], d[1], 0.0], [0.0; 3], [0.0; 3]],
            FieldBasis::Dilation => shape.eval(t),
            FieldBasis::Fourier { mode, axis, sine } => {
                let m = mode as f64;
                let (s, c) = (m * t).sin_cos();
                let (f, f1, f2) = if sine { (s, m * c, -m * m * s) } else { (c, -m * s, -m * m * c) };
                let mut out = [[0.0; 3]; 3];
                out[0][axis] = f;
                out[1][axis] = f1;
                out[2][axis] = f2;
                out
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FieldBasis::Fourier { axis, .. } if axis > 1 => {
                Err(Error::InvalidDiffeo(format!("field axis {axis} out of range for a planar curve")))
            }
            _ => Ok(()),
        }
    }
}

/// `offset + scale * (shape(t) + sum_m c_m psi_m(t))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveParam {
    pub shape: CurveShape,
    pub offset: Point,
    pub scale: f64,
    pub fields: Vec<(FieldBasis, f64)>,
}

impl CurveParam {
    pub fn eval(&self, t: f64) -> [Point; 3] {
        let mut g = self.shape.eval(t);
        for (field, c) in &self.fields {
            let f = field.eval(&self.shape, t);
            for (gk, fk) in g.iter_mut().zip(f.iter()) {
                for j in 0..2 {
                    gk[j] += c * fk[j];
                }
            }
        }
        for gk in g.iter_mut() {
            for v in gk.iter_mut() {
                *v *= self.scale;
            }
        }
        for j in 0..2 {
            g[0][j] += self.offset[j];
        }
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Curve2d,
    Sphere3d,
}

/// Underlying continuous surface, for evaluation away from the nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Surface {
    Curve(CurveParam),
    Sphere { center: Point, radius: f64 },
}

/// A point of the continuous boundary.
///
/// `param` is `[t, 0]` on curves and `[colatitude, longitude]` on spheres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub x: Point,
    pub normal: Point,
    pub param: [f64; 2],
}

/// Quadrature nodes, outward unit normals and weights of a closed boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryGeometry {
    kind: GeometryKind,
    surface: Surface,
    nodes: Vec<Point>,
    normals: Vec<Point>,
    weights: Vec<f64>,
    params: Vec<[f64; 2]>,
    /// Curves: `|gamma'(t_i)|`. Spheres: empty.
    speed: Vec<f64>,
    /// Curves: signed curvature w.r.t. the outward normal. Spheres: empty.
    curvature: Vec<f64>,
    /// Sphere order `L`; curves store the node count.
    order: usize,
    /// `+1` when the parameterisation runs counter-clockwise.
    orientation: f64,
}

impl BoundaryGeometry {
    /// Uniform trapezoidal discretisation of a catalog curve centred at `center`.
    pub fn curve(shape: CurveShape, center: Point, n: usize) -> Result<Self> {
        shape.validate()?;
        let param = CurveParam {
            shape,
            offset: [center[0], center[1], 0.0],
            scale: 1.0,
            fields: Vec::new(),
        };
        let g = Self::from_curve_param(param, n)?;
        g.check_simple(0.25)?;
        Ok(g)
    }

    pub fn from_curve_param(param: CurveParam, n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGeometry(format!("curve node count must be even and >= 8, got {n}")));
        }
        let h = 2.0 * PI / n as f64;
        let mut raw = Vec::with_capacity(n);
        for i in 0..n {
            raw.push(param.eval(i as f64 * h));
        }
        let twice_area: f64 = raw.iter().map(|g| g[0][0] * g[1][1] - g[0][1] * g[1][0]).sum::<f64>() * h;
        let orientation = if twice_area >= 0.0 { 1.0 } else { -1.0 };
        let mut out = Self {
            kind: GeometryKind::Curve2d,
            surface: Surface::Curve(param),
            nodes: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            params: Vec::with_capacity(n),
            speed: Vec::with_capacity(n),
            curvature: Vec::with_capacity(n),
            order: n,
            orientation,
        };
        for (i, g) in raw.iter().enumerate() {
            let sp = norm(&g[1]);
            if !(sp > 0.0) {
                return Err(Error::InvalidGeometry(format!("degenerate tangent at node {i}")));
            }
            out.nodes.push(g[0]);
            out.normals.push([orientation * g[1][1] / sp, -orientation * g[1][0] / sp, 0.0]);
            out.weights.push(h * sp);
            out.params.push([i as f64 * h, 0.0]);
            out.speed.push(sp);
            out.curvature.push(orientation * (g[1][0] * g[2][1] - g[1][1] * g[2][0]) / (sp * sp * sp));
        }
        Ok(out)
    }

    /// Product rule with `L` Gauss–Legendre colatitudes and `2L` longitudes.
    pub fn sphere(center: Point, radius: f64, order: usize) -> Result<Self> {
        if order < 4 {
            return Err(Error::InvalidGeometry(format!("sphere order must be >= 4, got {order}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!("sphere radius must be positive, got {radius}")));
        }
        let gl = GaussLegendre::new(order);
        let nphi = 2 * order;
        let dphi = 2.0 * PI / nphi as f64;
        let n = order * nphi;
        let mut out = Self {
            kind: GeometryKind::Sphere3d,
            surface: Surface::Sphere { center, radius },
            nodes: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            params: Vec::with_capacity(n),
            speed: Vec::new(),
            curvature: Vec::new(),
            order,
            orientation: 1.0,
        };
        for (&z, &w) in gl.nodes.iter().zip(&gl.weights) {
            let theta = z.acos();
            for j in 0..nphi {
                let phi = j as f64 * dphi;
                let p = out.surface_point([theta, phi]);
                out.nodes.push(p.x);
                out.normals.push(p.normal);
                out.weights.push(radius * radius * w * dphi);
                out.params.push([theta, phi]);
            }
        }
        Ok(out)
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            GeometryKind::Curve2d => 2,
            GeometryKind::Sphere3d => 3,
        }
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn params(&self) -> &[[f64; 2]] {
        &self.params
    }

    /// Curve speed `|gamma'|` at the nodes (empty for spheres).
    pub fn speed(&self) -> &[f64] {
        &self.speed
    }

    /// Curvature at the nodes, positive where the curve bends away from the normal.
    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    /// Node count for curves, order `L` for spheres.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sphere_center_radius(&self) -> Option<(Point, f64)> {
        match self.surface {
            Surface::Sphere { center, radius } => Some((center, radius)),
            Surface::Curve(_) => None,
        }
    }

    pub fn curve_param(&self) -> Option<&CurveParam> {
        match &self.surface {
            Surface::Curve(c) => Some(c),
            Surface::Sphere { .. } => None,
        }
    }

    /// Evaluates the continuous boundary at a parameter.
    pub fn surface_point(&self, param: [f64; 2]) -> SurfacePoint {
        match &self.surface {
            Surface::Curve(c) => {
                let g = c.eval(param[0]);
                let sp = norm(&g[1]);
                let o = self.orientation;
                SurfacePoint {
                    x: g[0],
                    normal: [o * g[1][1] / sp, -o * g[1][0] / sp, 0.0],
                    param: [param[0], 0.0],
                }
            }
            Surface::Sphere { center, radius } => {
                let (st, ct) = param[0].sin_cos();
                let (sp, cp) = param[1].sin_cos();
                let u = [st * cp, st * sp, ct];
                SurfacePoint {
                    x: [center[0] + radius * u[0], center[1] + radius * u[1], center[2] + radius * u[2]],
                    normal: u,
                    param,
                }
            }
        }
    }

    /// Area element with respect to the parameter measure (`|gamma'|`, or `r^2 sin(theta)`).
    pub fn area_element(&self, param: [f64; 2]) -> f64 {
        match &self.surface {
            Surface::Curve(c) => norm(&c.eval(param[0])[1]),
            Surface::Sphere { radius, .. } => radius * radius * param[0].sin(),
        }
    }

    pub fn surface_points(&self) -> Vec<SurfacePoint> {
        (0..self.len())
            .map(|i| SurfacePoint {
                x: self.nodes[i],
                normal: self.normals[i],
                param: self.params[i],
            })
            .collect()
    }

    /// Boundary measure from the quadrature weights.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Enclosed area or volume via `(1/n) oint x . nu`.
    pub fn enclosed_volume(&self) -> f64 {
        let c = self.nodes[0];
        let s: f64 = (0..self.len())
            .map(|i| dot(&sub(&self.nodes[i], &c), &self.normals[i]) * self.weights[i])
            .sum();
        s / self.dim() as f64
    }

    /// Largest local node spacing.
    pub fn mesh_width(&self) -> f64 {
        match self.kind {
            GeometryKind::Curve2d => self.weights.iter().cloned().fold(0.0, f64::max),
            GeometryKind::Sphere3d => {
                let (_, r) = self.sphere_center_radius().unwrap();
                PI * r / self.order as f64
            }
        }
    }

    /// Hash of the discretisation, stable across runs.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        (self.kind as u8).hash(&mut h);
        for (x, (nu, w)) in self.nodes.iter().zip(self.normals.iter().zip(&self.weights)) {
            for v in x.iter().chain(nu.iter()) {
                v.to_bits().hash(&mut h);
            }
            w.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// Whether the closed boundary lies in the open cell.
    pub fn check_inside(&self, cell: &UnitCell) -> Result<()> {
        if cell.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: cell.dim(),
                got: self.dim(),
            });
        }
        let inside = match &self.surface {
            Surface::Sphere { center, radius } => {
                (0..3).all(|j| center[j] - radius > 0.0 && center[j] + radius < cell.diag()[j])
            }
            Surface::Curve(c) => {
                let m = 4 * self.len();
                (0..m).all(|i| cell.contains(&c.eval(2.0 * PI * i as f64 / m as f64)[0]))
            }
        };
        if inside {
            Ok(())
        } else {
            Err(Error::OutOfCell("boundary leaves the open periodicity cell".into()))
        }
    }

    /// Self-intersection test for curves: polygon edges must not cross and
    /// non-adjacent nodes must stay `min_gap` local spacings apart.
    fn check_simple(&self, min_gap: f64) -> Result<()> {
        if self.kind != GeometryKind::Curve2d {
            return Ok(());
        }
        let n = self.len();
        let x = &self.nodes;
        let cross = |a: &Point, b: &Point, c: &Point| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        for i in 0..n {
            let (a, b) = (&x[i], &x[(i + 1) % n]);
            for j in i + 2..n {
                if (j + 1) % n == i {
                    continue;
                }
                let (c, d) = (&x[j], &x[(j + 1) % n]);
                let d1 = cross(a, b, c);
                let d2 = cross(a, b, d);
                let d3 = cross(c, d, a);
                let d4 = cross(c, d, b);
                if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                    return Err(Error::InvalidGeometry(format!("curve edges {i} and {j} cross")));
                }
                let gap = norm(&sub(a, c));
                if gap < min_gap * self.weights[i].min(self.weights[j]) {
                    return Err(Error::InvalidGeometry(format!("nodes {i} and {j} nearly coincide")));
                }
            }
        }
        Ok(())
    }
}

/// A hole `p + eps * Omega` built from a reference boundary centred at the origin.
#[derive(Debug, Clone)]
pub struct HoleSpec {
    pub center: Point,
    pub epsilon: f64,
    pub reference: BoundaryGeometry,
}

impl HoleSpec {
    /// Scales the reference and places it in `cell`.
    pub fn build(&self, cell: &UnitCell) -> Result<BoundaryGeometry> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidGeometry(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        let eps = self.epsilon;
        let r = &self.reference;
        let map = |x: &Point| add(&self.center, &[eps * x[0], eps * x[1], eps * x[2]]);
        let surface = match &r.surface {
            Surface::Sphere { center, radius } => Surface::Sphere {
                center: map(center),
                radius: eps * radius,
            },
            Surface::Curve(c) => {
                let mut c = c.clone();
                c.offset = map(&c.offset);
                c.scale *= eps;
                Surface::Curve(c)
            }
        };
        let wscale = eps.powi(r.dim() as i32 - 1);
        let g = BoundaryGeometry {
            kind: r.kind,
            surface,
            nodes: r.nodes.iter().map(map).collect(),
            normals: r.normals.clone(),
            weights: r.weights.iter().map(|w| w * wscale).collect(),
            params: r.params.clone(),
            speed: r.speed.iter().map(|s| s * eps).collect(),
            curvature: r.curvature.iter().map(|k| k / eps).collect(),
            order: r.order,
            orientation: r.orientation,
        };
        g.check_inside(cell).map_err(|_| {
            Error::InvalidGeometry(format!("hole of scale {eps} at {:?} escapes the cell", self.center))
        })?;
        Ok(g)
    }
}

/// Thresholds for the numerical admissibility test of a perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    /// Lower bound on `|(phi o gamma)'| / |gamma'|`.
    pub min_jacobian: f64,
    /// Non-adjacent nodes must be this many local spacings apart.
    pub min_gap: f64,
}

impl Default for Admissibility {
    fn default() -> Self {
        Self {
            min_jacobian: 0.05,
            min_gap: 0.25,
        }
    }
}

/// `phi = id + sum_m c_m psi_m` on a curve.
#[derive(Debug, Clone)]
pub struct DiffeoPerturbation {
    pub base: BoundaryGeometry,
    pub basis: Vec<FieldBasis>,
    pub coefficients: Vec<f64>,
    pub admissibility: Admissibility,
}

impl DiffeoPerturbation {
    pub fn new(base: BoundaryGeometry, basis: Vec<FieldBasis>, coefficients: Vec<f64>) -> Result<Self> {
        if base.kind != GeometryKind::Curve2d {
            return Err(Error::Unsupported("perturbations are implemented for planar curves only".into()));
        }
        if basis.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: coefficients.len(),
            });
        }
        for f in &basis {
            f.validate()?;
        }
        Ok(Self {
            base,
            basis,
            coefficients,
            admissibility: Admissibility::default(),
        })
    }

    /// Deformed boundary `phi(dOmega)` with `n` nodes; checked against `cell` when given.
    pub fn apply(&self, n: usize, cell: Option<&UnitCell>) -> Result<BoundaryGeometry> {
        let base = self.base.curve_param().expect("validated as a curve");
        let mut param = base.clone();
        param
            .fields
            .extend(self.basis.iter().copied().zip(self.coefficients.iter().copied()));
        let g = BoundaryGeometry::from_curve_param(param, n).map_err(|e| Error::InvalidDiffeo(e.to_string()))?;
        let h = 2.0 * PI / n as f64;
        for i in 0..n {
            let ref_speed = norm(&base.eval(i as f64 * h)[1]);
            if g.speed[i] < self.admissibility.min_jacobian * ref_speed {
                return Err(Error::InvalidDiffeo(format!("differential nearly degenerate at node {i}")));
            }
        }
        if g.orientation != self.base.orientation {
            return Err(Error::InvalidDiffeo("perturbation reverses orientation".into()));
        }
        g.check_simple(self.admissibility.min_gap)
            .map_err(|e| Error::InvalidDiffeo(e.to_string()))?;
        if let Some(cell) = cell {
            g.check_inside(cell)?;
        }
        Ok(g)
    }
}
