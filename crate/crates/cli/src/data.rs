//! Named boundary data and test densities.

use crate::config::{point, DataSpec, Expression};
use anyhow::{bail, Context};
use perpot::geometry::SurfacePoint;
use perpot::greens::heat_green;
use perpot::{BoundaryGeometry, Complex64, HeatRepresentation, KernelFamily, KernelKind, Point, UnitCell};
use std::f64::consts::PI;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Smooth periodic function of position used by the `smooth` expression.
pub fn smooth_field(cell: &UnitCell, x: &Point) -> f64 {
    let q = cell.diag();
    1.0 + 0.5 * (2.0 * PI * x[0] / q[0]).cos() + 0.3 * (2.0 * PI * x[1] / q[1]).sin()
}

/// Jump-check density on the boundary; heat densities grow linearly from zero.
pub type TestDensity = Box<dyn Fn(f64, &SurfacePoint) -> [Complex64; 3] + Sync>;

pub fn test_density(expr: Expression, kind: KernelKind, sphere: bool) -> anyhow::Result<TestDensity> {
    let vector = kind == KernelKind::Lame;
    let time = move |t: f64| if kind == KernelKind::Heat { t } else { 1.0 };
    Ok(match expr {
        Expression::Zero => Box::new(|_, _| [c(0.0); 3]),
        Expression::One => Box::new(move |t, _| [c(time(t)), c(if vector { time(t) } else { 0.0 }), c(0.0)]),
        Expression::Smooth if sphere => Box::new(move |t, p| {
            let u = p.normal;
            if vector {
                [c(u[2]), c(u[0] * u[1]), c(1.0 + u[1])]
            } else {
                [c(time(t) * (1.0 + u[2] + u[0] * u[1])), c(0.0), c(0.0)]
            }
        }),
        Expression::Smooth => Box::new(move |t, p| {
            let s = p.param[0];
            if vector {
                [c(s.cos()), c(0.5 + 0.5 * (2.0 * s).sin()), c(0.0)]
            } else {
                [c(time(t) * (1.0 + 0.5 * s.cos() + 0.3 * (2.0 * s).sin())), c(0.0), c(0.0)]
            }
        }),
        other => bail!("expression {other:?} does not define a test density"),
    })
}

/// Sphere data for the limit problem, as a function of the unit normal.
pub fn reference_data(spec: &DataSpec, g: &BoundaryGeometry) -> anyhow::Result<Vec<Complex64>> {
    Ok(match spec.expression {
        Expression::One => vec![c(1.0); g.len()],
        Expression::Zero => vec![c(0.0); g.len()],
        Expression::Smooth => g.normals().iter().map(|u| c(1.0 + u[2] + u[0] * u[1])).collect(),
        other => bail!("expression {other:?} is not available on the reference sphere"),
    })
}

fn charges(spec: &DataSpec) -> Vec<f64> {
    if spec.charges.is_empty() {
        vec![1.0; spec.sources.len()]
    } else {
        spec.charges.clone()
    }
}

/// A stationary field `x -> value` and whether it is an exact exterior solution.
pub struct Field {
    pub eval: Box<dyn Fn(&Point) -> anyhow::Result<Complex64> + Sync>,
    pub exact: bool,
}

pub fn stationary_field(spec: &DataSpec, kf: &KernelFamily) -> anyhow::Result<Field> {
    let cell = kf.cell().clone();
    Ok(match spec.expression {
        Expression::One => Field {
            eval: Box::new(|_| Ok(c(1.0))),
            exact: kf.kind() == KernelKind::Laplace,
        },
        Expression::Zero => Field {
            eval: Box::new(|_| Ok(c(0.0))),
            exact: true,
        },
        Expression::Smooth => Field {
            eval: Box::new(move |x| Ok(c(smooth_field(&cell, x)))),
            exact: false,
        },
        Expression::Sources => {
            let q = charges(spec);
            if kf.kind() == KernelKind::Laplace && q.iter().sum::<f64>().abs() > 1e-12 {
                bail!("Laplace sources must have zero total charge to give a periodic harmonic field");
            }
            let src: Vec<Point> = spec.sources.iter().map(|p| point(p)).collect();
            let kf = kf.clone();
            Field {
                eval: Box::new(move |x| {
                    let mut acc = c(0.0);
                    for (p, w) in src.iter().zip(&q) {
                        let d = sub(x, p);
                        let v = match kf.kind() {
                            KernelKind::Laplace => c(kf.laplace_green(&d)?),
                            KernelKind::Helmholtz => kf.helmholtz_green(&d)?,
                            k => bail!("sources are not available for {}", k.name()),
                        };
                        acc += v * *w;
                    }
                    Ok(acc)
                }),
                exact: true,
            }
        }
        Expression::File => bail!("file data has no field representation"),
    })
}

/// Heat data `f(t, x)` and whether it is an exact exterior solution.
pub struct HeatField {
    pub eval: Box<dyn Fn(f64, &Point) -> f64 + Sync>,
    pub exact: bool,
}

pub fn heat_field(spec: &DataSpec, cell: &UnitCell) -> anyhow::Result<HeatField> {
    let cell = cell.clone();
    Ok(match spec.expression {
        Expression::Zero => HeatField {
            eval: Box::new(|_, _| 0.0),
            exact: true,
        },
        Expression::One => HeatField {
            eval: Box::new(|t, _| t),
            exact: false,
        },
        Expression::Smooth => HeatField {
            eval: Box::new(move |t, x| t * smooth_field(&cell, x)),
            exact: false,
        },
        Expression::Sources => {
            let q = charges(spec);
            let src: Vec<Point> = spec.sources.iter().map(|p| point(p)).collect();
            HeatField {
                eval: Box::new(move |t, x| {
                    src.iter()
                        .zip(&q)
                        .map(|(p, w)| w * heat_green(&cell, t, &sub(x, p), HeatRepresentation::Auto).unwrap_or(f64::NAN))
                        .sum()
                }),
                exact: true,
            }
        }
        Expression::File => bail!("file data is only read by solve"),
    })
}

/// Numbers from a text file: one record per non-empty line, `#` starts a comment.
pub fn read_records(path: &str) -> anyhow::Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading data file {path}"))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let rec = line
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("{path}:{}: not a number list", i + 1))?;
        out.push(rec);
    }
    Ok(out)
}
