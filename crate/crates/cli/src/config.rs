//! Run configuration: TOML schema, defaults and validation.
//!
//! ```toml
//! command = "solve"                  # optional; must match the subcommand
//!
//! [cell]
//! lengths = [1.0, 1.0, 1.0]          # 2 or 3 positive periods
//!
//! [kernel]
//! family = "helmholtz"               # laplace | helmholtz | lame | heat
//! k = 1.0                            # wave number (real part)
//! k_imag = 0.0
//! eta = [0.0, 0.0, 0.0]              # quasi-momentum
//! omega = 0.5                        # Lamé parameter, omega > 1 - 2/n
//! split_factor = 1.0                 # Ewald split relative to the default
//!
//! [geometry]
//! shape = "sphere"                   # circle | ellipse | kite | sphere
//! params = [1.0]
//! center = [0.5, 0.5, 0.5]           # defaults to the cell center
//! resolution = 12                    # nodes N (curves) or order L (spheres)
//!
//! [data]
//! expression = "one"                 # one | zero | smooth | sources | file
//! sources = [[0.6, 0.5, 0.5]]
//! charges = [1.0]
//! file = "data.txt"
//!
//! [controls]                         # see `Controls` for every key
//! [acceptance]                       # see `Thresholds`
//! [[cases]]                          # jump-check suite entries: cell, kernel, geometry
//! ```

use perpot::experiments::EpsilonSweep;
use perpot::geometry::Shape;
use perpot::potentials::JumpOptions;
use perpot::solvers::SolveOptions;
use perpot::{BoundaryGeometry, Complex64, FieldBasis, KernelFamily, LameParams, Point, UnitCell, WaveParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    EvalGreen,
    JumpCheck,
    Solve,
    Asymptotics,
    ShapeSweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EvalGreen => "eval-green",
            Command::JumpCheck => "jump-check",
            Command::Solve => "solve",
            Command::Asymptotics => "asymptotics",
            Command::ShapeSweep => "shape-sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Laplace,
    Helmholtz,
    Lame,
    Heat,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    #[serde(default)]
    pub data: DataSpec,
    #[serde(default)]
    pub controls: Controls,
    #[serde(default)]
    pub acceptance: Thresholds,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cases: Vec<Case>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub lengths: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub family: Family,
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default)]
    pub k_imag: f64,
    #[serde(default)]
    pub eta: [f64; 3],
    #[serde(default = "half")]
    pub omega: f64,
    #[serde(default = "one")]
    pub split_factor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub shape: String,
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    pub resolution: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub cell: CellSpec,
    pub kernel: KernelSpec,
    pub geometry: GeometrySpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expression {
    One,
    Zero,
    Smooth,
    Sources,
    File,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSpec {
    pub expression: Expression,
    pub sources: Vec<Vec<f64>>,
    /// One per source; all ones when empty.
    pub charges: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            expression: Expression::Smooth,
            sources: Vec::new(),
            charges: Vec::new(),
            file: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Controls {
    /// Relative residual accepted from linear solves.
    pub tolerance: f64,
    pub max_condition: f64,
    /// eval-green evaluation points; solve probes.
    pub points: Vec<Vec<f64>>,
    /// Heat evaluation time for eval-green.
    pub time: f64,
    pub epsilons: Vec<f64>,
    pub fit_degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xbar: Option<[f64; 3]>,
    /// Explicit shape-sweep grid; when empty, `j * s_step` for `|j| <= s_half_count`.
    pub s_grid: Vec<f64>,
    pub s_step: f64,
    pub s_half_count: usize,
    pub direction: FieldBasis,
    /// Shape-sweep probe times, one per point; the horizon when empty.
    pub probe_times: Vec<f64>,
    pub horizon: f64,
    pub steps: usize,
    /// Jump-check approach distances; automatic when empty.
    pub distances: Vec<f64>,
    pub targets: Vec<usize>,
    pub panel_order: usize,
    pub azimuth_points: usize,
}

impl Default for Controls {
    fn default() -> Self {
        let s = SolveOptions::default();
        let j = JumpOptions::default();
        Self {
            tolerance: s.tolerance,
            max_condition: s.max_condition,
            points: Vec::new(),
            time: 0.1,
            epsilons: vec![0.1, 0.05, 0.025, 0.0125],
            fit_degree: 2,
            xbar: None,
            s_grid: Vec::new(),
            s_step: 0.01,
            s_half_count: 4,
            direction: FieldBasis::Translation { direction: [1.0, 0.0] },
            probe_times: Vec::new(),
            horizon: 0.25,
            steps: 64,
            distances: j.distances,
            targets: vec![0],
            panel_order: j.panel_order,
            azimuth_points: j.azimuth_points,
        }
    }
}

/// Pass thresholds; a run exits nonzero when any check misses its threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// eval-green: disagreement between the two representations of each kernel.
    pub max_rep_disagreement: f64,
    pub max_jump_error: f64,
    pub max_heat_jump_error: f64,
    /// solve: relative probe error against a manufactured solution.
    pub max_solution_error: f64,
    pub max_relative_gap: f64,
    pub ratio_range: [f64; 2],
    /// shape-sweep: largest accepted `|ratio - 1|` of the difference estimates.
    pub max_ratio_deviation: f64,
    pub max_periodicity_error: f64,
    /// shape-sweep: spread of probe values when all grid points coincide.
    pub max_identity_spread: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            max_rep_disagreement: 1e-9,
            max_jump_error: 1e-5,
            max_heat_jump_error: 1e-3,
            max_solution_error: 1e-6,
            max_relative_gap: 1e-3,
            ratio_range: [1.5, 2.5],
            max_ratio_deviation: 0.1,
            max_periodicity_error: 1e-8,
            max_identity_spread: 1e-12,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

/// Outcome of [`RunConfig::validate`].
#[derive(Debug, Default)]
pub struct Validation {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

/// Parses TOML text into a config. Unknown or missing keys are reported by name.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<String>> {
    toml::from_str(text).map_err(|e| vec![e.message().to_string() + &location(text, e.span())])
}

fn location(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    span.map_or(String::new(), |s| {
        let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
        format!(" (line {line})")
    })
}

impl CellSpec {
    pub fn build(&self) -> perpot::Result<UnitCell> {
        UnitCell::new(&self.lengths)
    }
}

impl KernelSpec {
    pub fn build(&self, cell: &UnitCell) -> perpot::Result<KernelFamily> {
        let kf = match self.family {
            Family::Laplace => KernelFamily::laplace(cell.clone()),
            Family::Heat => KernelFamily::heat(cell.clone()),
            Family::Helmholtz => {
                KernelFamily::helmholtz(cell.clone(), WaveParams::new(Complex64::new(self.k, self.k_imag), self.eta))?
            }
            Family::Lame => KernelFamily::lame(cell.clone(), LameParams::new(self.omega, cell.dim())?)?,
        };
        if self.split_factor != 1.0 && self.family != Family::Heat {
            return kf.with_split_factor(self.split_factor);
        }
        Ok(kf)
    }
}

/// Pads a coordinate list to a 3-vector.
pub fn point(v: &[f64]) -> Point {
    let mut p = [0.0; 3];
    p[..v.len().min(3)].copy_from_slice(&v[..v.len().min(3)]);
    p
}

impl GeometrySpec {
    pub fn shape(&self) -> perpot::Result<Shape> {
        Shape::from_name(&self.shape, &self.params)
    }

    pub fn center(&self, cell: &UnitCell) -> Point {
        self.center.as_deref().map(point).unwrap_or_else(|| cell.center())
    }

    pub fn build(&self, cell: &UnitCell) -> perpot::Result<BoundaryGeometry> {
        let g = self.shape()?.discretize(self.center(cell), self.resolution)?;
        g.check_inside(cell)?;
        Ok(g)
    }
}

impl RunConfig {
    /// The single (cell, kernel, geometry) case, or the suite in `cases`.
    pub fn cases(&self) -> Vec<Case> {
        if !self.cases.is_empty() {
            return self.cases.clone();
        }
        match (&self.cell, &self.kernel, &self.geometry) {
            (Some(c), Some(k), Some(g)) => vec![Case {
                cell: c.clone(),
                kernel: k.clone(),
                geometry: g.clone(),
            }],
            _ => Vec::new(),
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tolerance: self.controls.tolerance,
            max_condition: self.controls.max_condition,
        }
    }

    pub fn jump_options(&self) -> JumpOptions {
        JumpOptions {
            distances: self.controls.distances.clone(),
            targets: self.controls.targets.clone(),
            panel_order: self.controls.panel_order,
            azimuth_points: self.controls.azimuth_points,
            horizon: self.controls.horizon,
            steps: self.controls.steps,
        }
    }

    pub fn epsilon_sweep(&self, p: Point) -> EpsilonSweep {
        EpsilonSweep {
            p,
            xbar: self.controls.xbar.unwrap_or([0.0; 3]),
            epsilons: self.controls.epsilons.clone(),
            fit_degree: self.controls.fit_degree,
        }
    }

    pub fn s_grid(&self) -> Vec<f64> {
        if !self.controls.s_grid.is_empty() {
            return self.controls.s_grid.clone();
        }
        let j = self.controls.s_half_count as i64;
        (-j..=j).map(|i| i as f64 * self.controls.s_step).collect()
    }

    /// Checks everything that can be checked before running, collecting all problems.
    pub fn validate(&self, command: Command) -> Validation {
        let mut v = Validation::default();
        let mut err = Vec::new();
        if let Some(c) = self.command {
            if c != command {
                err.push(format!("config is for '{}' but '{}' was requested", c.name(), command.name()));
            }
        }
        let cases = self.cases();
        if command == Command::EvalGreen {
            if self.cell.is_none() {
                err.push("missing required key 'cell'".into());
            }
            if self.kernel.is_none() {
                err.push("missing required key 'kernel'".into());
            }
        } else if cases.is_empty() {
            for (key, present) in [
                ("cell", self.cell.is_some()),
                ("kernel", self.kernel.is_some()),
                ("geometry", self.geometry.is_some()),
            ] {
                if !present {
                    err.push(format!("missing required key '{key}'"));
                }
            }
        }
        if !self.cases.is_empty() && command != Command::JumpCheck {
            err.push("'cases' is only used by jump-check".into());
        }
        v.errors.append(&mut err);
        let mut dims = Vec::new();
        let checked: Vec<(Option<&CellSpec>, Option<&KernelSpec>, Option<&GeometrySpec>)> = if self.cases.is_empty() {
            vec![(self.cell.as_ref(), self.kernel.as_ref(), self.geometry.as_ref())]
        } else {
            self.cases.iter().map(|c| (Some(&c.cell), Some(&c.kernel), Some(&c.geometry))).collect()
        };
        for (i, (cell, kernel, geom)) in checked.into_iter().enumerate() {
            let tag = if self.cases.is_empty() { String::new() } else { format!("cases[{i}].") };
            let Some(cell) = cell else { continue };
            let built = match cell.build() {
                Ok(c) => c,
                Err(e) => {
                    v.errors.push(format!("{tag}cell.lengths: {e}"));
                    continue;
                }
            };
            let n = built.dim();
            dims.push(n);
            if let Some(k) = kernel {
                validate_kernel(k, &built, command, &tag, &mut v);
            }
            if let (Some(g), true) = (geom, command != Command::EvalGreen) {
                validate_geometry(g, &built, &tag, &mut v.errors);
            }
        }
        self.validate_controls(command, dims.first().copied().unwrap_or(3), &mut v);
        v
    }

    fn validate_controls(&self, command: Command, dim: usize, v: &mut Validation) {
        let c = &self.controls;
        let err = &mut v.errors;
        if !(c.tolerance > 0.0) {
            err.push("controls.tolerance must be positive".into());
        }
        if !(c.max_condition > 1.0) {
            err.push("controls.max_condition must exceed 1".into());
        }
        if !(c.horizon > 0.0 && c.horizon.is_finite()) {
            err.push("controls.horizon must be positive".into());
        }
        if c.steps == 0 {
            err.push("controls.steps must be at least 1".into());
        }
        for (i, p) in c.points.iter().enumerate() {
            if p.len() != dim {
                err.push(format!("controls.points[{i}] has {} coordinates, the cell has {dim}", p.len()));
            }
        }
        match command {
            Command::EvalGreen if c.points.is_empty() => err.push("controls.points must list at least one point".into()),
            Command::EvalGreen if !(c.time > 0.0) => err.push("controls.time must be positive".into()),
            Command::Asymptotics => {
                if c.xbar.is_none() {
                    err.push("missing required key 'controls.xbar'".into());
                }
                if c.epsilons.iter().any(|&e| !(e > 0.0)) || c.epsilons.windows(2).any(|w| w[1] >= w[0]) {
                    err.push("controls.epsilons must be positive and strictly decreasing".into());
                }
                if c.fit_degree > 3 {
                    err.push("controls.fit_degree must be at most 3".into());
                } else if c.epsilons.len() < c.fit_degree + 2 {
                    err.push(format!("controls.epsilons needs at least {} entries for a degree {} fit", c.fit_degree + 2, c.fit_degree));
                }
            }
            Command::ShapeSweep => {
                if c.points.is_empty() {
                    err.push("controls.points must list at least one probe".into());
                }
                if !c.probe_times.is_empty() && c.probe_times.len() != c.points.len() {
                    err.push("controls.probe_times must match controls.points in length".into());
                }
                if c.probe_times.iter().any(|&t| !(t > 0.0 && t <= c.horizon)) {
                    err.push("controls.probe_times must lie in (0, horizon]".into());
                }
                if c.s_grid.is_empty() && !(c.s_step > 0.0) {
                    err.push("controls.s_step must be positive".into());
                }
            }
            _ => {}
        }
        if command == Command::JumpCheck && c.targets.is_empty() {
            err.push("controls.targets must list at least one node".into());
        }
        let d = &self.data;
        let uses_data = matches!(command, Command::Solve | Command::Asymptotics | Command::ShapeSweep | Command::JumpCheck);
        if uses_data {
            match d.expression {
                Expression::Sources => {
                    if d.sources.is_empty() {
                        err.push("data.sources must be given for expression 'sources'".into());
                    }
                    for (i, p) in d.sources.iter().enumerate() {
                        if p.len() != dim {
                            err.push(format!("data.sources[{i}] has {} coordinates, the cell has {dim}", p.len()));
                        }
                    }
                    if !d.charges.is_empty() && d.charges.len() != d.sources.len() {
                        err.push("data.charges must match data.sources in length".into());
                    }
                    if command == Command::JumpCheck || command == Command::Asymptotics {
                        err.push(format!("expression 'sources' is not available for {}", command.name()));
                    }
                }
                Expression::File => {
                    if d.file.is_none() {
                        err.push("data.file must be given for expression 'file'".into());
                    }
                    if command != Command::Solve {
                        err.push(format!("expression 'file' is not available for {}", command.name()));
                    }
                }
                _ => {}
            }
        }
        let a = &self.acceptance;
        if !(a.ratio_range[0] < a.ratio_range[1]) {
            err.push("acceptance.ratio_range must be increasing".into());
        }
    }
}

fn validate_kernel(k: &KernelSpec, cell: &UnitCell, command: Command, tag: &str, v: &mut Validation) {
    let n = cell.dim();
    if k.family == Family::Lame && !(k.omega > 1.0 - 2.0 / n as f64) {
        v.errors.push(format!("{tag}kernel.omega = {} violates omega > 1 - 2/{n}", k.omega));
    }
    if !(k.split_factor > 0.0) {
        v.errors.push(format!("{tag}kernel.split_factor must be positive"));
    }
    if k.family == Family::Helmholtz {
        if n != 3 {
            v.errors.push(format!("{tag}kernel.family 'helmholtz' needs a three-dimensional cell"));
            return;
        }
        let wave = WaveParams::new(Complex64::new(k.k, k.k_imag), k.eta);
        let res = cell.resonant_set(&wave, None);
        if !res.is_empty() {
            v.warnings.push(format!("{tag}kernel: k is resonant ({} lattice modes); solvers will refuse it", res.len()));
        }
    }
    let needs = match command {
        Command::Solve => Some(&[Family::Laplace, Family::Helmholtz, Family::Heat][..]),
        Command::Asymptotics => Some(&[Family::Helmholtz][..]),
        Command::ShapeSweep => Some(&[Family::Heat][..]),
        _ => None,
    };
    if let Some(ok) = needs {
        if !ok.contains(&k.family) {
            v.errors.push(format!("{tag}kernel.family {:?} is not supported by {}", k.family, command.name()));
        }
    }
    if k.family == Family::Heat && n != 2 && command != Command::EvalGreen {
        v.errors.push(format!("{tag}heat boundary problems need a two-dimensional cell"));
    }
}

fn validate_geometry(g: &GeometrySpec, cell: &UnitCell, tag: &str, err: &mut Vec<String>) {
    match g.shape() {
        Err(e) => err.push(format!("{tag}geometry: {e}")),
        Ok(shape) => {
            let want = if matches!(shape, Shape::Sphere { .. }) { 3 } else { 2 };
            if want != cell.dim() {
                err.push(format!("{tag}geometry.shape '{}' needs a {want}-dimensional cell", g.shape));
            }
        }
    }
    if g.resolution < 4 {
        err.push(format!("{tag}geometry.resolution must be at least 4"));
    }
    if let Some(c) = &g.center {
        if c.len() != cell.dim() {
            err.push(format!("{tag}geometry.center has {} coordinates, the cell has {}", c.len(), cell.dim()));
        } else if !cell.contains(&point(c)) {
            err.push(format!("{tag}geometry.center lies outside the cell"));
        }
    }
}
