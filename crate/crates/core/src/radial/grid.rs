use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Node-mapping law `r = r(s)`; both maps are odd in `s`, so midpoint
/// sums of even integrands converge spectrally at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stretch {
    /// `r = a·sinh(s)`.
    Geometric { scale: f64 },
    /// `r = A·ξ/(1−ξ²)` on `ξ ∈ (−1, 1)`.
    Algebraic { scale: f64 },
}

impl Default for Stretch {
    fn default() -> Self {
        Stretch::Geometric { scale: 0.5 }
    }
}

impl Stretch {
    pub fn scale(&self) -> f64 {
        match *self {
            Stretch::Geometric { scale } | Stretch::Algebraic { scale } => scale,
        }
    }

    pub fn r(&self, s: f64) -> f64 {
        match *self {
            Stretch::Geometric { scale } => scale * s.sinh(),
            Stretch::Algebraic { scale } => scale * s / (1.0 - s * s),
        }
    }

    pub fn dr(&self, s: f64) -> f64 {
        match *self {
            Stretch::Geometric { scale } => scale * s.cosh(),
            Stretch::Algebraic { scale } => {
                let q = 1.0 - s * s;
                scale * (1.0 + s * s) / (q * q)
            }
        }
    }

    pub fn d2r(&self, s: f64) -> f64 {
        match *self {
            Stretch::Geometric { scale } => scale * s.sinh(),
            Stretch::Algebraic { scale } => {
                let q = 1.0 - s * s;
                2.0 * scale * s * (3.0 + s * s) / (q * q * q)
            }
        }
    }

    pub fn s(&self, r: f64) -> f64 {
        match *self {
            Stretch::Geometric { scale } => (r / scale).asinh(),
            Stretch::Algebraic { scale } => {
                if r == 0.0 {
                    0.0
                } else {
                    2.0 * r / (scale + (scale * scale + 4.0 * r * r).sqrt())
                }
            }
        }
    }

    fn s_limit(&self) -> f64 {
        match self {
            Stretch::Geometric { .. } => f64::INFINITY,
            Stretch::Algebraic { .. } => 1.0,
        }
    }
}

/// Requested grid parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub r_max: f64,
    pub stretch: Stretch,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n: 4000, r_max: 3.0e5, stretch: Stretch::default() }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<RadialGrid>> {
        make_grid(self.n, self.r_max, self.stretch)
    }
}

/// Cell-centred radial mesh: node `i` sits at `s = (i + ½)h` and owns the
/// cell `[ih, (i+1)h]`, so the last cell ends at `r_end > r_max`.
#[derive(Debug)]
pub struct RadialGrid {
    spec: GridSpec,
    h: f64,
    s: Vec<f64>,
    r: Vec<f64>,
    rs: Vec<f64>,
    w: Vec<f64>,
    ph: Vec<f64>,
    r_ghost: [f64; 3],
    r_end: f64,
}

pub const MIN_NODES: usize = 16;
pub const MIN_RMAX: f64 = 50.0;

pub fn make_grid(n: usize, r_max: f64, stretch: Stretch) -> Result<Arc<RadialGrid>> {
    if n < MIN_NODES {
        return Err(Error::Sizing(format!("n = {n} is below the minimum {MIN_NODES}")));
    }
    if !(r_max >= MIN_RMAX) || !r_max.is_finite() {
        return Err(Error::Sizing(format!("r_max = {r_max} is below the minimum {MIN_RMAX}")));
    }
    if !(stretch.scale() > 0.0) || !stretch.scale().is_finite() {
        return Err(Error::Sizing(format!("stretch scale must be positive, got {}", stretch.scale())));
    }
    let s_max = stretch.s(r_max);
    let h = s_max / (n as f64 - 0.5);
    if (n as f64 + 2.5) * h >= stretch.s_limit() {
        return Err(Error::Sizing(format!(
            "algebraic map cannot host ghost nodes: r_max/scale = {} is too large for n = {n}",
            r_max / stretch.scale()
        )));
    }
    let s: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let mut r: Vec<f64> = s.iter().map(|&x| stretch.r(x)).collect();
    r[n - 1] = r_max;
    let rs: Vec<f64> = s.iter().map(|&x| stretch.dr(x)).collect();
    let w: Vec<f64> = r.iter().zip(&rs).map(|(&ri, &di)| 4.0 * std::f64::consts::PI * ri * ri * di * h).collect();
    let ph: Vec<f64> = (0..=n + 1).map(|j| 1.0 / stretch.dr(j as f64 * h)).collect();
    let r_ghost = [0, 1, 2].map(|k| stretch.r((n as f64 + k as f64 + 0.5) * h));
    let r_end = stretch.r(n as f64 * h);
    for win in r.windows(2) {
        if !(win[1] > win[0]) {
            return Err(Error::Sizing("nodes are not strictly increasing".into()));
        }
    }
    Ok(Arc::new(RadialGrid { spec: GridSpec { n, r_max, stretch }, h, s, r, rs, w, ph, r_ghost, r_end }))
}

impl RadialGrid {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }
    pub fn n(&self) -> usize {
        self.spec.n
    }
    pub fn r_max(&self) -> f64 {
        self.spec.r_max
    }
    pub fn stretch(&self) -> Stretch {
        self.spec.stretch
    }
    /// Spacing in the mapped coordinate.
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn s(&self) -> &[f64] {
        &self.s
    }
    pub fn nodes(&self) -> &[f64] {
        &self.r
    }
    /// `dr/ds` at the nodes.
    pub fn jacobian(&self) -> &[f64] {
        &self.rs
    }
    pub fn weights(&self) -> &[f64] {
        &self.w
    }
    /// `ds/dr` at the half points `s = jh`, `j = 0..=n+1`.
    pub fn flux_weights(&self) -> &[f64] {
        &self.ph
    }
    pub fn ghost_nodes(&self) -> [f64; 3] {
        self.r_ghost
    }
    /// Upper edge of the last quadrature cell.
    pub fn r_end(&self) -> f64 {
        self.r_end
    }
    pub fn s_end(&self) -> f64 {
        self.spec.n as f64 * self.h
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        std::ptr::eq(self, other) || self.spec == other.spec
    }

    /// Local node spacing at `r`.
    pub fn spacing_at(&self, r: f64) -> f64 {
        self.spec.stretch.dr(self.spec.stretch.s(r)) * self.h
    }

    /// Whether `u(μ·)` of a unit-scale profile stays resolved: the core
    /// width `1/μ` keeps twenty nodes (or the grid's own unit-scale
    /// resolution, if coarser), and a dilated field still reaches a hundred
    /// core widths inside the grid.
    pub fn check_scale(&self, mu: f64) -> Result<()> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Resolution(format!("scale factor must be positive, got {mu}")));
        }
        if mu * self.spacing_at(1.0 / mu) > (4.0 * self.spacing_at(1.0)).max(0.05) {
            return Err(Error::Resolution(format!("μ = {mu} compresses the core below the node spacing")));
        }
        if mu * self.r_max() < 100.0 {
            return Err(Error::Resolution(format!("μ = {mu} pushes the profile past r_max")));
        }
        Ok(())
    }

    /// Resample values onto arbitrary radii by six-point Lagrange
    /// interpolation in `s`, using the even reflection at the origin.
    /// Points beyond the last node are handed to `outside`.
    pub fn interpolate(&self, values: &[f64], radii: &[f64], outside: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.n();
        radii
            .iter()
            .map(|&rq| {
                let rq = rq.abs();
                if rq > self.r_max() {
                    return outside(rq);
                }
                let sq = self.spec.stretch.s(rq);
                let x = sq / self.h - 0.5;
                let base = x.floor() as i64;
                let mut start = base - 2;
                if start + 5 > n as i64 - 1 {
                    start = n as i64 - 6;
                }
                let mut acc = 0.0;
                for a in 0..6 {
                    let ka = start + a;
                    let mut l = 1.0;
                    for b in 0..6 {
                        if a != b {
                            let kb = start + b;
                            l *= (x - kb as f64) / (ka - kb) as f64;
                        }
                    }
                    let idx = if ka < 0 { (-ka - 1) as usize } else { ka as usize };
                    acc += l * values[idx];
                }
                acc
            })
            .collect()
    }
}
