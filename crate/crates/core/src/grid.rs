//! One-dimensional grids, finite-difference stencils, model potentials,
//! the 1D Poisson solve and the plane-wave basis used on periodic grids.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::{BandedSymmetric, Csr};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

/// Uniform grid centred on the origin: `x_i = (i - (n-1)/2) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    n: usize,
    dx: f64,
    boundary: Boundary,
}

impl Grid1D {
    pub fn new(n_points: usize, spacing: f64, boundary: Boundary) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 points, got {n_points}")));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        Ok(Self {
            n: n_points,
            dx: spacing,
            boundary,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.dx
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - 0.5 * (self.n as f64 - 1.0)) * self.dx
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn x_min(&self) -> f64 {
        self.x(0)
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    /// Period of a periodic grid, `n dx`.
    pub fn period(&self) -> f64 {
        self.n as f64 * self.dx
    }

    /// Centred reciprocal integers `j`; `k_j = 2 pi j / (n dx)`.
    pub fn k_indices(&self) -> Vec<i64> {
        let n = self.n as i64;
        let lo = -(n / 2);
        (lo..lo + n).collect()
    }

    pub fn k_points(&self) -> Vec<f64> {
        let l = self.period();
        self.k_indices().iter().map(|&j| 2.0 * PI * j as f64 / l).collect()
    }

    /// Trapezoid-free grid integral `dx Σ f`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.dx * f.iter().sum::<f64>()
    }

    pub fn require_dirichlet(&self, what: &str) -> Result<()> {
        if self.is_periodic() {
            Err(Error::BoundaryMismatch(format!("{what} needs a dirichlet grid")))
        } else {
            Ok(())
        }
    }

    pub fn require_periodic(&self, what: &str) -> Result<()> {
        if self.is_periodic() {
            Ok(())
        } else {
            Err(Error::BoundaryMismatch(format!("{what} needs a periodic grid")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FdOrder {
    Second,
    #[default]
    Fourth,
}

impl FdOrder {
    pub fn as_usize(self) -> usize {
        match self {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }

    pub fn from_usize(order: usize) -> Result<Self> {
        match order {
            2 => Ok(FdOrder::Second),
            4 => Ok(FdOrder::Fourth),
            o => Err(Error::InvalidParameter(format!("finite-difference order {o} not in {{2, 4}}"))),
        }
    }
}

/// Central stencil weights `c_0, c_1, ...` for offsets `0, ±1, ...`, before
/// division by `dx^2` (Laplacian) or `dx` (first derivative, antisymmetric:
/// the weight of `-d` is `-c_d`).
#[derive(Debug, Clone, PartialEq)]
pub struct FdStencil {
    pub order: FdOrder,
    pub coefficients: Vec<f64>,
}

impl FdStencil {
    pub fn laplacian(order: FdOrder) -> Self {
        let coefficients = match order {
            FdOrder::Second => vec![-2.0, 1.0],
            FdOrder::Fourth => vec![-30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
        };
        Self { order, coefficients }
    }

    pub fn first_derivative(order: FdOrder) -> Self {
        let coefficients = match order {
            FdOrder::Second => vec![0.0, 0.5],
            FdOrder::Fourth => vec![0.0, 8.0 / 12.0, -1.0 / 12.0],
        };
        Self { order, coefficients }
    }

    pub fn half_width(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Symbol of the Laplacian stencil at wavevector `k`: the discrete `-k^2`.
    pub fn laplacian_symbol(&self, k: f64, dx: f64) -> f64 {
        let mut s = self.coefficients[0];
        for (d, c) in self.coefficients.iter().enumerate().skip(1) {
            s += 2.0 * c * libm::cos(k * dx * d as f64);
        }
        s / (dx * dx)
    }
}

fn stencil_matrix(grid: &Grid1D, coeffs: &[f64], antisymmetric: bool, scale: f64) -> Csr {
    let n = grid.n_points();
    let mut t = Vec::with_capacity(n * (2 * coeffs.len() - 1));
    for i in 0..n {
        if coeffs[0] != 0.0 {
            t.push((i, i, coeffs[0] * scale));
        }
        for (d, &c) in coeffs.iter().enumerate().skip(1) {
            let cm = if antisymmetric { -c } else { c };
            for (off, w) in [(d as isize, c), (-(d as isize), cm)] {
                let j = i as isize + off;
                let j = if grid.is_periodic() {
                    j.rem_euclid(n as isize)
                } else if j < 0 || j >= n as isize {
                    continue;
                } else {
                    j
                };
                t.push((i, j as usize, w * scale));
            }
        }
    }
    Csr::from_triplets(n, n, t).expect("stencil entries are in range")
}

/// Finite-difference Laplacian `∂²` with the grid's boundary treatment.
pub fn laplacian(grid: &Grid1D, order: FdOrder) -> Csr {
    let s = FdStencil::laplacian(order);
    stencil_matrix(grid, &s.coefficients, false, 1.0 / (grid.spacing() * grid.spacing()))
}

/// Antisymmetric central first derivative `∂`.
pub fn first_derivative(grid: &Grid1D, order: FdOrder) -> Csr {
    let s = FdStencil::first_derivative(order);
    stencil_matrix(grid, &s.coefficients, true, 1.0 / grid.spacing())
}

/// `-½ s ∂² + diag(v)` as a banded matrix on a dirichlet grid.
pub fn kinetic_plus_potential_banded(
    grid: &Grid1D,
    order: FdOrder,
    kinetic_scale: f64,
    v: &[f64],
) -> Result<BandedSymmetric> {
    grid.require_dirichlet("banded matter Hamiltonian")?;
    let s = FdStencil::laplacian(order);
    let n = grid.n_points();
    let h2 = grid.spacing() * grid.spacing();
    let mut m = BandedSymmetric::zeros(n, s.half_width());
    for i in 0..n {
        m.add(i, i, -0.5 * kinetic_scale * s.coefficients[0] / h2 + v[i])?;
        for (d, &c) in s.coefficients.iter().enumerate().skip(1) {
            if i + d < n {
                m.add(i, i + d, -0.5 * kinetic_scale * c / h2)?;
            }
        }
    }
    Ok(m)
}

/// Applies a sparse operator to a grid function.
pub fn apply(op: &Csr, f: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; f.len()];
    op.mul_add(f, 1.0, &mut y);
    y
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    SoftCoulomb { softening: f64 },
    Zero,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential1D {
    pub values: Vec<f64>,
    pub kind: PotentialKind,
}

impl Potential1D {
    /// `-1/sqrt(x² + ξ²)` sampled on the grid.
    pub fn soft_coulomb(grid: &Grid1D, softening: f64) -> Result<Self> {
        if !(softening > 0.0) {
            return Err(Error::InvalidParameter(format!("softening must be positive, got {softening}")));
        }
        let values = grid
            .coordinates()
            .iter()
            .map(|&x| soft_coulomb_value(x, softening))
            .collect();
        Ok(Self {
            values,
            kind: PotentialKind::SoftCoulomb { softening },
        })
    }

    pub fn zero(grid: &Grid1D) -> Self {
        Self {
            values: vec![0.0; grid.n_points()],
            kind: PotentialKind::Zero,
        }
    }

    pub fn tabulated(grid: &Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidParameter(format!(
                "potential has {} values for {} grid points",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self {
            values,
            kind: PotentialKind::Tabulated,
        })
    }

    /// Value at an arbitrary coordinate for analytic kinds.
    pub fn eval(&self, x: f64) -> Option<f64> {
        match self.kind {
            PotentialKind::SoftCoulomb { softening } => Some(soft_coulomb_value(x, softening)),
            PotentialKind::Zero => Some(0.0),
            PotentialKind::Tabulated => None,
        }
    }
}

#[inline]
pub fn soft_coulomb_value(x: f64, softening: f64) -> f64 {
    -1.0 / libm::sqrt(x * x + softening * softening)
}

/// Solves `∂² v = -f` on a dirichlet grid with `v = 0` at both end points.
///
/// The result is the exact inverse of the second-order stencil on the
/// interior points: a double cumulative sum plus the linear term fixed by the
/// right boundary value. Source values at the two end points are not used.
pub fn poisson_solve_1d(source: &[f64], grid: &Grid1D) -> Result<Vec<f64>> {
    grid.require_dirichlet("poisson_solve_1d")?;
    let n = grid.n_points();
    if source.len() != n {
        return Err(Error::InvalidParameter("source length differs from grid".into()));
    }
    let h2 = grid.spacing() * grid.spacing();
    // particular solution with v_0 = v_1 = 0
    let mut v = vec![0.0; n];
    for i in 1..n - 1 {
        v[i + 1] = 2.0 * v[i] - v[i - 1] - h2 * source[i];
    }
    let slope = v[n - 1] / (n - 1) as f64;
    for (i, vi) in v.iter_mut().enumerate() {
        *vi -= slope * i as f64;
    }
    Ok(v)
}

/// Derivative of order `m` via the discrete Fourier transform, treating the
/// samples as one period.
pub fn spectral_derivative(f: &[f64], dx: f64, m: u32) -> Vec<f64> {
    let n = f.len();
    let l = n as f64 * dx;
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    let tw: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / n as f64;
            (libm::cos(a), libm::sin(a))
        })
        .collect();
    for k in 0..n {
        let (mut sr, mut si) = (0.0, 0.0);
        for (j, &fj) in f.iter().enumerate() {
            let (c, s) = tw[(k * j) % n];
            sr += fj * c;
            si -= fj * s;
        }
        re[k] = sr;
        im[k] = si;
    }
    for k in 0..n {
        let kk = if 2 * k < n {
            k as f64
        } else if 2 * k == n {
            // Nyquist mode carries no odd derivative information
            if m % 2 == 1 {
                0.0
            } else {
                k as f64
            }
        } else {
            k as f64 - n as f64
        };
        let q = 2.0 * PI * kk / l;
        // (i q)^m
        let mag = libm::pow(q, m as f64);
        let (fr, fi) = match m % 4 {
            0 => (mag, 0.0),
            1 => (0.0, mag),
            2 => (-mag, 0.0),
            _ => (0.0, -mag),
        };
        let (a, b) = (re[k], im[k]);
        re[k] = a * fr - b * fi;
        im[k] = a * fi + b * fr;
    }
    let mut out = vec![0.0; n];
    for (j, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for k in 0..n {
            let (c, sn) = tw[(k * j) % n];
            s += re[k] * c - im[k] * sn;
        }
        *o = s / n as f64;
    }
    out
}

/// Plane waves `e^{ikx}/sqrt(L)` on the k-points of a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveBasis {
    indices: Vec<i64>,
    k: Vec<f64>,
    period: f64,
}

impl PlaneWaveBasis {
    pub fn new(grid: &Grid1D) -> Result<Self> {
        grid.require_periodic("plane-wave basis")?;
        Ok(Self {
            indices: grid.k_indices(),
            k: grid.k_points(),
            period: grid.period(),
        })
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Position of the `k = 0` plane wave.
    pub fn zero_index(&self) -> usize {
        self.indices.iter().position(|&j| j == 0).expect("centred k set contains 0")
    }

    /// Real Fourier coefficients `v̂(2π m / L)` for `m = -(N-1)..=(N-1)`,
    /// returned with offset `N-1`. Analytic potentials are integrated with an
    /// oversampled periodic trapezoid rule, tabulated ones use the samples.
    pub fn potential_fourier(&self, grid: &Grid1D, v: &Potential1D) -> Result<Vec<f64>> {
        let nk = self.len() as i64;
        let l = self.period;
        let (xs, vs): (Vec<f64>, Vec<f64>) = match v.kind {
            PotentialKind::Tabulated => (grid.coordinates(), v.values.clone()),
            _ => {
                let over = 64usize;
                let m = grid.n_points() * over;
                let h = l / m as f64;
                let xs: Vec<f64> = (0..m).map(|i| -0.5 * l + (i as f64 + 0.5) * h).collect();
                let vs = xs.iter().map(|&x| v.eval(x).unwrap_or(0.0)).collect();
                (xs, vs)
            }
        };
        let weight = 1.0 / xs.len() as f64;
        let scale = vs.iter().fold(0.0_f64, |a, b| a.max(libm::fabs(*b))).max(1e-300);
        let mut out = Vec::with_capacity((2 * nk - 1) as usize);
        for m in -(nk - 1)..=(nk - 1) {
            let q = 2.0 * PI * m as f64 / l;
            let (mut c, mut s) = (0.0, 0.0);
            for (&x, &vx) in xs.iter().zip(&vs) {
                c += vx * libm::cos(q * x);
                s += vx * libm::sin(q * x);
            }
            if libm::fabs(s * weight) > 1e-10 * scale {
                return Err(Error::Unsupported(
                    "potential is not even about the origin; complex Fourier coefficients are not supported".into(),
                ));
            }
            out.push(c * weight);
        }
        Ok(out)
    }
}
