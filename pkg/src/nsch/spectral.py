"""Fourier representation of periodic fields on the square torus [0, 2pi)^2.

Fields are stored by their Fourier coefficients under the convention

    fhat(n) = (2pi)^-2 * integral f(x) exp(-i n.x) dx,

so that f(x) = sum_n fhat(n) exp(i n.x) with integer wavevectors
n = (n1, n2), |n_i| <= N/2.  On the N x N collocation grid this makes the
forward transform ``fft2(values) / N**2``.  Real fields satisfy Hermitian
symmetry fhat(-n) = conj(fhat(n)), which every operator here preserves.

Conventions for the self-conjugate Nyquist modes (|n_i| = N/2, stored at a
single array index):

* even-order operators (Laplacian, bilaplacian, semigroup, Sobolev
  weights, mode cutoffs) use the magnitude N/2;
* odd-order derivatives annihilate the Nyquist component, since
  multiplying a self-conjugate coefficient by i*n would produce a
  non-real field;
* the Leray projector treats a Nyquist component of the wavevector as
  zero, consistently with the derivative convention, so that projected
  fields are exactly divergence-free as measured by those derivatives;
* when a spectrum is resampled to a finer grid the Nyquist coefficient
  is split evenly between +N/2 and -N/2 (the trigonometric
  interpolant of minimal norm).

All norm formulas carry their (2pi)^2 factors explicitly, e.g. Parseval:
||f||_L2^2 = (2pi)^2 sum_n |fhat(n)|^2.

Operations never mutate their inputs; coefficient arrays are marked
read-only on construction.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError, PreconditionError

TWO_PI = 2.0 * np.pi


class Grid:
    """Uniform N x N collocation grid with cached wavevector tables.

    ``dealias_cut`` is the largest |n_i| retained after physical-space
    products (2/3 rule by default: floor(N/3)).
    """

    def __init__(self, n: int, dealias_cut: int | None = None):
        n = int(n)
        if n < 8 or n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 8, got {n}")
        if dealias_cut is None:
            dealias_cut = n // 3
        dealias_cut = int(dealias_cut)
        if not 1 <= dealias_cut <= n // 2:
            raise ValueError(f"dealias_cut must lie in [1, N/2], got {dealias_cut}")
        self.n = n
        self.dealias_cut = dealias_cut

        k = np.fft.fftfreq(n, d=1.0 / n)  # integers; Nyquist slot holds -N/2
        self.k1 = k[:, None] * np.ones((1, n))
        self.k2 = np.ones((n, 1)) * k[None, :]
        self.k_sq = self.k1**2 + self.k2**2
        with np.errstate(divide="ignore"):
            inv = np.where(self.k_sq > 0, 1.0 / np.where(self.k_sq > 0, self.k_sq, 1.0), 0.0)
        self.inv_k_sq = inv

        # derivative wavevectors: Nyquist component zeroed (see module doc)
        d = k.copy()
        d[n // 2] = 0.0
        self.d1 = d[:, None] * np.ones((1, n))
        self.d2 = np.ones((n, 1)) * d[None, :]
        self.d_sq = self.d1**2 + self.d2**2
        with np.errstate(divide="ignore"):
            self.inv_d_sq = np.where(self.d_sq > 0, 1.0 / np.where(self.d_sq > 0, self.d_sq, 1.0), 0.0)

        self.dealias_mask = (np.abs(self.k1) <= dealias_cut) & (np.abs(self.k2) <= dealias_cut)

        x = np.arange(n) * (TWO_PI / n)
        self.x1 = x[:, None] * np.ones((1, n))
        self.x2 = np.ones((n, 1)) * x[None, :]

        for arr in (self.k1, self.k2, self.k_sq, self.inv_k_sq, self.d1, self.d2,
                    self.d_sq, self.inv_d_sq, self.dealias_mask, self.x1, self.x2):
            arr.flags.writeable = False

    def __eq__(self, other):
        return isinstance(other, Grid) and (self.n, self.dealias_cut) == (other.n, other.dealias_cut)

    def __hash__(self):
        return hash((self.n, self.dealias_cut))

    def __repr__(self):
        return f"Grid(n={self.n}, dealias_cut={self.dealias_cut})"


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise PreconditionError(f"fields live on different grids: {a.grid} vs {b.grid}")


class ScalarField:
    """Real scalar field on a Grid, stored as complex Fourier coefficients."""

    __slots__ = ("grid", "coeffs", "_values")

    def __init__(self, grid: Grid, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != (grid.n, grid.n):
            raise DataError(f"coefficient array must be {grid.n}x{grid.n}, got {coeffs.shape}")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        self.grid = grid
        self.coeffs = coeffs
        self._values = None

    @classmethod
    def zero(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros((grid.n, grid.n), dtype=np.complex128))

    @classmethod
    def from_cos_modes(cls, grid: Grid, modes) -> "ScalarField":
        """Field sum_k a_k cos(n_k . x) from (n1, n2, a_k) triples."""
        n = grid.n
        c = np.zeros((n, n), dtype=np.complex128)
        for n1, n2, amp in modes:
            n1, n2 = int(n1), int(n2)
            if n1 == 0 and n2 == 0:
                raise ValueError("zero mode not allowed in cosine mode list")
            if max(abs(n1), abs(n2)) > n // 2:
                raise ValueError(f"mode ({n1},{n2}) not representable on N={n}")
            c[n1 % n, n2 % n] += 0.5 * amp
            c[(-n1) % n, (-n2) % n] += 0.5 * amp
        return cls(grid, c)

    def values(self) -> np.ndarray:
        """Collocation values; values[i, j] = f(2pi i/N, 2pi j/N)."""
        if self._values is None:
            v = np.fft.ifft2(self.coeffs).real * (self.grid.n**2)
            v.flags.writeable = False
            self._values = v
        return self._values

    def __add__(self, other):
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return ScalarField(self.grid, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.coeffs)

    def __repr__(self):
        return f"ScalarField(grid={self.grid})"


class VectorField:
    """Two scalar components (u1, u2) on one shared grid."""

    __slots__ = ("u1", "u2")

    def __init__(self, u1: ScalarField, u2: ScalarField):
        _check_same_grid(u1, u2)
        self.u1 = u1
        self.u2 = u2

    @property
    def grid(self) -> Grid:
        return self.u1.grid

    @classmethod
    def zero(cls, grid: Grid) -> "VectorField":
        return cls(ScalarField.zero(grid), ScalarField.zero(grid))

    def divergence_error(self) -> float:
        """max_n |n . uhat(n)| relative to max_n |uhat(n)| (0 for u = 0)."""
        g = self.grid
        dv = g.d1 * self.u1.coeffs + g.d2 * self.u2.coeffs
        scale = max(np.abs(self.u1.coeffs).max(), np.abs(self.u2.coeffs).max())
        if scale == 0.0:
            return 0.0
        return float(np.abs(dv).max() / scale)

    def is_divergence_free(self, rtol: float = 1e-10) -> bool:
        return self.divergence_error() <= rtol

    def __add__(self, other):
        return VectorField(self.u1 + other.u1, self.u2 + other.u2)

    def __sub__(self, other):
        return VectorField(self.u1 - other.u1, self.u2 - other.u2)

    def __mul__(self, scalar):
        return VectorField(self.u1 * scalar, self.u2 * scalar)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# transforms

def transform(values: np.ndarray, grid: Grid) -> ScalarField:
    """Forward transform of point values on the N x N uniform grid."""
    values = np.array(values, dtype=np.float64)
    if values.shape != (grid.n, grid.n):
        raise DataError(f"expected {grid.n}x{grid.n} samples, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise DataError("input samples contain non-finite values")
    f = ScalarField(grid, np.fft.fft2(values) / grid.n**2)
    # the samples are exactly the interpolant's collocation values; caching
    # them keeps values() -> transform -> values() bit-exact
    values.flags.writeable = False
    f._values = values
    return f


def hermitian_symmetry_error(f: ScalarField) -> float:
    """max_n |conj(fhat(-n)) - fhat(n)|; zero for a real field."""
    n = f.grid.n
    rev = (-np.arange(n)) % n
    flipped = np.conj(f.coeffs[np.ix_(rev, rev)])
    return float(np.abs(flipped - f.coeffs).max())


# ---------------------------------------------------------------------------
# differential operators

def derivative(f: ScalarField, axis: int, order: int = 1) -> ScalarField:
    """Partial derivative of the given order along axis 1 or 2."""
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    g = f.grid
    if order % 2 == 0:
        k = g.k1 if axis == 1 else g.k2
    else:
        k = g.d1 if axis == 1 else g.d2
    return ScalarField(g, ((1j * k) ** order) * f.coeffs)


def laplacian(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, -f.grid.k_sq * f.coeffs)


def bilaplacian(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, f.grid.k_sq**2 * f.coeffs)


def gradient(f: ScalarField) -> VectorField:
    return VectorField(derivative(f, 1), derivative(f, 2))


def divergence(v: VectorField) -> ScalarField:
    return derivative(v.u1, 1) + derivative(v.u2, 2)


def inverse_laplacian(f: ScalarField) -> ScalarField:
    """(-Delta)^-1 on mean-zero fields; the output has zero mean."""
    m = f.coeffs[0, 0]
    norm = l2_norm(f)
    if abs(m) > 1e-10 * norm or (norm == 0.0 and abs(m) > 0.0):
        raise PreconditionError(
            f"inverse_laplacian requires a mean-zero field; mean = {complex(m):.6e}"
        )
    out = f.coeffs * f.grid.inv_k_sq
    return ScalarField(f.grid, out)


def mean(f: ScalarField) -> float:
    """Mean value of f over the torus (the zero Fourier mode)."""
    m = f.coeffs[0, 0]
    assert abs(m.imag) <= 1e-12 * max(1.0, abs(m.real)), "zero mode is not real"
    return float(m.real)


# ---------------------------------------------------------------------------
# projections and cutoffs

def leray_project(v: VectorField) -> VectorField:
    """Orthogonal projection onto divergence-free fields (zero mode kept)."""
    g = v.grid
    dot = g.d1 * v.u1.coeffs + g.d2 * v.u2.coeffs
    factor = dot * g.inv_d_sq
    return VectorField(
        ScalarField(g, v.u1.coeffs - g.d1 * factor),
        ScalarField(g, v.u2.coeffs - g.d2 * factor),
    )


def cutoff(f: ScalarField, radius: int) -> ScalarField:
    """Zero all modes with |m| > radius (closed-ball retention)."""
    if radius <= 0:
        raise ValueError(f"cutoff radius must be positive, got {radius}")
    keep = f.grid.k_sq <= float(radius) ** 2
    return ScalarField(f.grid, np.where(keep, f.coeffs, 0.0))


def cutoff_vector(v: VectorField, radius: int) -> VectorField:
    return VectorField(cutoff(v.u1, radius), cutoff(v.u2, radius))


def dealias(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, np.where(f.grid.dealias_mask, f.coeffs, 0.0))


# ---------------------------------------------------------------------------
# norms

def sobolev_norm(f: ScalarField, s: float) -> float:
    """H^s norm ((2pi)^2 sum (1+|n|^2)^s |fhat|^2)^(1/2)."""
    w = (1.0 + f.grid.k_sq) ** s
    return float(np.sqrt(TWO_PI**2 * np.sum(w * np.abs(f.coeffs) ** 2)))


def l2_norm(f: ScalarField) -> float:
    return float(np.sqrt(TWO_PI**2 * np.sum(np.abs(f.coeffs) ** 2)))


def h_minus1_norm(f: ScalarField) -> float:
    """Homogeneous H^-1 norm ((2pi)^2 sum_{n!=0} |fhat|^2/|n|^2)^(1/2)."""
    return float(np.sqrt(TWO_PI**2 * np.sum(f.grid.inv_k_sq * np.abs(f.coeffs) ** 2)))


def linf_norm(f: ScalarField, oversample: int = 1) -> float:
    """max |f| on the collocation grid, optionally oversampled."""
    return float(np.abs(values_oversampled(f, oversample)).max())


# ---------------------------------------------------------------------------
# resampling and products

def _embed_spectrum(coeffs: np.ndarray, n: int, m: int) -> np.ndarray:
    """Embed an N-grid spectrum into an M-grid spectrum (M >= N + 2, even).

    The Nyquist coefficient is split evenly between +-N/2 per axis so the
    resampled values interpolate the original collocation values exactly.
    """
    c = np.fft.fftshift(coeffs)  # index 0 <-> frequency -N/2
    ext = np.zeros((n + 1, n + 1), dtype=np.complex128)
    ext[:n, :n] = c
    ext[0, :n] *= 0.5
    ext[n, :n] = ext[0, :n]
    ext[:, 0] *= 0.5
    ext[:, n] = ext[:, 0]
    out = np.zeros((m, m), dtype=np.complex128)
    lo = m // 2 - n // 2
    out[lo:lo + n + 1, lo:lo + n + 1] = ext
    return np.fft.ifftshift(out)


def _restrict_spectrum(coeffs: np.ndarray, m: int, n: int) -> np.ndarray:
    """Galerkin truncation of an M-grid spectrum onto the N grid.

    The two +-N/2 rows/columns fold into the single Nyquist slot (adjoint
    of the split used by ``_embed_spectrum``).
    """
    c = np.fft.fftshift(coeffs)
    lo = m // 2 - n // 2
    ext = c[lo:lo + n + 1, lo:lo + n + 1].copy()
    ext[0, :] += ext[n, :]
    ext = ext[:n, :]
    ext[:, 0] += ext[:, n]
    ext = ext[:, :n]
    return np.fft.ifftshift(ext)


def values_oversampled(f: ScalarField, factor: int = 1) -> np.ndarray:
    """Collocation values on a (factor*N)^2 grid of the same interpolant."""
    if factor == 1:
        return f.values()
    if factor not in (2, 4, 8):
        raise ValueError(f"oversampling factor must be in {{1,2,4,8}}, got {factor}")
    n = f.grid.n
    m = factor * n
    big = _embed_spectrum(f.coeffs, n, m)
    return np.fft.ifft2(big).real * m**2


def transform_oversampled(values: np.ndarray, grid: Grid) -> ScalarField:
    """Forward transform of samples on a finer M x M grid, truncated to N modes."""
    m = values.shape[0]
    if values.shape != (m, m) or m % grid.n != 0 or m < grid.n:
        raise DataError(f"expected samples on a multiple of the {grid.n} grid, got {values.shape}")
    if m == grid.n:
        return transform(values, grid)
    coeffs_m = np.fft.fft2(values) / m**2
    return ScalarField(grid, _restrict_spectrum(coeffs_m, m, grid.n))


def dealias_product(f: ScalarField, g: ScalarField) -> ScalarField:
    """Pointwise product in physical space with the 2/3-rule mask applied."""
    _check_same_grid(f, g)
    prod = f.values() * g.values()
    return dealias(ScalarField(f.grid, np.fft.fft2(prod) / f.grid.n**2))


def padded_product(f: ScalarField, g: ScalarField, oversample: int = 2) -> ScalarField:
    """Alias-free product via zero padding, truncated back to the N grid.

    No dealias mask is applied; the result is the exact Galerkin truncation
    of the product of the two interpolants (up to the smooth-factor tail).
    """
    _check_same_grid(f, g)
    vf = values_oversampled(f, oversample)
    vg = values_oversampled(g, oversample)
    return transform_oversampled(vf * vg, f.grid)


# ---------------------------------------------------------------------------
# bi-harmonic heat semigroup

def biharmonic_semigroup(theta0: ScalarField, t: float) -> ScalarField:
    """exp(-t Delta^2) theta0: multiply each mode by exp(-t |n|^4)."""
    if t < 0:
        raise ValueError(f"semigroup time must be nonnegative, got {t}")
    decay = np.exp(-t * theta0.grid.k_sq**2)
    return ScalarField(theta0.grid, decay * theta0.coeffs)


def semigroup_linf_hold_time(theta0: ScalarField, delta0: float,
                             times: np.ndarray | None = None,
                             oversample: int = 2) -> float:
    """Largest sampled time T1 with ||exp(-t Delta^2) theta0||_inf <=
    ||theta0||_inf + delta0/4 for every sampled t <= T1.

    Returns 0.0 if the bound already fails at the smallest sampled time.
    """
    if times is None:
        times = np.logspace(-6, 0, 25)
    bound = linf_norm(theta0, oversample) + 0.25 * delta0
    t1 = 0.0
    for t in np.sort(np.asarray(times, dtype=float)):
        if linf_norm(biharmonic_semigroup(theta0, float(t)), oversample) <= bound:
            t1 = float(t)
        else:
            break
    return t1
