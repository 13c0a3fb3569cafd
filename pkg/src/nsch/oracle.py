"""Brute-force reference implementations used by the verification suite.

Everything here works from first principles: explicit DFT matrices applied
by direct multiplication, direct Fourier-series summation, plain midpoint
quadrature on oversampled grids, and plain bisection.  No code is shared
with the production spectral kernels beyond the documented coefficient and
Nyquist conventions.  Sizes are capped at N <= 16 so the O(N^4) matrices
stay instant; all oracle-backed checks run at N = 8.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi

MAX_ORACLE_N = 16


class DenseSpectralOracle:
    """Dense N^2 x N^2 DFT matrices for fields on the [0, 2pi)^2 torus."""

    def __init__(self, n: int):
        if n > MAX_ORACLE_N or n < 2 or n % 2:
            raise ValueError(f"oracle grid size must be even and <= {MAX_ORACLE_N}, got {n}")
        self.n = n
        x = np.arange(n) * (TWO_PI / n)
        k = np.fft.fftfreq(n, d=1.0 / n)  # same index layout as the production code
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        K1, K2 = np.meshgrid(k, k, indexing="ij")
        self.points = np.stack([X1.ravel(), X2.ravel()], axis=1)
        self.waves = np.stack([K1.ravel(), K2.ravel()], axis=1)
        phase = self.waves @ self.points.T  # (modes, points)
        self.forward = np.exp(-1j * phase) / n**2
        self.backward = np.exp(1j * phase).T
        # derivative wavevectors: Nyquist component annihilated (realness)
        dk = k.copy()
        dk[n // 2] = 0.0
        D1, D2 = np.meshgrid(dk, dk, indexing="ij")
        self.dwaves = np.stack([D1.ravel(), D2.ravel()], axis=1)
        self.k_sq = (K1**2 + K2**2).ravel()

    def transform(self, values: np.ndarray) -> np.ndarray:
        """Coefficients fhat(n) = sum_j f(x_j) exp(-i n.x_j) / N^2."""
        return (self.forward @ np.asarray(values, dtype=np.complex128).ravel()).reshape(self.n, self.n)

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        return (self.backward @ np.asarray(coeffs, dtype=np.complex128).ravel()).reshape(self.n, self.n).real

    def derivative(self, values: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
        c = self.transform(values).ravel()
        if order % 2 == 0:
            w = self.waves[:, axis - 1]
        else:
            w = self.dwaves[:, axis - 1]
        return self.inverse(((1j * w) ** order * c).reshape(self.n, self.n))

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        c = self.transform(values).ravel()
        return self.inverse((-self.k_sq * c).reshape(self.n, self.n))

    def bilaplacian(self, values: np.ndarray) -> np.ndarray:
        c = self.transform(values).ravel()
        return self.inverse((self.k_sq**2 * c).reshape(self.n, self.n))

    def inverse_laplacian(self, values: np.ndarray) -> np.ndarray:
        c = self.transform(values).ravel()
        out = np.zeros_like(c)
        nz = self.k_sq > 0
        out[nz] = c[nz] / self.k_sq[nz]
        return self.inverse(out.reshape(self.n, self.n))

    def leray_project(self, v1: np.ndarray, v2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-mode projector I - n n^T / |n|^2 with the derivative wavevectors."""
        c1 = self.transform(v1).ravel()
        c2 = self.transform(v2).ravel()
        d1 = self.dwaves[:, 0]
        d2 = self.dwaves[:, 1]
        d_sq = d1**2 + d2**2
        out1 = c1.copy()
        out2 = c2.copy()
        nz = d_sq > 0
        dot = (d1[nz] * c1[nz] + d2[nz] * c2[nz]) / d_sq[nz]
        out1[nz] -= d1[nz] * dot
        out2[nz] -= d2[nz] * dot
        return (self.inverse(out1.reshape(self.n, self.n)),
                self.inverse(out2.reshape(self.n, self.n)))


def dense_series_evaluator(coeffs: np.ndarray):
    """Callable evaluating the Fourier series at arbitrary points.

    Nyquist coefficients are split between +-N/2 as in the production
    resampling convention.  Intended for small N only (direct summation).
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    n = coeffs.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    terms = []
    for a in range(n):
        for b in range(n):
            c = coeffs[a, b]
            if c == 0:
                continue
            w1s = [k[a]] if a != n // 2 else [n / 2.0, -n / 2.0]
            w2s = [k[b]] if b != n // 2 else [n / 2.0, -n / 2.0]
            share = c / (len(w1s) * len(w2s))
            for w1 in w1s:
                for w2 in w2s:
                    terms.append((w1, w2, share))

    def evaluate(x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        out = np.zeros(np.broadcast(x1, x2).shape, dtype=np.complex128)
        for w1, w2, c in terms:
            out += c * np.exp(1j * (w1 * x1 + w2 * x2))
        return out.real

    return evaluate


def quadrature(evaluator, oversample: int, n: int = 8) -> float:
    """Midpoint (collocation) quadrature on an oversampled uniform grid."""
    if oversample not in (2, 4, 8):
        raise ValueError(f"oversample must be one of 2, 4, 8, got {oversample}")
    m = oversample * n
    x = np.arange(m) * (TWO_PI / m)
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    vals = evaluator(X1, X2)
    return float(np.sum(vals) * (TWO_PI / m) ** 2)


def bisect(f, lo: float, hi: float, tol: float = 1e-14, max_iter: int = 200) -> float:
    """Root of a monotone function by plain bisection."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]: f(lo)={flo:.3e}, f(hi)={fhi:.3e}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo) <= tol:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)
