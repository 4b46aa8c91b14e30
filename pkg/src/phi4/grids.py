"""Band-limited real fields on the unit torus, stored as Fourier coefficients.

Conventions used throughout the package:

* the torus is ``[0, 1)^d`` with ``d`` in {1, 2},
* the Fourier basis is ``e_k(x) = exp(2*pi*i*k.x)``,
* a field keeps the modes with ``|k|_inf <= N`` (the cutoff band),
* the Laplacian acts on mode ``k`` as multiplication by ``-4*pi^2*|k|^2``,
* physical evaluation happens on an ``M^d`` uniform grid with ``M >= 3N+1``
  and even.  The default padding is ``M = 4N+2`` so that pointwise *cubic*
  products of band-limited fields are alias-free on the retained band
  (``3N+1`` is enough only for quadratic products).

Coefficient arrays have shape ``(2N+1,)*d`` with frequencies ordered
``[0, 1, ..., N, -N, ..., -1]`` along every axis (the compact FFT layout).
Fields are immutable after construction; every operation returns a new field.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TWO_PI_SQ = 4.0 * np.pi**2

# When enabled, every operation asserts Hermitian symmetry of its result.
# Costs one O(band) pass per op; meant for tests and debugging sessions.
CHECK_HERMITIAN = False


class GridMismatchError(ValueError):
    """Raised when an operation combines fields from different grids."""


def default_phys_points(cutoff: int) -> int:
    """Smallest even grid size on which cubic products are alias-free."""
    return 4 * cutoff + 2


@dataclass(frozen=True)
class TorusGrid:
    """Mode band and physical quadrature grid for one torus resolution.

    ``dim``: 1 or 2.  ``cutoff``: largest retained ``|k|_inf``.
    ``phys_points``: points per axis of the product/evaluation grid.
    """

    dim: int
    cutoff: int
    phys_points: int = 0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {self.cutoff}")
        if self.phys_points == 0:
            object.__setattr__(self, "phys_points", default_phys_points(self.cutoff))
        if self.phys_points < 3 * self.cutoff + 1:
            raise ValueError(
                f"phys_points={self.phys_points} < 3*cutoff+1={3 * self.cutoff + 1}"
            )
        if self.phys_points % 2 != 0:
            raise ValueError(f"phys_points must be even, got {self.phys_points}")

    @property
    def n_modes(self) -> int:
        return (2 * self.cutoff + 1) ** self.dim

    @property
    def coeff_shape(self) -> tuple:
        return (2 * self.cutoff + 1,) * self.dim

    @property
    def phys_shape(self) -> tuple:
        return (self.phys_points,) * self.dim

    def freqs(self) -> np.ndarray:
        """Integer frequencies along one axis, in storage order."""
        return _axis_freqs(self.cutoff)

    def k_sq(self) -> np.ndarray:
        """``|k|_2^2`` per mode, shape ``coeff_shape``."""
        return _k_sq(self.dim, self.cutoff)

    def k_inf(self) -> np.ndarray:
        """``|k|_inf`` per mode, shape ``coeff_shape``."""
        return _k_inf(self.dim, self.cutoff)

    def laplacian_multiplier(self) -> np.ndarray:
        """Symbol of the Laplacian: ``-4*pi^2*|k|^2`` per mode."""
        return -TWO_PI_SQ * self.k_sq()


@lru_cache(maxsize=None)
def _axis_freqs(cutoff: int) -> np.ndarray:
    n = 2 * cutoff + 1
    k = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
    k.flags.writeable = False
    return k


@lru_cache(maxsize=None)
def _k_axes(dim: int, cutoff: int) -> tuple:
    k = _axis_freqs(cutoff)
    if dim == 1:
        return (k,)
    return tuple(np.meshgrid(k, k, indexing="ij"))

@lru_cache(maxsize=None)
def _k_sq(dim: int, cutoff: int) -> np.ndarray:
    axes = _k_axes(dim, cutoff)
    out = sum(a.astype(np.float64) ** 2 for a in axes)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def _k_inf(dim: int, cutoff: int) -> np.ndarray:
    axes = _k_axes(dim, cutoff)
    out = np.max(np.stack([np.abs(a) for a in axes]), axis=0)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def _pad_index(cutoff: int, phys_points: int) -> np.ndarray:
    """Positions of the band frequencies inside a length-``M`` FFT layout."""
    return np.mod(_axis_freqs(cutoff), phys_points)


@lru_cache(maxsize=None)
def _conj_index(dim: int, cutoff: int) -> tuple:
    """Index arrays mapping mode ``k`` to mode ``-k`` in storage order."""
    n = 2 * cutoff + 1
    rev = np.mod(-np.arange(n), n)
    if dim == 1:
        return (rev,)
    return np.ix_(rev, rev)


class SpectralField:
    """A real field on the torus, held as band-limited Fourier coefficients.

    Instances are immutable: the coefficient array is marked read-only.
    Linear combinations go through ``+``, ``-`` and scalar ``*``; pointwise
    products must use :func:`dealiased_product` (plain multiplication of
    coefficient arrays is meaningless).
    """

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: TorusGrid, coeffs: np.ndarray, *, copy: bool = True):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != grid.coeff_shape:
            raise ValueError(
                f"coefficient shape {coeffs.shape} != grid shape {grid.coeff_shape}"
            )
        if copy or coeffs.flags.writeable is False:
            coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "coeffs", coeffs)
        if CHECK_HERMITIAN:
            assert_hermitian(self)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralField is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(grid: TorusGrid) -> "SpectralField":
        return SpectralField(grid, np.zeros(grid.coeff_shape, dtype=np.complex128),
                             copy=False)

    @staticmethod
    def constant(grid: TorusGrid, value: float) -> "SpectralField":
        c = np.zeros(grid.coeff_shape, dtype=np.complex128)
        c[(0,) * grid.dim] = value
        return SpectralField(grid, c, copy=False)

    @staticmethod
    def from_physical(grid: TorusGrid, values: np.ndarray) -> "SpectralField":
        return to_spectral(grid, values)

    # -- algebra (exact, coefficient-wise) ---------------------------------

    def _like(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs, copy=False)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return self._like(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return self._like(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return self._like(-self.coeffs)

    def shift_mean(self, value: float) -> "SpectralField":
        """Add a spatial constant (touches only the zero mode)."""
        c = self.coeffs.copy()
        c[(0,) * self.grid.dim] += value
        return self._like(c)

    @property
    def mean(self) -> float:
        """Spatial mean, i.e. the zero-mode coefficient."""
        return float(self.coeffs[(0,) * self.grid.dim].real)


def _check_same_grid(a: SpectralField, b: SpectralField):
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")


def assert_hermitian(field: SpectralField, tol: float = 1e-12):
    """Check ``coeff(-k) == conj(coeff(k))`` up to ``tol`` (relative)."""
    c = field.coeffs
    mirrored = np.conj(c[_conj_index(field.grid.dim, field.grid.cutoff)])
    scale = np.max(np.abs(c)) or 1.0
    err = np.max(np.abs(c - mirrored)) / scale
    if err > tol:
        raise AssertionError(f"Hermitian symmetry violated: rel err {err:.3e}")


def hermitize(field: SpectralField) -> SpectralField:
    """Project onto the Hermitian (real-field) subspace."""
    c = field.coeffs
    mirrored = np.conj(c[_conj_index(field.grid.dim, field.grid.cutoff)])
    return SpectralField(field.grid, 0.5 * (c + mirrored), copy=False)


# -- transforms -------------------------------------------------------------

def pad_coeffs(grid: TorusGrid, coeffs: np.ndarray) -> np.ndarray:
    """Scatter band coefficients into the full ``M^d`` FFT layout."""
    idx = _pad_index(grid.cutoff, grid.phys_points)
    out = np.zeros(grid.phys_shape, dtype=np.complex128)
    if grid.dim == 1:
        out[idx] = coeffs
    else:
        out[np.ix_(idx, idx)] = coeffs
    return out


def truncate_coeffs(grid: TorusGrid, full: np.ndarray) -> np.ndarray:
    """Gather the retained band out of a full ``M^d`` FFT layout."""
    idx = _pad_index(grid.cutoff, grid.phys_points)
    if grid.dim == 1:
        return full[idx]
    return full[np.ix_(idx, idx)]


def phys_values(field: SpectralField) -> np.ndarray:
    """Real grid values; raw ndarray version of :func:`to_physical`."""
    full = pad_coeffs(field.grid, field.coeffs)
    vals = np.fft.ifftn(full) * field.grid.phys_points**field.grid.dim
    return np.ascontiguousarray(vals.real)


def to_physical(field: SpectralField) -> np.ndarray:
    """Evaluate the field on the uniform ``M^d`` grid (real values)."""
    return phys_values(field)


def to_spectral(grid: TorusGrid, values: np.ndarray) -> SpectralField:
    """Band-truncated Fourier coefficients of grid values."""
    values = np.asarray(values)
    if values.shape != grid.phys_shape:
        raise ValueError(f"value shape {values.shape} != grid {grid.phys_shape}")
    full = np.fft.fftn(values) / grid.phys_points**grid.dim
    return SpectralField(grid, truncate_coeffs(grid, full), copy=False)


# -- operations --------------------------------------------------------------

def heat_semigroup(field: SpectralField, t: float, mass: float = 0.0) -> SpectralField:
    """Apply ``exp(t*(Laplacian - mass))``: mode ``k`` is damped by
    ``exp(-(mass + 4*pi^2*|k|^2)*t)``."""
    if t < 0:
        raise ValueError(f"semigroup time must be >= 0, got {t}")
    mult = np.exp(-(mass + TWO_PI_SQ * field.grid.k_sq()) * t)
    out = SpectralField(field.grid, field.coeffs * mult, copy=False)
    if CHECK_HERMITIAN:
        assert_hermitian(out)
    return out


def dealiased_product(a: SpectralField, b: SpectralField,
                      c: SpectralField | None = None) -> SpectralField:
    """Pointwise product on the padded grid, re-truncated to the band.

    Exact (alias-free) for the retained modes provided the grid padding
    covers the product degree: quadratic needs ``M >= 3N+1``, the optional
    triple product needs ``M >= 4N+1`` (both hold for the default padding).
    """
    _check_same_grid(a, b)
    vals = phys_values(a) * phys_values(b)
    if c is not None:
        _check_same_grid(a, c)
        vals *= phys_values(c)
    out = to_spectral(a.grid, vals)
    if CHECK_HERMITIAN:
        assert_hermitian(out)
    return out


def l2_norm(field: SpectralField) -> float:
    """``sqrt(mean of f(x)^2)`` over the grid; equals the L2 norm on
    ``[0,1)^d`` exactly for band-limited fields."""
    vals = phys_values(field)
    return float(np.sqrt(np.mean(vals**2)))


def sup_norm(field: SpectralField) -> float:
    """``max |f(x)|`` over the evaluation grid."""
    vals = phys_values(field)
    return float(np.max(np.abs(vals)))


def coeff_l2(coeffs: np.ndarray) -> float:
    """Parseval form of the L2 norm, computed directly on coefficients."""
    return float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))


def inner_l2(a: SpectralField, b: SpectralField) -> float:
    """L2 inner product on ``[0,1)^d`` via Parseval."""
    _check_same_grid(a, b)
    return float(np.sum(a.coeffs * np.conj(b.coeffs)).real)


def sample_gff(grid: TorusGrid, seed: int) -> SpectralField:
    """Draw a massive Gaussian free field: independent complex coefficients
    with ``E|c_k|^2 = 1/(1 + 4*pi^2*|k|^2)``, Hermitian-paired."""
    from .noise import hermitian_normals  # deferred: avoid import cycle

    variance = 1.0 / (1.0 + TWO_PI_SQ * grid.k_sq())
    return SpectralField(grid, hermitian_normals(grid, seed, purpose=2) *
                         np.sqrt(variance), copy=False)


def extend_to(field: SpectralField, grid: TorusGrid) -> SpectralField:
    """Re-embed a field into a larger band (zero-padding the new modes)."""
    if grid.dim != field.grid.dim or grid.cutoff < field.grid.cutoff:
        raise GridMismatchError("target grid must share dim and have >= cutoff")
    small = field.grid.coeff_shape[0]
    idx = np.mod(_axis_freqs(field.grid.cutoff), 2 * grid.cutoff + 1)
    out = np.zeros(grid.coeff_shape, dtype=np.complex128)
    if grid.dim == 1:
        out[idx] = field.coeffs
    else:
        out[np.ix_(idx, idx)] = field.coeffs
    return SpectralField(grid, out, copy=False)
