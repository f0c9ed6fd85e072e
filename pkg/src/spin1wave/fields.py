"""
Periodic-box grids, complex three-vector fields and six-component wave
fields, with pseudospectral differential operators.

Conventions: wavenumbers per axis are 2*pi*n/L on the standard FFT integer
range; the Nyquist mode is zeroed in every first-derivative operator so that
i*k stays skew-Hermitian (second-derivative operators keep it).  The k = 0
mode carries no divergence constraint and is left untouched by the
transverse projector.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .errors import GridMismatch


@dataclass(frozen=True)
class Grid:
    """Uniform periodic box; sample counts must be even and >= 4 per axis."""

    nx: int
    ny: int
    nz: int
    lx: float
    ly: float
    lz: float

    def __post_init__(self):
        for n in (self.nx, self.ny, self.nz):
            if n < 4 or n % 2 != 0:
                raise ValueError("grid sample counts must be even and >= 4")
        for l in (self.lx, self.ly, self.lz):
            if not (l > 0):
                raise ValueError("box lengths must be positive")

    @staticmethod
    def cubic(n: int, length: float = 2.0 * np.pi) -> "Grid":
        return Grid(n, n, n, length, length, length)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def npoints(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def spacing(self) -> tuple[float, float, float]:
        return (self.lx / self.nx, self.ly / self.ny, self.lz / self.nz)

    @property
    def cell_volume(self) -> float:
        dx, dy, dz = self.spacing
        return dx * dy * dz

    @property
    def volume(self) -> float:
        return self.lx * self.ly * self.lz


def _axis_wavenumbers(n: int, length: float, zero_nyquist: bool) -> np.ndarray:
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)
    if zero_nyquist:
        k[n // 2] = 0.0
    return k


@functools.lru_cache(maxsize=32)
def wavevectors(grid: Grid, zero_nyquist: bool = True) -> np.ndarray:
    """Meshed wavevector components, shape (3, nx, ny, nz), read-only."""
    kx = _axis_wavenumbers(grid.nx, grid.lx, zero_nyquist)
    ky = _axis_wavenumbers(grid.ny, grid.ly, zero_nyquist)
    kz = _axis_wavenumbers(grid.nz, grid.lz, zero_nyquist)
    mesh = np.stack(np.meshgrid(kx, ky, kz, indexing="ij"))
    mesh.setflags(write=False)
    return mesh


@functools.lru_cache(maxsize=32)
def k_squared(grid: Grid) -> np.ndarray:
    """|k|^2 with the Nyquist modes kept (second-derivative convention)."""
    k = wavevectors(grid, zero_nyquist=False)
    k2 = np.sum(k * k, axis=0)
    k2.setflags(write=False)
    return k2


@functools.lru_cache(maxsize=32)
def coordinates(grid: Grid) -> np.ndarray:
    """Periodic sawtooth coordinates centered at the box midpoint: each axis
    runs over [-L/2, L/2) with the jump at the box boundary."""
    axes = [
        np.arange(n) * (l / n) - l / 2.0
        for n, l in ((grid.nx, grid.lx), (grid.ny, grid.ly), (grid.nz, grid.lz))
    ]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"))
    mesh.setflags(write=False)
    return mesh


def fftn(data: np.ndarray) -> np.ndarray:
    """Forward transform over the trailing three axes."""
    return np.fft.fftn(data, axes=(-3, -2, -1))


def ifftn(data: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(data, axes=(-3, -2, -1))


@dataclass
class VectorField:
    """Complex 3-vector field sampled on a Grid; data shape (3, nx, ny, nz)."""

    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.shape != (3, *self.grid.shape):
            raise ValueError(f"expected data shape {(3, *self.grid.shape)}, got {self.data.shape}")

    @staticmethod
    def zeros(grid: Grid) -> "VectorField":
        return VectorField(grid, np.zeros((3, *grid.shape), dtype=np.complex128))

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.data.copy())

    def __add__(self, other: "VectorField") -> "VectorField":
        _same_grid(self, other)
        return VectorField(self.grid, self.data + other.data)

    def __sub__(self, other: "VectorField") -> "VectorField":
        _same_grid(self, other)
        return VectorField(self.grid, self.data - other.data)

    def __mul__(self, scalar) -> "VectorField":
        return VectorField(self.grid, self.data * scalar)

    __rmul__ = __mul__


def _same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatch(f"grids differ: {a.grid} vs {b.grid}")


def plane_wave(grid: Grid, k, eps) -> VectorField:
    """eps * exp(i k.x) sampled on the grid; k need not be commensurate."""
    k = np.asarray(k, dtype=float)
    x = coordinates(grid)
    phase = np.exp(1j * np.tensordot(k, x, axes=(0, 0)))
    data = np.asarray(eps, dtype=complex)[:, None, None, None] * phase
    return VectorField(grid, data)


def mode_wavevector(grid: Grid, n_index) -> np.ndarray:
    """Wavevector 2*pi*n/L of an integer mode index triple."""
    n = np.asarray(n_index, dtype=float)
    return 2.0 * np.pi * n / np.array([grid.lx, grid.ly, grid.lz])


def curl(f: VectorField) -> VectorField:
    """Spectral curl: per mode, amplitude -> i k x amplitude."""
    k = wavevectors(f.grid)
    fh = fftn(f.data)
    out = 1j * np.cross(k, fh, axisa=0, axisb=0, axisc=0)
    return VectorField(f.grid, ifftn(out))


def divergence(f: VectorField) -> np.ndarray:
    """Spectral divergence: per mode, i k . amplitude.  Returns a complex
    scalar field of shape (nx, ny, nz)."""
    k = wavevectors(f.grid)
    fh = fftn(f.data)
    return ifftn(1j * np.sum(k * fh, axis=0))


def gradient(grid: Grid, scalar: np.ndarray) -> VectorField:
    """Spectral gradient of a scalar field."""
    k = wavevectors(grid)
    sh = fftn(np.asarray(scalar, dtype=np.complex128))
    return VectorField(grid, ifftn(1j * k * sh[None]))


def project_transverse(f: VectorField) -> VectorField:
    """Remove the longitudinal part: per mode k != 0,
    amplitude -> amplitude - k (k.amplitude)/|k|^2.  The k = 0 mode is
    unchanged.  Output divergence is at round-off."""
    k = wavevectors(f.grid)
    k2 = np.sum(k * k, axis=0)
    fh = fftn(f.data)
    kdotf = np.sum(k * fh, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        coef = np.where(k2 > 0.0, kdotf / np.where(k2 > 0.0, k2, 1.0), 0.0)
    fh -= k * coef[None]
    return VectorField(f.grid, ifftn(fh))


def inner(fa: VectorField, fb: VectorField) -> complex:
    """Grid inner product sum(conj(a).b) * dV."""
    _same_grid(fa, fb)
    return complex(np.vdot(fa.data, fb.data) * fa.grid.cell_volume)


def l2_norm(f: VectorField) -> float:
    return float(np.sqrt(np.sum(np.abs(f.data) ** 2) * f.grid.cell_volume))


def max_abs(f: VectorField) -> float:
    return float(np.max(np.abs(f.data)))


@dataclass
class WaveField:
    """Six-component state (u, v) on a periodic grid.

    The wave function is (u_x,u_y,u_z,v_x,v_y,v_z)/sqrt(2); the 1/sqrt(2)
    normalization is applied by the diagnostics, not stored here.
    """

    grid: Grid
    u: VectorField
    v: VectorField
    mass: float
    time: float = 0.0

    def __post_init__(self):
        if self.u.grid != self.grid or self.v.grid != self.grid:
            raise GridMismatch("component fields live on a different grid")
        if self.mass < 0:
            raise ValueError("mass must be >= 0")

    @staticmethod
    def zeros(grid: Grid, mass: float) -> "WaveField":
        return WaveField(grid, VectorField.zeros(grid), VectorField.zeros(grid), mass)

    @staticmethod
    def from_stack(grid: Grid, stack: np.ndarray, mass: float, time: float = 0.0) -> "WaveField":
        stack = np.asarray(stack, dtype=np.complex128)
        return WaveField(
            grid,
            VectorField(grid, stack[:3].copy()),
            VectorField(grid, stack[3:].copy()),
            mass,
            time,
        )

    def stack(self) -> np.ndarray:
        """(6, nx, ny, nz) copy in component order u_x..v_z."""
        return np.concatenate([self.u.data, self.v.data], axis=0)

    def copy(self) -> "WaveField":
        return WaveField(self.grid, self.u.copy(), self.v.copy(), self.mass, self.time)

    def norm(self) -> float:
        """sqrt(integral of psi^dagger psi) with the 1/sqrt(2) applied."""
        s = np.sum(np.abs(self.u.data) ** 2) + np.sum(np.abs(self.v.data) ** 2)
        return float(np.sqrt(0.5 * s * self.grid.cell_volume))


def swap_blocks(psi: WaveField) -> WaveField:
    """Exchange the u and v blocks (the sigma_1 (x) I operation)."""
    return WaveField(psi.grid, psi.v.copy(), psi.u.copy(), psi.mass, psi.time)


def project_constraints(psi: WaveField) -> WaveField:
    """Project both blocks onto the divergence-free subspace."""
    return WaveField(
        psi.grid, project_transverse(psi.u), project_transverse(psi.v), psi.mass, psi.time
    )


def divergence_residuals(psi: WaveField) -> tuple[float, float]:
    """max |div u|, max |div v| over the grid."""
    return (
        float(np.max(np.abs(divergence(psi.u)))),
        float(np.max(np.abs(divergence(psi.v)))),
    )


def nyquist_wavenumber(grid: Grid) -> float:
    """Smallest per-axis Nyquist wavenumber pi*n/L."""
    return min(
        np.pi * grid.nx / grid.lx, np.pi * grid.ny / grid.ly, np.pi * grid.nz / grid.lz
    )


def random_vector_field(
    grid: Grid,
    k_cutoff: float,
    rng,
    kmax: float | None = None,
    normalize: bool = True,
) -> VectorField:
    """Band-limited random field: complex Gaussian spectral amplitudes with
    envelope exp(-|k|^2 / (2 k_cutoff^2)), hard-truncated at kmax.

    The default kmax is a quarter of the smallest axis Nyquist wavenumber,
    so that quadratic quantities (densities, currents) of the field remain
    exactly resolved by the spectral derivative operators."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    k2 = k_squared(grid)  # Nyquist kept, so the hard cutoff really cuts it
    if kmax is None:
        kmax = 0.25 * nyquist_wavenumber(grid)
    envelope = np.exp(-k2 / (2.0 * k_cutoff**2)) * (k2 <= kmax**2)
    shape = (3, *grid.shape)
    amps = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    f = VectorField(grid, ifftn(amps * envelope[None]))
    if normalize:
        n = l2_norm(f)
        if n > 0:
            f.data /= n
    return f


def random_wave_field(
    grid: Grid,
    mass: float,
    k_cutoff: float,
    seed,
    transverse: bool = False,
    kmax: float | None = None,
) -> WaveField:
    """Seeded band-limited random state, unit norm; optionally projected
    onto the constraint subspace before normalization."""
    rng = np.random.default_rng(seed)
    u = random_vector_field(grid, k_cutoff, rng, kmax=kmax, normalize=False)
    v = random_vector_field(grid, k_cutoff, rng, kmax=kmax, normalize=False)
    if transverse:
        u = project_transverse(u)
        v = project_transverse(v)
    psi = WaveField(grid, u, v, mass)
    n = psi.norm()
    if n > 0:
        psi.u.data /= n
        psi.v.data /= n
    return psi


def gaussian_wave_packet(
    grid: Grid,
    mass: float,
    sigma: float,
    k0=(0.0, 0.0, 0.0),
    u_polarization=(1.0, 0.0, 0.0),
    v_polarization=(0.0, 1.0, 0.0),
) -> WaveField:
    """Gaussian envelope exp(-|x|^2/(2 sigma^2)) e^{i k0.x} centered at the
    box midpoint, with constant polarization vectors on the two blocks.
    Unit norm.  Keep sigma well below L so the wrap seam is negligible."""
    x = coordinates(grid)
    r2 = np.sum(x * x, axis=0)
    envelope = np.exp(-r2 / (2.0 * sigma**2)) * np.exp(
        1j * np.tensordot(np.asarray(k0, float), x, axes=(0, 0))
    )
    u = np.asarray(u_polarization, complex)[:, None, None, None] * envelope
    v = np.asarray(v_polarization, complex)[:, None, None, None] * envelope
    psi = WaveField(grid, VectorField(grid, u), VectorField(grid, v), mass)
    n = psi.norm()
    psi.u.data /= n
    psi.v.data /= n
    return psi


def plane_eigenmode_field(
    grid: Grid, mass: float, n_index, branch: int, polarization: str, amplitude: complex = 1.0
) -> WaveField:
    """Sampled eigenmode of the free system at integer mode index n_index."""
    k = mode_wavevector(grid, n_index)
    psi6 = algebra.eigenmode(k, mass, branch, polarization)
    x = coordinates(grid)
    phase = amplitude * np.exp(1j * np.tensordot(k, x, axes=(0, 0)))
    stack = psi6[:, None, None, None] * phase
    return WaveField.from_stack(grid, stack, mass)
