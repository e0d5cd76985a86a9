"""
wgqed.pulse
===========

Single-photon wave packets as complex envelopes on a uniform time grid, and
the pulse families used by the scattering and gate code.

Envelopes are stored in the co-moving coordinate tau = t - z/c (c = 1) with
the optical carrier factored out, so a packet is fully described by its
samples, its grid, its carrier detuning and its propagation direction.

"""
import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import erfc
from scipy.integrate import quad

from wgqed.util import (TAIL_MASS_TOL, GridError, GridMismatchError,
                        trapz_inner, trapz_norm2, rms_bandwidth)

from desiutil.log import get_logger
log = get_logger()

# ln(1/TAIL_MASS_TOL); the half-exponential tail length in units of 1/gamma.
_EXP_TAIL = np.log(1.0 / TAIL_MASS_TOL)

# Gaussian half-window in units of sigma (mass outside is ~2e-9).
_GAUSS_HALFWIDTH = 6.0

# Extra window after the pulse tail, in units of 1/Gamma.
_KERNEL_TAIL = 40.0

# Samples per shortest time scale of the default grid.
_SAMPLES_PER_SCALE = 50


class Direction(enum.Enum):
    RIGHTWARD = 'R'
    LEFTWARD = 'L'

    def flipped(self):
        return Direction.LEFTWARD if self is Direction.RIGHTWARD else Direction.RIGHTWARD


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_k = t_start + k*dt, k = 0, ..., n_samples-1."""
    t_start: float
    dt: float
    n_samples: int

    def __post_init__(self):
        if not (self.dt > 0.0 and np.isfinite(self.dt)):
            errmsg = 'Grid step must be positive and finite, got dt={}.'.format(self.dt)
            log.critical(errmsg)
            raise GridError(errmsg)
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            errmsg = 'Grid needs at least two samples, got n_samples={}.'.format(self.n_samples)
            log.critical(errmsg)
            raise GridError(errmsg)
        if not np.isfinite(self.t_start):
            errmsg = 'Grid start must be finite, got t_start={}.'.format(self.t_start)
            log.critical(errmsg)
            raise GridError(errmsg)

    @classmethod
    def spanning(cls, t_start, t_end, dt):
        """Smallest grid with step ``dt`` starting at ``t_start`` and reaching ``t_end``."""
        nsamples = int(np.ceil((t_end - t_start) / dt - 1e-9)) + 1
        return cls(float(t_start), float(dt), max(nsamples, 2))

    @property
    def t_end(self):
        return self.t_start + (self.n_samples - 1) * self.dt

    @property
    def times(self):
        return self.t_start + self.dt * np.arange(self.n_samples)


@dataclass(frozen=True)
class HalfExponential:
    """Photon emitted by a decaying source: A = sqrt(gamma) exp(-gamma (tau-t0)/2), tau >= t0."""
    gamma: float
    t0: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0.0:
            errmsg = 'HalfExponential rate must be positive, got gamma={}.'.format(self.gamma)
            log.critical(errmsg)
            raise ValueError(errmsg)

    @property
    def rate(self):
        return self.gamma

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        amp = np.zeros(t.shape, dtype=complex)
        on = t >= self.t0
        amp[on] = np.sqrt(self.gamma) * np.exp(-0.5 * self.gamma * (t[on] - self.t0))
        return amp

    def mass_outside(self, t_lo, t_hi):
        before = 0.0 if t_lo <= self.t0 else -np.expm1(-self.gamma * (t_lo - self.t0))
        after = np.exp(-self.gamma * max(t_hi - self.t0, 0.0))
        return float(before + after)

    def support(self):
        return self.t0, self.t0 + _EXP_TAIL / self.gamma


@dataclass(frozen=True)
class Gaussian:
    """Gaussian envelope whose intensity |A|^2 has rms width sigma."""
    sigma: float
    t0: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0.0:
            errmsg = 'Gaussian width must be positive, got sigma={}.'.format(self.sigma)
            log.critical(errmsg)
            raise ValueError(errmsg)

    @property
    def rate(self):
        return 1.0 / self.sigma

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        norm = (2. * np.pi * self.sigma**2)**(-0.25)
        return (norm * np.exp(-(t - self.t0)**2 / (4. * self.sigma**2))).astype(complex)

    def mass_outside(self, t_lo, t_hi):
        scale = np.sqrt(2.) * self.sigma
        return float(0.5 * erfc((self.t0 - t_lo) / scale) + 0.5 * erfc((t_hi - self.t0) / scale))

    def support(self):
        return self.t0 - _GAUSS_HALFWIDTH * self.sigma, self.t0 + _GAUSS_HALFWIDTH * self.sigma


@dataclass(frozen=True)
class PlaneWaveWindow:
    """Flat-top pulse of total length ``duration`` with raised-cosine edges.

    ``rise`` defaults to a tenth of the duration and cannot exceed half of it.

    """
    duration: float
    t0: float = 0.0
    rise: Optional[float] = None

    def __post_init__(self):
        if not self.duration > 0.0:
            errmsg = 'Window duration must be positive, got duration={}.'.format(self.duration)
            log.critical(errmsg)
            raise ValueError(errmsg)
        if self.rise is None:
            object.__setattr__(self, 'rise', 0.1 * self.duration)
        if not (0.0 < self.rise <= 0.5 * self.duration):
            errmsg = 'Window edge must satisfy 0 < rise <= duration/2, got rise={}.'.format(self.rise)
            log.critical(errmsg)
            raise ValueError(errmsg)

    @property
    def rate(self):
        return 1.0 / self.rise

    def _profile(self, t):
        t = np.asarray(t, dtype=float)
        x = t - self.t0
        amp = np.zeros(t.shape)
        inside = (x >= 0.0) & (x <= self.duration)
        amp[inside] = 1.0
        up = inside & (x < self.rise)
        amp[up] = 0.5 * (1. - np.cos(np.pi * x[up] / self.rise))
        down = inside & (x > self.duration - self.rise)
        amp[down] = 0.5 * (1. - np.cos(np.pi * (self.duration - x[down]) / self.rise))
        return amp

    def _total_mass(self):
        # raised-cosine squared averages to 3/8 over each edge
        return self.duration - 2. * self.rise + 0.75 * self.rise

    def envelope(self, t):
        return (self._profile(t) / np.sqrt(self._total_mass())).astype(complex)

    def mass_outside(self, t_lo, t_hi):
        lo = max(t_lo, self.t0)
        hi = min(t_hi, self.t0 + self.duration)
        if hi <= lo:
            return 1.0
        kinks = [tk for tk in (self.t0 + self.rise, self.t0 + self.duration - self.rise)
                 if lo < tk < hi]
        inside, _ = quad(lambda t: float(self._profile(t)**2), lo, hi,
                         points=kinks or None, limit=200)
        return float(max(1.0 - inside / self._total_mass(), 0.0))

    def support(self):
        return self.t0, self.t0 + self.duration


PULSE_SHAPES = (HalfExponential, Gaussian, PlaneWaveWindow)


@dataclass(frozen=True, eq=False)
class WavePacket:
    """Sampled single-photon envelope.

    Attributes:
        grid (TimeGrid): the sample grid.
        amplitudes (complex array): envelope samples (read-only).
        carrier_detuning (float): carrier frequency minus the emitter transition.
        direction (Direction): propagation direction.

    """
    grid: TimeGrid
    amplitudes: np.ndarray
    carrier_detuning: float = 0.0
    direction: Direction = Direction.RIGHTWARD

    # numpy scalars defer to our __rmul__
    __array_ufunc__ = None

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or len(amps) != self.grid.n_samples:
            errmsg = 'Packet has {} samples but its grid has {}.'.format(amps.size, self.grid.n_samples)
            log.critical(errmsg)
            raise GridError(errmsg)
        amps.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amps)

    @property
    def mass(self):
        """Squared norm (photon probability carried by the packet)."""
        return trapz_norm2(self.amplitudes, self.grid.dt)

    @property
    def bandwidth(self):
        return rms_bandwidth(self.amplitudes, self.grid.dt)

    def with_amplitudes(self, amplitudes, direction=None):
        """New packet on the same grid and carrier."""
        return WavePacket(self.grid, amplitudes, self.carrier_detuning,
                          self.direction if direction is None else direction)

    def with_direction(self, direction):
        return self.with_amplitudes(self.amplitudes, direction=direction)

    def check_compatible(self, other, same_direction=False):
        if self.grid != other.grid:
            errmsg = 'Packets live on different grids: {} vs {}.'.format(self.grid, other.grid)
            log.critical(errmsg)
            raise GridMismatchError(errmsg)
        if self.carrier_detuning != other.carrier_detuning:
            errmsg = 'Packets have different carriers: {} vs {}.'.format(
                self.carrier_detuning, other.carrier_detuning)
            log.critical(errmsg)
            raise GridMismatchError(errmsg)
        if same_direction and self.direction is not other.direction:
            errmsg = 'Cannot add counter-propagating packets.'
            log.critical(errmsg)
            raise GridMismatchError(errmsg)

    def __add__(self, other):
        self.check_compatible(other, same_direction=True)
        return self.with_amplitudes(self.amplitudes + other.amplitudes)

    def __sub__(self, other):
        self.check_compatible(other, same_direction=True)
        return self.with_amplitudes(self.amplitudes - other.amplitudes)

    def __mul__(self, factor):
        return self.with_amplitudes(complex(factor) * self.amplitudes)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_amplitudes(-self.amplitudes)

    def support_span(self, tail=TAIL_MASS_TOL):
        """Length of the interval holding all but ``tail`` of the packet's mass."""
        weights = np.abs(self.amplitudes)**2
        total = weights.sum()
        if total <= 0.0:
            return 0.0
        cum = np.cumsum(weights) / total
        first = int(np.searchsorted(cum, 0.5 * tail))
        last = int(np.searchsorted(cum, 1.0 - 0.5 * tail))
        last = min(last, self.grid.n_samples - 1)
        return (last - first) * self.grid.dt


def zeros_like(packet):
    return packet.with_amplitudes(np.zeros(packet.grid.n_samples, dtype=complex))


def default_grid(shape, gamma_total=1.0):
    """Grid resolving both the pulse and the emitter kernel.

    The step is min(1/Gamma, 1/rate)/50 and the window runs from the start of
    the pulse support to 40/Gamma past its tail.

    Args:
        shape: a pulse shape instance.
        gamma_total (float): total emitter decay rate Gamma.

    Returns:
        :class:`TimeGrid`

    """
    if not gamma_total > 0.0:
        errmsg = 'Total decay rate must be positive, got {}.'.format(gamma_total)
        log.critical(errmsg)
        raise ValueError(errmsg)
    dt = min(1.0 / gamma_total, 1.0 / shape.rate) / _SAMPLES_PER_SCALE
    t_lo, t_hi = shape.support()
    return TimeGrid.spanning(t_lo, t_hi + _KERNEL_TAIL / gamma_total, dt)


def make_pulse(shape, grid=None, detuning=0.0, direction=Direction.RIGHTWARD,
               gamma_total=1.0):
    """Sample a normalized single-photon packet.

    Args:
        shape: :class:`HalfExponential`, :class:`Gaussian` or :class:`PlaneWaveWindow`.
        grid (TimeGrid, optional): sample grid; defaults to :func:`default_grid`.
        detuning (float): carrier detuning relative to the emitter transition.
        direction (Direction): propagation direction.
        gamma_total (float): decay rate used to size the default grid.

    Returns:
        :class:`WavePacket` with unit trapezoidal norm.

    Raises:
        GridError: if more than 1e-8 of the pulse's mass falls outside the grid.

    """
    if not isinstance(shape, PULSE_SHAPES):
        errmsg = 'Unknown pulse shape {!r}.'.format(shape)
        log.critical(errmsg)
        raise ValueError(errmsg)
    if grid is None:
        grid = default_grid(shape, gamma_total)

    outside = shape.mass_outside(grid.t_start, grid.t_end)
    if outside > TAIL_MASS_TOL:
        errmsg = 'Grid [{:.4g}, {:.4g}] too narrow for {}: tail mass {:.3e} > {:.0e}.'.format(
            grid.t_start, grid.t_end, shape, outside, TAIL_MASS_TOL)
        log.critical(errmsg)
        raise GridError(errmsg)

    amps = shape.envelope(grid.times)
    mass = trapz_norm2(amps, grid.dt)
    if mass <= 0.0:
        errmsg = 'Pulse {} has no samples on the grid.'.format(shape)
        log.critical(errmsg)
        raise GridError(errmsg)
    amps = amps / np.sqrt(mass)

    return WavePacket(grid, amps, float(detuning), direction)


def inner_product(a, b):
    """Overlap <a|b> of two packets on the same grid and carrier.

    Direction is bookkeeping only and does not enter the overlap.

    """
    a.check_compatible(b)
    return trapz_inner(a.amplitudes, b.amplitudes, a.grid.dt)


def scale_shift(packet, factor=1.0, delay=0.0):
    """Multiply a packet by ``factor`` and translate it later by ``delay``.

    Raises:
        GridError: if ``delay`` is not an integer number of steps, or if more
            than 1e-8 of the mass would be pushed off the grid.

    """
    dt = packet.grid.dt
    nshift = delay / dt
    nint = int(round(nshift))
    if abs(nshift - nint) > 1e-9 * max(1.0, abs(nshift)):
        errmsg = 'Delay {} is not a multiple of the grid step {}.'.format(delay, dt)
        log.critical(errmsg)
        raise GridError(errmsg)

    amps = packet.amplitudes
    npts = len(amps)
    shifted = np.zeros(npts, dtype=complex)
    if abs(nint) >= npts:
        dropped = amps
    elif nint > 0:
        shifted[nint:] = amps[:npts-nint]
        dropped = amps[npts-nint-1:]
    elif nint < 0:
        shifted[:npts+nint] = amps[-nint:]
        dropped = amps[:-nint+1]
    else:
        shifted[:] = amps
        dropped = np.zeros(2, dtype=complex)

    # the boundary sample that survives is counted as half of the lost interval
    lost = trapz_norm2(dropped, dt) if len(dropped) >= 2 else float(np.abs(dropped[0])**2 * dt)
    if lost > TAIL_MASS_TOL:
        errmsg = 'Shift by {} pushes {:.3e} of the packet off the grid.'.format(delay, lost)
        log.critical(errmsg)
        raise GridError(errmsg)

    return packet.with_amplitudes(complex(factor) * shifted)
