"""
wgqed.util
==========

General utilities: exception classes, numerical tolerances, the compiled
scattering kernels and the trapezoidal quadrature shared by every module.

"""
import numpy as np
import numba

from desiutil.log import get_logger
log = get_logger()

# Mass allowed outside a grid (or dropped by a shift) before we complain.
TAIL_MASS_TOL = 1e-8

# Smallest tolerance used when clamping T, R and kappa into [0, 1].
CLAMP_FLOOR = 1e-9

# Below this |z| the phi-functions are evaluated with their Taylor series.
PHI_SERIES_CUT = 1e-2


class GridError(ValueError):
    """Invalid, too narrow or otherwise unusable time grid."""


class GridMismatchError(GridError):
    """Packets living on different grids (or carriers) were combined."""


class ResolutionError(ValueError):
    """The time step does not resolve the pulse or the emitter kernel."""


class StateError(ValueError):
    """Malformed joint state, label, qubit vector or operator."""


class BinOverlapError(ValueError):
    """Early and late time bins are not separated by the pulse support."""


class NonlinearityError(RuntimeError):
    """A superposition input was not reproduced by the basis-input runs."""


class ConfigError(ValueError):
    """Invalid run configuration or sweep specification."""


def trapz_inner(a, b, dt):
    """Trapezoidal estimate of the overlap integral of two sampled envelopes.

    Args:
        a (complex array): bra envelope (conjugated).
        b (complex array): ket envelope.
        dt (float): sample spacing.

    Returns:
        complex: sum_k w_k conj(a_k) b_k dt with end-point weights 1/2.

    """
    inner = np.vdot(a, b) - 0.5 * (np.conj(a[0]) * b[0] + np.conj(a[-1]) * b[-1])
    return complex(inner * dt)


def trapz_norm2(a, dt):
    """Squared trapezoidal norm of a sampled envelope."""
    return trapz_inner(a, a, dt).real


def rms_bandwidth(a, dt):
    """Root-mean-square angular bandwidth estimated from sample differences.

    Zero for an identically vanishing envelope.

    """
    mass = trapz_norm2(a, dt)
    if mass <= 0.0:
        return 0.0
    slope2 = np.sum(np.abs(np.diff(a))**2) / dt
    return float(np.sqrt(slope2 / mass))


def phi_functions(z):
    """Exponential-integrator weights phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2.

    Small arguments use a fifth-order series to avoid cancellation.

    """
    z = complex(z)
    if abs(z) < PHI_SERIES_CUT:
        phi1 = 1. + z/2. + z**2/6. + z**3/24. + z**4/120.
        phi2 = 0.5 + z/6. + z**2/24. + z**3/120. + z**4/720.
    else:
        ez = np.exp(z)
        phi1 = (ez - 1.) / z
        phi2 = (ez - 1. - z) / z**2
    return complex(phi1), complex(phi2)


# Both kernels below integrate e' = lambda*e + A(tau) from e(tau_0) = 0; the
# reflected envelope is -(Gamma_1D/2) * e. Plain loops compile well under
# numba and keep the recursion readable.

@numba.jit(nopython=True)
def _etd_kernel(amps, decay, w0, w1, out):
    """Exponential time-differencing recursion, exact for piecewise-linear A."""
    out[0] = 0j
    for n in range(len(amps) - 1):
        out[n+1] = decay * out[n] + w0 * amps[n] + w1 * amps[n+1]


@numba.jit(nopython=True)
def _convolution_kernel(amps, powers, dt, out):
    """Direct trapezoidal convolution with the sampled kernel, O(n^2)."""
    npts = len(amps)
    out[0] = 0j
    for n in range(1, npts):
        acc = 0.5 * (amps[0] * powers[n] + amps[n])
        for k in range(1, n):
            acc += amps[k] * powers[n-k]
        out[n] = acc * dt


def etd_response(amps, lam, dt):
    """Driven emitter amplitude on the grid by the exponential integrator.

    Args:
        amps (complex array): incident envelope samples.
        lam (complex): kernel exponent i*delta - Gamma/2.
        dt (float): sample spacing.

    Returns:
        complex array, same length as ``amps``.

    """
    z = lam * dt
    phi1, phi2 = phi_functions(z)
    decay = np.exp(z)
    w0 = dt * (phi1 - phi2)
    w1 = dt * phi2

    amps = np.ascontiguousarray(amps, dtype=np.complex128)
    out = np.zeros_like(amps)
    _etd_kernel(amps, complex(decay), complex(w0), complex(w1), out)
    return out


def convolution_response(amps, lam, dt):
    """Driven emitter amplitude by brute-force trapezoidal convolution."""
    amps = np.ascontiguousarray(amps, dtype=np.complex128)
    powers = np.exp(lam * dt * np.arange(len(amps)))
    out = np.zeros_like(amps)
    _convolution_kernel(amps, powers.astype(np.complex128), dt, out)
    return out


def clamp_unit(value, floor, name='value'):
    """Clamp a probability into [0, 1], noting how far outside it was.

    Values outside by at most ``floor`` are quadrature noise and only logged
    at debug level; anything further is a warning.

    """
    if 0.0 <= value <= 1.0:
        return value
    excess = -value if value < 0.0 else value - 1.0
    if excess <= floor:
        log.debug('Clamping {}={:.3e} into [0, 1] (floor {:.1e}).'.format(name, value, floor))
    else:
        log.warning('Clamping {}={:.3e} into [0, 1]; exceeds numerical floor {:.1e}.'.format(
            name, value, floor))
    return min(max(value, 0.0), 1.0)


def is_unitary(u, atol=1e-12):
    """True if the square matrix ``u`` is unitary to within ``atol``."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol, rtol=0.))
