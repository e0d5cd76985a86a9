"""
wgqed.scatter
=============

Scattering of a single-photon packet off one emitter side-coupled to a
waveguide, in the Markovian (input-output) description.

The reflected envelope obeys

    B(tau) = -(Gamma_1D/2) int_{tau_0}^{tau} A(s) exp[(i delta - Gamma/2)(tau - s)] ds

and the transmitted envelope is A + B. Three evaluations are provided:

* ``etd_recursive``: exponential time differencing, exact for piecewise-linear
  envelopes and O(n); the production method.
* ``trapezoid``: brute-force trapezoidal convolution, O(n^2); a cross-check.
* ``plane_wave``: the narrowband limit B = -f0 A with
  f0 = Gamma_1D / (Gamma - 2 i delta); used for analytic narrowband studies.

"""
from dataclasses import dataclass, replace

import numpy as np

from wgqed.pulse import Direction, WavePacket, inner_product
from wgqed.util import (CLAMP_FLOOR, ResolutionError, StateError, trapz_inner,
                        trapz_norm2, etd_response, convolution_response, clamp_unit)

from desiutil.log import get_logger
log = get_logger()

SCATTER_METHODS = ('etd_recursive', 'trapezoid', 'plane_wave')

# dt*Gamma above which we warn / refuse.
_WARN_STEP = 0.1
_MAX_TRAPEZOID_STEP = 1.0
# rms bandwidth times dt above which the pulse is not resolved.
_MAX_BANDWIDTH_STEP = 0.5


@dataclass(frozen=True)
class EmitterParams:
    """Decay rates and detuning of one emitter.

    Attributes:
        gamma_1d (float): decay rate into the guided mode (sets the unit scale).
        gamma_prime (float): decay rate into all other channels. Exactly zero
            represents an infinite Purcell factor.
        detuning (float): added to the packet's carrier detuning to give the
            delta seen by the kernel.

    """
    gamma_1d: float = 1.0
    gamma_prime: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        if not (self.gamma_1d > 0.0 and np.isfinite(self.gamma_1d)):
            errmsg = 'gamma_1d must be positive and finite, got {}.'.format(self.gamma_1d)
            log.critical(errmsg)
            raise ValueError(errmsg)
        if not (self.gamma_prime >= 0.0 and np.isfinite(self.gamma_prime)):
            errmsg = 'gamma_prime must be non-negative and finite, got {}.'.format(self.gamma_prime)
            log.critical(errmsg)
            raise ValueError(errmsg)
        if not np.isfinite(self.detuning):
            errmsg = 'detuning must be finite, got {}.'.format(self.detuning)
            log.critical(errmsg)
            raise ValueError(errmsg)

    @classmethod
    def from_purcell(cls, purcell, gamma_1d=1.0, detuning=0.0):
        """Build from a Purcell factor; ``np.inf`` maps to gamma_prime = 0 exactly."""
        if not purcell > 0.0:
            errmsg = 'Purcell factor must be positive, got P={}.'.format(purcell)
            log.critical(errmsg)
            raise ValueError(errmsg)
        gamma_prime = 0.0 if np.isinf(purcell) else gamma_1d / purcell
        return cls(gamma_1d=gamma_1d, gamma_prime=gamma_prime, detuning=detuning)

    @property
    def gamma(self):
        """Total decay rate Gamma = Gamma_1D + Gamma'."""
        return self.gamma_1d + self.gamma_prime

    @property
    def purcell(self):
        return np.inf if self.gamma_prime == 0.0 else self.gamma_1d / self.gamma_prime

    @property
    def inverse_purcell(self):
        return self.gamma_prime / self.gamma_1d

    def boosted(self, coupling_boost=1.0):
        """Same emitter with Gamma_1D scaled by ``coupling_boost``."""
        if coupling_boost == 1.0:
            return self
        if not coupling_boost > 0.0:
            errmsg = 'coupling_boost must be positive, got {}.'.format(coupling_boost)
            log.critical(errmsg)
            raise ValueError(errmsg)
        return replace(self, gamma_1d=self.gamma_1d * coupling_boost)


@dataclass(frozen=True, eq=False)
class ScatterResult:
    """Output of one scattering event.

    ``transmittance``, ``reflectance`` and ``loss`` are normalized to the
    incident mass, as is ``f``.

    """
    incident: WavePacket
    transmitted: WavePacket
    reflected: WavePacket
    f: complex
    transmittance: float
    reflectance: float
    loss: float

    @property
    def T(self):
        return self.transmittance

    @property
    def R(self):
        return self.reflectance

    @property
    def kappa(self):
        return self.loss


def plane_wave_f(emitter, detuning=None):
    """Narrowband reflection amplitude f0 = Gamma_1D / (Gamma - 2 i delta)."""
    delta = emitter.detuning if detuning is None else detuning
    return complex(emitter.gamma_1d / (emitter.gamma - 2j * delta))


def closed_form_f_half_exponential(gamma_pulse, emitter):
    """Reflection fidelity of a half-exponential pulse of rate ``gamma_pulse``.

    Returns (1 + 1/P + gamma/Gamma_1D - 2 i delta/Gamma_1D)^-1, with 1/P = 0
    for an emitter without off-guide decay.

    """
    if not gamma_pulse > 0.0:
        errmsg = 'gamma_pulse must be positive, got {}.'.format(gamma_pulse)
        log.critical(errmsg)
        raise ValueError(errmsg)
    g1d = emitter.gamma_1d
    return 1.0 / (1.0 + emitter.inverse_purcell + gamma_pulse / g1d - 2j * emitter.detuning / g1d)


def tr_identities(f, emitter):
    """Transmittance and reflectance implied by the reflection fidelity ``f``.

    T = 1 - Re f [2 - 1/(1 + 1/P)] and R = Re f / (1 + 1/P). Both follow
    from energy balance of the Markovian kernel and hold for any pulse shape
    and detuning.

    """
    damp = 1.0 + emitter.inverse_purcell
    T = 1.0 - f.real * (2.0 - 1.0 / damp)
    R = f.real / damp
    return T, R


def check_resolution(packet, emitter, method='etd_recursive'):
    """Warn or raise if the grid does not resolve the pulse or the kernel."""
    dt = packet.grid.dt
    if method == 'plane_wave':
        return
    bandwidth_step = packet.bandwidth * dt
    if bandwidth_step > _MAX_BANDWIDTH_STEP:
        errmsg = 'Pulse under-resolved: rms bandwidth x dt = {:.3g} > {}.'.format(
            bandwidth_step, _MAX_BANDWIDTH_STEP)
        log.critical(errmsg)
        raise ResolutionError(errmsg)
    kernel_step = emitter.gamma * dt
    if method == 'trapezoid' and kernel_step > _MAX_TRAPEZOID_STEP:
        errmsg = 'Direct convolution needs dt*Gamma <= {}, got {:.3g}.'.format(
            _MAX_TRAPEZOID_STEP, kernel_step)
        log.critical(errmsg)
        raise ResolutionError(errmsg)
    if kernel_step > _WARN_STEP:
        log.warning('Insufficient resolution: dt*Gamma = {:.3g} > {}.'.format(kernel_step, _WARN_STEP))


def _conserving_scale(amps, refl, dt):
    """Factor s making |A + sB|^2 + |sB|^2 = |A|^2 exactly."""
    rnorm2 = trapz_norm2(refl, dt)
    if rnorm2 <= 0.0:
        return 1.0
    return -trapz_inner(amps, refl, dt).real / rnorm2


def scatter(psi, emitter, method='etd_recursive', log=None):
    """Scatter a single-photon packet off one emitter.

    Args:
        psi (WavePacket): incident packet (normalized or sub-normalized).
        emitter (EmitterParams): emitter rates; its detuning adds to the
            packet's carrier detuning.
        method (str): one of ``etd_recursive``, ``trapezoid``, ``plane_wave``.

    Returns:
        :class:`ScatterResult`. The reflected packet travels opposite to the
        incident one; the transmitted packet is the incident plus reflected
        envelope.

    Notes:
        Discrete quadrature breaks |A + B|^2 + |B|^2 = |A|^2 at O(dt^2) for
        an emitter with no off-guide loss. The reflected envelope of such an
        emitter is rescaled by the one real factor that restores it, so kappa
        is zero to rounding and A + B = transmitted still holds. The factor
        depends only on the envelope shape, never on its amplitude.

    """
    if log is None:
        from desiutil.log import get_logger
        log = get_logger()

    if method not in SCATTER_METHODS:
        errmsg = 'Unknown scattering method {!r}; choose from {}.'.format(method, SCATTER_METHODS)
        log.critical(errmsg)
        raise ValueError(errmsg)

    mass = psi.mass
    if mass <= 0.0:
        errmsg = 'Incident packet has zero norm.'
        log.critical(errmsg)
        raise StateError(errmsg)

    check_resolution(psi, emitter, method)

    delta = psi.carrier_detuning + emitter.detuning
    amps = psi.amplitudes
    dt = psi.grid.dt

    if method == 'plane_wave':
        refl = -plane_wave_f(emitter, delta) * amps
    else:
        lam = 1j * delta - 0.5 * emitter.gamma
        if method == 'etd_recursive':
            drive = etd_response(amps, lam, dt)
        else:
            drive = convolution_response(amps, lam, dt)
        refl = -0.5 * emitter.gamma_1d * drive

    if emitter.gamma_prime == 0.0:
        refl = _conserving_scale(amps, refl, dt) * refl

    trans = amps + refl
    transmitted = psi.with_amplitudes(trans)
    reflected = psi.with_amplitudes(refl, direction=psi.direction.flipped())

    T = transmitted.mass / mass
    R = reflected.mass / mass

    if emitter.gamma_prime == 0.0:
        kappa = max(1.0 - T - R, 0.0)
    else:
        kappa = clamp_unit(1.0 - T - R, CLAMP_FLOOR, name='kappa')

    T = clamp_unit(T, CLAMP_FLOOR, name='T')
    R = clamp_unit(R, CLAMP_FLOOR, name='R')

    f = -inner_product(psi, reflected) / mass

    return ScatterResult(incident=psi, transmitted=transmitted, reflected=reflected,
                         f=complex(f), transmittance=float(T), reflectance=float(R),
                         loss=float(kappa))


def mirror_gate_three_level(psi, emitter, atom_state, photon_qubit, method='etd_recursive'):
    """Unheralded three-level mirror gate.

    The emitter qubit is {|s>, |g>}; only |g> couples to the waveguide and
    acts as a mirror, so ideally |mu>_a |phi>_p -> (-X_p)^mu |mu>_a |phi>_p
    with the photon qubit {R, L} given by the propagation direction.

    Args:
        psi (WavePacket): spatial envelope shared by both directions.
        emitter (EmitterParams): emitter rates.
        atom_state (array-like): amplitudes over (|s>, |g>).
        photon_qubit (array-like): amplitudes over (R, L).

    Returns:
        (JointState, float, float): output state, fidelity with the ideal
        output, and the probability lost out of the waveguide.

    """
    from wgqed.jointstate import BranchLabel, JointState, Level, joint_overlap

    atom = _normalized_qubit(atom_state, 'atom_state')
    photon = _normalized_qubit(photon_qubit, 'photon_qubit')
    directions = (Direction.RIGHTWARD, Direction.LEFTWARD)
    base = psi * (1.0 / np.sqrt(psi.mass))

    result = scatter(base, emitter, method=method)
    refl_env = result.reflected.amplitudes
    trans_env = result.transmitted.amplitudes

    out, ideal = {}, {}

    def _add(store, label, amps):
        key = label
        if key in store:
            store[key] = store[key] + amps
        else:
            store[key] = amps

    for ip, direction in enumerate(directions):
        other = directions[1 - ip]
        # decoupled level: free propagation
        _add(out, BranchLabel(Level.S, direction=direction), atom[0] * photon[ip] * base.amplitudes)
        _add(ideal, BranchLabel(Level.S, direction=direction), atom[0] * photon[ip] * base.amplitudes)
        # mirror level
        _add(out, BranchLabel(Level.G, direction=direction), atom[1] * photon[ip] * trans_env)
        _add(out, BranchLabel(Level.G, direction=other), atom[1] * photon[ip] * refl_env)
        _add(ideal, BranchLabel(Level.G, direction=other), -atom[1] * photon[ip] * base.amplitudes)

    def _state(store):
        branches = {label: base.with_amplitudes(amps, direction=label.direction)
                    for label, amps in store.items()}
        return JointState(branches)

    loss = float(abs(atom[1])**2 * result.loss)
    output = JointState(_state(out).branches, loss_weight=loss)
    fidelity = float(abs(joint_overlap(_state(ideal), output))**2)
    return output, fidelity, loss


def _normalized_qubit(vec, name):
    vec = np.asarray(vec, dtype=complex).ravel()
    if vec.shape != (2,) or abs(np.vdot(vec, vec).real - 1.0) > 1e-8:
        errmsg = '{} must be a normalized two-component vector, got {}.'.format(name, vec)
        log.critical(errmsg)
        raise StateError(errmsg)
    return vec
