"""
wgqed.jointstate
================

Branch-labeled states of one emitter qubit and one photon (polarization,
port and spatial envelope), with scalar sectors for photon loss and heralded
failure. Implements the four-level scattering rule, the heralded Z-block
and single-qubit operations on the emitter.

Linear and circular polarizations are related by

    |h> = (|sigma+> + |sigma->)/sqrt(2),   |v> = (|sigma+> - |sigma->)/sqrt(2).

"""
import enum
from dataclasses import dataclass
from types import MappingProxyType
from typing import NamedTuple

import numpy as np

from wgqed.pulse import Direction, WavePacket, inner_product
from wgqed.scatter import scatter
from wgqed.util import StateError, is_unitary

from desiutil.log import get_logger
log = get_logger()


class Level(enum.Enum):
    """Emitter ground levels. G_MINUS/G_PLUS encode |0>_a/|1>_a of the
    four-level emitter; S/G are the decoupled and mirror levels of the
    three-level emitter."""
    G_MINUS = 'g-'
    G_PLUS = 'g+'
    S = 's'
    G = 'g'


class Polarization(enum.Enum):
    SIGMA_PLUS = 'sigma+'
    SIGMA_MINUS = 'sigma-'
    H = 'h'
    V = 'v'


class Port(enum.Enum):
    WAVEGUIDE = 'waveguide'
    OUTPUT = 'output'


# qubit pairs (|0>, |1>) sharing one emitter
QUBIT_LEVELS = ((Level.G_MINUS, Level.G_PLUS), (Level.S, Level.G))

# the co-polarized (coupled) branches of the four-level emitter
_COUPLED = {(Level.G_PLUS, Polarization.SIGMA_PLUS), (Level.G_MINUS, Polarization.SIGMA_MINUS)}

_LINEAR = (Polarization.H, Polarization.V)
_CIRCULAR = (Polarization.SIGMA_PLUS, Polarization.SIGMA_MINUS)

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class BranchLabel(NamedTuple):
    emitter: Level
    polarization: Polarization = Polarization.H
    port: Port = Port.WAVEGUIDE
    direction: Direction = Direction.RIGHTWARD

    def replace(self, **kwargs):
        return self._replace(**kwargs)


def level_index(level):
    """Qubit index (0 or 1) of an emitter level."""
    for pair in QUBIT_LEVELS:
        if level in pair:
            return pair.index(level)
    errmsg = 'Unknown emitter level {!r}.'.format(level)
    log.critical(errmsg)
    raise StateError(errmsg)


def _partner(level, index):
    for pair in QUBIT_LEVELS:
        if level in pair:
            return pair[index]


@dataclass(frozen=True, eq=False)
class JointState:
    """Superposition of labeled branches, each carrying a spatial envelope.

    Attributes:
        branches (mapping): :class:`BranchLabel` -> :class:`WavePacket`.
        loss_weight (float): probability that left the waveguide.
        failure_weight (float): probability discarded by a failure herald.

    """
    branches: MappingProxyType
    loss_weight: float = 0.0
    failure_weight: float = 0.0

    def __post_init__(self):
        branches = dict(self.branches)
        reference = None
        for label, packet in branches.items():
            if not isinstance(label, BranchLabel):
                errmsg = 'Branch labels must be BranchLabel, got {!r}.'.format(label)
                log.critical(errmsg)
                raise StateError(errmsg)
            if reference is None:
                reference = packet
            else:
                reference.check_compatible(packet)
        if self.loss_weight < 0.0 or self.failure_weight < 0.0:
            errmsg = 'Loss and failure weights must be non-negative.'
            log.critical(errmsg)
            raise StateError(errmsg)
        object.__setattr__(self, 'branches', MappingProxyType(branches))

    @classmethod
    def from_amplitudes(cls, amplitudes, packet, **kwargs):
        """State sum_l c_l |l> with every branch carrying c_l times ``packet``."""
        branches = {label: (complex(amp) * packet).with_direction(label.direction)
                    for label, amp in amplitudes.items()}
        return cls(branches, **kwargs)

    @property
    def branch_mass(self):
        return float(sum(packet.mass for packet in self.branches.values()))

    @property
    def total_probability(self):
        return self.branch_mass + self.loss_weight + self.failure_weight

    @property
    def grid(self):
        for packet in self.branches.values():
            return packet.grid
        return None

    def labels(self):
        return list(self.branches.keys())

    def get(self, label):
        return self.branches.get(label)

    def polarizations(self):
        return {label.polarization for label in self.branches}

    def with_branches(self, branches, loss_weight=None, failure_weight=None):
        return JointState(branches,
                          self.loss_weight if loss_weight is None else loss_weight,
                          self.failure_weight if failure_weight is None else failure_weight)

    def relabel(self, func):
        """Apply ``func(label) -> label`` to every branch, merging collisions."""
        out = {}
        for label, packet in self.branches.items():
            _accumulate(out, func(label), packet)
        return self.with_branches(out)

    def allclose(self, other, atol=1e-10):
        """Branch-wise pointwise comparison (absent branches count as zero)."""
        for label in set(self.branches) | set(other.branches):
            mine, theirs = self.branches.get(label), other.branches.get(label)
            amine = np.zeros(1) if mine is None else mine.amplitudes
            atheirs = np.zeros(1) if theirs is None else theirs.amplitudes
            if not np.allclose(amine, atheirs, rtol=0.0, atol=atol):
                return False
        return (abs(self.loss_weight - other.loss_weight) <= atol and
                abs(self.failure_weight - other.failure_weight) <= atol)


@dataclass(frozen=True, eq=False)
class HeraldOutcome:
    """Success-conditioned branches plus the failure and loss sectors."""
    success_state: JointState
    failure_weight: float
    loss_weight: float
    p_success: float

    @property
    def total_probability(self):
        return self.p_success + self.failure_weight + self.loss_weight


def _accumulate(store, label, packet):
    if label in store:
        store[label] = store[label] + packet.with_direction(store[label].direction)
    else:
        store[label] = packet.with_direction(label.direction)


def joint_overlap(a, b):
    """<a|b> summed over common branches."""
    total = 0j
    for label, packet in b.branches.items():
        other = a.branches.get(label)
        if other is not None:
            total += inner_product(other, packet)
    return complex(total)


def _basis_change(state, source, target):
    """Rotate polarization labels between the linear and circular bases."""
    out = {}
    for label, packet in state.branches.items():
        if label.polarization not in source:
            errmsg = 'Unexpected polarization label {} (expected one of {}).'.format(
                label.polarization.value, [p.value for p in source])
            log.critical(errmsg)
            raise StateError(errmsg)
        # both bases satisfy |s0> = (|t0> + |t1>)/sqrt2, |s1> = (|t0> - |t1>)/sqrt2
        sign = 1.0 if label.polarization is source[0] else -1.0
        _accumulate(out, label.replace(polarization=target[0]), _SQRT_HALF * packet)
        _accumulate(out, label.replace(polarization=target[1]), (sign * _SQRT_HALF) * packet)
    return state.with_branches(out)


def to_circular(state):
    """Express h/v branches in the sigma+/sigma- basis."""
    return _basis_change(state, _LINEAR, _CIRCULAR)


def to_linear(state):
    """Express sigma+/sigma- branches in the h/v basis."""
    return _basis_change(state, _CIRCULAR, _LINEAR)


def scatter_four_level(state, emitter, coupling_boost=1.0, method='etd_recursive'):
    """Scatter a circularly polarized state off the four-level emitter.

    Co-polarized branches (g+ with sigma+, g- with sigma-) are replaced by
    the combined output mode Phi = Psi + 2 Phi_r of the two-sided block, the
    other branches pass unchanged. The mass removed from the scattered
    branches is added to ``loss_weight``.

    Args:
        state (JointState): branches with sigma+/sigma- labels.
        emitter (EmitterParams): emitter rates.
        coupling_boost (float): multiplies Gamma_1D inside the block.
        method (str): scattering method.

    Returns:
        :class:`JointState`

    """
    params = emitter.boosted(coupling_boost)
    out, lost = {}, 0.0
    for label, packet in state.branches.items():
        if label.polarization not in _CIRCULAR:
            errmsg = 'Four-level scattering needs sigma+/sigma- branches, got {}.'.format(
                label.polarization.value)
            log.critical(errmsg)
            raise StateError(errmsg)
        if label.emitter not in QUBIT_LEVELS[0]:
            errmsg = 'Four-level scattering needs g-/g+ emitter levels, got {}.'.format(label.emitter.value)
            log.critical(errmsg)
            raise StateError(errmsg)
        if (label.emitter, label.polarization) in _COUPLED and packet.mass > 0.0:
            result = scatter(packet, params, method=method)
            combined = result.transmitted + result.reflected.with_direction(packet.direction)
            lost += max(packet.mass - combined.mass, 0.0)
            _accumulate(out, label, combined)
        else:
            _accumulate(out, label, packet)
    return state.with_branches(out, loss_weight=state.loss_weight + lost)


def herald_filter(state, keep):
    """Keep the branches with polarization ``keep``; the rest is a heralded failure.

    Returns:
        :class:`HeraldOutcome` whose success state carries the kept branches
        and the updated failure and loss sectors.

    """
    kept, discarded = {}, 0.0
    for label, packet in state.branches.items():
        if label.polarization is keep:
            kept[label] = packet
        else:
            discarded += packet.mass
    failure = state.failure_weight + discarded
    success = state.with_branches(kept, failure_weight=failure)
    return HeraldOutcome(success_state=success, failure_weight=float(failure),
                         loss_weight=float(state.loss_weight), p_success=success.branch_mass)


def z_block(state, emitter, coupling_boost=1.0, method='etd_recursive', output_port=Port.OUTPUT):
    """Heralded conditional-Z block.

    An h-polarized photon enters the two-sided scattering block; the
    v-polarized output carries -Z_a on the emitter with the reflected
    envelope Phi_r, while h-polarized output heralds a failure.

    Args:
        state (JointState): emitter qubit times an h-polarized photon.
        emitter (EmitterParams): emitter rates.
        coupling_boost (float): multiplies Gamma_1D inside the block.
        method (str): scattering method.
        output_port (Port): port label given to the success branches.

    Returns:
        :class:`HeraldOutcome`

    Raises:
        StateError: if any branch is not h-polarized.

    """
    bad = state.polarizations() - {Polarization.H}
    if bad:
        errmsg = 'Z-block input must be h-polarized, got {}.'.format(sorted(p.value for p in bad))
        log.critical(errmsg)
        raise StateError(errmsg)

    scattered = scatter_four_level(to_circular(state), emitter, coupling_boost, method=method)
    outcome = herald_filter(to_linear(scattered), keep=Polarization.V)

    success = outcome.success_state.relabel(lambda label: label.replace(port=output_port))
    return HeraldOutcome(success_state=success, failure_weight=outcome.failure_weight,
                         loss_weight=outcome.loss_weight, p_success=outcome.p_success)


def emitter_unitary(state, u):
    """Apply the 2x2 unitary ``u`` to the emitter qubit of every branch.

    Raises:
        StateError: if ``u`` is not unitary to 1e-12.

    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u, atol=1e-12):
        errmsg = 'Emitter operation must be a 2x2 unitary, got\n{}'.format(u)
        log.critical(errmsg)
        raise StateError(errmsg)

    out = {}
    for label, packet in state.branches.items():
        col = level_index(label.emitter)
        for row in range(2):
            if u[row, col] != 0.0:
                _accumulate(out, label.replace(emitter=_partner(label.emitter, row)),
                            u[row, col] * packet)
    return state.with_branches(out)
