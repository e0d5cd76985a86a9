"""
wgqed.gates
===========

Heralded atom-photon entangling gates built from the Z-block, the
conditional maps they implement on the photon (x) emitter qubit pair, and
the figures of merit used to benchmark them.

Two-qubit vectors and operators use the index 2*p + a, photon qubit first.
Photon qubits are encoded as time bins (early = |0>, late = |1>) or as
polarizations (v = |0>, h = |1>).

"""
import time
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh, eigvalsh

from wgqed.pulse import (PULSE_SHAPES, PlaneWaveWindow, TimeGrid, WavePacket,
                         inner_product, make_pulse, scale_shift, zeros_like)
from wgqed.scatter import EmitterParams, plane_wave_f
from wgqed.jointstate import (BranchLabel, JointState, Level, Polarization, Port,
                              emitter_unitary, level_index, z_block)
from wgqed.util import (BinOverlapError, NonlinearityError, StateError, trapz_inner)

from desiutil.log import get_logger
log = get_logger()

# Gram-Schmidt drop tolerance (envelope norm) and superposition reconstruction tolerance.
MODE_DROP_TOL = 1e-10
LINEARITY_TOL = 1e-8

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)

# |0>_p<0| (x) H Z + |1>_p<1| (x) Z H
TIME_BIN_TARGET = np.kron(P0, HADAMARD @ Z) + np.kron(P1, Z @ HADAMARD)
# |0>_p<0| (x) 1 + |1>_p<1| (x) Z, the controlled-phase gate
POLARIZATION_TARGET = np.kron(P0, I2) + np.kron(P1, Z)

QUBIT_STATES = {
    '0': np.array([1, 0], dtype=complex),
    '1': np.array([0, 1], dtype=complex),
    '+': np.array([1, 1], dtype=complex) / np.sqrt(2.),
    '-': np.array([1, -1], dtype=complex) / np.sqrt(2.),
    '+i': np.array([1, 1j], dtype=complex) / np.sqrt(2.),
    '-i': np.array([1, -1j], dtype=complex) / np.sqrt(2.),
}

# Measurement bases: (|b_0>, |b_1>)
MEASUREMENT_BASES = {
    'x': (QUBIT_STATES['+'], QUBIT_STATES['-']),
    'y': (QUBIT_STATES['+i'], QUBIT_STATES['-i']),
    'z': (QUBIT_STATES['0'], QUBIT_STATES['1']),
}

# Four computational inputs followed by two superposition checks.
MAP_INPUTS = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [0.5, 0.5, 0.5, 0.5],
    np.kron(QUBIT_STATES['+i'], QUBIT_STATES['+i']),
], dtype=complex)

PROTOCOLS = ('time-bin', 'polarization')


def qubit_state(label):
    """Pauli eigenstate vector from a label in {0, 1, +, -, +i, -i}."""
    try:
        return QUBIT_STATES[str(label)].copy()
    except KeyError:
        errmsg = 'Unknown qubit state {!r}; choose from {}.'.format(label, list(QUBIT_STATES))
        log.critical(errmsg)
        raise StateError(errmsg)


def gate_target(protocol):
    if protocol == 'time-bin':
        return TIME_BIN_TARGET
    elif protocol == 'polarization':
        return POLARIZATION_TARGET
    errmsg = 'Unknown protocol {!r}; choose from {}.'.format(protocol, PROTOCOLS)
    log.critical(errmsg)
    raise ValueError(errmsg)


@dataclass(frozen=True)
class NoCorrector:
    """Bare reference arm."""
    name = 'none'


@dataclass(frozen=True)
class Attenuator:
    """Scalar attenuation and phase modulation of the reference arm.

    ``k=None`` selects the narrowband reflection amplitude of the gate block.

    """
    k: Optional[complex] = None
    name = 'attenuator'


@dataclass(frozen=True)
class SecondScatterer:
    """A copy of the scattering block with its emitter frozen in one level.

    ``params=None`` reuses the gate emitter.

    """
    params: Optional[EmitterParams] = None
    name = 'second-scatterer'


WFC_VARIANTS = {'none': NoCorrector, 'attenuator': Attenuator,
                'second-scatterer': SecondScatterer}


@dataclass(frozen=True, eq=False)
class ConditionalMap:
    """Success-conditioned action of a protocol on the qubit pair.

    Attributes:
        kraus_ops (tuple): 4x4 Kraus operators, one per orthonormal output mode.
        modes (tuple): the orthonormal output envelopes matching ``kraus_ops``.
        p_success_avg (float): success probability averaged over the
            computational inputs.
        p_success_min (float): worst-case success probability over all inputs.
        herald_spec (str): description of the success condition.
        failure_rate (float): heralded failure averaged over computational inputs.
        loss_rate (float): loss averaged over computational inputs.
        linearity_residual (float): linearity residual of the superposition checks.

    """
    kraus_ops: Tuple[np.ndarray, ...]
    modes: Tuple[WavePacket, ...]
    p_success_avg: float
    p_success_min: float
    herald_spec: str = ''
    failure_rate: float = 0.0
    loss_rate: float = 0.0
    linearity_residual: float = 0.0

    @property
    def effect(self):
        """sum_m K_m^dagger K_m."""
        return sum(k.conj().T @ k for k in self.kraus_ops)

    def apply(self, vector):
        """Unnormalized output vectors K_m |x>, one per mode."""
        vector = np.asarray(vector, dtype=complex)
        return [k @ vector for k in self.kraus_ops]


@dataclass(frozen=True)
class GateReport:
    process_fidelity: float
    average_fidelity: float
    p_success_avg: float
    p_success_min: float
    failure_rate: float
    loss_rate: float
    entangling_power_witness: float
    n_kraus: int = 1

    def as_row(self):
        return {'process_fidelity': self.process_fidelity,
                'average_fidelity': self.average_fidelity,
                'p_success_avg': self.p_success_avg,
                'p_success_min': self.p_success_min,
                'failure_rate': self.failure_rate,
                'loss_rate': self.loss_rate,
                'entangling_power_witness': self.entangling_power_witness,
                'n_kraus': self.n_kraus}


def _kraus_list(kraus):
    ops = kraus.kraus_ops if isinstance(kraus, ConditionalMap) else kraus
    if isinstance(ops, np.ndarray) and ops.ndim == 2:
        ops = [ops]
    ops = [np.asarray(k, dtype=complex) for k in ops]
    if len(ops) == 0:
        errmsg = 'Conditional map has no Kraus operators.'
        log.critical(errmsg)
        raise StateError(errmsg)
    return ops


def process_fidelity(kraus, target):
    """Normalized Choi-state overlap of a (sub-normalized) map with a unitary.

    F = sum_m |tr(U^dagger K_m)|^2 / (d sum_m tr(K_m^dagger K_m)), d = 4.

    Args:
        kraus: :class:`ConditionalMap` or a sequence of Kraus matrices.
        target (array): the ideal unitary.

    Returns:
        float in [0, 1], invariant under global phases of either argument.

    """
    ops = _kraus_list(kraus)
    target = np.asarray(target, dtype=complex)
    dim = target.shape[0]
    mass = sum(np.trace(k.conj().T @ k).real for k in ops)
    if mass <= 0.0:
        errmsg = 'Conditional map has zero success mass.'
        log.critical(errmsg)
        raise StateError(errmsg)
    overlap = sum(abs(np.trace(target.conj().T @ k))**2 for k in ops)
    return float(min(overlap / (dim * mass), 1.0))


def average_fidelity(process_fid, dim=4):
    """Average gate fidelity from the process fidelity, (d F + 1)/(d + 1)."""
    return (dim * process_fid + 1.0) / (dim + 1.0)


def concurrence(psi, atol=1e-8):
    """Concurrence 2|ad - bc| of a normalized two-qubit pure state."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.shape != (4,) or abs(np.vdot(psi, psi).real - 1.0) > atol:
        errmsg = 'Concurrence needs a normalized 4-vector, got norm^2={}.'.format(
            np.vdot(psi, psi).real if psi.size else 0.)
        log.critical(errmsg)
        raise StateError(errmsg)
    return float(2.0 * abs(psi[0] * psi[3] - psi[1] * psi[2]))


def wootters_concurrence(rho):
    """Concurrence of a two-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    rho = rho / np.trace(rho).real
    yy = np.kron(Y, Y)
    rho_tilde = yy @ rho.conj() @ yy
    eigs = np.linalg.eigvals(rho @ rho_tilde)
    lam = np.sort(np.sqrt(np.clip(eigs.real, 0.0, None)))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def choi_concurrence(kraus):
    """Entangling-power witness: I-concurrence of the normalized Choi state.

    The Choi vector of each Kraus operator is split between the photon
    (output, input) and emitter (output, input) sides; its reduced purity
    gives sqrt(2 (1 - tr rho^2)), equal to 1 for the controlled-phase gate
    and 0 for product operators. Several Kraus operators are averaged with
    their weights.

    """
    ops = _kraus_list(kraus)
    weights, values = [], []
    for k in ops:
        weight = np.trace(k.conj().T @ k).real
        if weight <= 0.0:
            continue
        # k[(po, ao), (pi, ai)] -> m[(po, pi), (ao, ai)]
        tensor = k.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
        svals = np.linalg.svd(tensor / np.sqrt(weight), compute_uv=False)
        purity = float(np.sum(svals**4))
        weights.append(weight)
        values.append(np.sqrt(max(2.0 * (1.0 - purity), 0.0)))
    if not weights:
        errmsg = 'Conditional map has zero success mass.'
        log.critical(errmsg)
        raise StateError(errmsg)
    return float(np.dot(weights, values) / np.sum(weights))


def _psd_sqrt(matrix):
    """Square root of a Hermitian positive semi-definite matrix."""
    evals, evecs = eigh(matrix)
    return (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T


def state_fidelity(rho, sigma):
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of two states.

    Either argument may be a pure-state vector, in which case the fidelity
    reduces to an expectation value.

    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.ndim == 1 and sigma.ndim == 1:
        return float(abs(np.vdot(rho, sigma))**2)
    if rho.ndim == 1 or sigma.ndim == 1:
        vec, dens = (rho, sigma) if rho.ndim == 1 else (sigma, rho)
        return float(min(np.vdot(vec, dens @ vec).real, 1.0))
    root = _psd_sqrt(rho)
    evals = eigvalsh(root @ sigma @ root)
    return float(min(np.sum(np.sqrt(np.clip(evals, 0.0, None)))**2, 1.0))


def as_density(state):
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def gate_report(cmap, target):
    """Benchmark a conditional map against its ideal unitary."""
    fid = process_fidelity(cmap, target)
    return GateReport(process_fidelity=fid, average_fidelity=average_fidelity(fid),
                      p_success_avg=cmap.p_success_avg, p_success_min=cmap.p_success_min,
                      failure_rate=cmap.failure_rate, loss_rate=cmap.loss_rate,
                      entangling_power_witness=choi_concurrence(cmap),
                      n_kraus=len(cmap.kraus_ops))


def _orthonormal_modes(envelopes, tol=MODE_DROP_TOL):
    """Modified Gram-Schmidt (two passes) over a list of packets."""
    modes = []
    for env in envelopes:
        resid = env.amplitudes.copy()
        for _ in range(2):
            for mode in modes:
                resid = resid - trapz_inner(mode.amplitudes, resid, env.grid.dt) * mode.amplitudes
        norm = np.sqrt(max(trapz_inner(resid, resid, env.grid.dt).real, 0.0))
        if norm > tol:
            modes.append(env.with_amplitudes(resid / norm))
    return modes


def extract_conditional_map(outputs, herald_spec='', failures=None, losses=None,
                            inputs=MAP_INPUTS):
    """Kraus operators of a heralded protocol from its per-input success envelopes.

    Args:
        outputs (sequence): one mapping per row of ``inputs``; each maps the
            output qubit pair (p, a) to its success envelope.
        herald_spec (str): description of the success condition.
        failures, losses (sequence, optional): per-input failure and loss
            weights of the four computational inputs.
        inputs (array): input vectors; the first four must be the
            computational basis, any further rows are linearity checks.

    Returns:
        :class:`ConditionalMap`

    Raises:
        NonlinearityError: if a check input differs from the superposition of the
            basis-input outputs by more than 1e-8.

    """
    inputs = np.asarray(inputs, dtype=complex)
    if len(outputs) != len(inputs) or len(inputs) < 4:
        errmsg = 'Need outputs for the four basis inputs (and checks), got {}.'.format(len(outputs))
        log.critical(errmsg)
        raise StateError(errmsg)

    keys = [(p, a) for p in range(2) for a in range(2)]
    basis = outputs[:4]

    ordered = [basis[i][key] for i in range(4) for key in keys if key in basis[i]]
    modes = _orthonormal_modes(ordered)

    # Linearity: each check input must be reproduced by superposing the basis runs.
    residual = 0.0
    for vec, check in zip(inputs[4:], outputs[4:]):
        resid2 = 0.0
        for key in keys:
            predicted = None
            for i in range(4):
                if vec[i] != 0.0 and key in basis[i]:
                    term = vec[i] * basis[i][key]
                    predicted = term if predicted is None else predicted + term
            actual = check.get(key)
            if predicted is None and actual is None:
                continue
            if predicted is None:
                diff = actual.amplitudes
            elif actual is None:
                diff = predicted.amplitudes
            else:
                diff = actual.amplitudes - predicted.amplitudes
            grid = (actual or predicted).grid
            resid2 += trapz_inner(diff, diff, grid.dt).real
        residual = max(residual, np.sqrt(max(resid2, 0.0)))
    if residual > LINEARITY_TOL:
        errmsg = 'Superposition residual {:.3e} exceeds {:.0e}; protocol is not linear.'.format(
            residual, LINEARITY_TOL)
        log.critical(errmsg)
        raise NonlinearityError(errmsg)

    kraus = []
    for mode in modes:
        k = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            for key, env in basis[i].items():
                k[2*key[0] + key[1], i] = inner_product(mode, env)
        kraus.append(k)
    if not kraus:
        kraus = [np.zeros((4, 4), dtype=complex)]

    effect = sum(k.conj().T @ k for k in kraus)
    eigs = np.linalg.eigvalsh(effect)
    if eigs[-1] > 1.0 + 1e-9:
        log.warning('Conditional map is not trace non-increasing: max eigenvalue {:.6g}.'.format(eigs[-1]))

    failure_rate = float(np.mean(failures)) if failures is not None else 0.0
    loss_rate = float(np.mean(losses)) if losses is not None else 0.0

    return ConditionalMap(kraus_ops=tuple(kraus), modes=tuple(modes),
                          p_success_avg=float(np.trace(effect).real / 4.0),
                          p_success_min=float(max(eigs[0], 0.0)),
                          herald_spec=herald_spec, failure_rate=failure_rate,
                          loss_rate=loss_rate, linearity_residual=float(residual))


def narrowband_packet(detuning=0.0):
    """Small flat-top packet standing in for a plane wave with the ``plane_wave`` method."""
    grid = TimeGrid.spanning(0.0, 1.0, 0.005)
    return make_pulse(PlaneWaveWindow(1.0), grid, detuning=detuning)


def prepare_packet(pulse, emitter, coupling_boost=1.0, grid=None):
    """Incident packet from a pulse shape (on the default grid) or an existing packet."""
    if isinstance(pulse, WavePacket):
        return pulse
    if isinstance(pulse, PULSE_SHAPES):
        gamma_total = min(emitter.gamma, emitter.boosted(coupling_boost).gamma)
        return make_pulse(pulse, grid, gamma_total=gamma_total)
    errmsg = 'Expected a pulse shape or WavePacket, got {!r}.'.format(pulse)
    log.critical(errmsg)
    raise ValueError(errmsg)


def _qubit_envelopes(state, photon_index):
    """Map success branches to {(p, a): envelope}."""
    out = {}
    for label, packet in state.branches.items():
        key = (photon_index(label), level_index(label.emitter))
        out[key] = out[key] + packet if key in out else packet
    return out


def _emitter_state(amps, packet, polarization=Polarization.H, port=Port.WAVEGUIDE):
    """Emitter superposition amps[0]|g-> + amps[1]|g+> times one photon branch."""
    levels = (Level.G_MINUS, Level.G_PLUS)
    amplitudes = {BranchLabel(levels[a], polarization, port): amps[a]
                  for a in range(2) if amps[a] != 0.0}
    return JointState.from_amplitudes(amplitudes, packet)


def time_bin_runner(packet, emitter, coupling_boost=1.0, method='etd_recursive'):
    """Per-input simulation of the time-bin gate.

    The early bin meets the Z-block before the emitter Hadamard, the late
    bin after it. Both bins use the same envelope relative to their start.

    """
    def run(vec):
        outputs, failure, loss = {}, 0.0, 0.0
        for photon in range(2):
            amps = vec[2*photon:2*photon+2]
            if not np.any(amps):
                continue
            state = _emitter_state(amps, packet)
            if photon == 0:
                outcome = z_block(state, emitter, coupling_boost, method=method)
                success = emitter_unitary(outcome.success_state, HADAMARD)
            else:
                outcome = z_block(emitter_unitary(state, HADAMARD), emitter, coupling_boost, method=method)
                success = outcome.success_state
            for key, env in _qubit_envelopes(success, lambda label: photon).items():
                outputs[key] = outputs[key] + env if key in outputs else env
            failure += outcome.failure_weight
            loss += outcome.loss_weight
        return outputs, failure, loss
    return run


def wfc_second_scatterer(pulse, params, coupling_boost=1.0, emitter_level=Level.G_PLUS,
                         method='etd_recursive', full_output=False):
    """Envelope leaving a second scattering block whose emitter stays in one level.

    The photon enters h-polarized (after a quarter-wave plate); the block's
    v-port envelope is Phi_r for an emitter in g+ and -Phi_r for g-, so the
    reference arm acquires exactly the distortion of the gate arm without
    entangling with the corrector.

    Args:
        full_output (bool): also return the block's heralded failure and
            loss weights.

    Returns:
        :class:`WavePacket`, or (WavePacket, failure, loss) if ``full_output``.

    """
    packet = prepare_packet(pulse, params, coupling_boost)
    state = JointState.from_amplitudes({BranchLabel(emitter_level): 1.0}, packet)
    outcome = z_block(state, params, coupling_boost, method=method)
    label = BranchLabel(emitter_level, Polarization.V, Port.OUTPUT, packet.direction)
    env = outcome.success_state.get(label)
    if env is None:
        env = zeros_like(packet)
    if full_output:
        return env, outcome.failure_weight, outcome.loss_weight
    return env


def polarization_runner(packet, emitter, wfc=NoCorrector(), coupling_boost=1.0,
                        method='etd_recursive'):
    """Per-input simulation of the polarization interferometer gate.

    The input polarizing beam splitter sends h (|1>_p) into the Z-block and
    v (|0>_p) into the reference arm. The Z-block success photon leaves
    v-polarized and is rotated back to h before recombination; h returning
    through the splitter heralds a failure.

    """
    if isinstance(wfc, Attenuator):
        k = wfc.k
        if k is None:
            params = emitter.boosted(coupling_boost)
            k = plane_wave_f(params, packet.carrier_detuning + emitter.detuning)
        k = complex(k)
        if abs(k) > 1.0 + 1e-12:
            errmsg = 'Attenuator amplitude must satisfy |k| <= 1, got {}.'.format(k)
            log.critical(errmsg)
            raise StateError(errmsg)
    elif isinstance(wfc, SecondScatterer):
        corrector = wfc.params or emitter
        # g- matches the -Z_a branch sign of the gate arm
        arm_env, arm_failure, arm_loss = wfc_second_scatterer(
            packet, corrector, coupling_boost, emitter_level=Level.G_MINUS, method=method,
            full_output=True)
        arm_failure /= packet.mass
        arm_loss /= packet.mass
    elif not isinstance(wfc, NoCorrector):
        errmsg = 'Unknown waveform corrector {!r}.'.format(wfc)
        log.critical(errmsg)
        raise ValueError(errmsg)

    def run(vec):
        outputs, failure, loss = {}, 0.0, 0.0

        gate_amps = vec[2:4]
        if np.any(gate_amps):
            outcome = z_block(_emitter_state(gate_amps, packet), emitter, coupling_boost, method=method)
            for key, env in _qubit_envelopes(outcome.success_state, lambda label: 1).items():
                outputs[key] = env
            failure += outcome.failure_weight
            loss += outcome.loss_weight

        arm_amps = vec[0:2]
        for a in range(2):
            if arm_amps[a] == 0.0:
                continue
            weight = abs(arm_amps[a])**2
            if isinstance(wfc, NoCorrector):
                env = scale_shift(packet, factor=arm_amps[a])
            elif isinstance(wfc, Attenuator):
                env = scale_shift(packet, factor=arm_amps[a] * k)
                loss += weight * (1.0 - abs(k)**2) * packet.mass
            else:
                env = arm_amps[a] * arm_env
                failure += weight * arm_failure * packet.mass
                loss += weight * arm_loss * packet.mass
            outputs[(0, a)] = env
        return outputs, failure, loss
    return run


def _run_map(run, herald_spec):
    outputs, failures, losses = [], [], []
    for ii, vec in enumerate(MAP_INPUTS):
        envs, failure, loss = run(vec)
        outputs.append(envs)
        if ii < 4:
            failures.append(failure)
            losses.append(loss)
    return extract_conditional_map(outputs, herald_spec=herald_spec,
                                   failures=failures, losses=losses)


def time_bin_gate(pulse, emitter, bin_separation=None, coupling_boost=1.0,
                  method='etd_recursive'):
    """Heralded time-bin entangling gate.

    Args:
        pulse: pulse shape or :class:`WavePacket` of each time bin.
        emitter (EmitterParams): emitter rates.
        bin_separation (float, optional): delay between early and late bins;
            defaults to the packet's grid span.
        coupling_boost (float): multiplies Gamma_1D inside the Z-block.
        method (str): scattering method.

    Returns:
        (ConditionalMap, GateReport)

    Raises:
        BinOverlapError: if the bins are closer than the pulse support.

    """
    t0 = time.time()
    packet = prepare_packet(pulse, emitter, coupling_boost)
    if bin_separation is None:
        bin_separation = packet.grid.t_end - packet.grid.t_start
    span = packet.support_span()
    if not bin_separation >= span:
        errmsg = 'Time bins separated by {:.4g} overlap: pulse support spans {:.4g}.'.format(
            bin_separation, span)
        log.critical(errmsg)
        raise BinOverlapError(errmsg)

    run = time_bin_runner(packet, emitter, coupling_boost, method)
    cmap = _run_map(run, herald_spec='v-polarized photon in either time bin')
    report = gate_report(cmap, TIME_BIN_TARGET)
    log.debug('Time-bin gate took {:.2f} seconds.'.format(time.time()-t0))
    return cmap, report


def polarization_gate(pulse, emitter, wfc=NoCorrector(), coupling_boost=1.0,
                      method='etd_recursive'):
    """Heralded polarization entangling gate with an optional waveform corrector.

    Args:
        pulse: pulse shape or :class:`WavePacket`.
        emitter (EmitterParams): emitter rates.
        wfc: :class:`NoCorrector`, :class:`Attenuator` or :class:`SecondScatterer`.
        coupling_boost (float): multiplies Gamma_1D inside the Z-block.
        method (str): scattering method.

    Returns:
        (ConditionalMap, GateReport)

    """
    t0 = time.time()
    packet = prepare_packet(pulse, emitter, coupling_boost)
    run = polarization_runner(packet, emitter, wfc, coupling_boost, method)
    cmap = _run_map(run, herald_spec='photon not returned h-polarized through the input splitter')
    report = gate_report(cmap, POLARIZATION_TARGET)
    log.debug('Polarization gate ({}) took {:.2f} seconds.'.format(wfc.name, time.time()-t0))
    return cmap, report


def entangling_gate(protocol, pulse, emitter, wfc=None, coupling_boost=1.0,
                    method='etd_recursive', bin_separation=None):
    """Dispatch to :func:`time_bin_gate` or :func:`polarization_gate`.

    For the polarization protocol ``wfc=None`` selects the second scatterer.

    """
    if protocol == 'time-bin':
        return time_bin_gate(pulse, emitter, bin_separation=bin_separation,
                             coupling_boost=coupling_boost, method=method)
    elif protocol == 'polarization':
        if wfc is None:
            wfc = SecondScatterer()
        return polarization_gate(pulse, emitter, wfc=wfc, coupling_boost=coupling_boost,
                                 method=method)
    gate_target(protocol)
