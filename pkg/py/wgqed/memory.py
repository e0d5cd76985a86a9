"""
wgqed.memory
============

Quantum-memory and remote-entanglement demonstrations on top of the
heralded gates: storing a photonic qubit in the emitter, reading it out onto
a fresh photon, and entangling two distant emitters with one photon.

Measurement outcomes are enumerated exhaustively and the Pauli-frame
corrections are derived from the ideal gate, so the conditional states are
deterministic.

"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from wgqed.gates import (MEASUREMENT_BASES, QUBIT_STATES, as_density, concurrence,
                         entangling_gate, gate_target, qubit_state, state_fidelity,
                         wootters_concurrence)
from wgqed.util import StateError

from desiutil.log import get_logger
log = get_logger()


@dataclass(frozen=True, eq=False)
class MemoryOutcome:
    """Heralded, corrected single-qubit state left by a store or retrieve step.

    Attributes:
        state (array): 2x2 density matrix, normalized.
        p_success (float): probability of the success herald.
        corrections (tuple): the 2x2 unitary applied for each measurement outcome.
        fidelity (float): fidelity with the qubit state that was handed over.

    """
    state: np.ndarray
    p_success: float
    corrections: Tuple[np.ndarray, ...]
    fidelity: float


@dataclass(frozen=True, eq=False)
class RemoteOutcome:
    """Two-emitter state heralded by one photon passing two gate sites.

    Attributes:
        states (tuple): normalized 4x4 density matrix of emitters (A, B) for
            each photon measurement outcome.
        outcome_probabilities (tuple): probability of each outcome.
        concurrence (float): outcome-weighted concurrence.
        p_success (float): probability that both heralds succeed.

    """
    states: Tuple[np.ndarray, ...]
    outcome_probabilities: Tuple[float, ...]
    concurrence: float
    p_success: float


def _measurement_basis(measurement):
    try:
        return MEASUREMENT_BASES[measurement]
    except KeyError:
        errmsg = 'Unknown measurement basis {!r}; choose from {}.'.format(
            measurement, list(MEASUREMENT_BASES))
        log.critical(errmsg)
        raise StateError(errmsg)


def _as_qubit(state, name):
    if isinstance(state, str):
        return qubit_state(state)
    state = np.asarray(state, dtype=complex)
    if state.shape == (2,):
        norm = np.vdot(state, state).real
        if abs(norm - 1.0) > 1e-8:
            errmsg = '{} must be normalized, got norm^2={}.'.format(name, norm)
            log.critical(errmsg)
            raise StateError(errmsg)
        return state
    if state.shape == (2, 2):
        return state / np.trace(state).real
    errmsg = '{} must be a qubit vector or 2x2 density matrix.'.format(name)
    log.critical(errmsg)
    raise StateError(errmsg)


def _teleport_corrections(target, measurement, measure_photon):
    """Pauli-frame corrections C_m = (A_m / s)^dagger for each outcome m.

    A_m maps the handed-over qubit onto the kept one after the ideal gate,
    a fiducial |+> on the receiving side, and projection of the measured
    qubit onto basis state m.

    """
    target = target.reshape(2, 2, 2, 2)  # [po, ao, pi, ai]
    plus = QUBIT_STATES['+']
    corrections = []
    for bvec in _measurement_basis(measurement):
        if measure_photon:
            # photon in, emitter |+>, measure photon: emitter out
            amap = np.einsum('p,pakl,l->ak', bvec.conj(), target, plus)
        else:
            # emitter in, photon |+>, measure emitter: photon out
            amap = np.einsum('a,pakl,k->pl', bvec.conj(), target, plus)
        scale = np.sqrt(np.trace(amap.conj().T @ amap).real / 2.0)
        unitary = amap / scale if scale > 0.0 else amap
        if scale <= 0.0 or not np.allclose(unitary.conj().T @ unitary, np.eye(2), atol=1e-10):
            errmsg = 'Measuring in the {} basis does not hand over the qubit.'.format(measurement)
            log.critical(errmsg)
            raise StateError(errmsg)
        corrections.append(unitary.conj().T)
    return corrections


def _site_map(protocol, pulse, emitter, wfc, coupling_boost, method, cmap):
    if cmap is None:
        cmap, _ = entangling_gate(protocol, pulse, emitter, wfc=wfc,
                                  coupling_boost=coupling_boost, method=method)
    return cmap


def memory_store(photon_state, pulse, emitter, protocol='time-bin', measurement='x',
                 wfc=None, coupling_boost=1.0, method='etd_recursive', cmap=None):
    """Store a photonic qubit in the emitter.

    The emitter starts in |+>_a, the gate entangles it with the incoming
    photon, the photon is measured in ``measurement`` and the outcome's
    correction is applied to the emitter.

    Args:
        photon_state: qubit vector or label ('0', '1', '+', '-', '+i', '-i').
        pulse: pulse shape or packet of the photon.
        emitter (EmitterParams): emitter rates.
        protocol (str): 'time-bin' or 'polarization'.
        measurement (str): photon measurement basis, 'x' or 'y'.
        cmap (ConditionalMap, optional): reuse an already computed gate map.

    Returns:
        :class:`MemoryOutcome`. A failed herald is reported through
        ``p_success``, never raised.

    """
    phi = _as_qubit(photon_state, 'photon_state')
    cmap = _site_map(protocol, pulse, emitter, wfc, coupling_boost, method, cmap)
    corrections = _teleport_corrections(gate_target(protocol), measurement, measure_photon=True)

    rho_in = np.kron(as_density(phi), as_density(QUBIT_STATES['+']))
    rho = np.zeros((2, 2), dtype=complex)
    for kraus in cmap.kraus_ops:
        out = (kraus @ rho_in @ kraus.conj().T).reshape(2, 2, 2, 2)  # [p, a, p', a']
        for bvec, corr in zip(_measurement_basis(measurement), corrections):
            cond = np.einsum('p,paqb,q->ab', bvec.conj(), out, bvec)
            rho += corr @ cond @ corr.conj().T

    return _finish(rho, corrections, phi)


def memory_retrieve(emitter_state, pulse, emitter, protocol='time-bin', measurement='x',
                    wfc=None, coupling_boost=1.0, method='etd_recursive', cmap=None):
    """Read the emitter qubit out onto a fresh photon.

    The photon starts in |+>_p, the gate entangles it with the emitter, the
    emitter is measured in ``measurement`` and the photon is corrected.

    Returns:
        :class:`MemoryOutcome` for the photon qubit.

    """
    chi = _as_qubit(emitter_state, 'emitter_state')
    cmap = _site_map(protocol, pulse, emitter, wfc, coupling_boost, method, cmap)
    corrections = _teleport_corrections(gate_target(protocol), measurement, measure_photon=False)

    rho_in = np.kron(as_density(QUBIT_STATES['+']), as_density(chi))
    rho = np.zeros((2, 2), dtype=complex)
    for kraus in cmap.kraus_ops:
        out = (kraus @ rho_in @ kraus.conj().T).reshape(2, 2, 2, 2)
        for bvec, corr in zip(_measurement_basis(measurement), corrections):
            cond = np.einsum('a,paqb,b->pq', bvec.conj(), out, bvec)
            rho += corr @ cond @ corr.conj().T

    return _finish(rho, corrections, chi)


def _finish(rho, corrections, reference):
    p_success = float(np.trace(rho).real)
    if p_success <= 0.0:
        log.warning('Herald never succeeds; returning the maximally mixed state.')
        return MemoryOutcome(state=np.eye(2, dtype=complex) / 2., p_success=0.0,
                             corrections=tuple(corrections), fidelity=0.0)
    rho = rho / p_success
    return MemoryOutcome(state=rho, p_success=p_success, corrections=tuple(corrections),
                         fidelity=state_fidelity(reference, rho))


def memory_round_trip(photon_state, pulse, emitter, protocol='time-bin', measurement='x',
                      wfc=None, coupling_boost=1.0, method='etd_recursive'):
    """Store then retrieve; returns (store outcome, retrieve outcome, fidelity to input)."""
    phi = _as_qubit(photon_state, 'photon_state')
    cmap, _ = entangling_gate(protocol, pulse, emitter, wfc=wfc,
                              coupling_boost=coupling_boost, method=method)
    stored = memory_store(phi, pulse, emitter, protocol, measurement, cmap=cmap)
    retrieved = memory_retrieve(stored.state, pulse, emitter, protocol, measurement, cmap=cmap)
    return stored, retrieved, state_fidelity(phi, retrieved.state)


def compose_sites(cmap_a, cmap_b):
    """Kraus operators on photon (x) A (x) B for one photon visiting A, then B.

    Each output mode of site A is mode-matched back onto the incident
    envelope before site B, so B acts with its own single-site map on every
    branch and the operators are the products K_B^n K_A^m. The two heralds
    are then independent: when both maps are proportional to their targets
    the joint success probability is the product of the site values.

    """
    total = []
    for k_a in cmap_a.kraus_ops:
        for k_b in cmap_b.kraus_ops:
            # k_b[po, bo, pm, bi], k_a[pm, ao, pi, ai] -> t[po, ao, bo, pi, ai, bi]
            t = np.einsum('pbmj,maqi->pabqij', k_b.reshape(2, 2, 2, 2), k_a.reshape(2, 2, 2, 2))
            total.append(t.reshape(8, 8))
    return total


def remote_entangle(emitter_a, emitter_b, pulse, protocol='time-bin', measurement='x',
                    wfc=None, coupling_boost=1.0, method='etd_recursive'):
    """Entangle two emitters with one photon visiting both gate sites in turn.

    Photon and both emitters start in |+>. After both heralds succeed the
    photon is measured in ``measurement``; in the conjugate (x or y) basis
    the emitters end up maximally entangled whatever the Purcell factors.
    A pulse shape is sampled on each site's own default grid, exactly as a
    single-site gate would be.

    Returns:
        :class:`RemoteOutcome`

    """
    cmap_a, _ = entangling_gate(protocol, pulse, emitter_a, wfc=wfc,
                                coupling_boost=coupling_boost, method=method)
    cmap_b, _ = entangling_gate(protocol, pulse, emitter_b, wfc=wfc,
                                coupling_boost=coupling_boost, method=method)
    kraus = compose_sites(cmap_a, cmap_b)

    plus = QUBIT_STATES['+']
    start = np.kron(np.kron(plus, plus), plus)
    states, probs, conc = [], [], 0.0
    for bvec in _measurement_basis(measurement):
        vectors = [np.einsum('p,pab->ab', bvec.conj(), (k @ start).reshape(2, 2, 2)).ravel()
                   for k in kraus]
        vectors = [v for v in vectors if np.vdot(v, v).real > 0.0]
        prob = float(sum(np.vdot(v, v).real for v in vectors))
        if prob <= 0.0:
            states.append(np.zeros((4, 4), dtype=complex))
            probs.append(0.0)
            continue
        rho = sum(np.outer(v, v.conj()) for v in vectors) / prob
        if len(vectors) == 1:
            value = concurrence(vectors[0] / np.sqrt(prob))
        else:
            value = wootters_concurrence(rho)
        states.append(rho)
        probs.append(prob)
        conc += prob * value

    p_success = float(sum(probs))
    if p_success > 0.0:
        conc /= p_success
    else:
        log.warning('Remote entanglement herald never succeeds.')
    log.info('Remote entanglement: p_success={:.6f}, concurrence={:.6f}.'.format(p_success, conc))
    return RemoteOutcome(states=tuple(states), outcome_probabilities=tuple(probs),
                         concurrence=float(conc), p_success=p_success)
