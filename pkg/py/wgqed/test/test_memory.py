"""
wgqed.test.test_memory
======================

Test wgqed.memory: storing and retrieving a qubit, and remote entanglement.

"""
import unittest
import numpy as np

from wgqed.pulse import HalfExponential
from wgqed.scatter import EmitterParams
from wgqed.gates import (QUBIT_STATES, Attenuator, SecondScatterer, narrowband_packet,
                         polarization_gate, time_bin_gate)
from wgqed.memory import (compose_sites, memory_retrieve, memory_round_trip,
                          memory_store, remote_entangle)
from wgqed.util import StateError

class TestMemory(unittest.TestCase):
    """Test wgqed.memory"""
    @classmethod
    def setUpClass(cls):
        cls.packet = narrowband_packet()
        cls.p1 = EmitterParams.from_purcell(1.0)

    def test_round_trip(self):
        """Every Pauli eigenstate survives storage and retrieval."""
        emitter = EmitterParams.from_purcell(1.0)
        for label in QUBIT_STATES:
            stored, retrieved, fidelity = memory_round_trip(label, HalfExponential(1.0), emitter)
            self.assertAlmostEqual(fidelity, 1.0, delta=1e-8, msg=label)
            self.assertAlmostEqual(stored.fidelity, 1.0, delta=1e-8, msg=label)
            self.assertLess(stored.p_success, 1.0)
            self.assertAlmostEqual(stored.p_success, retrieved.p_success, delta=1e-8)

    def test_store_narrowband(self):
        """The store herald succeeds with the narrowband reflectance."""
        for measurement in ('x', 'y'):
            outcome = memory_store('+i', self.packet, self.p1, measurement=measurement,
                                   method='plane_wave')
            self.assertAlmostEqual(outcome.p_success, 0.25, places=10)
            self.assertAlmostEqual(outcome.fidelity, 1.0, places=10)
            self.assertEqual(len(outcome.corrections), 2)
            self.assertAlmostEqual(np.trace(outcome.state).real, 1.0, places=12)

    def test_polarization_memory(self):
        """The polarization gate with a matched attenuator stores and retrieves too."""
        stored = memory_store('-', self.packet, self.p1, protocol='polarization',
                              wfc=Attenuator(), method='plane_wave')
        self.assertAlmostEqual(stored.fidelity, 1.0, places=10)
        retrieved = memory_retrieve(stored.state, self.packet, self.p1, protocol='polarization',
                                    wfc=Attenuator(), method='plane_wave')
        self.assertAlmostEqual(retrieved.fidelity, 1.0, delta=1e-6)

    def test_bad_input(self):
        """Measuring in the computational basis cannot hand over a qubit."""
        with self.assertRaises(StateError):
            memory_store('0', self.packet, self.p1, measurement='z', method='plane_wave')
        with self.assertRaises(StateError):
            memory_store('0', self.packet, self.p1, measurement='w', method='plane_wave')
        with self.assertRaises(StateError):
            memory_store([1.0, 1.0], self.packet, self.p1, method='plane_wave')

    def test_remote(self):
        """Two emitters end up maximally entangled; success probabilities multiply."""
        p20 = EmitterParams.from_purcell(20.0)
        outcome = remote_entangle(self.p1, p20, self.packet, method='plane_wave')
        self.assertAlmostEqual(outcome.concurrence, 1.0, places=8)
        self.assertAlmostEqual(outcome.p_success, 0.25 * (20.0/21.0)**2, places=10)
        self.assertEqual(len(outcome.states), 2)
        for prob, rho in zip(outcome.outcome_probabilities, outcome.states):
            self.assertAlmostEqual(prob, 0.5 * outcome.p_success, places=10)
            self.assertAlmostEqual(np.trace(rho).real, 1.0, places=10)

        outcome = remote_entangle(self.p1, self.p1, self.packet, protocol='polarization',
                                  measurement='y', wfc=Attenuator(), method='plane_wave')
        self.assertAlmostEqual(outcome.concurrence, 1.0, places=8)
        self.assertAlmostEqual(outcome.p_success, 0.25**2, places=10)

    def test_remote_broadband(self):
        """Site success probabilities multiply for a broadband photon too."""
        pulse = HalfExponential(1.0)
        p20 = EmitterParams.from_purcell(20.0)
        _, report_a = time_bin_gate(pulse, self.p1)
        _, report_b = time_bin_gate(pulse, p20)
        outcome = remote_entangle(self.p1, p20, pulse)
        self.assertAlmostEqual(outcome.p_success, report_a.p_success_avg * report_b.p_success_avg,
                               delta=1e-6)
        self.assertAlmostEqual(outcome.concurrence, 1.0, delta=1e-8)

        emitter = EmitterParams.from_purcell(2.0, detuning=0.5)
        _, report_a = polarization_gate(pulse, self.p1, wfc=SecondScatterer())
        _, report_b = polarization_gate(pulse, emitter, wfc=SecondScatterer())
        outcome = remote_entangle(self.p1, emitter, pulse, protocol='polarization')
        self.assertAlmostEqual(outcome.p_success, report_a.p_success_avg * report_b.p_success_avg,
                               delta=1e-6)
        self.assertAlmostEqual(outcome.concurrence, 1.0, delta=1e-8)

    def test_compose_sites(self):
        """Composed operators act as site A then site B."""
        cmap_a, _ = time_bin_gate(self.packet, self.p1, method='plane_wave')
        cmap_b, _ = time_bin_gate(self.packet, EmitterParams.from_purcell(20.0), method='plane_wave')
        kraus = compose_sites(cmap_a, cmap_b)
        self.assertEqual(len(kraus), len(cmap_a.kraus_ops) * len(cmap_b.kraus_ops))
        # photon in |1>, both emitters in |0>: index 2*p + a on (p, A), then (p, B)
        start = np.zeros(8, dtype=complex)
        start[4] = 1.0
        out = kraus[0] @ start
        pa = (cmap_a.kraus_ops[0] @ np.array([0, 0, 1, 0], dtype=complex)).reshape(2, 2)
        expected = np.zeros((2, 2, 2), dtype=complex)
        for p in range(2):
            for a in range(2):
                vec = np.zeros(4, dtype=complex)
                vec[2*p] = pa[p, a]
                pb = (cmap_b.kraus_ops[0] @ vec).reshape(2, 2)
                expected[:, a, :] += pb
        self.assertTrue(np.allclose(out.reshape(2, 2, 2), expected, rtol=0.0, atol=1e-12))

if __name__ == '__main__':
    unittest.main()
