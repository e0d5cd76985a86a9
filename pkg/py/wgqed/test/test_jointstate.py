"""
wgqed.test.test_jointstate
==========================

Test wgqed.jointstate: polarization bases, four-level scattering and the
heralded Z-block.

"""
import unittest
import numpy as np

from wgqed.pulse import Gaussian, TimeGrid, make_pulse
from wgqed.scatter import EmitterParams
from wgqed.gates import HADAMARD, narrowband_packet
from wgqed.jointstate import (BranchLabel, JointState, Level, Polarization, Port,
                              emitter_unitary, herald_filter, joint_overlap,
                              level_index, scatter_four_level, to_circular,
                              to_linear, z_block)
from wgqed.util import StateError

class TestJointState(unittest.TestCase):
    """Test wgqed.jointstate"""
    @classmethod
    def setUpClass(cls):
        cls.packet = narrowband_packet()
        cls.plus = JointState.from_amplitudes(
            {BranchLabel(Level.G_MINUS): 1/np.sqrt(2.), BranchLabel(Level.G_PLUS): 1/np.sqrt(2.)},
            cls.packet)
        cls.gaussian = make_pulse(Gaussian(1.0, t0=8.0), TimeGrid.spanning(0.0, 40.0, 0.005))

    def test_construction(self):
        """Labels and weights are validated."""
        self.assertAlmostEqual(self.plus.total_probability, 1.0, places=12)
        self.assertEqual(len(self.plus.labels()), 2)
        self.assertEqual(self.plus.polarizations(), {Polarization.H})
        with self.assertRaises(StateError):
            JointState({('g+', 'h'): self.packet})
        with self.assertRaises(StateError):
            JointState({}, loss_weight=-0.1)
        self.assertEqual(level_index(Level.G_PLUS), 1)
        self.assertEqual(level_index(Level.S), 0)

    def test_basis_change(self):
        """Linear -> circular -> linear is the identity."""
        mixed = JointState.from_amplitudes(
            {BranchLabel(Level.G_MINUS, Polarization.H): 0.6,
             BranchLabel(Level.G_PLUS, Polarization.V): 0.8j}, self.packet)
        circular = to_circular(mixed)
        self.assertEqual(circular.polarizations(), {Polarization.SIGMA_PLUS, Polarization.SIGMA_MINUS})
        self.assertAlmostEqual(circular.branch_mass, 1.0, places=12)
        self.assertTrue(to_linear(circular).allclose(mixed, atol=1e-12))
        with self.assertRaises(StateError):
            to_linear(mixed)

    def test_four_level(self):
        """Coupled branches pick up the combined mode, the others pass."""
        lossless = EmitterParams.from_purcell(np.inf)
        circular = to_circular(self.plus)
        out = scatter_four_level(circular, lossless, method='plane_wave')
        coupled = out.get(BranchLabel(Level.G_PLUS, Polarization.SIGMA_PLUS))
        passed = out.get(BranchLabel(Level.G_PLUS, Polarization.SIGMA_MINUS))
        source = circular.get(BranchLabel(Level.G_PLUS, Polarization.SIGMA_PLUS))
        # a perfect mirror flips the sign of the combined mode
        self.assertTrue(np.allclose(coupled.amplitudes, -source.amplitudes, atol=1e-12))
        self.assertTrue(np.allclose(passed.amplitudes,
                                    circular.get(BranchLabel(Level.G_PLUS, Polarization.SIGMA_MINUS)).amplitudes))
        self.assertAlmostEqual(out.loss_weight, 0.0, places=12)

        lossy = scatter_four_level(circular, EmitterParams.from_purcell(1.0), method='plane_wave')
        self.assertAlmostEqual(lossy.total_probability, 1.0, places=10)
        self.assertGreater(lossy.loss_weight, 0.0)

        with self.assertRaises(StateError):
            scatter_four_level(self.plus, lossless)
        bad = JointState.from_amplitudes({BranchLabel(Level.S, Polarization.SIGMA_PLUS): 1.0}, self.packet)
        with self.assertRaises(StateError):
            scatter_four_level(bad, lossless)

    def test_z_block_signs(self):
        """The success port carries +Phi_r for g+ and -Phi_r for g-."""
        emitter = EmitterParams.from_purcell(1.0)
        outcome = z_block(self.plus, emitter, method='plane_wave')
        up = outcome.success_state.get(BranchLabel(Level.G_PLUS, Polarization.V, Port.OUTPUT))
        down = outcome.success_state.get(BranchLabel(Level.G_MINUS, Polarization.V, Port.OUTPUT))
        # Phi_r = -f0 Psi with f0 = 1/2
        expected = -0.5 / np.sqrt(2.) * self.packet.amplitudes
        self.assertTrue(np.allclose(up.amplitudes, expected, atol=1e-12))
        self.assertTrue(np.allclose(down.amplitudes, -expected, atol=1e-12))

    def test_z_block_probabilities(self):
        """Narrowband success probability R = (bP/(bP + 1))^2 with T and kappa as the remainder."""
        for purcell, boost, expected in ((1.0, 1.0, 0.25), (1.0, 2.0, 4.0/9.0),
                                         (20.0, 1.0, (20./21.)**2), (20.0, 2.0, (40./41.)**2)):
            emitter = EmitterParams.from_purcell(purcell)
            outcome = z_block(self.plus, emitter, coupling_boost=boost, method='plane_wave')
            self.assertAlmostEqual(outcome.p_success, expected, places=10)
            self.assertAlmostEqual(outcome.total_probability, 1.0, places=10)
            self.assertAlmostEqual(outcome.success_state.total_probability, 1.0, places=10)

        outcome = z_block(self.plus, EmitterParams.from_purcell(1.0), method='plane_wave')
        self.assertAlmostEqual(outcome.failure_weight, 0.25, places=10)
        self.assertAlmostEqual(outcome.loss_weight, 0.5, places=10)

    def test_z_block_broadband(self):
        """Probability is conserved for broadband pulses too."""
        state = JointState.from_amplitudes({BranchLabel(Level.G_PLUS): 0.6,
                                            BranchLabel(Level.G_MINUS): 0.8}, self.gaussian)
        outcome = z_block(state, EmitterParams.from_purcell(5.0, detuning=0.3))
        self.assertAlmostEqual(outcome.total_probability, 1.0, places=8)
        self.assertLess(outcome.p_success, 1.0)

    def test_z_block_input(self):
        """Only h-polarized photons may enter the block."""
        vstate = JointState.from_amplitudes({BranchLabel(Level.G_PLUS, Polarization.V): 1.0}, self.packet)
        with self.assertRaises(StateError):
            z_block(vstate, EmitterParams(), method='plane_wave')

    def test_herald_filter(self):
        """Filtering twice changes nothing."""
        circular = to_circular(self.plus)
        once = herald_filter(circular, Polarization.SIGMA_PLUS)
        twice = herald_filter(once.success_state, Polarization.SIGMA_PLUS)
        self.assertAlmostEqual(once.p_success, 0.5, places=12)
        self.assertAlmostEqual(once.failure_weight, 0.5, places=12)
        self.assertTrue(twice.success_state.allclose(once.success_state))
        self.assertAlmostEqual(twice.failure_weight, once.failure_weight, places=14)

    def test_emitter_unitary(self):
        """Hadamard twice is the identity; non-unitaries are refused."""
        once = emitter_unitary(self.plus, HADAMARD)
        self.assertAlmostEqual(once.branch_mass, 1.0, places=12)
        # H|+> = |0> = |g->
        self.assertAlmostEqual(once.get(BranchLabel(Level.G_MINUS)).mass, 1.0, places=12)
        self.assertTrue(emitter_unitary(once, HADAMARD).allclose(self.plus, atol=1e-12))
        self.assertAlmostEqual(abs(joint_overlap(self.plus, self.plus)), 1.0, places=12)
        with self.assertRaises(StateError):
            emitter_unitary(self.plus, np.array([[1, 0], [0, 2]]))

if __name__ == '__main__':
    unittest.main()
