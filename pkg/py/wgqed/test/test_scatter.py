"""
wgqed.test.test_scatter
=======================

Test wgqed.scatter against the half-exponential closed form, the
narrowband limit and the energy-balance identities.

"""
import unittest
import numpy as np

from wgqed.pulse import (Direction, Gaussian, HalfExponential, PlaneWaveWindow,
                         TimeGrid, make_pulse)
from wgqed.scatter import (EmitterParams, closed_form_f_half_exponential,
                           mirror_gate_three_level, plane_wave_f, scatter,
                           tr_identities)
from wgqed.gates import narrowband_packet
from wgqed.util import ResolutionError, StateError

def half_exponential_case(gamma_pulse, emitter):
    """Half-exponential packet starting at the grid origin, dt = 1e-3 / max(Gamma, gamma)."""
    dt = 1e-3 / max(emitter.gamma, gamma_pulse)
    grid = TimeGrid.spanning(0.0, 19.0 / gamma_pulse + 40.0 / emitter.gamma, dt)
    return make_pulse(HalfExponential(gamma_pulse), grid)

class TestScatter(unittest.TestCase):
    """Test wgqed.scatter"""
    @classmethod
    def setUpClass(cls):
        cls.rand = np.random.default_rng(seed=1)
        cls.gaussian = make_pulse(Gaussian(1.0, t0=8.0), TimeGrid.spanning(0.0, 60.0, 0.005))

    def test_emitter_params(self):
        """Purcell factor bookkeeping."""
        lossless = EmitterParams.from_purcell(np.inf)
        self.assertEqual(lossless.gamma_prime, 0.0)
        self.assertTrue(np.isinf(lossless.purcell))
        emitter = EmitterParams.from_purcell(4.0, gamma_1d=2.0, detuning=0.3)
        self.assertAlmostEqual(emitter.gamma, 2.5)
        self.assertAlmostEqual(emitter.purcell, 4.0)
        self.assertAlmostEqual(emitter.inverse_purcell, 0.25)
        self.assertAlmostEqual(emitter.boosted(2.0).gamma_1d, 4.0)
        self.assertEqual(emitter.boosted(2.0).gamma_prime, emitter.gamma_prime)
        with self.assertRaises(ValueError):
            EmitterParams.from_purcell(-1.0)
        with self.assertRaises(ValueError):
            EmitterParams(gamma_1d=0.0)

    def test_half_exponential_oracle(self):
        """Numeric f matches the closed form over random pulse and emitter parameters."""
        purcells = (0.5, 1.0, 5.0, 20.0, 1e6)
        for _ in range(100):
            gamma_pulse = 10**self.rand.uniform(-2.0, 1.0)
            delta = self.rand.uniform(-5.0, 5.0)
            emitter = EmitterParams.from_purcell(purcells[self.rand.integers(len(purcells))],
                                                 detuning=delta)
            psi = half_exponential_case(gamma_pulse, emitter)
            result = scatter(psi, emitter)
            closed = closed_form_f_half_exponential(gamma_pulse, emitter)
            self.assertLess(abs(result.f - closed) / abs(closed), 1e-5,
                            msg='gamma={}, delta={}, P={}'.format(gamma_pulse, delta, emitter.purcell))

    def test_limits(self):
        """f = 1/2 when the pulse rate equals Gamma_1D; a narrowband pulse is perfectly reflected."""
        emitter = EmitterParams.from_purcell(np.inf)
        result = scatter(half_exponential_case(1.0, emitter), emitter)
        self.assertAlmostEqual(result.f.real, 0.5, delta=1e-4)
        self.assertAlmostEqual(result.f.imag, 0.0, delta=1e-4)

        result = scatter(narrowband_packet(), emitter, method='plane_wave')
        self.assertAlmostEqual(result.f.real, 1.0, places=12)
        self.assertAlmostEqual(result.R, 1.0, places=12)

        long_pulse = make_pulse(PlaneWaveWindow(1000.0))
        result = scatter(long_pulse, emitter)
        self.assertAlmostEqual(result.f.real, 1.0, delta=1e-3)
        self.assertAlmostEqual(result.R, 1.0, delta=1e-3)

    def test_conservation(self):
        """T + R + kappa = 1 and the transmitted envelope is incident plus reflected."""
        for purcell in (np.inf, 20.0, 1.0, 0.5):
            for delta in (0.0, 0.7):
                emitter = EmitterParams.from_purcell(purcell, detuning=delta)
                for method in ('etd_recursive', 'trapezoid'):
                    result = scatter(self.gaussian, emitter, method=method)
                    self.assertAlmostEqual(result.T + result.R + result.kappa, 1.0, delta=1e-8)
                    self.assertGreaterEqual(result.kappa, 0.0)
                    self.assertTrue(np.allclose(result.transmitted.amplitudes,
                                                self.gaussian.amplitudes + result.reflected.amplitudes,
                                                rtol=0.0, atol=1e-10))
                    self.assertIs(result.reflected.direction, Direction.LEFTWARD)
                    self.assertIs(result.transmitted.direction, Direction.RIGHTWARD)

    def test_tr_identities(self):
        """T and R follow from f by energy balance."""
        for purcell in (np.inf, 5.0, 0.5):
            emitter = EmitterParams.from_purcell(purcell, detuning=-0.4)
            result = scatter(self.gaussian, emitter)
            T, R = tr_identities(result.f, emitter)
            self.assertAlmostEqual(result.T, T, delta=1e-5)
            self.assertAlmostEqual(result.R, R, delta=1e-5)
            self.assertAlmostEqual(result.kappa, 1.0 - T - R, delta=1e-5)

    def test_plane_wave(self):
        """Narrowband method against the closed forms."""
        emitter = EmitterParams.from_purcell(20.0, detuning=0.25)
        result = scatter(narrowband_packet(), emitter, method='plane_wave')
        self.assertAlmostEqual(abs(result.f - plane_wave_f(emitter)), 0.0, places=12)
        self.assertAlmostEqual(plane_wave_f(EmitterParams.from_purcell(20.0)).real, 20.0/21.0, places=12)
        narrow = closed_form_f_half_exponential(1e-9, emitter)
        self.assertAlmostEqual(abs(narrow - plane_wave_f(emitter)), 0.0, places=7)
        T, R = tr_identities(result.f, emitter)
        self.assertAlmostEqual(result.T, T, places=10)
        self.assertAlmostEqual(result.R, R, places=10)

    def test_detuning_adds(self):
        """Carrier and emitter detuning enter only through their sum."""
        grid = self.gaussian.grid
        carrier = make_pulse(Gaussian(1.0, t0=8.0), grid, detuning=0.5)
        a = scatter(carrier, EmitterParams.from_purcell(5.0))
        b = scatter(self.gaussian, EmitterParams.from_purcell(5.0, detuning=0.5))
        self.assertAlmostEqual(abs(a.f - b.f), 0.0, places=12)
        self.assertAlmostEqual(a.R, b.R, places=12)

    def test_linearity(self):
        """Scattering is linear in the incident envelope when the emitter is lossy."""
        emitter = EmitterParams.from_purcell(5.0, detuning=0.3)
        one = scatter(self.gaussian, emitter)
        two = scatter((1.5 - 0.5j) * self.gaussian, emitter)
        self.assertTrue(np.allclose(two.reflected.amplitudes,
                                    (1.5 - 0.5j) * one.reflected.amplitudes, rtol=0.0, atol=1e-12))
        self.assertAlmostEqual(two.R, one.R, places=10)
        self.assertAlmostEqual(abs(two.f - one.f), 0.0, places=10)

        # two different shapes superposed on one grid
        other = make_pulse(HalfExponential(0.7, t0=20.0), self.gaussian.grid)
        alpha, beta = 0.6 + 0.2j, -0.3 + 0.7j
        mixed = scatter(alpha * self.gaussian + beta * other, emitter)
        parts = alpha * one.reflected.amplitudes + beta * scatter(other, emitter).reflected.amplitudes
        self.assertTrue(np.allclose(mixed.reflected.amplitudes, parts, rtol=0.0, atol=1e-12))

    def test_lossless_balance(self):
        """A lossless emitter conserves the photon exactly, even on a coarse grid."""
        emitter = EmitterParams.from_purcell(np.inf, detuning=0.4)
        for dt in (0.05, 0.005):
            psi = make_pulse(Gaussian(1.0, t0=8.0), TimeGrid.spanning(0.0, 60.0, dt))
            for method in ('etd_recursive', 'trapezoid', 'plane_wave'):
                result = scatter(psi, emitter, method=method)
                self.assertLess(result.kappa, 1e-12, msg=method)
                self.assertAlmostEqual(result.T + result.R, 1.0, delta=1e-12)
                self.assertTrue(np.allclose(result.transmitted.amplitudes,
                                            psi.amplitudes + result.reflected.amplitudes,
                                            rtol=0.0, atol=1e-12))
                scaled = scatter(0.5j * psi, emitter, method=method)
                self.assertTrue(np.allclose(scaled.reflected.amplitudes,
                                            0.5j * result.reflected.amplitudes, rtol=0.0, atol=1e-12))
        closed = closed_form_f_half_exponential(1.0, emitter)
        result = scatter(half_exponential_case(1.0, emitter), emitter)
        self.assertLess(abs(result.f - closed), 1e-4)

    def test_methods_converge(self):
        """The trapezoid and exponential integrators converge on each other at second order."""
        emitter = EmitterParams.from_purcell(5.0, detuning=0.2)
        gaps = []
        for dt in (2e-3, 1e-3):
            psi = make_pulse(Gaussian(1.0, t0=8.0), TimeGrid.spanning(0.0, 24.0, dt))
            etd = scatter(psi, emitter, method='etd_recursive')
            trap = scatter(psi, emitter, method='trapezoid')
            gaps.append(abs(etd.f - trap.f))
        self.assertLess(gaps[1], 1e-4)
        self.assertGreater(gaps[0] / gaps[1], 3.0)

    def test_dt_halving(self):
        """Halving dt moves f by less than 1e-5."""
        emitter = EmitterParams.from_purcell(1.0, detuning=0.5)
        values = []
        for dt in (0.004, 0.002):
            psi = make_pulse(Gaussian(1.0, t0=8.0), TimeGrid.spanning(0.0, 40.0, dt))
            result = scatter(psi, emitter)
            values.append(np.array([result.f.real, result.f.imag, result.T, result.R, result.kappa]))
        self.assertLess(np.max(np.abs(values[0] - values[1])), 1e-5)

    def test_resolution(self):
        """Under-resolved pulses and coarse direct convolutions are refused."""
        spike = make_pulse(Gaussian(0.01, t0=5.0), TimeGrid.spanning(0.0, 10.0, 0.1))
        with self.assertRaises(ResolutionError):
            scatter(spike, EmitterParams())
        coarse = make_pulse(HalfExponential(1.0), TimeGrid.spanning(0.0, 40.0, 0.1))
        fast = EmitterParams(gamma_1d=20.0)
        with self.assertRaises(ResolutionError):
            scatter(coarse, fast, method='trapezoid')
        result = scatter(coarse, fast, method='etd_recursive')
        self.assertAlmostEqual(result.T + result.R + result.kappa, 1.0, delta=1e-8)

    def test_bad_input(self):
        """Zero packets and unknown methods."""
        with self.assertRaises(StateError):
            scatter(0.0 * self.gaussian, EmitterParams())
        with self.assertRaises(ValueError):
            scatter(self.gaussian, EmitterParams(), method='euler')
        with self.assertRaises(ValueError):
            closed_form_f_half_exponential(0.0, EmitterParams())

    def test_mirror_gate(self):
        """Three-level mirror gate: ideal for a lossless emitter, degraded at P = 1."""
        atom = np.array([1.0, 1.0]) / np.sqrt(2.0)
        photon = np.array([1.0, 0.0])
        packet = narrowband_packet()
        _, fidelity, loss = mirror_gate_three_level(packet, EmitterParams.from_purcell(np.inf),
                                                    atom, photon, method='plane_wave')
        self.assertAlmostEqual(fidelity, 1.0, places=12)
        self.assertAlmostEqual(loss, 0.0, places=12)

        output, fidelity, loss = mirror_gate_three_level(packet, EmitterParams.from_purcell(1.0),
                                                         atom, photon, method='plane_wave')
        self.assertAlmostEqual(fidelity, 9.0/16.0, places=10)
        self.assertAlmostEqual(loss, 0.25, places=10)
        self.assertAlmostEqual(output.total_probability, 1.0, places=10)

        with self.assertRaises(StateError):
            mirror_gate_three_level(packet, EmitterParams(), [1.0, 1.0], photon, method='plane_wave')

if __name__ == '__main__':
    unittest.main()
