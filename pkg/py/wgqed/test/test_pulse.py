"""
wgqed.test.test_pulse
=====================

Test wgqed.pulse: grids, pulse shapes, packets and their arithmetic.

"""
import unittest
import numpy as np

from wgqed.pulse import (Direction, Gaussian, HalfExponential, PlaneWaveWindow,
                         TimeGrid, WavePacket, default_grid, inner_product,
                         make_pulse, scale_shift, zeros_like)
from wgqed.util import GridError, GridMismatchError

class TestPulse(unittest.TestCase):
    """Test wgqed.pulse"""
    @classmethod
    def setUpClass(cls):
        cls.grid = TimeGrid.spanning(-5.0, 60.0, 0.01)
        cls.shapes = [HalfExponential(1.0), Gaussian(1.0, t0=10.0), PlaneWaveWindow(5.0, t0=1.0)]

    def test_grid(self):
        """Grid construction and validation."""
        grid = TimeGrid.spanning(0.0, 1.0, 0.1)
        self.assertEqual(grid.n_samples, 11)
        self.assertAlmostEqual(grid.t_end, 1.0, places=12)
        self.assertEqual(len(grid.times), 11)
        with self.assertRaises(GridError):
            TimeGrid(0.0, -0.1, 10)
        with self.assertRaises(GridError):
            TimeGrid(0.0, 0.1, 1)
        with self.assertRaises(GridError):
            TimeGrid(np.inf, 0.1, 10)

    def test_default_grid(self):
        """The default step resolves both the pulse and the emitter."""
        grid = default_grid(HalfExponential(2.0), gamma_total=1.0)
        self.assertAlmostEqual(grid.dt, 0.5 / 50, places=14)
        grid = default_grid(Gaussian(4.0), gamma_total=2.0)
        self.assertAlmostEqual(grid.dt, 0.5 / 50, places=14)
        self.assertLessEqual(grid.t_start, -24.0)

    def test_normalization(self):
        """Every sampled pulse has unit trapezoidal norm."""
        for shape in self.shapes:
            packet = make_pulse(shape, self.grid)
            self.assertAlmostEqual(packet.mass, 1.0, places=12)
            packet = make_pulse(shape)
            self.assertAlmostEqual(packet.mass, 1.0, places=12)

    def test_grid_too_narrow(self):
        """Truncating more than the tail tolerance is an error."""
        with self.assertRaises(GridError):
            make_pulse(HalfExponential(1.0), TimeGrid.spanning(0.0, 5.0, 0.01))
        with self.assertRaises(GridError):
            make_pulse(Gaussian(1.0), TimeGrid.spanning(-2.0, 20.0, 0.01))

    def test_mass_outside(self):
        """Analytic tail masses."""
        self.assertAlmostEqual(HalfExponential(1.0).mass_outside(0.0, 2.0), np.exp(-2.0), places=14)
        self.assertAlmostEqual(Gaussian(1.0).mass_outside(0.0, np.inf), 0.5, places=14)
        window = PlaneWaveWindow(4.0, rise=1.0)
        self.assertLess(window.mass_outside(0.0, 4.0), 1e-10)
        self.assertAlmostEqual(window.mass_outside(0.0, 2.0), 0.5, places=8)
        self.assertEqual(window.mass_outside(5.0, 6.0), 1.0)

    def test_inner_product(self):
        """Overlaps of delayed half-exponentials and of displaced Gaussians."""
        grid = TimeGrid.spanning(0.0, 45.0, 1e-4)
        a = make_pulse(HalfExponential(1.0), grid)
        b = make_pulse(HalfExponential(1.0, t0=1.0), grid)
        # the jump at t0 costs O(dt) in the trapezoid sum
        self.assertAlmostEqual(abs(inner_product(a, b)), np.exp(-0.5), delta=2e-4)
        self.assertAlmostEqual(inner_product(a, a).real, 1.0, places=12)

        grid = TimeGrid.spanning(-20.0, 40.0, 0.01)
        g1 = make_pulse(Gaussian(1.0, t0=8.0), grid)
        g2 = make_pulse(Gaussian(1.0, t0=10.0), grid)
        self.assertAlmostEqual(inner_product(g1, g2).real, np.exp(-0.5), places=10)
        self.assertAlmostEqual(inner_product(g1, g2).imag, 0.0, places=12)
        self.assertAlmostEqual(inner_product(g1, 1j * g2).imag, np.exp(-0.5), places=10)

    def test_scale_shift(self):
        """Shifting by whole steps reproduces the delayed pulse."""
        a = make_pulse(HalfExponential(1.0), self.grid)
        b = make_pulse(HalfExponential(1.0, t0=5.0), self.grid)
        shifted = scale_shift(a, factor=1.0, delay=5.0)
        self.assertTrue(np.allclose(shifted.amplitudes, b.amplitudes, rtol=0.0, atol=1e-12))
        scaled = scale_shift(a, factor=0.5j)
        self.assertTrue(np.allclose(scaled.amplitudes, 0.5j * a.amplitudes))
        with self.assertRaises(GridError):
            scale_shift(a, delay=0.005)
        with self.assertRaises(GridError):
            scale_shift(a, delay=-6.0)

    def test_arithmetic(self):
        """Packets add, subtract and scale; mixing grids or directions fails."""
        a = make_pulse(self.shapes[1], self.grid)
        self.assertAlmostEqual((a + a).mass, 4.0, places=10)
        self.assertAlmostEqual((a - a).mass, 0.0, places=14)
        self.assertAlmostEqual((np.float64(2.0) * a).mass, 4.0, places=10)
        self.assertIsInstance(np.float64(2.0) * a, WavePacket)
        self.assertAlmostEqual((-a).mass, 1.0, places=12)
        self.assertEqual(zeros_like(a).mass, 0.0)

        other = make_pulse(self.shapes[1], TimeGrid.spanning(-5.0, 60.0, 0.02))
        with self.assertRaises(GridMismatchError):
            a + other
        with self.assertRaises(GridMismatchError):
            a + a.with_direction(Direction.LEFTWARD)
        with self.assertRaises(GridMismatchError):
            inner_product(a, make_pulse(self.shapes[1], self.grid, detuning=0.5))

    def test_read_only(self):
        """Packet samples cannot be modified in place."""
        a = make_pulse(self.shapes[0], self.grid)
        with self.assertRaises(ValueError):
            a.amplitudes[0] = 0.0
        with self.assertRaises(GridError):
            WavePacket(self.grid, np.zeros(3))

    def test_bandwidth(self):
        """The rms bandwidth of a Gaussian is 1/(2 sigma)."""
        packet = make_pulse(Gaussian(1.0, t0=10.0), self.grid)
        self.assertAlmostEqual(packet.bandwidth, 0.5, delta=1e-3)
        self.assertEqual(Direction.RIGHTWARD.flipped(), Direction.LEFTWARD)

    def test_support_span(self):
        """Support of a flat-top packet is its duration."""
        packet = make_pulse(PlaneWaveWindow(5.0, t0=1.0), self.grid)
        self.assertLessEqual(packet.support_span(), 5.0 + 1e-9)
        self.assertGreater(packet.support_span(), 4.0)

if __name__ == '__main__':
    unittest.main()
