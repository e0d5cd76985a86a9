# Licensed under a 3-clause BSD style license - see LICENSE.rst
# -*- coding: utf-8 -*-
"""
wgqed
=====

Pulse-level simulation of single-photon scattering off emitters in
one-dimensional waveguides, and of the heralded atom-photon entangling gates
built on it.

"""
from ._version import __version__
