import unittest

def test_suite():
    """Returns unittest.TestSuite of wgqed tests for use by setup.py"""

    from os.path import dirname
    wgqed_dir = dirname(dirname(__file__))
    return unittest.defaultTestLoader.discover(wgqed_dir,
        top_level_dir=dirname(wgqed_dir))
