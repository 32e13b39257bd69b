# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

__all__ = ('top_dir', 'test_dir', 'fast_quad')

import sys, pathlib
sys.dont_write_bytecode = True
test_dir = pathlib.Path(__file__).resolve().parent
top_dir = test_dir.parent
del sys, pathlib


def fast_quad():
    """Coarser quadrature for tests that only need a few digits."""
    from qslkit import QuadratureConfig
    return QuadratureConfig(nodes=401, rel_tol=1e-8, max_refinements=6)
