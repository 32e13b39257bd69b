# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

from setuptools import setup

setup()
