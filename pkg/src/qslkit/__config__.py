# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

from . import _config as _ ; _.make_config("qslkit.cfg") ; del _
