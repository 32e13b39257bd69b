# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

from .__about__ import * ; del __about__  # noqa
from . import __config__ ; del __config__

from ._exceptions import *  # noqa
from .qubit       import *  # noqa
from .engine      import *  # noqa
from .jc          import *  # noqa
from .dephasing   import *  # noqa
from .scan        import *  # noqa
