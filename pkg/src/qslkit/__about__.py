# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

__import__("pkg_about").about()
