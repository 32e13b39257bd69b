# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

__all__ = ('make_config', 'get_config', 'load_flat_config')


def make_config(cfg_fname, cfg_section=None):
    import sys
    from pathlib import Path
    from functools import partial
    fglobals = sys._getframe(1).f_globals
    fglobals.pop("__builtins__", None)
    fglobals.pop("__cached__",   None)
    if cfg_section is None: cfg_section = fglobals["__package__"]
    cfg_path = Path(fglobals["__file__"]).parent/cfg_fname
    fglobals["__all__"] = ("config", "set_config")
    fglobals["config"] = get_config(cfg_path, cfg_section)
    fglobals["set_config"] = partial(set_config, fglobals)


def _parser(cfg_section):
    from configparser import ConfigParser, ExtendedInterpolation
    parser = ConfigParser(interpolation=ExtendedInterpolation(),
                          inline_comment_prefixes=('#', ';'),
                          default_section=cfg_section)
    parser.optionxform = str  # keep key case
    return parser


def get_config(cfg_path, cfg_section):
    from pathlib import Path
    cfg_path = Path(cfg_path)
    if not cfg_path.is_file():
        return {}
    cfg = _parser(cfg_section)
    cfg.read(str(cfg_path), "utf-8")
    return cfg[cfg_section]


def load_flat_config(cfg_path, cfg_section="qslkit"):
    """Read a flat key=value file (no section header) into a plain dict.

    Keys are normalized to lower case with dashes turned into underscores,
    so ``gamma0 = 40`` and ``rel-tol = 1e-9`` both map onto CLI flag names.
    """
    from pathlib import Path
    from ._exceptions import QslError, QSL_EIO
    cfg_path = Path(cfg_path)
    try:
        text = cfg_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise QslError(f"cannot read config file {cfg_path}: {exc.strerror}",
                       error=QSL_EIO) from None
    cfg = _parser(cfg_section)
    cfg.read_string(f"[{cfg_section}]\n" + text, source=str(cfg_path))
    return {key.strip().lower().replace("-", "_"): value.strip()
            for key, value in cfg[cfg_section].items()}


def set_config(fglobals, **cfg_dict):
    """Override package defaults in place; a None value drops the key.

    Readers look the config up at call time.
    """
    config = fglobals["config"]
    for key, val in cfg_dict.items():
        if val is None:
            config.pop(key, None)
        else:
            config[key] = str(val)
