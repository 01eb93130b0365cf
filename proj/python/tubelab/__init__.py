"""Thin Python layer over the tubelab C++ library."""

import json

from . import _tubelab
from ._tubelab import TubelabError, __version__, experiment_kinds, section_modes, sha256_hex, verify_manifest


def _text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def canonical_config(config=None, experiment=""):
    return json.loads(_tubelab.canonical_config(_text(config), experiment))


def config_violations(config, experiment=""):
    return _tubelab.config_violations(_text(config), experiment)


def experiment_id(config=None, experiment=""):
    return _tubelab.experiment_id(_text(config), experiment)


def run(config=None, experiment="", out_root="", jobs=1):
    """Runs one experiment; returns its manifest plus the run "directory"."""
    return json.loads(_tubelab.run(_text(config), experiment, str(out_root), jobs))


__all__ = [
    "TubelabError",
    "__version__",
    "canonical_config",
    "config_violations",
    "experiment_id",
    "experiment_kinds",
    "run",
    "section_modes",
    "sha256_hex",
    "verify_manifest",
]
