"""Exact inference and decision support over belief and decision networks."""

from ._knet import (  # noqa: F401
    KnetError,
    Network,
    Session,
    config_index,
    infer,
    load,
    parse,
    recommend,
    validate,
)

__all__ = [
    "KnetError",
    "Network",
    "Session",
    "config_index",
    "infer",
    "load",
    "parse",
    "recommend",
    "validate",
]
