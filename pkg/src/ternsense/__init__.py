"""Ternsense - learned sparse ternary compressive sensing for image patches."""
from . import baseline, imaging, network, persistence, training

__all__ = ["baseline", "imaging", "network", "persistence", "training"]
