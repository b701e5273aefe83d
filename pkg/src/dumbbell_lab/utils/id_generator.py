"""Run identifiers, random by default and seed-derived in serial mode."""

import hashlib
import uuid
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator, Optional, Union


@dataclass
class _IdDeterminismState:
    seed: str
    counter: int = 0


_ID_STATE: Optional[_IdDeterminismState] = None


def new_run_id() -> str:
    """Return a UUID string; deterministic inside ``deterministic_id_context``."""
    if _ID_STATE is None:
        return str(uuid.uuid4())
    _ID_STATE.counter += 1
    payload = f"{_ID_STATE.seed}:{_ID_STATE.counter}".encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return str(uuid.UUID(bytes=digest[:16], version=4))


@contextmanager
def deterministic_id_context(*, seed: Union[int, str]) -> Iterator[None]:
    """
    Derive run identifiers from ``seed`` for the duration of the context.

    Args:
        seed: Seed value, typically the config fingerprint.
    """
    global _ID_STATE

    previous_state = _ID_STATE
    _ID_STATE = _IdDeterminismState(seed=str(seed))
    try:
        yield
    finally:
        _ID_STATE = previous_state


__all__ = ["new_run_id", "deterministic_id_context"]
