"""Enumeration cap shared by every operation that lists group elements."""

from __future__ import annotations

import contextlib
import contextvars

DEFAULT_ENUM_CAP = 10**7

_cap = contextvars.ContextVar("enum_cap", default=DEFAULT_ENUM_CAP)


class EnumerationCapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"enumeration of {size} elements exceeds cap {cap}")


class BudgetExceeded(RuntimeError):
    """A combinatorial search hit its configured bound."""


def current_cap() -> int:
    return _cap.get()


@contextlib.contextmanager
def enumeration_cap(cap: int):
    token = _cap.set(cap)
    try:
        yield cap
    finally:
        _cap.reset(token)


def check_cap(size: int) -> None:
    cap = _cap.get()
    if size > cap:
        raise EnumerationCapExceeded(size, cap)
