"""
Constants profiles for the separator loop.

A profile fixes every numeric constant the loop depends on. ``paper`` uses the
proven constants of the analysis verbatim and also answers to ``proven``; ``desk``
shrinks them so that graphs with a few thousand vertices already get a nontrivial Δ.
"""

import logging
import math
import os
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from minorsep.helpers import ProfileError

logger = logging.getLogger(__name__)

PROFILE_ENV = "MINORSEP_PROFILE"


@dataclass(frozen=True)
class ConstantsProfile:
    """
    Named set of loop constants.

    ``k`` is ``k_base * h**2`` when ``k_per_h2`` is set and ``k_base`` otherwise; Δ is
    ``⌊√n / (delta_divisor * h**2)⌋`` or ``⌊√n / delta_divisor⌋`` in the same way. A
    ``reweight_numerator`` of None stands for ``k**3``.

    Examples::

        >>> PROVEN.k(2), PROVEN.delta(3600, 3), DESK.delta(3600, 5)
        (80, 1, 10)
    """

    name: str
    w_init: int = 40
    k_base: int = 20
    k_per_h2: bool = True
    delta_divisor: int = 6
    delta_per_h2: bool = True
    reweight_numerator: int | None = None
    dense_guard_coeff: int = 100
    balance_slack_divisor: int = 10
    repeat_coeff: int = 200

    def k(self, h: int) -> int:
        return self.k_base * h * h if self.k_per_h2 else self.k_base

    def delta(self, n: int, h: int) -> int:
        divisor = self.delta_divisor * h * h if self.delta_per_h2 else self.delta_divisor
        return math.isqrt(n) // divisor

    @staticmethod
    def bfs_radius(n: int) -> int:
        return math.isqrt(n)

    @staticmethod
    def reweight_denominator(n: int) -> int:
        return max(1, math.isqrt(n))

    def numerator(self, k: int) -> int:
        return k**3 if self.reweight_numerator is None else self.reweight_numerator

    def dense_guard_threshold(self, h: int) -> int:
        return self.dense_guard_coeff * h * h

    def balance_slack(self, k: int) -> Fraction:
        return Fraction(1, self.balance_slack_divisor * k)

    def repeat_cap(self, h: int) -> int:
        return math.ceil(self.repeat_coeff * h * h * math.log(1.5)) + 1

    def describe(self, n: int, h: int) -> str:
        k = self.k(h)
        return (
            f"profile={self.name} w_init={self.w_init} k={k} delta={self.delta(n, h)} "
            f"radius={self.bfs_radius(n)} numerator={self.numerator(k)}"
        )


PROVEN = ConstantsProfile(name="paper")
DESK = ConstantsProfile(
    name="desk",
    w_init=4,
    k_base=8,
    k_per_h2=False,
    delta_divisor=6,
    delta_per_h2=False,
    reweight_numerator=32,
)
PROFILES = {PROVEN.name: PROVEN, "proven": PROVEN, DESK.name: DESK}

_BOOL_KEYS = {"k_per_h2", "delta_per_h2"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _parse_value(key: str, raw: str, lineno: int):
    if key in _BOOL_KEYS:
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ProfileError(f"line {lineno}: {key} expects a boolean, got {raw!r}")
    if key == "reweight_numerator" and raw.lower() in {"k3", "cube", "none"}:
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise ProfileError(f"line {lineno}: {key} expects an integer, got {raw!r}") from exc
    if value < 1:
        raise ProfileError(f"line {lineno}: {key} must be positive, got {value}")
    return value


def parse_profile(text: str, name: str = "custom") -> ConstantsProfile:
    """
    Parse ``key=value`` lines into a profile.

    Missing keys come from ``paper`` or from the profile named by a ``base=`` line.
    """
    known = {f.name for f in fields(ConstantsProfile)} - {"name"}
    base = PROVEN
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProfileError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key == "base":
            if raw not in PROFILES:
                raise ProfileError(f"line {lineno}: unknown base profile {raw!r}")
            base = PROFILES[raw]
            continue
        if key not in known:
            raise ProfileError(f"line {lineno}: unknown profile key {key!r}")
        overrides[key] = _parse_value(key, raw, lineno)
    return replace(base, name=name, **overrides)


def load_profile(path: str | os.PathLike) -> ConstantsProfile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProfileError(f"cannot read profile file {path}: {exc}") from exc
    return parse_profile(text, name=path.stem)


def resolve_profile(value: str | ConstantsProfile | None = None) -> ConstantsProfile:
    """
    Pick the profile for a run: an explicit name or file, then ``MINORSEP_PROFILE``,
    then ``paper``.
    """
    if isinstance(value, ConstantsProfile):
        return value
    if value is None:
        value = os.environ.get(PROFILE_ENV) or PROVEN.name
    if value in PROFILES:
        return PROFILES[value]
    if Path(value).is_file():
        profile = load_profile(value)
        logger.info("Loaded constants profile from %s", value)
        return profile
    raise ProfileError(
        f"unknown profile {value!r}; expected one of {sorted(PROFILES)} or a file"
    )
