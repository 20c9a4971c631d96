"""Named one-parameter families and family JSON loading."""
from __future__ import annotations

from .forms import BiForm
from .pushforward import Lift
from .scalars import SPoly

_s = SPoly.s()

PRESETS = {
    # z^2 + s
    "z2+s": ([1, 0, _s], [0, 0, 1]),
    # z^2
    "z2": ([1, 0, 0], [0, 0, 1]),
    # z^2 + 1/s, cleared of denominators
    "z2+1/s": ([_s, 0, 1], [0, 0, _s]),
}


def preset(name: str) -> Lift:
    try:
        P, Q = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(PRESETS)}") from None
    return Lift(BiForm.exact(P), BiForm.exact(Q))


def load_family(data) -> Lift:
    """A preset name, ``{"preset": name}``, or ``{"P": form, "Q": form}``."""
    if isinstance(data, str):
        return preset(data)
    if "preset" in data:
        return preset(data["preset"])
    return Lift.from_json(data)
