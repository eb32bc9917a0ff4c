"""Named coefficient presets.

``paper-2009-r2-m10`` is the published degree-10 pair for ``r = 2`` at the
window ``c = 3.033 pi``, where it gives ``h = 0.998885``.
"""

import math
import typing as T
from dataclasses import dataclass

from .exceptions import ParamsError
from .kernels import Polynomial


@dataclass(frozen=True)
class Preset:
    name: str
    r: int
    M: int
    c: float
    P1: T.Tuple[float, ...]
    P2: T.Tuple[float, ...]

    def polynomials(self) -> T.Tuple[Polynomial, Polynomial]:
        return Polynomial(self.P1), Polynomial(self.P2)


PRESETS: T.Dict[str, Preset] = {
    "paper-2009-r2-m10": Preset(
        name="paper-2009-r2-m10",
        r=2,
        M=10,
        c=3.033 * math.pi,
        P1=(
            -3, 97, -1730, 14830, -70248, 172217,
            -154805, -109555, 188895, 130288, -186298,
        ),
        P2=(
            -258, 9245, -96770, 428888, -856147, 592829,
            169210, 94624, -716274, 230263, 154420,
        ),
    ),
}


def get_preset(name: str) -> Preset:
    """
    :raises ParamsError: if no preset has this name.
    """
    try:
        return PRESETS[name]
    except KeyError:
        raise ParamsError(
            f"Unknown preset {name!r}, available: {', '.join(sorted(PRESETS))}"
        )
