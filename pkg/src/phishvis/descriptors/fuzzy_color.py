"""Two-stage fuzzy HSV color quantizer shared by CEDD and FCTH.

Stage one maps (H, S, V) onto a 10-color palette through 48 Mamdani-style
rules; stage two splits each of the seven chromatic colors into light /
normal / dark using a second pair of S and V memberships, giving 24 colors.

H is in degrees [0, 360); S and V are on the 0-255 scale. Rule activation is
the minimum of the participating memberships and the activations of all
firing rules are summed per output color ("multi-participate"
defuzzification).

Breakpoints and rule tables are transcribed from the CEDD/FCTH reference
implementation as distributed with the LIRE Java library (Fuzzy10Bin and
Fuzzy24Bin classes); S and V are kept real-valued rather than truncated to
integers. Each trapezoid is ``(a, b, c, d)``: membership rises over
``[a, b)``, is 1 on ``[b, c]`` and falls over ``(c, d]``.
"""

from __future__ import annotations

import numpy as np

PALETTE_10 = (
    "white", "gray", "black", "red", "orange",
    "yellow", "green", "cyan", "blue", "magenta",
)

PALETTE_24 = (
    "white", "gray", "black",
    "light red", "red", "dark red",
    "light orange", "orange", "dark orange",
    "light yellow", "yellow", "dark yellow",
    "light green", "green", "dark green",
    "light cyan", "cyan", "dark cyan",
    "light blue", "blue", "dark blue",
    "light magenta", "magenta", "dark magenta",
)
BLACK = PALETTE_24.index("black")

HUE_SETS_10 = np.array([
    [0, 0, 5, 10],        # red (low end)
    [5, 10, 35, 50],      # orange
    [35, 50, 70, 85],     # yellow
    [70, 85, 150, 165],   # green
    [150, 165, 195, 205], # cyan
    [195, 205, 265, 280], # blue
    [265, 280, 315, 330], # magenta
    [315, 330, 360, 360], # red (high end)
], dtype=np.float64)

SATURATION_SETS_10 = np.array([
    [0, 0, 10, 75],
    [10, 75, 255, 255],
], dtype=np.float64)

VALUE_SETS_10 = np.array([
    [0, 0, 10, 75],
    [10, 75, 180, 220],
    [180, 220, 255, 255],
], dtype=np.float64)

# (hue set, saturation set, value set, output color in PALETTE_10)
RULES_10 = np.array([
    [0, 0, 0, 2], [0, 1, 0, 2], [0, 0, 2, 0], [0, 0, 1, 1],
    [1, 0, 0, 2], [1, 1, 0, 2], [1, 0, 2, 0], [1, 0, 1, 1],
    [2, 0, 0, 2], [2, 1, 0, 2], [2, 0, 2, 0], [2, 0, 1, 1],
    [3, 0, 0, 2], [3, 1, 0, 2], [3, 0, 2, 0], [3, 0, 1, 1],
    [4, 0, 0, 2], [4, 1, 0, 2], [4, 0, 2, 0], [4, 0, 1, 1],
    [5, 0, 0, 2], [5, 1, 0, 2], [5, 0, 2, 0], [5, 0, 1, 1],
    [6, 0, 0, 2], [6, 1, 0, 2], [6, 0, 2, 0], [6, 0, 1, 1],
    [7, 0, 0, 2], [7, 1, 0, 2], [7, 0, 2, 0], [7, 0, 1, 1],
    [0, 1, 1, 3], [0, 1, 2, 3], [1, 1, 1, 4], [1, 1, 2, 4],
    [2, 1, 1, 5], [2, 1, 2, 5], [3, 1, 1, 6], [3, 1, 2, 6],
    [4, 1, 1, 7], [4, 1, 2, 7], [5, 1, 1, 8], [5, 1, 2, 8],
    [6, 1, 1, 9], [6, 1, 2, 9], [7, 1, 1, 3], [7, 1, 2, 3],
], dtype=np.intp)

SATURATION_SETS_24 = np.array([
    [0, 0, 68, 188],
    [68, 188, 255, 255],
], dtype=np.float64)

VALUE_SETS_24 = np.array([
    [0, 0, 68, 188],
    [68, 188, 255, 255],
], dtype=np.float64)

# (saturation set, value set, shade) with shade 0 = light, 1 = normal, 2 = dark
RULES_24 = np.array([
    [1, 1, 1],
    [0, 0, 2],
    [0, 1, 0],
    [1, 0, 2],
], dtype=np.intp)


def trapezoid_memberships(x, sets: np.ndarray) -> np.ndarray:
    """Membership of each value in ``x`` to each trapezoid: shape ``(len(x), len(sets))``."""
    x = np.asarray(x, dtype=np.float64)[:, None]
    a, b, c, d = (sets[:, i][None, :] for i in range(4))
    out = np.zeros((x.shape[0], sets.shape[0]))
    rising = (x >= a) & (x < b)
    falling = (x > c) & (x <= d)
    out = np.where(rising, (x - a) / np.where(b > a, b - a, 1.0), out)
    out = np.where(falling, (x - c) / np.where(c < d, c - d, -1.0) + 1.0, out)
    out = np.where((x >= b) & (x <= c), 1.0, out)
    return out


def _fire(rules: np.ndarray, memberships: list[np.ndarray], n_out: int) -> np.ndarray:
    act = memberships[0][:, rules[:, 0]]
    for k in range(1, len(memberships)):
        act = np.minimum(act, memberships[k][:, rules[:, k]])
    out = np.zeros((act.shape[0], n_out))
    for r, target in enumerate(rules[:, -1]):
        out[:, target] += act[:, r]
    return out


def fuzzy10(h, s, v) -> np.ndarray:
    """Stage-one weights over PALETTE_10 for arrays of H, S, V."""
    mems = [
        trapezoid_memberships(h, HUE_SETS_10),
        trapezoid_memberships(s, SATURATION_SETS_10),
        trapezoid_memberships(v, VALUE_SETS_10),
    ]
    return _fire(RULES_10, mems, 10)


def fuzzy24(s, v, weights10: np.ndarray) -> np.ndarray:
    """Stage-two expansion of 10-color weights into PALETTE_24."""
    shades = _fire(
        RULES_24,
        [trapezoid_memberships(s, SATURATION_SETS_24), trapezoid_memberships(v, VALUE_SETS_24)],
        3,
    )
    out = np.zeros((weights10.shape[0], 24))
    out[:, :3] = weights10[:, :3]
    for color in range(3, 10):
        base = (color - 2) * 3
        out[:, base : base + 3] = weights10[:, color : color + 1] * shades
    return out


def fuzzy_palette(hsv: np.ndarray) -> np.ndarray:
    """24-color fuzzy weights for an ``(N, 3)`` array of (H deg, S 0-1, V 0-1)."""
    h = hsv[:, 0]
    s = hsv[:, 1] * 255.0
    v = hsv[:, 2] * 255.0
    return fuzzy24(s, v, fuzzy10(h, s, v))
