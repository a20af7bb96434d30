"""Half-filled dimerized (Su-Schrieffer-Heeger) chain analytics.

The chain alternates strong bonds of magnitude 1 + alpha (sites 2n, 2n+1)
and weak bonds of magnitude 1 - alpha (sites 2n-1, 2n), alpha in [0, 1].
Everything here is evaluated in momentum space at half filling: with the
two-site unit cell the bands are +-eps(k),

    eps(k) = sqrt(ts^2 + tw^2 + 2 ts tw cos k),   ts = 1 + alpha, tw = 1 - alpha,

and the lower band filled.  The momentum grid uses half-integer points
k_j = 2 pi (j + 1/2) / n_cells, which never hit the gap-closing point k = pi,
converge at O(1/n_cells^2), and correspond exactly to a real-space ring of
2 * n_cells sites whose single wrap bond has its sign flipped (checked
against :mod:`concopt.fermion` in the test suite).

Bond orders follow from the filled band:

    gamma_strong = (1/m) sum_k (ts + tw cos k) / (2 eps(k))   in [1/pi, 1/2],
    gamma_weak   = (1/m) sum_k (tw + ts cos k) / (2 eps(k))   in [0, 1/pi],

the half-filling concurrences are C = 2 max{0, gamma + gamma^2 - 1/4}, and
the ground-state energy per site is E = -(1+alpha) gamma_strong
- (1-alpha) gamma_weak.  The weak-bond concurrence vanishes where
gamma_weak crosses (sqrt(2) - 1)/2, producing the kink located by
:func:`locate_weak_bond_vanishing`; derivatives of C and E develop the
metal-insulator (Peierls) singularity as alpha -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fermion import half_filling_concurrence

__all__ = [
    "DimerizedPoint",
    "ssh_bond_orders",
    "ssh_energy_per_site",
    "dimerized_concurrences",
    "concurrence_derivatives",
    "energy_derivatives",
    "energy_derivatives_from_bond_orders",
    "locate_weak_bond_vanishing",
    "dimerized_point",
    "DEFAULT_N_CELLS",
    "DEFAULT_STEP",
]

DEFAULT_N_CELLS = 4096
DEFAULT_STEP = 1e-4


@dataclass(frozen=True)
class DimerizedPoint:
    """One alpha sample of the dimerized-chain observables."""

    alpha: float
    gamma_strong: float
    gamma_weak: float
    c_strong: float
    c_weak: float
    e_gs: float


def _check_alpha(alpha: float) -> float:
    a = float(alpha)
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"dimerization parameter must be in [0, 1], got {a}")
    return a


def _k_grid(n_cells: int) -> np.ndarray:
    if n_cells < 2:
        raise ValueError(f"need at least 2 unit cells, got {n_cells}")
    return 2.0 * math.pi * (np.arange(n_cells) + 0.5) / n_cells


def ssh_bond_orders(alpha: float, n_cells: int = DEFAULT_N_CELLS) -> tuple[float, float]:
    """Half-filled bond orders (gamma_strong, gamma_weak) at dimerization alpha."""
    a = _check_alpha(alpha)
    ts, tw = 1.0 + a, 1.0 - a
    if tw == 0.0:
        # fully dimerized chain: isolated dimers, bond orders are exact
        _k_grid(n_cells)
        return 0.5, 0.0
    k = _k_grid(n_cells)
    eps = np.sqrt(ts * ts + tw * tw + 2.0 * ts * tw * np.cos(k))
    # odd grids hit the alpha=0 band touching at k=pi, where both summands
    # tend to 0; substitute that limit instead of 0/0
    safe = np.where(eps > 0.0, eps, 1.0)
    gamma_strong = float(np.mean(np.where(eps > 0.0, (ts + tw * np.cos(k)) / (2.0 * safe), 0.0)))
    gamma_weak = float(np.mean(np.where(eps > 0.0, (tw + ts * np.cos(k)) / (2.0 * safe), 0.0)))
    return gamma_strong, gamma_weak


def ssh_energy_per_site(alpha: float, n_cells: int = DEFAULT_N_CELLS) -> float:
    """Ground-state energy per site, from the filled lower band."""
    a = _check_alpha(alpha)
    ts, tw = 1.0 + a, 1.0 - a
    k = _k_grid(n_cells)
    eps = np.sqrt(ts * ts + tw * tw + 2.0 * ts * tw * np.cos(k))
    return float(-np.mean(eps) / 2.0)


def dimerized_concurrences(alpha: float, n_cells: int = DEFAULT_N_CELLS) -> tuple[float, float]:
    """(c_strong, c_weak): the closed form applied to each bond order."""
    gs, gw = ssh_bond_orders(alpha, n_cells)
    return half_filling_concurrence(gs), half_filling_concurrence(gw)


def dimerized_point(alpha: float, n_cells: int = DEFAULT_N_CELLS) -> DimerizedPoint:
    """Bundle bond orders, concurrences and energy at one alpha."""
    gs, gw = ssh_bond_orders(alpha, n_cells)
    a = float(alpha)
    return DimerizedPoint(
        alpha=a,
        gamma_strong=gs,
        gamma_weak=gw,
        c_strong=half_filling_concurrence(gs),
        c_weak=half_filling_concurrence(gw),
        e_gs=-(1.0 + a) * gs - (1.0 - a) * gw,
    )


def _check_step(h: float) -> float:
    h = float(h)
    if not 0.0 < h <= 1e-2:
        raise ValueError(f"finite-difference step must be in (0, 1e-2], got {h}")
    return h


def _derivative(f, alpha: float, h: float, even_at_zero: bool = False) -> float:
    """Second-order first derivative with endpoint handling on [0, 1].

    Central stencil in the interior.  At alpha = 0 an even function may be
    reflected (exact by symmetry); otherwise a one-sided 3-point stencil is
    used.  Same at alpha = 1.
    """
    if alpha - h >= 0.0 and alpha + h <= 1.0:
        return (f(alpha + h) - f(alpha - h)) / (2.0 * h)
    if alpha - h < 0.0:
        if even_at_zero:
            return (f(alpha + h) - f(h - alpha)) / (2.0 * h)
        return (-3.0 * f(alpha) + 4.0 * f(alpha + h) - f(alpha + 2.0 * h)) / (2.0 * h)
    return (3.0 * f(alpha) - 4.0 * f(alpha - h) + f(alpha - 2.0 * h)) / (2.0 * h)


def _second_derivative(f, alpha: float, h: float, even_at_zero: bool = False) -> float:
    if alpha - h >= 0.0 and alpha + h <= 1.0:
        return (f(alpha + h) - 2.0 * f(alpha) + f(alpha - h)) / (h * h)
    if alpha - h < 0.0:
        if even_at_zero:
            return (f(alpha + h) - 2.0 * f(alpha) + f(h - alpha)) / (h * h)
        return (f(alpha) - 2.0 * f(alpha + h) + f(alpha + 2.0 * h)) / (h * h)
    return (f(alpha) - 2.0 * f(alpha - h) + f(alpha - 2.0 * h)) / (h * h)


def concurrence_derivatives(
    alpha: float,
    n_cells: int = DEFAULT_N_CELLS,
    h: float = DEFAULT_STEP,
    *,
    chain_rule: bool = False,
) -> tuple[float, float]:
    """(dC_strong/dalpha, dC_weak/dalpha).

    Default route differences the concurrences themselves.  With
    ``chain_rule=True`` the alternative 2 (1 + 2 gamma) dgamma/dalpha form
    is returned instead (valid wherever C > 0, zero where C = 0); the two
    routes agree to O(h^2) and are cross-checked in the tests.
    """
    a = _check_alpha(alpha)
    h = _check_step(h)
    if not chain_rule:
        dcs = _derivative(lambda x: dimerized_concurrences(x, n_cells)[0], a, h)
        dcw = _derivative(lambda x: dimerized_concurrences(x, n_cells)[1], a, h)
        return dcs, dcw
    gs, gw = ssh_bond_orders(a, n_cells)
    dgs = _derivative(lambda x: ssh_bond_orders(x, n_cells)[0], a, h)
    dgw = _derivative(lambda x: ssh_bond_orders(x, n_cells)[1], a, h)
    cs, cw = half_filling_concurrence(gs), half_filling_concurrence(gw)
    dcs = 2.0 * (1.0 + 2.0 * gs) * dgs if cs > 0.0 else 0.0
    dcw = 2.0 * (1.0 + 2.0 * gw) * dgw if cw > 0.0 else 0.0
    return dcs, dcw


def energy_derivatives(
    alpha: float, n_cells: int = DEFAULT_N_CELLS, h: float = DEFAULT_STEP
) -> tuple[float, float, float]:
    """(E, dE/dalpha, d2E/dalpha2) per site, by finite differences of E.

    E is even under alpha -> -alpha (relabeling strong and weak bonds), so
    the stencils at alpha = 0 use the reflected values; in particular
    dE/dalpha(0) = 0 identically.
    """
    a = _check_alpha(alpha)
    h = _check_step(h)
    e = lambda x: ssh_energy_per_site(x, n_cells)
    return (
        e(a),
        _derivative(e, a, h, even_at_zero=True),
        _second_derivative(e, a, h, even_at_zero=True),
    )


def energy_derivatives_from_bond_orders(
    alpha: float, n_cells: int = DEFAULT_N_CELLS, h: float = DEFAULT_STEP
) -> tuple[float, float, float]:
    """(E, dE/dalpha, d2E/dalpha2) via the bond-order expansion.

    E   = -(1+a) gs - (1-a) gw
    E'  = -(1+a) gs' - (1-a) gw' - gs + gw
    E'' = -(1+a) gs'' - (1-a) gw'' - 2 gs' + 2 gw'

    with the bond-order derivatives themselves finite-differenced.  Kept as
    an independent route to guard against transcription errors in either
    formula.
    """
    a = _check_alpha(alpha)
    h = _check_step(h)
    fs = lambda x: ssh_bond_orders(x, n_cells)[0]
    fw = lambda x: ssh_bond_orders(x, n_cells)[1]
    gs, gw = fs(a), fw(a)
    dgs, dgw = _derivative(fs, a, h), _derivative(fw, a, h)
    d2gs, d2gw = _second_derivative(fs, a, h), _second_derivative(fw, a, h)
    e = -(1.0 + a) * gs - (1.0 - a) * gw
    de = -(1.0 + a) * dgs - (1.0 - a) * dgw - gs + gw
    d2e = -(1.0 + a) * d2gs - (1.0 - a) * d2gw - 2.0 * dgs + 2.0 * dgw
    return e, de, d2e


def locate_weak_bond_vanishing(
    n_cells: int = DEFAULT_N_CELLS, tol: float = 1e-6
) -> float:
    """Alpha where the weak-bond concurrence reaches zero.

    Bisection root of gamma_weak + gamma_weak^2 - 1/4, i.e. the point where
    gamma_weak crosses (sqrt(2) - 1)/2 ~ 0.2071.  The argument decreases
    monotonically in alpha, so the bracket [0, 1] always works.
    """
    if tol < 1e-6:
        raise ValueError(f"tolerance must be at least 1e-6, got {tol}")

    def arg(a: float) -> float:
        gw = ssh_bond_orders(a, n_cells)[1]
        return gw + gw * gw - 0.25

    lo, hi = 0.0, 1.0
    if arg(lo) <= 0.0 or arg(hi) >= 0.0:  # pragma: no cover - analytically impossible
        raise RuntimeError("weak-bond concurrence bracket failure")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if arg(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
