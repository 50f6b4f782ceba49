"""Direct, mediated, and net qubit-qubit coupling; switch-off search.

The net exchange coupling between the qubits is a two-term sum: the
direct capacitive term

    g12 = (C12 + C1c*C2c/Cc) / (2*sqrt(C1*C2)) * sqrt(w1*w2)

plus the resonator-mediated term

    (wc/8) * (1/D1 + 1/D2 - 1/S1 - 1/S2) * C1c*C2c/(Cc*sqrt(C1*C2)) * sqrt(w1*w2)

with D_j = w_j - wc and S_j = w_j + wc.  Above both qubit frequencies
the mediated term is negative and cancels the direct one at a single
frequency, the switch-off point.  The rotating-wave multimode variant
keeps only the 1/D terms and sums over resonator modes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .circuit import DeviceConfig, qubit_spectrum
from .errors import RegimeError, RegimeWarning
from .modes import ModeSolution, flux_for_frequency, tuning_band

DISPERSIVE_GUARD = 0.3


@dataclass(frozen=True)
class CouplingReport:
    """Couplings and dressed frequencies at one coupler frequency (all rad/ns).

    `direct` and `mediated` are the two terms of g_eff; `mediated_rwa`
    is the mediated term without the counter-rotating 1/(w_j + wc)
    contributions, i.e. the single-mode value of the rotating-wave
    multimode sum.  `guard1`/`guard2` are |g_jc / D_j|.
    """

    omega_c: float
    g12: float
    g1c: float
    g2c: float
    g_eff: float
    dressed1: float
    dressed2: float
    delta1: float
    delta2: float
    lambda1: float
    lambda2: float
    direct: float
    mediated: float
    mediated_rwa: float
    guard1: float
    guard2: float


def direct_coupling(device: DeviceConfig) -> float:
    """Direct capacitive qubit-qubit coupling (rad/ns)."""
    caps = device.caps
    w1 = qubit_spectrum(device.qubit1).omega
    w2 = qubit_spectrum(device.qubit2).omega
    c_eff = caps.c12 + caps.c1c * caps.c2c / caps.cc
    return c_eff / (2.0 * math.sqrt(device.qubit1.c_total * device.qubit2.c_total)) * math.sqrt(
        w1 * w2
    )


def qubit_coupler_coupling(device: DeviceConfig, which: int, omega_c: float) -> float:
    """Qubit-coupler exchange coupling g_jc = C_jc/(2*sqrt(C_j*Cc)) *
    sqrt(w_j * wc) for qubit `which` (1 or 2), rad/ns."""
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which}")
    if omega_c <= 0:
        raise ValueError(f"omega_c must be positive, got {omega_c}")
    qubit = device.qubit1 if which == 1 else device.qubit2
    c_jc = device.caps.c1c if which == 1 else device.caps.c2c
    w_j = qubit_spectrum(qubit).omega
    return c_jc / (2.0 * math.sqrt(qubit.c_total * device.caps.cc)) * math.sqrt(w_j * omega_c)


def effective_coupling(device: DeviceConfig, omega_c: float) -> CouplingReport:
    """Net qubit-qubit coupling and dressed frequencies at `omega_c`.

    Errors on exact qubit-coupler resonance; warns when a dispersive
    guard |g_jc/D_j| exceeds 0.3.
    """
    w1 = qubit_spectrum(device.qubit1).omega
    w2 = qubit_spectrum(device.qubit2).omega
    if omega_c == w1 or omega_c == w2:
        raise RegimeError(f"omega_c = {omega_c} resonant with a qubit; detuning vanishes")
    caps = device.caps
    d1, d2 = w1 - omega_c, w2 - omega_c
    s1, s2 = w1 + omega_c, w2 + omega_c
    g12 = direct_coupling(device)
    g1c = qubit_coupler_coupling(device, 1, omega_c)
    g2c = qubit_coupler_coupling(device, 2, omega_c)

    cap_ratio = caps.c1c * caps.c2c / (caps.cc * math.sqrt(device.qubit1.c_total * device.qubit2.c_total))
    mediated = omega_c / 8.0 * (1.0 / d1 + 1.0 / d2 - 1.0 / s1 - 1.0 / s2) * cap_ratio * math.sqrt(
        w1 * w2
    )
    mediated_rwa = 0.5 * g1c * g2c * (1.0 / d1 + 1.0 / d2)

    guard1, guard2 = abs(g1c / d1), abs(g2c / d2)
    if max(guard1, guard2) > DISPERSIVE_GUARD:
        warnings.warn(
            f"dispersive guard |g_jc/D_j| = {max(guard1, guard2):.3f} > "
            f"{DISPERSIVE_GUARD} at omega_c = {omega_c:.4f} rad/ns",
            RegimeWarning,
            stacklevel=2,
        )
    dressed1 = w1 + g1c**2 * (1.0 / d1 - 1.0 / s1)
    dressed2 = w2 + g2c**2 * (1.0 / d2 - 1.0 / s2)
    return CouplingReport(
        omega_c=omega_c,
        g12=g12,
        g1c=g1c,
        g2c=g2c,
        g_eff=g12 + mediated,
        dressed1=dressed1,
        dressed2=dressed2,
        delta1=d1,
        delta2=d2,
        lambda1=s1,
        lambda2=s2,
        direct=g12,
        mediated=mediated,
        mediated_rwa=mediated_rwa,
        guard1=guard1,
        guard2=guard2,
    )


@dataclass(frozen=True)
class MultimodeCoupling:
    """Rotating-wave net coupling with per-mode mediated contributions."""

    g_eff: float
    direct: float
    contributions: Tuple[float, ...]


def multimode_effective_coupling(
    device: DeviceConfig, modes: Sequence[ModeSolution]
) -> MultimodeCoupling:
    """Net coupling g12 + sum_n g1c(n)*g2c(n)*(1/D1(n) + 1/D2(n))/2 over
    the supplied resonator modes (rotating-wave form, no counter-rotating
    terms).

    The per-mode couplings reuse the capacitive single-mode formula with
    that mode's frequency substituted, which ignores any mode-dependent
    participation factor; for strongly non-equidistant ladders the
    higher-mode terms are small near the operating point but not
    negligible far from it.
    """
    w1 = qubit_spectrum(device.qubit1).omega
    w2 = qubit_spectrum(device.qubit2).omega
    g12 = direct_coupling(device)
    contributions = []
    for mode in modes:
        d1 = w1 - mode.omega
        d2 = w2 - mode.omega
        if d1 == 0.0 or d2 == 0.0:
            raise RegimeError(f"mode {mode.index} resonant with a qubit at {mode.omega} rad/ns")
        g1c = qubit_coupler_coupling(device, 1, mode.omega)
        g2c = qubit_coupler_coupling(device, 2, mode.omega)
        contributions.append(0.5 * g1c * g2c * (1.0 / d1 + 1.0 / d2))
    return MultimodeCoupling(
        g_eff=g12 + sum(contributions), direct=g12, contributions=tuple(contributions)
    )


@dataclass(frozen=True)
class SwitchOffResult:
    """Root of g_eff: frequency (rad/ns), flux (or None when the root is
    not reachable by tuning), the residual |g_eff| at the root, the
    dispersive guard there, all roots found, and the achievable band."""

    omega_off: float
    flux_off: float | None
    residual: float
    guard: float
    roots: Tuple[float, ...]
    band: Tuple[float, float]


_SEARCH_BELOW = 2.0 * math.pi * 1.5  # how far below the lower qubit to search
_MARGIN = 2.0 * math.pi * 1e-3  # keep 1 MHz clear of the resonance poles
_GRID = 512


def _g_eff_quiet(device: DeviceConfig, omega_c: float) -> float:
    # The root scan deliberately sweeps past the resonance poles; the
    # dispersive guard is reported once, at the returned root.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        return effective_coupling(device, omega_c).g_eff


def _bisect_root(device: DeviceConfig, lo: float, hi: float) -> float:
    f_lo = _g_eff_quiet(device, lo)
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        f_mid = _g_eff_quiet(device, mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def switch_off(device: DeviceConfig) -> SwitchOffResult:
    """Locate the coupler frequency where g_eff crosses zero.

    Scans the band below the lower qubit frequency and the band between
    the upper qubit frequency and the top of the flux-tuning range, both
    kept clear of the resonance poles; each sign change is refined by
    bisection to 1e-9 rad/ns.  Roots inside the achievable flux band are
    preferred, ties broken by the smaller dispersive guard.
    """
    w1 = qubit_spectrum(device.qubit1).omega
    w2 = qubit_spectrum(device.qubit2).omega
    w_lo, w_hi = min(w1, w2), max(w1, w2)
    band = tuning_band(device)

    branches = [
        (max(w_lo - _SEARCH_BELOW, _MARGIN), w_lo - _MARGIN),
        (w_hi + _MARGIN, band[1]),
    ]
    roots: List[float] = []
    endpoint_info = []
    for lo, hi in branches:
        if hi <= lo:
            continue
        step = (hi - lo) / _GRID
        prev_x = lo
        prev_f = _g_eff_quiet(device, prev_x)
        endpoint_info.append((lo, prev_f))
        for i in range(1, _GRID + 1):
            x = lo + i * step
            f = _g_eff_quiet(device, x)
            if f == 0.0:
                roots.append(x)
            elif (f < 0.0) != (prev_f < 0.0):
                roots.append(_bisect_root(device, prev_x, x))
            prev_x, prev_f = x, f
        endpoint_info.append((hi, prev_f))
    if not roots:
        listing = ", ".join(f"g_eff({x:.4f}) = {f:.3e}" for x, f in endpoint_info)
        raise RegimeError(f"g_eff does not change sign on the searched bands: {listing}")

    def sort_key(root: float):
        reachable = band[0] <= root <= band[1]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            rep = effective_coupling(device, root)
        return (not reachable, max(rep.guard1, rep.guard2))

    best = min(roots, key=sort_key)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        report = effective_coupling(device, best)
    reachable = band[0] <= best <= band[1]
    flux_off = flux_for_frequency(device, best) if reachable else None
    return SwitchOffResult(
        omega_off=best,
        flux_off=flux_off,
        residual=abs(report.g_eff),
        guard=max(report.guard1, report.guard2),
        roots=tuple(sorted(roots)),
        band=band,
    )
