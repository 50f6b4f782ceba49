"""Leakage dynamics during the two-qubit gate as off-resonant Rabi flops.

Each leakage channel reduces to a two-level problem (computational
state, leak state) with a time-independent Hamiltonian during a square
flux pulse; the propagator is the exact closed-form 2x2 unitary, and a
train of identical pulses is the single-pulse unitary to the n-th power,
i.e. one evolution of the total hold time.

single channel: one-excitation exchange between the first qubit and the
coupler, energies (w1, wc), coupling g1c.  double channel: the doubly
excited computational state against the bright leak combination, whose
energy in the small-mixing limit is wc + w2, same coupling g1c.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .circuit import DeviceConfig, qubit_spectrum
from .constants import angular_to_ghz
from .coupling import qubit_coupler_coupling
from .sweeps import SweepResult


@dataclass(frozen=True)
class PulseSpec:
    """Square flux pulse: in-pulse coupler frequency `amplitude`
    (rad/ns), hold time `duration` (ns), `n_cz` repetitions."""

    amplitude: float
    duration: float
    n_cz: int = 1
    shape: str = "square"

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.n_cz < 1:
            raise ValueError(f"n_cz must be >= 1, got {self.n_cz}")
        if self.shape != "square":
            raise ValueError(f"only square pulses are supported, got {self.shape!r}")


@dataclass(frozen=True)
class TwoLevelProblem:
    """Diagonal energies e1, e2 (rad/ns), coupling g (rad/ns), and a
    normalized initial amplitude pair."""

    e1: float
    e2: float
    g: float
    psi0: Tuple[complex, complex] = (1.0 + 0.0j, 0.0j)

    def __post_init__(self) -> None:
        norm = abs(self.psi0[0]) ** 2 + abs(self.psi0[1]) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"initial state norm {norm} differs from 1 by more than 1e-12")


def propagator(e1: float, e2: float, g: float, t: float) -> np.ndarray:
    """Exact 2x2 unitary exp(-i H t) for H = [[e1, g], [g, e2]].

    With detuning D = e1 - e2 and Rabi frequency R = sqrt(4g^2 + D^2):
    a global phase exp(-i (e1+e2) t / 2) times a rotation by R*t about
    the axis (2g, 0, D)/R.
    """
    delta = e1 - e2
    rabi = math.hypot(2.0 * g, delta)
    half = 0.5 * rabi * t
    phase = cmath.exp(-0.5j * (e1 + e2) * t)
    if rabi == 0.0:
        return phase * np.eye(2, dtype=complex)
    c, s = math.cos(half), math.sin(half)
    nz = delta / rabi
    nx = 2.0 * g / rabi
    return phase * np.array(
        [
            [c - 1j * nz * s, -1j * nx * s],
            [-1j * nx * s, c + 1j * nz * s],
        ]
    )


def evolve_two_level(problem: TwoLevelProblem, t: float) -> Tuple[float, float]:
    """Populations (p1, p2) after evolving psi0 for time t (ns).

    Starting from state 1 this reduces to the off-resonant Rabi formula
    p2(t) = (4g^2/R^2) * sin^2(R t / 2).
    """
    u = propagator(problem.e1, problem.e2, problem.g, t)
    psi = u @ np.array(problem.psi0, dtype=complex)
    return float(abs(psi[0]) ** 2), float(abs(psi[1]) ** 2)


@dataclass(frozen=True)
class BrightDark:
    """Rotation angle of the bright/dark leak basis and the coupling of
    the computational state to the bright combination."""

    theta: float
    reduced_coupling: float


def bright_dark(g12: float, g1c: float) -> BrightDark:
    """Mixing angle theta = atan(sqrt(2)*g12/g1c) between the two leak
    states, and the bright-state coupling g1c/cos(theta), which reduces
    to g1c as the mixing vanishes.

    Convention: bright = cos(theta)*|one-each> + sin(theta)*|double>,
    dark = -sin(theta)*|one-each> + cos(theta)*|double>, so the pair is
    orthonormal and the dark combination carries no matrix element to
    the computational state.
    """
    if g1c <= 0:
        raise ValueError(f"g1c must be positive, got {g1c}")
    theta = math.atan(math.sqrt(2.0) * g12 / g1c)
    return BrightDark(theta=theta, reduced_coupling=g1c / math.cos(theta))


def leakage_sweep(
    device: DeviceConfig,
    idle_omega_c: float,
    amplitudes: Sequence[float],
    ncz_values: Sequence[int],
    channel: str = "single",
    duration: float = 40.0,
) -> SweepResult:
    """Final computational/leak populations after repeated square pulses.

    Grid axes are the in-pulse coupler frequency (rad/ns in, GHz in the
    result) and the gate count; the initial state is the computational
    state of the selected channel.  Row-major: amplitude outer, count
    inner.
    """
    if channel not in ("single", "double"):
        raise ValueError(f"channel must be 'single' or 'double', got {channel!r}")
    if not amplitudes or not ncz_values:
        raise ValueError("amplitude and gate-count grids must be nonempty")
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    for n in ncz_values:
        if n < 1:
            raise ValueError(f"gate counts must be >= 1, got {n}")
    w1 = qubit_spectrum(device.qubit1).omega
    w2 = qubit_spectrum(device.qubit2).omega

    p_comp, p_leak = [], []
    for amp in amplitudes:
        g = qubit_coupler_coupling(device, 1, amp)
        if channel == "single":
            e_comp, e_leak = w1, amp
        else:
            e_comp, e_leak = w1 + w2, amp + w2
        problem = TwoLevelProblem(e1=e_comp, e2=e_leak, g=g)
        for n in ncz_values:
            pulse = PulseSpec(amplitude=amp, duration=duration, n_cz=n)
            stay, leak = evolve_two_level(problem, pulse.n_cz * pulse.duration)
            p_comp.append(stay)
            p_leak.append(leak)
    return SweepResult(
        axes={
            "amp_ghz": tuple(angular_to_ghz(a) for a in amplitudes),
            "n_cz": tuple(float(n) for n in ncz_values),
        },
        columns={"p_comp": tuple(p_comp), "p_leak": tuple(p_leak)},
        metadata={
            "channel": channel,
            "idle_ghz": angular_to_ghz(idle_omega_c),
            "duration_ns": duration,
        },
    )
