"""Dispersion solver, analytic estimate, Kerr ladder, flux inversion."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from qcsim import (
    DeviceConfig,
    QubitParams,
    RegimeError,
    SquidParams,
    SquidState,
    TransmissionLineParams,
    angular_to_ghz,
    derive_ratios,
    flux_factor,
    flux_for_frequency,
    fundamental_approx,
    kerr_coefficient,
    level_shifts,
    mode_nonlinearity,
    solve_dispersion,
    tuning_band,
)
from qcsim.constants import TWO_PI
from qcsim.modes import _residual


def test_zero_flux_fundamental(device):
    mode = solve_dispersion(device, SquidState(flux=0.0), 1)[0]
    assert abs(angular_to_ghz(mode.omega) - 6.0) / 6.0 < 0.01
    assert abs(mode.kl - 1.54) / 1.54 < 0.01
    # frozen solver value for regression
    assert mode.kl == pytest.approx(1.5398622063265, rel=1e-10)


def test_ideal_quarter_wave_limit():
    # Vanishing capacitive load and overwhelming termination push the
    # fundamental against the quarter-wave point kl = pi/2.
    line = TransmissionLineParams(length=4.87, c0=0.16, l0=0.44)
    squid = SquidParams(ej1=2.5e8, ej2=2.5e8, cs=1e-9)
    dev = DeviceConfig(
        qubit1=QubitParams.from_frequency(100.0, TWO_PI * 4.0),
        qubit2=QubitParams.from_frequency(90.0, TWO_PI * 4.1),
        line=line,
        squid=squid,
        caps=device_caps(),
    )
    kl = solve_dispersion(dev, SquidState(flux=0.0), 1)[0].kl
    assert kl == pytest.approx(math.pi / 2, abs=2e-5)


def device_caps():
    from qcsim import CouplingCaps

    return CouplingCaps(c12=0.06, c1c=1.0, c2c=1.0, cc=780.0)


def test_bisection_against_grid_scan_oracle(device):
    # Independent root finder: coarse scan for the sign change, then
    # Brent refinement inside the located bracket.
    state = SquidState(flux=0.3)
    ratios = derive_ratios(device)
    load = flux_factor(device, state) / ratios.r_l

    grid = np.linspace(1e-6, math.pi / 2 - 1e-9, 20001)
    vals = np.array([_residual(x, ratios.r_c, load) for x in grid])
    (idx,) = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    assert len(idx) == 1
    oracle = brentq(
        lambda x: _residual(x, ratios.r_c, load), grid[idx[0]], grid[idx[0] + 1], xtol=1e-14
    )
    mode = solve_dispersion(device, state, 1)[0]
    assert abs(mode.kl - oracle) / oracle < 1e-9


def test_root_is_bracketed(device):
    for flux in (0.0, 0.2, 0.45):
        ratios = derive_ratios(device)
        load = flux_factor(device, SquidState(flux=flux)) / ratios.r_l
        for mode in solve_dispersion(device, SquidState(flux=flux), 3):
            below = _residual(mode.kl * (1 - 1e-7), ratios.r_c, load)
            above = _residual(mode.kl * (1 + 1e-7), ratios.r_c, load)
            assert below < 0 < above


def test_missing_branch_root_is_regime_error(device):
    # Close to half flux the termination is too weak to hold the higher
    # branches; the affected mode must error, not silently relocate.
    with pytest.raises(RegimeError, match="branch"):
        solve_dispersion(device, SquidState(flux=0.495), 3)


def test_mode_ladder_strongly_non_equidistant(device):
    modes = solve_dispersion(device, SquidState(flux=0.0), 3)
    gaps = [modes[1].omega - modes[0].omega, modes[2].omega - modes[1].omega]
    assert all(gap > TWO_PI * 1.0 for gap in gaps)
    assert abs(gaps[1] - gaps[0]) > TWO_PI * 0.01


def test_flux_monotonicity_and_asymmetry_ordering(device):
    # With the boundary phase at zero the asymmetric curves coincide
    # with the symmetric one (the offset rotation exactly compensates
    # the energy sag), so the ordering check is <= with ulp headroom.
    grid = np.linspace(0.0, 0.45, 100)
    curves = {}
    for d in (0.0, 0.1, 0.2):
        total = device.squid.total
        squid = SquidParams(ej1=0.5 * (1 + d) * total, ej2=0.5 * (1 - d) * total, cs=device.squid.cs)
        dev = DeviceConfig(
            qubit1=device.qubit1, qubit2=device.qubit2, line=device.line, squid=squid, caps=device.caps
        )
        freqs = [solve_dispersion(dev, SquidState(flux=f), 1)[0].omega for f in grid]
        assert all(b < a for a, b in zip(freqs, freqs[1:]))
        curves[d] = np.array(freqs)
    tol = 1e-9 * curves[0.0]
    assert np.all(curves[0.1] <= curves[0.0] + tol)
    assert np.all(curves[0.2] <= curves[0.1] + tol)


def test_analytic_estimate_calibration_identity(device):
    ratios = derive_ratios(device)
    reference = solve_dispersion(device, SquidState(flux=0.0), 1)[0].omega
    estimate = fundamental_approx(device, SquidState(flux=0.0))
    assert estimate * (1 + ratios.r_l / 2) == pytest.approx(reference, rel=1e-14)


def test_analytic_estimate_within_two_percent(device):
    for flux in np.linspace(0.0, 0.4, 21):
        exact = solve_dispersion(device, SquidState(flux=flux), 1)[0].omega
        estimate = fundamental_approx(device, SquidState(flux=flux))
        assert abs(estimate - exact) / exact <= 0.02
    # quarter-flux spot check
    exact = solve_dispersion(device, SquidState(flux=0.25), 1)[0].omega
    assert fundamental_approx(device, SquidState(flux=0.25)) == pytest.approx(exact, rel=0.02)


def test_analytic_estimate_collapse_at_half_flux(device):
    with pytest.raises(RegimeError, match="collapses"):
        fundamental_approx(device, SquidState(flux=0.5))


# --- Kerr ladder ---------------------------------------------------------


def test_level_shift_algebra():
    for lam_e in (0.3, 1.7):
        shifts = level_shifts(1.2, lam_e / kerr_coefficient(1.2), 4)
        assert shifts[0] == pytest.approx(-3 * lam_e, rel=1e-12)
        assert shifts[2] - shifts[1] == pytest.approx(-24 * lam_e, rel=1e-12)
        assert all(b < a for a, b in zip(shifts, shifts[1:]))


def test_mode_nonlinearity_populates(device):
    mode = solve_dispersion(device, SquidState(flux=0.0), 1, m_max=2)[0]
    refreshed = mode_nonlinearity(mode, derive_ratios(device).e_lcav, m_max=6)
    assert len(refreshed.shifts) == 7
    assert refreshed.lam == pytest.approx(mode.lam, rel=1e-15)
    assert refreshed.anharmonicity == pytest.approx(-24 * mode.lam * derive_ratios(device).e_lcav, rel=1e-12)
    with pytest.raises(ValueError, match="m_max"):
        mode_nonlinearity(mode, 1.0, m_max=1)


def test_anharmonicity_grows_toward_half_flux(device):
    # The quartic coefficient rises steeply as the mode is tuned down;
    # the -50 MHz two-photon anharmonicity lands near 5.90 GHz (flux
    # ~0.315) for this device, far above where the mode reaches 4.5 GHz.
    values = []
    for flux in (0.0, 0.2, 0.3, 0.4):
        mode = solve_dispersion(device, SquidState(flux=flux), 1)[0]
        values.append(angular_to_ghz(mode.anharmonicity) * 1e3)
    assert values[0] == pytest.approx(-8.617244, rel=1e-5)
    assert all(b < a for a, b in zip(values, values[1:]))

    mode = solve_dispersion(device, SquidState(flux=0.3150821540), 1)[0]
    assert angular_to_ghz(mode.anharmonicity) * 1e3 == pytest.approx(-50.0, rel=1e-4)
    assert angular_to_ghz(mode.omega) == pytest.approx(5.9015555, rel=1e-6)


def test_lower_line_capacitance_raises_anharmonicity(device):
    # At a fixed fundamental frequency, a lighter line puts the root at a
    # smaller kl, which boosts the quartic participation.  True whether
    # the SQUID capacitance is held fixed or co-scaled to keep its ratio.
    import dataclasses

    target = TWO_PI * 5.8

    def anharm_at_target(dev):
        flux = flux_for_frequency(dev, target)
        return solve_dispersion(dev, SquidState(flux=flux), 1)[0].anharmonicity

    base = anharm_at_target(device)
    for keep_ratio in (False, True):
        line = dataclasses.replace(device.line, c0=0.12)
        cs = device.squid.cs * (0.12 / 0.16) if keep_ratio else device.squid.cs
        squid = dataclasses.replace(device.squid, cs=cs)
        lighter = dataclasses.replace(device, line=line, squid=squid)
        assert abs(anharm_at_target(lighter)) > abs(base)


# --- flux inversion ------------------------------------------------------


def test_inversion_endpoint(device):
    top = solve_dispersion(device, SquidState(flux=0.0), 1)[0].omega
    assert flux_for_frequency(device, top) == 0.0


def test_inversion_round_trip(device):
    target = solve_dispersion(device, SquidState(flux=0.3), 1)[0].omega
    assert abs(flux_for_frequency(device, target) - 0.3) <= 1e-6


def test_inversion_out_of_range_names_band(device):
    bottom, top = tuning_band(device)
    with pytest.raises(RegimeError, match="above achievable band"):
        flux_for_frequency(device, top * 1.01)
    with pytest.raises(RegimeError, match="below achievable band"):
        flux_for_frequency(device, bottom * 0.9)
