import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wpirsa.channel import (ChannelParams, DataGain, EhChannel, exponential_correlation,
                            sample_eh_channel)
from wpirsa.errors import DegenerateChannelError, InsufficientEnergyError, InvalidParameterError
from wpirsa.harvest import (
    Battery,
    CostModel,
    CsiMode,
    EhCurve,
    charge,
    harvest_rate,
    incident_power,
    level,
    max_copies,
    max_extra_replicas,
    packet_quantum,
    spend,
)

XI = 0.21
CURVE = EhCurve()


def battery(packets, capacity=6):
    return Battery(packets * XI, XI, capacity)


def test_quantum_from_table_parameters():
    # 10 mW * 1 ms * 21 -> 0.21 mJ
    assert packet_quantum(10.0, 1e-3, 21) == pytest.approx(0.21)


@pytest.mark.parametrize("mode", list(CsiMode))
def test_incident_without_scatter(mode):
    los = np.array([0.3 + 0.1j, -0.2j, 0.5])
    ch = EhChannel(beta=2e-3, los=los, scatter=np.zeros(3, complex))
    expected = 2e-3 * 1.5 * np.sum(np.abs(los) ** 2) * 1e3
    assert incident_power(ch, 1.5, mode) == pytest.approx(expected)


def test_single_antenna_modes_coincide():
    rng = np.random.default_rng(0)
    p = ChannelParams(antennas=1)
    for _ in range(100):
        ch = sample_eh_channel(p, rng)
        f = incident_power(ch, 1.0, CsiMode.FULL)
        a = incident_power(ch, 1.0, CsiMode.AVERAGE)
        assert f == pytest.approx(a, rel=1e-12)
        assert f == pytest.approx(ch.beta * 1e3 * abs(ch.los[0] + ch.scatter[0]) ** 2)


def test_full_csi_dominates_average():
    rng = np.random.default_rng(1)
    p = ChannelParams(antennas=8, rician_kappa_linear=1.585)
    ch = sample_eh_channel(p, rng, size=10_000)
    f = incident_power(ch, 1.0, CsiMode.FULL)
    a = incident_power(ch, 1.0, CsiMode.AVERAGE)
    assert np.all(f >= a * (1 - 1e-12))
    assert np.all(a >= 0)


def test_batched_matches_scalar():
    rng = np.random.default_rng(2)
    p = ChannelParams(antennas=4)
    ch = sample_eh_channel(p, rng, size=5)
    for mode in CsiMode:
        batch = incident_power(ch, 2.0, mode)
        single = [incident_power(EhChannel(ch.beta, ch.los, s), 2.0, mode) for s in ch.scatter]
        np.testing.assert_allclose(batch, single)


def test_average_csi_rejects_zero_los():
    ch = EhChannel(beta=1.0, los=np.zeros(2, complex), scatter=np.ones(2, complex))
    with pytest.raises(DegenerateChannelError):
        incident_power(ch, 1.0, CsiMode.AVERAGE)
    assert incident_power(ch, 1.0, CsiMode.FULL) == pytest.approx(2e3)


def test_incident_power_rejects_nonpositive_power():
    ch = EhChannel(beta=1.0, los=np.ones(2, complex), scatter=np.zeros(2, complex))
    with pytest.raises(InvalidParameterError):
        incident_power(ch, 0.0, "fcsi")


@pytest.mark.parametrize("kappa,rho", [(1.585, 0.0), (4.0, 0.5)])
def test_full_csi_mean_matches_analytic(kappa, rho):
    M = 4
    R = exponential_correlation(M, rho)
    p = ChannelParams(antennas=M, rician_kappa_linear=kappa, scattering_covariance=R)
    ch = sample_eh_channel(p, np.random.default_rng(3), size=100_000)
    mc = incident_power(ch, 1.0, CsiMode.FULL).mean()
    analytic = p.pb_gain * 1e3 * (M * kappa / (2 * (1 + kappa)) + np.trace(R) / (1 + kappa))
    assert mc == pytest.approx(analytic, rel=0.02)


def test_harvest_zero():
    assert harvest_rate(CURVE, 0.0) == 0.0


def test_harvest_at_c1():
    # W (1 - exp(-c0 c1)) / 2 computed separately with math.exp
    assert harvest_rate(CURVE, 5.365) == pytest.approx(3.809721893781784, rel=1e-12)
    assert harvest_rate(CURVE, 5.365) == pytest.approx(3.81, abs=0.005)


def test_harvest_saturates():
    assert harvest_rate(CURVE, 1e6) == pytest.approx(10.73, rel=1e-9)


def test_harvest_rejects_negative():
    with pytest.raises(InvalidParameterError):
        harvest_rate(CURVE, -1e-3)


def test_harvest_curve_shape_on_grid():
    p = np.linspace(0.0, 100.0, 10_000)
    g = harvest_rate(CURVE, p)
    assert np.all(np.diff(g) >= 0)
    assert np.all(g < CURVE.saturation_mw)
    assert np.all(g >= 0)


@given(st.floats(0, 1e4), st.floats(0, 1e4))
def test_harvest_monotone(a, b):
    lo, hi = sorted((a, b))
    assert harvest_rate(CURVE, lo) <= harvest_rate(CURVE, hi)


def test_charge_clips_at_capacity():
    b = battery(6)
    assert charge(b, 50.0, 1e-3).energy == b.full


def test_charge_zero_rate():
    b = battery(2.4)
    assert charge(b, 0.0, 1e-3) == b


def test_charge_arithmetic():
    b = Battery(0.0, XI, 4)
    out = charge(b, 2.5 * XI / 1e-3, 1e-3)
    assert out.energy == pytest.approx(2.5 * XI)


def test_spend_zero_is_free():
    b = battery(3.3)
    assert spend(b, 0) == b


def test_spend_fixed():
    out = spend(battery(5), 3)
    assert out.energy == pytest.approx(2 * XI)


def test_spend_channel_scaled_unit_factor_matches_fixed():
    g = DataGain(g=1.0 + 0j, beta_bs=1.0)
    for alpha in (2.0, 2.7, 4.0):
        scaled = spend(battery(4), 2, CostModel.CHANNEL_SCALED, g, d_bs=1.0, alpha=alpha)
        assert scaled.energy == pytest.approx(spend(battery(4), 2).energy)


def test_spend_channel_scaled_uses_gain():
    g = DataGain(g=complex(np.sqrt(0.5), 0), beta_bs=1.0)
    out = spend(battery(4), 2, CostModel.CHANNEL_SCALED, g, d_bs=2.0, alpha=2.0)
    assert out.energy == pytest.approx(4 * XI - 2 * XI * 0.5 / 4)


def test_spend_overdraw_raises():
    with pytest.raises(InsufficientEnergyError):
        spend(battery(2.5), 3)


def test_levels():
    b = battery(2.9)
    assert level(b) == 2
    assert max_copies(b) == 2
    assert max_extra_replicas(b) == 1
    empty = battery(0)
    assert level(empty) == 0 and max_copies(empty) == 0
    assert max_extra_replicas(empty) is None
    assert level(battery(6)) == 6


def test_level_tolerates_rounding():
    b = Battery(3 * 0.07, 0.07, 6)  # 0.21 / 0.07 is 2.9999999999999996
    assert level(b) == 3
    assert spend(b, 3).energy == 0.0


def test_battery_rejects_out_of_range():
    with pytest.raises(InvalidParameterError):
        Battery(-0.1, XI, 3)
    with pytest.raises(InvalidParameterError):
        Battery(4 * XI, XI, 3)
    with pytest.raises(InvalidParameterError):
        Battery(0.0, 0.0, 3)


@given(st.lists(st.tuples(st.booleans(), st.floats(0, 3)), max_size=60))
def test_battery_bounds_under_interleaving(ops):
    b = Battery(0.0, XI, 5)
    for is_charge, x in ops:
        if is_charge:
            b = charge(b, x * XI / 1e-3, 1e-3)
        else:
            n = int(x)
            if n <= level(b):
                b = spend(b, n)
        assert 0 <= b.energy <= b.full


def test_csi_mode_parse():
    assert CsiMode.parse("F-CSI") is CsiMode.FULL
    assert CsiMode.parse("acsi") is CsiMode.AVERAGE
    with pytest.raises(InvalidParameterError):
        CsiMode.parse("partial")
