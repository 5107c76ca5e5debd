"""Large-scale and small-scale channel models.

Two links are modelled per user:

* the power beacon (PB) to user link, an ``M``-antenna Rician channel whose
  fading vector is split into a deterministic line-of-sight part and a
  zero-mean scattering part, and
* the user to base station (BS) link, a scalar Rayleigh channel.

The fading vectors are stored *without* pathloss. The average power gain
``beta`` travels alongside them and is applied exactly once by the consumer
(see :func:`wpirsa.harvest.incident_power`).
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "SPEED_OF_LIGHT",
    "ChannelParams",
    "EhChannel",
    "DataGain",
    "pathloss_gain",
    "los_steering",
    "exponential_correlation",
    "sample_eh_channel",
    "sample_data_gain",
]

SPEED_OF_LIGHT = 3e8

_PSD_TOL = 1e-10


def pathloss_gain(d, f, alpha, c=SPEED_OF_LIGHT):
    """Free-space style average power gain ``c**2 / (16 pi**2 f**2 d**alpha)``.

    Parameters
    ----------
    d : float
        Link distance in meters.
    f : float
        Carrier frequency in hertz.
    alpha : float
        Pathloss exponent.
    c : float, optional
        Propagation speed in m/s.

    Returns
    -------
    float
        Linear, dimensionless gain.
    """
    if not d > 0:
        raise InvalidParameterError(f"distance must be positive, got {d!r}")
    if not f > 0:
        raise InvalidParameterError(f"frequency must be positive, got {f!r}")
    if not alpha > 0:
        raise InvalidParameterError(f"pathloss exponent must be positive, got {alpha!r}")
    return c**2 / (16 * np.pi**2 * f**2 * d**alpha)


def los_steering(theta, kappa, M):
    """Deterministic LOS vector of a half-wavelength ULA.

    Element ``m`` is ``sqrt(kappa / (2 (1 + kappa))) * exp(-1j m pi sin(theta))``.
    """
    M = int(M)
    if M < 1:
        raise InvalidParameterError(f"antenna count must be >= 1, got {M}")
    if not kappa > 0:
        raise InvalidParameterError(f"kappa must be positive, got {kappa!r}")
    amp = np.sqrt(kappa / (2.0 * (1.0 + kappa)))
    m = np.arange(M)
    return amp * np.exp(-1j * m * np.pi * np.sin(theta))


def exponential_correlation(M, rho):
    """Real exponential correlation matrix ``R[i, j] = rho**|i - j|``."""
    if not 0 <= rho < 1:
        raise InvalidParameterError(f"correlation must lie in [0, 1), got {rho!r}")
    idx = np.arange(M)
    return rho ** np.abs(idx[:, None] - idx[None, :]).astype(float)


def _psd_sqrt(R):
    """Return ``A`` with ``A @ A.conj().T == R``; rejects non-PSD input."""
    R = np.asarray(R, dtype=complex)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise InvalidParameterError(f"covariance must be square, got shape {R.shape}")
    scale = max(1.0, float(np.max(np.abs(R))))
    if not np.allclose(R, R.conj().T, atol=_PSD_TOL * scale, rtol=0):
        raise InvalidParameterError("covariance must be Hermitian")
    w, V = np.linalg.eigh(R)
    if w.min() < -_PSD_TOL * scale:
        raise InvalidParameterError(
            f"covariance must be positive semidefinite (min eigenvalue {w.min():.3g})"
        )
    return V * np.sqrt(np.clip(w, 0.0, None))


@dataclass(frozen=True)
class ChannelParams:
    """Geometry and propagation constants of one user's two links.

    ``rician_kappa_linear`` is linear; convert dB values before building.
    ``scattering_covariance`` defaults to the identity.
    """

    carrier_frequency_hz: float = 2.5e9
    pathloss_exponent: float = 2.7
    rician_kappa_linear: float = 10 ** 0.2
    antennas: int = 4
    pb_user_distance_m: float = 3.0
    bs_user_distance_m: float = 70.0
    azimuth_rad: float = 0.0
    scattering_covariance: np.ndarray = field(default=None, compare=False, repr=False)
    speed_of_light_m_s: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.carrier_frequency_hz > 0:
            raise InvalidParameterError("carrier_frequency_hz must be positive")
        if not self.speed_of_light_m_s > 0:
            raise InvalidParameterError("speed_of_light_m_s must be positive")
        if not self.pathloss_exponent > 0:
            raise InvalidParameterError("pathloss_exponent must be positive")
        if not self.rician_kappa_linear > 0:
            raise InvalidParameterError("rician_kappa_linear must be positive")
        if int(self.antennas) != self.antennas or self.antennas < 1:
            raise InvalidParameterError("antennas must be an integer >= 1")
        if not (self.pb_user_distance_m > 0 and self.bs_user_distance_m > 0):
            raise InvalidParameterError("distances must be positive")
        if not 0 <= self.azimuth_rad <= 2 * np.pi:
            raise InvalidParameterError("azimuth_rad must lie in [0, 2 pi]")
        if self.scattering_covariance is None:
            R = np.eye(self.antennas, dtype=complex)
        else:
            R = np.array(self.scattering_covariance, dtype=complex)
            if R.shape != (self.antennas, self.antennas):
                raise InvalidParameterError(
                    f"scattering_covariance must be {self.antennas}x{self.antennas}"
                )
        _psd_sqrt(R)
        R.setflags(write=False)
        object.__setattr__(self, "scattering_covariance", R)

    @cached_property
    def _scatter_factor(self):
        return _psd_sqrt(self.scattering_covariance) / np.sqrt(1.0 + self.rician_kappa_linear)

    @cached_property
    def pb_gain(self):
        return pathloss_gain(self.pb_user_distance_m, self.carrier_frequency_hz,
                             self.pathloss_exponent, self.speed_of_light_m_s)

    @cached_property
    def bs_gain(self):
        return pathloss_gain(self.bs_user_distance_m, self.carrier_frequency_hz,
                             self.pathloss_exponent, self.speed_of_light_m_s)

    @cached_property
    def los(self):
        v = los_steering(self.azimuth_rad, self.rician_kappa_linear, self.antennas)
        v.setflags(write=False)
        return v


@dataclass(frozen=True)
class EhChannel:
    """One realization of the PB to user channel.

    ``scatter`` may carry a leading batch axis; ``los`` is shared.
    """

    beta: float
    los: np.ndarray
    scatter: np.ndarray


@dataclass(frozen=True)
class DataGain:
    g: complex
    beta_bs: float

    @property
    def power(self):
        """Small-scale power ``|g|**2``."""
        return abs(self.g) ** 2


def _complex_normal(rng, shape):
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def sample_eh_channel(params, rng, size=None):
    """Draw a PB to user channel realization.

    Parameters
    ----------
    params : ChannelParams
    rng : numpy.random.Generator
    size : int, optional
        When given, draw ``size`` independent scattering vectors at once;
        ``scatter`` then has shape ``(size, M)``.

    Returns
    -------
    EhChannel
    """
    shape = (params.antennas,) if size is None else (int(size), params.antennas)
    w = _complex_normal(rng, shape)
    scatter = w @ params._scatter_factor.T
    return EhChannel(beta=params.pb_gain, los=params.los, scatter=scatter)


def sample_data_gain(params, rng):
    """Draw the user to BS gain: unit-variance circular Gaussian ``g``."""
    g = complex(_complex_normal(rng, ()))
    return DataGain(g=g, beta_bs=params.bs_gain)
