"""Link capacities and service rates for every retrieval mode."""

import math
from dataclasses import dataclass

from scipy.constants import Boltzmann, speed_of_light


def free_space_path_loss(distance, carrier):
    """Friis free-space loss (linear, unit antenna gains)."""
    return (4.0 * math.pi * distance * carrier / speed_of_light) ** 2


def shannon_capacity(bandwidth, tx_power, distance, carrier, noise_temp=290.0, snr=None):
    """AWGN capacity in bits/s over a free-space link.

    ``snr`` overrides the physical link budget when given.
    """
    if snr is None:
        for name, v in (("bandwidth", bandwidth), ("tx_power", tx_power),
                        ("distance", distance), ("carrier", carrier),
                        ("noise_temp", noise_temp)):
            if not v > 0:
                raise ValueError(f"{name} must be positive")
        p_rx = tx_power / free_space_path_loss(distance, carrier)
        snr = p_rx / (Boltzmann * noise_temp * bandwidth)
    return bandwidth * math.log2(1.0 + snr)


@dataclass(frozen=True)
class LinkBudget:
    """Physical parameters of the four links plus optional capacity overrides (bps)."""

    w_ter: float = 2e6
    w_sat: float = 36e6
    f_ter: float = 700e6
    f_sat: float = 20e9
    d_sat: float = 300e3
    d_bs: float = 150.0
    d_d2d: float = 30.0
    p_sat_ch: float = 48.0
    p_bs_ch: float = 6.0
    p_dev_tx: float = 0.08
    noise_temp: float = 290.0
    c_sat_u: float = 1e6
    c_bs_u: float = 10e6
    cap_pu_ter: float | None = None
    cap_hu_sat: float | None = None
    cap_hu_bs: float | None = None
    cap_hu_d2d: float | None = None

    @property
    def pu_ter(self):
        # PUs are served by the BS over the same terrestrial link
        if self.cap_pu_ter is not None:
            return self.cap_pu_ter
        return shannon_capacity(self.w_ter, self.p_bs_ch, self.d_bs, self.f_ter, self.noise_temp)

    @property
    def hu_sat(self):
        if self.cap_hu_sat is not None:
            return self.cap_hu_sat
        return shannon_capacity(self.w_sat, self.p_sat_ch, self.d_sat, self.f_sat, self.noise_temp)

    @property
    def hu_bs(self):
        if self.cap_hu_bs is not None:
            return self.cap_hu_bs
        return shannon_capacity(self.w_ter, self.p_bs_ch, self.d_bs, self.f_ter, self.noise_temp)

    @property
    def hu_d2d(self):
        if self.cap_hu_d2d is not None:
            return self.cap_hu_d2d
        return shannon_capacity(self.w_ter, self.p_dev_tx, self.d_d2d, self.f_ter, self.noise_temp)


@dataclass(frozen=True)
class ServiceRates:
    """Per-second completion rates; ``delta_*`` are mean two-leg durations (s).

    Capacities are kept alongside in bits/s.
    """

    mu_pu_ter: float
    mu_hu_sat: float
    mu_hu_bs: float
    mu_hu_d2d: float
    mu_hu_sat_u: float
    mu_hu_bs_u: float
    delta_sat_u: float
    delta_bs_u: float
    c_pu_ter: float
    c_hu_sat: float
    c_hu_bs: float
    c_hu_d2d: float
    c_sat_u: float
    c_bs_u: float
    mean_size_bits: float


def service_rates(budget, dist):
    """Service rates for a mean content size ``dist.mean_size`` in megabits."""
    s = dist.mean_size * 1e6
    c_pu, c_sat, c_bs, c_d = budget.pu_ter, budget.hu_sat, budget.hu_bs, budget.hu_d2d
    for name, c in (("PU-ter", c_pu), ("HU-sat", c_sat), ("HU-BS", c_bs), ("HU-D2D", c_d),
                    ("sat-universal", budget.c_sat_u), ("BS-universal", budget.c_bs_u)):
        if not c > 0:
            raise ValueError(f"{name} capacity must be positive")
    delta_sat = s / budget.c_sat_u + s / c_sat
    delta_bs = s / budget.c_bs_u + s / c_bs
    return ServiceRates(
        mu_pu_ter=c_pu / s,
        mu_hu_sat=c_sat / s,
        mu_hu_bs=c_bs / s,
        mu_hu_d2d=c_d / s,
        mu_hu_sat_u=1.0 / delta_sat,
        mu_hu_bs_u=1.0 / delta_bs,
        delta_sat_u=delta_sat,
        delta_bs_u=delta_bs,
        c_pu_ter=c_pu,
        c_hu_sat=c_sat,
        c_hu_bs=c_bs,
        c_hu_d2d=c_d,
        c_sat_u=budget.c_sat_u,
        c_bs_u=budget.c_bs_u,
        mean_size_bits=s,
    )
