"""System configuration: network parameters, toggles and run settings.

Defaults reproduce the analysis parameter table of the reference scenario.
Sizes and cache budgets are in megabits, capacities in bits/s, distances in
metres, powers in watts, rates per second.
"""

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, fields

from .content import ContentCatalog, SizeDistribution
from .exceptions import ConfigParseError, ValidationError
from .links import LinkBudget

CAPACITY_OVERRIDES = ("cap_pu_ter", "cap_hu_sat", "cap_hu_bs", "cap_hu_d2d")


@dataclass(frozen=True)
class SystemParams:
    # content model
    n_contents: int = 20
    n_local_slots: int = 2
    mean_size_mbit: float = 25.0
    zipf_s: float = 1.2
    # spectrum
    n_freq_sat: int = 2
    n_freq_ter: int = 3
    lambda_pu: float = 0.03
    lambda_hu: float = 2.4
    # power
    p_sat_ch: float = 48.0
    p_bs_ch: float = 6.0
    p_dev_tx: float = 0.08
    # geometry and radio
    d_sat: float = 300e3
    d_bs: float = 150.0
    d_d2d: float = 30.0
    w_ter: float = 2e6
    w_sat: float = 36e6
    f_sat: float = 20e9
    f_ter: float = 700e6
    noise_temp: float = 290.0
    # caches
    cache_sat_mbit: float = 125.0
    cache_bs_mbit: float = 100.0
    cache_dev_mbit: float = 50.0
    theta_bs: float = 5.0
    theta_loc: float = 2.0
    c_sat_u: float = 1e6
    c_bs_u: float = 10e6
    # D2D overlay
    hu_density: float = 0.0018
    d_max: int = 5
    r_bs_cell: float = 300.0
    r_int: float = 60.0
    # mode weights
    r_sat: float = 1.0 / 3.0
    r_bs: float = 1.0 / 3.0
    r_dev: float = 1.0 / 3.0
    # not in the parameter table
    ttl_mean_sec: float = 600.0
    cap_pu_ter: float | None = None
    cap_hu_sat: float | None = None
    cap_hu_bs: float | None = None
    cap_hu_d2d: float | None = None
    universal_source: bool = True
    overlay: bool = True
    # numerics and simulation
    solver_tol: float = 1e-10
    seed: int = 0
    horizon: float = 1200.0
    replications: int = 10
    warmup_fraction: float = 0.1

    def __post_init__(self):
        self.validate()

    # ------------------------------------------------------------ validation
    def validate(self):
        positive_int = ("n_contents", "n_local_slots", "n_freq_sat", "n_freq_ter", "d_max",
                        "replications")
        for name in positive_int:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValidationError(name, "must be a positive integer")
        if self.n_local_slots != 2:
            raise ValidationError("n_local_slots", "the device cache chain holds exactly two contents")
        if self.n_freq_ter < 2:
            raise ValidationError("n_freq_ter", "needs f1 plus at least one BS-mode frequency")
        positive = ("mean_size_mbit", "p_sat_ch", "p_bs_ch", "p_dev_tx", "d_sat", "d_bs",
                    "d_d2d", "w_ter", "w_sat", "f_sat", "f_ter", "noise_temp",
                    "cache_sat_mbit", "cache_bs_mbit", "cache_dev_mbit", "theta_bs",
                    "theta_loc", "c_sat_u", "c_bs_u", "hu_density", "r_bs_cell", "r_int",
                    "ttl_mean_sec", "solver_tol", "horizon")
        for name in positive:
            v = getattr(self, name)
            if not _is_number(v) or not v > 0 or not math.isfinite(v):
                raise ValidationError(name, "must be a positive finite number")
        for name in ("zipf_s", "lambda_pu", "lambda_hu"):
            v = getattr(self, name)
            if not _is_number(v) or v < 0 or not math.isfinite(v):
                raise ValidationError(name, "must be a nonnegative finite number")
        for name in CAPACITY_OVERRIDES:
            v = getattr(self, name)
            if v is not None and (not _is_number(v) or not v > 0):
                raise ValidationError(name, "capacity override must be positive or null")
        for name in ("r_sat", "r_bs", "r_dev"):
            v = getattr(self, name)
            if not _is_number(v) or not 0.0 <= v <= 1.0:
                raise ValidationError(name, "mode weight must lie in [0, 1]")
        if abs(self.r_sat + self.r_bs + self.r_dev - 1.0) > 1e-9:
            raise ValidationError("r_sat+r_bs+r_dev", "mode weights must sum to 1")
        for name in ("universal_source", "overlay"):
            if not isinstance(getattr(self, name), bool):
                raise ValidationError(name, "must be a boolean")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise ValidationError("warmup_fraction", "must lie in [0, 1)")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ValidationError("seed", "must be a nonnegative integer")
        if self.d_max > self.d_max_bound:
            raise ValidationError(
                "d_max", f"exceeds the concurrent-D2D bound {self.d_max_bound}"
            )
        if self.sat_slots >= self.n_contents or self.bs_slots >= self.n_contents:
            raise ValidationError("n_contents", "catalog must exceed the satellite/BS cache slots")
        if self.sat_slots < 1 or self.bs_slots < 1:
            raise ValidationError("cache_sat_mbit", "satellite and BS caches must hold a content")

    # ---------------------------------------------------------- derived values
    @property
    def d_max_bound(self):
        devices = self.hu_density * math.pi * self.r_bs_cell**2
        return math.floor((devices - self.n_freq_sat - (self.n_freq_ter - 1)) / 2)

    @property
    def effective_d_max(self):
        """Concurrent D2D cap in force; disabling overlay leaves a single link."""
        return self.d_max if self.overlay else 1

    @property
    def sat_slots(self):
        return math.floor(self.cache_sat_mbit / self.mean_size_mbit + 1e-12)

    @property
    def bs_slots(self):
        return math.floor(self.cache_bs_mbit / self.mean_size_mbit + 1e-12)

    @property
    def ttl_rate(self):
        return 1.0 / self.ttl_mean_sec

    @property
    def weights(self):
        return (self.r_sat, self.r_bs, self.r_dev)

    @property
    def neighbours_in_range(self):
        """Mean number of devices within the interference radius, floored."""
        return math.floor(self.hu_density * math.pi * self.r_int**2)

    def catalog(self):
        return ContentCatalog(self.n_contents, self.zipf_s, self.lambda_hu)

    def size_distribution(self):
        return SizeDistribution(self.mean_size_mbit)

    def link_budget(self):
        return LinkBudget(
            w_ter=self.w_ter, w_sat=self.w_sat, f_ter=self.f_ter, f_sat=self.f_sat,
            d_sat=self.d_sat, d_bs=self.d_bs, d_d2d=self.d_d2d, p_sat_ch=self.p_sat_ch,
            p_bs_ch=self.p_bs_ch, p_dev_tx=self.p_dev_tx, noise_temp=self.noise_temp,
            c_sat_u=self.c_sat_u, c_bs_u=self.c_bs_u, cap_pu_ter=self.cap_pu_ter,
            cap_hu_sat=self.cap_hu_sat, cap_hu_bs=self.cap_hu_bs, cap_hu_d2d=self.cap_hu_d2d,
        )

    # ------------------------------------------------------------ conversions
    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


FIELD_NAMES = tuple(f.name for f in fields(SystemParams))

_INT_FIELDS = {f.name for f in fields(SystemParams) if f.type in (int, "int")}


def coerce_value(key, value):
    """Convert a parsed JSON/CLI value to the field's type where lossless."""
    if key not in FIELD_NAMES:
        raise ValidationError(key, "unknown configuration key")
    if key in _INT_FIELDS and isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def params_from_dict(data):
    if not isinstance(data, dict):
        raise ConfigParseError("configuration root must be a JSON object")
    data = dict(data)
    weights = data.pop("mode_weights", None)
    if weights is not None:
        if not isinstance(weights, (list, tuple)) or len(weights) != 3:
            raise ValidationError("mode_weights", "expected [r_sat, r_bs, r_dev]")
        data.update(r_sat=weights[0], r_bs=weights[1], r_dev=weights[2])
    kwargs = {k: coerce_value(k, v) for k, v in data.items()}
    try:
        return SystemParams(**kwargs)
    except TypeError as exc:
        raise ValidationError("config", str(exc)) from exc


def load_config(path=None):
    """Read a UTF-8 JSON config; missing keys take the table defaults."""
    if path is None:
        return SystemParams()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from exc
    if not text.strip():
        return SystemParams()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    return params_from_dict(data)
