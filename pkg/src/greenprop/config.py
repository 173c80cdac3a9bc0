"""Experiment configuration: a flat, sectioned key-value text file.

Unknown sections or keys are hard errors, so silently ignored physics
parameters cannot slip through.  Example:

    [params]
    mu = 1.0
    lambda = 0.0
    alpha = 1.05
    gamma = 1.4

    [grid]
    n = 64
    box_length = 100.530964914873384

    [time]
    scheme = etdrk2
    dt = 0.05
    t_end = 80.0
    cadence = 10

    [init]
    kind = gaussian_bump
    amplitude = 1e-2

    [monitors]
    eta = 0.1

    [output]
    directory = out
"""

import configparser
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .initial_data import gaussian_bump, hf_packet, random_band
from .params import ViscosityParams
from .spectral import VACUUM_FLOOR, build_lattice
from .stepping import SchemeConfig

_SCHEMA = {
    "params": {
        "required": {"mu", "lambda", "alpha", "gamma"},
        "optional": set(),
    },
    "grid": {
        "required": {"n", "box_length"},
        "optional": set(),
    },
    "time": {
        "required": {"dt", "t_end"},
        "optional": {"scheme", "cadence", "linear_only"},
    },
    "init": {
        "required": {"kind", "amplitude"},
        "optional": {"width", "u_scale", "center", "wavenumber", "seed", "band_lo", "band_hi"},
    },
    "monitors": {
        "required": set(),
        "optional": {"eta", "vacuum_floor", "terminate"},
    },
    "output": {
        "required": {"directory"},
        "optional": {"formats"},
    },
}

INIT_KINDS = ("gaussian_bump", "hf_packet", "random_band")


@dataclass
class ExperimentConfig:
    """Validated experiment description; builds the working objects."""

    params: ViscosityParams
    n: int
    box_length: float
    scheme: str
    dt: float
    t_end: float
    cadence: int
    linear_only: bool
    init: dict
    eta: float
    vacuum_floor: float
    monitors_terminate: bool
    output_directory: str
    formats: str = "csv"
    raw: dict = field(default_factory=dict, repr=False)

    def build_lattice(self):
        return build_lattice(self.n, self.box_length)

    def scheme_config(self):
        return SchemeConfig(
            scheme=self.scheme,
            dt=self.dt,
            t_end=self.t_end,
            cadence=self.cadence,
            linear_only=self.linear_only,
            eta=self.eta,
            vacuum_floor=self.vacuum_floor,
            monitors_terminate=self.monitors_terminate,
        )

    def build_initial(self, lattice):
        init = self.init
        kind = init["kind"]
        if kind == "gaussian_bump":
            return gaussian_bump(
                lattice,
                amplitude=init["amplitude"],
                width=init.get("width"),
                center=init.get("center"),
                u_scale=init.get("u_scale", 1.0),
            )
        if kind == "hf_packet":
            return hf_packet(lattice, init["wavenumber"], amplitude=init.get("amplitude"))
        return random_band(
            lattice,
            seed=init["seed"],
            band=(init["band_lo"], init["band_hi"]),
            target_l2=init["amplitude"],
        )

    @property
    def seed(self):
        return self.init.get("seed")


def _parse_value(section, key, text):
    if (section, key) in (("grid", "n"), ("time", "cadence"), ("init", "seed")):
        return int(text)
    if (section, key) == ("init", "kind"):
        return text.strip()
    if (section, key) == ("time", "scheme"):
        return text.strip()
    if (section, key) in (("time", "linear_only"), ("monitors", "terminate")):
        return text.strip().lower() in ("1", "true", "yes", "on")
    if (section, key) == ("output", "directory") or (section, key) == ("output", "formats"):
        return text.strip()
    if (section, key) == ("init", "center"):
        parts = [float(v) for v in text.replace(",", " ").split()]
        if len(parts) != 3:
            raise ConfigurationError(f"init.center needs 3 numbers, got {text!r}")
        return parts
    return float(text)


def load_config(path):
    """Parse and validate an experiment config file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"cannot read config file {path!r}")
    raw = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigurationError(f"unknown config section [{section}]")
        allowed = _SCHEMA[section]["required"] | _SCHEMA[section]["optional"]
        raw[section] = {}
        for key, value in parser.items(section):
            if key not in allowed:
                raise ConfigurationError(f"unknown key {key!r} in section [{section}]")
            raw[section][key] = _parse_value(section, key, value)
    for section, spec in _SCHEMA.items():
        if spec["required"]:
            if section not in raw:
                raise ConfigurationError(f"missing config section [{section}]")
            missing = spec["required"] - set(raw[section])
            if missing:
                raise ConfigurationError(
                    f"section [{section}] missing keys: {sorted(missing)}"
                )

    init = dict(raw["init"])
    if init["kind"] not in INIT_KINDS:
        raise ConfigurationError(f"init.kind must be one of {INIT_KINDS}, got {init['kind']!r}")
    if init["amplitude"] <= 0:
        raise ConfigurationError("init.amplitude must be positive")
    if init["kind"] == "random_band":
        for needed in ("seed", "band_lo", "band_hi"):
            if needed not in init:
                raise ConfigurationError(f"random_band requires init.{needed}")
    if init["kind"] == "hf_packet" and "wavenumber" not in init:
        raise ConfigurationError("hf_packet requires init.wavenumber")

    params = ViscosityParams(
        mu=raw["params"]["mu"],
        lambda_bulk=raw["params"]["lambda"],
        alpha=raw["params"]["alpha"],
        gamma=raw["params"]["gamma"],
    )
    monitors = raw.get("monitors", {})
    time_sec = raw["time"]
    return ExperimentConfig(
        params=params,
        n=raw["grid"]["n"],
        box_length=raw["grid"]["box_length"],
        scheme=time_sec.get("scheme", "etdrk2"),
        dt=time_sec["dt"],
        t_end=time_sec["t_end"],
        cadence=time_sec.get("cadence", 1),
        linear_only=time_sec.get("linear_only", False),
        init=init,
        eta=monitors.get("eta", 0.1),
        vacuum_floor=monitors.get("vacuum_floor", VACUUM_FLOOR),
        monitors_terminate=monitors.get("terminate", True),
        output_directory=raw["output"]["directory"],
        formats=raw["output"].get("formats", "csv"),
        raw=raw,
    )
