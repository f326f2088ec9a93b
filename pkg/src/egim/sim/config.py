"""Simulation configuration, JSON loading and experiment presets."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from ..mapping import GroupSpec
from ..ofdm import PowerPolicy

UNCODED = ("egim4qam", "egim8psk", "classical-im")
CODED = ("autoencoder", "benchmark-codec")
SCHEMES = UNCODED + CODED
CHANNELS = ("awgn", "rayleigh")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    """One simulated curve.

    ``snr_db`` is the average SNR per subcarrier (active-symbol energy over
    N0) for uncoded schemes and Eb/N0 for coded ones.
    """

    scheme: str = "egim4qam"
    channel: str = "rayleigh"
    policy: str = "power-saving"
    snr_db: tuple[float, ...] = (0.0, 10.0, 20.0, 30.0)
    n_fft: int = 64
    cp_len: int = 16
    taps: int = 10
    traceback: int = 12
    decoding: str = "hard"
    min_errors: int = 500
    max_frames: int = 20_000
    block_frames: int = 64
    seed: int = 0
    im_n: int = 4
    im_k: int = 2
    im_order: int = 4
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        self.validate()

    def validate(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.channel not in CHANNELS:
            raise ConfigError(f"channel must be one of {CHANNELS}, got {self.channel!r}")
        try:
            PowerPolicy(self.policy)
        except ValueError:
            raise ConfigError(f"unknown power policy {self.policy!r}") from None
        if self.decoding not in ("hard", "soft"):
            raise ConfigError(f"decoding must be 'hard' or 'soft', got {self.decoding!r}")
        if not self.snr_db:
            raise ConfigError("snr_db must list at least one point")
        if self.n_fft < 8:
            raise ConfigError("n_fft must be at least 8")
        if not 0 <= self.cp_len <= self.n_fft:
            raise ConfigError("cp_len must lie in [0, n_fft]")
        if self.channel == "rayleigh" and not 1 <= self.taps <= self.cp_len:
            raise ConfigError(f"taps ({self.taps}) must lie in [1, cp_len={self.cp_len}]")
        if self.traceback < 1:
            raise ConfigError("traceback must be >= 1")
        if self.min_errors < 1 or self.max_frames < 1 or self.block_frames < 1:
            raise ConfigError("min_errors, max_frames and block_frames must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.scheme == "classical-im":
            try:
                GroupSpec(self.im_n, self.im_k, self.im_order)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            if self.n_fft % self.im_n:
                raise ConfigError(f"n_fft={self.n_fft} is not a multiple of im_n={self.im_n}")

    @property
    def coded(self) -> bool:
        return self.scheme in CODED

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        parts = [self.scheme, self.channel, self.policy]
        if self.coded:
            parts.append(self.decoding)
        return "-".join(parts)

    def with_overrides(self, **kw) -> SimConfig:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snr_db"] = list(self.snr_db)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> SimConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)


def load_configs(path) -> list[SimConfig]:
    """A config file holds one SimConfig object or a list of them."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    items = data if isinstance(data, list) else [data]
    if not all(isinstance(item, dict) for item in items):
        raise ConfigError(f"{path}: expected an object or a list of objects")
    return [SimConfig.from_dict(item) for item in items]


def _grid(lo, hi, step):
    n = int(round((hi - lo) / step)) + 1
    return tuple(lo + i * step for i in range(n))


PRESETS: dict[str, list[SimConfig]] = {
    # SER over 10-tap Rayleigh with MMSE, against the closed forms.
    "ser-egim4qam": [SimConfig(scheme="egim4qam", snr_db=_grid(0, 30, 5))],
    "ser-egim8psk": [SimConfig(scheme="egim8psk", snr_db=_grid(0, 30, 5))],
    # Classical OFDM-IM stands in for the dual-mode comparator.
    "ber-egim8psk-vs-classical": [
        SimConfig(scheme="egim8psk", snr_db=_grid(0, 30, 5)),
        SimConfig(scheme="classical-im", im_n=4, im_k=2, im_order=4, snr_db=_grid(0, 30, 5)),
    ],
    # Autoencoder vs (15, 17) benchmark over AWGN, power reinvested.
    "coded-awgn": [
        SimConfig(scheme=s, channel="awgn", policy="reinvest", decoding=d,
                  snr_db=_grid(0, 8, 1), max_frames=40_000)
        for s in CODED for d in ("hard", "soft")
    ],
    "coded-rayleigh": [
        SimConfig(scheme="autoencoder", policy="reinvest", decoding=d, snr_db=_grid(0, 30, 5))
        for d in ("hard", "soft")
    ],
}
