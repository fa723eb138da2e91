"""Dataset registry: the 52 configurations and their canonical names.

A name has up to six underscore-separated parts::

    G_2q_IX-XI-XX_IZ-ZI_N1-N6_D
    | |  |        |     |     `- distortion flag (optional)
    | |  |        |     `------- noise profile per noise axis (noisy sets only)
    | |  |        `------------- noise axes (noisy sets only)
    | |  `---------------------- control axes
    | `------------------------- qubit count
    `--------------------------- waveform, Gaussian or square

Single-qubit tags concatenate axes ("XY", "XZ", "N1N5"); two-qubit tags
separate them with hyphens.  Noise profiles map positionally onto noise axes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .distortion import AnalogFilterSpec
from .hamiltonian import CATEGORIES, EnergyGaps, SystemCategory
from .noisegen import NoiseSettings, validate_profiles
from .pulsegen import PulseConfig

WAVEFORMS = {"G": "gaussian", "S": "square"}


class NameParseError(ValueError):
    """Malformed dataset name; ``part`` is the zero-based offending part."""

    def __init__(self, name: str, part: int | None, reason: str):
        self.name = name
        self.part = part
        self.reason = reason
        where = f"part {part + 1}" if part is not None else "name"
        super().__init__(f"bad dataset name {name!r}: {where}: {reason}")


def _join(items, nqubits: int) -> str:
    return ("-" if nqubits == 2 else "").join(items)


def _split(tag: str, nqubits: int, width: int) -> list[str]:
    if nqubits == 2:
        return tag.split("-")
    return [tag[i:i + width] for i in range(0, len(tag), width)]


@dataclass(frozen=True)
class DatasetName:
    waveform: str
    nqubits: int
    control: tuple[str, ...]
    noise_axes: tuple[str, ...] = ()
    noise_profiles: tuple[str, ...] = ()
    distorted: bool = False

    @property
    def noisy(self) -> bool:
        return bool(self.noise_axes)

    @property
    def control_tag(self) -> str:
        return _join(self.control, self.nqubits)

    @property
    def noise_axes_tag(self) -> str | None:
        return _join(self.noise_axes, self.nqubits) if self.noisy else None

    @property
    def noise_profiles_tag(self) -> str | None:
        return _join(self.noise_profiles, self.nqubits) if self.noisy else None

    def __str__(self) -> str:
        return format_name(self)


def format_name(n: DatasetName) -> str:
    parts = [n.waveform, f"{n.nqubits}q", n.control_tag]
    if n.noisy:
        parts += [n.noise_axes_tag, n.noise_profiles_tag]
    if n.distorted:
        parts.append("D")
    return "_".join(parts)


_PROFILE = re.compile(r"N[0-6]")


def parse_name(s: str) -> DatasetName:
    parts = s.split("_")
    if not 3 <= len(parts) <= 6:
        raise NameParseError(s, None, f"expected 3 to 6 underscore-separated parts, got {len(parts)}")
    if parts[0] not in WAVEFORMS:
        raise NameParseError(s, 0, f"waveform must be G or S, got {parts[0]!r}")
    if parts[1] not in ("1q", "2q"):
        raise NameParseError(s, 1, f"qubit count must be 1q or 2q, got {parts[1]!r}")
    nq = int(parts[1][0])

    def axes(i: int) -> tuple[str, ...]:
        tag = parts[i]
        items = _split(tag, nq, 1)
        ok = tag and all(len(a) == nq and set(a) <= set("IXYZ") and set(a) != {"I"} for a in items)
        if not ok or len(set(items)) != len(items):
            raise NameParseError(s, i, f"invalid axis list {tag!r} for {nq} qubit(s)")
        return tuple(items)

    control = axes(2)
    rest = parts[3:]
    distorted = False
    if rest and rest[-1] == "D":
        distorted = True
        rest = rest[:-1]
    if len(rest) == 1:
        raise NameParseError(s, 3, "noise axes must be followed by noise profiles (or use D for distortion)")
    noise_axes: tuple[str, ...] = ()
    profiles: tuple[str, ...] = ()
    if len(rest) == 2:
        noise_axes = axes(3)
        tag = parts[4]
        profiles = tuple(_split(tag, nq, 2))
        if not all(_PROFILE.fullmatch(p) for p in profiles) or _join(profiles, nq) != tag:
            raise NameParseError(s, 4, f"invalid noise profile list {tag!r}")
        if len(profiles) != len(noise_axes):
            raise NameParseError(s, 4, f"{len(profiles)} profiles for {len(noise_axes)} noise axes")
    elif len(rest) > 2:
        raise NameParseError(s, 3 + len(rest) - 1, f"unexpected part {rest[-1]!r}")
    return DatasetName(parts[0], nq, control, noise_axes, profiles, distorted)


def category_for(name: DatasetName) -> SystemCategory:
    for cat in CATEGORIES.values():
        if cat.nqubits == name.nqubits and cat.control_axes == name.control:
            if name.noisy and name.noise_axes != cat.noise_axes:
                raise NameParseError(format_name(name), 3,
                                     f"category {cat.id} takes noise axes {_join(cat.noise_axes, cat.nqubits)}")
            return cat
    raise NameParseError(format_name(name), 2, f"no system category with control {name.control_tag}")


@dataclass(frozen=True)
class DatasetConfig:
    name: DatasetName
    category: SystemCategory
    profiles: tuple[str, ...]
    gaps: EnergyGaps = EnergyGaps()
    pulse: PulseConfig = PulseConfig()
    filter_spec: AnalogFilterSpec | None = None
    noise: NoiseSettings = NoiseSettings()
    K: int = 2000
    num_examples: int = 10
    master_seed: int = 0
    half_xx: bool = False
    keep_h1: bool = False
    keep_ui: bool = False
    custom: bool = field(default=False, compare=False)

    def __post_init__(self):
        if len(self.profiles) != len(self.category.noise_axes):
            raise ValueError("one noise profile per noise axis is required")
        validate_profiles(self.profiles)
        if self.K < 1 or self.num_examples < 1:
            raise ValueError("K and num_examples must be at least 1")
        if self.name.distorted and self.filter_spec is None:
            raise ValueError("distorted datasets need a filter spec")

    @property
    def canonical_name(self) -> str:
        return format_name(self.name)

    @property
    def noiseless(self) -> bool:
        return all(p == "N0" for p in self.profiles)

    @property
    def pulse_shape(self) -> str:
        return WAVEFORMS[self.name.waveform]

    def with_overrides(self, **kw) -> "DatasetConfig":
        pulse_kw = {k: kw.pop(k) for k in list(kw) if k in ("num_steps", "num_pulses", "total_time", "gaussian_sigma")}
        cfg = replace(self, **kw)
        if pulse_kw:
            cfg = replace(cfg, pulse=replace(cfg.pulse, **pulse_kw))
        return cfg

    def to_dict(self) -> dict:
        return {
            "name": self.canonical_name,
            "category": self.category.id,
            "nqubits": self.category.nqubits,
            "control_axes": list(self.category.control_axes),
            "noise_axes": list(self.category.noise_axes),
            "noise_profiles": list(self.profiles),
            "pulse_shape": self.pulse_shape,
            "gaps": self.gaps.to_dict(),
            "pulse": self.pulse.to_dict(),
            "distortion": self.filter_spec.to_dict() if self.filter_spec else None,
            "noise_settings": self.noise.to_dict(),
            "K": self.K,
            "num_examples": self.num_examples,
            "master_seed": self.master_seed,
            "half_xx": self.half_xx,
            "keep_h1": self.keep_h1,
            "keep_ui": self.keep_ui,
            "custom": self.custom,
        }


def config_from_dict(d: dict) -> DatasetConfig:
    """Inverse of :meth:`DatasetConfig.to_dict`; also accepts a full metadata block."""
    if "config" in d and isinstance(d["config"], dict):
        d = d["config"]
    cfg = config_for(d["name"])
    g, p = d.get("gaps", {}), d.get("pulse", {})
    dist = d.get("distortion")
    ns = d.get("noise_settings", {})
    return replace(
        cfg,
        gaps=EnergyGaps(g.get("Omega", 12.0), g.get("Omega1", 12.0), g.get("Omega2", 10.0)),
        pulse=PulseConfig(p.get("total_time", 1.0), p.get("num_steps", 1024), p.get("num_pulses", 5),
                          p.get("amp_min", -100.0), p.get("amp_max", 100.0), p.get("gaussian_sigma")),
        filter_spec=(AnalogFilterSpec(dist["order"], dist["passband_ripple_db"], dist["cutoff_rad_per_s"])
                     if dist else cfg.filter_spec),
        noise=NoiseSettings(ns.get("n2_kernel_width_fraction_of_T", 1 / 32), ns.get("n5_bump_rad_per_s", 40.0)),
        K=d.get("K", cfg.K),
        num_examples=d.get("num_examples", cfg.num_examples),
        master_seed=d.get("master_seed", cfg.master_seed),
        half_xx=d.get("half_xx", False),
        keep_h1=d.get("keep_h1", False),
        keep_ui=d.get("keep_ui", False),
        custom=d.get("custom", False),
    )


# (category, noise profiles per noise axis or None for noiseless); registry order
_BASES = [
    (1, None),
    (2, None),
    (2, ("N1", "N5")),
    (2, ("N1", "N6")),
    (2, ("N3", "N6")),
    (1, ("N1",)),
    (1, ("N2",)),
    (1, ("N3",)),
    (1, ("N4",)),
    (3, ("N1", "N6")),
    (4, None),
    (4, ("N1", "N5")),
    (4, ("N1", "N6")),
]


def _build(waveform: str, cat_id: int, profiles, distorted: bool) -> DatasetConfig:
    cat = CATEGORIES[cat_id]
    name = DatasetName(waveform, cat.nqubits, cat.control_axes,
                       cat.noise_axes if profiles else (), tuple(profiles or ()), distorted)
    return DatasetConfig(name=name, category=cat,
                         profiles=tuple(profiles) if profiles else ("N0",) * len(cat.noise_axes),
                         filter_spec=AnalogFilterSpec() if distorted else None)


def enumerate_configs() -> list[DatasetConfig]:
    """All 52 configurations: 13 system/noise bases x 2 waveforms x with/without distortion."""
    return [_build(w, c, p, d) for w in "GS" for c, p in _BASES for d in (False, True)]


def config_for(name: str) -> DatasetConfig:
    """Registered configuration for a canonical name; unregistered but valid names are flagged custom."""
    parsed = parse_name(name)
    for cfg in enumerate_configs():
        if cfg.name == parsed:
            return cfg
    cat = category_for(parsed)
    profiles = parsed.noise_profiles or ("N0",) * len(cat.noise_axes)
    return DatasetConfig(name=parsed, category=cat, profiles=profiles,
                         filter_spec=AnalogFilterSpec() if parsed.distorted else None, custom=True)


def registered_names() -> list[str]:
    return [c.canonical_name for c in enumerate_configs()]
