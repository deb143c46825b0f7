"""BAC / pulse-rate sample tables: CSV persistence and a seeded synthetic generator.

Both features are treated as already-normalised reals. ``pulse_rate`` is the
absolute z-score of the subject's pulse against a resting reference, which is
why it is non-negative and why the induced class tops out near z = 3.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rng import make_rng

HEADER = ("BAC", "PulseRate", "Target")
FEATURES = ("BAC", "PulseRate")


class DatasetError(ValueError):
    """Malformed dataset file or content."""


@dataclass(frozen=True)
class Sample:
    bac: float
    pulse_rate: float
    target: int

    def __post_init__(self):
        if self.target not in (0, 1):
            raise DatasetError(f"target must be 0 or 1, got {self.target!r}")
        if not (self.bac >= 0 and self.pulse_rate >= 0):
            raise DatasetError(f"features must be finite and >= 0: {self}")
        if not (math.isfinite(self.bac) and math.isfinite(self.pulse_rate)):
            raise DatasetError(f"features must be finite: {self}")


@dataclass(frozen=True)
class Dataset:
    samples: tuple[Sample, ...]
    name: str = "dataset"

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))

    def __len__(self):
        return len(self.samples)

    @property
    def X(self) -> np.ndarray:
        return np.array([[s.bac, s.pulse_rate] for s in self.samples], dtype=float).reshape(-1, 2)

    @property
    def y(self) -> np.ndarray:
        return np.array([s.target for s in self.samples], dtype=int)

    @classmethod
    def from_arrays(cls, X, y, name="dataset") -> "Dataset":
        X = np.asarray(X, dtype=float)
        return cls(tuple(Sample(float(a), float(b), int(t)) for (a, b), t in zip(X, y)), name)

    def class_counts(self) -> tuple[int, int]:
        n1 = sum(s.target for s in self.samples)
        return len(self.samples) - n1, n1

    def check_trainable(self):
        """Raise unless there are >= 2 samples covering both classes."""
        n0, n1 = self.class_counts()
        if n0 + n1 < 2 or n0 == 0 or n1 == 0:
            raise DatasetError(
                f"dataset {self.name!r} needs both classes to fit (class counts {n0}/{n1})"
            )


def format_number(v: float) -> str:
    """Shortest round-trip text for a float; integral values drop the '.0'."""
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def save_csv(ds: Dataset, path) -> None:
    if len(ds) == 0:
        warnings.warn(f"writing empty dataset {ds.name!r} (header only)", stacklevel=2)
    lines = [",".join(HEADER)]
    for s in ds.samples:
        lines.append(f"{format_number(s.bac)},{format_number(s.pulse_rate)},{s.target}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_csv(path, name: str | None = None) -> Dataset:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DatasetError(f"{path}: empty file (no header)")
    if tuple(c.strip() for c in rows[0]) != HEADER:
        raise DatasetError(f"{path}: row 1: header must be {','.join(HEADER)}, got {','.join(rows[0])}")
    samples = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise DatasetError(f"{path}: row {lineno}: expected 3 columns, got {len(row)}")
        values = []
        for col, cell in zip(HEADER, row):
            try:
                values.append(float(cell))
            except ValueError:
                raise DatasetError(f"{path}: row {lineno}, column {col}: not a number: {cell!r}") from None
        bac, pulse, target = values
        if target not in (0.0, 1.0):
            raise DatasetError(f"{path}: row {lineno}, column Target: must be 0 or 1, got {row[2]!r}")
        try:
            samples.append(Sample(bac, pulse, int(target)))
        except DatasetError as exc:
            raise DatasetError(f"{path}: row {lineno}: {exc}") from None
    if not samples:
        raise DatasetError(f"{path}: empty dataset")
    return Dataset(tuple(samples), name or path.stem)


@dataclass(frozen=True)
class GeneratorConfig:
    """Synthetic population parameters.

    Normal subjects: pulse z ~ N(0, 1) (stored as |z|), BAC exactly 0 for most
    and a small trace for the rest. Induced subjects come in two kinds:
    alcohol (BAC spread over (0, induced_bac_max]) and drug (BAC 0, pulse
    pushed out towards induced_pulse_zmax). A fraction ``overlap_fraction`` of
    induced subjects is drawn from the normal population, which bounds the
    attainable accuracy.
    """

    n_normal: int = 100
    n_induced: int = 99
    seed: int = 0
    induced_bac_max: float = 0.25
    induced_pulse_zmax: float = 3.0
    overlap_fraction: float = 0.2
    alcohol_fraction: float = 0.5
    normal_trace_bac_fraction: float = 0.1
    n_bands: int = 6
    band_halfwidth: float = 0.08
    band_leak: float = 0.2
    pulse_step: float = 0.05

    def validate(self):
        if self.n_normal < 0 or self.n_induced < 0 or self.n_normal + self.n_induced < 2:
            raise ValueError("need n_normal + n_induced >= 2 with both counts >= 0")
        if not self.induced_bac_max > 0 or not self.induced_pulse_zmax > 0:
            raise ValueError("induced_bac_max and induced_pulse_zmax must be positive")
        if self.n_bands < 1 or not self.band_halfwidth > 0 or self.pulse_step < 0:
            raise ValueError("need n_bands >= 1, band_halfwidth > 0, pulse_step >= 0")
        for f in ("overlap_fraction", "alcohol_fraction", "normal_trace_bac_fraction", "band_leak"):
            if not 0.0 <= getattr(self, f) <= 1.0:
                raise ValueError(f"{f} must lie in [0, 1]")


def _truncnorm(rng, mean, sd, lo, hi, size):
    # rejection sampling; every band used here holds a large share of the mass
    out = np.empty(size)
    filled = 0
    while filled < size:
        draw = rng.normal(mean, sd, size=2 * (size - filled) + 8)
        draw = draw[(draw >= lo) & (draw <= hi)]
        take = min(len(draw), size - filled)
        out[filled:filled + take] = draw[:take]
        filled += take
    return out


def band_centers(cfg) -> np.ndarray:
    """Pulse bands (|z|) occupied by drug-induced subjects; the last sits just inside zmax."""
    zmax = cfg.induced_pulse_zmax
    return np.linspace(0.2 * zmax, zmax - cfg.band_halfwidth, cfg.n_bands)


def _in_bands(pulse, cfg):
    d = np.abs(pulse[:, None] - band_centers(cfg)[None, :])
    return (d <= cfg.band_halfwidth).any(axis=1)


def _normal_rows(rng, n, cfg):
    # normal pulses mostly avoid the drug bands; band_leak of them land anywhere
    z = np.empty(0)
    while len(z) < n:
        cand = np.abs(_truncnorm(rng, 0.0, 1.0, -cfg.induced_pulse_zmax, cfg.induced_pulse_zmax, 2 * n))
        leak = rng.random(len(cand)) < cfg.band_leak
        z = np.concatenate([z, cand[leak | ~_in_bands(cand, cfg)]])
    trace = rng.random(n) < cfg.normal_trace_bac_fraction
    bac = np.where(trace, rng.uniform(0.0, 0.016, n) * cfg.induced_bac_max, 0.0)
    return bac, z[:n]


def _induced_rows(rng, n, cfg):
    zmax, bmax = cfg.induced_pulse_zmax, cfg.induced_bac_max
    alcohol = rng.random(n) < cfg.alcohol_fraction
    # alcohol: BAC skewed low over (0.02, 1] * bmax, pulse like the normal class
    bac = np.where(alcohol, bmax * _truncnorm(rng, 0.0, 0.45, 0.02, 1.0, n), 0.0)
    z_alc = np.abs(_truncnorm(rng, 0.0, 1.0, -zmax, zmax, n))
    # drug: no alcohol, pulse inside one of the narrow bands
    centers = band_centers(cfg)
    z_drug = centers[rng.integers(0, len(centers), n)] + rng.uniform(-cfg.band_halfwidth, cfg.band_halfwidth, n)
    pulse = np.clip(np.where(alcohol, z_alc, z_drug), 0.0, zmax)
    return bac, pulse


def generate_synthetic(cfg: GeneratorConfig = GeneratorConfig(), name: str = "synthetic") -> Dataset:
    cfg.validate()
    rng = make_rng(cfg.seed, "dataset.generate")
    bac0, pulse0 = _normal_rows(rng, cfg.n_normal, cfg)
    overlap = rng.random(cfg.n_induced) < cfg.overlap_fraction
    bac_i, pulse_i = _induced_rows(rng, cfg.n_induced, cfg)
    bac_o, pulse_o = _normal_rows(rng, cfg.n_induced, cfg)
    bac1 = np.where(overlap, bac_o, bac_i)
    pulse1 = np.where(overlap, pulse_o, pulse_i)

    bac = np.round(np.concatenate([bac0, bac1]), 4)
    pulse = np.concatenate([pulse0, pulse1])
    if cfg.pulse_step > 0:
        # grid-quantised like a beat-count readout; never rounds past zmax
        pulse = np.minimum(np.round(pulse / cfg.pulse_step) * cfg.pulse_step, cfg.induced_pulse_zmax)
    pulse = np.round(pulse, 4)
    target = np.concatenate([np.zeros(cfg.n_normal, int), np.ones(cfg.n_induced, int)])
    order = rng.permutation(len(target))
    samples = tuple(
        Sample(float(bac[i]), float(pulse[i]), int(target[i])) for i in order
    )
    return Dataset(samples, name)
