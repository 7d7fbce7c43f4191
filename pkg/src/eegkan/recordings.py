"""Recording files and manifests.

A recording file is a one-line JSON header followed by CSV sample rows,
one row per time step and one column per channel. A manifest is a CSV
with columns ``path,label,excluded``; paths are resolved relative to the
manifest's directory.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, UnknownChannel
from .ioutil import atomic_write_text

__all__ = [
    "DEFAULT_CHANNELS",
    "GENDERS",
    "LABELS",
    "ManifestEntry",
    "Recording",
    "load_recording",
    "read_manifest",
    "save_recording",
    "select_channels",
    "write_manifest",
]

LABELS = ("AD", "HC")
GENDERS = ("M", "F", "unknown")

# Frontal midline/lateral plus temporal sites; override per run as needed.
DEFAULT_CHANNELS = ("Fz", "F3", "F4", "T7", "T8")

_HEADER_KEYS = {"subject_id", "label", "gender", "age", "sample_rate_hz", "channel_names"}
_REQUIRED_KEYS = _HEADER_KEYS - {"age"}

_TRUE_WORDS = {"true", "1", "yes"}
_FALSE_WORDS = {"false", "0", "no", ""}


@dataclass(frozen=True)
class Recording:
    """One subject's multichannel signal plus metadata.

    ``samples`` is (n_channels, n_samples) float64, microvolts.
    """

    subject_id: str
    label: str
    gender: str
    age: float | None
    sample_rate_hz: float
    channel_names: tuple[str, ...]
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")
        if self.gender not in GENDERS:
            raise ValueError(f"gender must be one of {GENDERS}, got {self.gender!r}")
        if not self.sample_rate_hz > 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if len(set(self.channel_names)) != len(self.channel_names):
            raise ValueError("channel names must be unique")
        if self.samples.ndim != 2 or self.samples.shape[0] != len(self.channel_names):
            raise ValueError(
                f"samples must be (n_channels, n_samples), got {self.samples.shape} "
                f"for {len(self.channel_names)} channels"
            )

    @property
    def n_channels(self) -> int:
        return len(self.channel_names)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate_hz

    def channel(self, name: str) -> np.ndarray:
        try:
            idx = self.channel_names.index(name)
        except ValueError:
            raise UnknownChannel([name]) from None
        return self.samples[idx]


def load_recording(path: str | os.PathLike) -> Recording:
    """Parse a canonical recording file, rejecting anything malformed."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        header_line = fh.readline()
        body = fh.read()

    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: header is not valid JSON: {exc}") from None
    if not isinstance(header, dict):
        raise ParseError(f"{path}: header must be a JSON object")

    missing = _REQUIRED_KEYS - header.keys()
    if missing:
        raise ParseError(f"{path}: header missing keys {sorted(missing)}")
    unknown = header.keys() - _HEADER_KEYS
    if unknown:
        raise ParseError(f"{path}: header has unknown keys {sorted(unknown)}")

    label = header["label"]
    if label == "FTD":
        raise ParseError(
            f"{path}: label FTD is not part of the two-class task; "
            "mark the subject excluded in the manifest instead of loading it"
        )
    if label not in LABELS:
        raise ParseError(f"{path}: unknown label {label!r}, expected one of {LABELS}")

    gender = header["gender"]
    if gender not in GENDERS:
        raise ParseError(f"{path}: unknown gender {gender!r}, expected one of {GENDERS}")

    age = header.get("age")
    if age is not None and not isinstance(age, (int, float)):
        raise ParseError(f"{path}: age must be a number or null, got {age!r}")

    rate = header["sample_rate_hz"]
    if not isinstance(rate, (int, float)) or not rate > 0:
        raise ParseError(f"{path}: sample_rate_hz must be a positive number, got {rate!r}")

    names = header["channel_names"]
    if (
        not isinstance(names, list)
        or not names
        or not all(isinstance(n, str) for n in names)
    ):
        raise ParseError(f"{path}: channel_names must be a non-empty array of strings")
    if len(set(names)) != len(names):
        raise ParseError(f"{path}: duplicate channel names in {names}")

    rows = []
    for lineno, line in enumerate(body.splitlines(), start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(names):
            raise ParseError(
                f"{path}:{lineno}: expected {len(names)} columns, got {len(cells)}"
            )
        try:
            row = [float(c) for c in cells]
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-numeric sample value") from None
        rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no sample rows after the header")

    samples = np.asarray(rows, dtype=np.float64).T
    if not np.all(np.isfinite(samples)):
        raise ParseError(f"{path}: samples contain non-finite values")

    return Recording(
        subject_id=str(header["subject_id"]),
        label=label,
        gender=gender,
        age=None if age is None else float(age),
        sample_rate_hz=float(rate),
        channel_names=tuple(names),
        samples=samples,
    )


def save_recording(path: str | os.PathLike, rec: Recording) -> None:
    """Write the canonical format; saving then loading is lossless."""
    header = {
        "subject_id": rec.subject_id,
        "label": rec.label,
        "gender": rec.gender,
        "age": rec.age,
        "sample_rate_hz": rec.sample_rate_hz,
        "channel_names": list(rec.channel_names),
    }
    buf = io.StringIO()
    buf.write(json.dumps(header, sort_keys=True))
    buf.write("\n")
    # repr round-trips float64 exactly, keeping load(save(rec)) lossless.
    for row in rec.samples.T:
        buf.write(",".join(repr(float(v)) for v in row))
        buf.write("\n")
    atomic_write_text(path, buf.getvalue())


def select_channels(rec: Recording, names: list[str] | tuple[str, ...]) -> Recording:
    """Restrict a recording to the named channels, in the order given."""
    missing = [n for n in names if n not in rec.channel_names]
    if missing:
        raise UnknownChannel(missing)
    if len(set(names)) != len(names):
        raise ValueError(f"requested channels contain duplicates: {list(names)}")
    idx = [rec.channel_names.index(n) for n in names]
    return Recording(
        subject_id=rec.subject_id,
        label=rec.label,
        gender=rec.gender,
        age=rec.age,
        sample_rate_hz=rec.sample_rate_hz,
        channel_names=tuple(names),
        samples=rec.samples[idx].copy(),
    )


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    label: str
    excluded: bool


def read_manifest(path: str | os.PathLike) -> list[ManifestEntry]:
    """Read ``path,label,excluded`` rows; paths resolve against the manifest."""
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty manifest file") from None
        if header != ["path", "label", "excluded"]:
            raise ParseError(
                f"{path}: manifest header must be path,label,excluded, got {header}"
            )
        entries = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            rel, label, excluded_word = row
            word = excluded_word.strip().lower()
            if word in _TRUE_WORDS:
                excluded = True
            elif word in _FALSE_WORDS:
                excluded = False
            else:
                raise ParseError(
                    f"{path}:{lineno}: excluded must be true/false, got {excluded_word!r}"
                )
            entries.append(
                ManifestEntry(path=path.parent / rel, label=label, excluded=excluded)
            )
    return entries


def write_manifest(path: str | os.PathLike, entries: list[ManifestEntry]) -> None:
    """Write a manifest; entry paths are stored relative to it."""
    path = Path(path)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["path", "label", "excluded"])
    for entry in entries:
        rel = os.path.relpath(entry.path, path.parent)
        writer.writerow([rel, entry.label, "true" if entry.excluded else "false"])
    atomic_write_text(path, buf.getvalue())
