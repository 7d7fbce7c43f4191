"""Band-power feature tables: extraction, assembly, split, serialization.

The feature vector is channel-major, band-minor: for channels (c0..c4)
and bands (theta, alpha, beta, gamma) the layout is
c0-theta, c0-alpha, c0-beta, c0-gamma, c1-theta, and so on.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .dsp import (
    CANONICAL_BANDS,
    Band,
    band_power,
    design_butterworth_bandpass,
    filtfilt,
    welch_psd,
)
from .errors import EmptyDataset, ParseError, TooFewRows
from .ioutil import atomic_write_text
from .recordings import (
    DEFAULT_CHANNELS,
    GENDERS,
    LABELS,
    Recording,
    load_recording,
    read_manifest,
    select_channels,
)

__all__ = [
    "CLASS_NAMES",
    "Dataset",
    "FeatureRow",
    "PipelineConfig",
    "build_dataset",
    "destandardize",
    "extract_features",
    "read_features",
    "split",
    "write_features",
]

# Index 2 is reserved: the classifier keeps a third output to allow a
# future third diagnosis without changing the checkpoint format.
CLASS_NAMES = ("AD", "HC", "reserved")

LABEL_TO_INDEX = {"AD": 0, "HC": 1}
GENDER_TO_INDEX = {"M": 0, "F": 1, "unknown": 2}


@dataclass(frozen=True)
class PipelineConfig:
    """Filter and PSD settings shared by every subject in one run."""

    filter_order: int = 5
    filter_low_hz: float = 0.3
    filter_high_hz: float = 25.0
    segment_len: int = 256
    overlap: float = 0.5
    bands: tuple[Band, ...] = CANONICAL_BANDS
    with_gender: bool = False


@dataclass(frozen=True)
class FeatureRow:
    subject_id: str
    label_index: int
    gender_index: int
    features: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.label_index not in (0, 1, 2):
            raise ValueError(f"label_index must be 0, 1 or 2, got {self.label_index}")
        if self.gender_index not in (0, 1, 2):
            raise ValueError(f"gender_index must be 0, 1 or 2, got {self.gender_index}")
        if self.features.ndim != 1:
            raise ValueError("features must be a vector")
        if not np.all(np.isfinite(self.features)):
            raise ValueError(f"subject {self.subject_id}: non-finite feature values")


@dataclass(frozen=True)
class Dataset:
    """Feature rows plus the standardization statistics applied to them.

    ``normalization`` is None for raw feature values, or (mean, std)
    arrays when the rows have been standardized with those statistics.
    """

    rows: tuple[FeatureRow, ...]
    normalization: tuple[np.ndarray, np.ndarray] | None = None
    class_names: tuple[str, ...] = CLASS_NAMES

    @property
    def n_features(self) -> int:
        return self.rows[0].features.size if self.rows else 0

    def feature_matrix(self) -> np.ndarray:
        return np.stack([r.features for r in self.rows])

    def labels(self) -> np.ndarray:
        return np.array([r.label_index for r in self.rows], dtype=np.int64)


def extract_features(
    rec: Recording,
    bands: tuple[Band, ...] = CANONICAL_BANDS,
    config: PipelineConfig | None = None,
) -> FeatureRow:
    """Filter, estimate the PSD, and average it over each band per channel."""
    cfg = config if config is not None else PipelineConfig(bands=bands)
    filt = design_butterworth_bandpass(
        cfg.filter_order, cfg.filter_low_hz, cfg.filter_high_hz, rec.sample_rate_hz
    )
    values = np.empty(rec.n_channels * len(bands))
    pos = 0
    for ch in range(rec.n_channels):
        filtered = filtfilt(filt, rec.samples[ch])
        psd = welch_psd(
            filtered,
            rec.sample_rate_hz,
            segment_len=cfg.segment_len,
            overlap_frac=cfg.overlap,
        )
        for band in bands:
            values[pos] = band_power(psd, band)
            pos += 1
    return FeatureRow(
        subject_id=rec.subject_id,
        label_index=LABEL_TO_INDEX[rec.label],
        gender_index=GENDER_TO_INDEX[rec.gender],
        features=values,
    )


def _finish_row(row: FeatureRow, with_gender: bool) -> FeatureRow:
    if not with_gender:
        return row
    return replace(row, features=np.append(row.features, float(row.gender_index)))


def build_dataset(
    manifest_path: str | os.PathLike,
    channel_names: tuple[str, ...] = DEFAULT_CHANNELS,
    config: PipelineConfig | None = None,
    progress: Callable[[str], None] | None = None,
) -> Dataset:
    """Extract one FeatureRow per non-excluded manifest entry, in order."""
    cfg = config if config is not None else PipelineConfig()
    entries = read_manifest(manifest_path)
    rows = []
    for entry in entries:
        if entry.excluded:
            continue
        if entry.label not in LABELS:
            raise ParseError(
                f"{manifest_path}: entry {entry.path} has label {entry.label!r}; "
                "only AD and HC rows may be included, mark others excluded"
            )
        rec = load_recording(entry.path)
        if rec.label != entry.label:
            raise ParseError(
                f"{entry.path}: recording label {rec.label} does not match "
                f"manifest label {entry.label}"
            )
        rec = select_channels(rec, channel_names)
        rows.append(_finish_row(extract_features(rec, cfg.bands, cfg), cfg.with_gender))
        if progress is not None:
            progress(rec.subject_id)
    if not rows:
        raise EmptyDataset(f"{manifest_path}: no included recordings")
    return Dataset(rows=tuple(rows))


def build_dataset_from_recordings(
    recordings: list[Recording],
    channel_names: tuple[str, ...] = DEFAULT_CHANNELS,
    config: PipelineConfig | None = None,
) -> Dataset:
    """In-memory variant of build_dataset for already-loaded recordings."""
    cfg = config if config is not None else PipelineConfig()
    if not recordings:
        raise EmptyDataset("no recordings given")
    rows = tuple(
        _finish_row(
            extract_features(select_channels(rec, channel_names), cfg.bands, cfg),
            cfg.with_gender,
        )
        for rec in recordings
    )
    return Dataset(rows=rows)


def split(dataset: Dataset, test_frac: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified split plus train-statistics standardization of both parts.

    Per class, floor(n_class * test_frac) rows go to test. Rows keep their
    original relative order inside each part.
    """
    if not 0 < test_frac < 1:
        raise ValueError(f"test_frac must be in (0, 1), got {test_frac}")
    labels = dataset.labels()
    classes = np.unique(labels)
    rng = np.random.default_rng(seed)

    test_idx: set[int] = set()
    for cls in classes:
        members = np.flatnonzero(labels == cls)
        if members.size < 2:
            raise TooFewRows(
                f"class {dataset.class_names[cls]} has {members.size} row(s); "
                "need at least 2 per class to split"
            )
        n_test = math.floor(members.size * test_frac)
        chosen = rng.permutation(members)[:n_test]
        test_idx.update(int(i) for i in chosen)

    train_rows = [r for i, r in enumerate(dataset.rows) if i not in test_idx]
    test_rows = [r for i, r in enumerate(dataset.rows) if i in test_idx]

    train_x = np.stack([r.features for r in train_rows])
    mean = train_x.mean(axis=0)
    std = train_x.std(axis=0)
    # Zero-variance columns pass through unscaled rather than dividing by 0.
    std = np.where(std == 0.0, 1.0, std)

    def standardized(rows):
        return tuple(
            replace(r, features=(r.features - mean) / std) for r in rows
        )

    norm = (mean, std)
    return (
        Dataset(rows=standardized(train_rows), normalization=norm,
                class_names=dataset.class_names),
        Dataset(rows=standardized(test_rows), normalization=norm,
                class_names=dataset.class_names),
    )


def destandardize(features: np.ndarray, normalization: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    """Invert the z-score applied by split."""
    mean, std = normalization
    return features * std + mean


_INDEX_TO_LABEL = {v: k for k, v in LABEL_TO_INDEX.items()}
_INDEX_TO_GENDER = {v: k for k, v in GENDER_TO_INDEX.items()}


def write_features(path: str | os.PathLike, dataset: Dataset) -> None:
    """Write the feature table CSV: subject_id,label,gender,f00..fNN."""
    if not dataset.rows:
        raise EmptyDataset("refusing to write a feature table with no rows")
    n = dataset.n_features
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["subject_id", "label", "gender"] + [f"f{i:02d}" for i in range(n)])
    for row in dataset.rows:
        writer.writerow(
            [row.subject_id, _INDEX_TO_LABEL[row.label_index],
             _INDEX_TO_GENDER[row.gender_index]]
            + [repr(float(v)) for v in row.features]
        )
    atomic_write_text(path, buf.getvalue())


def read_features(path: str | os.PathLike) -> Dataset:
    """Read a feature table written by write_features, byte-faithfully."""
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty feature table") from None
        if header[:3] != ["subject_id", "label", "gender"]:
            raise ParseError(
                f"{path}: header must start with subject_id,label,gender, got {header[:3]}"
            )
        n = len(header) - 3
        expected = [f"f{i:02d}" for i in range(n)]
        if header[3:] != expected:
            raise ParseError(f"{path}: feature columns must be f00..f{n - 1:02d} in order")
        rows = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != 3 + n:
                raise ParseError(f"{path}:{lineno}: expected {3 + n} columns, got {len(cells)}")
            subject_id, label, gender = cells[:3]
            if label not in LABEL_TO_INDEX:
                raise ParseError(f"{path}:{lineno}: unknown label {label!r}")
            if gender not in GENDER_TO_INDEX:
                raise ParseError(f"{path}:{lineno}: unknown gender {gender!r}")
            try:
                values = np.array([float(c) for c in cells[3:]], dtype=np.float64)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric feature value") from None
            rows.append(
                FeatureRow(
                    subject_id=subject_id,
                    label_index=LABEL_TO_INDEX[label],
                    gender_index=GENDER_TO_INDEX[gender],
                    features=values,
                )
            )
    if not rows:
        raise EmptyDataset(f"{path}: feature table has a header but no rows")
    return Dataset(rows=tuple(rows))
