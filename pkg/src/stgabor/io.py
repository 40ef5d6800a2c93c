"""Video ingestion and on-disk formats.

Three formats live here: numbered grayscale/color frame sequences (PGM/PNG,
decoded via Pillow), the native ``.vol`` volume container, and the feature
CSV produced by batch extraction.

Volume container layout (all integers little-endian):

    offset  size  field
    0       4     magic b"GVOL"
    4       1     endianness flag, b"<" (files are always little-endian)
    5       24    extent W, H, T as int64
    29      24    origin ox, oy, ot as int64
    53      --    W*H*T float64 values, C order over (x, y, t)

Round-trips are bit-exact for finite float64 data.
"""

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    DataFormatError,
    InconsistentFramesError,
    InvalidParameterError,
    MissingFrameError,
)
from .features import FeatureVector
from .volume import Volume

VOLUME_MAGIC = b"GVOL"
_HEADER = struct.Struct("<4sc6q")

# Rec.601 luma weights for color frames.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

PIXEL_FORMATS = (None, "gray", "rgb")


@dataclass(frozen=True)
class FrameSequenceSource:
    """A directory of numbered frames forming one video.

    ``pattern`` maps a frame index to a file name, either printf-style
    ("frame_%04d.png") or str.format-style ("frame_{:04d}.png"). When
    ``count`` is None, frames are read from ``start`` upward until the
    first missing index; otherwise exactly ``count`` frames must exist.
    ``pixel_format`` of "gray" or "rgb" enforces the decoded frame layout.
    """

    directory: str | Path
    pattern: str = "frame_%04d.png"
    count: int | None = None
    start: int = 0
    pixel_format: str | None = None

    def __post_init__(self):
        if self.pixel_format not in PIXEL_FORMATS:
            raise InvalidParameterError(
                f"pixel_format must be one of {PIXEL_FORMATS}, got "
                f"{self.pixel_format!r}"
            )
        if self.count is not None and self.count < 1:
            raise InvalidParameterError(f"count must be >= 1, got {self.count}")

    def frame_path(self, index: int) -> Path:
        name = (self.pattern % index if "%" in self.pattern
                else self.pattern.format(index))
        return Path(self.directory) / name


def _decode_frame(path: Path, pixel_format: str | None) -> np.ndarray:
    """One frame as a float64 (H, W) array in [0, 1]."""
    with Image.open(path) as img:
        if img.mode in ("P", "CMYK", "YCbCr", "LA"):
            img = img.convert("RGB")
        arr = np.asarray(img)
    if arr.ndim == 2:
        if pixel_format == "rgb":
            raise InconsistentFramesError(f"{path} is grayscale, expected rgb")
        limit = 65535.0 if arr.dtype == np.uint16 else 255.0
        return arr.astype(np.float64) / limit
    if arr.ndim == 3 and arr.shape[2] in (3, 4):
        if pixel_format == "gray":
            raise InconsistentFramesError(f"{path} is color, expected gray")
        rgb = arr[:, :, :3].astype(np.float64) / 255.0
        r, g, b = LUMA_WEIGHTS
        return r * rgb[:, :, 0] + g * rgb[:, :, 1] + b * rgb[:, :, 2]
    raise DataFormatError(f"unsupported pixel layout in {path}: shape {arr.shape}")


def load_video(source: FrameSequenceSource) -> Volume:
    """Read a frame sequence into a (W, H, T) volume with values in [0, 1]."""
    if source.count is not None:
        indices = range(source.start, source.start + source.count)
        for i in indices:
            if not source.frame_path(i).exists():
                raise MissingFrameError(
                    f"missing frame {i}: {source.frame_path(i)}"
                )
    else:
        indices = []
        i = source.start
        while source.frame_path(i).exists():
            indices.append(i)
            i += 1
        if not indices:
            raise DataFormatError(
                f"no frames found for pattern {source.pattern!r} in "
                f"{source.directory}"
            )

    frames = []
    for i in indices:
        frame = _decode_frame(source.frame_path(i), source.pixel_format)
        if frames and frame.shape != frames[0].shape:
            raise InconsistentFramesError(
                f"frame {i} has size {frame.shape[::-1]}, expected "
                f"{frames[0].shape[::-1]}"
            )
        frames.append(frame)
    # Frames decode as (H, W); the volume is indexed (x, y, t).
    data = np.stack(frames, axis=-1).transpose(1, 0, 2)
    return Volume(data)


def save_volume(vol: Volume, path: str | Path) -> None:
    """Write ``vol`` to the native container format."""
    header = _HEADER.pack(VOLUME_MAGIC, b"<", *vol.shape, *vol.origin)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(vol.data.astype("<f8", copy=False).tobytes())


def load_volume(path: str | Path) -> Volume:
    """Read a volume written by :func:`save_volume`."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise DataFormatError(f"{path}: truncated header")
        magic, endian, w, h, t, ox, oy, ot = _HEADER.unpack(header)
        if magic != VOLUME_MAGIC:
            raise DataFormatError(f"{path}: bad magic {magic!r}")
        if endian != b"<":
            raise DataFormatError(f"{path}: unsupported endianness flag {endian!r}")
        if min(w, h, t) < 1:
            raise DataFormatError(f"{path}: invalid extent {(w, h, t)}")
        payload = fh.read(8 * w * h * t)
        if len(payload) < 8 * w * h * t:
            raise DataFormatError(f"{path}: truncated payload")
    data = np.frombuffer(payload, dtype="<f8").reshape(w, h, t)
    return Volume(data.astype(np.float64), origin=(ox, oy, ot))


def feature_column_names(bank) -> list[str]:
    """CSV column names for the bank grid, in feature order."""
    return [f"v={v!r};theta={theta!r}" for v, theta in bank.grid()]


def write_features_csv(path: str | Path, fingerprint: str,
                       column_names: list[str], rows) -> None:
    """Write one feature row per video.

    ``rows`` yields (source path, label, value sequence). The bank
    fingerprint rides in a comment line above the header so readers can
    refuse to mix incompatible files.
    """
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_fingerprint={fingerprint}\n")
        writer = csv.writer(fh)
        writer.writerow(["path", "label", *column_names])
        for source, label, values in rows:
            writer.writerow([source, label, *[repr(float(v)) for v in values]])


def read_features_csv(path: str | Path):
    """Parse a feature CSV.

    Returns (fingerprint, column_names, rows) where rows is a list of
    (source path, label, float64 array).
    """
    with open(path, "r", newline="") as fh:
        first = fh.readline()
        if not first.startswith("# config_fingerprint="):
            raise DataFormatError(
                f"{path}: expected a '# config_fingerprint=' comment line"
            )
        fingerprint = first.split("=", 1)[1].strip()
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: missing header row") from None
        if header[:2] != ["path", "label"] or len(header) < 3:
            raise DataFormatError(f"{path}: malformed header row {header!r}")
        columns = header[2:]
        rows = []
        for record in reader:
            if not record:
                continue
            # +1 for the fingerprint comment consumed before the reader.
            line = reader.line_num + 1
            if len(record) != len(header):
                raise DataFormatError(
                    f"{path}: row {line} has {len(record)} fields, "
                    f"expected {len(header)}"
                )
            try:
                values = np.array([float(v) for v in record[2:]], dtype=np.float64)
            except ValueError as exc:
                raise DataFormatError(f"{path}: row {line}: {exc}") from None
            rows.append((record[0], record[1], values))
    return fingerprint, columns, rows


def features_from_csv(path: str | Path):
    """Feature CSV rows as (FeatureVector, label, source) triples."""
    fingerprint, _, rows = read_features_csv(path)
    return [(FeatureVector(values, fingerprint), label, source)
            for source, label, values in rows]
