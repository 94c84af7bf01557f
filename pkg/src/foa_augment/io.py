"""FOA WAV files and the frame-based label CSV.

WAV channels are read and written positionally in ACN order (W, Y, Z, X).
Label files store degrees; everything in memory is radians.

Label CSV layout::

    # frame_hop_ms=20.0,num_frames=100,sample_rate=32000
    frame,source_id,azimuth_deg,elevation_deg
    0,1,30.000000,-10.000000

Inactive frames have no rows. The comment line is optional; without it the hop
defaults to 20 ms and the track ends at the last listed frame.
"""
from __future__ import annotations

import csv
import math
import os
from typing import Optional

import numpy as np
from scipy.io import wavfile

from .core import Direction, FoaSignal, LabelEntry, LabelTrack
from .errors import (
    BadChannelCountError,
    CorruptHeaderError,
    LabelParseError,
    LabelRangeError,
    UnsupportedFormatError,
)

HEADER = ("frame", "source_id", "azimuth_deg", "elevation_deg")
DEFAULT_FRAME_HOP_MS = 20.0
DEFAULT_SAMPLE_RATE = 32000
INT16_SCALE = 32768.0


def read_foa_wav(path) -> FoaSignal:
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        if str(exc).startswith("Unknown wave file format"):
            raise UnsupportedFormatError(f"{path}: {exc}") from exc
        raise CorruptHeaderError(f"{path}: {exc}") from exc
    except EOFError as exc:
        raise CorruptHeaderError(f"{path}: truncated file") from exc
    channels = 1 if data.ndim == 1 else data.shape[1]
    if channels != 4:
        raise BadChannelCountError(f"{path}: expected 4 channels, found {channels}")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / INT16_SCALE
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedFormatError(f"{path}: sample type {data.dtype} (need 16-bit int or 32-bit float)")
    return FoaSignal(rate, samples.T)


def write_foa_wav(sig: FoaSignal, path, *, pcm16: bool = False) -> None:
    """Write 32-bit float samples, or clipped 16-bit PCM when ``pcm16`` is set."""
    if pcm16:
        scaled = np.clip(np.round(sig.data * INT16_SCALE), -INT16_SCALE, INT16_SCALE - 1)
        out = scaled.astype(np.int16)
    else:
        out = sig.data.astype(np.float32)
    wavfile.write(path, sig.sample_rate, np.ascontiguousarray(out.T))


def _fmt_angle(deg: float, wrap: bool) -> str:
    text = f"{deg:.6f}"
    if wrap and float(text) >= 180.0:
        text = f"{deg - 360.0:.6f}"
    if float(text) == 0.0:
        text = "0.000000"
    return text


def write_labels_csv(track: LabelTrack, path, sample_rate: Optional[int] = None) -> None:
    meta = [f"frame_hop_ms={track.frame_hop * 1000.0!r}", f"num_frames={track.num_frames}"]
    if sample_rate is not None:
        meta.append(f"sample_rate={int(sample_rate)}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# " + ",".join(meta) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for k, frame in enumerate(track.frames):
            for entry in sorted(frame, key=lambda e: e.source_id):
                az, el = entry.direction.degrees()
                writer.writerow([k, entry.source_id, _fmt_angle(az, True), _fmt_angle(el, False)])


def _parse_meta(text: str, line: int) -> dict[str, str]:
    meta = {}
    for item in text.replace(",", " ").split():
        key, sep, value = item.partition("=")
        if not sep:
            raise LabelParseError(f"malformed comment field {item!r}", line)
        meta[key.strip()] = value.strip()
    return meta


def read_labels_csv(path) -> LabelTrack:
    frame_hop_ms = DEFAULT_FRAME_HOP_MS
    declared_frames = None
    rows: list[tuple[int, int, Direction]] = []
    seen: set[tuple[int, int]] = set()
    seen_header = False
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                meta = _parse_meta(line[1:], lineno)
                try:
                    if "frame_hop_ms" in meta:
                        frame_hop_ms = float(meta["frame_hop_ms"])
                    if "num_frames" in meta:
                        declared_frames = int(meta["num_frames"])
                except ValueError as exc:
                    raise LabelParseError(f"bad comment value: {exc}", lineno) from None
                continue
            fields = next(csv.reader([line]))
            if not seen_header:
                if tuple(f.strip() for f in fields) != HEADER:
                    raise LabelParseError(f"expected header {','.join(HEADER)!r}", lineno)
                seen_header = True
                continue
            if len(fields) != 4:
                raise LabelParseError(f"expected 4 fields, got {len(fields)}", lineno)
            try:
                frame, source_id = int(fields[0]), int(fields[1])
                az, el = float(fields[2]), float(fields[3])
            except ValueError as exc:
                raise LabelParseError(str(exc), lineno) from None
            if frame < 0:
                raise LabelParseError(f"negative frame index {frame}", lineno)
            if rows and frame < rows[-1][0]:
                raise LabelParseError(f"frame {frame} comes after frame {rows[-1][0]}", lineno)
            if not (-180.0 <= az < 180.0) or not math.isfinite(az):
                raise LabelRangeError(f"azimuth {az} outside [-180, 180)", lineno)
            if not (-90.0 <= el <= 90.0):
                raise LabelRangeError(f"elevation {el} outside [-90, 90]", lineno)
            if (frame, source_id) in seen:
                raise LabelParseError(f"source {source_id} listed twice in frame {frame}", lineno)
            seen.add((frame, source_id))
            rows.append((frame, source_id, Direction(math.radians(az), math.radians(el))))
    if not seen_header:
        raise LabelParseError("missing header", None)
    if not frame_hop_ms > 0:
        raise LabelParseError(f"frame_hop_ms must be positive, got {frame_hop_ms}", None)

    count = declared_frames if declared_frames is not None else (rows[-1][0] + 1 if rows else 0)
    if rows and rows[-1][0] >= count:
        raise LabelParseError(f"frame {rows[-1][0]} beyond declared num_frames={count}", None)
    frames: list[list[LabelEntry]] = [[] for _ in range(count)]
    for frame, source_id, direction in rows:
        frames[frame].append(LabelEntry(source_id, direction))
    return LabelTrack(frame_hop_ms / 1000.0, tuple(tuple(f) for f in frames))


def read_labels_meta(path) -> dict[str, str]:
    """Key/value pairs of the optional comment line (empty when absent)."""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if raw.startswith("#"):
                return _parse_meta(raw[1:], lineno)
            if raw.strip():
                break
    return {}


def pair_files(directory) -> list[tuple[str, str, str]]:
    """(stem, wav path, csv path) for every ``stem.wav`` with a ``stem.csv`` beside it, sorted."""
    names = sorted(os.listdir(directory))
    out = []
    for name in names:
        stem, ext = os.path.splitext(name)
        if ext.lower() != ".wav":
            continue
        csv_path = os.path.join(directory, stem + ".csv")
        if os.path.isfile(csv_path):
            out.append((stem, os.path.join(directory, name), csv_path))
    return out
