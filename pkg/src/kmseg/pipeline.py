"""Pixel ingestion: image <-> text dataset <-> CSV, PGM/PNG file I/O and a
seeded synthetic image generator.

The text dataset is one line per image row with space-separated decimal
bytes. The CSV form is the same rows, comma-delimited, LF-terminated and
without a header. Rows may be jagged in either form; only the conversion to
an image requires them to be rectangular.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class PipelineError(ValueError):
    """Raised for malformed datasets. Carries an optional 1-based position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ImageFormatError(ValueError):
    """Base class for image file problems."""


class UnsupportedFormatError(ImageFormatError):
    pass


class MalformedImageError(ImageFormatError):
    pass


class GrayImage:
    """Rectangular grid of integer intensities.

    ``pixels`` is a (height, width) integer array; ``depth`` is the largest
    representable value, 255 or 65535.
    """

    def __init__(self, pixels, depth=None):
        arr = np.asarray(pixels)
        if arr.ndim != 2:
            raise ValueError("pixels must be a 2-D array")
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            if not np.array_equal(arr, np.round(arr)):
                raise ValueError("pixels must be integers")
        arr = arr.astype(np.int64)
        if arr.size and arr.min() < 0:
            raise ValueError("pixels must be non-negative")
        top = int(arr.max()) if arr.size else 0
        if depth is None:
            depth = 255 if top <= 255 else 65535
        if depth not in (255, 65535):
            raise ValueError("depth must be 255 or 65535")
        if top > depth:
            raise ValueError(f"pixel value {top} exceeds depth {depth}")
        self.pixels = arr
        self.depth = depth

    @classmethod
    def from_flat(cls, width, height, pixels, depth=None):
        flat = np.asarray(pixels, dtype=np.int64)
        if flat.size != width * height:
            raise ValueError("pixel count does not match width x height")
        return cls(flat.reshape(height, width), depth)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def size(self):
        return self.pixels.size

    def flat(self):
        """Row-major pixel sequence."""
        return self.pixels.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (self.depth == other.depth
                and self.pixels.shape == other.pixels.shape
                and np.array_equal(self.pixels, other.pixels))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height}, depth={self.depth})"


@dataclass
class PixelDataset:
    """Possibly jagged rows of byte values."""

    rows: list
    declared_width: int | None = None

    @classmethod
    def from_image(cls, image):
        if image.depth > 255:
            raise PipelineError("text dataset is 8-bit only")
        return cls(image.pixels.tolist(), image.width)

    def to_text(self):
        return _format_rows(self.rows, " ")

    def to_csv(self):
        return _format_rows(self.rows, ",")

    def shape(self):
        """``(rows, columns)``; columns is a ``"min-max"`` string when jagged."""
        widths = sorted({len(r) for r in self.rows}) or [0]
        cols = widths[0] if len(widths) == 1 else f"{widths[0]}-{widths[-1]}"
        return len(self.rows), cols

    def to_image(self):
        if not self.rows:
            raise PipelineError("empty dataset")
        width = self.declared_width
        if width is None:
            width = len(self.rows[0])
        for lineno, row in enumerate(self.rows, start=1):
            if len(row) != width:
                raise PipelineError(
                    f"non-rectangular dataset; cannot form bitmap "
                    f"(row has {len(row)} values, expected {width})",
                    line=lineno)
        if width == 0:
            raise PipelineError("empty dataset")
        return GrayImage(np.array(self.rows, dtype=np.int64), depth=255)


def _parse_rows(data, delimiter):
    if isinstance(data, bytes):
        try:
            text = data.decode("ascii")
        except UnicodeDecodeError as exc:
            line = data[:exc.start].count(b"\n") + 1
            col = exc.start - (data.rfind(b"\n", 0, exc.start) + 1) + 1
            raise PipelineError("non-ASCII byte", line=line, column=col) from None
    else:
        text = data
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if line.endswith("\r"):
            line = line[:-1]
        row = []
        if delimiter is None:
            pos = 0
            tokens = []
            for tok in line.split(" "):
                if tok:
                    tokens.append((tok, pos + 1))
                pos += len(tok) + 1
        else:
            if line == "":
                rows.append(row)
                continue
            pos = 0
            tokens = []
            for tok in line.split(delimiter):
                tokens.append((tok, pos + 1))
                pos += len(tok) + 1
        for tok, col in tokens:
            if not tok.isdigit():
                raise PipelineError(f"not an integer: {tok!r}", line=lineno, column=col)
            value = int(tok)
            if value > 255:
                raise PipelineError(f"value {value} out of range [0, 255]",
                                    line=lineno, column=col)
            row.append(value)
        rows.append(row)
    return rows


def parse_text(data):
    """Parse a space-separated text dataset into a :class:`PixelDataset`."""
    return PixelDataset(_parse_rows(data, None))


def parse_csv(data):
    return PixelDataset(_parse_rows(data, ","))


def _format_rows(rows, sep):
    return "".join(sep.join(str(v) for v in row) + "\n" for row in rows).encode("ascii")


def image_to_text(image):
    """Serialize an 8-bit image as the space-separated text dataset."""
    return PixelDataset.from_image(image).to_text()


def text_to_csv(data):
    return parse_text(data).to_csv()


def csv_to_text(data):
    return parse_csv(data).to_text()


def csv_to_image(data):
    dataset = parse_csv(data)
    if not dataset.rows:
        raise PipelineError("empty CSV file")
    return dataset.to_image()


# --- image files ----------------------------------------------------------

def _pgm_tokens(data, count, start):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    i = start
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i >= n:
            raise MalformedImageError("truncated header")
        if data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
            j += 1
        tokens.append(data[i:j])
        i = j
    return tokens, i


def decode_pgm(data):
    """Decode P2 (ASCII) or P5 (binary) PGM bytes."""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormatError(f"not a grayscale PGM (magic {magic!r})")
    tokens, pos = _pgm_tokens(data, 3, 2)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MalformedImageError("non-numeric header field") from None
    if width <= 0 or height <= 0:
        raise MalformedImageError("image dimensions must be positive")
    if not 0 < maxval <= 65535:
        raise MalformedImageError(f"maxval {maxval} out of range")
    depth = 255 if maxval <= 255 else 65535
    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        if pos >= len(data) or not data[pos:pos + 1].isspace():
            raise MalformedImageError("missing raster")
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        raster = data[pos:pos + need]
        if len(raster) < need:
            raise MalformedImageError(
                f"truncated pixel data ({len(raster)} of {need} bytes)")
        values = np.frombuffer(raster, dtype=dtype).astype(np.int64)
    else:
        fields = data[pos:].split()
        if len(fields) < count:
            raise MalformedImageError(
                f"truncated pixel data ({len(fields)} of {count} values)")
        try:
            values = np.array([int(f) for f in fields[:count]], dtype=np.int64)
        except ValueError:
            raise MalformedImageError("non-numeric pixel value") from None
    if values.size and (values.min() < 0 or values.max() > maxval):
        raise MalformedImageError("pixel value exceeds maxval")
    return GrayImage(values.reshape(height, width), depth)


def encode_pgm(image, binary=True):
    header = f"{'P5' if binary else 'P2'}\n{image.width} {image.height}\n{image.depth}\n"
    if binary:
        dtype = ">u2" if image.depth > 255 else "u1"
        return header.encode("ascii") + image.pixels.astype(dtype).tobytes()
    body = _format_rows(image.pixels.tolist(), " ")
    return header.encode("ascii") + body


_PGM_SUFFIXES = {".pgm", ".pnm"}


def read_image(path):
    """Read a PGM (P2/P5) or, when Pillow is installed, a grayscale PNG."""
    path = Path(path)
    suffix = path.suffix.lower()
    data = path.read_bytes()
    if suffix in _PGM_SUFFIXES or data[:2] in (b"P2", b"P5"):
        return decode_pgm(data)
    if suffix == ".png":
        return _read_png(path)
    raise UnsupportedFormatError(f"unsupported image format: {path.name}")


def write_image(image, path, binary=True):
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in _PGM_SUFFIXES:
        path.write_bytes(encode_pgm(image, binary=binary))
    elif suffix == ".png":
        _write_png(image, path)
    else:
        raise UnsupportedFormatError(f"unsupported image format: {path.name}")


def _pil():
    try:
        from PIL import Image
    except ImportError:
        raise UnsupportedFormatError("PNG support requires Pillow") from None
    return Image


def _read_png(path):
    Image = _pil()
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("1", "L", "P"):
                depth = 255
                if mode != "L":
                    im = im.convert("L")
            elif mode in ("I;16", "I;16B", "I"):
                depth = 65535
            else:
                raise UnsupportedFormatError(f"PNG is not grayscale (mode {mode})")
            arr = np.array(im, dtype=np.int64)
    except (OSError, SyntaxError) as exc:
        raise MalformedImageError(f"cannot decode PNG: {exc}") from None
    return GrayImage(arr, depth)


def _write_png(image, path):
    Image = _pil()
    if image.depth > 255:
        im = Image.fromarray(image.pixels.astype(np.uint16))
    else:
        im = Image.fromarray(image.pixels.astype(np.uint8))
    im.save(path)


# --- synthetic images -----------------------------------------------------

def make_synthetic(width, height, regions=(), noise_amplitude=0, seed=0, depth=255):
    """Background 0 with filled rectangles plus optional seeded uniform noise.

    ``regions`` holds ``((x, y, w, h), intensity)`` pairs; later regions
    overwrite earlier ones where they overlap. Noise is drawn uniformly from
    the integers in ``[-noise_amplitude, noise_amplitude]`` and the result is
    clamped to ``[0, depth]``.
    """
    if width <= 0 or height <= 0:
        raise ValueError("width and height must be positive")
    if noise_amplitude < 0:
        raise ValueError("noise_amplitude must be non-negative")
    pixels = np.zeros((height, width), dtype=np.int64)
    for (x, y, w, h), intensity in regions:
        if w <= 0 or h <= 0 or x < 0 or y < 0 or x + w > width or y + h > height:
            raise ValueError(f"region {(x, y, w, h)} outside {width}x{height} image")
        if not 0 <= intensity <= depth:
            raise ValueError(f"intensity {intensity} outside [0, {depth}]")
        pixels[y:y + h, x:x + w] = intensity
    if noise_amplitude:
        rng = np.random.default_rng(seed)
        pixels += rng.integers(-noise_amplitude, noise_amplitude + 1, size=pixels.shape)
        np.clip(pixels, 0, depth, out=pixels)
    return GrayImage(pixels, depth)
