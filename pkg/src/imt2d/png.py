"""Minimal PNG decoder (the subset needed for raster ingest).

Supports non-interlaced 8- and 16-bit images in greyscale (color type 0),
truecolor (2), greyscale+alpha (4), and truecolor+alpha (6), with all five
scanline filters.  Chunk CRCs are verified; palette, interlaced, and exotic
bit-depth files are rejected with the offending property named rather than
silently mis-decoded.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import DecodeError, UnsupportedFormatError

_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_CHANNELS = {0: 1, 2: 3, 4: 2, 6: 4}


@dataclass
class PngImage:
    width: int
    height: int
    bit_depth: int
    color_type: int
    samples: np.ndarray  # (height, width, channels), float64 in [0, 1]


def _chunks(data: bytes):
    pos = len(_SIGNATURE)
    while pos < len(data):
        if pos + 8 > len(data):
            raise DecodeError("truncated chunk header")
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        ctype = data[pos + 4 : pos + 8]
        end = pos + 8 + length
        if end + 4 > len(data):
            raise DecodeError(f"truncated {ctype.decode('latin1')} chunk")
        payload = data[pos + 8 : end]
        (crc,) = struct.unpack(">I", data[end : end + 4])
        if zlib.crc32(ctype + payload) & 0xFFFFFFFF != crc:
            raise DecodeError(f"CRC mismatch in {ctype.decode('latin1')} chunk")
        yield ctype, payload
        pos = end + 4
        if ctype == b"IEND":
            return
    raise DecodeError("missing IEND chunk")


def _parse_ihdr(payload: bytes):
    if len(payload) != 13:
        raise DecodeError("malformed IHDR chunk")
    width, height, depth, color_type, compression, filter_method, interlace = struct.unpack(
        ">IIBBBBB", payload
    )
    if width == 0 or height == 0:
        raise DecodeError("zero image dimension")
    if compression != 0:
        raise UnsupportedFormatError(f"compression method {compression}")
    if filter_method != 0:
        raise UnsupportedFormatError(f"filter method {filter_method}")
    if interlace == 1:
        raise UnsupportedFormatError("interlaced (Adam7) images")
    if interlace != 0:
        raise DecodeError(f"unknown interlace method {interlace}")
    if color_type == 3:
        raise UnsupportedFormatError("palette (indexed) color")
    if color_type not in _CHANNELS:
        raise UnsupportedFormatError(f"color type {color_type}")
    if depth not in (8, 16):
        raise UnsupportedFormatError(f"bit depth {depth}")
    return width, height, depth, color_type


def _unfilter(raw: bytes, width: int, height: int, bpp: int) -> np.ndarray:
    stride = width * bpp
    if len(raw) != height * (stride + 1):
        raise DecodeError("pixel data length mismatch")
    rows = np.frombuffer(raw, dtype=np.uint8).reshape(height, stride + 1)
    filters = rows[:, 0]
    if (filters > 4).any():
        raise DecodeError(f"unknown scanline filter {int(filters[filters > 4][0])}")

    recon = np.empty((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for r in range(height):
        f = int(filters[r])
        line = rows[r, 1:]
        if f == 0:
            rec = line.copy()
        elif f == 1:
            rec = np.add.accumulate(line.reshape(-1, bpp), axis=0, dtype=np.uint8).reshape(-1)
        elif f == 2:
            rec = line + prev
        else:
            # average / paeth need the reconstructed left byte: sequential in x.
            src = line.tolist()
            up = prev.tolist()
            out = [0] * stride
            if f == 3:
                for x in range(stride):
                    left = out[x - bpp] if x >= bpp else 0
                    out[x] = (src[x] + ((left + up[x]) >> 1)) & 0xFF
            else:
                for x in range(stride):
                    a = out[x - bpp] if x >= bpp else 0
                    b = up[x]
                    c = up[x - bpp] if x >= bpp else 0
                    p = a + b - c
                    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                    if pa <= pb and pa <= pc:
                        pred = a
                    elif pb <= pc:
                        pred = b
                    else:
                        pred = c
                    out[x] = (src[x] + pred) & 0xFF
            rec = np.array(out, dtype=np.uint8)
        recon[r] = rec
        prev = rec
    return recon


def decode_png(data: bytes) -> PngImage:
    """Decode PNG bytes to normalized float samples."""
    if len(data) < len(_SIGNATURE) or data[: len(_SIGNATURE)] != _SIGNATURE:
        raise DecodeError("not a PNG file (bad signature)")

    header = None
    idat = bytearray()
    seen_iend = False
    for ctype, payload in _chunks(data):
        if ctype == b"IHDR":
            if header is not None:
                raise DecodeError("duplicate IHDR chunk")
            header = _parse_ihdr(payload)
        elif ctype == b"IDAT":
            if header is None:
                raise DecodeError("IDAT before IHDR")
            idat.extend(payload)
        elif ctype == b"IEND":
            seen_iend = True
    if header is None:
        raise DecodeError("missing IHDR chunk")
    if not seen_iend:
        raise DecodeError("missing IEND chunk")
    if not idat:
        raise DecodeError("missing IDAT chunk")

    width, height, depth, color_type = header
    channels = _CHANNELS[color_type]
    bpp = channels * depth // 8
    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise DecodeError(f"corrupt compressed stream: {exc}") from exc

    recon = _unfilter(raw, width, height, bpp)
    if depth == 8:
        samples = recon.reshape(height, width, channels).astype(np.float64) / 255.0
    else:
        values = np.frombuffer(recon.tobytes(), dtype=">u2").astype(np.float64)
        samples = values.reshape(height, width, channels) / 65535.0
    return PngImage(width=width, height=height, bit_depth=depth, color_type=color_type, samples=samples)
