"""Binary container for dense float32 tensors.

Layout, little-endian throughout:

    offset 0   4 bytes   magic 0x50 0x52 0x4E 0x54
    offset 4   1 byte    format version, currently 1
    offset 5   1 byte    dtype code, currently 1 = float32
    offset 6   1 byte    number of dimensions
    offset 7   1 byte    reserved, must be zero
    offset 8   ndim * 8  extents, unsigned 64-bit
    then       row-major float32 payload, 4 bytes per element

Tensors are numpy float32 arrays in C order. Loading validates the header
and refuses non-finite payloads; writing refuses non-finite values so a
file on disk is always loadable. Round-trips are bit-exact.
"""

import struct

import numpy as np

MAGIC = b"PRNT"
VERSION = 1
DTYPE_F32 = 1
_HEADER = struct.Struct("<4sBBBB")


class TensorFormatError(ValueError):
    """Base class for malformed tensor containers."""


class BadMagicError(TensorFormatError):
    pass


class UnsupportedVersionError(TensorFormatError):
    pass


class UnsupportedDtypeError(TensorFormatError):
    pass


class TruncatedFileError(TensorFormatError):
    pass


class NonFiniteValueError(TensorFormatError):
    pass


def tensor_to_bytes(values) -> bytes:
    """Serialize an array to the container format.

    Accepts anything numpy can coerce; data is stored as float32. Refuses
    NaN/Inf so every written file satisfies the load-time invariant.
    """
    arr = np.asarray(values, dtype="<f4")
    if arr.ndim and not arr.flags.c_contiguous:
        arr = np.ascontiguousarray(arr)
    if arr.ndim > 255:
        raise TensorFormatError("tensor has %d dimensions, limit is 255" % arr.ndim)
    if arr.size and not np.isfinite(arr).all():
        raise NonFiniteValueError("refusing to write non-finite values")
    header = _HEADER.pack(MAGIC, VERSION, DTYPE_F32, arr.ndim, 0)
    extents = struct.pack("<%dQ" % arr.ndim, *arr.shape)
    return header + extents + arr.tobytes(order="C")


def tensor_from_bytes(buf: bytes) -> np.ndarray:
    """Parse the container format; inverse of tensor_to_bytes."""
    if len(buf) < _HEADER.size:
        raise TruncatedFileError(
            "file is %d bytes, header needs %d" % (len(buf), _HEADER.size)
        )
    magic, version, dtype, ndim, reserved = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise BadMagicError("bad magic %r" % magic)
    if version != VERSION:
        raise UnsupportedVersionError("unsupported version %d" % version)
    if dtype != DTYPE_F32:
        raise UnsupportedDtypeError("unsupported dtype code %d" % dtype)
    if reserved != 0:
        raise TensorFormatError("reserved byte is %d, must be 0" % reserved)

    extent_bytes = ndim * 8
    if len(buf) < _HEADER.size + extent_bytes:
        raise TruncatedFileError("file ends inside the extent list")
    shape = struct.unpack_from("<%dQ" % ndim, buf, _HEADER.size)

    count = 1
    for extent in shape:
        count *= extent
    payload = buf[_HEADER.size + extent_bytes :]
    # Size check runs before any allocation so absurd extents cannot
    # trigger a huge allocation from a tiny file.
    if len(payload) != 4 * count:
        raise TruncatedFileError(
            "payload is %d bytes, extents %r need %d" % (len(payload), shape, 4 * count)
        )
    arr = np.frombuffer(payload, dtype="<f4").astype(np.float32).reshape(shape)
    if arr.size and not np.isfinite(arr).all():
        raise NonFiniteValueError("payload contains NaN or Inf")
    return arr


def write_tensor(path, values) -> None:
    data = tensor_to_bytes(values)
    with open(path, "wb") as fh:
        fh.write(data)


def read_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return tensor_from_bytes(fh.read())
