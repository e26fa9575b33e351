import struct

import numpy as np
import pytest

from prunefair.tensorfile import (
    BadMagicError,
    NonFiniteValueError,
    TensorFormatError,
    TruncatedFileError,
    UnsupportedDtypeError,
    UnsupportedVersionError,
    read_tensor,
    tensor_from_bytes,
    tensor_to_bytes,
    write_tensor,
)


def test_layout_of_known_vector():
    buf = tensor_to_bytes(np.array([1.0, 2.0, 3.0], dtype=np.float32))
    assert len(buf) == 8 + 8 + 12
    assert buf[:4] == b"PRNT"
    assert buf[4] == 1  # version
    assert buf[5] == 1  # dtype
    assert buf[6] == 1  # ndim
    assert buf[7] == 0  # reserved
    assert struct.unpack_from("<Q", buf, 8) == (3,)
    assert struct.unpack_from("<3f", buf, 16) == (1.0, 2.0, 3.0)


def test_round_trip_is_bit_exact():
    rng = np.random.default_rng(11)
    shapes = [(), (1,), (0,), (7,), (3, 5), (2, 3, 4), (1, 1, 1, 2)]
    for shape in shapes:
        arr = rng.standard_normal(shape).astype(np.float32)
        buf = tensor_to_bytes(arr)
        back = tensor_from_bytes(buf)
        assert back.shape == arr.shape
        assert back.tobytes() == arr.tobytes()
        assert tensor_to_bytes(back) == buf


def test_empty_tensor_round_trips():
    arr = np.zeros((0,), dtype=np.float32)
    back = tensor_from_bytes(tensor_to_bytes(arr))
    assert back.shape == (0,)


def test_file_round_trip(tmp_path):
    path = tmp_path / "w.tensor"
    arr = np.arange(12, dtype=np.float32).reshape(3, 4) - 5.5
    write_tensor(path, arr)
    back = read_tensor(path)
    assert back.dtype == np.float32
    assert np.array_equal(back, arr)


def test_row_major_order():
    arr = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=np.float32)
    buf = tensor_to_bytes(arr)
    assert struct.unpack_from("<4f", buf, 8 + 16) == (1.0, 2.0, 3.0, 4.0)


def test_bad_magic():
    buf = bytearray(tensor_to_bytes(np.zeros(2, dtype=np.float32)))
    buf[0] = 0x51
    with pytest.raises(BadMagicError):
        tensor_from_bytes(bytes(buf))


def test_unsupported_version():
    buf = bytearray(tensor_to_bytes(np.zeros(2, dtype=np.float32)))
    buf[4] = 2
    with pytest.raises(UnsupportedVersionError):
        tensor_from_bytes(bytes(buf))


def test_unsupported_dtype():
    buf = bytearray(tensor_to_bytes(np.zeros(2, dtype=np.float32)))
    buf[5] = 7
    with pytest.raises(UnsupportedDtypeError):
        tensor_from_bytes(bytes(buf))


def test_reserved_byte_must_be_zero():
    buf = bytearray(tensor_to_bytes(np.zeros(2, dtype=np.float32)))
    buf[7] = 1
    with pytest.raises(TensorFormatError):
        tensor_from_bytes(bytes(buf))


def test_truncations():
    buf = tensor_to_bytes(np.zeros((2, 3), dtype=np.float32))
    with pytest.raises(TruncatedFileError):
        tensor_from_bytes(buf[:5])  # inside the header
    with pytest.raises(TruncatedFileError):
        tensor_from_bytes(buf[:12])  # inside the extent list
    with pytest.raises(TruncatedFileError):
        tensor_from_bytes(buf[:-4])  # payload short
    with pytest.raises(TruncatedFileError):
        tensor_from_bytes(buf + b"\x00" * 4)  # trailing bytes


def test_absurd_extents_rejected_without_allocation():
    header = struct.pack("<4sBBBB", b"PRNT", 1, 1, 2, 0)
    extents = struct.pack("<2Q", 2**40, 2**40)
    with pytest.raises(TruncatedFileError):
        tensor_from_bytes(header + extents)


def test_non_finite_payload_rejected():
    buf = bytearray(tensor_to_bytes(np.zeros(3, dtype=np.float32)))
    buf[16:20] = struct.pack("<f", float("nan"))
    with pytest.raises(NonFiniteValueError):
        tensor_from_bytes(bytes(buf))
    buf[16:20] = struct.pack("<f", float("inf"))
    with pytest.raises(NonFiniteValueError):
        tensor_from_bytes(bytes(buf))


def test_writer_refuses_non_finite():
    with pytest.raises(NonFiniteValueError):
        tensor_to_bytes(np.array([1.0, float("nan")]))
    with pytest.raises(NonFiniteValueError):
        tensor_to_bytes(np.array([float("inf")]))


def test_loader_totality_under_fuzz():
    # every mutation either loads to a valid array or raises the typed
    # error; nothing else may escape
    rng = np.random.default_rng(99)
    base = tensor_to_bytes(rng.standard_normal((4, 6)).astype(np.float32))
    for _ in range(500):
        buf = bytearray(base)
        for _ in range(rng.integers(1, 4)):
            buf[rng.integers(0, len(buf))] = rng.integers(0, 256)
        cut = rng.integers(0, len(buf) + 1)
        if rng.random() < 0.3:
            buf = buf[:cut]
        try:
            out = tensor_from_bytes(bytes(buf))
        except TensorFormatError:
            continue
        assert isinstance(out, np.ndarray)
        assert np.isfinite(out).all()
