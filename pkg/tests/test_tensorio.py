import struct

import numpy as np
import pytest

from elbowpaf import ScalarGrid, VectorGrid, tensorio
from elbowpaf.tensorio import FormatError


def test_header_layout_is_bit_exact():
    data = tensorio.encode(np.array([[1.0, -2.0, 0.5]]))
    assert data[:4] == b"PAFT"
    assert data[4] == 0x01 and data[5] == 0x01
    assert struct.unpack("<III", data[6:18]) == (1, 1, 3)
    assert data[18:] == struct.pack("<3f", 1.0, -2.0, 0.5)
    assert len(data) == 18 + 12


def test_vector_payload_is_channel_interleaved():
    vals = np.arange(12, dtype=np.float64).reshape(2, 3, 2)
    data = tensorio.encode(vals)
    assert struct.unpack("<III", data[6:18]) == (2, 2, 3)
    assert struct.unpack("<12f", data[18:]) == tuple(float(v) for v in range(12))


def test_round_trip(tmp_path, rng):
    s = ScalarGrid(rng.uniform(size=(5, 7)).astype(np.float32))
    v = VectorGrid(rng.uniform(-1, 1, size=(5, 7, 2)).astype(np.float32))
    tensorio.write(tmp_path / "s.paft", s)
    tensorio.write(tmp_path / "v.paft", v)
    assert tensorio.read_scalar(tmp_path / "s.paft") == s
    assert tensorio.read_vector(tmp_path / "v.paft") == v


def test_quantize_matches_file_contents(tmp_path, rng):
    g = ScalarGrid(rng.uniform(size=(4, 4)))
    tensorio.write(tmp_path / "g.paft", g)
    assert tensorio.read_scalar(tmp_path / "g.paft") == tensorio.quantize(g)


@pytest.mark.parametrize("mutate,offset,needle", [
    (lambda b: b"PAFX" + b[4:], 0, "bad magic"),
    (lambda b: b[:4] + b"\x02" + b[5:], 4, "version"),
    (lambda b: b[:5] + b"\x07" + b[6:], 5, "dtype"),
    (lambda b: b[:10], 10, "truncated header"),
])
def test_header_errors_report_offset(mutate, offset, needle):
    data = mutate(tensorio.encode(np.zeros((2, 2))))
    with pytest.raises(FormatError) as exc:
        tensorio.decode(data, source="x.paft")
    assert exc.value.offset == offset
    assert needle in str(exc.value)
    assert "x.paft" in str(exc.value)


def test_truncated_payload_names_byte_counts():
    data = tensorio.encode(np.zeros((2, 2)))[:-3]
    with pytest.raises(FormatError, match="expected 16 bytes, got 13"):
        tensorio.decode(data)


def test_channel_count_checked(tmp_path):
    tensorio.write(tmp_path / "s.paft", np.zeros((2, 2)))
    with pytest.raises(FormatError):
        tensorio.read_vector(tmp_path / "s.paft")


def test_split_channels():
    arr = np.zeros((3, 3, 7))
    arr[:, :, 2] = 1.0
    arr[:, :, 5] = 2.0
    maps, fields = tensorio.split_channels(arr, 3, 2)
    assert len(maps) == 3 and len(fields) == 2
    assert maps[2].values.max() == 1.0
    assert fields[1].values[0, 0, 0] == 2.0
    with pytest.raises(FormatError):
        tensorio.split_channels(arr, 3, 1)
