"""Signature cache round trips and corruption handling."""

import struct

import numpy as np
import pytest

from minscreen.cache import MAGIC, SignatureCache, read_cache, write_cache
from minscreen.minhash import make_family, sign, to_b_bit


def _some_signatures(k=50, seed=42, n=5, bits=None):
    family = make_family(k, seed)
    sigs = {}
    for set_id in range(n):
        sig = sign(family, {set_id * 3 + 1, set_id * 7 + 2, 1 << 60})
        sigs[set_id * 10] = sig if bits is None else to_b_bit(sig, bits)
    return sigs


def test_full_width_round_trip(tmp_path):
    path = str(tmp_path / "full.mhsg")
    sigs = _some_signatures()
    write_cache(path, 42, sigs)
    back = read_cache(path)
    assert back == SignatureCache(master_seed=42, k=50, bits=64, signatures=back.signatures)
    assert set(back.signatures) == set(sigs)
    for set_id, sig in sigs.items():
        assert np.array_equal(back.signatures[set_id].values, sig.values)
        assert back.signatures[set_id].fingerprint == sig.fingerprint
        assert back.signatures[set_id].bits == 64


@pytest.mark.parametrize("bits", [1, 7, 8, 12, 24, 32])
def test_reduced_round_trip(tmp_path, bits):
    path = str(tmp_path / f"b{bits}.mhsg")
    sigs = _some_signatures(bits=bits)
    write_cache(path, 42, sigs)
    back = read_cache(path)
    assert back.bits == bits
    assert back.k == 50
    for set_id, sig in sigs.items():
        assert np.array_equal(back.signatures[set_id].values, sig.values)
        assert back.signatures[set_id].fingerprint == sig.fingerprint


def test_round_trip_signatures_stay_comparable(tmp_path):
    from minscreen.minhash import match_count

    path = str(tmp_path / "c.mhsg")
    sigs = _some_signatures(k=30, seed=9, n=2)
    write_cache(path, 9, sigs)
    back = read_cache(path)
    fresh = sign(make_family(30, 9), {1, 2, 16})
    assert match_count(back.signatures[0], fresh, 30).k_examined == 30


def test_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.mhsg"
    path.write_bytes(b"NOPE" + bytes(60))
    with pytest.raises(ValueError, match="bad magic"):
        read_cache(str(path))


def test_rejects_unknown_version(tmp_path):
    path = tmp_path / "v2.mhsg"
    path.write_bytes(MAGIC + struct.pack("<IQQQ", 2, 1, 0, 0))
    with pytest.raises(ValueError, match="version"):
        read_cache(str(path))


def test_rejects_truncated_file(tmp_path):
    path = str(tmp_path / "t.mhsg")
    write_cache(path, 42, _some_signatures())
    data = open(path, "rb").read()
    clipped = tmp_path / "clipped.mhsg"
    clipped.write_bytes(data[:-5])
    with pytest.raises(ValueError, match="corrupt"):
        read_cache(str(clipped))
    padded = tmp_path / "padded.mhsg"
    padded.write_bytes(data + b"\x00")
    with pytest.raises(ValueError, match="corrupt"):
        read_cache(str(padded))


def test_rejects_duplicate_set_ids(tmp_path):
    k = 2
    header = MAGIC + struct.pack("<IQQQ", 1, k, 0, 2)
    record = struct.pack("<Q", 5) + struct.pack("<QQ", 1, 2)
    path = tmp_path / "dup.mhsg"
    path.write_bytes(header + record + record)
    with pytest.raises(ValueError, match="duplicate set id"):
        read_cache(str(path))


def test_write_rejects_empty_and_mixed_input(tmp_path):
    path = str(tmp_path / "x.mhsg")
    with pytest.raises(ValueError, match="empty"):
        write_cache(path, 42, {})
    sigs = _some_signatures(k=20, n=2)
    other = sign(make_family(21, 42), {1})
    with pytest.raises(ValueError, match="mix"):
        write_cache(path, 42, {**sigs, 99: other})


def test_write_rejects_foreign_family(tmp_path):
    path = str(tmp_path / "y.mhsg")
    sigs = _some_signatures(k=20, n=2, seed=1)
    with pytest.raises(ValueError, match="different family"):
        write_cache(path, 2, sigs)


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        read_cache(str(tmp_path / "absent.mhsg"))
