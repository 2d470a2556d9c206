import threading

import pytest

from smoothap.cache import CharacterSumCache, _checksum
from smoothap.errors import CacheIntegrityError


def test_cold_then_warm(tmp_path):
    path = str(tmp_path / "sums.cache")
    cache = CharacterSumCache(path)
    calls = []

    def compute():
        calls.append(1)
        return 0.25 - 1.5j

    key = ("abc123", 100, 7, 2)
    assert cache.get_or_compute(key, compute) == 0.25 - 1.5j
    assert cache.get_or_compute(key, compute) == 0.25 - 1.5j
    assert len(calls) == 1  # second call was a hit
    cache.close()

    warm = CharacterSumCache(path)
    assert warm.get_or_compute(key, lambda: 0.25 - 1.5j) == 0.25 - 1.5j
    assert warm.misses == 0 and warm.hits == 1
    warm.close()


def test_roundtrip_precision(tmp_path):
    path = str(tmp_path / "sums.cache")
    cache = CharacterSumCache(path)
    vals = [complex(1 / 3, -2 / 7), complex(1e-15, 1e15), complex(-0.0, 5.5)]
    for i, v in enumerate(vals):
        cache.get_or_compute(("fp", i, 3, 0), lambda v=v: v)
    cache.close()
    warm = CharacterSumCache(path)
    for i, v in enumerate(vals):
        assert warm._data[("fp", i, 3, 0)] == v  # repr round-trip is exact
    warm.close()


def test_checksum_corruption_quarantines(tmp_path):
    path = str(tmp_path / "sums.cache")
    cache = CharacterSumCache(path)
    cache.get_or_compute(("fp", 10, 3, 0), lambda: 1 + 1j)
    cache.close()
    raw = open(path).read()
    open(path, "w").write(raw.replace("1.0", "2.0"))
    with pytest.raises(CacheIntegrityError):
        CharacterSumCache(path)
    assert (tmp_path / "sums.cache.quarantined").exists()


def test_partial_final_line_tolerated(tmp_path):
    path = str(tmp_path / "sums.cache")
    cache = CharacterSumCache(path)
    cache.get_or_compute(("fp", 10, 3, 0), lambda: 1 + 1j)
    cache.close()
    with open(path, "a") as fh:
        fh.write("fp\t11\t3\t0\t0.5")  # torn write: no checksum, no newline
    warm = CharacterSumCache(path)  # must not raise
    assert len(warm) == 1
    warm.close()


def test_audit_detects_drift(tmp_path):
    path = str(tmp_path / "sums.cache")
    cache = CharacterSumCache(path, audit_rate=1)  # audit every hit
    key = ("fp", 5, 3, 1)
    cache.get_or_compute(key, lambda: 1.0 + 0j)
    assert cache.get_or_compute(key, lambda: 1.0 + 0j) == 1.0 + 0j
    with pytest.raises(CacheIntegrityError):
        cache.get_or_compute(key, lambda: 2.0 + 0j)  # recomputation disagrees


def test_concurrent_readers_single_writer(tmp_path):
    path = str(tmp_path / "sums.cache")
    cache = CharacterSumCache(path)
    stop = threading.Event()
    torn = []

    def writer():
        for i in range(400):
            cache.get_or_compute(("fp", i, 7, i % 5), lambda i=i: complex(i, -i))
        stop.set()

    def reader():
        while not stop.is_set():
            try:
                raw = open(path).read()
            except FileNotFoundError:
                continue
            lines = raw.split("\n")
            if lines and lines[-1] != "":
                lines.pop()  # in-progress write
            for ln in lines:
                if not ln:
                    continue
                parts = ln.split("\t")
                assert len(parts) == 7
                body = "\t".join(parts[:6])
                assert _checksum(body) == parts[6]
                torn.append(0)

    threads = [threading.Thread(target=reader) for _ in range(3)]
    wt = threading.Thread(target=writer)
    for t in threads:
        t.start()
    wt.start()
    wt.join()
    for t in threads:
        t.join()
    cache.close()
    # a fresh load sees all 400 records intact
    warm = CharacterSumCache(path)
    assert len(warm) == 400
    warm.close()


def test_cache_transparency(table_1e4):
    # enabling the cache never changes a detection report
    from smoothap import multfn
    from smoothap.characters import family_A
    from smoothap.large_sieve import detect_exceptional

    fams = family_A(10)
    f = multfn.smooth_indicator(50)
    bare = detect_exceptional(f, 10**4, 50, 10, 1.0, 0.5, table_1e4, fams)
    import tempfile, os
    with tempfile.TemporaryDirectory() as d:
        cache = CharacterSumCache(os.path.join(d, "c.cache"))
        cold = detect_exceptional(f, 10**4, 50, 10, 1.0, 0.5, table_1e4, fams,
                                  cache=cache)
        warm = detect_exceptional(f, 10**4, 50, 10, 1.0, 0.5, table_1e4, fams,
                                  cache=cache)
        cache.close()
    for a, b, c in zip(bare.members, cold.members, warm.members):
        assert a.character == b.character == c.character
        assert a.value == b.value == c.value
