import pytest

from regret_kit.rng import MASK64, Xoshiro256, splitmix64


def reference_xoshiro(seed: int, k: int) -> list[int]:
    """Straight transcription of the public-domain reference, kept separate from the library."""
    st = seed
    s = []
    for _ in range(4):
        st = (st + 0x9E3779B97F4A7C15) & MASK64
        z = st
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        s.append(z ^ (z >> 31))
    rotl = lambda x, r: ((x << r) | (x >> (64 - r))) & MASK64  # noqa: E731
    out = []
    for _ in range(k):
        out.append((rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64)
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
    return out


def test_splitmix_known_answers():
    state, outs = 0, []
    for _ in range(4):
        state, o = splitmix64(state)
        outs.append(o)
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F, 0xF88BB8A8724C81EC]


@pytest.mark.parametrize("seed", [0, 1, 42, 2**63 + 5])
def test_xoshiro_matches_reference(seed):
    g = Xoshiro256(seed)
    assert [g.next_u64() for _ in range(20)] == reference_xoshiro(seed, 20)


def test_randint_range_and_coverage():
    g = Xoshiro256(7)
    draws = [g.randint(3, 9) for _ in range(7000)]
    assert min(draws) == 3 and max(draws) == 9
    counts = [draws.count(v) for v in range(3, 10)]
    assert max(counts) - min(counts) < 200
    assert g.randint(5, 5) == 5
    with pytest.raises(ValueError):
        g.randint(2, 1)


def test_random_unit_interval_and_determinism():
    a, b = Xoshiro256(99), Xoshiro256(99)
    xs = [a.random() for _ in range(1000)]
    assert xs == [b.random() for _ in range(1000)]
    assert all(0.0 <= x < 1.0 for x in xs)
