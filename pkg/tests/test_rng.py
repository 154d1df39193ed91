"""The generator is the portability anchor: fixed vectors, no tolerance."""

from __future__ import annotations

from cube.rng import Splitmix64, secret_hex

# Published known-answer values for this generator seeded with 1234567.
REFERENCE_SEED = 1234567
REFERENCE_OUTPUTS = [
    6457827717110365317,
    3203168211198807973,
    9817491932198370423,
    4593380528125082431,
    16408922859458223821,
]

# Frozen outputs for the seeds the bundled benchmarks actually use.
FROZEN_FIRST_OUTPUTS = {
    0: 16294208416658607535,
    1: 10451216379200822465,
    7: 7191089600892374487,
    11: 5833679380957638813,
    42: 13679457532755275413,
}


def test_reference_vector():
    gen = Splitmix64(REFERENCE_SEED)
    assert [gen.next() for _ in range(5)] == REFERENCE_OUTPUTS


def test_frozen_first_outputs():
    for seed, expected in FROZEN_FIRST_OUTPUTS.items():
        assert Splitmix64(seed).next() == expected


def test_outputs_fit_in_64_bits():
    gen = Splitmix64(987654321)
    for _ in range(100):
        assert 0 <= gen.next() < 2**64


def test_same_seed_same_stream():
    a = Splitmix64(99)
    b = Splitmix64(99)
    assert [a.next() for _ in range(10)] == [b.next() for _ in range(10)]


def test_secret_hex_is_first_output_in_hex():
    assert secret_hex(0) == format(FROZEN_FIRST_OUTPUTS[0], "016x")
    assert secret_hex(0) == "e220a8397b1dcdaf"
    assert len(secret_hex(123)) == 16
    assert secret_hex(123) == secret_hex(123)


def test_next_below_is_plain_modulus():
    gen1 = Splitmix64(5)
    gen2 = Splitmix64(5)
    assert gen1.next_below(9) == gen2.next() % 9
