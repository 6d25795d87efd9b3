import pytest
from hypothesis import given
from hypothesis import strategies as st

from arrival_workbench.core import is_terminating
from arrival_workbench.decompose import feedback_vertex_set, layer_decomposition
from arrival_workbench.generators import Family, GeneratorSpec, generate, generate_corpus
from arrival_workbench.prng import MASK64, XorShift64Star, splitmix64


def test_splitmix64_reference_value():
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_xorshift_is_deterministic():
    a, b = XorShift64Star(42), XorShift64Star(42)
    assert [a.next_u64() for _ in range(20)] == [b.next_u64() for _ in range(20)]
    assert XorShift64Star(1).next_u64() != XorShift64Star(2).next_u64()


def test_xorshift_state_is_never_zero():
    for seed in (0, 1, MASK64, -1, 2**70):
        rng = XorShift64Star(seed)
        assert 0 < rng.state <= MASK64
        for _ in range(10):
            assert 0 <= rng.next_u64() <= MASK64
            assert rng.state != 0


@given(st.integers(0, 2**64), st.integers(1, 2**130))
def test_randbelow_stays_in_range(seed, bound):
    rng = XorShift64Star(seed)
    for _ in range(5):
        assert 0 <= rng.randbelow(bound) < bound


def test_draw_helpers():
    rng = XorShift64Star(7)
    assert rng.randbits(0) == 0
    assert 0 <= rng.randbits(100) < 2**100
    assert rng.randbelow(1) == 0
    draws = {rng.randint(3, 5) for _ in range(200)}
    assert draws == {3, 4, 5}
    assert {rng.choice("ab") for _ in range(100)} == {"a", "b"}


@pytest.mark.parametrize("family", list(Family))
@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_generated_instances_terminate(family, n):
    for seed in range(5):
        spec = GeneratorSpec(family, n, seed=seed)
        instance = spec.generate()
        assert instance.n == n
        assert is_terminating(instance)
        assert generate(spec) == instance


@given(st.integers(1, 30), st.integers(0, 2**32))
def test_random_terminating(n, seed):
    assert is_terminating(GeneratorSpec("random_terminating", n, seed=seed).generate())


@pytest.mark.parametrize("n", [1, 3, 7])
def test_layered_chain_has_one_vertex_per_layer(n):
    layers = layer_decomposition(GeneratorSpec(Family.LAYERED_CHAIN, n).generate())
    assert layers.ell == n
    assert layers.sizes[1:] == (1,) * n


def test_counter_shape():
    instance = GeneratorSpec(Family.LONG_RUN_COUNTER, 4, seed=1).generate()
    assert instance.origin == 0
    assert instance.succ_even == (0, 0, 0, 0)
    assert instance.succ_odd[:3] == (1, 2, 3)
    assert layer_decomposition(instance).ell == 4


def test_two_cycle_grid_defaults_to_half_the_vertices():
    instance = GeneratorSpec(Family.TWO_CYCLE_GRID, 7, seed=9).generate()
    assert feedback_vertex_set(instance, 6) == (0, 2, 4)


def test_two_cycle_grid_rejects_too_many_cycles():
    with pytest.raises(AssertionError):
        GeneratorSpec(Family.TWO_CYCLE_GRID, 5, cycles=3).generate()


def test_spec_label_and_family_parsing():
    spec = GeneratorSpec("long-run-counter", 4, seed=2)
    assert spec.family is Family.LONG_RUN_COUNTER
    assert spec.label == "long_run_counter-n4-s2"
    assert GeneratorSpec(Family.TWO_CYCLE_GRID, 6, cycles=2).label == "two_cycle_grid-n6-s0-c2"
    with pytest.raises(ValueError):
        Family.parse("complete")


def test_generate_corpus():
    corpus = list(generate_corpus("layered_chain,long_run_counter", (3, 4), count=3, seed=10))
    assert len(corpus) == 12
    assert len({label for label, _ in corpus}) == 12
    assert corpus[0][0] == "layered_chain-n3-s10"
    assert list(generate_corpus([], (3,))) == []


def test_generate_corpus_takes_a_range_of_sizes():
    corpus = list(generate_corpus(["layered_chain"], range(2, 5)))
    assert [label for label, _ in corpus] == [
        "layered_chain-n2-s0",
        "layered_chain-n3-s0",
        "layered_chain-n4-s0",
    ]
