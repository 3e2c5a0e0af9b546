import numpy as np
import pytest
from hypothesis import given, strategies as st

from zoblocks import BlockLayout, block_norm, block_view, embed, gather


def test_block_view_slices():
    layout = BlockLayout((2, 2))
    x = np.array([1.0, 2.0, 3.0, 4.0])
    assert np.array_equal(block_view(x, 1, layout), [3.0, 4.0])
    single = BlockLayout((4,))
    assert np.array_equal(block_view(x, 0, single), x)
    l13 = BlockLayout((1, 3))
    assert np.array_equal(block_view(np.array([5.0, 0, 0, 0]), 1, l13), [0, 0, 0])


def test_block_view_out_of_range():
    layout = BlockLayout((2, 2))
    with pytest.raises(IndexError):
        block_view(np.zeros(4), 2, layout)
    with pytest.raises(IndexError):
        block_view(np.zeros(4), -1, layout)


def test_embed_examples():
    layout = BlockLayout((2, 2))
    assert np.array_equal(embed([7.0, 8.0], 0, layout), [7, 8, 0, 0])
    assert np.array_equal(embed([0.0, 0.0], 1, layout), [0, 0, 0, 0])
    with pytest.raises(ValueError):
        embed([1.0, 2.0, 3.0], 0, layout)


def test_block_norm_examples():
    layout = BlockLayout((2, 2))
    x = np.array([3.0, 4.0, 0.0, 0.0])
    assert block_norm(x, 0, layout) == pytest.approx(5.0)
    assert block_norm(x, 1, layout) == 0.0


def test_layout_invariants():
    layout = BlockLayout((3, 1, 4))
    assert layout.n == 8
    assert layout.offsets == (0, 3, 4)
    with pytest.raises(ValueError):
        BlockLayout(())
    with pytest.raises(ValueError):
        BlockLayout((2, 0))


def test_uniform_layout_spreads_remainder():
    layout = BlockLayout.uniform(10, 3)
    assert layout.block_sizes == (4, 3, 3)
    assert BlockLayout.uniform(48, 6).block_sizes == (8,) * 6


@st.composite
def layout_and_vector(draw):
    sizes = draw(st.lists(st.integers(1, 5), min_size=1, max_size=5))
    layout = BlockLayout(tuple(sizes))
    vals = draw(st.lists(
        st.floats(-1e6, 1e6, allow_nan=False), min_size=layout.n,
        max_size=layout.n))
    return layout, np.array(vals)


@given(layout_and_vector())
def test_embed_view_roundtrip(lv):
    layout, x = lv
    for s in range(layout.b):
        g = block_view(x, s, layout)
        full = embed(g, s, layout)
        assert np.array_equal(block_view(full, s, layout), g)
        mask = np.ones(layout.n, bool)
        mask[layout.slice(s)] = False
        assert np.all(full[mask] == 0.0)


@given(layout_and_vector())
def test_gather_reconstructs_exactly(lv):
    layout, x = lv
    parts = [block_view(x, s, layout) for s in range(layout.b)]
    assert np.array_equal(gather(parts, layout), x)


@given(layout_and_vector())
def test_pythagorean_identity(lv):
    layout, x = lv
    total = sum(block_norm(x, s, layout) ** 2 for s in range(layout.b))
    assert total == pytest.approx(float(x @ x), rel=1e-12, abs=1e-12)
