"""Hypothesis strategies shared by the test modules."""

from __future__ import annotations

from hypothesis import strategies as st

from fppgroups.words import Word


def raw_syllables(rank: int, max_len: int = 12):
    return st.lists(st.tuples(st.integers(0, rank - 1), st.sampled_from([-2, -1, 1, 2])), max_size=max_len)


def words(rank: int, max_len: int = 12):
    return raw_syllables(rank, max_len).map(lambda s: Word(tuple(s)))


def letter_lists(rank: int, max_len: int = 16):
    return st.lists(st.integers(0, 2 * rank - 1), max_size=max_len)
