"""Presentations with known finite permutation models."""

from __future__ import annotations

from fppgroups.presentation import parse_presentation

# (presentation, generator images, order)
MODELS = {
    "S3": ("< a, b | a^2, b^3, (a*b)^2 >", [(1, 0, 2), (1, 2, 0)], 6),
    "S4": ("< a, b | a^2, b^3, (a*b)^4 >", [(1, 0, 2, 3), (0, 2, 3, 1)], 24),
    "A4": ("< a, b | a^2, b^3, (a*b)^3 >", [(1, 0, 3, 2), (0, 2, 3, 1)], 12),
    "Q8": ("< a, b | a^4, a^2*b^-2, b^-1*a*b*a >",
           [(1, 2, 3, 0, 5, 6, 7, 4), (4, 7, 6, 5, 2, 1, 0, 3)], 8),
    "D4": ("< a, b | a^4, b^2, (a*b)^2 >", [(1, 2, 3, 0), (0, 3, 2, 1)], 8),
    "Z6": ("< a | a^6 >", [(1, 2, 3, 4, 5, 0)], 6),
}


def model(name):
    text, imgs, order = MODELS[name]
    return parse_presentation(text, name=name), imgs, order
