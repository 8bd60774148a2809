"""Disk automorphisms, finitely generated groups and orbits.

Every automorphism of the unit disk is stored in the normal form
``z -> exp(i theta) (z - a) / (1 - conj(a) z)`` with ``|a| < 1``; ``a`` is the
point sent to 0.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import DegenerateError
from .hyperbolic import as_disk_points, hyp_distance

PARAM_TOL = 1e-10


def _wrap(theta):
    return float(np.angle(cmath.exp(1j * theta)))


@dataclass(frozen=True)
class MobiusTransform:
    a: complex = 0j
    theta: float = 0.0

    def __post_init__(self):
        a = complex(self.a)
        if not abs(a) < 1.0:
            raise ValueError("|a| must be < 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "theta", _wrap(float(self.theta)))

    @classmethod
    def identity(cls):
        return cls(0j, 0.0)

    @classmethod
    def translation(cls, b):
        """The element with ``g(0) = b`` and positive derivative at 0."""
        return cls(-complex(b), 0.0)

    @classmethod
    def rotation(cls, theta):
        return cls(0j, theta)

    @classmethod
    def _from_zero_and_derivative(cls, a, deriv):
        # g'(a) = exp(i theta) / (1 - |a|^2)
        return cls(a, cmath.phase(deriv * (1.0 - abs(a) ** 2)))

    def __call__(self, z):
        z = as_disk_points(z)
        w = cmath.exp(1j * self.theta) * (z - self.a) / (1.0 - np.conj(self.a) * z)
        return complex(w) if w.ndim == 0 else w

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        d = cmath.exp(1j * self.theta) * (1.0 - abs(self.a) ** 2) / (1.0 - np.conj(self.a) * z) ** 2
        return complex(d) if d.ndim == 0 else d

    def inverse(self):
        # z = (e^{-i theta} w + a) / (1 + conj(a) e^{-i theta} w), so 0 comes from g(0)
        a_inv = -cmath.exp(1j * self.theta) * self.a
        return MobiusTransform._from_zero_and_derivative(a_inv, 1.0 / self.derivative(0j))

    def param_distance(self, other):
        return abs(self.a - other.a) + abs(cmath.exp(1j * self.theta) - cmath.exp(1j * other.theta))

    def is_identity(self, tol=PARAM_TOL):
        return self.param_distance(MobiusTransform.identity()) < tol

    def to_dict(self):
        return {"a_re": self.a.real, "a_im": self.a.imag, "theta": self.theta}

    @classmethod
    def from_dict(cls, d):
        return cls(complex(d["a_re"], d.get("a_im", 0.0)), d.get("theta", 0.0))


def apply(g: MobiusTransform, z):
    """Evaluate ``g`` at ``z`` (scalar or array) inside the disk."""
    return g(z)


def compose(g1: MobiusTransform, g2: MobiusTransform) -> MobiusTransform:
    """The element ``z -> g1(g2(z))``, renormalized to ``(a, theta)`` form."""
    a = complex(g2.inverse()(g1.a))
    return MobiusTransform._from_zero_and_derivative(a, g1.derivative(g2(a)) * g2.derivative(a))


def inverse(g: MobiusTransform) -> MobiusTransform:
    return g.inverse()


@dataclass(frozen=True)
class GroupElement:
    transform: MobiusTransform
    word: tuple  # letter indices, rightmost applied first


@dataclass(frozen=True)
class GroupPresentation:
    """Group generated by ``generators``, enumerated up to ``max_word_length``.

    Words are spelled in the alphabet ``g0, g0^-1, g1, g1^-1, ...``; the
    letter index ``2 k`` is ``g_k`` and ``2 k + 1`` its inverse.
    """

    generators: tuple = ()
    max_word_length: int = 6

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if self.max_word_length < 0:
            raise ValueError("max_word_length must be nonnegative")

    @property
    def is_trivial(self):
        return len(self.generators) == 0

    @cached_property
    def letters(self):
        out = []
        for g in self.generators:
            out.extend([g, g.inverse()])
        return tuple(out)

    def truncated(self, max_word_length):
        return GroupPresentation(self.generators, max_word_length)

    @cached_property
    def elements(self):
        """Distinct elements of word length <= max_word_length, breadth first.

        Within one word length, elements appear in lexicographic order of
        (parent position, letter index); the identity comes first.
        """
        found = [GroupElement(MobiusTransform.identity(), ())]
        a_seen, rot_seen = [0j], [1 + 0j]
        frontier = list(found)
        for _ in range(self.max_word_length):
            nxt = []
            A, R = np.array(a_seen), np.array(rot_seen)
            for parent in frontier:
                for k, letter in enumerate(self.letters):
                    g = compose(letter, parent.transform)
                    rot = cmath.exp(1j * g.theta)
                    if np.min(np.abs(A - g.a) + np.abs(R - rot)) < PARAM_TOL:
                        continue
                    if any(g.param_distance(e.transform) < PARAM_TOL for e in nxt):
                        continue
                    elem = GroupElement(g, (k,) + parent.word)
                    found.append(elem)
                    nxt.append(elem)
                    a_seen.append(g.a)
                    rot_seen.append(rot)
            if not nxt:
                break
            frontier = nxt
        return tuple(found)

    def non_identity(self):
        return self.elements[1:]

    @cached_property
    def exhausted(self):
        """True if enumeration closed up before reaching the word-length limit."""
        if self.is_trivial:
            return True
        return max(len(e.word) for e in self.elements) < self.max_word_length

    @cached_property
    def _params(self):
        a = np.array([e.transform.a for e in self.elements])
        rot = np.exp(1j * np.array([e.transform.theta for e in self.elements]))
        return a, rot

    def images(self, z):
        """Array of shape ``(n_elements,) + shape(z)`` with every element applied to ``z``."""
        z = as_disk_points(z)
        a, rot = self._params
        a = a.reshape((-1,) + (1,) * z.ndim)
        rot = rot.reshape(a.shape)
        return rot * (z - a) / (1.0 - np.conj(a) * z)

    def word_lengths(self):
        return np.array([len(e.word) for e in self.elements])

    def to_dict(self):
        return {"generators": [g.to_dict() for g in self.generators],
                "max_word_length": self.max_word_length}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(MobiusTransform.from_dict(g) for g in d.get("generators", [])),
                   int(d.get("max_word_length", 6)))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Orbit:
    base: complex
    points: tuple
    word_lengths: tuple

    def as_array(self):
        return np.array(self.points, dtype=complex)


def enumerate_orbit(group: GroupPresentation, z0) -> Orbit:
    """Distinct images of ``z0`` under words of length <= max_word_length."""
    z0 = complex(as_disk_points(z0, "z0"))
    points, lengths = [], []
    for elem in group.elements:
        w = elem.transform(z0)
        if any(abs(w - p) < PARAM_TOL for p in points):
            continue
        points.append(w)
        lengths.append(len(elem.word))
    return Orbit(z0, tuple(points), tuple(lengths))


def bisector_half_plane_contains(g: MobiusTransform, zeta, z, tol=1e-12):
    """Whether ``z`` lies strictly on the ``zeta`` side of the bisector of ``[zeta, g(zeta)]``.

    Points whose two distances agree within ``tol`` count as boundary
    points and are reported as outside.
    """
    gz = g(zeta)
    if hyp_distance(zeta, gz) < 1e-14:
        raise DegenerateError("element fixes zeta; half-plane undefined")
    result = np.asarray(hyp_distance(z, zeta)) < np.asarray(hyp_distance(z, gz)) - tol
    return bool(result) if result.ndim == 0 else result
