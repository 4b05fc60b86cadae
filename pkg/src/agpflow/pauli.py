"""Exact algebra for translation-invariant Pauli-string operators.

Operators live on an infinite spin-1/2 chain.  A single string is a tuple of
letters (0=I, 1=X, 2=Y, 3=Z) anchored so that the first and last letters are
non-identity; the unique empty tuple is the identity string.  A ``TransOp`` is
a complex linear combination of anchored strings, each standing for the
zero-momentum sum of the string over all lattice translations.

Inner products are normalized per site and per Hilbert-space dimension, so
``trans_inner(a, b)`` equals ``Tr(a^dag b) / (L 2^L)`` for any periodic chain
long enough to avoid wrap-around (L >= 2*support + 2 is always safe).  Under
this convention the anchored strings form an orthonormal set.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Union

LETTERS = "IXYZ"

#: coefficients below this magnitude are dropped after arithmetic
CLEANUP_TOL = 1e-14

# single-site products sigma_a sigma_b = phase * sigma_c, indexed [a][b]
_MUL = (
    (0, 1, 2, 3),
    (1, 0, 3, 2),
    (2, 3, 0, 1),
    (3, 2, 1, 0),
)
_PHASE = (
    (1, 1, 1, 1),
    (1, 1, 1j, -1j),
    (1, -1j, 1, 1j),
    (1, 1j, -1j, 1),
)

Word = "tuple[int, ...]"
WordLike = Union[str, Iterable[int]]


def parse_word(text: str) -> tuple:
    """Convert a letter string like ``'YZ'`` or ``'XIZ'`` to a letter tuple."""
    try:
        return tuple(LETTERS.index(ch) for ch in text)
    except ValueError:
        raise ValueError(f"invalid Pauli letter in {text!r}") from None


def word_str(word) -> str:
    """Inverse of :func:`parse_word`; the identity word renders as ``'I'``."""
    if not word:
        return "I"
    return "".join(LETTERS[l] for l in word)


def _strip(letters: tuple) -> tuple:
    i, j = 0, len(letters)
    while i < j and letters[i] == 0:
        i += 1
    while j > i and letters[j - 1] == 0:
        j -= 1
    return letters[i:j]


def _as_word(word: WordLike) -> tuple:
    if isinstance(word, str):
        word = parse_word(word)
    word = tuple(word)
    if any(l not in (0, 1, 2, 3) for l in word):
        raise ValueError(f"letters must be in 0..3, got {word}")
    return word


@dataclass(frozen=True)
class PauliWord:
    """One Pauli string with a scalar prefactor.

    Canonicalized on construction: identity letters are stripped from both
    ends (a pure translation, so the zero-momentum object is unchanged).
    """

    letters: tuple
    phase: complex = 1.0 + 0j

    def __post_init__(self):
        object.__setattr__(self, "letters", _strip(_as_word(self.letters)))
        object.__setattr__(self, "phase", complex(self.phase))

    @property
    def support(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def __str__(self):
        return f"({self.phase:g})*{word_str(self.letters)}"


def word_product(a: PauliWord, b: PauliWord, offset: int = 0) -> PauliWord:
    """Product of ``a`` with ``b`` translated by ``offset`` sites.

    The result is re-anchored and carries the accumulated phase.
    """
    wa, wb = a.letters, b.letters
    lo = min(0, offset)
    hi = max(len(wa), offset + len(wb))
    phase = a.phase * b.phase
    out = []
    for pos in range(lo, hi):
        x = wa[pos] if 0 <= pos < len(wa) else 0
        k = pos - offset
        y = wb[k] if 0 <= k < len(wb) else 0
        out.append(_MUL[x][y])
        phase *= _PHASE[x][y]
    return PauliWord(tuple(out), phase)


def _aligned_product(wa: tuple, wb: tuple, offset: int):
    """Letters and phase of wa * translate(wb, offset), not yet stripped."""
    lo = min(0, offset)
    hi = max(len(wa), offset + len(wb))
    phase = 1 + 0j
    out = []
    la, lb = len(wa), len(wb)
    for pos in range(lo, hi):
        x = wa[pos] if 0 <= pos < la else 0
        k = pos - offset
        y = wb[k] if 0 <= k < lb else 0
        out.append(_MUL[x][y])
        phase *= _PHASE[x][y]
    return tuple(out), phase


class TransOp:
    """Immutable zero-momentum operator: {anchored word -> complex coefficient}.

    Keys are canonical (non-identity letters at both ends, unit phase); any
    phase or anchoring in the input is folded into the coefficients.  The
    identity string is rejected: its translation sum is ``L * Id``, which has
    no L-independent meaning in this algebra.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        data = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for word, coeff in items:
                word = _strip(_as_word(word))
                c = data.get(word, 0j) + complex(coeff)
                data[word] = c
        for w in [w for w, c in data.items() if abs(c) < CLEANUP_TOL]:
            del data[w]
        if () in data:
            raise ValueError("identity word is not representable as a TransOp")
        self._terms = data

    @classmethod
    def _make(cls, data: dict) -> "TransOp":
        # internal fast path: keys already canonical
        op = object.__new__(cls)
        op._terms = {w: c for w, c in data.items() if abs(c) >= CLEANUP_TOL}
        return op

    @classmethod
    def zero(cls) -> "TransOp":
        return cls._make({})

    # -- inspection -------------------------------------------------------

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def coeff(self, word: WordLike) -> complex:
        return self._terms.get(_strip(_as_word(word)), 0j)

    @property
    def support(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def words(self):
        return sorted(self._terms, key=lambda w: (len(w), w))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        # anchored words are Hermitian matrices, so Hermitian <=> real coeffs
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def allclose(self, other: "TransOp", tol: float = 1e-12) -> bool:
        words = set(self._terms) | set(other._terms)
        return all(
            abs(self._terms.get(w, 0j) - other._terms.get(w, 0j)) <= tol
            for w in words
        )

    def norm(self) -> float:
        return sum(abs(c) ** 2 for c in self._terms.values()) ** 0.5

    # -- linear structure --------------------------------------------------

    def __add__(self, other: "TransOp") -> "TransOp":
        data = dict(self._terms)
        for w, c in other._terms.items():
            data[w] = data.get(w, 0j) + c
        return TransOp._make(data)

    def __sub__(self, other: "TransOp") -> "TransOp":
        data = dict(self._terms)
        for w, c in other._terms.items():
            data[w] = data.get(w, 0j) - c
        return TransOp._make(data)

    def __mul__(self, scalar) -> "TransOp":
        s = complex(scalar)
        return TransOp._make({w: s * c for w, c in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "TransOp":
        return TransOp._make({w: -c for w, c in self._terms.items()})

    def dagger(self) -> "TransOp":
        return TransOp._make({w: c.conjugate() for w, c in self._terms.items()})

    def __repr__(self):
        if not self._terms:
            return "TransOp(0)"
        parts = [
            f"({self._terms[w]:.6g})*{word_str(w)}" for w in self.words()[:6]
        ]
        tail = " + ..." if len(self._terms) > 6 else ""
        return "TransOp(" + " + ".join(parts) + tail + ")"

    # -- serialization -----------------------------------------------------

    def to_json_terms(self) -> list:
        """JSON-friendly term list: left-anchored word strings + re/im parts."""
        return [
            {
                "word": word_str(w),
                "coeff_re": self._terms[w].real,
                "coeff_im": self._terms[w].imag,
            }
            for w in self.words()
        ]

    @classmethod
    def from_json_terms(cls, items) -> "TransOp":
        return cls(
            {
                item["word"]: complex(item["coeff_re"], item.get("coeff_im", 0.0))
                for item in items
            }
        )


def trans_commutator(a: TransOp, b: TransOp) -> TransOp:
    """Zero-momentum commutator of two TransOps, exact (no truncation).

    Sums the local commutator over every relative translation where the
    supports overlap; disjoint supports commute and are skipped.
    """
    out: dict = {}
    for wa, ca in a._terms.items():
        la = len(wa)
        for wb, cb in b._terms.items():
            lb = len(wb)
            cab = ca * cb
            for off in range(1 - lb, la):
                letters, phase = _aligned_product(wa, wb, off)
                im = phase.imag
                # Hermitian unit-phase words: the reversed product carries the
                # conjugate phase, so [wa, wb] = 2i Im(phase) * word
                if im == 0.0:
                    continue
                w = _strip(letters)
                out[w] = out.get(w, 0j) + 2j * im * cab
    return TransOp._make(out)


def trans_inner(a: TransOp, b: TransOp) -> complex:
    """Per-site normalized Frobenius inner product <a, b> = sum conj(a_w) b_w."""
    ta, tb = a._terms, b._terms
    if len(tb) < len(ta):
        return sum(ta[w].conjugate() * c for w, c in tb.items() if w in ta)
    return sum(c.conjugate() * tb[w] for w, c in ta.items() if w in tb)


def build_hamiltonian(h: float, g: float) -> TransOp:
    """Ising chain ZZ + h*Z + g*X (the ZZ coupling is fixed to 1)."""
    return TransOp({(3, 3): 1.0, (3,): float(h), (1,): float(g)})
