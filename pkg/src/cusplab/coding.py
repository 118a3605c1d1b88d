"""Ping-pong groups generated by parabolics, word and block coding.

Free group words over p_1..p_r are coded by blocks: parabolic powers
p_i^n with |n| >= 2 and "level 1" words (all run lengths 1).  A block word
is admissible when consecutive blocks have distinct junction indices and no
two level-1 blocks are adjacent; the second clause is what the interval
dynamics K_beta encodes (after a level-1 block the next limit point lies in
an I'-arc, which only power blocks produce), and it is exactly what makes
the block decomposition of a group element unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import (
    TWO_PI,
    BoundaryPoint,
    DiskPoint,
    Isometry,
    compose_many,
    norm_angle,
    parabolic_from_points,
)

Letter = Tuple[int, int]  # (generator index >= 1, sign +-1)


class CodingError(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    """Reduced word in the generators: letters (index, sign)."""

    letters: Tuple[Letter, ...]

    def __post_init__(self):
        prev = None
        for (i, s) in self.letters:
            if i < 1 or s not in (-1, 1):
                raise CodingError(f"bad letter ({i}, {s})")
            if prev is not None and prev[0] == i and prev[1] == -s:
                raise CodingError("word is not reduced")
            prev = (i, s)

    def __len__(self):
        return len(self.letters)

    @property
    def first_index(self) -> int:
        return self.letters[0][0]

    @property
    def last_index(self) -> int:
        return self.letters[-1][0]

    def inverse(self) -> "Word":
        return Word(tuple((i, -s) for (i, s) in reversed(self.letters)))

    def concat(self, other: "Word") -> "Word":
        """Product with free reduction at the seam."""
        left = list(self.letters)
        right = list(other.letters)
        while left and right and left[-1][0] == right[0][0] and left[-1][1] == -right[0][1]:
            left.pop()
            right.pop(0)
        return Word(tuple(left + right))

    def is_level1(self) -> bool:
        return all(abs(l) == 1 for (_, l) in powers_decomposition(self))


def word_from_string(s: str) -> Word:
    """Parse e.g. '1 2 -1' as p1 p2 p1^{-1}."""
    letters = []
    for tok in s.split():
        v = int(tok)
        letters.append((abs(v), 1 if v > 0 else -1))
    return Word(tuple(letters))


def powers_decomposition(w: Word) -> List[Tuple[int, int]]:
    """Maximal runs (i_j, signed exponent), adjacent indices distinct."""
    runs: List[Tuple[int, int]] = []
    for (i, s) in w.letters:
        if runs and runs[-1][0] == i:
            runs[-1] = (i, runs[-1][1] + s)
        else:
            runs.append((i, s))
    return runs


@dataclass(frozen=True)
class Block:
    """Letter of the block alphabet: a parabolic power or a level-1 word."""

    kind: str                      # "power" | "level1"
    index: int = 0                 # generator index, power blocks only
    n: int = 0                     # exponent, |n| >= 2, power blocks only
    word: Optional[Word] = None    # level-1 blocks only

    def __post_init__(self):
        if self.kind == "power":
            if abs(self.n) < 2:
                raise CodingError("power block needs |n| >= 2")
        elif self.kind == "level1":
            if self.word is None or len(self.word) == 0:
                raise CodingError("level1 block needs a nonempty word")
            if not self.word.is_level1():
                raise CodingError("level1 block contains a power run")
        else:
            raise CodingError(f"unknown block kind {self.kind!r}")

    @property
    def first_index(self) -> int:
        return self.index if self.kind == "power" else self.word.first_index

    @property
    def last_index(self) -> int:
        return self.index if self.kind == "power" else self.word.last_index

    @property
    def letters(self) -> Tuple[Letter, ...]:
        if self.kind == "power":
            s = 1 if self.n > 0 else -1
            return tuple((self.index, s) for _ in range(abs(self.n)))
        return self.word.letters

    def inverse(self) -> "Block":
        if self.kind == "power":
            return Block("power", self.index, -self.n)
        return Block("level1", word=self.word.inverse())

    def sort_key(self):
        if self.kind == "level1":
            return (0, len(self.word), tuple((i, 0 if s > 0 else 1) for (i, s) in self.word.letters))
        return (1, self.index, abs(self.n), 0 if self.n > 0 else 1)


def power_block(index: int, n: int) -> Block:
    return Block("power", index, n)


def level1_block(w: Word) -> Block:
    return Block("level1", word=w)


BlockWord = Tuple[Block, ...]


def block_decomposition(w: Word) -> BlockWord:
    """The unique block coding: exponents |l| >= 2 become power blocks and
    maximal level-1 stretches in between become level-1 blocks."""
    if len(w) == 0:
        raise CodingError("empty word has no block decomposition")
    blocks: List[Block] = []
    buf: List[Letter] = []
    for (i, l) in powers_decomposition(w):
        if abs(l) >= 2:
            if buf:
                blocks.append(level1_block(Word(tuple(buf))))
                buf = []
            blocks.append(power_block(i, l))
        else:
            buf.append((i, l))
    if buf:
        blocks.append(level1_block(Word(tuple(buf))))
    return tuple(blocks)


def blocks_to_word(blocks: Sequence[Block]) -> Word:
    out = Word(())
    for b in blocks:
        out = out.concat(Word(b.letters))
    return out


def can_follow(first: Block, second: Block) -> bool:
    """Whether `second` may follow `first` in an admissible block word."""
    if first.last_index == second.first_index:
        return False
    if first.kind == "level1" and second.kind == "level1":
        return False
    return True


def is_admissible(blocks: Sequence[Block]) -> bool:
    """Admissibility of a block word.

    Consecutive blocks must have distinct junction indices, and two level-1
    blocks may not be adjacent (their concatenation would itself be level 1,
    breaking uniqueness of the decomposition; geometrically, the image of a
    level-1 block never lands in the I'-arcs that feed another one).
    """
    return all(can_follow(a, b) for a, b in zip(blocks, blocks[1:]))


def block_length(blocks: Sequence[Block]) -> int:
    return len(blocks)


# ---------------------------------------------------------------------------
# boundary arcs


@dataclass(frozen=True)
class Arc:
    """Half-open counterclockwise arc [lo, hi) of the circle."""

    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", norm_angle(self.lo))
        object.__setattr__(self, "hi", norm_angle(self.hi))

    @property
    def length(self) -> float:
        return norm_angle(self.hi - self.lo) or TWO_PI

    def contains(self, theta) -> np.ndarray:
        rel = np.mod(np.asarray(theta, dtype=float) - self.lo, TWO_PI)
        return rel < self.length

    def contains_point(self, x: BoundaryPoint) -> bool:
        return bool(self.contains(x.theta))

    def midpoint(self) -> BoundaryPoint:
        return BoundaryPoint(self.lo + 0.5 * self.length)

    def sample(self, n: int) -> np.ndarray:
        eps = 1e-9 * self.length
        return self.lo + np.linspace(eps, self.length - eps, n)


@dataclass(frozen=True)
class GroupSpec:
    """The free group generated by r parabolics in ping-pong position."""

    r: int
    xi: Tuple[BoundaryPoint, ...]       # xi_1..xi_r
    eta: Tuple[BoundaryPoint, ...]      # eta_1..eta_r (eta_0 = eta_r)
    gens: Tuple[Isometry, ...]          # p_1..p_r
    p0: Isometry                        # p_r ... p_1
    arcs_I: Tuple[Arc, ...]             # I_1..I_r, a partition of the circle
    arcs_Ip: Tuple[Arc, ...]            # I'_1..I'_r, I'_i inside I_i
    _block_cache: Dict = field(default_factory=dict, repr=False, compare=False)

    def generator(self, i: int) -> Isometry:
        return self.gens[i - 1]

    def eta_prev(self, i: int) -> BoundaryPoint:
        return self.eta[i - 2] if i >= 2 else self.eta[self.r - 1]

    def word_isometry(self, w: Word) -> Isometry:
        parts = [self.generator(i).power(l) for (i, l) in powers_decomposition(w)]
        return compose_many(parts)

    def block_isometry(self, b: Block) -> Isometry:
        key = (b.kind, b.index, b.n, b.word.letters if b.word else None)
        got = self._block_cache.get(key)
        if got is None:
            if b.kind == "power":
                got = self.generator(b.index).power(b.n)
            else:
                got = self.word_isometry(b.word)
            self._block_cache[key] = got
        return got

    def blocks_isometry(self, blocks: Sequence[Block]) -> Isometry:
        return compose_many(self.block_isometry(b) for b in blocks)

    def parabolic_classes(self) -> List[str]:
        return [f"P{i}" for i in range(self.r + 1)]


def _cyclically_increasing(angles: Sequence[float]) -> bool:
    a = [norm_angle(t) for t in angles]
    shift = a.index(min(a))
    b = a[shift:] + a[:shift]
    return all(x < y for x, y in zip(b, b[1:]))


def build_group(anchor_angles: Sequence[float], verify: bool = True) -> GroupSpec:
    """Build the ping-pong group from anchors (xi_1, eta_1, ..., xi_r, eta_r).

    Each p_i is the parabolic fixing xi_i with p_i eta_{i-1} = eta_i, where
    eta_0 = eta_r.  The I_i partition the circle and the I'_i nest inside
    them; the two ping-pong inclusions are spot-checked on arc samples.
    """
    if len(anchor_angles) % 2 != 0 or len(anchor_angles) < 4:
        raise CodingError("need 2r anchor angles, r >= 2")
    r = len(anchor_angles) // 2
    if not _cyclically_increasing(anchor_angles):
        raise CodingError("anchor angles are not in strict cyclic order")
    xi = tuple(BoundaryPoint(anchor_angles[2 * i]) for i in range(r))
    eta = tuple(BoundaryPoint(anchor_angles[2 * i + 1]) for i in range(r))

    gens = []
    for i in range(1, r + 1):
        prev = eta[i - 2] if i >= 2 else eta[r - 1]
        gens.append(parabolic_from_points(xi[i - 1], prev, eta[i - 1]))
    gens = tuple(gens)
    p0 = compose_many(reversed(gens))
    if not p0.is_parabolic(eps=1e-7):
        raise CodingError("p_0 = p_r ... p_1 is not parabolic")

    arcs_I = []
    arcs_Ip = []
    for i in range(1, r + 1):
        prev = eta[i - 2] if i >= 2 else eta[r - 1]
        arc = Arc(prev.theta, eta[i - 1].theta)
        g = gens[i - 1]
        arc_p = Arc(g.inverse()(prev).theta, g(eta[i - 1]).theta)
        if not arc.contains_point(xi[i - 1]) or not arc_p.contains_point(xi[i - 1]):
            raise CodingError(f"interval I_{i} does not contain xi_{i}")
        if arc_p.length >= arc.length:
            raise CodingError(f"I'_{i} is not strictly inside I_{i}")
        arcs_I.append(arc)
        arcs_Ip.append(arc_p)

    spec = GroupSpec(r, xi, eta, gens, p0, tuple(arcs_I), tuple(arcs_Ip))
    if verify:
        verify_ping_pong(spec)
    return spec


def verify_ping_pong(spec: GroupSpec, powers=(2, 3), level1_len: int = 2,
                     samples: int = 7) -> None:
    """Spot-check the two ping-pong inclusions on arc samples."""
    blocks: List[Block] = []
    for i in range(1, spec.r + 1):
        for n in powers:
            blocks.append(power_block(i, n))
            blocks.append(power_block(i, -n))
    for w in level1_words(spec.r, level1_len):
        blocks.append(level1_block(w))

    for b in blocks:
        g = spec.block_isometry(b)
        if b.kind == "level1":
            # beta . I'_i subset I_{i_beta} for i != l_beta
            target = spec.arcs_I[b.first_index - 1]
            sources = [spec.arcs_Ip[j] for j in range(spec.r) if j + 1 != b.last_index]
        else:
            # beta . I_i subset I'_l for i != l
            target = spec.arcs_Ip[b.index - 1]
            sources = [spec.arcs_I[j] for j in range(spec.r) if j + 1 != b.index]
        for arc in sources:
            imgs = g.apply_angle(arc.sample(samples))
            if not np.all(target.contains(imgs)):
                raise CodingError(
                    f"ping-pong inclusion fails for block {b} on arc {arc}")


def level1_words(r: int, max_len: int) -> Iterator[Word]:
    """All level-1 words of length <= max_len, in deterministic order."""
    def extend(prefix: List[Letter]):
        if prefix:
            yield Word(tuple(prefix))
        if len(prefix) >= max_len:
            return
        for i in range(1, r + 1):
            if prefix and prefix[-1][0] == i:
                continue
            for s in (1, -1):
                prefix.append((i, s))
                yield from extend(prefix)
                prefix.pop()

    yield from extend([])


def k_gamma(spec: GroupSpec, blocks: Sequence[Block]) -> Tuple[Arc, ...]:
    """The compact attachment set K_gamma as a tuple of arcs."""
    last = blocks[-1]
    if last.kind == "level1":
        pool = spec.arcs_Ip
    else:
        pool = spec.arcs_I
    l = last.last_index
    return tuple(a for j, a in enumerate(pool) if j + 1 != l)


def in_k_gamma(spec: GroupSpec, blocks: Sequence[Block], theta) -> np.ndarray:
    out = np.zeros_like(np.asarray(theta, dtype=float), dtype=bool)
    for a in k_gamma(spec, blocks):
        out |= a.contains(theta)
    return out


def j_gamma_arc_index(spec: GroupSpec, blocks: Sequence[Block]) -> int:
    """Index i such that J_gamma lies inside I_i (or I'_i for a power start)."""
    return blocks[0].first_index


# ---------------------------------------------------------------------------
# truncated alphabet and enumeration


@dataclass(frozen=True)
class TruncatedAlphabet:
    """Power blocks with 2 <= |n| <= n_max and level-1 blocks of length
    <= m_max, in the canonical deterministic order."""

    r: int
    n_max: int
    m_max: int
    blocks: Tuple[Block, ...]

    @staticmethod
    def build(r: int, n_max: int, m_max: int) -> "TruncatedAlphabet":
        blocks: List[Block] = [level1_block(w) for w in level1_words(r, m_max)]
        for i in range(1, r + 1):
            for n in range(2, n_max + 1):
                blocks.append(power_block(i, n))
                blocks.append(power_block(i, -n))
        blocks.sort(key=Block.sort_key)
        return TruncatedAlphabet(r, n_max, m_max, tuple(blocks))

    def __len__(self):
        return len(self.blocks)


@dataclass(frozen=True)
class Budget:
    """Enumeration budget: a hard block-count cap, optionally a distance cap
    pruned through the almost-additive lower bound."""

    max_blocks: int
    max_distance: Optional[float] = None
    junction: float = 0.0

    def __post_init__(self):
        if self.max_blocks < 1:
            raise CodingError("budget needs max_blocks >= 1")


def enumerate_admissible(spec: GroupSpec, alphabet: TruncatedAlphabet,
                         budget: Budget,
                         block_distance=None,
                         last_index: Optional[int] = None) -> Iterator[BlockWord]:
    """Every admissible block word within the budget, exactly once, in
    deterministic lexicographic order.

    With a distance budget, a prefix is pruned through the certified lower
    bound sum(d(beta_i)) - (m-1) C; power families are scanned in increasing
    |n| so the n-loop can break as soon as the bound disqualifies both signs.
    `last_index` restricts to words whose final letter has that index.
    """
    if budget.max_distance is not None and block_distance is None:
        raise CodingError("distance budget requires a block_distance function")

    level1 = [b for b in alphabet.blocks if b.kind == "level1"]
    powers: Dict[int, List[Block]] = {}
    for b in alphabet.blocks:
        if b.kind == "power":
            powers.setdefault(b.index, []).append(b)
    for fam in powers.values():
        fam.sort(key=lambda b: (abs(b.n), 0 if b.n > 0 else 1))

    dmin = 0.0
    if budget.max_distance is not None:
        dmin = min(block_distance(b) for b in alphabet.blocks)
    slack_per_block = min(0.0, dmin - budget.junction)

    R = budget.max_distance
    C = budget.junction
    kmax = budget.max_blocks
    prefix: List[Block] = []

    def lb_after(total: float, m: int) -> float:
        # certified lower bound for any admissible completion
        return total - max(0, m - 1) * C + (kmax - m) * slack_per_block

    def emit_ok(b: Block) -> bool:
        return last_index is None or b.last_index == last_index

    def rec(total: float) -> Iterator[BlockWord]:
        m = len(prefix)
        prev = prefix[-1] if prefix else None

        for b in level1:
            if prev is not None and not can_follow(prev, b):
                continue
            d = block_distance(b) if R is not None else 0.0
            if R is not None and lb_after(total + d, m + 1) > R:
                continue
            prefix.append(b)
            if emit_ok(b):
                yield tuple(prefix)
            if m + 1 < kmax:
                yield from rec(total + d)
            prefix.pop()

        for idx in sorted(powers):
            if prev is not None and prev.last_index == idx:
                continue
            fam = powers[idx]
            for pos in range(0, len(fam), 2):
                pair = fam[pos:pos + 2]
                if R is not None:
                    d0 = block_distance(pair[0])
                    if lb_after(total + d0, m + 1) > R:
                        break  # |n| only grows from here
                for b in pair:
                    d = block_distance(b) if R is not None else 0.0
                    if R is not None and lb_after(total + d, m + 1) > R:
                        continue
                    prefix.append(b)
                    if emit_ok(b):
                        yield tuple(prefix)
                    if m + 1 < kmax:
                        yield from rec(total + d)
                    prefix.pop()

    yield from rec(0.0)


def count_admissible(alphabet: TruncatedAlphabet, k: int) -> int:
    """Number of admissible words of block length exactly k, by the
    transfer-matrix method over the can_follow adjacency."""
    n = len(alphabet.blocks)
    if k == 0:
        return 1
    adj = np.zeros((n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            if can_follow(alphabet.blocks[a], alphabet.blocks[b]):
                adj[a, b] = 1
            else:
                adj[a, b] = 0
    vec = np.ones(n, dtype=object)
    for _ in range(k - 1):
        vec = adj @ vec
    return int(np.sum(vec))


# ---------------------------------------------------------------------------
# limit points and the boundary shift


def limit_point(spec: GroupSpec, blocks: Iterable[Block], tol: float = 1e-12,
                n_max: int = 200) -> BoundaryPoint:
    """pi(beta_bar) = lim beta_1 ... beta_n x0, by radial projection of the
    orbit of the origin; converges geometrically for admissible sequences."""
    g = Isometry.identity()
    prev_theta = None
    n = 0
    for b in blocks:
        n += 1
        g = g.compose(spec.block_isometry(b)).renormalize()
        z = g.apply_complex(0j)
        if abs(z) < 1e-12:
            continue
        theta = math.atan2(z.imag, z.real)
        if prev_theta is not None:
            d = abs(norm_angle(theta - prev_theta))
            d = min(d, TWO_PI - d)
            if d < tol and abs(z) > 0.99:
                return BoundaryPoint(theta)
        prev_theta = theta
        if n >= n_max:
            raise CodingError(
                f"limit point did not converge within {n_max} blocks; "
                "ping-pong configuration may be broken")
    # finite sequences: return the current boundary estimate
    if prev_theta is None:
        raise CodingError("empty block sequence has no limit point")
    return BoundaryPoint(prev_theta)


@dataclass(frozen=True)
class CodedPoint:
    """A boundary point together with its (finite or truncated) block code."""

    point: BoundaryPoint
    code: BlockWord


def shift(spec: GroupSpec, x: CodedPoint) -> CodedPoint:
    """T drops the first block and moves the point by its inverse."""
    if not x.code:
        raise CodingError("cannot shift an empty code")
    b = x.code[0]
    g = spec.block_isometry(b).inverse()
    return CodedPoint(g(x.point), x.code[1:])
