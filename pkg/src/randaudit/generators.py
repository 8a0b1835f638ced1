"""Deterministic pseudo-random word generators behind one interface.

Every generator is a finite-state machine that emits fixed-width unsigned
words.  Equal construction arguments always yield equal output sequences;
`clone()` snapshots the full state so two copies evolve identically.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import ScriptedExhaustedError

__all__ = [
    "Seed",
    "LcgParams",
    "RANDU",
    "full_period",
    "Generator",
    "LcgGenerator",
    "WichmannHillGenerator",
    "Mt19937Generator",
    "HashCounterGenerator",
    "ScriptedGenerator",
    "digest_words",
    "seed_generator",
    "from_spec",
    "load_scripted",
    "load_seed",
]


# ---------------------------------------------------------------------------
# Seeds

@dataclass(frozen=True)
class Seed:
    """Seed material as raw bytes plus a lossless human-readable form.

    The human form is the UTF-8 text itself when the bytes decode to
    printable text (and would not be mistaken for the hex escape), and
    ``hex:<digits>`` otherwise.
    """

    data: bytes

    def __post_init__(self):
        if not isinstance(self.data, bytes):
            raise TypeError("Seed.data must be bytes")

    @classmethod
    def from_text(cls, text: str) -> "Seed":
        return cls(text.encode("utf-8"))

    @classmethod
    def from_int(cls, value: int) -> "Seed":
        if value < 0:
            raise ValueError("integer seeds must be nonnegative")
        return cls.from_text(str(value))

    @classmethod
    def parse(cls, human: str) -> "Seed":
        if human.startswith("hex:"):
            return cls(bytes.fromhex(human[4:]))
        return cls.from_text(human)

    @property
    def human(self) -> str:
        try:
            text = self.data.decode("utf-8")
        except UnicodeDecodeError:
            return "hex:" + self.data.hex()
        if text and text.isprintable() and not text.startswith("hex:"):
            return text
        return "hex:" + self.data.hex()


# ---------------------------------------------------------------------------
# LCG parameters and the full-period predicate

@dataclass(frozen=True)
class LcgParams:
    """Constants of the recurrence x -> (a*x + c) mod m."""

    m: int
    a: int
    c: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("modulus m must be >= 2")
        if not 0 < self.a < self.m:
            raise ValueError("multiplier a must satisfy 0 < a < m")
        if not 0 <= self.c < self.m:
            raise ValueError("increment c must satisfy 0 <= c < m")

    @property
    def width(self) -> int:
        # ceil(log2(m)): registers fit in this many bits
        return (self.m - 1).bit_length()


RANDU = LcgParams(m=2 ** 31, a=65539, c=0)


def _prime_factors(n: int) -> list[int]:
    from sympy import factorint

    return sorted(factorint(n))


def full_period(params: LcgParams) -> bool:
    """Hull-Dobell test: does the LCG visit all m states from every seed?

    True iff c and m are coprime, a-1 is divisible by every prime factor
    of m, and a-1 is divisible by 4 when m is.
    """
    import math

    a, c, m = params.a, params.c, params.m
    if math.gcd(c, m) != 1:
        return False
    b = a - 1
    if any(b % p for p in _prime_factors(m)):
        return False
    if m % 4 == 0 and b % 4 != 0:
        return False
    return True


# ---------------------------------------------------------------------------
# Generator interface

class Generator:
    """Base class for fixed-width word emitters.

    Subclasses set ``width`` and implement ``next_word``.  A generator is
    advanced by exactly one logical thread at a time; frozen states may be
    read concurrently but no internal locking is provided.
    """

    width: int
    words_emitted: int

    def next_word(self) -> int:
        raise NotImplementedError

    def next_fraction(self) -> float:
        """The next word normalized to [0, 1) as word / 2**width."""
        return self.next_word() / (1 << self.width)

    def words(self, count: int) -> list[int]:
        nw = self.next_word
        return [nw() for _ in range(count)]

    def clone(self) -> "Generator":
        import copy

        return copy.deepcopy(self)

    def spec(self) -> dict:
        """Construction record sufficient to rebuild this generator from
        scratch (initial seed, not the current registers)."""
        raise NotImplementedError


class LcgGenerator(Generator):
    """Linear congruential generator; each emitted word is the new register."""

    def __init__(self, params: LcgParams, seed: int):
        if not 0 <= seed < params.m:
            raise ValueError(f"seed must be in [0, {params.m})")
        self.params = params
        self.width = params.width
        self._seed = seed
        self._x = seed
        self.words_emitted = 0

    @property
    def register(self) -> int:
        return self._x

    def next_word(self) -> int:
        p = self.params
        self._x = (p.a * self._x + p.c) % p.m
        self.words_emitted += 1
        return self._x

    def spec(self) -> dict:
        p = self.params
        return {"variant": "lcg", "m": p.m, "a": p.a, "c": p.c, "seed": self._seed}


WH_MODULI = (30269, 30307, 30323)
WH_MULTIPLIERS = (171, 172, 170)
_WH_D = WH_MODULI[0] * WH_MODULI[1] * WH_MODULI[2]


class WichmannHillGenerator(Generator):
    """Sum of three multiplicative LCGs; native output is a fraction in [0, 1).

    ``next_fraction`` is the native output.  ``next_word`` is a 32-bit
    discretization, floor(fraction * 2**32); it loses the low-order part of
    the native resolution and is provided only so this generator fits the
    common word interface.  Both advance the state once.
    """

    width = 32

    def __init__(self, seed: int | tuple[int, int, int]):
        if isinstance(seed, int):
            if seed < 0:
                raise ValueError("scalar seed must be nonnegative")
            triple = tuple(1 + seed % (m - 1) for m in WH_MODULI)
        else:
            triple = tuple(seed)
        if len(triple) != 3 or any(
            not 1 <= s < m for s, m in zip(triple, WH_MODULI)
        ):
            raise ValueError(f"registers must satisfy 1 <= s_i < {WH_MODULI}")
        self._seed = seed
        self._s = list(triple)
        self.words_emitted = 0

    @property
    def registers(self) -> tuple[int, int, int]:
        return tuple(self._s)

    def _advance(self) -> int:
        """Advance and return the output as an exact numerator over the
        product of the three moduli."""
        s = self._s
        for i in range(3):
            s[i] = WH_MULTIPLIERS[i] * s[i] % WH_MODULI[i]
        m1, m2, m3 = WH_MODULI
        num = (s[0] * m2 * m3 + s[1] * m1 * m3 + s[2] * m1 * m2) % _WH_D
        self.words_emitted += 1
        return num

    def next_fraction(self) -> float:
        return self._advance() / _WH_D

    def next_word(self) -> int:
        # exact integer floor; no float rounding in the discretization
        return self._advance() * (1 << 32) // _WH_D

    def spec(self) -> dict:
        seed = self._seed if isinstance(self._seed, int) else list(self._seed)
        return {"variant": "wichmann_hill", "seed": seed}


class Mt19937Generator(Generator):
    """MT19937 with the standard multiplier-based initialization.

    Integer seeds are reduced modulo 2**32.  No burn-in is applied; the raw
    early output is part of what the audit tooling is meant to expose.
    """

    width = 32
    _N = 624
    _M = 397
    _MATRIX_A = 0x9908B0DF
    _UPPER = 0x80000000
    _LOWER = 0x7FFFFFFF

    def __init__(self, seed: int = 5489):
        if seed < 0:
            raise ValueError("seed must be nonnegative")
        self._seed = seed
        mt = [0] * self._N
        mt[0] = seed & 0xFFFFFFFF
        for i in range(1, self._N):
            mt[i] = (1812433253 * (mt[i - 1] ^ (mt[i - 1] >> 30)) + i) & 0xFFFFFFFF
        self._mt = mt
        self._idx = self._N
        self.words_emitted = 0

    def _twist(self) -> None:
        mt = self._mt
        n, m = self._N, self._M
        upper, lower, mat = self._UPPER, self._LOWER, self._MATRIX_A
        for k in range(n):
            y = (mt[k] & upper) | (mt[(k + 1) % n] & lower)
            v = mt[(k + m) % n] ^ (y >> 1)
            if y & 1:
                v ^= mat
            mt[k] = v
        self._idx = 0

    def next_word(self) -> int:
        if self._idx >= self._N:
            self._twist()
        y = self._mt[self._idx]
        self._idx += 1
        self.words_emitted += 1
        y ^= y >> 11
        y ^= (y << 7) & 0x9D2C5680
        y ^= (y << 15) & 0xEFC60000
        return y ^ (y >> 18)

    def words(self, count: int) -> list[int]:
        # block-tempering is ~2x faster than repeated next_word calls
        out = []
        append = out.append
        while count > 0:
            if self._idx >= self._N:
                self._twist()
            take = min(count, self._N - self._idx)
            for y in self._mt[self._idx : self._idx + take]:
                y ^= y >> 11
                y ^= (y << 7) & 0x9D2C5680
                y ^= (y << 15) & 0xEFC60000
                append(y ^ (y >> 18))
            self._idx += take
            self.words_emitted += take
            count -= take
        return out

    def spec(self) -> dict:
        return {"variant": "mt19937", "seed": self._seed}


def digest_words(
    seed_bytes: bytes, counter: int, width: int = 32, hash_name: str = "sha256"
) -> tuple[int, ...]:
    """All width-bit words of Hash(seed_bytes , "," , decimal(counter)).

    Words are cut from the digest most-significant-bits first; any
    remainder narrower than ``width`` is dropped.  Pure function: equal
    arguments give equal words regardless of query order.
    """
    if counter < 0:
        raise ValueError("counter must be nonnegative")
    h = hashlib.new(hash_name, seed_bytes + b"," + str(counter).encode("ascii"))
    digest = h.digest()
    total_bits = 8 * len(digest)
    value = int.from_bytes(digest, "big")
    mask = (1 << width) - 1
    shifts = range(total_bits - width, -1, -width)
    return tuple((value >> s) & mask for s in shifts)


class HashCounterGenerator(Generator):
    """Counter-mode PRNG over a 256-bit cryptographic hash.

    State is the seed string S plus a counter i starting at 0.  Output
    block i is Hash(S + "," + str(i)); S is UTF-8 text, the separator a
    single ASCII comma, and i unpadded ASCII decimal.  The default hash is
    SHA-256; any hashlib algorithm with a 32-byte digest may be swapped in
    at construction.  Output depends only on (S, i), never on query order.
    """

    def __init__(
        self,
        seed: Seed | str | bytes | int,
        width: int = 32,
        hash_name: str = "sha256",
    ):
        if isinstance(seed, Seed):
            seed_obj = seed
        elif isinstance(seed, bytes):
            seed_obj = Seed(seed)
        elif isinstance(seed, int):
            seed_obj = Seed.from_int(seed)
        else:
            seed_obj = Seed.from_text(seed)
        if not seed_obj.data:
            raise ValueError("hash_counter seed must be nonempty")
        if hashlib.new(hash_name).digest_size != 32:
            raise ValueError(f"{hash_name} is not a 256-bit hash")
        if not 1 <= width <= 256:
            raise ValueError("width must be in [1, 256]")
        self.seed = seed_obj
        self.width = width
        self.hash_name = hash_name
        self.counter = 0
        self._buffer: list[int] = []
        self.words_emitted = 0

    def next_word(self) -> int:
        if not self._buffer:
            block = digest_words(
                self.seed.data, self.counter, self.width, self.hash_name
            )
            self._buffer = list(reversed(block))
            self.counter += 1
        self.words_emitted += 1
        return self._buffer.pop()

    def words(self, count: int) -> list[int]:
        out = []
        data, width, name = self.seed.data, self.width, self.hash_name
        while len(out) < count:
            if self._buffer:
                take = min(count - len(out), len(self._buffer))
                out.extend(self._buffer[-1 : -take - 1 : -1])
                del self._buffer[-take:]
            else:
                block = digest_words(data, self.counter, width, name)
                self.counter += 1
                if len(block) <= count - len(out):
                    out.extend(block)
                else:
                    take = count - len(out)
                    out.extend(block[:take])
                    self._buffer = list(reversed(block[take:]))
        self.words_emitted += count
        return out

    def spec(self) -> dict:
        return {
            "variant": "hash_counter",
            "seed": self.seed.human,
            "width": self.width,
            "hash": self.hash_name,
        }


class ScriptedGenerator(Generator):
    """Replays a fixed word list, then raises ScriptedExhaustedError.

    Recycling never happens silently; pass ``cycles`` > 1 (or None for
    unbounded) to opt in to repeating the script.
    """

    def __init__(self, script: list[int], width: int, cycles: int | None = 1):
        limit = 1 << width
        for w in script:
            if not 0 <= w < limit:
                raise ValueError(f"scripted word {w} does not fit in {width} bits")
        if cycles is not None and cycles < 1:
            raise ValueError("cycles must be >= 1 or None")
        self.script = list(script)
        self.width = width
        self.cycles = cycles
        self._pos = 0
        self.words_emitted = 0

    def next_word(self) -> int:
        n = len(self.script)
        if n == 0 or (self.cycles is not None and self._pos >= n * self.cycles):
            raise ScriptedExhaustedError(
                f"scripted source exhausted after {self._pos} words"
            )
        word = self.script[self._pos % n]
        self._pos += 1
        self.words_emitted += 1
        return word

    def remaining(self) -> int | None:
        if self.cycles is None:
            return None
        return len(self.script) * self.cycles - self._pos

    def spec(self) -> dict:
        return {
            "variant": "scripted",
            "script": list(self.script),
            "width": self.width,
            "cycles": self.cycles,
        }


# ---------------------------------------------------------------------------
# Construction helpers

def seed_generator(variant: str, seed, **kwargs) -> Generator:
    """Build a freshly seeded generator.

    variant: one of lcg | wichmann_hill | mt19937 | hash_counter | scripted.
    LCGs take params=LcgParams(...) or m=, a=, c= keywords; scripted takes
    script= and width=.
    """
    if variant == "lcg":
        params = kwargs.pop("params", None)
        if params is None:
            params = LcgParams(m=kwargs.pop("m"), a=kwargs.pop("a"), c=kwargs.pop("c"))
        return LcgGenerator(params, seed)
    if variant == "wichmann_hill":
        return WichmannHillGenerator(seed)
    if variant == "mt19937":
        return Mt19937Generator(seed)
    if variant == "hash_counter":
        return HashCounterGenerator(seed, **kwargs)
    if variant == "scripted":
        return ScriptedGenerator(kwargs.pop("script"), kwargs.pop("width"), **kwargs)
    raise ValueError(f"unknown generator variant: {variant!r}")


def from_spec(spec: dict) -> Generator:
    """Rebuild a generator from the dict its ``spec()`` method produced."""
    d = dict(spec)
    variant = d.pop("variant")
    if variant == "lcg":
        return LcgGenerator(LcgParams(m=d["m"], a=d["a"], c=d["c"]), d["seed"])
    if variant == "wichmann_hill":
        seed = d["seed"]
        return WichmannHillGenerator(tuple(seed) if isinstance(seed, list) else seed)
    if variant == "mt19937":
        return Mt19937Generator(d["seed"])
    if variant == "hash_counter":
        return HashCounterGenerator(
            Seed.parse(d["seed"]), width=d.get("width", 32), hash_name=d.get("hash", "sha256")
        )
    if variant == "scripted":
        return ScriptedGenerator(d["script"], d["width"], d.get("cycles", 1))
    raise ValueError(f"unknown generator variant: {variant!r}")


# ---------------------------------------------------------------------------
# File formats

def load_scripted(path) -> ScriptedGenerator:
    """Read a scripted source file: a ``width=<w>`` header line followed by
    newline-delimited unsigned decimal words."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("width="):
        raise ValueError("scripted file must start with a width=<w> header")
    width = int(lines[0][len("width="):])
    script = [int(ln) for ln in lines[1:]]
    return ScriptedGenerator(script, width)


def load_seed(path) -> int:
    """Read a seed file: one hex (0x-prefixed) or decimal line; lines
    starting with ``#`` are comments."""
    payload = None
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    for ln in lines:
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if payload is not None:
            raise ValueError("seed file must contain exactly one value line")
        payload = ln
    if payload is None:
        raise ValueError("seed file contains no value")
    return int(payload, 16) if payload.lower().startswith("0x") else int(payload, 10)
