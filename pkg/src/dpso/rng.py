"""Counter-based pseudorandom streams with cheap independent substreams.

The generator is splitmix64: the state walks a Weyl sequence (adds the
golden-ratio increment mod 2**64) and each output is the splitmix64
finalizer applied to the state. Output k is therefore the pure function
mix64(seed + (k+1)*GOLDEN) of the counter, which makes streams trivially
reproducible and lets substreams be derived by re-mixing the seed rather
than by jumping state.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z):
    """splitmix64 finalizer, a bijection on 64-bit words."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def substream_seed(seed, index):
    """Derive the seed of substream `index` of a master seed.

    Defined as mix64(seed XOR mix64((index+1) * GOLDEN)). For a fixed master
    seed the inner term is distinct per index and the outer finalizer
    decorrelates nearby indices, so substreams may be consumed in any order
    or in parallel without overlap by construction.
    """
    if index < 0:
        raise ValueError(f"substream index must be >= 0, got {index}")
    inner = mix64(((index + 1) * GOLDEN) & MASK64)
    return mix64((seed & MASK64) ^ inner)


class Stream:
    """One deterministic random stream.

    Two streams with equal seeds yield identical sequences; the draw methods
    consume a fixed number of outputs per attempt (next_float: 1, next_below:
    one per 64 bits of the bound per rejection round) so call sequences are
    stable across platforms.
    """

    __slots__ = ("_state",)

    def __init__(self, seed):
        self._state = seed & MASK64

    def next_u64(self):
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def next_float(self):
        """Uniform in [0, 1), 53-bit resolution."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def next_below(self, n):
        """Uniform integer in [0, n), unbiased via bitmask rejection.

        Draws just enough 64-bit words to cover the bound, truncates to the
        bit width of n-1, and rejects overshoots; each round accepts with
        probability > 1/2, and arbitrarily large bounds are supported (counts
        in the permutation samplers overflow 64 bits well below n = 30).
        """
        if n <= 0:
            raise ValueError(f"next_below needs n >= 1, got {n}")
        if n == 1:
            return 0
        nbits = (n - 1).bit_length()
        words = (nbits + 63) // 64
        shift = words * 64 - nbits
        while True:
            u = 0
            for _ in range(words):
                u = (u << 64) | self.next_u64()
            u >>= shift
            if u < n:
                return u
