"""
Portable pseudo-random numbers for corpora and RANDOM schedules.

Generator: xorshift64* over 64-bit unsigned words.

    seeding   state = splitmix64(seed mod 2^64), replaced by 0x9E3779B97F4A7C15 if 0
    update    x ^= x >> 12
              x ^= (x << 25) mod 2^64
              x ^= x >> 27
    output    (x * 0x2545F4914F6CDD1D) mod 2^64

Bounded draws use rejection sampling on the top bits of concatenated words,
so results depend only on the seed, never on the platform or the Python
`random` module.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MULTIPLIER = 0x2545F4914F6CDD1D


def splitmix64(x):
    x = (x + GOLDEN) & MASK64
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    def __init__(self, seed=0):
        self.state = splitmix64(seed & MASK64) or GOLDEN

    def next_u64(self):
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * MULTIPLIER) & MASK64

    def randbits(self, k):
        if k <= 0:
            return 0
        words = (k + 63) // 64
        value = 0
        for _ in range(words):
            value = (value << 64) | self.next_u64()
        return value >> (words * 64 - k)

    def randbelow(self, bound):
        assert bound >= 1, "bound must be positive"
        if bound == 1:
            return 0
        bits = (bound - 1).bit_length()
        while True:
            r = self.randbits(bits)
            if r < bound:
                return r

    def randint(self, low, high):
        """uniform in [low, high], both ends included"""
        return low + self.randbelow(high - low + 1)

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]
