"""Source text of the hand-written Acol programs shipped with the package."""

POWER = """\
# the initial environment (i.e. input): base = 2, exponent = 5

# the program
val = 1;
while exponent > 0 {
    val = val * base;
    exponent = exponent - 1;
}
"""
POWER_ENV = {"base": 2, "exponent": 5}

PRIME = """\
while (start < V) {
    if (V mod start == 0) {
        is_prime := 0;
    } else {
        is_prime := is_prime;
    }
    start := start + 1;
}
"""
PRIME_ENV = {"is_prime": 1, "start": 2, "V": 34265341}

FIB = """\
i := 1;
while i < n {
    b := b + a;
    a := b - a;
    i := i + 1;
}
"""
FIB_ENV = {"a": 0, "b": 1, "n": 400000}

FIB_MOD = """\
i := 1;
while i < n {
    b := b + a mod 1000000;
    a := b - a mod 1000000;
    i := i + 1;
}
"""
FIB_MOD_ENV = {"a": 0, "b": 1, "n": 10000000}

SOURCES = {"power": POWER, "prime": PRIME, "fib": FIB, "fib_mod": FIB_MOD}
ENVS = {"power": POWER_ENV, "prime": PRIME_ENV, "fib": FIB_ENV, "fib_mod": FIB_MOD_ENV}
