from nagini_contracts.contracts import *


# <vc-spec-fn>
@Pure
def fib(n: int) -> int:
    return 0 if n <= 0 else (1 if n == 1 else fib(n - 1) + fib(n - 2))
# </vc-spec-fn>


# <vc-signature>
def compute_fib(n: int) -> int:
# <vc-pre>
    Requires(n >= 0)
# </vc-pre>
# <vc-post>
    Ensures(Result() == fib(n))
# </vc-post>
# </vc-signature>
# <vc-impl>
    if n == 0:
        return 0
    a = 0
    b = 1
    i = 1
    while i < n:
# <vc-invariant>
        Invariant(1 <= i and i <= n)
        Invariant(a == fib(i - 1) and b == fib(i))
# </vc-invariant>
        t = a + b
        a = b
        b = t
        i = i + 1
    return b
# </vc-impl>
