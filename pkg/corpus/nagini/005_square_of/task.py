from nagini_contracts.contracts import *


# <vc-signature>
def square_of(n: int) -> int:
# <vc-pre>
    Requires(n >= 0)
# </vc-pre>
# <vc-post>
    Ensures(Result() == n * n)
# </vc-post>
# </vc-signature>
# <vc-impl>
    r = 0
    i = 0
    while i < n:
# <vc-invariant>
        Invariant(0 <= i and i <= n)
        Invariant(r == i * i)
# </vc-invariant>
        r = r + 2 * i + 1
        i = i + 1
# <vc-assert>
    Assert(i == n)
# </vc-assert>
    return r
# </vc-impl>
