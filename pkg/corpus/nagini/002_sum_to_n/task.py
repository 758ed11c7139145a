from nagini_contracts.contracts import *


# <vc-spec-fn>
@Pure
def sum_to(n: int) -> int:
    return 0 if n <= 0 else sum_to(n - 1) + n
# </vc-spec-fn>


# <vc-signature>
def sum_to_n(n: int) -> int:
# <vc-pre>
    Requires(n >= 0)
# </vc-pre>
# <vc-post>
    Ensures(Result() == sum_to(n))
# </vc-post>
# </vc-signature>
# <vc-impl>
    r = 0
    i = 0
    while i < n:
# <vc-invariant>
        Invariant(0 <= i and i <= n)
        Invariant(r == sum_to(i))
# </vc-invariant>
        i = i + 1
        r = r + i
    return r
# </vc-impl>
