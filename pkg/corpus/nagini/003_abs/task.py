from nagini_contracts.contracts import *


# <vc-signature>
def abs_value(x: int) -> int:
# <vc-post>
    Ensures(Result() >= x and Result() >= -x)
    Ensures(Result() == x or Result() == -x)
# </vc-post>
# </vc-signature>
# <vc-impl>
    if x >= 0:
        return x
    return -x
# </vc-impl>
