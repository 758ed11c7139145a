from nagini_contracts.contracts import *


# <vc-signature>
def add(x: int, y: int) -> int:
# <vc-post>
    Ensures(Result() == x + y)
# </vc-post>
# </vc-signature>
# <vc-impl>
    return x + y
# </vc-impl>
