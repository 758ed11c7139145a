use vstd::prelude::*;

verus! {

// <vc-signature>
fn add(x: i32, y: i32) -> (r: i32)
// <vc-pre>
    requires
        -1000 <= x && x <= 1000,
        -1000 <= y && y <= 1000,
// </vc-pre>
// <vc-post>
    ensures
        r == x + y,
// </vc-post>
// </vc-signature>
// <vc-impl>
{
    x + y
}
// </vc-impl>

} // verus!

fn main() {}
