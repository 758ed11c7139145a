use vstd::prelude::*;

verus! {

fn min2(a: i32, b: i32) -> (m: i32)
    ensures
        m <= a,
        m <= b,
        m == a || m == b,
{
    if a <= b {
        a
    } else {
        b
    }
}

} // verus!

fn main() {}
