use vstd::prelude::*;

verus! {

// <vc-signature>
fn all_positive(l: &Vec<i32>) -> (res: bool)
// <vc-post>
    ensures
        res == (forall|k: int| 0 <= k < l@.len() ==> l@[k] > 0),
// </vc-post>
// </vc-signature>
// <vc-impl>
{
    let mut i: usize = 0;
    while i < l.len()
// <vc-invariant>
        invariant
            i <= l@.len(),
            forall|k: int| 0 <= k < i ==> l@[k] > 0,
// </vc-invariant>
        decreases l@.len() - i,
    {
        if l[i] <= 0 {
            return false;
        }
        i = i + 1;
    }
    true
}
// </vc-impl>

} // verus!

fn main() {}
