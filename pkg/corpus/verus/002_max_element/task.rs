use vstd::prelude::*;

verus! {

// <vc-signature>
fn max_element(l: &Vec<i32>) -> (m: i32)
// <vc-pre>
    requires
        l.len() > 0,
// </vc-pre>
// <vc-post>
    ensures
        forall|k: int| 0 <= k < l@.len() ==> l@[k] <= m,
        exists|k: int| 0 <= k < l@.len() && l@[k] == m,
// </vc-post>
// </vc-signature>
// <vc-impl>
{
    let mut m = l[0];
    let mut i: usize = 1;
    while i < l.len()
// <vc-invariant>
        invariant
            1 <= i <= l@.len(),
            forall|k: int| 0 <= k < i ==> l@[k] <= m,
            exists|k: int| 0 <= k < i && l@[k] == m,
// </vc-invariant>
        decreases l@.len() - i,
    {
        if l[i] > m {
            m = l[i];
        }
        i = i + 1;
    }
    m
}
// </vc-impl>

} // verus!

fn main() {}
