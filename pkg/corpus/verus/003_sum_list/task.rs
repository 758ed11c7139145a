use vstd::prelude::*;

verus! {

// <vc-spec-fn>
spec fn total(s: Seq<i32>) -> int
    decreases s.len(),
{
    if s.len() == 0 { 0 } else { total(s.drop_last()) + s.last() as int }
}
// </vc-spec-fn>

// <vc-signature>
fn sum_list(l: &Vec<i32>) -> (r: i64)
// <vc-pre>
    requires
        l.len() <= 1000,
// </vc-pre>
// <vc-post>
    ensures
        r == total(l@),
// </vc-post>
// </vc-signature>
// <vc-impl>
{
    let mut r: i64 = 0;
    let mut i: usize = 0;
    while i < l.len()
// <vc-invariant>
        invariant
            i <= l@.len(),
            l@.len() <= 1000,
            r == total(l@.take(i as int)),
            (-2147483648) * (i as int) <= r <= 2147483647 * (i as int),
// </vc-invariant>
        decreases l@.len() - i,
    {
// <vc-assert>
        proof {
            assert(l@.take(i as int + 1).drop_last() =~= l@.take(i as int));
            assert(l@.take(i as int + 1).last() == l@[i as int]);
        }
// </vc-assert>
        r = r + l[i] as i64;
        i = i + 1;
    }
// <vc-assert>
    proof {
        assert(l@.take(l@.len() as int) =~= l@);
    }
// </vc-assert>
    r
}
// </vc-impl>

} // verus!

fn main() {}
