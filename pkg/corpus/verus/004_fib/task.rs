use vstd::prelude::*;

verus! {

// <vc-spec-fn>
spec fn fib(n: nat) -> nat
    decreases n,
{
    if n == 0 { 0 } else if n == 1 { 1 } else { fib((n - 2) as nat) + fib((n - 1) as nat) }
}
// </vc-spec-fn>

// <vc-spec-fn>
spec fn fib_fits_u64(n: nat) -> bool {
    fib(n) <= 0xffff_ffff_ffff_ffff
}
// </vc-spec-fn>

// <vc-helper>
proof fn lemma_fib_monotonic(i: nat, j: nat)
    requires
        i <= j,
    ensures
        fib(i) <= fib(j),
    decreases j - i,
{
    if i < 2 && j < 2 {
    } else if i == j {
    } else if i == j - 1 {
        reveal_with_fuel(fib, 2);
        lemma_fib_monotonic(i, (j - 1) as nat);
    } else {
        lemma_fib_monotonic(i, (j - 1) as nat);
        lemma_fib_monotonic(i, (j - 2) as nat);
    }
}
// </vc-helper>

// <vc-signature>
fn compute_fib(n: u64) -> (r: u64)
// <vc-pre>
    requires
        fib_fits_u64(n as nat),
// </vc-pre>
// <vc-post>
    ensures
        r == fib(n as nat),
// </vc-post>
// </vc-signature>
// <vc-impl>
{
    if n == 0 {
        return 0;
    }
    let mut prev: u64 = 0;
    let mut cur: u64 = 1;
    let mut i: u64 = 1;
    while i < n
// <vc-invariant>
        invariant
            1 <= i <= n,
            fib_fits_u64(n as nat),
            prev == fib((i - 1) as nat),
            cur == fib(i as nat),
// </vc-invariant>
        decreases n - i,
    {
// <vc-lemma-call>
        proof {
            lemma_fib_monotonic((i + 1) as nat, n as nat);
        }
// </vc-lemma-call>
        let next = prev + cur;
        prev = cur;
        cur = next;
        i = i + 1;
    }
    cur
}
// </vc-impl>

} // verus!

fn main() {}
