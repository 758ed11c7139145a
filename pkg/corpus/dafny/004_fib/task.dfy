// <vc-spec-fn>
function fib(n: nat): nat {
  if n == 0 then 0 else if n == 1 then 1 else fib(n - 1) + fib(n - 2)
}
// </vc-spec-fn>

// <vc-signature>
method compute_fib(n: nat) returns (r: nat)
// <vc-post>
  ensures r == fib(n)
// </vc-post>
// </vc-signature>
// <vc-impl>
{
  if n == 0 {
    r := 0;
    return;
  }
  var a: nat := 0;
  var b: nat := 1;
  var i: nat := 1;
  while i < n
// <vc-invariant>
    invariant 1 <= i <= n
    invariant a == fib(i - 1)
    invariant b == fib(i)
// </vc-invariant>
  {
    var t := a + b;
    a := b;
    b := t;
    i := i + 1;
  }
  r := b;
}
// </vc-impl>
