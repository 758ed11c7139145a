// <vc-spec-fn>
function total(s: seq<int>): int {
  if |s| == 0 then 0 else s[0] + total(s[1..])
}
// </vc-spec-fn>

// <vc-helper>
lemma total_prefix_step(s: seq<int>, i: int)
  requires 0 <= i < |s|
  ensures total(s[..i+1]) == total(s[..i]) + s[i]
  decreases i
{
  if i == 0 {
    assert s[..1] == [s[0]];
    assert s[..0] == [];
  } else {
    total_prefix_step(s[1..], i - 1);
    assert s[..i+1][1..] == s[1..][..i];
    assert s[..i][1..] == s[1..][..i-1];
  }
}
// </vc-helper>

// <vc-signature>
method sum_list(l: seq<int>) returns (s: int)
// <vc-post>
  ensures s == total(l)
// </vc-post>
// </vc-signature>
// <vc-impl>
{
  s := 0;
  var i := 0;
  while i < |l|
// <vc-invariant>
    invariant 0 <= i <= |l|
    invariant s == total(l[..i])
// </vc-invariant>
  {
// <vc-lemma-call>
    total_prefix_step(l, i);
// </vc-lemma-call>
    s := s + l[i];
    i := i + 1;
  }
// <vc-assert>
  assert l[..|l|] == l;
// </vc-assert>
}
// </vc-impl>
