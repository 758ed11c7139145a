// <vc-signature>
method max_element(l: seq<int>) returns (m: int)
// <vc-pre>
  requires |l| > 0
// </vc-pre>
// <vc-post>
  ensures forall k :: 0 <= k < |l| ==> l[k] <= m
  ensures exists k :: 0 <= k < |l| && l[k] == m
// </vc-post>
// </vc-signature>
// <vc-impl>
{
  m := l[0];
  for i := 1 to |l|
// <vc-invariant>
    invariant forall k :: 0 <= k < i ==> l[k] <= m
    invariant exists k :: 0 <= k < i && l[k] == m
// </vc-invariant>
  {
    if l[i] > m {
      m := l[i];
    }
  }
}
// </vc-impl>
