function min2(a: int, b: int): int {
  if a <= b then a else b
}

method min_index(s: seq<int>) returns (idx: int)
  requires |s| > 0
  ensures 0 <= idx < |s|
  ensures forall k :: 0 <= k < |s| ==> s[idx] <= s[k]
{
  idx := 0;
  for i := 1 to |s|
    invariant 0 <= idx < i
    invariant forall k :: 0 <= k < i ==> s[idx] <= s[k]
  {
    if s[i] < s[idx] {
      idx := i;
    }
  }
}
