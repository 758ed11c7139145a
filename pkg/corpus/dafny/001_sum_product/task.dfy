// <vc-spec-fn>
function sum(s: seq<int>): int {
  if |s| == 0 then 0 else sum(s[..|s|-1]) + s[|s|-1]
}
// </vc-spec-fn>

// <vc-spec-fn>
function prod(s: seq<int>): int {
  if |s| == 0 then 1 else prod(s[..|s|-1]) * s[|s|-1]
}
// </vc-spec-fn>

// <vc-signature>
method sum_product(nums: seq<int>) returns (s: int, p: int)
// <vc-post>
  ensures s == sum(nums)
  ensures p == prod(nums)
// </vc-post>
// </vc-signature>
// <vc-impl>
{
  s := 0;
  p := 1;
  for i := 0 to |nums|
// <vc-invariant>
    invariant s == sum(nums[..i])
// </vc-invariant>
// <vc-invariant>
    invariant p == prod(nums[..i])
// </vc-invariant>
  {
    s := s + nums[i];
    p := p * nums[i];
  }
// <vc-assert>
  assert nums[..|nums|] == nums;
// </vc-assert>
}
// </vc-impl>
