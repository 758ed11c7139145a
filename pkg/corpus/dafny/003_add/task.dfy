// <vc-signature>
method add(x: int, y: int) returns (r: int)
// <vc-post>
  ensures r == x + y
// </vc-post>
// </vc-signature>
// <vc-impl>
{
  r := x + y;
}
// </vc-impl>
