function count() { return arguments.length; }
function sum() {
  var total = 0;
  for (var i = 0; i < arguments.length; i++) total += arguments[i];
  return total;
}
function firstViaArrow(a) { var g = () => arguments[0] + a; return g(); }
function rest(head, ...tail) { return head + ":" + tail.join(","); }
out.push(count(), count(1, 2, 3), sum(1, 2, 3, 4), firstViaArrow(5), rest(1, 2, 3));
