function* range(from, to) {
  for (var i = from; i < to; i++) yield i;
  return "done";
}
function* delegating() {
  var r = yield* range(0, 3);
  yield r;
}
var it = { *[Symbol.iterator]() { yield "a"; yield "b"; } };
out.push([...range(2, 5)].join(","), [...delegating()].join(","), [...it].join(""));
var g = range(0, 2);
out.push(JSON.stringify([g.next(), g.next(), g.next()]));
