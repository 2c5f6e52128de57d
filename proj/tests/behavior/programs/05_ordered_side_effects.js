var log = [];
function first(x) {
  log.push("first:" + x);
  var r = second(x + 1);
  log.push("first-after:" + r);
  return r * 2;
}
function second(y) {
  log.push("second:" + y);
  return y * 10;
}
function neverCalled() { log.push("never"); }
out.push(first(1));
out.push(second(3));
out.push(log.join("|"));
