function makeCounter(start) {
  var n = start;
  return {
    inc: function () { n += 1; return n; },
    dec: () => --n,
    get value() { return n; }
  };
}
var c = makeCounter(10);
c.inc(); c.inc(); c.dec();
out.push(c.value);
var d = makeCounter(0);
out.push(d.inc(), c.value);
