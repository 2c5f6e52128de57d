// Parameters redeclared with `var` keep the argument value.
function keep(a) {
  var a;
  return a;
}
function loop(key, o) {
  for (var key in o) out.push('k:' + key);
  return key;
}
const arrow = (x, [y]) => {
  var y;
  return x + y;
};
function plain(n) {
  var m = n * 2;
  return m;
}
out.push(keep(1));
if (globalThis.FULL_RUN) {
  out.push(loop('start', { a: 1 }));
  out.push(arrow(2, [3]));
  out.push(plain(4));
}
