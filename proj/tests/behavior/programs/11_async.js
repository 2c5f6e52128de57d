async function double(x) { await null; return x * 2; }
async function pipeline(x) {
  var a = await double(x);
  var b = await double(a);
  return a + b;
}
var arrow = async (y) => (await double(y)) + 1;
pipeline(3).then(function (v) { out.push("pipeline", v); });
arrow(10).then((v) => out.push("arrow", v));
