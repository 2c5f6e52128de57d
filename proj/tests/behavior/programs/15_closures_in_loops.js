function makeAll(n) {
  var fs = [];
  for (let i = 0; i < n; i++) fs.push(function () { return i * i; });
  return fs;
}
function makeShared(n) {
  var fs = [];
  for (var j = 0; j < n; j++) fs.push(() => j);
  return fs;
}
out.push(makeAll(4).map(function (f) { return f(); }).join(","));
out.push(makeShared(3).map((f) => f()).join(","));
