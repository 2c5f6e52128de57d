var add = function (a, b) { return a + b; };
var named = function fact(n) { return n <= 1 ? 1 : n * fact(n - 1); };
var iife = (function () {
  var hidden = function () { return 'hidden'; };
  return { get: function () { return hidden(); } };
})();
setTimeout(function () { console.log(add(1, 2)); }, 0);
[1, 2, 3].map(function (x) { return x * x; });
