function fact(n) { return n <= 1 ? 1 : n * fact(n - 1); }
function fib(n) { return n < 2 ? n : fib(n - 1) + fib(n - 2); }
var isEven = function (n) { return n === 0 ? true : isOdd(n - 1); };
function isOdd(n) { return n === 0 ? false : isEven(n - 1); }
out.push(fact(10), fib(15), isEven(10), isOdd(7));
