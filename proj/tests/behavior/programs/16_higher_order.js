function compose(...fns) { return (x) => fns.reduceRight((acc, f) => f(acc), x); }
const add = (n) => (x) => x + n;
const mul = (n) => (x) => x * n;
function memo(f) {
  const cache = new Map();
  return function (x) {
    if (!cache.has(x)) cache.set(x, f.call(this, x));
    return cache.get(x);
  };
}
const slowSquare = memo(function (x) { out.push("compute " + x); return x * x; });
out.push(compose(add(1), mul(3))(4), slowSquare(4), slowSquare(4));
