const { a = function () {}, ...rest } = { b: () => 1 };
const [x = () => 2, , y] = [];
const merged = { ...rest, fn() { return a; } };
function variadic(...args) {
  return args.map(({ v = () => 0 }) => v());
}
for (const { k = x => x } of []) {}
