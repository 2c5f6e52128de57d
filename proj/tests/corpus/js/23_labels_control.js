outer: for (let i = 0; i < 3; i++) {
  inner: for (let j = 0; j < 3; j++) {
    if (j === 1) continue outer;
    if (i === 2) break inner;
  }
}
switch (Math.random() > 0.5 ? 1 : 2) {
  case 1: {
    const f = function () { return 'one'; };
    f();
    break;
  }
  default:
    (() => 'default')();
}
try {
  throw new Error('x');
} catch ({ message }) {
  void function () { return message; };
} finally {
  (function cleanup() {})();
}
do { var k = () => 0; } while (false)
