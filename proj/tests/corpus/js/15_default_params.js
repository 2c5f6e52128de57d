function withDefault(cb = function () { return 'default'; }, arrow = () => 1) {
  return cb() + arrow();
}
function destructure({ a = () => 2, b: { c = x => x } = {} } = {}, [d = function named() {}] = []) {
  return [a, c, d];
}
const arrowDefaults = (fn = (y) => { return y; }) => fn(3);
