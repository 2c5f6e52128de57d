async function load(url) {
  const res = await fetch(url);
  return res.text();
}
function* counter(n) {
  for (let i = 0; i < n; i++) yield i;
}
async function* stream() {
  for await (const chunk of [Promise.resolve(1)]) {
    yield chunk;
  }
}
const genExpr = function* named() { yield* counter(2); };
const asyncExpr = async function () { return 1; };
(async () => {
  for await (const v of stream()) console.log(v);
})();
