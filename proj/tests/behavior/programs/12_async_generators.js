async function* ticker(n) {
  for (let i = 0; i < n; i++) {
    await null;
    yield i * i;
  }
}
async function collect() {
  const seen = [];
  for await (const v of ticker(4)) seen.push(v);
  return seen.join(",");
}
collect().then(function (s) { out.push(s); });
