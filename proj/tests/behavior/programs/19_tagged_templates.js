function tag(strings, ...values) {
  return strings.raw.map((s, i) => s + (i < values.length ? "[" + values[i] + "]" : "")).join("");
}
function label(n) { return `item-${n}`; }
out.push(tag`a${1}b${label(2)}c`, `${label(3)}!`);
