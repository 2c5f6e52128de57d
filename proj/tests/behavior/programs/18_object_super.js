const base = { hello() { return "base hello"; } };
const derived = {
  __proto__: base,
  hello() { return "derived + " + super.hello(); },
  ["computed" + 1]() { return "computed"; }
};
out.push(derived.hello(), derived.computed1());
