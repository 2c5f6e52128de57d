var calls = 0;
function handler(kind) {
  calls++;
  switch (kind) {
    case "a": return onA();
    case "b": return onB();
    default: return "none";
  }
}
function onA() { return "A" + helper(1); }
function onB() { return "B" + helper(2); }
function helper(n) { return "-" + n + "-" + calls; }
out.push(handler("a"));
if (globalThis.FULL_RUN) out.push(handler("b"), handler("z"));
